//! Supersymmetric extension of `H(q,p) = ½g^{ij}(p_i − A_i)(p_j − A_j) + ½g^{jk}W_{,j}W_{,k}`:
//!
//! `ℋ = ½g^{ij}P_iP_j + ½R_{ikjl}θ^jθ^lπ^iπ^k + ½g^{jk}W_{,j}W_{,k} − W_{;ij}θ^iπ^j`,
//! `P_i = ξ_i − (i/2)(g_{ik,l} − g_{il,k})θ^kπ^l − A_i`, with
//! `R_{ikjl} = ½(g_{ij,kl} + g_{kl,ij} − g_{jk,il} − g_{il,jk}) + g_{mn}(Γ^m_{ij}Γ^n_{kl} − Γ^m_{il}Γ^n_{jk})`
//! and `W_{;ij} = W_{,ij} − Γ^m_{ij}W_{,m}`. Metric, potential and superpotential are
//! expressions in `q₁, …, q_d`, continued to Λ at the base point.
//!
//! In one flat dimension the extension has two forms, depending on whether the odd variables are
//! the real `ψ_α` or the complex `ψ, ψ̄`; [`SusyRoute`] selects one.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grassmann::{Supernumber, C64, I};
use crate::superlinalg::even_inverse;
use crate::superspace::expr::Expr;
use crate::weyl_dynamics::{super_hamilton_flow, FlowConfig, FlowState, SuperHamiltonian};

/// `g_{ij}`, `A_i`, `W` with their symbolic derivatives up to the order the extension needs.
#[derive(Clone, Debug)]
pub struct MetricData {
    d: usize,
    g: Vec<Vec<Expr>>,
    a: Vec<Expr>,
    w: Expr,
    /// `g_{ij,k}`.
    dg: Vec<Vec<Vec<Expr>>>,
    /// `g_{ij,kl}`.
    ddg: Vec<Vec<Vec<Vec<Expr>>>>,
    dw: Vec<Expr>,
    ddw: Vec<Vec<Expr>>,
}

impl MetricData {
    pub fn new(g: Vec<Vec<Expr>>, a: Vec<Expr>, w: Expr) -> Result<Self> {
        let d = g.len();
        if d == 0 || g.iter().any(|r| r.len() != d) || a.len() != d {
            return Err(Error::ShapeMismatch(format!("metric must be d×d with d potentials, got {} rows and {} potentials", d, a.len())));
        }
        if g.iter().flatten().chain(&a).chain(std::iter::once(&w)).any(|e| e.arity() > d) {
            return Err(Error::ShapeMismatch(format!("expressions may only use q1..q{d}")));
        }
        let dg: Vec<Vec<Vec<Expr>>> = g.iter().map(|r| r.iter().map(|e| (0..d).map(|k| e.diff(k)).collect()).collect()).collect();
        let ddg = dg.iter().map(|r| r.iter().map(|ek| ek.iter().map(|e| (0..d).map(|l| e.diff(l)).collect()).collect()).collect()).collect();
        let dw: Vec<Expr> = (0..d).map(|j| w.diff(j)).collect();
        let ddw = dw.iter().map(|e| (0..d).map(|k| e.diff(k)).collect()).collect();
        Ok(MetricData { d, g, a, w, dg, ddg, dw, ddw })
    }

    /// Euclidean metric in `d` dimensions.
    pub fn flat(d: usize, a: Vec<Expr>, w: Expr) -> Result<Self> {
        let g = (0..d).map(|i| (0..d).map(|j| Expr::c(if i == j { 1.0 } else { 0.0 })).collect()).collect();
        Self::new(g, a, w)
    }

    /// Rows separated by `;`, entries by `,`. An empty `a` means no vector potential.
    pub fn parse(g: &str, a: &str, w: &str) -> Result<Self> {
        let g: Vec<Vec<Expr>> = g.split(';').map(|row| row.split(',').map(|e| Expr::parse(e.trim())).collect()).collect::<Result<_>>()?;
        let a = if a.trim().is_empty() { vec![Expr::c(0.0); g.len()] } else { a.split(',').map(|e| Expr::parse(e.trim())).collect::<Result<_>>()? };
        Self::new(g, a, Expr::parse(w)?)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn superpotential(&self) -> &Expr {
        &self.w
    }

    /// Metric, Christoffel symbols, curvature and covariant Hessian of `W` at `x`.
    pub fn geometry(&self, x: &[Supernumber]) -> Result<Geometry> {
        let d = self.d;
        if x.len() != d {
            return Err(Error::ShapeMismatch(format!("point has {} coordinates, metric has {d}", x.len())));
        }
        let ev = |e: &Expr| e.eval_super(x);
        let grid2 = |m: &Vec<Vec<Expr>>| -> Result<Vec<Vec<Supernumber>>> { m.iter().map(|r| r.iter().map(ev).collect()).collect() };
        let g = grid2(&self.g)?;
        for i in 0..d {
            for j in 0..i {
                if g[i][j].max_diff(&g[j][i]) > 1e-12 * (1.0 + g[i][j].body().norm()) {
                    return Err(Error::Domain(format!("metric is not symmetric in ({}, {})", i + 1, j + 1)));
                }
            }
        }
        let ginv = even_inverse(&g)?;
        let dg: Vec<Vec<Vec<Supernumber>>> = self.dg.iter().map(|r| r.iter().map(|ek| ek.iter().map(ev).collect()).collect::<Result<_>>()).collect::<Result<_>>()?;
        let ddg: Vec<Vec<Vec<Vec<Supernumber>>>> =
            self.ddg.iter().map(|r| r.iter().map(|ek| ek.iter().map(|el| el.iter().map(ev).collect()).collect::<Result<_>>()).collect::<Result<_>>()).collect::<Result<_>>()?;
        let l = x.iter().map(|e| e.num_generators()).max().unwrap_or(0);
        let zero = Supernumber::zero(l);
        // Γ^m_{ij} = ½ g^{mk}(g_{ki,j} + g_{kj,i} − g_{ij,k}).
        let gamma: Vec<Vec<Vec<Supernumber>>> = (0..d)
            .map(|m| {
                (0..d)
                    .map(|i| {
                        (0..d)
                            .map(|j| (0..d).fold(zero.clone(), |acc, k| acc + &ginv[m][k] * &(&dg[k][i][j] + &dg[k][j][i] - &dg[i][j][k]).scale(0.5)))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let mut riemann = vec![vec![vec![vec![zero.clone(); d]; d]; d]; d];
        for i in 0..d {
            for k in 0..d {
                for j in 0..d {
                    for ll in 0..d {
                        let mut r = (&ddg[i][j][k][ll] + &ddg[k][ll][i][j] - &ddg[j][k][i][ll] - &ddg[i][ll][j][k]).scale(0.5);
                        for m in 0..d {
                            for n in 0..d {
                                r += &(&g[m][n] * &(&gamma[m][i][j] * &gamma[n][k][ll] - &gamma[m][i][ll] * &gamma[n][j][k]));
                            }
                        }
                        riemann[i][k][j][ll] = r;
                    }
                }
            }
        }
        let dw: Vec<Supernumber> = self.dw.iter().map(ev).collect::<Result<_>>()?;
        let hess_w = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| {
                        let raw = ev(&self.ddw[i][j])?;
                        Ok((0..d).fold(raw, |acc, m| acc - &gamma[m][i][j] * &dw[m]))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        let a = self.a.iter().map(ev).collect::<Result<_>>()?;
        Ok(Geometry { g, ginv, dg, gamma, riemann, dw, hess_w, a })
    }

    /// `R_{ikjl}` at a real point, indexed `[i][k][j][l]`.
    pub fn riemann_at(&self, q: &[f64]) -> Result<Vec<Vec<Vec<Vec<f64>>>>> {
        let x: Vec<Supernumber> = q.iter().map(|&v| Supernumber::scalar(0, v)).collect();
        let geo = self.geometry(&x)?;
        Ok(geo.riemann.iter().map(|a| a.iter().map(|b| b.iter().map(|c| c.iter().map(|e| e.body().re).collect()).collect()).collect()).collect())
    }
}

/// Geometric data at one point of `ℝ^{d|0}`.
#[derive(Clone, Debug)]
pub struct Geometry {
    pub g: Vec<Vec<Supernumber>>,
    pub ginv: Vec<Vec<Supernumber>>,
    /// `g_{ij,k}` indexed `[i][j][k]`.
    pub dg: Vec<Vec<Vec<Supernumber>>>,
    /// `Γ^m_{ij}` indexed `[m][i][j]`.
    pub gamma: Vec<Vec<Vec<Supernumber>>>,
    /// `R_{ikjl}` indexed `[i][k][j][l]`.
    pub riemann: Vec<Vec<Vec<Vec<Supernumber>>>>,
    pub dw: Vec<Supernumber>,
    /// `W_{;ij}`.
    pub hess_w: Vec<Vec<Supernumber>>,
    pub a: Vec<Supernumber>,
}

/// The extended Hamiltonian at `(x, ξ, θ, π)`; `θ, π` have `d` components each.
pub fn susy_extension(data: &MetricData, x: &[Supernumber], xi: &[Supernumber], theta: &[Supernumber], pi: &[Supernumber]) -> Result<Supernumber> {
    let d = data.dim();
    if xi.len() != d || theta.len() != d || pi.len() != d {
        return Err(Error::ShapeMismatch(format!("expected {d} components for ξ, θ and π")));
    }
    let geo = data.geometry(x)?;
    let l = x.iter().chain(xi).chain(theta).chain(pi).map(|e| e.num_generators()).max().unwrap_or(0);
    let zero = Supernumber::zero(l);
    let tp: Vec<Vec<Supernumber>> = theta.iter().map(|t| pi.iter().map(|p| t * p).collect()).collect();
    let momenta: Vec<Supernumber> = (0..d)
        .map(|i| {
            let mut twist = zero.clone();
            for k in 0..d {
                for m in 0..d {
                    twist += &(&(&geo.dg[i][k][m] - &geo.dg[i][m][k]) * &tp[k][m]);
                }
            }
            &(&xi[i] - &twist.scale(I * 0.5)) - &geo.a[i]
        })
        .collect();
    let mut h = zero.clone();
    for i in 0..d {
        for j in 0..d {
            h += &(&geo.ginv[i][j] * &(&momenta[i] * &momenta[j]).scale(0.5));
            h += &(&geo.ginv[i][j] * &(&geo.dw[i] * &geo.dw[j]).scale(0.5));
            h -= &(&geo.hess_w[i][j] * &tp[i][j]);
        }
    }
    for i in 0..d {
        for k in 0..d {
            for j in 0..d {
                for m in 0..d {
                    let r = &geo.riemann[i][k][j][m];
                    if !r.is_zero() {
                        h += &(r * &(&theta[j] * &theta[m] * &pi[i] * &pi[k])).scale(0.5);
                    }
                }
            }
        }
    }
    Ok(h)
}

/// The two flat one-dimensional extensions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SusyRoute {
    /// Real odd variables: `½(ξ − A)² + ½W'² + iW''θπ`.
    RealOdd,
    /// Complex odd variables `θ = ψ, π = ψ̄`: `½(ξ − A)² + ½W'² − W''θπ`.
    Complexified,
}

/// Flat `(1|1)` Hamiltonian for the chosen route; `a` and `w` are expressions in `q`.
pub fn flat_susy_hamiltonian(route: SusyRoute, a: &Expr, w: &Expr) -> Result<SuperHamiltonian> {
    if a.arity() > 1 || w.arity() > 1 {
        return Err(Error::ShapeMismatch("flat one-dimensional data may only use q".into()));
    }
    let (a, dw, ddw) = (a.clone(), w.diff(0), w.diff(0).diff(0));
    let odd_coeff = match route {
        SusyRoute::RealOdd => I,
        SusyRoute::Complexified => C64::new(-1.0, 0.0),
    };
    Ok(SuperHamiltonian::new(1, 1, move |_, x, xi, th, pi| {
        let kin = &xi[0] - &a.eval_super(x)?;
        let w1 = dw.eval_super(x)?;
        let w2 = ddw.eval_super(x)?;
        Ok((&kin * &kin).scale(0.5) + (&w1 * &w1).scale(0.5) + (&w2 * &(&th[0] * &pi[0])).scale(odd_coeff))
    }))
}

/// `½(ξ − ax)² ± ½b²x² + ibθπ`, the flat harmonic symbol with sign `+` for the real-odd
/// route with `W = ½bx²` and `−` for the complexified one with `W = −(i/2)bx²`.
pub fn harmonic_symbol(plus: bool, a: f64, b: f64) -> SuperHamiltonian {
    let s = if plus { 0.5 } else { -0.5 };
    SuperHamiltonian::new(1, 1, move |_, x, xi, th, pi| {
        let kin = &xi[0] - &x[0].scale(a);
        Ok((&kin * &kin).scale(0.5) + (&x[0] * &x[0]).scale(s * b * b) + (&th[0] * &pi[0]).scale(I * b))
    })
}

/// Odd scale for which the complexified route reproduces `ψ̇ = −iW''ψ`, `ψ̄̇ = iW''ψ̄`.
pub const SUPERCHARGE_ODD_SCALE: C64 = I;

/// `(Q₁, Q₂)` with `Q_α = ψ_α ẋ − ε_{αβ}ψ_β W'`, `ψ₁ = (θ + π)/√2`, `ψ₂ = (θ − π)/(√2 i)`.
pub fn supercharges(h: &SuperHamiltonian, w: &Expr, s: &FlowState) -> Result<[Supernumber; 2]> {
    let [_, hxi, _, _] = h.gradient(s)?;
    let xdot = &hxi[0];
    let dw = w.diff(0).eval_super(&s.x)?;
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let psi1 = (&s.theta[0] + &s.pi[0]).scale(r);
    let psi2 = (&s.theta[0] - &s.pi[0]).scale(C64::new(0.0, -r));
    let q1 = &psi1 * xdot - &psi2 * &dw;
    let q2 = &psi2 * xdot + &psi1 * &dw;
    Ok([q1, q2])
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DriftReport {
    /// Largest coefficient change of `Q₁` and `Q₂` along the trajectory.
    pub charge_drift: [f64; 2],
    pub energy_drift: f64,
    pub states: usize,
}

/// Integrate the complexified flat flow with potential `a` and superpotential `w`, and
/// measure how far the supercharges and ℋ move.
pub fn supercharge_drift(a: &Expr, w: &Expr, initial: &FlowState, cfg: &FlowConfig) -> Result<DriftReport> {
    let h = flat_susy_hamiltonian(SusyRoute::Complexified, a, w)?;
    let traj = super_hamilton_flow(&h, initial, cfg)?;
    let q0 = supercharges(&h, w, initial)?;
    let e0 = h.value(initial)?;
    let mut report = DriftReport { charge_drift: [0.0; 2], energy_drift: 0.0, states: traj.len() };
    for s in &traj {
        let q = supercharges(&h, w, s)?;
        for k in 0..2 {
            report.charge_drift[k] = report.charge_drift[k].max(q[k].max_diff(&q0[k]));
        }
        report.energy_drift = report.energy_drift.max(h.value(s)?.max_diff(&e0));
    }
    Ok(report)
}
