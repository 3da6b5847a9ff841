//! Classical super-quantities for the free Weyl equation, generic super-Hamilton flows and
//! Qi's weakly hyperbolic equation.
//!
//! The free Weyl symbol on `T*ℝ^{3|2}` is
//! `ℋ(ξ,θ,π) = cζθ₁θ₂ + cⱪ⁻²ζ̄π₁π₂ − icⱪ⁻¹ξ₃(θ₁π₁ + θ₂π₂)` with `ζ = ξ₁ + iξ₂`.
//! Its Hamilton–Jacobi action is quadratic in the odd variables with coefficients built from
//! `γ_t = cⱪ⁻¹t|ξ|` and `δ̄(t) = |ξ|cos γ_t − iξ₃ sin γ_t`. The amplitude is the
//! superdeterminant of the mixed Hessian of the action, and integrating the resulting
//! oscillatory kernel over `π` reproduces the 2×2 matrix propagator in momentum space.
//!
//! Everything is evaluated inside Λ, so momenta and odd variables may carry souls. All odd
//! derivatives are left derivatives, computed exactly with [`crate::dual`].

pub mod flow;
pub mod qi;

use nalgebra::Matrix2;

use crate::berezin::{berezin_top, OddPolynomial};
use crate::dual::{even_partial, odd_partial};
use crate::error::{Error, Result};
use crate::fourier_odd::{fo, OddFourierConfig};
use crate::grassmann::{Analytic, Supernumber, C64, I, ONE};
use crate::superlinalg::Supermatrix;

pub use flow::{free_weyl_closed_form, super_hamilton_flow, FlowConfig, FlowState, SuperHamiltonian};
pub use qi::{analytic_from_expr, qi_coefficients, qi_components, qi_expr, qi_fd, qi_phi, qi_riccati_residual, qi_solve, qi_system_mode, QiSolution};

/// Parameters of the free Weyl symbol and its action.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeylSymbolParams {
    pub c: f64,
    pub hbar: f64,
    pub kappa: C64,
    /// Coefficient of `⟨θ|π⟩` in the initial action; the quantization-facing value is `ħ/ⱪ`.
    pub a: C64,
}

/// Which closed form of the action to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ActionRoute {
    /// Direct solution through the Riccati equation for the `θ₁θ₂` coefficient.
    Riccati,
    /// Solution along characteristics, with `a = ħ/ⱪ` built in.
    Jacobi,
}

// Slot layout of the action's arguments.
const T: usize = 0;
const X: usize = 1;
const XI: usize = 4;
const TH: usize = 7;
const PI: usize = 9;
const SLOTS: usize = 11;

fn pack(t: &Supernumber, x: &[Supernumber], xi: &[Supernumber], theta: &[Supernumber], pi: &[Supernumber]) -> Result<Vec<Supernumber>> {
    if x.len() != 3 || xi.len() != 3 || theta.len() != 2 || pi.len() != 2 {
        return Err(Error::ShapeMismatch("expected x, ξ ∈ Λ³ and θ, π ∈ Λ²".into()));
    }
    let mut v = Vec::with_capacity(SLOTS);
    v.push(t.clone());
    v.extend_from_slice(x);
    v.extend_from_slice(xi);
    v.extend_from_slice(theta);
    v.extend_from_slice(pi);
    Ok(v)
}

impl WeylSymbolParams {
    /// `a` defaults to `ħ/ⱪ`.
    pub fn new(c: f64, hbar: f64, kappa: impl Into<C64>) -> Result<Self> {
        let kappa = kappa.into();
        if !(c.is_finite() && hbar.is_finite() && hbar != 0.0) || kappa.norm() == 0.0 || !kappa.is_finite() {
            return Err(Error::Domain(format!("need finite c, nonzero ħ and ⱪ (c={c}, ħ={hbar}, ⱪ={kappa})")));
        }
        Ok(WeylSymbolParams { c, hbar, kappa, a: C64::new(hbar, 0.0) / kappa })
    }

    pub fn with_a(self, a: impl Into<C64>) -> Self {
        WeylSymbolParams { a: a.into(), ..self }
    }

    /// `|ξ|` by Grassmann continuation; the body must be nonzero.
    pub fn norm(xi: &[Supernumber]) -> Result<Supernumber> {
        let sq: Supernumber = xi.iter().map(|x| x * x).sum();
        sq.apply(&Analytic::Sqrt).map_err(|_| Error::Domain(format!("|ξ| needs a nonzero real body, got |ξ|² = {}", sq.body())))
    }

    pub fn zeta(xi: &[Supernumber]) -> Supernumber {
        &xi[0] + &xi[1].scale(I)
    }

    pub fn zeta_bar(xi: &[Supernumber]) -> Supernumber {
        &xi[0] - &xi[1].scale(I)
    }

    pub fn gamma(&self, t: &Supernumber, xi: &[Supernumber]) -> Result<Supernumber> {
        Ok((t * &Self::norm(xi)?).scale(self.c / self.kappa))
    }

    /// `|ξ|cos γ_t − iξ₃ sin γ_t`.
    pub fn delta_bar(&self, t: &Supernumber, xi: &[Supernumber]) -> Result<Supernumber> {
        let g = self.gamma(t, xi)?;
        Ok(Self::norm(xi)? * g.cos() - (&xi[2] * &g.sin()).scale(I))
    }

    /// `|ξ|cos γ_t + iξ₃ sin γ_t`.
    pub fn delta(&self, t: &Supernumber, xi: &[Supernumber]) -> Result<Supernumber> {
        let g = self.gamma(t, xi)?;
        Ok(Self::norm(xi)? * g.cos() + (&xi[2] * &g.sin()).scale(I))
    }

    fn delta_bar_inverse(&self, t: &Supernumber, xi: &[Supernumber]) -> Result<Supernumber> {
        let db = self.delta_bar(t, xi)?;
        let scale = Self::norm(xi)?.body().norm();
        if db.body().norm() <= 1e-12 * scale {
            return Err(Error::Caustic(format!("δ̄(t) vanishes at t = {}", t.body())));
        }
        db.inverse()
    }

    /// The free Weyl symbol `ℋ(ξ, θ, π)`.
    pub fn symbol(&self, xi: &[Supernumber], theta: &[Supernumber], pi: &[Supernumber]) -> Supernumber {
        let k = self.kappa;
        let th12 = &theta[0] * &theta[1];
        let pi12 = &pi[0] * &pi[1];
        let tp = &theta[0] * &pi[0] + &theta[1] * &pi[1];
        (Self::zeta(xi) * th12).scale(self.c) + (Self::zeta_bar(xi) * pi12).scale(self.c / (k * k)) - (&xi[2] * &tp).scale(I * self.c / k)
    }

    /// `𝒮(t, x̄, ξ, θ̄, π)` along the chosen route.
    ///
    /// Riccati: `⟨x̄|ξ⟩ + δ̄⁻¹[a|ξ|⟨θ̄|π⟩ − ⱪζ sin γ θ̄₁θ̄₂ − a²ⱪ⁻¹ζ̄ sin γ π₁π₂]`.
    /// Jacobi: the same with `a = ħ/ⱪ` and `π₁π₂` coefficient `−ⱪ⁻¹(2ħⱪ⁻¹ − 1)ζ̄ sin γ`.
    pub fn action(&self, route: ActionRoute, t: &Supernumber, xbar: &[Supernumber], xi: &[Supernumber], theta: &[Supernumber], pi: &[Supernumber]) -> Result<Supernumber> {
        pack(t, xbar, xi, theta, pi)?;
        let k = self.kappa;
        let (a, pp) = match route {
            ActionRoute::Riccati => (self.a, self.a * self.a / k),
            ActionRoute::Jacobi => {
                let a = C64::new(self.hbar, 0.0) / k;
                (a, (2.0 * a - 1.0) / k)
            }
        };
        let norm = Self::norm(xi)?;
        let sin = self.gamma(t, xi)?.sin();
        let inv = self.delta_bar_inverse(t, xi)?;
        let xx: Supernumber = xbar.iter().zip(xi).map(|(x, p)| x * p).sum();
        let tp = &theta[0] * &pi[0] + &theta[1] * &pi[1];
        let bracket = (&norm * &tp).scale(a) - (Self::zeta(xi) * &sin * (&theta[0] * &theta[1])).scale(k) - (Self::zeta_bar(xi) * &sin * (&pi[0] * &pi[1])).scale(pp);
        Ok(xx + inv * bracket)
    }

    /// The Riccati-route action.
    pub fn hj_action(&self, t: &Supernumber, xbar: &[Supernumber], xi: &[Supernumber], theta: &[Supernumber], pi: &[Supernumber]) -> Result<Supernumber> {
        self.action(ActionRoute::Riccati, t, xbar, xi, theta, pi)
    }

    /// The Jacobi-route action.
    pub fn hj_action_jacobi(&self, t: &Supernumber, xbar: &[Supernumber], xi: &[Supernumber], theta: &[Supernumber], pi: &[Supernumber]) -> Result<Supernumber> {
        self.action(ActionRoute::Jacobi, t, xbar, xi, theta, pi)
    }

    fn action_packed(&self, route: ActionRoute) -> impl Fn(&[Supernumber]) -> Result<Supernumber> + '_ {
        move |v: &[Supernumber]| self.action(route, &v[T], &v[X..XI], &v[XI..TH], &v[TH..PI], &v[PI..SLOTS])
    }

    /// `(𝒮_x̄, 𝒮_θ̄)` at a packed point.
    fn action_gradient(&self, route: ActionRoute, v: &[Supernumber]) -> Result<(Vec<Supernumber>, Vec<Supernumber>)> {
        let s = self.action_packed(route);
        let sx = (X..XI).map(|j| even_partial(&s, v, j)).collect::<Result<Vec<_>>>()?;
        let sth = (TH..PI).map(|j| odd_partial(&s, v, j)).collect::<Result<Vec<_>>>()?;
        Ok((sx, sth))
    }

    /// `𝒮_t + ℋ(𝒮_x̄, θ̄, 𝒮_θ̄)`.
    pub fn hj_residual(&self, route: ActionRoute, t: &Supernumber, xbar: &[Supernumber], xi: &[Supernumber], theta: &[Supernumber], pi: &[Supernumber]) -> Result<Supernumber> {
        let v = pack(t, xbar, xi, theta, pi)?;
        let st = even_partial(&self.action_packed(route), &v, T)?;
        let (sx, sth) = self.action_gradient(route, &v)?;
        Ok(st + self.symbol(&sx, &v[TH..PI], &sth))
    }

    /// `𝒟 = a⁻²|ξ|⁻²δ̄(t)²`.
    pub fn van_vleck(&self, t: &Supernumber, xi: &[Supernumber]) -> Result<Supernumber> {
        let norm = Self::norm(xi)?;
        let db = self.delta_bar(t, xi)?;
        Ok((&db * &db * (&norm * &norm).inverse()?).scale(ONE / (self.a * self.a)))
    }

    /// `[[∂x̄∂ξ𝒮, ∂x̄∂π𝒮], [∂θ̄∂ξ𝒮, ∂θ̄∂π𝒮]]`, entry `(r, c)` being `∂_r(∂_c 𝒮)`.
    pub fn action_hessian(&self, route: ActionRoute, t: &Supernumber, xbar: &[Supernumber], xi: &[Supernumber], theta: &[Supernumber], pi: &[Supernumber]) -> Result<Supermatrix> {
        let v = pack(t, xbar, xi, theta, pi)?;
        let s = self.action_packed(route);
        let second = |row: usize, col: usize| -> Result<Supernumber> {
            let inner = |w: &[Supernumber]| if col >= TH { odd_partial(&s, w, col) } else { even_partial(&s, w, col) };
            if row >= TH {
                odd_partial(&inner, &v, row)
            } else {
                even_partial(&inner, &v, row)
            }
        };
        let grid = |rows: std::ops::Range<usize>, cols: std::ops::Range<usize>| -> Result<Vec<Vec<Supernumber>>> {
            rows.map(|r| cols.clone().map(|c| second(r, c)).collect()).collect()
        };
        Supermatrix::from_blocks(&grid(X..XI, XI..TH)?, &grid(X..XI, PI..SLOTS)?, &grid(TH..PI, XI..TH)?, &grid(TH..PI, PI..SLOTS)?)
    }

    /// `𝒟_t + ∂_x̄(𝒟ℋ_ξ) + ∂_θ̄(𝒟ℋ_π)`, with `ℋ_ξ, ℋ_π` taken at `(𝒮_x̄, θ̄, 𝒮_θ̄)`.
    pub fn continuity_residual(&self, route: ActionRoute, t: &Supernumber, xbar: &[Supernumber], xi: &[Supernumber], theta: &[Supernumber], pi: &[Supernumber]) -> Result<Supernumber> {
        let v = pack(t, xbar, xi, theta, pi)?;
        let params = match route {
            ActionRoute::Riccati => *self,
            ActionRoute::Jacobi => self.with_a(C64::new(self.hbar, 0.0) / self.kappa),
        };
        let d = |w: &[Supernumber]| params.van_vleck(&w[T], &w[XI..TH]);
        // ℋ with packed arguments [ξ₁, ξ₂, ξ₃, θ₁, θ₂, π₁, π₂].
        let h = |w: &[Supernumber]| Ok(self.symbol(&w[0..3], &w[3..5], &w[5..7]));
        let flux = |slot: usize| {
            move |w: &[Supernumber]| -> Result<Supernumber> {
                let (sx, sth) = self.action_gradient(route, w)?;
                let mut at = sx;
                at.extend_from_slice(&w[TH..PI]);
                at.extend(sth);
                let dh = if slot >= 5 { odd_partial(&h, &at, slot)? } else { even_partial(&h, &at, slot)? };
                Ok(d(w)? * dh)
            }
        };
        let mut out = even_partial(&d, &v, T)?;
        for j in 0..3 {
            out += &even_partial(&flux(j), &v, X + j)?;
        }
        for l in 0..2 {
            out += &odd_partial(&flux(5 + l), &v, TH + l)?;
        }
        Ok(out)
    }

    /// `∫dπ` reconstruction of the momentum-space propagator acting on `(û₀, û₁)`:
    /// `V(θ) = ⱪ 𝒜 ∫dπ e^{iħ⁻¹(𝒮 − ⟨x|ξ⟩)} (𝓕_o u)(π)` with `𝒜 = δ̄/(a|ξ|)`, read off as `V₀ + V₁θ₁θ₂`.
    pub fn propagate_symbol(&self, t: f64, p: [f64; 3], u0: C64, u1: C64) -> Result<(C64, C64)> {
        let l = 4;
        let xi: Vec<Supernumber> = p.iter().map(|&v| Supernumber::scalar(l, v)).collect();
        let gens = (1..=4).map(|j| Supernumber::generator(l, j)).collect::<Result<Vec<_>>>()?;
        let (theta, pi) = gens.split_at(2);
        let origin = vec![Supernumber::zero(l); 3];
        let tt = Supernumber::scalar(l, t);
        let phase = self.hj_action(&tt, &origin, &xi, theta, pi)?.scale(I / self.hbar).exp();
        let cfg = OddFourierConfig::new(2, self.kappa)?;
        let u = OddPolynomial::from_coeffs(0, 2, [(0, Supernumber::scalar(0, u0)), (0b11, Supernumber::scalar(0, u1))])?;
        let fu = fo(&u, &cfg)?.repr().substitute(pi);
        let amp = self.delta_bar(&tt, &xi)? * Self::norm(&xi)?.inverse()?.scale(self.kappa / self.a);
        let v = berezin_top(&(&phase * &fu), 2, 2) * amp;
        Ok((v.coeff(0), v.coeff(0b11)))
    }

    /// The 2×2 matrix of [`Self::propagate_symbol`], column `j` being the image of the unit vector `e_j`.
    pub fn propagator_from_classical(&self, t: f64, p: [f64; 3]) -> Result<Matrix2<C64>> {
        let (a00, a10) = self.propagate_symbol(t, p, ONE, C64::new(0.0, 0.0))?;
        let (a01, a11) = self.propagate_symbol(t, p, C64::new(0.0, 0.0), ONE)?;
        Ok(Matrix2::new(a00, a01, a10, a11))
    }

    /// The closed form `(1/(a|ξ|))[[δ̄, −iħ⁻¹ⱪa²ζ̄ sin γ], [−iħ⁻¹ⱪζ sin γ, a²ħ⁻²ⱪ²δ]]`.
    /// The upper-right entry carries `a²`: the `π₁π₂` coefficient of the action is `a²`-weighted.
    pub fn classical_matrix_closed_form(&self, t: f64, p: [f64; 3]) -> Result<Matrix2<C64>> {
        let xi: Vec<Supernumber> = p.iter().map(|&v| Supernumber::scalar(0, v)).collect();
        let tt = Supernumber::scalar(0, t);
        let norm = Self::norm(&xi)?.body();
        let s = self.gamma(&tt, &xi)?.sin().body();
        let (db, d) = (self.delta_bar(&tt, &xi)?.body(), self.delta(&tt, &xi)?.body());
        let (zeta, zeta_bar) = (C64::new(p[0], p[1]), C64::new(p[0], -p[1]));
        let r = self.kappa / self.hbar;
        let m = Matrix2::new(db, -I * r * self.a * self.a * zeta_bar * s, -I * r * zeta * s, self.a * self.a * r * r * d);
        Ok(m / (self.a * norm))
    }
}

/// `e^{−iħ⁻¹tĤ(p)} = cos γ·I − i(sin γ/|p|)[[p₃, p₁−ip₂], [p₁+ip₂, −p₃]]` with `γ = cħ⁻¹t|p|`.
/// The ratio `sin γ/|p|` is expanded in a series near `|p| = 0`.
pub fn free_propagator_momentum(t: f64, p: [f64; 3], c: f64, hbar: f64) -> Matrix2<C64> {
    let norm = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
    let rate = c * t / hbar;
    let g = rate * norm;
    let sinc = if g.abs() < 1e-3 {
        let g2 = g * g;
        1.0 - g2 / 6.0 + g2 * g2 / 120.0
    } else {
        g.sin() / g
    };
    let s = C64::new(0.0, -rate * sinc);
    let cg = C64::new(g.cos(), 0.0);
    Matrix2::new(cg + s * p[2], s * C64::new(p[0], -p[1]), s * C64::new(p[0], p[1]), cg - s * p[2])
}

/// The Weyl matrix `Ĥ(p) = c[[p₃, p₁−ip₂], [p₁+ip₂, −p₃]]`.
pub fn weyl_matrix(p: [f64; 3], c: f64) -> Matrix2<C64> {
    Matrix2::new(C64::new(p[2], 0.0), C64::new(p[0], -p[1]), C64::new(p[0], p[1]), C64::new(-p[2], 0.0)) * C64::new(c, 0.0)
}
