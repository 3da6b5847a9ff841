//! Gauss–Legendre and Gauss–Hermite rules, tensor products, and a doubling error check.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Nodes and weights on `[-1, 1]`, by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Nodes and weights for `∫ e^{-t²} f(t) dt`, by Newton iteration on orthonormal Hermite functions.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let pim4 = PI.powf(-0.25);
    let mut z: f64 = 0.0;
    for i in 0..n.div_ceil(2) {
        z = match i {
            0 => (2.0 * n as f64 + 1.0).sqrt() - 1.85575 * (2.0 * n as f64 + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * (n as f64).powf(0.426) / z,
            2 => 1.86 * z - 0.86 * x[0],
            3 => 1.91 * z - 0.91 * x[1],
            _ => 2.0 * z - x[i - 2],
        };
        let mut pp = 1.0;
        for _ in 0..200 {
            let (mut p1, mut p2) = (pim4, 0.0);
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                p1 = z * (2.0 / j as f64).sqrt() * p2 - ((j - 1) as f64 / j as f64).sqrt() * p3;
            }
            pp = (2.0 * n as f64).sqrt() * p2;
            let dz = p1 / pp;
            z -= dz;
            if dz.abs() < 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    x.reverse();
    w.reverse();
    (x, w)
}

/// One-dimensional rule for `∫ f`, either on an interval or on the whole line.
#[derive(Clone, Debug, PartialEq)]
pub enum Axis {
    /// Composite Gauss–Legendre on `[a, b]` with `panels` equal panels.
    Interval { a: f64, b: f64, panels: usize },
    /// Gauss–Hermite on ℝ after the substitution `q = centre + scale·t`, reweighted by `e^{t²}`.
    Line { centre: f64, scale: f64 },
}

/// Tensor-product Gauss rule. Every axis uses `nodes` points (per panel on intervals).
#[derive(Clone, Debug, PartialEq)]
pub struct GaussQuadSpec {
    pub axes: Vec<Axis>,
    pub nodes: usize,
    /// Relative disagreement allowed between this rule and its refinement.
    pub tol: f64,
}

impl GaussQuadSpec {
    pub fn interval(a: f64, b: f64, nodes: usize) -> Self {
        GaussQuadSpec { axes: vec![Axis::Interval { a, b, panels: 1 }], nodes, tol: 1e-10 }
    }

    pub fn boxed(bounds: &[(f64, f64)], nodes: usize) -> Self {
        GaussQuadSpec { axes: bounds.iter().map(|&(a, b)| Axis::Interval { a, b, panels: 1 }).collect(), nodes, tol: 1e-10 }
    }

    /// Whole space with Gaussian-adapted scale `1/√(κ)` for weights like `e^{-κq²}`.
    pub fn whole(dim: usize, nodes: usize, scale: f64) -> Self {
        GaussQuadSpec { axes: vec![Axis::Line { centre: 0.0, scale }; dim], nodes, tol: 1e-10 }
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    fn validate(&self) -> Result<()> {
        if self.nodes < 2 {
            return Err(Error::Domain(format!("at least 2 nodes per axis required, got {}", self.nodes)));
        }
        for ax in &self.axes {
            if let Axis::Interval { a, b, panels } = ax {
                if !(a < b) || *panels == 0 {
                    return Err(Error::Domain(format!("bad interval [{a}, {b}] with {panels} panels")));
                }
            }
        }
        Ok(())
    }

    /// Per-axis nodes and weights.
    pub fn rules(&self) -> Result<Vec<(Vec<f64>, Vec<f64>)>> {
        self.validate()?;
        let gl = gauss_legendre(self.nodes);
        let gh = gauss_hermite(self.nodes);
        Ok(self
            .axes
            .iter()
            .map(|ax| match *ax {
                Axis::Interval { a, b, panels } => {
                    let h = (b - a) / panels as f64;
                    let mut xs = Vec::with_capacity(panels * self.nodes);
                    let mut ws = Vec::with_capacity(panels * self.nodes);
                    for p in 0..panels {
                        let lo = a + p as f64 * h;
                        for (t, w) in gl.0.iter().zip(&gl.1) {
                            xs.push(lo + 0.5 * h * (t + 1.0));
                            ws.push(0.5 * h * w);
                        }
                    }
                    (xs, ws)
                }
                Axis::Line { centre, scale } => {
                    let xs = gh.0.iter().map(|t| centre + scale * t).collect();
                    let ws = gh.0.iter().zip(&gh.1).map(|(t, w)| scale * w * (t * t).exp()).collect();
                    (xs, ws)
                }
            })
            .collect())
    }

    /// The rule used for the error estimate: doubled panels, or 1.5× Hermite nodes.
    pub fn refined(&self) -> Self {
        let has_line = self.axes.iter().any(|a| matches!(a, Axis::Line { .. }));
        GaussQuadSpec {
            axes: self
                .axes
                .iter()
                .map(|ax| match *ax {
                    Axis::Interval { a, b, panels } => Axis::Interval { a, b, panels: 2 * panels },
                    ref line => line.clone(),
                })
                .collect(),
            nodes: if has_line { self.nodes + self.nodes / 2 } else { self.nodes },
            tol: self.tol,
        }
    }

    /// Visit every tensor node with its weight.
    pub fn for_each_node(&self, mut f: impl FnMut(&[f64], f64) -> Result<()>) -> Result<()> {
        let rules = self.rules()?;
        let dim = rules.len();
        let mut idx = vec![0usize; dim];
        let mut q = vec![0.0; dim];
        if dim == 0 {
            return f(&q, 1.0);
        }
        loop {
            let mut w = 1.0;
            for k in 0..dim {
                q[k] = rules[k].0[idx[k]];
                w *= rules[k].1[idx[k]];
            }
            f(&q, w)?;
            let mut k = 0;
            loop {
                idx[k] += 1;
                if idx[k] < rules[k].0.len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
                if k == dim {
                    return Ok(());
                }
            }
        }
    }
}

/// `∫ f` with the rule and its refinement; errors when they disagree beyond `tol`.
pub fn integrate_checked<T>(spec: &GaussQuadSpec, eval: impl Fn(&GaussQuadSpec) -> Result<T>, dist: impl Fn(&T, &T) -> (f64, f64)) -> Result<T> {
    let coarse = eval(spec)?;
    let fine = eval(&spec.refined())?;
    let (diff, size) = dist(&coarse, &fine);
    if diff > spec.tol * size.max(1.0) {
        return Err(Error::Quadrature(format!("refinement changed the result by {diff:e}")));
    }
    Ok(fine)
}

/// Plain scalar integral over the quadrature region, with the refinement check.
pub fn integrate_scalar(spec: &GaussQuadSpec, f: impl Fn(&[f64]) -> f64) -> Result<f64> {
    integrate_checked(
        spec,
        |s| {
            let mut acc = 0.0;
            s.for_each_node(|q, w| {
                acc += w * f(q);
                Ok(())
            })?;
            Ok(acc)
        },
        |a, b| ((a - b).abs(), b.abs()),
    )
}
