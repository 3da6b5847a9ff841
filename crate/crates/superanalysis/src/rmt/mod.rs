//! Finite-N GUE eigenvalue densities.
//!
//! The ensemble is `P(H) ∝ exp(−N tr H²/(2J²))` on N×N Hermitian matrices. The averaged
//! density has the closed form
//! `⟨ρ_N(λ)⟩ = J⁻¹[√N ψ_{N−1}(x)² − √(N−1) ψ_N(x) ψ_{N−2}(x)]`, `x = √N λ/J`,
//! in terms of the oscillator functions `ψ_ℓ = H_ℓ e^{−x²/4}/√(ℓ!√(2π))` built from the
//! probabilists' Hermite polynomials. Everything is evaluated through the normalized
//! three-term recursion with a running exponent, so N in the thousands is fine.

pub mod airy;

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grassmann::C64;
use crate::quadrature::{integrate_checked, integrate_scalar, GaussQuadSpec};

pub use airy::{airy, airy_oscillatory, airy_oscillatory_quadrature};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GueParams {
    pub n: usize,
    pub j: f64,
}

impl GueParams {
    pub fn new(n: usize, j: f64) -> Result<Self> {
        if n == 0 || !(j > 0.0 && j.is_finite()) {
            return Err(Error::Domain(format!("need N ≥ 1 and J > 0, got N = {n}, J = {j}")));
        }
        Ok(GueParams { n, j })
    }

    fn scaled(&self, lambda: f64) -> f64 {
        (self.n as f64).sqrt() * lambda / self.j
    }
}

/// Probabilists' Hermite polynomial `H_ℓ(x)`.
pub fn hermite(l: usize, x: f64) -> f64 {
    let (mut prev, mut cur) = (0.0, 1.0);
    for k in 0..l {
        (prev, cur) = (cur, x * cur - k as f64 * prev);
    }
    cur
}

/// `ψ_0(x), …, ψ_n(x)` as mantissas times a shared `e^{exponent}`.
fn oscillator_tail(n: usize, x: f64) -> ([f64; 3], f64) {
    const BIG: f64 = 1e150;
    let mut exponent = -x * x / 4.0 - 0.25 * (2.0 * PI).ln();
    let (mut prev, mut cur) = (0.0, 1.0);
    let mut last = [0.0; 3];
    for k in 0..=n {
        last = [last[1], last[2], cur];
        if k == n {
            break;
        }
        let next = (x * cur - (k as f64).sqrt() * prev) / ((k + 1) as f64).sqrt();
        (prev, cur) = (cur, next);
        if cur.abs() > BIG {
            prev /= BIG;
            cur /= BIG;
            last.iter_mut().for_each(|v| *v /= BIG);
            exponent += BIG.ln();
        }
    }
    (last, exponent)
}

/// Orthonormal oscillator function `ψ_ℓ(x)`.
pub fn hermite_psi(l: usize, x: f64) -> f64 {
    let (tail, e) = oscillator_tail(l, x);
    scaled(tail[2], e)
}

/// `m·e^{e}` without overflowing the mantissa or underflowing the exponential separately.
fn scaled(m: f64, e: f64) -> f64 {
    if m == 0.0 {
        0.0
    } else {
        m.signum() * (m.abs().ln() + e).exp()
    }
}

/// Exact `⟨ρ_N(λ)⟩`.
pub fn density_exact(p: &GueParams, lambda: f64) -> f64 {
    let x = p.scaled(lambda);
    let n = p.n;
    if n == 1 {
        return hermite_psi(0, x).powi(2) / p.j;
    }
    let ([psi_nm2, psi_nm1, psi_n], e) = oscillator_tail(n, x);
    let nf = n as f64;
    let m = nf.sqrt() * psi_nm1 * psi_nm1 - (nf - 1.0).sqrt() * psi_n * psi_nm2;
    scaled(m.max(0.0), 2.0 * e) / p.j
}

/// Wigner's semicircle `w_sc(λ)`.
pub fn semicircle(lambda: f64, j: f64) -> f64 {
    let d = 4.0 * j * j - lambda * lambda;
    if d <= 0.0 {
        0.0
    } else {
        d.sqrt() / (2.0 * PI * j * j)
    }
}

/// Semicircle plus the oscillating `1/N` correction, valid inside the bulk.
pub fn refined_density(p: &GueParams, lambda: f64) -> Result<f64> {
    let j = p.j;
    let d = 4.0 * j * j - lambda * lambda;
    if d <= 0.0 {
        return Err(Error::Domain(format!("λ = {lambda} is outside the bulk (−2J, 2J)")));
    }
    let nf = p.n as f64;
    let sign = if p.n.is_multiple_of(2) { 1.0 } else { -1.0 };
    let phase = nf * (lambda * d.sqrt() / (2.0 * j * j) + 2.0 * (lambda / (2.0 * j)).asin());
    Ok(semicircle(lambda, j) - sign * j / (PI * d) * phase.cos() / nf)
}

/// Four-term large-N expansion of `⟨ρ_N(0)⟩`.
pub fn density_at_zero_expansion(p: &GueParams) -> f64 {
    let nf = p.n as f64;
    let s = if p.n.is_multiple_of(2) { 1.0 } else { -1.0 };
    (1.0 - s / (4.0 * nf) + 1.0 / (32.0 * nf * nf) + s * 5.0 / (128.0 * nf.powi(3))) / (PI * p.j)
}

/// Airy edge profile `f(w) = (A'(w)² − A''(w)A(w))/(4π²J)` with `A` the oscillatory Airy integral.
pub fn edge_profile(j: f64, w: f64) -> f64 {
    let (a, da, dda) = airy_oscillatory(w);
    (da * da - dda * a) / (4.0 * PI * PI * j)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EdgePoint {
    pub z: f64,
    /// `N^{1/3}⟨ρ_N(2J − zN^{−2/3})⟩`.
    pub scaled_exact: f64,
    /// `f(z/J)`.
    pub airy_limit: f64,
}

pub fn edge_density(p: &GueParams, z: f64) -> EdgePoint {
    let nf = p.n as f64;
    let lambda = 2.0 * p.j - z * nf.powf(-2.0 / 3.0);
    EdgePoint { z, scaled_exact: nf.cbrt() * density_exact(p, lambda), airy_limit: edge_profile(p.j, z / p.j) }
}

/// Default `(s, τ)` box for [`brezin_cross_check`].
pub fn brezin_quad(p: &GueParams) -> GaussQuadSpec {
    let r = 8.0 * p.j;
    let mut spec = GaussQuadSpec::boxed(&[(0.0, r), (-r, r)], 20);
    for ax in &mut spec.axes {
        if let crate::quadrature::Axis::Interval { panels, .. } = ax {
            *panels = 12;
        }
    }
    spec.tol = 1e-9;
    spec
}

/// `⟨ρ_N(λ)⟩` from the double integral over `(s, τ) ∈ ℝ₊ × ℝ` for the resolvent trace
/// `⟨tr((λ − i0) − H)⁻¹⟩`, whose imaginary part is `πN⟨ρ_N(λ)⟩`.
pub fn brezin_cross_check(p: &GueParams, lambda: f64, quad: &GaussQuadSpec) -> Result<f64> {
    if quad.dim() != 2 {
        return Err(Error::ShapeMismatch(format!("the Brézin integral is two-dimensional, quadrature has {} axes", quad.dim())));
    }
    let (n, j2) = (p.n as i32, p.j * p.j);
    let nf = p.n as f64;
    let log_front = -ln_factorial(p.n - 1) + 0.5 * (nf / (2.0 * PI * j2)).ln() + (nf + 1.0) * (nf / j2).ln();
    let il = C64::new(0.0, lambda);
    let eval = |spec: &GaussQuadSpec| -> Result<C64> {
        let mut acc = C64::new(0.0, 0.0);
        spec.for_each_node(|q, w| {
            let (s, tau) = (q[0], q[1]);
            if s > 0.0 {
                let phase = C64::new(nf * s.ln() + log_front - nf * (s * s + tau * tau) / (2.0 * j2), -nf * lambda * s / j2);
                let z = tau + il;
                acc += w * phase.exp() * z.powi(n - 1) * (z + s);
            }
            Ok(())
        })?;
        Ok(C64::new(0.0, 1.0) * acc)
    };
    let g = integrate_checked(quad, eval, |a, b| ((a - b).norm(), b.norm()))?;
    Ok(g.im / (PI * nf))
}

fn ln_factorial(k: usize) -> f64 {
    (2..=k).map(|i| (i as f64).ln()).sum()
}

/// Histogram of sampled eigenvalues over fixed equal bins.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GueSample {
    pub params: GueParams,
    pub seed: u64,
    /// All eigenvalues, sorted.
    pub eigenvalues: Vec<f64>,
    pub histogram: Histogram,
}

/// One GUE matrix: diagonal `N(0, J²/N)`, off-diagonal real and imaginary parts `N(0, J²/(2N))`.
pub fn gue_matrix(p: &GueParams, rng: &mut ChaCha8Rng) -> DMatrix<C64> {
    let nf = p.n as f64;
    let diag = Normal::new(0.0, p.j / nf.sqrt()).expect("positive variance");
    let off = Normal::new(0.0, p.j / (2.0 * nf).sqrt()).expect("positive variance");
    let mut h = DMatrix::from_element(p.n, p.n, C64::new(0.0, 0.0));
    for a in 0..p.n {
        h[(a, a)] = C64::new(diag.sample(rng), 0.0);
        for b in a + 1..p.n {
            let z = C64::new(off.sample(rng), off.sample(rng));
            h[(a, b)] = z;
            h[(b, a)] = z.conj();
        }
    }
    h
}

/// Sample `samples` matrices, one ChaCha stream per matrix, and bin their eigenvalues on
/// `[−(2J + margin), 2J + margin]`. Deterministic in `seed` regardless of thread count.
pub fn gue_sample(p: &GueParams, samples: usize, bins: usize, seed: u64) -> Result<GueSample> {
    if samples == 0 || bins == 0 {
        return Err(Error::Domain("need at least one sample and one bin".into()));
    }
    let per_matrix: Vec<Vec<f64>> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let h = gue_matrix(p, &mut rng);
            h.symmetric_eigenvalues().iter().copied().collect()
        })
        .collect();
    let mut eigenvalues: Vec<f64> = per_matrix.into_iter().flatten().collect();
    eigenvalues.sort_by(f64::total_cmp);
    let half = 2.0 * p.j + 6.0 * p.j / (p.n as f64).powf(2.0 / 3.0);
    let width = 2.0 * half / bins as f64;
    let edges = (0..=bins).map(|k| -half + k as f64 * width).collect();
    let mut counts = vec![0u64; bins];
    for &e in &eigenvalues {
        let k = ((e + half) / width).floor();
        if k >= 0.0 && (k as usize) < bins {
            counts[k as usize] += 1;
        }
    }
    Ok(GueSample { params: *p, seed, eigenvalues, histogram: Histogram { edges, counts } })
}

/// Half-width of an interval that carries all but a negligible part of `⟨ρ_N⟩`.
pub fn support_radius(p: &GueParams) -> f64 {
    p.j * (2.0 + 12.0 / (p.n as f64).sqrt())
}

/// `∫ ⟨ρ_N⟩` over `[−R, R]` with `R` from [`support_radius`].
pub fn density_mass(p: &GueParams) -> Result<f64> {
    let r = support_radius(p);
    let mut spec = GaussQuadSpec::interval(-r, r, 40);
    if let crate::quadrature::Axis::Interval { panels, .. } = &mut spec.axes[0] {
        *panels = (p.n / 4).max(8);
    }
    spec.tol = 1e-11;
    integrate_scalar(&spec, |q| density_exact(p, q[0]))
}

/// `∫_{−∞}^{λ_k} ⟨ρ_N⟩` at sorted points, accumulated panel by panel with Gauss–Legendre.
pub fn density_cdf(p: &GueParams, points: &[f64]) -> Vec<f64> {
    let r = support_radius(p);
    let (nodes, weights) = crate::quadrature::gauss_legendre(12);
    let panel = |a: f64, b: f64| -> f64 {
        let h = 0.5 * (b - a);
        nodes.iter().zip(&weights).map(|(t, w)| h * w * density_exact(p, a + h * (t + 1.0))).sum()
    };
    let step = p.j / (4.0 * p.n as f64);
    let mut out = Vec::with_capacity(points.len());
    let (mut at, mut acc) = (-r, 0.0);
    for &x in points {
        let x = x.clamp(-r, r);
        while at + step < x {
            acc += panel(at, at + step);
            at += step;
        }
        out.push(acc + if x > at { panel(at, x) } else { 0.0 });
    }
    out
}

/// Kolmogorov–Smirnov distance between sorted samples and the exact CDF.
pub fn ks_distance(sorted: &[f64], p: &GueParams) -> f64 {
    let cdf = density_cdf(p, sorted);
    let m = sorted.len() as f64;
    cdf.iter().enumerate().map(|(i, &f)| (f - i as f64 / m).abs().max(((i + 1) as f64 / m - f).abs())).fold(0.0, f64::max)
}

/// Asymptotic 1% critical value of the KS statistic for `m` samples.
pub fn ks_critical_1pct(m: usize) -> f64 {
    1.6276 / (m as f64).sqrt()
}

#[cfg(test)]
mod tests;
