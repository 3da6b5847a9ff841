//! Qi's weakly hyperbolic equation `v_tt = t²v_qq + (4k+1)v_q`, `v(0) = φ`, `v_t(0) = 0`.
//!
//! The super-characteristic construction gives
//! `v(t,q) = Σ_{ℓ≤k} 2^{2ℓ}k!/((2ℓ)!(k−ℓ)!) t^{2ℓ} φ^{(ℓ)}(q + t²/2)`.
//! In Fourier variables the same polynomial
//! `Φ(t; ξ) = Σ_ℓ 4^ℓ k!/((2ℓ)!(k−ℓ)!) (iξ)^ℓ t^{2ℓ}` solves `Φ̈ + 2itξΦ̇ − 4ikξΦ = 0`, and the odd
//! coefficients of the action follow from it: `X = −iΦ̇/Φ`, `Y = e^{−it²ξ/2}/Φ`, `Z = −i∫Y²`,
//! `W = 0`. Two oracles sit beside the formula: a leapfrog finite-difference solver and an RK4
//! integration of the first-order system for `(v, w = v_t − tv_q)` mode by mode.

use crate::error::{Error, Result};
use crate::grassmann::{Analytic, C64, I};
use crate::quadrature::gauss_legendre;
use crate::superspace::expr::Expr;

/// `2^{2ℓ}k!/((2ℓ)!(k−ℓ)!)` for `ℓ = 0..=k`.
pub fn qi_coefficients(k: u32) -> Vec<f64> {
    let fact = |n: u32| (1..=n).map(f64::from).product::<f64>();
    (0..=k).map(|l| 4f64.powi(l as i32) * fact(k) / (fact(2 * l) * fact(k - l))).collect()
}

/// Values of the formula on a grid, with the coefficient table that produced them.
#[derive(Clone, Debug, PartialEq)]
pub struct QiSolution {
    pub k: u32,
    pub t: f64,
    pub q: Vec<f64>,
    pub v: Vec<C64>,
    pub coefficients: Vec<f64>,
}

/// `v(t, q)` on `q_grid`, with `φ^{(ℓ)}` supplied by the oracle.
pub fn qi_solve(k: u32, phi: &Analytic, t: f64, q_grid: &[f64]) -> Result<QiSolution> {
    let coefficients = qi_coefficients(k);
    let shift = t * t / 2.0;
    let mut v = Vec::with_capacity(q_grid.len());
    for &q in q_grid {
        let d = phi.derivatives(C64::new(q + shift, 0.0), k as usize)?;
        if d.len() < k as usize + 1 {
            return Err(Error::InsufficientOracle { needed: k as usize, available: d.len().saturating_sub(1) });
        }
        v.push(coefficients.iter().enumerate().map(|(l, c)| d[l] * (c * t.powi(2 * l as i32))).sum());
    }
    Ok(QiSolution { k, t, q: q_grid.to_vec(), v, coefficients })
}

/// The formula as an expression in `(t, q)`, for `φ` an expression in one variable.
pub fn qi_expr(k: u32, phi: &Expr) -> Expr {
    let t = Expr::var(0);
    let arg = Expr::var(1) + t.clone() * t.clone() / Expr::c(2.0);
    let mut deriv = phi.clone();
    let mut out = Expr::c(0.0);
    for (l, c) in qi_coefficients(k).into_iter().enumerate() {
        out = out + Expr::c(c) * t.clone().powi(2 * l as i32) * deriv.substitute(std::slice::from_ref(&arg));
        deriv = deriv.diff(0);
    }
    out
}

/// Derivative oracle for a one-variable expression, differentiated symbolically on demand.
pub fn analytic_from_expr(phi: &Expr) -> Analytic {
    let phi = phi.clone();
    Analytic::custom(move |z, n| {
        let mut out = Vec::with_capacity(n + 1);
        let mut d = phi.clone();
        for _ in 0..=n {
            out.push(d.eval_c(&[z])?);
            d = d.diff(0);
        }
        Ok(out)
    })
}

/// `(Φ, Φ̇, Φ̈)` at `(t, ξ)`.
pub fn qi_phi(k: u32, xi: C64, t: C64) -> (C64, C64, C64) {
    let mut phi = C64::new(0.0, 0.0);
    let mut dphi = phi;
    let mut ddphi = phi;
    for (l, c) in qi_coefficients(k).into_iter().enumerate() {
        let a = (I * xi).powi(l as i32) * c;
        let e = 2 * l as i32;
        phi += a * t.powi(e);
        if e >= 1 {
            dphi += a * (e as f64) * t.powi(e - 1);
        }
        if e >= 2 {
            ddphi += a * (e * (e - 1)) as f64 * t.powi(e - 2);
        }
    }
    (phi, dphi, ddphi)
}

/// `Ẋ − (4kξ − 2itξX − iX²)` for `X = −iΦ̇/Φ`, with `Ẋ` from the exact polynomial derivatives.
pub fn qi_riccati_residual(k: u32, xi: f64, t: f64) -> C64 {
    let (p, dp, ddp) = qi_phi(k, C64::new(xi, 0.0), C64::new(t, 0.0));
    let x = -I * dp / p;
    let xdot = -I * (ddp * p - dp * dp) / (p * p);
    xdot - (4.0 * k as f64 * xi - 2.0 * I * t * xi * x - I * x * x)
}

/// Coefficients `(X, Y, Z, W)` of the action at `(t, ξ)`; `Z` by Gauss–Legendre.
pub fn qi_components(k: u32, xi: f64, t: f64) -> [C64; 4] {
    let xi_c = C64::new(xi, 0.0);
    let y_at = |s: f64| (-I * s * s * xi / 2.0).exp() / qi_phi(k, xi_c, C64::new(s, 0.0)).0;
    let (p, dp, _) = qi_phi(k, xi_c, C64::new(t, 0.0));
    let (nodes, weights) = gauss_legendre(40);
    let z: C64 = nodes.iter().zip(&weights).map(|(u, w)| {
        let s = 0.5 * t * (u + 1.0);
        let y = y_at(s);
        y * y * (0.5 * t * w)
    }).sum();
    [-I * dp / p, y_at(t), -I * z, C64::new(0.0, 0.0)]
}

/// Leapfrog for `v_tt = t²v_qq + (4k+1)v_q` on `nq` points of `[q_min, q_max]` with `nt` steps,
/// boundary values frozen. The first step uses the Taylor start `v¹ = v⁰ + ½dt²(4k+1)v⁰_q`.
pub fn qi_fd(k: u32, phi: &dyn Fn(f64) -> f64, t_end: f64, q_min: f64, q_max: f64, nq: usize, nt: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if nq < 3 || nt == 0 || !(q_max > q_min) || !(t_end > 0.0) {
        return Err(Error::Domain(format!("bad grid: {nq} points on [{q_min}, {q_max}], {nt} steps to {t_end}")));
    }
    let dq = (q_max - q_min) / (nq - 1) as f64;
    let dt = t_end / nt as f64;
    let b = (4 * k + 1) as f64;
    let q: Vec<f64> = (0..nq).map(|i| q_min + i as f64 * dq).collect();
    let apply = |v: &[f64], t: f64, out: &mut [f64]| {
        for i in 1..nq - 1 {
            out[i] = t * t * (v[i + 1] - 2.0 * v[i] + v[i - 1]) / (dq * dq) + b * (v[i + 1] - v[i - 1]) / (2.0 * dq);
        }
    };
    let mut prev: Vec<f64> = q.iter().map(|&x| phi(x)).collect();
    let mut acc = vec![0.0; nq];
    apply(&prev, 0.0, &mut acc);
    let mut cur: Vec<f64> = (0..nq).map(|i| prev[i] + 0.5 * dt * dt * acc[i]).collect();
    for n in 1..nt {
        apply(&cur, n as f64 * dt, &mut acc);
        let next: Vec<f64> = (0..nq).map(|i| if i == 0 || i == nq - 1 { cur[i] } else { 2.0 * cur[i] - prev[i] + dt * dt * acc[i] }).collect();
        prev = std::mem::replace(&mut cur, next);
    }
    Ok((q, cur))
}

/// RK4 for the Fourier mode of `v_t = tv_q + w`, `w_t = 4kv_q − tw_q` (so `∂_q → ip`),
/// from `(v̂, ŵ)(0) = (1, 0)`.
pub fn qi_system_mode(k: u32, p: f64, t_end: f64, steps: usize) -> (C64, C64) {
    let ip = I * p;
    let rhs = |t: f64, v: C64, w: C64| (t * ip * v + w, 4.0 * k as f64 * ip * v - t * ip * w);
    let h = t_end / steps as f64;
    let (mut v, mut w) = (C64::new(1.0, 0.0), C64::new(0.0, 0.0));
    for j in 0..steps {
        let t = j as f64 * h;
        let (a1, b1) = rhs(t, v, w);
        let (a2, b2) = rhs(t + h / 2.0, v + a1 * (h / 2.0), w + b1 * (h / 2.0));
        let (a3, b3) = rhs(t + h / 2.0, v + a2 * (h / 2.0), w + b2 * (h / 2.0));
        let (a4, b4) = rhs(t + h, v + a3 * h, w + b3 * h);
        v += (a1 + a2 * 2.0 + a3 * 2.0 + a4) * (h / 6.0);
        w += (b1 + b2 * 2.0 + b3 * 2.0 + b4) * (h / 6.0);
    }
    (v, w)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian() -> Expr {
        Expr::parse("exp(-q^2)").unwrap()
    }

    #[test]
    fn coefficient_table() {
        assert_eq!(qi_coefficients(0), vec![1.0]);
        assert_eq!(qi_coefficients(1), vec![1.0, 2.0]);
        let c2 = qi_coefficients(2);
        // ℓ=1: 4·2/(2·1) = 4; ℓ=2: 16·2/(24·1) = 4/3.
        assert_eq!(c2[..2], [1.0, 4.0]);
        assert!((c2[2] - 4.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn k0_is_a_shift_and_k1_matches_the_two_term_formula() {
        let phi = gaussian();
        let oracle = analytic_from_expr(&phi);
        let grid = [-1.3, -0.2, 0.0, 0.7];
        let t = 0.9;
        let s0 = qi_solve(0, &oracle, t, &grid).unwrap();
        let s1 = qi_solve(1, &oracle, t, &grid).unwrap();
        for (i, &q) in grid.iter().enumerate() {
            let y = q + t * t / 2.0;
            let f = (-y * y).exp();
            assert!((s0.v[i].re - f).abs() < 1e-15);
            assert!((s1.v[i].re - (f + 2.0 * t * t * (-2.0 * y) * f)).abs() < 1e-14);
        }
    }

    #[test]
    fn formula_solves_the_pde_symbolically() {
        let phi = Expr::parse("exp(-q^2)*cos(q)").unwrap();
        for k in 0..=3 {
            let v = qi_expr(k, &phi);
            let vt = v.diff(0);
            let residual = vt.diff(0) - Expr::var(0).powi(2) * v.diff(1).diff(1) - Expr::c((4 * k + 1) as f64) * v.diff(1);
            for &(t, q) in &[(0.3, -0.4), (0.8, 0.1), (1.2, 1.5), (0.0, 0.3)] {
                let r = residual.eval_real(&[t, q]).unwrap();
                assert!(r.norm() < 1e-10, "k={k} t={t} q={q}: {r}");
                assert!(vt.eval_real(&[0.0, q]).unwrap().norm() < 1e-14);
            }
        }
    }

    #[test]
    fn short_oracle_is_reported() {
        let short = Analytic::custom(|z, _| Ok(vec![z]));
        assert!(matches!(qi_solve(2, &short, 0.5, &[0.0]), Err(Error::InsufficientOracle { .. })));
    }

    #[test]
    fn riccati_residual_vanishes() {
        for k in 0..=3 {
            for &(xi, t) in &[(0.7, 0.4), (-1.3, 1.1), (2.0, 0.9), (0.2, 1.7)] {
                let r = qi_riccati_residual(k, xi, t);
                assert!(r.norm() < 1e-10, "k={k}: {r}");
            }
        }
    }

    #[test]
    fn phi_solves_its_second_order_equation() {
        for k in 0..=3 {
            let xi = C64::new(0.6, 0.0);
            let t = C64::new(0.8, 0.0);
            let (p, dp, ddp) = qi_phi(k, xi, t);
            let r = ddp + 2.0 * I * t * xi * dp - 4.0 * I * k as f64 * xi * p;
            assert!(r.norm() < 1e-12);
        }
    }

    #[test]
    fn y_and_w_satisfy_their_transport_equations() {
        // Y_t + itξY + iXY = 0 checked by central differences of the closed form.
        let (k, xi, t, h) = (2, 0.8, 0.7, 1e-5);
        let [x, y, _, w] = qi_components(k, xi, t);
        let yp = qi_components(k, xi, t + h)[1];
        let ym = qi_components(k, xi, t - h)[1];
        let r = (yp - ym) / (2.0 * h) + I * t * xi * y + I * x * y;
        assert!(r.norm() < 1e-8, "{r}");
        assert_eq!(w, C64::new(0.0, 0.0));
        // Z_t = −iY².
        let zp = qi_components(k, xi, t + h)[2];
        let zm = qi_components(k, xi, t - h)[2];
        assert!(((zp - zm) / (2.0 * h) + I * y * y).norm() < 1e-8);
    }

    #[test]
    fn first_order_system_matches_the_closed_form_per_mode() {
        for k in 1..=2 {
            for &p in &[-3.0, -0.5, 0.4, 2.5] {
                let t = 1.0;
                let (v, w) = qi_system_mode(k, p, t, 2000);
                let (phi, dphi, _) = qi_phi(k, C64::new(p, 0.0), C64::new(t, 0.0));
                let e = (I * t * t * p / 2.0).exp();
                assert!((v - e * phi).norm() < 1e-9, "k={k} p={p}");
                assert!((w - e * dphi).norm() < 1e-9, "k={k} p={p}");
            }
        }
    }

    #[test]
    fn finite_differences_agree_with_the_formula() {
        let phi = gaussian();
        let oracle = analytic_from_expr(&phi);
        for k in 1..=2 {
            let (q, v_fd) = qi_fd(k, &|x| (-x * x).exp(), 1.0, -8.0, 8.0, 2000, 1000).unwrap();
            let exact = qi_solve(k, &oracle, 1.0, &q).unwrap();
            let num: f64 = exact.v.iter().zip(&v_fd).map(|(a, b)| (a.re - b).powi(2)).sum();
            let den: f64 = exact.v.iter().map(|a| a.re * a.re).sum();
            let rel = (num / den).sqrt();
            assert!(rel < 1e-2, "k={k}: relative L² error {rel}");
        }
    }
}
