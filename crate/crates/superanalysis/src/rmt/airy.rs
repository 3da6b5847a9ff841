//! Airy functions.
//!
//! `airy` is the standard `Ai` with its derivative: Maclaurin series on `|x| ≤ 5`, the
//! Poincaré expansions outside. `airy_oscillatory` is the Fourier-integral normalization
//! `∫ exp(−ix³/3 + iwx) dx = 2π Ai(−w)`, whose second derivative is `−w` times itself.

use std::f64::consts::PI;

use crate::grassmann::C64;
use crate::quadrature::gauss_legendre;

const SERIES_RADIUS: f64 = 5.0;
/// `Ai(0)` and `−Ai'(0)`.
pub const AI0: f64 = 0.355_028_053_887_817_2;
pub const MINUS_AI_PRIME0: f64 = 0.258_819_403_792_806_8;

/// `(Ai(x), Ai'(x))`.
pub fn airy(x: f64) -> (f64, f64) {
    if x.abs() <= SERIES_RADIUS {
        series(x)
    } else if x > 0.0 {
        asymptotic_right(x)
    } else {
        asymptotic_left(-x)
    }
}

fn series(x: f64) -> (f64, f64) {
    // Ai = c₁f − c₂g with f = Σ a_k x^{3k}, g = Σ b_k x^{3k+1}.
    let x3 = x * x * x;
    let (mut a, mut b) = (1.0, x);
    let (mut f, mut g) = (a, b);
    let (mut df, mut dg) = (0.0, 1.0);
    for k in 1..200 {
        let kf = k as f64;
        a *= x3 / ((3.0 * kf - 1.0) * 3.0 * kf);
        b *= x3 / (3.0 * kf * (3.0 * kf + 1.0));
        f += a;
        g += b;
        if x != 0.0 {
            df += 3.0 * kf * a / x;
            dg += (3.0 * kf + 1.0) * b / x;
        }
        if a.abs() + b.abs() < 1e-18 * (f.abs() + g.abs()) && k > 3 {
            break;
        }
    }
    (AI0 * f - MINUS_AI_PRIME0 * g, AI0 * df - MINUS_AI_PRIME0 * dg)
}

/// `u_k` and `v_k` of the asymptotic expansions, truncated where the terms stop shrinking.
fn coefficients(zeta: f64) -> Vec<(f64, f64)> {
    let mut out = vec![(1.0, 1.0)];
    let mut u = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..60 {
        let kf = k as f64;
        u *= (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0) / ((2.0 * kf - 1.0) * 216.0 * kf);
        let v = -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * u;
        let size = u.abs() / zeta.powi(k);
        if size > last || size < 1e-17 {
            break;
        }
        last = size;
        out.push((u, v));
    }
    out
}

fn asymptotic_right(x: f64) -> (f64, f64) {
    let zeta = 2.0 / 3.0 * x.powf(1.5);
    let (mut su, mut sv) = (0.0, 0.0);
    for (k, (u, v)) in coefficients(zeta).into_iter().enumerate() {
        let s = (-1.0f64).powi(k as i32) / zeta.powi(k as i32);
        su += u * s;
        sv += v * s;
    }
    let e = (-zeta).exp() / (2.0 * PI.sqrt());
    (e * su / x.powf(0.25), -e * x.powf(0.25) * sv)
}

fn asymptotic_left(y: f64) -> (f64, f64) {
    let zeta = 2.0 / 3.0 * y.powf(1.5);
    let (mut ue, mut uo, mut ve, mut vo) = (0.0, 0.0, 0.0, 0.0);
    for (k, (u, v)) in coefficients(zeta).into_iter().enumerate() {
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        let s = sign / zeta.powi(k as i32);
        if k % 2 == 0 {
            ue += u * s;
            ve += v * s;
        } else {
            uo += u * s;
            vo += v * s;
        }
    }
    let (sn, cs) = (zeta + PI / 4.0).sin_cos();
    let ai = (sn * ue - cs * uo) / (PI.sqrt() * y.powf(0.25));
    let dai = -y.powf(0.25) / PI.sqrt() * (cs * ve + sn * vo);
    (ai, dai)
}

/// `(A(w), A'(w), A''(w))` for `A(w) = ∫ exp(−ix³/3 + iwx) dx`.
pub fn airy_oscillatory(w: f64) -> (f64, f64, f64) {
    let (ai, dai) = airy(-w);
    let a = 2.0 * PI * ai;
    (a, -2.0 * PI * dai, -w * a)
}

/// `∫ exp(−ix³/3 + iwx) dx` by quadrature along the rays `arg x = −π/6` and `arg x = 7π/6`,
/// where the cubic phase turns into `e^{−r³/3}`.
pub fn airy_oscillatory_quadrature(w: f64) -> C64 {
    let (nodes, weights) = gauss_legendre(40);
    let (panels, r_max) = (40, 8.0 + w.abs().sqrt());
    let h = r_max / panels as f64;
    let rays = [C64::from_polar(1.0, -PI / 6.0), C64::from_polar(-1.0, PI / 6.0)];
    let mut acc = C64::new(0.0, 0.0);
    for p in 0..panels {
        for (t, wt) in nodes.iter().zip(&weights) {
            let r = h * (p as f64 + 0.5 * (t + 1.0));
            for (k, ray) in rays.iter().enumerate() {
                let x = ray * r;
                let phase = C64::new(0.0, -1.0) * x * x * x / 3.0 + C64::new(0.0, w) * x;
                // The left ray runs from −∞ to 0, which flips the orientation back.
                let jac = if k == 0 { *ray } else { -ray };
                acc += jac * phase.exp() * (0.5 * h * wt);
            }
        }
    }
    acc
}
