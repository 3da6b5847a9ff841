use proptest::prelude::*;

use super::*;
use crate::quadrature::gauss_hermite;
use crate::superspace::expr::Expr;

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let m = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / m, ly.iter().sum::<f64>() / m);
    let cov: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let var: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    cov / var
}

/// `(1/N) Σ_{k<N} ψ_k²` scaled to λ: the kernel diagonal summed term by term.
fn density_by_sum(p: &GueParams, lambda: f64) -> f64 {
    let x = p.scaled(lambda);
    let nf = p.n as f64;
    (0..p.n).map(|k| hermite_psi(k, x).powi(2)).sum::<f64>() * nf.sqrt() / (nf * p.j)
}

#[test]
fn hermite_examples() {
    for x in [-1.3, 0.0, 0.4, 2.0] {
        assert_eq!(hermite(0, x), 1.0);
        assert_eq!(hermite(1, x), x);
        assert!((hermite(2, x) - (x * x - 1.0)).abs() < 1e-15);
    }
    assert!((hermite(3, 2.0) - 2.0).abs() < 1e-15);
}

#[test]
fn hermite_matches_rodrigues_formula() {
    // (−1)^ℓ e^{x²/2} ∂^ℓ e^{−x²/2}, differentiated symbolically.
    let mut g = Expr::parse("exp(-q^2/2)").unwrap();
    let weight = Expr::parse("exp(q^2/2)").unwrap();
    for l in 0..8 {
        for x in [-1.7, 0.3, 2.2] {
            let want = (-1f64).powi(l as i32) * (weight.eval_real(&[x]).unwrap() * g.eval_real(&[x]).unwrap()).re;
            assert!((hermite(l, x) - want).abs() < 1e-9 * want.abs().max(1.0), "H_{l}({x})");
        }
        g = g.diff(0);
    }
}

#[test]
fn oscillator_functions_are_orthonormal() {
    let (t, w) = gauss_hermite(30);
    for j in 0..=10 {
        for k in 0..=10 {
            // x = √2 t turns e^{−x²/2} into the Hermite weight e^{−t²}.
            let s: f64 = t
                .iter()
                .zip(&w)
                .map(|(&t, &w)| {
                    let x = 2f64.sqrt() * t;
                    w * hermite_psi(j, x) * hermite_psi(k, x) * (t * t).exp()
                })
                .sum::<f64>()
                * 2f64.sqrt();
            let want = if j == k { 1.0 } else { 0.0 };
            assert!((s - want).abs() < 1e-10, "({j},{k}): {s}");
        }
    }
}

#[test]
fn closed_form_matches_the_kernel_sum() {
    for (n, j) in [(1, 1.0), (2, 0.7), (3, 1.0), (10, 1.3), (57, 1.0)] {
        let p = GueParams::new(n, j).unwrap();
        for lambda in [-3.1, -1.0, 0.0, 0.2, 1.9, 2.05] {
            let (a, b) = (density_exact(&p, lambda * j), density_by_sum(&p, lambda * j));
            assert!((a - b).abs() < 1e-12 * b.max(1.0), "N={n} λ={lambda}: {a} {b}");
        }
    }
}

#[test]
fn single_eigenvalue_is_gaussian() {
    let p = GueParams::new(1, 1.0).unwrap();
    for l in [-2.0, 0.0, 0.8] {
        assert!((density_exact(&p, l) - (-l * l / 2.0f64).exp() / (2.0 * PI).sqrt()).abs() < 1e-15);
    }
}

#[test]
fn density_is_normalized() {
    for n in [5, 50, 200] {
        let mass = density_mass(&GueParams::new(n, 1.0).unwrap()).unwrap();
        assert!((mass - 1.0).abs() < 1e-8, "N={n}: {mass}");
    }
}

#[test]
fn large_n_has_no_overflow() {
    let p = GueParams::new(2000, 1.0).unwrap();
    let v = density_exact(&p, 0.0);
    assert!(v.is_finite() && (v - 1.0 / PI).abs() < 1e-3);
    assert!(density_exact(&p, 2.5) < 1e-100);
}

#[test]
fn semicircle_values() {
    assert!((semicircle(0.0, 1.5) - 1.0 / (PI * 1.5)).abs() < 1e-15);
    assert_eq!(semicircle(3.0, 1.5), 0.0);
    assert_eq!(semicircle(-3.0, 1.5), 0.0);
    let p = GueParams::new(10, 1.0).unwrap();
    assert!(matches!(refined_density(&p, 2.0), Err(Error::Domain(_))));
    assert!(matches!(refined_density(&p, -2.4), Err(Error::Domain(_))));
}

#[test]
fn centre_expansion_residual_decays_like_n_to_the_minus_four() {
    let ns: Vec<f64> = (20..=400).map(|n| n as f64).collect();
    let res: Vec<f64> = (20..=400)
        .map(|n| {
            let p = GueParams::new(n, 1.0).unwrap();
            (density_exact(&p, 0.0) - density_at_zero_expansion(&p)).abs()
        })
        .collect();
    let s = slope(&ns, &res);
    assert!((s + 4.0).abs() < 0.3, "slope {s}");
}

#[test]
fn refined_law_residual_decays_like_n_to_the_minus_two() {
    let j = 1.3;
    let grid: Vec<f64> = (0..=360).map(|k| -1.8 * j + k as f64 * 0.01 * j).collect();
    let ns: Vec<f64> = (40..=400).step_by(20).map(|n| n as f64).collect();
    let sup = |n: usize| {
        let p = GueParams::new(n, j).unwrap();
        grid.iter().map(|&l| (density_exact(&p, l) - refined_density(&p, l).unwrap()).abs()).fold(0.0, f64::max)
    };
    let res: Vec<f64> = ns.iter().map(|&n| sup(n as usize)).collect();
    let s = slope(&ns, &res);
    assert!((s + 2.0).abs() < 0.3, "slope {s}");
    // The oscillating term is what buys the extra order: the plain semicircle is only O(1/N).
    let plain: Vec<f64> = ns
        .iter()
        .map(|&n| {
            let p = GueParams::new(n as usize, j).unwrap();
            grid.iter().map(|&l| (density_exact(&p, l) - semicircle(l, j)).abs()).fold(0.0, f64::max)
        })
        .collect();
    assert!((slope(&ns, &plain) + 1.0).abs() < 0.3);
}

#[test]
fn outside_the_bulk_the_density_decays_exponentially() {
    let p = |n| GueParams::new(n, 1.0).unwrap();
    let logs: Vec<f64> = (1..=10).map(|k| density_exact(&p(20 * k), 2.5).ln()).collect();
    let steps: Vec<f64> = logs.windows(2).map(|w| w[1] - w[0]).collect();
    assert!(steps.iter().all(|&d| d < -1.0));
    // Constant rate per 20 added rows, up to the algebraic prefactor.
    let spread = steps.iter().fold(f64::NEG_INFINITY, |a: f64, &b| a.max(b)) - steps.iter().fold(f64::INFINITY, |a: f64, &b| a.min(b));
    assert!(spread < 0.1 * steps[0].abs(), "{steps:?}");
}

#[test]
fn edge_scaling_matches_the_airy_profile() {
    let p = GueParams::new(400, 1.0).unwrap();
    let e = edge_density(&p, 0.0);
    assert!((e.scaled_exact / e.airy_limit - 1.0).abs() < 0.05, "{e:?}");
    // f(0) = Ai'(0)²/J in the standard normalization.
    assert!((e.airy_limit - airy::MINUS_AI_PRIME0.powi(2)).abs() < 1e-14);
    for z in [-1.0, -0.5, 0.5, 1.0] {
        let errs: Vec<f64> = [50, 100, 200, 400]
            .iter()
            .map(|&n| {
                let e = edge_density(&GueParams::new(n, 1.0).unwrap(), z);
                (e.scaled_exact - e.airy_limit).abs()
            })
            .collect();
        assert!(errs.windows(2).all(|w| w[1] < w[0]), "z={z}: {errs:?}");
        assert!(errs[3] < 0.05 * edge_profile(1.0, z));
    }
    let pj = GueParams::new(300, 0.6).unwrap();
    let e = edge_density(&pj, 0.4);
    assert!((e.scaled_exact / e.airy_limit - 1.0).abs() < 0.05);
}

#[test]
fn edge_values_agree_at_both_ends() {
    for n in [30, 301] {
        let p = GueParams::new(n, 1.2).unwrap();
        for z in [-1.0, 0.0, 0.7] {
            let off = z * (n as f64).powf(-2.0 / 3.0);
            assert_eq!(density_exact(&p, 2.4 - off), density_exact(&p, -2.4 + off));
        }
    }
}

#[test]
fn double_integral_reproduces_the_closed_form() {
    for (n, j, lambda, tol) in [(5, 1.0, 0.0, 1e-6), (10, 1.0, 1.0, 1e-5), (7, 0.8, -0.9, 1e-6), (5, 1.0, 3.0, 1e-8)] {
        let p = GueParams::new(n, j).unwrap();
        let got = brezin_cross_check(&p, lambda, &brezin_quad(&p)).unwrap();
        let want = density_exact(&p, lambda);
        assert!((got - want).abs() < tol, "N={n} λ={lambda}: {got} vs {want}");
    }
    let p = GueParams::new(5, 1.0).unwrap();
    assert!(density_exact(&p, 3.0) < 1e-4);
    assert!(matches!(brezin_cross_check(&p, 0.0, &GaussQuadSpec::interval(0.0, 1.0, 10)), Err(Error::ShapeMismatch(_))));
    let coarse = GaussQuadSpec::boxed(&[(0.0, 8.0), (-8.0, 8.0)], 4);
    assert!(matches!(brezin_cross_check(&GueParams::new(30, 1.0).unwrap(), 1.0, &coarse), Err(Error::Quadrature(_))));
}

#[test]
fn sampled_spectrum_passes_kolmogorov_smirnov() {
    let p = GueParams::new(50, 1.0).unwrap();
    let s = gue_sample(&p, 2000, 80, 20240611).unwrap();
    assert_eq!(s.eigenvalues.len(), 100_000);
    let d = ks_distance(&s.eigenvalues, &p);
    assert!(d < ks_critical_1pct(s.eigenvalues.len()), "KS {d}");
    assert_eq!(s.histogram.counts.iter().sum::<u64>(), 100_000);
}

#[test]
fn sampling_is_deterministic() {
    let p = GueParams::new(8, 1.0).unwrap();
    let a = gue_sample(&p, 50, 20, 7).unwrap();
    let b = gue_sample(&p, 50, 20, 7).unwrap();
    assert_eq!(a, b);
    assert_ne!(a.eigenvalues, gue_sample(&p, 50, 20, 8).unwrap().eigenvalues);
}

#[test]
fn second_moment_of_small_matrices() {
    // E tr H² = N·J²/N + N(N−1)·J²/N = N J².
    let (n, j) = (2, 0.9);
    let p = GueParams::new(n, j).unwrap();
    let s = gue_sample(&p, 20000, 10, 3).unwrap();
    let m2 = s.eigenvalues.iter().map(|e| e * e).sum::<f64>() / s.eigenvalues.len() as f64;
    // Var(tr H²)/N² per matrix is 2J⁴/N² for N = 2.
    let sigma = (2.0 * j.powi(4) / (n * n) as f64 / 20000.0).sqrt();
    assert!((m2 - j * j).abs() < 4.0 * sigma, "{m2}");
    let exact: f64 = {
        let spec = GaussQuadSpec { axes: vec![crate::quadrature::Axis::Interval { a: -8.0, b: 8.0, panels: 16 }], nodes: 20, tol: 1e-10 };
        integrate_scalar(&spec, |q| q[0] * q[0] * density_exact(&p, q[0])).unwrap()
    };
    assert!((exact - j * j).abs() < 1e-9);
}

#[test]
fn bad_parameters() {
    assert!(GueParams::new(0, 1.0).is_err());
    assert!(GueParams::new(3, 0.0).is_err());
    assert!(GueParams::new(3, f64::NAN).is_err());
    assert!(gue_sample(&GueParams::new(3, 1.0).unwrap(), 0, 4, 1).is_err());
}

proptest! {
    #[test]
    fn density_is_even_and_nonnegative(n in 1usize..120, j in 0.2f64..3.0, l in -4.0f64..4.0) {
        let p = GueParams::new(n, j).unwrap();
        let (a, b) = (density_exact(&p, l * j), density_exact(&p, -l * j));
        prop_assert!(a >= 0.0);
        prop_assert!((a - b).abs() <= 1e-14 * a.max(1.0));
    }
}
