use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::error::Error;
use crate::grassmann::{Supernumber, C64, I, ONE};
use crate::quadrature::gauss_legendre;
use crate::superspace::expr::Expr;
use crate::weyl_dynamics::{FlowConfig, FlowState};

fn poly(c: &[f64]) -> Poly {
    Poly::new(c.to_vec())
}

fn op(terms: &[(usize, &[f64])]) -> DiffOp1D {
    terms.iter().fold(DiffOp1D::zero(), |acc, (k, c)| &acc + &DiffOp1D::term(*k, poly(c)))
}

fn same_op(a: &DiffOp1D, b: &DiffOp1D) -> bool {
    (a - b).order().is_none()
}

// ---------------------------------------------------------------- operators

#[test]
fn polynomial_arithmetic() {
    let p = poly(&[1.0, -2.0, 0.0, 3.0]);
    let q = poly(&[0.5, 1.0]);
    assert_eq!((&p * &q).coeffs(), &[0.5, 0.0, -2.0, 1.5, 3.0]);
    assert_eq!(p.deriv().coeffs(), &[-2.0, 0.0, 9.0]);
    assert_eq!(p.deriv().antideriv().coeffs(), &[0.0, -2.0, 0.0, 3.0]);
    assert!((&p - &p).is_zero());
    assert_eq!(poly(&[2.0, 0.0, 0.0]).degree(), Some(0));
    assert_eq!(Poly::zero().degree(), None);
    assert!((p.eval(2.0) - 21.0).abs() < 1e-15);
}

fn arb_poly() -> impl Strategy<Value = Poly> {
    prop::collection::vec(-2.0f64..2.0, 1..5).prop_map(Poly::new)
}

fn arb_op() -> impl Strategy<Value = DiffOp1D> {
    prop::collection::vec(arb_poly(), 1..4).prop_map(|cs| cs.into_iter().enumerate().fold(DiffOp1D::zero(), |acc, (k, c)| &acc + &DiffOp1D::term(k, c)))
}

fn poly_close(a: &Poly, b: &Poly) -> bool {
    let d = a - b;
    let scale = 1.0 + a.coeffs().iter().chain(b.coeffs()).fold(0.0f64, |m, c| m.max(c.abs()));
    d.coeffs().iter().all(|c| c.abs() < 1e-9 * scale)
}

proptest! {
    #[test]
    fn composition_acts_as_successive_application(a in arb_op(), b in arb_op(), u in arb_poly()) {
        let lhs = (&a * &b).apply(&u);
        let rhs = a.apply(&b.apply(&u));
        prop_assert!(poly_close(&lhs, &rhs));
    }

    #[test]
    fn adjoint_is_an_involution(a in arb_op()) {
        let diff = &a.adjoint().adjoint() - &a;
        let small = diff.order().is_none_or(|m| (0..=m).all(|k| diff.coefficient(k).coeffs().iter().all(|c| c.abs() < 1e-9)));
        prop_assert!(small);
    }
}

/// `∫_{-1}^{1} (Lu) v dq = ∫ u (L*v) dq` for `u, v` with high-order zeros at `±1`, by
/// Gauss–Legendre, exact for polynomials of this degree.
#[test]
fn adjoint_matches_integration_by_parts() {
    let bump = poly(&[1.0, 0.0, -1.0]);
    let bump3 = &(&bump * &bump) * &bump;
    let u = &bump3 * &poly(&[0.3, -1.0, 0.7]);
    let v = &bump3 * &poly(&[-0.2, 0.5, 0.0, 1.1]);
    let l = op(&[(0, &[1.0, 2.0, -1.0]), (1, &[0.0, 0.5, 0.0, 1.0]), (2, &[-1.0, 0.3]), (3, &[0.25])]);
    let (x, w) = gauss_legendre(30);
    let integral = |f: &Poly, g: &Poly| x.iter().zip(&w).map(|(q, wt)| wt * f.eval(*q) * g.eval(*q)).sum::<f64>();
    let lhs = integral(&l.apply(&u), &v);
    let rhs = integral(&u, &l.adjoint().apply(&v));
    assert!((lhs - rhs).abs() < 1e-11 * (1.0 + lhs.abs()), "{lhs} vs {rhs}");
}

#[test]
fn factorization_of_the_harmonic_superpotential() {
    let f = susy_factorize(&Poly::q());
    let minus_d2 = DiffOp1D::term(2, Poly::constant(-1.0));
    assert!(same_op(&f.a_star, &(&(-&DiffOp1D::d()) + &DiffOp1D::multiplication(Poly::q()))));
    assert!(same_op(&f.h_minus, &(&minus_d2 + &DiffOp1D::multiplication(poly(&[-1.0, 0.0, 1.0])))));
    assert!(same_op(&f.h_plus, &(&minus_d2 + &DiffOp1D::multiplication(poly(&[1.0, 0.0, 1.0])))));
}

#[test]
fn factorization_identities_for_general_phi() {
    for phi in [poly(&[0.5, -1.0, 0.0, 2.0]), poly(&[0.0, 0.0, 1.0]), poly(&[1.5]), poly(&[-0.3, 0.2, 0.1, 0.0, -0.7])] {
        let f = susy_factorize(&phi);
        let minus_d2 = DiffOp1D::term(2, Poly::constant(-1.0));
        let phi2 = &phi * &phi;
        assert!(same_op(&f.h_minus, &(&minus_d2 + &DiffOp1D::multiplication(&phi2 - &phi.deriv()))));
        assert!(same_op(&f.h_plus, &(&minus_d2 + &DiffOp1D::multiplication(&phi2 + &phi.deriv()))));
        // {Q, P} = 0, P² = 1, H = Q² = diag(A*A, AA*), [H, P] = 0.
        assert!((&(&f.q * &f.p) + &(&f.p * &f.q)).is_zero());
        let p2 = &f.p * &f.p;
        assert!(same_op(&p2.0[0][0], &DiffOp1D::identity()) && same_op(&p2.0[1][1], &DiffOp1D::identity()));
        let expected = OpMatrix2::diag(f.h_minus.clone(), f.h_plus.clone());
        let diff = &f.h + &OpMatrix2(expected.0.clone().map(|row| row.map(|e| -&e)));
        assert!(diff.is_zero());
        let hp = &f.h * &f.p;
        let ph = &f.p * &f.h;
        assert!((&hp + &OpMatrix2(ph.0.clone().map(|row| row.map(|e| -&e)))).is_zero());
    }
}

#[test]
fn vanishing_superpotential_gives_two_free_laplacians() {
    let f = susy_factorize(&Poly::zero());
    let minus_d2 = DiffOp1D::term(2, Poly::constant(-1.0));
    assert!(same_op(&f.h_minus, &minus_d2));
    assert!(same_op(&f.h_plus, &minus_d2));
    assert_eq!(kernel_dims(&Poly::zero()), IndexRecord { ker_a: 0, ker_a_star: 0, index: 0 });
}

#[test]
fn kernel_dimensions_and_index() {
    assert_eq!(kernel_dims(&Poly::q()), IndexRecord { ker_a: 1, ker_a_star: 0, index: 1 });
    assert_eq!(kernel_dims(&poly(&[0.0, -2.0])), IndexRecord { ker_a: 0, ker_a_star: 1, index: -1 });
    assert_eq!(kernel_dims(&poly(&[0.0, -1.0, 0.0, 1.0])).index, 1);
    assert_eq!(kernel_dims(&poly(&[1.0, 0.0, 1.0])).index, 0);
    assert_eq!(kernel_dims(&poly(&[3.0])).index, 0);
}

/// Lowest eigenvalues of `−u'' + V u` on a finite-difference grid over `[−L, L]`.
fn low_spectrum(v: impl Fn(f64) -> f64, count: usize) -> Vec<f64> {
    let (n, half) = (600, 9.0);
    let h = 2.0 * half / (n + 1) as f64;
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        let q = -half + (i + 1) as f64 * h;
        m[(i, i)] = 2.0 / (h * h) + v(q);
        if i + 1 < n {
            m[(i, i + 1)] = -1.0 / (h * h);
            m[(i + 1, i)] = -1.0 / (h * h);
        }
    }
    let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev.truncate(count);
    ev
}

/// Independent count of zero modes: discretize both partner Hamiltonians and look for
/// eigenvalues near zero.
#[test]
fn index_agrees_with_discretized_zero_modes() {
    for phi in [Poly::q(), poly(&[0.0, -1.0]), poly(&[0.0, -1.0, 0.0, 1.0]), poly(&[0.5, 0.0, 1.0])] {
        let f = susy_factorize(&phi);
        let potential = |h: &DiffOp1D| {
            let c = h.coefficient(0);
            move |q: f64| c.eval(q)
        };
        let zeros = |h: &DiffOp1D| low_spectrum(potential(h), 3).iter().filter(|e| e.abs() < 1e-2).count();
        let rec = kernel_dims(&phi);
        assert_eq!((zeros(&f.h_minus), zeros(&f.h_plus)), (rec.ker_a, rec.ker_a_star), "phi = {phi}");
        // Nonzero spectra coincide.
        let mut lo_m = low_spectrum(potential(&f.h_minus), 4);
        let mut lo_p = low_spectrum(potential(&f.h_plus), 4);
        lo_m.retain(|e| e.abs() > 1e-2);
        lo_p.retain(|e| e.abs() > 1e-2);
        for (a, b) in lo_m.iter().zip(&lo_p) {
            assert!((a - b).abs() < 2e-2 * (1.0 + a.abs()), "{a} vs {b} for phi = {phi}");
        }
    }
}

#[test]
fn kernel_function_is_annihilated() {
    let phi = poly(&[0.2, -1.0, 0.0, 1.0]);
    let big_phi = phi.antideriv();
    let f = susy_factorize(&phi);
    // A e^{−Φ} = (−φ + φ)e^{−Φ}: check pointwise with the operator's coefficients.
    for q in [-1.5, -0.3, 0.0, 0.8, 2.0] {
        let u = (-big_phi.eval(q)).exp();
        let du = -phi.eval(q) * u;
        let au = f.a.coefficient(1).eval(q) * du + f.a.coefficient(0).eval(q) * u;
        assert!(au.abs() < 1e-14);
    }
}

// ---------------------------------------------------------------- Witten index

fn bosonic_trace(w: f64, t: f64) -> f64 {
    // Σ_n e^{−ωt(n+½)} summed until negligible.
    let mut s = 0.0;
    for n in 0.. {
        let term = (-w * t * (n as f64 + 0.5)).exp();
        s += term;
        if term < 1e-18 * s {
            break;
        }
    }
    s
}

fn spectral_supertrace(omegas: &[f64], t: f64) -> f64 {
    let d = omegas.len();
    let mut odd = 0.0;
    for a in 0u32..(1 << d) {
        let sign = if a.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        let amp: f64 = omegas.iter().enumerate().map(|(j, w)| (if a >> j & 1 == 1 { -1.0 } else { 1.0 } * w * t / 2.0).exp()).product();
        odd += sign * amp;
    }
    odd * omegas.iter().map(|&w| bosonic_trace(w, t)).product::<f64>()
}

#[test]
fn witten_index_is_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for d in 1..=3 {
        for _ in 0..10 {
            let omegas: Vec<f64> = (0..d).map(|_| rng.random_range(0.2..3.0)).collect();
            let t = rng.random_range(0.05..4.0);
            let s = witten_supertrace(&omegas, t).unwrap();
            assert!((s.body() - ONE).norm() < 1e-12, "d = {d}, ω = {omegas:?}, t = {t}: {s}");
            assert!((spectral_supertrace(&omegas, t) - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn witten_index_does_not_depend_on_t() {
    let omegas = [0.7, 1.9];
    let values: Vec<f64> = [0.01, 0.3, 1.0, 5.0, 12.0].iter().map(|&t| witten_supertrace(&omegas, t).unwrap().body().re).collect();
    for v in values {
        assert!((v - 1.0).abs() < 1e-11, "{v}");
    }
}

#[test]
fn sector_images_carry_the_fermion_energies() {
    let omegas = [0.6, 1.3, 2.1];
    let t = 0.8;
    let d = omegas.len() as u32;
    for a in 0u32..(1 << d) {
        let image = lh_sector_image(&omegas, t, a).unwrap();
        let amp: f64 = omegas.iter().enumerate().map(|(j, w)| (if a >> j & 1 == 1 { -1.0 } else { 1.0 } * w * t / 2.0).exp()).product();
        let sign = if a.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        let want = Supernumber::monomial(2 * d, a << d, sign * amp).unwrap();
        assert!(image.max_diff(&want) < 1e-14, "a = {a:03b}: {image}");
    }
}

#[test]
fn odd_kernel_has_one_term_per_sector() {
    let k = lh_odd_kernel(&[1.0, 2.0], 0.5).unwrap();
    assert_eq!(k.terms().len(), 4);
    assert!(k.is_even());
    let one = lh_odd_kernel(&[1.0], 0.5).unwrap();
    assert!((one.coeff(0b01) - C64::from((0.25f64).exp())).norm() < 1e-15);
    assert!((one.coeff(0b10) - C64::from((-0.25f64).exp())).norm() < 1e-15);
}

#[test]
fn witten_guards() {
    assert!(matches!(witten_supertrace(&[], 1.0), Err(Error::Domain(_))));
    assert!(matches!(witten_supertrace(&[1.0, -1.0], 1.0), Err(Error::Domain(_))));
    assert!(matches!(witten_supertrace(&[1.0], 0.0), Err(Error::Domain(_))));
    assert!(matches!(lh_sector_image(&[1.0], 1.0, 0b10), Err(Error::ShapeMismatch(_))));
}

// ---------------------------------------------------------------- extension

fn random_state(rng: &mut ChaCha8Rng, l: u32, d: usize) -> (Vec<Supernumber>, Vec<Supernumber>, Vec<Supernumber>, Vec<Supernumber>) {
    use crate::grassmann::{random_supernumber, Parity};
    let even = |rng: &mut ChaCha8Rng, body: f64| random_supernumber(rng, l, Some(Parity::Even), 0.6).soul().scale(0.3).add_scalar(body);
    let x = (0..d).map(|_| {
        let b = rng.random_range(0.4..1.2);
        even(rng, b)
    }).collect();
    let xi = (0..d).map(|_| {
        let b = rng.random_range(-1.0..1.0);
        even(rng, b)
    }).collect();
    let odd = |rng: &mut ChaCha8Rng| random_supernumber(rng, l, Some(Parity::Odd), 0.6);
    let theta = (0..d).map(|_| odd(rng)).collect();
    let pi = (0..d).map(|_| odd(rng)).collect();
    (x, xi, theta, pi)
}

#[test]
fn flat_free_extension_is_kinetic_energy() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let data = MetricData::flat(3, vec![Expr::c(0.0); 3], Expr::c(0.0)).unwrap();
    let (x, xi, th, pi) = random_state(&mut rng, 6, 3);
    let h = susy_extension(&data, &x, &xi, &th, &pi).unwrap();
    let want = xi.iter().fold(Supernumber::zero(6), |acc, p| acc + (p * p).scale(0.5));
    assert!(h.max_diff(&want) < 1e-13);
}

#[test]
fn flat_one_dimensional_extension_is_the_complexified_route() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let a = Expr::parse("0.3*q^2 - q").unwrap();
    let w = Expr::parse("q^3/3 + 0.5*sin(q)").unwrap();
    let data = MetricData::flat(1, vec![a.clone()], w.clone()).unwrap();
    let route = flat_susy_hamiltonian(SusyRoute::Complexified, &a, &w).unwrap();
    for _ in 0..5 {
        let (x, xi, th, pi) = random_state(&mut rng, 4, 1);
        let ext = susy_extension(&data, &x, &xi, &th, &pi).unwrap();
        let s = FlowState::new(0.0, x, xi, th, pi).unwrap();
        assert!(ext.max_diff(&route.value(&s).unwrap()) < 1e-13);
    }
}

#[test]
fn both_routes_reduce_to_the_harmonic_symbols() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (a, b) = (0.7, 1.4);
    let pot = Expr::c(a) * Expr::var(0);
    let real_w = Expr::c(0.5 * b) * Expr::var(0).powi(2);
    let complex_w = Expr::ci(C64::new(0.0, -0.5 * b)) * Expr::var(0).powi(2);
    let h1 = flat_susy_hamiltonian(SusyRoute::RealOdd, &pot, &real_w).unwrap();
    let h2 = flat_susy_hamiltonian(SusyRoute::Complexified, &pot, &complex_w).unwrap();
    let plus = harmonic_symbol(true, a, b);
    let minus = harmonic_symbol(false, a, b);
    for _ in 0..5 {
        let (x, xi, th, pi) = random_state(&mut rng, 4, 1);
        let s = FlowState::new(0.0, x, xi, th, pi).unwrap();
        assert!(h1.value(&s).unwrap().max_diff(&plus.value(&s).unwrap()) < 1e-13);
        assert!(h2.value(&s).unwrap().max_diff(&minus.value(&s).unwrap()) < 1e-13);
        // Explicit symbols, written out once more.
        let (x, xi, th, pi) = (&s.x[0], &s.xi[0], &s.theta[0], &s.pi[0]);
        let kin = xi - &x.scale(a);
        let odd = (th * pi).scale(I * b);
        let want_plus = (&kin * &kin).scale(0.5) + (x * x).scale(0.5 * b * b) + &odd;
        let want_minus = (&kin * &kin).scale(0.5) - (x * x).scale(0.5 * b * b) + &odd;
        assert!(plus.value(&s).unwrap().max_diff(&want_plus) < 1e-13);
        assert!(minus.value(&s).unwrap().max_diff(&want_minus) < 1e-13);
    }
}

/// `R_std(a,b,c,d) = g_{ae}(∂_cΓ^e_{db} − ∂_dΓ^e_{cb} + Γ^e_{cf}Γ^f_{db} − Γ^e_{df}Γ^f_{cb})`, with
/// every derivative a central difference of the metric.
fn fd_riemann_std(g: &dyn Fn(&[f64]) -> DMatrix<f64>, q: &[f64]) -> Vec<Vec<Vec<Vec<f64>>>> {
    let d = q.len();
    let h = 1e-4;
    let shift = |q: &[f64], k: usize, s: f64| {
        let mut p = q.to_vec();
        p[k] += s;
        p
    };
    let christoffel = |q: &[f64]| {
        let ginv = g(q).try_inverse().unwrap();
        let dg: Vec<DMatrix<f64>> = (0..d).map(|k| (g(&shift(q, k, h)) - g(&shift(q, k, -h))) / (2.0 * h)).collect();
        let mut gam = vec![vec![vec![0.0; d]; d]; d];
        for e in 0..d {
            for a in 0..d {
                for b in 0..d {
                    gam[e][a][b] = (0..d).map(|k| 0.5 * ginv[(e, k)] * (dg[b][(k, a)] + dg[a][(k, b)] - dg[k][(a, b)])).sum();
                }
            }
        }
        gam
    };
    let gam = christoffel(q);
    let dgam: Vec<Vec<Vec<Vec<f64>>>> = (0..d)
        .map(|c| {
            let (p, m) = (christoffel(&shift(q, c, h)), christoffel(&shift(q, c, -h)));
            (0..d).map(|e| (0..d).map(|a| (0..d).map(|b| (p[e][a][b] - m[e][a][b]) / (2.0 * h)).collect()).collect()).collect()
        })
        .collect();
    let gq = g(q);
    let mut r = vec![vec![vec![vec![0.0; d]; d]; d]; d];
    for a in 0..d {
        for b in 0..d {
            for c in 0..d {
                for dd in 0..d {
                    let mut s = 0.0;
                    for e in 0..d {
                        let mut up = dgam[c][e][dd][b] - dgam[dd][e][c][b];
                        for f in 0..d {
                            up += gam[e][c][f] * gam[f][dd][b] - gam[e][dd][f] * gam[f][c][b];
                        }
                        s += gq[(a, e)] * up;
                    }
                    r[a][b][c][dd] = s;
                }
            }
        }
    }
    r
}

fn check_curvature(g: &str, q: &[f64]) {
    let data = MetricData::parse(g, "", "0").unwrap();
    let d = q.len();
    let rows: Vec<Vec<Expr>> = g.split(';').map(|r| r.split(',').map(|e| Expr::parse(e.trim()).unwrap()).collect()).collect();
    let metric = move |p: &[f64]| DMatrix::from_fn(d, d, |i, j| rows[i][j].eval_real(p).unwrap().re);
    let oracle = fd_riemann_std(&metric, q);
    let got = data.riemann_at(q).unwrap();
    for i in 0..d {
        for k in 0..d {
            for j in 0..d {
                for l in 0..d {
                    let want = oracle[i][k][l][j];
                    assert!((got[i][k][j][l] - want).abs() < 1e-6, "{g} R[{i}{k}{j}{l}] = {} vs {want}", got[i][k][j][l]);
                }
            }
        }
    }
}

#[test]
fn curvature_matches_finite_difference_oracle() {
    check_curvature("1, 0; 0, q1^2", &[1.3, 0.4]);
    check_curvature("1, 0; 0, sin(q1)^2", &[0.9, -0.2]);
    check_curvature("1 + q2^2, 0.3*q1*q2; 0.3*q1*q2, 2 + q1^2", &[0.5, -0.7]);
    check_curvature("exp(q2), 0, 0.1*q1; 0, 1 + q3^2, 0; 0.1*q1, 0, 1 + q1*q2", &[0.3, 0.4, -0.6]);
}

#[test]
fn flat_polar_and_round_sphere_curvature() {
    let polar = MetricData::parse("1, 0; 0, q1^2", "", "0").unwrap();
    let r = polar.riemann_at(&[1.7, 0.3]).unwrap();
    assert!(r.iter().flatten().flatten().flatten().all(|v| v.abs() < 1e-12));
    let sphere = MetricData::parse("1, 0; 0, sin(q1)^2", "", "0").unwrap();
    let q1 = 0.8f64;
    let r = sphere.riemann_at(&[q1, 0.1]).unwrap();
    // R_{ikjl} with (i,k,j,l) = (1,2,2,1) is the sectional curvature times det g.
    assert!((r[0][1][1][0] - q1.sin().powi(2)).abs() < 1e-12);
    assert!((r[0][1][0][1] + q1.sin().powi(2)).abs() < 1e-12);
}

#[test]
fn covariant_hessian_of_the_radius_in_polar_coordinates() {
    let data = MetricData::parse("1, 0; 0, q1^2", "", "q1").unwrap();
    let r = 1.6;
    let geo = data.geometry(&[Supernumber::scalar(0, r), Supernumber::scalar(0, 0.4)]).unwrap();
    assert!((geo.hess_w[1][1].body().re - r).abs() < 1e-14);
    assert!(geo.hess_w[0][0].body().norm() < 1e-14);
    assert!(geo.hess_w[0][1].body().norm() < 1e-14);
}

#[test]
fn extension_is_even_and_reduces_at_zero_odd_variables() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let data = MetricData::parse("1 + q2^2, 0.3*q1*q2; 0.3*q1*q2, 2 + q1^2", "q2, -q1", "q1*q2 + q1^3").unwrap();
    let (x, xi, th, pi) = random_state(&mut rng, 6, 2);
    let h = susy_extension(&data, &x, &xi, &th, &pi).unwrap();
    assert!(h.is_even());
    let zero = vec![Supernumber::zero(6); 2];
    let h0 = susy_extension(&data, &x, &xi, &zero, &zero).unwrap();
    let geo = data.geometry(&x).unwrap();
    let p: Vec<Supernumber> = (0..2).map(|i| &xi[i] - &geo.a[i]).collect();
    let mut want = Supernumber::zero(6);
    for i in 0..2 {
        for j in 0..2 {
            want += &(&geo.ginv[i][j] * &(&(&p[i] * &p[j]) + &(&geo.dw[i] * &geo.dw[j]))).scale(0.5);
        }
    }
    assert!(h0.max_diff(&want) < 1e-12);
}

#[test]
fn extension_guards() {
    assert!(matches!(MetricData::parse("1, 0; 0", "", "0"), Err(Error::ShapeMismatch(_))));
    assert!(matches!(MetricData::parse("1", "", "q2"), Err(Error::ShapeMismatch(_))));
    assert!(matches!(MetricData::parse("1, 0; 0, 1", "q1", "0"), Err(Error::ShapeMismatch(_))));
    let asym = MetricData::parse("1, q1; 0, 1", "", "0").unwrap();
    assert!(matches!(asym.riemann_at(&[0.5, 0.0]), Err(Error::Domain(_))));
    let singular = MetricData::parse("q1, 0; 0, 1", "", "0").unwrap();
    assert!(singular.riemann_at(&[0.0, 0.0]).is_err());
    let data = MetricData::flat(2, vec![Expr::c(0.0); 2], Expr::c(0.0)).unwrap();
    let one = vec![Supernumber::zero(0)];
    assert!(matches!(susy_extension(&data, &one, &one, &one, &one), Err(Error::ShapeMismatch(_))));
}

// ---------------------------------------------------------------- supercharges

fn charged_state() -> FlowState {
    let l = 2;
    let s1 = Supernumber::generator(l, 1).unwrap();
    let s2 = Supernumber::generator(l, 2).unwrap();
    let s12 = &s1 * &s2;
    FlowState::new(
        0.0,
        vec![s12.scale(0.1).add_scalar(0.3)],
        vec![s12.scale(-0.2).add_scalar(0.2)],
        vec![&s1 + &s2.scale(0.5)],
        vec![s1.scale(0.4) - &s2],
    )
    .unwrap()
}

#[test]
fn supercharges_are_conserved_by_the_complexified_flow() {
    let zero = Expr::c(0.0);
    for w in ["0.65*q^2", "q^3/3 + q", "0.5*sin(q) + q^2"] {
        let w = Expr::parse(w).unwrap();
        let cfg = FlowConfig::new(1.0, 1e-3).with_odd_scale(SUPERCHARGE_ODD_SCALE);
        let rep = supercharge_drift(&zero, &w, &charged_state(), &cfg).unwrap();
        assert!(rep.charge_drift[0] < 1e-6 && rep.charge_drift[1] < 1e-6, "{w}: {rep:?}");
        assert!(rep.energy_drift < 1e-8, "{w}: {rep:?}");
        assert_eq!(rep.states, 1001);
    }
}

#[test]
fn supercharges_survive_a_one_dimensional_vector_potential() {
    let a = Expr::parse("0.4*q").unwrap();
    let w = Expr::parse("0.65*q^2").unwrap();
    let cfg = FlowConfig::new(1.0, 1e-3).with_odd_scale(SUPERCHARGE_ODD_SCALE);
    let rep = supercharge_drift(&a, &w, &charged_state(), &cfg).unwrap();
    assert!(rep.charge_drift.iter().all(|d| *d < 1e-6), "{rep:?}");
}

#[test]
fn wrong_odd_time_scale_breaks_supersymmetry() {
    let w = Expr::parse("0.65*q^2").unwrap();
    let rep = supercharge_drift(&Expr::c(0.0), &w, &charged_state(), &FlowConfig::new(1.0, 1e-3)).unwrap();
    assert!(rep.charge_drift[0].max(rep.charge_drift[1]) > 1e-2, "{rep:?}");
    assert!(rep.energy_drift < 1e-8);
}

#[test]
fn free_supercharges_are_trivially_conserved() {
    let cfg = FlowConfig::new(1.0, 1e-2).with_odd_scale(SUPERCHARGE_ODD_SCALE);
    let rep = supercharge_drift(&Expr::c(0.0), &Expr::c(0.0), &charged_state(), &cfg).unwrap();
    assert!(rep.charge_drift.iter().all(|d| *d < 1e-13));
}
