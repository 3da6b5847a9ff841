//! Berezin integration.
//!
//! Odd integrals use `∫dθ_n…dθ_1 θ_1…θ_n = 1`, i.e. the coefficient of the ascending top
//! monomial with `θ` moved to the left. Mixed integrals come in two flavours: the naive one
//! (Berezin integral of the integrand at body points, then Lebesgue) and the FSM/contour one,
//! which pulls the integrand back along a parametrized path `(q, ϑ) ↦ γ(q, ϑ)` and includes
//! `sdet J(γ)`. Odd parameters are realized as fresh generators above the base algebra.
//!
//! The `Q`-matrix integrals use the measure `dQ = (dx_1 dx_2 / 2π) dρ_1 dρ_2`, whose odd
//! part is minus the standard one.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grassmann::{reorder_sign, Supernumber, C64, I, ONE};
use crate::quadrature::{integrate_checked, GaussQuadSpec};
use crate::superlinalg::{det_even, pfaffian, MatrixParity, Supermatrix};
use crate::superspace::{ComponentMap, Expr, SuperFunction, SuperMapping, SuperPoint};

/// A Λ-valued function on superspace.
pub type Integrand<'a> = dyn Fn(&SuperPoint) -> Result<Supernumber> + 'a;

/// `Σ_a θ^a v_a` with `v_a ∈ Λ_l`, stored as one element of `Λ_{l+n}` where `θ_s = σ_{l+s}`.
#[derive(Clone, Debug, PartialEq)]
pub struct OddPolynomial {
    l: u32,
    n: usize,
    repr: Supernumber,
}

impl OddPolynomial {
    pub fn zero(l: u32, n: usize) -> Result<Self> {
        let total = l + n as u32;
        if total > crate::grassmann::MAX_GENERATORS {
            return Err(Error::TooManyGenerators(total));
        }
        Ok(OddPolynomial { l, n, repr: Supernumber::zero(total) })
    }

    fn total(&self) -> u32 {
        self.l + self.n as u32
    }

    fn high(&self, mask: u32) -> u32 {
        mask << self.l
    }

    /// From `(a, v_a)` pairs; bit `s` of `a` stands for `θ_{s+1}`.
    pub fn from_coeffs(l: u32, n: usize, terms: impl IntoIterator<Item = (u32, Supernumber)>) -> Result<Self> {
        let mut out = Self::zero(l, n)?;
        for (a, v) in terms {
            if a >> n != 0 || v.highest_generator() > l {
                return Err(Error::ShapeMismatch(format!("term {a:#b} does not fit ({l} base generators, {n} odd variables)")));
            }
            let mono = Supernumber::monomial(out.total(), out.high(a), ONE)?;
            out.repr += &mono * &v.embed(out.total());
        }
        Ok(out)
    }

    /// Wrap an element of `Λ_{l+n}` whose top `n` generators play the odd variables.
    pub fn from_repr(l: u32, n: usize, repr: Supernumber) -> Self {
        let total = l + n as u32;
        assert!(repr.highest_generator() <= total, "element does not fit Λ_(l+n)");
        OddPolynomial { l, n, repr: repr.embed(total) }
    }

    pub fn constant(l: u32, n: usize, c: &Supernumber) -> Result<Self> {
        Self::from_coeffs(l, n, [(0, c.clone())])
    }

    /// `θ_{s+1}`.
    pub fn variable(l: u32, n: usize, s: usize) -> Result<Self> {
        Self::from_coeffs(l, n, [(1 << s, Supernumber::one(l))])
    }

    pub fn num_odd(&self) -> usize {
        self.n
    }

    pub fn base_generators(&self) -> u32 {
        self.l
    }

    pub fn repr(&self) -> &Supernumber {
        &self.repr
    }

    /// `v_a`.
    pub fn coefficient(&self, a: u32) -> Supernumber {
        let g = self.high(a);
        let high_all = self.high((1 << self.n) - 1);
        let terms = self.repr.terms().iter().filter(|t| t.0 & high_all == g).map(|&(m, c)| {
            let r = m & !g;
            (r, if reorder_sign(g, r) { -c } else { c })
        });
        Supernumber::from_masks(self.l, terms).expect("base masks fit")
    }

    /// `Σ θ^a v_a` at odd supernumbers `θ`.
    pub fn evaluate(&self, theta: &[Supernumber]) -> Result<Supernumber> {
        if theta.len() != self.n {
            return Err(Error::ShapeMismatch(format!("{} values for {} odd variables", theta.len(), self.n)));
        }
        let target = theta.iter().map(|t| t.num_generators()).max().unwrap_or(0).max(self.l);
        let mut images: Vec<Supernumber> = (1..=self.l as usize).map(|j| Supernumber::generator(target, j)).collect::<Result<_>>()?;
        images.extend(theta.iter().map(|t| t.embed(target)));
        Ok(self.repr.substitute(&images))
    }

    /// `v(θ(ω))` for `θ_k = images[k]`, odd polynomials in new variables `ω`.
    pub fn compose(&self, images: &[OddPolynomial]) -> Result<OddPolynomial> {
        if images.len() != self.n {
            return Err(Error::ShapeMismatch(format!("{} images for {} odd variables", images.len(), self.n)));
        }
        let first = images.first();
        let (l, n) = first.map(|p| (p.l, p.n)).unwrap_or((self.l, 0));
        if images.iter().any(|p| (p.l, p.n) != (l, n)) || l < self.l {
            return Err(Error::ShapeMismatch("images live in different algebras".into()));
        }
        let total = l + n as u32;
        let mut subs: Vec<Supernumber> = (1..=self.l as usize).map(|j| Supernumber::generator(total, j)).collect::<Result<_>>()?;
        subs.extend(images.iter().map(|p| p.repr.clone()));
        Ok(OddPolynomial { l, n, repr: self.repr.substitute(&subs) })
    }

    /// Left derivative `∂_{θ_{s+1}}`.
    pub fn derivative(&self, s: usize) -> OddPolynomial {
        OddPolynomial { repr: self.repr.deriv_generator(self.l as usize + s + 1), ..self.clone() }
    }

    fn check(&self, o: &OddPolynomial) -> Result<()> {
        if (self.l, self.n) != (o.l, o.n) {
            return Err(Error::ShapeMismatch("odd polynomials over different algebras".into()));
        }
        Ok(())
    }

    pub fn add(&self, o: &OddPolynomial) -> Result<OddPolynomial> {
        self.check(o)?;
        Ok(OddPolynomial { repr: &self.repr + &o.repr, ..self.clone() })
    }

    pub fn sub(&self, o: &OddPolynomial) -> Result<OddPolynomial> {
        self.check(o)?;
        Ok(OddPolynomial { repr: &self.repr - &o.repr, ..self.clone() })
    }

    pub fn mul(&self, o: &OddPolynomial) -> Result<OddPolynomial> {
        self.check(o)?;
        Ok(OddPolynomial { repr: &self.repr * &o.repr, ..self.clone() })
    }

    pub fn exp(&self) -> OddPolynomial {
        OddPolynomial { repr: self.repr.exp(), ..self.clone() }
    }

    pub fn parity(&self) -> crate::grassmann::Parity {
        self.repr.parity()
    }
}

/// `∫dθ v = v_{1…1}`.
pub fn integrate_odd(v: &OddPolynomial) -> Supernumber {
    v.coefficient((1 << v.n) - 1)
}

/// Berezin integral over generators `base+1..=base+n` of an element of `Λ_{base+n}`.
pub fn berezin_top(v: &Supernumber, base: u32, n: usize) -> Supernumber {
    let g = (((1u64 << n) - 1) << base) as u32;
    let top = v.berezin(g);
    Supernumber::from_masks(base, top.terms().iter().copied().filter(|t| t.0 >> base == 0)).expect("base masks fit")
}

/// The point `(q, ϑ)` with `ϑ_k = σ_{base+k}` in `Λ_{base+n}`.
pub fn parameter_point(q: &[f64], base: u32, n: usize) -> Result<SuperPoint> {
    let total = base + n as u32;
    let x = q.iter().map(|&v| Supernumber::scalar(total, v)).collect();
    let theta = (1..=n).map(|k| Supernumber::generator(total, base as usize + k)).collect::<Result<_>>()?;
    Ok(SuperPoint { x, theta })
}

fn quadrature_sum(quad: &GaussQuadSpec, base: u32, at: impl Fn(&[f64]) -> Result<Supernumber>) -> Result<Supernumber> {
    integrate_checked(
        quad,
        |spec| {
            let mut acc = Supernumber::zero(base);
            spec.for_each_node(|q, w| {
                acc += &at(q)?.scale(w);
                Ok(())
            })?;
            Ok(acc)
        },
        |a, b| (a.max_diff(b), b.max_abs()),
    )
}

/// Naive mixed integral `∫_Ω dq ∫dθ u(q, θ)` with `n` odd variables; values may carry
/// `base` external generators.
pub fn integrate_naive(u: &Integrand, n: usize, quad: &GaussQuadSpec, base: u32) -> Result<Supernumber> {
    quadrature_sum(quad, base, |q| {
        let p = parameter_point(q, base, n)?;
        Ok(berezin_top(&u(&p)?.embed(base + n as u32), base, n))
    })
}

/// Naive integral of a superfunction (scalar coefficients).
pub fn integrate_naive_fn(f: &SuperFunction, quad: &GaussQuadSpec) -> Result<Supernumber> {
    if quad.dim() != f.m() {
        return Err(Error::ShapeMismatch(format!("{}-dimensional rule for a function of {} even variables", quad.dim(), f.m())));
    }
    integrate_naive(&|p: &SuperPoint| f.evaluate(p), f.n(), quad, 0)
}

/// A parametrized path `γ : Ω × ℝ^{0|n} → ℝ^{m|n}`; `Ω` is the region of the quadrature rule.
#[derive(Clone)]
pub struct FsmPath {
    pub gamma: Arc<dyn SuperMapping>,
    pub base: u32,
}

impl FsmPath {
    pub fn new(gamma: Arc<dyn SuperMapping>) -> Self {
        FsmPath { gamma, base: 0 }
    }
}

/// `∫dϑ ∫_Ω dq sdet J(γ)(q, ϑ) · u(γ(q, ϑ))`.
pub fn integrate_fsm(path: &FsmPath, u: &Integrand, quad: &GaussQuadSpec) -> Result<Supernumber> {
    let (m, n) = path.gamma.source();
    if quad.dim() != m {
        return Err(Error::ShapeMismatch(format!("{}-dimensional rule for a path on {m} even parameters", quad.dim())));
    }
    let total = path.base + n as u32;
    quadrature_sum(quad, path.base, |q| {
        let p = parameter_point(q, path.base, n)?;
        let ber = path.gamma.jacobian(&p)?.sdet()?;
        let val = &ber * &u(&path.gamma.apply(&p)?)?.embed(total);
        Ok(berezin_top(&val, path.base, n))
    })
}

/// The transformed integrand `sdet J(φ)(Y) · u(φ(Y))`.
pub fn pullback<'a>(phi: &'a dyn SuperMapping, u: &'a Integrand<'a>) -> impl Fn(&SuperPoint) -> Result<Supernumber> + 'a {
    move |p: &SuperPoint| Ok(phi.jacobian(p)?.sdet()? * u(&phi.apply(p)?)?)
}

/// `∫ u − ∫ sdet J(φ)·u∘φ`, both naive, over the same body region.
pub fn naive_cvf_discrepancy(phi: &dyn SuperMapping, u: &Integrand, quad: &GaussQuadSpec, base: u32) -> Result<Supernumber> {
    let n = phi.source().1;
    let direct = integrate_naive(u, n, quad, base)?;
    let pulled = pullback(phi, u);
    Ok(direct - integrate_naive(&pulled, n, quad, base)?)
}

/// The shear `x = y + ω_1ω_2 φ(y)`, `θ = ω` on ℝ^{1|2}, and its inverse.
pub fn shear_maps(phi: &Expr) -> Result<(ComponentMap, ComponentMap)> {
    let one = Arc::new(crate::superspace::ExprFunction::new(Expr::c(1.0), 1));
    let id = Arc::new(crate::superspace::ExprFunction::new(Expr::var(0), 1));
    let f = Arc::new(crate::superspace::ExprFunction::new(phi.clone(), 1));
    let g = Arc::new(crate::superspace::ExprFunction::new(-phi.clone(), 1));
    let odd = || -> Result<Vec<SuperFunction>> { Ok(vec![SuperFunction::from_terms(1, 2, [(0b01, one.clone() as _)])?, SuperFunction::from_terms(1, 2, [(0b10, one.clone() as _)])?]) };
    let fwd = ComponentMap::new(vec![SuperFunction::from_terms(1, 2, [(0, id.clone() as _), (0b11, f as _)])?], odd()?)?;
    let inv = ComponentMap::new(vec![SuperFunction::from_terms(1, 2, [(0, id as _), (0b11, g as _)])?], odd()?)?;
    Ok((fwd, inv))
}

/// Both sides of the change of variables for `u = u_0(x) + θ_1θ_2 u_1(x)` under the shear.
#[derive(Clone, Debug, PartialEq)]
pub struct CounterexampleReport {
    pub naive_direct: C64,
    pub naive_pullback: C64,
    /// `naive_direct − naive_pullback`.
    pub discrepancy: C64,
    /// `[φ u_0]` across the interval, the predicted value of `−discrepancy`.
    pub boundary_term: C64,
    pub fsm_direct: C64,
    pub fsm_pullback: C64,
}

pub fn shear_counterexample(phi: &Expr, u0: &Expr, u1: &Expr, omega: (f64, f64), nodes: usize) -> Result<CounterexampleReport> {
    let (fwd, inv) = shear_maps(phi)?;
    let u = SuperFunction::from_terms(
        1,
        2,
        [(0, Arc::new(crate::superspace::ExprFunction::new(u0.clone(), 1)) as _), (0b11, Arc::new(crate::superspace::ExprFunction::new(u1.clone(), 1)) as _)],
    )?;
    let quad = GaussQuadSpec::interval(omega.0, omega.1, nodes);
    let uf = |p: &SuperPoint| u.evaluate(p);
    let naive_direct = integrate_naive(&uf, 2, &quad, 0)?.body();
    let pulled = pullback(&fwd, &uf);
    let naive_pullback = integrate_naive(&pulled, 2, &quad, 0)?.body();
    let identity: Arc<dyn SuperMapping> = Arc::new(crate::superspace::IdentityMap { m: 1, n: 2 });
    let fsm_direct = integrate_fsm(&FsmPath::new(identity), &uf, &quad)?.body();
    let fsm_pullback = integrate_fsm(&FsmPath::new(Arc::new(inv)), &pulled, &quad)?.body();
    let pu = phi.clone() * u0.clone();
    let boundary_term = pu.eval_real(&[omega.1])? - pu.eval_real(&[omega.0])?;
    Ok(CounterexampleReport { naive_direct, naive_pullback, discrepancy: naive_direct - naive_pullback, boundary_term, fsm_direct, fsm_pullback })
}

/// `Q = [[x_1, θ_1], [θ_2, i x_2]]`.
pub fn q_matrix(p: &SuperPoint) -> Result<Supermatrix> {
    Supermatrix::new(1, 1, 1, 1, MatrixParity::Even, vec![p.x[0].clone(), p.theta[0].clone(), p.theta[1].clone(), p.x[1].scale(I)])
}

/// The diagonalizing coordinates `φ(y, ω) = (x, θ)` for `Q`, and the inverse `φ⁻¹`.
pub fn q_diagonalizing_maps() -> Result<(ComponentMap, ComponentMap)> {
    let f = |terms: &[(usize, &str)]| SuperFunction::from_exprs(2, 2, terms);
    let phi = ComponentMap::new(
        vec![f(&[(0, "q1"), (0b11, "q1 - i*q2")])?, f(&[(0, "q2"), (0b11, "-i*(q1 - i*q2)")])?],
        vec![f(&[(0b01, "q1 - i*q2")])?, f(&[(0b10, "-(q1 - i*q2)")])?],
    )?;
    let phi_inv = ComponentMap::new(
        vec![f(&[(0, "q1"), (0b11, "1/(q1 - i*q2)")])?, f(&[(0, "q2"), (0b11, "-i/(q1 - i*q2)")])?],
        vec![f(&[(0b01, "1/(q1 - i*q2)")])?, f(&[(0b10, "-1/(q1 - i*q2)")])?],
    )?;
    Ok((phi, phi_inv))
}

/// Sign turning the standard odd measure `dρ_2 dρ_1` into `dρ_1 dρ_2`.
pub const ASCENDING_PAIR_SIGN: f64 = -1.0;

/// `∫dQ e^{-str Q²}` directly, naively after diagonalizing, and along the diagonalizing path.
#[derive(Clone, Debug, PartialEq)]
pub struct QGaussianReport {
    pub direct: C64,
    pub naive_diagonal: C64,
    pub fsm_diagonal: C64,
}

pub fn q_gaussian(nodes: usize) -> Result<QGaussianReport> {
    // Even node counts keep the rule off the singular point q = 0 of the diagonalizing map.
    let nodes = nodes + nodes % 2;
    let quad = GaussQuadSpec::whole(2, nodes, 1.0);
    let u = |p: &SuperPoint| -> Result<Supernumber> {
        let q = q_matrix(p)?;
        Ok((-q.mul(&q)?.str()?).exp())
    };
    let norm = ASCENDING_PAIR_SIGN / (2.0 * PI);
    let (phi, phi_inv) = q_diagonalizing_maps()?;
    let direct = integrate_naive(&u, 2, &quad, 0)?.body() * norm;
    let pulled = pullback(&phi, &u);
    let naive_diagonal = integrate_naive(&pulled, 2, &quad, 0)?.body() * norm;
    let fsm_diagonal = integrate_fsm(&FsmPath::new(Arc::new(phi_inv)), &pulled, &quad)?.body() * norm;
    Ok(QGaussianReport { direct, naive_diagonal, fsm_diagonal })
}

fn check_admissible(m: &Supermatrix) -> Result<()> {
    if !m.is_square() || m.parity != MatrixParity::Even {
        return Err(Error::ShapeMismatch("expected an even square supermatrix".into()));
    }
    let (a, b, c, d) = (m.block_a(), m.block_b(), m.block_c(), m.block_d());
    let tol = 1e-12 * (1.0 + m.max_abs());
    for i in 0..m.m {
        for j in 0..m.m {
            if a[i][j].max_diff(&a[j][i]) > tol {
                return Err(Error::NotPositiveDefinite("A is not symmetric".into()));
            }
        }
    }
    for i in 0..m.n {
        for j in 0..m.n {
            if (&b[i][j] + &b[j][i]).max_abs() > tol {
                return Err(Error::NotAntisymmetric);
            }
        }
    }
    for i in 0..m.m {
        for s in 0..m.n {
            if (&c[i][s] + &d[s][i]).max_abs() > tol {
                return Err(Error::NotPositiveDefinite("ᵗC + D ≠ 0".into()));
            }
        }
    }
    let body = nalgebra::DMatrix::from_fn(m.m, m.m, |i, j| a[i][j].body());
    if body.iter().any(|z| z.im.abs() > tol) {
        return Err(Error::NotPositiveDefinite("A has a complex body".into()));
    }
    if m.m > 0 && body.map(|z| z.re).cholesky().is_none() {
        return Err(Error::NotPositiveDefinite("body of A is not positive definite".into()));
    }
    Ok(())
}

/// `∫dX exp(-⟨X, MX⟩ / 2λ) = (2πλ)^{m/2} det(A)^{-1/2} Pf(-λ⁻¹(B − D A⁻¹ C))`, zero for odd `n`.
pub fn gaussian_super(m: &Supermatrix, lambda: f64) -> Result<Supernumber> {
    if !(lambda > 0.0) {
        return Err(Error::Domain(format!("λ = {lambda} must be positive")));
    }
    check_admissible(m)?;
    let l = m.num_generators();
    if m.n % 2 == 1 {
        return Ok(Supernumber::zero(l));
    }
    let (a, b, c, d) = (m.block_a(), m.block_b(), m.block_c(), m.block_d());
    let schur: Vec<Vec<Supernumber>> = if m.m == 0 {
        b.clone()
    } else {
        let ainv = crate::superlinalg::even_inverse(&a)?;
        let dac = mat_mul(&mat_mul(&d, &ainv, l), &c, l);
        b.iter().zip(&dac).map(|(x, y)| x.iter().zip(y).map(|(p, q)| p - q).collect()).collect()
    };
    let scaled: Vec<Vec<Supernumber>> = schur.iter().map(|row| row.iter().map(|e| e.scale(-1.0 / lambda)).collect()).collect();
    let pf = pfaffian(&scaled)?;
    let det_a = if m.m == 0 { Supernumber::one(l) } else { det_even(&a)? };
    let even = det_a.sqrt()?.inverse()?.scale((2.0 * PI * lambda).powf(m.m as f64 / 2.0));
    Ok(even * pf)
}

fn mat_mul(a: &[Vec<Supernumber>], b: &[Vec<Supernumber>], l: u32) -> Vec<Vec<Supernumber>> {
    let cols = b.first().map(|r| r.len()).unwrap_or(0);
    a.iter()
        .map(|row| (0..cols).map(|j| row.iter().zip(b).fold(Supernumber::zero(l), |acc, (x, br)| acc + x * &br[j])).collect())
        .collect()
}

/// `∫dx x^n e^{-γx²/2 + βx} = √(2π/γ) e^{β²/2γ} Σ_k C(n,2k) (2k-1)!! μ^{n-2k} γ^{-k}`, `μ = β/γ`.
pub fn gaussian_body_moment(gamma: &Supernumber, beta: &Supernumber, n: u32) -> Result<Supernumber> {
    if !gamma.is_even() || gamma.body().im != 0.0 || gamma.body().re <= 0.0 {
        return Err(Error::Domain("γ must be even with positive real body".into()));
    }
    if !beta.is_even() {
        return Err(Error::Parity("β must be even".into()));
    }
    let l = gamma.num_generators().max(beta.num_generators());
    let (gamma, beta) = (gamma.embed(l), beta.embed(l));
    let ginv = gamma.inverse()?;
    let mu = &beta * &ginv;
    let pref = (gamma.inverse()?.scale(2.0 * PI)).sqrt()? * (&beta * &beta * &ginv).scale(0.5).exp();
    let mut poly = Supernumber::zero(l);
    let mut binom = 1.0;
    let mut dfact = 1.0;
    for k in 0..=(n / 2) {
        if k > 0 {
            let (nn, kk) = (n as f64, k as f64);
            binom *= (nn - 2.0 * kk + 2.0) * (nn - 2.0 * kk + 1.0) / ((2.0 * kk - 1.0) * (2.0 * kk));
            dfact *= 2.0 * kk - 1.0;
        }
        poly += &(mu.powi(n - 2 * k) * ginv.powi(k)).scale(binom * dfact);
    }
    Ok(pref * poly)
}

/// Both sides of `exp[-J²/(2N) str A²] = ∫dQ exp[-N/(2J²) str Q² + i str(QA)]` for an even
/// `(1|1)` matrix `A`; the right side uses [`gaussian_body_moment`] and [`integrate_odd`].
pub fn hubbard_stratonovich_check(a: &Supermatrix, j: f64, n: f64) -> Result<(Supernumber, Supernumber)> {
    if (a.m, a.n, a.r, a.s) != (1, 1, 1, 1) || a.parity != MatrixParity::Even {
        return Err(Error::ShapeMismatch("expected an even (1|1) supermatrix".into()));
    }
    let l = a.num_generators();
    let lhs = a.mul(a)?.str()?.scale(-j * j / (2.0 * n)).exp();
    let c = n / (2.0 * j * j);
    let (av, t1, t2, bv) = (a.get(0, 0), a.get(0, 1), a.get(1, 0), a.get(1, 1));
    let gamma = Supernumber::scalar(l, 2.0 * c);
    let g1 = gaussian_body_moment(&gamma, &av.scale(I), 0)?;
    let g2 = gaussian_body_moment(&gamma, bv, 0)?;
    let rho1 = OddPolynomial::variable(l, 2, 0)?;
    let rho2 = OddPolynomial::variable(l, 2, 1)?;
    let th1 = OddPolynomial::constant(l, 2, t1)?;
    let th2 = OddPolynomial::constant(l, 2, t2)?;
    let quad = rho1.mul(&rho2)?;
    let mixed = rho1.mul(&th2)?.sub(&rho2.mul(&th1)?)?;
    let exponent = OddPolynomial { repr: quad.repr.scale(-2.0 * c) + mixed.repr.scale(I), ..quad };
    let odd = integrate_odd(&exponent.exp()).scale(ASCENDING_PAIR_SIGN);
    let rhs = (g1 * g2 * odd).scale(1.0 / (2.0 * PI));
    Ok((lhs, rhs))
}

/// `∫_{ℝ^{2|2}} dx dθ_2dθ_1 φ(|x|² − (4/γ)θ_1θ_2)` by radial quadrature, and `(4π/γ)φ(0)`.
pub fn susy_localize(phi: &Expr, gamma: f64, nodes: usize) -> Result<(C64, C64)> {
    if !(gamma > 0.0) {
        return Err(Error::Domain(format!("γ = {gamma} must be positive")));
    }
    let at0 = phi.eval_real(&[0.0])?;
    let far = phi.eval_real(&[1e3])?;
    if !(far.norm() <= 1e-10 * (1.0 + at0.norm())) {
        return Err(Error::Domain(format!("φ does not decay: φ(1000) = {far}")));
    }
    let soul = Supernumber::monomial(2, 0b11, -4.0 / gamma)?;
    // ∫_{ℝ²} F(|x|²) dx = π ∫_0^∞ F(s) ds, with s = t/(1-t) on [0, 1).
    let quad = GaussQuadSpec { axes: vec![crate::quadrature::Axis::Interval { a: 0.0, b: 1.0, panels: 16 }], nodes, tol: 1e-10 };
    let top = |t: f64| -> Result<C64> {
        let s = t / (1.0 - t);
        let v = phi.eval_super(&[soul.add_scalar(s)])?;
        Ok(berezin_top(&v, 0, 2).body() / ((1.0 - t) * (1.0 - t)))
    };
    let val = integrate_checked(
        &quad,
        |spec| {
            let mut acc = C64::new(0.0, 0.0);
            spec.for_each_node(|q, w| {
                acc += top(q[0])? * w;
                Ok(())
            })?;
            Ok(acc)
        },
        |a, b| ((a - b).norm(), b.norm()),
    )?;
    Ok((val * PI, at0 * (4.0 * PI / gamma)))
}
