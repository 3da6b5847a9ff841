//! Supersmooth functions on ℝ^{m|n}.
//!
//! A [`SuperFunction`] is `Σ_a θ^a u_a(x)` with the monomial `θ^a` (ascending product)
//! to the left of its coefficient. Evaluation continues every `u_a` to even supernumber
//! arguments; odd derivatives are left derivatives.

pub mod body;
pub mod expr;
pub mod map;

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grassmann::{reorder_sign, Parity, Supernumber, C64, ONE};
pub use body::{BodyFunction, BodyRef, ExprFunction, FiniteDifference, TaylorOracle};
pub use expr::Expr;
pub use map::{ComponentMap, Composed, IdentityMap, InverseMap, SuperMapping};

/// A point `(x, θ)` of superspace: even coordinates with real bodies, odd coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct SuperPoint {
    pub x: Vec<Supernumber>,
    pub theta: Vec<Supernumber>,
}

impl SuperPoint {
    pub fn new(x: Vec<Supernumber>, theta: Vec<Supernumber>) -> Result<Self> {
        for (j, v) in x.iter().enumerate() {
            if v.parity() == Parity::Odd || v.parity() == Parity::Mixed {
                return Err(Error::Parity(format!("even coordinate x{} = {v} is not even", j + 1)));
            }
            if v.body().im != 0.0 {
                return Err(Error::Domain(format!("even coordinate x{} has a non-real body", j + 1)));
            }
        }
        for (k, v) in theta.iter().enumerate() {
            if !v.is_zero() && v.parity() != Parity::Odd {
                return Err(Error::Parity(format!("odd coordinate θ{} = {v} is not odd", k + 1)));
            }
        }
        Ok(SuperPoint { x, theta })
    }

    pub fn m(&self) -> usize {
        self.x.len()
    }

    pub fn n(&self) -> usize {
        self.theta.len()
    }

    pub fn num_generators(&self) -> u32 {
        self.x.iter().chain(&self.theta).map(|v| v.num_generators()).max().unwrap_or(0)
    }

    pub fn body(&self) -> Vec<f64> {
        self.x.iter().map(|v| v.body().re).collect()
    }

    /// Coordinate `A` counting even slots first.
    pub fn coord(&self, a: usize) -> &Supernumber {
        if a < self.m() {
            &self.x[a]
        } else {
            &self.theta[a - self.m()]
        }
    }

    pub fn coord_mut(&mut self, a: usize) -> &mut Supernumber {
        let m = self.m();
        if a < m {
            &mut self.x[a]
        } else {
            &mut self.theta[a - m]
        }
    }

    pub fn coords(&self) -> impl Iterator<Item = &Supernumber> {
        self.x.iter().chain(&self.theta)
    }

    pub fn max_diff(&self, o: &SuperPoint) -> f64 {
        self.coords().zip(o.coords()).map(|(a, b)| a.max_diff(b)).fold(0.0, f64::max)
    }
}

/// A derivative slot: even coordinate `x_j` or odd coordinate `θ_s` (0-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Slot {
    Even(usize),
    Odd(usize),
}

/// `Σ_a θ^a u_a(x)`; `coeffs[a]` is the coefficient of the ascending monomial `θ^a`.
#[derive(Clone)]
pub struct SuperFunction {
    m: usize,
    n: usize,
    coeffs: Vec<Option<BodyRef>>,
}

impl std::fmt::Debug for SuperFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let masks: Vec<usize> = self.support().collect();
        f.debug_struct("SuperFunction").field("m", &self.m).field("n", &self.n).field("support", &masks).finish()
    }
}

impl SuperFunction {
    pub fn zero(m: usize, n: usize) -> Self {
        SuperFunction { m, n, coeffs: vec![None; 1 << n] }
    }

    /// The continuation of a body function, independent of `θ`.
    pub fn even_body(n: usize, u: BodyRef) -> Self {
        let mut f = Self::zero(u.arity(), n);
        f.coeffs[0] = Some(u);
        f
    }

    /// Build from `(mask, coefficient)` pairs; bit `s` of the mask is `θ_{s+1}`.
    pub fn from_terms(m: usize, n: usize, terms: impl IntoIterator<Item = (usize, BodyRef)>) -> Result<Self> {
        let mut f = Self::zero(m, n);
        for (mask, u) in terms {
            if mask >= 1 << n {
                return Err(Error::ShapeMismatch(format!("mask {mask:#b} exceeds {n} odd variables")));
            }
            if u.arity() != m {
                return Err(Error::ShapeMismatch(format!("coefficient arity {} but m = {m}", u.arity())));
            }
            f.add_term(mask, u);
        }
        Ok(f)
    }

    /// Parse one expression per mask, variables `q1..qm`.
    pub fn from_exprs(m: usize, n: usize, terms: &[(usize, &str)]) -> Result<Self> {
        let mut list = Vec::with_capacity(terms.len());
        for (mask, text) in terms {
            list.push((*mask, ExprFunction::parse(text, m)?.shared()));
        }
        Self::from_terms(m, n, list)
    }

    fn add_term(&mut self, mask: usize, u: BodyRef) {
        self.coeffs[mask] = Some(match self.coeffs[mask].take() {
            None => u,
            Some(prev) => Arc::new(SumFunction(vec![(ONE, prev), (ONE, u)])),
        });
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coefficient(&self, mask: usize) -> Option<&BodyRef> {
        self.coeffs.get(mask).and_then(|c| c.as_ref())
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.coeffs.iter().enumerate().filter(|(_, c)| c.is_some()).map(|(a, _)| a)
    }

    /// Parity when all coefficients are ordinary scalar functions.
    pub fn parity(&self) -> Parity {
        let mut even = false;
        let mut odd = false;
        for a in self.support() {
            if a.count_ones() % 2 == 0 {
                even = true;
            } else {
                odd = true;
            }
        }
        match (even, odd) {
            (_, false) => Parity::Even,
            (false, true) => Parity::Odd,
            _ => Parity::Mixed,
        }
    }

    pub fn evaluate(&self, p: &SuperPoint) -> Result<Supernumber> {
        if p.m() != self.m || p.n() != self.n {
            return Err(Error::ShapeMismatch(format!("function on ({}|{}) evaluated at a ({}|{}) point", self.m, self.n, p.m(), p.n())));
        }
        let l = p.num_generators();
        let mut out = Supernumber::zero(l);
        for a in self.support() {
            let mut mono = Supernumber::one(l);
            for s in 0..self.n {
                if a >> s & 1 == 1 {
                    mono = &mono * &p.theta[s];
                }
            }
            if mono.is_zero() {
                continue;
            }
            let u = self.coeffs[a].as_ref().unwrap().continue_at(&p.x)?;
            out += &mono * &u;
        }
        Ok(out)
    }

    pub fn partial(&self, slot: Slot) -> Result<SuperFunction> {
        let mut out = Self::zero(self.m, self.n);
        match slot {
            Slot::Even(j) => {
                if j >= self.m {
                    return Err(Error::ShapeMismatch(format!("even slot {j} out of range")));
                }
                for a in self.support() {
                    out.coeffs[a] = Some(self.coeffs[a].as_ref().unwrap().derivative(j)?);
                }
            }
            Slot::Odd(s) => {
                if s >= self.n {
                    return Err(Error::ShapeMismatch(format!("odd slot {s} out of range")));
                }
                for a in self.support() {
                    if a >> s & 1 == 0 {
                        continue;
                    }
                    let u = self.coeffs[a].clone().unwrap();
                    let below = (a & ((1 << s) - 1)).count_ones();
                    let u = if below % 2 == 1 { scaled(u, -ONE) } else { u };
                    out.coeffs[a & !(1 << s)] = Some(u);
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: C64) -> SuperFunction {
        SuperFunction { m: self.m, n: self.n, coeffs: self.coeffs.iter().map(|u| u.clone().map(|u| scaled(u, c))).collect() }
    }

    pub fn add(&self, o: &SuperFunction) -> Result<SuperFunction> {
        self.check_shape(o)?;
        let mut out = self.clone();
        for a in o.support() {
            out.add_term(a, o.coeffs[a].clone().unwrap());
        }
        Ok(out)
    }

    pub fn sub(&self, o: &SuperFunction) -> Result<SuperFunction> {
        self.add(&o.scale(-ONE))
    }

    /// `(Σθ^a u_a)(Σθ^b v_b) = Σ ±θ^{a∪b} u_a v_b` over disjoint `a`, `b`.
    pub fn mul(&self, o: &SuperFunction) -> Result<SuperFunction> {
        self.check_shape(o)?;
        let mut out = Self::zero(self.m, self.n);
        for a in self.support() {
            for b in o.support() {
                if a & b != 0 {
                    continue;
                }
                let sign = if reorder_sign(a as u32, b as u32) { -ONE } else { ONE };
                let u = self.coeffs[a].clone().unwrap();
                let v = o.coeffs[b].clone().unwrap();
                out.add_term(a | b, Arc::new(ProductFunction { factors: vec![u, v], c: sign }));
            }
        }
        Ok(out)
    }

    fn check_shape(&self, o: &SuperFunction) -> Result<()> {
        if (self.m, self.n) != (o.m, o.n) {
            return Err(Error::ShapeMismatch(format!("({}|{}) against ({}|{})", self.m, self.n, o.m, o.n)));
        }
        Ok(())
    }

    /// Cauchy–Riemann residual of this function; see [`cr_residual`].
    pub fn cr_residual(&self, samples: &[SuperPoint], max_degree: u32) -> Result<f64> {
        cr_residual(&|p: &SuperPoint| self.evaluate(p), samples, max_degree)
    }
}

fn scaled(u: BodyRef, c: C64) -> BodyRef {
    Arc::new(SumFunction(vec![(c, u)]))
}

/// `Σ c_k u_k`.
struct SumFunction(Vec<(C64, BodyRef)>);

impl BodyFunction for SumFunction {
    fn arity(&self) -> usize {
        self.0[0].1.arity()
    }

    fn value(&self, q: &[f64]) -> Result<C64> {
        self.0.iter().try_fold(C64::new(0.0, 0.0), |acc, (c, u)| Ok(acc + c * u.value(q)?))
    }

    fn continue_at(&self, x: &[Supernumber]) -> Result<Supernumber> {
        let l = x.iter().map(|v| v.num_generators()).max().unwrap_or(0);
        self.0.iter().try_fold(Supernumber::zero(l), |acc, (c, u)| Ok(acc + u.continue_at(x)?.scale(*c)))
    }

    fn derivative(&self, j: usize) -> Result<BodyRef> {
        let terms = self.0.iter().map(|(c, u)| Ok((*c, u.derivative(j)?))).collect::<Result<Vec<_>>>()?;
        Ok(Arc::new(SumFunction(terms)))
    }
}

/// `c Π u_k`.
struct ProductFunction {
    factors: Vec<BodyRef>,
    c: C64,
}

impl BodyFunction for ProductFunction {
    fn arity(&self) -> usize {
        self.factors[0].arity()
    }

    fn value(&self, q: &[f64]) -> Result<C64> {
        self.factors.iter().try_fold(self.c, |acc, u| Ok(acc * u.value(q)?))
    }

    fn continue_at(&self, x: &[Supernumber]) -> Result<Supernumber> {
        let l = x.iter().map(|v| v.num_generators()).max().unwrap_or(0);
        self.factors.iter().try_fold(Supernumber::scalar(l, self.c), |acc, u| Ok(acc * u.continue_at(x)?))
    }

    fn derivative(&self, j: usize) -> Result<BodyRef> {
        let mut terms = Vec::with_capacity(self.factors.len());
        for k in 0..self.factors.len() {
            let mut factors = self.factors.clone();
            factors[k] = factors[k].derivative(j)?;
            terms.push((ONE, Arc::new(ProductFunction { factors, c: self.c }) as BodyRef));
        }
        Ok(Arc::new(SumFunction(terms)))
    }
}

/// Real directional derivative of `f` at `p` along `σ^I` in coordinate `A`, by a
/// fourth-order central difference with step `1e-3`.
fn coefficient_derivative(f: &dyn Fn(&SuperPoint) -> Result<Supernumber>, p: &SuperPoint, a: usize, mask: u32) -> Result<Supernumber> {
    const H: f64 = 1e-3;
    let l = p.num_generators();
    let dir = Supernumber::monomial(l, mask, ONE)?;
    let at = |t: f64| -> Result<Supernumber> {
        let mut q = p.clone();
        let v = q.coord(a) + &dir.scale(t);
        *q.coord_mut(a) = v;
        f(&q)
    };
    let (p1, m1, p2, m2) = (at(H)?, at(-H)?, at(2.0 * H)?, at(-2.0 * H)?);
    Ok(((p1 - m1).scale(8.0) - (p2 - m2)).scale(1.0 / (12.0 * H)))
}

/// Maximum violation of the Cauchy–Riemann relations of a Λ-valued function on superspace:
///
/// * even `A`, nonempty even `I`: `∂_{A,I} f = σ^I ∂_{A,∅} f`
/// * odd `A`, odd `J ≠ K`: `σ^K ∂_{A,J} f + σ^J ∂_{A,K} f = 0`
///
/// where `∂_{A,I}` differentiates along the real coefficient of `σ^I` in `X_A`. Index sets
/// run over subsets of the generators with at most `max_degree` elements.
pub fn cr_residual(f: &dyn Fn(&SuperPoint) -> Result<Supernumber>, samples: &[SuperPoint], max_degree: u32) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for p in samples {
        let l = p.num_generators();
        let masks: Vec<u32> = (1u32..(1u32 << l.min(16))).filter(|m| m.count_ones() <= max_degree).collect();
        let even_masks: Vec<u32> = masks.iter().copied().filter(|m| m.count_ones() % 2 == 0).collect();
        let odd_masks: Vec<u32> = masks.iter().copied().filter(|m| m.count_ones() % 2 == 1).collect();
        for a in 0..p.m() {
            let d0 = coefficient_derivative(f, p, a, 0)?;
            for &i in &even_masks {
                let di = coefficient_derivative(f, p, a, i)?;
                let rhs = Supernumber::monomial(l, i, ONE)? * &d0;
                worst = worst.max(di.max_diff(&rhs));
            }
        }
        for a in p.m()..p.m() + p.n() {
            let ds: Vec<Supernumber> = odd_masks.iter().map(|&j| coefficient_derivative(f, p, a, j)).collect::<Result<_>>()?;
            for (x, &j) in odd_masks.iter().enumerate() {
                for (y, &k) in odd_masks.iter().enumerate().skip(x + 1) {
                    let lhs = Supernumber::monomial(l, k, ONE)? * &ds[x] + Supernumber::monomial(l, j, ONE)? * &ds[y];
                    worst = worst.max(lhs.max_abs());
                }
            }
        }
    }
    Ok(worst)
}

/// A random point with real bodies in `[-1, 1]` (shifted by `centre`) and random souls.
pub fn random_point<R: rand::Rng + ?Sized>(rng: &mut R, centre: &[f64], n: usize, l: u32) -> SuperPoint {
    use crate::grassmann::random_supernumber;
    let x = centre
        .iter()
        .map(|c| {
            let s = random_supernumber(rng, l, Some(Parity::Even), 0.3).soul();
            s.add_scalar(c + rng.random_range(-1.0..1.0))
        })
        .collect();
    let theta = (0..n).map(|_| random_supernumber(rng, l, Some(Parity::Odd), 0.3)).collect();
    SuperPoint { x, theta }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grassmann::Analytic;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sn(l: u32, mask: u32, c: f64) -> Supernumber {
        Supernumber::monomial(l, mask, c).unwrap()
    }

    #[test]
    fn evaluate_examples() {
        let f = SuperFunction::from_exprs(1, 0, &[(0, "q^2")]).unwrap();
        let p = SuperPoint::new(vec![Supernumber::one(2) + sn(2, 0b11, 1.0)], vec![]).unwrap();
        assert_eq!(f.evaluate(&p).unwrap(), Supernumber::one(2) + sn(2, 0b11, 2.0));

        let g = SuperFunction::from_exprs(1, 2, &[(0b11, "1")]).unwrap();
        let p = SuperPoint::new(vec![Supernumber::scalar(2, 0.3)], vec![sn(2, 1, 1.0), sn(2, 2, 1.0)]).unwrap();
        assert_eq!(g.evaluate(&p).unwrap(), sn(2, 0b11, 1.0));

        let h = SuperFunction::from_exprs(1, 0, &[(0, "sin(q)")]).unwrap();
        let x = Supernumber::scalar(2, std::f64::consts::FRAC_PI_2) + sn(2, 0b11, 1.0);
        let p = SuperPoint::new(vec![x.clone()], vec![]).unwrap();
        let via_analytic = x.apply(&Analytic::Sin).unwrap();
        assert!(h.evaluate(&p).unwrap().max_diff(&via_analytic) < 1e-15);
        assert!(via_analytic.max_diff(&Supernumber::one(2)) < 1e-15);
    }

    #[test]
    fn coefficient_sits_right_of_monomial() {
        // θ₁ u with u = 1 + σ-soul: evaluation must equal θ₁ * ũ, not ũ * θ₁ (equal here as ũ is even).
        let f = SuperFunction::from_exprs(1, 1, &[(1, "q")]).unwrap();
        let l = 3;
        let p = SuperPoint::new(vec![Supernumber::scalar(l, 2.0) + sn(l, 0b110, 1.0)], vec![sn(l, 1, 1.0)]).unwrap();
        let expected = sn(l, 1, 1.0) * (Supernumber::scalar(l, 2.0) + sn(l, 0b110, 1.0));
        assert_eq!(f.evaluate(&p).unwrap(), expected);
    }

    #[test]
    fn partial_examples() {
        let f = SuperFunction::from_exprs(1, 2, &[(0b11, "cos(q)")]).unwrap();
        let d1 = f.partial(Slot::Odd(0)).unwrap();
        let d2 = f.partial(Slot::Odd(1)).unwrap();
        let q = [0.4];
        assert_eq!(d1.support().collect::<Vec<_>>(), vec![0b10]);
        assert!((d1.coefficient(0b10).unwrap().value(&q).unwrap() - C64::new(0.4f64.cos(), 0.0)).norm() < 1e-15);
        assert_eq!(d2.support().collect::<Vec<_>>(), vec![0b01]);
        assert!((d2.coefficient(0b01).unwrap().value(&q).unwrap() + C64::new(0.4f64.cos(), 0.0)).norm() < 1e-15);

        let sq = SuperFunction::from_exprs(1, 0, &[(0, "q1^2")]).unwrap();
        let d = sq.partial(Slot::Even(0)).unwrap();
        assert!((d.coefficient(0).unwrap().value(&[3.0]).unwrap() - C64::new(6.0, 0.0)).norm() < 1e-14);
    }

    fn sample_function() -> SuperFunction {
        SuperFunction::from_exprs(2, 3, &[(0, "sin(q1)*q2"), (0b011, "exp(q1)"), (0b101, "q1*q2^2"), (0b110, "cos(q2)"), (0b111, "q1"), (0b001, "q2")]).unwrap()
    }

    #[test]
    fn odd_partials_anticommute_and_square_to_zero() {
        let f = sample_function();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let pts: Vec<SuperPoint> = (0..5).map(|_| random_point(&mut rng, &[0.0, 0.5], 3, 6)).collect();
        for s in 0..3 {
            let dd = f.partial(Slot::Odd(s)).unwrap().partial(Slot::Odd(s)).unwrap();
            assert_eq!(dd.support().count(), 0);
            for t in 0..3 {
                let st = f.partial(Slot::Odd(t)).unwrap().partial(Slot::Odd(s)).unwrap();
                let ts = f.partial(Slot::Odd(s)).unwrap().partial(Slot::Odd(t)).unwrap();
                let sum = st.add(&ts).unwrap();
                for p in &pts {
                    assert!(sum.evaluate(p).unwrap().max_abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn leibniz_rule() {
        let f = sample_function();
        let g = SuperFunction::from_exprs(2, 3, &[(0b001, "q1+q2"), (0b010, "exp(q2)"), (0, "q1^2")]).unwrap();
        let fg = f.mul(&g).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let pts: Vec<SuperPoint> = (0..5).map(|_| random_point(&mut rng, &[0.0, 0.5], 3, 6)).collect();
        // g is odd-plus-even; check on its homogeneous odd part for the graded rule.
        let g_odd = SuperFunction::from_exprs(2, 3, &[(0b001, "q1+q2"), (0b010, "exp(q2)")]).unwrap();
        let fg_odd = f.mul(&g_odd).unwrap();
        for p in &pts {
            for j in 0..2 {
                let lhs = fg.partial(Slot::Even(j)).unwrap().evaluate(p).unwrap();
                let rhs = f.partial(Slot::Even(j)).unwrap().mul(&g).unwrap().add(&f.mul(&g.partial(Slot::Even(j)).unwrap()).unwrap()).unwrap().evaluate(p).unwrap();
                assert!(lhs.max_diff(&rhs) < 1e-12);
            }
            // ∂_θ(f g) = (∂_θ f) g + (-1)^{p(f)} f ∂_θ g, applied per homogeneous part of f.
            let f_even = SuperFunction::from_exprs(2, 3, &[(0, "sin(q1)*q2"), (0b011, "exp(q1)"), (0b101, "q1*q2^2"), (0b110, "cos(q2)")]).unwrap();
            let f_odd = f.sub(&f_even).unwrap();
            for s in 0..3 {
                let lhs = fg_odd.partial(Slot::Odd(s)).unwrap().evaluate(p).unwrap();
                let even_part = f_even.partial(Slot::Odd(s)).unwrap().mul(&g_odd).unwrap().add(&f_even.mul(&g_odd.partial(Slot::Odd(s)).unwrap()).unwrap()).unwrap();
                let odd_part = f_odd.partial(Slot::Odd(s)).unwrap().mul(&g_odd).unwrap().sub(&f_odd.mul(&g_odd.partial(Slot::Odd(s)).unwrap()).unwrap()).unwrap();
                let rhs = even_part.add(&odd_part).unwrap().evaluate(p).unwrap();
                assert!(lhs.max_diff(&rhs) < 1e-12);
            }
        }
    }

    #[test]
    fn even_partial_commutes_with_continuation() {
        let f = SuperFunction::from_exprs(1, 0, &[(0, "exp(q)*sin(q)")]).unwrap();
        let df = f.partial(Slot::Even(0)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let p = random_point(&mut rng, &[0.2], 0, 6);
            // derivative of the continuation along the body direction equals continued derivative
            let h = 1e-4;
            let shift = |t: f64| SuperPoint { x: vec![p.x[0].add_scalar(t)], theta: vec![] };
            let fd = (f.evaluate(&shift(h)).unwrap() - f.evaluate(&shift(-h)).unwrap()).scale(1.0 / (2.0 * h));
            assert!(fd.max_diff(&df.evaluate(&p).unwrap()) < 1e-6);
        }
    }

    #[test]
    fn cr_residual_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let pts: Vec<SuperPoint> = (0..3).map(|_| random_point(&mut rng, &[0.5], 2, 4)).collect();
        let sq = SuperFunction::from_exprs(1, 2, &[(0, "q^2")]).unwrap();
        assert!(sq.cr_residual(&pts, 2).unwrap() < 1e-8);
        let th = SuperFunction::from_exprs(1, 2, &[(0b01, "sin(q)")]).unwrap();
        assert!(th.cr_residual(&pts, 2).unwrap() < 1e-8);
        assert!(sample_function().cr_residual(&[random_point(&mut rng, &[0.0, 0.5], 3, 4)], 2).unwrap() < 1e-8);
        let tweak = |p: &SuperPoint| -> Result<Supernumber> {
            let l = p.num_generators();
            let base = sq.evaluate(p)?;
            Ok(base.add_scalar(p.x[0].coeff(0b11).re).embed(l))
        };
        assert!(cr_residual(&tweak, &pts, 2).unwrap() > 0.1);
    }

    #[test]
    fn uniqueness_of_continuation() {
        // A body function vanishing identically (written non-trivially) continues to zero.
        let f = SuperFunction::from_exprs(1, 2, &[(0, "sin(q)^2 + cos(q)^2 - 1"), (0b11, "exp(q) - exp(q)")]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..10 {
            let p = random_point(&mut rng, &[0.3], 2, 6);
            assert!(f.evaluate(&p).unwrap().max_abs() < 1e-13);
        }
    }

    #[test]
    fn polynomial_taylor_is_exact() {
        let f = SuperFunction::from_exprs(2, 0, &[(0, "q1^3*q2 - 2*q2^2")]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let p = random_point(&mut rng, &[0.0, 0.0], 0, 8);
        let (x, y) = (&p.x[0], &p.x[1]);
        let direct = x.powi(3) * y - y.powi(2).scale(2.0);
        assert!(f.evaluate(&p).unwrap().max_diff(&direct) < 1e-13);
    }

    #[test]
    fn point_validation() {
        assert!(SuperPoint::new(vec![sn(2, 1, 1.0)], vec![]).is_err());
        assert!(SuperPoint::new(vec![Supernumber::scalar(2, C64::new(0.0, 1.0))], vec![]).is_err());
        assert!(SuperPoint::new(vec![], vec![Supernumber::one(2)]).is_err());
    }

    #[test]
    fn concurrent_evaluation() {
        let f = Arc::new(sample_function());
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let p = random_point(&mut rng, &[0.0, 0.5], 3, 6);
        let expected = f.evaluate(&p).unwrap();
        let handles: Vec<_> = (0..4)
            .map(|_| {
                let f = Arc::clone(&f);
                let p = p.clone();
                std::thread::spawn(move || f.evaluate(&p).unwrap())
            })
            .collect();
        for h in handles {
            assert_eq!(h.join().unwrap(), expected);
        }
    }
}
