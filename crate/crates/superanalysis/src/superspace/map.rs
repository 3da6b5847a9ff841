//! Supersmooth mappings `ℝ^{m|n} → ℝ^{p|q}`, their composition and inversion.
//!
//! Jacobians use the row convention `J_{ij} = ∂_{Y_i} φ_j`, so that the chain rule reads
//! `J(g∘f) = J(f) · J(g)|_f` and a variation propagates as `dφ = dY · J`.

use std::sync::Arc;

use super::{SuperFunction, SuperPoint, Slot};
use crate::error::{Error, Result};
use crate::grassmann::{Parity, Supernumber};
use crate::superlinalg::{MatrixParity, Supermatrix};

pub trait SuperMapping: Send + Sync {
    fn source(&self) -> (usize, usize);
    fn target(&self) -> (usize, usize);
    fn apply(&self, p: &SuperPoint) -> Result<SuperPoint>;
    fn jacobian(&self, p: &SuperPoint) -> Result<Supermatrix>;
}

fn check_source(map: &dyn SuperMapping, p: &SuperPoint) -> Result<()> {
    if (p.m(), p.n()) != map.source() {
        let (m, n) = map.source();
        return Err(Error::ShapeMismatch(format!("map on ({m}|{n}) applied to a ({}|{}) point", p.m(), p.n())));
    }
    Ok(())
}

/// A mapping given by component superfunctions, even components first.
#[derive(Clone, Debug)]
pub struct ComponentMap {
    source: (usize, usize),
    target: (usize, usize),
    components: Vec<SuperFunction>,
    /// `partials[i][j] = ∂_{Y_i} φ_j`.
    partials: Vec<Vec<SuperFunction>>,
}

impl ComponentMap {
    pub fn new(even: Vec<SuperFunction>, odd: Vec<SuperFunction>) -> Result<Self> {
        let first = even.first().or(odd.first()).ok_or_else(|| Error::ShapeMismatch("map without components".into()))?;
        let source = (first.m(), first.n());
        for (k, f) in even.iter().enumerate() {
            if f.parity() != Parity::Even {
                return Err(Error::Parity(format!("even component {} is not even", k + 1)));
            }
        }
        for (k, f) in odd.iter().enumerate() {
            if f.parity() != Parity::Odd && f.support().count() > 0 {
                return Err(Error::Parity(format!("odd component {} is not odd", k + 1)));
            }
        }
        let target = (even.len(), odd.len());
        let components: Vec<SuperFunction> = even.into_iter().chain(odd).collect();
        if components.iter().any(|f| (f.m(), f.n()) != source) {
            return Err(Error::ShapeMismatch("components live on different superspaces".into()));
        }
        let slots: Vec<Slot> = (0..source.0).map(Slot::Even).chain((0..source.1).map(Slot::Odd)).collect();
        let partials = slots.iter().map(|&s| components.iter().map(|f| f.partial(s)).collect::<Result<Vec<_>>>()).collect::<Result<Vec<_>>>()?;
        Ok(ComponentMap { source, target, components, partials })
    }

    pub fn components(&self) -> &[SuperFunction] {
        &self.components
    }
}

impl SuperMapping for ComponentMap {
    fn source(&self) -> (usize, usize) {
        self.source
    }

    fn target(&self) -> (usize, usize) {
        self.target
    }

    fn apply(&self, p: &SuperPoint) -> Result<SuperPoint> {
        check_source(self, p)?;
        let vals = self.components.iter().map(|f| f.evaluate(p)).collect::<Result<Vec<_>>>()?;
        let (x, theta) = vals.split_at(self.target.0);
        Ok(SuperPoint { x: x.to_vec(), theta: theta.to_vec() })
    }

    fn jacobian(&self, p: &SuperPoint) -> Result<Supermatrix> {
        check_source(self, p)?;
        let entries = self.partials.iter().flatten().map(|f| f.evaluate(p)).collect::<Result<Vec<_>>>()?;
        Supermatrix::new(self.source.0, self.source.1, self.target.0, self.target.1, MatrixParity::Even, entries)
    }
}

/// `outer ∘ inner`.
#[derive(Clone)]
pub struct Composed {
    outer: Arc<dyn SuperMapping>,
    inner: Arc<dyn SuperMapping>,
}

impl Composed {
    pub fn new(outer: Arc<dyn SuperMapping>, inner: Arc<dyn SuperMapping>) -> Result<Self> {
        if inner.target() != outer.source() {
            return Err(Error::ShapeMismatch(format!("inner target {:?} differs from outer source {:?}", inner.target(), outer.source())));
        }
        Ok(Composed { outer, inner })
    }
}

impl SuperMapping for Composed {
    fn source(&self) -> (usize, usize) {
        self.inner.source()
    }

    fn target(&self) -> (usize, usize) {
        self.outer.target()
    }

    fn apply(&self, p: &SuperPoint) -> Result<SuperPoint> {
        self.outer.apply(&self.inner.apply(p)?)
    }

    fn jacobian(&self, p: &SuperPoint) -> Result<Supermatrix> {
        let q = self.inner.apply(p)?;
        self.inner.jacobian(p)?.mul(&self.outer.jacobian(&q)?)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct IdentityMap {
    pub m: usize,
    pub n: usize,
}

impl SuperMapping for IdentityMap {
    fn source(&self) -> (usize, usize) {
        (self.m, self.n)
    }

    fn target(&self) -> (usize, usize) {
        (self.m, self.n)
    }

    fn apply(&self, p: &SuperPoint) -> Result<SuperPoint> {
        check_source(self, p)?;
        Ok(p.clone())
    }

    fn jacobian(&self, p: &SuperPoint) -> Result<Supermatrix> {
        check_source(self, p)?;
        Ok(Supermatrix::identity(self.m, self.n, p.num_generators()))
    }
}

pub type BodyInverse = Arc<dyn Fn(&[f64]) -> Result<Vec<f64>> + Send + Sync>;

/// Inverse of a square mapping. Evaluation starts from the classical inverse of the body
/// map and runs Newton's method in Λ, which fixes one more soul degree per step and
/// polishes the body quadratically.
#[derive(Clone)]
pub struct InverseMap {
    forward: Arc<dyn SuperMapping>,
    body_inverse: BodyInverse,
}

impl InverseMap {
    pub fn new(forward: Arc<dyn SuperMapping>, body_inverse: BodyInverse) -> Result<Self> {
        if forward.source() != forward.target() {
            return Err(Error::ShapeMismatch("only maps (m|n) → (m|n) can be inverted".into()));
        }
        Ok(InverseMap { forward, body_inverse })
    }
}

impl SuperMapping for InverseMap {
    fn source(&self) -> (usize, usize) {
        self.forward.target()
    }

    fn target(&self) -> (usize, usize) {
        self.forward.source()
    }

    fn apply(&self, p: &SuperPoint) -> Result<SuperPoint> {
        check_source(self, p)?;
        let l = p.num_generators();
        let body = (self.body_inverse)(&p.body())?;
        if body.len() != p.m() {
            return Err(Error::ShapeMismatch("body inverse returned the wrong dimension".into()));
        }
        let mut y = SuperPoint { x: body.iter().map(|&b| Supernumber::scalar(l, b)).collect(), theta: vec![Supernumber::zero(l); p.n()] };
        let size = p.m() + p.n();
        let scale = 1.0 + p.coords().map(|c| c.max_abs()).fold(0.0, f64::max);
        for _ in 0..(l as usize + 60) {
            let fy = self.forward.apply(&y)?;
            let resid: Vec<Supernumber> = fy.coords().zip(p.coords()).map(|(a, b)| (a - b).embed(l)).collect();
            let rmax = resid.iter().map(|r| r.max_abs()).fold(0.0, f64::max);
            if rmax <= 1e-14 * scale {
                return Ok(y);
            }
            let jinv = self.forward.jacobian(&y)?.inverse()?;
            for i in 0..size {
                let mut d = Supernumber::zero(l);
                for (j, r) in resid.iter().enumerate() {
                    if !r.is_zero() {
                        d += r * jinv.get(j, i);
                    }
                }
                let c = y.coord(i) - &d;
                *y.coord_mut(i) = c;
            }
        }
        Err(Error::NoConvergence("Newton iteration for the inverse map".into()))
    }

    fn jacobian(&self, p: &SuperPoint) -> Result<Supermatrix> {
        let y = self.apply(p)?;
        self.forward.jacobian(&y)?.inverse()
    }
}
