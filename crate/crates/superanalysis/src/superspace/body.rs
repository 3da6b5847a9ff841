//! Body coefficient functions and their Grassmann continuations.
//!
//! Three oracles: symbolic expressions (exact, any order), user closures giving mixed
//! partials, and central finite differences (order at most 4).

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grassmann::{Supernumber, C64};
use crate::superspace::expr::Expr;

/// A smooth function of `m` real variables that can be continued to even supernumbers.
pub trait BodyFunction: Send + Sync {
    fn arity(&self) -> usize;
    fn value(&self, q: &[f64]) -> Result<C64>;
    /// Continuation `f̃(x) = Σ_α ∂^α f(x_B) x_S^α / α!`.
    fn continue_at(&self, x: &[Supernumber]) -> Result<Supernumber>;
    fn derivative(&self, j: usize) -> Result<Arc<dyn BodyFunction>>;
}

pub type BodyRef = Arc<dyn BodyFunction>;

#[derive(Clone, Debug)]
pub struct ExprFunction {
    pub expr: Expr,
    pub arity: usize,
}

impl ExprFunction {
    pub fn new(expr: Expr, arity: usize) -> Self {
        ExprFunction { expr, arity }
    }

    pub fn parse(text: &str, arity: usize) -> Result<Self> {
        let expr = Expr::parse(text)?;
        if expr.arity() > arity {
            return Err(Error::Parse(format!("'{text}' uses q{} but only {arity} variables exist", expr.arity())));
        }
        Ok(ExprFunction { expr, arity })
    }

    pub fn shared(self) -> BodyRef {
        Arc::new(self)
    }
}

impl BodyFunction for ExprFunction {
    fn arity(&self) -> usize {
        self.arity
    }

    fn value(&self, q: &[f64]) -> Result<C64> {
        self.expr.eval_real(q)
    }

    fn continue_at(&self, x: &[Supernumber]) -> Result<Supernumber> {
        self.expr.eval_super(x)
    }

    fn derivative(&self, j: usize) -> Result<BodyRef> {
        Ok(Arc::new(ExprFunction { expr: self.expr.diff(j), arity: self.arity }))
    }
}

/// Soul powers of each argument, `pows[j][k] = (x_j)_S^k`, stopping at the first zero.
fn soul_powers(x: &[Supernumber]) -> Vec<Vec<Supernumber>> {
    x.iter()
        .map(|xj| {
            let s = xj.soul();
            let mut v = vec![Supernumber::one(xj.num_generators())];
            loop {
                let next = v.last().unwrap() * &s;
                if next.is_zero() {
                    break;
                }
                v.push(next);
            }
            v
        })
        .collect()
}

/// Highest total derivative order a continuation at `x` can consume.
pub fn needed_order(x: &[Supernumber]) -> usize {
    soul_powers(x).iter().map(|p| p.len() - 1).sum()
}

/// Multivariate Taylor continuation given mixed partials at the body point.
pub fn taylor_continue(x: &[Supernumber], partial: &dyn Fn(&[f64], &[usize]) -> Result<C64>) -> Result<Supernumber> {
    let l = x.iter().map(|v| v.num_generators()).max().unwrap_or(0);
    let body: Vec<f64> = x.iter().map(|v| v.body().re).collect();
    let pows = soul_powers(x);
    let mut out = Supernumber::zero(l);
    let mut alpha = vec![0usize; x.len()];
    fn rec(
        j: usize,
        alpha: &mut Vec<usize>,
        acc: Supernumber,
        fact: f64,
        pows: &[Vec<Supernumber>],
        body: &[f64],
        partial: &dyn Fn(&[f64], &[usize]) -> Result<C64>,
        out: &mut Supernumber,
    ) -> Result<()> {
        if acc.is_zero() {
            return Ok(());
        }
        if j == pows.len() {
            let d = partial(body, alpha)?;
            *out += &acc.scale(d / fact);
            return Ok(());
        }
        for k in 0..pows[j].len() {
            alpha[j] = k;
            let f = fact * (1..=k).product::<usize>() as f64;
            rec(j + 1, alpha, &acc * &pows[j][k], f, pows, body, partial, out)?;
        }
        alpha[j] = 0;
        Ok(())
    }
    rec(0, &mut alpha, Supernumber::one(l), 1.0, &pows, &body, partial, &mut out)?;
    Ok(out)
}

type PartialFn = dyn Fn(&[f64], &[usize]) -> Result<C64> + Send + Sync;

/// A closure returning mixed partials `∂^α f(q)` up to a declared total order.
#[derive(Clone)]
pub struct TaylorOracle {
    arity: usize,
    max_order: usize,
    partial: Arc<PartialFn>,
    shift: Vec<usize>,
}

impl TaylorOracle {
    pub fn new(arity: usize, max_order: usize, partial: impl Fn(&[f64], &[usize]) -> Result<C64> + Send + Sync + 'static) -> Self {
        TaylorOracle { arity, max_order, partial: Arc::new(partial), shift: vec![0; arity] }
    }

    fn eval_partial(&self, q: &[f64], alpha: &[usize]) -> Result<C64> {
        let a: Vec<usize> = alpha.iter().zip(&self.shift).map(|(x, y)| x + y).collect();
        let order: usize = a.iter().sum();
        if order > self.max_order {
            return Err(Error::InsufficientOracle { needed: order, available: self.max_order });
        }
        (self.partial)(q, &a)
    }
}

impl BodyFunction for TaylorOracle {
    fn arity(&self) -> usize {
        self.arity
    }

    fn value(&self, q: &[f64]) -> Result<C64> {
        self.eval_partial(q, &vec![0; self.arity])
    }

    fn continue_at(&self, x: &[Supernumber]) -> Result<Supernumber> {
        taylor_continue(x, &|q, a| self.eval_partial(q, a))
    }

    fn derivative(&self, j: usize) -> Result<BodyRef> {
        let mut d = self.clone();
        d.shift[j] += 1;
        Ok(Arc::new(d))
    }
}

type ValueFn = dyn Fn(&[f64]) -> C64 + Send + Sync;

/// Fourth-order central differences of a plain value callback; legal up to total order 4.
#[derive(Clone)]
pub struct FiniteDifference {
    arity: usize,
    f: Arc<ValueFn>,
    shift: Vec<usize>,
}

pub const FD_MAX_ORDER: usize = 4;

/// Offsets and weights of 4th-order accurate central stencils for derivative orders 1..=4.
fn stencil(order: usize) -> (&'static [i32], &'static [f64], f64) {
    const O5: [i32; 5] = [-2, -1, 0, 1, 2];
    const O7: [i32; 7] = [-3, -2, -1, 0, 1, 2, 3];
    const D1: [f64; 5] = [1.0, -8.0, 0.0, 8.0, -1.0];
    const D2: [f64; 5] = [-1.0, 16.0, -30.0, 16.0, -1.0];
    const D3: [f64; 7] = [1.0, -8.0, 13.0, 0.0, -13.0, 8.0, -1.0];
    const D4: [f64; 7] = [-1.0, 12.0, -39.0, 56.0, -39.0, 12.0, -1.0];
    match order {
        1 => (&O5, &D1, 12.0),
        2 => (&O5, &D2, 12.0),
        3 => (&O7, &D3, 8.0),
        4 => (&O7, &D4, 6.0),
        _ => unreachable!(),
    }
}

impl FiniteDifference {
    pub fn new(arity: usize, f: impl Fn(&[f64]) -> C64 + Send + Sync + 'static) -> Self {
        FiniteDifference { arity, f: Arc::new(f), shift: vec![0; arity] }
    }

    /// Step along one axis at `q` for a mixed partial of total order `k`: `1e-5` for first
    /// derivatives, growing with `k` so that rounding does not swamp the stencil.
    pub fn step(k: usize, q: f64) -> f64 {
        let base = match k {
            0 | 1 => 1e-5,
            2 => 1e-3,
            3 => 4e-3,
            _ => 1e-2,
        };
        base * q.abs().max(1.0)
    }

    fn mixed(&self, q: &[f64], alpha: &[usize]) -> Result<C64> {
        let order: usize = alpha.iter().sum();
        if order > FD_MAX_ORDER {
            return Err(Error::InsufficientOracle { needed: order, available: FD_MAX_ORDER });
        }
        Ok(self.apply_axes(q, alpha, 0, order))
    }

    fn apply_axes(&self, q: &[f64], alpha: &[usize], axis: usize, total: usize) -> C64 {
        if axis == alpha.len() {
            return (self.f)(q);
        }
        let k = alpha[axis];
        if k == 0 {
            return self.apply_axes(q, alpha, axis + 1, total);
        }
        let (offs, w, denom) = stencil(k);
        let h = Self::step(total, q[axis]);
        let mut p = q.to_vec();
        let mut acc = C64::new(0.0, 0.0);
        for (o, c) in offs.iter().zip(w) {
            if *c == 0.0 {
                continue;
            }
            p[axis] = q[axis] + *o as f64 * h;
            acc += self.apply_axes(&p, alpha, axis + 1, total) * *c;
        }
        acc / (denom * h.powi(k as i32))
    }
}

impl BodyFunction for FiniteDifference {
    fn arity(&self) -> usize {
        self.arity
    }

    fn value(&self, q: &[f64]) -> Result<C64> {
        self.mixed(q, &self.shift)
    }

    fn continue_at(&self, x: &[Supernumber]) -> Result<Supernumber> {
        let needed = needed_order(x) + self.shift.iter().sum::<usize>();
        if needed > FD_MAX_ORDER {
            return Err(Error::InsufficientOracle { needed, available: FD_MAX_ORDER });
        }
        taylor_continue(x, &|q, a| {
            let total: Vec<usize> = a.iter().zip(&self.shift).map(|(x, y)| x + y).collect();
            self.mixed(q, &total)
        })
    }

    fn derivative(&self, j: usize) -> Result<BodyRef> {
        let mut d = self.clone();
        d.shift[j] += 1;
        Ok(Arc::new(d))
    }
}
