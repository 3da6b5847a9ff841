//! Ordinary differential operators with polynomial coefficients, and the factorization
//! `A = d/dq + φ` behind a one-dimensional SUSY pair.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::Serialize;

/// Real polynomial, coefficients in ascending powers with trailing zeros trimmed.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Poly(Vec<f64>);

impl Poly {
    pub fn new(mut c: Vec<f64>) -> Self {
        while c.last() == Some(&0.0) {
            c.pop();
        }
        Poly(c)
    }

    pub fn zero() -> Self {
        Poly(vec![])
    }

    pub fn constant(c: f64) -> Self {
        Poly::new(vec![c])
    }

    /// `q`.
    pub fn q() -> Self {
        Poly(vec![0.0, 1.0])
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn eval(&self, q: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, c| acc * q + c)
    }

    pub fn deriv(&self) -> Poly {
        Poly::new(self.0.iter().enumerate().skip(1).map(|(k, c)| k as f64 * c).collect())
    }

    pub fn antideriv(&self) -> Poly {
        let mut c = vec![0.0];
        c.extend(self.0.iter().enumerate().map(|(k, c)| c / (k + 1) as f64));
        Poly::new(c)
    }

    pub fn scale(&self, s: f64) -> Poly {
        Poly::new(self.0.iter().map(|c| c * s).collect())
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let n = self.0.len().max(o.0.len());
        Poly::new((0..n).map(|k| self.0.get(k).unwrap_or(&0.0) + o.0.get(k).unwrap_or(&0.0)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        self + &o.scale(-1.0)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![0.0; self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Poly::new(c)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0.0)
            .map(|(k, c)| match k {
                0 => format!("{c}"),
                1 => format!("{c}*q"),
                _ => format!("{c}*q^{k}"),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// `Σ_k c_k(q) (d/dq)^k`.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct DiffOp1D {
    terms: BTreeMap<usize, Poly>,
}

impl DiffOp1D {
    pub fn zero() -> Self {
        DiffOp1D::default()
    }

    pub fn identity() -> Self {
        Self::multiplication(Poly::constant(1.0))
    }

    pub fn multiplication(p: Poly) -> Self {
        Self::term(0, p)
    }

    /// `d/dq`.
    pub fn d() -> Self {
        Self::term(1, Poly::constant(1.0))
    }

    pub fn term(order: usize, p: Poly) -> Self {
        let mut terms = BTreeMap::new();
        if !p.is_zero() {
            terms.insert(order, p);
        }
        DiffOp1D { terms }
    }

    pub fn coefficient(&self, order: usize) -> Poly {
        self.terms.get(&order).cloned().unwrap_or_default()
    }

    pub fn order(&self) -> Option<usize> {
        self.terms.keys().next_back().copied()
    }

    fn push(&mut self, order: usize, p: &Poly) {
        let sum = &self.coefficient(order) + p;
        if sum.is_zero() {
            self.terms.remove(&order);
        } else {
            self.terms.insert(order, sum);
        }
    }

    pub fn scale(&self, s: f64) -> DiffOp1D {
        let mut out = DiffOp1D::zero();
        for (k, p) in &self.terms {
            out.push(*k, &p.scale(s));
        }
        out
    }

    /// Formal adjoint for real coefficients: `(c ∂^m)* = (−∂)^m ∘ c`.
    pub fn adjoint(&self) -> DiffOp1D {
        let mut out = DiffOp1D::zero();
        for (&m, c) in &self.terms {
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            out = &out + &(&Self::d_power(m).scale(sign) * &Self::multiplication(c.clone()));
        }
        out
    }

    fn d_power(m: usize) -> DiffOp1D {
        Self::term(m, Poly::constant(1.0))
    }

    /// Apply to a polynomial.
    pub fn apply(&self, u: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (&k, c) in &self.terms {
            let mut du = u.clone();
            for _ in 0..k {
                du = du.deriv();
            }
            out = &out + &(c * &du);
        }
        out
    }
}

impl Add for &DiffOp1D {
    type Output = DiffOp1D;
    fn add(self, o: &DiffOp1D) -> DiffOp1D {
        let mut out = self.clone();
        for (k, p) in &o.terms {
            out.push(*k, p);
        }
        out
    }
}

impl Sub for &DiffOp1D {
    type Output = DiffOp1D;
    fn sub(self, o: &DiffOp1D) -> DiffOp1D {
        self + &o.scale(-1.0)
    }
}

impl Neg for &DiffOp1D {
    type Output = DiffOp1D;
    fn neg(self) -> DiffOp1D {
        self.scale(-1.0)
    }
}

/// Composition, by Leibniz: `(a ∂^m)(b ∂^n) = Σ_k C(m,k) a b^{(k)} ∂^{m+n−k}`.
impl Mul for &DiffOp1D {
    type Output = DiffOp1D;
    fn mul(self, o: &DiffOp1D) -> DiffOp1D {
        let mut out = DiffOp1D::zero();
        for (&m, a) in &self.terms {
            for (&n, b) in &o.terms {
                let mut db = b.clone();
                let mut binom = 1.0;
                for k in 0..=m {
                    if db.is_zero() {
                        break;
                    }
                    out.push(m + n - k, &(a * &db).scale(binom));
                    binom = binom * (m - k) as f64 / (k + 1) as f64;
                    db = db.deriv();
                }
            }
        }
        out
    }
}

impl fmt::Display for DiffOp1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(k, p)| match k {
                0 => format!("({p})"),
                1 => format!("({p})·d"),
                _ => format!("({p})·d^{k}"),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// 2×2 matrix of operators acting on `L²(ℝ)²`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OpMatrix2(pub [[DiffOp1D; 2]; 2]);

impl OpMatrix2 {
    pub fn diag(a: DiffOp1D, b: DiffOp1D) -> Self {
        OpMatrix2([[a, DiffOp1D::zero()], [DiffOp1D::zero(), b]])
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().flatten().all(|e| e.order().is_none())
    }
}

impl Mul for &OpMatrix2 {
    type Output = OpMatrix2;
    fn mul(self, o: &OpMatrix2) -> OpMatrix2 {
        let e = |i: usize, j: usize| &(&self.0[i][0] * &o.0[0][j]) + &(&self.0[i][1] * &o.0[1][j]);
        OpMatrix2([[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]])
    }
}

impl Add for &OpMatrix2 {
    type Output = OpMatrix2;
    fn add(self, o: &OpMatrix2) -> OpMatrix2 {
        let e = |i: usize, j: usize| &self.0[i][j] + &o.0[i][j];
        OpMatrix2([[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]])
    }
}

/// The SUSY structure generated by `A = d/dq + φ`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Factorization {
    pub phi: Poly,
    pub a: DiffOp1D,
    pub a_star: DiffOp1D,
    /// `A*A`.
    pub h_minus: DiffOp1D,
    /// `AA*`.
    pub h_plus: DiffOp1D,
    /// `[[0, A*], [A, 0]]`.
    pub q: OpMatrix2,
    /// `diag(1, −1)`.
    pub p: OpMatrix2,
    /// `Q²`.
    pub h: OpMatrix2,
}

pub fn susy_factorize(phi: &Poly) -> Factorization {
    let mult = DiffOp1D::multiplication(phi.clone());
    let a = &DiffOp1D::d() + &mult;
    let a_star = a.adjoint();
    let q = OpMatrix2([[DiffOp1D::zero(), a_star.clone()], [a.clone(), DiffOp1D::zero()]]);
    let p = OpMatrix2::diag(DiffOp1D::identity(), -&DiffOp1D::identity());
    let h = &q * &q;
    Factorization { phi: phi.clone(), h_minus: &a_star * &a, h_plus: &a * &a_star, a, a_star, q, p, h }
}

/// `(dim Ker A, dim Ker A*, index)` in `L²(ℝ)`.
///
/// `Ker A` is spanned by `e^{−Φ}` and `Ker A*` by `e^{Φ}` with `Φ' = φ`; each is square
/// integrable exactly when `Φ → +∞` (resp. `−∞`) at both ends, i.e. `deg φ` is odd and its
/// leading coefficient has the matching sign.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct IndexRecord {
    pub ker_a: usize,
    pub ker_a_star: usize,
    pub index: i64,
}

pub fn kernel_dims(phi: &Poly) -> IndexRecord {
    let (ker_a, ker_a_star) = match phi.degree() {
        Some(d) if d % 2 == 1 => {
            let lead = phi.coeffs()[d];
            if lead > 0.0 {
                (1, 0)
            } else {
                (0, 1)
            }
        }
        _ => (0, 0),
    };
    IndexRecord { ker_a, ker_a_star, index: ker_a as i64 - ker_a_star as i64 }
}
