//! Exact arithmetic in the Grassmann algebra Λ_L over ℂ.
//!
//! A [`Supernumber`] is a finite sum `Σ_I X_I σ^I` where `I` ranges over subsets of the
//! generators `σ_1..σ_L` and `σ^I = σ_{i_1}…σ_{i_k}` with `i_1 < … < i_k`. Subsets are
//! stored as bitmasks, generator `j` occupying bit `j-1`. Terms are kept sorted by mask with
//! exact zeros removed, so two equal elements always compare equal structurally.
//!
//! Products are exact inside Λ_L: overlapping monomials vanish and the reordering sign is
//! the parity of the number of inversions between the two factors.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Masks are `u32`, so at most 32 generators.
pub const MAX_GENERATORS: u32 = 32;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
    Mixed,
}

/// True when moving `σ^K` to the right of `σ^J` (for disjoint `J`, `K`) costs a minus sign,
/// i.e. `σ^J σ^K = -σ^{J∪K}`.
#[inline]
pub fn reorder_sign(j: u32, k: u32) -> bool {
    let mut k = k;
    let mut count = 0u32;
    while k != 0 {
        let b = k.trailing_zeros();
        count += ((j >> b) >> 1).count_ones();
        k &= k - 1;
    }
    count & 1 == 1
}

#[inline]
fn full_mask(l: u32) -> u32 {
    if l >= 32 {
        u32::MAX
    } else {
        (1u32 << l) - 1
    }
}

#[derive(Clone, PartialEq)]
pub struct Supernumber {
    l: u32,
    terms: Vec<(u32, C64)>,
}

fn canonical(mut v: Vec<(u32, C64)>) -> Vec<(u32, C64)> {
    v.sort_unstable_by_key(|t| t.0);
    let mut out: Vec<(u32, C64)> = Vec::with_capacity(v.len());
    for (m, c) in v {
        match out.last_mut() {
            Some(last) if last.0 == m => last.1 += c,
            _ => out.push((m, c)),
        }
    }
    out.retain(|t| t.1 != ZERO);
    out
}

impl Supernumber {
    pub fn zero(l: u32) -> Self {
        Supernumber { l, terms: Vec::new() }
    }

    pub fn one(l: u32) -> Self {
        Self::scalar(l, ONE)
    }

    pub fn scalar(l: u32, c: impl Into<C64>) -> Self {
        let c = c.into();
        let terms = if c == ZERO { Vec::new() } else { vec![(0, c)] };
        Supernumber { l, terms }
    }

    /// `c σ^I` for a mask `I`.
    pub fn monomial(l: u32, mask: u32, c: impl Into<C64>) -> Result<Self> {
        Self::from_masks(l, [(mask, c.into())])
    }

    /// The generator `σ_j`, 1-based.
    pub fn generator(l: u32, j: usize) -> Result<Self> {
        if j == 0 || j > l as usize {
            return Err(Error::InvalidGenerator { generator: j, l });
        }
        Self::monomial(l, 1 << (j - 1), ONE)
    }

    /// Build from `(subset, coefficient)` pairs with 1-based generator lists; duplicates are summed.
    pub fn make<S: AsRef<[usize]>>(l: u32, terms: impl IntoIterator<Item = (S, C64)>) -> Result<Self> {
        if l > MAX_GENERATORS {
            return Err(Error::TooManyGenerators(l));
        }
        let mut v = Vec::new();
        for (subset, c) in terms {
            let mut mask = 0u32;
            for &g in subset.as_ref() {
                if g == 0 || g > l as usize {
                    return Err(Error::InvalidGenerator { generator: g, l });
                }
                mask |= 1 << (g - 1);
            }
            v.push((mask, c));
        }
        Ok(Supernumber { l, terms: canonical(v) })
    }

    pub fn from_masks(l: u32, terms: impl IntoIterator<Item = (u32, C64)>) -> Result<Self> {
        if l > MAX_GENERATORS {
            return Err(Error::TooManyGenerators(l));
        }
        let fm = full_mask(l);
        let mut v = Vec::new();
        for (m, c) in terms {
            if m & !fm != 0 {
                let generator = 32 - (m & !fm).leading_zeros() as usize;
                return Err(Error::InvalidGenerator { generator, l });
            }
            v.push((m, c));
        }
        Ok(Supernumber { l, terms: canonical(v) })
    }

    pub fn num_generators(&self) -> u32 {
        self.l
    }

    pub fn terms(&self) -> &[(u32, C64)] {
        &self.terms
    }

    pub fn coeff(&self, mask: u32) -> C64 {
        match self.terms.binary_search_by_key(&mask, |t| t.0) {
            Ok(i) => self.terms[i].1,
            Err(_) => ZERO,
        }
    }

    /// Coefficient of `σ^I` with `I` given as a 1-based generator list.
    pub fn project(&self, subset: &[usize]) -> C64 {
        let mask = subset.iter().fold(0u32, |m, &g| if (1..=32).contains(&g) { m | 1 << (g - 1) } else { m });
        self.coeff(mask)
    }

    pub fn body(&self) -> C64 {
        self.coeff(0)
    }

    pub fn soul(&self) -> Self {
        Supernumber { l: self.l, terms: self.terms.iter().copied().filter(|t| t.0 != 0).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The degree-`k` component `X^[k]`.
    pub fn degree_filter(&self, k: u32) -> Self {
        Supernumber { l: self.l, terms: self.terms.iter().copied().filter(|t| t.0.count_ones() == k).collect() }
    }

    /// Zero counts as even.
    pub fn parity(&self) -> Parity {
        let even = self.terms.iter().all(|t| t.0.count_ones() % 2 == 0);
        let odd = self.terms.iter().all(|t| t.0.count_ones() % 2 == 1);
        match (even, odd) {
            (true, _) => Parity::Even,
            (false, true) => Parity::Odd,
            _ => Parity::Mixed,
        }
    }

    pub fn is_even(&self) -> bool {
        self.parity() == Parity::Even
    }

    pub fn is_odd(&self) -> bool {
        self.is_zero() || self.parity() == Parity::Odd
    }

    /// Real supernumber in the sense of a real body; soul coefficients may be complex.
    pub fn is_real(&self) -> bool {
        self.body().im == 0.0
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.iter().fold(0.0, |a, t| a.max(t.1.norm()))
    }

    /// Weighted metric `Σ_I 2^{-r(I)} |X_I| / (1 + |X_I|)` with `r(I)` the binary rank of the mask.
    pub fn dist_norm(&self) -> f64 {
        self.terms
            .iter()
            .map(|&(m, c)| {
                let a = c.norm();
                let w = if m > 1074 { 0.0 } else { 2f64.powi(-(m as i32)) };
                w * a / (1.0 + a)
            })
            .sum()
    }

    /// Max coefficientwise distance.
    pub fn max_diff(&self, other: &Self) -> f64 {
        (self - other).max_abs()
    }

    /// Reinterpret in Λ_{l} for `l ≥` the current generator count.
    pub fn embed(&self, l: u32) -> Self {
        assert!(l >= self.highest_generator(), "embedding would drop generators");
        Supernumber { l, terms: self.terms.clone() }
    }

    /// Largest generator index appearing (0 for a scalar).
    pub fn highest_generator(&self) -> u32 {
        self.terms.iter().map(|t| 32 - t.0.leading_zeros()).max().unwrap_or(0)
    }

    /// Drop coefficients with modulus at most `tol`.
    pub fn prune(&self, tol: f64) -> Self {
        Supernumber { l: self.l, terms: self.terms.iter().copied().filter(|t| t.1.norm() > tol).collect() }
    }

    pub fn scale(&self, c: impl Into<C64>) -> Self {
        let c = c.into();
        if c == ZERO {
            return Self::zero(self.l);
        }
        Supernumber { l: self.l, terms: self.terms.iter().map(|&(m, x)| (m, x * c)).filter(|t| t.1 != ZERO).collect() }
    }

    pub fn add_scalar(&self, c: impl Into<C64>) -> Self {
        self + &Self::scalar(self.l, c)
    }

    pub fn map_coeffs(&self, f: impl Fn(u32, C64) -> C64) -> Self {
        Supernumber { l: self.l, terms: canonical(self.terms.iter().map(|&(m, c)| (m, f(m, c))).collect()) }
    }

    fn mul_impl(&self, o: &Self) -> Self {
        let l = self.l.max(o.l);
        if self.terms.is_empty() || o.terms.is_empty() {
            return Self::zero(l);
        }
        if self.terms.len() == 1 && self.terms[0].0 == 0 {
            return Supernumber { l, ..o.scale(self.terms[0].1) };
        }
        if o.terms.len() == 1 && o.terms[0].0 == 0 {
            return Supernumber { l, ..self.scale(o.terms[0].1) };
        }
        let pairs = self.terms.len() * o.terms.len();
        if l <= 12 && pairs > (1usize << l) {
            let mut acc = vec![ZERO; 1usize << l];
            let mut touched = vec![false; 1usize << l];
            for &(a, x) in &self.terms {
                for &(b, y) in &o.terms {
                    if a & b == 0 {
                        let v = x * y;
                        let idx = (a | b) as usize;
                        touched[idx] = true;
                        if reorder_sign(a, b) {
                            acc[idx] -= v;
                        } else {
                            acc[idx] += v;
                        }
                    }
                }
            }
            let terms = acc
                .into_iter()
                .enumerate()
                .filter(|(i, c)| touched[*i] && *c != ZERO)
                .map(|(i, c)| (i as u32, c))
                .collect();
            return Supernumber { l, terms };
        }
        let mut out = Vec::with_capacity(pairs);
        for &(a, x) in &self.terms {
            for &(b, y) in &o.terms {
                if a & b == 0 {
                    let v = x * y;
                    out.push((a | b, if reorder_sign(a, b) { -v } else { v }));
                }
            }
        }
        Supernumber { l, terms: canonical(out) }
    }

    fn add_impl(&self, o: &Self, sign: f64) -> Self {
        let l = self.l.max(o.l);
        let mut out = Vec::with_capacity(self.terms.len() + o.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() || j < o.terms.len() {
            let take_left = j >= o.terms.len() || (i < self.terms.len() && self.terms[i].0 < o.terms[j].0);
            let take_right = i >= self.terms.len() || (j < o.terms.len() && o.terms[j].0 < self.terms[i].0);
            if take_left {
                out.push(self.terms[i]);
                i += 1;
            } else if take_right {
                out.push((o.terms[j].0, o.terms[j].1 * sign));
                j += 1;
            } else {
                let c = self.terms[i].1 + o.terms[j].1 * sign;
                if c != ZERO {
                    out.push((self.terms[i].0, c));
                }
                i += 1;
                j += 1;
            }
        }
        Supernumber { l, terms: out }
    }

    pub fn powi(&self, n: u32) -> Self {
        let mut result = Self::one(self.l);
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Two-sided inverse `X_B^{-1} Σ_k (-X_B^{-1} X_S)^k`; the series is finite.
    pub fn inverse(&self) -> Result<Self> {
        let b = self.body();
        if b == ZERO {
            return Err(Error::NotInvertible);
        }
        let binv = b.inv();
        let step = self.soul().scale(-binv);
        let mut term = Self::scalar(self.l, binv);
        let mut sum = term.clone();
        loop {
            term = &term * &step;
            if term.is_zero() {
                break;
            }
            sum += &term;
        }
        Ok(sum)
    }

    /// Grassmann continuation `f(X) = Σ_k f^{(k)}(X_B)/k! X_S^k`.
    pub fn apply(&self, f: &Analytic) -> Result<Self> {
        let s = self.soul();
        let mut powers = vec![Self::one(self.l)];
        loop {
            let next = powers.last().unwrap() * &s;
            if next.is_zero() {
                break;
            }
            powers.push(next);
        }
        let needed = powers.len() - 1;
        let derivs = f.derivatives(self.body(), needed)?;
        if derivs.len() < needed + 1 {
            return Err(Error::InsufficientOracle { needed, available: derivs.len().saturating_sub(1) });
        }
        let mut out = Self::zero(self.l);
        let mut fact = 1.0;
        for (k, p) in powers.iter().enumerate() {
            if k > 0 {
                fact *= k as f64;
            }
            out += &p.scale(derivs[k] / fact);
        }
        Ok(out)
    }

    pub fn exp(&self) -> Self {
        self.apply(&Analytic::Exp).expect("exp is entire")
    }

    pub fn sin(&self) -> Self {
        self.apply(&Analytic::Sin).expect("sin is entire")
    }

    pub fn cos(&self) -> Self {
        self.apply(&Analytic::Cos).expect("cos is entire")
    }

    pub fn sqrt(&self) -> Result<Self> {
        self.apply(&Analytic::SqrtPrincipal)
    }

    /// `conj(X) = Σ (-1)^{|I|(|I|-1)/2} conj(X_I) σ^I`; reverses products.
    pub fn conjugate(&self) -> Self {
        Supernumber {
            l: self.l,
            terms: self
                .terms
                .iter()
                .map(|&(m, c)| {
                    let k = m.count_ones();
                    let flip = (k * k.saturating_sub(1) / 2) % 2 == 1;
                    (m, if flip { -c.conj() } else { c.conj() })
                })
                .collect(),
        }
    }

    /// Left derivative `∂/∂σ_k`: remove `σ_k` after moving it to the front.
    pub fn deriv_generator(&self, k: usize) -> Self {
        assert!((1..=32).contains(&k));
        let bit = 1u32 << (k - 1);
        let below = bit - 1;
        let terms = self
            .terms
            .iter()
            .filter(|t| t.0 & bit != 0)
            .map(|&(m, c)| (m & !bit, if (m & below).count_ones() % 2 == 1 { -c } else { c }))
            .collect();
        Supernumber { l: self.l, terms: canonical(terms) }
    }

    /// Algebra homomorphism sending `σ_j ↦ images[j-1]`.
    pub fn substitute(&self, images: &[Supernumber]) -> Self {
        let target_l = images.iter().map(|x| x.l).max().unwrap_or(self.l);
        assert!(images.len() as u32 >= self.highest_generator(), "missing generator images");
        let mut out = Self::zero(target_l);
        for &(m, c) in &self.terms {
            let mut prod = Self::scalar(target_l, c);
            let mut mm = m;
            while mm != 0 {
                let b = mm.trailing_zeros() as usize;
                prod = &prod * &images[b];
                mm &= mm - 1;
            }
            out += &prod;
        }
        out
    }

    /// Berezin integral over the generators in `g`: for each term `σ^G σ^R c` keep `σ^R c`.
    pub fn berezin(&self, g: u32) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|t| t.0 & g == g)
            .map(|&(m, c)| {
                let r = m & !g;
                (r, if reorder_sign(g, r) { -c } else { c })
            })
            .collect();
        Supernumber { l: self.l, terms: canonical(terms) }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("supernumber serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// Host for the `f` in a Grassmann continuation: value and derivatives at a body point.
#[derive(Clone)]
pub enum Analytic {
    Exp,
    /// Real logarithm: body must be real and positive.
    Log,
    /// Principal complex logarithm.
    LogPrincipal,
    Sin,
    Cos,
    Sinh,
    Cosh,
    /// Real square root: body must be real and positive.
    Sqrt,
    SqrtPrincipal,
    Recip,
    Powi(i32),
    Powc(C64),
    /// `f(z, n)` returns `[f(z), f'(z), …]`, at least `n + 1` entries when it can.
    Custom(Arc<dyn Fn(C64, usize) -> Result<Vec<C64>> + Send + Sync>),
}

impl fmt::Debug for Analytic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Analytic::Custom(_) => write!(f, "Custom(..)"),
            Analytic::Powi(n) => write!(f, "Powi({n})"),
            Analytic::Powc(a) => write!(f, "Powc({a})"),
            other => write!(f, "{}", other.name()),
        }
    }
}

fn falling(alpha: C64, z: C64, n: usize) -> Vec<C64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut coeff = ONE;
    for k in 0..=n {
        out.push(coeff * z.powc(alpha - k as f64));
        coeff *= alpha - k as f64;
    }
    out
}

impl Analytic {
    fn name(&self) -> &'static str {
        match self {
            Analytic::Exp => "exp",
            Analytic::Log => "log",
            Analytic::LogPrincipal => "log_principal",
            Analytic::Sin => "sin",
            Analytic::Cos => "cos",
            Analytic::Sinh => "sinh",
            Analytic::Cosh => "cosh",
            Analytic::Sqrt => "sqrt",
            Analytic::SqrtPrincipal => "sqrt_principal",
            Analytic::Recip => "recip",
            Analytic::Powi(_) => "powi",
            Analytic::Powc(_) => "powc",
            Analytic::Custom(_) => "custom",
        }
    }

    pub fn custom(f: impl Fn(C64, usize) -> Result<Vec<C64>> + Send + Sync + 'static) -> Self {
        Analytic::Custom(Arc::new(f))
    }

    /// `[f(z), f'(z), …, f^{(n)}(z)]`.
    pub fn derivatives(&self, z: C64, n: usize) -> Result<Vec<C64>> {
        let positive_real = |name: &str| {
            if z.im != 0.0 || z.re <= 0.0 {
                Err(Error::Domain(format!("{name} needs a positive real body, got {z}")))
            } else {
                Ok(())
            }
        };
        let nonzero = |name: &str| {
            if z == ZERO {
                Err(Error::Domain(format!("{name} is singular at 0")))
            } else {
                Ok(())
            }
        };
        Ok(match self {
            Analytic::Exp => vec![z.exp(); n + 1],
            Analytic::Log | Analytic::LogPrincipal => {
                if matches!(self, Analytic::Log) {
                    positive_real("log")?;
                } else {
                    nonzero("log")?;
                }
                let mut v = vec![z.ln()];
                let mut c = ONE;
                for k in 1..=n {
                    if k > 1 {
                        c *= -((k - 1) as f64);
                    }
                    v.push(c / z.powi(k as i32));
                }
                v
            }
            Analytic::Sin | Analytic::Cos => {
                let (s, c) = (z.sin(), z.cos());
                let cycle = [s, c, -s, -c];
                let off = if matches!(self, Analytic::Sin) { 0 } else { 1 };
                (0..=n).map(|k| cycle[(k + off) % 4]).collect()
            }
            Analytic::Sinh | Analytic::Cosh => {
                let (s, c) = (z.sinh(), z.cosh());
                let off = if matches!(self, Analytic::Sinh) { 0 } else { 1 };
                (0..=n).map(|k| if (k + off) % 2 == 0 { s } else { c }).collect()
            }
            Analytic::Sqrt | Analytic::SqrtPrincipal => {
                if matches!(self, Analytic::Sqrt) {
                    positive_real("sqrt")?;
                } else {
                    nonzero("sqrt")?;
                }
                falling(C64::new(0.5, 0.0), z, n)
            }
            Analytic::Recip => {
                nonzero("1/x")?;
                Analytic::Powi(-1).derivatives(z, n)?
            }
            Analytic::Powi(p) => {
                if *p < 0 {
                    nonzero("negative power")?;
                }
                let mut out = Vec::with_capacity(n + 1);
                let mut coeff = 1.0;
                for k in 0..=n {
                    let e = *p as i64 - k as i64;
                    if coeff == 0.0 {
                        out.push(ZERO);
                    } else {
                        out.push(z.powi(e as i32) * coeff);
                    }
                    coeff *= e as f64;
                }
                out
            }
            Analytic::Powc(a) => {
                nonzero("complex power")?;
                falling(*a, z, n)
            }
            Analytic::Custom(f) => f(z, n)?,
        })
    }
}

/// Random element with roughly `density` of the `2^L` monomials populated.
pub fn random_supernumber<R: Rng + ?Sized>(rng: &mut R, l: u32, parity: Option<Parity>, density: f64) -> Supernumber {
    let mut terms = Vec::new();
    let count = 1u64 << l;
    let wanted = ((count as f64) * density).ceil().max(1.0) as usize;
    for _ in 0..wanted {
        let m = (rng.random::<u64>() % count) as u32;
        let ok = match parity {
            Some(Parity::Even) => m.count_ones().is_multiple_of(2),
            Some(Parity::Odd) => m.count_ones() % 2 == 1,
            _ => true,
        };
        if ok {
            terms.push((m, C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))));
        }
    }
    Supernumber::from_masks(l, terms).expect("masks within range")
}

impl fmt::Debug for Supernumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Λ{}[{}]", self.l, self)
    }
}

fn fmt_complex(c: C64) -> String {
    if c.im == 0.0 {
        format!("{}", c.re)
    } else if c.re == 0.0 {
        format!("{}i", c.im)
    } else {
        format!("({}{:+}i)", c.re, c.im)
    }
}

impl fmt::Display for Supernumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, &(m, c)) in self.terms.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}", fmt_complex(c))?;
            let mut mm = m;
            while mm != 0 {
                write!(f, "σ{}", mm.trailing_zeros() + 1)?;
                mm &= mm - 1;
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    mask: u32,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
pub struct SupernumberJson {
    #[serde(rename = "L")]
    l: u32,
    terms: Vec<TermJson>,
}

impl From<&Supernumber> for SupernumberJson {
    fn from(x: &Supernumber) -> Self {
        SupernumberJson { l: x.l, terms: x.terms.iter().map(|&(mask, c)| TermJson { mask, re: c.re, im: c.im }).collect() }
    }
}

impl TryFrom<SupernumberJson> for Supernumber {
    type Error = Error;
    fn try_from(j: SupernumberJson) -> Result<Self> {
        if j.terms.windows(2).any(|w| w[0].mask >= w[1].mask) {
            return Err(Error::Parse("masks must be strictly increasing".into()));
        }
        Supernumber::from_masks(j.l, j.terms.into_iter().map(|t| (t.mask, C64::new(t.re, t.im))))
    }
}

impl Serialize for Supernumber {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SupernumberJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Supernumber {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = SupernumberJson::deserialize(d)?;
        Supernumber::try_from(j).map_err(serde::de::Error::custom)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl $tr<&Supernumber> for &Supernumber {
            type Output = Supernumber;
            fn $m(self, o: &Supernumber) -> Supernumber {
                $body(self, o)
            }
        }
        impl $tr<Supernumber> for Supernumber {
            type Output = Supernumber;
            fn $m(self, o: Supernumber) -> Supernumber {
                $body(&self, &o)
            }
        }
        impl $tr<&Supernumber> for Supernumber {
            type Output = Supernumber;
            fn $m(self, o: &Supernumber) -> Supernumber {
                $body(&self, o)
            }
        }
        impl $tr<Supernumber> for &Supernumber {
            type Output = Supernumber;
            fn $m(self, o: Supernumber) -> Supernumber {
                $body(self, &o)
            }
        }
    };
}

binop!(Add, add, |a: &Supernumber, b: &Supernumber| a.add_impl(b, 1.0));
binop!(Sub, sub, |a: &Supernumber, b: &Supernumber| a.add_impl(b, -1.0));
binop!(Mul, mul, |a: &Supernumber, b: &Supernumber| a.mul_impl(b));

impl AddAssign<&Supernumber> for Supernumber {
    fn add_assign(&mut self, o: &Supernumber) {
        *self = self.add_impl(o, 1.0);
    }
}

impl AddAssign<Supernumber> for Supernumber {
    fn add_assign(&mut self, o: Supernumber) {
        *self = self.add_impl(&o, 1.0);
    }
}

impl SubAssign<&Supernumber> for Supernumber {
    fn sub_assign(&mut self, o: &Supernumber) {
        *self = self.add_impl(o, -1.0);
    }
}

impl MulAssign<&Supernumber> for Supernumber {
    fn mul_assign(&mut self, o: &Supernumber) {
        *self = self.mul_impl(o);
    }
}

impl Neg for &Supernumber {
    type Output = Supernumber;
    fn neg(self) -> Supernumber {
        self.scale(-1.0)
    }
}

impl Neg for Supernumber {
    type Output = Supernumber;
    fn neg(self) -> Supernumber {
        self.scale(-1.0)
    }
}

impl Mul<C64> for &Supernumber {
    type Output = Supernumber;
    fn mul(self, c: C64) -> Supernumber {
        self.scale(c)
    }
}

impl Mul<C64> for Supernumber {
    type Output = Supernumber;
    fn mul(self, c: C64) -> Supernumber {
        self.scale(c)
    }
}

impl Mul<f64> for &Supernumber {
    type Output = Supernumber;
    fn mul(self, c: f64) -> Supernumber {
        self.scale(c)
    }
}

impl Mul<f64> for Supernumber {
    type Output = Supernumber;
    fn mul(self, c: f64) -> Supernumber {
        self.scale(c)
    }
}

impl std::iter::Sum for Supernumber {
    fn sum<It: Iterator<Item = Supernumber>>(mut iter: It) -> Supernumber {
        let first = iter.next().unwrap_or_else(|| Supernumber::zero(0));
        iter.fold(first, |a, b| a + b)
    }
}
