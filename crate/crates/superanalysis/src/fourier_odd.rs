//! Fourier transforms in odd variables, and the mixed transform on Gaussian×polynomial
//! coefficient functions.
//!
//! `F_o v(π) = ⱪ^{n/2} ι_n ∫dθ e^{-iⱪ⁻¹⟨θ|π⟩} v(θ)` and `F̄_o` with the opposite phase. Both
//! are evaluated exactly: the kernel and `v` are multiplied in an algebra holding the base
//! generators, `θ` and `π`, and the `θ` block is integrated out.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::berezin::OddPolynomial;
use crate::error::{Error, Result};
use crate::grassmann::{Supernumber, C64, I, ONE, ZERO};
use crate::superspace::{Expr, ExprFunction, SuperFunction};

/// Phase convention for the odd kernel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Normalization {
    /// `ι_n = e^{-iπn(n-2)/4}` with kernel `e^{∓iⱪ⁻¹⟨θ|π⟩}`.
    #[default]
    Iota,
    /// `ȷ_n = e^{iπn(n-1)/2}` with kernel `e^{∓ⱪ⁻¹⟨θ|π⟩}`.
    Jay,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OddFourierConfig {
    n: usize,
    kappa: C64,
    normalization: Normalization,
}

impl OddFourierConfig {
    pub fn new(n: usize, kappa: impl Into<C64>) -> Result<Self> {
        let kappa = kappa.into();
        if kappa == ZERO || !kappa.is_finite() {
            return Err(Error::Domain(format!("ⱪ must be finite and nonzero, got {kappa}")));
        }
        Ok(OddFourierConfig { n, kappa, normalization: Normalization::Iota })
    }

    pub fn with_normalization(self, normalization: Normalization) -> Self {
        OddFourierConfig { normalization, ..self }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kappa(&self) -> C64 {
        self.kappa
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    /// `ⱪ^{n/2}` (principal branch) times the phase constant; this is also `F_o δ`.
    pub fn prefactor(&self) -> C64 {
        let phase = match self.normalization {
            Normalization::Iota => iota(self.n),
            Normalization::Jay => jay(self.n),
        };
        self.kappa.powf(self.n as f64 / 2.0) * phase
    }

    /// Coefficient `c` of the kernel `e^{±c⟨θ|π⟩}`.
    fn kernel_scale(&self) -> C64 {
        match self.normalization {
            Normalization::Iota => I / self.kappa,
            Normalization::Jay => ONE / self.kappa,
        }
    }
}

/// `e^{-iπk/4}` with `k` reduced mod 8 first, so large `n` keeps full accuracy.
fn eighth_root(k: i64) -> C64 {
    C64::from_polar(1.0, -PI * k.rem_euclid(8) as f64 / 4.0)
}

pub fn iota(n: usize) -> C64 {
    let n = n as i64;
    eighth_root(n * (n - 2))
}

pub fn jay(n: usize) -> C64 {
    let n = n as i64;
    eighth_root(-2 * n * (n - 1))
}

fn check_shape(v: &OddPolynomial, cfg: &OddFourierConfig) -> Result<()> {
    if v.num_odd() != cfg.n {
        return Err(Error::ShapeMismatch(format!("{} odd variables but the transform is set up for {}", v.num_odd(), cfg.n)));
    }
    Ok(())
}

/// `prefactor · ∫dx e^{sign·c⟨x|y⟩} v(x)` where `x` are the variables of `v` and `y` the new ones.
/// With `x_first`, the pairing is `Σ x_j y_j`; otherwise `Σ y_j x_j`.
fn transform(v: &OddPolynomial, cfg: &OddFourierConfig, sign: f64, x_first: bool) -> Result<OddPolynomial> {
    check_shape(v, cfg)?;
    let l = v.base_generators();
    let n = cfg.n as u32;
    let total = l + 2 * n;
    if total > crate::grassmann::MAX_GENERATORS {
        return Err(Error::TooManyGenerators(total));
    }
    // σ_1..σ_l base, then x, then y.
    let mut pairing = Supernumber::zero(total);
    for j in 1..=n as usize {
        let x = Supernumber::generator(total, l as usize + j)?;
        let y = Supernumber::generator(total, (l + n) as usize + j)?;
        pairing += &if x_first { &x * &y } else { &y * &x };
    }
    let kernel = pairing.scale(cfg.kernel_scale() * sign).exp();
    let integrand = &kernel * &v.repr().embed(total);
    let x_mask = ((1u32 << n) - 1) << l;
    let base_mask = (1u32 << l) - 1;
    let reduced = integrand.berezin(x_mask);
    let terms = reduced.terms().iter().map(|&(m, c)| ((m & base_mask) | ((m >> (l + n)) << l), c * cfg.prefactor()));
    Ok(OddPolynomial::from_repr(l, cfg.n, Supernumber::from_masks(l + n, terms)?))
}

/// `(F_o v)(π)`; the result's odd variables are the `π_j`.
pub fn fo(v: &OddPolynomial, cfg: &OddFourierConfig) -> Result<OddPolynomial> {
    transform(v, cfg, -1.0, true)
}

/// `(F̄_o w)(θ)`; the input's odd variables are the `π_j`.
pub fn fo_bar(w: &OddPolynomial, cfg: &OddFourierConfig) -> Result<OddPolynomial> {
    transform(w, cfg, 1.0, false)
}

/// `v(sθ)`.
pub fn dilate(v: &OddPolynomial, s: C64) -> Result<OddPolynomial> {
    let n = v.num_odd();
    OddPolynomial::from_coeffs(v.base_generators(), n, (0..1u32 << n).map(|a| (a, v.coefficient(a).scale(s.powu(a.count_ones())))))
}

/// `(v, w) = Σ_a conj(v_a) w_a`.
pub fn pairing(v: &OddPolynomial, w: &OddPolynomial) -> Result<Supernumber> {
    if (v.base_generators(), v.num_odd()) != (w.base_generators(), w.num_odd()) {
        return Err(Error::ShapeMismatch("odd polynomials over different algebras".into()));
    }
    let mut acc = Supernumber::zero(v.base_generators());
    for a in 0..1u32 << v.num_odd() {
        acc += &(&v.coefficient(a).conjugate() * &w.coefficient(a));
    }
    Ok(acc)
}

/// `conj(v)` as a function of the conjugate variables, read back in the original ones:
/// conjugation reverses `θ^a`, so `θ^a v_a ↦ conj(v_a) conj(θ^a)`.
pub fn conjugate(v: &OddPolynomial) -> OddPolynomial {
    OddPolynomial::from_repr(v.base_generators(), v.num_odd(), v.repr().conjugate())
}

/// `P(x) e^{-γ|x|²/2}` with `P` a complex polynomial in `m` variables.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussPoly {
    m: usize,
    gamma: f64,
    poly: BTreeMap<Vec<u32>, C64>,
}

impl GaussPoly {
    pub fn new(m: usize, gamma: f64, terms: impl IntoIterator<Item = (Vec<u32>, C64)>) -> Result<Self> {
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::Domain(format!("coefficient needs a Gaussian factor with γ > 0, got γ = {gamma}")));
        }
        let mut poly = BTreeMap::new();
        for (e, c) in terms {
            if e.len() != m {
                return Err(Error::ShapeMismatch(format!("exponent {e:?} for {m} variables")));
            }
            *poly.entry(e).or_insert(ZERO) += c;
        }
        poly.retain(|_, c| *c != ZERO);
        Ok(GaussPoly { m, gamma, poly })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &C64)> {
        self.poly.iter()
    }

    pub fn value(&self, x: &[f64]) -> C64 {
        let r2: f64 = x.iter().map(|t| t * t).sum();
        let p: C64 = self.poly.iter().map(|(e, c)| c * e.iter().zip(x).map(|(&k, t)| t.powi(k as i32)).product::<f64>()).sum();
        p * (-0.5 * self.gamma * r2).exp()
    }

    pub fn scale(&self, c: C64) -> GaussPoly {
        let mut out = self.clone();
        out.poly.values_mut().for_each(|v| *v *= c);
        out.poly.retain(|_, v| *v != ZERO);
        out
    }

    /// The same function as a symbolic expression in `q1..qm`.
    pub fn to_expr(&self) -> Expr {
        let mut p = Expr::c(0.0);
        for (e, c) in &self.poly {
            let mut mono = Expr::ci(*c);
            for (j, &k) in e.iter().enumerate() {
                if k > 0 {
                    mono = mono * Expr::var(j).powi(k as i32);
                }
            }
            p = p + mono;
        }
        let r2 = (0..self.m).fold(Expr::c(0.0), |acc, j| acc + Expr::var(j).powi(2));
        p * (Expr::c(-0.5 * self.gamma) * r2).exp()
    }

    /// `(2πħ)^{-m/2} ∫dx e^{∓iħ⁻¹⟨x|ξ⟩} u(x)`, with `forward` choosing the minus sign.
    pub fn transform(&self, hbar: f64, forward: bool) -> Result<GaussPoly> {
        if !(hbar > 0.0) {
            return Err(Error::Domain(format!("ħ must be positive, got {hbar}")));
        }
        let g = self.gamma;
        let max_k = self.poly.keys().flatten().copied().max().unwrap_or(0);
        // ∫ t^k e^{-γt²/2 ∓ iħ⁻¹ξt} dt = √(2π/γ) e^{-ξ²/(2γħ²)} Σ_j C(k,2j)(2j-1)!! γ^{-j} μ^{k-2j},
        // μ = ∓iξ/(ħγ); `one_d[k]` lists the ξ-coefficients of the sum.
        let mu = C64::new(0.0, if forward { -1.0 } else { 1.0 }) / (hbar * g);
        let one_d: Vec<Vec<C64>> = (0..=max_k)
            .map(|k| {
                let mut row = vec![ZERO; k as usize + 1];
                let (mut binom, mut dfact) = (1.0, 1.0);
                for j in 0..=k / 2 {
                    if j > 0 {
                        let (kk, jj) = (k as f64, j as f64);
                        binom *= (kk - 2.0 * jj + 2.0) * (kk - 2.0 * jj + 1.0) / ((2.0 * jj - 1.0) * (2.0 * jj));
                        dfact *= 2.0 * jj - 1.0;
                    }
                    let p = (k - 2 * j) as usize;
                    row[p] += mu.powu(p as u32) * (binom * dfact * g.powi(-(j as i32)));
                }
                row
            })
            .collect();
        let norm = ((2.0 * PI / g).sqrt() / (2.0 * PI * hbar).sqrt()).powi(self.m as i32);
        let mut out: BTreeMap<Vec<u32>, C64> = BTreeMap::new();
        for (e, c) in &self.poly {
            let mut partial: Vec<(Vec<u32>, C64)> = vec![(Vec::with_capacity(self.m), c * norm)];
            for &k in e {
                partial = partial
                    .into_iter()
                    .flat_map(|(ex, cc)| {
                        one_d[k as usize].iter().enumerate().filter(|(_, r)| **r != ZERO).map(move |(p, r)| {
                            let mut ex = ex.clone();
                            ex.push(p as u32);
                            (ex, cc * r)
                        })
                    })
                    .collect();
            }
            for (ex, cc) in partial {
                *out.entry(ex).or_insert(ZERO) += cc;
            }
        }
        GaussPoly::new(self.m, 1.0 / (g * hbar * hbar), out)
    }

    pub fn max_diff(&self, o: &GaussPoly) -> f64 {
        let mut d = (self.gamma - o.gamma).abs();
        for (e, c) in &self.poly {
            d = d.max((c - o.poly.get(e).copied().unwrap_or(ZERO)).norm());
        }
        for (e, c) in &o.poly {
            if !self.poly.contains_key(e) {
                d = d.max(c.norm());
            }
        }
        d
    }
}

/// `Σ_a θ^a u_a(x)` with every `u_a` in the Gaussian×polynomial class.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussPolySuper {
    m: usize,
    n: usize,
    coeffs: BTreeMap<u32, GaussPoly>,
}

impl GaussPolySuper {
    pub fn new(m: usize, n: usize, terms: impl IntoIterator<Item = (u32, GaussPoly)>) -> Result<Self> {
        let mut coeffs = BTreeMap::new();
        for (a, u) in terms {
            if a >> n != 0 || u.m != m {
                return Err(Error::ShapeMismatch(format!("term {a:#b} with {} even variables does not fit ({m}|{n})", u.m)));
            }
            if coeffs.insert(a, u).is_some() {
                return Err(Error::ShapeMismatch(format!("mask {a:#b} given twice")));
            }
        }
        Ok(GaussPolySuper { m, n, coeffs })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coefficient(&self, a: u32) -> Option<&GaussPoly> {
        self.coeffs.get(&a)
    }

    pub fn to_super_function(&self) -> Result<SuperFunction> {
        SuperFunction::from_terms(self.m, self.n, self.coeffs.iter().map(|(a, u)| (*a as usize, ExprFunction::new(u.to_expr(), self.m).shared())))
    }

    pub fn max_diff(&self, o: &GaussPolySuper) -> f64 {
        let masks: std::collections::BTreeSet<u32> = self.coeffs.keys().chain(o.coeffs.keys()).copied().collect();
        masks
            .into_iter()
            .map(|a| match (self.coeffs.get(&a), o.coeffs.get(&a)) {
                (Some(x), Some(y)) => x.max_diff(y),
                (Some(x), None) | (None, Some(x)) => x.poly.values().map(|c| c.norm()).fold(0.0, f64::max),
                (None, None) => 0.0,
            })
            .fold(0.0, f64::max)
    }
}

/// `𝓕u(ξ, π) = Σ_a (F_o θ^a)(π) (F_e u_a)(ξ)`, or `𝓕̄` when `forward` is false.
fn mixed(u: &GaussPolySuper, cfg: &OddFourierConfig, hbar: f64, forward: bool) -> Result<GaussPolySuper> {
    if cfg.n != u.n {
        return Err(Error::ShapeMismatch(format!("{} odd variables but the transform is set up for {}", u.n, cfg.n)));
    }
    let mut out: BTreeMap<u32, GaussPoly> = BTreeMap::new();
    for (a, ua) in &u.coeffs {
        let even = ua.transform(hbar, forward)?;
        let mono = OddPolynomial::from_coeffs(0, u.n, [(*a, Supernumber::one(0))])?;
        let odd = if forward { fo(&mono, cfg)? } else { fo_bar(&mono, cfg)? };
        for b in 0..1u32 << u.n {
            let c = odd.coefficient(b).body();
            if c == ZERO {
                continue;
            }
            let piece = even.scale(c);
            let merged = match out.remove(&b) {
                None => piece,
                Some(prev) => {
                    if (prev.gamma - piece.gamma).abs() > 1e-14 * prev.gamma {
                        return Err(Error::Domain("coefficients with different Gaussian widths land on the same monomial".into()));
                    }
                    GaussPoly::new(u.m, prev.gamma, prev.poly.into_iter().chain(piece.poly))?
                }
            };
            out.insert(b, merged);
        }
    }
    GaussPolySuper::new(u.m, u.n, out)
}

pub fn mixed_transform(u: &GaussPolySuper, cfg: &OddFourierConfig, hbar: f64) -> Result<GaussPolySuper> {
    mixed(u, cfg, hbar, true)
}

pub fn mixed_transform_bar(v: &GaussPolySuper, cfg: &OddFourierConfig, hbar: f64) -> Result<GaussPolySuper> {
    mixed(v, cfg, hbar, false)
}

/// `c_{m,n} = (2πħ)^{-m/2} ⱪ^{n/2} ι_n`.
pub fn mixed_constant(m: usize, cfg: &OddFourierConfig, hbar: f64) -> C64 {
    cfg.prefactor() * (2.0 * PI * hbar).powf(-(m as f64) / 2.0)
}
