//! Super-Hamilton flows integrated with RK4 over full Λ-valued states.
//!
//! For `ℋ(t, x, ξ, θ, π)` even, the flow is
//! `ẋ = ∂ℋ/∂ξ, ξ̇ = −∂ℋ/∂x, θ̇ = −κ ∂ℋ/∂π, π̇ = −κ ∂ℋ/∂θ` with left odd derivatives and an
//! odd time scale `κ` that is 1 unless a Legendre transform says otherwise. Because every
//! product in Λ raises the degree, the degree-k part of the state only ever sees initial data
//! of degree ≤ k; the component-wise recursion is never written out.

use std::sync::Arc;

use nalgebra::Matrix4;
use serde::{Deserialize, Serialize};

use super::WeylSymbolParams;
use crate::dual::{even_partial, odd_partial};
use crate::error::{Error, Result};
use crate::grassmann::{Parity, Supernumber, C64, I, ONE};
use crate::quadrature::gauss_legendre;
use crate::superspace::expr::Expr;

/// A phase-space point `(x, ξ, θ, π)` at time `t`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowState {
    pub t: f64,
    pub x: Vec<Supernumber>,
    pub xi: Vec<Supernumber>,
    pub theta: Vec<Supernumber>,
    pub pi: Vec<Supernumber>,
}

impl FlowState {
    pub fn new(t: f64, x: Vec<Supernumber>, xi: Vec<Supernumber>, theta: Vec<Supernumber>, pi: Vec<Supernumber>) -> Result<Self> {
        if x.len() != xi.len() || theta.len() != pi.len() {
            return Err(Error::ShapeMismatch(format!("{} positions with {} momenta, {} odd positions with {} odd momenta", x.len(), xi.len(), theta.len(), pi.len())));
        }
        for (name, v, want) in [("x", &x, Parity::Even), ("ξ", &xi, Parity::Even), ("θ", &theta, Parity::Odd), ("π", &pi, Parity::Odd)] {
            for (j, e) in v.iter().enumerate() {
                if !e.is_zero() && e.parity() != want {
                    return Err(Error::Parity(format!("{name}_{} = {e} is not {want:?}", j + 1)));
                }
            }
        }
        Ok(FlowState { t, x, xi, theta, pi })
    }

    pub fn m(&self) -> usize {
        self.x.len()
    }

    pub fn n(&self) -> usize {
        self.theta.len()
    }

    fn flat(&self) -> Vec<Supernumber> {
        self.x.iter().chain(&self.xi).chain(&self.theta).chain(&self.pi).cloned().collect()
    }

    fn from_flat(t: f64, m: usize, n: usize, v: Vec<Supernumber>) -> Self {
        let mut it = v.into_iter();
        let mut take = |k: usize| (&mut it).take(k).collect::<Vec<_>>();
        let x = take(m);
        let xi = take(m);
        let theta = take(n);
        let pi = take(n);
        FlowState { t, x, xi, theta, pi }
    }

    /// Largest coefficient difference over all components.
    pub fn max_diff(&self, o: &FlowState) -> f64 {
        self.flat().iter().zip(o.flat().iter()).map(|(a, b)| a.max_diff(b)).fold(0.0, f64::max)
    }

    /// Keep only monomials of degree ≤ `k` in every component.
    pub fn truncate(&self, k: u32) -> FlowState {
        let cut = |v: &Vec<Supernumber>| v.iter().map(|e| (0..=k).map(|d| e.degree_filter(d)).sum()).collect();
        FlowState { t: self.t, x: cut(&self.x), xi: cut(&self.xi), theta: cut(&self.theta), pi: cut(&self.pi) }
    }
}

pub type HamiltonianFn = dyn Fn(&Supernumber, &[Supernumber], &[Supernumber], &[Supernumber], &[Supernumber]) -> Result<Supernumber> + Send + Sync;

/// `ℋ(t, x, ξ, θ, π)` on `T*ℝ^{m|n}`, evaluated in Λ; derivatives come from [`crate::dual`].
#[derive(Clone)]
pub struct SuperHamiltonian {
    m: usize,
    n: usize,
    f: Arc<HamiltonianFn>,
}

impl std::fmt::Debug for SuperHamiltonian {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "SuperHamiltonian(m={}, n={})", self.m, self.n)
    }
}

fn check_exprs(exprs: &[&Expr], arity: usize) -> Result<()> {
    for e in exprs {
        if e.arity() > arity {
            return Err(Error::ShapeMismatch(format!("{e} uses more than {arity} variables")));
        }
    }
    Ok(())
}

impl SuperHamiltonian {
    pub fn new(m: usize, n: usize, f: impl Fn(&Supernumber, &[Supernumber], &[Supernumber], &[Supernumber], &[Supernumber]) -> Result<Supernumber> + Send + Sync + 'static) -> Self {
        SuperHamiltonian { m, n, f: Arc::new(f) }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The free Weyl symbol on `T*ℝ^{3|2}`.
    pub fn free_weyl(params: WeylSymbolParams) -> Self {
        Self::new(3, 2, move |_, _, xi, th, pi| Ok(params.symbol(xi, th, pi)))
    }

    /// `Σ_j cσ_j(θ,π)(ξ_j − (e/c)A_j(t,x)) + eA₀(t,x)` with
    /// `σ₁ = θ₁θ₂ + ħ⁻²π₁π₂`, `σ₂ = i(θ₁θ₂ − ħ⁻²π₁π₂)`, `σ₃ = −iħ⁻¹(θ₁π₁ + θ₂π₂)`.
    /// The potentials are expressions in `(t, q₁, q₂, q₃)`.
    pub fn em_weyl(c: f64, e: f64, hbar: f64, a: [Expr; 3], a0: Expr) -> Result<Self> {
        check_exprs(&[&a[0], &a[1], &a[2], &a0], 4)?;
        if hbar == 0.0 || c == 0.0 {
            return Err(Error::Domain("c and ħ must be nonzero".into()));
        }
        Ok(Self::new(3, 2, move |t, x, xi, th, pi| {
            let args = [t.clone(), x[0].clone(), x[1].clone(), x[2].clone()];
            let th12 = &th[0] * &th[1];
            let pi12 = (&pi[0] * &pi[1]).scale(1.0 / (hbar * hbar));
            let sigma = [&th12 + &pi12, (&th12 - &pi12).scale(I), (&th[0] * &pi[0] + &th[1] * &pi[1]).scale(-I / hbar)];
            let mut out = a0.eval_super(&args)?.scale(e);
            for j in 0..3 {
                let kinetic = &xi[j] - &a[j].eval_super(&args)?.scale(e / c);
                out += &(&sigma[j] * &kinetic).scale(c);
            }
            Ok(out)
        }))
    }

    /// `−½ξ² − ω²x²/2 − ⱪ⁻¹ωθπ` on `T*ℝ^{1|1}`.
    pub fn susy_oscillator(omega: f64, kappa: C64) -> Self {
        Self::new(1, 1, move |_, x, xi, th, pi| {
            Ok((&xi[0] * &xi[0]).scale(-0.5) - (&x[0] * &x[0]).scale(0.5 * omega * omega) - (&th[0] * &pi[0]).scale(omega / kappa))
        })
    }

    fn check_shape(&self, s: &FlowState) -> Result<()> {
        if s.m() != self.m || s.n() != self.n {
            return Err(Error::ShapeMismatch(format!("state is ({}|{}), Hamiltonian is ({}|{})", s.m(), s.n(), self.m, self.n)));
        }
        Ok(())
    }

    fn call_packed(&self, v: &[Supernumber]) -> Result<Supernumber> {
        let (m, n) = (self.m, self.n);
        (self.f)(&v[0], &v[1..1 + m], &v[1 + m..1 + 2 * m], &v[1 + 2 * m..1 + 2 * m + n], &v[1 + 2 * m + n..1 + 2 * m + 2 * n])
    }

    fn packed(&self, s: &FlowState) -> Vec<Supernumber> {
        let l = s.flat().iter().map(|e| e.num_generators()).max().unwrap_or(0);
        let mut v = vec![Supernumber::scalar(l, s.t)];
        v.extend(s.flat());
        v
    }

    /// `ℋ` at the state.
    pub fn value(&self, s: &FlowState) -> Result<Supernumber> {
        self.check_shape(s)?;
        self.call_packed(&self.packed(s))
    }

    /// `∂ℋ/∂t` at the state.
    pub fn partial_t(&self, s: &FlowState) -> Result<Supernumber> {
        self.check_shape(s)?;
        even_partial(&|v: &[Supernumber]| self.call_packed(v), &self.packed(s), 0)
    }

    /// `(∂ℋ/∂x, ∂ℋ/∂ξ, ∂ℋ/∂θ, ∂ℋ/∂π)`, odd ones as left derivatives.
    pub fn gradient(&self, s: &FlowState) -> Result<[Vec<Supernumber>; 4]> {
        self.check_shape(s)?;
        let v = self.packed(s);
        let f = |w: &[Supernumber]| self.call_packed(w);
        let (m, n) = (self.m, self.n);
        let even = |lo: usize, k: usize| (lo..lo + k).map(|j| even_partial(&f, &v, j)).collect::<Result<Vec<_>>>();
        let odd = |lo: usize, k: usize| (lo..lo + k).map(|j| odd_partial(&f, &v, j)).collect::<Result<Vec<_>>>();
        Ok([even(1, m)?, even(1 + m, m)?, odd(1 + 2 * m, n)?, odd(1 + 2 * m + n, n)?])
    }

    /// Right-hand side of the flow, flattened as `(ẋ, ξ̇, θ̇, π̇)`.
    fn velocity(&self, s: &FlowState, odd_scale: C64) -> Result<Vec<Supernumber>> {
        let [hx, hxi, hth, hpi] = self.gradient(s)?;
        let mut out = hxi;
        out.extend(hx.iter().map(|d| -d));
        out.extend(hpi.iter().map(|d| d.scale(-odd_scale)));
        out.extend(hth.iter().map(|d| d.scale(-odd_scale)));
        Ok(out)
    }
}

/// Step control for [`super_hamilton_flow`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlowConfig {
    pub t_end: f64,
    pub step: f64,
    /// `κ` in `θ̇ = −κ∂ℋ/∂π, π̇ = −κ∂ℋ/∂θ`.
    pub odd_scale: C64,
    /// Keep every k-th state; the final state is always kept.
    pub record_every: usize,
}

impl FlowConfig {
    pub const MAX_STEPS: usize = 10_000_000;

    pub fn new(t_end: f64, step: f64) -> Self {
        FlowConfig { t_end, step, odd_scale: ONE, record_every: 1 }
    }

    pub fn with_odd_scale(self, odd_scale: C64) -> Self {
        FlowConfig { odd_scale, ..self }
    }

    pub fn with_record_every(self, record_every: usize) -> Self {
        FlowConfig { record_every: record_every.max(1), ..self }
    }
}

fn axpy(base: &[Supernumber], h: f64, dir: &[Supernumber]) -> Vec<Supernumber> {
    base.iter().zip(dir).map(|(b, d)| b + &d.scale(h)).collect()
}

/// RK4 trajectory from `initial.t` to `cfg.t_end`; the last step is shortened to land on `t_end`.
pub fn super_hamilton_flow(h: &SuperHamiltonian, initial: &FlowState, cfg: &FlowConfig) -> Result<Vec<FlowState>> {
    h.check_shape(initial)?;
    let span = cfg.t_end - initial.t;
    if !(cfg.step.is_finite() && cfg.step > 0.0) || !span.is_finite() || span < 0.0 {
        return Err(Error::StepGuard(format!("step {} over [{}, {}]", cfg.step, initial.t, cfg.t_end)));
    }
    let steps = (span / cfg.step - 1e-9).ceil().max(0.0);
    if steps > FlowConfig::MAX_STEPS as f64 {
        return Err(Error::StepGuard(format!("{steps} steps exceed the limit of {}", FlowConfig::MAX_STEPS)));
    }
    let steps = steps as usize;
    let energy = h.value(initial)?;
    if !energy.is_zero() && energy.parity() != Parity::Even {
        return Err(Error::Parity(format!("ℋ must be even, got {energy}")));
    }
    let (m, n) = (initial.m(), initial.n());
    let mut state = initial.clone();
    let mut out = vec![state.clone()];
    for k in 0..steps {
        let t0 = state.t;
        let dt = if k + 1 == steps { cfg.t_end - t0 } else { cfg.step };
        let y = state.flat();
        let at = |t: f64, v: Vec<Supernumber>| FlowState::from_flat(t, m, n, v);
        let k1 = h.velocity(&state, cfg.odd_scale)?;
        let k2 = h.velocity(&at(t0 + dt / 2.0, axpy(&y, dt / 2.0, &k1)), cfg.odd_scale)?;
        let k3 = h.velocity(&at(t0 + dt / 2.0, axpy(&y, dt / 2.0, &k2)), cfg.odd_scale)?;
        let k4 = h.velocity(&at(t0 + dt, axpy(&y, dt, &k3)), cfg.odd_scale)?;
        let next: Vec<Supernumber> = (0..y.len()).map(|i| &y[i] + &(&k1[i] + &k2[i].scale(2.0) + k3[i].scale(2.0) + &k4[i]).scale(dt / 6.0)).collect();
        if next.iter().any(|e| e.terms().iter().any(|t| !t.1.is_finite())) {
            return Err(Error::StepGuard(format!("state became non-finite at t = {}", t0 + dt)));
        }
        state = at(t0 + dt, next);
        if (k + 1) % cfg.record_every == 0 || k + 1 == steps {
            out.push(state.clone());
        }
    }
    Ok(out)
}

/// Exact free Weyl flow for a soul-free real momentum: `ξ` constant, the odd variables evolve
/// by `exp(tM)` with `M` written out by hand, and `x` integrates `∂ℋ/∂ξ` by Gauss–Legendre.
pub fn free_weyl_closed_form(params: &WeylSymbolParams, initial: &FlowState, t: f64) -> Result<FlowState> {
    if initial.m() != 3 || initial.n() != 2 {
        return Err(Error::ShapeMismatch("free Weyl flow lives on T*ℝ^{3|2}".into()));
    }
    if initial.xi.iter().any(|x| !x.soul().is_zero() || x.body().im != 0.0) {
        return Err(Error::Domain("the closed form needs a real, soul-free momentum".into()));
    }
    let p: Vec<f64> = initial.xi.iter().map(|x| x.body().re).collect();
    let (c, k) = (C64::new(params.c, 0.0), params.kappa);
    let (zeta, zeta_bar) = (C64::new(p[0], p[1]), C64::new(p[0], -p[1]));
    let d = -I * c * p[2] / k;
    let q = c * zeta_bar / (k * k);
    let z = C64::new(0.0, 0.0);
    #[rustfmt::skip]
    let gen = Matrix4::new(
        d, z, z, -q,
        z, d, q, z,
        z, -c * zeta, -d, z,
        c * zeta, z, z, -d,
    );
    let v0: Vec<Supernumber> = initial.theta.iter().chain(&initial.pi).cloned().collect();
    let odd_at = |s: f64| -> Vec<Supernumber> {
        let e = (gen * C64::new(s, 0.0)).exp();
        (0..4).map(|i| (0..4).map(|j| v0[j].scale(e[(i, j)])).sum()).collect()
    };
    // ∂ℋ/∂ξ_j as functions of the odd variables.
    let velocity = |v: &[Supernumber]| -> [Supernumber; 3] {
        let th12 = &v[0] * &v[1];
        let pi12 = (&v[2] * &v[3]).scale(ONE / (k * k));
        [(&th12 + &pi12).scale(c), (&th12 - &pi12).scale(I * c), (&v[0] * &v[2] + &v[1] * &v[3]).scale(-I * c / k)]
    };
    let norm = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
    let panels = (2.0 * (params.c * t * norm / k.norm()).abs()).ceil().max(1.0) as usize;
    let (nodes, weights) = gauss_legendre(30);
    let mut x = initial.x.clone();
    let width = t / panels as f64;
    for panel in 0..panels {
        for (node, w) in nodes.iter().zip(&weights) {
            let s = width * (panel as f64 + 0.5 * (node + 1.0));
            let vel = velocity(&odd_at(s));
            for j in 0..3 {
                x[j] += &vel[j].scale(0.5 * width * w);
            }
        }
    }
    let odd = odd_at(t);
    Ok(FlowState { t: initial.t + t, x, xi: initial.xi.clone(), theta: odd[0..2].to_vec(), pi: odd[2..4].to_vec() })
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::grassmann::random_supernumber;

    const L: u32 = 4;

    fn weyl_state(rng: &mut ChaCha8Rng, xi: [f64; 3]) -> FlowState {
        let odd = |rng: &mut ChaCha8Rng| random_supernumber(rng, L, Some(Parity::Odd), 0.4);
        let x = (0..3).map(|_| Supernumber::scalar(L, rng.random_range(-1.0..1.0))).collect();
        let xi = xi.iter().map(|&p| Supernumber::scalar(L, p)).collect();
        let theta = vec![odd(rng), odd(rng)];
        let pi = vec![odd(rng), odd(rng)];
        FlowState::new(0.0, x, xi, theta, pi).unwrap()
    }

    fn zero_potentials() -> [Expr; 3] {
        [Expr::c(0.0), Expr::c(0.0), Expr::c(0.0)]
    }

    #[test]
    fn susy_oscillator_odd_block_decays_exponentially() {
        let (omega, kappa) = (0.8, C64::new(1.3, 0.0));
        let h = SuperHamiltonian::susy_oscillator(omega, kappa);
        let th = Supernumber::generator(2, 1).unwrap();
        let pi = Supernumber::generator(2, 2).unwrap();
        let init = FlowState::new(0.0, vec![Supernumber::scalar(2, 0.5)], vec![Supernumber::scalar(2, 0.0)], vec![th.clone()], vec![pi.clone()]).unwrap();
        let traj = super_hamilton_flow(&h, &init, &FlowConfig::new(1.0, 1e-2)).unwrap();
        let last = traj.last().unwrap();
        let rate = omega / kappa;
        assert!(last.theta[0].max_diff(&th.scale((-rate).exp())) < 1e-9);
        assert!(last.pi[0].max_diff(&pi.scale(rate.exp())) < 1e-9);
        // ẍ = −ω²x.
        assert!((last.x[0].body().re - 0.5 * (omega * 1.0).cos()).abs() < 1e-8);
    }

    #[test]
    fn free_weyl_flow_matches_closed_form_and_conserves_h() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let params = WeylSymbolParams::new(1.2, 0.9, 0.9).unwrap();
        let h = SuperHamiltonian::free_weyl(params);
        let init = weyl_state(&mut rng, [0.7, -0.4, 1.1]);
        let traj = super_hamilton_flow(&h, &init, &FlowConfig::new(1.0, 1e-3).with_record_every(100)).unwrap();
        let h0 = h.value(&init).unwrap();
        for s in &traj {
            assert!(s.xi.iter().zip(&init.xi).all(|(a, b)| a.max_diff(b) == 0.0));
            assert!(h.value(s).unwrap().max_diff(&h0) < 1e-10);
            let exact = free_weyl_closed_form(&params, &init, s.t).unwrap();
            assert!(s.max_diff(&exact) < 1e-10, "t={}: {}", s.t, s.max_diff(&exact));
        }
    }

    #[test]
    fn em_flow_without_field_is_the_free_flow() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        let hbar = 1.1;
        let params = WeylSymbolParams::new(0.9, hbar, hbar).unwrap();
        let em = SuperHamiltonian::em_weyl(0.9, 0.7, hbar, zero_potentials(), Expr::c(0.0)).unwrap();
        let init = weyl_state(&mut rng, [-0.3, 0.8, 0.5]);
        assert!(em.value(&init).unwrap().max_diff(&SuperHamiltonian::free_weyl(params).value(&init).unwrap()) < 1e-15);
        let last = super_hamilton_flow(&em, &init, &FlowConfig::new(1.0, 1e-3)).unwrap().pop().unwrap();
        assert!(last.max_diff(&free_weyl_closed_form(&params, &init, 1.0).unwrap()) < 1e-8);
    }

    #[test]
    fn em_flow_in_a_linear_potential() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let (c, e, hbar) = (1.0, 0.6, 1.0);
        let a0 = Expr::var(3);
        let em = SuperHamiltonian::em_weyl(c, e, hbar, zero_potentials(), a0).unwrap();
        let init = weyl_state(&mut rng, [0.4, 0.3, 0.9]);
        let h0 = em.value(&init).unwrap();
        let traj = super_hamilton_flow(&em, &init, &FlowConfig::new(1.0, 1e-3).with_record_every(50)).unwrap();
        for s in &traj {
            assert!(s.xi[2].max_diff(&init.xi[2].add_scalar(-e * s.t)) < 1e-8);
            assert!(s.xi[0].max_diff(&init.xi[0]) < 1e-8 && s.xi[1].max_diff(&init.xi[1]) < 1e-8);
            assert!(em.value(s).unwrap().max_diff(&h0) < 1e-8);
        }
    }

    #[test]
    fn energy_changes_at_the_rate_of_explicit_time_dependence() {
        let mut rng = ChaCha8Rng::seed_from_u64(34);
        let a0 = Expr::parse("q*q4").unwrap();
        let a = [Expr::parse("0.3*q3").unwrap(), Expr::c(0.0), Expr::parse("sin(q)").unwrap()];
        let em = SuperHamiltonian::em_weyl(1.0, 0.5, 1.0, a, a0).unwrap();
        let init = weyl_state(&mut rng, [0.2, -0.6, 0.4]);
        let dt = 1e-3;
        let traj = super_hamilton_flow(&em, &init, &FlowConfig::new(0.5, dt)).unwrap();
        for i in [50, 200, 400] {
            let lhs = (em.value(&traj[i + 1]).unwrap() - em.value(&traj[i - 1]).unwrap()).scale(1.0 / (2.0 * dt));
            let rhs = em.partial_t(&traj[i]).unwrap();
            assert!(lhs.max_diff(&rhs) < 1e-6, "{}", lhs.max_diff(&rhs));
        }
    }

    #[test]
    fn rk4_converges_at_fourth_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(35);
        let params = WeylSymbolParams::new(1.0, 1.0, 1.0).unwrap();
        let h = SuperHamiltonian::free_weyl(params);
        let init = weyl_state(&mut rng, [1.5, 1.0, -2.0]);
        let exact = free_weyl_closed_form(&params, &init, 1.0).unwrap();
        let err = |step: f64| super_hamilton_flow(&h, &init, &FlowConfig::new(1.0, step)).unwrap().pop().unwrap().max_diff(&exact);
        let (e1, e2) = (err(0.1), err(0.05));
        let ratio = e1 / e2;
        assert!((12.0..20.0).contains(&ratio), "ratio {ratio} ({e1:e}, {e2:e})");
    }

    #[test]
    fn low_degrees_ignore_high_degree_initial_data() {
        let mut rng = ChaCha8Rng::seed_from_u64(36);
        let a0 = Expr::parse("0.2*q2*q3 + 0.1*q^2").unwrap();
        let em = SuperHamiltonian::em_weyl(1.0, 1.0, 1.0, zero_potentials(), a0).unwrap();
        for _ in 0..4 {
            let init = weyl_state(&mut rng, [0.5, 0.2, -0.7]);
            let mut bumped = init.clone();
            for k in 0..2 {
                let extra = random_supernumber(&mut rng, L, Some(Parity::Odd), 0.5).degree_filter(3);
                bumped.theta[k] += &extra;
            }
            bumped.x[0] += &random_supernumber(&mut rng, L, Some(Parity::Even), 0.5).degree_filter(4);
            let cfg = FlowConfig::new(0.3, 1e-2);
            let a = super_hamilton_flow(&em, &init, &cfg).unwrap().pop().unwrap();
            let b = super_hamilton_flow(&em, &bumped, &cfg).unwrap().pop().unwrap();
            assert_eq!(a.truncate(2), b.truncate(2));
            assert!(a.truncate(3).max_diff(&b.truncate(3)) > 0.0);
        }
    }

    #[test]
    fn guards() {
        let h = SuperHamiltonian::susy_oscillator(1.0, ONE);
        let s = FlowState::new(0.0, vec![Supernumber::scalar(1, 1.0)], vec![Supernumber::zero(1)], vec![Supernumber::generator(1, 1).unwrap()], vec![Supernumber::zero(1)]).unwrap();
        for cfg in [FlowConfig::new(1.0, 0.0), FlowConfig::new(1.0, f64::NAN), FlowConfig::new(-1.0, 0.1), FlowConfig::new(1e3, 1e-5)] {
            assert!(matches!(super_hamilton_flow(&h, &s, &cfg), Err(Error::StepGuard(_))));
        }
        let odd_h = SuperHamiltonian::new(1, 1, |_, _, _, th, _| Ok(th[0].clone()));
        assert!(matches!(super_hamilton_flow(&odd_h, &s, &FlowConfig::new(0.1, 0.05)), Err(Error::Parity(_))));
        assert!(matches!(FlowState::new(0.0, vec![Supernumber::generator(1, 1).unwrap()], vec![Supernumber::zero(1)], vec![], vec![]), Err(Error::Parity(_))));
        let blowup = SuperHamiltonian::new(1, 0, |_, x, xi, _, _| Ok((&xi[0] * &xi[0] * &x[0] * &x[0]).scale(-1.0)));
        let s = FlowState::new(0.0, vec![Supernumber::scalar(0, 3.0)], vec![Supernumber::scalar(0, 3.0)], vec![], vec![]).unwrap();
        assert!(matches!(super_hamilton_flow(&blowup, &s, &FlowConfig::new(50.0, 0.5)), Err(Error::StepGuard(_))));
    }
}
