//! Heat-kernel regulated Witten index of the harmonic SUSY oscillator in d dimensions.
//!
//! In the LH form the kernel is `e^{−S(t,x̄,x̲)}∏_j √(ω_j/(2π sinh ω_j t))` times the odd part
//! `K = ∏_j (e^{ω_j t/2} θ̲_j + e^{−ω_j t/2} θ̄_j)`. The supertrace restricts to the
//! diagonal `x̄ = x̲`, `θ̄ = −θ̲`, and integrates both.

use crate::berezin::{berezin_top, gaussian_body_moment};
use crate::error::{Error, Result};
use crate::grassmann::Supernumber;

fn check(omegas: &[f64], t: f64) -> Result<()> {
    if omegas.is_empty() || omegas.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
        return Err(Error::Domain(format!("frequencies must be positive, got {omegas:?}")));
    }
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::Domain(format!("the kernel is singular at t = {t}")));
    }
    Ok(())
}

/// Odd part of the kernel in `Λ_{2d}`: `θ̲_j` is generator `j`, `θ̄_j` is generator `d + j`.
pub fn lh_odd_kernel(omegas: &[f64], t: f64) -> Result<Supernumber> {
    check(omegas, t)?;
    let d = omegas.len();
    let l = 2 * d as u32;
    let mut k = Supernumber::one(l);
    for (j, w) in omegas.iter().enumerate() {
        let lower = Supernumber::generator(l, j + 1)?.scale((w * t / 2.0).exp());
        let upper = Supernumber::generator(l, d + j + 1)?.scale((-w * t / 2.0).exp());
        k = k * (lower + upper);
    }
    Ok(k)
}

/// `∫dθ̲ K(θ̄, θ̲) θ̲^a` as an element of `Λ_{2d}` depending only on `θ̄`; bit `j−1` of `a` selects `θ̲_j`.
pub fn lh_sector_image(omegas: &[f64], t: f64, a: u32) -> Result<Supernumber> {
    let k = lh_odd_kernel(omegas, t)?;
    let d = omegas.len();
    if a >> d != 0 {
        return Err(Error::ShapeMismatch(format!("sector mask {a:#b} uses more than {d} odd variables")));
    }
    let theta_a = Supernumber::monomial(2 * d as u32, a, 1.0)?;
    Ok((k * theta_a).berezin((1u32 << d) - 1))
}

/// `(1/√(2π)) ∫dx e^{−S(t,x,x)} √(ω/sinh ωt)` for one oscillator: `S(t,x,x) = γx²/2`.
fn mehler_trace(w: f64, t: f64) -> Result<Supernumber> {
    // (cosh ωt − 1)/sinh ωt = tanh(ωt/2).
    let gamma = 2.0 * w * (w * t / 2.0).tanh();
    let integral = gaussian_body_moment(&Supernumber::scalar(0, gamma), &Supernumber::zero(0), 0)?;
    Ok(integral.scale((w / (2.0 * std::f64::consts::PI * (w * t).sinh())).sqrt()))
}

/// `str 𝒱_t`; identically 1.
pub fn witten_supertrace(omegas: &[f64], t: f64) -> Result<Supernumber> {
    let k = lh_odd_kernel(omegas, t)?;
    let d = omegas.len();
    let mut images: Vec<Supernumber> = (1..=d).map(|j| Supernumber::generator(d as u32, j)).collect::<Result<_>>()?;
    images.extend((1..=d).map(|j| Supernumber::generator(d as u32, j).map(|g| -g)).collect::<Result<Vec<_>>>()?);
    let odd = berezin_top(&k.substitute(&images), 0, d);
    let mut even = Supernumber::one(0);
    for &w in omegas {
        even = even * mehler_trace(w, t)?;
    }
    // Only the top monomial survives the θ̲ integration, so `odd` is a pure number.
    Ok(Supernumber::scalar(0, odd.body()) * even)
}
