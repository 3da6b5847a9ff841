//! Exact first derivatives inside Λ by adjoining fresh generators.
//!
//! For an even slot the argument is shifted by `ε = σ_a σ_b` with two new generators, so
//! `ε² = 0` and `f(x + ε) = f(x) + ε f'(x)` with no truncation. For an odd slot the shift is a
//! single new generator `η`, and `f(θ + η) = f(θ) + η ∂f/∂θ` with the left derivative.
//! Nesting the helpers gives mixed second derivatives.

use crate::error::{Error, Result};
use crate::grassmann::{Parity, Supernumber, MAX_GENERATORS};

/// Drop every term that touches a generator above `l`, and view the result in `Λ_l`.
pub fn restrict(x: &Supernumber, l: u32) -> Supernumber {
    let keep = if l >= 32 { u32::MAX } else { (1u32 << l) - 1 };
    Supernumber::from_masks(l, x.terms().iter().copied().filter(|t| t.0 & !keep == 0)).expect("masks fit Λ_l")
}

fn common_generators(args: &[Supernumber]) -> u32 {
    args.iter().map(|a| a.num_generators()).max().unwrap_or(0)
}

fn widened(args: &[Supernumber], extra: u32) -> Result<(u32, Vec<Supernumber>)> {
    let l = common_generators(args);
    if l + extra > MAX_GENERATORS {
        return Err(Error::TooManyGenerators(l + extra));
    }
    Ok((l, args.iter().map(|a| a.embed(l + extra)).collect()))
}

/// `∂f/∂x_idx` for an even slot.
pub fn even_partial(f: &dyn Fn(&[Supernumber]) -> Result<Supernumber>, args: &[Supernumber], idx: usize) -> Result<Supernumber> {
    let (l, mut shifted) = widened(args, 2)?;
    let eps = Supernumber::monomial(l + 2, 0b11 << l, 1.0)?;
    shifted[idx] += &eps;
    let out = f(&shifted)?;
    Ok(restrict(&out.berezin(0b11 << l), l))
}

/// Left derivative `∂f/∂θ_idx` for an odd slot.
pub fn odd_partial(f: &dyn Fn(&[Supernumber]) -> Result<Supernumber>, args: &[Supernumber], idx: usize) -> Result<Supernumber> {
    let (l, mut shifted) = widened(args, 1)?;
    shifted[idx] += &Supernumber::generator(l + 1, l as usize + 1)?;
    let out = f(&shifted)?;
    Ok(restrict(&out.deriv_generator(l as usize + 1), l))
}

pub fn partial(f: &dyn Fn(&[Supernumber]) -> Result<Supernumber>, args: &[Supernumber], idx: usize, parity: Parity) -> Result<Supernumber> {
    match parity {
        Parity::Odd => odd_partial(f, args, idx),
        _ => even_partial(f, args, idx),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grassmann::C64;

    #[test]
    fn even_partial_matches_hand_derivative() {
        let l = 3;
        let x = Supernumber::make(l, [(vec![], C64::new(0.7, 0.0)), (vec![1, 2], C64::new(0.3, -0.1))]).unwrap();
        let f = |a: &[Supernumber]| Ok(a[0].sin() * &a[0]);
        let got = even_partial(&f, std::slice::from_ref(&x), 0).unwrap();
        let want = x.cos() * &x + x.sin();
        assert!(got.max_diff(&want) < 1e-14);
    }

    #[test]
    fn odd_partial_is_left_derivative() {
        // f = θ₁θ₂ c with θ's given by generators 1, 2: ∂/∂θ₂ gives -θ₁ c.
        let l = 3;
        let t1 = Supernumber::generator(l, 1).unwrap();
        let t2 = Supernumber::generator(l, 2).unwrap();
        let c = Supernumber::make(l, [(vec![], C64::new(2.0, 0.0)), (vec![3], C64::new(0.0, 1.0))]).unwrap();
        let cc = c.clone();
        let f = move |a: &[Supernumber]| Ok(&a[0] * &a[1] * &cc.embed(a[0].num_generators()));
        let got = odd_partial(&f, &[t1.clone(), t2.clone()], 1).unwrap();
        assert!(got.max_diff(&-(&t1 * &c)) < 1e-15);
        let got = odd_partial(&f, &[t1, t2.clone()], 0).unwrap();
        assert!(got.max_diff(&(&t2 * &c)) < 1e-15);
    }

    #[test]
    fn nested_partials_commute_for_even_slots() {
        let l = 0;
        let f = |a: &[Supernumber]| Ok((&a[0] * &a[1]).exp());
        let args = [Supernumber::scalar(l, 0.4), Supernumber::scalar(l, -1.1)];
        let inner = |b: &[Supernumber]| even_partial(&f, b, 1);
        let d = even_partial(&inner, &args, 0).unwrap();
        let want = (1.0 + 0.4 * -1.1) * (0.4f64 * -1.1).exp();
        assert!((d.body().re - want).abs() < 1e-14);
    }
}
