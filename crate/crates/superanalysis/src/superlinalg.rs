//! Supermatrices over Λ_L: block structure, supertrace, Berezinian, inverse, Pfaffian,
//! generic diagonalization and the Liouville identity `sdet X(t) = exp ∫ str M`.
//!
//! A `(m|n)×(r|s)` supermatrix is stored row-major as a dense grid with blocks
//! `[[A (m×r), C (m×s)], [D (n×r), B (n×s)]]`. Even matrices have even `A`, `B` and odd
//! `C`, `D`; odd matrices swap these parities.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grassmann::{Parity, Supernumber, C64, ONE};

/// Square grid of pairwise-commuting (even) supernumbers.
pub type EvenGrid = Vec<Vec<Supernumber>>;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Supermatrix {
    pub m: usize,
    pub n: usize,
    pub r: usize,
    pub s: usize,
    pub parity: MatrixParity,
    entries: Vec<Supernumber>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum MatrixParity {
    Even,
    Odd,
}

impl MatrixParity {
    fn bit(self) -> u8 {
        match self {
            MatrixParity::Even => 0,
            MatrixParity::Odd => 1,
        }
    }

    fn from_bit(b: u8) -> Self {
        if b.is_multiple_of(2) {
            MatrixParity::Even
        } else {
            MatrixParity::Odd
        }
    }
}

fn generators_of(entries: &[Supernumber]) -> u32 {
    entries.iter().map(|e| e.num_generators()).max().unwrap_or(0)
}

impl Supermatrix {
    /// Build and check block parities. Zero entries are allowed anywhere.
    pub fn new(m: usize, n: usize, r: usize, s: usize, parity: MatrixParity, entries: Vec<Supernumber>) -> Result<Self> {
        if entries.len() != (m + n) * (r + s) {
            return Err(Error::ShapeMismatch(format!("{} entries for a ({m}|{n})x({r}|{s}) matrix", entries.len())));
        }
        let mat = Supermatrix { m, n, r, s, parity, entries };
        for i in 0..m + n {
            for j in 0..r + s {
                let e = mat.get(i, j);
                if e.is_zero() {
                    continue;
                }
                let want_even = ((i >= m) != (j >= r)) == (parity == MatrixParity::Odd);
                let ok = if want_even { e.parity() == Parity::Even } else { e.parity() == Parity::Odd };
                if !ok {
                    return Err(Error::Parity(format!("entry ({i},{j}) = {e} has the wrong parity")));
                }
            }
        }
        Ok(mat)
    }

    /// Even matrix from blocks given as row-major grids.
    pub fn from_blocks(a: &[Vec<Supernumber>], c: &[Vec<Supernumber>], d: &[Vec<Supernumber>], b: &[Vec<Supernumber>]) -> Result<Self> {
        let m = a.len().max(c.len());
        let n = d.len().max(b.len());
        let r = a.first().map(|x| x.len()).or(d.first().map(|x| x.len())).unwrap_or(0);
        let s = c.first().map(|x| x.len()).or(b.first().map(|x| x.len())).unwrap_or(0);
        let l = [a, c, d, b].iter().flat_map(|g| g.iter().flatten()).map(|e| e.num_generators()).max().unwrap_or(0);
        let pick = |g: &[Vec<Supernumber>], i: usize, j: usize| g.get(i).and_then(|row| row.get(j)).cloned().unwrap_or_else(|| Supernumber::zero(l));
        let mut entries = Vec::with_capacity((m + n) * (r + s));
        for i in 0..m + n {
            for j in 0..r + s {
                entries.push(match (i < m, j < r) {
                    (true, true) => pick(a, i, j),
                    (true, false) => pick(c, i, j - r),
                    (false, true) => pick(d, i - m, j),
                    (false, false) => pick(b, i - m, j - r),
                });
            }
        }
        Self::new(m, n, r, s, MatrixParity::Even, entries)
    }

    pub fn identity(m: usize, n: usize, l: u32) -> Self {
        let k = m + n;
        let entries = (0..k * k).map(|idx| if idx / k == idx % k { Supernumber::one(l) } else { Supernumber::zero(l) }).collect();
        Supermatrix { m, n, r: m, s: n, parity: MatrixParity::Even, entries }
    }

    pub fn zeros(m: usize, n: usize, r: usize, s: usize, parity: MatrixParity, l: u32) -> Self {
        Supermatrix { m, n, r, s, parity, entries: vec![Supernumber::zero(l); (m + n) * (r + s)] }
    }

    pub fn rows(&self) -> usize {
        self.m + self.n
    }

    pub fn cols(&self) -> usize {
        self.r + self.s
    }

    pub fn num_generators(&self) -> u32 {
        generators_of(&self.entries)
    }

    pub fn get(&self, i: usize, j: usize) -> &Supernumber {
        &self.entries[i * self.cols() + j]
    }

    /// Replace an entry without a parity check.
    pub fn set(&mut self, i: usize, j: usize, v: Supernumber) {
        let c = self.cols();
        self.entries[i * c + j] = v;
    }

    pub fn entries(&self) -> &[Supernumber] {
        &self.entries
    }

    fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Vec<Vec<Supernumber>> {
        (r0..r1).map(|i| (c0..c1).map(|j| self.get(i, j).clone()).collect()).collect()
    }

    pub fn block_a(&self) -> Vec<Vec<Supernumber>> {
        self.block(0, self.m, 0, self.r)
    }

    pub fn block_c(&self) -> Vec<Vec<Supernumber>> {
        self.block(0, self.m, self.r, self.r + self.s)
    }

    pub fn block_d(&self) -> Vec<Vec<Supernumber>> {
        self.block(self.m, self.m + self.n, 0, self.r)
    }

    pub fn block_b(&self) -> Vec<Vec<Supernumber>> {
        self.block(self.m, self.m + self.n, self.r, self.r + self.s)
    }

    /// Body matrix `M_B`.
    pub fn body(&self) -> DMatrix<C64> {
        DMatrix::from_fn(self.rows(), self.cols(), |i, j| self.get(i, j).body())
    }

    pub fn is_square(&self) -> bool {
        self.m == self.r && self.n == self.s
    }

    pub fn mul(&self, o: &Supermatrix) -> Result<Supermatrix> {
        if self.r != o.m || self.s != o.n {
            return Err(Error::ShapeMismatch(format!("({}|{}) columns against ({}|{}) rows", self.r, self.s, o.m, o.n)));
        }
        let l = self.num_generators().max(o.num_generators());
        let mut entries = Vec::with_capacity(self.rows() * o.cols());
        for i in 0..self.rows() {
            for j in 0..o.cols() {
                let mut acc = Supernumber::zero(l);
                for k in 0..self.cols() {
                    let a = self.get(i, k);
                    let b = o.get(k, j);
                    if !a.is_zero() && !b.is_zero() {
                        acc += a * b;
                    }
                }
                entries.push(acc);
            }
        }
        Ok(Supermatrix { m: self.m, n: self.n, r: o.r, s: o.s, parity: MatrixParity::from_bit(self.parity.bit() + o.parity.bit()), entries })
    }

    fn zip(&self, o: &Supermatrix, f: impl Fn(&Supernumber, &Supernumber) -> Supernumber) -> Result<Supermatrix> {
        if (self.m, self.n, self.r, self.s) != (o.m, o.n, o.r, o.s) || self.parity != o.parity {
            return Err(Error::ShapeMismatch("operands differ in shape or parity".into()));
        }
        Ok(Supermatrix { entries: self.entries.iter().zip(&o.entries).map(|(a, b)| f(a, b)).collect(), ..self.clone() })
    }

    pub fn add(&self, o: &Supermatrix) -> Result<Supermatrix> {
        self.zip(o, |a, b| a + b)
    }

    pub fn sub(&self, o: &Supermatrix) -> Result<Supermatrix> {
        self.zip(o, |a, b| a - b)
    }

    pub fn scale(&self, c: impl Into<C64>) -> Supermatrix {
        let c = c.into();
        Supermatrix { entries: self.entries.iter().map(|e| e.scale(c)).collect(), ..self.clone() }
    }

    /// `c·M` for an even supernumber `c`.
    pub fn scale_even(&self, c: &Supernumber) -> Supermatrix {
        Supermatrix { entries: self.entries.iter().map(|e| c * e).collect(), ..self.clone() }
    }

    pub fn max_diff(&self, o: &Supermatrix) -> f64 {
        self.entries.iter().zip(&o.entries).map(|(a, b)| a.max_diff(b)).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|e| e.max_abs()).fold(0.0, f64::max)
    }

    /// Super-transpose `[[ᵗA, ᵗD], [-ᵗC, ᵗB]]` (even case; odd matrices flip the other pair).
    pub fn supertranspose(&self) -> Supermatrix {
        let (rows, cols) = (self.cols(), self.rows());
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                let e = self.get(j, i);
                let row_odd = i >= self.r;
                let col_odd = j >= self.m;
                let negate = match self.parity {
                    MatrixParity::Even => row_odd && !col_odd,
                    MatrixParity::Odd => !row_odd && col_odd,
                };
                entries.push(if negate { -e } else { e.clone() });
            }
        }
        Supermatrix { m: self.r, n: self.s, r: self.m, s: self.n, parity: self.parity, entries }
    }

    /// `str M = tr A - (-1)^{p(M)} tr B`.
    pub fn str(&self) -> Result<Supernumber> {
        if !self.is_square() {
            return Err(Error::ShapeMismatch("supertrace of a non-square matrix".into()));
        }
        let l = self.num_generators();
        let mut t = Supernumber::zero(l);
        for i in 0..self.m {
            t += self.get(i, i);
        }
        let mut tb = Supernumber::zero(l);
        for i in self.m..self.m + self.n {
            tb += self.get(i, i);
        }
        Ok(match self.parity {
            MatrixParity::Even => t - tb,
            MatrixParity::Odd => t + tb,
        })
    }

    /// Berezinian `det(A - C B⁻¹ D) / det B`, with the `A`-side formula as fallback.
    pub fn sdet(&self) -> Result<Supernumber> {
        self.require_even_square()?;
        let l = self.num_generators();
        let (a, b, c, d) = (self.block_a(), self.block_b(), self.block_c(), self.block_d());
        if self.n == 0 {
            return det_even(&a);
        }
        if let Ok(binv) = even_inverse(&b) {
            let schur = grid_sub(&a, &grid_mul(&grid_mul(&c, &binv, l), &d, l));
            let num = if self.m == 0 { Supernumber::one(l) } else { det_even(&schur)? };
            return Ok(num * det_even(&b)?.inverse()?);
        }
        if let Ok(ainv) = even_inverse(&a) {
            let schur = grid_sub(&b, &grid_mul(&grid_mul(&d, &ainv, l), &c, l));
            return Ok(det_even(&a)? * det_even(&schur)?.inverse()?);
        }
        Err(Error::SingularBody("both diagonal blocks are body-singular".into()))
    }

    /// The `A`-side formula `det A · det(B - D A⁻¹ C)⁻¹`.
    pub fn sdet_a_side(&self) -> Result<Supernumber> {
        self.require_even_square()?;
        let l = self.num_generators();
        let (a, b, c, d) = (self.block_a(), self.block_b(), self.block_c(), self.block_d());
        let ainv = even_inverse(&a)?;
        let schur = grid_sub(&b, &grid_mul(&grid_mul(&d, &ainv, l), &c, l));
        let da = if self.m == 0 { Supernumber::one(l) } else { det_even(&a)? };
        let ds = if self.n == 0 { Supernumber::one(l) } else { det_even(&schur)? };
        Ok(da * ds.inverse()?)
    }

    fn require_even_square(&self) -> Result<()> {
        if !self.is_square() {
            return Err(Error::ShapeMismatch("expected a square supermatrix".into()));
        }
        if self.parity != MatrixParity::Even {
            return Err(Error::Parity("expected an even supermatrix".into()));
        }
        Ok(())
    }

    /// Inverse of an even matrix with body-invertible diagonal blocks.
    pub fn inverse(&self) -> Result<Supermatrix> {
        self.require_even_square()?;
        let l = self.num_generators();
        let (a, b, c, d) = (self.block_a(), self.block_b(), self.block_c(), self.block_d());
        let ainv = even_inverse(&a)?;
        let binv = even_inverse(&b)?;
        let sa = even_inverse(&grid_sub(&a, &grid_mul(&grid_mul(&c, &binv, l), &d, l)))?;
        let sb = even_inverse(&grid_sub(&b, &grid_mul(&grid_mul(&d, &ainv, l), &c, l)))?;
        let c_blk = grid_neg(&grid_mul(&grid_mul(&ainv, &c, l), &sb, l));
        let d_blk = grid_neg(&grid_mul(&grid_mul(&binv, &d, l), &sa, l));
        let mut out = Supermatrix::from_blocks(&sa, &c_blk, &d_blk, &sb)?;
        out.m = self.m;
        out.n = self.n;
        out.r = self.m;
        out.s = self.n;
        Ok(out)
    }

    /// Entrywise map of the even part: `exp(M)` by scaling and squaring with a Taylor core.
    pub fn exp(&self) -> Result<Supermatrix> {
        self.require_even_square()?;
        let k = self.rows();
        let norm = (0..k).map(|i| (0..k).map(|j| self.get(i, j).max_abs()).sum::<f64>()).fold(0.0, f64::max);
        let mut squarings = 0;
        let mut scale = 1.0;
        while norm * scale > 0.25 {
            scale *= 0.5;
            squarings += 1;
        }
        let a = self.scale(scale);
        let l = self.num_generators();
        let mut sum = Supermatrix::identity(self.m, self.n, l);
        let mut term = Supermatrix::identity(self.m, self.n, l);
        for j in 1..40 {
            term = term.mul(&a)?.scale(1.0 / j as f64);
            sum = sum.add(&term)?;
            if term.max_abs() < 1e-18 {
                break;
            }
        }
        for _ in 0..squarings {
            sum = sum.mul(&sum)?;
        }
        Ok(sum)
    }
}

fn grid_mul(a: &[Vec<Supernumber>], b: &[Vec<Supernumber>], l: u32) -> Vec<Vec<Supernumber>> {
    let inner = b.len();
    let cols = b.first().map(|r| r.len()).unwrap_or(0);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut acc = Supernumber::zero(l);
                    for k in 0..inner {
                        if !row[k].is_zero() && !b[k][j].is_zero() {
                            acc += &row[k] * &b[k][j];
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

fn grid_sub(a: &[Vec<Supernumber>], b: &[Vec<Supernumber>]) -> Vec<Vec<Supernumber>> {
    a.iter().zip(b).map(|(x, y)| x.iter().zip(y).map(|(p, q)| p - q).collect()).collect()
}

fn grid_neg(a: &[Vec<Supernumber>]) -> Vec<Vec<Supernumber>> {
    a.iter().map(|x| x.iter().map(|p| -p).collect()).collect()
}

fn grid_generators(a: &[Vec<Supernumber>]) -> u32 {
    a.iter().flatten().map(|e| e.num_generators()).max().unwrap_or(0)
}

/// Leibniz expansion; the reference definition.
pub fn det_leibniz(a: &[Vec<Supernumber>]) -> Supernumber {
    let k = a.len();
    let l = grid_generators(a);
    if k == 0 {
        return Supernumber::one(l);
    }
    let mut perm: Vec<usize> = (0..k).collect();
    let mut total = Supernumber::zero(l);
    fn heap(j: usize, perm: &mut Vec<usize>, a: &[Vec<Supernumber>], total: &mut Supernumber, parity: &mut f64) {
        if j == 1 {
            let mut p = Supernumber::scalar(a[0][0].num_generators().max(total.num_generators()), *parity);
            for (i, &c) in perm.iter().enumerate() {
                p = &p * &a[i][c];
                if p.is_zero() {
                    break;
                }
            }
            *total += &p;
            return;
        }
        for i in 0..j {
            heap(j - 1, perm, a, total, parity);
            if i + 1 < j {
                if j.is_multiple_of(2) {
                    perm.swap(i, j - 1);
                } else {
                    perm.swap(0, j - 1);
                }
                *parity = -*parity;
            }
        }
    }
    let mut parity = 1.0;
    heap(k, &mut perm, a, &mut total, &mut parity);
    total
}

/// Determinant of a grid of even supernumbers: Leibniz up to size 4, pivoted elimination above.
pub fn det_even(a: &[Vec<Supernumber>]) -> Result<Supernumber> {
    let k = a.len();
    if a.iter().any(|r| r.len() != k) {
        return Err(Error::ShapeMismatch("determinant of a non-square grid".into()));
    }
    if k <= 4 {
        return Ok(det_leibniz(a));
    }
    let l = grid_generators(a);
    let mut m: Vec<Vec<Supernumber>> = a.to_vec();
    let mut det = Supernumber::one(l);
    for col in 0..k {
        let (piv, size) = (col..k).map(|r| (r, m[r][col].body().norm())).fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if size <= 0.0 {
            if k <= 6 {
                return Ok(det_leibniz(a));
            }
            return Err(Error::SingularBody(format!("no body-invertible pivot in column {col}")));
        }
        if piv != col {
            m.swap(piv, col);
            det = -det;
        }
        let p = m[col][col].clone();
        let pinv = p.inverse()?;
        det = &det * &p;
        for r in col + 1..k {
            if m[r][col].is_zero() {
                continue;
            }
            let f = &m[r][col] * &pinv;
            for c in col..k {
                let delta = &f * &m[col][c];
                m[r][c] -= &delta;
            }
        }
    }
    Ok(det)
}

/// Inverse of a grid of even supernumbers by Gauss–Jordan with body pivoting.
pub fn even_inverse(a: &[Vec<Supernumber>]) -> Result<Vec<Vec<Supernumber>>> {
    let k = a.len();
    let l = grid_generators(a);
    let mut m: Vec<Vec<Supernumber>> = a.to_vec();
    let mut inv: Vec<Vec<Supernumber>> = (0..k).map(|i| (0..k).map(|j| if i == j { Supernumber::one(l) } else { Supernumber::zero(l) }).collect()).collect();
    let scale = a.iter().flatten().map(|e| e.body().norm()).fold(0.0, f64::max).max(1e-300);
    for col in 0..k {
        let (piv, size) = (col..k).map(|r| (r, m[r][col].body().norm())).fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if size <= 1e-14 * scale {
            return Err(Error::SingularBody(format!("no body-invertible pivot in column {col}")));
        }
        m.swap(piv, col);
        inv.swap(piv, col);
        let pinv = m[col][col].inverse()?;
        for c in 0..k {
            m[col][c] = &m[col][c] * &pinv;
            inv[col][c] = &inv[col][c] * &pinv;
        }
        for r in 0..k {
            if r == col || m[r][col].is_zero() {
                continue;
            }
            let f = m[r][col].clone();
            for c in 0..k {
                let dm = &f * &m[col][c];
                let di = &f * &inv[col][c];
                m[r][c] -= &dm;
                inv[r][c] -= &di;
            }
        }
    }
    Ok(inv)
}

/// Pfaffian by first-row expansion, memoized over the remaining index set.
pub fn pfaffian(b: &[Vec<Supernumber>]) -> Result<Supernumber> {
    let k = b.len();
    let l = grid_generators(b);
    for i in 0..k {
        if b[i].len() != k {
            return Err(Error::ShapeMismatch("Pfaffian of a non-square grid".into()));
        }
        for j in 0..k {
            if (&b[i][j] + &b[j][i]).max_abs() > 1e-12 {
                return Err(Error::NotAntisymmetric);
            }
        }
    }
    if k % 2 == 1 {
        return Ok(Supernumber::zero(l));
    }
    if k > 24 {
        return Err(Error::ShapeMismatch("Pfaffian supports at most 24 rows".into()));
    }
    let mut memo = std::collections::HashMap::new();
    fn rec(set: u32, b: &[Vec<Supernumber>], l: u32, memo: &mut std::collections::HashMap<u32, Supernumber>) -> Supernumber {
        if set == 0 {
            return Supernumber::one(l);
        }
        if let Some(v) = memo.get(&set) {
            return v.clone();
        }
        let first = set.trailing_zeros() as usize;
        let rest = set & !(1 << first);
        let mut acc = Supernumber::zero(l);
        let mut pos = 0;
        let mut it = rest;
        while it != 0 {
            let j = it.trailing_zeros() as usize;
            it &= it - 1;
            if !b[first][j].is_zero() {
                let sub = rec(rest & !(1 << j), b, l, memo);
                let term = &b[first][j] * &sub;
                if pos % 2 == 0 {
                    acc += &term;
                } else {
                    acc -= &term;
                }
            }
            pos += 1;
        }
        memo.insert(set, acc.clone());
        acc
    }
    Ok(rec(((1u64 << k) - 1) as u32, b, l, &mut memo))
}

/// Result of [`diagonalize_generic`]: `X M X⁻¹ = E`.
#[derive(Clone, Debug)]
pub struct Diagonalization {
    pub x: Supermatrix,
    pub x_inv: Supermatrix,
    pub e: Supermatrix,
}

impl Diagonalization {
    pub fn eigenvalues(&self) -> Vec<Supernumber> {
        (0..self.e.rows()).map(|i| self.e.get(i, i).clone()).collect()
    }
}

/// Eigen-decomposition of a complex matrix with distinct eigenvalues; columns of the
/// returned matrix are eigenvectors.
fn body_eigen(a: &DMatrix<C64>) -> Result<(Vec<C64>, DMatrix<C64>)> {
    let k = a.nrows();
    if k == 0 {
        return Ok((vec![], DMatrix::zeros(0, 0)));
    }
    let schur = a.clone().try_schur(1e-15, 10_000).ok_or_else(|| Error::NoConvergence("body Schur decomposition".into()))?;
    let (_, t) = schur.unpack();
    let vals: Vec<C64> = (0..k).map(|i| t[(i, i)]).collect();
    let radius = vals.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1e-300);
    let mut gap = f64::INFINITY;
    for i in 0..k {
        for j in i + 1..k {
            gap = gap.min((vals[i] - vals[j]).norm());
        }
    }
    if gap <= 1e-8 * radius {
        return Err(Error::NonGeneric(gap));
    }
    let mut vecs = DMatrix::<C64>::zeros(k, k);
    for (idx, &lam) in vals.iter().enumerate() {
        let shift = lam + C64::new(1e-10 * radius, 1e-10 * radius);
        let shifted = a - DMatrix::<C64>::identity(k, k) * shift;
        let lu = shifted.lu();
        let mut v = nalgebra::DVector::<C64>::from_fn(k, |i, _| C64::new(1.0 + 0.1 * i as f64, 0.3 * i as f64));
        for _ in 0..4 {
            v = lu.solve(&v).ok_or_else(|| Error::NoConvergence("inverse iteration".into()))?;
            let nv = v.norm();
            v /= C64::new(nv, 0.0);
        }
        let lead = v.iter().copied().fold(C64::new(0.0, 0.0), |best, c| if c.norm() > best.norm() { c } else { best });
        v /= lead;
        vecs.set_column(idx, &v);
    }
    Ok((vals, vecs))
}

fn lift(mat: &DMatrix<C64>, l: u32) -> Vec<Vec<Supernumber>> {
    (0..mat.nrows()).map(|i| (0..mat.ncols()).map(|j| Supernumber::scalar(l, mat[(i, j)])).collect()).collect()
}

/// Generic diagonalization by degree recursion starting from the body eigenbasis.
pub fn diagonalize_generic(mat: &Supermatrix) -> Result<Diagonalization> {
    mat.require_even_square()?;
    let l = mat.num_generators();
    let (m, n) = (mat.m, mat.n);
    let body = mat.body();
    let (va, pa) = body_eigen(&body.view((0, 0), (m, m)).into_owned())?;
    let (vb, pb) = body_eigen(&body.view((m, m), (n, n)).into_owned())?;
    let lambdas: Vec<C64> = va.iter().chain(vb.iter()).copied().collect();
    let radius = lambdas.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1e-300);
    for i in 0..lambdas.len() {
        for j in i + 1..lambdas.len() {
            let g = (lambdas[i] - lambdas[j]).norm();
            if g <= 1e-8 * radius {
                return Err(Error::NonGeneric(g));
            }
        }
    }
    let pa_inv = pa.clone().try_inverse().ok_or_else(|| Error::SingularBody("eigenvector matrix".into()))?;
    let pb_inv = pb.clone().try_inverse().ok_or_else(|| Error::SingularBody("eigenvector matrix".into()))?;
    let zero_mn = |r: usize, c: usize| vec![vec![Supernumber::zero(l); c]; r];
    let x0 = Supermatrix::from_blocks(&lift(&pa_inv, l), &zero_mn(m, n), &zero_mn(n, m), &lift(&pb_inv, l))?;
    let x0_inv = Supermatrix::from_blocks(&lift(&pa, l), &zero_mn(m, n), &zero_mn(n, m), &lift(&pb, l))?;
    let x0 = Supermatrix { r: m, s: n, ..x0 };
    let x0_inv = Supermatrix { r: m, s: n, ..x0_inv };
    let k_mat = x0.mul(mat)?.mul(&x0_inv)?;
    let size = m + n;
    let mut y = Supermatrix::zeros(m, n, m, n, MatrixParity::Even, l);
    let mut e = Supermatrix::zeros(m, n, m, n, MatrixParity::Even, l);
    for i in 0..size {
        e.set(i, i, Supernumber::scalar(l, lambdas[i]));
    }
    let id = Supermatrix::identity(m, n, l);
    for deg in 1..=l {
        let one_y = id.add(&y)?;
        let f = one_y.mul(&k_mat)?.sub(&e.mul(&one_y)?)?;
        for i in 0..size {
            for j in 0..size {
                let fk = f.get(i, j).degree_filter(deg);
                if fk.is_zero() {
                    continue;
                }
                if i == j {
                    let v = e.get(i, i) + &fk;
                    e.set(i, i, v);
                } else {
                    let v = y.get(i, j) + &fk.scale(ONE / (lambdas[i] - lambdas[j]));
                    y.set(i, j, v);
                }
            }
        }
    }
    let one_y = id.add(&y)?;
    let x = one_y.mul(&x0)?;
    let x_inv = x0_inv.mul(&one_y.inverse()?)?;
    Ok(Diagonalization { x, x_inv, e })
}

/// Liouville check: RK4 for `X' = M(t) X`, `X(0) = I`, against `exp ∫₀ᵗ str M` by Simpson.
pub fn sdet_flow_check(m_of_t: &dyn Fn(f64) -> Supermatrix, t_end: f64, h: f64) -> Result<(Supernumber, Supernumber)> {
    let mut steps = (t_end / h).round().max(2.0) as usize;
    if steps % 2 == 1 {
        steps += 1;
    }
    let h = t_end / steps as f64;
    let m0 = m_of_t(0.0);
    m0.require_even_square()?;
    let l = m0.num_generators();
    let mut x = Supermatrix::identity(m0.m, m0.n, l);
    let mut traces = Vec::with_capacity(steps + 1);
    for k in 0..steps {
        let t = k as f64 * h;
        let (ma, mb, mc) = (m_of_t(t), m_of_t(t + 0.5 * h), m_of_t(t + h));
        traces.push(ma.str()?);
        let k1 = ma.mul(&x)?;
        let k2 = mb.mul(&x.add(&k1.scale(0.5 * h))?)?;
        let k3 = mb.mul(&x.add(&k2.scale(0.5 * h))?)?;
        let k4 = mc.mul(&x.add(&k3.scale(h))?)?;
        let incr = k1.add(&k2.scale(2.0))?.add(&k3.scale(2.0))?.add(&k4)?.scale(h / 6.0);
        x = x.add(&incr)?;
        if !(x.max_abs() < 1e12) {
            return Err(Error::StepGuard(format!("state norm exceeded 1e12 at t = {t}")));
        }
    }
    traces.push(m_of_t(t_end).str()?);
    let mut integral = Supernumber::zero(l);
    for (k, tr) in traces.iter().enumerate() {
        let w = if k == 0 || k == steps { 1.0 } else if k % 2 == 1 { 4.0 } else { 2.0 };
        integral += &tr.scale(w * h / 3.0);
    }
    Ok((x.sdet()?, integral.exp()))
}

/// A random even `(m|n)` square supermatrix with body `B0 + I·shift` on the diagonal blocks.
pub fn random_even<R: rand::Rng + ?Sized>(rng: &mut R, m: usize, n: usize, l: u32, shift: f64) -> Supermatrix {
    use crate::grassmann::random_supernumber;
    let k = m + n;
    let mut entries = Vec::with_capacity(k * k);
    for i in 0..k {
        for j in 0..k {
            let diag_block = (i < m) == (j < m);
            let mut e = if diag_block {
                random_supernumber(rng, l, Some(Parity::Even), 0.15)
            } else {
                random_supernumber(rng, l, Some(Parity::Odd), 0.15)
            };
            if diag_block {
                e = e.soul().add_scalar(rng.random_range(-0.5..0.5));
                if i == j {
                    e = e.add_scalar(shift);
                }
            }
            entries.push(e);
        }
    }
    Supermatrix::new(m, n, m, n, MatrixParity::Even, entries).expect("parities by construction")
}

impl std::fmt::Display for Supermatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for i in 0..self.rows() {
            let row: Vec<String> = (0..self.cols()).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl Supermatrix {
    /// JSON grid of supernumbers.
    pub fn to_json(&self) -> String {
        let grid: Vec<Vec<&Supernumber>> = (0..self.rows()).map(|i| (0..self.cols()).map(|j| self.get(i, j)).collect()).collect();
        serde_json::json!({
            "shape": [self.m, self.n, self.r, self.s],
            "parity": if self.parity == MatrixParity::Even { "even" } else { "odd" },
            "entries": grid,
        })
        .to_string()
    }
}
