//! Exact integer matrix algebra: Smith normal form, ranks and homology groups.
//!
//! Entries are arbitrary-precision integers; pivots in Smith reduction grow
//! quickly even for small inputs.

pub mod field;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Dense integer matrix, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> BigInt) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from small integer rows. All rows must share a length;
    /// an empty slice gives a 0×0 matrix.
    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Self {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        assert!(rows.iter().all(|r| r.as_ref().len() == cols), "ragged rows");
        Self::from_fn(rows.len(), cols, |i, j| BigInt::from(rows[i].as_ref()[j]))
    }

    pub fn diagonal(rows: usize, cols: usize, diag: &[i64]) -> Self {
        let mut m = Self::zeros(rows, cols);
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = BigInt::from(*d);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn mul(&self, rhs: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, rhs: &IntMatrix) -> Result<IntMatrix> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::DimensionMismatch("matrix sum".into()));
        }
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect();
        Ok(Self { rows: self.rows, cols: self.cols, data })
    }

    pub fn neg(&self) -> IntMatrix {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| -a).collect() }
    }

    /// Block matrix `[[a, b], [c, d]]`; blocks must agree in shape.
    pub fn block(a: &IntMatrix, b: &IntMatrix, c: &IntMatrix, d: &IntMatrix) -> Result<IntMatrix> {
        if a.rows != b.rows || c.rows != d.rows || a.cols != c.cols || b.cols != d.cols {
            return Err(Error::DimensionMismatch("block shapes".into()));
        }
        let (r0, c0) = (a.rows, a.cols);
        Ok(Self::from_fn(a.rows + c.rows, a.cols + b.cols, |i, j| match (i < r0, j < c0) {
            (true, true) => a[(i, j)].clone(),
            (true, false) => b[(i, j - c0)].clone(),
            (false, true) => c[(i - r0, j)].clone(),
            (false, false) => d[(i - r0, j - c0)].clone(),
        }))
    }

    /// Horizontal concatenation `[self | rhs]`.
    pub fn hcat(&self, rhs: &IntMatrix) -> Result<IntMatrix> {
        if self.rows != rhs.rows {
            return Err(Error::DimensionMismatch("hcat".into()));
        }
        Ok(Self::from_fn(self.rows, self.cols + rhs.cols, |i, j| {
            if j < self.cols { self[(i, j)].clone() } else { rhs[(i, j - self.cols)].clone() }
        }))
    }

    /// Submatrix with the given row and column indices.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> IntMatrix {
        Self::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])].clone())
    }

    /// Entries reduced into `{0, 1}` modulo 2.
    pub fn mod2(&self) -> IntMatrix {
        let two = BigInt::from(2);
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a.mod_floor(&two)).collect(),
        }
    }

    pub fn rank(&self) -> usize {
        smith_normal_form(self).rank()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// row[dst] += k * row[src]
    fn add_row(&mut self, dst: usize, src: usize, k: &BigInt) {
        for j in 0..self.cols {
            let v = &self.data[src * self.cols + j] * k;
            self.data[dst * self.cols + j] += v;
        }
    }

    /// col[dst] += k * col[src]
    fn add_col(&mut self, dst: usize, src: usize, k: &BigInt) {
        for i in 0..self.rows {
            let v = &self.data[i * self.cols + src] * k;
            self.data[i * self.cols + dst] += v;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -&self.data[i * self.cols + j];
            self.data[i * self.cols + j] = v;
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of {}x{}", self.rows, self.cols);
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of {}x{}", self.rows, self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|v| v.to_string()).collect();
            write!(f, "[{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Smith decomposition `U·M·V = D`.
///
/// `v_inv` is kept alongside `v` so kernel coordinates can be read off
/// without a separate inversion.
#[derive(Debug, Clone)]
pub struct SnfResult {
    pub d: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
    pub v_inv: IntMatrix,
}

impl SnfResult {
    /// Nonzero diagonal entries, in order.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        (0..self.d.rows.min(self.d.cols))
            .map(|i| self.d[(i, i)].clone())
            .take_while(|x| !x.is_zero())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors().len()
    }
}

/// Smith normal form by elementary row and column operations.
///
/// The diagonal is nonnegative, nonzero entries come first and each divides
/// the next.
pub fn smith_normal_form(m: &IntMatrix) -> SnfResult {
    let (rows, cols) = (m.rows, m.cols);
    let mut a = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);
    let mut v_inv = IntMatrix::identity(cols);

    let mut t = 0;
    while t < rows.min(cols) {
        // smallest nonzero entry of the trailing block
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                let x = &a[(i, j)];
                if !x.is_zero() && best.map_or(true, |(bi, bj)| x.abs() < a[(bi, bj)].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap_rows(t, pi);
        u.swap_rows(t, pi);
        a.swap_cols(t, pj);
        v.swap_cols(t, pj);
        v_inv.swap_rows(t, pj);

        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                if a[(i, t)].is_zero() {
                    continue;
                }
                let q = -(&a[(i, t)] / &a[(t, t)]);
                a.add_row(i, t, &q);
                u.add_row(i, t, &q);
                if !a[(i, t)].is_zero() {
                    a.swap_rows(t, i);
                    u.swap_rows(t, i);
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                if a[(t, j)].is_zero() {
                    continue;
                }
                let q = -(&a[(t, j)] / &a[(t, t)]);
                a.add_col(j, t, &q);
                v.add_col(j, t, &q);
                // V' = V·E with E = I + q e_t e_jᵀ, so V'^{-1} = (I − q e_t e_jᵀ) V^{-1}
                v_inv.add_row(t, j, &-&q);
                if !a[(t, j)].is_zero() {
                    a.swap_cols(t, j);
                    v.swap_cols(t, j);
                    v_inv.swap_rows(t, j);
                    dirty = true;
                }
            }
            if dirty {
                continue;
            }
            // row and column t are clear; enforce divisibility on the remainder
            let pivot = a[(t, t)].clone();
            let offender = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !a[(i, j)].is_multiple_of(&pivot)));
            match offender {
                Some(i) => {
                    let one = BigInt::one();
                    a.add_row(t, i, &one);
                    u.add_row(t, i, &one);
                }
                None => break,
            }
        }
        if a[(t, t)].is_negative() {
            a.negate_row(t);
            u.negate_row(t);
        }
        t += 1;
    }
    SnfResult { d: a, u, v, v_inv }
}

/// A finitely generated abelian group `ℤ^free_rank ⊕ ⨁ ℤ/tᵢ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct HomologyGroup {
    pub free_rank: usize,
    /// Each entry > 1 and divides the next.
    pub torsion: Vec<BigInt>,
}

impl HomologyGroup {
    pub fn free(rank: usize) -> Self {
        Self { free_rank: rank, torsion: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    /// Dimension of `H ⊗ 𝔽_p` (torsion-product terms are not included).
    pub fn tensor_rank_mod(&self, p: u64) -> usize {
        let p = BigInt::from(p);
        self.free_rank + self.torsion.iter().filter(|t| t.is_multiple_of(&p)).count()
    }
}

/// Rows separated by `;`, e.g. `[1 0; 0 2]`.
impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> =
            (0..self.rows).map(|i| self.row(i).iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")).collect();
        write!(f, "[{}]", rows.join("; "))
    }
}

impl fmt::Display for HomologyGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.torsion.iter().map(|t| format!("Z/{t}")));
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Homology `ker d_out / im d_in` at the middle term of `C_{m+1} → C_m → C_{m-1}`.
///
/// Matrix shapes carry the ambient ranks even when a side is empty.
pub fn homology_at(d_in: &IntMatrix, d_out: &IntMatrix) -> Result<HomologyGroup> {
    if d_in.rows != d_out.cols {
        return Err(Error::DimensionMismatch(format!(
            "d_in has {} rows but d_out has {} columns",
            d_in.rows, d_out.cols
        )));
    }
    if !d_out.mul(d_in)?.is_zero() {
        return Err(Error::CompositionNonzero);
    }
    let ambient = d_in.rows;
    let snf_in = smith_normal_form(d_in);
    let rank_out = d_out.rank();
    let factors = snf_in.invariant_factors();
    // ker d_out is saturated, so the invariant factors of d_in into C_m are
    // those of d_in into ker d_out
    let torsion = factors.iter().filter(|x| !x.is_one()).cloned().collect();
    Ok(HomologyGroup { free_rank: ambient - rank_out - factors.len(), torsion })
}

/// Basis of `ker m` as columns of an integer matrix (a saturated sublattice).
pub fn kernel_basis(m: &IntMatrix) -> IntMatrix {
    let snf = smith_normal_form(m);
    let r = snf.rank();
    let idx: Vec<usize> = (r..m.cols).collect();
    let all: Vec<usize> = (0..m.cols).collect();
    snf.v.select(&all, &idx)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag_of(r: &SnfResult) -> Vec<i64> {
        r.invariant_factors().iter().map(|x| x.try_into().unwrap()).collect()
    }

    fn check_invariants(m: &IntMatrix, r: &SnfResult) {
        assert_eq!(r.u.mul(m).unwrap().mul(&r.v).unwrap(), r.d);
        assert_eq!(r.v.mul(&r.v_inv).unwrap(), IntMatrix::identity(m.cols()));
    }

    #[test]
    fn identity_is_fixed() {
        let m = IntMatrix::identity(2);
        let r = smith_normal_form(&m);
        assert_eq!(r.d, m);
        assert_eq!(r.u, m);
        assert_eq!(r.v, m);
    }

    #[test]
    fn already_diagonal() {
        let m = IntMatrix::from_rows(&[[2]]);
        assert_eq!(smith_normal_form(&m).d, m);
    }

    #[test]
    fn two_by_two_divisors() {
        // gcd of entries is 2 and the only 2x2 minor is -8
        let m = IntMatrix::from_rows(&[[2, 4], [6, 8]]);
        let r = smith_normal_form(&m);
        check_invariants(&m, &r);
        assert_eq!(diag_of(&r), vec![2, 4]);
    }

    #[test]
    fn divisibility_repair() {
        // diag(2, 3) is diagonal but not in Smith form
        let m = IntMatrix::diagonal(2, 2, &[2, 3]);
        let r = smith_normal_form(&m);
        check_invariants(&m, &r);
        assert_eq!(diag_of(&r), vec![1, 6]);
    }

    #[test]
    fn empty_matrices() {
        for (r, c) in [(0, 0), (0, 3), (2, 0)] {
            let m = IntMatrix::zeros(r, c);
            let s = smith_normal_form(&m);
            check_invariants(&m, &s);
            assert_eq!(s.rank(), 0);
        }
    }

    #[test]
    fn homology_of_zero_complex() {
        let h = homology_at(&IntMatrix::zeros(1, 0), &IntMatrix::zeros(0, 1)).unwrap();
        assert_eq!(h, HomologyGroup::free(1));
    }

    #[test]
    fn homology_multiplication_by_two() {
        let h = homology_at(&IntMatrix::from_rows(&[[2]]), &IntMatrix::zeros(1, 1)).unwrap();
        assert_eq!(h, HomologyGroup { free_rank: 0, torsion: vec![BigInt::from(2)] });
        assert_eq!(h.to_string(), "Z/2");
    }

    #[test]
    fn homology_of_torus_cells() {
        let d2 = IntMatrix::zeros(2, 1);
        let d1 = IntMatrix::zeros(1, 2);
        assert_eq!(homology_at(&d1, &IntMatrix::zeros(0, 1)).unwrap(), HomologyGroup::free(1));
        assert_eq!(homology_at(&d2, &d1).unwrap(), HomologyGroup::free(2));
        assert_eq!(homology_at(&IntMatrix::zeros(1, 0), &d2).unwrap(), HomologyGroup::free(1));
    }

    #[test]
    fn nonzero_composite_rejected() {
        let d_in = IntMatrix::from_rows(&[[1]]);
        let d_out = IntMatrix::from_rows(&[[1]]);
        assert_eq!(homology_at(&d_in, &d_out), Err(Error::CompositionNonzero));
        assert!(matches!(
            homology_at(&IntMatrix::zeros(2, 1), &IntMatrix::zeros(1, 3)),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn kernel_basis_spans_kernel() {
        let m = IntMatrix::from_rows(&[[1, 1, 0], [0, 2, 2]]);
        let k = kernel_basis(&m);
        assert_eq!(k.cols(), 1);
        assert!(m.mul(&k).unwrap().is_zero());
    }
}
