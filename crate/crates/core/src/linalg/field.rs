//! Linear algebra over ℚ and prime fields 𝔽_p.
//!
//! Elements are carried as `BigRational` for both kinds of field; over 𝔽_p
//! they are kept reduced to integers in `[0, p)`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::IntMatrix;
use crate::error::{Error, Result};

pub type Elem = BigRational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Field {
    Rational,
    Prime(u64),
}

impl Field {
    pub fn prime(p: u64) -> Result<Self> {
        if p < 2 || (2..p).take_while(|d| d * d <= p).any(|d| p % d == 0) {
            return Err(Error::Parse(format!("{p} is not prime")));
        }
        Ok(Field::Prime(p))
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            Field::Rational => 0,
            Field::Prime(p) => *p,
        }
    }

    pub fn zero(&self) -> Elem {
        Elem::zero()
    }

    pub fn one(&self) -> Elem {
        Elem::one()
    }

    pub fn from_int(&self, x: &BigInt) -> Elem {
        match self {
            Field::Rational => Elem::from_integer(x.clone()),
            Field::Prime(p) => Elem::from_integer(x.mod_floor(&BigInt::from(*p))),
        }
    }

    fn reduce(&self, x: Elem) -> Elem {
        match self {
            Field::Rational => x,
            Field::Prime(p) => {
                let p = BigInt::from(*p);
                let num = x.numer().mod_floor(&p);
                let den = x.denom().mod_floor(&p);
                let inv = den.modpow(&(&p - 2u32), &p);
                Elem::from_integer((num * inv).mod_floor(&p))
            }
        }
    }

    pub fn add(&self, a: &Elem, b: &Elem) -> Elem {
        self.reduce(a + b)
    }

    pub fn sub(&self, a: &Elem, b: &Elem) -> Elem {
        self.reduce(a - b)
    }

    pub fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        self.reduce(a * b)
    }

    pub fn inv(&self, a: &Elem) -> Elem {
        assert!(!a.is_zero(), "inverse of zero");
        self.reduce(a.recip())
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rational => write!(f, "Q"),
            Field::Prime(p) => write!(f, "F{p}"),
        }
    }
}

impl FromStr for Field {
    type Err = Error;

    /// Accepts `Q`, `Fp:<p>` and `F<p>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("q") {
            return Ok(Field::Rational);
        }
        let digits = s
            .strip_prefix("Fp:")
            .or_else(|| s.strip_prefix("F"))
            .ok_or_else(|| Error::Parse(format!("unknown field `{s}`")))?;
        let p = digits.parse::<u64>().map_err(|e| Error::Parse(format!("field `{s}`: {e}")))?;
        Field::prime(p)
    }
}

/// Dense matrix over a [`Field`], row-major.
#[derive(Clone, PartialEq)]
pub struct FMat {
    rows: usize,
    cols: usize,
    data: Vec<Elem>,
}

impl FMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Elem::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Elem::one();
        }
        m
    }

    pub fn from_int(m: &IntMatrix, k: &Field) -> Self {
        Self { rows: m.rows(), cols: m.cols(), data: m.entries().iter().map(|x| k.from_int(x)).collect() }
    }

    pub fn from_small(rows: usize, cols: usize, vals: &[i64], k: &Field) -> Self {
        assert_eq!(vals.len(), rows * cols);
        Self { rows, cols, data: vals.iter().map(|v| k.from_int(&BigInt::from(*v))).collect() }
    }

    /// Matrix whose columns are the given vectors, each of length `rows`.
    pub fn from_columns(rows: usize, columns: &[Vec<Elem>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows);
            for (i, x) in c.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
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

    pub fn column(&self, j: usize) -> Vec<Elem> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn select(&self, rows: &[usize], cols: &[usize]) -> FMat {
        let mut m = Self::zeros(rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                m[(a, b)] = self[(i, j)].clone();
            }
        }
        m
    }

    pub fn mul(&self, rhs: &FMat, k: &Field) -> Result<FMat> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = &self[(i, l)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let t = k.mul(a, &rhs[(l, j)]);
                    out[(i, j)] = k.add(&out[(i, j)], &t);
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &[Elem], k: &Field) -> Vec<Elem> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                (0..self.cols).fold(k.zero(), |acc, j| k.add(&acc, &k.mul(&self[(i, j)], &v[j])))
            })
            .collect()
    }

    /// Kronecker product `self ⊗ I_n`.
    pub fn kron_identity(&self, n: usize) -> FMat {
        let mut m = Self::zeros(self.rows * n, self.cols * n);
        for i in 0..self.rows {
            for j in 0..self.cols {
                for t in 0..n {
                    m[(i * n + t, j * n + t)] = self[(i, j)].clone();
                }
            }
        }
        m
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self, k: &Field) -> (FMat, Vec<usize>) {
        let mut a = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..a.cols {
            if r == a.rows {
                break;
            }
            let Some(p) = (r..a.rows).find(|&i| !a[(i, c)].is_zero()) else { continue };
            for j in 0..a.cols {
                a.data.swap(r * a.cols + j, p * a.cols + j);
            }
            let inv = k.inv(&a[(r, c)]);
            for j in 0..a.cols {
                a[(r, j)] = k.mul(&a[(r, j)], &inv);
            }
            for i in 0..a.rows {
                if i == r || a[(i, c)].is_zero() {
                    continue;
                }
                let f = a[(i, c)].clone();
                for j in 0..a.cols {
                    let t = k.mul(&f, &a[(r, j)]);
                    a[(i, j)] = k.sub(&a[(i, j)], &t);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (a, pivots)
    }

    pub fn rank(&self, k: &Field) -> usize {
        self.rref(k).1.len()
    }

    /// Basis of the null space, one vector per free column.
    pub fn kernel(&self, k: &Field) -> Vec<Vec<Elem>> {
        let (r, pivots) = self.rref(k);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![k.zero(); self.cols];
                v[f] = k.one();
                for (row, &pc) in pivots.iter().enumerate() {
                    v[pc] = k.sub(&k.zero(), &r[(row, f)]);
                }
                v
            })
            .collect()
    }
}

impl std::ops::Index<(usize, usize)> for FMat {
    type Output = Elem;
    fn index(&self, (i, j): (usize, usize)) -> &Elem {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for FMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Elem {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for FMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FMat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self[(i, j)].to_string()).collect();
            write!(f, "[{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// A subspace of `k^dim` held as a list of independent vectors.
#[derive(Debug, Clone)]
pub struct Subspace {
    pub dim: usize,
    pub basis: Vec<Vec<Elem>>,
}

impl Subspace {
    pub fn zero(dim: usize) -> Self {
        Self { dim, basis: Vec::new() }
    }

    /// Span of arbitrary vectors, pruned to an independent subset.
    pub fn span(dim: usize, vectors: impl IntoIterator<Item = Vec<Elem>>, k: &Field) -> Self {
        let mut s = Self::zero(dim);
        for v in vectors {
            s.try_push(v, k);
        }
        s
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Adds `v` if it is not already in the span; returns whether it was added.
    pub fn try_push(&mut self, v: Vec<Elem>, k: &Field) -> bool {
        assert_eq!(v.len(), self.dim);
        if v.iter().all(Zero::is_zero) {
            return false;
        }
        let mut cols = self.basis.clone();
        cols.push(v.clone());
        if FMat::from_columns(self.dim, &cols).rank(k) > self.basis.len() {
            self.basis.push(v);
            true
        } else {
            false
        }
    }

    pub fn sum(&self, other: &Subspace, k: &Field) -> Subspace {
        let mut s = self.clone();
        for v in &other.basis {
            s.try_push(v.clone(), k);
        }
        s
    }

    pub fn contains(&self, v: &[Elem], k: &Field) -> bool {
        solve(self.dim, &self.basis, v, k).is_some()
    }

    /// Image under a linear map.
    pub fn image(&self, m: &FMat, k: &Field) -> Subspace {
        Subspace::span(m.rows(), self.basis.iter().map(|v| m.apply(v, k)), k)
    }
}

/// Coefficients expressing `y` in terms of `columns`, if `y` lies in their span.
pub fn solve(dim: usize, columns: &[Vec<Elem>], y: &[Elem], k: &Field) -> Option<Vec<Elem>> {
    let n = columns.len();
    let mut aug = columns.to_vec();
    aug.push(y.to_vec());
    let (r, pivots) = FMat::from_columns(dim, &aug).rref(k);
    if pivots.contains(&n) {
        return None;
    }
    let mut x = vec![k.zero(); n];
    for (row, &pc) in pivots.iter().enumerate() {
        x[pc] = r[(row, n)].clone();
    }
    Some(x)
}

/// Presentation of a quotient `top / bottom` (with `bottom ⊆ top`) by
/// representatives of a complement.
#[derive(Debug, Clone)]
pub struct Quotient {
    pub bottom: Subspace,
    pub reps: Vec<Vec<Elem>>,
}

impl Quotient {
    pub fn new(top: &Subspace, bottom: &Subspace, k: &Field) -> Self {
        let mut acc = bottom.clone();
        let mut reps = Vec::new();
        for v in &top.basis {
            if acc.try_push(v.clone(), k) {
                reps.push(v.clone());
            }
        }
        Self { bottom: bottom.clone(), reps }
    }

    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    /// Class of `y` in the complement basis; `None` if `y` is outside `top`.
    pub fn coordinates(&self, y: &[Elem], k: &Field) -> Option<Vec<Elem>> {
        let mut cols = self.bottom.basis.clone();
        cols.extend(self.reps.iter().cloned());
        let x = solve(y.len(), &cols, y, k)?;
        Some(x[self.bottom.rank()..].to_vec())
    }
}
