//! Bounded chain complexes of finitely generated free abelian groups.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::linalg::field::{FMat, Field};
use crate::linalg::{homology_at, HomologyGroup, IntMatrix};

/// `C_d` for `d` in `min_degree .. min_degree + ranks.len()`, with
/// `boundary(d): C_d → C_{d-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainComplex {
    min_degree: i64,
    ranks: Vec<usize>,
    boundaries: Vec<IntMatrix>,
    labels: Vec<Vec<String>>,
}

impl ChainComplex {
    pub fn zero() -> Self {
        Self { min_degree: 0, ranks: Vec::new(), boundaries: Vec::new(), labels: Vec::new() }
    }

    /// `boundaries[i]` is the boundary out of degree `min_degree + i`.
    pub fn new(min_degree: i64, labels: Vec<Vec<String>>, boundaries: Vec<IntMatrix>) -> Result<Self> {
        if labels.len() != boundaries.len() {
            return Err(Error::DimensionMismatch("one boundary per degree".into()));
        }
        let ranks: Vec<usize> = labels.iter().map(Vec::len).collect();
        for (i, d) in boundaries.iter().enumerate() {
            let below = if i == 0 { 0 } else { ranks[i - 1] };
            if d.rows() != below || d.cols() != ranks[i] {
                return Err(Error::DimensionMismatch(format!(
                    "boundary out of degree {} is {}x{}, expected {}x{}",
                    min_degree + i as i64,
                    d.rows(),
                    d.cols(),
                    below,
                    ranks[i]
                )));
            }
        }
        Ok(Self { min_degree, ranks, boundaries, labels })
    }

    /// Complex with unnamed generators.
    pub fn from_ranks(min_degree: i64, ranks: &[usize], boundaries: Vec<IntMatrix>) -> Result<Self> {
        let labels = ranks
            .iter()
            .enumerate()
            .map(|(i, &r)| (0..r).map(|j| format!("e{}_{}", min_degree + i as i64, j)).collect())
            .collect();
        Self::new(min_degree, labels, boundaries)
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }

    pub fn min_degree(&self) -> i64 {
        self.min_degree
    }

    pub fn max_degree(&self) -> i64 {
        self.min_degree + self.ranks.len() as i64 - 1
    }

    pub fn degrees(&self) -> impl Iterator<Item = i64> {
        self.min_degree..self.min_degree + self.ranks.len() as i64
    }

    fn slot(&self, d: i64) -> Option<usize> {
        let i = d - self.min_degree;
        (i >= 0 && (i as usize) < self.ranks.len()).then_some(i as usize)
    }

    pub fn rank(&self, d: i64) -> usize {
        self.slot(d).map_or(0, |i| self.ranks[i])
    }

    pub fn ranks(&self) -> BTreeMap<i64, usize> {
        self.degrees().map(|d| (d, self.rank(d))).collect()
    }

    pub fn labels(&self, d: i64) -> &[String] {
        self.slot(d).map_or(&[], |i| &self.labels[i])
    }

    /// Boundary `C_d → C_{d-1}`; a correctly shaped zero matrix outside the support.
    pub fn boundary(&self, d: i64) -> IntMatrix {
        match self.slot(d) {
            Some(i) => self.boundaries[i].clone(),
            None => IntMatrix::zeros(self.rank(d - 1), self.rank(d)),
        }
    }

    /// Degrees `d` where `∂_{d-1} ∘ ∂_d ≠ 0`.
    pub fn d_squared_failures(&self) -> Vec<i64> {
        self.degrees()
            .filter(|&d| !self.boundary(d - 1).mul(&self.boundary(d)).expect("shapes").is_zero())
            .collect()
    }

    pub fn homology_at(&self, d: i64) -> Result<HomologyGroup> {
        homology_at(&self.boundary(d + 1), &self.boundary(d))
    }

    pub fn homology(&self) -> Result<Vec<(i64, HomologyGroup)>> {
        self.degrees().map(|d| Ok((d, self.homology_at(d)?))).collect()
    }

    /// Betti numbers over a field.
    pub fn betti(&self, k: &Field) -> Vec<(i64, usize)> {
        self.degrees()
            .map(|d| {
                let out = FMat::from_int(&self.boundary(d), k).rank(k);
                let inc = FMat::from_int(&self.boundary(d + 1), k).rank(k);
                (d, self.rank(d) - out - inc)
            })
            .collect()
    }

    /// The same complex with every degree raised by `s`.
    pub fn shifted(&self, s: i64) -> Self {
        Self { min_degree: self.min_degree + s, ..self.clone() }
    }

    /// Mapping cone of `f: self → target`, `cone_m = self_{m-1} ⊕ target_m`.
    /// `f` maps each degree `m` to a `target.rank(m) × self.rank(m)` matrix.
    pub fn mapping_cone(&self, target: &ChainComplex, f: impl Fn(i64) -> IntMatrix) -> Result<ChainComplex> {
        if self.is_empty() && target.is_empty() {
            return Ok(ChainComplex::zero());
        }
        let lo = [self.min_degree + 1, target.min_degree]
            .into_iter()
            .zip([self.is_empty(), target.is_empty()])
            .filter(|(_, e)| !e)
            .map(|(d, _)| d)
            .min()
            .unwrap();
        let hi = [self.max_degree() + 1, target.max_degree()]
            .into_iter()
            .zip([self.is_empty(), target.is_empty()])
            .filter(|(_, e)| !e)
            .map(|(d, _)| d)
            .max()
            .unwrap();
        let mut labels = Vec::new();
        let mut boundaries = Vec::new();
        for m in lo..=hi {
            let mut l: Vec<String> = self.labels(m - 1).iter().map(|s| format!("s:{s}")).collect();
            l.extend(target.labels(m).iter().map(|s| format!("t:{s}")));
            labels.push(l);
            let fm = f(m - 1);
            let rows_a = self.rank(m - 1);
            if fm.rows() != target.rank(m - 1) || fm.cols() != rows_a {
                return Err(Error::DimensionMismatch(format!("chain map in degree {}", m - 1)));
            }
            let d = if m == lo {
                IntMatrix::zeros(0, self.rank(m - 1) + target.rank(m))
            } else {
                IntMatrix::block(
                    &self.boundary(m - 1).neg(),
                    &IntMatrix::zeros(self.rank(m - 2), target.rank(m)),
                    &fm,
                    &target.boundary(m),
                )?
            };
            boundaries.push(d);
        }
        ChainComplex::new(lo, labels, boundaries)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle() -> ChainComplex {
        ChainComplex::from_ranks(0, &[1, 1], vec![IntMatrix::zeros(0, 1), IntMatrix::zeros(1, 1)]).unwrap()
    }

    #[test]
    fn circle_homology() {
        let h = circle().homology().unwrap();
        assert_eq!(h, vec![(0, HomologyGroup::free(1)), (1, HomologyGroup::free(1))]);
    }

    #[test]
    fn shape_errors() {
        assert!(ChainComplex::from_ranks(0, &[1, 1], vec![IntMatrix::zeros(0, 1), IntMatrix::zeros(2, 1)]).is_err());
    }

    #[test]
    fn cone_of_identity_is_acyclic() {
        let c = circle();
        let cone = c.mapping_cone(&c, |m| IntMatrix::identity(c.rank(m))).unwrap();
        assert!(cone.d_squared_failures().is_empty());
        assert!(cone.homology().unwrap().iter().all(|(_, h)| h.is_zero()));
    }

    #[test]
    fn cone_of_zero_map() {
        let c = circle();
        let cone = c.mapping_cone(&c, |m| IntMatrix::zeros(c.rank(m), c.rank(m))).unwrap();
        let total: usize = cone.homology().unwrap().iter().map(|(_, h)| h.free_rank).sum();
        assert_eq!(total, 4);
    }

    #[test]
    fn shift_moves_homology() {
        let h = circle().shifted(3).homology().unwrap();
        assert_eq!(h[0].0, 3);
        assert_eq!(h[1].0, 4);
    }
}
