//! Spectral sequences over a field.
//!
//! [`build_e1`] tensors the chain complex of a flow category with the
//! coefficient ranks of a homology theory at a point. Higher differentials are
//! never derived from moduli data; they enter only through an explicit
//! [`FilteredComplex`] (see [`run_filtered`]) or explicit matrices passed to
//! [`turn_page`].

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::flowcat::FlowCategory;
use crate::linalg::field::{FMat, Field, Quotient, Subspace};
use crate::report::Report;

/// Ranks `h_q(pt)` of a homology theory over a field, on a finite window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoefficientTheory {
    pub name: String,
    pub field: Field,
    pub ranks: BTreeMap<i64, usize>,
}

impl CoefficientTheory {
    /// Ordinary homology: a single copy of the field in degree 0.
    pub fn ordinary(field: Field) -> Self {
        Self { name: format!("H(-;{field})"), field, ranks: BTreeMap::from([(0, 1)]) }
    }

    pub fn new(name: impl Into<String>, field: Field, ranks: impl IntoIterator<Item = (i64, usize)>) -> Self {
        Self { name: name.into(), field, ranks: ranks.into_iter().filter(|(_, r)| *r > 0).collect() }
    }

    pub fn is_ordinary(&self) -> bool {
        self.ranks.len() == 1 && self.ranks.get(&0) == Some(&1)
    }
}

pub type Bidegree = (i64, i64);

/// `E_r` ranks and, optionally, the differential `d_r` keyed by source bidegree.
/// `d_r` has bidegree `(−r, r−1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralPage {
    pub r: usize,
    pub field: Field,
    pub entries: BTreeMap<Bidegree, usize>,
    pub differentials: BTreeMap<Bidegree, FMat>,
}

impl SpectralPage {
    pub fn rank(&self, pq: Bidegree) -> usize {
        self.entries.get(&pq).copied().unwrap_or(0)
    }

    pub fn target(&self, (p, q): Bidegree) -> Bidegree {
        (p - self.r as i64, q + self.r as i64 - 1)
    }

    /// Ranks summed along total degree `p + q`.
    pub fn total_ranks(&self) -> BTreeMap<i64, usize> {
        let mut out = BTreeMap::new();
        for (&(p, q), &r) in &self.entries {
            *out.entry(p + q).or_insert(0) += r;
        }
        out
    }

    pub fn ranks_equal(&self, other: &SpectralPage) -> bool {
        nonzero(&self.entries) == nonzero(&other.entries)
    }

    /// Aligned table, `q` descending down the rows and `p` across.
    pub fn to_text(&self) -> String {
        let mut s = format!("E_{} over {}\n", self.r, self.field);
        let occupied: Vec<Bidegree> = self.entries.iter().filter(|(_, r)| **r > 0).map(|(k, _)| *k).collect();
        if occupied.is_empty() {
            s.push_str("(zero page)\n");
            return s;
        }
        let (pmin, pmax) = (occupied.iter().map(|k| k.0).min().unwrap(), occupied.iter().map(|k| k.0).max().unwrap());
        let (qmin, qmax) = (occupied.iter().map(|k| k.1).min().unwrap(), occupied.iter().map(|k| k.1).max().unwrap());
        let _ = write!(s, "{:>6}", "q\\p");
        for p in pmin..=pmax {
            let _ = write!(s, "{p:>6}");
        }
        s.push('\n');
        for q in (qmin..=qmax).rev() {
            let _ = write!(s, "{q:>6}");
            for p in pmin..=pmax {
                let _ = write!(s, "{:>6}", self.rank((p, q)));
            }
            s.push('\n');
        }
        s
    }

    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct Entry {
            p: i64,
            q: i64,
            rank: usize,
        }
        let entries: Vec<Entry> =
            self.entries.iter().filter(|(_, r)| **r > 0).map(|(&(p, q), &rank)| Entry { p, q, rank }).collect();
        let differential_ranks: Vec<serde_json::Value> = self
            .differentials
            .iter()
            .map(|(&(p, q), d)| serde_json::json!({ "p": p, "q": q, "rank": d.rank(&self.field) }))
            .collect();
        serde_json::json!({
            "page": self.r,
            "field": self.field.to_string(),
            "entries": entries,
            "differential_ranks": differential_ranks,
        })
    }

    pub fn to_tsv(&self) -> String {
        let mut s = String::from("page\tp\tq\trank\n");
        for (&(p, q), &r) in self.entries.iter().filter(|(_, r)| **r > 0) {
            let _ = writeln!(s, "{}\t{p}\t{q}\t{r}", self.r);
        }
        s
    }
}

fn nonzero(m: &BTreeMap<Bidegree, usize>) -> BTreeMap<Bidegree, usize> {
    m.iter().filter(|(_, r)| **r > 0).map(|(k, v)| (*k, *v)).collect()
}

/// `E₁^{p,q} = C_p ⊗ h_q(pt)` with `d₁ = ∂ ⊗ id`.
pub fn build_e1(f: &FlowCategory, h: &CoefficientTheory) -> Result<SpectralPage> {
    let k = h.field;
    let mut entries = BTreeMap::new();
    let mut differentials = BTreeMap::new();
    for p in f.indices() {
        let n = f.objects_at(p).len();
        let d = f.boundary_matrix(p)?;
        for (&q, &hq) in &h.ranks {
            entries.insert((p, q), n * hq);
            if !f.objects_at(p - 1).is_empty() {
                differentials.insert((p, q), FMat::from_int(&d, &k).kron_identity(hq));
            }
        }
    }
    Ok(SpectralPage { r: 1, field: k, entries, differentials })
}

/// `E_{r+1}` as the homology of `(E_r, d)`. `d` is keyed by source bidegree;
/// missing keys are zero maps.
pub fn turn_page(page: &SpectralPage, d: &BTreeMap<Bidegree, FMat>) -> Result<SpectralPage> {
    let k = page.field;
    for (&src, m) in d {
        let tgt = page.target(src);
        if m.cols() != page.rank(src) || m.rows() != page.rank(tgt) {
            return Err(Error::BidegreeMismatch(format!(
                "d_{} from {src:?} to {tgt:?} should be {}x{}, got {}x{}",
                page.r,
                page.rank(tgt),
                page.rank(src),
                m.rows(),
                m.cols()
            )));
        }
    }
    for (&src, m) in d {
        if let Some(next) = d.get(&page.target(src)) {
            if !next.mul(m, &k)?.is_zero() {
                return Err(Error::NotADifferential(format!("d_{} ∘ d_{} ≠ 0 at {src:?}", page.r, page.r)));
            }
        }
    }
    let rank_of = |pq: &Bidegree| d.get(pq).map_or(0, |m| m.rank(&k));
    let mut entries = BTreeMap::new();
    for (&pq, &n) in &page.entries {
        let incoming: usize = d.iter().filter(|(s, _)| page.target(**s) == pq).map(|(s, _)| rank_of(s)).sum();
        let e = n - rank_of(&pq) - incoming;
        if e > 0 {
            entries.insert(pq, e);
        }
    }
    Ok(SpectralPage { r: page.r + 1, field: k, entries, differentials: BTreeMap::new() })
}

/// A chain complex over a field with an increasing filtration given by a
/// level for each basis element.
#[derive(Debug, Clone)]
pub struct FilteredComplex {
    pub field: Field,
    min_degree: i64,
    levels: Vec<Vec<i64>>,
    boundaries: Vec<FMat>,
}

impl FilteredComplex {
    /// `boundaries[i]` maps degree `min_degree + i` to the degree below it.
    pub fn new(field: Field, min_degree: i64, levels: Vec<Vec<i64>>, boundaries: Vec<FMat>) -> Result<Self> {
        if levels.len() != boundaries.len() {
            return Err(Error::DimensionMismatch("one boundary per degree".into()));
        }
        for (i, d) in boundaries.iter().enumerate() {
            let below = if i == 0 { 0 } else { levels[i - 1].len() };
            if d.rows() != below || d.cols() != levels[i].len() {
                return Err(Error::DimensionMismatch(format!("boundary out of degree {}", min_degree + i as i64)));
            }
        }
        let fc = Self { field, min_degree, levels, boundaries };
        for n in fc.degrees() {
            if !fc.boundary(n - 1).mul(&fc.boundary(n), &field)?.is_zero() {
                return Err(Error::DSquaredNonzero(format!("degree {n}")));
            }
            let d = fc.boundary(n);
            for i in 0..d.rows() {
                for j in 0..d.cols() {
                    if !num_traits::Zero::is_zero(&d[(i, j)]) && fc.level(n - 1, i) > fc.level(n, j) {
                        return Err(Error::NotFiltered(format!(
                            "degree {n}: generator {j} at level {} hits generator {i} at level {}",
                            fc.level(n, j),
                            fc.level(n - 1, i)
                        )));
                    }
                }
            }
        }
        Ok(fc)
    }

    /// Every generator at level 0 with the given complex.
    pub fn trivial(field: Field, min_degree: i64, boundaries: Vec<FMat>) -> Result<Self> {
        let levels = boundaries.iter().map(|d| vec![0; d.cols()]).collect();
        Self::new(field, min_degree, levels, boundaries)
    }

    pub fn degrees(&self) -> impl Iterator<Item = i64> {
        self.min_degree..self.min_degree + self.levels.len() as i64
    }

    fn slot(&self, n: i64) -> Option<usize> {
        let i = n - self.min_degree;
        (i >= 0 && (i as usize) < self.levels.len()).then_some(i as usize)
    }

    pub fn dim(&self, n: i64) -> usize {
        self.slot(n).map_or(0, |i| self.levels[i].len())
    }

    pub fn level(&self, n: i64, i: usize) -> i64 {
        self.levels[self.slot(n).unwrap()][i]
    }

    pub fn levels(&self, n: i64) -> &[i64] {
        self.slot(n).map_or(&[], |i| &self.levels[i])
    }

    pub fn boundary(&self, n: i64) -> FMat {
        match self.slot(n) {
            Some(i) => self.boundaries[i].clone(),
            None => FMat::zeros(self.dim(n - 1), self.dim(n)),
        }
    }

    pub fn level_range(&self) -> Option<(i64, i64)> {
        let all = self.levels.iter().flatten();
        Some((*all.clone().min()?, *all.max()?))
    }

    /// `dim H_n` of the total complex.
    pub fn total_homology(&self) -> BTreeMap<i64, usize> {
        let k = &self.field;
        self.degrees()
            .map(|n| (n, self.dim(n) - self.boundary(n).rank(k) - self.boundary(n + 1).rank(k)))
            .collect()
    }

    fn indices_up_to(&self, n: i64, p: i64) -> Vec<usize> {
        self.levels(n).iter().enumerate().filter(|(_, l)| **l <= p).map(|(i, _)| i).collect()
    }

    fn embed(&self, n: i64, idx: &[usize], v: &[crate::linalg::field::Elem]) -> Vec<crate::linalg::field::Elem> {
        let mut out = vec![self.field.zero(); self.dim(n)];
        for (&i, x) in idx.iter().zip(v) {
            out[i] = x.clone();
        }
        out
    }

    /// `Z_r^p` in degree `n`: chains in `F_p` whose boundary lies in `F_{p−r}`.
    fn cycles(&self, n: i64, p: i64, r: i64) -> Subspace {
        let k = &self.field;
        let cols = self.indices_up_to(n, p);
        let d = self.boundary(n);
        let rows: Vec<usize> = (0..self.dim(n - 1)).filter(|&i| self.level(n - 1, i) > p - r).collect();
        let sub = d.select(&rows, &cols);
        let ker = sub.kernel(k);
        Subspace::span(self.dim(n), ker.iter().map(|v| self.embed(n, &cols, v)), k)
    }

    /// `B_r^p` in degree `n`: boundaries of `Z_{r−1}^{p+r−1}` in degree `n+1`.
    fn boundaries_into(&self, n: i64, p: i64, r: i64) -> Subspace {
        let z = self.cycles(n + 1, p + r - 1, r - 1);
        z.image(&self.boundary(n + 1), &self.field)
    }

    /// `E_r^p` in degree `n` as a quotient of `Z_r^p`.
    fn page_term(&self, n: i64, p: i64, r: i64) -> Quotient {
        let k = &self.field;
        let top = self.cycles(n, p, r);
        let bottom = self.cycles(n, p - 1, r - 1).sum(&self.boundaries_into(n, p, r), k);
        Quotient::new(&top, &bottom, k)
    }

    fn page(&self, r: i64) -> SpectralPage {
        let k = self.field;
        let mut entries = BTreeMap::new();
        let mut terms = BTreeMap::new();
        if let Some((lo, hi)) = self.level_range() {
            for n in self.degrees() {
                for p in lo..=hi {
                    let t = self.page_term(n, p, r);
                    if t.dim() > 0 {
                        entries.insert((p, n - p), t.dim());
                        terms.insert((p, n - p), t);
                    }
                }
            }
        }
        let mut differentials = BTreeMap::new();
        for (&(p, q), src) in &terms {
            let n = p + q;
            let tgt_key = (p - r, q + r - 1);
            let Some(tgt) = terms.get(&tgt_key) else { continue };
            let d = self.boundary(n);
            let cols: Vec<Vec<_>> = src
                .reps
                .iter()
                .map(|x| tgt.coordinates(&d.apply(x, &k), &k).expect("boundary of Z_r^p lies in Z_r^{p-r}"))
                .collect();
            differentials.insert((p, q), FMat::from_columns(tgt.dim(), &cols));
        }
        SpectralPage { r: r as usize, field: k, entries, differentials }
    }
}

#[derive(Debug, Clone)]
pub struct SpectralRun {
    /// `E_1, E_2, …` up to the first page past which nothing can change.
    pub pages: Vec<SpectralPage>,
    pub e_infinity: SpectralPage,
    pub total_homology: BTreeMap<i64, usize>,
    /// Page-to-page and convergence checks.
    pub report: Report,
}

/// Runs the spectral sequence of a filtered complex to stabilization.
pub fn run_filtered(fc: &FilteredComplex) -> Result<SpectralRun> {
    let k = fc.field;
    let span = fc.level_range().map_or(0, |(lo, hi)| hi - lo);
    // d_r vanishes for r > span, so E_{span+1} = E_∞
    let last = span + 1;
    let pages: Vec<SpectralPage> = (1..=last).map(|r| fc.page(r)).collect();
    let mut report = Report::new();

    let mut dd = Vec::new();
    let mut turn = Vec::new();
    for w in pages.windows(2) {
        match turn_page(&w[0], &w[0].differentials) {
            Ok(next) if next.ranks_equal(&w[1]) => {}
            Ok(_) => turn.push(format!("E_{} is not the homology of (E_{1}, d_{1})", w[1].r, w[0].r)),
            Err(e) => dd.push(format!("page {}: {e}", w[0].r)),
        }
    }
    report.record("d_r squares to zero", dd);
    report.record("E_{r+1} = H(E_r, d_r)", turn);

    let e_infinity = pages.last().cloned().unwrap_or(SpectralPage {
        r: 1,
        field: k,
        entries: BTreeMap::new(),
        differentials: BTreeMap::new(),
    });
    let stable: Vec<String> = e_infinity
        .differentials
        .iter()
        .filter(|(_, d)| !d.is_zero())
        .map(|(pq, _)| format!("nonzero d_{} at {pq:?} past the filtration length", e_infinity.r))
        .collect();
    report.record("sequence has stabilized", stable);

    let total_homology = fc.total_homology();
    let totals = e_infinity.total_ranks();
    report.record(
        "E_inf converges to total homology",
        total_homology
            .iter()
            .filter(|(n, h)| totals.get(n).copied().unwrap_or(0) != **h)
            .map(|(n, h)| format!("degree {n}: E_inf rank {} vs H rank {h}", totals.get(n).copied().unwrap_or(0)))
            .collect(),
    );
    Ok(SpectralRun { pages, e_infinity, total_homology, report })
}

/// For ordinary coefficients: `E₂` equals the homology of the flow category
/// over the field, and `E₂ = E_∞` because only the `q = 0` row is occupied.
pub fn collapse_check(f: &FlowCategory, h: &CoefficientTheory) -> Report {
    let mut r = Report::new();
    if !h.is_ordinary() {
        r.record("coefficients are ordinary", vec![format!("{} is not concentrated in degree 0 with rank 1", h.name)]);
        return r;
    }
    let e1 = match build_e1(f, h) {
        Ok(e) => e,
        Err(e) => {
            r.record("E1 builds", vec![e.to_string()]);
            return r;
        }
    };
    let e2 = match turn_page(&e1, &e1.differentials) {
        Ok(e) => e,
        Err(e) => {
            r.record("E2 builds", vec![e.to_string()]);
            return r;
        }
    };
    let rows: Vec<String> = e2
        .entries
        .keys()
        .filter(|(_, q)| *q != 0)
        .map(|pq| format!("entry off the q = 0 row at {pq:?}"))
        .collect();
    r.record("E2 = E_inf (single row, d_r for r >= 2 leaves the row)", rows);

    let mut mismatch = Vec::new();
    match f.homology() {
        Ok(hz) => {
            let expected: BTreeMap<i64, usize> = hz
                .iter()
                .map(|(d, g)| {
                    let n = match h.field {
                        Field::Rational => g.free_rank,
                        Field::Prime(p) => {
                            let below = hz.iter().find(|(e, _)| *e == d - 1).map_or(0, |(_, g)| {
                                g.torsion.iter().filter(|t| num_integer::Integer::is_multiple_of(*t, &p.into())).count()
                            });
                            if f.mod2 { g.free_rank } else { g.tensor_rank_mod(p) + below }
                        }
                    };
                    (*d, n)
                })
                .filter(|(_, n)| *n > 0)
                .collect();
            let got: BTreeMap<i64, usize> = e2.entries.iter().filter(|((_, q), _)| *q == 0).map(|(&(p, _), &n)| (p, n)).collect();
            if expected != got {
                mismatch.push(format!("E2 row {got:?} vs homology {expected:?}"));
            }
        }
        Err(e) => mismatch.push(e.to_string()),
    }
    r.record("E2 row equals homology over the field", mismatch);
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flowcat::standard::{circle, torus};

    fn q() -> Field {
        Field::Rational
    }

    #[test]
    fn torus_e1() {
        let e1 = build_e1(&torus(), &CoefficientTheory::ordinary(q())).unwrap();
        assert_eq!(e1.entries, BTreeMap::from([((0, 0), 1), ((1, 0), 2), ((2, 0), 1)]));
        assert!(e1.differentials.values().all(FMat::is_zero));
    }

    #[test]
    fn two_line_theory_duplicates_rows() {
        let h = CoefficientTheory::new("toy", q(), [(0, 1), (3, 1)]);
        let e1 = build_e1(&torus(), &h).unwrap();
        for p in 0..=2 {
            assert_eq!(e1.rank((p, 0)), e1.rank((p, 3)));
        }
    }

    #[test]
    fn empty_category_page() {
        let e1 = build_e1(&FlowCategory::default(), &CoefficientTheory::ordinary(q())).unwrap();
        assert!(e1.entries.is_empty());
    }

    #[test]
    fn zero_differential_keeps_page() {
        let e1 = build_e1(&torus(), &CoefficientTheory::ordinary(q())).unwrap();
        let e2 = turn_page(&e1, &BTreeMap::new()).unwrap();
        assert!(e2.ranks_equal(&e1));
        assert_eq!(e2.r, 2);
    }

    #[test]
    fn acyclic_pair() {
        let page = SpectralPage {
            r: 1,
            field: q(),
            entries: BTreeMap::from([((1, 0), 1), ((0, 0), 1)]),
            differentials: BTreeMap::new(),
        };
        let d = BTreeMap::from([((1, 0), FMat::identity(1))]);
        assert!(turn_page(&page, &d).unwrap().entries.is_empty());
        let bad = BTreeMap::from([((1, 0), FMat::identity(2))]);
        assert!(matches!(turn_page(&page, &bad), Err(Error::BidegreeMismatch(_))));
    }

    #[test]
    fn not_a_differential() {
        let page = SpectralPage {
            r: 1,
            field: q(),
            entries: BTreeMap::from([((2, 0), 1), ((1, 0), 1), ((0, 0), 1)]),
            differentials: BTreeMap::new(),
        };
        let d = BTreeMap::from([((2, 0), FMat::identity(1)), ((1, 0), FMat::identity(1))]);
        assert!(matches!(turn_page(&page, &d), Err(Error::NotADifferential(_))));
    }

    #[test]
    fn whole_complex_at_one_level() {
        let k = Field::Prime(2);
        let d1 = FMat::from_small(1, 1, &[0], &k);
        let fc = FilteredComplex::trivial(k, 0, vec![FMat::zeros(0, 1), d1]).unwrap();
        let run = run_filtered(&fc).unwrap();
        assert_eq!(run.pages.len(), 1);
        assert_eq!(run.e_infinity.total_ranks(), BTreeMap::from([(0, 1), (1, 1)]));
        assert!(run.report.passed());
    }

    #[test]
    fn acyclic_two_step_filtration() {
        let k = Field::Prime(2);
        let fc = FilteredComplex::new(k, 0, vec![vec![0], vec![1]], vec![FMat::zeros(0, 1), FMat::from_small(1, 1, &[1], &k)])
            .unwrap();
        let run = run_filtered(&fc).unwrap();
        assert_eq!(run.pages[0].entries.len(), 2);
        assert_eq!(run.pages[0].differentials[&(1, 0)].rank(&k), 1);
        assert!(run.pages[1].entries.is_empty());
        assert!(run.report.passed(), "{}", run.report);
    }

    #[test]
    fn filtration_must_not_rise() {
        let k = Field::Prime(2);
        let r = FilteredComplex::new(k, 0, vec![vec![1], vec![0]], vec![FMat::zeros(0, 1), FMat::from_small(1, 1, &[1], &k)]);
        assert!(matches!(r, Err(Error::NotFiltered(_))));
        let r = FilteredComplex::new(
            k,
            0,
            vec![vec![0], vec![0], vec![0]],
            vec![FMat::zeros(0, 1), FMat::from_small(1, 1, &[1], &k), FMat::from_small(1, 1, &[1], &k)],
        );
        assert!(matches!(r, Err(Error::DSquaredNonzero(_))));
    }

    #[test]
    fn collapse() {
        assert!(collapse_check(&torus(), &CoefficientTheory::ordinary(q())).passed());
        assert!(collapse_check(&circle(), &CoefficientTheory::ordinary(Field::Prime(3))).passed());
        let toy = CoefficientTheory::new("toy", q(), [(0, 1), (3, 1)]);
        assert!(!collapse_check(&torus(), &toy).passed());
    }

    #[test]
    fn text_output() {
        let e1 = build_e1(&torus(), &CoefficientTheory::ordinary(q())).unwrap();
        let t = e1.to_text();
        assert!(t.contains("E_1 over Q"));
        assert!(t.lines().nth(2).unwrap().trim_start().starts_with('0'));
        assert!(e1.to_tsv().contains("1\t1\t0\t2"));
    }
}
