//! Chain maps between flow categories from counts of mixed moduli spaces,
//! with chain-map and quasi-isomorphism certification.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::chain::ChainComplex;
use crate::error::{Error, Result};
use crate::flowcat::FlowCategory;
use crate::linalg::{smith_normal_form, IntMatrix};
use crate::report::Report;

/// Signed points of the 0-dimensional mixed space from a source object to a
/// target object of the same index.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixedModuliZero {
    pub from: String,
    pub to: String,
    pub signs: Vec<i8>,
}

impl MixedModuliZero {
    pub fn new(from: impl Into<String>, to: impl Into<String>, signs: Vec<i8>) -> Self {
        Self { from: from.into(), to: to.into(), signs }
    }

    pub fn signed_count(&self) -> i64 {
        self.signs.iter().map(|&s| s as i64).sum()
    }
}

/// An end of a 1-dimensional mixed space from `a` to `β`.
///
/// `Morse`: point `p` of the source moduli `M(a, mid)` followed by mixed point
/// `q` of `(mid, β)`. `Floer`: mixed point `p` of `(a, mid)` followed by point
/// `q` of the target moduli `M(mid, β)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum MixedEnd {
    Morse { mid: String, p: usize, q: usize },
    Floer { mid: String, p: usize, q: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum MixedComponent {
    Circle,
    Interval { ends: Vec<MixedEnd> },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixedModuliOne {
    pub from: String,
    pub to: String,
    pub components: Vec<MixedComponent>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ComparisonData {
    pub source: FlowCategory,
    pub target: FlowCategory,
    pub mixed0: Vec<MixedModuliZero>,
    pub mixed1: Option<Vec<MixedModuliOne>>,
}

/// `Ψ_m` for each degree `m`: rows are target objects of index `m`, columns
/// are source objects of index `m`, both sorted by id.
pub type Psi = BTreeMap<i64, IntMatrix>;

impl ComparisonData {
    /// A category compared with itself through one positive point per object.
    pub fn identity(f: &FlowCategory) -> Self {
        let mixed0 = f.objects.iter().map(|o| MixedModuliZero::new(&o.id, &o.id, vec![1])).collect();
        Self { source: f.clone(), target: f.clone(), mixed0, mixed1: None }
    }

    pub fn mixed0(&self, from: &str, to: &str) -> Option<&MixedModuliZero> {
        self.mixed0.iter().find(|m| m.from == from && m.to == to)
    }

    fn mixed_count(&self, from: &str, to: &str) -> i64 {
        self.mixed0(from, to).map_or(0, MixedModuliZero::signed_count)
    }

    fn degrees(&self) -> BTreeSet<i64> {
        self.source.indices().into_iter().chain(self.target.indices()).collect()
    }

    /// Sign of an end as a boundary point: `+s(p)s(q)` for a Morse break and
    /// `−s(p)s(q)` for a Floer break.
    fn end_sign(&self, a: &str, b: &str, e: &MixedEnd) -> Option<i8> {
        match e {
            MixedEnd::Morse { mid, p, q } => {
                let sp = *self.source.moduli0(a, mid)?.signs.get(*p)?;
                let sq = *self.mixed0(mid, b)?.signs.get(*q)?;
                Some(sp * sq)
            }
            MixedEnd::Floer { mid, p, q } => {
                let sp = *self.mixed0(a, mid)?.signs.get(*p)?;
                let sq = *self.target.moduli0(mid, b)?.signs.get(*q)?;
                Some(-sp * sq)
            }
        }
    }

    /// Every broken configuration from `a` to `β`, in canonical order.
    fn broken_configurations(&self, a: &str, b: &str) -> Vec<MixedEnd> {
        let mut out = Vec::new();
        let (Some(ia), Some(ib)) = (self.source.index(a), self.target.index(b)) else { return out };
        if ia - ib != 1 {
            return out;
        }
        for c in self.source.objects_at(ia - 1) {
            let (Some(m), Some(x)) = (self.source.moduli0(a, &c.id), self.mixed0(&c.id, b)) else { continue };
            for p in 0..m.signs.len() {
                for q in 0..x.signs.len() {
                    out.push(MixedEnd::Morse { mid: c.id.clone(), p, q });
                }
            }
        }
        for c in self.target.objects_at(ia) {
            let (Some(x), Some(m)) = (self.mixed0(a, &c.id), self.target.moduli0(&c.id, b)) else { continue };
            for p in 0..x.signs.len() {
                for q in 0..m.signs.len() {
                    out.push(MixedEnd::Floer { mid: c.id.clone(), p, q });
                }
            }
        }
        out.sort();
        out
    }
}

/// Assembles `Ψ` from the signed counts of `mixed0`.
pub fn build_psi(d: &ComparisonData) -> Result<Psi> {
    for (name, f) in [("source", &d.source), ("target", &d.target)] {
        let r = f.validate();
        if !r.passed() {
            return Err(Error::InvalidCategory(format!("{name}: {r}")));
        }
    }
    for m in &d.mixed0 {
        let a = d.source.index(&m.from).ok_or_else(|| Error::UnknownObject(m.from.clone()))?;
        let b = d.target.index(&m.to).ok_or_else(|| Error::UnknownObject(m.to.clone()))?;
        if a != b {
            return Err(Error::IndexMismatch(format!("mixed point {} -> {} joins indices {a} and {b}", m.from, m.to)));
        }
    }
    Ok(d.degrees()
        .into_iter()
        .map(|m| {
            let rows = d.target.objects_at(m);
            let cols = d.source.objects_at(m);
            (m, IntMatrix::from_fn(rows.len(), cols.len(), |i, j| d.mixed_count(&cols[j].id, &rows[i].id).into()))
        })
        .collect())
}

fn psi_at(d: &ComparisonData, psi: &Psi, m: i64) -> IntMatrix {
    psi.get(&m)
        .cloned()
        .unwrap_or_else(|| IntMatrix::zeros(d.target.objects_at(m).len(), d.source.objects_at(m).len()))
}

/// Located entries where `Ψ_{m−1} ∂ ≠ ∂ Ψ_m`.
fn chain_map_failures(d: &ComparisonData, psi: &Psi) -> Vec<String> {
    let mut out = Vec::new();
    for m in d.degrees() {
        let (Ok(ds), Ok(dt)) = (d.source.boundary_matrix(m), d.target.boundary_matrix(m)) else {
            out.push("categories are not valid".into());
            break;
        };
        let (p_hi, p_lo) = (psi_at(d, psi, m), psi_at(d, psi, m - 1));
        let (left, right) = match (p_lo.mul(&ds), dt.mul(&p_hi)) {
            (Ok(l), Ok(r)) => (l, r),
            _ => {
                out.push(format!("degree {m}: Ψ has the wrong shape"));
                continue;
            }
        };
        let src = d.source.objects_at(m);
        let tgt = d.target.objects_at(m - 1);
        for (i, b) in tgt.iter().enumerate() {
            for (j, a) in src.iter().enumerate() {
                if left[(i, j)] != right[(i, j)] {
                    out.push(format!(
                        "(m={m}, a={}, β={}): Ψ∂ = {}, ∂Ψ = {}",
                        a.id, b.id, left[(i, j)], right[(i, j)]
                    ));
                }
            }
        }
    }
    out
}

/// `Ψ∂ = ∂Ψ` in every degree and, when `mixed1` is present, the ends of each
/// 1-dimensional mixed space biject with the broken configurations, with the
/// two ends of each interval of opposite boundary sign.
pub fn verify_chain_map(d: &ComparisonData, psi: &Psi) -> Report {
    let mut r = Report::new();
    r.record("Ψ∂ = ∂Ψ", chain_map_failures(d, psi));
    let Some(mixed1) = &d.mixed1 else { return r };

    let mut gaps = Vec::new();
    let mut refs = Vec::new();
    let mut signs = Vec::new();
    let mut cover = Vec::new();
    let mut seen_pairs = BTreeSet::new();
    for m in mixed1 {
        seen_pairs.insert((m.from.clone(), m.to.clone()));
        match (d.source.index(&m.from), d.target.index(&m.to)) {
            (Some(a), Some(b)) if a - b == 1 => {}
            _ => {
                gaps.push(format!("{} -> {}", m.from, m.to));
                continue;
            }
        }
        let mut ends = BTreeMap::new();
        for (ci, c) in m.components.iter().enumerate() {
            let MixedComponent::Interval { ends: e } = c else { continue };
            let s: Vec<Option<i8>> = e.iter().map(|x| d.end_sign(&m.from, &m.to, x)).collect();
            if s.iter().any(Option::is_none) {
                refs.push(format!("{} -> {} component {ci}", m.from, m.to));
                continue;
            }
            if e.len() != 2 {
                signs.push(format!("{} -> {} component {ci}: {} ends", m.from, m.to, e.len()));
            } else if s[0] == s[1] {
                signs.push(format!("{} -> {} component {ci}: both ends have sign {}", m.from, m.to, s[0].unwrap()));
            }
            for x in e {
                *ends.entry(x.clone()).or_insert(0usize) += 1;
            }
        }
        let expected: BTreeSet<MixedEnd> = d.broken_configurations(&m.from, &m.to).into_iter().collect();
        for (x, n) in &ends {
            if *n != 1 || !expected.contains(x) {
                cover.push(format!("{} -> {}: end {x:?} used {n} times", m.from, m.to));
            }
        }
        for x in expected.iter().filter(|x| !ends.contains_key(*x)) {
            cover.push(format!("{} -> {}: broken configuration {x:?} is not an end", m.from, m.to));
        }
    }
    for a in &d.source.objects {
        for b in d.target.objects.iter().filter(|b| b.index == a.index - 1) {
            if !seen_pairs.contains(&(a.id.clone(), b.id.clone())) && !d.broken_configurations(&a.id, &b.id).is_empty() {
                cover.push(format!("{} -> {}: broken configurations but no mixed 1-dimensional data", a.id, b.id));
            }
        }
    }
    r.record("mixed 1-dimensional moduli have index gap 1", gaps);
    r.record("mixed interval ends reference existing points", refs);
    r.record("mixed interval ends have opposite boundary signs", signs);
    r.record("mixed interval ends exhaust the broken configurations", cover);
    r
}

/// Coordinates of the columns of `vs` in the kernel basis of `d`, as the rows
/// of `V⁻¹` past the rank of `d`.
fn kernel_coordinates(d: &IntMatrix, vs: &IntMatrix) -> Result<IntMatrix> {
    let snf = smith_normal_form(d);
    let r = snf.rank();
    let all: Vec<usize> = (0..vs.cols()).collect();
    let c = snf.v_inv.mul(vs)?;
    let top: Vec<usize> = (0..r).collect();
    if !c.select(&top, &all).is_zero() {
        return Err(Error::Precondition("vectors do not lie in the kernel".into()));
    }
    let rest: Vec<usize> = (r..d.cols()).collect();
    Ok(c.select(&rest, &all))
}

/// Degreewise criterion: `H_m(source) ≅ H_m(target)` as abstract groups and
/// `Ψ_*` is onto. A surjection between isomorphic finitely generated abelian
/// groups is an isomorphism.
fn degreewise_failures(a: &ChainComplex, b: &ChainComplex, psi: impl Fn(i64) -> IntMatrix) -> Result<Vec<String>> {
    let mut out = Vec::new();
    let degrees: BTreeSet<i64> = a.degrees().chain(b.degrees()).collect();
    for m in degrees {
        let (ha, hb) = (a.homology_at(m)?, b.homology_at(m)?);
        if ha != hb {
            out.push(format!("degree {m}: H(source) = {ha}, H(target) = {hb}"));
            continue;
        }
        let (da, db) = (a.boundary(m), b.boundary(m));
        let za = crate::linalg::kernel_basis(&da);
        let zb = crate::linalg::kernel_basis(&db);
        let images = psi(m).mul(&za)?.hcat(&b.boundary(m + 1))?;
        let coords = kernel_coordinates(&db, &images)?;
        let f = smith_normal_form(&coords).invariant_factors();
        if f.len() != zb.cols() || f.iter().any(|x| !x.abs().is_one()) {
            out.push(format!("degree {m}: induced map is not onto"));
        }
    }
    Ok(out)
}

/// Quasi-isomorphism by two independent routes: acyclicity of the mapping
/// cone over ℤ, and the degreewise induced map.
pub fn quasi_iso_check(d: &ComparisonData, psi: &Psi) -> Result<Report> {
    let failures = chain_map_failures(d, psi);
    if !failures.is_empty() {
        return Err(Error::NotAChainMap(failures.join("; ")));
    }
    let a = d.source.morse_complex()?;
    let b = d.target.morse_complex()?;
    let f = |m: i64| psi_at(d, psi, m);
    let cone = a.mapping_cone(&b, f)?;
    let cone_fail: Vec<String> = cone
        .homology()?
        .into_iter()
        .filter(|(_, h)| !h.is_zero())
        .map(|(m, h)| format!("H_{m}(cone) = {h}"))
        .collect();
    let cone_ok = cone_fail.is_empty();
    let degree_fail = degreewise_failures(&a, &b, f)?;
    let degree_ok = degree_fail.is_empty();
    let mut r = Report::new();
    r.record("mapping cone is acyclic", cone_fail);
    r.record("induced map is an isomorphism in each degree", degree_fail);
    r.record(
        "cone and degreewise criteria agree",
        if cone_ok == degree_ok { vec![] } else { vec![format!("cone {cone_ok}, degreewise {degree_ok}")] },
    );
    Ok(r)
}

/// Each `Ψ_m` is square with determinant ±1, so `Ψ` is an isomorphism of
/// chain complexes.
pub fn is_invertible(psi: &Psi) -> bool {
    psi.values().all(|m| {
        m.rows() == m.cols() && smith_normal_form(m).invariant_factors().iter().filter(|x| x.abs().is_one()).count() == m.rows()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flowcat::standard::{circle, sphere, torus};
    use crate::flowcat::{FlowObject, ModuliZero};

    #[test]
    fn identity_comparison() {
        for f in [circle(), sphere(), torus()] {
            let d = ComparisonData::identity(&f);
            let psi = build_psi(&d).unwrap();
            for (m, p) in &psi {
                assert_eq!(*p, IntMatrix::identity(f.objects_at(*m).len()));
            }
            assert!(verify_chain_map(&d, &psi).passed());
            let q = quasi_iso_check(&d, &psi).unwrap();
            assert!(q.passed(), "{q}");
        }
    }

    #[test]
    fn empty_mixed_counts_give_zero() {
        let f = torus();
        let d = ComparisonData { mixed0: vec![], ..ComparisonData::identity(&f) };
        let psi = build_psi(&d).unwrap();
        assert!(psi.values().all(IntMatrix::is_zero));
        assert!(verify_chain_map(&d, &psi).passed());
        let q = quasi_iso_check(&d, &psi).unwrap();
        assert!(!q.check_passed("mapping cone is acyclic"));
        assert!(!q.check_passed("induced map is an isomorphism in each degree"));
        assert!(q.check_passed("cone and degreewise criteria agree"));
    }

    #[test]
    fn perturbed_psi_is_located() {
        let f = FlowCategory::new(
            vec![FlowObject::new("a", 1), FlowObject::new("b", 0)],
            vec![ModuliZero::new("a", "b", vec![1])],
        );
        let d = ComparisonData::identity(&f);
        let mut psi = build_psi(&d).unwrap();
        psi.insert(1, IntMatrix::from_rows(&[[2]]));
        let r = verify_chain_map(&d, &psi);
        let fail: Vec<_> = r.failures().collect();
        assert_eq!(fail.len(), 1);
        assert!(fail[0].1.contains("m=1, a=a, β=b"), "{}", fail[0].1);
        assert!(matches!(quasi_iso_check(&d, &psi), Err(Error::NotAChainMap(_))));
    }

    #[test]
    fn index_mismatch() {
        let f = torus();
        let mut d = ComparisonData::identity(&f);
        d.mixed0.push(MixedModuliZero::new("max", "min", vec![1]));
        assert!(matches!(build_psi(&d), Err(Error::IndexMismatch(_))));
    }

    #[test]
    fn multiplication_by_two_is_not_a_quasi_iso() {
        let f = circle();
        let mut d = ComparisonData::identity(&f);
        for m in &mut d.mixed0 {
            m.signs = vec![1, 1];
        }
        let psi = build_psi(&d).unwrap();
        let q = quasi_iso_check(&d, &psi).unwrap();
        assert!(!q.check_passed("mapping cone is acyclic"));
        assert!(!q.check_passed("induced map is an isomorphism in each degree"));
    }

    fn interval_pair() -> ComparisonData {
        // a(1) -> b(0) with one flow; identity mixed points
        let f = FlowCategory::new(
            vec![FlowObject::new("a", 1), FlowObject::new("b", 0)],
            vec![ModuliZero::new("a", "b", vec![1])],
        );
        let mut d = ComparisonData::identity(&f);
        d.mixed1 = Some(vec![MixedModuliOne {
            from: "a".into(),
            to: "b".into(),
            components: vec![MixedComponent::Interval {
                ends: vec![
                    MixedEnd::Morse { mid: "b".into(), p: 0, q: 0 },
                    MixedEnd::Floer { mid: "a".into(), p: 0, q: 0 },
                ],
            }],
        }]);
        d
    }

    #[test]
    fn mixed_interval_ends() {
        let d = interval_pair();
        let psi = build_psi(&d).unwrap();
        let r = verify_chain_map(&d, &psi);
        assert!(r.passed(), "{r}");

        let mut bad = d.clone();
        if let Some(m1) = &mut bad.mixed1 {
            let MixedComponent::Interval { ends } = &mut m1[0].components[0] else { unreachable!() };
            ends.pop();
        }
        let r = verify_chain_map(&bad, &psi);
        assert!(!r.check_passed("mixed interval ends exhaust the broken configurations"));
        assert!(!r.check_passed("mixed interval ends have opposite boundary signs"));

        let mut flipped = d.clone();
        flipped.mixed0[0].signs = vec![-1];
        let psi = build_psi(&flipped).unwrap();
        let r = verify_chain_map(&flipped, &psi);
        assert!(!r.check_passed("Ψ∂ = ∂Ψ"));
        assert!(!r.check_passed("mixed interval ends have opposite boundary signs"));
    }

    #[test]
    fn invertibility() {
        let psi = build_psi(&ComparisonData::identity(&torus())).unwrap();
        assert!(is_invertible(&psi));
    }
}
