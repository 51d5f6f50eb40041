//! Combinatorial ⟨k⟩-manifolds: stratification posets with an ordered list of
//! faces, checked against the ⟨k⟩-manifold axioms.
//!
//! Strata are labels only. Each stratum is taken to be connected; the `tag`
//! of a codimension-one stratum names the connected face it belongs to, so
//! several codimension-one strata may make up one connected face.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::flowcat::{Component, FlowCategory};
use crate::report::Report;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Stratum {
    pub label: String,
    pub codim: usize,
    pub tag: String,
}

impl Stratum {
    pub fn new(label: impl Into<String>, codim: usize) -> Self {
        let label = label.into();
        Self { tag: label.clone(), label, codim }
    }

    pub fn tagged(label: impl Into<String>, codim: usize, tag: impl Into<String>) -> Self {
        Self { label: label.into(), codim, tag: tag.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CornerComplex {
    pub k: usize,
    pub strata: Vec<Stratum>,
    /// `faces[i]` lists the codimension-one strata making up `F_{i+1}`.
    pub faces: Vec<BTreeSet<usize>>,
    /// `(s, t)`: stratum `s` lies in the closure of stratum `t`.
    pub incidence: Vec<(usize, usize)>,
}

impl CornerComplex {
    /// A closed manifold with the given connected components.
    pub fn closed(labels: &[&str]) -> Self {
        Self { k: 0, strata: labels.iter().map(|l| Stratum::new(*l, 0)).collect(), faces: vec![], incidence: vec![] }
    }

    pub fn point() -> Self {
        Self::closed(&["pt"])
    }

    /// `[0,1]` with `F₁` = both endpoints.
    pub fn interval() -> Self {
        Self {
            k: 1,
            strata: vec![Stratum::new("(0,1)", 0), Stratum::new("{0}", 1), Stratum::new("{1}", 1)],
            faces: vec![BTreeSet::from([1, 2])],
            incidence: vec![(1, 0), (2, 0)],
        }
    }

    /// `ℝ₊^k`: one stratum per set of vanishing coordinates, `F_i = {x_i = 0}`.
    pub fn orthant(k: usize) -> Self {
        let n = 1usize << k;
        let label = |mask: usize| {
            let zeros: Vec<String> = (0..k).filter(|i| mask >> i & 1 == 1).map(|i| format!("x{}", i + 1)).collect();
            if zeros.is_empty() { "interior".to_string() } else { format!("{}=0", zeros.join(",")) }
        };
        let strata = (0..n).map(|m| Stratum::new(label(m), m.count_ones() as usize)).collect();
        let faces = (0..k).map(|i| BTreeSet::from([1usize << i])).collect();
        let mut incidence = Vec::new();
        for m in 0..n {
            for i in 0..k {
                if m >> i & 1 == 1 {
                    incidence.push((m, m & !(1 << i)));
                }
            }
        }
        Self { k, strata, faces, incidence }
    }

    pub fn len(&self) -> usize {
        self.strata.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strata.is_empty()
    }

    /// Reflexive-transitive closure of the incidence relation.
    pub fn closure_relation(&self) -> Vec<Vec<bool>> {
        let n = self.len();
        let mut le = vec![vec![false; n]; n];
        for (i, row) in le.iter_mut().enumerate() {
            row[i] = true;
        }
        for &(s, t) in &self.incidence {
            if s < n && t < n {
                le[s][t] = true;
            }
        }
        for m in 0..n {
            for i in 0..n {
                if le[i][m] {
                    for j in 0..n {
                        if le[m][j] {
                            le[i][j] = true;
                        }
                    }
                }
            }
        }
        le
    }

    /// Strata in the closure of the given set.
    fn closure_of(&self, le: &[Vec<bool>], set: &BTreeSet<usize>) -> BTreeSet<usize> {
        (0..self.len()).filter(|&s| set.iter().any(|&t| le[s][t])).collect()
    }

    pub fn validate(&self) -> ValidationReport {
        let mut r = Report::new();
        let n = self.len();

        r.record(
            "face list has k entries",
            if self.faces.len() == self.k {
                vec![]
            } else {
                vec![format!("k = {} but {} faces listed", self.k, self.faces.len())]
            },
        );
        let mut bad_refs = Vec::new();
        for (i, f) in self.faces.iter().enumerate() {
            bad_refs.extend(f.iter().filter(|&&s| s >= n).map(|s| format!("F{} references stratum {s}", i + 1)));
        }
        for &(s, t) in &self.incidence {
            if s >= n || t >= n {
                bad_refs.push(format!("incidence ({s},{t}) out of range"));
            }
        }
        let refs_ok = bad_refs.is_empty();
        r.record("references are in range", bad_refs);
        if !refs_ok {
            return ValidationReport(r);
        }
        let name = |s: usize| self.strata[s].label.clone();

        let mut not_codim1 = Vec::new();
        for (i, f) in self.faces.iter().enumerate() {
            not_codim1.extend(
                f.iter()
                    .filter(|&&s| self.strata[s].codim != 1)
                    .map(|&s| format!("F{} contains `{}` of codimension {}", i + 1, name(s), self.strata[s].codim)),
            );
        }
        r.record("faces consist of codimension-1 strata", not_codim1);

        r.record(
            "incidence lowers codimension",
            self.incidence
                .iter()
                .filter(|&&(s, t)| self.strata[s].codim <= self.strata[t].codim)
                .map(|&(s, t)| format!("`{}` in closure of `{}` without higher codimension", name(s), name(t)))
                .collect(),
        );
        let le = self.closure_relation();
        let cyclic: Vec<String> = (0..n)
            .flat_map(|s| (0..n).map(move |t| (s, t)))
            .filter(|&(s, t)| s < t && le[s][t] && le[t][s])
            .map(|(s, t)| format!("`{}` and `{}` lie in each other's closure", name(s), name(t)))
            .collect();
        r.record("incidence is a partial order", cyclic);

        // connected faces: codim-1 strata grouped by tag
        let mut connected: BTreeMap<&str, BTreeSet<usize>> = BTreeMap::new();
        for (s, st) in self.strata.iter().enumerate() {
            if st.codim == 1 {
                connected.entry(st.tag.as_str()).or_default().insert(s);
            }
        }
        let faces_of = |s: usize| -> BTreeSet<&str> {
            connected.iter().filter(|(_, g)| g.iter().any(|&e| le[s][e])).map(|(t, _)| *t).collect()
        };
        r.record(
            "codimension-c strata lie in c connected faces",
            (0..n)
                .filter_map(|s| {
                    let c = faces_of(s).len();
                    (c != self.strata[s].codim)
                        .then(|| format!("`{}` has codimension {} but lies in {c} connected faces", name(s), self.strata[s].codim))
                })
                .collect(),
        );

        let closures: Vec<BTreeSet<usize>> = self.faces.iter().map(|f| self.closure_of(&le, f)).collect();
        let mut cover = Vec::new();
        for (s, st) in self.strata.iter().enumerate() {
            if st.codim >= 1 && !closures.iter().any(|c| c.contains(&s)) {
                cover.push(format!("`{}` is in no listed face", name(s)));
            }
            if st.codim == 1 {
                let holders = self.faces.iter().filter(|f| f.contains(&s)).count();
                if holders > 1 {
                    cover.push(format!("`{}` is listed in {holders} faces", name(s)));
                }
            }
        }
        r.record("faces cover the boundary", cover);

        let mut disjoint = Vec::new();
        for (i, f) in self.faces.iter().enumerate() {
            let tags: BTreeSet<&str> =
                f.iter().filter(|&&s| self.strata[s].codim == 1).map(|&s| self.strata[s].tag.as_str()).collect();
            for t in &tags {
                if connected.get(t).is_some_and(|g| g.iter().any(|e| !f.contains(e))) {
                    disjoint.push(format!("connected face `{t}` is split across F{} and another face", i + 1));
                }
            }
            for s in 0..n {
                let inside = faces_of(s).iter().filter(|t| tags.contains(**t)).count();
                if inside > 1 {
                    disjoint.push(format!("`{}` lies in {inside} connected faces of F{}", name(s), i + 1));
                }
            }
        }
        r.record("connected faces within a face are disjoint", disjoint);

        let mut pairwise = Vec::new();
        for i in 0..closures.len() {
            for j in i + 1..closures.len() {
                let meet: BTreeSet<usize> = closures[i].intersection(&closures[j]).copied().collect();
                for &s in &meet {
                    if !meet.iter().any(|&t| self.strata[t].codim == 2 && le[s][t]) {
                        pairwise.push(format!("`{}` in F{} ∩ F{} lies under no codimension-2 stratum of it", name(s), i + 1, j + 1));
                    }
                }
            }
        }
        r.record("pairwise intersections are faces of both", pairwise);

        r.record(
            "codimension-1 strata bound exactly one interior stratum",
            (0..n)
                .filter(|&s| self.strata[s].codim == 1)
                .filter_map(|s| {
                    let c = (0..n).filter(|&t| self.strata[t].codim == 0 && le[s][t]).count();
                    (c != 1).then(|| format!("`{}` lies in the closure of {c} codimension-0 strata", name(s)))
                })
                .collect(),
        );
        ValidationReport(r)
    }

    fn ensure_valid(&self) -> Result<()> {
        let v = self.validate();
        if v.passed() {
            Ok(())
        } else {
            Err(Error::InvalidComplex(v.0.failures().map(|(_, d)| d.to_string()).collect::<Vec<_>>().join("; ")))
        }
    }

    /// The 2^k diagram `a ↦ ⋂_{aᵢ = 0} F̄ᵢ`.
    pub fn two_k_diagram(&self) -> Result<KDiagram> {
        self.ensure_valid()?;
        let le = self.closure_relation();
        let closures: Vec<BTreeSet<usize>> = self.faces.iter().map(|f| self.closure_of(&le, f)).collect();
        let all: BTreeSet<usize> = (0..self.len()).collect();
        let sets = (0..1usize << self.k)
            .map(|mask| {
                (0..self.k)
                    .filter(|i| mask >> i & 1 == 0)
                    .fold(all.clone(), |acc, i| acc.intersection(&closures[i]).copied().collect())
            })
            .collect();
        Ok(KDiagram { k: self.k, sets })
    }

    /// Product ⟨k₁⟩ × ⟨k₂⟩ → ⟨k₁+k₂⟩, faces of the left factor first.
    pub fn product(&self, other: &CornerComplex) -> Result<CornerComplex> {
        self.ensure_valid()?;
        other.ensure_valid()?;
        let n2 = other.len();
        let id = |i: usize, j: usize| i * n2 + j;
        let mut strata = Vec::with_capacity(self.len() * n2);
        for (i, a) in self.strata.iter().enumerate() {
            for (j, b) in other.strata.iter().enumerate() {
                let tag = match (a.codim, b.codim) {
                    (1, 0) => format!("L[{}]x{j}", a.tag),
                    (0, 1) => format!("{i}xR[{}]", b.tag),
                    _ => format!("{i}x{j}"),
                };
                strata.push(Stratum::tagged(format!("{}×{}", a.label, b.label), a.codim + b.codim, tag));
            }
        }
        let mut incidence = Vec::new();
        for &(s, t) in &self.incidence {
            incidence.extend((0..n2).map(|j| (id(s, j), id(t, j))));
        }
        for &(s, t) in &other.incidence {
            incidence.extend((0..self.len()).map(|i| (id(i, s), id(i, t))));
        }
        let interiors = |c: &CornerComplex| -> Vec<usize> { (0..c.len()).filter(|&s| c.strata[s].codim == 0).collect() };
        let mut faces = Vec::new();
        for f in &self.faces {
            faces.push(f.iter().flat_map(|&e| interiors(other).into_iter().map(move |j| id(e, j))).collect());
        }
        for f in &other.faces {
            faces.push(f.iter().flat_map(|&e| interiors(self).into_iter().map(move |i| id(i, e))).collect());
        }
        Ok(CornerComplex { k: self.k + other.k, strata, faces, incidence })
    }
}

/// Outcome of [`CornerComplex::validate`], one check per axiom.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport(pub Report);

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.0.passed()
    }

    pub fn check_passed(&self, name: &str) -> bool {
        self.0.check_passed(name)
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

/// Cubical diagram indexed by `{0,1}^k`; bit `i` of the mask is `aᵢ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KDiagram {
    pub k: usize,
    pub sets: Vec<BTreeSet<usize>>,
}

impl KDiagram {
    pub fn at(&self, a: &[bool]) -> &BTreeSet<usize> {
        assert_eq!(a.len(), self.k);
        let mask = a.iter().enumerate().fold(0usize, |m, (i, &b)| m | (b as usize) << i);
        &self.sets[mask]
    }

    pub fn is_monotone(&self) -> bool {
        (0..self.sets.len()).all(|a| {
            (0..self.sets.len()).filter(|b| a & !b == 0).all(|b| self.sets[a].is_subset(&self.sets[b]))
        })
    }

    /// `M(a ∧ b) = M(a) ∩ M(b)` for every pair.
    pub fn preserves_meets(&self) -> bool {
        (0..self.sets.len()).all(|a| {
            (0..self.sets.len()).all(|b| {
                let meet: BTreeSet<usize> = self.sets[a].intersection(&self.sets[b]).copied().collect();
                self.sets[a & b] == meet
            })
        })
    }
}

/// Which component of `M̄(x, y)` a piece of a chain sits in.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Piece {
    /// Point of a 0-dimensional moduli space.
    Point(usize),
    /// Component of a 1-dimensional moduli space.
    Component(usize),
    /// The interior of a moduli space of dimension ≥ 2, treated as one stratum.
    Interior,
}

#[derive(Debug, Clone)]
struct ChainStratum {
    chain: Vec<String>,
    pieces: Vec<Piece>,
}

/// Corner structure of the compactified `M̄(a, b)`: strata are broken flows
/// through chains of intermediate objects, and `F_j` collects the breaks at
/// an object of index `index(a) − j`.
pub fn moduli_corner(f: &FlowCategory, a: &str, b: &str) -> Result<CornerComplex> {
    let ia = f.index(a).ok_or_else(|| Error::UnknownObject(a.into()))?;
    let ib = f.index(b).ok_or_else(|| Error::UnknownObject(b.into()))?;
    if ia - ib < 1 {
        return Err(Error::Precondition(format!("index gap {} between {a} and {b} is below 1", ia - ib)));
    }
    let k = (ia - ib - 1) as usize;

    let strata = chain_strata(f, a, b)?;
    let mut out = CornerComplex { k, strata: Vec::new(), faces: vec![BTreeSet::new(); k], incidence: Vec::new() };
    for (i, s) in strata.iter().enumerate() {
        let pieces: Vec<String> = s
            .pieces
            .iter()
            .map(|p| match p {
                Piece::Point(i) => format!("p{i}"),
                Piece::Component(i) => format!("c{i}"),
                Piece::Interior => "o".into(),
            })
            .collect();
        let codim = s.chain.len() - 2;
        out.strata.push(Stratum::new(format!("{}[{}]", s.chain.join(">"), pieces.join(",")), codim));
        if codim == 1 {
            let j = (ia - f.index(&s.chain[1]).unwrap()) as usize;
            out.faces[j - 1].insert(i);
        }
    }
    for (i, s) in strata.iter().enumerate() {
        for (j, t) in strata.iter().enumerate() {
            if i != j && lies_under(f, s, t) {
                out.incidence.push((i, j));
            }
        }
    }
    Ok(out)
}

fn chain_strata(f: &FlowCategory, a: &str, b: &str) -> Result<Vec<ChainStratum>> {
    let ib = f.index(b).unwrap();
    let mut chains = Vec::new();
    let mut stack = vec![vec![a.to_string()]];
    while let Some(chain) = stack.pop() {
        let last = chain.last().unwrap();
        let il = f.index(last).unwrap();
        if last == b {
            chains.push(chain);
            continue;
        }
        let mut next: Vec<&str> = f
            .objects
            .iter()
            .filter(|o| o.index < il && o.index >= ib && (o.index > ib || o.id == b))
            .map(|o| o.id.as_str())
            .collect();
        next.sort();
        for n in next.into_iter().rev() {
            let mut c = chain.clone();
            c.push(n.to_string());
            stack.push(c);
        }
    }
    chains.sort();
    let mut out = Vec::new();
    for chain in chains {
        let mut choices: Vec<Vec<Piece>> = Vec::new();
        for w in chain.windows(2) {
            choices.push(pieces_of(f, &w[0], &w[1])?);
        }
        let mut acc: Vec<Vec<Piece>> = vec![vec![]];
        for c in choices {
            acc = acc.into_iter().flat_map(|p| c.iter().map(move |x| [p.clone(), vec![x.clone()]].concat())).collect();
        }
        out.extend(acc.into_iter().map(|pieces| ChainStratum { chain: chain.clone(), pieces }));
    }
    Ok(out)
}

fn pieces_of(f: &FlowCategory, x: &str, y: &str) -> Result<Vec<Piece>> {
    let gap = f.index(x).unwrap() - f.index(y).unwrap();
    Ok(match gap {
        1 => f.moduli0(x, y).map_or(vec![], |m| (0..m.signs.len()).map(Piece::Point).collect()),
        2 => match f.moduli1(x, y) {
            Some(m) => (0..m.components.len()).map(Piece::Component).collect(),
            None if f.broken_flows(x, y).is_empty() => vec![],
            None => return Err(Error::MissingModuliData { from: x.into(), to: y.into() }),
        },
        _ => {
            // interior present where the compactification has lower strata
            let below = chain_strata(f, x, y)?;
            if below.iter().any(|s| s.chain.len() > 2) { vec![Piece::Interior] } else { vec![] }
        }
    })
}

/// Is `s` contained in the closure of `t`?
fn lies_under(f: &FlowCategory, s: &ChainStratum, t: &ChainStratum) -> bool {
    // t's chain must be a subsequence of s's chain
    let mut positions = Vec::new();
    let mut it = s.chain.iter().enumerate();
    for obj in &t.chain {
        match it.by_ref().find(|(_, o)| *o == obj) {
            Some((i, _)) => positions.push(i),
            None => return false,
        }
    }
    t.pieces.iter().enumerate().all(|(n, piece)| {
        let (lo, hi) = (positions[n], positions[n + 1]);
        if hi - lo == 1 {
            return s.pieces[lo] == *piece;
        }
        match piece {
            Piece::Interior => true,
            Piece::Point(_) => false,
            Piece::Component(c) => {
                // a 2-gap factor refines only into a single broken flow
                let (from, to) = (&t.chain[n], &t.chain[n + 1]);
                let (Piece::Point(p), Piece::Point(q)) = (&s.pieces[lo], &s.pieces[lo + 1]) else { return false };
                let mid = &s.chain[lo + 1];
                match &f.moduli1(from, to).unwrap().components[*c] {
                    Component::Circle => false,
                    Component::Interval { ends } => ends.iter().any(|e| e.mid == *mid && e.p == *p && e.q == *q),
                }
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flowcat::standard::torus;
    use crate::flowcat::{BrokenFlow, FlowObject, ModuliOne};

    fn square() -> CornerComplex {
        CornerComplex::orthant(2)
    }

    #[test]
    fn orthants_and_interval_are_valid() {
        for k in 0..=4 {
            let v = CornerComplex::orthant(k).validate();
            assert!(v.passed(), "k={k}: {v}");
        }
        assert!(CornerComplex::interval().validate().passed());
        assert!(CornerComplex::point().validate().passed());
    }

    #[test]
    fn corner_listed_as_a_face_is_rejected() {
        let mut c = square();
        c.faces[0].insert(3);
        let v = c.validate();
        assert!(!v.check_passed("faces consist of codimension-1 strata"));
    }

    #[test]
    fn emptied_face_is_rejected() {
        let mut c = square();
        c.faces[1].clear();
        let v = c.validate();
        assert!(!v.passed());
        assert!(!v.check_passed("faces cover the boundary"));
    }

    #[test]
    fn diagram_of_the_quadrant() {
        let c = square();
        let d = c.two_k_diagram().unwrap();
        // strata masks: 0 interior, 1 = {x1=0}, 2 = {x2=0}, 3 = corner
        assert_eq!(d.at(&[false, true]), &BTreeSet::from([1, 3]));
        assert_eq!(d.at(&[false, false]), &BTreeSet::from([3]));
        assert_eq!(d.at(&[true, true]).len(), 4);
        assert!(d.is_monotone());
        assert!(d.preserves_meets());
        assert_eq!(CornerComplex::closed(&["M"]).two_k_diagram().unwrap().sets.len(), 1);
    }

    #[test]
    fn diagram_requires_validity() {
        let mut c = square();
        c.faces[1].clear();
        assert!(matches!(c.two_k_diagram(), Err(Error::InvalidComplex(_))));
    }

    #[test]
    fn products() {
        let sq = CornerComplex::interval().product(&CornerComplex::interval()).unwrap();
        assert_eq!(sq.k, 2);
        assert_eq!(sq.strata.iter().filter(|s| s.codim == 2).count(), 4);
        assert!(sq.validate().passed());
        let p = CornerComplex::point().product(&square()).unwrap();
        assert_eq!(p.k, 2);
        assert_eq!(p.len(), 4);
        assert!(p.validate().passed());
    }

    #[test]
    fn torus_max_min_corner() {
        let t = torus();
        let c = moduli_corner(&t, "max", "min").unwrap();
        assert_eq!(c.k, 1);
        assert_eq!(c.strata.iter().filter(|s| s.codim == 0).count(), 4);
        assert_eq!(c.faces[0].len(), 8);
        assert!(c.validate().passed(), "{}", c.validate());
    }

    #[test]
    fn gap_one_corner() {
        let t = torus();
        let c = moduli_corner(&t, "max", "s1").unwrap();
        assert_eq!(c.k, 0);
        assert_eq!(c.len(), 2);
        assert!(c.validate().passed());
    }

    #[test]
    fn missing_one_dimensional_data() {
        let mut t = torus();
        t.moduli1 = None;
        assert!(matches!(moduli_corner(&t, "max", "min"), Err(Error::MissingModuliData { .. })));
    }

    #[test]
    fn unmatched_end_breaks_axioms() {
        let mut t = torus();
        t.moduli1.as_mut().unwrap()[0].components[0] =
            Component::interval(BrokenFlow::new("s1", 0, 0), BrokenFlow::new("s1", 1, 1));
        let c = moduli_corner(&t, "max", "min").unwrap();
        assert!(!c.validate().passed());
    }

    #[test]
    fn circle_components_have_no_boundary() {
        let f = FlowCategory::new(vec![FlowObject::new("n", 2), FlowObject::new("s", 0)], vec![]).with_moduli1(vec![ModuliOne {
            from: "n".into(),
            to: "s".into(),
            components: vec![Component::Circle],
        }]);
        let c = moduli_corner(&f, "n", "s").unwrap();
        assert_eq!(c.len(), 1);
        assert!(c.validate().passed());
    }
}
