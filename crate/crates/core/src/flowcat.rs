//! Finite flow categories: objects graded by an index, signed zero-dimensional
//! moduli spaces between objects of adjacent index, and optional
//! one-dimensional moduli spaces described by their components and ends.
//!
//! Framings only enter through their chain-level shadow: the sign of each
//! point of a zero-dimensional moduli space, and sign opposition at the two
//! ends of every interval component of a one-dimensional moduli space.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::chain::ChainComplex;
use crate::error::{Error, Result};
use crate::linalg::field::Field;
use crate::linalg::{HomologyGroup, IntMatrix};
use crate::report::Report;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowObject {
    pub id: String,
    pub index: i64,
    #[serde(default)]
    pub label: String,
}

impl FlowObject {
    pub fn new(id: impl Into<String>, index: i64) -> Self {
        let id = id.into();
        Self { label: id.clone(), id, index }
    }
}

/// Signed points of `M(from, to)` for `index(from) − index(to) = 1`. Point keys
/// are positions in `signs`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuliZero {
    pub from: String,
    pub to: String,
    pub signs: Vec<i8>,
}

impl ModuliZero {
    pub fn new(from: impl Into<String>, to: impl Into<String>, signs: Vec<i8>) -> Self {
        Self { from: from.into(), to: to.into(), signs }
    }

    pub fn signed_count(&self) -> i64 {
        self.signs.iter().map(|&s| s as i64).sum()
    }
}

/// A broken flow line `p ∈ M(from, mid)` followed by `q ∈ M(mid, to)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BrokenFlow {
    pub mid: String,
    pub p: usize,
    pub q: usize,
}

impl BrokenFlow {
    pub fn new(mid: impl Into<String>, p: usize, q: usize) -> Self {
        Self { mid: mid.into(), p, q }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum Component {
    Circle,
    /// A well-formed interval has exactly two ends.
    Interval { ends: Vec<BrokenFlow> },
}

impl Component {
    pub fn interval(a: BrokenFlow, b: BrokenFlow) -> Self {
        Component::Interval { ends: vec![a, b] }
    }
}

/// Components of the compactified `M̄(from, to)` for `index(from) − index(to) = 2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuliOne {
    pub from: String,
    pub to: String,
    pub components: Vec<Component>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowCategory {
    pub objects: Vec<FlowObject>,
    #[serde(default)]
    pub moduli0: Vec<ModuliZero>,
    #[serde(default)]
    pub moduli1: Option<Vec<ModuliOne>>,
    /// Ignore signs and count points modulo two.
    #[serde(default)]
    pub mod2: bool,
}

impl FlowCategory {
    pub fn new(objects: Vec<FlowObject>, moduli0: Vec<ModuliZero>) -> Self {
        Self { objects, moduli0, moduli1: None, mod2: false }
    }

    pub fn with_moduli1(mut self, moduli1: Vec<ModuliOne>) -> Self {
        self.moduli1 = Some(moduli1);
        self
    }

    pub fn object(&self, id: &str) -> Option<&FlowObject> {
        self.objects.iter().find(|o| o.id == id)
    }

    pub fn index(&self, id: &str) -> Option<i64> {
        self.object(id).map(|o| o.index)
    }

    /// Objects of the given index, sorted by id.
    pub fn objects_at(&self, index: i64) -> Vec<&FlowObject> {
        let mut v: Vec<&FlowObject> = self.objects.iter().filter(|o| o.index == index).collect();
        v.sort_by(|a, b| a.id.cmp(&b.id));
        v
    }

    /// Occupied indices, ascending.
    pub fn indices(&self) -> Vec<i64> {
        self.objects.iter().map(|o| o.index).collect::<BTreeSet<_>>().into_iter().collect()
    }

    pub fn index_range(&self) -> Option<(i64, i64)> {
        let idx = self.indices();
        Some((*idx.first()?, *idx.last()?))
    }

    pub fn moduli0(&self, from: &str, to: &str) -> Option<&ModuliZero> {
        self.moduli0.iter().find(|m| m.from == from && m.to == to)
    }

    pub fn moduli1(&self, from: &str, to: &str) -> Option<&ModuliOne> {
        self.moduli1.as_ref()?.iter().find(|m| m.from == from && m.to == to)
    }

    /// `n_{a,b}`: signed count, or the count modulo two in mod-2 mode.
    pub fn count(&self, from: &str, to: &str) -> i64 {
        match self.moduli0(from, to) {
            None => 0,
            Some(m) if self.mod2 => (m.signs.len() % 2) as i64,
            Some(m) => m.signed_count(),
        }
    }

    /// Every broken flow `M(a,c) × M(c,b)` with its product sign.
    pub fn broken_flows(&self, a: &str, b: &str) -> Vec<(BrokenFlow, i8)> {
        let mut out = Vec::new();
        for ac in self.moduli0.iter().filter(|m| m.from == a) {
            if let Some(cb) = self.moduli0(&ac.to, b) {
                for (p, sp) in ac.signs.iter().enumerate() {
                    for (q, sq) in cb.signs.iter().enumerate() {
                        out.push((BrokenFlow::new(ac.to.clone(), p, q), sp * sq));
                    }
                }
            }
        }
        out.sort();
        out
    }

    /// Sign of a broken flow, if it references existing points.
    pub fn broken_sign(&self, from: &str, to: &str, e: &BrokenFlow) -> Option<i8> {
        let sp = *self.moduli0(from, &e.mid)?.signs.get(e.p)?;
        let sq = *self.moduli0(&e.mid, to)?.signs.get(e.q)?;
        Some(sp * sq)
    }

    /// Canonical ordering: objects by (index, id), moduli tables by (from, to).
    /// Point order inside a table is never changed since ends refer to it.
    pub fn canonicalize(&mut self) {
        self.objects.sort_by(|a, b| (a.index, &a.id).cmp(&(b.index, &b.id)));
        self.moduli0.sort_by(|a, b| (&a.from, &a.to).cmp(&(&b.from, &b.to)));
        if let Some(m1) = &mut self.moduli1 {
            m1.sort_by(|a, b| (&a.from, &a.to).cmp(&(&b.from, &b.to)));
        }
    }

    pub fn canonical(&self) -> Self {
        let mut c = self.clone();
        c.canonicalize();
        c
    }

    /// Renames every object id through `f`.
    pub fn relabel(&self, f: impl Fn(&str) -> String) -> Self {
        let mut c = self.clone();
        for o in &mut c.objects {
            o.id = f(&o.id);
        }
        for m in &mut c.moduli0 {
            m.from = f(&m.from);
            m.to = f(&m.to);
        }
        if let Some(m1) = &mut c.moduli1 {
            for m in m1 {
                m.from = f(&m.from);
                m.to = f(&m.to);
                for comp in &mut m.components {
                    if let Component::Interval { ends } = comp {
                        for e in ends {
                            e.mid = f(&e.mid);
                        }
                    }
                }
            }
        }
        c
    }

    pub fn validate(&self) -> Report {
        let mut r = Report::new();
        let mut seen = HashMap::new();
        let mut dup = Vec::new();
        for o in &self.objects {
            if seen.insert(o.id.as_str(), o.index).is_some() {
                dup.push(format!("duplicate object id `{}`", o.id));
            }
        }
        r.record("object ids unique", dup);

        let idx = |id: &str| seen.get(id).copied();
        let mut unknown = Vec::new();
        let mut gap0 = Vec::new();
        let mut signs = Vec::new();
        let mut tables = BTreeSet::new();
        let mut dup_tables = Vec::new();
        for m in &self.moduli0 {
            match (idx(&m.from), idx(&m.to)) {
                (Some(a), Some(b)) if a - b != 1 => gap0.push(format!(
                    "M({},{}) listed as 0-dimensional but index gap is {}",
                    m.from,
                    m.to,
                    a - b
                )),
                (Some(_), Some(_)) => {}
                _ => unknown.push(format!("M({},{}) references an unknown object", m.from, m.to)),
            }
            if m.signs.iter().any(|s| *s != 1 && *s != -1) {
                signs.push(format!("M({},{}) has a sign outside {{+1,-1}}", m.from, m.to));
            }
            if !tables.insert((0, &m.from, &m.to)) {
                dup_tables.push(format!("M({},{}) listed twice", m.from, m.to));
            }
        }
        let mut gap1 = Vec::new();
        let mut refs = Vec::new();
        let mut arity = Vec::new();
        for m in self.moduli1.iter().flatten() {
            match (idx(&m.from), idx(&m.to)) {
                (Some(a), Some(b)) if a - b != 2 => gap1.push(format!(
                    "M({},{}) listed as 1-dimensional but index gap is {}",
                    m.from,
                    m.to,
                    a - b
                )),
                (Some(_), Some(_)) => {}
                _ => unknown.push(format!("M({},{}) references an unknown object", m.from, m.to)),
            }
            if !tables.insert((1, &m.from, &m.to)) {
                dup_tables.push(format!("M({},{}) listed twice", m.from, m.to));
            }
            for (ci, comp) in m.components.iter().enumerate() {
                if let Component::Interval { ends } = comp {
                    if ends.len() != 2 {
                        arity.push(format!(
                            "M({},{}) component {ci} is an interval with {} ends",
                            m.from,
                            m.to,
                            ends.len()
                        ));
                    }
                    for e in ends {
                        if self.broken_sign(&m.from, &m.to, e).is_none() {
                            refs.push(format!(
                                "M({},{}) component {ci} end ({},{},{}) references no broken flow",
                                m.from, m.to, e.mid, e.p, e.q
                            ));
                        }
                    }
                }
            }
        }
        r.record("moduli reference known objects", unknown);
        r.record("0-dimensional moduli have index gap 1", gap0);
        r.record("1-dimensional moduli have index gap 2", gap1);
        r.record("signs are +1 or -1", signs);
        r.record("each moduli table listed once", dup_tables);
        r.record("interval components have two ends", arity);
        r.record("interval ends reference existing points", refs);
        // finitely many objects between any two is automatic for finite data
        r.record("finite type", Vec::new());
        r
    }

    fn ensure_valid(&self) -> Result<()> {
        let r = self.validate();
        if r.passed() {
            Ok(())
        } else {
            let msg: Vec<String> = r.failures().map(|(_, d)| d.to_string()).collect();
            Err(Error::InvalidCategory(msg.join("; ")))
        }
    }

    /// `∂_m`: rows are the index `m−1` objects and columns the index `m`
    /// objects, each sorted by id.
    pub fn boundary_matrix(&self, m: i64) -> Result<IntMatrix> {
        self.ensure_valid()?;
        Ok(self.boundary_unchecked(m))
    }

    fn boundary_unchecked(&self, m: i64) -> IntMatrix {
        let rows = self.objects_at(m - 1);
        let cols = self.objects_at(m);
        IntMatrix::from_fn(rows.len(), cols.len(), |i, j| self.count(&cols[j].id, &rows[i].id).into())
    }

    /// Gap-two pairs `(a, b)` with `Σ_c n_{a,c} n_{c,b} ≠ 0`, with the sum.
    fn numeric_failures(&self) -> Vec<(String, String, i64)> {
        let mut out = Vec::new();
        for a in &self.objects {
            for b in self.objects.iter().filter(|b| b.index == a.index - 2) {
                let s: i64 = self
                    .objects_at(a.index - 1)
                    .iter()
                    .map(|c| self.count(&a.id, &c.id) * self.count(&c.id, &b.id))
                    .sum();
                let s = if self.mod2 { s.rem_euclid(2) } else { s };
                if s != 0 {
                    out.push((a.id.clone(), b.id.clone(), s));
                }
            }
        }
        out.sort();
        out
    }

    /// Checks `∂∘∂ = 0` numerically and, where 1-dimensional moduli are
    /// supplied, that their interval ends are exactly the broken flows with
    /// opposite product signs at the two ends of each interval.
    pub fn d_squared_report(&self) -> Report {
        let mut r = Report::new();
        r.record(
            "numeric d^2 = 0",
            self.numeric_failures()
                .into_iter()
                .map(|(a, b, s)| format!("({a},{b}): sum over intermediate objects = {s}"))
                .collect(),
        );
        let Some(m1) = &self.moduli1 else { return r };
        let mut failures = Vec::new();
        for m in m1 {
            let expected: BTreeMap<BrokenFlow, i8> = self.broken_flows(&m.from, &m.to).into_iter().collect();
            let mut used: BTreeMap<BrokenFlow, usize> = BTreeMap::new();
            for (ci, comp) in m.components.iter().enumerate() {
                let Component::Interval { ends } = comp else { continue };
                for e in ends {
                    *used.entry(e.clone()).or_default() += 1;
                }
                if ends.len() != 2 {
                    failures.push(format!("({},{}) component {ci}: {} ends", m.from, m.to, ends.len()));
                    continue;
                }
                if !self.mod2 {
                    let s0 = self.broken_sign(&m.from, &m.to, &ends[0]);
                    let s1 = self.broken_sign(&m.from, &m.to, &ends[1]);
                    if let (Some(s0), Some(s1)) = (s0, s1) {
                        if s0 == s1 {
                            failures.push(format!(
                                "({},{}) component {ci}: both ends have product sign {s0:+}",
                                m.from, m.to
                            ));
                        }
                    }
                }
            }
            for (e, n) in &used {
                if !expected.contains_key(e) {
                    failures.push(format!("({},{}) end ({},{},{}) is not a broken flow", m.from, m.to, e.mid, e.p, e.q));
                } else if *n != 1 {
                    failures.push(format!("({},{}) broken flow ({},{},{}) used {n} times", m.from, m.to, e.mid, e.p, e.q));
                }
            }
            for e in expected.keys() {
                if !used.contains_key(e) {
                    failures.push(format!("({},{}) broken flow ({},{},{}) is no interval end", m.from, m.to, e.mid, e.p, e.q));
                }
            }
        }
        r.record("interval ends match broken flows", failures);
        r
    }

    /// The chain complex generated by the objects, graded by index.
    pub fn morse_complex(&self) -> Result<ChainComplex> {
        self.ensure_valid()?;
        if let Some((a, b, s)) = self.numeric_failures().into_iter().next() {
            return Err(Error::DSquaredNonzero(format!("({a},{b}), sum {s}")));
        }
        let Some((lo, hi)) = self.index_range() else { return Ok(ChainComplex::zero()) };
        let labels = (lo..=hi).map(|m| self.objects_at(m).iter().map(|o| o.id.clone()).collect()).collect();
        let boundaries = (lo..=hi).map(|m| self.boundary_unchecked(m)).collect();
        ChainComplex::new(lo, labels, boundaries)
    }

    /// Homology per index. In mod-2 mode the groups are 𝔽₂-vector spaces,
    /// reported as free ranks.
    pub fn homology(&self) -> Result<Vec<(i64, HomologyGroup)>> {
        let c = self.morse_complex()?;
        if self.mod2 {
            return Ok(c.betti(&Field::Prime(2)).into_iter().map(|(d, b)| (d, HomologyGroup::free(b))).collect());
        }
        c.homology()
    }

    /// Pairs `(a, b)` with a nonempty moduli table.
    fn nonempty_edges(&self) -> Vec<(&str, &str)> {
        let mut e: Vec<(&str, &str)> = self
            .moduli0
            .iter()
            .filter(|m| !m.signs.is_empty())
            .map(|m| (m.from.as_str(), m.to.as_str()))
            .collect();
        e.extend(
            self.moduli1
                .iter()
                .flatten()
                .filter(|m| !m.components.is_empty())
                .map(|m| (m.from.as_str(), m.to.as_str())),
        );
        e
    }

    /// Objects `α` with `a ≥ α` in the order generated by nonempty moduli.
    pub fn below(&self, a: &str) -> BTreeSet<String> {
        let edges = self.nonempty_edges();
        let mut seen = BTreeSet::from([a.to_string()]);
        let mut stack = vec![a.to_string()];
        while let Some(x) = stack.pop() {
            for (f, t) in &edges {
                if *f == x && seen.insert(t.to_string()) {
                    stack.push(t.to_string());
                }
            }
        }
        seen
    }

    /// The full subcategory on objects `α` with `a ≥ α ≥ b`.
    pub fn interval_subcategory(&self, a: &str, b: &str) -> Result<FlowCategory> {
        for id in [a, b] {
            if self.object(id).is_none() {
                return Err(Error::UnknownObject(id.to_string()));
            }
        }
        let below_a = self.below(a);
        let keep: BTreeSet<&str> = self
            .objects
            .iter()
            .map(|o| o.id.as_str())
            .filter(|id| below_a.contains(*id) && self.below(id).contains(b))
            .collect();
        let inside = |x: &str| keep.contains(x);
        Ok(FlowCategory {
            objects: self.objects.iter().filter(|o| inside(&o.id)).cloned().collect(),
            moduli0: self.moduli0.iter().filter(|m| inside(&m.from) && inside(&m.to)).cloned().collect(),
            moduli1: self
                .moduli1
                .as_ref()
                .map(|v| v.iter().filter(|m| inside(&m.from) && inside(&m.to)).cloned().collect()),
            mod2: self.mod2,
        })
    }
}

/// Flow categories of the standard height functions on the circle, sphere
/// and torus.
pub mod standard {
    use super::*;

    /// Height function on the round circle.
    pub fn circle() -> FlowCategory {
        FlowCategory::new(
            vec![FlowObject::new("max", 1), FlowObject::new("min", 0)],
            vec![ModuliZero::new("max", "min", vec![1, -1])],
        )
    }

    pub fn sphere() -> FlowCategory {
        FlowCategory::new(vec![FlowObject::new("max", 2), FlowObject::new("min", 0)], vec![])
    }

    /// Torus with two opposite-sign flows for every adjacent pair, and the
    /// matching 1-dimensional moduli of `M̄(max, min)`.
    pub fn torus() -> FlowCategory {
        let objects = vec![
            FlowObject::new("max", 2),
            FlowObject::new("s1", 1),
            FlowObject::new("s2", 1),
            FlowObject::new("min", 0),
        ];
        let moduli0 = vec![
            ModuliZero::new("max", "s1", vec![1, -1]),
            ModuliZero::new("max", "s2", vec![1, -1]),
            ModuliZero::new("s1", "min", vec![1, -1]),
            ModuliZero::new("s2", "min", vec![1, -1]),
        ];
        // broken flows (s, p, q) have sign sp*sq; pair each + with a −
        let mut components = Vec::new();
        for s in ["s1", "s2"] {
            components.push(Component::interval(BrokenFlow::new(s, 0, 0), BrokenFlow::new(s, 0, 1)));
            components.push(Component::interval(BrokenFlow::new(s, 1, 1), BrokenFlow::new(s, 1, 0)));
        }
        FlowCategory::new(objects, moduli0).with_moduli1(vec![ModuliOne {
            from: "max".into(),
            to: "min".into(),
            components,
        }])
    }
}
