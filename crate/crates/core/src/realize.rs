//! Cell bookkeeping for the realization of a flow category: one cell per
//! object in dimension `index + (L − q)`, attaching degrees given by the
//! signed counts of 0-dimensional moduli spaces.

use serde::Serialize;

use crate::chain::ChainComplex;
use crate::error::{Error, Result};
use crate::flowcat::FlowCategory;
use crate::linalg::IntMatrix;
use crate::report::Report;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Cell {
    pub id: String,
    pub index: i64,
    pub dimension: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AttachingDegree {
    pub from: String,
    pub to: String,
    pub degree: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CwData {
    /// Sorted by (index, id).
    pub cells: Vec<Cell>,
    /// One entry per pair of cells whose dimensions differ by one.
    pub attaching_degrees: Vec<AttachingDegree>,
    pub shift: i64,
    pub base_index: i64,
}

/// Smallest admissible suspension index, `max index − min index`.
pub fn default_shift(f: &FlowCategory) -> i64 {
    f.index_range().map_or(0, |(lo, hi)| hi - lo)
}

pub fn realize(f: &FlowCategory, shift: i64) -> Result<CwData> {
    f.boundary_matrix(0)?; // validity
    let Some((lo, hi)) = f.index_range() else {
        return Ok(CwData { cells: vec![], attaching_degrees: vec![], shift, base_index: 0 });
    };
    if shift < hi - lo {
        return Err(Error::ShiftTooSmall { shift, min: hi - lo });
    }
    let offset = shift - lo;
    let mut cells = Vec::new();
    let mut attaching_degrees = Vec::new();
    for m in lo..=hi {
        for o in f.objects_at(m) {
            cells.push(Cell { id: o.id.clone(), index: m, dimension: m + offset });
            for b in f.objects_at(m - 1) {
                attaching_degrees.push(AttachingDegree { from: o.id.clone(), to: b.id.clone(), degree: f.count(&o.id, &b.id) });
            }
        }
    }
    Ok(CwData { cells, attaching_degrees, shift, base_index: lo })
}

impl CwData {
    fn cells_in(&self, dim: i64) -> Vec<&Cell> {
        self.cells.iter().filter(|c| c.dimension == dim).collect()
    }

    fn degree(&self, from: &str, to: &str) -> i64 {
        self.attaching_degrees.iter().find(|d| d.from == from && d.to == to).map_or(0, |d| d.degree)
    }

    /// Cellular chain complex, graded by cell dimension.
    pub fn cellular_complex(&self) -> ChainComplex {
        let (Some(lo), Some(hi)) = (self.cells.iter().map(|c| c.dimension).min(), self.cells.iter().map(|c| c.dimension).max())
        else {
            return ChainComplex::zero();
        };
        let mut labels = Vec::new();
        let mut boundaries = Vec::new();
        for d in lo..=hi {
            let cols = self.cells_in(d);
            let rows = if d == lo { vec![] } else { self.cells_in(d - 1) };
            labels.push(cols.iter().map(|c| c.id.clone()).collect());
            boundaries.push(IntMatrix::from_fn(rows.len(), cols.len(), |i, j| self.degree(&cols[j].id, &rows[i].id).into()));
        }
        ChainComplex::new(lo, labels, boundaries).expect("shapes follow from cell dimensions")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable") + "\n"
    }

    /// Graphviz description: cells as nodes, nonzero degrees as labeled edges.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph cw {\n  rankdir=TB;\n");
        for c in &self.cells {
            s.push_str(&format!("  \"{}\" [label=\"{} (dim {})\"];\n", c.id, c.id, c.dimension));
        }
        for d in self.attaching_degrees.iter().filter(|d| d.degree != 0) {
            s.push_str(&format!("  \"{}\" -> \"{}\" [label=\"{}\"];\n", d.from, d.to, d.degree));
        }
        s.push_str("}\n");
        s
    }

    pub fn to_tsv(&self) -> String {
        let mut s = String::from("id\tindex\tdimension\n");
        for c in &self.cells {
            s.push_str(&format!("{}\t{}\t{}\n", c.id, c.index, c.dimension));
        }
        s
    }
}

/// One filtration level: a wedge of `sphere_count` spheres of dimension
/// `sphere_dimension` (before suspension), one per object of that index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FiltrationLevel {
    pub level: i64,
    pub cells: Vec<String>,
    pub sphere_count: usize,
    pub sphere_dimension: i64,
}

impl FiltrationLevel {
    /// Dimension of the spheres in the realized subquotient for suspension index `shift`.
    pub fn realized_dimension(&self, shift: i64, base_index: i64) -> i64 {
        self.sphere_dimension + shift - base_index
    }
}

pub fn subquotient_report(f: &FlowCategory) -> Vec<FiltrationLevel> {
    f.indices()
        .into_iter()
        .map(|m| {
            let cells: Vec<String> = f.objects_at(m).iter().map(|o| o.id.clone()).collect();
            FiltrationLevel { level: m, sphere_count: cells.len(), cells, sphere_dimension: m }
        })
        .collect()
}

/// `∂_{j} ∘ ∂_{j+1} = 0` in every degree, with offending `(a, b)` pairs located.
pub fn homotopy_chain_check(f: &FlowCategory) -> Report {
    let mut r = Report::new();
    let mut failures = Vec::new();
    if let Some((lo, hi)) = f.index_range() {
        for j in lo + 2..=hi {
            let top = f.objects_at(j);
            let bottom = f.objects_at(j - 2);
            for a in &top {
                for b in &bottom {
                    let s: i64 = f.objects_at(j - 1).iter().map(|c| f.count(&a.id, &c.id) * f.count(&c.id, &b.id)).sum();
                    let s = if f.mod2 { s.rem_euclid(2) } else { s };
                    if s != 0 {
                        failures.push(format!("degree {j}: coefficient of {} in d(d({})) is {s}", b.id, a.id));
                    }
                }
            }
        }
    }
    r.record("composite boundaries vanish", failures);
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flowcat::standard::{circle, torus};
    use crate::flowcat::{FlowObject, ModuliZero};

    #[test]
    fn torus_cells() {
        let cw = realize(&torus(), 2).unwrap();
        let dims: Vec<i64> = cw.cells.iter().map(|c| c.dimension).collect();
        assert_eq!(dims, vec![2, 3, 3, 4]);
        assert!(cw.attaching_degrees.iter().all(|d| d.degree == 0));
        let h: Vec<(i64, usize)> = cw.cellular_complex().homology().unwrap().into_iter().map(|(d, g)| (d, g.free_rank)).collect();
        assert_eq!(h, vec![(2, 1), (3, 2), (4, 1)]);
    }

    #[test]
    fn single_object() {
        let f = FlowCategory::new(vec![FlowObject::new("x", 0)], vec![]);
        let cw = realize(&f, 0).unwrap();
        assert_eq!(cw.cells, vec![Cell { id: "x".into(), index: 0, dimension: 0 }]);
        assert!(cw.attaching_degrees.is_empty());
        assert!(homotopy_chain_check(&f).passed());
        assert_eq!(subquotient_report(&f).len(), 1);
    }

    #[test]
    fn circle_cells() {
        let cw = realize(&circle(), 1).unwrap();
        let dims: Vec<i64> = cw.cells.iter().map(|c| c.dimension).collect();
        assert_eq!(dims, vec![1, 2]);
        assert_eq!(cw.attaching_degrees.len(), 1);
        assert_eq!(cw.attaching_degrees[0].degree, 0);
    }

    #[test]
    fn shift_too_small() {
        assert_eq!(realize(&torus(), 1), Err(Error::ShiftTooSmall { shift: 1, min: 2 }));
    }

    #[test]
    fn empty_category() {
        let cw = realize(&FlowCategory::default(), 0).unwrap();
        assert!(cw.cellular_complex().is_empty());
        assert!(subquotient_report(&FlowCategory::default()).is_empty());
    }

    #[test]
    fn levels() {
        let t = subquotient_report(&torus());
        assert_eq!(t.iter().map(|l| l.sphere_count).collect::<Vec<_>>(), vec![1, 2, 1]);
        assert_eq!(t[1].realized_dimension(2, 0), 3);
    }

    #[test]
    fn chain_check_locates_failure() {
        assert!(homotopy_chain_check(&torus()).passed());
        let f = FlowCategory::new(
            vec![FlowObject::new("a", 2), FlowObject::new("b", 1), FlowObject::new("c", 0)],
            vec![ModuliZero::new("a", "b", vec![1]), ModuliZero::new("b", "c", vec![1])],
        );
        let r = homotopy_chain_check(&f);
        assert!(!r.passed());
        assert!(r.checks[0].details[0].contains("c in d(d(a))"));
    }

    #[test]
    fn exports() {
        let mut f = circle();
        f.moduli0[0].signs = vec![1];
        let cw = realize(&f, 1).unwrap();
        assert!(cw.to_dot().contains("\"max\" -> \"min\" [label=\"1\"]"));
        assert!(cw.to_tsv().starts_with("id\tindex\tdimension\n"));
        assert!(cw.to_json().contains("\"shift\": 1"));
    }
}
