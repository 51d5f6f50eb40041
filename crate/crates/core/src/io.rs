//! The `flowcat/1` JSON file format: a flow category, how it was produced,
//! and an optional comparison to a second category.
//!
//! Files are written with canonically ordered tables and pretty-printed, so
//! reading and rewriting a written file reproduces it byte for byte.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::comparison::{ComparisonData, MixedModuliOne, MixedModuliZero};
use crate::error::{Error, Result};
use crate::flowcat::FlowCategory;
use crate::morse::Tolerances;

pub const FORMAT: &str = "flowcat/1";

/// Sign rule recorded in files this crate writes.
pub const SIGN_CONVENTION: &str = "index-1 branches +e/-e count +1/-1; a crossing of W^s(b) along the counterclockwise unstable circle from the -e_b side to the +e_b side counts +1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Metadata {
    pub producer: String,
    pub sign_convention: String,
    /// Numerical tolerances for generated categories, `null` otherwise.
    pub tolerances: Option<Tolerances>,
    pub seed: Option<u64>,
}

impl Default for Metadata {
    fn default() -> Self {
        Self {
            producer: format!("flowcat {}", env!("CARGO_PKG_VERSION")),
            sign_convention: SIGN_CONVENTION.into(),
            tolerances: None,
            seed: None,
        }
    }
}

/// The comparison block: mixed moduli from `category` to `target`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComparisonBlock {
    pub target: FlowCategory,
    pub mixed0: Vec<MixedModuliZero>,
    #[serde(default)]
    pub mixed1: Option<Vec<MixedModuliOne>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CategoryFile {
    pub format: String,
    #[serde(default)]
    pub metadata: Metadata,
    pub category: FlowCategory,
    #[serde(default)]
    pub comparison: Option<ComparisonBlock>,
}

impl CategoryFile {
    pub fn new(category: FlowCategory) -> Self {
        Self { format: FORMAT.into(), metadata: Metadata::default(), category, comparison: None }
    }

    pub fn with_comparison(mut self, d: &ComparisonData) -> Self {
        self.category = d.source.clone();
        self.comparison =
            Some(ComparisonBlock { target: d.target.clone(), mixed0: d.mixed0.clone(), mixed1: d.mixed1.clone() });
        self
    }

    pub fn parse(text: &str) -> Result<Self> {
        let file: CategoryFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if file.format != FORMAT {
            return Err(Error::Parse(format!("unsupported format `{}`, expected `{FORMAT}`", file.format)));
        }
        Ok(file)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// Pretty JSON with canonical table order and a trailing newline.
    pub fn to_json(&self) -> String {
        let mut c = self.clone();
        c.category.canonicalize();
        if let Some(b) = &mut c.comparison {
            b.target.canonicalize();
            b.mixed0.sort_by(|x, y| (&x.from, &x.to).cmp(&(&y.from, &y.to)));
            if let Some(m1) = &mut b.mixed1 {
                m1.sort_by(|x, y| (&x.from, &x.to).cmp(&(&y.from, &y.to)));
            }
        }
        let mut s = serde_json::to_string_pretty(&c).expect("category files serialize");
        s.push('\n');
        s
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
    }

    pub fn comparison_data(&self) -> Option<ComparisonData> {
        self.comparison.as_ref().map(|b| ComparisonData {
            source: self.category.clone(),
            target: b.target.clone(),
            mixed0: b.mixed0.clone(),
            mixed1: b.mixed1.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flowcat::standard;

    #[test]
    fn written_files_round_trip_byte_for_byte() {
        for f in [standard::circle(), standard::sphere(), standard::torus()] {
            let text = CategoryFile::new(f.clone()).to_json();
            let back = CategoryFile::parse(&text).unwrap();
            assert_eq!(back.category, f.canonical());
            assert_eq!(back.to_json(), text);
        }
    }

    #[test]
    fn comparison_block_round_trips() {
        let d = ComparisonData::identity(&standard::torus());
        let text = CategoryFile::new(FlowCategory::default()).with_comparison(&d).to_json();
        let back = CategoryFile::parse(&text).unwrap();
        assert_eq!(back.to_json(), text);
        let e = back.comparison_data().unwrap();
        assert_eq!(e.source, d.source.canonical());
        assert_eq!(e.mixed0.len(), 4);
    }

    #[test]
    fn tolerances_survive_serialization() {
        let mut file = CategoryFile::new(standard::circle());
        file.metadata.tolerances = Some(Tolerances { rk_tol: 3.7e-11, ..Tolerances::default() });
        file.metadata.seed = Some(7);
        let back = CategoryFile::parse(&file.to_json()).unwrap();
        assert_eq!(back.metadata, file.metadata);
    }

    #[test]
    fn bad_input_is_a_parse_error() {
        assert!(matches!(CategoryFile::parse("{"), Err(Error::Parse(_))));
        let wrong = CategoryFile::new(standard::circle()).to_json().replace(FORMAT, "flowcat/0");
        assert!(matches!(CategoryFile::parse(&wrong), Err(Error::Parse(_))));
        let extra = CategoryFile::new(standard::circle()).to_json().replacen('{', "{\"bogus\": 1,", 1);
        assert!(matches!(CategoryFile::parse(&extra), Err(Error::Parse(_))));
    }
}
