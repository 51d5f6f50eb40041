//! Commands behind the `flowcat` binary. Each returns an exit code with the
//! text for stdout and stderr so that they can be driven from tests.
//!
//! Exit codes: 0 success, 1 a check failed, 2 unreadable input or unknown
//! example name, 3 numerical generation failed, 4 suspension index too small.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde_json::json;

use crate::comparison::{build_psi, quasi_iso_check, verify_chain_map};
use crate::error::{Error, Result};
use crate::flowcat::FlowCategory;
use crate::io::CategoryFile;
use crate::linalg::field::Field;
use crate::morse::{builtin, continuation, MorseModel, Tolerances};
use crate::realize::{default_shift, realize};
use crate::report::Report;
use crate::spectral::{build_e1, collapse_check, turn_page, CoefficientTheory};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_GENERATION: i32 = 3;
pub const EXIT_SHIFT_TOO_SMALL: i32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Coeffs {
    #[default]
    Z,
    Field(Field),
}

impl FromStr for Coeffs {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Z" => Ok(Coeffs::Z),
            "Q" => Ok(Coeffs::Field(Field::Rational)),
            _ => {
                let p = s
                    .strip_prefix("Fp:")
                    .and_then(|p| p.parse().ok())
                    .ok_or_else(|| Error::Parse(format!("coefficients must be Z, Q or Fp:p, got {s}")))?;
                Ok(Coeffs::Field(Field::prime(p)?))
            }
        }
    }
}

impl Coeffs {
    pub fn name(&self) -> String {
        match self {
            Coeffs::Z => "Z".into(),
            Coeffs::Field(k) => field_name(k),
        }
    }
}

fn field_name(k: &Field) -> String {
    match k {
        Field::Rational => "Q".into(),
        Field::Prime(p) => format!("F{p}"),
    }
}

/// Ranks of a coefficient theory on a point, written `q:rank,q:rank`.
pub fn parse_theory_ranks(s: &str) -> Result<Vec<(i64, usize)>> {
    s.split(',')
        .map(|part| {
            let (q, r) = part.split_once(':').ok_or_else(|| Error::Parse(format!("expected q:rank, got {part}")))?;
            let q = q.trim().parse().map_err(|_| Error::Parse(format!("bad degree {q}")))?;
            let r = r.trim().parse().map_err(|_| Error::Parse(format!("bad rank {r}")))?;
            Ok((q, r))
        })
        .collect()
}

#[derive(Debug, Clone, Default)]
pub struct RunConfig {
    pub tolerances: Tolerances,
    /// Suspension index for `realize`; the smallest admissible one if unset.
    pub shift: Option<i64>,
    pub coeffs: Coeffs,
    /// Ranks `h_q(pt)` of a coefficient theory for `spectral`; ordinary
    /// coefficients if unset.
    pub theory: Option<Vec<(i64, usize)>>,
    pub seed: u64,
    /// Worker threads for numerical generation; all cores if unset.
    pub jobs: Option<usize>,
    pub out: Option<PathBuf>,
    /// Structured output on stdout instead of text tables.
    pub json: bool,
}

#[derive(Debug, Clone)]
pub enum Command {
    Validate { path: PathBuf },
    Homology { path: PathBuf },
    Spectral { path: PathBuf },
    Generate { name: String, compare_to: Option<String> },
    Compare { path: PathBuf },
    Realize { path: PathBuf },
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Self { code: EXIT_OK, stdout, stderr: String::new() }
    }

    fn fail(code: i32, stderr: impl Into<String>) -> Self {
        Self { code, stdout: String::new(), stderr: stderr.into() }
    }

    fn error(e: &Error) -> Self {
        let code = match e {
            Error::Parse(_) | Error::Io(_) => EXIT_PARSE,
            Error::ShiftTooSmall { .. } => EXIT_SHIFT_TOO_SMALL,
            _ => EXIT_CHECK_FAILED,
        };
        Self::fail(code, format!("error: {e}\n"))
    }
}

pub fn run(cmd: &Command, cfg: &RunConfig) -> Outcome {
    if let Err(e) = cfg.tolerances.validate() {
        return Outcome::fail(EXIT_PARSE, format!("error: {e}\n"));
    }
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cfg.jobs {
        pool = pool.num_threads(n.max(1));
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => return Outcome::fail(EXIT_GENERATION, format!("error: {e}\n")),
    };
    pool.install(|| match cmd {
        Command::Validate { path } => cmd_validate(path),
        Command::Homology { path } => cmd_homology(path, cfg),
        Command::Spectral { path } => cmd_spectral(path, cfg),
        Command::Generate { name, compare_to } => cmd_generate(name, compare_to.as_deref(), cfg),
        Command::Compare { path } => cmd_compare(path),
        Command::Realize { path } => cmd_realize(path, cfg),
    })
}

fn validation(f: &FlowCategory) -> Report {
    let mut r = f.validate();
    if r.passed() {
        r.merge(f.d_squared_report());
    }
    r
}

/// Reads a file and requires it to validate; the error outcome otherwise.
fn load_valid(path: &Path) -> std::result::Result<CategoryFile, Outcome> {
    let file = CategoryFile::read(path).map_err(|e| Outcome::error(&e))?;
    let r = validation(&file.category);
    if !r.passed() {
        return Err(Outcome { code: EXIT_CHECK_FAILED, stdout: r.to_string(), stderr: "error: category is not valid\n".into() });
    }
    Ok(file)
}

fn write_out(cfg: &RunConfig, name: &str, contents: &str) -> Result<()> {
    if let Some(dir) = &cfg.out {
        fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
        let path = dir.join(name);
        fs::write(&path, contents).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

pub fn cmd_validate(path: &Path) -> Outcome {
    let file = match CategoryFile::read(path) {
        Ok(f) => f,
        Err(e) => return Outcome::error(&e),
    };
    let r = validation(&file.category);
    Outcome { code: if r.passed() { EXIT_OK } else { EXIT_CHECK_FAILED }, stdout: r.to_string(), stderr: String::new() }
}

pub fn cmd_homology(path: &Path, cfg: &RunConfig) -> Outcome {
    let file = match load_valid(path) {
        Ok(f) => f,
        Err(o) => return o,
    };
    let f = &file.category;
    let coeffs = cfg.coeffs.name();
    let mut tsv = String::from("degree\tfree_rank\ttorsion\n");
    let mut text = format!("degree\tH_*(-; {coeffs})\n");
    let mut rows = Vec::new();
    match cfg.coeffs {
        Coeffs::Z => {
            let h = match f.homology() {
                Ok(h) => h,
                Err(e) => return Outcome::error(&e),
            };
            for (d, g) in h {
                let torsion: Vec<String> = g.torsion.iter().map(ToString::to_string).collect();
                let _ = writeln!(tsv, "{d}\t{}\t{}", g.free_rank, torsion.join(","));
                let _ = writeln!(text, "{d}\t{g}");
                rows.push(json!({"degree": d, "free_rank": g.free_rank, "torsion": torsion}));
            }
        }
        Coeffs::Field(k) => {
            let c = match f.morse_complex() {
                Ok(c) => c,
                Err(e) => return Outcome::error(&e),
            };
            for (d, n) in c.betti(&k) {
                let _ = writeln!(tsv, "{d}\t{n}\t");
                let _ = writeln!(text, "{d}\t{}", if n == 0 { "0".to_string() } else { format!("{coeffs}^{n}") });
                rows.push(json!({"degree": d, "free_rank": n, "torsion": []}));
            }
        }
    }
    let structured = serde_json::to_string_pretty(&json!({"coefficients": coeffs, "homology": rows})).unwrap() + "\n";
    if let Err(e) = write_out(cfg, "homology.tsv", &tsv).and_then(|_| write_out(cfg, "homology.json", &structured)) {
        return Outcome::error(&e);
    }
    Outcome::ok(if cfg.json { structured } else { text })
}

pub fn cmd_spectral(path: &Path, cfg: &RunConfig) -> Outcome {
    let file = match load_valid(path) {
        Ok(f) => f,
        Err(o) => return o,
    };
    let f = &file.category;
    let mut text = String::new();
    let field = match cfg.coeffs {
        Coeffs::Z => {
            text.push_str("integral coefficients: page ranks are computed over Q\n");
            Field::Rational
        }
        Coeffs::Field(k) => k,
    };
    let theory = match &cfg.theory {
        Some(ranks) => CoefficientTheory::new("h", field, ranks.iter().copied()),
        None => CoefficientTheory::ordinary(field),
    };
    let e1 = match build_e1(f, &theory) {
        Ok(e) => e,
        Err(e) => return Outcome::error(&e),
    };
    let e2 = match turn_page(&e1, &e1.differentials) {
        Ok(e) => e,
        Err(e) => return Outcome::error(&e),
    };
    text.push_str(&e1.to_text());
    text.push('\n');
    text.push_str(&e2.to_text());
    let report = theory.is_ordinary().then(|| collapse_check(f, &theory));
    if let Some(r) = &report {
        text.push('\n');
        text.push_str(&r.to_string());
    }
    let structured = serde_json::to_string_pretty(&json!({
        "theory": theory.name,
        "field": field_name(&field),
        "pages": [e1.to_json(), e2.to_json()],
        "collapses_at_e2": report.as_ref().map(Report::passed),
    }))
    .unwrap()
        + "\n";
    let tsv = e1.to_tsv() + &e2.to_tsv().lines().skip(1).map(|l| format!("{l}\n")).collect::<String>();
    if let Err(e) = write_out(cfg, "spectral.tsv", &tsv).and_then(|_| write_out(cfg, "spectral.json", &structured)) {
        return Outcome::error(&e);
    }
    let code = if report.as_ref().is_some_and(|r| !r.passed()) { EXIT_CHECK_FAILED } else { EXIT_OK };
    Outcome { code, stdout: if cfg.json { structured } else { text }, stderr: String::new() }
}

fn file_stem(name: &str) -> String {
    name.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '.' { c } else { '_' }).collect()
}

pub fn cmd_generate(name: &str, compare_to: Option<&str>, cfg: &RunConfig) -> Outcome {
    let gen = |name: &str| -> std::result::Result<MorseModel, Outcome> {
        let spec = builtin::by_name(name).map_err(|e| match e {
            Error::Parse(_) => Outcome::fail(EXIT_PARSE, format!("error: {e}\n")),
            _ => Outcome::fail(EXIT_GENERATION, format!("error: generating {name}: {e}\n")),
        })?;
        MorseModel::new(spec, cfg.tolerances, cfg.seed)
            .map_err(|e| Outcome::fail(EXIT_GENERATION, format!("error: generating {name}: {e}\n")))
    };
    let generation = |e: Error| Outcome::fail(EXIT_GENERATION, format!("error: generating {name}: {e}\n"));
    let model = match gen(name) {
        Ok(m) => m,
        Err(o) => return o,
    };
    let category = match model.flow_category() {
        Ok(f) => f,
        Err(e) => return generation(e),
    };
    let mut file = CategoryFile::new(category);
    if let Some(other) = compare_to {
        let target = match gen(other) {
            Ok(m) => m,
            Err(o) => return o,
        };
        match continuation::comparison(&model, &target) {
            Ok(d) => file = file.with_comparison(&d),
            Err(e) => return generation(e),
        }
    }
    file.metadata.tolerances = Some(cfg.tolerances);
    file.metadata.seed = Some(cfg.seed);
    let text = file.to_json();
    let Some(dir) = &cfg.out else {
        return Outcome::ok(text);
    };
    let trajectories = match model.orbit_trajectories() {
        Ok(t) => t,
        Err(e) => return generation(e),
    };
    let stem = file_stem(name);
    let write = || -> Result<PathBuf> {
        let tdir = dir.join(format!("{stem}_trajectories"));
        fs::create_dir_all(&tdir).map_err(|e| Error::Io(format!("{}: {e}", tdir.display())))?;
        for (key, t) in &trajectories {
            let p = tdir.join(format!("{key}.tsv"));
            fs::write(&p, t.to_columns()).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
        }
        let path = dir.join(format!("{stem}.json"));
        file.write(&path)?;
        Ok(path)
    };
    match write() {
        Ok(path) => Outcome::ok(format!(
            "wrote {} ({} objects, {} trajectories)\n",
            path.display(),
            file.category.objects.len(),
            trajectories.len()
        )),
        Err(e) => Outcome::fail(EXIT_GENERATION, format!("error: {e}\n")),
    }
}

pub fn cmd_compare(path: &Path) -> Outcome {
    let file = match CategoryFile::read(path) {
        Ok(f) => f,
        Err(e) => return Outcome::error(&e),
    };
    let Some(d) = file.comparison_data() else {
        return Outcome::fail(EXIT_PARSE, format!("error: {} has no comparison block\n", path.display()));
    };
    let mut report = Report::new();
    for (side, f) in [("source", &d.source), ("target", &d.target)] {
        let r = validation(f);
        report.record(format!("{side} category is valid"), r.failures().map(|(c, m)| format!("{c}: {m}")).collect());
    }
    if !report.passed() {
        return Outcome { code: EXIT_CHECK_FAILED, stdout: report.to_string(), stderr: String::new() };
    }
    let psi = match build_psi(&d) {
        Ok(p) => p,
        Err(e) => {
            report.record("mixed moduli are well formed", vec![e.to_string()]);
            return Outcome { code: EXIT_CHECK_FAILED, stdout: report.to_string(), stderr: String::new() };
        }
    };
    let chain = verify_chain_map(&d, &psi);
    let chain_ok = chain.passed();
    report.merge(chain);
    if chain_ok {
        match quasi_iso_check(&d, &psi) {
            Ok(q) => report.merge(q),
            Err(e) => report.record("quasi-isomorphism", vec![e.to_string()]),
        }
    }
    let mut text = String::new();
    for (m, p) in &psi {
        let _ = writeln!(text, "Psi_{m} = {p}");
    }
    text.push_str(&report.to_string());
    Outcome { code: if report.passed() { EXIT_OK } else { EXIT_CHECK_FAILED }, stdout: text, stderr: String::new() }
}

pub fn cmd_realize(path: &Path, cfg: &RunConfig) -> Outcome {
    let file = match load_valid(path) {
        Ok(f) => f,
        Err(o) => return o,
    };
    let f = &file.category;
    let shift = cfg.shift.unwrap_or_else(|| default_shift(f));
    let cw = match realize(f, shift) {
        Ok(c) => c,
        Err(e) => return Outcome::error(&e),
    };
    let written = write_out(cfg, "cw.dot", &cw.to_dot())
        .and_then(|_| write_out(cfg, "cw.tsv", &cw.to_tsv()))
        .and_then(|_| write_out(cfg, "cw.json", &cw.to_json()));
    if let Err(e) = written {
        return Outcome::error(&e);
    }
    if cfg.json {
        return Outcome::ok(cw.to_json());
    }
    let mut text = format!("shift L = {shift}\n");
    text.push_str(&cw.to_tsv());
    for d in cw.attaching_degrees.iter().filter(|d| d.degree != 0) {
        let _ = writeln!(text, "deg({} -> {}) = {}", d.from, d.to, d.degree);
    }
    Outcome::ok(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficient_flags() {
        assert_eq!("Z".parse::<Coeffs>().unwrap(), Coeffs::Z);
        assert_eq!("Q".parse::<Coeffs>().unwrap(), Coeffs::Field(Field::Rational));
        assert_eq!("Fp:5".parse::<Coeffs>().unwrap(), Coeffs::Field(Field::Prime(5)));
        assert!("Fp:4".parse::<Coeffs>().is_err());
        assert!("R".parse::<Coeffs>().is_err());
    }

    #[test]
    fn theory_ranks() {
        assert_eq!(parse_theory_ranks("0:1,1:2").unwrap(), vec![(0, 1), (1, 2)]);
        assert!(parse_theory_ranks("0=1").is_err());
    }

    #[test]
    fn unknown_example_names_give_exit_2() {
        let o = cmd_generate("klein-bottle", None, &RunConfig::default());
        assert_eq!(o.code, EXIT_PARSE);
    }

    #[test]
    fn numerical_failures_give_exit_3() {
        assert_eq!(cmd_generate("monkey-saddle", None, &RunConfig::default()).code, EXIT_GENERATION);
        assert_eq!(cmd_generate("loopspace:2,1,0", None, &RunConfig::default()).code, EXIT_GENERATION);
    }
}
