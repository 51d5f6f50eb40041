use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use flowcat::cli::{self, Coeffs, Command, RunConfig, EXIT_PARSE};
use flowcat::morse::Tolerances;

/// Chain complexes, homology, realizations and spectral sequences of flow
/// categories.
///
/// Exit codes: 0 ok, 1 a check failed, 2 unreadable input or unknown example,
/// 3 numerical generation failed, 4 suspension index too small.
#[derive(Parser)]
#[command(name = "flowcat", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// Coefficients: Z, Q or Fp:p.
    #[arg(long, global = true, default_value = "Z")]
    coeffs: String,
    /// Suspension index L for `realize`.
    #[arg(long, global = true, allow_negative_numbers = true)]
    shift: Option<i64>,
    /// Ranks of a coefficient theory on a point for `spectral`, as q:rank,...
    #[arg(long, global = true)]
    theory: Option<String>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for numerical generation.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Directory for written tables, graphs and trajectory dumps.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Print structured JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(flatten)]
    tol: TolArgs,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check the category axioms and d² = 0.
    Validate { path: PathBuf },
    /// Homology of the Morse complex.
    Homology { path: PathBuf },
    /// E1 and E2 pages of the coefficient spectral sequence.
    Spectral { path: PathBuf },
    /// Build a category numerically from a built-in surface.
    Generate {
        /// circle, sphere, torus, tilted-torus, dumbbell, dumbbell-rotated,
        /// monkey-saddle or loopspace:k,n,eps.
        name: String,
        /// Also compare with a second built-in surface by continuation.
        #[arg(long)]
        compare_to: Option<String>,
    },
    /// Check the comparison block of a file: chain map and quasi-isomorphism.
    Compare { path: PathBuf },
    /// Cells and attaching degrees of the realization.
    Realize { path: PathBuf },
}

#[derive(Args)]
struct TolArgs {
    #[arg(long, global = true)]
    tol_crit: Option<f64>,
    #[arg(long, global = true)]
    tol_nondeg: Option<f64>,
    #[arg(long, global = true)]
    tol_delta_arrive: Option<f64>,
    #[arg(long, global = true)]
    tol_merge: Option<f64>,
    #[arg(long, global = true)]
    tol_bisection_depth: Option<usize>,
    #[arg(long, global = true)]
    tol_max_steps: Option<usize>,
    #[arg(long, global = true)]
    tol_h_max: Option<f64>,
    #[arg(long, global = true)]
    tol_rk: Option<f64>,
    #[arg(long, global = true)]
    tol_shooting_radius: Option<f64>,
    #[arg(long, global = true)]
    tol_probe_offset: Option<f64>,
    #[arg(long, global = true)]
    tol_crossing_resolution: Option<f64>,
    #[arg(long, global = true)]
    tol_circle_samples: Option<usize>,
}

impl TolArgs {
    fn apply(&self, mut t: Tolerances) -> Tolerances {
        macro_rules! set {
            ($($flag:ident => $field:ident),*) => { $(if let Some(v) = self.$flag { t.$field = v; })* };
        }
        set!(tol_crit => tol_crit, tol_nondeg => tol_nondeg, tol_delta_arrive => delta_arrive,
            tol_merge => tol_merge, tol_bisection_depth => bisection_depth, tol_max_steps => max_steps,
            tol_h_max => h_max, tol_rk => rk_tol, tol_shooting_radius => shooting_radius,
            tol_probe_offset => probe_offset, tol_crossing_resolution => crossing_resolution,
            tol_circle_samples => circle_samples);
        t
    }
}

fn main() -> ExitCode {
    let args = Cli::parse();
    let fail = |e: flowcat::error::Error| {
        eprintln!("error: {e}");
        ExitCode::from(EXIT_PARSE as u8)
    };
    let coeffs: Coeffs = match args.coeffs.parse() {
        Ok(c) => c,
        Err(e) => return fail(e),
    };
    let theory = match args.theory.as_deref().map(cli::parse_theory_ranks).transpose() {
        Ok(t) => t,
        Err(e) => return fail(e),
    };
    let cfg = RunConfig {
        tolerances: args.tol.apply(Tolerances::default()),
        shift: args.shift,
        coeffs,
        theory,
        seed: args.seed,
        jobs: args.jobs,
        out: args.out,
        json: args.json,
    };
    let cmd = match args.command {
        Cmd::Validate { path } => Command::Validate { path },
        Cmd::Homology { path } => Command::Homology { path },
        Cmd::Spectral { path } => Command::Spectral { path },
        Cmd::Generate { name, compare_to } => Command::Generate { name, compare_to },
        Cmd::Compare { path } => Command::Compare { path },
        Cmd::Realize { path } => Command::Realize { path },
    };
    let outcome = cli::run(&cmd, &cfg);
    print!("{}", outcome.stdout);
    eprint!("{}", outcome.stderr);
    ExitCode::from(outcome.code as u8)
}
