//! `qgd`: runs verification suites and writes a report.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 when a spec
//! file cannot be read or parsed.

mod load;
mod suites;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use qgd::gl::{WeightedAlgebra, WeightedAlgebraSpec};
use qgd::hopf::{builtin_names, FiniteGroup};
use qgd::report::VerificationReport;
use qgd::semigrp::{permutation_length, GeneratorSpecJson, DEFAULT_T_GRID};
use qgd::twist::{rank_two_bicharacter, BicharacterSpec};
use qgd::Tolerance;

use load::SpecError;
use suites::{Settings, TwistInput};

#[derive(Parser, Debug)]
#[command(name = "qgd", version, about = "Verification suites for finite quantum groups and Dirichlet forms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: Global,
}

#[derive(Args, Debug)]
struct Global {
    /// Seed for every sampled check.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Structural tolerance.
    #[arg(long, global = true, env = "QGD_TOL")]
    tol: Option<f64>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Samples per randomized check.
    #[arg(long, global = true, default_value_t = 40)]
    samples: usize,
    /// Time grid, comma separated.
    #[arg(long = "t", global = true, value_delimiter = ',')]
    t_grid: Vec<f64>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Markdown,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Hopf *-algebra axioms for spec files and builtins (all builtins if none given).
    Check {
        specs: Vec<PathBuf>,
        #[arg(long)]
        builtin: Vec<String>,
    },
    /// Duality and multiplicative unitary checks.
    Dual {
        #[arg(long)]
        builtin: Vec<String>,
    },
    /// Convolution semigroup and the correspondence cycle.
    Semigroup {
        #[arg(long)]
        builtin: String,
        /// Generating functional spec; a symmetrized random state if omitted.
        #[arg(long)]
        gen: Option<PathBuf>,
        #[arg(long)]
        symmetrize: bool,
    },
    /// Dirichlet form of a symmetric convolution semigroup.
    Dirichlet {
        #[arg(long)]
        builtin: String,
        #[arg(long)]
        gen: Option<PathBuf>,
    },
    /// Bicharacter twist of a group algebra, with optional semigroup transport.
    Twist {
        #[arg(long)]
        builtin: String,
        #[arg(long)]
        cocycle: PathBuf,
        #[arg(long)]
        gen: Option<PathBuf>,
    },
    /// Markov operators and Dirichlet forms on a weighted matrix algebra.
    GlLab {
        /// Weighted algebra spec; M₂ ⊕ C with ρ = diag(0.5, 0.3, 0.2) if omitted.
        #[arg(long)]
        weighted: Option<PathBuf>,
        #[arg(long, default_value_t = 20)]
        cases: usize,
    },
    /// Every suite on the builtin examples.
    All,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let settings = match settings(&cli.global) {
        Ok(s) => s,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let report = match run(&cli.command, &settings) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let text = match cli.global.format {
        Format::Json => report.to_json(timestamp()),
        Format::Markdown => report.to_markdown(),
    };
    match &cli.global.report {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                eprintln!("error: {}: {e}", path.display());
                return ExitCode::from(2);
            }
            let failed = report.failures().count();
            eprintln!("{} checks, {failed} failed, report written to {}", report.entries.len(), path.display());
        }
        None => println!("{text}"),
    }
    for e in report.failures() {
        eprintln!("FAIL {}::{} ({}) residual {:.3e} > {:.1e}", e.module, e.check, e.anchor, e.residual, e.tolerance);
    }
    if report.pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn timestamp() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

fn settings(g: &Global) -> Result<Settings, String> {
    let mut tol = Tolerance::default();
    if let Some(t) = g.tol {
        tol = tol.with_structural(t);
        tol.validate().map_err(|e| format!("tolerance: {e}"))?;
    }
    let t_grid = if g.t_grid.is_empty() { DEFAULT_T_GRID.to_vec() } else { g.t_grid.clone() };
    if let Some(t) = t_grid.iter().find(|t| !t.is_finite() || **t < 0.0) {
        return Err(format!("time grid entry {t} must be finite and non-negative"));
    }
    Ok(Settings {
        tol,
        seed: g.seed,
        samples: g.samples,
        t_grid,
    })
}

fn run(cmd: &Command, s: &Settings) -> Result<VerificationReport, SpecError> {
    let mut report = VerificationReport::new();
    match cmd {
        Command::Check { specs, builtin } => {
            let names = if specs.is_empty() && builtin.is_empty() { builtin_names() } else { builtin.clone() };
            for name in &names {
                report.extend(suites::check(&load::builtin(name)?, s));
            }
            for path in specs {
                let g = load::quantum_group_file(path)?;
                report.extend(suites::check(&g, s).tag("spec", &path.display().to_string()));
            }
        }
        Command::Dual { builtin } => {
            let names = if builtin.is_empty() { builtin_names() } else { builtin.clone() };
            for name in &names {
                report.extend(suites::dual_suite(&load::builtin(name)?, s));
            }
        }
        Command::Semigroup { builtin, gen, symmetrize } => {
            let g = load::builtin(builtin)?;
            match gen {
                Some(path) => {
                    let spec: GeneratorSpecJson = load::read_json(path)?;
                    let spec = spec.build(&g).map_err(|e| SpecError::plain(path, e))?;
                    report.extend(suites::semigroup_suite(&g, &spec, *symmetrize, s));
                }
                None => report.extend(suites::semigroup_suite(&g, &suites::default_generator(&g, s.seed), true, s)),
            }
        }
        Command::Dirichlet { builtin, gen } => {
            let g = load::builtin(builtin)?;
            let spec = match gen {
                Some(path) => {
                    let spec: GeneratorSpecJson = load::read_json(path)?;
                    spec.build(&g).map_err(|e| SpecError::plain(path, e))?
                }
                None => suites::default_generator(&g, s.seed),
            };
            report.extend(suites::dirichlet_suite(&g, &spec, s));
        }
        Command::Twist { builtin, cocycle, gen } => {
            let g = load::builtin(builtin)?;
            let group = load::group_of(builtin)?;
            let bicharacter: BicharacterSpec = load::read_json(cocycle)?;
            let generator = match gen {
                Some(path) => {
                    let spec: GeneratorSpecJson = load::read_json(path)?;
                    Some(spec.build(&g).map_err(|e| SpecError::plain(path, e))?)
                }
                None => None,
            };
            let input = TwistInput {
                group: &group,
                bicharacter: &bicharacter,
                generator: generator.as_ref(),
            };
            report.extend(suites::twist_suite(&g, &input, s));
        }
        Command::GlLab { weighted, cases } => {
            let w = match weighted {
                Some(path) => {
                    let spec: WeightedAlgebraSpec = load::read_json(path)?;
                    spec.build(&s.tol).map_err(|e| SpecError::plain(path, e))?
                }
                None => default_weighted(s)?,
            };
            report.extend(suites::gl_lab(&w, *cases, s));
        }
        Command::All => report = all(s)?,
    }
    Ok(report)
}

fn default_weighted(s: &Settings) -> Result<WeightedAlgebra, SpecError> {
    WeightedAlgebra::diagonal(vec![2, 1], &[0.5, 0.3, 0.2], &s.tol).map_err(|e| SpecError::plain("<default weighted algebra>", e))
}

fn all(s: &Settings) -> Result<VerificationReport, SpecError> {
    let mut report = VerificationReport::new();
    for name in builtin_names() {
        let g = load::builtin(&name)?;
        report.extend(suites::check(&g, s));
        report.extend(suites::dual_suite(&g, s));
    }
    for name in ["kac_paljutkin", "group_algebra:S3", "function_algebra:Z3"] {
        let g = load::builtin(name)?;
        let spec = suites::default_generator(&g, s.seed);
        report.extend(suites::semigroup_suite(&g, &spec, true, s));
        report.extend(suites::dirichlet_suite(&g, &spec, s));
    }
    for name in ["Z2", "S3"] {
        let group = FiniteGroup::builtin(name).map_err(|e| SpecError::plain(name, e))?;
        let g = load::builtin(&format!("group_algebra:{name}"))?;
        let theta = if name == "S3" { permutation_length(&group) } else { vec![0.0, 1.0] };
        report.extend(suites::cnd_suite(&group, &g, &theta, true, s));
        // not conditionally negative definite: only the Schoenberg equivalence applies
        let bad: Vec<f64> = (0..group.order()).map(|k| if k == 0 { 0.0 } else { -1.0 }).collect();
        report.extend(suites::cnd_suite(&group, &g, &bad, false, s));
    }
    {
        let name = "group_algebra:D4";
        let g = load::builtin(name)?;
        let group = load::group_of(name)?;
        let subgroup = vec![0, 2, 4, 6];
        let k = rank_two_bicharacter(&group, &subgroup, 2).map_err(|e| SpecError::plain(name, e))?;
        let bicharacter = BicharacterSpec {
            subgroup: subgroup.clone(),
            k: k.iter().map(|row| row.iter().map(|z| (z.re, z.im)).collect()).collect(),
        };
        let generator = qgd::semigrp::GeneratorSpec::FromCnd {
            theta: suites::theta_off_subgroup(&group, &subgroup),
        };
        let input = TwistInput {
            group: &group,
            bicharacter: &bicharacter,
            generator: Some(&generator),
        };
        report.extend(suites::twist_suite(&g, &input, s));
    }
    report.extend(suites::gl_lab(&default_weighted(s)?, 5, s));
    Ok(report)
}
