use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cstar_orth::forms::{
    factorize_pair, preservation_check, Factorization, FactorizeOptions, MultiForm,
};
use cstar_orth::orthogonality::{bj_orthogonal_witness, decide, SearchOptions};
use cstar_orth::report::ReplayCase;
use cstar_orth::sampling::{bj_pair, generic_pair, orthogonal_pair, trial_rng};
use cstar_orth::suites::{replay, run_suite, SuiteConfig, COVERAGE, SUITES};
use cstar_orth::{AlgebraShape, ModuleVector, Relation, ToleranceConfig};
use serde::de::DeserializeOwned;
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(
    name = "cstar-orth",
    version,
    about = "Orthogonality and form-factorization checks on Hilbert C*-modules Aᵏ"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Seed echoed into every report.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    #[arg(long = "tol-eq", global = true)]
    tol_eq: Option<f64>,
    #[arg(long = "tol-psd", global = true)]
    tol_psd: Option<f64>,
    #[arg(long = "tol-opt", global = true)]
    tol_opt: Option<f64>,
    #[arg(long = "tol-sing", global = true)]
    tol_sing: Option<f64>,
    /// Write JSON here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Print progress and a one-line summary on stderr.
    #[arg(long, short, global = true)]
    verbose: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide one orthogonality relation for a pair of vectors.
    CheckOrth {
        #[arg(long, value_enum)]
        relation: RelationArg,
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        y: PathBuf,
    },
    /// Factorize F = cE for two forms.
    Factorize {
        #[arg(long = "E")]
        e: PathBuf,
        #[arg(long = "F")]
        f: PathBuf,
        /// Run the experimental procedure on non-abelian algebras with arity ≥ 2.
        #[arg(long)]
        allow_nonabelian: bool,
    },
    /// Check that F vanishes on sampled kernel tuples of E.
    PreserveCheck {
        #[arg(long = "E")]
        e: PathBuf,
        #[arg(long = "F")]
        f: PathBuf,
        #[arg(long, default_value_t = 50)]
        trials: usize,
    },
    /// Run a verification suite by id or alias.
    RunSuite {
        #[arg(long)]
        id: String,
        /// Block sizes, e.g. `2` or `1,1,1`.
        #[arg(long, default_value = "2")]
        shape: String,
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Form arity for the factorization suite.
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 50)]
        trials: usize,
    },
    /// Reproduce a worked example.
    Reproduce {
        #[arg(long)]
        example: String,
    },
    /// Re-run a recorded failure or witness.
    Replay {
        /// A replay case, failure record or witness record.
        #[arg(long)]
        case: PathBuf,
    },
    /// Write a sampled pair of vectors as fixtures.
    Sample {
        #[arg(long, value_enum, default_value_t = PairKind::Orthogonal)]
        kind: PairKind,
        #[arg(long, default_value = "2")]
        shape: String,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long)]
        x_out: PathBuf,
        #[arg(long)]
        y_out: PathBuf,
    },
    /// List suites and the statements they cover.
    ListSuites,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum RelationArg {
    /// ⟨x,y⟩ = 0.
    Ip,
    /// Birkhoff–James, by minimizing over λ.
    Bj,
    /// Birkhoff–James, by the state criterion.
    Bjw,
    /// Strong Birkhoff–James.
    Sbj,
    /// ‖xa + y‖ ≥ ‖xa‖ for all a.
    Reversed,
    /// |xa + y| ≥ |xa| for all a.
    Mod,
    /// |xa + y|² ≥ |xa|² for all a.
    Mod2,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum PairKind {
    Orthogonal,
    Generic,
    Bj,
}

/// Bad input or configuration; exits with status 2.
#[derive(Debug)]
struct ConfigError(String);

impl<E: std::fmt::Display> From<E> for ConfigError {
    fn from(e: E) -> Self {
        ConfigError(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, ConfigError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(ConfigError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn tolerances(g: &Global) -> CliResult<ToleranceConfig> {
    let d = ToleranceConfig::default();
    let cfg = ToleranceConfig {
        eq_tol: g.tol_eq.unwrap_or(d.eq_tol),
        psd_tol: g.tol_psd.unwrap_or(d.psd_tol),
        opt_tol: g.tol_opt.unwrap_or(d.opt_tol),
        sing_tol: g.tol_sing.unwrap_or(d.sing_tol),
    };
    cfg.validate()?;
    Ok(cfg)
}

fn parse_shape(s: &str) -> CliResult<AlgebraShape> {
    let dims = s
        .split(',')
        .map(|p| {
            p.trim()
                .parse::<usize>()
                .map_err(|e| ConfigError(format!("shape `{s}`: {e}")))
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(AlgebraShape::new(dims)?)
}

/// Parse a JSON fixture, naming the offending path element on failure.
fn read_fixture<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text =
        fs::read_to_string(path).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let at = e.path().to_string();
        ConfigError(format!("{}: at `{at}`: {}", path.display(), e.inner()))
    })
}

fn write_json<T: Serialize>(value: &T, path: Option<&Path>) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value)?;
    match path {
        Some(p) => {
            fs::write(p, text + "\n").map_err(|e| ConfigError(format!("{}: {e}", p.display())))
        }
        None => match writeln!(std::io::stdout().lock(), "{text}") {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
            _ => Ok(()),
        },
    }
}

/// `value` as a JSON object with the seed and tolerances added at top level.
fn with_run_info<T: Serialize>(
    value: &T,
    seed: u64,
    tol: &ToleranceConfig,
) -> CliResult<serde_json::Value> {
    let mut v = serde_json::to_value(value)?;
    if let Some(obj) = v.as_object_mut() {
        obj.insert("seed".into(), seed.into());
        obj.insert("config".into(), serde_json::to_value(tol)?);
    }
    Ok(v)
}

fn run(cli: &Cli) -> CliResult<bool> {
    let g = &cli.global;
    let tol = tolerances(g)?;
    let opts = SearchOptions {
        seed: g.seed,
        ..SearchOptions::default()
    };
    let out = g.out.as_deref();
    match &cli.command {
        Command::CheckOrth { relation, x, y } => {
            let x: ModuleVector = read_fixture(x)?;
            let y: ModuleVector = read_fixture(y)?;
            let verdict = match relation {
                RelationArg::Bjw => bj_orthogonal_witness(&x, &y, &tol, &opts)?,
                r => decide(relation_of(*r), &x, &y, &tol, &opts)?,
            };
            if g.verbose {
                eprintln!(
                    "{:?}: holds = {}, margin = {:e}",
                    verdict.relation, verdict.holds, verdict.margin
                );
            }
            write_json(&with_run_info(&verdict, g.seed, &tol)?, out)?;
            Ok(verdict.holds)
        }
        Command::Factorize {
            e,
            f,
            allow_nonabelian,
        } => {
            let e: MultiForm = read_fixture(e)?;
            let f: MultiForm = read_fixture(f)?;
            let fopts = FactorizeOptions {
                allow_nonabelian: *allow_nonabelian,
                ..FactorizeOptions::with_seed(g.seed)
            };
            let result = factorize_pair(&e, &f, &tol, &fopts)?;
            let ok = matches!(result, Factorization::Factorized(_));
            if g.verbose {
                eprintln!("factorized: {ok}");
            }
            write_json(&with_run_info(&result, g.seed, &tol)?, out)?;
            Ok(ok)
        }
        Command::PreserveCheck { e, f, trials } => {
            let e: MultiForm = read_fixture(e)?;
            let f: MultiForm = read_fixture(f)?;
            let report = preservation_check(&e, &f, *trials, g.seed, &tol)?;
            if g.verbose {
                eprintln!("preservation: passed = {}", report.passed);
            }
            write_json(&report, out)?;
            Ok(report.passed)
        }
        Command::RunSuite {
            id,
            shape,
            k,
            n,
            trials,
        } => {
            let cfg = SuiteConfig {
                shape: parse_shape(shape)?,
                k: *k,
                n: *n,
                trials: *trials,
                seed: g.seed,
                tolerances: tol,
                search: opts,
                plant_violation: false,
            };
            suite(id, &cfg, g.verbose, out)
        }
        Command::Reproduce { example } => {
            let id = match example.as_str() {
                "2.1" | "2-1" | "reversed-action" => "counterexample-reversed-action",
                other => {
                    return Err(ConfigError(format!(
                        "unknown example `{other}`; known: 2.1"
                    )))
                }
            };
            let cfg = SuiteConfig {
                k: 1,
                trials: 1,
                seed: g.seed,
                tolerances: tol,
                search: opts,
                ..SuiteConfig::default()
            };
            suite(id, &cfg, g.verbose, out)
        }
        Command::Replay { case } => {
            let value: serde_json::Value = read_fixture(case)?;
            let inner = value.get("case").cloned().unwrap_or(value);
            let case: ReplayCase = serde_path_to_error::deserialize(inner).map_err(|e| {
                ConfigError(format!("replay case: at `{}`: {}", e.path(), e.inner()))
            })?;
            let reproduced = replay(&case, &tol, &opts)?;
            write_json(&serde_json::json!({ "reproduced": reproduced }), out)?;
            Ok(reproduced)
        }
        Command::Sample {
            kind,
            shape,
            k,
            x_out,
            y_out,
        } => {
            let shape = parse_shape(shape)?;
            if *k == 0 {
                return Err(ConfigError("k must be at least 1".into()));
            }
            let mut rng = trial_rng(g.seed, 0xC1, 0);
            let (x, y) = match kind {
                PairKind::Orthogonal => orthogonal_pair(&shape, *k, &mut rng),
                PairKind::Generic => generic_pair(&shape, *k, &mut rng),
                PairKind::Bj => bj_pair(&shape, *k, &mut rng),
            };
            write_json(&x, Some(x_out))?;
            write_json(&y, Some(y_out))?;
            Ok(true)
        }
        Command::ListSuites => {
            let list: Vec<_> = SUITES
                .iter()
                .map(|s| {
                    let covers: Vec<_> = COVERAGE.iter().filter(|(_, id)| *id == s.id).map(|(what, _)| *what).collect();
                    serde_json::json!({ "id": s.id, "alias": s.alias, "statement": s.statement, "covers": covers })
                })
                .collect();
            write_json(&list, out)?;
            Ok(true)
        }
    }
}

fn relation_of(r: RelationArg) -> Relation {
    match r {
        RelationArg::Ip => Relation::InnerProduct,
        RelationArg::Bj | RelationArg::Bjw => Relation::BirkhoffJames,
        RelationArg::Sbj => Relation::StrongBirkhoffJames,
        RelationArg::Reversed => Relation::ReversedAction,
        RelationArg::Mod => Relation::Modulus,
        RelationArg::Mod2 => Relation::SquaredModulus,
    }
}

fn suite(id: &str, cfg: &SuiteConfig, verbose: bool, out: Option<&Path>) -> CliResult<bool> {
    if verbose {
        eprintln!(
            "running {id} on shape {} with k = {}, {} trials, seed {}",
            cfg.shape, cfg.k, cfg.trials, cfg.seed
        );
    }
    let report = run_suite(id, cfg)?;
    if verbose {
        eprintln!(
            "{}: {} after {} trials in {:.2}s",
            report.suite_id,
            if report.passed { "passed" } else { "FAILED" },
            report.trials,
            report.elapsed_seconds
        );
    }
    write_json(&report, out)?;
    Ok(report.passed)
}
