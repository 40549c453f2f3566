//! `bht` command-line front end.
//!
//! Exit codes: `0` success, `1` a `validate` check failed, `2` usage error,
//! `3` domain error (bad model, bad schedule, ...), `4` nothing found or an
//! oracle is infeasible. Data goes to `--out` or standard output; messages
//! go to standard error. Whenever `--out` is given a
//! `<out>.manifest.json` is written next to it; otherwise the manifest is
//! printed to standard error.

use std::ffi::OsString;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::bounds::{bounds_at, Measures};
use crate::css::{css_sweep, CssQuery, DEFAULT_N_MAX};
use crate::distribution::{nakagawa_exponent, synthesize_pair, HypothesisPair, ModelFile};
use crate::error::Error;
use crate::exact::{beta_from_levels, enumerate_levels};
use crate::montecarlo::{concentration_grid, estimate_beta, McConfig, REPRODUCTION_SAMPLES};
use crate::report::{bounds_csv, css_csv, gap_table_csv, parse_range, to_json_line, ExactJson, McJson};
use crate::schedule::{epsilon_at, parse_schedule_list, EpsilonSchedule};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;
pub const EXIT_NOT_FOUND: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "bht", version, about = "Finite-n bounds on the optimal Type II error")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print D, V, C_X and reference exponents of a model.
    Info {
        #[arg(long)]
        model: PathBuf,
        /// Exponential Type I rate for the Nakagawa exponent (default D/2).
        #[arg(long)]
        rate: Option<f64>,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        #[arg(long, default_value_t = 100)]
        n: u64,
    },
    /// Write a seeded synthetic model with a prescribed divergence.
    Synth {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        d: f64,
        #[arg(long, default_value_t = 1e-3)]
        min_mass: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Feasibility interval sweep over n.
    Bounds {
        #[command(flatten)]
        measures: MeasureArgs,
        #[arg(long)]
        schedule: String,
        /// `start:end:step`, `a,b,c`, or one value.
        #[arg(long)]
        n: String,
        #[command(flatten)]
        out: OutArgs,
    },
    /// UB − LB for several schedules.
    GapTable {
        #[command(flatten)]
        measures: MeasureArgs,
        #[arg(long, default_value = "recip,logrecip,pow:0.1")]
        schedules: String,
        #[arg(long, default_value = "50:750:100")]
        n: String,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Predicted critical sample sizes for δ = 10^-k.
    Css {
        #[command(flatten)]
        measures: MeasureArgs,
        #[arg(long, default_value = "const:0.1,recip,pow:0.1,logrecip")]
        schedule: String,
        #[arg(long, default_value_t = 1)]
        kmin: i32,
        #[arg(long, default_value_t = 8)]
        kmax: i32,
        #[arg(long, default_value_t = DEFAULT_N_MAX)]
        nmax: u64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Exact optimal Type II error by type-class enumeration.
    Exact {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        n: u64,
        #[command(flatten)]
        budget: BudgetArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Monte Carlo estimate of the optimal Type II error.
    Mc {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        n: u64,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(long, default_value_t = REPRODUCTION_SAMPLES)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        chunks: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Check the bracket against the exact oracle and the concentration step by simulation.
    Validate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 200)]
        nmax: u64,
        #[arg(long, default_value = "const:0.1,recip,pow:0.1,logrecip")]
        schedule: String,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Args)]
struct MeasureArgs {
    /// Model JSON file; alternative to --d/--cx.
    #[arg(long, conflicts_with_all = ["d", "cx"])]
    model: Option<PathBuf>,
    #[arg(long, requires = "cx")]
    d: Option<f64>,
    #[arg(long, requires = "d")]
    cx: Option<f64>,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct BudgetArgs {
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    schedule: Option<String>,
}

#[derive(Debug, Args)]
struct OutArgs {
    /// Output file (standard output when absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug)]
enum Failure {
    Domain(String),
    NotFound(String),
    CheckFailed(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_not_found() {
            Failure::NotFound(e.to_string())
        } else {
            Failure::Domain(e.to_string())
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

/// Provenance written next to every output file.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command_line: Vec<String>,
    pub seed: Option<u64>,
    pub tool_version: String,
    pub model_hash: String,
    pub timestamp: u64,
}

struct Context {
    argv: Vec<String>,
    seed: Option<u64>,
    model_hash: String,
}

impl Context {
    fn manifest(&self) -> RunManifest {
        RunManifest {
            command_line: self.argv.clone(),
            seed: self.seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            model_hash: self.model_hash.clone(),
            timestamp: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        }
    }

    /// Writes `data` to `--out` plus its manifest file, or `data` to standard
    /// output and the manifest to standard error.
    fn emit(&self, out: &OutArgs, data: &str) -> CliResult<()> {
        match &out.out {
            Some(path) => {
                fs::write(path, data).map_err(|e| Failure::Domain(format!("{}: {e}", path.display())))?;
                let mpath = manifest_path(path);
                let text = serde_json::to_string_pretty(&self.manifest()).expect("manifest serializes");
                fs::write(&mpath, text + "\n").map_err(|e| Failure::Domain(format!("{}: {e}", mpath.display())))?;
            }
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout
                    .write_all(data.as_bytes())
                    .map_err(|e| Failure::Domain(format!("stdout: {e}")))?;
                eprintln!(
                    "manifest: {}",
                    serde_json::to_string(&self.manifest()).expect("manifest serializes")
                );
            }
        }
        Ok(())
    }
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn load_model(path: &Path) -> CliResult<(HypothesisPair, String)> {
    let text = fs::read(path).map_err(|e| Failure::Domain(format!("{}: {e}", path.display())))?;
    let s = String::from_utf8(text.clone()).map_err(|e| Failure::Domain(format!("{}: {e}", path.display())))?;
    Ok((ModelFile::parse(&s)?, sha256_hex(&text)))
}

fn resolve_measures(args: &MeasureArgs) -> CliResult<(Measures, String)> {
    match (&args.model, args.d, args.cx) {
        (Some(path), _, _) => {
            let (pair, hash) = load_model(path)?;
            Ok((Measures::from_pair(&pair), hash))
        }
        (None, Some(d), Some(cx)) => {
            let m = Measures::scalar(d, cx);
            if let Some(w) = m.consistency_warning() {
                eprintln!("warning: {w}");
            }
            Ok((m, sha256_hex(format!("d={d},cx={cx}").as_bytes())))
        }
        _ => Err(Failure::Domain(
            "either --model or both --d and --cx are required".into(),
        )),
    }
}

fn resolve_epsilon(budget: &BudgetArgs, n: u64) -> CliResult<f64> {
    match (&budget.epsilon, &budget.schedule) {
        (Some(e), _) => {
            if (0.0..=1.0).contains(e) {
                Ok(*e)
            } else {
                Err(Failure::Domain(format!("epsilon {e} is outside [0, 1]")))
            }
        }
        (None, Some(s)) => Ok(epsilon_at(&s.parse::<EpsilonSchedule>()?, n)?),
        (None, None) => Err(Failure::Domain("--epsilon or --schedule is required".into())),
    }
}

/// Parses `argv` (including the program name), runs, and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    configure_threads();
    let argv: Vec<String> = argv.iter().map(|s| s.to_string_lossy().into_owned()).collect();
    match execute(cli.command, argv) {
        Ok(()) => EXIT_OK,
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            EXIT_DOMAIN
        }
        Err(Failure::NotFound(msg)) => {
            eprintln!("error: {msg}");
            EXIT_NOT_FOUND
        }
        Err(Failure::CheckFailed(msg)) => {
            eprintln!("validation failed: {msg}");
            EXIT_CHECK_FAILED
        }
    }
}

/// Honors `BHT_THREADS`; results never depend on the thread count.
fn configure_threads() {
    if let Some(threads) = std::env::var("BHT_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // A second call in the same process (tests) keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads.max(1))
            .build_global();
    }
}

fn execute(command: Command, argv: Vec<String>) -> CliResult<()> {
    let mut ctx = Context {
        argv,
        seed: None,
        model_hash: String::new(),
    };
    match command {
        Command::Info {
            model,
            rate,
            epsilon,
            n,
        } => {
            let (pair, _) = load_model(&model)?;
            let d = pair.divergence();
            let rate = rate.unwrap_or(d / 2.0);
            println!("alphabet_size = {}", pair.alphabet_size());
            println!("d = {d}");
            println!("v = {}", pair.dispersion());
            println!("c_x = {}", pair.c_x());
            println!("reverse_d = {}", pair.reverse_divergence());
            println!("stein_exponent = {d}");
            match nakagawa_exponent(&pair, rate) {
                Ok(e) => println!("nakagawa_exponent(r={rate}) = {e}"),
                Err(e) => println!("nakagawa_exponent(r={rate}) = unavailable ({e})"),
            }
            match crate::bounds::strassen_exponent(&pair, epsilon, n) {
                Ok(e) => println!("strassen_exponent(epsilon={epsilon}, n={n}) = {e}"),
                Err(e) => println!("strassen_exponent(epsilon={epsilon}, n={n}) = unavailable ({e})"),
            }
            Ok(())
        }
        Command::Synth {
            m,
            d,
            min_mass,
            seed,
            out,
        } => {
            let pair = synthesize_pair(m, d, min_mass, seed)?;
            let json = ModelFile::from_pair(&pair).to_json() + "\n";
            ctx.seed = Some(seed);
            ctx.model_hash = sha256_hex(json.as_bytes());
            ctx.emit(&out, &json)
        }
        Command::Bounds {
            measures,
            schedule,
            n,
            out,
        } => {
            let (m, hash) = resolve_measures(&measures)?;
            ctx.model_hash = hash;
            let schedule: EpsilonSchedule = schedule.parse()?;
            let csv = bounds_csv(m, &schedule, &parse_range(&n)?)?;
            ctx.emit(&out, &csv)
        }
        Command::GapTable {
            measures,
            schedules,
            n,
            out,
        } => {
            let (m, hash) = resolve_measures(&measures)?;
            ctx.model_hash = hash;
            let schedules = parse_schedule_list(&schedules)?;
            let csv = gap_table_csv(m, &schedules, &parse_range(&n)?)?;
            ctx.emit(&out, &csv)
        }
        Command::Css {
            measures,
            schedule,
            kmin,
            kmax,
            nmax,
            out,
        } => {
            let (m, hash) = resolve_measures(&measures)?;
            ctx.model_hash = hash;
            if kmin > kmax {
                return Err(Failure::Domain(format!("kmin {kmin} exceeds kmax {kmax}")));
            }
            let mut rows = Vec::new();
            for s in parse_schedule_list(&schedule)? {
                let base = CssQuery::new(m, s.clone(), 1.0).with_n_max(nmax);
                for (delta, r) in css_sweep(&base, kmin..=kmax) {
                    rows.push((s.clone(), delta, r));
                }
            }
            let missing = rows.iter().filter(|(_, _, r)| r.is_err()).count();
            ctx.emit(&out, &css_csv(&rows))?;
            if missing > 0 {
                return Err(Failure::NotFound(format!(
                    "{missing} sweep entries found no n <= {nmax}"
                )));
            }
            Ok(())
        }
        Command::Exact { model, n, budget, out } => {
            let (pair, hash) = load_model(&model)?;
            ctx.model_hash = hash;
            let eps = resolve_epsilon(&budget, n)?;
            let levels = enumerate_levels(&pair, n)?;
            let r = beta_from_levels(&levels, eps)?;
            ctx.emit(&out, &to_json_line(&ExactJson::new(n, eps, &r)))
        }
        Command::Mc {
            model,
            n,
            budget,
            samples,
            seed,
            chunks,
            out,
        } => {
            let (pair, hash) = load_model(&model)?;
            ctx.model_hash = hash;
            ctx.seed = Some(seed);
            let eps = resolve_epsilon(&budget, n)?;
            let config = McConfig::new(samples, seed).with_chunks(chunks);
            let r = estimate_beta(&pair, n, eps, &config)?;
            if !r.resolved {
                eprintln!("warning: no Q-sample was accepted; the estimate is unresolved at {samples} samples");
            }
            ctx.emit(&out, &to_json_line(&McJson::new(&r, &config)))
        }
        Command::Validate {
            model,
            nmax,
            schedule,
            samples,
            seed,
        } => {
            let (pair, _) = load_model(&model)?;
            validate(&pair, nmax, &parse_schedule_list(&schedule)?, samples, seed)
        }
    }
}

fn validate(pair: &HypothesisPair, nmax: u64, schedules: &[EpsilonSchedule], samples: u64, seed: u64) -> CliResult<()> {
    let mut violations = 0usize;
    let mut checked = 0usize;
    for n in 1..=nmax {
        let levels = match enumerate_levels(pair, n) {
            Ok(l) => l,
            Err(e) => {
                eprintln!("sandwich: stopping at n = {n}: {e}");
                break;
            }
        };
        for s in schedules {
            let Ok(r) = bounds_at(pair, s, n) else { continue };
            let beta = beta_from_levels(&levels, r.epsilon_n)?.beta;
            checked += 1;
            if beta.ln() > r.log_ub.ln() + 1e-9 || beta.ln() < r.log_lb.ln() - 1e-9 {
                violations += 1;
                eprintln!("sandwich violation: {s} n={n}");
            }
        }
    }
    println!("sandwich: {checked} cells, {violations} violations");

    let config = McConfig::new(samples, seed);
    let mut conc_fail = 0usize;
    if pair.c_x() > 0.0 {
        for n in [10u64, 50, 200] {
            let deltas: Vec<f64> = (1..=6)
                .map(|k| pair.c_x() * k as f64 / (n as f64).sqrt() * 0.5)
                .collect();
            for c in concentration_grid(pair, n, &deltas, &config)? {
                println!(
                    "concentration: n={n} delta={:.6} empirical={:.6e} bound={:.6e} pass={}",
                    c.delta, c.empirical.estimate, c.bound, c.pass
                );
                if !c.pass {
                    conc_fail += 1;
                }
            }
        }
    } else {
        println!("concentration: vacuous (C_X = 0)");
    }
    if violations + conc_fail > 0 {
        return Err(Failure::CheckFailed(format!(
            "{violations} sandwich violations, {conc_fail} concentration failures"
        )));
    }
    Ok(())
}
