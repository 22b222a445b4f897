mod config;
mod output;
mod suites;

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use metaplex::converse::NiceFamilyDataset;
use metaplex::eisenstein::{fourier_coefficients, EisensteinSeries};
use metaplex::modgroup::cusps;
use metaplex::C64;
use serde_json::json;

use config::{parse_complex, RunConfig};
use output::{write_atomic, Output};

/// Half-integral weight Eisenstein series on Γ₀(4N): evaluation, coefficient
/// extraction, check suites and converse-theorem reconstruction.
///
/// Exit status: 0 when every check passes, 1 when a check fails or a
/// computation does not converge, 2 on usage, config or schema errors.
#[derive(Debug, Parser)]
#[command(name = "metaplex", version)]
struct Cli {
    #[command(flatten)]
    opts: Overrides,
    #[command(subcommand)]
    command: Command,
}

/// Flags mirroring the config file; a flag wins over the file.
#[derive(Debug, Args)]
struct Overrides {
    /// TOML config file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    level: Option<i64>,
    /// "1/2" or "3/2".
    #[arg(long, global = true)]
    weight: Option<String>,
    /// Spectral parameter as "re,im".
    #[arg(long, global = true, value_parser = parse_complex, allow_hyphen_values = true)]
    w: Option<[f64; 2]>,
    #[arg(long, global = true)]
    c_max: Option<f64>,
    #[arg(long, global = true)]
    n_max: Option<usize>,
    /// Extraction heights, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    heights: Option<Vec<f64>>,
    /// Worker threads (default: $METAPLEX_THREADS, then all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write the result here instead of stdout.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    /// Flatten report rows to CSV.
    #[arg(long, global = true)]
    csv: bool,
    /// Seed of the randomized sweeps.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List the cusps of Γ₀(level) and which are singular.
    Cusps,
    /// Evaluate Eisenstein series.
    Eval {
        /// Point "x,y" in the upper half-plane; repeatable.
        #[arg(long, required = true, value_parser = parse_complex, allow_hyphen_values = true)]
        z: Vec<[f64; 2]>,
        /// Singular cusp index; all of them if omitted.
        #[arg(long)]
        index: Option<usize>,
    },
    /// Fourier expansion of E_index at a singular cusp.
    Fourier {
        #[arg(long, default_value_t = 1)]
        index: usize,
        #[arg(long, default_value_t = 1)]
        cusp: usize,
        /// Emit a coefficient dataset for every E_i instead.
        #[arg(long)]
        dataset: bool,
    },
    /// Closed form of the cocycle r(M,N) on random pairs.
    CheckCocycle {
        #[arg(long, default_value_t = 1000)]
        pairs: usize,
    },
    /// Theta multiplier, Eisenstein automorphy and the Laplace eigenvalue.
    CheckTheta {
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
    /// Gauss sums and the Fricke relation of twisted series.
    CheckTwist,
    /// Completed L-function: two routes, functional equation, contour shift.
    CheckLambda,
    /// Run the finite-data conditions on a dataset.
    Validate { dataset: PathBuf },
    /// Validator, generator invariance and the fit f = A E.
    Reconstruct {
        dataset: PathBuf,
        #[arg(long, default_value_t = 20)]
        points: usize,
    },
    /// Fit f = A E for a dataset.
    FitA {
        dataset: PathBuf,
        #[arg(long, default_value_t = 20)]
        points: usize,
    },
}

/// A usage, config or schema error (exit status 2).
#[derive(Debug)]
pub struct Usage(pub String);

impl fmt::Display for Usage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn resolve(o: &Overrides) -> anyhow::Result<RunConfig> {
    let mut c = match &o.config {
        Some(p) => RunConfig::load(p).map_err(|e| Usage(format!("{e:#}")))?,
        None => RunConfig::default(),
    };
    if let Some(v) = o.level {
        c.level = v;
    }
    if let Some(v) = &o.weight {
        c.weight = v.clone();
    }
    if let Some(v) = o.w {
        c.w = v;
    }
    if let Some(v) = o.c_max {
        c.c_max = v;
    }
    if let Some(v) = o.n_max {
        c.n_max = v;
    }
    if let Some(v) = &o.heights {
        c.heights = v.clone();
    }
    if let Some(v) = o.threads {
        c.threads = Some(v);
    }
    if let Some(v) = &o.output {
        c.output = Some(v.clone());
    }
    if o.csv {
        c.csv = true;
    }
    if let Some(v) = o.seed {
        c.seed = v;
    }
    if c.level <= 0 || c.level % 4 != 0 {
        return Err(Usage(format!("level {} is not a positive multiple of 4", c.level)).into());
    }
    c.weight().map_err(|e| Usage(e.to_string()))?;
    Ok(c)
}

fn load_dataset(path: &Path) -> anyhow::Result<NiceFamilyDataset> {
    let text = std::fs::read_to_string(path).map_err(|e| Usage(format!("reading {}: {e}", path.display())))?;
    NiceFamilyDataset::from_json(&text).map_err(|e| Usage(format!("{}: {e}", path.display())).into())
}

fn cx(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

fn run(cmd: &Command, cfg: &RunConfig) -> anyhow::Result<Output> {
    Ok(match cmd {
        Command::Cusps => {
            let w = cfg.weight()?;
            let list = cusps(cfg.level, w.class())?;
            Output::Json(json!({"level": cfg.level, "weight": cfg.weight, "count": list.len(), "cusps": *list}))
        }
        Command::Eval { z, index } => {
            let ctx = cfg.context()?;
            let econf = cfg.eisenstein();
            let indices: Vec<usize> = match index {
                Some(i) => vec![*i],
                None => (1..=ctx.singular_cusps()?.len()).collect(),
            };
            let mut rows = Vec::new();
            for i in indices {
                let e = EisensteinSeries::new(&ctx, i, &econf)?;
                for p in z {
                    let v = e.eval(C64::new(p[0], p[1]))?;
                    rows.push(json!({"index": i, "z": p, "value": cx(v.value), "tail_estimate": v.tail_estimate}));
                }
            }
            Output::Json(json!({"level": cfg.level, "weight": cfg.weight, "w": cfg.w, "c_max": cfg.c_max, "values": rows}))
        }
        Command::Fourier { index, cusp, dataset } => {
            let ctx = cfg.context()?;
            if *dataset {
                let (direct, zero) = suites::expansions(&ctx, cfg)?;
                let d = NiceFamilyDataset::from_expansions(&direct, &zero, ctx.w.re)?;
                Output::Json(serde_json::from_str(&d.to_json()?)?)
            } else {
                let econf = cfg.eisenstein();
                let e = EisensteinSeries::new(&ctx, *index, &econf)?;
                let f = fourier_coefficients(&e, *cusp, &econf)?;
                Output::Json(serde_json::from_str(&f.to_json()?)?)
            }
        }
        Command::CheckCocycle { pairs } => Output::Report(suites::cocycle(cfg, *pairs)?),
        Command::CheckTheta { samples } => Output::Report(suites::theta(cfg, *samples)?),
        Command::CheckTwist => Output::Report(suites::twist(cfg)?),
        Command::CheckLambda => Output::Report(suites::lambda(cfg)?),
        Command::Validate { dataset } => Output::Report(suites::validate(&load_dataset(dataset)?, cfg)?),
        Command::Reconstruct { dataset, points } => {
            Output::Report(suites::reconstruct(&load_dataset(dataset)?, cfg, *points)?)
        }
        Command::FitA { dataset, points } => Output::Report(suites::fit(&load_dataset(dataset)?, cfg, *points)?),
    })
}

/// 1 for a computation that did not converge, 2 for anything the caller got
/// wrong.
fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<Usage>() {
            return 2;
        }
        if let Some(e) = cause.downcast_ref::<metaplex::Error>() {
            use metaplex::Error::*;
            return match e {
                Quadrature(_) | IllConditioned(_) | Pole { .. } => 1,
                _ => 2,
            };
        }
    }
    2
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn execute(cli: &Cli) -> anyhow::Result<bool> {
    let cfg = resolve(&cli.opts)?;
    if let Some(n) = cfg.thread_count().map_err(|e| Usage(format!("{e:#}")))? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the worker pool")?;
    }
    let out = run(&cli.command, &cfg)?;
    let bytes = out.render(cfg.csv)?;
    match &cfg.output {
        Some(p) => write_atomic(p, &bytes)?,
        None => {
            use std::io::Write;
            std::io::stdout().write_all(&bytes)?;
        }
    }
    if let Output::Report(r) = &out {
        let failed = r.checks.iter().filter(|c| !c.pass).count();
        eprintln!("{} checks, {} failed", r.checks.len(), failed);
    }
    Ok(out.passed())
}
