//! Batch front end: `fqslice <command> [options]`.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use fqslice::report;
use fqslice::stats::{
    closed_form_conjecture, conjecture_probe, convergence_report, exact_distribution,
    mc_distribution, LevelMode, LevelRow,
};
use fqslice::tangency::{curve_has_simple_tangency, variety_has_simple_tangency};
use fqslice::variety::{slice_irreducibility_density, VarietySpec};
use fqslice::{Budget, Error, ErrorKind, Result};

pub const DEFAULT_SEED: u64 = 0xB3271;
pub const DEFAULT_SAMPLES: u64 = 10_000;

#[derive(Parser, Debug)]
#[command(name = "fqslice", version, about = "Intersection statistics of linear sections over finite fields")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: Global,
}

#[derive(Args, Debug)]
pub struct Global {
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Worker threads; defaults to one per core.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true)]
    pub max_field_size: Option<u64>,
    #[arg(long, global = true)]
    pub max_subspaces: Option<u64>,
    #[arg(long, global = true)]
    pub max_points: Option<u64>,
    #[arg(long, global = true)]
    pub max_work: Option<u64>,
    /// Largest subspace count `converge` treats exactly without being told.
    #[arg(long, global = true)]
    pub exact_threshold: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Auto,
    Generic,
    Pairs,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Closed-form limit probabilities.
    Formula {
        #[arg(long)]
        d: u32,
        #[arg(long, default_value_t = 1)]
        e: u32,
    },
    /// Exact distribution at one level.
    Exact {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long = "N")]
        level: u32,
        #[arg(long, value_enum, default_value_t = StrategyArg::Auto)]
        strategy: StrategyArg,
    },
    /// Monte Carlo estimate at one level.
    Mc {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long = "N")]
        level: u32,
        #[arg(long)]
        samples: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Deviation from the limit over several levels.
    Converge {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long = "N-list", value_delimiter = ',', required = true)]
        levels: Vec<u32>,
        /// Levels above this use Monte Carlo.
        #[arg(long)]
        mc_above: Option<u32>,
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Plot-data file; defaults to `<out>.plot` when --out is given.
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// Search for simple tangency.
    Tangency {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = 5)]
        trials: u32,
        #[arg(long, default_value_t = 2)]
        levels: u32,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Density of planes with absolutely irreducible sections.
    Mu {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long = "N")]
        level: u32,
    },
    /// Intersections with random irreducible conics.
    ProbeConjecture {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long = "N")]
        level: u32,
        #[arg(long)]
        samples: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        e: u32,
    },
}

impl Global {
    pub fn budget(&self) -> Result<Budget> {
        let mut b = Budget::default();
        let caps = [
            (&mut b.max_field_size, self.max_field_size),
            (&mut b.max_subspaces, self.max_subspaces),
            (&mut b.max_points, self.max_points),
            (&mut b.max_work, self.max_work),
            (&mut b.exact_threshold, self.exact_threshold),
        ];
        for (slot, value) in caps {
            if let Some(v) = value {
                if v == 0 {
                    return Err(Error::Invalid("budget caps must be positive".into()));
                }
                *slot = v;
            }
        }
        Ok(b)
    }
}

pub fn exit_code(err: &Error) -> i32 {
    match err.kind() {
        ErrorKind::Input => 2,
        ErrorKind::Budget => 3,
        ErrorKind::Internal => 4,
    }
}

/// Parses `argv` (program name first), runs the command and returns the
/// process exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.global.threads {
        Some(0) => Err(Error::Invalid("--threads must be positive".into())),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::Internal(format!("thread pool: {e}")))
            .and_then(|pool| pool.install(|| execute(&cli))),
        None => execute(&cli),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("fqslice: {e}");
            exit_code(&e)
        }
    }
}

fn emit(global: &Global, text: String) -> Result<()> {
    match &global.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn render(global: &Global, json: serde_json::Value, csv: impl FnOnce() -> Result<String>) -> Result<()> {
    let text = match global.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&json)
                .map_err(|e| Error::Internal(format!("json rendering failed: {e}")))?;
            s.push('\n');
            s
        }
        Format::Csv => csv()?,
    };
    emit(global, text)
}

fn plot_path(out: Option<&Path>, plot: Option<&Path>) -> Option<PathBuf> {
    plot.map(Path::to_path_buf).or_else(|| {
        out.map(|o| {
            let mut s = o.as_os_str().to_owned();
            s.push(".plot");
            PathBuf::from(s)
        })
    })
}

fn warn_degree(spec: &VarietySpec, rows: &[LevelRow]) {
    for row in rows {
        if let Some(k) = row.histogram.max_key() {
            if k > spec.d as usize {
                eprintln!(
                    "fqslice: warning: N={}: a subspace meets X in {k} points, more than the declared degree {}",
                    row.level, spec.d
                );
            }
        }
    }
}

pub fn execute(cli: &Cli) -> Result<()> {
    let g = &cli.global;
    let budget = g.budget()?;
    match &cli.command {
        Command::Formula { d, e } => {
            if *d < 1 || *e < 1 {
                return Err(Error::Invalid("d and e must be at least 1".into()));
            }
            let values = (0..=d * e)
                .map(|k| closed_form_conjecture(*d, *e, k))
                .collect::<Result<Vec<_>>>()?;
            render(g, report::formula_json(*d, *e, &values), || {
                report::formula_csv(*d, *e, &values)
            })
        }
        Command::Exact { spec, level, strategy } => {
            let spec = VarietySpec::from_file(spec)?;
            let strategy = match strategy {
                StrategyArg::Auto => fqslice::stats::Strategy::Auto,
                StrategyArg::Generic => fqslice::stats::Strategy::Generic,
                StrategyArg::Pairs => fqslice::stats::Strategy::PairCount,
            };
            let hist = exact_distribution(&spec, *level, strategy, &budget)?;
            let limit = fqslice::stats::LimitVector::new(spec.d);
            let row = LevelRow {
                level: *level,
                field_size: spec.field_size(*level),
                mode: LevelMode::Exact,
                deviation: hist.deviation(&limit),
                histogram: hist,
                std_errors: None,
            };
            let r = fqslice::stats::ConvergenceReport {
                spec: spec.clone(),
                rows: vec![row],
                limit,
                seed: DEFAULT_SEED,
            };
            warn_degree(&spec, &r.rows);
            render(g, report::convergence_json(&r), || report::convergence_csv(&r))
        }
        Command::Mc { spec, level, samples, seed } => {
            let spec = VarietySpec::from_file(spec)?;
            let mc = mc_distribution(&spec, *level, *samples, *seed, &budget)?;
            let limit = fqslice::stats::LimitVector::new(spec.d);
            let row = LevelRow {
                level: *level,
                field_size: spec.field_size(*level),
                mode: LevelMode::MonteCarlo { samples: *samples },
                deviation: mc.histogram.deviation(&limit),
                histogram: mc.histogram,
                std_errors: Some(mc.std_errors),
            };
            let r = fqslice::stats::ConvergenceReport {
                spec,
                rows: vec![row],
                limit,
                seed: *seed,
            };
            render(g, report::convergence_json(&r), || report::convergence_csv(&r))
        }
        Command::Converge { spec, levels, mc_above, samples, seed, plot } => {
            let spec = VarietySpec::from_file(spec)?;
            let samples = samples.unwrap_or(DEFAULT_SAMPLES);
            let plan: Vec<(u32, LevelMode)> = levels
                .iter()
                .map(|&n| {
                    let mode = match mc_above {
                        Some(cut) if n > *cut => LevelMode::MonteCarlo { samples },
                        Some(_) => LevelMode::Exact,
                        None => LevelMode::auto(&spec, n, samples, &budget),
                    };
                    (n, mode)
                })
                .collect();
            let r = convergence_report(&spec, &plan, *seed, &budget)?;
            warn_degree(&spec, &r.rows);
            if let Some(path) = plot_path(g.out.as_deref(), plot.as_deref()) {
                std::fs::write(path, report::plot_data(&r))?;
            }
            render(g, report::convergence_json(&r), || report::convergence_csv(&r))
        }
        Command::Tangency { spec, trials, levels, seed } => {
            let spec = VarietySpec::from_file(spec)?;
            let r = if spec.n == 2 && spec.m == 1 && spec.forms.len() == 1 {
                let curve = spec.base_polys()?.remove(0);
                curve_has_simple_tangency(&curve, spec.d, *levels, &budget)?
            } else {
                variety_has_simple_tangency(&spec, *trials, *levels, *seed, &budget)?
            };
            render(g, report::tangency_json(&spec, &r), || report::tangency_csv(&r))
        }
        Command::Mu { spec, level } => {
            let spec = VarietySpec::from_file(spec)?;
            let r = slice_irreducibility_density(&spec, *level, &budget)?;
            render(g, report::density_json(&spec, &r), || report::density_csv(&r))
        }
        Command::ProbeConjecture { spec, level, samples, seed, e } => {
            let spec = VarietySpec::from_file(spec)?;
            let r = conjecture_probe(&spec, *e, *level, *samples, *seed, &budget)?;
            render(g, report::probe_json(&spec, &r), || report::probe_csv(&r))
        }
    }
}
