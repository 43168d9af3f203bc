//! The `rdag` command line.

use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use rdag::io::read_means;
use rdag::{
    classify, classify_stability, compute_thresholds, find_unshielded_colliders, fit, is_group,
    load_graph, parse_samples, rcon_equivalent, run_comparison, simulation, threshold_bounds,
    ColouredDag, FitDocument, SampleMatrix, SimConfig, DEFAULT_TOL, DEFAULT_TRIALS,
};

#[derive(Parser, Debug)]
#[command(name = "rdag", version, about = "Gaussian models on coloured DAGs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Validate a graph and report on its structure.
    Check {
        graph: PathBuf,
        /// Decide whether the RDAG and RCON models coincide.
        #[arg(long)]
        rcon: bool,
        /// Decide whether the model is a group.
        #[arg(long)]
        group: bool,
        /// List unshielded colliders.
        #[arg(long)]
        colliders: bool,
    },
    /// Print the maximum likelihood estimate as JSON.
    Fit(SampleArgs),
    /// Print the MLE verdict and the stability class of the sample.
    Classify(SampleArgs),
    /// Print maximum likelihood thresholds as JSON.
    Thresholds {
        graph: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = DEFAULT_TRIALS)]
        trials: usize,
        /// Skip the exact search and report only the bound intervals.
        #[arg(long)]
        bounds_only: bool,
    },
    /// Compare RDAG and DAG estimates on random models; writes CSV.
    Simulate {
        #[arg(long, default_value_t = 10)]
        m: usize,
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        /// Number of edge colours.
        #[arg(long = "k", short = 'K', default_value_t = 5)]
        k: usize,
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, default_value_t = 50)]
        replicates: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 0.01)]
        omega_lo: f64,
        #[arg(long, default_value_t = 1.0)]
        omega_hi: f64,
        /// Output file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct SampleArgs {
    graph: PathBuf,
    /// CSV with one row per vertex (ascending id) and one column per sample.
    samples: PathBuf,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Subtract each row's sample mean.
    #[arg(long)]
    center: bool,
    /// Subtract a known mean: a number, or a file with one value per row.
    #[arg(long, value_name = "MEAN")]
    mean: Option<String>,
}

impl SampleArgs {
    fn load(&self) -> anyhow::Result<(ColouredDag, SampleMatrix)> {
        let g = load_graph(&self.graph)?;
        let text = std::fs::read_to_string(&self.samples)
            .with_context(|| format!("reading {}", self.samples.display()))?;
        let y = parse_samples(&text).with_context(|| self.samples.display().to_string())?;
        let y = match &self.mean {
            Some(arg) => y.minus_means(&means(arg, y.nrows())?)?,
            None if self.center => y.centred(),
            None => y,
        };
        Ok((g, y))
    }
}

fn means(arg: &str, rows: usize) -> anyhow::Result<Vec<f64>> {
    if let Ok(x) = arg.trim().parse::<f64>() {
        return Ok(vec![x; rows]);
    }
    Ok(read_means(Path::new(arg), rows)?)
}

/// Pretty JSON with object keys in sorted order.
fn sorted_json<T: Serialize>(value: &T) -> anyhow::Result<String> {
    Ok(serde_json::to_string_pretty(&serde_json::to_value(value)?)?)
}

fn resolve_seed(seed: Option<u64>, err: &mut dyn Write) -> anyhow::Result<u64> {
    let seed = seed.unwrap_or_else(rand::random);
    writeln!(err, "seed: {seed}")?;
    Ok(seed)
}

/// Run the command line with `args` (including the program name) and return
/// the process exit code: 0 on success, 1 on any input or validation error,
/// 2 when the maximum likelihood estimate does not exist.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{text}")
            } else {
                write!(out, "{text}")
            };
            return code;
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            match e.downcast_ref::<rdag::Error>() {
                Some(rdag::Error::NoMle { .. }) => 2,
                _ => 1,
            }
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> anyhow::Result<i32> {
    match command {
        Command::Check {
            graph,
            rcon,
            group,
            colliders,
        } => {
            let g = load_graph(&graph)?;
            let report = g.check_compatibility();
            writeln!(out, "vertices: {}", g.num_vertices())?;
            writeln!(out, "edges: {}", g.num_edges())?;
            writeln!(out, "compatible: {}", report.is_compatible)?;
            if !report.is_compatible {
                for v in &report.violations {
                    writeln!(out, "  {}", serde_json::to_string(v)?)?;
                }
                bail!("colouring is not compatible");
            }
            for s in g.colour_stats() {
                writeln!(
                    out,
                    "colour {}: alpha={} beta={}",
                    s.colour, s.alpha, s.beta
                )?;
            }
            if rcon {
                let d = rcon_equivalent(&g)?;
                match d.failure {
                    None => writeln!(out, "RCON-equivalent: true")?,
                    Some(f) => writeln!(out, "RCON-equivalent: false ({f})")?,
                }
            }
            if group {
                let d = is_group(&g)?;
                match d.failure {
                    None => writeln!(out, "group: true")?,
                    Some(f) => writeln!(out, "group: false ({f})")?,
                }
            }
            if colliders {
                let found = find_unshielded_colliders(&g);
                writeln!(out, "unshielded colliders: {}", found.len())?;
                for (i, p, j) in found {
                    writeln!(out, "  {i} -> {p} <- {j}")?;
                }
            }
            Ok(0)
        }
        Command::Fit(args) => {
            let (g, y) = args.load()?;
            let f = fit(&g, &y, args.tol)?;
            writeln!(out, "{}", FitDocument::from(&f).to_json())?;
            Ok(0)
        }
        Command::Classify(args) => {
            let (g, y) = args.load()?;
            let c = classify(&g, &y, args.tol)?;
            let s = classify_stability(&g, &y, args.tol)?;
            writeln!(out, "verdict: {}", c.verdict)?;
            writeln!(out, "stability: {}", s.class)?;
            if let Some(d) = s.stabiliser_dimension {
                writeln!(out, "stabiliser dimension: {d}")?;
            }
            for d in &c.colours {
                writeln!(
                    out,
                    "colour {}: in_span={} full_row_rank={} parent_rank={}/{}",
                    d.colour, d.in_span, d.full_row_rank, d.parent_rank, d.beta
                )?;
            }
            Ok(0)
        }
        Command::Thresholds {
            graph,
            seed,
            trials,
            bounds_only,
        } => {
            let g = load_graph(&graph)?;
            let seed = resolve_seed(seed, err)?;
            let report = if bounds_only {
                threshold_bounds(&g, seed, trials)?
            } else {
                compute_thresholds(&g, seed, trials)?
            };
            writeln!(out, "{}", sorted_json(&report)?)?;
            Ok(0)
        }
        Command::Simulate {
            m,
            p,
            k,
            n,
            replicates,
            seed,
            omega_lo,
            omega_hi,
            out: path,
        } => {
            let seed = resolve_seed(seed, err)?;
            let cfg = SimConfig {
                m,
                p,
                k,
                n,
                replicates,
                seed,
                omega_range: (omega_lo, omega_hi),
            };
            let records = run_comparison(&cfg)?;
            match path {
                Some(path) => {
                    let file = File::create(&path)
                        .with_context(|| format!("creating {}", path.display()))?;
                    simulation::write_csv(&records, file)?;
                }
                None => simulation::write_csv(&records, &mut *out)?,
            }
            Ok(0)
        }
    }
}
