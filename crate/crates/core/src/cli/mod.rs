//! Command-line front end.

pub mod commands;
pub mod config;
pub mod output;

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::acceptance::{self, Profile};
use crate::error::{Error, Result};
use crate::stats::Runner;

pub use config::{parse_config, parse_real_list, RunConfig};
pub use output::{parse_results_json, render, Cell, Format, ResultsDocument, Table};

#[derive(Parser, Debug)]
#[command(name = "bmhull", version, about = "Convex hulls of Brownian motion: closed forms and Monte Carlo")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Expected volume, surface and intrinsic volumes; deficit bounds at --alpha.
    Formulas(Common),
    /// Stay-positive probability and its Bessel oracle on a grid of t.
    Psi(Common),
    /// Hull volume and surface by Monte Carlo.
    Simulate(Common),
    /// Coupled sweep over --alphas with the deficit bounds.
    SweepAlpha(Common),
    /// One-dimensional stay-positive experiments.
    Walk1d(Common),
    /// Conditioned facet probability and volume-height product.
    FacetProb(Common),
    /// Mean measure of the Gaussian facet simplex.
    FacetVolume(Common),
    /// Facets of a shape class at several scales.
    FacetCensus(Common),
    /// Intrinsic volumes through random projections.
    Intrinsic(Common),
    /// Hausdorff distance of coupled hulls to the finest one.
    Hausdorff(Common),
    /// Expected hull volume at finite intensity by importance sampling.
    Volcalc2(Common),
    /// Runs the acceptance suite.
    Verify(VerifyArgs),
}

#[derive(Args, Debug, Default)]
struct Common {
    #[arg(short = 'n', long = "dim")]
    dim: Option<String>,
    #[arg(long)]
    alpha: Option<String>,
    /// Comma-separated list.
    #[arg(long, allow_hyphen_values = true)]
    alphas: Option<String>,
    #[arg(long)]
    j: Option<String>,
    #[arg(long)]
    replicates: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    jobs: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json.
    #[arg(long)]
    format: Option<String>,
    /// key=value file; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    scales: Option<String>,
    #[arg(long)]
    epsilon: Option<String>,
    /// Edge length of the equilateral target.
    #[arg(long)]
    edge: Option<String>,
    #[arg(long)]
    variant: Option<String>,
    /// Walk horizon, or the comma-separated gap vector for facet-prob.
    #[arg(long)]
    r: Option<String>,
    /// Increment gaps r_2..r_n for facet-volume.
    #[arg(long)]
    gaps: Option<String>,
    #[arg(long)]
    rmin: Option<String>,
    #[arg(long)]
    rmax: Option<String>,
    #[arg(long = "mc-points")]
    mc_points: Option<String>,
    /// Include the origin among the hull vertices.
    #[arg(long)]
    origin: bool,
    /// Comma-separated evaluation points for psi.
    #[arg(long)]
    t: Option<String>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Reduced replicates and widened tolerances.
    #[arg(long, conflicts_with = "full")]
    quick: bool,
    /// Stated replicates and tolerances (the default).
    #[arg(long)]
    full: bool,
    #[arg(long)]
    jobs: Option<usize>,
    /// Comma-separated criterion numbers.
    #[arg(long)]
    only: Option<String>,
    /// Directory for the files compared by the determinism criterion.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Keys each subcommand reads; anything else is rejected up front.
fn accepted_keys(sub: &str) -> Vec<&'static str> {
    const IO: [&str; 3] = ["jobs", "out", "format"];
    let own: &'static [&'static str] = match sub {
        "formulas" => &["dim", "alpha"],
        "psi" => &["t"],
        "simulate" => &["dim", "alpha", "replicates", "seed", "origin"],
        "sweep-alpha" => &["dim", "alphas", "replicates", "seed"],
        "walk1d" => &["variant", "r", "alpha", "replicates", "seed"],
        "facet-prob" => &["dim", "r", "alpha", "replicates", "seed"],
        "facet-volume" => &["dim", "gaps", "replicates", "seed"],
        "facet-census" => &[
            "dim", "alpha", "alphas", "scales", "epsilon", "edge", "replicates", "seed", "mc-points",
            "rmin", "rmax",
        ],
        "intrinsic" => &["dim", "j", "alpha", "alphas", "replicates", "seed"],
        "hausdorff" => &["dim", "alphas", "replicates", "seed"],
        "volcalc2" => &["dim", "alpha", "alphas", "mc-points", "seed"],
        _ => &[],
    };
    own.iter().chain(IO.iter()).copied().collect()
}

impl Common {
    fn flags(&self) -> Vec<(&'static str, Option<String>)> {
        vec![
            ("dim", self.dim.clone()),
            ("alpha", self.alpha.clone()),
            ("alphas", self.alphas.clone()),
            ("j", self.j.clone()),
            ("replicates", self.replicates.clone()),
            ("seed", self.seed.clone()),
            ("jobs", self.jobs.clone()),
            ("out", self.out.as_ref().map(|p| p.display().to_string())),
            ("format", self.format.clone()),
            ("scales", self.scales.clone()),
            ("epsilon", self.epsilon.clone()),
            ("edge", self.edge.clone()),
            ("variant", self.variant.clone()),
            ("r", self.r.clone()),
            ("gaps", self.gaps.clone()),
            ("rmin", self.rmin.clone()),
            ("rmax", self.rmax.clone()),
            ("mc-points", self.mc_points.clone()),
            ("origin", self.origin.then(|| "true".to_string())),
            ("t", self.t.clone()),
        ]
    }
}

/// Builds the merged configuration for a table subcommand.
pub fn build_config(
    subcommand: &str,
    file_text: Option<&str>,
    flags: Vec<(&'static str, Option<String>)>,
) -> Result<RunConfig> {
    let file = file_text.map(parse_config).transpose()?.unwrap_or_default();
    let accepted = accepted_keys(subcommand);
    let given = file.keys().cloned().chain(flags.iter().filter(|f| f.1.is_some()).map(|f| f.0.to_string()));
    for key in given {
        if !accepted.contains(&key.as_str()) {
            return Err(Error::arg(format!("`{key}` does not apply to `{subcommand}`")));
        }
    }
    Ok(RunConfig::merge(subcommand, file, flags))
}

/// Runs a table subcommand and renders it in the configured format.
pub fn execute(cfg: &mut RunConfig) -> Result<String> {
    let format: Format = cfg.text("format", Some("csv"))?.parse()?;
    let runner = Runner::new(cfg.jobs()?)?;
    let table = commands::run(cfg, &runner)?;
    let seed = cfg.uint("seed", Some(commands::DEFAULT_SEED))?;
    render(&table, format, &cfg.canonical(), seed, &cfg.digest())
}

fn table_config(subcommand: &str, common: &Common) -> Result<RunConfig> {
    let file_text = common.config.as_deref().map(fs::read_to_string).transpose()?;
    build_config(subcommand, file_text.as_deref(), common.flags())
}

fn run_table(subcommand: &str, common: &Common) -> Result<()> {
    let mut cfg = table_config(subcommand, common)?;
    let content = execute(&mut cfg)?;
    output::emit(&content, cfg.out().map(Path::new))
}

impl Command {
    fn table(&self) -> Option<(&'static str, &Common)> {
        Some(match self {
            Command::Formulas(c) => ("formulas", c),
            Command::Psi(c) => ("psi", c),
            Command::Simulate(c) => ("simulate", c),
            Command::SweepAlpha(c) => ("sweep-alpha", c),
            Command::Walk1d(c) => ("walk1d", c),
            Command::FacetProb(c) => ("facet-prob", c),
            Command::FacetVolume(c) => ("facet-volume", c),
            Command::FacetCensus(c) => ("facet-census", c),
            Command::Intrinsic(c) => ("intrinsic", c),
            Command::Hausdorff(c) => ("hausdorff", c),
            Command::Volcalc2(c) => ("volcalc2", c),
            Command::Verify(_) => return None,
        })
    }
}

/// Parses `argv` into the merged configuration of a table subcommand without
/// running it; `None` for `verify`.
pub fn parse_argv<I, T>(argv: I) -> Result<Option<RunConfig>>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(|e| Error::arg(e.kind().to_string()))?;
    cli.command.table().map(|(sub, c)| table_config(sub, c)).transpose()
}

fn parse_only(s: &str) -> Result<Vec<u32>> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<u32>()
                .ok()
                .filter(|id| (1..=acceptance::CRITERIA).contains(id))
                .ok_or_else(|| Error::arg(format!("`{x}` is not a criterion number")))
        })
        .collect()
}

fn run_verify(args: &VerifyArgs) -> Result<bool> {
    let profile = if args.quick { Profile::Quick } else { Profile::Full };
    let only = args.only.as_deref().map(parse_only).transpose()?;
    let workdir = match &args.out {
        Some(p) => p.clone(),
        None => std::env::temp_dir().join(format!("bmhull-verify-{}", std::process::id())),
    };
    fs::create_dir_all(&workdir)?;
    let outcomes = acceptance::run_suite(profile, args.jobs.unwrap_or(1), only.as_deref(), &workdir, |o| {
        println!("{o}");
    })?;
    if args.out.is_none() {
        let _ = fs::remove_dir_all(&workdir);
    }
    let passed = outcomes.iter().filter(|o| o.passed).count();
    println!("{passed}/{} criteria passed", outcomes.len());
    Ok(passed == outcomes.len())
}

/// Parses `argv` (program name first) and runs it; returns the exit code.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command.table() {
        Some((sub, common)) => run_table(sub, common),
        None => match &cli.command {
            Command::Verify(v) => match run_verify(v) {
                Ok(true) => return 0,
                Ok(false) => return 3,
                Err(e) => Err(e),
            },
            _ => unreachable!("table subcommands handled above"),
        },
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(dispatch(["bmhull"]), 1);
        assert_eq!(dispatch(["bmhull", "nosuch"]), 1);
        assert_eq!(dispatch(["bmhull", "walk1d", "--alpha", "10"]), 1);
        assert_eq!(dispatch(["bmhull", "psi", "--alpha", "10"]), 1);
        assert_eq!(dispatch(["bmhull", "verify", "--only", "99"]), 1);
    }

    #[test]
    fn help_exits_zero() {
        assert_eq!(dispatch(["bmhull", "--help"]), 0);
    }

    #[test]
    fn config_file_keys_must_apply() {
        assert!(build_config("psi", Some("alpha=3\n"), vec![]).is_err());
        assert!(build_config("psi", Some("t=1,2\n"), vec![]).is_ok());
    }
}
