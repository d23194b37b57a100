//! Subcommand bodies: validated configuration in, table out.

use crate::closed_form::special::bessel_i0_scaled;
use crate::closed_form::{
    bridge_prob, default_truncation, endpoint_positive_expectation, expected_volume_kalpha,
    facet_intensity, facet_probability, facet_volume_height, facet_volume_mean, intrinsic_volume,
    phi, psi, theorem1, theorem2_bounds, xi, SimplexPoint,
};
use crate::error::{Error, Result};
use crate::experiments::{
    estimate_hull_stats, extrapolate_inv_sqrt, facet_census_coupled, facet_event_experiment,
    fmt_real, gaussian_simplex_volume_mc, hausdorff_convergence, intrinsic_mc, sweep_alpha, walk1d,
    SweepRow, VertexSet, WalkVariant,
};
use crate::geometry::ShapeClass;
use crate::rng::RngStream;
use crate::stats::Runner;

use super::config::RunConfig;
use super::output::{Cell, Table};

pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_REPLICATES: u64 = 1000;
pub const DEFAULT_SCALES: [f64; 4] = [0.05, 0.1, 0.2, 0.4];

pub const SUBCOMMANDS: [&str; 12] = [
    "formulas",
    "psi",
    "simulate",
    "sweep-alpha",
    "walk1d",
    "facet-prob",
    "facet-volume",
    "facet-census",
    "intrinsic",
    "hausdorff",
    "volcalc2",
    "verify",
];

/// Runs the named subcommand (anything but `verify`).
pub fn run(cfg: &mut RunConfig, runner: &Runner) -> Result<Table> {
    match cfg.subcommand() {
        "formulas" => formulas(cfg),
        "psi" => psi_table(cfg),
        "simulate" => simulate(cfg, runner),
        "sweep-alpha" => sweep(cfg, runner),
        "walk1d" => walk(cfg, runner),
        "facet-prob" => facet_prob(cfg, runner),
        "facet-volume" => facet_volume(cfg, runner),
        "facet-census" => census(cfg, runner),
        "intrinsic" => intrinsic(cfg, runner),
        "hausdorff" => hausdorff(cfg, runner),
        "volcalc2" => volcalc2(cfg),
        other => Err(Error::arg(format!("unknown subcommand `{other}`"))),
    }
}

fn dim(cfg: &mut RunConfig, default: Option<u64>) -> Result<usize> {
    let n = cfg.uint("dim", default)?;
    usize::try_from(n).map_err(|_| Error::arg("dimension out of range"))
}

fn seed(cfg: &mut RunConfig) -> Result<u64> {
    cfg.uint("seed", Some(DEFAULT_SEED))
}

fn replicates(cfg: &mut RunConfig) -> Result<u64> {
    cfg.uint("replicates", Some(DEFAULT_REPLICATES))
}

/// `--alphas` if given, otherwise the single `--alpha`.
fn alpha_list(cfg: &mut RunConfig) -> Result<Vec<f64>> {
    if cfg.is_set("alphas") {
        cfg.reals("alphas", None)
    } else if cfg.is_set("alpha") {
        Ok(vec![cfg.real("alpha", None)?])
    } else {
        Err(Error::arg("missing required `--alpha` or `--alphas`"))
    }
}

fn joined(xs: &[f64]) -> String {
    xs.iter().map(|&x| fmt_real(x)).collect::<Vec<_>>().join(";")
}

fn formulas(cfg: &mut RunConfig) -> Result<Table> {
    let dims: Vec<u32> = if cfg.is_set("dim") {
        vec![dim(cfg, None)? as u32]
    } else {
        (2..=10).collect()
    };
    let alpha = if cfg.is_set("alpha") {
        Some(cfg.real("alpha", None)?)
    } else {
        None
    };
    let mut t = Table::new(&[
        "n",
        "j",
        "intrinsic_volume",
        "expected_volume",
        "expected_surface",
        "xi",
        "alpha",
        "deficit_bound",
        "ratio_upper_bound",
    ]);
    for n in dims {
        let th = theorem1(n)?;
        let bounds = alpha.map(|a| theorem2_bounds(n, a)).transpose()?;
        for j in 1..=n {
            t.push(vec![
                (n as u64).into(),
                (j as u64).into(),
                intrinsic_volume(n, j)?.into(),
                th.volume.into(),
                th.surface.into(),
                xi(n).into(),
                alpha.into(),
                bounds.map(|b| b.deficit_bound).into(),
                bounds.and_then(|b| b.ratio_upper_bound).into(),
            ]);
        }
    }
    Ok(t)
}

/// 40 log-spaced points on `[10⁻³, 10⁴]`.
pub fn default_psi_grid() -> Vec<f64> {
    (0..40).map(|k| 10f64.powf(-3.0 + 7.0 * k as f64 / 39.0)).collect()
}

fn psi_table(cfg: &mut RunConfig) -> Result<Table> {
    let grid = cfg.reals("t", Some(&default_psi_grid()))?;
    if grid.iter().any(|&x| x < 0.0) {
        return Err(Error::arg("t must be nonnegative"));
    }
    let mut t = Table::new(&["t", "psi", "phi", "bessel_oracle", "abs_diff"]);
    for x in grid {
        let p = psi(x)?;
        let oracle = bessel_i0_scaled(x / 2.0);
        t.push(vec![x.into(), p.into(), phi(x)?.into(), oracle.into(), (p - oracle).abs().into()]);
    }
    Ok(t)
}

fn simulate(cfg: &mut RunConfig, runner: &Runner) -> Result<Table> {
    let n = dim(cfg, Some(2))?;
    let alpha = cfg.real("alpha", None)?;
    let reps = replicates(cfg)?;
    let seed = seed(cfg)?;
    let vertices = if cfg.flag("origin")? {
        VertexSet::WithOrigin
    } else {
        VertexSet::Walk
    };
    let th = theorem1(n as u32)?;
    let s = estimate_hull_stats(runner, n, alpha, reps, seed, vertices)?;
    let mut t = Table::new(&[
        "n",
        "alpha",
        "vertices",
        "replicates",
        "skipped",
        "vol_mean",
        "vol_stderr",
        "surf_mean",
        "surf_stderr",
        "closed_form_vol",
        "closed_form_surf",
        "seed",
        "config_digest",
    ]);
    t.push(vec![
        n.into(),
        alpha.into(),
        vertices.name().into(),
        reps.into(),
        s.skipped.into(),
        s.volume.mean.into(),
        s.volume.stderr.into(),
        s.surface.mean.into(),
        s.surface.stderr.into(),
        th.volume.into(),
        th.surface.into(),
        seed.into(),
        s.volume.config_digest.clone().into(),
    ]);
    Ok(t)
}

pub fn sweep_table(rows: &[SweepRow]) -> Table {
    let mut t = Table::new(&SweepRow::HEADER);
    for r in rows {
        t.push(vec![
            r.n.into(),
            r.alpha.into(),
            r.replicates.into(),
            r.vol_mean.into(),
            r.vol_stderr.into(),
            r.surf_mean.into(),
            r.surf_stderr.into(),
            r.closed_form_vol.into(),
            r.ratio.into(),
            r.deficit_bound.into(),
            r.ratio_upper_bound.into(),
            r.monotonicity_violations.into(),
        ]);
    }
    t
}

fn sweep(cfg: &mut RunConfig, runner: &Runner) -> Result<Table> {
    let n = dim(cfg, Some(2))?;
    let alphas = cfg.reals("alphas", None)?;
    let reps = replicates(cfg)?;
    let seed = seed(cfg)?;
    Ok(sweep_table(&sweep_alpha(runner, n, &alphas, reps, seed)?))
}

pub fn walk_closed_form(variant: WalkVariant, r: f64, alpha: f64) -> Result<f64> {
    Ok(match variant {
        WalkVariant::WalkPositive => psi(r * alpha)?,
        WalkVariant::BridgePositive => bridge_prob(r * alpha),
        WalkVariant::EndpointExpectationIncl | WalkVariant::EndpointExpectationExcl => {
            endpoint_positive_expectation(r, alpha)?
        }
        WalkVariant::CyclicUniqueness => 1.0,
    })
}

fn walk(cfg: &mut RunConfig, runner: &Runner) -> Result<Table> {
    let variant: WalkVariant = cfg.text("variant", None)?.parse()?;
    let r = cfg.real("r", Some(1.0))?;
    let alpha = cfg.real("alpha", None)?;
    let reps = replicates(cfg)?;
    let seed = seed(cfg)?;
    let e = walk1d(runner, variant, r, alpha, reps, seed)?;
    let mut t = Table::new(&[
        "variant",
        "r",
        "alpha",
        "replicates",
        "mean",
        "stderr",
        "closed_form",
        "seed",
        "config_digest",
    ]);
    t.push(vec![
        variant.name().into(),
        r.into(),
        alpha.into(),
        reps.into(),
        e.mean.into(),
        e.stderr.into(),
        walk_closed_form(variant, r, alpha)?.into(),
        seed.into(),
        e.config_digest.into(),
    ]);
    Ok(t)
}

fn facet_prob(cfg: &mut RunConfig, runner: &Runner) -> Result<Table> {
    let gaps = cfg.reals("r", None)?;
    let n = dim(cfg, Some(gaps.len() as u64))?;
    let alpha = cfg.real("alpha", None)?;
    let reps = replicates(cfg)?;
    let seed = seed(cfg)?;
    let point = SimplexPoint::new(gaps.clone())?;
    if point.n() != n {
        return Err(Error::arg(format!("`--r` has {} gaps but n = {n}", point.n())));
    }
    let closed = facet_probability(&point, alpha)?;
    let vh_closed = facet_volume_height(&point, alpha)?;
    let e = facet_event_experiment(runner, n, &point, alpha, reps, seed)?;
    let mut t = Table::new(&[
        "n",
        "r",
        "alpha",
        "replicates",
        "prob_mean",
        "prob_stderr",
        "prob_closed_form",
        "vh_mean",
        "vh_stderr",
        "vh_closed_form",
        "seed",
    ]);
    t.push(vec![
        n.into(),
        joined(&gaps).into(),
        alpha.into(),
        reps.into(),
        e.prob.mean.into(),
        e.prob.stderr.into(),
        closed.value.into(),
        e.vh.mean.into(),
        e.vh.stderr.into(),
        vh_closed.into(),
        seed.into(),
    ]);
    Ok(t)
}

fn facet_volume(cfg: &mut RunConfig, runner: &Runner) -> Result<Table> {
    let gaps = cfg.reals("gaps", None)?;
    let n = dim(cfg, Some(gaps.len() as u64 + 1))?;
    let reps = replicates(cfg)?;
    let seed = seed(cfg)?;
    let e = gaussian_simplex_volume_mc(runner, n, &gaps, reps, seed)?;
    let mut t = Table::new(&["n", "gaps", "replicates", "mean", "stderr", "closed_form", "seed"]);
    t.push(vec![
        n.into(),
        joined(&gaps).into(),
        reps.into(),
        e.mean.into(),
        e.stderr.into(),
        facet_volume_mean(&gaps).into(),
        seed.into(),
    ]);
    Ok(t)
}

/// Stream index for the `k`-th auxiliary integral of a run, far from the
/// replicate indices.
fn auxiliary_stream(k: usize) -> u64 {
    u64::MAX - k as u64
}

fn census(cfg: &mut RunConfig, runner: &Runner) -> Result<Table> {
    let n = dim(cfg, Some(3))?;
    let alphas = alpha_list(cfg)?;
    let scales = cfg.reals("scales", Some(&DEFAULT_SCALES))?;
    let epsilon = cfg.real("epsilon", Some(0.2))?;
    let edge = cfg.real("edge", Some(1.0))?;
    let reps = replicates(cfg)?;
    let seed = seed(cfg)?;
    let mc_points = cfg.uint("mc-points", Some(0))?;
    let rmin = cfg.is_set("rmin").then(|| cfg.real("rmin", None)).transpose()?;
    let rmax = cfg.is_set("rmax").then(|| cfg.real("rmax", None)).transpose()?;
    let class = ShapeClass::equilateral(n, edge, epsilon, 1.0)?;
    let mut intensities = Vec::new();
    if mc_points > 0 {
        for (k, &s) in scales.iter().enumerate() {
            let c = class.with_scale(s)?;
            let (lo, hi) = match (rmin, rmax) {
                (Some(a), Some(b)) => (a, b),
                (a, b) => {
                    let (dlo, dhi) = default_truncation(n, &c)?;
                    (a.unwrap_or(dlo), b.unwrap_or(dhi))
                }
            };
            let mut rng = RngStream::new(seed, auxiliary_stream(k));
            intensities.push(Some(facet_intensity(n, &c, mc_points, lo, hi, &mut rng)?));
        }
    } else {
        intensities.resize(scales.len(), None);
    }
    let levels = facet_census_coupled(runner, n, &alphas, &class, &scales, reps, seed)?;
    let mut t = Table::new(&[
        "alpha",
        "scale",
        "replicates",
        "count_mean",
        "count_stderr",
        "monotonicity_violations",
        "intensity",
        "intensity_stderr",
    ]);
    for level in &levels {
        for (k, &s) in level.scales.iter().enumerate() {
            t.push(vec![
                level.alpha.into(),
                s.into(),
                reps.into(),
                level.counts[k].mean.into(),
                level.counts[k].stderr.into(),
                level.monotonicity_violations.into(),
                intensities[k].map(|i| i.estimate).into(),
                intensities[k].map(|i| i.stderr).into(),
            ]);
        }
    }
    Ok(t)
}

fn intrinsic(cfg: &mut RunConfig, runner: &Runner) -> Result<Table> {
    let n = dim(cfg, Some(3))?;
    let j = cfg.uint("j", None)? as usize;
    let alphas = alpha_list(cfg)?;
    let reps = replicates(cfg)?;
    let seed = seed(cfg)?;
    let target = intrinsic_volume(n as u32, j as u32)?;
    let mut t = Table::new(&[
        "kind", "n", "j", "alpha", "replicates", "skipped", "mean", "stderr", "closed_form",
    ]);
    let mut points = Vec::new();
    for &a in &alphas {
        let e = intrinsic_mc(runner, n, j, a, reps, seed)?;
        points.push((a, e.value.mean, e.value.stderr));
        t.push(vec![
            "estimate".into(),
            n.into(),
            j.into(),
            a.into(),
            reps.into(),
            e.skipped.into(),
            e.value.mean.into(),
            e.value.stderr.into(),
            target.into(),
        ]);
    }
    if points.len() >= 2 {
        let x = extrapolate_inv_sqrt(&points)?;
        t.push(vec![
            "extrapolated".into(),
            n.into(),
            j.into(),
            Cell::Missing,
            reps.into(),
            Cell::Missing,
            x.limit.into(),
            x.limit_stderr.into(),
            target.into(),
        ]);
    }
    Ok(t)
}

fn hausdorff(cfg: &mut RunConfig, runner: &Runner) -> Result<Table> {
    let n = dim(cfg, Some(2))?;
    let alphas = cfg.reals("alphas", None)?;
    let reps = replicates(cfg)?;
    let seed = seed(cfg)?;
    let h = hausdorff_convergence(runner, n, &alphas, reps, seed)?;
    let mut t = Table::new(&["n", "alpha", "replicates", "mean", "stderr", "monotonicity_violations"]);
    for (a, d) in h.alphas.iter().zip(&h.distances) {
        t.push(vec![
            n.into(),
            (*a).into(),
            reps.into(),
            d.mean.into(),
            d.stderr.into(),
            h.monotonicity_violations.into(),
        ]);
    }
    Ok(t)
}

fn volcalc2(cfg: &mut RunConfig) -> Result<Table> {
    let n = dim(cfg, Some(2))?;
    let alphas = alpha_list(cfg)?;
    let mc_points = cfg.uint("mc-points", Some(1_000_000))?;
    let seed = seed(cfg)?;
    let limit = theorem1(n as u32)?.volume;
    let mut t = Table::new(&["n", "alpha", "mc_points", "estimate", "stderr", "closed_form_vol"]);
    for (k, &a) in alphas.iter().enumerate() {
        let mut rng = RngStream::new(seed, k as u64);
        let e = expected_volume_kalpha(n as u32, a, mc_points, &mut rng)?;
        t.push(vec![
            n.into(),
            a.into(),
            mc_points.into(),
            e.estimate.into(),
            e.stderr.into(),
            limit.into(),
        ]);
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn cfg(sub: &str, pairs: &[(&'static str, &str)]) -> RunConfig {
        RunConfig::merge(sub, BTreeMap::new(), pairs.iter().map(|(k, v)| (*k, Some(v.to_string()))))
    }

    #[test]
    fn formulas_table_for_the_plane() {
        let t = run(&mut cfg("formulas", &[("dim", "2")]), &Runner::serial()).unwrap();
        let csv = t.to_csv();
        assert!(csv.contains("1.5707963267948966e0"));
        assert!(csv.contains("5.0132565492620"));
        assert_eq!(t.rows().len(), 2);
    }

    #[test]
    fn psi_table_matches_oracle() {
        let t = run(&mut cfg("psi", &[]), &Runner::serial()).unwrap();
        assert_eq!(t.rows().len(), 40);
        for row in t.rows() {
            match row[4] {
                Cell::Real(d) => assert!(d <= 1e-10),
                _ => panic!("missing diff"),
            }
        }
    }

    #[test]
    fn missing_required_values_fail_before_sampling() {
        assert!(run(&mut cfg("walk1d", &[("alpha", "10")]), &Runner::serial()).is_err());
        assert!(run(&mut cfg("walk1d", &[("variant", "nope"), ("alpha", "10")]), &Runner::serial()).is_err());
        assert!(run(&mut cfg("simulate", &[("dim", "9"), ("alpha", "10")]), &Runner::serial()).is_err());
        assert!(run(&mut cfg("facet-prob", &[("r", "0.3,0.4"), ("dim", "3"), ("alpha", "10")]), &Runner::serial()).is_err());
    }

    #[test]
    fn canonical_config_records_defaults() {
        let mut c = cfg("walk1d", &[("variant", "bridge_positive"), ("alpha", "10"), ("replicates", "100")]);
        run(&mut c, &Runner::serial()).unwrap();
        let canon = c.canonical();
        assert_eq!(canon["r"], "1.0");
        assert_eq!(canon["seed"], "1");
        assert_eq!(canon["subcommand"], "walk1d");
    }
}
