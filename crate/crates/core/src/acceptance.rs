//! Acceptance suite shared by `bmhull verify` and the `acceptance` test target.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde_json::Value as Json;

use crate::cli::{build_config, execute, parse_results_json, ResultsDocument};
use crate::closed_form::special::bessel_i0_scaled;
use crate::closed_form::{
    default_truncation, endpoint_positive_expectation, facet_intensity, facet_probability,
    facet_volume_height, intrinsic_volume, phi, psi, theorem1, SimplexPoint,
};
use crate::cli::commands::default_psi_grid;
use crate::error::{Error, Result};
use crate::experiments::{
    census_monotonicity_violations, extrapolate_inv_sqrt, facet_census_coupled, facet_event_experiment,
    gaussian_simplex_volume_mc, hausdorff_convergence, intrinsic_mc, sweep_alpha, walk1d, FacetEvent,
    WalkVariant,
};
use crate::geometry::ShapeClass;
use crate::rng::RngStream;
use crate::stats::{combined_stderr, Runner};

pub const CRITERIA: u32 = 14;

/// Master seed of criterion `id`; fixed so every run checks the same draws.
pub fn criterion_seed(id: u32) -> u64 {
    0x5EED_0000 + id as u64
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Profile {
    /// Replicates divided by about ten; percentage gates doubled.
    Quick,
    /// Replicate counts and tolerances as stated.
    Full,
}

impl Profile {
    fn reps(self, full: u64) -> u64 {
        match self {
            Profile::Full => full,
            Profile::Quick => (full / 10).max(100),
        }
    }

    fn tolerance(self, full: f64) -> f64 {
        match self {
            Profile::Full => full,
            Profile::Quick => 2.0 * full,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub id: u32,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
    pub budget_seconds: f64,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] criterion {:>2} {} ({:.1} s of {:.0} s): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.seconds,
            self.budget_seconds,
            self.detail
        )
    }
}

fn title(id: u32) -> (&'static str, f64) {
    match id {
        1 => ("closed-form self-consistency", 1.0),
        2 => ("psi against the Bessel oracle", 1.0),
        3 => ("one-dimensional stay-positive laws", 180.0),
        4 => ("endpoint expectation", 120.0),
        5 => ("conditioned facet probability", 300.0),
        6 => ("volume-height product", 300.0),
        7 => ("Gaussian facet volume", 60.0),
        8 => ("volume pipeline against hull Monte Carlo", 300.0),
        9 => ("expected hull volume and perimeter by extrapolation", 900.0),
        10 => ("finite-intensity deficit bounds", 600.0),
        11 => ("facet census of a shape class", 1200.0),
        12 => ("intrinsic volumes", 600.0),
        13 => ("Hausdorff convergence", 300.0),
        14 => ("determinism across worker counts", 1080.0),
        _ => ("unknown", 0.0),
    }
}

/// Accumulates named checks into one verdict.
#[derive(Default)]
struct Checks {
    failed: Vec<String>,
    notes: Vec<String>,
}

impl Checks {
    fn check(&mut self, ok: bool, what: impl Into<String>) {
        let what = what.into();
        if !ok {
            self.failed.push(what.clone());
        }
        self.notes.push(format!("{}{what}", if ok { "" } else { "NOT " }));
    }

    fn note(&mut self, what: impl Into<String>) {
        self.notes.push(what.into());
    }

    fn finish(self) -> (bool, String) {
        (self.failed.is_empty(), self.notes.join("; "))
    }
}

fn rel_err(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

/// Key of a configured CLI run whose output file criterion 14 compares.
struct Artifact {
    file: String,
    subcommand: &'static str,
    flags: Vec<(&'static str, String)>,
}

impl Artifact {
    fn new(file: impl Into<String>, subcommand: &'static str, flags: &[(&'static str, String)]) -> Self {
        Self {
            file: file.into(),
            subcommand,
            flags: flags.to_vec(),
        }
    }

    /// Runs through the CLI layer, writes the JSON file into `dir` and reads
    /// it back.
    fn run(&self, jobs: usize, dir: &Path) -> Result<ResultsDocument> {
        let mut flags: Vec<(&'static str, Option<String>)> =
            self.flags.iter().map(|(k, v)| (*k, Some(v.clone()))).collect();
        flags.push(("jobs", Some(jobs.to_string())));
        flags.push(("format", Some("json".to_string())));
        let mut cfg = build_config(self.subcommand, None, flags)?;
        let text = execute(&mut cfg)?;
        fs::create_dir_all(dir)?;
        fs::write(dir.join(&self.file), &text)?;
        parse_results_json(&text)
    }
}

fn artifacts(id: u32, profile: Profile) -> Vec<Artifact> {
    let seed = criterion_seed(id).to_string();
    let s = |x: &str| x.to_string();
    match id {
        3 => {
            let reps = profile.reps(1_000_000).to_string();
            vec![
                Artifact::new("c3_walk_positive.json", "walk1d", &[
                    ("variant", s("walk_positive")), ("r", s("1")), ("alpha", s("10")),
                    ("replicates", reps.clone()), ("seed", seed.clone()),
                ]),
                Artifact::new("c3_bridge_positive.json", "walk1d", &[
                    ("variant", s("bridge_positive")), ("r", s("1")), ("alpha", s("10")),
                    ("replicates", reps), ("seed", seed.clone()),
                ]),
                Artifact::new("c3_cyclic_uniqueness.json", "walk1d", &[
                    ("variant", s("cyclic_uniqueness")), ("r", s("1")), ("alpha", s("10")),
                    ("replicates", s("10000")), ("seed", seed),
                ]),
            ]
        }
        8 => {
            let reps = profile.reps(20_000).to_string();
            let points = match profile {
                Profile::Full => 10_000_000u64,
                Profile::Quick => 1_000_000,
            };
            vec![
                Artifact::new("c8_simulate_origin.json", "simulate", &[
                    ("dim", s("2")), ("alpha", s("200")), ("replicates", reps.clone()),
                    ("seed", seed.clone()), ("origin", s("true")),
                ]),
                Artifact::new("c8_simulate_walk.json", "simulate", &[
                    ("dim", s("2")), ("alpha", s("200")), ("replicates", reps), ("seed", seed.clone()),
                ]),
                Artifact::new("c8_volcalc2.json", "volcalc2", &[
                    ("dim", s("2")), ("alpha", s("200")), ("mc-points", points.to_string()), ("seed", seed),
                ]),
            ]
        }
        10 => {
            let reps = profile.reps(2000).to_string();
            (2..=4u32)
                .map(|n| {
                    let n3 = (n * n * n) as f64;
                    let mut alphas: Vec<f64> = [1.0, 4.0, 16.0, 64.0].iter().map(|c| c * n3).collect();
                    if n == 4 {
                        alphas.insert(0, n3 / 16.0);
                    }
                    let list = alphas.iter().map(|a| format!("{a:?}")).collect::<Vec<_>>().join(",");
                    Artifact::new(format!("c10_sweep_n{n}.json"), "sweep-alpha", &[
                        ("dim", n.to_string()), ("alphas", list), ("replicates", reps.clone()),
                        ("seed", seed.clone()),
                    ])
                })
                .collect()
        }
        _ => Vec::new(),
    }
}

fn field(row: &Json, key: &str) -> Result<f64> {
    row.get(key)
        .and_then(Json::as_f64)
        .ok_or_else(|| Error::arg(format!("result row lacks numeric `{key}`")))
}

/// State shared between criteria of one suite run.
struct Suite {
    profile: Profile,
    jobs: usize,
    runner: Runner,
    dir: PathBuf,
    plane_facets: Option<FacetEvent>,
    /// Criteria whose artifacts sit in `dir/jobs{jobs}`.
    produced: Vec<u32>,
}

impl Suite {
    fn base_dir(&self) -> PathBuf {
        self.dir.join(format!("jobs{}", self.jobs))
    }

    fn run_artifacts(&mut self, id: u32) -> Result<Vec<ResultsDocument>> {
        let dir = self.base_dir();
        let docs = artifacts(id, self.profile)
            .iter()
            .map(|a| a.run(self.jobs, &dir))
            .collect::<Result<Vec<_>>>()?;
        self.produced.push(id);
        Ok(docs)
    }

    fn plane_facet_event(&mut self) -> Result<FacetEvent> {
        if self.plane_facets.is_none() {
            let r = SimplexPoint::new(vec![0.3, 0.4])?;
            let reps = self.profile.reps(200_000);
            self.plane_facets = Some(facet_event_experiment(&self.runner, 2, &r, 10.0, reps, criterion_seed(5))?);
        }
        Ok(self.plane_facets.clone().unwrap())
    }

    fn criterion(&mut self, id: u32) -> Result<(bool, String)> {
        let mut c = Checks::default();
        match id {
            1 => {
                let mut worst = 0.0f64;
                for n in 2..=10u32 {
                    let th = theorem1(n)?;
                    worst = worst
                        .max(rel_err(intrinsic_volume(n, n)?, th.volume))
                        .max(rel_err(intrinsic_volume(n, n - 1)?, th.surface / 2.0));
                }
                c.check(worst <= 1e-12, format!("intrinsic/hull identities, worst rel err {worst:.2e} <= 1e-12"));
                let mut worst_phi = 0.0f64;
                for t in default_psi_grid() {
                    let lhs = phi(t)?;
                    let rhs = (std::f64::consts::PI * t).sqrt() * psi(t)?;
                    worst_phi = worst_phi.max(rel_err(lhs, rhs));
                }
                c.check(worst_phi <= 1e-12, format!("phi = sqrt(pi t) psi on 40 points, worst rel err {worst_phi:.2e}"));
            }
            2 => {
                let mut worst = 0.0f64;
                for t in [0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 50.0, 100.0] {
                    worst = worst.max((psi(t)? - bessel_i0_scaled(t / 2.0)).abs());
                }
                c.check(worst <= 1e-10, format!("max |psi - e^(-t/2) I0(t/2)| = {worst:.2e} <= 1e-10"));
            }
            3 => {
                let docs = self.run_artifacts(3)?;
                let walk = &docs[0].results[0];
                let (m, se, target) = (field(walk, "mean")?, field(walk, "stderr")?, psi(10.0)?);
                c.check((m - target).abs() <= 3.0 * se, format!("walk_positive {m:.6} vs {target:.6} (se {se:.1e})"));
                let bridge = &docs[1].results[0];
                let (m, se) = (field(bridge, "mean")?, field(bridge, "stderr")?);
                let target = -(-10.0f64).exp_m1() / 10.0;
                c.check((m - target).abs() <= 3.0 * se, format!("bridge_positive {m:.6} vs {target:.7} (se {se:.1e})"));
                let cyc = &docs[2].results[0];
                let (m, se) = (field(cyc, "mean")?, field(cyc, "stderr")?);
                c.check(m == 1.0 && se == 0.0, format!("cyclic_uniqueness mean {m} with stderr {se}"));
            }
            4 => {
                let reps = self.profile.reps(1_000_000);
                let seed = criterion_seed(4);
                let incl = walk1d(&self.runner, WalkVariant::EndpointExpectationIncl, 1.0, 4.0, reps, seed)?;
                let target = endpoint_positive_expectation(1.0, 4.0)?;
                c.check(
                    incl.within(target, 3.0),
                    format!("incl at alpha 4: {:.6} vs {target:.6} (se {:.1e})", incl.mean, incl.stderr),
                );
                let excl = walk1d(&self.runner, WalkVariant::EndpointExpectationExcl, 1.0, 0.1, reps, seed + 1000)?;
                let target = endpoint_positive_expectation(1.0, 0.1)?;
                let z = (excl.mean - target).abs() / excl.stderr;
                c.check(z > 5.0, format!("excl at alpha 0.1 departs from the formula by {z:.1} stderr (> 5)"));
            }
            5 => {
                let plane = self.plane_facet_event()?;
                let target = facet_probability(&SimplexPoint::new(vec![0.3, 0.4])?, 10.0)?.value;
                c.check(
                    plane.prob.within(target, 3.0),
                    format!("n=2: {:.5} vs {target:.5} (se {:.1e})", plane.prob.mean, plane.prob.stderr),
                );
                let r = SimplexPoint::new(vec![0.2, 0.2, 0.2])?;
                let reps = self.profile.reps(50_000);
                let space = facet_event_experiment(&self.runner, 3, &r, 20.0, reps, criterion_seed(5) + 1000)?;
                let target = facet_probability(&r, 20.0)?.value;
                c.check(
                    space.prob.within(target, 3.0),
                    format!("n=3: {:.5} vs {target:.5} (se {:.1e})", space.prob.mean, space.prob.stderr),
                );
            }
            6 => {
                let plane = self.plane_facet_event()?;
                let target = facet_volume_height(&SimplexPoint::new(vec![0.3, 0.4])?, 10.0)?;
                c.check(
                    plane.vh.within(target, 3.0),
                    format!("vh {:.6} vs {target:.6} (se {:.1e})", plane.vh.mean, plane.vh.stderr),
                );
            }
            7 => {
                let reps = self.profile.reps(1_000_000);
                let seed = criterion_seed(7);
                let base = gaussian_simplex_volume_mc(&self.runner, 3, &[0.2, 0.2], reps, seed)?;
                c.check(base.within(0.2, 3.0), format!("mean {:.6} vs 0.2 (se {:.1e})", base.mean, base.stderr));
                let doubled = gaussian_simplex_volume_mc(&self.runner, 3, &[0.4, 0.4], reps, seed + 1000)?;
                let factor = 2.0f64;
                let se = combined_stderr(doubled.stderr, factor * base.stderr);
                c.check(
                    (doubled.mean - factor * base.mean).abs() <= 3.0 * se,
                    format!("doubled gaps scale the mean by {:.4} (expected {factor})", doubled.mean / base.mean),
                );
            }
            8 => {
                let docs = self.run_artifacts(8)?;
                let origin = &docs[0].results[0];
                let walk = &docs[1].results[0];
                let integral = &docs[2].results[0];
                let (mi, si) = (field(integral, "estimate")?, field(integral, "stderr")?);
                let (mo, so) = (field(origin, "vol_mean")?, field(origin, "vol_stderr")?);
                let z = (mo - mi).abs() / combined_stderr(so, si);
                c.check(z <= 3.0, format!("hull MC with origin {mo:.5} vs integral {mi:.5}: {z:.2} combined se"));
                let (mw, sw) = (field(walk, "vol_mean")?, field(walk, "vol_stderr")?);
                c.note(format!("walk-only hull {mw:.5}: {:.2} combined se", (mw - mi).abs() / combined_stderr(sw, si)));
            }
            9 => {
                let reps = self.profile.reps(5000);
                let seed = criterion_seed(9);
                let alphas = [1e3, 4e3, 1.6e4];
                let (vol_tol, per_tol, vol3_tol) =
                    (self.profile.tolerance(0.03), self.profile.tolerance(0.02), self.profile.tolerance(0.05));
                let rows = sweep_alpha(&self.runner, 2, &alphas, reps, seed)?;
                let vol = extrapolate_inv_sqrt(&rows.iter().map(|r| (r.alpha, r.vol_mean, r.vol_stderr)).collect::<Vec<_>>())?;
                let per = extrapolate_inv_sqrt(&rows.iter().map(|r| (r.alpha, r.surf_mean, r.surf_stderr)).collect::<Vec<_>>())?;
                let t2 = theorem1(2)?;
                c.check(
                    rel_err(vol.limit, t2.volume) <= vol_tol,
                    format!("n=2 area {:.5} vs {:.5} ({:.2}%)", vol.limit, t2.volume, 100.0 * rel_err(vol.limit, t2.volume)),
                );
                c.check(
                    rel_err(per.limit, t2.surface) <= per_tol,
                    format!("n=2 perimeter {:.5} vs {:.5} ({:.2}%)", per.limit, t2.surface, 100.0 * rel_err(per.limit, t2.surface)),
                );
                let rows = sweep_alpha(&self.runner, 3, &alphas, reps, seed + 1000)?;
                let vol = extrapolate_inv_sqrt(&rows.iter().map(|r| (r.alpha, r.vol_mean, r.vol_stderr)).collect::<Vec<_>>())?;
                let t3 = theorem1(3)?;
                c.check(
                    rel_err(vol.limit, t3.volume) <= vol3_tol,
                    format!("n=3 volume {:.5} vs {:.5} ({:.2}%)", vol.limit, t3.volume, 100.0 * rel_err(vol.limit, t3.volume)),
                );
            }
            10 => {
                let docs = self.run_artifacts(10)?;
                for (doc, n) in docs.iter().zip(2..) {
                    let mut violations = 0.0;
                    let mut lower_ok = true;
                    let mut upper_rows = 0;
                    let mut upper_ok = true;
                    let mut ratios = Vec::new();
                    for row in &doc.results {
                        violations += field(row, "monotonicity_violations")?;
                        let ratio = field(row, "ratio")?;
                        let se = field(row, "vol_stderr")? / field(row, "closed_form_vol")?;
                        lower_ok &= ratio >= 1.0 - field(row, "deficit_bound")? - 3.0 * se;
                        if let Some(bound) = row.get("ratio_upper_bound").and_then(Json::as_f64) {
                            upper_rows += 1;
                            upper_ok &= ratio - 3.0 * se <= bound;
                        }
                        ratios.push(ratio);
                    }
                    let increasing = ratios.windows(2).all(|w| w[1] > w[0]);
                    c.check(violations == 0.0, format!("n={n}: {violations} nesting violations"));
                    c.check(lower_ok, format!("n={n}: deficit bound holds on every row"));
                    if upper_rows > 0 {
                        c.check(upper_ok, format!("n={n}: small-alpha ratio bound holds on {upper_rows} row(s)"));
                    }
                    let shown: Vec<String> = ratios.iter().map(|r| format!("{r:.4}")).collect();
                    c.check(increasing, format!("n={n}: ratio increasing [{}]", shown.join(", ")));
                }
            }
            11 => {
                let reps = match self.profile {
                    Profile::Full => 500,
                    Profile::Quick => 200,
                };
                let seed = criterion_seed(11);
                let scales = [0.05, 0.1, 0.2, 0.4];
                let class = ShapeClass::equilateral(3, 1.0, 0.2, 1.0)?;
                let levels = facet_census_coupled(&self.runner, 3, &[3000.0, 6000.0], &class, &scales, reps, seed)?;
                let (low, high) = (&levels[0], &levels[1]);
                let v = census_monotonicity_violations(&scales, &low.counts);
                let shown: Vec<String> = low.counts.iter().map(|e| format!("{:.4}", e.mean)).collect();
                c.check(v == 0, format!("census at 3000 non-increasing in scale [{}]", shown.join(", ")));
                for k in 0..2 {
                    let (a, b) = (&low.counts[k], &high.counts[k]);
                    let z = (a.mean - b.mean).abs() / combined_stderr(a.stderr, b.stderr).max(f64::MIN_POSITIVE);
                    c.check(
                        z <= 3.0 || a.mean == b.mean,
                        format!("scale {}: 3000 vs 6000 {:.4} vs {:.4}", scales[k], a.mean, b.mean),
                    );
                }
                let points = match self.profile {
                    Profile::Full => 10_000_000,
                    Profile::Quick => 1_000_000,
                };
                let scaled = class.with_scale(0.1)?;
                let (lo, hi) = default_truncation(3, &scaled)?;
                let mut rng = RngStream::new(seed, u64::MAX);
                let intensity = facet_intensity(3, &scaled, points, lo, hi, &mut rng)?;
                let census = &low.counts[1];
                let gap = rel_err(census.mean, intensity.estimate);
                let tol = self.profile.tolerance(0.25);
                c.check(
                    gap <= tol,
                    format!(
                        "intensity {:.5} (se {:.1e}) vs census {:.5} (se {:.1e}) differ by {:.0}% (<= {:.0}%)",
                        intensity.estimate,
                        intensity.stderr,
                        census.mean,
                        census.stderr,
                        100.0 * gap,
                        100.0 * tol
                    ),
                );
            }
            12 => {
                let reps = self.profile.reps(4000);
                let tol = self.profile.tolerance(0.05);
                for j in [1usize, 2] {
                    let mut points = Vec::new();
                    for (k, a) in [2.5e3, 1e4].into_iter().enumerate() {
                        let seed = criterion_seed(12) + 1000 * j as u64 + k as u64;
                        let e = intrinsic_mc(&self.runner, 3, j, a, reps, seed)?;
                        points.push((a, e.value.mean, e.value.stderr));
                    }
                    let x = extrapolate_inv_sqrt(&points)?;
                    let target = intrinsic_volume(3, j as u32)?;
                    c.check(
                        rel_err(x.limit, target) <= tol,
                        format!("V_{j}: {:.5} vs {target:.5} ({:.2}%)", x.limit, 100.0 * rel_err(x.limit, target)),
                    );
                }
            }
            13 => {
                let reps = self.profile.reps(500);
                let h = hausdorff_convergence(&self.runner, 2, &[50.0, 200.0, 800.0, 3200.0], reps, criterion_seed(13))?;
                let means: Vec<f64> = h.distances.iter().map(|d| d.mean).collect();
                c.check(h.monotonicity_violations == 0, format!("{} per-sample increases", h.monotonicity_violations));
                let shown: Vec<String> = means.iter().map(|m| format!("{m:.4}")).collect();
                c.check(means.windows(2).all(|w| w[1] < w[0]), format!("means strictly decreasing [{}]", shown.join(", ")));
                let coarse = &means[..means.len() - 1];
                let largest = coarse.iter().copied().fold(0.0f64, f64::max);
                let smallest = coarse.iter().copied().fold(f64::INFINITY, f64::min);
                c.check(smallest < 0.5 * largest, "smallest non-reference mean below half the largest");
            }
            14 => {
                let other = if self.jobs == 4 { 1 } else { 4 };
                let rerun_dir = self.dir.join(format!("jobs{other}"));
                for id in [3, 8, 10] {
                    if !self.produced.contains(&id) {
                        let dir = self.base_dir();
                        for a in artifacts(id, self.profile) {
                            a.run(self.jobs, &dir)?;
                        }
                        self.produced.push(id);
                    }
                }
                let start = Instant::now();
                let mut compared = 0;
                for id in [3, 8, 10] {
                    for a in artifacts(id, self.profile) {
                        a.run(other, &rerun_dir)?;
                        let x = fs::read(self.base_dir().join(&a.file))?;
                        let y = fs::read(rerun_dir.join(&a.file))?;
                        c.check(x == y, format!("{} identical with jobs {} and {other}", a.file, self.jobs));
                        compared += 1;
                    }
                }
                let elapsed = start.elapsed().as_secs_f64();
                let budget = title(3).1 + title(8).1 + title(10).1;
                c.check(elapsed <= budget, format!("{compared} files rerun in {elapsed:.0} s (<= {budget:.0} s)"));
            }
            _ => return Err(Error::arg(format!("no criterion {id}"))),
        }
        Ok(c.finish())
    }
}

/// Runs the selected criteria in order, reporting each as it finishes.
pub fn run_suite(
    profile: Profile,
    jobs: usize,
    only: Option<&[u32]>,
    workdir: &Path,
    mut on_done: impl FnMut(&Outcome),
) -> Result<Vec<Outcome>> {
    let mut suite = Suite {
        profile,
        jobs,
        runner: Runner::new(jobs)?,
        dir: workdir.to_path_buf(),
        plane_facets: None,
        produced: Vec::new(),
    };
    let mut outcomes = Vec::new();
    for id in 1..=CRITERIA {
        if only.is_some_and(|o| !o.contains(&id)) {
            continue;
        }
        let (name, budget) = title(id);
        let start = Instant::now();
        let (ok, detail) = match suite.criterion(id) {
            Ok(v) => v,
            Err(e) => (false, format!("error: {e}")),
        };
        let seconds = start.elapsed().as_secs_f64();
        let within_budget = seconds <= budget;
        let detail = if within_budget {
            detail
        } else {
            format!("{detail}; NOT within the {budget:.0} s budget")
        };
        let outcome = Outcome {
            id,
            title: name,
            passed: ok && within_budget,
            detail,
            seconds,
            budget_seconds: budget,
        };
        on_done(&outcome);
        outcomes.push(outcome);
    }
    Ok(outcomes)
}
