//! Streaming moments, estimator records and the deterministic replicate runner.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Count, mean and centered second moment (Welford), mergeable by Chan's rule.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Moments {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(a: Moments, b: Moments) -> Moments {
        if a.count == 0 {
            return b;
        }
        if b.count == 0 {
            return a;
        }
        let count = a.count + b.count;
        let delta = b.mean - a.mean;
        let wb = b.count as f64 / count as f64;
        Moments {
            count,
            mean: a.mean + delta * wb,
            m2: a.m2 + b.m2 + delta * delta * a.count as f64 * wb,
        }
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance; zero below two observations.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            (self.m2 / (self.count - 1) as f64).max(0.0)
        }
    }

    pub fn stderr(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            (self.variance() / self.count as f64).sqrt()
        }
    }
}

const LEAF: usize = 64;

/// Moments of `values`, accumulated in fixed-size leaves merged by a
/// fixed-shape pairwise tree, so the result depends only on the order of
/// `values`.
pub fn summarize(values: &[f64]) -> Moments {
    let mut level: Vec<Moments> = values
        .chunks(LEAF)
        .map(|c| {
            let mut m = Moments::default();
            c.iter().for_each(|&x| m.push(x));
            m
        })
        .collect();
    if level.is_empty() {
        return Moments::default();
    }
    while level.len() > 1 {
        level = level
            .chunks(2)
            .map(|p| if p.len() == 2 { Moments::merge(p[0], p[1]) } else { p[0] })
            .collect();
    }
    level[0]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimatorResult {
    pub mean: f64,
    pub stderr: f64,
    pub replicates: u64,
    pub master_seed: u64,
    pub config_digest: String,
}

impl EstimatorResult {
    pub fn from_moments(m: &Moments, master_seed: u64, config_digest: &str) -> Self {
        Self {
            mean: m.mean(),
            stderr: m.stderr(),
            replicates: m.count(),
            master_seed,
            config_digest: config_digest.to_string(),
        }
    }

    pub fn from_values(values: &[f64], master_seed: u64, config_digest: &str) -> Self {
        Self::from_moments(&summarize(values), master_seed, config_digest)
    }

    /// `|mean − target| ≤ k · stderr`.
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.mean - target).abs() <= k * self.stderr
    }

    pub fn is_empty(&self) -> bool {
        self.replicates == 0
    }
}

/// `√(a² + b²)` for two independent standard errors.
pub fn combined_stderr(a: f64, b: f64) -> f64 {
    a.hypot(b)
}

/// Hex SHA-256 of the `key=value` lines of `pairs`, sorted by key.
pub fn config_digest<K: AsRef<str>, V: AsRef<str>>(pairs: &[(K, V)]) -> String {
    let mut lines: Vec<String> = pairs
        .iter()
        .map(|(k, v)| format!("{}={}\n", k.as_ref(), v.as_ref()))
        .collect();
    lines.sort();
    let digest = Sha256::digest(lines.concat().as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Runs independent replicates on a fixed number of workers. Results are
/// returned in replicate order, so downstream reductions do not depend on
/// scheduling.
pub struct Runner {
    pool: Option<rayon::ThreadPool>,
}

impl Runner {
    pub fn new(jobs: usize) -> Result<Self> {
        if jobs == 0 {
            return Err(Error::arg("jobs must be at least 1"));
        }
        if jobs == 1 {
            return Ok(Self::serial());
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::arg(format!("cannot start {jobs} workers: {e}")))?;
        Ok(Self { pool: Some(pool) })
    }

    pub fn serial() -> Self {
        Self { pool: None }
    }

    pub fn jobs(&self) -> usize {
        self.pool.as_ref().map_or(1, |p| p.current_num_threads())
    }

    pub fn map<T, F>(&self, count: u64, f: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(u64) -> Result<T> + Sync,
    {
        match &self.pool {
            None => (0..count).map(&f).collect(),
            Some(pool) => pool.install(|| (0..count).into_par_iter().map(&f).collect()),
        }
    }
}
