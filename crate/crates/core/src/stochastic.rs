//! Poisson times, the coupled Poisson rain, Brownian paths and bridges.

use crate::closed_form::special::ln_gamma;
use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Means up to this value are sampled by inversion.
const INVERSION_LIMIT: f64 = 30.0;

/// Poisson(`mean`) count: sequential inversion for small means, Hörmann's
/// transformed rejection (PTRS) otherwise. Both are exact.
pub fn sample_poisson_count(mean: f64, rng: &mut RngStream) -> Result<u64> {
    if !(mean >= 0.0 && mean.is_finite()) {
        return Err(Error::arg(format!("Poisson mean {mean} must be finite and nonnegative")));
    }
    if mean == 0.0 {
        return Ok(0);
    }
    if mean <= INVERSION_LIMIT {
        let u = rng.uniform();
        let mut k = 0u64;
        let mut p = (-mean).exp();
        let mut cdf = p;
        while u >= cdf {
            k += 1;
            p *= mean / k as f64;
            let next = cdf + p;
            if next == cdf {
                // Tail mass below rounding; u sits in the last representable cell.
                break;
            }
            cdf = next;
        }
        return Ok(k);
    }
    let slam = mean.sqrt();
    let loglam = mean.ln();
    let b = 0.931 + 2.53 * slam;
    let a = -0.059 + 0.024_83 * b;
    let inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    let vr = 0.9277 - 3.6224 / (b - 2.0);
    loop {
        let u = rng.uniform() - 0.5;
        let v = rng.uniform_open0();
        let us = 0.5 - u.abs();
        let k = ((2.0 * a / us + b) * u + mean + 0.43).floor();
        if us >= 0.07 && v <= vr {
            return Ok(k as u64);
        }
        if k < 0.0 || (us < 0.013 && v > us) {
            continue;
        }
        if v.ln() + inv_alpha.ln() - (a / (us * us) + b).ln() <= -mean + k * loglam - ln_gamma(k + 1.0) {
            return Ok(k as u64);
        }
    }
}

/// Uniform time in `(0, t_end]`.
fn uniform_time(t_end: f64, rng: &mut RngStream) -> f64 {
    rng.uniform_open0() * t_end
}

fn sort_dedup(times: &mut Vec<f64>) {
    times.sort_by(f64::total_cmp);
    // Exact ties have probability zero; drop them to keep the order strict.
    times.dedup();
}

/// Poisson process of intensity `rate` on `(0, t_end]`, sorted ascending.
pub fn sample_poisson_times(rate: f64, t_end: f64, rng: &mut RngStream) -> Result<Vec<f64>> {
    if !(rate >= 0.0 && rate.is_finite()) {
        return Err(Error::arg(format!("rate {rate} must be finite and nonnegative")));
    }
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::arg(format!("t_end {t_end} must be finite and positive")));
    }
    let count = sample_poisson_count(rate * t_end, rng)?;
    let mut times: Vec<f64> = (0..count).map(|_| uniform_time(t_end, rng)).collect();
    sort_dedup(&mut times);
    Ok(times)
}

/// Unit-intensity Poisson points on `[0,1] × [0, y_max]`, sorted by time.
/// The times with level at most `α` form a Poisson process of intensity `α`,
/// nested in `α`.
#[derive(Clone, Debug, PartialEq)]
pub struct Rain {
    y_max: f64,
    points: Vec<(f64, f64)>,
}

impl Rain {
    pub fn generate(y_max: f64, rng: &mut RngStream) -> Result<Self> {
        if !(y_max > 0.0 && y_max.is_finite()) {
            return Err(Error::arg(format!("y_max {y_max} must be finite and positive")));
        }
        let count = sample_poisson_count(y_max, rng)?;
        let mut points: Vec<(f64, f64)> = (0..count)
            .map(|_| {
                let x = uniform_time(1.0, rng);
                let y = rng.uniform() * y_max;
                (x, y)
            })
            .collect();
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        points.dedup_by(|a, b| a.0 == b.0);
        Ok(Self { y_max, points })
    }

    pub fn y_max(&self) -> f64 {
        self.y_max
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    /// All rain times in ascending order.
    pub fn times(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.0).collect()
    }

    fn check_level(&self, alpha: f64) -> Result<()> {
        if !(alpha >= 0.0 && alpha <= self.y_max) {
            return Err(Error::arg(format!(
                "slice level {alpha} outside the generated range [0, {}]",
                self.y_max
            )));
        }
        Ok(())
    }

    /// Positions in [`Rain::points`] of the points with level at most `alpha`.
    pub fn slice_indices(&self, alpha: f64) -> Result<Vec<usize>> {
        self.check_level(alpha)?;
        Ok(self
            .points
            .iter()
            .enumerate()
            .filter(|(_, p)| p.1 <= alpha)
            .map(|(i, _)| i)
            .collect())
    }

    /// The time set `Λ_α`, sorted ascending.
    pub fn slice(&self, alpha: f64) -> Result<Vec<f64>> {
        self.check_level(alpha)?;
        Ok(self.points.iter().filter(|p| p.1 <= alpha).map(|p| p.0).collect())
    }
}

pub fn rain_generate(y_max: f64, rng: &mut RngStream) -> Result<Rain> {
    Rain::generate(y_max, rng)
}

pub fn rain_slice(rain: &Rain, alpha: f64) -> Result<Vec<f64>> {
    rain.slice(alpha)
}

/// Brownian positions at increasing times; `B(0) = 0` is implicit.
#[derive(Clone, Debug, PartialEq)]
pub struct PathSample {
    dim: usize,
    times: Vec<f64>,
    positions: Vec<f64>,
}

impl PathSample {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Flat positions, `dim` coordinates per time.
    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn position(&self, i: usize) -> &[f64] {
        &self.positions[i * self.dim..(i + 1) * self.dim]
    }

    /// Flat positions at the given entry indices.
    pub fn gather(&self, indices: &[usize]) -> Vec<f64> {
        let mut out = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            out.extend_from_slice(self.position(i));
        }
        out
    }
}

fn check_increasing(times: &[f64], lo: f64, hi: f64, what: &str) -> Result<()> {
    let mut prev = lo;
    for (i, &t) in times.iter().enumerate() {
        let ok = if i == 0 { t > lo } else { t > prev };
        if !ok || t > hi || !t.is_finite() {
            return Err(Error::arg(format!(
                "{what} must be strictly increasing in ({lo}, {hi}]; entry {i} is {t}"
            )));
        }
        prev = t;
    }
    Ok(())
}

/// `dim`-dimensional Brownian motion at `times ⊂ (0, 1]`.
pub fn sample_path(times: &[f64], dim: usize, rng: &mut RngStream) -> Result<PathSample> {
    sample_path_until(times, dim, 1.0, rng)
}

/// As [`sample_path`], with times allowed up to `horizon`.
pub fn sample_path_until(times: &[f64], dim: usize, horizon: f64, rng: &mut RngStream) -> Result<PathSample> {
    if dim == 0 {
        return Err(Error::arg("path dimension must be at least 1"));
    }
    check_increasing(times, 0.0, horizon, "path times")?;
    let mut positions = vec![0.0; times.len() * dim];
    let mut prev_t = 0.0;
    for (i, &t) in times.iter().enumerate() {
        let sd = (t - prev_t).sqrt();
        for c in 0..dim {
            let base = if i == 0 { 0.0 } else { positions[(i - 1) * dim + c] };
            positions[i * dim + c] = base + sd * rng.normal();
        }
        prev_t = t;
    }
    Ok(PathSample {
        dim,
        times: times.to_vec(),
        positions,
    })
}

/// One-dimensional Brownian bridge on `[0, r]` pinned at both ends,
/// evaluated at `times ⊂ (0, r)`.
pub fn sample_bridge_1d(times: &[f64], r: f64, rng: &mut RngStream) -> Result<Vec<f64>> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::arg(format!("bridge length {r} must be finite and positive")));
    }
    check_increasing(times, 0.0, r, "bridge times")?;
    if times.last().is_some_and(|&t| t >= r) {
        return Err(Error::arg("bridge times must lie strictly inside (0, r)"));
    }
    let mut w = Vec::with_capacity(times.len());
    let mut b = 0.0;
    let mut prev = 0.0;
    for &t in times {
        b += (t - prev).sqrt() * rng.normal();
        w.push(b);
        prev = t;
    }
    let end = b + (r - prev).sqrt() * rng.normal();
    for (wi, &t) in w.iter_mut().zip(times) {
        *wi -= t / r * end;
    }
    Ok(w)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MarkedTime {
    pub t: f64,
    pub anchor: bool,
}

/// Merge of `base` and `anchors`, strictly sorted, anchors flagged. A base
/// time equal to an anchor is absorbed into the anchor.
pub fn condition_insert(base: &[f64], anchors: &[f64]) -> Result<Vec<MarkedTime>> {
    for (name, seq) in [("base times", base), ("anchors", anchors)] {
        if seq.iter().any(|t| !(0.0..=1.0).contains(t)) {
            return Err(Error::arg(format!("{name} must lie in [0, 1]")));
        }
        if seq.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::arg(format!("{name} must be strictly increasing")));
        }
    }
    let mut out = Vec::with_capacity(base.len() + anchors.len());
    let (mut i, mut j) = (0, 0);
    while i < base.len() || j < anchors.len() {
        let take_anchor = j < anchors.len() && (i == base.len() || anchors[j] <= base[i]);
        if take_anchor {
            if i < base.len() && base[i] == anchors[j] {
                i += 1;
            }
            out.push(MarkedTime {
                t: anchors[j],
                anchor: true,
            });
            j += 1;
        } else {
            out.push(MarkedTime {
                t: base[i],
                anchor: false,
            });
            i += 1;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mean_var(xs: &[f64]) -> (f64, f64) {
        let n = xs.len() as f64;
        let m = xs.iter().sum::<f64>() / n;
        let v = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
        (m, v)
    }

    #[test]
    fn zero_rate_is_empty() {
        let mut rng = RngStream::new(1, 1);
        assert!(sample_poisson_times(0.0, 1.0, &mut rng).unwrap().is_empty());
        assert!(sample_poisson_times(-1.0, 1.0, &mut rng).is_err());
        assert!(sample_poisson_times(1.0, 0.0, &mut rng).is_err());
    }

    #[test]
    fn poisson_count_means() {
        for (seed, mean) in [(1, 0.7), (2, 10.0), (3, 29.5), (4, 30.5), (5, 200.0), (6, 1e5)] {
            let mut rng = RngStream::new(seed, 0);
            let draws: Vec<f64> = (0..100_000)
                .map(|_| sample_poisson_count(mean, &mut rng).unwrap() as f64)
                .collect();
            let (m, v) = mean_var(&draws);
            let se = (mean / draws.len() as f64).sqrt();
            assert!((m - mean).abs() < 4.0 * se, "mean {mean}: {m}");
            // Var of the sample variance ≈ (2λ² + λ)/N for Poisson.
            let var_se = ((2.0 * mean * mean + mean) / draws.len() as f64).sqrt();
            assert!((v - mean).abs() < 4.0 * var_se, "var {mean}: {v}");
        }
    }

    #[test]
    fn poisson_pmf_at_moderate_mean() {
        // PTRS branch: compare empirical P(K = 40) with the pmf at mean 40.
        let mut rng = RngStream::new(17, 0);
        let n = 200_000;
        let hits = (0..n)
            .filter(|_| sample_poisson_count(40.0, &mut rng).unwrap() == 40)
            .count() as f64;
        let p = (-40.0 + 40.0 * 40f64.ln() - ln_gamma(41.0)).exp();
        let se = (p * (1.0 - p) / n as f64).sqrt();
        assert!((hits / n as f64 - p).abs() < 4.0 * se);
    }

    #[test]
    fn times_are_sorted_inside_interval() {
        let mut rng = RngStream::new(2, 0);
        let t = sample_poisson_times(500.0, 2.0, &mut rng).unwrap();
        assert!(t.windows(2).all(|w| w[0] < w[1]));
        assert!(t.iter().all(|&x| x > 0.0 && x <= 2.0));
    }

    #[test]
    fn rain_slices_are_nested() {
        let mut rng = RngStream::new(5, 0);
        for _ in 0..50 {
            let rain = Rain::generate(100.0, &mut rng).unwrap();
            let a = rain.slice(20.0).unwrap();
            let b = rain.slice(60.0).unwrap();
            assert!(a.iter().all(|t| b.binary_search_by(|x| x.total_cmp(t)).is_ok()));
            assert!(a.windows(2).all(|w| w[0] < w[1]));
            assert!(rain.slice(0.0).unwrap().is_empty());
            assert!(rain.slice(100.5).is_err());
        }
    }

    #[test]
    fn rain_slice_count_mean() {
        let mut rng = RngStream::new(6, 0);
        let counts: Vec<f64> = (0..10_000)
            .map(|_| Rain::generate(100.0, &mut rng).unwrap().slice(20.0).unwrap().len() as f64)
            .collect();
        let (m, v) = mean_var(&counts);
        assert!((m - 20.0).abs() < 3.0 * (v / counts.len() as f64).sqrt());
    }

    #[test]
    fn path_variances() {
        let mut rng = RngStream::new(7, 0);
        let mut single = Vec::new();
        let mut incr = Vec::new();
        for _ in 0..100_000 {
            single.push(sample_path(&[1.0], 1, &mut rng).unwrap().position(0)[0]);
            let p = sample_path(&[0.25, 1.0], 2, &mut rng).unwrap();
            incr.push(p.position(1)[1] - p.position(0)[1]);
        }
        let (m1, v1) = mean_var(&single);
        let n = single.len() as f64;
        assert!(m1.abs() < 4.0 * (1.0 / n).sqrt());
        assert!((v1 - 1.0).abs() < 3.0 * (2.0 / n).sqrt());
        let (_, v2) = mean_var(&incr);
        assert!((v2 - 0.75).abs() < 3.0 * 0.75 * (2.0 / n).sqrt());
        assert!(sample_path(&[], 3, &mut rng).unwrap().is_empty());
        assert!(sample_path(&[0.5, 0.4], 1, &mut rng).is_err());
        assert!(sample_path(&[0.0], 1, &mut rng).is_err());
    }

    #[test]
    fn bridge_moments() {
        let mut rng = RngStream::new(8, 0);
        let n = 100_000;
        let mut mid = Vec::with_capacity(n);
        let mut cov = 0.0;
        let mut near_end = Vec::with_capacity(n);
        for _ in 0..n {
            mid.push(sample_bridge_1d(&[0.5], 1.0, &mut rng).unwrap()[0]);
            let w = sample_bridge_1d(&[0.2, 0.8], 1.0, &mut rng).unwrap();
            cov += w[0] * w[1];
            near_end.push(sample_bridge_1d(&[1.0 - 1e-6], 1.0, &mut rng).unwrap()[0]);
        }
        let (_, v) = mean_var(&mid);
        assert!((v - 0.25).abs() < 3.0 * 0.25 * (2.0 / n as f64).sqrt());
        // E[W(0.2)W(0.8)] = 0.04; the product has variance ≈ 0.16·0.16 + 0.04².
        let se = ((0.16f64 * 0.16 + 0.04 * 0.04) / n as f64).sqrt();
        assert!((cov / n as f64 - 0.04).abs() < 3.0 * se);
        let (_, ve) = mean_var(&near_end);
        assert!(ve <= 2e-6);
        assert!(sample_bridge_1d(&[], 1.0, &mut rng).unwrap().is_empty());
        assert!(sample_bridge_1d(&[1.0], 1.0, &mut rng).is_err());
    }

    #[test]
    fn anchor_insertion() {
        let m = condition_insert(&[0.5], &[0.2, 0.8]).unwrap();
        let flat: Vec<(f64, bool)> = m.iter().map(|x| (x.t, x.anchor)).collect();
        assert_eq!(flat, vec![(0.2, true), (0.5, false), (0.8, true)]);
        let m = condition_insert(&[], &[0.3]).unwrap();
        assert_eq!(m, vec![MarkedTime { t: 0.3, anchor: true }]);
        let m = condition_insert(&[0.1, 0.9], &[]).unwrap();
        assert!(m.iter().all(|x| !x.anchor) && m.len() == 2);
        let m = condition_insert(&[0.1, 0.4], &[0.4]).unwrap();
        assert_eq!(m.len(), 2);
        assert!(m[1].anchor);
        assert!(condition_insert(&[1.5], &[]).is_err());
    }

    #[test]
    fn reproducible_streams() {
        let a = sample_poisson_times(50.0, 1.0, &mut RngStream::new(9, 3)).unwrap();
        let b = sample_poisson_times(50.0, 1.0, &mut RngStream::new(9, 3)).unwrap();
        assert_eq!(a, b);
    }
}
