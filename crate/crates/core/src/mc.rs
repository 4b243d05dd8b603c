//! Monte Carlo oracle: the Cauchy process simulated on a time grid, killed
//! when a monitored position falls to or below 0.
//!
//! Random streams come from ChaCha8 (`rand_chacha::ChaCha8Rng`): batch `b` of a
//! run with seed `s` uses the generator seeded by `seed_from_u64(s)` with
//! stream number `b`. Results depend only on (seed, paths, dt) and the fixed
//! batch size, not on the number of threads.

use std::f64::consts::PI;

use rand::distributions::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Paths per independent random stream.
pub const BATCH_SIZE: u64 = 1024;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McConfig {
    pub paths: u64,
    pub dt: f64,
    pub horizon: f64,
    pub seed: u64,
}

impl McConfig {
    pub fn validate(&self) -> Result<()> {
        if self.paths == 0 {
            return Err(Error::InvalidArgument("paths must be at least 1".into()));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidArgument(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.horizon.is_finite() && self.dt <= self.horizon) {
            return Err(Error::InvalidArgument(format!("need dt ≤ horizon, got dt={} horizon={}", self.dt, self.horizon)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub value: f64,
    pub std_error: f64,
    pub paths_used: u64,
}

impl McEstimate {
    fn from_count(survivors: u64, paths: u64) -> Self {
        let p = survivors as f64 / paths as f64;
        McEstimate { value: p, std_error: (p * (1.0 - p) / paths as f64).sqrt(), paths_used: paths }
    }
}

/// One draw from the Cauchy law with density scale/(π(scale² + y²)).
pub fn sample_cauchy_increment<R: Rng + ?Sized>(scale: f64, rng: &mut R) -> f64 {
    let u: f64 = rng.sample(Open01);
    scale * (PI * (u - 0.5)).tan()
}

fn batch_rng(seed: u64, batch: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(batch);
    rng
}

/// Simulates `paths` paths from x on `steps` steps of length `dt` and returns,
/// for each monitor, the number of paths it saw alive.
///
/// A monitor is (stride, last_step): the path is checked every `stride` steps
/// up to `last_step`, and counted if it stayed positive at those times.
fn simulate(x: f64, dt: f64, steps: u64, monitors: &[(u64, u64)], paths: u64, seed: u64) -> Vec<u64> {
    let batches = paths.div_ceil(BATCH_SIZE);
    let per_batch: Vec<Vec<u64>> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = batch_rng(seed, b);
            let n = BATCH_SIZE.min(paths - b * BATCH_SIZE);
            let mut counts = vec![0u64; monitors.len()];
            let mut dead_at = vec![u64::MAX; monitors.len()];
            for _ in 0..n {
                let mut pos = x;
                dead_at.iter_mut().for_each(|d| *d = u64::MAX);
                for step in 1..=steps {
                    pos += sample_cauchy_increment(dt, &mut rng);
                    if pos <= 0.0 {
                        for (k, &(stride, _)) in monitors.iter().enumerate() {
                            if dead_at[k] == u64::MAX && step % stride == 0 {
                                dead_at[k] = step;
                            }
                        }
                    }
                }
                for (k, &(_, last)) in monitors.iter().enumerate() {
                    if dead_at[k] > last {
                        counts[k] += 1;
                    }
                }
            }
            counts
        })
        .collect();
    let mut total = vec![0u64; monitors.len()];
    for c in per_batch {
        total.iter_mut().zip(c).for_each(|(t, v)| *t += v);
    }
    total
}

fn steps_for(t: f64, dt: f64) -> u64 {
    ((t / dt).round() as u64).max(1)
}

fn check_point(x: f64, t: f64) -> Result<()> {
    if !(x > 0.0 && x.is_finite() && t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!("need x > 0 and t > 0, got x={x}, t={t}")));
    }
    Ok(())
}

/// Fraction of paths from x that stay positive at every grid time up to t.
///
/// The grid has round(t/dt) equal steps. Discrete monitoring misses
/// excursions below 0 between grid times, so the estimate is biased upward.
pub fn estimate_survival(x: f64, t: f64, cfg: &McConfig) -> Result<McEstimate> {
    cfg.validate()?;
    check_point(x, t)?;
    let steps = steps_for(t, cfg.dt);
    let alive = simulate(x, t / steps as f64, steps, &[(1, steps)], cfg.paths, cfg.seed);
    Ok(McEstimate::from_count(alive[0], cfg.paths))
}

/// Survival at several times from one set of paths run to `cfg.horizon`.
/// Times are rounded to the grid; the estimates are non-increasing in t.
pub fn survival_curve(x: f64, times: &[f64], cfg: &McConfig) -> Result<Vec<McEstimate>> {
    cfg.validate()?;
    for &t in times {
        check_point(x, t)?;
        if t > cfg.horizon {
            return Err(Error::InvalidArgument(format!("time {t} beyond horizon {}", cfg.horizon)));
        }
    }
    let steps = steps_for(cfg.horizon, cfg.dt);
    let h = cfg.horizon / steps as f64;
    let monitors: Vec<(u64, u64)> = times.iter().map(|&t| (1, ((t / h).round() as u64).max(1))).collect();
    let alive = simulate(x, h, steps, &monitors, cfg.paths, cfg.seed);
    Ok(alive.into_iter().map(|a| McEstimate::from_count(a, cfg.paths)).collect())
}

/// Survival to t monitored at each step size in `dts`, all on the same paths.
///
/// Paths are simulated at the smallest step; every other step size must be an
/// integer multiple of it, and coarser monitoring reads the same positions
/// at fewer times (so the estimates are ordered pathwise).
pub fn refinement_study(x: f64, t: f64, dts: &[f64], paths: u64, seed: u64) -> Result<Vec<McEstimate>> {
    check_point(x, t)?;
    let finest = dts.iter().copied().fold(f64::INFINITY, f64::min);
    let cfg = McConfig { paths, dt: finest, horizon: t, seed };
    cfg.validate()?;
    let steps = steps_for(t, finest);
    let mut monitors = Vec::with_capacity(dts.len());
    for &dt in dts {
        let ratio = dt / finest;
        let stride = ratio.round() as u64;
        if stride == 0 || (ratio - stride as f64).abs() > 1e-9 * ratio || steps % stride != 0 {
            return Err(Error::InvalidArgument(format!("dt {dt} is not a multiple of {finest} dividing the run")));
        }
        monitors.push((stride, steps));
    }
    let alive = simulate(x, t / steps as f64, steps, &monitors, paths, seed);
    Ok(alive.into_iter().map(|a| McEstimate::from_count(a, paths)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(paths: u64, dt: f64, seed: u64) -> McConfig {
        McConfig { paths, dt, horizon: 1.0, seed }
    }

    #[test]
    fn increments_have_cauchy_quantiles() {
        let mut rng = batch_rng(11, 0);
        let n = 100_000;
        let mut v: Vec<f64> = (0..n).map(|_| sample_cauchy_increment(2.0, &mut rng)).collect();
        v.sort_by(f64::total_cmp);
        let median = v[n / 2];
        let iqr = v[3 * n / 4] - v[n / 4];
        assert!(median.abs() <= 3.0 * iqr / (n as f64).sqrt(), "{median}");
        let inside = v.iter().filter(|x| x.abs() <= 2.0).count() as f64 / n as f64;
        assert!((inside - 0.5).abs() <= 3.0 * (0.25 / n as f64).sqrt(), "{inside}");
    }

    #[test]
    fn deterministic_streams() {
        let a = estimate_survival(1.0, 0.5, &cfg(3000, 0.01, 5)).unwrap();
        let b = estimate_survival(1.0, 0.5, &cfg(3000, 0.01, 5)).unwrap();
        assert_eq!(a, b);
        let c = estimate_survival(1.0, 0.5, &cfg(3000, 0.01, 6)).unwrap();
        assert_ne!(a.value, c.value);
    }

    #[test]
    fn short_times_survive() {
        let e = estimate_survival(1.0, 1e-4, &McConfig { paths: 2000, dt: 1e-5, horizon: 1.0, seed: 1 }).unwrap();
        assert!(e.value > 0.999);
    }

    #[test]
    fn scaling() {
        let a = estimate_survival(2.0, 1.0, &cfg(20_000, 0.02, 2)).unwrap();
        let b = estimate_survival(1.0, 0.5, &cfg(20_000, 0.01, 3)).unwrap();
        let joint = (a.std_error.powi(2) + b.std_error.powi(2)).sqrt();
        assert!((a.value - b.value).abs() <= 3.0 * joint, "{a:?} {b:?}");
    }

    #[test]
    fn curve_is_monotone() {
        let c = survival_curve(1.0, &[0.1, 0.3, 0.6, 1.0], &cfg(5000, 0.01, 9)).unwrap();
        assert!(c.windows(2).all(|w| w[0].value >= w[1].value));
    }

    #[test]
    fn coarser_monitoring_never_lower() {
        let s = refinement_study(1.0, 1.0, &[0.04, 0.02, 0.01], 5000, 4).unwrap();
        assert!(s[0].value >= s[1].value && s[1].value >= s[2].value);
        assert!(refinement_study(1.0, 1.0, &[0.015, 0.01], 100, 4).is_err());
    }

    #[test]
    fn rejects_invalid_config() {
        assert!(cfg(0, 0.1, 0).validate().is_err());
        assert!(McConfig { paths: 1, dt: 2.0, horizon: 1.0, seed: 0 }.validate().is_err());
        assert!(estimate_survival(-1.0, 1.0, &cfg(1, 0.1, 0)).is_err());
    }
}
