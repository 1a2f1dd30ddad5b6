//! Almost-period search for two-frequency signals.
//!
//! `f(x) = sin(w1 x) + sin(w2 x)` is periodic only when `w1/w2` is
//! rational; for irrational ratios it still admits shifts `t` with
//! `|f(x+t) - f(x)|` uniformly small. The search scans a shift grid for
//! the best such `t`, refines the winning windows at full grid resolution,
//! then polishes with a ternary search.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sampling grid: points `start + i * step` up to and including `end`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub start: f64,
    pub end: f64,
    pub step: f64,
}

impl GridSpec {
    pub fn samples(&self) -> usize {
        ((self.end - self.start) / self.step).floor() as usize + 1
    }

    fn validate(&self) -> Result<()> {
        if !(self.start.is_finite() && self.end.is_finite() && self.step.is_finite()) {
            return Err(Error::Domain("grid bounds must be finite".into()));
        }
        if self.step <= 0.0 {
            return Err(Error::Domain(format!(
                "grid step must be positive, got {}",
                self.step
            )));
        }
        if self.end <= self.start {
            return Err(Error::Domain(format!(
                "grid end {} must exceed start {}",
                self.end, self.start
            )));
        }
        if self.samples() < 1000 {
            return Err(Error::Domain(format!(
                "grid must carry at least 1000 samples, got {}",
                self.samples()
            )));
        }
        Ok(())
    }
}

/// Outcome of one almost-period search.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlmostPeriodReport {
    pub frequencies: (f64, f64),
    pub epsilon: f64,
    pub grid: GridSpec,
    pub samples: usize,
    /// Best shift located; meaningful whether or not it beats epsilon.
    pub shift: f64,
    /// Deviation of the best shift over the full sample set.
    pub max_deviation: f64,
    pub found: bool,
}

/// Largest pointwise discrepancy between the signal and its shift by `t`,
/// over the given sample abscissas.
fn deviation(freq: (f64, f64), xs: &[f64], t: f64) -> f64 {
    let f = |x: f64| (freq.0 * x).sin() + (freq.1 * x).sin();
    xs.iter()
        .map(|&x| (f(x + t) - f(x)).abs())
        .fold(0.0, f64::max)
}

/// Searches grid shifts `t >= max(step, span/2000)` for one making the
/// signal nearly agree with its translate, with deviation measured in the
/// uniform norm over the grid.
pub fn almost_period_search(
    freq: (f64, f64),
    epsilon: f64,
    grid: &GridSpec,
) -> Result<AlmostPeriodReport> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::Domain(format!(
            "epsilon must be positive and finite, got {epsilon}"
        )));
    }
    if !(freq.0.is_finite() && freq.1.is_finite()) || freq.0 == 0.0 || freq.1 == 0.0 {
        return Err(Error::Domain("frequencies must be finite and nonzero".into()));
    }
    grid.validate()?;

    let n = grid.samples();
    let xs: Vec<f64> = (0..n).map(|i| grid.start + i as f64 * grid.step).collect();

    // Trivial shifts are excluded: t must clear one grid step and a fixed
    // fraction of the span, so t = 0 never wins by default.
    let span = grid.end - grid.start;
    let t_min = grid.step.max(span / 2000.0);
    let first_idx = xs
        .iter()
        .position(|&t| t - grid.start >= t_min - 1e-12)
        .unwrap_or(n - 1)
        .max(1);

    // Coarse pass on strided shifts and strided abscissas keeps the scan
    // quadratic in ~2000 rather than in the full sample count.
    let stride = |len: usize| (len + 2499) / 2500;
    let x_stride = stride(n);
    let xs_sub: Vec<f64> = xs.iter().copied().step_by(x_stride).collect();
    let t_stride = stride(n - first_idx);
    let mut coarse: Vec<(usize, f64)> = Vec::new();
    let mut idx = first_idx;
    while idx < n {
        let t = xs[idx] - grid.start;
        coarse.push((idx, deviation(freq, &xs_sub, t)));
        idx += t_stride;
    }
    coarse.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then(a.0.cmp(&b.0)));

    // Refine the best windows at full shift resolution (still on strided
    // abscissas), keeping the overall best.
    let mut best_idx = coarse[0].0;
    let mut best_dev = f64::INFINITY;
    for &(center, _) in coarse.iter().take(6) {
        let lo = center.saturating_sub(t_stride).max(first_idx);
        let hi = (center + t_stride).min(n - 1);
        for i in lo..=hi {
            let t = xs[i] - grid.start;
            let d = deviation(freq, &xs_sub, t);
            if d < best_dev {
                best_dev = d;
                best_idx = i;
            }
        }
    }

    // Ternary polish on the full sample set around the winning shift. The
    // deviation is not unimodal globally but is well-behaved within one
    // grid step of a deep minimum.
    let mut lo = (xs[best_idx] - grid.start) - grid.step;
    let mut hi = (xs[best_idx] - grid.start) + grid.step;
    lo = lo.max(t_min);
    for _ in 0..80 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if deviation(freq, &xs, m1) <= deviation(freq, &xs, m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let polished = (lo + hi) / 2.0;
    let grid_t = xs[best_idx] - grid.start;
    let (shift, max_deviation) = {
        let dp = deviation(freq, &xs, polished);
        let dg = deviation(freq, &xs, grid_t);
        if dp <= dg {
            (polished, dp)
        } else {
            (grid_t, dg)
        }
    };

    Ok(AlmostPeriodReport {
        frequencies: freq,
        epsilon,
        grid: *grid,
        samples: n,
        shift,
        max_deviation,
        found: max_deviation < epsilon,
    })
}
