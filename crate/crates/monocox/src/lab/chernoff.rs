//! Sampler for the limit law of the scaled estimators: the location of the
//! minimum of two-sided Brownian motion plus a parabola.

use super::{map_indexed, map_indexed_seq, LabError, CHERNOFF_STREAM};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

/// Empirical distribution of `argmin_t { W(t) + t^2 }` over a finite grid.
#[derive(Debug, Clone, Serialize)]
pub struct ChernoffSample {
    pub draws: Vec<f64>,
    pub grid_halfwidth: f64,
    pub step: f64,
    pub seed: u64,
}

impl ChernoffSample {
    /// NaN when there are no draws.
    pub fn mean(&self) -> f64 {
        if self.draws.is_empty() {
            return f64::NAN;
        }
        self.draws.iter().sum::<f64>() / self.draws.len() as f64
    }

    /// Sample standard deviation; NaN with fewer than two draws.
    pub fn sd(&self) -> f64 {
        if self.draws.len() < 2 {
            return f64::NAN;
        }
        let m = self.mean();
        let var = self.draws.iter().map(|d| (d - m) * (d - m)).sum::<f64>()
            / (self.draws.len() - 1) as f64;
        var.sqrt()
    }
}

/// Draw `reps` independent argmin locations of `W(t) + t^2` on the grid
/// `{-L, -L+h, ..., L}`, where `W` is a discretized two-sided Brownian
/// motion anchored at `W(0) = 0`. Ties resolve to the largest minimizer.
///
/// The quadratic drift makes mass outside `|t| > 2` negligible, hence the
/// `L >= 2` requirement; `h <= 0.01` keeps the discretization bias below
/// Monte Carlo resolution at typical replicate counts.
pub fn chernoff_sample(
    grid_halfwidth: f64,
    step: f64,
    reps: usize,
    seed: u64,
) -> Result<ChernoffSample, LabError> {
    chernoff_with(grid_halfwidth, step, reps, seed, false)
}

/// Sequential twin of [`chernoff_sample`]; bitwise-identical output.
pub fn chernoff_sample_sequential(
    grid_halfwidth: f64,
    step: f64,
    reps: usize,
    seed: u64,
) -> Result<ChernoffSample, LabError> {
    chernoff_with(grid_halfwidth, step, reps, seed, true)
}

fn chernoff_with(
    grid_halfwidth: f64,
    step: f64,
    reps: usize,
    seed: u64,
    force_sequential: bool,
) -> Result<ChernoffSample, LabError> {
    if !(grid_halfwidth >= 2.0 && grid_halfwidth.is_finite()) {
        return Err(LabError::InvalidGrid("grid halfwidth must be at least 2".into()));
    }
    if !(step > 0.0 && step <= 0.01) {
        return Err(LabError::InvalidGrid("step must be in (0, 0.01]".into()));
    }
    let m = (grid_halfwidth / step).round() as usize;
    let draw_one = |rep: usize| -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(CHERNOFF_STREAM | rep as u64);
        let sqrt_h = step.sqrt();
        // Right branch first, then the left branch, each a fresh walk from 0.
        let mut right = Vec::with_capacity(m);
        let mut w = 0.0;
        for i in 1..=m {
            let g: f64 = StandardNormal.sample(&mut rng);
            w += sqrt_h * g;
            let t = i as f64 * step;
            right.push(w + t * t);
        }
        let mut left = Vec::with_capacity(m);
        w = 0.0;
        for i in 1..=m {
            let g: f64 = StandardNormal.sample(&mut rng);
            w += sqrt_h * g;
            let t = -(i as f64) * step;
            left.push(w + t * t);
        }
        // Scan ascending in t; `<=` keeps the supremum of the minimizers.
        let mut best_val = f64::INFINITY;
        let mut best_t = -grid_halfwidth;
        for i in (1..=m).rev() {
            let v = left[i - 1];
            if v <= best_val {
                best_val = v;
                best_t = -(i as f64) * step;
            }
        }
        if 0.0 <= best_val {
            best_val = 0.0;
            best_t = 0.0;
        }
        for i in 1..=m {
            let v = right[i - 1];
            if v <= best_val {
                best_val = v;
                best_t = i as f64 * step;
            }
        }
        best_t
    };
    let draws = if force_sequential {
        map_indexed_seq(reps, draw_one)
    } else {
        map_indexed(reps, draw_one)
    };
    Ok(ChernoffSample { draws, grid_halfwidth, step, seed })
}
