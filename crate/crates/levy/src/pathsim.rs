//! Path simulation on uniform time grids, with deterministic parallel
//! batch generation.
//!
//! Determinism contract: path `k` of a batch always consumes RNG stream
//! `k` of the given seed, so results are bitwise identical for any thread
//! count and for repeated runs.

use crate::error::LevyError;
use crate::models::{IncrementSampler, Measure, ModelSpec};
use crate::rng::RngStream;
use crate::Result;
use rayon::prelude::*;

/// A uniform grid `0, h, 2h, ..., t_end` with `h = t_end / steps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathGrid {
    t_end: f64,
    steps: usize,
}

impl PathGrid {
    pub fn new(t_end: f64, steps: usize) -> Result<PathGrid> {
        if !t_end.is_finite() || t_end <= 0.0 {
            return Err(LevyError::Domain(format!(
                "PathGrid requires t_end > 0, got {t_end}"
            )));
        }
        if steps == 0 {
            return Err(LevyError::Domain(
                "PathGrid requires at least one step".to_string(),
            ));
        }
        Ok(PathGrid { t_end, steps })
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// The uniform step size.
    pub fn step(&self) -> f64 {
        self.t_end / self.steps as f64
    }

    /// All grid times, including both endpoints.
    pub fn times(&self) -> Vec<f64> {
        (0..=self.steps)
            .map(|i| i as f64 * self.t_end / self.steps as f64)
            .collect()
    }
}

/// One simulated path on a [`PathGrid`]. Process paths start at 0; asset
/// paths start at the spot price.
#[derive(Debug, Clone)]
pub struct SamplePath {
    pub grid: PathGrid,
    pub values: Vec<f64>,
    /// RNG stream that produced this path (its index within a batch).
    pub stream_id: u64,
}

fn path_from_sampler(
    sampler: &IncrementSampler,
    grid: &PathGrid,
    seed: u64,
    stream_id: u64,
) -> Result<SamplePath> {
    let mut stream = RngStream::new(seed, stream_id);
    let mut values = Vec::with_capacity(grid.steps() + 1);
    values.push(0.0);
    let mut acc = 0.0;
    for _ in 0..grid.steps() {
        acc += sampler.draw(&mut stream)?;
        values.push(acc);
    }
    Ok(SamplePath {
        grid: *grid,
        values,
        stream_id,
    })
}

/// Simulates a single process path `L_0 = 0, L_h, ..., L_{t_end}`.
pub fn simulate_path(
    spec: &ModelSpec,
    grid: &PathGrid,
    seed: u64,
    stream_id: u64,
) -> Result<SamplePath> {
    let sampler = spec.increment_sampler(grid.step())?;
    path_from_sampler(&sampler, grid, seed, stream_id)
}

/// Simulates `n_paths` independent process paths in parallel; path `k`
/// uses stream `k`.
pub fn simulate_batch(
    spec: &ModelSpec,
    grid: &PathGrid,
    seed: u64,
    n_paths: usize,
) -> Result<Vec<SamplePath>> {
    let sampler = spec.increment_sampler(grid.step())?;
    (0..n_paths)
        .into_par_iter()
        .map(|k| path_from_sampler(&sampler, grid, seed, k as u64))
        .collect()
}

fn resolve_drift(spec: &ModelSpec, measure: Measure) -> Result<f64> {
    match measure {
        Measure::Physical => Ok(0.0),
        Measure::RiskNeutral { rate } => spec.mean_correction(rate),
    }
}

fn into_asset(mut path: SamplePath, s0: f64, omega: f64) -> SamplePath {
    let h = path.grid.step();
    for (i, v) in path.values.iter_mut().enumerate() {
        *v = s0 * (omega * (i as f64 * h) + *v).exp();
    }
    path
}

fn check_spot(s0: f64) -> Result<()> {
    if !s0.is_finite() || s0 <= 0.0 {
        return Err(LevyError::Domain(format!(
            "asset paths require a positive spot price, got {s0}"
        )));
    }
    Ok(())
}

/// Simulates one asset path `S_t = s0 exp(omega t + L_t)`, where `omega`
/// is zero under the physical measure and the martingale correction under
/// the risk-neutral measure.
pub fn asset_path(
    spec: &ModelSpec,
    grid: &PathGrid,
    s0: f64,
    measure: Measure,
    seed: u64,
    stream_id: u64,
) -> Result<SamplePath> {
    check_spot(s0)?;
    let omega = resolve_drift(spec, measure)?;
    Ok(into_asset(simulate_path(spec, grid, seed, stream_id)?, s0, omega))
}

/// Simulates a batch of asset paths; see [`asset_path`].
pub fn asset_batch(
    spec: &ModelSpec,
    grid: &PathGrid,
    s0: f64,
    measure: Measure,
    seed: u64,
    n_paths: usize,
) -> Result<Vec<SamplePath>> {
    check_spot(s0)?;
    let omega = resolve_drift(spec, measure)?;
    Ok(simulate_batch(spec, grid, seed, n_paths)?
        .into_iter()
        .map(|p| into_asset(p, s0, omega))
        .collect())
}
