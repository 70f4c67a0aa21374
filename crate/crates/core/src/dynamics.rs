//! Time evolution of the oscillator and reservoir amplitudes from
//! `a(0) = 1`, `b_j(0) = 0`.
//!
//! [`evolve_eigenbasis`] is exact in time: `a(t) = Σ_k h²_{ak} e^{-iω̃_k t}`.
//! [`evolve_rk4`] integrates the equations of motion directly and serves as
//! an independent oracle.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eigen::{decompose_finite, decompose_infinite, EigenDecomposition};
use crate::model::{build_matrix, SystemConfig};
use crate::ode::{rk4_step, Rk4Workspace};
use crate::{Error, Result};

/// Largest `dt·ω_max` accepted by [`evolve_rk4`].
pub const RK4_STABILITY_PRODUCT: f64 = 0.05;

/// Weight sum below which a truncated mode sum is flagged.
pub const MIN_WEIGHT_SUM: f64 = 0.99;

/// Uniform sampling grid `t_i = start + i·step`, `i < len`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub start: f64,
    pub step: f64,
    pub len: usize,
}

impl TimeGrid {
    pub fn new(start: f64, step: f64, len: usize) -> Result<Self> {
        if !(start >= 0.0 && start.is_finite()) {
            return Err(Error::Format(format!("grid start {start} must be non-negative")));
        }
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::Format(format!("grid step {step} must be positive")));
        }
        if len == 0 {
            return Err(Error::Format("empty time grid".into()));
        }
        Ok(TimeGrid { start, step, len })
    }

    /// `[0, t_max]` sampled `samples_per_period` times per `period`.
    pub fn covering(t_max: f64, period: f64, samples_per_period: usize) -> Result<Self> {
        if samples_per_period == 0 {
            return Err(Error::Format("need at least one sample per period".into()));
        }
        let step = period / samples_per_period as f64;
        let len = (t_max / step + 1e-9).floor() as usize + 1;
        TimeGrid::new(0.0, step, len)
    }

    pub fn time(&self, i: usize) -> f64 {
        self.start + i as f64 * self.step
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len).map(|i| self.time(i)).collect()
    }

    pub fn end(&self) -> f64 {
        self.time(self.len - 1)
    }
}

/// Which eigenmode set drives [`evolve_eigenbasis`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectralModel {
    /// All `N + 2` modes of the finite system.
    Finite,
    /// Infinite reservoir truncated to `|k| ≤ k_max`.
    InfiniteTruncated { k_max: i64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EvolutionMethod {
    Eigenbasis,
    Rk4,
}

/// Sampled oscillator amplitude, optionally with the reservoir amplitudes.
#[derive(Debug, Clone)]
pub struct StateTrajectory {
    pub times: Vec<f64>,
    pub step: f64,
    pub a: Vec<Complex64>,
    /// `reservoir[i][j + N/2]` is `b_j(t_i)`.
    pub reservoir: Option<Vec<Vec<Complex64>>>,
    /// `|a|² + Σ_j |b_j|²`, when the reservoir state is known.
    pub norm: Option<Vec<f64>>,
    pub method: EvolutionMethod,
    /// RK4 step actually used.
    pub integration_step: Option<f64>,
    /// `Σ_k h²_{ak}` of the modes used (eigenbasis only).
    pub weight_sum: Option<f64>,
    pub warnings: Vec<String>,
}

impl StateTrajectory {
    pub fn abs2(&self) -> Vec<f64> {
        self.a.iter().map(|a| a.norm_sqr()).collect()
    }
}

/// Stability bound `0.05 / ω_max`, `ω_max = |ω₀| + (N/2)δω + g·sqrt(N + 1)`.
pub fn max_rk4_step(config: &SystemConfig) -> f64 {
    let omega_max = config.carrier().abs()
        + config.half_width() as f64 * config.delta_omega
        + config.coupling * (config.n_modes as f64).sqrt();
    RK4_STABILITY_PRODUCT / omega_max
}

/// Propagate in the eigenbasis.
///
/// Reservoir amplitudes need the full eigenvectors and are only available
/// with [`SpectralModel::Finite`]; they cost `O(N²)` per sample.
pub fn evolve_eigenbasis(
    config: &SystemConfig,
    grid: &TimeGrid,
    model: SpectralModel,
    store_reservoir: bool,
) -> Result<StateTrajectory> {
    config.validate()?;
    let decomposition = match model {
        SpectralModel::Finite => decompose_finite(config)?,
        SpectralModel::InfiniteTruncated { k_max } => {
            if store_reservoir {
                return Err(Error::Unavailable("reservoir amplitudes of the infinite reservoir"));
            }
            decompose_infinite(config, k_max)?
        }
    };
    Ok(propagate(config, &decomposition, grid, store_reservoir))
}

/// Propagate with a precomputed decomposition (finite-reservoir modes when
/// `store_reservoir` is set).
pub fn propagate(
    config: &SystemConfig,
    decomposition: &EigenDecomposition,
    grid: &TimeGrid,
    store_reservoir: bool,
) -> StateTrajectory {
    let modes = &decomposition.modes;
    let dw = config.delta_omega;
    let carrier = config.carrier();
    let detunings: Vec<f64> = modes.iter().map(|m| m.detuning(dw)).collect();
    let weight_sum = decomposition.weight_sum();
    let mut warnings = Vec::new();
    if weight_sum < MIN_WEIGHT_SUM {
        warnings.push(format!(
            "mode weights sum to {weight_sum:.6} < {MIN_WEIGHT_SUM}; increase the truncation"
        ));
    }

    let samples: Vec<(Complex64, Option<Vec<Complex64>>)> = (0..grid.len)
        .into_par_iter()
        .map(|i| {
            let t = grid.time(i);
            let carrier_phase = Complex64::from_polar(1.0, -carrier * t);
            let terms: Vec<Complex64> = modes
                .iter()
                .zip(&detunings)
                .map(|(m, &d)| Complex64::from_polar(m.weight, -d * t))
                .collect();
            let a = terms.iter().sum::<Complex64>() * carrier_phase;
            let b = store_reservoir.then(|| {
                let half = config.half_width();
                let g = config.coupling;
                (-half..=half)
                    .map(|j| {
                        let s: Complex64 = modes
                            .iter()
                            .zip(&terms)
                            .map(|(m, term)| term / (m.alpha + (m.k - j) as f64 * dw))
                            .sum();
                        s * g * carrier_phase
                    })
                    .collect()
            });
            (a, b)
        })
        .collect();

    let mut a = Vec::with_capacity(grid.len);
    let mut reservoir = store_reservoir.then(|| Vec::with_capacity(grid.len));
    for (ai, bi) in samples {
        a.push(ai);
        if let (Some(res), Some(b)) = (reservoir.as_mut(), bi) {
            res.push(b);
        }
    }
    let norm = reservoir.as_ref().map(|res| norms(&a, res));
    StateTrajectory {
        times: grid.times(),
        step: grid.step,
        a,
        reservoir,
        norm,
        method: EvolutionMethod::Eigenbasis,
        integration_step: None,
        weight_sum: Some(weight_sum),
        warnings,
    }
}

fn norms(a: &[Complex64], reservoir: &[Vec<Complex64>]) -> Vec<f64> {
    a.iter()
        .zip(reservoir)
        .map(|(a, b)| a.norm_sqr() + b.iter().map(|x| x.norm_sqr()).sum::<f64>())
        .collect()
}

/// Classical RK4 on the `(N + 2)`-dimensional linear system.
///
/// Each grid interval is split into equal sub-steps no longer than `dt`
/// (default: the stability bound), so samples land exactly on the grid.
pub fn evolve_rk4(
    config: &SystemConfig,
    grid: &TimeGrid,
    dt: Option<f64>,
    store_reservoir: bool,
) -> Result<StateTrajectory> {
    let matrix = build_matrix(config)?;
    let bound = max_rk4_step(config);
    let dt = dt.unwrap_or(bound);
    if !(dt > 0.0) || dt > bound * (1.0 + 1e-12) {
        return Err(Error::StepSize { dt, bound });
    }
    let substeps = |span: f64| ((span / dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
    let grid_substeps = substeps(grid.step);
    let h = grid.step / grid_substeps as f64;

    let dim = matrix.dimension();
    let mut y = vec![Complex64::new(0.0, 0.0); dim];
    y[0] = Complex64::new(1.0, 0.0);
    let mut ws = Rk4Workspace::new(dim);
    let rhs = |x: &[Complex64], out: &mut [Complex64]| matrix.apply_generator(x, out);

    if grid.start > 0.0 {
        let n = substeps(grid.start);
        let h0 = grid.start / n as f64;
        for _ in 0..n {
            rk4_step(&rhs, &mut y, h0, &mut ws);
        }
    }

    let mut a = Vec::with_capacity(grid.len);
    let mut norm = Vec::with_capacity(grid.len);
    let mut reservoir = store_reservoir.then(|| Vec::with_capacity(grid.len));
    for i in 0..grid.len {
        if i > 0 {
            for _ in 0..grid_substeps {
                rk4_step(&rhs, &mut y, h, &mut ws);
            }
        }
        a.push(y[0]);
        norm.push(y.iter().map(|x| x.norm_sqr()).sum());
        if let Some(res) = reservoir.as_mut() {
            res.push(y[1..].to_vec());
        }
    }
    Ok(StateTrajectory {
        times: grid.times(),
        step: grid.step,
        a,
        reservoir,
        norm: Some(norm),
        method: EvolutionMethod::Rk4,
        integration_step: Some(h),
        weight_sum: None,
        warnings: Vec::new(),
    })
}

/// `|a|² + Σ_j |b_j|²` per sample; needs stored reservoir amplitudes.
pub fn total_norm(trajectory: &StateTrajectory) -> Result<Vec<f64>> {
    let reservoir = trajectory
        .reservoir
        .as_ref()
        .ok_or(Error::Unavailable("the reservoir state (storage disabled)"))?;
    Ok(norms(&trajectory.a, reservoir))
}
