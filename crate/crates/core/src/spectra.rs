//! Revival spectra: the analytic `S_n(ω)`, windowed transforms of simulated
//! trajectories, and peak positions and widths.
//!
//! Peaks are analysed on `|S|²`. A peak is a grid point strictly above both
//! neighbours; peaks closer than [`MERGE_RADIUS_OVER_GAMMA`]`·γ` are merged,
//! keeping the higher one.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::dynamics::StateTrajectory;
use crate::{Error, Result};

/// Coarsest grid spacing accepted by [`find_peaks`], in units of `γ`.
pub const MAX_SPACING_OVER_GAMMA: f64 = 1.0 / 200.0;
/// Smallest half-width the grid must cover, in units of `γ`.
pub const MIN_HALF_RANGE_OVER_GAMMA: f64 = 20.0;
/// Peaks closer than this (in units of `γ`) are merged.
pub const MERGE_RADIUS_OVER_GAMMA: f64 = 1.0 / 100.0;
/// Fewest samples in a transform window.
pub const MIN_WINDOW_SAMPLES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectrumKind {
    Analytic,
    Windowed,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SpectrumValues {
    Real(Vec<f64>),
    Complex(Vec<Complex64>),
}

/// A spectrum sampled on a frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumGrid {
    pub omegas: Vec<f64>,
    pub values: SpectrumValues,
    /// Revival order, when the spectrum belongs to one.
    pub order: Option<usize>,
    /// Rate `γ` setting the peak-analysis scales.
    pub gamma: Option<f64>,
    pub kind: SpectrumKind,
}

/// `2m + 1` points `-m·d, …, m·d` with `m = round(half_range/d)`.
pub fn symmetric_grid(half_range: f64, spacing: f64) -> Result<Vec<f64>> {
    if !(spacing > 0.0 && spacing.is_finite()) || !(half_range >= 0.0 && half_range.is_finite()) {
        return Err(Error::Format(format!(
            "need spacing > 0 and half range >= 0, got {spacing} and {half_range}"
        )));
    }
    let m = (half_range / spacing).round() as i64;
    Ok((-m..=m).map(|i| i as f64 * spacing).collect())
}

impl SpectrumGrid {
    pub fn len(&self) -> usize {
        self.omegas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omegas.is_empty()
    }

    /// Spacing of the first two grid points.
    pub fn spacing(&self) -> f64 {
        if self.omegas.len() < 2 {
            return f64::INFINITY;
        }
        self.omegas[1] - self.omegas[0]
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = Some(gamma);
        self
    }

    pub fn with_order(mut self, order: usize) -> Self {
        self.order = Some(order);
        self
    }

    /// `|S(ω)|²` per grid point.
    pub fn abs2(&self) -> Vec<f64> {
        match &self.values {
            SpectrumValues::Real(v) => v.iter().map(|x| x * x).collect(),
            SpectrumValues::Complex(v) => v.iter().map(|x| x.norm_sqr()).collect(),
        }
    }

    /// Real part as a new spectrum.
    pub fn real_part(&self) -> SpectrumGrid {
        let values = match &self.values {
            SpectrumValues::Real(v) => v.clone(),
            SpectrumValues::Complex(v) => v.iter().map(|x| x.re).collect(),
        };
        SpectrumGrid {
            values: SpectrumValues::Real(values),
            ..self.clone()
        }
    }

    /// Real values (the real part of complex ones).
    pub fn real_values(&self) -> Vec<f64> {
        match &self.values {
            SpectrumValues::Real(v) => v.clone(),
            SpectrumValues::Complex(v) => v.iter().map(|x| x.re).collect(),
        }
    }

    pub fn complex_values(&self) -> Vec<Complex64> {
        match &self.values {
            SpectrumValues::Real(v) => v.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
            SpectrumValues::Complex(v) => v.clone(),
        }
    }
}

/// `S_n(ω) = Re[(γ/π)(ω - iγ)^{n-1} / (ω + iγ)^{n+1}]`.
pub fn analytic_spectrum(n: usize, omegas: &[f64], gamma: f64) -> Result<SpectrumGrid> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidConfig(format!("rate must be positive, got {gamma}")));
    }
    let values = omegas
        .iter()
        .map(|&w| {
            let minus = Complex64::new(w, -gamma);
            let plus = Complex64::new(w, gamma);
            ((minus / plus).powu(n as u32) / (minus * plus)).re * (gamma / PI)
        })
        .collect();
    Ok(SpectrumGrid {
        omegas: omegas.to_vec(),
        values: SpectrumValues::Real(values),
        order: Some(n),
        gamma: Some(gamma),
        kind: SpectrumKind::Analytic,
    })
}

// Indices of the samples inside [t_lo, t_hi], after checking uniformity.
fn window_indices(trajectory: &StateTrajectory, window: (f64, f64)) -> Result<std::ops::Range<usize>> {
    let times = &trajectory.times;
    let step = trajectory.step;
    if times.is_empty() || !(step > 0.0) {
        return Err(Error::Format("trajectory has no uniform sampling".into()));
    }
    let t0 = times[0];
    for (i, &t) in times.iter().enumerate() {
        if (t - (t0 + i as f64 * step)).abs() > 1e-9 * step.max(t.abs()) {
            return Err(Error::Format(format!("sample {i} at t = {t} breaks the uniform grid")));
        }
    }
    let (t_lo, t_hi) = window;
    let tol = 1e-9 * step;
    if !(t_lo <= t_hi) || t_lo < t0 - tol || t_hi > times[times.len() - 1] + tol {
        return Err(Error::Format(format!(
            "window [{t_lo}, {t_hi}] outside the trajectory [{t0}, {}]",
            times[times.len() - 1]
        )));
    }
    let first = ((t_lo - t0) / step - 1e-9).ceil().max(0.0) as usize;
    let last = (((t_hi - t0) / step + 1e-9).floor() as usize).min(times.len() - 1);
    let count = (last + 1).saturating_sub(first);
    if count < MIN_WINDOW_SAMPLES {
        return Err(Error::DegenerateWindow(count));
    }
    Ok(first..last + 1)
}

/// `(dt/2π) Σ_m c_m a(t_m) e^{iω(t_m - t_first)}` over the samples in the
/// window, with trapezoid end weights `c = 1/2`, by direct summation at
/// every requested `ω`.
///
/// The phase origin is the first sample of the window, so a revival that
/// starts there transforms as if it started at zero.
pub fn windowed_spectrum(
    trajectory: &StateTrajectory,
    window: (f64, f64),
    omegas: &[f64],
) -> Result<SpectrumGrid> {
    let range = window_indices(trajectory, window)?;
    let step = trajectory.step;
    let samples = &trajectory.a[range.clone()];
    let last = samples.len() - 1;
    let values = omegas
        .par_iter()
        .map(|&w| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (m, a) in samples.iter().enumerate() {
                let c = if m == 0 || m == last { 0.5 } else { 1.0 };
                acc += a * Complex64::from_polar(c, w * m as f64 * step);
            }
            acc * (step / (2.0 * PI))
        })
        .collect();
    Ok(SpectrumGrid {
        omegas: omegas.to_vec(),
        values: SpectrumValues::Complex(values),
        order: None,
        gamma: None,
        kind: SpectrumKind::Windowed,
    })
}

/// The same transform on the FFT bins `ω_k = 2πk/(M dt)` of the window,
/// for quick looks; bins are returned in increasing `ω`.
pub fn quick_look_spectrum(trajectory: &StateTrajectory, window: (f64, f64)) -> Result<SpectrumGrid> {
    let range = window_indices(trajectory, window)?;
    let step = trajectory.step;
    let mut buffer: Vec<Complex64> = trajectory.a[range].to_vec();
    let m = buffer.len();
    buffer[0] *= 0.5;
    buffer[m - 1] *= 0.5;
    // The inverse transform carries the e^{+iωt} sign convention.
    FftPlanner::new().plan_fft_inverse(m).process(&mut buffer);
    let half = m as i64 / 2;
    let (omegas, values) = (-half..m as i64 - half)
        .map(|k| {
            let bin = k.rem_euclid(m as i64) as usize;
            (2.0 * PI * k as f64 / (m as f64 * step), buffer[bin] * (step / (2.0 * PI)))
        })
        .unzip();
    Ok(SpectrumGrid {
        omegas,
        values: SpectrumValues::Complex(values),
        order: None,
        gamma: None,
        kind: SpectrumKind::Windowed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub omega: f64,
    pub height: f64,
    /// Full width at half maximum; `None` when a crossing lies off the grid.
    pub fwhm: Option<f64>,
    /// Grid index of the maximum.
    #[serde(skip)]
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeakList {
    pub peaks: Vec<Peak>,
    pub spacing: f64,
    pub merge_radius: f64,
    /// Whether `|S|²` (rather than `S`) was analysed.
    pub magnitude: bool,
}

impl PeakList {
    pub fn count(&self) -> usize {
        self.peaks.len()
    }

    /// Highest peak; the one nearest `ω = 0` on ties.
    pub fn dominant(&self) -> Option<&Peak> {
        self.peaks.iter().max_by(|a, b| {
            a.height
                .total_cmp(&b.height)
                .then(b.omega.abs().total_cmp(&a.omega.abs()))
        })
    }
}

fn resolution_check(spectrum: &SpectrumGrid) -> Result<f64> {
    let gamma = spectrum
        .gamma
        .ok_or_else(|| Error::Resolution("spectrum carries no rate to set the resolution".into()))?;
    let spacing = spectrum.spacing();
    let max_spacing = MAX_SPACING_OVER_GAMMA * gamma;
    if spacing > max_spacing * (1.0 + 1e-9) {
        return Err(Error::Resolution(format!(
            "grid spacing {spacing:e} above gamma/200 = {max_spacing:e}"
        )));
    }
    let need = MIN_HALF_RANGE_OVER_GAMMA * gamma * (1.0 - 1e-9);
    let (lo, hi) = (spectrum.omegas[0], spectrum.omegas[spectrum.len() - 1]);
    if lo > -need || hi < need {
        return Err(Error::Resolution(format!(
            "grid [{lo:e}, {hi:e}] does not cover +-20 gamma = {:e}",
            20.0 * gamma
        )));
    }
    Ok(gamma)
}

/// Local maxima of `|S|²` (`magnitude`) or of the real part of `S`.
pub fn find_peaks(spectrum: &SpectrumGrid, magnitude: bool) -> Result<PeakList> {
    let gamma = resolution_check(spectrum)?;
    let target = if magnitude { spectrum.abs2() } else { spectrum.real_values() };
    let merge_radius = MERGE_RADIUS_OVER_GAMMA * gamma;

    let mut kept: Vec<usize> = Vec::new();
    for i in 1..target.len() - 1 {
        if !(target[i] > target[i - 1] && target[i] > target[i + 1]) {
            continue;
        }
        match kept.last_mut() {
            Some(prev) if spectrum.omegas[i] - spectrum.omegas[*prev] < merge_radius => {
                if target[i] > target[*prev] {
                    *prev = i;
                }
            }
            _ => kept.push(i),
        }
    }
    let peaks = kept
        .into_iter()
        .map(|i| Peak {
            omega: spectrum.omegas[i],
            height: target[i],
            fwhm: half_max_width(&spectrum.omegas, &target, i).ok(),
            index: i,
        })
        .collect();
    Ok(PeakList {
        peaks,
        spacing: spectrum.spacing(),
        merge_radius,
        magnitude,
    })
}

/// FWHM of `|S|²` around the grid point `index`, from linearly interpolated
/// half-maximum crossings.
pub fn peak_fwhm(spectrum: &SpectrumGrid, index: usize) -> Result<f64> {
    if index >= spectrum.len() {
        return Err(Error::Range(index));
    }
    half_max_width(&spectrum.omegas, &spectrum.abs2(), index)
}

fn half_max_width(omegas: &[f64], target: &[f64], index: usize) -> Result<f64> {
    let half = 0.5 * target[index];
    let crossing = |a: usize, b: usize| {
        let t = (target[a] - half) / (target[a] - target[b]);
        omegas[a] + t * (omegas[b] - omegas[a])
    };
    let mut left = None;
    for j in (0..index).rev() {
        if target[j] < half {
            left = Some(crossing(j + 1, j));
            break;
        }
    }
    let mut right = None;
    for j in index + 1..target.len() {
        if target[j] < half {
            right = Some(crossing(j - 1, j));
            break;
        }
    }
    match (left, right) {
        (Some(l), Some(r)) => Ok(r - l),
        _ => Err(Error::Range(index)),
    }
}

/// Least-squares fit of `y = c·x^p` in log–log space; returns `(p, c)`.
pub fn fit_power_law(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::Format("power-law fit needs at least two paired points".into()));
    }
    if xs.iter().chain(ys).any(|&v| !(v > 0.0)) {
        return Err(Error::Format("power-law fit needs positive data".into()));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    let p = sxy / sxx;
    Ok((p, (my - p * mx).exp()))
}
