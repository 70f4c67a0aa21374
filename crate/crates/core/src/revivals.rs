//! Revival amplitudes `a_n(t) = e^{-γt} L_n^{(-1)}(2γt)` and the
//! exceptional-point cascade they obey.
//!
//! Three routes to `a_n` are kept separate so they can check each other:
//! the Laguerre recurrence ([`revival_amplitude`]), the chain recurrence
//! between successive revivals ([`revival_recurrence`]) and a contour-free
//! quadrature of the spectral integral ([`revival_quadrature`]).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::model::SystemConfig;
use crate::ode::{rk4_step, Rk4Workspace};
use crate::quadrature::{integrate_real_line, GaussLegendre};
use crate::{Error, Result};

/// Largest revival order accepted by [`revival_quadrature`].
pub const QUADRATURE_MAX_ORDER: usize = 5;
/// Largest `γt` accepted by [`revival_quadrature`].
pub const QUADRATURE_MAX_GAMMA_T: f64 = 5.0;

/// `L_0^{(-1)}(x), …, L_n^{(-1)}(x)` from
/// `(k + 1) L_{k+1} = (2k - x) L_k - (k - 1) L_{k-1}`, `L_0 = 1`, `L_1 = -x`.
pub fn laguerre_gen_all(n: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(1.0);
    if n == 0 {
        return out;
    }
    out.push(-x);
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf - x) * out[k] - (kf - 1.0) * out[k - 1]) / (kf + 1.0);
        out.push(next);
    }
    out
}

/// Generalized Laguerre polynomial `L_n^{(-1)}(x)`.
pub fn laguerre_gen(n: usize, x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, -x);
    if n == 0 {
        return prev;
    }
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf - x) * cur - (kf - 1.0) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `d/dx L_n^{(-1)}(x) = -L_{n-1}^{(0)}(x)`, with the ordinary Laguerre
/// polynomial from `(k + 1) L_{k+1} = (2k + 1 - x) L_k - k L_{k-1}`.
pub fn laguerre_gen_derivative(n: usize, x: f64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let m = n - 1;
    let (mut prev, mut cur) = (1.0, 1.0 - x);
    if m == 0 {
        return -prev;
    }
    for k in 1..m {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 - x) * cur - kf * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    -cur
}

/// `a_n(t) = e^{-γt} L_n^{(-1)}(2γt)`.
pub fn revival_amplitude(n: usize, t: f64, gamma: f64) -> f64 {
    (-gamma * t).exp() * laguerre_gen(n, 2.0 * gamma * t)
}

/// `a_0(t), …, a_n(t)` from the chain recurrence
/// `a_k = ((k - 1)/k) a_{k-1} - (2γt/k) Σ_{j<k} a_j`, `a_0 = e^{-γt}`.
pub fn revival_recurrence_all(n: usize, t: f64, gamma: f64) -> Vec<f64> {
    let s = 2.0 * gamma * t;
    let mut out = Vec::with_capacity(n + 1);
    out.push((-gamma * t).exp());
    let mut partial = out[0];
    for k in 1..=n {
        let kf = k as f64;
        let next = (kf - 1.0) / kf * out[k - 1] - s / kf * partial;
        partial += next;
        out.push(next);
    }
    out
}

/// `a_n(t)` from the chain recurrence; does not touch the Laguerre code.
pub fn revival_recurrence(n: usize, t: f64, gamma: f64) -> f64 {
    revival_recurrence_all(n, t, gamma)[n]
}

// (γ/π)(ω - iγ)^{n-1} / (ω + iγ)^{n+1}
fn spectral_integrand(n: usize, omega: f64, gamma: f64) -> Complex64 {
    let minus = Complex64::new(omega, -gamma);
    let plus = Complex64::new(omega, gamma);
    let ratio = minus / plus;
    ratio.powu(n as u32) / (minus * plus) * (gamma / std::f64::consts::PI)
}

fn spectral_integrand_log_derivative(n: usize, omega: f64, gamma: f64) -> Complex64 {
    let nf = n as f64;
    (nf - 1.0) / Complex64::new(omega, -gamma) - (nf + 1.0) / Complex64::new(omega, gamma)
}

/// `a_n(t)` as `∫ (γ/π)(ω - iγ)^{n-1}/(ω + iγ)^{n+1} e^{-iωt} dω` over the
/// real line, computed by quadrature alone.
///
/// At `t = 0` the tangent map `ω = γ tan θ` turns the integrand into a
/// trigonometric polynomial and a 2000-node Gauss–Legendre rule is exact.
/// For `t > 0` the integrand oscillates without bound in `θ`, so the line
/// is cut at `|ω| = W`, the inner part is split into panels short in both
/// `ω/γ` and phase `ωt`, and the two tails are added from two terms of
/// their integration-by-parts expansion. The integrand at `-ω` is the
/// conjugate of that at `ω`, so the result is twice the real part of the
/// half-line integral.
pub fn revival_quadrature(n: usize, t: f64, gamma: f64) -> Result<f64> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::InvalidConfig(format!("rate must be positive, got {gamma}")));
    }
    let s = gamma * t;
    if n > QUADRATURE_MAX_ORDER || !(0.0..=QUADRATURE_MAX_GAMMA_T).contains(&s) {
        return Err(Error::OutOfEnvelope(format!(
            "quadrature limited to n <= {QUADRATURE_MAX_ORDER}, 0 <= gamma*t <= {QUADRATURE_MAX_GAMMA_T}; got n = {n}, gamma*t = {s}"
        )));
    }
    if s == 0.0 {
        let rule = GaussLegendre::new(2000);
        let value: Complex64 = integrate_real_line(&rule, gamma, |w| spectral_integrand(n, w, gamma));
        return Ok(value.re);
    }

    // Work in u = ω/γ; the phase is s·u.
    let u_max = (200.0 / s).max(1e3);
    let rule = GaussLegendre::new(20);
    let f = |u: f64| spectral_integrand(n, gamma * u, gamma) * Complex64::from_polar(gamma, -s * u);
    let mut inner = Complex64::new(0.0, 0.0);
    let mut lo = 0.0;
    while lo < u_max {
        let width = (0.5 * lo.max(1.0)).min(1.0 / s);
        let hi = (lo + width).min(u_max);
        inner += rule.integrate(lo, hi, f);
        lo = hi;
    }

    let w = gamma * u_max;
    let it = Complex64::new(0.0, t);
    let fw = spectral_integrand(n, w, gamma);
    let dfw = fw * spectral_integrand_log_derivative(n, w, gamma);
    let tail = Complex64::from_polar(1.0, -w * t) * (fw / it + dfw / (it * it));
    Ok(2.0 * (inner + tail).re)
}

/// The `n`-th revival sampled on a time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RevivalSeries {
    pub order: usize,
    pub gamma: f64,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl RevivalSeries {
    pub fn new(order: usize, gamma: f64, times: &[f64]) -> Self {
        RevivalSeries {
            order,
            gamma,
            times: times.to_vec(),
            values: times.iter().map(|&t| revival_amplitude(order, t, gamma)).collect(),
        }
    }
}

/// Number of revival terms switched on by time `t_max`.
pub fn revivals_needed(t_max: f64, revival_time: f64) -> usize {
    (t_max / revival_time).floor().max(0.0) as usize
}

/// Shifted and switched terms `θ(t - nT_R) a_n(t - nT_R)`, `n = 0..=n_max`,
/// with `θ(0) = 1`.
pub fn revival_terms(t: f64, config: &SystemConfig, n_max: usize) -> Vec<f64> {
    let gamma = config.gamma();
    let t_r = config.revival_time();
    (0..=n_max)
        .map(|n| {
            let tau = t - n as f64 * t_r;
            if tau >= 0.0 {
                revival_amplitude(n, tau, gamma)
            } else {
                0.0
            }
        })
        .collect()
}

/// `a(t) = Σ_{n ≤ n_max} θ(t - nT_R) a_n(t - nT_R)` in the rotating frame.
pub fn reconstruct(times: &[f64], config: &SystemConfig, n_max: usize) -> Result<Vec<f64>> {
    config.validate()?;
    let t_r = config.revival_time();
    let t_max = times.iter().copied().fold(0.0, f64::max);
    let needed = revivals_needed(t_max, t_r);
    if n_max < needed {
        return Err(Error::Truncation { n_max, needed });
    }
    Ok(times
        .iter()
        .map(|&t| revival_terms(t, config, n_max).iter().sum())
        .collect())
}

/// Cascade matrix `M` of `d/dt (a_0, …, a_n) = M (a_0, …, a_n)`: `-γ` on the
/// diagonal, `-2γ` below it, zero above.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpMatrix {
    order: usize,
    gamma: f64,
    entries: Vec<f64>,
}

impl EpMatrix {
    /// Revival order `n`; the matrix is `(n + 1) × (n + 1)`.
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn dimension(&self) -> usize {
        self.order + 1
    }

    pub fn entry(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.dimension() + col]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.entries.chunks(self.dimension()).map(|r| r.to_vec()).collect()
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        let d = self.dimension();
        for (r, o) in out.iter_mut().enumerate() {
            *o = (0..d).map(|c| self.entries[r * d + c] * x[c]).sum();
        }
    }
}

pub fn ep_matrix(n: usize, gamma: f64) -> EpMatrix {
    let d = n + 1;
    let mut entries = vec![0.0; d * d];
    for r in 0..d {
        for c in 0..r {
            entries[r * d + c] = -2.0 * gamma;
        }
        entries[r * d + r] = -gamma;
    }
    EpMatrix { order: n, gamma, entries }
}

/// Integrate the cascade from `(1, 0, …, 0)` with RK4 and sample it at the
/// non-decreasing, non-negative `times`. Steps are at most `max_step`.
pub fn ep_trajectory(matrix: &EpMatrix, times: &[f64], max_step: f64) -> Result<Vec<Vec<f64>>> {
    if !(max_step > 0.0) {
        return Err(Error::StepSize { dt: max_step, bound: f64::INFINITY });
    }
    let d = matrix.dimension();
    let mut y = vec![0.0; d];
    y[0] = 1.0;
    let mut ws = Rk4Workspace::new(d);
    let rhs = |x: &[f64], out: &mut [f64]| matrix.apply(x, out);
    let mut now = 0.0;
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        if t < now {
            return Err(Error::Format(format!("sample times must be non-decreasing from 0, got {t}")));
        }
        let span = t - now;
        if span > 0.0 {
            let steps = (span / max_step).ceil().max(1.0) as usize;
            let h = span / steps as f64;
            for _ in 0..steps {
                rk4_step(&rhs, &mut y, h, &mut ws);
            }
        }
        now = t;
        out.push(y.clone());
    }
    Ok(out)
}

/// `max_t |da_n/dt + γa_n + 2γ Σ_{k<n} a_k|` with the analytic derivative
/// `da_n/dt = -γa_n + 2γ e^{-γt} L_n^{(-1)'}(2γt)`.
pub fn ep_chain_residual(n: usize, gamma: f64, times: &[f64]) -> f64 {
    times
        .iter()
        .map(|&t| {
            let x = 2.0 * gamma * t;
            let decay = (-gamma * t).exp();
            let a = laguerre_gen_all(n, x);
            let an = decay * a[n];
            let derivative = -gamma * an + decay * 2.0 * gamma * laguerre_gen_derivative(n, x);
            let lower: f64 = a[..n].iter().map(|l| decay * l).sum();
            (derivative + gamma * an + 2.0 * gamma * lower).abs()
        })
        .fold(0.0, f64::max)
}

/// [`ep_chain_residual`] with a central difference of step `1e-6/γ` in
/// place of the analytic derivative.
pub fn ep_chain_residual_fd(n: usize, gamma: f64, times: &[f64]) -> f64 {
    let h = 1e-6 / gamma;
    times
        .iter()
        .map(|&t| {
            let derivative = (revival_amplitude(n, t + h, gamma) - revival_amplitude(n, t - h, gamma)) / (2.0 * h);
            let lower: f64 = (0..n).map(|k| revival_amplitude(k, t, gamma)).sum();
            (derivative + gamma * revival_amplitude(n, t, gamma) + 2.0 * gamma * lower).abs()
        })
        .fold(0.0, f64::max)
}

/// Jordan structure of the single eigenvalue of an [`EpMatrix`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JordanStructure {
    pub eigenvalue: f64,
    pub algebraic_multiplicity: usize,
    pub geometric_multiplicity: usize,
    pub nilpotency_index: usize,
}

pub fn jordan_analysis(matrix: &EpMatrix) -> JordanStructure {
    let d = matrix.dimension();
    // Triangular: the eigenvalues are the diagonal entries.
    let eigenvalue = matrix.entry(0, 0);
    let algebraic_multiplicity = (0..d).filter(|&i| matrix.entry(i, i) == eigenvalue).count();

    let mut shifted = matrix.entries.clone();
    for i in 0..d {
        shifted[i * d + i] -= eigenvalue;
    }
    let geometric_multiplicity = d - rank(shifted.clone(), d);

    let is_zero = |m: &[f64]| m.iter().all(|&x| x == 0.0);
    let mut power = shifted.clone();
    let mut nilpotency_index = 1;
    while !is_zero(&power) && nilpotency_index <= d {
        power = mat_mul(&power, &shifted, d);
        nilpotency_index += 1;
    }
    JordanStructure {
        eigenvalue,
        algebraic_multiplicity,
        geometric_multiplicity,
        nilpotency_index,
    }
}

/// `(M + γI)^p` for inspection.
pub fn shifted_power(matrix: &EpMatrix, p: usize) -> Vec<f64> {
    let d = matrix.dimension();
    let mut shifted = matrix.entries.clone();
    for i in 0..d {
        shifted[i * d + i] += matrix.gamma;
    }
    let mut out = vec![0.0; d * d];
    for i in 0..d {
        out[i * d + i] = 1.0;
    }
    for _ in 0..p {
        out = mat_mul(&out, &shifted, d);
    }
    out
}

fn mat_mul(a: &[f64], b: &[f64], d: usize) -> Vec<f64> {
    let mut out = vec![0.0; d * d];
    for i in 0..d {
        for k in 0..d {
            let aik = a[i * d + k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..d {
                out[i * d + j] += aik * b[k * d + j];
            }
        }
    }
    out
}

// Row echelon elimination with partial pivoting; entries below
// 1e-12·max|a| count as zero.
fn rank(mut a: Vec<f64>, d: usize) -> usize {
    let scale = a.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if scale == 0.0 {
        return 0;
    }
    let tol = 1e-12 * scale;
    let mut rank = 0;
    for col in 0..d {
        let pivot = (rank..d).max_by(|&i, &j| a[i * d + col].abs().total_cmp(&a[j * d + col].abs()));
        let Some(p) = pivot else { break };
        if a[p * d + col].abs() <= tol {
            continue;
        }
        for c in 0..d {
            a.swap(rank * d + c, p * d + c);
        }
        for r in rank + 1..d {
            let factor = a[r * d + col] / a[rank * d + col];
            if factor != 0.0 {
                for c in col..d {
                    a[r * d + c] -= factor * a[rank * d + c];
                }
            }
        }
        rank += 1;
    }
    rank
}
