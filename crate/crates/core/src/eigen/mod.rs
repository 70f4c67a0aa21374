//! Eigenfrequencies and oscillator weights of the coupled system.
//!
//! Each eigenfrequency is written `ω̃ = ω₀ + kδω + α` with `|α| < δω`. Between
//! neighbouring reservoir frequencies the secular function is strictly
//! increasing, so every interval holds exactly one root. Above the carrier
//! a root is labelled by the reservoir mode just below it
//! ([`Branch::Upper`], `α ∈ (0, δω)`), below the carrier by the mode just
//! above it ([`Branch::Lower`], `α ∈ (-δω, 0)`). The index `k = 0` carries
//! one root on each branch, so a reservoir of `N + 1` modes yields the
//! `N + 2` eigenfrequencies of the full system.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::model::SystemConfig;
use crate::{Error, Result};

mod digamma;
pub mod jacobi;

pub use digamma::digamma;
pub use jacobi::diagonalize_oracle;

use digamma::digamma_positive;

/// Which side of its reservoir mode an eigenfrequency lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    /// `α ∈ (0, δω)`.
    Upper,
    /// `α ∈ (-δω, 0)`.
    Lower,
}

impl Branch {
    /// Branch used for a bare mode index: upper for `k ≥ 0`, lower otherwise.
    pub fn for_index(k: i64) -> Branch {
        if k >= 0 {
            Branch::Upper
        } else {
            Branch::Lower
        }
    }

    fn sign(self) -> f64 {
        match self {
            Branch::Upper => 1.0,
            Branch::Lower => -1.0,
        }
    }
}

/// One eigenfrequency of the coupled system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenMode {
    pub k: i64,
    pub branch: Branch,
    /// `ω̃_k` in the working frame.
    pub omega_tilde: f64,
    /// `α_k = ω̃_k - ω₀ - kδω`.
    pub alpha: f64,
    /// Squared oscillator component `h²_{ak}` of the eigenvector.
    pub weight: f64,
}

impl EigenMode {
    /// Offset from the carrier, `kδω + α`, without the cancellation of
    /// `ω̃ - ω₀`.
    pub fn detuning(&self, delta_omega: f64) -> f64 {
        self.k as f64 * delta_omega + self.alpha
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecompositionMethod {
    TranscendentalInfinite,
    TranscendentalFinite,
    DenseOracle,
}

/// A set of eigenmodes ordered by eigenfrequency.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub modes: Vec<EigenMode>,
    pub method: DecompositionMethod,
    /// Full unit eigenvectors (oscillator component first), when available.
    pub eigenvectors: Option<Vec<Vec<f64>>>,
}

impl EigenDecomposition {
    /// `Σ_k h²_{ak}`; one for a complete basis.
    pub fn weight_sum(&self) -> f64 {
        self.modes.iter().map(|m| m.weight).sum()
    }

    pub fn eigenfrequencies(&self) -> Vec<f64> {
        self.modes.iter().map(|m| m.omega_tilde).collect()
    }
}

/// Truncation `K = ceil(200γ/δω)` of the infinite-reservoir mode sum. The
/// neglected Lorentzian tail weight is about `2γ/(πKδω) < 1%`.
pub fn default_truncation(gamma: f64, delta_omega: f64) -> i64 {
    (200.0 * gamma / delta_omega).ceil() as i64
}

fn check_rates(gamma: f64, delta_omega: f64) -> Result<()> {
    if !(gamma > 0.0 && gamma.is_finite()) || !(delta_omega > 0.0 && delta_omega.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "need gamma > 0 and delta_omega > 0, got gamma = {gamma}, delta_omega = {delta_omega}"
        )));
    }
    Ok(())
}

// Infinite reservoir: F(α) = α - (δω/π) arctan(γ/(α + kδω)).
fn infinite_defect(alpha: f64, k: i64, branch: Branch, gamma: f64, dw: f64) -> f64 {
    let z = alpha + k as f64 * dw;
    let angle = if z == 0.0 {
        // Limit from inside the branch interval.
        branch.sign() * PI / 2.0
    } else {
        (gamma / z).atan()
    };
    alpha - dw / PI * angle
}

fn infinite_slope(alpha: f64, k: i64, gamma: f64, dw: f64) -> f64 {
    let z = alpha + k as f64 * dw;
    1.0 + dw / PI * gamma / (z * z + gamma * gamma)
}

/// Shift `α_k` solving `α = (δω/π) arctan(γ/(α + kδω))` for an infinite
/// reservoir, on the branch implied by the sign of `k`.
pub fn solve_alpha_infinite(k: i64, gamma: f64, delta_omega: f64) -> Result<f64> {
    solve_alpha_infinite_branch(k, Branch::for_index(k), gamma, delta_omega)
}

/// [`solve_alpha_infinite`] with an explicit branch, needed for the second
/// root at `k = 0`.
pub fn solve_alpha_infinite_branch(
    k: i64,
    branch: Branch,
    gamma: f64,
    delta_omega: f64,
) -> Result<f64> {
    check_rates(gamma, delta_omega)?;
    let dw = delta_omega;
    let (mut lo, mut hi) = match branch {
        Branch::Upper => (0.0, dw),
        Branch::Lower => (-dw, 0.0),
    };
    let f = |a: f64| infinite_defect(a, k, branch, gamma, dw);
    let (f_lo, f_hi) = (f(lo), f(hi));
    if !(f_lo < 0.0 && f_hi > 0.0) {
        return Err(Error::Bracket { k, lo, hi, f_lo, f_hi });
    }

    // Bisection down to a small bracket, then safeguarded Newton.
    while hi - lo > 1e-3 * dw {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..100 {
        let fx = f(x);
        if fx == 0.0 {
            break;
        }
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let mut next = x - fx / infinite_slope(x, k, gamma, dw);
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        let done = (next - x).abs() <= 2.0 * f64::EPSILON * x.abs();
        x = next;
        if done {
            break;
        }
    }
    Ok(x)
}

/// Defect `α - (δω/π) arctan(γ/(α + kδω))` of the infinite-reservoir
/// eigenvalue equation.
pub fn infinite_residual(alpha: f64, k: i64, gamma: f64, delta_omega: f64) -> f64 {
    let branch = if alpha >= 0.0 { Branch::Upper } else { Branch::Lower };
    infinite_defect(alpha, k, branch, gamma, delta_omega)
}

// cot(πx), reduced so that the argument of tan stays within [-π/2, π/2].
fn cot_pi(x: f64) -> f64 {
    let r = x - x.round();
    if r == 0.0 {
        return f64::INFINITY;
    }
    1.0 / (PI * r).tan()
}

/// Finite-reservoir defect in digamma form, with `x = α/δω`:
///
/// `α + kδω - γ cot(πx) - (γ/π)[ψ(N/2 + k + 1 + x) - ψ(N/2 - k + 1 - x)]`.
fn finite_defect(x: f64, k: i64, config: &SystemConfig, gamma: f64) -> f64 {
    let half = config.half_width() as f64;
    let kf = k as f64;
    let alpha = x * config.delta_omega;
    let upper = digamma_positive(half + kf + 1.0 + x);
    let lower = digamma_positive(half - kf + 1.0 - x);
    alpha + kf * config.delta_omega - gamma * cot_pi(x) - gamma / PI * (upper - lower)
}

/// Defect `kδω + α - Σ_j g²/(α + (k - j)δω)` of the exact secular equation,
/// evaluated by direct summation with exact mode differences.
pub fn secular_defect(k: i64, alpha: f64, config: &SystemConfig) -> f64 {
    let dw = config.delta_omega;
    let g2 = config.coupling * config.coupling;
    let half = config.half_width();
    let sum: f64 = (-half..=half).map(|j| g2 / (alpha + (k - j) as f64 * dw)).sum();
    k as f64 * dw + alpha - sum
}

/// Shift `α_k` of the exact finite-reservoir equation, on the branch
/// implied by the sign of `k`.
pub fn solve_alpha_finite(k: i64, config: &SystemConfig) -> Result<f64> {
    solve_alpha_finite_branch(k, Branch::for_index(k), config)
}

pub fn solve_alpha_finite_branch(k: i64, branch: Branch, config: &SystemConfig) -> Result<f64> {
    config.validate()?;
    let half = config.half_width();
    if k.abs() > half {
        return Err(Error::Domain(format!("mode index {k} outside -{half}..={half}")));
    }
    let gamma = config.gamma();
    let dw = config.delta_omega;

    // Interval in x = α/δω. A reservoir mode at an endpoint is a pole where
    // the defect diverges (to -∞ on the left end, +∞ on the right). The
    // outermost roots are bound states with one open end, widened until the
    // direct pole sum changes sign; beyond |x| = 1 the digamma form no
    // longer applies and the direct sum is used.
    let outer = |x: f64| secular_defect(k, x * dw, config);
    let (mut lo, mut hi, f_lo, f_hi) = match branch {
        Branch::Upper if k < half => (0.0, 1.0, f64::NEG_INFINITY, f64::INFINITY),
        Branch::Lower if k > -half => (-1.0, 0.0, f64::NEG_INFINITY, f64::INFINITY),
        Branch::Upper => {
            let mut hi = 1.0;
            while outer(hi) <= 0.0 && hi < 1e300 {
                hi *= 2.0;
            }
            (0.0, hi, f64::NEG_INFINITY, outer(hi))
        }
        Branch::Lower => {
            let mut lo = -1.0;
            while outer(lo) >= 0.0 && lo > -1e300 {
                lo *= 2.0;
            }
            (lo, 0.0, outer(lo), f64::INFINITY)
        }
    };
    let defect = |x: f64| {
        if x.abs() < 1.0 {
            finite_defect(x, k, config, gamma)
        } else {
            outer(x)
        }
    };
    if !(f_lo < 0.0 && f_hi > 0.0) {
        return Err(Error::Bracket {
            k,
            lo: lo * dw,
            hi: hi * dw,
            f_lo,
            f_hi,
        });
    }
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if !(mid > lo && mid < hi) {
            break;
        }
        let fm = defect(mid);
        if fm == 0.0 {
            return Ok(mid * dw);
        }
        if fm < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * lo.abs().max(hi.abs()) {
            break;
        }
    }
    // Pick the endpoint with the smaller defect.
    let x = if defect(lo).abs() <= defect(hi).abs() {
        lo
    } else {
        hi
    };
    Ok(x * dw)
}

/// Finite-reservoir defect at shift `alpha`: the digamma form inside one
/// spacing, the direct pole sum for the bound states beyond it.
pub fn finite_residual(alpha: f64, k: i64, config: &SystemConfig) -> f64 {
    let x = alpha / config.delta_omega;
    if x.abs() < 1.0 {
        finite_defect(x, k, config, config.gamma())
    } else {
        secular_defect(k, alpha, config)
    }
}

/// Lorentz-like weight `(1/π) γδω / ((α + kδω)² + Γ²)` of the infinite
/// reservoir.
pub fn mode_weight(alpha: f64, k: i64, config: &SystemConfig) -> f64 {
    let rates = config.rates();
    let z = alpha + k as f64 * config.delta_omega;
    rates.gamma * config.delta_omega / PI / (z * z + rates.big_gamma * rates.big_gamma)
}

/// Exact finite-reservoir weight `1 / (1 + Σ_j g²/(α + (k - j)δω)²)`.
pub fn mode_weight_finite(alpha: f64, k: i64, config: &SystemConfig) -> f64 {
    let dw = config.delta_omega;
    let g2 = config.coupling * config.coupling;
    let half = config.half_width();
    let sum: f64 = (-half..=half)
        .map(|j| {
            let d = alpha + (k - j) as f64 * dw;
            g2 / (d * d)
        })
        .sum();
    1.0 / (1.0 + sum)
}

/// Defect `ω̃ - ω₀ - Σ_j g²/(ω̃ - ω_j)` of the exact secular equation.
pub fn eigen_residual(omega_tilde: f64, config: &SystemConfig) -> Result<f64> {
    config.validate()?;
    let g2 = config.coupling * config.coupling;
    let half = config.half_width();
    let mut sum = 0.0;
    for j in -half..=half {
        let d = omega_tilde - config.reservoir_frequency(j);
        if d == 0.0 {
            return Err(Error::Pole(omega_tilde));
        }
        sum += g2 / d;
    }
    Ok(omega_tilde - config.carrier() - sum)
}

fn labels(k_min: i64, k_max: i64) -> Vec<(i64, Branch)> {
    (k_min..=0)
        .map(|k| (k, Branch::Lower))
        .chain((0..=k_max).map(|k| (k, Branch::Upper)))
        .collect()
}

/// All `N + 2` eigenmodes of the finite system, from the digamma-form
/// equation with exact finite-reservoir weights.
pub fn decompose_finite(config: &SystemConfig) -> Result<EigenDecomposition> {
    config.validate()?;
    let half = config.half_width();
    let dw = config.delta_omega;
    let modes = labels(-half, half)
        .into_par_iter()
        .map(|(k, branch)| {
            let alpha = solve_alpha_finite_branch(k, branch, config)?;
            Ok(EigenMode {
                k,
                branch,
                omega_tilde: config.carrier() + (k as f64 * dw + alpha),
                alpha,
                weight: mode_weight_finite(alpha, k, config),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EigenDecomposition {
        modes,
        method: DecompositionMethod::TranscendentalFinite,
        eigenvectors: None,
    })
}

/// Modes `|k| ≤ k_max` of the infinite reservoir with Lorentz-like weights.
/// `config.n_modes` is ignored.
pub fn decompose_infinite(config: &SystemConfig, k_max: i64) -> Result<EigenDecomposition> {
    let gamma = config.gamma();
    let dw = config.delta_omega;
    check_rates(gamma, dw)?;
    if k_max < 0 {
        return Err(Error::InvalidConfig(format!("truncation K = {k_max} must be non-negative")));
    }
    let modes = labels(-k_max, k_max)
        .into_par_iter()
        .map(|(k, branch)| {
            let alpha = solve_alpha_infinite_branch(k, branch, gamma, dw)?;
            Ok(EigenMode {
                k,
                branch,
                omega_tilde: config.carrier() + (k as f64 * dw + alpha),
                alpha,
                weight: mode_weight(alpha, k, config),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EigenDecomposition {
        modes,
        method: DecompositionMethod::TranscendentalInfinite,
        eigenvectors: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::build_matrix;
    use proptest::prelude::*;

    const GAMMA: f64 = 0.0035;
    const DW: f64 = 0.002;

    // Independent oracle: plain fixed-point iteration of the arctan map.
    fn fixed_point_alpha(k: i64, sign: f64, gamma: f64, dw: f64) -> f64 {
        let mut a = sign * dw / 2.0;
        for _ in 0..10_000 {
            a = dw / PI * (gamma / (a + k as f64 * dw)).atan();
        }
        a
    }

    #[test]
    fn central_shift_matches_fixed_point() {
        let alpha = solve_alpha_infinite(0, GAMMA, DW).unwrap();
        let oracle = fixed_point_alpha(0, 1.0, GAMMA, DW);
        assert!((alpha - oracle).abs() < 1e-12 * DW);
        assert!((alpha - 8.48e-4).abs() < 1e-6, "{alpha}");
        assert!(infinite_residual(alpha, 0, GAMMA, DW).abs() <= 1e-14 * DW);
    }

    #[test]
    fn central_mode_has_two_roots() {
        let up = solve_alpha_infinite_branch(0, Branch::Upper, GAMMA, DW).unwrap();
        let down = solve_alpha_infinite_branch(0, Branch::Lower, GAMMA, DW).unwrap();
        assert!(up > 0.0 && down < 0.0);
        assert!((up + down).abs() < 1e-16);
        assert!((down - fixed_point_alpha(0, -1.0, GAMMA, DW)).abs() < 1e-12 * DW);
    }

    #[test]
    fn antisymmetric_spectrum() {
        for k in 1..=50 {
            let plus = solve_alpha_infinite(k, GAMMA, DW).unwrap();
            let minus = solve_alpha_infinite(-k, GAMMA, DW).unwrap();
            assert!((plus + minus).abs() <= 1e-13 * DW, "k = {k}");
            assert!(plus > 0.0 && plus < DW);
            assert!(infinite_residual(plus, k, GAMMA, DW).abs() <= 1e-14 * DW);
            assert!(infinite_residual(minus, -k, GAMMA, DW).abs() <= 1e-14 * DW);
            assert!((plus - fixed_point_alpha(k, 1.0, GAMMA, DW)).abs() < 1e-12 * DW);
        }
    }

    #[test]
    fn shift_vanishes_in_weak_coupling() {
        for k in [1, 7, -3] {
            let alpha = solve_alpha_infinite(k, 1e-12, DW).unwrap();
            assert!(alpha.abs() < 1e-12, "{alpha}");
        }
    }

    #[test]
    fn infinite_rejects_bad_rates() {
        assert!(matches!(solve_alpha_infinite(0, 0.0, DW), Err(Error::InvalidConfig(_))));
        assert!(matches!(solve_alpha_infinite(0, GAMMA, -1.0), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn finite_defect_changes_sign_across_each_interval() {
        let config = SystemConfig::from_gamma(GAMMA, DW, 201).unwrap();
        let half = config.half_width();
        for (k, branch) in labels(-half, half) {
            let (a, b) = match branch {
                Branch::Upper => (1e-9, 1.0 - 1e-9),
                Branch::Lower => (-1.0 + 1e-9, -1e-9),
            };
            let fa = finite_defect(a, k, &config, config.gamma());
            let fb = finite_defect(b, k, &config, config.gamma());
            assert!(fa < 0.0 && fb > 0.0, "k = {k} {branch:?}: {fa} {fb}");
        }
    }

    #[test]
    fn finite_roots_solve_direct_secular_sum() {
        let config = SystemConfig::from_gamma(GAMMA, DW, 201).unwrap();
        let half = config.half_width();
        for (k, branch) in labels(-half, half) {
            let alpha = solve_alpha_finite_branch(k, branch, &config).unwrap();
            assert!(alpha.abs() <= DW);
            assert!(finite_residual(alpha, k, &config).abs() < 1e-12 * DW);
            let omega = k as f64 * DW + alpha;
            let res = eigen_residual(omega, &config).unwrap();
            assert!(res.abs() < 5e-10 * DW, "k = {k}: {res}");
            assert!(secular_defect(k, alpha, &config).abs() < 1e-10 * DW);
        }
    }

    #[test]
    fn edge_mode_respects_sturm_bound() {
        let config = SystemConfig::from_gamma(GAMMA, DW, 101).unwrap();
        let half = config.half_width();
        let top = solve_alpha_finite(half, &config).unwrap();
        let bottom = solve_alpha_finite(-half, &config).unwrap();
        assert!(top > 0.0 && top <= DW);
        assert!(bottom < 0.0 && bottom >= -DW);
        assert!((top + bottom).abs() < 1e-15);
    }

    #[test]
    fn finite_converges_to_infinite() {
        // The finite-size error falls off as 1/N.
        for k in [0i64, 3, -5] {
            let inf = solve_alpha_infinite(k, GAMMA, DW).unwrap();
            let scaled: Vec<f64> = [101usize, 1001, 10_001, 100_001]
                .iter()
                .map(|&n_modes| {
                    let config = SystemConfig::from_gamma(GAMMA, DW, n_modes).unwrap();
                    (solve_alpha_finite(k, &config).unwrap() - inf).abs() / DW * n_modes as f64
                })
                .collect();
            let last = scaled[scaled.len() - 1];
            assert!(last > 0.0 && last < 0.5, "k = {k}: {scaled:?}");
            for pair in scaled.windows(2) {
                assert!((pair[1] / pair[0] - 1.0).abs() < 0.05, "k = {k}: {scaled:?}");
            }
        }
    }

    #[test]
    fn finite_rejects_out_of_range_index() {
        let config = SystemConfig::from_gamma(GAMMA, DW, 11).unwrap();
        assert!(matches!(solve_alpha_finite(6, &config), Err(Error::Domain(_))));
    }

    #[test]
    fn strong_coupling_edge_mode_leaves_the_band() {
        // Huge coupling pushes the outermost eigenvalues far beyond one
        // step, close to ±g·sqrt(N + 1).
        let config = SystemConfig::new(0.01, 5, 1.0).unwrap();
        let alpha = solve_alpha_finite(2, &config).unwrap();
        let omega = 2.0 * config.delta_omega + alpha;
        assert!((omega - 5f64.sqrt()).abs() < 1e-2, "{omega}");
        assert!(secular_defect(2, alpha, &config).abs() < 1e-14);
        assert!(finite_residual(alpha, 2, &config).abs() < 1e-14);
        let lower = solve_alpha_finite(-2, &config).unwrap();
        assert!((lower + alpha).abs() < 1e-14);
    }

    #[test]
    fn resonant_weight_peak() {
        let config = SystemConfig::from_gamma(GAMMA, DW, 11).unwrap();
        let rates = config.rates();
        let w = mode_weight(0.0, 0, &config);
        let expected = rates.gamma * DW / (PI * rates.big_gamma.powi(2));
        assert!((w - expected).abs() < 1e-15 * expected);
    }

    #[test]
    fn lorentz_weights_are_complete_up_to_tail() {
        let config = SystemConfig::from_gamma(GAMMA, DW, 11).unwrap();
        let mut last_deficit = f64::INFINITY;
        for factor in [50.0, 100.0, 200.0, 800.0] {
            let k_max = (factor * GAMMA / DW).ceil() as i64;
            let dec = decompose_infinite(&config, k_max).unwrap();
            let deficit = 1.0 - dec.weight_sum();
            let tail = 2.0 * GAMMA / (PI * k_max as f64 * DW);
            assert!(deficit > 0.0 && deficit <= 2.0 * tail, "K = {k_max}: {deficit} vs {tail}");
            assert!(deficit < last_deficit);
            last_deficit = deficit;
        }
        let dec = decompose_infinite(&config, default_truncation(GAMMA, DW)).unwrap();
        assert!(dec.weight_sum() >= 0.99 && dec.weight_sum() <= 1.0);
    }

    #[test]
    fn finite_weights_and_roots_match_dense_oracle() {
        let config = SystemConfig::from_gamma(GAMMA, DW, 61).unwrap();
        let finite = decompose_finite(&config).unwrap();
        let dense = diagonalize_oracle(&build_matrix(&config).unwrap()).unwrap();
        assert_eq!(finite.modes.len(), dense.modes.len());
        for (a, b) in finite.modes.iter().zip(&dense.modes) {
            assert_eq!((a.k, a.branch), (b.k, b.branch));
            assert!((a.omega_tilde - b.omega_tilde).abs() < 1e-10 * DW);
            assert!((a.weight - b.weight).abs() < 1e-8);
        }
        assert!((finite.weight_sum() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn residual_rejects_pole_and_decouples() {
        let config = SystemConfig::from_gamma(GAMMA, DW, 11).unwrap();
        assert!(matches!(eigen_residual(2.0 * DW, &config), Err(Error::Pole(_))));
        // Weak coupling: the defect is just the detuning away from the poles.
        let weak = SystemConfig::new(DW, 11, 1e-12).unwrap();
        let res = eigen_residual(0.5 * DW, &weak).unwrap();
        assert!((res - 0.5 * DW).abs() < 1e-18);
    }

    #[test]
    fn lab_frame_shifts_spectrum() {
        let rot = SystemConfig::from_gamma(GAMMA, DW, 21).unwrap();
        let lab = rot.in_lab_frame(1.0).unwrap();
        let a = decompose_finite(&rot).unwrap();
        let b = decompose_finite(&lab).unwrap();
        for (x, y) in a.modes.iter().zip(&b.modes) {
            assert!((x.omega_tilde + 1.0 - y.omega_tilde).abs() < 1e-15);
            assert_eq!(x.weight, y.weight);
        }
    }

    proptest! {
        #[test]
        fn infinite_root_in_branch_interval(k in -200i64..200, gamma in 1e-5f64..1e-1, dw in 1e-4f64..1e-1) {
            let alpha = solve_alpha_infinite(k, gamma, dw).unwrap();
            if k >= 0 {
                prop_assert!(alpha > 0.0 && alpha < dw);
            } else {
                prop_assert!(alpha < 0.0 && alpha > -dw);
            }
            prop_assert!(infinite_residual(alpha, k, gamma, dw).abs() <= 1e-14 * dw);
        }

        #[test]
        fn infinite_defect_is_increasing(k in -50i64..50, u in 0.01f64..0.98, gamma in 1e-4f64..1e-1) {
            let dw = 0.002;
            let branch = Branch::for_index(k);
            let s = branch.sign();
            let a = s * u * dw;
            let b = s * (u + 0.01) * dw;
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            prop_assert!(infinite_defect(lo, k, branch, gamma, dw) < infinite_defect(hi, k, branch, gamma, dw));
        }
    }
}
