//! Physical configuration of the oscillator + reservoir system.
//!
//! All frequencies are in units of the carrier `ω₀` and times in units of
//! `1/ω₀`. The reservoir has `N + 1` modes at `ω_j = ω₀ + j·δω`,
//! `j = -N/2 ..= N/2`, each coupled to the oscillator with strength `g`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Physical parameters of the coupled system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    /// Carrier frequency `ω₀` (only used outside the rotating frame).
    pub omega0: f64,
    /// Reservoir frequency step `δω`.
    pub delta_omega: f64,
    /// Number of reservoir modes, `N + 1` (odd).
    pub n_modes: usize,
    /// Oscillator-mode coupling `g`.
    pub coupling: f64,
    /// Work with slow amplitudes (`ω₀ → 0`).
    pub rotating_frame: bool,
}

/// Rates derived from a [`SystemConfig`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rates {
    /// Born–Markov decay rate `γ = πg²/δω`.
    pub gamma: f64,
    /// Linewidth of the mode-weight distribution, `Γ = γ·sqrt(1 + δω/(πγ))`.
    pub big_gamma: f64,
    /// Revival period `T_R = 2π/δω`.
    pub revival_time: f64,
}

impl SystemConfig {
    /// Rotating-frame configuration with `ω₀ = 1`.
    pub fn new(delta_omega: f64, n_modes: usize, coupling: f64) -> Result<Self> {
        let config = SystemConfig {
            omega0: 1.0,
            delta_omega,
            n_modes,
            coupling,
            rotating_frame: true,
        };
        config.validate()?;
        Ok(config)
    }

    /// Rotating-frame configuration parameterized by the decay rate `γ`.
    pub fn from_gamma(gamma: f64, delta_omega: f64, n_modes: usize) -> Result<Self> {
        Self::new(delta_omega, n_modes, coupling_for_rate(gamma, delta_omega)?)
    }

    /// Same system seen from the laboratory frame with carrier `omega0`.
    pub fn in_lab_frame(self, omega0: f64) -> Result<Self> {
        let config = SystemConfig {
            omega0,
            rotating_frame: false,
            ..self
        };
        config.validate()?;
        Ok(config)
    }

    pub fn with_n_modes(self, n_modes: usize) -> Result<Self> {
        let config = SystemConfig { n_modes, ..self };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        validate_rates_input(self.delta_omega, self.coupling)?;
        if !self.omega0.is_finite() {
            return Err(Error::InvalidConfig(format!("omega0 = {} is not finite", self.omega0)));
        }
        if self.n_modes < 3 || self.n_modes % 2 == 0 {
            return Err(Error::InvalidConfig(format!(
                "n_modes = {} must be odd and at least 3 (N + 1 modes with N even)",
                self.n_modes
            )));
        }
        Ok(())
    }

    /// `N/2`: reservoir modes run over `j = -N/2 ..= N/2`.
    pub fn half_width(&self) -> i64 {
        ((self.n_modes - 1) / 2) as i64
    }

    /// The carrier as seen in the working frame: zero in the rotating frame.
    pub fn carrier(&self) -> f64 {
        if self.rotating_frame {
            0.0
        } else {
            self.omega0
        }
    }

    /// Detuning `ω_j - ω₀ = j·δω` of reservoir mode `j`.
    pub fn detuning(&self, j: i64) -> f64 {
        j as f64 * self.delta_omega
    }

    /// Frequency `ω_j` of reservoir mode `j` in the working frame.
    pub fn reservoir_frequency(&self, j: i64) -> f64 {
        self.carrier() + self.detuning(j)
    }

    pub fn rates(&self) -> Rates {
        rates_unchecked(self.delta_omega, self.coupling)
    }

    pub fn gamma(&self) -> f64 {
        self.rates().gamma
    }

    pub fn revival_time(&self) -> f64 {
        2.0 * PI / self.delta_omega
    }
}

fn validate_rates_input(delta_omega: f64, coupling: f64) -> Result<()> {
    if !(delta_omega > 0.0 && delta_omega.is_finite()) {
        return Err(Error::InvalidConfig(format!("delta_omega = {delta_omega} must be positive")));
    }
    if !(coupling > 0.0 && coupling.is_finite()) {
        return Err(Error::InvalidConfig(format!("coupling = {coupling} must be positive")));
    }
    Ok(())
}

fn rates_unchecked(delta_omega: f64, coupling: f64) -> Rates {
    let gamma = PI * coupling * coupling / delta_omega;
    // γ²(1 + δω/(πγ)) = γ² + g²
    let big_gamma = (gamma * gamma + coupling * coupling).sqrt();
    Rates {
        gamma,
        big_gamma,
        revival_time: 2.0 * PI / delta_omega,
    }
}

/// Decay rate, mode-weight linewidth and revival period of a configuration.
pub fn derive_rates(config: &SystemConfig) -> Result<Rates> {
    validate_rates_input(config.delta_omega, config.coupling)?;
    Ok(config.rates())
}

/// Coupling `g = sqrt(γδω/π)` that produces the decay rate `gamma`.
pub fn coupling_for_rate(gamma: f64, delta_omega: f64) -> Result<f64> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidConfig(format!("gamma = {gamma} must be positive")));
    }
    if !(delta_omega > 0.0 && delta_omega.is_finite()) {
        return Err(Error::InvalidConfig(format!("delta_omega = {delta_omega} must be positive")));
    }
    Ok((gamma * delta_omega / PI).sqrt())
}

/// Real symmetric arrowhead matrix of the equations of motion
/// `i d/dt (a, b) = H (a, b)`.
///
/// Index 0 is the oscillator; index `1 + (j + N/2)` is reservoir mode `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoupledSystemMatrix {
    diagonal: Vec<f64>,
    coupling: f64,
    carrier: f64,
    delta_omega: f64,
}

impl CoupledSystemMatrix {
    pub fn dimension(&self) -> usize {
        self.diagonal.len()
    }

    /// `(ω₀, ω_{-N/2}, ..., ω_{N/2})`.
    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn carrier(&self) -> f64 {
        self.carrier
    }

    pub fn delta_omega(&self) -> f64 {
        self.delta_omega
    }

    pub fn entry(&self, row: usize, col: usize) -> f64 {
        if row == col {
            self.diagonal[row]
        } else if row == 0 || col == 0 {
            self.coupling
        } else {
            0.0
        }
    }

    /// Dense row-major copy.
    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.dimension();
        let mut dense = vec![0.0; n * n];
        for row in 0..n {
            for col in 0..n {
                dense[row * n + col] = self.entry(row, col);
            }
        }
        dense
    }

    /// `out = -i H x`, the right-hand side of the equations of motion.
    pub fn apply_generator(&self, x: &[Complex64], out: &mut [Complex64]) {
        let g = self.coupling;
        let mut border = Complex64::new(0.0, 0.0);
        for (j, (o, xj)) in out.iter_mut().zip(x).enumerate().skip(1) {
            border += xj;
            let hx = self.diagonal[j] * xj + g * x[0];
            *o = Complex64::new(hx.im, -hx.re);
        }
        let h0 = self.diagonal[0] * x[0] + g * border;
        out[0] = Complex64::new(h0.im, -h0.re);
    }
}

/// Build the arrowhead matrix for `config`.
pub fn build_matrix(config: &SystemConfig) -> Result<CoupledSystemMatrix> {
    config.validate()?;
    let half = config.half_width();
    let mut diagonal = Vec::with_capacity(config.n_modes + 1);
    diagonal.push(config.carrier());
    diagonal.extend((-half..=half).map(|j| config.reservoir_frequency(j)));
    Ok(CoupledSystemMatrix {
        diagonal,
        coupling: config.coupling,
        carrier: config.carrier(),
        delta_omega: config.delta_omega,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rates_for_figure_one_parameters() {
        let config = SystemConfig::new(0.002, 401, 1.4927e-3).unwrap();
        let rates = derive_rates(&config).unwrap();
        assert!((rates.gamma - 3.5e-3).abs() < 1e-6, "{}", rates.gamma);
        assert!((rates.revival_time - PI * 1e3).abs() < 1e-9);
        assert!((rates.revival_time - 3141.59).abs() < 5e-3);
        let expected_big = (rates.gamma.powi(2) * (1.0 + 0.002 / (PI * rates.gamma))).sqrt();
        assert!((rates.big_gamma - expected_big).abs() < 1e-15);
        assert!(rates.big_gamma > rates.gamma);
    }

    #[test]
    fn weak_coupling_limit() {
        let config = SystemConfig::new(0.002, 11, 1e-12).unwrap();
        let rates = config.rates();
        assert!(rates.gamma < 1e-20);
        assert!(rates.big_gamma < 1e-11);
    }

    #[test]
    fn coupling_inversion_examples() {
        let g = coupling_for_rate(0.0035, 0.002).unwrap();
        assert!((g - 1.4927e-3).abs() < 1e-7, "{g}");
        let g = coupling_for_rate(0.0071, 0.002).unwrap();
        assert!((g - 2.126e-3).abs() < 1e-6, "{g}");
        let g = coupling_for_rate(PI, 1.0).unwrap();
        assert!((g - 1.0).abs() < 1e-14, "{g}");
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(matches!(SystemConfig::new(0.0, 11, 1e-3), Err(Error::InvalidConfig(_))));
        assert!(matches!(SystemConfig::new(0.002, 11, -1e-3), Err(Error::InvalidConfig(_))));
        assert!(matches!(SystemConfig::new(0.002, 10, 1e-3), Err(Error::InvalidConfig(_))));
        assert!(matches!(SystemConfig::new(0.002, 1, 1e-3), Err(Error::InvalidConfig(_))));
        assert!(coupling_for_rate(0.0, 0.002).is_err());
        assert!(coupling_for_rate(0.1, -0.002).is_err());
        let mut config = SystemConfig::new(0.002, 11, 1e-3).unwrap();
        config.n_modes = 12;
        assert!(matches!(build_matrix(&config), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn smallest_matrix() {
        let config = SystemConfig::new(0.25, 3, 0.1).unwrap();
        let m = build_matrix(&config).unwrap();
        assert_eq!(m.diagonal(), &[0.0, -0.25, 0.0, 0.25]);
        for i in 1..4 {
            assert_eq!(m.entry(0, i), 0.1);
            assert_eq!(m.entry(i, 0), 0.1);
        }
        assert_eq!(m.entry(1, 2), 0.0);
        assert_eq!(m.entry(3, 1), 0.0);
    }

    #[test]
    fn quartic_characteristic_polynomial() {
        // det(H - λ) for diag(0, -d, 0, d) with border g:
        // λ⁴ - (d² + 3g²)λ² + g²d² = 0, so λ² = ((d²+3g²) ± sqrt((d²+3g²)² - 4g²d²))/2.
        let (d, g) = (0.5f64, 0.2f64);
        let config = SystemConfig::new(d, 3, g).unwrap();
        let m = build_matrix(&config).unwrap();
        let p = d * d + 3.0 * g * g;
        let disc = (p * p - 4.0 * g * g * d * d).sqrt();
        let mut roots = [
            ((p + disc) / 2.0).sqrt(),
            ((p - disc) / 2.0).sqrt(),
            -((p + disc) / 2.0).sqrt(),
            -((p - disc) / 2.0).sqrt(),
        ];
        roots.sort_by(f64::total_cmp);
        let dec = crate::eigen::diagonalize_oracle(&m).unwrap();
        for (mode, root) in dec.modes.iter().zip(roots) {
            assert!((mode.omega_tilde - root).abs() < 1e-14, "{} vs {root}", mode.omega_tilde);
        }
    }

    #[test]
    fn equidistant_when_step_is_dyadic() {
        let config = SystemConfig::new(1.0 / 512.0, 2001, 1e-3).unwrap();
        let m = build_matrix(&config).unwrap();
        for w in m.diagonal()[1..].windows(2) {
            assert_eq!(w[1] - w[0], 1.0 / 512.0);
        }
    }

    #[test]
    fn generator_matches_dense_product() {
        let config = SystemConfig::new(0.3, 5, 0.2).unwrap().in_lab_frame(1.0).unwrap();
        let m = build_matrix(&config).unwrap();
        let x: Vec<Complex64> = (0..6).map(|i| Complex64::new(i as f64 * 0.3 - 1.0, 0.1 * i as f64)).collect();
        let mut out = vec![Complex64::default(); 6];
        m.apply_generator(&x, &mut out);
        let dense = m.to_dense();
        for r in 0..6 {
            let hx: Complex64 = (0..6).map(|c| dense[r * 6 + c] * x[c]).sum();
            let expected = -Complex64::i() * hx;
            assert!((out[r] - expected).norm() < 1e-15);
        }
    }

    proptest! {
        #[test]
        fn coupling_round_trip(g in 1e-6f64..1.0, dw in 1e-5f64..1.0) {
            let config = SystemConfig::new(dw, 11, g).unwrap();
            let back = coupling_for_rate(config.gamma(), dw).unwrap();
            prop_assert!(((back - g) / g).abs() < 1e-14);
        }

        #[test]
        fn arrowhead_structure(half in 1usize..20, dw in 1e-3f64..1.0, g in 1e-4f64..1.0, lab in any::<bool>()) {
            let mut config = SystemConfig::new(dw, 2 * half + 1, g).unwrap();
            if lab {
                config = config.in_lab_frame(1.0).unwrap();
            }
            let m = build_matrix(&config).unwrap();
            let n = m.dimension();
            prop_assert_eq!(n, 2 * half + 2);
            let dense = m.to_dense();
            for r in 0..n {
                for c in 0..n {
                    prop_assert_eq!(dense[r * n + c], dense[c * n + r]);
                    if r != c && r != 0 && c != 0 {
                        prop_assert_eq!(dense[r * n + c], 0.0);
                    }
                    if r != c && (r == 0 || c == 0) {
                        prop_assert_eq!(dense[r * n + c], g);
                    }
                }
            }
        }
    }
}
