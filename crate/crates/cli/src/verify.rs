//! `nmep verify`: invariant checks over every module.
//!
//! `quick` runs in about a second on small systems; `full` adds the default
//! 4001-mode system and longer trajectories.

use std::f64::consts::PI;

use nmep_core::dynamics::SpectralModel;
use nmep_core::revivals::revival_recurrence_all;
use nmep_core::spectra::symmetric_grid;
use nmep_core::{
    analytic_spectrum, build_matrix, decompose_finite, decompose_infinite, default_truncation,
    diagonalize_oracle, digamma, eigen_residual, ep_chain_residual, ep_matrix, evolve_eigenbasis,
    evolve_rk4, find_peaks, jordan_analysis, laguerre_gen, reconstruct, revival_amplitude,
    revival_quadrature, SystemConfig, TimeGrid,
};

use crate::args::{SuiteArg, VerifyArgs};
use crate::output::{write_json, Check, RunManifest};
use crate::CliError;

const DW: f64 = 0.002;
const GAMMA: f64 = 0.0035;
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

fn max_abs(values: impl Iterator<Item = f64>) -> f64 {
    values.map(f64::abs).fold(0.0, f64::max)
}

fn model_checks(checks: &mut Vec<Check>) -> Result<(), CliError> {
    let config = SystemConfig::from_gamma(GAMMA, DW, 201)?;
    let rates = config.rates();
    let g = config.coupling;
    checks.push(Check::at_most(
        "model.gamma_from_coupling",
        (PI * g * g / DW - GAMMA).abs() / GAMMA,
        1e-14,
    ));
    checks.push(Check::at_most(
        "model.big_gamma_squared",
        (rates.big_gamma.powi(2) - GAMMA * GAMMA - g * g).abs() / rates.big_gamma.powi(2),
        1e-14,
    ));
    let matrix = build_matrix(&config)?;
    let n = matrix.dimension();
    let asym = max_abs((0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| matrix.entry(i, j) - matrix.entry(j, i)));
    checks.push(Check::at_most("model.matrix_symmetric", asym, 0.0));
    Ok(())
}

fn eigen_checks(checks: &mut Vec<Check>, n_modes: usize) -> Result<(), CliError> {
    checks.push(Check::at_most("eigen.digamma_at_one", (digamma(1.0)? + EULER_GAMMA).abs(), 1e-14));
    let config = SystemConfig::from_gamma(GAMMA, DW, n_modes)?;
    let finite = decompose_finite(&config)?;
    let dense = diagonalize_oracle(&build_matrix(&config)?)?;
    let roots = if finite.modes.len() == dense.modes.len() {
        max_abs(finite.modes.iter().zip(&dense.modes).map(|(a, b)| a.omega_tilde - b.omega_tilde))
    } else {
        f64::INFINITY
    };
    checks.push(Check::at_most("eigen.roots_vs_dense_over_dw", roots / DW, 1e-10));
    let weights = max_abs(finite.modes.iter().zip(&dense.modes).map(|(a, b)| a.weight - b.weight));
    checks.push(Check::at_most("eigen.weights_vs_dense", weights, 1e-10));
    checks.push(Check::at_most("eigen.finite_weight_sum", (finite.weight_sum() - 1.0).abs(), 1e-12));
    let residual = finite
        .modes
        .iter()
        .map(|m| eigen_residual(m.omega_tilde, &config).map(f64::abs))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .fold(0.0, f64::max);
    checks.push(Check::at_most("eigen.pole_sum_residual", residual, 1e-9));
    let infinite = decompose_infinite(&config, default_truncation(GAMMA, DW))?;
    let sum = infinite.weight_sum();
    checks.push(Check {
        name: "eigen.infinite_weight_sum_in_range".into(),
        measured: sum,
        tolerance: 0.99,
        pass: (0.99..=1.0).contains(&sum),
    });
    Ok(())
}

fn dynamics_checks(checks: &mut Vec<Check>, n_modes: usize, revivals: f64) -> Result<(), CliError> {
    let config = SystemConfig::from_gamma(GAMMA, DW, n_modes)?;
    let t_r = config.revival_time();
    let grid = TimeGrid::covering(revivals * t_r, t_r, 200)?;
    let exact = evolve_eigenbasis(&config, &grid, SpectralModel::Finite, true)?;
    let norm = max_abs(exact.norm.iter().flatten().map(|n| n - 1.0));
    checks.push(Check::at_most("dynamics.eigenbasis_norm", norm, 1e-10));
    let rk = evolve_rk4(&config, &grid, None, false)?;
    let drift = max_abs(rk.norm.iter().flatten().map(|n| n - 1.0));
    checks.push(Check::at_most("dynamics.rk4_norm_drift", drift, 1e-8));
    let agree = exact.a.iter().zip(&rk.a).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    checks.push(Check::at_most("dynamics.rk4_vs_eigenbasis", agree, 1e-6));
    Ok(())
}

fn revival_checks(checks: &mut Vec<Check>, orders: usize) -> Result<(), CliError> {
    let mut recurrence = 0.0f64;
    for s in [0.1, 1.0, 5.0, 20.0] {
        let t = s / GAMMA;
        let chain = revival_recurrence_all(orders, t, GAMMA);
        for (n, c) in chain.iter().enumerate() {
            recurrence = recurrence.max((c - revival_amplitude(n, t, GAMMA)).abs());
        }
    }
    checks.push(Check::at_most("revivals.recurrence_vs_laguerre", recurrence, 1e-12));
    let explicit = max_abs((0..=200).map(|i| {
        let x = i as f64 * 0.05;
        laguerre_gen(2, x) - (x * x / 2.0 - x)
    }));
    checks.push(Check::at_most("revivals.laguerre_explicit_order_2", explicit, 1e-13));
    let mut quadrature = 0.0f64;
    for n in 0..=3 {
        for s in [0.0, 0.5, 2.0] {
            let t = s / GAMMA;
            quadrature = quadrature.max((revival_quadrature(n, t, GAMMA)? - revival_amplitude(n, t, GAMMA)).abs());
        }
    }
    checks.push(Check::at_most("revivals.quadrature_vs_closed_form", quadrature, 1e-8));
    let times: Vec<f64> = (0..=400).map(|i| i as f64 * 0.025 / GAMMA).collect();
    let chain = (0..=orders).map(|n| ep_chain_residual(n, GAMMA, &times)).fold(0.0, f64::max);
    checks.push(Check::at_most("revivals.chain_residual_over_gamma", chain / GAMMA, 1e-12));
    let jordan_defect: usize = (0..=orders)
        .map(|n| {
            let j = jordan_analysis(&ep_matrix(n, GAMMA));
            j.algebraic_multiplicity.abs_diff(n + 1)
                + j.geometric_multiplicity.abs_diff(1)
                + j.nilpotency_index.abs_diff(n + 1)
        })
        .sum();
    checks.push(Check::at_most("revivals.single_jordan_block", jordan_defect as f64, 0.0));
    Ok(())
}

fn reconstruction_check(checks: &mut Vec<Check>, n_modes: usize, tolerance: f64) -> Result<(), CliError> {
    let config = SystemConfig::from_gamma(GAMMA, DW, n_modes)?;
    let t_r = config.revival_time();
    let grid = TimeGrid::covering(3.0 * t_r, t_r, 400)?;
    let traj = evolve_eigenbasis(&config, &grid, SpectralModel::Finite, false)?;
    let rec = reconstruct(&traj.times, &config, 3)?;
    let err = traj.a.iter().zip(&rec).map(|(a, r)| (a - r).norm()).fold(0.0, f64::max);
    checks.push(Check::at_most(format!("revivals.reconstruction_n{}", n_modes - 1), err, tolerance));
    Ok(())
}

fn spectra_checks(checks: &mut Vec<Check>) -> Result<(), CliError> {
    let omegas = symmetric_grid(25.0 * GAMMA, GAMMA / 200.0)?;
    let s0 = analytic_spectrum(0, &omegas, GAMMA)?.real_values();
    let lorentz = max_abs(omegas.iter().zip(&s0).map(|(w, s)| s - GAMMA / PI / (w * w + GAMMA * GAMMA)));
    checks.push(Check::at_most("spectra.order_0_lorentzian", lorentz, 1e-12));
    for n in [3usize, 5] {
        let peaks = find_peaks(&analytic_spectrum(n, &omegas, GAMMA)?, true)?;
        checks.push(Check::at_most(
            format!("spectra.peak_count_order_{n}"),
            peaks.count().abs_diff(2 * n + 1) as f64,
            0.0,
        ));
    }
    Ok(())
}

pub fn suite(kind: SuiteArg) -> Result<Vec<Check>, CliError> {
    let mut checks = Vec::new();
    model_checks(&mut checks)?;
    spectra_checks(&mut checks)?;
    match kind {
        SuiteArg::Quick => {
            eigen_checks(&mut checks, 101)?;
            dynamics_checks(&mut checks, 101, 1.0)?;
            revival_checks(&mut checks, 10)?;
            reconstruction_check(&mut checks, 1001, 5e-3)?;
        }
        SuiteArg::Full => {
            eigen_checks(&mut checks, 401)?;
            dynamics_checks(&mut checks, 201, 2.0)?;
            revival_checks(&mut checks, 20)?;
            reconstruction_check(&mut checks, 4001, 1e-3)?;
        }
    }
    Ok(checks)
}

pub fn run(args: &VerifyArgs) -> Result<(), CliError> {
    let mut manifest = RunManifest::new("verify", None);
    manifest.param(
        "suite",
        match args.suite {
            SuiteArg::Quick => "quick",
            SuiteArg::Full => "full",
        },
    );
    for check in suite(args.suite)? {
        eprintln!(
            "{} {} (measured {:.3e}, tolerance {:.3e})",
            if check.pass { "PASS" } else { "FAIL" },
            check.name,
            check.measured,
            check.tolerance
        );
        manifest.check(check);
    }
    match &args.out {
        Some(path) => {
            manifest.output(path);
            write_json(path, &manifest)?;
        }
        None => {
            let text = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Io(e.to_string()))?;
            println!("{text}");
        }
    }
    if manifest.failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::ChecksFailed(manifest.failures.clone()))
    }
}
