//! One function per data-producing subcommand.

use nmep_core::dynamics::SpectralModel;
use nmep_core::eigen::{finite_residual, infinite_residual};
use nmep_core::revivals::{revival_terms, revivals_needed};
use nmep_core::spectra::symmetric_grid;
use nmep_core::{
    analytic_spectrum, decompose_finite, decompose_infinite, default_truncation,
    evolve_eigenbasis, evolve_rk4, find_peaks, jordan_analysis, PeakList, SystemConfig, TimeGrid,
};
use serde::Serialize;

use crate::args::{
    EigenArgs, EpMatrixArgs, EvolveArgs, MethodArg, ModeArg, RevivalsArgs, SpectrumArgs,
};
use crate::config::{parse_time, parse_window, Settings};
use crate::output::{data_path, float, write_json, Check, Csv, RunManifest};
use crate::CliError;

fn spectral_model(mode: ModeArg, k_max: Option<u32>, config: &SystemConfig) -> SpectralModel {
    match mode {
        ModeArg::Finite => SpectralModel::Finite,
        ModeArg::Infinite => SpectralModel::InfiniteTruncated {
            k_max: k_max.map_or_else(
                || default_truncation(config.gamma(), config.delta_omega),
                i64::from,
            ),
        },
    }
}

fn mode_name(mode: ModeArg) -> &'static str {
    match mode {
        ModeArg::Finite => "finite",
        ModeArg::Infinite => "infinite",
    }
}

pub fn eigen(args: &EigenArgs) -> Result<(), CliError> {
    let config = Settings::resolve(&args.system)?.system()?;
    let path = data_path(&args.output, "eigen.csv")?;
    let model = spectral_model(args.mode, args.k_max, &config);
    let decomposition = match model {
        SpectralModel::Finite => decompose_finite(&config)?,
        SpectralModel::InfiniteTruncated { k_max } => decompose_infinite(&config, k_max)?,
    };
    let gamma = config.gamma();
    let dw = config.delta_omega;

    let mut csv = Csv::new(&["k", "omega_tilde", "alpha", "weight", "residual"]);
    let mut worst = 0.0f64;
    for m in &decomposition.modes {
        let residual = match model {
            SpectralModel::Finite => finite_residual(m.alpha, m.k, &config),
            SpectralModel::InfiniteTruncated { .. } => infinite_residual(m.alpha, m.k, gamma, dw),
        };
        worst = worst.max(residual.abs());
        csv.row(&[
            m.k.to_string(),
            float(m.omega_tilde),
            float(m.alpha),
            float(m.weight),
            float(residual),
        ]);
    }
    csv.write(&path)?;

    let mut manifest = RunManifest::new("eigen", Some(&config));
    manifest.param("mode", mode_name(args.mode));
    if let SpectralModel::InfiniteTruncated { k_max } = model {
        manifest.param("k_max", k_max);
    }
    manifest.param("modes", decomposition.modes.len());
    manifest.param("weight_sum", decomposition.weight_sum());
    manifest.check(Check::at_most("max_abs_residual_over_delta_omega", worst / dw, 1e-9));
    manifest.output(&path);
    manifest.write_beside(&path)?;
    Ok(())
}

pub fn evolve(args: &EvolveArgs) -> Result<(), CliError> {
    let config = Settings::resolve(&args.system)?.system()?;
    let path = data_path(&args.output, "evolve.csv")?;
    let t_r = config.revival_time();
    let t_max = parse_time(&args.t_max, t_r)?;
    let grid = TimeGrid::covering(t_max, t_r, args.samples_per_tr)?;
    let trajectory = match args.method {
        MethodArg::Eigenbasis => {
            if args.dt.is_some() {
                return Err(CliError::Invalid("--dt only applies to --method rk4".into()));
            }
            let model = spectral_model(args.mode, args.k_max, &config);
            evolve_eigenbasis(&config, &grid, model, args.store_reservoir)?
        }
        MethodArg::Rk4 => {
            if args.mode == ModeArg::Infinite {
                return Err(CliError::Invalid("--method rk4 integrates the finite system only".into()));
            }
            evolve_rk4(&config, &grid, args.dt, args.store_reservoir)?
        }
    };

    let norm = if args.store_reservoir { trajectory.norm.as_deref() } else { None };
    let mut header = vec!["t", "re_a", "im_a", "abs2_a"];
    if norm.is_some() {
        header.push("norm");
    }
    let mut csv = Csv::new(&header);
    for (i, (t, a)) in trajectory.times.iter().zip(&trajectory.a).enumerate() {
        let mut row = vec![float(*t), float(a.re), float(a.im), float(a.norm_sqr())];
        if let Some(norm) = norm {
            row.push(float(norm[i]));
        }
        csv.row(&row);
    }
    csv.write(&path)?;

    let mut manifest = RunManifest::new("evolve", Some(&config));
    manifest.param("t_max", t_max);
    manifest.param("samples_per_tr", args.samples_per_tr);
    manifest.param("samples", grid.len);
    manifest.param("method", trajectory.method);
    if args.method == MethodArg::Eigenbasis {
        manifest.param("mode", mode_name(args.mode));
    }
    if let Some(h) = trajectory.integration_step {
        manifest.param("integration_step", h);
    }
    if let Some(w) = trajectory.weight_sum {
        manifest.param("weight_sum", w);
    }
    if let Some(norm) = norm {
        let drift = norm.iter().map(|n| (n - 1.0).abs()).fold(0.0, f64::max);
        manifest.check(Check::at_most("max_norm_drift", drift, 1e-6));
    }
    manifest.warnings.extend(trajectory.warnings.iter().cloned());
    for w in &trajectory.warnings {
        eprintln!("nmep: warning: {w}");
    }
    manifest.output(&path);
    manifest.write_beside(&path)?;
    Ok(())
}

pub fn revivals(args: &RevivalsArgs) -> Result<(), CliError> {
    if args.system.lab_frame {
        return Err(CliError::Invalid("revival terms are defined in the rotating frame".into()));
    }
    let config = Settings::resolve(&args.system)?.system()?;
    if !config.rotating_frame {
        return Err(CliError::Invalid("revival terms are defined in the rotating frame".into()));
    }
    let path = data_path(&args.output, "revivals.csv")?;
    let t_r = config.revival_time();
    let t_max = parse_time(&args.t_max, t_r)?;
    let grid = TimeGrid::covering(t_max, t_r, args.samples_per_tr)?;
    let needed = revivals_needed(grid.end(), t_r);
    let n_max = args.n_max.map_or(needed, |n| n as usize);

    let mut header: Vec<String> = vec!["t".into()];
    header.extend((0..=n_max).map(|n| format!("a_{n}")));
    header.push("reconstructed".into());
    let mut csv = Csv::new(&header.iter().map(String::as_str).collect::<Vec<_>>());
    for t in grid.times() {
        let terms = revival_terms(t, &config, n_max);
        let sum: f64 = terms.iter().sum();
        let mut row = vec![float(t)];
        row.extend(terms.into_iter().map(float));
        row.push(float(sum));
        csv.row(&row);
    }
    csv.write(&path)?;

    let mut manifest = RunManifest::new("revivals", Some(&config));
    manifest.param("t_max", t_max);
    manifest.param("samples_per_tr", args.samples_per_tr);
    manifest.param("n_max", n_max);
    if n_max < needed {
        manifest.warnings.push(format!(
            "n_max = {n_max} leaves out revivals up to {needed}; the sum is truncated"
        ));
    }
    manifest.output(&path);
    manifest.write_beside(&path)?;
    Ok(())
}

#[derive(Serialize)]
struct PeakReport<'a> {
    order: usize,
    peaks: &'a [nmep_core::Peak],
    count: usize,
}

impl<'a> PeakReport<'a> {
    fn new(order: usize, list: &'a PeakList) -> Self {
        PeakReport {
            order,
            peaks: &list.peaks,
            count: list.count(),
        }
    }
}

pub fn spectrum(args: &SpectrumArgs) -> Result<(), CliError> {
    let settings = Settings::resolve(&args.system)?;
    let gamma = settings.rate()?;
    let order = args.order as usize;
    let path = data_path(&args.output, &format!("spectrum_n{order}.csv"))?;
    let half_range = args.omega_max.unwrap_or(25.0 * gamma);
    let spacing = args.d_omega.unwrap_or(gamma / 200.0);
    let omegas = symmetric_grid(half_range, spacing)?;
    let analytic = analytic_spectrum(order, &omegas, gamma)?;
    let peaks = find_peaks(&analytic, true)?;

    let mut config = None;
    let mut window = None;
    let windowed = match &args.window {
        None => None,
        Some(text) => {
            let system = settings.system()?;
            let t_r = system.revival_time();
            let (lo, hi) = parse_window(text, t_r)?;
            let grid = TimeGrid::covering(hi, t_r, args.samples_per_tr)?;
            let trajectory = evolve_eigenbasis(&system, &grid, SpectralModel::Finite, false)?;
            let grid = nmep_core::windowed_spectrum(&trajectory, (lo, hi), &omegas)?;
            config = Some(system);
            window = Some((lo, hi));
            Some(grid)
        }
    };
    let windowed_peaks = match &windowed {
        Some(w) => Some(find_peaks(&w.real_part().with_gamma(gamma), true)?),
        None => None,
    };

    let analytic_values = analytic.real_values();
    let mut header = vec!["omega", "S_analytic", "abs2_S_analytic"];
    if windowed.is_some() {
        header.extend(["re_S_windowed", "im_S_windowed", "abs2_S_windowed"]);
    }
    let windowed_values = windowed.as_ref().map(|w| w.complex_values());
    let mut csv = Csv::new(&header);
    for (i, (&w, &s)) in omegas.iter().zip(&analytic_values).enumerate() {
        let mut row = vec![float(w), float(s), float(s * s)];
        if let Some(values) = &windowed_values {
            let f = values[i];
            row.extend([float(f.re), float(f.im), float(f.norm_sqr())]);
        }
        csv.row(&row);
    }
    csv.write(&path)?;
    let peaks_path = crate::output::sibling(&path, "peaks.json");
    write_json(&peaks_path, &PeakReport::new(order, &peaks))?;

    let mut manifest = RunManifest::new("spectrum", config.as_ref());
    manifest.param("order", order);
    manifest.param("gamma", gamma);
    manifest.param("omega_max", half_range);
    manifest.param("d_omega", spacing);
    manifest.param("grid_points", omegas.len());
    manifest.output(&path);
    manifest.output(&peaks_path);
    if let (Some(list), Some((lo, hi))) = (&windowed_peaks, window) {
        manifest.param("window", [lo, hi]);
        manifest.param("samples_per_tr", args.samples_per_tr);
        let windowed_path = crate::output::sibling(&path, "windowed_peaks.json");
        write_json(&windowed_path, &PeakReport::new(order, list))?;
        manifest.output(&windowed_path);
    }
    manifest.write_beside(&path)?;
    Ok(())
}

#[derive(Serialize)]
struct EpReport {
    order: usize,
    gamma: f64,
    eigenvalue: f64,
    algebraic_multiplicity: usize,
    geometric_multiplicity: usize,
    nilpotency_index: usize,
    matrix: Vec<Vec<f64>>,
}

pub fn ep_matrix(args: &EpMatrixArgs) -> Result<(), CliError> {
    if !(args.gamma > 0.0 && args.gamma.is_finite()) {
        return Err(CliError::Invalid(format!("gamma = {} must be positive", args.gamma)));
    }
    let order = args.order as usize;
    let path = data_path(&args.output, &format!("ep_matrix_n{order}.json"))?;
    let matrix = nmep_core::ep_matrix(order, args.gamma);
    let jordan = jordan_analysis(&matrix);
    let report = EpReport {
        order,
        gamma: args.gamma,
        eigenvalue: jordan.eigenvalue,
        algebraic_multiplicity: jordan.algebraic_multiplicity,
        geometric_multiplicity: jordan.geometric_multiplicity,
        nilpotency_index: jordan.nilpotency_index,
        matrix: matrix.rows(),
    };
    write_json(&path, &report)?;

    let mut manifest = RunManifest::new("ep-matrix", None);
    manifest.param("order", order);
    manifest.param("gamma", args.gamma);
    let expected = order + 1;
    manifest.check(Check::at_most(
        "single_jordan_block",
        (jordan.algebraic_multiplicity.abs_diff(expected)
            + jordan.geometric_multiplicity.abs_diff(1)
            + jordan.nilpotency_index.abs_diff(expected)) as f64,
        0.0,
    ));
    manifest.output(&path);
    manifest.write_beside(&path)?;
    Ok(())
}
