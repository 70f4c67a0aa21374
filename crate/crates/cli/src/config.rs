//! `--config` files and flag merging.

use std::fs;
use std::path::Path;

use nmep_core::SystemConfig;

use crate::args::SystemArgs;
use crate::CliError;

pub const DEFAULT_N_MODES: usize = 4001;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    pub omega0: Option<f64>,
    pub delta_omega: Option<f64>,
    pub n_modes: Option<usize>,
    pub coupling: Option<f64>,
    pub gamma: Option<f64>,
    pub rotating_frame: Option<bool>,
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Invalid(msg.into())
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str, line: usize) -> Result<T, CliError> {
    value
        .parse()
        .map_err(|_| invalid(format!("config line {line}: cannot parse {key} = {value:?}")))
}

pub fn parse_config(text: &str) -> Result<Settings, CliError> {
    let mut s = Settings::default();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| invalid(format!("config line {line}: expected key=value")))?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "omega0" => s.omega0 = Some(parse_value(key, value, line)?),
            "delta_omega" => s.delta_omega = Some(parse_value(key, value, line)?),
            "n_modes" => s.n_modes = Some(parse_value(key, value, line)?),
            "coupling" => s.coupling = Some(parse_value(key, value, line)?),
            "gamma" => s.gamma = Some(parse_value(key, value, line)?),
            "rotating_frame" => {
                s.rotating_frame = Some(match value {
                    "true" | "1" | "yes" => true,
                    "false" | "0" | "no" => false,
                    _ => return Err(invalid(format!("config line {line}: rotating_frame must be true or false"))),
                })
            }
            _ => return Err(invalid(format!("config line {line}: unknown key {key:?}"))),
        }
    }
    if s.coupling.is_some() && s.gamma.is_some() {
        return Err(invalid("config file sets both coupling and gamma"));
    }
    Ok(s)
}

impl Settings {
    /// File settings with the flags laid on top. A flag naming either
    /// coupling or gamma replaces the file's choice of the two.
    pub fn resolve(args: &SystemArgs) -> Result<Settings, CliError> {
        if args.coupling.is_some() && args.gamma.is_some() {
            return Err(invalid("--coupling and --gamma are mutually exclusive"));
        }
        let file = match &args.config {
            Some(path) => load(path)?,
            None => Settings::default(),
        };
        let (coupling, gamma) = if args.coupling.is_some() || args.gamma.is_some() {
            (args.coupling, args.gamma)
        } else {
            (file.coupling, file.gamma)
        };
        Ok(Settings {
            omega0: args.omega0.or(file.omega0),
            delta_omega: args.delta_omega.or(file.delta_omega),
            n_modes: args.n_modes.or(file.n_modes),
            coupling,
            gamma,
            rotating_frame: if args.lab_frame { Some(false) } else { file.rotating_frame },
        })
    }

    pub fn system(&self) -> Result<SystemConfig, CliError> {
        let dw = self
            .delta_omega
            .ok_or_else(|| invalid("delta_omega is required (--delta-omega or config file)"))?;
        let n_modes = self.n_modes.unwrap_or(DEFAULT_N_MODES);
        let base = match (self.coupling, self.gamma) {
            (Some(g), None) => SystemConfig::new(dw, n_modes, g),
            (None, Some(gamma)) => SystemConfig::from_gamma(gamma, dw, n_modes),
            _ => return Err(invalid("exactly one of coupling or gamma is required")),
        }?;
        let omega0 = self.omega0.unwrap_or(1.0);
        if self.rotating_frame == Some(false) {
            Ok(base.in_lab_frame(omega0)?)
        } else {
            let config = SystemConfig { omega0, ..base };
            config.validate()?;
            Ok(config)
        }
    }

    /// The decay rate alone, from gamma or from coupling and delta_omega.
    pub fn rate(&self) -> Result<f64, CliError> {
        match (self.gamma, self.coupling) {
            (Some(gamma), None) if gamma > 0.0 && gamma.is_finite() => Ok(gamma),
            (Some(gamma), None) => Err(invalid(format!("gamma = {gamma} must be positive"))),
            (None, Some(_)) => Ok(self.system()?.gamma()),
            _ => Err(invalid("exactly one of coupling or gamma is required")),
        }
    }
}

fn load(path: &Path) -> Result<Settings, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| invalid(format!("cannot read config {}: {e}", path.display())))?;
    parse_config(&text)
}

/// Absolute time, or `<k>TR` for `k·T_R`.
pub fn parse_time(text: &str, revival_time: f64) -> Result<f64, CliError> {
    let text = text.trim();
    let value = if let Some(k) = text.strip_suffix("TR") {
        let k = k.trim();
        if let Ok(whole) = k.parse::<u32>() {
            f64::from(whole) * revival_time
        } else {
            k.parse::<f64>().map_err(|_| invalid(format!("cannot parse time {text:?}")))? * revival_time
        }
    } else {
        text.parse::<f64>().map_err(|_| invalid(format!("cannot parse time {text:?}")))?
    };
    if !(value >= 0.0 && value.is_finite()) {
        return Err(invalid(format!("time {text:?} must be non-negative")));
    }
    Ok(value)
}

/// `<lo>:<hi>`, each in the form accepted by [`parse_time`].
pub fn parse_window(text: &str, revival_time: f64) -> Result<(f64, f64), CliError> {
    let (lo, hi) = text
        .split_once(':')
        .ok_or_else(|| invalid(format!("window {text:?} must look like <lo>:<hi>")))?;
    let (lo, hi) = (parse_time(lo, revival_time)?, parse_time(hi, revival_time)?);
    if hi <= lo {
        return Err(invalid(format!("window {text:?} is empty")));
    }
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_file_with_comments() {
        let s = parse_config("# reference system\ndelta_omega = 0.002\ngamma=0.0035 # rate\nn_modes=401\nrotating_frame=false\n").unwrap();
        assert_eq!(s.delta_omega, Some(0.002));
        assert_eq!(s.gamma, Some(0.0035));
        assert_eq!(s.n_modes, Some(401));
        assert_eq!(s.rotating_frame, Some(false));
    }

    #[test]
    fn rejects_bad_files() {
        assert!(parse_config("delta_omega 0.002").is_err());
        assert!(parse_config("colour = blue").is_err());
        assert!(parse_config("gamma = 0.1\ncoupling = 0.1").is_err());
        assert!(parse_config("n_modes = -3").is_err());
    }

    #[test]
    fn flags_override_file_choice_of_rate() {
        let dir = std::env::temp_dir().join(format!("nmep-config-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("c.cfg");
        std::fs::write(&path, "delta_omega=0.002\ngamma=0.0035\nn_modes=11\n").unwrap();
        let args = SystemArgs {
            config: Some(path),
            coupling: Some(1e-3),
            n_modes: Some(21),
            ..Default::default()
        };
        let s = Settings::resolve(&args).unwrap();
        assert_eq!((s.coupling, s.gamma, s.n_modes), (Some(1e-3), None, Some(21)));
        let config = s.system().unwrap();
        assert_eq!(config.coupling, 1e-3);
        std::fs::remove_dir_all(dir).unwrap();
    }

    #[test]
    fn time_suffix_is_exact_for_integers() {
        let t_r = std::f64::consts::PI * 1000.0;
        assert_eq!(parse_time("3TR", t_r).unwrap(), 3.0 * t_r);
        assert_eq!(parse_time("2.5TR", t_r).unwrap(), 2.5 * t_r);
        assert_eq!(parse_time("125.5", t_r).unwrap(), 125.5);
        assert!(parse_time("-1", t_r).is_err());
        assert!(parse_time("xTR", t_r).is_err());
        assert_eq!(parse_window("3TR:4TR", t_r).unwrap(), (3.0 * t_r, 4.0 * t_r));
        assert!(parse_window("4TR:3TR", t_r).is_err());
    }
}
