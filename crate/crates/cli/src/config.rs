//! Run configuration: command-line flags layered over an optional JSON file.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use edsat::quarkonia::System;
use edsat::xform::MIN_SPLIT_POINTS;

use crate::CliError;

pub const N_MAX_LIMIT: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Spectrum,
    Masses,
    Fit,
    XformCheck,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Masses => "masses",
            Command::Fit => "fit",
            Command::XformCheck => "xform-check",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SystemKind {
    Ho,
    Hydrogen,
    Ccbar,
    Bbbar,
}

impl SystemKind {
    pub fn quarkonium(&self) -> Option<System> {
        match self {
            SystemKind::Ccbar => Some(System::Charmonium),
            SystemKind::Bbbar => Some(System::Bottomonium),
            _ => None,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            SystemKind::Ho => "ho",
            SystemKind::Hydrogen => "hydrogen",
            SystemKind::Ccbar => "ccbar",
            SystemKind::Bbbar => "bbbar",
        }
    }
}

/// Flags shared by every subcommand. Unset flags fall back to the config
/// file, then to the defaults listed in [`RunConfig::resolve`].
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Physical system
    #[arg(long, value_enum)]
    pub system: Option<SystemKind>,
    /// Exponent q of f(E) = (1 + lambda E)^q
    #[arg(long, allow_negative_numbers = true)]
    pub q: Option<f64>,
    /// Saturation parameter; repeat for several columns
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Vec<f64>,
    /// Highest radial quantum number
    #[arg(long)]
    pub n_max: Option<u64>,
    /// Constituent quark mass in GeV
    #[arg(long, allow_negative_numbers = true)]
    pub quark_mass: Option<f64>,
    /// Output CSV path (stdout when absent)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON config file mirroring these flags
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Write the effective configuration as JSON
    #[arg(long)]
    pub emit_config: Option<PathBuf>,
    /// Oscillator quantum
    #[arg(long, allow_negative_numbers = true)]
    pub hbar_omega: Option<f64>,
    /// Coulomb binding scale E_R
    #[arg(long, allow_negative_numbers = true)]
    pub rydberg: Option<f64>,
    /// Transform constant k
    #[arg(long, allow_negative_numbers = true)]
    pub k: Option<f64>,
    /// Transform constant c
    #[arg(long, allow_negative_numbers = true)]
    pub c: Option<f64>,
    /// Transform constant a
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub hbar: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub mass: Option<f64>,
    /// First grid point of xform-check
    #[arg(long, allow_negative_numbers = true)]
    pub u_min: Option<f64>,
    /// Last grid point of xform-check
    #[arg(long, allow_negative_numbers = true)]
    pub u_max: Option<f64>,
    /// Number of grid points of xform-check
    #[arg(long)]
    pub points: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
enum Lambdas {
    One(f64),
    Many(Vec<f64>),
}

/// Contents of a `--config` file. Every key is optional.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    command: Option<Command>,
    system: Option<SystemKind>,
    lambda: Option<Lambdas>,
    q: Option<f64>,
    n_max: Option<u64>,
    quark_mass: Option<f64>,
    output_path: Option<PathBuf>,
    hbar_omega: Option<f64>,
    rydberg: Option<f64>,
    k: Option<f64>,
    c: Option<f64>,
    a: Option<f64>,
    hbar: Option<f64>,
    mass: Option<f64>,
    u_min: Option<f64>,
    u_max: Option<f64>,
    points: Option<usize>,
}

impl ConfigFile {
    fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))
    }
}

/// Fully resolved settings for one run. Serialising it gives a config file
/// that reproduces the run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub system: SystemKind,
    pub lambda: Vec<f64>,
    pub q: f64,
    pub n_max: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quark_mass: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_path: Option<PathBuf>,
    pub hbar_omega: f64,
    pub rydberg: f64,
    pub k: f64,
    pub c: f64,
    pub a: f64,
    pub hbar: f64,
    pub mass: f64,
    pub u_min: f64,
    pub u_max: f64,
    pub points: usize,
}

impl RunConfig {
    /// Merges `flags` over the file named by `--config`, if any.
    ///
    /// Defaults: system `ho` (spectrum, xform-check) or `ccbar` (masses,
    /// fit); lambda `0` for spectrum and the system's table values for
    /// masses and fit; `q = 1`; `n_max = 10` for spectrum and `8` (up to 9S) otherwise;
    /// the adopted quark mass of the system; `hbar_omega = 1`,
    /// `rydberg = 0.5`; `k = 2`, `a = -1`, `c = 1.5` (ho) or `2`
    /// (hydrogen); `hbar = mass = 1`; grid `0.2..=5` with 49 points.
    pub fn resolve(command: Command, flags: &Flags) -> Result<Self, CliError> {
        let file = match &flags.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        if let Some(c) = file.command {
            if c != command {
                return Err(CliError::Usage(format!(
                    "config file is for `{}`, not `{}`",
                    c.name(),
                    command.name()
                )));
            }
        }

        let system = flags.system.or(file.system).unwrap_or(match command {
            Command::Masses | Command::Fit => SystemKind::Ccbar,
            _ => SystemKind::Ho,
        });
        let lambda = if !flags.lambda.is_empty() {
            flags.lambda.clone()
        } else {
            match file.lambda {
                Some(Lambdas::One(l)) => vec![l],
                Some(Lambdas::Many(ls)) => ls,
                None => match (command, system.quarkonium()) {
                    (Command::Masses | Command::Fit, Some(s)) => s.table_lambdas().to_vec(),
                    _ => vec![0.0],
                },
            }
        };
        let quark_mass = flags
            .quark_mass
            .or(file.quark_mass)
            .or_else(|| system.quarkonium().map(|s| s.default_quark_mass()));
        let config = Self {
            command,
            system,
            lambda,
            q: flags.q.or(file.q).unwrap_or(1.0),
            n_max: flags.n_max.or(file.n_max).unwrap_or(match command {
                Command::Spectrum => 10,
                _ => 8,
            }),
            quark_mass,
            output_path: flags.out.clone().or(file.output_path),
            hbar_omega: flags.hbar_omega.or(file.hbar_omega).unwrap_or(1.0),
            rydberg: flags.rydberg.or(file.rydberg).unwrap_or(0.5),
            k: flags.k.or(file.k).unwrap_or(2.0),
            c: flags.c.or(file.c).unwrap_or(match system {
                SystemKind::Hydrogen => 2.0,
                _ => 1.5,
            }),
            a: flags.a.or(file.a).unwrap_or(-1.0),
            hbar: flags.hbar.or(file.hbar).unwrap_or(1.0),
            mass: flags.mass.or(file.mass).unwrap_or(1.0),
            u_min: flags.u_min.or(file.u_min).unwrap_or(0.2),
            u_max: flags.u_max.or(file.u_max).unwrap_or(5.0),
            points: flags.points.or(file.points).unwrap_or(49),
        };
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<(), CliError> {
        let usage = |msg: String| Err(CliError::Usage(msg));
        match (self.command, self.system) {
            (Command::Masses | Command::Fit, SystemKind::Ho | SystemKind::Hydrogen) => {
                return usage(format!("`{}` needs --system ccbar or bbbar", self.command.name()));
            }
            (Command::XformCheck, SystemKind::Ccbar | SystemKind::Bbbar) => {
                return usage("`xform-check` needs --system ho or hydrogen".into());
            }
            _ => {}
        }
        if self.lambda.is_empty() {
            return usage("at least one lambda is required".into());
        }
        if let Some(l) = self.lambda.iter().find(|l| !l.is_finite()) {
            return usage(format!("lambda {l} is not finite"));
        }
        if self.command == Command::Spectrum && self.lambda.len() != 1 {
            return usage(format!("`spectrum` takes one lambda, got {}", self.lambda.len()));
        }
        if !(self.q.is_finite() && self.q >= 0.0) {
            return usage(format!("q = {} must be finite and non-negative", self.q));
        }
        if self.n_max > N_MAX_LIMIT {
            return usage(format!("n_max = {} exceeds {N_MAX_LIMIT}", self.n_max));
        }
        let positive = [
            ("hbar_omega", self.hbar_omega),
            ("rydberg", self.rydberg),
            ("k", self.k),
            ("hbar", self.hbar),
            ("mass", self.mass),
        ];
        for (name, v) in positive.into_iter().chain(self.quark_mass.map(|m| ("quark_mass", m))) {
            if !(v.is_finite() && v > 0.0) {
                return usage(format!("{name} = {v} must be positive"));
            }
        }
        if !(self.c.is_finite() && self.a.is_finite()) {
            return usage("c and a must be finite".into());
        }
        if self.command == Command::XformCheck {
            if self.points == 0 {
                return usage("empty grid: --points must be positive".into());
            }
            if self.points < MIN_SPLIT_POINTS {
                return usage(format!("grid needs at least {MIN_SPLIT_POINTS} points, got {}", self.points));
            }
            if !(self.u_min > 0.0 && self.u_max > self.u_min && self.u_max.is_finite()) {
                return usage(format!("grid bounds need 0 < u_min < u_max, got {}..{}", self.u_min, self.u_max));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("config serialises");
        text.push('\n');
        text
    }

    pub fn system_name(&self) -> &'static str {
        self.system.name()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn resolve(command: Command, flags: Flags) -> Result<RunConfig, CliError> {
        RunConfig::resolve(command, &flags)
    }

    #[test]
    fn defaults_depend_on_command() {
        let s = resolve(Command::Spectrum, Flags::default()).unwrap();
        assert_eq!((s.system, s.lambda.clone(), s.n_max), (SystemKind::Ho, vec![0.0], 10));
        assert_eq!(s.quark_mass, None);
        let m = resolve(Command::Masses, Flags::default()).unwrap();
        assert_eq!(m.system, SystemKind::Ccbar);
        assert_eq!(m.lambda, vec![0.0, -0.2, -0.4]);
        assert_eq!(m.quark_mass, Some(1.697));
        let x = resolve(Command::XformCheck, Flags { system: Some(SystemKind::Hydrogen), ..Flags::default() }).unwrap();
        assert_eq!((x.k, x.c, x.a), (2.0, 2.0, -1.0));
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        std::fs::write(&path, r#"{"system": "bbbar", "lambda": -0.3, "n_max": 3, "q": 2}"#).unwrap();
        let flags = Flags {
            config: Some(path),
            n_max: Some(4),
            ..Flags::default()
        };
        let c = resolve(Command::Masses, flags).unwrap();
        assert_eq!(c.system, SystemKind::Bbbar);
        assert_eq!(c.lambda, vec![-0.3]);
        assert_eq!(c.n_max, 4);
        assert_eq!(c.q, 2.0);
        assert_eq!(c.quark_mass, Some(4.568));
    }

    #[test]
    fn emitted_config_reloads_to_the_same_run() {
        let dir = tempfile::tempdir().unwrap();
        let flags = Flags {
            system: Some(SystemKind::Hydrogen),
            lambda: vec![-0.25],
            q: Some(4.0),
            n_max: Some(7),
            ..Flags::default()
        };
        let first = resolve(Command::Spectrum, flags).unwrap();
        let path = dir.path().join("eff.json");
        std::fs::write(&path, first.to_json()).unwrap();
        let again = resolve(Command::Spectrum, Flags { config: Some(path), ..Flags::default() }).unwrap();
        assert_eq!(first, again);
        assert_eq!(first.to_json(), again.to_json());
    }

    #[test]
    fn rejects_bad_settings() {
        let bad = [
            (Command::Masses, Flags { system: Some(SystemKind::Ho), ..Flags::default() }),
            (Command::XformCheck, Flags { system: Some(SystemKind::Ccbar), ..Flags::default() }),
            (Command::Spectrum, Flags { n_max: Some(N_MAX_LIMIT + 1), ..Flags::default() }),
            (Command::Spectrum, Flags { lambda: vec![-0.1, -0.2], ..Flags::default() }),
            (Command::Spectrum, Flags { q: Some(-1.0), ..Flags::default() }),
            (Command::XformCheck, Flags { points: Some(0), ..Flags::default() }),
            (Command::XformCheck, Flags { u_min: Some(3.0), u_max: Some(1.0), ..Flags::default() }),
            (Command::Fit, Flags { system: Some(SystemKind::Bbbar), quark_mass: Some(-1.0), ..Flags::default() }),
        ];
        for (command, flags) in bad {
            assert!(matches!(resolve(command, flags.clone()), Err(CliError::Usage(_))), "{flags:?}");
        }
    }

    #[test]
    fn config_for_another_command_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        std::fs::write(&path, r#"{"command": "masses"}"#).unwrap();
        let err = resolve(Command::Spectrum, Flags { config: Some(path), ..Flags::default() });
        assert!(matches!(err, Err(CliError::Usage(_))));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        std::fs::write(&path, r#"{"lambada": 1}"#).unwrap();
        let err = resolve(Command::Spectrum, Flags { config: Some(path), ..Flags::default() });
        assert!(matches!(err, Err(CliError::Usage(_))));
    }
}
