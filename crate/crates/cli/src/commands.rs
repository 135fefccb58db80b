//! The four report generators.

use std::path::PathBuf;

use edsat::quarkonia::{self, ExperimentalTable, QuarkoniaFit, System, DATA_FILE_NAME};
use edsat::spectrum::{spectrum_table, BaseSpectrum, SaturationModel};
use edsat::xform::{closed, split_potential_energy, SplitModel, TransformParams, TransformSpec};

use crate::config::{Command, RunConfig, SystemKind};
use crate::report::{fmt_g, fmt_opt, Csv};
use crate::CliError;

pub const DATA_DIR_ENV: &str = "EDP_DATA_DIR";
/// Largest accepted deviation in `xform-check`.
pub const XFORM_TOLERANCE: f64 = 1e-5;

type ClosedForm = fn(f64, f64, f64) -> f64;

/// Output of a run. `status` is an error when the CSV was produced but
/// signals a numerical failure.
#[derive(Debug)]
pub struct Report {
    pub csv: Csv,
    pub messages: Vec<String>,
    pub status: Result<(), CliError>,
}

impl Report {
    fn ok(csv: Csv, messages: Vec<String>) -> Self {
        Self {
            csv,
            messages,
            status: Ok(()),
        }
    }
}

/// Experimental masses from `$EDP_DATA_DIR/quarkonia_experimental.csv`,
/// or the built-in table when the variable is unset or empty.
pub fn experimental_table() -> Result<ExperimentalTable, CliError> {
    match std::env::var_os(DATA_DIR_ENV) {
        Some(dir) if !dir.is_empty() => {
            let path = PathBuf::from(dir).join(DATA_FILE_NAME);
            ExperimentalTable::load(&path).map_err(|e| CliError::Usage(e.to_string()))
        }
        _ => Ok(ExperimentalTable::builtin()),
    }
}

pub fn run(config: &RunConfig) -> Result<Report, CliError> {
    match config.command {
        Command::Spectrum => spectrum(config),
        Command::Masses => masses(config),
        Command::Fit => fits(config),
        Command::XformCheck => xform_check(config),
    }
}

fn fit_one(system: System, lambda: f64, config: &RunConfig) -> Result<QuarkoniaFit, CliError> {
    let table = experimental_table()?;
    let quark_mass = config.quark_mass.unwrap_or(system.default_quark_mass());
    quarkonia::fit(system, lambda, &table, quark_mass)
        .map_err(|e| CliError::Numerical(format!("{system} fit at lambda = {lambda}: {e}")))
}

fn spectrum(config: &RunConfig) -> Result<Report, CliError> {
    let lambda = config.lambda[0];
    let model = SaturationModel::new(lambda, config.q).map_err(|e| CliError::Usage(e.to_string()))?;
    let base = match config.system {
        SystemKind::Ho => BaseSpectrum::harmonic_oscillator(config.hbar_omega),
        SystemKind::Hydrogen => BaseSpectrum::hydrogen(config.rydberg),
        SystemKind::Ccbar | SystemKind::Bbbar => {
            let system = config.system.quarkonium().expect("quark system");
            let fit = fit_one(system, lambda, config)?;
            BaseSpectrum::Quarkonia {
                k_sq: fit.k_sq,
                p_sq: fit.p_sq,
            }
        }
    };

    let levels = spectrum_table(&base, &model, config.n_max);
    let mut csv = Csv::new(&["n", "base_energy", "energy", "valid", "branch"]);
    let mut messages = Vec::new();
    for level in &levels {
        csv.row(&[
            level.n.to_string(),
            fmt_g(level.base_energy),
            fmt_g(level.energy),
            level.valid.to_string(),
            level.branch.as_str().to_string(),
        ]);
        if let Some(reason) = &level.reason {
            messages.push(format!("n = {}: {reason}", level.n));
        }
    }
    if levels.is_empty() {
        return Err(CliError::Usage(format!(
            "no levels up to n_max = {} for {}",
            config.n_max,
            config.system_name()
        )));
    }
    if levels.iter().all(|l| !l.valid) {
        return Ok(Report {
            csv,
            messages,
            status: Err(CliError::Numerical("no level could be solved".into())),
        });
    }
    Ok(Report::ok(csv, messages))
}

fn masses(config: &RunConfig) -> Result<Report, CliError> {
    let system = config.system.quarkonium().expect("validated quark system");
    let table = experimental_table()?;
    let quark_mass = config.quark_mass.unwrap_or(system.default_quark_mass());
    let columns = quarkonia::mass_table(system, &config.lambda, &table, quark_mass, config.n_max);

    let mut csv = Csv::new(&["state", "lambda", "mass_GeV", "experimental_GeV", "deviation"]);
    let mut messages = Vec::new();
    for column in &columns {
        if let Err(e) = &column.fit {
            messages.push(format!("lambda = {}: {e}", column.lambda));
        }
        for row in &column.rows {
            csv.row(&[
                row.state.clone(),
                fmt_g(column.lambda),
                fmt_g(row.mass),
                fmt_opt(row.experimental),
                fmt_opt(row.deviation),
            ]);
        }
    }
    for column in &columns {
        if let Some(m) = column.saturation_mass {
            csv.row(&["saturation".to_string(), fmt_g(column.lambda), fmt_g(m), String::new(), String::new()]);
        }
    }
    if columns.iter().all(|c| c.fit.is_err()) {
        return Err(CliError::Numerical(messages.join("; ")));
    }
    Ok(Report::ok(csv, messages))
}

fn fits(config: &RunConfig) -> Result<Report, CliError> {
    let system = config.system.quarkonium().expect("validated quark system");
    let mut csv = Csv::new(&["system", "lambda", "k_sq", "p_sq", "residual_1", "residual_2", "iterations"]);
    let mut messages = Vec::new();
    let mut any = false;
    for &lambda in &config.lambda {
        match fit_one(system, lambda, config) {
            Ok(f) => {
                any = true;
                csv.row(&[
                    system.label().to_string(),
                    fmt_g(lambda),
                    fmt_g(f.k_sq),
                    fmt_g(f.p_sq),
                    fmt_g(f.residuals[0]),
                    fmt_g(f.residuals[1]),
                    f.iterations.to_string(),
                ]);
            }
            Err(CliError::Numerical(msg)) => messages.push(msg),
            Err(other) => return Err(other),
        }
    }
    if !any {
        return Err(CliError::Numerical(messages.join("; ")));
    }
    Ok(Report::ok(csv, messages))
}

fn xform_check(config: &RunConfig) -> Result<Report, CliError> {
    let params = TransformParams {
        a: config.a,
        b: 0.0,
        c: config.c,
        k: config.k,
    };
    let (c, k) = (config.c, config.k);
    let (spec, split, closed_energy): (_, _, f64) = match config.system {
        SystemKind::Ho => (
            TransformSpec::harmonic_oscillator(params),
            SplitModel::oscillator(),
            closed::ho_energy(config.hbar, config.mass, k, c, config.a),
        ),
        _ => (
            TransformSpec::hydrogen(params),
            SplitModel::coulomb(),
            closed::hydrogen_energy(config.hbar, config.mass, k),
        ),
    };
    let (weight, potential): (ClosedForm, ClosedForm) = match config.system {
        SystemKind::Ho => (closed::ho_weight, closed::ho_potential),
        _ => (closed::hydrogen_weight, closed::hydrogen_potential),
    };

    let step = (config.u_max - config.u_min) / (config.points - 1) as f64;
    let grid: Vec<f64> = (0..config.points)
        .map(|i| if i + 1 == config.points { config.u_max } else { config.u_min + i as f64 * step })
        .collect();
    let numeric = |e: edsat::xform::XformError| CliError::Numerical(format!("transform of {}: {e}", config.system_name()));

    let mut csv = Csv::new(&["u", "W_numeric", "W_closed", "v_numeric", "v_closed"]);
    let (mut max_dw, mut max_dv) = (0.0f64, 0.0f64);
    for &u in &grid {
        let s = spec.sample(u).map_err(numeric)?;
        let (w, v) = (weight(u, c, k), potential(u, c, k));
        max_dw = max_dw.max((s.weight - w).abs());
        max_dv = max_dv.max((s.potential - v).abs());
        csv.row(&[fmt_g(u), fmt_g(s.weight), fmt_g(w), fmt_g(s.potential), fmt_g(v)]);
    }
    let split = split_potential_energy(&spec, &grid, config.hbar, config.mass, &split).map_err(numeric)?;
    let energy_dev = (split.energy - closed_energy).abs() / closed_energy.abs().max(1.0);

    let summary = format!(
        "max_dW={} max_dv={} E_numeric={} E_closed={} E_deviation={}",
        fmt_g(max_dw),
        fmt_g(max_dv),
        fmt_g(split.energy),
        fmt_g(closed_energy),
        fmt_g(energy_dev)
    );
    csv.comment(&summary);
    let worst = max_dw.max(max_dv).max(energy_dev);
    let status = if worst.is_finite() && worst <= XFORM_TOLERANCE {
        Ok(())
    } else {
        Err(CliError::Numerical(format!("deviation {} exceeds {XFORM_TOLERANCE:e}", fmt_g(worst))))
    };
    Ok(Report {
        csv,
        messages: vec![summary],
        status,
    })
}
