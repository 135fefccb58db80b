//! Heavy-quarkonium S-wave masses under the linear energy deformation.
//!
//! The undeformed levels are `E_n = beta_n / 16` with
//! `beta_n = -k^2 [(2n+1)^2 + p^2/(2n+1)^2]`. Replacing `k^2` by
//! `k^2 (1 + lambda E_n)` gives `E_n = beta_n / (16 - lambda beta_n)`, and the
//! spin-averaged mass is `m_q + m_qbar + E_n`. State `nS` is level `n - 1`.
//!
//! `(k, p)` are carried as `k^2` and `p^2`: the mass tables need a rising
//! spectrum, which in this parametrisation means `k^2 < 0`.

use std::collections::HashSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use thiserror::Error;

use crate::numeric::least_squares;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuarkoniaError {
    #[error("pole: 16 - lambda*beta = {denominator:e} at n = {n}")]
    Pole { n: u64, denominator: f64 },
    #[error("missing experimental mass for {system} {state}")]
    MissingData { system: System, state: String },
    #[error("splittings admit no initial (k^2, k^2 p^2): {0}")]
    Infeasible(String),
    #[error("fit did not converge after {iterations} iterations (max residual {residual:e} GeV)")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("invalid parameter: {0}")]
    Invalid(String),
    #[error("experimental table line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum System {
    Charmonium,
    Bottomonium,
}

impl System {
    pub fn label(&self) -> &'static str {
        match self {
            System::Charmonium => "ccbar",
            System::Bottomonium => "bbbar",
        }
    }

    /// Constituent mass used for the mass tables.
    pub fn default_quark_mass(&self) -> f64 {
        match self {
            System::Charmonium => 1.697,
            System::Bottomonium => 4.568,
        }
    }

    /// Earlier constituent mass, kept for comparison runs.
    pub fn alternative_quark_mass(&self) -> f64 {
        match self {
            System::Charmonium => 1.209,
            System::Bottomonium => 4.350,
        }
    }

    /// Level pairs `(lower, upper)` whose mass differences are fitted.
    pub fn fitted_splittings(&self) -> [(u64, u64); 2] {
        match self {
            System::Charmonium => [(0, 1), (2, 3)],
            System::Bottomonium => [(0, 2), (1, 3)],
        }
    }

    /// Default lambda values of the reference tables, in GeV^-1.
    pub fn table_lambdas(&self) -> [f64; 3] {
        match self {
            System::Charmonium => [0.0, -0.2, -0.4],
            System::Bottomonium => [0.0, -0.3, -0.6],
        }
    }
}

impl fmt::Display for System {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for System {
    type Err = QuarkoniaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ccbar" | "charmonium" => Ok(System::Charmonium),
            "bbbar" | "bottomonium" => Ok(System::Bottomonium),
            other => Err(QuarkoniaError::Invalid(format!("unknown quarkonium system `{other}`"))),
        }
    }
}

/// `nS` label of level `n`.
pub fn state_label(n: u64) -> String {
    format!("{}S", n + 1)
}

fn parse_state(label: &str) -> Option<u64> {
    let digits = label.trim().strip_suffix('S')?;
    let radial: u64 = digits.parse().ok()?;
    radial.checked_sub(1)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuarkoniaParams {
    pub k_sq: f64,
    pub p_sq: f64,
    /// GeV^-1.
    pub lambda: f64,
    pub quark_mass: f64,
    pub antiquark_mass: f64,
}

impl QuarkoniaParams {
    /// Parameters from real `k` and `p`.
    pub fn new(k: f64, p: f64, lambda: f64, quark_mass: f64, antiquark_mass: f64) -> Self {
        Self {
            k_sq: k * k,
            p_sq: p * p,
            lambda,
            quark_mass,
            antiquark_mass,
        }
    }

    pub fn constituent_mass(&self) -> f64 {
        self.quark_mass + self.antiquark_mass
    }
}

fn radial_square(n: u64) -> f64 {
    (2.0 * n as f64 + 1.0).powi(2)
}

/// `beta = -k^2 [(2n+1)^2 + p^2/(2n+1)^2]`.
pub fn beta(n: u64, k: f64, p: f64) -> f64 {
    beta_from_squares(n, k * k, p * p)
}

pub fn beta_from_squares(n: u64, k_sq: f64, p_sq: f64) -> f64 {
    let s = radial_square(n);
    -k_sq * (s + p_sq / s)
}

/// `E_n = beta / (16 - lambda beta)`.
pub fn energy(n: u64, params: &QuarkoniaParams) -> Result<f64, QuarkoniaError> {
    let b = beta_from_squares(n, params.k_sq, params.p_sq);
    if params.lambda == 0.0 {
        return Ok(b / 16.0);
    }
    let denominator = 16.0 - params.lambda * b;
    if denominator.abs() < 1e-10 {
        return Err(QuarkoniaError::Pole { n, denominator });
    }
    Ok(b / denominator)
}

pub fn mass(n: u64, params: &QuarkoniaParams) -> Result<f64, QuarkoniaError> {
    Ok(params.constituent_mass() + energy(n, params)?)
}

/// Mass bound `m_q + m_qbar - 1/lambda` approached as `n` grows (`lambda < 0`).
pub fn saturation_mass(params: &QuarkoniaParams) -> Option<f64> {
    (params.lambda < 0.0).then(|| params.constituent_mass() - 1.0 / params.lambda)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentalRow {
    pub system: System,
    pub state: String,
    pub mass: Option<f64>,
    pub source: String,
}

/// Experimental S-wave masses; absent entries carry `mass = None`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentalTable {
    rows: Vec<ExperimentalRow>,
}

const BUILTIN_TABLE: &str = include_str!("../data/quarkonia_experimental.csv");

/// File name looked up inside a data directory.
pub const DATA_FILE_NAME: &str = "quarkonia_experimental.csv";

impl ExperimentalTable {
    pub fn builtin() -> Self {
        Self::parse(BUILTIN_TABLE).expect("bundled experimental table is well formed")
    }

    pub fn load(path: &Path) -> Result<Self, QuarkoniaError> {
        let text = std::fs::read_to_string(path).map_err(|e| QuarkoniaError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::parse(&text)
    }

    /// Parses `system,state,mass_GeV,source` lines. `#` starts a comment
    /// line; the header line is optional; `---` or an empty field marks a
    /// missing mass.
    pub fn parse(text: &str) -> Result<Self, QuarkoniaError> {
        let mut rows = Vec::new();
        let mut seen = HashSet::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let line_no = idx + 1;
            if line.is_empty() || line.starts_with('#') || line.starts_with("system,") {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 4 {
                return Err(QuarkoniaError::Parse {
                    line: line_no,
                    message: format!("expected 4 fields, found {}", fields.len()),
                });
            }
            let system: System = fields[0].parse().map_err(|e: QuarkoniaError| QuarkoniaError::Parse {
                line: line_no,
                message: e.to_string(),
            })?;
            if parse_state(fields[1]).is_none() {
                return Err(QuarkoniaError::Parse {
                    line: line_no,
                    message: format!("state `{}` is not of the form nS", fields[1]),
                });
            }
            let mass = match fields[2] {
                "" | "---" => None,
                value => {
                    let m: f64 = value.parse().map_err(|_| QuarkoniaError::Parse {
                        line: line_no,
                        message: format!("mass `{value}` is not a number"),
                    })?;
                    if !(m > 0.0) || !m.is_finite() {
                        return Err(QuarkoniaError::Parse {
                            line: line_no,
                            message: format!("mass {m} must be positive"),
                        });
                    }
                    Some(m)
                }
            };
            if !seen.insert((system, fields[1].to_string())) {
                return Err(QuarkoniaError::Parse {
                    line: line_no,
                    message: format!("duplicate state {} {}", system, fields[1]),
                });
            }
            rows.push(ExperimentalRow {
                system,
                state: fields[1].to_string(),
                mass,
                source: fields[3].to_string(),
            });
        }
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &[ExperimentalRow] {
        &self.rows
    }

    /// Experimental mass of level `n` (state `(n+1)S`), if present.
    pub fn mass(&self, system: System, n: u64) -> Option<f64> {
        let label = state_label(n);
        self.rows
            .iter()
            .find(|r| r.system == system && r.state == label)
            .and_then(|r| r.mass)
    }

    fn required(&self, system: System, n: u64) -> Result<f64, QuarkoniaError> {
        self.mass(system, n).ok_or_else(|| QuarkoniaError::MissingData {
            system,
            state: state_label(n),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuarkoniaFit {
    pub system: System,
    pub lambda: f64,
    pub k_sq: f64,
    pub p_sq: f64,
    /// Model minus experimental splitting for the two fitted pairs, GeV.
    pub residuals: [f64; 2],
    pub converged: bool,
    pub iterations: usize,
    pub quark_mass: f64,
}

impl QuarkoniaFit {
    pub fn params(&self) -> QuarkoniaParams {
        QuarkoniaParams {
            k_sq: self.k_sq,
            p_sq: self.p_sq,
            lambda: self.lambda,
            quark_mass: self.quark_mass,
            antiquark_mass: self.quark_mass,
        }
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals[0].abs().max(self.residuals[1].abs())
    }
}

pub const FIT_TOLERANCE: f64 = 1e-8;
const FIT_MAX_ITER: usize = 200;

/// Model splittings at `(K, P) = (k^2, k^2 p^2)` minus their targets.
fn splitting_residuals(
    pairs: &[(u64, u64); 2],
    targets: &[f64; 2],
    lambda: f64,
    kp: [f64; 2],
) -> Option<[f64; 2]> {
    let level = |n: u64| {
        let s = radial_square(n);
        let b = -(kp[0] * s + kp[1] / s);
        let d = 16.0 - lambda * b;
        (d.abs() >= 1e-10).then(|| b / d)
    };
    let mut out = [0.0; 2];
    for (i, &(lo, hi)) in pairs.iter().enumerate() {
        out[i] = level(hi)? - level(lo)? - targets[i];
    }
    out.iter().all(|r| r.is_finite()).then_some(out)
}

fn max_abs(r: &[f64; 2]) -> f64 {
    r[0].abs().max(r[1].abs())
}

/// Fits `(k^2, p^2)` so that the model reproduces the system's two
/// experimental mass splittings at the given `lambda`.
///
/// The unknowns are `(k^2, k^2 p^2)`, in which the `lambda = 0` problem is
/// linear; its solution seeds a damped Newton iteration with a central
/// difference Jacobian.
pub fn fit(
    system: System,
    lambda: f64,
    table: &ExperimentalTable,
    quark_mass: f64,
) -> Result<QuarkoniaFit, QuarkoniaError> {
    if !(quark_mass > 0.0) {
        return Err(QuarkoniaError::Invalid(format!("quark mass {quark_mass} must be positive")));
    }
    if !lambda.is_finite() {
        return Err(QuarkoniaError::Invalid(format!("lambda {lambda} is not finite")));
    }
    let pairs = system.fitted_splittings();
    let mut targets = [0.0; 2];
    for (i, &(lo, hi)) in pairs.iter().enumerate() {
        targets[i] = table.required(system, hi)? - table.required(system, lo)?;
    }

    // lambda = 0: dE = -(K ds + P d(1/s)) / 16 is linear in (K, P)
    let columns = vec![
        pairs.iter().map(|&(lo, hi)| -(radial_square(hi) - radial_square(lo)) / 16.0).collect(),
        pairs
            .iter()
            .map(|&(lo, hi)| -(1.0 / radial_square(hi) - 1.0 / radial_square(lo)) / 16.0)
            .collect::<Vec<f64>>(),
    ];
    let mut kp: [f64; 2] = least_squares(&columns, &targets)
        .map(|c| [c[0], c[1]])
        .ok_or_else(|| QuarkoniaError::Infeasible("splitting equations are degenerate".into()))?;
    if kp[0] == 0.0 || !kp.iter().all(|v| v.is_finite()) {
        return Err(QuarkoniaError::Infeasible(format!("k^2 = {} from the linear seed", kp[0])));
    }

    let mut residual = splitting_residuals(&pairs, &targets, lambda, kp)
        .ok_or_else(|| QuarkoniaError::Infeasible("seed sits on a pole of the deformed spectrum".into()))?;
    let mut iterations = 0;
    while max_abs(&residual) >= FIT_TOLERANCE {
        if iterations >= FIT_MAX_ITER {
            return Err(QuarkoniaError::NonConvergence {
                iterations,
                residual: max_abs(&residual),
            });
        }
        iterations += 1;

        let mut jac = [[0.0; 2]; 2];
        for j in 0..2 {
            let h = 1e-6 * kp[j].abs().max(1e-6);
            let mut plus = kp;
            let mut minus = kp;
            plus[j] += h;
            minus[j] -= h;
            let rp = splitting_residuals(&pairs, &targets, lambda, plus);
            let rm = splitting_residuals(&pairs, &targets, lambda, minus);
            let (rp, rm) = rp.zip(rm).ok_or_else(|| QuarkoniaError::NonConvergence {
                iterations,
                residual: max_abs(&residual),
            })?;
            for i in 0..2 {
                jac[i][j] = (rp[i] - rm[i]) / (2.0 * h);
            }
        }
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        if det == 0.0 || !det.is_finite() {
            return Err(QuarkoniaError::NonConvergence {
                iterations,
                residual: max_abs(&residual),
            });
        }
        let step = [
            (jac[1][1] * residual[0] - jac[0][1] * residual[1]) / det,
            (jac[0][0] * residual[1] - jac[1][0] * residual[0]) / det,
        ];

        let mut damping = 1.0;
        loop {
            let trial = [kp[0] - damping * step[0], kp[1] - damping * step[1]];
            if let Some(r) = splitting_residuals(&pairs, &targets, lambda, trial) {
                if max_abs(&r) < max_abs(&residual) {
                    kp = trial;
                    residual = r;
                    break;
                }
            }
            damping *= 0.5;
            if damping < 1e-10 {
                return Err(QuarkoniaError::NonConvergence {
                    iterations,
                    residual: max_abs(&residual),
                });
            }
        }
    }

    Ok(QuarkoniaFit {
        system,
        lambda,
        k_sq: kp[0],
        p_sq: kp[1] / kp[0],
        residuals: residual,
        converged: true,
        iterations,
        quark_mass,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MassRow {
    pub n: u64,
    pub state: String,
    pub mass: f64,
    pub experimental: Option<f64>,
    /// Model minus experiment, when the experimental mass exists.
    pub deviation: Option<f64>,
}

/// One lambda column of a mass table.
#[derive(Debug, Clone, PartialEq)]
pub struct MassColumn {
    pub lambda: f64,
    pub fit: Result<QuarkoniaFit, QuarkoniaError>,
    pub rows: Vec<MassRow>,
    pub saturation_mass: Option<f64>,
}

/// Fits each lambda and lists `M(nS)` for `n = 0..=n_max`. A failed fit
/// leaves an empty column carrying its error.
pub fn mass_table(
    system: System,
    lambdas: &[f64],
    table: &ExperimentalTable,
    quark_mass: f64,
    n_max: u64,
) -> Vec<MassColumn> {
    lambdas
        .iter()
        .map(|&lambda| {
            let fit = fit(system, lambda, table, quark_mass);
            let rows = match &fit {
                Ok(f) => {
                    let params = f.params();
                    (0..=n_max)
                        .map_while(|n| {
                            let m = mass(n, &params).ok()?;
                            let experimental = table.mass(system, n);
                            Some(MassRow {
                                n,
                                state: state_label(n),
                                mass: m,
                                experimental,
                                deviation: experimental.map(|e| m - e),
                            })
                        })
                        .collect()
                }
                Err(_) => Vec::new(),
            };
            let saturation_mass = fit.as_ref().ok().and_then(|f| saturation_mass(&f.params()));
            MassColumn {
                lambda,
                fit,
                rows,
                saturation_mass,
            }
        })
        .collect()
}
