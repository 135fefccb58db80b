//! Python module `edsat`.

use pyo3::exceptions::{PyArithmeticError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use edsat::quarkonia::{self, ExperimentalTable, QuarkoniaError, System};
use edsat::specfun::{self, SeriesParams, SpecfunError};
use edsat::spectrum::{self, BaseSpectrum, SpectrumError};
use edsat::xform::{self, RadialPower, SplitModel, TransformParams, TransformSpec, XformError};

fn specfun_err(e: SpecfunError) -> PyErr {
    match e {
        SpecfunError::NonConvergence { .. } => PyArithmeticError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn spectrum_err(e: SpectrumError) -> PyErr {
    match e {
        SpectrumError::Domain(_) => PyValueError::new_err(e.to_string()),
        _ => PyArithmeticError::new_err(e.to_string()),
    }
}

fn quark_err(e: QuarkoniaError) -> PyErr {
    match e {
        QuarkoniaError::Invalid(_) | QuarkoniaError::Parse { .. } | QuarkoniaError::MissingData { .. } => {
            PyValueError::new_err(e.to_string())
        }
        QuarkoniaError::Io { .. } => PyRuntimeError::new_err(e.to_string()),
        _ => PyArithmeticError::new_err(e.to_string()),
    }
}

fn xform_err(e: XformError) -> PyErr {
    match e {
        XformError::Domain { .. } | XformError::OutOfRange { .. } | XformError::Grid { .. } | XformError::QuantumNumbers(_) => {
            PyValueError::new_err(e.to_string())
        }
        _ => PyArithmeticError::new_err(e.to_string()),
    }
}

fn parse_system(name: &str) -> PyResult<System> {
    name.parse().map_err(|e: QuarkoniaError| PyValueError::new_err(e.to_string()))
}

fn table(data_file: Option<&str>) -> PyResult<ExperimentalTable> {
    match data_file {
        Some(path) => ExperimentalTable::load(path.as_ref()).map_err(quark_err),
        None => Ok(ExperimentalTable::builtin()),
    }
}

#[pyfunction]
#[pyo3(signature = (a, c, x, max_terms = 500, tol = 1e-15))]
fn hyp1f1(a: f64, c: f64, x: f64, max_terms: usize, tol: f64) -> PyResult<f64> {
    specfun::hyp1f1(a, c, x, &SeriesParams { max_terms, tol }).map_err(specfun_err)
}

#[pyfunction]
#[pyo3(signature = (a, b, c, x, max_terms = 500, tol = 1e-15))]
fn hyp2f1(a: f64, b: f64, c: f64, x: f64, max_terms: usize, tol: f64) -> PyResult<f64> {
    specfun::hyp2f1(a, b, c, x, &SeriesParams { max_terms, tol }).map_err(specfun_err)
}

/// Deformation `f(E) = (1 + lambda E)^q` with level equation
/// `E = (1 + lambda E)^(q/2) E0`.
#[pyclass(frozen, skip_from_py_object, module = "edsat")]
#[derive(Clone, Copy)]
struct SaturationModel {
    inner: spectrum::SaturationModel,
}

#[pymethods]
impl SaturationModel {
    #[new]
    fn new(lam: f64, q: f64) -> PyResult<Self> {
        let inner = spectrum::SaturationModel::new(lam, q).map_err(spectrum_err)?;
        Ok(Self { inner })
    }

    #[getter(lam)]
    fn lambda(&self) -> f64 {
        self.inner.lambda
    }

    #[getter]
    fn q(&self) -> f64 {
        self.inner.q
    }

    fn deformation(&self, energy: f64) -> f64 {
        self.inner.deformation(energy)
    }

    fn level_residual(&self, energy: f64, e0: f64) -> f64 {
        self.inner.level_residual(energy, e0)
    }

    /// `(energy, branch)` of the level with base energy `e0`.
    #[pyo3(signature = (e0, method = "auto"))]
    fn solve(&self, e0: f64, method: &str) -> PyResult<(f64, &'static str)> {
        let sol = match method {
            "auto" => spectrum::solve(&self.inner, e0),
            "closed" => spectrum::solve_closed(&self.inner, e0),
            "generic" => spectrum::solve_generic(&self.inner, e0),
            other => return Err(PyValueError::new_err(format!("unknown method {other:?}"))),
        }
        .map_err(spectrum_err)?;
        Ok((sol.energy, sol.branch.as_str()))
    }

    fn saturation_limit(&self) -> PyResult<f64> {
        spectrum::saturation_limit(&self.inner).map_err(spectrum_err)
    }

    fn __repr__(&self) -> String {
        format!("SaturationModel(lam={}, q={})", self.inner.lambda, self.inner.q)
    }
}

#[pyclass(frozen, get_all, skip_from_py_object, module = "edsat")]
#[derive(Clone)]
struct SolvedLevel {
    n: u64,
    base_energy: f64,
    energy: f64,
    valid: bool,
    branch: &'static str,
    reason: Option<String>,
}

#[pymethods]
impl SolvedLevel {
    fn __repr__(&self) -> String {
        format!(
            "SolvedLevel(n={}, base_energy={}, energy={}, valid={}, branch={:?})",
            self.n, self.base_energy, self.energy, self.valid, self.branch
        )
    }
}

/// Deformed levels `n = first..=n_max` of `ho`, `hydrogen` or a
/// quarkonium system (`ccbar`, `bbbar`, fitted at `lam`).
#[pyfunction]
#[pyo3(name = "spectrum", signature = (system, lam, q, n_max, hbar_omega = 1.0, rydberg = 0.5, data_file = None))]
fn spectrum_levels(
    system: &str,
    lam: f64,
    q: f64,
    n_max: u64,
    hbar_omega: f64,
    rydberg: f64,
    data_file: Option<&str>,
) -> PyResult<Vec<SolvedLevel>> {
    let model = spectrum::SaturationModel::new(lam, q).map_err(spectrum_err)?;
    let base = match system {
        "ho" => BaseSpectrum::harmonic_oscillator(hbar_omega),
        "hydrogen" => BaseSpectrum::hydrogen(rydberg),
        other => {
            let s = parse_system(other)?;
            let fit = quarkonia::fit(s, lam, &table(data_file)?, s.default_quark_mass()).map_err(quark_err)?;
            BaseSpectrum::Quarkonia {
                k_sq: fit.k_sq,
                p_sq: fit.p_sq,
            }
        }
    };
    Ok(spectrum::spectrum_table(&base, &model, n_max)
        .into_iter()
        .map(|l| SolvedLevel {
            n: l.n,
            base_energy: l.base_energy,
            energy: l.energy,
            valid: l.valid,
            branch: l.branch.as_str(),
            reason: l.reason,
        })
        .collect())
}

#[pyclass(frozen, get_all, skip_from_py_object, module = "edsat")]
#[derive(Clone)]
struct QuarkoniaFit {
    system: &'static str,
    lam: f64,
    k_sq: f64,
    p_sq: f64,
    residuals: (f64, f64),
    iterations: usize,
    quark_mass: f64,
}

impl From<quarkonia::QuarkoniaFit> for QuarkoniaFit {
    fn from(f: quarkonia::QuarkoniaFit) -> Self {
        Self {
            system: f.system.label(),
            lam: f.lambda,
            k_sq: f.k_sq,
            p_sq: f.p_sq,
            residuals: (f.residuals[0], f.residuals[1]),
            iterations: f.iterations,
            quark_mass: f.quark_mass,
        }
    }
}

#[pymethods]
impl QuarkoniaFit {
    /// Spin-averaged mass of state `n` (1S is `n = 0`).
    fn mass(&self, n: u64) -> PyResult<f64> {
        let params = quarkonia::QuarkoniaParams {
            k_sq: self.k_sq,
            p_sq: self.p_sq,
            lambda: self.lam,
            quark_mass: self.quark_mass,
            antiquark_mass: self.quark_mass,
        };
        quarkonia::mass(n, &params).map_err(quark_err)
    }

    fn __repr__(&self) -> String {
        format!(
            "QuarkoniaFit(system={:?}, lam={}, k_sq={}, p_sq={})",
            self.system, self.lam, self.k_sq, self.p_sq
        )
    }
}

#[pyfunction]
#[pyo3(signature = (system, lam, quark_mass = None, data_file = None))]
fn fit(system: &str, lam: f64, quark_mass: Option<f64>, data_file: Option<&str>) -> PyResult<QuarkoniaFit> {
    let s = parse_system(system)?;
    let m = quark_mass.unwrap_or(s.default_quark_mass());
    quarkonia::fit(s, lam, &table(data_file)?, m).map(Into::into).map_err(quark_err)
}

/// Rows `(state, lambda, mass, experimental, deviation)`; lambdas whose
/// fit fails are skipped.
#[pyfunction]
#[pyo3(signature = (system, lambdas, quark_mass = None, n_max = 8, data_file = None))]
#[allow(clippy::type_complexity)]
fn mass_table(
    system: &str,
    lambdas: Vec<f64>,
    quark_mass: Option<f64>,
    n_max: u64,
    data_file: Option<&str>,
) -> PyResult<Vec<(String, f64, f64, Option<f64>, Option<f64>)>> {
    let s = parse_system(system)?;
    let m = quark_mass.unwrap_or(s.default_quark_mass());
    let columns = quarkonia::mass_table(s, &lambdas, &table(data_file)?, m, n_max);
    Ok(columns
        .iter()
        .flat_map(|c| {
            c.rows
                .iter()
                .map(move |r| (r.state.clone(), c.lambda, r.mass, r.experimental, r.deviation))
        })
        .collect())
}

#[pyfunction]
#[pyo3(signature = (n, l, lam, q, omega, r))]
fn ho_eigenfunction(n: u32, l: u32, lam: f64, q: f64, omega: f64, r: f64) -> PyResult<f64> {
    let model = spectrum::SaturationModel::new(lam, q).map_err(spectrum_err)?;
    xform::ho_eigenfunction(n, l, &model, omega, r).map_err(xform_err)
}

#[pyfunction]
#[pyo3(signature = (n, l, lam, q, bohr_radius, u, corrected = false))]
fn hydrogen_eigenfunction(n: u32, l: u32, lam: f64, q: f64, bohr_radius: f64, u: f64, corrected: bool) -> PyResult<f64> {
    let model = spectrum::SaturationModel::new(lam, q).map_err(spectrum_err)?;
    let power = if corrected { RadialPower::Corrected } else { RadialPower::Printed };
    xform::hydrogen_eigenfunction(n, l, &model, bohr_radius, u, power).map_err(xform_err)
}

fn transform(system: &str, k: f64, c: f64, a: f64) -> PyResult<(TransformSpec, SplitModel)> {
    let params = TransformParams { a, b: 0.0, c, k };
    match system {
        "ho" => Ok((TransformSpec::harmonic_oscillator(params), SplitModel::oscillator())),
        "hydrogen" => Ok((TransformSpec::hydrogen(params), SplitModel::coulomb())),
        other => Err(PyValueError::new_err(format!("no transform for system {other:?}"))),
    }
}

/// `(x, W, v)` of the numerical transform at `u`.
#[pyfunction]
#[pyo3(signature = (system, u, k = 2.0, c = 1.5, a = -1.0))]
fn transform_sample(system: &str, u: f64, k: f64, c: f64, a: f64) -> PyResult<(f64, f64, f64)> {
    let (spec, _) = transform(system, k, c, a)?;
    let s = spec.sample(u).map_err(xform_err)?;
    Ok((s.x, s.weight, s.potential))
}

/// Energy separated from the transformed equation on `grid`.
#[pyfunction]
#[pyo3(signature = (system, grid, k = 2.0, c = 1.5, a = -1.0, hbar = 1.0, mass = 1.0))]
fn transform_energy(system: &str, grid: Vec<f64>, k: f64, c: f64, a: f64, hbar: f64, mass: f64) -> PyResult<f64> {
    let (spec, split) = transform(system, k, c, a)?;
    xform::split_potential_energy(&spec, &grid, hbar, mass, &split)
        .map(|r| r.energy)
        .map_err(xform_err)
}

#[pymodule(name = "edsat")]
fn edsat_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<SaturationModel>()?;
    m.add_class::<SolvedLevel>()?;
    m.add_class::<QuarkoniaFit>()?;
    m.add_function(wrap_pyfunction!(hyp1f1, m)?)?;
    m.add_function(wrap_pyfunction!(hyp2f1, m)?)?;
    m.add_function(wrap_pyfunction!(spectrum_levels, m)?)?;
    m.add_function(wrap_pyfunction!(fit, m)?)?;
    m.add_function(wrap_pyfunction!(mass_table, m)?)?;
    m.add_function(wrap_pyfunction!(ho_eigenfunction, m)?)?;
    m.add_function(wrap_pyfunction!(hydrogen_eigenfunction, m)?)?;
    m.add_function(wrap_pyfunction!(transform_sample, m)?)?;
    m.add_function(wrap_pyfunction!(transform_energy, m)?)?;
    Ok(())
}
