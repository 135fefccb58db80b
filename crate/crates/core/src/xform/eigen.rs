//! Radial eigenfunctions of the deformed oscillator and Coulomb problems,
//! in units `hbar = m = 1`. Normalisation constants are left at one.

use crate::specfun::{hyp1f1, SeriesParams};
use crate::spectrum::{solve, SaturationModel};

use super::XformError;

/// Solved oscillator level together with the constants of its radial
/// function `r^(l+1) exp(-omega sqrt(f) r^2 / 2) 1F1((l-n)/2; l+3/2; k^2 r^2 / 4)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HoEigenstate {
    pub n: u32,
    pub l: u32,
    pub omega: f64,
    /// Self-consistent `E_n`.
    pub energy: f64,
    /// `f(E_n)`.
    pub deformation: f64,
    /// `k^2 = 4 omega f(E_n)^(1/2)`.
    pub k_sq: f64,
}

impl HoEigenstate {
    pub fn new(n: u32, l: u32, model: &SaturationModel, omega: f64) -> Result<Self, XformError> {
        if l > n || !(n - l).is_multiple_of(2) {
            return Err(XformError::QuantumNumbers(format!(
                "oscillator needs 0 <= l <= n with n - l even, got n = {n}, l = {l}"
            )));
        }
        if !(omega > 0.0) {
            return Err(XformError::QuantumNumbers(format!("omega = {omega} must be positive")));
        }
        let e0 = omega * (n as f64 + 1.5);
        let energy = solve(model, e0)?.energy;
        let deformation = model.deformation(energy);
        Ok(Self {
            n,
            l,
            omega,
            energy,
            deformation,
            k_sq: 4.0 * omega * deformation.sqrt(),
        })
    }

    /// Coefficient `omega^2 f(E_n)` of `r^2 / 2` in the radial potential.
    pub fn spring(&self) -> f64 {
        self.omega * self.omega * self.deformation
    }

    pub fn value(&self, r: f64) -> Result<f64, XformError> {
        let l = self.l as f64;
        let a = (l - self.n as f64) / 2.0;
        let z = r * r * self.k_sq / 4.0;
        let series = hyp1f1(a, l + 1.5, z, &SeriesParams::default())?;
        Ok(r.powf(l + 1.0) * (-z / 2.0).exp() * series)
    }
}

/// Oscillator eigenfunction `phi_{n l}(r)` at the self-consistent level.
pub fn ho_eigenfunction(
    n: u32,
    l: u32,
    model: &SaturationModel,
    omega: f64,
    r: f64,
) -> Result<f64, XformError> {
    HoEigenstate::new(n, l, model, omega)?.value(r)
}

/// Power of `u` in front of the Coulomb radial function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RadialPower {
    /// `u^(l-1)`.
    #[default]
    Printed,
    /// `u^(l+1)`, the usual reduced radial function.
    Corrected,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HydrogenEigenstate {
    pub n: u32,
    pub l: u32,
    pub bohr_radius: f64,
    pub energy: f64,
    /// `f(E_n)^(1/2)`, the factor entering the exponent and the series.
    pub scale: f64,
    pub power: RadialPower,
}

impl HydrogenEigenstate {
    /// Level `n` with base energy `-1 / (2 a0^2)` per `n^2`.
    pub fn new(
        n: u32,
        l: u32,
        model: &SaturationModel,
        bohr_radius: f64,
        power: RadialPower,
    ) -> Result<Self, XformError> {
        if n == 0 || l >= n {
            return Err(XformError::QuantumNumbers(format!(
                "Coulomb levels need n >= 1 and l < n, got n = {n}, l = {l}"
            )));
        }
        if !(bohr_radius > 0.0) {
            return Err(XformError::QuantumNumbers(format!("a0 = {bohr_radius} must be positive")));
        }
        let nf = n as f64;
        let e0 = -1.0 / (2.0 * bohr_radius * bohr_radius * nf * nf);
        let energy = solve(model, e0)?.energy;
        Ok(Self {
            n,
            l,
            bohr_radius,
            energy,
            scale: model.deformation(energy).sqrt(),
            power,
        })
    }

    pub fn value(&self, u: f64) -> Result<f64, XformError> {
        let l = self.l as f64;
        let na = self.n as f64 * self.bohr_radius;
        let exponent = match self.power {
            RadialPower::Printed => l - 1.0,
            RadialPower::Corrected => l + 1.0,
        };
        let series = hyp1f1(
            l + 1.0 - self.n as f64,
            2.0 * (l + 1.0),
            2.0 * self.scale * u / na,
            &SeriesParams::default(),
        )?;
        Ok(u.powf(exponent) * (-u * self.scale / na).exp() * series)
    }
}

/// Coulomb eigenfunction `phi_{n l}(u)` at the self-consistent level.
pub fn hydrogen_eigenfunction(
    n: u32,
    l: u32,
    model: &SaturationModel,
    bohr_radius: f64,
    u: f64,
    power: RadialPower,
) -> Result<f64, XformError> {
    HydrogenEigenstate::new(n, l, model, bohr_radius, power)?.value(u)
}
