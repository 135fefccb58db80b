//! Self-consistent energies for potentials whose strength depends on the
//! eigenvalue through `f(E) = (1 + lambda E)^q`.
//!
//! For the oscillator and the Coulomb problem the level equation is
//! `E = (1 + lambda E)^(q/2) E0`, with `E0` the undeformed level. The
//! exponents 0, 1, 2 and 4 reduce it to at most a quadratic and are solved
//! in closed form; any other exponent goes through [`solve_generic`], which
//! follows the root continuously from `lambda = 0`.

use thiserror::Error;

use crate::numeric::{newton_bisect, RootError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectrumError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("pole: 1 - lambda*E0 = {denominator:e} vanishes")]
    Pole { denominator: f64 },
    #[error("complex root: discriminant 1 - 4*lambda*E0 = {discriminant} is negative")]
    ComplexRoot { discriminant: f64 },
    #[error("exponent q = {q} has no closed form (use the continuation solver)")]
    NoClosedForm { q: f64 },
    #[error("continuation failed at lambda = {lambda}: {reason}")]
    Continuation { lambda: f64, reason: String },
}

/// Deformation `f(E) = (1 + lambda E)^q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaturationModel {
    pub lambda: f64,
    pub q: f64,
}

impl SaturationModel {
    pub fn new(lambda: f64, q: f64) -> Result<Self, SpectrumError> {
        if !lambda.is_finite() {
            return Err(SpectrumError::Domain(format!("lambda = {lambda} is not finite")));
        }
        if !(q >= 0.0) || !q.is_finite() {
            return Err(SpectrumError::Domain(format!("q = {q} must be a finite non-negative exponent")));
        }
        Ok(Self { lambda, q })
    }

    pub fn deformation(&self, energy: f64) -> f64 {
        (1.0 + self.lambda * energy).powf(self.q)
    }

    /// `q` is one of the exponents with an algebraic solution.
    pub fn has_closed_form(&self) -> bool {
        matches!(self.q, q if q == 0.0 || q == 1.0 || q == 2.0 || q == 4.0)
    }

    /// Residual `E - (1 + lambda E)^(q/2) E0` of the level equation.
    pub fn level_residual(&self, energy: f64, e0: f64) -> f64 {
        energy - (1.0 + self.lambda * energy).max(0.0).powf(0.5 * self.q) * e0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    Plus,
    Minus,
    Unique,
}

impl Branch {
    pub fn as_str(&self) -> &'static str {
        match self {
            Branch::Plus => "plus",
            Branch::Minus => "minus",
            Branch::Unique => "unique",
        }
    }
}

/// Undeformed spectrum `E0(n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BaseSpectrum {
    /// `hbar omega (n + 3/2)`.
    HarmonicOscillator { hbar_omega: f64 },
    /// `-E_R / n^2`, `n >= 1`.
    Hydrogen { rydberg: f64 },
    /// `-(k^2/16) [(2n+1)^2 + p^2/(2n+1)^2]`, stored through the squares
    /// `k^2` and `p^2` so that fitted parameter sets of either sign fit.
    Quarkonia { k_sq: f64, p_sq: f64 },
}

impl BaseSpectrum {
    pub fn harmonic_oscillator(hbar_omega: f64) -> Self {
        BaseSpectrum::HarmonicOscillator { hbar_omega }
    }

    pub fn hydrogen(rydberg: f64) -> Self {
        BaseSpectrum::Hydrogen { rydberg }
    }

    pub fn quarkonia(k: f64, p: f64) -> Self {
        BaseSpectrum::Quarkonia {
            k_sq: k * k,
            p_sq: p * p,
        }
    }

    pub fn first_level(&self) -> u64 {
        match self {
            BaseSpectrum::Hydrogen { .. } => 1,
            _ => 0,
        }
    }

    /// Power of `f(E)` multiplying the base level. The oscillator and the
    /// Coulomb problem scale with `f^(1/2)`; the quarkonia spectrum carries
    /// `k^2 -> k^2 f` and so scales with `f` itself.
    pub fn deformation_power(&self) -> f64 {
        match self {
            BaseSpectrum::Quarkonia { .. } => 1.0,
            _ => 0.5,
        }
    }

    fn validate(&self) -> Result<(), SpectrumError> {
        let ok = match *self {
            BaseSpectrum::HarmonicOscillator { hbar_omega } => hbar_omega > 0.0 && hbar_omega.is_finite(),
            BaseSpectrum::Hydrogen { rydberg } => rydberg > 0.0 && rydberg.is_finite(),
            BaseSpectrum::Quarkonia { k_sq, p_sq } => k_sq.is_finite() && p_sq.is_finite() && k_sq != 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(SpectrumError::Domain(format!("invalid base spectrum parameters {self:?}")))
        }
    }
}

/// Base level `E0(n)`. The orbital number only enters through validation
/// elsewhere; the base spectra here are `l`-independent.
pub fn base_energy(spec: &BaseSpectrum, n: u64, _l: u64) -> Result<f64, SpectrumError> {
    spec.validate()?;
    let nf = n as f64;
    match *spec {
        BaseSpectrum::HarmonicOscillator { hbar_omega } => Ok(hbar_omega * (nf + 1.5)),
        BaseSpectrum::Hydrogen { rydberg } => {
            if n == 0 {
                Err(SpectrumError::Domain("hydrogen levels start at n = 1".into()))
            } else {
                Ok(-rydberg / (nf * nf))
            }
        }
        BaseSpectrum::Quarkonia { k_sq, p_sq } => {
            let s = (2.0 * nf + 1.0).powi(2);
            Ok(-(k_sq / 16.0) * (s + p_sq / s))
        }
    }
}

/// Energy and branch label of a solved level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Solution {
    pub energy: f64,
    pub branch: Branch,
}

/// Closed-form root of the level equation for `q` in {0, 1, 2, 4}, taking
/// the branch that reduces to `E0` at `lambda = 0`.
pub fn solve_closed(model: &SaturationModel, e0: f64) -> Result<Solution, SpectrumError> {
    let lam = model.lambda;
    let le = lam * e0;
    let q = model.q;
    if q == 0.0 {
        return Ok(Solution { energy: e0, branch: Branch::Unique });
    }
    if q == 1.0 {
        // E = E0 (lambda E0 + sqrt(lambda^2 E0^2 + 4)) / 2, rationalised when
        // the two terms cancel.
        let root = (le * le + 4.0).sqrt();
        let energy = if le >= 0.0 {
            e0 * (le + root) / 2.0
        } else {
            2.0 * e0 / (root - le)
        };
        return Ok(Solution { energy, branch: Branch::Plus });
    }
    if q == 2.0 {
        let denominator = 1.0 - le;
        if denominator.abs() < 1e-12 {
            return Err(SpectrumError::Pole { denominator });
        }
        return Ok(Solution {
            energy: e0 / denominator,
            branch: Branch::Unique,
        });
    }
    if q == 4.0 {
        if lam == 0.0 || e0 == 0.0 {
            return Ok(Solution { energy: e0, branch: Branch::Minus });
        }
        let discriminant = 1.0 - 4.0 * le;
        if discriminant < 0.0 {
            return Err(SpectrumError::ComplexRoot { discriminant });
        }
        // (1 - 2 lambda E0 - sqrt(D)) / (2 lambda^2 E0) = 2 E0 / (1 - 2 lambda E0 + sqrt(D))
        let energy = 2.0 * e0 / (1.0 - 2.0 * le + discriminant.sqrt());
        return Ok(Solution { energy, branch: Branch::Minus });
    }
    Err(SpectrumError::NoClosedForm { q })
}

const CONTINUATION_STEPS: usize = 64;
const ROOT_TOL: f64 = 1e-12;

fn certified(model: &SaturationModel, energy: f64, e0: f64) -> bool {
    model.level_residual(energy, e0).abs() < ROOT_TOL * energy.abs().max(1.0)
}

/// Root of the level equation for any `q >= 0`, found by stepping lambda
/// from 0 (where the root is `E0`) to its target and re-solving from the
/// previous root at every step.
pub fn solve_generic(model: &SaturationModel, e0: f64) -> Result<Solution, SpectrumError> {
    if !e0.is_finite() {
        return Err(SpectrumError::Domain(format!("base energy {e0} is not finite")));
    }
    if !(model.q >= 0.0) {
        return Err(SpectrumError::Domain(format!("q = {} is negative", model.q)));
    }
    if model.lambda == 0.0 || model.q == 0.0 || e0 == 0.0 {
        return Ok(Solution { energy: e0, branch: Branch::Unique });
    }

    let mut energy = e0;
    for step in 1..=CONTINUATION_STEPS {
        let lambda = model.lambda * step as f64 / CONTINUATION_STEPS as f64;
        let stage = SaturationModel { lambda, q: model.q };
        energy = continue_root(&stage, e0, energy)
            .map_err(|reason| SpectrumError::Continuation { lambda, reason })?;
    }

    if !certified(model, energy, e0) {
        return Err(SpectrumError::Continuation {
            lambda: model.lambda,
            reason: format!(
                "fixed-point residual {:e} above tolerance",
                model.level_residual(energy, e0)
            ),
        });
    }
    Ok(Solution { energy, branch: Branch::Unique })
}

fn continue_root(model: &SaturationModel, e0: f64, start: f64) -> Result<f64, String> {
    let lam = model.lambda;
    let half_q = 0.5 * model.q;
    // admissible side of the boundary 1 + lambda E = 0
    let boundary = -1.0 / lam;
    let clip = |e: f64| if lam < 0.0 { e.min(boundary) } else { e.max(boundary) };
    let h = |e: f64| model.level_residual(e, e0);
    let dh = |e: f64| {
        let base = (1.0 + lam * e).max(0.0);
        1.0 - half_q * lam * e0 * base.powf(half_q - 1.0)
    };

    let x0 = clip(start);
    let h0 = h(x0);
    if h0.abs() < ROOT_TOL * x0.abs().max(1.0) {
        return Ok(x0);
    }

    let mut width = 1e-6 * x0.abs().max(1.0);
    let bracket = loop {
        let lo = clip(x0 - width);
        let hi = clip(x0 + width);
        let below = h(lo).signum() != h0.signum();
        let above = h(hi).signum() != h0.signum();
        match (below, above) {
            (true, true) => return Err("two roots straddle the previous solution".into()),
            (true, false) => break (lo, x0),
            (false, true) => break (x0, hi),
            (false, false) => {}
        }
        let pinned = (lo == x0 || lo == boundary) && (hi == x0 || hi == boundary);
        if pinned || width > 1e12 * x0.abs().max(1.0) {
            return Err("root lost: no sign change before the boundary 1 + lambda E = 0".into());
        }
        width *= 2.0;
    };

    newton_bisect(
        |e| (h(e), dh(e)),
        bracket.0,
        bracket.1,
        |e| 0.25 * ROOT_TOL * e.abs().max(1.0),
        1e-16,
        400,
    )
    .map_err(|err: RootError| err.to_string())
}

/// Closed form when available, continuation otherwise.
pub fn solve(model: &SaturationModel, e0: f64) -> Result<Solution, SpectrumError> {
    if model.has_closed_form() {
        solve_closed(model, e0)
    } else {
        solve_generic(model, e0)
    }
}

/// Limit `-1/lambda` approached by the deformed spectrum as `n` grows.
pub fn saturation_limit(model: &SaturationModel) -> Result<f64, SpectrumError> {
    if model.lambda == 0.0 {
        return Err(SpectrumError::Domain("no saturation at lambda = 0".into()));
    }
    if model.q < 1.0 {
        return Err(SpectrumError::Domain(format!("no saturation for q = {} < 1", model.q)));
    }
    Ok(-1.0 / model.lambda)
}

/// One row of a deformed spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct SolvedLevel {
    pub n: u64,
    pub l: u64,
    pub base_energy: f64,
    pub energy: f64,
    pub branch: Branch,
    pub valid: bool,
    pub reason: Option<String>,
}

impl SolvedLevel {
    fn from_result(n: u64, l: u64, base_energy: f64, result: Result<Solution, SpectrumError>) -> Self {
        match result {
            Ok(sol) => Self {
                n,
                l,
                base_energy,
                energy: sol.energy,
                branch: sol.branch,
                valid: true,
                reason: None,
            },
            Err(err) => Self {
                n,
                l,
                base_energy,
                energy: f64::NAN,
                branch: Branch::Unique,
                valid: false,
                reason: Some(err.to_string()),
            },
        }
    }
}

/// Deformed level `n` of `spec` under `model`.
pub fn solve_level(spec: &BaseSpectrum, model: &SaturationModel, n: u64, l: u64) -> SolvedLevel {
    let e0 = match base_energy(spec, n, l) {
        Ok(e0) => e0,
        Err(err) => return SolvedLevel::from_result(n, l, f64::NAN, Err(err)),
    };
    // express the spectrum's power of f as the (1 + lambda E)^(q/2) form
    let effective = SaturationModel {
        lambda: model.lambda,
        q: 2.0 * spec.deformation_power() * model.q,
    };
    SolvedLevel::from_result(n, l, e0, solve(&effective, e0))
}

/// Levels from the first admissible `n` up to `n_max` with `l = 0`.
/// Failures are recorded per row.
pub fn spectrum_table(spec: &BaseSpectrum, model: &SaturationModel, n_max: u64) -> Vec<SolvedLevel> {
    (spec.first_level()..=n_max)
        .map(|n| solve_level(spec, model, n, 0))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn model(lambda: f64, q: f64) -> SaturationModel {
        SaturationModel::new(lambda, q).unwrap()
    }

    #[test]
    fn base_energy_examples() {
        let ho = BaseSpectrum::harmonic_oscillator(1.0);
        assert_eq!(base_energy(&ho, 0, 0).unwrap(), 1.5);
        let qq = BaseSpectrum::quarkonia(1.0, 0.0);
        assert_eq!(base_energy(&qq, 0, 0).unwrap(), -1.0 / 16.0);
        let h = BaseSpectrum::hydrogen(0.5);
        assert_eq!(base_energy(&h, 2, 0).unwrap(), -0.125);
        assert!(matches!(base_energy(&h, 0, 0), Err(SpectrumError::Domain(_))));
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(solve_closed(&model(0.0, 1.0), 2.5).unwrap().energy, 2.5);
        assert_eq!(solve_closed(&model(0.5, 2.0), 1.0).unwrap().energy, 2.0);
        let q4 = solve_closed(&model(-1.0, 4.0), 1.0).unwrap();
        assert_relative_eq!(q4.energy, (3.0 - 5f64.sqrt()) / 2.0, max_relative = 1e-15);
        assert_eq!(q4.branch, Branch::Minus);
        assert_eq!(solve_closed(&model(0.0, 4.0), 3.0).unwrap().energy, 3.0);
        assert_eq!(solve_closed(&model(-0.3, 4.0), 0.0).unwrap().energy, 0.0);
    }

    #[test]
    fn closed_form_matches_the_printed_branches() {
        // plus branch of the q = 1 quadratic and minus branch of q = 4, as printed
        let (lam, e0): (f64, f64) = (-0.4, 2.0);
        let plus = e0 * (lam * e0 + (lam * lam * e0 * e0 + 4.0).sqrt()) / 2.0;
        assert_relative_eq!(solve_closed(&model(lam, 1.0), e0).unwrap().energy, plus, max_relative = 1e-14);
        let minus = (1.0 - 2.0 * lam * e0 - (1.0 - 4.0 * lam * e0).sqrt()) / (2.0 * lam * lam * e0);
        assert_relative_eq!(solve_closed(&model(lam, 4.0), e0).unwrap().energy, minus, max_relative = 1e-13);
    }

    #[test]
    fn closed_form_failures() {
        assert!(matches!(solve_closed(&model(1.0, 2.0), 1.0), Err(SpectrumError::Pole { .. })));
        assert!(matches!(
            solve_closed(&model(1.0, 4.0), 1.0),
            Err(SpectrumError::ComplexRoot { .. })
        ));
        assert!(matches!(
            solve_closed(&model(-1.0, 3.0), 1.0),
            Err(SpectrumError::NoClosedForm { .. })
        ));
    }

    #[test]
    fn generic_examples() {
        for q in [0.5, 1.0, 3.0] {
            assert_eq!(solve_generic(&model(0.0, q), 7.0).unwrap().energy, 7.0);
        }
        assert_relative_eq!(solve_generic(&model(-0.2, 2.0), 3.0).unwrap().energy, 1.875, max_relative = 1e-13);
        let closed = solve_closed(&model(-0.4, 1.0), 2.0).unwrap().energy;
        let generic = solve_generic(&model(-0.4, 1.0), 2.0).unwrap().energy;
        assert!((closed - generic).abs() < 1e-10);
    }

    #[test]
    fn generic_handles_non_integer_exponents() {
        for (lam, q, e0) in [(-0.5, 3.0, 4.0), (-1.3, 0.7, 2.2), (0.05, 1.5, 1.0), (-0.02, 6.0, -3.0)] {
            let m = model(lam, q);
            let e = solve_generic(&m, e0).unwrap().energy;
            assert!(m.level_residual(e, e0).abs() <= 1e-12 * e.abs().max(1.0), "{lam} {q} {e0}");
        }
    }

    #[test]
    fn generic_reports_vanishing_roots() {
        // E = -3 (1 - 0.2 E)^3 has no real root
        assert!(solve_generic(&model(-0.2, 6.0), -3.0).is_err());
    }

    #[test]
    fn generic_fails_past_the_pole() {
        // q = 2, lambda E0 > 1: the continued root runs off to infinity
        assert!(matches!(
            solve_generic(&model(2.0, 2.0), 1.0),
            Err(SpectrumError::Continuation { .. })
        ));
    }

    #[test]
    fn saturation_limit_values() {
        assert_relative_eq!(saturation_limit(&model(-0.4, 1.0)).unwrap(), 2.5);
        assert_eq!(saturation_limit(&model(-1.0, 2.0)).unwrap(), 1.0);
        assert_relative_eq!(saturation_limit(&model(-0.6, 4.0)).unwrap(), 1.6667, epsilon = 5e-5);
        assert!(saturation_limit(&model(0.0, 1.0)).is_err());

        let level = solve_level(&BaseSpectrum::harmonic_oscillator(1.0), &model(-0.4, 1.0), 1_000_000, 0);
        assert!((level.energy - 2.5).abs() < 1e-5);
    }

    #[test]
    fn spectrum_table_examples() {
        let ho = BaseSpectrum::harmonic_oscillator(1.0);
        let rows = spectrum_table(&ho, &model(0.0, 1.0), 2);
        let energies: Vec<f64> = rows.iter().map(|r| r.energy).collect();
        assert_eq!(energies, vec![1.5, 2.5, 3.5]);

        let rows = spectrum_table(&ho, &model(-1.0, 2.0), 0);
        assert_relative_eq!(rows[0].energy, 0.6, max_relative = 1e-15);

        let h = spectrum_table(&BaseSpectrum::hydrogen(0.5), &model(-0.2, 1.0), 3);
        assert_eq!(h.first().unwrap().n, 1);
        assert_eq!(h.len(), 3);
    }

    #[test]
    fn invalid_rows_are_carried() {
        // q = 4, lambda > 0: the discriminant turns negative for large E0
        let rows = spectrum_table(&BaseSpectrum::harmonic_oscillator(1.0), &model(0.1, 4.0), 3);
        assert!(rows[0].valid);
        assert!(!rows[3].valid);
        assert!(rows[3].reason.as_deref().unwrap().contains("complex"));
    }

    #[test]
    fn quarkonia_rows_use_linear_deformation() {
        // E = (1 + lambda E) beta/16 has the root beta / (16 - lambda beta)
        let spec = BaseSpectrum::quarkonia(1.1, 2.0);
        let m = model(-0.4, 1.0);
        for row in spectrum_table(&spec, &m, 5) {
            let beta = 16.0 * row.base_energy;
            assert_relative_eq!(row.energy, beta / (16.0 - m.lambda * beta), max_relative = 1e-14);
        }
    }

    #[test]
    fn model_validation() {
        assert!(SaturationModel::new(-0.2, -1.0).is_err());
        assert!(SaturationModel::new(f64::NAN, 1.0).is_err());
        assert!(model(-0.2, 4.0).has_closed_form());
        assert!(!model(-0.2, 3.0).has_closed_form());
    }

    proptest! {
        #[test]
        fn fixed_point_certificate(lam in -2.0f64..0.0, e0 in 0.1f64..10.0, qi in 0usize..4) {
            let q = [0.0, 1.0, 2.0, 4.0][qi];
            let m = model(lam, q);
            let e = solve_closed(&m, e0).unwrap().energy;
            prop_assert!(m.level_residual(e, e0).abs() <= 1e-10 * e.abs().max(1.0));
        }

        #[test]
        fn deformed_oscillator_is_ordered(lam in -3.0f64..-0.01, qi in 0usize..3) {
            let q = [1.0, 2.0, 4.0][qi];
            let rows = spectrum_table(&BaseSpectrum::harmonic_oscillator(1.0), &model(lam, q), 40);
            let limit = -1.0 / lam;
            for pair in rows.windows(2) {
                prop_assert!(pair[1].energy >= pair[0].energy);
                prop_assert!((pair[1].energy - limit).abs() <= (pair[0].energy - limit).abs());
                prop_assert!(pair[1].energy < limit);
            }
        }
    }
}
