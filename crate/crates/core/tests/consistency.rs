//! Cross-module checks: the same quantity computed through different paths.

use approx::assert_relative_eq;

use edsat::quarkonia::{self, ExperimentalTable, QuarkoniaParams, System};
use edsat::spectrum::{solve_level, BaseSpectrum, SaturationModel};
use edsat::xform::{HoEigenstate, HydrogenEigenstate, RadialPower};

/// Generalised Laguerre polynomial by the three-term recurrence.
fn laguerre(k: u32, alpha: f64, x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, 1.0 + alpha - x);
    if k == 0 {
        return prev;
    }
    for j in 1..k {
        let j = j as f64;
        let next = ((2.0 * j + 1.0 + alpha - x) * cur - (j + alpha) * prev) / (j + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

fn binomial(top: f64, k: u32) -> f64 {
    (0..k).map(|i| (top - i as f64) / (i as f64 + 1.0)).product()
}

#[test]
fn oscillator_radial_functions_are_laguerre() {
    let model = SaturationModel::new(-0.3, 2.0).unwrap();
    for (n, l) in [(0u32, 0u32), (2, 0), (3, 1), (4, 2), (6, 0)] {
        let state = HoEigenstate::new(n, l, &model, 1.3).unwrap();
        let k = (n - l) / 2;
        let alpha = l as f64 + 0.5;
        for r in [0.3, 1.0, 1.7, 2.9] {
            let z = r * r * state.k_sq / 4.0;
            let want = r.powi(l as i32 + 1) * (-z / 2.0).exp() * laguerre(k, alpha, z) / binomial(k as f64 + alpha, k);
            assert_relative_eq!(state.value(r).unwrap(), want, max_relative = 1e-12, epsilon = 1e-14);
        }
    }
}

#[test]
fn coulomb_radial_functions_are_laguerre() {
    let model = SaturationModel::new(-0.2, 1.0).unwrap();
    for (n, l) in [(2u32, 1u32), (3, 0), (3, 1), (4, 2)] {
        let state = HydrogenEigenstate::new(n, l, &model, 1.0, RadialPower::Corrected).unwrap();
        let k = n - l - 1;
        let alpha = 2.0 * l as f64 + 1.0;
        for u in [0.5, 2.0, 6.0] {
            let rho = 2.0 * state.scale * u / n as f64;
            let want = u.powi(l as i32 + 1) * (-rho / 2.0).exp() * laguerre(k, alpha, rho) / binomial(k as f64 + alpha, k);
            assert_relative_eq!(state.value(u).unwrap(), want, max_relative = 1e-12, epsilon = 1e-14);
        }
    }
}

#[test]
fn printed_and_corrected_powers_differ_by_u_squared() {
    let model = SaturationModel::new(0.0, 1.0).unwrap();
    let printed = HydrogenEigenstate::new(2, 1, &model, 1.0, RadialPower::Printed).unwrap();
    let corrected = HydrogenEigenstate::new(2, 1, &model, 1.0, RadialPower::Corrected).unwrap();
    for u in [0.4, 1.5, 3.0] {
        assert_relative_eq!(corrected.value(u).unwrap(), u * u * printed.value(u).unwrap(), max_relative = 1e-14);
        // (2, 1) is u^2 exp(-u / 2) up to normalisation
        assert_relative_eq!(corrected.value(u).unwrap(), u * u * (-u / 2.0).exp(), max_relative = 1e-14);
    }
}

#[test]
fn eigenstate_energies_match_the_spectrum() {
    let model = SaturationModel::new(-0.4, 4.0).unwrap();
    let spec = BaseSpectrum::harmonic_oscillator(1.0);
    for n in [0u32, 2, 5] {
        let state = HoEigenstate::new(n, n % 2, &model, 1.0).unwrap();
        let level = solve_level(&spec, &model, n as u64, 0);
        assert_relative_eq!(state.energy, level.energy, max_relative = 1e-14);
        // oscillator frequency omega f^(1/2) reproduces the level
        assert_relative_eq!(state.spring().sqrt() * (n as f64 + 1.5), state.energy, max_relative = 1e-12);
    }
}

#[test]
fn quarkonium_levels_agree_with_the_generic_spectrum() {
    let table = ExperimentalTable::builtin();
    for (system, lambda) in [(System::Charmonium, -0.2), (System::Bottomonium, -0.3)] {
        let fit = quarkonia::fit(system, lambda, &table, system.default_quark_mass()).unwrap();
        let params: QuarkoniaParams = fit.params();
        let base = BaseSpectrum::Quarkonia {
            k_sq: fit.k_sq,
            p_sq: fit.p_sq,
        };
        let model = SaturationModel::new(lambda, 1.0).unwrap();
        for n in 0..10 {
            let direct = quarkonia::energy(n, &params).unwrap();
            let level = solve_level(&base, &model, n, 0);
            assert!(level.valid);
            assert_relative_eq!(level.energy, direct, max_relative = 1e-12, epsilon = 1e-12);
        }
    }
}

#[test]
fn mass_table_columns_reproduce_fitted_splittings() {
    let table = ExperimentalTable::builtin();
    for system in [System::Charmonium, System::Bottomonium] {
        let columns = quarkonia::mass_table(system, &system.table_lambdas(), &table, system.default_quark_mass(), 5);
        for column in &columns {
            let fit = column.fit.as_ref().unwrap();
            assert!(fit.max_residual() < quarkonia::FIT_TOLERANCE);
            for (lo, hi) in system.fitted_splittings() {
                let model = column.rows[hi as usize].mass - column.rows[lo as usize].mass;
                let data = table.mass(system, hi).unwrap() - table.mass(system, lo).unwrap();
                assert!((model - data).abs() < 1e-8, "{system} {}", column.lambda);
            }
        }
    }
}
