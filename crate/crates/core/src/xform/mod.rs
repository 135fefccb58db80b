//! Point and gauge transformation of `g(x) [P y'' + Q y' + R y] = 0` into a
//! Schrödinger-like equation.
//!
//! The coordinate change `x = F(u)` is fixed by `dx/du = sqrt(g(x) P(x))`;
//! the gauge weight `W(u)` removes the first derivative and the remaining
//! potential `v(u) = W^2 + W'` splits, together with `-g R`, into a
//! physical potential and a constant energy.

mod eigen;
pub mod closed;

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::numeric::{integrate, least_squares, newton_bisect, QuadError, RootError};
use crate::specfun::SpecfunError;
use crate::spectrum::SpectrumError;

pub use eigen::{hydrogen_eigenfunction, ho_eigenfunction, HoEigenstate, HydrogenEigenstate, RadialPower};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum XformError {
    #[error("x = {x} is outside the domain ({min}, {max})")]
    Domain { x: f64, min: f64, max: f64 },
    #[error("u = {u} lies outside the image of the coordinate map")]
    OutOfRange { u: f64 },
    #[error("g(x) P(x) = {value} is not positive at x = {x}")]
    NotPositive { x: f64, value: f64 },
    #[error("quadrature failed: {0}")]
    Quadrature(#[from] QuadError),
    #[error("inverse map failed: {0}")]
    Root(#[from] RootError),
    #[error("F'(u) vanishes at u = {u}")]
    Singular { u: f64 },
    #[error("potential/energy split is not constant: defect {defect:e} for E = {energy}")]
    NonConstantSplit { defect: f64, energy: f64 },
    #[error("grid needs at least {min} points inside the mapped domain, got {got}")]
    Grid { got: usize, min: usize },
    #[error("invalid quantum numbers: {0}")]
    QuantumNumbers(String),
    #[error(transparent)]
    Specfun(#[from] SpecfunError),
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
}

/// Named constants shared by the coefficient functions.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TransformParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub k: f64,
}

pub type Coefficient = Arc<dyn Fn(f64, &TransformParams) -> f64 + Send + Sync>;

/// Input to the transformation: the operator coefficients, the multiplier
/// `g`, the domain, and the anchor and orientation of `u`.
#[derive(Clone)]
pub struct TransformSpec {
    pub p: Coefficient,
    pub q: Coefficient,
    pub r: Coefficient,
    pub g: Coefficient,
    pub x_domain: (f64, f64),
    pub x_ref: f64,
    /// Orientation of `u`; `+1.0` or `-1.0`.
    pub sign: f64,
    pub params: TransformParams,
}

impl fmt::Debug for TransformSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TransformSpec")
            .field("x_domain", &self.x_domain)
            .field("x_ref", &self.x_ref)
            .field("sign", &self.sign)
            .field("params", &self.params)
            .finish_non_exhaustive()
    }
}

const MAP_TOL: f64 = 1e-12;
const MAX_INTERVALS: usize = 4000;

fn step_size(u: f64) -> f64 {
    1e-5 * u.abs().max(1.0)
}

impl TransformSpec {
    /// Confluent hypergeometric operator `x y'' + (c - x) y' - a y`.
    fn confluent(g: Coefficient, params: TransformParams) -> Self {
        Self {
            p: Arc::new(|x, _| x),
            q: Arc::new(|x, p| p.c - x),
            r: Arc::new(|_, p| -p.a),
            g,
            x_domain: (0.0, f64::INFINITY),
            x_ref: 0.0,
            sign: 1.0,
            params,
        }
    }

    /// Confluent operator with `g = k^2`: the three-dimensional oscillator.
    pub fn harmonic_oscillator(params: TransformParams) -> Self {
        Self::confluent(Arc::new(|_, p| p.k * p.k), params)
    }

    /// Confluent operator with `g = k^2 / x`: the Coulomb problem.
    pub fn hydrogen(params: TransformParams) -> Self {
        Self::confluent(Arc::new(|x, p| p.k * p.k / x), params)
    }

    pub fn with_sign(mut self, sign: f64) -> Self {
        self.sign = if sign < 0.0 { -1.0 } else { 1.0 };
        self
    }

    fn g_p(&self, x: f64) -> f64 {
        (self.g)(x, &self.params) * (self.p)(x, &self.params)
    }

    fn in_domain(&self, x: f64) -> bool {
        (x > self.x_domain.0 && x < self.x_domain.1) || x == self.x_ref
    }

    fn check_domain(&self, x: f64) -> Result<(), XformError> {
        if self.in_domain(x) {
            Ok(())
        } else {
            Err(XformError::Domain {
                x,
                min: self.x_domain.0,
                max: self.x_domain.1,
            })
        }
    }

    /// `dx/du = sign * sqrt(g P)` at `x`.
    fn velocity(&self, x: f64) -> Result<f64, XformError> {
        let gp = self.g_p(x);
        if gp > 0.0 && gp.is_finite() {
            Ok(self.sign * gp.sqrt())
        } else {
            Err(XformError::NotPositive { x, value: gp })
        }
    }

    /// `u(x) = sign * integral_{x_ref}^{x} dt / sqrt(g(t) P(t))`.
    ///
    /// When `g P` vanishes or blows up at the anchor the substitution
    /// `t = x_ref + s^2` removes the inverse-square-root endpoint behaviour.
    pub fn map_coordinate(&self, x: f64) -> Result<f64, XformError> {
        self.check_domain(x)?;
        if x == self.x_ref {
            return Ok(0.0);
        }
        let gp_ref = self.g_p(self.x_ref);
        let singular_anchor = !(gp_ref > 0.0 && gp_ref.is_finite());
        let integral = if singular_anchor {
            let dir = (x - self.x_ref).signum();
            let upper = (x - self.x_ref).abs().sqrt();
            let x_ref = self.x_ref;
            let value = integrate(
                |s| 2.0 * s / self.g_p(x_ref + dir * s * s).sqrt(),
                0.0,
                upper,
                MAP_TOL,
                MAX_INTERVALS,
            )?;
            dir * value
        } else {
            integrate(|t| 1.0 / self.g_p(t).sqrt(), self.x_ref, x, MAP_TOL, MAX_INTERVALS)?
        };
        Ok(self.sign * integral)
    }

    /// `x = F(u)`, the inverse of [`map_coordinate`](Self::map_coordinate),
    /// by bracketed Newton iteration on the monotone map.
    pub fn inverse_map(&self, u: f64) -> Result<f64, XformError> {
        if u == 0.0 {
            return Ok(self.x_ref);
        }
        // direction in x that moves u towards the target
        let dir = (self.sign * u).signum();
        let edge = if dir > 0.0 { self.x_domain.1 } else { self.x_domain.0 };
        let mut width = 1.0_f64.max(self.x_ref.abs() * 1e-3);
        let far = loop {
            let mut candidate = self.x_ref + dir * width;
            let mut at_edge = false;
            if (dir > 0.0 && candidate >= edge) || (dir < 0.0 && candidate <= edge) {
                // step back inside the open domain
                candidate = edge - dir * 1e-12 * edge.abs().max(1.0);
                at_edge = true;
            }
            let reached = self.map_coordinate(candidate)?;
            if (reached - u) * u.signum() >= 0.0 {
                break candidate;
            }
            if at_edge || width > 1e150 {
                return Err(XformError::OutOfRange { u });
            }
            width *= 4.0;
        };

        let eval = |x: f64| {
            let mapped = self.map_coordinate(x).unwrap_or(f64::NAN);
            let slope = self.velocity(x).map(|v| 1.0 / v).unwrap_or(f64::NAN);
            (mapped - u, slope)
        };
        let x = newton_bisect(eval, self.x_ref, far, |_| 1e-13 * u.abs().max(1.0), 1e-15, 300)?;
        Ok(x)
    }

    /// Points `F(u + j h)` for `j = -2..=2`, propagated from `F(u)` with one
    /// RK4 step of the flow `dx/du = sign sqrt(g P)` per offset.
    fn chart(&self, u: f64, h: f64) -> Result<[f64; 5], XformError> {
        let x0 = self.inverse_map(u)?;
        let mut xs = [x0; 5];
        for (slot, j) in [(0usize, -2.0), (1, -1.0), (3, 1.0), (4, 2.0)] {
            xs[slot] = self.flow(x0, j * h)?;
        }
        Ok(xs)
    }

    fn flow(&self, x0: f64, du: f64) -> Result<f64, XformError> {
        let substeps = 2;
        let dt = du / substeps as f64;
        let mut x = x0;
        for _ in 0..substeps {
            let k1 = self.velocity(x)?;
            let k2 = self.velocity(x + 0.5 * dt * k1)?;
            let k3 = self.velocity(x + 0.5 * dt * k2)?;
            let k4 = self.velocity(x + dt * k3)?;
            x += dt * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
        }
        Ok(x)
    }

    fn weight_at(&self, x: f64, x_minus: f64, x_plus: f64, h: f64, u: f64) -> Result<f64, XformError> {
        let fp = self.velocity(x)?;
        if fp.abs() < 1e-300 {
            return Err(XformError::Singular { u });
        }
        let fpp = (self.velocity(x_plus)? - self.velocity(x_minus)?) / (2.0 * h);
        let gq = (self.g)(x, &self.params) * (self.q)(x, &self.params);
        Ok((gq - fpp) / (2.0 * fp))
    }

    /// Gauge weight `W(u) = [g(F) Q(F) - F''(u)] / (2 F'(u))`, with `F'`
    /// from `sqrt(g P)` and `F''` by a central difference of `F'`.
    pub fn gauge_weight(&self, u: f64) -> Result<f64, XformError> {
        let h = step_size(u);
        let xs = self.chart(u, h)?;
        self.weight_at(xs[2], xs[1], xs[3], h, u)
    }

    /// Effective potential `v(u) = W^2 + W'`, `W'` by a central difference.
    pub fn effective_potential(&self, u: f64) -> Result<f64, XformError> {
        let h = step_size(u);
        let xs = self.chart(u, h)?;
        let w = self.weight_at(xs[2], xs[1], xs[3], h, u)?;
        let w_minus = self.weight_at(xs[1], xs[0], xs[2], h, u - h)?;
        let w_plus = self.weight_at(xs[3], xs[2], xs[4], h, u + h)?;
        Ok(w * w + (w_plus - w_minus) / (2.0 * h))
    }

    /// `W(u)`, `v(u)` and `F(u)` together; cheaper than calling each.
    pub fn sample(&self, u: f64) -> Result<TransformSample, XformError> {
        let h = step_size(u);
        let xs = self.chart(u, h)?;
        let w = self.weight_at(xs[2], xs[1], xs[3], h, u)?;
        let w_minus = self.weight_at(xs[1], xs[0], xs[2], h, u - h)?;
        let w_plus = self.weight_at(xs[3], xs[2], xs[4], h, u + h)?;
        let x = xs[2];
        Ok(TransformSample {
            u,
            x,
            weight: w,
            potential: w * w + (w_plus - w_minus) / (2.0 * h),
            g_r: (self.g)(x, &self.params) * (self.r)(x, &self.params),
        })
    }
}

/// Transformation quantities at one grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformSample {
    pub u: f64,
    pub x: f64,
    pub weight: f64,
    pub potential: f64,
    pub g_r: f64,
}

/// How the constant energy is separated from `V(u) - E`.
pub enum SplitModel {
    /// `V` is a linear combination of the given shapes; the constant of the
    /// least-squares fit is `-E`.
    Shape(Vec<Box<dyn Fn(f64) -> f64 + Send + Sync>>),
    /// `V(u_ref) = value`.
    Reference { u: f64, value: f64 },
}

impl SplitModel {
    /// `A u^2 + B / u^2`.
    pub fn oscillator() -> Self {
        SplitModel::Shape(vec![Box::new(|u| u * u), Box::new(|u| 1.0 / (u * u))])
    }

    /// `B / u^2 + C / u`.
    pub fn coulomb() -> Self {
        SplitModel::Shape(vec![Box::new(|u| 1.0 / (u * u)), Box::new(|u| 1.0 / u)])
    }
}

/// Sampled transformation on a grid with the separated potential and energy.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformResult {
    pub u_grid: Vec<f64>,
    /// `F(u)` on the grid.
    pub x: Vec<f64>,
    pub weight: Vec<f64>,
    pub effective: Vec<f64>,
    pub potential: Vec<f64>,
    pub energy: f64,
    /// Fitted coefficients of the shape functions (empty for a reference split).
    pub shape_coefficients: Vec<f64>,
    pub constancy_defect: f64,
}

pub const MIN_SPLIT_POINTS: usize = 8;

/// Separate `(hbar^2 / 2m) [v(u) - g(F) R(F)] = V(u) - E` on `u_grid`.
pub fn split_potential_energy(
    spec: &TransformSpec,
    u_grid: &[f64],
    hbar: f64,
    mass: f64,
    model: &SplitModel,
) -> Result<TransformResult, XformError> {
    if u_grid.len() < MIN_SPLIT_POINTS {
        return Err(XformError::Grid {
            got: u_grid.len(),
            min: MIN_SPLIT_POINTS,
        });
    }
    let scale = hbar * hbar / (2.0 * mass);
    let samples = u_grid
        .iter()
        .map(|&u| spec.sample(u))
        .collect::<Result<Vec<_>, _>>()?;
    let shifted: Vec<f64> = samples.iter().map(|s| scale * (s.potential - s.g_r)).collect();

    let (energy, shape_coefficients, fitted_part) = match model {
        SplitModel::Shape(shapes) => {
            let mut columns: Vec<Vec<f64>> = shapes
                .iter()
                .map(|f| u_grid.iter().map(|&u| f(u)).collect())
                .collect();
            columns.push(vec![1.0; u_grid.len()]);
            let coef = least_squares(&columns, &shifted).ok_or(XformError::Grid {
                got: u_grid.len(),
                min: columns.len(),
            })?;
            let (shape_coef, constant) = coef.split_at(shapes.len());
            let model_values: Vec<f64> = (0..u_grid.len())
                .map(|i| shape_coef.iter().zip(&columns).map(|(c, col)| c * col[i]).sum())
                .collect();
            (-constant[0], shape_coef.to_vec(), Some(model_values))
        }
        SplitModel::Reference { u, value } => {
            let at_ref = spec.sample(*u)?;
            let s_ref = scale * (at_ref.potential - at_ref.g_r);
            (value - s_ref, Vec::new(), None)
        }
    };

    let potential: Vec<f64> = shifted.iter().map(|s| s + energy).collect();
    let constancy_defect = match &fitted_part {
        Some(model_values) => potential
            .iter()
            .zip(model_values)
            .map(|(v, m)| (v - m).abs())
            .fold(0.0, f64::max),
        None => 0.0,
    };
    if constancy_defect > 1e-6 * (1.0 + energy.abs()) {
        return Err(XformError::NonConstantSplit {
            defect: constancy_defect,
            energy,
        });
    }

    Ok(TransformResult {
        u_grid: u_grid.to_vec(),
        x: samples.iter().map(|s| s.x).collect(),
        weight: samples.iter().map(|s| s.weight).collect(),
        effective: samples.iter().map(|s| s.potential).collect(),
        potential,
        energy,
        shape_coefficients,
        constancy_defect,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn ho(k: f64, c: f64) -> TransformSpec {
        TransformSpec::harmonic_oscillator(TransformParams { a: -1.0, b: 0.0, c, k })
    }

    fn hy(k: f64, c: f64) -> TransformSpec {
        TransformSpec::hydrogen(TransformParams { a: -1.0, b: 0.0, c, k })
    }

    fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn map_coordinate_examples() {
        assert_relative_eq!(ho(2.0, 1.5).map_coordinate(1.0).unwrap(), 1.0, max_relative = 1e-12);
        assert_relative_eq!(hy(3.0, 2.0).map_coordinate(6.0).unwrap(), 2.0, max_relative = 1e-12);
        assert_eq!(ho(2.0, 1.5).map_coordinate(0.0).unwrap(), 0.0);
        assert!(matches!(ho(2.0, 1.5).map_coordinate(-1.0), Err(XformError::Domain { .. })));
    }

    #[test]
    fn inverse_map_examples() {
        assert_relative_eq!(ho(2.0, 1.5).inverse_map(1.0).unwrap(), 1.0, max_relative = 1e-12);
        assert_relative_eq!(hy(3.0, 2.0).inverse_map(2.0).unwrap(), 6.0, max_relative = 1e-12);
        assert_eq!(hy(3.0, 2.0).inverse_map(0.0).unwrap(), 0.0);
        // closed forms F(u) = u^2 k^2 / 4 and F(u) = u k
        for u in [0.3, 1.7, 4.2] {
            assert_relative_eq!(ho(1.3, 1.5).inverse_map(u).unwrap(), u * u * 1.69 / 4.0, max_relative = 1e-11);
            assert_relative_eq!(hy(0.7, 2.0).inverse_map(u).unwrap(), 0.7 * u, max_relative = 1e-11);
        }
    }

    #[test]
    fn inverse_map_out_of_range() {
        assert!(matches!(ho(2.0, 1.5).inverse_map(-0.5), Err(XformError::OutOfRange { .. })));
        let mirrored = ho(2.0, 1.5).with_sign(-1.0);
        assert_relative_eq!(mirrored.inverse_map(-1.0).unwrap(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn gauge_weight_examples() {
        assert!(ho(2.0, 1.5).gauge_weight(1.0).unwrap().abs() < 1e-8);
        assert!(hy(2.0, 2.0).gauge_weight(1.0).unwrap().abs() < 1e-8);
    }

    #[test]
    fn engine_matches_closed_forms() {
        let (k, c) = (2.0, 1.5);
        let spec = ho(k, c);
        let hspec = hy(k, 2.0);
        for u in grid(0.1, 5.0, 50) {
            assert!((spec.gauge_weight(u).unwrap() - closed::ho_weight(u, c, k)).abs() < 1e-6);
            assert!((hspec.gauge_weight(u).unwrap() - closed::hydrogen_weight(u, 2.0, k)).abs() < 1e-6);
        }
        for u in grid(0.2, 5.0, 50) {
            assert!((spec.effective_potential(u).unwrap() - closed::ho_potential(u, c, k)).abs() < 1e-5);
            assert!(
                (hspec.effective_potential(u).unwrap() - closed::hydrogen_potential(u, 2.0, k)).abs() < 1e-5
            );
        }
    }

    #[test]
    fn oscillator_split() {
        let (k, c, a) = (2.0, 1.5, -1.0);
        let spec = TransformSpec::harmonic_oscillator(TransformParams { a, b: 0.0, c, k });
        // hbar = 2m = 1 puts the prefactor at one
        let res = split_potential_energy(&spec, &grid(0.2, 5.0, 40), 1.0, 0.5, &SplitModel::oscillator()).unwrap();
        assert_relative_eq!(res.energy, closed::ho_energy(1.0, 0.5, k, c, a), max_relative = 1e-6);
        assert_relative_eq!(res.shape_coefficients[0], k.powi(4) / 16.0, max_relative = 1e-6);
        // B = (4c^2 + 3 - 8c)/4 vanishes at c = 3/2
        assert!((res.shape_coefficients[1] - (4.0 * c * c + 3.0 - 8.0 * c) / 4.0).abs() < 1e-6);
        assert!(res.constancy_defect < 1e-6);
    }

    #[test]
    fn coulomb_split() {
        let (k, c, a) = (2.0, 2.0, -1.0);
        let spec = TransformSpec::hydrogen(TransformParams { a, b: 0.0, c, k });
        let res = split_potential_energy(&spec, &grid(0.2, 5.0, 40), 1.0, 1.0, &SplitModel::coulomb()).unwrap();
        assert_relative_eq!(res.energy, -0.5, max_relative = 1e-6);
        // V = (1/2) [c(c-2)/(4u^2) + (2a-c)k/(2u)]
        assert!((res.shape_coefficients[0] - 0.5 * c * (c - 2.0) / 4.0).abs() < 1e-6);
        assert_relative_eq!(res.shape_coefficients[1], 0.5 * (2.0 * a - c) * k / 2.0, max_relative = 1e-6);
    }

    #[test]
    fn reference_split_pins_the_potential() {
        let spec = hy(2.0, 2.0);
        let res = split_potential_energy(
            &spec,
            &grid(0.5, 3.0, 10),
            1.0,
            1.0,
            &SplitModel::Reference { u: 1e6, value: 0.0 },
        )
        .unwrap();
        assert!((res.energy + 0.5).abs() < 1e-5);
    }

    #[test]
    fn wrong_shape_is_rejected() {
        let spec = ho(2.0, 2.5);
        let only_quadratic = SplitModel::Shape(vec![Box::new(|u| u * u)]);
        let err = split_potential_energy(&spec, &grid(0.2, 5.0, 20), 1.0, 0.5, &only_quadratic).unwrap_err();
        assert!(matches!(err, XformError::NonConstantSplit { .. }));
    }

    #[test]
    fn short_grid_is_rejected() {
        let err = split_potential_energy(&ho(2.0, 1.5), &grid(0.2, 1.0, 5), 1.0, 0.5, &SplitModel::oscillator());
        assert!(matches!(err, Err(XformError::Grid { got: 5, .. })));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn round_trip(x in 1e-3f64..50.0, k in 0.3f64..4.0) {
            for spec in [ho(k, 1.5), hy(k, 2.0)] {
                let u = spec.map_coordinate(x).unwrap();
                let back = spec.inverse_map(u).unwrap();
                prop_assert!((back - x).abs() <= 1e-9 * x.max(1.0));
            }
        }
    }
}
