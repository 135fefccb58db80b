//! Confluent (`1F1`) and Gauss (`2F1`) hypergeometric series.
//!
//! Both functions are summed term by term with the Pochhammer products
//! carried in the running term, so no factorial or gamma function is ever
//! formed. When a numerator parameter is a non-positive integer the series
//! is a polynomial and is summed to its last term regardless of the
//! truncation settings.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecfunError {
    #[error("denominator parameter c = {c} hits a pole of the series")]
    PoleParameter { c: f64 },
    #[error("series did not converge within {max_terms} terms")]
    NonConvergence { max_terms: usize },
    #[error("argument x = {x} outside |x| < 1 for a non-terminating 2F1")]
    Domain { x: f64 },
    #[error("invalid series settings: {0}")]
    InvalidParams(&'static str),
}

/// Truncation settings shared by both series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesParams {
    pub max_terms: usize,
    /// Relative cutoff: summation stops once `|term| < tol * |partial sum|`.
    pub tol: f64,
}

impl Default for SeriesParams {
    fn default() -> Self {
        Self {
            max_terms: 500,
            tol: 1e-15,
        }
    }
}

impl SeriesParams {
    fn validate(&self) -> Result<(), SpecfunError> {
        if self.max_terms == 0 {
            return Err(SpecfunError::InvalidParams("max_terms must be at least 1"));
        }
        if !(self.tol > 0.0) {
            return Err(SpecfunError::InvalidParams("tol must be positive"));
        }
        Ok(())
    }
}

/// Degree of the polynomial when `a` is a non-positive integer.
pub fn terminating_degree(a: f64) -> Option<usize> {
    if a <= 0.0 && a.fract() == 0.0 && a.is_finite() {
        Some((-a) as usize)
    } else {
        None
    }
}

/// Iterator over the terms `(a)_k (b)_k x^k / ((c)_k k!)` of a
/// hypergeometric series with one or two numerator parameters.
///
/// Each term is produced from the previous one by the contiguous ratio
/// `(a+k)(b+k) x / ((c+k)(k+1))`. The iterator never stops on its own
/// except when a numerator factor makes every later term zero.
#[derive(Debug, Clone)]
pub struct SeriesTerms {
    a: f64,
    b: Option<f64>,
    c: f64,
    x: f64,
    k: usize,
    term: f64,
    exhausted: bool,
}

impl SeriesTerms {
    pub fn confluent(a: f64, c: f64, x: f64) -> Self {
        Self::new(a, None, c, x)
    }

    pub fn gauss(a: f64, b: f64, c: f64, x: f64) -> Self {
        Self::new(a, Some(b), c, x)
    }

    fn new(a: f64, b: Option<f64>, c: f64, x: f64) -> Self {
        Self {
            a,
            b,
            c,
            x,
            k: 0,
            term: 1.0,
            exhausted: false,
        }
    }

    /// Analytic ratio `term_{k+1} / term_k`.
    pub fn ratio(&self, k: usize) -> f64 {
        let kf = k as f64;
        let numer = (self.a + kf) * self.b.map_or(1.0, |b| b + kf);
        numer * self.x / ((self.c + kf) * (kf + 1.0))
    }
}

impl Iterator for SeriesTerms {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        if self.exhausted {
            return None;
        }
        let current = self.term;
        let kf = self.k as f64;
        let numer = (self.a + kf) * self.b.map_or(1.0, |b| b + kf);
        if numer == 0.0 {
            self.exhausted = true;
        } else {
            self.term *= numer * self.x / ((self.c + kf) * (kf + 1.0));
        }
        self.k += 1;
        Some(current)
    }
}

fn is_pole(c: f64) -> Option<usize> {
    terminating_degree(c)
}

fn sum_series(
    upper: &[f64],
    c: f64,
    params: &SeriesParams,
    terms: SeriesTerms,
) -> Result<f64, SpecfunError> {
    params.validate()?;
    let degree = upper.iter().filter_map(|&p| terminating_degree(p)).min();

    if let Some(n) = degree {
        // (c)_k vanishes from k = m + 1 on, where c = -m.
        if let Some(m) = is_pole(c) {
            if n > m {
                return Err(SpecfunError::PoleParameter { c });
            }
        }
        return Ok(terms.take(n + 1).sum());
    }

    if is_pole(c).is_some() {
        return Err(SpecfunError::PoleParameter { c });
    }

    let mut sum = 0.0;
    for (k, term) in terms.enumerate() {
        if k >= params.max_terms {
            return Err(SpecfunError::NonConvergence {
                max_terms: params.max_terms,
            });
        }
        sum += term;
        if term.abs() < params.tol * sum.abs() || term == 0.0 {
            return Ok(sum);
        }
    }
    Ok(sum)
}

/// Confluent hypergeometric function `1F1(a; c; x)`.
pub fn hyp1f1(a: f64, c: f64, x: f64, params: &SeriesParams) -> Result<f64, SpecfunError> {
    sum_series(&[a], c, params, SeriesTerms::confluent(a, c, x))
}

/// Gauss hypergeometric function `2F1(a, b; c; x)`, valid for `|x| < 1`
/// or for any `x` when the series terminates.
pub fn hyp2f1(
    a: f64,
    b: f64,
    c: f64,
    x: f64,
    params: &SeriesParams,
) -> Result<f64, SpecfunError> {
    let terminates = terminating_degree(a).is_some() || terminating_degree(b).is_some();
    if !terminates && !(x.abs() < 1.0) {
        return Err(SpecfunError::Domain { x });
    }
    sum_series(&[a, b], c, params, SeriesTerms::gauss(a, b, c, x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn p() -> SeriesParams {
        SeriesParams::default()
    }

    #[test]
    fn hyp1f1_constant_when_a_is_zero() {
        assert_eq!(hyp1f1(0.0, 1.5, 2.7, &p()).unwrap(), 1.0);
    }

    #[test]
    fn hyp1f1_two_term_polynomial() {
        assert_eq!(hyp1f1(-1.0, 2.0, 3.0, &p()).unwrap(), -0.5);
    }

    #[test]
    fn hyp1f1_unit_parameters_give_exponential() {
        for x in [0.1, 1.0] {
            assert_relative_eq!(hyp1f1(1.0, 1.0, x, &p()).unwrap(), x.exp(), max_relative = 1e-12);
        }
    }

    #[test]
    fn hyp2f1_examples() {
        assert_eq!(hyp2f1(0.3, -2.5, 1.7, 0.0, &p()).unwrap(), 1.0);
        assert_relative_eq!(hyp2f1(-1.0, 2.0, 3.0, 0.5, &p()).unwrap(), 2.0 / 3.0, epsilon = 1e-15);
        let x: f64 = 0.25;
        assert_relative_eq!(
            hyp2f1(1.0, 1.0, 2.0, x, &p()).unwrap(),
            -(1.0 - x).ln() / x,
            max_relative = 1e-12
        );
    }

    #[test]
    fn hyp2f1_rejects_outside_unit_disk() {
        assert_eq!(
            hyp2f1(0.5, 0.5, 1.0, 1.0, &p()),
            Err(SpecfunError::Domain { x: 1.0 })
        );
        // terminating series are fine anywhere
        assert_relative_eq!(hyp2f1(-2.0, 1.0, 1.0, 3.0, &p()).unwrap(), 1.0 - 6.0 + 9.0);
    }

    #[test]
    fn pole_parameters() {
        assert!(matches!(
            hyp1f1(0.5, -2.0, 1.0, &p()),
            Err(SpecfunError::PoleParameter { .. })
        ));
        assert!(matches!(
            hyp1f1(-3.0, -2.0, 1.0, &p()),
            Err(SpecfunError::PoleParameter { .. })
        ));
        // polynomial of degree 2 stops before (c)_3 = 0
        let v = hyp1f1(-2.0, -2.0, 1.5, &p()).unwrap();
        assert_relative_eq!(v, 1.0 + 1.5 + 1.5 * 1.5 / 2.0, epsilon = 1e-15);
    }

    #[test]
    fn non_convergence_is_reported() {
        let tight = SeriesParams { max_terms: 5, tol: 1e-15 };
        assert_eq!(
            hyp1f1(0.5, 1.5, 10.0, &tight),
            Err(SpecfunError::NonConvergence { max_terms: 5 })
        );
    }

    #[test]
    fn invalid_settings() {
        let bad = SeriesParams { max_terms: 0, tol: 1e-15 };
        assert!(matches!(hyp1f1(0.5, 1.5, 1.0, &bad), Err(SpecfunError::InvalidParams(_))));
        let bad = SeriesParams { max_terms: 10, tol: 0.0 };
        assert!(matches!(hyp1f1(0.5, 1.5, 1.0, &bad), Err(SpecfunError::InvalidParams(_))));
    }

    #[test]
    fn term_ratio_matches_contiguous_relation() {
        let (a, c, x) = (0.7, 2.3, -1.9);
        let terms: Vec<f64> = SeriesTerms::confluent(a, c, x).take(40).collect();
        let iter = SeriesTerms::confluent(a, c, x);
        for k in 0..39 {
            let analytic = (a + k as f64) * x / ((c + k as f64) * (k as f64 + 1.0));
            assert_relative_eq!(terms[k + 1] / terms[k], analytic, max_relative = 1e-13);
            assert_relative_eq!(iter.ratio(k), analytic, max_relative = 1e-15);
        }
    }

    proptest! {
        #[test]
        fn terminating_cases_ignore_truncation(
            n in 0usize..12,
            c in 0.25f64..6.0,
            x in -8.0f64..8.0,
            max_terms in 1usize..50,
            tol in 1e-14f64..1e-2,
        ) {
            let a = -(n as f64);
            let loose = SeriesParams { max_terms, tol };
            let v1 = hyp1f1(a, c, x, &p()).unwrap();
            let v2 = hyp1f1(a, c, x, &loose).unwrap();
            prop_assert_eq!(v1.to_bits(), v2.to_bits());
            let w1 = hyp2f1(a, 1.3, c, x, &p()).unwrap();
            let w2 = hyp2f1(1.3, a, c, x, &loose).unwrap();
            prop_assert!((w1 - w2).abs() <= 1e-12 * (1.0 + w1.abs()));
        }

        #[test]
        fn zero_argument_gives_one(a in -5.0f64..5.0, b in -5.0f64..5.0, c in 0.1f64..5.0) {
            prop_assert_eq!(hyp1f1(a, c, 0.0, &p()).unwrap(), 1.0);
            prop_assert_eq!(hyp2f1(a, b, c, 0.0, &p()).unwrap(), 1.0);
        }
    }
}
