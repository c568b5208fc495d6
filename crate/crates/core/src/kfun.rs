//! Class-K comparison functions with numeric inversion.
//!
//! Two representations cover everything the toolkit needs: power laws
//! `c*s^p` (class K-infinity for p > 0) and tabulated strictly monotone
//! maps with linear interpolation between breakpoints.

use crate::error::{Error, Result};

/// Absolute tolerance guaranteed by [`KFunction::invert`].
pub const INVERSION_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub enum KFunction {
    /// `s -> coeff * s^exponent` on `[0, inf)`, with `coeff, exponent > 0`.
    PowerLaw { coeff: f64, exponent: f64 },
    /// Piecewise-linear strictly increasing map through `(breaks[i], values[i])`,
    /// anchored at `(0, 0)`.
    Tabulated { breaks: Vec<f64>, values: Vec<f64> },
}

impl KFunction {
    pub fn power_law(coeff: f64, exponent: f64) -> Result<Self> {
        if !(coeff > 0.0 && coeff.is_finite()) || !(exponent > 0.0 && exponent.is_finite()) {
            return Err(Error::Domain(format!(
                "power law requires c > 0 and p > 0, got c = {coeff}, p = {exponent}"
            )));
        }
        Ok(KFunction::PowerLaw { coeff, exponent })
    }

    /// The identity `s -> s`.
    pub fn identity() -> Self {
        KFunction::PowerLaw {
            coeff: 1.0,
            exponent: 1.0,
        }
    }

    /// `s -> s^2`, the quadratic used throughout the worked example.
    pub fn square() -> Self {
        KFunction::PowerLaw {
            coeff: 1.0,
            exponent: 2.0,
        }
    }

    pub fn tabulated(breaks: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if breaks.len() != values.len() || breaks.len() < 2 {
            return Err(Error::Domain(
                "tabulated form needs >= 2 matching breakpoints/values".into(),
            ));
        }
        if breaks[0] != 0.0 || values[0] != 0.0 {
            return Err(Error::Domain(
                "tabulated form must be anchored at (0, 0)".into(),
            ));
        }
        let inc = |w: &[f64]| w.windows(2).all(|p| p[1] > p[0] && p[1].is_finite());
        if !inc(&breaks) || !inc(&values) {
            return Err(Error::Domain(
                "tabulated breakpoints and values must be strictly increasing".into(),
            ));
        }
        Ok(KFunction::Tabulated { breaks, values })
    }

    /// Tabulate a callable on `[0, hi]` with `n` uniform intervals.
    pub fn tabulate_fn(f: impl Fn(f64) -> f64, hi: f64, n: usize) -> Result<Self> {
        let breaks: Vec<f64> = (0..=n).map(|i| hi * i as f64 / n as f64).collect();
        let values: Vec<f64> = breaks.iter().map(|&s| f(s)).collect();
        Self::tabulated(breaks, values)
    }

    /// True when the form is unbounded (class K-infinity).
    pub fn is_k_infinity(&self) -> bool {
        matches!(self, KFunction::PowerLaw { .. })
    }

    /// Largest admissible argument, `None` when the domain is all of `[0, inf)`.
    pub fn domain_sup(&self) -> Option<f64> {
        match self {
            KFunction::PowerLaw { .. } => None,
            KFunction::Tabulated { breaks, .. } => Some(*breaks.last().unwrap()),
        }
    }

    pub fn eval(&self, s: f64) -> Result<f64> {
        if !(s >= 0.0) {
            return Err(Error::Domain(format!(
                "class-K functions are defined for s >= 0, got {s}"
            )));
        }
        match self {
            KFunction::PowerLaw { coeff, exponent } => Ok(coeff * s.powf(*exponent)),
            KFunction::Tabulated { breaks, values } => {
                let hi = *breaks.last().unwrap();
                if s > hi {
                    return Err(Error::Domain(format!(
                        "argument {s} beyond tabulated domain [0, {hi}]"
                    )));
                }
                // Exact at breakpoints, linear in between.
                let idx = breaks.partition_point(|&b| b < s);
                if idx < breaks.len() && breaks[idx] == s {
                    return Ok(values[idx]);
                }
                let (b0, b1) = (breaks[idx - 1], breaks[idx]);
                let (v0, v1) = (values[idx - 1], values[idx]);
                Ok(v0 + (v1 - v0) * (s - b0) / (b1 - b0))
            }
        }
    }

    /// Inverse map: `s` with `eval(s) = y` within [`INVERSION_TOL`].
    ///
    /// Closed form for power laws, bisection for tabulated forms.
    pub fn invert(&self, y: f64) -> Result<f64> {
        if !(y >= 0.0) {
            return Err(Error::Domain(format!(
                "inverse of a class-K function needs y >= 0, got {y}"
            )));
        }
        if y == 0.0 {
            return Ok(0.0);
        }
        match self {
            KFunction::PowerLaw { coeff, exponent } => Ok((y / coeff).powf(1.0 / exponent)),
            KFunction::Tabulated { breaks, values } => {
                let top = *values.last().unwrap();
                if y > top {
                    return Err(Error::Range(format!(
                        "y = {y} beyond tabulated range [0, {top}]"
                    )));
                }
                let (mut lo, mut hi) = (0.0_f64, *breaks.last().unwrap());
                // Bisect to floating-point convergence; the evaluator is
                // strictly increasing so the bracket never degenerates.
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if self.eval(mid)? < y {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                Ok(0.5 * (lo + hi))
            }
        }
    }

    /// Largest slope of the inverse map on the value interval `[lo, hi]`,
    /// i.e. a Lipschitz constant for `eval^{-1}` there. Requires `0 < lo < hi`
    /// within range.
    pub fn inverse_lipschitz_on(&self, lo: f64, hi: f64) -> Result<f64> {
        if !(lo > 0.0 && hi > lo) {
            return Err(Error::Domain(format!(
                "inverse Lipschitz interval needs 0 < lo < hi, got [{lo}, {hi}]"
            )));
        }
        match self {
            KFunction::PowerLaw { coeff, exponent } => {
                // d/dy (y/c)^(1/p) = (1/(p c^{1/p})) y^{1/p - 1}: monotone in y.
                let d = |y: f64| (y / coeff).powf(1.0 / exponent) / (exponent * y);
                Ok(d(lo).max(d(hi)))
            }
            KFunction::Tabulated { breaks, values } => {
                let top = *values.last().unwrap();
                if hi > top {
                    return Err(Error::Range(format!(
                        "interval end {hi} beyond tabulated range [0, {top}]"
                    )));
                }
                let mut worst: f64 = 0.0;
                for (b, v) in breaks.windows(2).zip(values.windows(2)) {
                    if v[1] < lo || v[0] > hi {
                        continue;
                    }
                    worst = worst.max((b[1] - b[0]) / (v[1] - v[0]));
                }
                if worst == 0.0 {
                    return Err(Error::Domain(
                        "interval does not intersect tabulated range".into(),
                    ));
                }
                Ok(worst)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_law_eval_matches_worked_example() {
        // alpha_1(s) = s^2 applied to the norm of (1, 2).
        let k = KFunction::square();
        let s = 5.0_f64.sqrt();
        assert!((k.eval(s).unwrap() - 5.0).abs() < 1e-12);
        // Class-K anchor.
        assert_eq!(k.eval(0.0).unwrap(), 0.0);
        // Direct arithmetic: 0.4 * 3^2.
        let k2 = KFunction::power_law(0.4, 2.0).unwrap();
        assert!((k2.eval(3.0).unwrap() - 3.6).abs() < 1e-12);
    }

    #[test]
    fn negative_argument_is_a_domain_error() {
        let k = KFunction::square();
        assert!(k.eval(-1.0).is_err());
        assert!(k.invert(-1.0).is_err());
    }

    #[test]
    fn power_law_inversion() {
        let k = KFunction::square();
        assert!((k.invert(4.0).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(k.invert(0.0).unwrap(), 0.0);
    }

    #[test]
    fn tabulated_cube_inversion_hits_cube_root() {
        // Grid contains s = 1 exactly; the cube-root oracle gives 1.
        let k = KFunction::tabulate_fn(|s| s * s * s, 2.0, 2000).unwrap();
        let s = k.invert(1.0).unwrap();
        assert!((s - 1.0).abs() <= 1e-10, "got {s}");
        assert!((k.eval(s).unwrap() - 1.0).abs() <= INVERSION_TOL);
    }

    #[test]
    fn tabulated_out_of_range_reports() {
        let k = KFunction::tabulate_fn(|s| s * s * s, 2.0, 100).unwrap();
        assert!(matches!(k.invert(9.0), Err(Error::Range(_))));
        assert!(k.eval(2.5).is_err());
    }

    #[test]
    fn inverse_lipschitz_of_sqrt() {
        // alpha_1 = s^2: inverse sqrt has slope 1/(2 sqrt(m)) at the left end.
        let k = KFunction::square();
        let l = k.inverse_lipschitz_on(0.04, 25.0).unwrap();
        assert!((l - 1.0 / (2.0 * 0.2)).abs() < 1e-12);
    }
}
