//! Evaluation of the Lyapunov functional `V = V1 + V2` along trajectories
//! and the numerical decrease check.

use crate::error::{Error, Result};
use crate::history::HistoryTrajectory;
use crate::integrator::{FeedbackMode, SimulationResult};
use crate::kfun::KFunction;
use serde::Serialize;

pub type V1Fn = dyn Fn(f64, &[f64]) -> f64 + Send + Sync;
pub type V2Fn = dyn Fn(f64, &HistoryTrajectory) -> Result<f64> + Send + Sync;

/// A certified Lyapunov functional: `V1` on the current state, `V2` on the
/// history segment, the comparison functions sandwiching them, and the
/// decrease rate `mu` of the dissipation inequality
/// `D+ V <= -mu V + chi(||eps||)`.
pub struct LyapunovCertificate {
    v1: Box<V1Fn>,
    v2: Box<V2Fn>,
    pub alpha1: KFunction,
    pub alpha2: KFunction,
    pub alpha3: KFunction,
    pub chi: KFunction,
    pub mu: f64,
}

impl LyapunovCertificate {
    pub fn new(
        v1: Box<V1Fn>,
        v2: Box<V2Fn>,
        alpha1: KFunction,
        alpha2: KFunction,
        alpha3: KFunction,
        chi: KFunction,
        mu: f64,
    ) -> Result<Self> {
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::Config(format!("decrease rate mu must be > 0, got {mu}")));
        }
        Ok(Self {
            v1,
            v2,
            alpha1,
            alpha2,
            alpha3,
            chi,
            mu,
        })
    }

    pub fn v1(&self, t: f64, x: &[f64]) -> f64 {
        (self.v1)(t, x)
    }

    pub fn v2(&self, t: f64, history: &HistoryTrajectory) -> Result<f64> {
        (self.v2)(t, history)
    }

    /// Same functional with a different claimed decrease rate (negative
    /// controls in the check suites).
    pub fn with_mu(self, mu: f64) -> Result<Self> {
        Self::new(
            self.v1, self.v2, self.alpha1, self.alpha2, self.alpha3, self.chi, mu,
        )
    }
}

/// `V(t) = V1(t, x(t)) + V2(t, x_t)` along a recorded trajectory.
pub fn eval_v(cert: &LyapunovCertificate, t: f64, history: &HistoryTrajectory) -> Result<f64> {
    history.require_window(t)?;
    let x = history.interpolate(t)?;
    Ok(cert.v1(t, &x) + cert.v2(t, history)?)
}

/// Composite Simpson quadrature of `f(s, x(s))` over `[a, b]`, taken
/// per knot interval of the history with midpoints (and the off-grid
/// endpoints) evaluated by dense interpolation.
pub fn simpson_over_history(
    history: &HistoryTrajectory,
    a: f64,
    b: f64,
    f: &dyn Fn(f64, &[f64]) -> f64,
) -> Result<f64> {
    if !(b > a) {
        return Err(Error::Domain(format!("integration bounds reversed: [{a}, {b}]")));
    }
    let knots = history.knots();
    let lo = history.t_begin();
    let hi = history.t_end();
    let slack = 1e-9 * history.grid_step().max(1.0);
    if a < lo - slack || b > hi + slack {
        return Err(Error::InsufficientHistory {
            need_lo: a,
            need_hi: b,
            have_lo: lo,
            have_hi: hi,
        });
    }
    let a = a.max(lo);
    let b = b.min(hi);

    let eval = |s: f64| -> Result<f64> {
        let x = history.interpolate(s)?;
        Ok(f(s, &x))
    };

    // Interval endpoints: a, every interior knot, b.
    let first = knots.partition_point(|&k| k <= a);
    let last = knots.partition_point(|&k| k < b);
    let mut total = 0.0;
    let mut left = a;
    let mut f_left = eval(a)?;
    for &knot in knots[first..last].iter().chain(std::iter::once(&b)) {
        let right = knot;
        if right - left < 1e-14 {
            left = right;
            f_left = eval(right)?;
            continue;
        }
        let mid = 0.5 * (left + right);
        let f_mid = eval(mid)?;
        let f_right = eval(right)?;
        total += (right - left) / 6.0 * (f_left + 4.0 * f_mid + f_right);
        left = right;
        f_left = f_right;
    }
    Ok(total)
}

/// Outcome of the numerical decrease check.
#[derive(Debug, Clone, Serialize)]
pub struct DecreaseReport {
    pub checked: usize,
    pub violations: usize,
    /// Largest excess of the forward difference over the certified bound,
    /// after subtracting the allowance (negative when everything holds).
    pub worst_excess: f64,
    pub worst_t: f64,
    pub tol_scale: f64,
}

impl DecreaseReport {
    pub fn pass(&self) -> bool {
        self.violations == 0
    }
}

/// Compare the forward difference `(V(t+h) - V(t)) / h` against
/// `-mu V(t) + chi(||eps(t)||)` at every interior step, with allowance
/// `tol_scale * max(1, V(t))`.
pub fn decrease_check(
    cert: &LyapunovCertificate,
    result: &SimulationResult,
    tol_scale: f64,
) -> Result<DecreaseReport> {
    if result.mode == FeedbackMode::Continuous {
        return Err(Error::Config(
            "decrease check needs an event-triggered run with recorded V".into(),
        ));
    }
    let mut checked = 0;
    let mut violations = 0;
    let mut worst_excess = f64::NEG_INFINITY;
    let mut worst_t = result.t0;
    for pair in result.records.windows(2) {
        let (r0, r1) = (&pair[0], &pair[1]);
        let dt = r1.t - r0.t;
        if dt <= 1e-12 {
            continue;
        }
        let fd = (r1.v - r0.v) / dt;
        let bound = -cert.mu * r0.v + cert.chi.eval(r0.eps_norm)?;
        let allowance = tol_scale * r0.v.max(1.0);
        let excess = fd - bound - allowance;
        checked += 1;
        if excess > 0.0 {
            violations += 1;
        }
        if excess > worst_excess {
            worst_excess = excess;
            worst_t = r0.t;
        }
    }
    Ok(DecreaseReport {
        checked,
        violations,
        worst_excess,
        worst_t,
        tol_scale,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::history::HistoryTrajectory;

    fn const_history(value: [f64; 2]) -> HistoryTrajectory {
        HistoryTrajectory::from_initial_fn(
            0.0,
            1.0,
            0.005,
            &|_| value.to_vec(),
            &|_| vec![0.0, 0.0],
        )
        .unwrap()
    }

    fn example_certificate(delta: f64, zeta: f64) -> LyapunovCertificate {
        LyapunovCertificate::new(
            Box::new(|_t, x: &[f64]| x.iter().map(|v| v * v).sum()),
            Box::new(move |t, h: &HistoryTrajectory| {
                simpson_over_history(h, t - 1.0, t, &|s, x| {
                    delta * (-zeta * (t - s)).exp() * x.iter().map(|v| v * v).sum::<f64>()
                })
            }),
            KFunction::square(),
            KFunction::square(),
            KFunction::square(),
            KFunction::square(),
            0.28,
        )
        .unwrap()
    }

    #[test]
    fn integral_functional_matches_closed_form() {
        // V2(0) for phi = (1,2): 0.4 * 5 * (1 - e^{-0.28}) / 0.28.
        let cert = example_certificate(0.4, 0.28);
        let hist = const_history([1.0, 2.0]);
        let expected_v2 = 2.0 * (1.0 - (-0.28_f64).exp()) / 0.28;
        let v = eval_v(&cert, 0.0, &hist).unwrap();
        assert!(
            (v - (5.0 + expected_v2)).abs() < 1e-9,
            "V = {v}, expected {}",
            5.0 + expected_v2
        );
    }

    #[test]
    fn zero_history_gives_zero() {
        let cert = example_certificate(0.4, 0.28);
        let hist = const_history([0.0, 0.0]);
        assert_eq!(eval_v(&cert, 0.0, &hist).unwrap(), 0.0);
    }

    #[test]
    fn degenerate_weight_reduces_to_v1() {
        let cert = example_certificate(0.0, 0.28);
        let hist = const_history([1.0, 2.0]);
        assert!((eval_v(&cert, 0.0, &hist).unwrap() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn insufficient_history_is_an_error() {
        let cert = example_certificate(0.4, 0.28);
        let hist = const_history([1.0, 2.0]);
        assert!(matches!(
            eval_v(&cert, 0.5, &hist),
            Err(Error::InsufficientHistory { .. })
        ));
    }

    #[test]
    fn simpson_exact_on_cubics() {
        // Simpson integrates s^2 exactly; the history is constant 1 so the
        // integrand reduces to a polynomial in s.
        let hist = const_history([1.0, 0.0]);
        let val = simpson_over_history(&hist, -1.0, 0.0, &|s, x| s * s * x[0]).unwrap();
        assert!((val - 1.0 / 3.0).abs() < 1e-12);
    }
}
