//! Triggering condition and event-time bookkeeping.
//!
//! The trigger residual is
//! `r(t) = chi(||eps||) - sigma * alpha1(||x||) - chi(a * exp(-b (t - t0)))`;
//! an event is due exactly when `r` crosses zero from below.

use crate::error::{Error, Result};
use crate::integrator::{FeedbackMode, SimulationResult};
use crate::kfun::KFunction;
use crate::state::StateVec;
use serde::Serialize;

#[derive(Debug, Clone)]
pub struct TriggerConfig {
    pub sigma: f64,
    pub a: f64,
    pub b: f64,
    pub t0: f64,
    pub chi: KFunction,
    pub alpha1: KFunction,
}

impl TriggerConfig {
    pub fn new(
        sigma: f64,
        a: f64,
        b: f64,
        t0: f64,
        chi: KFunction,
        alpha1: KFunction,
    ) -> Result<Self> {
        if !(b > 0.0) {
            return Err(Error::Config(format!("trigger needs b > 0, got {b}")));
        }
        if !(sigma >= 0.0) || !(a >= 0.0) {
            return Err(Error::Config(format!(
                "trigger needs sigma >= 0 and a >= 0, got sigma = {sigma}, a = {a}"
            )));
        }
        Ok(Self {
            sigma,
            a,
            b,
            t0,
            chi,
            alpha1,
        })
    }

    /// Residual from full state and sampling-error vectors.
    pub fn residual(&self, t: f64, x: &StateVec, eps: &StateVec) -> Result<f64> {
        self.residual_norms(t, x.norm(), eps.norm())
    }

    /// Residual when the norms are already at hand (the engine's hot path).
    pub fn residual_norms(&self, t: f64, x_norm: f64, eps_norm: f64) -> Result<f64> {
        if t < self.t0 {
            return Err(Error::Domain(format!(
                "residual queried at t = {t} before t0 = {}",
                self.t0
            )));
        }
        let decay = self.a * (-self.b * (t - self.t0)).exp();
        Ok(self.chi.eval(eps_norm)? - self.sigma * self.alpha1.eval(x_norm)? - self.chi.eval(decay)?)
    }
}

/// Increasing sequence of event times with the state sampled at each.
/// The first entry is the start time `t0` where the initial sample is taken.
#[derive(Debug, Clone, Default)]
pub struct EventLog {
    times: Vec<f64>,
    sampled_states: Vec<StateVec>,
}

impl EventLog {
    pub fn start(t0: f64, x0: StateVec) -> Self {
        Self {
            times: vec![t0],
            sampled_states: vec![x0],
        }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn push(&mut self, t: f64, x: StateVec) -> Result<()> {
        if let Some(&last) = self.times.last() {
            if t <= last {
                return Err(Error::Domain(format!(
                    "event times must be strictly increasing: {t} after {last}"
                )));
            }
        }
        self.times.push(t);
        self.sampled_states.push(x);
        Ok(())
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn sampled_states(&self) -> &[StateVec] {
        &self.sampled_states
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Number of control updates after the initial sample.
    pub fn update_count(&self) -> usize {
        self.times.len().saturating_sub(1)
    }

    /// Inter-event gaps `t_{i+1} - t_i`.
    pub fn gaps(&self) -> Vec<f64> {
        self.times.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn min_gap(&self) -> Option<f64> {
        self.gaps().into_iter().min_by(f64::total_cmp)
    }
}

/// Outcome of re-checking the enforced condition over a finished run.
#[derive(Debug, Clone, Serialize)]
pub struct EnforcementReport {
    /// False for continuous-feedback runs, where the sampling error is
    /// undefined and there is nothing to enforce.
    pub applicable: bool,
    pub max_residual: f64,
    pub at_time: f64,
    pub tol: f64,
    pub violations: usize,
    pub checked: usize,
}

impl EnforcementReport {
    pub fn pass(&self) -> bool {
        !self.applicable || self.violations == 0
    }
}

/// Assert `r(t) <= tol` at every step record; returns the worst residual and
/// its time. A violation indicates a missed event.
pub fn enforcement_check(
    result: &SimulationResult,
    trig: &TriggerConfig,
    tol: f64,
) -> Result<EnforcementReport> {
    if result.mode == FeedbackMode::Continuous {
        return Ok(EnforcementReport {
            applicable: false,
            max_residual: f64::NEG_INFINITY,
            at_time: f64::NAN,
            tol,
            violations: 0,
            checked: 0,
        });
    }
    let mut max_residual = f64::NEG_INFINITY;
    let mut at_time = result.t0;
    let mut violations = 0;
    for rec in &result.records {
        let r = trig.residual_norms(rec.t, rec.x.norm(), rec.eps_norm)?;
        if r > max_residual {
            max_residual = r;
            at_time = rec.t;
        }
        if r > tol {
            violations += 1;
        }
    }
    Ok(EnforcementReport {
        applicable: true,
        max_residual,
        at_time,
        tol,
        violations,
        checked: result.records.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn paper_trigger() -> TriggerConfig {
        TriggerConfig::new(
            0.16,
            1.0,
            0.14,
            0.0,
            KFunction::square(),
            KFunction::square(),
        )
        .unwrap()
    }

    #[test]
    fn residual_at_start_of_worked_example() {
        // x = (1,2), eps = 0: r = 0 - 0.16*5 - 1 = -1.8.
        let trig = paper_trigger();
        let x = StateVec::new(vec![1.0, 2.0]).unwrap();
        let eps = StateVec::zeros(2);
        let r = trig.residual(0.0, &x, &eps).unwrap();
        assert!((r - (-1.8)).abs() < 1e-12, "got {r}");
    }

    #[test]
    fn residual_vanishes_with_all_terms_zero() {
        let trig = TriggerConfig::new(
            0.16,
            0.0,
            0.14,
            0.0,
            KFunction::square(),
            KFunction::square(),
        )
        .unwrap();
        let z = StateVec::zeros(2);
        assert_eq!(trig.residual(1.0, &z, &z).unwrap(), 0.0);
    }

    #[test]
    fn residual_constructed_equality() {
        // sigma = 0, a = 1, b = 1, chi = id, t - t0 = ln 2, ||eps|| = 0.5.
        let trig = TriggerConfig::new(
            0.0,
            1.0,
            1.0,
            0.0,
            KFunction::identity(),
            KFunction::square(),
        )
        .unwrap();
        let r = trig
            .residual_norms(std::f64::consts::LN_2, 3.0, 0.5)
            .unwrap();
        assert!(r.abs() < 1e-12, "got {r}");
    }

    #[test]
    fn event_log_strictly_increasing() {
        let mut log = EventLog::start(0.0, StateVec::zeros(1));
        log.push(0.5, StateVec::zeros(1)).unwrap();
        assert!(log.push(0.5, StateVec::zeros(1)).is_err());
        assert_eq!(log.update_count(), 1);
        assert_eq!(log.gaps(), vec![0.5]);
    }

    #[test]
    fn trigger_config_validation() {
        assert!(TriggerConfig::new(
            -0.1,
            1.0,
            0.14,
            0.0,
            KFunction::square(),
            KFunction::square()
        )
        .is_err());
        assert!(TriggerConfig::new(
            0.1,
            1.0,
            0.0,
            0.0,
            KFunction::square(),
            KFunction::square()
        )
        .is_err());
    }
}
