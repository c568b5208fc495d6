//! System models: right-hand side over a history segment, feedback law,
//! delay horizon, and initial function.

use crate::error::{Error, Result};
use crate::history::{fd_derivative, HistoryTrajectory};
use crate::state::StateVec;

/// Read-only view of a state segment `x_t`, addressed by the lag
/// `s in [-tau, 0]` so that `at(0)` is the current state and `at(-tau)`
/// the fully delayed one.
pub trait HistorySegment {
    fn dim(&self) -> usize;
    fn tau(&self) -> f64;
    fn at(&self, s: f64) -> Result<StateVec>;
}

/// Segment view backed by a trajectory, with the current state overridden —
/// during a Runge-Kutta stage the front value is the stage estimate, which
/// the trajectory does not hold yet.
pub struct TrajectorySegment<'a> {
    history: &'a HistoryTrajectory,
    t_now: f64,
    x_now: &'a StateVec,
}

impl<'a> TrajectorySegment<'a> {
    pub fn new(history: &'a HistoryTrajectory, t_now: f64, x_now: &'a StateVec) -> Self {
        Self {
            history,
            t_now,
            x_now,
        }
    }
}

impl HistorySegment for TrajectorySegment<'_> {
    fn dim(&self) -> usize {
        self.history.dim()
    }

    fn tau(&self) -> f64 {
        self.history.tau()
    }

    fn at(&self, s: f64) -> Result<StateVec> {
        let tau = self.tau();
        if !(-tau..=0.0).contains(&s) {
            return Err(Error::Domain(format!(
                "segment lag {s} outside [-{tau}, 0]"
            )));
        }
        if s == 0.0 {
            return Ok(self.x_now.clone());
        }
        let t_query = self.t_now + s;
        if t_query <= self.history.t_end() {
            self.history.interpolate(t_query)
        } else {
            // Lag shorter than the current stage offset: extend the last
            // segment's cubic across the not-yet-committed sliver.
            self.history.extrapolate(t_query)
        }
    }
}

/// Segment view backed by a callable; used for probing models against
/// synthetic histories (zero-solution checks, Lipschitz sampling).
pub struct FnSegment<F: Fn(f64) -> Vec<f64>> {
    f: F,
    tau: f64,
    dim: usize,
}

impl<F: Fn(f64) -> Vec<f64>> FnSegment<F> {
    pub fn new(f: F, tau: f64, dim: usize) -> Self {
        Self { f, tau, dim }
    }
}

impl<F: Fn(f64) -> Vec<f64>> HistorySegment for FnSegment<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn tau(&self) -> f64 {
        self.tau
    }

    fn at(&self, s: f64) -> Result<StateVec> {
        if !(-self.tau..=0.0).contains(&s) {
            return Err(Error::Domain(format!(
                "segment lag {s} outside [-{}, 0]",
                self.tau
            )));
        }
        StateVec::new((self.f)(s))
    }
}

pub type RhsFn = dyn Fn(f64, &dyn HistorySegment, &[f64]) -> Result<StateVec> + Send + Sync;
pub type FeedbackFn = dyn Fn(&[f64]) -> Vec<f64> + Send + Sync;
pub type InitialFn = dyn Fn(f64) -> Vec<f64> + Send + Sync;

/// The controlled delay system: `x' = f(t, x_t, u)` with feedback `k` and
/// initial function `phi` on `[-tau, 0]`.
pub struct SystemModel {
    dim_state: usize,
    dim_input: usize,
    tau: f64,
    rhs: Box<RhsFn>,
    feedback: Box<FeedbackFn>,
    initial: Box<InitialFn>,
}

impl SystemModel {
    /// Construction validates `k(0) = 0` and spot-checks `f(t, 0, 0) = 0`
    /// so the zero solution is admitted.
    pub fn new(
        dim_state: usize,
        dim_input: usize,
        tau: f64,
        rhs: Box<RhsFn>,
        feedback: Box<FeedbackFn>,
        initial: Box<InitialFn>,
    ) -> Result<Self> {
        if dim_state < 1 || dim_input < 1 {
            return Err(Error::Config(
                "state and input dimensions must be >= 1".into(),
            ));
        }
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::Config(format!("delay horizon must be > 0, got {tau}")));
        }
        let model = Self {
            dim_state,
            dim_input,
            tau,
            rhs,
            feedback,
            initial,
        };
        let k0 = model.feedback(&vec![0.0; dim_state]);
        if k0.len() != dim_input {
            return Err(Error::Config("feedback output has wrong dimension".into()));
        }
        if k0.iter().any(|v| v.abs() > 1e-12) {
            return Err(Error::Config("feedback must satisfy k(0) = 0".into()));
        }
        let zero_seg = FnSegment::new(|_| vec![0.0; dim_state], tau, dim_state);
        for &t in &[0.0, 0.7, 13.0] {
            let f0 = model.rhs(t, &zero_seg, &vec![0.0; dim_input])?;
            if f0.norm() > 1e-12 {
                return Err(Error::Config(format!(
                    "rhs must vanish on the zero segment (f(t,0,0) = 0), violated at t = {t}"
                )));
            }
        }
        let x0 = model.initial(0.0);
        if x0.len() != dim_state {
            return Err(Error::Config("initial function has wrong dimension".into()));
        }
        Ok(model)
    }

    /// Same model with a different initial function.
    pub fn with_initial(mut self, initial: Box<InitialFn>) -> Result<Self> {
        if initial(0.0).len() != self.dim_state {
            return Err(Error::Config("initial function has wrong dimension".into()));
        }
        self.initial = initial;
        Ok(self)
    }

    pub fn dim_state(&self) -> usize {
        self.dim_state
    }

    pub fn dim_input(&self) -> usize {
        self.dim_input
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn rhs(&self, t: f64, seg: &dyn HistorySegment, u: &[f64]) -> Result<StateVec> {
        debug_assert_eq!(u.len(), self.dim_input);
        let dx = (self.rhs)(t, seg, u)?;
        if dx.dim() != self.dim_state {
            return Err(Error::Domain("rhs output has wrong dimension".into()));
        }
        Ok(dx)
    }

    pub fn feedback(&self, x: &[f64]) -> Vec<f64> {
        (self.feedback)(x)
    }

    pub fn initial(&self, s: f64) -> Vec<f64> {
        (self.initial)(s)
    }

    /// History over `[t0 - tau, t0]` sampled from the initial function, with
    /// fourth-order finite-difference derivatives for dense output.
    pub fn initial_history(&self, t0: f64, h: f64) -> Result<HistoryTrajectory> {
        let phi = |s: f64| self.initial(s);
        let dphi = |s: f64| fd_derivative(&phi, s, self.tau);
        HistoryTrajectory::from_initial_fn(t0, self.tau, h, &phi, &dphi)
    }

    /// `(||phi(0)||, ||phi||_tau)`, the sup norm probed on a fine grid.
    pub fn initial_norms(&self) -> (f64, f64) {
        let x0 = self.initial(0.0);
        let phi0 = x0.iter().map(|v| v * v).sum::<f64>().sqrt();
        let mut sup: f64 = 0.0;
        let probes = 512;
        for i in 0..=probes {
            let s = -self.tau * i as f64 / probes as f64;
            let x = self.initial(s);
            sup = sup.max(x.iter().map(|v| v * v).sum::<f64>().sqrt());
        }
        (phi0, sup)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn decay_model() -> SystemModel {
        // Scalar x' = -x, no real delay dependence, k = 0.
        SystemModel::new(
            1,
            1,
            1.0,
            Box::new(|_t, seg, _u| {
                let x = seg.at(0.0)?;
                Ok(StateVec::from_raw(vec![-x[0]]))
            }),
            Box::new(|_| vec![0.0]),
            Box::new(|_| vec![1.0]),
        )
        .unwrap()
    }

    #[test]
    fn zero_preservation_enforced() {
        let bad = SystemModel::new(
            1,
            1,
            1.0,
            Box::new(|_t, _seg, _u| Ok(StateVec::from_raw(vec![1.0]))),
            Box::new(|_| vec![0.0]),
            Box::new(|_| vec![0.0]),
        );
        assert!(bad.is_err());
    }

    #[test]
    fn feedback_zero_enforced() {
        let bad = SystemModel::new(
            1,
            1,
            1.0,
            Box::new(|_t, seg, _u| Ok(seg.at(0.0)?)),
            Box::new(|_| vec![0.5]),
            Box::new(|_| vec![0.0]),
        );
        assert!(bad.is_err());
    }

    #[test]
    fn segment_view_overrides_front() {
        let m = decay_model();
        let hist = m.initial_history(0.0, 0.1).unwrap();
        let stage = StateVec::new(vec![42.0]).unwrap();
        let seg = TrajectorySegment::new(&hist, 0.0, &stage);
        assert_eq!(seg.at(0.0).unwrap()[0], 42.0);
        assert!((seg.at(-1.0).unwrap()[0] - 1.0).abs() < 1e-12);
        assert!(seg.at(-1.5).is_err());
    }

    #[test]
    fn initial_norms_of_constant() {
        let m = decay_model();
        let m = m.with_initial(Box::new(|_| vec![1.0])).unwrap();
        let (n0, ntau) = m.initial_norms();
        assert_eq!(n0, 1.0);
        assert_eq!(ntau, 1.0);
    }
}
