//! The machine-tool-chatter benchmark system, its Lyapunov certificate, and
//! its trigger configuration, wired as a ready-made scenario.
//!
//! Dynamics (delay normalized to one time unit):
//! ```text
//! x1' = x2 + w0 x1^2 x2 + u
//! x2' = -w2 x1 - w1 x2 - w3 x1(t - 1) - w2 x1^3
//! ```
//! with feedback `u = -x1` and constant initial state `(1, 2)`.

use crate::error::{Error, Result};
use crate::kfun::KFunction;
use crate::lyapunov::{simpson_over_history, LyapunovCertificate};
use crate::model::{InitialFn, SystemModel};
use crate::state::StateVec;
use crate::trigger::TriggerConfig;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChatterParams {
    pub omega0: f64,
    pub omega1: f64,
    pub omega2: f64,
    pub omega3: f64,
    /// Weight of the integral term of the functional.
    pub delta: f64,
    /// Decay rate inside the integral term.
    pub zeta: f64,
    pub tau: f64,
}

impl Default for ChatterParams {
    fn default() -> Self {
        Self {
            omega0: 1.0,
            omega1: 0.5,
            omega2: 1.0,
            omega3: 0.3,
            delta: 0.4,
            zeta: 0.28,
            tau: 1.0,
        }
    }
}

impl ChatterParams {
    pub fn validate(&self) -> Result<()> {
        if self.omega0 < 0.0 || self.omega1 < 0.0 || self.omega2 < 0.0 || self.omega3 < 0.0 {
            return Err(Error::Config("omega parameters must be nonnegative".into()));
        }
        if !(self.delta > 0.0 && self.zeta > 0.0 && self.tau > 0.0) {
            return Err(Error::Config("delta, zeta, tau must be positive".into()));
        }
        Ok(())
    }

    /// True when the parameters match the certified defaults.
    pub fn is_default(&self) -> bool {
        let d = ChatterParams::default();
        (self.omega0 - d.omega0).abs() < 1e-12
            && (self.omega1 - d.omega1).abs() < 1e-12
            && (self.omega2 - d.omega2).abs() < 1e-12
            && (self.omega3 - d.omega3).abs() < 1e-12
            && (self.delta - d.delta).abs() < 1e-12
            && (self.zeta - d.zeta).abs() < 1e-12
            && (self.tau - d.tau).abs() < 1e-12
    }

    /// Tightest quadratic coefficient for the upper sandwich of the integral
    /// term: `V2 <= delta (1 - e^{-zeta}) / zeta * ||phi||_tau^2`.
    pub fn alpha3_coefficient(&self) -> f64 {
        self.delta * (1.0 - (-self.zeta).exp()) / self.zeta
    }
}

/// The chatter plant with feedback `u = -x1` and `phi = (1, 2)`.
pub fn build_chatter_model(p: &ChatterParams) -> Result<SystemModel> {
    build_chatter_model_with_initial(p, Box::new(|_| vec![1.0, 2.0]))
}

/// Same plant with a caller-supplied initial function.
pub fn build_chatter_model_with_initial(
    p: &ChatterParams,
    initial: Box<InitialFn>,
) -> Result<SystemModel> {
    p.validate()?;
    let (w0, w1, w2, w3) = (p.omega0, p.omega1, p.omega2, p.omega3);
    let tau = p.tau;
    SystemModel::new(
        2,
        1,
        tau,
        Box::new(move |_t, seg, u| {
            let x = seg.at(0.0)?;
            let xd = seg.at(-tau)?;
            Ok(StateVec::from_raw(vec![
                x[1] + w0 * x[0] * x[0] * x[1] + u[0],
                -w2 * x[0] - w1 * x[1] - w3 * xd[0] - w2 * x[0] * x[0] * x[0],
            ]))
        }),
        Box::new(|x| vec![-x[0]]),
        initial,
    )
}

/// The quadratic-plus-integral certificate:
/// `V1 = x'x`, `V2 = delta * int_{t-tau}^t e^{-zeta (t-s)} x'(s)x(s) ds`,
/// `alpha1 = alpha2 = s^2`, `alpha3 = c s^2`, `chi = s^2`, `mu = 0.28`.
pub fn build_chatter_certificate(p: &ChatterParams) -> Result<LyapunovCertificate> {
    p.validate()?;
    if !p.is_default() {
        log::warn!(
            "chatter certificate: decrease rate mu = 0.28 is certified only for the default parameters; \
             supplied parameters differ"
        );
    }
    let (delta, zeta, tau) = (p.delta, p.zeta, p.tau);
    let alpha3 = KFunction::power_law(p.alpha3_coefficient(), 2.0)?;
    LyapunovCertificate::new(
        Box::new(|_t, x: &[f64]| x.iter().map(|v| v * v).sum()),
        Box::new(move |t, history| {
            simpson_over_history(history, t - tau, t, &|s, x| {
                delta * (-zeta * (t - s)).exp() * x.iter().map(|v| v * v).sum::<f64>()
            })
        }),
        KFunction::square(),
        KFunction::square(),
        alpha3,
        KFunction::square(),
        0.28,
    )
}

/// The benchmark trigger: `sigma = 0.16`, `a = 1`, `b = 0.14`, `t0 = 0`,
/// `chi = alpha1 = s^2`. Note `b` exceeds `mu - sigma = 0.12` here.
pub fn build_chatter_trigger() -> TriggerConfig {
    TriggerConfig::new(
        0.16,
        1.0,
        0.14,
        0.0,
        KFunction::square(),
        KFunction::square(),
    )
    .expect("static parameters are valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::FnSegment;

    #[test]
    fn rhs_vanishes_at_origin() {
        let m = build_chatter_model(&ChatterParams::default()).unwrap();
        let zero = FnSegment::new(|_| vec![0.0, 0.0], 1.0, 2);
        let dx = m.rhs(0.0, &zero, &[0.0]).unwrap();
        assert_eq!(dx.as_slice(), &[0.0, 0.0]);
    }

    #[test]
    fn rhs_hand_arithmetic() {
        // x = (1,2) now and delayed, u = -1:
        // x1' = 2 + 1*1*2 - 1 = 3; x2' = -1 - 0.5*2 - 0.3*1 - 1 = -3.3.
        let m = build_chatter_model(&ChatterParams::default()).unwrap();
        let seg = FnSegment::new(|_| vec![1.0, 2.0], 1.0, 2);
        let dx = m.rhs(0.0, &seg, &[-1.0]).unwrap();
        assert!((dx[0] - 3.0).abs() < 1e-12);
        assert!((dx[1] - (-3.3)).abs() < 1e-12);
    }

    #[test]
    fn zeroing_nonlinear_weights_linearizes() {
        let p = ChatterParams {
            omega0: 0.0,
            omega2: 0.0,
            ..Default::default()
        };
        let m = build_chatter_model(&p).unwrap();
        // Linear in (x, x(t-1), u): superposition over two probes.
        let probe = |scale: f64, u: f64| {
            let seg = FnSegment::new(move |_| vec![scale, -scale], 1.0, 2);
            m.rhs(0.0, &seg, &[u]).unwrap()
        };
        let a = probe(1.0, 0.5);
        let b = probe(2.0, 1.0);
        for i in 0..2 {
            assert!((b[i] - 2.0 * a[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn certificate_reports_example_constants() {
        let cert = build_chatter_certificate(&ChatterParams::default()).unwrap();
        assert_eq!(cert.mu, 0.28);
        // alpha1 = alpha2 = squared norm (the V1 sandwich is equality).
        assert!((cert.alpha1.eval(3.0).unwrap() - 9.0).abs() < 1e-12);
        assert!((cert.alpha2.eval(3.0).unwrap() - 9.0).abs() < 1e-12);
        // alpha3 coefficient from the weighted-integral closed form.
        let c = ChatterParams::default().alpha3_coefficient();
        assert!((c - 0.4 * (1.0 - (-0.28_f64).exp()) / 0.28).abs() < 1e-15);
        assert!((cert.alpha3.eval(1.0).unwrap() - c).abs() < 1e-15);
    }

    #[test]
    fn v2_at_constant_history_matches_closed_form() {
        let p = ChatterParams::default();
        let cert = build_chatter_certificate(&p).unwrap();
        let m = build_chatter_model(&p).unwrap();
        let hist = m.initial_history(0.0, 0.005).unwrap();
        let v2 = cert.v2(0.0, &hist).unwrap();
        let expect = 2.0 * (1.0 - (-0.28_f64).exp()) / 0.28;
        assert!((v2 - expect).abs() < 1e-9, "v2 = {v2}, expect {expect}");
    }

    #[test]
    fn trigger_matches_benchmark_numbers() {
        let trig = build_chatter_trigger();
        // sigma * alpha1(||x||) at x = (1, 2).
        let term = trig.sigma * trig.alpha1.eval(5.0_f64.sqrt()).unwrap();
        assert!((term - 0.8).abs() < 1e-12);
        // chi(a e^0) = 1.
        assert!((trig.chi.eval(trig.a).unwrap() - 1.0).abs() < 1e-12);
        // mu - sigma = 0.12 < b.
        assert!(0.28 - trig.sigma < trig.b);
    }
}
