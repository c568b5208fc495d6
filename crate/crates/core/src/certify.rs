//! End-to-end certification of a run: simulate, then check enforcement,
//! the Lyapunov decrease, both state-norm envelopes, and the inter-event
//! lower bound.

use crate::bounds::{
    compute_bound_constants, envelope_check, zeno_bound_tstar, BoundConstants, LipschitzEstimate,
    LipschitzSpec, XiPolicy,
};
use crate::error::Result;
use crate::integrator::{simulate, IntegratorConfig, SimulationResult};
use crate::lyapunov::{decrease_check, LyapunovCertificate};
use crate::model::SystemModel;
use crate::trigger::{enforcement_check, TriggerConfig};
use serde::Serialize;

#[derive(Debug, Clone)]
pub struct CertifyOptions {
    /// Gain constant in `mbar = a L / |mu - sigma - b|` (imported from the
    /// comparison-lemma machinery; config-supplied).
    pub gain_l: f64,
    pub lipschitz: LipschitzSpec,
    pub xi_policy: XiPolicy,
    pub seed: u64,
    /// Ceiling for the trigger residual over all step records.
    pub enforcement_tol: f64,
    /// Forward-difference allowance scale for the decrease check.
    pub decrease_tol: f64,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self {
            gain_l: 1.0,
            lipschitz: LipschitzSpec::sampled(20_000),
            xi_policy: XiPolicy::HalfB,
            seed: 0,
            enforcement_tol: 1e-6,
            decrease_tol: 0.02,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Serialize)]
pub struct CertificationReport {
    pub constants: BoundConstants,
    pub lipschitz_estimate: Option<LipschitzEstimate>,
    /// Inter-event lower bound; absent when `b < mu - sigma`, where the
    /// earlier regime's bound (out of scope here) applies instead.
    pub tstar: Option<f64>,
    pub event_count: usize,
    pub min_gap: Option<f64>,
    pub final_norm: f64,
    pub checks: Vec<CheckOutcome>,
    pub pass: bool,
}

/// Run the closed loop and certify it. Returns the report together with the
/// simulation so callers can persist the trajectory.
pub fn certify_run(
    model: &SystemModel,
    trig: &TriggerConfig,
    cert: &LyapunovCertificate,
    cfg: &IntegratorConfig,
    opts: &CertifyOptions,
) -> Result<(CertificationReport, SimulationResult)> {
    let result = simulate(model, trig, cert, cfg)?;
    let horizon = cfg.t_end - cfg.t0;
    let (consts, estimate) = compute_bound_constants(
        model,
        trig,
        cert,
        horizon,
        opts.gain_l,
        &opts.lipschitz,
        opts.xi_policy,
        opts.seed,
    )?;

    let mut checks = Vec::new();

    let enf = enforcement_check(&result, trig, opts.enforcement_tol)?;
    checks.push(CheckOutcome {
        name: "enforcement".into(),
        pass: enf.pass(),
        detail: format!(
            "max residual {:.3e} at t = {:.6} (tol {:.1e})",
            enf.max_residual, enf.at_time, enf.tol
        ),
    });

    let dec = decrease_check(cert, &result, opts.decrease_tol)?;
    checks.push(CheckOutcome {
        name: "decrease".into(),
        pass: dec.pass(),
        detail: format!(
            "{} violations over {} steps, worst excess {:.3e} at t = {:.6}",
            dec.violations, dec.checked, dec.worst_excess, dec.worst_t
        ),
    });

    let env = envelope_check(&result, &consts, &cert.alpha1)?;
    checks.push(CheckOutcome {
        name: "envelope".into(),
        pass: env.sound,
        detail: format!(
            "worst ||x||/envelope ratio {:.6} at t = {:.6}",
            env.worst_ratio, env.worst_t
        ),
    });

    let min_gap = result.events.min_gap();
    // The explicit root applies on the b >= mu - sigma branch, i.e. when
    // the envelope rate eta sits strictly below b.
    let tstar = if consts.eta < trig.b * (1.0 - 1e-12) {
        let zb = zeno_bound_tstar(&consts, trig.a, trig.b, horizon)?;
        let pass = match min_gap {
            Some(gap) => gap >= zb.tstar,
            None => true,
        };
        checks.push(CheckOutcome {
            name: "zeno_gap".into(),
            pass,
            detail: format!(
                "min gap {:?} vs T* = {:.3e} ({} events)",
                min_gap,
                zb.tstar,
                result.events.update_count()
            ),
        });
        Some(zb.tstar)
    } else {
        let pass = min_gap.map(|g| g > 0.0).unwrap_or(true);
        checks.push(CheckOutcome {
            name: "zeno_gap".into(),
            pass,
            detail: format!(
                "prior regime (b < mu - sigma): min gap {:?} > 0, {} events",
                min_gap,
                result.events.update_count()
            ),
        });
        None
    };

    let pass = checks.iter().all(|c| c.pass);
    let report = CertificationReport {
        constants: consts,
        lipschitz_estimate: estimate,
        tstar,
        event_count: result.events.update_count(),
        min_gap,
        final_norm: result.final_norm(),
        checks,
        pass,
    };
    Ok((report, result))
}
