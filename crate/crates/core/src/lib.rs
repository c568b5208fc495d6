//! Simulation and numerical certification of event-triggered control for
//! nonlinear time-delay systems.
//!
//! The crate integrates the closed-loop delay differential equation with a
//! fixed-step RK4 scheme, fires control updates exactly when the triggering
//! condition holds, and re-derives every constant of the stability and
//! minimum-inter-event-time arguments so a finished run can be checked
//! against them:
//!
//! - [`model`] / [`history`] / [`state`] / [`kfun`] — domain types: system
//!   models over history segments, dense trajectories, comparison functions.
//! - [`integrator`] — the event-aware RK4 engine.
//! - [`trigger`] — triggering residual, event log, enforcement check.
//! - [`lyapunov`] — functional evaluation and the decrease check.
//! - [`bounds`] — proof constants, envelopes, stability radii, the
//!   inter-event root.
//! - [`halanay`] — oracle suite for the delay inequality bound.
//! - [`chatter`] — the machine-tool-chatter benchmark scenario.
//! - [`certify`] — one-call certification of a run.

pub mod bounds;
pub mod certify;
pub mod chatter;
pub mod error;
pub mod halanay;
pub mod history;
pub mod integrator;
pub mod kfun;
pub mod lyapunov;
pub mod model;
pub mod state;
pub mod trigger;

pub use bounds::{
    attractivity_envelope, combined_envelope, compute_bound_constants, compute_eta,
    compute_mbar_m, envelope_check, estimate_lipschitz, growth_envelope, stability_radii,
    zeno_bound_tstar, zeno_tstar_root, BoundConstants, EnvelopeReport, LipschitzEstimate,
    LipschitzSpec, StabilityRadii, XiPolicy, ZenoBound,
};
pub use certify::{certify_run, CertificationReport, CertifyOptions, CheckOutcome};
pub use chatter::{
    build_chatter_certificate, build_chatter_model, build_chatter_model_with_initial,
    build_chatter_trigger, ChatterParams,
};
pub use error::{Error, Result};
pub use halanay::{
    check_lemma2, damped_solution, extremal_solution, HalanayProblem, Lemma2Report,
    TabulatedSolution,
};
pub use history::HistoryTrajectory;
pub use integrator::{
    simulate, simulate_continuous, step, FeedbackMode, IntegratorConfig, SimulationResult,
    StepRecord,
};
pub use kfun::KFunction;
pub use lyapunov::{decrease_check, eval_v, simpson_over_history, DecreaseReport, LyapunovCertificate};
pub use model::{FnSegment, HistorySegment, SystemModel, TrajectorySegment};
pub use state::StateVec;
pub use trigger::{enforcement_check, EnforcementReport, EventLog, TriggerConfig};
