//! Fixed-step RK4 integration of the closed loop, with the control held
//! constant between events and event times located by bisection on the
//! trigger residual.
//!
//! Events split a grid step into two partial RK4 steps; the located event
//! time becomes an extra dense-output knot so delayed arguments stay on a
//! well-defined piecewise-cubic record.

use crate::error::{Error, Result};
use crate::history::{check_divides, hermite_eval, HistoryTrajectory};
use crate::lyapunov::{eval_v, LyapunovCertificate};
use crate::model::{SystemModel, TrajectorySegment};
use crate::state::StateVec;
use crate::trigger::{EventLog, TriggerConfig};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub t0: f64,
    pub h: f64,
    pub t_end: f64,
    /// Bisection tolerance for event location (time units).
    pub event_time_tol: f64,
    /// Minimum admissible inter-event gap before the diagnostic guard trips.
    pub zeno_floor: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            t0: 0.0,
            h: 0.005,
            t_end: 60.0,
            event_time_tol: 1e-9,
            zeno_floor: 1e-7,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self, tau: f64) -> Result<()> {
        if !(self.h > 0.0) {
            return Err(Error::Config(format!("step must be > 0, got {}", self.h)));
        }
        check_divides(tau, self.h)?;
        if !(self.t_end > self.t0) {
            return Err(Error::Config(format!(
                "horizon must exceed start: t0 = {}, t_end = {}",
                self.t0, self.t_end
            )));
        }
        if !(self.event_time_tol > 0.0 && self.event_time_tol < self.h) {
            return Err(Error::Config(format!(
                "event_time_tol must lie in (0, h), got {}",
                self.event_time_tol
            )));
        }
        if self.zeno_floor < 2.0 * self.event_time_tol {
            return Err(Error::Config(format!(
                "zeno_floor must be >= 2 * event_time_tol, got {}",
                self.zeno_floor
            )));
        }
        Ok(())
    }

    pub fn grid_steps(&self) -> usize {
        ((self.t_end - self.t0) / self.h - 1e-9).ceil().max(1.0) as usize
    }
}

/// One row of the simulated trajectory. `eps_norm` is `||x(t_i) - x(t)||`
/// for the latest event time `t_i <= t`; `v` and `residual` are recorded so
/// downstream checks and serialization need no recomputation (`v` is NaN for
/// runs without a certificate).
#[derive(Debug, Clone)]
pub struct StepRecord {
    pub t: f64,
    pub x: StateVec,
    pub u: Vec<f64>,
    pub eps_norm: f64,
    pub v: f64,
    pub residual: f64,
    pub event_fired: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FeedbackMode {
    EventTriggered,
    Continuous,
}

#[derive(Debug)]
pub struct SimulationResult {
    pub mode: FeedbackMode,
    pub t0: f64,
    pub t_end: f64,
    pub h: f64,
    pub records: Vec<StepRecord>,
    pub events: EventLog,
    pub history: HistoryTrajectory,
}

impl SimulationResult {
    pub fn final_state(&self) -> &StateVec {
        &self.records.last().unwrap().x
    }

    pub fn final_norm(&self) -> f64 {
        self.final_state().norm()
    }

    /// Largest state norm over all records.
    pub fn sup_norm(&self) -> f64 {
        self.records
            .iter()
            .map(|r| r.x.norm())
            .fold(0.0, f64::max)
    }

    /// Worst deviation between the recorded `eps_norm` and the value
    /// recomputed from the dense history and the event log.
    pub fn eps_consistency_max(&self) -> Result<f64> {
        if self.mode == FeedbackMode::Continuous {
            return Ok(0.0);
        }
        let times = self.events.times();
        let states = self.events.sampled_states();
        let mut worst: f64 = 0.0;
        let mut ev = 0usize;
        for rec in &self.records {
            while ev + 1 < times.len() && times[ev + 1] <= rec.t {
                ev += 1;
            }
            let x_t = self.history.interpolate(rec.t)?;
            let recomputed = states[ev].dist(&x_t);
            worst = worst.max((recomputed - rec.eps_norm).abs());
        }
        Ok(worst)
    }
}

fn eval_rhs(
    model: &SystemModel,
    history: &HistoryTrajectory,
    t: f64,
    x: &StateVec,
    u: &[f64],
) -> Result<StateVec> {
    let seg = TrajectorySegment::new(history, t, x);
    let dx = model.rhs(t, &seg, u)?;
    if !dx.is_finite() {
        return Err(Error::Blowup { t });
    }
    Ok(dx)
}

/// Classical RK4 over `[t, t + w]`. Returns the accepted state together with
/// the derivative at both ends of the step (for dense output).
///
/// `u_of` supplies the input at a stage state: a clone of the held input for
/// event-triggered operation, the feedback law for continuous operation.
fn rk4_with_ends(
    model: &SystemModel,
    history: &HistoryTrajectory,
    t: f64,
    x: &StateVec,
    w: f64,
    u_of: &dyn Fn(&StateVec) -> Vec<f64>,
) -> Result<(StateVec, StateVec, StateVec)> {
    let k1 = eval_rhs(model, history, t, x, &u_of(x))?;
    let x2 = x.add_scaled(0.5 * w, &k1);
    let k2 = eval_rhs(model, history, t + 0.5 * w, &x2, &u_of(&x2))?;
    let x3 = x.add_scaled(0.5 * w, &k2);
    let k3 = eval_rhs(model, history, t + 0.5 * w, &x3, &u_of(&x3))?;
    let x4 = x.add_scaled(w, &k3);
    let k4 = eval_rhs(model, history, t + w, &x4, &u_of(&x4))?;
    let combined: Vec<f64> = (0..x.dim())
        .map(|i| x[i] + w / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect();
    let x_new = StateVec::from_raw(combined);
    if !x_new.is_finite() {
        return Err(Error::Blowup { t: t + w });
    }
    let d_end = eval_rhs(model, history, t + w, &x_new, &u_of(&x_new))?;
    Ok((x_new, k1, d_end))
}

/// One RK4 step of the closed loop with the input held at `u_held`.
/// The current state is read from the history front.
pub fn step(
    model: &SystemModel,
    history: &HistoryTrajectory,
    t: f64,
    u_held: &[f64],
    h: f64,
) -> Result<StateVec> {
    history.require_window(t)?;
    let x = history.interpolate(t)?;
    let held = u_held.to_vec();
    let (x_new, _, _) = rk4_with_ends(model, history, t, &x, h, &move |_| held.clone())?;
    Ok(x_new)
}

struct CandidateStep {
    t_from: f64,
    t_to: f64,
    x_from: StateVec,
    x_to: StateVec,
    d_from: StateVec,
    d_to: StateVec,
}

impl CandidateStep {
    fn dense_at(&self, s: f64) -> StateVec {
        StateVec::from_raw(hermite_eval(
            self.t_from,
            self.t_to,
            &self.x_from,
            &self.x_to,
            &self.d_from,
            &self.d_to,
            s,
        ))
    }
}

/// Simulate the event-triggered closed loop on `[t0, t_end]`.
pub fn simulate(
    model: &SystemModel,
    trig: &TriggerConfig,
    lyap: &LyapunovCertificate,
    cfg: &IntegratorConfig,
) -> Result<SimulationResult> {
    if trig.sigma == 0.0 && trig.a == 0.0 {
        return Err(Error::Config(
            "sigma = 0 with a = 0 forces continuous triggering; rejected".into(),
        ));
    }
    if (trig.t0 - cfg.t0).abs() > 1e-12 {
        return Err(Error::Config(format!(
            "trigger t0 = {} disagrees with integrator t0 = {}",
            trig.t0, cfg.t0
        )));
    }
    run(model, Some((trig, lyap)), cfg)
}

/// Baseline with continuous state feedback `u = k(x(t))`, re-evaluated at
/// every stage; the event log stays empty.
pub fn simulate_continuous(model: &SystemModel, cfg: &IntegratorConfig) -> Result<SimulationResult> {
    run(model, None, cfg)
}

fn run(
    model: &SystemModel,
    triggered: Option<(&TriggerConfig, &LyapunovCertificate)>,
    cfg: &IntegratorConfig,
) -> Result<SimulationResult> {
    cfg.validate(model.tau())?;
    let t0 = cfg.t0;
    let mut history = model.initial_history(t0, cfg.h)?;
    let mut x = history.state_at_end().clone();
    if !x.is_finite() {
        return Err(Error::Blowup { t: t0 });
    }

    let mut x_sample = x.clone();
    let mut u_held = model.feedback(&x_sample);
    let mut events = match triggered {
        Some(_) => EventLog::start(t0, x_sample.clone()),
        None => EventLog::empty(),
    };
    let mut records: Vec<StepRecord> = Vec::with_capacity(cfg.grid_steps() + 8);

    let record_v = |t: f64, history: &HistoryTrajectory| -> Result<f64> {
        match triggered {
            Some((_, lyap)) => eval_v(lyap, t, history),
            None => Ok(f64::NAN),
        }
    };

    {
        let (eps0, res0) = match triggered {
            Some((trig, _)) => (0.0, trig.residual_norms(t0, x.norm(), 0.0)?),
            None => (0.0, f64::NAN),
        };
        records.push(StepRecord {
            t: t0,
            x: x.clone(),
            u: u_held.clone(),
            eps_norm: eps0,
            v: record_v(t0, &history)?,
            residual: res0,
            event_fired: triggered.is_some(),
        });
    }

    let mut zeno_run = 0usize;
    let mut t_cur = t0;

    for k in 1..=cfg.grid_steps() {
        let t_next = t0 + k as f64 * cfg.h;
        loop {
            let w = t_next - t_cur;
            let (x_cand, d_from, d_to) = match triggered {
                Some(_) => {
                    let held = u_held.clone();
                    rk4_with_ends(model, &history, t_cur, &x, w, &move |_| held.clone())?
                }
                None => rk4_with_ends(model, &history, t_cur, &x, w, &|xs| model.feedback(xs))?,
            };

            let Some((trig, _)) = triggered else {
                history.append_segment(t_next, x_cand.clone(), d_from, d_to)?;
                records.push(StepRecord {
                    t: t_next,
                    x: x_cand.clone(),
                    u: model.feedback(&x_cand),
                    eps_norm: 0.0,
                    v: f64::NAN,
                    residual: f64::NAN,
                    event_fired: false,
                });
                x = x_cand;
                t_cur = t_next;
                break;
            };

            let cand = CandidateStep {
                t_from: t_cur,
                t_to: t_next,
                x_from: x.clone(),
                x_to: x_cand.clone(),
                d_from,
                d_to,
            };
            let res_at = |s: f64, xs: &StateVec| -> Result<f64> {
                trig.residual_norms(s, xs.norm(), x_sample.dist(xs))
            };

            // Residual sampled at the stage midpoint and the step end; a
            // crossing anywhere triggers bisection on the dense output.
            let t_mid = t_cur + 0.5 * w;
            let x_mid = cand.dense_at(t_mid);
            let r_mid = res_at(t_mid, &x_mid)?;
            let r_end = res_at(t_next, &x_cand)?;

            if r_mid <= 0.0 && r_end <= 0.0 {
                history.append_segment(t_next, x_cand.clone(), cand.d_from, cand.d_to)?;
                let eps_norm = x_sample.dist(&x_cand);
                records.push(StepRecord {
                    t: t_next,
                    x: x_cand.clone(),
                    u: u_held.clone(),
                    eps_norm,
                    v: record_v(t_next, &history)?,
                    residual: r_end,
                    event_fired: false,
                });
                x = x_cand;
                t_cur = t_next;
                break;
            }

            // Event inside this step: bracket, bisect, and split the step.
            // Probes re-integrate the partial step so the located time
            // tracks the RK4 flow itself, not the dense interpolant.
            let (mut lo, mut hi) = if r_mid > 0.0 {
                (t_cur, t_mid)
            } else {
                (t_mid, t_next)
            };
            while hi - lo > cfg.event_time_tol {
                let mid = 0.5 * (lo + hi);
                let x_probe = if mid - t_cur > 16.0 * f64::EPSILON * cfg.h {
                    let held = u_held.clone();
                    rk4_with_ends(model, &history, t_cur, &x, mid - t_cur, &move |_| {
                        held.clone()
                    })?
                    .0
                } else {
                    cand.dense_at(mid)
                };
                let r = res_at(mid, &x_probe)?;
                if r > 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            let t_ev = (0.5 * (lo + hi))
                .max(t_cur + cfg.event_time_tol)
                .min(t_next - cfg.event_time_tol);

            let w_ev = t_ev - t_cur;
            let (x_ev, d_from_ev, d_to_ev) = {
                let held = u_held.clone();
                rk4_with_ends(model, &history, t_cur, &x, w_ev, &move |_| held.clone())?
            };
            history.append_segment(t_ev, x_ev.clone(), d_from_ev, d_to_ev)?;

            let gap = t_ev - *events.times().last().unwrap();
            if gap < cfg.zeno_floor {
                zeno_run += 1;
                if zeno_run > 5 {
                    let times = events.times();
                    let tail = times[times.len().saturating_sub(7)..].to_vec();
                    let mut tail = tail;
                    tail.push(t_ev);
                    return Err(Error::ZenoGuard {
                        run: zeno_run,
                        floor: cfg.zeno_floor,
                        times: tail,
                    });
                }
            } else {
                zeno_run = 0;
            }

            // Control update: sample, reset the error, log the event.
            x_sample = x_ev.clone();
            u_held = model.feedback(&x_sample);
            events.push(t_ev, x_sample.clone())?;
            records.push(StepRecord {
                t: t_ev,
                x: x_ev.clone(),
                u: u_held.clone(),
                eps_norm: 0.0,
                v: record_v(t_ev, &history)?,
                residual: trig.residual_norms(t_ev, x_ev.norm(), 0.0)?,
                event_fired: true,
            });
            x = x_ev;
            t_cur = t_ev;
        }
    }

    Ok(SimulationResult {
        mode: match triggered {
            Some(_) => FeedbackMode::EventTriggered,
            None => FeedbackMode::Continuous,
        },
        t0,
        t_end: t_cur,
        h: cfg.h,
        records,
        events,
        history,
    })
}
