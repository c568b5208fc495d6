//! Dense piecewise record of the state on `[t0 - tau, t_current]`.
//!
//! Storage is per segment: each knot carries the state, and each segment
//! between knots carries the derivative at both of its ends. Adjacent
//! segments may disagree on the derivative at a shared knot — that is how
//! control-update kinks at event times are represented without smearing.
//! Interpolation inside a segment is cubic Hermite, exact at the knots.

use crate::error::{Error, Result};
use crate::state::StateVec;

#[derive(Debug, Clone)]
pub struct HistoryTrajectory {
    t0: f64,
    tau: f64,
    h: f64,
    knots: Vec<f64>,
    states: Vec<StateVec>,
    /// Derivative at the left end of segment j (between knots j and j+1).
    seg_d0: Vec<StateVec>,
    /// Derivative at the right end of segment j.
    seg_d1: Vec<StateVec>,
}

/// Tolerance for "h divides tau" and boundary membership checks.
const GRID_REL_TOL: f64 = 1e-9;

impl HistoryTrajectory {
    /// Build the initial segment on `[t0 - tau, t0]` from a callable and its
    /// derivative, sampled on the uniform grid of step `h = tau / n`.
    pub fn from_initial_fn(
        t0: f64,
        tau: f64,
        h: f64,
        phi: &dyn Fn(f64) -> Vec<f64>,
        dphi: &dyn Fn(f64) -> Vec<f64>,
    ) -> Result<Self> {
        let n = check_divides(tau, h)?;
        let dim = phi(0.0).len();
        if dim == 0 {
            return Err(Error::Domain("initial function must have dim >= 1".into()));
        }
        let mut knots = Vec::with_capacity(n + 1);
        let mut states = Vec::with_capacity(n + 1);
        let mut derivs = Vec::with_capacity(n + 1);
        for j in 0..=n {
            // Knots are spaced from t0 so the right end lands on t0 exactly.
            let s = if j == n { 0.0 } else { -tau + j as f64 * h };
            let t = t0 + s;
            let x = StateVec::new(phi(s))?;
            let d = StateVec::new(dphi(s))?;
            if x.dim() != dim || d.dim() != dim {
                return Err(Error::Domain(
                    "initial function changed dimension across its domain".into(),
                ));
            }
            knots.push(t);
            states.push(x);
            derivs.push(d);
        }
        let seg_d0 = derivs[..n].to_vec();
        let seg_d1 = derivs[1..].to_vec();
        Ok(Self {
            t0,
            tau,
            h,
            knots,
            states,
            seg_d0,
            seg_d1,
        })
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn grid_step(&self) -> f64 {
        self.h
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    /// Earliest covered time, `t0 - tau`.
    pub fn t_begin(&self) -> f64 {
        self.knots[0]
    }

    /// Latest covered time (the integration front).
    pub fn t_end(&self) -> f64 {
        *self.knots.last().unwrap()
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn states(&self) -> &[StateVec] {
        &self.states
    }

    pub fn state_at_end(&self) -> &StateVec {
        self.states.last().unwrap()
    }

    /// Append the segment `[t_end, t_new]`.
    ///
    /// `d_start` is the derivative at the old front *on this segment* (it may
    /// differ from the previous segment's right derivative across an event),
    /// `d_end` the derivative at `t_new`.
    pub fn append_segment(
        &mut self,
        t_new: f64,
        x_new: StateVec,
        d_start: StateVec,
        d_end: StateVec,
    ) -> Result<()> {
        let t_front = self.t_end();
        if !(t_new > t_front) {
            return Err(Error::Domain(format!(
                "append time {t_new} must exceed current front {t_front}"
            )));
        }
        if x_new.dim() != self.dim() {
            return Err(Error::Domain("appended state has wrong dimension".into()));
        }
        if !(x_new.is_finite() && d_start.is_finite() && d_end.is_finite()) {
            return Err(Error::Blowup { t: t_new });
        }
        self.knots.push(t_new);
        self.states.push(x_new);
        self.seg_d0.push(d_start);
        self.seg_d1.push(d_end);
        Ok(())
    }

    /// Dense-output value at time `s` within the covered span.
    pub fn interpolate(&self, s: f64) -> Result<StateVec> {
        let (lo, hi) = (self.t_begin(), self.t_end());
        let slack = GRID_REL_TOL * self.h.max(1.0);
        if s < lo - slack || s > hi + slack {
            return Err(Error::OutOfSpan { t: s, lo, hi });
        }
        let s = s.clamp(lo, hi);
        let idx = self.knots.partition_point(|&k| k < s);
        if idx < self.knots.len() && self.knots[idx] == s {
            return Ok(self.states[idx].clone());
        }
        self.hermite(idx - 1, s)
    }

    /// Extrapolate a short distance beyond the front using the last segment's
    /// cubic. Used by the engine for stage views with sub-step delays.
    pub(crate) fn extrapolate(&self, s: f64) -> Result<StateVec> {
        let hi = self.t_end();
        if s <= hi {
            return self.interpolate(s);
        }
        if s > hi + 2.0 * self.h {
            return Err(Error::OutOfSpan {
                t: s,
                lo: self.t_begin(),
                hi,
            });
        }
        if self.seg_d0.is_empty() {
            return Err(Error::OutOfSpan {
                t: s,
                lo: self.t_begin(),
                hi,
            });
        }
        self.hermite(self.seg_d0.len() - 1, s)
    }

    fn hermite(&self, seg: usize, s: f64) -> Result<StateVec> {
        Ok(StateVec::from_raw(hermite_eval(
            self.knots[seg],
            self.knots[seg + 1],
            &self.states[seg],
            &self.states[seg + 1],
            &self.seg_d0[seg],
            &self.seg_d1[seg],
            s,
        )))
    }

    /// Require the span `[t - tau, t]` to be covered.
    pub fn require_window(&self, t: f64) -> Result<()> {
        let slack = GRID_REL_TOL * self.h.max(1.0);
        if t - self.tau < self.t_begin() - slack || t > self.t_end() + slack {
            return Err(Error::InsufficientHistory {
                need_lo: t - self.tau,
                need_hi: t,
                have_lo: self.t_begin(),
                have_hi: self.t_end(),
            });
        }
        Ok(())
    }
}

/// Cubic Hermite value at `s` on the interval `[ta, tb]` with endpoint
/// states `xa, xb` and endpoint derivatives `da, db`.
pub(crate) fn hermite_eval(
    ta: f64,
    tb: f64,
    xa: &[f64],
    xb: &[f64],
    da: &[f64],
    db: &[f64],
    s: f64,
) -> Vec<f64> {
    let w = tb - ta;
    let th = (s - ta) / w;
    let h00 = (1.0 + 2.0 * th) * (1.0 - th) * (1.0 - th);
    let h10 = th * (1.0 - th) * (1.0 - th);
    let h01 = th * th * (3.0 - 2.0 * th);
    let h11 = th * th * (th - 1.0);
    (0..xa.len())
        .map(|i| h00 * xa[i] + h10 * w * da[i] + h01 * xb[i] + h11 * w * db[i])
        .collect()
}

/// Check that `h` divides `span` exactly (within relative tolerance) and
/// return the integer count.
pub(crate) fn check_divides(span: f64, h: f64) -> Result<usize> {
    if !(h > 0.0 && span > 0.0) {
        return Err(Error::Config(format!(
            "need positive step and span, got h = {h}, span = {span}"
        )));
    }
    let ratio = span / h;
    let n = ratio.round();
    if n < 1.0 || (ratio - n).abs() > GRID_REL_TOL * n {
        return Err(Error::Config(format!(
            "step h = {h} must divide {span} exactly (got ratio {ratio})"
        )));
    }
    Ok(n as usize)
}

/// Numerical derivative of a callable on `[-tau, 0]`, fourth order, with
/// one-sided stencils at the interval ends. Used to seed dense output for
/// initial functions supplied without a derivative.
pub fn fd_derivative(phi: &dyn Fn(f64) -> Vec<f64>, s: f64, tau: f64) -> Vec<f64> {
    let d = (tau * 1e-3).min(1e-3).max(1e-6);
    let at = |q: f64| phi(q.clamp(-tau, 0.0));
    let combine = |coeffs: &[(f64, f64)]| -> Vec<f64> {
        let dim = at(s).len();
        let mut out = vec![0.0; dim];
        for &(c, off) in coeffs {
            let v = at(s + off * d);
            for i in 0..dim {
                out[i] += c * v[i];
            }
        }
        for o in &mut out {
            *o /= 12.0 * d;
        }
        out
    };
    if s - 2.0 * d >= -tau && s + 2.0 * d <= 0.0 {
        combine(&[(1.0, -2.0), (-8.0, -1.0), (8.0, 1.0), (-1.0, 2.0)])
    } else if s + 4.0 * d <= 0.0 {
        combine(&[
            (-25.0, 0.0),
            (48.0, 1.0),
            (-36.0, 2.0),
            (16.0, 3.0),
            (-3.0, 4.0),
        ])
    } else {
        combine(&[
            (25.0, 0.0),
            (-48.0, -1.0),
            (36.0, -2.0),
            (-16.0, -3.0),
            (3.0, -4.0),
        ])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exp_history(h: f64) -> HistoryTrajectory {
        // x(t) = e^{-t} on [-1, 0] with exact derivatives.
        HistoryTrajectory::from_initial_fn(
            0.0,
            1.0,
            h,
            &|s| vec![(-s).exp()],
            &|s| vec![-(-s).exp()],
        )
        .unwrap()
    }

    #[test]
    fn constant_history_interpolates_to_constant() {
        let hist = HistoryTrajectory::from_initial_fn(
            0.0,
            1.0,
            0.1,
            &|_| vec![1.0, 2.0],
            &|_| vec![0.0, 0.0],
        )
        .unwrap();
        for &s in &[-1.0, -0.73, -0.5, -0.111, 0.0] {
            let v = hist.interpolate(s).unwrap();
            assert_eq!(v.as_slice(), &[1.0, 2.0]);
        }
    }

    #[test]
    fn exact_at_grid_points() {
        let hist = exp_history(0.01);
        let knots: Vec<f64> = hist.knots().to_vec();
        for (i, &t) in knots.iter().enumerate() {
            let v = hist.interpolate(t).unwrap();
            assert_eq!(v.as_slice(), hist.states()[i].as_slice());
        }
    }

    #[test]
    fn exponential_mid_step_within_1e8() {
        let hist = exp_history(0.01);
        for k in 0..100 {
            let s = -1.0 + (k as f64 + 0.5) * 0.01;
            let v = hist.interpolate(s).unwrap();
            assert!(
                (v[0] - (-s).exp()).abs() < 1e-8,
                "at {s}: {} vs {}",
                v[0],
                (-s).exp()
            );
        }
    }

    #[test]
    fn out_of_span_query_names_span() {
        let hist = exp_history(0.01);
        match hist.interpolate(0.5) {
            Err(Error::OutOfSpan { t, lo, hi }) => {
                assert_eq!(t, 0.5);
                assert_eq!(lo, -1.0);
                assert_eq!(hi, 0.0);
            }
            other => panic!("expected OutOfSpan, got {other:?}"),
        }
    }

    #[test]
    fn append_then_interpolate_is_exact() {
        let mut hist = exp_history(0.1);
        let x = StateVec::new(vec![0.7]).unwrap();
        let d = StateVec::new(vec![-0.7]).unwrap();
        hist.append_segment(0.1, x.clone(), StateVec::new(vec![-1.0]).unwrap(), d)
            .unwrap();
        assert_eq!(hist.interpolate(0.1).unwrap().as_slice(), x.as_slice());
    }

    #[test]
    fn step_must_divide_span() {
        assert!(check_divides(1.0, 0.005).is_ok());
        assert!(check_divides(1.0, 0.3).is_err());
    }

    #[test]
    fn fd_derivative_fourth_order() {
        let phi = |s: f64| vec![(2.0 * s).sin() + 1.0];
        for &s in &[-1.0, -0.77, -0.4, 0.0] {
            let d = fd_derivative(&phi, s, 1.0);
            assert!(
                (d[0] - 2.0 * (2.0 * s).cos()).abs() < 1e-9,
                "at {s}: {}",
                d[0]
            );
        }
    }
}
