//! Numerical oracle for the delay inequality
//! `D+ g(t) <= gamma1 g(t0) + gamma2 ||g_t||_r`.
//!
//! The inequality itself gives no integration procedure; the oracle
//! integrates the saturated dynamics `g' = gamma1 g(t0) + gamma2 sup g`,
//! which dominates every solution of the inequality, so bounding the
//! extremal tabulation bounds the whole family. The window supremum is
//! maintained by a monotone deque, exact on the tabulation grid.

use crate::error::{Error, Result};
use serde::Serialize;
use std::collections::VecDeque;

#[derive(Debug, Clone)]
pub struct HalanayProblem {
    pub gamma1: f64,
    pub gamma2: f64,
    /// Delay window length.
    pub r: f64,
    /// Integration horizon beyond `t0`.
    pub horizon: f64,
    pub t0: f64,
    /// Nonnegative history tabulated uniformly on `[t0 - r, t0]`.
    g0: Vec<f64>,
}

impl HalanayProblem {
    pub fn new(gamma1: f64, gamma2: f64, r: f64, horizon: f64, t0: f64, g0: Vec<f64>) -> Result<Self> {
        if !(gamma1 > 0.0 && gamma2 > 0.0 && r > 0.0 && horizon > 0.0) {
            return Err(Error::Config(format!(
                "halanay problem needs gamma1, gamma2, r, horizon > 0; got {gamma1}, {gamma2}, {r}, {horizon}"
            )));
        }
        if g0.len() < 2 {
            return Err(Error::Config("history needs at least two samples".into()));
        }
        if g0.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Config("history must be finite and nonnegative".into()));
        }
        Ok(Self {
            gamma1,
            gamma2,
            r,
            horizon,
            t0,
            g0,
        })
    }

    /// Linear interpolation of the history at `t in [t0 - r, t0]`.
    pub fn g0_at(&self, t: f64) -> f64 {
        let pos = ((t - (self.t0 - self.r)) / self.r).clamp(0.0, 1.0) * (self.g0.len() - 1) as f64;
        let idx = pos.floor() as usize;
        if idx + 1 >= self.g0.len() {
            return *self.g0.last().unwrap();
        }
        let frac = pos - idx as f64;
        self.g0[idx] * (1.0 - frac) + self.g0[idx + 1] * frac
    }

    /// `||g_{t0}||_r`, the sup of the history.
    pub fn g0_sup(&self) -> f64 {
        self.g0.iter().copied().fold(0.0, f64::max)
    }

    /// `g(t0)`.
    pub fn g0_end(&self) -> f64 {
        *self.g0.last().unwrap()
    }

    /// Exponential envelope of the lemma: `||g_{t0}||_r e^{lambda (t - t0)}`
    /// with `lambda = gamma1 + gamma2`.
    pub fn bound(&self, t: f64) -> f64 {
        self.g0_sup() * ((self.gamma1 + self.gamma2) * (t - self.t0)).exp()
    }
}

/// Sliding-window maximum over the last `window + 1` pushed samples.
struct MonotoneMax {
    // (index, value), values non-increasing front to back.
    deque: VecDeque<(usize, f64)>,
    window: usize,
}

impl MonotoneMax {
    fn new(window: usize) -> Self {
        Self {
            deque: VecDeque::new(),
            window,
        }
    }

    fn push(&mut self, idx: usize, value: f64) {
        while let Some(&(_, back)) = self.deque.back() {
            if back <= value {
                self.deque.pop_back();
            } else {
                break;
            }
        }
        self.deque.push_back((idx, value));
        let oldest = idx.saturating_sub(self.window);
        while let Some(&(front_idx, _)) = self.deque.front() {
            if front_idx < oldest {
                self.deque.pop_front();
            } else {
                break;
            }
        }
    }

    fn max(&self) -> f64 {
        self.deque.front().map(|&(_, v)| v).unwrap_or(0.0)
    }
}

/// Solution tabulated on the uniform grid `t0 + j h`.
#[derive(Debug, Clone, Serialize)]
pub struct TabulatedSolution {
    pub t0: f64,
    pub h: f64,
    pub values: Vec<f64>,
}

impl TabulatedSolution {
    pub fn time(&self, j: usize) -> f64 {
        self.t0 + j as f64 * self.h
    }

    pub fn at_end(&self) -> f64 {
        *self.values.last().unwrap()
    }

    /// Linear interpolation inside the tabulated span.
    pub fn at(&self, t: f64) -> f64 {
        let pos = ((t - self.t0) / self.h)
            .clamp(0.0, (self.values.len() - 1) as f64);
        let idx = pos.floor() as usize;
        if idx + 1 >= self.values.len() {
            return *self.values.last().unwrap();
        }
        let frac = pos - idx as f64;
        self.values[idx] * (1.0 - frac) + self.values[idx + 1] * frac
    }
}

/// Integrate the saturated dynamics (the worst case the inequality permits)
/// by forward Euler with a trapezoidal refinement pass per step.
pub fn extremal_solution(p: &HalanayProblem, h: f64) -> Result<TabulatedSolution> {
    damped_solution(p, h, &|_| 0.0)
}

/// Saturated dynamics minus a nonnegative damping term; any such tabulation
/// still satisfies the differential inequality, and stays below the
/// extremal one.
pub fn damped_solution(
    p: &HalanayProblem,
    h: f64,
    damping: &dyn Fn(f64) -> f64,
) -> Result<TabulatedSolution> {
    if !(h > 0.0 && h <= p.r / 100.0) {
        return Err(Error::Config(format!(
            "tabulation step must satisfy 0 < h <= r/100 = {}, got {h}",
            p.r / 100.0
        )));
    }
    let window = (p.r / h).floor().max(1.0) as usize;
    let steps = (p.horizon / h).ceil() as usize;

    // Resample the history onto the integration grid so the deque sees one
    // uniform series: indices 0..=window are history, then the solution.
    let mut series: Vec<f64> = (0..=window)
        .map(|i| p.g0_at(p.t0 - (window - i) as f64 * h))
        .collect();
    let mut deque = MonotoneMax::new(window);
    for (i, &v) in series.iter().enumerate() {
        deque.push(i, v);
    }

    let g_start = p.g0_end();
    let slope = |sup: f64| p.gamma1 * g_start + p.gamma2 * sup;

    let mut values = Vec::with_capacity(steps + 1);
    values.push(g_start);
    let mut g = g_start;
    for j in 0..steps {
        let t = p.t0 + j as f64 * h;
        let sup_now = deque.max().max(g);
        let s1 = slope(sup_now) - damping(t);
        let predictor = (g + h * s1).max(0.0);
        let sup_next = sup_now.max(predictor);
        let s2 = slope(sup_next) - damping(t + h);
        g = (g + 0.5 * h * (s1 + s2)).max(0.0);
        if !g.is_finite() {
            return Err(Error::Blowup { t: t + h });
        }
        series.push(g);
        deque.push(series.len() - 1, g);
        values.push(g);
    }
    Ok(TabulatedSolution {
        t0: p.t0,
        h,
        values,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Lemma2Report {
    pub checked: usize,
    pub violations: usize,
    /// Smallest `bound - g` over the tabulation (the tightest point).
    pub worst_slack: f64,
    pub worst_t: f64,
    pub tol_rel: f64,
}

impl Lemma2Report {
    pub fn pass(&self) -> bool {
        self.violations == 0
    }
}

/// Assert `g(t) <= ||g_{t0}||_r e^{lambda (t - t0)}` at every tabulation
/// point, within relative tolerance.
pub fn check_lemma2(p: &HalanayProblem, g: &TabulatedSolution, tol_rel: f64) -> Lemma2Report {
    let mut violations = 0;
    let mut worst_slack = f64::INFINITY;
    let mut worst_t = p.t0;
    for (j, &v) in g.values.iter().enumerate() {
        let t = g.time(j);
        let bound = p.bound(t);
        let slack = bound - v;
        if v > bound * (1.0 + tol_rel) + 1e-12 {
            violations += 1;
        }
        if slack < worst_slack {
            worst_slack = slack;
            worst_t = t;
        }
    }
    Lemma2Report {
        checked: g.values.len(),
        violations,
        worst_slack,
        worst_t,
        tol_rel,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_problem() -> HalanayProblem {
        HalanayProblem::new(1.0, 1.0, 1.0, 1.0, 0.0, vec![1.0; 101]).unwrap()
    }

    #[test]
    fn closed_form_case() {
        // gamma1 = gamma2 = 1, g0 = 1: g' = 1 + g, so g(t) = 2 e^t - 1.
        let p = unit_problem();
        let sol = extremal_solution(&p, 2e-4).unwrap();
        let expect = 2.0 * 1.0_f64.exp() - 1.0;
        let err = (sol.at_end() - expect).abs();
        assert!(err < 1e-6, "g(1) err = {err:.2e}");
        let rep = check_lemma2(&p, &sol, 1e-6);
        assert!(rep.pass());
        // Slack at t = 1 approaches e^2 - (2e - 1).
        let slack_end = p.bound(1.0) - sol.at_end();
        let expect_slack = 2.0_f64.exp() - expect;
        assert!((slack_end - expect_slack).abs() < 1e-4, "slack = {slack_end}");
    }

    #[test]
    fn tiny_gamma2_matches_linear_growth() {
        // With gamma2 -> 0 the dynamics reduce to g' = gamma1 g(t0).
        let p = HalanayProblem::new(1.0, 1e-6, 1.0, 1.0, 0.0, vec![1.0; 101]).unwrap();
        let sol = extremal_solution(&p, 1e-3).unwrap();
        for j in (0..sol.values.len()).step_by(100) {
            let t = sol.time(j);
            assert!((sol.values[j] - (1.0 + t)).abs() < 1e-3, "at {t}");
        }
    }

    #[test]
    fn zero_history_stays_zero() {
        let p = HalanayProblem::new(1.0, 1.0, 1.0, 1.0, 0.0, vec![0.0; 101]).unwrap();
        let sol = extremal_solution(&p, 1e-3).unwrap();
        assert!(sol.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn positivity_preconditions() {
        assert!(HalanayProblem::new(0.0, 1.0, 1.0, 1.0, 0.0, vec![1.0; 101]).is_err());
        assert!(HalanayProblem::new(1e-9, 1.0, 1.0, 1.0, 0.0, vec![1.0; 101]).is_ok());
        assert!(HalanayProblem::new(1.0, 1.0, 1.0, 1.0, 0.0, vec![1.0, -0.1]).is_err());
    }

    #[test]
    fn constant_solution_satisfies_bound_with_growing_slack() {
        let p = unit_problem();
        let n = 1001;
        let g = TabulatedSolution {
            t0: 0.0,
            h: 1.0 / (n - 1) as f64,
            values: vec![1.0; n],
        };
        let rep = check_lemma2(&p, &g, 1e-9);
        assert!(rep.pass());
        assert!(p.bound(1.0) - 1.0 > p.bound(0.5) - 1.0);
    }

    #[test]
    fn damped_solution_below_extremal() {
        let p = unit_problem();
        let ext = extremal_solution(&p, 1e-3).unwrap();
        let damp = damped_solution(&p, 1e-3, &|t| 0.5 + 0.5 * t).unwrap();
        for (a, b) in damp.values.iter().zip(&ext.values) {
            assert!(a <= b);
        }
        assert!(check_lemma2(&p, &damp, 1e-6).pass());
    }

    #[test]
    fn step_guard() {
        let p = unit_problem();
        assert!(extremal_solution(&p, 0.05).is_err());
    }

    #[test]
    fn window_max_matches_naive() {
        let vals = [3.0, 1.0, 4.0, 1.0, 5.0, 9.0, 2.0, 6.0, 5.0, 3.0, 5.0];
        let w = 3;
        let mut deque = MonotoneMax::new(w);
        for (i, &v) in vals.iter().enumerate() {
            deque.push(i, v);
            let lo = i.saturating_sub(w);
            let naive = vals[lo..=i].iter().copied().fold(f64::MIN, f64::max);
            assert_eq!(deque.max(), naive, "at {i}");
        }
    }
}
