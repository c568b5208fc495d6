//! Proof-level constants, state-norm envelopes, stability radii, and the
//! minimum inter-event-time root.

use crate::error::{Error, Result};
use crate::integrator::SimulationResult;
use crate::kfun::KFunction;
use crate::lyapunov::LyapunovCertificate;
use crate::model::{FnSegment, SystemModel};
use crate::trigger::TriggerConfig;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Relative tolerance deciding whether `b` equals `mu - sigma` (the branch
/// where the decay-rate minimum degenerates and a strictly smaller rate must
/// be picked). Exact float equality would be meaningless here.
const BRANCH_EQ_TOL: f64 = 1e-9;

/// Safety inflation applied to sampled Lipschitz maxima.
pub const LIPSCHITZ_INFLATION: f64 = 1.25;

/// Policy for the auxiliary rate used when `b = mu - sigma`.
#[derive(Debug, Clone, Copy, Serialize)]
pub enum XiPolicy {
    /// `xi = b / 2`, the neutral default.
    HalfB,
    Fixed(f64),
}

impl Default for XiPolicy {
    fn default() -> Self {
        XiPolicy::HalfB
    }
}

/// All constants appearing in the stability and Zeno arguments.
#[derive(Debug, Clone, Serialize)]
pub struct BoundConstants {
    pub eta: f64,
    /// Set only on the `b = mu - sigma` branch.
    pub xi: Option<f64>,
    pub mbar: f64,
    pub m: f64,
    /// Config-supplied gain in `mbar = a L / |mu - sigma - b|`.
    pub l: f64,
    pub l1: f64,
    pub l2: f64,
    pub l3: f64,
    /// Growth rate `l2 + l3` of the per-interval state bound.
    pub lambda: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    /// Compact-set radius `alpha1^{-1}(M)`.
    pub r: f64,
    pub phi0_norm: f64,
    pub phi_tau_norm: f64,
}

/// Decay rate of the attractivity envelope.
///
/// `eta = min(b, mu - sigma)` when the two differ; otherwise a strictly
/// smaller positive `xi` is used. Returns `(eta, xi_if_taken)`.
pub fn compute_eta(mu: f64, sigma: f64, b: f64, policy: XiPolicy) -> Result<(f64, Option<f64>)> {
    if !(mu > sigma && sigma >= 0.0) {
        return Err(Error::Certification(format!(
            "theorem hypotheses need 0 <= sigma < mu, got sigma = {sigma}, mu = {mu}"
        )));
    }
    if !(b > 0.0) {
        return Err(Error::Certification(format!("need b > 0, got {b}")));
    }
    let gap = mu - sigma;
    if (b - gap).abs() <= BRANCH_EQ_TOL * gap.max(b) {
        let xi = match policy {
            XiPolicy::HalfB => 0.5 * b,
            XiPolicy::Fixed(v) => v,
        };
        if !(xi > 0.0 && xi < b) {
            return Err(Error::Config(format!(
                "xi must lie in (0, b) = (0, {b}), got {xi}"
            )));
        }
        Ok((xi, Some(xi)))
    } else {
        Ok((b.min(gap), None))
    }
}

/// `mbar = a L / |mu - sigma - b|` (with the `xi` divisor on the equality
/// branch), `M = alpha2(||phi(0)||) + alpha3(||phi||_tau) + mbar`, and the
/// compact-set radius `R = alpha1^{-1}(M)`.
#[allow(clippy::too_many_arguments)]
pub fn compute_mbar_m(
    a: f64,
    l: f64,
    mu: f64,
    sigma: f64,
    b: f64,
    xi: Option<f64>,
    alpha1: &KFunction,
    alpha2: &KFunction,
    alpha3: &KFunction,
    phi0_norm: f64,
    phi_tau_norm: f64,
) -> Result<(f64, f64, f64)> {
    if !(a > 0.0 && l > 0.0) {
        return Err(Error::Certification(format!(
            "mbar needs a > 0 and L > 0, got a = {a}, L = {l}"
        )));
    }
    let divisor = match xi {
        Some(xi) => (mu - sigma - xi).abs(),
        None => (mu - sigma - b).abs(),
    };
    if divisor < 1e-300 {
        return Err(Error::Inconsistent(
            "zero divisor in mbar: b = mu - sigma without a xi branch".into(),
        ));
    }
    let mbar = a * l / divisor;
    let m = alpha2.eval(phi0_norm)? + alpha3.eval(phi_tau_norm)? + mbar;
    let r = alpha1.invert(m)?;
    Ok((mbar, m, r))
}

/// Decaying envelope `alpha1^{-1}(M e^{-eta (t - t0)})`.
pub fn attractivity_envelope(m: f64, eta: f64, alpha1: &KFunction, dt: f64) -> Result<f64> {
    alpha1.invert(m * (-eta * dt).exp())
}

/// Growing envelope `||phi||_tau e^{lambda (t - t0)}`.
pub fn growth_envelope(phi_tau_norm: f64, lambda: f64, dt: f64) -> f64 {
    if phi_tau_norm == 0.0 {
        return 0.0;
    }
    phi_tau_norm * (lambda * dt).exp()
}

/// Pointwise minimum of the two envelopes.
pub fn combined_envelope(consts: &BoundConstants, alpha1: &KFunction, dt: f64) -> Result<f64> {
    let grow = growth_envelope(consts.phi_tau_norm, consts.lambda, dt);
    let decay = attractivity_envelope(consts.m, consts.eta, alpha1, dt)?;
    Ok(grow.min(decay))
}

#[derive(Debug, Clone, Serialize)]
pub struct EnvelopeReport {
    pub sound: bool,
    pub checked: usize,
    /// Largest `||x|| / envelope` ratio observed.
    pub worst_ratio: f64,
    pub worst_t: f64,
}

/// Verify `||x(t)|| <= min(growth, attractivity)` at every step record.
pub fn envelope_check(
    result: &SimulationResult,
    consts: &BoundConstants,
    alpha1: &KFunction,
) -> Result<EnvelopeReport> {
    let mut worst_ratio: f64 = 0.0;
    let mut worst_t = result.t0;
    let mut sound = true;
    for rec in &result.records {
        let env = combined_envelope(consts, alpha1, rec.t - result.t0)?;
        let norm = rec.x.norm();
        let ratio = if env > 0.0 {
            norm / env
        } else if norm == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        if ratio > worst_ratio {
            worst_ratio = ratio;
            worst_t = rec.t;
        }
        if norm > env * (1.0 + 1e-9) + 1e-12 {
            sound = false;
        }
    }
    Ok(EnvelopeReport {
        sound,
        checked: result.records.len(),
        worst_ratio,
        worst_t,
    })
}

/// Sampled Lipschitz estimates with the quantiles of the observed ratios.
#[derive(Debug, Clone, Serialize)]
pub struct LipschitzEstimate {
    /// Inflated sample maxima (the certified values).
    pub l2: f64,
    pub l3: f64,
    pub l2_raw: f64,
    pub l3_raw: f64,
    pub l2_p50: f64,
    pub l2_p95: f64,
    pub l3_p50: f64,
    pub l3_p95: f64,
    pub samples: usize,
}

struct SmoothFn {
    // Per dimension: constant, linear slope, sine amplitude, phase.
    coeffs: Vec<[f64; 4]>,
    tau: f64,
}

impl SmoothFn {
    fn sample(rng: &mut ChaCha8Rng, dim: usize, tau: f64, constant: bool) -> Self {
        let coeffs = (0..dim)
            .map(|_| {
                if constant {
                    [rng.random_range(-1.0..1.0), 0.0, 0.0, 0.0]
                } else {
                    [
                        rng.random_range(-1.0..1.0),
                        rng.random_range(-1.0..1.0),
                        rng.random_range(-1.0..1.0),
                        rng.random_range(0.0..std::f64::consts::TAU),
                    ]
                }
            })
            .collect();
        Self { coeffs, tau }
    }

    fn at(&self, s: f64) -> Vec<f64> {
        let q = s / self.tau;
        self.coeffs
            .iter()
            .map(|c| c[0] + c[1] * q + c[2] * (std::f64::consts::PI * q + c[3]).sin())
            .collect()
    }

    fn scaled(&self, factor: f64) -> impl Fn(f64) -> Vec<f64> + '_ {
        move |s| self.at(s).iter().map(|v| v * factor).collect()
    }

    /// Sup norm over the probe grid.
    fn sup_norm(&self) -> f64 {
        probe_sup(|s| self.at(s), self.tau)
    }
}

const PROBES: usize = 32;

fn probe_sup(f: impl Fn(f64) -> Vec<f64>, tau: f64) -> f64 {
    let mut sup: f64 = 0.0;
    for i in 0..=PROBES {
        let s = -tau * i as f64 / PROBES as f64;
        let v = f(s);
        sup = sup.max(v.iter().map(|x| x * x).sum::<f64>().sqrt());
    }
    sup
}

fn probe_sup_dist(
    f1: impl Fn(f64) -> Vec<f64>,
    f2: impl Fn(f64) -> Vec<f64>,
    tau: f64,
) -> f64 {
    let mut sup: f64 = 0.0;
    for i in 0..=PROBES {
        let s = -tau * i as f64 / PROBES as f64;
        let (a, b) = (f1(s), f2(s));
        let d = a
            .iter()
            .zip(&b)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt();
        sup = sup.max(d);
    }
    sup
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return 0.0;
    }
    let idx = ((sorted.len() - 1) as f64 * q).round() as usize;
    sorted[idx]
}

fn random_in_ball(rng: &mut ChaCha8Rng, dim: usize, radius: f64, boundary: bool) -> Vec<f64> {
    let dir: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
    let n = dir.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-12);
    let rho = if boundary {
        radius
    } else {
        radius * rng.random_range(0.0..1.0)
    };
    dir.iter().map(|v| v / n * rho).collect()
}

/// Sample finite-difference ratios of the right-hand side over the radius-R
/// ball to estimate the Lipschitz constants `L2` (history argument, input
/// fixed) and `L3` (feedback composite). The returned `l2`/`l3` carry the
/// 1.25 safety inflation; quantiles describe the raw ratio distribution.
///
/// Estimate quality is the caller's risk; `samples >= 10_000` is enforced.
pub fn estimate_lipschitz(
    model: &SystemModel,
    r_ball: f64,
    samples: usize,
    seed: u64,
) -> Result<LipschitzEstimate> {
    if samples < 10_000 {
        return Err(Error::Config(format!(
            "lipschitz sampling needs samples >= 10000, got {samples}"
        )));
    }
    if !(r_ball > 0.0) {
        return Err(Error::Config(format!("ball radius must be > 0, got {r_ball}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = model.dim_state();
    let tau = model.tau();
    let mut l2_ratios = Vec::with_capacity(samples);
    let mut l3_ratios = Vec::with_capacity(samples);

    for i in 0..samples {
        let t = rng.random_range(0.0..100.0);
        let u_probe = model.feedback(&random_in_ball(&mut rng, dim, r_ball, false));

        // --- L2: vary the history argument, input fixed.
        let base = SmoothFn::sample(&mut rng, dim, tau, false);
        let base_sup = base.sup_norm().max(1e-9);
        let boundary = i % 3 == 0;
        if i % 2 == 0 {
            // Local directional probe.
            let delta = r_ball * 10f64.powf(rng.random_range(-5.0..-1.0));
            let rho = if boundary {
                (r_ball - delta).max(0.0)
            } else {
                rng.random_range(0.0..1.0) * (r_ball - delta).max(0.0)
            };
            let constant_dir = rng.random_bool(0.5);
            let dir = SmoothFn::sample(&mut rng, dim, tau, constant_dir);
            let dir_sup = dir.sup_norm().max(1e-9);
            let s1 = rho / base_sup;
            let phi1 = base.scaled(s1);
            let phi2 = |s: f64| {
                let a = base.at(s);
                let d = dir.at(s);
                a.iter()
                    .zip(&d)
                    .map(|(x, y)| x * s1 + y * delta / dir_sup)
                    .collect::<Vec<f64>>()
            };
            let den = probe_sup_dist(&phi1, &phi2, tau);
            if den > 1e-12 {
                let seg1 = FnSegment::new(&phi1, tau, dim);
                let seg2 = FnSegment::new(&phi2, tau, dim);
                let f1 = model.rhs(t, &seg1, &u_probe)?;
                let f2 = model.rhs(t, &seg2, &u_probe)?;
                l2_ratios.push(f1.dist(&f2) / den);
            }
        } else {
            // Independent pair.
            let other = SmoothFn::sample(&mut rng, dim, tau, false);
            let s1 = rng.random_range(0.0..1.0) * r_ball / base_sup;
            let s2 = rng.random_range(0.0..1.0) * r_ball / other.sup_norm().max(1e-9);
            let phi1 = base.scaled(s1);
            let phi2 = other.scaled(s2);
            let den = probe_sup_dist(&phi1, &phi2, tau);
            if den > 1e-12 {
                let seg1 = FnSegment::new(&phi1, tau, dim);
                let seg2 = FnSegment::new(&phi2, tau, dim);
                let f1 = model.rhs(t, &seg1, &u_probe)?;
                let f2 = model.rhs(t, &seg2, &u_probe)?;
                l2_ratios.push(f1.dist(&f2) / den);
            }
        }

        // --- L3: vary the sampled state through the feedback, history fixed.
        let hold = SmoothFn::sample(&mut rng, dim, tau, false);
        let hold_scale = rng.random_range(0.0..1.0) * r_ball / hold.sup_norm().max(1e-9);
        let phi = hold.scaled(hold_scale);
        let seg = FnSegment::new(&phi, tau, dim);
        let xa = random_in_ball(&mut rng, dim, r_ball, boundary);
        let xb = if i % 2 == 0 {
            let delta = r_ball * 10f64.powf(rng.random_range(-5.0..-1.0));
            let dir = random_in_ball(&mut rng, dim, 1.0, true);
            let mut v: Vec<f64> = xa.iter().zip(&dir).map(|(x, d)| x + d * delta).collect();
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if n > r_ball {
                for x in &mut v {
                    *x *= r_ball / n;
                }
            }
            v
        } else {
            random_in_ball(&mut rng, dim, r_ball, false)
        };
        let den = xa
            .iter()
            .zip(&xb)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt();
        if den > 1e-12 {
            let fa = model.rhs(t, &seg, &model.feedback(&xa))?;
            let fb = model.rhs(t, &seg, &model.feedback(&xb))?;
            l3_ratios.push(fa.dist(&fb) / den);
        }
    }

    l2_ratios.sort_by(f64::total_cmp);
    l3_ratios.sort_by(f64::total_cmp);
    let l2_raw = l2_ratios.last().copied().unwrap_or(0.0);
    let l3_raw = l3_ratios.last().copied().unwrap_or(0.0);
    Ok(LipschitzEstimate {
        l2: l2_raw * LIPSCHITZ_INFLATION,
        l3: l3_raw * LIPSCHITZ_INFLATION,
        l2_raw,
        l3_raw,
        l2_p50: quantile(&l2_ratios, 0.5),
        l2_p95: quantile(&l2_ratios, 0.95),
        l3_p50: quantile(&l3_ratios, 0.5),
        l3_p95: quantile(&l3_ratios, 0.95),
        samples,
    })
}

/// How the Lipschitz data for certification is obtained.
#[derive(Debug, Clone, Default)]
pub struct LipschitzSpec {
    /// Override for the inverse-alpha1 constant; computed from the envelope
    /// floor when absent.
    pub l1: Option<f64>,
    pub l2: Option<f64>,
    pub l3: Option<f64>,
    /// Sample count when l2/l3 are not supplied.
    pub samples: usize,
}

impl LipschitzSpec {
    pub fn sampled(samples: usize) -> Self {
        Self {
            samples,
            ..Default::default()
        }
    }

    pub fn supplied(l2: f64, l3: f64) -> Self {
        Self {
            l2: Some(l2),
            l3: Some(l3),
            samples: 0,
            l1: None,
        }
    }
}

/// Assemble every certification constant for a run of `model` under `trig`
/// and `cert`, over the horizon of `cfg`.
///
/// `l1` (when not overridden) is the Lipschitz constant of `alpha1^{-1}` on
/// `[m, M]` with the floor `m = M e^{-eta (t_end - t0)}` — the smallest
/// envelope value reached over the certification horizon.
pub fn compute_bound_constants(
    model: &SystemModel,
    trig: &TriggerConfig,
    cert: &LyapunovCertificate,
    horizon: f64,
    gain_l: f64,
    lip: &LipschitzSpec,
    xi_policy: XiPolicy,
    seed: u64,
) -> Result<(BoundConstants, Option<LipschitzEstimate>)> {
    let (eta, xi) = compute_eta(cert.mu, trig.sigma, trig.b, xi_policy)?;
    let (phi0_norm, phi_tau_norm) = model.initial_norms();
    let (mbar, m, r) = compute_mbar_m(
        trig.a,
        gain_l,
        cert.mu,
        trig.sigma,
        trig.b,
        xi,
        &cert.alpha1,
        &cert.alpha2,
        &cert.alpha3,
        phi0_norm,
        phi_tau_norm,
    )?;
    let (l2, l3, estimate) = match (lip.l2, lip.l3) {
        (Some(l2), Some(l3)) => (l2, l3, None),
        _ => {
            let est = estimate_lipschitz(model, r, lip.samples, seed)?;
            (
                lip.l2.unwrap_or(est.l2),
                lip.l3.unwrap_or(est.l3),
                Some(est),
            )
        }
    };
    let m_floor = m * (-eta * horizon).exp();
    let l1 = match lip.l1 {
        Some(v) => v,
        None => cert.alpha1.inverse_lipschitz_on(m_floor, m)?,
    };
    let lambda = l2 + l3;
    let lambda1 = l1 * l2 * m * (eta * model.tau()).exp() / eta;
    let lambda2 = l1 * l3 * m;
    Ok((
        BoundConstants {
            eta,
            xi,
            mbar,
            m,
            l: gain_l,
            l1,
            l2,
            l3,
            lambda,
            lambda1,
            lambda2,
            r,
            phi0_norm,
            phi_tau_norm,
        },
        estimate,
    ))
}

/// Stability radii and the envelope-crossing time.
#[derive(Debug, Clone, Serialize)]
pub struct StabilityRadii {
    pub delta1: f64,
    /// `alpha1^{-1}(2 mbar)`, the general form.
    pub delta2: f64,
    /// `alpha1^{-1}(2 L1 mbar)`, the explicit (Lipschitz-inverse) variant.
    pub delta2_bar: f64,
    pub delta3: f64,
    /// `min(delta1, delta2_bar, delta3)`.
    pub delta: f64,
    pub t_hat: f64,
    pub eps_target: f64,
    /// Lipschitz constant of `alpha1^{-1}` on the small-ball interval
    /// `[2 mbar e^{-eta horizon}, 2 mbar]` used in the explicit forms.
    pub l1_small: f64,
}

/// Compute the radii for a target bound `eps_target` on the state norm.
///
/// `delta1` comes from bisection on the increasing map
/// `s -> alpha2(s) + alpha3(s)`; the others are closed forms. `delta3` is
/// evaluated in log space and may underflow to zero for large
/// `lambda / eta` — that is the honest value of the formula.
pub fn stability_radii(
    consts: &BoundConstants,
    alpha1: &KFunction,
    alpha2: &KFunction,
    alpha3: &KFunction,
    eps_target: f64,
    horizon: f64,
    t0: f64,
) -> Result<StabilityRadii> {
    if !(eps_target > 0.0) {
        return Err(Error::Config(format!(
            "eps_target must be > 0, got {eps_target}"
        )));
    }
    let mbar = consts.mbar;

    // delta1 = inf { s >= 0 : alpha2(s) + alpha3(s) >= mbar }.
    let sum = |s: f64| -> Result<f64> { Ok(alpha2.eval(s)? + alpha3.eval(s)?) };
    let mut hi = 1.0;
    while sum(hi)? < mbar {
        hi *= 2.0;
        if hi > 1e300 {
            return Err(Error::Inconsistent(
                "alpha2 + alpha3 never reaches mbar".into(),
            ));
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sum(mid)? < mbar {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let delta1 = 0.5 * (lo + hi);

    let delta2 = alpha1.invert(2.0 * mbar)?;

    // Small-ball inverse-Lipschitz constant: admissible initial data keep
    // M below 2 mbar, and the envelope floor over the horizon bounds the
    // interval from below.
    let v_hi = 2.0 * mbar;
    let v_lo = v_hi * (-consts.eta * horizon).exp();
    let l1_small = alpha1.inverse_lipschitz_on(v_lo, v_hi)?;
    let delta2_bar = alpha1.invert(2.0 * l1_small * mbar)?;

    let ratio = consts.lambda / consts.eta;
    let ln_delta3 = (ratio + 1.0) * eps_target.ln() - ratio * (2.0 * l1_small * mbar).ln();
    let delta3 = ln_delta3.exp();

    let t_hat = if consts.phi_tau_norm > 0.0 {
        (2.0 * l1_small * mbar / consts.phi_tau_norm).ln() / (consts.lambda + consts.eta) + t0
    } else {
        f64::NAN
    };

    Ok(StabilityRadii {
        delta1,
        delta2,
        delta2_bar,
        delta3,
        delta: delta1.min(delta2_bar).min(delta3),
        t_hat,
        eps_target,
        l1_small,
    })
}

/// Root and diagnostics of the inter-event-time bound.
#[derive(Debug, Clone, Serialize)]
pub struct ZenoBound {
    pub tstar: f64,
    pub g_at_zero: f64,
    pub bracket_hi: f64,
}

/// Unique positive root of
/// `g(T) = a e^{-bT} e^{(eta - b)(tbar - t0)} - lambda1 (1 - e^{-eta T}) - lambda2 T`,
/// located by bracket expansion plus bisection to 1e-12.
pub fn zeno_tstar_root(
    a: f64,
    b: f64,
    eta: f64,
    lambda1: f64,
    lambda2: f64,
    t_bar_minus_t0: f64,
) -> Result<ZenoBound> {
    if !(a > 0.0) {
        return Err(Error::Certification(format!("zeno bound needs a > 0, got {a}")));
    }
    if !(lambda1 > 0.0 && lambda2 > 0.0) {
        return Err(Error::Certification(format!(
            "zeno bound needs lambda1, lambda2 > 0, got {lambda1}, {lambda2}"
        )));
    }
    if !(eta < b) {
        return Err(Error::Config(format!(
            "inter-event root applies on the b >= mu - sigma branch (eta < b), got eta = {eta}, b = {b}"
        )));
    }
    let scale = ((eta - b) * t_bar_minus_t0).exp();
    let g = |t: f64| a * (-b * t).exp() * scale - lambda1 * (1.0 - (-eta * t).exp()) - lambda2 * t;
    let g0 = g(0.0);
    if !(g0 > 0.0) {
        return Err(Error::Inconsistent(format!(
            "g(0) = {g0} must be positive for a > 0"
        )));
    }
    let mut hi = 1e-6;
    while g(hi) > 0.0 {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::Inconsistent("no sign change found for g".into()));
        }
    }
    let mut lo = 0.0;
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(ZenoBound {
        tstar: 0.5 * (lo + hi),
        g_at_zero: g0,
        bracket_hi: hi,
    })
}

/// Consts-based wrapper over [`zeno_tstar_root`].
pub fn zeno_bound_tstar(
    consts: &BoundConstants,
    a: f64,
    b: f64,
    t_bar_minus_t0: f64,
) -> Result<ZenoBound> {
    zeno_tstar_root(a, b, consts.eta, consts.lambda1, consts.lambda2, t_bar_minus_t0)
}
