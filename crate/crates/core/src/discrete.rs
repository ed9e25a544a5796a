//! Optimal brainstorming thresholds for the discrete-approach model.

use serde::{Deserialize, Serialize};

use crate::error::{check_nonneg, domain, Error, Result};
use crate::model::{
    beliefs, log_surv, nu_of, phi_general_parts, phi_parts, BeliefSnapshot, Difficulty,
    EffortState, ModelParams, RateDistribution,
};
use crate::numeric::{bisect, golden_max, newton_polish};
use crate::policy::{effort_profile, ThresholdPolicy};

/// An effort threshold that may be infinite (never move on).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Threshold {
    Finite(f64),
    Infinite,
}

impl Threshold {
    pub fn finite(self) -> Option<f64> {
        match self {
            Threshold::Finite(k) => Some(k),
            Threshold::Infinite => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Threshold::Finite(_))
    }
}

/// Solved thresholds `K_n` and the calendar times `n K_n` at which approach
/// `n + 1` is brainstormed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSequence {
    pub thresholds: Vec<f64>,
    pub brainstorm_times: Vec<f64>,
    /// Set when `K_n` is infinite for `n = n_bar`: at most `n_bar`
    /// approaches are ever brainstormed.
    pub n_bar: Option<usize>,
    /// Known-easy and known-hard thresholds.
    pub bracket: (Threshold, Threshold),
    /// Posterior-weighted first-order condition at each returned threshold.
    pub residuals: Vec<f64>,
}

impl ThresholdSequence {
    pub fn truncated(&self) -> bool {
        self.n_bar.is_some()
    }

    /// `K_n` (1-based); `None` if `n` was not solved.
    pub fn get(&self, n: usize) -> Option<Threshold> {
        if n == 0 {
            return None;
        }
        if let Some(&k) = self.thresholds.get(n - 1) {
            return Some(Threshold::Finite(k));
        }
        match self.n_bar {
            Some(nb) if n >= nb => Some(Threshold::Infinite),
            _ => None,
        }
    }

    /// Latest calendar time at which the optimal effort profile is determined.
    pub fn horizon(&self) -> f64 {
        if self.truncated() {
            return f64::INFINITY;
        }
        let m = self.thresholds.len();
        (m + 1) as f64 * self.thresholds[m - 1]
    }

    /// Per-approach validity belief and hard-state belief at each brainstorm.
    pub fn belief_thresholds(&self, p: &ModelParams) -> Vec<(f64, f64)> {
        self.thresholds
            .iter()
            .enumerate()
            .map(|(i, &k)| {
                let state = EffortState { efforts: vec![k; i + 1] };
                let b = beliefs(p, &state);
                (b.arm_beliefs[0], b.difficulty_belief)
            })
            .collect()
    }
}

struct KernelEval {
    log_s: f64,
    hazard: f64,
    phi: f64,
    dphi: f64,
}

trait Kernel: Sync {
    fn eval(&self, k: f64) -> KernelEval;
}

struct Baseline {
    nu0: f64,
    lambda: f64,
    r: f64,
    c: f64,
}

impl Kernel for Baseline {
    fn eval(&self, k: f64) -> KernelEval {
        let (phi, dphi) = phi_parts(self.nu0, self.lambda, self.r, self.c, k);
        KernelEval {
            log_s: log_surv(self.nu0, self.lambda, k),
            hazard: self.lambda * nu_of(self.nu0, self.lambda, k),
            phi,
            dphi,
        }
    }
}

struct General<'a> {
    dist: &'a RateDistribution,
    r: f64,
    c: f64,
}

impl Kernel for General<'_> {
    fn eval(&self, k: f64) -> KernelEval {
        let (phi, dphi) = phi_general_parts(self.dist, self.r, self.c, k);
        KernelEval { log_s: self.dist.survival(k).ln(), hazard: self.dist.hazard(k), phi, dphi }
    }
}

/// Posterior-weighted marginal value after `n` approaches reach effort `k`,
/// with its derivative.
fn foc(states: &[(f64, &dyn Kernel)], n: f64, k: f64) -> (f64, f64) {
    let evals: Vec<(f64, KernelEval)> = states
        .iter()
        .filter(|s| s.0 > 0.0)
        .map(|s| (s.0.ln(), s.1.eval(k)))
        .collect();
    let logw: Vec<f64> = evals.iter().map(|(lp, e)| lp + n * e.log_s).collect();
    let mx = logw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = logw.iter().map(|l| (l - mx).exp()).collect();
    let sw: f64 = w.iter().sum();
    let mean_h: f64 = w.iter().zip(&evals).map(|(w, e)| w * e.1.hazard).sum::<f64>() / sw;
    let mut val = 0.0;
    let mut der = 0.0;
    for (wi, (_, e)) in w.iter().zip(&evals) {
        let pi = wi / sw;
        val += pi * e.phi;
        der += pi * (e.dphi - n * (e.hazard - mean_h) * e.phi);
    }
    (val, der)
}

/// First sign change of a function that is positive at zero. `None` when the
/// function stays nonnegative on `[0, 2^40]`.
fn first_root<F>(g: F, hint: Option<f64>) -> Result<Option<f64>>
where
    F: Fn(f64) -> (f64, f64),
{
    let g0 = g(0.0).0;
    if !(g0 > 0.0) {
        return Err(Error::Solver(format!("first-order condition not positive at zero: {g0}")));
    }
    let mut bracket = None;
    if let Some(h) = hint {
        if h.is_finite() && g(h).0 < 0.0 {
            bracket = Some((0.0, h));
        }
    }
    if bracket.is_none() {
        let mut prev = 0.0;
        let mut best = (f64::INFINITY, 0.0, 0.0);
        let mut k = 2f64.powi(-20);
        while k <= 2f64.powi(40) {
            let v = g(k).0;
            if v < 0.0 {
                bracket = Some((prev, k));
                break;
            }
            if v < best.0 {
                best = (v, prev, k);
            }
            prev = k;
            k *= 2f64.powf(0.25);
        }
        if bracket.is_none() {
            let hi = best.2 * 2f64.powf(0.25);
            let (kmin, neg_val) = golden_max(|k| -g(k).0, best.1, hi, 1e-12 * hi);
            if -neg_val < -1e-14 {
                bracket = Some((best.1, kmin));
            }
        }
    }
    let Some((lo, hi)) = bracket else {
        return Ok(None);
    };
    let k = bisect(|k| g(k).0, lo, hi, 0.0)?;
    Ok(Some(newton_polish(&g, k, lo, hi, 3)))
}

fn single_state_threshold(kernel: &dyn Kernel) -> Result<Threshold> {
    let root = first_root(|k| {
        let e = kernel.eval(k);
        (e.phi, e.dphi)
    }, None)?;
    Ok(root.map_or(Threshold::Infinite, Threshold::Finite))
}

/// Solve `K_n` for `n = 1, 2, ...` until `stop(n, K_n)` holds, `n_max` is
/// reached, or no root exists.
fn solve_sequence<S>(
    states: &[(f64, &dyn Kernel)],
    n_max: usize,
    bracket: (Threshold, Threshold),
    allow_truncation: bool,
    stop: S,
) -> Result<ThresholdSequence>
where
    S: Fn(usize, f64) -> bool,
{
    let mut thresholds = Vec::new();
    let mut residuals = Vec::new();
    let mut n_bar = None;
    let hint = bracket.1.finite().map(|k| k * (1.0 + 1e-6));
    for n in 1..=n_max {
        let nf = n as f64;
        match first_root(|k| foc(states, nf, k), hint)? {
            Some(k) => {
                thresholds.push(k);
                residuals.push(foc(states, nf, k).0);
                if stop(n, k) {
                    break;
                }
            }
            None if allow_truncation => {
                n_bar = Some(n);
                break;
            }
            None => {
                return Err(Error::Solver(format!("no threshold root found for n={n}")));
            }
        }
    }
    let brainstorm_times = thresholds.iter().enumerate().map(|(i, &k)| (i + 1) as f64 * k).collect();
    Ok(ThresholdSequence { thresholds, brainstorm_times, n_bar, bracket, residuals })
}

fn baseline_kernels(p: &ModelParams) -> (Baseline, Baseline) {
    let mk = |l| Baseline { nu0: p.nu0(), lambda: l, r: p.r(), c: p.c() };
    (mk(p.lambda_e()), mk(p.lambda_h()))
}

/// Threshold of the known-difficulty problem in state `theta`.
pub fn known_threshold(p: &ModelParams, theta: Difficulty) -> Result<Threshold> {
    let (e, h) = baseline_kernels(p);
    single_state_threshold(match theta {
        Difficulty::Easy => &e,
        Difficulty::Hard => &h,
    })
}

/// Thresholds `K_1, ..., K_{n_max}` of the optimal policy under learning.
pub fn solve_learning_thresholds(p: &ModelParams, n_max: usize) -> Result<ThresholdSequence> {
    solve_learning_thresholds_until(p, n_max, |_, _| false)
}

/// As [`solve_learning_thresholds`], stopping early once `stop(n, K_n)` holds.
pub fn solve_learning_thresholds_until<S>(p: &ModelParams, n_max: usize, stop: S) -> Result<ThresholdSequence>
where
    S: Fn(usize, f64) -> bool,
{
    p.check_discrete_feasible()?;
    if n_max == 0 {
        return domain("n_max must be at least 1");
    }
    let (e, h) = baseline_kernels(p);
    let bracket = (single_state_threshold(&e)?, single_state_threshold(&h)?);
    let states: [(f64, &dyn Kernel); 2] = [(1.0 - p.delta0(), &e), (p.delta0(), &h)];
    solve_sequence(&states, n_max, bracket, p.lambda_h() == 0.0 && p.delta0() > 0.0, stop)
}

/// Thresholds when arrival rates are drawn from `g_e` (easy) or `g_h` (hard).
pub fn solve_general_thresholds(
    g_e: &RateDistribution,
    g_h: &RateDistribution,
    r: f64,
    c: f64,
    delta0: f64,
    n_max: usize,
) -> Result<ThresholdSequence> {
    if !(r > 0.0 && c > 0.0 && (0.0..=1.0).contains(&delta0)) {
        return domain("need r > 0, c > 0 and delta0 in [0,1]");
    }
    if n_max == 0 {
        return domain("n_max must be at least 1");
    }
    if !g_e.dominates(g_h) {
        return Err(Error::Precondition(
            "first-order stochastic dominance: the easy rate distribution must dominate the hard one".into(),
        ));
    }
    let bound = (1.0 - delta0) * g_e.discounted_success(r) + delta0 * g_h.discounted_success(r);
    if !(c < bound) {
        return Err(Error::Precondition(format!("cost bound: c={c} must be below {bound}")));
    }
    let e = General { dist: g_e, r, c };
    let h = General { dist: g_h, r, c };
    let bracket = (single_state_threshold(&e)?, single_state_threshold(&h)?);
    let patient = match bracket {
        (Threshold::Finite(a), Threshold::Finite(b)) => b > a,
        (Threshold::Finite(_), Threshold::Infinite) => true,
        _ => false,
    };
    if !patient && g_e != g_h {
        return Err(Error::Precondition(format!(
            "difficulty requires patience: known-hard threshold {:?} must exceed known-easy threshold {:?}",
            bracket.1, bracket.0
        )));
    }
    let states: [(f64, &dyn Kernel); 2] = [(1.0 - delta0, &e), (delta0, &h)];
    solve_sequence(&states, n_max, bracket, true, |_, _| false)
}

/// `A(K)` whose unique root is the known-difficulty threshold.
pub fn benchmark_residual(p: &ModelParams, k: f64) -> Result<f64> {
    let l = p.require_known()?;
    let (r, c, nu0) = (p.r(), p.c(), p.nu0());
    Ok(1.0 + c * (r + l) / (l * (1.0 - nu0))
        - l / (r + l) * (-r * k).exp()
        - (r / (r + l) - c * r / (nu0 * l)) * (l * k).exp())
}

/// Known-difficulty threshold `K*`.
pub fn solve_benchmark_threshold(p: &ModelParams) -> Result<f64> {
    let l = p.require_known()?;
    if l <= 0.0 {
        return domain("benchmark needs a positive arrival rate");
    }
    let (r, c, nu0) = (p.r(), p.c(), p.nu0());
    let bound = nu0 * l / (r + l);
    if !(c < bound) {
        return Err(Error::Feasibility(format!("cost {c} must be below {bound}")));
    }
    let a = |k: f64| benchmark_residual(p, k).expect("known difficulty");
    let mut hi = 1.0 / l;
    while a(hi) > 0.0 {
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::Solver("benchmark bracket expansion failed".into()));
        }
    }
    let k = bisect(a, 0.0, hi, 0.0)?;
    let coef = r / (r + l) - c * r / (nu0 * l);
    let da = |k: f64| r * l / (r + l) * (-r * k).exp() - l * coef * (l * k).exp();
    Ok(newton_polish(|k| (a(k), da(k)), k, 0.0, hi, 3))
}

/// Per-approach index value of working an approach until effort `tau`.
pub fn gittins_objective(p: &ModelParams, tau: f64) -> Result<f64> {
    let l = p.require_known()?;
    if !(tau > 0.0) {
        return domain(format!("tau must be positive, got {tau}"));
    }
    let (r, c, nu0) = (p.r(), p.c(), p.nu0());
    let num = -c * r + nu0 * r * l / (r + l) * -(-(r + l) * tau).exp_m1();
    let den = 1.0 - (-r * tau).exp() * (1.0 - nu0 + nu0 * (-l * tau).exp());
    Ok(num / den)
}

/// Beliefs at calendar time `t` along the optimal effort profile.
pub fn optimal_belief_path(p: &ModelParams, seq: &ThresholdSequence, t: f64) -> Result<BeliefSnapshot> {
    check_nonneg("time", t)?;
    if seq.thresholds.is_empty() && !seq.truncated() {
        return Err(Error::Range("threshold sequence is empty".into()));
    }
    if t >= seq.horizon() {
        return Err(Error::Range(format!(
            "t={t} is beyond the solved horizon {}; solve more thresholds",
            seq.horizon()
        )));
    }
    let policy = ThresholdPolicy::finite(seq.thresholds.clone())?;
    let profile = effort_profile(&policy, t);
    let efforts = profile
        .efforts_at(t)
        .ok_or_else(|| Error::Range(format!("profile does not cover t={t}")))?;
    Ok(beliefs(p, &EffortState { efforts }))
}
