//! Share contracts between a principal and an exploring agent: best
//! response to a constant share, static and dynamic optimal shares,
//! no-commitment shares and the extensive-margin benchmarks.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::continuum::{depth_limits_alpha, solve_depth, trajectory_with_share, Trajectory};
use crate::error::{domain, Error, Result};
use crate::grid::TimeGrid;
use crate::model::{continuum_cdf, scaled_partials, ModelParams};
use crate::numeric::{bisect, integrate, scan_then_golden};

/// Agent's breadth path when keeping a constant share `alpha` of the prize.
/// A share at or below `c / nu0` yields the zero path.
pub fn agent_best_response(p: &ModelParams, alpha: f64, grid: &TimeGrid) -> Result<Trajectory> {
    p.check_continuum_feasible()?;
    if !(alpha > 0.0 && alpha <= 1.0) {
        return domain(format!("share must lie in (0, 1], got {alpha}"));
    }
    if alpha * p.nu0() <= p.c() {
        let n = grid.len();
        return Trajectory::from_breadth(grid.times().to_vec(), vec![0.0; n]);
    }
    trajectory_with_share(p, alpha, grid)
}

/// Breadth chosen at time `t` under share `alpha`, or zero.
fn breadth_at(p: &ModelParams, alpha: f64, t: f64, limits: (Option<f64>, Option<f64>)) -> Result<f64> {
    Ok(solve_depth(p, alpha, t, limits)?.map_or(0.0, |d| t / d))
}

/// Sum of integrals over `[0, 1], [1, 2], [2, 4], ...` until the integrand's
/// discount factor is negligible.
fn discounted_integral<F: Fn(f64) -> f64>(f: F, r: f64) -> f64 {
    let end = 40.0 / r;
    let mut total = integrate(&f, 0.0, 1.0 / r, 1e-14, 1e-13);
    let mut a = 1.0 / r;
    while a < end {
        let b = (2.0 * a).min(end);
        total += integrate(&f, a, b, 1e-14, 1e-13);
        a = b;
    }
    total
}

/// Principal profit `(1 - alpha) r int e^{-rt} F(x(t; alpha), t) dt` under a
/// constant share.
pub fn static_share_profit(p: &ModelParams, alpha: f64) -> Result<f64> {
    p.check_continuum_feasible()?;
    if !(alpha > 0.0 && alpha <= 1.0) {
        return domain(format!("share must lie in (0, 1], got {alpha}"));
    }
    if alpha * p.nu0() <= p.c() || alpha == 1.0 {
        return Ok(0.0);
    }
    let limits = depth_limits_alpha(p, alpha)?;
    let r = p.r();
    let fail = std::sync::Mutex::new(None);
    let v = discounted_integral(
        |t| {
            if t == 0.0 {
                return 0.0;
            }
            match breadth_at(p, alpha, t, limits).and_then(|x| continuum_cdf(p, x, t)) {
                Ok(f) => r * (-r * t).exp() * f,
                Err(e) => {
                    *fail.lock().expect("lock") = Some(e);
                    0.0
                }
            }
        },
        r,
    );
    if let Some(e) = fail.into_inner().expect("lock") {
        return Err(e);
    }
    Ok((1.0 - alpha) * v)
}

/// Share and principal payoff.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StaticContract {
    pub alpha: f64,
    pub payoff: f64,
}

/// Profit-maximizing constant share.
pub fn optimal_static_share(p: &ModelParams) -> Result<StaticContract> {
    p.check_continuum_feasible()?;
    let lo = p.c() / p.nu0();
    let (alpha, payoff) = scan_then_golden(|a| static_share_profit(p, a).unwrap_or(f64::NEG_INFINITY), lo, 1.0, 41, 1e-10);
    if !(alpha < 1.0) || !payoff.is_finite() {
        return Err(Error::Solver("static share search did not find an interior maximum".into()));
    }
    Ok(StaticContract { alpha, payoff })
}

/// Trajectory law of the dynamic contract and its diagnostics at one `(x, t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct LawPoint {
    law: f64,
    incentive: f64,
    distortion: f64,
    costate: f64,
}

/// Law divided by `1 - F`.
fn law_point(p: &ModelParams, x: f64, t: f64) -> Result<LawPoint> {
    let (r, c) = (p.r(), p.c());
    let s = scaled_partials(p, x, t)?;
    let odds = s.f / s.survival;
    let g = c * (r * s.xx_plus_x_sq / s.x + s.xx * s.t / s.x - s.xt);
    let law = r * s.x - r * c - c * s.t + odds * g / s.x;
    Ok(LawPoint {
        law,
        incentive: (r + s.t) * c / (r * s.x),
        distortion: odds * g / (s.x * s.x),
        costate: odds / s.x,
    })
}

/// Incentive term `((1 - F) r + F_t) c / (r F_x)` at `(x, t)`.
pub fn incentive(p: &ModelParams, x: f64, t: f64) -> Result<f64> {
    Ok(law_point(p, x, t)?.incentive)
}

/// Distortion of the dynamic-contract law relative to the first-best law.
pub fn distortion(p: &ModelParams, x: f64, t: f64) -> Result<f64> {
    Ok(law_point(p, x, t)?.distortion)
}

struct ContractSolver<'a> {
    p: &'a ModelParams,
    limits: (Option<f64>, Option<f64>),
}

impl<'a> ContractSolver<'a> {
    fn new(p: &'a ModelParams) -> Result<Self> {
        p.check_continuum_feasible()?;
        Ok(Self { p, limits: depth_limits_alpha(p, 1.0)? })
    }

    /// `(x_alpha, x_fb, law point)` at time `t`.
    fn solve(&self, t: f64) -> Result<(f64, f64, LawPoint)> {
        let p = self.p;
        let x_fb = breadth_at(p, 1.0, t, self.limits)?;
        if !(x_fb > 0.0) {
            return Err(Error::Solver(format!("first-best breadth is zero at t={t}")));
        }
        let l = |x: f64| law_point(p, x, t).map(|v| v.law).unwrap_or(f64::NAN);
        let mut hi = x_fb;
        let mut lo = x_fb;
        if l(hi) < 0.0 {
            for _ in 0..2000 {
                lo *= 0.5;
                if l(lo) >= 0.0 {
                    break;
                }
            }
        } else {
            for _ in 0..2000 {
                hi *= 2.0;
                if l(hi) <= 0.0 {
                    break;
                }
            }
        }
        let x = bisect(l, lo, hi, 0.0)?;
        Ok((x, x_fb, law_point(p, x, t)?))
    }

    fn incentive_at(&self, t: f64) -> Result<f64> {
        Ok(self.solve(t)?.2.incentive)
    }

    /// `int_a^b r e^{-r (s - a)} I(s) ds`.
    fn share_increment(&self, a: f64, b: f64) -> Result<f64> {
        let r = self.p.r();
        let fail = std::sync::Mutex::new(None);
        let v = integrate(
            |s| match self.incentive_at(s) {
                Ok(i) => r * (-r * (s - a)).exp() * i,
                Err(e) => {
                    *fail.lock().expect("lock") = Some(e);
                    0.0
                }
            },
            a,
            b,
            1e-13,
            1e-12,
        );
        match fail.into_inner().expect("lock") {
            Some(e) => Err(e),
            None => Ok(v),
        }
    }

    /// Share at `t_end`: integral to a far horizon plus a constant tail.
    fn terminal_share(&self, t_end: f64) -> Result<f64> {
        let p = self.p;
        let r = p.r();
        let limit = if p.lambda_h() > 0.0 { Some(p.c() / p.nu0()) } else { None };
        let mut acc = 0.0;
        let mut a = t_end;
        let step = 1.0 / r;
        let mut prev = self.incentive_at(t_end)?;
        loop {
            let b = a + step;
            acc += (-r * (a - t_end)).exp() * self.share_increment(a, b)?;
            let ib = self.incentive_at(b)?;
            let disc = (-r * (b - t_end)).exp();
            let (tail_value, gap) = match limit {
                Some(l) => (l, (ib - l).abs()),
                None => (ib, (ib - prev).abs()),
            };
            if gap * disc < 1e-8 || b - t_end > 400.0 / r {
                return Ok(acc + disc * tail_value);
            }
            prev = ib;
            a = b;
        }
    }
}

/// Optimal dynamic share path and its diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractPath {
    pub times: Vec<f64>,
    pub alpha: Vec<f64>,
    pub x_alpha: Vec<f64>,
    pub x_first_best: Vec<f64>,
    pub incentive: Vec<f64>,
    pub distortion: Vec<f64>,
    pub law_residual: Vec<f64>,
    /// `F / F_x` along the path.
    pub costate: Vec<f64>,
    /// Grid indices where the share leaves `[0, 1]`.
    pub violations: Vec<usize>,
}

/// Solve the dynamic-contract trajectory law pointwise and integrate the
/// share backwards from a far horizon.
pub fn solve_dynamic_contract(p: &ModelParams, grid: &TimeGrid) -> Result<ContractPath> {
    let solver = ContractSolver::new(p)?;
    let times = grid.times();
    let points: Vec<(f64, f64, LawPoint)> =
        times.par_iter().map(|&t| solver.solve(t)).collect::<Result<_>>()?;
    let increments: Vec<f64> = times
        .par_windows(2)
        .map(|w| solver.share_increment(w[0], w[1]))
        .collect::<Result<_>>()?;
    let n = times.len();
    let mut alpha = vec![0.0; n];
    alpha[n - 1] = solver.terminal_share(times[n - 1])?;
    let r = p.r();
    for i in (0..n - 1).rev() {
        alpha[i] = (-r * (times[i + 1] - times[i])).exp() * alpha[i + 1] + increments[i];
    }
    let violations = alpha
        .iter()
        .enumerate()
        .filter(|(_, a)| !(**a >= 0.0 && **a <= 1.0))
        .map(|(i, _)| i)
        .collect();
    Ok(ContractPath {
        times: times.to_vec(),
        alpha,
        x_alpha: points.iter().map(|v| v.0).collect(),
        x_first_best: points.iter().map(|v| v.1).collect(),
        incentive: points.iter().map(|v| v.2.incentive).collect(),
        distortion: points.iter().map(|v| v.2.distortion).collect(),
        law_residual: points.iter().map(|v| v.2.law).collect(),
        costate: points.iter().map(|v| v.2.costate).collect(),
        violations,
    })
}

/// Principal profit under the dynamic contract,
/// `r int e^{-rt} F(x_a, t) (1 - I(x_a, t)) dt`.
pub fn dynamic_contract_profit(p: &ModelParams) -> Result<f64> {
    let solver = ContractSolver::new(p)?;
    let r = p.r();
    let fail = std::sync::Mutex::new(None);
    let v = discounted_integral(
        |t| {
            if t == 0.0 {
                return 0.0;
            }
            match solver.solve(t).and_then(|(x, _, lp)| Ok((continuum_cdf(p, x, t)?, lp.incentive))) {
                Ok((f, i)) => r * (-r * t).exp() * f * (1.0 - i),
                Err(e) => {
                    *fail.lock().expect("lock") = Some(e);
                    0.0
                }
            }
        },
        r,
    );
    match fail.into_inner().expect("lock") {
        Some(e) => Err(e),
        None => Ok(v),
    }
}

/// Stationary share and depth when the principal cannot commit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoCommitment {
    pub alpha: f64,
    pub depth: f64,
    pub payoff: f64,
}

/// Depth at which the agent explores under constant share `alpha` with a
/// known rate.
fn known_depth(p: &ModelParams, alpha: f64) -> Option<f64> {
    solve_depth(p, alpha, 1.0, (None, None)).ok().flatten()
}

/// Time-invariant share of the no-commitment equilibrium (known difficulty).
pub fn no_commitment_equilibrium(p: &ModelParams) -> Result<NoCommitment> {
    let lambda = p.require_known()?;
    if lambda <= 0.0 {
        return domain("no-commitment share needs a positive arrival rate");
    }
    p.check_continuum_feasible()?;
    let (r, nu0) = (p.r(), p.nu0());
    let value = |alpha: f64| -> f64 {
        match known_depth(p, alpha) {
            Some(d) => {
                let s = -(-lambda * d).exp_m1();
                (1.0 - alpha) * nu0 * s / (r * d + nu0 * s)
            }
            None => 0.0,
        }
    };
    let (alpha, payoff) = scan_then_golden(value, p.c() / nu0, 1.0, 41, 1e-10);
    let depth = known_depth(p, alpha).ok_or_else(|| Error::Solver("no depth at the optimal share".into()))?;
    Ok(NoCommitment { alpha, depth, payoff })
}

fn check_rate(name: &str, v: f64) -> Result<()> {
    if !(v.is_finite() && v > 0.0) {
        return domain(format!("{name} must be positive and finite, got {v}"));
    }
    Ok(())
}

/// Constant share `gamma / lambda` for the extensive-margin problem.
pub fn extensive_margin_contract(lambda: f64, gamma: f64, r: f64) -> Result<f64> {
    check_rate("lambda", lambda)?;
    check_rate("r", r)?;
    if !(gamma.is_finite() && gamma >= 0.0) {
        return domain(format!("effort cost must be nonnegative, got {gamma}"));
    }
    if gamma >= lambda {
        return Err(Error::Precondition(format!("effort cost {gamma} must be below the rate {lambda}")));
    }
    Ok(gamma / lambda)
}

/// Share path of the extensive-margin problem with unknown difficulty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharePath {
    /// Share at `t = 0`.
    pub initial: f64,
    pub times: Vec<f64>,
    pub alpha: Vec<f64>,
}

/// Mean arrival rate given no success after unit effort up to `s`.
fn posterior_mean_rate(lambda_e: f64, lambda_h: f64, delta0: f64, s: f64) -> f64 {
    if delta0 == 0.0 {
        return lambda_e;
    }
    if delta0 == 1.0 {
        return lambda_h;
    }
    let lh = delta0.ln() - lambda_h * s;
    let le = (1.0 - delta0).ln() - lambda_e * s;
    let m = lh.max(le);
    let (wh, we) = ((lh - m).exp(), (le - m).exp());
    (wh * lambda_h + we * lambda_e) / (wh + we)
}

/// Increasing share path `alpha(t) = (gamma/lambda_h) e^{rt} - e^{rt} int_0^t
/// e^{-rs} r gamma / E[lambda | s] ds`. A prior of zero on the hard state
/// reduces to the constant easy-state share.
pub fn extensive_margin_learning_contract(
    lambda_e: f64,
    lambda_h: f64,
    gamma: f64,
    r: f64,
    delta0: f64,
    grid: &TimeGrid,
) -> Result<SharePath> {
    check_rate("lambda_h", lambda_h)?;
    check_rate("r", r)?;
    if !(lambda_e.is_finite() && lambda_e >= lambda_h) {
        return Err(Error::Precondition(format!("need lambda_h <= lambda_e, got {lambda_h} > {lambda_e}")));
    }
    if !(0.0..=1.0).contains(&delta0) {
        return domain(format!("delta0 must lie in [0, 1], got {delta0}"));
    }
    let base = extensive_margin_contract(lambda_h, gamma, r)?;
    let times = grid.times().to_vec();
    if delta0 == 0.0 {
        let a = gamma / lambda_e;
        return Ok(SharePath { initial: a, alpha: vec![a; times.len()], times });
    }
    let gap = |s: f64| r * gamma * (1.0 / lambda_h - 1.0 / posterior_mean_rate(lambda_e, lambda_h, delta0, s));
    let mut alpha = Vec::with_capacity(times.len());
    let mut extra = 0.0;
    let mut prev = 0.0;
    for &t in &times {
        let piece = integrate(|s| (r * (t - s)).exp() * gap(s), prev, t, 1e-15, 1e-13);
        extra = (r * (t - prev)).exp() * extra + piece;
        alpha.push(base + extra);
        prev = t;
    }
    Ok(SharePath { initial: base, times, alpha })
}
