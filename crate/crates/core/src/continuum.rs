//! Continuum (breadth/depth) limit: optimal breadth trajectory, constant and
//! limiting depths, trajectory payoff and the discrete-to-continuum check.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::discrete::solve_learning_thresholds_until;
use crate::error::{domain, Error, Result};
use crate::grid::TimeGrid;
use crate::model::{continuum_cdf, scaled_partials, Difficulty, ModelParams};
use crate::numeric::{bisect, integrate, newton_polish};

/// Breadth path on a time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub breadth: Vec<f64>,
    /// `t / x(t)`; infinite where the breadth is zero.
    pub depth: Vec<f64>,
    pub el_residual: Vec<f64>,
}

impl Trajectory {
    /// Trajectory with the given breadth; depth is derived and residuals are
    /// left at zero.
    pub fn from_breadth(times: Vec<f64>, breadth: Vec<f64>) -> Result<Self> {
        if times.len() != breadth.len() {
            return domain("times and breadth lengths differ");
        }
        TimeGrid::new(times.clone())?;
        let depth = times
            .iter()
            .zip(&breadth)
            .map(|(t, x)| if *x > 0.0 { t / x } else { f64::INFINITY })
            .collect();
        let el_residual = vec![0.0; times.len()];
        Ok(Self { times, breadth, depth, el_residual })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Depth marginal value at rate `lambda` when the agent keeps share `alpha`.
pub fn phi_tilde(p: &ModelParams, alpha: f64, lambda: f64, d: f64) -> f64 {
    let (r, c, nu0) = (p.r(), p.c(), p.nu0());
    let z = lambda * d;
    let e = (-z).exp();
    r * alpha * nu0 * (-(-z).exp_m1() - z * e) - r * c - c * nu0 * lambda * e
}

fn dphi_tilde(p: &ModelParams, alpha: f64, lambda: f64, d: f64) -> f64 {
    let e = (-lambda * d).exp();
    let (r, c, nu0) = (p.r(), p.c(), p.nu0());
    r * alpha * nu0 * lambda * lambda * d * e + c * nu0 * lambda * lambda * e
}

/// Root in `d` of the prior-weighted depth marginal value with weights
/// `(1 - w_h, w_h)`. `None` when the weighted value never turns positive.
fn mixed_depth_root(p: &ModelParams, alpha: f64, w_h: f64) -> Result<Option<f64>> {
    let states = [(1.0 - w_h, p.lambda_e()), (w_h, p.lambda_h())];
    let g = |d: f64| -> (f64, f64) {
        states.iter().filter(|s| s.0 > 0.0).fold((0.0, 0.0), |acc, &(w, l)| {
            (acc.0 + w * phi_tilde(p, alpha, l, d), acc.1 + w * dphi_tilde(p, alpha, l, d))
        })
    };
    let limit: f64 = states
        .iter()
        .filter(|s| s.0 > 0.0 && s.1 > 0.0)
        .map(|s| s.0 * p.r() * alpha * p.nu0())
        .sum::<f64>()
        - p.r() * p.c();
    if !(limit > 0.0) {
        return Ok(None);
    }
    let lmax = p.lambda_e();
    let mut hi = 1.0 / lmax;
    while g(hi).0 <= 0.0 {
        hi *= 2.0;
        if hi > 1e15 {
            return Ok(None);
        }
    }
    let d = bisect(|d| g(d).0, 0.0, hi, 0.0)?;
    Ok(Some(newton_polish(g, d, 0.0, hi, 3)))
}

/// Constant optimal depth `d*` when difficulty is known.
pub fn constant_depth(p: &ModelParams) -> Result<f64> {
    let l = p.require_known()?;
    if l <= 0.0 {
        return domain("constant depth needs a positive arrival rate");
    }
    p.check_continuum_feasible()?;
    mixed_depth_root(p, 1.0, 0.0)?.ok_or_else(|| Error::Solver("constant depth root not found".into()))
}

/// Depth limits along the optimal trajectory: `d0` as `t -> 0` and `d_h` as
/// `t -> infinity`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DepthLimits {
    pub d0: f64,
    /// Infinite when the hard state never yields a breakthrough.
    pub d_h: f64,
}

pub(crate) fn depth_limits_alpha(p: &ModelParams, alpha: f64) -> Result<(Option<f64>, Option<f64>)> {
    let d0 = mixed_depth_root(p, alpha, p.delta0())?;
    let d_h = mixed_depth_root(p, alpha, 1.0)?;
    Ok((d0, d_h))
}

pub fn depth_limits(p: &ModelParams) -> Result<DepthLimits> {
    p.check_continuum_feasible()?;
    let (d0, d_h) = depth_limits_alpha(p, 1.0)?;
    let d0 = d0.ok_or_else(|| {
        Error::Feasibility("initial depth undefined: exploring is never worthwhile at t = 0".into())
    })?;
    Ok(DepthLimits { d0, d_h: d_h.unwrap_or(f64::INFINITY) })
}

/// Euler-Lagrange value at time `t` and depth `d`, scaled by the
/// no-breakthrough probability.
pub(crate) fn el_value(p: &ModelParams, alpha: f64, t: f64, d: f64) -> f64 {
    let mut logw = [f64::NEG_INFINITY; 2];
    let mut phis = [0.0; 2];
    for (i, th) in Difficulty::BOTH.into_iter().enumerate() {
        let prior = p.prior(th);
        if prior == 0.0 {
            continue;
        }
        let l = p.lambda(th);
        logw[i] = prior.ln() - p.nu0() * t * -(-l * d).exp_m1() / d;
        phis[i] = phi_tilde(p, alpha, l, d);
    }
    let mx = logw[0].max(logw[1]);
    let w = [(logw[0] - mx).exp(), (logw[1] - mx).exp()];
    (w[0] * phis[0] + w[1] * phis[1]) / (w[0] + w[1])
}

/// Optimal depth at time `t` under share `alpha`; `None` when the agent does
/// not explore.
pub(crate) fn solve_depth(
    p: &ModelParams,
    alpha: f64,
    t: f64,
    limits: (Option<f64>, Option<f64>),
) -> Result<Option<f64>> {
    let g = |d: f64| el_value(p, alpha, t, d);
    if p.lambda_e() == p.lambda_h() || p.delta0() == 0.0 {
        return mixed_depth_root(p, alpha, 0.0);
    }
    if p.delta0() == 1.0 {
        return mixed_depth_root(p, alpha, 1.0);
    }
    let mut lo = limits.0.map_or(1.0 / p.lambda_e(), |d| d * (1.0 - 1e-6));
    while g(lo) >= 0.0 {
        lo *= 0.5;
        if lo < 1e-300 {
            return Err(Error::Solver(format!("depth bracket failed at t={t}")));
        }
    }
    let mut hi = match limits.1 {
        Some(d) => d * (1.0 + 1e-6),
        None => lo * 2.0,
    };
    while g(hi) <= 0.0 {
        hi *= 2.0;
        if hi > 1e15 {
            return Ok(None);
        }
    }
    Ok(Some(bisect(g, lo, hi, 0.0)?))
}

pub(crate) fn trajectory_with_share(p: &ModelParams, alpha: f64, grid: &TimeGrid) -> Result<Trajectory> {
    let limits = depth_limits_alpha(p, alpha)?;
    let solved: Result<Vec<(f64, f64, f64)>> = grid
        .times()
        .par_iter()
        .map(|&t| {
            Ok(match solve_depth(p, alpha, t, limits)? {
                Some(d) => {
                    let x = t / d;
                    let s = scaled_partials(p, x, t)?;
                    let res = p.r() * (alpha * s.x - p.c()) - p.c() * s.t;
                    (x, d, res)
                }
                None => (0.0, f64::INFINITY, 0.0),
            })
        })
        .collect();
    let solved = solved?;
    Ok(Trajectory {
        times: grid.times().to_vec(),
        breadth: solved.iter().map(|s| s.0).collect(),
        depth: solved.iter().map(|s| s.1).collect(),
        el_residual: solved.iter().map(|s| s.2).collect(),
    })
}

/// First-best breadth trajectory, solved pointwise in `t`.
pub fn solve_trajectory(p: &ModelParams, grid: &TimeGrid) -> Result<Trajectory> {
    p.check_continuum_feasible()?;
    trajectory_with_share(p, 1.0, grid)
}

fn hermite_slopes(t: &[f64], x: &[f64]) -> Vec<f64> {
    let n = t.len();
    if n == 1 {
        return vec![x[0] / t[0]];
    }
    (0..n)
        .map(|i| {
            if i == 0 {
                (x[1] - x[0]) / (t[1] - t[0])
            } else if i == n - 1 {
                (x[n - 1] - x[n - 2]) / (t[n - 1] - t[n - 2])
            } else {
                let h0 = t[i] - t[i - 1];
                let h1 = t[i + 1] - t[i];
                (h0 * h0 * x[i + 1] - h1 * h1 * x[i - 1] - (h0 * h0 - h1 * h1) * x[i]) / (h0 * h1 * (h0 + h1))
            }
        })
        .collect()
}

/// Discounted payoff `int e^{-rt} (r F - (1 - F) c x') dt` of a trajectory.
pub fn continuum_payoff(p: &ModelParams, traj: &Trajectory) -> Result<f64> {
    let t = &traj.times;
    let x = &traj.breadth;
    if t.is_empty() || t.len() != x.len() {
        return domain("trajectory is empty or malformed");
    }
    for i in 1..t.len() {
        let scale = x[i].abs().max(1e-300);
        if x[i] < x[i - 1] - 1e-9 * scale {
            return Err(Error::Precondition(format!("breadth decreases at t={}", t[i])));
        }
        if x[i] / t[i] > x[i - 1] / t[i - 1] * (1.0 + 1e-9) + 1e-300 {
            return Err(Error::Precondition(format!("depth decreases at t={}", t[i])));
        }
    }
    if x.iter().any(|v| *v < 0.0 || !v.is_finite()) {
        return Err(Error::Precondition("breadth must be finite and nonnegative".into()));
    }
    let (r, c) = (p.r(), p.c());
    let flow = |s: f64, xs: f64, dx: f64| -> f64 {
        let xs = xs.max(0.0);
        let f = continuum_cdf(p, xs, s).unwrap_or(0.0);
        (-r * s).exp() * (r * f - (1.0 - f) * c * dx)
    };
    let tol = 1e-14;
    let mut total = integrate(|s| flow(s, x[0] * s / t[0], x[0] / t[0]), 0.0, t[0], tol, 1e-13);
    let m = hermite_slopes(t, x);
    for i in 0..t.len() - 1 {
        let (t0, t1) = (t[i], t[i + 1]);
        let h = t1 - t0;
        let (x0, x1, m0, m1) = (x[i], x[i + 1], m[i], m[i + 1]);
        let path = |s: f64| -> (f64, f64) {
            let u = (s - t0) / h;
            let (u2, u3) = (u * u, u * u * u);
            let val = (2.0 * u3 - 3.0 * u2 + 1.0) * x0
                + (u3 - 2.0 * u2 + u) * h * m0
                + (-2.0 * u3 + 3.0 * u2) * x1
                + (u3 - u2) * h * m1;
            let der = (6.0 * u2 - 6.0 * u) / h * x0
                + (3.0 * u2 - 4.0 * u + 1.0) * m0
                + (-6.0 * u2 + 6.0 * u) / h * x1
                + (3.0 * u2 - 2.0 * u) * m1;
            (val, der)
        };
        total += integrate(
            |s| {
                let (v, d) = path(s);
                flow(s, v, d)
            },
            t0,
            t1,
            tol,
            1e-13,
        );
    }
    let tn = t[t.len() - 1];
    let xn = x[x.len() - 1];
    let slope = xn / tn;
    let bound = |s: f64| (-r * s).exp() * (1.0 + c * slope / r);
    if bound(tn) > 1e-10 {
        let mut end = tn;
        while bound(end) > 1e-11 {
            end += 1.0 / r;
        }
        total += integrate(|s| flow(s, slope * s, slope), tn, end, tol, 1e-13);
    }
    Ok(total)
}

/// One row of the discrete-to-continuum comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub n: u32,
    /// `sup_t |N_n(t) - x*(t)|` over the grid; `None` if the discrete solve failed.
    pub sup_gap: Option<f64>,
    /// Number of thresholds solved.
    pub thresholds: usize,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
    pub continuum: Trajectory,
}

/// Discrete model with `n` times as many, `n` times less likely, `n` times
/// faster and `n` times cheaper approaches.
pub fn scaled_params(p: &ModelParams, n: u32) -> Result<ModelParams> {
    let nf = n as f64;
    ModelParams::new(p.r(), p.nu0() / nf, p.delta0(), p.lambda_e() * nf, p.lambda_h() * nf, p.c() / nf)
}

/// Normalized approach count `(1 + #{j : j K_j < t}) / n`.
pub fn normalized_arm_count(brainstorm_times: &[f64], n: u32, t: f64) -> f64 {
    (1 + brainstorm_times.partition_point(|&b| b < t)) as f64 / n as f64
}

/// Compare normalized approach counts of scaled discrete problems with the
/// continuum trajectory.
pub fn convergence_experiment(p: &ModelParams, n_values: &[u32], grid: &TimeGrid) -> Result<ConvergenceReport> {
    if n_values.iter().any(|&n| n == 0) {
        return domain("scale factors must be at least 1");
    }
    let continuum = solve_trajectory(p, grid)?;
    let t_max = grid.last();
    let rows = n_values
        .par_iter()
        .map(|&n| {
            let seq = scaled_params(p, n)
                .and_then(|q| solve_learning_thresholds_until(&q, usize::MAX, |j, k| j as f64 * k >= t_max));
            match seq {
                Ok(seq) => {
                    let gap = grid
                        .times()
                        .iter()
                        .zip(&continuum.breadth)
                        .map(|(&t, &x)| (normalized_arm_count(&seq.brainstorm_times, n, t) - x).abs())
                        .fold(0.0, f64::max);
                    ConvergenceRow { n, sup_gap: Some(gap), thresholds: seq.thresholds.len(), failure: None }
                }
                Err(e) => ConvergenceRow { n, sup_gap: None, thresholds: 0, failure: Some(e.to_string()) },
            }
        })
        .collect();
    Ok(ConvergenceReport { rows, continuum })
}
