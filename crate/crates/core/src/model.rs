//! Closed-form primitives: survival, beliefs, marginal values and the
//! continuum breakthrough distribution.

use serde::{Deserialize, Serialize};

use crate::error::{check_nonneg, domain, Error, Result};

/// Hidden difficulty state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Difficulty {
    Easy,
    Hard,
}

impl Difficulty {
    pub const BOTH: [Difficulty; 2] = [Difficulty::Easy, Difficulty::Hard];
}

#[derive(Deserialize)]
struct RawParams {
    r: f64,
    nu0: f64,
    delta0: f64,
    lambda_e: f64,
    lambda_h: f64,
    c: f64,
}

/// Model primitives `(r, nu0, delta0, lambda_E, lambda_H, c)`.
///
/// Construction checks the basic ranges only. The discrete cost bound and the
/// continuum bound `c < nu0` are checked by the operations that need them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct ModelParams {
    r: f64,
    nu0: f64,
    delta0: f64,
    lambda_e: f64,
    lambda_h: f64,
    c: f64,
}

impl TryFrom<RawParams> for ModelParams {
    type Error = Error;

    fn try_from(p: RawParams) -> Result<Self> {
        ModelParams::new(p.r, p.nu0, p.delta0, p.lambda_e, p.lambda_h, p.c)
    }
}

impl ModelParams {
    pub fn new(r: f64, nu0: f64, delta0: f64, lambda_e: f64, lambda_h: f64, c: f64) -> Result<Self> {
        let all = [r, nu0, delta0, lambda_e, lambda_h, c];
        if all.iter().any(|v| !v.is_finite()) {
            return domain("parameters must be finite");
        }
        if r <= 0.0 {
            return domain(format!("r must be positive, got {r}"));
        }
        if !(nu0 > 0.0 && nu0 < 1.0) {
            return domain(format!("nu0 must lie in (0,1), got {nu0}"));
        }
        if !(0.0..=1.0).contains(&delta0) {
            return domain(format!("delta0 must lie in [0,1], got {delta0}"));
        }
        if lambda_h < 0.0 || lambda_e < lambda_h {
            return domain(format!(
                "rates must satisfy lambda_e >= lambda_h >= 0, got {lambda_e}, {lambda_h}"
            ));
        }
        if c <= 0.0 {
            return domain(format!("c must be positive, got {c}"));
        }
        Ok(Self { r, nu0, delta0, lambda_e, lambda_h, c })
    }

    /// Known-difficulty parameters (`lambda_E = lambda_H = lambda`).
    pub fn known(r: f64, nu0: f64, lambda: f64, c: f64) -> Result<Self> {
        Self::new(r, nu0, 0.5, lambda, lambda, c)
    }

    pub fn r(&self) -> f64 {
        self.r
    }
    pub fn nu0(&self) -> f64 {
        self.nu0
    }
    pub fn delta0(&self) -> f64 {
        self.delta0
    }
    pub fn lambda_e(&self) -> f64 {
        self.lambda_e
    }
    pub fn lambda_h(&self) -> f64 {
        self.lambda_h
    }
    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn lambda(&self, theta: Difficulty) -> f64 {
        match theta {
            Difficulty::Easy => self.lambda_e,
            Difficulty::Hard => self.lambda_h,
        }
    }

    pub fn prior(&self, theta: Difficulty) -> f64 {
        match theta {
            Difficulty::Easy => 1.0 - self.delta0,
            Difficulty::Hard => self.delta0,
        }
    }

    pub fn is_known_difficulty(&self) -> bool {
        self.lambda_e == self.lambda_h || self.delta0 == 0.0 || self.delta0 == 1.0
    }

    /// Copy with a different cost.
    pub fn with_cost(&self, c: f64) -> Result<Self> {
        Self::new(self.r, self.nu0, self.delta0, self.lambda_e, self.lambda_h, c)
    }

    /// Copy with a different prior on the hard state.
    pub fn with_delta0(&self, delta0: f64) -> Result<Self> {
        Self::new(self.r, self.nu0, delta0, self.lambda_e, self.lambda_h, self.c)
    }

    /// Expected value of brainstorming one approach and working it forever,
    /// gross of the cost.
    pub fn discrete_cost_bound(&self) -> f64 {
        let r = self.r;
        self.nu0 * (1.0 - self.delta0) * self.lambda_e / (r + self.lambda_e)
            + self.nu0 * self.delta0 * self.lambda_h / (r + self.lambda_h)
    }

    pub fn check_discrete_feasible(&self) -> Result<()> {
        let bound = self.discrete_cost_bound();
        if self.c < bound {
            Ok(())
        } else {
            Err(Error::Feasibility(format!(
                "cost {} must be below the single-approach value {bound}",
                self.c
            )))
        }
    }

    pub fn is_continuum_feasible(&self) -> bool {
        self.c < self.nu0
    }

    pub fn check_continuum_feasible(&self) -> Result<()> {
        if self.is_continuum_feasible() {
            Ok(())
        } else {
            Err(Error::Feasibility(format!(
                "continuum model needs c < nu0, got c={} nu0={}",
                self.c, self.nu0
            )))
        }
    }

    pub(crate) fn require_known(&self) -> Result<f64> {
        if self.lambda_e != self.lambda_h {
            return Err(Error::Precondition(format!(
                "operation needs lambda_e == lambda_h, got {} and {}",
                self.lambda_e, self.lambda_h
            )));
        }
        Ok(self.lambda_e)
    }
}

/// Finite-support distribution of arrival rates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(f64, f64)>", into = "Vec<(f64, f64)>")]
pub struct RateDistribution {
    atoms: Vec<(f64, f64)>,
}

impl TryFrom<Vec<(f64, f64)>> for RateDistribution {
    type Error = Error;

    fn try_from(atoms: Vec<(f64, f64)>) -> Result<Self> {
        RateDistribution::new(atoms)
    }
}

impl From<RateDistribution> for Vec<(f64, f64)> {
    fn from(d: RateDistribution) -> Self {
        d.atoms
    }
}

impl RateDistribution {
    /// Atoms are `(rate, mass)` pairs. They are sorted by rate; duplicates are
    /// rejected.
    pub fn new(mut atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return domain("rate distribution needs at least one atom");
        }
        for &(rate, mass) in &atoms {
            if !(rate.is_finite() && rate >= 0.0) {
                return domain(format!("rates must be finite and nonnegative, got {rate}"));
            }
            if !(mass.is_finite() && mass > 0.0) {
                return domain(format!("masses must be positive, got {mass}"));
            }
        }
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        if (total - 1.0).abs() > 1e-12 {
            return domain(format!("masses must sum to 1, got {total}"));
        }
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        if atoms.windows(2).any(|w| w[0].0 == w[1].0) {
            return domain("rates must be distinct");
        }
        Ok(Self { atoms })
    }

    /// The baseline arm: rate 0 with probability `1 - nu0`, `lambda` otherwise.
    pub fn two_point(nu0: f64, lambda: f64) -> Result<Self> {
        if lambda == 0.0 {
            Self::new(vec![(0.0, 1.0)])
        } else {
            Self::new(vec![(0.0, 1.0 - nu0), (lambda, nu0)])
        }
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    /// `P[rate <= x]`.
    pub fn cdf(&self, x: f64) -> f64 {
        self.atoms.iter().filter(|a| a.0 <= x).map(|a| a.1).sum()
    }

    /// True when `self` first-order stochastically dominates `other`.
    pub fn dominates(&self, other: &RateDistribution) -> bool {
        self.atoms
            .iter()
            .chain(other.atoms.iter())
            .all(|&(x, _)| self.cdf(x) <= other.cdf(x) + 1e-12)
    }

    /// `S(K) = sum mass * exp(-rate K)`.
    pub fn survival(&self, k: f64) -> f64 {
        self.atoms.iter().map(|&(l, m)| m * (-l * k).exp()).sum()
    }

    /// Posterior rate weights at effort `k`, normalized to sum to one.
    fn posterior_weights(&self, k: f64) -> Vec<f64> {
        let logs: Vec<f64> = self.atoms.iter().map(|&(l, m)| m.ln() - l * k).collect();
        let mx = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let w: Vec<f64> = logs.iter().map(|v| (v - mx).exp()).collect();
        let s: f64 = w.iter().sum();
        w.into_iter().map(|v| v / s).collect()
    }

    /// Hazard `lambda(K) = -S'(K)/S(K)`.
    pub fn hazard(&self, k: f64) -> f64 {
        self.posterior_weights(k)
            .iter()
            .zip(&self.atoms)
            .map(|(w, a)| w * a.0)
            .sum()
    }

    /// `int_0^inf e^{-rt} lambda(t) S(t) dt`.
    pub fn discounted_success(&self, r: f64) -> f64 {
        self.atoms.iter().map(|&(l, m)| m * l / (l + r)).sum()
    }
}

/// Cumulative effort on each brainstormed approach, in brainstorm order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct EffortState {
    pub efforts: Vec<f64>,
}

impl EffortState {
    pub fn new(efforts: Vec<f64>) -> Result<Self> {
        for &e in &efforts {
            check_nonneg("effort", e)?;
        }
        Ok(Self { efforts })
    }

    pub fn len(&self) -> usize {
        self.efforts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.efforts.is_empty()
    }
}

/// Posterior validity of each approach and posterior on the hard state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeliefSnapshot {
    pub arm_beliefs: Vec<f64>,
    pub difficulty_belief: f64,
}

pub(crate) fn log_surv(nu0: f64, lambda: f64, k: f64) -> f64 {
    (nu0 * (-lambda * k).exp_m1()).ln_1p()
}

pub(crate) fn surv(nu0: f64, lambda: f64, k: f64) -> f64 {
    1.0 + nu0 * (-lambda * k).exp_m1()
}

pub(crate) fn nu_of(nu0: f64, lambda: f64, k: f64) -> f64 {
    let z = lambda * k;
    if z == 0.0 {
        return nu0;
    }
    1.0 / (1.0 + (1.0 - nu0) / nu0 * z.exp())
}

/// Survival probability `S_theta(K)` of one approach after effort `K`.
pub fn survival(p: &ModelParams, theta: Difficulty, k: f64) -> Result<f64> {
    check_nonneg("effort", k)?;
    Ok(surv(p.nu0, p.lambda(theta), k))
}

/// Posterior that an approach is valid after effort `K` at rate `lambda`.
pub fn interim_belief(p: &ModelParams, lambda: f64, k: f64) -> Result<f64> {
    check_nonneg("effort", k)?;
    check_nonneg("rate", lambda)?;
    Ok(nu_of(p.nu0, lambda, k))
}

fn posterior_hard(delta0: f64, log_ratio: f64) -> f64 {
    // log_ratio = log(S_E^N / S_H^N)
    if delta0 == 0.0 || delta0 == 1.0 {
        return delta0;
    }
    delta0 / (delta0 + (1.0 - delta0) * log_ratio.exp())
}

/// Posterior on the hard state after `n` approaches each received effort `k`.
pub fn difficulty_belief(p: &ModelParams, k: f64, n: u32) -> Result<f64> {
    check_nonneg("effort", k)?;
    let lr = n as f64 * (log_surv(p.nu0, p.lambda_e, k) - log_surv(p.nu0, p.lambda_h, k));
    Ok(posterior_hard(p.delta0, lr))
}

/// Beliefs after an arbitrary effort history.
pub fn beliefs(p: &ModelParams, state: &EffortState) -> BeliefSnapshot {
    let log_e: f64 = state.efforts.iter().map(|&k| log_surv(p.nu0, p.lambda_e, k)).sum();
    let log_h: f64 = state.efforts.iter().map(|&k| log_surv(p.nu0, p.lambda_h, k)).sum();
    let q = posterior_hard(p.delta0, log_e - log_h);
    let arm_beliefs = state
        .efforts
        .iter()
        .map(|&k| q * nu_of(p.nu0, p.lambda_h, k) + (1.0 - q) * nu_of(p.nu0, p.lambda_e, k))
        .collect();
    BeliefSnapshot { arm_beliefs, difficulty_belief: q }
}

/// Posterior that approach 1 is valid given efforts `k1` on it and `k2` on a
/// second approach.
pub fn two_arm_validity_belief(p: &ModelParams, k1: f64, k2: f64) -> Result<f64> {
    check_nonneg("effort", k1)?;
    check_nonneg("effort", k2)?;
    Ok(beliefs(p, &EffortState { efforts: vec![k1, k2] }).arm_beliefs[0])
}

/// Value and derivative of the marginal value of effort on one approach at
/// rate `lambda`.
pub(crate) fn phi_parts(nu0: f64, lambda: f64, r: f64, c: f64, k: f64) -> (f64, f64) {
    let nu = nu_of(nu0, lambda, k);
    let h = lambda * nu;
    let decay = (-(r + lambda) * k).exp();
    let v = -c + nu0 * lambda / (lambda + r) * -(-(r + lambda) * k).exp_m1();
    let phi = h * (1.0 - v) - r * v - lambda * nu0 * decay;
    let dh = -lambda * h * (1.0 - nu);
    let dphi = dh * (1.0 - v) + (lambda - h) * nu0 * lambda * decay;
    (phi, dphi)
}

/// Marginal value of continuing an approach with effort `K` in state `theta`.
pub fn phi(p: &ModelParams, theta: Difficulty, k: f64) -> Result<f64> {
    check_nonneg("effort", k)?;
    Ok(phi_parts(p.nu0, p.lambda(theta), p.r, p.c, k).0)
}

/// Marginal value for a general rate distribution, with derivative.
pub(crate) fn phi_general_parts(dist: &RateDistribution, r: f64, c: f64, k: f64) -> (f64, f64) {
    let w = dist.posterior_weights(k);
    let mut lam = 0.0;
    let mut lam2 = 0.0;
    let mut integral = 0.0;
    let mut tail = 0.0;
    let mut dtail = 0.0;
    for (wi, &(l, m)) in w.iter().zip(dist.atoms()) {
        lam += wi * l;
        lam2 += wi * l * l;
        integral += m * l / (l + r) * -(-(l + r) * k).exp_m1();
        let e = m * l * (-(l + r) * k).exp();
        tail += e;
        dtail += e * (l + r);
    }
    let v = -c + integral;
    let phi = lam - (r + lam) * v - tail;
    let dlam = -(lam2 - lam * lam);
    let dv = tail;
    let dphi = dlam * (1.0 - v) - (r + lam) * dv + dtail;
    (phi, dphi)
}

/// Marginal value of continuing an approach whose rate is drawn from `dist`.
pub fn phi_general(dist: &RateDistribution, r: f64, c: f64, k: f64) -> Result<f64> {
    check_nonneg("effort", k)?;
    Ok(phi_general_parts(dist, r, c, k).0)
}

fn check_xt(x: f64, t: f64) -> Result<()> {
    check_nonneg("breadth", x)?;
    check_nonneg("time", t)
}

/// Continuum breakthrough probability by time `t` at breadth `x`.
pub fn continuum_cdf(p: &ModelParams, x: f64, t: f64) -> Result<f64> {
    check_xt(x, t)?;
    if x == 0.0 || t == 0.0 {
        return Ok(0.0);
    }
    let mut f = 0.0;
    for theta in Difficulty::BOTH {
        let a = p.nu0 * x * -(-p.lambda(theta) * t / x).exp_m1();
        f += p.prior(theta) * -(-a).exp_m1();
    }
    Ok(f)
}

/// Posterior on the hard state at breadth `x` and time `t` when no
/// breakthrough has arrived.
pub fn continuum_difficulty_belief(p: &ModelParams, x: f64, t: f64) -> Result<f64> {
    check_xt(x, t)?;
    if x == 0.0 || t == 0.0 {
        return Ok(p.delta0);
    }
    let log_s = |l: f64| -p.nu0 * x * -(-l * t / x).exp_m1();
    Ok(posterior_hard(p.delta0, log_s(p.lambda_e) - log_s(p.lambda_h)))
}

/// `F` and its first and second partial derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Partials {
    pub f: f64,
    pub f_x: f64,
    pub f_t: f64,
    pub f_xx: f64,
    pub f_tt: f64,
    pub f_xt: f64,
}

/// Partial derivatives divided by the no-breakthrough probability `1 - F`,
/// which stay well scaled when `F` is close to one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledPartials {
    pub f: f64,
    pub survival: f64,
    pub x: f64,
    pub t: f64,
    pub xx: f64,
    pub tt: f64,
    pub xt: f64,
    /// `f_xx + f_x^2`, computed without cancellation.
    pub xx_plus_x_sq: f64,
}

/// Breakthrough distribution partials at `(x, t)`, scaled by `1 - F`.
pub fn scaled_partials(p: &ModelParams, x: f64, t: f64) -> Result<ScaledPartials> {
    if !(x > 0.0 && t > 0.0) || !x.is_finite() || !t.is_finite() {
        return domain(format!("partials need x > 0 and t > 0, got x={x}, t={t}"));
    }
    let mut logw = [f64::NEG_INFINITY; 2];
    let mut ht = [0.0; 2];
    let mut hx = [0.0; 2];
    let mut lam = [0.0; 2];
    let mut f = 0.0;
    for (i, theta) in Difficulty::BOTH.into_iter().enumerate() {
        let prior = p.prior(theta);
        let l = p.lambda(theta);
        let z = l * t / x;
        let e = (-z).exp();
        let one_minus_e = -(-z).exp_m1();
        let a = p.nu0 * x * one_minus_e;
        f += prior * -(-a).exp_m1();
        if prior > 0.0 {
            logw[i] = prior.ln() - a;
        }
        ht[i] = p.nu0 * l * e;
        hx[i] = p.nu0 * (one_minus_e - z * e);
        lam[i] = l;
    }
    let mx = logw[0].max(logw[1]);
    let mut w = [(logw[0] - mx).exp(), (logw[1] - mx).exp()];
    let s = w[0] + w[1];
    w[0] /= s;
    w[1] /= s;
    let survival = s * mx.exp();
    let mut out = ScaledPartials {
        f,
        survival,
        x: 0.0,
        t: 0.0,
        xx: 0.0,
        tt: 0.0,
        xt: 0.0,
        xx_plus_x_sq: 0.0,
    };
    for i in 0..2 {
        out.x += w[i] * hx[i];
        out.t += w[i] * ht[i];
    }
    let mut var_hx = 0.0;
    let mut curv = 0.0;
    for i in 0..2 {
        let c3 = ht[i] * lam[i] * t * t / (x * x * x);
        out.xx += w[i] * (-c3 - hx[i] * hx[i]);
        out.tt += w[i] * -(lam[i] / x * ht[i] + ht[i] * ht[i]);
        out.xt += w[i] * ht[i] * (lam[i] * t / (x * x) - hx[i]);
        var_hx += w[i] * (hx[i] - out.x).powi(2);
        curv += w[i] * c3;
    }
    out.xx_plus_x_sq = -curv - var_hx;
    Ok(out)
}

/// `F` and its partial derivatives at `(x, t)`.
pub fn continuum_partials(p: &ModelParams, x: f64, t: f64) -> Result<Partials> {
    let s = scaled_partials(p, x, t)?;
    let q = s.survival;
    Ok(Partials {
        f: s.f,
        f_x: s.x * q,
        f_t: s.t * q,
        f_xx: s.xx * q,
        f_tt: s.tt * q,
        f_xt: s.xt * q,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_approach_example() -> ModelParams {
        ModelParams::new(1.0, 0.75, 0.5, 2.0, 1.0, 0.1).unwrap()
    }

    #[test]
    fn survival_values() {
        let p = two_approach_example();
        assert_eq!(survival(&p, Difficulty::Easy, 0.0).unwrap(), 1.0);
        assert!((survival(&p, Difficulty::Easy, 1.05995).unwrap() - 0.340033).abs() < 5e-7);
        assert!((survival(&p, Difficulty::Easy, 1e4).unwrap() - 0.25).abs() < 1e-15);
        assert!(survival(&p, Difficulty::Easy, -1.0).is_err());
    }

    #[test]
    fn interim_belief_values() {
        let p = two_approach_example();
        assert_eq!(interim_belief(&p, 1.0, 0.0).unwrap(), 0.75);
        assert!((interim_belief(&p, 1.0, 1.0).unwrap() - 0.524633).abs() < 5e-7);
        assert!(interim_belief(&p, 1.0, 1e4).unwrap() < 1e-300);
    }

    #[test]
    fn continuum_belief_moves_toward_hard() {
        let p = two_approach_example();
        assert_eq!(continuum_difficulty_belief(&p, 0.0, 1.0).unwrap(), 0.5);
        let (x, t): (f64, f64) = (2.0, 3.0);
        let se = (-0.75 * x * (1.0 - (-2.0 * t / x).exp())).exp();
        let sh = (-0.75 * x * (1.0 - (-t / x).exp())).exp();
        let v = continuum_difficulty_belief(&p, x, t).unwrap();
        assert!((v - sh / (sh + se)).abs() < 1e-14);
        assert!(v > 0.5);
    }

    #[test]
    fn two_arm_belief_value() {
        let p = ModelParams::new(1.0, 0.5, 0.5, 2.0, 1.0, 0.1).unwrap();
        let v = two_arm_validity_belief(&p, 1.0, 0.0).unwrap();
        assert!((v - 0.201_027_390_699_394_4).abs() < 1e-14, "{v}");
        assert_eq!(two_arm_validity_belief(&p, 0.0, 0.0).unwrap(), 0.5);
    }

    #[test]
    fn phi_boundary_values() {
        let p = two_approach_example();
        for theta in Difficulty::BOTH {
            let want = (p.r() + p.lambda(theta) * p.nu0()) * p.c();
            assert!((phi(&p, theta, 0.0).unwrap() - want).abs() < 1e-15);
        }
        let q = ModelParams::new(1.0, 0.75, 0.5, 2.0, 0.0, 0.1).unwrap();
        for k in [0.0, 0.5, 3.0, 40.0] {
            assert!((phi(&q, Difficulty::Hard, k).unwrap() - 0.1).abs() < 1e-15);
        }
    }

    #[test]
    fn phi_derivative_matches_difference() {
        for k in [0.01, 0.5, 1.3, 4.0] {
            let (_, d) = phi_parts(0.75, 2.0, 1.0, 0.1, k);
            let h = 1e-6;
            let fd = (phi_parts(0.75, 2.0, 1.0, 0.1, k + h).0 - phi_parts(0.75, 2.0, 1.0, 0.1, k - h).0) / (2.0 * h);
            assert!((d - fd).abs() < 1e-7, "{k}: {d} vs {fd}");
        }
    }

    #[test]
    fn general_phi_derivative_matches_difference() {
        let d = RateDistribution::new(vec![(0.0, 0.3), (0.7, 0.3), (2.5, 0.4)]).unwrap();
        for k in [0.01, 0.5, 1.3, 4.0] {
            let (_, dv) = phi_general_parts(&d, 1.0, 0.1, k);
            let h = 1e-6;
            let fd = (phi_general_parts(&d, 1.0, 0.1, k + h).0 - phi_general_parts(&d, 1.0, 0.1, k - h).0) / (2.0 * h);
            assert!((dv - fd).abs() < 1e-7);
        }
    }

    #[test]
    fn rate_distribution_validation() {
        assert!(RateDistribution::new(vec![]).is_err());
        assert!(RateDistribution::new(vec![(1.0, 0.5), (1.0, 0.5)]).is_err());
        assert!(RateDistribution::new(vec![(1.0, 0.5), (2.0, 0.4)]).is_err());
        let d = RateDistribution::new(vec![(2.0, 0.5), (0.0, 0.5)]).unwrap();
        assert_eq!(d.atoms()[0].0, 0.0);
    }

    #[test]
    fn dominance() {
        let e = RateDistribution::two_point(0.75, 2.0).unwrap();
        let h = RateDistribution::two_point(0.75, 1.0).unwrap();
        assert!(e.dominates(&h));
        assert!(!h.dominates(&e));
    }

    #[test]
    fn cdf_conventions() {
        let p = two_approach_example();
        assert_eq!(continuum_cdf(&p, 0.0, 3.0).unwrap(), 0.0);
        assert_eq!(continuum_cdf(&p, 2.0, 0.0).unwrap(), 0.0);
        let limit = 1.0 - (-0.75f64 * 2.0).exp();
        assert!((continuum_cdf(&p, 2.0, 1e6).unwrap() - limit).abs() < 1e-12);
        let k = ModelParams::known(1.0, 0.85, 1.0, 0.5).unwrap();
        let want = 1.0 - (-0.85 * (1.0 - (-1f64).exp())).exp();
        assert!((continuum_cdf(&k, 1.0, 1.0).unwrap() - want).abs() < 1e-15);
    }

    #[test]
    fn params_reject_bad_ranges() {
        assert!(ModelParams::new(0.0, 0.5, 0.5, 1.0, 1.0, 0.1).is_err());
        assert!(ModelParams::new(1.0, 1.0, 0.5, 1.0, 1.0, 0.1).is_err());
        assert!(ModelParams::new(1.0, 0.5, 1.5, 1.0, 1.0, 0.1).is_err());
        assert!(ModelParams::new(1.0, 0.5, 0.5, 1.0, 2.0, 0.1).is_err());
        assert!(ModelParams::new(1.0, 0.5, 0.5, 1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn feasibility_rejects_equality() {
        let p = ModelParams::known(1.0, 0.5, 1.0, 0.25).unwrap();
        assert!(p.check_discrete_feasible().is_err());
        let q = ModelParams::known(1.0, 0.5, 1.0, 0.25 - 1e-15).unwrap();
        assert!(q.check_discrete_feasible().is_ok());
    }
}
