//! Exact evaluation of threshold policies: induced effort profile,
//! breakthrough-time distribution and expected discounted payoff.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_nonneg, domain, Error, Result};
use crate::model::{Difficulty, ModelParams, RateDistribution};

/// What happens after the listed thresholds run out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tail {
    /// No further approaches: the last one brainstormed is worked with the
    /// others forever.
    Stop,
    /// Every later threshold equals the last listed one.
    Stationary,
}

/// Effort thresholds: approach `n + 1` is brainstormed once every one of the
/// first `n` approaches has effort at least `K_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdPolicy {
    thresholds: Vec<f64>,
    tail: Tail,
}

impl ThresholdPolicy {
    pub fn new(thresholds: Vec<f64>, tail: Tail) -> Result<Self> {
        for &k in &thresholds {
            if !k.is_finite() {
                return domain("thresholds must be finite; use Tail::Stop to end brainstorming");
            }
            check_nonneg("threshold", k)?;
        }
        if tail == Tail::Stationary && thresholds.is_empty() {
            return domain("a stationary tail needs at least one threshold");
        }
        Ok(Self { thresholds, tail })
    }

    /// Policy that brainstorms `thresholds.len() + 1` approaches in total.
    pub fn finite(thresholds: Vec<f64>) -> Result<Self> {
        Self::new(thresholds, Tail::Stop)
    }

    /// Policy that repeats the last threshold forever.
    pub fn stationary(thresholds: Vec<f64>) -> Result<Self> {
        Self::new(thresholds, Tail::Stationary)
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    pub fn tail(&self) -> Tail {
        self.tail
    }

    /// Maximum number of approaches, if finite.
    pub fn horizon(&self) -> Option<usize> {
        match self.tail {
            Tail::Stop => Some(self.thresholds.len() + 1),
            Tail::Stationary => None,
        }
    }

    /// Threshold governing the brainstorm of approach `n + 1`.
    fn threshold(&self, n: usize) -> Option<f64> {
        if n == 0 {
            return Some(0.0);
        }
        match self.thresholds.get(n - 1) {
            Some(&k) => Some(k),
            None => match self.tail {
                Tail::Stop => None,
                Tail::Stationary => self.thresholds.last().copied(),
            },
        }
    }
}

/// Interval on which a fixed set of approaches shares effort equally.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub start: f64,
    pub end: f64,
    /// Efforts of all approaches brainstormed so far, at `start`.
    pub efforts: Vec<f64>,
    /// Approaches receiving effort, all at the common lowest level.
    pub active: Vec<usize>,
}

impl Segment {
    pub fn efforts_at(&self, t: f64) -> Vec<f64> {
        let mut e = self.efforts.clone();
        let share = (t - self.start) / self.active.len() as f64;
        for &i in &self.active {
            e[i] += share;
        }
        e
    }
}

/// Piecewise-linear effort profile induced by a policy.
#[derive(Debug, Clone, PartialEq)]
pub struct EffortProfile {
    pub segments: Vec<Segment>,
    /// Calendar time at which each approach was brainstormed.
    pub brainstorms: Vec<f64>,
}

impl EffortProfile {
    /// Segment containing `t`, preferring the later one at a boundary.
    pub fn segment_at(&self, t: f64) -> Option<&Segment> {
        let idx = self.segments.partition_point(|s| s.end <= t);
        self.segments.get(idx).filter(|s| s.start <= t)
    }

    /// Efforts on every approach brainstormed by time `t`.
    pub fn efforts_at(&self, t: f64) -> Option<Vec<f64>> {
        self.segment_at(t).map(|s| s.efforts_at(t))
    }

    pub fn covered_until(&self) -> f64 {
        self.segments.last().map_or(0.0, |s| s.end)
    }
}

enum Stop {
    Time(f64),
    Approaches(usize),
}

fn simulate(policy: &ThresholdPolicy, stop: Stop) -> EffortProfile {
    let mut efforts: Vec<f64> = Vec::new();
    let mut t = 0.0;
    let mut segments = Vec::new();
    let mut brainstorms = Vec::new();
    loop {
        let n = efforts.len();
        let lowest = efforts.iter().cloned().fold(f64::INFINITY, f64::min);
        let k = policy.threshold(n);
        if let Some(k) = k {
            if n == 0 || lowest >= k {
                if let Stop::Approaches(m) = stop {
                    if n == m {
                        break;
                    }
                }
                efforts.push(0.0);
                brainstorms.push(t);
                continue;
            }
        }
        let active: Vec<usize> = (0..n).filter(|&i| efforts[i] == lowest).collect();
        let next_level = efforts
            .iter()
            .cloned()
            .filter(|&e| e > lowest)
            .fold(f64::INFINITY, f64::min);
        let target = next_level.min(k.unwrap_or(f64::INFINITY));
        let end = if target.is_finite() {
            t + (target - lowest) * active.len() as f64
        } else {
            f64::INFINITY
        };
        segments.push(Segment { start: t, end, efforts: efforts.clone(), active: active.clone() });
        if !end.is_finite() {
            break;
        }
        for &i in &active {
            efforts[i] = target;
        }
        t = end;
        if let Stop::Time(limit) = stop {
            if t > limit {
                break;
            }
        }
    }
    EffortProfile { segments, brainstorms }
}

/// Effort profile covering at least `[0, until]`.
pub fn effort_profile(policy: &ThresholdPolicy, until: f64) -> EffortProfile {
    simulate(policy, Stop::Time(until))
}

/// Discounted-payoff evaluator for a two-state mixture of rate distributions.
#[derive(Debug, Clone)]
pub struct Environment {
    states: Vec<(f64, RateDistribution)>,
    r: f64,
    c: f64,
}

impl Environment {
    pub fn new(states: Vec<(f64, RateDistribution)>, r: f64, c: f64) -> Result<Self> {
        if !(r > 0.0) {
            return domain("r must be positive");
        }
        if !(c > 0.0) {
            return domain("c must be positive");
        }
        let total: f64 = states.iter().map(|s| s.0).sum();
        if (total - 1.0).abs() > 1e-12 || states.iter().any(|s| s.0 < 0.0) {
            return domain("state priors must be nonnegative and sum to 1");
        }
        Ok(Self { states, r, c })
    }

    pub fn from_params(p: &ModelParams) -> Self {
        let states = Difficulty::BOTH
            .iter()
            .map(|&th| {
                (p.prior(th), RateDistribution::two_point(p.nu0(), p.lambda(th)).expect("valid params"))
            })
            .collect();
        Self { states, r: p.r(), c: p.c() }
    }

    pub fn general(
        g_e: &RateDistribution,
        g_h: &RateDistribution,
        delta0: f64,
        r: f64,
        c: f64,
    ) -> Result<Self> {
        Self::new(vec![(1.0 - delta0, g_e.clone()), (delta0, g_h.clone())], r, c)
    }

    pub fn with_cost(&self, c: f64) -> Self {
        Self { states: self.states.clone(), r: self.r, c }
    }

    pub fn state(&self, i: usize) -> &RateDistribution {
        &self.states[i].1
    }

    /// Expected discounted payoff of `policy`.
    pub fn payoff(&self, policy: &ThresholdPolicy) -> Result<f64> {
        let m = policy.thresholds.len();
        let profile = match policy.tail {
            Tail::Stop => simulate(policy, Stop::Time(f64::INFINITY)),
            Tail::Stationary => simulate(policy, Stop::Approaches(m + 1)),
        };
        let mut total = 0.0;
        for (prior, dist) in &self.states {
            if *prior == 0.0 {
                continue;
            }
            total += prior * self.state_payoff(dist, policy, &profile)?;
        }
        Ok(total)
    }

    fn state_payoff(&self, dist: &RateDistribution, policy: &ThresholdPolicy, profile: &EffortProfile) -> Result<f64> {
        let r = self.r;
        let mut value = 0.0;
        for seg in &profile.segments {
            let mut fixed = 1.0;
            for (i, &e) in seg.efforts.iter().enumerate() {
                if !seg.active.contains(&i) {
                    fixed *= dist.survival(e);
                }
            }
            let e0 = seg.efforts[seg.active[0]];
            let dur = seg.end - seg.start;
            let integral = power_success_integral(dist, e0, seg.active.len(), dur, r);
            value += (-r * seg.start).exp() * fixed * integral;
        }
        let q_at = |t: f64| -> f64 {
            match profile.efforts_at(t) {
                Some(e) => e.iter().map(|&k| dist.survival(k)).product(),
                None => {
                    // brainstorm exactly at the end of the covered profile
                    let last = profile.segments.last().expect("nonempty profile");
                    last.efforts_at(t).iter().map(|&k| dist.survival(k)).product()
                }
            }
        };
        for &tb in &profile.brainstorms {
            value -= self.c * (-r * tb).exp() * if tb == 0.0 { 1.0 } else { q_at(tb) };
        }
        if policy.tail == Tail::Stationary {
            let k = *policy.thresholds.last().expect("stationary tail has a threshold");
            let tb = profile.covered_until();
            let q = if profile.segments.is_empty() { 1.0 } else { q_at(tb) };
            let denom = 1.0 - (-r * k).exp() * dist.survival(k);
            if !(denom > 1e-300) {
                return Err(Error::Evaluation(format!(
                    "stationary continuation at threshold {k} does not converge"
                )));
            }
            let gain: f64 = dist
                .atoms()
                .iter()
                .map(|&(l, w)| w * l / (l + r) * -(-(l + r) * k).exp_m1())
                .sum();
            value += (-r * tb).exp() * q * (-self.c + gain) / denom;
        }
        Ok(value)
    }

    /// Probability of a breakthrough by time `t` in state `state`.
    pub fn cdf(&self, state: usize, policy: &ThresholdPolicy, t: f64) -> Result<f64> {
        check_nonneg("time", t)?;
        let profile = effort_profile(policy, t);
        let efforts = profile
            .efforts_at(t)
            .ok_or_else(|| Error::Range(format!("profile does not cover t={t}")))?;
        let dist = &self.states[state].1;
        Ok(1.0 - efforts.iter().map(|&k| dist.survival(k)).product::<f64>())
    }
}

/// `int_0^D e^{-ru} (-d/du) S(e0 + u/m)^m du` in closed form, by expanding the
/// power multinomially into a sum of exponentials.
fn power_success_integral(dist: &RateDistribution, e0: f64, m: usize, dur: f64, r: f64) -> f64 {
    let atoms = dist.atoms();
    let log_a: Vec<f64> = atoms.iter().map(|&(l, w)| w.ln() - l * e0).collect();
    let rates: Vec<f64> = atoms.iter().map(|&(l, _)| l / m as f64).collect();
    let mut log_fact = vec![0.0; m + 1];
    for i in 1..=m {
        log_fact[i] = log_fact[i - 1] + (i as f64).ln();
    }
    let mut total = 0.0;
    let mut counts = vec![0usize; atoms.len()];
    fn rec(
        idx: usize,
        left: usize,
        counts: &mut Vec<usize>,
        ctx: &(&[f64], &[f64], &[f64], usize, f64, f64),
        total: &mut f64,
    ) {
        let (log_a, rates, log_fact, m, dur, r) = *ctx;
        if idx == counts.len() - 1 {
            counts[idx] = left;
            let mut lc = log_fact[m];
            let mut beta = 0.0;
            for (j, &k) in counts.iter().enumerate() {
                if k > 0 {
                    lc += k as f64 * log_a[j] - log_fact[k];
                    beta += k as f64 * rates[j];
                }
            }
            if beta > 0.0 {
                let frac = if dur.is_finite() { -(-(r + beta) * dur).exp_m1() } else { 1.0 };
                *total += lc.exp() * beta * frac / (r + beta);
            }
            return;
        }
        for k in 0..=left {
            counts[idx] = k;
            rec(idx + 1, left - k, counts, ctx, total);
        }
    }
    let ctx = (&log_a[..], &rates[..], &log_fact[..], m, dur, r);
    rec(0, m, &mut counts, &ctx, &mut total);
    total
}

/// Probability of a breakthrough by time `t` in state `theta`.
pub fn breakthrough_cdf(p: &ModelParams, policy: &ThresholdPolicy, theta: Difficulty, t: f64) -> Result<f64> {
    let idx = match theta {
        Difficulty::Easy => 0,
        Difficulty::Hard => 1,
    };
    Environment::from_params(p).cdf(idx, policy, t)
}

/// Expected discounted payoff net of survival-weighted brainstorm costs.
pub fn policy_payoff(p: &ModelParams, policy: &ThresholdPolicy) -> Result<f64> {
    Environment::from_params(p).payoff(policy)
}

/// Outcome of an exhaustive threshold search.
#[derive(Debug, Clone, PartialEq)]
pub struct BruteForce {
    pub policy: ThresholdPolicy,
    pub payoff: f64,
}

/// Payoff-maximizing nondecreasing threshold vector of length `n_arms` over
/// `grid`, with the continuation after the last threshold given by `tail`.
///
/// Up to four thresholds are searched exhaustively in parallel; longer vectors
/// use coordinate ascent from the best constant vector. Ties go to the
/// lexicographically smallest vector.
pub fn brute_force_thresholds(
    env: &Environment,
    n_arms: usize,
    grid: &[f64],
    tail: Tail,
) -> Result<BruteForce> {
    if grid.is_empty() {
        return domain("threshold grid is empty");
    }
    if n_arms == 0 {
        return domain("need at least one threshold");
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) || grid[0] < 0.0 {
        return domain("threshold grid must be nonnegative and strictly increasing");
    }
    let eval = |idx: &[usize]| -> f64 {
        let ks = idx.iter().map(|&i| grid[i]).collect();
        ThresholdPolicy::new(ks, tail)
            .and_then(|pol| env.payoff(&pol))
            .unwrap_or(f64::NEG_INFINITY)
    };
    let better = |a: &(f64, Vec<usize>), b: &(f64, Vec<usize>)| a.0 > b.0 || (a.0 == b.0 && a.1 < b.1);
    let best = if n_arms <= 4 {
        (0..grid.len())
            .into_par_iter()
            .map(|first| {
                let mut best = (f64::NEG_INFINITY, vec![first; n_arms]);
                let mut idx = vec![first; n_arms];
                loop {
                    let cand = (eval(&idx), idx.clone());
                    if better(&cand, &best) {
                        best = cand;
                    }
                    // next nondecreasing tuple with fixed first index
                    let mut pos = n_arms - 1;
                    loop {
                        if pos == 0 {
                            return best;
                        }
                        if idx[pos] + 1 < grid.len() {
                            idx[pos] += 1;
                            let v = idx[pos];
                            for q in idx.iter_mut().skip(pos + 1) {
                                *q = v;
                            }
                            break;
                        }
                        pos -= 1;
                    }
                }
            })
            .reduce(|| (f64::NEG_INFINITY, vec![usize::MAX; n_arms]), |a, b| if better(&b, &a) { b } else { a })
    } else {
        let mut best = (0..grid.len())
            .map(|i| (eval(&vec![i; n_arms]), vec![i; n_arms]))
            .fold((f64::NEG_INFINITY, vec![0; n_arms]), |a, b| if better(&b, &a) { b } else { a });
        loop {
            let before = best.0;
            for pos in 0..n_arms {
                let lo = if pos == 0 { 0 } else { best.1[pos - 1] };
                let hi = if pos + 1 == n_arms { grid.len() - 1 } else { best.1[pos + 1] };
                for i in lo..=hi {
                    let mut idx = best.1.clone();
                    idx[pos] = i;
                    let cand = (eval(&idx), idx);
                    if better(&cand, &best) {
                        best = cand;
                    }
                }
            }
            if best.0 <= before {
                break;
            }
        }
        best
    };
    if !best.0.is_finite() {
        return Err(Error::Evaluation("no threshold vector on the grid could be evaluated".into()));
    }
    Ok(BruteForce {
        policy: ThresholdPolicy::new(best.1.iter().map(|&i| grid[i]).collect(), tail)?,
        payoff: best.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn known() -> ModelParams {
        ModelParams::known(1.0, 0.75, 1.0, 0.2).unwrap()
    }

    #[test]
    fn single_approach_forever() {
        let p = known();
        let pol = ThresholdPolicy::finite(vec![]).unwrap();
        let v = policy_payoff(&p, &pol).unwrap();
        assert!((v - (-0.2 + 0.75 * 0.5)).abs() < 1e-15);
        for t in [0.0, 0.7, 3.0] {
            let f = breakthrough_cdf(&p, &pol, Difficulty::Easy, t).unwrap();
            assert!((f - 0.75 * (1.0 - (-t).exp())).abs() < 1e-15);
        }
    }

    #[test]
    fn two_arms_equalized() {
        let p = known();
        let k1 = 0.8;
        let pol = ThresholdPolicy::finite(vec![k1]).unwrap();
        let f = breakthrough_cdf(&p, &pol, Difficulty::Easy, 2.0 * k1).unwrap();
        let s = crate::model::survival(&p, Difficulty::Easy, k1).unwrap();
        assert!((f - (1.0 - s * s)).abs() < 1e-15);
    }

    #[test]
    fn constant_policy_matches_geometric_series() {
        let p = known();
        let k: f64 = 1.3;
        let pol = ThresholdPolicy::stationary(vec![k]).unwrap();
        let v = policy_payoff(&p, &pol).unwrap();
        let s = 0.25 + 0.75 * (-k).exp();
        let gain = 0.75 * 0.5 * (1.0 - (-2.0 * k).exp());
        let mut series = 0.0;
        for j in 0..400 {
            series += ((-k).exp() * s).powi(j) * (-0.2 + gain);
        }
        assert!((v - series).abs() < 1e-14, "{v} vs {series}");
    }

    #[test]
    fn zero_threshold_stationary_diverges() {
        let p = ModelParams::new(1.0, 0.75, 0.5, 2.0, 0.0, 0.1).unwrap();
        let pol = ThresholdPolicy::stationary(vec![0.0]).unwrap();
        assert!(matches!(policy_payoff(&p, &pol), Err(Error::Evaluation(_))));
    }

    #[test]
    fn non_monotone_profile_water_fills() {
        let pol = ThresholdPolicy::finite(vec![1.0, 0.5]).unwrap();
        let prof = effort_profile(&pol, 10.0);
        assert_eq!(prof.brainstorms, vec![0.0, 1.0, 1.5]);
        let e = prof.efforts_at(2.5).unwrap();
        assert_eq!(e, vec![1.0, 0.75, 0.75]);
        let e = prof.efforts_at(4.0).unwrap();
        assert!((e[0] - 4.0 / 3.0).abs() < 1e-15 && (e[1] - e[0]).abs() < 1e-15);
    }

    #[test]
    fn increasing_profile_shape() {
        let pol = ThresholdPolicy::finite(vec![1.0, 1.2]).unwrap();
        let prof = effort_profile(&pol, 10.0);
        assert_eq!(prof.brainstorms, vec![0.0, 1.0, 2.4]);
        assert_eq!(prof.segment_at(1.5).unwrap().active, vec![1]);
        assert_eq!(prof.segment_at(2.1).unwrap().active, vec![0, 1]);
        assert_eq!(prof.segment_at(2.5).unwrap().active, vec![2]);
    }

    #[test]
    fn empty_grid_rejected() {
        let env = Environment::from_params(&known());
        assert!(brute_force_thresholds(&env, 2, &[], Tail::Stop).is_err());
    }
}
