//! Experiment catalog and the solver calls behind each entry.

use std::collections::BTreeMap;
use std::str::FromStr;

use brainstorm::contracts::{dynamic_contract_profit, extensive_margin_contract};
use brainstorm::continuum::continuum_payoff;
use brainstorm::discrete::{benchmark_residual, solve_learning_thresholds_until};
use brainstorm::model::{beliefs, continuum_difficulty_belief, two_arm_validity_belief, EffortState};
use brainstorm::policy::effort_profile;
use brainstorm::{
    agent_best_response, convergence_experiment, depth_limits, extensive_margin_learning_contract,
    gittins_objective, no_commitment_equilibrium, optimal_static_share, solve_benchmark_threshold,
    solve_dynamic_contract, solve_general_thresholds, solve_learning_thresholds, solve_trajectory, ModelParams,
    Threshold, ThresholdPolicy, TimeGrid,
};
use serde::Serialize;

use crate::config::ScenarioConfig;
use crate::error::CliError;
use crate::table::{Cell, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Benchmark,
    LearningThresholds,
    BeliefPath,
    Continuum,
    Convergence,
    StaticContract,
    DynamicContract,
    NoCommitment,
    ExtensiveMargin,
}

/// One catalog entry as printed by `brainstorm list`.
#[derive(Debug, Clone, Serialize)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub operation: &'static str,
    pub required_blocks: &'static [&'static str],
    pub optional_blocks: &'static [&'static str],
    pub reproduces: &'static str,
}

impl Experiment {
    pub const ALL: [Experiment; 9] = [
        Experiment::Benchmark,
        Experiment::LearningThresholds,
        Experiment::BeliefPath,
        Experiment::Continuum,
        Experiment::Convergence,
        Experiment::StaticContract,
        Experiment::DynamicContract,
        Experiment::NoCommitment,
        Experiment::ExtensiveMargin,
    ];

    pub fn name(self) -> &'static str {
        self.entry().name
    }

    pub fn required_blocks(self) -> &'static [&'static str] {
        self.entry().required_blocks
    }

    pub fn entry(self) -> CatalogEntry {
        use Experiment::*;
        let (name, operation, required, optional, reproduces): (_, _, &'static [&'static str], &'static [&'static str], _) =
            match self {
                Benchmark => (
                    "benchmark",
                    "solve_benchmark_threshold",
                    &["model"],
                    &["sweep"],
                    "known-difficulty threshold and its non-monotone response to the discount rate",
                ),
                LearningThresholds => (
                    "learning-thresholds",
                    "solve_learning_thresholds / solve_general_thresholds",
                    &["model"],
                    &["thresholds", "general_rates", "sweep"],
                    "threshold sequence and the beliefs at which new approaches are brainstormed",
                ),
                BeliefPath => (
                    "belief-path",
                    "optimal_belief_path / two_arm_validity_belief",
                    &["model", "grid"],
                    &["belief"],
                    "beliefs on the optimal effort path, or the two-approach posterior as the second effort varies",
                ),
                Continuum => (
                    "continuum",
                    "solve_trajectory",
                    &["model", "grid"],
                    &["sweep"],
                    "optimal breadth and depth in the continuum limit",
                ),
                Convergence => (
                    "convergence",
                    "convergence_experiment",
                    &["model", "grid", "convergence"],
                    &[],
                    "normalized approach counts of scaled discrete problems approaching the continuum breadth",
                ),
                StaticContract => (
                    "static-contract",
                    "optimal_static_share",
                    &["model", "grid"],
                    &["sweep"],
                    "optimal constant share and the exploration it induces",
                ),
                DynamicContract => (
                    "dynamic-contract",
                    "solve_dynamic_contract",
                    &["model", "grid"],
                    &["sweep"],
                    "optimal share path with commitment, its incentive term and distortion",
                ),
                NoCommitment => (
                    "no-commitment",
                    "no_commitment_equilibrium",
                    &["model", "grid"],
                    &[],
                    "stationary share without commitment and the breadth gap to the dynamic contract",
                ),
                ExtensiveMargin => (
                    "extensive-margin",
                    "extensive_margin_learning_contract",
                    &["model", "grid", "contract"],
                    &["sweep"],
                    "backloaded share when only the extensive margin of effort is contractible",
                ),
            };
        CatalogEntry { name, operation, required_blocks: required, optional_blocks: optional, reproduces }
    }
}

impl FromStr for Experiment {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| CliError::UnknownExperiment(s.to_string()))
    }
}

pub fn catalog() -> Vec<CatalogEntry> {
    Experiment::ALL.iter().map(|e| e.entry()).collect()
}

/// Tables, scalar results and invariant violations of one solver run.
#[derive(Debug, Default)]
pub struct Outcome {
    pub tables: Vec<Table>,
    pub summary: BTreeMap<String, f64>,
    pub violations: Vec<String>,
}

impl Outcome {
    fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        if !ok {
            self.violations.push(msg());
        }
    }
}

fn opt(v: Option<f64>) -> Cell {
    v.map_or(Cell::Empty, Cell::Float)
}

fn threshold_value(t: Threshold) -> f64 {
    t.finite().unwrap_or(f64::INFINITY)
}

/// Run `kind` once with parameters `p`.
pub fn run(kind: Experiment, cfg: &ScenarioConfig, p: &ModelParams) -> Result<Outcome, CliError> {
    let grid = cfg.time_grid()?;
    let tol = cfg.solver.root_tol;
    let mut out = Outcome::default();
    match kind {
        Experiment::Benchmark => {
            let k = solve_benchmark_threshold(p)?;
            let res = benchmark_residual(p, k)?;
            let mut t = Table::new("benchmark", &["threshold", "index_value", "residual"]);
            t.push(vec![k.into(), gittins_objective(p, k)?.into(), res.into()]);
            out.check(res.abs() <= tol, || format!("benchmark residual {res:e} exceeds {tol:e}"));
            out.tables.push(t);
        }
        Experiment::LearningThresholds => {
            let count = cfg.thresholds.map_or(10, |t| t.count);
            let (seq, beliefs) = match &cfg.general_rates {
                Some(g) => (solve_general_thresholds(&g.easy, &g.hard, p.r(), p.c(), p.delta0(), count)?, None),
                None => {
                    let s = solve_learning_thresholds(p, count)?;
                    let b = s.belief_thresholds(p);
                    (s, Some(b))
                }
            };
            let mut t = Table::new(
                "thresholds",
                &["n", "threshold", "brainstorm_time", "approach_belief", "hard_belief", "residual"],
            );
            for (i, k) in seq.thresholds.iter().enumerate() {
                let b = beliefs.as_ref().map(|b| b[i]);
                t.push(vec![
                    (i + 1).into(),
                    (*k).into(),
                    seq.brainstorm_times[i].into(),
                    opt(b.map(|b| b.0)),
                    opt(b.map(|b| b.1)),
                    seq.residuals[i].into(),
                ]);
            }
            if let Some(n) = seq.n_bar {
                out.summary.insert("n_bar".into(), n as f64);
            }
            out.summary.insert("known_easy_threshold".into(), threshold_value(seq.bracket.0));
            out.summary.insert("known_hard_threshold".into(), threshold_value(seq.bracket.1));
            for (i, r) in seq.residuals.iter().enumerate() {
                out.check(r.abs() <= tol, || format!("threshold {} residual {r:e} exceeds {tol:e}", i + 1));
            }
            out.check(seq.thresholds.windows(2).all(|w| w[1] > w[0]), || "thresholds not increasing".into());
            out.tables.push(t);
        }
        Experiment::BeliefPath => belief_path(cfg, p, &grid, &mut out)?,
        Experiment::Continuum => {
            let tr = solve_trajectory(p, &grid)?;
            let lim = depth_limits(p)?;
            let mut t = Table::new("trajectory", &["t", "breadth", "depth", "el_residual", "hard_belief"]);
            for i in 0..tr.len() {
                let (ti, x) = (tr.times[i], tr.breadth[i]);
                let b = continuum_difficulty_belief(p, x, ti)?;
                t.push(vec![ti.into(), x.into(), tr.depth[i].into(), tr.el_residual[i].into(), b.into()]);
            }
            out.summary.insert("initial_depth".into(), lim.d0);
            out.summary.insert("limit_depth".into(), lim.d_h);
            out.summary.insert("payoff".into(), continuum_payoff(p, &tr)?);
            let worst = tr.el_residual.iter().fold(0.0f64, |m, r| m.max(r.abs()));
            out.check(worst <= tol, || format!("Euler-Lagrange residual {worst:e} exceeds {tol:e}"));
            out.check(tr.depth.windows(2).all(|w| w[1] >= w[0]), || "depth decreases along the trajectory".into());
            out.check(
                tr.depth.iter().all(|&d| d >= lim.d0 * (1.0 - 1e-9) && d <= lim.d_h * (1.0 + 1e-9)),
                || "depth leaves its limits".into(),
            );
            out.tables.push(t);
        }
        Experiment::Convergence => {
            let ns = &cfg.convergence.as_ref().expect("validated").n_values;
            let rep = convergence_experiment(p, ns, &grid)?;
            let x_end = *rep.continuum.breadth.last().expect("nonempty grid");
            let mut t = Table::new("convergence", &["n", "sup_gap", "relative_gap", "thresholds"]);
            for row in &rep.rows {
                t.push(vec![
                    Cell::Int(row.n as i64),
                    opt(row.sup_gap),
                    opt(row.sup_gap.map(|g| g / x_end)),
                    row.thresholds.into(),
                ]);
                if let Some(f) = &row.failure {
                    out.violations.push(format!("n={}: {f}", row.n));
                }
            }
            let gaps: Vec<f64> = rep.rows.iter().filter_map(|r| r.sup_gap).collect();
            out.check(gaps.windows(2).all(|w| w[1] < w[0]), || format!("gaps not decreasing in n: {gaps:?}"));
            out.summary.insert("continuum_breadth_at_end".into(), x_end);
            out.tables.push(t);
        }
        Experiment::StaticContract => {
            let st = optimal_static_share(p)?;
            let tr = agent_best_response(p, st.alpha, &grid)?;
            let mut t = Table::new("static_contract", &["t", "breadth", "depth"]);
            for i in 0..tr.len() {
                t.push(vec![tr.times[i].into(), tr.breadth[i].into(), tr.depth[i].into()]);
            }
            let dynamic = dynamic_contract_profit(p)?;
            out.summary.insert("share".into(), st.alpha);
            out.summary.insert("profit".into(), st.payoff);
            out.summary.insert("dynamic_profit".into(), dynamic);
            out.check(dynamic >= st.payoff - cfg.solver.integral_tol, || {
                format!("dynamic profit {dynamic} below static profit {}", st.payoff)
            });
            out.tables.push(t);
        }
        Experiment::DynamicContract => {
            let c = solve_dynamic_contract(p, &grid)?;
            let mut t = Table::new(
                "dynamic_contract",
                &[
                    "t",
                    "share",
                    "breadth",
                    "first_best_breadth",
                    "incentive",
                    "distortion",
                    "law_residual",
                    "costate",
                    "hard_belief",
                ],
            );
            for i in 0..c.times.len() {
                let b = continuum_difficulty_belief(p, c.x_alpha[i], c.times[i])?;
                t.push(
                    [
                        c.times[i],
                        c.alpha[i],
                        c.x_alpha[i],
                        c.x_first_best[i],
                        c.incentive[i],
                        c.distortion[i],
                        c.law_residual[i],
                        c.costate[i],
                        b,
                    ]
                    .map(Cell::Float)
                    .to_vec(),
                );
            }
            for &i in &c.violations {
                out.violations.push(format!("share {} outside [0, 1] at t={}", c.alpha[i], c.times[i]));
            }
            if p.lambda_e() == p.lambda_h() {
                out.check(c.alpha.windows(2).all(|w| w[1] < w[0]), || "known-difficulty share not decreasing".into());
                out.check(c.distortion.iter().all(|d| *d <= 0.0), || "positive distortion with known difficulty".into());
                out.check(c.x_alpha.iter().zip(&c.x_first_best).all(|(a, b)| a < b), || {
                    "contract breadth not below first best".into()
                });
            }
            out.summary.insert("share_start".into(), c.alpha[0]);
            out.summary.insert("share_end".into(), *c.alpha.last().expect("nonempty grid"));
            out.summary.insert("share_limit".into(), p.c() / p.nu0());
            out.tables.push(t);
        }
        Experiment::NoCommitment => {
            let nc = no_commitment_equilibrium(p)?;
            let c = solve_dynamic_contract(p, &grid)?;
            let mut t = Table::new("no_commitment", &["t", "breadth", "dynamic_breadth", "breadth_gap"]);
            for (ti, xd) in c.times.iter().zip(&c.x_alpha) {
                let x = ti / nc.depth;
                t.push(vec![(*ti).into(), x.into(), (*xd).into(), (xd - x).into()]);
            }
            out.summary.insert("share".into(), nc.alpha);
            out.summary.insert("depth".into(), nc.depth);
            out.summary.insert("profit".into(), nc.payoff);
            out.check(nc.alpha > p.c() / p.nu0() && nc.alpha < 1.0, || format!("share {} outside (c/nu0, 1)", nc.alpha));
            out.tables.push(t);
        }
        Experiment::ExtensiveMargin => {
            let gamma = cfg.contract.expect("validated").gamma;
            let path = extensive_margin_learning_contract(p.lambda_e(), p.lambda_h(), gamma, p.r(), p.delta0(), &grid)?;
            let mut t = Table::new("extensive_margin", &["t", "share"]);
            for (ti, a) in path.times.iter().zip(&path.alpha) {
                t.push(vec![(*ti).into(), (*a).into()]);
            }
            out.summary.insert("share_start".into(), path.initial);
            out.summary.insert("easy_share".into(), extensive_margin_contract(p.lambda_e(), gamma, p.r())?);
            out.summary.insert("hard_share".into(), extensive_margin_contract(p.lambda_h(), gamma, p.r())?);
            out.check(path.alpha.windows(2).all(|w| w[1] >= w[0]), || "share path decreases".into());
            out.tables.push(t);
        }
    }
    Ok(out)
}

fn belief_path(cfg: &ScenarioConfig, p: &ModelParams, grid: &TimeGrid, out: &mut Outcome) -> Result<(), CliError> {
    let opts = cfg.belief.unwrap_or(crate::config::BeliefConfig { arms: 3, first_effort: None });
    if let Some(k1) = opts.first_effort {
        let mut t = Table::new("two_arm_belief", &["second_effort", "first_belief", "second_belief", "hard_belief"]);
        for &k2 in grid.times() {
            let b = beliefs(p, &EffortState::new(vec![k1, k2])?);
            t.push(vec![k2.into(), two_arm_validity_belief(p, k1, k2)?.into(), b.arm_beliefs[1].into(), b.difficulty_belief.into()]);
        }
        out.tables.push(t);
        return Ok(());
    }
    let t_max = grid.last();
    let seq = solve_learning_thresholds_until(p, usize::MAX, |j, k| j as f64 * k > t_max)?;
    let policy = ThresholdPolicy::finite(seq.thresholds.clone())?;
    let profile = effort_profile(&policy, t_max);
    let mut columns = vec!["t".to_string(), "approaches".into(), "active".into()];
    columns.extend((1..=opts.arms).map(|i| format!("belief_{i}")));
    columns.push("hard_belief".into());
    let names: Vec<&str> = columns.iter().map(String::as_str).collect();
    let mut t = Table::new("belief_path", &names);
    for &ti in grid.times() {
        let seg = profile
            .segment_at(ti)
            .ok_or_else(|| CliError::Solver(format!("effort profile does not cover t={ti}")))?;
        let efforts = seg.efforts_at(ti);
        let n = efforts.len();
        let b = beliefs(p, &EffortState::new(efforts)?);
        let mut row: Vec<Cell> = vec![ti.into(), n.into(), seg.active.len().into()];
        row.extend((0..opts.arms).map(|i| opt(b.arm_beliefs.get(i).copied())));
        row.push(b.difficulty_belief.into());
        t.push(row);
    }
    for (i, b) in profile.brainstorms.iter().enumerate().skip(1) {
        if *b <= t_max {
            out.summary.insert(format!("brainstorm_time_{}", i + 1), *b);
        }
    }
    for (i, s) in profile.segments.iter().enumerate().skip(1) {
        if s.start <= t_max && s.active.len() > 1 && profile.segments[i - 1].active.len() == 1 {
            out.summary.insert(format!("split_start_{i}"), s.start);
        }
    }
    out.tables.push(t);
    Ok(())
}
