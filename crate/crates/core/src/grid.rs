//! Time grids for trajectory and contract evaluation.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Spacing of a generated time grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Log,
}

/// Strictly increasing, positive evaluation times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    times: Vec<f64>,
}

impl TimeGrid {
    pub fn new(times: Vec<f64>) -> Result<Self> {
        if times.is_empty() {
            return domain("time grid is empty");
        }
        if times.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
            return domain("grid times must be positive and finite");
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return domain("grid times must be strictly increasing");
        }
        Ok(Self { times })
    }

    pub fn build(t_min: f64, t_max: f64, points: usize, spacing: Spacing) -> Result<Self> {
        if points < 2 {
            return domain(format!("grid needs at least 2 points, got {points}"));
        }
        if !(t_min > 0.0 && t_max > t_min) {
            return domain(format!("grid needs 0 < t_min < t_max, got {t_min}, {t_max}"));
        }
        let n = points - 1;
        let times = (0..=n)
            .map(|i| {
                let s = i as f64 / n as f64;
                let t = match spacing {
                    Spacing::Linear => t_min + (t_max - t_min) * s,
                    Spacing::Log => (t_min.ln() + (t_max.ln() - t_min.ln()) * s).exp(),
                };
                if i == n {
                    t_max
                } else if i == 0 {
                    t_min
                } else {
                    t
                }
            })
            .collect();
        Self::new(times)
    }

    pub fn linear(t_min: f64, t_max: f64, points: usize) -> Result<Self> {
        Self::build(t_min, t_max, points, Spacing::Linear)
    }

    pub fn log(t_min: f64, t_max: f64, points: usize) -> Result<Self> {
        Self::build(t_min, t_max, points, Spacing::Log)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> f64 {
        self.times[self.times.len() - 1]
    }
}

impl Default for TimeGrid {
    fn default() -> Self {
        Self::log(1e-3, 100.0, 400).expect("default grid is valid")
    }
}
