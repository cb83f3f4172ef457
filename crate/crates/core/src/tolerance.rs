//! Default numerical thresholds.
//!
//! Every threshold used by the library has a named default here. The CLI
//! exposes them through [`Tolerances`], which reports echo verbatim.

use serde::{Deserialize, Serialize};

/// Second singular value of `[x y]` relative to the first at or below which
/// the pair is treated as linearly dependent.
pub const DEPENDENCE: f64 = 1e-10;

/// Relative residual allowed on the 2-norm axioms.
pub const AXIOM: f64 = 1e-9;

/// Relative singular-value floor for rank and span decisions.
pub const RANK: f64 = 1e-10;

/// Relative test `|c·k| <= BOUNDEDNESS · |c| |k|` on kernel vectors.
pub const BOUNDEDNESS: f64 = 1e-10;

/// Relative agreement required between norm computations.
pub const NORM: f64 = 1e-6;

/// Slack on the extension interval, `s <= i + INTERVAL`.
pub const INTERVAL: f64 = 1e-6;

/// Stopping threshold on the improvement gained by one radius doubling.
pub const IMPROVEMENT: f64 = 1e-9;

/// Cap on the search radius, relative to the scale of the problem.
pub const RADIUS_CAP: f64 = 1e8;

/// Default evaluation budget of the direction-search norm oracle.
pub const ORACLE_BUDGET: usize = 10_000;

/// Agreement required between a recovered 2-norm and the direct value.
pub const DUALITY: f64 = 1e-4;

/// Tail threshold of the finite-window convergence tests.
pub const CONVERGENCE: f64 = 1e-3;

/// Effective tolerances of a CLI run, overridable by name.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub dependence: f64,
    pub axiom: f64,
    pub norm: f64,
    pub interval: f64,
    pub duality: f64,
    pub convergence: f64,
    pub growth_factor: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            dependence: DEPENDENCE,
            axiom: AXIOM,
            norm: NORM,
            interval: INTERVAL,
            duality: DUALITY,
            convergence: CONVERGENCE,
            growth_factor: crate::ubp::DEFAULT_GROWTH_FACTOR,
        }
    }
}

impl Tolerances {
    /// Applies a `name=value` override.
    pub fn set(&mut self, assignment: &str) -> Result<(), String> {
        let (name, value) = assignment
            .split_once('=')
            .ok_or_else(|| format!("expected NAME=VALUE, got `{assignment}`"))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| format!("tolerance `{name}`: `{value}` is not a number"))?;
        if !(value.is_finite() && value > 0.0) {
            return Err(format!("tolerance `{name}` must be positive and finite"));
        }
        let slot = match name.trim() {
            "dependence" => &mut self.dependence,
            "axiom" => &mut self.axiom,
            "norm" => &mut self.norm,
            "interval" => &mut self.interval,
            "duality" => &mut self.duality,
            "convergence" => &mut self.convergence,
            "growth_factor" => &mut self.growth_factor,
            other => return Err(format!("unknown tolerance `{other}`")),
        };
        *slot = value;
        Ok(())
    }
}
