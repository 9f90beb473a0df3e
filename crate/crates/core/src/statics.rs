//! Parameter sweeps and the equal-minus-asymmetric gap between regimes.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model;
use crate::params::{FunctionFamily, PolityParams};
use crate::solver::{solve, EquilibriumSolution, Regime};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    NResidents,
    Selectorate,
    Coalition,
    BaseRevenue,
    TaxRate,
    PublicPrice,
    Discount,
    /// `ρ`, applied to every general-regime solve in the sweep.
    RetentionProbability,
}

impl SweepParameter {
    pub const ALL: [SweepParameter; 8] = [
        SweepParameter::NResidents,
        SweepParameter::Selectorate,
        SweepParameter::Coalition,
        SweepParameter::BaseRevenue,
        SweepParameter::TaxRate,
        SweepParameter::PublicPrice,
        SweepParameter::Discount,
        SweepParameter::RetentionProbability,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SweepParameter::NResidents => "n_residents",
            SweepParameter::Selectorate => "selectorate",
            SweepParameter::Coalition => "coalition",
            SweepParameter::BaseRevenue => "base_revenue",
            SweepParameter::TaxRate => "tax_rate",
            SweepParameter::PublicPrice => "public_price",
            SweepParameter::Discount => "discount",
            SweepParameter::RetentionProbability => "rho",
        }
    }

    fn apply(&self, base: &PolityParams, value: f64) -> PolityParams {
        let mut p = *base;
        match self {
            SweepParameter::NResidents => p.n_residents = value,
            SweepParameter::Selectorate => p.selectorate = value,
            SweepParameter::Coalition => p.coalition = value,
            SweepParameter::BaseRevenue => p.base_revenue = value,
            SweepParameter::TaxRate => p.tax_rate = value,
            SweepParameter::PublicPrice => p.public_price = value,
            SweepParameter::Discount => p.discount = value,
            SweepParameter::RetentionProbability => {}
        }
        p
    }
}

impl fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepParameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let alias = match s {
            "N" => "n_residents",
            "S" => "selectorate",
            "W" => "coalition",
            "R" => "base_revenue",
            "r" => "tax_rate",
            "p" => "public_price",
            "delta" => "discount",
            "retention_probability" => "rho",
            other => other,
        };
        SweepParameter::ALL
            .into_iter()
            .find(|p| p.name() == alias)
            .ok_or_else(|| Error::InvalidSweep(format!("unknown sweep parameter `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
    pub regimes: Vec<Regime>,
    pub base_params: PolityParams,
    pub fns: FunctionFamily,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.from.is_finite() && self.to.is_finite() && self.from < self.to) {
            return Err(Error::InvalidSweep(format!("need from < to, got {} and {}", self.from, self.to)));
        }
        if self.steps < 2 {
            return Err(Error::InvalidSweep(format!("need at least 2 steps, got {}", self.steps)));
        }
        if self.regimes.is_empty() {
            return Err(Error::InvalidSweep("no regimes requested".to_string()));
        }
        self.fns.validate().map_err(|e| Error::InvalidSweep(e.to_string()))?;
        // Every constraint is linear in the swept value, so checking the endpoints suffices.
        for value in [self.from, self.to] {
            let (params, regimes) = self.row_inputs(value);
            params.validate().map_err(|e| Error::InvalidSweep(format!("{} = {value}: {e}", self.parameter)))?;
            for regime in regimes {
                if let Regime::General { rho } = regime {
                    model::check_retention(&params, rho)
                        .map_err(|e| Error::InvalidSweep(format!("{} = {value}: {e}", self.parameter)))?;
                }
            }
        }
        Ok(())
    }

    /// Evenly spaced values with both endpoints included exactly.
    pub fn values(&self) -> Vec<f64> {
        let last = self.steps - 1;
        (0..self.steps)
            .map(|i| if i == last { self.to } else { self.from + (self.to - self.from) * (i as f64) / (last as f64) })
            .collect()
    }

    /// Parameters and regimes used for the row at `value`.
    pub fn row_inputs(&self, value: f64) -> (PolityParams, Vec<Regime>) {
        let params = self.parameter.apply(&self.base_params, value);
        let regimes = self
            .regimes
            .iter()
            .map(|r| match (self.parameter, r) {
                (SweepParameter::RetentionProbability, Regime::General { .. }) => Regime::General { rho: value },
                (_, other) => *other,
            })
            .collect();
        (params, regimes)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RowOutcome {
    pub regime: Regime,
    pub solution: Result<EquilibriumSolution>,
}

impl RowOutcome {
    /// The solution, if the solve succeeded and converged.
    pub fn converged(&self) -> Option<&EquilibriumSolution> {
        self.solution.as_ref().ok().filter(|s| s.diagnostics.converged)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub param_value: f64,
    pub params: PolityParams,
    pub outcomes: Vec<RowOutcome>,
}

impl SweepRow {
    pub fn find(&self, regime_name: &str) -> Option<&RowOutcome> {
        self.outcomes.iter().find(|o| o.regime.name() == regime_name)
    }
}

/// Per-row `equal − asymmetric` differences; `None` where either solve failed.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GapMetrics {
    pub public_gap: Vec<Option<f64>>,
    pub private_gap: Vec<Option<f64>>,
    pub discretionary_gap: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub parameter: SweepParameter,
    pub regimes: Vec<Regime>,
    pub rows: Vec<SweepRow>,
    pub gaps: GapMetrics,
}

impl SweepResult {
    /// Number of row solves that errored or did not converge.
    pub fn failures(&self) -> usize {
        self.rows.iter().flat_map(|r| r.outcomes.iter()).filter(|o| o.converged().is_none()).count()
    }
}

fn gap_metrics(rows: &[SweepRow]) -> GapMetrics {
    let mut gaps = GapMetrics::default();
    for row in rows {
        let pair = row
            .find("equal")
            .and_then(RowOutcome::converged)
            .zip(row.find("asymmetric").and_then(RowOutcome::converged));
        let diff = |f: fn(&EquilibriumSolution) -> f64| pair.map(|(e, a)| f(e) - f(a));
        gaps.public_gap.push(diff(|s| s.allocation.public_goods));
        gaps.private_gap.push(diff(|s| s.allocation.private_goods));
        gaps.discretionary_gap.push(diff(|s| s.discretionary_resources));
    }
    gaps
}

/// Solves every regime at every swept value. Failed solves are recorded in their
/// row and do not stop the sweep.
pub fn sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let rows: Vec<SweepRow> = spec
        .values()
        .into_iter()
        .map(|value| {
            let (params, regimes) = spec.row_inputs(value);
            let outcomes = regimes
                .into_iter()
                .map(|regime| RowOutcome { regime, solution: solve(&params, &spec.fns, regime) })
                .collect();
            SweepRow { param_value: value, params, outcomes }
        })
        .collect();
    let gaps = gap_metrics(&rows);
    Ok(SweepResult { parameter: spec.parameter, regimes: spec.regimes.clone(), rows, gaps })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapTrend {
    pub first: f64,
    pub last: f64,
    /// Fraction of consecutive row pairs over which `|gap|` strictly shrinks.
    pub shrinking_fraction: f64,
    pub monotone_decay: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapDecayReport {
    pub rows_used: usize,
    pub public: GapTrend,
    pub private: GapTrend,
    pub discretionary: GapTrend,
}

/// Relative slack below which a change in `|gap|` counts as no change.
const SHRINK_TOL: f64 = 1e-12;

fn trend(series: &[f64]) -> GapTrend {
    let pairs = series.len() - 1;
    let shrinking = series.windows(2).filter(|w| w[1].abs() < w[0].abs() - SHRINK_TOL * w[0].abs().max(1.0)).count();
    GapTrend {
        first: series[0],
        last: series[series.len() - 1],
        shrinking_fraction: shrinking as f64 / pairs as f64,
        monotone_decay: shrinking == pairs,
    }
}

/// Summarises how the regime gap evolves along the sweep, over rows where both
/// the equal and asymmetric solves converged.
pub fn detect_gap_decay(result: &SweepResult) -> Result<GapDecayReport> {
    let has = |name: &str| result.regimes.iter().any(|r| r.name() == name);
    if !(has("equal") && has("asymmetric")) {
        return Err(Error::InsufficientRows("sweep must include both equal and asymmetric regimes".to_string()));
    }
    let g = &result.gaps;
    let (mut public, mut private, mut discretionary) = (Vec::new(), Vec::new(), Vec::new());
    for i in 0..g.public_gap.len() {
        if let (Some(a), Some(b), Some(c)) = (g.public_gap[i], g.private_gap[i], g.discretionary_gap[i]) {
            public.push(a);
            private.push(b);
            discretionary.push(c);
        }
    }
    if public.len() < 3 {
        return Err(Error::InsufficientRows(format!("need at least 3 rows with both regimes, found {}", public.len())));
    }
    Ok(GapDecayReport {
        rows_used: public.len(),
        public: trend(&public),
        private: trend(&private),
        discretionary: trend(&discretionary),
    })
}
