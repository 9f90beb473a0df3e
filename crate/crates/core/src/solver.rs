//! Equilibrium allocations for each uncertainty regime.
//!
//! Each program is reduced to a single bracketed root in `s = √g`:
//!
//! * challenger / equal regime: the first-order condition along the binding
//!   budget `z = (R + N·r·φ(g) − p·g)/W`;
//! * asymmetric / general regime: the leader's first-order condition along the
//!   binding retention constraint `u(z) = κ·(V̂ − v(g))`.
//!
//! Both reduced residuals are multiplied by `z^(1−α_u)/α_u > 0`, which keeps them
//! finite where `z → 0` without moving the root. The bracket runs from the
//! public-goods level where `N·r·φ_g(g) = p` (residual positive) to the point
//! where `z` reaches zero (residual negative).

use std::fmt;

use crate::error::{Error, Result};
use crate::model;
use crate::params::{Allocation, Benchmark, FunctionFamily, PolityParams};
use crate::root::{brent, RootOptions, MAX_ITERATIONS};

/// Bracket width, in `s = √g`, at which root finding stops. Optima with very
/// little private goods have steep residuals, so this sits well below `FOC_TOL`.
pub const ROOT_TOL: f64 = 1e-13;
/// Absolute bound on the first-order residual of a converged solution.
pub const FOC_TOL: f64 = 1e-10;
/// Absolute bound on the constraint residual of a converged solution.
pub const CONSTRAINT_TOL: f64 = 1e-9;
/// Relative agreement expected between solver and grid oracle.
pub const ORACLE_REL_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Regime {
    Asymmetric,
    Equal,
    /// Retention probability `ρ ∈ [W/S, 1]`.
    General {
        rho: f64,
    },
}

impl Regime {
    pub fn name(&self) -> &'static str {
        match self {
            Regime::Asymmetric => "asymmetric",
            Regime::Equal => "equal",
            Regime::General { .. } => "general",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Regime::General { rho } => write!(f, "general(rho={rho})"),
            other => f.write_str(other.name()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneralRegimeSpec {
    pub retention_probability: f64,
}

impl GeneralRegimeSpec {
    pub fn validate(&self, params: &PolityParams) -> Result<()> {
        model::check_retention(params, self.retention_probability)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residuals {
    /// First-order condition of the regime's program.
    pub foc: f64,
    /// Retention-constraint residual (asymmetric, general), or budget slack divided
    /// by `W` (equal).
    pub constraint: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics {
    pub iterations: usize,
    /// Initial bracket in `g`.
    pub bracket: (f64, f64),
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquilibriumSolution {
    pub regime: Regime,
    pub allocation: Allocation,
    pub discretionary_resources: f64,
    pub benchmark: Benchmark,
    pub residuals: Residuals,
    pub diagnostics: Diagnostics,
}

fn root_options() -> RootOptions {
    RootOptions { x_tol: ROOT_TOL, f_tol: 0.0, max_iter: MAX_ITERATIONS }
}

/// Public goods at which an extra unit pays for itself in taxes: `N·r·φ_g(g) = p`.
/// Zero when there is no tax base.
fn self_financing_level(params: &PolityParams, fns: &FunctionFamily) -> f64 {
    let tax_base = params.tax_base();
    if tax_base <= 0.0 {
        return 0.0;
    }
    let a = fns.phi_exponent;
    (tax_base * a / params.public_price).powf(1.0 / (1.0 - a))
}

fn budget_z(params: &PolityParams, fns: &FunctionFamily, g: f64) -> f64 {
    (params.base_revenue + params.tax_base() * fns.phi(g) - params.public_price * g) / params.coalition
}

fn marginal_budget_term(params: &PolityParams, fns: &FunctionFamily, g: f64) -> f64 {
    (params.tax_base() * fns.phi_g(g) - params.public_price) / params.coalition
}

/// `z^(1−α)/α`, i.e. `1/u_z(z)`, finite at zero.
fn inverse_marginal_utility(fns: &FunctionFamily, z: f64) -> f64 {
    z.max(0.0).powf(1.0 - fns.u_exponent) / fns.u_exponent
}

fn lower_s(s_anchor: f64, s_hi: f64) -> f64 {
    if s_anchor > 0.0 {
        s_anchor
    } else {
        s_hi * 1e-9
    }
}

struct Reduced {
    iterations: usize,
    bracket: (f64, f64),
}

fn solve_benchmark(params: &PolityParams, fns: &FunctionFamily) -> Result<(Benchmark, Reduced)> {
    params.validate()?;
    fns.validate()?;
    let g0 = self_financing_level(params, fns);
    if !(budget_z(params, fns, g0) > 0.0) {
        return Err(Error::Infeasible("no level of public goods leaves revenue for private goods".to_string()));
    }
    let s0 = g0.sqrt();

    // Budget exhaustion: the first s > s0 where z(s²) = 0.
    let mut s_out = (2.0 * s0).max(1.0);
    let mut doublings = 0;
    while budget_z(params, fns, s_out * s_out) >= 0.0 {
        s_out *= 2.0;
        doublings += 1;
        if doublings > 1000 || !s_out.is_finite() {
            return Err(Error::NoInteriorSolution("budget is never exhausted".to_string()));
        }
    }
    let exact = RootOptions { x_tol: 0.0, f_tol: 0.0, max_iter: MAX_ITERATIONS };
    let s_exhaust = brent(|s| budget_z(params, fns, s * s), s0, s_out, exact)
        .map_err(|e| Error::NoInteriorSolution(format!("budget exhaustion: {e}")))?
        .hi;

    let s_lo = lower_s(s0, s_exhaust);
    let reduced = |s: f64| {
        let g = s * s;
        fns.v_g(g) * inverse_marginal_utility(fns, budget_z(params, fns, g)) + marginal_budget_term(params, fns, g)
    };
    let root = brent(reduced, s_lo, s_exhaust, root_options())
        .map_err(|e| Error::NoInteriorSolution(format!("challenger program: {e}")))?;
    let g = root.x * root.x;
    let z = budget_z(params, fns, g);
    if !(z > 0.0) {
        return Err(Error::NoInteriorSolution(format!("challenger optimum at g = {g} leaves z = {z}")));
    }
    let bracket = (s_lo * s_lo, s_exhaust * s_exhaust);
    Ok((Benchmark::new(fns, g, z), Reduced { iterations: root.iterations, bracket }))
}

/// The challenger's best offer: maximises `v(g) + u(z)` on the binding budget.
pub fn solve_challenger(params: &PolityParams, fns: &FunctionFamily) -> Result<Benchmark> {
    solve_benchmark(params, fns).map(|(b, _)| b)
}

/// Equal uncertainty: the leader must match the challenger, so the allocation is
/// the benchmark itself and no discretionary resources remain.
pub fn solve_equal(params: &PolityParams, fns: &FunctionFamily) -> Result<EquilibriumSolution> {
    let (bench, reduced) = solve_benchmark(params, fns)?;
    let allocation = bench.allocation();
    let discretionary = model::discretionary(params, fns, &allocation)?;
    let foc = model::efoc_residual(params, fns, &allocation)?;
    let revenue = model::revenue(params, fns, allocation.public_goods)?;
    // Budget slack per coalition member, in private-good units.
    let slack = discretionary / params.coalition;
    let converged = foc.abs() <= FOC_TOL * fns.v_g(allocation.public_goods).max(1.0)
        && slack.abs() <= CONSTRAINT_TOL * (revenue / params.coalition).max(1.0);
    Ok(EquilibriumSolution {
        regime: Regime::Equal,
        allocation,
        discretionary_resources: discretionary,
        benchmark: bench,
        residuals: Residuals { foc, constraint: slack },
        diagnostics: Diagnostics { iterations: reduced.iterations, bracket: reduced.bracket, converged },
    })
}

/// Asymmetric uncertainty: maximise discretionary resources subject to the
/// retention constraint, which binds at the optimum.
pub fn solve_asymmetric(params: &PolityParams, fns: &FunctionFamily) -> Result<EquilibriumSolution> {
    solve_retention(params, fns, 1.0, Regime::Asymmetric)
}

/// Retention probability `ρ` between the equal (`ρ = W/S`) and asymmetric (`ρ = 1`) cases.
pub fn solve_general(
    params: &PolityParams,
    fns: &FunctionFamily,
    spec: &GeneralRegimeSpec,
) -> Result<EquilibriumSolution> {
    params.validate()?;
    spec.validate(params)?;
    let rho = spec.retention_probability;
    solve_retention(params, fns, rho, Regime::General { rho })
}

pub fn solve(params: &PolityParams, fns: &FunctionFamily, regime: Regime) -> Result<EquilibriumSolution> {
    match regime {
        Regime::Asymmetric => solve_asymmetric(params, fns),
        Regime::Equal => solve_equal(params, fns),
        Regime::General { rho } => solve_general(params, fns, &GeneralRegimeSpec { retention_probability: rho }),
    }
}

fn solve_retention(
    params: &PolityParams,
    fns: &FunctionFamily,
    rho: f64,
    regime: Regime,
) -> Result<EquilibriumSolution> {
    let (bench, _) = solve_benchmark(params, fns)?;
    let kappa = 1.0 / model::retention_weight(params, rho);
    let offer = bench.offer_value;
    let binding_z = |g: f64| fns.u_fn().inverse((kappa * (offer - fns.v(g))).max(0.0));

    let s_anchor = self_financing_level(params, fns).sqrt();
    // v(g) = V̂: the constraint leaves nothing for private goods.
    let s_top = fns.v_fn().inverse(offer).sqrt();
    let s_lo = lower_s(s_anchor, s_top);
    let reduced = |s: f64| {
        let g = s * s;
        kappa * fns.v_g(g) * inverse_marginal_utility(fns, binding_z(g)) + marginal_budget_term(params, fns, g)
    };
    let root = brent(reduced, s_lo, s_top, root_options())
        .map_err(|e| Error::NoInteriorSolution(format!("leader program: {e}")))?;
    let g = root.x * root.x;
    let z = model::z_from_select_at(params, fns, g, &bench, rho)?;
    let allocation = Allocation::new(g, z);
    if !(g > 0.0 && z > 0.0) {
        return Err(Error::NoInteriorSolution(format!("leader optimum at boundary ({g}, {z})")));
    }

    let discretionary = model::discretionary(params, fns, &allocation)?;
    let foc = model::afoc_residual_at(params, fns, &allocation, rho)?;
    let constraint = model::select_residual_at(params, fns, &allocation, &bench, rho)?;
    let revenue = model::revenue(params, fns, g)?;
    let converged = foc.abs() <= FOC_TOL * (kappa * fns.v_g(g)).max(1.0)
        && constraint.abs() <= CONSTRAINT_TOL * offer.max(1.0)
        && discretionary >= -CONSTRAINT_TOL * revenue.max(1.0);
    Ok(EquilibriumSolution {
        regime,
        allocation,
        discretionary_resources: discretionary,
        benchmark: bench,
        residuals: Residuals { foc, constraint },
        diagnostics: Diagnostics { iterations: root.iterations, bracket: (s_lo * s_lo, s_top * s_top), converged },
    })
}

/// Analytic benchmark when `v`, `u` and `φ` are all square roots.
///
/// With `s = √g` the first-order condition gives `√z = (p·s − N·r/2)/W`, and the
/// binding budget turns that into
///
/// ```text
/// p·s² − N·r·s + ((N·r)²/4 − W·R)/(p + W) = 0
/// ```
///
/// whose larger root is the one with `√z ≥ 0`.
pub fn closed_form_equal_sqrt(params: &PolityParams) -> Result<Benchmark> {
    params.validate()?;
    let p = params.public_price;
    let nr = params.tax_base();
    let w = params.coalition;
    let c = (nr * nr / 4.0 - w * params.base_revenue) / (p + w);
    let discriminant = nr * nr - 4.0 * p * c;
    if discriminant < 0.0 {
        return Err(Error::NoRealRoot(discriminant));
    }
    let s = (nr + discriminant.sqrt()) / (2.0 * p);
    let sqrt_z = (p * s - nr / 2.0) / w;
    if !(s > 0.0 && sqrt_z > 0.0) {
        return Err(Error::Infeasible(format!("no root with positive private goods (s = {s}, √z = {sqrt_z})")));
    }
    Ok(Benchmark::new(&FunctionFamily::square_root(), s * s, sqrt_z * sqrt_z))
}
