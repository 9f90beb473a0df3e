//! Model arithmetic: revenue, budget, first-order-condition residuals and the
//! retention (Select) constraint. Everything here is a pure evaluation.
//!
//! The retention constraint is generalised by a retention probability `ρ`:
//!
//! ```text
//! v(g) + u(z) − V̂ + δ/(1−δ)·(ρ − W/S)·u(z) ≥ 0
//! ```
//!
//! `ρ = 1` is the asymmetric-uncertainty constraint; `ρ = W/S` reduces it to
//! matching the challenger's offer. The un-suffixed functions are the `ρ = 1` case.

use crate::error::{Error, Result};
use crate::params::{Allocation, Benchmark, FunctionFamily, PolityParams};

fn check(params: &PolityParams, fns: &FunctionFamily) -> Result<()> {
    params.validate()?;
    fns.validate()
}

fn check_g(g: f64) -> Result<()> {
    if g.is_finite() && g >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("public goods g = {g} must be finite and nonnegative")))
    }
}

fn check_interior(alloc: &Allocation) -> Result<()> {
    alloc.validate()?;
    if alloc.public_goods == 0.0 || alloc.private_goods == 0.0 {
        return Err(Error::Domain(format!(
            "first-order conditions need g > 0 and z > 0, got ({}, {})",
            alloc.public_goods, alloc.private_goods
        )));
    }
    Ok(())
}

/// Checks `W/S ≤ ρ ≤ 1`.
pub fn check_retention(params: &PolityParams, rho: f64) -> Result<()> {
    let floor = params.coalition_share();
    if rho.is_finite() && rho >= floor && rho <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!("retention probability {rho} outside [W/S = {floor}, 1]")))
    }
}

/// Multiplier on `u(z)` in the retention constraint: `1 + δ/(1−δ)·(ρ − W/S)`.
pub fn retention_weight(params: &PolityParams, rho: f64) -> f64 {
    1.0 + params.future_weight() * (rho - params.coalition_share())
}

/// `(p·g + W·z ≤ R + N·r·φ(g))` revenue side: `R + N·r·φ(g)`.
pub fn revenue(params: &PolityParams, fns: &FunctionFamily, g: f64) -> Result<f64> {
    check(params, fns)?;
    check_g(g)?;
    Ok(params.base_revenue + params.tax_base() * fns.phi(g))
}

/// Revenue left after paying for the offer. Negative means the offer is unaffordable.
pub fn discretionary(params: &PolityParams, fns: &FunctionFamily, alloc: &Allocation) -> Result<f64> {
    alloc.validate()?;
    Ok(revenue(params, fns, alloc.public_goods)?
        - params.public_price * alloc.public_goods
        - params.coalition * alloc.private_goods)
}

/// Private goods per member when the whole budget is spent at public goods `g`.
/// Negative values mean `g` alone exceeds the budget.
pub fn z_from_budget(params: &PolityParams, fns: &FunctionFamily, g: f64) -> Result<f64> {
    Ok((revenue(params, fns, g)? - params.public_price * g) / params.coalition)
}

/// `(N·r·φ_g(g) − p)/W`, the marginal private-goods value of one more unit of `g`.
fn marginal_budget_term(params: &PolityParams, fns: &FunctionFamily, g: f64) -> f64 {
    (params.tax_base() * fns.phi_g(g) - params.public_price) / params.coalition
}

/// Equal-uncertainty (and challenger) first-order condition:
/// `v_g(g) + (N·r·φ_g(g) − p)/W · u_z(z)`.
pub fn efoc_residual(params: &PolityParams, fns: &FunctionFamily, alloc: &Allocation) -> Result<f64> {
    check(params, fns)?;
    check_interior(alloc)?;
    let (g, z) = (alloc.public_goods, alloc.private_goods);
    Ok(fns.v_g(g) + marginal_budget_term(params, fns, g) * fns.u_z(z))
}

/// Asymmetric-uncertainty first-order condition:
/// `(1−δ)S/(S−δW)·v_g(g) + (N·r·φ_g(g) − p)/W · u_z(z)`.
pub fn afoc_residual(params: &PolityParams, fns: &FunctionFamily, alloc: &Allocation) -> Result<f64> {
    afoc_residual_at(params, fns, alloc, 1.0)
}

/// First-order condition of the leader's program under retention probability `ρ`.
pub fn afoc_residual_at(params: &PolityParams, fns: &FunctionFamily, alloc: &Allocation, rho: f64) -> Result<f64> {
    check(params, fns)?;
    check_retention(params, rho)?;
    check_interior(alloc)?;
    let (g, z) = (alloc.public_goods, alloc.private_goods);
    let kappa = 1.0 / retention_weight(params, rho);
    Ok(kappa * fns.v_g(g) + marginal_budget_term(params, fns, g) * fns.u_z(z))
}

/// `v(g) + u(z) − v(ĝ) − u(ẑ) + δ/(1−δ)·(1 − W/S)·u(z)`; nonnegative keeps the coalition.
pub fn select_residual(
    params: &PolityParams,
    fns: &FunctionFamily,
    alloc: &Allocation,
    bench: &Benchmark,
) -> Result<f64> {
    select_residual_at(params, fns, alloc, bench, 1.0)
}

pub fn select_residual_at(
    params: &PolityParams,
    fns: &FunctionFamily,
    alloc: &Allocation,
    bench: &Benchmark,
    rho: f64,
) -> Result<f64> {
    check(params, fns)?;
    check_retention(params, rho)?;
    alloc.validate()?;
    bench.allocation().validate()?;
    let (g, z) = (alloc.public_goods, alloc.private_goods);
    let uz = fns.u(z);
    Ok(fns.v(g) + uz - fns.v(bench.g_hat) - fns.u(bench.z_hat)
        + params.future_weight() * (rho - params.coalition_share()) * uz)
}

/// Private goods that make the retention constraint bind at public goods `g`:
/// `u(z) = (1−δ)S/(S−δW)·(V̂ − v(g))`.
pub fn z_from_select(params: &PolityParams, fns: &FunctionFamily, g: f64, bench: &Benchmark) -> Result<f64> {
    z_from_select_at(params, fns, g, bench, 1.0)
}

pub fn z_from_select_at(
    params: &PolityParams,
    fns: &FunctionFamily,
    g: f64,
    bench: &Benchmark,
    rho: f64,
) -> Result<f64> {
    check(params, fns)?;
    check_retention(params, rho)?;
    check_g(g)?;
    let shortfall = bench.offer_value - fns.v(g);
    if shortfall < 0.0 {
        return Err(Error::Domain(format!(
            "v(g) = {} exceeds the benchmark value {}; the constraint cannot bind with z ≥ 0",
            fns.v(g),
            bench.offer_value
        )));
    }
    Ok(fns.u_fn().inverse(shortfall / retention_weight(params, rho)))
}

/// Slope of the binding-constraint curve `z(g)`:
/// `−(1−δ)S/(S−δW) · v_g(g)/u_z(z)`.
pub fn dz_dg_select(params: &PolityParams, fns: &FunctionFamily, g: f64, bench: &Benchmark) -> Result<f64> {
    dz_dg_select_at(params, fns, g, bench, 1.0)
}

pub fn dz_dg_select_at(
    params: &PolityParams,
    fns: &FunctionFamily,
    g: f64,
    bench: &Benchmark,
    rho: f64,
) -> Result<f64> {
    let z = z_from_select_at(params, fns, g, bench, rho)?;
    if z <= 0.0 || g <= 0.0 {
        return Err(Error::Domain(format!("slope needs g > 0 and z > 0, got ({g}, {z})")));
    }
    let kappa = 1.0 / retention_weight(params, rho);
    Ok(-kappa * fns.v_g(g) / fns.u_z(z))
}

/// What a challenger can credibly promise: the benchmark now, then `v(g*)` and,
/// with probability `W/S`, `u(z*)` every later period.
pub fn credible_challenger_value(
    params: &PolityParams,
    fns: &FunctionFamily,
    bench: &Benchmark,
    steady: &Allocation,
) -> Result<f64> {
    check(params, fns)?;
    steady.validate()?;
    bench.allocation().validate()?;
    let fw = params.future_weight();
    Ok(fns.v(bench.g_hat)
        + fns.u(bench.z_hat)
        + fw * fns.v(steady.public_goods)
        + fw * params.coalition_share() * fns.u(steady.private_goods))
}

/// Value of the incumbent's offer received forever: `(v(g) + u(z))/(1−δ)`.
pub fn incumbent_stream_value(params: &PolityParams, fns: &FunctionFamily, steady: &Allocation) -> Result<f64> {
    check(params, fns)?;
    steady.validate()?;
    Ok((fns.v(steady.public_goods) + fns.u(steady.private_goods)) / (1.0 - params.discount))
}
