//! Brute-force grid oracle used to cross-check the root-finding solvers.
//!
//! The oracle never touches a first-order condition. It evaluates the regime's
//! objective on every feasible cell of a `(g, z)` grid, keeps the best cell
//! (ties go to the lexicographically smallest `(i, j)`), and then refines once.
//!
//! On a two-dimensional grid a boundary optimum is only located to roughly the
//! square root of the cell size along the constraint, so the refinement pass
//! walks the binding constraint itself: it covers every coarse column whose
//! best cell comes within the grid's own discretisation error of the maximum,
//! and scans that window in `g` at full resolution with `z` placed on the
//! binding constraint.

use crate::error::{Error, Result};
use crate::model;
use crate::params::{Allocation, FunctionFamily, PolityParams};

pub const MIN_RESOLUTION: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OracleConstraint {
    /// Maximise `v(g) + u(z)` subject to the budget (challenger / equal regime).
    BudgetBinding,
    /// Maximise discretionary resources subject to the retention constraint with
    /// retention probability `ρ` (asymmetric regime at `ρ = 1`).
    SelectBinding { rho: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleOutcome {
    pub allocation: Allocation,
    pub objective: f64,
    /// Best cell of the coarse two-dimensional pass.
    pub coarse: Allocation,
    /// `g` interval scanned by the refinement pass.
    pub window: (f64, f64),
    /// Spacing of the refinement grid in `g`.
    pub g_cell: f64,
}

#[derive(Debug, Clone, Copy)]
struct Axis {
    lo: f64,
    hi: f64,
    cells: usize,
}

impl Axis {
    fn new(lo: f64, hi: f64, cells: usize) -> Self {
        Axis { lo, hi, cells }
    }

    fn at(&self, i: usize) -> f64 {
        if i == self.cells {
            self.hi
        } else {
            self.lo + (self.hi - self.lo) * (i as f64) / (self.cells as f64)
        }
    }

    fn points(&self) -> Vec<f64> {
        (0..=self.cells).map(|i| self.at(i)).collect()
    }

    fn spacing(&self) -> f64 {
        (self.hi - self.lo) / self.cells as f64
    }
}

/// Best feasible cell; `score` returns `None` for infeasible cells.
fn grid_argmax<S>(ni: usize, nj: usize, score: &S) -> Option<(usize, usize, f64)>
where
    S: Fn(usize, usize) -> Option<f64>,
{
    let mut best: Option<(usize, usize, f64)> = None;
    for i in 0..ni {
        for j in 0..nj {
            if let Some(s) = score(i, j) {
                if best.is_none_or(|(_, _, b)| s > b) {
                    best = Some((i, j, s));
                }
            }
        }
    }
    best
}

/// Index range of rows holding a cell within the grid's discretisation error of the best.
fn near_optimal_rows<S>(ni: usize, nj: usize, score: &S, best: (usize, usize, f64)) -> (usize, usize)
where
    S: Fn(usize, usize) -> Option<f64>,
{
    let (bi, bj, bs) = best;
    let step = |di: isize, dj: isize| -> f64 {
        let i = bi as isize + di;
        let j = bj as isize + dj;
        if i < 0 || j < 0 || i >= ni as isize || j >= nj as isize {
            return 0.0;
        }
        score(i as usize, j as usize).map_or(0.0, |s| (s - bs).abs())
    };
    let band = 2.0 * (step(-1, 0).max(step(1, 0)) + step(0, -1).max(step(0, 1)));
    let (mut lo, mut hi) = (bi, bi);
    for i in 0..ni {
        if (0..nj).any(|j| score(i, j).is_some_and(|s| s >= bs - band)) {
            lo = lo.min(i);
            hi = hi.max(i);
        }
    }
    (lo.saturating_sub(2), (hi + 2).min(ni - 1))
}

/// Best point of a one-dimensional scan; `score` returns `None` where infeasible.
fn line_argmax<S: Fn(f64) -> Option<(f64, f64)>>(axis: &Axis, score: S) -> Option<(f64, f64, f64)> {
    let mut best: Option<(f64, f64, f64)> = None;
    for i in 0..=axis.cells {
        let g = axis.at(i);
        if let Some((z, s)) = score(g) {
            if best.is_none_or(|(_, _, b)| s > b) {
                best = Some((g, z, s));
            }
        }
    }
    best
}

fn check_resolution(resolution: usize) -> Result<()> {
    if resolution < MIN_RESOLUTION {
        return Err(Error::Domain(format!("oracle resolution {resolution} is below {MIN_RESOLUTION}")));
    }
    Ok(())
}

/// Runs the oracle and returns only the best allocation.
pub fn oracle_grid_maximize(
    params: &PolityParams,
    fns: &FunctionFamily,
    constraint: OracleConstraint,
    resolution: usize,
) -> Result<Allocation> {
    oracle_grid_search(params, fns, constraint, resolution).map(|o| o.allocation)
}

pub fn oracle_grid_search(
    params: &PolityParams,
    fns: &FunctionFamily,
    constraint: OracleConstraint,
    resolution: usize,
) -> Result<OracleOutcome> {
    params.validate()?;
    fns.validate()?;
    check_resolution(resolution)?;
    match constraint {
        OracleConstraint::BudgetBinding => budget_oracle(params, fns, resolution),
        OracleConstraint::SelectBinding { rho } => {
            model::check_retention(params, rho)?;
            select_oracle(params, fns, rho, resolution)
        }
    }
}

/// Revenue net of public-goods spending, `R + N·r·φ(g) − p·g`.
fn net_revenue(params: &PolityParams, fns: &FunctionFamily, g: f64) -> f64 {
    params.base_revenue + params.tax_base() * fns.phi(g) - params.public_price * g
}

fn budget_oracle(params: &PolityParams, fns: &FunctionFamily, resolution: usize) -> Result<OracleOutcome> {
    let mut g_max = 1.0;
    while net_revenue(params, fns, g_max) >= 0.0 {
        g_max *= 2.0;
        if !g_max.is_finite() {
            return Err(Error::Infeasible("budget is never exhausted".to_string()));
        }
    }
    let g_axis = Axis::new(0.0, g_max, resolution);
    let gs = g_axis.points();
    let net: Vec<f64> = gs.iter().map(|&g| net_revenue(params, fns, g)).collect();
    let v: Vec<f64> = gs.iter().map(|&g| fns.v(g)).collect();
    let z_max = net.iter().cloned().fold(f64::NEG_INFINITY, f64::max) / params.coalition;
    if !(z_max > 0.0) {
        return Err(Error::Infeasible("no grid point leaves revenue for private goods".to_string()));
    }
    let z_axis = Axis::new(0.0, z_max, resolution);
    let zs = z_axis.points();
    let u: Vec<f64> = zs.iter().map(|&z| fns.u(z)).collect();
    let w = params.coalition;

    let score = |i: usize, j: usize| (net[i] - w * zs[j] >= 0.0).then(|| v[i] + u[j]);
    let n = resolution + 1;
    let best = grid_argmax(n, n, &score).ok_or_else(|| Error::Infeasible("feasible grid is empty".to_string()))?;
    let (lo, hi) = near_optimal_rows(n, n, &score, best);

    let window = Axis::new(gs[lo], gs[hi], resolution);
    let (g, z, objective) = line_argmax(&window, |g| {
        let z = net_revenue(params, fns, g) / w;
        (z >= 0.0).then(|| (z, fns.v(g) + fns.u(z)))
    })
    .ok_or_else(|| Error::Infeasible("refinement window has no feasible point".to_string()))?;

    Ok(OracleOutcome {
        allocation: Allocation::new(g, z),
        objective,
        coarse: Allocation::new(gs[best.0], zs[best.1]),
        window: (window.lo, window.hi),
        g_cell: window.spacing(),
    })
}

fn select_oracle(params: &PolityParams, fns: &FunctionFamily, rho: f64, resolution: usize) -> Result<OracleOutcome> {
    let bench = budget_oracle(params, fns, resolution)?.allocation;
    let offer = fns.v(bench.public_goods) + fns.u(bench.private_goods);
    let weight = model::retention_weight(params, rho);

    let g_axis = Axis::new(0.0, fns.v_fn().inverse(offer), resolution);
    let z_axis = Axis::new(0.0, fns.u_fn().inverse(offer / weight), resolution);
    let gs = g_axis.points();
    let zs = z_axis.points();
    let net: Vec<f64> = gs.iter().map(|&g| net_revenue(params, fns, g)).collect();
    let v: Vec<f64> = gs.iter().map(|&g| fns.v(g)).collect();
    let u: Vec<f64> = zs.iter().map(|&z| fns.u(z)).collect();
    let w = params.coalition;

    let score = |i: usize, j: usize| (v[i] + weight * u[j] >= offer).then(|| net[i] - w * zs[j]);
    let n = resolution + 1;
    let best = grid_argmax(n, n, &score).ok_or_else(|| Error::Infeasible("feasible grid is empty".to_string()))?;
    let (lo, hi) = near_optimal_rows(n, n, &score, best);

    let window = Axis::new(gs[lo], gs[hi], resolution);
    let (g, z, objective) = line_argmax(&window, |g| {
        let z = fns.u_fn().inverse((offer - fns.v(g)).max(0.0) / weight);
        Some((z, net_revenue(params, fns, g) - w * z))
    })
    .ok_or_else(|| Error::Infeasible("refinement window has no feasible point".to_string()))?;

    Ok(OracleOutcome {
        allocation: Allocation::new(g, z),
        objective,
        coarse: Allocation::new(gs[best.0], zs[best.1]),
        window: (window.lo, window.hi),
        g_cell: window.spacing(),
    })
}

/// Grid maximiser for an arbitrary objective with an interior maximum on a box:
/// one coarse pass, then one pass over the surrounding ±2 cells.
pub fn grid_maximize_box<F: Fn(f64, f64) -> f64>(
    objective: F,
    g_range: (f64, f64),
    z_range: (f64, f64),
    resolution: usize,
) -> Result<(f64, f64)> {
    check_resolution(resolution)?;
    if !(g_range.0 < g_range.1 && z_range.0 < z_range.1) {
        return Err(Error::Domain("empty box".to_string()));
    }
    let mut g_axis = Axis::new(g_range.0, g_range.1, resolution);
    let mut z_axis = Axis::new(z_range.0, z_range.1, resolution);
    let mut best = (0, 0);
    for pass in 0..2 {
        let score = |i: usize, j: usize| {
            let s = objective(g_axis.at(i), z_axis.at(j));
            s.is_finite().then_some(s)
        };
        let (i, j, _) = grid_argmax(resolution + 1, resolution + 1, &score)
            .ok_or_else(|| Error::Infeasible("objective is not finite anywhere on the box".to_string()))?;
        best = (i, j);
        if pass == 0 {
            let (gi_lo, gi_hi) = (i.saturating_sub(2), (i + 2).min(resolution));
            let (zj_lo, zj_hi) = (j.saturating_sub(2), (j + 2).min(resolution));
            g_axis = Axis::new(g_axis.at(gi_lo), g_axis.at(gi_hi), resolution);
            z_axis = Axis::new(z_axis.at(zj_lo), z_axis.at(zj_hi), resolution);
        }
    }
    Ok((g_axis.at(best.0), z_axis.at(best.1)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_objective_recovers_known_maximum() {
        let (g, z) =
            grid_maximize_box(|g, z| -(g - 5.0).powi(2) - (z - 7.0).powi(2), (0.0, 10.0), (0.0, 20.0), 100).unwrap();
        let cell = (20.0 / 100.0) * (4.0 / 100.0);
        assert!((g - 5.0).abs() <= cell && (z - 7.0).abs() <= cell, "({g}, {z})");
    }

    #[test]
    fn ties_go_to_smallest_index() {
        let best = grid_argmax(3, 3, &|_, _| Some(1.0)).unwrap();
        assert_eq!((best.0, best.1), (0, 0));
        let best = grid_argmax(3, 3, &|i, j| (i + j >= 2).then_some(1.0)).unwrap();
        assert_eq!((best.0, best.1), (0, 2));
    }

    #[test]
    fn low_resolution_rejected() {
        let p = PolityParams::published_example();
        let f = FunctionFamily::square_root();
        assert!(oracle_grid_search(&p, &f, OracleConstraint::BudgetBinding, 9).is_err());
    }

    #[test]
    fn zero_revenue_is_infeasible() {
        let p = PolityParams { base_revenue: 0.0, tax_rate: 0.0, ..PolityParams::published_example() };
        let e = oracle_grid_search(&p, &FunctionFamily::square_root(), OracleConstraint::BudgetBinding, 200);
        assert!(matches!(e, Err(Error::Infeasible(_))));
    }

    #[test]
    fn budget_oracle_near_closed_form() {
        let p = PolityParams::published_example();
        let o = oracle_grid_search(&p, &FunctionFamily::square_root(), OracleConstraint::BudgetBinding, 400).unwrap();
        let s = (25.0 + 387f64.sqrt()) / 2.0;
        assert!((o.allocation.public_goods - s * s).abs() <= 2.0 * o.g_cell, "{o:?}");
        assert!(o.window.0 <= s * s && s * s <= o.window.1);
    }
}
