//! Reconciliation of solver and oracle output with the reference figures quoted
//! for the worked example.
//!
//! The reference triples are not reproducible from the example's parameters: at
//! the quoted equal-uncertainty point spending exceeds revenue by about 12268,
//! and the quoted asymmetric point leaves about 11399, not 20779.97. The report
//! evaluates every condition at the quoted points and lets the numbers speak.

use selectorate_core::{
    model, oracle_grid_search, solve, Allocation, Benchmark, EquilibriumSolution, FunctionFamily, OracleConstraint,
    PolityParams, Regime,
};

use crate::doc::Doc;
use crate::CliError;

/// Relative tolerance for the agree/disagree flags.
pub const AGREEMENT_TOL: f64 = 0.01;

/// A quoted `(g, z, D)` triple.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceTriple {
    pub public_goods: f64,
    pub private_goods: f64,
    pub discretionary: f64,
    /// The sentence the numbers were taken from.
    pub source: &'static str,
}

/// "the leader allocates 352.06 public goods, 43.35 private goods, and 20779.97 leftover"
pub const REFERENCE_ASYMMETRIC: ReferenceTriple = ReferenceTriple {
    public_goods: 352.06,
    private_goods: 43.35,
    discretionary: 20779.97,
    source: "the leader allocates 352.06 public goods, 43.35 private goods, and 20779.97 leftover",
};

/// "the leader allocates 602.24 public goods, 51.75 private goods" (nothing left over).
pub const REFERENCE_EQUAL: ReferenceTriple = ReferenceTriple {
    public_goods: 602.24,
    private_goods: 51.75,
    discretionary: 0.0,
    source: "the leader allocates 602.24 public goods, 51.75 private goods",
};

/// Reference triples exist only for the worked example with square-root functions.
pub fn reference_for(params: &PolityParams, fns: &FunctionFamily, regime: Regime) -> Option<ReferenceTriple> {
    if *params != PolityParams::published_example() || !fns.is_square_root() {
        return None;
    }
    match regime {
        Regime::Asymmetric => Some(REFERENCE_ASYMMETRIC),
        Regime::Equal => Some(REFERENCE_EQUAL),
        Regime::General { .. } => None,
    }
}

/// `|a − b| / max(|a|, |b|, 1)`; the floor keeps values near zero comparable.
pub fn relative_difference(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

pub fn oracle_constraint(regime: Regime) -> OracleConstraint {
    match regime {
        Regime::Equal => OracleConstraint::BudgetBinding,
        Regime::Asymmetric => OracleConstraint::SelectBinding { rho: 1.0 },
        Regime::General { rho } => OracleConstraint::SelectBinding { rho },
    }
}

pub fn triple_doc(g: f64, z: f64, d: f64) -> Doc {
    Doc::obj().with("public_goods", g).with("private_goods", z).with("discretionary", d)
}

/// Conditions evaluated at a quoted point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointEvaluation {
    /// Challenger first-order condition with `z` read off the budget at the quoted `g`.
    pub challenger_foc: f64,
    pub efoc: f64,
    pub afoc: f64,
    /// Retention constraint against the solved challenger benchmark.
    pub select: f64,
    /// Revenue minus spending on `g` and `z`.
    pub discretionary_at_point: f64,
    /// `discretionary_at_point` minus the quoted leftover; negative means the
    /// quoted triple costs more than the budget provides.
    pub budget_slack: f64,
}

pub fn evaluate_reference(
    params: &PolityParams,
    fns: &FunctionFamily,
    reference: &ReferenceTriple,
    bench: &Benchmark,
) -> Result<PointEvaluation, CliError> {
    let at = Allocation::new(reference.public_goods, reference.private_goods);
    let budget_point =
        Allocation::new(reference.public_goods, model::z_from_budget(params, fns, reference.public_goods)?);
    let discretionary_at_point = model::discretionary(params, fns, &at)?;
    Ok(PointEvaluation {
        challenger_foc: model::efoc_residual(params, fns, &budget_point)?,
        efoc: model::efoc_residual(params, fns, &at)?,
        afoc: model::afoc_residual(params, fns, &at)?,
        select: model::select_residual(params, fns, &at, bench)?,
        discretionary_at_point,
        budget_slack: discretionary_at_point - reference.discretionary,
    })
}

fn agreement(reference: &ReferenceTriple, solution: &EquilibriumSolution) -> Doc {
    let pairs = [
        ("public_goods", reference.public_goods, solution.allocation.public_goods),
        ("private_goods", reference.private_goods, solution.allocation.private_goods),
        ("discretionary", reference.discretionary, solution.discretionary_resources),
    ];
    let mut all = true;
    let mut out = Doc::obj();
    for (name, r, s) in pairs {
        let rel = relative_difference(r, s);
        let agrees = rel <= AGREEMENT_TOL;
        all &= agrees;
        out = out.with(name, Doc::obj().with("relative_difference", rel).with("agrees", agrees));
    }
    out.with("all_agree", all)
}

/// One regime's section of the report.
pub fn regime_section(
    params: &PolityParams,
    fns: &FunctionFamily,
    regime: Regime,
    resolution: usize,
) -> Result<Doc, CliError> {
    let solution = solve(params, fns, regime)?;
    let outcome = oracle_grid_search(params, fns, oracle_constraint(regime), resolution)?;
    let oracle_alloc = outcome.allocation;
    let oracle_d = model::discretionary(params, fns, &oracle_alloc)?;
    let deviation = relative_difference(solution.allocation.public_goods, oracle_alloc.public_goods)
        .max(relative_difference(solution.allocation.private_goods, oracle_alloc.private_goods));

    let mut section = Doc::obj()
        .with("regime", regime.name())
        .with(
            "solver",
            triple_doc(
                solution.allocation.public_goods,
                solution.allocation.private_goods,
                solution.discretionary_resources,
            )
            .with("converged", solution.diagnostics.converged),
        )
        .with("oracle", triple_doc(oracle_alloc.public_goods, oracle_alloc.private_goods, oracle_d))
        .with(
            "solver_vs_oracle",
            Doc::obj().with("max_relative_deviation", deviation).with("agrees", deviation <= AGREEMENT_TOL),
        );

    if let Some(reference) = reference_for(params, fns, regime) {
        let eval = evaluate_reference(params, fns, &reference, &solution.benchmark)?;
        section = section.with(
            "reference",
            triple_doc(reference.public_goods, reference.private_goods, reference.discretionary)
                .with("source", reference.source)
                .with(
                    "evaluated_at_reference",
                    Doc::obj()
                        .with("challenger_foc_residual", eval.challenger_foc)
                        .with("efoc_residual", eval.efoc)
                        .with("afoc_residual", eval.afoc)
                        .with("select_residual", eval.select)
                        .with("discretionary_at_point", eval.discretionary_at_point)
                        .with("budget_slack", eval.budget_slack),
                )
                .with("solver_agreement", agreement(&reference, &solution)),
        );
    }
    Ok(section)
}
