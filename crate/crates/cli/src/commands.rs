//! The four commands. Each returns its documents instead of writing them, so a
//! single writer in `main` can emit everything at the end.

use std::path::{Path, PathBuf};

use selectorate_core::{
    detect_gap_decay, model, oracle_grid_search, solve, sweep, EquilibriumSolution, FunctionFamily, PolityParams,
    Regime, SweepParameter, SweepResult, SweepSpec,
};

use crate::config::{to_regime, Command, Format, RegimeSelector, RunConfig};
use crate::doc::{Cell, Csv, Doc};
use crate::report::{oracle_constraint, regime_section, triple_doc};
use crate::svg::{line_chart, Series};
use crate::CliError;

/// Largest solver–oracle relative deviation accepted by `oracle`.
pub const ORACLE_TOLERANCE: f64 = 1e-3;

pub const SWEEP_COLUMNS: [&str; 8] =
    ["param_value", "regime", "g_star", "z_star", "discretionary", "foc_residual", "constraint_residual", "converged"];

/// A rendered document and where it goes; `None` means standard output.
#[derive(Debug, Clone, PartialEq)]
pub struct Emitted {
    pub path: Option<PathBuf>,
    pub contents: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub exit_code: i32,
    pub outputs: Vec<Emitted>,
    /// One-line summary for standard error, if there is something to say.
    pub message: Option<String>,
}

pub fn run(command: Command, config: &RunConfig) -> Result<Outcome, CliError> {
    config.validate(command)?;
    match command {
        Command::Solve => run_solve(config),
        Command::Sweep => run_sweep(config),
        Command::Oracle => run_oracle(config),
        Command::Report => run_report(config),
    }
}

fn params_doc(p: &PolityParams) -> Doc {
    Doc::obj()
        .with("n_residents", p.n_residents)
        .with("selectorate", p.selectorate)
        .with("coalition", p.coalition)
        .with("base_revenue", p.base_revenue)
        .with("tax_rate", p.tax_rate)
        .with("public_price", p.public_price)
        .with("discount", p.discount)
}

fn functions_doc(f: &FunctionFamily) -> Doc {
    Doc::obj().with("v_exponent", f.v_exponent).with("u_exponent", f.u_exponent).with("phi_exponent", f.phi_exponent)
}

fn rho_of(regime: Regime) -> Option<f64> {
    match regime {
        Regime::General { rho } => Some(rho),
        _ => None,
    }
}

fn header(command: Command, config: &RunConfig) -> Doc {
    Doc::obj()
        .with("command", command.name())
        .with("params", params_doc(&config.params))
        .with("functions", functions_doc(&config.fns))
}

/// Flattens a document into `field,value` rows for CSV output.
fn flatten(prefix: &str, doc: &Doc, precision: usize, csv: &mut Csv) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match doc {
        Doc::Obj(fields) => fields.iter().for_each(|(k, v)| flatten(&key(k), v, precision, csv)),
        Doc::Arr(items) => items.iter().enumerate().for_each(|(i, v)| flatten(&key(&i.to_string()), v, precision, csv)),
        Doc::Null => csv.push(vec![Cell::Text(prefix.to_string()), Cell::Empty], precision),
        Doc::Bool(b) => csv.push(vec![Cell::Text(prefix.to_string()), Cell::Text(b.to_string())], precision),
        Doc::Int(i) => csv.push(vec![Cell::Text(prefix.to_string()), Cell::Text(i.to_string())], precision),
        Doc::Num(x) => csv.push(vec![Cell::Text(prefix.to_string()), Cell::Num(*x)], precision),
        Doc::Str(s) => csv.push(vec![Cell::Text(prefix.to_string()), Cell::Text(s.clone())], precision),
    }
}

fn render(doc: &Doc, config: &RunConfig) -> String {
    let precision = config.output.precision;
    match config.output.format {
        Format::Json => doc.render_json(precision),
        Format::Csv => {
            let mut csv = Csv::new(&["field", "value"]);
            flatten("", doc, precision, &mut csv);
            csv.render()
        }
    }
}

fn main_output(doc: &Doc, config: &RunConfig) -> Emitted {
    Emitted { path: config.output.path.clone(), contents: render(doc, config) }
}

pub fn solution_doc(s: &EquilibriumSolution) -> Doc {
    Doc::obj()
        .with("regime", s.regime.name())
        .with("rho", rho_of(s.regime))
        .with("g_star", s.allocation.public_goods)
        .with("z_star", s.allocation.private_goods)
        .with("discretionary", s.discretionary_resources)
        .with(
            "benchmark",
            Doc::obj()
                .with("g_hat", s.benchmark.g_hat)
                .with("z_hat", s.benchmark.z_hat)
                .with("offer_value", s.benchmark.offer_value),
        )
        .with("residuals", Doc::obj().with("foc", s.residuals.foc).with("constraint", s.residuals.constraint))
        .with(
            "diagnostics",
            Doc::obj()
                .with("iterations", s.diagnostics.iterations)
                .with("bracket", vec![Doc::from(s.diagnostics.bracket.0), Doc::from(s.diagnostics.bracket.1)])
                .with("converged", s.diagnostics.converged),
        )
}

/// Solves the configured regime. A solve that returns but misses its tolerances
/// still emits its document, with exit code 3.
pub fn run_solve(config: &RunConfig) -> Result<Outcome, CliError> {
    let solution = solve(&config.params, &config.fns, config.regime())?;
    let mut doc = header(Command::Solve, config);
    if let Doc::Obj(fields) = solution_doc(&solution) {
        for (k, v) in fields {
            doc = doc.with(&k, v);
        }
    }
    let converged = solution.diagnostics.converged;
    Ok(Outcome {
        exit_code: if converged { 0 } else { 3 },
        outputs: vec![main_output(&doc, config)],
        message: (!converged).then(|| format!("{} solve did not meet its tolerances", solution.regime)),
    })
}

fn sweep_spec(config: &RunConfig) -> Result<SweepSpec, CliError> {
    let block = config.sweep.as_ref().ok_or_else(|| CliError::Config("missing sweep block".to_string()))?;
    let needs_rho =
        block.regimes.contains(&RegimeSelector::General) && block.parameter != SweepParameter::RetentionProbability;
    if needs_rho && config.rho.is_none() {
        return Err(CliError::Config("sweeping the general regime needs `rho`".to_string()));
    }
    let rho = config.rho.unwrap_or(1.0);
    Ok(SweepSpec {
        parameter: block.parameter,
        from: block.from,
        to: block.to,
        steps: block.steps,
        regimes: block.regimes.iter().map(|r| to_regime(*r, rho)).collect(),
        base_params: config.params,
        fns: config.fns,
    })
}

fn axis_label(parameter: SweepParameter) -> String {
    let symbol = match parameter {
        SweepParameter::NResidents => "N",
        SweepParameter::Selectorate => "S",
        SweepParameter::Coalition => "W",
        SweepParameter::BaseRevenue => "R",
        SweepParameter::TaxRate => "r",
        SweepParameter::PublicPrice => "p",
        SweepParameter::Discount => "δ",
        SweepParameter::RetentionProbability => "ρ",
    };
    format!("{} ({symbol})", parameter.name())
}

/// `plots/fig.svg` → `plots/fig_public.svg`, `plots/fig_private.svg`.
pub fn svg_paths(base: &Path) -> (PathBuf, PathBuf) {
    let stem = base.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "sweep".to_string());
    let dir = base.parent().unwrap_or_else(|| Path::new(""));
    (dir.join(format!("{stem}_public.svg")), dir.join(format!("{stem}_private.svg")))
}

fn sweep_charts(result: &SweepResult, base: &Path) -> Vec<Emitted> {
    let x_label = axis_label(result.parameter);
    let series = |pick: fn(&EquilibriumSolution) -> f64| -> Vec<Series> {
        result
            .regimes
            .iter()
            .enumerate()
            .map(|(k, regime)| Series {
                name: regime.to_string(),
                points: result
                    .rows
                    .iter()
                    .filter_map(|row| row.outcomes[k].converged().map(|s| (row.param_value, pick(s))))
                    .collect(),
            })
            .collect()
    };
    let (public_path, private_path) = svg_paths(base);
    vec![
        Emitted {
            path: Some(public_path),
            contents: line_chart(
                &format!("Public goods against {}", result.parameter.name()),
                &x_label,
                "public goods (g*)",
                &series(|s| s.allocation.public_goods),
            ),
        },
        Emitted {
            path: Some(private_path),
            contents: line_chart(
                &format!("Private goods against {}", result.parameter.name()),
                &x_label,
                "private goods per member (z*)",
                &series(|s| s.allocation.private_goods),
            ),
        },
    ]
}

fn sweep_csv(result: &SweepResult, precision: usize) -> String {
    let mut csv = Csv::new(&SWEEP_COLUMNS);
    for row in &result.rows {
        for outcome in &row.outcomes {
            let mut cells = vec![Cell::Num(row.param_value), Cell::Text(outcome.regime.name().to_string())];
            match &outcome.solution {
                Ok(s) => cells.extend([
                    Cell::Num(s.allocation.public_goods),
                    Cell::Num(s.allocation.private_goods),
                    Cell::Num(s.discretionary_resources),
                    Cell::Num(s.residuals.foc),
                    Cell::Num(s.residuals.constraint),
                    Cell::Text(s.diagnostics.converged.to_string()),
                ]),
                Err(_) => cells.extend([
                    Cell::Empty,
                    Cell::Empty,
                    Cell::Empty,
                    Cell::Empty,
                    Cell::Empty,
                    Cell::Text("false".to_string()),
                ]),
            }
            csv.push(cells, precision);
        }
    }
    csv.render()
}

fn sweep_json(result: &SweepResult, config: &RunConfig) -> Doc {
    let rows: Vec<Doc> = result
        .rows
        .iter()
        .flat_map(|row| {
            row.outcomes.iter().map(move |outcome| {
                let base = Doc::obj().with("param_value", row.param_value).with("regime", outcome.regime.name());
                match &outcome.solution {
                    Ok(s) => base
                        .with("g_star", s.allocation.public_goods)
                        .with("z_star", s.allocation.private_goods)
                        .with("discretionary", s.discretionary_resources)
                        .with("foc_residual", s.residuals.foc)
                        .with("constraint_residual", s.residuals.constraint)
                        .with("converged", s.diagnostics.converged),
                    Err(e) => base.with("converged", false).with("error", e.to_string()),
                }
            })
        })
        .collect();
    let decay = match detect_gap_decay(result) {
        Ok(report) => {
            let trend = |t: selectorate_core::GapTrend| {
                Doc::obj()
                    .with("first", t.first)
                    .with("last", t.last)
                    .with("shrinking_fraction", t.shrinking_fraction)
                    .with("monotone_decay", t.monotone_decay)
            };
            Doc::obj()
                .with("rows_used", report.rows_used)
                .with("public", trend(report.public))
                .with("private", trend(report.private))
                .with("discretionary", trend(report.discretionary))
        }
        Err(_) => Doc::Null,
    };
    header(Command::Sweep, config)
        .with("parameter", result.parameter.name())
        .with("rows", rows)
        .with("failures", result.failures())
        .with("gap_decay", decay)
}

/// Sweeps one parameter. Failed rows are recorded and the outputs are still
/// written; any failure makes the exit code 4.
pub fn run_sweep(config: &RunConfig) -> Result<Outcome, CliError> {
    let spec = sweep_spec(config)?;
    let result = sweep(&spec)?;
    let contents = match config.output.format {
        Format::Csv => sweep_csv(&result, config.output.precision),
        Format::Json => sweep_json(&result, config).render_json(config.output.precision),
    };
    let mut outputs = vec![Emitted { path: config.output.path.clone(), contents }];
    if let Some(base) = &config.svg {
        outputs.extend(sweep_charts(&result, base));
    }
    let failures = result.failures();
    let total = result.rows.len() * result.regimes.len();
    Ok(Outcome {
        exit_code: if failures > 0 { 4 } else { 0 },
        outputs,
        message: (failures > 0).then(|| format!("{failures} of {total} sweep solves failed")),
    })
}

/// `|a − b| / max(|a|, |b|)`, zero when both are zero.
pub fn relative_deviation(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Solver against the grid oracle; exit 0 iff the larger of the relative `g`
/// and `z` deviations is within [`ORACLE_TOLERANCE`], otherwise 1.
pub fn run_oracle(config: &RunConfig) -> Result<Outcome, CliError> {
    let regime = config.regime();
    let solution = solve(&config.params, &config.fns, regime)?;
    let outcome = oracle_grid_search(&config.params, &config.fns, oracle_constraint(regime), config.oracle_resolution)?;
    let o = outcome.allocation;
    let oracle_d = model::discretionary(&config.params, &config.fns, &o)?;
    let deviation = relative_deviation(solution.allocation.public_goods, o.public_goods)
        .max(relative_deviation(solution.allocation.private_goods, o.private_goods));
    let agrees = deviation <= ORACLE_TOLERANCE;
    let doc = header(Command::Oracle, config)
        .with("regime", regime.name())
        .with("rho", rho_of(regime))
        .with("resolution", config.oracle_resolution)
        .with(
            "solver",
            triple_doc(
                solution.allocation.public_goods,
                solution.allocation.private_goods,
                solution.discretionary_resources,
            ),
        )
        .with(
            "oracle",
            triple_doc(o.public_goods, o.private_goods, oracle_d)
                .with(
                    "coarse",
                    Doc::obj()
                        .with("public_goods", outcome.coarse.public_goods)
                        .with("private_goods", outcome.coarse.private_goods),
                )
                .with("window", vec![Doc::from(outcome.window.0), Doc::from(outcome.window.1)])
                .with("g_cell", outcome.g_cell),
        )
        .with("max_relative_deviation", deviation)
        .with("tolerance", ORACLE_TOLERANCE)
        .with("agrees", agrees);
    Ok(Outcome {
        exit_code: if agrees { 0 } else { 1 },
        outputs: vec![main_output(&doc, config)],
        message: (!agrees)
            .then(|| format!("solver and oracle differ by {deviation:.3e} (tolerance {ORACLE_TOLERANCE:e})")),
    })
}

/// Solver, oracle and (for the worked example) reference triples per regime.
pub fn run_report(config: &RunConfig) -> Result<Outcome, CliError> {
    let mut regimes = vec![Regime::Asymmetric, Regime::Equal];
    if config.regime == RegimeSelector::General {
        regimes.push(config.regime());
    }
    let sections = regimes
        .into_iter()
        .map(|r| regime_section(&config.params, &config.fns, r, config.oracle_resolution))
        .collect::<Result<Vec<_>, _>>()?;
    let doc = header(Command::Report, config).with("resolution", config.oracle_resolution).with("regimes", sections);
    Ok(Outcome { exit_code: 0, outputs: vec![main_output(&doc, config)], message: None })
}
