//! Run configuration: flat `key = value` text or a JSON object.
//!
//! ```text
//! # polity
//! N = 10000
//! S = 10000
//! W = 300
//! R = 1000
//! r = 0.5
//! p = 200
//! delta = 0.55
//! regime = asymmetric
//! sweep.parameter = coalition
//! sweep.from = 300
//! sweep.to = 9000
//! sweep.steps = 30
//! ```
//!
//! JSON configs use the same keys; nested objects are flattened with `.`.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use selectorate_core::{FunctionFamily, PolityParams, Regime, SweepParameter};

use crate::CliError;

pub const DEFAULT_PRECISION: usize = 6;
pub const DEFAULT_ORACLE_RESOLUTION: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Solve,
    Sweep,
    Oracle,
    Report,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Solve => "solve",
            Command::Sweep => "sweep",
            Command::Oracle => "oracle",
            Command::Report => "report",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(CliError::Config(format!("unknown output format `{other}` (expected json or csv)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegimeSelector {
    Asymmetric,
    Equal,
    General,
}

impl FromStr for RegimeSelector {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "asymmetric" => Ok(RegimeSelector::Asymmetric),
            "equal" => Ok(RegimeSelector::Equal),
            "general" => Ok(RegimeSelector::General),
            other => Err(CliError::Config(format!("unknown regime `{other}` (expected asymmetric, equal or general)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepBlock {
    pub parameter: SweepParameter,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
    pub regimes: Vec<RegimeSelector>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSpec {
    pub format: Format,
    pub path: Option<PathBuf>,
    pub precision: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: PolityParams,
    pub fns: FunctionFamily,
    pub regime: RegimeSelector,
    pub rho: Option<f64>,
    pub sweep: Option<SweepBlock>,
    pub oracle_resolution: usize,
    pub output: OutputSpec,
    pub svg: Option<PathBuf>,
    /// Command named inside the file, if any; must agree with the subcommand.
    pub command: Option<String>,
}

/// Command-line flags that override the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub svg: Option<PathBuf>,
    pub regime: Option<RegimeSelector>,
    pub rho: Option<f64>,
    pub precision: Option<usize>,
}

const PARAM_KEYS: [(&str, &str); 7] = [
    ("n_residents", "N"),
    ("selectorate", "S"),
    ("coalition", "W"),
    ("base_revenue", "R"),
    ("tax_rate", "r"),
    ("public_price", "p"),
    ("discount", "delta"),
];

const OTHER_KEYS: [&str; 15] = [
    "v_exponent",
    "u_exponent",
    "phi_exponent",
    "regime",
    "rho",
    "command",
    "sweep.parameter",
    "sweep.from",
    "sweep.to",
    "sweep.steps",
    "sweep.regimes",
    "oracle.resolution",
    "output.format",
    "output.path",
    "output.precision",
];

fn canonical_key(key: &str) -> Option<&'static str> {
    if let Some((long, _)) = PARAM_KEYS.iter().find(|(long, short)| key == *long || key == *short) {
        return Some(long);
    }
    if key == "svg" || key == "svg.path" {
        return Some("svg.path");
    }
    OTHER_KEYS.iter().copied().find(|k| *k == key)
}

type RawMap = BTreeMap<&'static str, String>;

fn insert(map: &mut RawMap, key: &str, value: String, line: Option<usize>) -> Result<(), CliError> {
    let at = line.map(|l| format!(" (line {l})")).unwrap_or_default();
    let canonical = canonical_key(key).ok_or_else(|| CliError::Config(format!("unknown key `{key}`{at}")))?;
    if map.insert(canonical, value).is_some() {
        return Err(CliError::Config(format!("duplicate key `{canonical}`{at}")));
    }
    Ok(())
}

fn parse_key_values(text: &str) -> Result<RawMap, CliError> {
    let mut map = RawMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) =
            line.split_once('=').ok_or_else(|| CliError::Config(format!("line {}: expected `key = value`", n + 1)))?;
        insert(&mut map, key.trim(), value.trim().to_string(), Some(n + 1))?;
    }
    Ok(map)
}

fn flatten_json(prefix: &str, value: &serde_json::Value, map: &mut RawMap) -> Result<(), CliError> {
    use serde_json::Value;
    match value {
        Value::Object(obj) => {
            for (k, v) in obj {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                if v.is_object() {
                    flatten_json(&key, v, map)?;
                } else {
                    insert(map, &key, json_scalar(&key, v)?, None)?;
                }
            }
            Ok(())
        }
        _ => Err(CliError::Config("JSON config must be an object".to_string())),
    }
}

fn json_scalar(key: &str, v: &serde_json::Value) -> Result<String, CliError> {
    use serde_json::Value;
    match v {
        Value::Number(n) => Ok(n.to_string()),
        Value::String(s) => Ok(s.clone()),
        Value::Array(items) => {
            items.iter().map(|i| json_scalar(key, i)).collect::<Result<Vec<_>, _>>().map(|parts| parts.join(","))
        }
        _ => Err(CliError::Config(format!("`{key}` must be a number, string or list"))),
    }
}

fn parse_raw(text: &str) -> Result<RawMap, CliError> {
    if text.trim_start().starts_with('{') {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid JSON config: {e}")))?;
        let mut map = RawMap::new();
        flatten_json("", &value, &mut map)?;
        Ok(map)
    } else {
        parse_key_values(text)
    }
}

fn number(map: &RawMap, key: &str) -> Result<Option<f64>, CliError> {
    map.get(key)
        .map(|v| v.parse::<f64>().map_err(|_| CliError::Config(format!("`{key}` = `{v}` is not a number"))))
        .transpose()
}

fn count(map: &RawMap, key: &str) -> Result<Option<usize>, CliError> {
    map.get(key)
        .map(|v| {
            v.parse::<usize>().map_err(|_| CliError::Config(format!("`{key}` = `{v}` is not a nonnegative integer")))
        })
        .transpose()
}

fn required(map: &RawMap, key: &str, short: &str) -> Result<f64, CliError> {
    number(map, key)?.ok_or_else(|| CliError::Config(format!("missing required field `{key}` ({short})")))
}

fn parse_regimes(list: &str) -> Result<Vec<RegimeSelector>, CliError> {
    list.split(',').map(|s| s.trim().parse()).collect()
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let map = parse_raw(text)?;
        let mut values = [0.0; 7];
        for (slot, (key, short)) in values.iter_mut().zip(PARAM_KEYS) {
            *slot = required(&map, key, short)?;
        }
        let [n_residents, selectorate, coalition, base_revenue, tax_rate, public_price, discount] = values;
        let params =
            PolityParams { n_residents, selectorate, coalition, base_revenue, tax_rate, public_price, discount };
        let defaults = FunctionFamily::square_root();
        let fns = FunctionFamily {
            v_exponent: number(&map, "v_exponent")?.unwrap_or(defaults.v_exponent),
            u_exponent: number(&map, "u_exponent")?.unwrap_or(defaults.u_exponent),
            phi_exponent: number(&map, "phi_exponent")?.unwrap_or(defaults.phi_exponent),
        };

        let sweep_keys = ["sweep.parameter", "sweep.from", "sweep.to", "sweep.steps", "sweep.regimes"];
        let sweep = if sweep_keys.iter().any(|k| map.contains_key(k)) {
            let parameter = map
                .get("sweep.parameter")
                .ok_or_else(|| CliError::Config("missing required field `sweep.parameter`".to_string()))?
                .parse::<SweepParameter>()
                .map_err(|e| CliError::Config(e.to_string()))?;
            Some(SweepBlock {
                parameter,
                from: number(&map, "sweep.from")?
                    .ok_or_else(|| CliError::Config("missing required field `sweep.from`".to_string()))?,
                to: number(&map, "sweep.to")?
                    .ok_or_else(|| CliError::Config("missing required field `sweep.to`".to_string()))?,
                steps: count(&map, "sweep.steps")?
                    .ok_or_else(|| CliError::Config("missing required field `sweep.steps`".to_string()))?,
                regimes: match map.get("sweep.regimes") {
                    Some(list) => parse_regimes(list)?,
                    None => vec![RegimeSelector::Asymmetric, RegimeSelector::Equal],
                },
            })
        } else {
            None
        };

        let config = RunConfig {
            params,
            fns,
            regime: map.get("regime").map(|s| s.parse()).transpose()?.unwrap_or(RegimeSelector::Asymmetric),
            rho: number(&map, "rho")?,
            sweep,
            oracle_resolution: count(&map, "oracle.resolution")?.unwrap_or(DEFAULT_ORACLE_RESOLUTION),
            output: OutputSpec {
                format: map.get("output.format").map(|s| s.parse()).transpose()?.unwrap_or(Format::Json),
                path: map.get("output.path").map(PathBuf::from),
                precision: count(&map, "output.precision")?.unwrap_or(DEFAULT_PRECISION),
            },
            svg: map.get("svg.path").map(PathBuf::from),
            command: map.get("command").cloned(),
        };
        Ok(config)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(p) = &o.out {
            self.output.path = Some(p.clone());
        }
        if let Some(f) = o.format {
            self.output.format = f;
        }
        if let Some(p) = &o.svg {
            self.svg = Some(p.clone());
        }
        if let Some(r) = o.regime {
            self.regime = r;
        }
        if let Some(rho) = o.rho {
            self.rho = Some(rho);
        }
        if let Some(p) = o.precision {
            self.output.precision = p;
        }
    }

    /// Checks everything that does not need a solve.
    pub fn validate(&self, command: Command) -> Result<(), CliError> {
        if let Some(named) = &self.command {
            if named != command.name() {
                return Err(CliError::Config(format!(
                    "config is for `{named}` but `{}` was requested",
                    command.name()
                )));
            }
        }
        self.params.validate().map_err(|e| CliError::Config(e.to_string()))?;
        self.fns.validate().map_err(|e| CliError::Config(e.to_string()))?;
        if !(2..=15).contains(&self.output.precision) {
            return Err(CliError::Config(format!("precision {} must be between 2 and 15", self.output.precision)));
        }
        if self.regime == RegimeSelector::General && self.rho.is_none() && command != Command::Sweep {
            return Err(CliError::Config("regime `general` needs `rho`".to_string()));
        }
        if command == Command::Sweep && self.sweep.is_none() {
            return Err(CliError::Config("sweep command needs a sweep block (`sweep.parameter`, ...)".to_string()));
        }
        Ok(())
    }

    pub fn regime(&self) -> Regime {
        to_regime(self.regime, self.rho.unwrap_or(1.0))
    }
}

pub fn to_regime(selector: RegimeSelector, rho: f64) -> Regime {
    match selector {
        RegimeSelector::Asymmetric => Regime::Asymmetric,
        RegimeSelector::Equal => Regime::Equal,
        RegimeSelector::General => Regime::General { rho },
    }
}
