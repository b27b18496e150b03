use std::io::Write;
use std::path::Path;

use serde_json::{json, Value};

use super::{CliError, DiscretizerArg, PredictArgs};
use crate::conformal::{self, ConformalConfig, Method};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::fitters::{default_lasso_lambda, FitterKind, FitterSpec};
use crate::grid::RoundingMode;
use crate::interval::PredictionSet;
use crate::simulation::data_range_grid;

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line()).unwrap_or(0);
    match e.kind() {
        csv::ErrorKind::Io(_) => Error::Io(e.to_string()),
        csv::ErrorKind::UnequalLengths { expected_len, len, .. } => Error::Parse {
            line,
            message: format!("expected {expected_len} fields, found {len}"),
        },
        _ => Error::Parse { line, message: e.to_string() },
    }
}

fn parse_cell(cell: &str, line: u64, column: usize) -> Result<f64> {
    match cell.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(Error::Parse { line, message: format!("column {}: `{cell}` is not a finite number", column + 1) }),
    }
}

/// Reads a training CSV whose header is `x1,...,xp,y`.
pub(crate) fn read_training(path: &Path) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let header = reader.headers().map_err(csv_error)?.clone();
    let width = header.len();
    if width < 2 || header.iter().any(|h| h.parse::<f64>().is_ok()) {
        return Err(Error::Parse { line: 1, message: "expected a header row `x1,...,xp,y`".into() });
    }
    if header.get(width - 1) != Some("y") {
        return Err(Error::Parse { line: 1, message: "the last column must be `y`".into() });
    }

    let p = width - 1;
    let (mut features, mut responses) = (Vec::new(), Vec::new());
    for record in reader.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map(|pos| pos.line()).unwrap_or(0);
        for (j, cell) in record.iter().enumerate() {
            let v = parse_cell(cell, line, j)?;
            if j < p {
                features.push(v);
            } else {
                responses.push(v);
            }
        }
    }
    if responses.is_empty() {
        return Err(Error::InvalidInput(format!("{}: no training rows", path.display())));
    }
    Dataset::from_row_major(responses.len(), p, &features, &responses)
}

/// Test covariates from a CSV file (optional header) or an inline comma list.
pub(crate) fn read_covariates(spec: &str) -> std::result::Result<Vec<Vec<f64>>, CliError> {
    let path = Path::new(spec);
    if !path.is_file() {
        let row: std::result::Result<Vec<f64>, _> = spec.split(',').map(|s| s.trim().parse::<f64>()).collect();
        return match row {
            Ok(row) if !row.is_empty() && row.iter().all(|v| v.is_finite()) => Ok(vec![row]),
            _ => Err(CliError::Usage(format!("--x: `{spec}` is neither a file nor a list of numbers"))),
        };
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::Runtime(csv_error(e).to_string()))?;
        let line = record.position().map(|pos| pos.line()).unwrap_or(0);
        if i == 0 && record.iter().any(|c| c.parse::<f64>().is_err()) {
            continue; // header
        }
        let row = record
            .iter()
            .enumerate()
            .map(|(j, c)| parse_cell(c, line, j))
            .collect::<Result<Vec<f64>>>()
            .map_err(|e| CliError::Runtime(e.to_string()))?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(CliError::Runtime(format!("{}: no covariate rows", path.display())));
    }
    Ok(rows)
}

fn json_number(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else if v > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

/// `{"intervals":[[lo,hi],...],"hull":[lo,hi],"method":...,"alpha":...}`;
/// infinite ends are the strings `"-inf"`/`"inf"` and an empty hull is `null`.
pub fn format_json(set: &PredictionSet, method: &str, alpha: f64) -> String {
    let intervals: Vec<Value> =
        set.intervals().iter().map(|i| json!([json_number(i.lo.value), json_number(i.hi.value)])).collect();
    let hull = match set.hull_interval() {
        Some(h) => json!([json_number(h.lo.value), json_number(h.hi.value)]),
        None => Value::Null,
    };
    json!({ "intervals": intervals, "hull": hull, "method": method, "alpha": alpha }).to_string()
}

fn build_config(args: &PredictArgs, data: &Dataset) -> std::result::Result<ConformalConfig, CliError> {
    let usage = |e: Error| CliError::Usage(e.to_string());
    let method: Method = args.method.parse().map_err(usage)?;
    let kind: FitterKind = args.fitter.parse().map_err(usage)?;
    if args.grid_size == 0 {
        return Err(CliError::Usage("--M must be >= 1".into()));
    }
    let lambda = args.lambda.unwrap_or_else(|| default_lasso_lambda(args.sigma, data.n(), data.p()));
    let fitter = FitterSpec::new(kind, lambda).with_intercept(args.intercept);
    let mode = match args.discretizer {
        DiscretizerArg::Nearest => RoundingMode::Nearest,
        DiscretizerArg::Randomized => RoundingMode::Randomized { seed: args.seed },
    };
    let responses: Vec<f64> = data.responses().iter().copied().collect();
    let grid = data_range_grid(&responses, args.grid_size, mode).map_err(|e| CliError::Runtime(e.to_string()))?;
    let mut cfg = ConformalConfig::new(args.alpha, fitter, grid.discretizer, method);
    cfg.split_seed = args.seed;
    cfg.validate().map_err(usage)?;
    Ok(cfg)
}

pub(crate) fn run(args: &PredictArgs, out: &mut dyn Write) -> std::result::Result<(), CliError> {
    let runtime = |e: Error| CliError::Runtime(e.to_string());
    let data = read_training(&args.train).map_err(runtime)?;
    let cfg = build_config(args, &data)?;
    let rows = read_covariates(&args.x)?;
    for x in &rows {
        let set = conformal::predict(&data, x, &cfg).map_err(runtime)?;
        if args.json {
            writeln!(out, "{}", format_json(&set, cfg.method.name(), cfg.alpha))?;
        } else {
            let hull = set.hull_interval().map_or_else(|| "empty".to_string(), |h| h.to_string());
            writeln!(out, "set: {set}")?;
            writeln!(out, "hull: {hull}")?;
        }
    }
    Ok(())
}
