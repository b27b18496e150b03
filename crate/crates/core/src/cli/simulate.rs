use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use super::svg::{Plot, Series};
use super::{CliError, DiscretizerArg, SimulateArgs, Switch};
use crate::error::{Error, Result};
use crate::simulation::{run_experiment, ExperimentConfig, RoundingKind, SimMethod, SummaryRow, TrialRecord};

pub const RESULTS_HEADER: &str =
    "method,n,p,M,trials,coverage,coverage_se,mean_length,length_se,clipped_fraction,mean_fit_count,wall_time_s";
pub const TRIALS_HEADER: &str = "method,n,p,M,trial,covered,length,clipped,empty,fit_count,unconverged,wall_time_s";

/// Reads `key = value` lines; `#` starts a comment.
pub fn load_config_file(path: &Path) -> Result<Vec<(String, String)>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let mut entries = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: i as u64 + 1,
            message: format!("expected `key = value`, got `{line}`"),
        })?;
        entries.push((key.trim().to_string(), value.trim().to_string()));
    }
    Ok(entries)
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> std::result::Result<T, String> {
    value.parse().map_err(|_| format!("invalid value `{value}` for `{key}`"))
}

fn parse_list<T, E>(key: &str, value: &str, item: impl Fn(&str) -> std::result::Result<T, E>) -> std::result::Result<Vec<T>, String> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| item(s).map_err(|_| format!("invalid entry `{s}` in `{key}`")))
        .collect()
}

fn apply_setting(cfg: &mut ExperimentConfig, key: &str, value: &str) -> std::result::Result<(), String> {
    match key {
        "n" => cfg.n = parse_value(key, value)?,
        "p" => cfg.p = parse_value(key, value)?,
        "sigma" => cfg.sigma = parse_value(key, value)?,
        "alpha" => cfg.alpha = parse_value(key, value)?,
        "M" => cfg.grid_sizes = parse_list(key, value, str::parse::<usize>)?,
        "methods" => cfg.methods = parse_list(key, value, str::parse::<SimMethod>)?,
        "trials" => cfg.trials = parse_value(key, value)?,
        "seed" => cfg.seed = parse_value(key, value)?,
        "threads" => cfg.threads = parse_value(key, value)?,
        "tol" => cfg.lasso_tol = parse_value(key, value)?,
        "max-iter" => cfg.lasso_max_iter = parse_value(key, value)?,
        "discretizer" => {
            cfg.rounding = match value {
                "nearest" => RoundingKind::Nearest,
                "randomized" => RoundingKind::Randomized,
                _ => return Err(format!("invalid value `{value}` for `discretizer`")),
            }
        }
        "warm-start" => {
            cfg.warm_start = match value {
                "on" => true,
                "off" => false,
                _ => return Err(format!("invalid value `{value}` for `warm-start`")),
            }
        }
        _ => return Err(format!("unknown setting `{key}`")),
    }
    Ok(())
}

/// Defaults, then the config file, then flags.
pub(crate) fn build_config(args: &SimulateArgs) -> std::result::Result<ExperimentConfig, CliError> {
    let mut cfg = ExperimentConfig::default();
    if let Some(path) = &args.config {
        let entries = load_config_file(path).map_err(|e| match e {
            Error::Io(m) => CliError::Runtime(m),
            other => CliError::Usage(format!("{}: {other}", path.display())),
        })?;
        for (key, value) in entries {
            apply_setting(&mut cfg, &key, &value).map_err(|m| CliError::Usage(format!("{}: {m}", path.display())))?;
        }
    }
    let a = args;
    cfg.n = a.n.unwrap_or(cfg.n);
    cfg.p = a.p.unwrap_or(cfg.p);
    cfg.sigma = a.sigma.unwrap_or(cfg.sigma);
    cfg.alpha = a.alpha.unwrap_or(cfg.alpha);
    cfg.trials = a.trials.unwrap_or(cfg.trials);
    cfg.seed = a.seed.unwrap_or(cfg.seed);
    cfg.threads = a.threads.unwrap_or(cfg.threads);
    cfg.lasso_tol = a.tol.unwrap_or(cfg.lasso_tol);
    cfg.lasso_max_iter = a.max_iter.unwrap_or(cfg.lasso_max_iter);
    if let Some(list) = &a.grid_sizes {
        apply_setting(&mut cfg, "M", list).map_err(CliError::Usage)?;
    }
    if let Some(list) = &a.methods {
        apply_setting(&mut cfg, "methods", list).map_err(CliError::Usage)?;
    }
    if let Some(d) = a.discretizer {
        cfg.rounding = match d {
            DiscretizerArg::Nearest => RoundingKind::Nearest,
            DiscretizerArg::Randomized => RoundingKind::Randomized,
        };
    }
    if let Some(w) = a.warm_start {
        cfg.warm_start = w == Switch::On;
    }
    cfg.timing = a.timing;
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(cfg)
}

pub fn results_csv(rows: &[SummaryRow]) -> String {
    let mut s = String::from(RESULTS_HEADER);
    s.push('\n');
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.method.name(),
            r.n,
            r.p,
            r.m,
            r.trials,
            r.coverage,
            r.coverage_se,
            r.mean_length,
            r.length_se,
            r.clipped_fraction,
            r.mean_fit_count,
            r.wall_time_s
        );
    }
    s
}

pub fn trials_csv(cfg: &ExperimentConfig, records: &[TrialRecord]) -> String {
    let mut s = String::from(TRIALS_HEADER);
    s.push('\n');
    for r in records {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.method.name(),
            cfg.n,
            cfg.p,
            r.m,
            r.trial,
            u8::from(r.covered),
            r.length,
            u8::from(r.clipped),
            u8::from(r.empty),
            r.fit_count,
            r.unconverged,
            r.wall_time_s.unwrap_or(f64::NAN)
        );
    }
    s
}

fn plots(cfg: &ExperimentConfig, rows: &[SummaryRow]) -> (Plot, Plot) {
    let mut methods: Vec<SimMethod> = rows.iter().map(|r| r.method).collect();
    methods.dedup();
    let series = |f: &dyn Fn(&SummaryRow) -> (f64, f64)| -> Vec<Series> {
        methods
            .iter()
            .map(|&m| Series {
                name: m.name().to_string(),
                points: rows
                    .iter()
                    .filter(|r| r.method == m)
                    .map(|r| {
                        let (y, e) = f(r);
                        (r.m as f64, y, e)
                    })
                    .collect(),
            })
            .collect()
    };
    let subtitle = format!("n = {}, p = {}, alpha = {}", cfg.n, cfg.p, cfg.alpha);
    let coverage = Plot {
        title: format!("Coverage ({subtitle})"),
        x_label: "M".into(),
        y_label: "coverage".into(),
        series: series(&|r| (r.coverage, r.coverage_se)),
        reference: Some(1.0 - cfg.alpha),
    };
    let length = Plot {
        title: format!("Length ({subtitle})"),
        x_label: "M".into(),
        y_label: "mean length".into(),
        series: series(&|r| (r.mean_length, r.length_se)),
        reference: None,
    };
    (coverage, length)
}

fn write_file(dir: &Path, name: &str, contents: &str) -> std::result::Result<(), CliError> {
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))
}

pub(crate) fn run(args: &SimulateArgs, out: &mut dyn Write, err: &mut dyn Write) -> std::result::Result<(), CliError> {
    let cfg = build_config(args)?;
    std::fs::create_dir_all(&args.out).map_err(|e| CliError::Runtime(format!("{}: {e}", args.out.display())))?;
    let result = run_experiment(&cfg).map_err(|e| CliError::Runtime(e.to_string()))?;

    write_file(&args.out, "results.csv", &results_csv(&result.summary))?;
    if args.per_trial {
        write_file(&args.out, "trials.csv", &trials_csv(&cfg, &result.records))?;
    }
    if args.plot {
        let (coverage, length) = plots(&cfg, &result.summary);
        write_file(&args.out, "coverage.svg", &coverage.render())?;
        write_file(&args.out, "length.svg", &length.render())?;
    }

    if !result.failures.is_empty() {
        writeln!(err, "warning: {} method runs failed and were excluded", result.failures.len())?;
        for f in result.failures.iter().take(5) {
            writeln!(err, "  {} M={} trial {}: {} ({})", f.method.name(), f.m, f.trial, f.reason, f.message)?;
        }
    }
    writeln!(out, "{:<12} {:>5} {:>8} {:>10} {:>8}", "method", "M", "coverage", "length", "clipped")?;
    for r in &result.summary {
        writeln!(
            out,
            "{:<12} {:>5} {:>8.4} {:>10.4} {:>8.3}",
            r.method.name(),
            r.m,
            r.coverage,
            r.mean_length,
            r.clipped_fraction
        )?;
    }
    writeln!(out, "wrote {}", args.out.join("results.csv").display())?;
    Ok(())
}
