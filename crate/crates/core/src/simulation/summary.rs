use super::{ExperimentConfig, SimMethod, TrialFailure, TrialRecord};

/// Per (method, M) aggregate over successful trials.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub method: SimMethod,
    pub n: usize,
    pub p: usize,
    pub m: usize,
    pub trials: usize,
    pub failures: usize,
    pub coverage: f64,
    pub coverage_se: f64,
    pub mean_length: f64,
    pub length_se: f64,
    pub clipped_fraction: f64,
    pub mean_fit_count: f64,
    /// Mean seconds per trial; NaN when timing was off.
    pub wall_time_s: f64,
}

/// Mean and standard error `sd / sqrt(k)` (sample sd). SE is 0 for a single value.
pub fn mean_se(values: &[f64]) -> (f64, f64) {
    let k = values.len();
    if k == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / k as f64;
    if k < 2 || !mean.is_finite() {
        return (mean, if k < 2 { 0.0 } else { f64::NAN });
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1) as f64;
    (mean, (var / k as f64).sqrt())
}

pub fn summarize(cfg: &ExperimentConfig, records: &[TrialRecord], failures: &[TrialFailure]) -> Vec<SummaryRow> {
    let mut methods = cfg.methods.clone();
    methods.sort();
    methods.dedup();
    let mut sizes = cfg.grid_sizes.clone();
    sizes.sort_unstable();
    sizes.dedup();

    let mut rows = Vec::with_capacity(methods.len() * sizes.len());
    for &method in &methods {
        for &m in &sizes {
            let group: Vec<&TrialRecord> = records.iter().filter(|r| r.method == method && r.m == m).collect();
            let covered: Vec<f64> = group.iter().map(|r| if r.covered { 1.0 } else { 0.0 }).collect();
            let lengths: Vec<f64> = group.iter().map(|r| r.length).collect();
            let (coverage, coverage_se) = mean_se(&covered);
            let (mean_length, length_se) = mean_se(&lengths);
            let k = group.len() as f64;
            let frac = |f: &dyn Fn(&TrialRecord) -> f64| -> f64 {
                if group.is_empty() {
                    f64::NAN
                } else {
                    group.iter().map(|r| f(r)).sum::<f64>() / k
                }
            };
            rows.push(SummaryRow {
                method,
                n: cfg.n,
                p: cfg.p,
                m,
                trials: group.len(),
                failures: failures.iter().filter(|f| f.method == method && f.m == m).count(),
                coverage,
                coverage_se,
                mean_length,
                length_se,
                clipped_fraction: frac(&|r| if r.clipped { 1.0 } else { 0.0 }),
                mean_fit_count: frac(&|r| r.fit_count as f64),
                wall_time_s: frac(&|r| r.wall_time_s.unwrap_or(f64::NAN)),
            });
        }
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_and_se() {
        let (m, se) = mean_se(&[1.0, 0.0, 1.0, 1.0]);
        assert_eq!(m, 0.75);
        assert!((se - (0.25f64 / 4.0).sqrt()).abs() < 1e-15);
        assert_eq!(mean_se(&[2.0]), (2.0, 0.0));
        assert!(mean_se(&[]).0.is_nan());
    }
}
