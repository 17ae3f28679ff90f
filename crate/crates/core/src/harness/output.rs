//! Plot-ready CSV emitters. Integers are decimal; reals carry nine
//! significant digits.

use std::fmt::Write;

use super::sweep::{AggregateRow, TargetFit};
use super::trial::TrialRecord;

pub const TRIALS_HEADER: &str =
    "trial,n,algorithm,model,seed,target,hit_time,censored,discrepancy_at_hit,makespan_at_hit,initial_discrepancy";
pub const TRACE_HEADER: &str = "trial,t,discrepancy,makespan,jobs_on_fuller,potential";
pub const AGGREGATE_HEADER: &str = "n,target,trials,hits,censored,mean,median,ci_low,ci_high";
pub const FITS_HEADER: &str = "target,exponent,coefficient,residual";

/// Formats a real with nine significant digits.
pub fn fmt_real(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    if (-4..9).contains(&magnitude) {
        let decimals = (8 - magnitude).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        format!("{x:.8e}")
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// One row per `(trial, target)`.
pub fn trials_csv(records: &[TrialRecord]) -> String {
    let mut out = String::from(TRIALS_HEADER);
    out.push('\n');
    for r in records {
        for t in &r.targets {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{}",
                r.trial_id,
                r.n,
                r.algorithm,
                r.model.name(),
                r.seed,
                t.target.label(),
                opt(t.first_hit),
                u8::from(t.censored()),
                opt(t.discrepancy_at_hit),
                opt(t.makespan_at_hit),
                r.initial_discrepancy
            )
            .unwrap();
        }
    }
    out
}

pub fn trace_csv(records: &[TrialRecord]) -> String {
    let mut out = String::from(TRACE_HEADER);
    out.push('\n');
    for r in records {
        for s in &r.trace {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                r.trial_id,
                s.t,
                s.discrepancy,
                s.makespan,
                s.jobs_on_fuller,
                fmt_real(s.potential)
            )
            .unwrap();
        }
    }
    out
}

pub fn aggregate_csv(rows: &[AggregateRow]) -> String {
    let mut out = String::from(AGGREGATE_HEADER);
    out.push('\n');
    for row in rows {
        let stats = match row.summary {
            Some(s) => [s.mean, s.median, s.ci_low, s.ci_high].map(fmt_real).join(","),
            None => ",,,".into(),
        };
        writeln!(
            out,
            "{},{},{},{},{},{}",
            row.n, row.target, row.trials, row.hits, row.censored, stats
        )
        .unwrap();
    }
    out
}

pub fn fits_csv(fits: &[TargetFit]) -> String {
    let mut out = String::from(FITS_HEADER);
    out.push('\n');
    for f in fits {
        writeln!(
            out,
            "{},{},{},{}",
            f.target,
            fmt_real(f.fit.exponent),
            fmt_real(f.fit.coefficient),
            fmt_real(f.fit.residual)
        )
        .unwrap();
    }
    out
}
