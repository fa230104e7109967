//! Batch sweeps over parameter grids. Tuples are enumerated in lexicographic
//! order, analyzed by a worker pool (round-robin by index), and written out
//! in input order so identical specs produce byte-identical files.

use std::fs;
use std::io::Write as _;
use std::path::Path;
use std::thread;

use serde::{Deserialize, Serialize};

use bstriangle_core::arith::gcd;
use bstriangle_core::coset::Strategy;
use bstriangle_core::decide::{self, AnalysisConfig, DecideError};
use bstriangle_core::triangle::{TriangleError, TriangleParams};
use bstriangle_core::BigInt;

use crate::report::{quotient_dto, verdict_dto, LimitsDto, Payload, ReportFile, SweepRowDto};

/// Inclusive integer interval. Zero is never used as a parameter value even
/// when the interval covers it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RangeSpec {
    pub min: i64,
    pub max: i64,
}

fn default_max_cosets() -> usize {
    2_000_000
}

fn default_max_seconds() -> f64 {
    600.0
}

fn default_workers() -> usize {
    1
}

fn default_strategy() -> String {
    String::from("hlt")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub a: RangeSpec,
    pub b: RangeSpec,
    pub c: RangeSpec,
    pub d: RangeSpec,
    pub e: RangeSpec,
    pub f: RangeSpec,
    /// Keep only tuples whose three pairs are each coprime.
    #[serde(default)]
    pub coprime_only: bool,
    /// Keep only tuples with no all-negative pair; every orbit has such a
    /// representative, so this halves redundant grid points.
    #[serde(default)]
    pub sign_normalized_only: bool,
    #[serde(default = "default_max_cosets")]
    pub max_cosets: usize,
    #[serde(default = "default_max_seconds")]
    pub max_seconds: f64,
    #[serde(default = "default_workers")]
    pub workers: usize,
    #[serde(default = "default_strategy")]
    pub strategy: String,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), String> {
        for (name, r) in [
            ("a", &self.a),
            ("b", &self.b),
            ("c", &self.c),
            ("d", &self.d),
            ("e", &self.e),
            ("f", &self.f),
        ] {
            if r.min > r.max {
                return Err(format!("range for {name} is empty: {}..={}", r.min, r.max));
            }
            if r.min == 0 && r.max == 0 {
                return Err(format!("range for {name} contains only zero"));
            }
        }
        if self.workers == 0 {
            return Err(String::from("worker count must be at least 1"));
        }
        if parse_strategy(&self.strategy).is_none() {
            return Err(format!("unknown strategy `{}` (expected hlt or felsch)", self.strategy));
        }
        Ok(())
    }

    pub fn config(&self) -> AnalysisConfig {
        let mut cfg = AnalysisConfig::default();
        cfg.limits.max_cosets = self.max_cosets;
        cfg.limits.max_seconds = self.max_seconds;
        cfg.sylow_limits = cfg.limits;
        cfg.strategy = parse_strategy(&self.strategy).expect("validated");
        cfg
    }
}

pub fn parse_strategy(name: &str) -> Option<Strategy> {
    match name {
        "hlt" => Some(Strategy::Hlt),
        "felsch" => Some(Strategy::Felsch),
        _ => None,
    }
}

fn nonzero_values(r: &RangeSpec) -> impl Iterator<Item = i64> + '_ {
    (r.min..=r.max).filter(|v| *v != 0)
}

fn pair_coprime(u: &BigInt, v: &BigInt) -> bool {
    gcd(u, v) == BigInt::from(1)
}

fn sign_normalized(p: &TriangleParams) -> bool {
    let zero = BigInt::from(0);
    p.pairs().iter().all(|(u, v)| *u > zero || *v > zero)
}

/// All grid tuples passing the filters, lexicographic in (a, b, c, d, e, f).
pub fn grid_tuples(spec: &SweepSpec) -> Vec<TriangleParams> {
    let mut out = Vec::new();
    for a in nonzero_values(&spec.a) {
        for b in nonzero_values(&spec.b) {
            for c in nonzero_values(&spec.c) {
                for d in nonzero_values(&spec.d) {
                    for e in nonzero_values(&spec.e) {
                        for f in nonzero_values(&spec.f) {
                            let p = match TriangleParams::from_i64([a, b, c, d, e, f]) {
                                Ok(p) => p,
                                Err(_) => continue,
                            };
                            if spec.coprime_only
                                && !p.pairs().iter().all(|(u, v)| pair_coprime(u, v))
                            {
                                continue;
                            }
                            if spec.sign_normalized_only && !sign_normalized(&p) {
                                continue;
                            }
                            out.push(p);
                        }
                    }
                }
            }
        }
    }
    out
}

/// One analyzed grid point.
pub fn sweep_row(p: &TriangleParams, cfg: &AnalysisConfig) -> SweepRowDto {
    let verdict = verdict_dto(&decide::decide(p, &cfg.guard));
    let (quotient, refusal, error) = match decide::analyze_quotient(p, cfg) {
        Ok(rep) => (Some(quotient_dto(&rep)), None, None),
        Err(DecideError::Triangle(TriangleError::PreconditionViolated(msg))) => {
            (None, Some(String::from(msg)), None)
        }
        Err(e) => (None, None, Some(e.to_string())),
    };
    SweepRowDto {
        params: p.to_string(),
        verdict,
        quotient,
        refusal,
        error,
    }
}

/// Aggregate counters for one finished sweep.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SweepSummary {
    pub instances: usize,
    pub developable: usize,
    pub not_developable: usize,
    pub unknown: usize,
    pub completed_orders: usize,
    pub incomplete: usize,
    pub refusals: usize,
    pub errors: usize,
    pub bound_failures: usize,
}

fn file_stem(params: &str) -> String {
    params
        .chars()
        .filter(|c| *c != ' ')
        .map(|c| match c {
            ',' => String::from("_"),
            ';' => String::from("__"),
            '-' => String::from("m"),
            other => other.to_string(),
        })
        .collect()
}

fn csv_line(row: &SweepRowDto) -> String {
    let (order, ratio, bound_ok) = match &row.quotient {
        Some(q) => {
            let order = q.order.clone().unwrap_or_default();
            let (ratio, bound_ok) = match &q.bound_check {
                Some(b) => (
                    b.ratio.clone().unwrap_or_default(),
                    (b.lower_divides && b.ratio_divides_modulus).to_string(),
                ),
                None => (String::new(), String::new()),
            };
            (order, ratio, bound_ok)
        }
        None => (String::new(), String::new(), String::new()),
    };
    // The params field contains commas, so it is quoted.
    format!("\"{}\",{},{},{},{}", row.params, row.verdict.outcome, order, ratio, bound_ok)
}

fn tally(summary: &mut SweepSummary, row: &SweepRowDto) {
    summary.instances += 1;
    match row.verdict.outcome.as_str() {
        "developable" => summary.developable += 1,
        "not developable" => summary.not_developable += 1,
        _ => summary.unknown += 1,
    }
    if row.refusal.is_some() {
        summary.refusals += 1;
    }
    if row.error.is_some() {
        summary.errors += 1;
    }
    if let Some(q) = &row.quotient {
        if q.order.is_some() {
            summary.completed_orders += 1;
        } else {
            summary.incomplete += 1;
        }
        if let Some(b) = &q.bound_check {
            if !(b.lower_divides && b.ratio_divides_modulus) {
                summary.bound_failures += 1;
            }
        }
    }
}

/// Runs the sweep and writes `reports.jsonl`, `summary.csv`, and one pretty
/// JSON report per tuple into `out_dir`.
pub fn run_sweep(spec: &SweepSpec, out_dir: &Path) -> Result<SweepSummary, String> {
    spec.validate()?;
    let tuples = grid_tuples(spec);
    let cfg = spec.config();
    let workers = spec.workers.min(tuples.len().max(1));

    let mut rows: Vec<Option<SweepRowDto>> = vec![None; tuples.len()];
    thread::scope(|scope| {
        let mut handles = Vec::new();
        for w in 0..workers {
            let tuples = &tuples;
            let cfg = &cfg;
            handles.push(scope.spawn(move || {
                let mut mine = Vec::new();
                for (i, p) in tuples.iter().enumerate().skip(w).step_by(workers) {
                    mine.push((i, sweep_row(p, cfg)));
                }
                mine
            }));
        }
        for handle in handles {
            for (i, row) in handle.join().expect("worker panicked") {
                rows[i] = Some(row);
            }
        }
    });
    let rows: Vec<SweepRowDto> = rows.into_iter().map(|r| r.expect("row computed")).collect();

    fs::create_dir_all(out_dir).map_err(|e| format!("cannot create {}: {e}", out_dir.display()))?;
    let limits = LimitsDto::from_config(&cfg);
    let mut jsonl = String::new();
    let mut csv = String::from("params,verdict,order,ratio,bound_ok\n");
    let mut summary = SweepSummary::default();
    for row in &rows {
        let report = ReportFile::new("sweep", &row.params, limits.clone(), Payload::SweepRow(row.clone()));
        let line = serde_json::to_string(&report).map_err(|e| e.to_string())?;
        jsonl.push_str(&line);
        jsonl.push('\n');
        csv.push_str(&csv_line(row));
        csv.push('\n');
        tally(&mut summary, row);

        let pretty = serde_json::to_string_pretty(&report).map_err(|e| e.to_string())?;
        let path = out_dir.join(format!("{}.json", file_stem(&row.params)));
        write_atomic(&path, &(pretty + "\n"))?;
    }
    write_atomic(&out_dir.join("reports.jsonl"), &jsonl)?;
    write_atomic(&out_dir.join("summary.csv"), &csv)?;
    Ok(summary)
}

fn write_atomic(path: &Path, contents: &str) -> Result<(), String> {
    let mut file = fs::File::create(path).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    file.write_all(contents.as_bytes())
        .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    Ok(())
}
