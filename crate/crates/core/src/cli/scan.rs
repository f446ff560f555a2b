//! Batch certification over a box of `(m, d, p)`.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use rayon::prelude::*;

use super::cache::{ClassCache, LoadStats};
use super::record::{ReportRecord, CSV_HEADER};
use super::CliError;
use crate::arith::{gcd, is_squarefree, odd_primes_up_to};
use crate::criterion::{audit_report, certify_with, CertConfig, CertReport, Route, Verdict};
use crate::quadratic::splits_completely;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone)]
pub struct ScanConfig {
    pub m_max: i64,
    pub d_max: i64,
    pub p_max: u64,
    pub precision_cap: u32,
    pub jobs: usize,
    pub out_path: PathBuf,
    pub format: OutputFormat,
    pub cache_path: Option<PathBuf>,
}

impl ScanConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.m_max < 1 || self.d_max < 1 || self.p_max < 1 || self.precision_cap < 1 || self.jobs < 1 {
            return Err(CliError::Config("all bounds, the precision cap and --jobs must be at least 1".into()));
        }
        Ok(())
    }
}

/// Every `(m, d, p)` in the box with `m, d` squarefree and coprime, `d ≥ 2`,
/// and `p` an odd prime splitting completely, in lexicographic order.
pub fn scan_tasks(m_max: i64, d_max: i64, p_max: u64) -> Vec<(i64, i64, u64)> {
    let primes = odd_primes_up_to(p_max);
    let mut tasks = Vec::new();
    for m in (1..=m_max).filter(|&m| is_squarefree(m)) {
        for d in (2..=d_max).filter(|&d| is_squarefree(d) && gcd(m, d) == 1) {
            for &p in &primes {
                if splits_completely(m, d, p) {
                    tasks.push((m, d, p));
                }
            }
        }
    }
    tasks
}

#[derive(Debug, Clone)]
pub struct ScanOutcome {
    pub reports: Vec<CertReport>,
    pub counts: BTreeMap<(Verdict, Route), usize>,
    pub audit_failures: Vec<String>,
    pub cache_stats: Option<LoadStats>,
}

impl ScanOutcome {
    pub fn count(&self, verdict: Verdict) -> usize {
        self.counts
            .iter()
            .filter(|((v, _), _)| *v == verdict)
            .map(|(_, n)| n)
            .sum()
    }

    pub fn summary_line(&self) -> String {
        let parts: Vec<String> = self
            .counts
            .iter()
            .map(|((v, r), n)| format!("{v}/{r}={n}"))
            .collect();
        format!("rows={} {}", self.reports.len(), parts.join(" "))
    }
}

pub fn run_scan(config: &ScanConfig) -> Result<ScanOutcome, CliError> {
    config.validate()?;
    // fail on an unwritable destination before doing any work
    let file = File::create(&config.out_path).map_err(|e| CliError::io(&config.out_path, e))?;

    let (mut cache, cache_stats) = match &config.cache_path {
        Some(path) => {
            let (c, s) = ClassCache::open(path)?;
            (c, Some(s))
        }
        None => (ClassCache::in_memory(), None),
    };

    let tasks = scan_tasks(config.m_max, config.d_max, config.p_max);
    let mut radicands: Vec<i64> = Vec::new();
    for &(m, d, _) in &tasks {
        radicands.extend([-m, d, -(m * d)]);
    }
    radicands.sort_unstable();
    radicands.dedup();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .map_err(|e| CliError::Config(e.to_string()))?;
    let cert_config = CertConfig {
        precision_cap: config.precision_cap,
        ..CertConfig::default()
    };

    let reports: Vec<CertReport> = pool.install(|| -> Result<_, CliError> {
        cache.warm(&radicands)?;
        let snapshot = &cache;
        Ok(tasks
            .par_iter()
            .map(|&(m, d, p)| certify_with(m, d, p, &cert_config, snapshot))
            .collect())
    })?;

    let mut counts = BTreeMap::new();
    let mut audit_failures = Vec::new();
    for r in &reports {
        *counts.entry((r.verdict, r.route)).or_insert(0) += 1;
        if let Err(e) = audit_report(r) {
            audit_failures.push(format!("({}, {}, {}): {e}", r.m, r.d, r.p));
        }
    }

    write_reports(file, config, &reports)?;
    Ok(ScanOutcome {
        reports,
        counts,
        audit_failures,
        cache_stats,
    })
}

fn write_reports(file: File, config: &ScanConfig, reports: &[CertReport]) -> Result<(), CliError> {
    let path = &config.out_path;
    match config.format {
        OutputFormat::Csv => {
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(BufWriter::new(file));
            w.write_record(CSV_HEADER).map_err(|e| CliError::csv(path, e))?;
            for r in reports {
                w.write_record(ReportRecord::from(r).csv_row())
                    .map_err(|e| CliError::csv(path, e))?;
            }
            w.flush().map_err(|e| CliError::io(path, e))?;
        }
        OutputFormat::Json => {
            let mut w = BufWriter::new(file);
            for r in reports {
                writeln!(w, "{}", ReportRecord::from(r).to_json_line()).map_err(|e| CliError::io(path, e))?;
            }
            w.flush().map_err(|e| CliError::io(path, e))?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn task_box() {
        let tasks = scan_tasks(3, 3, 13);
        assert!(tasks.contains(&(1, 3, 13)));
        assert!(!tasks.iter().any(|&(m, d, _)| gcd(m, d) != 1));
        let mut sorted = tasks.clone();
        sorted.sort();
        assert_eq!(sorted, tasks);
    }

    #[test]
    fn small_scan_writes_csv() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("scan.csv");
        let cfg = ScanConfig {
            m_max: 3,
            d_max: 5,
            p_max: 30,
            precision_cap: 128,
            jobs: 2,
            out_path: out.clone(),
            format: OutputFormat::Csv,
            cache_path: None,
        };
        let outcome = run_scan(&cfg).unwrap();
        assert!(outcome.audit_failures.is_empty());
        let text = std::fs::read_to_string(&out).unwrap();
        assert!(text.starts_with("m,d,p,h_m,h_d,h_g,r,t,verdict,route,precision,alpha,notes\n"));
        assert!(text.contains("\n1,3,13,1,1,1,1,,CERTIFIED_ZERO,R1,"));
        assert!(!text.contains('\r'));
    }

    #[test]
    fn unwritable_output_is_an_error() {
        let cfg = ScanConfig {
            m_max: 1,
            d_max: 2,
            p_max: 20,
            precision_cap: 64,
            jobs: 1,
            out_path: PathBuf::from("/nonexistent-dir/out.csv"),
            format: OutputFormat::Csv,
            cache_path: None,
        };
        assert!(matches!(run_scan(&cfg), Err(CliError::Io { .. })));
    }
}
