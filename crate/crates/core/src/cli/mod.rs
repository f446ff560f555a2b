//! Batch scans, the class-number cache, report formats and self-checks used
//! by the `iwasawa-biquad` binary.

use std::path::{Path, PathBuf};

use thiserror::Error;

pub mod cache;
pub mod record;
pub mod scan;
pub mod selfcheck;

pub use cache::{CacheEntry, ClassCache};
pub use record::{ReportRecord, CSV_HEADER};
pub use scan::{run_scan, scan_tasks, OutputFormat, ScanConfig, ScanOutcome};
pub use selfcheck::{run_selfcheck, Fault, SelfcheckConfig, Suite, SuiteResult};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("invalid configuration: {0}")]
    Config(String),
}

impl CliError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub(crate) fn csv(path: &Path, source: csv::Error) -> Self {
        Self::Csv {
            path: path.to_path_buf(),
            source,
        }
    }
}
