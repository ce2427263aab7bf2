//! Subcommand implementations. Batch commands process images on a worker
//! pool; per-image failures are collected into `<out>/errors.json`.

pub mod cluster;
pub mod evaluate;
pub mod loss_check;
pub mod pseudo_label;

use std::path::Path;
use std::sync::atomic::{AtomicBool, Ordering};

use rayon::prelude::*;
use serde::Serialize;

use crate::atomic::write_json;
use crate::error::{CliError, Result};
use crate::manifest::ImageEntry;

/// File listing per-image failures of the last batch run.
pub const ERRORS_FILE: &str = "errors.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FailureRecord {
    pub image: String,
    pub kind: String,
    pub message: String,
    pub exit_code: i32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BatchSummary {
    pub command: String,
    pub completed: usize,
    /// Images never started because an earlier failure stopped the run.
    pub skipped: usize,
    pub failures: Vec<FailureRecord>,
}

impl BatchSummary {
    pub fn succeeded(&self) -> bool {
        self.failures.is_empty()
    }

    /// 0 on success, otherwise the most severe per-image exit code.
    pub fn exit_code(&self) -> i32 {
        self.failures.iter().map(|f| f.exit_code).max().unwrap_or(0)
    }
}

pub(crate) fn thread_pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| CliError::Internal(format!("cannot start worker pool: {e}")))
}

/// Runs `job` for every image. Without `keep_going`, images not yet started
/// when a failure is seen are skipped. Failures are reported in manifest
/// order and written to `<out>/errors.json`; a clean run removes a stale one.
pub(crate) fn run_batch<F>(
    command: &str,
    images: &[ImageEntry],
    out: &Path,
    workers: usize,
    keep_going: bool,
    job: F,
) -> Result<BatchSummary>
where
    F: Fn(&ImageEntry) -> Result<()> + Sync,
{
    let pool = thread_pool(workers)?;
    let stop = AtomicBool::new(false);
    let results: Vec<Option<Result<()>>> = pool.install(|| {
        images
            .par_iter()
            .map(|entry| {
                if !keep_going && stop.load(Ordering::Relaxed) {
                    return None;
                }
                let r = job(entry);
                match &r {
                    Ok(()) => eprintln!("{command}: {} done", entry.id),
                    Err(_) => stop.store(true, Ordering::Relaxed),
                }
                Some(r)
            })
            .collect()
    });

    let mut summary =
        BatchSummary { command: command.to_string(), completed: 0, skipped: 0, failures: Vec::new() };
    for (entry, r) in images.iter().zip(results) {
        match r {
            None => summary.skipped += 1,
            Some(Ok(())) => summary.completed += 1,
            Some(Err(e)) => summary.failures.push(FailureRecord {
                image: entry.id.clone(),
                kind: e.kind().to_string(),
                message: e.to_string(),
                exit_code: e.exit_code(),
            }),
        }
    }

    let errors_path = out.join(ERRORS_FILE);
    if summary.succeeded() {
        match std::fs::remove_file(&errors_path) {
            Err(e) if e.kind() != std::io::ErrorKind::NotFound => {
                return Err(CliError::write(&errors_path, e))
            }
            _ => {}
        }
    } else {
        write_json(&errors_path, &summary)?;
    }
    Ok(summary)
}
