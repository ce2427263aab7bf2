use spectral_vote_core::gradcheck::{run_gradient_checks, GradCheckConfig, GradCheckReport};

use crate::error::{CliError, Result};

/// Finite-difference check of the Dice, ranking and total loss gradients.
/// `fault` perturbs one analytic gradient entry, to prove a bad gradient
/// is caught.
pub fn run(seed: u64, trials: usize, fault: Option<f64>) -> Result<GradCheckReport> {
    if trials == 0 {
        return Err(CliError::Invalid("--trials must be at least 1".into()));
    }
    let config = GradCheckConfig { seed, trials, fault, ..GradCheckConfig::default() };
    Ok(run_gradient_checks(&config))
}

pub fn format_report(report: &GradCheckReport) -> String {
    let verdict = |v: f64| if v <= report.tolerance { "ok" } else { "FAIL" };
    format!(
        "trials {}  tolerance {:e}\ndice     max |analytic - numeric| = {:.3e}  {}\nranking  max |analytic - numeric| = {:.3e}  {}\ntotal    max |analytic - numeric| = {:.3e}  {}\n",
        report.trials,
        report.tolerance,
        report.dice,
        verdict(report.dice),
        report.ranking,
        verdict(report.ranking),
        report.total,
        verdict(report.total),
    )
}
