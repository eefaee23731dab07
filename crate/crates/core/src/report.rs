//! Pass/fail gates over a stored result table and its bounds table.

use serde::Serialize;

use crate::bounds::{convergence_lower_bound, empirical_convergence_time, FisherTrajectory};
use crate::error::{Error, Result};
use crate::montecarlo::{
    check_accuracy_matches_variance, check_competitiveness, check_unbiasedness, AccuracyReport, ExperimentResult,
};
use crate::pattern::MeetingPattern;
use crate::sync::Algorithm;
use crate::table::{trajectory_from_values, ResultTable, RunMeta};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    /// Largest tolerated fraction of cells failing the 4-sigma mean gate.
    pub unbiased_fraction: f64,
    /// `|var · c - 1|` tolerance; defaults to five variance standard errors.
    pub variance_tol: Option<f64>,
    /// Relative headroom on `var ≤ Δ₀/J`.
    pub competitive_tol: f64,
    /// Overrides the epsilon recorded with the run.
    pub epsilon: Option<f64>,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            unbiased_fraction: 0.005,
            variance_tol: None,
            competitive_tol: 0.05,
            epsilon: None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Gate {
    pub name: &'static str,
    pub passed: bool,
    pub skipped: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct GateReport {
    pub delta0: f64,
    pub trials: usize,
    pub gates: Vec<Gate>,
}

impl GateReport {
    pub fn passed(&self) -> bool {
        self.gates.iter().all(|g| g.passed)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("delta0 = {:.6}  trials = {}\n", self.delta0, self.trials);
        for g in &self.gates {
            let tag = match (g.skipped, g.passed) {
                (true, _) => "SKIP",
                (false, true) => "PASS",
                (false, false) => "FAIL",
            };
            s.push_str(&format!("{tag} {:<26} {}\n", g.name, g.detail));
        }
        s
    }
}

fn skipped(name: &'static str, why: &str) -> Gate {
    Gate {
        name,
        passed: true,
        skipped: true,
        detail: why.to_owned(),
    }
}

/// Combines a stored result table with its bounds and run metadata.
pub fn assemble(
    table: ResultTable,
    bounds_values: Vec<Vec<f64>>,
    meta: &RunMeta,
    pattern: &MeetingPattern,
) -> Result<(ExperimentResult, FisherTrajectory)> {
    let rounds = table.cells.len();
    let n = table.cells[0].len();
    if bounds_values.len() != rounds || bounds_values[0].len() != n {
        return Err(Error::MismatchedShapes(format!(
            "result is {rounds}x{n}, bounds are {}x{}",
            bounds_values.len(),
            bounds_values[0].len()
        )));
    }
    let fisher = trajectory_from_values(bounds_values, pattern, meta.noise_fisher())?;
    let result = ExperimentResult {
        cells: table.cells,
        algorithm: meta.algorithm,
        trials: meta.trials,
        delta0: meta.delta0,
        noise_variance: meta.noise_variance,
        fisher: fisher.clone(),
        tau_star: meta.tau_star,
        accuracy_deterministic: true,
    };
    if meta.algorithm == Algorithm::Alg && result.cells.iter().flatten().any(|c| c.accuracy.is_none()) {
        return Err(Error::MismatchedShapes("ALG result is missing accuracy values".into()));
    }
    Ok((result, fisher))
}

pub fn evaluate(
    result: &ExperimentResult,
    fisher: &FisherTrajectory,
    pattern: &MeetingPattern,
    initial_fi: &[f64],
    run_epsilon: Option<f64>,
    th: &Thresholds,
) -> Result<GateReport> {
    let mut gates = Vec::new();
    let is_alg = result.algorithm == Algorithm::Alg;

    gates.push(match result.tau_star.fixed_value() {
        Some(tau) => {
            let rep = check_unbiasedness(result, tau);
            let frac = rep.violation_fraction();
            Gate {
                name: "unbiased",
                passed: frac <= th.unbiased_fraction,
                skipped: false,
                detail: format!(
                    "{} of {} cells beyond 4 sigma ({:.3}%, limit {:.3}%, expected by chance {:.2})",
                    rep.violations.len(),
                    rep.cells,
                    100.0 * frac,
                    100.0 * th.unbiased_fraction,
                    rep.expected_false_positives
                ),
            }
        }
        None => skipped("unbiased", "tau* varies per trial"),
    });

    gates.push(match check_accuracy_matches_variance(result, th.variance_tol) {
        AccuracyReport::NotApplicable => skipped("accuracy_matches_variance", "baseline keeps no accuracy"),
        AccuracyReport::Checked {
            rel_tol,
            max_deviation,
            violations,
        } => Gate {
            name: "accuracy_matches_variance",
            passed: violations.is_empty(),
            skipped: false,
            detail: format!(
                "max |var*c - 1| = {max_deviation:.4} (tol {rel_tol:.4}), {} cells outside",
                violations.len()
            ),
        },
    });

    if is_alg {
        let rep = check_competitiveness(result, fisher, result.delta0, th.competitive_tol)?;
        gates.push(Gate {
            name: "competitive_ratio",
            passed: rep.statistical_violations.is_empty(),
            skipped: false,
            detail: format!(
                "max var*J = {:.4} vs delta0 = {:.4} (+{:.0}%), {} cells above",
                rep.max_ratio,
                result.delta0,
                100.0 * th.competitive_tol,
                rep.statistical_violations.len()
            ),
        });
        gates.push(Gate {
            name: "exact_accuracy_bound",
            passed: rep.exact_violations.is_empty() && rep.per_event_violations.is_empty(),
            skipped: false,
            detail: format!(
                "min c*delta0/J = {:.12}, {} cells and {} events below",
                rep.min_exact_margin,
                rep.exact_violations.len(),
                rep.per_event_violations.len()
            ),
        });
    } else {
        gates.push(skipped("competitive_ratio", "applies to ALG only"));
        gates.push(skipped("exact_accuracy_bound", "applies to ALG only"));
    }

    let epsilon = th.epsilon.or(run_epsilon).unwrap_or(0.1);
    let bound = convergence_lower_bound(epsilon, initial_fi, fisher.noise_fi);
    let t = empirical_convergence_time(&result.variances(), pattern, epsilon);
    gates.push(Gate {
        name: "convergence_time",
        passed: t >= bound.bound,
        skipped: false,
        detail: format!(
            "epsilon = {epsilon}: T = {t} >= bound {:.4} (J0 = {:.4})",
            bound.bound, bound.j0_median
        ),
    });

    Ok(GateReport {
        delta0: result.delta0,
        trials: result.trials,
        gates,
    })
}
