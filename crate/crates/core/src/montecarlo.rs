//! Multi-trial experiments and the statistical gates run on their output.
//!
//! Trial `k` uses its own ChaCha stream derived from the master seed, so any
//! single trial can be replayed in isolation. Trials are grouped into chunks
//! whose boundaries depend only on the trial count; chunk moments are merged
//! in chunk order, which makes results independent of the worker count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{fi_recursion_anchored, FisherTrajectory, NoiseFisher};
use crate::dist::{DistributionSpec, Family};
use crate::error::{Error, Result};
use crate::pattern::{validate_independence, MeetingPattern};
use crate::stats::Moments;
use crate::sync::{run_trial, Algorithm, RunOptions, SensorState, TrialSetup, TrialTrajectory};

/// How the true start time is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum TauPolicy {
    Fixed(f64),
    /// A fresh uniform draw from `[lo, hi)` for every trial.
    Uniform(f64, f64),
}

impl Default for TauPolicy {
    fn default() -> Self {
        TauPolicy::Fixed(0.0)
    }
}

impl TauPolicy {
    pub fn fixed_value(&self) -> Option<f64> {
        match *self {
            TauPolicy::Fixed(t) => Some(t),
            TauPolicy::Uniform(..) => None,
        }
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            TauPolicy::Fixed(t) => t,
            TauPolicy::Uniform(lo, hi) => rng.random_range(lo..hi),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig<F = DistributionSpec, N = DistributionSpec> {
    pub pattern: MeetingPattern,
    pub assignment: Vec<F>,
    pub noise: N,
    pub algorithm: Algorithm,
    pub trials: usize,
    pub tau_star: TauPolicy,
    pub seed: u64,
    /// `anchored[a]` sensors never update. Empty means none.
    pub anchored: Vec<bool>,
    /// Worker threads; `None` uses the available parallelism.
    pub workers: Option<usize>,
}

impl<F: Family, N: Family> ExperimentConfig<F, N> {
    pub fn new(pattern: MeetingPattern, assignment: Vec<F>, noise: N, trials: usize, seed: u64) -> Self {
        Self {
            pattern,
            assignment,
            noise,
            algorithm: Algorithm::Alg,
            trials,
            tau_star: TauPolicy::default(),
            seed,
            anchored: Vec::new(),
            workers: None,
        }
    }

    fn anchored_mask(&self) -> Vec<bool> {
        if self.anchored.is_empty() {
            vec![false; self.pattern.n()]
        } else {
            self.anchored.clone()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.trials < 2 {
            return Err(Error::Config(format!("need at least two trials, got {}", self.trials)));
        }
        if !self.anchored.is_empty() && self.anchored.len() != self.pattern.n() {
            return Err(Error::MismatchedShapes(format!(
                "anchored mask has {} entries for {} sensors",
                self.anchored.len(),
                self.pattern.n()
            )));
        }
        if let TauPolicy::Uniform(lo, hi) = self.tau_star {
            if !(lo < hi && lo.is_finite() && hi.is_finite()) {
                return Err(Error::Config(format!("bad uniform tau* interval [{lo}, {hi})")));
            }
        }
        Ok(())
    }
}

/// Random source for trial `k` of an experiment seeded with `seed`.
pub fn trial_rng(seed: u64, k: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k);
    rng
}

/// One `(round, sensor)` cell of an experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellStats {
    pub mean: f64,
    pub variance: f64,
    /// `None` for the midpoint baseline, which keeps no accuracy.
    pub accuracy: Option<f64>,
    pub fi_bound: f64,
    pub var_floor: f64,
    /// `variance · J`; `None` for the baseline.
    pub ratio_var_times_j: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    /// `cells[t][a]`.
    pub cells: Vec<Vec<CellStats>>,
    pub algorithm: Algorithm,
    pub trials: usize,
    pub delta0: f64,
    pub noise_variance: f64,
    pub fisher: FisherTrajectory,
    pub tau_star: TauPolicy,
    /// Whether every trial produced the same accuracy sequence.
    pub accuracy_deterministic: bool,
}

impl ExperimentResult {
    pub fn n(&self) -> usize {
        self.cells[0].len()
    }

    pub fn rounds(&self) -> usize {
        self.cells.len()
    }

    pub fn variances(&self) -> Vec<Vec<f64>> {
        self.cells
            .iter()
            .map(|r| r.iter().map(|c| c.variance).collect())
            .collect()
    }

    pub fn means(&self) -> Vec<Vec<f64>> {
        self.cells.iter().map(|r| r.iter().map(|c| c.mean).collect()).collect()
    }
}

struct Partial {
    moments: Vec<Moments>,
    accuracy_ok: bool,
}

/// Accuracy sequence of a trial; it does not depend on any random draw.
fn accuracy_table<F: Family, N: Family>(setup: &TrialSetup<'_, F, N>) -> Vec<Vec<f64>> {
    let mut rng = trial_rng(0, 0);
    let mut table = Vec::new();
    setup.simulate(0.0, &mut rng, |_, s| table.push(s.iter().map(|x| x.accuracy).collect()));
    table
}

pub fn run_experiment<F: Family, N: Family>(config: &ExperimentConfig<F, N>) -> Result<ExperimentResult> {
    config.validate()?;
    let anchored = config.anchored_mask();
    let setup = TrialSetup::new(
        &config.pattern,
        &config.assignment,
        &config.noise,
        config.algorithm,
        &anchored,
    )?;
    validate_independence(&config.pattern).into_result()?;

    let n = config.pattern.n();
    let rounds = config.pattern.depth() + 1;
    let reference = accuracy_table(&setup);

    let chunk = (config.trials.div_ceil(256)).max(256);
    let starts: Vec<usize> = (0..config.trials).step_by(chunk).collect();
    let run_chunk = |&start: &usize| {
        let mut partial = Partial {
            moments: vec![Moments::default(); rounds * n],
            accuracy_ok: true,
        };
        for k in start..(start + chunk).min(config.trials) {
            let mut rng = trial_rng(config.seed, k as u64);
            let tau = config.tau_star.draw(&mut rng);
            setup.simulate(tau, &mut rng, |t, states: &[SensorState]| {
                let row = &mut partial.moments[t * n..(t + 1) * n];
                for ((m, s), c) in row.iter_mut().zip(states).zip(&reference[t]) {
                    m.push(s.opinion);
                    partial.accuracy_ok &= s.accuracy == *c;
                }
            });
        }
        partial
    };

    let partials: Vec<Partial> = match config.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .map_err(|e| Error::Config(format!("worker pool: {e}")))?
            .install(|| starts.par_iter().map(run_chunk).collect()),
        None => starts.par_iter().map(run_chunk).collect(),
    };

    let mut total = vec![Moments::default(); rounds * n];
    let mut accuracy_ok = true;
    for p in &partials {
        for (acc, m) in total.iter_mut().zip(&p.moments) {
            acc.merge(m);
        }
        accuracy_ok &= p.accuracy_ok;
    }

    let initial_fi = config
        .assignment
        .iter()
        .map(|f| f.fisher_information())
        .collect::<Result<Vec<_>>>()?;
    let noise_fi = NoiseFisher::from_value(config.noise.fisher_information()?);
    let fisher = fi_recursion_anchored(&config.pattern, &initial_fi, noise_fi, &anchored)?;

    let mut delta0 = config.noise.fisher_tightness()?;
    for f in &config.assignment {
        delta0 = delta0.max(f.fisher_tightness()?);
    }

    let is_alg = config.algorithm == Algorithm::Alg;
    let cells = (0..rounds)
        .map(|t| {
            (0..n)
                .map(|a| {
                    let m = &total[t * n + a];
                    let j = fisher.values[t][a];
                    CellStats {
                        mean: m.mean(),
                        variance: m.variance(),
                        accuracy: is_alg.then_some(reference[t][a]),
                        fi_bound: j,
                        var_floor: 1.0 / j,
                        ratio_var_times_j: is_alg.then_some(m.variance() * j),
                    }
                })
                .collect()
        })
        .collect();

    Ok(ExperimentResult {
        cells,
        algorithm: config.algorithm,
        trials: config.trials,
        delta0,
        noise_variance: config.noise.variance(),
        fisher,
        tau_star: config.tau_star,
        accuracy_deterministic: accuracy_ok,
    })
}

/// Re-runs trial `k` alone and returns its full trajectory.
pub fn replay_trial<F: Family, N: Family>(config: &ExperimentConfig<F, N>, k: usize) -> Result<TrialTrajectory> {
    let mut rng = trial_rng(config.seed, k as u64);
    let tau = config.tau_star.draw(&mut rng);
    run_trial(
        &config.pattern,
        &config.assignment,
        &config.noise,
        tau,
        config.algorithm,
        &config.anchored_mask(),
        &mut rng,
        RunOptions {
            skip_validation: true,
            seed: Some(config.seed),
        },
    )
}

/// A `(round, sensor)` cell that failed a gate, with the offending statistic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellViolation {
    pub round: usize,
    pub sensor: usize,
    pub value: f64,
}

pub const UNBIASED_SIGMAS: f64 = 4.0;

#[derive(Debug, Clone)]
pub struct UnbiasednessReport {
    pub cells: usize,
    /// `value` is the z-score `|mean - τ*| / sqrt(var / trials)`.
    pub violations: Vec<CellViolation>,
    /// Expected number of violations from sampling error alone (two-sided
    /// Gaussian tail at the gate).
    pub expected_false_positives: f64,
}

impl UnbiasednessReport {
    pub fn violation_fraction(&self) -> f64 {
        self.violations.len() as f64 / self.cells as f64
    }
}

/// `P(|Z| > 4)` for a standard normal.
const TWO_SIDED_TAIL_4SIGMA: f64 = 6.334_248_366_623_996e-5;

/// Flags cells where the empirical mean sits more than four standard errors
/// from `τ*`.
pub fn check_unbiasedness(result: &ExperimentResult, tau_star: f64) -> UnbiasednessReport {
    let trials = result.trials as f64;
    let mut violations = Vec::new();
    for (t, row) in result.cells.iter().enumerate() {
        for (a, c) in row.iter().enumerate() {
            let err = (c.mean - tau_star).abs();
            let se = (c.variance / trials).sqrt();
            let z = if se > 0.0 {
                err / se
            } else if err <= 1e-12 * tau_star.abs().max(1.0) {
                0.0
            } else {
                f64::INFINITY
            };
            if z > UNBIASED_SIGMAS {
                violations.push(CellViolation {
                    round: t,
                    sensor: a,
                    value: z,
                });
            }
        }
    }
    let cells = result.rounds() * result.n();
    UnbiasednessReport {
        cells,
        violations,
        expected_false_positives: cells as f64 * TWO_SIDED_TAIL_4SIGMA,
    }
}

/// Default tolerance for `|var · c - 1|`: five standard errors of a
/// Gaussian sample variance.
pub fn default_variance_tolerance(trials: usize) -> f64 {
    5.0 * (2.0 / trials as f64).sqrt()
}

#[derive(Debug, Clone)]
pub enum AccuracyReport {
    /// The baseline keeps no accuracy.
    NotApplicable,
    Checked {
        rel_tol: f64,
        max_deviation: f64,
        /// `value` is `var · c`.
        violations: Vec<CellViolation>,
    },
}

impl AccuracyReport {
    pub fn passed(&self) -> bool {
        match self {
            AccuracyReport::NotApplicable => true,
            AccuracyReport::Checked { violations, .. } => violations.is_empty(),
        }
    }
}

/// Checks that the accuracy is the reciprocal of the empirical variance.
pub fn check_accuracy_matches_variance(result: &ExperimentResult, rel_tol: Option<f64>) -> AccuracyReport {
    if result.algorithm != Algorithm::Alg {
        return AccuracyReport::NotApplicable;
    }
    let rel_tol = rel_tol.unwrap_or_else(|| default_variance_tolerance(result.trials));
    let mut violations = Vec::new();
    let mut max_deviation: f64 = 0.0;
    for (t, row) in result.cells.iter().enumerate() {
        for (a, c) in row.iter().enumerate() {
            let product = c.variance * c.accuracy.expect("ALG cells carry accuracy");
            let dev = (product - 1.0).abs();
            max_deviation = max_deviation.max(dev);
            if dev > rel_tol {
                violations.push(CellViolation {
                    round: t,
                    sensor: a,
                    value: product,
                });
            }
        }
    }
    AccuracyReport::Checked {
        rel_tol,
        max_deviation,
        violations,
    }
}

/// Relative slack allowed on the exact accuracy-versus-FI inequalities to
/// absorb floating-point rounding.
pub const EXACT_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Default)]
pub struct CompetitivenessReport {
    /// Cells with `c · Δ₀ < J`; `value` is `c · Δ₀ / J`.
    pub exact_violations: Vec<CellViolation>,
    /// Events whose accuracy gain falls below `(1/Δ₀)/(1/J_b + 1/J_N)`;
    /// `value` is gain divided by that threshold.
    pub per_event_violations: Vec<CellViolation>,
    /// Cells with `var > (Δ₀/J)(1 + tol)`; `value` is `var · J / Δ₀`.
    pub statistical_violations: Vec<CellViolation>,
    /// Largest `var · J` observed.
    pub max_ratio: f64,
    /// Smallest `c · Δ₀ / J` observed.
    pub min_exact_margin: f64,
}

impl CompetitivenessReport {
    pub fn passed(&self) -> bool {
        self.exact_violations.is_empty()
            && self.per_event_violations.is_empty()
            && self.statistical_violations.is_empty()
    }
}

/// Accuracy against the FI bound: exactly (`c · Δ₀ ≥ J` per cell and the
/// per-event gain inequality) and statistically (`var ≤ Δ₀/J · (1 + tol)`).
pub fn check_competitiveness(
    result: &ExperimentResult,
    traj: &FisherTrajectory,
    delta0: f64,
    rel_tol: f64,
) -> Result<CompetitivenessReport> {
    if result.algorithm != Algorithm::Alg {
        return Err(Error::Config("competitiveness applies to ALG only".into()));
    }
    if traj.rounds() != result.rounds() || traj.n() != result.n() {
        return Err(Error::MismatchedShapes(format!(
            "result is {}x{}, FI trajectory is {}x{}",
            result.rounds(),
            result.n(),
            traj.rounds(),
            traj.n()
        )));
    }
    let mut report = CompetitivenessReport {
        min_exact_margin: f64::INFINITY,
        ..Default::default()
    };
    let accuracy = |t: usize, a: usize| result.cells[t][a].accuracy.expect("ALG cells carry accuracy");

    for (t, row) in result.cells.iter().enumerate() {
        for (a, c) in row.iter().enumerate() {
            let j = traj.values[t][a];
            let margin = accuracy(t, a) * delta0 / j;
            report.min_exact_margin = report.min_exact_margin.min(margin);
            if margin < 1.0 - EXACT_SLACK {
                report.exact_violations.push(CellViolation {
                    round: t,
                    sensor: a,
                    value: margin,
                });
            }
            let ratio = c.variance * j;
            report.max_ratio = report.max_ratio.max(ratio);
            if c.variance > delta0 / j * (1.0 + rel_tol) {
                report.statistical_violations.push(CellViolation {
                    round: t,
                    sensor: a,
                    value: ratio / delta0,
                });
            }
        }
    }

    for step in &traj.steps {
        let (t, a) = (step.event.round, step.event.observer);
        let gain = accuracy(t + 1, a) - accuracy(t, a);
        let need = traj.noise_fi.increment(step.observed_fi) / delta0;
        if step.increment > 0.0 && gain < need * (1.0 - EXACT_SLACK) {
            report.per_event_violations.push(CellViolation {
                round: t,
                sensor: a,
                value: gain / need,
            });
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KappaPoint {
    pub depth: usize,
    /// Max of `var · J` at the final round over fully active sensors.
    pub kappa_hat: f64,
    /// Max final-round variance over the same sensors.
    pub max_final_variance: f64,
}

/// Runs each configuration and reports `κ̂` at its final round.
///
/// Only sensors that observed in every round of the pattern are considered,
/// i.e. the sensors that actually reached the pattern's depth. At depth 0
/// that is every sensor.
pub fn kappa_trend<F: Family, N: Family>(configs: &[ExperimentConfig<F, N>]) -> Result<Vec<KappaPoint>> {
    let mut out = Vec::with_capacity(configs.len());
    for config in configs {
        let result = run_experiment(config)?;
        let depth = config.pattern.depth();
        let counts = config.pattern.observation_counts(depth);
        let last = &result.cells[depth];
        let mut point = KappaPoint {
            depth,
            kappa_hat: 0.0,
            max_final_variance: 0.0,
        };
        for c in last.iter().zip(&counts).filter(|(_, &k)| k == depth).map(|(c, _)| c) {
            point.kappa_hat = point.kappa_hat.max(c.variance * c.fi_bound);
            point.max_final_variance = point.max_final_variance.max(c.variance);
        }
        out.push(point);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::{gen_random_independent, gen_tournament, MeetingEvent};

    struct ZeroDraw;
    impl Family for ZeroDraw {
        fn sample<R: Rng + ?Sized>(&self, _: &mut R) -> f64 {
            0.0
        }
        fn variance(&self) -> f64 {
            1.0
        }
        fn fisher_information(&self) -> Result<f64> {
            Ok(1.0)
        }
    }

    fn gauss(v: f64) -> DistributionSpec {
        DistributionSpec::gaussian(v).unwrap()
    }

    fn pair() -> MeetingPattern {
        MeetingPattern::new(2, vec![MeetingEvent::new(0, 0, 1)]).unwrap()
    }

    #[test]
    fn degenerate_sources_give_zero_variance() {
        let p = gen_tournament(4, &mut trial_rng(1, 0)).unwrap();
        let cfg = ExperimentConfig::new(p, vec![ZeroDraw, ZeroDraw, ZeroDraw, ZeroDraw], ZeroDraw, 2, 1);
        let r = run_experiment(&cfg).unwrap();
        assert!(r.cells.iter().flatten().all(|c| c.variance == 0.0 && c.mean == 0.0));
        assert!(check_unbiasedness(&r, 0.0).violations.is_empty());
    }

    #[test]
    fn two_sensor_variance_matches_accuracy() {
        let cfg = ExperimentConfig::new(pair(), vec![gauss(1.0); 2], gauss(1.0), 100_000, 42);
        let r = run_experiment(&cfg).unwrap();
        let c = r.cells[1][0];
        assert_eq!(c.accuracy, Some(1.5));
        assert!((c.variance - 2.0 / 3.0).abs() / (2.0 / 3.0) < 0.03, "{}", c.variance);
        assert!(r.accuracy_deterministic);
        assert_eq!(r.delta0, 1.0);
    }

    #[test]
    fn results_are_reproducible_and_worker_independent() {
        let p = gen_random_independent(10, 3, 0.6, &mut trial_rng(5, 0)).unwrap();
        let mut cfg = ExperimentConfig::new(
            p,
            vec![DistributionSpec::logistic(1.0).unwrap(); 10],
            gauss(0.5),
            3000,
            9,
        );
        cfg.workers = Some(1);
        let a = run_experiment(&cfg).unwrap();
        cfg.workers = Some(4);
        let b = run_experiment(&cfg).unwrap();
        assert_eq!(a.cells, b.cells);
    }

    #[test]
    fn replayed_trial_matches_its_stream() {
        let p = gen_tournament(8, &mut trial_rng(2, 0)).unwrap();
        let cfg = ExperimentConfig::new(p, vec![gauss(1.0); 8], gauss(1.0), 10, 3);
        let t1 = replay_trial(&cfg, 7).unwrap();
        let t2 = replay_trial(&cfg, 7).unwrap();
        assert_eq!(t1, t2);
        assert_ne!(t1, replay_trial(&cfg, 6).unwrap());
    }

    #[test]
    fn rejects_bad_configs() {
        let cfg = ExperimentConfig::new(pair(), vec![gauss(1.0); 2], gauss(1.0), 1, 0);
        assert!(run_experiment(&cfg).is_err());
        let cfg = ExperimentConfig::new(pair(), vec![gauss(1.0)], gauss(1.0), 10, 0);
        assert!(matches!(run_experiment(&cfg), Err(Error::AssignmentIncomplete { .. })));
        let bad = MeetingPattern::new(2, vec![MeetingEvent::new(0, 0, 1), MeetingEvent::new(1, 1, 0)]).unwrap();
        let cfg = ExperimentConfig::new(bad, vec![gauss(1.0); 2], gauss(1.0), 10, 0);
        assert!(matches!(run_experiment(&cfg), Err(Error::PatternNotIndependent { .. })));
        let mut cfg = ExperimentConfig::new(pair(), vec![gauss(1.0); 2], gauss(1.0), 10, 0);
        cfg.tau_star = TauPolicy::Uniform(1.0, 1.0);
        assert!(run_experiment(&cfg).is_err());
    }

    #[test]
    fn midpoint_skips_accuracy_checks() {
        let mut cfg = ExperimentConfig::new(pair(), vec![gauss(1.0); 2], gauss(1.0), 100, 0);
        cfg.algorithm = Algorithm::Midpoint;
        let r = run_experiment(&cfg).unwrap();
        assert!(matches!(
            check_accuracy_matches_variance(&r, None),
            AccuracyReport::NotApplicable
        ));
        assert!(r.cells[1][0].ratio_var_times_j.is_none());
        assert!(check_competitiveness(&r, &r.fisher, 1.0, 0.05).is_err());
    }

    #[test]
    fn round_zero_accuracy_matches_variance() {
        let specs = vec![DistributionSpec::logistic(1.0).unwrap(), gauss(2.0)];
        let cfg = ExperimentConfig::new(pair(), specs, gauss(1.0), 40_000, 17);
        let r = run_experiment(&cfg).unwrap();
        assert!(check_accuracy_matches_variance(&r, None).passed());
        let rep = check_competitiveness(&r, &r.fisher, r.delta0, 0.05).unwrap();
        assert!(rep.passed(), "{rep:?}");
    }

    #[test]
    fn competitiveness_shape_mismatch() {
        let cfg = ExperimentConfig::new(pair(), vec![gauss(1.0); 2], gauss(1.0), 10, 0);
        let r = run_experiment(&cfg).unwrap();
        let other = ExperimentConfig::new(
            MeetingPattern::empty(2).unwrap(),
            vec![gauss(1.0); 2],
            gauss(1.0),
            10,
            0,
        );
        let r2 = run_experiment(&other).unwrap();
        assert!(matches!(
            check_competitiveness(&r, &r2.fisher, 1.0, 0.05),
            Err(Error::MismatchedShapes(_))
        ));
    }

    #[test]
    fn uniform_tau_draws_per_trial() {
        let mut cfg = ExperimentConfig::new(pair(), vec![gauss(1.0); 2], gauss(1.0), 5000, 0);
        cfg.tau_star = TauPolicy::Uniform(0.0, 100.0);
        let r = run_experiment(&cfg).unwrap();
        // spread of τ* dominates the variance
        assert!(r.cells[0][0].variance > 500.0);
    }

    #[test]
    fn kappa_at_depth_zero_is_worst_tightness() {
        let mix = DistributionSpec::mixture2(0.5, 1.0, 0.25).unwrap();
        let cfg = ExperimentConfig::new(
            MeetingPattern::empty(3).unwrap(),
            vec![mix, gauss(1.0), gauss(1.0)],
            gauss(1.0),
            40_000,
            1,
        );
        let k = kappa_trend(&[cfg]).unwrap();
        let want = mix.fisher_tightness().unwrap();
        assert_eq!(k[0].depth, 0);
        assert!((k[0].kappa_hat - want).abs() / want < 0.05, "{:?}", k[0]);
    }

    #[test]
    fn tau_policy_json() {
        let f: TauPolicy = serde_json::from_str(r#"{"fixed":0.0}"#).unwrap();
        assert_eq!(f, TauPolicy::Fixed(0.0));
        let u: TauPolicy = serde_json::from_str(r#"{"uniform":[-5.0,5.0]}"#).unwrap();
        assert_eq!(u, TauPolicy::Uniform(-5.0, 5.0));
    }
}
