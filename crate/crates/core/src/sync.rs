//! The weighted-average synchronization rule and the trial runner.
//!
//! A sensor keeps exactly two numbers: its opinion of the global start time
//! and an accuracy that tracks the reciprocal of the opinion's variance.
//! Observing another sensor costs a constant amount of arithmetic.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dist::Family;
use crate::error::{Error, Result};
use crate::pattern::{validate_independence, MeetingEvent, MeetingPattern};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensorState {
    pub opinion: f64,
    pub accuracy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    /// Accuracy-weighted average.
    Alg,
    /// Unweighted halfway step, kept as a comparison baseline.
    Midpoint,
}

impl std::str::FromStr for Algorithm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "alg" => Ok(Algorithm::Alg),
            "midpoint" => Ok(Algorithm::Midpoint),
            other => Err(Error::Config(format!("unknown algorithm {other:?}"))),
        }
    }
}

pub fn init_state<F: Family, R: Rng + ?Sized>(spec: &F, tau_star: f64, rng: &mut R) -> SensorState {
    SensorState {
        opinion: tau_star + spec.sample(rng),
        accuracy: 1.0 / spec.variance(),
    }
}

/// Noisy reading of `x_b - x_a`.
pub fn measure<N: Family, R: Rng + ?Sized>(x_a: f64, x_b: f64, noise: &N, rng: &mut R) -> f64 {
    x_b - x_a + noise.sample(rng)
}

/// The observed sensor's accuracy discounted by the measurement noise.
#[inline]
pub fn reduced_accuracy(c_b: f64, noise_variance: f64) -> f64 {
    c_b / (1.0 + c_b * noise_variance)
}

#[inline]
pub fn observe_update_alg(state: SensorState, c_b: f64, d_tilde: f64, noise_variance: f64) -> SensorState {
    let c_hat = reduced_accuracy(c_b, noise_variance);
    SensorState {
        opinion: state.opinion + d_tilde * c_hat / (state.accuracy + c_hat),
        accuracy: state.accuracy + c_hat,
    }
}

#[inline]
pub fn observe_update_midpoint(state: SensorState, d_tilde: f64) -> SensorState {
    SensorState {
        opinion: state.opinion + 0.5 * d_tilde,
        accuracy: state.accuracy,
    }
}

/// Per-round snapshots of one trial. `states[t][a]` is sensor `a` at round `t`,
/// for `t` in `0..=depth`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialTrajectory {
    pub states: Vec<Vec<SensorState>>,
    pub tau_star: f64,
    pub seed: Option<u64>,
}

/// Everything a trial needs that does not change between trials.
pub struct TrialSetup<'a, F, N> {
    pub pattern: &'a MeetingPattern,
    pub assignment: &'a [F],
    pub noise: &'a N,
    pub algorithm: Algorithm,
    /// `anchored[a]` sensors never update.
    pub anchored: &'a [bool],
}

impl<'a, F: Family, N: Family> TrialSetup<'a, F, N> {
    pub fn new(
        pattern: &'a MeetingPattern,
        assignment: &'a [F],
        noise: &'a N,
        algorithm: Algorithm,
        anchored: &'a [bool],
    ) -> Result<Self> {
        let n = pattern.n();
        if assignment.len() != n {
            return Err(Error::AssignmentIncomplete {
                got: assignment.len(),
                n,
            });
        }
        if anchored.len() != n {
            return Err(Error::MismatchedShapes(format!(
                "anchored mask has {} entries for {n} sensors",
                anchored.len()
            )));
        }
        Ok(Self {
            pattern,
            assignment,
            noise,
            algorithm,
            anchored,
        })
    }

    /// Runs one trial, handing each round's snapshot (round 0 first) to `visit`.
    ///
    /// Random draws happen in a fixed order: initial offsets for sensors
    /// `0..n`, then one noise draw per event in `(round, observer)` order.
    pub fn simulate<R, V>(&self, tau_star: f64, rng: &mut R, mut visit: V)
    where
        R: Rng + ?Sized,
        V: FnMut(usize, &[SensorState]),
    {
        let noise_variance = self.noise.variance();
        let mut current: Vec<SensorState> = self
            .assignment
            .iter()
            .map(|spec| init_state(spec, tau_star, rng))
            .collect();
        let mut next = current.clone();
        visit(0, &current);
        for (t, events) in self.pattern.rounds().into_iter().enumerate() {
            next.copy_from_slice(&current);
            for &MeetingEvent { observer, observed, .. } in events {
                let (a, b) = (current[observer], current[observed]);
                let d_tilde = measure(a.opinion, b.opinion, self.noise, rng);
                if self.anchored[observer] {
                    continue;
                }
                next[observer] = match self.algorithm {
                    Algorithm::Alg => observe_update_alg(a, b.accuracy, d_tilde, noise_variance),
                    Algorithm::Midpoint => observe_update_midpoint(a, d_tilde),
                };
            }
            std::mem::swap(&mut current, &mut next);
            visit(t + 1, &current);
        }
    }
}

pub struct RunOptions {
    pub skip_validation: bool,
    pub seed: Option<u64>,
}

/// Executes `pattern` once and records every round.
#[allow(clippy::too_many_arguments)]
pub fn run_trial<F: Family, N: Family, R: Rng + ?Sized>(
    pattern: &MeetingPattern,
    assignment: &[F],
    noise: &N,
    tau_star: f64,
    algorithm: Algorithm,
    anchored: &[bool],
    rng: &mut R,
    options: RunOptions,
) -> Result<TrialTrajectory> {
    let setup = TrialSetup::new(pattern, assignment, noise, algorithm, anchored)?;
    if !options.skip_validation {
        validate_independence(pattern).into_result()?;
    }
    let mut states = Vec::with_capacity(pattern.depth() + 1);
    setup.simulate(tau_star, rng, |_, snapshot| states.push(snapshot.to_vec()));
    Ok(TrialTrajectory {
        states,
        tau_star,
        seed: options.seed,
    })
}
