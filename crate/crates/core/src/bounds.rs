//! Fisher-information upper bounds for any algorithm on a fixed independent
//! pattern, the matching Cramér-Rao variance floors, the per-observation
//! capacity `J_N`, and the convergence-time lower bound derived from it.

use crate::error::Result;
use crate::pattern::{validate_independence, MeetingEvent, MeetingPattern};

/// Fisher information of the measurement noise. `Infinite` models a
/// noiseless channel, where the recursion becomes plain addition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseFisher {
    Finite(f64),
    Infinite,
}

impl NoiseFisher {
    pub fn from_value(j: f64) -> Self {
        if j.is_infinite() {
            NoiseFisher::Infinite
        } else {
            NoiseFisher::Finite(j)
        }
    }

    pub fn value(self) -> f64 {
        match self {
            NoiseFisher::Finite(j) => j,
            NoiseFisher::Infinite => f64::INFINITY,
        }
    }

    /// Largest FI the observer can gain from a partner holding `j_b`:
    /// `1 / (1/j_b + 1/J_N)`.
    pub fn increment(self, j_b: f64) -> f64 {
        match self {
            NoiseFisher::Finite(j_n) => 1.0 / (1.0 / j_b + 1.0 / j_n),
            NoiseFisher::Infinite => j_b,
        }
    }
}

/// Per-event record of the recursion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FisherStep {
    pub event: MeetingEvent,
    /// `J_observed(t)` at the time of the event.
    pub observed_fi: f64,
    /// `J_observer(t+1) - J_observer(t)`; zero for anchored observers.
    pub increment: f64,
}

/// `values[t][a]` is the FI bound of sensor `a` at round `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct FisherTrajectory {
    pub values: Vec<Vec<f64>>,
    pub noise_fi: NoiseFisher,
    pub steps: Vec<FisherStep>,
}

impl FisherTrajectory {
    pub fn n(&self) -> usize {
        self.values[0].len()
    }

    pub fn rounds(&self) -> usize {
        self.values.len()
    }
}

/// Evaluates `J_a(t+1) = J_a(t) + 1/(1/J_b(t) + 1/J_N)` with equality.
pub fn fi_recursion(pattern: &MeetingPattern, initial_fi: &[f64], noise_fi: NoiseFisher) -> Result<FisherTrajectory> {
    fi_recursion_anchored(pattern, initial_fi, noise_fi, &vec![false; pattern.n()])
}

/// As [`fi_recursion`], with anchored sensors holding their initial FI.
pub fn fi_recursion_anchored(
    pattern: &MeetingPattern,
    initial_fi: &[f64],
    noise_fi: NoiseFisher,
    anchored: &[bool],
) -> Result<FisherTrajectory> {
    use crate::error::Error;
    if initial_fi.len() != pattern.n() || anchored.len() != pattern.n() {
        return Err(Error::MismatchedShapes(format!(
            "{} initial FI values / {} anchor flags for {} sensors",
            initial_fi.len(),
            anchored.len(),
            pattern.n()
        )));
    }
    if let Some(bad) = initial_fi.iter().find(|j| !(**j > 0.0)) {
        return Err(Error::Config(format!(
            "initial Fisher information must be positive, got {bad}"
        )));
    }
    validate_independence(pattern).into_result()?;

    let mut values = Vec::with_capacity(pattern.depth() + 1);
    let mut steps = Vec::with_capacity(pattern.events().len());
    values.push(initial_fi.to_vec());
    for events in pattern.rounds() {
        let current = values.last().unwrap();
        let mut next = current.clone();
        for &event in events {
            let observed_fi = current[event.observed];
            let increment = if anchored[event.observer] {
                0.0
            } else {
                noise_fi.increment(observed_fi)
            };
            next[event.observer] = current[event.observer] + increment;
            steps.push(FisherStep {
                event,
                observed_fi,
                increment,
            });
        }
        values.push(next);
    }
    Ok(FisherTrajectory {
        values,
        noise_fi,
        steps,
    })
}

/// Elementwise `1/J`.
pub fn cramer_rao_floor(traj: &FisherTrajectory) -> Vec<Vec<f64>> {
    traj.values
        .iter()
        .map(|row| row.iter().map(|j| 1.0 / j).collect())
        .collect()
}

/// Largest single-event FI increment (0 for a pattern without events).
pub fn check_channel_capacity(traj: &FisherTrajectory) -> f64 {
    traj.steps.iter().map(|s| s.increment).fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceBound {
    pub epsilon: f64,
    pub j0_median: f64,
    /// Minimum number of observations, possibly fractional.
    pub bound: f64,
}

/// Lower median: element `⌊(n-1)/2⌋` of the sorted values.
pub fn lower_median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted[(sorted.len() - 1) / 2]
}

/// `(1/ε² - J₀) / J_N`, clamped at zero.
pub fn convergence_lower_bound(epsilon: f64, initial_fi: &[f64], noise_fi: NoiseFisher) -> ConvergenceBound {
    let j0_median = lower_median(initial_fi);
    let target = 1.0 / (epsilon * epsilon);
    let bound = if target > j0_median {
        (target - j0_median) / noise_fi.value()
    } else {
        0.0
    };
    ConvergenceBound {
        epsilon,
        j0_median,
        bound,
    }
}

/// Median number of observations made before round `ρ`, the first round at
/// which strictly more than half the sensors have variance below `ε²`.
/// Returns `f64::INFINITY` when no such round exists.
pub fn empirical_convergence_time(variances: &[Vec<f64>], pattern: &MeetingPattern, epsilon: f64) -> f64 {
    let threshold = epsilon * epsilon;
    let n = pattern.n();
    let rho = variances
        .iter()
        .position(|row| 2 * row.iter().filter(|&&v| v < threshold).count() > n);
    match rho {
        None => f64::INFINITY,
        Some(rho) => {
            let counts: Vec<f64> = pattern.observation_counts(rho).into_iter().map(|c| c as f64).collect();
            lower_median(&counts)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::pattern::gen_tournament;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ev(r: usize, a: usize, b: usize) -> MeetingEvent {
        MeetingEvent::new(r, a, b)
    }

    #[test]
    fn single_event_examples() {
        let p = MeetingPattern::new(2, vec![ev(0, 0, 1)]).unwrap();
        let t = fi_recursion(&p, &[2.0, 2.0], NoiseFisher::Finite(2.0)).unwrap();
        assert_eq!(t.values[1], vec![3.0, 2.0]);
        let t = fi_recursion(&p, &[2.0, 5.0], NoiseFisher::Infinite).unwrap();
        assert_eq!(t.values[1][0], 7.0);
    }

    #[test]
    fn tournament_of_four() {
        // observers 0 and 2 in round 0, then 0 observes 2
        let p = MeetingPattern::new(4, vec![ev(0, 0, 1), ev(0, 2, 3), ev(1, 0, 2)]).unwrap();
        let t = fi_recursion(&p, &[1.0; 4], NoiseFisher::Finite(1.0)).unwrap();
        assert_eq!(t.values[1], vec![1.5, 1.0, 1.5, 1.0]);
        assert!((t.values[2][0] - 2.1).abs() < 1e-15);
    }

    #[test]
    fn recursion_rejects_dependent_patterns_and_bad_input() {
        let p = MeetingPattern::new(2, vec![ev(0, 0, 1), ev(1, 1, 0)]).unwrap();
        assert!(matches!(
            fi_recursion(&p, &[1.0, 1.0], NoiseFisher::Finite(1.0)),
            Err(Error::PatternNotIndependent { .. })
        ));
        let ok = MeetingPattern::new(2, vec![ev(0, 0, 1)]).unwrap();
        assert!(fi_recursion(&ok, &[1.0], NoiseFisher::Finite(1.0)).is_err());
        assert!(fi_recursion(&ok, &[1.0, 0.0], NoiseFisher::Finite(1.0)).is_err());
    }

    #[test]
    fn anchored_sensors_hold_their_information() {
        let p = MeetingPattern::new(3, vec![ev(0, 0, 1), ev(0, 2, 1)]).unwrap();
        let t = fi_recursion_anchored(&p, &[1.0; 3], NoiseFisher::Finite(1.0), &[true, false, false]).unwrap();
        assert_eq!(t.values[1], vec![1.0, 1.0, 1.5]);
    }

    #[test]
    fn floors() {
        let p = MeetingPattern::new(2, vec![ev(0, 0, 1)]).unwrap();
        let t = fi_recursion(&p, &[4.0, 1.0], NoiseFisher::Finite(1.0)).unwrap();
        let f = cramer_rao_floor(&t);
        assert_eq!(f[0], vec![0.25, 1.0]);
        assert!(f[1][0] <= f[0][0]);
    }

    #[test]
    fn channel_capacity_examples() {
        assert_eq!(NoiseFisher::Finite(3.0).increment(3.0), 1.5);
        assert!((NoiseFisher::Finite(3.0).increment(1e15) - 3.0).abs() < 1e-12);
        let t = fi_recursion(
            &gen_tournament(16, &mut ChaCha8Rng::seed_from_u64(0)).unwrap(),
            &[1.0; 16],
            NoiseFisher::Finite(4.0),
        )
        .unwrap();
        let max = check_channel_capacity(&t);
        assert!(max > 0.0 && max < 4.0);
    }

    #[test]
    fn convergence_bound_examples() {
        let b = convergence_lower_bound(0.1, &[1.0; 5], NoiseFisher::Finite(4.0));
        assert!((b.bound - 24.75).abs() < 1e-12);
        assert_eq!(
            convergence_lower_bound(1.0, &[1.0, 2.0, 3.0], NoiseFisher::Finite(1.0)).bound,
            0.0
        );
        let b = convergence_lower_bound(0.1, &[9.0, 1.0, 4.0], NoiseFisher::Finite(1.0));
        assert_eq!(b.j0_median, 4.0);
        assert!((b.bound - 96.0).abs() < 1e-12);
        assert_eq!(lower_median(&[4.0, 1.0, 3.0, 2.0]), 2.0);
        assert_eq!(convergence_lower_bound(0.1, &[1.0], NoiseFisher::Infinite).bound, 0.0);
    }

    #[test]
    fn empirical_time_edge_cases() {
        let p = MeetingPattern::empty(3).unwrap();
        assert_eq!(empirical_convergence_time(&[vec![1.0; 3]], &p, 10.0), 0.0);
        assert_eq!(empirical_convergence_time(&[vec![1.0; 3]], &p, 0.5), f64::INFINITY);

        // two of three sensors drop below 0.25 at round 2
        let p = MeetingPattern::new(3, vec![ev(0, 0, 1), ev(1, 0, 2), ev(1, 1, 2)]).unwrap();
        let var = vec![vec![1.0; 3], vec![0.5, 1.0, 1.0], vec![0.2, 0.2, 1.0]];
        assert_eq!(empirical_convergence_time(&var, &p, 0.5), 1.0);
        // exactly half is not enough
        let p4 = MeetingPattern::new(4, vec![ev(0, 0, 1)]).unwrap();
        assert_eq!(
            empirical_convergence_time(&[vec![1.0; 4], vec![0.0, 0.0, 1.0, 1.0]], &p4, 0.5),
            f64::INFINITY
        );
    }
}
