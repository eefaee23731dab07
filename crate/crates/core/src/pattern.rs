//! Meeting patterns: who observes whom in which round.
//!
//! Round convention used throughout the crate: an event at round `t` reads
//! the round-`t` states of both sensors and contributes to the observer's
//! round-`t + 1` state. All events of one round read the same snapshot.
//! A pattern is independent when, at every event, the relevant sets of
//! observer and observed at round `t` are disjoint.

use std::fmt;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeetingEvent {
    pub round: usize,
    pub observer: usize,
    pub observed: usize,
}

impl MeetingEvent {
    pub fn new(round: usize, observer: usize, observed: usize) -> Self {
        Self {
            round,
            observer,
            observed,
        }
    }
}

impl fmt::Display for MeetingEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "round {}: sensor {} observes sensor {}",
            self.round, self.observer, self.observed
        )
    }
}

/// Fixed-size bit set over sensor indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SensorSet {
    words: Vec<u64>,
}

impl SensorSet {
    pub fn empty(n: usize) -> Self {
        Self {
            words: vec![0; n.div_ceil(64)],
        }
    }

    pub fn singleton(n: usize, sensor: usize) -> Self {
        let mut s = Self::empty(n);
        s.insert(sensor);
        s
    }

    pub fn insert(&mut self, sensor: usize) {
        self.words[sensor / 64] |= 1 << (sensor % 64);
    }

    pub fn contains(&self, sensor: usize) -> bool {
        self.words[sensor / 64] & (1 << (sensor % 64)) != 0
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn union_with(&mut self, other: &Self) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn intersection(&self, other: &Self) -> Vec<usize> {
        self.iter().filter(|&s| other.contains(s)).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words
            .iter()
            .enumerate()
            .flat_map(|(wi, &w)| (0..64).filter(move |b| w & (1 << b) != 0).map(move |b| wi * 64 + b))
    }
}

/// An oblivious observation schedule over `n` sensors.
///
/// Events are kept sorted by `(round, observer)`; each sensor observes at
/// most once per round.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawPattern", into = "RawPattern")]
pub struct MeetingPattern {
    n: usize,
    events: Vec<MeetingEvent>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPattern {
    n: usize,
    events: Vec<MeetingEvent>,
}

impl TryFrom<RawPattern> for MeetingPattern {
    type Error = Error;
    fn try_from(raw: RawPattern) -> Result<Self> {
        MeetingPattern::new(raw.n, raw.events)
    }
}

impl From<MeetingPattern> for RawPattern {
    fn from(p: MeetingPattern) -> Self {
        RawPattern {
            n: p.n,
            events: p.events,
        }
    }
}

/// Outcome of [`validate_independence`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Independence {
    Valid,
    Violation { event: MeetingEvent, shared: Vec<usize> },
}

impl Independence {
    pub fn is_valid(&self) -> bool {
        matches!(self, Independence::Valid)
    }

    pub fn into_result(self) -> Result<()> {
        match self {
            Independence::Valid => Ok(()),
            Independence::Violation { event, shared } => Err(Error::PatternNotIndependent { event, shared }),
        }
    }
}

impl MeetingPattern {
    /// Sorts the events and checks structural validity.
    pub fn new(n: usize, mut events: Vec<MeetingEvent>) -> Result<Self> {
        if n == 0 {
            return Err(Error::MalformedPattern("a pattern needs at least one sensor".into()));
        }
        for e in &events {
            if e.observer >= n || e.observed >= n {
                return Err(Error::MalformedPattern(format!("{e} references a sensor >= n = {n}")));
            }
            if e.observer == e.observed {
                return Err(Error::MalformedPattern(format!("{e} is a self-observation")));
            }
        }
        events.sort();
        if let Some(w) = events
            .windows(2)
            .find(|w| w[0].round == w[1].round && w[0].observer == w[1].observer)
        {
            return Err(Error::MalformedPattern(format!(
                "sensor {} observes twice in round {}",
                w[0].observer, w[0].round
            )));
        }
        Ok(Self { n, events })
    }

    pub fn empty(n: usize) -> Result<Self> {
        Self::new(n, Vec::new())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn events(&self) -> &[MeetingEvent] {
        &self.events
    }

    /// `1 + last round with an event`, or 0 for an empty pattern.
    pub fn depth(&self) -> usize {
        self.events.last().map_or(0, |e| e.round + 1)
    }

    /// Events grouped by round; entry `t` holds the events of round `t`.
    pub fn rounds(&self) -> Vec<&[MeetingEvent]> {
        let mut out = Vec::with_capacity(self.depth());
        let mut rest = &self.events[..];
        for t in 0..self.depth() {
            let k = rest.iter().take_while(|e| e.round == t).count();
            out.push(&rest[..k]);
            rest = &rest[k..];
        }
        out
    }

    /// Number of events observed by each sensor in rounds `< before`.
    pub fn observation_counts(&self, before: usize) -> Vec<usize> {
        let mut counts = vec![0; self.n];
        for e in self.events.iter().take_while(|e| e.round < before) {
            counts[e.observer] += 1;
        }
        counts
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }
}

/// Round-by-round relevant sets, advanced with synchronous semantics.
#[derive(Debug, Clone)]
pub struct RelevantSets {
    sets: Vec<SensorSet>,
}

impl RelevantSets {
    pub fn initial(n: usize) -> Self {
        Self {
            sets: (0..n).map(|a| SensorSet::singleton(n, a)).collect(),
        }
    }

    pub fn get(&self, sensor: usize) -> &SensorSet {
        &self.sets[sensor]
    }

    /// Applies one round of events, all reading the current sets.
    pub fn advance(&mut self, events: &[MeetingEvent]) {
        let old = self.sets.clone();
        for e in events {
            self.sets[e.observer].union_with(&old[e.observed]);
        }
    }
}

/// `R_sensor(round)`: every sensor whose initial state can influence `sensor`
/// by `round`. Rounds past the last event return the final set.
pub fn relevant_set(pattern: &MeetingPattern, sensor: usize, round: usize) -> Result<SensorSet> {
    if sensor >= pattern.n {
        return Err(Error::IndexOutOfRange {
            index: sensor,
            n: pattern.n,
        });
    }
    let mut sets = RelevantSets::initial(pattern.n);
    for events in pattern.rounds().into_iter().take(round) {
        sets.advance(events);
    }
    Ok(sets.get(sensor).clone())
}

/// Finds the first event (lowest round, then lowest observer) whose observer
/// and observed already share a relevant sensor.
pub fn validate_independence(pattern: &MeetingPattern) -> Independence {
    let mut sets = RelevantSets::initial(pattern.n);
    for events in pattern.rounds() {
        for e in events {
            let (a, b) = (sets.get(e.observer), sets.get(e.observed));
            if !a.is_disjoint(b) {
                return Independence::Violation {
                    event: *e,
                    shared: a.intersection(b),
                };
            }
        }
        sets.advance(events);
    }
    Independence::Valid
}

/// Binary-merge pattern over `n = 2^k` sensors with shuffled labels.
///
/// In round `r` the sensor holding each block of size `2^r` at an even block
/// position observes the holder of the next block, so after `k` rounds one
/// sensor has everybody in its relevant set.
pub fn gen_tournament<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<MeetingPattern> {
    if !n.is_power_of_two() || n < 2 {
        return Err(Error::NotPowerOfTwo(n));
    }
    let mut labels: Vec<usize> = (0..n).collect();
    labels.shuffle(rng);
    let k = n.trailing_zeros() as usize;
    let mut events = Vec::with_capacity(n - 1);
    for round in 0..k {
        let half = 1 << round;
        for start in (0..n).step_by(2 * half) {
            events.push(MeetingEvent::new(round, labels[start], labels[start + half]));
        }
    }
    MeetingPattern::new(n, events)
}

/// Hypercube exchange: in round `r` every sensor `a` observes `a XOR 2^r`.
/// Every sensor observes in every round; the pattern is independent.
pub fn gen_butterfly(n: usize) -> Result<MeetingPattern> {
    if !n.is_power_of_two() || n < 2 {
        return Err(Error::NotPowerOfTwo(n));
    }
    let k = n.trailing_zeros() as usize;
    let events = (0..k)
        .flat_map(|r| (0..n).map(move |a| MeetingEvent::new(r, a, a ^ (1 << r))))
        .collect();
    MeetingPattern::new(n, events)
}

/// Greedy randomized independent pattern.
///
/// Each round aims for `ceil(density · n)` observers. Candidate observers are
/// visited in shuffled order and each scans a shuffled list of targets,
/// taking the first one with a disjoint relevant set. Within a round a sensor
/// is either an observer or observed, never both, so no mutual pair is
/// emitted. Fewer events come out when no disjoint partner is left.
pub fn gen_random_independent<R: Rng + ?Sized>(
    n: usize,
    rounds: usize,
    density: f64,
    rng: &mut R,
) -> Result<MeetingPattern> {
    if n < 2 {
        return Err(Error::MalformedPattern("random patterns need n >= 2".into()));
    }
    if rounds == 0 {
        return Err(Error::MalformedPattern(
            "random patterns need at least one round".into(),
        ));
    }
    if !(density > 0.0 && density <= 1.0) {
        return Err(Error::MalformedPattern(format!(
            "density must lie in (0, 1], got {density}"
        )));
    }
    let quota = ((density * n as f64).ceil() as usize).clamp(1, n);
    let mut sets = RelevantSets::initial(n);
    let mut events = Vec::new();
    let mut order: Vec<usize> = (0..n).collect();
    let mut targets: Vec<usize> = (0..n).collect();

    for round in 0..rounds {
        #[derive(Clone, Copy, PartialEq)]
        enum Role {
            Free,
            Observer,
            Observed,
        }
        let mut role = vec![Role::Free; n];
        let mut emitted = Vec::new();
        order.shuffle(rng);
        for &a in &order {
            if emitted.len() == quota {
                break;
            }
            if role[a] != Role::Free {
                continue;
            }
            targets.shuffle(rng);
            let pick = targets
                .iter()
                .copied()
                .find(|&b| b != a && role[b] != Role::Observer && sets.get(a).is_disjoint(sets.get(b)));
            if let Some(b) = pick {
                role[a] = Role::Observer;
                role[b] = Role::Observed;
                emitted.push(MeetingEvent::new(round, a, b));
            }
        }
        sets.advance(&emitted);
        events.extend(emitted);
    }
    MeetingPattern::new(n, events)
}
