//! Sequential floating forward selection (SFFS) and an exhaustive oracle.
//!
//! Features are identified by small indices; for soft traits the index is
//! [`TraitKind::index`](crate::profiles::TraitKind::index), so ties resolve in
//! the order gender, age, ethnicity, glasses, beard, moustache. The criterion
//! is minimized.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::profiles::{TraitKind, TraitSet};

/// Upper bound on candidates for exhaustive search.
pub const EXHAUSTIVE_LIMIT: usize = 20;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SelectionError {
    #[error("criterion failed on {set}: {message}")]
    Criterion { set: Subset, message: String },
    #[error("criterion returned non-finite value {value} on {set}")]
    NonFinite { set: Subset, value: f64 },
    #[error("exhaustive search over {0} candidates exceeds the limit of {EXHAUSTIVE_LIMIT}")]
    TooManyCandidates(usize),
    #[error("max_n = {max_n} must be in 1..={available}")]
    BadMaxN { max_n: usize, available: usize },
}

/// A set of feature indices below 32.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Subset(u32);

impl Subset {
    pub fn empty() -> Self {
        Subset(0)
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        Subset(indices.into_iter().fold(0, |m, i| {
            assert!(i < 32, "feature index {i} out of range");
            m | (1 << i)
        }))
    }

    pub fn mask(self) -> u32 {
        self.0
    }

    pub fn contains(self, i: usize) -> bool {
        i < 32 && self.0 & (1 << i) != 0
    }

    pub fn with(self, i: usize) -> Self {
        Subset(self.0 | (1 << i))
    }

    pub fn without(self, i: usize) -> Self {
        Subset(self.0 & !(1 << i))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// Members in ascending order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..32).filter(move |&i| self.contains(i))
    }

    fn lex_key(self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.iter().map(|i| i.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

impl Serialize for Subset {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for Subset {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let indices = Vec::<usize>::deserialize(deserializer)?;
        if let Some(bad) = indices.iter().find(|&&i| i >= 32) {
            return Err(serde::de::Error::custom(format!("feature index {bad} out of range")));
        }
        Ok(Subset::from_indices(indices))
    }
}

impl From<TraitSet> for Subset {
    fn from(set: TraitSet) -> Self {
        Subset(set.mask() as u32)
    }
}

impl Subset {
    /// Interprets the indices as [`TraitKind`]s.
    pub fn to_trait_set(self) -> Option<TraitSet> {
        u8::try_from(self.0).ok().and_then(|m| TraitSet::from_mask(m).ok())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Action {
    Add,
    Remove,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Step {
    pub action: Action,
    pub feature: usize,
    pub set: Subset,
    pub criterion: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeBest {
    pub size: usize,
    pub set: Subset,
    pub criterion: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionTrace {
    pub steps: Vec<Step>,
    /// Best set found for each size `1..=max_n`, in size order.
    pub best: Vec<SizeBest>,
    /// Distinct subsets evaluated.
    pub evaluations: usize,
}

impl SelectionTrace {
    pub fn best_of_size(&self, size: usize) -> Option<&SizeBest> {
        self.best.iter().find(|b| b.size == size)
    }
}

/// Memoizing wrapper so that each subset is evaluated once.
struct Evaluator<F> {
    criterion: F,
    cache: HashMap<Subset, f64>,
}

impl<F, E> Evaluator<F>
where
    F: FnMut(Subset) -> Result<f64, E>,
    E: fmt::Display,
{
    fn eval(&mut self, set: Subset) -> Result<f64, SelectionError> {
        if let Some(&v) = self.cache.get(&set) {
            return Ok(v);
        }
        let value = (self.criterion)(set).map_err(|e| SelectionError::Criterion {
            set,
            message: e.to_string(),
        })?;
        if !value.is_finite() {
            return Err(SelectionError::NonFinite { set, value });
        }
        self.cache.insert(set, value);
        Ok(value)
    }

    /// First candidate (ascending) whose derived set has the lowest value.
    fn argmin(
        &mut self,
        options: impl Iterator<Item = usize>,
        derive: impl Fn(usize) -> Subset,
    ) -> Result<Option<(usize, f64)>, SelectionError> {
        let mut best: Option<(usize, f64)> = None;
        for i in options {
            let v = self.eval(derive(i))?;
            if best.is_none_or(|(_, b)| v < b) {
                best = Some((i, v));
            }
        }
        Ok(best)
    }
}

/// Sequential floating forward selection.
///
/// Each round adds the feature whose inclusion gives the lowest criterion,
/// then keeps removing the feature whose exclusion gives the lowest criterion
/// as long as that strictly beats the best set known for the smaller size.
/// Stops once a set of `max_n` features is reached and no removal improves.
pub fn sffs<F, E>(candidates: Subset, max_n: usize, criterion: F) -> Result<SelectionTrace, SelectionError>
where
    F: FnMut(Subset) -> Result<f64, E>,
    E: fmt::Display,
{
    if max_n == 0 || max_n > candidates.len() {
        return Err(SelectionError::BadMaxN {
            max_n,
            available: candidates.len(),
        });
    }
    let mut ev = Evaluator {
        criterion,
        cache: HashMap::new(),
    };
    let mut best: Vec<Option<(Subset, f64)>> = vec![None; max_n + 1];
    let mut steps = Vec::new();
    let mut current = Subset::empty();

    loop {
        let (added, value) = ev
            .argmin(candidates.iter().filter(|&i| !current.contains(i)), |i| current.with(i))?
            .expect("fewer than max_n features selected, so a candidate remains");
        current = current.with(added);
        steps.push(Step {
            action: Action::Add,
            feature: added,
            set: current,
            criterion: value,
        });
        let k = current.len();
        if best[k].is_none_or(|(_, b)| value < b) {
            best[k] = Some((current, value));
        }

        while current.len() > 1 {
            let k = current.len();
            let (removed, value) = ev
                .argmin(current.iter(), |i| current.without(i))?
                .expect("current set is nonempty");
            if best[k - 1].is_some_and(|(_, b)| value < b) {
                current = current.without(removed);
                steps.push(Step {
                    action: Action::Remove,
                    feature: removed,
                    set: current,
                    criterion: value,
                });
                best[k - 1] = Some((current, value));
            } else {
                break;
            }
        }

        if current.len() == max_n {
            break;
        }
    }

    let best = best
        .into_iter()
        .enumerate()
        .filter_map(|(size, b)| b.map(|(set, criterion)| SizeBest { size, set, criterion }))
        .collect();
    Ok(SelectionTrace {
        steps,
        best,
        evaluations: ev.cache.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExhaustiveResult {
    pub best: Vec<SizeBest>,
    pub evaluations: usize,
}

/// Evaluates every nonempty subset of `candidates`; per size, the lowest
/// criterion wins and ties go to the lexicographically first index list.
pub fn exhaustive_best<F, E>(candidates: Subset, mut criterion: F) -> Result<ExhaustiveResult, SelectionError>
where
    F: FnMut(Subset) -> Result<f64, E>,
    E: fmt::Display,
{
    let members: Vec<usize> = candidates.iter().collect();
    let n = members.len();
    if n > EXHAUSTIVE_LIMIT {
        return Err(SelectionError::TooManyCandidates(n));
    }
    let mut best: Vec<Option<(Subset, f64)>> = vec![None; n + 1];
    let mut evaluations = 0;
    for bits in 1u32..(1 << n) {
        let set = Subset::from_indices((0..n).filter(|b| bits & (1 << b) != 0).map(|b| members[b]));
        let value = criterion(set).map_err(|e| SelectionError::Criterion {
            set,
            message: e.to_string(),
        })?;
        if !value.is_finite() {
            return Err(SelectionError::NonFinite { set, value });
        }
        evaluations += 1;
        let slot = &mut best[set.len()];
        let better = match slot {
            None => true,
            Some((s, v)) => value < *v || (value == *v && set.lex_key() < s.lex_key()),
        };
        if better {
            *slot = Some((set, value));
        }
    }
    let best = best
        .into_iter()
        .enumerate()
        .filter_map(|(size, b)| b.map(|(set, criterion)| SizeBest { size, set, criterion }))
        .collect();
    Ok(ExhaustiveResult { best, evaluations })
}

/// Names of the traits in a subset, in trait order.
pub fn trait_names(set: Subset) -> Vec<&'static str> {
    set.iter()
        .filter_map(TraitKind::from_index)
        .map(TraitKind::name)
        .collect()
}
