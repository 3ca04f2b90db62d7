//! The qualitative scale, its levels, and possibility distributions.
//!
//! Everything in this crate ranks plausibility and preference on one finite
//! totally ordered scale. Levels are compared by their index in the scale;
//! the numeric labels are presentation metadata only, which keeps the
//! order-reversing map exact and avoids floating-point comparisons.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An element of a [`QualitativeScale`], identified by its index.
///
/// Index 0 is the bottom of the scale; comparisons, `min` and `max` are by
/// index. A `Level` is only meaningful relative to the scale it came from.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct Level(pub u16);

impl Level {
    /// The least element of every scale.
    pub const BOTTOM: Level = Level(0);

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn is_bottom(self) -> bool {
        self.0 == 0
    }
}

/// A finite totally ordered set of plausibility/preference grades.
///
/// The scale always contains the extreme labels 0 and 1, so the bottom and
/// top elements exist by construction. Labels are strictly increasing and
/// live in `[0, 1]`.
#[derive(Clone, PartialEq, Debug)]
pub struct QualitativeScale {
    labels: Vec<f64>,
}

impl QualitativeScale {
    /// Builds a scale from arbitrary labels: deduplicates, sorts ascending
    /// and inserts 0 and 1 if absent.
    pub fn new(labels: &[f64]) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::EmptyScale);
        }
        for &x in labels {
            if !x.is_finite() || !(0.0..=1.0).contains(&x) {
                return Err(Error::InvalidScaleLabel(x));
            }
        }
        let mut all: Vec<f64> = labels.to_vec();
        all.push(0.0);
        all.push(1.0);
        all.sort_by(|a, b| a.partial_cmp(b).expect("labels are finite"));
        all.dedup();
        debug_assert!(all.len() >= 2);
        if all.len() > u16::MAX as usize + 1 {
            return Err(Error::Validation(format!(
                "scale has {} levels, more than the supported {}",
                all.len(),
                u16::MAX as usize + 1
            )));
        }
        Ok(Self { labels: all })
    }

    /// The classical uniform scale `{0, 1/k, ..., 1}`.
    pub fn uniform(k: usize) -> Self {
        assert!(k >= 1, "uniform scale needs k >= 1");
        let labels: Vec<f64> = (0..=k).map(|i| i as f64 / k as f64).collect();
        Self::new(&labels).expect("uniform labels are valid")
    }

    /// Number of levels.
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Index of the greatest level (`len() - 1`).
    pub fn k(&self) -> usize {
        self.labels.len() - 1
    }

    pub fn bottom(&self) -> Level {
        Level(0)
    }

    pub fn top(&self) -> Level {
        Level(self.k() as u16)
    }

    /// The order-reversing map: the only decreasing bijection of the scale
    /// onto itself, realized as index reversal. It is an involution.
    pub fn reverse(&self, l: Level) -> Level {
        assert!(l.index() <= self.k(), "level does not belong to this scale");
        Level((self.k() - l.index()) as u16)
    }

    /// Level at a given index.
    pub fn level(&self, index: usize) -> Result<Level> {
        if index < self.len() {
            Ok(Level(index as u16))
        } else {
            Err(Error::LevelOutOfRange {
                index,
                levels: self.len(),
            })
        }
    }

    /// Numeric label of a level.
    pub fn label(&self, l: Level) -> f64 {
        self.labels[l.index()]
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    /// Looks a label up by exact value (labels are canonical f64s, so exact
    /// equality is the right notion here).
    pub fn level_of_label(&self, label: f64) -> Option<Level> {
        self.labels
            .iter()
            .position(|&x| x == label)
            .map(|i| Level(i as u16))
    }

    /// All levels, bottom to top.
    pub fn iter(&self) -> impl Iterator<Item = Level> + '_ {
        (0..self.len()).map(|i| Level(i as u16))
    }
}

/// Builds a scale from arbitrary numeric labels.
pub fn make_scale(labels: &[f64]) -> Result<QualitativeScale> {
    QualitativeScale::new(labels)
}

/// A normalized possibility distribution over a finite domain, stored densely.
///
/// Used for beliefs and preference-free plausibility rankings. Normalization
/// means the maximum value is the top of the scale: at least one element of
/// the domain is entirely possible.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct PossibilityDistribution {
    values: Vec<Level>,
}

impl PossibilityDistribution {
    pub fn new(scale: &QualitativeScale, values: Vec<Level>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::NotNormalized("empty domain".into()));
        }
        for &v in &values {
            if v.index() > scale.k() {
                return Err(Error::LevelOutOfRange {
                    index: v.index(),
                    levels: scale.len(),
                });
            }
        }
        if values.iter().max() != Some(&scale.top()) {
            return Err(Error::NotNormalized(format!(
                "maximum level index is {}, expected the top index {}",
                values.iter().max().map(|l| l.index()).unwrap_or(0),
                scale.k()
            )));
        }
        Ok(Self { values })
    }

    /// The all-top distribution: every element entirely possible.
    pub fn total_ignorance(scale: &QualitativeScale, domain_size: usize) -> Self {
        Self {
            values: vec![scale.top(); domain_size],
        }
    }

    /// Certainty of one element: top there, bottom everywhere else.
    pub fn certain(scale: &QualitativeScale, domain_size: usize, element: usize) -> Self {
        assert!(element < domain_size);
        let mut values = vec![scale.bottom(); domain_size];
        values[element] = scale.top();
        Self { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, i: usize) -> Level {
        self.values[i]
    }

    pub fn values(&self) -> &[Level] {
        &self.values
    }

    /// Positions holding the top level.
    pub fn support_of_top(&self) -> impl Iterator<Item = usize> + '_ {
        let top = *self.values.iter().max().expect("non-empty");
        self.values
            .iter()
            .enumerate()
            .filter(move |(_, &v)| v == top)
            .map(|(i, _)| i)
    }
}

/// A possibility distribution stored sparsely as sorted `(index, level)`
/// pairs of its non-bottom entries. Transition and observation tables use
/// this form; rows over large domains (belief spaces) are mostly bottom.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PossibilityRow {
    domain_size: usize,
    entries: Vec<(u32, Level)>,
}

impl PossibilityRow {
    /// Builds a row from dense values, checking normalization against the scale.
    pub fn from_dense(scale: &QualitativeScale, values: &[Level]) -> Result<Self> {
        let entries: Vec<(u32, Level)> = values
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_bottom())
            .map(|(i, &v)| (i as u32, v))
            .collect();
        Self::from_entries(scale, values.len(), entries)
    }

    /// Builds a row from non-bottom entries (any order, no duplicates).
    pub fn from_entries(
        scale: &QualitativeScale,
        domain_size: usize,
        mut entries: Vec<(u32, Level)>,
    ) -> Result<Self> {
        entries.retain(|(_, v)| !v.is_bottom());
        entries.sort_by_key(|&(i, _)| i);
        for w in entries.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::Validation(format!(
                    "duplicate entry for index {}",
                    w[0].0
                )));
            }
        }
        for &(i, v) in &entries {
            if i as usize >= domain_size {
                return Err(Error::IndexOutOfRange {
                    kind: "row entry",
                    index: i as usize,
                    size: domain_size,
                });
            }
            if v.index() > scale.k() {
                return Err(Error::LevelOutOfRange {
                    index: v.index(),
                    levels: scale.len(),
                });
            }
        }
        if !entries.iter().any(|&(_, v)| v == scale.top()) {
            return Err(Error::NotNormalized(
                "row has no entry at the top of the scale".into(),
            ));
        }
        Ok(Self {
            domain_size,
            entries,
        })
    }

    /// A deterministic row: possibility top on `target`, bottom elsewhere.
    pub fn deterministic(scale: &QualitativeScale, domain_size: usize, target: usize) -> Self {
        assert!(target < domain_size);
        Self {
            domain_size,
            entries: vec![(target as u32, scale.top())],
        }
    }

    pub fn domain_size(&self) -> usize {
        self.domain_size
    }

    pub fn get(&self, i: usize) -> Level {
        debug_assert!(i < self.domain_size);
        match self.entries.binary_search_by_key(&(i as u32), |&(j, _)| j) {
            Ok(pos) => self.entries[pos].1,
            Err(_) => Level::BOTTOM,
        }
    }

    /// Non-bottom entries in index order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, Level)> + '_ {
        self.entries.iter().map(|&(i, v)| (i as usize, v))
    }

    pub fn to_dense(&self) -> Vec<Level> {
        let mut dense = vec![Level::BOTTOM; self.domain_size];
        for &(i, v) in &self.entries {
            dense[i as usize] = v;
        }
        dense
    }

    /// True when the row is exactly "top on `state`, bottom elsewhere".
    pub fn is_deterministic_at(&self, state: usize, top: Level) -> bool {
        self.entries.len() == 1 && self.entries[0] == (state as u32, top)
    }

    /// `max_i min(row(i), utilities(i))` against a dense utility vector.
    ///
    /// Bottom entries contribute bottom to the max, so skipping them is exact.
    pub fn sugeno_against(&self, utilities: &[Level]) -> Level {
        debug_assert_eq!(utilities.len(), self.domain_size);
        let mut best = Level::BOTTOM;
        for &(i, v) in &self.entries {
            let candidate = v.min(utilities[i as usize]);
            if candidate > best {
                best = candidate;
            }
        }
        best
    }
}

/// The optimistic qualitative aggregation: `max_i min(possibilities[i], utilities[i])`.
///
/// A high value means some outcome is both entirely plausible and
/// satisfactory; this is the building block of every solver in the crate.
pub fn sugeno_optimistic(possibilities: &[Level], utilities: &[Level]) -> Result<Level> {
    if possibilities.len() != utilities.len() {
        return Err(Error::DimensionMismatch {
            context: "sugeno aggregation",
            expected: possibilities.len(),
            actual: utilities.len(),
        });
    }
    if possibilities.is_empty() {
        return Err(Error::DimensionMismatch {
            context: "sugeno aggregation needs at least one element",
            expected: 1,
            actual: 0,
        });
    }
    Ok(possibilities
        .iter()
        .zip(utilities)
        .map(|(&p, &u)| p.min(u))
        .max()
        .expect("non-empty"))
}

/// Applies the order-reversing map of `scale` to `l`.
pub fn order_reverse(scale: &QualitativeScale, l: Level) -> Level {
    scale.reverse(l)
}
