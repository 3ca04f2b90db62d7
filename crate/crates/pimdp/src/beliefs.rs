//! Enumeration of finite possibilistic belief spaces.
//!
//! The set of normalized distributions over `n` states on a scale of `L`
//! levels is finite, of cardinality `L^n - (L-1)^n`. Beliefs are enumerated
//! in descending lexicographic order of their level indices, so total
//! ignorance comes first; the order is canonical and belief indices are
//! stable, which lets solvers intern updates by exact lookup.

use std::collections::HashMap;

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::scale::{Level, PossibilityDistribution, QualitativeScale};

/// `L^n - (L-1)^n`: the number of normalized distributions over `n` elements
/// with `L` levels.
pub fn belief_space_cardinality(num_levels: usize, num_states: usize) -> BigUint {
    let all = BigUint::from(num_levels).pow(num_states as u32);
    let unnormalized = BigUint::from(num_levels - 1).pow(num_states as u32);
    all - unnormalized
}

/// Enumerates every normalized distribution over a domain of `num_states`
/// elements, refusing when `num_levels ^ num_states` exceeds `cap`.
pub fn enumerate_belief_space(
    scale: &QualitativeScale,
    num_states: usize,
    cap: u64,
) -> Result<Vec<PossibilityDistribution>> {
    assert!(num_states >= 1, "belief domain must be non-empty");
    let levels = scale.len();
    let raw = BigUint::from(levels).pow(num_states as u32);
    if raw > BigUint::from(cap) {
        return Err(Error::BeliefSpaceTooLarge {
            cardinality: belief_space_cardinality(levels, num_states).to_string(),
            cap,
        });
    }

    let k = scale.k() as u16;
    let mut out = Vec::new();
    // Odometer over "distance from top" digits, in ascending lexicographic
    // order; mapping index = k - digit yields descending order over levels.
    let mut digits = vec![0u16; num_states];
    loop {
        if digits.iter().any(|&d| d == 0) {
            let values: Vec<Level> = digits.iter().map(|&d| Level(k - d)).collect();
            out.push(PossibilityDistribution::new(scale, values).expect("normalized"));
        }
        let mut pos = num_states;
        loop {
            if pos == 0 {
                let expected = belief_space_cardinality(levels, num_states);
                assert_eq!(
                    BigUint::from(out.len()),
                    expected,
                    "enumeration disagrees with the closed-form count"
                );
                return Ok(out);
            }
            pos -= 1;
            digits[pos] += 1;
            if (digits[pos] as usize) < levels {
                break;
            }
            digits[pos] = 0;
        }
    }
}

/// A canonical belief enumeration together with an exact-lookup index.
#[derive(Clone, Debug)]
pub struct BeliefSpace {
    beliefs: Vec<PossibilityDistribution>,
    index: HashMap<Vec<Level>, usize>,
}

impl BeliefSpace {
    pub fn enumerate(scale: &QualitativeScale, num_states: usize, cap: u64) -> Result<Self> {
        let beliefs = enumerate_belief_space(scale, num_states, cap)?;
        let index = beliefs
            .iter()
            .enumerate()
            .map(|(i, b)| (b.values().to_vec(), i))
            .collect();
        Ok(Self { beliefs, index })
    }

    pub fn len(&self) -> usize {
        self.beliefs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.beliefs.is_empty()
    }

    pub fn belief(&self, i: usize) -> &PossibilityDistribution {
        &self.beliefs[i]
    }

    pub fn beliefs(&self) -> &[PossibilityDistribution] {
        &self.beliefs
    }

    /// Exact lookup of a belief's canonical index.
    pub fn index_of(&self, belief: &PossibilityDistribution) -> Option<usize> {
        self.index.get(belief.values()).copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cardinality_closed_form() {
        assert_eq!(belief_space_cardinality(3, 2), BigUint::from(5u32));
        assert_eq!(belief_space_cardinality(2, 1), BigUint::from(1u32));
        assert_eq!(belief_space_cardinality(5, 2), BigUint::from(9u32));
        // 5^18 - 4^18, the blow-up that motivates mixed observability.
        assert_eq!(
            belief_space_cardinality(5, 18).to_string(),
            "3745977788889"
        );
        assert!(belief_space_cardinality(5, 18) > BigUint::from(3_700_000_000_000u64));
    }

    #[test]
    fn enumeration_matches_counts_for_small_spaces() {
        for levels in 2..=4usize {
            let scale = QualitativeScale::uniform(levels - 1);
            for states in 1..=3usize {
                let beliefs = enumerate_belief_space(&scale, states, 1 << 20).unwrap();
                assert_eq!(
                    BigUint::from(beliefs.len()),
                    belief_space_cardinality(levels, states)
                );
            }
        }
    }

    #[test]
    fn enumeration_order_is_descending_lexicographic() {
        let scale = QualitativeScale::uniform(2); // {0, 1/2, 1}
        let beliefs = enumerate_belief_space(&scale, 2, 1 << 10).unwrap();
        let got: Vec<Vec<usize>> = beliefs
            .iter()
            .map(|b| b.values().iter().map(|l| l.index()).collect())
            .collect();
        assert_eq!(
            got,
            vec![
                vec![2, 2],
                vec![2, 1],
                vec![2, 0],
                vec![1, 2],
                vec![0, 2],
            ]
        );
    }

    #[test]
    fn single_state_space() {
        let scale = QualitativeScale::uniform(1);
        let beliefs = enumerate_belief_space(&scale, 1, 1 << 10).unwrap();
        assert_eq!(beliefs.len(), 1);
        assert_eq!(beliefs[0].values(), &[scale.top()]);
    }

    #[test]
    fn refuses_over_cap_with_cardinality_message() {
        let scale = QualitativeScale::uniform(4); // 5 levels
        let err = enumerate_belief_space(&scale, 18, 10_000_000).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("3745977788889"), "message was: {msg}");
    }

    #[test]
    fn interned_lookup_roundtrip() {
        let scale = QualitativeScale::uniform(3);
        let space = BeliefSpace::enumerate(&scale, 2, 1 << 10).unwrap();
        for (i, b) in space.beliefs().iter().enumerate() {
            assert_eq!(space.index_of(b), Some(i));
        }
    }
}
