//! Mixed-observable qualitative MDPs.
//!
//! The state factors into a visible component the agent always observes and a
//! hidden component seen only through observations. Every reachable belief is
//! then a pair (visible state, distribution over hidden states), so value
//! iteration runs over `#visible x (L^h - (L-1)^h)` points instead of the
//! full belief space over the product - exponentially smaller.
//!
//! Index layout: product states are `visible * num_hidden + hidden`, and the
//! joint observation tables are `visible * num_hidden_obs + hidden_obs`.

use crate::beliefs::BeliefSpace;
use crate::error::{Error, Result};
use crate::scale::{Level, PossibilityDistribution, PossibilityRow, QualitativeScale};
use crate::DEFAULT_ENUMERATION_CAP;

/// The belief state of a mixed-observable model: the visible state is known,
/// the hidden state is ranked by a normalized possibility distribution.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MixedBelief {
    visible: usize,
    hidden: PossibilityDistribution,
}

impl MixedBelief {
    pub fn new(visible: usize, hidden: PossibilityDistribution) -> Self {
        Self { visible, hidden }
    }

    pub fn visible(&self) -> usize {
        self.visible
    }

    pub fn hidden(&self) -> &PossibilityDistribution {
        &self.hidden
    }
}

/// A qualitative possibilistic mixed-observable MDP.
///
/// The stay action must keep every product state in place with possibility
/// top and emit the dedicated "nothing" observation deterministically; that
/// pair is what guarantees convergence of value iteration.
#[derive(Clone, PartialEq, Debug)]
pub struct PiMomdpModel {
    scale: QualitativeScale,
    num_visible: usize,
    num_hidden: usize,
    num_actions: usize,
    num_hidden_obs: usize,
    /// Row `(state, a)` over product states, `state = visible * num_hidden + hidden`.
    transition: Vec<PossibilityRow>,
    /// Row `(state', a)` over hidden observations.
    observation: Vec<PossibilityRow>,
    /// Preference per product state.
    preference: Vec<Level>,
    initial: MixedBelief,
    stay_action: usize,
    stay_observation: usize,
}

impl PiMomdpModel {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        scale: QualitativeScale,
        num_visible: usize,
        num_hidden: usize,
        num_actions: usize,
        num_hidden_obs: usize,
        transition: Vec<PossibilityRow>,
        observation: Vec<PossibilityRow>,
        preference: Vec<Level>,
        initial: MixedBelief,
        stay_action: usize,
        stay_observation: usize,
    ) -> Result<Self> {
        if num_visible == 0 || num_hidden == 0 || num_actions == 0 || num_hidden_obs == 0 {
            return Err(Error::Validation(
                "every component of a mixed model must be non-empty".into(),
            ));
        }
        let product = num_visible * num_hidden;
        if transition.len() != product * num_actions {
            return Err(Error::DimensionMismatch {
                context: "mixed transition table rows",
                expected: product * num_actions,
                actual: transition.len(),
            });
        }
        if observation.len() != product * num_actions {
            return Err(Error::DimensionMismatch {
                context: "hidden observation table rows",
                expected: product * num_actions,
                actual: observation.len(),
            });
        }
        if preference.len() != product {
            return Err(Error::DimensionMismatch {
                context: "mixed preference vector",
                expected: product,
                actual: preference.len(),
            });
        }
        for (rows, domain, what) in [
            (&transition, product, "transition"),
            (&observation, num_hidden_obs, "observation"),
        ] {
            for (idx, row) in rows.iter().enumerate() {
                if row.domain_size() != domain {
                    return Err(Error::DimensionMismatch {
                        context: "mixed table row domain",
                        expected: domain,
                        actual: row.domain_size(),
                    });
                }
                if row.iter().any(|(_, l)| l.index() > scale.k()) {
                    return Err(Error::NotNormalized(format!(
                        "{what} row {idx} uses a level outside the scale"
                    )));
                }
                if row.iter().all(|(_, l)| l != scale.top()) {
                    return Err(Error::NotNormalized(format!("{what} row {idx}")));
                }
            }
        }
        if preference.iter().any(|l| l.index() > scale.k()) {
            return Err(Error::Validation(
                "preference uses a level outside the scale".into(),
            ));
        }
        if stay_action >= num_actions {
            return Err(Error::IndexOutOfRange {
                kind: "stay action",
                index: stay_action,
                size: num_actions,
            });
        }
        if stay_observation >= num_hidden_obs {
            return Err(Error::IndexOutOfRange {
                kind: "stay observation",
                index: stay_observation,
                size: num_hidden_obs,
            });
        }
        for state in 0..product {
            let t = &transition[state * num_actions + stay_action];
            if !t.is_deterministic_at(state, scale.top()) {
                return Err(Error::InvalidStay(format!(
                    "stay action does not keep product state {state} in place"
                )));
            }
            let o = &observation[state * num_actions + stay_action];
            if !o.is_deterministic_at(stay_observation, scale.top()) {
                return Err(Error::InvalidStay(format!(
                    "stay action does not emit the nothing observation at product state {state}"
                )));
            }
        }
        if initial.visible() >= num_visible {
            return Err(Error::IndexOutOfRange {
                kind: "initial visible state",
                index: initial.visible(),
                size: num_visible,
            });
        }
        if initial.hidden().len() != num_hidden {
            return Err(Error::DimensionMismatch {
                context: "initial hidden belief",
                expected: num_hidden,
                actual: initial.hidden().len(),
            });
        }
        Ok(Self {
            scale,
            num_visible,
            num_hidden,
            num_actions,
            num_hidden_obs,
            transition,
            observation,
            preference,
            initial,
            stay_action,
            stay_observation,
        })
    }

    pub fn scale(&self) -> &QualitativeScale {
        &self.scale
    }

    pub fn num_visible_states(&self) -> usize {
        self.num_visible
    }

    pub fn num_hidden_states(&self) -> usize {
        self.num_hidden
    }

    pub fn num_actions(&self) -> usize {
        self.num_actions
    }

    pub fn num_hidden_observations(&self) -> usize {
        self.num_hidden_obs
    }

    pub fn stay_action(&self) -> usize {
        self.stay_action
    }

    pub fn stay_observation(&self) -> usize {
        self.stay_observation
    }

    pub fn initial(&self) -> &MixedBelief {
        &self.initial
    }

    /// Flat index of a product state.
    pub fn product_state(&self, visible: usize, hidden: usize) -> usize {
        debug_assert!(visible < self.num_visible && hidden < self.num_hidden);
        visible * self.num_hidden + hidden
    }

    pub fn num_product_states(&self) -> usize {
        self.num_visible * self.num_hidden
    }

    pub fn transition_row(&self, state: usize, a: usize) -> &PossibilityRow {
        &self.transition[state * self.num_actions + a]
    }

    pub fn observation_row(&self, state: usize, a: usize) -> &PossibilityRow {
        &self.observation[state * self.num_actions + a]
    }

    pub fn preference_at(&self, visible: usize, hidden: usize) -> Level {
        self.preference[self.product_state(visible, hidden)]
    }

    pub fn preferences(&self) -> &[Level] {
        &self.preference
    }
}

/// Predicted possibility over product states after playing `a` from `b`:
/// `pred(s') = max_h min(t((s_v, h), a, s'), b_hidden(h))`.
///
/// Layout: `pred[visible * num_hidden + hidden]`. The result is normalized.
pub fn mixed_predict(model: &PiMomdpModel, b: &MixedBelief, a: usize) -> Vec<Level> {
    assert!(a < model.num_actions());
    let mut pred = vec![Level::BOTTOM; model.num_product_states()];
    for h in 0..model.num_hidden_states() {
        let weight = b.hidden().get(h);
        if weight.is_bottom() {
            continue;
        }
        let state = model.product_state(b.visible(), h);
        for (next, l) in model.transition_row(state, a).iter() {
            let candidate = l.min(weight);
            if candidate > pred[next] {
                pred[next] = candidate;
            }
        }
    }
    assert_eq!(
        pred.iter().max().copied(),
        Some(model.scale().top()),
        "prediction of a normalized belief must stay normalized"
    );
    pred
}

/// Joint possibility of arriving in visible state `s'_v` and seeing hidden
/// observation `o'_h`: `max_h' min(obs((s'_v, h'), a, o'_h), pred(s'_v, h'))`.
///
/// Layout: `joint[visible * num_hidden_obs + obs]`. The result is normalized.
pub fn mixed_joint_observation(model: &PiMomdpModel, pred: &[Level], a: usize) -> Vec<Level> {
    assert_eq!(pred.len(), model.num_product_states());
    let n_obs = model.num_hidden_observations();
    let mut joint = vec![Level::BOTTOM; model.num_visible_states() * n_obs];
    for sv in 0..model.num_visible_states() {
        for h in 0..model.num_hidden_states() {
            let state = model.product_state(sv, h);
            let p = pred[state];
            if p.is_bottom() {
                continue;
            }
            for (o, l) in model.observation_row(state, a).iter() {
                let candidate = l.min(p);
                let slot = &mut joint[sv * n_obs + o];
                if candidate > *slot {
                    *slot = candidate;
                }
            }
        }
    }
    assert_eq!(
        joint.iter().max().copied(),
        Some(model.scale().top()),
        "joint observation table must be normalized"
    );
    joint
}

/// Belief revision given a prediction: promote the hidden states whose joint
/// possibility attains the observation's, keep the joint value elsewhere.
fn update_from_prediction(
    model: &PiMomdpModel,
    pred: &[Level],
    a: usize,
    next_visible: usize,
    obs: usize,
) -> Result<MixedBelief> {
    let joint: Vec<Level> = (0..model.num_hidden_states())
        .map(|h| {
            let state = model.product_state(next_visible, h);
            model.observation_row(state, a).get(obs).min(pred[state])
        })
        .collect();
    let peak = *joint.iter().max().expect("non-empty hidden space");
    if peak.is_bottom() {
        return Err(Error::ImpossibleObservation {
            action: a,
            observation: obs,
        });
    }
    let top = model.scale().top();
    let values: Vec<Level> = joint
        .iter()
        .map(|&v| if v == peak { top } else { v })
        .collect();
    let hidden = PossibilityDistribution::new(model.scale(), values).expect("normalized");
    Ok(MixedBelief::new(next_visible, hidden))
}

/// Full mixed belief update for action `a`, observed arrival `next_visible`
/// and hidden observation `obs`. Errors when the pair has possibility bottom.
pub fn mixed_belief_update(
    model: &PiMomdpModel,
    b: &MixedBelief,
    a: usize,
    next_visible: usize,
    obs: usize,
) -> Result<MixedBelief> {
    assert!(next_visible < model.num_visible_states());
    assert!(obs < model.num_hidden_observations());
    let pred = mixed_predict(model, b, a);
    update_from_prediction(model, &pred, a, next_visible, obs)
}

/// Preference of a mixed belief:
/// `min_h max(preference(s_v, h), reverse(b_hidden(h)))`.
///
/// Pessimistic over hidden states so that informative beliefs are preferred.
pub fn mixed_preference(model: &PiMomdpModel, b: &MixedBelief) -> Level {
    let scale = model.scale();
    (0..model.num_hidden_states())
        .map(|h| {
            model
                .preference_at(b.visible(), h)
                .max(scale.reverse(b.hidden().get(h)))
        })
        .min()
        .expect("non-empty hidden space")
}

/// Canonical enumeration of the hidden belief space.
pub fn enumerate_hidden_beliefs(model: &PiMomdpModel) -> Result<Vec<PossibilityDistribution>> {
    crate::beliefs::enumerate_belief_space(
        model.scale(),
        model.num_hidden_states(),
        DEFAULT_ENUMERATION_CAP,
    )
}

/// Value iteration output over `visible x hidden-belief` points.
#[derive(Clone, Debug)]
pub struct MixedValueSolution {
    num_visible: usize,
    /// Indexed `visible * hidden_space.len() + belief`.
    pub values: Vec<Level>,
    /// Same indexing as `values`.
    pub policy: Vec<usize>,
    pub iterations: usize,
    pub hidden_space: BeliefSpace,
}

impl MixedValueSolution {
    pub fn point(&self, visible: usize, belief: usize) -> usize {
        debug_assert!(belief < self.hidden_space.len());
        visible * self.hidden_space.len() + belief
    }

    pub fn value(&self, visible: usize, belief: usize) -> Level {
        self.values[self.point(visible, belief)]
    }

    pub fn action(&self, visible: usize, belief: usize) -> usize {
        self.policy[self.point(visible, belief)]
    }

    pub fn num_visible(&self) -> usize {
        self.num_visible
    }

    /// Canonical index of a hidden belief, if it is well-formed.
    pub fn belief_index(&self, hidden: &PossibilityDistribution) -> Option<usize> {
        self.hidden_space.index_of(hidden)
    }
}

/// Precomputed backup branch: reaching `successor` (a mixed point) with the
/// given possibility.
struct Branch {
    possibility: Level,
    successor: u32,
}

/// Infinite-horizon value iteration over the mixed belief space.
///
/// Same scheme as the flat algorithm: initialize values to the mixed
/// preference, sweep synchronously, and update the policy entry only on
/// strict improvement (ties broken by lowest action, then lowest successor
/// pair). The transition structure does not change between sweeps, so all
/// belief updates are resolved to canonical indices once up front.
pub fn momdp_value_iteration(model: &PiMomdpModel) -> Result<MixedValueSolution> {
    let hidden_space = BeliefSpace::enumerate(
        model.scale(),
        model.num_hidden_states(),
        DEFAULT_ENUMERATION_CAP,
    )?;
    let nb = hidden_space.len();
    let nv = model.num_visible_states();
    let na = model.num_actions();
    let n_points = nv * nb;

    // branches[point * na + a] lists (possibility, successor point) in
    // (next visible, hidden observation) order.
    let mut branches: Vec<Vec<Branch>> = Vec::with_capacity(n_points * na);
    let mut initial_pref = vec![Level::BOTTOM; n_points];
    for sv in 0..nv {
        for bi in 0..nb {
            let belief = MixedBelief::new(sv, hidden_space.belief(bi).clone());
            initial_pref[sv * nb + bi] = mixed_preference(model, &belief);
            for a in 0..na {
                let pred = mixed_predict(model, &belief, a);
                let joint = mixed_joint_observation(model, &pred, a);
                let mut list = Vec::new();
                for next_visible in 0..nv {
                    for obs in 0..model.num_hidden_observations() {
                        let possibility = joint[next_visible * model.num_hidden_observations() + obs];
                        if possibility.is_bottom() {
                            continue;
                        }
                        let updated =
                            update_from_prediction(model, &pred, a, next_visible, obs)
                                .expect("positive joint possibility");
                        let idx = hidden_space
                            .index_of(updated.hidden())
                            .expect("updates stay in the canonical space");
                        list.push(Branch {
                            possibility,
                            successor: (next_visible * nb + idx) as u32,
                        });
                    }
                }
                branches.push(list);
            }
        }
    }

    let bound = n_points * model.scale().len();
    let mut current = vec![Level::BOTTOM; n_points];
    let mut next = initial_pref;
    let mut policy = vec![model.stay_action(); n_points];
    let mut iterations = 0usize;

    while current != next {
        iterations += 1;
        if iterations > bound {
            return Err(Error::IterationBoundExceeded { bound });
        }
        current = next;
        next = vec![Level::BOTTOM; n_points];
        for point in 0..n_points {
            let mut best = Level::BOTTOM;
            let mut best_action = 0usize;
            for a in 0..na {
                let mut action_value = Level::BOTTOM;
                for branch in &branches[point * na + a] {
                    let candidate = branch
                        .possibility
                        .min(current[branch.successor as usize]);
                    if candidate > action_value {
                        action_value = candidate;
                    }
                }
                if action_value > best {
                    best = action_value;
                    best_action = a;
                }
            }
            next[point] = best;
            if best > current[point] {
                policy[point] = best_action;
            }
        }
    }

    Ok(MixedValueSolution {
        num_visible: nv,
        values: current,
        policy,
        iterations,
        hidden_space,
    })
}
