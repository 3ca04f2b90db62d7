//! Flat partially observable qualitative MDPs.
//!
//! Belief prediction and revision, preference over beliefs, and the two
//! translations that make the small-scale oracle pipeline possible: a
//! partially observable model flattens into a fully observable model over its
//! enumerated belief space, and a mixed-observable model flattens into a flat
//! partially observable one over its product spaces.

use std::collections::{HashMap, HashSet, VecDeque};

pub use crate::beliefs::{belief_space_cardinality, enumerate_belief_space};

use crate::beliefs::BeliefSpace;
use crate::error::{Error, Result};
use crate::mdp::PiMdpModel;
use crate::momdp::PiMomdpModel;
use crate::scale::{Level, PossibilityDistribution, PossibilityRow, QualitativeScale};

/// A qualitative possibilistic POMDP: a fully observable core plus an
/// observation table, an initial belief, and optionally a "nothing"
/// observation paired with the core's stay action.
#[derive(Clone, PartialEq, Debug)]
pub struct PiPomdpModel {
    core: PiMdpModel,
    num_observations: usize,
    /// Row `(s', a)` holds the possibility of each observation on arrival in
    /// `s'` after playing `a`.
    observation: Vec<PossibilityRow>,
    initial_belief: PossibilityDistribution,
    stay_observation: Option<usize>,
}

impl PiPomdpModel {
    pub fn new(
        core: PiMdpModel,
        num_observations: usize,
        observation: Vec<PossibilityRow>,
        initial_belief: PossibilityDistribution,
        stay_observation: Option<usize>,
    ) -> Result<Self> {
        if num_observations == 0 {
            return Err(Error::Validation(
                "a partially observable model needs at least one observation".into(),
            ));
        }
        if observation.len() != core.num_states() * core.num_actions() {
            return Err(Error::DimensionMismatch {
                context: "observation table rows",
                expected: core.num_states() * core.num_actions(),
                actual: observation.len(),
            });
        }
        let scale = core.scale();
        for (idx, row) in observation.iter().enumerate() {
            if row.domain_size() != num_observations {
                return Err(Error::DimensionMismatch {
                    context: "observation row domain",
                    expected: num_observations,
                    actual: row.domain_size(),
                });
            }
            if row.iter().any(|(_, l)| l.index() > scale.k()) {
                return Err(Error::NotNormalized(format!(
                    "observation row {idx} uses a level outside the scale"
                )));
            }
            if row.iter().all(|(_, l)| l != scale.top()) {
                let s = idx / core.num_actions();
                let a = idx % core.num_actions();
                return Err(Error::NotNormalized(format!(
                    "observation row (s'={s}, a={a})"
                )));
            }
        }
        if initial_belief.len() != core.num_states() {
            return Err(Error::DimensionMismatch {
                context: "initial belief",
                expected: core.num_states(),
                actual: initial_belief.len(),
            });
        }
        if let Some(o) = stay_observation {
            if o >= num_observations {
                return Err(Error::IndexOutOfRange {
                    kind: "stay observation",
                    index: o,
                    size: num_observations,
                });
            }
            let stay = core.stay_action().ok_or_else(|| {
                Error::InvalidStay("a stay observation needs a stay action".into())
            })?;
            for s in 0..core.num_states() {
                let row = &observation[s * core.num_actions() + stay];
                if !row.is_deterministic_at(o, scale.top()) {
                    return Err(Error::InvalidStay(format!(
                        "stay action does not emit the nothing observation in state {s}"
                    )));
                }
            }
        }
        Ok(Self {
            core,
            num_observations,
            observation,
            initial_belief,
            stay_observation,
        })
    }

    pub fn core(&self) -> &PiMdpModel {
        &self.core
    }

    pub fn scale(&self) -> &QualitativeScale {
        self.core.scale()
    }

    pub fn num_states(&self) -> usize {
        self.core.num_states()
    }

    pub fn num_actions(&self) -> usize {
        self.core.num_actions()
    }

    pub fn num_observations(&self) -> usize {
        self.num_observations
    }

    pub fn stay_action(&self) -> Option<usize> {
        self.core.stay_action()
    }

    pub fn stay_observation(&self) -> Option<usize> {
        self.stay_observation
    }

    pub fn initial_belief(&self) -> &PossibilityDistribution {
        &self.initial_belief
    }

    pub fn observation_row(&self, next_state: usize, a: usize) -> &PossibilityRow {
        &self.observation[next_state * self.core.num_actions() + a]
    }
}

/// Predicted belief after playing `a`: `pred(s') = max_s min(t(s,a,s'), b(s))`.
///
/// Normalization is inherited from the model's rows, not re-imposed.
pub fn belief_predict(
    model: &PiPomdpModel,
    belief: &PossibilityDistribution,
    a: usize,
) -> PossibilityDistribution {
    assert_eq!(belief.len(), model.num_states());
    assert!(a < model.num_actions());
    let mut pred = vec![Level::BOTTOM; model.num_states()];
    for s in 0..model.num_states() {
        let weight = belief.get(s);
        if weight.is_bottom() {
            continue;
        }
        for (next, l) in model.core().row(s, a).iter() {
            let candidate = l.min(weight);
            if candidate > pred[next] {
                pred[next] = candidate;
            }
        }
    }
    PossibilityDistribution::new(model.scale(), pred)
        .expect("prediction of a normalized belief through normalized rows is normalized")
}

/// Possibility of each observation under a predicted belief:
/// `poss(o) = max_s' min(obs(s', a, o), pred(s'))`. The maximum is top.
pub fn observation_possibility(
    model: &PiPomdpModel,
    pred: &PossibilityDistribution,
    a: usize,
) -> Vec<Level> {
    assert_eq!(pred.len(), model.num_states());
    let mut poss = vec![Level::BOTTOM; model.num_observations()];
    for s in 0..model.num_states() {
        let p = pred.get(s);
        if p.is_bottom() {
            continue;
        }
        for (o, l) in model.observation_row(s, a).iter() {
            let candidate = l.min(p);
            if candidate > poss[o] {
                poss[o] = candidate;
            }
        }
    }
    assert_eq!(
        poss.iter().max().copied(),
        Some(model.scale().top()),
        "observation possibilities must be normalized"
    );
    poss
}

/// Revision step shared by the update and the flatten translation: given the
/// prediction, promote the states whose joint possibility with `obs` attains
/// the observation's possibility, keep the joint value elsewhere.
pub(crate) fn update_from_prediction(
    model: &PiPomdpModel,
    pred: &PossibilityDistribution,
    a: usize,
    obs: usize,
) -> Result<PossibilityDistribution> {
    let joint: Vec<Level> = (0..model.num_states())
        .map(|s| model.observation_row(s, a).get(obs).min(pred.get(s)))
        .collect();
    let peak = *joint.iter().max().expect("non-empty state space");
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
    Ok(PossibilityDistribution::new(model.scale(), values).expect("normalized by promotion"))
}

/// Qualitative belief revision: predict, then condition on the observation.
/// Errors when the observation has possibility bottom, in which case the rule
/// is undefined and the caller decides the fallback.
pub fn belief_update(
    model: &PiPomdpModel,
    belief: &PossibilityDistribution,
    a: usize,
    obs: usize,
) -> Result<PossibilityDistribution> {
    assert!(obs < model.num_observations());
    let pred = belief_predict(model, belief, a);
    update_from_prediction(model, &pred, a, obs)
}

/// Preference of a belief: `min_s max(preference(s), reverse(b(s)))`.
/// Pessimistic so that informative beliefs score higher.
pub fn belief_preference(model: &PiPomdpModel, belief: &PossibilityDistribution) -> Level {
    assert_eq!(belief.len(), model.num_states());
    let scale = model.scale();
    (0..model.num_states())
        .map(|s| model.core().preference(s).max(scale.reverse(belief.get(s))))
        .min()
        .expect("non-empty state space")
}

/// A fully observable model over the enumerated belief space.
#[derive(Clone, Debug)]
pub struct FlattenedBeliefMdp {
    /// The belief-space model; states are indices into `beliefs`.
    pub mdp: PiMdpModel,
    /// Canonical enumeration backing the state indices.
    pub space: BeliefSpace,
    /// Index of the source model's initial belief.
    pub initial_belief_index: usize,
    /// True when a fresh stay action had to be appended because the source
    /// stay does not behave as a stay on every enumerated belief (this is the
    /// case for flattened mixed-observable models, whose "nothing"
    /// observation carries the visible component).
    pub synthetic_stay: bool,
}

/// Translates a partially observable model into a fully observable one over
/// its entire enumerated belief space. The possibility of moving between
/// beliefs is the best possibility among the observations that realize the
/// move; belief preference becomes the state preference.
pub fn flatten_pomdp_to_mdp(model: &PiPomdpModel, cap: u64) -> Result<FlattenedBeliefMdp> {
    let scale = model.scale().clone();
    let space = BeliefSpace::enumerate(&scale, model.num_states(), cap)?;
    let nb = space.len();
    let na = model.num_actions();

    let mut rows: Vec<PossibilityRow> = Vec::with_capacity(nb * na);
    let mut preference = Vec::with_capacity(nb);
    for bi in 0..nb {
        let belief = space.belief(bi);
        preference.push(belief_preference(model, belief));
        for a in 0..na {
            let pred = belief_predict(model, belief, a);
            let obs_poss = observation_possibility(model, &pred, a);
            let mut targets: HashMap<usize, Level> = HashMap::new();
            for (obs, &poss) in obs_poss.iter().enumerate() {
                if poss.is_bottom() {
                    continue;
                }
                let updated = update_from_prediction(model, &pred, a, obs)
                    .expect("positive observation possibility");
                let j = space
                    .index_of(&updated)
                    .expect("updates stay in the enumerated space");
                let slot = targets.entry(j).or_insert(Level::BOTTOM);
                if poss > *slot {
                    *slot = poss;
                }
            }
            let entries: Vec<(u32, Level)> =
                targets.into_iter().map(|(j, l)| (j as u32, l)).collect();
            rows.push(PossibilityRow::from_entries(&scale, nb, entries)?);
        }
    }

    let initial_belief_index = space
        .index_of(model.initial_belief())
        .expect("the initial belief is normalized");

    let (rows, num_actions, stay, synthetic) = match model.stay_action() {
        None => (rows, na, None, false),
        Some(stay) => {
            let top = scale.top();
            let stays_everywhere = (0..nb)
                .all(|bi| rows[bi * na + stay].is_deterministic_at(bi, top));
            if stays_everywhere {
                (rows, na, Some(stay), false)
            } else {
                // Append a genuine stay action so the belief model still
                // satisfies the convergence hypothesis on every state.
                let mut extended = Vec::with_capacity(nb * (na + 1));
                for bi in 0..nb {
                    extended.extend(rows[bi * na..(bi + 1) * na].iter().cloned());
                    extended.push(PossibilityRow::deterministic(&scale, nb, bi));
                }
                (extended, na + 1, Some(na), true)
            }
        }
    };

    let mdp = PiMdpModel::new(scale, nb, num_actions, rows, preference, stay)?;
    Ok(FlattenedBeliefMdp {
        mdp,
        space,
        initial_belief_index,
        synthetic_stay: synthetic,
    })
}

/// Translates a mixed-observable model into a flat partially observable one
/// over its product state and observation spaces.
///
/// States are `visible * num_hidden + hidden`; observations are
/// `visible * num_hidden_obs + hidden_obs`, and an observation is possible
/// only when its visible component matches the arrival state's. The initial
/// belief copies the hidden belief into the known visible column. No single
/// flat stay observation exists (the "nothing" symbol carries the visible
/// component), so only the stay action is declared.
pub fn flatten_momdp_to_pomdp(model: &PiMomdpModel) -> PiPomdpModel {
    let scale = model.scale().clone();
    let product = model.num_product_states();
    let na = model.num_actions();
    let n_obs_flat = model.num_visible_states() * model.num_hidden_observations();

    let mut transition = Vec::with_capacity(product * na);
    let mut observation = Vec::with_capacity(product * na);
    for state in 0..product {
        let visible = state / model.num_hidden_states();
        for a in 0..na {
            transition.push(model.transition_row(state, a).clone());
            let entries: Vec<(u32, Level)> = model
                .observation_row(state, a)
                .iter()
                .map(|(o, l)| {
                    (
                        (visible * model.num_hidden_observations() + o) as u32,
                        l,
                    )
                })
                .collect();
            observation.push(
                PossibilityRow::from_entries(&scale, n_obs_flat, entries)
                    .expect("source row is normalized"),
            );
        }
    }

    let mut initial = vec![Level::BOTTOM; product];
    for h in 0..model.num_hidden_states() {
        initial[model.product_state(model.initial().visible(), h)] =
            model.initial().hidden().get(h);
    }
    let initial =
        PossibilityDistribution::new(&scale, initial).expect("hidden belief is normalized");

    let core = PiMdpModel::new(
        scale,
        product,
        na,
        transition,
        model.preferences().to_vec(),
        Some(model.stay_action()),
    )
    .expect("source model is valid");
    PiPomdpModel::new(core, n_obs_flat, observation, initial, None)
        .expect("source model is valid")
}

/// Breadth-first set of beliefs reachable from the initial belief through
/// non-erroring updates, in visit order. Refuses after `cap` beliefs.
pub fn reachable_beliefs(
    model: &PiPomdpModel,
    cap: usize,
) -> Result<Vec<PossibilityDistribution>> {
    let mut seen: HashSet<Vec<Level>> = HashSet::new();
    let mut order = Vec::new();
    let mut queue = VecDeque::new();
    seen.insert(model.initial_belief().values().to_vec());
    order.push(model.initial_belief().clone());
    queue.push_back(model.initial_belief().clone());
    while let Some(belief) = queue.pop_front() {
        for a in 0..model.num_actions() {
            let pred = belief_predict(model, &belief, a);
            let obs_poss = observation_possibility(model, &pred, a);
            for (obs, &poss) in obs_poss.iter().enumerate() {
                if poss.is_bottom() {
                    continue;
                }
                let updated = update_from_prediction(model, &pred, a, obs)
                    .expect("positive observation possibility");
                if seen.insert(updated.values().to_vec()) {
                    if order.len() >= cap {
                        return Err(Error::BeliefSpaceTooLarge {
                            cardinality: format!("more than {cap} reachable beliefs"),
                            cap: cap as u64,
                        });
                    }
                    order.push(updated.clone());
                    queue.push_back(updated);
                }
            }
        }
    }
    Ok(order)
}
