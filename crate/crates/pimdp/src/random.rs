//! Seeded random model generators.
//!
//! These back the oracle-agreement test suites; they are deterministic given
//! the RNG and always produce valid models (normalized rows, genuine stay
//! structure).

use rand::Rng;

use crate::mdp::PiMdpModel;
use crate::momdp::{MixedBelief, PiMomdpModel};
use crate::pomdp::PiPomdpModel;
use crate::scale::{Level, PossibilityDistribution, PossibilityRow, QualitativeScale};

#[derive(Clone, Debug)]
pub struct MdpParams {
    pub max_states: usize,
    pub max_actions: usize,
    pub max_levels: usize,
}

#[derive(Clone, Debug)]
pub struct MomdpParams {
    pub max_visible: usize,
    pub num_hidden: usize,
    pub max_hidden_obs: usize,
    pub num_levels: usize,
}

/// A normalized random row: random levels with one entry forced to top.
fn random_row<R: Rng>(rng: &mut R, scale: &QualitativeScale, domain: usize) -> PossibilityRow {
    let mut dense: Vec<Level> = (0..domain)
        .map(|_| Level(rng.gen_range(0..scale.len()) as u16))
        .collect();
    let pinned = rng.gen_range(0..domain);
    dense[pinned] = scale.top();
    PossibilityRow::from_dense(scale, &dense).expect("row is normalized by construction")
}

fn random_levels<R: Rng>(rng: &mut R, scale: &QualitativeScale, n: usize) -> Vec<Level> {
    (0..n)
        .map(|_| Level(rng.gen_range(0..scale.len()) as u16))
        .collect()
}

/// Random fully observable model with a genuine stay action at a random index.
pub fn random_mdp_with_stay<R: Rng>(rng: &mut R, params: &MdpParams) -> PiMdpModel {
    let num_states = rng.gen_range(1..=params.max_states);
    let num_actions = rng.gen_range(1..=params.max_actions);
    let num_levels = rng.gen_range(2..=params.max_levels);
    let scale = QualitativeScale::uniform(num_levels - 1);
    let stay = rng.gen_range(0..num_actions);

    let mut rows = Vec::with_capacity(num_states * num_actions);
    for s in 0..num_states {
        for a in 0..num_actions {
            if a == stay {
                rows.push(PossibilityRow::deterministic(&scale, num_states, s));
            } else {
                rows.push(random_row(rng, &scale, num_states));
            }
        }
    }
    let preference = random_levels(rng, &scale, num_states);
    PiMdpModel::new(scale, num_states, num_actions, rows, preference, Some(stay))
        .expect("generated model is valid")
}

/// Random partially observable model with a stay action and a dedicated
/// "nothing" observation emitted exactly under the stay action.
pub fn random_pomdp_with_stay<R: Rng>(rng: &mut R, params: &MdpParams) -> PiPomdpModel {
    let core = random_mdp_with_stay(rng, params);
    let scale = core.scale().clone();
    let num_states = core.num_states();
    let num_actions = core.num_actions();
    let stay = core.stay_action().expect("generator sets a stay action");
    // Composite observations plus the "nothing" symbol at the last index.
    let num_observations = rng.gen_range(1..=3) + 1;
    let nothing = num_observations - 1;

    let mut obs_rows = Vec::with_capacity(num_states * num_actions);
    for _s in 0..num_states {
        for a in 0..num_actions {
            if a == stay {
                obs_rows.push(PossibilityRow::deterministic(
                    &scale,
                    num_observations,
                    nothing,
                ));
            } else {
                obs_rows.push(random_row(rng, &scale, num_observations));
            }
        }
    }
    let mut initial = random_levels(rng, &scale, num_states);
    initial[rng.gen_range(0..num_states)] = scale.top();
    let initial = PossibilityDistribution::new(&scale, initial).expect("normalized");
    PiPomdpModel::new(core, num_observations, obs_rows, initial, Some(nothing))
        .expect("generated model is valid")
}

/// Random mixed-observable model: stay action at a random index with the
/// deterministic "nothing" hidden observation, all other rows random.
pub fn random_momdp<R: Rng>(rng: &mut R, params: &MomdpParams) -> PiMomdpModel {
    let num_visible = rng.gen_range(1..=params.max_visible);
    let num_hidden = params.num_hidden;
    let num_actions = rng.gen_range(2..=3);
    let scale = QualitativeScale::uniform(params.num_levels - 1);
    let stay = rng.gen_range(0..num_actions);
    // Hidden observations plus the "nothing" symbol at the last index.
    let num_hidden_obs = rng.gen_range(1..=params.max_hidden_obs) + 1;
    let nothing = num_hidden_obs - 1;

    let product = num_visible * num_hidden;
    let mut transition = Vec::with_capacity(product * num_actions);
    let mut observation = Vec::with_capacity(product * num_actions);
    for state in 0..product {
        for a in 0..num_actions {
            if a == stay {
                transition.push(PossibilityRow::deterministic(&scale, product, state));
                observation.push(PossibilityRow::deterministic(&scale, num_hidden_obs, nothing));
            } else {
                transition.push(random_row(rng, &scale, product));
                observation.push(random_row(rng, &scale, num_hidden_obs));
            }
        }
    }
    let preference = random_levels(rng, &scale, product);
    let mut hidden0 = random_levels(rng, &scale, num_hidden);
    hidden0[rng.gen_range(0..num_hidden)] = scale.top();
    let initial = MixedBelief::new(
        rng.gen_range(0..num_visible),
        PossibilityDistribution::new(&scale, hidden0).expect("normalized"),
    );
    PiMomdpModel::new(
        scale,
        num_visible,
        num_hidden,
        num_actions,
        num_hidden_obs,
        transition,
        observation,
        preference,
        initial,
        stay,
        nothing,
    )
    .expect("generated model is valid")
}
