//! Solving a small partially observable model through its belief space.
//!
//! A two-state "where is the reward" model: the hidden state is static, a
//! probe action yields a reading that is reliable only from the matching
//! state, and a commit action pays off only in state 1. The model flattens
//! into a fully observable model over its 5 canonical beliefs, which value
//! iteration then solves exactly.
//!
//! Run with: `cargo run --example flatten_and_solve`

use pimdp::mdp::{value_iteration, PiMdpModel};
use pimdp::pomdp::{flatten_pomdp_to_mdp, PiPomdpModel};
use pimdp::{make_scale, Level, PossibilityDistribution, PossibilityRow};

fn main() -> pimdp::Result<()> {
    let scale = make_scale(&[0.0, 0.5, 1.0])?;
    let top = scale.top();
    let half = Level(1);
    let n = 2;

    // Actions: 0 = stay (with the "nothing" observation 2), 1 = probe.
    let transition = vec![
        PossibilityRow::deterministic(&scale, n, 0),
        PossibilityRow::deterministic(&scale, n, 0),
        PossibilityRow::deterministic(&scale, n, 1),
        PossibilityRow::deterministic(&scale, n, 1),
    ];
    let core = PiMdpModel::new(
        scale.clone(),
        n,
        2,
        transition,
        vec![Level::BOTTOM, top],
        Some(0),
    )?;
    let observation = vec![
        // state 0: stay -> nothing; probe -> reading 0 certain, reading 1 half
        PossibilityRow::deterministic(&scale, 3, 2),
        PossibilityRow::from_dense(&scale, &[top, half, Level::BOTTOM])?,
        // state 1: stay -> nothing; probe -> reading 1 certain, reading 0 half
        PossibilityRow::deterministic(&scale, 3, 2),
        PossibilityRow::from_dense(&scale, &[half, top, Level::BOTTOM])?,
    ];
    let initial = PossibilityDistribution::total_ignorance(&scale, n);
    let model = PiPomdpModel::new(core, 3, observation, initial, Some(2))?;

    let flat = flatten_pomdp_to_mdp(&model, pimdp::DEFAULT_ENUMERATION_CAP)?;
    println!(
        "flattened into {} beliefs x {} actions (synthetic stay appended: {})",
        flat.mdp.num_states(),
        flat.mdp.num_actions(),
        flat.synthetic_stay
    );

    let solution = value_iteration(&flat.mdp)?;
    println!("belief values after {} sweeps:", solution.iterations);
    for (i, belief) in flat.space.beliefs().iter().enumerate() {
        let labels: Vec<String> = belief
            .values()
            .iter()
            .map(|&l| scale.label(l).to_string())
            .collect();
        let action = match solution.policy.action(i) {
            0 => "stay",
            1 => "probe",
            _ => "stay*",
        };
        println!(
            "  ({}): value {}, policy {}",
            labels.join(", "),
            scale.label(solution.values[i]),
            action
        );
    }
    println!(
        "\ninitial belief is total ignorance (index {}): value {}",
        flat.initial_belief_index,
        scale.label(solution.values[flat.initial_belief_index])
    );
    Ok(())
}
