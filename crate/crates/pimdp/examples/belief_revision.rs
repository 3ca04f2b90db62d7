//! Qualitative belief revision on a static hidden state.
//!
//! The hidden state never changes; only observations arrive. Depending on
//! how reliable an observation is relative to the current belief, the
//! revised belief confirms, flips, or ignores it - and an observation the
//! model rules out entirely leaves the rule undefined, which the caller must
//! handle.
//!
//! Run with: `cargo run --example belief_revision`

use pimdp::mdp::PiMdpModel;
use pimdp::pomdp::{belief_preference, belief_update, PiPomdpModel};
use pimdp::{make_scale, Level, PossibilityDistribution, PossibilityRow};

/// Two hidden states, both actions keep the state; action 1 produces one of
/// two informative readings with the given possibility rows, action 0 is the
/// stay action paired with the "nothing" observation.
fn probe_model(rows: [[Level; 2]; 2]) -> pimdp::Result<PiPomdpModel> {
    let scale = make_scale(&[0.0, 0.25, 0.5, 1.0])?;
    let n = 2;
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
        vec![Level::BOTTOM, scale.top()],
        Some(0),
    )?;
    let mut observation = Vec::new();
    for s in 0..n {
        observation.push(PossibilityRow::deterministic(&scale, 3, 2)); // nothing
        let dense = [rows[s][0], rows[s][1], Level::BOTTOM];
        observation.push(PossibilityRow::from_dense(&scale, &dense)?);
    }
    let initial = PossibilityDistribution::total_ignorance(&scale, n);
    PiPomdpModel::new(core, 3, observation, initial, Some(2))
}

fn show(scale: &pimdp::QualitativeScale, what: &str, b: &PossibilityDistribution) {
    let labels: Vec<String> = b.values().iter().map(|&l| scale.label(l).to_string()).collect();
    println!("  {what}: ({})", labels.join(", "));
}

fn main() -> pimdp::Result<()> {
    let quarter = Level(1);
    let half = Level(2);
    let top = Level(3);

    // Prior: state 0 entirely possible, state 1 only half possible.
    let cases = [
        ("confirming, more reliable than the prior", [[top, quarter], [quarter, top]]),
        ("contradicting, more reliable than the prior", [[quarter, top], [top, quarter]]),
        ("uninformative", [[top, top], [top, top]]),
    ];
    for (name, rows) in cases {
        let model = probe_model(rows)?;
        let scale = model.scale().clone();
        let prior = PossibilityDistribution::new(&scale, vec![top, half])?;
        println!("{name} (observation 0):");
        show(&scale, "prior ", &prior);
        let posterior = belief_update(&model, &prior, 1, 0)?;
        show(&scale, "after ", &posterior);
        println!(
            "  belief preference: {} -> {}",
            scale.label(belief_preference(&model, &prior)),
            scale.label(belief_preference(&model, &posterior))
        );
        println!();
    }

    // An impossible observation: certainty of state 0 but observation 1 is
    // only compatible with state 1.
    let model = probe_model([[top, Level::BOTTOM], [Level::BOTTOM, top]])?;
    let certain = PossibilityDistribution::certain(model.scale(), 2, 0);
    match belief_update(&model, &certain, 1, 1) {
        Err(e) => println!("impossible observation is refused: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
