//! Why the policy is only updated on strict value improvement.
//!
//! Two states, a stay action and a move action `b` that reaches the goal
//! deterministically. Once the values converge, *every* action looks optimal
//! in the start state (staying keeps a state whose value has already risen
//! to the top), so extracting a greedy policy at convergence can return the
//! useless stay action. Updating the policy only at sweeps where the value
//! strictly increases records the action that actually caused the increase.
//!
//! Run with: `cargo run --example value_iteration_guard`

use pimdp::mdp::{value_iteration, PiMdpModel};
use pimdp::{make_scale, Level, PossibilityRow};

fn main() -> pimdp::Result<()> {
    let scale = make_scale(&[0.0, 1.0])?;
    let top = scale.top();
    let n = 2;
    let rows = vec![
        // state 0: stay, then b -> state 1
        PossibilityRow::deterministic(&scale, n, 0),
        PossibilityRow::deterministic(&scale, n, 1),
        // state 1 is absorbing under both actions
        PossibilityRow::deterministic(&scale, n, 1),
        PossibilityRow::deterministic(&scale, n, 1),
    ];
    let preference = vec![Level::BOTTOM, top];
    let model = PiMdpModel::new(scale.clone(), n, 2, rows, preference, Some(0))?;

    let solution = value_iteration(&model)?;
    let action = |a: usize| if a == 0 { "stay" } else { "b" };
    println!("converged in {} sweeps", solution.iterations);
    for s in 0..n {
        println!(
            "  state {s}: value {}, policy {}",
            scale.label(solution.values[s]),
            action(solution.policy.action(s))
        );
    }
    println!();
    println!(
        "state 0 keeps action `{}` even though at convergence the stay action \
         ties with it; the tie only appears after the value has already risen.",
        action(solution.policy.action(0))
    );
    Ok(())
}
