//! Finite-horizon dynamic programming on a small fully observable model.
//!
//! A four-state chain where each hop is a little less plausible than the one
//! before; only the far end is satisfactory. Values grow with the horizon as
//! longer trajectories come into reach, then freeze once the whole chain is
//! covered.
//!
//! Run with: `cargo run --example finite_horizon`

use pimdp::mdp::{finite_horizon_solve, PiMdpModel};
use pimdp::{make_scale, Level, PossibilityRow};

fn main() -> pimdp::Result<()> {
    let scale = make_scale(&[0.0, 0.25, 0.5, 0.75, 1.0])?;
    let top = scale.top();
    let n = 4;
    let hop = [top, Level(3), Level(2)]; // possibility of each forward hop

    let mut rows = Vec::new();
    for s in 0..n {
        // action 0: stay put
        rows.push(PossibilityRow::deterministic(&scale, n, s));
        // action 1: try to advance
        let mut dense = vec![Level::BOTTOM; n];
        if s + 1 < n {
            dense[s + 1] = hop[s];
            dense[s] = top; // advancing may fail, staying is entirely possible
        } else {
            dense[s] = top;
        }
        rows.push(PossibilityRow::from_dense(&scale, &dense)?);
    }
    let mut preference = vec![Level::BOTTOM; n];
    preference[n - 1] = top;
    let model = PiMdpModel::new(scale.clone(), n, 2, rows, preference, Some(0))?;

    let horizon = 5;
    let solution = finite_horizon_solve(&model, horizon);
    println!("optimistic values per horizon (rows) and state (columns):");
    for (p, values) in solution.values.iter().enumerate() {
        let labels: Vec<String> = values.iter().map(|&l| scale.label(l).to_string()).collect();
        println!("  u_{p} = [{}]", labels.join(", "));
    }
    println!();
    println!("decision rules per stage (s = stay, a = advance):");
    for (t, rule) in solution.policy.iter().enumerate() {
        let names: Vec<&str> = rule.iter().map(|&a| if a == 0 { "s" } else { "a" }).collect();
        println!("  stage {t}: [{}]", names.join(" "));
    }
    println!();
    println!(
        "with {horizon} stages and a 3-hop chain there is slack: early stages tie \
         (resolved to stay), the final stages push toward the goal"
    );
    Ok(())
}
