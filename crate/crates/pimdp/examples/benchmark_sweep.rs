//! A scaled-down run of the robustness benchmark.
//!
//! Solves both agents on a 5x5 grid and sweeps the ground truth's far-field
//! error probability and the wrongness of the initial belief, printing the
//! comparison table that the `bench` subcommand writes as CSV. The full-size
//! protocol (10x10 grid, 10^4 runs) lives in the acceptance test suite and
//! behind `pimdp bench`.
//!
//! Run with: `cargo run --release --example benchmark_sweep`

use pimdp::grid::{
    sweep_initial_belief, sweep_pbad, BaselineParams, GridConfig, SolvedGridAgents,
};

fn main() -> pimdp::Result<()> {
    let cfg = GridConfig {
        g: 5,
        d: 10.0,
        c: 2.0,
        p_bad: 0.8,
        ..GridConfig::default()
    };
    let baseline = BaselineParams {
        n_points: 101,
        ..BaselineParams::default()
    };
    eprintln!("solving both agents ...");
    let agents = SolvedGridAgents::solve(&cfg, &baseline)?;

    let n_runs = 2000;
    let seed = 7;
    let max_steps = 200;

    let sweep = sweep_pbad(&cfg, &agents, &[0.5, 0.6, 0.7, 0.8, 0.9], n_runs, seed, max_steps)?;
    println!("far-field error sweep ({n_runs} runs per point):");
    println!("{:>8} {:>12} {:>12}", "p_bad", "poss mean", "prob mean");
    for row in &sweep.rows {
        println!(
            "{:>8.2} {:>12.2} {:>12.2}",
            row.parameter,
            row.poss_mean.unwrap_or(f64::NAN),
            row.prob_mean.unwrap_or(f64::NAN)
        );
    }

    let sweep = sweep_initial_belief(&cfg, &agents, &[0.5, 0.7, 0.9], n_runs, seed, max_steps)?;
    println!("\nwrong-initial-belief sweep (truth fixed, p_bad {}):", cfg.p_bad);
    println!("{:>8} {:>12} {:>12}", "w", "poss mean", "prob mean");
    for row in &sweep.rows {
        println!(
            "{:>8.2} {:>12.2} {:>12.2}",
            row.parameter,
            row.poss_mean.unwrap_or(f64::NAN),
            row.prob_mean.unwrap_or(f64::NAN)
        );
    }
    println!("\nCSV form of the last table:\n{}", sweep.to_csv());
    Ok(())
}
