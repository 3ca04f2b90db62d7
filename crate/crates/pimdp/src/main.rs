//! Command-line front end: model loading, solving, belief-space statistics,
//! the grid benchmark sweeps and single simulations.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use pimdp::beliefs::belief_space_cardinality;
use pimdp::error::Error;
use pimdp::grid::{
    sweep_initial_belief, sweep_pbad, wrong_initial_hidden, BaselineParams, GridConfig,
    PossibilisticGridAgent, ProbabilisticGridAgent, SolvedGridAgents, TruthMode, HIDDEN_A2,
};
use pimdp::mdp::{finite_horizon_solve, value_iteration};
use pimdp::modelfile::{
    grid_momdp_to_loaded, load_model, save_model, LoadedModel, LoadedMomdp, LoadedPomdp,
};
use pimdp::momdp::momdp_value_iteration;
use pimdp::pomdp::flatten_pomdp_to_mdp;
use pimdp::DEFAULT_ENUMERATION_CAP;

#[derive(Parser)]
#[command(
    name = "pimdp",
    about = "Solvers and benchmarks for qualitative possibilistic (PO/MO)MDPs",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a model file and print its value table and policy.
    Solve(SolveArgs),
    /// Print belief-space statistics of a model file.
    Enumerate { model: PathBuf },
    /// Run the grid benchmark sweeps and write CSV tables.
    Bench(BenchArgs),
    /// Generate the qualitative grid model as a model file.
    GenGrid(GenGridArgs),
    /// Roll seeded simulations of the grid mission and print a report.
    Simulate(SimulateArgs),
}

#[derive(Args)]
struct SolveArgs {
    model: PathBuf,
    /// Finite horizon length (fully observable and flat models).
    #[arg(long, conflicts_with = "infinite")]
    horizon: Option<usize>,
    /// Infinite-horizon value iteration (requires a stay action).
    #[arg(long)]
    infinite: bool,
    /// Also write the solution as JSON.
    #[arg(long)]
    dump: Option<PathBuf>,
    /// Maximum number of table rows to print.
    #[arg(long, default_value_t = 64)]
    limit: usize,
}

#[derive(Args)]
struct GridArgs {
    /// Grid side.
    #[arg(long, default_value_t = 10)]
    g: u32,
    /// Probabilistic observation range constant.
    #[arg(long, default_value_t = 10.0)]
    d: f64,
    /// Ground-truth proximity threshold.
    #[arg(long, default_value_t = 4.0)]
    c: f64,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    grid: GridArgs,
    /// Far-field error probabilities to sweep (comma separated).
    #[arg(long, value_delimiter = ',')]
    pbad_list: Vec<f64>,
    /// Wrong-initial-belief strengths to sweep (comma separated, in [0.5, 1)).
    #[arg(long, value_delimiter = ',')]
    wrongness_list: Vec<f64>,
    /// Far-field error probability used by the wrongness sweep.
    #[arg(long, default_value_t = 0.8)]
    pbad: f64,
    #[arg(long, default_value_t = 10_000)]
    runs: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 400)]
    max_steps: u32,
    /// Belief grid resolution of the probabilistic baseline.
    #[arg(long, default_value_t = 201)]
    belief_points: usize,
    /// Output directory for the CSV tables.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct GenGridArgs {
    #[command(flatten)]
    grid: GridArgs,
    /// Output model file.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    grid: GridArgs,
    /// Far-field error probability of the ground truth.
    #[arg(long, default_value_t = 0.8)]
    pbad: f64,
    /// Which agent to roll: poss, prob or both.
    #[arg(long, default_value = "both")]
    agent: String,
    /// Wrong initial belief strength in [0.5, 1); fixes the truth to the
    /// state the belief argues against.
    #[arg(long)]
    wrongness: Option<f64>,
    #[arg(long, default_value_t = 1000)]
    runs: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 400)]
    max_steps: u32,
    #[arg(long, default_value_t = 201)]
    belief_points: usize,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

enum CliError {
    Usage(String),
    Lib(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

/// 2 for validation failures, 3 for solver and runtime failures.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse(_)
        | Error::Validation(_)
        | Error::InvalidScaleLabel(_)
        | Error::EmptyScale
        | Error::DimensionMismatch { .. }
        | Error::NotNormalized(_)
        | Error::LevelOutOfRange { .. }
        | Error::IndexOutOfRange { .. }
        | Error::InvalidStay(_)
        | Error::InvalidConfig(_) => 2,
        Error::MissingStayAction
        | Error::IterationBoundExceeded { .. }
        | Error::ImpossibleObservation { .. }
        | Error::BeliefSpaceTooLarge { .. }
        | Error::NonConvergence { .. }
        | Error::Io(_) => 3,
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Enumerate { model } => cmd_enumerate(model),
        Command::Bench(args) => cmd_bench(args),
        Command::GenGrid(args) => cmd_gen_grid(args),
        Command::Simulate(args) => cmd_simulate(args),
    }
}

fn grid_config(grid: &GridArgs, p_bad: f64) -> GridConfig {
    GridConfig {
        g: grid.g,
        d: grid.d,
        c: grid.c,
        p_bad,
        ..GridConfig::default()
    }
}

fn label_of(scale: &pimdp::QualitativeScale, l: pimdp::Level) -> String {
    format!("{}", scale.label(l))
}

fn cmd_solve(args: SolveArgs) -> Result<(), CliError> {
    let loaded = load_model(&args.model)?;
    if !args.infinite && args.horizon.is_none() {
        return Err(CliError::Usage(
            "pass --infinite or --horizon <p>".into(),
        ));
    }
    let mut dump = serde_json::Map::new();
    dump.insert("kind".into(), loaded.kind().into());

    match &loaded {
        LoadedModel::Mdp(m) => {
            let scale = m.model.scale();
            if let Some(p) = args.horizon {
                let sol = finite_horizon_solve(&m.model, p);
                println!("finite horizon {p} over {} states", m.model.num_states());
                let last = sol.values.last().expect("horizon 0 still has u_0");
                let mut entries = Vec::new();
                for (s, name) in m.states.iter().enumerate() {
                    let action = if p == 0 {
                        "-".to_string()
                    } else {
                        m.actions[sol.policy[0][s]].clone()
                    };
                    println!(
                        "  {name}: u_{p} = {}, first action {action}",
                        label_of(scale, last[s])
                    );
                    entries.push(serde_json::json!({
                        "state": name,
                        "value": scale.label(last[s]),
                        "first_action": action,
                    }));
                }
                dump.insert("horizon".into(), p.into());
                dump.insert("table".into(), entries.into());
            } else {
                let sol = value_iteration(&m.model).map_err(CliError::Lib)?;
                println!(
                    "value iteration converged in {} sweeps over {} states",
                    sol.iterations,
                    m.model.num_states()
                );
                let mut entries = Vec::new();
                for (s, name) in m.states.iter().enumerate() {
                    let action = &m.actions[sol.policy.action(s)];
                    println!(
                        "  {name}: u* = {}, policy {action}",
                        label_of(scale, sol.values[s])
                    );
                    entries.push(serde_json::json!({
                        "state": name,
                        "value": scale.label(sol.values[s]),
                        "action": action,
                    }));
                }
                dump.insert("iterations".into(), sol.iterations.into());
                dump.insert("table".into(), entries.into());
            }
        }
        LoadedModel::Pomdp(p) => {
            solve_pomdp(p, &args, &mut dump)?;
        }
        LoadedModel::Momdp(m) => {
            if args.horizon.is_some() {
                return Err(CliError::Usage(
                    "finite horizons are supported for pi-mdp and pi-pomdp files; solve mixed models with --infinite".into(),
                ));
            }
            solve_momdp(m, &args, &mut dump)?;
        }
    }

    if let Some(path) = &args.dump {
        let text = serde_json::to_string_pretty(&serde_json::Value::Object(dump))
            .expect("serializable");
        std::fs::write(path, text + "\n").map_err(|e| CliError::Lib(e.into()))?;
        println!("solution written to {}", path.display());
    }
    Ok(())
}

fn belief_string(scale: &pimdp::QualitativeScale, b: &pimdp::PossibilityDistribution) -> String {
    let parts: Vec<String> = b.values().iter().map(|&l| label_of(scale, l)).collect();
    format!("({})", parts.join(", "))
}

fn solve_pomdp(
    p: &LoadedPomdp,
    args: &SolveArgs,
    dump: &mut serde_json::Map<String, serde_json::Value>,
) -> Result<(), CliError> {
    let flat = flatten_pomdp_to_mdp(&p.model, DEFAULT_ENUMERATION_CAP)?;
    let scale = p.model.scale();
    println!(
        "belief space: {} beliefs over {} states{}",
        flat.space.len(),
        p.model.num_states(),
        if flat.synthetic_stay {
            " (stay action appended for the belief model)"
        } else {
            ""
        }
    );
    let action_name = |a: usize| -> String {
        p.actions
            .get(a)
            .cloned()
            .unwrap_or_else(|| "stay*".to_string())
    };
    if let Some(horizon) = args.horizon {
        let sol = finite_horizon_solve(&flat.mdp, horizon);
        let last = sol.values.last().expect("non-empty");
        let b0 = flat.initial_belief_index;
        println!(
            "initial belief {}: u_{horizon} = {}",
            belief_string(scale, flat.space.belief(b0)),
            label_of(scale, last[b0])
        );
        if horizon > 0 {
            println!("  first action there: {}", action_name(sol.policy[0][b0]));
        }
        dump.insert("horizon".into(), horizon.into());
        dump.insert(
            "initial_belief_value".into(),
            scale.label(last[b0]).into(),
        );
    } else {
        let sol = value_iteration(&flat.mdp).map_err(CliError::Lib)?;
        println!("value iteration converged in {} sweeps", sol.iterations);
        let b0 = flat.initial_belief_index;
        println!(
            "initial belief {}: u* = {}, policy {}",
            belief_string(scale, flat.space.belief(b0)),
            label_of(scale, sol.values[b0]),
            action_name(sol.policy.action(b0))
        );
        let mut entries = Vec::new();
        for bi in 0..flat.space.len().min(args.limit) {
            let b = flat.space.belief(bi);
            println!(
                "  {}: u* = {}, policy {}",
                belief_string(scale, b),
                label_of(scale, sol.values[bi]),
                action_name(sol.policy.action(bi))
            );
            entries.push(serde_json::json!({
                "belief": b.values().iter().map(|&l| scale.label(l)).collect::<Vec<_>>(),
                "value": scale.label(sol.values[bi]),
                "action": action_name(sol.policy.action(bi)),
            }));
        }
        if flat.space.len() > args.limit {
            println!("  ... {} more beliefs", flat.space.len() - args.limit);
        }
        dump.insert("iterations".into(), sol.iterations.into());
        dump.insert("table".into(), entries.into());
    }
    Ok(())
}

fn solve_momdp(
    m: &LoadedMomdp,
    args: &SolveArgs,
    dump: &mut serde_json::Map<String, serde_json::Value>,
) -> Result<(), CliError> {
    let sol = momdp_value_iteration(&m.model)?;
    let scale = m.model.scale();
    let nb = sol.hidden_space.len();
    println!(
        "value iteration converged in {} sweeps over {} visible states x {} hidden beliefs",
        sol.iterations,
        m.model.num_visible_states(),
        nb
    );
    let initial = m.model.initial();
    let b0 = sol
        .belief_index(initial.hidden())
        .expect("initial belief is canonical");
    println!(
        "initial ({}, {}): u* = {}, policy {}",
        m.visible_states[initial.visible()],
        belief_string(scale, initial.hidden()),
        label_of(scale, sol.value(initial.visible(), b0)),
        m.actions[sol.action(initial.visible(), b0)]
    );
    let mut printed = 0usize;
    let mut entries = Vec::new();
    'outer: for sv in 0..m.model.num_visible_states() {
        for bi in 0..nb {
            if printed >= args.limit {
                println!(
                    "  ... {} more points",
                    m.model.num_visible_states() * nb - printed
                );
                break 'outer;
            }
            println!(
                "  ({}, {}): u* = {}, policy {}",
                m.visible_states[sv],
                belief_string(scale, sol.hidden_space.belief(bi)),
                label_of(scale, sol.value(sv, bi)),
                m.actions[sol.action(sv, bi)]
            );
            entries.push(serde_json::json!({
                "visible": m.visible_states[sv],
                "hidden_belief": sol.hidden_space.belief(bi).values().iter()
                    .map(|&l| scale.label(l)).collect::<Vec<_>>(),
                "value": scale.label(sol.value(sv, bi)),
                "action": m.actions[sol.action(sv, bi)],
            }));
            printed += 1;
        }
    }
    dump.insert("iterations".into(), sol.iterations.into());
    dump.insert("table".into(), entries.into());
    Ok(())
}

fn cmd_enumerate(path: PathBuf) -> Result<(), CliError> {
    let loaded = load_model(&path)?;
    match &loaded {
        LoadedModel::Mdp(m) => {
            println!(
                "fully observable; belief space = state space ({} states)",
                m.model.num_states()
            );
        }
        LoadedModel::Pomdp(p) => {
            let levels = p.model.scale().len();
            let card = belief_space_cardinality(levels, p.model.num_states());
            println!(
                "flat belief space over {} states with {} levels: {} beliefs",
                p.model.num_states(),
                levels,
                card
            );
        }
        LoadedModel::Momdp(m) => {
            let levels = m.model.scale().len();
            let nv = m.model.num_visible_states();
            let nh = m.model.num_hidden_states();
            let mixed =
                belief_space_cardinality(levels, nh) * num_bigint::BigUint::from(nv);
            let flat = belief_space_cardinality(levels, nv * nh);
            println!("scale levels: {levels}");
            println!(
                "mixed belief space: {nv} visible x {} hidden beliefs = {mixed} points",
                belief_space_cardinality(levels, nh)
            );
            println!(
                "flat belief space over the {} product states: {flat} beliefs",
                nv * nh
            );
        }
    }
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> Result<(), CliError> {
    if args.pbad_list.is_empty() && args.wrongness_list.is_empty() {
        return Err(CliError::Usage(
            "pass --pbad-list and/or --wrongness-list".into(),
        ));
    }
    let cfg = grid_config(&args.grid, args.pbad);
    cfg.validate()?;
    std::fs::create_dir_all(&args.out).map_err(Error::from)?;
    let baseline = BaselineParams {
        n_points: args.belief_points,
        ..BaselineParams::default()
    };
    eprintln!("solving both agents for g = {} ...", cfg.g);
    let agents = SolvedGridAgents::solve(&cfg, &baseline)?;
    eprintln!(
        "  mixed solver: {} sweeps; baseline: {} sweeps",
        agents.mixed_solution.iterations, agents.prob_policy.iterations
    );

    if !args.pbad_list.is_empty() {
        let table = sweep_pbad(
            &cfg,
            &agents,
            &args.pbad_list,
            args.runs,
            args.seed,
            args.max_steps,
        )?;
        for row in &table.rows {
            println!(
                "p_bad {:.3}: poss mean {:.3}, prob mean {:.3}",
                row.parameter,
                row.poss_mean.unwrap_or(f64::NAN),
                row.prob_mean.unwrap_or(f64::NAN)
            );
        }
        let path = args.out.join("pbad_sweep.csv");
        table.write_csv(&path)?;
        println!("wrote {}", path.display());
    }
    if !args.wrongness_list.is_empty() {
        let table = sweep_initial_belief(
            &cfg,
            &agents,
            &args.wrongness_list,
            args.runs,
            args.seed,
            args.max_steps,
        )?;
        for row in &table.rows {
            println!(
                "wrongness {:.3}: poss mean {:.3}, prob mean {:.3}",
                row.parameter,
                row.poss_mean.unwrap_or(f64::NAN),
                row.prob_mean.unwrap_or(f64::NAN)
            );
        }
        let path = args.out.join("belief_sweep.csv");
        table.write_csv(&path)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn cmd_gen_grid(args: GenGridArgs) -> Result<(), CliError> {
    let cfg = grid_config(&args.grid, GridConfig::default().p_bad);
    let loaded = grid_momdp_to_loaded(&cfg)?;
    println!(
        "grid {0}x{0}: {1} scale levels, {2} visible states",
        cfg.g,
        loaded.model.scale().len(),
        loaded.model.num_visible_states()
    );
    save_model(&LoadedModel::Momdp(loaded), &args.out)?;
    println!("wrote {}", args.out.display());
    Ok(())
}

fn print_report(tag: &str, cfg: &GridConfig, report: &pimdp::grid::SimulationReport) {
    match report.mean_reward {
        Some(mean) => println!(
            "{tag}: {} runs, mean reward {:.3} (std {:.3}), {} capped, {} fallbacks",
            report.n_runs,
            mean,
            report.std_reward.unwrap_or(f64::NAN),
            report.capped_runs,
            report.fallback_events
        ),
        None => println!("{tag}: 0 runs, mean reward undefined"),
    }
    let _ = cfg;
}

fn cmd_simulate(args: SimulateArgs) -> Result<(), CliError> {
    let cfg = grid_config(&args.grid, args.pbad);
    cfg.validate()?;
    let run_poss = args.agent == "poss" || args.agent == "both";
    let run_prob = args.agent == "prob" || args.agent == "both";
    if !run_poss && !run_prob {
        return Err(CliError::Usage(format!(
            "unknown agent {:?}; expected poss, prob or both",
            args.agent
        )));
    }
    let truth = match args.wrongness {
        Some(_) => TruthMode::Fixed(pimdp::grid::HIDDEN_A1),
        None => TruthMode::UniformPerRun,
    };
    let baseline = BaselineParams {
        n_points: args.belief_points,
        ..BaselineParams::default()
    };
    let agents = SolvedGridAgents::solve(&cfg, &baseline)?;
    if let Some(w) = args.wrongness {
        if !(0.5..1.0).contains(&w) {
            return Err(CliError::Usage("wrongness must be in [0.5, 1)".into()));
        }
    }
    if run_poss {
        let mut agent = PossibilisticGridAgent::new(&agents.momdp, &agents.mixed_solution);
        if let Some(w) = args.wrongness {
            agent = agent
                .with_initial_hidden(wrong_initial_hidden(agents.momdp.scale(), w, HIDDEN_A2));
        }
        let report = pimdp::grid::simulate(
            &cfg,
            &mut agent,
            truth,
            args.seed,
            args.runs,
            args.max_steps,
        )?;
        print_report("possibilistic", &cfg, &report);
    }
    if run_prob {
        let mut agent = ProbabilisticGridAgent::new(&agents.prob_model, &agents.prob_policy);
        if let Some(w) = args.wrongness {
            agent = agent.with_initial_belief(1.0 - w);
        }
        let report = pimdp::grid::simulate(
            &cfg,
            &mut agent,
            truth,
            args.seed,
            args.runs,
            args.max_steps,
        )?;
        print_report("probabilistic", &cfg, &report);
    }
    Ok(())
}
