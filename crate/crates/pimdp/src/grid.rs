//! The grid target-recognition benchmark.
//!
//! A robot moves on a `g x g` grid it observes perfectly. Two known cells
//! hold targets; one of them is the good one (hidden state `A1`: target 1 is
//! good, `A2`: target 2 is good) and the mission is to identify and reach the
//! good target quickly. At every step the robot images both targets and gets
//! a composite reading whose reliability degrades with distance.
//!
//! Two agents are built over the same mission: a qualitative mixed-observable
//! model where mis-reading a target is graded by normalized distance, and a
//! discounted probabilistic model solved over a discretized belief grid. The
//! simulator rolls both against a ground truth that deviates from the
//! probabilistic model far from the targets, which is the mis-specification
//! the comparison is about.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::momdp::{
    mixed_belief_update, MixedBelief, MixedValueSolution, PiMomdpModel,
};
use crate::scale::{Level, PossibilityDistribution, PossibilityRow, QualitativeScale};

/// Composite observation symbols: the first letter is the reading of target
/// 1, the second of target 2.
pub const OBS_AA: usize = 0;
pub const OBS_AB: usize = 1;
pub const OBS_BA: usize = 2;
pub const OBS_BB: usize = 3;
/// The "nothing" observation emitted by the stay action.
pub const OBS_NOTHING: usize = 4;
pub const NUM_HIDDEN_OBS: usize = 5;

/// Hidden states: `A1` means target 1 is the good one.
pub const HIDDEN_A1: usize = 0;
pub const HIDDEN_A2: usize = 1;

/// Grid actions, in tie-break order; `stay` is last.
pub const ACTION_NAMES: [&str; 5] = ["up", "down", "left", "right", "stay"];
pub const ACTION_STAY: usize = 4;
pub const NUM_ACTIONS: usize = 5;

/// Benchmark configuration. Targets sit at `(1, g)` and `(g, 1)`, the robot
/// starts at `(1, 1)`.
#[derive(Clone, Debug)]
pub struct GridConfig {
    /// Grid side, in cells.
    pub g: u32,
    /// Range constant of the probabilistic observation model.
    pub d: f64,
    /// Ground-truth proximity threshold: beyond it from both targets the
    /// real observation error is `p_bad`.
    pub c: f64,
    /// Far-field probability of mis-reading a target in the ground truth.
    pub p_bad: f64,
    pub reward_goal: f64,
    pub penalty: f64,
    pub step_cost: f64,
    pub gamma: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            g: 10,
            d: 10.0,
            c: 4.0,
            p_bad: 0.8,
            reward_goal: 100.0,
            penalty: 100.0,
            step_cost: 1.0,
            gamma: 0.99,
        }
    }
}

impl GridConfig {
    pub fn validate(&self) -> Result<()> {
        if self.g <= 1 {
            return Err(Error::InvalidConfig("grid side must exceed 1".into()));
        }
        if !(0.0..=1.0).contains(&self.p_bad) {
            return Err(Error::InvalidConfig("p_bad must be in [0, 1]".into()));
        }
        if self.d <= 0.0 {
            return Err(Error::InvalidConfig("d must be positive".into()));
        }
        if self.c < 0.0 {
            return Err(Error::InvalidConfig("c must be non-negative".into()));
        }
        if !(0.0..1.0).contains(&self.gamma) {
            return Err(Error::InvalidConfig("gamma must be in [0, 1)".into()));
        }
        Ok(())
    }

    pub fn num_cells(&self) -> usize {
        (self.g * self.g) as usize
    }

    /// Cell index of grid coordinates (1-based).
    pub fn cell(&self, x: u32, y: u32) -> usize {
        debug_assert!((1..=self.g).contains(&x) && (1..=self.g).contains(&y));
        ((x - 1) * self.g + (y - 1)) as usize
    }

    pub fn coords(&self, cell: usize) -> (u32, u32) {
        (cell as u32 / self.g + 1, cell as u32 % self.g + 1)
    }

    pub fn start_cell(&self) -> usize {
        self.cell(1, 1)
    }

    pub fn target_cell(&self, target: usize) -> usize {
        match target {
            0 => self.cell(1, self.g),
            1 => self.cell(self.g, 1),
            _ => panic!("there are two targets"),
        }
    }

    /// Squared distance from a cell to a target, as an exact integer.
    pub fn dist2(&self, cell: usize, target: usize) -> u32 {
        let (x, y) = self.coords(cell);
        let (tx, ty) = self.coords(self.target_cell(target));
        let dx = x.abs_diff(tx);
        let dy = y.abs_diff(ty);
        dx * dx + dy * dy
    }

    /// Applies an action with boundary moves becoming self-loops.
    pub fn apply_action(&self, cell: usize, action: usize) -> usize {
        let (x, y) = self.coords(cell);
        let (nx, ny) = match action {
            0 => (x, (y + 1).min(self.g)), // up
            1 => (x, y.saturating_sub(1).max(1)), // down
            2 => (x.saturating_sub(1).max(1), y), // left
            3 => ((x + 1).min(self.g), y), // right
            4 => (x, y),
            _ => panic!("unknown action {action}"),
        };
        self.cell(nx, ny)
    }
}

/// Maps each distinct squared distance to its level on the grid scale.
/// Labels are `sqrt(dist2 / max_dist2)`, so equal distances share a level
/// exactly and the extremes land on 0 and 1 exactly.
struct DistanceScale {
    scale: QualitativeScale,
    by_key: BTreeMap<u32, Level>,
}

fn distance_scale(cfg: &GridConfig) -> DistanceScale {
    let max_key = 2 * (cfg.g - 1) * (cfg.g - 1);
    let mut keys: Vec<u32> = Vec::new();
    for cell in 0..cfg.num_cells() {
        for target in 0..2 {
            keys.push(cfg.dist2(cell, target));
        }
    }
    keys.sort_unstable();
    keys.dedup();
    debug_assert_eq!(keys.first(), Some(&0));
    debug_assert_eq!(keys.last(), Some(&max_key));
    let labels: Vec<f64> = keys
        .iter()
        .map(|&k| (f64::from(k) / f64::from(max_key)).sqrt())
        .collect();
    let scale = QualitativeScale::new(&labels).expect("grid labels are valid");
    debug_assert_eq!(scale.len(), keys.len(), "labels are distinct by construction");
    let by_key = keys
        .iter()
        .enumerate()
        .map(|(i, &k)| (k, Level(i as u16)))
        .collect();
    DistanceScale { scale, by_key }
}

/// Builds the qualitative mixed-observable grid model.
///
/// The hidden state is static, moves are deterministic (boundary moves stay
/// in place), and mis-reading target `i` has possibility equal to the
/// normalized distance to it, so the good reading is always entirely
/// possible and a target's own nature is read perfectly from its cell. The
/// scale collects 0, 1 and every distinct normalized distance on the grid.
pub fn build_possibilistic_grid(cfg: &GridConfig) -> Result<PiMomdpModel> {
    cfg.validate()?;
    let DistanceScale { scale, by_key } = distance_scale(cfg);
    let num_visible = cfg.num_cells();
    let num_hidden = 2;
    let product = num_visible * num_hidden;
    let top = scale.top();

    let mut transition = Vec::with_capacity(product * NUM_ACTIONS);
    let mut observation = Vec::with_capacity(product * NUM_ACTIONS);
    for visible in 0..num_visible {
        let bad1 = by_key[&cfg.dist2(visible, 0)];
        let bad2 = by_key[&cfg.dist2(visible, 1)];
        for hidden in 0..num_hidden {
            let mut composite = [Level::BOTTOM; NUM_HIDDEN_OBS];
            if hidden == HIDDEN_A1 {
                composite[OBS_AB] = top;
                composite[OBS_AA] = bad2;
                composite[OBS_BB] = bad1;
                composite[OBS_BA] = bad1.min(bad2);
            } else {
                composite[OBS_BA] = top;
                composite[OBS_BB] = bad2;
                composite[OBS_AA] = bad1;
                composite[OBS_AB] = bad1.min(bad2);
            }
            for action in 0..NUM_ACTIONS {
                let next = cfg.apply_action(visible, action) * num_hidden + hidden;
                transition.push(PossibilityRow::deterministic(&scale, product, next));
                if action == ACTION_STAY {
                    observation.push(PossibilityRow::deterministic(
                        &scale,
                        NUM_HIDDEN_OBS,
                        OBS_NOTHING,
                    ));
                } else {
                    observation.push(PossibilityRow::from_dense(&scale, &composite)?);
                }
            }
        }
    }

    let mut preference = vec![Level::BOTTOM; product];
    preference[cfg.target_cell(0) * num_hidden + HIDDEN_A1] = top;
    preference[cfg.target_cell(1) * num_hidden + HIDDEN_A2] = top;

    let initial = MixedBelief::new(
        cfg.start_cell(),
        PossibilityDistribution::total_ignorance(&scale, num_hidden),
    );
    PiMomdpModel::new(
        scale,
        num_visible,
        num_hidden,
        NUM_ACTIONS,
        NUM_HIDDEN_OBS,
        transition,
        observation,
        preference,
        initial,
        ACTION_STAY,
        OBS_NOTHING,
    )
}

/// The probabilistic mission model: same grid, actions and composite
/// observations, with `Pr(good_i | cell) = (1 + exp(-dist_i / d)) / 2`.
#[derive(Clone, Debug)]
pub struct ProbGridModel {
    cfg: GridConfig,
    /// `good[cell][target]`.
    good: Vec<[f64; 2]>,
}

impl ProbGridModel {
    pub fn cfg(&self) -> &GridConfig {
        &self.cfg
    }

    pub fn good_probability(&self, cell: usize, target: usize) -> f64 {
        self.good[cell][target]
    }

    /// Probability of a composite observation symbol given a hidden state.
    pub fn observation_probability(&self, cell: usize, hidden: usize, obs: usize) -> f64 {
        let [g1, g2] = self.good[cell];
        // Probability that each target reads as "A".
        let (a1, a2) = if hidden == HIDDEN_A1 {
            (g1, 1.0 - g2)
        } else {
            (1.0 - g1, g2)
        };
        match obs {
            OBS_AA => a1 * a2,
            OBS_AB => a1 * (1.0 - a2),
            OBS_BA => (1.0 - a1) * a2,
            OBS_BB => (1.0 - a1) * (1.0 - a2),
            _ => panic!("unknown composite observation {obs}"),
        }
    }
}

/// Builds the probabilistic grid model and checks that every observation row
/// sums to one.
pub fn build_probabilistic_grid(cfg: &GridConfig) -> Result<ProbGridModel> {
    cfg.validate()?;
    let good: Vec<[f64; 2]> = (0..cfg.num_cells())
        .map(|cell| {
            let mut g = [0.0; 2];
            for (target, slot) in g.iter_mut().enumerate() {
                let dist = f64::from(cfg.dist2(cell, target)).sqrt();
                *slot = 0.5 * (1.0 + (-dist / cfg.d).exp());
            }
            g
        })
        .collect();
    let model = ProbGridModel {
        cfg: cfg.clone(),
        good,
    };
    for cell in 0..cfg.num_cells() {
        for hidden in 0..2 {
            let sum: f64 = (0..4)
                .map(|obs| model.observation_probability(cell, hidden, obs))
                .sum();
            assert!(
                (sum - 1.0).abs() < 1e-9,
                "observation probabilities at cell {cell} sum to {sum}"
            );
        }
    }
    Ok(model)
}

/// Greedy policy of the discounted baseline over `(cell, belief point)`.
///
/// The belief is the probability of `A1` discretized to `n_points` uniform
/// values including both endpoints; updates snap to the nearest point.
#[derive(Clone, Debug)]
pub struct ProbPolicy {
    n_points: usize,
    /// Greedy action per `(cell, belief point)`.
    actions: Vec<u8>,
    /// Converged value table, kept for inspection and symmetry checks.
    /// Target cells are terminal and hold zero.
    values: Vec<f64>,
    pub iterations: usize,
}

impl ProbPolicy {
    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn belief_at(&self, point: usize) -> f64 {
        point as f64 / (self.n_points - 1) as f64
    }

    pub fn snap(&self, b: f64) -> usize {
        debug_assert!((0.0..=1.0).contains(&b));
        (b * (self.n_points - 1) as f64).round() as usize
    }

    pub fn action(&self, cell: usize, b: f64) -> usize {
        self.actions[cell * self.n_points + self.snap(b)] as usize
    }

    pub fn value(&self, cell: usize, point: usize) -> f64 {
        self.values[cell * self.n_points + point]
    }
}

/// Solves the discounted baseline by value iteration over the discretized
/// belief space: expected-reward backups, Bayes updates snapped to the grid,
/// entering a target is terminal with the expected reward or penalty.
pub fn solve_prob_baseline(
    model: &ProbGridModel,
    n_points: usize,
    tolerance: f64,
    max_iters: usize,
) -> Result<ProbPolicy> {
    assert!(n_points >= 2, "the belief grid needs at least two points");
    let cfg = &model.cfg;
    let cells = cfg.num_cells();
    let t1 = cfg.target_cell(0);
    let t2 = cfg.target_cell(1);
    let snap = |b: f64| (b * (n_points - 1) as f64).round() as usize;

    // Precompute per (cell, belief point, observation): probability of the
    // observation and the snapped posterior point.
    let mut obs_table = vec![(0.0f64, 0usize); cells * n_points * 4];
    for cell in 0..cells {
        for point in 0..n_points {
            let b = point as f64 / (n_points - 1) as f64;
            for obs in 0..4 {
                let p1 = model.observation_probability(cell, HIDDEN_A1, obs);
                let p2 = model.observation_probability(cell, HIDDEN_A2, obs);
                let weight = b * p1 + (1.0 - b) * p2;
                let posterior = if weight > 0.0 { snap(b * p1 / weight) } else { 0 };
                obs_table[(cell * n_points + point) * 4 + obs] = (weight, posterior);
            }
        }
    }

    let backup = |values: &[f64], cell: usize, point: usize, action: usize| -> f64 {
        let b = point as f64 / (n_points - 1) as f64;
        let next = cfg.apply_action(cell, action);
        let mut q = -cfg.step_cost;
        if next == t1 {
            q += b * cfg.reward_goal - (1.0 - b) * cfg.penalty;
        } else if next == t2 {
            q += (1.0 - b) * cfg.reward_goal - b * cfg.penalty;
        } else {
            let mut expect = 0.0;
            for obs in 0..4 {
                let (weight, posterior) = obs_table[(next * n_points + point) * 4 + obs];
                if weight > 0.0 {
                    expect += weight * values[next * n_points + posterior];
                }
            }
            q += cfg.gamma * expect;
        }
        q
    };

    let mut values = vec![0.0f64; cells * n_points];
    let mut iterations = 0usize;
    loop {
        iterations += 1;
        let mut next_values = vec![0.0f64; cells * n_points];
        let mut residual = 0.0f64;
        for cell in 0..cells {
            if cell == t1 || cell == t2 {
                continue; // terminal
            }
            for point in 0..n_points {
                let best = (0..NUM_ACTIONS)
                    .map(|a| backup(&values, cell, point, a))
                    .fold(f64::NEG_INFINITY, f64::max);
                next_values[cell * n_points + point] = best;
                residual = residual.max((best - values[cell * n_points + point]).abs());
            }
        }
        values = next_values;
        if residual < tolerance {
            break;
        }
        if iterations >= max_iters {
            return Err(Error::NonConvergence {
                max_iters,
                residual,
            });
        }
    }

    // Greedy extraction everywhere, including target cells, so an agent that
    // finds itself standing on the bad target still has a defined move.
    let mut actions = vec![0u8; cells * n_points];
    for cell in 0..cells {
        for point in 0..n_points {
            let mut best = f64::NEG_INFINITY;
            let mut best_action = 0u8;
            for a in 0..NUM_ACTIONS {
                let q = backup(&values, cell, point, a);
                if q > best {
                    best = q;
                    best_action = a as u8;
                }
            }
            actions[cell * n_points + point] = best_action;
        }
    }

    Ok(ProbPolicy {
        n_points,
        actions,
        values,
        iterations,
    })
}

// ---------------------------------------------------------------------------
// Simulation
// ---------------------------------------------------------------------------

/// How the true hidden state is drawn per run.
#[derive(Clone, Copy, Debug)]
pub enum TruthMode {
    /// Uniform over the two hidden states.
    UniformPerRun,
    /// Always the given hidden state.
    Fixed(usize),
}

/// An executable policy plus the belief bookkeeping it needs at run time.
pub trait GridAgent {
    /// Start a fresh run from the initial belief.
    fn reset(&mut self);
    /// Incorporate the composite observation seen at `cell`. `prev_action`
    /// is `None` on the first step of a run. Returns `false` when the
    /// observation is impossible under the agent's model and the belief was
    /// kept unchanged.
    fn observe(&mut self, prev_action: Option<usize>, cell: usize, obs: usize) -> bool;
    /// The action to play at `cell` under the current belief.
    fn act(&self, cell: usize) -> usize;
}

/// Executes the qualitative mixed-observable policy, maintaining the hidden
/// belief with the qualitative revision rule on the sampled observations.
pub struct PossibilisticGridAgent<'a> {
    model: &'a PiMomdpModel,
    solution: &'a MixedValueSolution,
    initial_hidden: PossibilityDistribution,
    hidden: PossibilityDistribution,
    visible: usize,
}

impl<'a> PossibilisticGridAgent<'a> {
    pub fn new(model: &'a PiMomdpModel, solution: &'a MixedValueSolution) -> Self {
        let initial_hidden = model.initial().hidden().clone();
        Self {
            model,
            solution,
            hidden: initial_hidden.clone(),
            initial_hidden,
            visible: model.initial().visible(),
        }
    }

    /// Replaces the initial hidden belief (wrong-prior experiments).
    pub fn with_initial_hidden(mut self, hidden: PossibilityDistribution) -> Self {
        assert_eq!(hidden.len(), self.model.num_hidden_states());
        self.initial_hidden = hidden.clone();
        self.hidden = hidden;
        self
    }

    pub fn hidden_belief(&self) -> &PossibilityDistribution {
        &self.hidden
    }

    /// Pure conditioning on an observation at `cell`, used for the first
    /// observation of a run when no action has been played yet. The hidden
    /// state is static, so this is the revision rule with an identity
    /// transition; likelihood rows are taken from a non-stay action (they do
    /// not depend on which).
    fn condition_in_place(&mut self, cell: usize, obs: usize) -> bool {
        let probe = (0..self.model.num_actions())
            .find(|&a| a != self.model.stay_action())
            .expect("the grid model has move actions");
        let joint: Vec<Level> = (0..self.model.num_hidden_states())
            .map(|h| {
                let state = self.model.product_state(cell, h);
                self.model
                    .observation_row(state, probe)
                    .get(obs)
                    .min(self.hidden.get(h))
            })
            .collect();
        let peak = *joint.iter().max().expect("non-empty");
        if peak.is_bottom() {
            return false;
        }
        let top = self.model.scale().top();
        let values: Vec<Level> = joint
            .iter()
            .map(|&v| if v == peak { top } else { v })
            .collect();
        self.hidden =
            PossibilityDistribution::new(self.model.scale(), values).expect("normalized");
        true
    }
}

impl GridAgent for PossibilisticGridAgent<'_> {
    fn reset(&mut self) {
        self.hidden = self.initial_hidden.clone();
        self.visible = self.model.initial().visible();
    }

    fn observe(&mut self, prev_action: Option<usize>, cell: usize, obs: usize) -> bool {
        let ok = match prev_action {
            None => self.condition_in_place(cell, obs),
            Some(action) => {
                let before = MixedBelief::new(self.visible, self.hidden.clone());
                match mixed_belief_update(self.model, &before, action, cell, obs) {
                    Ok(updated) => {
                        self.hidden = updated.hidden().clone();
                        true
                    }
                    Err(Error::ImpossibleObservation { .. }) => false,
                    Err(other) => panic!("belief update failed: {other}"),
                }
            }
        };
        self.visible = cell;
        ok
    }

    fn act(&self, cell: usize) -> usize {
        let belief = self
            .solution
            .belief_index(&self.hidden)
            .expect("run-time beliefs stay in the canonical space");
        self.solution.action(cell, belief)
    }
}

/// Executes the discounted baseline policy: the carried belief is the exact
/// Bayes posterior, snapped to the grid only for policy lookups. A zero
/// posterior denominator keeps the prior (the agent's model deems the
/// observation impossible).
pub struct ProbabilisticGridAgent<'a> {
    model: &'a ProbGridModel,
    policy: &'a ProbPolicy,
    initial_belief: f64,
    belief: f64,
}

impl<'a> ProbabilisticGridAgent<'a> {
    pub fn new(model: &'a ProbGridModel, policy: &'a ProbPolicy) -> Self {
        Self {
            model,
            policy,
            initial_belief: 0.5,
            belief: 0.5,
        }
    }

    pub fn with_initial_belief(mut self, b: f64) -> Self {
        assert!((0.0..=1.0).contains(&b));
        self.initial_belief = b;
        self.belief = b;
        self
    }

    pub fn belief(&self) -> f64 {
        self.belief
    }
}

impl GridAgent for ProbabilisticGridAgent<'_> {
    fn reset(&mut self) {
        self.belief = self.initial_belief;
    }

    fn observe(&mut self, _prev_action: Option<usize>, cell: usize, obs: usize) -> bool {
        let p1 = self.model.observation_probability(cell, HIDDEN_A1, obs);
        let p2 = self.model.observation_probability(cell, HIDDEN_A2, obs);
        let weight = self.belief * p1 + (1.0 - self.belief) * p2;
        if weight <= 0.0 {
            return false;
        }
        self.belief = (self.belief * p1 / weight).clamp(0.0, 1.0);
        true
    }

    fn act(&self, cell: usize) -> usize {
        self.policy.action(cell, self.belief)
    }
}

/// Ground truth of the simulations: within distance `c` of a target the
/// probabilistic model is correct, beyond it from both targets each target
/// is read correctly only with probability `1 - p_bad`.
pub struct TruthModel<'a> {
    cfg: &'a GridConfig,
    model: ProbGridModel,
}

impl<'a> TruthModel<'a> {
    pub fn new(cfg: &'a GridConfig) -> Result<Self> {
        Ok(Self {
            cfg,
            model: build_probabilistic_grid(cfg)?,
        })
    }

    fn good_probability(&self, cell: usize, target: usize) -> f64 {
        let c2 = self.cfg.c * self.cfg.c;
        let far1 = f64::from(self.cfg.dist2(cell, 0)) > c2;
        let far2 = f64::from(self.cfg.dist2(cell, 1)) > c2;
        if far1 && far2 {
            1.0 - self.cfg.p_bad
        } else {
            self.model.good_probability(cell, target)
        }
    }

    /// Samples a composite observation. Standing on a target reads its
    /// nature perfectly (distance zero puts the truth in the model region
    /// where the good probability is exactly one).
    pub fn sample_observation<R: Rng>(&self, rng: &mut R, cell: usize, hidden: usize) -> usize {
        let good1 = rng.gen::<f64>() < self.good_probability(cell, 0);
        let good2 = rng.gen::<f64>() < self.good_probability(cell, 1);
        let (reads_a1, reads_a2) = if hidden == HIDDEN_A1 {
            (good1, !good2)
        } else {
            (!good1, good2)
        };
        (if reads_a1 { 0 } else { 2 }) + (if reads_a2 { 0 } else { 1 })
    }
}

/// Outcome of a batch of seeded runs.
#[derive(Clone, Debug, PartialEq)]
pub struct SimulationReport {
    pub n_runs: usize,
    /// Actions taken per run (`k`); the run's total reward is `goal - k`.
    pub step_counts: Vec<u32>,
    /// Runs stopped at the step cap without reaching the good target.
    pub capped_runs: usize,
    /// Observations the agent's model deemed impossible (belief kept).
    pub fallback_events: u64,
    /// Mean total reward; `None` when there are no runs.
    pub mean_reward: Option<f64>,
    /// Population standard deviation of the total reward.
    pub std_reward: Option<f64>,
}

impl SimulationReport {
    fn from_runs(goal: f64, step_counts: Vec<u32>, capped_runs: usize, fallbacks: u64) -> Self {
        let n = step_counts.len();
        let (mean, std) = if n == 0 {
            (None, None)
        } else {
            let rewards: Vec<f64> = step_counts.iter().map(|&k| goal - f64::from(k)).collect();
            let mean = rewards.iter().sum::<f64>() / n as f64;
            let var = rewards.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / n as f64;
            (Some(mean), Some(var.sqrt()))
        };
        Self {
            n_runs: n,
            step_counts,
            capped_runs,
            fallback_events: fallbacks,
            mean_reward: mean,
            std_reward: std,
        }
    }

    pub fn reward(&self, goal: f64, run: usize) -> f64 {
        goal - f64::from(self.step_counts[run])
    }
}

/// Rolls `n_runs` seeded missions of one agent against the ground truth.
///
/// Each run draws the true hidden state, then loops: sample the composite
/// observation at the current cell from the truth, let the agent revise its
/// belief and act, move. The run completes when the robot stands on the good
/// target's cell after `k` actions (total reward `goal - k`); runs reaching
/// `max_steps` first are capped and scored `goal - max_steps`. Run `r` uses
/// an independent RNG stream `r` of the base seed, so reports are
/// reproducible and runs are pairable across agents.
pub fn simulate(
    cfg: &GridConfig,
    agent: &mut dyn GridAgent,
    truth_mode: TruthMode,
    seed: u64,
    n_runs: usize,
    max_steps: u32,
) -> Result<SimulationReport> {
    cfg.validate()?;
    let truth = TruthModel::new(cfg)?;
    let mut step_counts = Vec::with_capacity(n_runs);
    let mut capped_runs = 0usize;
    let mut fallbacks = 0u64;

    for run in 0..n_runs {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(run as u64);
        let hidden = match truth_mode {
            TruthMode::Fixed(h) => h,
            TruthMode::UniformPerRun => usize::from(rng.gen::<f64>() < 0.5),
        };
        let goal_cell = cfg.target_cell(hidden);

        agent.reset();
        let mut cell = cfg.start_cell();
        let mut prev_action = None;
        let mut steps = 0u32;
        loop {
            if cell == goal_cell {
                break;
            }
            if steps >= max_steps {
                capped_runs += 1;
                break;
            }
            let obs = truth.sample_observation(&mut rng, cell, hidden);
            if !agent.observe(prev_action, cell, obs) {
                fallbacks += 1;
            }
            let action = agent.act(cell);
            cell = cfg.apply_action(cell, action);
            prev_action = Some(action);
            steps += 1;
        }
        step_counts.push(steps);
    }

    Ok(SimulationReport::from_runs(
        cfg.reward_goal,
        step_counts,
        capped_runs,
        fallbacks,
    ))
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

/// Baseline solver settings used by the sweeps.
#[derive(Clone, Debug)]
pub struct BaselineParams {
    pub n_points: usize,
    pub tolerance: f64,
    pub max_iters: usize,
}

impl Default for BaselineParams {
    fn default() -> Self {
        Self {
            n_points: 201,
            tolerance: 1e-6,
            max_iters: 100_000,
        }
    }
}

/// One comparison point of a sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub parameter: f64,
    pub poss_mean: Option<f64>,
    pub poss_std: Option<f64>,
    pub prob_mean: Option<f64>,
    pub prob_std: Option<f64>,
    pub poss_fallbacks: u64,
    pub capped_poss: usize,
    pub capped_prob: usize,
    pub n_runs: usize,
    pub seed: u64,
}

/// A sweep result table, one row per parameter value.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

pub const SWEEP_CSV_HEADER: &str = "sweep_parameter,poss_mean_reward,poss_std,prob_mean_reward,prob_std,poss_fallback_count,capped_runs_poss,capped_runs_prob,n_runs,seed";

/// Formats with six significant digits.
fn format_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (6 - 1 - magnitude).clamp(0, 17) as usize;
    format!("{x:.decimals$}")
}

fn format_opt(x: Option<f64>) -> String {
    x.map(format_sig).unwrap_or_else(|| "nan".into())
}

impl SweepTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(SWEEP_CSV_HEADER);
        out.push('\n');
        for row in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                format_sig(row.parameter),
                format_opt(row.poss_mean),
                format_opt(row.poss_std),
                format_opt(row.prob_mean),
                format_opt(row.prob_std),
                row.poss_fallbacks,
                row.capped_poss,
                row.capped_prob,
                row.n_runs,
                row.seed,
            );
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }
}

/// Solved agents shared by the sweep points (policies do not depend on the
/// swept parameters, so both models are solved once).
pub struct SolvedGridAgents {
    pub momdp: PiMomdpModel,
    pub mixed_solution: MixedValueSolution,
    pub prob_model: ProbGridModel,
    pub prob_policy: ProbPolicy,
}

impl SolvedGridAgents {
    pub fn solve(cfg: &GridConfig, baseline: &BaselineParams) -> Result<Self> {
        let momdp = build_possibilistic_grid(cfg)?;
        let mixed_solution = crate::momdp::momdp_value_iteration(&momdp)?;
        let prob_model = build_probabilistic_grid(cfg)?;
        let prob_policy = solve_prob_baseline(
            &prob_model,
            baseline.n_points,
            baseline.tolerance,
            baseline.max_iters,
        )?;
        Ok(Self {
            momdp,
            mixed_solution,
            prob_model,
            prob_policy,
        })
    }
}

/// Sweeps the far-field error probability of the ground truth: for each
/// value, both agents fly the same mission set (uniform true hidden state,
/// paired run streams) and their mean total rewards are tabulated.
pub fn sweep_pbad(
    cfg: &GridConfig,
    agents: &SolvedGridAgents,
    pbad_values: &[f64],
    n_runs: usize,
    seed: u64,
    max_steps: u32,
) -> Result<SweepTable> {
    let mut rows = Vec::new();
    if n_runs == 0 {
        return Ok(SweepTable { rows });
    }
    for &p_bad in pbad_values {
        if !(0.0..=1.0).contains(&p_bad) {
            return Err(Error::InvalidConfig(format!(
                "p_bad {p_bad} outside [0, 1]"
            )));
        }
        let point_cfg = GridConfig {
            p_bad,
            ..cfg.clone()
        };
        let mut poss = PossibilisticGridAgent::new(&agents.momdp, &agents.mixed_solution);
        let poss_report = simulate(
            &point_cfg,
            &mut poss,
            TruthMode::UniformPerRun,
            seed,
            n_runs,
            max_steps,
        )?;
        let mut prob = ProbabilisticGridAgent::new(&agents.prob_model, &agents.prob_policy);
        let prob_report = simulate(
            &point_cfg,
            &mut prob,
            TruthMode::UniformPerRun,
            seed,
            n_runs,
            max_steps,
        )?;
        rows.push(SweepRow {
            parameter: p_bad,
            poss_mean: poss_report.mean_reward,
            poss_std: poss_report.std_reward,
            prob_mean: prob_report.mean_reward,
            prob_std: prob_report.std_reward,
            poss_fallbacks: poss_report.fallback_events,
            capped_poss: poss_report.capped_runs,
            capped_prob: prob_report.capped_runs,
            n_runs,
            seed,
        });
    }
    Ok(SweepTable { rows })
}

/// Maps a wrongness parameter `w` (the probability the baseline assigns to
/// the wrong hidden state) to the qualitative initial belief: the wrong
/// state is entirely possible and the good one keeps the greatest scale
/// level at most `2(1 - w)`, so `w = 1/2` is total ignorance and `w -> 1`
/// approaches certainty of the wrong state.
pub fn wrong_initial_hidden(
    scale: &QualitativeScale,
    w: f64,
    wrong: usize,
) -> PossibilityDistribution {
    assert!((0.5..1.0).contains(&w), "wrongness must be in [0.5, 1)");
    let cap = 2.0 * (1.0 - w);
    let correct_level = scale
        .iter()
        .filter(|&l| scale.label(l) <= cap)
        .max()
        .unwrap_or(Level::BOTTOM);
    let mut values = vec![correct_level; 2];
    values[wrong] = scale.top();
    PossibilityDistribution::new(scale, values).expect("wrong state holds top")
}

/// Sweeps how wrong the initial belief is while the truth is fixed: target 1
/// is the good one but both agents start believing in target 2, more
/// strongly as `w` grows. Uses the configuration's `p_bad` for the truth.
pub fn sweep_initial_belief(
    cfg: &GridConfig,
    agents: &SolvedGridAgents,
    wrongness_values: &[f64],
    n_runs: usize,
    seed: u64,
    max_steps: u32,
) -> Result<SweepTable> {
    let mut rows = Vec::new();
    if n_runs == 0 {
        return Ok(SweepTable { rows });
    }
    for &w in wrongness_values {
        if !(0.5..1.0).contains(&w) {
            return Err(Error::InvalidConfig(format!(
                "wrongness {w} outside [0.5, 1)"
            )));
        }
        let hidden0 = wrong_initial_hidden(agents.momdp.scale(), w, HIDDEN_A2);
        let mut poss = PossibilisticGridAgent::new(&agents.momdp, &agents.mixed_solution)
            .with_initial_hidden(hidden0);
        let poss_report = simulate(
            cfg,
            &mut poss,
            TruthMode::Fixed(HIDDEN_A1),
            seed,
            n_runs,
            max_steps,
        )?;
        let mut prob = ProbabilisticGridAgent::new(&agents.prob_model, &agents.prob_policy)
            .with_initial_belief(1.0 - w);
        let prob_report = simulate(
            cfg,
            &mut prob,
            TruthMode::Fixed(HIDDEN_A1),
            seed,
            n_runs,
            max_steps,
        )?;
        rows.push(SweepRow {
            parameter: w,
            poss_mean: poss_report.mean_reward,
            poss_std: poss_report.std_reward,
            prob_mean: prob_report.mean_reward,
            prob_std: prob_report.std_reward,
            poss_fallbacks: poss_report.fallback_events,
            capped_poss: poss_report.capped_runs,
            capped_prob: prob_report.capped_runs,
            n_runs,
            seed,
        });
    }
    Ok(SweepTable { rows })
}
