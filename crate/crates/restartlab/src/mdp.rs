//! Episodic tabular MDP snapshots, exact value oracles, variation budgets,
//! and dynamic regret.
//!
//! An environment is a sequence of per-episode snapshots over a fixed state
//! and action space. A snapshot holds step-indexed reward and transition
//! tables; rewards lie in `[0, 1]` and every transition row is a probability
//! distribution. Non-stationarity across episodes is measured by two
//! variation budgets: the summed sup-norm drift of rewards and the summed
//! sup-L1 drift of transition rows between consecutive episodes.
//!
//! Value oracles work on one snapshot at a time. `optimal_values` runs
//! backward induction with a terminal row of zeros; `policy_values`
//! evaluates a fixed deterministic policy the same way without the max.
//! `dynamic_regret` folds a recorded trace against per-episode optimal
//! values, either exactly (oracle value minus evaluated policy value) or
//! empirically (oracle value minus realized episode reward).

use std::sync::Arc;

use ndarray::{Array2, Array3, Array4};
use thiserror::Error;

/// Tolerance for transition-row normalization checks.
pub const PROB_TOL: f64 = 1e-9;
/// Tolerance for variation-budget conservation checks.
pub const BUDGET_TOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum MdpError {
    #[error("schedule dimensions must be at least 1 (S={s}, A={a}, H={h}, M={m})")]
    EmptySchedule { s: usize, a: usize, h: usize, m: usize },
    #[error("snapshot table shapes do not match the schedule")]
    ShapeMismatch,
    #[error("reward out of [0,1] at (h={h}, s={s}, a={a}): {value}")]
    RewardOutOfRange { h: usize, s: usize, a: usize, value: f64 },
    #[error("transition row (h={h}, s={s}, a={a}) sums to {sum}, not 1")]
    RowNotNormalized { h: usize, s: usize, a: usize, sum: f64 },
    #[error("negative transition probability at (h={h}, s={s}, a={a}, s'={s2}): {value}")]
    NegativeProbability { h: usize, s: usize, a: usize, s2: usize, value: f64 },
    #[error("initial state {state} out of range (S={s})")]
    BadInitialState { state: usize, s: usize },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Error, PartialEq)]
pub enum TraceError {
    #[error("episode {episode} has no optimal value")]
    MissingOptimalValue { episode: usize },
    #[error("episode {episode} has no policy value (required for exact regret)")]
    MissingPolicyValue { episode: usize },
}

/// Fixed dimensions of a benchmark run: `total_steps` is always
/// `num_episodes * horizon`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScheduleConstants {
    pub num_states: usize,
    pub num_actions: usize,
    pub horizon: usize,
    pub num_episodes: usize,
    pub total_steps: usize,
}

impl ScheduleConstants {
    pub fn new(
        num_states: usize,
        num_actions: usize,
        horizon: usize,
        num_episodes: usize,
    ) -> Result<Self, MdpError> {
        if num_states == 0 || num_actions == 0 || horizon == 0 || num_episodes == 0 {
            return Err(MdpError::EmptySchedule {
                s: num_states,
                a: num_actions,
                h: horizon,
                m: num_episodes,
            });
        }
        Ok(ScheduleConstants {
            num_states,
            num_actions,
            horizon,
            num_episodes,
            total_steps: num_episodes * horizon,
        })
    }
}

/// One episode's tables: `rewards[[h, s, a]]` and `transitions[[h, s, a, s']]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MdpSnapshot {
    pub rewards: Array3<f64>,
    pub transitions: Array4<f64>,
}

impl MdpSnapshot {
    pub fn horizon(&self) -> usize {
        self.rewards.shape()[0]
    }

    pub fn num_states(&self) -> usize {
        self.rewards.shape()[1]
    }

    pub fn num_actions(&self) -> usize {
        self.rewards.shape()[2]
    }

    /// Checks table shapes, reward range, and row normalization.
    pub fn validate(&self) -> Result<(), MdpError> {
        let (h_len, s_len, a_len) = (self.horizon(), self.num_states(), self.num_actions());
        if self.transitions.shape() != [h_len, s_len, a_len, s_len] {
            return Err(MdpError::ShapeMismatch);
        }
        for h in 0..h_len {
            for s in 0..s_len {
                for a in 0..a_len {
                    let r = self.rewards[[h, s, a]];
                    if !(-1e-12..=1.0 + 1e-12).contains(&r) {
                        return Err(MdpError::RewardOutOfRange { h, s, a, value: r });
                    }
                    let mut sum = 0.0;
                    for s2 in 0..s_len {
                        let p = self.transitions[[h, s, a, s2]];
                        if p < -1e-12 {
                            return Err(MdpError::NegativeProbability { h, s, a, s2, value: p });
                        }
                        sum += p;
                    }
                    if (sum - 1.0).abs() > PROB_TOL {
                        return Err(MdpError::RowNotNormalized { h, s, a, sum });
                    }
                }
            }
        }
        Ok(())
    }
}

/// A non-stationary environment: one snapshot per episode over a fixed
/// schedule. `snapshot_at` takes a 1-based episode index and may advance
/// internal generator state; requesting an earlier episode than the last
/// one served is allowed and replays deterministically.
pub trait NonStationaryMdp {
    fn schedule(&self) -> &ScheduleConstants;
    fn initial_state(&self) -> usize;
    fn snapshot_at(&mut self, episode: usize) -> Arc<MdpSnapshot>;
    /// Configured or analytically known total variation budgets
    /// `(delta_r, delta_p)` over the whole episode sequence.
    fn nominal_budgets(&self) -> (f64, f64);
}

/// Optimal state-action and state values for one snapshot. `v_star` has
/// `H + 1` rows; the last is the zero terminal row.
#[derive(Debug, Clone)]
pub struct ValueTables {
    pub q_star: Array3<f64>,
    pub v_star: Array2<f64>,
}

/// Backward induction over one snapshot.
pub fn optimal_values(snap: &MdpSnapshot) -> ValueTables {
    let (h_len, s_len, a_len) = (snap.horizon(), snap.num_states(), snap.num_actions());
    let mut v = Array2::zeros((h_len + 1, s_len));
    let mut q = Array3::zeros((h_len, s_len, a_len));
    for h in (0..h_len).rev() {
        for s in 0..s_len {
            let mut best = f64::NEG_INFINITY;
            for a in 0..a_len {
                let mut x = snap.rewards[[h, s, a]];
                for s2 in 0..s_len {
                    x += snap.transitions[[h, s, a, s2]] * v[[h + 1, s2]];
                }
                q[[h, s, a]] = x;
                if x > best {
                    best = x;
                }
            }
            v[[h, s]] = best;
        }
    }
    ValueTables { q_star: q, v_star: v }
}

/// Greedy policy of a value table, ties broken toward the lowest action.
pub fn greedy_policy(values: &ValueTables) -> Array2<usize> {
    let (h_len, s_len, a_len) = values.q_star.dim();
    let mut policy = Array2::zeros((h_len, s_len));
    for h in 0..h_len {
        for s in 0..s_len {
            let mut best_a = 0;
            let mut best = values.q_star[[h, s, 0]];
            for a in 1..a_len {
                if values.q_star[[h, s, a]] > best {
                    best = values.q_star[[h, s, a]];
                    best_a = a;
                }
            }
            policy[[h, s]] = best_a;
        }
    }
    policy
}

/// Exact evaluation of a deterministic policy `policy[[h, s]]` on one
/// snapshot. Returns the full `(H + 1) x S` value table.
pub fn policy_values(snap: &MdpSnapshot, policy: &Array2<usize>) -> Array2<f64> {
    let (h_len, s_len) = (snap.horizon(), snap.num_states());
    let mut v = Array2::zeros((h_len + 1, s_len));
    for h in (0..h_len).rev() {
        for s in 0..s_len {
            let a = policy[[h, s]];
            let mut x = snap.rewards[[h, s, a]];
            for s2 in 0..s_len {
                x += snap.transitions[[h, s, a, s2]] * v[[h + 1, s2]];
            }
            v[[h, s]] = x;
        }
    }
    v
}

/// Value of a deterministic policy from the initial state at step 1.
pub fn policy_value(snap: &MdpSnapshot, policy: &Array2<usize>, initial_state: usize) -> f64 {
    policy_values(snap, policy)[[0, initial_state]]
}

/// Exact evaluation of the uniform-random policy on one snapshot.
pub fn uniform_policy_values(snap: &MdpSnapshot) -> Array2<f64> {
    let (h_len, s_len, a_len) = (snap.horizon(), snap.num_states(), snap.num_actions());
    let mut v = Array2::zeros((h_len + 1, s_len));
    for h in (0..h_len).rev() {
        for s in 0..s_len {
            let mut acc = 0.0;
            for a in 0..a_len {
                let mut x = snap.rewards[[h, s, a]];
                for s2 in 0..s_len {
                    x += snap.transitions[[h, s, a, s2]] * v[[h + 1, s2]];
                }
                acc += x;
            }
            v[[h, s]] = acc / a_len as f64;
        }
    }
    v
}

/// Variation contributed by one consecutive-episode pair: per step, the
/// sup over `(s, a)` of the absolute reward difference and of the L1
/// distance between transition rows, each summed over steps.
pub fn snapshot_variation(a: &MdpSnapshot, b: &MdpSnapshot) -> (f64, f64) {
    let (h_len, s_len, a_len) = (a.horizon(), a.num_states(), a.num_actions());
    let mut dr = 0.0;
    let mut dp = 0.0;
    for h in 0..h_len {
        let mut sup_r: f64 = 0.0;
        let mut sup_p: f64 = 0.0;
        for s in 0..s_len {
            for act in 0..a_len {
                let diff = (a.rewards[[h, s, act]] - b.rewards[[h, s, act]]).abs();
                sup_r = sup_r.max(diff);
                let mut l1 = 0.0;
                for s2 in 0..s_len {
                    l1 += (a.transitions[[h, s, act, s2]] - b.transitions[[h, s, act, s2]]).abs();
                }
                sup_p = sup_p.max(l1);
            }
        }
        dr += sup_r;
        dp += sup_p;
    }
    (dr, dp)
}

/// Realized variation budgets `(delta_r, delta_p)` over the full episode
/// sequence of an environment.
pub fn variation_budgets<E: NonStationaryMdp + ?Sized>(env: &mut E) -> (f64, f64) {
    let m_max = env.schedule().num_episodes;
    let mut dr = 0.0;
    let mut dp = 0.0;
    let mut prev = env.snapshot_at(1);
    for m in 2..=m_max {
        let cur = env.snapshot_at(m);
        let (r, p) = snapshot_variation(&prev, &cur);
        dr += r;
        dp += p;
        prev = cur;
    }
    (dr, dp)
}

/// How regret is accumulated from a trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegretMode {
    /// Oracle value minus the exact value of the episode's played policy.
    Exact,
    /// Oracle value minus the realized episode reward.
    Empirical,
}

/// One episode of a recorded run.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeRecord {
    pub reward: f64,
    pub optimal_value: Option<f64>,
    pub policy_value: Option<f64>,
    pub restart: bool,
}

/// A full per-trial trace for one learner and seed.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentTrace {
    pub learner_id: String,
    pub seed: u64,
    pub episodes: Vec<EpisodeRecord>,
}

/// Dynamic regret of a trace. Exact mode requires per-episode policy
/// values; both modes require per-episode optimal values.
pub fn dynamic_regret(trace: &ExperimentTrace, mode: RegretMode) -> Result<f64, TraceError> {
    let mut total = 0.0;
    for (i, ep) in trace.episodes.iter().enumerate() {
        let episode = i + 1;
        let opt = ep
            .optimal_value
            .ok_or(TraceError::MissingOptimalValue { episode })?;
        let actual = match mode {
            RegretMode::Exact => ep
                .policy_value
                .ok_or(TraceError::MissingPolicyValue { episode })?,
            RegretMode::Empirical => ep.reward,
        };
        total += opt - actual;
    }
    Ok(total)
}

/// An environment backed by an explicit snapshot list. Used for hand-built
/// fixtures and as the reference semantics for generator-backed
/// environments.
#[derive(Debug, Clone)]
pub struct SnapshotSequence {
    schedule: ScheduleConstants,
    initial_state: usize,
    snapshots: Vec<Arc<MdpSnapshot>>,
    nominal: (f64, f64),
}

impl SnapshotSequence {
    pub fn new(initial_state: usize, snapshots: Vec<MdpSnapshot>) -> Result<Self, MdpError> {
        if snapshots.is_empty() {
            return Err(MdpError::Invalid("snapshot sequence is empty".into()));
        }
        let first = &snapshots[0];
        let schedule = ScheduleConstants::new(
            first.num_states(),
            first.num_actions(),
            first.horizon(),
            snapshots.len(),
        )?;
        if initial_state >= schedule.num_states {
            return Err(MdpError::BadInitialState {
                state: initial_state,
                s: schedule.num_states,
            });
        }
        let mut nominal = (0.0, 0.0);
        for (i, snap) in snapshots.iter().enumerate() {
            snap.validate()?;
            if snap.rewards.shape() != first.rewards.shape() {
                return Err(MdpError::ShapeMismatch);
            }
            if i > 0 {
                let (dr, dp) = snapshot_variation(&snapshots[i - 1], snap);
                nominal.0 += dr;
                nominal.1 += dp;
            }
        }
        Ok(SnapshotSequence {
            schedule,
            initial_state,
            snapshots: snapshots.into_iter().map(Arc::new).collect(),
            nominal,
        })
    }

    /// A stationary environment repeating one snapshot for `episodes` episodes.
    pub fn stationary(
        initial_state: usize,
        snapshot: MdpSnapshot,
        episodes: usize,
    ) -> Result<Self, MdpError> {
        snapshot.validate()?;
        let schedule = ScheduleConstants::new(
            snapshot.num_states(),
            snapshot.num_actions(),
            snapshot.horizon(),
            episodes,
        )?;
        if initial_state >= schedule.num_states {
            return Err(MdpError::BadInitialState {
                state: initial_state,
                s: schedule.num_states,
            });
        }
        let shared = Arc::new(snapshot);
        Ok(SnapshotSequence {
            schedule,
            initial_state,
            snapshots: vec![shared; episodes],
            nominal: (0.0, 0.0),
        })
    }
}

impl NonStationaryMdp for SnapshotSequence {
    fn schedule(&self) -> &ScheduleConstants {
        &self.schedule
    }

    fn initial_state(&self) -> usize {
        self.initial_state
    }

    fn snapshot_at(&mut self, episode: usize) -> Arc<MdpSnapshot> {
        assert!(
            episode >= 1 && episode <= self.snapshots.len(),
            "episode {episode} out of 1..={}",
            self.snapshots.len()
        );
        Arc::clone(&self.snapshots[episode - 1])
    }

    fn nominal_budgets(&self) -> (f64, f64) {
        self.nominal
    }
}

/// Brute-force optimal values by exhaustive deterministic-policy
/// enumeration: every action map over `(h, s)` is evaluated linearly and
/// the per-(h, s) maximum is taken. Reference oracle for small instances;
/// cost is `A^(H*S)` policy evaluations.
pub fn enumerate_optimal_values(snap: &MdpSnapshot) -> Array2<f64> {
    let (h_len, s_len, a_len) = (snap.horizon(), snap.num_states(), snap.num_actions());
    let cells = h_len * s_len;
    let total = (a_len as u64).checked_pow(cells as u32).expect("policy space too large");
    assert!(total <= 2_000_000, "policy space too large to enumerate: {total}");
    let mut best = Array2::from_elem((h_len + 1, s_len), f64::NEG_INFINITY);
    for s in 0..s_len {
        best[[h_len, s]] = 0.0;
    }
    let mut policy = Array2::zeros((h_len, s_len));
    for idx in 0..total {
        let mut rem = idx;
        for cell in 0..cells {
            policy[[cell / s_len, cell % s_len]] = (rem % a_len as u64) as usize;
            rem /= a_len as u64;
        }
        let v = policy_values(snap, &policy);
        for h in 0..h_len {
            for s in 0..s_len {
                if v[[h, s]] > best[[h, s]] {
                    best[[h, s]] = v[[h, s]];
                }
            }
        }
    }
    best
}

/// Brute-force policy value by full expectation-tree expansion from
/// `(h, s)`, with no tabulation. Reference for `policy_values`.
pub fn expectation_tree_policy_value(
    snap: &MdpSnapshot,
    policy: &Array2<usize>,
    h: usize,
    s: usize,
) -> f64 {
    if h == snap.horizon() {
        return 0.0;
    }
    let a = policy[[h, s]];
    let mut value = snap.rewards[[h, s, a]];
    for s2 in 0..snap.num_states() {
        let p = snap.transitions[[h, s, a, s2]];
        if p > 0.0 {
            value += p * expectation_tree_policy_value(snap, policy, h + 1, s2);
        }
    }
    value
}

pub mod test_fixtures {
    use super::*;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    /// A random valid snapshot with the given shape. Transition rows are
    /// normalized positive draws.
    pub fn random_snapshot(h_len: usize, s_len: usize, a_len: usize, seed: u64) -> MdpSnapshot {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let mut rewards = Array3::zeros((h_len, s_len, a_len));
        let mut transitions = Array4::zeros((h_len, s_len, a_len, s_len));
        for h in 0..h_len {
            for s in 0..s_len {
                for a in 0..a_len {
                    rewards[[h, s, a]] = rng.random();
                    let mut row = vec![0.0; s_len];
                    let mut sum = 0.0;
                    for x in row.iter_mut() {
                        *x = rng.random::<f64>() + 1e-3;
                        sum += *x;
                    }
                    for (s2, x) in row.iter().enumerate() {
                        transitions[[h, s, a, s2]] = x / sum;
                    }
                }
            }
        }
        let snap = MdpSnapshot { rewards, transitions };
        snap.validate().unwrap();
        snap
    }

    /// A random deterministic policy for the given shape.
    pub fn random_policy(h_len: usize, s_len: usize, a_len: usize, seed: u64) -> Array2<usize> {
        let mut rng = ChaCha12Rng::seed_from_u64(seed ^ 0x9e3779b97f4a7c15);
        Array2::from_shape_fn((h_len, s_len), |_| rng.random_range(0..a_len))
    }
}
