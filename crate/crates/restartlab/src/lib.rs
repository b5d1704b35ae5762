//! Benchmark laboratory for episodic tabular reinforcement learning in
//! environments whose rewards and transitions drift or jump over time.
//!
//! The crate has three layers:
//!
//! * [`mdp`] defines per-episode MDP snapshots, exact value oracles
//!   (backward induction and fixed-policy evaluation), variation budgets,
//!   and dynamic regret over recorded traces.
//! * [`env`] provides two seeded non-stationary environment generators:
//!   a randomized drifting MDP and a two-lock corridor with abrupt reward
//!   swaps or gradual transition drift.
//! * [`agent`] and [`restart`] implement the learners (an optimistic
//!   stage-updating Q-learner and a randomized ensemble Q-learner) and the
//!   three restart paradigms layered on them: partial (bounded optimism
//!   reinjection), adaptive (reward-window change detection), and selective
//!   (per-trajectory Bellman-gap corrections).
//!
//! The [`run`] module orchestrates seeded trials, writes CSV traces and
//! summaries, and [`plot`] renders cumulative-reward curves as SVG.
//!
//! Index conventions: episodes are 1-based in every public API, matching
//! the `episode` column of emitted traces. Step, state, and action indices
//! are 0-based array positions; step `h` ranges over `0..H` and value
//! tables carry an extra terminal row `V[H] = 0`.

pub mod agent;
pub mod config;
pub mod env;
pub mod mdp;
pub mod plot;
pub mod restart;
pub mod rng;
pub mod run;
