//! Learners and baseline policies.
//!
//! Every learner implements [`Agent`]: the trial driver calls
//! `begin_episode`, then alternates `act` and `observe` over the episode's
//! steps. `observe` reports a [`StageEvent`] when it concluded a visit
//! stage, which restart monitors consume. [`PolicyView`] tells the driver
//! how to score the policy the agent is about to play when exact regret is
//! requested.
//!
//! Learners that expose their tables to the trajectory-scoped restart
//! wrapper also implement [`TabularBase`].

pub mod baselines;
pub mod randomizedq;
pub mod restartq;

pub use baselines::{OptimalAgent, RandomAgent};
pub use randomizedq::{EnsembleConfig, EnsembleQ};
pub use restartq::{auto_epochs, LearningStages, RestartQ};

use ndarray::Array2;

/// Emitted by `observe` when a visit stage concluded and the Q row was
/// rewritten.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StageEvent {
    /// Whether the row's greedy action changed across the update.
    pub argmax_changed: bool,
}

/// The policy an agent will follow for the coming episode, in a form the
/// driver can evaluate exactly against the episode's snapshot.
#[derive(Debug, Clone)]
pub enum PolicyView {
    /// Deterministic policy table indexed `[h][s]`.
    Greedy(Array2<usize>),
    /// Uniform-random over actions at every step.
    Uniform,
    /// The episode's optimal policy; its value is the oracle value.
    Oracle,
}

/// A learner interacting with one episode at a time.
pub trait Agent {
    /// Called before each episode with its 1-based index.
    fn begin_episode(&mut self, episode: usize);

    /// Action at step `h` in state `s`.
    fn act(&mut self, h: usize, s: usize) -> usize;

    /// Feed back one transition. Returns a [`StageEvent`] when a stage
    /// update fired.
    fn observe(
        &mut self,
        h: usize,
        s: usize,
        a: usize,
        reward: f64,
        s_next: usize,
    ) -> Option<StageEvent>;

    /// The policy the agent would play this episode, captured right after
    /// `begin_episode`.
    fn policy_view(&self) -> PolicyView;
}

/// Table access used by the trajectory-scoped restart wrapper.
pub trait TabularBase: Agent {
    /// `(H, S, A)`.
    fn dims(&self) -> (usize, usize, usize);

    /// State value at step `h` (0-based; `h = H` is terminal and returns 0).
    fn value(&self, h: usize, s: usize) -> f64;

    /// The Q row the wrapper scales its updates by.
    fn q_row(&self, h: usize, s: usize) -> Vec<f64>;

    /// Additive Q adjustment at one cell, clamped to `[0, H - h]`, with the
    /// learner's own value refresh.
    fn add_q(&mut self, h: usize, s: usize, a: usize, delta: f64);

    /// Zero the visit statistics of one cell.
    fn reset_stats_at(&mut self, h: usize, s: usize, a: usize);
}

/// Index of the row maximum, lowest index on ties.
pub(crate) fn argmax(row: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in row.iter().enumerate().skip(1) {
        if x > row[best] {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::argmax;

    #[test]
    fn argmax_prefers_lowest_index_on_ties() {
        assert_eq!(argmax(&[1.0, 1.0, 1.0]), 0);
        assert_eq!(argmax(&[0.1, 0.9, 0.9]), 1);
        assert_eq!(argmax(&[0.5]), 0);
    }
}
