//! Reference policies the learners are compared against.

use std::sync::Arc;

use ndarray::Array2;
use rand::Rng;
use rand_chacha::ChaCha12Rng;

use crate::agent::{Agent, PolicyView, StageEvent};
use crate::rng::{substream, Purpose};

/// Uniform-random action at every step.
pub struct RandomAgent {
    a_len: usize,
    rng: ChaCha12Rng,
}

impl RandomAgent {
    pub fn new(a_len: usize, seed: u64) -> Self {
        RandomAgent { a_len, rng: substream(seed, Purpose::AgentDraw) }
    }
}

impl Agent for RandomAgent {
    fn begin_episode(&mut self, _episode: usize) {}

    fn act(&mut self, _h: usize, _s: usize) -> usize {
        self.rng.random_range(0..self.a_len)
    }

    fn observe(
        &mut self,
        _h: usize,
        _s: usize,
        _a: usize,
        _reward: f64,
        _s_next: usize,
    ) -> Option<StageEvent> {
        None
    }

    fn policy_view(&self) -> PolicyView {
        PolicyView::Uniform
    }
}

/// Plays each episode's precomputed optimal policy.
pub struct OptimalAgent {
    policies: Arc<Vec<Arc<Array2<usize>>>>,
    current: Arc<Array2<usize>>,
}

impl OptimalAgent {
    /// `policies[m - 1]` is episode `m`'s greedy table indexed `[h][s]`.
    pub fn new(policies: Arc<Vec<Arc<Array2<usize>>>>) -> Self {
        assert!(!policies.is_empty(), "need at least one episode policy");
        let current = Arc::clone(&policies[0]);
        OptimalAgent { policies, current }
    }
}

impl Agent for OptimalAgent {
    fn begin_episode(&mut self, episode: usize) {
        self.current = Arc::clone(&self.policies[episode - 1]);
    }

    fn act(&mut self, h: usize, s: usize) -> usize {
        self.current[[h, s]]
    }

    fn observe(
        &mut self,
        _h: usize,
        _s: usize,
        _a: usize,
        _reward: f64,
        _s_next: usize,
    ) -> Option<StageEvent> {
        None
    }

    fn policy_view(&self) -> PolicyView {
        PolicyView::Oracle
    }
}
