//! Reward-window change detector for restart timing.
//!
//! The monitor first learns a window length `W`: stage updates in the base
//! learner are classified by whether the greedy action changed, and once
//! `H^2` unchanged updates accumulate before `H^2` changed ones, the
//! episodes elapsed since the counters were last reset become `W` (a proxy
//! for how long learning takes). After each episode it compares the sum of
//! the last `W` episode rewards (`r_C`) against the first `W` of this phase
//! (`r_L`, the cost of learning) and the best sustained window level
//! (`r_B`). Restarting is predicted to pay off when the current window
//! sits closer to the learning level than to the best level
//! (`2 r_C < r_L + r_B`) and at least one window of steps remains to
//! amortize the relearning cost.
//!
//! Three details keep noise and ordinary learning from triggering it. The
//! payback model linearly extrapolated over all remaining windows
//! (`r_C * X < r_L + r_B * (X - 1)` with `X` windows left) fires on any
//! single noisy window once `X` is large, so the horizon-independent
//! midpoint form replaces it (the two agree at `X = 2`). `r_B` ratchets
//! over the minimum of the last `W` window sums rather than the raw
//! maximum, so a level only counts as the best once it has been held for a
//! full window; a lucky streak during learning does not arm the detector,
//! a reached plateau does. And no restart fires within `W` episodes of the
//! last changed-argmax update: while the greedy policy is still moving,
//! reward shifts are attributed to learning rather than to the
//! environment.
//!
//! All episode indices are phase-local: the caller reconstructs the monitor
//! (and the learner) when a restart fires.

/// How `W` behaves after it is first learned.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindowPolicy {
    /// Keep the first learned `W` for the rest of the phase.
    FreezeFirst,
    /// Rewrite `W` on every saturated unchanged-count, so the window keeps
    /// tracking the episodes since the counters' last reset.
    Track,
}

#[derive(Debug, Clone)]
pub struct AdaptiveMonitor {
    horizon: usize,
    threshold: u64,
    policy: WindowPolicy,
    true_count: u64,
    non_count: u64,
    last_reset: usize,
    last_changed: usize,
    window: usize,
    episodes: usize,
    prefix: Vec<f64>,
    recent: std::collections::VecDeque<f64>,
    best: f64,
}

impl AdaptiveMonitor {
    pub fn new(horizon: usize, policy: WindowPolicy) -> Self {
        AdaptiveMonitor {
            horizon,
            threshold: (horizon * horizon) as u64,
            policy,
            true_count: 0,
            non_count: 0,
            last_reset: 0,
            last_changed: 0,
            window: 0,
            episodes: 0,
            prefix: vec![0.0],
            recent: std::collections::VecDeque::new(),
            best: 0.0,
        }
    }

    /// The learned window length, 0 while still unknown.
    pub fn window(&self) -> usize {
        self.window
    }

    /// Classify one stage update from the base learner. Must be called
    /// during the episode whose end_of_episode has not yet run.
    pub fn record_update_event(&mut self, argmax_changed: bool) {
        let current_episode = self.episodes + 1;
        if argmax_changed {
            self.true_count += 1;
            self.last_changed = current_episode;
        } else {
            self.non_count += 1;
        }
        if self.true_count >= self.threshold {
            self.true_count = 0;
            self.non_count = 0;
            self.last_reset = current_episode;
        }
        if self.non_count >= self.threshold {
            let span = current_episode.saturating_sub(self.last_reset);
            if span > 0 {
                match self.policy {
                    WindowPolicy::FreezeFirst => {
                        if self.window == 0 {
                            self.window = span;
                        }
                    }
                    WindowPolicy::Track => self.window = span,
                }
            }
        }
    }

    /// Record the episode's total reward and decide whether to restart.
    /// `remaining_steps` counts environment steps still to run after this
    /// episode.
    pub fn end_of_episode(&mut self, episode_reward: f64, remaining_steps: u64) -> bool {
        self.episodes += 1;
        let total = self.prefix[self.episodes - 1] + episode_reward;
        self.prefix.push(total);
        if self.window == 0 || self.episodes < self.window {
            return false;
        }
        let w = self.window;
        let r_learn = self.prefix[w];
        let r_current = self.prefix[self.episodes] - self.prefix[self.episodes - w];
        self.recent.push_back(r_current);
        while self.recent.len() > w {
            self.recent.pop_front();
        }
        let sustained = self.recent.iter().cloned().fold(f64::INFINITY, f64::min);
        self.best = self.best.max(sustained);
        let x = remaining_steps as f64 / (self.horizon * w) as f64;
        if x < 1.0 {
            return false;
        }
        if self.episodes.saturating_sub(self.last_changed) < w {
            return false;
        }
        2.0 * r_current < r_learn + self.best
    }
}
