//! Two-lock corridor environment with a distracting sink.
//!
//! The state space is one initial state, two lock corridors of `H` cells
//! each, and an absorbing sink: `2H + 2` states. At step 1 the action
//! parity chooses a corridor; entering it and each in-corridor advance
//! succeed with probability `1 - fail_probability` and drop to the sink
//! otherwise, while a wrong corridor action drops to the sink for sure.
//! Walking a corridor correctly reaches its next-to-last cell at the final
//! step, where the correct action pays that lock's final reward (one lock
//! pays 0.25, the other 1.0 by default). The sink pays a small per-step
//! reward, so an agent that has given up still collects something. The
//! correct action per cell is drawn once from the seed and never changes.
//!
//! Non-stationarity comes in two modes. Abrupt: the two final rewards swap
//! every `swap_period` episodes, leaving transitions untouched. Gradual:
//! final rewards stay put while each initial-state action's corridor
//! preference drifts linearly from its episode-1 assignment to the mirrored
//! assignment at episode `M`, contributing a total transition variation of
//! `2 * (1 - fail_probability)`.

use std::sync::Arc;

use ndarray::{Array3, Array4};
use rand::Rng;

use crate::mdp::{MdpError, MdpSnapshot, NonStationaryMdp, ScheduleConstants};
use crate::rng::{substream, Purpose};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BdclMode {
    Abrupt,
    Gradual,
}

#[derive(Debug, Clone)]
pub struct BdclConfig {
    pub horizon: usize,
    pub num_actions: usize,
    pub num_episodes: usize,
    pub fail_probability: f64,
    pub mode: BdclMode,
    pub swap_period: usize,
    pub seed: u64,
    pub sink_reward: f64,
    pub lock_rewards: (f64, f64),
}

impl BdclConfig {
    /// Defaults from the benchmark protocol: the sink pays `0.1 / H` per
    /// step and the locks pay 0.25 and 1.0.
    pub fn new(horizon: usize, num_actions: usize, num_episodes: usize) -> Self {
        BdclConfig {
            horizon,
            num_actions,
            num_episodes,
            fail_probability: 0.02,
            mode: BdclMode::Abrupt,
            swap_period: 1001,
            seed: 0,
            sink_reward: 0.1 / horizon.max(1) as f64,
            lock_rewards: (0.25, 1.0),
        }
    }

    pub fn validate(&self) -> Result<(), MdpError> {
        if self.horizon < 2 {
            return Err(MdpError::Invalid(format!(
                "corridor environment needs H >= 2, got {}",
                self.horizon
            )));
        }
        if self.num_actions < 2 {
            return Err(MdpError::Invalid(format!(
                "corridor environment needs A >= 2, got {}",
                self.num_actions
            )));
        }
        if self.num_episodes == 0 {
            return Err(MdpError::Invalid("need at least one episode".into()));
        }
        if !(0.0..=1.0).contains(&self.fail_probability) {
            return Err(MdpError::Invalid(format!(
                "FAIL_PROBABILITY must lie in [0,1], got {}",
                self.fail_probability
            )));
        }
        if self.swap_period == 0 {
            return Err(MdpError::Invalid("SWAP_PERIOD must be at least 1".into()));
        }
        if self.sink_reward < 0.0 || self.sink_reward > 1.0 {
            return Err(MdpError::Invalid(format!(
                "SINK_REWARD must lie in [0,1], got {}",
                self.sink_reward
            )));
        }
        for r in [self.lock_rewards.0, self.lock_rewards.1] {
            if !(0.0..=1.0).contains(&r) {
                return Err(MdpError::Invalid(format!(
                    "lock rewards must lie in [0,1], got {r}"
                )));
            }
        }
        Ok(())
    }

    pub fn num_states(&self) -> usize {
        2 * self.horizon + 2
    }

    fn sink(&self) -> usize {
        2 * self.horizon + 1
    }

    /// State index of corridor cell `depth` (1-based) of `lock` (0 or 1).
    fn lock_cell(&self, lock: usize, depth: usize) -> usize {
        debug_assert!(lock < 2 && (1..=self.horizon).contains(&depth));
        lock * self.horizon + depth
    }

    /// This episode's final rewards per lock.
    fn lock_rewards_at(&self, episode: usize) -> (f64, f64) {
        match self.mode {
            BdclMode::Abrupt => {
                let phase = (episode - 1) / self.swap_period;
                if phase % 2 == 0 {
                    self.lock_rewards
                } else {
                    (self.lock_rewards.1, self.lock_rewards.0)
                }
            }
            BdclMode::Gradual => self.lock_rewards,
        }
    }

    /// Probability that action `a` at the initial state aims for lock 0.
    fn lock_preference(&self, episode: usize, a: usize) -> f64 {
        let start = if a % 2 == 0 { 1.0 } else { 0.0 };
        match self.mode {
            BdclMode::Abrupt => start,
            BdclMode::Gradual => {
                if self.num_episodes == 1 {
                    start
                } else {
                    let t = (episode - 1) as f64 / (self.num_episodes - 1) as f64;
                    start + t * (1.0 - 2.0 * start)
                }
            }
        }
    }
}

/// The corridor environment. Correct actions are drawn from the seed at
/// construction; snapshots are assembled per episode and the last two are
/// cached.
pub struct BdclEnv {
    config: BdclConfig,
    schedule: ScheduleConstants,
    correct: Vec<Vec<usize>>,
    cache: Vec<(usize, Arc<MdpSnapshot>)>,
}

impl BdclEnv {
    pub fn new(config: BdclConfig) -> Result<Self, MdpError> {
        config.validate()?;
        let schedule = ScheduleConstants::new(
            config.num_states(),
            config.num_actions,
            config.horizon,
            config.num_episodes,
        )?;
        let mut rng = substream(config.seed, Purpose::EnvStructure);
        let correct = (0..2)
            .map(|_| {
                (0..config.horizon)
                    .map(|_| rng.random_range(0..config.num_actions))
                    .collect()
            })
            .collect();
        Ok(BdclEnv { config, schedule, correct, cache: Vec::with_capacity(2) })
    }

    pub fn config(&self) -> &BdclConfig {
        &self.config
    }

    /// Seed-drawn correct action for corridor cell `depth` (1-based) of `lock`.
    pub fn correct_action(&self, lock: usize, depth: usize) -> usize {
        self.correct[lock][depth - 1]
    }

    fn assemble(&self, episode: usize) -> MdpSnapshot {
        let cfg = &self.config;
        let (h_len, s_len, a_len) = (cfg.horizon, cfg.num_states(), cfg.num_actions);
        let sink = cfg.sink();
        let p = cfg.fail_probability;
        let (r_lock0, r_lock1) = cfg.lock_rewards_at(episode);

        let mut rewards = Array3::zeros((h_len, s_len, a_len));
        let mut transitions = Array4::zeros((h_len, s_len, a_len, s_len));
        for h in 0..h_len {
            for a in 0..a_len {
                rewards[[h, sink, a]] = cfg.sink_reward;
                transitions[[h, sink, a, sink]] = 1.0;

                if h == 0 {
                    let q = cfg.lock_preference(episode, a);
                    transitions[[h, 0, a, cfg.lock_cell(0, 1)]] = q * (1.0 - p);
                    transitions[[h, 0, a, cfg.lock_cell(1, 1)]] = (1.0 - q) * (1.0 - p);
                    transitions[[h, 0, a, sink]] += p;
                } else {
                    transitions[[h, 0, a, sink]] = 1.0;
                }

                for lock in 0..2 {
                    for depth in 1..=h_len {
                        let cell = cfg.lock_cell(lock, depth);
                        if a == self.correct[lock][depth - 1] && depth < h_len {
                            transitions[[h, cell, a, cfg.lock_cell(lock, depth + 1)]] = 1.0 - p;
                            transitions[[h, cell, a, sink]] = p;
                        } else {
                            transitions[[h, cell, a, sink]] = 1.0;
                        }
                    }
                }
            }
        }
        let final_depth = h_len - 1;
        rewards[[h_len - 1, cfg.lock_cell(0, final_depth), self.correct[0][final_depth - 1]]] =
            r_lock0;
        rewards[[h_len - 1, cfg.lock_cell(1, final_depth), self.correct[1][final_depth - 1]]] =
            r_lock1;

        MdpSnapshot { rewards, transitions }
    }
}

impl NonStationaryMdp for BdclEnv {
    fn schedule(&self) -> &ScheduleConstants {
        &self.schedule
    }

    fn initial_state(&self) -> usize {
        0
    }

    fn snapshot_at(&mut self, episode: usize) -> Arc<MdpSnapshot> {
        assert!(
            episode >= 1 && episode <= self.schedule.num_episodes,
            "episode {episode} out of 1..={}",
            self.schedule.num_episodes
        );
        if let Some((_, snap)) = self.cache.iter().find(|(m, _)| *m == episode) {
            return Arc::clone(snap);
        }
        let snap = Arc::new(self.assemble(episode));
        if self.cache.len() == 2 {
            let oldest = self
                .cache
                .iter()
                .enumerate()
                .min_by_key(|(_, (m, _))| *m)
                .map(|(i, _)| i)
                .unwrap();
            self.cache.remove(oldest);
        }
        self.cache.push((episode, Arc::clone(&snap)));
        snap
    }

    fn nominal_budgets(&self) -> (f64, f64) {
        let cfg = &self.config;
        match cfg.mode {
            BdclMode::Abrupt => {
                let boundaries = (cfg.num_episodes.saturating_sub(1)) / cfg.swap_period;
                let jump = (cfg.lock_rewards.1 - cfg.lock_rewards.0).abs();
                (jump * boundaries as f64, 0.0)
            }
            BdclMode::Gradual => {
                if cfg.num_episodes > 1 {
                    (0.0, 2.0 * (1.0 - cfg.fail_probability))
                } else {
                    (0.0, 0.0)
                }
            }
        }
    }
}

/// Closed-form optimal episode value for the corridor environment,
/// independent of the snapshot oracle. Walking a corridor survives
/// `H - 1` fallible transitions (entry plus `H - 2` advances) before the
/// final reward step; bailing out early trades the remaining corridor for
/// the sink's reward stream. The returned value maximizes over corridor
/// choice and bail-out points.
pub fn optimal_lock_value(env: &BdclEnv, episode: usize) -> f64 {
    let cfg = env.config();
    let h_len = cfg.horizon;
    let p = cfg.fail_probability;
    let sink_togo = |h: usize| (h_len - h) as f64 * cfg.sink_reward;
    let (r_lock0, r_lock1) = cfg.lock_rewards_at(episode);

    let corridor = |reward: f64| -> f64 {
        let mut value = reward;
        for h in (1..h_len - 1).rev() {
            let advance = (1.0 - p) * value + p * sink_togo(h + 1);
            value = advance.max(sink_togo(h + 1));
        }
        value
    };
    let c0 = corridor(r_lock0);
    let c1 = corridor(r_lock1);

    let mut best = f64::NEG_INFINITY;
    for a in 0..cfg.num_actions {
        let q = cfg.lock_preference(episode, a);
        let v = (1.0 - p) * (q * c0 + (1.0 - q) * c1) + p * sink_togo(1);
        if v > best {
            best = v;
        }
    }
    best
}
