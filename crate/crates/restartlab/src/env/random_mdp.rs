//! Randomized drifting-MDP generator.
//!
//! Non-stationarity is produced by linear interpolation between randomly
//! drawn anchor tables, separately for the reward and transition channels.
//! Each channel holds a current table and a target table and an
//! interpolation position `alpha in [0, 1)`. Episode `m`'s allocation from
//! the per-episode budget profile advances `alpha` by `budget / needed`,
//! where `needed` is the variation between current and target; when `alpha`
//! reaches 1 the target is promoted to current, a fresh target is drawn,
//! and `alpha` resets to 0 (overshoot is discarded, so realized variation
//! never exceeds the configured totals).
//!
//! The budget profile spreads each channel's total over
//! `round(M * (1 - abruptness))` budget-carrying episodes, either evenly or
//! as a linear ramp from 0 to twice the average, then shuffles positions
//! with a seed-derived permutation. All randomness comes from ChaCha12
//! substreams of `mdp_seed`, one stream per drawn table, so any episode's
//! snapshot is reproducible from the config alone.

use std::sync::Arc;

use ndarray::{Array3, Array4};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha12Rng;

use crate::mdp::{MdpError, MdpSnapshot, NonStationaryMdp, ScheduleConstants};
use crate::rng::{numbered_substream, substream, Purpose};

/// How a channel's total budget is spread over its budget-carrying episodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BudgetDistribution {
    Uniform,
    Linear,
}

#[derive(Debug, Clone)]
pub struct RandomMdpConfig {
    pub num_states: usize,
    pub num_actions: usize,
    pub horizon: usize,
    pub num_episodes: usize,
    pub mdp_seed: u64,
    pub total_delta_r: f64,
    pub total_delta_p: f64,
    pub delta_r_abruptness: f64,
    pub delta_p_abruptness: f64,
    pub delta_r_distribution: BudgetDistribution,
    pub delta_p_distribution: BudgetDistribution,
    pub fail_probability: f64,
    pub reward_sparsity: f64,
}

impl RandomMdpConfig {
    pub fn validate(&self) -> Result<(), MdpError> {
        ScheduleConstants::new(
            self.num_states,
            self.num_actions,
            self.horizon,
            self.num_episodes,
        )?;
        for (name, v) in [
            ("TOTAL_DELTA_R", self.total_delta_r),
            ("TOTAL_DELTA_P", self.total_delta_p),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(MdpError::Invalid(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        for (name, v) in [
            ("DELTA_R_ABRUPTNESS", self.delta_r_abruptness),
            ("DELTA_P_ABRUPTNESS", self.delta_p_abruptness),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(MdpError::Invalid(format!("{name} must lie in [0,1], got {v}")));
            }
        }
        if self.delta_r_abruptness == 1.0 && self.total_delta_r > 0.0 {
            return Err(MdpError::Invalid(
                "DELTA_R_ABRUPTNESS = 1 leaves no episode to carry a positive budget".into(),
            ));
        }
        if self.delta_p_abruptness == 1.0 && self.total_delta_p > 0.0 {
            return Err(MdpError::Invalid(
                "DELTA_P_ABRUPTNESS = 1 leaves no episode to carry a positive budget".into(),
            ));
        }
        if self.num_states == 1 && self.total_delta_p > 0.0 {
            return Err(MdpError::Invalid(
                "a single-state space admits only one transition kernel; TOTAL_DELTA_P must be 0"
                    .into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.fail_probability) {
            return Err(MdpError::Invalid(format!(
                "FAIL_PROBABILITY must lie in [0,1], got {}",
                self.fail_probability
            )));
        }
        if !(0.0..=1.0).contains(&self.reward_sparsity) {
            return Err(MdpError::Invalid(format!(
                "REWARD_SPARSITY must lie in [0,1], got {}",
                self.reward_sparsity
            )));
        }
        Ok(())
    }
}

/// Per-episode budget profile for one channel: a length-`num_episodes`
/// vector summing to `total` (within float error), with
/// `round(M * (1 - abruptness))` budget-carrying entries (at least one)
/// placed by a seed-derived shuffle. Entry `m-1` funds the variation
/// between episodes `m` and `m+1`; the last entry is never consumed.
pub fn per_episode_budgets(
    total: f64,
    abruptness: f64,
    distribution: BudgetDistribution,
    num_episodes: usize,
    shuffle_rng: &mut ChaCha12Rng,
) -> Result<Vec<f64>, MdpError> {
    if total == 0.0 {
        return Ok(vec![0.0; num_episodes]);
    }
    if abruptness >= 1.0 {
        return Err(MdpError::Invalid(
            "abruptness = 1 leaves no episode to carry a positive budget".into(),
        ));
    }
    let carriers = (num_episodes as f64 * (1.0 - abruptness)).round() as usize;
    let carriers = carriers.clamp(1, num_episodes);
    let mut profile = vec![0.0; num_episodes];
    match distribution {
        BudgetDistribution::Uniform => {
            let each = total / carriers as f64;
            for slot in profile.iter_mut().take(carriers) {
                *slot = each;
            }
        }
        BudgetDistribution::Linear => {
            if carriers == 1 {
                profile[0] = total;
            } else {
                let avg = total / carriers as f64;
                for (i, slot) in profile.iter_mut().take(carriers).enumerate() {
                    *slot = 2.0 * avg * i as f64 / (carriers - 1) as f64;
                }
            }
        }
    }
    profile.shuffle(shuffle_rng);
    Ok(profile)
}

/// Which reward triples are designated low-reward for one drawn table:
/// exactly `floor(sparsity * H * S * A)` of them, chosen by the draw's own
/// stream. Returned in `(h, s, a)` row-major order.
fn low_reward_mask(
    h_len: usize,
    s_len: usize,
    a_len: usize,
    sparsity: f64,
    rng: &mut ChaCha12Rng,
) -> Vec<bool> {
    let cells = h_len * s_len * a_len;
    let low_count = (sparsity * cells as f64).floor() as usize;
    let mut order: Vec<usize> = (0..cells).collect();
    order.shuffle(rng);
    let mut mask = vec![false; cells];
    for &idx in order.iter().take(low_count) {
        mask[idx] = true;
    }
    mask
}

fn draw_rewards(config: &RandomMdpConfig, rng: &mut ChaCha12Rng) -> Array3<f64> {
    let (h_len, s_len, a_len) = (config.horizon, config.num_states, config.num_actions);
    let mask = low_reward_mask(h_len, s_len, a_len, config.reward_sparsity, rng);
    let mut rewards = Array3::zeros((h_len, s_len, a_len));
    let mut idx = 0;
    for h in 0..h_len {
        for s in 0..s_len {
            for a in 0..a_len {
                let scale = if mask[idx] { 0.2 } else { 1.0 };
                rewards[[h, s, a]] = rng.random::<f64>() * scale;
                idx += 1;
            }
        }
    }
    rewards
}

fn draw_transitions(config: &RandomMdpConfig, rng: &mut ChaCha12Rng) -> Array4<f64> {
    let (h_len, s_len, a_len) = (config.horizon, config.num_states, config.num_actions);
    let fail = config.fail_probability;
    let mut transitions = Array4::zeros((h_len, s_len, a_len, s_len));
    for h in 0..h_len {
        for s in 0..s_len {
            for a in 0..a_len {
                let tgt = rng.random_range(0..s_len);
                if s_len == 1 {
                    transitions[[h, s, a, 0]] = 1.0;
                } else {
                    let off = fail / (s_len - 1) as f64;
                    for s2 in 0..s_len {
                        transitions[[h, s, a, s2]] = if s2 == tgt { 1.0 - fail } else { off };
                    }
                }
            }
        }
    }
    transitions
}

/// One random snapshot: per `(h, s, a)` a uniformly drawn target state gets
/// probability `1 - fail_probability` and the rest share the remainder;
/// the designated low-reward fraction of triples draws from `[0, 0.2]` and
/// the rest from `[0, 1]`.
pub fn generate_snapshot(config: &RandomMdpConfig, rng: &mut ChaCha12Rng) -> MdpSnapshot {
    let rewards = draw_rewards(config, rng);
    let transitions = draw_transitions(config, rng);
    MdpSnapshot { rewards, transitions }
}

fn reward_variation(a: &Array3<f64>, b: &Array3<f64>) -> f64 {
    let (h_len, s_len, a_len) = a.dim();
    let mut total = 0.0;
    for h in 0..h_len {
        let mut sup: f64 = 0.0;
        for s in 0..s_len {
            for act in 0..a_len {
                sup = sup.max((a[[h, s, act]] - b[[h, s, act]]).abs());
            }
        }
        total += sup;
    }
    total
}

fn transition_variation(a: &Array4<f64>, b: &Array4<f64>) -> f64 {
    let (h_len, s_len, a_len, _) = a.dim();
    let mut total = 0.0;
    for h in 0..h_len {
        let mut sup: f64 = 0.0;
        for s in 0..s_len {
            for act in 0..a_len {
                let mut l1 = 0.0;
                for s2 in 0..s_len {
                    l1 += (a[[h, s, act, s2]] - b[[h, s, act, s2]]).abs();
                }
                sup = sup.max(l1);
            }
        }
        total += sup;
    }
    total
}

/// The drifting-MDP environment. Snapshots are materialized lazily in
/// episode order and the last two served episodes are cached; asking for an
/// earlier episode replays the deterministic generation from the start.
pub struct RandomMdp {
    config: RandomMdpConfig,
    schedule: ScheduleConstants,
    budget_r: Vec<f64>,
    budget_p: Vec<f64>,
    pos: usize,
    cur_r: Array3<f64>,
    tgt_r: Array3<f64>,
    cur_p: Array4<f64>,
    tgt_p: Array4<f64>,
    alpha_r: f64,
    alpha_p: f64,
    needed_r: f64,
    needed_p: f64,
    r_draws: u32,
    p_draws: u32,
    cycles_r: u64,
    cycles_p: u64,
    cache: Vec<(usize, Arc<MdpSnapshot>)>,
}

impl RandomMdp {
    pub fn new(config: RandomMdpConfig) -> Result<Self, MdpError> {
        config.validate()?;
        let schedule = ScheduleConstants::new(
            config.num_states,
            config.num_actions,
            config.horizon,
            config.num_episodes,
        )?;
        let budget_r = per_episode_budgets(
            config.total_delta_r,
            config.delta_r_abruptness,
            config.delta_r_distribution,
            config.num_episodes,
            &mut substream(config.mdp_seed, Purpose::BudgetShuffleR),
        )?;
        let budget_p = per_episode_budgets(
            config.total_delta_p,
            config.delta_p_abruptness,
            config.delta_p_distribution,
            config.num_episodes,
            &mut substream(config.mdp_seed, Purpose::BudgetShuffleP),
        )?;
        let mut env = RandomMdp {
            schedule,
            budget_r,
            budget_p,
            pos: 1,
            cur_r: Array3::zeros((0, 0, 0)),
            tgt_r: Array3::zeros((0, 0, 0)),
            cur_p: Array4::zeros((0, 0, 0, 0)),
            tgt_p: Array4::zeros((0, 0, 0, 0)),
            alpha_r: 0.0,
            alpha_p: 0.0,
            needed_r: 0.0,
            needed_p: 0.0,
            r_draws: 0,
            p_draws: 0,
            cycles_r: 0,
            cycles_p: 0,
            cache: Vec::with_capacity(2),
            config,
        };
        env.rewind();
        Ok(env)
    }

    /// Completed target promotions per channel so far.
    pub fn target_cycles(&self) -> (u64, u64) {
        (self.cycles_r, self.cycles_p)
    }

    fn next_reward_table(&mut self) -> Array3<f64> {
        let mut rng = numbered_substream(self.config.mdp_seed, Purpose::RewardDraw, self.r_draws);
        self.r_draws += 1;
        draw_rewards(&self.config, &mut rng)
    }

    fn next_transition_table(&mut self) -> Array4<f64> {
        let mut rng =
            numbered_substream(self.config.mdp_seed, Purpose::TransitionDraw, self.p_draws);
        self.p_draws += 1;
        draw_transitions(&self.config, &mut rng)
    }

    /// Draws a reward target distinct from `cur_r`; after 100 identical
    /// draws one entry is perturbed by 1e-6 to keep the journey nonzero.
    fn draw_reward_target(&mut self) {
        for _ in 0..100 {
            self.tgt_r = self.next_reward_table();
            self.needed_r = reward_variation(&self.cur_r, &self.tgt_r);
            if self.needed_r > 0.0 {
                return;
            }
        }
        let cell = [0, 0, 0];
        if self.tgt_r[cell] >= 0.5 {
            self.tgt_r[cell] -= 1e-6;
        } else {
            self.tgt_r[cell] += 1e-6;
        }
        self.needed_r = reward_variation(&self.cur_r, &self.tgt_r);
    }

    /// Draws a transition target distinct from `cur_p` where possible. A
    /// single-state space has only one kernel, but that case is rejected at
    /// config validation whenever the transition budget is positive.
    fn draw_transition_target(&mut self) {
        for _ in 0..100 {
            self.tgt_p = self.next_transition_table();
            self.needed_p = transition_variation(&self.cur_p, &self.tgt_p);
            if self.needed_p > 0.0 {
                return;
            }
        }
    }

    /// Resets generation to episode 1.
    fn rewind(&mut self) {
        self.r_draws = 0;
        self.p_draws = 0;
        self.cycles_r = 0;
        self.cycles_p = 0;
        self.cur_r = self.next_reward_table();
        self.cur_p = self.next_transition_table();
        self.draw_reward_target();
        self.draw_transition_target();
        self.alpha_r = 0.0;
        self.alpha_p = 0.0;
        self.pos = 1;
        self.cache.clear();
        let snap = self.assemble();
        self.cache.push((1, Arc::new(snap)));
    }

    /// Advances generation by one episode, consuming the current episode's
    /// budget entries.
    fn step_episode(&mut self) {
        let idx = self.pos - 1;
        let b_r = self.budget_r[idx];
        if b_r > 0.0 && self.needed_r > 0.0 {
            self.alpha_r += b_r / self.needed_r;
            if self.alpha_r >= 1.0 {
                self.cur_r = std::mem::replace(&mut self.tgt_r, Array3::zeros((0, 0, 0)));
                self.draw_reward_target();
                self.alpha_r = 0.0;
                self.cycles_r += 1;
            }
        }
        let b_p = self.budget_p[idx];
        if b_p > 0.0 && self.needed_p > 0.0 {
            self.alpha_p += b_p / self.needed_p;
            if self.alpha_p >= 1.0 {
                self.cur_p = std::mem::replace(&mut self.tgt_p, Array4::zeros((0, 0, 0, 0)));
                self.draw_transition_target();
                self.alpha_p = 0.0;
                self.cycles_p += 1;
            }
        }
        self.pos += 1;
    }

    fn assemble(&self) -> MdpSnapshot {
        let rewards = if self.alpha_r == 0.0 {
            self.cur_r.clone()
        } else {
            &self.cur_r * (1.0 - self.alpha_r) + &self.tgt_r * self.alpha_r
        };
        let transitions = if self.alpha_p == 0.0 {
            self.cur_p.clone()
        } else {
            &self.cur_p * (1.0 - self.alpha_p) + &self.tgt_p * self.alpha_p
        };
        MdpSnapshot { rewards, transitions }
    }
}

impl NonStationaryMdp for RandomMdp {
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
        if episode < self.pos {
            self.rewind();
            if episode == 1 {
                return Arc::clone(&self.cache[0].1);
            }
        }
        while self.pos < episode {
            self.step_episode();
        }
        let snap = Arc::new(self.assemble());
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
        (self.config.total_delta_r, self.config.total_delta_p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdp::variation_budgets;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn base_config() -> RandomMdpConfig {
        RandomMdpConfig {
            num_states: 3,
            num_actions: 2,
            horizon: 3,
            num_episodes: 40,
            mdp_seed: 11,
            total_delta_r: 1.5,
            total_delta_p: 2.0,
            delta_r_abruptness: 0.0,
            delta_p_abruptness: 0.0,
            delta_r_distribution: BudgetDistribution::Uniform,
            delta_p_distribution: BudgetDistribution::Uniform,
            fail_probability: 0.05,
            reward_sparsity: 0.8,
        }
    }

    #[test]
    fn uniform_profile_splits_total_over_carriers() {
        let mut rng = substream(1, Purpose::BudgetShuffleR);
        let mut profile = per_episode_budgets(10.0, 0.5, BudgetDistribution::Uniform, 4, &mut rng)
            .unwrap();
        profile.sort_by(|a, b| b.partial_cmp(a).unwrap());
        assert_eq!(profile, vec![5.0, 5.0, 0.0, 0.0]);
    }

    #[test]
    fn linear_profile_is_zero_to_twice_average() {
        let mut rng = substream(2, Purpose::BudgetShuffleR);
        let mut profile = per_episode_budgets(6.0, 0.0, BudgetDistribution::Linear, 3, &mut rng)
            .unwrap();
        profile.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(profile, vec![0.0, 2.0, 4.0]);
    }

    #[test]
    fn high_abruptness_concentrates_budget() {
        let mut rng = substream(3, Purpose::BudgetShuffleR);
        let profile =
            per_episode_budgets(5.0, 0.999, BudgetDistribution::Uniform, 10_000, &mut rng)
                .unwrap();
        let nonzero: Vec<f64> = profile.iter().copied().filter(|&x| x > 0.0).collect();
        assert_eq!(nonzero.len(), 10);
        for x in nonzero {
            assert_abs_diff_eq!(x, 0.5, epsilon = 1e-12);
        }
    }

    #[test]
    fn full_abruptness_with_budget_is_rejected() {
        let mut rng = substream(4, Purpose::BudgetShuffleR);
        assert!(
            per_episode_budgets(1.0, 1.0, BudgetDistribution::Uniform, 10, &mut rng).is_err()
        );
        let profile =
            per_episode_budgets(0.0, 1.0, BudgetDistribution::Uniform, 10, &mut rng).unwrap();
        assert_eq!(profile, vec![0.0; 10]);
    }

    #[test]
    fn snapshot_rows_put_mass_on_one_target() {
        let mut config = base_config();
        config.num_states = 5;
        config.num_actions = 5;
        config.horizon = 5;
        config.fail_probability = 0.05;
        let mut rng = numbered_substream(9, Purpose::RewardDraw, 0);
        let snap = generate_snapshot(&config, &mut rng);
        snap.validate().unwrap();
        for h in 0..5 {
            for s in 0..5 {
                for a in 0..5 {
                    let row: Vec<f64> =
                        (0..5).map(|s2| snap.transitions[[h, s, a, s2]]).collect();
                    let hi = row.iter().filter(|&&p| (p - 0.95).abs() < 1e-12).count();
                    let lo = row.iter().filter(|&&p| (p - 0.0125).abs() < 1e-12).count();
                    assert_eq!((hi, lo), (1, 4));
                }
            }
        }
    }

    #[test]
    fn zero_fail_probability_gives_deterministic_rows() {
        let mut config = base_config();
        config.fail_probability = 0.0;
        let mut rng = numbered_substream(10, Purpose::TransitionDraw, 0);
        let snap = generate_snapshot(&config, &mut rng);
        for h in 0..config.horizon {
            for s in 0..config.num_states {
                for a in 0..config.num_actions {
                    let ones = (0..config.num_states)
                        .filter(|&s2| snap.transitions[[h, s, a, s2]] == 1.0)
                        .count();
                    assert_eq!(ones, 1);
                }
            }
        }
    }

    #[test]
    fn designated_low_reward_census_is_exact() {
        let config = base_config();
        let cells = config.horizon * config.num_states * config.num_actions;
        let mut mask_rng = numbered_substream(21, Purpose::RewardDraw, 0);
        let mask = low_reward_mask(
            config.horizon,
            config.num_states,
            config.num_actions,
            config.reward_sparsity,
            &mut mask_rng,
        );
        let expected = (config.reward_sparsity * cells as f64).floor() as usize;
        assert_eq!(mask.iter().filter(|&&b| b).count(), expected);

        let mut rng = numbered_substream(21, Purpose::RewardDraw, 0);
        let rewards = draw_rewards(&config, &mut rng);
        let mut idx = 0;
        for h in 0..config.horizon {
            for s in 0..config.num_states {
                for a in 0..config.num_actions {
                    if mask[idx] {
                        assert!(rewards[[h, s, a]] <= 0.2);
                    }
                    idx += 1;
                }
            }
        }
    }

    #[test]
    fn zero_budgets_give_a_stationary_sequence() {
        let mut config = base_config();
        config.total_delta_r = 0.0;
        config.total_delta_p = 0.0;
        let mut env = RandomMdp::new(config).unwrap();
        let first = env.snapshot_at(1);
        for m in 2..=40 {
            let snap = env.snapshot_at(m);
            assert_eq!(*snap, *first);
        }
    }

    #[test]
    fn realized_budgets_never_exceed_configured_totals() {
        let mut config = base_config();
        config.num_states = 5;
        config.num_actions = 5;
        config.horizon = 5;
        config.num_episodes = 500;
        config.total_delta_r = 5.0;
        config.total_delta_p = 10.0;
        config.delta_r_abruptness = 0.999;
        config.delta_p_abruptness = 0.5;
        let mut env = RandomMdp::new(config).unwrap();
        let (dr, dp) = variation_budgets(&mut env);
        assert!(dr <= 5.0 + 1e-6, "delta_r {dr}");
        assert!(dp <= 10.0 + 1e-6, "delta_p {dp}");
        assert!(dr > 0.0);
        assert!(dp > 0.0);
    }

    #[test]
    fn exact_budget_promotes_to_target_in_one_step() {
        let mut probe_cfg = base_config();
        probe_cfg.num_episodes = 2;
        probe_cfg.total_delta_r = 1.0;
        probe_cfg.total_delta_p = 0.0;
        let probe = RandomMdp::new(probe_cfg.clone()).unwrap();
        let needed = probe.needed_r;
        let target = probe.tgt_r.clone();
        assert!(needed > 0.0);

        let mut cfg = probe_cfg;
        cfg.total_delta_r = 2.0 * needed;
        let mut env = RandomMdp::new(cfg).unwrap();
        let snap2 = env.snapshot_at(2);
        assert_eq!(snap2.rewards, target);
        assert_eq!(env.target_cycles().0, 1);
    }

    #[test]
    fn generation_is_deterministic_and_replays_backward_requests() {
        let mut a = RandomMdp::new(base_config()).unwrap();
        let mut b = RandomMdp::new(base_config()).unwrap();
        for m in 1..=40 {
            assert_eq!(*a.snapshot_at(m), *b.snapshot_at(m), "episode {m}");
        }
        let late = a.snapshot_at(40);
        let early = a.snapshot_at(3);
        assert_eq!(*early, *b.snapshot_at(3));
        assert_eq!(*late, *b.snapshot_at(40));
    }

    #[test]
    fn single_state_with_transition_budget_is_rejected() {
        let mut config = base_config();
        config.num_states = 1;
        config.total_delta_p = 1.0;
        assert!(RandomMdp::new(config).is_err());
        let mut ok = base_config();
        ok.num_states = 1;
        ok.total_delta_p = 0.0;
        let mut env = RandomMdp::new(ok).unwrap();
        env.snapshot_at(40).validate().unwrap();
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn profiles_conserve_totals(
            total in 0.0f64..20.0,
            abruptness in 0.0f64..0.9999,
            linear in proptest::bool::ANY,
            m in 1usize..400,
            seed in 0u64..1_000,
        ) {
            let dist = if linear { BudgetDistribution::Linear } else { BudgetDistribution::Uniform };
            let mut rng = substream(seed, Purpose::BudgetShuffleR);
            let profile = per_episode_budgets(total, abruptness, dist, m, &mut rng).unwrap();
            let sum: f64 = profile.iter().sum();
            prop_assert!((sum - total).abs() <= 1e-6);
            prop_assert!(profile.iter().all(|&x| x >= 0.0));
        }

        #[test]
        fn interpolated_snapshots_stay_valid(seed in 0u64..40) {
            let mut config = base_config();
            config.mdp_seed = seed;
            config.num_episodes = 30;
            let mut env = RandomMdp::new(config).unwrap();
            for m in 1..=30 {
                env.snapshot_at(m).validate().unwrap();
            }
        }
    }
}
