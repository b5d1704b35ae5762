//! Trajectory-scoped restarts around a tabular base learner.
//!
//! The wrapper watches the one-step target `U = r + V(h+1, s')` of each
//! visited cell. When a revisit moves that target by at least the cell's
//! drift bound since the previous visit, the move becomes a pending drift
//! candidate; it is confirmed on the cell's next visit only if the target
//! is still displaced by the bound from its pre-move level in the same
//! direction. Gradual learning progress arrives in small consecutive steps
//! and never produces a candidate; a stochastic transition that happens to
//! sample an unusual successor bounces back by the next visit and is
//! discarded; a real environment jump stays displaced and confirms. On
//! confirmation the wrapper traces the trajectory that led here through a
//! transition dictionary, nudges each cell on the path toward the new
//! target (split by the softmax weight of the action taken and the steps
//! remaining), and zeroes the triggering cell's visit statistics so the
//! base relearns it.
//!
//! The dictionary holds the most recent occurrence of each
//! `(h, s, a, s_next)` transition. A separate monotone visit count prunes a
//! cell's traced path from the dictionary whenever the count hits a
//! learning-stage mark, keeping stale trajectories from being blamed.

use std::collections::HashMap;

use ndarray::Array3;

use crate::agent::{Agent, LearningStages, PolicyView, StageEvent, TabularBase};
use crate::mdp::MdpError;
use crate::restart::BoundTable;

/// Wrapper knobs.
#[derive(Debug, Clone, Copy)]
pub struct SelectiveConfig {
    /// Softmax temperature for splitting a correction across the actions of
    /// a traced cell's row.
    pub temperature: f64,
}

impl Default for SelectiveConfig {
    fn default() -> Self {
        SelectiveConfig { temperature: 1.0 }
    }
}

impl SelectiveConfig {
    pub fn validate(&self) -> Result<(), MdpError> {
        if !(self.temperature > 0.0 && self.temperature.is_finite()) {
            return Err(MdpError::Invalid(format!(
                "SOFTMAX_TEMPERATURE must be positive and finite, got {}",
                self.temperature
            )));
        }
        Ok(())
    }
}

/// Softmax weight of `row[a]` at the given temperature.
fn softmax_weight(row: &[f64], a: usize, temperature: f64) -> f64 {
    let top = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let scaled: Vec<f64> = row.iter().map(|q| ((q - top) / temperature).exp()).collect();
    let total: f64 = scaled.iter().sum();
    scaled[a] / total
}

/// A base learner wrapped with trajectory-scoped restarts.
pub struct SelectiveWrapper<B: TabularBase> {
    base: B,
    dims: (usize, usize, usize),
    bounds: BoundTable,
    temperature: f64,
    /// Most recent stamp per observed transition quadruple.
    dict: HashMap<(usize, usize, usize, usize), u64>,
    next_stamp: u64,
    u_last: Array3<f64>,
    seen: Array3<bool>,
    /// Pre-move target level of a pending drift candidate, NAN when none.
    pending_base: Array3<f64>,
    pending_sign: Array3<i8>,
    /// Monotone visit counts driving the dictionary pruning; triggers never
    /// reset these.
    n: Array3<u64>,
    stages: LearningStages,
    triggers: u64,
}

impl<B: TabularBase> SelectiveWrapper<B> {
    /// `max_visits` caps the pruning-stage table; the episode count
    /// suffices since a cell is visited at most once per episode.
    pub fn new(
        base: B,
        bounds: BoundTable,
        max_visits: usize,
        config: SelectiveConfig,
    ) -> Result<Self, MdpError> {
        config.validate()?;
        let dims = base.dims();
        if bounds.shape() != dims {
            return Err(MdpError::Invalid(format!(
                "drift bound shape {:?} does not match learner dims {:?}",
                bounds.shape(),
                dims
            )));
        }
        let stages = LearningStages::with_default_growth(dims.0, max_visits)?;
        Ok(SelectiveWrapper {
            base,
            dims,
            bounds,
            temperature: config.temperature,
            dict: HashMap::new(),
            next_stamp: 1,
            u_last: Array3::zeros(dims),
            seen: Array3::from_elem(dims, false),
            pending_base: Array3::from_elem(dims, f64::NAN),
            pending_sign: Array3::zeros(dims),
            n: Array3::zeros(dims),
            stages,
            triggers: 0,
        })
    }

    pub fn base(&self) -> &B {
        &self.base
    }

    /// Number of transition quadruples currently tracked.
    pub fn tracked_transitions(&self) -> usize {
        self.dict.len()
    }

    /// Total drift triggers fired so far.
    pub fn triggers_fired(&self) -> u64 {
        self.triggers
    }

    /// The trajectory ending in the given transition: the current quadruple
    /// first, then for each earlier step the newest tracked transition whose
    /// successor matches the next cell's state, stopping at the first gap.
    fn trace(
        &self,
        h: usize,
        s: usize,
        a: usize,
        s_next: usize,
    ) -> Vec<(usize, usize, usize, usize)> {
        let mut chain = vec![(h, s, a, s_next)];
        if h == 0 {
            return chain;
        }
        let mut newest: HashMap<(usize, usize), (u64, usize, usize)> = HashMap::new();
        for (&(h2, s2, a2, succ), &stamp) in &self.dict {
            if h2 >= h {
                continue;
            }
            let slot = newest.entry((h2, succ)).or_insert((stamp, s2, a2));
            if stamp > slot.0 {
                *slot = (stamp, s2, a2);
            }
        }
        let mut want = s;
        for step in (0..h).rev() {
            match newest.get(&(step, want)) {
                Some(&(_, s2, a2)) => {
                    chain.push((step, s2, a2, want));
                    want = s2;
                }
                None => break,
            }
        }
        chain
    }

    fn apply_corrections(&mut self, chain: &[(usize, usize, usize, usize)], sign: f64) {
        let h_len = self.dims.0;
        for &(h2, s2, a2, _) in chain {
            if h2 + 1 == h_len {
                continue;
            }
            let steps_left = (h_len - 1 - h2) as f64;
            let row = self.base.q_row(h2, s2);
            let weight = softmax_weight(&row, a2, self.temperature);
            let delta = sign * weight * self.bounds.get(h2, s2, a2) / steps_left;
            self.base.add_q(h2, s2, a2, delta);
        }
    }
}

impl<B: TabularBase> Agent for SelectiveWrapper<B> {
    fn begin_episode(&mut self, episode: usize) {
        self.base.begin_episode(episode);
    }

    fn act(&mut self, h: usize, s: usize) -> usize {
        self.base.act(h, s)
    }

    fn observe(
        &mut self,
        h: usize,
        s: usize,
        a: usize,
        reward: f64,
        s_next: usize,
    ) -> Option<StageEvent> {
        let stamp = self.next_stamp;
        self.next_stamp += 1;
        self.dict.insert((h, s, a, s_next), stamp);

        let event = self.base.observe(h, s, a, reward, s_next);
        let u_now = reward + self.base.value(h + 1, s_next);

        if self.seen[[h, s, a]] {
            let bound = self.bounds.get(h, s, a);
            let base_level = self.pending_base[[h, s, a]];
            if base_level.is_nan() {
                let gap = u_now - self.u_last[[h, s, a]];
                if gap.abs() >= bound {
                    self.pending_base[[h, s, a]] = self.u_last[[h, s, a]];
                    self.pending_sign[[h, s, a]] = if gap > 0.0 {
                        1
                    } else if gap < 0.0 {
                        -1
                    } else {
                        0
                    };
                }
            } else {
                let disp = u_now - base_level;
                let sign = if disp > 0.0 {
                    1
                } else if disp < 0.0 {
                    -1
                } else {
                    0
                };
                if disp.abs() >= bound && sign == self.pending_sign[[h, s, a]] {
                    if std::env::var_os("SELECTIVE_DEBUG").is_some() {
                        eprintln!(
                            "TRIG h={h} s={s} a={a} disp={disp:.3} bound={bound:.3} u_now={u_now:.3}"
                        );
                    }
                    self.triggers += 1;
                    if sign != 0 {
                        let chain = self.trace(h, s, a, s_next);
                        self.apply_corrections(&chain, sign as f64);
                    }
                    self.base.reset_stats_at(h, s, a);
                }
                self.pending_base[[h, s, a]] = f64::NAN;
            }
        } else {
            self.seen[[h, s, a]] = true;
        }
        self.u_last[[h, s, a]] = u_now;

        self.n[[h, s, a]] += 1;
        if self.stages.contains(self.n[[h, s, a]]) {
            for key in self.trace(h, s, a, s_next) {
                self.dict.remove(&key);
            }
        }
        event
    }

    fn policy_view(&self) -> PolicyView {
        self.base.policy_view()
    }
}
