//! Optimistic stage-gated Q-learner with scheduled restarts.
//!
//! Q and V start at the per-step maximum `H - h` (0-based step index) and
//! only ever decrease within an epoch: a cell's Q is rewritten when its
//! visit count reaches a learning-stage mark, taking the minimum of the
//! stage's empirical estimate plus exploration bonus and the previous
//! value. Restarts reinitialize everything; a partial restart instead
//! raises each cell by a drift bound and keeps the table.

use ndarray::{Array2, Array3};

use crate::agent::{Agent, PolicyView, StageEvent, TabularBase};
use crate::mdp::MdpError;
use crate::restart::BoundTable;

/// Visit counts at which a cell's stage concludes: `e_1 = H` and
/// `e_{i+1} = max(floor(growth * e_i), e_i + 1)`, with `growth` defaulting
/// to `1 + 1/H`.
#[derive(Debug, Clone)]
pub struct LearningStages {
    member: Vec<bool>,
}

impl LearningStages {
    pub fn new(horizon: usize, growth: f64, max_visits: usize) -> Result<Self, MdpError> {
        if horizon == 0 {
            return Err(MdpError::Invalid("horizon must be at least 1".into()));
        }
        if !(growth > 1.0) {
            return Err(MdpError::Invalid(format!(
                "stage growth must exceed 1, got {growth}"
            )));
        }
        let mut member = vec![false; max_visits + 1];
        let mut e = horizon;
        while e <= max_visits {
            member[e] = true;
            e = ((growth * e as f64 + 1e-9).floor() as usize).max(e + 1);
        }
        Ok(LearningStages { member })
    }

    pub fn with_default_growth(horizon: usize, max_visits: usize) -> Result<Self, MdpError> {
        Self::new(horizon, 1.0 + 1.0 / horizon as f64, max_visits)
    }

    pub fn contains(&self, n: u64) -> bool {
        (n as usize) < self.member.len() && self.member[n as usize]
    }

    /// Stage marks in increasing order.
    pub fn marks(&self) -> Vec<usize> {
        self.member
            .iter()
            .enumerate()
            .filter_map(|(n, &m)| m.then_some(n))
            .collect()
    }
}

/// Epoch count from the schedule shape and total variation
/// `delta = delta_r + delta_p`:
/// `D = round(S^{-1/3} A^{-1/3} delta^{2/3} H^{-2/3} T^{1/3})`, at least 1
/// and at most the number of episodes.
pub fn auto_epochs(
    s_len: usize,
    a_len: usize,
    horizon: usize,
    total_steps: usize,
    delta_r: f64,
    delta_p: f64,
) -> usize {
    let delta = delta_r + delta_p;
    let episodes = (total_steps / horizon).max(1);
    if delta <= 0.0 {
        return 1;
    }
    let d = (s_len as f64).powf(-1.0 / 3.0)
        * (a_len as f64).powf(-1.0 / 3.0)
        * delta.powf(2.0 / 3.0)
        * (horizon as f64).powf(-2.0 / 3.0)
        * (total_steps as f64).powf(1.0 / 3.0);
    (d.round() as usize).clamp(1, episodes)
}

/// The stage-gated optimistic learner.
pub struct RestartQ {
    h_len: usize,
    s_len: usize,
    a_len: usize,
    iota: f64,
    b_delta: f64,
    q: Array3<f64>,
    v: Array2<f64>,
    n: Array3<u64>,
    n_check: Array3<u64>,
    r_check: Array3<f64>,
    v_check: Array3<f64>,
    stages: LearningStages,
}

impl RestartQ {
    /// `max_visits` caps the stage table (a cell is visited at most once
    /// per episode, so the episode count suffices). `b_delta` is the
    /// per-epoch drift bonus, 0 when disabled.
    pub fn new(
        h_len: usize,
        s_len: usize,
        a_len: usize,
        max_visits: usize,
        delta: f64,
        b_delta: f64,
        stage_growth: Option<f64>,
    ) -> Result<Self, MdpError> {
        if !(delta > 0.0 && delta <= 2.0) {
            return Err(MdpError::Invalid(format!(
                "DELTA must lie in (0, 2], got {delta}"
            )));
        }
        if b_delta < 0.0 {
            return Err(MdpError::Invalid(format!(
                "drift bonus must be non-negative, got {b_delta}"
            )));
        }
        let growth = stage_growth.unwrap_or(1.0 + 1.0 / h_len as f64);
        let stages = LearningStages::new(h_len, growth, max_visits)?;
        let mut learner = RestartQ {
            h_len,
            s_len,
            a_len,
            iota: (2.0 / delta).ln().max(0.0),
            b_delta,
            q: Array3::zeros((h_len, s_len, a_len)),
            v: Array2::zeros((h_len + 1, s_len)),
            n: Array3::zeros((h_len, s_len, a_len)),
            n_check: Array3::zeros((h_len, s_len, a_len)),
            r_check: Array3::zeros((h_len, s_len, a_len)),
            v_check: Array3::zeros((h_len, s_len, a_len)),
            stages,
        };
        learner.restart_full();
        Ok(learner)
    }

    /// Reinitialize the table and every counter to the optimistic start.
    pub fn restart_full(&mut self) {
        for h in 0..self.h_len {
            let init = (self.h_len - h) as f64;
            for s in 0..self.s_len {
                self.v[[h, s]] = init;
                for a in 0..self.a_len {
                    self.q[[h, s, a]] = init;
                }
            }
        }
        for s in 0..self.s_len {
            self.v[[self.h_len, s]] = 0.0;
        }
        self.n.fill(0);
        self.n_check.fill(0);
        self.r_check.fill(0.0);
        self.v_check.fill(0.0);
    }

    /// Raise every Q cell by the drift bound (capped at the optimistic
    /// maximum), refresh V, and reset the counters as a full restart would.
    pub fn partial_restart(&mut self, beta: &BoundTable) {
        assert_eq!(beta.shape(), (self.h_len, self.s_len, self.a_len));
        for h in 0..self.h_len {
            let cap = (self.h_len - h) as f64;
            for s in 0..self.s_len {
                for a in 0..self.a_len {
                    let raised = self.q[[h, s, a]] + beta.get(h, s, a);
                    self.q[[h, s, a]] = raised.min(cap);
                }
                self.refresh_value(h, s);
            }
        }
        self.n.fill(0);
        self.n_check.fill(0);
        self.r_check.fill(0.0);
        self.v_check.fill(0.0);
    }

    pub fn q_table(&self) -> &Array3<f64> {
        &self.q
    }

    fn refresh_value(&mut self, h: usize, s: usize) {
        let mut best = f64::NEG_INFINITY;
        for a in 0..self.a_len {
            best = best.max(self.q[[h, s, a]]);
        }
        self.v[[h, s]] = best;
    }

    fn row_argmax(&self, h: usize, s: usize) -> usize {
        let mut best = 0;
        for a in 1..self.a_len {
            if self.q[[h, s, a]] > self.q[[h, s, best]] {
                best = a;
            }
        }
        best
    }
}

impl Agent for RestartQ {
    fn begin_episode(&mut self, _episode: usize) {}

    fn act(&mut self, h: usize, s: usize) -> usize {
        self.row_argmax(h, s)
    }

    fn observe(
        &mut self,
        h: usize,
        s: usize,
        a: usize,
        reward: f64,
        s_next: usize,
    ) -> Option<StageEvent> {
        assert!(
            (0.0..=1.0).contains(&reward),
            "reward {reward} outside [0, 1]"
        );
        self.r_check[[h, s, a]] += reward;
        self.v_check[[h, s, a]] += self.v[[h + 1, s_next]];
        self.n[[h, s, a]] += 1;
        self.n_check[[h, s, a]] += 1;
        if !self.stages.contains(self.n[[h, s, a]]) {
            return None;
        }
        let stage_n = self.n_check[[h, s, a]] as f64;
        let bonus = (self.h_len as f64 * self.h_len as f64 * self.iota / stage_n).sqrt()
            + (self.iota / stage_n).sqrt();
        let estimate = self.r_check[[h, s, a]] / stage_n
            + self.v_check[[h, s, a]] / stage_n
            + bonus
            + 2.0 * self.b_delta;
        let before = self.row_argmax(h, s);
        self.q[[h, s, a]] = estimate.min(self.q[[h, s, a]]);
        self.refresh_value(h, s);
        let after = self.row_argmax(h, s);
        self.n_check[[h, s, a]] = 0;
        self.r_check[[h, s, a]] = 0.0;
        self.v_check[[h, s, a]] = 0.0;
        Some(StageEvent { argmax_changed: before != after })
    }

    fn policy_view(&self) -> PolicyView {
        let mut table = Array2::zeros((self.h_len, self.s_len));
        for h in 0..self.h_len {
            for s in 0..self.s_len {
                table[[h, s]] = self.row_argmax(h, s);
            }
        }
        PolicyView::Greedy(table)
    }
}

impl TabularBase for RestartQ {
    fn dims(&self) -> (usize, usize, usize) {
        (self.h_len, self.s_len, self.a_len)
    }

    fn value(&self, h: usize, s: usize) -> f64 {
        self.v[[h, s]]
    }

    fn q_row(&self, h: usize, s: usize) -> Vec<f64> {
        (0..self.a_len).map(|a| self.q[[h, s, a]]).collect()
    }

    fn add_q(&mut self, h: usize, s: usize, a: usize, delta: f64) {
        let cap = (self.h_len - h) as f64;
        self.q[[h, s, a]] = (self.q[[h, s, a]] + delta).clamp(0.0, cap);
        self.refresh_value(h, s);
    }

    fn reset_stats_at(&mut self, h: usize, s: usize, a: usize) {
        self.n[[h, s, a]] = 0;
        self.n_check[[h, s, a]] = 0;
        self.r_check[[h, s, a]] = 0.0;
        self.v_check[[h, s, a]] = 0.0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::restart::drift_bound;
    use approx::assert_abs_diff_eq;

    #[test]
    fn stage_marks_double_at_horizon_one() {
        let stages = LearningStages::with_default_growth(1, 40).unwrap();
        assert_eq!(stages.marks(), vec![1, 2, 4, 8, 16, 32]);
    }

    #[test]
    fn stage_marks_grow_slowly_at_horizon_five() {
        let stages = LearningStages::with_default_growth(5, 14).unwrap();
        assert_eq!(stages.marks(), vec![5, 6, 7, 8, 9, 10, 12, 14]);
        assert!(stages.contains(12));
        assert!(!stages.contains(11));
        assert!(!stages.contains(4));
        assert!(!stages.contains(100));
    }

    #[test]
    fn epoch_formula_matches_hand_evaluation() {
        assert_eq!(auto_epochs(5, 5, 5, 50_000, 5.0, 10.0), 26);
        assert_eq!(auto_epochs(5, 5, 5, 50_000, 0.0, 0.0), 1);
        assert_eq!(auto_epochs(2, 2, 1, 10, 1000.0, 1000.0), 10);
    }

    #[test]
    fn fresh_table_is_optimistic_and_acts_on_action_zero() {
        let learner = RestartQ::new(3, 2, 4, 100, 2.0, 0.0, None).unwrap();
        assert_eq!(learner.q[[0, 1, 3]], 3.0);
        assert_eq!(learner.q[[2, 0, 0]], 1.0);
        assert_eq!(learner.v[[3, 1]], 0.0);
        let mut learner = learner;
        assert_eq!(learner.act(0, 0), 0);
    }

    #[test]
    fn first_stage_update_at_horizon_one_is_the_mean_reward() {
        let mut learner = RestartQ::new(1, 1, 1, 100, 2.0, 0.0, None).unwrap();
        let event = learner.observe(0, 0, 0, 0.5, 0).expect("stage at n=1");
        assert!(!event.argmax_changed);
        assert_abs_diff_eq!(learner.q[[0, 0, 0]], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(learner.v[[0, 0]], 0.5, epsilon = 1e-15);
    }

    #[test]
    fn confidence_two_has_zero_bonus_and_smaller_delta_does_not() {
        let mut tight = RestartQ::new(1, 1, 1, 100, 2.0, 0.0, None).unwrap();
        tight.observe(0, 0, 0, 0.5, 0);
        assert_eq!(tight.q[[0, 0, 0]], 0.5);

        let mut loose = RestartQ::new(1, 1, 1, 100, 0.5, 0.0, None).unwrap();
        loose.observe(0, 0, 0, 0.5, 0);
        let iota = (2.0f64 / 0.5).ln();
        assert_abs_diff_eq!(
            loose.q[[0, 0, 0]],
            (0.5 + 2.0 * iota.sqrt()).min(1.0),
            epsilon = 1e-12
        );
    }

    #[test]
    fn update_keeps_the_minimum_with_previous_value() {
        let mut learner = RestartQ::new(1, 1, 2, 100, 2.0, 0.0, None).unwrap();
        learner.observe(0, 0, 0, 0.9, 0);
        assert_eq!(learner.q[[0, 0, 0]], 0.9);
        learner.observe(0, 0, 0, 1.0, 0);
        assert_eq!(
            learner.q[[0, 0, 0]],
            0.9,
            "a worse estimate later must not raise the cell"
        );
    }

    #[test]
    fn argmax_change_is_reported() {
        let mut learner = RestartQ::new(1, 1, 2, 100, 2.0, 0.0, None).unwrap();
        let ev = learner.observe(0, 0, 0, 0.1, 0).unwrap();
        assert!(ev.argmax_changed, "action 0 dropped below action 1");
        let ev = learner.observe(0, 0, 1, 0.9, 0).unwrap();
        assert!(!ev.argmax_changed, "action 1 stays greedy");
    }

    #[test]
    fn stage_accumulators_cover_the_gap_between_marks() {
        let mut learner = RestartQ::new(2, 1, 1, 100, 2.0, 0.0, None).unwrap();
        assert!(learner.observe(0, 0, 0, 0.5, 0).is_none(), "n=1 below first mark");
        assert_eq!(learner.n_check[[0, 0, 0]], 1);
        for n in 2..=4 {
            assert!(
                learner.observe(0, 0, 0, 0.5, 0).is_some(),
                "n={n} is a stage mark at H=2"
            );
            assert_eq!(learner.n_check[[0, 0, 0]], 0);
        }
        assert!(learner.observe(0, 0, 0, 0.5, 0).is_none(), "n=5 between marks");
        assert_eq!(learner.n_check[[0, 0, 0]], 1);
        assert!(learner.observe(0, 0, 0, 0.5, 0).is_some(), "n=6 is the next mark");
    }

    #[test]
    fn restart_reinitializes_everything() {
        let mut learner = RestartQ::new(2, 2, 2, 100, 2.0, 0.0, None).unwrap();
        for _ in 0..10 {
            learner.observe(0, 0, 0, 0.3, 1);
            learner.observe(1, 1, 1, 0.2, 0);
        }
        learner.restart_full();
        let fresh = RestartQ::new(2, 2, 2, 100, 2.0, 0.0, None).unwrap();
        assert_eq!(learner.q, fresh.q);
        assert_eq!(learner.v, fresh.v);
        assert_eq!(learner.n, fresh.n);
        assert_eq!(learner.n_check, fresh.n_check);
    }

    #[test]
    fn partial_restart_raises_by_beta_and_caps() {
        let mut learner = RestartQ::new(2, 1, 2, 100, 2.0, 0.0, None).unwrap();
        for _ in 0..2 {
            learner.observe(1, 0, 0, 0.1, 0);
            learner.observe(1, 0, 1, 0.2, 0);
        }
        assert_abs_diff_eq!(learner.q[[1, 0, 0]], 0.1, epsilon = 1e-15);
        let beta = drift_bound(0.25, 0.0, &[1.0, 0.0], 1, 2).unwrap();
        learner.partial_restart(&beta);
        assert_abs_diff_eq!(learner.q[[1, 0, 0]], 0.35, epsilon = 1e-15);
        assert_abs_diff_eq!(learner.q[[1, 0, 1]], 0.45, epsilon = 1e-15);
        assert_eq!(learner.q[[0, 0, 0]], 2.0, "already at cap stays at cap");
        assert_eq!(learner.n[[1, 0, 0]], 0);
        assert_abs_diff_eq!(learner.v[[1, 0]], 0.45, epsilon = 1e-15);
    }

    #[test]
    fn huge_beta_equals_full_restart_table() {
        let mut learner = RestartQ::new(3, 2, 2, 100, 2.0, 0.0, None).unwrap();
        for _ in 0..20 {
            learner.observe(0, 0, 0, 0.0, 1);
            learner.observe(2, 1, 1, 0.0, 0);
        }
        let beta = drift_bound(10.0, 0.0, &[2.0, 1.0, 0.0], 2, 2).unwrap();
        learner.partial_restart(&beta);
        let fresh = RestartQ::new(3, 2, 2, 100, 2.0, 0.0, None).unwrap();
        assert_eq!(learner.q, fresh.q);
        assert_eq!(learner.v, fresh.v);
    }

    #[test]
    fn rejects_bad_config() {
        assert!(RestartQ::new(2, 2, 2, 10, 0.0, 0.0, None).is_err());
        assert!(RestartQ::new(2, 2, 2, 10, 2.5, 0.0, None).is_err());
        assert!(RestartQ::new(2, 2, 2, 10, 2.0, -1.0, None).is_err());
        assert!(LearningStages::new(2, 1.0, 10).is_err());
    }
}
