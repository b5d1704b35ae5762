//! Agile ensemble Q-learner.
//!
//! Keeps `J` optimistic Q tables that update at every step (no stage
//! gating) with learning rate `(H + 1) / (H + n)`, where `n` is the cell's
//! shared visit count plus a small prior. Each member mixes independent
//! zero-mean Gaussian noise of scale `kappa * H / sqrt(n)` into its target,
//! so members disagree early and converge together as counts grow. One
//! member is drawn per episode and acts greedily; this randomizes
//! exploration across episodes.

use ndarray::{Array2, Array3};
use rand::Rng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Normal};

use crate::agent::{argmax, Agent, PolicyView, StageEvent, TabularBase};
use crate::mdp::MdpError;
use crate::rng::{substream, Purpose};

#[derive(Debug, Clone)]
pub struct EnsembleConfig {
    /// Member count J.
    pub members: usize,
    /// Prior pseudo-count n0 added to the shared visit count.
    pub prior_count: f64,
    /// Noise inflation kappa; 0 disables noise and consumes no randomness.
    pub inflation: f64,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        EnsembleConfig { members: 20, prior_count: 0.25, inflation: 1.0 }
    }
}

impl EnsembleConfig {
    pub fn validate(&self) -> Result<(), MdpError> {
        if self.members == 0 {
            return Err(MdpError::Invalid("ENSEMBLES must be at least 1".into()));
        }
        if self.prior_count < 0.0 {
            return Err(MdpError::Invalid(format!(
                "N0 must be non-negative, got {}",
                self.prior_count
            )));
        }
        if self.inflation < 0.0 {
            return Err(MdpError::Invalid(format!(
                "KAPPA must be non-negative, got {}",
                self.inflation
            )));
        }
        Ok(())
    }
}

pub struct EnsembleQ {
    h_len: usize,
    s_len: usize,
    a_len: usize,
    config: EnsembleConfig,
    q: Vec<Array3<f64>>,
    n: Array3<u64>,
    active: usize,
    rng: ChaCha12Rng,
}

impl EnsembleQ {
    pub fn new(
        h_len: usize,
        s_len: usize,
        a_len: usize,
        config: EnsembleConfig,
        seed: u64,
    ) -> Result<Self, MdpError> {
        config.validate()?;
        let members = config.members;
        let mut learner = EnsembleQ {
            h_len,
            s_len,
            a_len,
            config,
            q: vec![Array3::zeros((h_len, s_len, a_len)); members],
            n: Array3::zeros((h_len, s_len, a_len)),
            active: 0,
            rng: substream(seed, Purpose::AgentDraw),
        };
        learner.reset();
        Ok(learner)
    }

    /// Reinitialize every member to the optimistic start and zero the
    /// shared counts. The action RNG is not rewound.
    pub fn reset(&mut self) {
        for member in &mut self.q {
            for h in 0..self.h_len {
                let init = (self.h_len - h) as f64;
                for s in 0..self.s_len {
                    for a in 0..self.a_len {
                        member[[h, s, a]] = init;
                    }
                }
            }
        }
        self.n.fill(0);
        self.active = 0;
    }

    pub fn active_member(&self) -> usize {
        self.active
    }

    fn member_value(&self, j: usize, h: usize, s: usize) -> f64 {
        if h >= self.h_len {
            return 0.0;
        }
        let mut best = f64::NEG_INFINITY;
        for a in 0..self.a_len {
            best = best.max(self.q[j][[h, s, a]]);
        }
        best
    }
}

impl Agent for EnsembleQ {
    fn begin_episode(&mut self, _episode: usize) {
        if self.config.members > 1 {
            self.active = self.rng.random_range(0..self.config.members);
        }
    }

    fn act(&mut self, h: usize, s: usize) -> usize {
        let mut best = 0;
        for a in 1..self.a_len {
            if self.q[self.active][[h, s, a]] > self.q[self.active][[h, s, best]] {
                best = a;
            }
        }
        best
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
        self.n[[h, s, a]] += 1;
        let n = self.n[[h, s, a]] as f64 + self.config.prior_count;
        let rate = (self.h_len as f64 + 1.0) / (self.h_len as f64 + n);
        let cap = (self.h_len - h) as f64;
        let noise_scale = self.config.inflation * self.h_len as f64 / n.sqrt();
        let noise_dist = (self.config.inflation > 0.0)
            .then(|| Normal::new(0.0, noise_scale).expect("finite positive scale"));
        for j in 0..self.q.len() {
            let noise = noise_dist.map_or(0.0, |d| d.sample(&mut self.rng));
            let target = reward + noise + self.member_value(j, h + 1, s_next);
            let cell = &mut self.q[j][[h, s, a]];
            *cell = ((1.0 - rate) * *cell + rate * target).clamp(0.0, cap);
        }
        None
    }

    fn policy_view(&self) -> PolicyView {
        let mut table = Array2::zeros((self.h_len, self.s_len));
        for h in 0..self.h_len {
            for s in 0..self.s_len {
                table[[h, s]] = argmax(
                    &(0..self.a_len)
                        .map(|a| self.q[self.active][[h, s, a]])
                        .collect::<Vec<_>>(),
                );
            }
        }
        PolicyView::Greedy(table)
    }
}

impl TabularBase for EnsembleQ {
    fn dims(&self) -> (usize, usize, usize) {
        (self.h_len, self.s_len, self.a_len)
    }

    fn value(&self, h: usize, s: usize) -> f64 {
        if h >= self.h_len {
            return 0.0;
        }
        self.q_row(h, s).into_iter().fold(f64::NEG_INFINITY, f64::max)
    }

    fn q_row(&self, h: usize, s: usize) -> Vec<f64> {
        (0..self.a_len)
            .map(|a| {
                self.q.iter().map(|member| member[[h, s, a]]).sum::<f64>() / self.q.len() as f64
            })
            .collect()
    }

    fn add_q(&mut self, h: usize, s: usize, a: usize, delta: f64) {
        let cap = (self.h_len - h) as f64;
        for member in &mut self.q {
            member[[h, s, a]] = (member[[h, s, a]] + delta).clamp(0.0, cap);
        }
    }

    fn reset_stats_at(&mut self, h: usize, s: usize, a: usize) {
        self.n[[h, s, a]] = 0;
    }
}
