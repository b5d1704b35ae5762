//! Bound on how far optimal Q-values can drift between two episodes.
//!
//! For episodes `k1 < k2` whose cumulative reward and transition variation
//! are `delta_r` and `delta_p`, every triple satisfies
//! `|Q*_{k2} - Q*_{k1}| <= delta_r + delta_p / 2 * tail`, where `tail`
//! bounds the optimal Q at later steps. A restart that raises each learned
//! Q-value by this bound restores optimism without discarding what the
//! table already knows. The tail is unknowable online, so callers estimate
//! it from the learner's own (optimistic) table via [`q_tail_max`].

use ndarray::Array3;

use crate::mdp::MdpError;

/// Per-cell additive bound `beta[h][s][a]`, indexed with 0-based steps.
#[derive(Debug, Clone)]
pub struct BoundTable {
    beta: Array3<f64>,
}

impl BoundTable {
    pub fn get(&self, h: usize, s: usize, a: usize) -> f64 {
        self.beta[[h, s, a]]
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        let d = self.beta.dim();
        (d.0, d.1, d.2)
    }

    /// A table of infinities: no gap ever reaches it, so wrappers keyed on
    /// it never fire.
    pub fn infinite(h_len: usize, s_len: usize, a_len: usize) -> Self {
        BoundTable { beta: Array3::from_elem((h_len, s_len, a_len), f64::INFINITY) }
    }
}

/// Builds the drift bound from the two budgets and a per-step tail
/// estimate: `beta[h][s][a] = delta_r + delta_p / 2 * q_tail_max[h]`.
/// `q_tail_max[h]` must upper-bound the optimal Q over steps after `h`
/// (0 at the final step, where no later step exists).
pub fn drift_bound(
    delta_r: f64,
    delta_p: f64,
    q_tail_max: &[f64],
    s_len: usize,
    a_len: usize,
) -> Result<BoundTable, MdpError> {
    if delta_r < 0.0 || delta_p < 0.0 {
        return Err(MdpError::Invalid(format!(
            "variation budgets must be non-negative, got ({delta_r}, {delta_p})"
        )));
    }
    let h_len = q_tail_max.len();
    let mut beta = Array3::zeros((h_len, s_len, a_len));
    for (h, &tail) in q_tail_max.iter().enumerate() {
        if tail < 0.0 {
            return Err(MdpError::Invalid(format!(
                "tail estimate at step {h} is negative: {tail}"
            )));
        }
        let b = delta_r + 0.5 * delta_p * tail;
        for s in 0..s_len {
            for a in 0..a_len {
                beta[[h, s, a]] = b;
            }
        }
    }
    Ok(BoundTable { beta })
}

/// Tail estimate from a learner's Q table: `out[h] = max over h' > h,
/// s, a of q[h'][s][a]`, and 0 at the final step. On an optimistic table
/// this over-estimates the optimal tail, which keeps the bound safe.
pub fn q_tail_max(q: &Array3<f64>) -> Vec<f64> {
    let h_len = q.dim().0;
    let mut out = vec![0.0; h_len];
    let mut running: f64 = 0.0;
    for h in (0..h_len).rev() {
        out[h] = running;
        let step_max = q
            .index_axis(ndarray::Axis(0), h)
            .iter()
            .fold(f64::NEG_INFINITY, |m, &x| m.max(x));
        running = running.max(step_max);
    }
    out
}

/// Tail estimate for a fresh optimistic table initialized to `H - h` at
/// 0-based step `h`: the tightest bound available before any learning.
pub fn fresh_tail(h_len: usize) -> Vec<f64> {
    (0..h_len)
        .map(|h| if h + 1 < h_len { (h_len - h - 1) as f64 } else { 0.0 })
        .collect()
}
