//! Restart paradigms layered on the learners.
//!
//! Three mechanisms live here. `partial` computes the episode-to-episode
//! optimal-Q drift bound and the tail estimates that feed it; the learner
//! applies the resulting [`BoundTable`] instead of resetting to the
//! optimistic maximum. `adaptive` watches per-episode rewards through a
//! learned window and decides when a restart is worth its relearning cost.
//! `selective` wraps an agile learner and nudges individual Q cells along
//! the experienced trajectory when a step's Bellman update jumps by more
//! than the bound.

pub mod adaptive;
pub mod partial;
pub mod selective;

pub use adaptive::{AdaptiveMonitor, WindowPolicy};
pub use partial::{fresh_tail, drift_bound, q_tail_max, BoundTable};
pub use selective::{SelectiveConfig, SelectiveWrapper};
