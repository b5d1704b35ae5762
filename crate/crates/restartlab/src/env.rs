//! Seeded non-stationary environment generators.

pub mod bdcl;
pub mod random_mdp;

pub use bdcl::{optimal_lock_value, BdclConfig, BdclEnv, BdclMode};
pub use random_mdp::{
    generate_snapshot, per_episode_budgets, BudgetDistribution, RandomMdp, RandomMdpConfig,
};
