//! Acceptance gates for the whole lab: one test per criterion, each
//! printing a single PASS/FAIL line (run with `--nocapture` to see them
//! on success). The corridor simulations are shared across criteria
//! through a lazily initialized static.

use std::sync::OnceLock;
use std::time::Instant;

use sha2::{Digest, Sha256};

use restartlab::agent::{Agent, EnsembleConfig, EnsembleQ, TabularBase};
use restartlab::config::parse_experiment;
use restartlab::env::{BdclConfig, BdclEnv, BudgetDistribution, RandomMdp, RandomMdpConfig};
use restartlab::mdp::test_fixtures::random_snapshot;
use restartlab::mdp::{
    enumerate_optimal_values, optimal_values, snapshot_variation, variation_budgets,
    ExperimentTrace, MdpSnapshot, NonStationaryMdp,
};
use restartlab::restart::{drift_bound, fresh_tail, BoundTable, SelectiveConfig, SelectiveWrapper};
use restartlab::rng::{substream, Purpose};
use restartlab::run::{run_experiment, summary_to_csv, trace_to_csv, SummaryRow};

/// Small-instance shapes cycle through every (H, S, A) in [1,3]^3.
fn dims_for(i: usize) -> (usize, usize, usize) {
    (1 + i % 3, 1 + (i / 3) % 3, 1 + (i / 9) % 3)
}

/// Convex blend of two snapshots; keeps rows stochastic and rewards in
/// range, and produces small variation for tight-bound cases.
fn blend(a: &MdpSnapshot, b: &MdpSnapshot, t: f64) -> MdpSnapshot {
    let snap = MdpSnapshot {
        rewards: &a.rewards * (1.0 - t) + &b.rewards * t,
        transitions: &a.transitions * (1.0 - t) + &b.transitions * t,
    };
    snap.validate().unwrap();
    snap
}

fn report(number: u8, name: &str, pass: bool, detail: &str) {
    println!(
        "ACCEPTANCE {number} ({name}): {} — {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
}

#[test]
fn acceptance_01_drift_bound_never_violated() {
    let start = Instant::now();
    let mut violations = 0usize;
    let instances = 1000usize;
    for i in 0..instances {
        let (h_len, s_len, a_len) = dims_for(i);
        let first = random_snapshot(h_len, s_len, a_len, 2 * i as u64);
        let other = random_snapshot(h_len, s_len, a_len, 2 * i as u64 + 1);
        let second = if i % 2 == 1 { blend(&first, &other, 0.06) } else { other };
        let (dr, dp) = snapshot_variation(&first, &second);
        let bound = drift_bound(dr, dp, &fresh_tail(h_len), s_len, a_len).unwrap();
        let q1 = optimal_values(&first).q_star;
        let q2 = optimal_values(&second).q_star;
        for h in 0..h_len {
            for s in 0..s_len {
                for a in 0..a_len {
                    let gap = (q1[[h, s, a]] - q2[[h, s, a]]).abs();
                    let beta = bound.get(h, s, a);
                    // The inequality can be an exact tie (deterministic
                    // chains), where the two sides round differently at
                    // ulp scale; anything beyond that slack is a real
                    // violation.
                    if gap > beta + 1e-12 * (1.0 + beta) {
                        violations += 1;
                    }
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = violations == 0 && secs < 10.0;
    report(
        1,
        "drift bound property suite",
        pass,
        &format!("{instances} two-episode instances, {violations} violations, {secs:.1}s"),
    );
    assert!(pass, "{violations} violations in {secs:.1}s");
}

#[test]
fn acceptance_02_oracle_matches_enumeration() {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let instances = 200usize;
    for i in 0..instances {
        let (h_len, s_len, a_len) = dims_for(i);
        let snap = random_snapshot(h_len, s_len, a_len, 5000 + i as u64);
        let fast = optimal_values(&snap).v_star;
        let brute = enumerate_optimal_values(&snap);
        for h in 0..=h_len {
            for s in 0..s_len {
                worst = worst.max((fast[[h, s]] - brute[[h, s]]).abs());
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = worst <= 1e-9 && secs < 5.0;
    report(
        2,
        "oracle equivalence",
        pass,
        &format!("{instances} instances, worst gap {worst:.2e}, {secs:.1}s"),
    );
    assert!(pass, "worst gap {worst:.2e} in {secs:.1}s");
}

#[test]
fn acceptance_03_variation_budgets_conserved() {
    let start = Instant::now();
    let dists = [BudgetDistribution::Uniform, BudgetDistribution::Linear];
    let abrupts = [0.0, 0.5, 0.999];
    let mut failures = Vec::new();
    let mut cycled = 0usize;
    for i in 0..50usize {
        let abrupt_r = abrupts[(i / 2) % 3];
        let abrupt_p = abrupts[(i / 12) % 3];
        // A 0.999-abrupt channel concentrates its whole budget on a single
        // episode, and one interpolation journey can only realize the
        // distance to one target; such channels get sub-journey budgets.
        let total_r = if abrupt_r > 0.9 {
            [0.0, 0.4][(i / 6) % 2]
        } else {
            [0.0, 2.0, 4.0, 7.0][i % 4]
        };
        let total_p = if abrupt_p > 0.9 {
            [0.0, 0.8][(i / 6) % 2]
        } else {
            [4.0, 0.0, 6.0, 2.5, 9.0][i % 5]
        };
        let config = RandomMdpConfig {
            num_states: 4,
            num_actions: 3,
            horizon: 3,
            num_episodes: 150 + (i % 3) * 60,
            mdp_seed: 1000 + i as u64,
            total_delta_r: total_r,
            total_delta_p: total_p,
            delta_r_abruptness: abrupt_r,
            delta_p_abruptness: abrupt_p,
            delta_r_distribution: dists[i % 2],
            delta_p_distribution: dists[(i / 4) % 2],
            fail_probability: 0.05,
            reward_sparsity: 0.5,
        };
        let mut env = RandomMdp::new(config).unwrap();
        let (real_r, real_p) = variation_budgets(&mut env);
        let (cycles_r, cycles_p) = env.target_cycles();
        if cycles_r >= 1 {
            cycled += 1;
        }
        if cycles_p >= 1 {
            cycled += 1;
        }
        if real_r > total_r + 1e-6 || real_p > total_p + 1e-6 {
            failures.push(format!("config {i}: realized ({real_r:.3}, {real_p:.3}) over ({total_r}, {total_p})"));
        }
        if cycles_r >= 1 && real_r < 0.9 * total_r {
            failures.push(format!("config {i}: reward channel cycled yet realized {real_r:.3} < 0.9 * {total_r}"));
        }
        if cycles_p >= 1 && real_p < 0.9 * total_p {
            failures.push(format!("config {i}: transition channel cycled yet realized {real_p:.3} < 0.9 * {total_p}"));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = failures.is_empty() && cycled > 0 && secs < 30.0;
    report(
        3,
        "variation budget conservation",
        pass,
        &format!(
            "50 configs, {} failures, {cycled} channels completed a cycle, {secs:.1}s",
            failures.len()
        ),
    );
    assert!(pass, "{failures:?}, {cycled} cycled, in {secs:.1}s");
}

/// Corridor runs shared by the regret-reduction and restart-timing
/// criteria: 5 trials of the reference lineup on the abrupt corridor.
fn corridor_runs() -> &'static (Vec<ExperimentTrace>, Vec<SummaryRow>, f64) {
    static RUNS: OnceLock<(Vec<ExperimentTrace>, Vec<SummaryRow>, f64)> = OnceLock::new();
    RUNS.get_or_init(|| {
        let config = parse_experiment(
            "env.KIND: bdcl\n\
             env.H: 5\n\
             env.A: 5\n\
             env.TOTAL_STEPS: 100000\n\
             env.FAIL_PROBABILITY: 0.02\n\
             env.MODE: abrupt\n\
             env.SWAP_PERIOD: 1001\n\
             run.LEARNERS: restartq,adaparrestartq,selectiverandomizedq\n\
             run.TRIALS: 5\n",
        )
        .unwrap();
        let start = Instant::now();
        let (traces, summary) = run_experiment(&config).unwrap();
        (traces, summary, start.elapsed().as_secs_f64())
    })
}

fn mean_regret(summary: &[SummaryRow], id: &str) -> f64 {
    summary
        .iter()
        .find(|row| row.learner_id == id)
        .unwrap_or_else(|| panic!("no summary row for {id}"))
        .mean_regret
}

#[test]
fn acceptance_04_corridor_regret_reductions() {
    let (_, summary, secs) = corridor_runs();
    let base = mean_regret(summary, "restartq");
    let adaptive = mean_regret(summary, "adaparrestartq") / base;
    let selective = mean_regret(summary, "selectiverandomizedq") / base;
    let pass = adaptive <= 0.70 && selective <= 0.40 && *secs < 600.0;
    report(
        4,
        "corridor regret reductions",
        pass,
        &format!(
            "adaparrestartq ratio {adaptive:.3} (need <= 0.70), selectiverandomizedq ratio {selective:.3} (need <= 0.40), {secs:.0}s"
        ),
    );
    assert!(pass, "ratios {adaptive:.3} / {selective:.3} in {secs:.0}s");
}

#[test]
fn acceptance_05_random_tables_regret_reduction() {
    let config = parse_experiment(
        "env.KIND: randommdp\n\
         env.N_STATES: 5\n\
         env.N_ACTIONS: 5\n\
         env.EPISODE_LENGTH: 5\n\
         env.TOTAL_STEPS: 50000\n\
         run.LEARNERS: restartq,adaparrestartq\n\
         run.TRIALS: 5\n",
    )
    .unwrap();
    let start = Instant::now();
    let (_, summary) = run_experiment(&config).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let ratio = mean_regret(&summary, "adaparrestartq") / mean_regret(&summary, "restartq");
    let pass = ratio <= 0.60 && secs < 300.0;
    report(
        5,
        "random-tables regret reduction",
        pass,
        &format!("adaparrestartq ratio {ratio:.3} (need <= 0.60), {secs:.0}s"),
    );
    assert!(pass, "ratio {ratio:.3} in {secs:.0}s");
}

#[test]
fn acceptance_06_adaptive_restarts_track_swaps() {
    let (traces, _, _) = corridor_runs();
    let swap_period = 1001usize;
    let mut total = 0usize;
    let mut timely = 0usize;
    for trace in traces.iter().filter(|t| t.learner_id == "adaparrestartq") {
        for (idx, episode) in trace.episodes.iter().enumerate() {
            if !episode.restart {
                continue;
            }
            total += 1;
            let m = idx + 1;
            let phase = (m - 1) / swap_period;
            let offset = (m - 1) % swap_period;
            if phase >= 1 && offset < 100 {
                timely += 1;
            }
        }
    }
    let fraction = timely as f64 / total.max(1) as f64;
    let pass = total > 0 && fraction >= 0.80;
    report(
        6,
        "adaptive restart timing",
        pass,
        &format!("{timely}/{total} restarts within 100 episodes of a swap ({:.0}%)", fraction * 100.0),
    );
    assert!(pass, "{timely}/{total} timely restarts");
}

fn sample_next(
    snap: &MdpSnapshot,
    h: usize,
    s: usize,
    a: usize,
    rng: &mut rand_chacha::ChaCha12Rng,
) -> usize {
    let u: f64 = rand::Rng::random(rng);
    let mut acc = 0.0;
    for s2 in 0..snap.num_states() {
        acc += snap.transitions[[h, s, a, s2]];
        if u < acc {
            return s2;
        }
    }
    snap.num_states() - 1
}

/// Drive one agent over the abrupt corridor, returning every action taken
/// and every per-episode reward.
fn drive_corridor(agent: &mut impl Agent, seed: u64, episodes: usize) -> (Vec<usize>, Vec<f64>) {
    let mut config = BdclConfig::new(3, 3, episodes);
    config.swap_period = 90;
    let mut env = BdclEnv::new(config).unwrap();
    let h_len = env.schedule().horizon;
    let s0 = env.initial_state();
    let mut rng = substream(seed, Purpose::EnvSample);
    let mut actions = Vec::new();
    let mut rewards = Vec::new();
    for m in 1..=episodes {
        let snap = env.snapshot_at(m);
        agent.begin_episode(m);
        let mut s = s0;
        let mut total = 0.0;
        for h in 0..h_len {
            let a = agent.act(h, s);
            actions.push(a);
            total += snap.rewards[[h, s, a]];
            let s_next = sample_next(&snap, h, s, a, &mut rng);
            agent.observe(h, s, a, snap.rewards[[h, s, a]], s_next);
            s = s_next;
        }
        rewards.push(total);
    }
    (actions, rewards)
}

#[test]
fn acceptance_07_inert_wrapper_is_bit_identical() {
    let episodes = 400;
    let seed = 17;
    let members = EnsembleConfig { members: 8, prior_count: 0.25, inflation: 1.0 };

    let mut bare = EnsembleQ::new(3, 8, 3, members.clone(), seed).unwrap();
    let (bare_actions, bare_rewards) = drive_corridor(&mut bare, seed, episodes);

    let inner = EnsembleQ::new(3, 8, 3, members, seed).unwrap();
    let mut wrapped = SelectiveWrapper::new(
        inner,
        BoundTable::infinite(3, 8, 3),
        episodes,
        SelectiveConfig::default(),
    )
    .unwrap();
    let (wrapped_actions, wrapped_rewards) = drive_corridor(&mut wrapped, seed, episodes);

    let mut tables_match = true;
    for h in 0..3 {
        for s in 0..8 {
            if bare.q_row(h, s) != wrapped.base().q_row(h, s) {
                tables_match = false;
            }
        }
    }
    let pass = bare_actions == wrapped_actions && bare_rewards == wrapped_rewards && tables_match;
    report(
        7,
        "inert wrapper bit-identity",
        pass,
        &format!(
            "{episodes} episodes: actions {}, rewards {}, tables {}",
            bare_actions == wrapped_actions,
            bare_rewards == wrapped_rewards,
            tables_match
        ),
    );
    assert!(pass);
}

/// Frozen digest of the small-config outputs; regenerate by running this
/// test and copying the printed value after any intentional change to the
/// simulation pipeline.
const GOLDEN_SHA256: &str = "PENDING";

#[test]
fn acceptance_08_golden_csv_regression() {
    let config = parse_experiment(
        "env.KIND: randommdp\n\
         env.N_STATES: 3\n\
         env.N_ACTIONS: 3\n\
         env.EPISODE_LENGTH: 3\n\
         env.EPISODES: 500\n\
         run.LEARNERS: restartq,parrestartq,adarestartq,adaparrestartq,randomizedq,selectiverandomizedq,selectiverestartq,random,optimal\n\
         run.TRIALS: 1\n",
    )
    .unwrap();
    let (traces, summary) = run_experiment(&config).unwrap();
    let mut hasher = Sha256::new();
    for trace in &traces {
        hasher.update(trace_to_csv(trace).as_bytes());
    }
    hasher.update(summary_to_csv(&summary).as_bytes());
    let digest: String = hasher
        .finalize()
        .iter()
        .map(|byte| format!("{byte:02x}"))
        .collect();

    let (rerun_traces, rerun_summary) = run_experiment(&config).unwrap();
    let stable = rerun_traces == traces && rerun_summary == summary;

    let pass = digest == GOLDEN_SHA256 && stable;
    report(
        8,
        "golden CSV regression",
        pass,
        &format!("digest {digest}, rerun stable: {stable}"),
    );
    assert!(pass, "digest {digest} vs pinned {GOLDEN_SHA256}, stable {stable}");
}
