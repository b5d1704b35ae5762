//! Experiment orchestration: environment timelines, seeded trials, restart
//! scheduling, CSV traces, and summary statistics.
//!
//! An experiment first walks the environment once to build an
//! [`EnvTimeline`]: per-episode optimal values and greedy policies from the
//! backward-induction oracle, plus cumulative realized variation. Trials
//! then run independently (and in parallel), each with its own environment
//! instance and RNG substreams, so results are byte-identical regardless of
//! scheduling.
//!
//! Restart bookkeeping lives here rather than in the learners: scheduled
//! epoch boundaries fire full or partial restarts, the adaptive monitor's
//! end-of-episode decision does the same with budgets accrued since the
//! phase began, and the selective wrapper's per-step triggers are surfaced
//! as that episode's restart flag.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use ndarray::Array2;
use rand::Rng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

use crate::agent::{
    auto_epochs, Agent, EnsembleConfig, EnsembleQ, OptimalAgent, PolicyView, RandomAgent,
    RestartQ, StageEvent,
};
use crate::config::{EnvSpec, ExperimentConfig, LearnerCombo, LearnerParams};
use crate::env::{BdclEnv, RandomMdp};
use crate::mdp::{
    dynamic_regret, greedy_policy, optimal_values, policy_value, snapshot_variation,
    uniform_policy_values, EpisodeRecord, ExperimentTrace, MdpError, MdpSnapshot,
    NonStationaryMdp, RegretMode, ScheduleConstants,
};
use crate::restart::{
    fresh_tail, drift_bound, q_tail_max, AdaptiveMonitor, SelectiveConfig, SelectiveWrapper,
};
use crate::rng::{substream, Purpose};

/// Pinned trace schema; the golden-file regression depends on it.
pub const TRACE_HEADER: &str = "episode,reward,optimal_value,policy_value,restart,learner,seed";

/// Construct the configured environment.
pub fn make_env(spec: &EnvSpec) -> Result<Box<dyn NonStationaryMdp>, MdpError> {
    match spec {
        EnvSpec::RandomMdp(c) => Ok(Box::new(RandomMdp::new(c.clone())?)),
        EnvSpec::Bdcl(c) => Ok(Box::new(BdclEnv::new(c.clone())?)),
    }
}

/// Everything about the environment that trials share: oracle values,
/// greedy policies, and cumulative realized variation per episode.
pub struct EnvTimeline {
    pub schedule: ScheduleConstants,
    pub initial_state: usize,
    pub nominal_budgets: (f64, f64),
    /// Optimal episode value from the initial state, per episode.
    pub optimal_value: Vec<f64>,
    /// Greedy optimal policy per episode.
    pub greedy: Arc<Vec<Arc<Array2<usize>>>>,
    cum_r: Vec<f64>,
    cum_p: Vec<f64>,
}

impl EnvTimeline {
    pub fn compute(env: &mut dyn NonStationaryMdp) -> Self {
        let schedule = *env.schedule();
        let s0 = env.initial_state();
        let m_max = schedule.num_episodes;
        let mut optimal_value = Vec::with_capacity(m_max);
        let mut greedy = Vec::with_capacity(m_max);
        let mut cum_r = Vec::with_capacity(m_max);
        let mut cum_p = Vec::with_capacity(m_max);
        let mut prev: Option<Arc<MdpSnapshot>> = None;
        for m in 1..=m_max {
            let snap = env.snapshot_at(m);
            let tables = optimal_values(&snap);
            optimal_value.push(tables.v_star[[0, s0]]);
            greedy.push(Arc::new(greedy_policy(&tables)));
            match &prev {
                None => {
                    cum_r.push(0.0);
                    cum_p.push(0.0);
                }
                Some(p) => {
                    let (dr, dp) = snapshot_variation(p, &snap);
                    cum_r.push(cum_r[m - 2] + dr);
                    cum_p.push(cum_p[m - 2] + dp);
                }
            }
            prev = Some(snap);
        }
        EnvTimeline {
            schedule,
            initial_state: s0,
            nominal_budgets: env.nominal_budgets(),
            optimal_value,
            greedy: Arc::new(greedy),
            cum_r,
            cum_p,
        }
    }

    /// Realized `(delta_r, delta_p)` accrued between the snapshots of two
    /// episodes (inclusive bounds, 1-based).
    pub fn accrued_between(&self, from: usize, to: usize) -> (f64, f64) {
        let (a, b) = (from.min(to), from.max(to));
        (
            self.cum_r[b - 1] - self.cum_r[a - 1],
            self.cum_p[b - 1] - self.cum_p[a - 1],
        )
    }
}

/// Restart machinery wired around one trial's learner.
struct TrialPlan {
    /// Episode ends with scheduled restarts, ascending.
    scheduled: Vec<usize>,
    /// Raise Q by the drift bound instead of a full reset.
    partial: bool,
    /// Run the reward-window monitor.
    adaptive: bool,
    /// Multiplier-scaled per-epoch budgets for scheduled partial restarts.
    epoch_budgets: (f64, f64),
}

enum TrialLearner {
    Tabular(RestartQ),
    Ensemble(EnsembleQ),
    WrappedEnsemble(SelectiveWrapper<EnsembleQ>),
    WrappedTabular(SelectiveWrapper<RestartQ>),
    Random(RandomAgent),
    Optimal(OptimalAgent),
}

impl TrialLearner {
    fn begin_episode(&mut self, episode: usize) {
        match self {
            TrialLearner::Tabular(a) => a.begin_episode(episode),
            TrialLearner::Ensemble(a) => a.begin_episode(episode),
            TrialLearner::WrappedEnsemble(a) => a.begin_episode(episode),
            TrialLearner::WrappedTabular(a) => a.begin_episode(episode),
            TrialLearner::Random(a) => a.begin_episode(episode),
            TrialLearner::Optimal(a) => a.begin_episode(episode),
        }
    }

    fn act(&mut self, h: usize, s: usize) -> usize {
        match self {
            TrialLearner::Tabular(a) => a.act(h, s),
            TrialLearner::Ensemble(a) => a.act(h, s),
            TrialLearner::WrappedEnsemble(a) => a.act(h, s),
            TrialLearner::WrappedTabular(a) => a.act(h, s),
            TrialLearner::Random(a) => a.act(h, s),
            TrialLearner::Optimal(a) => a.act(h, s),
        }
    }

    fn observe(&mut self, h: usize, s: usize, a: usize, r: f64, s2: usize) -> Option<StageEvent> {
        match self {
            TrialLearner::Tabular(x) => x.observe(h, s, a, r, s2),
            TrialLearner::Ensemble(x) => x.observe(h, s, a, r, s2),
            TrialLearner::WrappedEnsemble(x) => x.observe(h, s, a, r, s2),
            TrialLearner::WrappedTabular(x) => x.observe(h, s, a, r, s2),
            TrialLearner::Random(x) => x.observe(h, s, a, r, s2),
            TrialLearner::Optimal(x) => x.observe(h, s, a, r, s2),
        }
    }

    fn policy_view(&self) -> PolicyView {
        match self {
            TrialLearner::Tabular(a) => a.policy_view(),
            TrialLearner::Ensemble(a) => a.policy_view(),
            TrialLearner::WrappedEnsemble(a) => a.policy_view(),
            TrialLearner::WrappedTabular(a) => a.policy_view(),
            TrialLearner::Random(a) => a.policy_view(),
            TrialLearner::Optimal(a) => a.policy_view(),
        }
    }

    fn triggers_fired(&self) -> Option<u64> {
        match self {
            TrialLearner::WrappedEnsemble(a) => Some(a.triggers_fired()),
            TrialLearner::WrappedTabular(a) => Some(a.triggers_fired()),
            _ => None,
        }
    }
}

/// Scheduled restart episodes for `epochs` epochs over `episodes` episodes:
/// the ends of all epochs but the last.
fn scheduled_restarts(episodes: usize, epochs: usize) -> Vec<usize> {
    let k = episodes.div_ceil(epochs);
    (1..epochs).map(|i| i * k).filter(|&m| m < episodes).collect()
}

fn build_learner(
    combo: LearnerCombo,
    params: &LearnerParams,
    seed: u64,
    timeline: &EnvTimeline,
) -> Result<(TrialLearner, TrialPlan), MdpError> {
    let ScheduleConstants {
        num_states: s_len,
        num_actions: a_len,
        horizon: h_len,
        num_episodes: m_max,
        total_steps,
    } = timeline.schedule;
    let (nom_r, nom_p) = timeline.nominal_budgets;
    let epochs = params
        .num_epochs
        .unwrap_or_else(|| auto_epochs(s_len, a_len, h_len, total_steps, nom_r, nom_p));
    let epoch_budgets = (
        params.budget_multiplier * nom_r / epochs as f64,
        params.budget_multiplier * nom_p / epochs as f64,
    );
    let b_delta = if params.b_delta_enabled {
        nom_r / epochs as f64 + h_len as f64 * nom_p / epochs as f64
    } else {
        0.0
    };

    let tabular = || RestartQ::new(h_len, s_len, a_len, m_max, params.delta, b_delta, None);
    let ensemble = || {
        EnsembleQ::new(
            h_len,
            s_len,
            a_len,
            EnsembleConfig {
                members: params.ensembles,
                prior_count: params.n0,
                inflation: params.kappa,
            },
            seed,
        )
    };
    let wrapper_bound = || {
        drift_bound(
            epoch_budgets.0,
            epoch_budgets.1,
            &fresh_tail(h_len),
            s_len,
            a_len,
        )
    };
    let selective_config = SelectiveConfig {
        temperature: params.softmax_temperature,
    };

    let no_restarts = TrialPlan {
        scheduled: Vec::new(),
        partial: false,
        adaptive: false,
        epoch_budgets,
    };
    let plan = |partial: bool, adaptive: bool| TrialPlan {
        scheduled: if adaptive {
            Vec::new()
        } else {
            scheduled_restarts(m_max, epochs)
        },
        partial,
        adaptive,
        epoch_budgets,
    };

    let built = match combo {
        LearnerCombo::RestartQ => (TrialLearner::Tabular(tabular()?), plan(false, false)),
        LearnerCombo::ParRestartQ => (TrialLearner::Tabular(tabular()?), plan(true, false)),
        LearnerCombo::AdaRestartQ => (TrialLearner::Tabular(tabular()?), plan(false, true)),
        LearnerCombo::AdaParRestartQ => (TrialLearner::Tabular(tabular()?), plan(true, true)),
        LearnerCombo::RandomizedQ => (TrialLearner::Ensemble(ensemble()?), no_restarts),
        LearnerCombo::SelectiveRandomizedQ => (
            TrialLearner::WrappedEnsemble(SelectiveWrapper::new(
                ensemble()?,
                wrapper_bound()?,
                m_max,
                selective_config,
            )?),
            no_restarts,
        ),
        LearnerCombo::SelectiveRestartQ => (
            TrialLearner::WrappedTabular(SelectiveWrapper::new(
                tabular()?,
                wrapper_bound()?,
                m_max,
                selective_config,
            )?),
            no_restarts,
        ),
        LearnerCombo::Random => (
            TrialLearner::Random(RandomAgent::new(a_len, seed)),
            no_restarts,
        ),
        LearnerCombo::Optimal => (
            TrialLearner::Optimal(OptimalAgent::new(Arc::clone(&timeline.greedy))),
            no_restarts,
        ),
    };
    Ok(built)
}

fn sample_next(snap: &MdpSnapshot, h: usize, s: usize, a: usize, rng: &mut ChaCha12Rng) -> usize {
    let u: f64 = rng.random();
    let s_len = snap.num_states();
    let mut acc = 0.0;
    for s2 in 0..s_len {
        acc += snap.transitions[[h, s, a, s2]];
        if u < acc {
            return s2;
        }
    }
    s_len - 1
}

fn apply_restart(
    learner: &mut TrialLearner,
    partial: bool,
    budgets: (f64, f64),
) -> Result<(), MdpError> {
    let TrialLearner::Tabular(agent) = learner else {
        return Err(MdpError::Invalid(
            "restart scheduling applies to the stage-gated learner only".into(),
        ));
    };
    if partial {
        let (_, s_len, a_len) = agent.q_table().dim();
        let tail = q_tail_max(agent.q_table());
        let bound = drift_bound(budgets.0, budgets.1, &tail, s_len, a_len)?;
        agent.partial_restart(&bound);
    } else {
        agent.restart_full();
    }
    Ok(())
}

/// Simulate one learner for one seed over the full episode sequence.
pub fn run_trial(
    spec: &EnvSpec,
    combo: LearnerCombo,
    params: &LearnerParams,
    seed: u64,
    timeline: &EnvTimeline,
    regret_mode: RegretMode,
) -> Result<ExperimentTrace, MdpError> {
    let mut env = make_env(spec)?;
    let h_len = timeline.schedule.horizon;
    let m_max = timeline.schedule.num_episodes;
    let s0 = timeline.initial_state;
    let (mut learner, trial_plan) = build_learner(combo, params, seed, timeline)?;
    let mut monitor = trial_plan
        .adaptive
        .then(|| AdaptiveMonitor::new(h_len, params.adaptive_window));
    let mut env_rng = substream(seed, Purpose::EnvSample);
    let mut episodes = Vec::with_capacity(m_max);
    let mut next_scheduled = 0;
    let mut phase_start = 1;
    let mut seen_triggers = 0;

    for m in 1..=m_max {
        let snap = env.snapshot_at(m);
        learner.begin_episode(m);
        let policy_value_now = match regret_mode {
            RegretMode::Exact => Some(match learner.policy_view() {
                PolicyView::Greedy(table) => policy_value(&snap, &table, s0),
                PolicyView::Uniform => uniform_policy_values(&snap)[[0, s0]],
                PolicyView::Oracle => timeline.optimal_value[m - 1],
            }),
            RegretMode::Empirical => None,
        };

        let mut reward_sum = 0.0;
        let mut s = s0;
        let mut episode_updates = 0usize;
        let mut episode_changed = false;
        let mut first_action = 0usize;
        for h in 0..h_len {
            let a = learner.act(h, s);
            if h == 0 {
                first_action = a;
            }
            let r = snap.rewards[[h, s, a]];
            let s_next = sample_next(&snap, h, s, a, &mut env_rng);
            reward_sum += r;
            if let Some(event) = learner.observe(h, s, a, r, s_next) {
                episode_updates += 1;
                episode_changed |= event.argmax_changed;
            }
            s = s_next;
        }
        if std::env::var_os("SELECTIVE_TRACE").is_some() {
            eprintln!("EP {m} a0={first_action} r={reward_sum:.3}");
        }
        // The change detector's counters measure spans in episodes, so the
        // episode's stage updates collapse to one net verdict: did any of
        // them move a greedy action.
        if episode_updates > 0 {
            if let Some(mon) = monitor.as_mut() {
                mon.record_update_event(episode_changed);
            }
        }

        let mut restarted = false;
        if next_scheduled < trial_plan.scheduled.len()
            && trial_plan.scheduled[next_scheduled] == m
        {
            next_scheduled += 1;
            apply_restart(&mut learner, trial_plan.partial, trial_plan.epoch_budgets)?;
            restarted = true;
            phase_start = m + 1;
        }
        if let Some(mon) = monitor.as_mut() {
            let remaining = ((m_max - m) * h_len) as u64;
            if mon.end_of_episode(reward_sum, remaining) && m < m_max {
                let (acc_r, acc_p) = timeline.accrued_between(phase_start, m + 1);
                let budgets = (
                    acc_r * params.budget_multiplier,
                    acc_p * params.budget_multiplier,
                );
                apply_restart(&mut learner, trial_plan.partial, budgets)?;
                *mon = AdaptiveMonitor::new(h_len, params.adaptive_window);
                restarted = true;
                phase_start = m + 1;
            }
        }
        if let Some(total) = learner.triggers_fired() {
            if total > seen_triggers {
                restarted = true;
                seen_triggers = total;
            }
        }

        episodes.push(EpisodeRecord {
            reward: reward_sum,
            optimal_value: Some(timeline.optimal_value[m - 1]),
            policy_value: policy_value_now,
            restart: restarted,
        });
    }

    Ok(ExperimentTrace {
        learner_id: combo.id().to_string(),
        seed,
        episodes,
    })
}

/// Per-learner aggregate statistics across trials.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub learner_id: String,
    pub mean_reward: f64,
    pub std_reward: f64,
    pub mean_regret: f64,
    pub std_regret: f64,
    /// Mean regret over the stage-gated baseline's, when that learner ran
    /// and its regret is nonzero.
    pub regret_ratio: Option<f64>,
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Aggregate traces into one row per learner, in first-appearance order.
pub fn summarize(traces: &[ExperimentTrace], mode: RegretMode) -> Result<Vec<SummaryRow>, MdpError> {
    let mut order: Vec<&str> = Vec::new();
    let mut rewards: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    let mut regrets: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    for trace in traces {
        let id = trace.learner_id.as_str();
        if !order.contains(&id) {
            order.push(id);
        }
        let total: f64 = trace.episodes.iter().map(|e| e.reward).sum();
        rewards.entry(id).or_default().push(total);
        let regret =
            dynamic_regret(trace, mode).map_err(|e| MdpError::Invalid(e.to_string()))?;
        regrets.entry(id).or_default().push(regret);
    }
    let baseline = regrets
        .get(LearnerCombo::RestartQ.id())
        .map(|r| mean_std(r).0);
    let rows = order
        .into_iter()
        .map(|id| {
            let (mean_reward, std_reward) = mean_std(&rewards[id]);
            let (mean_regret, std_regret) = mean_std(&regrets[id]);
            let regret_ratio = match baseline {
                Some(b) if b != 0.0 => Some(mean_regret / b),
                _ => None,
            };
            SummaryRow {
                learner_id: id.to_string(),
                mean_reward,
                std_reward,
                mean_regret,
                std_regret,
                regret_ratio,
            }
        })
        .collect();
    Ok(rows)
}

/// Regret ratios of every summary row against a chosen baseline learner.
/// A zero-regret baseline makes the ratio undefined (`None`).
pub fn compare_regret(
    summary: &[SummaryRow],
    baseline_id: &str,
) -> Result<Vec<(String, Option<f64>)>, MdpError> {
    let baseline = summary
        .iter()
        .find(|row| row.learner_id == baseline_id)
        .ok_or_else(|| {
            MdpError::Invalid(format!("baseline learner '{baseline_id}' not in summary"))
        })?;
    let base = baseline.mean_regret;
    Ok(summary
        .iter()
        .map(|row| {
            let ratio = (base != 0.0).then(|| row.mean_regret / base);
            (row.learner_id.clone(), ratio)
        })
        .collect())
}

/// Run every configured learner for every trial seed. Trials execute in
/// parallel; output order is learner-major then seed-major regardless.
pub fn run_experiment(
    config: &ExperimentConfig,
) -> Result<(Vec<ExperimentTrace>, Vec<SummaryRow>), MdpError> {
    config.validate()?;
    let mut env = make_env(&config.env)?;
    let timeline = EnvTimeline::compute(env.as_mut());
    drop(env);
    let jobs: Vec<(LearnerCombo, u64)> = config
        .learners
        .iter()
        .flat_map(|&combo| config.seeds.iter().map(move |&seed| (combo, seed)))
        .collect();
    let traces = jobs
        .par_iter()
        .map(|&(combo, seed)| {
            run_trial(
                &config.env,
                combo,
                &config.params,
                seed,
                &timeline,
                config.regret_mode,
            )
        })
        .collect::<Result<Vec<_>, _>>()?;
    let summary = summarize(&traces, config.regret_mode)?;
    Ok((traces, summary))
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Render one trace in the pinned CSV schema.
pub fn trace_to_csv(trace: &ExperimentTrace) -> String {
    let mut out = String::with_capacity(trace.episodes.len() * 48);
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for (i, ep) in trace.episodes.iter().enumerate() {
        let line = format!(
            "{},{},{},{},{},{},{}\n",
            i + 1,
            ep.reward,
            fmt_opt(ep.optimal_value),
            fmt_opt(ep.policy_value),
            ep.restart,
            trace.learner_id,
            trace.seed
        );
        out.push_str(&line);
    }
    out
}

/// Parse a trace back from its CSV form.
pub fn trace_from_csv(text: &str) -> Result<ExperimentTrace, MdpError> {
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default();
    if header != TRACE_HEADER {
        return Err(MdpError::Invalid(format!(
            "unexpected trace header '{header}'"
        )));
    }
    let mut learner_id = String::new();
    let mut seed = 0u64;
    let mut episodes = Vec::new();
    for (idx, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(MdpError::Invalid(format!(
                "trace row {} has {} fields",
                idx + 2,
                fields.len()
            )));
        }
        let parse_f64 = |s: &str, what: &str| -> Result<f64, MdpError> {
            s.parse()
                .map_err(|_| MdpError::Invalid(format!("bad {what} '{s}' on row {}", idx + 2)))
        };
        let opt = |s: &str, what: &str| -> Result<Option<f64>, MdpError> {
            if s.is_empty() {
                Ok(None)
            } else {
                parse_f64(s, what).map(Some)
            }
        };
        episodes.push(EpisodeRecord {
            reward: parse_f64(fields[1], "reward")?,
            optimal_value: opt(fields[2], "optimal_value")?,
            policy_value: opt(fields[3], "policy_value")?,
            restart: fields[4] == "true",
        });
        learner_id = fields[5].to_string();
        seed = parse_f64(fields[6], "seed")? as u64;
    }
    if episodes.is_empty() {
        return Err(MdpError::Invalid("trace has no episodes".into()));
    }
    Ok(ExperimentTrace {
        learner_id,
        seed,
        episodes,
    })
}

/// Render the summary table.
pub fn summary_to_csv(summary: &[SummaryRow]) -> String {
    let mut out = String::from(
        "learner,mean_cumulative_reward,std_cumulative_reward,mean_dynamic_regret,std_dynamic_regret,regret_ratio\n",
    );
    for row in summary {
        let line = format!(
            "{},{},{},{},{},{}\n",
            row.learner_id,
            row.mean_reward,
            row.std_reward,
            row.mean_regret,
            row.std_regret,
            fmt_opt(row.regret_ratio)
        );
        out.push_str(&line);
    }
    out
}

/// Parse a summary table back from its CSV form.
pub fn summary_from_csv(text: &str) -> Result<Vec<SummaryRow>, MdpError> {
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default();
    if !header.starts_with("learner,") {
        return Err(MdpError::Invalid(format!(
            "unexpected summary header '{header}'"
        )));
    }
    let mut rows = Vec::new();
    for (idx, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(MdpError::Invalid(format!(
                "summary row {} has {} fields",
                idx + 2,
                fields.len()
            )));
        }
        let num = |s: &str| -> Result<f64, MdpError> {
            s.parse()
                .map_err(|_| MdpError::Invalid(format!("bad number '{s}' on row {}", idx + 2)))
        };
        rows.push(SummaryRow {
            learner_id: fields[0].to_string(),
            mean_reward: num(fields[1])?,
            std_reward: num(fields[2])?,
            mean_regret: num(fields[3])?,
            std_regret: num(fields[4])?,
            regret_ratio: if fields[5].is_empty() {
                None
            } else {
                Some(num(fields[5])?)
            },
        });
    }
    if rows.is_empty() {
        return Err(MdpError::Invalid("summary has no rows".into()));
    }
    Ok(rows)
}

fn write_file(path: &Path, content: &str) -> Result<(), MdpError> {
    std::fs::write(path, content)
        .map_err(|e| MdpError::Invalid(format!("cannot write {}: {e}", path.display())))
}

/// Write one CSV per trace plus `summary.csv` into the output directory.
/// Returns the written paths, traces first.
pub fn write_outputs(
    out_dir: &Path,
    traces: &[ExperimentTrace],
    summary: &[SummaryRow],
) -> Result<Vec<PathBuf>, MdpError> {
    std::fs::create_dir_all(out_dir).map_err(|e| {
        MdpError::Invalid(format!(
            "cannot create output directory {}: {e}",
            out_dir.display()
        ))
    })?;
    let mut written = Vec::new();
    for trace in traces {
        let path = out_dir.join(format!("trace_{}_{}.csv", trace.learner_id, trace.seed));
        write_file(&path, &trace_to_csv(trace))?;
        written.push(path);
    }
    let summary_path = out_dir.join("summary.csv");
    write_file(&summary_path, &summary_to_csv(summary))?;
    written.push(summary_path);
    Ok(written)
}

/// Load every `trace_*.csv` in a directory, sorted by file name.
pub fn load_traces(dir: &Path) -> Result<Vec<ExperimentTrace>, MdpError> {
    let entries = std::fs::read_dir(dir)
        .map_err(|e| MdpError::Invalid(format!("cannot read {}: {e}", dir.display())))?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.starts_with("trace_") && n.ends_with(".csv"))
        })
        .collect();
    paths.sort();
    let mut traces = Vec::new();
    for path in paths {
        let text = std::fs::read_to_string(&path)
            .map_err(|e| MdpError::Invalid(format!("cannot read {}: {e}", path.display())))?;
        traces.push(trace_from_csv(&text)?);
    }
    Ok(traces)
}
