//! Experiment configuration files.
//!
//! The format is flat `KEY: value` (or `KEY = value`) lines with `#`
//! comments. Keys carry a section prefix: `env.` for the environment,
//! `learner.` for hyperparameters and restart flags, `run.` for trial
//! orchestration. Environment and learner keys use the uppercase parameter
//! names the configs are usually quoted with (`TOTAL_DELTA_R`,
//! `FAIL_PROBABILITY`, ...); unknown keys are rejected so typos fail loudly.
//!
//! Either `env.EPISODES` or `env.TOTAL_STEPS` fixes the run length; the
//! other is derived. `run.LEARNERS` selects the learner lineup; without it
//! the single learner described by `learner.BASE` and the restart flags
//! runs alone.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::env::{BdclConfig, BdclMode, BudgetDistribution, RandomMdpConfig};
use crate::mdp::{MdpError, RegretMode};
use crate::restart::WindowPolicy;

/// Which environment an experiment runs on.
#[derive(Debug, Clone)]
pub enum EnvSpec {
    RandomMdp(RandomMdpConfig),
    Bdcl(BdclConfig),
}

impl EnvSpec {
    pub fn horizon(&self) -> usize {
        match self {
            EnvSpec::RandomMdp(c) => c.horizon,
            EnvSpec::Bdcl(c) => c.horizon,
        }
    }

    pub fn num_episodes(&self) -> usize {
        match self {
            EnvSpec::RandomMdp(c) => c.num_episodes,
            EnvSpec::Bdcl(c) => c.num_episodes,
        }
    }
}

/// A runnable learner lineup entry: a base learner plus restart machinery.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LearnerCombo {
    RestartQ,
    ParRestartQ,
    AdaRestartQ,
    AdaParRestartQ,
    RandomizedQ,
    SelectiveRandomizedQ,
    SelectiveRestartQ,
    Random,
    Optimal,
}

impl LearnerCombo {
    pub const ALL: [LearnerCombo; 9] = [
        LearnerCombo::RestartQ,
        LearnerCombo::ParRestartQ,
        LearnerCombo::AdaRestartQ,
        LearnerCombo::AdaParRestartQ,
        LearnerCombo::RandomizedQ,
        LearnerCombo::SelectiveRandomizedQ,
        LearnerCombo::SelectiveRestartQ,
        LearnerCombo::Random,
        LearnerCombo::Optimal,
    ];

    pub fn id(&self) -> &'static str {
        match self {
            LearnerCombo::RestartQ => "restartq",
            LearnerCombo::ParRestartQ => "parrestartq",
            LearnerCombo::AdaRestartQ => "adarestartq",
            LearnerCombo::AdaParRestartQ => "adaparrestartq",
            LearnerCombo::RandomizedQ => "randomizedq",
            LearnerCombo::SelectiveRandomizedQ => "selectiverandomizedq",
            LearnerCombo::SelectiveRestartQ => "selectiverestartq",
            LearnerCombo::Random => "random",
            LearnerCombo::Optimal => "optimal",
        }
    }

    pub fn parse(s: &str) -> Result<Self, MdpError> {
        Self::ALL
            .iter()
            .copied()
            .find(|c| c.id() == s)
            .ok_or_else(|| {
                MdpError::Invalid(format!(
                    "unknown learner '{s}' (expected one of {})",
                    Self::ALL.map(|c| c.id()).join(", ")
                ))
            })
    }

    /// Pairings that run but are outside the intended design, reported with
    /// a warning: the stage-gated learner only refreshes its values at
    /// stage marks, so the trajectory-scoped wrapper sees stale targets.
    pub fn off_spec(&self) -> bool {
        matches!(self, LearnerCombo::SelectiveRestartQ)
    }
}

/// Hyperparameters shared by the learner lineup.
#[derive(Debug, Clone)]
pub struct LearnerParams {
    /// Confidence parameter of the exploration bonus, in (0, 2].
    pub delta: f64,
    /// Scheduled restart count; `None` derives it from the variation budget.
    pub num_epochs: Option<usize>,
    /// Add the drift compensation term to stage estimates.
    pub b_delta_enabled: bool,
    /// Ensemble member count J.
    pub ensembles: usize,
    /// Ensemble noise inflation kappa.
    pub kappa: f64,
    /// Ensemble prior pseudo-count n0.
    pub n0: f64,
    /// Scales the drift bound used by partial and selective restarts.
    pub budget_multiplier: f64,
    /// Softmax temperature of the selective wrapper.
    pub softmax_temperature: f64,
    /// How the adaptive monitor treats repeat window estimates.
    pub adaptive_window: WindowPolicy,
    /// Base seed of the agent RNG streams; defaults to the run seed.
    pub agent_seed: Option<u64>,
}

impl Default for LearnerParams {
    fn default() -> Self {
        LearnerParams {
            delta: 2.0,
            num_epochs: None,
            b_delta_enabled: false,
            ensembles: 20,
            kappa: 1.0,
            n0: 0.25,
            budget_multiplier: 1.0,
            softmax_temperature: 1.0,
            adaptive_window: WindowPolicy::FreezeFirst,
            agent_seed: None,
        }
    }
}

impl LearnerParams {
    pub fn validate(&self) -> Result<(), MdpError> {
        if !(self.delta > 0.0 && self.delta <= 2.0) {
            return Err(MdpError::Invalid(format!(
                "DELTA must lie in (0, 2], got {}",
                self.delta
            )));
        }
        if self.num_epochs == Some(0) {
            return Err(MdpError::Invalid("NUM_EPOCHS must be at least 1".into()));
        }
        if self.ensembles == 0 {
            return Err(MdpError::Invalid("ENSEMBLES must be at least 1".into()));
        }
        if self.kappa < 0.0 || !self.kappa.is_finite() {
            return Err(MdpError::Invalid(format!(
                "KAPPA must be finite and >= 0, got {}",
                self.kappa
            )));
        }
        if self.n0 < 0.0 || !self.n0.is_finite() {
            return Err(MdpError::Invalid(format!(
                "N0 must be finite and >= 0, got {}",
                self.n0
            )));
        }
        if self.budget_multiplier < 0.0 || !self.budget_multiplier.is_finite() {
            return Err(MdpError::Invalid(format!(
                "BUDGET_MULTIPLIER must be finite and >= 0, got {}",
                self.budget_multiplier
            )));
        }
        if !(self.softmax_temperature > 0.0 && self.softmax_temperature.is_finite()) {
            return Err(MdpError::Invalid(format!(
                "SOFTMAX_TEMPERATURE must be positive and finite, got {}",
                self.softmax_temperature
            )));
        }
        Ok(())
    }
}

/// A fully resolved experiment.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub env: EnvSpec,
    pub learners: Vec<LearnerCombo>,
    pub params: LearnerParams,
    pub num_trials: usize,
    /// One agent seed per trial.
    pub seeds: Vec<u64>,
    pub out_dir: PathBuf,
    pub regret_mode: RegretMode,
}

/// Command-line overrides layered on top of a parsed config file.
#[derive(Debug, Clone, Default)]
pub struct CliOverrides {
    pub out_dir: Option<PathBuf>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub regret_mode: Option<RegretMode>,
}

impl ExperimentConfig {
    /// Apply command-line overrides. A seed or trial-count override rebuilds
    /// the trial seed list from the (possibly overridden) base seed, which is
    /// the first seed of the existing list when no `--seed` is given.
    pub fn apply_overrides(&mut self, overrides: &CliOverrides) -> Result<(), MdpError> {
        if let Some(dir) = &overrides.out_dir {
            self.out_dir = dir.clone();
        }
        if let Some(mode) = overrides.regret_mode {
            self.regret_mode = mode;
        }
        if overrides.trials.is_some() || overrides.seed.is_some() {
            let trials = overrides.trials.unwrap_or(self.num_trials);
            if trials == 0 {
                return Err(MdpError::Invalid("--trials must be at least 1".into()));
            }
            if trials > u32::MAX as usize {
                return Err(MdpError::Invalid(format!("--trials {trials} is too large")));
            }
            let base = overrides
                .seed
                .or_else(|| self.seeds.first().copied())
                .unwrap_or(1);
            self.num_trials = trials;
            self.seeds = (0..trials as u32)
                .map(|t| crate::rng::trial_seed(base, t))
                .collect();
        }
        self.validate()
    }

    pub fn validate(&self) -> Result<(), MdpError> {
        if self.num_trials == 0 {
            return Err(MdpError::Invalid("TRIALS must be at least 1".into()));
        }
        if self.seeds.len() != self.num_trials {
            return Err(MdpError::Invalid(format!(
                "{} seeds for {} trials",
                self.seeds.len(),
                self.num_trials
            )));
        }
        if self.learners.is_empty() {
            return Err(MdpError::Invalid("no learners selected".into()));
        }
        match &self.env {
            EnvSpec::RandomMdp(c) => c.validate()?,
            EnvSpec::Bdcl(c) => c.validate()?,
        }
        self.params.validate()
    }
}

/// Build the lineup entry described by explicit restart flags.
pub fn combo_from_flags(
    base: &str,
    partial: bool,
    adaptive: bool,
    selective: bool,
) -> Result<LearnerCombo, MdpError> {
    match (base, partial, adaptive, selective) {
        (_, _, _, true) if partial || adaptive => Err(MdpError::Invalid(
            "SELECTIVE_RESTART_ENABLED cannot combine with partial or adaptive restarts".into(),
        )),
        ("restartq", false, false, false) => Ok(LearnerCombo::RestartQ),
        ("restartq", true, false, false) => Ok(LearnerCombo::ParRestartQ),
        ("restartq", false, true, false) => Ok(LearnerCombo::AdaRestartQ),
        ("restartq", true, true, false) => Ok(LearnerCombo::AdaParRestartQ),
        ("restartq", false, false, true) => Ok(LearnerCombo::SelectiveRestartQ),
        ("randomizedq", false, false, false) => Ok(LearnerCombo::RandomizedQ),
        ("randomizedq", false, false, true) => Ok(LearnerCombo::SelectiveRandomizedQ),
        ("randomizedq", _, _, _) => Err(MdpError::Invalid(
            "partial and adaptive restarts pair with the stage-gated learner only".into(),
        )),
        (other, _, _, _) => Err(MdpError::Invalid(format!(
            "unknown learner base '{other}' (expected restartq or randomizedq)"
        ))),
    }
}

/// Raw key-value view of a config file, tracking line numbers and consumed
/// keys so leftovers can be reported.
struct RawConfig {
    entries: BTreeMap<String, (usize, String)>,
}

impl RawConfig {
    fn parse(text: &str) -> Result<Self, MdpError> {
        let mut entries = BTreeMap::new();
        for (idx, raw_line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw_line.find('#') {
                Some(pos) => &raw_line[..pos],
                None => raw_line,
            };
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let split = line
                .char_indices()
                .find(|&(_, c)| c == ':' || c == '=')
                .map(|(i, _)| i);
            let Some(pos) = split else {
                return Err(MdpError::Invalid(format!(
                    "line {line_no}: expected 'KEY: value', got '{line}'"
                )));
            };
            let key = line[..pos].trim().to_string();
            let value = line[pos + 1..].trim().to_string();
            if key.is_empty() || value.is_empty() {
                return Err(MdpError::Invalid(format!(
                    "line {line_no}: empty key or value in '{line}'"
                )));
            }
            if let Some((first, _)) = entries.insert(key.clone(), (line_no, value)) {
                return Err(MdpError::Invalid(format!(
                    "line {line_no}: duplicate key '{key}' (first set on line {first})"
                )));
            }
        }
        Ok(RawConfig { entries })
    }

    fn take(&mut self, key: &str) -> Option<String> {
        self.entries.remove(key).map(|(_, v)| v)
    }

    fn take_parsed<T: std::str::FromStr>(&mut self, key: &str) -> Result<Option<T>, MdpError> {
        match self.take(key) {
            None => Ok(None),
            Some(v) => v.parse::<T>().map(Some).map_err(|_| {
                MdpError::Invalid(format!("{key}: cannot parse '{v}'"))
            }),
        }
    }

    fn take_bool(&mut self, key: &str) -> Result<Option<bool>, MdpError> {
        match self.take(key) {
            None => Ok(None),
            Some(v) => match v.as_str() {
                "true" => Ok(Some(true)),
                "false" => Ok(Some(false)),
                other => Err(MdpError::Invalid(format!(
                    "{key}: expected true or false, got '{other}'"
                ))),
            },
        }
    }

    fn finish(self) -> Result<(), MdpError> {
        if let Some((key, (line, _))) = self.entries.into_iter().next() {
            return Err(MdpError::Invalid(format!(
                "line {line}: unknown key '{key}'"
            )));
        }
        Ok(())
    }
}

fn episode_count(
    raw: &mut RawConfig,
    horizon: usize,
    default_total_steps: usize,
) -> Result<usize, MdpError> {
    let episodes: Option<usize> = raw.take_parsed("env.EPISODES")?;
    let total_steps: Option<usize> = raw.take_parsed("env.TOTAL_STEPS")?;
    match (episodes, total_steps) {
        (Some(_), Some(_)) => Err(MdpError::Invalid(
            "set env.EPISODES or env.TOTAL_STEPS, not both".into(),
        )),
        (Some(m), None) => Ok(m),
        (None, steps) => {
            let t = steps.unwrap_or(default_total_steps);
            if horizon == 0 || t % horizon != 0 {
                return Err(MdpError::Invalid(format!(
                    "env.TOTAL_STEPS {t} is not a multiple of the episode length {horizon}"
                )));
            }
            Ok(t / horizon)
        }
    }
}

fn budget_distribution(raw: &mut RawConfig, key: &str) -> Result<BudgetDistribution, MdpError> {
    match raw.take(key).as_deref() {
        None | Some("uniform") => Ok(BudgetDistribution::Uniform),
        Some("linear") => Ok(BudgetDistribution::Linear),
        Some(other) => Err(MdpError::Invalid(format!(
            "{key}: expected uniform or linear, got '{other}'"
        ))),
    }
}

fn parse_env(raw: &mut RawConfig) -> Result<EnvSpec, MdpError> {
    let kind = raw
        .take("env.KIND")
        .ok_or_else(|| MdpError::Invalid("env.KIND is required (randommdp or bdcl)".into()))?;
    match kind.as_str() {
        "randommdp" => {
            let horizon = raw.take_parsed("env.EPISODE_LENGTH")?.unwrap_or(5);
            let num_episodes = episode_count(raw, horizon, 50_000)?;
            let config = RandomMdpConfig {
                num_states: raw.take_parsed("env.N_STATES")?.unwrap_or(5),
                num_actions: raw.take_parsed("env.N_ACTIONS")?.unwrap_or(5),
                horizon,
                num_episodes,
                mdp_seed: raw.take_parsed("env.MDP_SEED")?.unwrap_or(0),
                total_delta_r: raw.take_parsed("env.TOTAL_DELTA_R")?.unwrap_or(5.0),
                total_delta_p: raw.take_parsed("env.TOTAL_DELTA_P")?.unwrap_or(10.0),
                delta_r_abruptness: raw
                    .take_parsed("env.DELTA_R_ABRUPTNESS")?
                    .unwrap_or(0.999),
                delta_p_abruptness: raw.take_parsed("env.DELTA_P_ABRUPTNESS")?.unwrap_or(0.5),
                delta_r_distribution: budget_distribution(raw, "env.DELTA_R_BUDGET_DISTRIBUTION")?,
                delta_p_distribution: budget_distribution(raw, "env.DELTA_P_BUDGET_DISTRIBUTION")?,
                fail_probability: raw.take_parsed("env.FAIL_PROBABILITY")?.unwrap_or(0.05),
                reward_sparsity: raw.take_parsed("env.REWARD_SPARSITY")?.unwrap_or(0.8),
            };
            Ok(EnvSpec::RandomMdp(config))
        }
        "bdcl" => {
            let horizon = raw.take_parsed("env.H")?.unwrap_or(5);
            let num_actions = raw.take_parsed("env.A")?.unwrap_or(5);
            let num_episodes = episode_count(raw, horizon, 100_000)?;
            let mut config = BdclConfig::new(horizon, num_actions, num_episodes);
            if let Some(p) = raw.take_parsed("env.FAIL_PROBABILITY")? {
                config.fail_probability = p;
            }
            config.mode = match raw.take("env.MODE").as_deref() {
                None | Some("abrupt") => BdclMode::Abrupt,
                Some("gradual") => BdclMode::Gradual,
                Some(other) => {
                    return Err(MdpError::Invalid(format!(
                        "env.MODE: expected abrupt or gradual, got '{other}'"
                    )))
                }
            };
            if let Some(sp) = raw.take_parsed("env.SWAP_PERIOD")? {
                config.swap_period = sp;
            }
            if let Some(seed) = raw.take_parsed("env.SEED")? {
                config.seed = seed;
            }
            if let Some(r) = raw.take_parsed("env.SINK_REWARD")? {
                config.sink_reward = r;
            }
            Ok(EnvSpec::Bdcl(config))
        }
        other => Err(MdpError::Invalid(format!(
            "env.KIND: expected randommdp or bdcl, got '{other}'"
        ))),
    }
}

fn parse_learners(
    raw: &mut RawConfig,
    params: &mut LearnerParams,
) -> Result<Vec<LearnerCombo>, MdpError> {
    let base = raw.take("learner.BASE").unwrap_or_else(|| "restartq".into());
    let partial = raw.take_bool("learner.PARTIAL_RESTART_ENABLED")?.unwrap_or(false);
    let adaptive = raw
        .take_bool("learner.ADAPTIVE_RESTART_ENABLED")?
        .unwrap_or(false);
    let selective = raw
        .take_bool("learner.SELECTIVE_RESTART_ENABLED")?
        .unwrap_or(false);
    params.adaptive_window = match raw.take("learner.ADAPTIVE_WINDOW").as_deref() {
        None | Some("freeze") => WindowPolicy::FreezeFirst,
        Some("track") => WindowPolicy::Track,
        Some(other) => {
            return Err(MdpError::Invalid(format!(
                "learner.ADAPTIVE_WINDOW: expected freeze or track, got '{other}'"
            )))
        }
    };
    match raw.take("run.LEARNERS") {
        Some(list) => {
            let mut combos = Vec::new();
            for id in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                let combo = LearnerCombo::parse(id)?;
                if !combos.contains(&combo) {
                    combos.push(combo);
                }
            }
            if combos.is_empty() {
                return Err(MdpError::Invalid("run.LEARNERS is empty".into()));
            }
            Ok(combos)
        }
        None => Ok(vec![combo_from_flags(&base, partial, adaptive, selective)?]),
    }
}

/// Parse a config file's text into a runnable experiment.
pub fn parse_experiment(text: &str) -> Result<ExperimentConfig, MdpError> {
    let mut raw = RawConfig::parse(text)?;
    let env = parse_env(&mut raw)?;

    let mut params = LearnerParams::default();
    match raw.take("learner.NUM_EPOCHS") {
        None => {}
        Some(v) if v == "auto" => params.num_epochs = None,
        Some(v) => {
            let d: usize = v.parse().map_err(|_| {
                MdpError::Invalid(format!(
                    "learner.NUM_EPOCHS: expected a count or 'auto', got '{v}'"
                ))
            })?;
            params.num_epochs = Some(d);
        }
    }
    if let Some(delta) = raw.take_parsed("learner.DELTA")? {
        params.delta = delta;
    }
    if let Some(b) = raw.take_bool("learner.B_DELTA_ENABLED")? {
        params.b_delta_enabled = b;
    }
    if let Some(j) = raw.take_parsed("learner.ENSEMBLES")? {
        params.ensembles = j;
    }
    if let Some(k) = raw.take_parsed("learner.KAPPA")? {
        params.kappa = k;
    }
    if let Some(n0) = raw.take_parsed("learner.N0")? {
        params.n0 = n0;
    }
    if let Some(m) = raw.take_parsed("learner.BUDGET_MULTIPLIER")? {
        params.budget_multiplier = m;
    }
    if let Some(t) = raw.take_parsed("learner.SOFTMAX_TEMPERATURE")? {
        params.softmax_temperature = t;
    }
    params.agent_seed = raw.take_parsed("learner.SEED")?;

    let learners = parse_learners(&mut raw, &mut params)?;

    let explicit_trials: Option<usize> = raw.take_parsed("run.TRIALS")?;
    let base_seed: u64 = raw.take_parsed("run.SEED")?.unwrap_or(1);
    let seeds = match raw.take("run.SEEDS") {
        Some(list) => {
            let mut seeds = Vec::new();
            for part in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                seeds.push(part.parse::<u64>().map_err(|_| {
                    MdpError::Invalid(format!("run.SEEDS: cannot parse '{part}'"))
                })?);
            }
            seeds
        }
        None => {
            let base = params.agent_seed.unwrap_or(base_seed);
            (0..explicit_trials.unwrap_or(5) as u32)
                .map(|t| crate::rng::trial_seed(base, t))
                .collect()
        }
    };
    let num_trials = explicit_trials.unwrap_or(seeds.len());

    let out_dir = PathBuf::from(raw.take("run.OUT").unwrap_or_else(|| "out".into()));
    let regret_mode = match raw.take("run.REGRET").as_deref() {
        None | Some("exact") => RegretMode::Exact,
        Some("empirical") => RegretMode::Empirical,
        Some(other) => {
            return Err(MdpError::Invalid(format!(
                "run.REGRET: expected exact or empirical, got '{other}'"
            )))
        }
    };

    raw.finish()?;

    let config = ExperimentConfig {
        env,
        learners,
        params,
        num_trials,
        seeds,
        out_dir,
        regret_mode,
    };
    config.validate()?;
    Ok(config)
}

/// Load and parse a config file.
pub fn load_experiment(path: &Path) -> Result<ExperimentConfig, MdpError> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        MdpError::Invalid(format!("cannot read config {}: {e}", path.display()))
    })?;
    parse_experiment(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_bdcl_config_fills_paper_defaults() {
        let config = parse_experiment("env.KIND: bdcl\n").unwrap();
        let EnvSpec::Bdcl(env) = &config.env else {
            panic!("expected bdcl");
        };
        assert_eq!(env.horizon, 5);
        assert_eq!(env.num_actions, 5);
        assert_eq!(env.num_episodes, 20_000);
        assert_eq!(env.swap_period, 1001);
        assert_eq!(env.fail_probability, 0.02);
        assert_eq!(config.num_trials, 5);
        assert_eq!(config.seeds, vec![1, 2, 3, 4, 5]);
        assert_eq!(config.learners, vec![LearnerCombo::RestartQ]);
        assert_eq!(config.params.delta, 2.0);
        assert_eq!(config.params.ensembles, 20);
        assert_eq!(config.params.n0, 0.25);
        assert!(matches!(config.regret_mode, RegretMode::Exact));
    }

    #[test]
    fn randommdp_defaults_match_the_reference_protocol() {
        let config = parse_experiment("env.KIND = randommdp\n").unwrap();
        let EnvSpec::RandomMdp(env) = &config.env else {
            panic!("expected randommdp");
        };
        assert_eq!(
            (env.num_states, env.num_actions, env.horizon),
            (5, 5, 5)
        );
        assert_eq!(env.num_episodes, 10_000);
        assert_eq!(env.total_delta_r, 5.0);
        assert_eq!(env.total_delta_p, 10.0);
        assert_eq!(env.delta_r_abruptness, 0.999);
        assert_eq!(env.delta_p_abruptness, 0.5);
        assert_eq!(env.fail_probability, 0.05);
        assert_eq!(env.reward_sparsity, 0.8);
    }

    #[test]
    fn comments_blank_lines_and_both_separators_parse() {
        let text = "\n# lineup\nenv.KIND: bdcl\nenv.H = 4   # short corridor\n\nrun.TRIALS: 2\nrun.SEED = 7\n";
        let config = parse_experiment(text).unwrap();
        assert_eq!(config.env.horizon(), 4);
        assert_eq!(config.num_trials, 2);
        assert_eq!(config.seeds, vec![7, 8]);
    }

    #[test]
    fn learner_list_overrides_flags() {
        let text = "env.KIND: bdcl\nrun.LEARNERS: restartq, adaparrestartq, optimal\n";
        let config = parse_experiment(text).unwrap();
        assert_eq!(
            config.learners,
            vec![
                LearnerCombo::RestartQ,
                LearnerCombo::AdaParRestartQ,
                LearnerCombo::Optimal
            ]
        );
    }

    #[test]
    fn restart_flags_select_the_combined_learner() {
        let text = "env.KIND: bdcl\nlearner.PARTIAL_RESTART_ENABLED: true\nlearner.ADAPTIVE_RESTART_ENABLED: true\n";
        let config = parse_experiment(text).unwrap();
        assert_eq!(config.learners, vec![LearnerCombo::AdaParRestartQ]);

        let text = "env.KIND: bdcl\nlearner.BASE: randomizedq\nlearner.SELECTIVE_RESTART_ENABLED: true\n";
        let config = parse_experiment(text).unwrap();
        assert_eq!(config.learners, vec![LearnerCombo::SelectiveRandomizedQ]);
    }

    #[test]
    fn invalid_pairings_are_rejected() {
        assert!(combo_from_flags("randomizedq", true, false, false).is_err());
        assert!(combo_from_flags("randomizedq", false, true, false).is_err());
        assert!(combo_from_flags("restartq", true, false, true).is_err());
        assert!(combo_from_flags("gridq", false, false, false).is_err());
        assert_eq!(
            combo_from_flags("restartq", false, false, true).unwrap(),
            LearnerCombo::SelectiveRestartQ
        );
    }

    #[test]
    fn explicit_seed_list_sets_the_trial_count() {
        let text = "env.KIND: bdcl\nrun.SEEDS: 11, 22, 33\n";
        let config = parse_experiment(text).unwrap();
        assert_eq!(config.num_trials, 3);
        assert_eq!(config.seeds, vec![11, 22, 33]);
    }

    #[test]
    fn unknown_keys_duplicates_and_bad_values_fail_loudly() {
        let unknown = parse_experiment("env.KIND: bdcl\nenv.WIDTH: 3\n");
        assert!(unknown.unwrap_err().to_string().contains("env.WIDTH"));

        let duplicate = parse_experiment("env.KIND: bdcl\nenv.H: 3\nenv.H: 4\n");
        assert!(duplicate.unwrap_err().to_string().contains("duplicate"));

        let bad = parse_experiment("env.KIND: bdcl\nrun.TRIALS: soon\n");
        assert!(bad.unwrap_err().to_string().contains("run.TRIALS"));

        let missing = parse_experiment("run.TRIALS: 2\n");
        assert!(missing.unwrap_err().to_string().contains("env.KIND"));

        let both = parse_experiment("env.KIND: bdcl\nenv.EPISODES: 10\nenv.TOTAL_STEPS: 50\n");
        assert!(both.unwrap_err().to_string().contains("not both"));
    }

    #[test]
    fn episode_and_step_counts_are_interchangeable() {
        let by_episodes = parse_experiment("env.KIND: bdcl\nenv.EPISODES: 123\n").unwrap();
        assert_eq!(by_episodes.env.num_episodes(), 123);

        let by_steps = parse_experiment("env.KIND: bdcl\nenv.H: 4\nenv.TOTAL_STEPS: 444\n").unwrap();
        assert_eq!(by_steps.env.num_episodes(), 111);

        let ragged = parse_experiment("env.KIND: bdcl\nenv.H: 4\nenv.TOTAL_STEPS: 446\n");
        assert!(ragged.is_err());
    }

    #[test]
    fn epoch_knob_accepts_auto_and_counts() {
        let auto = parse_experiment("env.KIND: bdcl\nlearner.NUM_EPOCHS: auto\n").unwrap();
        assert_eq!(auto.params.num_epochs, None);

        let fixed = parse_experiment("env.KIND: bdcl\nlearner.NUM_EPOCHS: 24\n").unwrap();
        assert_eq!(fixed.params.num_epochs, Some(24));

        let zero = parse_experiment("env.KIND: bdcl\nlearner.NUM_EPOCHS: 0\n");
        assert!(zero.is_err());
    }

    #[test]
    fn overrides_rebuild_seeds_and_redirect_output() {
        let mut config = parse_experiment("env.KIND: bdcl\n").unwrap();
        assert_eq!(config.seeds, vec![1, 2, 3, 4, 5]);

        config
            .apply_overrides(&CliOverrides {
                out_dir: Some(PathBuf::from("elsewhere")),
                trials: Some(2),
                seed: Some(40),
                regret_mode: Some(RegretMode::Empirical),
            })
            .unwrap();
        assert_eq!(config.out_dir, PathBuf::from("elsewhere"));
        assert_eq!(config.num_trials, 2);
        assert_eq!(config.seeds, vec![40, 41]);
        assert_eq!(config.regret_mode, RegretMode::Empirical);

        let mut trimmed = parse_experiment("env.KIND: bdcl\n").unwrap();
        trimmed
            .apply_overrides(&CliOverrides {
                trials: Some(3),
                ..CliOverrides::default()
            })
            .unwrap();
        assert_eq!(trimmed.seeds, vec![1, 2, 3]);

        let mut untouched = parse_experiment("env.KIND: bdcl\n").unwrap();
        untouched.apply_overrides(&CliOverrides::default()).unwrap();
        assert_eq!(untouched.seeds, vec![1, 2, 3, 4, 5]);

        let mut zeroed = parse_experiment("env.KIND: bdcl\n").unwrap();
        let err = zeroed.apply_overrides(&CliOverrides {
            trials: Some(0),
            ..CliOverrides::default()
        });
        assert!(err.is_err());
    }
}
