//! Experiment configuration as read from JSON.
//!
//! ```json
//! {
//!   "model": "adversary",
//!   "algorithm": "RLS",
//!   "n": 64,
//!   "L": 1,
//!   "U": "n",
//!   "tau": 1,
//!   "strategy": { "kind": "uniform_random" },
//!   "init": "worst_case",
//!   "trials": 100,
//!   "base_seed": 7,
//!   "targets": [{ "kind": "discrepancy_leq_U" }]
//! }
//! ```
//!
//! Bounds are integers or multiples of `n` written `"n"`, `"2n"` or `"2*n"`.
//! Paths (`instance_file`, `assignment_file`, `script_file`) are resolved
//! relative to the directory of the configuration file.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::dynamics::{AdversaryStrategy, ChangeModel, ChangeSchedule, JobPicker, Script};
use crate::error::{Error, Result};
use crate::model::{Assignment, Instance};
use crate::search::AlgorithmKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Adversary,
    Random,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Adversary => "adversary",
            ModelKind::Random => "random",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitMode {
    /// Every job on M1.
    WorstCase,
    /// Every bit an independent fair coin.
    UniformRandom,
    /// Bits read from `assignment_file`.
    FromFile,
}

/// A processing-time bound: a constant or a multiple of `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    Fixed(u64),
    TimesN(u64),
}

impl Bound {
    pub fn resolve(self, n: usize) -> Result<u64> {
        match self {
            Bound::Fixed(v) => Ok(v),
            Bound::TimesN(k) => k
                .checked_mul(n as u64)
                .ok_or(Error::Overflow("bound multiple of n")),
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Fixed(v) => write!(f, "{v}"),
            Bound::TimesN(1) => f.write_str("n"),
            Bound::TimesN(k) => write!(f, "{k}n"),
        }
    }
}

impl std::str::FromStr for Bound {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if let Ok(v) = t.parse() {
            return Ok(Bound::Fixed(v));
        }
        let head = t
            .strip_suffix('n')
            .ok_or_else(|| Error::Config(format!("bad bound {s:?}")))?;
        let head = head.strip_suffix('*').unwrap_or(head);
        if head.is_empty() {
            return Ok(Bound::TimesN(1));
        }
        head.parse()
            .map(Bound::TimesN)
            .map_err(|_| Error::Config(format!("bad bound {s:?}")))
    }
}

impl Serialize for Bound {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Bound::Fixed(v) => s.serialize_u64(*v),
            other => s.serialize_str(&other.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for Bound {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(u64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(v) => Ok(Bound::Fixed(v)),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Hit predicate evaluated on every visited state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum TargetSpec {
    /// `d(x) <= U`.
    #[serde(rename = "discrepancy_leq_U")]
    DiscrepancyLeqUpper,
    /// `d(x) <= abs`.
    #[serde(rename = "discrepancy_leq_abs")]
    DiscrepancyLeqAbs { abs: u64 },
    /// `d(x) <= c ln n`.
    #[serde(rename = "discrepancy_leq_c_log_n")]
    DiscrepancyLeqCLogN { c: f64 },
    /// `d(x) / f(x) <= c / n`.
    #[serde(rename = "ratio_leq_c_over_n")]
    RatioLeqCOverN { c: f64 },
}

impl TargetSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            TargetSpec::DiscrepancyLeqCLogN { c } | TargetSpec::RatioLeqCOverN { c }
                if !(c > 0.0 && c.is_finite()) =>
            {
                Err(Error::Config(format!("target parameter c must be positive, got {c}")))
            }
            _ => Ok(()),
        }
    }

    pub fn label(&self) -> String {
        match self {
            TargetSpec::DiscrepancyLeqUpper => "discrepancy_leq_U".into(),
            TargetSpec::DiscrepancyLeqAbs { abs } => format!("discrepancy_leq_abs({abs})"),
            TargetSpec::DiscrepancyLeqCLogN { c } => format!("discrepancy_leq_c_log_n({c})"),
            TargetSpec::RatioLeqCOverN { c } => format!("ratio_leq_c_over_n({c})"),
        }
    }

    /// Whether a state with discrepancy `d` and makespan `f` satisfies the
    /// target for `n` jobs and upper bound `upper`.
    #[inline]
    pub fn holds(&self, d: u64, f: u64, n: usize, upper: u64) -> bool {
        match *self {
            TargetSpec::DiscrepancyLeqUpper => d <= upper,
            TargetSpec::DiscrepancyLeqAbs { abs } => d <= abs,
            TargetSpec::DiscrepancyLeqCLogN { c } => d as f64 <= c * (n as f64).ln(),
            TargetSpec::RatioLeqCOverN { c } => d as f64 * n as f64 <= c * f as f64,
        }
    }
}

fn default_trials() -> usize {
    1
}

fn default_targets() -> Vec<TargetSpec> {
    vec![TargetSpec::DiscrepancyLeqUpper]
}

fn default_picker() -> JobPicker {
    JobPicker::UniformRandom
}

fn default_strategy() -> AdversaryStrategy {
    AdversaryStrategy::UniformRandom
}

fn default_init() -> InitMode {
    InitMode::WorstCase
}

/// Everything needed to run a batch of independent trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelKind,
    pub algorithm: AlgorithmKind,
    pub n: usize,
    /// Adversary model only; the random model always uses `L = 1`.
    #[serde(rename = "L", default, skip_serializing_if = "Option::is_none")]
    pub lower: Option<Bound>,
    /// Adversary model only; the random model always uses `U = n`.
    #[serde(rename = "U", default, skip_serializing_if = "Option::is_none")]
    pub upper: Option<Bound>,
    /// Change every `tau` iterations.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<u64>,
    /// A single change at this iteration. Exclusive with `tau`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub one_time_at: Option<u64>,
    #[serde(default = "default_strategy")]
    pub strategy: AdversaryStrategy,
    #[serde(default = "default_picker")]
    pub picker: JobPicker,
    #[serde(default = "default_init")]
    pub init: InitMode,
    /// Random model only; defaults to `4 n^2`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub burn_in_changes_per_job: Option<u64>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub base_seed: u64,
    /// Defaults depend on model and algorithm, see [`ExperimentConfig::effective_max_iters`].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iters: Option<u64>,
    #[serde(default = "default_targets")]
    pub targets: Vec<TargetSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace_every: Option<u64>,
    /// End a trial as soon as every target has been hit once.
    #[serde(default)]
    pub stop_when_all_hit: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instance_file: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub assignment_file: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub script_file: Option<PathBuf>,

    #[serde(skip)]
    pub(crate) fixed_instance: Option<Instance>,
    #[serde(skip)]
    pub(crate) fixed_assignment: Option<Assignment>,
}

impl ExperimentConfig {
    /// A config with defaults for everything but the essentials.
    pub fn new(model: ModelKind, algorithm: AlgorithmKind, n: usize) -> Self {
        Self {
            model,
            algorithm,
            n,
            lower: None,
            upper: None,
            tau: None,
            one_time_at: None,
            strategy: default_strategy(),
            picker: default_picker(),
            init: default_init(),
            burn_in_changes_per_job: None,
            trials: 1,
            base_seed: 0,
            max_iters: None,
            targets: default_targets(),
            trace_every: None,
            stop_when_all_hit: false,
            instance_file: None,
            assignment_file: None,
            script_file: None,
            fixed_instance: None,
            fixed_assignment: None,
        }
    }

    /// Parses JSON text; referenced files are resolved against `base_dir`.
    pub fn from_json(text: &str, base_dir: &Path) -> Result<Self> {
        let mut cfg: Self =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.load_files(base_dir)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = read(path)?;
        Self::from_json(&text, path.parent().unwrap_or(Path::new(".")))
    }

    pub(crate) fn load_files(&mut self, base_dir: &Path) -> Result<()> {
        if let Some(p) = &self.instance_file {
            self.fixed_instance = Some(Instance::from_json(&read(&base_dir.join(p))?)?);
        }
        if let Some(p) = &self.assignment_file {
            self.fixed_assignment = Some(Assignment::from_json(&read(&base_dir.join(p))?)?);
        }
        if let Some(p) = &self.script_file {
            let script = Script::from_json(&read(&base_dir.join(p))?)?;
            self.strategy = AdversaryStrategy::Scripted { script };
        }
        Ok(())
    }

    pub fn with_instance(mut self, instance: Instance) -> Self {
        self.fixed_instance = Some(instance);
        self
    }

    pub fn with_assignment(mut self, assignment: Assignment) -> Self {
        self.fixed_assignment = Some(assignment);
        self.init = InitMode::FromFile;
        self
    }

    pub fn fixed_instance(&self) -> Option<&Instance> {
        self.fixed_instance.as_ref()
    }

    pub fn fixed_assignment(&self) -> Option<&Assignment> {
        self.fixed_assignment.as_ref()
    }

    /// `(L, U)` for this configuration.
    pub fn bounds(&self) -> Result<(u64, u64)> {
        match self.model {
            ModelKind::Random => Ok((1, self.n as u64)),
            ModelKind::Adversary => {
                let lower = self.lower.unwrap_or(Bound::Fixed(1)).resolve(self.n)?;
                let upper = self.upper.unwrap_or(Bound::TimesN(1)).resolve(self.n)?;
                Ok((lower, upper))
            }
        }
    }

    pub fn schedule(&self) -> Result<ChangeSchedule> {
        match (self.tau, self.one_time_at) {
            (Some(_), Some(_)) => Err(Error::Config("set at most one of tau and one_time_at".into())),
            (Some(tau), None) => ChangeSchedule::every(tau),
            (None, Some(at)) => Ok(ChangeSchedule::OneTime { at }),
            (None, None) => Ok(ChangeSchedule::None),
        }
    }

    pub fn change_model(&self) -> ChangeModel {
        match self.model {
            ModelKind::Adversary => ChangeModel::Adversary {
                strategy: self.strategy.clone(),
            },
            ModelKind::Random => ChangeModel::RandomWalk { picker: self.picker },
        }
    }

    pub fn burn_in(&self) -> u64 {
        match self.model {
            ModelKind::Random => self
                .burn_in_changes_per_job
                .unwrap_or_else(|| crate::dynamics::default_burn_in(self.n)),
            ModelKind::Adversary => 0,
        }
    }

    /// Iteration cap: explicit `max_iters`, else `50 n ln n` (adversary, RLS),
    /// `50 n^1.5` (adversary, OEA) or `n^4` (random model).
    pub fn effective_max_iters(&self) -> u64 {
        self.max_iters.unwrap_or_else(|| {
            let n = self.n as f64;
            match (self.model, self.algorithm) {
                (ModelKind::Adversary, AlgorithmKind::Rls) => (50.0 * n * n.ln().max(1.0)).ceil() as u64,
                (ModelKind::Adversary, AlgorithmKind::Oea) => (50.0 * n.powf(1.5)).ceil() as u64,
                (ModelKind::Random, _) => (self.n as u64).saturating_pow(4),
            }
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Config("n must be at least 1".into()));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.model == ModelKind::Random {
            if self.n < 2 {
                return Err(Error::Config("the random model needs n >= 2".into()));
            }
            let n = self.n as u64;
            if self.lower.is_some_and(|b| b.resolve(self.n).ok() != Some(1))
                || self.upper.is_some_and(|b| b.resolve(self.n).ok() != Some(n))
            {
                return Err(Error::Config("the random model fixes L = 1 and U = n".into()));
            }
            if self.script_file.is_some() {
                return Err(Error::Config("scripts only apply to the adversary model".into()));
            }
        }
        let (lower, upper) = self.bounds()?;
        if lower == 0 || lower > upper {
            return Err(Error::Config(format!("need 1 <= L <= U, got L = {lower}, U = {upper}")));
        }
        (self.n as u64)
            .checked_mul(upper)
            .ok_or(Error::Overflow("n * U"))?;
        self.schedule()?;
        if self.trace_every == Some(0) {
            return Err(Error::Config("trace_every must be positive".into()));
        }
        if self.targets.is_empty() {
            return Err(Error::Config("at least one target is required".into()));
        }
        for t in &self.targets {
            t.validate()?;
        }
        if let Some(inst) = &self.fixed_instance {
            if inst.n() != self.n || inst.lower() != lower || inst.upper() != upper {
                return Err(Error::Config(format!(
                    "instance file has n = {}, L = {}, U = {}; config expects n = {}, L = {lower}, U = {upper}",
                    inst.n(),
                    inst.lower(),
                    inst.upper(),
                    self.n
                )));
            }
        }
        match (&self.init, &self.fixed_assignment) {
            (InitMode::FromFile, None) => {
                return Err(Error::Config("init = from_file needs assignment_file".into()))
            }
            (InitMode::FromFile, Some(a)) if a.len() != self.n => {
                return Err(Error::LengthMismatch { expected: self.n, got: a.len() })
            }
            _ => {}
        }
        if let AdversaryStrategy::Scripted { script } = &self.strategy {
            if self.model == ModelKind::Adversary {
                for e in script.entries() {
                    if e.job >= self.n || e.size < lower || e.size > upper {
                        return Err(Error::Config(format!(
                            "script entry {e:?} does not fit n = {}, [{lower}, {upper}]",
                            self.n
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))
}
