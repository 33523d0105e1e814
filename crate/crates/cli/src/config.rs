//! Experiment configuration files.
//!
//! Configs are TOML. Top-level scalars come first, then one table per
//! component, then `[[analysis]]` entries:
//!
//! ```toml
//! mode = "quench"
//! probes = ["EA-U1", "CV"]
//! region = "third"
//!
//! [hamiltonian]
//! L = 12
//! gamma = 0.5
//!
//! [initial]
//! pattern = "ferromagnetic"
//! tilt_angle_pi = 0.2
//!
//! [time]
//! t_max = 20.0
//! dt = 0.05
//!
//! [[analysis]]
//! kind = "peak"
//! ```

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::path::{Path, PathBuf};

use easym::circuit::CircuitConfig;
use easym::hamiltonian::HamiltonianParams;
use easym::{Pattern, Probe, ProductStateSpec, Region, Symmetry};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Quench,
    Circuit,
    GroundState,
    Analyze,
}

/// Probe names as written in configs and output file names.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ProbeName {
    #[serde(rename = "EA-U1")]
    EaU1,
    #[serde(rename = "EA-Z2")]
    EaZ2,
    #[serde(rename = "CV")]
    Cv,
    #[serde(rename = "Qmean")]
    Qmean,
    #[serde(rename = "PQ")]
    Pq,
    #[serde(rename = "EE")]
    Ee,
    #[serde(rename = "EEQ")]
    Eeq,
}

impl ProbeName {
    pub fn as_str(self) -> &'static str {
        match self {
            ProbeName::EaU1 => "EA-U1",
            ProbeName::EaZ2 => "EA-Z2",
            ProbeName::Cv => "CV",
            ProbeName::Qmean => "Qmean",
            ProbeName::Pq => "PQ",
            ProbeName::Ee => "EE",
            ProbeName::Eeq => "EEQ",
        }
    }

    pub fn to_probe(self, region: &Region) -> Probe {
        match self {
            ProbeName::EaU1 => Probe::Asymmetry { region: region.clone(), symmetry: Symmetry::U1 },
            ProbeName::EaZ2 => Probe::Asymmetry { region: region.clone(), symmetry: Symmetry::Z2 },
            ProbeName::Cv => Probe::ChargeVariance,
            ProbeName::Qmean => Probe::ChargeMean,
            ProbeName::Pq => Probe::ChargeDistribution,
            ProbeName::Ee => Probe::Entropy { region: region.clone() },
            ProbeName::Eeq => Probe::DephasedEntropy { region: region.clone(), symmetry: Symmetry::U1 },
        }
    }
}

impl fmt::Display for ProbeName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Backend {
    /// Spectral up to 12 sites, Krylov above.
    #[default]
    Auto,
    Spectral,
    Krylov,
}

/// `"third"`, `"quarter"`, or an explicit site list.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RegionSpec {
    Shorthand(RegionShorthand),
    Sites(Vec<usize>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegionShorthand {
    Third,
    Quarter,
}

impl RegionSpec {
    /// Resolves against a chain of `num_sites`. Shorthands take `⌊L/3⌋` or
    /// `⌊L/4⌋` contiguous sites starting at site 0, or centred on the wall
    /// for domain-wall states.
    pub fn resolve(&self, num_sites: usize, pattern: Option<Pattern>) -> Result<Region, CliError> {
        let region = match self {
            RegionSpec::Sites(s) => Region::new(s.clone(), num_sites),
            RegionSpec::Shorthand(sh) => {
                let len = match sh {
                    RegionShorthand::Third => num_sites / 3,
                    RegionShorthand::Quarter => num_sites / 4,
                };
                if len == 0 {
                    return Err(CliError::Config(format!(
                        "region shorthand {sh:?} is empty for L = {num_sites}"
                    )));
                }
                let start = match pattern {
                    Some(Pattern::DomainWall) => num_sites / 2 - len / 2,
                    _ => 0,
                };
                Region::contiguous(start, len, num_sites)
            }
        };
        region.map_err(CliError::from_core)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HamiltonianSection {
    #[serde(rename = "L")]
    pub num_sites: usize,
    pub gamma: f64,
    #[serde(default = "default_delta1")]
    pub delta1: f64,
    #[serde(default)]
    pub delta2: f64,
    #[serde(default = "default_true")]
    pub periodic: bool,
    #[serde(default = "default_one")]
    pub nnn_prefactor: f64,
}

impl HamiltonianSection {
    pub fn params(&self) -> HamiltonianParams {
        HamiltonianParams {
            num_sites: self.num_sites,
            gamma: self.gamma,
            delta1: self.delta1,
            delta2: self.delta2,
            periodic: self.periodic,
            nnn_prefactor: self.nnn_prefactor,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitSection {
    #[serde(rename = "L")]
    pub num_sites: usize,
    pub p_haar: f64,
    pub depth_units: usize,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "default_realizations")]
    pub n_realizations: usize,
}

impl CircuitSection {
    pub fn config(&self) -> CircuitConfig {
        CircuitConfig {
            num_sites: self.num_sites,
            p_haar: self.p_haar,
            depth_units: self.depth_units,
            master_seed: self.master_seed,
            n_realizations: self.n_realizations,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PatternName {
    #[serde(alias = "ferro")]
    Ferromagnetic,
    #[serde(alias = "antiferro")]
    Antiferromagnetic,
    #[serde(alias = "domainwall")]
    DomainWall,
}

impl From<PatternName> for Pattern {
    fn from(p: PatternName) -> Self {
        match p {
            PatternName::Ferromagnetic => Pattern::Ferromagnetic,
            PatternName::Antiferromagnetic => Pattern::Antiferromagnetic,
            PatternName::DomainWall => Pattern::DomainWall,
        }
    }
}

/// Initial product state. The tilt is given either in radians
/// (`tilt_angle`) or in units of π (`tilt_angle_pi`); omitting both means no
/// tilt.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSection {
    pub pattern: PatternName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tilt_angle: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tilt_angle_pi: Option<f64>,
}

impl InitialSection {
    pub fn tilt(&self) -> Result<f64, CliError> {
        let theta = match (self.tilt_angle, self.tilt_angle_pi) {
            (Some(_), Some(_)) => {
                return Err(CliError::Config(
                    "give either initial.tilt_angle or initial.tilt_angle_pi, not both".into(),
                ))
            }
            (Some(t), None) => t,
            (None, Some(t)) => t * PI,
            (None, None) => 0.0,
        };
        if !(0.0..=FRAC_PI_2 + 1e-12).contains(&theta) {
            return Err(CliError::Config(format!("tilt angle {theta} is outside [0, pi/2]")));
        }
        Ok(theta.min(FRAC_PI_2))
    }

    pub fn spec(&self) -> Result<ProductStateSpec, CliError> {
        Ok(ProductStateSpec::new(self.pattern.into(), self.tilt()?))
    }

    pub fn with_tilt(&self, theta: Tilt) -> InitialSection {
        let (tilt_angle, tilt_angle_pi) = match theta {
            Tilt::Radians(t) => (Some(t), None),
            Tilt::Pi(t) => (None, Some(t)),
        };
        InitialSection { pattern: self.pattern, tilt_angle, tilt_angle_pi }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Tilt {
    Radians(f64),
    Pi(f64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSection {
    pub t_max: f64,
    pub dt: f64,
    /// Extra sampling window `[t1, t2]` appended to the uniform grid.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub late_window: Option<[f64; 2]>,
    #[serde(default = "default_late_samples")]
    pub late_samples: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepParameter {
    Gamma,
    PHaar,
    #[serde(rename = "L")]
    NumSites,
    TiltAnglePi,
}

impl SweepParameter {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepParameter::Gamma => "gamma",
            SweepParameter::PHaar => "p-haar",
            SweepParameter::NumSites => "L",
            SweepParameter::TiltAnglePi => "tilt-angle-pi",
        }
    }
}

/// Repeats the experiment once per value of one parameter.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
}

/// Input series for `mode = "analyze"`: CSV files as written by `easym run`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputSection {
    pub series: PathBuf,
    /// Second series for crossing detection (the more tilted one).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partner: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum AnalysisRequest {
    Peak {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        probe: Option<ProbeName>,
    },
    LateAverage {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        probe: Option<ProbeName>,
        /// Defaults to `time.late_window`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        window: Option<[f64; 2]>,
    },
    /// Compares against a second run whose initial tilt is
    /// `partner_tilt_angle[_pi]`.
    Crossing {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        probe: Option<ProbeName>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        partner_tilt_angle: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        partner_tilt_angle_pi: Option<f64>,
        #[serde(default = "default_persistence")]
        min_persistence: usize,
    },
    /// Without a horizon, uses the peak time of the untilted run with the
    /// same Hamiltonian, capped at 10.
    Classify {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        probe: Option<ProbeName>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        horizon: Option<f64>,
    },
    /// Fits the probe peak against the swept parameter, or explicit points.
    Powerlaw {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        probe: Option<ProbeName>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        x: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        y: Option<Vec<f64>>,
    },
    /// Linear fit of peak / |region| against 1/L over an `L` sweep, or
    /// explicit points.
    FiniteSize {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        probe: Option<ProbeName>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        x: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        y: Option<Vec<f64>>,
    },
    /// Largest relative deviation of the simulated charge variance from the
    /// second-order short-time expansion for `t ≤ t_max`.
    CvOracle {
        #[serde(default = "default_cv_window")]
        t_max: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub mode: Mode,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub probes: Vec<ProbeName>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<RegionSpec>,
    #[serde(default)]
    pub backend: Backend,
    /// Free-form note carried into the summary.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hamiltonian: Option<HamiltonianSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub circuit: Option<CircuitSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<InitialSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time: Option<TimeSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<InputSection>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub analysis: Vec<AnalysisRequest>,
}

fn default_delta1() -> f64 {
    0.4
}
fn default_true() -> bool {
    true
}
fn default_one() -> f64 {
    1.0
}
fn default_realizations() -> usize {
    200
}
fn default_late_samples() -> usize {
    2000
}
fn default_persistence() -> usize {
    easym::analysis::DEFAULT_MIN_PERSISTENCE
}
fn default_cv_window() -> f64 {
    0.3
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| CliError::Config(e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::from_toml(&text)?;
        if let (Some(input), Some(dir)) = (cfg.input.as_mut(), path.parent()) {
            input.series = dir.join(&input.series);
            if let Some(p) = input.partner.as_mut() {
                *p = dir.join(&*p);
            }
        }
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configs always serialize")
    }

    /// Number of sites of the simulated chain, if the mode simulates one.
    pub fn num_sites(&self) -> Option<usize> {
        match self.mode {
            Mode::Quench | Mode::GroundState => self.hamiltonian.as_ref().map(|h| h.num_sites),
            Mode::Circuit => self.circuit.as_ref().map(|c| c.num_sites),
            Mode::Analyze => None,
        }
    }

    /// The sweep point values, or a single `None` without a sweep.
    pub fn sweep_points(&self) -> Vec<Option<f64>> {
        match &self.sweep {
            Some(s) => s.values.iter().copied().map(Some).collect(),
            None => vec![None],
        }
    }

    /// A copy with the sweep parameter set to `value` and the sweep removed.
    pub fn at_sweep_point(&self, value: f64) -> Result<ExperimentConfig, CliError> {
        let mut cfg = self.clone();
        let Some(sweep) = cfg.sweep.take() else {
            return Ok(cfg);
        };
        let missing = |what: &str| CliError::Config(format!("sweep over {} needs a [{what}] table", sweep.parameter.as_str()));
        match sweep.parameter {
            SweepParameter::Gamma => {
                cfg.hamiltonian.as_mut().ok_or_else(|| missing("hamiltonian"))?.gamma = value;
            }
            SweepParameter::PHaar => {
                cfg.circuit.as_mut().ok_or_else(|| missing("circuit"))?.p_haar = value;
            }
            SweepParameter::NumSites => {
                if value < 0.0 || value.fract() != 0.0 {
                    return Err(CliError::Config(format!("swept L = {value} is not a whole number")));
                }
                let l = value as usize;
                match cfg.mode {
                    Mode::Circuit => cfg.circuit.as_mut().ok_or_else(|| missing("circuit"))?.num_sites = l,
                    _ => cfg.hamiltonian.as_mut().ok_or_else(|| missing("hamiltonian"))?.num_sites = l,
                }
            }
            SweepParameter::TiltAnglePi => {
                let init = cfg.initial.as_mut().ok_or_else(|| missing("initial"))?;
                *init = init.with_tilt(Tilt::Pi(value));
            }
        }
        Ok(cfg)
    }

    /// Checks everything that can be checked without simulating.
    pub fn validate(&self) -> Result<(), CliError> {
        let need = |present: bool, what: &str| {
            if present {
                Ok(())
            } else {
                Err(CliError::Config(format!("mode {:?} requires {what}", self.mode)))
            }
        };
        match self.mode {
            Mode::Quench | Mode::GroundState | Mode::Circuit => {
                need(!self.probes.is_empty(), "a nonempty probes list")?;
                need(self.region.is_some() || !self.probes.iter().any(|p| needs_region(*p)), "a region")?;
                if self.mode == Mode::Circuit {
                    need(self.circuit.is_some(), "a [circuit] table")?;
                    if self.probes.contains(&ProbeName::Pq) {
                        return Err(CliError::Config(
                            "probe PQ is a distribution and cannot be ensemble averaged in circuit mode".into(),
                        ));
                    }
                } else {
                    need(self.hamiltonian.is_some(), "a [hamiltonian] table")?;
                }
                if self.mode != Mode::GroundState {
                    need(self.initial.is_some(), "an [initial] table")?;
                }
                if self.mode == Mode::Quench {
                    need(self.time.is_some(), "a [time] table")?;
                }
            }
            Mode::Analyze => {
                need(self.input.is_some(), "an [input] table")?;
                need(!self.analysis.is_empty(), "at least one [[analysis]] request")?;
                if self.sweep.is_some() {
                    return Err(CliError::Config("sweeps are not available in analyze mode".into()));
                }
            }
        }
        if let Some(s) = &self.sweep {
            if s.values.is_empty() {
                return Err(CliError::Config("sweep.values is empty".into()));
            }
        }
        for value in self.sweep_points() {
            let cfg = match value {
                Some(v) => self.at_sweep_point(v)?,
                None => self.clone(),
            };
            cfg.validate_point(self.sweep.as_ref())?;
        }
        Ok(())
    }

    fn validate_point(&self, sweep: Option<&SweepSection>) -> Result<(), CliError> {
        if let (Mode::Quench | Mode::GroundState, Some(h)) = (self.mode, &self.hamiltonian) {
            h.params().validate().map_err(CliError::from_core)?;
        }
        if let (Mode::Circuit, Some(c)) = (self.mode, &self.circuit) {
            c.config().validate().map_err(CliError::from_core)?;
            if c.n_realizations < 2 {
                return Err(CliError::Config("circuit.n_realizations must be at least 2".into()));
            }
        }
        let init = match &self.initial {
            Some(i) => Some(i.spec()?),
            None => None,
        };
        if let (Some(l), Some(r)) = (self.num_sites(), &self.region) {
            r.resolve(l, init.map(|s| s.pattern))?;
            if let Some(s) = init {
                easym::state::build_initial_state(&s, l).map_err(CliError::from_core)?;
            }
        }
        if let Some(t) = &self.time {
            if !(t.dt > 0.0) || !(t.t_max >= 0.0) {
                return Err(CliError::Config(format!(
                    "time grid needs dt > 0 and t_max >= 0, got dt = {}, t_max = {}",
                    t.dt, t.t_max
                )));
            }
            if let Some([a, b]) = t.late_window {
                if !(b > a) || a < 0.0 || t.late_samples < 2 {
                    return Err(CliError::Config(format!(
                        "late window [{a}, {b}] with {} samples is invalid",
                        t.late_samples
                    )));
                }
            }
        }
        for req in &self.analysis {
            self.validate_request(req, sweep)?;
        }
        Ok(())
    }

    fn validate_request(&self, req: &AnalysisRequest, sweep: Option<&SweepSection>) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Config(msg));
        let probe_ok = |p: &Option<ProbeName>| -> Result<(), CliError> {
            match p {
                Some(ProbeName::Pq) => bad("analysis cannot target the PQ distribution probe".into()),
                Some(p) if self.mode != Mode::Analyze && !self.probes.contains(p) => {
                    bad(format!("analysis targets probe {p}, which is not in probes"))
                }
                _ => Ok(()),
            }
        };
        match req {
            AnalysisRequest::Peak { probe } => probe_ok(probe),
            AnalysisRequest::LateAverage { probe, window } => {
                probe_ok(probe)?;
                let w = window.or(self.time.as_ref().and_then(|t| t.late_window));
                match w {
                    None => bad("late-average needs a window or time.late_window".into()),
                    Some([a, b]) if !(b > a) => bad(format!("late-average window [{a}, {b}] is empty")),
                    _ => Ok(()),
                }
            }
            AnalysisRequest::Crossing {
                probe,
                partner_tilt_angle,
                partner_tilt_angle_pi,
                ..
            } => {
                probe_ok(probe)?;
                if self.mode == Mode::Analyze {
                    return match self.input.as_ref().and_then(|i| i.partner.as_ref()) {
                        Some(_) => Ok(()),
                        None => bad("crossing in analyze mode needs input.partner".into()),
                    };
                }
                if self.mode == Mode::GroundState {
                    return bad("crossing is not available in ground-state mode".into());
                }
                let init = self.initial.as_ref().expect("checked above");
                let partner = partner_initial(init, *partner_tilt_angle, *partner_tilt_angle_pi)?;
                partner.tilt().map(|_| ())
            }
            AnalysisRequest::Classify { probe, horizon } => {
                probe_ok(probe)?;
                if self.mode == Mode::GroundState {
                    return bad("classify is not available in ground-state mode".into());
                }
                match horizon {
                    Some(h) if !(*h > 0.0) => bad(format!("classify horizon {h} must be positive")),
                    None if self.mode != Mode::Quench => {
                        bad("classify needs an explicit horizon outside quench mode".into())
                    }
                    _ => Ok(()),
                }
            }
            AnalysisRequest::Powerlaw { probe, x, y } | AnalysisRequest::FiniteSize { probe, x, y } => {
                probe_ok(probe)?;
                match (x, y) {
                    (Some(x), Some(y)) if x.len() == y.len() => Ok(()),
                    (Some(_), Some(_)) => bad("explicit x and y must have equal lengths".into()),
                    (None, None) => {
                        let want_l = matches!(req, AnalysisRequest::FiniteSize { .. });
                        match sweep {
                            Some(s) if !want_l || s.parameter == SweepParameter::NumSites => Ok(()),
                            Some(_) => bad("finite-size needs a sweep over L".into()),
                            None if self.mode == Mode::Analyze => {
                                bad("fits in analyze mode need explicit x and y".into())
                            }
                            None => bad("fits need a sweep or explicit x and y".into()),
                        }
                    }
                    _ => bad("give both x and y or neither".into()),
                }
            }
            AnalysisRequest::CvOracle { t_max } => {
                if self.mode != Mode::Quench || !self.probes.contains(&ProbeName::Cv) {
                    return bad("cv-oracle needs a quench with the CV probe".into());
                }
                let h = self.hamiltonian.as_ref().expect("checked above");
                let init = self.initial.as_ref().expect("checked above");
                if h.delta2 != 0.0 || init.pattern != PatternName::Ferromagnetic {
                    return bad("cv-oracle only applies to tilted ferromagnets with delta2 = 0".into());
                }
                if !(*t_max > 0.0) {
                    return bad(format!("cv-oracle t_max {t_max} must be positive"));
                }
                Ok(())
            }
        }
    }
}

fn needs_region(p: ProbeName) -> bool {
    matches!(p, ProbeName::EaU1 | ProbeName::EaZ2 | ProbeName::Ee | ProbeName::Eeq)
}

pub(crate) fn partner_initial(
    init: &InitialSection,
    radians: Option<f64>,
    pi: Option<f64>,
) -> Result<InitialSection, CliError> {
    match (radians, pi) {
        (Some(t), None) => Ok(init.with_tilt(Tilt::Radians(t))),
        (None, Some(t)) => Ok(init.with_tilt(Tilt::Pi(t))),
        _ => Err(CliError::Config(
            "crossing needs exactly one of partner_tilt_angle or partner_tilt_angle_pi".into(),
        )),
    }
}
