use std::time::{SystemTime, UNIX_EPOCH};

use easym::analysis::{
    classify_early_growth, detect_crossing, find_peak, late_time_average, linear_fit_extrapolate,
    power_law_fit, EarlyGrowth,
};
use easym::circuit::ensemble_average;
use easym::evolution::{trajectory, uniform_grid, window_grid, KrylovConfig, ProbeSeries, Propagator, SpectralPropagator};
use easym::hamiltonian::{build_hamiltonian, ground_state, PauliSum};
use easym::observables::{evaluate_probes, ProbeValue};
use easym::oracles::early_time_cv;
use easym::state::build_initial_state;
use easym::{Region, StateVector, TimeSeries};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{
    partner_initial, AnalysisRequest, Backend, ExperimentConfig, InitialSection, Mode, ProbeName,
    SweepParameter,
};
use crate::output::read_series_csv;
use crate::CliError;

/// Largest chain the `auto` backend diagonalizes densely.
const AUTO_SPECTRAL_MAX_SITES: usize = 12;
/// Cap on the default classification horizon.
const CLASSIFY_HORIZON_CAP: f64 = 10.0;

pub const SEED_RULE: &str = "gate (layer, slot) of realization r draws from ChaCha8 seeded with the \
    32 bytes of (master_seed, r, layer, slot) as little-endian u64 words";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Provenance {
    pub version: &'static str,
    pub timestamp_unix: u64,
    pub seed_rule: &'static str,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SeriesValues {
    Scalar { values: Vec<f64>, std_error: Option<Vec<f64>> },
    /// Sector probabilities per time, in ascending charge `−L, −L+2, …, L`.
    Distribution { charges: Vec<i64>, probabilities: Vec<Vec<f64>> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeriesData {
    pub probe: ProbeName,
    pub times: Vec<f64>,
    /// Circuit runs sample whole time units.
    pub integer_times: bool,
    pub values: SeriesValues,
}

impl SeriesData {
    pub fn time_series(&self) -> Option<TimeSeries> {
        match &self.values {
            SeriesValues::Scalar { values, .. } => TimeSeries::new(self.times.clone(), values.clone()).ok(),
            SeriesValues::Distribution { .. } => None,
        }
    }
}

/// One simulated trajectory or ensemble.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunRecord {
    /// Output file stem suffix, e.g. `gamma0.5_partner`; empty for the
    /// plain run.
    pub label: String,
    pub role: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep_value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tilt_angle: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub region: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ground_state: Option<Value>,
    #[serde(skip)]
    pub series: Vec<SeriesData>,
}

impl RunRecord {
    pub fn series(&self, probe: ProbeName) -> Option<&SeriesData> {
        self.series.iter().find(|s| s.probe == probe)
    }

    /// Output file stem of one of this run's series.
    pub fn file_stem(&self, probe: ProbeName) -> String {
        if self.label.is_empty() {
            probe.as_str().to_string()
        } else {
            format!("{}_{}", probe.as_str(), self.label)
        }
    }
}

pub type AnalysisOutput = Value;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResultRecord {
    /// Echo of the config that produced this record, with the seed resolved.
    pub config: ExperimentConfig,
    pub runs: Vec<RunRecord>,
    pub analysis: Vec<AnalysisOutput>,
    pub provenance: Provenance,
}

impl ResultRecord {
    pub fn run(&self, label: &str) -> Option<&RunRecord> {
        self.runs.iter().find(|r| r.label == label)
    }
}

/// Runs the experiment described by `config`. Deterministic given the config
/// (including `circuit.master_seed`) for any rayon thread count; only the
/// provenance timestamp varies between runs.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ResultRecord, CliError> {
    config.validate()?;
    let (runs, analysis) = match config.mode {
        Mode::Analyze => (Vec::new(), analyze_files(config)?),
        _ => simulate(config)?,
    };
    Ok(ResultRecord {
        config: config.clone(),
        runs,
        analysis,
        provenance: Provenance {
            version: env!("CARGO_PKG_VERSION"),
            timestamp_unix: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
            seed_rule: SEED_RULE,
        },
    })
}

fn default_probe(config: &ExperimentConfig, probe: Option<ProbeName>) -> ProbeName {
    probe.unwrap_or_else(|| {
        config
            .probes
            .iter()
            .copied()
            .find(|p| *p != ProbeName::Pq)
            .unwrap_or(ProbeName::EaU1)
    })
}

fn sweep_label(config: &ExperimentConfig, value: Option<f64>) -> String {
    match (&config.sweep, value) {
        (Some(s), Some(v)) => {
            let key = match s.parameter {
                SweepParameter::Gamma => "gamma",
                SweepParameter::PHaar => "p",
                SweepParameter::NumSites => "L",
                SweepParameter::TiltAnglePi => "theta",
            };
            format!("{key}{v}")
        }
        _ => String::new(),
    }
}

fn join_label(base: &str, role: &str) -> String {
    match (base.is_empty(), role) {
        (_, "main") => base.to_string(),
        (true, r) => r.to_string(),
        (false, r) => format!("{base}_{r}"),
    }
}

/// Backend-independent access to "evolve this initial state and probe it".
enum Engine {
    Quench {
        hamiltonian: PauliSum,
        spectral: Option<SpectralPropagator>,
        times: Vec<f64>,
    },
    Circuit,
    GroundState {
        state: StateVector,
        info: Value,
    },
}

struct Point<'a> {
    cfg: ExperimentConfig,
    num_sites: usize,
    region: Option<Region>,
    engine: Engine,
    probes: &'a [ProbeName],
}

impl Point<'_> {
    fn run(&self, init: Option<&InitialSection>, label: String, role: &'static str, sweep_value: Option<f64>) -> Result<RunRecord, CliError> {
        let region = self.region.clone().unwrap_or(Region::all(self.num_sites)?);
        let probes: Vec<_> = self.probes.iter().map(|p| p.to_probe(&region)).collect();
        let spec = init.map(InitialSection::spec).transpose()?;
        let initial = spec.map(|s| build_initial_state(&s, self.num_sites)).transpose()?;
        let (series, ground) = match &self.engine {
            Engine::Quench { hamiltonian, spectral, times } => {
                let prop = match spectral {
                    Some(sp) => Propagator::Spectral(sp),
                    None => Propagator::Krylov { hamiltonian, config: KrylovConfig::default() },
                };
                let out = trajectory(prop, initial.as_ref().expect("validated"), times, &probes)?;
                (self.convert(out, false), None)
            }
            Engine::Circuit => {
                let cc = self.cfg.circuit.as_ref().expect("validated").config();
                let ens = ensemble_average(&cc, initial.as_ref().expect("validated"), &probes)?;
                let series = self
                    .probes
                    .iter()
                    .zip(ens)
                    .map(|(&probe, e)| SeriesData {
                        probe,
                        times: e.times.iter().map(|&t| t as f64).collect(),
                        integer_times: true,
                        values: SeriesValues::Scalar { values: e.mean, std_error: Some(e.std_error) },
                    })
                    .collect();
                (series, None)
            }
            Engine::GroundState { state, info } => {
                let row = evaluate_probes(&probes, state)?;
                let out = probes
                    .iter()
                    .zip(row)
                    .map(|(p, v)| ProbeSeries { probe: p.clone(), times: vec![0.0], values: vec![v] })
                    .collect();
                (self.convert(out, false), Some(info.clone()))
            }
        };
        Ok(RunRecord {
            label,
            role,
            sweep_value,
            tilt_angle: spec.map(|s| s.tilt),
            region: self.region.as_ref().map(|r| r.sites().to_vec()),
            ground_state: ground,
            series,
        })
    }

    fn convert(&self, out: Vec<ProbeSeries>, integer_times: bool) -> Vec<SeriesData> {
        let l = self.num_sites as i64;
        self.probes
            .iter()
            .zip(out)
            .map(|(&probe, s)| {
                let values = if probe == ProbeName::Pq {
                    SeriesValues::Distribution {
                        charges: (0..=l).map(|k| 2 * k - l).collect(),
                        probabilities: s
                            .values
                            .into_iter()
                            .map(|v| match v {
                                ProbeValue::Distribution(p) => p,
                                ProbeValue::Scalar(x) => vec![x],
                            })
                            .collect(),
                    }
                } else {
                    SeriesValues::Scalar {
                        values: s.values.iter().filter_map(ProbeValue::scalar).collect(),
                        std_error: None,
                    }
                };
                SeriesData { probe, times: s.times, integer_times, values }
            })
            .collect()
    }
}

fn time_grid(cfg: &ExperimentConfig) -> Result<Vec<f64>, CliError> {
    let t = cfg.time.as_ref().expect("validated");
    let mut grid = uniform_grid(t.t_max, t.dt)?;
    if let Some([a, b]) = t.late_window {
        let tail = window_grid(a, b, t.late_samples)?;
        let last = *grid.last().expect("nonempty");
        grid.extend(tail.into_iter().filter(|&x| x > last));
        // a window overlapping the uniform grid is merged in sorted order
        grid.sort_by(f64::total_cmp);
        grid.dedup();
    }
    Ok(grid)
}

fn build_point<'a>(cfg: ExperimentConfig, probes: &'a [ProbeName]) -> Result<Point<'a>, CliError> {
    let num_sites = cfg.num_sites().expect("simulation modes have a chain");
    let pattern = cfg.initial.as_ref().map(|i| i.pattern.into());
    let region = cfg.region.as_ref().map(|r| r.resolve(num_sites, pattern)).transpose()?;
    let engine = match cfg.mode {
        Mode::Quench => {
            let hamiltonian = build_hamiltonian(&cfg.hamiltonian.as_ref().expect("validated").params())?;
            let spectral = match cfg.backend {
                Backend::Spectral => true,
                Backend::Krylov => false,
                Backend::Auto => num_sites <= AUTO_SPECTRAL_MAX_SITES,
            };
            let spectral = if spectral { Some(SpectralPropagator::from_pauli_sum(&hamiltonian)?) } else { None };
            Engine::Quench { hamiltonian, spectral, times: time_grid(&cfg)? }
        }
        Mode::Circuit => Engine::Circuit,
        Mode::GroundState => {
            let h = build_hamiltonian(&cfg.hamiltonian.as_ref().expect("validated").params())?;
            let gs = ground_state(&h)?;
            let info = json!({ "energy": gs.energy, "residual": gs.residual, "iterations": gs.iterations });
            Engine::GroundState { state: gs.state, info }
        }
        Mode::Analyze => unreachable!("analyze mode does not simulate"),
    };
    Ok(Point { cfg, num_sites, region, engine, probes })
}

struct PointResult {
    main: RunRecord,
    peaks: Vec<(ProbeName, f64)>,
    region_len: usize,
    num_sites: usize,
}

fn simulate(config: &ExperimentConfig) -> Result<(Vec<RunRecord>, Vec<Value>), CliError> {
    let mut runs = Vec::new();
    let mut analysis = Vec::new();
    let mut points = Vec::new();
    for value in config.sweep_points() {
        let cfg = match value {
            Some(v) => config.at_sweep_point(v)?,
            None => config.clone(),
        };
        let base = sweep_label(config, value);
        let point = build_point(cfg, &config.probes)?;
        let main = point.run(point.cfg.initial.as_ref(), base.clone(), "main", value)?;
        let tag = |v: Value| tag_run(v, &base, value);
        let mut extras = Vec::new();
        for req in &config.analysis {
            match req {
                AnalysisRequest::Peak { probe } => {
                    let p = default_probe(config, *probe);
                    let (t, v) = find_peak(&scalar(&main, p)?)?;
                    analysis.push(tag(json!({ "kind": "peak", "probe": p, "t_max": t, "v_max": v })));
                }
                AnalysisRequest::LateAverage { probe, window } => {
                    let p = default_probe(config, *probe);
                    let [a, b] = window.or(config.time.as_ref().and_then(|t| t.late_window)).expect("validated");
                    let (mean, std) = late_time_average(&scalar(&main, p)?, (a, b))?;
                    analysis.push(tag(json!({ "kind": "late-average", "probe": p, "window": [a, b], "mean": mean, "std": std })));
                }
                AnalysisRequest::Crossing { probe, partner_tilt_angle, partner_tilt_angle_pi, min_persistence } => {
                    let p = default_probe(config, *probe);
                    let init = point.cfg.initial.as_ref().expect("validated");
                    let partner_init = partner_initial(init, *partner_tilt_angle, *partner_tilt_angle_pi)?;
                    let partner = point.run(Some(&partner_init), join_label(&base, "partner"), "partner", value)?;
                    let (t_main, t_partner) = (init.tilt()?, partner_init.tilt()?);
                    if t_main == t_partner {
                        return Err(CliError::Config("crossing partner has the same tilt as the initial state".into()));
                    }
                    let (less, more) = if t_main < t_partner { (&main, &partner) } else { (&partner, &main) };
                    let r = detect_crossing(&scalar(less, p)?, &scalar(more, p)?, *min_persistence)?;
                    analysis.push(tag(json!({
                        "kind": "crossing", "probe": p,
                        "less_tilted": t_main.min(t_partner), "more_tilted": t_main.max(t_partner),
                        "crossed": r.crossed, "t_cross": r.t_cross, "persistence": r.persistence,
                    })));
                    extras.push(partner);
                }
                AnalysisRequest::Classify { probe, horizon } => {
                    let p = default_probe(config, *probe);
                    let horizon = match horizon {
                        Some(h) => *h,
                        None => {
                            let init = point.cfg.initial.as_ref().expect("validated");
                            let reference = point.run(Some(&InitialSection { pattern: init.pattern, tilt_angle: None, tilt_angle_pi: None }), join_label(&base, "untilted"), "untilted", value)?;
                            let (t_peak, _) = find_peak(&scalar(&reference, p)?)?;
                            extras.push(reference);
                            if t_peak > 0.0 { t_peak.min(CLASSIFY_HORIZON_CAP) } else { CLASSIFY_HORIZON_CAP }
                        }
                    };
                    let series = scalar(&main, p)?;
                    let horizon = horizon.min(*series.times().last().expect("nonempty"));
                    let class = classify_early_growth(&series, horizon)?;
                    analysis.push(tag(json!({
                        "kind": "classify", "probe": p, "horizon": horizon,
                        "class": match class { EarlyGrowth::Exceeds => "exceeds", EarlyGrowth::StaysBelow => "stays-below" },
                    })));
                }
                AnalysisRequest::CvOracle { t_max } => {
                    let h = point.cfg.hamiltonian.as_ref().expect("validated");
                    let theta = point.cfg.initial.as_ref().expect("validated").tilt()?;
                    let cv = scalar(&main, ProbeName::Cv)?;
                    let mut worst = (0.0f64, 0.0f64);
                    for (&t, &v) in cv.times().iter().zip(cv.values()) {
                        if t > *t_max {
                            break;
                        }
                        let oracle = early_time_cv(theta, h.gamma, h.delta1, h.num_sites, t);
                        let rel = if oracle != 0.0 { ((v - oracle) / oracle).abs() } else { (v - oracle).abs() };
                        if rel > worst.0 {
                            worst = (rel, t);
                        }
                    }
                    analysis.push(tag(json!({
                        "kind": "cv-oracle", "t_max": t_max,
                        "max_relative_deviation": worst.0, "at_time": worst.1,
                    })));
                }
                AnalysisRequest::Powerlaw { .. } | AnalysisRequest::FiniteSize { .. } => {}
            }
        }
        let peaks = config
            .probes
            .iter()
            .filter_map(|&p| Some((p, find_peak(&main.series(p)?.time_series()?).ok()?.1)))
            .collect();
        points.push(PointResult {
            peaks,
            region_len: point.region.as_ref().map_or(point.num_sites, Region::len),
            num_sites: point.num_sites,
            main: main.clone(),
        });
        runs.push(main);
        runs.extend(extras);
    }
    for req in &config.analysis {
        match req {
            AnalysisRequest::Powerlaw { probe, x, y } => {
                let p = default_probe(config, *probe);
                let (xs, ys) = match (x, y) {
                    (Some(x), Some(y)) => (x.clone(), y.clone()),
                    _ => (sweep_values(config), point_peaks(&points, p, |_, v| v)?),
                };
                let (a, b) = power_law_fit(&xs, &ys)?;
                analysis.push(json!({ "kind": "powerlaw", "probe": p, "x": xs, "y": ys, "a": a, "b": b }));
            }
            AnalysisRequest::FiniteSize { probe, x, y } => {
                let p = default_probe(config, *probe);
                let (xs, ys) = match (x, y) {
                    (Some(x), Some(y)) => (x.clone(), y.clone()),
                    _ => (
                        points.iter().map(|pt| 1.0 / pt.num_sites as f64).collect(),
                        point_peaks(&points, p, |pt, v| v / pt.region_len as f64)?,
                    ),
                };
                let (slope, intercept) = linear_fit_extrapolate(&xs, &ys)?;
                analysis.push(json!({
                    "kind": "finite-size", "probe": p, "x": xs, "y": ys, "slope": slope, "intercept": intercept,
                }));
            }
            _ => {}
        }
    }
    Ok((runs, analysis))
}

fn tag_run(mut v: Value, label: &str, sweep_value: Option<f64>) -> Value {
    if let Value::Object(m) = &mut v {
        m.insert("run".into(), json!(label));
        if let Some(s) = sweep_value {
            m.insert("sweep_value".into(), json!(s));
        }
    }
    v
}

fn sweep_values(config: &ExperimentConfig) -> Vec<f64> {
    config.sweep.as_ref().map(|s| s.values.clone()).unwrap_or_default()
}

fn point_peaks(points: &[PointResult], p: ProbeName, f: impl Fn(&PointResult, f64) -> f64) -> Result<Vec<f64>, CliError> {
    points
        .iter()
        .map(|pt| {
            pt.peaks
                .iter()
                .find(|(q, _)| *q == p)
                .map(|(_, v)| f(pt, *v))
                .ok_or_else(|| CliError::Config(format!("run {:?} has no scalar series for {p}", pt.main.label)))
        })
        .collect()
}

fn scalar(run: &RunRecord, p: ProbeName) -> Result<TimeSeries, CliError> {
    run.series(p)
        .and_then(SeriesData::time_series)
        .ok_or_else(|| CliError::Config(format!("probe {p} has no scalar series to analyse")))
}

fn analyze_files(config: &ExperimentConfig) -> Result<Vec<Value>, CliError> {
    let input = config.input.as_ref().expect("validated");
    let series = read_series_csv(&input.series)?;
    let mut out = Vec::new();
    for req in &config.analysis {
        let v = match req {
            AnalysisRequest::Peak { .. } => {
                let (t, v) = find_peak(&series)?;
                json!({ "kind": "peak", "t_max": t, "v_max": v })
            }
            AnalysisRequest::LateAverage { window, .. } => {
                let [a, b] = window.or(config.time.as_ref().and_then(|t| t.late_window)).expect("validated");
                let (mean, std) = late_time_average(&series, (a, b))?;
                json!({ "kind": "late-average", "window": [a, b], "mean": mean, "std": std })
            }
            AnalysisRequest::Crossing { min_persistence, .. } => {
                let partner = read_series_csv(input.partner.as_ref().expect("validated"))?;
                let r = detect_crossing(&series, &partner, *min_persistence)?;
                json!({ "kind": "crossing", "crossed": r.crossed, "t_cross": r.t_cross, "persistence": r.persistence })
            }
            AnalysisRequest::Classify { horizon, .. } => {
                let h = horizon.expect("validated");
                let class = classify_early_growth(&series, h)?;
                json!({
                    "kind": "classify", "horizon": h,
                    "class": match class { EarlyGrowth::Exceeds => "exceeds", EarlyGrowth::StaysBelow => "stays-below" },
                })
            }
            AnalysisRequest::Powerlaw { x, y, .. } => {
                let (xs, ys) = (x.clone().expect("validated"), y.clone().expect("validated"));
                let (a, b) = power_law_fit(&xs, &ys)?;
                json!({ "kind": "powerlaw", "x": xs, "y": ys, "a": a, "b": b })
            }
            AnalysisRequest::FiniteSize { x, y, .. } => {
                let (xs, ys) = (x.clone().expect("validated"), y.clone().expect("validated"));
                let (slope, intercept) = linear_fit_extrapolate(&xs, &ys)?;
                json!({ "kind": "finite-size", "x": xs, "y": ys, "slope": slope, "intercept": intercept })
            }
            AnalysisRequest::CvOracle { .. } => unreachable!("rejected by validation"),
        };
        out.push(v);
    }
    Ok(out)
}
