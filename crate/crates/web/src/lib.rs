//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Every entry point returns a [`Curve`]; the page only draws it. Sizes are
//! capped so a single call stays interactive in a browser tab.

use std::f64::consts::PI;

use easym::circuit::{ensemble_average, CircuitConfig};
use easym::evolution::{evolve_krylov, trajectory, uniform_grid, KrylovConfig, Propagator};
use easym::hamiltonian::build_hamiltonian;
use easym::observables::charge_distribution;
use easym::state::build_initial_state;
use easym::{HamiltonianParams, Pattern, Probe, ProductStateSpec, Region, Symmetry};
use wasm_bindgen::prelude::*;

/// Largest chain the page may request.
pub const MAX_SITES: usize = 12;
const MAX_SAMPLES: usize = 4001;

/// Abscissae, ordinates and optional error bars.
#[wasm_bindgen]
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Curve {
    x: Vec<f64>,
    y: Vec<f64>,
    err: Vec<f64>,
}

#[wasm_bindgen]
impl Curve {
    pub fn x(&self) -> Vec<f64> {
        self.x.clone()
    }

    pub fn y(&self) -> Vec<f64> {
        self.y.clone()
    }

    /// Standard errors, empty for deterministic curves.
    pub fn err(&self) -> Vec<f64> {
        self.err.clone()
    }
}

fn pattern(name: &str) -> Result<Pattern, String> {
    match name {
        "ferromagnetic" => Ok(Pattern::Ferromagnetic),
        "antiferromagnetic" => Ok(Pattern::Antiferromagnetic),
        "domain-wall" => Ok(Pattern::DomainWall),
        other => Err(format!("unknown pattern {other:?}")),
    }
}

fn check_sites(num_sites: usize) -> Result<(), String> {
    if !(4..=MAX_SITES).contains(&num_sites) {
        return Err(format!("L = {num_sites} is outside 4..={MAX_SITES}"));
    }
    Ok(())
}

fn initial(num_sites: usize, pattern_name: &str, tilt_pi: f64) -> Result<easym::StateVector, String> {
    if !(0.0..=0.5).contains(&tilt_pi) {
        return Err(format!("tilt {tilt_pi}π is outside [0, π/2]"));
    }
    let spec = ProductStateSpec::new(pattern(pattern_name)?, tilt_pi * PI);
    build_initial_state(&spec, num_sites).map_err(|e| e.to_string())
}

/// `ΔS` of the first `region_len` sites after a quench of H1 at anisotropy `γ`.
pub fn quench_asymmetry(
    num_sites: usize,
    gamma: f64,
    pattern_name: &str,
    tilt_pi: f64,
    region_len: usize,
    t_max: f64,
    dt: f64,
) -> Result<Curve, String> {
    check_sites(num_sites)?;
    let times = uniform_grid(t_max, dt).map_err(|e| e.to_string())?;
    if times.len() > MAX_SAMPLES {
        return Err(format!("{} samples requested, at most {MAX_SAMPLES} allowed", times.len()));
    }
    let region = Region::contiguous(0, region_len, num_sites).map_err(|e| e.to_string())?;
    let h = build_hamiltonian(&HamiltonianParams::h1(num_sites, gamma)).map_err(|e| e.to_string())?;
    let s = initial(num_sites, pattern_name, tilt_pi)?;
    let probe = Probe::Asymmetry { region, symmetry: Symmetry::U1 };
    let prop = Propagator::Krylov { hamiltonian: &h, config: KrylovConfig::default() };
    let series = trajectory(prop, &s, &times, &[probe]).map_err(|e| e.to_string())?;
    let y = series[0].values.iter().map(|v| v.scalar().unwrap_or(f64::NAN)).collect();
    Ok(Curve { x: times, y, err: Vec::new() })
}

/// Ensemble-averaged `ΔS` of the first `region_len` sites in brick-wall
/// circuits with Haar density `p_haar`.
#[allow(clippy::too_many_arguments)]
pub fn circuit_asymmetry(
    num_sites: usize,
    p_haar: f64,
    pattern_name: &str,
    tilt_pi: f64,
    region_len: usize,
    depth_units: usize,
    realizations: usize,
    seed: u64,
) -> Result<Curve, String> {
    check_sites(num_sites)?;
    if depth_units > 200 || realizations > 2000 {
        return Err("depth is capped at 200 units and realizations at 2000".into());
    }
    let cfg = CircuitConfig { num_sites, p_haar, depth_units, master_seed: seed, n_realizations: realizations };
    let region = Region::contiguous(0, region_len, num_sites).map_err(|e| e.to_string())?;
    let s = initial(num_sites, pattern_name, tilt_pi)?;
    let probe = Probe::Asymmetry { region, symmetry: Symmetry::U1 };
    let e = ensemble_average(&cfg, &s, &[probe]).map_err(|e| e.to_string())?.remove(0);
    Ok(Curve { x: e.times.iter().map(|&t| t as f64).collect(), y: e.mean, err: e.std_error })
}

/// Probability of each total charge `Q = −L, −L + 2, …, L` at time `t` after
/// a quench of H1.
pub fn charge_sectors(num_sites: usize, gamma: f64, pattern_name: &str, tilt_pi: f64, t: f64) -> Result<Curve, String> {
    check_sites(num_sites)?;
    if !(0.0..=1000.0).contains(&t) {
        return Err(format!("t = {t} is outside [0, 1000]"));
    }
    let h = build_hamiltonian(&HamiltonianParams::h1(num_sites, gamma)).map_err(|e| e.to_string())?;
    let s = initial(num_sites, pattern_name, tilt_pi)?;
    let s = evolve_krylov(&h, &s, t, &KrylovConfig::default()).map_err(|e| e.to_string())?;
    let d = charge_distribution(&s);
    let (x, y) = d.iter().map(|(q, p)| (q as f64, p)).unzip();
    Ok(Curve { x, y, err: Vec::new() })
}

#[wasm_bindgen(js_name = quenchAsymmetry)]
pub fn quench_asymmetry_js(
    num_sites: usize,
    gamma: f64,
    pattern_name: &str,
    tilt_pi: f64,
    region_len: usize,
    t_max: f64,
    dt: f64,
) -> Result<Curve, JsError> {
    quench_asymmetry(num_sites, gamma, pattern_name, tilt_pi, region_len, t_max, dt).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = circuitAsymmetry)]
#[allow(clippy::too_many_arguments)]
pub fn circuit_asymmetry_js(
    num_sites: usize,
    p_haar: f64,
    pattern_name: &str,
    tilt_pi: f64,
    region_len: usize,
    depth_units: usize,
    realizations: usize,
    seed: u32,
) -> Result<Curve, JsError> {
    circuit_asymmetry(num_sites, p_haar, pattern_name, tilt_pi, region_len, depth_units, realizations, seed.into())
        .map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = chargeSectors)]
pub fn charge_sectors_js(num_sites: usize, gamma: f64, pattern_name: &str, tilt_pi: f64, t: f64) -> Result<Curve, JsError> {
    charge_sectors(num_sites, gamma, pattern_name, tilt_pi, t).map_err(|e| JsError::new(&e))
}
