//! Brick-wall random circuits mixing charge-conserving and Haar gates.
//!
//! One circuit time unit is an even layer (pairs `(0,1), (2,3), …`) followed
//! by an odd layer (pairs `(1,2), …, (L−1,0)`). Each gate is independently a
//! fully Haar-random 4×4 unitary with probability `p_haar`, otherwise a
//! U(1)-symmetric block gate: independent phases on `|00⟩` and `|11⟩` and a
//! 2×2 Haar block on `span{|01⟩, |10⟩}`.
//!
//! Every gate draws from its own ChaCha stream keyed by
//! `(master_seed, realization, layer, slot)`, so a realization reproduces
//! bit-for-bit in isolation and regardless of scheduling.

use std::f64::consts::TAU;

use faer::Mat;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::evolution::{collect_series, ProbeSeries};
use crate::linalg::{TwoQubitGate, ZERO};
use crate::observables::{evaluate_probes, Probe, ProbeValue};
use crate::state::StateVector;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GateKind {
    U1Symmetric,
    Haar,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlacedGate {
    pub sites: (usize, usize),
    pub kind: GateKind,
    pub gate: TwoQubitGate,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CircuitConfig {
    pub num_sites: usize,
    pub p_haar: f64,
    /// Circuit time units, two layers each.
    pub depth_units: usize,
    pub master_seed: u64,
    pub n_realizations: usize,
}

impl CircuitConfig {
    pub fn validate(&self) -> Result<()> {
        if self.num_sites < 2 || self.num_sites % 2 != 0 {
            return Err(Error::InvalidSize {
                size: self.num_sites,
                reason: "brick-wall circuits need an even chain of at least 2 sites",
            });
        }
        if !(0.0..=1.0).contains(&self.p_haar) {
            return Err(Error::InvalidParameter(format!(
                "p_haar = {} is outside [0, 1]",
                self.p_haar
            )));
        }
        Ok(())
    }
}

/// Haar-random `dim × dim` unitary: complex Gaussian matrix, then
/// Gram-Schmidt on its columns, which fixes the phases of `R`'s diagonal to be
/// positive real.
pub fn sample_haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<Mat<C64>> {
    if dim == 0 || dim > 64 {
        return Err(Error::InvalidParameter(format!(
            "Haar sampling supports dimensions 1..=64, got {dim}"
        )));
    }
    'draw: loop {
        let mut cols: Vec<Vec<C64>> = (0..dim)
            .map(|_| {
                (0..dim)
                    .map(|_| {
                        let re: f64 = rng.sample(StandardNormal);
                        let im: f64 = rng.sample(StandardNormal);
                        C64::new(re, im)
                    })
                    .collect()
            })
            .collect();
        for k in 0..dim {
            // two passes of modified Gram-Schmidt
            for _ in 0..2 {
                for j in 0..k {
                    let (done, rest) = cols.split_at_mut(k);
                    let c: C64 = done[j].iter().zip(&rest[0]).map(|(a, b)| a.conj() * b).sum();
                    rest[0].iter_mut().zip(&done[j]).for_each(|(x, q)| *x -= c * q);
                }
            }
            let n = cols[k].iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            if n < 1e-10 {
                continue 'draw;
            }
            cols[k].iter_mut().for_each(|x| *x /= n);
        }
        return Ok(Mat::from_fn(dim, dim, |r, c| cols[c][r]));
    }
}

/// Fully Haar-random two-qubit gate.
pub fn sample_haar_gate<R: Rng + ?Sized>(rng: &mut R) -> TwoQubitGate {
    let m = sample_haar_unitary(4, rng).expect("dimension 4 is supported");
    TwoQubitGate::from_mat(&m).expect("4x4 matrix")
}

/// Charge-conserving gate `e^{iφ₁} ⊕ U₂ ⊕ e^{iφ₂}` in the basis
/// `|00⟩, |01⟩, |10⟩, |11⟩`.
pub fn sample_u1_gate<R: Rng + ?Sized>(rng: &mut R) -> TwoQubitGate {
    let phi1 = rng.random_range(0.0..TAU);
    let phi2 = rng.random_range(0.0..TAU);
    let block = sample_haar_unitary(2, rng).expect("dimension 2 is supported");
    let mut m = [[ZERO; 4]; 4];
    m[0][0] = C64::from_polar(1.0, phi1);
    m[3][3] = C64::from_polar(1.0, phi2);
    for r in 0..2 {
        for c in 0..2 {
            m[1 + r][1 + c] = block[(r, c)];
        }
    }
    TwoQubitGate(m)
}

/// Site pairs of one brick-wall layer on a periodic chain.
pub fn layer_pairs(num_sites: usize, parity: Parity) -> Vec<(usize, usize)> {
    let offset = match parity {
        Parity::Even => 0,
        Parity::Odd => 1,
    };
    (0..num_sites / 2)
        .map(|k| {
            let a = 2 * k + offset;
            (a % num_sites, (a + 1) % num_sites)
        })
        .collect()
}

/// Per-gate random streams for one realization.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GateStreams {
    pub master_seed: u64,
    pub realization: u64,
}

impl GateStreams {
    pub fn new(master_seed: u64, realization: u64) -> Self {
        Self {
            master_seed,
            realization,
        }
    }

    /// The stream of gate `slot` in global layer `layer`.
    pub fn rng(&self, layer: u64, slot: u64) -> ChaCha8Rng {
        let mut seed = [0u8; 32];
        for (chunk, word) in seed
            .chunks_exact_mut(8)
            .zip([self.master_seed, self.realization, layer, slot])
        {
            chunk.copy_from_slice(&word.to_le_bytes());
        }
        ChaCha8Rng::from_seed(seed)
    }
}

/// Samples the gates of global layer `layer`. Even layer indices are
/// [`Parity::Even`].
pub fn build_layer(num_sites: usize, layer: u64, p_haar: f64, streams: &GateStreams) -> Vec<PlacedGate> {
    let parity = if layer % 2 == 0 { Parity::Even } else { Parity::Odd };
    layer_pairs(num_sites, parity)
        .into_iter()
        .enumerate()
        .map(|(slot, sites)| {
            let mut rng = streams.rng(layer, slot as u64);
            // p_haar = 0 or 1 must be exact, so compare against a draw in [0, 1)
            let haar = rng.random::<f64>() < p_haar;
            let (kind, gate) = if haar {
                (GateKind::Haar, sample_haar_gate(&mut rng))
            } else {
                (GateKind::U1Symmetric, sample_u1_gate(&mut rng))
            };
            PlacedGate { sites, kind, gate }
        })
        .collect()
}

fn apply_layer(state: &mut StateVector, gates: &[PlacedGate]) {
    for g in gates {
        state.apply_two_qubit_unchecked(&g.gate, g.sites.0, g.sites.1);
    }
}

/// Runs one circuit realization, probing at `t = 0` and after every full
/// time unit.
pub fn run_realization(
    config: &CircuitConfig,
    initial: &StateVector,
    probes: &[Probe],
    realization: u64,
) -> Result<Vec<ProbeSeries>> {
    config.validate()?;
    if initial.num_sites() != config.num_sites {
        return Err(Error::DimensionMismatch {
            expected: 1 << config.num_sites,
            found: initial.dim(),
        });
    }
    let streams = GateStreams::new(config.master_seed, realization);
    let mut state = initial.clone();
    let mut rows = Vec::with_capacity(config.depth_units + 1);
    rows.push(evaluate_probes(probes, &state)?);
    for unit in 0..config.depth_units as u64 {
        for layer in [2 * unit, 2 * unit + 1] {
            let gates = build_layer(config.num_sites, layer, config.p_haar, &streams);
            apply_layer(&mut state, &gates);
        }
        rows.push(evaluate_probes(probes, &state)?);
    }
    let times: Vec<f64> = (0..=config.depth_units).map(|t| t as f64).collect();
    Ok(collect_series(probes, &times, rows))
}

/// Realization mean and standard error of the mean of one scalar probe.
#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleSeries {
    pub probe: Probe,
    /// Circuit time units, starting at 0.
    pub times: Vec<usize>,
    pub mean: Vec<f64>,
    pub std_error: Vec<f64>,
    pub n: usize,
}

/// Reduces per-realization series (indexed `[realization][probe]`) in
/// realization order.
pub fn aggregate(probes: &[Probe], runs: &[Vec<ProbeSeries>]) -> Result<Vec<EnsembleSeries>> {
    let n = runs.len();
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "ensemble averages need at least 2 realizations, got {n}"
        )));
    }
    probes
        .iter()
        .enumerate()
        .map(|(p, probe)| {
            let len = runs[0][p].values.len();
            let mut mean = Vec::with_capacity(len);
            let mut std_error = Vec::with_capacity(len);
            for k in 0..len {
                let xs: Vec<f64> = runs
                    .iter()
                    .map(|r| {
                        r[p].values[k].scalar().ok_or_else(|| {
                            Error::InvalidParameter(format!(
                                "probe {probe:?} is not scalar and cannot be ensemble averaged"
                            ))
                        })
                    })
                    .collect::<Result<_>>()?;
                // shifted two-pass moments: identical samples give exactly
                // the sample and a zero spread
                let x0 = xs[0];
                let dm = xs.iter().map(|x| x - x0).sum::<f64>() / n as f64;
                let m = x0 + dm;
                let ss: f64 = xs.iter().map(|x| (x - x0 - dm).powi(2)).sum();
                mean.push(m);
                std_error.push((ss / (n - 1) as f64 / n as f64).sqrt());
            }
            Ok(EnsembleSeries {
                probe: probe.clone(),
                times: runs[0][p].times.iter().map(|&t| t as usize).collect(),
                mean,
                std_error,
                n,
            })
        })
        .collect()
}

/// Averages `config.n_realizations` independent circuits. Realizations run
/// in parallel; the reduction order is fixed by realization index, so the
/// result is identical for any thread count. Any failing realization aborts
/// the ensemble.
pub fn ensemble_average(
    config: &CircuitConfig,
    initial: &StateVector,
    probes: &[Probe],
) -> Result<Vec<EnsembleSeries>> {
    config.validate()?;
    if let Some(p) = probes.iter().find(|p| !p.is_scalar()) {
        return Err(Error::InvalidParameter(format!(
            "probe {p:?} is not scalar and cannot be ensemble averaged"
        )));
    }
    let runs: Vec<Vec<ProbeSeries>> = (0..config.n_realizations as u64)
        .into_par_iter()
        .map(|r| run_realization(config, initial, probes, r))
        .collect::<Result<_>>()?;
    aggregate(probes, &runs)
}

/// Mean of the scalar probe values, used by callers that only need a final
/// number.
pub fn scalar_values(series: &ProbeSeries) -> Vec<f64> {
    series.values.iter().filter_map(ProbeValue::scalar).collect()
}
