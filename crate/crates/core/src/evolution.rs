//! Unitary time evolution `e^{−iHt}|ψ⟩`.
//!
//! Two interchangeable backends:
//!
//! - [`SpectralPropagator`]: full eigendecomposition of the dense
//!   Hamiltonian, after which any time is reached in one step with no
//!   accumulated error. Used for long-time windows at small `L`.
//! - [`evolve_krylov`]: short Lanczos steps on the matrix-free
//!   [`PauliSum`] apply, for chains too large to diagonalize.
//!
//! [`trajectory`] drives either backend over a time grid and records probes.

use faer::{Mat, Side};
use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::analysis::TimeSeries;
use crate::error::{Error, Result};
use crate::hamiltonian::{PauliSum, DENSE_SITE_CAP};
use crate::linalg::{hermiticity_deviation, tridiagonal_eigen, ZERO};
use crate::observables::{evaluate_probes, Probe, ProbeValue};
use crate::state::StateVector;

/// Number of time points propagated per dense matrix product.
const TIME_CHUNK: usize = 32;

#[derive(Clone, Debug)]
enum Eigenbasis {
    /// Real symmetric Hamiltonians (every model built here) get real
    /// eigenvectors: half the memory and a quarter of the flops.
    Real(Mat<f64>),
    Complex(Mat<C64>),
}

/// Embeds per-block eigenpairs into the full space, ordered by energy.
fn assemble<T: Copy>(dim: usize, blocks: &[Vec<usize>], parts: &[(Vec<f64>, Mat<T>)], zero: T) -> (Vec<f64>, Mat<T>) {
    let mut order: Vec<(usize, usize)> = parts
        .iter()
        .enumerate()
        .flat_map(|(b, (e, _))| (0..e.len()).map(move |k| (b, k)))
        .collect();
    order.sort_by(|&(b1, k1), &(b2, k2)| parts[b1].0[k1].total_cmp(&parts[b2].0[k2]).then((b1, k1).cmp(&(b2, k2))));
    let mut v = Mat::from_fn(dim, dim, |_, _| zero);
    for (col, &(b, k)) in order.iter().enumerate() {
        for (r, &row) in blocks[b].iter().enumerate() {
            v[(row, col)] = parts[b].1[(r, k)];
        }
    }
    let energies = order.iter().map(|&(b, k)| parts[b].0[k]).collect();
    (energies, v)
}

/// Eigendecomposition `H = V diag(E) V†` of a dense Hermitian matrix.
#[derive(Clone, Debug)]
pub struct SpectralPropagator {
    num_sites: usize,
    energies: Vec<f64>,
    basis: Eigenbasis,
}

impl SpectralPropagator {
    /// Diagonalizes a dense Hermitian matrix of dimension `2^L`,
    /// `L ≤ DENSE_SITE_CAP`.
    pub fn new(h: &Mat<C64>) -> Result<Self> {
        let dim = h.nrows();
        if h.ncols() != dim || !dim.is_power_of_two() {
            return Err(Error::DimensionMismatch {
                expected: dim.next_power_of_two(),
                found: h.ncols(),
            });
        }
        let num_sites = dim.trailing_zeros() as usize;
        if num_sites > DENSE_SITE_CAP {
            return Err(Error::DenseCap {
                num_sites,
                cap: DENSE_SITE_CAP,
            });
        }
        let herm = hermiticity_deviation(h);
        if herm > 1e-10 {
            return Err(Error::Eigensolver(format!(
                "matrix of dimension {dim} is not Hermitian (deviation {herm:.3e})"
            )));
        }
        let is_real = (0..dim).all(|c| (0..dim).all(|r| h[(r, c)].im == 0.0));
        // Every Hamiltonian built here flips spins in pairs and so conserves
        // σ^z parity; diagonalizing the two parity blocks separately is
        // about four times cheaper.
        let parity = |x: usize| x.count_ones() % 2;
        let blocks: Vec<Vec<usize>> = if dim >= 4
            && (0..dim).all(|c| (0..dim).all(|r| parity(r) == parity(c) || h[(r, c)] == ZERO))
        {
            (0..2).map(|p| (0..dim).filter(|&x| parity(x) == p).collect()).collect()
        } else {
            vec![(0..dim).collect()]
        };
        let (energies, basis) = if is_real {
            let parts = blocks
                .iter()
                .map(|idx| {
                    let n = idx.len();
                    let hb = Mat::from_fn(n, n, |r, c| h[(idx[r], idx[c])].re);
                    let evd = hb.self_adjoint_eigen(Side::Lower).map_err(|e| {
                        Error::Eigensolver(format!("{e:?} (real symmetric, dimension {n})"))
                    })?;
                    Ok(((0..n).map(|k| evd.S()[k]).collect(), evd.U().to_owned()))
                })
                .collect::<Result<Vec<(Vec<f64>, Mat<f64>)>>>()?;
            let (e, v) = assemble(dim, &blocks, &parts, 0.0);
            (e, Eigenbasis::Real(v))
        } else {
            let parts = blocks
                .iter()
                .map(|idx| {
                    let n = idx.len();
                    let hb = Mat::from_fn(n, n, |r, c| h[(idx[r], idx[c])]);
                    let evd = hb.self_adjoint_eigen(Side::Lower).map_err(|e| {
                        Error::Eigensolver(format!("{e:?} (Hermitian, dimension {n})"))
                    })?;
                    Ok(((0..n).map(|k| evd.S()[k].re).collect(), evd.U().to_owned()))
                })
                .collect::<Result<Vec<(Vec<f64>, Mat<C64>)>>>()?;
            let (e, v) = assemble(dim, &blocks, &parts, ZERO);
            (e, Eigenbasis::Complex(v))
        };
        Ok(Self {
            num_sites,
            energies,
            basis,
        })
    }

    pub fn from_pauli_sum(h: &PauliSum) -> Result<Self> {
        Self::new(&h.to_dense()?)
    }

    pub fn num_sites(&self) -> usize {
        self.num_sites
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    /// Eigenvalues in ascending order.
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    /// Eigenvectors as the columns of a complex matrix.
    pub fn eigenvectors(&self) -> Mat<C64> {
        match &self.basis {
            Eigenbasis::Real(v) => Mat::from_fn(v.nrows(), v.ncols(), |r, c| C64::new(v[(r, c)], 0.0)),
            Eigenbasis::Complex(v) => v.clone(),
        }
    }

    /// `max |V diag(E) V† − H|`.
    pub fn reconstruction_error(&self, h: &Mat<C64>) -> f64 {
        let v = self.eigenvectors();
        let n = self.dim();
        let vd = Mat::from_fn(n, n, |r, c| v[(r, c)] * self.energies[c]);
        let rec = &vd * v.adjoint();
        let mut worst = 0.0_f64;
        for c in 0..n {
            for r in 0..n {
                worst = worst.max((rec[(r, c)] - h[(r, c)]).norm());
            }
        }
        worst
    }

    /// `max |V†V − I|`.
    pub fn orthonormality_error(&self) -> f64 {
        let v = self.eigenvectors();
        let g = v.adjoint() * &v;
        let n = self.dim();
        let mut worst = 0.0_f64;
        for c in 0..n {
            for r in 0..n {
                let target = if r == c { 1.0 } else { 0.0 };
                worst = worst.max((g[(r, c)] - C64::new(target, 0.0)).norm());
            }
        }
        worst
    }

    fn check_state(&self, state: &StateVector) -> Result<()> {
        if state.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: state.dim(),
            });
        }
        Ok(())
    }

    /// Coordinates of `state` in the eigenbasis, `V†|ψ⟩`.
    pub fn coefficients(&self, state: &StateVector) -> Result<Vec<C64>> {
        self.check_state(state)?;
        let n = self.dim();
        let psi = state.amplitudes();
        Ok(match &self.basis {
            Eigenbasis::Real(v) => {
                let cols = Mat::from_fn(n, 2, |r, c| if c == 0 { psi[r].re } else { psi[r].im });
                let out = v.transpose() * &cols;
                (0..n).map(|k| C64::new(out[(k, 0)], out[(k, 1)])).collect()
            }
            Eigenbasis::Complex(v) => {
                let col = Mat::from_fn(n, 1, |r, _| psi[r]);
                let out = v.adjoint() * &col;
                (0..n).map(|k| out[(k, 0)]).collect()
            }
        })
    }

    /// States `V e^{−iEt} c` for each `t`, given eigenbasis coefficients.
    fn evolve_coefficients(&self, coeffs: &[C64], times: &[f64]) -> Vec<Vec<C64>> {
        let n = self.dim();
        let phase = |k: usize, t: f64| coeffs[k] * C64::from_polar(1.0, -self.energies[k] * t);
        match &self.basis {
            Eigenbasis::Real(v) => {
                let cols = Mat::from_fn(n, 2 * times.len(), |r, c| {
                    let z = phase(r, times[c / 2]);
                    if c % 2 == 0 {
                        z.re
                    } else {
                        z.im
                    }
                });
                let out = v * &cols;
                (0..times.len())
                    .map(|j| (0..n).map(|r| C64::new(out[(r, 2 * j)], out[(r, 2 * j + 1)])).collect())
                    .collect()
            }
            Eigenbasis::Complex(v) => {
                let cols = Mat::from_fn(n, times.len(), |r, c| phase(r, times[c]));
                let out = v * &cols;
                (0..times.len())
                    .map(|j| (0..n).map(|r| out[(r, j)]).collect())
                    .collect()
            }
        }
    }

    /// `e^{−iHt}|ψ⟩`. `t = 0` returns the input unchanged.
    pub fn evolve(&self, state: &StateVector, t: f64) -> Result<StateVector> {
        self.check_state(state)?;
        if t == 0.0 {
            return Ok(state.clone());
        }
        let coeffs = self.coefficients(state)?;
        let amps = self.evolve_coefficients(&coeffs, &[t]).pop().unwrap_or_default();
        StateVector::from_amplitudes(self.num_sites, amps)
    }
}

/// Build a spectral propagator from a dense Hermitian matrix.
pub fn build_spectral(h_dense: &Mat<C64>) -> Result<SpectralPropagator> {
    SpectralPropagator::new(h_dense)
}

/// Evolve with an existing spectral propagator.
pub fn evolve_spectral(prop: &SpectralPropagator, state: &StateVector, t: f64) -> Result<StateVector> {
    prop.evolve(state, t)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KrylovConfig {
    /// Lanczos vectors per step.
    pub subspace_dim: usize,
    /// Largest step attempted.
    pub dt: f64,
    /// Per-step local error target.
    pub tolerance: f64,
}

impl Default for KrylovConfig {
    fn default() -> Self {
        Self {
            subspace_dim: 30,
            dt: 0.05,
            tolerance: 1e-10,
        }
    }
}

impl KrylovConfig {
    pub fn validate(&self) -> Result<()> {
        if self.subspace_dim < 2 {
            return Err(Error::InvalidParameter(format!(
                "Krylov subspace dimension {} must be at least 2",
                self.subspace_dim
            )));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidParameter(format!("Krylov dt = {} must be positive", self.dt)));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "Krylov tolerance = {} must be positive",
                self.tolerance
            )));
        }
        Ok(())
    }
}

/// Steps are halved on local-error failure down to this fraction of `dt`.
const MIN_STEP_FRACTION: f64 = 1e-9;

/// Lanczos short-time propagator with reusable workspace.
struct KrylovStepper<'a> {
    h: &'a PauliSum,
    cfg: KrylovConfig,
    basis: Vec<Vec<C64>>,
    w: Vec<C64>,
}

impl<'a> KrylovStepper<'a> {
    fn new(h: &'a PauliSum, cfg: KrylovConfig) -> Self {
        let dim = 1usize << h.num_sites();
        Self {
            h,
            cfg,
            basis: Vec::with_capacity(cfg.subspace_dim),
            w: vec![ZERO; dim],
        }
    }

    /// Propagates `psi` from `t_start` to `t_end` in place.
    fn advance(&mut self, psi: &mut [C64], t_start: f64, t_end: f64) -> Result<()> {
        let mut t = t_start;
        let span = (t_end - t_start).abs().max(1.0);
        while t_end - t > 1e-13 * span {
            let want = self.cfg.dt.min(t_end - t);
            t += self.step(psi, want, t)?;
        }
        Ok(())
    }

    /// One Lanczos step of at most `want`; returns the step actually taken.
    fn step(&mut self, psi: &mut [C64], want: f64, t_now: f64) -> Result<f64> {
        let dim = psi.len();
        let nrm = psi.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if nrm == 0.0 {
            return Ok(want);
        }
        let m_max = self.cfg.subspace_dim.min(dim);
        self.basis.clear();
        self.basis.push(psi.iter().map(|x| x / nrm).collect());
        let mut alphas = Vec::with_capacity(m_max);
        let mut betas = Vec::with_capacity(m_max);
        let tail_beta;
        loop {
            let k = self.basis.len() - 1;
            self.h.apply_into(&self.basis[k], &mut self.w);
            let alpha: f64 = self.basis[k]
                .iter()
                .zip(&self.w)
                .map(|(a, b)| (a.conj() * b).re)
                .sum();
            alphas.push(alpha);
            for _ in 0..2 {
                for b in &self.basis {
                    let c: C64 = b.iter().zip(&self.w).map(|(x, y)| x.conj() * y).sum();
                    self.w.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
                }
            }
            let beta = self.w.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            if beta < 1e-14 {
                // invariant subspace: the step is exact
                tail_beta = 0.0;
                break;
            }
            if self.basis.len() == m_max {
                tail_beta = beta;
                break;
            }
            betas.push(beta);
            self.basis.push(self.w.iter().map(|x| x / beta).collect());
        }
        let m = alphas.len();
        let (vals, vecs) = tridiagonal_eigen(&alphas, &betas)?;
        let mut dt = want;
        let min_dt = self.cfg.dt * MIN_STEP_FRACTION;
        let coeffs = loop {
            let u: Vec<C64> = (0..m)
                .map(|j| {
                    (0..m)
                        .map(|k| vecs[(j, k)] * vecs[(0, k)] * C64::from_polar(1.0, -vals[k] * dt))
                        .sum()
                })
                .collect();
            let err = tail_beta * u[m - 1].norm();
            if err <= self.cfg.tolerance {
                break u;
            }
            if dt / 2.0 < min_dt {
                return Err(Error::KrylovStep {
                    time: t_now,
                    dt,
                    error: err,
                    tolerance: self.cfg.tolerance,
                });
            }
            dt /= 2.0;
        };
        psi.iter_mut().for_each(|x| *x = ZERO);
        for (c, b) in coeffs.iter().zip(&self.basis) {
            let c = c * nrm;
            psi.iter_mut().zip(b).for_each(|(x, y)| *x += c * y);
        }
        Ok(dt)
    }
}

/// `e^{−iHt}|ψ⟩` by repeated Lanczos steps.
pub fn evolve_krylov(h: &PauliSum, state: &StateVector, t: f64, cfg: &KrylovConfig) -> Result<StateVector> {
    cfg.validate()?;
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter(format!("evolution time {t} must be nonnegative")));
    }
    if h.num_sites() != state.num_sites() {
        return Err(Error::DimensionMismatch {
            expected: 1 << h.num_sites(),
            found: state.dim(),
        });
    }
    let mut psi = state.amplitudes().to_vec();
    KrylovStepper::new(h, *cfg).advance(&mut psi, 0.0, t)?;
    StateVector::from_amplitudes(state.num_sites(), psi)
}

/// Time-evolution backend for [`trajectory`].
#[derive(Clone, Copy, Debug)]
pub enum Propagator<'a> {
    Spectral(&'a SpectralPropagator),
    Krylov {
        hamiltonian: &'a PauliSum,
        config: KrylovConfig,
    },
}

impl Propagator<'_> {
    fn num_sites(&self) -> usize {
        match self {
            Propagator::Spectral(p) => p.num_sites(),
            Propagator::Krylov { hamiltonian, .. } => hamiltonian.num_sites(),
        }
    }
}

/// Values of one probe over a time grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbeSeries {
    pub probe: Probe,
    pub times: Vec<f64>,
    pub values: Vec<ProbeValue>,
}

impl ProbeSeries {
    /// The series as a [`TimeSeries`], if the probe is scalar.
    pub fn time_series(&self) -> Option<TimeSeries> {
        let vals: Option<Vec<f64>> = self.values.iter().map(ProbeValue::scalar).collect();
        TimeSeries::new(self.times.clone(), vals?).ok()
    }
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::InvalidSeries("time grid is empty".into()));
    }
    if !(times[0] >= 0.0) {
        return Err(Error::InvalidSeries(format!("first time {} is negative", times[0])));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidSeries("times must be strictly increasing".into()));
    }
    Ok(())
}

/// Transposes per-time probe values into one series per probe.
pub(crate) fn collect_series(probes: &[Probe], times: &[f64], rows: Vec<Vec<ProbeValue>>) -> Vec<ProbeSeries> {
    let mut out: Vec<ProbeSeries> = probes
        .iter()
        .map(|p| ProbeSeries {
            probe: p.clone(),
            times: times.to_vec(),
            values: Vec::with_capacity(times.len()),
        })
        .collect();
    for row in rows {
        for (series, v) in out.iter_mut().zip(row) {
            series.values.push(v);
        }
    }
    out
}

/// Evolves `state0` over `times` and evaluates every probe at every time.
///
/// The spectral backend evaluates each time independently from `t = 0` and
/// processes fixed-size blocks of times in parallel; the Krylov backend steps
/// sequentially. Both give results independent of the thread count.
pub fn trajectory(
    prop: Propagator<'_>,
    state0: &StateVector,
    times: &[f64],
    probes: &[Probe],
) -> Result<Vec<ProbeSeries>> {
    check_times(times)?;
    if prop.num_sites() != state0.num_sites() {
        return Err(Error::DimensionMismatch {
            expected: 1 << prop.num_sites(),
            found: state0.dim(),
        });
    }
    let l = state0.num_sites();
    let rows: Vec<Vec<ProbeValue>> = match prop {
        Propagator::Spectral(sp) => {
            let coeffs = sp.coefficients(state0)?;
            let chunks: Vec<Result<Vec<Vec<ProbeValue>>>> = times
                .par_chunks(TIME_CHUNK)
                .map(|chunk| {
                    let states = sp.evolve_coefficients(&coeffs, chunk);
                    chunk
                        .iter()
                        .zip(states)
                        .map(|(&t, amps)| {
                            if t == 0.0 {
                                evaluate_probes(probes, state0)
                            } else {
                                evaluate_probes(probes, &StateVector::from_amplitudes(l, amps)?)
                            }
                        })
                        .collect()
                })
                .collect();
            let mut rows = Vec::with_capacity(times.len());
            for c in chunks {
                rows.extend(c?);
            }
            rows
        }
        Propagator::Krylov { hamiltonian, config } => {
            config.validate()?;
            let mut stepper = KrylovStepper::new(hamiltonian, config);
            let mut psi = state0.amplitudes().to_vec();
            let mut t_prev = 0.0;
            let mut rows = Vec::with_capacity(times.len());
            for &t in times {
                stepper.advance(&mut psi, t_prev, t)?;
                t_prev = t;
                let s = StateVector::from_amplitudes(l, psi.clone())?;
                rows.push(evaluate_probes(probes, &s)?);
            }
            rows
        }
    };
    Ok(collect_series(probes, times, rows))
}

/// `n + 1` evenly spaced times `0, dt, …, n·dt` covering `[0, t_max]`.
pub fn uniform_grid(t_max: f64, dt: f64) -> Result<Vec<f64>> {
    if !(dt > 0.0) || !(t_max >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "time grid needs dt > 0 and t_max >= 0, got dt = {dt}, t_max = {t_max}"
        )));
    }
    let n = (t_max / dt + 1e-9).floor() as usize;
    Ok((0..=n).map(|k| k as f64 * dt).collect())
}

/// `samples` evenly spaced times covering `[t1, t2]` inclusive.
pub fn window_grid(t1: f64, t2: f64, samples: usize) -> Result<Vec<f64>> {
    if samples < 2 || !(t2 > t1) {
        return Err(Error::InvalidParameter(format!(
            "window grid needs t2 > t1 and at least 2 samples, got [{t1}, {t2}] with {samples}"
        )));
    }
    let step = (t2 - t1) / (samples - 1) as f64;
    Ok((0..samples).map(|k| t1 + k as f64 * step).collect())
}
