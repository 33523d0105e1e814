//! Reduced states, entropies, and symmetry-resolved measurements.
//!
//! The entanglement asymmetry of a region `a` is
//! `ΔS_a = S(ρ_{a,Q}) − S(ρ_a)`, where `ρ_{a,Q}` keeps only the blocks of
//! `ρ_a` that are diagonal in the charge sectors of the probe symmetry.
//! Entropies are in nats.

use faer::Mat;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, ZERO};
use crate::state::{Region, StateVector};

/// Eigenvalues at or below this are treated as exact zeros in `λ ln λ`.
pub const EIGENVALUE_FLOOR: f64 = 1e-12;
/// Eigenvalues below `−NEGATIVE_EIGENVALUE_LIMIT` mark an invalid state.
pub const NEGATIVE_EIGENVALUE_LIMIT: f64 = 1e-8;
/// Slightly negative asymmetries within this of zero are clamped to zero.
pub const ASYMMETRY_CLAMP: f64 = 1e-9;

/// Which charge decides the sector structure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Symmetry {
    /// `Q_a = Σ σ^z`: sectors are Hamming weights.
    U1,
    /// `Q_a = Π σ^z`: sectors are Hamming-weight parities.
    Z2,
}

impl Symmetry {
    fn sector(self, local_index: usize) -> u32 {
        let w = local_index.count_ones();
        match self {
            Symmetry::U1 => w,
            Symmetry::Z2 => w & 1,
        }
    }
}

/// A density matrix on `n_sites` qubits.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    n_sites: usize,
    entries: Mat<C64>,
}

impl DensityMatrix {
    /// Wraps a matrix after checking shape, Hermiticity, and unit trace.
    pub fn new(n_sites: usize, entries: Mat<C64>) -> Result<Self> {
        let dim = 1usize << n_sites;
        if entries.nrows() != dim || entries.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: entries.nrows(),
            });
        }
        let herm = crate::linalg::hermiticity_deviation(&entries);
        if herm > 1e-10 {
            return Err(Error::InvalidDensityMatrix(format!(
                "Hermiticity deviation {herm:.3e}"
            )));
        }
        let tr: C64 = (0..dim).map(|k| entries[(k, k)]).sum();
        if (tr - C64::new(1.0, 0.0)).norm() > 1e-10 {
            return Err(Error::InvalidDensityMatrix(format!("trace {tr}")));
        }
        Ok(Self { n_sites, entries })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &Mat<C64> {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.entries[(row, col)]
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim()).map(|k| self.entries[(k, k)]).sum()
    }

    /// `tr ρ²`.
    pub fn purity(&self) -> f64 {
        let n = self.dim();
        let mut acc = 0.0;
        for c in 0..n {
            for r in 0..n {
                acc += self.entries[(r, c)].norm_sqr();
            }
        }
        acc
    }

    /// Largest magnitude among entries that couple different sectors.
    pub fn max_coherence(&self, symmetry: Symmetry) -> f64 {
        let n = self.dim();
        let mut worst = 0.0_f64;
        for c in 0..n {
            for r in 0..n {
                if symmetry.sector(r) != symmetry.sector(c) {
                    worst = worst.max(self.entries[(r, c)].norm());
                }
            }
        }
        worst
    }
}

/// Splits a full basis index into (region bits, complement bits), both
/// compacted in ascending site order.
fn split_index(x: usize, region: &[usize], complement: &[usize]) -> (usize, usize) {
    let gather = |sites: &[usize]| {
        sites
            .iter()
            .enumerate()
            .fold(0usize, |acc, (k, &s)| acc | (((x >> s) & 1) << k))
    };
    (gather(region), gather(complement))
}

/// Partial trace over the complement of `region`. The first region site is
/// the least significant bit of the result's basis.
pub fn reduced_density_matrix(state: &StateVector, region: &Region) -> Result<DensityMatrix> {
    let l = state.num_sites();
    if let Some(&bad) = region.sites().iter().find(|&&s| s >= l) {
        return Err(Error::SiteOutOfRange {
            site: bad,
            num_sites: l,
        });
    }
    let n = region.len();
    let complement: Vec<usize> = (0..l).filter(|s| !region.sites().contains(s)).collect();
    let dim_a = 1usize << n;
    let dim_b = 1usize << complement.len();
    // M[a, b] = ψ(a ⊗ b), so ρ = M M†
    let mut m = Mat::<C64>::zeros(dim_a, dim_b);
    for (x, amp) in state.amplitudes().iter().enumerate() {
        let (a, b) = split_index(x, region.sites(), &complement);
        m[(a, b)] = *amp;
    }
    let mut rho = Mat::<C64>::zeros(dim_a, dim_a);
    for c in 0..dim_a {
        for r in c..dim_a {
            let mut acc = ZERO;
            for b in 0..dim_b {
                acc += m[(r, b)] * m[(c, b)].conj();
            }
            rho[(r, c)] = acc;
            rho[(c, r)] = acc.conj();
        }
    }
    // exact Hermiticity on the diagonal
    for k in 0..dim_a {
        rho[(k, k)] = C64::new(rho[(k, k)].re, 0.0);
    }
    Ok(DensityMatrix {
        n_sites: n,
        entries: rho,
    })
}

fn entropy_from_eigenvalues(values: &[f64]) -> Result<f64> {
    let mut s = 0.0;
    for &lam in values {
        if lam < -NEGATIVE_EIGENVALUE_LIMIT {
            return Err(Error::InvalidDensityMatrix(format!(
                "eigenvalue {lam:.3e} is negative"
            )));
        }
        if lam > EIGENVALUE_FLOOR {
            s -= lam * lam.ln();
        }
    }
    Ok(s)
}

/// `−tr ρ ln ρ`.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    let vals = hermitian_eigenvalues(&rho.entries)?;
    Ok(entropy_from_eigenvalues(&vals)?.max(0.0))
}

/// Keeps only the sector-diagonal blocks of `ρ`.
pub fn sector_project(rho: &DensityMatrix, symmetry: Symmetry) -> DensityMatrix {
    let n = rho.dim();
    let entries = Mat::from_fn(n, n, |r, c| {
        if symmetry.sector(r) == symmetry.sector(c) {
            rho.entries[(r, c)]
        } else {
            ZERO
        }
    });
    DensityMatrix {
        n_sites: rho.n_sites,
        entries,
    }
}

/// Local basis indices grouped by sector, sectors in ascending order.
fn sector_blocks(n_sites: usize, symmetry: Symmetry) -> Vec<Vec<usize>> {
    let dim = 1usize << n_sites;
    let nsec = match symmetry {
        Symmetry::U1 => n_sites + 1,
        Symmetry::Z2 => 2,
    };
    let mut blocks = vec![Vec::new(); nsec];
    for x in 0..dim {
        blocks[symmetry.sector(x) as usize].push(x);
    }
    blocks.retain(|b| !b.is_empty());
    blocks
}

/// `S(ρ_Q)`, diagonalizing the sector blocks one at a time.
pub fn dephased_entropy(rho: &DensityMatrix, symmetry: Symmetry) -> Result<f64> {
    let mut vals = Vec::with_capacity(rho.dim());
    for block in sector_blocks(rho.n_sites, symmetry) {
        let sub = Mat::from_fn(block.len(), block.len(), |r, c| {
            rho.entries[(block[r], block[c])]
        });
        vals.extend(hermitian_eigenvalues(&sub)?);
    }
    Ok(entropy_from_eigenvalues(&vals)?.max(0.0))
}

/// `ΔS = S(ρ_Q) − S(ρ)` from an already reduced state.
pub fn asymmetry_of(rho: &DensityMatrix, symmetry: Symmetry) -> Result<f64> {
    if rho.max_coherence(symmetry) == 0.0 {
        return Ok(0.0);
    }
    let ds = dephased_entropy(rho, symmetry)? - von_neumann_entropy(rho)?;
    if ds < -ASYMMETRY_CLAMP {
        return Err(Error::InvalidDensityMatrix(format!(
            "negative entanglement asymmetry {ds:.3e}"
        )));
    }
    Ok(ds.max(0.0))
}

/// Entanglement asymmetry of `region` for the given probe symmetry.
pub fn entanglement_asymmetry(state: &StateVector, region: &Region, symmetry: Symmetry) -> Result<f64> {
    asymmetry_of(&reduced_density_matrix(state, region)?, symmetry)
}

/// Mean and variance of `Q = Σ_{i∈region} σ^z_i`. `Q` is diagonal in the
/// computational basis, so both come from the probability distribution.
pub fn charge_moments(state: &StateVector, region: &Region) -> Result<(f64, f64)> {
    let l = state.num_sites();
    if let Some(&bad) = region.sites().iter().find(|&&s| s >= l) {
        return Err(Error::SiteOutOfRange {
            site: bad,
            num_sites: l,
        });
    }
    let mask = region.mask();
    let n = region.len() as i64;
    let mut by_weight = vec![0.0; region.len() + 1];
    for (x, a) in state.amplitudes().iter().enumerate() {
        by_weight[(x & mask).count_ones() as usize] += a.norm_sqr();
    }
    let mut m1 = 0.0;
    let mut m2 = 0.0;
    for (w, p) in by_weight.iter().enumerate() {
        let q = (n - 2 * w as i64) as f64;
        m1 += p * q;
        m2 += p * q * q;
    }
    let var = (m2 - m1 * m1).max(0.0);
    Ok((m1, var))
}

/// Probabilities of the total charge sectors `Q = L − 2k`, `k = 0..=L`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChargeDistribution {
    num_sites: usize,
    /// Indexed by the number of down spins `k`.
    probs: Vec<f64>,
}

impl ChargeDistribution {
    pub fn num_sites(&self) -> usize {
        self.num_sites
    }

    /// `P_Q`, zero for charges outside `{−L, −L+2, …, L}`.
    pub fn probability(&self, charge: i64) -> f64 {
        let l = self.num_sites as i64;
        if charge.abs() > l || (l - charge) % 2 != 0 {
            return 0.0;
        }
        self.probs[((l - charge) / 2) as usize]
    }

    /// `(Q, P_Q)` pairs in ascending charge.
    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        let l = self.num_sites as i64;
        self.probs
            .iter()
            .enumerate()
            .rev()
            .map(move |(k, &p)| (l - 2 * k as i64, p))
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.iter().map(|(q, p)| q as f64 * p).sum()
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.iter().map(|(q, p)| (q as f64 - m).powi(2) * p).sum()
    }
}

pub fn charge_distribution(state: &StateVector) -> ChargeDistribution {
    let l = state.num_sites();
    let mut probs = vec![0.0; l + 1];
    for (x, a) in state.amplitudes().iter().enumerate() {
        probs[x.count_ones() as usize] += a.norm_sqr();
    }
    ChargeDistribution { num_sites: l, probs }
}

/// A measurement to record along a trajectory or circuit run.
#[derive(Clone, Debug, PartialEq)]
pub enum Probe {
    Asymmetry { region: Region, symmetry: Symmetry },
    /// Variance of the total charge.
    ChargeVariance,
    /// Mean of the total charge.
    ChargeMean,
    /// Full-system sector probabilities `P_Q`.
    ChargeDistribution,
    /// Entanglement entropy `S(ρ_a)`.
    Entropy { region: Region },
    /// Dephased entropy `S(ρ_{a,Q})`.
    DephasedEntropy { region: Region, symmetry: Symmetry },
}

#[derive(Clone, Debug, PartialEq)]
pub enum ProbeValue {
    Scalar(f64),
    /// Sector probabilities in ascending charge.
    Distribution(Vec<f64>),
}

impl ProbeValue {
    pub fn scalar(&self) -> Option<f64> {
        match self {
            ProbeValue::Scalar(v) => Some(*v),
            ProbeValue::Distribution(_) => None,
        }
    }
}

impl Probe {
    pub fn is_scalar(&self) -> bool {
        !matches!(self, Probe::ChargeDistribution)
    }

    pub fn evaluate(&self, state: &StateVector) -> Result<ProbeValue> {
        Ok(match self {
            Probe::Asymmetry { region, symmetry } => {
                ProbeValue::Scalar(entanglement_asymmetry(state, region, *symmetry)?)
            }
            Probe::ChargeVariance => {
                ProbeValue::Scalar(charge_moments(state, &Region::all(state.num_sites())?)?.1)
            }
            Probe::ChargeMean => {
                ProbeValue::Scalar(charge_moments(state, &Region::all(state.num_sites())?)?.0)
            }
            Probe::ChargeDistribution => {
                ProbeValue::Distribution(charge_distribution(state).iter().map(|(_, p)| p).collect())
            }
            Probe::Entropy { region } => {
                ProbeValue::Scalar(von_neumann_entropy(&reduced_density_matrix(state, region)?)?)
            }
            Probe::DephasedEntropy { region, symmetry } => ProbeValue::Scalar(dephased_entropy(
                &reduced_density_matrix(state, region)?,
                *symmetry,
            )?),
        })
    }
}

/// Evaluates several probes on one state, sharing reduced density matrices
/// between probes on the same region.
pub fn evaluate_probes(probes: &[Probe], state: &StateVector) -> Result<Vec<ProbeValue>> {
    let mut cache: Vec<(Region, DensityMatrix)> = Vec::new();
    let mut rdm = |region: &Region| -> Result<DensityMatrix> {
        if let Some((_, r)) = cache.iter().find(|(reg, _)| reg == region) {
            return Ok(r.clone());
        }
        let r = reduced_density_matrix(state, region)?;
        cache.push((region.clone(), r.clone()));
        Ok(r)
    };
    probes
        .iter()
        .map(|p| match p {
            Probe::Asymmetry { region, symmetry } => {
                Ok(ProbeValue::Scalar(asymmetry_of(&rdm(region)?, *symmetry)?))
            }
            Probe::Entropy { region } => Ok(ProbeValue::Scalar(von_neumann_entropy(&rdm(region)?)?)),
            Probe::DephasedEntropy { region, symmetry } => {
                Ok(ProbeValue::Scalar(dephased_entropy(&rdm(region)?, *symmetry)?))
            }
            other => other.evaluate(state),
        })
        .collect()
}
