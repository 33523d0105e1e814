//! Pauli-string Hamiltonians and observables with matrix-free application.
//!
//! The quench Hamiltonian on a periodic chain is
//!
//! ```text
//! H = −¼ Σ_j [ X_j X_{j+1} + γ Y_j Y_{j+1} + Δ1 Z_j Z_{j+1} ]
//!     − Δ2 Σ_j [ X_j X_{j+2} + Y_j Y_{j+2} + Z_j Z_{j+2} ]
//! ```
//!
//! `γ = 1` conserves the total `σ^z` charge; `γ < 1` breaks it. The
//! next-nearest-neighbour prefactor is `Δ2` exactly as written above (no
//! extra ¼); [`HamiltonianParams::nnn_prefactor`] exposes it for
//! comparisons against other conventions.

use faer::Mat;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{frobenius_norm, tridiagonal_eigen, ZERO};
use crate::state::{Region, StateVector};

/// Default cap on dense materialization (2^14 = 16384 basis states).
pub const DENSE_SITE_CAP: usize = 14;

/// Below this dimension the matvec runs serially.
const PAR_THRESHOLD: usize = 1 << 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// A real-weighted tensor product of single-site Pauli matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliString {
    coefficient: f64,
    factors: Vec<(usize, Axis)>,
    flip_mask: usize,
    phase_mask: usize,
    num_y: u32,
}

impl PauliString {
    pub fn new(coefficient: f64, factors: Vec<(usize, Axis)>, num_sites: usize) -> Result<Self> {
        if !coefficient.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "non-finite Pauli coefficient {coefficient}"
            )));
        }
        let mut flip_mask = 0usize;
        let mut phase_mask = 0usize;
        let mut seen = 0usize;
        let mut num_y = 0;
        for &(site, axis) in &factors {
            if site >= num_sites {
                return Err(Error::SiteOutOfRange { site, num_sites });
            }
            if seen & (1 << site) != 0 {
                return Err(Error::RepeatedSite(site));
            }
            seen |= 1 << site;
            match axis {
                Axis::X => flip_mask |= 1 << site,
                Axis::Y => {
                    flip_mask |= 1 << site;
                    phase_mask |= 1 << site;
                    num_y += 1;
                }
                Axis::Z => phase_mask |= 1 << site,
            }
        }
        Ok(Self {
            coefficient,
            factors,
            flip_mask,
            phase_mask,
            num_y,
        })
    }

    pub fn coefficient(&self) -> f64 {
        self.coefficient
    }

    pub fn factors(&self) -> &[(usize, Axis)] {
        &self.factors
    }

    /// Coefficient times `i^{#Y}`: the prefactor common to every matrix
    /// element of the string.
    fn weight(&self) -> C64 {
        let c = self.coefficient;
        match self.num_y % 4 {
            0 => C64::new(c, 0.0),
            1 => C64::new(0.0, c),
            2 => C64::new(-c, 0.0),
            _ => C64::new(0.0, -c),
        }
    }

    /// `⟨x ⊕ flip| P |x⟩ / weight`, a sign determined by the phase mask.
    #[inline]
    fn sign(&self, x: usize) -> f64 {
        if (x & self.phase_mask).count_ones() % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }
}

/// A Hermitian operator written as a real-weighted sum of Pauli strings.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliSum {
    num_sites: usize,
    terms: Vec<PauliString>,
}

impl PauliSum {
    pub fn new(num_sites: usize) -> Self {
        Self {
            num_sites,
            terms: Vec::new(),
        }
    }

    pub fn num_sites(&self) -> usize {
        self.num_sites
    }

    pub fn terms(&self) -> &[PauliString] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn push(&mut self, coefficient: f64, factors: Vec<(usize, Axis)>) -> Result<()> {
        self.terms
            .push(PauliString::new(coefficient, factors, self.num_sites)?);
        Ok(())
    }

    /// Concatenation of the two term lists.
    pub fn plus(&self, other: &PauliSum) -> Result<PauliSum> {
        if self.num_sites != other.num_sites {
            return Err(Error::DimensionMismatch {
                expected: self.num_sites,
                found: other.num_sites,
            });
        }
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Ok(PauliSum {
            num_sites: self.num_sites,
            terms,
        })
    }

    pub fn scaled(&self, factor: f64) -> PauliSum {
        let mut out = self.clone();
        for t in &mut out.terms {
            t.coefficient *= factor;
        }
        out
    }

    fn check_dim(&self, len: usize) -> Result<()> {
        let dim = 1usize << self.num_sites;
        if len != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: len,
            });
        }
        Ok(())
    }

    /// `H|ψ⟩` without building a matrix.
    pub fn apply(&self, state: &StateVector) -> Result<Vec<C64>> {
        self.check_dim(state.dim())?;
        let mut out = vec![ZERO; state.dim()];
        self.apply_into(state.amplitudes(), &mut out);
        Ok(out)
    }

    /// Writes `H·input` into `out`. Both slices must have length `2^L`.
    ///
    /// Each output amplitude is accumulated over terms in a fixed order, so
    /// the result does not depend on how the work is split across threads.
    pub(crate) fn apply_into(&self, input: &[C64], out: &mut [C64]) {
        debug_assert_eq!(input.len(), out.len());
        let weights: Vec<C64> = self.terms.iter().map(PauliString::weight).collect();
        let row = |y: usize| -> C64 {
            let mut acc = ZERO;
            for (t, w) in self.terms.iter().zip(&weights) {
                let x = y ^ t.flip_mask;
                acc += w * t.sign(x) * input[x];
            }
            acc
        };
        if out.len() >= PAR_THRESHOLD {
            out.par_iter_mut().enumerate().for_each(|(y, o)| *o = row(y));
        } else {
            out.iter_mut().enumerate().for_each(|(y, o)| *o = row(y));
        }
    }

    /// `⟨ψ|H|ψ⟩`.
    pub fn expectation(&self, state: &StateVector) -> Result<C64> {
        let hpsi = self.apply(state)?;
        Ok(state
            .amplitudes()
            .iter()
            .zip(&hpsi)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Dense `2^L × 2^L` matrix, allowed up to [`DENSE_SITE_CAP`] sites.
    pub fn to_dense(&self) -> Result<Mat<C64>> {
        self.to_dense_capped(DENSE_SITE_CAP)
    }

    pub fn to_dense_capped(&self, cap: usize) -> Result<Mat<C64>> {
        if self.num_sites > cap {
            return Err(Error::DenseCap {
                num_sites: self.num_sites,
                cap,
            });
        }
        let dim = 1usize << self.num_sites;
        let mut m = Mat::<C64>::zeros(dim, dim);
        for t in &self.terms {
            let w = t.weight();
            for x in 0..dim {
                m[(x ^ t.flip_mask, x)] += w * t.sign(x);
            }
        }
        Ok(m)
    }
}

/// Parameters of the quench Hamiltonian.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HamiltonianParams {
    pub num_sites: usize,
    pub gamma: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub periodic: bool,
    /// Multiplies `Δ2` in the next-nearest-neighbour sum. 1 by default.
    pub nnn_prefactor: f64,
}

impl HamiltonianParams {
    pub fn new(num_sites: usize, gamma: f64, delta1: f64, delta2: f64) -> Self {
        Self {
            num_sites,
            gamma,
            delta1,
            delta2,
            periodic: true,
            nnn_prefactor: 1.0,
        }
    }

    /// Integrable model: `Δ1 = 0.4`, `Δ2 = 0`.
    pub fn h1(num_sites: usize, gamma: f64) -> Self {
        Self::new(num_sites, gamma, 0.4, 0.0)
    }

    /// Non-integrable model: `Δ1 = 0.4`, `Δ2 = 0.05`.
    pub fn h2(num_sites: usize, gamma: f64) -> Self {
        Self::new(num_sites, gamma, 0.4, 0.05)
    }

    pub fn validate(&self) -> Result<()> {
        if self.periodic && self.num_sites < 3 {
            return Err(Error::InvalidSize {
                size: self.num_sites,
                reason: "periodic chains need at least 3 sites",
            });
        }
        if self.num_sites < 2 {
            return Err(Error::InvalidSize {
                size: self.num_sites,
                reason: "open chains need at least 2 sites",
            });
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(Error::InvalidParameter(format!(
                "gamma = {} is outside [0, 1]",
                self.gamma
            )));
        }
        for (name, v) in [
            ("delta1", self.delta1),
            ("delta2", self.delta2),
            ("nnn_prefactor", self.nnn_prefactor),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} = {v} is not finite")));
            }
        }
        Ok(())
    }
}

/// Builds the quench Hamiltonian as a [`PauliSum`].
///
/// Nearest-neighbour XX, YY, ZZ bonds come first (bond by bond), followed by
/// the next-nearest-neighbour bonds when `Δ2 ≠ 0`.
pub fn build_hamiltonian(params: &HamiltonianParams) -> Result<PauliSum> {
    params.validate()?;
    let l = params.num_sites;
    let mut h = PauliSum::new(l);
    let bonds = |range: usize| -> Vec<(usize, usize)> {
        (0..l)
            .filter(|&j| params.periodic || j + range < l)
            .map(|j| (j, (j + range) % l))
            .collect()
    };
    for (a, b) in bonds(1) {
        h.push(-0.25, vec![(a, Axis::X), (b, Axis::X)])?;
        h.push(-0.25 * params.gamma, vec![(a, Axis::Y), (b, Axis::Y)])?;
        h.push(-0.25 * params.delta1, vec![(a, Axis::Z), (b, Axis::Z)])?;
    }
    if params.delta2 != 0.0 {
        if params.periodic && l < 5 {
            // j+2 wraps onto an existing bond or onto the same site
            return Err(Error::InvalidSize {
                size: l,
                reason: "next-nearest-neighbour bonds need at least 5 periodic sites",
            });
        }
        let c = -params.delta2 * params.nnn_prefactor;
        for (a, b) in bonds(2) {
            h.push(c, vec![(a, Axis::X), (b, Axis::X)])?;
            h.push(c, vec![(a, Axis::Y), (b, Axis::Y)])?;
            h.push(c, vec![(a, Axis::Z), (b, Axis::Z)])?;
        }
    }
    Ok(h)
}

/// `Q = Σ_{i ∈ region} σ^z_i`.
pub fn build_charge_operator(num_sites: usize, region: &Region) -> Result<PauliSum> {
    let mut q = PauliSum::new(num_sites);
    for &s in region.sites() {
        q.push(1.0, vec![(s, Axis::Z)])?;
    }
    Ok(q)
}

/// Frobenius norm of `AB − BA`, evaluated densely.
pub fn commutator_frobenius(a: &PauliSum, b: &PauliSum) -> Result<f64> {
    if a.num_sites() != b.num_sites() {
        return Err(Error::DimensionMismatch {
            expected: a.num_sites(),
            found: b.num_sites(),
        });
    }
    let da = a.to_dense()?;
    let db = b.to_dense()?;
    let comm = &da * &db - &db * &da;
    Ok(frobenius_norm(&comm))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenConfig {
    /// Lanczos vectors per restart cycle.
    pub krylov_dim: usize,
    /// Cap on total matrix-vector products.
    pub max_iterations: usize,
    /// Target for `‖Hv − Ev‖`.
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for EigenConfig {
    fn default() -> Self {
        Self {
            krylov_dim: 80,
            max_iterations: 5000,
            tolerance: 1e-8,
            seed: 0x6772_6f75_6e64,
        }
    }
}

#[derive(Clone, Debug)]
pub struct GroundState {
    pub energy: f64,
    pub state: StateVector,
    pub residual: f64,
    pub iterations: usize,
}

pub fn ground_state(h: &PauliSum) -> Result<GroundState> {
    ground_state_with(h, &EigenConfig::default())
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Restarted Lanczos with full reorthogonalization for the lowest eigenpair.
pub fn ground_state_with(h: &PauliSum, cfg: &EigenConfig) -> Result<GroundState> {
    if cfg.krylov_dim < 2 {
        return Err(Error::InvalidParameter("krylov_dim must be at least 2".into()));
    }
    let l = h.num_sites();
    let dim = 1usize << l;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut v: Vec<C64> = (0..dim)
        .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let n0 = norm(&v);
    v.iter_mut().for_each(|x| *x /= n0);

    let mut iterations = 0;
    let mut residual;
    let mut w = vec![ZERO; dim];
    loop {
        let mut basis: Vec<Vec<C64>> = vec![v.clone()];
        let mut alphas = Vec::new();
        let mut betas = Vec::new();
        loop {
            let k = basis.len() - 1;
            h.apply_into(&basis[k], &mut w);
            iterations += 1;
            let alpha = dot(&basis[k], &w).re;
            alphas.push(alpha);
            // two passes of classical Gram-Schmidt against the whole basis
            for _ in 0..2 {
                for b in &basis {
                    let c = dot(b, &w);
                    w.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
                }
            }
            let beta = norm(&w);
            if beta < 1e-12 || basis.len() >= cfg.krylov_dim.min(dim) || iterations >= cfg.max_iterations {
                break;
            }
            betas.push(beta);
            basis.push(w.iter().map(|x| x / beta).collect());
        }
        let (_, vecs) = tridiagonal_eigen(&alphas, &betas)?;
        let mut ritz = vec![ZERO; dim];
        for (k, b) in basis.iter().enumerate() {
            let c = vecs[(k, 0)];
            ritz.iter_mut().zip(b).for_each(|(r, x)| *r += c * x);
        }
        let rn = norm(&ritz);
        ritz.iter_mut().for_each(|x| *x /= rn);
        h.apply_into(&ritz, &mut w);
        let e = dot(&ritz, &w).re;
        residual = w
            .iter()
            .zip(&ritz)
            .map(|(hv, v)| (hv - e * v).norm_sqr())
            .sum::<f64>()
            .sqrt();
        if residual < cfg.tolerance {
            return Ok(GroundState {
                energy: e,
                state: StateVector::from_amplitudes(l, ritz)?,
                residual,
                iterations,
            });
        }
        if iterations >= cfg.max_iterations {
            return Err(Error::NoConvergence {
                iterations,
                residual,
            });
        }
        v = ritz;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{build_initial_state, Pattern, ProductStateSpec};

    #[test]
    fn term_counts() {
        assert_eq!(build_hamiltonian(&HamiltonianParams::h1(12, 0.5)).unwrap().len(), 36);
        assert_eq!(build_hamiltonian(&HamiltonianParams::h2(12, 0.5)).unwrap().len(), 72);
    }

    #[test]
    fn rejects_small_periodic_chain() {
        assert!(matches!(
            build_hamiltonian(&HamiltonianParams::h1(2, 1.0)),
            Err(Error::InvalidSize { .. })
        ));
        let mut p = HamiltonianParams::h1(4, 1.2);
        assert!(build_hamiltonian(&p).is_err());
        p.gamma = 0.5;
        p.delta1 = f64::NAN;
        assert!(build_hamiltonian(&p).is_err());
    }

    #[test]
    fn pauli_action_on_basis_states() {
        let s = StateVector::basis(3, 0).unwrap();
        let mut z = PauliSum::new(3);
        z.push(1.0, vec![(0, Axis::Z)]).unwrap();
        assert_eq!(z.apply(&s).unwrap(), s.amplitudes());
        let mut x = PauliSum::new(3);
        x.push(1.0, vec![(0, Axis::X)]).unwrap();
        let out = x.apply(&s).unwrap();
        assert_eq!(out[1], C64::new(1.0, 0.0));
        // σ^y|0⟩ = i|1⟩, σ^y|1⟩ = −i|0⟩
        let mut y = PauliSum::new(1);
        y.push(1.0, vec![(0, Axis::Y)]).unwrap();
        let out = y.apply(&StateVector::basis(1, 0).unwrap()).unwrap();
        assert_eq!(out[1], C64::new(0.0, 1.0));
        let out = y.apply(&StateVector::basis(1, 1).unwrap()).unwrap();
        assert_eq!(out[0], C64::new(0.0, -1.0));
    }

    #[test]
    fn charge_expectations() {
        let l = 12;
        let all = Region::all(l).unwrap();
        let q = build_charge_operator(l, &all).unwrap();
        assert_eq!(q.len(), 12);
        let ferro = build_initial_state(&ProductStateSpec::untilted(Pattern::Ferromagnetic), l).unwrap();
        assert!((q.expectation(&ferro).unwrap().re - 12.0).abs() < 1e-12);
        let af = build_initial_state(&ProductStateSpec::untilted(Pattern::Antiferromagnetic), l).unwrap();
        assert!(q.expectation(&af).unwrap().norm() < 1e-12);
        let q0 = build_charge_operator(4, &Region::new(vec![0], 4).unwrap()).unwrap();
        let s = StateVector::basis(4, 1).unwrap();
        assert!((q0.expectation(&s).unwrap().re + 1.0).abs() < 1e-15);
    }

    #[test]
    fn dense_basics() {
        let mut z = PauliSum::new(1);
        z.push(1.0, vec![(0, Axis::Z)]).unwrap();
        let m = z.to_dense().unwrap();
        assert_eq!(m[(0, 0)], C64::new(1.0, 0.0));
        assert_eq!(m[(1, 1)], C64::new(-1.0, 0.0));
        assert_eq!(m[(0, 1)], ZERO);

        let h2 = build_hamiltonian(&HamiltonianParams::h2(6, 0.3)).unwrap().to_dense().unwrap();
        assert!(crate::linalg::hermiticity_deviation(&h2) < 1e-12);

        let h1 = build_hamiltonian(&HamiltonianParams::h1(8, 0.6)).unwrap().to_dense().unwrap();
        let tr: C64 = (0..256).map(|k| h1[(k, k)]).sum();
        assert!(tr.norm() < 1e-12);

        let big = PauliSum::new(15);
        assert!(matches!(big.to_dense(), Err(Error::DenseCap { .. })));
    }

    #[test]
    fn symmetric_limit_commutes_with_charge() {
        let q = build_charge_operator(5, &Region::all(5).unwrap()).unwrap();
        for p in [HamiltonianParams::h1(5, 1.0), HamiltonianParams::h2(5, 1.0)] {
            let h = build_hamiltonian(&p).unwrap();
            assert!(commutator_frobenius(&h, &q).unwrap() < 1e-12);
        }
        assert!(commutator_frobenius(&q, &q).unwrap() < 1e-12);
    }

    #[test]
    fn single_spin_ground_state() {
        let mut z = PauliSum::new(1);
        z.push(1.0, vec![(0, Axis::Z)]).unwrap();
        let gs = ground_state(&z).unwrap();
        assert!((gs.energy + 1.0).abs() < 1e-12);
        assert!((gs.state.amplitudes()[1].norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn ground_state_residual_in_degenerate_case() {
        // Z_0 on two sites: twofold degenerate ground space
        let mut z = PauliSum::new(2);
        z.push(1.0, vec![(0, Axis::Z)]).unwrap();
        let gs = ground_state(&z).unwrap();
        assert!(gs.residual < 1e-8);
        assert!((gs.energy + 1.0).abs() < 1e-10);
    }

    #[test]
    fn ground_state_reports_nonconvergence() {
        let h = build_hamiltonian(&HamiltonianParams::h1(8, 0.5)).unwrap();
        let cfg = EigenConfig {
            krylov_dim: 3,
            max_iterations: 6,
            ..EigenConfig::default()
        };
        assert!(matches!(
            ground_state_with(&h, &cfg),
            Err(Error::NoConvergence { .. })
        ));
    }
}
