//! Statevectors, product-state preparation, and the two-qubit gate kernel.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{TwoQubitGate, UNITARITY_TOLERANCE, ZERO};

/// Largest chain handled by the dense statevector (2^30 amplitudes is 16 GiB).
pub const MAX_SITES: usize = 30;

/// Classical spin configuration that a product state is tilted away from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pattern {
    /// All sites 0 (spin up).
    Ferromagnetic,
    /// 0 on even sites, 1 on odd sites.
    Antiferromagnetic,
    /// 0 on the left half, 1 on the right half. Needs an even chain.
    DomainWall,
}

impl Pattern {
    /// Bit value of site `k` in an `num_sites` chain.
    pub fn bit(self, k: usize, num_sites: usize) -> u8 {
        match self {
            Pattern::Ferromagnetic => 0,
            Pattern::Antiferromagnetic => (k % 2) as u8,
            Pattern::DomainWall => u8::from(k >= num_sites / 2),
        }
    }

    /// Basis index of the untilted configuration.
    pub fn basis_index(self, num_sites: usize) -> usize {
        (0..num_sites)
            .filter(|&k| self.bit(k, num_sites) == 1)
            .fold(0, |acc, k| acc | (1 << k))
    }
}

/// A product state `⊗_k R_y(θ)|b_k⟩` with `b_k` given by a [`Pattern`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProductStateSpec {
    pub pattern: Pattern,
    /// Tilt angle θ in radians, in `[0, π/2]`.
    pub tilt: f64,
}

impl ProductStateSpec {
    pub fn new(pattern: Pattern, tilt: f64) -> Self {
        Self { pattern, tilt }
    }

    pub fn untilted(pattern: Pattern) -> Self {
        Self { pattern, tilt: 0.0 }
    }
}

/// An ordered set of distinct sites.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Region {
    sites: Vec<usize>,
}

impl Region {
    pub fn new(sites: Vec<usize>, num_sites: usize) -> Result<Self> {
        if sites.is_empty() {
            return Err(Error::InvalidRegion("region is empty".into()));
        }
        if sites.len() > num_sites {
            return Err(Error::InvalidRegion(format!(
                "{} sites requested in a chain of {num_sites}",
                sites.len()
            )));
        }
        if let Some(&bad) = sites.iter().find(|&&s| s >= num_sites) {
            return Err(Error::SiteOutOfRange {
                site: bad,
                num_sites,
            });
        }
        if sites.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidRegion(format!(
                "site indices must be strictly increasing, got {sites:?}"
            )));
        }
        Ok(Self { sites })
    }

    /// `len` consecutive sites starting at `start`, wrapping around the
    /// periodic chain.
    pub fn contiguous(start: usize, len: usize, num_sites: usize) -> Result<Self> {
        if len == 0 || len > num_sites {
            return Err(Error::InvalidRegion(format!(
                "cannot take {len} consecutive sites of a {num_sites}-site chain"
            )));
        }
        let mut sites: Vec<usize> = (0..len).map(|k| (start + k) % num_sites).collect();
        sites.sort_unstable();
        Self::new(sites, num_sites)
    }

    /// The whole chain.
    pub fn all(num_sites: usize) -> Result<Self> {
        Self::new((0..num_sites).collect(), num_sites)
    }

    pub fn sites(&self) -> &[usize] {
        &self.sites
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    /// Bit mask of the region's sites.
    pub fn mask(&self) -> usize {
        self.sites.iter().fold(0, |acc, &s| acc | (1 << s))
    }
}

/// Dense complex amplitudes over the `2^L` computational basis.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    num_sites: usize,
    amps: Vec<C64>,
}

fn check_num_sites(num_sites: usize) -> Result<()> {
    if num_sites == 0 {
        return Err(Error::InvalidSize {
            size: 0,
            reason: "a chain needs at least one site",
        });
    }
    if num_sites > MAX_SITES {
        return Err(Error::InvalidSize {
            size: num_sites,
            reason: "statevector would not fit in memory",
        });
    }
    Ok(())
}

impl StateVector {
    /// Computational basis state `|index⟩`.
    pub fn basis(num_sites: usize, index: usize) -> Result<Self> {
        check_num_sites(num_sites)?;
        let dim = 1usize << num_sites;
        if index >= dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: index,
            });
        }
        let mut amps = vec![ZERO; dim];
        amps[index] = C64::new(1.0, 0.0);
        Ok(Self { num_sites, amps })
    }

    /// Wraps raw amplitudes. The length must be `2^num_sites`; normalization
    /// is the caller's responsibility (see [`StateVector::normalized`]).
    pub fn from_amplitudes(num_sites: usize, amps: Vec<C64>) -> Result<Self> {
        check_num_sites(num_sites)?;
        let dim = 1usize << num_sites;
        if amps.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: amps.len(),
            });
        }
        Ok(Self { num_sites, amps })
    }

    pub fn num_sites(&self) -> usize {
        self.num_sites
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Rescales to unit norm. A zero vector is returned unchanged.
    pub fn normalized(mut self) -> Self {
        let n = self.norm();
        if n > 0.0 {
            let inv = 1.0 / n;
            self.amps.iter_mut().for_each(|a| *a *= inv);
        }
        self
    }

    /// `⟨self|other⟩`, conjugating `self`.
    pub fn overlap(&self, other: &StateVector) -> Result<C64> {
        if self.num_sites != other.num_sites {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    fn check_site(&self, site: usize) -> Result<()> {
        if site >= self.num_sites {
            return Err(Error::SiteOutOfRange {
                site,
                num_sites: self.num_sites,
            });
        }
        Ok(())
    }

    /// Applies a 2×2 matrix `[[m00, m01], [m10, m11]]` to one site.
    pub fn apply_single_qubit(&mut self, gate: [[C64; 2]; 2], site: usize) -> Result<()> {
        self.check_site(site)?;
        let bit = 1usize << site;
        for base in 0..self.amps.len() {
            if base & bit != 0 {
                continue;
            }
            let a0 = self.amps[base];
            let a1 = self.amps[base | bit];
            self.amps[base] = gate[0][0] * a0 + gate[0][1] * a1;
            self.amps[base | bit] = gate[1][0] * a0 + gate[1][1] * a1;
        }
        Ok(())
    }

    /// Applies `gate` to the ordered site pair `(i, j)`. The gate's local
    /// basis is `|q_i q_j⟩`, so site `i` is the more significant local bit.
    pub fn apply_two_qubit_gate(&mut self, gate: &TwoQubitGate, i: usize, j: usize) -> Result<()> {
        self.check_site(i)?;
        self.check_site(j)?;
        if i == j {
            return Err(Error::RepeatedSite(i));
        }
        let dev = gate.unitarity_deviation();
        if dev > UNITARITY_TOLERANCE {
            return Err(Error::NonUnitary(dev));
        }
        self.apply_two_qubit_unchecked(gate, i, j);
        Ok(())
    }

    /// Gate kernel without validation. Callers guarantee distinct in-range
    /// sites and a unitary gate.
    pub(crate) fn apply_two_qubit_unchecked(&mut self, gate: &TwoQubitGate, i: usize, j: usize) {
        let bi = 1usize << i;
        let bj = 1usize << j;
        let (lo, hi) = if i < j { (i, j) } else { (j, i) };
        let g = &gate.0;
        let quarter = self.amps.len() >> 2;
        for k in 0..quarter {
            // insert zero bits at positions lo and hi
            let low_mask = (1usize << lo) - 1;
            let x = (k & low_mask) | ((k & !low_mask) << 1);
            let mid_mask = (1usize << hi) - 1;
            let base = (x & mid_mask) | ((x & !mid_mask) << 1);
            let idx = [base, base | bj, base | bi, base | bi | bj];
            let v = [
                self.amps[idx[0]],
                self.amps[idx[1]],
                self.amps[idx[2]],
                self.amps[idx[3]],
            ];
            for (r, &target) in idx.iter().enumerate() {
                self.amps[target] = g[r][0] * v[0] + g[r][1] * v[1] + g[r][2] * v[2] + g[r][3] * v[3];
            }
        }
    }
}

/// `R_y(θ) = exp(−iθσ^y/2)` as a 2×2 matrix.
pub fn ry(theta: f64) -> [[C64; 2]; 2] {
    let (s, c) = (theta / 2.0).sin_cos();
    [
        [C64::new(c, 0.0), C64::new(-s, 0.0)],
        [C64::new(s, 0.0), C64::new(c, 0.0)],
    ]
}

/// Prepares the tilted product state described by `spec` on `num_sites`
/// sites.
pub fn build_initial_state(spec: &ProductStateSpec, num_sites: usize) -> Result<StateVector> {
    check_num_sites(num_sites)?;
    if !(0.0..=FRAC_PI_2).contains(&spec.tilt) {
        return Err(Error::InvalidTilt(spec.tilt));
    }
    if spec.pattern == Pattern::DomainWall && num_sites % 2 != 0 {
        return Err(Error::InvalidSize {
            size: num_sites,
            reason: "a centered domain wall needs an even chain",
        });
    }
    let r = ry(spec.tilt);
    // single-site states: R_y|0⟩ is column 0, R_y|1⟩ is column 1
    let local: Vec<[C64; 2]> = (0..num_sites)
        .map(|k| {
            let b = spec.pattern.bit(k, num_sites) as usize;
            [r[0][b], r[1][b]]
        })
        .collect();
    let amps = (0..1usize << num_sites)
        .map(|x| {
            local
                .iter()
                .enumerate()
                .fold(C64::new(1.0, 0.0), |acc, (k, v)| acc * v[(x >> k) & 1])
        })
        .collect();
    StateVector::from_amplitudes(num_sites, amps)
}
