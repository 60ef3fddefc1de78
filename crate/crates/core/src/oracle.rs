//! Exact Hubbard reference in the occupation-number basis.
//!
//! Modes are ordered (↑₁, ↓₁, ↑₂, ↓₂, …); mode 0 is the most significant bit
//! of a basis index. Nothing here touches the Γ matrices.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{QfmError, Result};
use crate::linalg::{c, eigh, ComplexMatrix, HermitianEigen, StateVector, C64};
use crate::qfm::{FockLabel, LatticeGeometry, OperatorKind, Spin, MAX_DENSE_SITES};

/// Largest register for thermal traces.
pub const MAX_THERMAL_SITES: usize = 4;

/// Per-site occupations, written as comma-separated tokens `0`, `u`, `d`, `ud`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct InitialState(Vec<FockLabel>);

impl InitialState {
    pub fn new(labels: Vec<FockLabel>) -> Result<Self> {
        if labels.is_empty() {
            return Err(QfmError::InvalidArgument("initial state has no sites".into()));
        }
        Ok(Self(labels))
    }

    pub fn labels(&self) -> &[FockLabel] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn occupation(&self, site: usize, spin: Spin) -> f64 {
        if self.0[site - 1].occupation(spin) {
            1.0
        } else {
            0.0
        }
    }
}

impl FromStr for InitialState {
    type Err = QfmError;

    fn from_str(s: &str) -> Result<Self> {
        Self::new(s.split(',').map(str::parse).collect::<Result<Vec<_>>>()?)
    }
}

impl fmt::Display for InitialState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tokens: Vec<&str> = self.0.iter().map(|l| l.token()).collect();
        f.write_str(&tokens.join(","))
    }
}

impl TryFrom<String> for InitialState {
    type Error = QfmError;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<InitialState> for String {
    fn from(s: InitialState) -> String {
        s.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockBasis {
    pub sites: usize,
}

impl FockBasis {
    pub fn new(sites: usize) -> Result<Self> {
        if sites == 0 || sites > MAX_DENSE_SITES {
            return Err(QfmError::DimensionTooLarge { sites, max: MAX_DENSE_SITES });
        }
        Ok(Self { sites })
    }

    pub fn modes(&self) -> usize {
        2 * self.sites
    }

    pub fn dim(&self) -> usize {
        1 << self.modes()
    }

    pub fn mode(&self, site: usize, spin: Spin) -> Result<usize> {
        if site == 0 || site > self.sites {
            return Err(QfmError::SiteOutOfRange { site, sites: self.sites });
        }
        Ok(2 * (site - 1) + spin.index())
    }

    fn bit(&self, mode: usize) -> usize {
        1 << (self.modes() - 1 - mode)
    }

    pub fn occupied(&self, index: usize, mode: usize) -> bool {
        index & self.bit(mode) != 0
    }

    pub fn index_of(&self, labels: &[FockLabel]) -> Result<usize> {
        if labels.len() != self.sites {
            return Err(QfmError::DimensionMismatch(format!(
                "{} labels for {} sites",
                labels.len(),
                self.sites
            )));
        }
        Ok(labels.iter().fold(0, |acc, l| {
            (acc << 2) | (usize::from(l.occupation(Spin::Up)) << 1) | usize::from(l.occupation(Spin::Down))
        }))
    }

    pub fn labels_of(&self, index: usize) -> Vec<FockLabel> {
        (1..=self.sites)
            .map(|m| {
                let up = self.occupied(index, 2 * (m - 1));
                let down = self.occupied(index, 2 * (m - 1) + 1);
                FockLabel::from_occupations(up, down)
            })
            .collect()
    }

    /// `c_k` or `c†_k` on a basis index: `(sign, new_index)`, or `None` if it
    /// annihilates the state.
    pub fn act(&self, mode: usize, kind: OperatorKind, index: usize) -> Option<(f64, usize)> {
        let occupied = self.occupied(index, mode);
        let next = match (kind, occupied) {
            (OperatorKind::Annihilate, true) | (OperatorKind::Create, false) => index ^ self.bit(mode),
            _ => return None,
        };
        let preceding = (0..mode).filter(|&k| self.occupied(index, k)).count();
        Some((if preceding % 2 == 0 { 1.0 } else { -1.0 }, next))
    }

    pub fn operator(&self, site: usize, spin: Spin, kind: OperatorKind) -> Result<ComplexMatrix> {
        let mode = self.mode(site, spin)?;
        let mut m = ComplexMatrix::zeros(self.dim(), self.dim());
        for col in 0..self.dim() {
            if let Some((sign, row)) = self.act(mode, kind, col) {
                m[(row, col)] = c(sign, 0.0);
            }
        }
        Ok(m)
    }

    pub fn apply(&self, site: usize, spin: Spin, kind: OperatorKind, psi: &[C64]) -> Result<Vec<C64>> {
        let mode = self.mode(site, spin)?;
        let mut out = vec![c(0.0, 0.0); self.dim()];
        for (col, amp) in psi.iter().enumerate() {
            if let Some((sign, row)) = self.act(mode, kind, col) {
                out[row] += amp * sign;
            }
        }
        Ok(out)
    }

    pub fn number(&self, site: usize, spin: Spin, index: usize) -> Result<f64> {
        Ok(if self.occupied(index, self.mode(site, spin)?) { 1.0 } else { 0.0 })
    }
}

/// Hubbard Hamiltonian: `−J Σ_bonds,ν (c†_{aν}c_{bν} + h.c.) + v Σ_m N_{m↑}N_{m↓}`.
pub fn fermionic_hamiltonian(geometry: &LatticeGeometry, j: f64, v: f64) -> Result<ComplexMatrix> {
    let basis = FockBasis::new(geometry.site_count)?;
    let dim = basis.dim();
    let mut h = ComplexMatrix::zeros(dim, dim);
    for col in 0..dim {
        for m in 1..=geometry.site_count {
            let both = basis.number(m, Spin::Up, col)? * basis.number(m, Spin::Down, col)?;
            h[(col, col)] += c(v * both, 0.0);
        }
        for &(a, b) in &geometry.bonds {
            for spin in Spin::BOTH {
                for (to, from) in [(a, b), (b, a)] {
                    let hopped = basis
                        .act(basis.mode(from, spin)?, OperatorKind::Annihilate, col)
                        .and_then(|(s1, mid)| {
                            basis.act(basis.mode(to, spin).ok()?, OperatorKind::Create, mid).map(|(s2, row)| (s1 * s2, row))
                        });
                    if let Some((sign, row)) = hopped {
                        h[(row, col)] += c(-j * sign, 0.0);
                    }
                }
            }
        }
    }
    Ok(h)
}

/// Exact reference for one `(geometry, J, v)`: Hamiltonian plus its
/// eigendecomposition.
#[derive(Debug, Clone)]
pub struct ExactOracle {
    pub geometry: LatticeGeometry,
    pub j: f64,
    pub v: f64,
    pub basis: FockBasis,
    pub hamiltonian: ComplexMatrix,
    pub eigen: HermitianEigen,
}

impl ExactOracle {
    pub fn new(geometry: &LatticeGeometry, j: f64, v: f64) -> Result<Self> {
        let hamiltonian = fermionic_hamiltonian(geometry, j, v)?;
        let eigen = eigh(&hamiltonian)?;
        Ok(Self {
            geometry: geometry.clone(),
            j,
            v,
            basis: FockBasis::new(geometry.site_count)?,
            hamiltonian,
            eigen,
        })
    }

    pub fn site_count(&self) -> usize {
        self.geometry.site_count
    }

    pub fn initial_vector(&self, psi0: &InitialState) -> Result<Vec<C64>> {
        let idx = self.basis.index_of(psi0.labels())?;
        let mut psi = vec![c(0.0, 0.0); self.basis.dim()];
        psi[idx] = c(1.0, 0.0);
        Ok(psi)
    }

    pub fn evolve_vector(&self, psi: &[C64], t: f64) -> Vec<C64> {
        if t == 0.0 {
            return psi.to_vec();
        }
        self.eigen.evolve(psi, t)
    }

    pub fn population_of(&self, psi: &[C64], site: usize, spin: Spin) -> Result<f64> {
        let mode = self.basis.mode(site, spin)?;
        Ok(psi
            .iter()
            .enumerate()
            .filter(|&(idx, _)| self.basis.occupied(idx, mode))
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }
}

pub fn exact_evolve(oracle: &ExactOracle, psi0: &InitialState, t: f64) -> Result<StateVector> {
    let psi = oracle.initial_vector(psi0)?;
    StateVector::new(oracle.evolve_vector(&psi, t))
}

pub fn exact_population(oracle: &ExactOracle, psi0: &InitialState, t: f64, site: usize, spin: Spin) -> Result<f64> {
    let psi = oracle.evolve_vector(&oracle.initial_vector(psi0)?, t);
    oracle.population_of(&psi, site, spin)
}

fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// `G^<_{ij,ν}(t) = i⟨ψ₀|c†_{jν}(0) c_{iν}(t)|ψ₀⟩ = i⟨U c_j ψ₀ | c_i U ψ₀⟩`.
pub fn lesser_gf(oracle: &ExactOracle, psi0: &InitialState, i: usize, j: usize, spin: Spin, t: f64) -> Result<C64> {
    Ok(lesser_gf_series(oracle, psi0, i, j, spin, &[t])?[0])
}

pub fn lesser_gf_series(
    oracle: &ExactOracle,
    psi0: &InitialState,
    i: usize,
    j: usize,
    spin: Spin,
    times: &[f64],
) -> Result<Vec<C64>> {
    let psi = oracle.initial_vector(psi0)?;
    let cj_psi = oracle.basis.apply(j, spin, OperatorKind::Annihilate, &psi)?;
    times
        .iter()
        .map(|&t| {
            let left = oracle.evolve_vector(&cj_psi, t);
            let right = oracle.basis.apply(i, spin, OperatorKind::Annihilate, &oracle.evolve_vector(&psi, t))?;
            Ok(c(0.0, 1.0) * inner(&left, &right))
        })
        .collect()
}

/// Heaviside step with the half-maximum convention at `t = 0`.
pub fn heaviside(t: f64) -> f64 {
    if t > 0.0 {
        1.0
    } else if t == 0.0 {
        0.5
    } else {
        0.0
    }
}

/// Thermal (or, for `beta = ∞`, ground-manifold) weights of the eigenstates.
fn boltzmann_weights(values: &[f64], beta: f64) -> Vec<f64> {
    let e0 = values.iter().copied().fold(f64::INFINITY, f64::min);
    let raw: Vec<f64> = if beta.is_infinite() {
        values.iter().map(|&e| if e - e0 < 1e-9 { 1.0 } else { 0.0 }).collect()
    } else {
        values.iter().map(|&e| (-beta * (e - e0)).exp()).collect()
    };
    let z: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / z).collect()
}

/// `G^R_{ij,ν}(t) = −iθ(t)·Tr[ρ_β {c_{iν}(t), c†_{jν}(0)}]`.
pub fn retarded_gf(oracle: &ExactOracle, beta: f64, i: usize, j: usize, spin: Spin, t: f64) -> Result<C64> {
    Ok(retarded_gf_series(oracle, beta, i, j, spin, &[t])?[0])
}

pub fn retarded_gf_series(
    oracle: &ExactOracle,
    beta: f64,
    i: usize,
    j: usize,
    spin: Spin,
    times: &[f64],
) -> Result<Vec<C64>> {
    if oracle.site_count() > MAX_THERMAL_SITES {
        return Err(QfmError::DimensionTooLarge { sites: oracle.site_count(), max: MAX_THERMAL_SITES });
    }
    if beta.is_nan() || beta < 0.0 {
        return Err(QfmError::InvalidArgument(format!("inverse temperature {beta} must be non-negative")));
    }
    let vecs = &oracle.eigen.vectors;
    let energies = &oracle.eigen.values;
    let to_eigen = |m: &ComplexMatrix| vecs.adjoint().matmul(m).matmul(vecs);
    let ci = to_eigen(&oracle.basis.operator(i, spin, OperatorKind::Annihilate)?);
    let cj_dag = to_eigen(&oracle.basis.operator(j, spin, OperatorKind::Create)?);
    let weights = boltzmann_weights(energies, beta);
    let dim = energies.len();
    // Lehmann terms (amplitude, frequency): e^{-i ω t} summed over pairs.
    let mut poles: Vec<(C64, f64)> = Vec::new();
    for (n, &w) in weights.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        for m in 0..dim {
            let particle = ci[(n, m)] * cj_dag[(m, n)];
            if particle.norm() > 0.0 {
                poles.push((particle * w, energies[m] - energies[n]));
            }
            let hole = cj_dag[(n, m)] * ci[(m, n)];
            if hole.norm() > 0.0 {
                poles.push((hole * w, energies[n] - energies[m]));
            }
        }
    }
    Ok(times
        .iter()
        .map(|&t| {
            let step = heaviside(t);
            if step == 0.0 {
                return c(0.0, 0.0);
            }
            let sum: C64 = poles.iter().map(|&(a, omega)| a * C64::from_polar(1.0, -omega * t)).sum();
            c(0.0, -step) * sum
        })
        .collect())
}

/// Total particle number and `2·S_z` of a state.
pub fn charge_and_spin(oracle: &ExactOracle, psi: &[C64]) -> Result<(f64, f64)> {
    let mut n = 0.0;
    let mut sz = 0.0;
    for m in 1..=oracle.site_count() {
        let up = oracle.population_of(psi, m, Spin::Up)?;
        let down = oracle.population_of(psi, m, Spin::Down)?;
        n += up + down;
        sz += up - down;
    }
    Ok((n, sz))
}
