//! Clifford algebra generators in the Majorana basis and the generalized
//! Gell-Mann (GGM) subspace operators of a ququart.
//!
//! Ququart levels are the tensor basis of two two-level factors, so level
//! `2a + b` corresponds to `|a⟩⊗|b⟩`.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{QfmError, Result};
use crate::gates::GateOp;
use crate::linalg::{c, cos_sin, kron, ComplexMatrix, C64};

/// Local dimension of a ququart.
pub const QUDIT_DIM: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GammaIndex {
    One,
    Two,
    Three,
    Four,
    Tilde,
}

impl GammaIndex {
    pub const GENERATORS: [GammaIndex; 4] =
        [GammaIndex::One, GammaIndex::Two, GammaIndex::Three, GammaIndex::Four];
    pub const ALL: [GammaIndex; 5] = [
        GammaIndex::One,
        GammaIndex::Two,
        GammaIndex::Three,
        GammaIndex::Four,
        GammaIndex::Tilde,
    ];
}

fn sigma(axis: Axis) -> ComplexMatrix {
    let (o, z) = (c(1.0, 0.0), c(0.0, 0.0));
    let data = match axis {
        Axis::X => vec![z, o, o, z],
        Axis::Y => vec![z, c(0.0, -1.0), c(0.0, 1.0), z],
        Axis::Z => vec![o, z, z, -o],
    };
    ComplexMatrix::from_row_major(2, 2, data).expect("2x2")
}

/// The four generators Γ₁..Γ₄ of 𝒞ℓ₀,₄ and Γ̃ = −Γ₁Γ₂Γ₃Γ₄.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaSet {
    pub gamma: [ComplexMatrix; 4],
    pub gamma_tilde: ComplexMatrix,
}

/// Majorana basis: Γ₁ = σx⊗I, Γ₂ = σy⊗I, Γ₃ = σz⊗σx, Γ₄ = σz⊗σy, Γ̃ = σz⊗σz.
pub fn make_gamma_set() -> GammaSet {
    let id = ComplexMatrix::identity(2);
    let (sx, sy, sz) = (sigma(Axis::X), sigma(Axis::Y), sigma(Axis::Z));
    GammaSet {
        gamma: [kron(&sx, &id), kron(&sy, &id), kron(&sz, &sx), kron(&sz, &sy)],
        gamma_tilde: kron(&sz, &sz),
    }
}

impl GammaSet {
    pub fn get(&self, index: GammaIndex) -> &ComplexMatrix {
        match index {
            GammaIndex::One => &self.gamma[0],
            GammaIndex::Two => &self.gamma[1],
            GammaIndex::Three => &self.gamma[2],
            GammaIndex::Four => &self.gamma[3],
            GammaIndex::Tilde => &self.gamma_tilde,
        }
    }

    /// Checks every algebraic relation exactly: {Γᵢ,Γⱼ} = 2δᵢⱼ·I,
    /// {Γ̃,Γᵢ} = 0, Γ̃ = −Γ₁Γ₂Γ₃Γ₄. Entries are Gaussian integers, so
    /// floating-point arithmetic is exact here.
    pub fn relations_hold_exactly(&self) -> bool {
        let two_id = ComplexMatrix::identity(QUDIT_DIM).scale_real(2.0);
        for i in 0..4 {
            for j in 0..4 {
                let ac = self.gamma[i].anticommutator(&self.gamma[j]);
                let ok = if i == j { ac == two_id } else { ac.is_zero() };
                if !ok {
                    return false;
                }
            }
            if !self.gamma_tilde.anticommutator(&self.gamma[i]).is_zero() {
                return false;
            }
        }
        let product = self.gamma[0]
            .matmul(&self.gamma[1])
            .matmul(&self.gamma[2])
            .matmul(&self.gamma[3])
            .scale_real(-1.0);
        product == self.gamma_tilde
    }
}

/// A Pauli matrix embedded in the `(j, k)` two-level subspace of a qudit.
#[derive(Debug, Clone, PartialEq)]
pub struct GgmOperator {
    pub j: usize,
    pub k: usize,
    pub axis: Axis,
    pub matrix: ComplexMatrix,
}

fn check_subspace(dim: usize, j: usize, k: usize) -> Result<()> {
    if j < k && k < dim {
        Ok(())
    } else {
        Err(QfmError::InvalidSubspace { j, k })
    }
}

/// GGM operator in a `dim`-level qudit:
/// x = |j⟩⟨k| + |k⟩⟨j|, y = −i|j⟩⟨k| + i|k⟩⟨j|, z = |j⟩⟨j| − |k⟩⟨k|.
pub fn ggm_in_dim(dim: usize, j: usize, k: usize, axis: Axis) -> Result<GgmOperator> {
    check_subspace(dim, j, k)?;
    let mut m = ComplexMatrix::zeros(dim, dim);
    match axis {
        Axis::X => {
            m[(j, k)] = c(1.0, 0.0);
            m[(k, j)] = c(1.0, 0.0);
        }
        Axis::Y => {
            m[(j, k)] = c(0.0, -1.0);
            m[(k, j)] = c(0.0, 1.0);
        }
        Axis::Z => {
            m[(j, j)] = c(1.0, 0.0);
            m[(k, k)] = c(-1.0, 0.0);
        }
    }
    Ok(GgmOperator { j, k, axis, matrix: m })
}

pub fn ggm(j: usize, k: usize, axis: Axis) -> Result<GgmOperator> {
    ggm_in_dim(QUDIT_DIM, j, k, axis)
}

/// `e^{−i(φ/2)·g^{jk}}`, identity on the complementary levels.
pub fn rotation(j: usize, k: usize, axis: Axis, phi: f64) -> Result<ComplexMatrix> {
    check_subspace(QUDIT_DIM, j, k)?;
    let (cos, sin) = cos_sin(phi / 2.0);
    let mut m = ComplexMatrix::identity(QUDIT_DIM);
    let minus_i_sin = c(0.0, -sin);
    match axis {
        Axis::X => {
            m[(j, j)] = c(cos, 0.0);
            m[(k, k)] = c(cos, 0.0);
            m[(j, k)] = minus_i_sin;
            m[(k, j)] = minus_i_sin;
        }
        Axis::Y => {
            // −i·sin·(−i|j⟩⟨k| + i|k⟩⟨j|)
            m[(j, j)] = c(cos, 0.0);
            m[(k, k)] = c(cos, 0.0);
            m[(j, k)] = c(-sin, 0.0);
            m[(k, j)] = c(sin, 0.0);
        }
        Axis::Z => {
            m[(j, j)] = c(cos, -sin);
            m[(k, k)] = c(cos, sin);
        }
    }
    Ok(m)
}

/// Decomposition of a Majorana-basis matrix into GGM operators (indices
/// normalized to j < k).
pub fn gamma_as_ggm(index: GammaIndex) -> Vec<(f64, GgmOperator)> {
    let term = |coef: f64, j, k, axis| (coef, ggm(j, k, axis).expect("valid subspace"));
    match index {
        GammaIndex::One => vec![term(1.0, 0, 2, Axis::X), term(1.0, 1, 3, Axis::X)],
        GammaIndex::Two => vec![term(1.0, 0, 2, Axis::Y), term(1.0, 1, 3, Axis::Y)],
        GammaIndex::Three => vec![term(1.0, 0, 1, Axis::X), term(-1.0, 2, 3, Axis::X)],
        // y^{32} = −y^{23}
        GammaIndex::Four => vec![term(1.0, 0, 1, Axis::Y), term(-1.0, 2, 3, Axis::Y)],
        GammaIndex::Tilde => vec![term(1.0, 0, 1, Axis::Z), term(-1.0, 2, 3, Axis::Z)],
    }
}

pub fn reconstruct_from_ggm(terms: &[(f64, GgmOperator)]) -> ComplexMatrix {
    terms.iter().fold(ComplexMatrix::zeros(QUDIT_DIM, QUDIT_DIM), |acc, (coef, op)| {
        &acc + &op.matrix.scale_real(*coef)
    })
}

fn nonadjacent_levels(m: usize) -> Result<()> {
    if m + 2 < QUDIT_DIM {
        Ok(())
    } else {
        Err(QfmError::InvalidSubspace { j: m, k: m + 2 })
    }
}

/// `X^{m,m+2}_φ = Y^{m,m+1}_{−π} · X^{m+1,m+2}_φ · Y^{m,m+1}_{π}`, returned in
/// application order (rightmost factor first).
pub fn nonadjacent_x(site: usize, m: usize, phi: f64) -> Result<Vec<GateOp>> {
    nonadjacent_levels(m)?;
    Ok(vec![
        GateOp::rotation(site, m, m + 1, Axis::Y, PI),
        GateOp::rotation(site, m + 1, m + 2, Axis::X, phi),
        GateOp::rotation(site, m, m + 1, Axis::Y, -PI),
    ])
}

/// `Y^{m,m+2}_φ = Y^{m,m+1}_{−π} · Y^{m+1,m+2}_φ · Y^{m,m+1}_{π}` up to a
/// global phase. The conjugating pair is the same as for [`nonadjacent_x`];
/// conjugating by X-rotations instead would produce an X rotation.
pub fn nonadjacent_y(site: usize, m: usize, phi: f64) -> Result<Vec<GateOp>> {
    nonadjacent_levels(m)?;
    Ok(vec![
        GateOp::rotation(site, m, m + 1, Axis::Y, PI),
        GateOp::rotation(site, m + 1, m + 2, Axis::Y, phi),
        GateOp::rotation(site, m, m + 1, Axis::Y, -PI),
    ])
}

/// Virtual-Z frame change realizing `diag(e^{iα₀}, …, e^{iα₃})` up to a
/// global phase as `Z^{01} Z^{02} Z^{03}`. Zero-angle rotations are omitted.
pub fn diagonal_frame(site: usize, phases: [f64; QUDIT_DIM]) -> Vec<GateOp> {
    let rel: Vec<f64> = phases[1..].iter().map(|a| a - phases[0]).collect();
    let half_sum = rel.iter().sum::<f64>() / 2.0;
    rel.iter()
        .enumerate()
        .map(|(idx, r)| (idx + 1, 2.0 * r - half_sum))
        .filter(|&(_, angle)| angle != 0.0)
        .map(|(k, angle)| GateOp::virtual_z(site, 0, k, angle))
        .collect()
}

/// Phases of a diagonal unitary, as used by [`diagonal_frame`].
pub fn diagonal_phases(d: &[C64; QUDIT_DIM]) -> [f64; QUDIT_DIM] {
    d.map(|z| z.arg())
}
