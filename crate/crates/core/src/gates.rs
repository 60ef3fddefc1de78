//! Circuit representation and a dense statevector simulator for ququart
//! registers. Register position 0 is the most significant tensor factor.

use serde::{Deserialize, Serialize};

use crate::error::{QfmError, Result};
use crate::gamma::{rotation, Axis, QUDIT_DIM};
use crate::linalg::{c, kron, kron_all, ComplexMatrix, StateVector, C64};

/// Largest register for which [`circuit_unitary`] builds a dense matrix.
pub const MAX_UNITARY_SITES: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GateOp {
    /// Subspace rotation `e^{−i(φ/2)·g^{jk}}` on one site.
    Rot {
        site: usize,
        j: usize,
        k: usize,
        axis: Axis,
        phi: f64,
        #[serde(rename = "virtual")]
        is_virtual: bool,
    },
    /// `Σₙ |n⟩⟨n| ⊗ X̃ⁿ` (or its adjoint) with `X̃ = Σⱼ |j⟩⟨j+1 mod d|`.
    Csum { control: usize, target: usize, adjoint: bool },
}

impl GateOp {
    pub fn rotation(site: usize, j: usize, k: usize, axis: Axis, phi: f64) -> Self {
        GateOp::Rot { site, j, k, axis, phi, is_virtual: false }
    }

    pub fn virtual_z(site: usize, j: usize, k: usize, phi: f64) -> Self {
        GateOp::Rot { site, j, k, axis: Axis::Z, phi, is_virtual: true }
    }

    pub fn csum(control: usize, target: usize) -> Self {
        GateOp::Csum { control, target, adjoint: false }
    }

    pub fn csum_dagger(control: usize, target: usize) -> Self {
        GateOp::Csum { control, target, adjoint: true }
    }

    pub fn is_virtual(&self) -> bool {
        matches!(self, GateOp::Rot { is_virtual: true, .. })
    }

    pub fn is_two_qudit(&self) -> bool {
        matches!(self, GateOp::Csum { .. })
    }

    pub fn sites(&self) -> Vec<usize> {
        match *self {
            GateOp::Rot { site, .. } => vec![site],
            GateOp::Csum { control, target, .. } => vec![control, target],
        }
    }

    /// Inverse gate: negated angle, or flipped adjoint flag.
    pub fn inverse(&self) -> Self {
        match *self {
            GateOp::Rot { site, j, k, axis, phi, is_virtual } => {
                GateOp::Rot { site, j, k, axis, phi: -phi, is_virtual }
            }
            GateOp::Csum { control, target, adjoint } => {
                GateOp::Csum { control, target, adjoint: !adjoint }
            }
        }
    }

    pub fn validate(&self, site_count: usize) -> Result<()> {
        for s in self.sites() {
            if s >= site_count {
                return Err(QfmError::SiteOutOfRange { site: s, sites: site_count });
            }
        }
        match *self {
            GateOp::Rot { j, k, axis, is_virtual, phi, .. } => {
                if !(j < k && k < QUDIT_DIM) {
                    return Err(QfmError::InvalidSubspace { j, k });
                }
                if is_virtual && axis != Axis::Z {
                    return Err(QfmError::InvalidArgument(format!(
                        "virtual rotation about {axis} (only z may be virtual)"
                    )));
                }
                if !phi.is_finite() {
                    return Err(QfmError::InvalidArgument("non-finite rotation angle".into()));
                }
            }
            GateOp::Csum { control, target, .. } => {
                if control == target {
                    return Err(QfmError::InvalidArgument(format!(
                        "csum control and target are both site {control}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// The gate's matrix on its own sites: 4×4 for rotations, 16×16 in
    /// (control ⊗ target) order for CSUM.
    pub fn local_matrix(&self) -> Result<ComplexMatrix> {
        match *self {
            GateOp::Rot { j, k, axis, phi, .. } => rotation(j, k, axis, phi),
            GateOp::Csum { adjoint, .. } => Ok(csum_matrix(adjoint)),
        }
    }
}

/// A labelled contiguous run of ops inside a circuit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub label: String,
    pub start: usize,
    pub len: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    #[serde(rename = "sites")]
    pub site_count: usize,
    pub ops: Vec<GateOp>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub segments: Vec<Segment>,
}

impl Circuit {
    pub fn new(site_count: usize) -> Self {
        Self { site_count, ops: Vec::new(), segments: Vec::new() }
    }

    pub fn push(&mut self, op: GateOp) -> Result<()> {
        op.validate(self.site_count)?;
        self.ops.push(op);
        Ok(())
    }

    pub fn extend(&mut self, ops: impl IntoIterator<Item = GateOp>) -> Result<()> {
        for op in ops {
            self.push(op)?;
        }
        Ok(())
    }

    /// Appends `ops` as one labelled segment.
    pub fn push_segment(
        &mut self,
        label: impl Into<String>,
        ops: impl IntoIterator<Item = GateOp>,
    ) -> Result<()> {
        let start = self.ops.len();
        self.extend(ops)?;
        self.segments.push(Segment { label: label.into(), start, len: self.ops.len() - start });
        Ok(())
    }

    /// Appends another circuit on the same register, keeping its segments.
    pub fn append(&mut self, other: &Circuit) -> Result<()> {
        if other.site_count != self.site_count {
            return Err(QfmError::DimensionMismatch(format!(
                "appending a {}-site circuit to a {}-site circuit",
                other.site_count, self.site_count
            )));
        }
        let offset = self.ops.len();
        self.extend(other.ops.iter().copied())?;
        self.segments.extend(other.segments.iter().map(|s| Segment {
            label: s.label.clone(),
            start: s.start + offset,
            len: s.len,
        }));
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.ops.iter().try_for_each(|op| op.validate(self.site_count))
    }

    pub fn inverse(&self) -> Circuit {
        Circuit {
            site_count: self.site_count,
            ops: self.ops.iter().rev().map(GateOp::inverse).collect(),
            segments: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| QfmError::Parse(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let c: Circuit = serde_json::from_str(text).map_err(|e| QfmError::Parse(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }
}

/// Cyclic shift `X̃ = Σⱼ |j⟩⟨j+1 mod d|`, which maps `|j+1⟩ → |j⟩`.
pub fn shift_matrix(d: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, d, |i, j| if j == (i + 1) % d { c(1.0, 0.0) } else { c(0.0, 0.0) })
}

/// Generalized CSUM on two `d`-level qudits: control level `n` applies `X̃ⁿ`.
pub fn csum_matrix_dim(d: usize, adjoint: bool) -> ComplexMatrix {
    let mut u = ComplexMatrix::zeros(d * d, d * d);
    for n in 0..d {
        for b in 0..d {
            // X̃ⁿ|b⟩ = |b − n mod d⟩
            let out = (b + d - n) % d;
            u[(n * d + out, n * d + b)] = c(1.0, 0.0);
        }
    }
    if adjoint {
        u.adjoint()
    } else {
        u
    }
}

pub fn csum_matrix(adjoint: bool) -> ComplexMatrix {
    csum_matrix_dim(QUDIT_DIM, adjoint)
}

fn stride(site: usize, site_count: usize) -> usize {
    QUDIT_DIM.pow((site_count - 1 - site) as u32)
}

fn apply_local(amps: &mut [C64], site_count: usize, sites: &[usize], u: &ComplexMatrix) {
    let strides: Vec<usize> = sites.iter().map(|&s| stride(s, site_count)).collect();
    let block = u.rows();
    let offsets: Vec<usize> = (0..block)
        .map(|local| {
            let mut rem = local;
            let mut off = 0;
            for &st in strides.iter().rev() {
                off += (rem % QUDIT_DIM) * st;
                rem /= QUDIT_DIM;
            }
            off
        })
        .collect();
    let mut gathered = vec![c(0.0, 0.0); block];
    for base in 0..amps.len() {
        // visit each block once, from the index whose gate digits are all zero
        if strides.iter().any(|&st| (base / st) % QUDIT_DIM != 0) {
            continue;
        }
        for (g, off) in gathered.iter_mut().zip(&offsets) {
            *g = amps[base + off];
        }
        for (r, off) in offsets.iter().enumerate() {
            amps[base + off] = u.row(r).iter().zip(&gathered).map(|(a, b)| a * b).sum();
        }
    }
}

/// Applies one gate in place.
pub fn apply_in_place(state: &mut StateVector, op: &GateOp) -> Result<()> {
    let site_count = state.site_count();
    op.validate(site_count)?;
    let u = op.local_matrix()?;
    apply_local(state.amplitudes_mut(), site_count, &op.sites(), &u);
    Ok(())
}

/// Returns `U·ψ` for the embedded gate `U`.
pub fn apply(state: &StateVector, op: &GateOp) -> Result<StateVector> {
    let mut out = state.clone();
    apply_in_place(&mut out, op)?;
    Ok(out)
}

/// Runs a whole circuit on a state.
pub fn run(circuit: &Circuit, state: &StateVector) -> Result<StateVector> {
    if state.site_count() != circuit.site_count {
        return Err(QfmError::DimensionMismatch(format!(
            "{}-site state for a {}-site circuit",
            state.site_count(),
            circuit.site_count
        )));
    }
    let mut out = state.clone();
    for op in &circuit.ops {
        apply_in_place(&mut out, op)?;
    }
    Ok(out)
}

/// Dense embedding of a gate in the full register, built from Kronecker
/// products where the sites are ordered and adjacent.
pub fn embed(op: &GateOp, site_count: usize) -> Result<ComplexMatrix> {
    op.validate(site_count)?;
    let u = op.local_matrix()?;
    let id = ComplexMatrix::identity(QUDIT_DIM);
    match *op {
        GateOp::Rot { site, .. } => {
            let factors: Vec<&ComplexMatrix> =
                (0..site_count).map(|s| if s == site { &u } else { &id }).collect();
            Ok(kron_all(factors))
        }
        GateOp::Csum { control, target, .. } if target == control + 1 => {
            let left = ComplexMatrix::identity(QUDIT_DIM.pow(control as u32));
            let right = ComplexMatrix::identity(QUDIT_DIM.pow((site_count - target - 1) as u32));
            Ok(kron(&kron(&left, &u), &right))
        }
        GateOp::Csum { control, target, .. } => {
            let dim = QUDIT_DIM.pow(site_count as u32);
            let (sc, st) = (stride(control, site_count), stride(target, site_count));
            let digit = |idx: usize, s: usize| (idx / s) % QUDIT_DIM;
            Ok(ComplexMatrix::from_fn(dim, dim, |i, j| {
                let rest_i = i - digit(i, sc) * sc - digit(i, st) * st;
                let rest_j = j - digit(j, sc) * sc - digit(j, st) * st;
                if rest_i != rest_j {
                    return c(0.0, 0.0);
                }
                u[(digit(i, sc) * QUDIT_DIM + digit(i, st), digit(j, sc) * QUDIT_DIM + digit(j, st))]
            }))
        }
    }
}

/// Ordered product of embedded gates; the first op is the rightmost factor.
pub fn circuit_unitary(circuit: &Circuit) -> Result<ComplexMatrix> {
    if circuit.site_count > MAX_UNITARY_SITES {
        return Err(QfmError::DimensionTooLarge {
            sites: circuit.site_count,
            max: MAX_UNITARY_SITES,
        });
    }
    let dim = QUDIT_DIM.pow(circuit.site_count as u32);
    circuit
        .ops
        .iter()
        .try_fold(ComplexMatrix::identity(dim), |acc, op| Ok(embed(op, circuit.site_count)?.matmul(&acc)))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateTally {
    pub two_qudit: usize,
    pub single_qudit_physical: usize,
    pub virtual_z: usize,
}

impl std::ops::Add for GateTally {
    type Output = GateTally;

    fn add(self, o: GateTally) -> GateTally {
        GateTally {
            two_qudit: self.two_qudit + o.two_qudit,
            single_qudit_physical: self.single_qudit_physical + o.single_qudit_physical,
            virtual_z: self.virtual_z + o.virtual_z,
        }
    }
}

pub fn count_gates(circuit: &Circuit) -> GateTally {
    circuit.ops.iter().fold(GateTally::default(), |mut t, op| {
        if op.is_two_qudit() {
            t.two_qudit += 1;
        } else if op.is_virtual() {
            t.virtual_z += 1;
        } else {
            t.single_qudit_physical += 1;
        }
        t
    })
}
