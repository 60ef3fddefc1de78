//! Operator Schmidt decomposition and synthesis of the four hopping
//! evolutions into CSUM/CSUM† plus single-qudit rotations.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{QfmError, Result};
use crate::gamma::{diagonal_frame, nonadjacent_x, nonadjacent_y, Axis, QUDIT_DIM};
use crate::gates::{circuit_unitary, count_gates, Circuit, GateOp, GateTally};
use crate::linalg::{expm, phase_aligned_residual, svd, ComplexMatrix};
use crate::qfm::{hopping_generator, LatticeGeometry, MappedHamiltonian};

/// Operator-norm residual above which synthesis is rejected.
pub const SYNTHESIS_TOL: f64 = 1e-8;

/// Schmidt coefficients below this are treated as zero.
pub const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct SchmidtDecomposition {
    /// Non-negative, descending.
    pub coefficients: Vec<f64>,
    pub left_ops: Vec<ComplexMatrix>,
    pub right_ops: Vec<ComplexMatrix>,
}

impl SchmidtDecomposition {
    pub fn rank(&self, tol: f64) -> usize {
        self.coefficients.iter().filter(|&&s| s > tol).count()
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        let dim = QUDIT_DIM * QUDIT_DIM;
        self.coefficients
            .iter()
            .zip(self.left_ops.iter().zip(&self.right_ops))
            .fold(ComplexMatrix::zeros(dim, dim), |acc, (&s, (a, b))| &acc + &a.kron(b).scale_real(s))
    }
}

/// Realigns `u` as `M̃[(i·4+i′),(j·4+j′)] = u[(i·4+j),(i′·4+j′)]`, takes its
/// SVD and folds the singular vectors back into 4×4 operator pairs.
pub fn osd(u: &ComplexMatrix) -> Result<SchmidtDecomposition> {
    let n = QUDIT_DIM * QUDIT_DIM;
    if u.rows() != n || u.cols() != n {
        return Err(QfmError::DimensionMismatch(format!(
            "operator Schmidt decomposition needs a 16×16 operator, got {}×{}",
            u.rows(),
            u.cols()
        )));
    }
    let d = QUDIT_DIM;
    let realigned = ComplexMatrix::from_fn(n, n, |row, col| {
        let (i, ip) = (row / d, row % d);
        let (j, jp) = (col / d, col % d);
        u[(i * d + j, ip * d + jp)]
    });
    let dec = svd(&realigned)?;
    let left_ops = (0..n)
        .map(|k| ComplexMatrix::from_fn(d, d, |i, ip| dec.u[(i * d + ip, k)]))
        .collect();
    let right_ops = (0..n)
        .map(|k| ComplexMatrix::from_fn(d, d, |j, jp| dec.v_adjoint[(k, j * d + jp)]))
        .collect();
    Ok(SchmidtDecomposition { coefficients: dec.singular, left_ops, right_ops })
}

/// Identifies `h₁..h₄`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct HoppingTerm(u8);

impl HoppingTerm {
    pub const ALL: [HoppingTerm; 4] = [HoppingTerm(1), HoppingTerm(2), HoppingTerm(3), HoppingTerm(4)];

    pub fn new(index: u8) -> Result<Self> {
        if (1..=4).contains(&index) {
            Ok(Self(index))
        } else {
            Err(QfmError::InvalidHoppingTerm(index))
        }
    }

    pub fn index(self) -> u8 {
        self.0
    }
}

impl TryFrom<u8> for HoppingTerm {
    type Error = QfmError;

    fn try_from(v: u8) -> Result<Self> {
        Self::new(v)
    }
}

impl From<HoppingTerm> for u8 {
    fn from(t: HoppingTerm) -> u8 {
        t.0
    }
}

/// `e^{−i·hᵢ·τ}` on two sites.
pub fn hopping_target(term: HoppingTerm, tau: f64) -> Result<ComplexMatrix> {
    if tau == 0.0 {
        return Ok(ComplexMatrix::identity(QUDIT_DIM * QUDIT_DIM));
    }
    expm(&hopping_generator(term.index() as usize)?, tau)
}

/// Middle layer on the control: `(axis, sign of the 02 angle, sign of the 13 angle)`.
fn middle_layer(term: HoppingTerm) -> (Axis, f64, f64) {
    match term.index() {
        1 => (Axis::X, 1.0, -1.0),
        2 => (Axis::X, 1.0, 1.0),
        3 => (Axis::Y, -1.0, -1.0),
        _ => (Axis::X, -1.0, -1.0),
    }
}

/// Local frame `V = D·S` conjugating the CSUM block: `S` is an `X^{12}_π`
/// level swap (when present), `D` a diagonal given as quarter-turn phases.
struct Frame {
    swap: bool,
    phases: [f64; QUDIT_DIM],
}

fn corrective_frames(term: HoppingTerm) -> (Frame, Frame) {
    let q = FRAC_PI_2;
    match term.index() {
        1 => (Frame { swap: false, phases: [0.0; 4] }, Frame { swap: false, phases: [0.0; 4] }),
        2 => (
            Frame { swap: false, phases: [0.0, 0.0, q, -q] },
            Frame { swap: false, phases: [0.0, 0.0, q, q] },
        ),
        3 => (
            Frame { swap: true, phases: [0.0, 0.0, 0.0, PI] },
            Frame { swap: true, phases: [0.0, -q, 0.0, -q] },
        ),
        _ => (
            Frame { swap: true, phases: [0.0, 0.0, 0.0, PI] },
            Frame { swap: true, phases: [0.0, PI, 0.0, PI] },
        ),
    }
}

fn frame_in(site: usize, frame: &Frame) -> Vec<GateOp> {
    let mut ops = diagonal_frame(site, frame.phases.map(|p| -p));
    if frame.swap {
        ops.push(GateOp::rotation(site, 1, 2, Axis::X, -PI));
    }
    ops
}

fn frame_out(site: usize, frame: &Frame) -> Vec<GateOp> {
    let mut ops = Vec::new();
    if frame.swap {
        ops.push(GateOp::rotation(site, 1, 2, Axis::X, PI));
    }
    ops.extend(diagonal_frame(site, frame.phases));
    ops
}

/// Gate sequence realizing `e^{−i·hᵢ·τ}` with `control` holding the first
/// tensor factor: frame in, CSUM†, middle layer on the control, CSUM, frame out.
pub fn hopping_ops(term: HoppingTerm, tau: f64, control: usize, target: usize) -> Result<Vec<GateOp>> {
    let (axis, s02, s13) = middle_layer(term);
    let (fc, ft) = corrective_frames(term);
    let decompose = match axis {
        Axis::Y => nonadjacent_y,
        _ => nonadjacent_x,
    };
    let mut ops = frame_in(control, &fc);
    ops.extend(frame_in(target, &ft));
    ops.push(GateOp::csum_dagger(control, target));
    ops.extend(decompose(control, 0, 2.0 * tau * s02)?);
    ops.extend(decompose(control, 1, 2.0 * tau * s13)?);
    ops.push(GateOp::csum(control, target));
    ops.extend(frame_out(control, &fc));
    ops.extend(frame_out(target, &ft));
    Ok(ops)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthesisReport {
    pub term: HoppingTerm,
    pub tau: f64,
    pub schmidt_coefficients: Vec<f64>,
    pub residual_norm: f64,
    pub gate_tally: GateTally,
}

impl SynthesisReport {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| QfmError::Parse(e.to_string()))
    }
}

fn synthesize(term: HoppingTerm, tau: f64) -> Result<(Circuit, f64)> {
    let mut circuit = Circuit::new(2);
    circuit.push_segment(format!("h{}", term.index()), hopping_ops(term, tau, 0, 1)?)?;
    let residual = phase_aligned_residual(&circuit_unitary(&circuit)?, &hopping_target(term, tau)?)?;
    Ok((circuit, residual))
}

/// Two-site circuit for `e^{−i·hᵢ·τ}`, checked against the target.
pub fn transpile_hopping(term: HoppingTerm, tau: f64) -> Result<Circuit> {
    let (circuit, residual) = synthesize(term, tau)?;
    if residual > SYNTHESIS_TOL {
        return Err(QfmError::SynthesisResidual { residual, tolerance: SYNTHESIS_TOL });
    }
    Ok(circuit)
}

/// Circuit plus Schmidt coefficients of the target, residual and tally.
pub fn synthesis_report(term: HoppingTerm, tau: f64) -> Result<(Circuit, SynthesisReport)> {
    let (circuit, residual) = synthesize(term, tau)?;
    let mut coefficients = osd(&hopping_target(term, tau)?)?.coefficients;
    coefficients.retain(|&s| s > RANK_TOL);
    let report = SynthesisReport {
        term,
        tau,
        schmidt_coefficients: coefficients,
        residual_norm: residual,
        gate_tally: count_gates(&circuit),
    };
    if residual > SYNTHESIS_TOL {
        return Err(QfmError::SynthesisResidual { residual, tolerance: SYNTHESIS_TOL });
    }
    Ok((circuit, report))
}

/// Virtual-Z angle for one interaction slice: `Z^{01}Z^{02}Z^{03}` at this
/// angle equals `e^{−i·dt·int_term}` up to global phase.
pub fn interaction_angle(h: &MappedHamiltonian, dt: f64) -> f64 {
    2.0 * h.int_prefactor * h.v * dt
}

/// Angle of each `e^{−i·hᵢ·θ}` in one hopping slice (`H_hop = (J/2)·Σᵢhᵢ` per bond).
pub fn hopping_angle(h: &MappedHamiltonian, dt: f64) -> f64 {
    h.j * dt / 2.0
}

fn interaction_layer(h: &MappedHamiltonian, dt: f64) -> Vec<GateOp> {
    let phi = interaction_angle(h, dt);
    if phi == 0.0 {
        return Vec::new();
    }
    (0..h.site_count())
        .flat_map(|s| (1..QUDIT_DIM).map(move |k| GateOp::virtual_z(s, 0, k, phi)))
        .collect()
}

/// Odd bonds (starting at an odd site) before even bonds, keeping geometry
/// order within each group.
fn brick_order(geometry: &LatticeGeometry) -> Vec<(usize, usize)> {
    let (odd, even): (Vec<_>, Vec<_>) = geometry.bonds.iter().partition(|(a, _)| a % 2 == 1);
    odd.into_iter().chain(even).collect()
}

fn push_step(circuit: &mut Circuit, h: &MappedHamiltonian, dt: f64, step: usize, bonds: &[(usize, usize)]) -> Result<()> {
    let int_ops = interaction_layer(h, dt);
    if !int_ops.is_empty() {
        circuit.push_segment(format!("step {step} interaction"), int_ops)?;
    }
    let theta = hopping_angle(h, dt);
    if theta == 0.0 {
        return Ok(());
    }
    for &(a, b) in bonds {
        for term in HoppingTerm::ALL {
            let label = format!("step {step} bond {a}-{b} h{}", term.index());
            circuit.push_segment(label, hopping_ops(term, theta, a - 1, b - 1)?)?;
        }
    }
    Ok(())
}

/// `n` first-order Trotter steps of `e^{−iHτ}`: per step the interaction
/// virtual-Z layer, then every bond's four hopping terms in brick order.
/// Bonds whose hopping carries a Γ̃ string are rejected.
pub fn trotter_step_circuit(h: &MappedHamiltonian, tau: f64, n: usize) -> Result<Circuit> {
    if n == 0 {
        return Err(QfmError::InvalidArgument("Trotter step count must be at least 1".into()));
    }
    if let Some(&(a, b)) = h.geometry.bonds.iter().find(|&&bond| !h.geometry.is_register_local(bond)) {
        return Err(QfmError::NonLocalBond { a, b, string_len: b - a - 1 });
    }
    let mut circuit = Circuit::new(h.site_count());
    if tau == 0.0 {
        return Ok(circuit);
    }
    let bonds = brick_order(&h.geometry);
    let dt = tau / n as f64;
    for step in 1..=n {
        push_step(&mut circuit, h, dt, step, &bonds)?;
    }
    Ok(circuit)
}

/// One Trotter step with every bond's hopping sequence placed on its
/// endpoints, strings ignored. Used for gate counting on any geometry.
pub fn layout_step_circuit(h: &MappedHamiltonian, dt: f64) -> Result<Circuit> {
    let mut circuit = Circuit::new(h.site_count());
    push_step(&mut circuit, h, dt, 1, &brick_order(&h.geometry))?;
    Ok(circuit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::{csum_matrix, run};
    use crate::linalg::{c, StateVector};
    use crate::qfm::build_mapped_hamiltonian;

    fn term(i: u8) -> HoppingTerm {
        HoppingTerm::new(i).unwrap()
    }

    #[test]
    fn osd_of_identity_is_rank_one() {
        let dec = osd(&ComplexMatrix::identity(16)).unwrap();
        assert_eq!(dec.rank(RANK_TOL), 1);
        assert!((dec.coefficients[0] - 4.0).abs() < 1e-12);
        let half = ComplexMatrix::identity(4).scale_real(0.5);
        let (a, b) = (&dec.left_ops[0], &dec.right_ops[0]);
        assert!(phase_aligned_residual(a, &half).unwrap() < 1e-12);
        assert!(phase_aligned_residual(b, &half).unwrap() < 1e-12);
    }

    #[test]
    fn osd_of_csum_has_four_equal_coefficients() {
        let dec = osd(&csum_matrix(false)).unwrap();
        assert_eq!(dec.rank(RANK_TOL), 4);
        for s in &dec.coefficients[..4] {
            assert!((s - 2.0).abs() < 1e-12);
        }
        assert!(dec.reconstruct().max_abs_diff(&csum_matrix(false)) < 1e-12);
    }

    #[test]
    fn target_at_zero_is_identity() {
        assert_eq!(hopping_target(term(1), 0.0).unwrap(), ComplexMatrix::identity(16));
    }

    #[test]
    fn target_has_closed_form() {
        for t in HoppingTerm::ALL {
            let h = hopping_generator(t.index() as usize).unwrap();
            let tau: f64 = 0.7;
            let closed = &ComplexMatrix::identity(16).scale_real(tau.cos()) - &h.scale(c(0.0, tau.sin()));
            assert!(hopping_target(t, tau).unwrap().max_abs_diff(&closed) < 1e-12);
        }
    }

    #[test]
    fn all_terms_synthesize() {
        for t in HoppingTerm::ALL {
            for tau in [0.3, 0.7, 1.2, FRAC_PI_2, -0.4] {
                let (_, report) = synthesis_report(t, tau).unwrap();
                assert!(report.residual_norm < 1e-10, "h{} τ={tau}: {}", t.index(), report.residual_norm);
                assert_eq!(report.gate_tally.two_qudit, 2);
            }
        }
    }

    #[test]
    fn physical_single_qudit_counts_per_term() {
        let counts: Vec<usize> = HoppingTerm::ALL
            .iter()
            .map(|&t| count_gates(&transpile_hopping(t, 0.3).unwrap()).single_qudit_physical)
            .collect();
        assert_eq!(counts, vec![6, 6, 10, 10]);
    }

    #[test]
    fn invalid_term_index() {
        assert_eq!(HoppingTerm::new(0), Err(QfmError::InvalidHoppingTerm(0)));
        assert!(HoppingTerm::new(5).is_err());
    }

    #[test]
    fn zero_coupling_step_has_only_virtual_z() {
        let h = build_mapped_hamiltonian(&LatticeGeometry::chain(3), 0.0, 2.0).unwrap();
        let circuit = trotter_step_circuit(&h, 1.0, 1).unwrap();
        assert_eq!(circuit.len(), 9);
        assert!(circuit.ops.iter().all(GateOp::is_virtual));
    }

    #[test]
    fn zero_time_is_empty() {
        let h = build_mapped_hamiltonian(&LatticeGeometry::chain(2), 1.0, 2.0).unwrap();
        assert!(trotter_step_circuit(&h, 0.0, 5).unwrap().is_empty());
        assert!(trotter_step_circuit(&h, 1.0, 0).is_err());
    }

    #[test]
    fn interaction_layer_matches_expm() {
        let h = build_mapped_hamiltonian(&LatticeGeometry::chain(1), 0.0, 2.7).unwrap();
        let circuit = trotter_step_circuit(&h, 0.4, 1).unwrap();
        let expected = expm(&h.full_matrix().unwrap(), 0.4).unwrap();
        let got = circuit_unitary(&circuit).unwrap();
        assert!(phase_aligned_residual(&got, &expected).unwrap() < 1e-12);
    }

    #[test]
    fn ladder_rungs_are_rejected() {
        let h = build_mapped_hamiltonian(&LatticeGeometry::ladder(2), 1.0, 2.0).unwrap();
        assert_eq!(trotter_step_circuit(&h, 1.0, 1), Err(QfmError::NonLocalBond { a: 1, b: 3, string_len: 1 }));
        assert_eq!(count_gates(&layout_step_circuit(&h, 0.1).unwrap()).two_qudit, 32);
    }

    #[test]
    fn brick_order_puts_odd_bonds_first() {
        assert_eq!(brick_order(&LatticeGeometry::chain(5)), vec![(1, 2), (3, 4), (2, 3), (4, 5)]);
    }

    #[test]
    fn single_step_of_single_bond_matches_product_of_targets() {
        let h = build_mapped_hamiltonian(&LatticeGeometry::chain(2), 1.0, 0.0).unwrap();
        let circuit = trotter_step_circuit(&h, 0.8, 1).unwrap();
        // the four terms commute, so one step is exact
        let expected = expm(&h.full_matrix().unwrap(), 0.8).unwrap();
        let got = circuit_unitary(&circuit).unwrap();
        assert!(phase_aligned_residual(&got, &expected).unwrap() < 1e-10);
        let psi = StateVector::basis(5, 16).unwrap();
        assert!((run(&circuit, &psi).unwrap().norm() - 1.0).abs() < 1e-12);
    }
}
