//! Self-check suite run by `qfm validate`.

use std::f64::consts::FRAC_PI_2;

use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};
use serde::Serialize;

use crate::error::Result;
use crate::gamma::make_gamma_set;
use crate::gamma::Axis;
use crate::gates::{apply, count_gates, csum_matrix, GateOp, GateTally};
use crate::linalg::{c, expm, ComplexMatrix, StateVector};
use crate::qfm::{fermionic_relation_residual, spectrum_equivalence_residual, Lattice, LatticeGeometry};
use crate::resources::{qfm_resources, qubit_baseline_resources};
use crate::transpile::{hopping_target, osd, synthesis_report, transpile_hopping, HoppingTerm, RANK_TOL};

pub const OSD_TAUS: [f64; 4] = [0.3, 0.7, 1.2, FRAC_PI_2];
pub const SPECTRUM_COUPLINGS: [(f64, f64); 4] = [(1.0, 0.0), (1.0, 2.0), (0.0, 3.0), (1.0, 8.0)];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn bound(name: impl Into<String>, value: f64, tol: f64) -> Self {
        Self { name: name.into(), passed: value <= tol, detail: format!("{value:.3e} (tolerance {tol:.0e})") }
    }

    fn flag(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self { name: name.into(), passed, detail: detail.into() }
    }
}

fn from_result(name: &str, r: Result<CheckResult>) -> CheckResult {
    r.unwrap_or_else(|e| CheckResult::flag(name, false, format!("error: {e}")))
}

/// `e^{−iH}` for a random Hermitian `H` with entries in [−1, 1].
pub fn random_unitary(rng: &mut StdRng, dim: usize) -> Result<ComplexMatrix> {
    let a = ComplexMatrix::from_fn(dim, dim, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    let h = (&a + &a.adjoint()).scale_real(0.5);
    expm(&h, 1.0)
}

fn gamma_check() -> CheckResult {
    CheckResult::flag("gamma algebra", make_gamma_set().relations_hold_exactly(), "exact comparison")
}

fn spectrum_checks() -> Vec<CheckResult> {
    let geometries = [LatticeGeometry::chain(2), LatticeGeometry::chain(3), LatticeGeometry::ladder(2)];
    let mut out = Vec::new();
    for g in &geometries {
        for (j, v) in SPECTRUM_COUPLINGS {
            let name = format!("spectrum {} J={j} v={v}", g.lattice);
            out.push(from_result(&name, spectrum_equivalence_residual(g, j, v).map(|r| CheckResult::bound(&name, r, 1e-10))));
        }
    }
    out
}

fn osd_checks() -> Vec<CheckResult> {
    let mut out = Vec::new();
    for term in HoppingTerm::ALL {
        for tau in OSD_TAUS {
            let name = format!("osd/synthesis h{} tau={tau:.4}", term.index());
            out.push(from_result(
                &name,
                (|| {
                    let (_, report) = synthesis_report(term, tau)?;
                    let dec = osd(&hopping_target(term, tau)?)?;
                    let recon = dec.reconstruct().max_abs_diff(&hopping_target(term, tau)?);
                    let ok = recon <= 1e-10 && dec.rank(RANK_TOL) <= 2 && report.residual_norm <= 1e-8;
                    Ok(CheckResult::flag(
                        &name,
                        ok,
                        format!("reconstruction {recon:.1e}, rank {}, synthesis {:.1e}", dec.rank(RANK_TOL), report.residual_norm),
                    ))
                })(),
            ));
        }
    }
    out
}

fn osd_invariance_check(seed: u64) -> CheckResult {
    let name = "osd local invariance";
    from_result(
        name,
        (|| {
            let mut rng = StdRng::seed_from_u64(seed);
            let u = random_unitary(&mut rng, 16)?;
            let locals: Vec<ComplexMatrix> = (0..4).map(|_| random_unitary(&mut rng, 4)).collect::<Result<_>>()?;
            let dressed = locals[0].kron(&locals[1]).matmul(&u).matmul(&locals[2].kron(&locals[3]));
            let (a, b) = (osd(&u)?, osd(&dressed)?);
            let diff = a.coefficients.iter().zip(&b.coefficients).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            Ok(CheckResult::bound(name, diff, 1e-9))
        })(),
    )
}

fn gate_count_checks() -> Vec<CheckResult> {
    let mut out = Vec::new();
    let per_bond = (|| -> Result<CheckResult> {
        let mut tally = GateTally::default();
        for term in HoppingTerm::ALL {
            tally = tally + count_gates(&transpile_hopping(term, 0.3)?);
        }
        Ok(CheckResult::flag(
            "per-bond tallies",
            tally.two_qudit == 8 && tally.single_qudit_physical == 32,
            format!("{} two-qudit, {} physical single-qudit", tally.two_qudit, tally.single_qudit_physical),
        ))
    })();
    out.push(from_result("per-bond tallies", per_bond));
    let totals = [
        ("qfm 1x8", qfm_resources(Lattice::Chain { sites: 8 }), 56),
        ("qfm 2x4", qfm_resources(Lattice::Ladder { cols: 4 }), 80),
        ("qubit 1x8", qubit_baseline_resources(Lattice::Chain { sites: 8 }), 64),
        ("qubit 2x4", qubit_baseline_resources(Lattice::Ladder { cols: 4 }), 112),
    ];
    for (name, report, expected) in totals {
        let name = format!("two-body total {name}");
        out.push(from_result(
            &name,
            report.map(|r| {
                CheckResult::flag(&name, r.two_body_gates_per_step == expected, format!("{} (expected {expected})", r.two_body_gates_per_step))
            }),
        ));
    }
    out
}

fn simulator_checks(seed: u64) -> Vec<CheckResult> {
    let u = csum_matrix(false);
    let ud = csum_matrix(true);
    let id = ComplexMatrix::identity(16);
    let fourth = u.matmul(&u).matmul(&u).matmul(&u);
    let mut out = vec![
        CheckResult::flag("csum^4 = I", fourth == id, "exact comparison"),
        CheckResult::flag("csum csum† = I", u.matmul(&ud) == id, "exact comparison"),
    ];
    let name = "norm and inverse round trip";
    out.push(from_result(
        name,
        (|| {
            let mut rng = StdRng::seed_from_u64(seed);
            let amps = (0..64).map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
            let mut psi = StateVector::new(amps)?;
            psi.normalize();
            let ops = [
                GateOp::rotation(0, 0, 2, Axis::Y, 0.37),
                GateOp::rotation(1, 1, 3, Axis::X, -1.1),
                GateOp::virtual_z(2, 0, 3, 0.8),
                GateOp::csum(0, 2),
                GateOp::csum_dagger(2, 1),
            ];
            let mut norm_dev: f64 = 0.0;
            let mut trip_dev: f64 = 0.0;
            for op in ops {
                let out = apply(&psi, &op)?;
                norm_dev = norm_dev.max((out.norm() - 1.0).abs());
                trip_dev = trip_dev.max(apply(&out, &op.inverse())?.max_abs_diff(&psi));
            }
            Ok(CheckResult::flag(
                name,
                norm_dev <= 1e-12 && trip_dev <= 1e-10,
                format!("norm {norm_dev:.1e}, round trip {trip_dev:.1e}"),
            ))
        })(),
    ));
    out
}

/// Every invariant check; a build is healthy when all pass.
pub fn run_validation(seed: u64) -> Vec<CheckResult> {
    let mut out = vec![gamma_check()];
    for sites in 1..=4 {
        let name = format!("fermionic relations L={sites}");
        out.push(from_result(&name, fermionic_relation_residual(sites).map(|r| CheckResult::bound(&name, r, 1e-12))));
    }
    out.extend(spectrum_checks());
    out.extend(osd_checks());
    out.push(osd_invariance_check(seed));
    out.extend(gate_count_checks());
    out.extend(simulator_checks(seed));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_unitaries_are_unitary_and_seeded() {
        let a = random_unitary(&mut StdRng::seed_from_u64(7), 4).unwrap();
        let b = random_unitary(&mut StdRng::seed_from_u64(7), 4).unwrap();
        assert!(a.is_unitary(1e-12));
        assert_eq!(a, b);
    }
}
