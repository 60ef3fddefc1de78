use proptest::prelude::*;

use qfm_core::gamma::{rotation, Axis};
use qfm_core::gates::{apply, run, Circuit, GateOp};
use qfm_core::linalg::{c, expm, ComplexMatrix, StateVector, C64};
use qfm_core::qfm::{build_mapped_hamiltonian, LatticeGeometry};
use qfm_core::transpile::{osd, trotter_step_circuit};

fn hermitian(dim: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim * dim).prop_map(move |v| {
        let a = ComplexMatrix::from_row_major(dim, dim, v.into_iter().map(|(r, i)| c(r, i)).collect()).unwrap();
        (&a + &a.adjoint()).scale_real(0.5)
    })
}

fn unitary(dim: usize) -> impl Strategy<Value = ComplexMatrix> {
    hermitian(dim).prop_map(|h| expm(&h, 1.0).unwrap())
}

fn state(sites: usize) -> impl Strategy<Value = StateVector> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 4usize.pow(sites as u32)).prop_map(|v| {
        let mut s = StateVector::new(v.into_iter().map(|(r, i)| c(r, i)).collect::<Vec<C64>>()).unwrap();
        s.normalize();
        s
    })
}

fn gate(sites: usize) -> impl Strategy<Value = GateOp> {
    let rot = (0..sites, 0usize..3, 1usize..4, prop::bool::ANY, -6.3f64..6.3).prop_map(|(s, j, dk, y, phi)| {
        let k = (j + dk).min(3).max(j + 1);
        GateOp::rotation(s, j, k, if y { Axis::Y } else { Axis::X }, phi)
    });
    let csum = (0..sites, 1..sites, prop::bool::ANY).prop_map(move |(a, d, adj)| {
        let b = (a + d) % sites;
        if adj {
            GateOp::csum_dagger(a, b)
        } else {
            GateOp::csum(a, b)
        }
    });
    prop_oneof![rot, csum]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn osd_reconstructs_with_orthonormal_factors(u in unitary(16)) {
        let dec = osd(&u).unwrap();
        prop_assert!(dec.reconstruct().max_abs_diff(&u) < 1e-10);
        for ops in [&dec.left_ops, &dec.right_ops] {
            for (a, x) in ops.iter().enumerate() {
                for (b, y) in ops.iter().enumerate() {
                    let ip = x.adjoint().matmul(y).trace();
                    let expected = if a == b { 1.0 } else { 0.0 };
                    prop_assert!((ip - c(expected, 0.0)).norm() < 1e-10);
                }
            }
        }
        prop_assert!(dec.coefficients.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn osd_coefficients_ignore_local_unitaries(u in unitary(16), a in unitary(4), b in unitary(4), d in unitary(4), e in unitary(4)) {
        let dressed = a.kron(&b).matmul(&u).matmul(&d.kron(&e));
        let (x, y) = (osd(&u).unwrap(), osd(&dressed).unwrap());
        for (p, q) in x.coefficients.iter().zip(&y.coefficients) {
            prop_assert!((p - q).abs() < 1e-9);
        }
    }

    #[test]
    fn gates_preserve_norm_and_invert(psi in state(3), op in gate(3)) {
        let out = apply(&psi, &op).unwrap();
        prop_assert!((out.norm() - 1.0).abs() < 1e-12);
        prop_assert!(apply(&out, &op.inverse()).unwrap().max_abs_diff(&psi) < 1e-10);
    }

    #[test]
    fn rotations_are_unitary(j in 0usize..3, dk in 1usize..4, phi in -10.0f64..10.0) {
        let k = (j + dk).min(3);
        for axis in [Axis::X, Axis::Y, Axis::Z] {
            prop_assert!(rotation(j, k, axis, phi).unwrap().is_unitary(1e-12));
        }
    }

    #[test]
    fn circuit_and_inverse_cancel(psi in state(3), ops in prop::collection::vec(gate(3), 1..20)) {
        let mut circuit = Circuit::new(3);
        circuit.extend(ops).unwrap();
        let back = run(&circuit.inverse(), &run(&circuit, &psi).unwrap()).unwrap();
        prop_assert!(back.max_abs_diff(&psi) < 1e-10);
    }

    #[test]
    fn circuit_json_round_trips(j in -2.0f64..2.0, v in -4.0f64..4.0, tau in 0.0f64..3.0, n in 1usize..4) {
        let h = build_mapped_hamiltonian(&LatticeGeometry::chain(3), j, v).unwrap();
        let circuit = trotter_step_circuit(&h, tau, n).unwrap();
        let back = Circuit::from_json(&circuit.to_json().unwrap()).unwrap();
        prop_assert_eq!(back, circuit);
    }
}
