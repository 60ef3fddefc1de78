//! The exact reference checked against routes that share none of its code:
//! Taylor-series propagation and brute-force Fock-space sums.

use qfm_core::linalg::{c, eigh, expm, ComplexMatrix, C64};
use qfm_core::oracle::{
    charge_and_spin, exact_population, fermionic_hamiltonian, lesser_gf, ExactOracle, FockBasis, InitialState,
};
use qfm_core::qfm::{LatticeGeometry, OperatorKind, Spin};

/// `e^{−iHt}ψ` by many short Taylor steps.
fn taylor_propagate(h: &ComplexMatrix, psi: &[C64], t: f64, steps: usize) -> Vec<C64> {
    let dt = t / steps as f64;
    let mut state = psi.to_vec();
    for _ in 0..steps {
        let mut term = state.clone();
        let mut acc = state.clone();
        for k in 1..=20 {
            term = h.mul_vec(&term).into_iter().map(|z| z * c(0.0, -dt / k as f64)).collect();
            for (a, b) in acc.iter_mut().zip(&term) {
                *a += b;
            }
        }
        state = acc;
    }
    state
}

/// Scaling-and-squaring Taylor exponential of `−iHt`.
fn taylor_expm(h: &ComplexMatrix, t: f64) -> ComplexMatrix {
    let squarings = 10;
    let a = h.scale(c(0.0, -t / f64::from(1 << squarings)));
    let n = h.rows();
    let mut term = ComplexMatrix::identity(n);
    let mut acc = ComplexMatrix::identity(n);
    for k in 1..=18 {
        term = term.matmul(&a).scale_real(1.0 / k as f64);
        acc = &acc + &term;
    }
    for _ in 0..squarings {
        acc = acc.matmul(&acc);
    }
    acc
}

#[test]
fn eigen_expm_matches_taylor() {
    let h = fermionic_hamiltonian(&LatticeGeometry::chain(2), 1.0, 2.0).unwrap();
    for t in [0.1, 1.0, 3.7] {
        assert!(expm(&h, t).unwrap().max_abs_diff(&taylor_expm(&h, t)) < 1e-11);
    }
}

#[test]
fn populations_match_taylor_propagation_chain4() {
    let geometry = LatticeGeometry::chain(4);
    let oracle = ExactOracle::new(&geometry, 1.0, 2.0).unwrap();
    let init: InitialState = "u,ud,u,d".parse().unwrap();
    let psi0 = oracle.initial_vector(&init).unwrap();
    let t = 2.5;
    let reference = taylor_propagate(&oracle.hamiltonian, &psi0, t, 500);
    for site in 1..=4 {
        for spin in Spin::BOTH {
            let a = exact_population(&oracle, &init, t, site, spin).unwrap();
            let b = oracle.population_of(&reference, site, spin).unwrap();
            assert!((a - b).abs() < 1e-10, "site {site} {spin}: {a} vs {b}");
            assert!((-1e-12..=1.0 + 1e-12).contains(&a));
        }
    }
}

#[test]
fn charge_and_spin_conserved_along_evolution() {
    let oracle = ExactOracle::new(&LatticeGeometry::ladder(2), 1.0, 3.0).unwrap();
    let init: InitialState = "ud,0,u,d".parse().unwrap();
    let psi0 = oracle.initial_vector(&init).unwrap();
    for t in [0.0, 0.4, 2.0, 7.5] {
        let (n, sz) = charge_and_spin(&oracle, &oracle.evolve_vector(&psi0, t)).unwrap();
        assert!((n - 4.0).abs() < 1e-10 && sz.abs() < 1e-10);
    }
}

#[test]
fn lesser_gf_matches_lehmann_sum() {
    let geometry = LatticeGeometry::chain(3);
    let oracle = ExactOracle::new(&geometry, 1.0, 2.0).unwrap();
    let init: InitialState = "u,ud,0".parse().unwrap();
    let basis = FockBasis::new(3).unwrap();
    let eig = eigh(&oracle.hamiltonian).unwrap();
    let psi = oracle.initial_vector(&init).unwrap();
    let (i, j, spin) = (1, 2, Spin::Up);
    let ci = basis.operator(i, spin, OperatorKind::Annihilate).unwrap();
    let cj = basis.operator(j, spin, OperatorKind::Annihilate).unwrap();
    for t in [0.0, 0.8, 2.3] {
        // i ⟨ψ| c†_j e^{iHt} c_i e^{−iHt} |ψ⟩ with full propagator matrices
        let u = eig.propagator(t);
        let heis = u.adjoint().matmul(&ci).matmul(&u);
        let expect: C64 = {
            let v = cj.adjoint().matmul(&heis).mul_vec(&psi);
            psi.iter().zip(&v).map(|(a, b)| a.conj() * b).sum()
        };
        let got = lesser_gf(&oracle, &init, i, j, spin, t).unwrap();
        assert!((got - c(0.0, 1.0) * expect).norm() < 1e-12);
    }
}

#[test]
fn dimension_limit_is_enforced() {
    assert!(fermionic_hamiltonian(&LatticeGeometry::chain(7), 1.0, 1.0).is_err());
    let oracle = ExactOracle::new(&LatticeGeometry::chain(5), 0.0, 1.0);
    assert!(oracle.is_ok());
    let err = qfm_core::oracle::retarded_gf(&oracle.unwrap(), 1.0, 1, 1, Spin::Up, 0.5);
    assert!(err.is_err());
}
