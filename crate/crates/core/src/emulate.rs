//! Trotterized circuit emulation side by side with the exact reference.

use serde::{Deserialize, Serialize};

use crate::error::{QfmError, Result};
use crate::gamma::QUDIT_DIM;
use crate::gates::run;
use crate::linalg::{c, StateVector, C64};
use crate::oracle::{lesser_gf_series, ExactOracle, InitialState};
use crate::qfm::{
    apply_mapped_fermion, build_mapped_hamiltonian, encode_initial_state, map_ququart_level, LatticeGeometry,
    MappedHamiltonian, OperatorKind, Spin,
};
use crate::transpile::trotter_step_circuit;

/// `⟨N_{m,ν}⟩` of a ququart register state.
pub fn mapped_population(state: &StateVector, site: usize, spin: Spin) -> Result<f64> {
    let sites = state.site_count();
    if site == 0 || site > sites {
        return Err(QfmError::SiteOutOfRange { site, sites });
    }
    let occupied: Vec<bool> = (0..QUDIT_DIM)
        .map(|l| map_ququart_level(l).map(|label| label.occupation(spin)))
        .collect::<Result<_>>()?;
    let stride = QUDIT_DIM.pow((sites - site) as u32);
    Ok(state
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|&(idx, _)| occupied[(idx / stride) % QUDIT_DIM])
        .map(|(_, a)| a.norm_sqr())
        .sum())
}

/// `U_n(τ)·|ψ₀⟩` for the `n`-step Trotter circuit.
pub fn trotter_state(h: &MappedHamiltonian, init: &InitialState, tau: f64, n: usize) -> Result<StateVector> {
    check_init(h, init)?;
    run(&trotter_step_circuit(h, tau, n)?, &encode_initial_state(init)?)
}

fn check_init(h: &MappedHamiltonian, init: &InitialState) -> Result<()> {
    if init.len() != h.site_count() {
        return Err(QfmError::DimensionMismatch(format!(
            "initial state has {} sites, lattice has {}",
            init.len(),
            h.site_count()
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PopulationRow {
    pub tau: f64,
    pub n: usize,
    pub site: usize,
    pub spin: Spin,
    pub circuit_value: f64,
    pub oracle_value: f64,
    pub abs_error: f64,
}

/// Circuit and exact populations of every site and spin on a τ grid.
pub fn population_table(
    geometry: &LatticeGeometry,
    j: f64,
    v: f64,
    init: &InitialState,
    taus: &[f64],
    n: usize,
) -> Result<Vec<PopulationRow>> {
    let h = build_mapped_hamiltonian(geometry, j, v)?;
    check_init(&h, init)?;
    let oracle = ExactOracle::new(geometry, j, v)?;
    let psi0 = oracle.initial_vector(init)?;
    let mut rows = Vec::new();
    for &tau in taus {
        let state = trotter_state(&h, init, tau, n)?;
        let exact = oracle.evolve_vector(&psi0, tau);
        for site in 1..=geometry.site_count {
            for spin in Spin::BOTH {
                let circuit_value = mapped_population(&state, site, spin)?;
                let oracle_value = oracle.population_of(&exact, site, spin)?;
                rows.push(PopulationRow {
                    tau,
                    n,
                    site,
                    spin,
                    circuit_value,
                    oracle_value,
                    abs_error: (circuit_value - oracle_value).abs(),
                });
            }
        }
    }
    Ok(rows)
}

pub fn max_abs_error(rows: &[PopulationRow]) -> f64 {
    rows.iter().map(|r| r.abs_error).fold(0.0, f64::max)
}

/// `G^<_{ij,ν}(t) = i⟨U c_j ψ₀ | c_i U ψ₀⟩` with `U` the `n`-step Trotter
/// circuit for each time `t`.
pub fn circuit_lesser_gf(
    h: &MappedHamiltonian,
    init: &InitialState,
    i: usize,
    j: usize,
    spin: Spin,
    times: &[f64],
    n: usize,
) -> Result<Vec<C64>> {
    check_init(h, init)?;
    let psi0 = encode_initial_state(init)?;
    let cj_psi = apply_mapped_fermion(&psi0, j, spin, OperatorKind::Annihilate)?;
    times
        .iter()
        .map(|&t| {
            let circuit = trotter_step_circuit(h, t, n)?;
            let left = run(&circuit, &cj_psi)?;
            let right = apply_mapped_fermion(&run(&circuit, &psi0)?, i, spin, OperatorKind::Annihilate)?;
            Ok(c(0.0, 1.0) * left.inner(&right))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct GfComparison {
    pub times: Vec<f64>,
    pub circuit: Vec<C64>,
    pub oracle: Vec<C64>,
}

impl GfComparison {
    pub fn max_deviation(&self) -> f64 {
        self.circuit.iter().zip(&self.oracle).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

pub fn compare_lesser_gf(
    geometry: &LatticeGeometry,
    j_coupling: f64,
    v: f64,
    init: &InitialState,
    (i, j, spin): (usize, usize, Spin),
    times: &[f64],
    n: usize,
) -> Result<GfComparison> {
    let h = build_mapped_hamiltonian(geometry, j_coupling, v)?;
    let oracle = ExactOracle::new(geometry, j_coupling, v)?;
    Ok(GfComparison {
        times: times.to_vec(),
        circuit: circuit_lesser_gf(&h, init, i, j, spin, times, n)?,
        oracle: lesser_gf_series(&oracle, init, i, j, spin, times)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn populations_of_encoded_state() {
        let init: InitialState = "u,ud,0".parse().unwrap();
        let psi = encode_initial_state(&init).unwrap();
        for site in 1..=3 {
            for spin in Spin::BOTH {
                assert_eq!(mapped_population(&psi, site, spin).unwrap(), init.occupation(site, spin));
            }
        }
    }

    #[test]
    fn zero_time_rows_are_exact() {
        let init: InitialState = "u,d".parse().unwrap();
        let rows = population_table(&LatticeGeometry::chain(2), 1.0, 2.0, &init, &[0.0], 5).unwrap();
        assert_eq!(rows.len(), 4);
        assert!(rows.iter().all(|r| r.abs_error == 0.0 && r.circuit_value == init.occupation(r.site, r.spin)));
    }

    #[test]
    fn trotter_error_shrinks_with_steps() {
        let init: InitialState = "u,d".parse().unwrap();
        let taus = [1.0, 2.0];
        let err = |n| max_abs_error(&population_table(&LatticeGeometry::chain(2), 1.0, 2.0, &init, &taus, n).unwrap());
        assert!(err(10) < err(5));
    }

    #[test]
    fn circuit_gf_at_zero_is_occupation() {
        let init: InitialState = "u,ud,0".parse().unwrap();
        let h = build_mapped_hamiltonian(&LatticeGeometry::chain(3), 1.0, 2.0).unwrap();
        let g = circuit_lesser_gf(&h, &init, 2, 2, Spin::Up, &[0.0], 3).unwrap();
        assert!((g[0] - c(0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn init_length_must_match() {
        let init: InitialState = "u,d,0".parse().unwrap();
        assert!(population_table(&LatticeGeometry::chain(2), 1.0, 2.0, &init, &[1.0], 5).is_err());
    }
}
