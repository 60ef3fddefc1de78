use std::fs;
use std::path::{Path, PathBuf};

use qfm_core::emulate::{compare_lesser_gf, max_abs_error, population_table};
use qfm_core::greens::{fmt_f64, omega_grid, spectral, time_grid, trapezoid, GfKind, GreensSeries, SeriesMeta};
use qfm_core::linalg::C64;
use qfm_core::oracle::{retarded_gf_series, ExactOracle};
use qfm_core::qfm::{build_mapped_hamiltonian, resolve_int_prefactor, spectrum_equivalence_residual};
use qfm_core::resources::{
    qfm_resources_with, qubit_baseline_resources, reports_to_json, reports_to_table, DurationModel, Schedule,
};
use qfm_core::transpile::{hopping_angle, synthesis_report, trotter_step_circuit, HoppingTerm};
use qfm_core::validation::run_validation;

use crate::config::{GfPair, Observable, RunConfig};
use crate::error::CliError;

const SPECTRUM_CHECK_MAX_SITES: usize = 4;
const SPECTRUM_TOL: f64 = 1e-10;

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, contents)?;
    Ok(path)
}

pub fn cmd_map(cfg: &RunConfig) -> Result<(), CliError> {
    let geometry = cfg.geometry()?;
    let h = build_mapped_hamiltonian(&geometry, cfg.j, cfg.v)?;
    let path = write_file(&cfg.output_dir, "mapped_hamiltonian.json", &h.to_json()?)?;
    let (prefactor, fit) = resolve_int_prefactor();
    println!("wrote {}", path.display());
    println!("lattice {}: {} sites, {} bonds", geometry.lattice, geometry.site_count, geometry.bonds.len());
    println!("int_prefactor = {prefactor} (N_up N_down fit residual {fit:.1e})");
    if geometry.site_count > SPECTRUM_CHECK_MAX_SITES {
        println!("spectrum equivalence: skipped for more than {SPECTRUM_CHECK_MAX_SITES} sites");
        return Ok(());
    }
    let residual = spectrum_equivalence_residual(&geometry, cfg.j, cfg.v)?;
    println!("spectrum equivalence residual = {residual:.3e}");
    if residual > SPECTRUM_TOL {
        return Err(CliError::Validation(format!("spectrum residual {residual:e} exceeds {SPECTRUM_TOL:e}")));
    }
    Ok(())
}

/// Synthesis reports for the four terms at one Trotter slice, plus the full
/// circuit for `τ = tau_grid.stop`.
pub fn cmd_transpile(cfg: &RunConfig) -> Result<(), CliError> {
    let geometry = cfg.geometry()?;
    let h = build_mapped_hamiltonian(&geometry, cfg.j, cfg.v)?;
    let tau = cfg.tau_grid.stop;
    let n = cfg.trotter_steps;
    let circuit = trotter_step_circuit(&h, tau, n)?;
    let theta = hopping_angle(&h, tau / n as f64);
    let mut reports = Vec::new();
    for term in HoppingTerm::ALL {
        let (_, report) = synthesis_report(term, theta)?;
        println!(
            "h{}: angle {theta:.6}, residual {:.2e}, two-qudit {}, physical single-qudit {}",
            term.index(),
            report.residual_norm,
            report.gate_tally.two_qudit,
            report.gate_tally.single_qudit_physical
        );
        reports.push(report);
    }
    let json = serde_json::to_string_pretty(&reports).map_err(|e| CliError::Config(e.to_string()))?;
    let path = write_file(&cfg.output_dir, "synthesis_report.json", &json)?;
    println!("wrote {}", path.display());
    let path = write_file(&cfg.output_dir, "circuit.json", &circuit.to_json()?)?;
    println!("wrote {} ({} ops, τ = {tau}, n = {n})", path.display(), circuit.len());
    Ok(())
}

pub fn cmd_evolve(cfg: &RunConfig) -> Result<(), CliError> {
    let geometry = cfg.geometry()?;
    let init = cfg.initial_state()?;
    let rows = population_table(&geometry, cfg.j, cfg.v, &init, &cfg.tau_grid.points(), cfg.trotter_steps)?;
    let mut csv = String::from("tau,n,site,spin,circuit_value,oracle_value,abs_error\n");
    for r in &rows {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            fmt_f64(r.tau),
            r.n,
            r.site,
            r.spin,
            fmt_f64(r.circuit_value),
            fmt_f64(r.oracle_value),
            fmt_f64(r.abs_error)
        ));
    }
    let path = write_file(&cfg.output_dir, "populations.csv", &csv)?;
    println!("wrote {}", path.display());
    println!("max abs population error (n = {}): {:.4}", cfg.trotter_steps, max_abs_error(&rows));
    Ok(())
}

fn series_name(kind: GfKind, p: &GfPair, source: &str) -> String {
    format!("{kind}_{}_{}_{}_{source}.csv", p.i, p.j, p.spin)
}

pub fn cmd_greens(cfg: &RunConfig) -> Result<(), CliError> {
    let geometry = cfg.geometry()?;
    let pairs = cfg.pairs()?;
    let times = time_grid(cfg.fourier.t_max, cfg.fourier.dt)?;
    let wants = |o: Observable| cfg.observables.contains(&o);
    let lesser = wants(Observable::LesserGf) || !(wants(Observable::RetardedGf) || wants(Observable::Spectral));
    let meta = |p: &GfPair, kind: GfKind, init: String| SeriesMeta {
        i: p.i,
        j: p.j,
        spin: p.spin,
        kind,
        sites: geometry.site_count,
        j_coupling: cfg.j,
        v: cfg.v,
        init,
    };
    if lesser {
        let init = cfg.initial_state()?;
        for p in &pairs {
            let cmp = compare_lesser_gf(&geometry, cfg.j, cfg.v, &init, (p.i, p.j, p.spin), &times, cfg.trotter_steps)?;
            for (source, values) in [("circuit", &cmp.circuit), ("oracle", &cmp.oracle)] {
                let series = GreensSeries::new(meta(p, GfKind::Lesser, init.to_string()), times.clone(), values.clone())?;
                write_file(&cfg.output_dir, &series_name(GfKind::Lesser, p, source), &series.to_csv())?;
            }
            println!(
                "lesser ({},{},{}): circuit vs oracle max deviation {:.4}",
                p.i,
                p.j,
                p.spin,
                cmp.max_deviation()
            );
        }
    }
    if wants(Observable::RetardedGf) || wants(Observable::Spectral) {
        let oracle = ExactOracle::new(&geometry, cfg.j, cfg.v)?;
        let omegas = omega_grid(cfg.fourier.dt, 2 * times.len() + 1)?;
        for p in &pairs {
            let values: Vec<C64> = retarded_gf_series(&oracle, cfg.beta, p.i, p.j, p.spin, &times)?;
            let series =
                GreensSeries::new(meta(p, GfKind::Retarded, format!("beta={}", cfg.beta)), times.clone(), values)?;
            write_file(&cfg.output_dir, &series_name(GfKind::Retarded, p, "oracle"), &series.to_csv())?;
            if wants(Observable::Spectral) && p.i == p.j {
                let a = spectral(&series, cfg.fourier.eta, &omegas)?;
                let mut csv = String::from("omega,A\n");
                for (w, x) in omegas.iter().zip(&a) {
                    csv.push_str(&format!("{},{}\n", fmt_f64(*w), fmt_f64(*x)));
                }
                write_file(&cfg.output_dir, &format!("spectral_{}_{}.csv", p.i, p.spin), &csv)?;
                println!(
                    "spectral ({},{}): sum rule {:.6}, min A {:.2e}",
                    p.i,
                    p.spin,
                    trapezoid(&omegas, &a),
                    a.iter().copied().fold(f64::INFINITY, f64::min)
                );
            }
        }
    }
    println!("wrote series to {}", cfg.output_dir.display());
    Ok(())
}

pub fn cmd_resources(cfg: &RunConfig, schedule: Schedule, two_qudit_ns: f64) -> Result<(), CliError> {
    let lattice = cfg.geometry()?.lattice;
    let model = DurationModel { schedule, two_qudit_ns, ..Default::default() };
    let mut reports = vec![qfm_resources_with(lattice, model)?];
    if cfg.baseline {
        reports.push(qubit_baseline_resources(lattice)?);
    }
    let path = write_file(&cfg.output_dir, "resources.json", &reports_to_json(&reports)?)?;
    print!("{}", reports_to_table(&reports));
    if let [qfm, qubit] = reports.as_slice() {
        println!(
            "two-body gates per step: qfm {} vs qubit {}",
            qfm.two_body_gates_per_step, qubit.two_body_gates_per_step
        );
    }
    println!("wrote {}", path.display());
    Ok(())
}

pub fn cmd_validate(cfg: &RunConfig) -> Result<(), CliError> {
    let results = run_validation(cfg.seed);
    for r in &results {
        println!("[{}] {}: {}", if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail);
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    println!("{} checks, {failed} failed", results.len());
    if failed > 0 {
        return Err(CliError::Validation(format!("{failed} checks failed")));
    }
    Ok(())
}
