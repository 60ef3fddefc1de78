//! Gate counts and step-duration estimates for the ququart encoding and the
//! qubit zig-zag baseline.

use serde::{Deserialize, Serialize};

use crate::error::{QfmError, Result};
use crate::gates::{count_gates, Circuit, GateOp};
use crate::qfm::{build_mapped_hamiltonian, Lattice, LatticeGeometry};
use crate::transpile::layout_step_circuit;

pub const SINGLE_QUDIT_NS: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Encoding {
    Qfm,
    QubitZigzag,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Schedule {
    /// Every gate one after another.
    Sequential,
    /// Gates on disjoint sites overlap; the critical path sets the time.
    Parallel,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DurationModel {
    pub schedule: Schedule,
    pub single_qudit_ns: f64,
    pub two_qudit_ns: f64,
}

impl Default for DurationModel {
    fn default() -> Self {
        Self { schedule: Schedule::Sequential, single_qudit_ns: SINGLE_QUDIT_NS, two_qudit_ns: 0.0 }
    }
}

impl DurationModel {
    fn op_ns(&self, op: &GateOp) -> f64 {
        if op.is_two_qudit() {
            self.two_qudit_ns
        } else if op.is_virtual() {
            0.0
        } else {
            self.single_qudit_ns
        }
    }

    pub fn duration_ns(&self, circuit: &Circuit) -> f64 {
        match self.schedule {
            Schedule::Sequential => circuit.ops.iter().map(|op| self.op_ns(op)).sum(),
            Schedule::Parallel => {
                let mut clock = vec![0.0f64; circuit.site_count];
                for op in &circuit.ops {
                    let sites = op.sites();
                    let end = sites.iter().map(|&s| clock[s]).fold(0.0, f64::max) + self.op_ns(op);
                    for s in sites {
                        clock[s] = end;
                    }
                }
                clock.into_iter().fold(0.0, f64::max)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResourceReport {
    pub encoding: Encoding,
    pub lattice: Lattice,
    pub bonds: usize,
    pub two_body_gates_per_step: usize,
    /// Not available for the baseline.
    pub single_qudit_physical_per_step: Option<usize>,
    pub virtual_z_per_step: Option<usize>,
    pub carriers: usize,
    /// Seconds; not available for the baseline.
    pub est_step_duration: Option<f64>,
    pub schedule: Option<Schedule>,
    /// Layer sequence of one step.
    pub layers: Vec<String>,
}

fn lattice_size(lattice: Lattice) -> Result<LatticeGeometry> {
    let geometry = LatticeGeometry::new(lattice);
    if geometry.site_count < 2 {
        return Err(QfmError::UnsupportedLattice(format!("{lattice} has no bonds")));
    }
    Ok(geometry)
}

pub fn qfm_resources(lattice: Lattice) -> Result<ResourceReport> {
    qfm_resources_with(lattice, DurationModel::default())
}

/// Counts taken from an emitted one-step circuit.
pub fn qfm_resources_with(lattice: Lattice, model: DurationModel) -> Result<ResourceReport> {
    let geometry = lattice_size(lattice)?;
    let h = build_mapped_hamiltonian(&geometry, 1.0, 1.0)?;
    let circuit = layout_step_circuit(&h, 0.1)?;
    let tally = count_gates(&circuit);
    let mut layers = vec!["interaction (virtual Z)".to_string()];
    layers.extend(geometry.bonds.iter().map(|(a, b)| format!("hopping {a}-{b}")));
    Ok(ResourceReport {
        encoding: Encoding::Qfm,
        lattice,
        bonds: geometry.bonds.len(),
        two_body_gates_per_step: tally.two_qudit,
        single_qudit_physical_per_step: Some(tally.single_qudit_physical),
        virtual_z_per_step: Some(tally.virtual_z),
        carriers: geometry.site_count,
        est_step_duration: Some(model.duration_ns(&circuit) * 1e-9),
        schedule: Some(model.schedule),
        layers,
    })
}

/// Qubit zig-zag encoding with fermionic swaps; only the published step
/// totals are encoded.
pub fn qubit_baseline_resources(lattice: Lattice) -> Result<ResourceReport> {
    let (total, layers): (usize, &[&str]) = match lattice {
        Lattice::Chain { sites: 8 } => (64, &["fswap", "on-site", "fswap", "hopping odd", "hopping even"]),
        Lattice::Ladder { cols: 4 } => (
            112,
            &["fswap", "on-site", "fswap", "hopping vertical", "fswap", "hopping horizontal 1", "fswap", "hopping horizontal 2"],
        ),
        other => return Err(QfmError::UnsupportedLattice(format!("no qubit baseline for {other}"))),
    };
    let geometry = LatticeGeometry::new(lattice);
    Ok(ResourceReport {
        encoding: Encoding::QubitZigzag,
        lattice,
        bonds: geometry.bonds.len(),
        two_body_gates_per_step: total,
        single_qudit_physical_per_step: None,
        virtual_z_per_step: None,
        carriers: 2 * geometry.site_count,
        est_step_duration: None,
        schedule: None,
        layers: layers.iter().map(|s| s.to_string()).collect(),
    })
}

pub fn reports_to_json(reports: &[ResourceReport]) -> Result<String> {
    serde_json::to_string_pretty(reports).map_err(|e| QfmError::Parse(e.to_string()))
}

/// Aligned-column text table, one row per report.
pub fn reports_to_table(reports: &[ResourceReport]) -> String {
    let header = ["encoding", "lattice", "bonds", "two-body/step", "1q physical/step", "carriers", "step time"];
    let opt = |v: Option<usize>| v.map_or("-".to_string(), |x| x.to_string());
    let rows: Vec<[String; 7]> = reports
        .iter()
        .map(|r| {
            [
                match r.encoding {
                    Encoding::Qfm => "qfm".into(),
                    Encoding::QubitZigzag => "qubit_zigzag".into(),
                },
                r.lattice.to_string(),
                r.bonds.to_string(),
                r.two_body_gates_per_step.to_string(),
                opt(r.single_qudit_physical_per_step),
                r.carriers.to_string(),
                r.est_step_duration.map_or("-".into(), |s| format!("{:.0} ns", s * 1e9)),
            ]
        })
        .collect();
    let widths: Vec<usize> = (0..header.len())
        .map(|c| rows.iter().map(|r| r[c].len()).chain([header[c].len()]).max().unwrap_or(0))
        .collect();
    let line = |cells: Vec<&str>| {
        cells
            .iter()
            .zip(&widths)
            .map(|(s, w)| format!("{s:<w$}"))
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    let mut out = line(header.to_vec());
    out.push('\n');
    for r in &rows {
        out.push_str(&line(r.iter().map(String::as_str).collect()));
        out.push('\n');
    }
    out
}
