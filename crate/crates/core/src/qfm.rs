//! Qudit fermionic mapping: one spinful Hubbard site per ququart, with Γ̃
//! strings playing the role of the Jordan-Wigner σz strings.
//!
//! Sites are 1-based here (bonds, `map_fermion`); circuits address register
//! positions 0-based.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{QfmError, Result};
use crate::gamma::{make_gamma_set, GammaSet, QUDIT_DIM};
use crate::linalg::{c, eigvalsh, kron, kron_all, ComplexMatrix, StateVector};
use crate::oracle::{fermionic_hamiltonian, InitialState};

/// Largest register handled with dense 4^L matrices.
pub const MAX_DENSE_SITES: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub const BOTH: [Spin; 2] = [Spin::Up, Spin::Down];

    pub fn index(self) -> usize {
        match self {
            Spin::Up => 0,
            Spin::Down => 1,
        }
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Spin::Up => "up",
            Spin::Down => "down",
        })
    }
}

impl FromStr for Spin {
    type Err = QfmError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "up" | "u" | "↑" => Ok(Spin::Up),
            "down" | "dn" | "d" | "↓" => Ok(Spin::Down),
            other => Err(QfmError::Parse(format!("unknown spin '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OperatorKind {
    Create,
    Annihilate,
}

/// Occupation of one Hubbard site.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FockLabel {
    #[serde(rename = "0")]
    Vac,
    #[serde(rename = "u")]
    Up,
    #[serde(rename = "d")]
    Down,
    #[serde(rename = "ud")]
    UpDown,
}

impl FockLabel {
    pub const ALL: [FockLabel; 4] = [FockLabel::Vac, FockLabel::Up, FockLabel::Down, FockLabel::UpDown];

    pub fn occupation(self, spin: Spin) -> bool {
        matches!(
            (self, spin),
            (FockLabel::Up | FockLabel::UpDown, Spin::Up) | (FockLabel::Down | FockLabel::UpDown, Spin::Down)
        )
    }

    pub fn from_occupations(up: bool, down: bool) -> Self {
        match (up, down) {
            (false, false) => FockLabel::Vac,
            (true, false) => FockLabel::Up,
            (false, true) => FockLabel::Down,
            (true, true) => FockLabel::UpDown,
        }
    }

    pub fn token(self) -> &'static str {
        match self {
            FockLabel::Vac => "0",
            FockLabel::Up => "u",
            FockLabel::Down => "d",
            FockLabel::UpDown => "ud",
        }
    }
}

impl fmt::Display for FockLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for FockLabel {
    type Err = QfmError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "0" => Ok(FockLabel::Vac),
            "u" => Ok(FockLabel::Up),
            "d" => Ok(FockLabel::Down),
            "ud" | "du" => Ok(FockLabel::UpDown),
            other => Err(QfmError::Parse(format!("unknown site token '{other}' (expected 0, u, d, ud)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "lowercase")]
pub enum Lattice {
    Chain { sites: usize },
    /// Two rows of `cols` sites, numbered row-major.
    Ladder { cols: usize },
}

impl fmt::Display for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Lattice::Chain { sites } => write!(f, "chain:{sites}"),
            Lattice::Ladder { cols } => write!(f, "ladder:2x{cols}"),
        }
    }
}

impl FromStr for Lattice {
    type Err = QfmError;

    /// Accepts `chain:L`, `ladder:2xN`, and the shorthands `1xL`, `2xN`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        let bad = || QfmError::Parse(format!("bad geometry '{s}' (chain:L or ladder:2xN)"));
        let parse_n = |t: &str| t.parse::<usize>().map_err(|_| bad());
        let lattice = if let Some(rest) = s.strip_prefix("chain:") {
            Lattice::Chain { sites: parse_n(rest)? }
        } else if let Some(rest) = s.strip_prefix("ladder:") {
            let cols = rest.strip_prefix("2x").ok_or_else(bad)?;
            Lattice::Ladder { cols: parse_n(cols)? }
        } else if let Some((rows, cols)) = s.split_once('x') {
            match rows {
                "1" => Lattice::Chain { sites: parse_n(cols)? },
                "2" => Lattice::Ladder { cols: parse_n(cols)? },
                _ => return Err(bad()),
            }
        } else {
            return Err(bad());
        };
        match lattice {
            Lattice::Chain { sites: 0 } | Lattice::Ladder { cols: 0 } => Err(bad()),
            l => Ok(l),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeGeometry {
    pub lattice: Lattice,
    pub site_count: usize,
    /// 1-based `(a, b)` with `a < b`.
    pub bonds: Vec<(usize, usize)>,
}

impl LatticeGeometry {
    pub fn new(lattice: Lattice) -> Self {
        match lattice {
            Lattice::Chain { sites } => Self::chain(sites),
            Lattice::Ladder { cols } => Self::ladder(cols),
        }
    }

    pub fn chain(sites: usize) -> Self {
        Self {
            lattice: Lattice::Chain { sites },
            site_count: sites,
            bonds: (1..sites).map(|m| (m, m + 1)).collect(),
        }
    }

    /// Row-major numbering; horizontal bonds of each row, then the rungs.
    pub fn ladder(cols: usize) -> Self {
        let mut bonds = Vec::with_capacity(3 * cols);
        for row in 0..2 {
            let base = row * cols;
            bonds.extend((1..cols).map(|k| (base + k, base + k + 1)));
        }
        bonds.extend((1..=cols).map(|k| (k, cols + k)));
        Self { lattice: Lattice::Ladder { cols }, site_count: 2 * cols, bonds }
    }

    /// Bonds whose endpoints are neighbours in register order.
    pub fn is_register_local(&self, bond: (usize, usize)) -> bool {
        bond.1 == bond.0 + 1
    }
}

impl FromStr for LatticeGeometry {
    type Err = QfmError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(Self::new(s.parse()?))
    }
}

fn check_dense(sites: usize) -> Result<()> {
    if sites > MAX_DENSE_SITES {
        Err(QfmError::DimensionTooLarge { sites, max: MAX_DENSE_SITES })
    } else {
        Ok(())
    }
}

fn gammas() -> GammaSet {
    make_gamma_set()
}

/// Site-local part `½(Γ_{2ν−1} ± iΓ_{2ν})` of a mapped ladder operator.
pub fn local_ladder(spin: Spin, kind: OperatorKind) -> ComplexMatrix {
    let g = gammas();
    let (a, b) = match spin {
        Spin::Up => (&g.gamma[0], &g.gamma[1]),
        Spin::Down => (&g.gamma[2], &g.gamma[3]),
    };
    let sign = match kind {
        OperatorKind::Create => 1.0,
        OperatorKind::Annihilate => -1.0,
    };
    (a + &b.scale(c(0.0, sign))).scale_real(0.5)
}

/// Mapped number operator `c†c` on a single ququart.
pub fn local_number(spin: Spin) -> ComplexMatrix {
    local_ladder(spin, OperatorKind::Create).matmul(&local_ladder(spin, OperatorKind::Annihilate))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MappedOperator {
    pub site: usize,
    pub spin: Spin,
    pub kind: OperatorKind,
    pub matrix: ComplexMatrix,
}

/// `c_{m,ν}^{(†)} ↦ (Γ̃¹⋯Γ̃^{m−1}) · ½(Γ_{2ν−1} ± iΓ_{2ν}) · I⋯I` on `sites` ququarts.
pub fn map_fermion(site: usize, spin: Spin, kind: OperatorKind, sites: usize) -> Result<MappedOperator> {
    if site == 0 || site > sites {
        return Err(QfmError::SiteOutOfRange { site, sites });
    }
    check_dense(sites)?;
    let g = gammas();
    let id = ComplexMatrix::identity(QUDIT_DIM);
    let local = local_ladder(spin, kind);
    let factors = (1..=sites).map(|m| match m.cmp(&site) {
        std::cmp::Ordering::Less => &g.gamma_tilde,
        std::cmp::Ordering::Equal => &local,
        std::cmp::Ordering::Greater => &id,
    });
    Ok(MappedOperator { site, spin, kind, matrix: kron_all(factors) })
}

/// Largest deviation from the canonical anticommutation relations among all
/// mapped operators on `sites` ququarts.
pub fn fermionic_relation_residual(sites: usize) -> Result<f64> {
    check_dense(sites)?;
    let dim = QUDIT_DIM.pow(sites as u32);
    let id = ComplexMatrix::identity(dim);
    let modes: Vec<(usize, Spin)> = (1..=sites).flat_map(|m| Spin::BOTH.map(|s| (m, s))).collect();
    let ann: Vec<ComplexMatrix> = modes
        .iter()
        .map(|&(m, s)| map_fermion(m, s, OperatorKind::Annihilate, sites).map(|op| op.matrix))
        .collect::<Result<_>>()?;
    let cre: Vec<ComplexMatrix> = ann.iter().map(ComplexMatrix::adjoint).collect();
    let mut worst: f64 = 0.0;
    for a in 0..modes.len() {
        for b in 0..modes.len() {
            let mixed = ann[a].anticommutator(&cre[b]);
            let dev = if a == b { mixed.max_abs_diff(&id) } else { mixed.max_abs() };
            worst = worst.max(dev).max(ann[a].anticommutator(&ann[b]).max_abs());
        }
    }
    Ok(worst)
}

/// Which occupation a ququart level encodes, read off the mapped number
/// operators of a single site (both are diagonal in the Majorana basis).
pub fn map_ququart_level(level: usize) -> Result<FockLabel> {
    if level >= QUDIT_DIM {
        return Err(QfmError::InvalidArgument(format!("level {level} is not in 0..4")));
    }
    let occupied = |spin| {
        let n = map_fermion(1, spin, OperatorKind::Create, 1)
            .expect("single site")
            .matrix
            .matmul(&map_fermion(1, spin, OperatorKind::Annihilate, 1).expect("single site").matrix);
        n[(level, level)].re > 0.5
    };
    Ok(FockLabel::from_occupations(occupied(Spin::Up), occupied(Spin::Down)))
}

/// Ququart level encoding a given occupation.
pub fn level_of(label: FockLabel) -> usize {
    (0..QUDIT_DIM)
        .find(|&l| map_ququart_level(l).ok() == Some(label))
        .expect("level map is a bijection")
}

/// Product state on the ququart register encoding an occupation pattern.
pub fn encode_initial_state(init: &InitialState) -> Result<StateVector> {
    check_dense(init.len())?;
    let idx = init.labels().iter().fold(0, |acc, &l| acc * QUDIT_DIM + level_of(l));
    StateVector::basis(idx, QUDIT_DIM.pow(init.len() as u32))
}

/// Applies the mapped `c^{(†)}_{m,ν}` to a register state without forming
/// the 4^L matrix.
pub fn apply_mapped_fermion(state: &StateVector, site: usize, spin: Spin, kind: OperatorKind) -> Result<StateVector> {
    let sites = state.site_count();
    if site == 0 || site > sites {
        return Err(QfmError::SiteOutOfRange { site, sites });
    }
    let string = gammas().gamma_tilde.diagonal();
    let local = local_ladder(spin, kind);
    let stride = QUDIT_DIM.pow((sites - site) as u32);
    let mut out = vec![c(0.0, 0.0); state.dim()];
    for (idx, amp) in state.amplitudes().iter().enumerate() {
        if amp.norm_sqr() == 0.0 {
            continue;
        }
        let sign = (1..site).fold(c(1.0, 0.0), |acc, m| {
            acc * string[(idx / QUDIT_DIM.pow((sites - m) as u32)) % QUDIT_DIM]
        });
        let level = (idx / stride) % QUDIT_DIM;
        let base = idx - level * stride;
        for row in 0..QUDIT_DIM {
            let entry = local[(row, level)];
            if entry.norm_sqr() != 0.0 {
                out[base + row * stride] += entry * sign * amp;
            }
        }
    }
    StateVector::new(out)
}

/// `I − iΓ₁Γ₂ − iΓ₃Γ₄ + Γ̃`.
pub fn interaction_bracket() -> ComplexMatrix {
    let g = gammas();
    let minus_i = c(0.0, -1.0);
    let t12 = g.gamma[0].matmul(&g.gamma[1]).scale(minus_i);
    let t34 = g.gamma[2].matmul(&g.gamma[3]).scale(minus_i);
    &(&(&ComplexMatrix::identity(QUDIT_DIM) + &t12) + &t34) + &g.gamma_tilde
}

/// Prefactor `p` with `N↑N↓ = p·(I − iΓ₁Γ₂ − iΓ₃Γ₄ + Γ̃)`, obtained by
/// projecting the product of mapped number operators onto the bracket.
/// Returns `(p, residual)` where the residual is the max-abs mismatch.
pub fn resolve_int_prefactor() -> (f64, f64) {
    let product = local_number(Spin::Up).matmul(&local_number(Spin::Down));
    let bracket = interaction_bracket();
    let overlap = bracket.adjoint().matmul(&product).trace();
    let norm = bracket.adjoint().matmul(&bracket).trace();
    let p = (overlap / norm).re;
    (p, product.max_abs_diff(&bracket.scale_real(p)))
}

/// Endpoint factors `(P, Q)` of `hᵢ = P ⊗ Q` (strings on intermediate sites
/// are implied for non-adjacent bonds).
pub fn hopping_factors(term: usize) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let g = gammas();
    let (plus_i, minus_i) = (c(0.0, 1.0), c(0.0, -1.0));
    let gt = &g.gamma_tilde;
    let (left, right) = match term {
        1 => (g.gamma[1].matmul(gt).scale(minus_i), g.gamma[0].clone()),
        2 => (g.gamma[0].matmul(gt).scale(plus_i), g.gamma[1].clone()),
        3 => (g.gamma[3].matmul(gt).scale(minus_i), g.gamma[2].clone()),
        4 => (g.gamma[2].matmul(gt).scale(plus_i), g.gamma[3].clone()),
        other => return Err(QfmError::InvalidHoppingTerm(other as u8)),
    };
    Ok((left, right))
}

/// Two-site hopping generator `hᵢ` (16×16, unscaled).
pub fn hopping_generator(term: usize) -> Result<ComplexMatrix> {
    let (p, q) = hopping_factors(term)?;
    Ok(kron(&p, &q))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BondTerms {
    pub bond: (usize, usize),
    /// Sites strictly between the endpoints; each carries a Γ̃ factor.
    pub string_sites: Vec<usize>,
    /// `(J/2)·hᵢ` restricted to the endpoints, i = 1..4.
    pub terms: Vec<ComplexMatrix>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MappedHamiltonian {
    pub geometry: LatticeGeometry,
    #[serde(rename = "J")]
    pub j: f64,
    pub v: f64,
    pub int_prefactor: f64,
    pub hop_terms: Vec<BondTerms>,
    /// `int_prefactor·v·(I − iΓ₁Γ₂ − iΓ₃Γ₄ + Γ̃)` per site.
    pub int_terms: Vec<ComplexMatrix>,
}

pub fn build_mapped_hamiltonian(geometry: &LatticeGeometry, j: f64, v: f64) -> Result<MappedHamiltonian> {
    if !j.is_finite() || !v.is_finite() {
        return Err(QfmError::InvalidArgument("J and v must be finite".into()));
    }
    let (int_prefactor, _) = resolve_int_prefactor();
    let hop_terms = geometry
        .bonds
        .iter()
        .map(|&(a, b)| {
            let terms = (1..=4)
                .map(|t| hopping_generator(t).map(|h| h.scale_real(j / 2.0)))
                .collect::<Result<Vec<_>>>()?;
            Ok(BondTerms { bond: (a, b), string_sites: (a + 1..b).collect(), terms })
        })
        .collect::<Result<Vec<_>>>()?;
    let int_local = interaction_bracket().scale_real(int_prefactor * v);
    Ok(MappedHamiltonian {
        geometry: geometry.clone(),
        j,
        v,
        int_prefactor,
        hop_terms,
        int_terms: vec![int_local; geometry.site_count],
    })
}

fn embed_on_site(op: &ComplexMatrix, site: usize, sites: usize) -> ComplexMatrix {
    let id = ComplexMatrix::identity(QUDIT_DIM);
    kron_all((1..=sites).map(|m| if m == site { op } else { &id }))
}

impl MappedHamiltonian {
    pub fn site_count(&self) -> usize {
        self.geometry.site_count
    }

    /// Hopping part assembled from `map_fermion` products, so every bond
    /// carries its exact Γ̃ string.
    pub fn hopping_matrix(&self) -> Result<ComplexMatrix> {
        let l = self.site_count();
        check_dense(l)?;
        let dim = QUDIT_DIM.pow(l as u32);
        let mut h = ComplexMatrix::zeros(dim, dim);
        if self.j == 0.0 {
            return Ok(h);
        }
        for &(a, b) in &self.geometry.bonds {
            for spin in Spin::BOTH {
                let ca_dag = map_fermion(a, spin, OperatorKind::Create, l)?.matrix;
                let cb = map_fermion(b, spin, OperatorKind::Annihilate, l)?.matrix;
                let forward = ca_dag.matmul(&cb);
                h = &h - &(&forward + &forward.adjoint()).scale_real(self.j);
            }
        }
        Ok(h)
    }

    pub fn interaction_matrix(&self) -> Result<ComplexMatrix> {
        let l = self.site_count();
        check_dense(l)?;
        let dim = QUDIT_DIM.pow(l as u32);
        Ok(self
            .int_terms
            .iter()
            .enumerate()
            .fold(ComplexMatrix::zeros(dim, dim), |acc, (m, t)| &acc + &embed_on_site(t, m + 1, l)))
    }

    pub fn full_matrix(&self) -> Result<ComplexMatrix> {
        Ok(&self.hopping_matrix()? + &self.interaction_matrix()?)
    }

    /// Hopping part assembled from the stored `(J/2)·hᵢ` endpoint terms with
    /// Γ̃ inserted on intermediate sites. Must agree with [`Self::hopping_matrix`].
    pub fn structured_hopping_matrix(&self) -> Result<ComplexMatrix> {
        let l = self.site_count();
        check_dense(l)?;
        let dim = QUDIT_DIM.pow(l as u32);
        let g = gammas();
        let id = ComplexMatrix::identity(QUDIT_DIM);
        let mut h = ComplexMatrix::zeros(dim, dim);
        for bond in &self.hop_terms {
            let (a, b) = bond.bond;
            for t in 1..=4 {
                let (p, q) = hopping_factors(t)?;
                let factors = (1..=l).map(|m| {
                    if m == a {
                        &p
                    } else if m == b {
                        &q
                    } else if m > a && m < b {
                        &g.gamma_tilde
                    } else {
                        &id
                    }
                });
                h = &h + &kron_all(factors).scale_real(self.j / 2.0);
            }
        }
        Ok(h)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| QfmError::Parse(e.to_string()))
    }
}

/// Max-abs difference between the sorted spectra of the mapped Hamiltonian
/// and the fermionic occupation-basis Hamiltonian.
pub fn spectrum_equivalence_residual(geometry: &LatticeGeometry, j: f64, v: f64) -> Result<f64> {
    let mapped = build_mapped_hamiltonian(geometry, j, v)?.full_matrix()?;
    let fermionic = fermionic_hamiltonian(geometry, j, v)?;
    let a = eigvalsh(&mapped)?;
    let b = eigvalsh(&fermionic)?;
    Ok(a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
}
