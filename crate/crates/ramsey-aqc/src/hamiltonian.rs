//! Operators of the interpolating Hamiltonian H(s) = (1-s) H_i + s H_P.
//!
//! H_P is diagonal in the computational basis with the graph cost as
//! eigenvalue; its operator form is a sum of projector products, one
//! all-`P1` term per m-vertex subset and one all-`P0` term per n-vertex
//! subset. H_i = sum_l (I - sigma_x^l)/2 has the uniform superposition as
//! its zero-energy ground state. All applicators are matrix-free; the full
//! 2^L x 2^L matrix is never materialized.

use crate::cost::{
    build_cost_table, subset_edge_positions, vertex_subsets, CostTable, RamseyInstance,
};
use crate::error::{Error, Result};
use crate::graph::GraphBits;
use crate::kernels;
use crate::lanczos;
use num_complex::Complex64;
use serde::Serialize;
use std::io::Write;

/// State of the L-qubit register: 2^L complex amplitudes in basis order.
pub type StateVector = Vec<Complex64>;

/// Largest register the spectral-gap solver accepts.
pub const GAP_QUBIT_CAP: usize = 15;

/// Residual tolerance of the iterative eigensolver.
pub const GAP_RESIDUAL_TOL: f64 = 1e-8;

/// Single-qubit projector onto bit value 0 or 1, under the convention
/// sigma_z |a> = (-1)^a |a>.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ProjectorKind {
    /// (I + sigma_z)/2, selects bit 0.
    P0,
    /// (I - sigma_z)/2, selects bit 1.
    P1,
}

impl ProjectorKind {
    fn label(self) -> &'static str {
        match self {
            ProjectorKind::P0 => "P0",
            ProjectorKind::P1 => "P1",
        }
    }
}

/// Product of single-qubit projectors on distinct qubits.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProjectorTerm {
    /// (qubit, projector) factors, sorted by qubit position.
    pub factors: Vec<(usize, ProjectorKind)>,
}

impl ProjectorTerm {
    /// Eigenvalue (0 or 1) of this projector product on a basis state.
    pub fn eval(&self, bits: u64) -> u64 {
        for &(q, kind) in &self.factors {
            let bit = (bits >> q) & 1;
            let want = match kind {
                ProjectorKind::P0 => 0,
                ProjectorKind::P1 => 1,
            };
            if bit != want {
                return 0;
            }
        }
        1
    }
}

/// The problem Hamiltonian as an explicit sum of projector products.
#[derive(Clone, Debug)]
pub struct TermList {
    inst: RamseyInstance,
    terms: Vec<ProjectorTerm>,
}

impl TermList {
    pub fn instance(&self) -> &RamseyInstance {
        &self.inst
    }

    pub fn n_qubits(&self) -> usize {
        self.inst.qubits()
    }

    pub fn terms(&self) -> &[ProjectorTerm] {
        &self.terms
    }

    /// Line-oriented text export: a header followed by one `+1 q:Pk ...`
    /// line per term, clique terms first, both groups in lexicographic
    /// subset order.
    pub fn export<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(
            w,
            "ramsey-terms v1 L={} m={} n={} N={}",
            self.inst.qubits(),
            self.inst.m(),
            self.inst.n(),
            self.inst.n_vertices()
        )?;
        for term in &self.terms {
            write!(w, "+1")?;
            for &(q, kind) in &term.factors {
                write!(w, " {}:{}", q, kind.label())?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// Builds the projector-product form of H_P: one all-`P1` term over the
/// internal edges of each m-subset, then one all-`P0` term per n-subset.
pub fn emit_terms(inst: &RamseyInstance) -> TermList {
    let nv = inst.n_vertices();
    let mut terms = Vec::new();
    for subset in vertex_subsets(nv, inst.m()) {
        terms.push(ProjectorTerm {
            factors: subset_edge_positions(&subset, nv)
                .iter()
                .map(|&p| (p as usize, ProjectorKind::P1))
                .collect(),
        });
    }
    for subset in vertex_subsets(nv, inst.n()) {
        terms.push(ProjectorTerm {
            factors: subset_edge_positions(&subset, nv)
                .iter()
                .map(|&p| (p as usize, ProjectorKind::P0))
                .collect(),
        });
    }
    TermList { inst: *inst, terms }
}

/// Sum of all term eigenvalues on a basis state; equals the graph cost.
pub fn eval_terms(list: &TermList, g: &GraphBits) -> Result<u64> {
    if g.len() != list.n_qubits() {
        return Err(Error::LengthMismatch {
            expected: list.n_qubits(),
            got: g.len(),
        });
    }
    let bits = g.bits();
    Ok(list.terms.iter().map(|t| t.eval(bits)).sum())
}

fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::LengthMismatch { expected, got });
    }
    Ok(())
}

/// Applies the diagonal problem Hamiltonian: amplitudes scaled by the cost.
pub fn apply_hp(table: &CostTable, psi: &[Complex64]) -> Result<StateVector> {
    check_len(table.len(), psi.len())?;
    let mut out = vec![Complex64::default(); psi.len()];
    kernels::diag_combine(psi, &mut out, table.values(), 0.0, 1.0);
    Ok(out)
}

/// Applies the initial Hamiltonian:
/// `(H_i psi)[x] = (L/2) psi[x] - (1/2) sum_l psi[x ^ 2^l]`.
pub fn apply_hi(psi: &[Complex64], l_qubits: usize) -> Result<StateVector> {
    check_len(1usize << l_qubits, psi.len())?;
    let mut out: StateVector = psi.iter().map(|a| a * (l_qubits as f64 / 2.0)).collect();
    kernels::neighbor_acc(psi, &mut out, -0.5);
    Ok(out)
}

/// Applies the interpolated Hamiltonian `(1-s) H_i + s H_P`.
pub fn apply_h(s: f64, table: &CostTable, psi: &[Complex64]) -> Result<StateVector> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::invalid("s", format!("{s} outside [0, 1]")));
    }
    check_len(table.len(), psi.len())?;
    let mut out = vec![Complex64::default(); psi.len()];
    kernels::apply_h_into(s, table.values(), psi, &mut out);
    Ok(out)
}

/// Two lowest eigenvalues of H(s) at one schedule point.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct GapSample {
    pub s: f64,
    pub e0: f64,
    pub e1: f64,
}

impl GapSample {
    pub fn gap(&self) -> f64 {
        self.e1 - self.e0
    }
}

/// Two lowest eigenvalues of H(s) at each sample point, by deflated Lanczos
/// on the matrix-free applicator. E1 is counted with multiplicity, so the
/// gap vanishes on a degenerate ground space.
pub fn spectral_gap(inst: &RamseyInstance, s_samples: &[f64]) -> Result<Vec<GapSample>> {
    let l = inst.qubits();
    if l > GAP_QUBIT_CAP {
        return Err(Error::CapExceeded {
            l,
            cap: GAP_QUBIT_CAP,
        });
    }
    for &s in s_samples {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::invalid("s_samples", format!("{s} outside [0, 1]")));
        }
    }
    let table = build_cost_table(inst)?;
    let dim = table.len();
    let max_iter = dim.min(400);
    let mut out = Vec::with_capacity(s_samples.len());
    for (i, &s) in s_samples.iter().enumerate() {
        let apply = |v: &[f64], w: &mut [f64]| kernels::apply_h_into(s, table.values(), v, w);
        let seed = 0x9e3779b97f4a7c15u64 ^ (i as u64);
        let p0 = lanczos::smallest_eigenpair(dim, apply, &[], seed, GAP_RESIDUAL_TOL, max_iter)?;
        let p1 = lanczos::smallest_eigenpair(
            dim,
            apply,
            &[&p0.vector],
            seed.wrapping_add(1),
            GAP_RESIDUAL_TOL,
            max_iter,
        )?;
        let worst = p0.residual.max(p1.residual);
        if worst > GAP_RESIDUAL_TOL * (1.0 + p0.value.abs().max(p1.value.abs())) {
            return Err(Error::EigensolverStalled {
                residual: worst,
                iterations: max_iter,
            });
        }
        out.push(GapSample {
            s,
            e0: p0.value,
            // The deflated minimum can undershoot E0 by roundoff only.
            e1: p1.value.max(p0.value),
        });
    }
    Ok(out)
}
