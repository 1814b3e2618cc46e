//! Exact diagonalization of the bare exchange system with cyclic-shift
//! symmetry labels.
//!
//! The exchange coupling conserves the excitation number and commutes with
//! the cyclic shift of the qubits, so degenerate eigenspaces are resolved
//! into simultaneous eigenvectors of the shift operator. Eigenvectors are
//! tagged with their excitation sector and shift eigenvalue q^k,
//! q = e^{i2π/N}.

use crate::model::{build_bare_hamiltonian, QubitSystem};
use crate::{C64, CMatrix, CVector};
use thiserror::Error;

/// Largest qubit count accepted by the dense solver.
pub const MAX_QUBITS: usize = 12;

/// Relative tolerance for grouping degenerate eigenvalues.
const DEGENERACY_TOL: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum SpectrumError {
    #[error("dense diagonalization capped at {MAX_QUBITS} qubits, got {0}")]
    DimensionTooLarge(usize),
}

/// Symmetry tags of one eigenvector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SymmetryLabel {
    /// Excitation sector (number of excited qubits).
    pub excitation: usize,
    /// Exponent k of the cyclic-shift eigenvalue q^k, when resolved.
    pub shift_exponent: Option<usize>,
}

/// Result of an exact diagonalization: ascending eigenvalues, matching
/// eigenvector columns, and per-vector symmetry labels.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
    pub labels: Vec<SymmetryLabel>,
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvector(&self, k: usize) -> CVector {
        self.eigenvectors.column(k).into_owned()
    }

    /// Index of the eigenvector with the largest overlap with `v`.
    pub fn closest_to(&self, v: &CVector) -> usize {
        (0..self.dim())
            .max_by(|&a, &b| {
                let oa = self.eigenvectors.column(a).dotc(v).norm_sqr();
                let ob = self.eigenvectors.column(b).dotc(v).norm_sqr();
                oa.partial_cmp(&ob).unwrap()
            })
            .unwrap()
    }
}

/// The unitary permutation rotating qubit contents by one position:
/// the last qubit's state moves to the front, so |001⟩ → |100⟩.
pub fn cyclic_shift_operator(n: usize) -> CMatrix {
    assert!(n >= 2, "need at least 2 qubits");
    let dim = 1usize << n;
    let mut c = CMatrix::zeros(dim, dim);
    for s in 0..dim {
        let rotated = (s >> 1) | ((s & 1) << (n - 1));
        c[(rotated, s)] = C64::new(1.0, 0.0);
    }
    c
}

/// Full spectrum of H_qq with degenerate subspaces resolved into the
/// cyclic-shift eigenbasis, ordered by energy and then by shift exponent.
pub fn diagonalize_bare(sys: &QubitSystem) -> Result<EigenSystem, SpectrumError> {
    if sys.n_qubits > MAX_QUBITS {
        return Err(SpectrumError::DimensionTooLarge(sys.n_qubits));
    }
    let n = sys.n_qubits;
    let dim = sys.dim();
    let h = build_bare_hamiltonian(sys);
    let eig = h.clone().symmetric_eigen();

    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let eigenvalues: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors: Vec<CVector> =
        order.iter().map(|&k| eig.eigenvectors.column(k).into_owned()).collect();

    let shift = cyclic_shift_operator(n);
    let scale = eigenvalues.iter().fold(1.0_f64, |m, e| m.max(e.abs()));

    // resolve each degenerate group into shift eigenvectors
    let mut start = 0;
    while start < dim {
        let mut end = start + 1;
        while end < dim && (eigenvalues[end] - eigenvalues[start]).abs() <= DEGENERACY_TOL * scale
        {
            end += 1;
        }
        if end - start > 1 {
            resolve_group(&mut vectors[start..end], &shift);
        }
        start = end;
    }

    // label everything, then order degenerate groups by shift exponent
    let mut labeled: Vec<(CVector, SymmetryLabel, f64)> = vectors
        .into_iter()
        .zip(eigenvalues.iter())
        .map(|(v, &e)| {
            let label = label_vector(&v, &shift, n);
            (v, label, e)
        })
        .collect();
    let mut start = 0;
    while start < dim {
        let mut end = start + 1;
        while end < dim && (labeled[end].2 - labeled[start].2).abs() <= DEGENERACY_TOL * scale {
            end += 1;
        }
        labeled[start..end].sort_by_key(|(_, label, _)| {
            (label.excitation, label.shift_exponent.unwrap_or(usize::MAX))
        });
        start = end;
    }

    let mut eigenvectors = CMatrix::zeros(dim, dim);
    let mut labels = Vec::with_capacity(dim);
    for (k, (v, label, _)) in labeled.iter().enumerate() {
        eigenvectors.set_column(k, v);
        labels.push(*label);
    }
    Ok(EigenSystem { eigenvalues, eigenvectors, labels })
}

/// Resolve a degenerate eigenspace into simultaneous eigenvectors of the
/// cyclic shift and the excitation number (both commute with H_qq). The
/// shift restriction is unitary; a fixed generic combination of its
/// Hermitian and anti-Hermitian parts separates all N roots of unity, and
/// an excitation offset of 3 per sector keeps different sectors apart
/// since that combination is bounded by √(1+γ²) < 1.1.
fn resolve_group(vectors: &mut [CVector], shift: &CMatrix) {
    let g = vectors.len();
    let dim = vectors[0].len();
    let mut basis = CMatrix::zeros(dim, g);
    for (k, v) in vectors.iter().enumerate() {
        basis.set_column(k, v);
    }
    let sub = basis.adjoint() * shift * &basis;
    // cos θ + γ sin θ with γ = tan(0.4) is injective on the N-th roots
    let gamma = 0.4_f64.tan();
    let half = C64::new(0.5, 0.0);
    let herm = (&sub + sub.adjoint()) * half;
    let anti = (&sub - sub.adjoint()) * C64::new(0.0, -0.5);
    let mut excitation = CMatrix::zeros(dim, dim);
    for s in 0..dim {
        excitation[(s, s)] = C64::new(s.count_ones() as f64, 0.0);
    }
    let exc_sub = basis.adjoint() * excitation * &basis;
    let mix = herm + anti * C64::new(gamma, 0.0) + exc_sub * C64::new(3.0, 0.0);
    let eig = mix.symmetric_eigen();
    let rotated = basis * &eig.eigenvectors;
    for (k, v) in vectors.iter_mut().enumerate() {
        *v = rotated.column(k).into_owned();
    }
}

fn label_vector(v: &CVector, shift: &CMatrix, n: usize) -> SymmetryLabel {
    let excitation = dominant_excitation(v, n);
    let expect = v.dotc(&(shift * v));
    let exponent = if (expect.norm() - 1.0).abs() < 1e-8 {
        let step = std::f64::consts::TAU / n as f64;
        let k = (expect.arg() / step).round();
        let k = ((k as i64).rem_euclid(n as i64)) as usize;
        let q_k = C64::from_polar(1.0, step * k as f64);
        ((expect - q_k).norm() < 1e-8).then_some(k)
    } else {
        None
    };
    SymmetryLabel { excitation, shift_exponent: exponent }
}

fn dominant_excitation(v: &CVector, _n: usize) -> usize {
    let mut weight_by_sector = std::collections::BTreeMap::new();
    for (idx, a) in v.iter().enumerate() {
        *weight_by_sector.entry(idx.count_ones() as usize).or_insert(0.0) += a.norm_sqr();
    }
    weight_by_sector
        .into_iter()
        .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
        .map(|(sector, _)| sector)
        .unwrap()
}

/// The two N-qubit W-state energies and the gap to their shift-degenerate
/// partners: E = (N−1)λ ∓ (N−2)ω₀/2, gap = N·λ.
pub fn w_state_energies(n: usize, lambda: f64, omega0: f64) -> (f64, f64, f64) {
    assert!(n >= 2, "need at least 2 qubits");
    let nf = n as f64;
    let e1 = (nf - 1.0) * lambda - (nf - 2.0) * omega0 / 2.0;
    let e2 = (nf - 1.0) * lambda + (nf - 2.0) * omega0 / 2.0;
    (e1, e2, nf * lambda)
}
