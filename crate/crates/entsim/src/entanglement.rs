//! Density-matrix utilities: partial trace, partial transpose, logarithmic
//! negativity, and fidelity against canonical target states.
//!
//! The logarithmic negativity is log₂ of the trace norm of the partially
//! transposed density matrix. The partial transpose of a Hermitian matrix
//! is Hermitian, so the trace norm is the sum of |eigenvalue| — cheaper
//! and more stable than a general SVD at these dimensions.

use crate::dynamics::StateVector;
use crate::model::{DiagonalRule, EffectiveScheme};
use crate::{C64, CMatrix, CVector};
use thiserror::Error;

/// Validation tolerance for density matrices (trace, Hermiticity, PSD).
pub const DENSITY_TOL: f64 = 1e-10;

#[derive(Debug, Error, PartialEq)]
pub enum EntanglementError {
    #[error("qubit index {index} out of range for {n_qubits} qubits")]
    IndexOutOfRange { index: usize, n_qubits: usize },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("state dimension {0} is not a power of two")]
    NotQubitSized(usize),
    #[error("partial trace must keep a nonempty proper subset of qubits")]
    BadPartition,
    #[error("amplitudes are not over a recognized effective-scheme basis")]
    UnknownBasis,
    #[error("not a density matrix: {0}")]
    Invalid(String),
}

/// A validated density matrix over N qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
    n_qubits: usize,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace, and positive semidefiniteness
    /// (all to [`DENSITY_TOL`]).
    pub fn new(matrix: CMatrix) -> Result<Self, EntanglementError> {
        let dim = matrix.nrows();
        if matrix.ncols() != dim {
            return Err(EntanglementError::DimensionMismatch { left: dim, right: matrix.ncols() });
        }
        let n_qubits = qubit_count(dim)?;
        if (&matrix - matrix.adjoint()).norm() > DENSITY_TOL {
            return Err(EntanglementError::Invalid("not Hermitian".into()));
        }
        let trace = matrix.trace();
        if (trace - C64::new(1.0, 0.0)).norm() > DENSITY_TOL {
            return Err(EntanglementError::Invalid(format!("trace = {trace} ≠ 1")));
        }
        let eigenvalues = matrix.clone().symmetric_eigen().eigenvalues;
        if eigenvalues.iter().any(|&e| e < -DENSITY_TOL) {
            return Err(EntanglementError::Invalid("negative eigenvalue".into()));
        }
        Ok(Self { matrix, n_qubits })
    }

    /// ρ = |ψ⟩⟨ψ| from a normalized pure state on the product basis.
    pub fn from_pure(psi: &CVector) -> Result<Self, EntanglementError> {
        let n_qubits = qubit_count(psi.len())?;
        let norm = psi.norm();
        if (norm - 1.0).abs() > DENSITY_TOL.sqrt() {
            return Err(EntanglementError::Invalid(format!("state norm {norm} ≠ 1")));
        }
        let matrix = psi * psi.adjoint();
        Ok(Self { matrix, n_qubits })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

fn qubit_count(dim: usize) -> Result<usize, EntanglementError> {
    if dim < 2 || !dim.is_power_of_two() {
        return Err(EntanglementError::NotQubitSized(dim));
    }
    Ok(dim.trailing_zeros() as usize)
}

/// Transpose the indices of one qubit. The result is Hermitian but not
/// necessarily positive; its negative eigenvalues witness entanglement.
pub fn partial_transpose(
    rho: &DensityMatrix,
    subsystem: usize,
) -> Result<CMatrix, EntanglementError> {
    partial_transpose_set(rho, &[subsystem])
}

/// Transpose the indices of a set of qubits (one side of a bipartition).
pub fn partial_transpose_set(
    rho: &DensityMatrix,
    subsystems: &[usize],
) -> Result<CMatrix, EntanglementError> {
    let n = rho.n_qubits();
    for &q in subsystems {
        if q >= n {
            return Err(EntanglementError::IndexOutOfRange { index: q, n_qubits: n });
        }
    }
    let dim = rho.dim();
    let mut out = CMatrix::zeros(dim, dim);
    // qubit q occupies bit (n−1−q) of the basis index
    let mask: usize = subsystems.iter().map(|&q| 1usize << (n - 1 - q)).sum();
    for r in 0..dim {
        for c in 0..dim {
            let rt = (r & !mask) | (c & mask);
            let ct = (c & !mask) | (r & mask);
            out[(rt, ct)] = rho.matrix[(r, c)];
        }
    }
    Ok(out)
}

/// Logarithmic negativity log₂‖ρ^{T_A}‖ across the bipartition that
/// separates `partition` from the remaining qubits.
pub fn log_negativity(
    rho: &DensityMatrix,
    partition: &[usize],
) -> Result<f64, EntanglementError> {
    let pt = partial_transpose_set(rho, partition)?;
    let eigenvalues = pt.symmetric_eigen().eigenvalues;
    let trace_norm: f64 = eigenvalues.iter().map(|e| e.abs()).sum();
    Ok(trace_norm.log2())
}

/// Reduced density matrix on the kept qubits, tracing out the rest.
pub fn partial_trace(
    rho: &DensityMatrix,
    keep: &[usize],
) -> Result<DensityMatrix, EntanglementError> {
    let n = rho.n_qubits();
    let mut keep_sorted = keep.to_vec();
    keep_sorted.sort_unstable();
    keep_sorted.dedup();
    if keep_sorted.is_empty() || keep_sorted.len() >= n {
        return Err(EntanglementError::BadPartition);
    }
    for &q in &keep_sorted {
        if q >= n {
            return Err(EntanglementError::IndexOutOfRange { index: q, n_qubits: n });
        }
    }
    let traced: Vec<usize> = (0..n).filter(|q| !keep_sorted.contains(q)).collect();
    let kd = 1usize << keep_sorted.len();
    let td = 1usize << traced.len();
    // scatter kept / traced sub-indices back into full basis indices
    let compose = |kept_bits: usize, traced_bits: usize| -> usize {
        let mut idx = 0usize;
        for (pos, &q) in keep_sorted.iter().enumerate() {
            if (kept_bits >> (keep_sorted.len() - 1 - pos)) & 1 == 1 {
                idx |= 1 << (n - 1 - q);
            }
        }
        for (pos, &q) in traced.iter().enumerate() {
            if (traced_bits >> (traced.len() - 1 - pos)) & 1 == 1 {
                idx |= 1 << (n - 1 - q);
            }
        }
        idx
    };
    let mut out = CMatrix::zeros(kd, kd);
    for r in 0..kd {
        for c in 0..kd {
            let mut acc = C64::new(0.0, 0.0);
            for t in 0..td {
                acc += rho.matrix[(compose(r, t), compose(c, t))];
            }
            out[(r, c)] = acc;
        }
    }
    Ok(DensityMatrix { matrix: out, n_qubits: keep_sorted.len() })
}

/// Canonical maximally entangled target states with fixed phases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TargetState {
    /// (|00⟩ + |11⟩)/√2
    PhiPlus,
    /// (|00⟩ − |11⟩)/√2
    PhiMinus,
    /// (|10⟩ + |01⟩)/√2
    PsiPlus,
    /// (|10⟩ − |01⟩)/√2
    PsiMinus,
    /// (|000⟩ + |111⟩)/√2
    Ghz3,
    /// (|001⟩ + |010⟩ + |100⟩)/√3
    W1,
    /// (|110⟩ + |101⟩ + |011⟩)/√3
    W2,
}

impl TargetState {
    pub fn n_qubits(&self) -> usize {
        match self {
            Self::PhiPlus | Self::PhiMinus | Self::PsiPlus | Self::PsiMinus => 2,
            Self::Ghz3 | Self::W1 | Self::W2 => 3,
        }
    }

    /// Product-basis coordinates.
    pub fn vector(&self) -> CVector {
        let inv2 = C64::new(1.0 / 2.0_f64.sqrt(), 0.0);
        let inv3 = C64::new(1.0 / 3.0_f64.sqrt(), 0.0);
        let mut v = CVector::zeros(1 << self.n_qubits());
        match self {
            Self::PhiPlus => {
                v[0] = inv2;
                v[3] = inv2;
            }
            Self::PhiMinus => {
                v[0] = inv2;
                v[3] = -inv2;
            }
            Self::PsiPlus => {
                v[2] = inv2;
                v[1] = inv2;
            }
            Self::PsiMinus => {
                v[2] = inv2;
                v[1] = -inv2;
            }
            Self::Ghz3 => {
                v[0] = inv2;
                v[7] = inv2;
            }
            Self::W1 => {
                v[1] = inv3;
                v[2] = inv3;
                v[4] = inv3;
            }
            Self::W2 => {
                v[6] = inv3;
                v[5] = inv3;
                v[3] = inv3;
            }
        }
        v
    }
}

/// Rotate effective-scheme amplitudes into product-basis coordinates.
pub fn amplitudes_to_product_basis(
    a: &StateVector,
    scheme: &EffectiveScheme,
) -> Result<CVector, EntanglementError> {
    if a.dim() != scheme.dim() {
        return Err(EntanglementError::DimensionMismatch { left: a.dim(), right: scheme.dim() });
    }
    if a.labels.iter().map(String::as_str).ne(scheme.basis_labels().iter().copied()) {
        return Err(EntanglementError::UnknownBasis);
    }
    let inv2 = C64::new(1.0 / 2.0_f64.sqrt(), 0.0);
    let inv3 = C64::new(1.0 / 3.0_f64.sqrt(), 0.0);
    Ok(match scheme.diagonal_rule() {
        DiagonalRule::TwoQubitDiamond => {
            // (a_00, a_−, a_+, a_11) over |00⟩, (|10⟩∓|01⟩)/√2, |11⟩
            let mut v = CVector::zeros(4);
            v[0] = a.amplitudes[0];
            v[1] = (a.amplitudes[2] - a.amplitudes[1]) * inv2;
            v[2] = (a.amplitudes[2] + a.amplitudes[1]) * inv2;
            v[3] = a.amplitudes[3];
            v
        }
        DiagonalRule::ThreeQubitLadder => {
            // (a_000, a_W1, a_W2, a_111) over the symmetric states
            let mut v = CVector::zeros(8);
            v[0] = a.amplitudes[0];
            for idx in [1, 2, 4] {
                v[idx] = a.amplitudes[1] * inv3;
            }
            for idx in [3, 5, 6] {
                v[idx] = a.amplitudes[2] * inv3;
            }
            v[7] = a.amplitudes[3];
            v
        }
    })
}

/// Phase-insensitive overlap |⟨target|a⟩|².
pub fn fidelity(a: &CVector, target: &TargetState) -> Result<f64, EntanglementError> {
    let tv = target.vector();
    if tv.len() != a.len() {
        return Err(EntanglementError::DimensionMismatch { left: a.len(), right: tv.len() });
    }
    Ok(tv.dotc(a).norm_sqr())
}

/// Best fidelity to a|000⟩ + e^{iφ} b|111⟩ over the relative phase φ (and
/// the phase that attains it). Equals (|a_000| + |a_111|)²/2 for
/// normalized states.
pub fn ghz_fidelity_phase_optimized(psi: &CVector) -> (f64, f64) {
    assert_eq!(psi.len(), 8, "three-qubit state expected");
    let a = psi[0];
    let b = psi[7];
    let fid = 0.5 * (a.norm() + b.norm()).powi(2);
    let phase = (b.arg() - a.arg()).rem_euclid(std::f64::consts::TAU);
    (fid, phase)
}
