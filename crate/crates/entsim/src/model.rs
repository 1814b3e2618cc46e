//! Hamiltonian builders: the bare exchange-coupled system, the full
//! lab-frame driven system, and the rotating-wave effective level schemes.
//!
//! Basis convention: product states are indexed by their binary label with
//! qubit 0 as the most significant bit, so for two qubits the order is
//! |00⟩, |01⟩, |10⟩, |11⟩. The bare Hamiltonian is
//!
//! ```text
//! H_qq = λ Σ_{i≠j} S_i⁺ S_j⁻ + (ω₀/2) Σ_i S_i^z,   S^z = |1⟩⟨1| − |0⟩⟨0|
//! ```
//!
//! with the sum over ordered pairs, which puts the one-excitation pair
//! states of two qubits at ±λ and the end states at ∓ω₀.

use crate::pulses::{DetuningProfile, Drive, PulseShape};
use crate::{C64, CMatrix};
use thiserror::Error;

/// Absolute tolerance on the imposed detuning constraint Δ1+Δ3 = Δ2+Δ4.
pub const DETUNING_CONSTRAINT_TOL: f64 = 1e-9;

/// Sample count used to check the constraint for time-dependent detunings.
const CONSTRAINT_SAMPLES: usize = 257;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid qubit system: {0}")]
    InvalidSystem(String),
    #[error(
        "detuning constraint violated at t = {t}: |Δ1+Δ3−Δ2−Δ4| = {violation:.3e} > {tol:.1e}"
    )]
    DetuningConstraintViolation { t: f64, violation: f64, tol: f64 },
}

/// A system of N qubits with equal level splitting ω₀, all-to-all exchange
/// coupling λ, and per-qubit transition dipole elements d₁₀.
#[derive(Debug, Clone, PartialEq)]
pub struct QubitSystem {
    pub n_qubits: usize,
    pub lambda: f64,
    pub omega0: f64,
    /// d₁₀ per qubit; d₀₁ is the conjugate.
    pub dipoles: Vec<C64>,
}

impl QubitSystem {
    pub fn new(
        n_qubits: usize,
        lambda: f64,
        omega0: f64,
        dipoles: Vec<C64>,
    ) -> Result<Self, ModelError> {
        if n_qubits < 2 {
            return Err(ModelError::InvalidSystem(format!(
                "need at least 2 qubits, got {n_qubits}"
            )));
        }
        if omega0 <= 0.0 || omega0.is_nan() {
            return Err(ModelError::InvalidSystem(format!(
                "level splitting must be positive, got {omega0}"
            )));
        }
        if dipoles.len() != n_qubits {
            return Err(ModelError::InvalidSystem(format!(
                "expected {n_qubits} dipole elements, got {}",
                dipoles.len()
            )));
        }
        Ok(Self { n_qubits, lambda, omega0, dipoles })
    }

    /// Hilbert-space dimension 2^N.
    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    /// Whether qubit `i` is excited in product state `index`.
    pub fn excited(&self, index: usize, i: usize) -> bool {
        (index >> (self.n_qubits - 1 - i)) & 1 == 1
    }

    /// Number of excited qubits in product state `index`.
    pub fn excitation_number(&self, index: usize) -> u32 {
        (index as u32).count_ones()
    }
}

/// The bare Hamiltonian H_qq on the product basis.
pub fn build_bare_hamiltonian(sys: &QubitSystem) -> CMatrix {
    let n = sys.n_qubits;
    let dim = sys.dim();
    let mut h = CMatrix::zeros(dim, dim);
    for s in 0..dim {
        let n_exc = sys.excitation_number(s) as f64;
        let n_gnd = n as f64 - n_exc;
        h[(s, s)] = C64::new(sys.omega0 / 2.0 * (n_exc - n_gnd), 0.0);
        // λ S_i⁺ S_j⁻ over ordered pairs: move one excitation from j to i.
        for j in 0..n {
            if !sys.excited(s, j) {
                continue;
            }
            for i in 0..n {
                if i == j || sys.excited(s, i) {
                    continue;
                }
                let target = s & !(1 << (n - 1 - j)) | (1 << (n - 1 - i));
                h[(target, s)] += C64::new(sys.lambda, 0.0);
            }
        }
    }
    h
}

/// Total dipole operator Σ_i d^i on the product basis, with
/// d^i = d₁₀|1⟩⟨0| + d₁₀*|0⟩⟨1| acting on qubit i.
pub fn total_dipole_operator(sys: &QubitSystem) -> CMatrix {
    let n = sys.n_qubits;
    let dim = sys.dim();
    let mut d = CMatrix::zeros(dim, dim);
    for s in 0..dim {
        for i in 0..n {
            if sys.excited(s, i) {
                continue;
            }
            let raised = s | (1 << (n - 1 - i));
            d[(raised, s)] += sys.dipoles[i];
            d[(s, raised)] += sys.dipoles[i].conj();
        }
    }
    d
}

/// One laser: a slowly varying real envelope ε(t) on a carrier ω_l, so that
/// E(t) = ε(t) e^{−iω_l t} + ε(t) e^{iω_l t} = 2 ε(t) cos(ω_l t).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabFrameField {
    pub envelope: PulseShape,
    pub carrier: f64,
}

impl LabFrameField {
    pub fn new(envelope: PulseShape, carrier: f64) -> Self {
        assert!(carrier > 0.0, "carrier frequency must be positive");
        Self { envelope, carrier }
    }

    /// Real field value at time `t`.
    pub fn value(&self, t: f64) -> f64 {
        2.0 * self.envelope.evaluate(t) * (self.carrier * t).cos()
    }
}

/// The driven lab-frame Hamiltonian H_qq − (Σ_i d^i) Σ_j E_j(t).
#[derive(Debug, Clone)]
pub struct LabFrameHamiltonian {
    bare: CMatrix,
    dipole: CMatrix,
    fields: Vec<LabFrameField>,
}

impl LabFrameHamiltonian {
    pub fn at(&self, t: f64) -> CMatrix {
        let field: f64 = self.fields.iter().map(|f| f.value(t)).sum();
        &self.bare - &self.dipole * C64::new(field, 0.0)
    }

    /// Largest carrier among the driving fields.
    pub fn max_carrier(&self) -> f64 {
        self.fields.iter().map(|f| f.carrier).fold(0.0, f64::max)
    }
}

pub fn build_lab_frame_hamiltonian(
    sys: &QubitSystem,
    fields: Vec<LabFrameField>,
) -> LabFrameHamiltonian {
    assert!(!fields.is_empty(), "at least one field is required");
    LabFrameHamiltonian {
        bare: build_bare_hamiltonian(sys),
        dipole: total_dipole_operator(sys),
        fields,
    }
}

/// How channel detunings populate the diagonal of an effective scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagonalRule {
    /// Four-level diamond of two coupled qubits: diag(−Δ2, Δ1−Δ2, 0, Δ4).
    TwoQubitDiamond,
    /// Four-level ladder of three coupled qubits:
    /// diag(0, Δ1, Δ1+Δ2, Δ1+Δ2+Δ3).
    ThreeQubitLadder,
}

impl DiagonalRule {
    fn diagonal(&self, d: &[f64]) -> [f64; 4] {
        match self {
            Self::TwoQubitDiamond => [-d[1], d[0] - d[1], 0.0, d[3]],
            Self::ThreeQubitLadder => [0.0, d[0], d[0] + d[1], d[0] + d[1] + d[2]],
        }
    }
}

/// An RWA level diagram: eigenbasis labels, Rabi channel placement, and the
/// diagonal rule, together with the drives that generate the matrix.
#[derive(Debug, Clone)]
pub struct EffectiveScheme {
    basis_labels: Vec<&'static str>,
    /// (row, col, channel): entry (row, col) gets −Ω*, (col, row) gets −Ω.
    rabi_channels: Vec<(usize, usize, usize)>,
    diagonal_rule: DiagonalRule,
    drives: Vec<Drive>,
    detunings: Vec<DetuningProfile>,
    warnings: Vec<String>,
}

impl EffectiveScheme {
    pub fn dim(&self) -> usize {
        self.basis_labels.len()
    }

    pub fn basis_labels(&self) -> &[&'static str] {
        &self.basis_labels
    }

    pub fn rabi_channels(&self) -> &[(usize, usize, usize)] {
        &self.rabi_channels
    }

    pub fn diagonal_rule(&self) -> DiagonalRule {
        self.diagonal_rule
    }

    pub fn drives(&self) -> &[Drive] {
        &self.drives
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// The effective Hamiltonian matrix at time `t`.
    pub fn hamiltonian_at(&self, t: f64) -> CMatrix {
        let dim = self.dim();
        let mut h = CMatrix::zeros(dim, dim);
        let deltas: Vec<f64> = self.detunings.iter().map(|d| d.value(t)).collect();
        for (k, &v) in self.diagonal_rule.diagonal(&deltas).iter().enumerate() {
            h[(k, k)] = C64::new(v, 0.0);
        }
        for &(row, col, ch) in &self.rabi_channels {
            let omega = self.drives[ch].value_at(t);
            h[(row, col)] -= omega.conj();
            h[(col, row)] -= omega;
        }
        h
    }
}

/// The four-level diamond scheme of two exchange-coupled qubits driven by
/// four fields, on the basis (a_00, a_−, a_+, a_11).
///
/// Fails unless the detunings satisfy Δ1+Δ3 = Δ2+Δ4 over the window.
pub fn two_qubit_effective_scheme(
    _sys: &QubitSystem,
    drives: [Drive; 4],
    detunings: [DetuningProfile; 4],
    window: (f64, f64),
) -> Result<EffectiveScheme, ModelError> {
    check_detuning_constraint(&detunings, window)?;
    Ok(EffectiveScheme {
        basis_labels: vec!["00", "minus", "plus", "11"],
        rabi_channels: vec![(0, 1, 0), (0, 2, 1), (1, 3, 2), (2, 3, 3)],
        diagonal_rule: DiagonalRule::TwoQubitDiamond,
        drives: drives.to_vec(),
        detunings: detunings.to_vec(),
        warnings: Vec::new(),
    })
}

/// The four-level ladder scheme of three exchange-coupled qubits driven by
/// three fields, on the basis (a_000, a_W1, a_W2, a_111).
///
/// Valid in the strong-coupling regime: the 3λ gap separating the W states
/// from their shift-degenerate partners must dominate the drive. A warning
/// is recorded when 3λ < 10·max Ω.
pub fn three_qubit_effective_scheme(
    sys: &QubitSystem,
    drives: [Drive; 3],
    detunings: [DetuningProfile; 3],
) -> EffectiveScheme {
    let max_rabi = drives.iter().map(|d| d.shape.amplitude()).fold(0.0, f64::max);
    let mut warnings = Vec::new();
    if 3.0 * sys.lambda < 10.0 * max_rabi {
        warnings.push(format!(
            "strong-coupling condition marginal: 3λ = {:.3} < 10·max Ω = {:.3}; \
             the ladder reduction may leak into the shift-degenerate states",
            3.0 * sys.lambda,
            10.0 * max_rabi
        ));
    }
    EffectiveScheme {
        basis_labels: vec!["000", "w1", "w2", "111"],
        rabi_channels: vec![(0, 1, 0), (1, 2, 1), (2, 3, 2)],
        diagonal_rule: DiagonalRule::ThreeQubitLadder,
        drives: drives.to_vec(),
        detunings: detunings.to_vec(),
        warnings,
    }
}

fn check_detuning_constraint(
    detunings: &[DetuningProfile; 4],
    window: (f64, f64),
) -> Result<(), ModelError> {
    let residual = |t: f64| {
        detunings[0].value(t) + detunings[2].value(t)
            - detunings[1].value(t)
            - detunings[3].value(t)
    };
    let check_at = |t: f64| -> Result<(), ModelError> {
        let v = residual(t).abs();
        if v > DETUNING_CONSTRAINT_TOL {
            Err(ModelError::DetuningConstraintViolation {
                t,
                violation: v,
                tol: DETUNING_CONSTRAINT_TOL,
            })
        } else {
            Ok(())
        }
    };
    if detunings.iter().all(|d| d.is_constant()) {
        return check_at(window.0);
    }
    let (t0, t1) = window;
    for k in 0..CONSTRAINT_SAMPLES {
        let t = t0 + (t1 - t0) * k as f64 / (CONSTRAINT_SAMPLES - 1) as f64;
        check_at(t)?;
    }
    Ok(())
}

/// Effective Rabi frequencies of the two-qubit diamond from the field
/// envelopes ε₁..ε₄ and the dipole elements of the two qubits:
///
/// ```text
/// Ω1 = ε1 (d¹−d²)/√2,  Ω2 = ε2 (d¹+d²)/√2,
/// Ω3 = −ε3 (d¹−d²)/√2, Ω4 = ε4 (d¹+d²)/√2.
/// ```
pub fn effective_rabi_two_qubit(envelopes: [f64; 4], dipoles: [C64; 2]) -> [C64; 4] {
    let s = std::f64::consts::SQRT_2;
    let diff = (dipoles[0] - dipoles[1]) / s;
    let sum = (dipoles[0] + dipoles[1]) / s;
    [
        diff * envelopes[0],
        sum * envelopes[1],
        -diff * envelopes[2],
        sum * envelopes[3],
    ]
}

/// Effective Rabi frequencies of the three-qubit ladder:
/// (ε1 D/√3, 2 ε2 D/√3, ε3 D/√3) with D = d¹+d²+d³.
pub fn effective_rabi_three_qubit(envelopes: [f64; 3], dipoles: [C64; 3]) -> [C64; 3] {
    let d: C64 = dipoles.iter().sum();
    let s = 3.0_f64.sqrt();
    [
        d * envelopes[0] / s,
        d * 2.0 * envelopes[1] / s,
        d * envelopes[2] / s,
    ]
}
