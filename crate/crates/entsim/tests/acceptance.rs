//! Acceptance suite: every release-gating requirement, one test per
//! criterion, each ending in a printed PASS line (visible with
//! `cargo test --test acceptance -- --nocapture`).

use entsim::dynamics::{analytic_constant_amplitude, StateVector};
use entsim::entanglement::{
    amplitudes_to_product_basis, log_negativity, partial_trace, DensityMatrix, TargetState,
};
use entsim::model::{build_bare_hamiltonian, QubitSystem};
use entsim::protocols::{
    build_protocol, constant_amplitude_negativity, run_ghz_fstirap_all_on,
    run_ghz_fstirap_plus_pi, run_jitter_study, run_negativity_scan, run_protocol,
    run_rwa_validation, run_w_protocols, scheme_for, Overrides, ProtocolName,
};
use entsim::spectrum::{diagonalize_bare, w_state_energies};
use entsim::{C64, CVector};
use std::f64::consts::PI;
use std::time::Instant;

fn sys(n: usize, lambda: f64, omega0: f64) -> QubitSystem {
    QubitSystem::new(n, lambda, omega0, vec![C64::new(1.0, 0.0); n]).unwrap()
}

fn assert_close(got: f64, want: f64, tol: f64, what: &str) {
    assert!(
        (got - want).abs() <= tol,
        "{what}: got {got}, want {want} ± {tol}"
    );
}

/// Criterion 1: exact eigenstructure of the bare system.
#[test]
fn criterion_1_eigenstructure() {
    let start = Instant::now();
    for &lambda in &[0.5, 1.0, 2.0] {
        for &omega0 in &[0.5, 1.0, 2.0] {
            // two qubits: −ω0, −λ, +λ, +ω0 after sorting
            let es = diagonalize_bare(&sys(2, lambda, omega0)).unwrap();
            let mut want = vec![-omega0, -lambda, lambda, omega0];
            want.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for (got, w) in es.eigenvalues.iter().zip(want) {
                assert_close(*got, w, 1e-12, "two-qubit eigenvalue");
            }
            // three qubits: the eight closed-form energies
            let es = diagonalize_bare(&sys(3, lambda, omega0)).unwrap();
            let mut want = vec![
                -1.5 * omega0,
                2.0 * lambda - 0.5 * omega0,
                -lambda - 0.5 * omega0,
                -lambda - 0.5 * omega0,
                2.0 * lambda + 0.5 * omega0,
                -lambda + 0.5 * omega0,
                -lambda + 0.5 * omega0,
                1.5 * omega0,
            ];
            want.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for (got, w) in es.eigenvalues.iter().zip(want) {
                assert_close(*got, w, 1e-12, "three-qubit eigenvalue");
            }
        }
    }
    // N-qubit symmetric single-excitation energies against diagonalization
    for n in 2..=8 {
        let (lambda, omega0) = (1.3, 0.9);
        let es = diagonalize_bare(&sys(n, lambda, omega0)).unwrap();
        let (e1, e2, gap) = w_state_energies(n, lambda, omega0);
        let sector: Vec<f64> = es
            .eigenvalues
            .iter()
            .zip(&es.labels)
            .filter(|(_, l)| l.excitation == 1)
            .map(|(e, _)| *e)
            .collect();
        let top = sector.iter().cloned().fold(f64::MIN, f64::max);
        assert_close(top, e1, 1e-12, "lower W energy");
        for e in sector.iter().filter(|e| (*e - top).abs() > 1e-9) {
            assert_close(top - e, gap, 1e-12, "gap to shift-degenerate states");
        }
        let mirrored: Vec<f64> = es
            .eigenvalues
            .iter()
            .zip(&es.labels)
            .filter(|(_, l)| l.excitation == n - 1)
            .map(|(e, _)| *e)
            .collect();
        let top = mirrored.iter().cloned().fold(f64::MIN, f64::max);
        assert_close(top, e2, 1e-12, "upper W energy");
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "criterion 1 took {elapsed:?}");
    println!("criterion 1 (eigenstructure): PASS in {elapsed:?}");
}

/// Criterion 2: resonant area-π/2 transfer into each pair Bell state.
#[test]
fn criterion_2_bell_pi_half_transfer() {
    let start = Instant::now();
    for (name, what) in [
        (ProtocolName::BellSingletPiHalf, "singlet"),
        (ProtocolName::BellTripletPiHalf, "triplet"),
    ] {
        let result =
            run_protocol(&build_protocol(name, &Overrides::empty()).unwrap(), 400).unwrap();
        assert!(
            result.final_fidelity >= 0.999,
            "{what} fidelity {}",
            result.final_fidelity
        );
        assert!(
            result.final_negativity >= 0.999,
            "{what} negativity {}",
            result.final_negativity
        );
        assert!(result.passed);
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "criterion 2 took {elapsed:?}");
    println!("criterion 2 (Bell π/2 transfer): PASS in {elapsed:?}");
}

/// Criterion 3: fractional-passage Bell superposition with the preset's
/// reference pulse parameters.
#[test]
fn criterion_3_fractional_stirap_superposition() {
    let start = Instant::now();
    let result = run_protocol(
        &build_protocol(ProtocolName::PhiMinusFStirap, &Overrides::empty()).unwrap(),
        1000,
    )
    .unwrap();
    let end = result.trajectory.populations.last().unwrap();
    assert_close(end[0], 0.5, 0.02, "P00 endpoint");
    assert_close(end[3], 0.5, 0.02, "P11 endpoint");
    assert!(end[1] < 0.02 && end[2] < 0.02, "pair-state residuals {end:?}");
    assert!(
        result.final_negativity >= 0.98,
        "negativity {}",
        result.final_negativity
    );
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "criterion 3 took {elapsed:?}");
    println!("criterion 3 (fractional-passage superposition): PASS in {elapsed:?}");
}

/// Criterion 4: constant-amplitude run at the matched ratio 1−√2 lands on
/// the (|00⟩+|11⟩)/√2 superposition and tracks the closed form pointwise.
#[test]
fn criterion_4_pulse_area_superposition() {
    let start = Instant::now();
    let ratio = 1.0 - 2.0_f64.sqrt();
    let spec = build_protocol(ProtocolName::PhiPulseArea, &Overrides::empty()).unwrap();
    let result = run_protocol(&spec, 800).unwrap();
    assert!(
        result.final_fidelity >= 0.999,
        "fidelity {}",
        result.final_fidelity
    );
    // pointwise agreement with the closed-form amplitudes
    let traj = &result.trajectory;
    for (k, t) in traj.times.iter().enumerate() {
        let want = analytic_constant_amplitude(ratio, 1.0, *t);
        for (c, w) in want.iter().enumerate() {
            assert!(
                (traj.populations[k][c] - w.norm_sqr()).abs() < 1e-8,
                "population {c} at t = {t}"
            );
        }
    }
    // periodic revival after a full oscillation
    let rate = (2.0 * (1.0 + ratio * ratio)).sqrt();
    let scan = run_negativity_scan(&[ratio], 2.0 * PI / rate, 801).unwrap();
    let back = scan[0].populations.last().unwrap();
    assert_close(back[0], 1.0, 1e-8, "revival of the ground population");
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 2.0, "criterion 4 took {elapsed:?}");
    println!("criterion 4 (pulse-area superposition): PASS in {elapsed:?}");
}

/// Criterion 5: negativity traces for unmatched amplitude ratios follow
/// the closed form and stay below maximal entanglement.
#[test]
fn criterion_5_negativity_scan() {
    let start = Instant::now();
    let ratios = [2.0, 1.0, 0.5];
    let trajs = run_negativity_scan(&ratios, 4.0, 400).unwrap();
    for (traj, ratio) in trajs.iter().zip(ratios) {
        let mut peak: f64 = 0.0;
        for (k, t) in traj.times.iter().enumerate() {
            let want = constant_amplitude_negativity(ratio, 1.0, *t);
            assert!(
                (traj.negativity[k] - want).abs() < 1e-6,
                "ratio {ratio} at t = {t}: Ne {} vs closed form {want}",
                traj.negativity[k]
            );
            peak = peak.max(traj.negativity[k]);
        }
        assert!(peak < 1.0, "ratio {ratio} reached Ne = {peak}");
    }
    let elapsed = start.elapsed();
    println!("criterion 5 (negativity scan vs closed form): PASS in {elapsed:?}");
}

/// Criterion 6: W-state generation by π/2 area and by counterintuitive
/// adiabatic passage.
#[test]
fn criterion_6_w_state_generation() {
    let start = Instant::now();
    let (w1, w2) = run_w_protocols().unwrap();
    assert!(w1.final_fidelity >= 0.999, "W1 fidelity {}", w1.final_fidelity);
    assert!(w2.final_fidelity >= 0.99, "W2 fidelity {}", w2.final_fidelity);
    let elapsed = start.elapsed();
    println!("criterion 6 (W-state generation): PASS in {elapsed:?}");
}

/// Criterion 7: GHZ preparation endpoints for both pulse arrangements.
#[test]
fn criterion_7_ghz_preparation() {
    let runners: [(ProtocolName, fn() -> _); 2] = [
        (ProtocolName::GhzFStirapPlusPi, run_ghz_fstirap_plus_pi),
        (ProtocolName::GhzFStirapAllOn, run_ghz_fstirap_all_on),
    ];
    for (name, runner) in runners {
        let start = Instant::now();
        let result = runner().unwrap();
        let end = result.trajectory.populations.last().unwrap();
        assert_close(end[0], 0.5, 0.03, "P000 endpoint");
        assert_close(end[3], 0.5, 0.03, "P111 endpoint");
        assert!(end[1] < 0.02 && end[2] < 0.02, "W residuals {end:?}");
        assert!(
            result.final_fidelity >= 0.98,
            "{name}: phase-optimized GHZ fidelity {}",
            result.final_fidelity
        );
        let elapsed = start.elapsed();
        assert!(elapsed.as_secs_f64() < 10.0, "{name} took {elapsed:?}");
        println!("criterion 7 ({name}): PASS in {elapsed:?}");
    }
}

/// Criterion 8: the cross-cutting property suite.
#[test]
fn criterion_8_property_suite() {
    let start = Instant::now();

    // norm conservation on every preset that runs an effective scheme
    for name in [
        ProtocolName::BellSingletPiHalf,
        ProtocolName::BellTripletPiHalf,
        ProtocolName::BellRap,
        ProtocolName::PhiMinusFStirap,
        ProtocolName::PhiPlusFStirap,
        ProtocolName::PhiPulseArea,
        ProtocolName::NegativityScan,
        ProtocolName::W1PiHalf,
        ProtocolName::W2Stirap,
        ProtocolName::GhzFStirapPlusPi,
        ProtocolName::GhzFStirapAllOn,
    ] {
        let result =
            run_protocol(&build_protocol(name, &Overrides::empty()).unwrap(), 300).unwrap();
        assert!(
            result.trajectory.max_norm_error() <= 1e-8,
            "{name}: norm error {}",
            result.trajectory.max_norm_error()
        );
        let sums: Vec<f64> = result
            .trajectory
            .populations
            .iter()
            .map(|row| row.iter().sum())
            .collect();
        for s in sums {
            assert!((s - 1.0).abs() < 1e-7, "{name}: population sum {s}");
        }
    }

    // Hermiticity of every scheme and the lab-frame builder at 100 times
    let spec = build_protocol(ProtocolName::PhiMinusFStirap, &Overrides::empty()).unwrap();
    let scheme = scheme_for(&spec).unwrap();
    for k in 0..100 {
        let t = spec.sequence.t_start
            + (spec.sequence.t_end - spec.sequence.t_start)
                * ((k as f64 * 0.618_033_988_749_895) % 1.0);
        let h = scheme.hamiltonian_at(t);
        assert!((h.clone() - h.adjoint()).norm() <= 1e-12);
    }

    // local-unitary invariance of the negativity on 100 random draws
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..100 {
        let mut psi = CVector::from_iterator(
            4,
            (0..4).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))),
        );
        psi /= C64::new(psi.norm(), 0.0);
        let ne = log_negativity(&DensityMatrix::from_pure(&psi).unwrap(), &[0]).unwrap();
        let (a, b, c) = (
            rng.gen_range(0.0..std::f64::consts::TAU),
            rng.gen_range(0.0..PI),
            rng.gen_range(0.0..std::f64::consts::TAU),
        );
        let (cb, sb) = ((b / 2.0).cos(), (b / 2.0).sin());
        let u1 = nalgebra::DMatrix::from_row_slice(
            2,
            2,
            &[
                C64::from_polar(cb, a),
                C64::from_polar(sb, c),
                C64::from_polar(-sb, -c),
                C64::from_polar(cb, -a),
            ],
        );
        let u2 = u1.map(|z| z.conj());
        let rotated = u1.kronecker(&u2) * &psi;
        let ne2 = log_negativity(&DensityMatrix::from_pure(&rotated).unwrap(), &[0]).unwrap();
        assert!((ne - ne2).abs() <= 1e-9, "Ne not invariant: {ne} vs {ne2}");
    }

    // dark-state trapping of the shared single excitation
    {
        use entsim::model::two_qubit_effective_scheme;
        use entsim::pulses::{DetuningProfile, Drive, PulseShape};
        let system = sys(2, 50.0, 100.0);
        let g1 = Drive::new(PulseShape::gaussian(4.0, 0.0, 1.0));
        let g3 = Drive::new(PulseShape::gaussian(3.0, 2.0, 1.0));
        let delta = DetuningProfile::constant(0.7);
        let scheme = two_qubit_effective_scheme(
            &system,
            [g1, g1, g3, g3],
            [delta; 4],
            (-8.0, 10.0),
        )
        .unwrap();
        let inv = 1.0 / 2.0_f64.sqrt();
        let mut amplitudes = CVector::zeros(4);
        amplitudes[1] = C64::new(-inv, 0.0);
        amplitudes[2] = C64::new(inv, 0.0);
        let a0 = StateVector::new(
            amplitudes.clone(),
            scheme.basis_labels().iter().map(|s| s.to_string()).collect(),
        )
        .unwrap();
        let traj =
            entsim::dynamics::integrate(|t| scheme.hamiltonian_at(t), &a0, -8.0, 10.0, 0.01)
                .unwrap();
        for v in &traj.amplitudes {
            assert!(
                amplitudes.dotc(v).norm_sqr() >= 1.0 - 1e-6,
                "trapped population dropped"
            );
        }
    }

    // identical dipoles leave the pair singlet completely dark
    {
        let mut spec =
            build_protocol(ProtocolName::BellTripletPiHalf, &Overrides::empty()).unwrap();
        spec.system = sys(2, 50.0, 100.0);
        let result = run_protocol(&spec, 300).unwrap();
        for row in &result.trajectory.populations {
            assert!(row[1] <= 1e-9, "singlet population {}", row[1]);
        }
    }

    // three-qubit trajectories: the reduced two-qubit negativity does not
    // depend on which qubit is traced out
    {
        let spec = build_protocol(ProtocolName::GhzFStirapAllOn, &Overrides::empty()).unwrap();
        let scheme = scheme_for(&spec).unwrap();
        let result = run_protocol(&spec, 60).unwrap();
        for amplitudes in result.trajectory.amplitudes.iter().step_by(6) {
            let state = StateVector {
                amplitudes: amplitudes.clone(),
                labels: result.trajectory.labels.clone(),
            };
            let mut product = amplitudes_to_product_basis(&state, &scheme).unwrap();
            product /= C64::new(product.norm(), 0.0);
            let rho = DensityMatrix::from_pure(&product).unwrap();
            let values: Vec<f64> = (0..3)
                .map(|traced| {
                    let keep: Vec<usize> = (0..3).filter(|&q| q != traced).collect();
                    let reduced = partial_trace(&rho, &keep).unwrap();
                    log_negativity(&reduced, &[0]).unwrap()
                })
                .collect();
            for v in &values[1..] {
                assert!(
                    (v - values[0]).abs() <= 1e-9,
                    "traced-qubit asymmetry: {values:?}"
                );
            }
        }
    }

    let elapsed = start.elapsed();
    println!("criterion 8 (property suite): PASS in {elapsed:?}");
}

/// Criterion 9: the effective scheme agrees with the full lab-frame model
/// in the strong-coupling regime and degrades once the pair splitting
/// shrinks toward the Rabi scale.
#[test]
fn criterion_9_rwa_validation() {
    let start = Instant::now();
    let strong = run_rwa_validation(&Overrides::empty()).unwrap();
    assert!(
        strong.max_deviation <= 0.01,
        "strong-coupling deviation {}",
        strong.max_deviation
    );
    let weak = run_rwa_validation(&Overrides::one("lambda_over_omega0", 0.05)).unwrap();
    assert!(
        weak.max_deviation >= 3.0 * strong.max_deviation,
        "weak-coupling deviation {} not ≥ 3× {}",
        weak.max_deviation,
        strong.max_deviation
    );
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "criterion 9 took {elapsed:?}");
    println!(
        "criterion 9 (lab-frame validation): PASS in {elapsed:?} \
         (strong {:.2e}, weak {:.2e})",
        strong.max_deviation, weak.max_deviation
    );
}

/// Criterion 10: adiabatic passage stays robust under ±20% parameter
/// jitter while the area method does not.
#[test]
fn criterion_10_rap_robustness() {
    let start = Instant::now();
    let study = run_jitter_study(42, 10).unwrap();
    assert!(
        study.rap_min_fidelity >= 0.99,
        "RAP fidelity under jitter {}",
        study.rap_min_fidelity
    );
    assert!(
        study.area_min_fidelity < 0.95,
        "area method too robust: {}",
        study.area_min_fidelity
    );
    let elapsed = start.elapsed();
    println!(
        "criterion 10 (passage robustness): PASS in {elapsed:?} \
         (RAP ≥ {:.4}, area dips to {:.4})",
        study.rap_min_fidelity, study.area_min_fidelity
    );
}

/// The bare builder itself is exercised by most criteria; pin the exchange
/// sign convention once more at the acceptance level.
#[test]
fn bare_hamiltonian_pair_energies() {
    let h = build_bare_hamiltonian(&sys(2, 0.5, 1.0));
    let inv = 1.0 / 2.0_f64.sqrt();
    for (sign, energy) in [(1.0, 0.5), (-1.0, -0.5)] {
        let v = CVector::from_vec(vec![
            C64::new(0.0, 0.0),
            C64::new(sign * inv, 0.0),
            C64::new(inv, 0.0),
            C64::new(0.0, 0.0),
        ]);
        let hv = &h * &v;
        assert!((hv - v * C64::new(energy, 0.0)).norm() < 1e-14);
    }
    // and the canonical targets are eigenvectors
    let es = diagonalize_bare(&sys(2, 0.5, 1.0)).unwrap();
    for (target, energy) in [(TargetState::PsiMinus, -0.5), (TargetState::PsiPlus, 0.5)] {
        let k = es.closest_to(&target.vector());
        assert!((es.eigenvalues[k] - energy).abs() < 1e-12);
    }
}
