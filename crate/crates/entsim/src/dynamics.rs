//! Amplitude-equation integration: i da/dt = H(t) a.
//!
//! The stepper is a classic fourth-order Runge–Kutta with step-doubling
//! error control and local extrapolation; dense output on the requested
//! sample grid comes from cubic Hermite interpolation between accepted
//! steps. Norm drift is reported, never repaired: it is the primary
//! diagnostic of stepper quality.
//!
//! Closed-form solutions for the resonant two-level system and for the
//! constant-amplitude four-level diamond serve as independent oracles.

use crate::{C64, CMatrix, CVector};
use thiserror::Error;

/// Local error tolerance per unit time (default).
pub const DEFAULT_TOL_PER_UNIT_TIME: f64 = 1e-10;

/// Default number of output samples.
pub const DEFAULT_SAMPLES: usize = 1000;

/// Tolerance on the initial-state norm.
pub const NORM_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum DynamicsError {
    #[error("state vector norm {norm} deviates from 1 by more than {tol}")]
    NotNormalized { norm: f64, tol: f64 },
    #[error("state dimension {state} does not match Hamiltonian dimension {matrix}")]
    DimensionMismatch { state: usize, matrix: usize },
    #[error(
        "step size underflow at t = {t:.6e}: error control wants dt < {dt:.3e} (floor {floor:.3e})"
    )]
    StepFailure { t: f64, dt: f64, floor: f64 },
    #[error("integration requires t0 ≠ t1")]
    EmptyInterval,
}

/// Complex amplitudes over a named basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub amplitudes: CVector,
    pub labels: Vec<String>,
}

impl StateVector {
    /// A normalized state; rejects vectors with ‖a‖ off unity by more
    /// than [`NORM_TOL`].
    pub fn new(amplitudes: CVector, labels: Vec<String>) -> Result<Self, DynamicsError> {
        assert_eq!(amplitudes.len(), labels.len(), "one label per amplitude");
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(DynamicsError::NotNormalized { norm, tol: NORM_TOL });
        }
        Ok(Self { amplitudes, labels })
    }

    /// Basis state `index` of the space spanned by `labels`.
    pub fn basis_state(index: usize, labels: &[&str]) -> Self {
        let mut amplitudes = CVector::zeros(labels.len());
        amplitudes[index] = C64::new(1.0, 0.0);
        Self { amplitudes, labels: labels.iter().map(|s| s.to_string()).collect() }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    /// |a_k|² for every basis state.
    pub fn populations(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }
}

/// Time series of a single integration: sampled amplitudes, populations,
/// norm error, and (once a protocol fills it in) the logarithmic
/// negativity.
#[derive(Debug, Clone)]
pub struct TrajectoryRecord {
    pub times: Vec<f64>,
    pub labels: Vec<String>,
    /// State at each sample time.
    pub amplitudes: Vec<CVector>,
    /// Row per sample, column per basis state.
    pub populations: Vec<Vec<f64>>,
    /// Logarithmic negativity per sample; empty until a protocol computes it.
    pub negativity: Vec<f64>,
    /// |‖a(t)‖ − 1| per sample.
    pub norm_error: Vec<f64>,
    pub warnings: Vec<String>,
}

impl TrajectoryRecord {
    pub fn final_state(&self) -> &CVector {
        self.amplitudes.last().expect("trajectory has at least one sample")
    }

    pub fn max_norm_error(&self) -> f64 {
        self.norm_error.iter().copied().fold(0.0, f64::max)
    }

    /// Population of basis state `k` at the final sample.
    pub fn final_population(&self, k: usize) -> f64 {
        self.populations.last().unwrap()[k]
    }

    /// Largest population of basis state `k` over the whole record.
    pub fn max_population(&self, k: usize) -> f64 {
        self.populations.iter().map(|row| row[k]).fold(0.0, f64::max)
    }
}

/// Integration controls. `dt_max` caps the internal step; lab-frame runs
/// use it to resolve the carrier.
#[derive(Debug, Clone, Copy)]
pub struct IntegrationOptions {
    pub tol_per_unit_time: f64,
    pub samples: usize,
    pub dt_max: Option<f64>,
}

impl Default for IntegrationOptions {
    fn default() -> Self {
        Self {
            tol_per_unit_time: DEFAULT_TOL_PER_UNIT_TIME,
            samples: DEFAULT_SAMPLES,
            dt_max: None,
        }
    }
}

/// Integrate i da/dt = H(t) a from `t0` to `t1` (either direction),
/// sampling the solution on a uniform grid. `dt_hint` seeds the adaptive
/// step size and caps it.
pub fn integrate<H>(
    hamiltonian: H,
    a0: &StateVector,
    t0: f64,
    t1: f64,
    dt_hint: f64,
) -> Result<TrajectoryRecord, DynamicsError>
where
    H: Fn(f64) -> CMatrix,
{
    integrate_with(hamiltonian, a0, t0, t1, dt_hint, &IntegrationOptions::default())
}

pub fn integrate_with<H>(
    hamiltonian: H,
    a0: &StateVector,
    t0: f64,
    t1: f64,
    dt_hint: f64,
    opts: &IntegrationOptions,
) -> Result<TrajectoryRecord, DynamicsError>
where
    H: Fn(f64) -> CMatrix,
{
    if t0 == t1 {
        return Err(DynamicsError::EmptyInterval);
    }
    let norm = a0.amplitudes.norm();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(DynamicsError::NotNormalized { norm, tol: NORM_TOL });
    }
    let h_probe = hamiltonian(t0);
    if h_probe.nrows() != a0.dim() {
        return Err(DynamicsError::DimensionMismatch {
            state: a0.dim(),
            matrix: h_probe.nrows(),
        });
    }

    let deriv = |t: f64, y: &CVector| -> CVector {
        hamiltonian(t) * y * C64::new(0.0, -1.0)
    };

    let span = t1 - t0;
    let direction = span.signum();
    let samples = opts.samples.max(2);
    let times: Vec<f64> = (0..samples)
        .map(|k| t0 + span * k as f64 / (samples - 1) as f64)
        .collect();

    let dt_floor = span.abs() * 1e-12;
    let dt_cap = opts.dt_max.unwrap_or(f64::INFINITY).min(dt_hint.abs()).max(dt_floor);

    let mut t = t0;
    let mut y = a0.amplitudes.clone();
    let mut f = deriv(t, &y);
    let mut dt = dt_cap;

    let mut sampled: Vec<CVector> = Vec::with_capacity(samples);
    sampled.push(y.clone());
    let mut next_sample = 1;

    while next_sample < samples {
        let remaining = (t1 - t).abs();
        if dt > remaining {
            dt = remaining;
        }
        let h_signed = direction * dt;

        // one full step vs two half steps
        let y_big = rk4_step(&deriv, t, &y, &f, h_signed);
        let y_mid = rk4_step(&deriv, t, &y, &f, 0.5 * h_signed);
        let f_mid = deriv(t + 0.5 * h_signed, &y_mid);
        let y_two = rk4_step(&deriv, t + 0.5 * h_signed, &y_mid, &f_mid, 0.5 * h_signed);

        let err = (&y_two - &y_big).norm() / 15.0;
        let tol_step = opts.tol_per_unit_time * dt + 1e-16;

        if err <= tol_step {
            // local extrapolation to fifth order
            let y_new = &y_two + (&y_two - &y_big) / C64::new(15.0, 0.0);
            let t_new = if remaining == dt { t1 } else { t + h_signed };
            let f_new = deriv(t_new, &y_new);

            while next_sample < samples {
                let ts = times[next_sample];
                let inside = if direction > 0.0 { ts <= t_new } else { ts >= t_new };
                if !inside {
                    break;
                }
                sampled.push(hermite5(
                    t, &y, &f, &y_mid, &f_mid, t_new, &y_new, &f_new, ts,
                ));
                next_sample += 1;
            }

            t = t_new;
            y = y_new;
            f = f_new;

            let grow = 0.9 * (tol_step / err.max(1e-300)).powf(0.2);
            dt = (dt * grow.clamp(0.2, 5.0)).min(dt_cap);
            if t == t1 {
                break;
            }
        } else {
            let shrink = 0.9 * (tol_step / err).powf(0.2);
            dt *= shrink.clamp(0.1, 0.9);
            if dt < dt_floor {
                return Err(DynamicsError::StepFailure { t, dt, floor: dt_floor });
            }
        }
    }
    // the endpoint sample was interpolated; replace it with the directly
    // integrated value
    if sampled.len() == samples {
        sampled[samples - 1] = y.clone();
    } else {
        sampled.push(y.clone());
    }

    let populations: Vec<Vec<f64>> =
        sampled.iter().map(|v| v.iter().map(|a| a.norm_sqr()).collect()).collect();
    let norm_error: Vec<f64> = sampled.iter().map(|v| (v.norm() - 1.0).abs()).collect();

    Ok(TrajectoryRecord {
        times,
        labels: a0.labels.clone(),
        amplitudes: sampled,
        populations,
        negativity: Vec::new(),
        norm_error,
        warnings: Vec::new(),
    })
}

fn rk4_step<F>(deriv: &F, t: f64, y: &CVector, k1: &CVector, h: f64) -> CVector
where
    F: Fn(f64, &CVector) -> CVector,
{
    let ch = C64::new(h, 0.0);
    let half = C64::new(0.5 * h, 0.0);
    let k2 = deriv(t + 0.5 * h, &(y + k1 * half));
    let k3 = deriv(t + 0.5 * h, &(y + &k2 * half));
    let k4 = deriv(t + h, &(y + &k3 * ch));
    y + (k1 + (k2 + k3) * C64::new(2.0, 0.0) + k4) * C64::new(h / 6.0, 0.0)
}

/// Quintic Hermite interpolation of the state between two accepted steps,
/// using the value/derivative pairs at both ends and at the midpoint that
/// the step-doubling already produced.
#[allow(clippy::too_many_arguments)]
fn hermite5(
    ta: f64,
    ya: &CVector,
    fa: &CVector,
    ym: &CVector,
    fm: &CVector,
    tb: f64,
    yb: &CVector,
    fb: &CVector,
    ts: f64,
) -> CVector {
    let h = tb - ta;
    let s = (ts - ta) / h;
    // quintic basis with double nodes at s = 0, 1/2, 1
    let a = s * s * (s * (s * (24.0 * s - 68.0) + 66.0) - 23.0) + 1.0;
    let b = s * (s * (s * (s * (4.0 * s - 12.0) + 13.0) - 6.0) + 1.0);
    let c = s * s * (s * (16.0 * s - 32.0) + 16.0);
    let d = s * s * (s * (s * (16.0 * s - 40.0) + 32.0) - 8.0);
    let e = s * s * (s * (s * (52.0 - 24.0 * s) - 34.0) + 7.0);
    let f = s * s * (s * (s * (4.0 * s - 8.0) + 5.0) - 1.0);
    ya * C64::new(a, 0.0)
        + fa * C64::new(b * h, 0.0)
        + ym * C64::new(c, 0.0)
        + fm * C64::new(d * h, 0.0)
        + yb * C64::new(e, 0.0)
        + fb * C64::new(f * h, 0.0)
}

/// Exact propagation of the detuned two-level block
///
/// ```text
/// H = [ 0    −Ω0 ]
///     [ −Ω0   Δ  ]
/// ```
///
/// for constant Ω0 and Δ. After removing the mean diagonal, the precession
/// rate is the generalized Rabi frequency √(Ω0² + (Δ/2)²).
pub fn analytic_two_level(omega0: f64, delta: f64, t: f64, a0: [C64; 2]) -> [C64; 2] {
    let half = 0.5 * delta;
    let rabi = (omega0 * omega0 + half * half).sqrt();
    let phase = C64::from_polar(1.0, -half * t);
    if rabi == 0.0 {
        return [a0[0] * phase, a0[1] * phase];
    }
    let (cos, sinc) = ((rabi * t).cos(), (rabi * t).sin() / rabi);
    // traceless part M = [[−Δ/2, −Ω0], [−Ω0, Δ/2]]
    let m = [
        [C64::new(-half, 0.0), C64::new(-omega0, 0.0)],
        [C64::new(-omega0, 0.0), C64::new(half, 0.0)],
    ];
    let i = C64::new(0.0, 1.0);
    let mut out = [C64::new(0.0, 0.0); 2];
    for (r, row) in m.iter().enumerate() {
        let mv = row[0] * a0[0] + row[1] * a0[1];
        out[r] = phase * (a0[r] * cos - i * mv * sinc);
    }
    out
}

/// Closed-form amplitudes of the constant-amplitude diamond scheme with
/// Ω1 = Ω2 = `omega10`, Ω3 = Ω4 = `omega30`, all detunings zero, and the
/// system starting in |ψ00⟩. Basis order (a_00, a_−, a_+, a_11).
pub fn analytic_constant_amplitude(omega10: f64, omega30: f64, t: f64) -> [C64; 4] {
    let r2 = omega10 * omega10 + omega30 * omega30;
    if r2 == 0.0 {
        return [
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
        ];
    }
    let rate = (2.0 * r2).sqrt();
    let cos = (rate * t).cos();
    let sin = (rate * t).sin();
    let a00 = C64::new((cos * omega10 * omega10 + omega30 * omega30) / r2, 0.0);
    let pair = C64::new(0.0, sin * omega10 / rate);
    let a11 = C64::new(omega10 * omega30 * (cos - 1.0) / r2, 0.0);
    [a00, pair, pair, a11]
}
