//! Pulse envelopes, detuning profiles, and pulse-area utilities.
//!
//! Envelopes are real and non-negative; a [`Drive`] attaches a constant
//! phase factor so that relative phase shifts between channels (e.g. the
//! π shift that selects one Bell state over another) are expressible.

use crate::C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Absolute tolerance for the adaptive-Simpson pulse-area quadrature.
pub const AREA_QUADRATURE_TOL: f64 = 1e-10;

#[derive(Debug, Error, PartialEq)]
pub enum PulseError {
    /// The mixing angle tan θ = Ω₃/Ω₁ is undefined when both vanish.
    #[error("mixing angle undefined: both Rabi frequencies are zero")]
    BothZero,
    /// A channel index was bound more than once in a sequence.
    #[error("channel {0} bound more than once in pulse sequence")]
    DuplicateChannel(usize),
    /// The sequence window is empty or reversed.
    #[error("invalid time window: t_start = {t_start} must precede t_end = {t_end}")]
    InvalidWindow { t_start: f64, t_end: f64 },
}

/// A non-negative pulse envelope Ω(t), bounded by its peak amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PulseShape {
    /// Constant envelope.
    Constant { amplitude: f64 },
    /// `amplitude · exp(−(t − center)² / width²)`.
    ///
    /// Note the convention: no factor 2 in the exponent denominator.
    Gaussian { amplitude: f64, center: f64, width: f64 },
    /// Gaussian rise centered at `rise_center`, a flat hold at `amplitude`
    /// up to `fall_center`, then a Gaussian fall; both edges share
    /// `edge_width`. Continuous at both joints by construction.
    FlatTopGaussian {
        amplitude: f64,
        rise_center: f64,
        fall_center: f64,
        edge_width: f64,
    },
}

impl PulseShape {
    pub fn constant(amplitude: f64) -> Self {
        assert!(amplitude >= 0.0, "amplitude must be non-negative");
        Self::Constant { amplitude }
    }

    pub fn gaussian(amplitude: f64, center: f64, width: f64) -> Self {
        assert!(amplitude >= 0.0, "amplitude must be non-negative");
        assert!(width > 0.0, "width must be positive");
        Self::Gaussian { amplitude, center, width }
    }

    pub fn flat_top(amplitude: f64, rise_center: f64, fall_center: f64, edge_width: f64) -> Self {
        assert!(amplitude >= 0.0, "amplitude must be non-negative");
        assert!(edge_width > 0.0, "edge width must be positive");
        assert!(rise_center <= fall_center, "rise_center must not exceed fall_center");
        Self::FlatTopGaussian { amplitude, rise_center, fall_center, edge_width }
    }

    /// Envelope value at time `t`.
    pub fn evaluate(&self, t: f64) -> f64 {
        match *self {
            Self::Constant { amplitude } => amplitude,
            Self::Gaussian { amplitude, center, width } => {
                let u = (t - center) / width;
                amplitude * (-u * u).exp()
            }
            Self::FlatTopGaussian { amplitude, rise_center, fall_center, edge_width } => {
                if t < rise_center {
                    let u = (t - rise_center) / edge_width;
                    amplitude * (-u * u).exp()
                } else if t <= fall_center {
                    amplitude
                } else {
                    let u = (t - fall_center) / edge_width;
                    amplitude * (-u * u).exp()
                }
            }
        }
    }

    /// Peak amplitude Ω_m.
    pub fn amplitude(&self) -> f64 {
        match *self {
            Self::Constant { amplitude }
            | Self::Gaussian { amplitude, .. }
            | Self::FlatTopGaussian { amplitude, .. } => amplitude,
        }
    }

    /// Interior points where the piecewise definition changes.
    fn breakpoints(&self) -> Vec<f64> {
        match *self {
            Self::FlatTopGaussian { rise_center, fall_center, .. } => {
                vec![rise_center, fall_center]
            }
            _ => Vec::new(),
        }
    }

    /// Time span outside which the envelope is negligible, taken as
    /// `margin` widths beyond the shape's centers. `None` for constants.
    pub fn support(&self, margin: f64) -> Option<(f64, f64)> {
        match *self {
            Self::Constant { .. } => None,
            Self::Gaussian { center, width, .. } => {
                Some((center - margin * width, center + margin * width))
            }
            Self::FlatTopGaussian { rise_center, fall_center, edge_width, .. } => {
                Some((rise_center - margin * edge_width, fall_center + margin * edge_width))
            }
        }
    }
}

/// Time integral ∫Ω(t)dt over [t0, t1] by adaptive Simpson quadrature.
pub fn pulse_area(shape: &PulseShape, t0: f64, t1: f64) -> f64 {
    assert!(t0 < t1, "pulse_area requires t0 < t1");
    // Split at interior joints so the quadrature only sees smooth pieces.
    let mut edges = vec![t0];
    for b in shape.breakpoints() {
        if b > t0 && b < t1 {
            edges.push(b);
        }
    }
    edges.push(t1);
    let span = t1 - t0;
    edges
        .windows(2)
        .map(|w| {
            let tol = AREA_QUADRATURE_TOL * (w[1] - w[0]) / span;
            adaptive_simpson(&|t| shape.evaluate(t), w[0], w[1], tol)
        })
        .sum()
}

fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
    h / 6.0 * (fa + 4.0 * fm + fb)
}

fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson(fa, fm, fb, b - a);
    simpson_rec(f, a, m, b, fa, fm, fb, whole, tol, 48)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec(
    f: &impl Fn(f64) -> f64,
    a: f64,
    m: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(fa, flm, fm, m - a);
    let right = simpson(fm, frm, fb, b - m);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        simpson_rec(f, a, lm, m, fa, flm, fm, left, tol * 0.5, depth - 1)
            + simpson_rec(f, m, rm, b, fm, frm, fb, right, tol * 0.5, depth - 1)
    }
}

/// Mixing angle θ = atan2(Ω₃, Ω₁) of the two-photon dark state
/// sin θ |00⟩ − cos θ |11⟩.
pub fn mixing_angle(omega1: f64, omega3: f64) -> Result<f64, PulseError> {
    if omega1 == 0.0 && omega3 == 0.0 {
        return Err(PulseError::BothZero);
    }
    Ok(omega3.atan2(omega1))
}

/// Time-dependent detuning Δ(t) of one laser channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DetuningProfile {
    Constant { value: f64 },
    /// Δ(t) = slope · (t − center); the sweep of rapid adiabatic passage.
    LinearChirp { slope: f64, center: f64 },
}

impl DetuningProfile {
    pub fn constant(value: f64) -> Self {
        Self::Constant { value }
    }

    pub fn linear_chirp(slope: f64, center: f64) -> Self {
        assert!(slope != 0.0, "chirp slope must be nonzero");
        Self::LinearChirp { slope, center }
    }

    /// Default chirp for a pulse of peak `omega_max` on a window reaching
    /// `t_edge` past `center`: slope such that |Δ| = 5 Ω_max at the edge.
    pub fn chirp_for(omega_max: f64, center: f64, t_edge: f64) -> Self {
        assert!(t_edge > 0.0 && omega_max > 0.0);
        Self::LinearChirp { slope: 5.0 * omega_max / t_edge, center }
    }

    pub fn value(&self, t: f64) -> f64 {
        match *self {
            Self::Constant { value } => value,
            Self::LinearChirp { slope, center } => slope * (t - center),
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Self::Constant { .. })
    }
}

/// An envelope with a constant phase factor: Ω(t) = e^{iφ} · shape(t).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Drive {
    pub shape: PulseShape,
    /// Phase in radians; π here flips the sign of the channel.
    pub phase: f64,
}

impl Drive {
    pub fn new(shape: PulseShape) -> Self {
        Self { shape, phase: 0.0 }
    }

    pub fn with_phase(shape: PulseShape, phase: f64) -> Self {
        Self { shape, phase }
    }

    /// Zero drive; used for unbound channels.
    pub fn off() -> Self {
        Self::new(PulseShape::constant(0.0))
    }

    /// Complex Rabi value at time `t`.
    pub fn value_at(&self, t: f64) -> C64 {
        C64::from_polar(1.0, self.phase) * self.shape.evaluate(t)
    }
}

/// A set of drives and detunings bound to effective-scheme channels over a
/// finite time window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulseSequence {
    pub drives: Vec<(usize, Drive)>,
    pub detunings: Vec<(usize, DetuningProfile)>,
    pub t_start: f64,
    pub t_end: f64,
}

impl PulseSequence {
    pub fn new(
        drives: Vec<(usize, Drive)>,
        detunings: Vec<(usize, DetuningProfile)>,
        t_start: f64,
        t_end: f64,
    ) -> Result<Self, PulseError> {
        if t_start >= t_end || t_start.is_nan() || t_end.is_nan() {
            return Err(PulseError::InvalidWindow { t_start, t_end });
        }
        for list in [
            drives.iter().map(|(c, _)| *c).collect::<Vec<_>>(),
            detunings.iter().map(|(c, _)| *c).collect(),
        ] {
            let mut seen = std::collections::HashSet::new();
            for c in list {
                if !seen.insert(c) {
                    return Err(PulseError::DuplicateChannel(c));
                }
            }
        }
        Ok(Self { drives, detunings, t_start, t_end })
    }

    /// Drives for channels `0..n`, zero where unbound.
    pub fn dense_drives(&self, n: usize) -> Vec<Drive> {
        let mut out = vec![Drive::off(); n];
        for &(c, d) in &self.drives {
            assert!(c < n, "drive channel {c} out of range for {n} channels");
            out[c] = d;
        }
        out
    }

    /// Detunings for channels `0..n`, zero where unbound.
    pub fn dense_detunings(&self, n: usize) -> Vec<DetuningProfile> {
        let mut out = vec![DetuningProfile::constant(0.0); n];
        for &(c, d) in &self.detunings {
            assert!(c < n, "detuning channel {c} out of range for {n} channels");
            out[c] = d;
        }
        out
    }

    /// Largest peak Rabi amplitude over all bound channels.
    pub fn max_rabi(&self) -> f64 {
        self.drives.iter().map(|(_, d)| d.shape.amplitude()).fold(0.0, f64::max)
    }
}


#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        // The flat-top envelope never exceeds its peak and never jumps by
        // more than the local slope bound allows on a fine grid.
        #[test]
        fn flat_top_bounded_and_continuous(
            amp in 0.1_f64..20.0,
            rise in -5.0_f64..0.0,
            hold in 0.0_f64..5.0,
            edge in 0.05_f64..2.0,
        ) {
            let fall = rise + hold;
            let p = PulseShape::flat_top(amp, rise, fall, edge);
            let t0 = rise - 4.0 * edge;
            let t1 = fall + 4.0 * edge;
            let n = 4000;
            let dt = (t1 - t0) / n as f64;
            // max |dΩ/dt| for a Gaussian edge is √(2/e)·amp/edge
            let slope_bound = (2.0_f64 / std::f64::consts::E).sqrt() * amp / edge;
            let mut prev = p.evaluate(t0);
            for k in 1..=n {
                let v = p.evaluate(t0 + k as f64 * dt);
                prop_assert!(v >= 0.0 && v <= amp * (1.0 + 1e-12));
                prop_assert!((v - prev).abs() <= slope_bound * dt * 1.5 + 1e-12 * amp);
                prev = v;
            }
        }

        // Quadrature agrees with the closed-form Gaussian integral.
        #[test]
        fn gaussian_area_matches_closed_form(
            amp in 0.1_f64..10.0,
            width in 0.2_f64..3.0,
            center in -2.0_f64..2.0,
        ) {
            let p = PulseShape::gaussian(amp, center, width);
            let a = pulse_area(&p, center - 10.0 * width, center + 10.0 * width);
            let exact = amp * width * std::f64::consts::PI.sqrt();
            prop_assert!((a - exact).abs() < 1e-8 * (1.0 + exact));
        }
    }
}
