//! Dressed-state parameters of a two-level atom in a strong near-resonant field.
//!
//! Natural units throughout: `hbar = 1`, every energy is an angular frequency,
//! and the coupling is `|V| = |E| |d|`. The complex coupling carries the
//! interaction phase `phi0 = phi + phi1 - phi2` as `V = |V| e^{i phi0 - i pi}`.
//!
//! Two orthonormal dressed bases are related by a fixed unitary:
//!
//! ```text
//! Phi'1 =  C1 Phi1 + C2* Phi2
//! Phi'2 = -C2 Phi1 + C1  Phi2
//! ```
//!
//! where `Phi1, Phi2` are the states reached by adiabatic switching and
//! `Phi'1, Phi'2` those reached by sudden switching (equal to the bare states
//! at switch-on).

use std::f64::consts::PI;
use std::fmt;

use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::spectrum::Line;

/// Detuning-to-transition ratio above which the near-resonance approximation
/// is reported as outside its validity range.
pub const RESONANCE_VALIDITY_RATIO: f64 = 0.1;

/// Physical inputs for one atom in the strong field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    /// Transition frequency `E2 - E1`.
    pub e21: f64,
    /// Carrier frequency of the strong field.
    pub omega: f64,
    /// Dipole-moment magnitude of the 1-2 transition.
    pub dipole_mag: f64,
    /// Strong-field amplitude.
    pub field_amp: f64,
    /// Deterministic phase of the strong field.
    pub phi_field: f64,
    /// Random phase of the lower atomic state.
    pub phi1: f64,
    /// Random phase of the upper atomic state.
    pub phi2: f64,
}

impl SystemConfig {
    pub fn new(e21: f64, omega: f64, dipole_mag: f64, field_amp: f64) -> Self {
        Self {
            e21,
            omega,
            dipole_mag,
            field_amp,
            phi_field: 0.0,
            phi1: 0.0,
            phi2: 0.0,
        }
    }

    /// Unit dipole, coupling `|V| = v_mag`, transition placed at `omega + delta`.
    pub fn from_detuning(omega: f64, delta: f64, v_mag: f64) -> Self {
        Self::new(omega + delta, omega, 1.0, v_mag)
    }

    /// Unit dipole with the coupling chosen so that `2|V|/|delta| = alpha`.
    pub fn from_alpha(omega: f64, delta: f64, alpha: f64) -> Self {
        Self::from_detuning(omega, delta, 0.5 * alpha * delta.abs())
    }

    pub fn with_phases(mut self, phi_field: f64, phi1: f64, phi2: f64) -> Self {
        self.phi_field = phi_field;
        self.phi1 = phi1;
        self.phi2 = phi2;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("e21", self.e21),
            ("omega", self.omega),
            ("dipole_mag", self.dipole_mag),
            ("field_amp", self.field_amp),
            ("phi_field", self.phi_field),
            ("phi1", self.phi1),
            ("phi2", self.phi2),
        ];
        if let Some((name, v)) = finite.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "{name} must be finite, got {v}"
            )));
        }
        if self.e21 <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "e21 must be > 0, got {}",
                self.e21
            )));
        }
        if self.omega <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "omega must be > 0, got {}",
                self.omega
            )));
        }
        if self.dipole_mag <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "dipole_mag must be > 0, got {}",
                self.dipole_mag
            )));
        }
        if self.field_amp < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "field_amp must be >= 0, got {}",
                self.field_amp
            )));
        }
        Ok(())
    }

    pub fn detuning(&self) -> f64 {
        self.e21 - self.omega
    }

    pub fn coupling(&self) -> f64 {
        self.field_amp * self.dipole_mag
    }

    /// `|Delta| / E21`, the near-resonance figure of merit.
    pub fn resonance_ratio(&self) -> f64 {
        self.detuning().abs() / self.e21
    }

    pub fn within_model_validity(&self) -> bool {
        self.resonance_ratio() <= RESONANCE_VALIDITY_RATIO
    }
}

/// Saturation parameter `alpha = 2|V|/|Delta|`, infinite on resonance.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
pub enum Alpha {
    Finite(f64),
    Infinite,
}

impl Alpha {
    pub fn value(self) -> f64 {
        match self {
            Alpha::Finite(a) => a,
            Alpha::Infinite => f64::INFINITY,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Alpha::Infinite)
    }

    /// `1/alpha`, exactly zero on resonance.
    pub fn recip(self) -> f64 {
        match self {
            Alpha::Finite(a) => 1.0 / a,
            Alpha::Infinite => 0.0,
        }
    }
}

impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Alpha::Finite(a) => write!(f, "{a}"),
            Alpha::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Alpha {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Alpha::Finite(a) => s.serialize_f64(*a),
            Alpha::Infinite => s.serialize_str("inf"),
        }
    }
}

/// Quantities derived from a [`SystemConfig`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DressedParams {
    /// Carrier frequency `omega`.
    pub carrier: f64,
    /// Detuning `E21 - omega`.
    pub delta: f64,
    /// Coupling magnitude `|V|`.
    pub v_mag: f64,
    /// Interaction phase `phi + phi1 - phi2`.
    pub phi0: f64,
    /// Random atomic phase difference `phi1 - phi2`.
    pub atom_phase: f64,
    pub alpha: Alpha,
    /// Generalized Rabi frequency `sqrt(Delta^2 + 4|V|^2)`.
    pub omega_rabi: f64,
    /// Lower quasi-energy `(Delta - Omega)/2` in the rotating frame.
    pub lambda1: f64,
    /// `C1^2 = (1 + Delta/Omega)/2`, evaluated without cancellation.
    pub c1_sq: f64,
    /// `|C2|^2 = (1 - Delta/Omega)/2`, evaluated without cancellation.
    pub c2_sq: f64,
    pub c1: f64,
    pub c2: Complex64,
}

/// Derive the dressed-state parameters.
///
/// Fails when both the detuning and the coupling vanish.
pub fn derive_params(cfg: &SystemConfig) -> Result<DressedParams> {
    cfg.validate()?;
    let delta = cfg.detuning();
    let v_mag = cfg.coupling();
    if delta == 0.0 && v_mag == 0.0 {
        return Err(Error::DegenerateDressing);
    }
    let omega_rabi = delta.hypot(2.0 * v_mag);

    // The small one of Omega +- Delta is formed as 4|V|^2 / (Omega -+ Delta).
    let (plus, minus) = if delta >= 0.0 {
        let plus = omega_rabi + delta;
        (plus, 4.0 * v_mag * v_mag / plus)
    } else {
        let minus = omega_rabi - delta;
        (4.0 * v_mag * v_mag / minus, minus)
    };
    let c1_sq = plus / (2.0 * omega_rabi);
    let c2_sq = minus / (2.0 * omega_rabi);
    let lambda1 = -0.5 * minus;

    let phi0 = cfg.phi_field + cfg.phi1 - cfg.phi2;
    let alpha = if delta == 0.0 {
        Alpha::Infinite
    } else {
        Alpha::Finite(2.0 * v_mag / delta.abs())
    };
    // C2 = -lambda1 C1 / V = |C2| e^{-i arg V}, arg V = phi0 - pi.
    let c2 = Complex64::from_polar(c2_sq.sqrt(), PI - phi0);

    Ok(DressedParams {
        carrier: cfg.omega,
        delta,
        v_mag,
        phi0,
        atom_phase: cfg.phi1 - cfg.phi2,
        alpha,
        omega_rabi,
        lambda1,
        c1_sq,
        c2_sq,
        c1: c1_sq.sqrt(),
        c2,
    })
}

/// Lower, carrier and upper emission frequencies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sidebands {
    pub lower: f64,
    pub carrier: f64,
    pub upper: f64,
}

impl DressedParams {
    /// `sign(Delta)`, taken as `+1` on resonance where every `sign/alpha` term vanishes.
    pub fn sign_delta(&self) -> f64 {
        if self.delta < 0.0 {
            -1.0
        } else {
            1.0
        }
    }

    /// Complex coupling `V = |V| e^{i phi0 - i pi}`.
    pub fn v(&self) -> Complex64 {
        Complex64::from_polar(self.v_mag, self.phi0 - PI)
    }

    /// `Delta / Omega`.
    pub fn delta_over_omega(&self) -> f64 {
        self.delta / self.omega_rabi
    }

    /// `|V| / Omega`.
    pub fn v_over_omega(&self) -> f64 {
        self.v_mag / self.omega_rabi
    }

    pub fn sidebands(&self) -> Sidebands {
        Sidebands {
            lower: self.frequency(Line::Lower),
            carrier: self.carrier,
            upper: self.frequency(Line::Upper),
        }
    }

    /// `(omega - Omega, omega, omega + Omega)`.
    pub fn sideband_frequencies(&self) -> (f64, f64, f64) {
        let s = self.sidebands();
        (s.lower, s.carrier, s.upper)
    }

    pub fn frequency(&self, line: Line) -> f64 {
        line.frequency(self.carrier, self.omega_rabi)
    }

    /// Unitary taking adiabatic-basis coordinates to the sudden basis:
    /// rows `(C1, C2*)` and `(-C2, C1)`.
    pub fn basis_transform(&self) -> Matrix2<Complex64> {
        let c1 = Complex64::new(self.c1, 0.0);
        Matrix2::new(c1, self.c2.conj(), -self.c2, c1)
    }

    /// Weight of the bare upper state in `Phi1`.
    pub fn upper_weight_in_phi1(&self) -> f64 {
        self.c2_sq
    }
}
