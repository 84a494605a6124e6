//! First-order emission and absorption probabilities of the dressed atom in a
//! weak probe field.
//!
//! For a transition `i -> f` the relevant dipole is `D_fi`. At a given line
//! its emission part `d-` and absorption part `d+` give
//!
//! ```text
//! dW = |d-|^2 dW_sp + (|d-|^2 - |d+|^2) n dW_sp
//! ```
//!
//! so stimulated emission and absorption at the same frequency compensate,
//! and a negative total means net absorption. Table coefficients are quoted
//! in units of `dW_sp` at the line frequency.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::Vector3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dipoles::{
    adiabatic_dipoles, sudden_dipoles_exact, Basis, DressedDipoles, Element, Regime,
};
use crate::dressed::DressedParams;
use crate::error::{Error, Result};
use crate::spectrum::{Coherence, Line, SpectralKey};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AngularMode {
    /// `omega^3/(2 pi) |e'* . d-|^2` per unit solid angle.
    PerSolidAngle,
    /// Summed over polarizations and integrated over directions: `4 omega^3 |d-|^2 / 3`.
    AngleIntegrated,
}

/// Spontaneous emission rate in natural units (`hbar = c = 1`).
pub fn spontaneous_rate(
    freq: f64,
    d_minus: &Vector3<Complex64>,
    e_prime: &Vector3<Complex64>,
    mode: AngularMode,
) -> Result<f64> {
    if !(freq > 0.0) {
        return Err(Error::NonPositiveFrequency(freq));
    }
    let w3 = freq.powi(3);
    Ok(match mode {
        AngularMode::PerSolidAngle => w3 / (2.0 * PI) * e_prime.dotc(d_minus).norm_sqr(),
        AngularMode::AngleIntegrated => 4.0 * w3 * d_minus.norm_squared() / 3.0,
    })
}

/// Photon occupation from a spectral-angular intensity, `n' = 8 pi^3 I / omega^3`.
pub fn stimulated_occupation(intensity: f64, freq: f64) -> Result<f64> {
    if !(freq > 0.0) {
        return Err(Error::NonPositiveFrequency(freq));
    }
    if !(intensity >= 0.0) {
        return Err(Error::InvalidConfig(format!(
            "intensity must be non-negative, got {intensity}"
        )));
    }
    Ok(8.0 * PI.powi(3) * intensity / freq.powi(3))
}

/// A weak probe mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeField {
    pub n_photons: f64,
    pub direction: Vector3<f64>,
    pub polarization: Vector3<Complex64>,
}

impl ProbeField {
    pub fn new(
        n_photons: f64,
        direction: Vector3<f64>,
        polarization: Vector3<Complex64>,
    ) -> Result<Self> {
        if !(n_photons >= 0.0) || !n_photons.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "photon occupation must be finite and non-negative, got {n_photons}"
            )));
        }
        if (direction.norm() - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidConfig(
                "probe direction must be a unit vector".into(),
            ));
        }
        if (polarization.norm() - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidConfig(
                "probe polarization must be a unit vector".into(),
            ));
        }
        let k = direction.map(|x| Complex64::new(x, 0.0));
        if k.dotc(&polarization).norm() > 1e-9 {
            return Err(Error::InvalidConfig(
                "probe polarization must be orthogonal to its direction".into(),
            ));
        }
        Ok(Self {
            n_photons,
            direction,
            polarization,
        })
    }

    /// Net rate per unit solid angle into this mode: spontaneous plus
    /// stimulated emission minus absorption.
    pub fn net_rate(
        &self,
        freq: f64,
        d_minus: &Vector3<Complex64>,
        d_plus: &Vector3<Complex64>,
    ) -> Result<f64> {
        let emit = spontaneous_rate(
            freq,
            d_minus,
            &self.polarization,
            AngularMode::PerSolidAngle,
        )?;
        let absorb =
            spontaneous_rate(freq, d_plus, &self.polarization, AngularMode::PerSolidAngle)?;
        Ok(emit + self.n_photons * (emit - absorb))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Emission,
    Absorption,
}

impl Direction {
    pub fn label(self) -> &'static str {
        match self {
            Direction::Emission => "emission",
            Direction::Absorption => "absorption",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Rate coefficients at one frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NetRate {
    pub spont_coeff: f64,
    pub stim_coeff: f64,
    pub net: f64,
    pub direction: Direction,
}

impl NetRate {
    pub fn from_coefficients(spont_coeff: f64, stim_coeff: f64, n_photons: f64) -> Self {
        let net = spont_coeff + stim_coeff * n_photons;
        let direction = if net < 0.0 {
            Direction::Absorption
        } else {
            Direction::Emission
        };
        Self {
            spont_coeff,
            stim_coeff,
            net,
            direction,
        }
    }
}

/// Combine the emission amplitude `d-` and absorption amplitude `d+` of one line.
pub fn net_rate(emission_amp: Complex64, absorption_amp: Complex64, n_photons: f64) -> NetRate {
    let spont = emission_amp.norm_sqr();
    NetRate::from_coefficients(spont, spont - absorption_amp.norm_sqr(), n_photons)
}

/// Probe occupation `n'` at each of the three lines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Occupations {
    pub lower: f64,
    pub carrier: f64,
    pub upper: f64,
}

impl Occupations {
    pub fn uniform(n: f64) -> Self {
        Self {
            lower: n,
            carrier: n,
            upper: n,
        }
    }

    pub fn at(&self, line: Line) -> f64 {
        match line {
            Line::Lower => self.lower,
            Line::Carrier => self.carrier,
            Line::Upper => self.upper,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for line in Line::ALL {
            let n = self.at(line);
            if !(n >= 0.0) || !n.is_finite() {
                return Err(Error::InvalidConfig(format!(
                    "occupation at {line} must be finite and non-negative, got {n}"
                )));
            }
        }
        Ok(())
    }
}

impl Default for Occupations {
    fn default() -> Self {
        Self::uniform(0.0)
    }
}

/// A transition between dressed states, `initial -> final`, 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Transition {
    pub basis: Basis,
    pub initial: u8,
    pub final_state: u8,
}

impl Transition {
    pub const fn new(basis: Basis, initial: u8, final_state: u8) -> Self {
        Self {
            basis,
            initial,
            final_state,
        }
    }

    /// The dipole element `D_fi` governing the transition.
    pub fn element(self) -> Element {
        match (self.final_state, self.initial) {
            (1, 1) => Element::D11,
            (1, 2) => Element::D12,
            (2, 1) => Element::D21,
            _ => Element::D22,
        }
    }

    pub fn coherence(self) -> Coherence {
        if self.initial == self.final_state {
            Coherence::Coherent
        } else {
            Coherence::Noncoherent
        }
    }

    pub fn label(self) -> String {
        let prime = match self.basis {
            Basis::Adiabatic => "",
            Basis::Sudden => "'",
        };
        format!("Phi{prime}{}->Phi{prime}{}", self.initial, self.final_state)
    }
}

/// Detuning-sign condition of a table line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignCondition {
    Any,
    Positive,
    Negative,
}

impl SignCondition {
    pub fn holds(self, sign_delta: f64) -> bool {
        match self {
            SignCondition::Any => true,
            SignCondition::Positive => sign_delta > 0.0,
            SignCondition::Negative => sign_delta < 0.0,
        }
    }
}

/// Occupation predicate attached to a table line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OccupationCondition {
    None,
    /// Pure absorption lines exist only in a populated probe.
    Positive,
    /// `n > alpha^4/16`.
    AboveAlphaFourth,
}

impl OccupationCondition {
    pub fn holds(self, n: f64, alpha: f64) -> bool {
        match self {
            OccupationCondition::None => true,
            OccupationCondition::Positive => n > 0.0,
            OccupationCondition::AboveAlphaFourth => n > alpha.powi(4) / 16.0,
        }
    }
}

/// Which coefficients decide the process direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoefficientMode {
    Exact,
    Asymptotic,
}

/// Truncated `(spontaneous, stimulated)` coefficients as a function of
/// `(alpha, 1/alpha, sign Delta)`.
type CoeffFn = fn(f64, f64, f64) -> (f64, f64);

struct LineSpec {
    basis: Basis,
    regime: Regime,
    initial: u8,
    final_state: u8,
    line: Line,
    sign: SignCondition,
    occupation: OccupationCondition,
    coeffs: CoeffFn,
    validity: &'static str,
}

#[allow(clippy::too_many_arguments)]
const fn spec(
    basis: Basis,
    regime: Regime,
    states: (u8, u8),
    line: Line,
    sign: SignCondition,
    occupation: OccupationCondition,
    coeffs: CoeffFn,
    validity: &'static str,
) -> LineSpec {
    LineSpec {
        basis,
        regime,
        initial: states.0,
        final_state: states.1,
        line,
        sign,
        occupation,
        coeffs,
        validity,
    }
}

use Basis::{Adiabatic, Sudden};
use Line::{Carrier, Lower, Upper};
use OccupationCondition as Occ;
use Regime::{LargeAlpha, SmallAlpha};
use SignCondition::{Any, Negative, Positive};

const ADIABATIC_LINES: [LineSpec; 8] = [
    spec(
        Adiabatic,
        SmallAlpha,
        (1, 1),
        Carrier,
        Any,
        Occ::None,
        |a, _, _| (a * a / 4.0 * (1.0 - a * a), 0.0),
        "alpha^2<<1",
    ),
    spec(
        Adiabatic,
        SmallAlpha,
        (1, 2),
        Lower,
        Positive,
        Occ::None,
        |a, _, _| (a.powi(4) / 16.0, a.powi(4) / 16.0),
        "alpha^2<<1, Delta>0",
    ),
    spec(
        Adiabatic,
        SmallAlpha,
        (1, 2),
        Upper,
        Positive,
        Occ::Positive,
        |a, _, _| (0.0, -(1.0 - a * a / 2.0)),
        "alpha^2<<1, Delta>0, n>0",
    ),
    spec(
        Adiabatic,
        SmallAlpha,
        (1, 2),
        Lower,
        Negative,
        Occ::None,
        |a, _, _| (1.0 - a * a / 2.0, 1.0 - a * a / 2.0),
        "alpha^2<<1, Delta<0",
    ),
    spec(
        Adiabatic,
        SmallAlpha,
        (1, 2),
        Upper,
        Negative,
        Occ::Positive,
        |a, _, _| (0.0, -a.powi(4) / 16.0),
        "alpha^2<<1, Delta<0, n>0",
    ),
    spec(
        Adiabatic,
        LargeAlpha,
        (1, 1),
        Carrier,
        Any,
        Occ::None,
        |_, r, _| (0.25 * (1.0 - r * r), 0.0),
        "alpha^2>>1",
    ),
    spec(
        Adiabatic,
        LargeAlpha,
        (1, 2),
        Lower,
        Any,
        Occ::None,
        |_, r, s| {
            let c = 0.25 * (1.0 - 2.0 * s * r);
            (c, c)
        },
        "alpha^2>>1",
    ),
    spec(
        Adiabatic,
        LargeAlpha,
        (1, 2),
        Upper,
        Any,
        Occ::Positive,
        |_, r, s| (0.0, -0.25 * (1.0 + 2.0 * s * r)),
        "alpha^2>>1, n>0",
    ),
];

const SUDDEN_LINES: [LineSpec; 16] = [
    spec(
        Sudden,
        SmallAlpha,
        (1, 1),
        Carrier,
        Any,
        Occ::None,
        |a, _, _| (a * a / 4.0 * (1.0 - a * a), 0.0),
        "alpha^2<<1",
    ),
    spec(
        Sudden,
        SmallAlpha,
        (1, 1),
        Lower,
        Positive,
        Occ::None,
        |a, _, _| (a.powi(6) / 64.0, 0.0),
        "alpha^2<<1, Delta>0",
    ),
    spec(
        Sudden,
        SmallAlpha,
        (1, 1),
        Lower,
        Negative,
        Occ::None,
        |a, _, _| (a * a / 4.0 * (1.0 - a * a / 2.0), 0.0),
        "alpha^2<<1, Delta<0",
    ),
    spec(
        Sudden,
        SmallAlpha,
        (1, 1),
        Upper,
        Positive,
        Occ::None,
        |a, _, _| (a * a / 4.0 * (1.0 - a * a / 2.0), 0.0),
        "alpha^2<<1, Delta>0",
    ),
    spec(
        Sudden,
        SmallAlpha,
        (1, 1),
        Upper,
        Negative,
        Occ::None,
        |a, _, _| (a.powi(6) / 64.0, 0.0),
        "alpha^2<<1, Delta<0",
    ),
    spec(
        Sudden,
        SmallAlpha,
        (1, 2),
        Carrier,
        Any,
        Occ::None,
        |a, _, _| (a.powi(4) / 4.0 * (1.0 - a * a), 0.0),
        "alpha^2<<1",
    ),
    spec(
        Sudden,
        SmallAlpha,
        (1, 2),
        Upper,
        Positive,
        Occ::AboveAlphaFourth,
        |a, _, _| (a.powi(4) / 16.0, -1.0),
        "alpha^2<<1, Delta>0, n>alpha^4/16",
    ),
    spec(
        Sudden,
        SmallAlpha,
        (1, 2),
        Lower,
        Positive,
        Occ::None,
        |a, _, _| (a.powi(4) / 16.0, a.powi(4) / 16.0),
        "alpha^2<<1, Delta>0",
    ),
    spec(
        Sudden,
        SmallAlpha,
        (1, 2),
        Upper,
        Negative,
        Occ::None,
        |a, _, _| (a.powi(4) / 16.0, a.powi(4) / 16.0),
        "alpha^2<<1, Delta<0",
    ),
    spec(
        Sudden,
        SmallAlpha,
        (1, 2),
        Lower,
        Negative,
        Occ::AboveAlphaFourth,
        |a, _, _| (a.powi(4) / 16.0, -1.0),
        "alpha^2<<1, Delta<0, n>alpha^4/16",
    ),
    spec(
        Sudden,
        LargeAlpha,
        (1, 1),
        Carrier,
        Any,
        Occ::None,
        |_, r, _| (r * r / 4.0 * (1.0 - r * r), 0.0),
        "alpha^2>>1",
    ),
    spec(
        Sudden,
        LargeAlpha,
        (1, 1),
        Upper,
        Any,
        Occ::None,
        |_, r, s| ((1.0 + 2.0 * s * r) / 16.0, 0.0),
        "alpha^2>>1",
    ),
    spec(
        Sudden,
        LargeAlpha,
        (1, 1),
        Lower,
        Any,
        Occ::None,
        |_, r, s| ((1.0 - 2.0 * s * r) / 16.0, 0.0),
        "alpha^2>>1",
    ),
    spec(
        Sudden,
        LargeAlpha,
        (1, 2),
        Carrier,
        Any,
        Occ::None,
        |_, r, _| (0.25 * (1.0 - r * r), 0.0),
        "alpha^2>>1",
    ),
    spec(
        Sudden,
        LargeAlpha,
        (1, 2),
        Upper,
        Any,
        Occ::None,
        |_, r, s| ((1.0 - 2.0 * r * r) / 16.0, -(s * r / 4.0 + r * r / 2.0)),
        "alpha^2>>1",
    ),
    spec(
        Sudden,
        LargeAlpha,
        (1, 2),
        Lower,
        Any,
        Occ::None,
        |_, r, s| ((1.0 - 2.0 * r * r) / 16.0, s * r / 4.0 - r * r / 2.0),
        "alpha^2>>1",
    ),
];

/// One line of a first-order rate table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateEntry {
    pub regime: Regime,
    pub transition: Transition,
    pub line: Line,
    pub freq: f64,
    pub sign: SignCondition,
    /// Truncated spontaneous coefficient.
    pub spont_coeff: f64,
    /// Truncated coefficient of `n'`; negative means absorption dominates.
    pub stim_coeff: f64,
    pub coherence: Coherence,
    pub validity: &'static str,
    pub active: bool,
    pub occupation: f64,
    pub direction: Direction,
    /// `|d-|^2` from the exact dipole spectra.
    pub exact_coeff: f64,
    /// `|d-|^2 - |d+|^2` from the exact dipole spectra.
    pub exact_stim_coeff: f64,
}

impl RateEntry {
    pub fn net(&self, mode: CoefficientMode) -> NetRate {
        match mode {
            CoefficientMode::Asymptotic => {
                NetRate::from_coefficients(self.spont_coeff, self.stim_coeff, self.occupation)
            }
            CoefficientMode::Exact => {
                NetRate::from_coefficients(self.exact_coeff, self.exact_stim_coeff, self.occupation)
            }
        }
    }
}

/// Exact `(|d-|^2, |d-|^2 - |d+|^2)` for a transition at one line.
pub fn exact_coefficients(
    dipoles: &DressedDipoles,
    transition: Transition,
    line: Line,
) -> (f64, f64) {
    let e = transition.element();
    let emit = dipoles.modulus(e, SpectralKey::emission(line)).powi(2);
    let absorb = dipoles.modulus(e, SpectralKey::absorption(line)).powi(2);
    (emit, emit - absorb)
}

fn build_table(
    params: &DressedParams,
    occupations: &Occupations,
    mode: CoefficientMode,
    lines: &[LineSpec],
    dipoles: &DressedDipoles,
) -> Vec<RateEntry> {
    let alpha = params.alpha.value();
    let r = params.alpha.recip();
    let s = params.sign_delta();
    lines
        .iter()
        .filter(|l| match l.regime {
            // A truncated formula is listed only where it evaluates to a number.
            Regime::SmallAlpha => alpha.is_finite(),
            Regime::LargeAlpha => r.is_finite(),
        })
        .map(|l| {
            let transition = Transition::new(l.basis, l.initial, l.final_state);
            let (spont, stim) = (l.coeffs)(alpha, r, s);
            let (exact, exact_stim) = exact_coefficients(dipoles, transition, l.line);
            let n = occupations.at(l.line);
            let in_branch = match l.regime {
                Regime::SmallAlpha => alpha < 1.0,
                Regime::LargeAlpha => alpha > 1.0,
            };
            let active = in_branch && l.sign.holds(s) && l.occupation.holds(n, alpha);
            let net = match mode {
                CoefficientMode::Asymptotic => NetRate::from_coefficients(spont, stim, n),
                CoefficientMode::Exact => NetRate::from_coefficients(exact, exact_stim, n),
            };
            RateEntry {
                regime: l.regime,
                transition,
                line: l.line,
                freq: params.frequency(l.line),
                sign: l.sign,
                spont_coeff: spont,
                stim_coeff: stim,
                coherence: transition.coherence(),
                validity: l.validity,
                active,
                occupation: n,
                direction: net.direction,
                exact_coeff: exact,
                exact_stim_coeff: exact_stim,
            }
        })
        .collect()
}

/// Rate table for a dressed atom prepared by adiabatic switching in `Phi1`.
pub fn adiabatic_table(
    params: &DressedParams,
    occupations: &Occupations,
    mode: CoefficientMode,
) -> Vec<RateEntry> {
    build_table(
        params,
        occupations,
        mode,
        &ADIABATIC_LINES,
        &adiabatic_dipoles(params),
    )
}

/// Rate table for a dressed atom prepared by sudden switching in `Phi'1`.
pub fn sudden_table(
    params: &DressedParams,
    occupations: &Occupations,
    mode: CoefficientMode,
) -> Vec<RateEntry> {
    build_table(
        params,
        occupations,
        mode,
        &SUDDEN_LINES,
        &sudden_dipoles_exact(params),
    )
}

pub fn rate_table(
    params: &DressedParams,
    basis: Basis,
    occupations: &Occupations,
    mode: CoefficientMode,
) -> Vec<RateEntry> {
    match basis {
        Basis::Adiabatic => adiabatic_table(params, occupations, mode),
        Basis::Sudden => sudden_table(params, occupations, mode),
    }
}

/// Find the table line for a transition at a line under a sign condition.
pub fn find_entry(
    table: &[RateEntry],
    regime: Regime,
    final_state: u8,
    line: Line,
    sign: SignCondition,
) -> Option<&RateEntry> {
    table.iter().find(|e| {
        e.regime == regime
            && e.transition.final_state == final_state
            && e.line == line
            && e.sign == sign
    })
}

/// Spontaneous width of the adiabatic dressed state `Phi1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinewidthResult {
    pub gamma_es: f64,
    /// Weight of the bare upper state in `Phi1`.
    pub n2_weight: f64,
}

/// `Gamma(ES) = n2 Gamma`, `n2 = (sqrt(1 + alpha^2) - sign Delta) / (2 sqrt(1 + alpha^2))`.
pub fn es_linewidth(params: &DressedParams, gamma_free: f64) -> Result<LinewidthResult> {
    if !(gamma_free >= 0.0) || !gamma_free.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "free-atom width must be finite and non-negative, got {gamma_free}"
        )));
    }
    let n2 = params.upper_weight_in_phi1();
    Ok(LinewidthResult {
        gamma_es: n2 * gamma_free,
        n2_weight: n2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dressed::{derive_params, SystemConfig};
    use approx::assert_relative_eq;

    fn params(delta: f64, alpha: f64) -> DressedParams {
        derive_params(&SystemConfig::from_alpha(100.0, delta, alpha)).unwrap()
    }

    #[test]
    fn spontaneous_rate_basics() {
        let z = Vector3::zeros();
        let e = Vector3::new(
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
        );
        assert_eq!(
            spontaneous_rate(2.0, &z, &e, AngularMode::PerSolidAngle).unwrap(),
            0.0
        );
        let d = e * Complex64::new(0.3, 0.4);
        let r1 = spontaneous_rate(2.0, &d, &e, AngularMode::PerSolidAngle).unwrap();
        let r2 = spontaneous_rate(
            2.0,
            &(d * Complex64::new(2.0, 0.0)),
            &e,
            AngularMode::PerSolidAngle,
        )
        .unwrap();
        assert_relative_eq!(r2, 4.0 * r1, max_relative = 1e-14);
        let total = spontaneous_rate(2.0, &d, &e, AngularMode::AngleIntegrated).unwrap();
        assert_relative_eq!(total / r1, 8.0 * PI / 3.0, max_relative = 1e-14);
        assert!(spontaneous_rate(0.0, &d, &e, AngularMode::AngleIntegrated).is_err());
    }

    #[test]
    fn occupation_from_intensity() {
        let w: f64 = 3.0;
        assert_eq!(stimulated_occupation(0.0, w).unwrap(), 0.0);
        let unit = w.powi(3) / (8.0 * PI.powi(3));
        assert_relative_eq!(
            stimulated_occupation(unit, w).unwrap(),
            1.0,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            stimulated_occupation(2.5 * unit, w).unwrap(),
            2.5,
            max_relative = 1e-14
        );
    }

    #[test]
    fn net_rate_compensation() {
        let a = Complex64::new(0.3, -0.2);
        let r = net_rate(a, a * Complex64::i(), 7.0);
        assert!(r.stim_coeff.abs() < 1e-16);
        assert_relative_eq!(r.net, a.norm_sqr());
        let r = net_rate(Complex64::new(0.1, 0.0), Complex64::new(0.5, 0.0), 10.0);
        assert_eq!(r.direction, Direction::Absorption);
        let r = net_rate(Complex64::new(0.1, 0.0), Complex64::new(0.5, 0.0), 0.0);
        assert_relative_eq!(r.net, 0.01);
    }

    #[test]
    fn probe_field_validation() {
        let z = Vector3::new(0.0, 0.0, 1.0);
        let x = Vector3::new(
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
        );
        assert!(ProbeField::new(1.0, z, x).is_ok());
        assert!(ProbeField::new(-1.0, z, x).is_err());
        let zc = z.map(|v| Complex64::new(v, 0.0));
        assert!(ProbeField::new(1.0, z, zc).is_err());
        let probe = ProbeField::new(2.0, z, x).unwrap();
        let net = probe.net_rate(1.0, &x, &x).unwrap();
        assert_relative_eq!(net, 1.0 / (2.0 * PI));
    }

    #[test]
    fn adiabatic_table_values() {
        let t = adiabatic_table(
            &params(1.0, 0.1),
            &Occupations::uniform(0.0),
            CoefficientMode::Exact,
        );
        assert_eq!(t.len(), 8);
        let coh = find_entry(&t, Regime::SmallAlpha, 1, Line::Carrier, SignCondition::Any).unwrap();
        assert_relative_eq!(coh.spont_coeff, 0.002475, max_relative = 1e-12);
        assert!(coh.active);
        let side = find_entry(
            &t,
            Regime::SmallAlpha,
            2,
            Line::Lower,
            SignCondition::Positive,
        )
        .unwrap();
        assert_relative_eq!(side.spont_coeff, 6.25e-6, max_relative = 1e-12);
        assert!((side.exact_coeff - 6.157e-6).abs() < 1e-9);
        let gap = (side.spont_coeff - side.exact_coeff) / side.exact_coeff;
        assert!((gap - 0.015).abs() < 1e-3, "gap {gap}");

        let t = adiabatic_table(
            &params(1.0, 10.0),
            &Occupations::uniform(0.0),
            CoefficientMode::Exact,
        );
        let coh = find_entry(&t, Regime::LargeAlpha, 1, Line::Carrier, SignCondition::Any).unwrap();
        assert_relative_eq!(coh.spont_coeff, 0.2475, max_relative = 1e-12);
    }

    #[test]
    fn sudden_table_values() {
        let t = sudden_table(
            &params(1.0, 0.1),
            &Occupations::uniform(0.0),
            CoefficientMode::Exact,
        );
        let coh = find_entry(&t, Regime::SmallAlpha, 1, Line::Carrier, SignCondition::Any).unwrap();
        assert_relative_eq!(coh.spont_coeff, 0.002475, max_relative = 1e-12);
        let low = find_entry(
            &t,
            Regime::SmallAlpha,
            1,
            Line::Lower,
            SignCondition::Positive,
        )
        .unwrap();
        assert_relative_eq!(low.spont_coeff, 1.5625e-8, max_relative = 1e-12);
        let t = sudden_table(
            &params(1.0, 10.0),
            &Occupations::uniform(0.0),
            CoefficientMode::Exact,
        );
        let up = find_entry(&t, Regime::LargeAlpha, 2, Line::Upper, SignCondition::Any).unwrap();
        assert_relative_eq!(up.spont_coeff, 0.06125, max_relative = 1e-12);
    }

    #[test]
    fn exact_coefficients_are_amplitude_squares() {
        let p = params(-0.7, 0.4);
        let d = sudden_dipoles_exact(&p);
        for e in sudden_table(&p, &Occupations::uniform(1.0), CoefficientMode::Exact) {
            let el = e.transition.element();
            let m = d.modulus(el, SpectralKey::emission(e.line));
            assert_relative_eq!(e.exact_coeff, m * m, max_relative = 1e-14);
        }
    }

    #[test]
    fn no_active_absorption_without_probe() {
        for alpha in [0.05, 0.3, 3.0, 30.0] {
            for delta in [1.0, -1.0] {
                let p = params(delta, alpha);
                for mode in [CoefficientMode::Exact, CoefficientMode::Asymptotic] {
                    for basis in [Basis::Adiabatic, Basis::Sudden] {
                        let t = rate_table(&p, basis, &Occupations::uniform(0.0), mode);
                        assert!(t
                            .iter()
                            .all(|e| !e.active || e.direction == Direction::Emission));
                    }
                }
            }
        }
    }

    #[test]
    fn conditional_line_direction_follows_probe() {
        // Delta > 0, large alpha: omega+Omega is emitted while 1/16 > n/(4 alpha)
        let p = params(1.0, 20.0);
        let find = |n: f64| {
            let t = sudden_table(&p, &Occupations::uniform(n), CoefficientMode::Asymptotic);
            find_entry(&t, Regime::LargeAlpha, 2, Line::Upper, SignCondition::Any)
                .unwrap()
                .direction
        };
        assert_eq!(find(0.5), Direction::Emission);
        assert_eq!(find(20.0), Direction::Absorption);
    }

    #[test]
    fn resonance_lists_only_large_alpha_lines() {
        let p = derive_params(&SystemConfig::from_detuning(100.0, 0.0, 1.0)).unwrap();
        let t = sudden_table(&p, &Occupations::uniform(0.0), CoefficientMode::Exact);
        assert_eq!(t.len(), 6);
        assert!(t.iter().all(|e| e.regime == Regime::LargeAlpha && e.active));
    }

    #[test]
    fn linewidth_values() {
        let lw = es_linewidth(&params(1.0, 1.0), 1.0).unwrap();
        assert_relative_eq!(lw.gamma_es, 0.146_446_609_4, max_relative = 1e-9);
        assert!(es_linewidth(&params(1.0, 1.0), -1.0).is_err());
        let a = es_linewidth(&params(1.0, 3.0), 2.0).unwrap();
        let b = es_linewidth(&params(-1.0, 3.0), 2.0).unwrap();
        assert_relative_eq!(a.n2_weight + b.n2_weight, 1.0, max_relative = 1e-14);
    }
}
