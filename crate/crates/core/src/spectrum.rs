//! Spectral bookkeeping shared by the dipole, rate and oracle modules.
//!
//! A dressed dipole matrix element is a finite sum of terms `amp * e^{-i nu t}`
//! with `nu` one of `±omega`, `±(omega - Omega)`, `±(omega + Omega)`. Terms with
//! `nu > 0` form the negative-frequency part `d-` that drives emission; terms
//! with `nu < 0` form `d+` and drive absorption.
//!
//! Every amplitude carries the integer power `m` of the per-atom random phase
//! factor `e^{i(phi1 - phi2)}` it picked up during construction. A term is
//! coherent exactly when `m == 0`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// One of the three emission lines of the dressed atom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Line {
    /// `omega - Omega`
    Lower,
    /// `omega` (Rayleigh line)
    Carrier,
    /// `omega + Omega`
    Upper,
}

impl Line {
    pub const ALL: [Line; 3] = [Line::Lower, Line::Carrier, Line::Upper];

    pub fn label(self) -> &'static str {
        match self {
            Line::Lower => "omega-Omega",
            Line::Carrier => "omega",
            Line::Upper => "omega+Omega",
        }
    }

    /// Frequency of the line for carrier `omega` and generalized Rabi frequency `omega_rabi`.
    pub fn frequency(self, omega: f64, omega_rabi: f64) -> f64 {
        match self {
            Line::Lower => omega - omega_rabi,
            Line::Carrier => omega,
            Line::Upper => omega + omega_rabi,
        }
    }
}

impl fmt::Display for Line {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Which half of the spectrum a term belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Part {
    /// `e^{-i nu t}`, `nu > 0`: the `d-` part.
    Emission,
    /// `e^{+i nu t}`, `nu > 0`: the `d+` part.
    Absorption,
}

impl Part {
    pub fn flip(self) -> Part {
        match self {
            Part::Emission => Part::Absorption,
            Part::Absorption => Part::Emission,
        }
    }

    pub fn sign(self) -> f64 {
        match self {
            Part::Emission => 1.0,
            Part::Absorption => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SpectralKey {
    pub line: Line,
    pub part: Part,
}

impl SpectralKey {
    pub const fn new(line: Line, part: Part) -> Self {
        Self { line, part }
    }

    pub const fn emission(line: Line) -> Self {
        Self::new(line, Part::Emission)
    }

    pub const fn absorption(line: Line) -> Self {
        Self::new(line, Part::Absorption)
    }

    pub fn conj(self) -> Self {
        Self::new(self.line, self.part.flip())
    }

    /// Signed frequency `nu` of the term `e^{-i nu t}`.
    pub fn signed_frequency(self, omega: f64, omega_rabi: f64) -> f64 {
        self.part.sign() * self.line.frequency(omega, omega_rabi)
    }

    /// All six keys in a fixed order.
    pub fn all() -> impl Iterator<Item = SpectralKey> {
        Line::ALL.into_iter().flat_map(|line| {
            [Part::Emission, Part::Absorption]
                .into_iter()
                .map(move |part| SpectralKey::new(line, part))
        })
    }
}

/// Coherence class of a spectral term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coherence {
    Coherent,
    Noncoherent,
}

impl Coherence {
    pub fn from_phase_exponent(m: i32) -> Self {
        if m == 0 {
            Coherence::Coherent
        } else {
            Coherence::Noncoherent
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Coherence::Coherent => "coherent",
            Coherence::Noncoherent => "noncoherent",
        }
    }
}

impl fmt::Display for Coherence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// A complex amplitude together with its random-phase exponent.
///
/// `value` is evaluated at the actual phases of the configuration; the
/// exponent `m` records how `value` would rotate under `phi1 - phi2 -> phi1 - phi2 + theta`,
/// namely by `e^{i m theta}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Phased {
    pub value: Complex64,
    pub phase_exponent: i32,
}

impl Phased {
    pub const fn new(value: Complex64, phase_exponent: i32) -> Self {
        Self {
            value,
            phase_exponent,
        }
    }

    /// A phase-free real factor.
    pub fn real(x: f64) -> Self {
        Self::new(Complex64::new(x, 0.0), 0)
    }

    pub fn zero() -> Self {
        Self::real(0.0)
    }

    pub fn conj(self) -> Self {
        Self::new(self.value.conj(), -self.phase_exponent)
    }

    pub fn norm(self) -> f64 {
        self.value.norm()
    }

    pub fn norm_sqr(self) -> f64 {
        self.value.norm_sqr()
    }

    pub fn scale(self, x: f64) -> Self {
        Self::new(self.value * x, self.phase_exponent)
    }
}

impl Mul for Phased {
    type Output = Phased;

    fn mul(self, rhs: Phased) -> Phased {
        Phased::new(
            self.value * rhs.value,
            self.phase_exponent + rhs.phase_exponent,
        )
    }
}

impl Neg for Phased {
    type Output = Phased;

    fn neg(self) -> Phased {
        Phased::new(-self.value, self.phase_exponent)
    }
}

impl Add for Phased {
    type Output = Phased;

    /// Terms sharing a spectral slot always share the random-phase exponent
    /// when built from a physical state; an exact zero adopts the other
    /// operand's exponent.
    fn add(self, rhs: Phased) -> Phased {
        let m = if self.value == Complex64::new(0.0, 0.0) {
            rhs.phase_exponent
        } else if rhs.value == Complex64::new(0.0, 0.0) {
            self.phase_exponent
        } else {
            debug_assert_eq!(
                self.phase_exponent, rhs.phase_exponent,
                "adding terms with different random-phase exponents"
            );
            self.phase_exponent
        };
        Phased::new(self.value + rhs.value, m)
    }
}

/// Sparse spectrum of one dipole matrix element.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Spectrum {
    terms: BTreeMap<SpectralKey, Phased>,
}

impl Spectrum {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builder-style insertion; accumulates into an existing slot.
    pub fn with(mut self, key: SpectralKey, amp: Phased) -> Self {
        self.insert(key, amp);
        self
    }

    pub fn insert(&mut self, key: SpectralKey, amp: Phased) {
        let slot = self.terms.entry(key).or_insert_with(Phased::zero);
        *slot = *slot + amp;
    }

    pub fn get(&self, key: SpectralKey) -> Option<Phased> {
        self.terms.get(&key).copied()
    }

    /// Modulus of the term at `key`, zero when absent.
    pub fn modulus(&self, key: SpectralKey) -> f64 {
        self.get(key).map_or(0.0, Phased::norm)
    }

    pub fn iter(&self) -> impl Iterator<Item = (SpectralKey, Phased)> + '_ {
        self.terms.iter().map(|(k, v)| (*k, *v))
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Complex conjugate as a function of time: every term moves to the opposite part.
    pub fn conj(&self) -> Spectrum {
        Spectrum {
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (k.conj(), v.conj()))
                .collect(),
        }
    }

    pub fn scaled(&self, c: Phased) -> Spectrum {
        Spectrum {
            terms: self.terms.iter().map(|(k, v)| (*k, c * *v)).collect(),
        }
    }

    pub fn neg(&self) -> Spectrum {
        self.scaled(Phased::real(-1.0))
    }

    pub fn sum(&self, other: &Spectrum) -> Spectrum {
        let mut out = self.clone();
        for (k, v) in other.iter() {
            out.insert(k, v);
        }
        out
    }

    /// Sum of squared moduli over all terms.
    pub fn power(&self) -> f64 {
        self.terms.values().map(|v| v.norm_sqr()).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conj_flips_part_and_exponent() {
        let s = Spectrum::new().with(
            SpectralKey::emission(Line::Upper),
            Phased::new(Complex64::new(0.0, 2.0), -1),
        );
        let c = s.conj();
        let t = c.get(SpectralKey::absorption(Line::Upper)).unwrap();
        assert_eq!(t.value, Complex64::new(0.0, -2.0));
        assert_eq!(t.phase_exponent, 1);
        assert!(c.get(SpectralKey::emission(Line::Upper)).is_none());
    }

    #[test]
    fn zero_adopts_partner_exponent() {
        let a = Phased::zero() + Phased::new(Complex64::new(1.0, 0.0), 2);
        assert_eq!(a.phase_exponent, 2);
    }

    #[test]
    fn signed_frequency_convention() {
        let k = SpectralKey::absorption(Line::Lower);
        assert_eq!(k.signed_frequency(100.0, 2.0), -98.0);
        assert_eq!(SpectralKey::all().count(), 6);
    }
}
