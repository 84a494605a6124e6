//! Dressed dipole matrix elements.
//!
//! `D_ik = <Phi_i| d |Phi_k>` for the adiabatic basis and `D'_ik` for the
//! sudden basis, each stored as a [`Spectrum`] in units of `|d|`.
//!
//! In the adiabatic basis, with `d12 = e^{-i(phi1 - phi2)}`:
//!
//! ```text
//! D11 = -D22 = -(V/Omega) d12 e^{-i omega t} + c.c.
//! D12 = D21* = (1 + Delta/Omega)/2 d12 e^{-i(omega+Omega)t}
//!            - C2^2 d21 e^{+i(omega-Omega)t},   |C2^2| = (1 - Delta/Omega)/2
//! ```
//!
//! The sudden-basis elements are obtained exactly by the per-frequency
//! congruence `D'(nu) = conj(U) D(nu) U^T` with `U` from
//! [`DressedParams::basis_transform`]. The truncated small- and large-alpha
//! expansions are kept separately as verification targets.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dressed::{derive_params, DressedParams, SystemConfig};
use crate::error::{Error, Result};
use crate::spectrum::{Coherence, Line, Part, Phased, SpectralKey, Spectrum};

/// Components with a smaller modulus are dropped from component lists.
pub const NEGLIGIBLE_AMPLITUDE: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Basis {
    Adiabatic,
    Sudden,
}

impl Basis {
    pub fn label(self) -> &'static str {
        match self {
            Basis::Adiabatic => "adiabatic",
            Basis::Sudden => "sudden",
        }
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Matrix element position `(i, k)` of `<Phi_i| d |Phi_k>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Element {
    #[serde(rename = "11")]
    D11,
    #[serde(rename = "12")]
    D12,
    #[serde(rename = "21")]
    D21,
    #[serde(rename = "22")]
    D22,
}

impl Element {
    pub const ALL: [Element; 4] = [Element::D11, Element::D12, Element::D21, Element::D22];

    pub fn indices(self) -> (usize, usize) {
        match self {
            Element::D11 => (0, 0),
            Element::D12 => (0, 1),
            Element::D21 => (1, 0),
            Element::D22 => (1, 1),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Element::D11 => "11",
            Element::D12 => "12",
            Element::D21 => "21",
            Element::D22 => "22",
        }
    }

    pub fn is_diagonal(self) -> bool {
        matches!(self, Element::D11 | Element::D22)
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// One spectral term of a dressed dipole matrix element.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DipoleComponent {
    pub element: Element,
    pub basis: Basis,
    pub key: SpectralKey,
    /// Signed frequency `nu` of `e^{-i nu t}`; positive for the emission part.
    pub freq: f64,
    /// Amplitude in units of `|d|`.
    pub amp: Complex64,
    pub phase_exponent: i32,
    pub coherence: Coherence,
}

/// Flat serialization row for component lists.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DipoleRow {
    pub element: String,
    pub basis: String,
    pub freq: f64,
    pub re_amp: f64,
    pub im_amp: f64,
    pub phase_exponent: i32,
    pub coherence: String,
}

impl From<&DipoleComponent> for DipoleRow {
    fn from(c: &DipoleComponent) -> Self {
        DipoleRow {
            element: c.element.label().to_owned(),
            basis: c.basis.label().to_owned(),
            freq: c.freq,
            re_amp: c.amp.re,
            im_amp: c.amp.im,
            phase_exponent: c.phase_exponent,
            coherence: c.coherence.label().to_owned(),
        }
    }
}

/// Coherence class of a component, read off its random-phase exponent.
pub fn classify_coherence(component: &DipoleComponent) -> Coherence {
    Coherence::from_phase_exponent(component.phase_exponent)
}

/// The 2x2 matrix of dipole spectra in one basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DressedDipoles {
    pub basis: Basis,
    elements: [[Spectrum; 2]; 2],
}

impl DressedDipoles {
    fn from_upper(basis: Basis, d11: Spectrum, d12: Spectrum) -> Self {
        let d21 = d12.conj();
        let d22 = d11.neg();
        Self {
            basis,
            elements: [[d11, d12], [d21, d22]],
        }
    }

    pub fn element(&self, e: Element) -> &Spectrum {
        let (i, k) = e.indices();
        &self.elements[i][k]
    }

    /// Amplitude of one term, zero when absent.
    pub fn amplitude(&self, e: Element, key: SpectralKey) -> Phased {
        self.element(e).get(key).unwrap_or_else(Phased::zero)
    }

    pub fn modulus(&self, e: Element, key: SpectralKey) -> f64 {
        self.element(e).modulus(key)
    }

    /// Squared Frobenius norm of the 2x2 matrix restricted to one spectral slot.
    pub fn frobenius_sq(&self, key: SpectralKey) -> f64 {
        Element::ALL
            .iter()
            .map(|&e| self.modulus(e, key).powi(2))
            .sum()
    }

    /// Flat component list, negligible terms dropped, in element then spectral order.
    pub fn components(&self, params: &DressedParams) -> Vec<DipoleComponent> {
        let mut out = Vec::new();
        for e in Element::ALL {
            for (key, amp) in self.element(e).iter() {
                if amp.norm() < NEGLIGIBLE_AMPLITUDE {
                    continue;
                }
                out.push(DipoleComponent {
                    element: e,
                    basis: self.basis,
                    key,
                    freq: key.signed_frequency(params.carrier, params.omega_rabi),
                    amp: amp.value,
                    phase_exponent: amp.phase_exponent,
                    coherence: Coherence::from_phase_exponent(amp.phase_exponent),
                });
            }
        }
        out
    }
}

fn d12(p: &DressedParams) -> Phased {
    Phased::new(Complex64::from_polar(1.0, -p.atom_phase), -1)
}

fn d21(p: &DressedParams) -> Phased {
    d12(p).conj()
}

/// `e^{i n phi0}`; `phi0` carries one power of the random phase.
fn e_phi0(p: &DressedParams, n: i32) -> Phased {
    Phased::new(Complex64::from_polar(1.0, f64::from(n) * p.phi0), n)
}

/// `amp e^{-i nu t} + c.c.` for the slot `key`.
fn real_signal(key: SpectralKey, amp: Phased) -> Spectrum {
    Spectrum::new().with(key, amp).with(key.conj(), amp.conj())
}

/// Exact dipole spectra in the adiabatic basis.
pub fn adiabatic_dipoles(p: &DressedParams) -> DressedDipoles {
    let v_over_omega = Phased::new(p.v() / p.omega_rabi, 1);
    let d11 = real_signal(
        SpectralKey::emission(Line::Carrier),
        -(v_over_omega * d12(p)),
    );
    let c2_sq = Phased::new(p.c2 * p.c2, -2);
    let d12_spec = Spectrum::new()
        .with(SpectralKey::emission(Line::Upper), d12(p).scale(p.c1_sq))
        .with(SpectralKey::absorption(Line::Lower), -(c2_sq * d21(p)));
    DressedDipoles::from_upper(Basis::Adiabatic, d11, d12_spec)
}

/// Basis-change matrix with random-phase bookkeeping.
fn transform_phased(p: &DressedParams) -> [[Phased; 2]; 2] {
    let c1 = Phased::real(p.c1);
    let c2 = Phased::new(p.c2, -1);
    [[c1, c2.conj()], [-c2, c1]]
}

/// Exact sudden-basis spectra, `D'_ik = sum_ab conj(U_ia) U_kb D_ab`.
pub fn sudden_dipoles_exact(p: &DressedParams) -> DressedDipoles {
    let adiabatic = adiabatic_dipoles(p);
    let u = transform_phased(p);
    let mut elements: [[Spectrum; 2]; 2] = Default::default();
    for (i, row) in elements.iter_mut().enumerate() {
        for (k, slot) in row.iter_mut().enumerate() {
            let mut acc = Spectrum::new();
            for (a, adiabatic_row) in adiabatic.elements.iter().enumerate() {
                for (b, d_ab) in adiabatic_row.iter().enumerate() {
                    acc = acc.sum(&d_ab.scaled(u[i][a].conj() * u[k][b]));
                }
            }
            *slot = acc;
        }
    }
    DressedDipoles {
        basis: Basis::Sudden,
        elements,
    }
}

/// Which truncated expansion to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    SmallAlpha,
    LargeAlpha,
}

impl Regime {
    /// The branch a given alpha belongs to (`alpha < 1` is small).
    pub fn for_alpha(alpha: f64) -> Regime {
        if alpha < 1.0 {
            Regime::SmallAlpha
        } else {
            Regime::LargeAlpha
        }
    }

    /// Returns a message when alpha lies where this expansion is not controlled.
    pub fn warning(self, alpha: f64) -> Option<String> {
        if (0.5..=2.0).contains(&alpha) {
            return Some(format!(
                "alpha = {alpha} lies in [0.5, 2] where neither expansion is controlled"
            ));
        }
        match self {
            Regime::SmallAlpha if alpha > 2.0 => {
                Some(format!("small-alpha expansion used at alpha = {alpha}"))
            }
            Regime::LargeAlpha if alpha < 0.5 => {
                Some(format!("large-alpha expansion used at alpha = {alpha}"))
            }
            _ => None,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Regime::SmallAlpha => "small_alpha",
            Regime::LargeAlpha => "large_alpha",
        }
    }
}

/// Truncated adiabatic-basis spectra.
///
/// Small alpha keeps `D11 ~ (alpha/2)(1 - alpha^2/2)` and sideband weights
/// `alpha^2/4`, `1 - alpha^2/4` (exchanged for negative detuning). Large alpha
/// keeps `D11 ~ (1/2)(1 - 1/(2 alpha^2))` and sideband weights `(1 +- s/alpha)/2`.
pub fn adiabatic_dipoles_asymptotic(p: &DressedParams, regime: Regime) -> DressedDipoles {
    let s = p.sign_delta();
    let (d11, d12_spec) = match regime {
        Regime::SmallAlpha => {
            let a = p.alpha.value();
            let rayleigh = e_phi0(p, 1) * d12(p);
            let d11 = real_signal(
                SpectralKey::emission(Line::Carrier),
                rayleigh.scale(0.5 * a * (1.0 - 0.5 * a * a)),
            );
            let (upper, lower) = if s > 0.0 {
                (1.0 - 0.25 * a * a, 0.25 * a * a)
            } else {
                (0.25 * a * a, 1.0 - 0.25 * a * a)
            };
            let d12_spec = Spectrum::new()
                .with(SpectralKey::emission(Line::Upper), d12(p).scale(upper))
                .with(
                    SpectralKey::absorption(Line::Lower),
                    (d21(p) * e_phi0(p, -2)).scale(-lower),
                );
            (d11, d12_spec)
        }
        Regime::LargeAlpha => {
            let r = p.alpha.recip();
            let d11 = real_signal(
                SpectralKey::absorption(Line::Carrier),
                (e_phi0(p, -1) * d21(p)).scale(-0.5 * (1.0 - 0.5 * r * r)),
            );
            let d12_spec = Spectrum::new()
                .with(
                    SpectralKey::emission(Line::Upper),
                    d12(p).scale(0.5 * (1.0 + s * r)),
                )
                .with(
                    SpectralKey::absorption(Line::Lower),
                    (d21(p) * e_phi0(p, -2)).scale(-0.5 * (1.0 - s * r)),
                );
            (d11, d12_spec)
        }
    };
    DressedDipoles::from_upper(Basis::Adiabatic, d11, d12_spec)
}

/// Truncated sudden-basis spectra, assembled from the truncated adiabatic ones.
///
/// Small alpha:
/// ```text
/// D'11 = s D11 - ((alpha/2) e^{i phi0} D21 + c.c.)
/// D'12 = k+ D12 - e^{-2i phi0} k- D21 + alpha e^{-i phi0} D11
/// ```
/// with `(k+, k-) = (1 - alpha^2/4, alpha^2/4)` for positive detuning and
/// exchanged for negative detuning. Large alpha:
/// ```text
/// D'11 = (s/alpha) D11 - (1/2)(e^{i phi0} D12 + c.c.)
/// D'12 = (1/2)(1 + s/alpha) D12 - (1/2) e^{-2i phi0} (1 - s/alpha) D21 + e^{-i phi0} D11
/// ```
pub fn sudden_dipoles_asymptotic(p: &DressedParams, regime: Regime) -> DressedDipoles {
    let base = adiabatic_dipoles_asymptotic(p, regime);
    let d11 = base.element(Element::D11);
    let d12_spec = base.element(Element::D12);
    let d21_spec = base.element(Element::D21);
    let s = p.sign_delta();
    let (diag, off) = match regime {
        Regime::SmallAlpha => {
            let a = p.alpha.value();
            let cross = d21_spec.scaled(e_phi0(p, 1).scale(0.5 * a));
            let diag = d11
                .scaled(Phased::real(s))
                .sum(&cross.sum(&cross.conj()).neg());
            let (k_plus, k_minus) = if s > 0.0 {
                (1.0 - 0.25 * a * a, 0.25 * a * a)
            } else {
                (0.25 * a * a, 1.0 - 0.25 * a * a)
            };
            let off = d12_spec
                .scaled(Phased::real(k_plus))
                .sum(&d21_spec.scaled(e_phi0(p, -2).scale(-k_minus)))
                .sum(&d11.scaled(e_phi0(p, -1).scale(a)));
            (diag, off)
        }
        Regime::LargeAlpha => {
            let r = p.alpha.recip();
            let cross = d12_spec.scaled(e_phi0(p, 1).scale(0.5));
            let diag = d11
                .scaled(Phased::real(s * r))
                .sum(&cross.sum(&cross.conj()).neg());
            let off = d12_spec
                .scaled(Phased::real(0.5 * (1.0 + s * r)))
                .sum(&d21_spec.scaled(e_phi0(p, -2).scale(-0.5 * (1.0 - s * r))))
                .sum(&d11.scaled(e_phi0(p, -1)));
            (diag, off)
        }
    };
    DressedDipoles::from_upper(Basis::Sudden, diag, off)
}

/// Verdict of the two-draw random-phase test for one component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoDrawVerdict {
    pub element: Element,
    pub key: SpectralKey,
    pub by_exponent: Coherence,
    pub by_draws: Coherence,
}

impl TwoDrawVerdict {
    pub fn agrees(&self) -> bool {
        self.by_exponent == self.by_draws
    }
}

/// Independent coherence check: rebuild the spectra for two draws of the
/// atomic phases `(phi1, phi2)` and call a term coherent when its amplitude
/// does not move.
///
/// The draws must differ in `phi1 - phi2` so that `e^{i m theta}` moves for
/// every `|m| <= 4`.
pub fn two_draw_check<F>(
    cfg: &SystemConfig,
    build: F,
    draws: [(f64, f64); 2],
) -> Result<Vec<TwoDrawVerdict>>
where
    F: Fn(&DressedParams) -> DressedDipoles,
{
    let shift = (draws[0].0 - draws[0].1) - (draws[1].0 - draws[1].1);
    for m in 1..=4 {
        let moved = (Complex64::from_polar(1.0, f64::from(m) * shift) - 1.0).norm();
        if moved < 1e-6 {
            return Err(Error::InvalidConfig(format!(
                "phase draws too close: e^(i {m} theta) does not move"
            )));
        }
    }
    let pa = derive_params(&cfg.with_phases(cfg.phi_field, draws[0].0, draws[0].1))?;
    let pb = derive_params(&cfg.with_phases(cfg.phi_field, draws[1].0, draws[1].1))?;
    let (da, db) = (build(&pa), build(&pb));

    let mut out = Vec::new();
    for e in Element::ALL {
        for (key, amp_a) in da.element(e).iter() {
            if amp_a.norm() < NEGLIGIBLE_AMPLITUDE {
                continue;
            }
            let amp_b = db.amplitude(e, key);
            let scale = amp_a.norm().max(amp_b.norm());
            let by_draws = if (amp_a.value - amp_b.value).norm() <= 1e-10 * scale {
                Coherence::Coherent
            } else {
                Coherence::Noncoherent
            };
            out.push(TwoDrawVerdict {
                element: e,
                key,
                by_exponent: Coherence::from_phase_exponent(amp_a.phase_exponent),
                by_draws,
            });
        }
    }
    Ok(out)
}

/// Which part of the spectrum a signed frequency belongs to.
pub fn part_of(freq: f64) -> Part {
    if freq >= 0.0 {
        Part::Emission
    } else {
        Part::Absorption
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn params(delta: f64, alpha: f64) -> DressedParams {
        derive_params(&SystemConfig::from_alpha(100.0, delta, alpha).with_phases(0.4, 1.3, -0.2))
            .unwrap()
    }

    const CARRIER_E: SpectralKey = SpectralKey::emission(Line::Carrier);
    const UPPER_E: SpectralKey = SpectralKey::emission(Line::Upper);
    const UPPER_A: SpectralKey = SpectralKey::absorption(Line::Upper);
    const LOWER_E: SpectralKey = SpectralKey::emission(Line::Lower);
    const LOWER_A: SpectralKey = SpectralKey::absorption(Line::Lower);

    #[test]
    fn free_atom_dipole_recovered() {
        let p = params(1.0, 0.0);
        let d = adiabatic_dipoles(&p);
        let comps = d.components(&p);
        assert!(comps.iter().all(|c| c.element != Element::D11));
        let d12: Vec<_> = comps.iter().filter(|c| c.element == Element::D12).collect();
        assert_eq!(d12.len(), 1);
        assert_eq!(d12[0].key, UPPER_E);
        assert_abs_diff_eq!(d12[0].amp.norm(), 1.0, epsilon = 1e-15);
        // omega + Omega = E21 for a free atom
        assert_abs_diff_eq!(d12[0].freq, 101.0, epsilon = 1e-12);
    }

    #[test]
    fn adiabatic_alpha_one() {
        let d = adiabatic_dipoles(&params(1.0, 1.0));
        assert_abs_diff_eq!(
            d.modulus(Element::D11, CARRIER_E),
            0.353_553_4,
            epsilon = 1e-7
        );
        assert_abs_diff_eq!(
            d.modulus(Element::D12, LOWER_A),
            0.146_446_6,
            epsilon = 1e-7
        );
        assert_abs_diff_eq!(
            d.modulus(Element::D12, UPPER_E),
            0.853_553_4,
            epsilon = 1e-7
        );
    }

    #[test]
    fn adiabatic_small_alpha_sideband() {
        let d = adiabatic_dipoles(&params(1.0, 0.1));
        let exact = d.modulus(Element::D12, LOWER_A);
        assert_abs_diff_eq!(exact, 0.002_481_4, epsilon = 1e-7);
        let rel = (0.0025 - exact) / exact;
        assert!((rel - 0.0075).abs() < 5e-4, "rel = {rel}");
    }

    #[test]
    fn adiabatic_element_structure() {
        let p = params(-0.8, 2.3);
        let d = adiabatic_dipoles(&p);
        assert_eq!(d.element(Element::D11).iter().count(), 2);
        assert_abs_diff_eq!(
            d.modulus(Element::D11, CARRIER_E),
            p.v_mag / p.omega_rabi,
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(d.modulus(Element::D12, LOWER_A), p.c2_sq, epsilon = 1e-14);
        assert_abs_diff_eq!(d.modulus(Element::D12, UPPER_E), p.c1_sq, epsilon = 1e-14);
        for c in d.components(&p) {
            let expect = if c.element.is_diagonal() {
                Coherence::Coherent
            } else {
                Coherence::Noncoherent
            };
            assert_eq!(classify_coherence(&c), expect, "{c:?}");
        }
    }

    #[test]
    fn sudden_free_atom_is_identity() {
        let p = params(1.0, 0.0);
        assert_eq!(
            sudden_dipoles_exact(&p).components(&p).len(),
            adiabatic_dipoles(&p).components(&p).len()
        );
        let (a, s) = (adiabatic_dipoles(&p), sudden_dipoles_exact(&p));
        for e in Element::ALL {
            for key in SpectralKey::all() {
                let diff = (a.amplitude(e, key).value - s.amplitude(e, key).value).norm();
                assert!(diff < 1e-15);
            }
        }
    }

    #[test]
    fn sudden_cross_term_against_expansion() {
        let p = params(1.0, 0.2);
        let s = sudden_dipoles_exact(&p);
        // D'11 term at -(omega+Omega) against (alpha/2)(1 + Delta/Omega)/2
        let predicted = 0.1 * (1.0 + p.delta_over_omega()) / 2.0;
        let got = s.modulus(Element::D11, UPPER_A);
        assert!(((got - predicted) / predicted).abs() < 0.03);
    }

    #[test]
    fn sudden_hermiticity_and_antisymmetry() {
        let p = params(-1.3, 0.7);
        let s = sudden_dipoles_exact(&p);
        for key in SpectralKey::all() {
            let d12 = s.amplitude(Element::D12, key).value;
            let d21 = s.amplitude(Element::D21, key.conj()).value;
            assert!((d12 - d21.conj()).norm() < 1e-12);
            let d11 = s.amplitude(Element::D11, key).value;
            let d22 = s.amplitude(Element::D22, key).value;
            assert!((d11 + d22).norm() < 1e-12);
            let d11c = s.amplitude(Element::D11, key.conj()).value;
            assert!((d11 - d11c.conj()).norm() < 1e-12);
        }
    }

    #[test]
    fn asymptotic_small_alpha_values() {
        let p = params(1.0, 0.1);
        let a = sudden_dipoles_asymptotic(&p, Regime::SmallAlpha);
        assert_abs_diff_eq!(
            a.modulus(Element::D12, UPPER_E),
            0.9975 * 0.9975,
            epsilon = 1e-12
        );
        // coefficient of D12 in D'12
        let d12 = adiabatic_dipoles_asymptotic(&p, Regime::SmallAlpha);
        let ratio = a.modulus(Element::D12, UPPER_E) / d12.modulus(Element::D12, UPPER_E);
        assert_abs_diff_eq!(ratio, 0.9975, epsilon = 1e-12);
    }

    #[test]
    fn asymptotic_large_alpha_values() {
        let p = params(1.0, 10.0);
        let a = sudden_dipoles_asymptotic(&p, Regime::LargeAlpha);
        assert_abs_diff_eq!(
            a.modulus(Element::D11, CARRIER_E),
            0.049_75,
            epsilon = 1e-12
        );
        let base = adiabatic_dipoles_asymptotic(&p, Regime::LargeAlpha);
        assert_abs_diff_eq!(base.modulus(Element::D12, UPPER_E), 0.55, epsilon = 1e-12);
        assert_abs_diff_eq!(base.modulus(Element::D12, LOWER_A), 0.45, epsilon = 1e-12);
        // D'12 = 0.55 D12 - ... : upper emission 0.55 * 0.55
        assert_abs_diff_eq!(
            a.modulus(Element::D12, UPPER_E),
            0.55 * 0.55,
            epsilon = 1e-12
        );
    }

    #[test]
    fn sudden_new_phenomena() {
        let p = params(1.0, 0.6);
        let s = sudden_dipoles_exact(&p);
        let comps = s.components(&p);
        assert!(comps
            .iter()
            .any(|c| c.key.line == Line::Carrier && c.coherence == Coherence::Noncoherent));
        assert!(comps
            .iter()
            .any(|c| c.key.line != Line::Carrier && c.coherence == Coherence::Coherent));
        let a = adiabatic_dipoles(&p).components(&p);
        assert!(!a
            .iter()
            .any(|c| c.key.line == Line::Carrier && c.coherence == Coherence::Noncoherent));
        assert!(!a
            .iter()
            .any(|c| c.key.line != Line::Carrier && c.coherence == Coherence::Coherent));
    }

    #[test]
    fn sudden_d12_rayleigh_term_is_noncoherent() {
        let p = params(1.0, 0.1);
        let s = sudden_dipoles_exact(&p);
        let amp = s.amplitude(Element::D12, CARRIER_E);
        assert_eq!(amp.phase_exponent, -1);
        let cfg = SystemConfig::from_alpha(100.0, 1.0, 0.1);
        let verdicts =
            two_draw_check(&cfg, sudden_dipoles_exact, [(0.3, 1.9), (2.2, -0.4)]).unwrap();
        let v = verdicts
            .iter()
            .find(|v| v.element == Element::D12 && v.key == CARRIER_E)
            .unwrap();
        assert_eq!(v.by_draws, Coherence::Noncoherent);
        assert!(verdicts.iter().all(TwoDrawVerdict::agrees));
    }

    #[test]
    fn lower_emission_present_in_d21() {
        let p = params(1.0, 0.5);
        let d = adiabatic_dipoles(&p);
        assert!(d.modulus(Element::D21, LOWER_E) > 0.0);
        assert_eq!(d.modulus(Element::D21, LOWER_A), 0.0);
    }

    #[test]
    fn two_draw_rejects_degenerate_draws() {
        let cfg = SystemConfig::from_alpha(100.0, 1.0, 0.5);
        let r = two_draw_check(&cfg, adiabatic_dipoles, [(0.0, 0.0), (1.0, 1.0)]);
        assert!(r.is_err());
    }

    #[test]
    fn regime_warnings() {
        assert!(Regime::SmallAlpha.warning(0.1).is_none());
        assert!(Regime::SmallAlpha.warning(1.0).is_some());
        assert!(Regime::LargeAlpha.warning(0.1).is_some());
        assert!(Regime::LargeAlpha.warning(10.0).is_none());
    }
}
