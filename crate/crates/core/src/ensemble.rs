//! Emission from many independently dressed atoms.
//!
//! The field radiated by atoms at `r_i` into `k'` from an incident `k` is
//! `sum_i amp_i e^{i (k - k') . r_i}`. Each atom's amplitude carries its own
//! random phase `theta_i = phi1 - phi2` through `e^{i m theta_i}`, so
//! coherent terms (`m = 0`) add in amplitude and grow as `N^2`, while
//! noncoherent ones add in intensity and grow as `N`.
//!
//! Positions are fixed for a run and the phases are redrawn for every trial.
//! Trial `j` draws from ChaCha8 seeded with `seed` on stream `j`; positions
//! come from the same seed on the last stream. Trials may run in any order
//! and still give bit-identical means.

use std::f64::consts::TAU;

use nalgebra::Vector3;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dipoles::{adiabatic_dipoles, sudden_dipoles_exact, Basis, Element};
use crate::dressed::{derive_params, SystemConfig};
use crate::error::{Error, Result};
use crate::numeric::loglog_slope;
use crate::spectrum::{Line, SpectralKey};

const POSITION_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtomSite {
    pub position: Vector3<f64>,
    pub phi1: f64,
    pub phi2: f64,
}

/// One spectral term of one dressed dipole element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SelectedTerm {
    pub basis: Basis,
    pub element: Element,
    pub key: SpectralKey,
}

/// The spectral terms whose summed amplitude is radiated.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentSelector {
    pub terms: Vec<SelectedTerm>,
}

impl ComponentSelector {
    /// Adiabatic Rayleigh line, `D11` at `omega`.
    pub fn coherent() -> Self {
        Self {
            terms: vec![SelectedTerm {
                basis: Basis::Adiabatic,
                element: Element::D11,
                key: SpectralKey::emission(Line::Carrier),
            }],
        }
    }

    /// Adiabatic lower sideband, `D21` at `omega - Omega`.
    pub fn noncoherent() -> Self {
        Self {
            terms: vec![SelectedTerm {
                basis: Basis::Adiabatic,
                element: Element::D21,
                key: SpectralKey::emission(Line::Lower),
            }],
        }
    }

    /// Both of the above, added in amplitude.
    pub fn mixed() -> Self {
        let mut terms = Self::coherent().terms;
        terms.extend(Self::noncoherent().terms);
        Self { terms }
    }

    /// Per-term amplitude at zero atomic phases and its phase exponent.
    pub fn resolve(&self, template: &SystemConfig) -> Result<Vec<(Complex64, i32)>> {
        let p = derive_params(&template.with_phases(template.phi_field, 0.0, 0.0))?;
        let (adiabatic, sudden) = (adiabatic_dipoles(&p), sudden_dipoles_exact(&p));
        Ok(self
            .terms
            .iter()
            .map(|t| {
                let d = match t.basis {
                    Basis::Adiabatic => &adiabatic,
                    Basis::Sudden => &sudden,
                };
                let a = d.amplitude(t.element, t.key);
                (a.value, a.phase_exponent)
            })
            .collect())
    }
}

/// Amplitude radiated by one atom with random phase `theta = phi1 - phi2`.
pub fn atom_amplitude(resolved: &[(Complex64, i32)], theta: f64) -> Complex64 {
    resolved
        .iter()
        .map(|&(amp, m)| {
            if m == 0 {
                amp
            } else {
                amp * Complex64::from_polar(1.0, f64::from(m) * theta)
            }
        })
        .sum()
}

/// `|sum_i amp_i e^{i (k_in - k_out) . r_i}|^2` for fixed sites and phases.
pub fn configuration_intensity(
    sites: &[AtomSite],
    resolved: &[(Complex64, i32)],
    k_in: &Vector3<f64>,
    k_out: &Vector3<f64>,
) -> f64 {
    let q = k_in - k_out;
    sites
        .iter()
        .map(|s| {
            atom_amplitude(resolved, s.phi1 - s.phi2)
                * Complex64::from_polar(1.0, q.dot(&s.position))
        })
        .sum::<Complex64>()
        .norm_sqr()
}

/// Uniform positions in a cube of side `side` centred on the origin.
pub fn sample_positions(n: usize, side: f64, seed: u64) -> Vec<Vector3<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(POSITION_STREAM);
    (0..n)
        .map(|_| {
            Vector3::new(
                (rng.random::<f64>() - 0.5) * side,
                (rng.random::<f64>() - 0.5) * side,
                (rng.random::<f64>() - 0.5) * side,
            )
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnsembleStats {
    pub mean: f64,
    pub variance: f64,
    pub std_error: f64,
    pub n_trials: usize,
}

/// Monte Carlo mean intensity over fresh phase draws at fixed positions.
///
/// The phases stored in `sites` are ignored; only the positions are used.
pub fn ensemble_intensity(
    sites: &[AtomSite],
    template: &SystemConfig,
    selector: &ComponentSelector,
    k_in: &Vector3<f64>,
    k_out: &Vector3<f64>,
    n_trials: usize,
    seed: u64,
) -> Result<EnsembleStats> {
    if sites.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    if n_trials == 0 {
        return Err(Error::InvalidConfig(
            "at least one trial is required".into(),
        ));
    }
    let resolved = selector.resolve(template)?;
    let q = k_in - k_out;
    let geometry: Vec<Complex64> = sites
        .iter()
        .map(|s| Complex64::from_polar(1.0, q.dot(&s.position)))
        .collect();

    let intensities: Vec<f64> = (0..n_trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(trial as u64);
            geometry
                .iter()
                .map(|g| {
                    let phi1 = rng.random::<f64>() * TAU;
                    let phi2 = rng.random::<f64>() * TAU;
                    atom_amplitude(&resolved, phi1 - phi2) * g
                })
                .sum::<Complex64>()
                .norm_sqr()
        })
        .collect();

    let n = n_trials as f64;
    let mean = intensities.iter().sum::<f64>() / n;
    let variance = if n_trials > 1 {
        intensities.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    Ok(EnsembleStats {
        mean,
        variance,
        std_error: (variance / n).sqrt(),
        n_trials,
    })
}

/// Parameters of an intensity-versus-N study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingSpec {
    pub n_grid: Vec<usize>,
    /// Side of the cube holding the atoms, in units of `1/k`.
    pub side: f64,
    pub k_in: Vector3<f64>,
    pub k_out: Vector3<f64>,
    pub n_trials: usize,
    pub seed: u64,
}

impl ScalingSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_grid.len() < 4 {
            return Err(Error::InvalidConfig(
                "scaling grid needs at least 4 sizes".into(),
            ));
        }
        let (lo, hi) = (
            *self.n_grid.iter().min().unwrap_or(&0),
            *self.n_grid.iter().max().unwrap_or(&0),
        );
        if lo == 0 {
            return Err(Error::EmptyEnsemble);
        }
        if (hi as f64) < 100.0 * lo as f64 {
            return Err(Error::InvalidConfig(
                "scaling grid must span at least two decades".into(),
            ));
        }
        if !(self.side >= 0.0) || !self.side.is_finite() {
            return Err(Error::InvalidConfig(
                "cube side must be finite and non-negative".into(),
            ));
        }
        if self.n_trials == 0 {
            return Err(Error::InvalidConfig(
                "at least one trial is required".into(),
            ));
        }
        Ok(())
    }

    /// Cosine of the angle between incident and scattered directions.
    pub fn direction_cos(&self) -> f64 {
        let d = self.k_in.norm() * self.k_out.norm();
        if d == 0.0 {
            1.0
        } else {
            self.k_in.dot(&self.k_out) / d
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingPoint {
    pub n_atoms: usize,
    pub direction_cos: f64,
    pub mean_intensity: f64,
    pub std_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingStudy {
    pub points: Vec<ScalingPoint>,
    pub exponent: f64,
}

/// Log-log slope of mean intensity against atom number.
pub fn scaling_exponent(points: &[ScalingPoint]) -> f64 {
    let xs: Vec<f64> = points.iter().map(|p| p.n_atoms as f64).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.mean_intensity).collect();
    loglog_slope(&xs, &ys).unwrap_or(f64::NAN)
}

pub fn scaling_study(
    template: &SystemConfig,
    selector: &ComponentSelector,
    spec: &ScalingSpec,
) -> Result<ScalingStudy> {
    spec.validate()?;
    let mut points = Vec::with_capacity(spec.n_grid.len());
    for &n in &spec.n_grid {
        let sites: Vec<AtomSite> = sample_positions(n, spec.side, spec.seed)
            .into_iter()
            .map(|position| AtomSite {
                position,
                phi1: 0.0,
                phi2: 0.0,
            })
            .collect();
        let stats = ensemble_intensity(
            &sites,
            template,
            selector,
            &spec.k_in,
            &spec.k_out,
            spec.n_trials,
            spec.seed,
        )?;
        points.push(ScalingPoint {
            n_atoms: n,
            direction_cos: spec.direction_cos(),
            mean_intensity: stats.mean,
            std_error: stats.std_error,
        });
    }
    let exponent = scaling_exponent(&points);
    Ok(ScalingStudy { points, exponent })
}
