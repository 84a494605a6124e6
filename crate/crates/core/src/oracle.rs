//! Time-domain check of the dressed dipole spectra.
//!
//! The rotating-frame amplitudes `(a1, a2)` of `Psi = a1 u1 + a2 u2 e^{-i omega t}`
//! obey `i da/dt = H(t) a` with
//!
//! ```text
//! H(t) = [[0, V* f(t)], [V f(t), Delta]]
//! ```
//!
//! where `f` is the switching envelope. The lab-frame dipole expectation is
//! `a1* a2 d12 e^{-i omega t} + c.c.`; once the switch is complete, `a1* a2`
//! is a sum of `e^{0}`, `e^{+i Omega t}` and `e^{-i Omega t}` whose
//! coefficients are the emission amplitudes at `omega`, `omega - Omega` and
//! `omega + Omega`. Propagating both bare initial states and forming the
//! cross element recovers the off-diagonal dressed dipoles.
//!
//! Integration uses the Dormand-Prince 5(4) embedded pair. The local error
//! is controlled per unit step in the max norm,
//! `|err_i| <= tol (h / T) (1 + max(|y_i|, |y_i'|))` with `T` the integration
//! span, so the errors committed over the whole run sum to at most `tol`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dipoles::{Basis, DressedDipoles, Element};
use crate::dressed::{derive_params, DressedParams, SystemConfig};
use crate::error::{Error, Result};
use crate::numeric::golden_section_min;
use crate::spectrum::{Line, Part, SpectralKey};

/// Fits with a larger design-matrix condition number are rejected.
pub const MAX_FIT_CONDITION: f64 = 1e8;

/// Smallest and largest accepted integration tolerance.
pub const TOL_RANGE: (f64, f64) = (1e-12, 1e-6);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    /// `(1 + tanh((t - t_on)/tau)) / 2`
    Tanh,
    /// `1 - e^{-(t - t_on)/tau}` for `t >= t_on`
    Exponential,
    /// Unit step at `t_on`
    Step,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SwitchingProfile {
    pub kind: ProfileKind,
    pub tau: f64,
    pub t_on: f64,
}

impl SwitchingProfile {
    pub fn tanh(tau: f64) -> Self {
        Self {
            kind: ProfileKind::Tanh,
            tau,
            t_on: 0.0,
        }
    }

    pub fn exponential(tau: f64) -> Self {
        Self {
            kind: ProfileKind::Exponential,
            tau,
            t_on: 0.0,
        }
    }

    pub fn step() -> Self {
        Self {
            kind: ProfileKind::Step,
            tau: 0.0,
            t_on: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.t_on.is_finite() {
            return Err(Error::InvalidConfig("switch time must be finite".into()));
        }
        if self.kind != ProfileKind::Step && !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "rise time must be positive for smooth profiles, got {}",
                self.tau
            )));
        }
        Ok(())
    }

    pub fn envelope(&self, t: f64) -> f64 {
        let x = t - self.t_on;
        match self.kind {
            ProfileKind::Tanh => 0.5 * (1.0 + (x / self.tau).tanh()),
            ProfileKind::Exponential => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-x / self.tau).exp_m1()
                }
            }
            ProfileKind::Step => {
                if x >= 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Where integration starts; the field is below `4e-11` of its final value there.
    pub fn start_time(&self) -> f64 {
        match self.kind {
            ProfileKind::Tanh => self.t_on - 12.0 * self.tau,
            ProfileKind::Exponential | ProfileKind::Step => self.t_on,
        }
    }

    /// Past this time the envelope differs from one by less than `5e-9`.
    pub fn completion_time(&self) -> f64 {
        match self.kind {
            ProfileKind::Tanh => self.t_on + 10.0 * self.tau,
            ProfileKind::Exponential => self.t_on + 20.0 * self.tau,
            ProfileKind::Step => self.t_on,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    Psi1,
    Psi2,
    Custom([Complex64; 2]),
}

impl InitialState {
    fn vector(self) -> [Complex64; 2] {
        let (one, zero) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        match self {
            InitialState::Psi1 => [one, zero],
            InitialState::Psi2 => [zero, one],
            InitialState::Custom(v) => v,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sample {
    pub t: f64,
    pub a1: Complex64,
    pub a2: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    /// Largest `| |a|^2 - |a(t0)|^2 |` seen at any accepted step.
    pub max_norm_drift: f64,
    pub steps: usize,
    pub rejected: usize,
}

/// What to integrate and where to record it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Propagation {
    pub profile: SwitchingProfile,
    pub initial: InitialState,
    pub t_end: f64,
    pub tol: f64,
    /// Samples are taken at `sample_from + k sample_dt` up to `t_end`.
    pub sample_from: f64,
    pub sample_dt: f64,
}

impl Propagation {
    pub fn validate(&self) -> Result<()> {
        self.profile.validate()?;
        if !(self.tol >= TOL_RANGE.0 && self.tol <= TOL_RANGE.1) {
            return Err(Error::InvalidConfig(format!(
                "tolerance must lie in [1e-12, 1e-6], got {}",
                self.tol
            )));
        }
        let t0 = self.profile.start_time();
        if !(self.t_end > t0) || !self.t_end.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "end time {} must exceed start time {t0}",
                self.t_end
            )));
        }
        if !(self.sample_dt > 0.0) || !(self.sample_from >= t0 && self.sample_from <= self.t_end) {
            return Err(Error::InvalidConfig(
                "sampling must start inside the integration interval with a positive spacing"
                    .into(),
            ));
        }
        Ok(())
    }
}

type State = [Complex64; 2];

fn rhs(p: &DressedParams, profile: &SwitchingProfile, t: f64, a: &State) -> State {
    let f = profile.envelope(t);
    let v = p.v() * f;
    let mi = Complex64::new(0.0, -1.0);
    [mi * (v.conj() * a[1]), mi * (v * a[0] + p.delta * a[1])]
}

fn axpy(y: &State, h: f64, terms: &[(f64, &State)]) -> State {
    let mut out = *y;
    for (c, k) in terms {
        if *c != 0.0 {
            out[0] += k[0] * (h * c);
            out[1] += k[1] * (h * c);
        }
    }
    out
}

fn norm_sq(a: &State) -> f64 {
    a[0].norm_sqr() + a[1].norm_sqr()
}

// Dormand-Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A21: f64 = 1.0 / 5.0;
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [
    19372.0 / 6561.0,
    -25360.0 / 2187.0,
    64448.0 / 6561.0,
    -212.0 / 729.0,
];
const A6: [f64; 5] = [
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
];
const B: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B_LOW: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// One trial step; returns the fifth-order solution, the error estimate and
/// the derivative at the new point.
fn dp_step(
    p: &DressedParams,
    profile: &SwitchingProfile,
    t: f64,
    y: &State,
    k1: &State,
    h: f64,
) -> (State, f64, State) {
    let k2 = rhs(p, profile, t + C[1] * h, &axpy(y, h, &[(A21, k1)]));
    let k3 = rhs(
        p,
        profile,
        t + C[2] * h,
        &axpy(y, h, &[(A3[0], k1), (A3[1], &k2)]),
    );
    let k4 = rhs(
        p,
        profile,
        t + C[3] * h,
        &axpy(y, h, &[(A4[0], k1), (A4[1], &k2), (A4[2], &k3)]),
    );
    let k5 = rhs(
        p,
        profile,
        t + C[4] * h,
        &axpy(
            y,
            h,
            &[(A5[0], k1), (A5[1], &k2), (A5[2], &k3), (A5[3], &k4)],
        ),
    );
    let k6 = rhs(
        p,
        profile,
        t + C[5] * h,
        &axpy(
            y,
            h,
            &[
                (A6[0], k1),
                (A6[1], &k2),
                (A6[2], &k3),
                (A6[3], &k4),
                (A6[4], &k5),
            ],
        ),
    );
    let y_new = axpy(
        y,
        h,
        &[
            (B[0], k1),
            (B[2], &k3),
            (B[3], &k4),
            (B[4], &k5),
            (B[5], &k6),
        ],
    );
    let k7 = rhs(p, profile, t + h, &y_new);
    let ks = [k1, &k2, &k3, &k4, &k5, &k6, &k7];
    let mut err = 0.0f64;
    for i in 0..2 {
        let e: Complex64 = ks
            .iter()
            .zip(B.iter().zip(B_LOW.iter()))
            .map(|(k, (b, bl))| k[i] * (h * (b - bl)))
            .sum();
        err = err.max(e.norm() / (1.0 + y[i].norm().max(y_new[i].norm())));
    }
    (y_new, err, k7)
}

/// Integrate the two-level equations for one initial state.
pub fn propagate(cfg: &SystemConfig, run: &Propagation) -> Result<Trajectory> {
    run.validate()?;
    let p = derive_params(cfg)?;
    let profile = run.profile;
    let tol = run.tol;

    let mut t = profile.start_time();
    let mut y = run.initial.vector();
    let norm0 = norm_sq(&y);
    if !(norm0 > 0.0) {
        return Err(Error::InvalidConfig("initial state must be nonzero".into()));
    }
    let mut k1 = rhs(&p, &profile, t, &y);
    let scale = p.omega_rabi.max(p.delta.abs()).max(p.v_mag);
    let mut h = if scale > 0.0 { 0.01 / scale } else { 0.01 };
    if profile.kind != ProfileKind::Step {
        h = h.min(0.1 * profile.tau);
    }

    let span = run.t_end - t;
    let mut samples = Vec::new();
    let mut next_index = 0usize;
    let sample_time = |k: usize| run.sample_from + k as f64 * run.sample_dt;
    let (mut steps, mut rejected) = (0usize, 0usize);
    let mut max_drift = 0.0f64;

    if sample_time(0) <= t {
        samples.push(Sample {
            t,
            a1: y[0],
            a2: y[1],
        });
        next_index = 1;
    }

    while t < run.t_end {
        let next_sample = sample_time(next_index);
        let on_sample = next_sample <= run.t_end;
        let target = if on_sample { next_sample } else { run.t_end };
        let hits_target = h >= target - t;
        let h_try = if hits_target { target - t } else { h };
        if h_try < 1e-14 * t.abs().max(1.0) {
            return Err(Error::Integration {
                t,
                reason: format!("step size underflow (h = {h_try:e})"),
            });
        }
        let (y_new, err_raw, k_new) = dp_step(&p, &profile, t, &y, &k1, h_try);
        let err = err_raw / (tol * h_try / span);
        if !err.is_finite() {
            return Err(Error::Integration {
                t,
                reason: "non-finite error estimate".into(),
            });
        }
        if err <= 1.0 {
            t = if hits_target { target } else { t + h_try };
            y = y_new;
            k1 = k_new;
            steps += 1;
            max_drift = max_drift.max((norm_sq(&y) - norm0).abs());
            if hits_target && on_sample {
                samples.push(Sample {
                    t,
                    a1: y[0],
                    a2: y[1],
                });
                next_index += 1;
            }
            let grow = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            // A step shortened to land on a sample point does not limit the next one.
            if !(hits_target && h_try < h) {
                h = h_try * grow;
            }
        } else {
            rejected += 1;
            h = h_try * (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
        }
    }

    Ok(Trajectory {
        samples,
        max_norm_drift: max_drift,
        steps,
        rejected,
    })
}

/// Least-squares fit of `y(t) = c0 + c+ e^{i Omega t} + c- e^{-i Omega t}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThreeToneFit {
    pub c0: Complex64,
    pub c_plus: Complex64,
    pub c_minus: Complex64,
    pub residual_rms: f64,
    pub condition: f64,
    pub omega_rabi: f64,
}

pub fn fit_three_tone(ts: &[f64], ys: &[Complex64], omega_rabi: f64) -> Result<ThreeToneFit> {
    if ts.len() != ys.len() || ts.len() < 3 {
        return Err(Error::InvalidConfig(
            "fit needs at least three samples".into(),
        ));
    }
    let n = ts.len();
    let t_ref = ts[0];
    let design = DMatrix::from_fn(n, 3, |r, c| {
        let t = ts[r] - t_ref;
        match c {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::from_polar(1.0, omega_rabi * t),
            _ => Complex64::from_polar(1.0, -omega_rabi * t),
        }
    });
    let svd = design.clone().svd(true, true);
    let sv = &svd.singular_values;
    let (smax, smin) = (sv.max(), sv.min());
    let condition = if smin > 0.0 {
        smax / smin
    } else {
        f64::INFINITY
    };
    if !(condition <= MAX_FIT_CONDITION) {
        return Err(Error::IllConditionedFit { condition });
    }
    let rhs = DVector::from_column_slice(ys);
    let coef = svd.solve(&rhs, 0.0).map_err(|e| Error::Integration {
        t: t_ref,
        reason: e.to_string(),
    })?;
    let resid = &design * &coef - &rhs;
    let residual_rms = (resid.iter().map(|r| r.norm_sqr()).sum::<f64>() / n as f64).sqrt();
    // Refer the oscillating coefficients to t = 0 rather than the window start.
    let c_plus = coef[1] * Complex64::from_polar(1.0, -omega_rabi * t_ref);
    let c_minus = coef[2] * Complex64::from_polar(1.0, omega_rabi * t_ref);
    Ok(ThreeToneFit {
        c0: coef[0],
        c_plus,
        c_minus,
        residual_rms,
        condition,
        omega_rabi,
    })
}

/// Refine `Omega` by minimizing the fit residual: a coarse scan over
/// `+-5 %` followed by golden-section search around the best scan point.
pub fn refine_omega(ts: &[f64], ys: &[Complex64], omega_guess: f64) -> Result<ThreeToneFit> {
    let resid = |w: f64| {
        fit_three_tone(ts, ys, w)
            .map(|f| f.residual_rms)
            .unwrap_or(f64::INFINITY)
    };
    let points = 201;
    let (lo, hi) = (0.95 * omega_guess, 1.05 * omega_guess);
    let step = (hi - lo) / (points - 1) as f64;
    let best = (0..points)
        .map(|i| lo + i as f64 * step)
        .map(|w| (w, resid(w)))
        .fold((omega_guess, f64::INFINITY), |acc, x| {
            if x.1 < acc.1 {
                x
            } else {
                acc
            }
        });
    let w = golden_section_min(
        resid,
        best.0 - step,
        best.0 + step,
        1e-12 * omega_guess.max(1.0),
    );
    fit_three_tone(ts, ys, w)
}

/// One extracted spectral term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleComponent {
    pub key: SpectralKey,
    pub freq: f64,
    pub amp: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleResult {
    pub components: Vec<OracleComponent>,
    pub residual: f64,
    pub condition: f64,
    pub omega_rabi_fitted: f64,
    /// Coefficients `(c0, c+, c-)` of the population inversion `|a1|^2 - |a2|^2`.
    pub inversion: [Complex64; 3],
}

impl OracleResult {
    pub fn amplitude(&self, key: SpectralKey) -> Complex64 {
        self.components
            .iter()
            .find(|c| c.key == key)
            .map_or(Complex64::new(0.0, 0.0), |c| c.amp)
    }
}

/// Samples at or after `t_from`.
fn window(traj: &Trajectory, t_from: f64) -> impl Iterator<Item = &Sample> {
    traj.samples.iter().filter(move |s| s.t >= t_from)
}

/// Diagonal expectation of the dipole from one trajectory: fits `a1* a2` over
/// the samples at or after `fit_from`.
pub fn extract_components(
    traj: &Trajectory,
    params: &DressedParams,
    fit_from: f64,
    refine: bool,
) -> Result<OracleResult> {
    let d12 = Complex64::from_polar(1.0, -params.atom_phase);
    let (ts, ys): (Vec<f64>, Vec<Complex64>) = window(traj, fit_from)
        .map(|s| (s.t, s.a1.conj() * s.a2 * d12))
        .unzip();
    let inv: Vec<Complex64> = window(traj, fit_from)
        .map(|s| Complex64::new(s.a1.norm_sqr() - s.a2.norm_sqr(), 0.0))
        .collect();
    let fit = if refine {
        refine_omega(&ts, &ys, params.omega_rabi)?
    } else {
        fit_three_tone(&ts, &ys, params.omega_rabi)?
    };
    let inv_fit = fit_three_tone(&ts, &inv, fit.omega_rabi)?;
    let emission = |line: Line, amp: Complex64| OracleComponent {
        key: SpectralKey::emission(line),
        freq: params.frequency(line),
        amp,
    };
    Ok(OracleResult {
        components: vec![
            emission(Line::Lower, fit.c_plus),
            emission(Line::Carrier, fit.c0),
            emission(Line::Upper, fit.c_minus),
        ],
        residual: fit.residual_rms,
        condition: fit.condition,
        omega_rabi_fitted: fit.omega_rabi,
        inversion: [inv_fit.c0, inv_fit.c_plus, inv_fit.c_minus],
    })
}

/// Cross element `<Psi_a| d |Psi_b>` between two trajectories on the same time grid.
pub fn extract_cross_components(
    a: &Trajectory,
    b: &Trajectory,
    params: &DressedParams,
    fit_from: f64,
    refine: bool,
) -> Result<OracleResult> {
    let d12 = Complex64::from_polar(1.0, -params.atom_phase);
    let pairs: Vec<(&Sample, &Sample)> = window(a, fit_from).zip(window(b, fit_from)).collect();
    if pairs.iter().any(|(x, y)| x.t != y.t) {
        return Err(Error::InvalidConfig(
            "trajectories are not on the same time grid".into(),
        ));
    }
    let ts: Vec<f64> = pairs.iter().map(|(x, _)| x.t).collect();
    let emit: Vec<Complex64> = pairs
        .iter()
        .map(|(x, y)| x.a1.conj() * y.a2 * d12)
        .collect();
    let absorb: Vec<Complex64> = pairs
        .iter()
        .map(|(x, y)| x.a2.conj() * y.a1 * d12.conj())
        .collect();
    let fe = if refine {
        refine_omega(&ts, &emit, params.omega_rabi)?
    } else {
        fit_three_tone(&ts, &emit, params.omega_rabi)?
    };
    let fa = fit_three_tone(&ts, &absorb, fe.omega_rabi)?;
    let comp = |line: Line, part: Part, amp: Complex64| {
        let key = SpectralKey::new(line, part);
        OracleComponent {
            key,
            freq: key.signed_frequency(params.carrier, params.omega_rabi),
            amp,
        }
    };
    // For the e^{+i omega t} part, e^{+i Omega t} lands on omega + Omega.
    Ok(OracleResult {
        components: vec![
            comp(Line::Lower, Part::Emission, fe.c_plus),
            comp(Line::Carrier, Part::Emission, fe.c0),
            comp(Line::Upper, Part::Emission, fe.c_minus),
            comp(Line::Lower, Part::Absorption, fa.c_minus),
            comp(Line::Carrier, Part::Absorption, fa.c0),
            comp(Line::Upper, Part::Absorption, fa.c_plus),
        ],
        residual: fe.residual_rms.max(fa.residual_rms),
        condition: fe.condition.max(fa.condition),
        omega_rabi_fitted: fe.omega_rabi,
        inversion: [Complex64::new(0.0, 0.0); 3],
    })
}

/// Which analytic limit a switching time corresponds to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SwitchingLimit {
    Adiabatic,
    Sudden,
    Intermediate,
}

impl SwitchingLimit {
    /// `|Delta tau| >= 50` is adiabatic, `<= 0.01` sudden.
    pub fn classify(delta_tau: f64) -> Self {
        let x = delta_tau.abs();
        if x >= 50.0 {
            SwitchingLimit::Adiabatic
        } else if x <= 0.01 {
            SwitchingLimit::Sudden
        } else {
            SwitchingLimit::Intermediate
        }
    }

    pub fn verdict(self) -> &'static str {
        match self {
            SwitchingLimit::Adiabatic => "adiabatic match",
            SwitchingLimit::Sudden => "sudden match",
            SwitchingLimit::Intermediate => "intermediate: no analytic match expected",
        }
    }
}

/// Full oracle output: the diagonal element from the `psi1` run and the
/// cross element between the `psi1` and `psi2` runs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatrixOracle {
    pub diagonal: OracleResult,
    pub cross: OracleResult,
    pub max_norm_drift: f64,
    pub fit_from: f64,
    pub t_end: f64,
}

/// Time grid for an oracle run: fit window of `periods` Rabi periods after
/// the switch has completed, sampled `per_period` times per period.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleWindow {
    pub periods: f64,
    pub per_period: usize,
}

impl Default for OracleWindow {
    fn default() -> Self {
        Self {
            periods: 24.0,
            per_period: 32,
        }
    }
}

pub fn matrix_element_oracle(
    cfg: &SystemConfig,
    profile: SwitchingProfile,
    window: OracleWindow,
    tol: f64,
) -> Result<MatrixOracle> {
    let p = derive_params(cfg)?;
    if !(window.periods >= 20.0) || window.per_period < 8 {
        return Err(Error::InvalidConfig(
            "fit window needs at least 20 Rabi periods and 8 samples per period".into(),
        ));
    }
    let period = 2.0 * PI / p.omega_rabi;
    let fit_from = profile.completion_time() + period;
    let t_end = fit_from + window.periods * period;
    let sample_dt = period / window.per_period as f64;
    let run = |initial| {
        propagate(
            cfg,
            &Propagation {
                profile,
                initial,
                t_end,
                tol,
                sample_from: fit_from,
                sample_dt,
            },
        )
    };
    let (r1, r2) = rayon::join(|| run(InitialState::Psi1), || run(InitialState::Psi2));
    let (t1, t2) = (r1?, r2?);
    let diagonal = extract_components(&t1, &p, fit_from, false)?;
    let cross = extract_cross_components(&t1, &t2, &p, fit_from, true)?;
    Ok(MatrixOracle {
        diagonal,
        cross,
        max_norm_drift: t1.max_norm_drift.max(t2.max_norm_drift),
        fit_from,
        t_end,
    })
}

/// The analytic elements an oracle run should reproduce: `(diagonal, cross)`.
///
/// After sudden switching `psi1` is `Phi'1`. After adiabatic switching `psi1`
/// follows `Phi1` for positive detuning and `Phi2` for negative detuning.
pub fn expected_elements(params: &DressedParams, basis: Basis) -> (Element, Element) {
    match basis {
        Basis::Sudden => (Element::D11, Element::D12),
        Basis::Adiabatic if params.sign_delta() > 0.0 => (Element::D11, Element::D12),
        Basis::Adiabatic => (Element::D22, Element::D21),
    }
}

/// Per-component comparison of an oracle result with an analytic element.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComponentDeviation {
    pub key: SpectralKey,
    pub oracle: f64,
    pub analytic: f64,
    /// Relative deviation of moduli, or the absolute oracle modulus when the
    /// analytic term vanishes.
    pub deviation: f64,
    pub relative: bool,
}

/// Moduli below this are treated as analytically absent.
pub const ABSENT_COMPONENT: f64 = 1e-12;

pub fn compare(
    result: &OracleResult,
    dipoles: &DressedDipoles,
    element: Element,
) -> Vec<ComponentDeviation> {
    result
        .components
        .iter()
        .map(|c| {
            let analytic = dipoles.modulus(element, c.key);
            let oracle = c.amp.norm();
            let relative = analytic > ABSENT_COMPONENT;
            let deviation = if relative {
                (oracle - analytic).abs() / analytic
            } else {
                oracle
            };
            ComponentDeviation {
                key: c.key,
                oracle,
                analytic,
                deviation,
                relative,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn envelopes_are_monotone_and_bounded() {
        for prof in [
            SwitchingProfile::tanh(0.7),
            SwitchingProfile::exponential(0.7),
            SwitchingProfile::step(),
        ] {
            let mut last = 0.0;
            for i in -200..200 {
                let f = prof.envelope(i as f64 * 0.05);
                assert!((0.0..=1.0).contains(&f));
                assert!(f >= last);
                last = f;
            }
            assert!(prof.envelope(prof.completion_time()) > 1.0 - 5e-9);
            assert!(prof.envelope(prof.start_time() - 1e-9) < 4e-11);
        }
    }

    #[test]
    fn zero_field_only_rotates_phases() {
        let cfg = SystemConfig::from_detuning(100.0, 0.8, 0.0);
        let init = [Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)];
        let traj = propagate(
            &cfg,
            &Propagation {
                profile: SwitchingProfile::step(),
                initial: InitialState::Custom(init),
                t_end: 20.0,
                tol: 1e-10,
                sample_from: 0.0,
                sample_dt: 0.5,
            },
        )
        .unwrap();
        assert_eq!(traj.samples.len(), 41);
        for s in &traj.samples {
            assert!((s.a1.norm_sqr() - 0.36).abs() < 1e-9);
            assert!((s.a2 - init[1] * Complex64::from_polar(1.0, -0.8 * s.t)).norm() < 1e-8);
        }
    }

    #[test]
    fn fit_recovers_synthetic_tones() {
        let w = 1.3;
        let ts: Vec<f64> = (0..800).map(|i| 5.0 + i as f64 * 0.05).collect();
        let (c0, cp, cm) = (
            Complex64::new(0.2, -0.1),
            Complex64::new(0.0, 0.3),
            Complex64::new(-0.05, 0.02),
        );
        let ys: Vec<Complex64> = ts
            .iter()
            .map(|&t| {
                c0 + cp * Complex64::from_polar(1.0, w * t)
                    + cm * Complex64::from_polar(1.0, -w * t)
            })
            .collect();
        let fit = refine_omega(&ts, &ys, 1.32).unwrap();
        assert!((fit.omega_rabi - w).abs() < 1e-8);
        assert!((fit.c0 - c0).norm() < 1e-8);
        assert!((fit.c_plus - cp).norm() < 1e-8);
        assert!((fit.c_minus - cm).norm() < 1e-8);
    }

    #[test]
    fn short_window_is_ill_conditioned() {
        let ts: Vec<f64> = (0..50).map(|i| i as f64 * 2e-7).collect();
        let ys = vec![Complex64::new(1.0, 0.0); 50];
        assert!(matches!(
            fit_three_tone(&ts, &ys, 1.0),
            Err(Error::IllConditionedFit { .. })
        ));
    }

    #[test]
    fn rejects_bad_tolerance() {
        let cfg = SystemConfig::from_detuning(100.0, 1.0, 0.5);
        let run = Propagation {
            profile: SwitchingProfile::step(),
            initial: InitialState::Psi1,
            t_end: 1.0,
            tol: 1e-3,
            sample_from: 0.0,
            sample_dt: 0.1,
        };
        assert!(propagate(&cfg, &run).is_err());
    }

    #[test]
    fn limit_classification() {
        assert_eq!(SwitchingLimit::classify(200.0), SwitchingLimit::Adiabatic);
        assert_eq!(SwitchingLimit::classify(-0.001), SwitchingLimit::Sudden);
        assert_eq!(SwitchingLimit::classify(1.0), SwitchingLimit::Intermediate);
    }
}
