//! One function per subcommand. Each validates its keys, computes, and
//! returns the serialized output.

use std::f64::consts::PI;

use esrad::audit::{run_audit, AuditConfig};
use esrad::ensemble::{scaling_study, ComponentSelector, ScalingSpec};
use esrad::oracle::{
    compare, expected_elements, matrix_element_oracle, propagate, InitialState, OracleWindow,
    Propagation, SwitchingLimit, SwitchingProfile,
};
use esrad::rates::{es_linewidth, rate_table, CoefficientMode, Occupations, SignCondition};
use esrad::{
    adiabatic_dipoles, derive_params, sudden_dipoles_asymptotic, sudden_dipoles_exact, Basis,
    DressedParams, Regime, SystemConfig,
};
use nalgebra::Vector3;
use serde_json::{json, Value};

use crate::config::{Check, GridSpec, KeyValues};
use crate::output::{json_bytes, num, Cell, Table};
use crate::{CliError, Format};

const SYSTEM_KEYS: [&str; 10] = [
    "omega",
    "delta",
    "alpha",
    "v",
    "e21",
    "dipole",
    "field",
    "phi_field",
    "phi1",
    "phi2",
];

const DEFAULT_OMEGA: f64 = 100.0;

/// Relative tolerance for a limit match and the leakage bound for absent terms.
const MATCH_RELATIVE: f64 = 0.02;
const MATCH_LEAKAGE: f64 = 1e-3;

fn keys(extra: &[&'static str]) -> Vec<&'static str> {
    SYSTEM_KEYS
        .iter()
        .copied()
        .chain(extra.iter().copied())
        .collect()
}

/// System from either bare parameters (`e21`, `field`, `dipole`) or the
/// detuning form (`delta` with `alpha` or `v`).
fn system(kv: &KeyValues) -> Result<SystemConfig, CliError> {
    let omega = kv.float("omega", DEFAULT_OMEGA, Check::Positive)?;
    let bare = ["e21", "field", "dipole"].iter().any(|k| kv.contains(k));
    let cfg = if bare {
        for k in ["delta", "alpha", "v"] {
            if kv.contains(k) {
                return Err(kv.invalid(k, "cannot be combined with e21/field/dipole"));
            }
        }
        let e21 = kv
            .get::<f64>("e21")?
            .ok_or_else(|| CliError::Config("key `e21` is required with field/dipole".into()))?;
        let field = kv.float("field", 0.0, Check::NonNegative)?;
        let dipole = kv.float("dipole", 1.0, Check::Positive)?;
        SystemConfig::new(e21, omega, dipole, field)
    } else {
        let delta = kv.float("delta", 1.0, Check::Finite)?;
        if kv.contains("alpha") && kv.contains("v") {
            return Err(kv.invalid("v", "give either `alpha` or `v`, not both"));
        }
        if let Some(v) = kv.get::<f64>("v")? {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(kv.invalid("v", "coupling must be finite and non-negative"));
            }
            SystemConfig::from_detuning(omega, delta, v)
        } else {
            let alpha = kv.float("alpha", 1.0, Check::NonNegative)?;
            if delta == 0.0 {
                return Err(kv.invalid(
                    "delta",
                    "alpha is infinite on resonance; set the coupling with `v`",
                ));
            }
            SystemConfig::from_alpha(omega, delta, alpha)
        }
    };
    let cfg = cfg.with_phases(
        kv.float("phi_field", 0.0, Check::Finite)?,
        kv.float("phi1", 0.0, Check::Finite)?,
        kv.float("phi2", 0.0, Check::Finite)?,
    );
    cfg.validate()?;
    if !cfg.within_model_validity() {
        eprintln!(
            "esrad: warning: |Delta|/E21 = {} exceeds the near-resonance range",
            crate::output::fmt_g(cfg.resonance_ratio())
        );
    }
    Ok(cfg)
}

fn alpha_grid(kv: &KeyValues) -> Result<Option<Vec<f64>>, CliError> {
    let Some(grid) = kv.get::<GridSpec>("alpha_grid").map_err(|_| {
        kv.invalid(
            "alpha_grid",
            "expected start:stop:points(log|lin), e.g. 0.01:100:41log",
        )
    })?
    else {
        return Ok(None);
    };
    if grid.start < 0.0 || grid.stop < 0.0 {
        return Err(kv.invalid("alpha_grid", "alpha must be non-negative"));
    }
    Ok(Some(grid.values()))
}

fn basis(kv: &KeyValues) -> Result<Basis, CliError> {
    match kv.get_str("regime").unwrap_or("adiabatic") {
        "adiabatic" => Ok(Basis::Adiabatic),
        "sudden" => Ok(Basis::Sudden),
        other => Err(kv.invalid(
            "regime",
            format!("expected adiabatic or sudden, got `{other}`"),
        )),
    }
}

fn mode(kv: &KeyValues, default: CoefficientMode) -> Result<CoefficientMode, CliError> {
    match kv.get_str("mode") {
        None => Ok(default),
        Some("exact") => Ok(CoefficientMode::Exact),
        Some("asymptotic") => Ok(CoefficientMode::Asymptotic),
        Some(other) => Err(kv.invalid(
            "mode",
            format!("expected exact or asymptotic, got `{other}`"),
        )),
    }
}

fn render(table: &Table, format: Format) -> Result<Vec<u8>, CliError> {
    match format {
        Format::Csv => Ok(table.to_csv()?),
        _ => Ok(json_bytes(&table.to_json_value())),
    }
}

fn alpha_cell(p: &DressedParams) -> Cell {
    Cell::Num(p.alpha.value())
}

pub fn params(kv: &KeyValues, format: Format) -> Result<Vec<u8>, CliError> {
    kv.check_keys("params", &keys(&["alpha_grid"]))?;
    let base = system(kv)?;
    let configs: Vec<SystemConfig> = match alpha_grid(kv)? {
        None => vec![base],
        Some(alphas) => {
            let delta = base.detuning();
            if delta == 0.0 {
                return Err(kv.invalid("alpha_grid", "an alpha sweep needs a nonzero detuning"));
            }
            alphas
                .iter()
                .map(|&a| {
                    SystemConfig::from_alpha(base.omega, delta, a).with_phases(
                        base.phi_field,
                        base.phi1,
                        base.phi2,
                    )
                })
                .collect()
        }
    };
    let mut t = Table::new(&[
        "alpha",
        "delta",
        "v_mag",
        "omega_rabi",
        "lambda1",
        "c1",
        "re_c2",
        "im_c2",
        "c1_sq",
        "c2_sq",
        "phi0",
        "lower",
        "carrier",
        "upper",
        "n2_weight",
        "resonance_ratio",
        "model_valid",
    ]);
    for cfg in &configs {
        let p = derive_params(cfg)?;
        let s = p.sidebands();
        t.push(vec![
            alpha_cell(&p),
            p.delta.into(),
            p.v_mag.into(),
            p.omega_rabi.into(),
            p.lambda1.into(),
            p.c1.into(),
            p.c2.re.into(),
            p.c2.im.into(),
            p.c1_sq.into(),
            p.c2_sq.into(),
            p.phi0.into(),
            s.lower.into(),
            s.carrier.into(),
            s.upper.into(),
            es_linewidth(&p, 1.0)?.n2_weight.into(),
            cfg.resonance_ratio().into(),
            cfg.within_model_validity().into(),
        ]);
    }
    render(&t, format)
}

pub fn fig1(kv: &KeyValues, format: Format) -> Result<Vec<u8>, CliError> {
    kv.check_keys("fig1", &["omega", "delta", "alpha_grid"])?;
    let omega = kv.float("omega", DEFAULT_OMEGA, Check::Positive)?;
    let delta = kv.float("delta", 1.0, Check::Finite)?;
    if delta == 0.0 {
        return Err(kv.invalid("delta", "the alpha axis needs a nonzero detuning"));
    }
    let alphas = alpha_grid(kv)?.unwrap_or_else(|| esrad::numeric::grid(0.01, 100.0, 41, true));
    let mut t = Table::new(&[
        "alpha",
        "lower",
        "upper",
        "small_caption_lower",
        "small_caption_upper",
        "small_caption_rel_err",
        "small_shift_gap",
        "large_caption_lower",
        "large_caption_upper",
        "large_caption_rel_err",
    ]);
    let rel = |approx: f64, exact: f64| (approx - exact).abs() / exact.abs();
    for &a in &alphas {
        let p = derive_params(&SystemConfig::from_alpha(omega, delta, a))?;
        let (lower, _, upper) = p.sideband_frequencies();
        // omega +- |Delta|(1 + alpha^2)
        let small = delta.abs() * (1.0 + a * a);
        // omega +- (|2V| + Delta/(2 alpha))
        let large = 2.0 * p.v_mag + delta / (2.0 * a);
        let (sl, su) = (omega - small, omega + small);
        let (ll, lu) = (omega - large, omega + large);
        t.push(vec![
            a.into(),
            lower.into(),
            upper.into(),
            sl.into(),
            su.into(),
            rel(sl, lower).max(rel(su, upper)).into(),
            (small - p.omega_rabi).into(),
            ll.into(),
            lu.into(),
            rel(ll, lower).max(rel(lu, upper)).into(),
        ]);
    }
    render(&t, format)
}

fn occupations(kv: &KeyValues) -> Result<Occupations, CliError> {
    let n = kv.float("n", 0.0, Check::NonNegative)?;
    let occ = Occupations {
        lower: kv.float("n_lower", n, Check::NonNegative)?,
        carrier: kv.float("n_carrier", n, Check::NonNegative)?,
        upper: kv.float("n_upper", n, Check::NonNegative)?,
    };
    occ.validate()?;
    Ok(occ)
}

fn sign_label(s: SignCondition) -> &'static str {
    match s {
        SignCondition::Any => "any",
        SignCondition::Positive => "delta>0",
        SignCondition::Negative => "delta<0",
    }
}

pub fn table(kv: &KeyValues, format: Format) -> Result<Vec<u8>, CliError> {
    kv.check_keys(
        "table",
        &keys(&["n", "n_lower", "n_carrier", "n_upper", "regime", "mode"]),
    )?;
    let cfg = system(kv)?;
    let basis = basis(kv)?;
    let mode = mode(kv, CoefficientMode::Asymptotic)?;
    let occ = occupations(kv)?;
    let p = derive_params(&cfg)?;
    let rows = rate_table(&p, basis, &occ, mode);
    let mut t = Table::new(&[
        "regime",
        "transition",
        "sign",
        "freq_label",
        "freq_value",
        "spont_coeff",
        "stim_coeff",
        "coherence",
        "validity",
        "active_flag",
        "occupation",
        "exact_coeff",
        "exact_stim_coeff",
        "direction",
    ]);
    for e in &rows {
        t.push(vec![
            format!("{}:{}", basis.label(), e.regime.label()).into(),
            e.transition.label().into(),
            sign_label(e.sign).into(),
            e.line.label().into(),
            e.freq.into(),
            e.spont_coeff.into(),
            e.stim_coeff.into(),
            e.coherence.label().into(),
            e.validity.into(),
            e.active.into(),
            e.occupation.into(),
            e.exact_coeff.into(),
            e.exact_stim_coeff.into(),
            e.direction.label().into(),
        ]);
    }
    render(&t, format)
}

pub fn dipoles(kv: &KeyValues, format: Format) -> Result<Vec<u8>, CliError> {
    kv.check_keys("dipoles", &keys(&["regime", "mode"]))?;
    let cfg = system(kv)?;
    let basis = basis(kv)?;
    let mode = mode(kv, CoefficientMode::Exact)?;
    let p = derive_params(&cfg)?;
    let d = match (basis, mode) {
        (Basis::Adiabatic, CoefficientMode::Exact) => adiabatic_dipoles(&p),
        (Basis::Sudden, CoefficientMode::Exact) => sudden_dipoles_exact(&p),
        (_, CoefficientMode::Asymptotic) => {
            let regime = Regime::for_alpha(p.alpha.value());
            if let Some(w) = regime.warning(p.alpha.value()) {
                eprintln!("esrad: warning: {w}");
            }
            match basis {
                Basis::Adiabatic => esrad::dipoles::adiabatic_dipoles_asymptotic(&p, regime),
                Basis::Sudden => sudden_dipoles_asymptotic(&p, regime),
            }
        }
    };
    let mut t = Table::new(&[
        "element",
        "basis",
        "freq",
        "re_amp",
        "im_amp",
        "phase_exponent",
        "coherence",
    ]);
    for c in d.components(&p) {
        let r = esrad::dipoles::DipoleRow::from(&c);
        t.push(vec![
            r.element.into(),
            r.basis.into(),
            r.freq.into(),
            r.re_amp.into(),
            r.im_amp.into(),
            r.phase_exponent.into(),
            r.coherence.into(),
        ]);
    }
    render(&t, format)
}

pub fn oracle(kv: &KeyValues, format: Format) -> Result<Vec<u8>, CliError> {
    kv.check_keys(
        "oracle",
        &keys(&[
            "profile",
            "delta_tau",
            "tau",
            "tol",
            "periods",
            "per_period",
            "trajectory",
        ]),
    )?;
    let cfg = system(kv)?;
    let p = derive_params(&cfg)?;
    let profile_name = kv.get_str("profile").unwrap_or("tanh");
    if kv.contains("tau") && kv.contains("delta_tau") {
        return Err(kv.invalid("tau", "give either `tau` or `delta_tau`, not both"));
    }
    let tau = if profile_name == "step" {
        0.0
    } else if kv.contains("tau") {
        kv.float("tau", 1.0, Check::Positive)?
    } else {
        let dt = kv.float("delta_tau", 200.0, Check::Positive)?;
        if p.delta == 0.0 {
            return Err(kv.invalid("delta_tau", "needs a nonzero detuning; give `tau` instead"));
        }
        dt / p.delta.abs()
    };
    let profile = match profile_name {
        "tanh" => SwitchingProfile::tanh(tau),
        "exponential" => SwitchingProfile::exponential(tau),
        "step" => SwitchingProfile::step(),
        other => {
            return Err(kv.invalid(
                "profile",
                format!("expected tanh, exponential or step, got `{other}`"),
            ))
        }
    };
    profile.validate()?;
    let delta_tau = if profile_name == "step" {
        0.0
    } else {
        p.delta.abs() * tau
    };
    let limit = SwitchingLimit::classify(delta_tau);
    let tol = kv.float("tol", 1e-10, Check::Positive)?;
    let window = OracleWindow {
        periods: kv.float("periods", 24.0, Check::Positive)?,
        per_period: kv.get_or("per_period", 32usize)?,
    };
    let trajectory_path = kv.get_str("trajectory").map(str::to_owned);

    let mo = matrix_element_oracle(&cfg, profile, window, tol)?;
    if mo.max_norm_drift > 10.0 * tol {
        return Err(CliError::Numerical(format!(
            "norm drift {:.3e} exceeds 10 x tolerance {:.1e}",
            mo.max_norm_drift, tol
        )));
    }

    let (ad, su) = (adiabatic_dipoles(&p), sudden_dipoles_exact(&p));
    let (ad_diag, ad_cross) = expected_elements(&p, Basis::Adiabatic);
    let (su_diag, su_cross) = expected_elements(&p, Basis::Sudden);
    let mut t = Table::new(&[
        "role",
        "line",
        "part",
        "freq",
        "oracle_modulus",
        "adiabatic_element",
        "adiabatic_modulus",
        "sudden_element",
        "sudden_modulus",
        "deviation",
        "relative",
    ]);
    let mut all_match = true;
    let mut max_dev = 0.0f64;
    for (role, result, ae, se) in [
        ("diagonal", &mo.diagonal, ad_diag, su_diag),
        ("cross", &mo.cross, ad_cross, su_cross),
    ] {
        let ca = compare(result, &ad, ae);
        let cs = compare(result, &su, se);
        for (i, c) in result.components.iter().enumerate() {
            let chosen = match limit {
                SwitchingLimit::Adiabatic => Some(ca[i]),
                SwitchingLimit::Sudden => Some(cs[i]),
                SwitchingLimit::Intermediate => None,
            };
            if let Some(d) = chosen {
                let bound = if d.relative {
                    MATCH_RELATIVE
                } else {
                    MATCH_LEAKAGE
                };
                all_match &= d.deviation < bound;
                if d.relative {
                    max_dev = max_dev.max(d.deviation);
                }
            }
            t.push(vec![
                role.into(),
                c.key.line.label().into(),
                part_label(c.key.part).into(),
                c.freq.into(),
                c.amp.norm().into(),
                format!("D{}", ae.label()).into(),
                ca[i].analytic.into(),
                format!("D{}", se.label()).into(),
                cs[i].analytic.into(),
                chosen.map_or(f64::NAN, |d| d.deviation).into(),
                chosen.is_some_and(|d| d.relative).into(),
            ]);
        }
    }
    let verdict = match limit {
        SwitchingLimit::Intermediate => limit.verdict().to_string(),
        _ if all_match => limit.verdict().to_string(),
        SwitchingLimit::Adiabatic => "adiabatic mismatch".to_string(),
        SwitchingLimit::Sudden => "sudden mismatch".to_string(),
    };
    eprintln!("esrad: oracle verdict: {verdict}");

    if let Some(path) = trajectory_path {
        dump_trajectory(&cfg, profile, &mo, &p, window, tol, &path)?;
    }

    match format {
        Format::Csv => {
            let mut bytes = t.to_csv()?;
            let summary = format!(
                "# verdict: {verdict}\n# delta_tau: {}\n# max_relative_deviation: {}\n# omega_rabi: {}\n# omega_rabi_fitted: {}\n# max_norm_drift: {}\n",
                crate::output::fmt_g(delta_tau),
                crate::output::fmt_g(max_dev),
                crate::output::fmt_g(p.omega_rabi),
                crate::output::fmt_g(mo.cross.omega_rabi_fitted),
                crate::output::fmt_g(mo.max_norm_drift),
            );
            bytes.extend_from_slice(summary.as_bytes());
            Ok(bytes)
        }
        _ => {
            let v = json!({
                "verdict": verdict,
                "limit": format!("{limit:?}").to_lowercase(),
                "profile": profile_name,
                "delta_tau": num(delta_tau),
                "tau": num(tau),
                "tol": num(tol),
                "omega_rabi": num(p.omega_rabi),
                "omega_rabi_fitted": num(mo.cross.omega_rabi_fitted),
                "max_norm_drift": num(mo.max_norm_drift),
                "max_relative_deviation": num(max_dev),
                "residual": num(mo.diagonal.residual.max(mo.cross.residual)),
                "condition": num(mo.diagonal.condition.max(mo.cross.condition)),
                "fit_from": num(mo.fit_from),
                "t_end": num(mo.t_end),
                "components": t.to_json_value(),
            });
            Ok(json_bytes(&v))
        }
    }
}

fn part_label(part: esrad::Part) -> &'static str {
    match part {
        esrad::Part::Emission => "emission",
        esrad::Part::Absorption => "absorption",
    }
}

fn dump_trajectory(
    cfg: &SystemConfig,
    profile: SwitchingProfile,
    mo: &esrad::oracle::MatrixOracle,
    p: &DressedParams,
    window: OracleWindow,
    tol: f64,
    path: &str,
) -> Result<(), CliError> {
    let period = 2.0 * PI / p.omega_rabi;
    let traj = propagate(
        cfg,
        &Propagation {
            profile,
            initial: InitialState::Psi1,
            t_end: mo.t_end,
            tol,
            sample_from: profile.start_time(),
            sample_dt: period / window.per_period as f64,
        },
    )?;
    let mut t = Table::new(&["t", "re_a1", "im_a1", "re_a2", "im_a2"]);
    for s in &traj.samples {
        t.push(vec![
            s.t.into(),
            s.a1.re.into(),
            s.a1.im.into(),
            s.a2.re.into(),
            s.a2.im.into(),
        ]);
    }
    std::fs::write(path, t.to_csv()?)?;
    Ok(())
}

fn selectors(kv: &KeyValues) -> Result<Vec<(&'static str, ComponentSelector)>, CliError> {
    let all = [
        ("coherent", ComponentSelector::coherent()),
        ("noncoherent", ComponentSelector::noncoherent()),
        ("mixed", ComponentSelector::mixed()),
    ];
    match kv.get_str("selector").unwrap_or("both") {
        "both" => Ok(all.into_iter().take(2).collect()),
        "all" => Ok(all.into_iter().collect()),
        name => all
            .into_iter()
            .find(|(n, _)| *n == name)
            .map(|s| vec![s])
            .ok_or_else(|| {
                kv.invalid(
                    "selector",
                    format!("expected coherent, noncoherent, mixed, both or all, got `{name}`"),
                )
            }),
    }
}

pub fn ensemble(kv: &KeyValues, format: Format) -> Result<Vec<u8>, CliError> {
    kv.check_keys(
        "ensemble",
        &keys(&["selector", "n_grid", "side", "trials", "theta_out", "seed"]),
    )?;
    let cfg = system(kv)?;
    derive_params(&cfg)?;
    let sels = selectors(kv)?;
    let theta = kv.float("theta_out", 0.0, Check::Finite)?;
    let spec = ScalingSpec {
        n_grid: kv
            .list::<usize>("n_grid")?
            .unwrap_or_else(|| vec![10, 30, 100, 300, 1000]),
        side: kv.float("side", 20.0, Check::NonNegative)?,
        k_in: Vector3::new(0.0, 0.0, 1.0),
        k_out: Vector3::new(theta.sin(), 0.0, theta.cos()),
        n_trials: kv.get_or("trials", 10_000usize)?,
        seed: kv.get_or("seed", 1u64)?,
    };
    spec.validate()?;
    let mut t = Table::new(&[
        "selector",
        "n_atoms",
        "direction_cos",
        "mean_intensity",
        "std_error",
        "exponent",
    ]);
    for (name, sel) in &sels {
        let study = scaling_study(&cfg, sel, &spec)?;
        for pt in &study.points {
            t.push(vec![
                (*name).into(),
                pt.n_atoms.into(),
                pt.direction_cos.into(),
                pt.mean_intensity.into(),
                pt.std_error.into(),
                study.exponent.into(),
            ]);
        }
    }
    render(&t, format)
}

pub fn audit(kv: &KeyValues, format: Format) -> Result<Vec<u8>, CliError> {
    kv.check_keys(
        "audit",
        &["tolerance", "alpha_small", "alpha_large", "omega"],
    )?;
    let d = AuditConfig::default();
    let cfg = AuditConfig {
        tolerance: kv.float("tolerance", d.tolerance, Check::NonNegative)?,
        alpha_small: kv.float("alpha_small", d.alpha_small, Check::Positive)?,
        alpha_large: kv.float("alpha_large", d.alpha_large, Check::Positive)?,
        omega: kv.float("omega", d.omega, Check::Positive)?,
    };
    cfg.validate()?;
    let report = run_audit(&cfg)?;
    match format {
        Format::Text => Ok(report.to_text().into_bytes()),
        Format::Csv => {
            let mut t = Table::new(&["id", "gap", "summary", "printed", "exact"]);
            for f in &report.findings {
                t.push(vec![
                    f.id.into(),
                    f.gap.into(),
                    f.summary.as_str().into(),
                    f.printed.as_str().into(),
                    f.exact.as_str().into(),
                ]);
            }
            Ok(t.to_csv()?)
        }
        Format::Json => {
            let findings: Vec<Value> = report
                .findings
                .iter()
                .map(|f| {
                    json!({
                        "id": f.id,
                        "gap": num(f.gap),
                        "summary": f.summary,
                        "printed": f.printed,
                        "exact": f.exact,
                    })
                })
                .collect();
            let v = json!({
                "tolerance": num(cfg.tolerance),
                "alpha_small": num(cfg.alpha_small),
                "alpha_large": num(cfg.alpha_large),
                "omega": num(cfg.omega),
                "findings": findings,
                "passed": report.passed,
            });
            Ok(json_bytes(&v))
        }
    }
}
