use esrad::dipoles::{adiabatic_dipoles_asymptotic, two_draw_check};
use esrad::numeric::golden_section_min;
use esrad::rates::{es_linewidth, rate_table, CoefficientMode, Occupations};
use esrad::{
    adiabatic_dipoles, derive_params, sudden_dipoles_asymptotic, sudden_dipoles_exact, Basis,
    DressedParams, Element, Line, Regime, SpectralKey, SystemConfig,
};
use proptest::prelude::*;

const OMEGA: f64 = 100.0;

fn cfg(delta: f64, alpha: f64, phases: (f64, f64, f64)) -> SystemConfig {
    SystemConfig::from_alpha(OMEGA, delta, alpha).with_phases(phases.0, phases.1, phases.2)
}

fn params(delta: f64, alpha: f64) -> DressedParams {
    derive_params(&cfg(delta, alpha, (0.3, 0.9, -0.6))).unwrap()
}

fn log_alpha() -> impl Strategy<Value = f64> {
    (-4.0f64..4.0).prop_map(|e| 10f64.powf(e))
}

fn sign() -> impl Strategy<Value = f64> {
    prop_oneof![Just(1.0), Just(-1.0)]
}

fn phase() -> impl Strategy<Value = f64> {
    -std::f64::consts::PI..std::f64::consts::PI
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn dressing_is_unitary(a in log_alpha(), s in sign(), d in 0.01f64..5.0, pf in phase(), p1 in phase()) {
        let p = derive_params(&cfg(s * d, a, (pf, p1, 0.0))).unwrap();
        prop_assert!((p.c1 * p.c1 + p.c2.norm_sqr() - 1.0).abs() < 1e-12);
        let u = p.basis_transform();
        let err = (u * u.adjoint() - nalgebra::Matrix2::identity()).norm();
        prop_assert!(err < 1e-12, "U U^dagger off by {err}");
    }

    #[test]
    fn rabi_frequency_increases_with_coupling(d in -5.0f64..5.0, v in 0.0f64..10.0, dv in 1e-6f64..1.0) {
        prop_assume!(d != 0.0 || v > 0.0);
        let lo = derive_params(&SystemConfig::from_detuning(OMEGA, d, v)).unwrap();
        let hi = derive_params(&SystemConfig::from_detuning(OMEGA, d, v + dv)).unwrap();
        prop_assert!(hi.omega_rabi > lo.omega_rabi);
    }

    #[test]
    fn detuning_sign_swap(a in log_alpha(), d in 0.01f64..5.0) {
        let pos = derive_params(&SystemConfig::from_alpha(OMEGA, d, a)).unwrap();
        let neg = derive_params(&SystemConfig::from_alpha(OMEGA, -d, a)).unwrap();
        prop_assert_eq!(pos.omega_rabi, neg.omega_rabi);
        prop_assert!((pos.c1_sq + neg.c1_sq - 1.0).abs() < 1e-12);
        let n2 = |p: &DressedParams| es_linewidth(p, 1.0).unwrap().n2_weight;
        prop_assert!((n2(&pos) + n2(&neg) - 1.0).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&n2(&pos)));
    }

    #[test]
    fn completeness_identity(a in log_alpha(), s in sign()) {
        let p = params(s, a);
        let r = p.delta_over_omega();
        let v = p.v_over_omega();
        let total = ((1.0 - r) / 2.0).powi(2) + ((1.0 + r) / 2.0).powi(2) + 2.0 * v * v;
        prop_assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn frobenius_norm_is_basis_independent(a in log_alpha(), s in sign(), pf in phase(), p1 in phase()) {
        let p = derive_params(&cfg(s, a, (pf, p1, 0.0))).unwrap();
        let (ad, su) = (adiabatic_dipoles(&p), sudden_dipoles_exact(&p));
        for key in SpectralKey::all() {
            let (x, y) = (ad.frobenius_sq(key), su.frobenius_sq(key));
            prop_assert!((x - y).abs() < 1e-12, "{key:?}: {x} vs {y}");
        }
    }

    #[test]
    fn sudden_dipoles_are_hermitian(a in log_alpha(), s in sign(), pf in phase(), p1 in phase()) {
        let p = derive_params(&cfg(s, a, (pf, p1, 0.0))).unwrap();
        let d = sudden_dipoles_exact(&p);
        for key in SpectralKey::all() {
            for (e, t) in [(Element::D11, Element::D11), (Element::D12, Element::D21), (Element::D22, Element::D22)] {
                let x = d.amplitude(e, key);
                let y = d.amplitude(t, key.conj()).conj();
                prop_assert!((x.value - y.value).norm() < 1e-12);
                if x.norm() > 1e-12 {
                    prop_assert_eq!(x.phase_exponent, y.phase_exponent);
                }
            }
        }
    }

    #[test]
    fn two_draw_agrees_with_phase_exponents(
        a in (-2.0f64..2.0).prop_map(|e| 10f64.powf(e)),
        s in sign(),
        pf in phase(),
        t1 in phase(),
        t2 in phase(),
    ) {
        // Draws closer than this cannot separate exponents up to 4.
        prop_assume!((1..=4).all(|m| (f64::from(m) * (t1 - t2) / 2.0).sin().abs() > 0.05));
        let c = cfg(s, a, (pf, 0.0, 0.0));
        let regime = Regime::for_alpha(a);
        let draws = [(t1, 0.0), (t2, 0.0)];
        for v in two_draw_check(&c, adiabatic_dipoles, draws).unwrap()
            .into_iter()
            .chain(two_draw_check(&c, sudden_dipoles_exact, draws).unwrap())
            .chain(two_draw_check(&c, |p| sudden_dipoles_asymptotic(p, regime), draws).unwrap())
            .chain(two_draw_check(&c, |p| adiabatic_dipoles_asymptotic(p, regime), draws).unwrap())
        {
            prop_assert!(v.agrees(), "{v:?}");
        }
    }

    #[test]
    fn exact_coefficients_are_phase_independent(a in log_alpha(), s in sign(), pf in phase(), p1 in phase()) {
        let occ = Occupations::uniform(0.7);
        let base = rate_table(&params(s, a), Basis::Sudden, &occ, CoefficientMode::Exact);
        let p = derive_params(&cfg(s, a, (pf, p1, 0.0))).unwrap();
        let moved = rate_table(&p, Basis::Sudden, &occ, CoefficientMode::Exact);
        for (x, y) in base.iter().zip(&moved) {
            prop_assert!((x.exact_coeff - y.exact_coeff).abs() < 1e-12);
            prop_assert!((x.exact_stim_coeff - y.exact_stim_coeff).abs() < 1e-12);
        }
    }
}

#[test]
fn free_atom_and_strong_field_limits() {
    let weak = params(1.0, 1e-6);
    assert!((weak.c1 - 1.0).abs() < 1e-12 && weak.c2.norm() < 1e-6);
    for s in [1.0, -1.0] {
        let strong = params(s, 1e6);
        assert!((strong.c1_sq - 0.5).abs() < 1e-6);
        assert!((strong.c2_sq - 0.5).abs() < 1e-6);
    }
    let weak_neg = params(-1.0, 1e-6);
    assert!(weak_neg.c1.abs() < 1e-6 && (weak_neg.c2.norm() - 1.0).abs() < 1e-12);
}

/// Reversing the detuning exchanges the sidebands and turns emission into
/// absorption: `spont(-D, L) = |d+(D, L')|^2`, `stim(-D, L) = -stim(D, L')`.
#[test]
fn adiabatic_tables_swap_sidebands_with_detuning_sign() {
    let occ = Occupations::uniform(0.0);
    let flip = |l: Line| match l {
        Line::Lower => Line::Upper,
        Line::Upper => Line::Lower,
        Line::Carrier => Line::Carrier,
    };
    for a in [0.05, 0.2, 1.0, 10.0, 40.0] {
        let pos = rate_table(
            &params(1.0, a),
            Basis::Adiabatic,
            &occ,
            CoefficientMode::Exact,
        );
        let neg = rate_table(
            &params(-1.0, a),
            Basis::Adiabatic,
            &occ,
            CoefficientMode::Exact,
        );
        let mut checked = 0;
        for n in neg.iter().filter(|e| e.sign.holds(-1.0)) {
            let p = pos
                .iter()
                .find(|e| {
                    e.sign.holds(1.0)
                        && e.regime == n.regime
                        && e.transition == n.transition
                        && e.line == flip(n.line)
                })
                .unwrap();
            let absorbed = p.exact_coeff - p.exact_stim_coeff;
            assert!(
                (n.exact_coeff - absorbed).abs() < 1e-14,
                "alpha {a} {:?}",
                n.line
            );
            assert!(
                (n.exact_stim_coeff + p.exact_stim_coeff).abs() < 1e-14,
                "alpha {a} {:?}",
                n.line
            );
            checked += 1;
        }
        assert!(checked >= 6);
    }
}

#[test]
fn sudden_noncoherent_rayleigh_peaks_inside_unit_interval() {
    let coeff = |a: f64| {
        let t = rate_table(
            &params(1.0, a),
            Basis::Sudden,
            &Occupations::uniform(0.0),
            CoefficientMode::Asymptotic,
        );
        t.iter()
            .find(|e| {
                e.regime == Regime::SmallAlpha
                    && e.line == Line::Carrier
                    && e.transition.initial != e.transition.final_state
            })
            .map(|e| e.spont_coeff)
            .unwrap()
    };
    assert!((coeff(0.5) - 0.5f64.powi(4) / 4.0 * 0.75).abs() < 1e-15);
    let peak = golden_section_min(|a| -coeff(a), 0.0, 1.0, 1e-10);
    assert!(peak > 0.05 && peak < 0.95, "peak at {peak}");
    assert!((peak - (2.0f64 / 3.0).sqrt()).abs() < 1e-6);
    assert!(coeff(peak) > coeff(0.05) && coeff(peak) > coeff(0.95));
}
