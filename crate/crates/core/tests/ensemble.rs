use esrad::ensemble::{
    ensemble_intensity, sample_positions, AtomSite, ComponentSelector, EnsembleStats,
};
use esrad::SystemConfig;
use nalgebra::Vector3;

fn sites(n: usize, side: f64, seed: u64) -> Vec<AtomSite> {
    sample_positions(n, side, seed)
        .into_iter()
        .map(|position| AtomSite {
            position,
            phi1: 0.0,
            phi2: 0.0,
        })
        .collect()
}

fn template() -> SystemConfig {
    SystemConfig::from_alpha(100.0, 1.0, 1.0).with_phases(0.4, 0.0, 0.0)
}

fn intensity(selector: &ComponentSelector, k_out: Vector3<f64>, trials: usize) -> EnsembleStats {
    let k_in = Vector3::new(0.0, 0.0, 1.0);
    ensemble_intensity(
        &sites(200, 30.0, 5),
        &template(),
        selector,
        &k_in,
        &k_out,
        trials,
        17,
    )
    .unwrap()
}

fn directions() -> Vec<Vector3<f64>> {
    [0.3f64, 0.8, 1.5, 2.4, 3.0]
        .iter()
        .map(|&theta| Vector3::new(theta.sin(), 0.0, theta.cos()))
        .collect()
}

#[test]
fn coherent_light_is_brightest_forward() {
    let sel = ComponentSelector::coherent();
    let forward = intensity(&sel, Vector3::new(0.0, 0.0, 1.0), 200);
    for k in directions() {
        let off = intensity(&sel, k, 200);
        assert!(
            forward.mean >= off.mean - 3.0 * off.std_error,
            "{k:?}: {} < {}",
            forward.mean,
            off.mean
        );
        assert!(forward.mean > 10.0 * off.mean);
    }
}

#[test]
fn noncoherent_mean_is_isotropic() {
    let sel = ComponentSelector::noncoherent();
    let forward = intensity(&sel, Vector3::new(0.0, 0.0, 1.0), 4000);
    for k in directions() {
        let off = intensity(&sel, k, 4000);
        let sigma = forward.std_error.hypot(off.std_error);
        assert!(
            (forward.mean - off.mean).abs() < 3.0 * sigma,
            "{k:?}: {} vs {}",
            forward.mean,
            off.mean
        );
    }
}

#[test]
fn fixed_seed_is_bit_reproducible() {
    let sel = ComponentSelector::mixed();
    let k = Vector3::new(0.6, 0.0, 0.8);
    let a = intensity(&sel, k, 500);
    let b = intensity(&sel, k, 500);
    assert_eq!(a.mean.to_bits(), b.mean.to_bits());
    assert_eq!(a.std_error.to_bits(), b.std_error.to_bits());
    let other = ensemble_intensity(
        &sites(200, 30.0, 5),
        &template(),
        &sel,
        &Vector3::z(),
        &k,
        500,
        18,
    )
    .unwrap();
    assert_ne!(a.mean.to_bits(), other.mean.to_bits());
}
