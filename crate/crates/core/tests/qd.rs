use piezoguide::qd::{
    absorption_spectrum, band_density, carrier_density, emission_spectrum, fermi_dirac, solve_chemical_potential,
    EmissionModel, QDConfig, QDMaterial,
};
use piezoguide::WavelengthGrid;

fn grid() -> WavelengthGrid {
    WavelengthGrid::new(350.0, 1100.0, 1501).unwrap()
}

#[test]
fn spectra_are_non_negative() {
    let m = QDMaterial::default();
    for force in [0.0, 0.005, 0.02, 0.03, 0.5, 1.0, 5.0] {
        for radius in [1.5, 2.36, 4.0] {
            let cfg = QDConfig::new(radius, force, 300.0).unwrap();
            let e = emission_spectrum(&cfg, &m, &grid()).unwrap();
            let a = absorption_spectrum(&cfg, &m, &grid()).unwrap();
            assert!(e.intensities().iter().all(|v| v.is_finite() && *v >= 0.0));
            assert!(a.intensities().iter().all(|v| (0.0..=1.0).contains(v)));
        }
    }
}

#[test]
fn fermi_dirac_decreases_in_energy() {
    let mut prev = 1.0;
    for i in 0..=400 {
        let e = -1.0 + 0.005 * i as f64;
        let f = fermi_dirac(e, 0.0, 300.0);
        assert!(f <= prev && (0.0..=1.0).contains(&f));
        prev = f;
    }
    assert!((fermi_dirac(0.0, 0.0, 300.0) - 0.5).abs() < 1e-15);
}

#[test]
fn carrier_density_linear_in_force_inverse_cubic_in_radius() {
    let base = carrier_density(1.0, 2.0, 7.8).unwrap();
    assert!((carrier_density(3.0, 2.0, 7.8).unwrap() / base - 3.0).abs() < 1e-12);
    assert!((carrier_density(1.0, 4.0, 7.8).unwrap() / base - 0.125).abs() < 1e-12);
    assert_eq!(carrier_density(0.0, 2.0, 7.8).unwrap(), 0.0);
}

#[test]
fn band_density_increases_with_mu() {
    let mut prev = 0.0;
    for i in 0..100 {
        let n = band_density(-0.3 + 0.01 * i as f64, 300.0, 0.1);
        assert!(n > prev);
        prev = n;
    }
}

#[test]
fn chemical_potential_handles_empty_band() {
    assert_eq!(solve_chemical_potential(0.0, 300.0, 0.1).unwrap(), f64::NEG_INFINITY);
    assert!(solve_chemical_potential(-1.0, 300.0, 0.1).is_err());
}

#[test]
fn emission_peak_is_stable_under_grid_refinement() {
    let m = QDMaterial::default();
    let cfg = QDConfig::new(2.36, 0.02, 300.0).unwrap();
    let coarse = emission_spectrum(&cfg, &m, &grid()).unwrap();
    let fine = emission_spectrum(&cfg, &m, &grid().refined(4)).unwrap();
    let (a, b) = (coarse.argmax().unwrap(), fine.argmax().unwrap());
    assert!((a - b).abs() <= grid().step());
    let model = EmissionModel::new(&cfg, &m).unwrap();
    // the spectrum samples the rate exactly at each grid point
    for (x, y) in fine.wavelengths().iter().zip(fine.intensities()).step_by(97) {
        let e = 1239.841984 / x;
        assert!((model.rate(e) - y).abs() <= 1e-6 * y.abs() + 1e-300);
    }
}

#[test]
fn invalid_dot_configs_are_rejected() {
    assert!(QDConfig::new(0.0, 1.0, 300.0).is_err());
    assert!(QDConfig::new(2.0, -1.0, 300.0).is_err());
    assert!(QDConfig::new(2.0, 1.0, 0.0).is_err());
}
