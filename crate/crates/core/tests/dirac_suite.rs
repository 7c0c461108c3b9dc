use std::f64::consts::PI;
use vortex_core::dirac::*;
use vortex_core::*;

fn kin() -> BeamKinematics {
    BeamKinematics::electron(200.0, 7.4).unwrap()
}

#[test]
fn residual_converges_at_second_order_for_all_modes() {
    let k = kin();
    for n in -2..=2 {
        for s in [1, -1] {
            let mode = DiracMode::helicity_eigenstate(n, s).unwrap();
            let res: Vec<f64> = [(48usize, 0.7), (96, 0.35), (192, 0.175)]
                .iter()
                .map(|&(size, h)| {
                    let g = GridSpec::square(size, h / k.k_perp).unwrap();
                    dirac_residual(
                        &make_dirac_spinor(&k, &mode, &g, &Window::None).unwrap(),
                        &k,
                    )
                    .unwrap()
                })
                .collect();
            for w in res.windows(2) {
                let ratio = w[0] / w[1];
                assert!((3.5..=4.5).contains(&ratio), "n={n} s={s} {res:?}");
            }
        }
    }
}

#[test]
fn wrong_energy_is_not_a_solution() {
    let k = kin();
    let other = BeamKinematics::electron(300.0, 7.4).unwrap();
    let g = GridSpec::square(96, 0.35 / k.k_perp).unwrap();
    let mode = DiracMode::helicity_eigenstate(0, 1).unwrap();
    let psi = make_dirac_spinor(&other, &mode, &g, &Window::None).unwrap();
    assert!(dirac_residual(&psi, &k).unwrap() > 1e-2);
}

#[test]
fn approx_lz_plus_has_lz_near_n() {
    let k = kin();
    let g = GridSpec::square(256, (PI / 8.0) / k.k_perp).unwrap();
    let psi = make_approx_lz_state(
        &k,
        ApproxLzState::Plus,
        1,
        &g,
        &Window::default_aperture(&g),
    )
    .unwrap();
    let am = dirac_angular_momentum(&psi).unwrap();
    let eps2 = k.paraxiality().powi(2);
    assert!((am.lz - 1.0) > 0.0 && (am.lz - 1.0) < 2.0 * eps2, "{am:?}");
    assert_eq!(am.jz_eigen.unwrap().to_string(), "3/2");
}

#[test]
fn density_analysis_reference_values() {
    let k = kin();
    let d = density_analysis(&k, ApproxLzState::Minus, 1, Some(0.05), 5.0, 501).unwrap();
    assert!((d.r_c_paper_pm.unwrap() - 1.76).abs() < 0.01);
    assert!((d.r_c_numeric_pm.unwrap() - 0.30).abs() < 0.005);
    let diff0 = d.curves.rho_full[0] - d.curves.rho_first_term[0];
    assert!((diff0 - d.central_fraction).abs() < 1e-12);
    let j = serde_json::to_value(&d).unwrap();
    assert_eq!(j["schema_version"], 1);
    assert_eq!(j["state"], "minus");
}
