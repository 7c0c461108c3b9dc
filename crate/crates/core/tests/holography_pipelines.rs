use vortex_core::holography::*;
use vortex_core::VortexError;

fn target_charge(r: &ScalarReconstruction) -> i64 {
    r.target().charge.expect("unambiguous target charge").charge
}

#[test]
fn fork_masks_reconstruct_their_charge() {
    let setup = HologramSetup::default();
    for n in [1, 2] {
        let r = scalar_pipeline(&setup, n, true).unwrap();
        assert_eq!(target_charge(&r), n as i64);
        assert!(
            r.overlap_with_analytic > 0.9,
            "n={n} overlap {}",
            r.overlap_with_analytic
        );
    }
}

#[test]
fn binary_fork_orders_follow_harmonics() {
    let r = scalar_pipeline(&HologramSetup::default(), 1, true).unwrap();
    let charge = |j: i32| {
        r.orders
            .iter()
            .find(|o| o.index == j)
            .and_then(|o| o.charge)
            .map(|c| c.charge)
    };
    assert_eq!(charge(0), Some(1));
    assert_eq!(charge(1), Some(0));
    assert_eq!(charge(2), Some(-1));
    assert_eq!(charge(-2), Some(3));
    assert_eq!(charge(4), Some(-3));
}

#[test]
fn plane_illumination_gives_symmetric_orders() {
    let setup = HologramSetup::default();
    let grid = setup.grid().unwrap();
    let mask = synthesize_scalar_mask(
        1,
        setup.tilt().unwrap(),
        setup.aperture_radius().unwrap(),
        &grid,
        true,
    )
    .unwrap();
    let plane = vortex_core::ComplexField::from_fn(grid, |_, _| vortex_core::C64::new(1.0, 0.0));
    let ff = reconstruct_far_field(&mask, &plane).unwrap();
    for (j, want) in [(1, -1), (-1, 1), (3, -3), (-3, 3)] {
        let o = extract_order(&ff, j, setup.tilt().unwrap(), setup.window_px()).unwrap();
        assert_eq!(o.charge.map(|c| c.charge), Some(want), "order {j}");
    }
}

#[test]
fn spinor_mask_reconstructs_jz_three_halves() {
    let r = spinor_pipeline(
        &HologramSetup::default(),
        1,
        1.0,
        &MatrixMaskOptions::default(),
    )
    .unwrap();
    let [up, down] = r.target_lobe();
    assert_eq!(up.charge.unwrap().charge, 1);
    assert_eq!(down.charge.unwrap().charge, 2);
    assert!(r.overlap_with_analytic > 0.9, "{}", r.overlap_with_analytic);
    let conj: Vec<i64> = r
        .orders
        .iter()
        .map(|l| {
            l.iter()
                .find(|o| o.index == -2)
                .unwrap()
                .charge
                .unwrap()
                .charge
        })
        .collect();
    assert_eq!(conj, vec![-1, -2]);
}

#[test]
fn swapped_conjugate_exchanges_lobe_charges() {
    let opts = MatrixMaskOptions {
        swap_conjugate: true,
        ..Default::default()
    };
    let r = spinor_pipeline(&HologramSetup::default(), 1, 1.0, &opts).unwrap();
    let conj: Vec<i64> = r
        .orders
        .iter()
        .map(|l| {
            l.iter()
                .find(|o| o.index == -2)
                .unwrap()
                .charge
                .unwrap()
                .charge
        })
        .collect();
    assert_eq!(conj, vec![-2, -1]);
}

#[test]
fn jz_mask_has_nonhermitian_sigma_z_part() {
    let r = spinor_pipeline(
        &HologramSetup::default(),
        1,
        1.0,
        &MatrixMaskOptions::default(),
    )
    .unwrap();
    let p = pauli_decompose(&r.mask);
    assert!(p.a[2].values().iter().any(|v| v.norm() > 1e-3));
    assert!(p.max_hermiticity_defect() > 0.0);
}

#[test]
fn overlapping_window_is_rejected() {
    let setup = HologramSetup {
        window_fraction: 0.6,
        ..Default::default()
    };
    assert!(matches!(
        scalar_pipeline(&setup, 1, true),
        Err(VortexError::OrderOverlap(_))
    ));
}
