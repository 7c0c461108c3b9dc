use proptest::prelude::*;
use vortex_core::grid::*;
use vortex_core::holography::*;
use vortex_core::io::{read_vfld, write_vfld};
use vortex_core::C64;

fn field_from(g: GridSpec, vals: &[(f64, f64)]) -> ComplexField {
    ComplexField::new(g, vals.iter().map(|&(a, b)| C64::new(a, b)).collect()).unwrap()
}

fn random_field(n: usize) -> impl Strategy<Value = ComplexField> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n * n)
        .prop_map(move |v| field_from(GridSpec::square(n, 0.3).unwrap(), &v))
}

/// Smooth, compactly decaying field: random polynomial times a Gaussian.
fn smooth_field() -> impl Strategy<Value = ComplexField> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 6).prop_map(|c| {
        let g = GridSpec::square(64, 0.25).unwrap();
        ComplexField::from_fn(g, |x, y| {
            let p = C64::new(c[0].0, c[0].1)
                + C64::new(c[1].0, c[1].1) * x
                + C64::new(c[2].0, c[2].1) * y
                + C64::new(c[3].0, c[3].1) * x * y
                + C64::new(c[4].0, c[4].1) * x * x
                + C64::new(c[5].0, c[5].1) * y * y;
            p * (-(x * x + y * y) / 2.0).exp()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn fft_is_unitary(f in random_field(32)) {
        let t = fourier_transform(&f, Direction::Forward);
        let a: f64 = f.values().iter().map(|v| v.norm_sqr()).sum();
        let b: f64 = t.values().iter().map(|v| v.norm_sqr()).sum();
        prop_assert!((a - b).abs() <= 1e-10 * a);
        let back = fourier_transform(&t, Direction::Inverse);
        for (u, v) in f.values().iter().zip(back.values()) {
            prop_assert!((u - v).norm() <= 1e-10);
        }
    }

    #[test]
    fn fft_preserves_inner_products(f in random_field(16), h in random_field(16)) {
        let a = f.inner(&h).unwrap();
        let ft = fourier_transform(&f, Direction::Forward);
        let ht = fourier_transform(&h, Direction::Forward);
        // inner products carry the pixel area of their own grid
        let scale = f.grid().pixel_area() / ft.grid().pixel_area();
        let b = ft.inner(&ht).unwrap() * scale;
        prop_assert!((a - b).norm() <= 1e-10 * (1.0 + a.norm()));
    }

    #[test]
    fn lz_is_linear_and_hermitian(a in smooth_field(), b in smooth_field(), s in -2.0f64..2.0) {
        let comb = a.lincomb(C64::new(1.0, 0.0), &b, C64::new(s, 0.5)).unwrap();
        let lhs = apply_lz(&comb);
        let rhs = apply_lz(&a).lincomb(C64::new(1.0, 0.0), &apply_lz(&b), C64::new(s, 0.5)).unwrap();
        let scale = lhs.max_abs().max(1.0);
        for (u, v) in lhs.values().iter().zip(rhs.values()) {
            prop_assert!((u - v).norm() <= 1e-10 * scale);
        }
        let ab = a.inner(&apply_lz(&b)).unwrap();
        let ba = apply_lz(&a).inner(&b).unwrap();
        prop_assert!((ab - ba).norm() <= 1e-10 * (1.0 + ab.norm()));
    }

    #[test]
    fn charge_is_additive_on_products(n1 in -3i32..=3, n2 in -3i32..=3, w in 2.0f64..4.0) {
        let g = GridSpec::square(64, 0.25).unwrap();
        let v = |n: i32| ComplexField::from_fn(g, move |x, y| {
            let r2 = x * x + y * y;
            C64::from_polar(r2.sqrt().powi(n.abs()) * (-r2 / (w * w)).exp(), n as f64 * y.atan2(x))
        });
        let p = v(n1).mul(&v(n2)).unwrap();
        let c = topological_charge(&p, 2.0).unwrap();
        prop_assert_eq!(c.charge, (n1 + n2) as i64);
        prop_assert!(c.residual.abs() < 1e-6);
    }

    #[test]
    fn spinor_density_is_nonnegative(f in random_field(16), h in random_field(16)) {
        let s = Spinor2Field::new([f.clone(), h.clone()]).unwrap();
        let d = s.density();
        for (i, &v) in d.iter().enumerate() {
            prop_assert!(v >= 0.0);
            prop_assert!((v - f.values()[i].norm_sqr() - h.values()[i].norm_sqr()).abs() <= 1e-15 * (1.0 + v));
        }
    }

    #[test]
    fn vfld_roundtrip(f in random_field(16), h in random_field(16)) {
        let mut buf = Vec::new();
        write_vfld(&mut buf, &[f.clone(), h.clone()]).unwrap();
        prop_assert_eq!(read_vfld(&buf[..]).unwrap(), vec![f, h]);
    }

    #[test]
    fn pauli_decomposition_roundtrip(
        entries in prop::collection::vec(prop::array::uniform4((-3.0f64..3.0, -3.0f64..3.0)), 256)
    ) {
        let g = GridSpec::square(16, 1.0).unwrap();
        let m = MatrixMask::new(g, entries.iter().map(|e| e.map(|(a, b)| C64::new(a, b))).collect()).unwrap();
        let back = pauli_decompose(&m).reconstruct();
        for (a, b) in m.entries().iter().zip(back.entries()) {
            for k in 0..4 {
                prop_assert!((a[k] - b[k]).norm() <= 1e-12);
            }
        }
    }

    #[test]
    fn hermitian_masks_have_zero_defect(
        entries in prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0, -3.0f64..3.0, -3.0f64..3.0), 256)
    ) {
        let g = GridSpec::square(16, 1.0).unwrap();
        let m = MatrixMask::new(g, entries.iter().map(|&(a, d, br, bi)| {
            let b = C64::new(br, bi);
            [C64::new(a, 0.0), b, b.conj(), C64::new(d, 0.0)]
        }).collect()).unwrap();
        let p = pauli_decompose(&m);
        prop_assert!(p.max_hermiticity_defect() <= 1e-15);
        for c in &p.a {
            prop_assert!(c.values().iter().all(|v| v.im.abs() <= 1e-15));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn binarization_keeps_target_charge(n in -3i32..=3) {
        let setup = HologramSetup { size: 256, fringes: 24.0, ..Default::default() };
        let raw = scalar_pipeline(&setup, n, false).unwrap();
        let bin = scalar_pipeline(&setup, n, true).unwrap();
        let q = |r: &ScalarReconstruction| r.target().charge.map(|c| c.charge);
        prop_assert_eq!(q(&raw), Some(n as i64));
        prop_assert_eq!(q(&bin), Some(n as i64));
    }
}
