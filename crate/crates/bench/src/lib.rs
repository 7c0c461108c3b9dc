//! Fixtures shared by the benchmarks.

use std::f64::consts::PI;

use vortex_core::dirac::{self, DiracMode};
use vortex_core::pauli::{self, PauliBeamSpec};
use vortex_core::{
    Aperture, BeamKinematics, ComplexField, GridSpec, Spinor2Field, Spinor4Field, Window, C64,
};

/// 200 keV electron with a 0.05 nm vortex radius.
pub fn kinematics() -> BeamKinematics {
    BeamKinematics::electron(200.0, 7.4).expect("valid kinematics")
}

/// Deterministic pseudo-random field on an `n × n` grid.
pub fn noise_field(n: usize) -> ComplexField {
    let grid = GridSpec::square(n, 1.0).expect("valid grid");
    let mut state = 0x9e37_79b9_7f4a_7c15u64;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    ComplexField::from_fn(grid, |_, _| C64::new(next(), next()))
}

pub fn dirac_mode(n: usize) -> Spinor4Field {
    let kin = kinematics();
    let grid = GridSpec::square(n, (PI / 8.0) / kin.k_perp).expect("valid grid");
    let mode = DiracMode::helicity_eigenstate(1, 1).expect("valid mode");
    dirac::make_dirac_spinor(&kin, &mode, &grid, &Window::None).expect("valid spinor")
}

pub fn pauli_beam(n: usize) -> Spinor2Field {
    let kin = kinematics();
    let grid = GridSpec::square(n, (PI / 6.0) / kin.k_perp).expect("valid grid");
    let spec = PauliBeamSpec::new(1, 2, 1.0, kin).expect("valid spec");
    pauli::make_general(&spec, &grid, Aperture::default_for(&grid)).expect("valid beam")
}
