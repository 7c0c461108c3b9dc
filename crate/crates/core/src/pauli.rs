//! Two-component Pauli vortex spinors and their angular-momentum content.
//!
//! Transverse slices only: the common factor `e^{i k_z z}` is dropped. Each
//! component's radial function is normalized over the aperture before the
//! weights `1/√(1+α²)` and `α/√(1+α²)` are applied, so the closed-form
//! expectation values hold exactly on the grid and any discrepancy is pure
//! quadrature error.

use crate::error::{invalid, Result, VortexError};
use crate::grid::{
    apply_lz, make_scalar_vortex, normalize, quadrature_norm, Aperture, ComplexField, GridSpec,
    Radial, Spinor2Field,
};
use crate::units::BeamKinematics;
use num_complex::Complex64 as C64;
use serde::{Serialize, Serializer};
use std::fmt;

/// Relative operator residual below which a state counts as an eigenstate.
pub const EIGEN_TOLERANCE: f64 = 1e-6;

/// An integer or half-integer, stored as twice its value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct HalfInteger(i64);

impl HalfInteger {
    pub fn from_twice(twice: i64) -> Self {
        Self(twice)
    }

    pub fn integer(n: i64) -> Self {
        Self(2 * n)
    }

    /// Nearest half-integer to `v`.
    pub fn nearest(v: f64) -> Self {
        Self((2.0 * v).round() as i64)
    }

    pub fn twice(self) -> i64 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }
}

impl fmt::Display for HalfInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl Serialize for HalfInteger {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("HalfInteger", 2)?;
        st.serialize_field("exact", &self.to_string())?;
        st.serialize_field("value", &self.value())?;
        st.end()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Analytic,
    Quadrature,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AngularMomentumReport {
    #[serde(rename = "Lz")]
    pub lz: f64,
    #[serde(rename = "Sz")]
    pub sz: f64,
    #[serde(rename = "Jz")]
    pub jz: f64,
    #[serde(rename = "Lz_eigen")]
    pub lz_eigen: Option<HalfInteger>,
    #[serde(rename = "Sz_eigen")]
    pub sz_eigen: Option<HalfInteger>,
    #[serde(rename = "Jz_eigen")]
    pub jz_eigen: Option<HalfInteger>,
    pub method: Method,
    /// Relative operator residuals `(L_z, S_z, J_z)`; quadrature only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residuals: Option<[f64; 3]>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Spin {
    Up,
    Down,
}

/// Sign of the down component in a `J_z` eigenstate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Helicity {
    Plus,
    Minus,
}

impl Helicity {
    pub fn sign(self) -> f64 {
        match self {
            Helicity::Plus => 1.0,
            Helicity::Minus => -1.0,
        }
    }

    pub fn from_sign(s: i32) -> Result<Self> {
        match s {
            1 => Ok(Helicity::Plus),
            -1 => Ok(Helicity::Minus),
            _ => invalid(format!("helicity label must be ±1, got {s}")),
        }
    }
}

/// `(e^{inφ} f / √(1+α²), α e^{in'φ} g / √(1+α²))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PauliBeamSpec {
    pub n: i32,
    pub n_prime: i32,
    /// Down/up amplitude ratio; `f64::INFINITY` selects the pure down state.
    pub alpha: f64,
    pub kinematics: BeamKinematics,
    /// Up radial function; defaults to `J_n(k⊥ r)`.
    pub f: Option<Radial>,
    /// Down radial function; defaults to `J_n'(k⊥ r)`.
    pub g: Option<Radial>,
}

impl PauliBeamSpec {
    pub fn new(n: i32, n_prime: i32, alpha: f64, kinematics: BeamKinematics) -> Result<Self> {
        let spec = Self {
            n,
            n_prime,
            alpha,
            kinematics,
            f: None,
            g: None,
        };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<()> {
        if self.alpha.is_nan() || self.alpha < 0.0 {
            return invalid(format!(
                "alpha must be a nonnegative real, got {}",
                self.alpha
            ));
        }
        Ok(())
    }

    /// `(1/(1+α²), α²/(1+α²))`.
    pub fn weights(&self) -> (f64, f64) {
        if self.alpha.is_infinite() {
            (0.0, 1.0)
        } else {
            let a2 = self.alpha * self.alpha;
            (1.0 / (1.0 + a2), a2 / (1.0 + a2))
        }
    }

    fn radial_up(&self) -> Radial {
        self.f.unwrap_or(Radial::Bessel {
            k_perp: self.kinematics.k_perp,
            order: self.n,
        })
    }

    fn radial_down(&self) -> Radial {
        self.g.unwrap_or(Radial::Bessel {
            k_perp: self.kinematics.k_perp,
            order: self.n_prime,
        })
    }
}

fn normalized_component(
    grid: &GridSpec,
    m: i32,
    radial: Radial,
    aperture: Aperture,
) -> Result<ComplexField> {
    normalize(&make_scalar_vortex(grid, m, radial, Some(aperture))?)
}

fn bessel(kin: &BeamKinematics, order: i32) -> Result<Radial> {
    if !(kin.k_perp > 0.0) {
        return invalid("Bessel vortex states need k_perp > 0");
    }
    Ok(Radial::Bessel {
        k_perp: kin.k_perp,
        order,
    })
}

/// `Ψ_n^±`: `e^{inφ} J_n(k⊥ρ)` in the up or down component only.
pub fn make_spin_eigenstate(
    n: i32,
    spin: Spin,
    kinematics: &BeamKinematics,
    grid: &GridSpec,
    aperture: Aperture,
) -> Result<Spinor2Field> {
    let c = normalized_component(grid, n, bessel(kinematics, n)?, aperture)?;
    let z = ComplexField::zeros(*grid);
    match spin {
        Spin::Up => Spinor2Field::new([c, z]),
        Spin::Down => Spinor2Field::new([z, c]),
    }
}

/// `J_z = n + ½` eigenstate `(e^{inφ}J_n, ±e^{i(n+1)φ}J_{n+1})` with equal
/// weights.
pub fn make_jz_eigenstate(
    n: i32,
    helicity: Helicity,
    kinematics: &BeamKinematics,
    grid: &GridSpec,
    aperture: Aperture,
) -> Result<Spinor2Field> {
    let up = normalized_component(grid, n, bessel(kinematics, n)?, aperture)?;
    let down = normalized_component(grid, n + 1, bessel(kinematics, n + 1)?, aperture)?;
    let w = std::f64::consts::FRAC_1_SQRT_2;
    Spinor2Field::new([
        up.scaled(C64::new(w, 0.0)),
        down.scaled(C64::new(w * helicity.sign(), 0.0)),
    ])
}

/// General two-component state parametrized by `α`.
pub fn make_general(
    spec: &PauliBeamSpec,
    grid: &GridSpec,
    aperture: Aperture,
) -> Result<Spinor2Field> {
    spec.validate()?;
    let (wu, wd) = spec.weights();
    let up = if wu > 0.0 {
        normalized_component(grid, spec.n, spec.radial_up(), aperture)?
            .scaled(C64::new(wu.sqrt(), 0.0))
    } else {
        ComplexField::zeros(*grid)
    };
    let down = if wd > 0.0 {
        normalized_component(grid, spec.n_prime, spec.radial_down(), aperture)?
            .scaled(C64::new(wd.sqrt(), 0.0))
    } else {
        ComplexField::zeros(*grid)
    };
    Spinor2Field::new([up, down])
}

/// Expectation values and eigen-flags from the α-parametrization alone.
pub fn angular_momentum_closed_form(spec: &PauliBeamSpec) -> AngularMomentumReport {
    let (wu, wd) = spec.weights();
    let (n, np) = (spec.n as f64, spec.n_prime as f64);
    // written so that n = n' gives exactly n
    let lz = n + wd * (np - n);
    let sz = 0.5 * (wu - wd);
    let jz = lz + sz;
    let (lz_eigen, sz_eigen, jz_eigen) = if wd == 0.0 {
        (
            Some(HalfInteger::integer(spec.n as i64)),
            Some(HalfInteger::from_twice(1)),
            Some(HalfInteger::from_twice(2 * spec.n as i64 + 1)),
        )
    } else if wu == 0.0 {
        (
            Some(HalfInteger::integer(spec.n_prime as i64)),
            Some(HalfInteger::from_twice(-1)),
            Some(HalfInteger::from_twice(2 * spec.n_prime as i64 - 1)),
        )
    } else {
        (
            (spec.n == spec.n_prime).then(|| HalfInteger::integer(spec.n as i64)),
            None,
            (spec.n_prime == spec.n + 1).then(|| HalfInteger::from_twice(2 * spec.n as i64 + 1)),
        )
    };
    AngularMomentumReport {
        lz,
        sz,
        jz,
        lz_eigen,
        sz_eigen,
        jz_eigen,
        method: Method::Analytic,
        residuals: None,
    }
}

fn stacked_residual(parts: [(&ComplexField, &ComplexField, f64); 2], total: f64) -> f64 {
    // ‖Σ_c (Op ψ_c − λ ψ_c)‖ / ‖Ψ‖ where parts = (Op ψ_c, ψ_c, λ_c-shift)
    let mut acc = 0.0;
    for (op, psi, shift) in parts {
        acc += op
            .values()
            .iter()
            .zip(psi.values())
            .map(|(a, b)| (a - b * shift).norm_sqr())
            .sum::<f64>();
    }
    (acc * parts[0].1.grid().pixel_area() / total).sqrt()
}

/// Expectation values by quadrature, with eigen-flags from operator residuals.
pub fn angular_momentum_numeric(field: &Spinor2Field) -> Result<AngularMomentumReport> {
    let [up, down] = field.components();
    let wu = quadrature_norm(up);
    let wd = quadrature_norm(down);
    let total = wu + wd;
    if !(total > 0.0) {
        return Err(VortexError::Degenerate(
            "angular momentum of a zero spinor".into(),
        ));
    }
    let lup = apply_lz(up);
    let ldown = apply_lz(down);
    let lz = (up.inner(&lup)?.re + down.inner(&ldown)?.re) / total;
    let sz = 0.5 * (wu - wd) / total;
    let jz = lz + sz;

    let zero = ComplexField::zeros(*field.grid());
    let l_res = stacked_residual([(&lup, up, lz), (&ldown, down, lz)], total);
    let s_res = stacked_residual([(&zero, up, sz - 0.5), (&zero, down, sz + 0.5)], total);
    // (L_z + S_z − λ)ψ = L_z ψ − (λ ∓ ½)ψ
    let j_res = stacked_residual([(&lup, up, jz - 0.5), (&ldown, down, jz + 0.5)], total);

    let flag = |res: f64, v: f64| (res < EIGEN_TOLERANCE).then(|| HalfInteger::nearest(v));
    Ok(AngularMomentumReport {
        lz,
        sz,
        jz,
        lz_eigen: flag(l_res, lz),
        sz_eigen: flag(s_res, sz),
        jz_eigen: flag(j_res, jz),
        method: Method::Quadrature,
        residuals: Some([l_res, s_res, j_res]),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::topological_charge;
    use std::f64::consts::PI;

    fn setup() -> (BeamKinematics, GridSpec, Aperture) {
        let kin = BeamKinematics::electron(200.0, 7.4).unwrap();
        let grid = GridSpec::square(256, (PI / 6.0) / kin.k_perp).unwrap();
        let ap = Aperture::default_for(&grid);
        (kin, grid, ap)
    }

    #[test]
    fn half_integer_rendering() {
        assert_eq!(HalfInteger::from_twice(3).to_string(), "3/2");
        assert_eq!(HalfInteger::from_twice(-1).to_string(), "-1/2");
        assert_eq!(HalfInteger::integer(2).to_string(), "2");
        assert_eq!(HalfInteger::nearest(1.4999999).to_string(), "3/2");
        let j = serde_json::to_value(HalfInteger::from_twice(3)).unwrap();
        assert_eq!(j["exact"], "3/2");
        assert_eq!(j["value"], 1.5);
    }

    #[test]
    fn closed_form_reference_cases() {
        let kin = BeamKinematics::electron(200.0, 7.4).unwrap();
        let r = angular_momentum_closed_form(&PauliBeamSpec::new(1, 2, 1.0, kin).unwrap());
        assert_eq!((r.lz, r.sz), (1.5, 0.0));
        assert_eq!(r.jz_eigen, Some(HalfInteger::from_twice(3)));
        assert_eq!(r.lz_eigen, None);

        let r = angular_momentum_closed_form(&PauliBeamSpec::new(3, 3, 1.0, kin).unwrap());
        assert_eq!((r.lz, r.jz), (3.0, 3.0));
        assert_eq!(r.lz_eigen, Some(HalfInteger::integer(3)));
        assert_eq!(r.jz_eigen, None);

        let r = angular_momentum_closed_form(&PauliBeamSpec::new(0, 1, 2.0, kin).unwrap());
        assert!((r.lz - 0.8).abs() < 1e-15);
        assert!((r.sz + 0.3).abs() < 1e-15);
        assert!((r.jz - 0.5).abs() < 1e-15);
        assert_eq!(r.jz_eigen, Some(HalfInteger::from_twice(1)));

        let r = angular_momentum_closed_form(&PauliBeamSpec::new(2, 5, 0.0, kin).unwrap());
        assert_eq!(r.sz_eigen, Some(HalfInteger::from_twice(1)));
        let r =
            angular_momentum_closed_form(&PauliBeamSpec::new(2, 5, f64::INFINITY, kin).unwrap());
        assert_eq!(r.lz_eigen, Some(HalfInteger::integer(5)));
        assert_eq!(r.sz_eigen, Some(HalfInteger::from_twice(-1)));
        assert!(PauliBeamSpec::new(0, 1, -1.0, kin).is_err());
    }

    #[test]
    fn spin_eigenstates() {
        let (kin, grid, ap) = setup();
        let f = make_spin_eigenstate(1, Spin::Up, &kin, &grid, ap).unwrap();
        assert!(f.component(1).is_identically_zero());
        let r0 = 4.0 / kin.k_perp;
        assert_eq!(topological_charge(f.component(0), r0).unwrap().charge, 1);

        let f = make_spin_eigenstate(0, Spin::Down, &kin, &grid, ap).unwrap();
        let r = angular_momentum_numeric(&f).unwrap();
        assert!((r.sz + 0.5).abs() < 1e-15);
        assert!(r.lz.abs() < 1e-9);

        let f = make_spin_eigenstate(2, Spin::Up, &kin, &grid, ap).unwrap();
        let r = angular_momentum_numeric(&f).unwrap();
        assert!((r.lz - 2.0).abs() < 1e-6);
        assert_eq!(r.lz_eigen, Some(HalfInteger::integer(2)));
        assert_eq!(r.sz_eigen, Some(HalfInteger::from_twice(1)));
    }

    #[test]
    fn jz_eigenstate_structure() {
        let (kin, grid, ap) = setup();
        let r0 = 4.0 / kin.k_perp;
        let f = make_jz_eigenstate(1, Helicity::Plus, &kin, &grid, ap).unwrap();
        assert_eq!(topological_charge(f.component(0), r0).unwrap().charge, 1);
        assert_eq!(topological_charge(f.component(1), r0).unwrap().charge, 2);
        let r = angular_momentum_numeric(&f).unwrap();
        assert_eq!(r.jz_eigen, Some(HalfInteger::from_twice(3)));

        let f = make_jz_eigenstate(0, Helicity::Minus, &kin, &grid, ap).unwrap();
        let r = angular_momentum_numeric(&f).unwrap();
        assert_eq!(r.jz_eigen, Some(HalfInteger::from_twice(1)));
        assert!((r.lz - 0.5).abs() < 1e-6);

        let f = make_jz_eigenstate(-1, Helicity::Plus, &kin, &grid, ap).unwrap();
        assert_eq!(topological_charge(f.component(0), r0).unwrap().charge, -1);
        let r = angular_momentum_numeric(&f).unwrap();
        assert_eq!(r.jz_eigen, Some(HalfInteger::from_twice(-1)));
    }

    #[test]
    fn general_state_limits() {
        let (kin, grid, ap) = setup();
        let s0 = PauliBeamSpec::new(1, 4, 0.0, kin).unwrap();
        let a = make_general(&s0, &grid, ap).unwrap();
        let b = make_spin_eigenstate(1, Spin::Up, &kin, &grid, ap).unwrap();
        assert!(a.relative_distance(&b).unwrap() < 1e-15);

        let s = PauliBeamSpec::new(2, 2, 1.0, kin).unwrap();
        let r = angular_momentum_numeric(&make_general(&s, &grid, ap).unwrap()).unwrap();
        assert_eq!(r.lz_eigen, Some(HalfInteger::integer(2)));
        assert!((r.jz - 2.0).abs() < 1e-6);

        let s = PauliBeamSpec::new(0, 1, 2.0, kin).unwrap();
        let f = make_general(&s, &grid, ap).unwrap();
        let wu = quadrature_norm(f.component(0));
        let wd = quadrature_norm(f.component(1));
        assert!((wu - 0.2).abs() < 1e-12 && (wd - 0.8).abs() < 1e-12);
    }

    #[test]
    fn zero_spinor_is_degenerate() {
        let (_, grid, _) = setup();
        assert!(angular_momentum_numeric(&Spinor2Field::zeros(grid)).is_err());
    }
}
