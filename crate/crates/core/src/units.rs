//! Physical constants, unit conversions and beam kinematics.
//!
//! All quantities are in natural units (ħ = c = 1) with energy measured in
//! keV, so momenta are in keV and lengths in keV⁻¹. Conversion to nm/pm is
//! done only at I/O boundaries via [`HBAR_C_KEV_NM`].

use crate::error::{invalid, Result};
use crate::special::first_maximum_j1_squared;
use serde::Serialize;

/// ħc in keV·nm.
pub const HBAR_C_KEV_NM: f64 = 0.197_326_980_4;

/// Electron rest energy in keV. Rounded to reproduce the published figures.
pub const ELECTRON_MASS_KEV: f64 = 511.0;

/// Empirical constant in `k⊥ [keV] ≈ 0.37 / R [nm]`.
pub const KPERP_RADIUS_CONSTANT: f64 = 0.37;

/// Bohr magneton in units where it only labels the σ·B map.
pub const BOHR_MAGNETON_LABEL: f64 = 1.0;

pub fn nm_to_natural(nm: f64) -> f64 {
    nm / HBAR_C_KEV_NM
}

pub fn natural_to_nm(length: f64) -> f64 {
    length * HBAR_C_KEV_NM
}

pub fn natural_to_pm(length: f64) -> f64 {
    natural_to_nm(length) * 1e3
}

pub fn pm_to_natural(pm: f64) -> f64 {
    nm_to_natural(pm * 1e-3)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PhysicalConstants {
    pub particle_mass: f64,
    pub hbar_c: f64,
    pub bohr_magneton: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self {
            particle_mass: ELECTRON_MASS_KEV,
            hbar_c: HBAR_C_KEV_NM,
            bohr_magneton: BOHR_MAGNETON_LABEL,
        }
    }
}

impl PhysicalConstants {
    /// Constants for a particle other than the electron (e.g. a neutron).
    pub fn with_mass(mass_kev: f64) -> Result<Self> {
        if !(mass_kev.is_finite() && mass_kev > 0.0) {
            return invalid(format!("particle mass must be positive, got {mass_kev}"));
        }
        Ok(Self {
            particle_mass: mass_kev,
            ..Self::default()
        })
    }
}

/// Energies and wavenumbers of a monochromatic beam, all in keV.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BeamKinematics {
    pub mass: f64,
    pub kinetic_energy: f64,
    pub total_energy: f64,
    pub k: f64,
    pub k_z: f64,
    pub k_perp: f64,
}

impl BeamKinematics {
    /// Kinematics from kinetic energy, transverse wavenumber and rest mass,
    /// using `E² = k² + m²` and `k² = k_z² + k⊥²`.
    pub fn from_kinetic_energy(kinetic_energy: f64, k_perp: f64, mass: f64) -> Result<Self> {
        if !(mass.is_finite() && mass > 0.0) {
            return invalid(format!("mass must be positive, got {mass}"));
        }
        if !(kinetic_energy.is_finite() && kinetic_energy >= 0.0) {
            return invalid(format!(
                "kinetic energy must be nonnegative, got {kinetic_energy}"
            ));
        }
        if !(k_perp.is_finite() && k_perp >= 0.0) {
            return invalid(format!("k_perp must be nonnegative, got {k_perp}"));
        }
        let total_energy = mass + kinetic_energy;
        // E² - m² without cancellation
        let k = (kinetic_energy * (kinetic_energy + 2.0 * mass)).sqrt();
        if k_perp > k {
            return invalid(format!(
                "k_perp = {k_perp} keV exceeds total momentum {k} keV (evanescent beam)"
            ));
        }
        let k_z = ((k - k_perp) * (k + k_perp)).sqrt();
        Ok(Self {
            mass,
            kinetic_energy,
            total_energy,
            k,
            k_z,
            k_perp,
        })
    }

    pub fn electron(kinetic_energy: f64, k_perp: f64) -> Result<Self> {
        Self::from_kinetic_energy(kinetic_energy, k_perp, ELECTRON_MASS_KEV)
    }

    /// Same energy, different transverse wavenumber.
    pub fn with_k_perp(&self, k_perp: f64) -> Result<Self> {
        Self::from_kinetic_energy(self.kinetic_energy, k_perp, self.mass)
    }

    /// `E + m`, the denominator of the lower Dirac components.
    pub fn e_plus_m(&self) -> f64 {
        self.total_energy + self.mass
    }

    /// `k⊥ / (E + m)`; small in the paraxial regime.
    pub fn paraxiality(&self) -> f64 {
        self.k_perp / self.e_plus_m()
    }

    /// Opening angle θ₀ with `k_z = k cos θ₀`, `k⊥ = k sin θ₀`.
    pub fn opening_angle(&self) -> f64 {
        self.k_perp.atan2(self.k_z)
    }
}

/// How the vortex radius is turned into a transverse wavenumber.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum KperpEstimate {
    /// `k⊥ = 0.37 / R` with R in nm.
    #[default]
    PaperConstant,
    /// `k⊥ = x*·ħc / R`, x* the first maximum of `J_1²`.
    ExactMaximum,
}

/// Transverse wavenumber (keV) of a single-k⊥ vortex whose density peaks at
/// radius `radius_nm`.
pub fn kperp_from_vortex_radius(radius_nm: f64, mode: KperpEstimate) -> Result<f64> {
    if !(radius_nm.is_finite() && radius_nm > 0.0) {
        return invalid(format!("vortex radius must be positive, got {radius_nm}"));
    }
    Ok(match mode {
        KperpEstimate::PaperConstant => KPERP_RADIUS_CONSTANT / radius_nm,
        KperpEstimate::ExactMaximum => first_maximum_j1_squared() * HBAR_C_KEV_NM / radius_nm,
    })
}

/// Inverse of [`kperp_from_vortex_radius`]: vortex radius in nm.
pub fn vortex_radius_from_kperp(k_perp: f64, mode: KperpEstimate) -> Option<f64> {
    if !(k_perp > 0.0 && k_perp.is_finite()) {
        return None;
    }
    Some(match mode {
        KperpEstimate::PaperConstant => KPERP_RADIUS_CONSTANT / k_perp,
        KperpEstimate::ExactMaximum => first_maximum_j1_squared() * HBAR_C_KEV_NM / k_perp,
    })
}

/// `(k cos θ₀, k sin θ₀)`.
pub fn angle_parametrization(theta0: f64, k: f64) -> Result<(f64, f64)> {
    if !(0.0..std::f64::consts::FRAC_PI_2).contains(&theta0) {
        return invalid(format!("opening angle must lie in [0, π/2), got {theta0}"));
    }
    if !(k.is_finite() && k >= 0.0) {
        return invalid(format!("wavenumber must be nonnegative, got {k}"));
    }
    Ok((k * theta0.cos(), k * theta0.sin()))
}
