//! Sampled complex fields on uniform, centered 2D grids.
//!
//! Pixel `(ix, iy)` sits at `x = (ix - nx/2)·dx`, `y = (iy - ny/2)·dy`, so the
//! origin is always a pixel center. Storage is row-major (`iy·nx + ix`).

mod beams;
mod fft;
mod ops;

pub use beams::{bessel_spinor, make_scalar_vortex, Aperture, Radial, Window};
pub(crate) use fft::reciprocal_coords as fft_coords;
pub use fft::{fourier_transform, spectral_gradient, Direction};
pub use ops::{
    apply_lz, auto_loop_radius, lz_expectation, normalize, quadrature_norm, radial_average,
    topological_charge, topological_charge_with_floor, ChargeMeasurement, CHARGE_AMPLITUDE_FLOOR,
};

use crate::error::{invalid, Result, VortexError};
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
}

impl GridSpec {
    pub const MIN_SIZE: usize = 16;

    pub fn new(nx: usize, ny: usize, dx: f64, dy: f64) -> Result<Self> {
        if nx < Self::MIN_SIZE || ny < Self::MIN_SIZE {
            return invalid(format!(
                "grid must be at least {0}x{0}, got {nx}x{ny}",
                Self::MIN_SIZE
            ));
        }
        if !(dx.is_finite() && dx > 0.0 && dy.is_finite() && dy > 0.0) {
            return invalid(format!("grid spacing must be positive, got ({dx}, {dy})"));
        }
        Ok(Self { nx, ny, dx, dy })
    }

    pub fn square(n: usize, d: f64) -> Result<Self> {
        Self::new(n, n, d, d)
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn x(&self, ix: usize) -> f64 {
        (ix as f64 - (self.nx / 2) as f64) * self.dx
    }

    #[inline]
    pub fn y(&self, iy: usize) -> f64 {
        (iy as f64 - (self.ny / 2) as f64) * self.dy
    }

    #[inline]
    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.nx + ix
    }

    /// Index of the pixel at the origin.
    pub fn center_index(&self) -> usize {
        self.index(self.nx / 2, self.ny / 2)
    }

    pub fn pixel_area(&self) -> f64 {
        self.dx * self.dy
    }

    /// Largest radius of a circle centered at the origin that fits the grid.
    pub fn half_width(&self) -> f64 {
        ((self.nx / 2) as f64 * self.dx).min((self.ny / 2) as f64 * self.dy)
    }

    /// Largest representable wavenumbers `(π/dx, π/dy)`.
    pub fn nyquist(&self) -> (f64, f64) {
        (PI / self.dx, PI / self.dy)
    }

    /// Grid of the centered discrete Fourier transform: spacing `2π/(n·d)`.
    pub fn reciprocal(&self) -> GridSpec {
        GridSpec {
            nx: self.nx,
            ny: self.ny,
            dx: 2.0 * PI / (self.nx as f64 * self.dx),
            dy: 2.0 * PI / (self.ny as f64 * self.dy),
        }
    }

    /// Refuses transverse wavenumbers with fewer than eight samples per period.
    pub fn check_sampling(&self, k_perp: f64) -> Result<()> {
        let limit = PI / 4.0;
        if k_perp * self.dx >= limit || k_perp * self.dy >= limit {
            return Err(VortexError::Sampling(format!(
                "k_perp·d = {:.4} must stay below π/4 (grid spacing {} x {})",
                k_perp * self.dx.max(self.dy),
                self.dx,
                self.dy
            )));
        }
        Ok(())
    }

    /// Same shape and spacing up to rounding.
    pub fn matches(&self, other: &GridSpec) -> bool {
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs());
        self.nx == other.nx
            && self.ny == other.ny
            && close(self.dx, other.dx)
            && close(self.dy, other.dy)
    }

    pub(crate) fn ensure_matches(&self, other: &GridSpec) -> Result<()> {
        if self.matches(other) {
            Ok(())
        } else {
            Err(VortexError::GridMismatch(format!("{self:?} vs {other:?}")))
        }
    }

    /// `(x, y)` for every pixel in storage order.
    pub fn coords(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        (0..self.ny).flat_map(move |iy| (0..self.nx).map(move |ix| (self.x(ix), self.y(iy))))
    }
}

/// Complex amplitude per pixel.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexField {
    grid: GridSpec,
    values: Vec<C64>,
}

impl ComplexField {
    pub fn new(grid: GridSpec, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.len() {
            return invalid(format!(
                "field has {} values for a {}x{} grid",
                values.len(),
                grid.nx,
                grid.ny
            ));
        }
        if values
            .iter()
            .any(|v| !(v.re.is_finite() && v.im.is_finite()))
        {
            return invalid("field contains non-finite values");
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            grid,
            values: vec![C64::new(0.0, 0.0); grid.len()],
        }
    }

    /// Samples `f(x, y)` at every pixel center.
    pub fn from_fn(grid: GridSpec, mut f: impl FnMut(f64, f64) -> C64) -> Self {
        let values = grid.coords().map(|(x, y)| f(x, y)).collect();
        Self { grid, values }
    }

    pub(crate) fn from_values_unchecked(grid: GridSpec, values: Vec<C64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [C64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<C64> {
        self.values
    }

    pub fn at(&self, ix: usize, iy: usize) -> C64 {
        self.values[self.grid.index(ix, iy)]
    }

    pub fn intensity(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `∫ conj(self)·other dA` by the midpoint rule.
    pub fn inner(&self, other: &ComplexField) -> Result<C64> {
        self.grid.ensure_matches(&other.grid)?;
        Ok(self.inner_unchecked(other))
    }

    pub(crate) fn inner_unchecked(&self, other: &ComplexField) -> C64 {
        let s: C64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.conj() * b)
            .sum();
        s * self.grid.pixel_area()
    }

    pub fn scaled(&self, factor: C64) -> ComplexField {
        self.map(|v| v * factor)
    }

    pub fn map(&self, mut f: impl FnMut(C64) -> C64) -> ComplexField {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Pointwise `f(self, other)`.
    pub fn zip_with(
        &self,
        other: &ComplexField,
        mut f: impl FnMut(C64, C64) -> C64,
    ) -> Result<ComplexField> {
        self.grid.ensure_matches(&other.grid)?;
        Ok(Self {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn add(&self, other: &ComplexField) -> Result<ComplexField> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn mul(&self, other: &ComplexField) -> Result<ComplexField> {
        self.zip_with(other, |a, b| a * b)
    }

    /// `a·self + b·other`.
    pub fn lincomb(&self, a: C64, other: &ComplexField, b: C64) -> Result<ComplexField> {
        self.zip_with(other, |u, v| a * u + b * v)
    }

    pub fn is_identically_zero(&self) -> bool {
        self.values.iter().all(|v| v.re == 0.0 && v.im == 0.0)
    }

    /// Bilinear interpolation at `(x, y)`; zero outside the grid.
    pub fn sample(&self, x: f64, y: f64) -> C64 {
        let g = &self.grid;
        let fx = x / g.dx + (g.nx / 2) as f64;
        let fy = y / g.dy + (g.ny / 2) as f64;
        if fx < 0.0 || fy < 0.0 || fx > (g.nx - 1) as f64 || fy > (g.ny - 1) as f64 {
            return C64::new(0.0, 0.0);
        }
        let ix = (fx.floor() as usize).min(g.nx - 2);
        let iy = (fy.floor() as usize).min(g.ny - 2);
        let tx = fx - ix as f64;
        let ty = fy - iy as f64;
        let v00 = self.at(ix, iy);
        let v10 = self.at(ix + 1, iy);
        let v01 = self.at(ix, iy + 1);
        let v11 = self.at(ix + 1, iy + 1);
        v00 * ((1.0 - tx) * (1.0 - ty))
            + v10 * (tx * (1.0 - ty))
            + v01 * ((1.0 - tx) * ty)
            + v11 * (tx * ty)
    }
}

/// `N` complex components sharing one grid.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinorField<const N: usize> {
    components: [ComplexField; N],
}

pub type Spinor2Field = SpinorField<2>;
pub type Spinor4Field = SpinorField<4>;

impl<const N: usize> SpinorField<N> {
    pub fn new(components: [ComplexField; N]) -> Result<Self> {
        let g = *components[0].grid();
        for c in &components[1..] {
            g.ensure_matches(c.grid())?;
        }
        Ok(Self { components })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            components: std::array::from_fn(|_| ComplexField::zeros(grid)),
        }
    }

    pub fn grid(&self) -> &GridSpec {
        self.components[0].grid()
    }

    pub fn component(&self, i: usize) -> &ComplexField {
        &self.components[i]
    }

    pub fn components(&self) -> &[ComplexField; N] {
        &self.components
    }

    pub fn into_components(self) -> [ComplexField; N] {
        self.components
    }

    /// `Σ_c |ψ^c|²` per pixel.
    pub fn density(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.grid().len()];
        for c in &self.components {
            for (o, v) in out.iter_mut().zip(c.values()) {
                *o += v.norm_sqr();
            }
        }
        debug_assert!(out.iter().all(|&d| d >= 0.0));
        out
    }

    pub fn norm_sq(&self) -> f64 {
        self.components.iter().map(quadrature_norm).sum()
    }

    pub fn inner(&self, other: &Self) -> Result<C64> {
        let mut s = C64::new(0.0, 0.0);
        for (a, b) in self.components.iter().zip(&other.components) {
            s += a.inner(b)?;
        }
        Ok(s)
    }

    pub fn scaled(&self, factor: C64) -> Self {
        Self {
            components: std::array::from_fn(|i| self.components[i].scaled(factor)),
        }
    }

    pub fn map_components(&self, mut f: impl FnMut(usize, &ComplexField) -> ComplexField) -> Self {
        Self {
            components: std::array::from_fn(|i| f(i, &self.components[i])),
        }
    }

    /// `‖self - other‖ / ‖other‖` over all components.
    pub fn relative_distance(&self, other: &Self) -> Result<f64> {
        let mut num = 0.0;
        for (a, b) in self.components.iter().zip(&other.components) {
            a.grid().ensure_matches(b.grid())?;
            num += a
                .values()
                .iter()
                .zip(b.values())
                .map(|(u, v)| (u - v).norm_sqr())
                .sum::<f64>();
        }
        let den: f64 = other
            .components
            .iter()
            .map(|c| c.values().iter().map(|v| v.norm_sqr()).sum::<f64>())
            .sum();
        Ok((num / den).sqrt())
    }
}

/// Real-valued curve on an ascending radial mesh starting at zero.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialProfile {
    radii: Vec<f64>,
    values: Vec<f64>,
}

impl RadialProfile {
    pub fn new(radii: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if radii.len() != values.len() || radii.is_empty() {
            return invalid("radial profile needs equal-length, nonempty radii and values");
        }
        if radii[0] != 0.0 {
            return invalid("radial profile must start at r = 0");
        }
        if radii.windows(2).any(|w| w[1] <= w[0]) {
            return invalid("radial profile radii must be strictly increasing");
        }
        Ok(Self { radii, values })
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    /// Index of the largest value.
    pub fn argmax(&self) -> usize {
        self.values
            .iter()
            .enumerate()
            .fold(
                (0, f64::NEG_INFINITY),
                |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc },
            )
            .0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation() {
        assert!(GridSpec::square(8, 1.0).is_err());
        assert!(GridSpec::square(16, 0.0).is_err());
        let g = GridSpec::square(64, 0.5).unwrap();
        assert_eq!(g.x(32), 0.0);
        assert_eq!(g.y(0), -16.0);
        assert_eq!(g.half_width(), 16.0);
        let r = g.reciprocal().reciprocal();
        assert!(g.matches(&r));
    }

    #[test]
    fn sampling_guard() {
        let g = GridSpec::square(64, 0.1).unwrap();
        assert!(g.check_sampling(7.0).is_ok());
        assert!(matches!(
            g.check_sampling(8.0),
            Err(VortexError::Sampling(_))
        ));
    }

    #[test]
    fn spinor_requires_shared_grid() {
        let a = ComplexField::zeros(GridSpec::square(16, 1.0).unwrap());
        let b = ComplexField::zeros(GridSpec::square(16, 2.0).unwrap());
        assert!(Spinor2Field::new([a.clone(), b]).is_err());
        assert!(Spinor2Field::new([a.clone(), a]).is_ok());
    }

    #[test]
    fn rejects_non_finite() {
        let g = GridSpec::square(16, 1.0).unwrap();
        let mut v = vec![C64::new(0.0, 0.0); g.len()];
        v[3] = C64::new(f64::NAN, 0.0);
        assert!(ComplexField::new(g, v).is_err());
    }

    #[test]
    fn radial_profile_invariants() {
        assert!(RadialProfile::new(vec![0.0, 1.0, 1.0], vec![0.0; 3]).is_err());
        assert!(RadialProfile::new(vec![0.5, 1.0], vec![0.0; 2]).is_err());
        assert!(RadialProfile::new(vec![0.0, 1.0], vec![0.0; 2]).is_ok());
    }
}
