use super::{spectral_gradient, ComplexField, GridSpec, RadialProfile};
use crate::error::{invalid, Result, VortexError};
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

/// `∫ |ψ|² dA` by the midpoint rule.
pub fn quadrature_norm(field: &ComplexField) -> f64 {
    field.values().iter().map(|v| v.norm_sqr()).sum::<f64>() * field.grid().pixel_area()
}

/// Rescales `field` so that [`quadrature_norm`] is one.
pub fn normalize(field: &ComplexField) -> Result<ComplexField> {
    let n = quadrature_norm(field);
    if !(n > 0.0) {
        return Err(VortexError::Degenerate(
            "cannot normalize an identically zero field".into(),
        ));
    }
    Ok(field.scaled(C64::new(1.0 / n.sqrt(), 0.0)))
}

/// `L_z ψ = -i (x ∂_y - y ∂_x) ψ` with spectral derivatives.
pub fn apply_lz(field: &ComplexField) -> ComplexField {
    let g = *field.grid();
    let (fx, fy) = spectral_gradient(field);
    let values = g
        .coords()
        .zip(fx.values().iter().zip(fy.values()))
        .map(|((x, y), (&dx, &dy))| C64::new(0.0, -1.0) * (dy * x - dx * y))
        .collect();
    ComplexField::from_values_unchecked(g, values)
}

/// `⟨ψ|L_z ψ⟩ / ⟨ψ|ψ⟩` (real part).
pub fn lz_expectation(field: &ComplexField) -> Result<f64> {
    let n = quadrature_norm(field);
    if !(n > 0.0) {
        return Err(VortexError::Degenerate("zero field has no ⟨L_z⟩".into()));
    }
    Ok(field.inner_unchecked(&apply_lz(field)).re / n)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChargeMeasurement {
    pub charge: i64,
    /// Unrounded winding minus `charge`.
    pub residual: f64,
    pub loop_radius: f64,
}

/// Default amplitude floor on the loop, relative to the field maximum.
pub const CHARGE_AMPLITUDE_FLOOR: f64 = 1e-6;

/// Winding number of the phase around a circle of `loop_radius` centered on
/// the origin. Each step's phase difference is wrapped to (-π, π].
pub fn topological_charge(field: &ComplexField, loop_radius: f64) -> Result<ChargeMeasurement> {
    topological_charge_with_floor(field, loop_radius, CHARGE_AMPLITUDE_FLOOR)
}

pub fn topological_charge_with_floor(
    field: &ComplexField,
    loop_radius: f64,
    floor: f64,
) -> Result<ChargeMeasurement> {
    let g = field.grid();
    if !(loop_radius > 0.0) || loop_radius > g.half_width() - g.dx.max(g.dy) {
        return invalid(format!(
            "loop radius {loop_radius} must be positive and inside the grid (half width {})",
            g.half_width()
        ));
    }
    let max = field.max_abs();
    let steps = ((16.0 * PI * loop_radius / g.dx.min(g.dy)).ceil() as usize).max(64);
    let samples: Vec<C64> = (0..steps)
        .map(|j| {
            let t = 2.0 * PI * j as f64 / steps as f64;
            field.sample(loop_radius * t.cos(), loop_radius * t.sin())
        })
        .collect();
    let weakest = samples
        .iter()
        .map(|v| v.norm())
        .fold(f64::INFINITY, f64::min);
    if !(weakest > floor * max) {
        return Err(VortexError::AmbiguousCharge(format!(
            "amplitude {weakest:.3e} on loop r={loop_radius} is below {floor:.0e} of max {max:.3e}"
        )));
    }
    let mut total = 0.0;
    for j in 0..steps {
        let a = samples[j];
        let b = samples[(j + 1) % steps];
        let step = (b * a.conj()).arg();
        // a near-π jump between neighbors means a zero sits between them
        if step.abs() > 0.75 * PI {
            return Err(VortexError::AmbiguousCharge(format!(
                "phase jumps by {step:.3} between loop samples at r={loop_radius}"
            )));
        }
        total += step;
    }
    let winding = total / (2.0 * PI);
    let charge = winding.round();
    Ok(ChargeMeasurement {
        charge: charge as i64,
        residual: winding - charge,
        loop_radius,
    })
}

/// Radius in `[r_min, r_max]` where the azimuthally averaged amplitude peaks.
/// Used to place the charge loop on the bright ring of a vortex.
pub fn auto_loop_radius(field: &ComplexField, r_min: f64, r_max: f64) -> f64 {
    let g = field.grid();
    let step = g.dx.min(g.dy);
    let nb = ((r_max / step).floor() as usize).max(1) + 1;
    let mut sum = vec![0.0; nb];
    let mut count = vec![0usize; nb];
    for (i, (x, y)) in g.coords().enumerate() {
        let b = ((x * x + y * y).sqrt() / step).round() as usize;
        if b < nb {
            sum[b] += field.values()[i].norm();
            count[b] += 1;
        }
    }
    let mut best = (r_min.max(step), f64::NEG_INFINITY);
    for b in 0..nb {
        let r = b as f64 * step;
        if r < r_min || r > r_max || count[b] == 0 {
            continue;
        }
        let m = sum[b] / count[b] as f64;
        if m > best.1 {
            best = (r, m);
        }
    }
    best.0
}

/// Azimuthal mean of `density` in annular bins of width `Δr = r_max/nbins`
/// where `r_max` is the grid half width; bin `i` is centered at `i·Δr`.
pub fn radial_average(density: &[f64], grid: &GridSpec, nbins: usize) -> Result<RadialProfile> {
    if nbins < 8 {
        return invalid(format!("need at least 8 radial bins, got {nbins}"));
    }
    if density.len() != grid.len() {
        return invalid("density length does not match grid");
    }
    let dr = grid.half_width() / nbins as f64;
    if dr < grid.dx.max(grid.dy) {
        return invalid(format!(
            "{nbins} bins are finer than the pixel pitch; at most {} allowed",
            (grid.half_width() / grid.dx.max(grid.dy)).floor()
        ));
    }
    let mut sum = vec![0.0; nbins];
    let mut count = vec![0usize; nbins];
    for ((x, y), &d) in grid.coords().zip(density) {
        let b = ((x * x + y * y).sqrt() / dr + 0.5).floor() as usize;
        if b < nbins {
            sum[b] += d;
            count[b] += 1;
        }
    }
    let radii = (0..nbins).map(|i| i as f64 * dr).collect();
    let values = sum
        .iter()
        .zip(&count)
        .map(|(s, &c)| if c > 0 { s / c as f64 } else { 0.0 })
        .collect();
    RadialProfile::new(radii, values)
}
