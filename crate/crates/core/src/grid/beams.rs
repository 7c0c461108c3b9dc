use super::{fourier_transform, ComplexField, Direction, GridSpec, SpinorField};
use crate::error::{invalid, Result};
use crate::special::bessel_j_upto;
use num_complex::Complex64 as C64;

/// Circular aperture with a `tanh` edge; `edge_width == 0` gives a hard edge.
///
/// Soft edges keep aperture-limited Bessel beams smooth enough for spectral
/// derivatives.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Aperture {
    pub radius: f64,
    pub edge_width: f64,
}

impl Aperture {
    /// Edge width as a fraction of the radius for [`Aperture::soft`].
    pub const SOFT_EDGE_FRACTION: f64 = 0.1;
    /// Default radius as a fraction of the grid half width.
    pub const DEFAULT_FILL: f64 = 0.45;

    pub fn hard(radius: f64) -> Self {
        Self {
            radius,
            edge_width: 0.0,
        }
    }

    pub fn soft(radius: f64) -> Self {
        Self {
            radius,
            edge_width: radius * Self::SOFT_EDGE_FRACTION,
        }
    }

    /// Soft aperture filling 45% of the grid half width.
    pub fn default_for(grid: &GridSpec) -> Self {
        Self::soft(Self::DEFAULT_FILL * grid.half_width())
    }

    #[inline]
    pub fn transmission(&self, r: f64) -> f64 {
        if self.edge_width <= 0.0 {
            if r <= self.radius {
                1.0
            } else {
                0.0
            }
        } else {
            0.5 * (1.0 - ((r - self.radius) / self.edge_width).tanh())
        }
    }

    pub(crate) fn validate(&self, grid: &GridSpec) -> Result<()> {
        if !(self.radius > 0.0 && self.edge_width >= 0.0) {
            return invalid(format!("aperture radius must be positive: {self:?}"));
        }
        if self.radius + 2.0 * self.edge_width > grid.half_width() {
            return invalid(format!(
                "aperture radius {} (edge {}) does not fit in grid half width {}",
                self.radius,
                self.edge_width,
                grid.half_width()
            ));
        }
        Ok(())
    }
}

/// Radial amplitude of a scalar vortex.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Radial {
    /// `J_order(k⊥ r)`.
    Bessel { k_perp: f64, order: i32 },
    /// `exp(-r²/w²)`.
    Gaussian { waist: f64 },
    /// Unit amplitude inside a hard disk.
    Disk { radius: f64 },
}

impl Radial {
    pub fn eval(&self, r: f64) -> f64 {
        match *self {
            Radial::Bessel { k_perp, order } => {
                let m = order.unsigned_abs() as usize;
                let mut buf = vec![0.0; m + 1];
                bessel_j_upto(k_perp * r, &mut buf);
                crate::special::signed_order(order, buf[m])
            }
            Radial::Gaussian { waist } => (-(r * r) / (waist * waist)).exp(),
            Radial::Disk { radius } => {
                if r <= radius {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    fn validate(&self, grid: &GridSpec) -> Result<()> {
        match *self {
            Radial::Bessel { k_perp, .. } => {
                if !(k_perp > 0.0 && k_perp.is_finite()) {
                    return invalid(format!("Bessel k_perp must be positive, got {k_perp}"));
                }
                grid.check_sampling(k_perp)
            }
            Radial::Gaussian { waist } if !(waist > 0.0) => {
                invalid(format!("Gaussian waist must be positive, got {waist}"))
            }
            Radial::Disk { radius } if !(radius > 0.0) || radius > grid.half_width() => invalid(
                format!("disk radius {radius} must be positive and fit in the grid"),
            ),
            _ => Ok(()),
        }
    }
}

/// Samples `e^{imφ}·radial(r)`, optionally multiplied by an aperture.
/// At the origin the phase is taken as zero.
pub fn make_scalar_vortex(
    grid: &GridSpec,
    m: i32,
    radial: Radial,
    aperture: Option<Aperture>,
) -> Result<ComplexField> {
    radial.validate(grid)?;
    if let Some(a) = &aperture {
        a.validate(grid)?;
    }
    Ok(ComplexField::from_fn(*grid, |x, y| {
        let r = (x * x + y * y).sqrt();
        let w = aperture.map_or(1.0, |a| a.transmission(r));
        C64::from_polar(radial.eval(r) * w, m as f64 * y.atan2(x))
    }))
}

/// How an infinite Bessel mode is made square-integrable on the grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Window {
    /// Raw samples of the analytic mode.
    None,
    /// Analytic samples multiplied by an aperture transmission.
    Aperture(Aperture),
    /// Superposition of modes with transverse wavenumbers in a Gaussian shell
    /// of the given width around the nominal `k⊥`, assembled in Fourier space.
    /// Every plane-wave constituent carries the exact mode spinor for its own
    /// transverse momentum.
    MomentumShell { width: f64 },
}

impl Window {
    pub fn default_aperture(grid: &GridSpec) -> Self {
        Window::Aperture(Aperture::default_for(grid))
    }

    /// Shell narrow enough that the spatial envelope `e^{-r²Δ²/2}` has decayed
    /// to ~1e-14 at the grid edge.
    pub fn default_shell(grid: &GridSpec) -> Self {
        Window::MomentumShell {
            width: 8.0 / grid.half_width(),
        }
    }
}

/// Builds an `N`-component Bessel mode whose component `c` is
/// `coeffs(k⊥)[c] · e^{i·orders[c]·φ} · J_orders[c](k⊥ r)`.
///
/// `coeffs` receives the transverse wavenumber so that momentum-shell windows
/// can evaluate each constituent with its own coefficients; it returns `None`
/// for wavenumbers that do not propagate. The overall scale of a shell-built
/// mode is arbitrary.
pub fn bessel_spinor<const N: usize>(
    grid: &GridSpec,
    k_perp: f64,
    orders: [i32; N],
    coeffs: impl Fn(f64) -> Option<[C64; N]>,
    window: &Window,
) -> Result<SpinorField<N>> {
    if !(k_perp > 0.0 && k_perp.is_finite()) {
        return invalid(format!("k_perp must be positive, got {k_perp}"));
    }
    grid.check_sampling(k_perp)?;
    let max_order = orders
        .iter()
        .map(|o| o.unsigned_abs() as usize)
        .max()
        .unwrap_or(0);
    match *window {
        Window::None | Window::Aperture(_) => {
            let aperture = match window {
                Window::Aperture(a) => {
                    a.validate(grid)?;
                    Some(*a)
                }
                _ => None,
            };
            let c = coeffs(k_perp).ok_or_else(|| {
                crate::error::VortexError::InvalidParameter(format!(
                    "mode does not propagate at k_perp = {k_perp}"
                ))
            })?;
            let mut values: [Vec<C64>; N] = std::array::from_fn(|_| Vec::with_capacity(grid.len()));
            let mut j = vec![0.0; max_order + 1];
            for (x, y) in grid.coords() {
                let r = (x * x + y * y).sqrt();
                let phi = y.atan2(x);
                bessel_j_upto(k_perp * r, &mut j);
                let w = aperture.map_or(1.0, |a| a.transmission(r));
                for ch in 0..N {
                    let o = orders[ch];
                    let amp = crate::special::signed_order(o, j[o.unsigned_abs() as usize]);
                    values[ch].push(c[ch] * C64::from_polar(amp * w, o as f64 * phi));
                }
            }
            let comps = values.map(|v| ComplexField::from_values_unchecked(*grid, v));
            SpinorField::new(comps)
        }
        Window::MomentumShell { width } => {
            if !(width > 0.0) {
                return invalid(format!("shell width must be positive, got {width}"));
            }
            let (nyq_x, nyq_y) = grid.nyquist();
            if k_perp + 8.0 * width >= nyq_x.min(nyq_y) {
                return invalid("momentum shell extends past the Nyquist wavenumber");
            }
            let recip = grid.reciprocal();
            let mut spectra: [Vec<C64>; N] =
                std::array::from_fn(|_| Vec::with_capacity(grid.len()));
            // (-i)^o turns e^{ioθ} in k-space into +e^{ioφ}J_o in real space
            let phase: [C64; N] = orders.map(|o| C64::new(0.0, -1.0).powi(o));
            for (kx, ky) in super::fft::reciprocal_coords(grid) {
                let p = (kx * kx + ky * ky).sqrt();
                let t = (p - k_perp) / width;
                let weight = if t.abs() < 12.0 {
                    (-0.5 * t * t).exp()
                } else {
                    0.0
                };
                let c = if weight > 0.0 && p > 0.0 {
                    coeffs(p)
                } else {
                    None
                };
                let theta = ky.atan2(kx);
                for ch in 0..N {
                    let v = match c {
                        Some(c) => {
                            c[ch] * phase[ch] * C64::from_polar(weight, orders[ch] as f64 * theta)
                        }
                        None => C64::new(0.0, 0.0),
                    };
                    spectra[ch].push(v);
                }
            }
            let comps = spectra.map(|s| {
                let f = ComplexField::from_values_unchecked(recip, s);
                let mut out = fourier_transform(&f, Direction::Inverse);
                // keep the nominal grid exactly
                out = ComplexField::from_values_unchecked(*grid, out.into_values());
                out
            });
            // scale so the peak amplitude is one
            let peak = comps.iter().map(|c| c.max_abs()).fold(0.0, f64::max);
            let s = if peak > 0.0 { 1.0 / peak } else { 1.0 };
            let comps = comps.map(|c| c.scaled(C64::new(s, 0.0)));
            SpinorField::new(comps)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{lz_expectation, topological_charge};

    #[test]
    fn gaussian_vortex_zero_is_real_positive() {
        let g = GridSpec::square(32, 0.2).unwrap();
        let f = make_scalar_vortex(&g, 0, Radial::Gaussian { waist: 1.0 }, None).unwrap();
        assert!(f.values().iter().all(|v| v.im == 0.0 && v.re > 0.0));
    }

    #[test]
    fn bessel_vortex_center_and_winding() {
        let g = GridSpec::square(128, 0.1).unwrap();
        let k = 2.0;
        let f = make_scalar_vortex(
            &g,
            1,
            Radial::Bessel {
                k_perp: k,
                order: 1,
            },
            None,
        )
        .unwrap();
        assert_eq!(f.values()[g.center_index()], C64::new(0.0, 0.0));
        assert_eq!(topological_charge(&f, 0.9).unwrap().charge, 1);
    }

    #[test]
    fn phase_ramp_of_second_order() {
        let g = GridSpec::square(64, 0.5).unwrap();
        let f = make_scalar_vortex(&g, 2, Radial::Disk { radius: 12.0 }, None).unwrap();
        assert_eq!(topological_charge(&f, 5.0).unwrap().charge, 2);
    }

    #[test]
    fn sampling_guard_applies_to_bessel() {
        let g = GridSpec::square(64, 1.0).unwrap();
        let r = make_scalar_vortex(
            &g,
            1,
            Radial::Bessel {
                k_perp: 1.0,
                order: 1,
            },
            None,
        );
        assert!(r.is_err());
    }

    #[test]
    fn aperture_limited_bessel_is_lz_eigen() {
        let k = 1.0;
        let g = GridSpec::square(256, (std::f64::consts::PI / 6.0) / k).unwrap();
        let f = make_scalar_vortex(
            &g,
            1,
            Radial::Bessel {
                k_perp: k,
                order: 1,
            },
            Some(Aperture::default_for(&g)),
        )
        .unwrap();
        let lz = lz_expectation(&f).unwrap();
        assert!((lz - 1.0).abs() < 1e-6, "{lz}");
    }

    #[test]
    fn shell_mode_matches_bessel_near_axis() {
        let k = 1.0;
        let g = GridSpec::square(256, (std::f64::consts::PI / 8.0) / k).unwrap();
        let shell = bessel_spinor(
            &g,
            k,
            [2],
            |_| Some([C64::new(1.0, 0.0)]),
            &Window::default_shell(&g),
        )
        .unwrap();
        let f = shell.component(0);
        assert_eq!(topological_charge(f, 3.0).unwrap().charge, 2);
        // real-space profile tracks J_2 close to the axis, up to the slowly
        // varying envelope from the finite shell width
        let c = f.values()[g.index(g.nx / 2 + 4, g.ny / 2)];
        let scale = c.re / crate::special::bessel_j(2, k * g.x(g.nx / 2 + 4));
        for dx in 1..6 {
            let v = f.values()[g.index(g.nx / 2 + dx, g.ny / 2)];
            let j = crate::special::bessel_j(2, k * g.x(g.nx / 2 + dx));
            assert!((v.re - scale * j).abs() < 0.05 * scale.abs(), "dx={dx}");
            assert!(v.im.abs() < 1e-10);
        }
    }
}
