//! Fourier-transform holography with scalar and matrix-valued masks.
//!
//! A scalar mask records `|Ψ_R + Ψ_T|²` for a tilted plane reference
//! `Ψ_R = e^{i k_x x}` and a unit-amplitude phase vortex `Ψ_T = e^{inφ}` inside
//! a circular aperture. Illuminating it with the same reference gives
//! `(1 + |Ψ_T|²)Ψ_R + Ψ_T + Ψ_T^* Ψ_R²`, i.e. far-field lobes at offsets
//! `0`, `k_x` and `2k_x` holding the target, the reference and the conjugate.
//! Order index `j` below always means the lobe centered at `j·k_x`.

use crate::error::{invalid, Result, VortexError};
use crate::grid::{
    auto_loop_radius, fourier_transform, quadrature_norm, ChargeMeasurement, ComplexField,
    Direction, GridSpec, Spinor2Field,
};
use crate::grid::{topological_charge, Aperture};
use num_complex::Complex64 as C64;
use serde::Serialize;
use std::f64::consts::PI;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Largest tilt per pixel: at least eight pixels per fringe.
pub const MAX_TILT_PER_PIXEL: f64 = PI / 4.0;

#[derive(Clone, Debug, PartialEq)]
pub struct HologramMask {
    grid: GridSpec,
    transmission: Vec<f64>,
    binarized: bool,
    pub tilt_kx: f64,
    pub target_n: i32,
    pub aperture_radius: f64,
}

impl HologramMask {
    /// Rebuilds a mask from stored transmission values (e.g. a VFLD file).
    pub fn from_parts(
        grid: GridSpec,
        transmission: Vec<f64>,
        tilt_kx: f64,
        target_n: i32,
        aperture_radius: f64,
    ) -> Result<Self> {
        if transmission.len() != grid.len() {
            return invalid("mask size does not match grid");
        }
        if transmission.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
            return invalid("mask transmission must be finite and nonnegative");
        }
        let binarized = transmission.iter().all(|&t| t == 0.0 || t == 1.0);
        Ok(Self {
            grid,
            transmission,
            binarized,
            tilt_kx,
            target_n,
            aperture_radius,
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn transmission(&self) -> &[f64] {
        &self.transmission
    }

    pub fn is_binarized(&self) -> bool {
        self.binarized
    }

    pub fn as_field(&self) -> ComplexField {
        let values = self
            .transmission
            .iter()
            .map(|&t| C64::new(t, 0.0))
            .collect();
        ComplexField::from_values_unchecked(self.grid, values)
    }
}

/// `k_x` that puts `fringes` full periods across the grid width. The
/// far-field lobes are then exactly `fringes` pixels apart.
pub fn tilt_from_fringes(grid: &GridSpec, fringes: f64) -> f64 {
    2.0 * PI * fringes / (grid.nx as f64 * grid.dx)
}

/// `e^{i k_x x}` over the whole grid.
pub fn reference_wave(grid: &GridSpec, tilt_kx: f64) -> ComplexField {
    ComplexField::from_fn(*grid, |x, _| C64::from_polar(1.0, tilt_kx * x))
}

fn check_tilt(grid: &GridSpec, tilt_kx: f64) -> Result<()> {
    if !(tilt_kx.is_finite() && tilt_kx > 0.0) {
        return invalid(format!("reference tilt must be positive, got {tilt_kx}"));
    }
    if tilt_kx * grid.dx >= MAX_TILT_PER_PIXEL {
        return Err(VortexError::Sampling(format!(
            "tilt k_x·dx = {:.4} must stay below π/4 (≥ 8 pixels per fringe)",
            tilt_kx * grid.dx
        )));
    }
    Ok(())
}

fn check_aperture(grid: &GridSpec, radius: f64) -> Result<()> {
    if !(radius > 0.0) || radius > grid.half_width() {
        return invalid(format!(
            "aperture radius {radius} must be positive and at most the grid half width {}",
            grid.half_width()
        ));
    }
    Ok(())
}

/// Median of the values; mean of the two central ones for even counts.
fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Interference mask `|e^{ik_x x} + e^{inφ}|²` inside a hard circular aperture,
/// optionally thresholded at its median inside the aperture.
pub fn synthesize_scalar_mask(
    target_n: i32,
    tilt_kx: f64,
    aperture_radius: f64,
    grid: &GridSpec,
    binarize: bool,
) -> Result<HologramMask> {
    check_tilt(grid, tilt_kx)?;
    check_aperture(grid, aperture_radius)?;
    let aperture = Aperture::hard(aperture_radius);
    let raw: Vec<f64> = grid
        .coords()
        .map(|(x, y)| {
            let r = (x * x + y * y).sqrt();
            if aperture.transmission(r) == 0.0 {
                return 0.0;
            }
            let reference = C64::from_polar(1.0, tilt_kx * x);
            let target = C64::from_polar(1.0, target_n as f64 * y.atan2(x));
            (reference + target).norm_sqr()
        })
        .collect();
    let transmission = if binarize {
        let inside: Vec<f64> = grid
            .coords()
            .zip(&raw)
            .filter(|((x, y), _)| (x * x + y * y).sqrt() <= aperture_radius)
            .map(|(_, &v)| v)
            .collect();
        let threshold = median(inside);
        grid.coords()
            .zip(&raw)
            .map(|((x, y), &v)| {
                let inside = (x * x + y * y).sqrt() <= aperture_radius;
                if inside && v > threshold {
                    1.0
                } else {
                    0.0
                }
            })
            .collect()
    } else {
        raw
    };
    Ok(HologramMask {
        grid: *grid,
        transmission,
        binarized: binarize,
        tilt_kx,
        target_n,
        aperture_radius,
    })
}

/// Far field `F[mask · illumination]`.
pub fn reconstruct_far_field(
    mask: &HologramMask,
    illumination: &ComplexField,
) -> Result<ComplexField> {
    mask.grid.ensure_matches(illumination.grid())?;
    let transmitted = mask.as_field().mul(illumination)?;
    Ok(fourier_transform(&transmitted, Direction::Forward))
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiffractionOrder {
    pub index: i32,
    pub offset_px: i64,
    /// The lobe, re-centered and zero outside the extraction window.
    pub field: ComplexField,
    /// `None` when the phase winding is ambiguous (dark loop).
    pub charge: Option<ChargeMeasurement>,
}

/// Crops the lobe at `order·carrier` (a wavenumber on the far-field grid)
/// with a circular window of `window_radius_px` pixels and re-centers it.
pub fn extract_order(
    farfield: &ComplexField,
    order: i32,
    carrier: f64,
    window_radius_px: f64,
) -> Result<DiffractionOrder> {
    let g = *farfield.grid();
    let carrier_px = carrier / g.dx;
    if !(carrier_px >= 1.0) {
        return invalid(format!(
            "carrier of {carrier_px:.3} pixels cannot separate diffraction orders"
        ));
    }
    if !(window_radius_px > 0.0) || 2.0 * window_radius_px >= carrier_px {
        return Err(VortexError::OrderOverlap(format!(
            "window radius {window_radius_px} px overlaps neighbors {carrier_px:.2} px apart"
        )));
    }
    let offset_px = (order as f64 * carrier_px).round() as i64;
    let half = (g.nx / 2) as i64;
    if offset_px.abs() as f64 + window_radius_px >= half as f64 {
        return invalid(format!(
            "order {order} at {offset_px} px does not fit in a {}-pixel far field",
            g.nx
        ));
    }
    let mut out = ComplexField::zeros(g);
    let w = window_radius_px.ceil() as i64;
    let (cx, cy) = ((g.nx / 2) as i64, (g.ny / 2) as i64);
    for dy in -w..=w {
        for dx in -w..=w {
            if ((dx * dx + dy * dy) as f64).sqrt() > window_radius_px {
                continue;
            }
            let (sx, sy) = (cx + offset_px + dx, cy + dy);
            let (tx, ty) = (cx + dx, cy + dy);
            if sy < 0 || sy >= g.ny as i64 || ty < 0 || ty >= g.ny as i64 {
                continue;
            }
            let v = farfield.at(sx as usize, sy as usize);
            let idx = g.index(tx as usize, ty as usize);
            out.values_mut()[idx] = v;
        }
    }
    let step = g.dx.min(g.dy);
    let radius = auto_loop_radius(&out, 1.5 * step, 0.8 * window_radius_px * step);
    let charge = match topological_charge(&out, radius) {
        Ok(c) => Some(c),
        Err(VortexError::AmbiguousCharge(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(DiffractionOrder {
        index: order,
        offset_px,
        field: out,
        charge,
    })
}

/// `|⟨a|b⟩| / (‖a‖‖b‖)`.
pub fn overlap(a: &ComplexField, b: &ComplexField) -> Result<f64> {
    let ab = a.inner(b)?.norm();
    let den = (quadrature_norm(a) * quadrature_norm(b)).sqrt();
    if !(den > 0.0) {
        return Err(VortexError::Degenerate("overlap with a zero field".into()));
    }
    Ok(ab / den)
}

pub fn spinor_overlap(a: &Spinor2Field, b: &Spinor2Field) -> Result<f64> {
    let ab = a.inner(b)?.norm();
    let den = (a.norm_sq() * b.norm_sq()).sqrt();
    if !(den > 0.0) {
        return Err(VortexError::Degenerate("overlap with a zero spinor".into()));
    }
    Ok(ab / den)
}

/// Per-pixel 2×2 complex matrix `(a b; c d)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixMask {
    grid: GridSpec,
    entries: Vec<[C64; 4]>,
}

impl MatrixMask {
    pub fn new(grid: GridSpec, entries: Vec<[C64; 4]>) -> Result<Self> {
        if entries.len() != grid.len() {
            return invalid("matrix mask size does not match grid");
        }
        if entries
            .iter()
            .flatten()
            .any(|v| !(v.re.is_finite() && v.im.is_finite()))
        {
            return invalid("matrix mask entries must be finite");
        }
        Ok(Self { grid, entries })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn entries(&self) -> &[[C64; 4]] {
        &self.entries
    }

    /// Entries as four fields in `a, b, c, d` order.
    pub fn as_components(&self) -> [ComplexField; 4] {
        std::array::from_fn(|k| {
            ComplexField::from_values_unchecked(
                self.grid,
                self.entries.iter().map(|m| m[k]).collect(),
            )
        })
    }

    pub fn from_components(components: &[ComplexField; 4]) -> Result<Self> {
        let g = *components[0].grid();
        for c in &components[1..] {
            g.ensure_matches(c.grid())?;
        }
        let entries = (0..g.len())
            .map(|i| std::array::from_fn(|k| components[k].values()[i]))
            .collect();
        Self::new(g, entries)
    }

    /// Pointwise `M·Ψ`.
    pub fn apply(&self, psi: &Spinor2Field) -> Result<Spinor2Field> {
        self.grid.ensure_matches(psi.grid())?;
        let [u, d] = psi.components();
        let mut up = Vec::with_capacity(self.grid.len());
        let mut down = Vec::with_capacity(self.grid.len());
        for (i, m) in self.entries.iter().enumerate() {
            let (a, b) = (u.values()[i], d.values()[i]);
            up.push(m[0] * a + m[1] * b);
            down.push(m[2] * a + m[3] * b);
        }
        Spinor2Field::new([
            ComplexField::from_values_unchecked(self.grid, up),
            ComplexField::from_values_unchecked(self.grid, down),
        ])
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MatrixMaskOptions {
    pub c1: C64,
    pub c2: C64,
    pub c3: C64,
    /// Exchange up and down in the conjugate term.
    pub swap_conjugate: bool,
}

impl Default for MatrixMaskOptions {
    fn default() -> Self {
        let one = C64::new(1.0, 0.0);
        Self {
            c1: one,
            c2: one,
            c3: one,
            swap_conjugate: false,
        }
    }
}

/// `C₁Ψ_R + C₂Ψ_T + C₃Ψ_T^*` (with the conjugate's components optionally
/// swapped): the spinor a matrix mask should produce from the reference.
pub fn matrix_mask_target_output(
    target: &Spinor2Field,
    reference: &Spinor2Field,
    opts: &MatrixMaskOptions,
) -> Result<Spinor2Field> {
    reference.grid().ensure_matches(target.grid())?;
    let conj_src = |i: usize| {
        if opts.swap_conjugate {
            target.component(1 - i)
        } else {
            target.component(i)
        }
    };
    let comps: [ComplexField; 2] = std::array::from_fn(|i| {
        let r = reference.component(i).values();
        let t = target.component(i).values();
        let tc = conj_src(i).values();
        let v = (0..r.len())
            .map(|k| opts.c1 * r[k] + opts.c2 * t[k] + opts.c3 * tc[k].conj())
            .collect();
        ComplexField::from_values_unchecked(*reference.grid(), v)
    });
    Spinor2Field::new(comps)
}

/// Relative reference amplitude below which division is refused.
pub const REFERENCE_FLOOR: f64 = 1e-9;

/// Diagonal matrix mask with `M·Ψ_R = C₁Ψ_R + C₂Ψ_T + C₃Ψ_T^*` at every pixel.
///
/// Where the reference vanishes and the target does too, the diagonal entry
/// is set to `C₁`.
pub fn synthesize_matrix_mask(
    target: &Spinor2Field,
    reference: &Spinor2Field,
    opts: &MatrixMaskOptions,
) -> Result<MatrixMask> {
    let rhs = matrix_mask_target_output(target, reference, opts)?;
    let g = *reference.grid();
    let mut diag: [Vec<C64>; 2] = [Vec::with_capacity(g.len()), Vec::with_capacity(g.len())];
    for (i, d) in diag.iter_mut().enumerate() {
        let r = reference.component(i);
        let floor = REFERENCE_FLOOR * r.max_abs();
        let out = rhs.component(i).values();
        for (k, &rv) in r.values().iter().enumerate() {
            if rv.norm() > floor {
                d.push(out[k] / rv);
            } else {
                // C₁ψ_R is negligible here; anything left must come from the target
                let rest = out[k] - opts.c1 * rv;
                if rest.norm() > 0.0 {
                    return Err(VortexError::DivisionSingularity(format!(
                        "reference component {i} vanishes at pixel {k} where the target does not"
                    )));
                }
                d.push(opts.c1);
            }
        }
    }
    let zero = C64::new(0.0, 0.0);
    let entries = (0..g.len())
        .map(|k| [diag[0][k], zero, zero, diag[1][k]])
        .collect();
    MatrixMask::new(g, entries)
}

/// `M = a₀𝟙 + a·σ` per pixel.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliDecomposition {
    pub a0: ComplexField,
    /// `(a_x, a_y, a_z)`.
    pub a: [ComplexField; 3],
    /// `‖M − M†‖_F / ‖M‖_F` per pixel (zero where `M = 0`).
    pub hermiticity_defect: Vec<f64>,
}

pub fn pauli_decompose(mask: &MatrixMask) -> PauliDecomposition {
    let g = mask.grid;
    let n = g.len();
    let half = 0.5;
    let i = C64::new(0.0, 1.0);
    let mut a0 = Vec::with_capacity(n);
    let mut ax = Vec::with_capacity(n);
    let mut ay = Vec::with_capacity(n);
    let mut az = Vec::with_capacity(n);
    let mut defect = Vec::with_capacity(n);
    for m in &mask.entries {
        let [a, b, c, d] = *m;
        a0.push((a + d) * half);
        ax.push((b + c) * half);
        ay.push(i * (b - c) * half);
        az.push((a - d) * half);
        let fro: f64 = m.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        let anti = ((a - a.conj()).norm_sqr()
            + (b - c.conj()).norm_sqr()
            + (c - b.conj()).norm_sqr()
            + (d - d.conj()).norm_sqr())
        .sqrt();
        defect.push(if fro > 0.0 { anti / fro } else { 0.0 });
    }
    let f = |v| ComplexField::from_values_unchecked(g, v);
    PauliDecomposition {
        a0: f(a0),
        a: [f(ax), f(ay), f(az)],
        hermiticity_defect: defect,
    }
}

impl PauliDecomposition {
    /// `a₀𝟙 + a·σ` back to matrix entries.
    pub fn reconstruct(&self) -> MatrixMask {
        let g = *self.a0.grid();
        let i = C64::new(0.0, 1.0);
        let entries = (0..g.len())
            .map(|k| {
                let a0 = self.a0.values()[k];
                let (x, y, z) = (
                    self.a[0].values()[k],
                    self.a[1].values()[k],
                    self.a[2].values()[k],
                );
                [a0 + z, x - i * y, x + i * y, a0 - z]
            })
            .collect();
        MatrixMask { grid: g, entries }
    }

    pub fn max_hermiticity_defect(&self) -> f64 {
        self.hermiticity_defect.iter().copied().fold(0.0, f64::max)
    }

    /// Effective magnetic field `Re(a)/μ_B` per pixel. Only physical where the
    /// mask is Hermitian; check [`Self::hermiticity_defect`].
    pub fn effective_field(&self, bohr_magneton: f64) -> [Vec<f64>; 3] {
        std::array::from_fn(|k| {
            self.a[k]
                .values()
                .iter()
                .map(|v| v.re / bohr_magneton)
                .collect()
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrderReport {
    pub index: i32,
    pub offset_px: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub component: Option<usize>,
    pub charge: Option<i64>,
    pub residual: Option<f64>,
}

impl OrderReport {
    fn from_order(o: &DiffractionOrder, component: Option<usize>) -> Self {
        Self {
            index: o.index,
            offset_px: o.offset_px,
            component,
            charge: o.charge.map(|c| c.charge),
            residual: o.charge.map(|c| c.residual),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReconstructionReport {
    pub schema_version: u32,
    pub orders: Vec<OrderReport>,
    pub overlap_with_analytic: f64,
}

/// Parameters shared by the scalar and spinor hologram pipelines. Lengths are
/// in pixels (the grid spacing is one).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HologramSetup {
    pub size: usize,
    /// Fringes across the full grid width; also the lobe spacing in pixels.
    pub fringes: f64,
    /// Aperture radius as a fraction of the grid half width.
    pub aperture_fraction: f64,
    /// Extraction window radius as a fraction of the lobe spacing.
    pub window_fraction: f64,
}

impl Default for HologramSetup {
    fn default() -> Self {
        Self {
            size: 512,
            fringes: 40.0,
            aperture_fraction: 0.4,
            window_fraction: 0.45,
        }
    }
}

impl HologramSetup {
    pub fn grid(&self) -> Result<GridSpec> {
        GridSpec::square(self.size, 1.0)
    }

    pub fn aperture_radius(&self) -> Result<f64> {
        Ok(self.aperture_fraction * self.grid()?.half_width())
    }

    pub fn tilt(&self) -> Result<f64> {
        Ok(tilt_from_fringes(&self.grid()?, self.fringes))
    }

    pub fn window_px(&self) -> f64 {
        self.window_fraction * self.fringes
    }
}

/// Unit-amplitude `e^{inφ}` inside a hard disk.
pub fn aperture_vortex(grid: &GridSpec, n: i32, radius: f64) -> ComplexField {
    ComplexField::from_fn(*grid, |x, y| {
        if (x * x + y * y).sqrt() <= radius {
            C64::from_polar(1.0, n as f64 * y.atan2(x))
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

#[derive(Clone, Debug)]
pub struct ScalarReconstruction {
    pub mask: HologramMask,
    pub farfield: ComplexField,
    pub orders: Vec<DiffractionOrder>,
    pub overlap_with_analytic: f64,
}

impl ScalarReconstruction {
    pub fn target(&self) -> &DiffractionOrder {
        self.orders
            .iter()
            .find(|o| o.index == 0)
            .expect("target order")
    }

    pub fn report(&self) -> ReconstructionReport {
        ReconstructionReport {
            schema_version: REPORT_SCHEMA_VERSION,
            orders: self
                .orders
                .iter()
                .map(|o| OrderReport::from_order(o, None))
                .collect(),
            overlap_with_analytic: self.overlap_with_analytic,
        }
    }
}

/// Orders present for a mask under tilted-reference illumination.
pub fn expected_orders(binarized: bool) -> &'static [i32] {
    if binarized {
        &[-2, 0, 1, 2, 4]
    } else {
        &[0, 1, 2]
    }
}

/// Reconstructs an existing scalar mask with its own reference and extracts
/// the diffraction orders.
pub fn reconstruct_scalar(mask: HologramMask, window_px: f64) -> Result<ScalarReconstruction> {
    let grid = *mask.grid();
    let reference = reference_wave(&grid, mask.tilt_kx);
    let farfield = reconstruct_far_field(&mask, &reference)?;
    let carrier = mask.tilt_kx;
    let mut orders = Vec::new();
    for &j in expected_orders(mask.is_binarized()) {
        match extract_order(&farfield, j, carrier, window_px) {
            Ok(o) => orders.push(o),
            Err(VortexError::InvalidParameter(_)) if j != 0 => {} // off the grid
            Err(e) => return Err(e),
        }
    }
    let analytic = fourier_transform(
        &aperture_vortex(&grid, mask.target_n, mask.aperture_radius),
        Direction::Forward,
    );
    let target = orders
        .iter()
        .find(|o| o.index == 0)
        .ok_or_else(|| VortexError::Degenerate("target order missing".into()))?;
    let overlap_with_analytic = overlap(&target.field, &analytic)?;
    Ok(ScalarReconstruction {
        mask,
        farfield,
        orders,
        overlap_with_analytic,
    })
}

/// Mask synthesis, tilted-reference reconstruction and order extraction.
pub fn scalar_pipeline(
    setup: &HologramSetup,
    target_n: i32,
    binarize: bool,
) -> Result<ScalarReconstruction> {
    let grid = setup.grid()?;
    let mask = synthesize_scalar_mask(
        target_n,
        setup.tilt()?,
        setup.aperture_radius()?,
        &grid,
        binarize,
    )?;
    reconstruct_scalar(mask, setup.window_px())
}

#[derive(Clone, Debug)]
pub struct SpinorReconstruction {
    pub mask: MatrixMask,
    pub output: Spinor2Field,
    pub farfield: Spinor2Field,
    /// `orders[c]` holds the extracted lobes of component `c`.
    pub orders: [Vec<DiffractionOrder>; 2],
    pub target_order: i32,
    pub overlap_with_analytic: f64,
}

impl SpinorReconstruction {
    pub fn target_lobe(&self) -> [&DiffractionOrder; 2] {
        std::array::from_fn(|c| {
            self.orders[c]
                .iter()
                .find(|o| o.index == self.target_order)
                .expect("target lobe")
        })
    }

    pub fn report(&self) -> ReconstructionReport {
        let mut orders = Vec::new();
        for (c, list) in self.orders.iter().enumerate() {
            orders.extend(list.iter().map(|o| OrderReport::from_order(o, Some(c))));
        }
        ReconstructionReport {
            schema_version: REPORT_SCHEMA_VERSION,
            orders,
            overlap_with_analytic: self.overlap_with_analytic,
        }
    }
}

/// Far-field lobe holding `Ψ_T` in the spinor pipeline. The matrix-mask output
/// `C₁Ψ_R + C₂Ψ_T + C₃Ψ_T^*` carries no carrier on the target terms, so the
/// target is recorded with carrier `2k_x`; this puts `Ψ_T`, `Ψ_R` and `Ψ_T^*`
/// at orders `2`, `1` and `-2`.
pub const SPINOR_TARGET_ORDER: i32 = 2;

/// Matrix-mask hologram for the `J_z = n + ½` spinor
/// `(e^{inφ}, ±e^{i(n+1)φ})/√2` inside a hard aperture.
pub fn spinor_pipeline(
    setup: &HologramSetup,
    n: i32,
    helicity_sign: f64,
    opts: &MatrixMaskOptions,
) -> Result<SpinorReconstruction> {
    let grid = setup.grid()?;
    let radius = setup.aperture_radius()?;
    let kx = setup.tilt()?;
    check_tilt(&grid, kx)?;
    let w = std::f64::consts::FRAC_1_SQRT_2;
    let up = aperture_vortex(&grid, n, radius).scaled(C64::new(w, 0.0));
    let down = aperture_vortex(&grid, n + 1, radius).scaled(C64::new(w * helicity_sign, 0.0));
    let analytic_target = Spinor2Field::new([up.clone(), down.clone()])?;
    let carrier = reference_wave(&grid, SPINOR_TARGET_ORDER as f64 * kx);
    let target = Spinor2Field::new([up.mul(&carrier)?, down.mul(&carrier)?])?;
    let disk = aperture_vortex(&grid, 0, radius);
    let r = reference_wave(&grid, kx)
        .mul(&disk)?
        .scaled(C64::new(w, 0.0));
    let reference = Spinor2Field::new([r.clone(), r])?;

    let mask = synthesize_matrix_mask(&target, &reference, opts)?;
    let output = mask.apply(&reference)?;
    let farfield = output.map_components(|_, c| fourier_transform(c, Direction::Forward));
    let window = setup.window_px();
    let mut orders: [Vec<DiffractionOrder>; 2] = [Vec::new(), Vec::new()];
    for (c, list) in orders.iter_mut().enumerate() {
        for j in [-SPINOR_TARGET_ORDER, 1, SPINOR_TARGET_ORDER] {
            list.push(extract_order(farfield.component(c), j, kx, window)?);
        }
    }
    let lobe = Spinor2Field::new(std::array::from_fn(|c| {
        orders[c]
            .iter()
            .find(|o| o.index == SPINOR_TARGET_ORDER)
            .expect("target lobe")
            .field
            .clone()
    }))?;
    let analytic = analytic_target.map_components(|_, c| fourier_transform(c, Direction::Forward));
    let overlap_with_analytic = spinor_overlap(&lobe, &analytic)?;
    Ok(SpinorReconstruction {
        mask,
        output,
        farfield,
        orders,
        target_order: SPINOR_TARGET_ORDER,
        overlap_with_analytic,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> HologramSetup {
        HologramSetup {
            size: 256,
            fringes: 20.0,
            aperture_fraction: 0.4,
            window_fraction: 0.45,
        }
    }

    #[test]
    fn straight_grating_without_target_charge() {
        let r = scalar_pipeline(&small(), 0, true).unwrap();
        for o in &r.orders {
            if let Some(c) = o.charge {
                assert_eq!(c.charge, 0, "order {}", o.index);
            }
        }
    }

    #[test]
    fn raw_mask_lobes_carry_target_reference_conjugate() {
        let r = scalar_pipeline(&small(), 1, false).unwrap();
        let charges: Vec<(i32, i64)> = r
            .orders
            .iter()
            .map(|o| (o.index, o.charge.unwrap().charge))
            .collect();
        assert_eq!(charges, vec![(0, 1), (1, 0), (2, -1)]);
        assert!(r.overlap_with_analytic > 0.9);
    }

    #[test]
    fn binary_mask_values_and_fork() {
        let s = small();
        let g = s.grid().unwrap();
        let m = synthesize_scalar_mask(1, s.tilt().unwrap(), 40.0, &g, true).unwrap();
        assert!(m.is_binarized());
        let inside: Vec<f64> = g
            .coords()
            .zip(m.transmission())
            .filter(|((x, y), _)| (x * x + y * y).sqrt() <= 40.0)
            .map(|(_, &t)| t)
            .collect();
        let duty = inside.iter().sum::<f64>() / inside.len() as f64;
        assert!((duty - 0.5).abs() < 0.02, "duty {duty}");
    }

    #[test]
    fn tilt_and_aperture_guards() {
        let g = GridSpec::square(64, 1.0).unwrap();
        assert!(matches!(
            synthesize_scalar_mask(1, 1.0, 10.0, &g, false),
            Err(VortexError::Sampling(_))
        ));
        assert!(synthesize_scalar_mask(1, 0.3, 40.0, &g, false).is_err());
        assert!(synthesize_scalar_mask(1, 0.0, 10.0, &g, false).is_err());
    }

    #[test]
    fn order_window_overlap_is_rejected() {
        let s = small();
        let r = scalar_pipeline(&s, 1, false).unwrap();
        let carrier = s.fringes * r.farfield.grid().dx;
        assert!(matches!(
            extract_order(&r.farfield, 0, carrier, 0.6 * s.fringes),
            Err(VortexError::OrderOverlap(_))
        ));
    }

    #[test]
    fn grid_mismatch_on_reconstruction() {
        let g = GridSpec::square(64, 1.0).unwrap();
        let m = synthesize_scalar_mask(1, 0.5, 20.0, &g, false).unwrap();
        let other = ComplexField::zeros(GridSpec::square(32, 1.0).unwrap());
        assert!(matches!(
            reconstruct_far_field(&m, &other),
            Err(VortexError::GridMismatch(_))
        ));
    }

    #[test]
    fn zero_target_gives_identity_mask() {
        let g = GridSpec::square(32, 1.0).unwrap();
        let r = reference_wave(&g, 0.4);
        let reference = Spinor2Field::new([r.clone(), r]).unwrap();
        let target = Spinor2Field::zeros(g);
        let m = synthesize_matrix_mask(&target, &reference, &MatrixMaskOptions::default()).unwrap();
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        assert!(m.entries().iter().all(|e| *e == [one, zero, zero, one]));
    }

    #[test]
    fn pure_up_target_leaves_down_untouched() {
        let g = GridSpec::square(64, 1.0).unwrap();
        let r = reference_wave(&g, 0.4);
        let reference = Spinor2Field::new([r.clone(), r.clone()]).unwrap();
        let t = aperture_vortex(&g, 1, 20.0);
        let target = Spinor2Field::new([t.clone(), ComplexField::zeros(g)]).unwrap();
        let m = synthesize_matrix_mask(&target, &reference, &MatrixMaskOptions::default()).unwrap();
        assert!(m.entries().iter().all(|e| e[3] == C64::new(1.0, 0.0)));
        let out = m.apply(&reference).unwrap();
        let scalar = r.add(&t).unwrap().add(&t.map(|v| v.conj())).unwrap();
        for (a, b) in out.component(0).values().iter().zip(scalar.values()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn vanishing_reference_under_target_is_singular() {
        let g = GridSpec::square(32, 1.0).unwrap();
        let disk = aperture_vortex(&g, 0, 5.0);
        let reference = Spinor2Field::new([disk.clone(), disk]).unwrap();
        let t = aperture_vortex(&g, 1, 10.0);
        let target = Spinor2Field::new([t.clone(), t]).unwrap();
        assert!(matches!(
            synthesize_matrix_mask(&target, &reference, &MatrixMaskOptions::default()),
            Err(VortexError::DivisionSingularity(_))
        ));
    }

    #[test]
    fn pauli_basis_decomposition() {
        let g = GridSpec::square(16, 1.0).unwrap();
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        let id = MatrixMask::new(g, vec![[one, zero, zero, one]; g.len()]).unwrap();
        let p = pauli_decompose(&id);
        assert!(p.a0.values().iter().all(|v| *v == one));
        assert!(p.a.iter().all(|c| c.is_identically_zero()));
        assert_eq!(p.max_hermiticity_defect(), 0.0);

        let sz = MatrixMask::new(g, vec![[one, zero, zero, -one]; g.len()]).unwrap();
        let p = pauli_decompose(&sz);
        assert!(p.a[2].values().iter().all(|v| *v == one));
        assert!(p.a0.is_identically_zero() && p.a[0].is_identically_zero());
        let b = p.effective_field(1.0);
        assert!(b[2].iter().all(|&v| v == 1.0));

        let i = C64::new(0.0, 1.0);
        let sy = MatrixMask::new(g, vec![[zero, -i, i, zero]; g.len()]).unwrap();
        let p = pauli_decompose(&sy);
        assert!(p.a[1].values().iter().all(|v| (*v - one).norm() < 1e-15));
    }
}
