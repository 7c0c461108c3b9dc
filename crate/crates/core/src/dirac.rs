//! Four-component Dirac Bessel beams in the standard representation.
//!
//! The cylindrical solutions used here are
//!
//! ```text
//! Ψ_{n,s} = ( e^{inφ}J_n,  s·e^{i(n+1)φ}J_{n+1},  A_s e^{inφ}J_n,  −s·A_s e^{i(n+1)φ}J_{n+1} )
//! A_s     = (k_z − i s k⊥) / (E + m)
//! ```
//!
//! with `J_ν = J_ν(k⊥ρ)` and the common factor `e^{i(k_z z − Et)}` dropped.
//! `s = ±1` is the transverse helicity and `n + ½` the total angular momentum.

use crate::error::{invalid, Result, VortexError};
use crate::grid::{
    apply_lz, bessel_spinor, fourier_transform, Direction, GridSpec, Spinor4Field, Window,
};
use crate::pauli::{HalfInteger, EIGEN_TOLERANCE};
use crate::special::{bessel_j, signed_order};
use crate::units::{natural_to_pm, vortex_radius_from_kperp, BeamKinematics, KperpEstimate};
use num_complex::Complex64 as C64;
use serde::Serialize;
use std::f64::consts::PI;

pub type Mat4 = [[C64; 4]; 4];

/// Dirac matrices in the standard (Dirac) representation.
pub mod gamma {
    use super::Mat4;
    use num_complex::Complex64 as C64;

    const O: C64 = C64 { re: 0.0, im: 0.0 };
    const I: C64 = C64 { re: 1.0, im: 0.0 };
    const J: C64 = C64 { re: 0.0, im: 1.0 };

    fn block(a: [[C64; 2]; 2], b: [[C64; 2]; 2], c: [[C64; 2]; 2], d: [[C64; 2]; 2]) -> Mat4 {
        let mut m = [[O; 4]; 4];
        for i in 0..2 {
            for j in 0..2 {
                m[i][j] = a[i][j];
                m[i][j + 2] = b[i][j];
                m[i + 2][j] = c[i][j];
                m[i + 2][j + 2] = d[i][j];
            }
        }
        m
    }

    /// Pauli matrix `σ_k`, `k ∈ {1, 2, 3}`.
    pub fn sigma(k: usize) -> [[C64; 2]; 2] {
        match k {
            1 => [[O, I], [I, O]],
            2 => [[O, -J], [J, O]],
            3 => [[I, O], [O, -I]],
            _ => panic!("Pauli index must be 1, 2 or 3"),
        }
    }

    fn neg(a: [[C64; 2]; 2]) -> [[C64; 2]; 2] {
        a.map(|r| r.map(|v| -v))
    }

    const Z2: [[C64; 2]; 2] = [[O, O], [O, O]];
    const ONE2: [[C64; 2]; 2] = [[I, O], [O, I]];

    /// `γ^μ`, `μ ∈ {0, 1, 2, 3}`.
    pub fn gamma(mu: usize) -> Mat4 {
        match mu {
            0 => block(ONE2, Z2, Z2, neg(ONE2)),
            1..=3 => block(Z2, sigma(mu), neg(sigma(mu)), Z2),
            _ => panic!("Lorentz index must be 0..=3"),
        }
    }

    /// `γ⁵ = iγ⁰γ¹γ²γ³`.
    pub fn gamma5() -> Mat4 {
        block(Z2, ONE2, ONE2, Z2)
    }

    /// Spin matrix `Σ_k = diag(σ_k, σ_k)`.
    pub fn big_sigma(k: usize) -> Mat4 {
        block(sigma(k), Z2, Z2, sigma(k))
    }

    pub fn identity() -> Mat4 {
        block(ONE2, Z2, Z2, ONE2)
    }

    pub fn mul(a: &Mat4, b: &Mat4) -> Mat4 {
        let mut m = [[O; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    m[i][j] += a[i][k] * b[k][j];
                }
            }
        }
        m
    }

    pub fn scale(a: &Mat4, s: C64) -> Mat4 {
        a.map(|r| r.map(|v| v * s))
    }

    pub fn add(a: &Mat4, b: &Mat4) -> Mat4 {
        let mut m = *a;
        for i in 0..4 {
            for j in 0..4 {
                m[i][j] += b[i][j];
            }
        }
        m
    }
}

/// Transverse-helicity matrix for a transverse momentum at azimuth `theta`:
/// `−i·γ⁵γ³ Σ·p̂⊥`. The extra `−i` makes it Hermitian with eigenvalues ±1;
/// it equals `diag(σ·(p̂×ẑ), −σ·(p̂×ẑ))`.
pub fn transverse_helicity_matrix(theta: f64) -> Mat4 {
    use gamma::*;
    let sp = add(
        &scale(&big_sigma(1), C64::new(theta.cos(), 0.0)),
        &scale(&big_sigma(2), C64::new(theta.sin(), 0.0)),
    );
    let g53 = mul(&gamma5(), &gamma(3));
    scale(&mul(&g53, &sp), C64::new(0.0, -1.0))
}

/// Superposition `Σ_s w_s Ψ_{n,s}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiracMode {
    pub n: i32,
    /// Weights of `s = +1` and `s = −1`.
    pub weights: [C64; 2],
}

impl DiracMode {
    pub fn helicity_eigenstate(n: i32, s: i32) -> Result<Self> {
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        match s {
            1 => Ok(Self {
                n,
                weights: [one, zero],
            }),
            -1 => Ok(Self {
                n,
                weights: [zero, one],
            }),
            _ => invalid(format!("transverse helicity must be ±1, got {s}")),
        }
    }

    /// Orders of the four components.
    pub fn orders(&self) -> [i32; 4] {
        [self.n, self.n + 1, self.n, self.n + 1]
    }

    /// Component coefficients at transverse wavenumber `p` for a beam of
    /// total momentum `kin.k`; `None` when `p > k`.
    pub fn coefficients(&self, kin: &BeamKinematics, p: f64) -> Option<[C64; 4]> {
        if p > kin.k {
            return None;
        }
        let kz = ((kin.k - p) * (kin.k + p)).sqrt();
        let epm = kin.e_plus_m();
        let mut c = [C64::new(0.0, 0.0); 4];
        for (w, s) in self.weights.iter().zip([1.0, -1.0]) {
            let a = C64::new(kz, -s * p) / epm;
            c[0] += w;
            c[1] += w * s;
            c[2] += w * a;
            c[3] -= w * s * a;
        }
        Some(c)
    }
}

/// States with approximately good `L_z = n` in the paraxial limit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ApproxLzState {
    /// `Ψ_n^(+) = ½(Ψ_{n,+} + Ψ_{n,−})`: upper spin up, `L_z = n` except a
    /// `k⊥/(E+m)` admixture of order `n + 1`.
    Plus,
    /// `Ψ_n^(−) = ½(Ψ_{n−1,+} − Ψ_{n−1,−})`: upper spin down, `L_z = n` except
    /// a `k⊥/(E+m)` admixture of order `n − 1`.
    Minus,
}

impl ApproxLzState {
    pub fn mode(self, n: i32) -> DiracMode {
        let h = C64::new(0.5, 0.0);
        match self {
            ApproxLzState::Plus => DiracMode { n, weights: [h, h] },
            ApproxLzState::Minus => DiracMode {
                n: n - 1,
                weights: [h, -h],
            },
        }
    }

    /// Order of the small admixed component.
    pub fn admixed_order(self, n: i32) -> i32 {
        match self {
            ApproxLzState::Plus => n + 1,
            ApproxLzState::Minus => n - 1,
        }
    }
}

fn require_kperp(kin: &BeamKinematics) -> Result<()> {
    if !(kin.k_perp > 0.0) {
        return invalid("Dirac Bessel modes need k_perp > 0");
    }
    Ok(())
}

pub fn make_dirac_spinor(
    kin: &BeamKinematics,
    mode: &DiracMode,
    grid: &GridSpec,
    window: &Window,
) -> Result<Spinor4Field> {
    require_kperp(kin)?;
    bessel_spinor(
        grid,
        kin.k_perp,
        mode.orders(),
        |p| mode.coefficients(kin, p),
        window,
    )
}

pub fn make_approx_lz_state(
    kin: &BeamKinematics,
    state: ApproxLzState,
    n: i32,
    grid: &GridSpec,
    window: &Window,
) -> Result<Spinor4Field> {
    make_dirac_spinor(kin, &state.mode(n), grid, window)
}

/// Radial densities of `Ψ_n^(±)` with unit-amplitude upper component:
/// `(1 + k_z²/(E+m)²)·J_n²` (first term) plus `k⊥²/(E+m)²·J_{n±1}²`.
pub fn approx_lz_density(kin: &BeamKinematics, state: ApproxLzState, n: i32, r: f64) -> (f64, f64) {
    let epm = kin.e_plus_m();
    let a2 = (kin.k_z / epm).powi(2);
    let b2 = (kin.k_perp / epm).powi(2);
    let x = kin.k_perp * r;
    let jn = bessel_j(n, x);
    let jm = bessel_j(state.admixed_order(n), x);
    let first = (1.0 + a2) * jn * jn;
    (first + b2 * jm * jm, first)
}

/// `k⊥²/(E+m)²`: on-axis density of the special states with unit upper
/// amplitude.
pub fn central_fraction(kin: &BeamKinematics) -> f64 {
    kin.paraxiality().powi(2)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CriticalRadiusMethod {
    /// `0.24·√R / (k_z² + m(m + √(k_z² + m²)))^{1/4}` with R in nm.
    #[default]
    PaperFormula,
    /// First radius where the on-axis term of `Ψ_1^(−)` equals the vortex term.
    NumericCrossing,
}

pub const CRITICAL_RADIUS_PREFACTOR: f64 = 0.24;

/// Critical radius in natural units (keV⁻¹).
///
/// `vortex_radius_nm` is used by the closed formula only; when absent it is
/// recovered from `k⊥` with the 0.37 constant.
pub fn critical_radius(
    kin: &BeamKinematics,
    method: CriticalRadiusMethod,
    vortex_radius_nm: Option<f64>,
) -> Result<f64> {
    if !(kin.k_perp > 0.0) {
        return Err(VortexError::NoCrossing(
            "k_perp = 0 has no vortex and no critical radius".into(),
        ));
    }
    match method {
        CriticalRadiusMethod::PaperFormula => {
            let r_nm = match vortex_radius_nm {
                Some(r) if r > 0.0 && r.is_finite() => r,
                Some(r) => return invalid(format!("vortex radius must be positive, got {r}")),
                None => vortex_radius_from_kperp(kin.k_perp, KperpEstimate::PaperConstant)
                    .expect("k_perp > 0"),
            };
            let (kz, m) = (kin.k_z, kin.mass);
            let den = (kz * kz + m * (m + (kz * kz + m * m).sqrt())).powf(0.25);
            Ok(crate::units::nm_to_natural(
                CRITICAL_RADIUS_PREFACTOR * r_nm.sqrt() / den,
            ))
        }
        CriticalRadiusMethod::NumericCrossing => first_crossing(kin, ApproxLzState::Minus, 1)
            .ok_or_else(|| {
                VortexError::NoCrossing("vortex term never drops below the on-axis term".into())
            }),
    }
}

/// Smallest `r > 0` where the admixed term of `Ψ_n^(±)` stops exceeding the
/// first term. `None` when the admixed term does not dominate on axis.
pub fn first_crossing(kin: &BeamKinematics, state: ApproxLzState, n: i32) -> Option<f64> {
    if !(kin.k_perp > 0.0) {
        return None;
    }
    let diff = |r: f64| {
        let (full, first) = approx_lz_density(kin, state, n, r);
        2.0 * first - full
    };
    // bracket on a mesh fine compared with the Bessel scale
    let step = 1e-3 / kin.k_perp;
    let limit = crate::special::first_zero_j0() / kin.k_perp;
    let mut lo = step;
    if diff(lo) >= 0.0 {
        return None;
    }
    let mut hi = lo;
    while diff(hi) < 0.0 {
        lo = hi;
        hi += step;
        if hi > limit {
            return None;
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if diff(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    Some(0.5 * (lo + hi))
}

pub const DENSITY_SCHEMA_VERSION: u32 = 1;

/// Sampled radial density curves.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityCurves {
    pub r_pm: Vec<f64>,
    pub rho_full: Vec<f64>,
    pub rho_first_term: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityAnalysis {
    pub schema_version: u32,
    pub state: ApproxLzState,
    pub n: i32,
    pub kinematics: BeamKinematics,
    pub vortex_radius_nm: Option<f64>,
    pub central_fraction: f64,
    pub r_c_paper_pm: Option<f64>,
    pub r_c_numeric_pm: Option<f64>,
    pub central_area_pm2: Option<f64>,
    #[serde(skip)]
    pub curves: DensityCurves,
}

/// Full and first-term densities of `Ψ_n^(±)` on `samples` radii in
/// `[0, r_max_pm]`, with the central fraction and both critical radii.
pub fn density_analysis(
    kin: &BeamKinematics,
    state: ApproxLzState,
    n: i32,
    vortex_radius_nm: Option<f64>,
    r_max_pm: f64,
    samples: usize,
) -> Result<DensityAnalysis> {
    if samples < 2 {
        return invalid("need at least two radial samples");
    }
    if !(r_max_pm > 0.0 && r_max_pm.is_finite()) {
        return invalid(format!("r_max must be positive, got {r_max_pm}"));
    }
    let mut curves = DensityCurves {
        r_pm: Vec::with_capacity(samples),
        rho_full: Vec::with_capacity(samples),
        rho_first_term: Vec::with_capacity(samples),
    };
    for i in 0..samples {
        let r_pm = r_max_pm * i as f64 / (samples - 1) as f64;
        let (full, first) = approx_lz_density(kin, state, n, crate::units::pm_to_natural(r_pm));
        curves.r_pm.push(r_pm);
        curves.rho_full.push(full);
        curves.rho_first_term.push(first);
    }
    let has_vortex = kin.k_perp > 0.0;
    let vortex_radius_nm = vortex_radius_nm
        .or_else(|| vortex_radius_from_kperp(kin.k_perp, KperpEstimate::PaperConstant));
    let r_c_paper_pm = if has_vortex {
        Some(natural_to_pm(critical_radius(
            kin,
            CriticalRadiusMethod::PaperFormula,
            vortex_radius_nm,
        )?))
    } else {
        None
    };
    let r_c_numeric_pm = first_crossing(kin, state, n).map(natural_to_pm);
    Ok(DensityAnalysis {
        schema_version: DENSITY_SCHEMA_VERSION,
        state,
        n,
        kinematics: *kin,
        vortex_radius_nm: if has_vortex { vortex_radius_nm } else { None },
        central_fraction: central_fraction(kin),
        r_c_paper_pm,
        r_c_numeric_pm,
        central_area_pm2: r_c_paper_pm.map(|r| PI * r * r),
        curves,
    })
}

/// `(γ⁰E − γ³k_z + iγ¹∂_x + iγ²∂_y − m)Ψ` with second-order central
/// differences, as `‖·‖ / (E‖Ψ‖)` over interior pixels.
pub fn dirac_residual(psi: &Spinor4Field, kin: &BeamKinematics) -> Result<f64> {
    use gamma::*;
    let g = *psi.grid();
    let (g0, g1, g2, g3) = (gamma(0), gamma(1), gamma(2), gamma(3));
    let i = C64::new(0.0, 1.0);
    let mut algebraic = add(
        &scale(&g0, C64::new(kin.total_energy, 0.0)),
        &scale(&g3, C64::new(-kin.k_z, 0.0)),
    );
    for (d, row) in algebraic.iter_mut().enumerate() {
        row[d] -= C64::new(kin.mass, 0.0);
    }
    let dx_op = scale(&g1, i / (2.0 * g.dx));
    let dy_op = scale(&g2, i / (2.0 * g.dy));
    let comp = |c: usize, ix: usize, iy: usize| psi.component(c).at(ix, iy);
    let (mut num, mut den) = (0.0, 0.0);
    for iy in 1..g.ny - 1 {
        for ix in 1..g.nx - 1 {
            let v: [C64; 4] = std::array::from_fn(|c| comp(c, ix, iy));
            let ddx: [C64; 4] = std::array::from_fn(|c| comp(c, ix + 1, iy) - comp(c, ix - 1, iy));
            let ddy: [C64; 4] = std::array::from_fn(|c| comp(c, ix, iy + 1) - comp(c, ix, iy - 1));
            for r in 0..4 {
                let mut s = C64::new(0.0, 0.0);
                for c in 0..4 {
                    s += algebraic[r][c] * v[c] + dx_op[r][c] * ddx[c] + dy_op[r][c] * ddy[c];
                }
                num += s.norm_sqr();
                den += v[r].norm_sqr();
            }
        }
    }
    if !(den > 0.0) {
        return Err(VortexError::Degenerate(
            "Dirac residual of a zero spinor".into(),
        ));
    }
    Ok((num / den).sqrt() / kin.total_energy)
}

/// `J_z Ψ = (L_z + ½Σ_z)Ψ`.
pub fn apply_jz_4(psi: &Spinor4Field) -> Spinor4Field {
    psi.map_components(|c, f| {
        let half = if c % 2 == 0 { 0.5 } else { -0.5 };
        apply_lz(f)
            .lincomb(C64::new(1.0, 0.0), f, C64::new(half, 0.0))
            .expect("same grid")
    })
}

/// Applies the transverse-helicity operator in momentum space.
///
/// The operator depends on the direction of `p⊥`, so it is undefined for the
/// zero-momentum bin; a spectrum with weight there is rejected.
pub fn apply_transverse_helicity(psi: &Spinor4Field) -> Result<Spinor4Field> {
    let spectra = psi.map_components(|_, f| fourier_transform(f, Direction::Forward));
    let recip = *spectra.grid();
    let dc = recip.center_index();
    let peak = spectra
        .components()
        .iter()
        .map(|c| c.max_abs())
        .fold(0.0, f64::max);
    let dc_amp = spectra
        .components()
        .iter()
        .map(|c| c.values()[dc].norm())
        .fold(0.0, f64::max);
    if !(peak > 0.0) {
        return Err(VortexError::Degenerate("helicity of a zero spinor".into()));
    }
    if dc_amp > 1e-6 * peak {
        return Err(VortexError::HelicityUndefined(format!(
            "zero-momentum amplitude {:.2e} of peak; p̂⊥ has no direction there",
            dc_amp / peak
        )));
    }
    let mut out: [Vec<C64>; 4] = std::array::from_fn(|_| vec![C64::new(0.0, 0.0); recip.len()]);
    for (k, (px, py)) in crate::grid::fft_coords(&recip).enumerate() {
        if k == dc {
            continue;
        }
        let h = transverse_helicity_matrix(py.atan2(px));
        for (r, o) in out.iter_mut().enumerate() {
            o[k] = (0..4)
                .map(|c| h[r][c] * spectra.component(c).values()[k])
                .sum();
        }
    }
    let comps = out.map(|v| {
        let f = crate::ComplexField::from_values_unchecked(recip, v);
        let back = fourier_transform(&f, Direction::Inverse);
        crate::ComplexField::from_values_unchecked(*psi.grid(), back.into_values())
    });
    Spinor4Field::new(comps)
}

/// `⟨Ψ|h⊥|Ψ⟩ / ⟨Ψ|Ψ⟩`.
pub fn transverse_helicity_expectation(psi: &Spinor4Field) -> Result<f64> {
    let h = apply_transverse_helicity(psi)?;
    Ok(psi.inner(&h)?.re / psi.norm_sq())
}

/// `‖(Op − λ)Ψ‖ / ‖Ψ‖`.
pub fn eigen_residual(op_psi: &Spinor4Field, psi: &Spinor4Field, lambda: f64) -> Result<f64> {
    let shifted = psi.scaled(C64::new(lambda, 0.0));
    let num: f64 = op_psi
        .components()
        .iter()
        .zip(shifted.components())
        .map(|(a, b)| {
            crate::grid::quadrature_norm(
                &a.lincomb(C64::new(1.0, 0.0), b, C64::new(-1.0, 0.0))
                    .expect("same grid"),
            )
        })
        .sum();
    let den = psi.norm_sq();
    if !(den > 0.0) {
        return Err(VortexError::Degenerate(
            "eigen residual of a zero spinor".into(),
        ));
    }
    Ok((num / den).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DiracAngularMomentum {
    pub lz: f64,
    pub sz: f64,
    pub jz: f64,
    pub jz_eigen: Option<HalfInteger>,
    pub jz_residual: f64,
}

/// `⟨L_z⟩`, `⟨½Σ_z⟩`, `⟨J_z⟩` by quadrature, with a `J_z` eigen-flag.
pub fn dirac_angular_momentum(psi: &Spinor4Field) -> Result<DiracAngularMomentum> {
    let total = psi.norm_sq();
    if !(total > 0.0) {
        return Err(VortexError::Degenerate(
            "angular momentum of a zero spinor".into(),
        ));
    }
    let mut lz = 0.0;
    let mut sz = 0.0;
    for (c, f) in psi.components().iter().enumerate() {
        lz += f.inner(&apply_lz(f))?.re;
        let w = crate::grid::quadrature_norm(f);
        sz += if c % 2 == 0 { 0.5 * w } else { -0.5 * w };
    }
    let (lz, sz) = (lz / total, sz / total);
    let jz = lz + sz;
    let jz_residual = eigen_residual(&apply_jz_4(psi), psi, jz)?;
    Ok(DiracAngularMomentum {
        lz,
        sz,
        jz,
        jz_eigen: (jz_residual < EIGEN_TOLERANCE).then(|| HalfInteger::nearest(jz)),
        jz_residual,
    })
}

/// Analytic samples of component `c` of `Ψ_{n,s}` (for tests and oracles).
pub fn analytic_component(kin: &BeamKinematics, mode: &DiracMode, c: usize, x: f64, y: f64) -> C64 {
    let coeffs = mode.coefficients(kin, kin.k_perp).expect("k_perp ≤ k");
    let o = mode.orders()[c];
    let r = (x * x + y * y).sqrt();
    let amp = signed_order(o, bessel_j(o.abs(), kin.k_perp * r));
    coeffs[c] * C64::from_polar(amp, o as f64 * y.atan2(x))
}
