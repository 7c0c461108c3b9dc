use serde_json::{json, Value};
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;

use vortex_core::dirac::{density_analysis, ApproxLzState};
use vortex_core::grid::{auto_loop_radius, topological_charge_with_floor, ComplexField, GridSpec};
use vortex_core::holography::{
    pauli_decompose, reconstruct_scalar, scalar_pipeline, spinor_pipeline, synthesize_scalar_mask,
    HologramMask, HologramSetup, MatrixMaskOptions,
};
use vortex_core::io::{read_vfld, write_density_csv, write_json, write_pgm, write_vfld};
use vortex_core::pauli::{
    angular_momentum_closed_form, angular_momentum_numeric, make_general, PauliBeamSpec,
};
use vortex_core::render::{line_plot, mask_image, phase_image, Series, Viewport};
use vortex_core::units::{kperp_from_vortex_radius, KperpEstimate};
use vortex_core::{Aperture, BeamKinematics, C64};

use crate::{
    AngmomArgs, BeamArgs, ChargeArgs, CliError, DensityArgs, FarfieldArgs, HologramArgs, KperpMode,
    MaskArgs, StateArg,
};

pub const SCHEMA_VERSION: u32 = 1;

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>, CliError> {
    let path = dir.join(name);
    let f = File::create(&path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(BufWriter::new(f))
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))
}

fn setup(h: &HologramArgs) -> HologramSetup {
    HologramSetup {
        size: h.size,
        fringes: h.fringes,
        aperture_fraction: h.aperture,
        window_fraction: h.window,
    }
}

fn mask_options(h: &HologramArgs) -> MatrixMaskOptions {
    MatrixMaskOptions {
        c1: h.c1.0,
        c2: h.c2.0,
        c3: h.c3.0,
        swap_conjugate: h.swap_conjugate,
    }
}

fn complex_json(c: C64) -> Value {
    json!([c.re, c.im])
}

fn hologram_params(h: &HologramArgs, s: &HologramSetup) -> Result<Value, CliError> {
    let mut v = json!({
        "n": h.n,
        "size": s.size,
        "fringes": s.fringes,
        "tilt_kx": s.tilt()?,
        "aperture_radius_px": s.aperture_radius()?,
        "window_radius_px": s.window_px(),
    });
    if h.spinor {
        v["helicity"] = json!(h.helicity.value());
        v["swap_conjugate"] = json!(h.swap_conjugate);
        v["c1"] = complex_json(h.c1.0);
        v["c2"] = complex_json(h.c2.0);
        v["c3"] = complex_json(h.c3.0);
    } else {
        v["binarized"] = json!(!h.raw);
    }
    Ok(v)
}

pub fn mask(a: &MaskArgs) -> Result<Value, CliError> {
    let h = &a.holo;
    let s = setup(h);
    ensure_dir(&a.out)?;
    let params = hologram_params(h, &s)?;
    if h.spinor {
        // the spinor pipeline synthesizes the mask as its first step
        let r = spinor_pipeline(&s, h.n, h.helicity.value(), &mask_options(h))?;
        let p = pauli_decompose(&r.mask);
        write_vfld(create(&a.out, "mask.vfld")?, &r.mask.as_components())?;
        let [ax, ay, az] = p.a.clone();
        write_vfld(
            create(&a.out, "mask_pauli.vfld")?,
            &[p.a0.clone(), ax, ay, az],
        )?;
        phase_image(&p.a[2]).save(a.out.join("mask_az.png"))?;
        let out = json!({
            "schema_version": SCHEMA_VERSION,
            "kind": "matrix",
            "parameters": params,
            "files": ["mask.vfld", "mask_pauli.vfld", "mask_az.png"],
            "max_hermiticity_defect": p.max_hermiticity_defect(),
        });
        write_json(create(&a.out, "mask.json")?, &out)?;
        return Ok(out);
    }
    let grid = s.grid()?;
    let m = synthesize_scalar_mask(h.n, s.tilt()?, s.aperture_radius()?, &grid, !h.raw)?;
    write_pgm(create(&a.out, "mask.pgm")?, &m)?;
    write_vfld(create(&a.out, "mask.vfld")?, &[m.as_field()])?;
    mask_image(m.transmission(), grid.nx, grid.ny).save(a.out.join("mask.png"))?;
    let inside: Vec<f64> = grid
        .coords()
        .zip(m.transmission())
        .filter(|((x, y), _)| (x * x + y * y).sqrt() <= m.aperture_radius)
        .map(|(_, &t)| t)
        .collect();
    let duty = inside.iter().sum::<f64>() / inside.len().max(1) as f64;
    let out = json!({
        "schema_version": SCHEMA_VERSION,
        "kind": "scalar",
        "parameters": params,
        "files": ["mask.pgm", "mask.vfld", "mask.png"],
        "mean_transmission_in_aperture": duty,
    });
    write_json(create(&a.out, "mask.json")?, &out)?;
    Ok(out)
}

/// `√|ψ|·e^{i arg ψ}` so that weak diffraction orders stay visible.
fn compressed(f: &ComplexField) -> ComplexField {
    f.map(|v| C64::from_polar(v.norm().sqrt(), v.arg()))
}

fn load_scalar_mask(
    path: &Path,
    h: &HologramArgs,
    s: &HologramSetup,
) -> Result<HologramMask, CliError> {
    let file = File::open(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let comps = read_vfld(std::io::BufReader::new(file))?;
    let [c] = comps.as_slice() else {
        return Err(CliError::Argument(
            "mask file must hold exactly one component".into(),
        ));
    };
    if c.values().iter().any(|v| v.im != 0.0) {
        return Err(CliError::Argument("scalar mask must be real".into()));
    }
    let t = c.values().iter().map(|v| v.re).collect();
    let tilt = vortex_core::holography::tilt_from_fringes(c.grid(), s.fringes);
    let radius = s.aperture_fraction * c.grid().half_width();
    Ok(HologramMask::from_parts(*c.grid(), t, tilt, h.n, radius)?)
}

pub fn farfield(a: &FarfieldArgs) -> Result<Value, CliError> {
    let h = &a.holo;
    let s = setup(h);
    ensure_dir(&a.out)?;
    if h.spinor {
        if a.mask.is_some() {
            return Err(CliError::Argument(
                "--mask reconstructs scalar masks only".into(),
            ));
        }
        let r = spinor_pipeline(&s, h.n, h.helicity.value(), &mask_options(h))?;
        write_vfld(create(&a.out, "farfield.vfld")?, r.farfield.components())?;
        for c in 0..2 {
            phase_image(&compressed(r.farfield.component(c)))
                .save(a.out.join(format!("farfield_{c}.png")))?;
        }
        let report = r.report();
        write_json(create(&a.out, "reconstruction.json")?, &report)?;
        return Ok(serde_json::to_value(report).expect("serializable report"));
    }
    let r = match &a.mask {
        Some(path) => reconstruct_scalar(load_scalar_mask(path, h, &s)?, s.window_px())?,
        None => scalar_pipeline(&s, h.n, !h.raw)?,
    };
    write_vfld(
        create(&a.out, "farfield.vfld")?,
        std::slice::from_ref(&r.farfield),
    )?;
    phase_image(&compressed(&r.farfield)).save(a.out.join("farfield.png"))?;
    let report = r.report();
    write_json(create(&a.out, "reconstruction.json")?, &report)?;
    Ok(serde_json::to_value(report).expect("serializable report"))
}

pub fn kinematics(b: &BeamArgs) -> Result<(BeamKinematics, Option<f64>), CliError> {
    let (k_perp, radius) = match b.kperp {
        Some(k) => (k, None),
        None => {
            let mode = match b.kperp_mode {
                KperpMode::Paper => KperpEstimate::PaperConstant,
                KperpMode::Exact => KperpEstimate::ExactMaximum,
            };
            (
                kperp_from_vortex_radius(b.radius_nm, mode)?,
                Some(b.radius_nm),
            )
        }
    };
    Ok((
        BeamKinematics::from_kinetic_energy(b.energy_kev, k_perp, b.mass_kev)?,
        radius,
    ))
}

pub fn angmom(a: &AngmomArgs) -> Result<Value, CliError> {
    let (kin, _) = kinematics(&a.beam)?;
    let spec = PauliBeamSpec::new(a.n, a.n_prime, a.alpha, kin)?;
    let closed = angular_momentum_closed_form(&spec);
    let mut out = json!({
        "schema_version": SCHEMA_VERSION,
        "n": a.n,
        "n_prime": a.n_prime,
        "alpha": if a.alpha.is_infinite() { json!("inf") } else { json!(a.alpha) },
        "kinematics": kin,
        "closed_form": closed,
    });
    if a.numeric {
        if !(kin.k_perp > 0.0) {
            return Err(CliError::Argument("--numeric needs k_perp > 0".into()));
        }
        let grid = GridSpec::square(a.size, a.kperp_dx / kin.k_perp)?;
        let field = make_general(&spec, &grid, Aperture::soft(a.rmax / kin.k_perp))?;
        out["numeric"] =
            serde_json::to_value(angular_momentum_numeric(&field)?).expect("serializable report");
    }
    Ok(out)
}

pub fn dirac_density(a: &DensityArgs) -> Result<Value, CliError> {
    let (kin, radius) = kinematics(&a.beam)?;
    let state = match a.state {
        StateArg::Plus => ApproxLzState::Plus,
        StateArg::Minus => ApproxLzState::Minus,
    };
    let d = density_analysis(&kin, state, a.n, radius, a.rmax_pm, a.samples)?;
    ensure_dir(&a.out)?;
    write_density_csv(create(&a.out, "density.csv")?, &d.curves)?;
    write_json(create(&a.out, "density.json")?, &d)?;
    if !a.no_plot {
        let c = &d.curves;
        let series = [
            Series {
                xs: &c.r_pm,
                ys: &c.rho_full,
                color: [200, 30, 30],
            },
            Series {
                xs: &c.r_pm,
                ys: &c.rho_first_term,
                color: [30, 30, 200],
            },
        ];
        let main = Viewport::fit(&series, (0.0, a.rmax_pm));
        // zoom on the core where the two curves separate
        let zoom = d
            .r_c_numeric_pm
            .map(|r| Viewport::fit(&series, (0.0, (4.0 * r).min(a.rmax_pm))));
        line_plot(&series, main, zoom, 800, 600).save(a.out.join("density.png"))?;
    }
    Ok(serde_json::to_value(&d).expect("serializable analysis"))
}

pub fn charge(a: &ChargeArgs) -> Result<Value, CliError> {
    let file =
        File::open(&a.input).map_err(|e| CliError::Io(format!("{}: {e}", a.input.display())))?;
    let comps = read_vfld(std::io::BufReader::new(file))?;
    let field = comps.get(a.component).ok_or_else(|| {
        CliError::Argument(format!(
            "component {} requested but the file has {}",
            a.component,
            comps.len()
        ))
    })?;
    let g = field.grid();
    let step = g.dx.max(g.dy);
    let radius = match a.radius {
        Some(r) => r,
        None => auto_loop_radius(field, 1.5 * step, 0.45 * g.half_width()),
    };
    let m = topological_charge_with_floor(field, radius, a.floor)?;
    Ok(json!({
        "schema_version": SCHEMA_VERSION,
        "component": a.component,
        "charge": m.charge,
        "residual": m.residual,
        "loop_radius": m.loop_radius,
    }))
}
