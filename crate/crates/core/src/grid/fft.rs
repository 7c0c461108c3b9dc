use super::{ComplexField, GridSpec};
use num_complex::Complex64 as C64;
use rustfft::{Fft, FftDirection, FftPlanner};
use std::f64::consts::PI;
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

struct Plan2 {
    row: Arc<dyn Fft<f64>>,
    col: Arc<dyn Fft<f64>>,
    nx: usize,
    ny: usize,
}

impl Plan2 {
    fn new(nx: usize, ny: usize, direction: FftDirection) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            row: planner.plan_fft(nx, direction),
            col: planner.plan_fft(ny, direction),
            nx,
            ny,
        }
    }

    /// Unnormalized in-place 2D DFT in standard (uncentered) ordering.
    fn run(&self, data: &mut [C64]) {
        self.row.process(data);
        let mut column = vec![C64::new(0.0, 0.0); self.ny];
        for ix in 0..self.nx {
            for (iy, c) in column.iter_mut().enumerate() {
                *c = data[iy * self.nx + ix];
            }
            self.col.process(&mut column);
            for (iy, c) in column.iter().enumerate() {
                data[iy * self.nx + ix] = *c;
            }
        }
    }
}

/// Cyclic shift by `(sx, sy)`: `out[(i + s) mod n] = data[i]`.
fn roll(data: &[C64], nx: usize, ny: usize, sx: usize, sy: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); data.len()];
    for iy in 0..ny {
        let oy = (iy + sy) % ny;
        for ix in 0..nx {
            out[oy * nx + (ix + sx) % nx] = data[iy * nx + ix];
        }
    }
    out
}

/// Unitary discrete Fourier transform with the zero frequency at the grid
/// center. Forward uses the `e^{-ik·x}` kernel; the output grid is the
/// reciprocal grid with spacing `2π/(n·d)`.
pub fn fourier_transform(field: &ComplexField, direction: Direction) -> ComplexField {
    let g = *field.grid();
    let (nx, ny) = (g.nx, g.ny);
    let (cx, cy) = (nx / 2, ny / 2);
    // move the origin pixel to index 0
    let mut data = roll(field.values(), nx, ny, nx - cx, ny - cy);
    let dir = match direction {
        Direction::Forward => FftDirection::Forward,
        Direction::Inverse => FftDirection::Inverse,
    };
    Plan2::new(nx, ny, dir).run(&mut data);
    let scale = 1.0 / ((nx * ny) as f64).sqrt();
    for v in &mut data {
        *v *= scale;
    }
    let out = roll(&data, nx, ny, cx, cy);
    ComplexField::from_values_unchecked(g.reciprocal(), out)
}

fn wavenumbers(n: usize, d: f64) -> Vec<f64> {
    let dk = 2.0 * PI / (n as f64 * d);
    (0..n)
        .map(|j| {
            if n.is_multiple_of(2) && j == n / 2 {
                0.0 // Nyquist bin carries no odd derivative
            } else if j <= n / 2 {
                j as f64 * dk
            } else {
                (j as f64 - n as f64) * dk
            }
        })
        .collect()
}

/// `(∂f/∂x, ∂f/∂y)` by spectral differentiation (periodic extension).
pub fn spectral_gradient(field: &ComplexField) -> (ComplexField, ComplexField) {
    let g = *field.grid();
    let (nx, ny) = (g.nx, g.ny);
    let mut spec = field.values().to_vec();
    Plan2::new(nx, ny, FftDirection::Forward).run(&mut spec);
    let kx = wavenumbers(nx, g.dx);
    let ky = wavenumbers(ny, g.dy);
    let norm = 1.0 / (nx * ny) as f64;
    let mut dxs = spec.clone();
    let mut dys = spec;
    for iy in 0..ny {
        for ix in 0..nx {
            let i = iy * nx + ix;
            dxs[i] *= C64::new(0.0, kx[ix] * norm);
            dys[i] *= C64::new(0.0, ky[iy] * norm);
        }
    }
    let inv = Plan2::new(nx, ny, FftDirection::Inverse);
    inv.run(&mut dxs);
    inv.run(&mut dys);
    (
        ComplexField::from_values_unchecked(g, dxs),
        ComplexField::from_values_unchecked(g, dys),
    )
}

pub(crate) fn reciprocal_coords(g: &GridSpec) -> impl Iterator<Item = (f64, f64)> {
    let r = g.reciprocal();
    (0..r.ny).flat_map(move |iy| (0..r.nx).map(move |ix| (r.x(ix), r.y(iy))))
}
