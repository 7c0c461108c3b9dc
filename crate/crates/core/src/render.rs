//! Rasterized views of fields and simple line plots.

use crate::grid::ComplexField;
use image::{GrayImage, Luma, Rgb, RgbImage};
use std::f64::consts::PI;

/// `|ψ|²` scaled to the field maximum.
pub fn intensity_image(field: &ComplexField) -> GrayImage {
    let g = field.grid();
    let d = field.intensity();
    let max = d.iter().copied().fold(0.0, f64::max);
    let s = if max > 0.0 { 255.0 / max } else { 0.0 };
    GrayImage::from_fn(g.nx as u32, g.ny as u32, |x, y| {
        let v = d[g.index(x as usize, y as usize)];
        Luma([(v * s).round() as u8])
    })
}

/// HSV → RGB with `h, s, v ∈ [0, 1]`.
pub fn hsv_to_rgb(h: f64, s: f64, v: f64) -> [u8; 3] {
    let h6 = (h.rem_euclid(1.0)) * 6.0;
    let i = h6.floor() as i32 % 6;
    let f = h6 - h6.floor();
    let (p, q, t) = (v * (1.0 - s), v * (1.0 - s * f), v * (1.0 - s * (1.0 - f)));
    let (r, g, b) = match i {
        0 => (v, t, p),
        1 => (q, v, p),
        2 => (p, v, t),
        3 => (p, q, v),
        4 => (t, p, v),
        _ => (v, p, q),
    };
    [r, g, b].map(|c| (c * 255.0).round().clamp(0.0, 255.0) as u8)
}

/// Phase as hue (`arg ψ / 2π`), amplitude as value.
pub fn phase_image(field: &ComplexField) -> RgbImage {
    let g = field.grid();
    let max = field.max_abs();
    let s = if max > 0.0 { 1.0 / max } else { 0.0 };
    RgbImage::from_fn(g.nx as u32, g.ny as u32, |x, y| {
        let v = field.values()[g.index(x as usize, y as usize)];
        let hue = v.arg().rem_euclid(2.0 * PI) / (2.0 * PI);
        Rgb(hsv_to_rgb(hue, 1.0, v.norm() * s))
    })
}

pub fn mask_image(transmission: &[f64], nx: usize, ny: usize) -> GrayImage {
    let max = transmission.iter().copied().fold(0.0, f64::max);
    let s = if max > 0.0 { 255.0 / max } else { 0.0 };
    GrayImage::from_fn(nx as u32, ny as u32, |x, y| {
        Luma([(transmission[y as usize * nx + x as usize] * s).round() as u8])
    })
}

#[derive(Clone, Debug)]
pub struct Series<'a> {
    pub xs: &'a [f64],
    pub ys: &'a [f64],
    pub color: [u8; 3],
}

/// Axis-aligned data window of a plot panel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Viewport {
    pub x: (f64, f64),
    pub y: (f64, f64),
}

impl Viewport {
    /// Tight bounds of all series with `x` limited to `x_range`.
    pub fn fit(series: &[Series], x_range: (f64, f64)) -> Self {
        let mut y = (f64::INFINITY, f64::NEG_INFINITY);
        for s in series {
            for (&xv, &yv) in s.xs.iter().zip(s.ys) {
                if xv >= x_range.0 && xv <= x_range.1 && yv.is_finite() {
                    y = (y.0.min(yv), y.1.max(yv));
                }
            }
        }
        if !(y.0 < y.1) {
            y = (y.0.min(0.0) - 0.5, y.1.max(0.0) + 0.5);
        }
        let pad = 0.05 * (y.1 - y.0);
        Self {
            x: x_range,
            y: (y.0 - pad, y.1 + pad),
        }
    }
}

struct Panel {
    left: i64,
    top: i64,
    width: i64,
    height: i64,
    view: Viewport,
}

impl Panel {
    fn to_px(&self, x: f64, y: f64) -> (f64, f64) {
        let u = (x - self.view.x.0) / (self.view.x.1 - self.view.x.0);
        let v = (y - self.view.y.0) / (self.view.y.1 - self.view.y.0);
        (
            self.left as f64 + u * self.width as f64,
            (self.top + self.height) as f64 - v * self.height as f64,
        )
    }

    fn contains(&self, x: i64, y: i64) -> bool {
        x >= self.left
            && x <= self.left + self.width
            && y >= self.top
            && y <= self.top + self.height
    }
}

fn put(img: &mut RgbImage, x: i64, y: i64, c: [u8; 3]) {
    if x >= 0 && y >= 0 && (x as u32) < img.width() && (y as u32) < img.height() {
        img.put_pixel(x as u32, y as u32, Rgb(c));
    }
}

/// Bresenham line, clipped to `panel`.
fn line(img: &mut RgbImage, panel: &Panel, a: (f64, f64), b: (f64, f64), c: [u8; 3]) {
    let (mut x0, mut y0) = (a.0.round() as i64, a.1.round() as i64);
    let (x1, y1) = (b.0.round() as i64, b.1.round() as i64);
    let (dx, dy) = ((x1 - x0).abs(), -(y1 - y0).abs());
    let (sx, sy) = (if x0 < x1 { 1 } else { -1 }, if y0 < y1 { 1 } else { -1 });
    let mut err = dx + dy;
    let mut guard = 0;
    loop {
        if panel.contains(x0, y0) {
            put(img, x0, y0, c);
        }
        if (x0 == x1 && y0 == y1) || guard > 100_000 {
            break;
        }
        guard += 1;
        let e2 = 2 * err;
        if e2 >= dy {
            err += dy;
            x0 += sx;
        }
        if e2 <= dx {
            err += dx;
            y0 += sy;
        }
    }
}

fn frame(img: &mut RgbImage, p: &Panel) {
    let black = [0, 0, 0];
    for x in p.left..=p.left + p.width {
        put(img, x, p.top, black);
        put(img, x, p.top + p.height, black);
    }
    for y in p.top..=p.top + p.height {
        put(img, p.left, y, black);
        put(img, p.left + p.width, y, black);
    }
    // five ticks per axis
    for i in 0..=5 {
        let x = p.left + p.width * i / 5;
        let y = p.top + p.height * i / 5;
        for t in 0..5 {
            put(img, x, p.top + p.height - t, black);
            put(img, p.left + t, y, black);
        }
    }
}

fn draw_series(img: &mut RgbImage, p: &Panel, series: &[Series]) {
    for s in series {
        let pts: Vec<(f64, f64)> =
            s.xs.iter()
                .zip(s.ys)
                .filter(|(x, y)| y.is_finite() && **x >= p.view.x.0 && **x <= p.view.x.1)
                .map(|(&x, &y)| p.to_px(x, y))
                .collect();
        for w in pts.windows(2) {
            line(img, p, w[0], w[1], s.color);
        }
    }
}

/// Line plot of `series` over `main`, with an optional zoomed inset in the
/// upper right quarter.
pub fn line_plot(
    series: &[Series],
    main: Viewport,
    inset: Option<Viewport>,
    width: u32,
    height: u32,
) -> RgbImage {
    let mut img = RgbImage::from_pixel(width, height, Rgb([255, 255, 255]));
    let (w, h) = (width as i64, height as i64);
    let m = Panel {
        left: w / 10,
        top: h / 20,
        width: w * 17 / 20,
        height: h * 17 / 20,
        view: main,
    };
    frame(&mut img, &m);
    draw_series(&mut img, &m, series);
    if let Some(view) = inset {
        let p = Panel {
            left: m.left + m.width / 2,
            top: m.top + m.height / 20,
            width: m.width * 9 / 20,
            height: m.height * 2 / 5,
            view,
        };
        for y in p.top..=p.top + p.height {
            for x in p.left..=p.left + p.width {
                put(&mut img, x, y, [255, 255, 255]);
            }
        }
        frame(&mut img, &p);
        draw_series(&mut img, &p, series);
    }
    img
}
