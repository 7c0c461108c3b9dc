//! Bessel functions of the first kind for integer order.
//!
//! Values are produced by Miller's backward recurrence normalized with
//! `J_0 + 2 Σ J_{2k} = 1`, which yields every order up to the requested
//! maximum in a single pass with absolute error near machine precision.

/// Fills `out[k] = J_k(x)` for `k = 0..out.len()`.
pub fn bessel_j_upto(x: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out.fill(0.0);
    if x == 0.0 {
        out[0] = 1.0;
        return;
    }
    let ax = x.abs();
    let nmax = out.len() - 1;
    let base = ax.max(nmax as f64);
    let mut start = (base + 10.0 * ax.cbrt() + 30.0).ceil() as usize;
    start += start % 2;

    let mut above = 0.0; // J_{k+1}
    let mut cur = 1e-30; // J_k, unnormalized
    let mut sum = 0.0;
    for k in (1..=start).rev() {
        if k <= nmax {
            out[k] = cur;
        }
        if k % 2 == 0 {
            sum += 2.0 * cur;
        }
        let below = (2.0 * k as f64 / ax) * cur - above;
        above = cur;
        cur = below;
        if cur.abs() > 1e250 {
            cur *= 1e-250;
            above *= 1e-250;
            sum *= 1e-250;
            for v in out.iter_mut() {
                *v *= 1e-250;
            }
        }
    }
    out[0] = cur;
    sum += cur;
    for v in out.iter_mut() {
        *v /= sum;
    }
    if x < 0.0 {
        for (k, v) in out.iter_mut().enumerate() {
            if k % 2 == 1 {
                *v = -*v;
            }
        }
    }
}

/// `J_n(x)` for any integer order, using `J_{-n} = (-1)^n J_n`.
pub fn bessel_j(n: i32, x: f64) -> f64 {
    let m = n.unsigned_abs() as usize;
    let mut buf = vec![0.0; m + 1];
    bessel_j_upto(x, &mut buf);
    signed_order(n, buf[m])
}

#[inline]
pub(crate) fn signed_order(n: i32, value_abs_order: f64) -> f64 {
    if n < 0 && n % 2 != 0 {
        -value_abs_order
    } else {
        value_abs_order
    }
}

/// Location of the first maximum of `J_1(x)²`, i.e. the first zero of `J_1'`.
///
/// Found by bisection on `J_1'(x) = J_0(x) - J_1(x)/x` over `[1, 2.5]`.
pub fn first_maximum_j1_squared() -> f64 {
    let deriv = |x: f64| {
        let mut j = [0.0; 2];
        bessel_j_upto(x, &mut j);
        j[0] - j[1] / x
    };
    let (mut lo, mut hi) = (1.0_f64, 2.5_f64);
    while hi - lo > 1e-15 {
        let mid = 0.5 * (lo + hi);
        if deriv(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// First positive zero of `J_0`.
pub fn first_zero_j0() -> f64 {
    let (mut lo, mut hi) = (2.0_f64, 3.0_f64);
    while hi - lo > 1e-15 {
        let mid = 0.5 * (lo + hi);
        if bessel_j(0, mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    /// Independent route: trapezoid rule on the periodic integral
    /// `J_n(x) = (1/2π) ∫ cos(nτ - x sin τ) dτ`, exponentially convergent.
    fn bessel_integral(n: i32, x: f64) -> f64 {
        let npts = (x.abs() + n.abs() as f64 + 12.0 * x.abs().cbrt() + 64.0) as usize;
        let mut s = 0.0;
        for j in 0..npts {
            let t = 2.0 * PI * j as f64 / npts as f64;
            s += (n as f64 * t - x * t.sin()).cos();
        }
        s / npts as f64
    }

    #[test]
    fn reference_values() {
        assert!((bessel_j(0, 1.0) - 0.765_197_686_557_966_6).abs() < 1e-15);
        assert!((bessel_j(1, 1.0) - 0.440_050_585_744_933_5).abs() < 1e-15);
        assert!((bessel_j(2, 10.0) - 0.254_630_313_685_120_6).abs() < 1e-14);
        assert_eq!(bessel_j(3, 0.0), 0.0);
        assert_eq!(bessel_j(0, 0.0), 1.0);
    }

    #[test]
    fn matches_integral_representation() {
        for &x in &[1e-6, 0.01, 0.3, 1.0, 2.5, 7.7, 19.3, 40.0, 123.4, 310.0] {
            for n in -4..=6 {
                let a = bessel_j(n, x);
                let b = bessel_integral(n, x);
                assert!((a - b).abs() < 2e-14, "n={n} x={x}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn negative_order_and_argument() {
        for &x in &[0.7, 3.1, 12.0] {
            assert!((bessel_j(-3, x) + bessel_j(3, x)).abs() < 1e-16);
            assert!((bessel_j(-2, x) - bessel_j(2, x)).abs() < 1e-16);
            assert!((bessel_j(1, -x) + bessel_j(1, x)).abs() < 1e-16);
        }
    }

    #[test]
    fn stationary_point_of_j1() {
        let x = first_maximum_j1_squared();
        assert!((x - 1.841_183_781_340_659_3).abs() < 1e-12);
        assert!((first_zero_j0() - 2.404_825_557_695_773).abs() < 1e-12);
    }

    #[test]
    fn small_argument_series() {
        // J_n(x) ≈ (x/2)^n / n! for tiny x
        let x = 1e-4;
        assert!((bessel_j(2, x) / (x * x / 8.0) - 1.0).abs() < 1e-8);
    }
}
