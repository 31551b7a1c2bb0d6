//! Quadrature, root bracketing and a few log-space helpers.

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_INTERVALS: usize = 4000;

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

/// Adaptive Gauss–Kronrod (7/15) on a finite interval, bisecting the interval
/// with the largest error estimate until the total error is below
/// `rel_tol * |I|` (or `abs_tol`).
pub fn integrate_finite<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Numeric(format!("non-finite interval [{a}, {b}]")));
    }
    let (i0, e0) = gk15(&f, a, b);
    let mut parts: Vec<(f64, f64, f64, f64)> = vec![(a, b, i0, e0)];
    let mut total = i0;
    let mut err = e0;
    while err > (rel_tol * total.abs()).max(abs_tol) {
        if parts.len() >= MAX_INTERVALS {
            break;
        }
        let (k, _) = parts
            .iter()
            .enumerate()
            .fold((0, -1.0), |acc, (i, p)| if p.3 > acc.1 { (i, p.3) } else { acc });
        let (lo, hi, iv, ev) = parts.swap_remove(k);
        let mid = 0.5 * (lo + hi);
        if !(mid > lo && mid < hi) {
            parts.push((lo, hi, iv, 0.0));
            err -= ev;
            continue;
        }
        let (il, el) = gk15(&f, lo, mid);
        let (ir, er) = gk15(&f, mid, hi);
        total += il + ir - iv;
        err += el + er - ev;
        parts.push((lo, mid, il, el));
        parts.push((mid, hi, ir, er));
    }
    total = parts.iter().map(|p| p.2).sum();
    if !total.is_finite() {
        return Err(Error::Numeric(format!("quadrature on [{a}, {b}] is not finite")));
    }
    Ok(total)
}

/// Like [`integrate_finite`] but `b` may be `+inf`; beyond max(a, 0) + 1 the
/// range is mapped by x = m·e^v, v = s/(1 − s), which suits power-law tails.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    if b == f64::INFINITY {
        let m = a.max(0.0) + 1.0;
        let head = integrate_finite(&f, a, m, rel_tol, 0.0)?;
        Ok(head + power_tail(&f, m, rel_tol)?)
    } else {
        integrate_finite(f, a, b, rel_tol, 0.0)
    }
}

fn power_tail<F: Fn(f64) -> f64>(f: &F, m: f64, rel_tol: f64) -> Result<f64> {
    let g = |s: f64| {
        let w = 1.0 - s;
        let x = m * (s / w).exp();
        let v = f(x) * x / (w * w);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    integrate_finite(g, 0.0, 1.0, rel_tol, 0.0)
}

/// ∫_a^b f over x = e^y, for integrands singular like a power at 0; `b` may be `+inf`.
pub fn integrate_log<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    if !(a > 0.0) || !(b > a) {
        return Err(Error::Numeric(format!("log-substituted quadrature needs 0 < a < b, got [{a}, {b}]")));
    }
    let g = |y: f64| {
        let x = y.exp();
        f(x) * x
    };
    if b.is_finite() {
        integrate_finite(g, a.ln(), b.ln(), rel_tol, 0.0)
    } else {
        let mid = a.ln().max(0.0) + 1.0;
        let head = integrate_finite(&g, a.ln(), mid, rel_tol, 0.0)?;
        Ok(head + power_tail(&f, mid.exp(), rel_tol)?)
    }
}

/// Sum of adaptive quadratures over consecutive breakpoints.
pub fn integrate_pieces<F: Fn(f64) -> f64>(f: F, points: &[f64], rel_tol: f64) -> Result<f64> {
    let mut s = 0.0;
    for w in points.windows(2) {
        s += integrate_finite(&f, w[0], w[1], rel_tol, 0.0)?;
    }
    Ok(s)
}

/// Bisection for a sign change of `f` on `[lo, hi]`; returns the midpoint of
/// the final bracket once its width is below `tol` (absolute).
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    let flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::Numeric(format!("no sign change on [{lo}, {hi}]")));
    }
    let neg_lo = flo < 0.0;
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol || !(mid > lo && mid < hi) {
            return Ok(mid);
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm < 0.0) == neg_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[inline]
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// ln(e^a - e^b) for a > b.
#[inline]
pub fn log_sub_exp(a: f64, b: f64) -> f64 {
    if b == f64::NEG_INFINITY {
        return a;
    }
    a + (-(b - a).exp()).ln_1p()
}

pub fn gamma(x: f64) -> f64 {
    statrs::function::gamma::gamma(x)
}

pub fn ln_gamma(x: f64) -> f64 {
    statrs::function::gamma::ln_gamma(x)
}
