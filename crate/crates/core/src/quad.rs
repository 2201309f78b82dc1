//! Adaptive Simpson quadrature.

use crate::error::{Error, Result};

const MAX_DEPTH: u32 = 48;

struct Acc {
    unresolved: f64,
}

fn simpson(a: f64, fa: f64, fm: f64, b: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn recurse<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    fa: f64,
    m: f64,
    fm: f64,
    b: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    acc: &mut Acc,
) -> f64 {
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, fa, flm, m, fm);
    let right = simpson(m, fm, frm, b, fb);
    let delta = left + right - whole;
    // Below rounding level further splitting cannot reduce the error.
    if delta.abs() <= 15.0 * tol || delta.abs() <= 64.0 * f64::EPSILON * (left.abs() + right.abs()) {
        return left + right + delta / 15.0;
    }
    if depth == 0 || !(lm > a && rm < b) {
        acc.unresolved += delta.abs();
        return left + right + delta / 15.0;
    }
    recurse(f, a, fa, lm, flm, m, fm, left, 0.5 * tol, depth - 1, acc)
        + recurse(f, m, fm, rm, frm, b, fb, right, 0.5 * tol, depth - 1, acc)
}

/// `∫_a^b f` to absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::Argument(format!("bad interval [{a}, {b}]")));
    }
    // A few fixed panels so that narrow features are not missed at the root.
    const PANELS: usize = 8;
    let h = (b - a) / PANELS as f64;
    let mut acc = Acc { unresolved: 0.0 };
    let mut total = 0.0;
    for k in 0..PANELS {
        let lo = a + h * k as f64;
        let hi = if k + 1 == PANELS { b } else { lo + h };
        let m = 0.5 * (lo + hi);
        let (flo, fm, fhi) = (f(lo), f(m), f(hi));
        let whole = simpson(lo, flo, fm, hi, fhi);
        total += recurse(&f, lo, flo, m, fm, hi, fhi, whole, tol / PANELS as f64, MAX_DEPTH, &mut acc);
    }
    if !total.is_finite() {
        return Err(Error::Quadrature(format!("non-finite integral on [{a}, {b}]")));
    }
    if acc.unresolved > 100.0 * tol {
        return Err(Error::Quadrature(format!(
            "error estimate {:.3e} exceeds tolerance {tol:.3e} on [{a}, {b}]",
            acc.unresolved
        )));
    }
    Ok(total)
}

/// `∫_a^∞ f` for an integrand that eventually decays; panels double in length
/// until one contributes less than `tol / 100`.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(f: F, a: f64, tol: f64) -> Result<f64> {
    let mut lo = a;
    let mut len = 1.0;
    let mut total = 0.0;
    for _ in 0..200 {
        let piece = adaptive_simpson(&f, lo, lo + len, tol / 100.0)?;
        total += piece;
        lo += len;
        if piece.abs() < tol / 100.0 && f(lo).abs() < tol / 100.0 {
            return Ok(total);
        }
        len *= 2.0;
        if !lo.is_finite() {
            break;
        }
    }
    Err(Error::Quadrature("integrand does not decay".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian() {
        let g = adaptive_simpson(|x| (-0.5 * x * x).exp(), -40.0, 40.0, 1e-12).unwrap();
        assert!((g - (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-10);
        let h = integrate_to_infinity(|x: f64| (-x).exp(), 0.0, 1e-12).unwrap();
        assert!((h - 1.0).abs() < 1e-10);
    }

    #[test]
    fn kink() {
        let v = adaptive_simpson(|x: f64| (-x.abs()).exp(), -50.0, 50.0, 1e-10).unwrap();
        assert!((v - 2.0).abs() < 1e-9);
    }

    #[test]
    fn tolerance_below_rounding_terminates() {
        let scale = 1e5;
        let v = adaptive_simpson(|x: f64| scale * (-0.05 * x).exp(), 0.0, 800.0, 1e-11).unwrap();
        assert!((v / (scale * 20.0 * (1.0 - (-40f64).exp())) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn divergent() {
        assert!(integrate_to_infinity(|_| 1.0, 0.0, 1e-6).is_err());
    }
}
