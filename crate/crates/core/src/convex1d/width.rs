//! Sublevel-set widths and the width-preserving symmetrization.
//!
//! For a coercive convex `f` the sublevel set `{f <= s}` is an interval
//! `[l(s), r(s)]`. Its width `w(s) = r(s) - l(s)` is concave and
//! nondecreasing in `s`, and piecewise linear between the values `f` takes
//! at its breakpoints. The symmetral `Sf` is the even convex function with
//! the same widths: `Sf(x) = inf { s : w(s) >= 2|x| }`. When one branch of
//! `f` hits a wall first, `l` (or `r`) freezes at the wall and only the other
//! branch keeps growing; that regime needs no special casing here because the
//! frozen branch simply stops contributing to `w`.

use serde::{Deserialize, Serialize};

use super::{PlConvex1D, Tail};
use crate::error::Result;

/// The set `[mu, nu]` on which `f` attains its minimum `level`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArgminInterval {
    pub mu: f64,
    pub nu: f64,
    pub level: f64,
}

/// The piecewise-linear map `s -> |{f <= s}|` for `s >= min f`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WidthProfile {
    /// Increasing levels; `levels[0] = min f`.
    pub levels: Vec<f64>,
    /// Widths at `levels`, nondecreasing.
    pub widths: Vec<f64>,
    /// `dw/ds` beyond the last level (0 when both ends are walls).
    pub tail_slope: f64,
}

impl WidthProfile {
    /// `dw/ds` on segment `i` (between `levels[i]` and `levels[i + 1]`).
    pub fn slope(&self, i: usize) -> f64 {
        (self.widths[i + 1] - self.widths[i]) / (self.levels[i + 1] - self.levels[i])
    }

    pub fn slopes(&self) -> Vec<f64> {
        (0..self.levels.len() - 1).map(|i| self.slope(i)).collect()
    }

    /// Width at level `s` (0 below the minimum).
    pub fn eval(&self, s: f64) -> f64 {
        let k = self.levels.len();
        if s < self.levels[0] {
            return 0.0;
        }
        if s >= self.levels[k - 1] {
            return self.widths[k - 1] + self.tail_slope * (s - self.levels[k - 1]);
        }
        let i = self.levels.partition_point(|&l| l <= s) - 1;
        if s == self.levels[i] {
            return self.widths[i];
        }
        let t = (s - self.levels[i]) / (self.levels[i + 1] - self.levels[i]);
        self.widths[i] + t * (self.widths[i + 1] - self.widths[i])
    }

    /// Generalized inverse `inf { s : w(s) >= tau }`; `+inf` if never reached.
    pub fn inverse(&self, tau: f64) -> f64 {
        let k = self.levels.len();
        if tau <= self.widths[0] {
            return self.levels[0];
        }
        if tau > self.widths[k - 1] {
            return if self.tail_slope > 0.0 {
                self.levels[k - 1] + (tau - self.widths[k - 1]) / self.tail_slope
            } else {
                f64::INFINITY
            };
        }
        // first index with width >= tau; widths[0] < tau so i >= 1
        let i = self.widths.partition_point(|&w| w < tau);
        if self.widths[i] == tau {
            return self.levels[i];
        }
        let t = (tau - self.widths[i - 1]) / (self.widths[i] - self.widths[i - 1]);
        self.levels[i - 1] + t * (self.levels[i] - self.levels[i - 1])
    }

    /// Largest width the profile ever reaches (`+inf` with a growing tail).
    pub fn max_width(&self) -> f64 {
        if self.tail_slope > 0.0 {
            f64::INFINITY
        } else {
            *self.widths.last().unwrap()
        }
    }
}

fn level_tol(s: f64) -> f64 {
    1e-12 * 1f64.max(s.abs())
}

impl PlConvex1D {
    fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Index range `[first, last]` of breakpoints sitting on the minimum.
    fn argmin_indices(&self) -> (usize, usize, f64) {
        let min = self.min_value();
        let tol = level_tol(min);
        let first = self.values.iter().position(|&v| v <= min + tol).unwrap();
        let last = self.values.iter().rposition(|&v| v <= min + tol).unwrap();
        (first, last, min)
    }

    /// `[mu, nu] = f^{-1}(min f)`. Requires a valid function.
    pub fn argmin_interval(&self) -> Result<ArgminInterval> {
        self.ensure_valid()?;
        let (first, last, min) = self.argmin_indices();
        Ok(ArgminInterval { mu: self.breakpoints[first], nu: self.breakpoints[last], level: min })
    }

    /// Smallest `x` with `f(x) <= s`, for `s >= min f`.
    fn left_inverse(&self, s: f64, imu: usize) -> f64 {
        let bp = &self.breakpoints;
        let v = &self.values;
        if s >= v[0] {
            return match self.left {
                Tail::Wall => bp[0],
                Tail::Slope(m) => bp[0] + (s - v[0]) / m,
            };
        }
        let p = v[..=imu].partition_point(|&y| y > s);
        if p > imu {
            return bp[imu];
        }
        let j = p - 1;
        if s == v[p] {
            return bp[p];
        }
        bp[j] + (s - v[j]) * (bp[p] - bp[j]) / (v[p] - v[j])
    }

    /// Largest `x` with `f(x) <= s`, for `s >= min f`.
    fn right_inverse(&self, s: f64, inu: usize) -> f64 {
        let bp = &self.breakpoints;
        let v = &self.values;
        let n = bp.len();
        if s >= v[n - 1] {
            return match self.right {
                Tail::Wall => bp[n - 1],
                Tail::Slope(m) => bp[n - 1] + (s - v[n - 1]) / m,
            };
        }
        let p = inu + v[inu..].partition_point(|&y| y <= s);
        if p <= inu {
            return bp[inu];
        }
        let j = p - 1;
        if s == v[j] {
            return bp[j];
        }
        bp[j] + (s - v[j]) * (bp[p] - bp[j]) / (v[p] - v[j])
    }

    /// Endpoints of `{x : f(x) <= s}`, or `None` below the minimum.
    ///
    /// Assumes a valid function.
    pub fn sublevel_interval(&self, s: f64) -> Option<(f64, f64)> {
        let (imu, inu, min) = self.argmin_indices();
        if s < min {
            return None;
        }
        Some((self.left_inverse(s, imu), self.right_inverse(s, inu)))
    }

    /// `|{x : f(x) <= s}|` computed directly from the branches of `f`.
    ///
    /// Assumes a valid function; returns 0 below the minimum.
    pub fn width_at(&self, s: f64) -> f64 {
        let (imu, inu, min) = self.argmin_indices();
        if s < min {
            return 0.0;
        }
        let s = s.max(min);
        self.right_inverse(s, inu) - self.left_inverse(s, imu)
    }

    /// Exact width profile of a valid function.
    pub fn width_profile(&self) -> Result<WidthProfile> {
        self.ensure_valid()?;
        let (imu, inu, min) = self.argmin_indices();
        let mut levels: Vec<f64> = self.values.iter().copied().filter(|&v| v > min).collect();
        levels.push(min);
        levels.sort_by(f64::total_cmp);
        let mut dedup: Vec<f64> = Vec::with_capacity(levels.len());
        for s in levels {
            match dedup.last() {
                Some(&prev) if s - prev <= level_tol(prev) => {}
                _ => dedup.push(s),
            }
        }
        let widths = dedup
            .iter()
            .map(|&s| self.right_inverse(s, inu) - self.left_inverse(s, imu))
            .collect();
        let tail = |t: Tail| match t {
            Tail::Slope(m) => 1.0 / m.abs(),
            Tail::Wall => 0.0,
        };
        Ok(WidthProfile { levels: dedup, widths, tail_slope: tail(self.left) + tail(self.right) })
    }

    /// Width-preserving Steiner symmetral: the even convex function whose
    /// sublevel sets are centred intervals of the same length as those of `f`.
    pub fn symmetrize(&self) -> Result<PlConvex1D> {
        let profile = self.width_profile()?;
        Ok(from_profile(&profile))
    }
}

/// The even function `x -> profile.inverse(2|x|)`, assembled exactly.
pub(crate) fn from_profile(profile: &WidthProfile) -> PlConvex1D {
    let mut half: Vec<(f64, f64)> = Vec::with_capacity(profile.levels.len());
    for (&s, &w) in profile.levels.iter().zip(&profile.widths) {
        let x = 0.5 * w;
        match half.last() {
            // widths can only stall through rounding; keep the lower level
            Some(&(px, _)) if x <= px => {}
            _ => half.push((x, s)),
        }
    }
    let mut xs = Vec::with_capacity(2 * half.len());
    let mut vs = Vec::with_capacity(2 * half.len());
    for &(x, s) in half.iter().rev() {
        if x > 0.0 {
            xs.push(-x);
            vs.push(s);
        }
    }
    for &(x, s) in &half {
        xs.push(x);
        vs.push(s);
    }
    let (left, right) = if profile.tail_slope > 0.0 {
        let m = 2.0 / profile.tail_slope;
        (Tail::Slope(-m), Tail::Slope(m))
    } else {
        (Tail::Wall, Tail::Wall)
    };
    PlConvex1D { breakpoints: xs, values: vs, left, right }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_slope() -> PlConvex1D {
        PlConvex1D::new(vec![0.0], vec![0.0], Tail::Slope(-2.0), Tail::Slope(1.0)).unwrap()
    }

    fn plateau() -> PlConvex1D {
        PlConvex1D::new(vec![-1.0, 1.0], vec![0.0, 0.0], Tail::Slope(-1.0), Tail::Slope(1.0)).unwrap()
    }

    /// Measures `{f <= s}` by counting points of a fine grid.
    fn brute_width(f: &PlConvex1D, s: f64, lo: f64, hi: f64, n: usize) -> f64 {
        let h = (hi - lo) / n as f64;
        (0..n).filter(|&i| f.eval(lo + (i as f64 + 0.5) * h) <= s).count() as f64 * h
    }

    #[test]
    fn argmin_examples() {
        let a = PlConvex1D::abs(0.0, 1.0).argmin_interval().unwrap();
        assert_eq!((a.mu, a.nu), (0.0, 0.0));
        let p = plateau().argmin_interval().unwrap();
        assert_eq!((p.mu, p.nu), (-1.0, 1.0));
        let t = two_slope().argmin_interval().unwrap();
        assert_eq!((t.mu, t.nu, t.level), (0.0, 0.0, 0.0));
    }

    #[test]
    fn width_examples() {
        let abs = PlConvex1D::abs(0.0, 1.0).width_profile().unwrap();
        for s in [0.0, 0.5, 3.0] {
            assert_eq!(abs.eval(s), 2.0 * s);
        }
        let ts = two_slope();
        let prof = ts.width_profile().unwrap();
        for s in [0.0, 0.3, 1.0, 4.0] {
            assert!((prof.eval(s) - 1.5 * s).abs() < 1e-15);
            // independent check: count grid points in the sublevel set
            let brute = brute_width(&ts, s, -10.0, 10.0, 200_000);
            assert!((brute - 1.5 * s).abs() < 2e-4, "s={s}: brute {brute}");
        }
        let pl = plateau().width_profile().unwrap();
        for s in [0.0, 0.5, 2.0] {
            assert_eq!(pl.eval(s), 2.0 + 2.0 * s);
        }
    }

    #[test]
    fn inverse_of_profile() {
        let prof = plateau().width_profile().unwrap();
        assert_eq!(prof.inverse(1.0), 0.0);
        assert_eq!(prof.inverse(2.0), 0.0);
        assert_eq!(prof.inverse(4.0), 1.0);
        let walled = PlConvex1D::indicator(0.0, 1.0).unwrap().width_profile().unwrap();
        assert_eq!(walled.inverse(1.0), 0.0);
        assert_eq!(walled.inverse(1.5), f64::INFINITY);
    }

    #[test]
    fn symmetrize_examples() {
        let shifted = PlConvex1D::abs(3.0, 1.0);
        assert_eq!(shifted.symmetrize().unwrap(), PlConvex1D::abs(0.0, 1.0));

        let s = two_slope().symmetrize().unwrap();
        for x in [-3.0, -1.0, 0.0, 0.5, 2.0] {
            assert!((s.eval(x) - 4.0 / 3.0 * f64::abs(x)).abs() < 1e-12);
        }
        let even = plateau();
        assert_eq!(even.symmetrize().unwrap(), even);
    }

    #[test]
    fn walls_follow_boundary_formula() {
        // x on [0, 1]: only the right branch grows, so Sf(x) = f(2|x|)
        let ramp = PlConvex1D::new(vec![0.0, 1.0], vec![0.0, 1.0], Tail::Wall, Tail::Wall).unwrap();
        let s = ramp.symmetrize().unwrap();
        for x in [-0.5, -0.2, 0.0, 0.3, 0.5] {
            assert!((s.eval(x) - ramp.eval(2.0 * f64::abs(x))).abs() < 1e-15);
        }
        assert_eq!(s.eval(0.51), f64::INFINITY);

        // max(-x, 2x) on [-3, 1]: two-branch regime up to level 2, then the
        // right branch is exhausted and Sf(x) = f(1 - 2|x|).
        let f = PlConvex1D::new(vec![-3.0, 0.0, 1.0], vec![3.0, 0.0, 2.0], Tail::Wall, Tail::Wall)
            .unwrap();
        let s = f.symmetrize().unwrap();
        for x in [0.0, 0.4, 1.0, 1.5] {
            assert!((s.eval(x) - 4.0 / 3.0 * x).abs() < 1e-12);
        }
        for x in [1.5, 1.75, 2.0] {
            assert!((s.eval(x) - f.eval(1.0 - 2.0 * x)).abs() < 1e-12);
            assert_eq!(s.eval(-x), s.eval(x));
        }
        assert_eq!(s.domain(), (-2.0, 2.0));
    }

    #[test]
    fn symmetrize_rejects_invalid() {
        let f = PlConvex1D::new(vec![0.0], vec![0.0], Tail::Slope(0.5), Tail::Slope(1.0)).unwrap();
        assert!(f.symmetrize().is_err());
    }
}
