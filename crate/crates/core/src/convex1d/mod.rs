//! Exact calculus of one-dimensional piecewise-linear convex functions.
//!
//! A [`PlConvex1D`] is given by its breakpoints, the values there, and what
//! happens beyond the outermost breakpoints: either an affine tail or a wall
//! (`+inf`). Every operation here is closed on that representation, so the
//! symmetrizations, the conjugate and the integral of `exp(-f)` are computed
//! without any discretization.

mod infconv;
mod integral;
mod legendre;
mod sample;
mod width;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use infconv::inf_convolve;
pub use sample::{sample_convex, SampleOptions};
pub use width::{ArgminInterval, WidthProfile};

/// Behaviour of a function beyond its outermost breakpoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tail {
    /// Affine continuation with the given slope.
    Slope(f64),
    /// `+inf` beyond the breakpoint.
    Wall,
}

impl Tail {
    pub fn is_wall(&self) -> bool {
        matches!(self, Tail::Wall)
    }

    fn negated(self) -> Tail {
        match self {
            Tail::Slope(m) => Tail::Slope(-m),
            Tail::Wall => Tail::Wall,
        }
    }
}

/// A single broken invariant reported by [`PlConvex1D::validate`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Violation {
    /// The slope entering breakpoint `index` exceeds the slope leaving it.
    NonConvex { index: usize, before: f64, after: f64 },
    /// The left tail does not go to `+inf`.
    LeftTailNotCoercive { slope: f64 },
    /// The right tail does not go to `+inf`.
    RightTailNotCoercive { slope: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonConvex { index, before, after } => write!(
                f,
                "convexity fails at breakpoint {index}: slope {before} is followed by {after}"
            ),
            Violation::LeftTailNotCoercive { slope } => {
                write!(f, "left tail slope {slope} is not negative")
            }
            Violation::RightTailNotCoercive { slope } => {
                write!(f, "right tail slope {slope} is not positive")
            }
        }
    }
}

#[derive(Deserialize)]
struct RawPl {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
    left: Tail,
    right: Tail,
}

impl TryFrom<RawPl> for PlConvex1D {
    type Error = Error;

    fn try_from(raw: RawPl) -> Result<Self> {
        PlConvex1D::new(raw.breakpoints, raw.values, raw.left, raw.right)
    }
}

/// Piecewise-linear function on the line with optional walls.
///
/// The structure (sorted finite breakpoints, finite values, finite tail
/// slopes) is enforced on construction. Convexity and coercivity are *not*:
/// they are checked by [`validate`](Self::validate) and by every operation
/// that needs them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPl")]
pub struct PlConvex1D {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
    left: Tail,
    right: Tail,
}

impl PlConvex1D {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>, left: Tail, right: Tail) -> Result<Self> {
        if breakpoints.is_empty() {
            return Err(Error::Malformed("at least one breakpoint is required".into()));
        }
        if breakpoints.len() != values.len() {
            return Err(Error::Malformed(format!(
                "{} breakpoints but {} values",
                breakpoints.len(),
                values.len()
            )));
        }
        if let Some(i) = breakpoints.iter().position(|x| !x.is_finite()) {
            return Err(Error::Malformed(format!("breakpoint {i} is not finite")));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Malformed(format!("value {i} is not finite")));
        }
        if let Some(i) = breakpoints.windows(2).position(|w| w[0] >= w[1]) {
            return Err(Error::Malformed(format!(
                "breakpoints not strictly increasing at index {}",
                i + 1
            )));
        }
        for (side, tail) in [("left", left), ("right", right)] {
            if let Tail::Slope(m) = tail {
                if !m.is_finite() {
                    return Err(Error::Malformed(format!("{side} tail slope is not finite")));
                }
            }
        }
        Ok(PlConvex1D { breakpoints, values, left, right })
    }

    /// Builds from `(x, f(x))` pairs.
    pub fn from_points(points: &[(f64, f64)], left: Tail, right: Tail) -> Result<Self> {
        let (xs, vs) = points.iter().copied().unzip();
        Self::new(xs, vs, left, right)
    }

    /// `|x - center|` scaled by `slope`.
    pub fn abs(center: f64, slope: f64) -> Self {
        Self::new(vec![center], vec![0.0], Tail::Slope(-slope), Tail::Slope(slope))
            .expect("abs is well formed")
    }

    /// Indicator (0 inside, `+inf` outside) of `[a, b]`.
    pub fn indicator(a: f64, b: f64) -> Result<Self> {
        if a == b {
            return Self::new(vec![a], vec![0.0], Tail::Wall, Tail::Wall);
        }
        Self::new(vec![a, b], vec![0.0, 0.0], Tail::Wall, Tail::Wall)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn left(&self) -> Tail {
        self.left
    }

    pub fn right(&self) -> Tail {
        self.right
    }

    pub fn len(&self) -> usize {
        self.breakpoints.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Closed effective domain `[lo, hi]`, with infinite ends for affine tails.
    pub fn domain(&self) -> (f64, f64) {
        let lo = if self.left.is_wall() { self.breakpoints[0] } else { f64::NEG_INFINITY };
        let hi = if self.right.is_wall() { *self.breakpoints.last().unwrap() } else { f64::INFINITY };
        (lo, hi)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let bp = &self.breakpoints;
        let v = &self.values;
        let n = bp.len();
        if x < bp[0] {
            return match self.left {
                Tail::Wall => f64::INFINITY,
                Tail::Slope(m) => v[0] + m * (x - bp[0]),
            };
        }
        if x > bp[n - 1] {
            return match self.right {
                Tail::Wall => f64::INFINITY,
                Tail::Slope(m) => v[n - 1] + m * (x - bp[n - 1]),
            };
        }
        let i = bp.partition_point(|&b| b <= x);
        if i == n {
            return v[n - 1];
        }
        let j = i - 1;
        if x == bp[j] {
            return v[j];
        }
        let t = (x - bp[j]) / (bp[i] - bp[j]);
        v[j] + t * (v[i] - v[j])
    }

    /// Slope of the chord between breakpoints `i` and `i + 1`.
    pub fn chord_slope(&self, i: usize) -> f64 {
        (self.values[i + 1] - self.values[i]) / (self.breakpoints[i + 1] - self.breakpoints[i])
    }

    /// Slope entering breakpoint `i` from the left (`-inf` at a left wall).
    pub(crate) fn slope_before(&self, i: usize) -> f64 {
        if i == 0 {
            match self.left {
                Tail::Slope(m) => m,
                Tail::Wall => f64::NEG_INFINITY,
            }
        } else {
            self.chord_slope(i - 1)
        }
    }

    /// Slope leaving breakpoint `i` to the right (`+inf` at a right wall).
    pub(crate) fn slope_after(&self, i: usize) -> f64 {
        if i + 1 == self.len() {
            match self.right {
                Tail::Slope(m) => m,
                Tail::Wall => f64::INFINITY,
            }
        } else {
            self.chord_slope(i)
        }
    }

    /// Lists every broken convexity/coercivity invariant; empty when valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for i in 0..self.len() {
            let before = self.slope_before(i);
            let after = self.slope_after(i);
            if before.is_finite() && after.is_finite() {
                let scale = 1f64.max(before.abs()).max(after.abs());
                if before > after + crate::REL_TOL * scale {
                    out.push(Violation::NonConvex { index: i, before, after });
                }
            }
        }
        if let Tail::Slope(m) = self.left {
            if m >= 0.0 {
                out.push(Violation::LeftTailNotCoercive { slope: m });
            }
        }
        if let Tail::Slope(m) = self.right {
            if m <= 0.0 {
                out.push(Violation::RightTailNotCoercive { slope: m });
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    pub(crate) fn ensure_valid(&self) -> Result<()> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Invalid(v))
        }
    }

    /// `x -> f(x - dx) + dy`.
    pub fn translate(&self, dx: f64, dy: f64) -> Self {
        PlConvex1D {
            breakpoints: self.breakpoints.iter().map(|x| x + dx).collect(),
            values: self.values.iter().map(|v| v + dy).collect(),
            left: self.left,
            right: self.right,
        }
    }

    /// `x -> f(x / c)` for `c > 0`.
    pub fn scale_x(&self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::Argument(format!("scale factor must be positive, got {c}")));
        }
        let tail = |t: Tail| match t {
            Tail::Slope(m) => Tail::Slope(m / c),
            Tail::Wall => Tail::Wall,
        };
        Ok(PlConvex1D {
            breakpoints: self.breakpoints.iter().map(|x| x * c).collect(),
            values: self.values.clone(),
            left: tail(self.left),
            right: tail(self.right),
        })
    }

    /// `x -> k * f(x)` for `k > 0`.
    pub fn scale_y(&self, k: f64) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::Argument(format!("value scale must be positive, got {k}")));
        }
        let tail = |t: Tail| match t {
            Tail::Slope(m) => Tail::Slope(m * k),
            Tail::Wall => Tail::Wall,
        };
        Ok(PlConvex1D {
            breakpoints: self.breakpoints.clone(),
            values: self.values.iter().map(|v| v * k).collect(),
            left: tail(self.left),
            right: tail(self.right),
        })
    }

    /// `x -> f(-x)`.
    pub fn reflect(&self) -> Self {
        PlConvex1D {
            breakpoints: self.breakpoints.iter().rev().map(|x| -x).collect(),
            values: self.values.iter().rev().copied().collect(),
            left: self.right.negated(),
            right: self.left.negated(),
        }
    }

    /// Pointwise sum. Fails when the effective domains do not meet.
    pub fn sum(&self, other: &PlConvex1D) -> Result<Self> {
        let (a0, a1) = self.domain();
        let (b0, b1) = other.domain();
        let lo = a0.max(b0);
        let hi = a1.min(b1);
        if lo > hi {
            return Err(Error::EmptyDomain);
        }
        let mut xs: Vec<f64> = self
            .breakpoints
            .iter()
            .chain(other.breakpoints.iter())
            .copied()
            .filter(|&x| x >= lo && x <= hi)
            .collect();
        if lo.is_finite() {
            xs.push(lo);
        }
        if hi.is_finite() {
            xs.push(hi);
        }
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        let vs: Vec<f64> = xs.iter().map(|&x| self.eval(x) + other.eval(x)).collect();
        let tail = |a: Tail, b: Tail| match (a, b) {
            (Tail::Slope(p), Tail::Slope(q)) => Tail::Slope(p + q),
            _ => Tail::Wall,
        };
        Self::new(xs, vs, tail(self.left, other.left), tail(self.right, other.right))
    }

    /// Drops breakpoints where the incoming and outgoing slopes agree.
    pub fn simplify(&self) -> Self {
        if self.len() == 1 {
            return self.clone();
        }
        let mut keep = vec![true; self.len()];
        for (i, k) in keep.iter_mut().enumerate() {
            let before = self.slope_before(i);
            let after = self.slope_after(i);
            if before.is_finite() && after.is_finite() && slopes_equal(before, after) {
                *k = false;
            }
        }
        if !keep.iter().any(|&k| k) {
            keep[0] = true;
        }
        let pick = |v: &[f64]| -> Vec<f64> {
            v.iter().zip(&keep).filter(|(_, &k)| k).map(|(x, _)| *x).collect()
        };
        PlConvex1D {
            breakpoints: pick(&self.breakpoints),
            values: pick(&self.values),
            left: self.left,
            right: self.right,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

pub(crate) fn slopes_equal(a: f64, b: f64) -> bool {
    a == b || (a.is_finite() && b.is_finite() && (a - b).abs() <= 1e-12 * 1f64.max(a.abs()).max(b.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_slope() -> PlConvex1D {
        PlConvex1D::new(vec![0.0], vec![0.0], Tail::Slope(-2.0), Tail::Slope(1.0)).unwrap()
    }

    #[test]
    fn eval_examples() {
        assert_eq!(PlConvex1D::abs(0.0, 1.0).eval(3.0), 3.0);
        let walled = PlConvex1D::new(vec![0.0, 1.0], vec![0.0, 1.0], Tail::Wall, Tail::Wall).unwrap();
        assert_eq!(walled.eval(2.0), f64::INFINITY);
        assert_eq!(walled.eval(-0.5), f64::INFINITY);
        assert_eq!(walled.eval(0.25), 0.25);
        assert_eq!(two_slope().eval(-1.0), 2.0);
        assert_eq!(two_slope().eval(3.0), 3.0);
    }

    #[test]
    fn construction_rejects_malformed() {
        assert!(PlConvex1D::new(vec![], vec![], Tail::Wall, Tail::Wall).is_err());
        assert!(PlConvex1D::new(vec![0.0, 0.0], vec![1.0, 1.0], Tail::Wall, Tail::Wall).is_err());
        assert!(PlConvex1D::new(vec![0.0], vec![f64::NAN], Tail::Wall, Tail::Wall).is_err());
        assert!(PlConvex1D::new(vec![0.0, 1.0], vec![1.0], Tail::Wall, Tail::Wall).is_err());
    }

    #[test]
    fn validate_examples() {
        assert!(two_slope().validate().is_empty());
        let bump = PlConvex1D::new(
            vec![-1.0, 0.0, 1.0],
            vec![0.0, 1.0, 0.0],
            Tail::Slope(-1.0),
            Tail::Slope(1.0),
        )
        .unwrap();
        let v = bump.validate();
        assert_eq!(v.len(), 1);
        assert!(matches!(v[0], Violation::NonConvex { index: 1, .. }));

        let flat_left = PlConvex1D::new(vec![0.0], vec![0.0], Tail::Slope(0.0), Tail::Slope(1.0)).unwrap();
        assert_eq!(
            flat_left.validate(),
            vec![Violation::LeftTailNotCoercive { slope: 0.0 }]
        );
        // A left tail steeper than the first chord is fine; a shallower one is not.
        let bad_tail = PlConvex1D::new(
            vec![0.0, 1.0],
            vec![1.0, 0.0],
            Tail::Slope(-0.5),
            Tail::Slope(1.0),
        )
        .unwrap();
        assert!(matches!(bad_tail.validate()[0], Violation::NonConvex { index: 0, .. }));
    }

    #[test]
    fn transforms() {
        let t = PlConvex1D::abs(0.0, 1.0).translate(3.0, 0.0);
        assert_eq!(t.eval(3.0), 0.0);
        let r = two_slope().reflect();
        for x in [-2.0, -0.5, 0.0, 0.7, 4.0] {
            assert_eq!(r.eval(x), (2.0 * x).max(-x));
        }
        let s = PlConvex1D::abs(0.0, 1.0).scale_x(2.0).unwrap();
        for x in [-3.0, 0.0, 1.0, 5.0] {
            assert_eq!(s.eval(x), (x / 2.0).abs());
        }
        assert!(two_slope().scale_x(0.0).is_err());
        assert!(two_slope().scale_x(-1.0).is_err());
    }

    #[test]
    fn sum_and_simplify() {
        let a = PlConvex1D::abs(0.0, 1.0);
        let b = PlConvex1D::indicator(-1.0, 2.0).unwrap();
        let s = a.sum(&b).unwrap();
        assert_eq!(s.domain(), (-1.0, 2.0));
        assert_eq!(s.eval(1.5), 1.5);
        assert_eq!(s.eval(3.0), f64::INFINITY);
        let c = PlConvex1D::new(
            vec![-1.0, 0.0, 1.0, 2.0],
            vec![1.0, 0.0, 1.0, 2.0],
            Tail::Slope(-1.0),
            Tail::Slope(1.0),
        )
        .unwrap()
        .simplify();
        assert_eq!(c.breakpoints(), &[0.0]);
    }

    #[test]
    fn json_format() {
        let f = two_slope();
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(
            s,
            r#"{"breakpoints":[0.0],"values":[0.0],"left":{"slope":-2.0},"right":{"slope":1.0}}"#
        );
        let w: PlConvex1D = serde_json::from_str(
            r#"{"breakpoints":[0,1],"values":[0,1],"left":"wall","right":{"slope":2}}"#,
        )
        .unwrap();
        assert_eq!(w.left(), Tail::Wall);
        assert_eq!(w.eval(2.0), 3.0);
        assert!(serde_json::from_str::<PlConvex1D>(
            r#"{"breakpoints":[1,0],"values":[0,1],"left":"wall","right":"wall"}"#
        )
        .is_err());
    }
}
