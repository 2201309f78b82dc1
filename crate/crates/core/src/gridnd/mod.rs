//! Tensor-grid functions on the line and in the plane.
//!
//! A [`GridFn`] stores samples of an extended-real function on a regular grid,
//! with `+inf` marking nodes outside the effective domain. Symmetrization works
//! line by line: each line parallel to `u` is sampled, fitted by an exact
//! piecewise-linear convex function, symmetrized with the 1-D engine and
//! resampled onto the grid.

mod integral;
mod io;
mod llt;
mod section;
mod symmetrize;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use io::{fmt_value, INFINITY_SENTINEL};
pub use llt::{conjugate_1d, llt_legendre};
pub use section::{extract_line, extract_line_with, LineSection, RepairTol, TGrid};
pub use symmetrize::{steiner_symmetrize, steiner_symmetrize_with, SymmetrizeOptions, DEFAULT_LEVEL_CAP};

/// Geometry of a regular grid: node `i` on axis `a` sits at
/// `origin[a] + i * spacing[a]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub origin: Vec<f64>,
    pub spacing: Vec<f64>,
    pub shape: Vec<usize>,
}

impl GridSpec {
    pub fn new(origin: Vec<f64>, spacing: Vec<f64>, shape: Vec<usize>) -> Result<Self> {
        let d = origin.len();
        if !(d == 1 || d == 2) || spacing.len() != d || shape.len() != d {
            return Err(Error::Malformed(format!(
                "grid must be 1-D or 2-D with matching origin/spacing/shape, got {}/{}/{}",
                origin.len(),
                spacing.len(),
                shape.len()
            )));
        }
        if origin.iter().any(|o| !o.is_finite()) {
            return Err(Error::Malformed("grid origin is not finite".into()));
        }
        if spacing.iter().any(|h| !(h.is_finite() && *h > 0.0)) {
            return Err(Error::Malformed("grid spacing must be positive".into()));
        }
        if shape.iter().any(|&n| n < 2) {
            return Err(Error::Malformed("every grid axis needs at least 2 nodes".into()));
        }
        Ok(GridSpec { origin, spacing, shape })
    }

    /// Grid on `[-half[a], half[a]]` with `points[a]` nodes per axis.
    pub fn centered(half: &[f64], points: &[usize]) -> Result<Self> {
        if half.len() != points.len() {
            return Err(Error::Malformed("half widths and point counts differ in length".into()));
        }
        let spacing = half
            .iter()
            .zip(points)
            .map(|(&w, &n)| 2.0 * w / (n.max(2) - 1) as f64)
            .collect();
        Self::new(half.iter().map(|w| -w).collect(), spacing, points.to_vec())
    }

    /// Square (or interval) grid `[-half, half]^dim` with `points` nodes per axis.
    pub fn square(dim: usize, half: f64, points: usize) -> Result<Self> {
        Self::centered(&vec![half; dim], &vec![points; dim])
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn coord(&self, axis: usize, i: usize) -> f64 {
        self.origin[axis] + i as f64 * self.spacing[axis]
    }

    /// Upper end of an axis.
    pub fn end(&self, axis: usize) -> f64 {
        self.coord(axis, self.shape[axis] - 1)
    }

    /// Multi-index of a flat (row-major) index.
    pub fn unflatten(&self, k: usize) -> (usize, usize) {
        if self.dim() == 1 {
            (k, 0)
        } else {
            (k / self.shape[1], k % self.shape[1])
        }
    }

    /// Coordinates of the node with flat index `k` (second entry 0 in 1-D).
    pub fn point(&self, k: usize) -> [f64; 2] {
        let (i, j) = self.unflatten(k);
        if self.dim() == 1 {
            [self.coord(0, i), 0.0]
        } else {
            [self.coord(0, i), self.coord(1, j)]
        }
    }

    /// Cell containing `x` on an axis: `(i, frac)` with `x = coord(i) + frac * h`,
    /// `0 <= i <= n - 2`; `None` outside the axis range.
    fn locate(&self, axis: usize, x: f64) -> Option<(usize, f64)> {
        let n = self.shape[axis];
        let r = (x - self.origin[axis]) / self.spacing[axis];
        let slack = 1e-9;
        if !(r >= -slack && r <= (n - 1) as f64 + slack) {
            return None;
        }
        let r = r.clamp(0.0, (n - 1) as f64);
        let i = (r.floor() as usize).min(n - 2);
        Some((i, r - i as f64))
    }

    /// Corners of the bounding box.
    pub(crate) fn corners(&self) -> Vec<[f64; 2]> {
        if self.dim() == 1 {
            vec![[self.origin[0], 0.0], [self.end(0), 0.0]]
        } else {
            let (x0, x1, y0, y1) = (self.origin[0], self.end(0), self.origin[1], self.end(1));
            vec![[x0, y0], [x0, y1], [x1, y0], [x1, y1]]
        }
    }
}

/// A unit vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Direction {
    comps: Vec<f64>,
}

impl Direction {
    /// Accepts components whose norm is 1 within `1e-12`.
    pub fn new(comps: Vec<f64>) -> Result<Self> {
        if comps.is_empty() || comps.len() > 2 || comps.iter().any(|c| !c.is_finite()) {
            return Err(Error::Argument(format!("bad direction {comps:?}")));
        }
        let norm = comps.iter().map(|c| c * c).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::Argument(format!("direction has norm {norm}, expected 1")));
        }
        Ok(Direction { comps })
    }

    pub fn normalized(comps: &[f64]) -> Result<Self> {
        let norm = comps.iter().map(|c| c * c).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::Argument("cannot normalize a zero or non-finite vector".into()));
        }
        Self::new(comps.iter().map(|c| c / norm).collect())
    }

    /// `(cos θ, sin θ)`.
    pub fn from_angle(theta: f64) -> Self {
        Direction { comps: vec![theta.cos(), theta.sin()] }
    }

    /// Coordinate axis `k` in dimension `dim`.
    pub fn axis(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::Argument(format!("axis {k} out of range for dimension {dim}")));
        }
        let mut c = vec![0.0; dim];
        c[k] = 1.0;
        Self::new(c)
    }

    pub fn components(&self) -> &[f64] {
        &self.comps
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    /// Components padded to the plane.
    pub(crate) fn planar(&self) -> [f64; 2] {
        [self.comps[0], self.comps.get(1).copied().unwrap_or(0.0)]
    }

    /// The direction rotated by a quarter turn (spans `u⊥` in the plane).
    pub fn perp(&self) -> [f64; 2] {
        let [a, b] = self.planar();
        [-b, a]
    }
}

/// Interpolation scheme for off-node evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Interp {
    /// Multilinear.
    Linear,
    /// Keys cubic convolution, applied axis by axis; exact on quadratics.
    /// Falls back to linear where the 4-point stencil leaves the grid, meets
    /// `+inf`, or straddles a kink (see [`interp4`]).
    Cubic,
    /// As `Cubic`, but a point within half a cell of a finite node across
    /// the edge of the finite region takes a value extrapolated from the
    /// finite side instead of `+inf`. The edge of the region is then located
    /// halfway between nodes rather than pulled in to the last finite one.
    CubicEdge,
}

/// Keys cubic convolution weights (a = -1/2) for offsets -1, 0, 1, 2.
pub(crate) fn keys_weights(t: f64) -> [f64; 4] {
    let t2 = t * t;
    let t3 = t2 * t;
    [
        0.5 * (-t3 + 2.0 * t2 - t),
        0.5 * (3.0 * t3 - 5.0 * t2 + 2.0),
        0.5 * (-3.0 * t3 + 4.0 * t2 + t),
        0.5 * (t3 - t2),
    ]
}

/// Interpolates at fraction `t` between `v[1]` and `v[2]`.
///
/// Uses the cubic stencil when all four values are finite and the two second
/// differences agree to within a quarter of the larger one; otherwise linear.
/// The comparison keeps kinks of piecewise-linear data sharp.
///
/// When exactly one of `v[1]`, `v[2]` is `+inf` the result is `+inf`, unless
/// `edge` is set and the finite node is the nearer one: then the value is
/// extrapolated linearly from the two finite nodes on that side (or copied
/// when there is only one).
pub(crate) fn interp4(v: [f64; 4], t: f64, edge: bool) -> f64 {
    if t <= ZERO_WEIGHT {
        return v[1];
    }
    if 1.0 - t <= ZERO_WEIGHT {
        return v[2];
    }
    if smooth(&v) {
        let w = keys_weights(t);
        return w.iter().zip(&v).map(|(a, b)| a * b).sum();
    }
    match (v[1].is_finite(), v[2].is_finite()) {
        (true, true) => v[1] + t * (v[2] - v[1]),
        (true, false) if edge && t < 0.5 => {
            if v[0].is_finite() { v[1] + t * (v[1] - v[0]) } else { v[1] }
        }
        (false, true) if edge && t > 0.5 => {
            if v[3].is_finite() { v[2] + (1.0 - t) * (v[2] - v[3]) } else { v[2] }
        }
        _ => f64::INFINITY,
    }
}

pub(crate) fn smooth(v: &[f64; 4]) -> bool {
    if !v.iter().all(|x| x.is_finite()) {
        return false;
    }
    let a = v[0] - 2.0 * v[1] + v[2];
    let b = v[1] - 2.0 * v[2] + v[3];
    (a - b).abs() <= 0.25 * a.abs().max(b.abs())
}

/// Weights below this are treated as exactly zero so that a node sitting on
/// the edge of the finite region is not lost to its `+inf` neighbour.
const ZERO_WEIGHT: f64 = 1e-12;

/// Samples of an extended-real function on a [`GridSpec`], stored row-major
/// (last axis fastest). `+inf` marks nodes outside the effective domain.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFn {
    spec: GridSpec,
    values: Vec<f64>,
}

impl GridFn {
    pub fn from_values(spec: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(Error::Malformed(format!(
                "grid has {} nodes but {} values were given",
                spec.len(),
                values.len()
            )));
        }
        if let Some(k) = values.iter().position(|v| v.is_nan() || *v == f64::NEG_INFINITY) {
            return Err(Error::Malformed(format!("value at node {k} is NaN or -inf")));
        }
        Ok(GridFn { spec, values })
    }

    /// Samples `f` at every node. `f` receives the node coordinates.
    pub fn from_fn<F: Fn(&[f64]) -> f64 + Sync>(spec: GridSpec, f: F) -> Result<Self> {
        let d = spec.dim();
        let values = (0..spec.len())
            .into_par_iter()
            .map(|k| {
                let p = spec.point(k);
                f(&p[..d])
            })
            .collect();
        Self::from_values(spec, values)
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.spec.dim()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if self.dim() == 1 {
            self.values[i]
        } else {
            self.values[i * self.spec.shape[1] + j]
        }
    }

    /// Smallest finite value (`+inf` when the finite region is empty).
    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn finite_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_finite()).count()
    }

    /// Same grid, values transformed pointwise.
    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> Result<Self> {
        Self::from_values(self.spec.clone(), self.values.iter().map(|&v| f(v)).collect())
    }

    /// Evaluates at an arbitrary point; `+inf` outside the grid.
    pub fn eval(&self, p: &[f64], interp: Interp) -> f64 {
        match interp {
            Interp::Linear => self.eval_linear(p),
            Interp::Cubic => self.eval_cubic(p, false),
            Interp::CubicEdge => self.eval_cubic(p, true),
        }
    }

    fn eval_linear(&self, p: &[f64]) -> f64 {
        let Some((i, fx)) = self.spec.locate(0, p[0]) else { return f64::INFINITY };
        let wx = [1.0 - fx, fx];
        if self.dim() == 1 {
            return combine((0..2).map(|a| (wx[a], self.values[i + a])));
        }
        let Some((j, fy)) = self.spec.locate(1, p[1]) else { return f64::INFINITY };
        let wy = [1.0 - fy, fy];
        combine((0..4).map(|k| {
            let (a, b) = (k / 2, k % 2);
            (wx[a] * wy[b], self.get(i + a, j + b))
        }))
    }

    fn eval_cubic(&self, p: &[f64], edge: bool) -> f64 {
        let Some((i, fx)) = self.spec.locate(0, p[0]) else { return f64::INFINITY };
        let nx = self.spec.shape[0] as isize;
        let row = |j: usize| -> f64 {
            let v = std::array::from_fn(|a| {
                let ii = i as isize + a as isize - 1;
                if ii < 0 || ii >= nx { f64::INFINITY } else { self.get(ii as usize, j) }
            });
            interp4(v, fx, edge)
        };
        if self.dim() == 1 {
            return row(0);
        }
        let Some((j, fy)) = self.spec.locate(1, p[1]) else { return f64::INFINITY };
        let ny = self.spec.shape[1] as isize;
        let v = std::array::from_fn(|b| {
            let jj = j as isize + b as isize - 1;
            if jj < 0 || jj >= ny { f64::INFINITY } else { row(jj as usize) }
        });
        interp4(v, fy, edge)
    }

    /// Largest violation of discrete convexity (negative second difference)
    /// along grid rows and columns, over triples of finite nodes.
    pub fn convexity_gap(&self) -> f64 {
        let mut worst: f64 = 0.0;
        let mut scan = |vals: &mut dyn Iterator<Item = f64>| {
            let v: Vec<f64> = vals.collect();
            for w in v.windows(3) {
                if w.iter().all(|x| x.is_finite()) {
                    worst = worst.max(w[1] - 0.5 * (w[0] + w[2]));
                }
            }
        };
        let s = &self.spec.shape;
        if self.dim() == 1 {
            scan(&mut self.values.iter().copied());
        } else {
            for i in 0..s[0] {
                scan(&mut (0..s[1]).map(|j| self.get(i, j)));
            }
            for j in 0..s[1] {
                scan(&mut (0..s[0]).map(|i| self.get(i, j)));
            }
        }
        worst
    }

    /// `sup |f(x) - f(-x)|` over node pairs where both values are finite,
    /// together with the number of pairs where exactly one is finite and the
    /// finite one lies below `min f + 20`. The grid must be centred at 0.
    pub fn asymmetry(&self) -> Result<(f64, usize)> {
        let s = &self.spec;
        for a in 0..s.dim() {
            let c = s.origin[a] + s.end(a);
            if c.abs() > 1e-9 * s.spacing[a] * s.shape[a] as f64 {
                return Err(Error::Argument("evenness needs a grid centred at the origin".into()));
            }
        }
        let n = self.values.len();
        let floor = self.min_value() + 20.0;
        let mut sup: f64 = 0.0;
        let mut mismatches = 0;
        for k in 0..n {
            let a = self.values[k];
            let b = self.values[n - 1 - k];
            match (a.is_finite(), b.is_finite()) {
                (true, true) => sup = sup.max((a - b).abs()),
                (true, false) if a < floor => mismatches += 1,
                (false, true) if b < floor => mismatches += 1,
                _ => {}
            }
        }
        Ok((sup, mismatches))
    }
}

/// Weighted sum ignoring zero weights; `+inf` when a weighted node is `+inf`.
fn combine<I: Iterator<Item = (f64, f64)>>(terms: I) -> f64 {
    let mut acc = 0.0;
    for (w, v) in terms {
        if w.abs() <= ZERO_WEIGHT {
            continue;
        }
        if !v.is_finite() {
            return f64::INFINITY;
        }
        acc += w * v;
    }
    acc
}
