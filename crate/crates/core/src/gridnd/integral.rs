//! `∫ exp(-f)` over grid functions and a radiality diagnostic.

use rayon::prelude::*;

use super::{interp4, GridFn};
use crate::convex1d::{PlConvex1D, Tail};
use crate::error::{Error, Result};

/// Samples per grid cell used when integrating along a line.
const REFINE: usize = 4;

/// Largest admissible `exp(-(f_boundary - min f))` before the grid is deemed
/// to cut off a non-negligible part of the mass.
pub const BOUNDARY_MASS_RATIO: f64 = 1e-4;

/// `∫ exp(-(v - shift))` along one grid line: each finite run is refined with
/// the cubic-or-linear rule, then integrated exactly as a PL function.
fn line_integral(start: f64, step: f64, vals: &[f64], shift: f64) -> f64 {
    let n = vals.len();
    let mut total = 0.0;
    let mut k = 0;
    while k < n {
        if !vals[k].is_finite() {
            k += 1;
            continue;
        }
        let a = k;
        while k < n && vals[k].is_finite() {
            k += 1;
        }
        let b = k; // run is a..b
        if b - a < 2 {
            continue;
        }
        let get = |i: isize| -> f64 {
            if i < a as isize || i >= b as isize { f64::INFINITY } else { vals[i as usize] - shift }
        };
        let mut pts = Vec::with_capacity((b - a) * REFINE);
        for i in a..b - 1 {
            let st = [get(i as isize - 1), get(i as isize), get(i as isize + 1), get(i as isize + 2)];
            for r in 0..REFINE {
                let fr = r as f64 / REFINE as f64;
                pts.push((start + (i as f64 + fr) * step, interp4(st, fr, false)));
            }
        }
        pts.push((start + (b - 1) as f64 * step, vals[b - 1] - shift));
        let pl = PlConvex1D::from_points(&pts, Tail::Wall, Tail::Wall).expect("grid line is well formed");
        total += pl.exp_integral();
    }
    total
}

/// Composite Simpson weights for `n` equally spaced nodes (3/8 rule on the
/// last three intervals when the interval count is odd).
fn simpson_weights(n: usize) -> Vec<f64> {
    let mut w = vec![0.0; n];
    match n {
        0 | 1 => {}
        2 => {
            w[0] = 0.5;
            w[1] = 0.5;
        }
        _ => {
            let intervals = n - 1;
            let simpson_end = if intervals % 2 == 0 { n - 1 } else { n - 4 };
            let mut i = 0;
            while i < simpson_end {
                w[i] += 1.0 / 3.0;
                w[i + 1] += 4.0 / 3.0;
                w[i + 2] += 1.0 / 3.0;
                i += 2;
            }
            if intervals % 2 == 1 {
                let s = simpson_end;
                w[s] += 3.0 / 8.0;
                w[s + 1] += 9.0 / 8.0;
                w[s + 2] += 9.0 / 8.0;
                w[s + 3] += 3.0 / 8.0;
            }
        }
    }
    w
}

impl GridFn {
    /// `∫ exp(-f)` over the grid: exact PL integration along the last axis,
    /// composite Simpson across the first.
    ///
    /// Fails with [`Error::Divergent`] when `exp(-f)` on the grid boundary is
    /// not negligible against its peak.
    pub fn exp_integral(&self) -> Result<f64> {
        let fmin = self.min_value();
        if !fmin.is_finite() {
            return Err(Error::EmptyDomain);
        }
        let boundary_min = self.boundary_values().into_iter().fold(f64::INFINITY, f64::min);
        let ratio = (-(boundary_min - fmin)).exp();
        if ratio > BOUNDARY_MASS_RATIO {
            return Err(Error::Divergent(ratio));
        }
        self.exp_integral_unchecked()
    }

    /// `∫ exp(-f)` over the grid box, treating everything outside as `+inf`
    /// and skipping the boundary-mass check.
    pub fn exp_integral_unchecked(&self) -> Result<f64> {
        let fmin = self.min_value();
        if !fmin.is_finite() {
            return Err(Error::EmptyDomain);
        }
        let spec = self.spec();
        let scale = (-fmin).exp();
        if self.dim() == 1 {
            return Ok(scale * line_integral(spec.origin[0], spec.spacing[0], self.values(), fmin));
        }
        let ny = spec.shape[1];
        let lines: Vec<f64> = (0..spec.shape[0])
            .into_par_iter()
            .map(|i| line_integral(spec.origin[1], spec.spacing[1], &self.values()[i * ny..(i + 1) * ny], fmin))
            .collect();
        let w = simpson_weights(lines.len());
        let sum: f64 = w.iter().zip(&lines).map(|(a, b)| a * b).sum();
        Ok(scale * spec.spacing[0] * sum)
    }

    fn boundary_values(&self) -> Vec<f64> {
        let s = &self.spec().shape;
        if self.dim() == 1 {
            return vec![self.values()[0], self.values()[s[0] - 1]];
        }
        let mut out = Vec::new();
        for i in 0..s[0] {
            out.push(self.get(i, 0));
            out.push(self.get(i, s[1] - 1));
        }
        for j in 0..s[1] {
            out.push(self.get(0, j));
            out.push(self.get(s[0] - 1, j));
        }
        out
    }

    /// Normalized L² distance from radial symmetry about the origin.
    ///
    /// Nodes inside the largest origin-centred disc that stays in the grid and
    /// avoids `+inf` nodes are binned into rings one spacing wide. The radial
    /// profile is the PL interpolation of ring means against mean ring radius;
    /// the result is `sqrt(Σ (f - profile)² / Σ (f - mean)²)`. In 1-D this
    /// measures evenness.
    pub fn radial_deviation(&self) -> f64 {
        let spec = self.spec();
        let h = spec.spacing.iter().copied().fold(f64::INFINITY, f64::min);
        let mut rmax = (0..spec.dim())
            .map(|a| (-spec.origin[a]).min(spec.end(a)))
            .fold(f64::INFINITY, f64::min);
        let nodes: Vec<(f64, f64)> = (0..spec.len())
            .map(|k| {
                let p = spec.point(k);
                ((p[0] * p[0] + p[1] * p[1]).sqrt(), self.values()[k])
            })
            .collect();
        for &(r, v) in &nodes {
            if !v.is_finite() {
                rmax = rmax.min(r);
            }
        }
        if !(rmax > 0.0) {
            return 0.0;
        }
        let inside: Vec<(f64, f64)> = nodes.into_iter().filter(|&(r, _)| r < rmax).collect();
        let rings = (rmax / h).ceil() as usize + 1;
        let mut sum_r = vec![0.0; rings];
        let mut sum_f = vec![0.0; rings];
        let mut count = vec![0usize; rings];
        for &(r, v) in &inside {
            let b = ((r / h) as usize).min(rings - 1);
            sum_r[b] += r;
            sum_f[b] += v;
            count[b] += 1;
        }
        let prof: Vec<(f64, f64)> = (0..rings)
            .filter(|&b| count[b] > 0)
            .map(|b| (sum_r[b] / count[b] as f64, sum_f[b] / count[b] as f64))
            .collect();
        if prof.len() < 2 {
            return 0.0;
        }
        let profile = |r: f64| -> f64 {
            let i = prof.partition_point(|&(pr, _)| pr <= r);
            if i == 0 {
                return prof[0].1;
            }
            if i == prof.len() {
                return prof[i - 1].1;
            }
            let (r0, f0) = prof[i - 1];
            let (r1, f1) = prof[i];
            f0 + (r - r0) / (r1 - r0) * (f1 - f0)
        };
        let mean = inside.iter().map(|&(_, v)| v).sum::<f64>() / inside.len() as f64;
        let var: f64 = inside.iter().map(|&(_, v)| (v - mean).powi(2)).sum();
        if var == 0.0 {
            return 0.0;
        }
        let res: f64 = inside.iter().map(|&(r, v)| (v - profile(r)).powi(2)).sum();
        (res / var).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridnd::GridSpec;
    use std::f64::consts::PI;

    #[test]
    fn weights_integrate_cubics() {
        for n in [2usize, 3, 4, 5, 8, 11] {
            let w = simpson_weights(n);
            let h = 1.0 / (n - 1) as f64;
            let s: f64 = w.iter().enumerate().map(|(i, w)| w * (i as f64 * h).powi(if n > 3 { 3 } else { 1 })).sum::<f64>() * h;
            let exact = if n > 3 { 0.25 } else { 0.5 };
            assert!((s - exact).abs() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn gaussian_and_l1() {
        let g = GridFn::from_fn(GridSpec::square(2, 7.0, 141).unwrap(), |p| 0.5 * (p[0] * p[0] + p[1] * p[1]))
            .unwrap();
        assert!((g.exp_integral().unwrap() / (2.0 * PI) - 1.0).abs() < 1e-3);
        let l1 = GridFn::from_fn(GridSpec::square(2, 14.0, 281).unwrap(), |p| p[0].abs() + p[1].abs()).unwrap();
        assert!((l1.exp_integral().unwrap() / 4.0 - 1.0).abs() < 1e-3);
        let moved =
            GridFn::from_fn(GridSpec::square(2, 7.0, 141).unwrap(), |p| 0.5 * ((p[0] - 0.7).powi(2) + (p[1] + 0.3).powi(2)))
                .unwrap();
        assert!((moved.exp_integral().unwrap() / (2.0 * PI) - 1.0).abs() < 1e-3);
    }

    #[test]
    fn truncated_mass_is_reported() {
        let g = GridFn::from_fn(GridSpec::square(2, 2.0, 41).unwrap(), |p| p[0].abs() + p[1].abs()).unwrap();
        assert!(matches!(g.exp_integral(), Err(Error::Divergent(_))));
    }

    #[test]
    fn radial_deviation_examples() {
        let spec = GridSpec::square(2, 4.0, 81).unwrap();
        let radial = GridFn::from_fn(spec.clone(), |p| p[0] * p[0] + p[1] * p[1]).unwrap();
        let aniso = GridFn::from_fn(spec, |p| p[0] * p[0] + 4.0 * p[1] * p[1]).unwrap();
        assert!(radial.radial_deviation() < 1e-2);
        assert!(aniso.radial_deviation() > 0.3);
    }
}
