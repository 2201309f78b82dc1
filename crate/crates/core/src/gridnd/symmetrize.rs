//! Steiner symmetrization of grid functions about the hyperplane `u⊥`.

use rayon::prelude::*;

use super::section::{sample_line, RepairTol, TGrid};
use super::{interp4, Direction, GridFn, Interp};
use crate::convex1d::PlConvex1D;
use crate::error::{Error, Result};

/// Controls for [`steiner_symmetrize_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetrizeOptions {
    /// How sections are sampled from the grid.
    pub interp: Interp,
    /// Section samples per grid spacing.
    pub refine: usize,
    pub repair: RepairTol,
    /// Sections are cut to `{f <= min f + cap}` before fitting. Symmetrization
    /// commutes with such cuts (they are sublevel sets, whose widths are
    /// preserved), and it keeps the edge of the finite region away from the
    /// grid boundary, where interpolated values are least reliable.
    pub level_cap: Option<f64>,
}

/// Default for [`SymmetrizeOptions::level_cap`]; `exp(-20)` is far below any
/// tolerance used on integrals.
pub const DEFAULT_LEVEL_CAP: f64 = 20.0;

impl Default for SymmetrizeOptions {
    fn default() -> Self {
        SymmetrizeOptions {
            interp: Interp::CubicEdge,
            refine: 8,
            repair: RepairTol { max_gap: usize::MAX, ..RepairTol::default() },
            level_cap: Some(DEFAULT_LEVEL_CAP),
        }
    }
}

pub fn steiner_symmetrize(f: &GridFn, u: &Direction) -> Result<GridFn> {
    steiner_symmetrize_with(f, u, &SymmetrizeOptions::default())
}

/// Symmetrizes every line parallel to `u` and resamples onto the same grid.
///
/// Lines are laid out on a regular grid of `u⊥` with the finer axis spacing.
/// Each node takes the value of the symmetrized lines on either side of it,
/// interpolated across lines with the same rule as [`Interp::CubicEdge`].
pub fn steiner_symmetrize_with(f: &GridFn, u: &Direction, opts: &SymmetrizeOptions) -> Result<GridFn> {
    if u.dim() != f.dim() {
        return Err(Error::Argument(format!(
            "direction is {}-D but the grid is {}-D",
            u.dim(),
            f.dim()
        )));
    }
    if opts.refine == 0 {
        return Err(Error::Argument("refine must be at least 1".into()));
    }
    let spec = f.spec();
    let h = spec.spacing.iter().copied().fold(f64::INFINITY, f64::min);
    let uu = u.planar();
    let vv = u.perp();
    let corners = spec.corners();
    let reach = |w: [f64; 2]| corners.iter().map(|c| (c[0] * w[0] + c[1] * w[1]).abs()).fold(0.0, f64::max);
    let tgrid = TGrid::symmetric(reach(uu), h / opts.refine as f64);
    let d = f.dim();
    // The effective domain is convex, so gaps in a section are staircase
    // artifacts of the rasterized domain edge and are bridged.
    let repair = RepairTol { max_gap: usize::MAX, ..opts.repair };

    let cut = opts.level_cap.map_or(f64::INFINITY, |c| f.min_value() + c);
    // Values near the cut border the rasterized edge of the region; only the
    // lower half of the levels is held to the convexity check.
    let repair = match opts.level_cap {
        Some(c) => RepairTol {
            ceiling: repair.ceiling.min(f.min_value() + 0.5 * c),
            scale: repair.scale.max(c),
            ..repair
        },
        None => repair,
    };
    let symmetrize_line = |x0: [f64; 2]| -> Result<Option<PlConvex1D>> {
        let mut sec = sample_line(f, &uu[..d], &x0[..d], tgrid, opts.interp);
        for v in sec.values.iter_mut() {
            if *v > cut {
                *v = f64::INFINITY;
            }
        }
        match sec.fit(repair)? {
            Some(pl) => Ok(Some(pl.symmetrize()?)),
            None => Ok(None),
        }
    };

    if d == 1 {
        let line = symmetrize_line([0.0, 0.0])?;
        let values = (0..spec.len())
            .map(|k| line.as_ref().map_or(f64::INFINITY, |s| eval_even(s, spec.point(k)[0], h)))
            .collect();
        return GridFn::from_values(spec.clone(), values);
    }

    let half = (reach(vv) / h).ceil() as usize + 2;
    let lines: Vec<Option<PlConvex1D>> = (0..=2 * half)
        .into_par_iter()
        .map(|k| {
            let s = (k as f64 - half as f64) * h;
            symmetrize_line([s * vv[0], s * vv[1]])
        })
        .collect::<Result<_>>()?;

    let at = |k: isize, t: f64| -> f64 {
        if k < 0 || k as usize >= lines.len() {
            return f64::INFINITY;
        }
        lines[k as usize].as_ref().map_or(f64::INFINITY, |s| eval_even(s, t, h))
    };
    let values = (0..spec.len())
        .into_par_iter()
        .map(|n| {
            let p = spec.point(n);
            let s = p[0] * vv[0] + p[1] * vv[1];
            let t = p[0] * uu[0] + p[1] * uu[1];
            let sigma = s / h + half as f64;
            let k0 = sigma.floor();
            let fr = sigma - k0;
            let k0 = k0 as isize;
            interp4([at(k0 - 1, t), at(k0, t), at(k0 + 1, t), at(k0 + 2, t)], fr, true)
        })
        .collect();
    GridFn::from_values(spec.clone(), values)
}

/// Evaluates an even symmetrized section, treating a node that misses the
/// domain end by rounding only as lying on it.
fn eval_even(s: &PlConvex1D, t: f64, h: f64) -> f64 {
    let hi = s.domain().1;
    let t = t.abs();
    if t > hi && t <= hi + 1e-9 * h {
        s.eval(hi)
    } else {
        s.eval(t)
    }
}
