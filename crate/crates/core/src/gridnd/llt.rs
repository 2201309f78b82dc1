//! Discrete Legendre transform in linear time per axis.
//!
//! `sup_{x,y} (p x + q y - f(x, y)) = sup_x (p x + sup_y (q y - f(x, y)))`, so
//! the 2-D conjugate is two passes of the 1-D one. Each 1-D pass takes the
//! lower convex hull of the samples and sweeps the sorted dual points along
//! the hull slopes.

use rayon::prelude::*;

use super::{GridFn, GridSpec};
use crate::error::{Error, Result};

/// `max_i (p x_i - v_i)` for every `p`, skipping `+inf` samples.
///
/// `xs` must be increasing. Returns `-inf` everywhere when no sample is
/// finite.
pub fn conjugate_1d(xs: &[f64], vs: &[f64], ps: &[f64]) -> Vec<f64> {
    let mut hx: Vec<f64> = Vec::with_capacity(xs.len());
    let mut hv: Vec<f64> = Vec::with_capacity(xs.len());
    for (&x, &v) in xs.iter().zip(vs) {
        if !v.is_finite() {
            continue;
        }
        while hx.len() >= 2 {
            let n = hx.len();
            let cross = (hx[n - 1] - hx[n - 2]) * (v - hv[n - 2]) - (hv[n - 1] - hv[n - 2]) * (x - hx[n - 2]);
            if cross <= 0.0 {
                hx.pop();
                hv.pop();
            } else {
                break;
            }
        }
        hx.push(x);
        hv.push(v);
    }
    if hx.is_empty() {
        return vec![f64::NEG_INFINITY; ps.len()];
    }
    let mut order: Vec<usize> = (0..ps.len()).collect();
    if ps.windows(2).any(|w| w[0] > w[1]) {
        order.sort_by(|&a, &b| ps[a].total_cmp(&ps[b]));
    }
    let mut out = vec![0.0; ps.len()];
    let mut k = 0;
    for &i in &order {
        let p = ps[i];
        while k + 1 < hx.len() && hv[k + 1] - hv[k] <= p * (hx[k + 1] - hx[k]) {
            k += 1;
        }
        out[i] = p * hx[k] - hv[k];
    }
    out
}

fn axis(spec: &GridSpec, a: usize) -> Vec<f64> {
    (0..spec.shape[a]).map(|i| spec.coord(a, i)).collect()
}

/// Discrete conjugate of the grid samples, evaluated on `dual`.
pub fn llt_legendre(f: &GridFn, dual: &GridSpec) -> Result<GridFn> {
    if dual.dim() != f.dim() {
        return Err(Error::Argument("dual grid dimension differs from the primal".into()));
    }
    if f.finite_count() == 0 {
        return Err(Error::EmptyDomain);
    }
    let spec = f.spec();
    if f.dim() == 1 {
        let vals = conjugate_1d(&axis(spec, 0), f.values(), &axis(dual, 0));
        return GridFn::from_values(dual.clone(), vals);
    }
    let (xs, ys) = (axis(spec, 0), axis(spec, 1));
    let (ps, qs) = (axis(dual, 0), axis(dual, 1));
    let ny = ys.len();
    // inner[i][m] = -sup_y (q_m y - f(x_i, y))
    let inner: Vec<Vec<f64>> = (0..xs.len())
        .into_par_iter()
        .map(|i| {
            conjugate_1d(&ys, &f.values()[i * ny..(i + 1) * ny], &qs)
                .into_iter()
                .map(|g| if g == f64::NEG_INFINITY { f64::INFINITY } else { -g })
                .collect()
        })
        .collect();
    let cols: Vec<Vec<f64>> = (0..qs.len())
        .into_par_iter()
        .map(|m| {
            let h: Vec<f64> = inner.iter().map(|row| row[m]).collect();
            conjugate_1d(&xs, &h, &ps)
        })
        .collect();
    let nq = qs.len();
    let mut vals = vec![0.0; ps.len() * nq];
    for (m, col) in cols.iter().enumerate() {
        for (i, v) in col.iter().enumerate() {
            vals[i * nq + m] = *v;
        }
    }
    GridFn::from_values(dual.clone(), vals)
}
