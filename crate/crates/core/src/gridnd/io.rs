//! Binary tensor + JSON sidecar storage and CSV slices.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{GridFn, GridSpec};
use crate::error::{Error, Result};

/// Stored in place of `+inf` in the binary tensor.
pub const INFINITY_SENTINEL: f64 = f64::MAX;

#[derive(Debug, Serialize, Deserialize)]
struct Sidecar {
    origin: Vec<f64>,
    spacing: Vec<f64>,
    shape: Vec<usize>,
    dtype: String,
    order: String,
    infinity_sentinel: f64,
}

fn with_ext(stem: &Path, ext: &str) -> PathBuf {
    let mut s = stem.as_os_str().to_owned();
    s.push(ext);
    PathBuf::from(s)
}

impl GridFn {
    /// Writes `<stem>.bin` (little-endian f64, row-major) and `<stem>.json`.
    pub fn save(&self, stem: &Path) -> Result<()> {
        let mut bytes = Vec::with_capacity(8 * self.values().len());
        for &v in self.values() {
            let v = if v.is_infinite() { INFINITY_SENTINEL } else { v };
            bytes.extend_from_slice(&v.to_le_bytes());
        }
        fs::write(with_ext(stem, ".bin"), bytes)?;
        let spec = self.spec();
        let side = Sidecar {
            origin: spec.origin.clone(),
            spacing: spec.spacing.clone(),
            shape: spec.shape.clone(),
            dtype: "f64-le".into(),
            order: "row-major".into(),
            infinity_sentinel: INFINITY_SENTINEL,
        };
        fs::write(with_ext(stem, ".json"), serde_json::to_string_pretty(&side)?)?;
        Ok(())
    }

    pub fn load(stem: &Path) -> Result<GridFn> {
        let side: Sidecar = serde_json::from_str(&fs::read_to_string(with_ext(stem, ".json"))?)?;
        if side.dtype != "f64-le" || side.order != "row-major" {
            return Err(Error::Malformed(format!("unsupported layout {} / {}", side.dtype, side.order)));
        }
        let spec = GridSpec::new(side.origin, side.spacing, side.shape)?;
        let bytes = fs::read(with_ext(stem, ".bin"))?;
        if bytes.len() != 8 * spec.len() {
            return Err(Error::Malformed(format!(
                "tensor has {} bytes, expected {}",
                bytes.len(),
                8 * spec.len()
            )));
        }
        let values = bytes
            .chunks_exact(8)
            .map(|c| {
                let v = f64::from_le_bytes(c.try_into().unwrap());
                if v == side.infinity_sentinel { f64::INFINITY } else { v }
            })
            .collect();
        GridFn::from_values(spec, values)
    }

    /// CSV `coord,value` of the grid line along `axis` through index `at` on
    /// the other axis (ignored in 1-D).
    pub fn slice_csv<W: Write>(&self, axis: usize, at: usize, mut w: W) -> Result<()> {
        let spec = self.spec();
        if axis >= spec.dim() || (spec.dim() == 2 && at >= spec.shape[1 - axis]) {
            return Err(Error::Argument(format!("no slice along axis {axis} at index {at}")));
        }
        writeln!(w, "coord,value")?;
        for i in 0..spec.shape[axis] {
            let v = match (spec.dim(), axis) {
                (1, _) => self.values()[i],
                (_, 0) => self.get(i, at),
                _ => self.get(at, i),
            };
            writeln!(w, "{:.16e},{}", spec.coord(axis, i), fmt_value(v))?;
        }
        Ok(())
    }
}

/// 17 significant digits; `inf` for `+inf`.
pub fn fmt_value(v: f64) -> String {
    if v.is_infinite() {
        "inf".into()
    } else {
        format!("{v:.16e}")
    }
}
