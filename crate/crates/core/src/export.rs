//! Grid CSV export and atomic file writes.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use crate::arbprec::{BigComplex, BigReal};
use crate::error::{Error, Result};
use crate::geometry::Domain;

/// Digits written for field values.
pub const FIELD_DIGITS: usize = 20;

/// Grid nodes `2ω1 s + 2ω2 t`, `s, t ∈ [−1/2, 1/2]` evenly spaced, row-major
/// in `t` then `s`.
pub fn grid_points(domain: &Domain, grid_n: usize) -> Result<Vec<BigComplex>> {
    if grid_n < 2 {
        return Err(Error::Domain(format!("grid_n must be at least 2, got {grid_n}")));
    }
    let l = domain.lattice();
    let ctx = l.ctx();
    let a = l.omega1.mul_2exp(1);
    let b = l.omega2.mul_2exp(1);
    let half = ctx.ratio(1, 2);
    let step = ctx.ratio(1, grid_n as i64 - 1);
    let coord = |i: usize| &(&step * i as i32) - &half;
    let mut out = Vec::with_capacity(grid_n * grid_n);
    for j in 0..grid_n {
        let t = coord(j);
        for i in 0..grid_n {
            let s = coord(i);
            out.push(&a.scale(&s) + &b.scale(&t));
        }
    }
    Ok(out)
}

/// CSV with header `x,y,u`; points outside Ω get `nan`.
pub fn field_csv<F>(domain: &Domain, grid_n: usize, mut u: F) -> Result<String>
where
    F: FnMut(&BigComplex) -> Result<BigReal>,
{
    let mut out = String::from("x,y,u\n");
    for z in grid_points(domain, grid_n)? {
        let val = if domain.contains(&z) {
            u(&z)?.to_decimal_digits(FIELD_DIGITS)
        } else {
            "nan".to_string()
        };
        let (x, y) = z.to_f64_pair();
        writeln!(out, "{x:.17e},{y:.17e},{val}").expect("writing to a String");
    }
    Ok(out)
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}
