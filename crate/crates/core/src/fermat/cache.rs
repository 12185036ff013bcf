//! Append-only JSON-lines cache of sequence rows.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rug::Integer;

use super::{check_infinite_order, step_direct, FermatState, GenerateOptions};
use crate::arith::decimal_digits_estimate;
use crate::curve::{Curve, QPoint};
use crate::error::{Error, Result};

/// Handle on a cache file for one curve and base point.
#[derive(Debug, Clone)]
pub struct SequenceCache {
    path: PathBuf,
}

impl SequenceCache {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        SequenceCache { path: path.into() }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn load(&self, curve: &Curve, p: &QPoint) -> Result<Vec<FermatState>> {
        load_cache(&self.path, curve, p)
    }

    fn append(&self, rows: &[FermatState]) -> Result<()> {
        let file = OpenOptions::new().create(true).append(true).open(&self.path)?;
        let mut w = BufWriter::new(file);
        for row in rows {
            serde_json::to_writer(&mut w, row)?;
            w.write_all(b"\n")?;
        }
        w.flush()?;
        Ok(())
    }
}

fn check_row(
    curve: &Curve,
    prev: Option<&FermatState>,
    row: &FermatState,
    p: &QPoint,
) -> std::result::Result<(), String> {
    match prev {
        None => {
            if row.k != 0 || row.point() != *p || row.f != row.e || row.tau.is_some() {
                return Err("first row is not the base point".into());
            }
        }
        Some(prev) => {
            if row.k != prev.k + 1 {
                return Err(format!("expected k = {}", prev.k + 1));
            }
            if Integer::from(&prev.e * &row.f) != row.e {
                return Err("e_k != e_(k-1) F_k".into());
            }
            match &row.tau {
                Some(t) if Integer::from(t * &row.f) == Integer::from(&prev.n * 2u32) => {}
                _ => return Err("tau_k F_k != 2 n_(k-1)".into()),
            }
        }
    }
    if row.e <= 0 || Integer::from(row.m.gcd_ref(&row.e)) != 1 || Integer::from(row.n.gcd_ref(&row.e)) != 1 {
        return Err("(m, n, e) not in lowest terms".into());
    }
    if !curve.contains(&row.point()) {
        return Err("row is not on the curve".into());
    }
    Ok(())
}

/// Read and revalidate every row; a missing file is an empty cache.
pub fn load_cache(path: &Path, curve: &Curve, p: &QPoint) -> Result<Vec<FermatState>> {
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(e.into()),
    };
    let mut rows: Vec<FermatState> = Vec::new();
    for (lineno, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let row: FermatState =
            serde_json::from_str(&line).map_err(|e| Error::Cache(format!("{}:{}: {e}", path.display(), lineno + 1)))?;
        check_row(curve, rows.last(), &row, p)
            .map_err(|e| Error::Cache(format!("{}:{}: {e}", path.display(), lineno + 1)))?;
        rows.push(row);
    }
    Ok(rows)
}

/// Replace the file with exactly these rows.
pub fn write_cache(path: &Path, rows: &[FermatState]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for row in rows {
        serde_json::to_writer(&mut w, row)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

/// Rows 0..=k_max, resuming from and appending to the cache. Each new row is
/// written before the next is computed, so a budget error leaves every
/// completed row on disk.
pub fn generate_cached(
    curve: &Curve,
    p: &QPoint,
    k_max: u32,
    opts: &GenerateOptions,
    cache: &SequenceCache,
) -> Result<Vec<FermatState>> {
    check_infinite_order(curve, p, opts.torsion_bound)?;
    let mut rows = cache.load(curve, p)?;
    if rows.is_empty() {
        let first = FermatState::initial(p)?;
        cache.append(std::slice::from_ref(&first))?;
        rows.push(first);
    }
    while rows.last().unwrap().k < k_max {
        let next = step_direct(curve, rows.last().unwrap())?;
        if decimal_digits_estimate(&next.e) > opts.digit_budget {
            return Err(Error::DigitBudget {
                k: next.k,
                budget: opts.digit_budget,
                partial: Box::new(rows),
            });
        }
        cache.append(std::slice::from_ref(&next))?;
        rows.push(next);
    }
    rows.truncate(k_max as usize + 1);
    Ok(rows)
}
