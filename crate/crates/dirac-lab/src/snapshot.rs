//! Cochain snapshot files.
//!
//! Format: one header line `degree K grid p|d cells N`, then `N` lines
//! `index value` in ascending index order, values in decimal text with 17
//! significant digits. Writing is byte-reproducible; parsing is strict and
//! never panics on malformed input.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::forms::{Cochain, Staggering};
use crate::mesh::Mesh;

/// Serialize a cochain in the snapshot text format.
pub fn write_snapshot(c: &Cochain) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "degree {} grid {} cells {}\n",
        c.degree,
        c.grid.tag(),
        c.values.len()
    ));
    for (i, v) in c.values.iter().enumerate() {
        out.push_str(&format!("{} {:.16e}\n", i, v));
    }
    out
}

/// Parsed snapshot payload, not yet attached to a mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub degree: usize,
    pub grid: Staggering,
    pub values: Vec<f64>,
}

/// Parse the snapshot text format. Strict: exact header shape, ascending
/// contiguous indices, finite values, no trailing garbage.
pub fn parse_snapshot(text: &str) -> Result<Snapshot> {
    let err = |msg: &str| Error::Snapshot(msg.to_string());
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| err("empty input"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 6 || fields[0] != "degree" || fields[2] != "grid" || fields[4] != "cells" {
        return Err(err("malformed header"));
    }
    let degree: usize = fields[1].parse().map_err(|_| err("bad degree"))?;
    let grid = match fields[3] {
        "p" => Staggering::Primal,
        "d" => Staggering::Dual,
        _ => return Err(err("grid must be p or d")),
    };
    let count: usize = fields[5].parse().map_err(|_| err("bad cell count"))?;
    if count > 1 << 28 {
        return Err(err("cell count out of range"));
    }
    let mut values = Vec::with_capacity(count.min(1 << 20));
    for (expected, line) in lines.by_ref().take(count).enumerate() {
        let mut parts = line.split_whitespace();
        let idx: usize = parts
            .next()
            .ok_or_else(|| err("missing index"))?
            .parse()
            .map_err(|_| err("bad index"))?;
        if idx != expected {
            return Err(err("indices must be ascending from 0"));
        }
        let value: f64 = parts
            .next()
            .ok_or_else(|| err("missing value"))?
            .parse()
            .map_err(|_| err("bad value"))?;
        if !value.is_finite() {
            return Err(err("non-finite value"));
        }
        if parts.next().is_some() {
            return Err(err("trailing fields on value line"));
        }
        values.push(value);
    }
    if values.len() != count {
        return Err(err("fewer value lines than header count"));
    }
    if lines.any(|l| !l.trim().is_empty()) {
        return Err(err("trailing garbage after values"));
    }
    Ok(Snapshot {
        degree,
        grid,
        values,
    })
}

/// Attach a parsed snapshot to a mesh, validating degree and value count.
pub fn cochain_from_snapshot(mesh: &Arc<Mesh>, snap: Snapshot) -> Result<Cochain> {
    Cochain::from_values(mesh, snap.degree, snap.grid, snap.values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::sample_cochain;

    #[test]
    fn roundtrip() {
        let mesh = Mesh::new(2, &[3, 2], &[1.0, 2.0]).unwrap();
        let c = sample_cochain(&mesh, 1, Staggering::Dual, |x, s| x[0] + s.len() as f64).unwrap();
        let text = write_snapshot(&c);
        assert!(text.starts_with("degree 1 grid d cells "));
        let snap = parse_snapshot(&text).unwrap();
        let back = cochain_from_snapshot(&mesh, snap).unwrap();
        assert_eq!(back.values, c.values);
        assert_eq!(back.degree, 1);
        assert_eq!(back.grid, Staggering::Dual);
    }

    #[test]
    fn writing_is_deterministic() {
        let mesh = Mesh::new(1, &[4], &[1.0]).unwrap();
        let c = sample_cochain(&mesh, 0, Staggering::Primal, |x, _| (x[0] * 7.3).sin()).unwrap();
        assert_eq!(write_snapshot(&c), write_snapshot(&c));
    }

    #[test]
    fn rejects_malformed() {
        for bad in [
            "",
            "degree x grid p cells 2\n0 1\n1 2\n",
            "degree 1 grid q cells 1\n0 1\n",
            "degree 1 grid p cells 2\n0 1\n",
            "degree 1 grid p cells 1\n1 1\n",
            "degree 1 grid p cells 1\n0 nan\n",
            "degree 1 grid p cells 1\n0 1 extra\n",
            "degree 1 grid p cells 1\n0 1\ngarbage\n",
        ] {
            assert!(parse_snapshot(bad).is_err(), "should reject {bad:?}");
        }
    }

    #[test]
    fn count_must_match_mesh() {
        let mesh = Mesh::new(1, &[4], &[1.0]).unwrap();
        let snap = Snapshot {
            degree: 1,
            grid: Staggering::Primal,
            values: vec![0.0; 3],
        };
        assert!(cochain_from_snapshot(&mesh, snap).is_err());
    }
}
