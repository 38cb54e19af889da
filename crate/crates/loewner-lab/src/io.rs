//! Driving-function and curve files.
//!
//! Driving functions are CSV with header `t,w`. Curves are CSV with header `re,im`, with an
//! optional JSON sidecar next to the file (same stem, `.json`) holding
//! `{param, closed, root, ambient}`.

use crate::curve::{Ambient, CurveSamples, Param, Root};
use crate::driving::DrivingFunction;
use crate::error::{Error, Result};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CurveMeta {
    pub param: Param,
    pub closed: bool,
    #[serde(default)]
    pub root: Option<Root>,
    #[serde(default = "default_ambient")]
    pub ambient: Ambient,
}

fn default_ambient() -> Ambient {
    Ambient::Plane
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("json")
}

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { path: path.display().to_string(), line, msg: msg.into() }
}

/// Reads two named float columns, reporting 1-based line numbers on failure.
fn read_pairs(path: &Path, cols: [&str; 2]) -> Result<Vec<(f64, f64)>> {
    let text = std::fs::read_to_string(path)?;
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = rdr.headers().map_err(|e| parse_err(path, 1, e.to_string()))?.clone();
    let idx = |name: &str| {
        headers.iter().position(|h| h == name).ok_or_else(|| parse_err(path, 1, format!("missing column `{name}`")))
    };
    let (i0, i1) = (idx(cols[0])?, idx(cols[1])?);
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            parse_err(path, line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let field = |i: usize, name: &str| -> Result<f64> {
            let s = rec.get(i).unwrap_or("");
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| parse_err(path, line, format!("`{name}` is not a finite number: `{s}`")))
        };
        out.push((field(i0, cols[0])?, field(i1, cols[1])?));
    }
    if out.is_empty() {
        return Err(parse_err(path, 1, "no data rows"));
    }
    Ok(out)
}

pub fn read_driving(path: &Path) -> Result<DrivingFunction> {
    let rows = read_pairs(path, ["t", "w"])?;
    for (k, w) in rows.windows(2).enumerate() {
        if !(w[1].0 > w[0].0) {
            return Err(parse_err(path, k + 3, "t must be strictly increasing"));
        }
    }
    let (t, w) = rows.into_iter().unzip();
    DrivingFunction::new(t, w).map_err(|e| parse_err(path, 0, e.to_string()))
}

pub fn driving_csv(w: &DrivingFunction) -> String {
    pairs_csv(["t", "w"], w.times().iter().copied().zip(w.values().iter().copied()))
}

pub fn write_driving(path: &Path, w: &DrivingFunction) -> Result<()> {
    std::fs::write(path, driving_csv(w))?;
    Ok(())
}

fn pairs_csv(header: [&str; 2], rows: impl Iterator<Item = (f64, f64)>) -> String {
    let mut wr = csv::Writer::from_writer(Vec::new());
    wr.write_record(header).expect("in-memory write");
    for (a, b) in rows {
        wr.write_record([a.to_string(), b.to_string()]).expect("in-memory write");
    }
    String::from_utf8(wr.into_inner().expect("in-memory write")).expect("ascii")
}

/// Reads a curve; without a sidecar it is an open arc in the plane.
pub fn read_curve(path: &Path) -> Result<CurveSamples> {
    let points: Vec<C64> = read_pairs(path, ["re", "im"])?.into_iter().map(|(a, b)| C64::new(a, b)).collect();
    let side = sidecar_path(path);
    let meta = if side.exists() {
        let text = std::fs::read_to_string(&side)?;
        serde_json::from_str::<CurveMeta>(&text).map_err(|e| parse_err(&side, e.line(), e.to_string()))?
    } else {
        CurveMeta { param: Param::Unspecified, closed: false, root: None, ambient: Ambient::Plane }
    };
    Ok(CurveSamples { points, param: meta.param, root: meta.root, closed: meta.closed, ambient: meta.ambient, times: None })
}

pub fn curve_csv(curve: &CurveSamples) -> String {
    pairs_csv(["re", "im"], curve.points.iter().map(|z| (z.re, z.im)))
}

pub fn write_curve(path: &Path, curve: &CurveSamples) -> Result<()> {
    std::fs::write(path, curve_csv(curve))?;
    let meta = CurveMeta { param: curve.param, closed: curve.closed, root: curve.root, ambient: curve.ambient };
    std::fs::write(sidecar_path(path), serde_json::to_string_pretty(&meta).expect("plain data") + "\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn driving_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("w.csv");
        let w = DrivingFunction::sample(|t| (3.0 * t).sin() / 7.0, 1.0, 17).unwrap();
        write_driving(&p, &w).unwrap();
        let back = read_driving(&p).unwrap();
        assert_eq!(back.times(), w.times());
        assert_eq!(back.values(), w.values());
    }

    #[test]
    fn curve_roundtrip_with_sidecar() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.csv");
        let mut c = CurveSamples::circle(C64::new(0.1, 0.2), 1.0 / 3.0, 12);
        c.root = Some(Root::point(c.points[0]));
        write_curve(&p, &c).unwrap();
        let back = read_curve(&p).unwrap();
        assert_eq!(back.points, c.points);
        assert_eq!(back.root, c.root);
        assert!(back.closed);
    }

    #[test]
    fn bad_row_reports_line() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("w.csv");
        std::fs::write(&p, "t,w\n0,0\n0.5,oops\n1,1\n").unwrap();
        match read_driving(&p) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        std::fs::write(&p, "t,w\n0,0\n0.5,1\n0.5,1\n").unwrap();
        assert!(matches!(read_driving(&p), Err(Error::Parse { line: 4, .. })));
    }
}
