//! Curve CSV and domain manifest files.
//!
//! The CSV carries a header `t,x1,...,xn` and uniformly spaced rows; the
//! optional JSON manifest records the domain (interval or circle) and sample
//! metadata. Floats are written in shortest round-trip form so a read-back
//! reproduces the samples bit for bit.

use super::curve::ParamCurve;
use super::domain::{Domain, DomainKind};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::io::{BufRead, BufWriter, Write};
use std::path::Path;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurveMeta {
    pub domain: Domain,
    pub dim: usize,
    pub n_samples: usize,
    pub degree: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

impl CurveMeta {
    pub fn of(curve: &ParamCurve, name: Option<String>) -> Self {
        Self {
            domain: *curve.domain(),
            dim: curve.dim(),
            n_samples: curve.n_samples(),
            degree: curve.degree(),
            name,
        }
    }
}

pub fn write_curve_csv(path: &Path, curve: &ParamCurve) -> Result<()> {
    let file = std::fs::File::create(path)?;
    let mut w = BufWriter::new(file);
    let dim = curve.dim();
    let header: Vec<String> = std::iter::once("t".to_string())
        .chain((1..=dim).map(|i| format!("x{i}")))
        .collect();
    writeln!(w, "{}", header.join(","))?;
    for (i, t) in curve.params().into_iter().enumerate() {
        let row = curve.sample(i);
        write!(w, "{t}")?;
        for v in row {
            write!(w, ",{v}")?;
        }
        writeln!(w)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_meta(path: &Path, meta: &CurveMeta) -> Result<()> {
    let json = serde_json::to_string_pretty(meta).expect("meta serialization");
    std::fs::write(path, json)?;
    Ok(())
}

pub fn read_meta(path: &Path) -> Result<CurveMeta> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Parse {
        line: e.line(),
        message: format!("manifest {}: {e}", path.display()),
    })
}

/// Raw CSV contents before domain interpretation.
#[derive(Debug)]
pub struct RawCurve {
    pub ts: Vec<f64>,
    pub samples: Vec<f64>,
    pub dim: usize,
}

pub fn read_curve_csv(path: &Path) -> Result<RawCurve> {
    let file = std::fs::File::open(path)?;
    let reader = std::io::BufReader::new(file);
    let mut lines = reader.lines().enumerate();
    let (_, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        message: "empty file".into(),
    })?;
    let header = header?;
    let cols: Vec<&str> = header.trim().split(',').collect();
    if cols.first() != Some(&"t") || cols.len() < 2 {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header t,x1,...,xn; got {header:?}"),
        });
    }
    for (i, c) in cols.iter().enumerate().skip(1) {
        if *c != format!("x{i}") {
            return Err(Error::Parse {
                line: 1,
                message: format!("expected column x{i}, got {c:?}"),
            });
        }
    }
    let dim = cols.len() - 1;
    let mut ts = Vec::new();
    let mut samples = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.trim().split(',').collect();
        if fields.len() != dim + 1 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected {} fields, got {}", dim + 1, fields.len()),
            });
        }
        let mut parsed = fields.iter().map(|f| {
            f.parse::<f64>().map_err(|e| Error::Parse {
                line: line_no,
                message: format!("bad float {f:?}: {e}"),
            })
        });
        ts.push(parsed.next().unwrap()?);
        for v in parsed {
            samples.push(v?);
        }
    }
    if ts.len() < 2 {
        return Err(Error::Parse {
            line: ts.len() + 1,
            message: "need at least two samples".into(),
        });
    }
    Ok(RawCurve { ts, samples, dim })
}

impl RawCurve {
    /// Check uniform spacing and infer the domain. With a manifest the
    /// declared domain wins (and is validated); otherwise the parameters are
    /// read as an inclusive interval.
    pub fn into_curve(self, meta: Option<&CurveMeta>, degree: usize) -> Result<ParamCurve> {
        let n = self.ts.len();
        let (domain, expect_step) = match meta {
            Some(m) => {
                if m.dim != self.dim {
                    return Err(Error::DomainMismatch(format!(
                        "manifest dim {} but CSV dim {}",
                        m.dim, self.dim
                    )));
                }
                (m.domain, m.domain.step(n))
            }
            None => {
                let d = Domain::interval(self.ts[0], self.ts[n - 1]);
                (d, d.step(n))
            }
        };
        let t0 = match domain.kind {
            DomainKind::Interval => domain.a,
            DomainKind::Circle => domain.a,
        };
        for (i, &t) in self.ts.iter().enumerate() {
            let expect = t0 + expect_step * i as f64;
            if (t - expect).abs() > 1e-8 * domain.len().max(1.0) {
                return Err(Error::Parse {
                    line: i + 2,
                    message: format!("non-uniform parameter: t = {t}, expected {expect}"),
                });
            }
        }
        ParamCurve::from_samples(domain, self.samples, self.dim, degree)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip_is_bitwise() {
        let dir = std::env::temp_dir().join("prescurv_io_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("c.csv");
        let curve = ParamCurve::from_fn(Domain::circle(0.0, 2.0), 64, 3, 5, |t, out| {
            out[0] = (std::f64::consts::PI * t).cos();
            out[1] = (std::f64::consts::PI * t).sin();
            out[2] = 0.1 * t;
        })
        .unwrap();
        write_curve_csv(&path, &curve).unwrap();
        let raw = read_curve_csv(&path).unwrap();
        assert_eq!(raw.dim, 3);
        assert_eq!(raw.samples, curve.samples());
        let meta = CurveMeta::of(&curve, None);
        let back = raw.into_curve(Some(&meta), 5).unwrap();
        assert_eq!(back.samples(), curve.samples());
        assert!(back.domain().is_circle());
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let dir = std::env::temp_dir().join("prescurv_io_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bad.csv");
        std::fs::write(&path, "t,x1,x2,x3\n0,1,2,3\n0.5,oops,2,3\n").unwrap();
        match read_curve_csv(&path) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
        std::fs::write(&path, "a,b\n0,1\n").unwrap();
        assert!(matches!(
            read_curve_csv(&path),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn meta_round_trip() {
        let dir = std::env::temp_dir().join("prescurv_io_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("c.meta.json");
        let meta = CurveMeta {
            domain: Domain::circle(0.0, 6.0),
            dim: 3,
            n_samples: 128,
            degree: 5,
            name: Some("circle".into()),
        };
        write_meta(&path, &meta).unwrap();
        let back = read_meta(&path).unwrap();
        assert_eq!(back.dim, 3);
        assert!(back.domain.is_circle());
        assert_eq!(back.name.as_deref(), Some("circle"));
    }
}
