//! CSV export of MAC fields and refinement tables.
//!
//! Numbers are written in shortest round-trip form, so reading a file back
//! reproduces the stored values bit for bit.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stokes::fields::{PressureField, VelocityField};
use crate::stokes::norms::ErrorNorms;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldKind {
    U,
    V,
    P,
}

/// One row of a field file.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldRecord {
    pub kind: FieldKind,
    pub i: usize,
    pub j: usize,
    pub x: f64,
    pub y: f64,
    pub value: f64,
}

/// One refinement level. Orders are empty on the coarsest row.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub h: f64,
    pub l2_u: f64,
    pub l2_p: f64,
    pub linf_u: f64,
    pub order_u: Option<f64>,
    pub order_p: Option<f64>,
}

impl ConvergenceRow {
    /// Builds a table from `(n, norms)` levels, coarsest first.
    pub fn table(levels: &[(usize, ErrorNorms)]) -> Vec<ConvergenceRow> {
        let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(levels.len());
        for &(n, e) in levels {
            let h = 1.0 / n as f64;
            let (order_u, order_p) = match rows.last() {
                Some(prev) => (
                    Some(crate::stokes::observed_order(prev.l2_u, e.l2_u, prev.h, h)),
                    Some(crate::stokes::observed_order(prev.l2_p, e.l2_p, prev.h, h)),
                ),
                None => (None, None),
            };
            rows.push(ConvergenceRow {
                n,
                h,
                l2_u: e.l2_u,
                l2_p: e.l2_p,
                linf_u: e.linf_u,
                order_u,
                order_p,
            });
        }
        rows
    }
}

/// Rows for every interior u-face, then v-faces, then cells.
pub fn field_records(velocity: &VelocityField, pressure: &PressureField) -> Vec<FieldRecord> {
    let grid = velocity.grid();
    let u = velocity.as_slice();
    let mut out = Vec::with_capacity(grid.num_velocity() + grid.num_pressure());
    for (i, j) in grid.u_faces() {
        let (x, y) = grid.u_position(i, j);
        let value = u[grid.u_index(i, j)];
        out.push(FieldRecord {
            kind: FieldKind::U,
            i,
            j,
            x,
            y,
            value,
        });
    }
    for (i, j) in grid.v_faces() {
        let (x, y) = grid.v_position(i, j);
        let value = u[grid.v_index(i, j)];
        out.push(FieldRecord {
            kind: FieldKind::V,
            i,
            j,
            x,
            y,
            value,
        });
    }
    for (i, j) in grid.cells() {
        let (x, y) = grid.p_position(i, j);
        let value = pressure.at(i, j);
        out.push(FieldRecord {
            kind: FieldKind::P,
            i,
            j,
            x,
            y,
            value,
        });
    }
    out
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
    let message = e.to_string();
    match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::io(path, source),
        _ => Error::Parse {
            path: path.to_path_buf(),
            line,
            message,
        },
    }
}

/// Serializes rows (with header) to a CSV string.
pub fn to_csv<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)
            .map_err(|e| csv_error(Path::new("<memory>"), e))?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::InvalidArgument(format!("csv flush: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn parse_csv<T: for<'de> Deserialize<'de>>(text: &str, path: &Path) -> Result<Vec<T>> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .map(|r| r.map_err(|e| csv_error(path, e)))
        .collect()
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let text = to_csv(rows)?;
    File::create(path)
        .and_then(|mut f| f.write_all(text.as_bytes()))
        .map_err(|e| Error::io(path, e))
}

pub fn read_csv<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let mut text = String::new();
    File::open(path)
        .and_then(|mut f| f.read_to_string(&mut text))
        .map_err(|e| Error::io(path, e))?;
    parse_csv(&text, path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stokes::{manufactured_case, CaseId, MacGrid};

    #[test]
    fn field_rows_round_trip() {
        let g = MacGrid::new(3).unwrap();
        let c = manufactured_case(CaseId::TaylorGreen);
        let u = VelocityField::sample(g, c.u, c.v);
        let p = PressureField::sample(g, c.p);
        let rows = field_records(&u, &p);
        assert_eq!(rows.len(), g.num_velocity() + g.num_pressure());
        let text = to_csv(&rows).unwrap();
        assert!(text.starts_with("kind,i,j,x,y,value\n"));
        let back: Vec<FieldRecord> = parse_csv(&text, Path::new("t.csv")).unwrap();
        assert_eq!(back, rows);
    }

    #[test]
    fn convergence_table_orders() {
        let e = |s: f64| ErrorNorms {
            l2_u: s,
            l2_p: 2.0 * s,
            linf_u: s,
        };
        let rows = ConvergenceRow::table(&[(8, e(16.0)), (16, e(4.0))]);
        assert_eq!(rows[0].order_u, None);
        assert!((rows[1].order_u.unwrap() - 2.0).abs() < 1e-14);
        let text = to_csv(&rows).unwrap();
        assert!(
            text.starts_with("n,h,l2_u,l2_p,linf_u,order_u,order_p\n8,0.125,16.0,32.0,16.0,,\n")
        );
        let back: Vec<ConvergenceRow> = parse_csv(&text, Path::new("t.csv")).unwrap();
        assert_eq!(back, rows);
    }

    #[test]
    fn malformed_row_names_line() {
        let err = parse_csv::<ConvergenceRow>(
            "n,h,l2_u,l2_p,linf_u,order_u,order_p\n8,x,1,1,1,,\n",
            Path::new("t.csv"),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
    }
}
