//! File formats: complex-matrix CSV, decay-curve CSV, symbol CSV, and the
//! basis persistence file (a JSON header line followed by the basis matrix
//! in CSV form). All floats are written with 17 significant digits so that
//! write/read round-trips are exact and repeated runs are byte-identical.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::asymptotics::DecayCurve;
use crate::error::{Error, Result};
use crate::inner::InnerFunctionSpec;
use crate::linalg::CMatrix;
use crate::model_space::ModelSpaceBasis;

/// 17-significant-digit float formatting shared by every CSV writer.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Matrix CSV: first line `rows,cols`, then `row,col,re,im` in row-major
/// order.
pub fn matrix_to_csv(m: &CMatrix) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{},{}", m.nrows(), m.ncols());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let v = m[(i, j)];
            let _ = writeln!(out, "{},{},{},{}", i, j, format_f64(v.re), format_f64(v.im));
        }
    }
    out
}

pub fn matrix_from_csv(text: &str) -> Result<CMatrix> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::Parse("empty matrix file".into()))?;
    let dims: Vec<&str> = header.trim().split(',').collect();
    if dims.len() != 2 {
        return Err(Error::Parse(format!(
            "line 1: expected 'rows,cols', got '{header}'"
        )));
    }
    let rows: usize = dims[0]
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("line 1: bad row count '{}'", dims[0])))?;
    let cols: usize = dims[1]
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("line 1: bad column count '{}'", dims[1])))?;
    if rows == 0 || cols == 0 {
        return Err(Error::Parse("matrix dimensions must be positive".into()));
    }
    let mut m = CMatrix::zeros(rows, cols);
    let mut seen = 0usize;
    for (idx, line) in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 4 {
            return Err(Error::Parse(format!(
                "line {}: expected 'row,col,re,im', got '{line}'",
                idx + 1
            )));
        }
        let i: usize = parts[0]
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("line {}: bad row index", idx + 1)))?;
        let j: usize = parts[1]
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("line {}: bad column index", idx + 1)))?;
        if i >= rows || j >= cols {
            return Err(Error::Parse(format!(
                "line {}: index ({i},{j}) outside {rows}x{cols}",
                idx + 1
            )));
        }
        let re: f64 = parts[2]
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("line {}: bad real part", idx + 1)))?;
        let im: f64 = parts[3]
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("line {}: bad imaginary part", idx + 1)))?;
        m[(i, j)] = Complex64::new(re, im);
        seen += 1;
    }
    if seen != rows * cols {
        return Err(Error::Parse(format!(
            "expected {} entries, found {seen}",
            rows * cols
        )));
    }
    Ok(m)
}

/// Decay-curve CSV: header `n,value`, one row per entry.
pub fn curve_to_csv(curve: &DecayCurve) -> String {
    let mut out = String::from("n,value\n");
    for &(n, v) in &curve.entries {
        let _ = writeln!(out, "{},{}", n, format_f64(v));
    }
    out
}

/// Symbol CSV for Toeplitz construction: header `m,re,im`, one diagonal per
/// row.
pub fn symbol_to_csv(symbol: &BTreeMap<i64, Complex64>) -> String {
    let mut out = String::from("m,re,im\n");
    for (&m, &v) in symbol {
        let _ = writeln!(out, "{},{},{}", m, format_f64(v.re), format_f64(v.im));
    }
    out
}

pub fn symbol_from_csv(text: &str) -> Result<BTreeMap<i64, Complex64>> {
    let mut out = BTreeMap::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || (idx == 0 && line.eq_ignore_ascii_case("m,re,im")) {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!(
                "line {}: expected 'm,re,im', got '{line}'",
                idx + 1
            )));
        }
        let m: i64 = parts[0]
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("line {}: bad diagonal index", idx + 1)))?;
        let re: f64 = parts[1]
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("line {}: bad real part", idx + 1)))?;
        let im: f64 = parts[2]
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("line {}: bad imaginary part", idx + 1)))?;
        out.insert(m, Complex64::new(re, im));
    }
    Ok(out)
}

/// Write through a temporary sibling file and rename into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let tmp = path.with_extension({
        let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
        if ext.is_empty() {
            "tmp".to_string()
        } else {
            format!("{ext}.tmp")
        }
    });
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct BasisHeader {
    spec: InnerFunctionSpec,
    #[serde(rename = "N")]
    n: usize,
    d: usize,
    eig_gap: f64,
    isometry_defect: f64,
    truncation_warning: bool,
}

/// Basis persistence: one JSON header line, then the basis matrix CSV.
pub fn basis_to_string(basis: &ModelSpaceBasis) -> Result<String> {
    let header = BasisHeader {
        spec: basis.spec().clone(),
        n: basis.order(),
        d: basis.dim(),
        eig_gap: basis.eig_gap(),
        isometry_defect: basis.isometry_defect(),
        truncation_warning: basis.truncation_warning(),
    };
    let mut out = serde_json::to_string(&header).map_err(|e| Error::Parse(e.to_string()))?;
    out.push('\n');
    out.push_str(&matrix_to_csv(basis.basis_matrix()));
    Ok(out)
}

pub fn basis_from_string(text: &str) -> Result<ModelSpaceBasis> {
    let (header_line, rest) = text
        .split_once('\n')
        .ok_or_else(|| Error::Parse("missing basis header line".into()))?;
    let header: BasisHeader = serde_json::from_str(header_line)
        .map_err(|e| Error::Parse(format!("basis header: {e}")))?;
    header.spec.validate()?;
    let matrix = matrix_from_csv(rest)?;
    if matrix.ncols() != header.d {
        return Err(Error::Parse(format!(
            "header says d = {}, matrix has {} columns",
            header.d,
            matrix.ncols()
        )));
    }
    ModelSpaceBasis::from_parts(
        header.spec,
        header.n,
        matrix,
        header.eig_gap,
        header.isometry_defect,
        header.truncation_warning,
    )
}

pub fn save_basis(path: &Path, basis: &ModelSpaceBasis) -> Result<()> {
    write_atomic(path, &basis_to_string(basis)?)
}

pub fn load_basis(path: &Path) -> Result<ModelSpaceBasis> {
    let text = std::fs::read_to_string(path)?;
    basis_from_string(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asymptotics::CurveKind;
    use crate::inner::make_blaschke;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn float_format_has_17_significant_digits() {
        assert_eq!(format_f64(0.5), "5.0000000000000000e-1");
        assert_eq!(format_f64(0.0), "0.0000000000000000e0");
        let x = 0.1 + 0.2;
        let parsed: f64 = format_f64(x).parse().unwrap();
        assert_eq!(parsed, x); // round-trip exact
    }

    #[test]
    fn matrix_csv_round_trip() {
        let m = CMatrix::from_fn(3, 2, |i, j| c(i as f64 + 0.125, j as f64 - 0.25));
        let text = matrix_to_csv(&m);
        assert!(text.starts_with("3,2\n"));
        let back = matrix_from_csv(&text).unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn matrix_csv_rejects_malformed_input() {
        assert!(matches!(matrix_from_csv(""), Err(Error::Parse(_))));
        assert!(matches!(matrix_from_csv("2\n"), Err(Error::Parse(_))));
        assert!(matches!(
            matrix_from_csv("1,1\n0,0,1.0\n"),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            matrix_from_csv("1,1\n0,5,1.0,0.0\n"),
            Err(Error::Parse(_))
        ));
        // missing entries
        assert!(matches!(
            matrix_from_csv("2,2\n0,0,1.0,0.0\n"),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn curve_csv_layout() {
        let curve = DecayCurve {
            entries: vec![(0, 1.0), (1, 0.25)],
            kind: CurveKind::OperatorNorm,
            fitted_rate: Some(0.25),
        };
        let text = curve_to_csv(&curve);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "n,value");
        assert_eq!(lines[1], "0,1.0000000000000000e0");
        assert_eq!(lines[2], "1,2.5000000000000000e-1");
    }

    #[test]
    fn symbol_csv_round_trip() {
        let mut sym = BTreeMap::new();
        sym.insert(-1, c(1.0, 0.0));
        sym.insert(0, c(2.0, -0.5));
        sym.insert(2, c(0.5, 0.0));
        let text = symbol_to_csv(&sym);
        let back = symbol_from_csv(&text).unwrap();
        assert_eq!(sym, back);
    }

    #[test]
    fn basis_persistence_round_trip() {
        let spec = make_blaschke(vec![c(0.5, 0.0), c(0.0, 0.3)], c(1.0, 0.0)).unwrap();
        let basis = ModelSpaceBasis::build(&spec, 64).unwrap();
        let text = basis_to_string(&basis).unwrap();
        let back = basis_from_string(&text).unwrap();
        assert_eq!(back.order(), basis.order());
        assert_eq!(back.dim(), basis.dim());
        assert_eq!(back.basis_matrix(), basis.basis_matrix());
        assert_eq!(back.spec(), basis.spec());
        assert_eq!(back.eig_gap(), basis.eig_gap());
    }

    #[test]
    fn atomic_write_creates_file() {
        let dir = std::env::temp_dir().join("ktheta-io-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("m.csv");
        let m = CMatrix::from_fn(2, 2, |i, j| c(i as f64, j as f64));
        write_atomic(&path, &matrix_to_csv(&m)).unwrap();
        let back = matrix_from_csv(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(m, back);
        std::fs::remove_dir_all(&dir).ok();
    }
}
