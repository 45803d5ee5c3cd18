//! CSV tables with a lossless float format.

use std::fmt::Write as _;

use collapse_core::semigroup::TimeSeries;

/// Header of every density-matrix series file.
pub const DENSITY_HEADER: [&str; 4] = ["t", "rho1", "re_rho3", "im_rho3"];

/// Seventeen significant digits in scientific notation, enough to recover
/// every `f64` bit pattern.
pub fn fmt_real(v: f64) -> String {
    format!("{v:.16e}")
}

/// A single CSV field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell<'a> {
    Real(f64),
    Int(i64),
    UInt(u64),
    Text(&'a str),
}

/// An in-memory CSV file.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    name: String,
    columns: usize,
    rows: usize,
    text: String,
}

impl Table {
    /// `name` is the file name the runner writes the table to.
    pub fn new(name: impl Into<String>, header: &[&str]) -> Self {
        let mut text = header.join(",");
        text.push('\n');
        Self { name: name.into(), columns: header.len(), rows: 0, text }
    }

    /// Appends a row.
    ///
    /// # Panics
    /// If the row width differs from the header, or a text cell contains a
    /// comma or newline.
    pub fn push(&mut self, cells: &[Cell<'_>]) {
        assert_eq!(cells.len(), self.columns, "row width mismatch in {}", self.name);
        for (i, c) in cells.iter().enumerate() {
            if i > 0 {
                self.text.push(',');
            }
            match *c {
                Cell::Real(v) => self.text.push_str(&fmt_real(v)),
                Cell::Int(v) => write!(self.text, "{v}").unwrap(),
                Cell::UInt(v) => write!(self.text, "{v}").unwrap(),
                Cell::Text(s) => {
                    assert!(!s.contains([',', '\n', '"']), "unquotable cell {s:?}");
                    self.text.push_str(s);
                }
            }
        }
        self.text.push('\n');
        self.rows += 1;
    }

    pub fn push_reals(&mut self, values: &[f64]) {
        let cells: Vec<Cell<'_>> = values.iter().map(|&v| Cell::Real(v)).collect();
        self.push(&cells);
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }
}

/// `t,rho1,re_rho3,im_rho3` rows for every sample of `series`.
pub fn density_table(name: impl Into<String>, series: &TimeSeries) -> Table {
    let mut table = Table::new(name, &DENSITY_HEADER);
    for (t, rho) in series.iter() {
        let r3 = rho.rho3();
        table.push_reals(&[t, rho.rho1(), r3.re, r3.im]);
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;
    use collapse_core::semigroup::DensityMatrix2;
    use collapse_core::Complex64;

    #[test]
    fn reals_round_trip_bitwise() {
        for v in [0.1, 1.0 / 3.0, 0.490_384_564_028_478_7, 5e-324, -1e300, 0.0] {
            let back: f64 = fmt_real(v).parse().unwrap();
            assert_eq!(back.to_bits(), v.to_bits());
        }
        assert_eq!(fmt_real(0.5), "5.0000000000000000e-1");
    }

    #[test]
    fn density_rows() {
        let rho = DensityMatrix2::new(0.48, Complex64::new(0.0, 0.25)).unwrap();
        let s = TimeSeries::new(vec![0.0, 1.0], vec![rho, rho]).unwrap();
        let t = density_table("x.csv", &s);
        assert_eq!(t.rows(), 2);
        let lines: Vec<&str> = t.as_str().lines().collect();
        assert_eq!(lines[0], "t,rho1,re_rho3,im_rho3");
        assert_eq!(lines[1].split(',').count(), 4);
        assert!(lines[2].starts_with("1.0000000000000000e0,4.7999999999999998e-1,"));
    }

    #[test]
    fn mixed_cells() {
        let mut t = Table::new("m.csv", &["run", "seed", "delta", "label"]);
        t.push(&[Cell::UInt(3), Cell::UInt(u64::MAX), Cell::Int(-1), Cell::Text("A")]);
        assert_eq!(t.as_str().lines().nth(1).unwrap(), "3,18446744073709551615,-1,A");
    }

    #[test]
    #[should_panic(expected = "row width")]
    fn width_is_enforced() {
        Table::new("w.csv", &["a", "b"]).push_reals(&[1.0]);
    }
}
