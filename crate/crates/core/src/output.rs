//! CSV writers for field snapshots, invariant logs and peakon trajectories.
//!
//! Numbers are written in scientific notation with 17 significant digits so
//! that every `f64` survives a text round trip bit-exactly.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::field::Field;

/// Format with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// `x,value` rows for every grid point.
pub fn field_csv(field: &Field) -> String {
    let grid = field.grid();
    let mut out = String::from("x,value\n");
    for (j, v) in field.samples().iter().enumerate() {
        let _ = writeln!(out, "{},{}", fmt_f64(grid.point(j)), fmt_f64(*v));
    }
    out
}

pub fn write_field_csv(path: &Path, field: &Field) -> std::io::Result<()> {
    fs::write(path, field_csv(field))
}

/// Parse a field CSV back into `(x, value)` columns.
pub fn parse_field_csv(text: &str) -> Result<(Vec<f64>, Vec<f64>), String> {
    let mut lines = text.lines();
    match lines.next() {
        Some("x,value") => {}
        other => return Err(format!("bad header: {other:?}")),
    }
    let mut xs = Vec::new();
    let mut vs = Vec::new();
    for (i, line) in lines.enumerate() {
        let (x, v) = line
            .split_once(',')
            .ok_or_else(|| format!("line {}: expected two columns", i + 2))?;
        xs.push(x.parse().map_err(|e| format!("line {}: {e}", i + 2))?);
        vs.push(v.parse().map_err(|e| format!("line {}: {e}", i + 2))?);
    }
    Ok((xs, vs))
}

/// Invariant log with header `t,H0,H1,H2`.
#[derive(Debug, Clone, Default)]
pub struct InvariantLog {
    rows: Vec<[f64; 4]>,
}

impl InvariantLog {
    pub fn push(&mut self, t: f64, h: [f64; 3]) {
        self.rows.push([t, h[0], h[1], h[2]]);
    }

    pub fn rows(&self) -> &[[f64; 4]] {
        &self.rows
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,H0,H1,H2\n");
        for r in &self.rows {
            let cols: Vec<String> = r.iter().map(|&v| fmt_f64(v)).collect();
            let _ = writeln!(out, "{}", cols.join(","));
        }
        out
    }
}

/// Peakon trajectory log with header `t,q1..qN,p1..pN,H,P`.
#[derive(Debug, Clone)]
pub struct TrajectoryLog {
    count: usize,
    rows: Vec<Vec<f64>>,
}

impl TrajectoryLog {
    pub fn new(count: usize) -> Self {
        Self {
            count,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, t: f64, q: &[f64], p: &[f64], hamiltonian: f64, momentum: f64) {
        debug_assert_eq!(q.len(), self.count);
        debug_assert_eq!(p.len(), self.count);
        let mut row = Vec::with_capacity(2 * self.count + 3);
        row.push(t);
        row.extend_from_slice(q);
        row.extend_from_slice(p);
        row.push(hamiltonian);
        row.push(momentum);
        self.rows.push(row);
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn header(&self) -> String {
        let mut cols = vec!["t".to_string()];
        cols.extend((1..=self.count).map(|i| format!("q{i}")));
        cols.extend((1..=self.count).map(|i| format!("p{i}")));
        cols.push("H".into());
        cols.push("P".into());
        cols.join(",")
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header();
        out.push('\n');
        for r in &self.rows {
            let cols: Vec<String> = r.iter().map(|&v| fmt_f64(v)).collect();
            let _ = writeln!(out, "{}", cols.join(","));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Grid1D;

    #[test]
    fn field_csv_round_trips_bits() {
        let g = Grid1D::new(16, 3.0).unwrap();
        let f = Field::from_fn(g, |x| (x * 1.37).sin() / 3.0).unwrap();
        let text = field_csv(&f);
        assert!(text.starts_with("x,value\n"));
        let (xs, vs) = parse_field_csv(&text).unwrap();
        assert_eq!(xs, g.points());
        assert_eq!(vs, f.samples());
    }

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_f64(-2.0), "-2.0000000000000000e0");
    }

    #[test]
    fn trajectory_header() {
        let mut log = TrajectoryLog::new(2);
        log.push(0.0, &[1.0, 2.0], &[0.5, 0.25], 1.0, 0.75);
        assert_eq!(log.header(), "t,q1,q2,p1,p2,H,P");
        assert_eq!(log.to_csv().lines().count(), 2);
    }

    #[test]
    fn invariant_header() {
        let mut log = InvariantLog::default();
        log.push(0.0, [1.0, 2.0, 3.0]);
        assert!(log.to_csv().starts_with("t,H0,H1,H2\n"));
    }
}
