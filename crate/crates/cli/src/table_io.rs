//! Profile tables as CSV, and log-log plot data with bound overlays.

use std::fmt;

use serde::{Deserialize, Serialize};

use sepprof_core::bounds::{BoundExpr, Target};
use sepprof_core::profiles::{ProfileKind, ProfilePoint, ProfileTable};
use sepprof_core::rational::to_f64;
use sepprof_core::Rational;

#[derive(Debug, Clone, PartialEq)]
pub enum PlotError {
    EmptyTable,
    Csv(String),
}

impl fmt::Display for PlotError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlotError::EmptyTable => f.write_str("profile table has no rows"),
            PlotError::Csv(m) => write!(f, "bad profile CSV: {m}"),
        }
    }
}

impl std::error::Error for PlotError {}

#[derive(Debug, Serialize, Deserialize)]
struct Row {
    n: u64,
    value_num: i128,
    value_den: i128,
    value_f64: f64,
    exact: bool,
    ambient_certified: bool,
    witness_size: Option<u64>,
    trivial: bool,
}

fn finish(w: csv::Writer<Vec<u8>>) -> String {
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("csv output is UTF-8")
}

pub fn write_profile_csv(table: &ProfileTable) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    if table.points.is_empty() {
        w.write_record(["n", "value_num", "value_den", "value_f64", "exact", "ambient_certified", "witness_size", "trivial"])
            .expect("in-memory write");
    }
    for p in &table.points {
        w.serialize(Row {
            n: p.n,
            value_num: *p.value.numer(),
            value_den: *p.value.denom(),
            value_f64: to_f64(&p.value),
            exact: p.exact,
            ambient_certified: p.ambient_certified,
            witness_size: p.witness_size,
            trivial: p.trivial,
        })
        .expect("in-memory write");
    }
    finish(w)
}

/// Reads a table written by [`write_profile_csv`]. The `trivial` column is optional.
pub fn read_profile_csv(text: &str, kind: ProfileKind, label: &str) -> Result<ProfileTable, PlotError> {
    #[derive(Deserialize)]
    struct In {
        n: u64,
        value_num: i128,
        value_den: i128,
        exact: bool,
        ambient_certified: bool,
        witness_size: Option<u64>,
        #[serde(default)]
        trivial: bool,
    }
    let mut table = ProfileTable::new(kind, label);
    let mut r = csv::Reader::from_reader(text.as_bytes());
    for row in r.deserialize::<In>() {
        let row = row.map_err(|e| PlotError::Csv(e.to_string()))?;
        if row.value_den <= 0 {
            return Err(PlotError::Csv(format!("non-positive denominator at n = {}", row.n)));
        }
        let mut p = ProfilePoint::new(row.n, Rational::new(row.value_num, row.value_den));
        p.exact = row.exact;
        p.ambient_certified = row.ambient_certified;
        p.witness_size = row.witness_size;
        p.trivial = row.trivial;
        table.points.push(p);
    }
    if table.points.windows(2).any(|w| w[1].n <= w[0].n) {
        return Err(PlotError::Csv("rows must be in increasing order of n".into()));
    }
    Ok(table)
}

/// The bound on the scale of the table: Sep(n) for separation tables, Sep(n)/n for
/// isoperimetric ones.
fn overlay_value(b: &BoundExpr, kind: ProfileKind, n: u64) -> Option<f64> {
    let x = n as f64;
    let v = b.evaluate_at(x).ok()?;
    let sep_like = matches!(kind, ProfileKind::Sep | ProfileKind::LocalSep);
    Some(match (b.form.target(), sep_like) {
        (Target::SepPerVertex, true) => v * x,
        (Target::Sep, false) => v / x,
        _ => v,
    })
}

/// Columns n, log2_n, value, log2_value and one column per overlay (named after the form,
/// suffixed on repeats). Cells outside a form's domain, and log2 of zero values, are empty.
pub fn emit_plot_data(table: &ProfileTable, overlays: &[BoundExpr]) -> Result<String, PlotError> {
    if table.points.is_empty() {
        return Err(PlotError::EmptyTable);
    }
    let mut header = vec!["n".to_string(), "log2_n".into(), "value".into(), "log2_value".into()];
    for (i, b) in overlays.iter().enumerate() {
        let name = b.form.name().to_string();
        let repeats = overlays[..i].iter().filter(|o| o.form == b.form).count();
        header.push(if repeats == 0 { name } else { format!("{name}_{}", repeats + 1) });
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&header).expect("in-memory write");
    let cell = |v: Option<f64>| v.filter(|x| x.is_finite()).map_or(String::new(), |x| x.to_string());
    for p in &table.points {
        let value = to_f64(&p.value);
        let mut rec = vec![
            p.n.to_string(),
            cell(Some((p.n as f64).log2())),
            cell(Some(value)),
            cell((value > 0.0).then(|| value.log2())),
        ];
        rec.extend(overlays.iter().map(|b| cell(overlay_value(b, table.kind, p.n))));
        w.write_record(&rec).expect("in-memory write");
    }
    Ok(finish(w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use sepprof_core::bounds::BoundForm;
    use sepprof_core::rational::{int, rat};

    fn sample() -> ProfileTable {
        let mut t = ProfileTable::new(ProfileKind::Iso, "t");
        for n in 1..=4u64 {
            let mut p = ProfilePoint::new(n, rat(2, n as i128));
            p.exact = true;
            p.ambient_certified = n < 4;
            p.witness_size = Some(n);
            t.points.push(p);
        }
        t
    }

    #[test]
    fn csv_round_trip() {
        let t = sample();
        let text = write_profile_csv(&t);
        assert!(text.starts_with("n,value_num,value_den,value_f64,exact,ambient_certified,witness_size,trivial\n"));
        assert!(text.contains("\n3,2,3,0.6666666666666666,true,true,3,false\n"));
        let back = read_profile_csv(&text, ProfileKind::Iso, "t").unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn constant_separation_plot() {
        let mut t = ProfileTable::new(ProfileKind::Sep, "line");
        for n in 1..=9u64 {
            t.points.push(ProfilePoint::new(n, int(if n == 1 { 0 } else if n == 2 { 2 } else { 3 })));
        }
        let csv = emit_plot_data(&t, &[]).unwrap();
        let rows: Vec<Vec<&str>> = csv.lines().skip(1).map(|l| l.split(',').collect()).collect();
        assert_eq!(rows[0][3], "");
        for r in &rows[2..] {
            assert_eq!(r[2], "3");
            assert_eq!(r[3], 3f64.log2().to_string());
        }
    }

    #[test]
    fn overlay_columns_align() {
        let mut t = ProfileTable::new(ProfileKind::Sep, "plane");
        for n in [16u64, 64, 256] {
            t.points.push(ProfilePoint::new(n, int((n as f64).sqrt() as i128)));
        }
        let b = BoundExpr::parse(BoundForm::GrowthUpperPolynomial, "d=2").unwrap();
        let csv = emit_plot_data(&t, &[b.clone(), b]).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "n,log2_n,value,log2_value,growth-upper-polynomial,growth-upper-polynomial_2");
        for l in lines {
            let c: Vec<&str> = l.split(',').collect();
            assert_eq!(c.len(), 6);
            let n: f64 = c[0].parse().unwrap();
            let v: f64 = c[4].parse().unwrap();
            assert!((v - n.ln() * n.sqrt()).abs() < 1e-9 * v);
            assert_eq!(c[4], c[5]);
        }
    }

    #[test]
    fn empty_table_is_an_error() {
        assert_eq!(emit_plot_data(&ProfileTable::new(ProfileKind::Sep, "e"), &[]), Err(PlotError::EmptyTable));
    }
}
