//! CSV rendering and parsing for every file surface of the harness.
//!
//! All numeric fields use the shortest round-trip decimal representation of
//! the underlying double (Rust's `Display` for `f64`), so identical inputs
//! produce byte-identical CSV bodies.

use num_complex::Complex64;

use crate::analysis::{ScalingFit, SweepRow};
use crate::error::{Error, Result};
use crate::search::{PeakReport, SearchConfig};
use crate::topology::Edge;
use crate::walker::WalkerState;

pub const EDGES_HEADER: &str = "k,k_prime,class";
pub const SERIES_HEADER: &str = "t,p_marked";
pub const REPORT_HEADER: &str = "method,mode,n,N,k0,epsilon,cos_delta,t_f,p_f,cost_single,cost_total";
pub const SWEEP_HEADER: &str =
    "sweep_variable,value,method,mode,n,N,k0,epsilon,cos_delta,t_f,p_f,cost_single,cost_total,status";
pub const FIT_HEADER: &str = "prefactor,exponent,r_squared,points_used";
pub const STATE_HEADER: &str = "ancilla,coin,vertex,re,im";

fn fmt(x: f64) -> String {
    format!("{x}")
}

pub fn edges_csv(edges: &[Edge]) -> String {
    let mut out = String::from(EDGES_HEADER);
    for e in edges {
        out.push_str(&format!("\n{},{},{}", e.k, e.k_prime, e.class.as_str()));
    }
    out.push('\n');
    out
}

pub fn series_csv(series: &[f64]) -> String {
    let mut out = String::from(SERIES_HEADER);
    for (t, p) in series.iter().enumerate() {
        out.push_str(&format!("\n{t},{}", fmt(*p)));
    }
    out.push('\n');
    out
}

fn report_fields(config: &SearchConfig, report: &PeakReport) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{},{}",
        config.method,
        config.edge_mode,
        config.n,
        config.num_vertices(),
        config.k0,
        fmt(config.epsilon),
        config.cos_delta().map(fmt).unwrap_or_default(),
        report.t_f,
        fmt(report.p_f),
        fmt(report.cost_single),
        fmt(report.cost_total),
    )
}

pub fn report_csv(config: &SearchConfig, report: &PeakReport) -> String {
    format!("{REPORT_HEADER}\n{}\n", report_fields(config, report))
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_HEADER);
    for row in rows {
        let n_vertices = 1u64 << row.n;
        let cos_delta = row.cos_delta.map(fmt).unwrap_or_default();
        match &row.report {
            Some(r) => out.push_str(&format!(
                "\n{},{},{},{},{},{},{},{},{},{},{},{},{},ok",
                row.variable,
                fmt(row.value),
                row.method,
                row.mode,
                row.n,
                n_vertices,
                row.k0,
                fmt(row.epsilon),
                cos_delta,
                r.t_f,
                fmt(r.p_f),
                fmt(r.cost_single),
                fmt(r.cost_total),
            )),
            None => out.push_str(&format!(
                "\n{},{},{},{},{},{},{},{},{},,,,,no_peak",
                row.variable,
                fmt(row.value),
                row.method,
                row.mode,
                row.n,
                n_vertices,
                row.k0,
                fmt(row.epsilon),
                cos_delta,
            )),
        }
    }
    out.push('\n');
    out
}

pub fn fit_csv(fit: &ScalingFit) -> String {
    format!(
        "{FIT_HEADER}\n{},{},{},{}\n",
        fmt(fit.prefactor),
        fmt(fit.exponent),
        fmt(fit.r_squared),
        fit.points_used
    )
}

pub fn state_csv(state: &WalkerState) -> String {
    let mut out = String::from(STATE_HEADER);
    let amps = state.amplitudes();
    let slice_len = amps.len() / state.num_slices();
    for (i, amp) in amps.iter().enumerate() {
        let ancilla = i / slice_len;
        let within = i % slice_len;
        let (vertex, coin) = (within / 4, within % 4);
        out.push_str(&format!("\n{ancilla},{coin},{vertex},{},{}", fmt(amp.re), fmt(amp.im)));
    }
    out.push('\n');
    out
}

/// Parse a state dump back into `(ancilla, coin, vertex, amplitude)` records.
pub fn parse_state_csv(text: &str) -> Result<Vec<(usize, usize, usize, Complex64)>> {
    let table = parse_csv(text)?;
    let mut out = Vec::with_capacity(table.rows.len());
    for (line, fields) in &table.rows {
        if fields.len() != 5 {
            return Err(Error::Parse { line: *line, msg: "expected 5 fields".into() });
        }
        let parse =
            |i: usize| -> Result<f64> { parse_field(fields[i].as_str(), *line) };
        out.push((
            parse(0)? as usize,
            parse(1)? as usize,
            parse(2)? as usize,
            Complex64::new(parse(3)?, parse(4)?),
        ));
    }
    Ok(out)
}

/// A parsed CSV table: header names plus rows tagged with their 1-based
/// line numbers.
#[derive(Debug)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<(usize, Vec<String>)>,
}

impl Table {
    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.header.iter().position(|h| h == name).ok_or_else(|| {
            Error::domain(format!(
                "no column `{name}` in table (have: {})",
                self.header.join(", ")
            ))
        })
    }
}

/// Parse simple comma-separated text: a header line then data rows, every
/// row with the header's field count. No quoting is produced by this crate,
/// so none is interpreted.
pub fn parse_csv(text: &str) -> Result<Table> {
    let mut lines = text.lines().enumerate();
    let (_, header_line) = lines
        .next()
        .ok_or(Error::Parse { line: 1, msg: "empty table: missing header".into() })?;
    let header: Vec<String> = header_line.split(',').map(str::to_string).collect();
    let mut rows = Vec::new();
    for (idx, line) in lines {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<String> = line.split(',').map(str::to_string).collect();
        if fields.len() != header.len() {
            return Err(Error::Parse {
                line: idx + 1,
                msg: format!("expected {} fields, found {}", header.len(), fields.len()),
            });
        }
        rows.push((idx + 1, fields));
    }
    Ok(Table { header, rows })
}

pub fn parse_field(field: &str, line: usize) -> Result<f64> {
    field.parse::<f64>().map_err(|_| Error::Parse {
        line,
        msg: format!("`{field}` is not a number"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::{detect_first_peak, run_series, Method};
    use crate::topology::{EdgeMode, NetworkTopology};

    #[test]
    fn series_csv_shape() {
        let text = series_csv(&[0.25, 0.5]);
        assert_eq!(text, "t,p_marked\n0,0.25\n1,0.5\n");
    }

    #[test]
    fn edges_csv_shape() {
        let topo = NetworkTopology::new(2, EdgeMode::Paired).unwrap();
        let text = edges_csv(&topo.dump_edges());
        assert!(text.starts_with("k,k_prime,class\n"));
        assert!(text.contains("0,0,loop"));
        assert!(text.contains("2,2,loop"));
        assert_eq!(text.matches("1,3,level").count(), 2);
    }

    #[test]
    fn report_csv_round_trips_through_parser() {
        let mut config = SearchConfig::new(Method::Modified, 6, 0.75, EdgeMode::Chain);
        config.t_max = 200;
        config.peak = crate::search::PeakParams::for_horizon(200);
        let series = run_series(&config).unwrap();
        let report = detect_first_peak(&series, &config.peak).unwrap();
        let text = report_csv(&config, &report);
        let table = parse_csv(&text).unwrap();
        assert_eq!(table.rows.len(), 1);
        let t_f_col = table.column_index("t_f").unwrap();
        let (line, fields) = &table.rows[0];
        let t_f = parse_field(&fields[*t_f_col], *line).unwrap();
        assert_eq!(t_f as usize, report.t_f);
        assert_eq!(fields[table.column_index("mode").unwrap()], "chain");
        assert_eq!(fields[table.column_index("cos_delta").unwrap()], "");
    }

    #[test]
    fn parser_reports_line_numbers() {
        let err = parse_csv("a,b\n1,2\n3").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn state_csv_round_trip() {
        let state = WalkerState::initial(1.0, 2, true).unwrap();
        let text = state_csv(&state);
        let records = parse_state_csv(&text).unwrap();
        assert_eq!(records.len(), 32);
        let (anc, coin, vertex, amp) = records[32 - 1];
        assert_eq!((anc, coin, vertex), (1, 3, 3));
        assert!((amp.re - 0.25).abs() < 1e-15);
        assert_eq!(records[0].3, Complex64::new(0.0, 0.0));
    }
}
