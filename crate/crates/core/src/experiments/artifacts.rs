//! Flat-file artifacts: CSV tables, gnuplot data blocks and an SVG heat map.
//!
//! Every float is written as `{:.16e}` (17 significant digits), which
//! round-trips `f64` exactly.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use crate::engine::PhysicalSnapshot;

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Header plus string cells of a CSV table.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<usize> {
        self.headers.iter().position(|h| h == name)
    }

    /// Parses one column as floats (empty cells become NaN).
    pub fn floats(&self, name: &str) -> Option<Vec<f64>> {
        let c = self.column(name)?;
        self.rows.iter().map(|r| if r[c].is_empty() { Some(f64::NAN) } else { r[c].parse().ok() }).collect()
    }
}

pub fn write_table(path: &Path, table: &Table) -> io::Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_path(path)?;
    w.write_record(&table.headers)?;
    for row in &table.rows {
        w.write_record(row)?;
    }
    w.flush()
}

pub fn read_table(path: &Path) -> io::Result<Table> {
    let mut r = csv::Reader::from_path(path)?;
    let headers = r.headers()?.iter().map(String::from).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        rows.push(rec?.iter().map(String::from).collect());
    }
    Ok(Table { headers, rows })
}

/// Long table `t, phase, y, x, v`, one row per node per snapshot.
pub fn field_table(snapshots: &[PhysicalSnapshot], nodes: &[f64]) -> Table {
    let mut rows = Vec::with_capacity(snapshots.len() * nodes.len());
    for s in snapshots {
        for ((y, x), v) in nodes.iter().zip(&s.x).zip(&s.u) {
            rows.push(vec![fmt_f64(s.t), s.phase.as_str().to_string(), fmt_f64(*y), fmt_f64(*x), fmt_f64(*v)]);
        }
    }
    Table { headers: ["t", "phase", "y", "x", "v"].map(String::from).to_vec(), rows }
}

/// Domain endpoint trace `t, phase, endpoint`.
pub fn domain_table(snapshots: &[PhysicalSnapshot]) -> Table {
    let rows = snapshots
        .iter()
        .map(|s| vec![fmt_f64(s.t), s.phase.as_str().to_string(), fmt_f64(s.endpoint)])
        .collect();
    Table { headers: ["t", "phase", "endpoint"].map(String::from).to_vec(), rows }
}

/// Wide per-period table `period, t, sup_pre, sup_post` (`sup_post` empty on the last row).
pub fn period_table(period_sup: &[f64], post_sup: &[f64], period: f64) -> Table {
    let rows = period_sup
        .iter()
        .enumerate()
        .map(|(n, s)| {
            vec![
                n.to_string(),
                fmt_f64(n as f64 * period),
                fmt_f64(*s),
                post_sup.get(n).map(|p| fmt_f64(*p)).unwrap_or_default(),
            ]
        })
        .collect();
    Table { headers: ["period", "t", "sup_pre", "sup_post"].map(String::from).to_vec(), rows }
}

/// gnuplot `splot` data: one `t x v` block per snapshot, blocks separated by a blank line.
pub fn gnuplot_data(snapshots: &[PhysicalSnapshot]) -> String {
    let mut out = String::from("# t x v\n");
    for s in snapshots {
        // Dirichlet endpoints close each cross-section
        let _ = writeln!(out, "{} {} {}", fmt_f64(s.t), fmt_f64(0.0), fmt_f64(0.0));
        for (x, v) in s.x.iter().zip(&s.u) {
            let _ = writeln!(out, "{} {} {}", fmt_f64(s.t), fmt_f64(*x), fmt_f64(*v));
        }
        let _ = writeln!(out, "{} {} {}", fmt_f64(s.t), fmt_f64(s.endpoint), fmt_f64(0.0));
        out.push('\n');
    }
    out
}

fn color(frac: f64) -> String {
    // dark blue → yellow
    let f = frac.clamp(0.0, 1.0);
    let r = (68.0 + f * (253.0 - 68.0)) as u8;
    let g = (1.0 + f * (231.0 - 1.0)) as u8;
    let b = (84.0 + f * (37.0 - 84.0)) as u8;
    format!("#{r:02x}{g:02x}{b:02x}")
}

/// Heat map of `u(t, x)` on the physical domain (time across, space up).
/// At most 240 time columns and 60 space rows are drawn.
pub fn svg_heatmap(snapshots: &[PhysicalSnapshot], title: &str) -> String {
    let (w, h, pad) = (720.0, 360.0, 48.0);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        w + 2.0 * pad,
        h + 2.0 * pad,
        w + 2.0 * pad,
        h + 2.0 * pad
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{pad}" y="{}" font-family="sans-serif" font-size="14">{}</text>"#, pad * 0.6, escape(title));
    if snapshots.is_empty() {
        out.push_str("</svg>\n");
        return out;
    }
    let t0 = snapshots[0].t;
    let t1 = snapshots[snapshots.len() - 1].t.max(t0 + f64::MIN_POSITIVE);
    let x_max = snapshots.iter().map(|s| s.endpoint).fold(0.0, f64::max);
    let v_max = snapshots.iter().flat_map(|s| s.u.iter()).copied().fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let col_stride = snapshots.len().div_ceil(240);
    let cols: Vec<&PhysicalSnapshot> = snapshots.iter().step_by(col_stride).collect();
    let cell_w = w / cols.len() as f64;
    for s in &cols {
        let px = pad + (s.t - t0) / (t1 - t0) * (w - cell_w);
        let row_stride = s.u.len().div_ceil(60);
        let cell_h = h * (s.endpoint / x_max) / s.u.len().div_ceil(row_stride) as f64;
        for (j, (_, v)) in s.x.iter().zip(&s.u).enumerate().step_by(row_stride) {
            let py = pad + h - (j / row_stride + 1) as f64 * cell_h;
            let _ = writeln!(
                out,
                r#"<rect x="{px:.2}" y="{py:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
                cell_w + 0.5,
                cell_h + 0.5,
                color(v / v_max)
            );
        }
    }
    let _ = writeln!(
        out,
        r#"<text x="{pad}" y="{}" font-family="sans-serif" font-size="12">t = {t0:.3} … {t1:.3}, x ≤ {x_max:.3}, max u = {v_max:.4e}</text>"#,
        h + 1.6 * pad
    );
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn write_text(path: &Path, text: &str) -> io::Result<()> {
    fs::write(path, text)
}
