//! Minimal hand-emitted SVG plots, generated from the trajectory CSV (and
//! the summary JSON for the circle geometry) only.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use mobius_geofence::simulator::SummaryDocument;

/// One parsed CSV row (floating columns only).
pub struct CsvRow {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub rho_x: f64,
    pub rho_y: f64,
    pub e_abs: f64,
    pub e_t_abs: f64,
    pub omega: f64,
    pub omega_t: f64,
}

pub fn read_rows(csv_path: &Path) -> io::Result<Vec<CsvRow>> {
    let text = fs::read_to_string(csv_path)?;
    let mut rows = Vec::new();
    for line in text.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() < 14 {
            return Err(io::Error::new(
                io::ErrorKind::InvalidData,
                format!("short CSV row: {line}"),
            ));
        }
        let f = |i: usize| -> io::Result<f64> {
            cols[i]
                .parse()
                .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, format!("{e}: {line}")))
        };
        rows.push(CsvRow {
            t: f(0)?,
            x: f(1)?,
            y: f(2)?,
            rho_x: f(4)?,
            rho_y: f(5)?,
            e_abs: f(7)?,
            e_t_abs: f(8)?,
            omega: f(10)?,
            omega_t: f(11)?,
        });
    }
    Ok(rows)
}

struct Frame {
    width: f64,
    height: f64,
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        (x - self.x_min) / (self.x_max - self.x_min) * (self.width - 80.0) + 60.0
    }

    fn py(&self, y: f64) -> f64 {
        // SVG y grows downward.
        (self.y_max - y) / (self.y_max - self.y_min) * (self.height - 70.0) + 30.0
    }
}

fn polyline(frame: &Frame, points: impl Iterator<Item = (f64, f64)>, color: &str) -> String {
    let mut coords = String::new();
    for (i, (x, y)) in points.enumerate() {
        // Thin dense trajectories; SVG readers choke on megabyte paths.
        if i % 4 == 0 {
            let _ = write!(coords, "{:.2},{:.2} ", frame.px(x), frame.py(y));
        }
    }
    format!(
        "<polyline points=\"{coords}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.4\"/>\n"
    )
}

fn header(width: f64, height: f64, title: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" \
         viewBox=\"0 0 {width} {height}\" font-family=\"monospace\" font-size=\"12\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n\
         <text x=\"{:.0}\" y=\"18\" text-anchor=\"middle\">{title}</text>\n",
        width / 2.0
    )
}

fn axes(frame: &Frame) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "<rect x=\"60\" y=\"30\" width=\"{:.0}\" height=\"{:.0}\" fill=\"none\" stroke=\"#999\"/>",
        frame.width - 80.0,
        frame.height - 70.0
    );
    for (v, anchor, x, y) in [
        (frame.x_min, "start", 60.0, frame.height - 22.0),
        (frame.x_max, "end", frame.width - 20.0, frame.height - 22.0),
    ] {
        let _ = writeln!(
            s,
            "<text x=\"{x:.0}\" y=\"{y:.0}\" text-anchor=\"{anchor}\">{v:.3}</text>"
        );
    }
    for (v, y) in [(frame.y_max, 40.0), (frame.y_min, frame.height - 42.0)] {
        let _ = writeln!(s, "<text x=\"4\" y=\"{y:.0}\">{v:.3}</text>");
    }
    s
}

/// Plane plot: trajectory polyline plus reference circles, equal aspect.
fn plane_plot(
    path: &Path,
    title: &str,
    points: Vec<(f64, f64)>,
    circles: &[(f64, f64, f64, &str)],
) -> io::Result<()> {
    let (mut x_min, mut x_max) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y_min, mut y_max) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut take = |x: f64, y: f64| {
        x_min = x_min.min(x);
        x_max = x_max.max(x);
        y_min = y_min.min(y);
        y_max = y_max.max(y);
    };
    for &(x, y) in &points {
        take(x, y);
    }
    for &(cx, cy, r, _) in circles {
        take(cx - r, cy - r);
        take(cx + r, cy + r);
    }
    // Equal aspect: expand the shorter span around its center.
    let span = (x_max - x_min).max(y_max - y_min) * 1.1;
    let (cx, cy) = ((x_min + x_max) / 2.0, (y_min + y_max) / 2.0);
    let frame = Frame {
        width: 620.0,
        height: 620.0,
        x_min: cx - span / 2.0,
        x_max: cx + span / 2.0,
        y_min: cy - span / 2.0,
        y_max: cy + span / 2.0,
    };

    let mut svg = header(frame.width, frame.height, title);
    svg.push_str(&axes(&frame));
    let scale = (frame.width - 80.0) / (frame.x_max - frame.x_min);
    for &(ccx, ccy, r, color) in circles {
        let _ = writeln!(
            svg,
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"{:.2}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" stroke-dasharray=\"6 3\"/>",
            frame.px(ccx),
            frame.py(ccy),
            r * scale
        );
    }
    svg.push_str(&polyline(&frame, points.iter().copied(), "#1f4e9c"));
    if let Some(&(x0, y0)) = points.first() {
        let _ = writeln!(
            svg,
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"4\" fill=\"#1f4e9c\"/>",
            frame.px(x0),
            frame.py(y0)
        );
    }
    svg.push_str("</svg>\n");
    fs::write(path, svg)
}

/// Time-series plot with optional horizontal reference lines.
fn series_plot(
    path: &Path,
    title: &str,
    t: &[f64],
    series: &[(&str, Vec<f64>, &str)],
    hlines: &[(f64, &str)],
) -> io::Result<()> {
    let x_min = *t.first().unwrap_or(&0.0);
    let x_max = *t.last().unwrap_or(&1.0);
    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    for (_, values, _) in series {
        for &v in values {
            y_min = y_min.min(v);
            y_max = y_max.max(v);
        }
    }
    for &(v, _) in hlines {
        y_min = y_min.min(v);
        y_max = y_max.max(v);
    }
    let pad = ((y_max - y_min) * 0.08).max(1e-9);
    let frame = Frame {
        width: 840.0,
        height: 420.0,
        x_min,
        x_max,
        y_min: y_min - pad,
        y_max: y_max + pad,
    };

    let mut svg = header(frame.width, frame.height, title);
    svg.push_str(&axes(&frame));
    for &(v, label) in hlines {
        let y = frame.py(v);
        let _ = write!(
            svg,
            "<line x1=\"60\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\" stroke=\"#888\" stroke-dasharray=\"4 4\"/>\n\
             <text x=\"{:.2}\" y=\"{:.2}\">{label}</text>\n",
            frame.width - 20.0,
            frame.width - 150.0,
            y - 4.0
        );
    }
    for (i, (label, values, color)) in series.iter().enumerate() {
        svg.push_str(&polyline(
            &frame,
            t.iter().copied().zip(values.iter().copied()),
            color,
        ));
        let _ = writeln!(
            svg,
            "<text x=\"70\" y=\"{:.0}\" fill=\"{color}\">{label}</text>",
            46.0 + 16.0 * i as f64
        );
    }
    svg.push_str("</svg>\n");
    fs::write(path, svg)
}

/// Emits the four standard figures from a trajectory CSV and its summary.
pub fn emit_plots(
    csv_path: &Path,
    summary: &SummaryDocument,
    out_dir: &Path,
) -> io::Result<Vec<PathBuf>> {
    let rows = read_rows(csv_path)?;
    let t: Vec<f64> = rows.iter().map(|r| r.t).collect();
    let map = &summary.map;
    let mut paths = Vec::new();

    let path = out_dir.join("trajectory_actual.svg");
    plane_plot(
        &path,
        "actual plane: trajectory, orbit and boundary",
        rows.iter().map(|r| (r.x, r.y)).collect(),
        &[
            (0.0, 0.0, 1.0, "#2e7d32"),
            (map.lambda, 0.0, map.mu, "#c62828"),
        ],
    )?;
    paths.push(path);

    let path = out_dir.join("trajectory_transformed.svg");
    plane_plot(
        &path,
        "transformed plane: trajectory and concentric images",
        rows.iter().map(|r| (r.rho_x, r.rho_y)).collect(),
        &[
            (0.0, 0.0, map.orbit_radius, "#2e7d32"),
            (0.0, 0.0, map.boundary_radius, "#c62828"),
        ],
    )?;
    paths.push(path);

    let path = out_dir.join("errors.svg");
    series_plot(
        &path,
        "position errors",
        &t,
        &[
            (
                "|e| actual",
                rows.iter().map(|r| r.e_abs).collect(),
                "#1f4e9c",
            ),
            (
                "|E| transformed",
                rows.iter().map(|r| r.e_t_abs).collect(),
                "#e65100",
            ),
        ],
        &[
            (map.delta_t, "barrier dT"),
            (summary.bounds.e_bound, "dT * Theta"),
        ],
    )?;
    paths.push(path);

    let path = out_dir.join("controls.svg");
    series_plot(
        &path,
        "turn-rate commands",
        &t,
        &[
            (
                "omega actual",
                rows.iter().map(|r| r.omega).collect(),
                "#1f4e9c",
            ),
            (
                "Omega transformed",
                rows.iter().map(|r| r.omega_t).collect(),
                "#e65100",
            ),
        ],
        &[],
    )?;
    paths.push(path);

    Ok(paths)
}
