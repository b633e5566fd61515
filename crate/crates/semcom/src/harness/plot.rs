//! Hand-rolled SVG plots for experiment CSVs.
//!
//! Generic CSVs render as multi-series line charts (first column is the
//! x-axis). The Pareto CSV (`tau,r_plus,r_minus` header) renders as a
//! scatter of operating points with the frontier polyline. Output is a pure
//! function of the CSV bytes, so plots are byte-deterministic.

use std::path::{Path, PathBuf};

use crate::analysis::{pareto_frontier, ParetoPoint};
use crate::error::{Error, Result};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 440.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 24.0;
const MARGIN_TOP: f64 = 24.0;
const MARGIN_BOTTOM: f64 = 52.0;
const PALETTE: [&str; 5] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];

struct ParsedCsv {
    header: Vec<String>,
    /// Text columns (like a provider name) are not plottable; only fully
    /// numeric columns become series.
    rows: Vec<Vec<f64>>,
}

fn parse_csv(path: &Path) -> Result<ParsedCsv> {
    let body = std::fs::read_to_string(path).map_err(|_| Error::MissingFile(path.into()))?;
    let mut lines = body.lines();
    let header: Vec<String> = lines
        .next()
        .ok_or(Error::EmptyInput("csv file"))?
        .split(',')
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != header.len() {
            return Err(Error::Config(format!(
                "{}: row {} has {} cells for {} columns",
                path.display(),
                lineno + 2,
                cells.len(),
                header.len()
            )));
        }
        let row: Vec<f64> = cells
            .iter()
            .map(|c| {
                c.parse::<f64>().map_err(|_| {
                    Error::Config(format!(
                        "{}: row {} has non-numeric cell {c:?}",
                        path.display(),
                        lineno + 2
                    ))
                })
            })
            .collect::<Result<_>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::EmptyInput("csv has a header but no data rows"));
    }
    Ok(ParsedCsv { header, rows })
}

struct Axes {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

impl Axes {
    fn of(points: impl Iterator<Item = (f64, f64)>) -> Axes {
        let mut axes = Axes {
            x_min: f64::INFINITY,
            x_max: f64::NEG_INFINITY,
            y_min: f64::INFINITY,
            y_max: f64::NEG_INFINITY,
        };
        for (x, y) in points {
            axes.x_min = axes.x_min.min(x);
            axes.x_max = axes.x_max.max(x);
            axes.y_min = axes.y_min.min(y);
            axes.y_max = axes.y_max.max(y);
        }
        if axes.x_min == axes.x_max {
            axes.x_min -= 0.5;
            axes.x_max += 0.5;
        }
        if axes.y_min == axes.y_max {
            axes.y_min -= 0.5;
            axes.y_max += 0.5;
        }
        axes
    }

    fn px(&self, x: f64) -> f64 {
        MARGIN_LEFT + (x - self.x_min) / (self.x_max - self.x_min)
            * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - MARGIN_BOTTOM
            - (y - self.y_min) / (self.y_max - self.y_min)
                * (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM)
    }
}

fn svg_open(out: &mut String) {
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    out.push_str(&format!(
        "<rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n"
    ));
}

fn svg_axes(out: &mut String, axes: &Axes, x_label: &str, y_label: &str) {
    let x0 = MARGIN_LEFT;
    let x1 = WIDTH - MARGIN_RIGHT;
    let y0 = HEIGHT - MARGIN_BOTTOM;
    let y1 = MARGIN_TOP;
    out.push_str(&format!(
        "<line x1=\"{x0:.2}\" y1=\"{y0:.2}\" x2=\"{x1:.2}\" y2=\"{y0:.2}\" stroke=\"black\"/>\n"
    ));
    out.push_str(&format!(
        "<line x1=\"{x0:.2}\" y1=\"{y0:.2}\" x2=\"{x0:.2}\" y2=\"{y1:.2}\" stroke=\"black\"/>\n"
    ));
    for i in 0..=4 {
        let fx = axes.x_min + (axes.x_max - axes.x_min) * i as f64 / 4.0;
        let fy = axes.y_min + (axes.y_max - axes.y_min) * i as f64 / 4.0;
        let px = axes.px(fx);
        let py = axes.py(fy);
        out.push_str(&format!(
            "<line x1=\"{px:.2}\" y1=\"{y0:.2}\" x2=\"{px:.2}\" y2=\"{:.2}\" stroke=\"black\"/>\n",
            y0 + 5.0
        ));
        out.push_str(&format!(
            "<text x=\"{px:.2}\" y=\"{:.2}\" font-size=\"11\" text-anchor=\"middle\">{fx:.3}</text>\n",
            y0 + 18.0
        ));
        out.push_str(&format!(
            "<line x1=\"{:.2}\" y1=\"{py:.2}\" x2=\"{x0:.2}\" y2=\"{py:.2}\" stroke=\"black\"/>\n",
            x0 - 5.0
        ));
        out.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"11\" text-anchor=\"end\">{fy:.3}</text>\n",
            x0 - 8.0,
            py + 4.0
        ));
    }
    out.push_str(&format!(
        "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"13\" text-anchor=\"middle\">{x_label}</text>\n",
        (x0 + x1) / 2.0,
        HEIGHT - 12.0
    ));
    out.push_str(&format!(
        "<text x=\"16\" y=\"{:.2}\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 {:.2})\">{y_label}</text>\n",
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0
    ));
}

fn line_chart(parsed: &ParsedCsv) -> String {
    let x_col = 0;
    let series: Vec<usize> = (1..parsed.header.len()).collect();
    let axes = Axes::of(parsed.rows.iter().flat_map(|row| {
        series
            .iter()
            .map(move |&c| (row[x_col], row[c]))
            .collect::<Vec<_>>()
    }));
    let mut out = String::new();
    svg_open(&mut out);
    svg_axes(&mut out, &axes, &parsed.header[x_col], "value");
    for (si, &col) in series.iter().enumerate() {
        let color = PALETTE[si % PALETTE.len()];
        let points: Vec<String> = parsed
            .rows
            .iter()
            .map(|row| format!("{:.2},{:.2}", axes.px(row[x_col]), axes.py(row[col])))
            .collect();
        out.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
            points.join(" ")
        ));
        out.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" fill=\"{color}\">{}</text>\n",
            WIDTH - MARGIN_RIGHT - 150.0,
            MARGIN_TOP + 16.0 * (si as f64 + 1.0),
            parsed.header[col]
        ));
    }
    out.push_str("</svg>\n");
    out
}

fn pareto_chart(parsed: &ParsedCsv) -> String {
    let points: Vec<ParetoPoint> = parsed
        .rows
        .iter()
        .map(|row| ParetoPoint {
            tau: row[0],
            r_plus: row[1],
            r_minus: row[2],
        })
        .collect();
    let axes = Axes::of(points.iter().map(|p| (p.r_plus, p.r_minus)));
    let mut out = String::new();
    svg_open(&mut out);
    svg_axes(&mut out, &axes, "r_plus", "r_minus");
    for p in &points {
        out.push_str(&format!(
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2.5\" fill=\"{}\" fill-opacity=\"0.6\"/>\n",
            axes.px(p.r_plus),
            axes.py(p.r_minus),
            PALETTE[0]
        ));
    }
    let frontier = pareto_frontier(&points);
    let path: Vec<String> = frontier
        .iter()
        .map(|p| format!("{:.2},{:.2}", axes.px(p.r_plus), axes.py(p.r_minus)))
        .collect();
    out.push_str(&format!(
        "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"2\" points=\"{}\"/>\n",
        PALETTE[1],
        path.join(" ")
    ));
    out.push_str(&format!(
        "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" fill=\"{}\">frontier</text>\n",
        WIDTH - MARGIN_RIGHT - 150.0,
        MARGIN_TOP + 16.0,
        PALETTE[1]
    ));
    out.push_str("</svg>\n");
    out
}

/// Renders one CSV to SVG next to it (or at `out_path`).
pub fn emit_plot(csv_path: &Path, out_path: Option<&Path>) -> Result<PathBuf> {
    let parsed = parse_csv(csv_path)?;
    let svg = if parsed.header == ["tau", "r_plus", "r_minus"] {
        pareto_chart(&parsed)
    } else {
        line_chart(&parsed)
    };
    let out = match out_path {
        Some(p) => p.to_path_buf(),
        None => csv_path.with_extension("svg"),
    };
    std::fs::write(&out, svg)?;
    Ok(out)
}

/// Renders each CSV; returns the SVG paths.
pub fn emit_plots(csv_paths: &[PathBuf]) -> Result<Vec<PathBuf>> {
    csv_paths.iter().map(|p| emit_plot(p, None)).collect()
}
