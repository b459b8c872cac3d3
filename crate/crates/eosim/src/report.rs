//! CSV, SVG and manifest output.
//!
//! Every file is written atomically (temp file + rename). CSV files carry a
//! header row and a fixed column order, with values printed in scientific
//! notation at fixed precision so identical runs produce byte-identical
//! files. SVG plots are rendered from the same data and never feed back into
//! the CSV content.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::Result;

/// Write `content` to `path` atomically.
pub fn write_atomic(path: &Path, content: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, content)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn fmt_value(v: f64) -> String {
    format!("{v:.12e}")
}

/// Render rows of numeric columns under a header into CSV text.
pub fn csv_text(header: &[&str], rows: &[Vec<f64>]) -> String {
    let mut s = String::new();
    s.push_str(&header.join(","));
    s.push('\n');
    for row in rows {
        debug_assert_eq!(row.len(), header.len());
        let cols: Vec<String> = row.iter().map(|v| fmt_value(*v)).collect();
        s.push_str(&cols.join(","));
        s.push('\n');
    }
    s
}

/// Write a numeric CSV file.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    write_atomic(path, &csv_text(header, rows))
}

/// SHA-256 hex digest of a string (used for the config hash).
pub fn sha256_hex(text: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(text.as_bytes());
    let out = hasher.finalize();
    out.iter().map(|b| format!("{b:02x}")).collect()
}

/// Run manifest: configuration hash, seed, crate version and output files.
/// Identical manifests imply byte-identical CSV outputs.
#[derive(serde::Serialize)]
pub struct Manifest {
    pub command: String,
    pub config_sha256: String,
    pub seed: u64,
    pub version: String,
    pub files: Vec<String>,
}

impl Manifest {
    pub fn new(command: &str, config_text: &str, seed: u64) -> Self {
        Self {
            command: command.to_string(),
            config_sha256: sha256_hex(config_text),
            seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            files: Vec::new(),
        }
    }

    pub fn record(&mut self, path: &Path) {
        if let Some(name) = path.file_name() {
            self.files.push(name.to_string_lossy().into_owned());
        }
    }

    pub fn write(&mut self, dir: &Path) -> Result<PathBuf> {
        self.files.sort();
        let path = dir.join("manifest.json");
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        write_atomic(&path, &text)?;
        Ok(path)
    }
}

/// One plotted series.
pub struct Series<'a> {
    pub label: &'a str,
    pub xs: &'a [f64],
    pub ys: &'a [f64],
}

const COLORS: [&str; 6] = ["#c0392b", "#2980b9", "#8e44ad", "#27ae60", "#7f8c8d", "#d35400"];

/// Render a set of line series into a standalone SVG plot.
pub fn svg_lines(
    title: &str,
    x_label: &str,
    y_label: &str,
    series: &[Series<'_>],
    log_x: bool,
) -> String {
    let (w, h) = (820.0, 520.0);
    let (ml, mr, mt, mb) = (80.0, 24.0, 42.0, 56.0);
    let (pw, ph) = (w - ml - mr, h - mt - mb);

    let tx = |x: f64| if log_x { x.max(1e-300).log10() } else { x };
    let mut xmin = f64::INFINITY;
    let mut xmax = f64::NEG_INFINITY;
    let mut ymin = f64::INFINITY;
    let mut ymax = f64::NEG_INFINITY;
    for s in series {
        for (&x, &y) in s.xs.iter().zip(s.ys) {
            if !x.is_finite() || !y.is_finite() {
                continue;
            }
            xmin = xmin.min(tx(x));
            xmax = xmax.max(tx(x));
            ymin = ymin.min(y);
            ymax = ymax.max(y);
        }
    }
    if !xmin.is_finite() || xmin == xmax {
        xmax = xmin + 1.0;
    }
    if !ymin.is_finite() || ymin == ymax {
        ymax = ymin + 1.0;
        ymin -= 1.0;
    }
    let ypad = 0.06 * (ymax - ymin);
    ymin -= ypad;
    ymax += ypad;

    let px = |x: f64| ml + (tx(x) - xmin) / (xmax - xmin) * pw;
    let py = |y: f64| mt + (1.0 - (y - ymin) / (ymax - ymin)) * ph;

    let mut svg = String::new();
    let _ = write!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" \
         viewBox=\"0 0 {w} {h}\">\n<rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n"
    );
    let _ = write!(
        svg,
        "<text x=\"{}\" y=\"24\" font-size=\"16\" text-anchor=\"middle\" \
         font-family=\"sans-serif\">{}</text>\n",
        w / 2.0,
        title
    );
    // frame
    let _ = write!(
        svg,
        "<rect x=\"{ml}\" y=\"{mt}\" width=\"{pw}\" height=\"{ph}\" fill=\"none\" \
         stroke=\"#333\" stroke-width=\"1\"/>\n"
    );
    // ticks
    for i in 0..=5 {
        let fx = xmin + (xmax - xmin) * i as f64 / 5.0;
        let x = ml + pw * i as f64 / 5.0;
        let label = if log_x { 10f64.powf(fx) } else { fx };
        let _ = write!(
            svg,
            "<line x1=\"{x}\" y1=\"{}\" x2=\"{x}\" y2=\"{}\" stroke=\"#333\"/>\n\
             <text x=\"{x}\" y=\"{}\" font-size=\"11\" text-anchor=\"middle\" \
             font-family=\"sans-serif\">{label:.3}</text>\n",
            mt + ph,
            mt + ph + 5.0,
            mt + ph + 20.0
        );
        let fy = ymin + (ymax - ymin) * i as f64 / 5.0;
        let y = mt + ph * (1.0 - i as f64 / 5.0);
        let _ = write!(
            svg,
            "<line x1=\"{}\" y1=\"{y}\" x2=\"{ml}\" y2=\"{y}\" stroke=\"#333\"/>\n\
             <text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"end\" \
             font-family=\"sans-serif\">{fy:.3}</text>\n",
            ml - 5.0,
            ml - 8.0,
            y + 4.0
        );
    }
    let _ = write!(
        svg,
        "<text x=\"{}\" y=\"{}\" font-size=\"13\" text-anchor=\"middle\" \
         font-family=\"sans-serif\">{}</text>\n",
        ml + pw / 2.0,
        h - 14.0,
        x_label
    );
    let _ = write!(
        svg,
        "<text x=\"18\" y=\"{}\" font-size=\"13\" text-anchor=\"middle\" \
         font-family=\"sans-serif\" transform=\"rotate(-90 18 {})\">{}</text>\n",
        mt + ph / 2.0,
        mt + ph / 2.0,
        y_label
    );
    // series
    for (i, s) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let mut points = String::new();
        for (&x, &y) in s.xs.iter().zip(s.ys) {
            if !x.is_finite() || !y.is_finite() {
                continue;
            }
            let _ = write!(points, "{:.2},{:.2} ", px(x), py(y));
        }
        let _ = write!(
            svg,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.6\"/>\n",
            points.trim_end()
        );
        let ly = mt + 16.0 + 16.0 * i as f64;
        let _ = write!(
            svg,
            "<line x1=\"{}\" y1=\"{ly}\" x2=\"{}\" y2=\"{ly}\" stroke=\"{color}\" \
             stroke-width=\"2\"/>\n<text x=\"{}\" y=\"{}\" font-size=\"12\" \
             font-family=\"sans-serif\">{}</text>\n",
            ml + 8.0,
            ml + 32.0,
            ml + 38.0,
            ly + 4.0,
            s.label
        );
    }
    svg.push_str("</svg>\n");
    svg
}

/// Render a Husimi grid as an SVG heat map.
pub fn svg_heatmap(
    title: &str,
    xs: &[f64],
    ys: &[f64],
    values: &[f64],
    nx: usize,
    ny: usize,
) -> String {
    let (w, h) = (560.0, 560.0);
    let (ml, mt) = (60.0, 48.0);
    let (pw, ph) = (w - ml - 24.0, h - mt - 48.0);
    let vmax = values.iter().cloned().fold(0.0f64, f64::max).max(1e-300);
    let cw = pw / nx as f64;
    let ch = ph / ny as f64;
    let mut svg = String::new();
    let _ = write!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" \
         viewBox=\"0 0 {w} {h}\">\n<rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"24\" font-size=\"15\" text-anchor=\"middle\" \
         font-family=\"sans-serif\">{title}</text>\n",
        w / 2.0
    );
    for i in 0..nx {
        for j in 0..ny {
            let v = values[i * ny + j] / vmax;
            if v < 1e-4 {
                continue;
            }
            let shade = (255.0 * (1.0 - v)).round() as u8;
            let x = ml + i as f64 * cw;
            let y = mt + (ny - 1 - j) as f64 * ch;
            let _ = write!(
                svg,
                "<rect x=\"{x:.2}\" y=\"{y:.2}\" width=\"{:.2}\" height=\"{:.2}\" \
                 fill=\"rgb(255,{shade},{shade})\"/>\n",
                cw + 0.5,
                ch + 0.5
            );
        }
    }
    let _ = write!(
        svg,
        "<rect x=\"{ml}\" y=\"{mt}\" width=\"{pw}\" height=\"{ph}\" fill=\"none\" \
         stroke=\"#333\"/>\n<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\" \
         font-family=\"sans-serif\">Re alpha: {:.2} .. {:.2}, Im alpha: {:.2} .. {:.2}</text>\n",
        w / 2.0,
        h - 16.0,
        xs.first().copied().unwrap_or(0.0),
        xs.last().copied().unwrap_or(0.0),
        ys.first().copied().unwrap_or(0.0),
        ys.last().copied().unwrap_or(0.0)
    );
    svg.push_str("</svg>\n");
    svg
}
