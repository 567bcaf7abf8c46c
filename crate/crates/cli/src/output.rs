//! Artifact writers: CSV with a traced metadata header, JSON with embedded
//! metadata, and plain-text SVG histograms with fixed float formatting so
//! reruns are byte-identical.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use serde::Serialize;

use crate::config::VERSION;

pub struct OutputContext {
    pub dir: PathBuf,
    pub config_hash: String,
}

impl OutputContext {
    pub fn new(dir: &str, config_hash: String) -> std::io::Result<Self> {
        let dir = PathBuf::from(dir);
        fs::create_dir_all(&dir)?;
        Ok(Self { dir, config_hash })
    }

    fn meta_comment(&self) -> String {
        format!("# config_hash={} version={}\n", self.config_hash, VERSION)
    }

    pub fn write_csv(
        &self,
        name: &str,
        columns: &[&str],
        rows: impl Iterator<Item = Vec<f64>>,
    ) -> std::io::Result<PathBuf> {
        let path = self.dir.join(name);
        let mut f = fs::File::create(&path)?;
        f.write_all(self.meta_comment().as_bytes())?;
        writeln!(f, "{}", columns.join(","))?;
        for row in rows {
            let line: Vec<String> = row.iter().map(|v| format_float(*v)).collect();
            writeln!(f, "{}", line.join(","))?;
        }
        Ok(path)
    }

    pub fn write_json<T: Serialize>(&self, name: &str, payload: &T) -> std::io::Result<PathBuf> {
        #[derive(Serialize)]
        struct Wrapped<'a, T> {
            config_hash: &'a str,
            version: &'a str,
            #[serde(flatten)]
            payload: &'a T,
        }
        let path = self.dir.join(name);
        let body = serde_json::to_string_pretty(&Wrapped {
            config_hash: &self.config_hash,
            version: VERSION,
            payload,
        })
        .expect("payload serializes");
        fs::write(&path, body + "\n")?;
        Ok(path)
    }

    pub fn write_svg(&self, name: &str, svg: &str) -> std::io::Result<PathBuf> {
        let path = self.dir.join(name);
        let mut f = fs::File::create(&path)?;
        f.write_all(
            format!(
                "<!-- config_hash={} version={} -->\n",
                self.config_hash, VERSION
            )
            .as_bytes(),
        )?;
        f.write_all(svg.as_bytes())?;
        Ok(path)
    }
}

/// Shortest-lossless float formatting (Rust's default `Display` for f64 is
/// round-trip exact and platform independent).
pub fn format_float(v: f64) -> String {
    if v == v.trunc() && v.abs() < 1e15 {
        format!("{v:.1}")
    } else {
        format!("{v}")
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Histogram {
    pub bin_edges: Vec<f64>,
    pub counts: Vec<usize>,
    pub binning: String,
}

/// Freedman-Diaconis binning with a fixed fallback of 40 bins when the
/// interquartile range degenerates or the rule explodes.
pub fn histogram(values: &[f64]) -> Histogram {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len();
    let (lo, hi) = (sorted[0], sorted[n - 1]);
    let q = |p: f64| -> f64 {
        let idx = ((p * n as f64).ceil() as usize).clamp(1, n);
        sorted[idx - 1]
    };
    let iqr = q(0.75) - q(0.25);
    let width = 2.0 * iqr / (n as f64).cbrt();
    let range = (hi - lo).max(f64::MIN_POSITIVE);
    let (bins, binning) = if width > 0.0 && (range / width) <= 1000.0 && (range / width) >= 1.0 {
        (
            (range / width).ceil() as usize,
            "freedman-diaconis".to_string(),
        )
    } else {
        (40, "fixed-40".to_string())
    };
    let mut counts = vec![0usize; bins];
    for &v in values {
        let mut idx = ((v - lo) / range * bins as f64) as usize;
        if idx >= bins {
            idx = bins - 1;
        }
        counts[idx] += 1;
    }
    let bin_edges = (0..=bins)
        .map(|i| lo + range * i as f64 / bins as f64)
        .collect();
    Histogram {
        bin_edges,
        counts,
        binning,
    }
}

/// Minimal bar-chart SVG. Pure text generation, fixed decimals, optional
/// vertical marker lines (value, label).
pub fn histogram_svg(h: &Histogram, title: &str, markers: &[(f64, &str)]) -> String {
    let w = 640.0;
    let height = 400.0;
    let margin = 50.0;
    let plot_w = w - 2.0 * margin;
    let plot_h = height - 2.0 * margin;
    let max_count = *h.counts.iter().max().unwrap_or(&1) as f64;
    let lo = h.bin_edges[0];
    let hi = *h.bin_edges.last().unwrap();
    let range = (hi - lo).max(f64::MIN_POSITIVE);
    let x_of = |v: f64| margin + (v - lo) / range * plot_w;

    let mut s = String::new();
    s.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w:.0}\" height=\"{height:.0}\" viewBox=\"0 0 {w:.0} {height:.0}\">\n"
    ));
    s.push_str(&format!(
        "  <text x=\"{:.1}\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
        w / 2.0,
        title
    ));
    s.push_str(&format!(
        "  <line x1=\"{margin:.1}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"black\"/>\n",
        height - margin,
        w - margin,
        height - margin
    ));
    s.push_str(&format!(
        "  <line x1=\"{margin:.1}\" y1=\"{margin:.1}\" x2=\"{margin:.1}\" y2=\"{:.1}\" stroke=\"black\"/>\n",
        height - margin
    ));
    for (i, &count) in h.counts.iter().enumerate() {
        let x0 = x_of(h.bin_edges[i]);
        let x1 = x_of(h.bin_edges[i + 1]);
        let bar_h = count as f64 / max_count * plot_h;
        s.push_str(&format!(
            "  <rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"steelblue\" stroke=\"white\" stroke-width=\"0.5\"/>\n",
            x0,
            height - margin - bar_h,
            (x1 - x0).max(0.5),
            bar_h
        ));
    }
    for (value, label) in markers {
        let x = x_of(*value);
        s.push_str(&format!(
            "  <line x1=\"{x:.2}\" y1=\"{margin:.1}\" x2=\"{x:.2}\" y2=\"{:.1}\" stroke=\"crimson\" stroke-dasharray=\"4 3\"/>\n",
            height - margin
        ));
        s.push_str(&format!(
            "  <text x=\"{:.2}\" y=\"{:.1}\" font-size=\"11\" fill=\"crimson\">{}</text>\n",
            x + 3.0,
            margin + 12.0,
            label
        ));
    }
    // axis labels at the ends
    s.push_str(&format!(
        "  <text x=\"{margin:.1}\" y=\"{:.1}\" font-size=\"11\" text-anchor=\"middle\">{}</text>\n",
        height - margin + 16.0,
        format_float(lo)
    ));
    s.push_str(&format!(
        "  <text x=\"{:.1}\" y=\"{:.1}\" font-size=\"11\" text-anchor=\"middle\">{}</text>\n",
        w - margin,
        height - margin + 16.0,
        format_float(hi)
    ));
    s.push_str("</svg>\n");
    s
}

/// Nested level-set ellipses as one SVG: each entry is a labeled polyline,
/// scaled into a fixed viewport.
pub fn ellipses_svg(title: &str, curves: &[(String, Vec<(f64, f64)>)]) -> String {
    let size = 520.0;
    let margin = 40.0;
    let max_abs = curves
        .iter()
        .flat_map(|(_, pts)| pts.iter())
        .fold(0.0f64, |m, (x, y)| m.max(x.abs()).max(y.abs()))
        .max(f64::MIN_POSITIVE);
    let scale = (size / 2.0 - margin) / max_abs;
    let map = |v: f64| size / 2.0 + v * scale;
    let mut s = String::new();
    s.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{size:.0}\" height=\"{size:.0}\" viewBox=\"0 0 {size:.0} {size:.0}\">\n"
    ));
    s.push_str(&format!(
        "  <text x=\"{:.1}\" y=\"20\" text-anchor=\"middle\" font-size=\"13\">{}</text>\n",
        size / 2.0,
        title
    ));
    s.push_str(&format!(
        "  <line x1=\"0\" y1=\"{0:.1}\" x2=\"{size:.0}\" y2=\"{0:.1}\" stroke=\"#ccc\"/>\n",
        size / 2.0
    ));
    s.push_str(&format!(
        "  <line x1=\"{0:.1}\" y1=\"0\" x2=\"{0:.1}\" y2=\"{size:.0}\" stroke=\"#ccc\"/>\n",
        size / 2.0
    ));
    for (i, (label, pts)) in curves.iter().enumerate() {
        let last = i + 1 == curves.len();
        let color = if last { "saddlebrown" } else { "steelblue" };
        let path: Vec<String> = pts
            .iter()
            .enumerate()
            .map(|(j, (x, y))| {
                format!("{}{:.3},{:.3}", if j == 0 { "M" } else { "L" }, map(*x), map(-*y))
            })
            .collect();
        s.push_str(&format!(
            "  <path d=\"{} Z\" fill=\"none\" stroke=\"{color}\" stroke-width=\"{}\"/>\n",
            path.join(" "),
            if last { 2.0 } else { 1.0 }
        ));
        if let Some((x, y)) = pts.first() {
            s.push_str(&format!(
                "  <text x=\"{:.1}\" y=\"{:.1}\" font-size=\"10\" fill=\"{color}\">{}</text>\n",
                map(*x) + 2.0,
                map(-*y),
                label
            ));
        }
    }
    s.push_str("</svg>\n");
    s
}

/// Polyline of the level set `{z : z^T S z = 1}` of a 2x2 symmetric
/// positive definite matrix, as `points` samples.
pub fn ellipse_polyline(s: &nalgebra::Matrix2<f64>, points: usize) -> Vec<(f64, f64)> {
    // z^T S z = 1 along direction u: z = u / sqrt(u^T S u)
    (0..=points)
        .map(|i| {
            let t = 2.0 * std::f64::consts::PI * i as f64 / points as f64;
            let u = nalgebra::Vector2::new(t.cos(), t.sin());
            let q = (u.transpose() * s * u)[(0, 0)];
            let r = 1.0 / q.max(f64::MIN_POSITIVE).sqrt();
            (u[0] * r, u[1] * r)
        })
        .collect()
}
