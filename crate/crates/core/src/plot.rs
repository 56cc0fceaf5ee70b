//! Static SVG rendering of the CSV artifacts.
//!
//! Output is a pure function of the input table and the spec, so identical
//! inputs give byte-identical files.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{read_csv_table, write_atomic};
use crate::stability::INSTABILITY_THRESHOLD;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlotKind {
    #[default]
    Timeseries,
    Heatmap,
    Spectrum,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColorScale {
    #[default]
    Linear,
    Log,
}

/// What to draw. Unset columns fall back to the natural choice for `kind`:
/// `t` vs `intensity`, `pump` x `delta_c` colored by `abs_theta`, and
/// `re_omega` vs `im_omega`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PlotSpec {
    pub kind: PlotKind,
    pub input: Option<PathBuf>,
    pub x: Option<String>,
    /// One or more line columns (timeseries); the row axis (heatmap); Im part (spectrum).
    pub y: Vec<String>,
    /// Color column of a heatmap.
    pub z: Option<String>,
    /// Heatmap cells whose value in this column is `US` or `OS` are drawn
    /// grey instead of colored. Defaults to `label_m1`/`label_m2` when `z`
    /// is the matching growth-rate column.
    pub mask: Option<String>,
    pub x_label: Option<String>,
    pub y_label: Option<String>,
    pub title: Option<String>,
    pub scale: ColorScale,
    pub clamp: Option<[f64; 2]>,
    pub output: Option<PathBuf>,
}

impl PlotSpec {
    pub fn timeseries(input: impl Into<PathBuf>, y: &str) -> Self {
        Self {
            kind: PlotKind::Timeseries,
            input: Some(input.into()),
            y: vec![y.to_string()],
            ..Self::default()
        }
    }

    pub fn heatmap(input: impl Into<PathBuf>, z: &str) -> Self {
        Self {
            kind: PlotKind::Heatmap,
            input: Some(input.into()),
            z: Some(z.to_string()),
            ..Self::default()
        }
    }

    pub fn spectrum(input: impl Into<PathBuf>) -> Self {
        Self {
            kind: PlotKind::Spectrum,
            input: Some(input.into()),
            ..Self::default()
        }
    }

    fn x_column(&self) -> &str {
        self.x.as_deref().unwrap_or(match self.kind {
            PlotKind::Timeseries => "t",
            PlotKind::Heatmap => "pump",
            PlotKind::Spectrum => "re_omega",
        })
    }

    fn y_columns(&self) -> Vec<String> {
        if !self.y.is_empty() {
            return self.y.clone();
        }
        vec![match self.kind {
            PlotKind::Timeseries => "intensity",
            PlotKind::Heatmap => "delta_c",
            PlotKind::Spectrum => "im_omega",
        }
        .to_string()]
    }

    fn z_column(&self) -> &str {
        self.z.as_deref().unwrap_or("abs_theta")
    }

    fn mask_column(&self) -> Option<String> {
        if let Some(m) = &self.mask {
            return Some(m.clone());
        }
        match self.z_column() {
            "im_omega_crit_m1" => Some("label_m1".into()),
            "im_omega_crit_m2" => Some("label_m2".into()),
            _ => None,
        }
    }

    /// `output` if set, else the input path with an `.svg` extension.
    pub fn output_path(&self) -> Result<PathBuf> {
        if let Some(o) = &self.output {
            return Ok(o.clone());
        }
        Ok(self.input_path()?.with_extension("svg"))
    }

    fn input_path(&self) -> Result<&Path> {
        self.input
            .as_deref()
            .ok_or_else(|| Error::invalid("render.input", "an input CSV is required"))
    }

    fn validate(&self) -> Result<()> {
        if let Some([lo, hi]) = self.clamp {
            if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(Error::invalid("render.clamp", "must be [low, high] with low < high"));
            }
            if self.scale == ColorScale::Log && lo <= 0.0 {
                return Err(Error::invalid("render.clamp", "log scale needs a positive lower bound"));
            }
        }
        if self.kind == PlotKind::Heatmap && self.y_columns().len() != 1 {
            return Err(Error::invalid("render.y", "a heatmap takes exactly one row column"));
        }
        Ok(())
    }
}

/// Parsed CSV with column lookup by name.
struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
    path: PathBuf,
}

impl Table {
    fn load(path: &Path) -> Result<Self> {
        let (header, rows) = read_csv_table(path)?;
        if rows.is_empty() {
            return Err(Error::Config(format!("{} has no data rows", path.display())));
        }
        Ok(Self {
            header,
            rows,
            path: path.to_path_buf(),
        })
    }

    fn index(&self, name: &str) -> Result<usize> {
        self.header.iter().position(|h| h == name).ok_or_else(|| {
            Error::Config(format!(
                "column {name:?} not found in {} (columns: {})",
                self.path.display(),
                self.header.join(", ")
            ))
        })
    }

    /// Numeric column; empty cells become NaN.
    fn numbers(&self, name: &str) -> Result<Vec<f64>> {
        let i = self.index(name)?;
        self.rows
            .iter()
            .enumerate()
            .map(|(r, row)| {
                let cell = row.get(i).map(String::as_str).unwrap_or("");
                if cell.is_empty() {
                    return Ok(f64::NAN);
                }
                cell.parse::<f64>().map_err(|_| {
                    Error::Config(format!(
                        "{}: row {}, column {name:?}: {cell:?} is not a number",
                        self.path.display(),
                        r + 1
                    ))
                })
            })
            .collect()
    }

    fn strings(&self, name: &str) -> Result<Vec<String>> {
        let i = self.index(name)?;
        Ok(self
            .rows
            .iter()
            .map(|row| row.get(i).cloned().unwrap_or_default())
            .collect())
    }
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 130.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const PALETTE: [&str; 6] = ["#1f4e9c", "#c0392b", "#111111", "#2e8b57", "#8e44ad", "#d68910"];
/// Cap on polyline vertices; longer series are reduced to per-pixel min/max.
const MAX_LINE_POINTS: usize = 4000;
const US_GREY: &str = "#d9d9d9";
const OS_GREY: &str = "#8c8c8c";

/// Renders `spec` and writes the SVG; returns the output path.
pub fn render(spec: &PlotSpec) -> Result<PathBuf> {
    let svg = render_to_string(spec)?;
    let out = spec.output_path()?;
    write_atomic(&out, svg.as_bytes())?;
    Ok(out)
}

pub fn render_to_string(spec: &PlotSpec) -> Result<String> {
    spec.validate()?;
    let table = Table::load(spec.input_path()?)?;
    match spec.kind {
        PlotKind::Timeseries => timeseries(spec, &table),
        PlotKind::Heatmap => heatmap(spec, &table),
        PlotKind::Spectrum => spectrum(spec, &table),
    }
}

#[derive(Clone, Copy)]
struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn new(xs: &[f64], ys: &[f64]) -> Self {
        let (x0, x1) = padded_range(xs, 0.0);
        let (y0, y1) = padded_range(ys, 0.05);
        Self { x0, x1, y0, y1 }
    }

    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - BOTTOM - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - TOP - BOTTOM)
    }
}

fn finite_range(v: &[f64]) -> Option<(f64, f64)> {
    let mut it = v.iter().copied().filter(|x| x.is_finite());
    let first = it.next()?;
    Some(it.fold((first, first), |(a, b), x| (a.min(x), b.max(x))))
}

fn padded_range(v: &[f64], pad: f64) -> (f64, f64) {
    let (lo, hi) = finite_range(v).unwrap_or((0.0, 1.0));
    if hi > lo {
        let d = (hi - lo) * pad;
        (lo - d, hi + d)
    } else {
        let d = if lo == 0.0 { 1.0 } else { lo.abs() * 0.1 };
        (lo - d, hi + d)
    }
}

fn fmt_num(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if !(1e-3..1e5).contains(&a) {
        format!("{v:.1e}")
    } else {
        let s = format!("{v:.4}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        s.to_string()
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Roughly five round-numbered ticks spanning `[lo, hi]`.
fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = hi - lo;
    if !(span > 0.0) || !span.is_finite() {
        return vec![lo];
    }
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| span / s <= 6.0)
        .unwrap_or(10.0 * mag);
    let mut t = (lo / step).ceil() * step;
    let mut out = Vec::new();
    while t <= hi + step * 1e-9 {
        out.push(if t.abs() < step * 1e-9 { 0.0 } else { t });
        t += step;
    }
    out
}

fn open_svg(svg: &mut String, title: &str) {
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    if !title.is_empty() {
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
            (LEFT + WIDTH - RIGHT) / 2.0,
            xml_escape(title)
        );
    }
}

fn axes(svg: &mut String, f: &Frame, x_label: &str, y_label: &str) {
    let (l, r, t, b) = (LEFT, WIDTH - RIGHT, TOP, HEIGHT - BOTTOM);
    let _ = writeln!(
        svg,
        r#"<rect x="{l}" y="{t}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        r - l,
        b - t
    );
    for x in ticks(f.x0, f.x1) {
        let px = f.px(x);
        let _ = writeln!(
            svg,
            r#"<line x1="{px:.2}" y1="{b}" x2="{px:.2}" y2="{}" stroke="black"/><text x="{px:.2}" y="{}" text-anchor="middle">{}</text>"#,
            b + 5.0,
            b + 18.0,
            fmt_num(x)
        );
    }
    for y in ticks(f.y0, f.y1) {
        let py = f.py(y);
        let _ = writeln!(
            svg,
            r#"<line x1="{}" y1="{py:.2}" x2="{l}" y2="{py:.2}" stroke="black"/><text x="{}" y="{:.2}" text-anchor="end">{}</text>"#,
            l - 5.0,
            l - 8.0,
            py + 4.0,
            fmt_num(y)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        (l + r) / 2.0,
        HEIGHT - 15.0,
        xml_escape(x_label)
    );
    let _ = writeln!(
        svg,
        r#"<text x="20" y="{0}" text-anchor="middle" transform="rotate(-90 20 {0})">{1}</text>"#,
        (t + b) / 2.0,
        xml_escape(y_label)
    );
}

/// Keeps first/min/max/last per horizontal bucket so fast oscillations keep
/// their envelope.
fn decimate(xs: &[f64], ys: &[f64]) -> Vec<(f64, f64)> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| x.is_finite() && y.is_finite())
        .map(|(&x, &y)| (x, y))
        .collect();
    if pts.len() <= MAX_LINE_POINTS {
        return pts;
    }
    let buckets = MAX_LINE_POINTS / 4;
    let per = pts.len().div_ceil(buckets);
    let mut out = Vec::with_capacity(MAX_LINE_POINTS);
    for chunk in pts.chunks(per) {
        let (mut imin, mut imax) = (0, 0);
        for (i, p) in chunk.iter().enumerate() {
            if p.1 < chunk[imin].1 {
                imin = i;
            }
            if p.1 > chunk[imax].1 {
                imax = i;
            }
        }
        let mut idx = vec![0, imin, imax, chunk.len() - 1];
        idx.sort_unstable();
        idx.dedup();
        out.extend(idx.into_iter().map(|i| chunk[i]));
    }
    out
}

fn timeseries(spec: &PlotSpec, table: &Table) -> Result<String> {
    let x_name = spec.x_column();
    let xs = table.numbers(x_name)?;
    let y_names = spec.y_columns();
    let series: Vec<Vec<f64>> = y_names
        .iter()
        .map(|n| table.numbers(n))
        .collect::<Result<_>>()?;
    let all_y: Vec<f64> = series.iter().flatten().copied().collect();
    let frame = Frame::new(&xs, &all_y);

    let mut svg = String::new();
    open_svg(&mut svg, spec.title.as_deref().unwrap_or(""));
    axes(
        &mut svg,
        &frame,
        spec.x_label.as_deref().unwrap_or(x_name),
        spec.y_label.as_deref().unwrap_or(&y_names.join(", ")),
    );
    for (k, (name, ys)) in y_names.iter().zip(&series).enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let mut points = String::new();
        for (x, y) in decimate(&xs, ys) {
            let _ = write!(points, "{:.2},{:.2} ", frame.px(x), frame.py(y));
        }
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1" points="{}"/>"#,
            points.trim_end()
        );
        let ly = TOP + 10.0 + 18.0 * k as f64;
        let lx = WIDTH - RIGHT + 10.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{}" y="{}">{}</text>"#,
            lx + 20.0,
            lx + 25.0,
            ly + 4.0,
            xml_escape(name)
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn spectrum(spec: &PlotSpec, table: &Table) -> Result<String> {
    let x_name = spec.x_column();
    let y_names = spec.y_columns();
    let y_name = &y_names[0];
    let xs = table.numbers(x_name)?;
    let ys = table.numbers(y_name)?;
    let mut guide_ys = ys.clone();
    guide_ys.push(INSTABILITY_THRESHOLD);
    let frame = Frame {
        x0: padded_range(&xs, 0.05).0,
        x1: padded_range(&xs, 0.05).1,
        ..Frame::new(&xs, &guide_ys)
    };

    let mut svg = String::new();
    open_svg(&mut svg, spec.title.as_deref().unwrap_or(""));
    axes(
        &mut svg,
        &frame,
        spec.x_label.as_deref().unwrap_or("Re omega"),
        spec.y_label.as_deref().unwrap_or("Im omega"),
    );
    let gy = frame.py(INSTABILITY_THRESHOLD);
    let _ = writeln!(
        svg,
        r##"<line x1="{LEFT}" y1="{gy:.2}" x2="{}" y2="{gy:.2}" stroke="#c0392b" stroke-dasharray="6,4"/><text x="{}" y="{:.2}" fill="#c0392b">Im = 1e-4</text>"##,
        WIDTH - RIGHT,
        WIDTH - RIGHT + 6.0,
        gy + 4.0
    );
    // Unstable modes last so they stay visible on top of the stable cluster.
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by_key(|&i| ys[i] > INSTABILITY_THRESHOLD);
    for (x, y) in order.into_iter().map(|i| (xs[i], ys[i])) {
        if x.is_finite() && y.is_finite() {
            let color = if y > INSTABILITY_THRESHOLD { "#c0392b" } else { "#1f4e9c" };
            let _ = writeln!(
                svg,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#,
                frame.px(x),
                frame.py(y)
            );
        }
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Sequential blue-to-yellow ramp, `u` in [0, 1].
fn ramp(u: f64) -> String {
    const STOPS: [(f64, [f64; 3]); 5] = [
        (0.0, [68.0, 1.0, 84.0]),
        (0.25, [59.0, 82.0, 139.0]),
        (0.5, [33.0, 145.0, 140.0]),
        (0.75, [94.0, 201.0, 98.0]),
        (1.0, [253.0, 231.0, 37.0]),
    ];
    let u = u.clamp(0.0, 1.0);
    let k = STOPS.iter().position(|s| s.0 >= u).unwrap_or(4).max(1);
    let (u0, c0) = STOPS[k - 1];
    let (u1, c1) = STOPS[k];
    let w = (u - u0) / (u1 - u0);
    let c: Vec<u8> = (0..3).map(|i| (c0[i] + w * (c1[i] - c0[i])).round() as u8).collect();
    format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2])
}

fn heatmap(spec: &PlotSpec, table: &Table) -> Result<String> {
    let x_name = spec.x_column();
    let y_name = spec.y_columns().remove(0);
    let z_name = spec.z_column();
    let xs = table.numbers(x_name)?;
    let ys = table.numbers(&y_name)?;
    let zs = table.numbers(z_name)?;
    let mask = match spec.mask_column() {
        Some(m) => Some(table.strings(&m)?),
        None => None,
    };

    let key = |v: f64| v.to_bits();
    let mut x_vals: Vec<f64> = xs.iter().copied().filter(|v| v.is_finite()).collect();
    let mut y_vals: Vec<f64> = ys.iter().copied().filter(|v| v.is_finite()).collect();
    for v in [&mut x_vals, &mut y_vals] {
        v.sort_by(f64::total_cmp);
        v.dedup();
    }
    let x_idx: BTreeMap<u64, usize> = x_vals.iter().enumerate().map(|(i, &v)| (key(v), i)).collect();
    let y_idx: BTreeMap<u64, usize> = y_vals.iter().enumerate().map(|(i, &v)| (key(v), i)).collect();

    let transform = |z: f64| match spec.scale {
        ColorScale::Linear => z,
        ColorScale::Log => {
            if z > 0.0 {
                z.log10()
            } else {
                f64::NAN
            }
        }
    };
    let colored: Vec<f64> = zs
        .iter()
        .enumerate()
        .filter(|(i, _)| !is_masked(mask.as_deref(), *i))
        .map(|(_, &z)| z)
        .collect();
    let (z_lo, z_hi) = match spec.clamp {
        Some([lo, hi]) => (transform(lo), transform(hi)),
        None => {
            let t: Vec<f64> = colored.iter().map(|&z| transform(z)).collect();
            finite_range(&t).unwrap_or((0.0, 1.0))
        }
    };
    let z_span = if z_hi > z_lo { z_hi - z_lo } else { 1.0 };

    // Cell edges halfway between neighbouring grid values.
    let edges = |vals: &[f64]| -> Vec<f64> {
        let n = vals.len();
        if n == 1 {
            return vec![vals[0] - 0.5, vals[0] + 0.5];
        }
        let mut e = Vec::with_capacity(n + 1);
        e.push(vals[0] - (vals[1] - vals[0]) / 2.0);
        for w in vals.windows(2) {
            e.push((w[0] + w[1]) / 2.0);
        }
        e.push(vals[n - 1] + (vals[n - 1] - vals[n - 2]) / 2.0);
        e
    };
    let xe = edges(&x_vals);
    let ye = edges(&y_vals);
    let frame = Frame {
        x0: xe[0],
        x1: xe[xe.len() - 1],
        y0: ye[0],
        y1: ye[ye.len() - 1],
    };

    let mut svg = String::new();
    open_svg(&mut svg, spec.title.as_deref().unwrap_or(""));
    for (i, (&x, &y)) in xs.iter().zip(&ys).enumerate() {
        let (Some(&ix), Some(&iy)) = (x_idx.get(&key(x)), y_idx.get(&key(y))) else {
            continue;
        };
        let fill = match mask.as_ref().map(|m| m[i].as_str()) {
            Some("US") => US_GREY.to_string(),
            Some("OS") => OS_GREY.to_string(),
            _ => {
                let t = transform(zs[i]);
                if t.is_finite() {
                    ramp((t - z_lo) / z_span)
                } else {
                    "white".to_string()
                }
            }
        };
        let (px0, px1) = (frame.px(xe[ix]), frame.px(xe[ix + 1]));
        let (py0, py1) = (frame.py(ye[iy + 1]), frame.py(ye[iy]));
        let _ = writeln!(
            svg,
            r#"<rect x="{px0:.2}" y="{py0:.2}" width="{:.2}" height="{:.2}" fill="{fill}" shape-rendering="crispEdges"/>"#,
            px1 - px0,
            py1 - py0
        );
    }
    axes(
        &mut svg,
        &frame,
        spec.x_label.as_deref().unwrap_or(x_name),
        spec.y_label.as_deref().unwrap_or(&y_name),
    );
    colorbar(&mut svg, z_lo, z_hi, spec.scale, z_name, mask.is_some());
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn is_masked(mask: Option<&[String]>, i: usize) -> bool {
    mask.is_some_and(|m| m[i] == "US" || m[i] == "OS")
}

fn colorbar(svg: &mut String, lo: f64, hi: f64, scale: ColorScale, name: &str, legend: bool) {
    let x = WIDTH - RIGHT + 20.0;
    let (top, bottom) = (TOP, HEIGHT - BOTTOM - if legend { 60.0 } else { 0.0 });
    let steps = 64;
    let h = (bottom - top) / steps as f64;
    for k in 0..steps {
        let u = 1.0 - (k as f64 + 0.5) / steps as f64;
        let _ = writeln!(
            svg,
            r#"<rect x="{x}" y="{:.2}" width="16" height="{:.2}" fill="{}"/>"#,
            top + k as f64 * h,
            h + 0.5,
            ramp(u)
        );
    }
    let label = |v: f64| match scale {
        ColorScale::Linear => fmt_num(v),
        ColorScale::Log => format!("1e{}", fmt_num(v)),
    };
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}">{}</text><text x="{}" y="{}">{}</text>"#,
        x + 20.0,
        top + 10.0,
        label(hi),
        x + 20.0,
        bottom,
        label(lo)
    );
    let _ = writeln!(
        svg,
        r#"<text x="{x}" y="{}" font-size="11">{}</text>"#,
        top - 8.0,
        xml_escape(name)
    );
    if legend {
        for (k, (fill, text)) in [(US_GREY, "US"), (OS_GREY, "OS")].iter().enumerate() {
            let y = bottom + 20.0 + 20.0 * k as f64;
            let _ = writeln!(
                svg,
                r#"<rect x="{x}" y="{y}" width="16" height="12" fill="{fill}"/><text x="{}" y="{}">{text}</text>"#,
                x + 20.0,
                y + 10.0
            );
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn csv(dir: &Path, name: &str, text: &str) -> PathBuf {
        let p = dir.join(name);
        std::fs::write(&p, text).unwrap();
        p
    }

    #[test]
    fn ticks_are_round() {
        assert_eq!(ticks(0.0, 1.0), vec![0.0, 0.2, 0.4, 0.6000000000000001, 0.8, 1.0]);
        assert_eq!(ticks(-3200.0, -300.0).len(), 6);
    }

    #[test]
    fn timeseries_renders_polyline() {
        let d = tempfile::tempdir().unwrap();
        let p = csv(d.path(), "q.csv", "t,intensity\n0,0\n1,1\n2,0.5\n");
        let svg = render_to_string(&PlotSpec::timeseries(&p, "intensity")).unwrap();
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("<polyline"));
        assert!(svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn heatmap_grey_codes_labels() {
        let d = tempfile::tempdir().unwrap();
        let p = csv(
            d.path(),
            "g.csv",
            "delta_c,pump,im_omega_crit_m1,label_m1\n-1,0,0,US\n-1,1,0,OS\n0,0,0.5,UNSTABLE\n0,1,1,UNSTABLE\n",
        );
        let svg = render_to_string(&PlotSpec::heatmap(&p, "im_omega_crit_m1")).unwrap();
        assert!(svg.contains(US_GREY) && svg.contains(OS_GREY));
        assert_eq!(svg.matches("<rect x=").count() - 64 - 2 - 1, 4);
    }

    #[test]
    fn missing_column_and_empty_file_are_config_errors() {
        let d = tempfile::tempdir().unwrap();
        let p = csv(d.path(), "q.csv", "t,intensity\n0,1\n");
        let err = render_to_string(&PlotSpec::timeseries(&p, "nope")).unwrap_err();
        assert!(err.is_usage_error() && err.to_string().contains("nope"), "{err}");
        let e = csv(d.path(), "e.csv", "");
        assert!(render_to_string(&PlotSpec::timeseries(&e, "intensity")).unwrap_err().is_usage_error());
        let h = csv(d.path(), "h.csv", "t,intensity\n");
        assert!(render_to_string(&PlotSpec::timeseries(&h, "intensity")).unwrap_err().is_usage_error());
        let missing = d.path().join("absent.csv");
        assert!(render_to_string(&PlotSpec::spectrum(&missing)).unwrap_err().is_usage_error());
    }

    #[test]
    fn decimation_keeps_extremes() {
        let xs: Vec<f64> = (0..100_000).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| (x * 0.7).sin()).collect();
        let d = decimate(&xs, &ys);
        assert!(d.len() <= MAX_LINE_POINTS);
        let max = d.iter().map(|p| p.1).fold(f64::MIN, f64::max);
        assert!(max > 0.999);
    }

    #[test]
    fn output_is_deterministic() {
        let d = tempfile::tempdir().unwrap();
        let p = csv(d.path(), "s.csv", "re_omega,im_omega\n1,0\n-1,0.002\n");
        let spec = PlotSpec::spectrum(&p);
        assert_eq!(render_to_string(&spec).unwrap(), render_to_string(&spec).unwrap());
        assert_eq!(spec.output_path().unwrap(), d.path().join("s.svg"));
    }
}
