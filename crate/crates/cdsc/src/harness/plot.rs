//! Deterministic SVG rendering of experiment CSVs. No timestamps, no
//! randomness, sorted series: the same CSV always yields the same bytes.

use std::collections::BTreeMap;

use super::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    /// Logical error rate against L, log-scale rate axis, one series per
    /// (code, p).
    Subthreshold,
    /// Logical error rate against p, one series per L.
    Threshold,
    /// Phase-scan rate curves: one series per (family point, L).
    Phase,
    /// Histogram of rates over logarithmically spaced bins.
    Histogram,
}

impl PlotKind {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "subthreshold" => Some(PlotKind::Subthreshold),
            "threshold" => Some(PlotKind::Threshold),
            "phase" => Some(PlotKind::Phase),
            "histogram" => Some(PlotKind::Histogram),
            _ => None,
        }
    }
}

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 560.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 170.0;
const MARGIN_T: f64 = 30.0;
const MARGIN_B: f64 = 60.0;

const SERIES_COLORS: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
];

struct Csv {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

fn parse_csv(text: &str) -> Result<Csv, HarnessError> {
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| HarnessError::Config("empty CSV: no header row".into()))?
        .split(',')
        .map(|s| s.trim().to_string())
        .collect();
    let rows = lines
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.split(',').map(|s| s.trim().to_string()).collect())
        .collect();
    Ok(Csv { header, rows })
}

impl Csv {
    fn column(&self, name: &str) -> Result<usize, HarnessError> {
        self.header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| HarnessError::Config(format!("CSV lacks a '{name}' column")))
    }

    fn value(&self, row: &[String], name: &str) -> Result<f64, HarnessError> {
        let idx = self.column(name)?;
        row.get(idx)
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| HarnessError::Config(format!("bad '{name}' value in CSV row")))
    }
}

fn fmt(v: f64) -> String {
    format!("{v:.3}")
}

/// Maps data to pixel coordinates, optionally through log10.
struct Axis {
    min: f64,
    max: f64,
    log: bool,
    pixel_min: f64,
    pixel_max: f64,
}

impl Axis {
    fn new(values: impl Iterator<Item = f64>, log: bool, pixel_min: f64, pixel_max: f64) -> Axis {
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for v in values {
            if log && v <= 0.0 {
                continue;
            }
            let t = if log { v.log10() } else { v };
            min = min.min(t);
            max = max.max(t);
        }
        if !min.is_finite() || !max.is_finite() {
            min = 0.0;
            max = 1.0;
        }
        if (max - min).abs() < 1e-12 {
            min -= 0.5;
            max += 0.5;
        }
        let pad = 0.05 * (max - min);
        Axis {
            min: min - pad,
            max: max + pad,
            log,
            pixel_min,
            pixel_max,
        }
    }

    fn project(&self, v: f64) -> Option<f64> {
        let t = if self.log {
            if v <= 0.0 {
                return None;
            }
            v.log10()
        } else {
            v
        };
        let frac = (t - self.min) / (self.max - self.min);
        Some(self.pixel_min + frac * (self.pixel_max - self.pixel_min))
    }

    fn ticks(&self) -> Vec<(f64, String)> {
        let mut out = Vec::new();
        if self.log {
            let lo = self.min.floor() as i64;
            let hi = self.max.ceil() as i64;
            for e in lo..=hi {
                let t = e as f64;
                if t >= self.min && t <= self.max {
                    out.push((10f64.powi(e as i32), format!("1e{e}")));
                }
            }
        } else {
            let span = self.max - self.min;
            let step = nice_step(span / 5.0);
            let mut v = (self.min / step).ceil() * step;
            while v <= self.max + 1e-12 {
                out.push((v, format!("{}", (v * 1e6).round() / 1e6)));
                v += step;
            }
        }
        out
    }
}

fn nice_step(raw: f64) -> f64 {
    let mag = 10f64.powf(raw.abs().max(1e-12).log10().floor());
    let norm = raw / mag;
    let factor = if norm < 1.5 {
        1.0
    } else if norm < 3.5 {
        2.0
    } else if norm < 7.5 {
        5.0
    } else {
        10.0
    };
    factor * mag
}

struct Series {
    label: String,
    points: Vec<(f64, f64)>,
}

fn render(
    series: &[Series],
    x_label: &str,
    y_label: &str,
    log_x: bool,
    log_y: bool,
    warning: Option<&str>,
) -> String {
    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    if let Some(w) = warning {
        svg.push_str(&format!("<!-- warning: {w} -->\n"));
    }
    let x_axis = Axis::new(
        series.iter().flat_map(|s| s.points.iter().map(|p| p.0)),
        log_x,
        MARGIN_L,
        WIDTH - MARGIN_R,
    );
    let y_axis = Axis::new(
        series.iter().flat_map(|s| s.points.iter().map(|p| p.1)),
        log_y,
        HEIGHT - MARGIN_B,
        MARGIN_T,
    );
    // Frame and ticks.
    svg.push_str(&format!(
        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n",
        fmt(MARGIN_L),
        fmt(MARGIN_T),
        fmt(WIDTH - MARGIN_L - MARGIN_R),
        fmt(HEIGHT - MARGIN_T - MARGIN_B)
    ));
    for (v, label) in x_axis.ticks() {
        if let Some(x) = x_axis.project(v) {
            svg.push_str(&format!(
                "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"black\"/>\n",
                fmt(x),
                fmt(HEIGHT - MARGIN_B),
                fmt(HEIGHT - MARGIN_B + 6.0)
            ));
            svg.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\">{label}</text>\n",
                fmt(x),
                fmt(HEIGHT - MARGIN_B + 20.0)
            ));
        }
    }
    for (v, label) in y_axis.ticks() {
        if let Some(y) = y_axis.project(v) {
            svg.push_str(&format!(
                "<line x1=\"{1}\" y1=\"{0}\" x2=\"{2}\" y2=\"{0}\" stroke=\"black\"/>\n",
                fmt(y),
                fmt(MARGIN_L - 6.0),
                fmt(MARGIN_L)
            ));
            svg.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"end\">{label}</text>\n",
                fmt(MARGIN_L - 10.0),
                fmt(y + 4.0)
            ));
        }
    }
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-size=\"14\" text-anchor=\"middle\">{x_label}</text>\n",
        fmt((MARGIN_L + WIDTH - MARGIN_R) / 2.0),
        fmt(HEIGHT - 15.0)
    ));
    svg.push_str(&format!(
        "<text x=\"18\" y=\"{}\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 18 {})\">{y_label}</text>\n",
        fmt((MARGIN_T + HEIGHT - MARGIN_B) / 2.0),
        fmt((MARGIN_T + HEIGHT - MARGIN_B) / 2.0)
    ));
    // Series.
    for (i, s) in series.iter().enumerate() {
        let color = SERIES_COLORS[i % SERIES_COLORS.len()];
        let mut path = String::new();
        for &(x, y) in &s.points {
            if let (Some(px), Some(py)) = (x_axis.project(x), y_axis.project(y)) {
                if path.is_empty() {
                    path.push_str(&format!("M {} {}", fmt(px), fmt(py)));
                } else {
                    path.push_str(&format!(" L {} {}", fmt(px), fmt(py)));
                }
                svg.push_str(&format!(
                    "<circle cx=\"{}\" cy=\"{}\" r=\"3\" fill=\"{color}\"/>\n",
                    fmt(px),
                    fmt(py)
                ));
            }
        }
        if s.points.len() > 1 && !path.is_empty() {
            svg.push_str(&format!(
                "<path d=\"{path}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>\n"
            ));
        }
        let ly = MARGIN_T + 18.0 * i as f64 + 12.0;
        svg.push_str(&format!(
            "<rect x=\"{}\" y=\"{}\" width=\"12\" height=\"12\" fill=\"{color}\"/>\n",
            fmt(WIDTH - MARGIN_R + 10.0),
            fmt(ly - 10.0)
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"12\">{}</text>\n",
            fmt(WIDTH - MARGIN_R + 28.0),
            fmt(ly),
            s.label
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

/// Renders an experiment CSV as a deterministic SVG plot.
pub fn emit_plot(csv_text: &str, kind: PlotKind) -> Result<String, HarnessError> {
    let csv = parse_csv(csv_text)?;
    if csv.rows.is_empty() {
        return Ok(render(&[], "", "", false, false, Some("no data rows in CSV")));
    }
    match kind {
        PlotKind::Subthreshold => {
            let mut groups: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
            for row in &csv.rows {
                let code = row[csv.column("code")?].clone();
                let p = csv.value(row, "p")?;
                let l = csv.value(row, "l")?;
                let rate = csv.value(row, "p_logical")?;
                groups
                    .entry(format!("{code} p={p}"))
                    .or_default()
                    .push((l, rate));
            }
            let series = to_series(groups);
            Ok(render(&series, "L", "logical error rate", false, true, None))
        }
        PlotKind::Threshold => {
            let mut groups: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
            for row in &csv.rows {
                let l = csv.value(row, "l")?;
                let p = csv.value(row, "p")?;
                let rate = csv.value(row, "p_logical")?;
                groups.entry(format!("L={l}")).or_default().push((p, rate));
            }
            let series = to_series(groups);
            Ok(render(&series, "p", "logical error rate", false, false, None))
        }
        PlotKind::Phase => {
            let mut groups: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
            for row in &csv.rows {
                let pi_xz = row[csv.column("pi_xz")?].clone();
                let pi_yz = row[csv.column("pi_yz")?].clone();
                let l = csv.value(row, "l")?;
                let p = csv.value(row, "p")?;
                let rate = csv.value(row, "p_logical")?;
                groups
                    .entry(format!("({pi_xz},{pi_yz}) L={l}"))
                    .or_default()
                    .push((p, rate));
            }
            let series = to_series(groups);
            Ok(render(&series, "p", "logical error rate", false, false, None))
        }
        PlotKind::Histogram => {
            let mut rates: Vec<f64> = Vec::new();
            for row in &csv.rows {
                rates.push(csv.value(row, "p_logical")?);
            }
            rates.retain(|&r| r > 0.0);
            if rates.is_empty() {
                return Ok(render(&[], "", "", false, false, Some("no positive rates")));
            }
            // Log-spaced bins, 30 per sweep.
            let lo = rates.iter().cloned().fold(f64::INFINITY, f64::min).log10();
            let hi = rates.iter().cloned().fold(f64::NEG_INFINITY, f64::max).log10() + 1e-9;
            let bins = 30usize;
            let mut counts = vec![0usize; bins];
            for &r in &rates {
                let t = ((r.log10() - lo) / (hi - lo) * bins as f64) as usize;
                counts[t.min(bins - 1)] += 1;
            }
            let points: Vec<(f64, f64)> = counts
                .iter()
                .enumerate()
                .map(|(i, &c)| {
                    let mid = lo + (i as f64 + 0.5) / bins as f64 * (hi - lo);
                    (10f64.powf(mid), c as f64)
                })
                .collect();
            let series = vec![Series {
                label: "count".into(),
                points,
            }];
            Ok(render(&series, "logical error rate", "count", true, false, None))
        }
    }
}

fn to_series(groups: BTreeMap<String, Vec<(f64, f64)>>) -> Vec<Series> {
    groups
        .into_iter()
        .map(|(label, mut points)| {
            points.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
            Series { label, points }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_csv_gives_identical_svg() {
        let csv = "schema,kind,code,pi_xz,pi_yz,l,p,eta,decoder,chi,trials,seed,p_logical,std_error,converged_fraction\n\
                   1,subthreshold,xy,,,9,0.2,100,tn,20,100,1,0.21,0.004,1\n\
                   1,subthreshold,xy,,,13,0.2,100,tn,20,100,1,0.17,0.004,1\n";
        let a = emit_plot(csv, PlotKind::Subthreshold).unwrap();
        let b = emit_plot(csv, PlotKind::Subthreshold).unwrap();
        assert_eq!(a, b);
        assert!(a.contains("<svg"));
        assert!(a.contains("xy p=0.2"));
    }

    #[test]
    fn empty_csv_renders_empty_axes_with_warning() {
        let csv = "schema,kind,code,pi_xz,pi_yz,l,p,eta,decoder,chi,trials,seed,p_logical,std_error,converged_fraction\n";
        let svg = emit_plot(csv, PlotKind::Threshold).unwrap();
        assert!(svg.contains("warning"));
        assert!(svg.contains("</svg>"));
    }

    #[test]
    fn histogram_handles_spread_rates() {
        let mut csv = String::from("schema,pattern,p,eta,p_logical\n");
        for i in 1..=50 {
            csv.push_str(&format!("1,IIIIIIIII,0.01,500,{}\n", 1e-6 * (i as f64) * (i as f64)));
        }
        let svg = emit_plot(&csv, PlotKind::Histogram).unwrap();
        assert!(svg.contains("count"));
    }
}
