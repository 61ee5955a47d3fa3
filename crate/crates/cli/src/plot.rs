//! Minimal self-contained SVG line charts. No rendering dependency: the
//! output is a fixed-size SVG with axes, tick labels, a legend and one
//! polyline per series, plus a CSV dump of the plotted data next to it.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::Context;

/// Plot kinds exposed by the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    MseCurve,
    PairCorrelation,
    Spectrum,
    RednessTrace,
}

impl FromStr for PlotKind {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> anyhow::Result<PlotKind> {
        match s {
            "mse-curve" => Ok(PlotKind::MseCurve),
            "pair-correlation" => Ok(PlotKind::PairCorrelation),
            "spectrum" => Ok(PlotKind::Spectrum),
            "redness-trace" => Ok(PlotKind::RednessTrace),
            other => anyhow::bail!(
                "unknown plot kind `{other}` (expected mse-curve, pair-correlation, spectrum or redness-trace)"
            ),
        }
    }
}

impl PlotKind {
    pub fn chart_spec(&self) -> ChartSpec {
        match self {
            PlotKind::MseCurve => ChartSpec {
                title: "Mean reconstruction MSE vs sampling rate",
                x_label: "m (samples)",
                y_label: "mean MSE",
                log_y: true,
            },
            PlotKind::PairCorrelation => ChartSpec {
                title: "Pair correlation",
                x_label: "geodesic radius ρ",
                y_label: "R(ρ)",
                log_y: false,
            },
            PlotKind::Spectrum => ChartSpec {
                title: "Pattern power spectrum",
                x_label: "eigenvalue μ",
                y_label: "p",
                log_y: false,
            },
            PlotKind::RednessTrace => ChartSpec {
                title: "Redness along the relocation iterations",
                x_label: "iteration",
                y_label: "redness",
                log_y: false,
            },
        }
    }
}

pub struct ChartSpec {
    pub title: &'static str,
    pub x_label: &'static str,
    pub y_label: &'static str,
    pub log_y: bool,
}

/// One named polyline.
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

const WIDTH: f64 = 820.0;
const HEIGHT: f64 = 520.0;
const MARGIN_L: f64 = 80.0;
const MARGIN_R: f64 = 160.0;
const MARGIN_T: f64 = 50.0;
const MARGIN_B: f64 = 60.0;
const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

/// Renders the chart to `svg_path` and dumps the data as
/// `series,x,y` CSV next to it. Returns the CSV path.
pub fn render_chart(spec: &ChartSpec, series: &[Series], svg_path: &Path) -> anyhow::Result<PathBuf> {
    if series.iter().all(|s| s.points.is_empty()) {
        anyhow::bail!("nothing to plot: all series are empty");
    }
    let transform = |v: f64| if spec.log_y { v.max(1e-300).log10() } else { v };

    let mut x_min = f64::INFINITY;
    let mut x_max = f64::NEG_INFINITY;
    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    for s in series {
        for &(x, y) in &s.points {
            x_min = x_min.min(x);
            x_max = x_max.max(x);
            y_min = y_min.min(transform(y));
            y_max = y_max.max(transform(y));
        }
    }
    if x_max == x_min {
        x_max = x_min + 1.0;
    }
    if y_max == y_min {
        y_max = y_min + 1.0;
    }
    let plot_w = WIDTH - MARGIN_L - MARGIN_R;
    let plot_h = HEIGHT - MARGIN_T - MARGIN_B;
    let sx = |x: f64| MARGIN_L + (x - x_min) / (x_max - x_min) * plot_w;
    let sy = |y: f64| MARGIN_T + plot_h - (transform(y) - y_min) / (y_max - y_min) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="28" font-family="sans-serif" font-size="16" text-anchor="middle">{}</text>"#,
        MARGIN_L + plot_w / 2.0,
        spec.title
    );

    // axes
    let x0 = MARGIN_L;
    let y0 = MARGIN_T + plot_h;
    let _ = writeln!(
        svg,
        r#"<line x1="{x0:.1}" y1="{y0:.1}" x2="{:.1}" y2="{y0:.1}" stroke="black"/>"#,
        MARGIN_L + plot_w
    );
    let _ = writeln!(
        svg,
        r#"<line x1="{x0:.1}" y1="{y0:.1}" x2="{x0:.1}" y2="{MARGIN_T:.1}" stroke="black"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="13" text-anchor="middle">{}</text>"#,
        MARGIN_L + plot_w / 2.0,
        HEIGHT - 15.0,
        spec.x_label
    );
    let _ = writeln!(
        svg,
        r#"<text x="20" y="{:.1}" font-family="sans-serif" font-size="13" text-anchor="middle" transform="rotate(-90 20 {:.1})">{}</text>"#,
        MARGIN_T + plot_h / 2.0,
        MARGIN_T + plot_h / 2.0,
        spec.y_label
    );

    // ticks
    for i in 0..=5 {
        let fx = x_min + (x_max - x_min) * i as f64 / 5.0;
        let px = sx(fx);
        let _ = writeln!(
            svg,
            r#"<line x1="{px:.1}" y1="{y0:.1}" x2="{px:.1}" y2="{:.1}" stroke="black"/>"#,
            y0 + 5.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{px:.1}" y="{:.1}" font-family="sans-serif" font-size="11" text-anchor="middle">{}</text>"#,
            y0 + 20.0,
            format_tick(fx)
        );
        let fy = y_min + (y_max - y_min) * i as f64 / 5.0;
        let py = MARGIN_T + plot_h - (fy - y_min) / (y_max - y_min) * plot_h;
        let label = if spec.log_y {
            format!("1e{}", format_tick(fy))
        } else {
            format_tick(fy)
        };
        let _ = writeln!(
            svg,
            r#"<line x1="{:.1}" y1="{py:.1}" x2="{x0:.1}" y2="{py:.1}" stroke="black"/>"#,
            x0 - 5.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="11" text-anchor="end">{label}</text>"#,
            x0 - 8.0,
            py + 4.0
        );
    }

    // data
    for (i, s) in series.iter().enumerate() {
        if s.points.is_empty() {
            continue;
        }
        let color = PALETTE[i % PALETTE.len()];
        let path: Vec<String> = s
            .points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.8" points="{}"/>"#,
            path.join(" ")
        );
        for &(x, y) in &s.points {
            let _ = writeln!(
                svg,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#,
                sx(x),
                sy(y)
            );
        }
        // legend
        let ly = MARGIN_T + 20.0 * i as f64;
        let lx = WIDTH - MARGIN_R + 15.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="2"/>"#,
            lx + 22.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="12">{}</text>"#,
            lx + 28.0,
            ly + 4.0,
            s.label
        );
    }
    let _ = writeln!(svg, "</svg>");
    std::fs::write(svg_path, svg)
        .with_context(|| format!("writing {}", svg_path.display()))?;

    let csv_path = svg_path.with_extension("csv");
    let mut csv = String::from("series,x,y\n");
    for s in series {
        for &(x, y) in &s.points {
            let _ = writeln!(csv, "{},{},{}", s.label, x, y);
        }
    }
    std::fs::write(&csv_path, csv)
        .with_context(|| format!("writing {}", csv_path.display()))?;
    Ok(csv_path)
}

fn format_tick(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let a = v.abs();
    if a >= 100.0 {
        format!("{v:.0}")
    } else if a >= 1.0 {
        format!("{v:.1}")
    } else {
        format!("{v:.3}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_kind_is_an_error() {
        assert!("".parse::<PlotKind>().is_err());
        assert!("histogram".parse::<PlotKind>().is_err());
        assert_eq!("mse-curve".parse::<PlotKind>().unwrap(), PlotKind::MseCurve);
    }

    #[test]
    fn chart_renders_polylines_and_csv() {
        let dir = std::env::temp_dir().join("gbn-plot-test");
        std::fs::create_dir_all(&dir).unwrap();
        let svg_path = dir.join("chart.svg");
        let series = vec![
            Series {
                label: "a".into(),
                points: vec![(1.0, 0.1), (2.0, 0.01)],
            },
            Series {
                label: "b".into(),
                points: vec![(1.0, 0.2), (2.0, 0.05)],
            },
        ];
        let csv = render_chart(&PlotKind::MseCurve.chart_spec(), &series, &svg_path).unwrap();
        let svg = std::fs::read_to_string(&svg_path).unwrap();
        assert!(svg.starts_with("<svg"));
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("legend") || svg.contains(">a<"));
        let data = std::fs::read_to_string(csv).unwrap();
        assert!(data.starts_with("series,x,y\n"));
        assert_eq!(data.lines().count(), 5);
    }

    #[test]
    fn empty_series_rejected() {
        let dir = std::env::temp_dir();
        let err = render_chart(
            &PlotKind::Spectrum.chart_spec(),
            &[Series {
                label: "x".into(),
                points: vec![],
            }],
            &dir.join("never.svg"),
        );
        assert!(err.is_err());
    }
}
