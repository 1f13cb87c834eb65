use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use super::aggregate::AggregateResult;
use super::trial::TrialTrace;
use crate::error::{Error, Result};

pub const TRACE_HEADER: &str = "algorithm,seed,t,chosen_index,reward,inst_regret,cum_regret";
pub const AGGREGATE_HEADER: &str = "algorithm,t,mean_cum_regret,ci_half";

/// Decimal rendering rounded to 12 significant digits.
pub fn format_number(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return if v.is_nan() {
            "NaN".into()
        } else if v == 0.0 {
            "0".into()
        } else {
            format!("{v}")
        };
    }
    let rounded: f64 = format!("{v:.11e}").parse().expect("valid float");
    format!("{rounded}")
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// One row per round per trace.
pub fn write_traces_csv(traces: &[TrialTrace], path: &Path) -> Result<()> {
    let mut out = String::from(TRACE_HEADER);
    out.push('\n');
    for tr in traces {
        for r in &tr.records {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                tr.algorithm,
                tr.seed,
                r.t,
                r.chosen_index,
                format_number(r.reward),
                format_number(r.inst_regret),
                format_number(r.cum_regret)
            );
        }
    }
    write_file(path, &out)
}

/// One row per round per algorithm.
pub fn write_aggregate_csv(aggs: &[AggregateResult], path: &Path) -> Result<()> {
    let mut out = String::from(AGGREGATE_HEADER);
    out.push('\n');
    for a in aggs {
        for (t, (m, h)) in a.mean.iter().zip(&a.ci_half).enumerate() {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                a.algorithm,
                t + 1,
                format_number(*m),
                format_number(*h)
            );
        }
    }
    write_file(path, &out)
}

/// Final-round summary of one algorithm.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub algorithm: String,
    #[serde(rename = "T")]
    pub horizon: usize,
    pub trials: usize,
    pub final_mean: f64,
    pub final_ci_half: f64,
    pub config_echo: serde_json::Value,
}

pub fn summaries(aggs: &[AggregateResult], config_echo: &serde_json::Value) -> Vec<Summary> {
    aggs.iter()
        .map(|a| Summary {
            algorithm: a.algorithm.clone(),
            horizon: a.horizon(),
            trials: a.trials,
            final_mean: a.final_mean(),
            final_ci_half: a.final_ci_half(),
            config_echo: config_echo.clone(),
        })
        .collect()
}

pub fn write_summary_json(summaries: &[Summary], path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(summaries).expect("summary serializes");
    text.push('\n');
    write_file(path, &text)
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

/// Mean cumulative-regret curves with shaded confidence bands.
pub fn render_svg(aggs: &[AggregateResult]) -> String {
    let (w, h) = (800.0, 500.0);
    let (left, right, top, bottom) = (80.0, 30.0, 30.0, 60.0);
    let plot_w = w - left - right;
    let plot_h = h - top - bottom;
    let horizon = aggs.iter().map(|a| a.horizon()).max().unwrap_or(1).max(1);
    let y_max = aggs
        .iter()
        .flat_map(|a| a.mean.iter().zip(&a.ci_half).map(|(m, c)| m + c))
        .fold(0.0f64, f64::max);
    let y_max = if y_max > 0.0 { y_max * 1.05 } else { 1.0 };
    let sx = |t: f64| left + plot_w * (t - 1.0) / (horizon.max(2) - 1) as f64;
    let sy = |v: f64| top + plot_h * (1.0 - v / y_max);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{w}" height="{h}" fill="white"/>"#);

    for (n, a) in aggs.iter().enumerate() {
        let color = PALETTE[n % PALETTE.len()];
        let mut pts = String::new();
        for (t, (m, c)) in a.mean.iter().zip(&a.ci_half).enumerate() {
            let _ = write!(pts, "{:.2},{:.2} ", sx((t + 1) as f64), sy(m + c));
        }
        for (t, (m, c)) in a.mean.iter().zip(&a.ci_half).enumerate().rev() {
            let _ = write!(pts, "{:.2},{:.2} ", sx((t + 1) as f64), sy((m - c).max(0.0)));
        }
        let _ = writeln!(
            s,
            r#"<polygon class="band" data-algorithm="{}" points="{}" fill="{color}" fill-opacity="0.2" stroke="none"/>"#,
            a.algorithm,
            pts.trim_end()
        );
    }
    for (n, a) in aggs.iter().enumerate() {
        let color = PALETTE[n % PALETTE.len()];
        let mut pts = String::new();
        for (t, m) in a.mean.iter().enumerate() {
            let _ = write!(pts, "{:.2},{:.2} ", sx((t + 1) as f64), sy(*m));
        }
        let _ = writeln!(
            s,
            r#"<polyline class="curve" data-algorithm="{}" points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
            a.algorithm,
            pts.trim_end()
        );
    }

    // Axes and ticks.
    let (x0, y0) = (left, top + plot_h);
    let _ = writeln!(
        s,
        r#"<line x1="{x0}" y1="{y0}" x2="{}" y2="{y0}" stroke="black"/>"#,
        left + plot_w
    );
    let _ = writeln!(s, r#"<line x1="{x0}" y1="{top}" x2="{x0}" y2="{y0}" stroke="black"/>"#);
    for i in 0..=5 {
        let t = 1.0 + (horizon as f64 - 1.0) * i as f64 / 5.0;
        let x = sx(t);
        let _ = writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{y0}" x2="{x:.2}" y2="{}" stroke="black"/>"#,
            y0 + 5.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{x:.2}" y="{}" text-anchor="middle">{}</text>"#,
            y0 + 20.0,
            t.round()
        );
        let v = y_max * i as f64 / 5.0;
        let y = sy(v);
        let _ = writeln!(
            s,
            r#"<line x1="{}" y1="{y:.2}" x2="{x0}" y2="{y:.2}" stroke="black"/>"#,
            x0 - 5.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{:.2}" text-anchor="end">{v:.1}</text>"#,
            x0 - 8.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{}" text-anchor="middle">Round t</text>"#,
        left + plot_w / 2.0,
        h - 15.0
    );
    let _ = writeln!(
        s,
        r#"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">Cumulative regret</text>"#,
        top + plot_h / 2.0,
        top + plot_h / 2.0
    );

    // Legend.
    for (n, a) in aggs.iter().enumerate() {
        let color = PALETTE[n % PALETTE.len()];
        let y = top + 15.0 + 20.0 * n as f64;
        let lx = left + 20.0;
        let _ = writeln!(
            s,
            r#"<rect x="{lx}" y="{}" width="14" height="4" fill="{color}"/><text x="{}" y="{}">{}</text>"#,
            y - 4.0,
            lx + 20.0,
            y + 1.0,
            a.algorithm
        );
    }
    s.push_str("</svg>\n");
    s
}

pub fn write_svg(aggs: &[AggregateResult], path: &Path) -> Result<()> {
    write_file(path, &render_svg(aggs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(format_number(0.0), "0");
        assert_eq!(format_number(1.0), "1");
        assert_eq!(format_number(0.1 + 0.2), "0.3");
        assert_eq!(format_number(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_number(-123456.7890123456), "-123456.789012");
    }

    #[test]
    fn svg_structure() {
        let a = AggregateResult {
            algorithm: "a".into(),
            trials: 2,
            mean: vec![0.0, 1.0, 2.0],
            ci_half: vec![0.0, 0.5, 0.5],
        };
        let b = AggregateResult {
            algorithm: "b".into(),
            ..a.clone()
        };
        let svg = render_svg(&[a.clone(), b]);
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert_eq!(svg.matches(r#"class="band""#).count(), 2);
        assert!(svg.contains("Cumulative regret"));
        assert!(svg.contains("Round t"));
        assert_eq!(
            svg,
            render_svg(&[
                a.clone(),
                AggregateResult {
                    algorithm: "b".into(),
                    ..a
                }
            ])
        );
    }
}
