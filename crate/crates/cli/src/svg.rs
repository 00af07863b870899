//! Minimal standalone semi-log SVG plot of a convergence report.

use std::fmt::Write;

use crate::report::ConvergenceReport;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 72.0;
const RIGHT: f64 = 24.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 52.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

struct Series<'a> {
    name: &'a str,
    color: &'a str,
    dash: &'a str,
    points: Vec<(f64, f64)>,
}

/// N on a linear axis, both error norms on a log10 axis.
pub fn render(report: &ConvergenceReport) -> String {
    let series = [
        Series {
            name: "L∞ error",
            color: "#1f77b4",
            dash: "",
            points: report
                .rows
                .iter()
                .filter_map(|r| r.linf_error.map(|e| (r.n as f64, e)))
                .collect(),
        },
        Series {
            name: "weighted L² error",
            color: "#d62728",
            dash: " stroke-dasharray=\"6 4\"",
            points: report
                .rows
                .iter()
                .filter_map(|r| r.l2w_error.map(|e| (r.n as f64, e)))
                .collect(),
        },
    ];
    let positive: Vec<f64> = series
        .iter()
        .flat_map(|s| s.points.iter().map(|p| p.1))
        .filter(|&e| e > 0.0)
        .collect();
    let (lo, hi) = if positive.is_empty() {
        (-16.0, 0.0)
    } else {
        let min = positive.iter().copied().fold(f64::INFINITY, f64::min);
        let max = positive.iter().copied().fold(0.0, f64::max);
        let lo = min.log10().floor();
        let hi = max.log10().ceil();
        (lo, if hi > lo { hi } else { lo + 1.0 })
    };
    let ns: Vec<f64> = report.rows.iter().map(|r| r.n as f64).collect();
    let nmin = ns.first().copied().unwrap_or(0.0);
    let nmax = ns.last().copied().unwrap_or(1.0).max(nmin + 1.0);

    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let sx = |n: f64| LEFT + (n - nmin) / (nmax - nmin) * pw;
    // Zero errors are pinned to the bottom of the axis.
    let sy = |e: f64| {
        let l = if e > 0.0 { e.log10().max(lo) } else { lo };
        TOP + (hi - l) / (hi - lo) * ph
    };

    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\" font-size=\"12\">"
    );
    let _ = writeln!(s, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");
    let title = format!(
        "{}: θ={}, ρ={}, μ={}, υ={}",
        report.label,
        report.theta,
        report.spec.rho(),
        report.spec.mu(),
        report.spec.upsilon()
    );
    let _ = writeln!(
        s,
        "<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">{}</text>",
        WIDTH / 2.0,
        escape(&title)
    );

    // Axes box, decade gridlines and labels.
    let _ = writeln!(
        s,
        "<rect x=\"{LEFT}\" y=\"{TOP}\" width=\"{pw}\" height=\"{ph}\" fill=\"none\" stroke=\"black\"/>"
    );
    let decades = (hi - lo) as usize;
    let stride = decades.div_ceil(10).max(1);
    for k in (0..=decades).step_by(stride) {
        let d = lo + k as f64;
        let y = TOP + (hi - d) / (hi - lo) * ph;
        let _ = writeln!(
            s,
            "<line x1=\"{LEFT}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\" stroke=\"#dddddd\"/>",
            LEFT + pw
        );
        let _ = writeln!(
            s,
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">1e{}</text>",
            LEFT - 6.0,
            y + 4.0,
            d as i64
        );
    }
    for &n in &ns {
        let x = sx(n);
        let _ = writeln!(
            s,
            "<line x1=\"{x:.2}\" y1=\"{:.2}\" x2=\"{x:.2}\" y2=\"{:.2}\" stroke=\"black\"/>",
            TOP + ph,
            TOP + ph + 5.0
        );
        let _ = writeln!(
            s,
            "<text x=\"{x:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>",
            TOP + ph + 18.0,
            n as usize
        );
    }
    let _ = writeln!(
        s,
        "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">N</text>",
        LEFT + pw / 2.0,
        HEIGHT - 12.0
    );
    let _ = writeln!(
        s,
        "<text x=\"16\" y=\"{:.2}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {:.2})\">error</text>",
        TOP + ph / 2.0,
        TOP + ph / 2.0
    );

    for (i, ser) in series.iter().enumerate() {
        if !ser.points.is_empty() {
            let pts: Vec<String> = ser
                .points
                .iter()
                .map(|&(n, e)| format!("{:.2},{:.2}", sx(n), sy(e)))
                .collect();
            let _ = writeln!(
                s,
                "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"{} points=\"{}\"/>",
                ser.color,
                ser.dash,
                pts.join(" ")
            );
            for &(n, e) in &ser.points {
                let _ = writeln!(
                    s,
                    "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2.5\" fill=\"{}\"/>",
                    sx(n),
                    sy(e),
                    ser.color
                );
            }
        }
        let ly = TOP + 16.0 + 18.0 * i as f64;
        let lx = LEFT + pw - 170.0;
        let _ = writeln!(
            s,
            "<line x1=\"{lx:.2}\" y1=\"{ly:.2}\" x2=\"{:.2}\" y2=\"{ly:.2}\" stroke=\"{}\" stroke-width=\"1.5\"{}/>",
            lx + 28.0,
            ser.color,
            ser.dash
        );
        let _ = writeln!(
            s,
            "<text x=\"{:.2}\" y=\"{:.2}\">{}</text>",
            lx + 34.0,
            ly + 4.0,
            escape(ser.name)
        );
    }
    s.push_str("</svg>\n");
    s
}
