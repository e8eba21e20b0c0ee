//! Minimal static line charts.

use std::fmt::Write;

use super::sweep::SweepResult;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 190.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const COLORS: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

struct Axis {
    lo: f64,
    hi: f64,
    log: bool,
    /// Position used for `x = 0` on a log axis.
    zero_at: f64,
}

impl Axis {
    fn map(&self, v: f64) -> f64 {
        let t = if self.log {
            if v <= 0.0 {
                self.zero_at
            } else {
                v.log10()
            }
        } else {
            v
        };
        if self.hi == self.lo {
            0.5
        } else {
            (t - self.lo) / (self.hi - self.lo)
        }
    }
}

fn x_axis(xs: &[f64], log: bool) -> Axis {
    let positive: Vec<f64> = xs.iter().copied().filter(|v| *v > 0.0).collect();
    if log && !positive.is_empty() {
        let lo = positive
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
            .log10();
        let hi = positive
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
            .log10();
        let has_zero = xs.iter().any(|v| *v <= 0.0);
        let zero_at = lo - 1.0;
        Axis {
            lo: if has_zero { zero_at } else { lo },
            hi,
            log: true,
            zero_at,
        }
    } else {
        let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Axis {
            lo,
            hi,
            log: false,
            zero_at: 0.0,
        }
    }
}

fn fmt_tick(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.abs() >= 1e4 || v.abs() < 1e-3 {
        format!("{v:.1e}")
    } else {
        let s = format!("{v:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Render every quantity of `result` as a line with error bars.
pub fn render_svg(title: &str, result: &SweepResult, log_x: bool) -> String {
    let finite: Vec<_> = result
        .rows
        .iter()
        .filter(|r| r.value.is_finite() && r.sweep_variable.is_finite())
        .collect();
    let xs: Vec<f64> = finite.iter().map(|r| r.sweep_variable).collect();
    let mut ylo = f64::INFINITY;
    let mut yhi = f64::NEG_INFINITY;
    for r in &finite {
        let se = r.std_err.filter(|s| s.is_finite()).unwrap_or(0.0);
        ylo = ylo.min(r.value - se);
        yhi = yhi.max(r.value + se);
    }
    if !ylo.is_finite() {
        ylo = 0.0;
        yhi = 1.0;
    }
    let pad = if yhi > ylo {
        0.05 * (yhi - ylo)
    } else {
        0.5 * ylo.abs().max(1.0)
    };
    let yaxis = Axis {
        lo: ylo - pad,
        hi: yhi + pad,
        log: false,
        zero_at: 0.0,
    };
    let xaxis = if xs.is_empty() {
        Axis {
            lo: 0.0,
            hi: 1.0,
            log: false,
            zero_at: 0.0,
        }
    } else {
        x_axis(&xs, log_x)
    };

    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let px = |v: f64| LEFT + pw * xaxis.map(v);
    let py = |v: f64| TOP + ph * (1.0 - yaxis.map(v));

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        LEFT + pw / 2.0,
        escape(title)
    );
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT:.2}" y="{TOP:.2}" width="{pw:.2}" height="{ph:.2}" fill="none" stroke="black"/>"#
    );

    // y ticks
    for k in 0..=4 {
        let v = yaxis.lo + (yaxis.hi - yaxis.lo) * k as f64 / 4.0;
        let y = py(v);
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{LEFT:.2}" y2="{y:.2}" stroke="black"/>"#,
            LEFT - 5.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 8.0,
            y + 4.0,
            fmt_tick(v)
        );
    }
    // x ticks
    let xticks: Vec<f64> = if xaxis.log {
        let first = (xaxis.zero_at + 1.0).ceil() as i32;
        let mut t: Vec<f64> = (first..=xaxis.hi.floor() as i32)
            .map(|e| 10f64.powi(e))
            .collect();
        if xaxis.lo <= xaxis.zero_at {
            t.insert(0, 0.0);
        }
        t
    } else {
        (0..=4)
            .map(|k| xaxis.lo + (xaxis.hi - xaxis.lo) * k as f64 / 4.0)
            .collect()
    };
    let base = TOP + ph;
    for v in xticks {
        let x = px(v);
        let _ = writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{base:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"#,
            base + 5.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            base + 20.0,
            fmt_tick(v)
        );
    }
    let xlabel = if xaxis.log {
        format!("{} (log scale)", result.sweep_label)
    } else {
        result.sweep_label.clone()
    };
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 15.0,
        escape(&xlabel)
    );

    for (k, q) in result.quantities().into_iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let pts: Vec<_> = result
            .series(q)
            .filter(|r| r.value.is_finite() && r.sweep_variable.is_finite())
            .collect();
        if pts.len() > 1 {
            let path: Vec<String> = pts
                .iter()
                .map(|r| format!("{:.2},{:.2}", px(r.sweep_variable), py(r.value)))
                .collect();
            let _ = writeln!(
                s,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                path.join(" ")
            );
        }
        for r in &pts {
            let (x, y) = (px(r.sweep_variable), py(r.value));
            if let Some(se) = r.std_err.filter(|v| v.is_finite() && *v > 0.0) {
                let _ = writeln!(
                    s,
                    r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="{color}"/>"#,
                    py(r.value - se),
                    py(r.value + se)
                );
            }
            let _ = writeln!(
                s,
                r#"<circle cx="{x:.2}" cy="{y:.2}" r="2.5" fill="{color}"/>"#
            );
        }
        let ly = TOP + 10.0 + 18.0 * k as f64;
        let lx = WIDTH - RIGHT + 15.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/>"#,
            lx + 20.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 26.0,
            ly + 4.0,
            q.as_str()
        );
    }
    s.push_str("</svg>\n");
    s
}
