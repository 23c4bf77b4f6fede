//! Minimal SVG line chart: Monte Carlo estimates with ±2 standard error bars
//! against the analytic curve `1 − Φ(γ/√2)`.

use std::fmt::Write;

use starlab::special::normal_sf;

const W: f64 = 640.0;
const H: f64 = 420.0;
const LEFT: f64 = 64.0;
const RIGHT: f64 = 24.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 56.0;

pub struct Point {
    pub gamma: f64,
    pub estimate: f64,
    pub stderr: f64,
}

fn target(gamma: f64) -> f64 {
    normal_sf(gamma / std::f64::consts::SQRT_2)
}

pub fn curve(title: &str, ylabel: &str, points: &[Point]) -> String {
    let (mut x0, mut x1) = points
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.gamma), b.max(p.gamma)));
    if !x0.is_finite() {
        (x0, x1) = (-1.0, 1.0);
    }
    let pad = ((x1 - x0) * 0.1).max(0.5);
    let (x0, x1) = (x0 - pad, x1 + pad);
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * (W - LEFT - RIGHT);
    let sy = |y: f64| TOP + (1.0 - y.clamp(0.0, 1.0)) * (H - TOP - BOTTOM);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#, W / 2.0, escape(title));

    // Axes and ticks.
    let (bx, by) = (sy(0.0), sx(x0));
    let _ = writeln!(s, r#"<line x1="{by:.1}" y1="{bx:.1}" x2="{:.1}" y2="{bx:.1}" stroke="black"/>"#, sx(x1));
    let _ = writeln!(s, r#"<line x1="{by:.1}" y1="{bx:.1}" x2="{by:.1}" y2="{:.1}" stroke="black"/>"#, sy(1.0));
    for i in 0..=5 {
        let y = f64::from(i) / 5.0;
        let _ = writeln!(
            s,
            r##"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="#ddd"/><text x="{:.1}" y="{:.1}" text-anchor="end">{y:.1}</text>"##,
            sx(x0), sy(y), sx(x1), sy(y), LEFT - 6.0, sy(y) + 4.0
        );
    }
    let ticks = 6;
    for i in 0..=ticks {
        let x = x0 + (x1 - x0) * f64::from(i) / f64::from(ticks);
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{x:.2}</text>"#,
            sx(x),
            H - BOTTOM + 18.0
        );
    }
    let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">γ</text>"#, (LEFT + W - RIGHT) / 2.0, H - 12.0);
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.1}" text-anchor="middle" transform="rotate(-90 16 {:.1})">{}</text>"#,
        (TOP + H - BOTTOM) / 2.0,
        (TOP + H - BOTTOM) / 2.0,
        escape(ylabel)
    );

    // Analytic curve.
    let steps = 200;
    let path: Vec<String> = (0..=steps)
        .map(|i| {
            let x = x0 + (x1 - x0) * f64::from(i) / f64::from(steps);
            format!("{:.2},{:.2}", sx(x), sy(target(x)))
        })
        .collect();
    let _ = writeln!(s, r##"<polyline fill="none" stroke="#c33" stroke-width="1.5" points="{}"/>"##, path.join(" "));

    // Estimates.
    let est: Vec<String> = points.iter().map(|p| format!("{:.2},{:.2}", sx(p.gamma), sy(p.estimate))).collect();
    let _ = writeln!(s, r##"<polyline fill="none" stroke="#236" stroke-width="1.5" points="{}"/>"##, est.join(" "));
    for p in points {
        let (x, lo, hi) = (sx(p.gamma), sy(p.estimate - 2.0 * p.stderr), sy(p.estimate + 2.0 * p.stderr));
        let _ = writeln!(
            s,
            r##"<line x1="{x:.2}" y1="{lo:.2}" x2="{x:.2}" y2="{hi:.2}" stroke="#236"/><circle cx="{x:.2}" cy="{:.2}" r="3" fill="#236"/>"##,
            sy(p.estimate)
        );
    }

    let lx = W - RIGHT - 170.0;
    let _ = writeln!(
        s,
        r##"<line x1="{lx}" y1="{t}" x2="{}" y2="{t}" stroke="#236" stroke-width="1.5"/><text x="{}" y="{}">estimate ± 2 s.e.</text>"##,
        lx + 20.0,
        lx + 26.0,
        TOP + 4.0,
        t = TOP
    );
    let _ = writeln!(
        s,
        r##"<line x1="{lx}" y1="{t}" x2="{}" y2="{t}" stroke="#c33" stroke-width="1.5"/><text x="{}" y="{}">1 − Φ(γ/√2)</text>"##,
        lx + 20.0,
        lx + 26.0,
        TOP + 22.0,
        t = TOP + 18.0
    );
    s.push_str("</svg>\n");
    s
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn well_formed() {
        let pts = [
            Point { gamma: -1.0, estimate: 0.7, stderr: 0.01 },
            Point { gamma: 1.0, estimate: 0.3, stderr: 0.01 },
        ];
        let s = curve("a < b", "TV", &pts);
        assert!(s.starts_with("<svg"));
        assert!(s.ends_with("</svg>\n"));
        assert!(s.contains("a &lt; b"));
        assert_eq!(s.matches("<circle").count(), 2);
    }
}
