//! Minimal SVG line plot of the left and right probabilities.

use std::fmt::Write;

use triplewalk::dynamics::ProbabilityTrace;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN_LEFT: f64 = 60.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 30.0;
const MARGIN_BOTTOM: f64 = 50.0;

fn polyline(times: &[f64], values: &[f64], horizon: f64, colour: &str, dashed: bool) -> String {
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let mut points = String::new();
    for (t, p) in times.iter().zip(values) {
        let x = MARGIN_LEFT + plot_w * t / horizon;
        let y = MARGIN_TOP + plot_h * (1.0 - p.clamp(0.0, 1.0));
        let _ = write!(points, "{x:.2},{y:.2} ");
    }
    let dash = if dashed {
        r#" stroke-dasharray="4 3""#
    } else {
        ""
    };
    format!(
        r#"<polyline fill="none" stroke="{colour}" stroke-width="1.2"{dash} points="{}"/>"#,
        points.trim_end()
    )
}

pub fn render(trace: &ProbabilityTrace) -> String {
    let horizon = trace.horizon().max(f64::MIN_POSITIVE);
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let bottom = MARGIN_TOP + plot_h;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="18" text-anchor="middle">{}, start = {}</text>"#,
        WIDTH / 2.0,
        trace.spec,
        trace.start
    );
    let _ = writeln!(
        svg,
        r#"<rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );
    for k in 0..=5 {
        let frac = k as f64 / 5.0;
        let x = MARGIN_LEFT + plot_w * frac;
        let y = bottom - plot_h * frac;
        let _ = writeln!(
            svg,
            r#"<line x1="{x:.2}" y1="{bottom}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            bottom + 5.0,
            bottom + 18.0,
            format_tick(horizon * frac)
        );
        let _ = writeln!(
            svg,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{MARGIN_LEFT}" y2="{y:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            MARGIN_LEFT - 5.0,
            MARGIN_LEFT - 8.0,
            y + 4.0,
            format_tick(frac)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">t (units of inverse hopping)</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        HEIGHT - 12.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">probability</text>"#,
        MARGIN_TOP + plot_h / 2.0,
        MARGIN_TOP + plot_h / 2.0
    );
    let _ = writeln!(
        svg,
        "{}",
        polyline(&trace.times, &trace.p_left, horizon, "#1f5fbf", false)
    );
    let _ = writeln!(
        svg,
        "{}",
        polyline(&trace.times, &trace.p_right, horizon, "#c0392b", true)
    );
    let lx = MARGIN_LEFT + plot_w - 110.0;
    let _ = writeln!(
        svg,
        r##"<line x1="{lx}" y1="{ly}" x2="{lx2}" y2="{ly}" stroke="#1f5fbf"/><text x="{tx}" y="{ty}">p_left</text>"##,
        ly = MARGIN_TOP + 15.0,
        lx2 = lx + 25.0,
        tx = lx + 30.0,
        ty = MARGIN_TOP + 19.0
    );
    let _ = writeln!(
        svg,
        r##"<line x1="{lx}" y1="{ly}" x2="{lx2}" y2="{ly}" stroke="#c0392b" stroke-dasharray="4 3"/><text x="{tx}" y="{ty}">p_right</text>"##,
        ly = MARGIN_TOP + 32.0,
        lx2 = lx + 25.0,
        tx = lx + 30.0,
        ty = MARGIN_TOP + 36.0
    );
    svg.push_str("</svg>\n");
    svg
}

fn format_tick(v: f64) -> String {
    let s = format!("{v:.2}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use triplewalk::dynamics::propagate_trace;
    use triplewalk::TripleGraphSpec;

    #[test]
    fn renders_both_series() {
        let spec = TripleGraphSpec::new(5, 1, 3, 2.0).unwrap();
        let trace = propagate_trace(&spec, 1, 5.0, 0.5).unwrap();
        let svg = render(&trace);
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("p_right"));
    }

    #[test]
    fn ticks() {
        assert_eq!(format_tick(100.0), "100");
        assert_eq!(format_tick(0.2), "0.2");
        assert_eq!(format_tick(0.0), "0");
    }
}
