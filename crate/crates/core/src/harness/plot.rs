use std::collections::BTreeMap;
use std::fmt::Write;

use super::sweep::cell_id;
use crate::metrics::EvaluationReport;

pub const PLOTTED_METRICS: [&str; 7] = [
    "davies_bouldin",
    "homogeneity",
    "completeness",
    "jaccard",
    "silhouette",
    "dunn",
    "accuracy",
];

fn value(metric: &str, r: &EvaluationReport) -> f64 {
    match metric {
        "davies_bouldin" => r.davies_bouldin,
        "homogeneity" => r.homogeneity,
        "completeness" => r.completeness,
        "jaccard" => r.jaccard,
        "silhouette" => r.silhouette,
        "dunn" => r.dunn,
        "accuracy" => r.accuracy,
        other => panic!("unknown metric {other}"),
    }
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 50.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"];

/// Line chart of `metric` against epochs, one series per training share.
///
/// Every report becomes exactly one marker carrying a `data-cell` attribute.
pub fn render_metric_plot(metric: &str, reports: &[EvaluationReport]) -> String {
    let mut series: BTreeMap<u32, Vec<(u32, f64)>> = BTreeMap::new();
    for r in reports {
        series.entry(r.training_percent).or_default().push((r.epochs, value(metric, r)));
    }
    series.values_mut().for_each(|s| s.sort_by_key(|p| p.0));

    let xs = || reports.iter().map(|r| f64::from(r.epochs));
    let ys = || reports.iter().map(|r| value(metric, r));
    let (x_lo, x_hi) = (xs().fold(f64::INFINITY, f64::min), xs().fold(f64::NEG_INFINITY, f64::max));
    let (y_lo, y_hi) = (ys().fold(f64::INFINITY, f64::min), ys().fold(f64::NEG_INFINITY, f64::max));
    let span = |lo: f64, hi: f64| if hi > lo { hi - lo } else { 1.0 };
    let px = |x: f64| MARGIN + (x - x_lo) / span(x_lo, x_hi) * (WIDTH - 2.0 * MARGIN);
    let py = |y: f64| HEIGHT - MARGIN - (y - y_lo) / span(y_lo, y_hi) * (HEIGHT - 2.0 * MARGIN);

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}">"#);
    let _ = writeln!(svg, r#"<title>{metric} vs epochs</title>"#);
    let _ = writeln!(
        svg,
        r#"<line x1="{MARGIN}" y1="{b}" x2="{r}" y2="{b}" stroke="black"/><line x1="{MARGIN}" y1="{MARGIN}" x2="{MARGIN}" y2="{b}" stroke="black"/>"#,
        b = HEIGHT - MARGIN,
        r = WIDTH - MARGIN
    );
    let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="middle">epochs</text>"#, WIDTH / 2.0, HEIGHT - 10.0);
    let _ = writeln!(svg, r#"<text x="12" y="{}" transform="rotate(-90 12 {})" text-anchor="middle">{metric}</text>"#, HEIGHT / 2.0, HEIGHT / 2.0);
    if !reports.is_empty() {
        let _ = writeln!(svg, r#"<text x="{MARGIN}" y="{}" font-size="10">{y_hi:.4}</text>"#, MARGIN - 5.0);
        let _ = writeln!(svg, r#"<text x="{MARGIN}" y="{}" font-size="10">{y_lo:.4}</text>"#, HEIGHT - MARGIN + 15.0);
    }
    for (n, (tp, points)) in series.iter().enumerate() {
        let colour = PALETTE[n % PALETTE.len()];
        let path: Vec<String> = points.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(f64::from(x)), py(y))).collect();
        let _ = writeln!(svg, r#"<g data-training-percent="{tp}">"#);
        let _ = writeln!(svg, r#"<polyline fill="none" stroke="{colour}" points="{}"/>"#, path.join(" "));
        for &(x, y) in points {
            let _ = writeln!(
                svg,
                r#"<circle data-cell="{}" cx="{:.2}" cy="{:.2}" r="3" fill="{colour}"><title>{y}</title></circle>"#,
                cell_id(*tp, x),
                px(f64::from(x)),
                py(y)
            );
        }
        let _ = writeln!(svg, r#"<text x="{}" y="{}" font-size="10" fill="{colour}">{tp}%</text>"#, WIDTH - MARGIN + 5.0, MARGIN + 12.0 * n as f64);
        let _ = writeln!(svg, "</g>");
    }
    svg.push_str("</svg>\n");
    svg
}
