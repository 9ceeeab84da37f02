//! Minimal deterministic SVG rendering of a daily commit histogram.

use crate::config::MilestoneKind;
use crate::metrics::DailySeries;

const WIDTH: u32 = 900;
const HEIGHT: u32 = 300;
const MARGIN: u32 = 30;

fn bar_class(kind: Option<MilestoneKind>) -> &'static str {
    match kind {
        Some(MilestoneKind::DueDate) => "due",
        Some(MilestoneKind::Presentation) => "presentation",
        None => "normal",
    }
}

/// Render one bar per day as standalone SVG 1.1.
///
/// Output is byte-stable for identical input; an empty series renders the
/// axes alone. Due-date bars carry class `due` (red), presentation days
/// `presentation` (orange).
pub fn render_svg_histogram(series: &DailySeries) -> String {
    let plot_width = WIDTH - 2 * MARGIN;
    let plot_height = HEIGHT - 2 * MARGIN;
    let max = series.values().iter().copied().max().unwrap_or(0).max(1);
    let n = series.len();

    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    out.push_str(
        "<style>.normal{fill:#6699cc}.due{fill:#cc3333}.presentation{fill:#ee9933}.axis{stroke:#333333;stroke-width:1}</style>\n",
    );
    // x axis then y axis
    out.push_str(&format!(
        "<line class=\"axis\" x1=\"{MARGIN}\" y1=\"{y}\" x2=\"{x2}\" y2=\"{y}\"/>\n",
        y = HEIGHT - MARGIN,
        x2 = WIDTH - MARGIN
    ));
    out.push_str(&format!(
        "<line class=\"axis\" x1=\"{MARGIN}\" y1=\"{MARGIN}\" x2=\"{MARGIN}\" y2=\"{y2}\"/>\n",
        y2 = HEIGHT - MARGIN
    ));

    if n > 0 {
        let slot = plot_width as f64 / n as f64;
        let bar_width = (slot * 0.8).max(0.5);
        for (i, (date, commits, mark)) in series.days().enumerate() {
            if commits == 0 {
                continue;
            }
            let height = (commits as f64 / max as f64) * plot_height as f64;
            let x = MARGIN as f64 + i as f64 * slot + (slot - bar_width) / 2.0;
            let y = (HEIGHT - MARGIN) as f64 - height;
            out.push_str(&format!(
                "<rect class=\"{}\" x=\"{x:.2}\" y=\"{y:.2}\" width=\"{bar_width:.2}\" height=\"{height:.2}\"><title>{date}: {commits}</title></rect>\n",
                bar_class(mark)
            ));
        }
    }

    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(values: Vec<u64>, marks: &[(usize, MilestoneKind)]) -> DailySeries {
        DailySeries::new(
            chrono::NaiveDate::from_ymd_opt(2022, 9, 1).unwrap(),
            values,
            marks.iter().copied().collect(),
        )
        .unwrap()
    }

    #[test]
    fn empty_series_renders_axes_only() {
        let svg = render_svg_histogram(&series(vec![], &[]));
        assert!(svg.starts_with("<svg"));
        assert!(svg.ends_with("</svg>\n"));
        assert_eq!(svg.matches("<line").count(), 2);
        assert_eq!(svg.matches("<rect").count(), 0);
    }

    #[test]
    fn three_day_fixture_renders_three_bars() {
        let svg = render_svg_histogram(&series(vec![3, 1, 2], &[(1, MilestoneKind::DueDate)]));
        assert_eq!(svg.matches("<rect").count(), 3);
        assert_eq!(svg.matches("class=\"due\"").count(), 1);
    }

    #[test]
    fn identical_input_renders_identical_bytes() {
        let s = series(vec![3, 0, 2, 7], &[(3, MilestoneKind::Presentation)]);
        assert_eq!(render_svg_histogram(&s), render_svg_histogram(&s));
    }
}
