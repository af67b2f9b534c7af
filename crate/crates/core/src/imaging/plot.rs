//! SVG line plots of target probability against blur fraction.
//!
//! Axis mapping: blur fraction `q` goes to `x = left + q·(right - left)` and
//! probability `p` to `y = bottom - p·(bottom - top)`, with the frame given
//! by [`PLOT_FRAME`]. Coordinates are written with two decimals.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::saliency::TrajectoryRecord;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlotFrame {
    pub width: f64,
    pub height: f64,
    pub left: f64,
    pub right: f64,
    pub top: f64,
    pub bottom: f64,
}

pub const PLOT_FRAME: PlotFrame = PlotFrame {
    width: 640.0,
    height: 400.0,
    left: 60.0,
    right: 600.0,
    top: 40.0,
    bottom: 340.0,
};

impl PlotFrame {
    pub fn x(&self, blur_fraction: f64) -> f64 {
        self.left + blur_fraction * (self.right - self.left)
    }

    pub fn y(&self, prob: f64) -> f64 {
        self.bottom - prob * (self.bottom - self.top)
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

pub fn render_trajectory_plot(traj: &TrajectoryRecord, class_name: &str) -> Result<String> {
    if traj.steps.is_empty() {
        return Err(Error::EmptyTrajectory);
    }
    let f = PLOT_FRAME;
    let mut s = String::new();
    let mut w = |line: String| {
        s.push_str(&line);
        s.push('\n');
    };
    w(format!(
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        f.width, f.height, f.width, f.height
    ));
    w(format!(
        r#"<rect x="0" y="0" width="{}" height="{}" fill="white"/>"#,
        f.width, f.height
    ));
    w(format!(
        r#"<text x="{:.2}" y="24" text-anchor="middle" font-family="sans-serif" font-size="16">{}</text>"#,
        (f.left + f.right) / 2.0,
        escape(class_name)
    ));
    w(format!(
        r#"<line x1="{l:.2}" y1="{b:.2}" x2="{r:.2}" y2="{b:.2}" stroke="black"/>"#,
        l = f.left,
        r = f.right,
        b = f.bottom
    ));
    w(format!(
        r#"<line x1="{l:.2}" y1="{t:.2}" x2="{l:.2}" y2="{b:.2}" stroke="black"/>"#,
        l = f.left,
        t = f.top,
        b = f.bottom
    ));
    for pct in [0, 25, 50, 75, 100] {
        let x = f.x(f64::from(pct) / 100.0);
        w(format!(
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle" font-family="sans-serif" font-size="11">{pct}%</text>"#,
            f.bottom + 16.0
        ));
    }
    for p in ["0", "0.5", "1"] {
        let y = f.y(p.parse().expect("tick label"));
        w(format!(
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end" font-family="sans-serif" font-size="11">{p}</text>"#,
            f.left - 6.0,
            y + 4.0
        ));
    }
    w(format!(
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-family="sans-serif" font-size="12">% of pixels blurred</text>"#,
        (f.left + f.right) / 2.0,
        f.height - 20.0
    ));
    w(format!(
        r#"<text x="16" y="{:.2}" text-anchor="middle" font-family="sans-serif" font-size="12" transform="rotate(-90 16 {:.2})">class probability</text>"#,
        (f.top + f.bottom) / 2.0,
        (f.top + f.bottom) / 2.0
    ));
    let mut points = String::new();
    for (step, p) in traj.steps.iter().zip(traj.target_probs()) {
        if !points.is_empty() {
            points.push(' ');
        }
        write!(
            points,
            "{:.2},{:.2}",
            f.x(step.blur_fraction),
            f.y(f64::from(p))
        )
        .expect("write");
    }
    w(format!(
        r#"<polyline fill="none" stroke="steelblue" stroke-width="2" points="{points}"/>"#
    ));
    w("</svg>".to_string());
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image::Image;
    use crate::model::ClassDistribution;
    use crate::saliency::{Mode, Selection, TrajectoryStep};

    fn traj(points: &[(f64, f32)]) -> TrajectoryRecord {
        let img = Image::filled(1, 1, &[0.0; 3]).unwrap();
        TrajectoryRecord {
            target_class: 1,
            mode: Mode::Nonlinear,
            steps: points
                .iter()
                .map(|&(q, p)| TrajectoryStep {
                    blur_fraction: q,
                    class_probs: ClassDistribution::new(vec![1.0 - p, p]),
                    image: img.clone(),
                    map: img.clone(),
                    selection: Selection::none(1, 1),
                })
                .collect(),
        }
    }

    fn polyline(svg: &str) -> Vec<(f64, f64)> {
        let start = svg.find("points=\"").unwrap() + 8;
        let end = start + svg[start..].find('"').unwrap();
        svg[start..end]
            .split(' ')
            .map(|pt| {
                let (x, y) = pt.split_once(',').unwrap();
                (x.parse().unwrap(), y.parse().unwrap())
            })
            .collect()
    }

    #[test]
    fn endpoints_follow_axis_mapping() {
        let svg = render_trajectory_plot(&traj(&[(0.0, 0.1), (0.95, 0.9)]), "disk").unwrap();
        // x = 60 + 540q, y = 340 - 300p
        assert_eq!(polyline(&svg), vec![(60.0, 310.0), (573.0, 70.0)]);
        assert!(svg.contains(">disk</text>"));
        assert!(svg.contains("% of pixels blurred"));
    }

    #[test]
    fn constant_probability_is_horizontal() {
        let svg =
            render_trajectory_plot(&traj(&[(0.0, 0.25), (0.3, 0.25), (0.9, 0.25)]), "x").unwrap();
        let pts = polyline(&svg);
        assert!(pts.iter().all(|&(_, y)| y == pts[0].1));
    }

    #[test]
    fn deterministic_and_escaped() {
        let t = traj(&[(0.0, 0.5), (0.5, 0.7)]);
        assert_eq!(
            render_trajectory_plot(&t, "a<b").unwrap(),
            render_trajectory_plot(&t.clone(), "a<b").unwrap()
        );
        assert!(render_trajectory_plot(&t, "a<b")
            .unwrap()
            .contains("a&lt;b"));
        assert!(render_trajectory_plot(&traj(&[]), "x").is_err());
    }
}
