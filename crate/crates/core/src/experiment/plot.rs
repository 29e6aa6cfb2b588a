//! SVG figures built from polylines. No timestamps or random ids, so
//! identical reports give identical files.

use std::f64::consts::PI;
use std::fmt::Write as _;

use super::analysis::{CurveReport, SweepReport};
use crate::phase::{mixed_phase_for, solid_angle_from_waveplates};
use crate::prep::Handedness;
use crate::qubit::Purity;

const COLORS: [&str; 6] = [
    "#1f4e9c", "#c0392b", "#2e8b57", "#8e44ad", "#d68910", "#555555",
];
const PANEL_W: f64 = 360.0;
const PANEL_H: f64 = 240.0;
const MARGIN: f64 = 48.0;

struct Panel {
    x0: f64,
    y0: f64,
    xr: (f64, f64),
    yr: (f64, f64),
}

impl Panel {
    fn x(&self, v: f64) -> f64 {
        self.x0 + (v - self.xr.0) / (self.xr.1 - self.xr.0) * PANEL_W
    }

    fn y(&self, v: f64) -> f64 {
        self.y0 + PANEL_H - (v - self.yr.0) / (self.yr.1 - self.yr.0) * PANEL_H
    }

    fn frame(&self, out: &mut String, title: &str, ylabel: &str, yticks: &[(f64, &str)]) {
        let _ = writeln!(
            out,
            r#"<rect x="{:.1}" y="{:.1}" width="{PANEL_W}" height="{PANEL_H}" fill="none" stroke="black"/>"#,
            self.x0, self.y0
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" font-size="13" text-anchor="middle">{title}</text>"#,
            self.x0 + PANEL_W / 2.0,
            self.y0 - 8.0
        );
        for t in [-45.0, -22.5, 0.0, 22.5, 45.0] {
            let x = self.x(t);
            let _ = writeln!(
                out,
                r#"<line x1="{x:.1}" y1="{:.1}" x2="{x:.1}" y2="{:.1}" stroke="black"/><text x="{x:.1}" y="{:.1}" font-size="10" text-anchor="middle">{t}</text>"#,
                self.y0 + PANEL_H,
                self.y0 + PANEL_H + 4.0,
                self.y0 + PANEL_H + 16.0
            );
        }
        for &(v, label) in yticks {
            let y = self.y(v);
            let _ = writeln!(
                out,
                r#"<line x1="{:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="black"/><text x="{:.1}" y="{:.1}" font-size="10" text-anchor="end">{label}</text>"#,
                self.x0 - 4.0,
                self.x0,
                self.x0 - 6.0,
                y + 3.0
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" font-size="11" text-anchor="middle">theta1 (deg)</text>"#,
            self.x0 + PANEL_W / 2.0,
            self.y0 + PANEL_H + 32.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" font-size="11" text-anchor="middle" transform="rotate(-90 {:.1} {:.1})">{ylabel}</text>"#,
            self.x0 - 34.0,
            self.y0 + PANEL_H / 2.0,
            self.x0 - 34.0,
            self.y0 + PANEL_H / 2.0
        );
    }

    fn polyline(&self, out: &mut String, pts: &[(f64, f64)], color: &str) {
        if pts.len() < 2 {
            return;
        }
        let coords: Vec<String> = pts
            .iter()
            .map(|&(a, b)| format!("{:.2},{:.2}", self.x(a), self.y(b)))
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
            coords.join(" ")
        );
    }

    fn band(&self, out: &mut String, lower: &[(f64, f64)], upper: &[(f64, f64)], color: &str) {
        if lower.len() < 2 {
            return;
        }
        let coords: Vec<String> = lower
            .iter()
            .chain(upper.iter().rev())
            .map(|&(a, b)| format!("{:.2},{:.2}", self.x(a), self.y(b)))
            .collect();
        let _ = writeln!(
            out,
            r#"<polygon points="{}" fill="{color}" fill-opacity="0.18" stroke="none"/>"#,
            coords.join(" ")
        );
    }

    fn point(&self, out: &mut String, x: f64, y: f64, sigma: f64, color: &str) {
        let (px, py) = (self.x(x), self.y(y));
        let (lo, hi) = (
            self.y((y - sigma).max(self.yr.0)),
            self.y((y + sigma).min(self.yr.1)),
        );
        let _ = writeln!(
            out,
            r#"<line x1="{px:.2}" y1="{lo:.2}" x2="{px:.2}" y2="{hi:.2}" stroke="{color}"/><circle cx="{px:.2}" cy="{py:.2}" r="2.5" fill="{color}"/>"#
        );
    }
}

type Series = Vec<(f64, f64)>;

/// Splits a wrapped phase curve where it jumps by more than pi.
fn split_wrapped(pts: Series) -> Vec<Series> {
    let mut runs: Vec<Series> = vec![Vec::new()];
    for p in pts {
        let run = runs.last_mut().expect("non-empty");
        if let Some(&(_, prev)) = run.last() {
            if (p.1 - prev).abs() > PI {
                runs.push(Vec::new());
            }
        }
        runs.last_mut().expect("non-empty").push(p);
    }
    runs
}

/// Theory samples for purity `r` against theta1 in degrees: `(phase, visibility)`,
/// with undefined phases left out of the phase series.
fn theory_curve(r: f64, dominant: Handedness, theta2_deg: f64) -> (Series, Series) {
    let purity = Purity::new(r.clamp(0.0, 1.0)).expect("clamped");
    let mut phase = Vec::new();
    let mut vis = Vec::new();
    for i in 0..=360 {
        let t = -45.0 + 0.25 * i as f64;
        let pv = mixed_phase_for(
            purity,
            dominant,
            solid_angle_from_waveplates(t.to_radians(), theta2_deg.to_radians()),
        );
        if pv.defined {
            phase.push((t, pv.gamma));
        }
        vis.push((t, pv.v));
    }
    (phase, vis)
}

fn draw_curve(
    out: &mut String,
    phase: &Panel,
    vis: &Panel,
    curve: &CurveReport,
    theta2_deg: f64,
    color: &str,
) {
    if let Some(est) = curve.retrodicted {
        let lo = theory_curve(
            (curve.r_state - est.sigma_r).max(0.0),
            curve.dominant,
            theta2_deg,
        );
        let hi = theory_curve(
            (curve.r_state + est.sigma_r).min(1.0),
            curve.dominant,
            theta2_deg,
        );
        if lo.0.len() == hi.0.len() {
            for (a, b) in split_wrapped(lo.0).iter().zip(split_wrapped(hi.0).iter()) {
                if a.len() == b.len() {
                    phase.band(out, a, b, color);
                }
            }
        }
        let scale = |pts: Series| -> Series {
            pts.into_iter()
                .map(|(t, v)| (t, v * curve.reference_visibility))
                .collect()
        };
        vis.band(out, &scale(lo.1), &scale(hi.1), color);
    }
    let (th_phase, th_vis) = theory_curve(curve.r_state, curve.dominant, theta2_deg);
    for run in split_wrapped(th_phase) {
        phase.polyline(out, &run, color);
    }
    let th_vis: Series = th_vis
        .into_iter()
        .map(|(t, v)| (t, v * curve.reference_visibility))
        .collect();
    vis.polyline(out, &th_vis, color);
    for p in &curve.points {
        if p.defined {
            phase.point(out, p.theta1_deg, p.gamma, p.sigma_gamma, color);
        }
        vis.point(out, p.theta1_deg, p.visibility, p.sigma_visibility, color);
    }
}

const PHASE_TICKS: [(f64, &str); 5] = [
    (-PI, "-pi"),
    (-PI / 2.0, "-pi/2"),
    (0.0, "0"),
    (PI / 2.0, "pi/2"),
    (PI, "pi"),
];
const VIS_TICKS: [(f64, &str); 3] = [(0.0, "0"), (0.5, "0.5"), (1.0, "1")];

fn panels(out: &mut String, report: &SweepReport, col: usize) {
    let x0 = MARGIN + col as f64 * (PANEL_W + 2.0 * MARGIN);
    let phase = Panel {
        x0,
        y0: MARGIN,
        xr: (-47.5, 47.5),
        yr: (-PI - 0.2, PI + 0.2),
    };
    let vis = Panel {
        x0,
        y0: 2.0 * MARGIN + PANEL_H + 20.0,
        xr: (-47.5, 47.5),
        yr: (0.0, 1.05),
    };
    phase.frame(
        out,
        &format!("{}: geometric phase", report.method),
        "gamma (rad)",
        &PHASE_TICKS,
    );
    vis.frame(
        out,
        &format!("{}: visibility", report.method),
        "visibility",
        &VIS_TICKS,
    );
    for (i, curve) in report.curves.iter().enumerate() {
        draw_curve(
            out,
            &phase,
            &vis,
            curve,
            report.theta2_deg,
            COLORS[i % COLORS.len()],
        );
    }
    // legend
    for (i, curve) in report.curves.iter().enumerate() {
        let y = vis.y0 + PANEL_H + 52.0 + 14.0 * i as f64;
        let _ = writeln!(
            out,
            r#"<rect x="{:.1}" y="{:.1}" width="10" height="10" fill="{}"/><text x="{:.1}" y="{:.1}" font-size="11">r = {:.2}</text>"#,
            x0,
            y - 9.0,
            COLORS[i % COLORS.len()],
            x0 + 14.0,
            y,
            curve.r
        );
    }
}

fn document(columns: usize, rows_extra: usize, body: &str) -> String {
    let width = columns as f64 * (PANEL_W + 2.0 * MARGIN);
    let height = 3.0 * MARGIN + 2.0 * PANEL_H + 80.0 + 14.0 * rows_extra as f64;
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" viewBox=\"0 0 {width:.0} {height:.0}\" font-family=\"sans-serif\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{body}</svg>\n"
    )
}

/// Phase and visibility panels for one method.
pub fn sweep_svg(report: &SweepReport) -> String {
    let mut body = String::new();
    panels(&mut body, report, 0);
    document(1, report.curves.len(), &body)
}

/// Side-by-side panels for several methods (the six-panel figure for three).
pub fn fig3_svg(reports: &[SweepReport]) -> String {
    let mut body = String::new();
    for (col, report) in reports.iter().enumerate() {
        panels(&mut body, report, col);
    }
    let legend = reports.iter().map(|r| r.curves.len()).max().unwrap_or(0);
    document(reports.len().max(1), legend, &body)
}
