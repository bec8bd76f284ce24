//! SVG rendering of instances, solutions, and pipeline state. Output is
//! deterministic: fixed coordinate formatting and stable element order, so
//! renders golden-test cleanly.

use crate::geom::Point;
use crate::hbuilder::HBuilder;
use crate::instance::{Instance, Solution};
use std::fmt::Write as _;

const SCALE: f64 = 60.0;

fn fmt(v: f64) -> String {
    format!("{:.4}", v)
}

struct Canvas {
    body: String,
    min: Point,
    max: Point,
}

impl Canvas {
    fn new(instance: &Instance) -> Self {
        let mut min = Point::new(f64::INFINITY, f64::INFINITY);
        let mut max = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        let mut seen = false;
        for d in &instance.disks {
            min.x = min.x.min(d.center.x - 1.0);
            min.y = min.y.min(d.center.y - 1.0);
            max.x = max.x.max(d.center.x + 1.0);
            max.y = max.y.max(d.center.y + 1.0);
            seen = true;
        }
        for p in &instance.points {
            min.x = min.x.min(p.x);
            min.y = min.y.min(p.y);
            max.x = max.x.max(p.x);
            max.y = max.y.max(p.y);
            seen = true;
        }
        if !seen {
            min = Point::new(0.0, 0.0);
            max = Point::new(1.0, 1.0);
        }
        min.x -= 0.2;
        min.y -= 0.2;
        max.x += 0.2;
        max.y += 0.2;
        Canvas { body: String::new(), min, max }
    }

    /// Plane to pixel: y is flipped so the plane's +y points up.
    fn px(&self, p: &Point) -> (f64, f64) {
        ((p.x - self.min.x) * SCALE, (self.max.y - p.y) * SCALE)
    }

    fn circle(&mut self, c: &Point, r: f64, style: &str) {
        let (x, y) = self.px(c);
        writeln!(
            self.body,
            r#"  <circle cx="{}" cy="{}" r="{}" {style}/>"#,
            fmt(x),
            fmt(y),
            fmt(r * SCALE)
        )
        .unwrap();
    }

    fn dot(&mut self, p: &Point, style: &str) {
        let (x, y) = self.px(p);
        writeln!(self.body, r#"  <circle cx="{}" cy="{}" r="3" {style}/>"#, fmt(x), fmt(y))
            .unwrap();
    }

    fn polyline(&mut self, pts: &[Point], style: &str) {
        if pts.len() < 2 {
            return;
        }
        let coords: Vec<String> = pts
            .iter()
            .map(|p| {
                let (x, y) = self.px(p);
                format!("{},{}", fmt(x), fmt(y))
            })
            .collect();
        writeln!(self.body, r#"  <polyline points="{}" {style}/>"#, coords.join(" ")).unwrap();
    }

    fn finish(self) -> String {
        let w = (self.max.x - self.min.x) * SCALE;
        let h = (self.max.y - self.min.y) * SCALE;
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n{}</svg>\n",
            fmt(w),
            fmt(h),
            fmt(w),
            fmt(h),
            self.body
        )
    }
}

/// Render an instance with optional solution highlighting and pipeline
/// overlays (helper disks dashed, baselines and envelopes as layers).
pub fn render(
    instance: &Instance,
    solution: Option<&Solution>,
    builder: Option<&HBuilder>,
) -> String {
    let mut canvas = Canvas::new(instance);
    // all disks, light
    for d in &instance.disks {
        canvas.circle(&d.center, 1.0, r##"fill="none" stroke="#bbbbbb" stroke-width="1""##);
    }
    // helper set dashed, baselines and envelopes as layers
    if let Some(b) = builder {
        let model = b.model();
        for d in &model.h {
            canvas.circle(
                &d.center,
                1.0,
                r##"fill="none" stroke="#2e7d32" stroke-width="1.5" stroke-dasharray="6 4""##,
            );
        }
        for bl in &model.baselines {
            let lp = &model.boundary.loops[bl.loop_id];
            let samples = 64;
            let pts: Vec<Point> = (0..=samples)
                .map(|k| lp.point_at(bl.start_s + bl.len * k as f64 / samples as f64))
                .collect();
            canvas.polyline(&pts, r##"fill="none" stroke="#d32f2f" stroke-width="2""##);
        }
        for sub in 0..model.subs.len() {
            if model.baselines[model.subs[sub].baseline_idx].cyclic {
                continue;
            }
            let view = crate::substructures::discretize(model, sub, true);
            if let Ok(env) = crate::substructures::envelope(model, &view) {
                for step in env {
                    let arc = &model.arcs[view.arcs[step.view_arc].arc_idx];
                    let c = Point::new(
                        arc.endpoints.0.x - arc.interval.start.cos(),
                        arc.endpoints.0.y - arc.interval.start.sin(),
                    );
                    let samples = 32;
                    let pts: Vec<Point> = (0..=samples)
                        .map(|k| {
                            let t = arc.interval.extent * k as f64 / samples as f64;
                            Point::new(
                                c.x + (arc.interval.start + t).cos(),
                                c.y + (arc.interval.start + t).sin(),
                            )
                        })
                        .collect();
                    canvas.polyline(&pts, r##"fill="none" stroke="#1565c0" stroke-width="2""##);
                }
            }
        }
    }
    // chosen solution bold
    if let Some(sol) = solution {
        for &id in &sol.disk_ids {
            if let Some(d) = instance.disk_by_id(id) {
                canvas.circle(
                    &d.center,
                    1.0,
                    r##"fill="none" stroke="#6a1b9a" stroke-width="2.5""##,
                );
            }
        }
    }
    // points last, on top
    for p in &instance.points {
        let covered = solution.is_some_and(|s| {
            s.disk_ids.iter().any(|id| {
                instance
                    .disk_by_id(*id)
                    .is_some_and(|d| p.dist(&d.center) <= 1.0 + crate::geom::TOL)
            })
        });
        let style = if covered || solution.is_none() {
            r##"fill="#37474f""##
        } else {
            r##"fill="#ff6f00""##
        };
        canvas.dot(p, style);
    }
    canvas.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Disk;

    #[test]
    fn empty_instance_renders_valid_svg() {
        let inst = Instance::new(vec![], vec![]);
        let svg = render(&inst, None, None);
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn output_is_byte_stable() {
        let inst = Instance::new(
            vec![Disk::new(0, 0.0, 0.0, 1.0), Disk::new(1, 0.5, 0.2, 2.0)],
            vec![Point::new(0.2, 0.3)],
        );
        let a = render(&inst, None, None);
        let b = render(&inst, None, None);
        assert_eq!(a, b);
        assert!(a.contains("<circle"));
    }
}
