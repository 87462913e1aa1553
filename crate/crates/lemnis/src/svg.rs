//! Minimal SVG plots of polylines and marked points.

use std::fmt::Write;

use lemnis_core::{Polyline, Rect, C64};

pub struct Layer<'a> {
    pub curves: &'a [Polyline],
    pub stroke: String,
}

#[derive(Default)]
pub struct Figure<'a> {
    pub layers: Vec<Layer<'a>>,
    pub poles: Vec<C64>,
    pub zeros: Vec<C64>,
    pub title: String,
}

/// Colour for layer `k` of `n`, blue to red.
pub fn ramp(k: usize, n: usize) -> String {
    let s = if n > 1 { k as f64 / (n - 1) as f64 } else { 0.0 };
    let r = (40.0 + 200.0 * s) as u8;
    let b = (220.0 - 180.0 * s) as u8;
    format!("#{r:02x}40{b:02x}")
}

impl Figure<'_> {
    fn bounds(&self) -> Rect {
        let pts = self
            .layers
            .iter()
            .flat_map(|l| l.curves.iter().flat_map(|c| c.points.iter().copied()))
            .chain(self.poles.iter().copied())
            .chain(self.zeros.iter().copied());
        let r = Rect::bounding(pts).unwrap_or(Rect::new(-1.0, 1.0, -1.0, 1.0));
        let pad = 0.05 * r.width().max(r.height()).max(1e-9);
        Rect::new(r.x0 - pad, r.x1 + pad, r.y0 - pad, r.y1 + pad)
    }

    pub fn render(&self) -> String {
        let b = self.bounds();
        let size = b.width().max(b.height());
        let mark = 0.01 * size;
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="800" height="{}" viewBox="{} {} {} {}">"#,
            (800.0 * b.height() / b.width()).round(),
            b.x0,
            -b.y1,
            b.width(),
            b.height()
        );
        if !self.title.is_empty() {
            let _ = writeln!(s, "<title>{}</title>", self.title);
        }
        let _ = writeln!(s, r#"<g transform="scale(1,-1)" fill="none" stroke-width="1.5">"#);
        for layer in &self.layers {
            for c in layer.curves {
                let mut d = String::new();
                for (k, z) in c.points.iter().enumerate() {
                    let _ = write!(d, "{}{} {} ", if k == 0 { "M" } else { "L" }, z.re, z.im);
                }
                d.push('Z');
                let _ = writeln!(
                    s,
                    r#"<path d="{d}" stroke="{}" vector-effect="non-scaling-stroke"/>"#,
                    layer.stroke
                );
            }
        }
        for p in &self.poles {
            let _ = writeln!(
                s,
                r##"<path d="M{} {} L{} {} M{} {} L{} {}" stroke="#c00000" vector-effect="non-scaling-stroke"/>"##,
                p.re - mark,
                p.im - mark,
                p.re + mark,
                p.im + mark,
                p.re - mark,
                p.im + mark,
                p.re + mark,
                p.im - mark
            );
        }
        for z in &self.zeros {
            let _ = writeln!(
                s,
                r##"<circle cx="{}" cy="{}" r="{mark}" stroke="#006000" vector-effect="non-scaling-stroke"/>"##,
                z.re, z.im
            );
        }
        s.push_str("</g>\n</svg>\n");
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_figure() {
        let c = [Polyline::circle(C64::new(0.0, 0.0), 1.0, 16)];
        let fig = Figure {
            layers: vec![Layer {
                curves: &c,
                stroke: ramp(0, 1),
            }],
            poles: vec![C64::new(0.0, 0.0)],
            ..Default::default()
        };
        let svg = fig.render();
        assert!(svg.starts_with("<svg"));
        assert_eq!(svg.matches("<path").count(), 2);
        assert!(svg.trim_end().ends_with("</svg>"));
    }
}
