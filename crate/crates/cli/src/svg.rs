//! Static SVG 1.1 figures of conics and polygons in the affine chart.

use std::fmt::Write;

/// A real ellipse: centre, semi-axes and the angle of the first axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ellipse {
    pub cx: f64,
    pub cy: f64,
    pub rx: f64,
    pub ry: f64,
    pub angle: f64,
}

impl Ellipse {
    /// The real ellipse `xᵀQx = 0`, or `None` for hyperbolas, parabolas,
    /// empty and degenerate conics.
    pub fn from_conic(q: [[f64; 3]; 3]) -> Option<Self> {
        let (a, b, c) = (q[0][0], q[0][1], q[1][1]);
        let (d, e, f) = (q[0][2], q[1][2], q[2][2]);
        let det = a * c - b * b;
        if det <= 1e-14 * (a * a + c * c + b * b) {
            return None;
        }
        let cx = (b * e - c * d) / det;
        let cy = (b * d - a * e) / det;
        let f0 = f + d * cx + e * cy;
        let mean = 0.5 * (a + c);
        let radius = (0.25 * (a - c) * (a - c) + b * b).sqrt();
        let (l1, l2) = (mean + radius, mean - radius);
        let (s1, s2) = (-f0 / l1, -f0 / l2);
        if !(s1 > 0.0 && s2 > 0.0) {
            return None;
        }
        Some(Self {
            cx,
            cy,
            rx: s1.sqrt(),
            ry: s2.sqrt(),
            angle: 0.5 * (2.0 * b).atan2(a - c),
        })
    }

    fn bounds(&self) -> [f64; 4] {
        let (s, co) = self.angle.sin_cos();
        let hx = ((self.rx * co).powi(2) + (self.ry * s).powi(2)).sqrt();
        let hy = ((self.rx * s).powi(2) + (self.ry * co).powi(2)).sqrt();
        [self.cx - hx, self.cy - hy, self.cx + hx, self.cy + hy]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Item {
    Ellipse {
        shape: Ellipse,
        stroke: &'static str,
    },
    /// One straight segment.
    Segment {
        from: [f64; 2],
        to: [f64; 2],
        dashed: bool,
    },
    Polyline {
        points: Vec<[f64; 2]>,
        dashed: bool,
    },
    Label {
        at: [f64; 2],
        text: String,
    },
    Comment(String),
}

/// Items are written in insertion order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Scene {
    pub items: Vec<Item>,
}

impl Scene {
    pub fn push(&mut self, item: Item) {
        self.items.push(item);
    }

    fn bounds(&self) -> Option<[f64; 4]> {
        let mut b: Option<[f64; 4]> = None;
        let mut grow = |r: [f64; 4]| {
            if r.iter().all(|x| x.is_finite()) {
                b = Some(match b {
                    None => r,
                    Some(o) => [o[0].min(r[0]), o[1].min(r[1]), o[2].max(r[2]), o[3].max(r[3])],
                });
            }
        };
        for item in &self.items {
            match item {
                Item::Ellipse { shape, .. } => grow(shape.bounds()),
                Item::Segment { from, to, .. } => {
                    grow([from[0], from[1], from[0], from[1]]);
                    grow([to[0], to[1], to[0], to[1]]);
                }
                Item::Polyline { points, .. } => {
                    for p in points {
                        grow([p[0], p[1], p[0], p[1]]);
                    }
                }
                Item::Label { at, .. } => grow([at[0], at[1], at[0], at[1]]),
                Item::Comment(_) => {}
            }
        }
        b
    }
}

fn f(x: f64) -> String {
    let s = format!("{x:.6}");
    if s == "-0.000000" {
        "0.000000".into()
    } else {
        s
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Serialise a scene. The view box is the bounding box plus 5% on each
/// side; `y` points up, so it is negated on output.
pub fn emit_svg(scene: &Scene) -> Vec<u8> {
    let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let Some([x0, y0, x1, y1]) = scene.bounds() else {
        out.push_str("<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"0 0 1 1\"/>\n");
        return out.into_bytes();
    };
    let span = (x1 - x0).max(y1 - y0).max(1e-9);
    let w = (x1 - x0).max(1e-9 * span);
    let h = (y1 - y0).max(1e-9 * span);
    let (mx, my) = (0.05 * w, 0.05 * h);
    let stroke = 0.004 * span;
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"{} {} {} {}\" width=\"600\" height=\"{}\">",
        f(x0 - mx),
        f(-y1 - my),
        f(w + 2.0 * mx),
        f(h + 2.0 * my),
        f(600.0 * (h + 2.0 * my) / (w + 2.0 * mx)),
    );
    let _ = writeln!(out, "<g fill=\"none\" stroke-width=\"{}\">", f(stroke));
    let dash = |d: bool| {
        if d {
            format!(" stroke-dasharray=\"{} {}\"", f(3.0 * stroke), f(2.0 * stroke))
        } else {
            String::new()
        }
    };
    for item in &scene.items {
        match item {
            Item::Ellipse { shape, stroke: colour } => {
                let _ = writeln!(
                    out,
                    "<ellipse cx=\"{}\" cy=\"{}\" rx=\"{}\" ry=\"{}\" transform=\"rotate({} {} {})\" stroke=\"{colour}\"/>",
                    f(shape.cx),
                    f(-shape.cy),
                    f(shape.rx),
                    f(shape.ry),
                    f(-shape.angle.to_degrees()),
                    f(shape.cx),
                    f(-shape.cy),
                );
            }
            Item::Segment { from, to, dashed } => {
                let _ = writeln!(
                    out,
                    "<path d=\"M {} {} L {} {}\" stroke=\"black\"{}/>",
                    f(from[0]),
                    f(-from[1]),
                    f(to[0]),
                    f(-to[1]),
                    dash(*dashed)
                );
            }
            Item::Polyline { points, dashed } => {
                let pts: Vec<String> = points.iter().map(|p| format!("{},{}", f(p[0]), f(-p[1]))).collect();
                let _ = writeln!(
                    out,
                    "<polyline points=\"{}\" stroke=\"black\"{}/>",
                    pts.join(" "),
                    dash(*dashed)
                );
            }
            Item::Label { at, text } => {
                let _ = writeln!(
                    out,
                    "<text x=\"{}\" y=\"{}\" font-size=\"{}\" fill=\"red\" stroke=\"none\">{}</text>",
                    f(at[0]),
                    f(-at[1]),
                    f(0.04 * span),
                    escape(text)
                );
            }
            Item::Comment(text) => {
                let _ = writeln!(out, "<!-- {} -->", text.replace("--", "- -"));
            }
        }
    }
    out.push_str("</g>\n</svg>\n");
    out.into_bytes()
}

/// The polygon through `points` (affine, real parts): separate edges when it
/// closes, otherwise an open polyline with the gap written next to its end.
pub fn polygon(scene: &mut Scene, points: &[[f64; 2]], closes: bool, gap: f64, complex: bool) {
    if complex {
        scene.push(Item::Comment(
            "warning: complex chain, real projection drawn dashed".into(),
        ));
    }
    if points.len() < 2 {
        return;
    }
    if closes {
        for w in points.windows(2) {
            scene.push(Item::Segment {
                from: w[0],
                to: w[1],
                dashed: complex,
            });
        }
    } else {
        scene.push(Item::Polyline {
            points: points.to_vec(),
            dashed: complex,
        });
        scene.push(Item::Label {
            at: *points.last().expect("non-empty"),
            text: format!("gap {gap:.3e}"),
        });
    }
}
