//! Minimal deterministic SVG output (fixed 1000x1000 viewBox, no
//! timestamps, fixed-precision coordinates) so reruns are byte-identical.

use num_complex::Complex64;

const MARGIN: f64 = 50.0;
const SPAN: f64 = 900.0;

fn document(title: &str, body: String) -> Vec<u8> {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 1000 1000\" \
         width=\"1000\" height=\"1000\">\n<title>{title}</title>\n\
         <rect x=\"0\" y=\"0\" width=\"1000\" height=\"1000\" fill=\"white\"/>\n\
         {body}</svg>\n"
    )
    .into_bytes()
}

struct Frame {
    x_min: f64,
    x_span: f64,
    y_min: f64,
    y_span: f64,
}

impl Frame {
    /// Data box -> pixel box, equal scale on both axes, y up.
    fn square(xs: impl Iterator<Item = f64> + Clone, ys: impl Iterator<Item = f64> + Clone) -> Frame {
        let (mut x_min, mut x_max) = (f64::INFINITY, f64::NEG_INFINITY);
        for x in xs {
            x_min = x_min.min(x);
            x_max = x_max.max(x);
        }
        let (mut y_min, mut y_max) = (f64::INFINITY, f64::NEG_INFINITY);
        for y in ys {
            y_min = y_min.min(y);
            y_max = y_max.max(y);
        }
        if !x_min.is_finite() {
            (x_min, x_max) = (0.0, 1.0);
        }
        if !y_min.is_finite() {
            (y_min, y_max) = (0.0, 1.0);
        }
        let span = (x_max - x_min).max(y_max - y_min).max(1e-12);
        // center the shorter axis
        let x_pad = (span - (x_max - x_min)) / 2.0;
        let y_pad = (span - (y_max - y_min)) / 2.0;
        Frame {
            x_min: x_min - x_pad,
            x_span: span,
            y_min: y_min - y_pad,
            y_span: span,
        }
    }

    fn px(&self, x: f64) -> f64 {
        MARGIN + SPAN * (x - self.x_min) / self.x_span
    }

    fn py(&self, y: f64) -> f64 {
        MARGIN + SPAN * (1.0 - (y - self.y_min) / self.y_span)
    }
}

pub fn scatter(points: &[Complex64], title: &str) -> Vec<u8> {
    let frame = Frame::square(
        points.iter().map(|z| z.re),
        points.iter().map(|z| z.im),
    );
    let mut body = String::new();
    for z in points {
        body.push_str(&format!(
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"1\" fill=\"black\"/>\n",
            frame.px(z.re),
            frame.py(z.im)
        ));
    }
    document(title, body)
}

/// log-log count plot with the fitted power law drawn across the x-range.
pub fn loglog(xs: &[f64], ys: &[f64], slope: f64, intercept: f64, title: &str) -> Vec<u8> {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let frame = Frame::square(lx.iter().copied(), ly.iter().copied());
    let mut body = String::new();
    if let (Some(&a), Some(&b)) = (
        lx.iter().min_by(|p, q| p.total_cmp(q)),
        lx.iter().max_by(|p, q| p.total_cmp(q)),
    ) {
        body.push_str(&format!(
            "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" \
             stroke=\"steelblue\" stroke-width=\"2\"/>\n",
            frame.px(a),
            frame.py(slope * a + intercept),
            frame.px(b),
            frame.py(slope * b + intercept)
        ));
    }
    for (x, y) in lx.iter().zip(&ly) {
        body.push_str(&format!(
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"4\" fill=\"black\"/>\n",
            frame.px(*x),
            frame.py(*y)
        ));
    }
    document(title, body)
}

const PALETTE: [&str; 6] = [
    "black",
    "steelblue",
    "firebrick",
    "seagreen",
    "darkorange",
    "purple",
];

/// (r, zeta) phase portrait, one polyline per trajectory.
pub fn portrait(curves: &[Vec<(f64, f64)>], title: &str) -> Vec<u8> {
    let frame = Frame::square(
        curves.iter().flatten().map(|p| p.0),
        curves.iter().flatten().map(|p| p.1),
    );
    let mut body = String::new();
    for (i, curve) in curves.iter().enumerate() {
        let mut attr = String::new();
        for (r, zeta) in curve {
            attr.push_str(&format!("{:.2},{:.2} ", frame.px(*r), frame.py(*zeta)));
        }
        body.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"/>\n",
            attr.trim_end(),
            PALETTE[i % PALETTE.len()]
        ));
    }
    document(title, body)
}
