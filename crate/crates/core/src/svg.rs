//! SVG figures: input ellipses, a rasterized feasible region, the tangent
//! polygon and the bounding ellipse.

use std::fmt::Write as _;
use std::path::Path;

use crate::conic::EllipseAffine;
use crate::linalg::Vec2;
use crate::polygon::BoundingPolygon;
use crate::sampling::half_widths;

const OUTLINE_SAMPLES: usize = 180;
const RASTER: usize = 120;
const WIDTH_PX: f64 = 800.0;

pub struct Figure<'a> {
    pub inputs: &'a [EllipseAffine],
    pub polygon: Option<&'a BoundingPolygon>,
    pub bound: Option<&'a EllipseAffine>,
}

fn ellipse_path(e: &EllipseAffine) -> String {
    let mut d = String::new();
    for k in 0..OUTLINE_SAMPLES {
        let z = e.point_at_angle(std::f64::consts::TAU * k as f64 / OUTLINE_SAMPLES as f64);
        let cmd = if k == 0 { 'M' } else { 'L' };
        write!(d, "{cmd}{:.6} {:.6} ", z[0], -z[1]).unwrap();
    }
    d.push('Z');
    d
}

fn extent(f: &Figure) -> (Vec2, Vec2) {
    let mut lo = Vec2::repeat(f64::INFINITY);
    let mut hi = Vec2::repeat(f64::NEG_INFINITY);
    for e in f.inputs.iter().chain(f.bound) {
        let h = half_widths(e);
        lo = lo.inf(&(e.center() - h));
        hi = hi.sup(&(e.center() + h));
    }
    if let Some(p) = f.polygon {
        for v in &p.vertices {
            lo = lo.inf(v);
            hi = hi.sup(v);
        }
    }
    let pad = 0.1 * (hi - lo);
    (lo - pad, hi + pad)
}

pub fn render(f: &Figure) -> String {
    let (lo, hi) = extent(f);
    let size = hi - lo;
    let height_px = WIDTH_PX * size[1] / size[0];
    // User units are model units with y flipped.
    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH_PX:.0}" height="{height_px:.0}" viewBox="{:.6} {:.6} {:.6} {:.6}">"#,
        lo[0], -hi[1], size[0], size[1]
    )
    .unwrap();
    s.push_str(
        "<style>path,polygon{fill:none;vector-effect:non-scaling-stroke}\
.input-ellipse{stroke:#555;stroke-width:1}\
.bounding-polygon{stroke:#1f77b4;stroke-width:1.5}\
.bounding-ellipse{stroke:#d62728;stroke-width:2}\
.feasible rect{fill:#9ecae1;fill-opacity:0.6}</style>\n",
    );

    let cell = size / RASTER as f64;
    s.push_str("<g class=\"feasible\">\n");
    for i in 0..RASTER {
        for j in 0..RASTER {
            let c = lo + Vec2::new((i as f64 + 0.5) * cell[0], (j as f64 + 0.5) * cell[1]);
            if f.inputs.iter().all(|e| e.contains(&c, 0.0)) {
                writeln!(
                    s,
                    r#"<rect x="{:.6}" y="{:.6}" width="{:.6}" height="{:.6}"/>"#,
                    c[0] - 0.5 * cell[0],
                    -c[1] - 0.5 * cell[1],
                    cell[0],
                    cell[1]
                )
                .unwrap();
            }
        }
    }
    s.push_str("</g>\n");

    for e in f.inputs {
        writeln!(s, r#"<path class="input-ellipse" d="{}"/>"#, ellipse_path(e)).unwrap();
    }
    if let Some(p) = f.polygon {
        let pts: Vec<String> = p
            .vertices
            .iter()
            .map(|v| format!("{:.6},{:.6}", v[0], -v[1]))
            .collect();
        writeln!(s, r#"<polygon class="bounding-polygon" points="{}"/>"#, pts.join(" ")).unwrap();
    }
    if let Some(e) = f.bound {
        writeln!(s, r#"<path class="bounding-ellipse" d="{}"/>"#, ellipse_path(e)).unwrap();
    }
    s.push_str("</svg>\n");
    s
}

pub fn emit_svg(f: &Figure, path: &Path) -> std::io::Result<()> {
    std::fs::write(path, render(f))
}
