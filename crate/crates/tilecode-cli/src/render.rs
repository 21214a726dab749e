//! SVG and OBJ rendering of trajectories.

use tilecode::flow::Trajectory;
use tilecode::geom::{export_obj, EmbeddedTetra, RigidTransform};
use tilecode::lattice::project;

const SVG_UNIT: f64 = 80.0;
const SVG_MARGIN: f64 = 40.0;

/// Render a dimension-3 trajectory as flat triangles with the gradient
/// indicated by a bold edge on each.
pub fn trajectory_svg(t: &Trajectory) -> String {
    let mut polys = Vec::new();
    let mut bolds = Vec::new();
    let mut min = [f64::INFINITY; 2];
    let mut max = [f64::NEG_INFINITY; 2];

    for step in &t.steps {
        let verts = step.surface.vertices();
        let pts: Vec<[f64; 2]> = verts
            .iter()
            .map(|v| {
                let p = project(v);
                // flip y so the flow reads top-down on screen
                [p[0] * SVG_UNIT, -p[1] * SVG_UNIT]
            })
            .collect();
        for p in &pts {
            for a in 0..2 {
                min[a] = min[a].min(p[a]);
                max[a] = max[a].max(p[a]);
            }
        }
        polys.push(pts.clone());
        // the gradient's bold edge runs alongside the direction of travel
        bolds.push((pts[0], pts[2]));
    }

    let ox = SVG_MARGIN - min[0];
    let oy = SVG_MARGIN - min[1];
    let width = max[0] - min[0] + 2.0 * SVG_MARGIN;
    let height = max[1] - min[1] + 2.0 * SVG_MARGIN;

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" \
         viewBox=\"0 0 {width:.0} {height:.0}\">\n"
    ));
    for (i, pts) in polys.iter().enumerate() {
        let points: Vec<String> =
            pts.iter().map(|p| format!("{:.2},{:.2}", p[0] + ox, p[1] + oy)).collect();
        svg.push_str(&format!(
            "  <polygon points=\"{}\" fill=\"#f2f2f2\" stroke=\"#999999\" stroke-width=\"1\"/>\n",
            points.join(" ")
        ));
        let (a, b) = bolds[i];
        svg.push_str(&format!(
            "  <line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" \
             stroke=\"#222222\" stroke-width=\"4\" stroke-linecap=\"round\"/>\n",
            a[0] + ox,
            a[1] + oy,
            b[0] + ox,
            b[1] + oy
        ));
        let cx = (pts[0][0] + pts[1][0] + pts[2][0]) / 3.0 + ox;
        let cy = (pts[0][1] + pts[1][1] + pts[2][1]) / 3.0 + oy;
        svg.push_str(&format!(
            "  <text x=\"{cx:.2}\" y=\"{cy:.2}\" font-size=\"12\" text-anchor=\"middle\">{i}</text>\n"
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

/// Render a dimension-4 trajectory's surface tetrahedra as OBJ geometry.
pub fn trajectory_obj(t: &Trajectory, scale: f64) -> String {
    let tetras: Vec<EmbeddedTetra> = t
        .steps
        .iter()
        .map(|s| EmbeddedTetra::new(s.surface, RigidTransform::identity(), scale))
        .collect();
    export_obj(&tetras)
}
