//! Deterministic text, CSV and SVG emitters for the crown cell.

use std::f64::consts::PI;

use crown_core::exact::to_f64;
use crown_core::rootsys::CrownCell;

/// Fixed-width float rendering at 12 significant digits; identical inputs
/// produce identical bytes.
pub fn ff(x: f64) -> String {
    format!("{:.11e}", x)
}

fn functional_text(coeffs: &[i64], vars: &[String]) -> String {
    let mut terms = Vec::new();
    for (c, v) in coeffs.iter().zip(vars) {
        if *c != 0 {
            terms.push(if terms.is_empty() {
                format!("{c}*{v}")
            } else if *c < 0 {
                format!("- {}*{v}", -c)
            } else {
                format!("+ {c}*{v}")
            });
        }
    }
    terms.join(" ")
}

/// Exact inequality listing: full coordinates, then the chart form.
pub fn emit_inequalities(cell: &CrownCell) -> String {
    let n = cell.ambient_dim();
    let full_vars: Vec<String> = (1..=n).map(|i| format!("l{i}")).collect();
    let chart_vars: Vec<String> = (2..=n).map(|i| format!("l{i}")).collect();
    let mut out = String::new();
    out.push_str("# crown cell, pi units; all inequalities strict\n");
    out.push_str("# full coordinates (l1 + ... + ln = 0)\n");
    for (root, bound) in cell.inequalities() {
        out.push_str(&format!(
            "|{}| < {}\n",
            functional_text(root.coeffs(), &full_vars),
            bound
        ));
    }
    out.push_str(&format!(
        "# chart coordinates ({})\n",
        chart_vars.join(", ")
    ));
    for (root, bound) in cell.inequalities() {
        out.push_str(&format!(
            "|{}| < {}\n",
            functional_text(&root.chart_coeffs(), &chart_vars),
            bound
        ));
    }
    out
}

/// Exact vertex listing in chart coordinates (pi units).
pub fn emit_vertices(cell: &CrownCell) -> String {
    let verts = cell.vertices().expect("cell vertices");
    let n = cell.ambient_dim();
    let chart_vars: Vec<String> = (2..=n).map(|i| format!("l{i}")).collect();
    let mut out = format!(
        "# cell vertices, pi units, chart coordinates ({})\n",
        chart_vars.join(", ")
    );
    for v in &verts {
        let row: Vec<String> = v.chart().iter().map(|q| q.to_string()).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

/// Vertex polygon in radians as CSV; the polygon is closed by repeating the
/// first vertex.
pub fn emit_csv(cell: &CrownCell) -> String {
    let verts = cell.vertices().expect("cell vertices");
    let n = cell.ambient_dim();
    let header: Vec<String> = (2..=n).map(|i| format!("lambda{i}")).collect();
    let mut out = format!("index,{}\n", header.join(","));
    let mut rows: Vec<Vec<f64>> = verts
        .iter()
        .map(|v| v.chart().iter().map(|&q| to_f64(q) * PI).collect())
        .collect();
    if rows.len() > 2 {
        let first = rows[0].clone();
        rows.push(first);
    }
    for (i, row) in rows.iter().enumerate() {
        let cells: Vec<String> = row.iter().map(|&x| ff(x)).collect();
        out.push_str(&format!("{i},{}\n", cells.join(",")));
    }
    out
}

/// 400x400 SVG with axes; the cell spans 80% of the frame. Rank-1 cells are
/// drawn as a segment on the horizontal axis, rank-2 cells as a polygon.
pub fn emit_svg(cell: &CrownCell) -> String {
    let verts = cell.vertices().expect("cell vertices");
    let chart: Vec<Vec<f64>> = verts
        .iter()
        .map(|v| v.chart().iter().map(|&q| to_f64(q) * PI).collect())
        .collect();
    let max_abs = chart
        .iter()
        .flatten()
        .fold(0.0f64, |acc, &x| acc.max(x.abs()));
    let scale = 160.0 / max_abs;
    let px = |x: f64| 200.0 + scale * x;
    let py = |y: f64| 200.0 - scale * y;

    let mut out = String::new();
    out.push_str(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"400\" height=\"400\" viewBox=\"0 0 400 400\">\n",
    );
    out.push_str("<rect x=\"0\" y=\"0\" width=\"400\" height=\"400\" fill=\"white\"/>\n");
    out.push_str(
        "<line x1=\"0\" y1=\"200\" x2=\"400\" y2=\"200\" stroke=\"#999999\" stroke-width=\"1\"/>\n",
    );
    out.push_str(
        "<line x1=\"200\" y1=\"0\" x2=\"200\" y2=\"400\" stroke=\"#999999\" stroke-width=\"1\"/>\n",
    );
    if cell.dimension() == 1 {
        let mut xs: Vec<f64> = chart.iter().map(|v| v[0]).collect();
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        out.push_str(&format!(
            "<line x1=\"{}\" y1=\"200\" x2=\"{}\" y2=\"200\" stroke=\"black\" stroke-width=\"3\"/>\n",
            ff(px(xs[0])),
            ff(px(xs[xs.len() - 1]))
        ));
        for &x in &[xs[0], xs[xs.len() - 1]] {
            out.push_str(&format!(
                "<line x1=\"{0}\" y1=\"192\" x2=\"{0}\" y2=\"208\" stroke=\"black\" stroke-width=\"2\"/>\n",
                ff(px(x))
            ));
        }
    } else {
        let points: Vec<String> = chart
            .iter()
            .map(|v| format!("{},{}", ff(px(v[0])), ff(py(v[1]))))
            .collect();
        out.push_str(&format!(
            "<polygon points=\"{}\" fill=\"none\" stroke=\"black\" stroke-width=\"2\"/>\n",
            points.join(" ")
        ));
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crown_core::rootsys::{crown_cell, restricted_roots_sl};

    #[test]
    fn svg_is_closed_hexagon_for_sl3() {
        let rs = restricted_roots_sl(3).unwrap();
        let cell = crown_cell(&rs);
        let svg = emit_svg(&cell);
        assert!(svg.contains("<polygon"));
        let points = svg.split("points=\"").nth(1).unwrap();
        let count = points.split('"').next().unwrap().split(' ').count();
        assert_eq!(count, 6);
    }

    #[test]
    fn vertices_text_lists_six_rational_lines() {
        let rs = restricted_roots_sl(3).unwrap();
        let cell = crown_cell(&rs);
        let text = emit_vertices(&cell);
        let lines: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(lines.len(), 6);
        assert!(lines.contains(&"1/6 1/6"));
    }

    #[test]
    fn emitters_are_deterministic() {
        let rs = restricted_roots_sl(3).unwrap();
        let cell = crown_cell(&rs);
        assert_eq!(emit_svg(&cell), emit_svg(&cell));
        assert_eq!(emit_csv(&cell), emit_csv(&cell));
        assert_eq!(emit_inequalities(&cell), emit_inequalities(&cell));
    }
}
