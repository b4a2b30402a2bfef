//! Static picture of a two-variable subdivision.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};

use certiroot::{Fate, IntervalVector, IsolationOutput};

const SIZE: f64 = 600.0;

fn fate_class(f: Fate) -> Option<(&'static str, &'static str)> {
    Some(match f {
        Fate::Excluded | Fate::InnerExcluded => ("excluded", "#d9d9d9"),
        Fate::Subdivided | Fate::InnerSubdivided => ("subdivided", "none"),
        Fate::Discarded => ("discarded", "#f4b183"),
        Fate::Undecided => ("undecided", "#b4a7d6"),
        Fate::Output => ("generator", "#9fc5e8"),
        Fate::JacobianPassed => return None,
    })
}

/// Renders the trace of `out`; the view is `2 * roi`, where output boxes
/// may reach.
pub fn render_svg(out: &IsolationOutput) -> Result<String> {
    if out.roi.dim() != 2 {
        bail!(
            "unsupported dimension {}: pictures need exactly two variables",
            out.roi.dim()
        );
    }
    let roi = out.roi.to_box();
    let (x0, x1) = roi[0].to_f64_pair();
    let (y0, y1) = roi[1].to_f64_pair();
    let (w, h) = (x1 - x0, y1 - y0);
    let (vx, vy) = (x0 - w / 2.0, y0 - h / 2.0);
    let scale = SIZE / (2.0 * w);
    let rect = |b: &IntervalVector| {
        let (a, c) = b[0].to_f64_pair();
        let (bb, d) = b[1].to_f64_pair();
        (
            (a - vx) * scale,
            SIZE - (d - vy) * scale,
            (c - a) * scale,
            (d - bb) * scale,
        )
    };
    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    )?;
    writeln!(s, r#"<rect width="{SIZE}" height="{SIZE}" fill="white"/>"#)?;
    for t in &out.trace {
        let Some((class, fill)) = fate_class(t.fate) else {
            continue;
        };
        let (x, y, rw, rh) = rect(&t.cell.realize(&out.roi));
        writeln!(
            s,
            r##"<rect class="{class}" x="{x:.3}" y="{y:.3}" width="{rw:.3}" height="{rh:.3}" fill="{fill}" stroke="#808080" stroke-width="0.5"/>"##
        )?;
    }
    let (x, y, rw, rh) = rect(&roi);
    writeln!(
        s,
        r#"<rect class="roi" x="{x:.3}" y="{y:.3}" width="{rw:.3}" height="{rh:.3}" fill="none" stroke="black" stroke-width="1.5"/>"#
    )?;
    for b in &out.boxes {
        let (x, y, rw, rh) = rect(&b.region);
        writeln!(
            s,
            r#"<rect class="output" x="{x:.3}" y="{y:.3}" width="{rw:.3}" height="{rh:.3}" fill="none" stroke="red" stroke-width="2"/>"#
        )?;
    }
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn write_svg(out: &IsolationOutput, path: &Path) -> Result<()> {
    let svg = render_svg(out)?;
    fs::write(path, svg).with_context(|| format!("writing {}", path.display()))
}
