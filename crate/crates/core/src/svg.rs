//! Deterministic SVG output for display lists.

use crate::display::{DrawCommand, Font, Rgba, TextAnchor};
use crate::geometry::RectBounds;
use std::fmt::Write;

pub const CANVAS_WIDTH: f64 = 960.0;
pub const CANVAS_HEIGHT: f64 = 720.0;

/// Rounds to three decimals and drops trailing zeros; `-0` prints as `0`.
pub fn fmt_num(v: f64) -> String {
    let mut s = format!("{v:.3}");
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    if s == "-0" {
        s = "0".into();
    }
    s
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

fn paint(attr: &str, c: Rgba) -> String {
    let mut s = format!(r#" {attr}="rgb({},{},{})""#, c.r, c.g, c.b);
    if c.a != 255 {
        let _ = write!(s, r#" {attr}-opacity="{}""#, fmt_num(f64::from(c.a) / 255.0));
    }
    s
}

fn rect_attrs(r: &RectBounds) -> String {
    format!(
        r#"x="{}" y="{}" width="{}" height="{}""#,
        fmt_num(r.left),
        fmt_num(r.top),
        fmt_num(r.width),
        fmt_num(r.height)
    )
}

fn font_attrs(f: &Font) -> String {
    let mut s = format!(r#" font-family="{}" font-size="{}""#, escape(&f.family), fmt_num(f.size));
    if f.bold {
        s.push_str(r#" font-weight="bold""#);
    }
    if f.italic {
        s.push_str(r#" font-style="italic""#);
    }
    s
}

fn write_command(out: &mut String, cmd: &DrawCommand, depth: usize) {
    let indent = "  ".repeat(depth);
    out.push_str(&indent);
    match cmd {
        DrawCommand::FillRect { rect, color } => {
            let _ = writeln!(out, "<rect {}{}/>", rect_attrs(rect), paint("fill", *color));
        }
        DrawCommand::FillEllipse { rect, color } => {
            let c = rect.center();
            let _ = writeln!(
                out,
                r#"<ellipse cx="{}" cy="{}" rx="{}" ry="{}"{}/>"#,
                fmt_num(c.x),
                fmt_num(c.y),
                fmt_num(rect.width / 2.0),
                fmt_num(rect.height / 2.0),
                paint("fill", *color)
            );
        }
        DrawCommand::StrokeRect { rect, color, width } => {
            let _ = writeln!(
                out,
                r#"<rect {} fill="none"{} stroke-width="{}"/>"#,
                rect_attrs(rect),
                paint("stroke", *color),
                fmt_num(*width)
            );
        }
        DrawCommand::Frame { rect, color } => {
            let _ = writeln!(
                out,
                r#"<rect class="frame" {} rx="4" fill="none"{} stroke-width="1"/>"#,
                rect_attrs(rect),
                paint("stroke", *color)
            );
        }
        DrawCommand::Text {
            at,
            text,
            font,
            color,
            anchor,
        } => {
            let anchor = match anchor {
                TextAnchor::Start => "start",
                TextAnchor::Middle => "middle",
                TextAnchor::End => "end",
            };
            let _ = writeln!(
                out,
                r#"<text x="{}" y="{}"{} text-anchor="{anchor}"{}>{}</text>"#,
                fmt_num(at.x),
                fmt_num(at.y),
                font_attrs(font),
                paint("fill", *color),
                escape(text)
            );
        }
        DrawCommand::Polyline { points, color, width } => {
            let pts: Vec<String> = points.iter().map(|p| format!("{},{}", fmt_num(p.x), fmt_num(p.y))).collect();
            let _ = writeln!(
                out,
                r#"<polyline points="{}" fill="none"{} stroke-width="{}"/>"#,
                pts.join(" "),
                paint("stroke", *color),
                fmt_num(*width)
            );
        }
        DrawCommand::Group { offset, children } => {
            let _ = writeln!(out, r#"<g transform="translate({},{})">"#, fmt_num(offset.x), fmt_num(offset.y));
            for child in children {
                write_command(out, child, depth + 1);
            }
            out.push_str(&indent);
            out.push_str("</g>\n");
        }
    }
}

/// SVG 1.1 document for a display list on the fixed canvas.
pub fn render_svg(list: &[DrawCommand]) -> String {
    let (w, h) = (fmt_num(CANVAS_WIDTH), fmt_num(CANVAS_HEIGHT));
    let mut out = format!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n"
    );
    for cmd in list {
        write_command(&mut out, cmd, 1);
    }
    out.push_str("</svg>\n");
    out
}
