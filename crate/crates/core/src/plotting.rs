//! Plot areas: world/screen mapping, tick generation and curve display.
//!
//! A plot is an ordinary scene element; its screen bounds come from the
//! element while the world window lives here. World `y` grows upward and
//! screen `y` grows downward. Resizing a plot rescales the mapping, the
//! world window is never re-fitted.

use crate::display::{DrawCommand, Font, Rgba, TextAnchor};
use crate::geometry::{Point, RectBounds};
use crate::interpreter::{parse, sample_curve, ExprAst, ExprError};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const DEFAULT_SAMPLES: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("range must satisfy lo < hi with finite ends")]
pub struct BadRange;

/// World-coordinate window shown by a plot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WorldRange {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl WorldRange {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Result<Self, BadRange> {
        let range = Self {
            x_min,
            x_max,
            y_min,
            y_max,
        };
        if range.is_valid() {
            Ok(range)
        } else {
            Err(BadRange)
        }
    }

    pub fn is_valid(&self) -> bool {
        [self.x_min, self.x_max, self.y_min, self.y_max]
            .iter()
            .all(|v| v.is_finite())
            && self.x_min < self.x_max
            && self.y_min < self.y_max
    }
}

/// One plotted function. Only the source text is persisted; the tree is
/// rebuilt from it on load.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CurveRecord", into = "CurveRecord")]
pub struct Curve {
    source: String,
    ast: ExprAst,
    pub color: Rgba,
    pub samples: usize,
}

#[derive(Serialize, Deserialize)]
struct CurveRecord {
    expr: String,
    color: Rgba,
    samples: usize,
}

impl TryFrom<CurveRecord> for Curve {
    type Error = String;

    fn try_from(rec: CurveRecord) -> Result<Self, Self::Error> {
        if rec.samples < 2 {
            return Err(format!("curve `{}` needs at least 2 samples", rec.expr));
        }
        let mut curve = Curve::new(&rec.expr, rec.color).map_err(|e| format!("curve `{}`: {e}", rec.expr))?;
        curve.samples = rec.samples;
        Ok(curve)
    }
}

impl From<Curve> for CurveRecord {
    fn from(c: Curve) -> Self {
        CurveRecord {
            expr: c.source,
            color: c.color,
            samples: c.samples,
        }
    }
}

impl Curve {
    pub fn new(source: &str, color: Rgba) -> Result<Self, ExprError> {
        Ok(Self {
            ast: parse(source)?,
            source: source.to_owned(),
            color,
            samples: DEFAULT_SAMPLES,
        })
    }

    pub fn with_samples(mut self, samples: usize) -> Self {
        self.samples = samples.max(2);
        self
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn ast(&self) -> &ExprAst {
        &self.ast
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotArea {
    pub world: WorldRange,
    pub curves: Vec<Curve>,
    pub comment: String,
}

impl PlotArea {
    pub fn new(world: WorldRange) -> Self {
        Self {
            world,
            curves: Vec::new(),
            comment: String::new(),
        }
    }
}

/// Maps a world point onto the screen rectangle `bounds`.
pub fn world_to_screen(bounds: &RectBounds, world: &WorldRange, wp: Point) -> Point {
    let local = world_to_local(bounds.width, bounds.height, world, wp);
    Point::new(bounds.left + local.x, bounds.top + local.y)
}

/// Inverse of [`world_to_screen`].
pub fn screen_to_world(bounds: &RectBounds, world: &WorldRange, p: Point) -> Point {
    let fx = (p.x - bounds.left) / bounds.width;
    let fy = (p.y - bounds.top) / bounds.height;
    Point::new(
        world.x_min + fx * (world.x_max - world.x_min),
        world.y_max - fy * (world.y_max - world.y_min),
    )
}

fn world_to_local(width: f64, height: f64, world: &WorldRange, wp: Point) -> Point {
    Point::new(
        (wp.x - world.x_min) / (world.x_max - world.x_min) * width,
        (world.y_max - wp.y) / (world.y_max - world.y_min) * height,
    )
}

/// A tick step `mantissa × 10^exponent` with mantissa in {1, 2, 5}.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TickStep {
    pub mantissa: i64,
    pub exponent: i32,
}

impl TickStep {
    pub fn value(self) -> f64 {
        self.mantissa as f64 * 10f64.powi(self.exponent)
    }

    /// `i × step`, computed so decimal steps land on the nearest double of
    /// the exact decimal (0.6 rather than 0.6000000000000001).
    pub fn nth(self, i: i64) -> f64 {
        let m = (i * self.mantissa) as f64;
        if self.exponent >= 0 {
            m * 10f64.powi(self.exponent)
        } else {
            m / 10f64.powi(-self.exponent)
        }
    }

    fn first_index(self, lo: f64) -> i64 {
        let mut i = (lo / self.value()).ceil() as i64;
        while self.nth(i - 1) >= lo {
            i -= 1;
        }
        while self.nth(i) < lo {
            i += 1;
        }
        i
    }

    fn last_index(self, hi: f64) -> i64 {
        let mut i = (hi / self.value()).floor() as i64;
        while self.nth(i + 1) <= hi {
            i += 1;
        }
        while self.nth(i) > hi {
            i -= 1;
        }
        i
    }

    /// Digits after the decimal point needed to print ticks of this step.
    pub fn decimals(self) -> usize {
        usize::try_from(-self.exponent).unwrap_or(0)
    }
}

/// Picks the {1,2,5}×10^k step whose tick count inside `[lo, hi]` is closest
/// to `target`; ties go to the larger step.
pub fn choose_step(lo: f64, hi: f64, target: usize) -> Result<TickStep, BadRange> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) || target < 2 {
        return Err(BadRange);
    }
    let rough = (hi - lo) / target as f64;
    let k0 = rough.log10().floor() as i32;
    let mut best: Option<(TickStep, u64)> = None;
    for exponent in (k0 - 1..=k0 + 2).rev() {
        for mantissa in [5, 2, 1] {
            let step = TickStep { mantissa, exponent };
            let count = step.last_index(hi) - step.first_index(lo) + 1;
            let miss = (count - target as i64).unsigned_abs();
            if best.is_none_or(|(_, m)| miss < m) {
                best = Some((step, miss));
            }
        }
    }
    Ok(best.expect("candidate ladder is non-empty").0)
}

/// Tick values inside `[lo, hi]` at multiples of the chosen step.
pub fn nice_ticks(lo: f64, hi: f64, target: usize) -> Result<Vec<f64>, BadRange> {
    let step = choose_step(lo, hi, target)?;
    Ok((step.first_index(lo)..=step.last_index(hi))
        .map(|i| step.nth(i))
        .collect())
}

fn format_tick(v: f64, decimals: usize) -> String {
    let s = format!("{v:.decimals$}");
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_owned()
    } else {
        s
    }
}

const AXIS_COLOR: Rgba = Rgba::rgb(96, 96, 96);
const TICK_LEN: f64 = 4.0;
const TICK_TARGET: usize = 5;

/// Display fragment for a plot occupying `bounds`.
///
/// Everything is drawn in plot-local coordinates inside a single
/// [`DrawCommand::Group`] offset by the plot origin, so moving the plot only
/// changes that offset.
pub fn plot_display(plot: &PlotArea, bounds: &RectBounds, color: Rgba, font: &Font) -> DrawCommand {
    let (w, h) = (bounds.width, bounds.height);
    let world = &plot.world;
    let local = |wp: Point| world_to_local(w, h, world, wp);
    let mut children = vec![
        DrawCommand::FillRect {
            rect: RectBounds::new(0.0, 0.0, w, h),
            color: Rgba::WHITE,
        },
        DrawCommand::StrokeRect {
            rect: RectBounds::new(0.0, 0.0, w, h),
            color,
            width: 1.0,
        },
    ];

    // Axes sit on zero when it is in view, otherwise on the bottom/left edge.
    let axis_y = if world.y_min <= 0.0 && 0.0 <= world.y_max { 0.0 } else { world.y_min };
    let axis_x = if world.x_min <= 0.0 && 0.0 <= world.x_max { 0.0 } else { world.x_min };
    let x_axis = local(Point::new(0.0, axis_y)).y;
    let y_axis = local(Point::new(axis_x, 0.0)).x;
    let axis_line = |points: Vec<Point>| DrawCommand::Polyline {
        points,
        color: AXIS_COLOR,
        width: 1.0,
    };
    children.push(axis_line(vec![Point::new(0.0, x_axis), Point::new(w, x_axis)]));
    children.push(axis_line(vec![Point::new(y_axis, 0.0), Point::new(y_axis, h)]));

    let label_font = Font {
        size: (font.size * 0.8).max(1.0),
        ..font.clone()
    };
    if let Ok(step) = choose_step(world.x_min, world.x_max, TICK_TARGET) {
        for v in nice_ticks(world.x_min, world.x_max, TICK_TARGET).unwrap_or_default() {
            let x = local(Point::new(v, 0.0)).x;
            children.push(axis_line(vec![
                Point::new(x, x_axis - TICK_LEN),
                Point::new(x, x_axis + TICK_LEN),
            ]));
            children.push(DrawCommand::Text {
                at: Point::new(x, x_axis + TICK_LEN + label_font.size),
                text: format_tick(v, step.decimals()),
                font: label_font.clone(),
                color: AXIS_COLOR,
                anchor: TextAnchor::Middle,
            });
        }
    }
    if let Ok(step) = choose_step(world.y_min, world.y_max, TICK_TARGET) {
        for v in nice_ticks(world.y_min, world.y_max, TICK_TARGET).unwrap_or_default() {
            let y = local(Point::new(0.0, v)).y;
            children.push(axis_line(vec![
                Point::new(y_axis - TICK_LEN, y),
                Point::new(y_axis + TICK_LEN, y),
            ]));
            children.push(DrawCommand::Text {
                at: Point::new(y_axis - TICK_LEN - 2.0, y + label_font.size / 3.0),
                text: format_tick(v, step.decimals()),
                font: label_font.clone(),
                color: AXIS_COLOR,
                anchor: TextAnchor::End,
            });
        }
    }

    if !plot.comment.is_empty() {
        children.push(DrawCommand::Text {
            at: Point::new(6.0, font.size + 4.0),
            text: plot.comment.clone(),
            font: font.clone(),
            color,
            anchor: TextAnchor::Start,
        });
    }

    for curve in &plot.curves {
        for run in curve_runs(curve, world) {
            children.push(DrawCommand::Polyline {
                points: run.into_iter().map(local).collect(),
                color: curve.color,
                width: 1.5,
            });
        }
    }

    DrawCommand::Group {
        offset: bounds.origin(),
        children,
    }
}

/// Splits a sampled curve into drawable runs. A run breaks at non-finite
/// samples and at samples far outside the vertical window (one window
/// height beyond either edge), so poles do not draw spikes across the plot.
pub fn curve_runs(curve: &Curve, world: &WorldRange) -> Vec<Vec<Point>> {
    let Ok(samples) = sample_curve(curve.ast(), world.x_min, world.x_max, curve.samples) else {
        return Vec::new();
    };
    let span = world.y_max - world.y_min;
    let (lo, hi) = (world.y_min - span, world.y_max + span);
    let mut runs = Vec::new();
    let mut current: Vec<Point> = Vec::new();
    for s in samples {
        if s.is_finite() && s.y >= lo && s.y <= hi {
            current.push(Point::new(s.x, s.y));
        } else if !current.is_empty() {
            runs.push(std::mem::take(&mut current));
        }
    }
    runs.push(current);
    runs.retain(|r| r.len() >= 2);
    runs
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Independent ladder oracle: walk every {1,2,5}×10^k step over a wide
    /// exponent span and count multiples by brute force.
    fn oracle_ticks(lo: f64, hi: f64, target: usize) -> Vec<f64> {
        let mut best: Option<(Vec<f64>, usize)> = None;
        for k in (-6..=6).rev() {
            for m in [5.0, 2.0, 1.0] {
                let step = m * 10f64.powi(k);
                let count = ((hi - lo) / step) as usize + 2;
                if count > 100_000 {
                    continue;
                }
                let start = (lo / step).floor() as i64 - 1;
                let ticks: Vec<f64> = (start..start + count as i64 + 2)
                    .map(|i| i as f64 * step)
                    .filter(|v| *v >= lo - 1e-12 && *v <= hi + 1e-12)
                    .collect();
                let miss = ticks.len().abs_diff(target);
                if best.as_ref().is_none_or(|(_, b)| miss < *b) {
                    best = Some((ticks, miss));
                }
            }
        }
        best.unwrap().0
    }

    #[test]
    fn tick_examples() {
        assert_eq!(nice_ticks(0.0, 10.0, 5).unwrap(), vec![0.0, 2.0, 4.0, 6.0, 8.0, 10.0]);
        assert_eq!(
            nice_ticks(0.0, 1.0, 5).unwrap(),
            vec![0.0, 0.2, 0.4, 0.6, 0.8, 1.0]
        );
        assert_eq!(nice_ticks(-1.0, 1.0, 3).unwrap(), vec![-1.0, 0.0, 1.0]);
        assert_eq!(nice_ticks(1.0, 1.0, 3), Err(BadRange));
        assert_eq!(nice_ticks(0.0, 1.0, 1), Err(BadRange));
    }

    #[test]
    fn ticks_match_oracle() {
        let cases = [
            (0.0, 10.0, 5),
            (0.0, 1.0, 5),
            (-1.0, 1.0, 3),
            (-6.25, 6.5, 5),
            (-1.5, 1.5, 5),
            (3.0, 1234.0, 7),
            (0.001, 0.0173, 4),
        ];
        for (lo, hi, target) in cases {
            let got = nice_ticks(lo, hi, target).unwrap();
            let want = oracle_ticks(lo, hi, target);
            assert_eq!(got.len(), want.len(), "{lo}..{hi}");
            for (g, w) in got.iter().zip(&want) {
                assert!((g - w).abs() <= 1e-9 * w.abs().max(1e-9), "{lo}..{hi}: {got:?} vs {want:?}");
            }
        }
    }

    #[test]
    fn mapping_examples() {
        let bounds = RectBounds::new(100.0, 100.0, 200.0, 100.0);
        let world = WorldRange::new(0.0, 10.0, 0.0, 5.0).unwrap();
        assert_eq!(world_to_screen(&bounds, &world, Point::new(0.0, 0.0)), Point::new(100.0, 200.0));
        assert_eq!(world_to_screen(&bounds, &world, Point::new(10.0, 5.0)), Point::new(300.0, 100.0));
        assert_eq!(world_to_screen(&bounds, &world, Point::new(5.0, 2.5)), Point::new(200.0, 150.0));
        assert_eq!(screen_to_world(&bounds, &world, Point::new(200.0, 150.0)), Point::new(5.0, 2.5));
    }

    #[test]
    fn world_range_validation() {
        assert!(WorldRange::new(0.0, 1.0, 0.0, 1.0).is_ok());
        assert_eq!(WorldRange::new(1.0, 0.0, 0.0, 1.0), Err(BadRange));
        assert_eq!(WorldRange::new(0.0, 1.0, 0.0, f64::INFINITY), Err(BadRange));
    }

    fn polylines(cmd: &DrawCommand, color: Rgba) -> usize {
        match cmd {
            DrawCommand::Group { children, .. } => children
                .iter()
                .filter(|c| matches!(c, DrawCommand::Polyline { color: c, .. } if *c == color))
                .count(),
            _ => 0,
        }
    }

    #[test]
    fn display_with_no_curves_has_frame_and_axes_only() {
        let plot = PlotArea::new(WorldRange::new(-1.0, 1.0, -1.0, 1.0).unwrap());
        let frag = plot_display(&plot, &RectBounds::new(0.0, 0.0, 200.0, 100.0), Rgba::BLACK, &Font::default());
        let DrawCommand::Group { children, .. } = &frag else { panic!() };
        assert!(children.iter().any(|c| matches!(c, DrawCommand::StrokeRect { .. })));
        assert_eq!(polylines(&frag, Rgba::rgb(1, 2, 3)), 0);
        assert!(!children.iter().any(|c| matches!(c, DrawCommand::Polyline { width, .. } if *width == 1.5)));
    }

    #[test]
    fn reciprocal_breaks_at_pole() {
        let red = Rgba::rgb(200, 0, 0);
        let mut plot = PlotArea::new(WorldRange::new(-1.0, 1.0, -10.0, 10.0).unwrap());
        plot.curves.push(Curve::new("1/x", red).unwrap().with_samples(3));
        let frag = plot_display(&plot, &RectBounds::new(0.0, 0.0, 200.0, 100.0), Rgba::BLACK, &Font::default());
        // Three samples: the middle one is the pole, leaving two 1-point runs.
        assert_eq!(polylines(&frag, red), 0);

        plot.curves[0] = Curve::new("1/x", red).unwrap().with_samples(101);
        let frag = plot_display(&plot, &RectBounds::new(0.0, 0.0, 200.0, 100.0), Rgba::BLACK, &Font::default());
        assert_eq!(polylines(&frag, red), 2);
    }

    #[test]
    fn moving_changes_only_the_offset() {
        let mut plot = PlotArea::new(WorldRange::new(-6.0, 6.0, -1.5, 1.5).unwrap());
        plot.curves.push(Curve::new("sin(x)", Rgba::rgb(0, 0, 200)).unwrap());
        plot.comment = "sine".into();
        let a = plot_display(&plot, &RectBounds::new(10.0, 20.0, 300.0, 200.0), Rgba::BLACK, &Font::default());
        let b = plot_display(&plot, &RectBounds::new(17.25, -3.5, 300.0, 200.0), Rgba::BLACK, &Font::default());
        let (DrawCommand::Group { offset: oa, children: ca }, DrawCommand::Group { offset: ob, children: cb }) = (a, b)
        else {
            panic!()
        };
        assert_eq!(ca, cb);
        assert_eq!((ob.x - oa.x, ob.y - oa.y), (7.25, -23.5));
    }

    #[test]
    fn curve_serde_keeps_source() {
        let curve = Curve::new("sin(x) + 1", Rgba::BLACK).unwrap();
        let json = serde_json::to_string(&curve).unwrap();
        assert!(json.contains("\"expr\":\"sin(x) + 1\""));
        let back: Curve = serde_json::from_str(&json).unwrap();
        assert_eq!(back, curve);
        assert!(serde_json::from_str::<Curve>(r#"{"expr":"2x","color":{"r":0,"g":0,"b":0,"a":255},"samples":10}"#).is_err());
    }

    proptest! {
        #[test]
        fn screen_world_round_trip(
            l in -1e3f64..1e3, t in -1e3f64..1e3, w in 1f64..2e3, h in 1f64..2e3,
            x0 in -1e3f64..1e3, xs in 1e-3f64..1e3, y0 in -1e3f64..1e3, ys in 1e-3f64..1e3,
            fx in -0.5f64..1.5, fy in -0.5f64..1.5,
        ) {
            let bounds = RectBounds::new(l, t, w, h);
            let world = WorldRange::new(x0, x0 + xs, y0, y0 + ys).unwrap();
            let wp = Point::new(x0 + fx * xs, y0 + fy * ys);
            let back = screen_to_world(&bounds, &world, world_to_screen(&bounds, &world, wp));
            prop_assert!((back.x - wp.x).abs() <= 1e-9 * wp.x.abs().max(xs));
            prop_assert!((back.y - wp.y).abs() <= 1e-9 * wp.y.abs().max(ys));
        }

        #[test]
        fn ticks_are_uniform_ladder_steps(lo in -1e4f64..1e4, span in 1e-3f64..1e4, target in 2usize..12) {
            let hi = lo + span;
            let step = choose_step(lo, hi, target).unwrap();
            prop_assert!([1, 2, 5].contains(&step.mantissa));
            let ticks = nice_ticks(lo, hi, target).unwrap();
            for pair in ticks.windows(2) {
                prop_assert!(pair[1] > pair[0]);
                prop_assert!(((pair[1] - pair[0]) - step.value()).abs() <= 1e-9 * step.value().max(hi.abs()));
            }
            for t in &ticks {
                prop_assert!(*t >= lo && *t <= hi);
            }
        }
    }
}
