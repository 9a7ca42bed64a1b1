//! Plane geometry shared by covers, groups and plotting.
//!
//! Coordinates are `f64` logical pixels with the origin at the top-left and
//! `y` growing downward. Positions are never snapped; rounding happens only
//! when a display list is rendered.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("bounding box of an empty collection")]
    EmptyCollection,
}

/// A point in logical pixels.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn offset(self, dx: f64, dy: f64) -> Self {
        Self::new(self.x + dx, self.y + dy)
    }

    pub fn distance_squared(self, other: Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }
}

/// Axis-aligned rectangle stored as origin plus size.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct RectBounds {
    pub left: f64,
    pub top: f64,
    pub width: f64,
    pub height: f64,
}

impl RectBounds {
    pub const fn new(left: f64, top: f64, width: f64, height: f64) -> Self {
        Self {
            left,
            top,
            width,
            height,
        }
    }

    /// Builds a rectangle from its left/top and right/bottom coordinates.
    pub fn from_corners(left: f64, top: f64, right: f64, bottom: f64) -> Self {
        Self::new(left, top, right - left, bottom - top)
    }

    pub fn right(&self) -> f64 {
        self.left + self.width
    }

    pub fn bottom(&self) -> f64 {
        self.top + self.height
    }

    pub fn origin(&self) -> Point {
        Point::new(self.left, self.top)
    }

    pub fn center(&self) -> Point {
        Point::new(
            self.left + self.width / 2.0,
            self.top + self.height / 2.0,
        )
    }

    /// Finite coordinates and a non-negative size.
    pub fn is_valid(&self) -> bool {
        self.left.is_finite()
            && self.top.is_finite()
            && self.width.is_finite()
            && self.height.is_finite()
            && self.width >= 0.0
            && self.height >= 0.0
    }

    /// Boundary-inclusive containment.
    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.left && p.x <= self.right() && p.y >= self.top && p.y <= self.bottom()
    }

    /// True when `other` lies entirely inside `self` (shared edges allowed).
    pub fn contains_rect(&self, other: &RectBounds) -> bool {
        other.left >= self.left
            && other.top >= self.top
            && other.right() <= self.right()
            && other.bottom() <= self.bottom()
    }

    /// Grows the rectangle by `margin` on every side.
    pub fn padded(&self, margin: f64) -> Self {
        Self::from_corners(
            self.left - margin,
            self.top - margin,
            self.right() + margin,
            self.bottom() + margin,
        )
    }

    /// Corner points in NW, NE, SE, SW order.
    pub fn corners(&self) -> [Point; 4] {
        let (l, t, r, b) = (self.left, self.top, self.right(), self.bottom());
        [
            Point::new(l, t),
            Point::new(r, t),
            Point::new(r, b),
            Point::new(l, b),
        ]
    }
}

/// Allowed size interval for resizing an element.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SizeRange {
    pub min_w: f64,
    pub min_h: f64,
    pub max_w: f64,
    pub max_h: f64,
}

impl SizeRange {
    /// Range used by elements whose size is derived rather than dragged.
    pub const UNBOUNDED: SizeRange = SizeRange {
        min_w: f64::MIN_POSITIVE,
        min_h: f64::MIN_POSITIVE,
        max_w: f64::MAX,
        max_h: f64::MAX,
    };

    pub const fn new(min_w: f64, min_h: f64, max_w: f64, max_h: f64) -> Self {
        Self {
            min_w,
            min_h,
            max_w,
            max_h,
        }
    }

    pub fn is_valid(&self) -> bool {
        self.min_w > 0.0
            && self.min_h > 0.0
            && self.min_w <= self.max_w
            && self.min_h <= self.max_h
            && self.max_w.is_finite()
            && self.max_h.is_finite()
    }

    pub fn admits(&self, width: f64, height: f64) -> bool {
        width >= self.min_w && width <= self.max_w && height >= self.min_h && height <= self.max_h
    }
}

/// The eight resize handles of a rectangle; also used to name the side or
/// corner held fixed while resizing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Handle {
    NW,
    N,
    NE,
    E,
    SE,
    S,
    SW,
    W,
}

impl Handle {
    pub const ALL: [Handle; 8] = [
        Handle::NW,
        Handle::N,
        Handle::NE,
        Handle::E,
        Handle::SE,
        Handle::S,
        Handle::SW,
        Handle::W,
    ];

    /// The edge or corner diagonally/straight across from this one.
    pub fn opposite(self) -> Handle {
        match self {
            Handle::NW => Handle::SE,
            Handle::N => Handle::S,
            Handle::NE => Handle::SW,
            Handle::E => Handle::W,
            Handle::SE => Handle::NW,
            Handle::S => Handle::N,
            Handle::SW => Handle::NE,
            Handle::W => Handle::E,
        }
    }

    pub fn touches_left(self) -> bool {
        matches!(self, Handle::NW | Handle::W | Handle::SW)
    }

    pub fn touches_right(self) -> bool {
        matches!(self, Handle::NE | Handle::E | Handle::SE)
    }

    pub fn touches_top(self) -> bool {
        matches!(self, Handle::NW | Handle::N | Handle::NE)
    }

    pub fn touches_bottom(self) -> bool {
        matches!(self, Handle::SW | Handle::S | Handle::SE)
    }

    /// Whether dragging this handle changes the width.
    pub fn resizes_width(self) -> bool {
        self.touches_left() || self.touches_right()
    }

    /// Whether dragging this handle changes the height.
    pub fn resizes_height(self) -> bool {
        self.touches_top() || self.touches_bottom()
    }
}

/// Smallest rectangle containing every input.
pub fn bounding_box(rects: &[RectBounds]) -> Result<RectBounds, GeometryError> {
    let (first, rest) = rects.split_first().ok_or(GeometryError::EmptyCollection)?;
    let (mut l, mut t, mut r, mut b) = (first.left, first.top, first.right(), first.bottom());
    for rect in rest {
        l = l.min(rect.left);
        t = t.min(rect.top);
        r = r.max(rect.right());
        b = b.max(rect.bottom());
    }
    Ok(RectBounds::from_corners(l, t, r, b))
}

/// Shifts the origin by `(dx, dy)`; the size is copied untouched.
pub fn translate(r: RectBounds, dx: f64, dy: f64) -> RectBounds {
    RectBounds {
        left: r.left + dx,
        top: r.top + dy,
        ..r
    }
}

/// Clips the size of `proposed` into `range` while keeping the `anchor`
/// side or corner where `proposed` put it.
///
/// For an axis the anchor does not touch (e.g. the horizontal axis of an
/// `N` anchor) the left/top coordinate is the one kept.
pub fn clamp_resize(proposed: RectBounds, range: SizeRange, anchor: Handle) -> RectBounds {
    let width = proposed.width.clamp(range.min_w, range.max_w);
    let height = proposed.height.clamp(range.min_h, range.max_h);

    let left = if anchor.touches_right() && width != proposed.width {
        proposed.right() - width
    } else {
        proposed.left
    };
    let top = if anchor.touches_bottom() && height != proposed.height {
        proposed.bottom() - height
    } else {
        proposed.top
    };
    RectBounds::new(left, top, width, height)
}

/// Squared distance from `p` to the segment `a`-`b`.
pub fn segment_distance_squared(p: Point, a: Point, b: Point) -> f64 {
    let (vx, vy) = (b.x - a.x, b.y - a.y);
    let (wx, wy) = (p.x - a.x, p.y - a.y);
    let dot = wx * vx + wy * vy;
    let len2 = vx * vx + vy * vy;
    if dot <= 0.0 || len2 == 0.0 {
        return p.distance_squared(a);
    }
    if dot >= len2 {
        return p.distance_squared(b);
    }
    // Perpendicular distance; exact for axis-aligned segments on a grid.
    let cross = wx * vy - wy * vx;
    cross * cross / len2
}

/// Convexity check for a closed polygon; collinear runs are tolerated but
/// the turn direction must never flip and the area must be non-zero.
pub fn is_convex(vertices: &[Point]) -> bool {
    let n = vertices.len();
    if n < 3 || vertices.iter().any(|v| !v.is_finite()) {
        return false;
    }
    let mut sign = 0.0_f64;
    for i in 0..n {
        let a = vertices[i];
        let b = vertices[(i + 1) % n];
        let c = vertices[(i + 2) % n];
        let cross = (b.x - a.x) * (c.y - b.y) - (b.y - a.y) * (c.x - b.x);
        if cross != 0.0 {
            if sign != 0.0 && cross.signum() != sign {
                return false;
            }
            sign = cross.signum();
        }
    }
    sign != 0.0
}

/// Boundary-inclusive point-in-convex-polygon test (either winding).
pub fn convex_contains(vertices: &[Point], p: Point) -> bool {
    let n = vertices.len();
    let mut positive = false;
    let mut negative = false;
    for i in 0..n {
        let a = vertices[i];
        let b = vertices[(i + 1) % n];
        let cross = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
        if cross > 0.0 {
            positive = true;
        } else if cross < 0.0 {
            negative = true;
        }
        if positive && negative {
            return false;
        }
    }
    true
}
