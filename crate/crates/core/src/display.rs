//! Drawing commands produced by the scene and consumed by renderers.

use crate::geometry::{Point, RectBounds};
use serde::{Deserialize, Serialize};

/// 8-bit RGBA color.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rgba {
    pub r: u8,
    pub g: u8,
    pub b: u8,
    pub a: u8,
}

impl Rgba {
    pub const BLACK: Rgba = Rgba::rgb(0, 0, 0);
    pub const WHITE: Rgba = Rgba::rgb(255, 255, 255);
    pub const GRAY: Rgba = Rgba::rgb(128, 128, 128);

    pub const fn rgb(r: u8, g: u8, b: u8) -> Self {
        Self { r, g, b, a: 255 }
    }

    pub const fn new(r: u8, g: u8, b: u8, a: u8) -> Self {
        Self { r, g, b, a }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Font {
    pub family: String,
    pub size: f64,
    pub bold: bool,
    pub italic: bool,
}

impl Font {
    pub fn new(family: &str, size: f64) -> Self {
        Self {
            family: family.to_owned(),
            size,
            bold: false,
            italic: false,
        }
    }

    pub fn bold(mut self) -> Self {
        self.bold = true;
        self
    }

    pub fn is_valid(&self) -> bool {
        self.size.is_finite() && self.size > 0.0 && !self.family.is_empty()
    }
}

impl Default for Font {
    fn default() -> Self {
        Font::new("sans-serif", 12.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TextAnchor {
    Start,
    Middle,
    End,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "kebab-case")]
pub enum DrawCommand {
    FillRect {
        rect: RectBounds,
        color: Rgba,
    },
    FillEllipse {
        rect: RectBounds,
        color: Rgba,
    },
    StrokeRect {
        rect: RectBounds,
        color: Rgba,
        width: f64,
    },
    /// Elastic group frame outline.
    Frame {
        rect: RectBounds,
        color: Rgba,
    },
    /// Text whose baseline starts (or is centered, or ends) at `at`.
    Text {
        at: Point,
        text: String,
        font: Font,
        color: Rgba,
        anchor: TextAnchor,
    },
    Polyline {
        points: Vec<Point>,
        color: Rgba,
        width: f64,
    },
    /// Children drawn in a frame translated by `offset`.
    Group {
        offset: Point,
        children: Vec<DrawCommand>,
    },
}

pub type DisplayList = Vec<DrawCommand>;
