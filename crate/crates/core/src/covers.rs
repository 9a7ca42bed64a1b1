//! Invisible covers.
//!
//! Every movable element is covered by an ordered list of invisible nodes.
//! Each node owns an area of the plane and the action that a press inside
//! that area starts. When nodes overlap, the first one in the list wins, so
//! the order encodes priority: corners, then edges, then the interior.

use crate::geometry::{convex_contains, is_convex, segment_distance_squared, Handle, Point, RectBounds};
use serde::{Deserialize, Serialize};

/// Radius of the corner circles.
pub const CORNER_RADIUS: f64 = 6.0;
/// Half width of the edge strips.
pub const EDGE_HALFWIDTH: f64 = 3.0;

/// What a press on a node starts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NodeAction {
    Move,
    Resize(Handle),
    FrameMove,
}

/// Pointer shape suggested for a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CursorHint {
    Default,
    Move,
    ResizeNs,
    ResizeEw,
    ResizeNwse,
    ResizeNesw,
}

impl CursorHint {
    pub fn for_action(action: NodeAction) -> Self {
        match action {
            NodeAction::Move | NodeAction::FrameMove => CursorHint::Move,
            NodeAction::Resize(h) => match h {
                Handle::N | Handle::S => CursorHint::ResizeNs,
                Handle::E | Handle::W => CursorHint::ResizeEw,
                Handle::NW | Handle::SE => CursorHint::ResizeNwse,
                Handle::NE | Handle::SW => CursorHint::ResizeNesw,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum NodeShape {
    Circle { center: Point, radius: f64 },
    /// Capsule: every point within `halfwidth` of the segment `a`-`b`.
    Strip { a: Point, b: Point, halfwidth: f64 },
    ConvexPolygon { vertices: Vec<Point> },
}

impl NodeShape {
    pub fn is_valid(&self) -> bool {
        match self {
            NodeShape::Circle { center, radius } => center.is_finite() && *radius > 0.0,
            NodeShape::Strip { a, b, halfwidth } => {
                a.is_finite() && b.is_finite() && *halfwidth > 0.0
            }
            NodeShape::ConvexPolygon { vertices } => is_convex(vertices),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverNode {
    pub shape: NodeShape,
    pub action: NodeAction,
    pub cursor: CursorHint,
}

impl CoverNode {
    pub fn new(shape: NodeShape, action: NodeAction) -> Self {
        Self {
            shape,
            action,
            cursor: CursorHint::for_action(action),
        }
    }
}

/// Boundary-inclusive containment test for a single node.
pub fn hit_node(p: Point, node: &CoverNode) -> bool {
    match &node.shape {
        NodeShape::Circle { center, radius } => p.distance_squared(*center) <= radius * radius,
        NodeShape::Strip { a, b, halfwidth } => {
            segment_distance_squared(p, *a, *b) <= halfwidth * halfwidth
        }
        NodeShape::ConvexPolygon { vertices } => convex_contains(vertices, p),
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Cover {
    pub nodes: Vec<CoverNode>,
}

impl Cover {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, index: usize) -> Option<&CoverNode> {
        self.nodes.get(index)
    }
}

/// Index of the first node containing `p`.
pub fn hit_cover(p: Point, cover: &Cover) -> Option<usize> {
    cover.nodes.iter().position(|node| hit_node(p, node))
}

const CORNER_HANDLES: [Handle; 4] = [Handle::NW, Handle::NE, Handle::SE, Handle::SW];
const EDGE_HANDLES: [Handle; 4] = [Handle::N, Handle::E, Handle::S, Handle::W];

fn corner_nodes(bounds: &RectBounds) -> impl Iterator<Item = CoverNode> {
    bounds
        .corners()
        .into_iter()
        .zip(CORNER_HANDLES)
        .map(|(center, handle)| {
            CoverNode::new(
                NodeShape::Circle {
                    center,
                    radius: CORNER_RADIUS,
                },
                NodeAction::Resize(handle),
            )
        })
}

/// Edge strips in N, E, S, W order, each tagged with `action(handle)`.
fn edge_nodes(
    bounds: &RectBounds,
    action: impl Fn(Handle) -> NodeAction,
) -> impl Iterator<Item = CoverNode> {
    let [nw, ne, se, sw] = bounds.corners();
    let segments = [(nw, ne), (ne, se), (sw, se), (nw, sw)];
    segments
        .into_iter()
        .zip(EDGE_HANDLES)
        .map(move |((a, b), handle)| {
            CoverNode::new(
                NodeShape::Strip {
                    a,
                    b,
                    halfwidth: EDGE_HALFWIDTH,
                },
                action(handle),
            )
        })
}

fn interior_node(bounds: &RectBounds, action: NodeAction) -> CoverNode {
    CoverNode::new(
        NodeShape::ConvexPolygon {
            vertices: bounds.corners().to_vec(),
        },
        action,
    )
}

/// Cover of a graphical element: moved by any inner point, resized by the
/// border. Nodes: 4 corner circles, 4 edge strips, then the interior.
pub fn graphical_cover(bounds: &RectBounds) -> Cover {
    let mut nodes: Vec<CoverNode> = corner_nodes(bounds).collect();
    nodes.extend(edge_nodes(bounds, NodeAction::Resize));
    nodes.push(interior_node(bounds, NodeAction::Move));
    Cover { nodes }
}

/// Cover of a control: corners resize, edges move, and the interior is left
/// uncovered so the control keeps its own clicks.
pub fn control_cover(bounds: &RectBounds) -> Cover {
    let mut nodes: Vec<CoverNode> = corner_nodes(bounds).collect();
    nodes.extend(edge_nodes(bounds, |_| NodeAction::Move));
    Cover { nodes }
}

/// Cover of an elastic group frame: a single interior node. Frame size is
/// derived from the members, so there are no resize nodes.
pub fn group_cover(frame: &RectBounds) -> Cover {
    Cover {
        nodes: vec![interior_node(frame, NodeAction::FrameMove)],
    }
}
