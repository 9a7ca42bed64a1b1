//! The mover supervises all moving and resizing.
//!
//! Elements become movable by registering with a [`Mover`]; after that the
//! host forwards three mouse events: press to [`Mover::catch`], motion to
//! [`Mover::move_to`] (redrawing only when it returns `true`) and release to
//! [`Mover::release`].
//!
//! Picking scans visible elements from the top of the z-order down:
//!
//! * a registered, movable element whose cover contains the point is caught;
//! * a control whose bounds contain the point stops the scan (its interior
//!   belongs to the control's own clicks, fixed or not);
//! * anything else, including fixed elements, is transparent.

use crate::covers::{hit_cover, CursorHint, NodeAction};
use crate::geometry::{clamp_resize, Handle, Point, RectBounds};
use crate::scene::{ElementId, ElementKind, Scene, SceneError};
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MouseButton {
    Left,
    Right,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MoverError {
    #[error("catch while an element is already caught")]
    StateError,
    #[error(transparent)]
    Scene(#[from] SceneError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grab {
    pub element: ElementId,
    pub node: usize,
    pub action: NodeAction,
    /// Cursor minus the element origin at the moment of the catch.
    pub grab_offset: (f64, f64),
    pub last_point: Point,
    /// Bounds when caught; resizing is computed from these.
    pub start_bounds: RectBounds,
    pub start_point: Point,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub enum MoverState {
    #[default]
    Idle,
    Caught(Grab),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CatchResult {
    NoCatch,
    CaughtMove { id: ElementId },
    CaughtResize { id: ElementId, handle: Handle },
    ContextTarget { id: ElementId },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReleaseInfo {
    pub was_caught: bool,
    pub element: Option<ElementId>,
    /// Set when the release was forced by unregistering the caught element.
    pub forced: bool,
}

/// What lies under a point, as far as the mover is concerned.
#[derive(Debug, Clone, PartialEq)]
pub enum Pick {
    Nothing,
    Node { id: ElementId, node: usize, action: NodeAction, cursor: CursorHint },
    /// The interior of a control, which keeps the press for itself.
    Control { id: ElementId },
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Mover {
    registered: BTreeSet<ElementId>,
    state: MoverState,
}

impl Mover {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn state(&self) -> &MoverState {
        &self.state
    }

    pub fn is_caught(&self) -> bool {
        matches!(self.state, MoverState::Caught(_))
    }

    pub fn is_registered(&self, id: &str) -> bool {
        self.registered.contains(id)
    }

    pub fn registered(&self) -> impl Iterator<Item = &ElementId> {
        self.registered.iter()
    }

    /// Registers an element; registering twice is a no-op.
    pub fn register(&mut self, scene: &Scene, id: &str) -> Result<(), SceneError> {
        if scene.element(id).is_none() {
            return Err(SceneError::UnknownId(id.into()));
        }
        self.registered.insert(id.into());
        Ok(())
    }

    /// Registers every element currently in the scene.
    pub fn register_all(&mut self, scene: &Scene) {
        self.registered.extend(scene.elements().map(|e| e.id.clone()));
    }

    /// Unregisters an element. If it is being dragged the drag ends first
    /// and the forced release is returned.
    pub fn unregister(&mut self, scene: &mut Scene, id: &str) -> Result<Option<ReleaseInfo>, SceneError> {
        if !self.registered.remove(id) {
            return Err(SceneError::UnknownId(id.into()));
        }
        match &self.state {
            MoverState::Caught(g) if g.element.as_str() == id => {
                let mut info = self.release(scene);
                info.forced = true;
                Ok(Some(info))
            }
            _ => Ok(None),
        }
    }

    /// Drops registrations of elements that no longer exist.
    pub fn prune(&mut self, scene: &Scene) {
        self.registered.retain(|id| scene.element(id.as_str()).is_some());
    }

    fn catchable(&self, scene: &Scene, id: &str) -> bool {
        self.registered.contains(id) && scene.element(id).is_some_and(|e| e.movable)
    }

    /// Resolves what a left press at `p` would reach.
    pub fn pick(&self, scene: &Scene, p: Point) -> Pick {
        for id in scene.z_order().iter().rev() {
            if !scene.is_shown(id.as_str()) {
                continue;
            }
            let e = scene.element(id.as_str()).expect("z-order lists live elements");
            if self.catchable(scene, id.as_str()) {
                let cover = scene.cover_of(id.as_str());
                if let Some(node) = hit_cover(p, &cover) {
                    let n = &cover.nodes[node];
                    return Pick::Node {
                        id: id.clone(),
                        node,
                        action: n.action,
                        cursor: n.cursor,
                    };
                }
            }
            if matches!(e.kind, ElementKind::Control(_)) && e.params.bounds.contains(p) {
                return Pick::Control { id: id.clone() };
            }
        }
        Pick::Nothing
    }

    /// Topmost registered, visible element under `p` for a context menu.
    /// Fixed elements are included so they can be unfixed.
    fn context_target(&self, scene: &Scene, p: Point) -> Option<ElementId> {
        scene
            .z_order()
            .iter()
            .rev()
            .filter(|id| self.registered.contains(*id) && scene.is_shown(id.as_str()))
            .find(|id| {
                let e = scene.element(id.as_str()).expect("z-order lists live elements");
                e.params.bounds.contains(p) || hit_cover(p, &scene.cover_of(id.as_str())).is_some()
            })
            .cloned()
    }

    pub fn catch(&mut self, scene: &mut Scene, p: Point, button: MouseButton) -> Result<CatchResult, MoverError> {
        if self.is_caught() {
            return Err(MoverError::StateError);
        }
        if button == MouseButton::Right {
            return Ok(match self.context_target(scene, p) {
                Some(id) => CatchResult::ContextTarget { id },
                None => CatchResult::NoCatch,
            });
        }
        let Pick::Node { id, node, action, .. } = self.pick(scene, p) else {
            return Ok(CatchResult::NoCatch);
        };
        let bounds = scene.element(id.as_str()).expect("picked element exists").params.bounds;
        scene.raise(id.as_str());
        self.state = MoverState::Caught(Grab {
            element: id.clone(),
            node,
            action,
            grab_offset: (p.x - bounds.left, p.y - bounds.top),
            last_point: p,
            start_bounds: bounds,
            start_point: p,
        });
        Ok(match action {
            NodeAction::Resize(handle) => CatchResult::CaughtResize { id, handle },
            NodeAction::Move | NodeAction::FrameMove => CatchResult::CaughtMove { id },
        })
    }

    /// Drags the caught element to follow `p`. Returns whether anything
    /// changed (the host redraws only then); `false` while idle.
    pub fn move_to(&mut self, scene: &mut Scene, p: Point) -> bool {
        let MoverState::Caught(grab) = &mut self.state else {
            return false;
        };
        let Some(element) = scene.element(grab.element.as_str()) else {
            self.state = MoverState::Idle;
            return false;
        };
        if element.hidden || !element.movable {
            self.state = MoverState::Idle;
            return false;
        }
        let before = element.params.bounds;
        let id = grab.element.clone();
        match grab.action {
            NodeAction::Move => {
                let moved = RectBounds {
                    left: p.x - grab.grab_offset.0,
                    top: p.y - grab.grab_offset.1,
                    ..before
                };
                scene.put_bounds(id.as_str(), moved);
                scene.refresh_frames();
            }
            NodeAction::FrameMove => {
                let (dx, dy) = (p.x - grab.last_point.x, p.y - grab.last_point.y);
                scene.translate_unit(id.as_str(), dx, dy);
            }
            NodeAction::Resize(handle) => {
                let proposed = resize_proposal(grab.start_bounds, handle, p.x - grab.start_point.x, p.y - grab.start_point.y);
                let clamped = clamp_resize(proposed, element.size_range, handle.opposite());
                scene.put_bounds(id.as_str(), clamped);
                scene.refresh_frames();
            }
        }
        grab.last_point = p;
        scene.element(id.as_str()).map(|e| e.params.bounds) != Some(before)
    }

    pub fn release(&mut self, _scene: &mut Scene) -> ReleaseInfo {
        match std::mem::take(&mut self.state) {
            MoverState::Idle => ReleaseInfo {
                was_caught: false,
                element: None,
                forced: false,
            },
            MoverState::Caught(g) => ReleaseInfo {
                was_caught: true,
                element: Some(g.element),
                forced: false,
            },
        }
    }

    /// Pointer hint for `p` without touching any state.
    pub fn cursor_hint(&self, scene: &Scene, p: Point) -> CursorHint {
        match self.pick(scene, p) {
            Pick::Node { cursor, .. } => cursor,
            _ => CursorHint::Default,
        }
    }
}

/// Bounds proposed by dragging `handle` of `start` by `(dx, dy)`. The side
/// or corner opposite the handle is built from `start` unchanged.
fn resize_proposal(start: RectBounds, handle: Handle, dx: f64, dy: f64) -> RectBounds {
    let (mut l, mut t, mut w, mut h) = (start.left, start.top, start.width, start.height);
    if handle.touches_left() {
        l = start.left + dx;
        w = start.right() - l;
    } else if handle.touches_right() {
        w = start.right() + dx - l;
    }
    if handle.touches_top() {
        t = start.top + dy;
        h = start.bottom() - t;
    } else if handle.touches_bottom() {
        h = start.bottom() + dy - t;
    }
    RectBounds::new(l, t, w, h)
}
