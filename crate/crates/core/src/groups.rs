//! Elastic groups.
//!
//! A group's frame is never authoritative: it is the bounding box of the
//! visible members padded by the margin, recomputed after every change.
//! The frame follows the members and never constrains them.

use crate::display::{Font, Rgba};
use crate::geometry::{RectBounds, SizeRange};
use crate::scene::{ElementId, ElementKind, Scene, SceneElement, SceneError, VisibilityParams};
use std::collections::BTreeMap;

pub const DEFAULT_MARGIN: f64 = 8.0;
const FRAME_COLOR: Rgba = Rgba::rgb(90, 90, 120);

#[derive(Debug, Clone, PartialEq)]
pub struct ElasticGroup {
    pub id: ElementId,
    pub title: String,
    pub members: Vec<ElementId>,
    pub margin: f64,
    /// `None` while no member is visible.
    pub frame: Option<RectBounds>,
    pub temporary: bool,
}

impl Scene {
    pub fn group(&self, id: &str) -> Option<&ElasticGroup> {
        self.state.groups.get(id)
    }

    pub fn groups(&self) -> impl Iterator<Item = &ElasticGroup> {
        self.state.groups.values()
    }

    pub fn frame(&self, id: &str) -> Option<RectBounds> {
        self.group(id).and_then(|g| g.frame)
    }

    /// Creates a persistent elastic group. Its frame element is slotted just
    /// below the lowest member so members stay on top of their frame.
    pub fn create_group(
        &mut self,
        id: &str,
        title: &str,
        members: &[ElementId],
        margin: f64,
    ) -> Result<ElementId, SceneError> {
        let params = VisibilityParams::new(RectBounds::default(), FRAME_COLOR, Font::default());
        self.create_group_element(ElementId::new(id), title, members.to_vec(), margin, false, params)
    }

    pub(crate) fn create_group_element(
        &mut self,
        id: ElementId,
        title: &str,
        members: Vec<ElementId>,
        margin: f64,
        temporary: bool,
        params: VisibilityParams,
    ) -> Result<ElementId, SceneError> {
        if self.state.elements.contains_key(&id) {
            return Err(SceneError::DuplicateId(id));
        }
        if !(margin.is_finite() && margin >= 0.0) {
            return Err(SceneError::InvalidParams {
                id,
                reason: "margin must be finite and non-negative".into(),
            });
        }
        for m in &members {
            if !self.state.elements.contains_key(m) {
                return Err(SceneError::UnknownId(m.clone()));
            }
        }
        let mut unique = Vec::with_capacity(members.len());
        for m in members {
            if !unique.contains(&m) {
                unique.push(m);
            }
        }

        let slot = if temporary {
            self.state.z_order.len()
        } else {
            unique
                .iter()
                .flat_map(|m| self.closure(m.as_str()))
                .filter_map(|d| self.z_index(d.as_str()))
                .min()
                .unwrap_or(self.state.z_order.len())
        };
        let element = SceneElement::new(id.as_str(), ElementKind::Group, params, SizeRange::UNBOUNDED);
        self.state.elements.insert(id.clone(), element);
        self.state.z_order.insert(slot, id.clone());
        self.state.groups.insert(
            id.clone(),
            ElasticGroup {
                id: id.clone(),
                title: title.to_owned(),
                members: unique,
                margin,
                frame: None,
                temporary,
            },
        );
        self.refresh_frames();
        Ok(id)
    }

    pub fn add_member(&mut self, group: &str, member: &str) -> Result<(), SceneError> {
        let temporary = self
            .group(group)
            .ok_or_else(|| SceneError::UnknownGroup(group.into()))?
            .temporary;
        if self.element(member).is_none() {
            return Err(SceneError::UnknownId(member.into()));
        }
        if self.closure(member).contains(group) {
            return Err(SceneError::Cycle {
                group: group.into(),
                member: member.into(),
            });
        }
        let g = self.state.groups.get_mut(group).expect("checked above");
        if !g.members.iter().any(|m| m.as_str() == member) {
            g.members.push(member.into());
        }
        if !temporary {
            let own = self.z_index(group);
            let below = self
                .closure(member)
                .iter()
                .any(|d| self.z_index(d.as_str()) < own);
            if below {
                self.raise(member);
            }
        }
        self.refresh_frames();
        Ok(())
    }

    pub fn remove_member(&mut self, group: &str, member: &str) -> Result<(), SceneError> {
        let g = self
            .state
            .groups
            .get_mut(group)
            .ok_or_else(|| SceneError::UnknownGroup(group.into()))?;
        let before = g.members.len();
        g.members.retain(|m| m.as_str() != member);
        if g.members.len() == before {
            return Err(SceneError::UnknownId(member.into()));
        }
        self.refresh_frames();
        Ok(())
    }

    /// Translates every member (recursively, hidden ones included) by
    /// exactly `(dx, dy)`. Elements reachable through several nested groups
    /// move once.
    pub fn move_group(&mut self, group: &str, dx: f64, dy: f64) -> Result<(), SceneError> {
        let movable = self
            .element(group)
            .filter(|e| e.is_group())
            .ok_or_else(|| SceneError::UnknownGroup(group.into()))?
            .movable;
        if !movable {
            return Err(SceneError::NotMovable(group.into()));
        }
        self.translate_unit(group, dx, dy);
        Ok(())
    }

    /// Moves the non-group elements under `id` without the movable check.
    pub(crate) fn translate_unit(&mut self, id: &str, dx: f64, dy: f64) {
        if dx == 0.0 && dy == 0.0 {
            return;
        }
        for d in self.closure(id) {
            if !self.state.groups.contains_key(&d) {
                self.translate_element(d.as_str(), dx, dy);
            }
        }
        self.refresh_frames();
    }

    /// Recomputes frames and returns the frame of `group`.
    pub fn recompute_frame(&mut self, group: &str) -> Result<Option<RectBounds>, SceneError> {
        if !self.state.groups.contains_key(group) {
            return Err(SceneError::UnknownGroup(group.into()));
        }
        self.refresh_frames();
        Ok(self.frame(group))
    }

    /// Frame that `group` should have given the current member state.
    pub fn derived_frame(&self, group: &ElasticGroup) -> Option<RectBounds> {
        let mut memo = BTreeMap::new();
        self.frame_of(group.id.as_str(), &mut memo)
    }

    fn frame_of(&self, id: &str, memo: &mut BTreeMap<ElementId, Option<RectBounds>>) -> Option<RectBounds> {
        if let Some(f) = memo.get(id) {
            return *f;
        }
        let group = &self.state.groups[id];
        let mut corners: Option<(f64, f64, f64, f64)> = None;
        for m in &group.members {
            let Some(e) = self.element(m.as_str()) else { continue };
            if e.hidden {
                continue;
            }
            let rect = if e.is_group() {
                match self.frame_of(m.as_str(), memo) {
                    Some(r) => r,
                    None => continue,
                }
            } else {
                e.params.bounds
            };
            corners = Some(match corners {
                None => (rect.left, rect.top, rect.right(), rect.bottom()),
                Some((l, t, r, b)) => (
                    l.min(rect.left),
                    t.min(rect.top),
                    r.max(rect.right()),
                    b.max(rect.bottom()),
                ),
            });
        }
        let frame = corners.map(|(l, t, r, b)| {
            let m = group.margin;
            RectBounds::from_corners(l - m, t - m, r + m, b + m)
        });
        memo.insert(ElementId::new(id), frame);
        frame
    }

    /// Re-derives every frame bottom-up and mirrors it into the group's
    /// element bounds. A group with no visible member keeps its last bounds
    /// but has no frame, so it is neither drawn nor hittable.
    pub(crate) fn refresh_frames(&mut self) {
        let mut memo = BTreeMap::new();
        let ids: Vec<ElementId> = self.state.groups.keys().cloned().collect();
        for id in &ids {
            self.frame_of(id.as_str(), &mut memo);
        }
        for id in ids {
            let frame = memo[&id];
            if let Some(g) = self.state.groups.get_mut(&id) {
                g.frame = frame;
            }
            if let (Some(f), Some(e)) = (frame, self.state.elements.get_mut(&id)) {
                e.params.bounds = f;
            }
        }
    }
}
