//! Element store: identity, z-order, visibility parameters and flags.
//!
//! Groups are elements too. A group's element id doubles as its group id,
//! its bounds mirror the derived frame, and (for non-temporary groups) it
//! sits below all of its members in z-order so the members stay reachable
//! while empty frame area moves the whole group.

use crate::covers::{control_cover, graphical_cover, group_cover, Cover};
use crate::display::{DisplayList, DrawCommand, Font, Rgba, TextAnchor};
use crate::geometry::{translate, Point, RectBounds, SizeRange};
use crate::groups::ElasticGroup;
use crate::plotting::{plot_display, PlotArea};
use serde::{Deserialize, Serialize};
use std::borrow::Borrow;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ElementId(String);

impl ElementId {
    pub fn new(id: impl Into<String>) -> Self {
        Self(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ElementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Borrow<str> for ElementId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl From<&str> for ElementId {
    fn from(s: &str) -> Self {
        Self(s.to_owned())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SceneError {
    #[error("element id `{0}` already exists")]
    DuplicateId(ElementId),
    #[error("unknown element `{0}`")]
    UnknownId(ElementId),
    #[error("unknown group `{0}`")]
    UnknownGroup(ElementId),
    #[error("`{id}` is a member of group `{group}`")]
    GroupMembershipViolation { id: ElementId, group: ElementId },
    #[error("bounds of `{0}` fall outside its size range")]
    SizeRangeViolation(ElementId),
    #[error("invalid parameters for `{id}`: {reason}")]
    InvalidParams { id: ElementId, reason: String },
    #[error("no default view has been recorded")]
    NoSnapshot,
    #[error("adding `{member}` to `{group}` would create a cycle")]
    Cycle { group: ElementId, member: ElementId },
    #[error("the frame of group `{0}` is derived from its members and cannot be set")]
    DerivedFrame(ElementId),
    #[error("`{0}` is fixed")]
    NotMovable(ElementId),
    #[error("`{0}` is not a temporary group")]
    NotTemporary(ElementId),
}

/// Position, size, color and font of one element.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VisibilityParams {
    pub bounds: RectBounds,
    pub color: Rgba,
    pub font: Font,
}

impl VisibilityParams {
    pub fn new(bounds: RectBounds, color: Rgba, font: Font) -> Self {
        Self {
            bounds,
            color,
            font,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if !self.bounds.is_valid() {
            return Err("bounds must be finite with non-negative size".into());
        }
        if !self.font.is_valid() {
            return Err("font needs a family and a positive size".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GraphicShape {
    Rect,
    Ellipse,
    Label { text: String },
    PlotArea(PlotArea),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ControlRole {
    Button,
    TextField,
    List,
}

/// Stand-in for a native control: it has a caption and a logical key that
/// ties it to application behavior, independent of where it is drawn.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlProxy {
    pub role: ControlRole,
    pub caption: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub key: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub items: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum ElementKind {
    Graphic { shape: GraphicShape },
    Control(ControlProxy),
    /// Frame of the elastic group with the same id.
    Group,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneElement {
    pub id: ElementId,
    pub kind: ElementKind,
    pub params: VisibilityParams,
    pub size_range: SizeRange,
    pub movable: bool,
    pub hidden: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group_tag: Option<String>,
}

impl SceneElement {
    pub fn new(id: impl Into<String>, kind: ElementKind, params: VisibilityParams, size_range: SizeRange) -> Self {
        Self {
            id: ElementId::new(id),
            kind,
            params,
            size_range,
            movable: true,
            hidden: false,
            group_tag: None,
        }
    }

    pub fn graphic(id: impl Into<String>, shape: GraphicShape, params: VisibilityParams, size_range: SizeRange) -> Self {
        Self::new(id, ElementKind::Graphic { shape }, params, size_range)
    }

    pub fn control(
        id: impl Into<String>,
        role: ControlRole,
        caption: &str,
        key: Option<&str>,
        params: VisibilityParams,
        size_range: SizeRange,
    ) -> Self {
        let proxy = ControlProxy {
            role,
            caption: caption.to_owned(),
            key: key.map(str::to_owned),
            items: Vec::new(),
        };
        Self::new(id, ElementKind::Control(proxy), params, size_range)
    }

    pub fn with_tag(mut self, tag: &str) -> Self {
        self.group_tag = Some(tag.to_owned());
        self
    }

    pub fn bounds(&self) -> RectBounds {
        self.params.bounds
    }

    pub fn is_group(&self) -> bool {
        matches!(self.kind, ElementKind::Group)
    }

    pub fn control_proxy(&self) -> Option<&ControlProxy> {
        match &self.kind {
            ElementKind::Control(c) => Some(c),
            _ => None,
        }
    }

    pub fn plot(&self) -> Option<&PlotArea> {
        match &self.kind {
            ElementKind::Graphic {
                shape: GraphicShape::PlotArea(p),
            } => Some(p),
            _ => None,
        }
    }
}

/// Everything that makes up a scene's layout; also the shape of the
/// default-view snapshot.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SceneState {
    pub(crate) elements: BTreeMap<ElementId, SceneElement>,
    pub(crate) z_order: Vec<ElementId>,
    pub(crate) groups: BTreeMap<ElementId, ElasticGroup>,
}

impl SceneState {
    pub fn elements(&self) -> impl Iterator<Item = &SceneElement> {
        self.elements.values()
    }

    pub fn z_order(&self) -> &[ElementId] {
        &self.z_order
    }

    pub fn groups(&self) -> impl Iterator<Item = &ElasticGroup> {
        self.groups.values()
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Scene {
    pub(crate) state: SceneState,
    pub(crate) default_snapshot: Option<SceneState>,
}

/// Margin around a rubber-band selection.
pub const SELECTION_MARGIN: f64 = 4.0;
const SELECTION_COLOR: Rgba = Rgba::rgb(30, 110, 230);

impl Scene {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn element(&self, id: &str) -> Option<&SceneElement> {
        self.state.elements.get(id)
    }

    pub(crate) fn element_mut(&mut self, id: &str) -> Option<&mut SceneElement> {
        self.state.elements.get_mut(id)
    }

    pub fn elements(&self) -> impl Iterator<Item = &SceneElement> {
        self.state.elements.values()
    }

    pub fn len(&self) -> usize {
        self.state.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.state.elements.is_empty()
    }

    /// Element ids from bottom to top.
    pub fn z_order(&self) -> &[ElementId] {
        &self.state.z_order
    }

    pub fn z_index(&self, id: &str) -> Option<usize> {
        self.state.z_order.iter().position(|z| z.as_str() == id)
    }

    pub fn state(&self) -> &SceneState {
        &self.state
    }

    pub fn default_snapshot(&self) -> Option<&SceneState> {
        self.default_snapshot.as_ref()
    }

    fn require(&self, id: &str) -> Result<&SceneElement, SceneError> {
        self.element(id).ok_or_else(|| SceneError::UnknownId(id.into()))
    }

    pub fn add_element(&mut self, element: SceneElement) -> Result<ElementId, SceneError> {
        if self.state.elements.contains_key(&element.id) {
            return Err(SceneError::DuplicateId(element.id));
        }
        let invalid = |reason: &str| SceneError::InvalidParams {
            id: element.id.clone(),
            reason: reason.to_owned(),
        };
        if element.is_group() {
            return Err(invalid("groups are created with create_group"));
        }
        element.params.validate().map_err(|r| invalid(&r))?;
        if !element.size_range.is_valid() {
            return Err(invalid("size range must satisfy 0 < min <= max"));
        }
        let id = element.id.clone();
        self.state.z_order.push(id.clone());
        self.state.elements.insert(id.clone(), element);
        Ok(id)
    }

    /// Removes an element. Members of a live group must be taken out of the
    /// group first; removing a group element dissolves that group.
    pub fn remove_element(&mut self, id: &str) -> Result<(), SceneError> {
        self.require(id)?;
        if let Some(group) = self.parents_of(id).into_iter().next() {
            return Err(SceneError::GroupMembershipViolation { id: id.into(), group });
        }
        self.state.groups.remove(id);
        self.state.elements.remove(id);
        self.state.z_order.retain(|z| z.as_str() != id);
        self.refresh_frames();
        Ok(())
    }

    /// Groups that list `id` as a direct member.
    pub fn parents_of(&self, id: &str) -> Vec<ElementId> {
        self.state
            .groups
            .values()
            .filter(|g| g.members.iter().any(|m| m.as_str() == id))
            .map(|g| g.id.clone())
            .collect()
    }

    /// `id` plus, for groups, every element reachable through membership.
    pub fn closure(&self, id: &str) -> BTreeSet<ElementId> {
        let mut seen = BTreeSet::new();
        let mut stack = vec![ElementId::new(id)];
        while let Some(next) = stack.pop() {
            if !seen.insert(next.clone()) {
                continue;
            }
            if let Some(group) = self.state.groups.get(&next) {
                stack.extend(group.members.iter().cloned());
            }
        }
        seen
    }

    /// Fixes or frees an element; on a group it applies to every member and
    /// the frame.
    pub fn set_movable(&mut self, id: &str, movable: bool) -> Result<(), SceneError> {
        self.require(id)?;
        for target in self.closure(id) {
            if let Some(e) = self.element_mut(target.as_str()) {
                e.movable = movable;
            }
        }
        Ok(())
    }

    /// Hides or shows an element, or a group with all its members. Hidden
    /// elements keep their parameters so showing them restores the view.
    pub fn set_hidden(&mut self, id: &str, hidden: bool) -> Result<(), SceneError> {
        self.require(id)?;
        for target in self.closure(id) {
            if let Some(e) = self.element_mut(target.as_str()) {
                e.hidden = hidden;
            }
        }
        self.refresh_frames();
        Ok(())
    }

    /// Stores `params` exactly as given.
    pub fn set_visibility_params(&mut self, id: &str, params: VisibilityParams) -> Result<(), SceneError> {
        let element = self.require(id)?;
        params.validate().map_err(|reason| SceneError::InvalidParams {
            id: id.into(),
            reason,
        })?;
        if element.is_group() {
            if params.bounds != element.params.bounds {
                return Err(SceneError::DerivedFrame(id.into()));
            }
        } else if !element.size_range.admits(params.bounds.width, params.bounds.height) {
            return Err(SceneError::SizeRangeViolation(id.into()));
        }
        if let Some(e) = self.element_mut(id) {
            e.params = params;
        }
        self.refresh_frames();
        Ok(())
    }

    /// Copies size, color and font of `sample` onto every target; positions
    /// stay. A size outside a target's range is clamped into it, and group
    /// targets only take color and font since their size is derived.
    pub fn spread_sample(&mut self, sample: &str, targets: &[ElementId]) -> Result<(), SceneError> {
        let source = self.require(sample)?.params.clone();
        for t in targets {
            self.require(t.as_str())?;
        }
        for t in targets {
            let Some(e) = self.element_mut(t.as_str()) else { continue };
            e.params.color = source.color;
            e.params.font = source.font.clone();
            if !e.is_group() {
                let r = e.size_range;
                e.params.bounds.width = source.bounds.width.clamp(r.min_w, r.max_w);
                e.params.bounds.height = source.bounds.height.clamp(r.min_h, r.max_h);
            }
        }
        self.refresh_frames();
        Ok(())
    }

    /// Records the current layout as the default view.
    pub fn snapshot_default(&mut self) {
        self.default_snapshot = Some(self.state.clone());
    }

    /// Brings back the recorded default view: element set, parameters,
    /// flags, z-order and groups. Temporary groups and elements added later
    /// disappear.
    pub fn restore_default_view(&mut self) -> Result<(), SceneError> {
        let snapshot = self.default_snapshot.clone().ok_or(SceneError::NoSnapshot)?;
        self.state = snapshot;
        self.refresh_frames();
        Ok(())
    }

    /// Gathers every visible element lying entirely inside `marquee` into a
    /// new temporary group placed on top. Returns `None` when nothing is
    /// enclosed.
    pub fn rubber_band_select(&mut self, marquee: RectBounds) -> Option<ElementId> {
        let members: Vec<ElementId> = self
            .state
            .z_order
            .iter()
            .filter(|id| {
                let e = &self.state.elements[*id];
                let has_area = !e.is_group() || self.state.groups[*id].frame.is_some();
                !e.hidden && has_area && marquee.contains_rect(&e.params.bounds)
            })
            .cloned()
            .collect();
        if members.is_empty() {
            return None;
        }
        let id = self.fresh_id("selection");
        let params = VisibilityParams::new(marquee, SELECTION_COLOR, Font::default());
        self.create_group_element(id.clone(), "", members, SELECTION_MARGIN, true, params)
            .expect("fresh id with existing members");
        Some(id)
    }

    /// Dissolves a temporary group; its members keep their final positions.
    pub fn dissolve_group(&mut self, id: &str) -> Result<(), SceneError> {
        let group = self
            .state
            .groups
            .get(id)
            .ok_or_else(|| SceneError::UnknownGroup(id.into()))?;
        if !group.temporary {
            return Err(SceneError::NotTemporary(id.into()));
        }
        for g in self.state.groups.values_mut() {
            g.members.retain(|m| m.as_str() != id);
        }
        self.state.groups.remove(id);
        self.state.elements.remove(id);
        self.state.z_order.retain(|z| z.as_str() != id);
        self.refresh_frames();
        Ok(())
    }

    /// `prefix-N` with the smallest N above every existing `prefix-M`.
    pub fn fresh_id(&self, prefix: &str) -> ElementId {
        let next = self
            .state
            .elements
            .keys()
            .filter_map(|id| id.as_str().strip_prefix(prefix)?.strip_prefix('-')?.parse::<u64>().ok())
            .max()
            .map_or(1, |n| n + 1);
        ElementId::new(format!("{prefix}-{next}"))
    }

    /// Raises an element, with everything it contains, to the top while
    /// keeping the relative order of the raised elements.
    pub(crate) fn raise(&mut self, id: &str) {
        let unit = self.closure(id);
        let (raised, rest): (Vec<ElementId>, Vec<ElementId>) =
            self.state.z_order.drain(..).partition(|z| unit.contains(z));
        self.state.z_order = rest;
        self.state.z_order.extend(raised);
    }

    /// Sets bounds without range checks; callers keep them valid.
    pub(crate) fn put_bounds(&mut self, id: &str, bounds: RectBounds) {
        if let Some(e) = self.element_mut(id) {
            e.params.bounds = bounds;
        }
    }

    pub(crate) fn translate_element(&mut self, id: &str, dx: f64, dy: f64) {
        if let Some(e) = self.element_mut(id) {
            e.params.bounds = translate(e.params.bounds, dx, dy);
        }
    }

    /// The invisible cover of an element in its current state. Hidden
    /// elements and groups without visible members have an empty cover.
    pub fn cover_of(&self, id: &str) -> Cover {
        let Some(e) = self.element(id) else {
            return Cover::empty();
        };
        if e.hidden {
            return Cover::empty();
        }
        match &e.kind {
            ElementKind::Graphic { .. } => graphical_cover(&e.params.bounds),
            ElementKind::Control(_) => control_cover(&e.params.bounds),
            ElementKind::Group => match self.state.groups.get(id).and_then(|g| g.frame) {
                Some(frame) => group_cover(&frame),
                None => Cover::empty(),
            },
        }
    }

    /// Whether the element currently occupies any area on screen.
    pub fn is_shown(&self, id: &str) -> bool {
        match self.element(id) {
            None => false,
            Some(e) if e.hidden => false,
            Some(e) if e.is_group() => self.state.groups.get(id).is_some_and(|g| g.frame.is_some()),
            Some(_) => true,
        }
    }

    pub fn build_display_list(&self) -> DisplayList {
        self.build_display_list_with_values(&BTreeMap::new())
    }

    /// Display list in ascending z-order. Text fields show the value stored
    /// under their logical key in `values`.
    pub fn build_display_list_with_values(&self, values: &BTreeMap<String, String>) -> DisplayList {
        let mut out = Vec::new();
        for id in &self.state.z_order {
            if !self.is_shown(id.as_str()) {
                continue;
            }
            let e = &self.state.elements[id];
            let title = self.state.groups.get(id).map(|g| g.title.as_str());
            draw_element(e, title, values, &mut out);
        }
        out
    }

    /// Checks the structural invariants; used by fuzzing and verification.
    pub fn check_invariants(&self) -> Result<(), String> {
        let st = &self.state;
        let z: BTreeSet<&ElementId> = st.z_order.iter().collect();
        if z.len() != st.z_order.len() || z.len() != st.elements.len() || st.elements.keys().any(|k| !z.contains(k)) {
            return Err("z-order is not a permutation of element ids".into());
        }
        for (id, e) in &st.elements {
            if &e.id != id {
                return Err(format!("element stored under `{id}` has id `{}`", e.id));
            }
            if e.is_group() != st.groups.contains_key(id) {
                return Err(format!("group element/record mismatch for `{id}`"));
            }
        }
        for g in st.groups.values() {
            for m in &g.members {
                if !st.elements.contains_key(m) {
                    return Err(format!("group `{}` references unknown `{m}`", g.id));
                }
            }
            if self.closure(g.id.as_str()).iter().any(|d| d != &g.id && self.closure(d.as_str()).contains(&g.id)) {
                return Err(format!("membership cycle through `{}`", g.id));
            }
            let expected = self.derived_frame(g);
            if g.frame != expected {
                return Err(format!("frame of `{}` is {:?}, expected {:?}", g.id, g.frame, expected));
            }
            if !g.temporary {
                let own = self.z_index(g.id.as_str());
                for d in self.closure(g.id.as_str()) {
                    if d != g.id && self.z_index(d.as_str()) < own {
                        return Err(format!("`{d}` is below its group `{}`", g.id));
                    }
                }
            }
        }
        Ok(())
    }
}

fn draw_element(e: &SceneElement, title: Option<&str>, values: &BTreeMap<String, String>, out: &mut DisplayList) {
    let p = &e.params;
    let b = p.bounds;
    let text = |at: Point, text: String, color: Rgba, anchor: TextAnchor| DrawCommand::Text {
        at,
        text,
        font: p.font.clone(),
        color,
        anchor,
    };
    let baseline = b.top + b.height / 2.0 + p.font.size * 0.35;
    match &e.kind {
        ElementKind::Graphic { shape } => match shape {
            GraphicShape::Rect => out.push(DrawCommand::FillRect { rect: b, color: p.color }),
            GraphicShape::Ellipse => out.push(DrawCommand::FillEllipse { rect: b, color: p.color }),
            GraphicShape::Label { text: t } => {
                out.push(text(Point::new(b.left, baseline), t.clone(), p.color, TextAnchor::Start));
            }
            GraphicShape::PlotArea(plot) => out.push(plot_display(plot, &b, p.color, &p.font)),
        },
        ElementKind::Control(c) => match c.role {
            ControlRole::Button => {
                out.push(DrawCommand::FillRect { rect: b, color: p.color });
                out.push(DrawCommand::StrokeRect {
                    rect: b,
                    color: Rgba::GRAY,
                    width: 1.0,
                });
                out.push(text(Point::new(b.center().x, baseline), c.caption.clone(), Rgba::BLACK, TextAnchor::Middle));
            }
            ControlRole::TextField => {
                out.push(DrawCommand::FillRect { rect: b, color: Rgba::WHITE });
                out.push(DrawCommand::StrokeRect {
                    rect: b,
                    color: p.color,
                    width: 1.0,
                });
                if !c.caption.is_empty() {
                    out.push(text(Point::new(b.left + 4.0, baseline), c.caption.clone(), Rgba::GRAY, TextAnchor::Start));
                }
                let value = c.key.as_ref().and_then(|k| values.get(k)).cloned().unwrap_or_default();
                if !value.is_empty() {
                    out.push(text(Point::new(b.right() - 4.0, baseline), value, Rgba::BLACK, TextAnchor::End));
                }
            }
            ControlRole::List => {
                out.push(DrawCommand::FillRect { rect: b, color: Rgba::WHITE });
                out.push(DrawCommand::StrokeRect {
                    rect: b,
                    color: p.color,
                    width: 1.0,
                });
                let line = p.font.size * 1.4;
                let mut y = b.top + line;
                for item in std::iter::once(&c.caption).chain(&c.items) {
                    if y > b.bottom() {
                        break;
                    }
                    out.push(text(Point::new(b.left + 4.0, y), item.clone(), Rgba::BLACK, TextAnchor::Start));
                    y += line;
                }
            }
        },
        ElementKind::Group => {
            out.push(DrawCommand::Frame { rect: b, color: p.color });
            if let Some(title) = title.filter(|t| !t.is_empty()) {
                out.push(text(Point::new(b.left + 10.0, b.top + p.font.size * 0.35), title.to_owned(), p.color, TextAnchor::Start));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rect_el(id: &str, l: f64, t: f64, w: f64, h: f64) -> SceneElement {
        SceneElement::graphic(
            id,
            GraphicShape::Rect,
            VisibilityParams::new(RectBounds::new(l, t, w, h), Rgba::rgb(10, 20, 30), Font::default()),
            SizeRange::new(5.0, 5.0, 500.0, 500.0),
        )
    }

    fn ids(v: &[&str]) -> Vec<ElementId> {
        v.iter().map(|s| ElementId::new(*s)).collect()
    }

    #[test]
    fn add_and_remove() {
        let mut s = Scene::new();
        s.add_element(rect_el("a", 0.0, 0.0, 10.0, 10.0)).unwrap();
        assert_eq!(
            s.add_element(rect_el("a", 0.0, 0.0, 10.0, 10.0)),
            Err(SceneError::DuplicateId("a".into()))
        );
        s.add_element(rect_el("b", 5.0, 5.0, 10.0, 10.0)).unwrap();
        assert_eq!(s.z_order(), ids(&["a", "b"]).as_slice());
        assert_eq!(s.remove_element("zzz"), Err(SceneError::UnknownId("zzz".into())));
        s.remove_element("a").unwrap();
        assert_eq!(s.z_order(), ids(&["b"]).as_slice());
        s.check_invariants().unwrap();
    }

    #[test]
    fn remove_member_of_group_is_rejected() {
        let mut s = Scene::new();
        s.add_element(rect_el("a", 0.0, 0.0, 10.0, 10.0)).unwrap();
        s.create_group("g", "G", &ids(&["a"]), 8.0).unwrap();
        assert_eq!(
            s.remove_element("a"),
            Err(SceneError::GroupMembershipViolation {
                id: "a".into(),
                group: "g".into()
            })
        );
        s.remove_element("g").unwrap();
        s.remove_element("a").unwrap();
        assert!(s.is_empty());
    }

    #[test]
    fn visibility_params_are_stored_verbatim() {
        let mut s = Scene::new();
        s.add_element(rect_el("a", 0.0, 0.0, 10.0, 10.0)).unwrap();
        s.add_element(rect_el("b", 20.0, 0.0, 10.0, 10.0)).unwrap();
        let mut p = s.element("a").unwrap().params.clone();
        p.font = Font::new("serif", 14.0).bold();
        p.color = Rgba::new(1, 2, 3, 4);
        p.bounds = RectBounds::new(0.1, 0.2, 33.3, 44.4);
        s.set_visibility_params("a", p.clone()).unwrap();
        assert_eq!(s.element("a").unwrap().params, p);
        assert_eq!(s.element("b").unwrap().params.font, Font::default());

        let before = s.clone();
        s.set_visibility_params("a", p.clone()).unwrap();
        assert_eq!(s, before);

        let mut tiny = p.clone();
        tiny.bounds.width = 1.0;
        assert_eq!(s.set_visibility_params("a", tiny), Err(SceneError::SizeRangeViolation("a".into())));
        let mut bad_font = p;
        bad_font.font.size = 0.0;
        assert!(matches!(s.set_visibility_params("a", bad_font), Err(SceneError::InvalidParams { .. })));
    }

    #[test]
    fn hide_show_round_trip() {
        let mut s = Scene::new();
        s.add_element(rect_el("a", 1.5, 2.5, 10.0, 10.0)).unwrap();
        let before = s.clone();
        s.set_hidden("a", true).unwrap();
        assert!(s.build_display_list().is_empty());
        assert!(s.cover_of("a").is_empty());
        s.set_hidden("a", false).unwrap();
        assert_eq!(s, before);
        assert_eq!(s.set_hidden("nope", true), Err(SceneError::UnknownId("nope".into())));
    }

    #[test]
    fn spread_sample_copies_style_not_position() {
        let mut s = Scene::new();
        let mut sample = rect_el("sample", 0.0, 0.0, 40.0, 40.0);
        sample.params.color = Rgba::rgb(0, 0, 255);
        sample.params.font = Font::new("mono", 16.0);
        s.add_element(sample).unwrap();
        let targets: Vec<ElementId> = (0..9)
            .map(|i| {
                let f = f64::from(i + 1);
                s.add_element(rect_el(&format!("t{i}"), 50.0 * f, 7.0 * f, 20.0, 25.0)).unwrap()
            })
            .collect();
        let mut all = targets.clone();
        all.push("sample".into());
        s.spread_sample("sample", &all).unwrap();
        let reference = &s.element("sample").unwrap().params;
        let mut origins = BTreeSet::new();
        for id in &all {
            let p = &s.element(id.as_str()).unwrap().params;
            assert_eq!((p.bounds.width, p.bounds.height), (40.0, 40.0));
            assert_eq!(p.color, reference.color);
            assert_eq!(p.font, reference.font);
            origins.insert((p.bounds.left.to_bits(), p.bounds.top.to_bits()));
        }
        assert_eq!(origins.len(), 10);
        assert_eq!(s.element("sample").unwrap().params.bounds.left, 0.0);

        let before = s.clone();
        s.spread_sample("sample", &[]).unwrap();
        assert_eq!(s, before);
        assert_eq!(s.spread_sample("sample", &ids(&["ghost"])), Err(SceneError::UnknownId("ghost".into())));
    }

    #[test]
    fn snapshot_and_restore() {
        let mut s = Scene::new();
        assert_eq!(s.restore_default_view(), Err(SceneError::NoSnapshot));
        for i in 0..5 {
            s.add_element(rect_el(&format!("e{i}"), f64::from(i) * 20.0, 0.0, 10.0, 10.0)).unwrap();
        }
        s.snapshot_default();
        let fresh = s.clone();
        for i in 0..5 {
            let id = format!("e{i}");
            s.translate_element(&id, 3.0, 4.0);
            s.set_hidden(&id, i % 2 == 0).unwrap();
            s.set_movable(&id, false).unwrap();
        }
        s.raise("e0");
        s.restore_default_view().unwrap();
        assert_eq!(s, fresh);
        s.restore_default_view().unwrap();
        assert_eq!(s, fresh);
    }

    #[test]
    fn rubber_band_selects_fully_contained() {
        let mut s = Scene::new();
        for i in 0..5 {
            s.add_element(rect_el(&format!("b{i}"), f64::from(i) * 50.0, 0.0, 40.0, 40.0)).unwrap();
        }
        assert_eq!(s.rubber_band_select(RectBounds::new(500.0, 500.0, 10.0, 10.0)), None);
        // Covers b0..b2 entirely and half of b3.
        let g = s.rubber_band_select(RectBounds::new(-1.0, -1.0, 162.0, 42.0)).unwrap();
        assert_eq!(s.group(g.as_str()).unwrap().members, ids(&["b0", "b1", "b2"]));
        assert_eq!(s.z_order().last(), Some(&g));
        s.move_group(g.as_str(), 10.0, 0.0).unwrap();
        assert_eq!(s.element("b0").unwrap().bounds().left, 10.0);
        assert_eq!(s.element("b2").unwrap().bounds().left, 110.0);
        assert_eq!(s.element("b3").unwrap().bounds().left, 150.0);
        s.check_invariants().unwrap();
        s.dissolve_group(g.as_str()).unwrap();
        assert!(s.element(g.as_str()).is_none());
        assert_eq!(s.element("b2").unwrap().bounds().left, 110.0);
        s.check_invariants().unwrap();
    }

    #[test]
    fn display_list_painter_order() {
        let mut s = Scene::new();
        assert!(s.build_display_list().is_empty());
        s.add_element(rect_el("low", 0.0, 0.0, 50.0, 50.0)).unwrap();
        let mut top = rect_el("top", 25.0, 25.0, 50.0, 50.0);
        top.params.color = Rgba::rgb(200, 0, 0);
        s.add_element(top).unwrap();
        let list = s.build_display_list();
        assert_eq!(list.len(), 2);
        assert!(matches!(&list[1], DrawCommand::FillRect { color, .. } if *color == Rgba::rgb(200, 0, 0)));
        assert_eq!(list, s.build_display_list());
        s.set_hidden("top", true).unwrap();
        assert_eq!(s.build_display_list(), list[..1].to_vec());
    }

    #[test]
    fn fresh_ids_skip_existing() {
        let mut s = Scene::new();
        assert_eq!(s.fresh_id("plot"), ElementId::new("plot-1"));
        s.add_element(rect_el("plot-7", 0.0, 0.0, 10.0, 10.0)).unwrap();
        s.add_element(rect_el("plotter-9", 0.0, 0.0, 10.0, 10.0)).unwrap();
        assert_eq!(s.fresh_id("plot"), ElementId::new("plot-8"));
    }
}
