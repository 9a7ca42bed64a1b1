//! Scene generators and independent oracles shared by integration tests.
//!
//! The oracles work from first principles (rectangle edges, padded boxes)
//! and never call the engine's cover or frame code.

#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;
use udapp_core::covers::NodeAction;
use udapp_core::display::{Font, Rgba};
use udapp_core::geometry::{Handle, Point, RectBounds, SizeRange};
use udapp_core::mover::{CatchResult, Mover};
use udapp_core::scene::{ControlRole, ElementId, ElementKind, GraphicShape, Scene, SceneElement, VisibilityParams};

pub const CORNER_R: f64 = 6.0;
pub const EDGE_HW: f64 = 3.0;

/// Quarter-pixel grid value in `[lo, hi]`.
pub fn grid(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    let steps = ((hi - lo) * 4.0) as i64;
    lo + rng.gen_range(0..=steps.max(0)) as f64 / 4.0
}

pub fn grid_point(rng: &mut ChaCha8Rng, r: &RectBounds, pad: f64) -> Point {
    Point::new(
        grid(rng, r.left.floor() - pad, r.right().ceil() + pad),
        grid(rng, r.top.floor() - pad, r.bottom().ceil() + pad),
    )
}

pub fn test_range() -> SizeRange {
    SizeRange::new(8.0, 8.0, 300.0, 200.0)
}

fn random_element(rng: &mut ChaCha8Rng, id: &str) -> SceneElement {
    let bounds = RectBounds::new(
        grid(rng, 0.0, 500.0),
        grid(rng, 0.0, 400.0),
        grid(rng, 8.0, 160.0),
        grid(rng, 8.0, 120.0),
    );
    let params = VisibilityParams::new(bounds, Rgba::rgb(rng.gen(), rng.gen(), rng.gen()), Font::default());
    match rng.gen_range(0..5) {
        0 => SceneElement::graphic(id, GraphicShape::Rect, params, test_range()),
        1 => SceneElement::graphic(id, GraphicShape::Ellipse, params, test_range()),
        2 => SceneElement::graphic(id, GraphicShape::Label { text: format!("label {id}") }, params, test_range()),
        3 => SceneElement::control(id, ControlRole::Button, id, Some(id), params, test_range()),
        _ => SceneElement::control(id, ControlRole::TextField, "", Some(id), params, test_range()),
    }
}

/// Random scene with plain elements and (possibly nested) groups, some
/// hidden, some fixed. The mover has most elements registered.
pub fn random_scene(rng: &mut ChaCha8Rng) -> (Scene, Mover) {
    let mut scene = Scene::new();
    let n = rng.gen_range(1..=10);
    for i in 0..n {
        scene.add_element(random_element(rng, &format!("e{i}"))).unwrap();
    }
    let mut top_level: Vec<ElementId> = scene.z_order().to_vec();
    for g in 0..rng.gen_range(0..=3) {
        if top_level.is_empty() {
            break;
        }
        top_level.shuffle(rng);
        let take = rng.gen_range(1..=top_level.len().min(4));
        let members: Vec<ElementId> = top_level.drain(..take).collect();
        let margin = *[0.0, 4.0, 8.0].choose(rng).unwrap();
        let id = scene.create_group(&format!("g{g}"), &format!("Group {g}"), &members, margin).unwrap();
        top_level.push(id);
    }
    let ids: Vec<ElementId> = scene.z_order().to_vec();
    for id in &ids {
        if rng.gen_bool(0.1) {
            scene.set_hidden(id.as_str(), true).unwrap();
        }
        if rng.gen_bool(0.15) {
            scene.set_movable(id.as_str(), false).unwrap();
        }
    }
    let mut mover = Mover::new();
    for id in &ids {
        if rng.gen_bool(0.9) {
            mover.register(&scene, id.as_str()).unwrap();
        }
    }
    (scene, mover)
}

/// Expected frame of `group`: padded bounding box of its visible members,
/// with nested groups contributing their own expected frame.
pub fn frame_oracle(scene: &Scene, group: &str) -> Option<RectBounds> {
    let g = scene.group(group)?;
    let mut acc: Option<(f64, f64, f64, f64)> = None;
    for m in &g.members {
        let e = scene.element(m.as_str()).unwrap();
        if e.hidden {
            continue;
        }
        let r = if scene.group(m.as_str()).is_some() {
            match frame_oracle(scene, m.as_str()) {
                Some(r) => r,
                None => continue,
            }
        } else {
            e.bounds()
        };
        let (l, t, rt, b) = (r.left, r.top, r.left + r.width, r.top + r.height);
        acc = Some(match acc {
            None => (l, t, rt, b),
            Some((l0, t0, r0, b0)) => (l0.min(l), t0.min(t), r0.max(rt), b0.max(b)),
        });
    }
    acc.map(|(l, t, r, b)| RectBounds::new(l - g.margin, t - g.margin, (r + g.margin) - (l - g.margin), (b + g.margin) - (t - g.margin)))
}

fn near_corner(p: Point, c: Point) -> bool {
    let (dx, dy) = (p.x - c.x, p.y - c.y);
    dx * dx + dy * dy <= CORNER_R * CORNER_R
}

/// Distance test against a horizontal or vertical edge from `a` to `b`.
fn near_edge(p: Point, a: Point, b: Point) -> bool {
    let hw2 = EDGE_HW * EDGE_HW;
    if a.y == b.y {
        let (lo, hi) = (a.x.min(b.x), a.x.max(b.x));
        if p.x >= lo && p.x <= hi {
            return (p.y - a.y) * (p.y - a.y) <= hw2;
        }
    } else {
        let (lo, hi) = (a.y.min(b.y), a.y.max(b.y));
        if p.y >= lo && p.y <= hi {
            return (p.x - a.x) * (p.x - a.x) <= hw2;
        }
    }
    near_corner_r(p, a, hw2) || near_corner_r(p, b, hw2)
}

fn near_corner_r(p: Point, c: Point, r2: f64) -> bool {
    let (dx, dy) = (p.x - c.x, p.y - c.y);
    dx * dx + dy * dy <= r2
}

fn inside(p: Point, r: &RectBounds) -> bool {
    p.x >= r.left && p.x <= r.left + r.width && p.y >= r.top && p.y <= r.top + r.height
}

/// Which action a press at `p` gets from an element's cover, derived from
/// the geometry alone.
pub fn cover_oracle(kind: &ElementKind, r: &RectBounds, p: Point) -> Option<NodeAction> {
    let (l, t, rt, b) = (r.left, r.top, r.left + r.width, r.top + r.height);
    let (nw, ne, se, sw) = (Point::new(l, t), Point::new(rt, t), Point::new(rt, b), Point::new(l, b));
    if let ElementKind::Group = kind {
        return inside(p, r).then_some(NodeAction::FrameMove);
    }
    for (c, h) in [(nw, Handle::NW), (ne, Handle::NE), (se, Handle::SE), (sw, Handle::SW)] {
        if near_corner(p, c) {
            return Some(NodeAction::Resize(h));
        }
    }
    let is_control = matches!(kind, ElementKind::Control(_));
    for (a, c, h) in [(nw, ne, Handle::N), (ne, se, Handle::E), (sw, se, Handle::S), (nw, sw, Handle::W)] {
        if near_edge(p, a, c) {
            return Some(if is_control { NodeAction::Move } else { NodeAction::Resize(h) });
        }
    }
    (!is_control && inside(p, r)).then_some(NodeAction::Move)
}

/// Whether an element occupies screen area: not hidden, and for groups at
/// least one visible member.
pub fn shown(scene: &Scene, id: &str) -> bool {
    let e = scene.element(id).unwrap();
    !e.hidden && (scene.group(id).is_none() || frame_oracle(scene, id).is_some())
}

/// Brute-force left-button catch: scan from the top of the z-order; the
/// first registered movable element whose cover contains `p` is caught;
/// a control whose bounds contain `p` ends the scan.
pub fn catch_oracle(scene: &Scene, mover: &Mover, p: Point) -> CatchResult {
    for id in scene.z_order().iter().rev() {
        if !shown(scene, id.as_str()) {
            continue;
        }
        let e = scene.element(id.as_str()).unwrap();
        let rect = if scene.group(id.as_str()).is_some() {
            frame_oracle(scene, id.as_str()).unwrap()
        } else {
            e.bounds()
        };
        if mover.is_registered(id.as_str()) && e.movable {
            match cover_oracle(&e.kind, &rect, p) {
                Some(NodeAction::Resize(handle)) => return CatchResult::CaughtResize { id: id.clone(), handle },
                Some(_) => return CatchResult::CaughtMove { id: id.clone() },
                None => {}
            }
        }
        if matches!(e.kind, ElementKind::Control(_)) && inside(p, &rect) {
            return CatchResult::NoCatch;
        }
    }
    CatchResult::NoCatch
}

/// Every element reachable from `id` through group membership, `id`
/// included.
pub fn descendants(scene: &Scene, id: &str) -> BTreeSet<ElementId> {
    let mut out = BTreeSet::new();
    let mut stack = vec![ElementId::new(id)];
    while let Some(next) = stack.pop() {
        if out.insert(next.clone()) {
            if let Some(g) = scene.group(next.as_str()) {
                stack.extend(g.members.iter().cloned());
            }
        }
    }
    out
}

/// Checks every group's frame against [`frame_oracle`].
pub fn frames_agree(scene: &Scene) -> Result<(), String> {
    for g in scene.groups() {
        let expected = frame_oracle(scene, g.id.as_str());
        if g.frame != expected {
            return Err(format!("group {}: frame {:?}, oracle {:?}", g.id, g.frame, expected));
        }
        if let Some(f) = expected {
            if scene.element(g.id.as_str()).unwrap().bounds() != f {
                return Err(format!("group element {} does not mirror its frame", g.id));
            }
        }
    }
    Ok(())
}

/// Applies one random scene operation and returns a short description.
/// Operations that the engine rejects are fine; the scene must stay
/// consistent either way.
pub fn apply_random_op(rng: &mut ChaCha8Rng, scene: &mut Scene, mover: &mut Mover, serial: &mut usize) -> String {
    let ids: Vec<ElementId> = scene.z_order().to_vec();
    let groups: Vec<ElementId> = scene.groups().map(|g| g.id.clone()).collect();
    let pick = |rng: &mut ChaCha8Rng, v: &[ElementId]| v.choose(rng).cloned();
    match rng.gen_range(0..11) {
        0 | 1 => {
            let Some(id) = pick(rng, &ids) else { return "noop".into() };
            let start = grid_point(rng, &scene.element(id.as_str()).unwrap().bounds(), 6.0);
            let _ = mover.catch(scene, start, udapp_core::mover::MouseButton::Left);
            let mut p = start;
            for _ in 0..rng.gen_range(1..4) {
                p = Point::new(p.x + grid(rng, -50.0, 50.0), p.y + grid(rng, -50.0, 50.0));
                mover.move_to(scene, p);
            }
            mover.release(scene);
            format!("drag from {start:?} to {p:?}")
        }
        2 => {
            let Some(g) = pick(rng, &groups) else { return "noop".into() };
            let (dx, dy) = (grid(rng, -40.0, 40.0), grid(rng, -40.0, 40.0));
            let _ = scene.move_group(g.as_str(), dx, dy);
            format!("move group {g} by ({dx}, {dy})")
        }
        3 => {
            let Some(id) = pick(rng, &ids) else { return "noop".into() };
            let hide = rng.gen_bool(0.5);
            scene.set_hidden(id.as_str(), hide).unwrap();
            format!("hidden({id}) = {hide}")
        }
        4 => {
            *serial += 1;
            let id = format!("n{serial}");
            scene.add_element(random_element(rng, &id)).unwrap();
            mover.register(scene, &id).unwrap();
            format!("add {id}")
        }
        5 => {
            let (Some(g), Some(m)) = (pick(rng, &groups), pick(rng, &ids)) else { return "noop".into() };
            let r = scene.add_member(g.as_str(), m.as_str());
            format!("add {m} to {g}: {r:?}")
        }
        6 => {
            let Some(g) = pick(rng, &groups) else { return "noop".into() };
            let members = scene.group(g.as_str()).unwrap().members.clone();
            let Some(m) = members.choose(rng) else { return "noop".into() };
            scene.remove_member(g.as_str(), m.as_str()).unwrap();
            format!("remove {m} from {g}")
        }
        7 => {
            if scene.default_snapshot().is_none() || rng.gen_bool(0.3) {
                scene.snapshot_default();
                "snapshot".into()
            } else {
                scene.restore_default_view().unwrap();
                mover.prune(scene);
                mover.register_all(scene);
                "restore".into()
            }
        }
        8 => {
            let a = Point::new(grid(rng, -20.0, 600.0), grid(rng, -20.0, 500.0));
            let b = Point::new(grid(rng, -20.0, 600.0), grid(rng, -20.0, 500.0));
            let marquee = RectBounds::new(a.x.min(b.x), a.y.min(b.y), (a.x - b.x).abs(), (a.y - b.y).abs());
            if let Some(id) = scene.rubber_band_select(marquee) {
                mover.register(scene, id.as_str()).unwrap();
            }
            format!("rubber band {marquee:?}")
        }
        9 => {
            let temps: Vec<ElementId> = scene.groups().filter(|g| g.temporary).map(|g| g.id.clone()).collect();
            let Some(t) = pick(rng, &temps) else { return "noop".into() };
            scene.dissolve_group(t.as_str()).unwrap();
            mover.prune(scene);
            format!("dissolve {t}")
        }
        _ => {
            let plain: Vec<ElementId> = ids.iter().filter(|id| scene.group(id.as_str()).is_none()).cloned().collect();
            let Some(sample) = pick(rng, &plain) else { return "noop".into() };
            let targets: Vec<ElementId> = ids.iter().filter(|_| rng.gen_bool(0.3)).cloned().collect();
            scene.spread_sample(sample.as_str(), &targets).unwrap();
            format!("spread {sample}")
        }
    }
}
