//! Headless operation: JSON Lines event traces, replay, scene hashing and
//! the randomized verification run behind `udapp verify`.
//!
//! A trace line is one JSON object tagged by `"event"`:
//!
//! ```text
//! {"event":"down","x":40,"y":100}
//! {"event":"move","x":45,"y":107}
//! {"event":"up","x":45,"y":107}
//! {"event":"command","name":"hide","args":{"id":"numbers"}}
//! {"event":"save-layout","path":"layout.json"}
//! ```
//!
//! Relative paths resolve against the session's base directory.

use crate::demos::{add_plot, default_world, remove_plot, DemoApp, DemoError, DemoKind, LogicalKey, UnknownKey};
use crate::display::{Font, Rgba};
use crate::geometry::{Point, RectBounds};
use crate::interpreter::ExprError;
use crate::mover::{CatchResult, MouseButton, MoverError, Pick};
use crate::persistence::{load_layout, load_layout_file, save_layout_file, save_layout_with_data, LayoutError};
use crate::plotting::{BadRange, WorldRange};
use crate::scene::{ElementId, SceneError};
use crate::svg::render_svg;
use fnv::FnvHasher;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::hash::Hasher;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Button {
    #[default]
    Left,
    Right,
}

impl From<Button> for MouseButton {
    fn from(b: Button) -> Self {
        match b {
            Button::Left => MouseButton::Left,
            Button::Right => MouseButton::Right,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdArgs {
    pub id: ElementId,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpreadArgs {
    pub sample: ElementId,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub targets: Vec<ElementId>,
    /// Adds the direct non-group members of this group to the targets.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<ElementId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AddPlotArgs {
    pub expr: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub world: Option<WorldRange>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KeyArgs {
    pub key: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetParamsArgs {
    pub id: ElementId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<RectBounds>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub color: Option<Rgba>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub font: Option<Font>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetFieldArgs {
    pub key: String,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", content = "args", rename_all = "kebab-case")]
pub enum Command {
    Hide(IdArgs),
    Show(IdArgs),
    Fix(IdArgs),
    Unfix(IdArgs),
    Spread(SpreadArgs),
    RestoreDefault,
    RubberBand(RectBounds),
    Dissolve(IdArgs),
    AddPlot(AddPlotArgs),
    RemovePlot(IdArgs),
    PressKey(KeyArgs),
    SetParams(SetParamsArgs),
    SetField(SetFieldArgs),
}

impl Command {
    pub const NAMES: [&'static str; 13] = [
        "hide",
        "show",
        "fix",
        "unfix",
        "spread",
        "restore-default",
        "rubber-band",
        "dissolve",
        "add-plot",
        "remove-plot",
        "press-key",
        "set-params",
        "set-field",
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Command::Hide(_) => "hide",
            Command::Show(_) => "show",
            Command::Fix(_) => "fix",
            Command::Unfix(_) => "unfix",
            Command::Spread(_) => "spread",
            Command::RestoreDefault => "restore-default",
            Command::RubberBand(_) => "rubber-band",
            Command::Dissolve(_) => "dissolve",
            Command::AddPlot(_) => "add-plot",
            Command::RemovePlot(_) => "remove-plot",
            Command::PressKey(_) => "press-key",
            Command::SetParams(_) => "set-params",
            Command::SetField(_) => "set-field",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "kebab-case")]
pub enum TraceEvent {
    Down {
        x: f64,
        y: f64,
        #[serde(default)]
        button: Button,
    },
    Move {
        x: f64,
        y: f64,
    },
    Up {
        x: f64,
        y: f64,
    },
    Command(Command),
    SaveLayout {
        path: String,
    },
    LoadLayout {
        path: String,
    },
}

impl TraceEvent {
    pub fn down(p: Point) -> Self {
        TraceEvent::Down {
            x: p.x,
            y: p.y,
            button: Button::Left,
        }
    }

    pub fn to(p: Point) -> Self {
        TraceEvent::Move { x: p.x, y: p.y }
    }

    pub fn up(p: Point) -> Self {
        TraceEvent::Up { x: p.x, y: p.y }
    }
}

#[derive(Debug, Error)]
pub enum CommandError {
    #[error(transparent)]
    Scene(#[from] SceneError),
    #[error(transparent)]
    Mover(#[from] MoverError),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Range(#[from] BadRange),
    #[error(transparent)]
    Demo(#[from] DemoError),
    #[error(transparent)]
    Key(#[from] UnknownKey),
    #[error(transparent)]
    Layout(#[from] LayoutError),
    #[error("coordinates must be finite")]
    NonFinite,
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("trace line {line}: {reason}")]
    TraceParse { line: usize, reason: String },
    #[error("event {index}: {cause}")]
    Event { index: usize, cause: CommandError },
}

/// Parses a JSON Lines trace. Blank lines are skipped; `line` in errors is
/// 1-based.
pub fn parse_trace(text: &str) -> Result<Vec<TraceEvent>, HarnessError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| HarnessError::TraceParse {
                line: i + 1,
                reason: e.to_string(),
            })
        })
        .collect()
}

pub fn write_trace(events: &[TraceEvent]) -> String {
    events
        .iter()
        .map(|e| serde_json::to_string(e).expect("events are plain data") + "\n")
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SceneHash(pub u64);

impl fmt::Display for SceneHash {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:016x}", self.0)
    }
}

pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h = FnvHasher::default();
    h.write(bytes);
    h.finish()
}

/// A demo driven the way a UI would drive it.
#[derive(Debug, Clone)]
pub struct Session {
    pub app: DemoApp,
    base_dir: PathBuf,
    /// Control pressed on its interior; clicked if released over it.
    pressed_control: Option<ElementId>,
}

impl Session {
    pub fn new(kind: DemoKind) -> Self {
        Self {
            app: DemoApp::new(kind),
            base_dir: PathBuf::from("."),
            pressed_control: None,
        }
    }

    pub fn with_base_dir(mut self, dir: impl Into<PathBuf>) -> Self {
        self.base_dir = dir.into();
        self
    }

    fn resolve(&self, path: &str) -> PathBuf {
        let p = Path::new(path);
        if p.is_absolute() {
            p.to_owned()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn layout_bytes(&self) -> Vec<u8> {
        save_layout_with_data(&self.app.scene, &self.app.side_data())
    }

    /// FNV-1a over the canonical layout document followed by the demo's
    /// application state.
    pub fn hash(&self) -> SceneHash {
        let mut bytes = self.layout_bytes();
        bytes.extend(serde_json::to_vec(&self.app.state_json()).expect("plain data"));
        SceneHash(fnv1a64(&bytes))
    }

    pub fn svg(&self) -> String {
        render_svg(&self.app.display_list())
    }

    pub fn load_layout_bytes(&mut self, bytes: &[u8]) -> Result<(), LayoutError> {
        self.release();
        let data = load_layout(bytes, &mut self.app.scene)?;
        self.after_layout_change();
        self.app.apply_side_data(&data);
        Ok(())
    }

    pub fn load_layout_path(&mut self, path: &Path) -> Result<(), LayoutError> {
        self.release();
        let data = load_layout_file(path, &mut self.app.scene)?;
        self.after_layout_change();
        self.app.apply_side_data(&data);
        Ok(())
    }

    fn release(&mut self) {
        self.app.mover.release(&mut self.app.scene);
        self.pressed_control = None;
    }

    fn after_layout_change(&mut self) {
        self.app.mover.prune(&self.app.scene);
        self.app.mover.register_all(&self.app.scene);
    }

    pub fn apply(&mut self, event: &TraceEvent) -> Result<(), CommandError> {
        match event {
            TraceEvent::Down { x, y, button } => {
                let p = finite(*x, *y)?;
                let app = &mut self.app;
                let result = app.mover.catch(&mut app.scene, p, (*button).into())?;
                if result == CatchResult::NoCatch && *button == Button::Left {
                    if let Pick::Control { id } = app.mover.pick(&app.scene, p) {
                        self.pressed_control = Some(id);
                    }
                }
            }
            TraceEvent::Move { x, y } => {
                let p = finite(*x, *y)?;
                self.app.mover.move_to(&mut self.app.scene, p);
            }
            TraceEvent::Up { x, y } => {
                let p = finite(*x, *y)?;
                self.app.mover.release(&mut self.app.scene);
                if let Some(id) = self.pressed_control.take() {
                    if self.app.mover.pick(&self.app.scene, p) == (Pick::Control { id: id.clone() }) {
                        self.app.activate(id.as_str());
                    }
                }
            }
            TraceEvent::Command(cmd) => {
                self.release();
                self.command(cmd)?;
            }
            TraceEvent::SaveLayout { path } => {
                self.release();
                save_layout_file(&self.resolve(path), &self.app.scene, &self.app.side_data())?;
            }
            TraceEvent::LoadLayout { path } => {
                let path = self.resolve(path);
                self.load_layout_path(&path)?;
            }
        }
        Ok(())
    }

    fn command(&mut self, cmd: &Command) -> Result<(), CommandError> {
        let app = &mut self.app;
        let scene = &mut app.scene;
        match cmd {
            Command::Hide(a) => scene.set_hidden(a.id.as_str(), true)?,
            Command::Show(a) => scene.set_hidden(a.id.as_str(), false)?,
            Command::Fix(a) => scene.set_movable(a.id.as_str(), false)?,
            Command::Unfix(a) => scene.set_movable(a.id.as_str(), true)?,
            Command::Spread(a) => {
                let mut targets = a.targets.clone();
                if let Some(g) = &a.group {
                    let group = scene.group(g.as_str()).ok_or_else(|| SceneError::UnknownGroup(g.clone()))?;
                    targets.extend(group.members.iter().filter(|m| scene.group(m.as_str()).is_none()).cloned());
                }
                scene.spread_sample(a.sample.as_str(), &targets)?;
            }
            Command::RestoreDefault => {
                scene.restore_default_view()?;
                self.after_layout_change();
            }
            Command::RubberBand(rect) => {
                if !rect.is_valid() {
                    return Err(CommandError::NonFinite);
                }
                if let Some(id) = scene.rubber_band_select(*rect) {
                    app.mover.register(scene, id.as_str())?;
                }
            }
            Command::Dissolve(a) => {
                scene.dissolve_group(a.id.as_str())?;
                app.mover.prune(scene);
            }
            Command::AddPlot(a) => {
                if app.kind != DemoKind::Functions {
                    return Err(DemoError::NotApplicable("add-plot").into());
                }
                let world = match a.world {
                    Some(w) => WorldRange::new(w.x_min, w.x_max, w.y_min, w.y_max)?,
                    None => default_world(),
                };
                let id = add_plot(scene, &a.expr, world)?;
                app.mover.register(scene, id.as_str())?;
            }
            Command::RemovePlot(a) => {
                if app.kind != DemoKind::Functions {
                    return Err(DemoError::NotApplicable("remove-plot").into());
                }
                remove_plot(scene, a.id.as_str())?;
                app.mover.prune(scene);
            }
            Command::PressKey(a) => {
                let key: LogicalKey = a.key.parse()?;
                app.press_key(key)?;
            }
            Command::SetParams(a) => {
                let current = scene
                    .element(a.id.as_str())
                    .ok_or_else(|| SceneError::UnknownId(a.id.clone()))?
                    .params
                    .clone();
                let mut params = current;
                if let Some(b) = a.bounds {
                    params.bounds = b;
                }
                if let Some(c) = a.color {
                    params.color = c;
                }
                if let Some(f) = &a.font {
                    params.font = f.clone();
                }
                scene.set_visibility_params(a.id.as_str(), params)?;
            }
            Command::SetField(a) => app.set_field(&a.key, &a.value)?,
        }
        Ok(())
    }
}

fn finite(x: f64, y: f64) -> Result<Point, CommandError> {
    let p = Point::new(x, y);
    if p.is_finite() {
        Ok(p)
    } else {
        Err(CommandError::NonFinite)
    }
}

/// Applies `events` in order and returns the final hash. The first failing
/// event aborts the replay.
pub fn replay(session: &mut Session, events: &[TraceEvent]) -> Result<SceneHash, HarnessError> {
    for (index, e) in events.iter().enumerate() {
        session.apply(e).map_err(|cause| HarnessError::Event { index, cause })?;
    }
    Ok(session.hash())
}

/// Snaps to a quarter-pixel grid. Sums and differences of such values stay
/// exact, which keeps move arithmetic bit-reproducible.
fn grid(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    let steps = (((hi - lo) * 4.0) as i64).max(0);
    lo + rng.gen_range(0..=steps) as f64 / 4.0
}

fn grid_point_in(rng: &mut ChaCha8Rng, r: &RectBounds, pad: f64) -> Point {
    Point::new(
        grid(rng, r.left.floor() - pad, r.right().ceil() + pad),
        grid(rng, r.top.floor() - pad, r.bottom().ceil() + pad),
    )
}

/// One random user gesture: a drag, a click, or a command. Commands that
/// would fail for the current state are avoided, so every generated trace
/// replays without error.
pub fn random_gesture(rng: &mut ChaCha8Rng, app: &DemoApp) -> Vec<TraceEvent> {
    let scene = &app.scene;
    let ids: Vec<ElementId> = scene.z_order().to_vec();
    let plain: Vec<ElementId> = ids.iter().filter(|id| scene.group(id.as_str()).is_none()).cloned().collect();
    let pick_id = |rng: &mut ChaCha8Rng, from: &[ElementId]| from.choose(rng).cloned();
    let roll = rng.gen_range(0..100);
    let cmd = |c: Command| vec![TraceEvent::Command(c)];

    if roll < 55 || ids.is_empty() {
        // Drag starting near a random element so covers are actually hit.
        let start = match pick_id(rng, &ids) {
            Some(id) => grid_point_in(rng, &scene.element(id.as_str()).expect("listed").bounds(), 8.0),
            None => Point::new(grid(rng, 0.0, 400.0), grid(rng, 0.0, 400.0)),
        };
        let mut events = vec![TraceEvent::down(start)];
        let mut p = start;
        for _ in 0..rng.gen_range(1..=4) {
            p = Point::new(p.x + grid(rng, -40.0, 40.0), p.y + grid(rng, -40.0, 40.0));
            events.push(TraceEvent::to(p));
        }
        events.push(TraceEvent::up(p));
        return events;
    }
    if roll < 62 {
        // Click at a control's center.
        let controls: Vec<&ElementId> = plain.iter().filter(|id| scene.element(id.as_str()).is_some_and(|e| e.control_proxy().is_some())).collect();
        if let Some(id) = controls.choose(rng) {
            let c = scene.element(id.as_str()).expect("listed").bounds().center();
            return vec![TraceEvent::down(c), TraceEvent::up(c)];
        }
    }
    let Some(any) = pick_id(rng, &ids) else {
        return cmd(Command::RestoreDefault);
    };
    let id_args = IdArgs { id: any.clone() };
    match rng.gen_range(0..12) {
        0 => cmd(Command::Hide(id_args)),
        1 => cmd(Command::Show(id_args)),
        2 => cmd(Command::Fix(id_args)),
        3 => cmd(Command::Unfix(id_args)),
        4 => {
            let Some(sample) = pick_id(rng, &plain) else {
                return cmd(Command::RestoreDefault);
            };
            let targets: Vec<ElementId> = plain.iter().filter(|_| rng.gen_bool(0.3)).cloned().collect();
            cmd(Command::Spread(SpreadArgs {
                sample,
                targets,
                group: None,
            }))
        }
        5 => cmd(Command::RestoreDefault),
        6 => {
            let a = Point::new(grid(rng, 0.0, 600.0), grid(rng, 0.0, 500.0));
            let b = Point::new(grid(rng, 0.0, 600.0), grid(rng, 0.0, 500.0));
            cmd(Command::RubberBand(RectBounds::from_corners(a.x.min(b.x), a.y.min(b.y), a.x.max(b.x), a.y.max(b.y))))
        }
        7 => {
            let temporary: Vec<ElementId> = scene.groups().filter(|g| g.temporary).map(|g| g.id.clone()).collect();
            match pick_id(rng, &temporary) {
                Some(id) => cmd(Command::Dissolve(IdArgs { id })),
                None => cmd(Command::Show(id_args)),
            }
        }
        8 => {
            let Some(id) = pick_id(rng, &plain) else {
                return cmd(Command::RestoreDefault);
            };
            let e = scene.element(id.as_str()).expect("listed");
            let r = e.size_range;
            let w = grid(rng, r.min_w.ceil(), r.max_w.min(400.0).floor());
            let h = grid(rng, r.min_h.ceil(), r.max_h.min(300.0).floor());
            let bounds = RectBounds::new(grid(rng, 0.0, 600.0), grid(rng, 0.0, 500.0), w, h);
            let color = Rgba::rgb(rng.gen(), rng.gen(), rng.gen());
            cmd(Command::SetParams(SetParamsArgs {
                id,
                bounds: Some(bounds),
                color: Some(color),
                font: None,
            }))
        }
        _ => match app.kind {
            DemoKind::Calculator => {
                let key = *LogicalKey::all().choose(rng).expect("non-empty");
                cmd(Command::PressKey(KeyArgs { key: key.name() }))
            }
            DemoKind::PersonalData => {
                let record = app.values();
                let key = record.keys().nth(rng.gen_range(0..record.len())).expect("in range").clone();
                cmd(Command::SetField(SetFieldArgs {
                    key,
                    value: format!("value {}", rng.gen_range(0..1000)),
                }))
            }
            DemoKind::Functions => {
                let plots: Vec<ElementId> = plain.iter().filter(|id| scene.element(id.as_str()).is_some_and(|e| e.plot().is_some())).cloned().collect();
                let free: Vec<ElementId> = plots.iter().filter(|id| scene.parents_of(id.as_str()).is_empty()).cloned().collect();
                if rng.gen_bool(0.5) || free.is_empty() {
                    let expr = ["cos(x)", "x^2/4 - 1", "exp(-x^2)", "1/x", "sqrt(abs(x))", "ln(x)"].choose(rng).expect("non-empty");
                    cmd(Command::AddPlot(AddPlotArgs {
                        expr: (*expr).to_owned(),
                        world: None,
                    }))
                } else {
                    cmd(Command::RemovePlot(IdArgs {
                        id: free.choose(rng).expect("non-empty").clone(),
                    }))
                }
            }
        },
    }
}

/// Fixed key script used to check that calculator results do not depend
/// on the layout.
pub const CALC_SCRIPT: &str = "C 1 2 + 3 4 * 2 = sqrt + 1 . 5 = negate / 4 = recip C 9 9 - 1 = * 3 . 1 4 1 5 9 =";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub demo: &'static str,
    pub sequences: usize,
    pub events: usize,
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} sequences, {} events, all checks passed", self.demo, self.sequences, self.events)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{demo}: sequence {sequence}, event {event}: {reason}")]
pub struct VerifyFailure {
    pub demo: &'static str,
    pub sequence: usize,
    pub event: usize,
    pub reason: String,
}

/// Randomized check of a demo. Each sequence applies random gestures to a
/// fresh build and checks after every event that the scene invariants
/// hold; at the end it checks the layout round trip, that a second replay
/// reproduces the hash, and (for the calculator) that a fixed key script
/// gives the same display as on the default layout.
pub fn verify(kind: DemoKind, seed: u64, sequences: usize, gestures: usize) -> Result<VerifyReport, VerifyFailure> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut total = 0;
    let reference_display = calc_script_display(&mut Session::new(kind));
    for sequence in 0..sequences {
        let fail = |event: usize, reason: String| VerifyFailure {
            demo: kind.name(),
            sequence,
            event,
            reason,
        };
        let mut session = Session::new(kind);
        let mut trace = Vec::new();
        for _ in 0..gestures {
            for e in random_gesture(&mut rng, &session.app) {
                session.apply(&e).map_err(|err| fail(trace.len(), err.to_string()))?;
                session.app.scene.check_invariants().map_err(|r| fail(trace.len(), r))?;
                trace.push(e);
            }
        }
        total += trace.len();

        let bytes = session.layout_bytes();
        let mut reloaded = Session::new(kind);
        reloaded.load_layout_bytes(&bytes).map_err(|e| fail(trace.len(), format!("reload failed: {e}")))?;
        if reloaded.app.scene != session.app.scene {
            return Err(fail(trace.len(), "reloaded scene differs".into()));
        }
        if reloaded.layout_bytes() != bytes {
            return Err(fail(trace.len(), "save/load/save is not byte-identical".into()));
        }

        let mut again = Session::new(kind);
        let hash = replay(&mut again, &trace).map_err(|e| fail(trace.len(), e.to_string()))?;
        if hash != session.hash() {
            return Err(fail(trace.len(), "replay is not deterministic".into()));
        }

        if kind == DemoKind::Calculator {
            let shown = calc_script_display(&mut session);
            if shown != reference_display {
                return Err(fail(trace.len(), format!("display `{shown:?}` differs from `{reference_display:?}`")));
            }
        }
    }
    Ok(VerifyReport {
        demo: kind.name(),
        sequences,
        events: total,
    })
}

fn calc_script_display(session: &mut Session) -> Option<String> {
    session.app.calc()?;
    for key in CALC_SCRIPT.split_whitespace() {
        let key: LogicalKey = key.parse().expect("script keys are valid");
        session.app.press_key(key).expect("calculator accepts keys");
    }
    session.app.calc().map(|c| c.display.clone())
}
