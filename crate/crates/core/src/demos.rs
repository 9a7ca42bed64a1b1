//! The three demonstration programs: Calculator, PersonalData and the
//! Functions analyser.
//!
//! Builders only produce the default layout. Application behavior is keyed
//! to logical identities (calculator keys, field keys), never to where an
//! element happens to be drawn.

use crate::display::{DisplayList, Font, Rgba};
use crate::geometry::{RectBounds, SizeRange};
use crate::groups::DEFAULT_MARGIN;
use crate::interpreter::ExprError;
use crate::mover::Mover;
use crate::persistence::SideData;
use crate::plotting::{Curve, PlotArea, WorldRange};
use crate::scene::{ControlRole, ElementId, GraphicShape, Scene, SceneElement, SceneError, VisibilityParams};
use serde::Serialize;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LogicalKey {
    Digit(u8),
    Point,
    Add,
    Sub,
    Mul,
    Div,
    Equals,
    Clear,
    Sqrt,
    Reciprocal,
    Negate,
}

impl LogicalKey {
    pub fn all() -> Vec<LogicalKey> {
        let mut keys: Vec<LogicalKey> = (0..10).map(LogicalKey::Digit).collect();
        keys.extend([
            LogicalKey::Point,
            LogicalKey::Add,
            LogicalKey::Sub,
            LogicalKey::Mul,
            LogicalKey::Div,
            LogicalKey::Equals,
            LogicalKey::Clear,
            LogicalKey::Sqrt,
            LogicalKey::Reciprocal,
            LogicalKey::Negate,
        ]);
        keys
    }

    /// Stable name, used in element ids (`key-<name>`) and traces.
    pub fn name(self) -> String {
        match self {
            LogicalKey::Digit(d) => d.to_string(),
            LogicalKey::Point => "point".into(),
            LogicalKey::Add => "plus".into(),
            LogicalKey::Sub => "minus".into(),
            LogicalKey::Mul => "times".into(),
            LogicalKey::Div => "divide".into(),
            LogicalKey::Equals => "equals".into(),
            LogicalKey::Clear => "clear".into(),
            LogicalKey::Sqrt => "sqrt".into(),
            LogicalKey::Reciprocal => "recip".into(),
            LogicalKey::Negate => "negate".into(),
        }
    }

    pub fn caption(self) -> String {
        match self {
            LogicalKey::Digit(d) => d.to_string(),
            LogicalKey::Point => ".".into(),
            LogicalKey::Add => "+".into(),
            LogicalKey::Sub => "-".into(),
            LogicalKey::Mul => "*".into(),
            LogicalKey::Div => "/".into(),
            LogicalKey::Equals => "=".into(),
            LogicalKey::Clear => "C".into(),
            LogicalKey::Sqrt => "sqrt".into(),
            LogicalKey::Reciprocal => "1/x".into(),
            LogicalKey::Negate => "+/-".into(),
        }
    }

    pub fn element_id(self) -> ElementId {
        ElementId::new(format!("key-{}", self.name()))
    }
}

impl fmt::Display for LogicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown calculator key `{0}`")]
pub struct UnknownKey(pub String);

impl FromStr for LogicalKey {
    type Err = UnknownKey;

    /// Accepts names as well as captions, so "plus" and "+" both work.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let [d @ b'0'..=b'9'] = s.as_bytes() {
            return Ok(LogicalKey::Digit(d - b'0'));
        }
        Ok(match s {
            "point" | "." => LogicalKey::Point,
            "plus" | "+" => LogicalKey::Add,
            "minus" | "-" | "\u{2212}" => LogicalKey::Sub,
            "times" | "*" => LogicalKey::Mul,
            "divide" | "/" => LogicalKey::Div,
            "equals" | "=" => LogicalKey::Equals,
            "clear" | "C" | "c" => LogicalKey::Clear,
            "sqrt" => LogicalKey::Sqrt,
            "recip" | "1/x" => LogicalKey::Reciprocal,
            "negate" | "+/-" => LogicalKey::Negate,
            _ => return Err(UnknownKey(s.to_owned())),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CalcOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl CalcOp {
    pub fn apply(self, a: f64, b: f64) -> f64 {
        match self {
            CalcOp::Add => a + b,
            CalcOp::Sub => a - b,
            CalcOp::Mul => a * b,
            CalcOp::Div => a / b,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EntryMode {
    /// Digits are being appended to the display.
    Typing,
    /// The display holds the result of an operator or `=`; the next digit
    /// starts a new number and a further operator only replaces the pending
    /// one.
    Result,
    /// The display holds a value produced by a unary function. It counts as
    /// an entered operand, but the next digit starts a new number.
    Computed,
}

pub const ERROR_DISPLAY: &str = "Error";
const MAX_DIGITS: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalcState {
    pub display: String,
    pub accumulator: f64,
    pub pending: Option<CalcOp>,
    pub entry: EntryMode,
}

impl Default for CalcState {
    fn default() -> Self {
        Self {
            display: "0".into(),
            accumulator: 0.0,
            pending: None,
            entry: EntryMode::Result,
        }
    }
}

impl CalcState {
    pub fn is_error(&self) -> bool {
        self.display == ERROR_DISPLAY
    }

    pub fn value(&self) -> f64 {
        self.display.parse().unwrap_or(f64::NAN)
    }

    fn show(&mut self, v: f64) {
        if v.is_finite() {
            self.display = format_number(v);
        } else {
            self.display = ERROR_DISPLAY.into();
            self.pending = None;
            self.accumulator = 0.0;
        }
    }
}

/// Display text for a computed value: integers without a fraction, plain
/// decimals in the usual range, exponent notation outside it.
pub fn format_number(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if (1e-9..1e16).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

/// Immediate-execution calculator step.
pub fn calc_press(state: &CalcState, key: LogicalKey) -> CalcState {
    let mut s = state.clone();
    if s.is_error() && key != LogicalKey::Clear {
        return s;
    }
    match key {
        LogicalKey::Digit(d) => {
            let digit = char::from(b'0' + d);
            if s.entry == EntryMode::Typing {
                let digits = s.display.chars().filter(char::is_ascii_digit).count();
                if s.display == "0" {
                    s.display = digit.to_string();
                } else if s.display == "-0" {
                    s.display = format!("-{digit}");
                } else if digits < MAX_DIGITS {
                    s.display.push(digit);
                }
            } else {
                s.display = digit.to_string();
                s.entry = EntryMode::Typing;
            }
        }
        LogicalKey::Point => {
            if s.entry == EntryMode::Typing {
                if !s.display.contains('.') {
                    s.display.push('.');
                }
            } else {
                s.display = "0.".into();
                s.entry = EntryMode::Typing;
            }
        }
        LogicalKey::Add | LogicalKey::Sub | LogicalKey::Mul | LogicalKey::Div => {
            let op = match key {
                LogicalKey::Add => CalcOp::Add,
                LogicalKey::Sub => CalcOp::Sub,
                LogicalKey::Mul => CalcOp::Mul,
                _ => CalcOp::Div,
            };
            let v = s.value();
            match s.pending {
                Some(p) if s.entry != EntryMode::Result => {
                    let r = p.apply(s.accumulator, v);
                    s.accumulator = r;
                    s.show(r);
                }
                Some(_) => {}
                None => {
                    s.accumulator = v;
                    s.show(v);
                }
            }
            if !s.is_error() {
                s.pending = Some(op);
            }
            s.entry = EntryMode::Result;
        }
        LogicalKey::Equals => {
            if let Some(p) = s.pending.take() {
                let r = p.apply(s.accumulator, s.value());
                s.accumulator = r;
                s.show(r);
            }
            s.entry = EntryMode::Result;
        }
        LogicalKey::Clear => s = CalcState::default(),
        LogicalKey::Negate if s.entry == EntryMode::Typing => {
            if let Some(rest) = s.display.strip_prefix('-') {
                s.display = rest.to_owned();
            } else {
                s.display.insert(0, '-');
            }
        }
        LogicalKey::Sqrt | LogicalKey::Reciprocal | LogicalKey::Negate => {
            let v = s.value();
            let r = match key {
                LogicalKey::Sqrt => v.sqrt(),
                LogicalKey::Reciprocal => 1.0 / v,
                _ => -v,
            };
            s.show(r);
            if !s.is_error() {
                s.entry = EntryMode::Computed;
            }
        }
    }
    s
}

pub fn calc_press_all(keys: &[LogicalKey]) -> CalcState {
    keys.iter().fold(CalcState::default(), |s, &k| calc_press(&s, k))
}

fn params(l: f64, t: f64, w: f64, h: f64, color: Rgba) -> VisibilityParams {
    VisibilityParams::new(RectBounds::new(l, t, w, h), color, Font::default())
}

pub const BUTTON_W: f64 = 48.0;
pub const BUTTON_H: f64 = 36.0;
const BUTTON_GAP: f64 = 8.0;
const BUTTON_RANGE: SizeRange = SizeRange {
    min_w: 24.0,
    min_h: 18.0,
    max_w: 240.0,
    max_h: 160.0,
};

fn cell(col: f64, row: f64) -> (f64, f64) {
    (24.0 + col * (BUTTON_W + BUTTON_GAP), 84.0 + row * (BUTTON_H + 8.0))
}

/// Default Calculator: display, digit pad, operation column, function
/// column and a stand-alone clear key.
pub fn build_calculator() -> Scene {
    let mut scene = Scene::new();
    let display = SceneElement::control(
        "display",
        ControlRole::TextField,
        "",
        Some("display"),
        VisibilityParams::new(RectBounds::new(24.0, 24.0, 312.0, 40.0), Rgba::GRAY, Font::new("monospace", 20.0)),
        SizeRange::new(60.0, 24.0, 900.0, 160.0),
    );
    scene.add_element(display).expect("fresh scene");

    let numbers = Rgba::rgb(208, 224, 255);
    let operations = Rgba::rgb(255, 222, 190);
    let functions = Rgba::rgb(206, 240, 206);
    let mut place = |key: LogicalKey, (l, t): (f64, f64), color: Rgba, tag: Option<&str>| -> ElementId {
        let mut e = SceneElement::control(
            key.element_id().as_str(),
            ControlRole::Button,
            &key.caption(),
            Some(&key.name()),
            params(l, t, BUTTON_W, BUTTON_H, color),
            BUTTON_RANGE,
        );
        if let Some(tag) = tag {
            e = e.with_tag(tag);
        }
        scene.add_element(e).expect("unique key ids")
    };

    let pad = [(7, 0, 0), (8, 1, 0), (9, 2, 0), (4, 0, 1), (5, 1, 1), (6, 2, 1), (1, 0, 2), (2, 1, 2), (3, 2, 2), (0, 0, 3)];
    let mut number_ids: Vec<ElementId> = pad
        .iter()
        .map(|&(d, c, r)| place(LogicalKey::Digit(d), cell(f64::from(c), f64::from(r)), numbers, Some("numbers")))
        .collect();
    number_ids.push(place(LogicalKey::Point, cell(1.0, 3.0), numbers, Some("numbers")));

    let op_keys = [LogicalKey::Div, LogicalKey::Mul, LogicalKey::Sub, LogicalKey::Add, LogicalKey::Equals];
    let op_ids: Vec<ElementId> = op_keys
        .iter()
        .enumerate()
        .map(|(i, &k)| {
            let (_, t) = cell(0.0, i as f64);
            place(k, (208.0, t), operations, Some("operations"))
        })
        .collect();

    let fn_keys = [LogicalKey::Sqrt, LogicalKey::Reciprocal, LogicalKey::Negate];
    let fn_ids: Vec<ElementId> = fn_keys
        .iter()
        .enumerate()
        .map(|(i, &k)| {
            let (_, t) = cell(0.0, i as f64);
            place(k, (288.0, t), functions, Some("functions"))
        })
        .collect();
    place(LogicalKey::Clear, (288.0, cell(0.0, 4.0).1), Rgba::rgb(255, 200, 200), None);

    scene.create_group("numbers", "Numbers", &number_ids, DEFAULT_MARGIN).expect("valid group");
    scene.create_group("operations", "Operations", &op_ids, DEFAULT_MARGIN).expect("valid group");
    scene.create_group("functions", "Functions", &fn_ids, DEFAULT_MARGIN).expect("valid group");
    scene.snapshot_default();
    scene
}

/// A PersonalData field: key, comment drawn inside the field, position
/// and width.
struct Field {
    key: &'static str,
    comment: &'static str,
    at: (f64, f64),
    width: f64,
}

const FIELD_H: f64 = 24.0;
const FIELD_RANGE: SizeRange = SizeRange {
    min_w: 60.0,
    min_h: 18.0,
    max_w: 900.0,
    max_h: 400.0,
};

fn personal_groups() -> Vec<(&'static str, &'static str, Vec<Field>)> {
    let f = |key, comment, x, y, width| Field {
        key,
        comment,
        at: (x, y),
        width,
    };
    vec![
        (
            "name",
            "Name",
            vec![f("name.first", "First", 40.0, 60.0, 240.0), f("name.last", "Last", 40.0, 92.0, 240.0)],
        ),
        (
            "address",
            "Address",
            vec![
                f("address.street", "Street", 40.0, 150.0, 240.0),
                f("address.city", "City", 40.0, 182.0, 240.0),
                f("address.zip", "ZIP", 40.0, 214.0, 240.0),
                f("address.country", "Country", 40.0, 246.0, 240.0),
            ],
        ),
        (
            "phones",
            "Phones",
            vec![
                f("phones.home", "Home", 320.0, 60.0, 240.0),
                f("phones.mobile", "Mobile", 320.0, 92.0, 240.0),
                f("phones.work", "", 320.0, 124.0, 240.0),
            ],
        ),
        (
            "employment",
            "Employment",
            vec![
                f("employment.company", "Company", 320.0, 186.0, 240.0),
                f("employment.position", "Position", 320.0, 218.0, 240.0),
                f("employment.since", "Since", 320.0, 250.0, 240.0),
            ],
        ),
        ("notes", "Notes", vec![f("notes.text", "", 40.0, 310.0, 520.0)]),
    ]
}

/// Sample record shown by the PersonalData demo.
pub fn default_person() -> SideData {
    [
        ("name.first", "Ada"),
        ("name.last", "Lovelace"),
        ("address.street", "12 St James's Square"),
        ("address.city", "London"),
        ("address.zip", "SW1Y 4JH"),
        ("address.country", "United Kingdom"),
        ("phones.home", "+44 20 7946 0000"),
        ("phones.mobile", "+44 7700 900000"),
        ("phones.work", ""),
        ("employment.company", "Analytical Engines Ltd"),
        ("employment.position", "Programmer"),
        ("employment.since", "1842"),
        ("notes.text", "Prefers letters to calls"),
        ("email", "ada@example.org"),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_owned(), v.to_owned()))
    .collect()
}

fn field_element(f: &Field) -> SceneElement {
    SceneElement::control(
        f.key,
        ControlRole::TextField,
        f.comment,
        Some(f.key),
        params(f.at.0, f.at.1, f.width, FIELD_H, Rgba::rgb(70, 70, 90)),
        FIELD_RANGE,
    )
}

/// Default PersonalData view: one outer group holding five field groups,
/// a commented e-mail field and a record label.
pub fn build_personaldata() -> Scene {
    let mut scene = Scene::new();
    let mut outer = Vec::new();
    for (id, title, fields) in personal_groups() {
        let members: Vec<ElementId> = fields
            .iter()
            .map(|f| scene.add_element(field_element(f).with_tag(id)).expect("unique field keys"))
            .collect();
        outer.push(scene.create_group(id, title, &members, DEFAULT_MARGIN).expect("valid group"));
    }
    let email = Field {
        key: "email",
        comment: "E-mail",
        at: (40.0, 384.0),
        width: 240.0,
    };
    outer.push(scene.add_element(field_element(&email)).expect("unique field keys"));
    let label = SceneElement::graphic(
        "record-label",
        GraphicShape::Label { text: "Record 1 of 1".into() },
        params(320.0, 384.0, 160.0, FIELD_H, Rgba::rgb(60, 60, 60)),
        SizeRange::new(20.0, 12.0, 900.0, 200.0),
    );
    outer.push(scene.add_element(label).expect("unique id"));
    scene.create_group("personal", "Personal data", &outer, DEFAULT_MARGIN).expect("valid group");
    scene.snapshot_default();
    scene
}

pub const PLOT_SIZE: (f64, f64) = (320.0, 220.0);
pub const PLOT_RANGE: SizeRange = SizeRange {
    min_w: 120.0,
    min_h: 80.0,
    max_w: 2000.0,
    max_h: 1500.0,
};
const PLOT_ORIGIN: (f64, f64) = (208.0, 24.0);
const PLOT_CASCADE: f64 = 24.0;
const CURVE_COLORS: [Rgba; 4] = [
    Rgba::rgb(200, 40, 40),
    Rgba::rgb(30, 100, 200),
    Rgba::rgb(20, 140, 60),
    Rgba::rgb(150, 60, 170),
];

pub fn default_world() -> WorldRange {
    WorldRange::new(-2.0 * PI, 2.0 * PI, -1.5, 1.5).expect("finite ordered range")
}

/// Default Functions analyser: a list of sample functions and a plot of
/// sin(x).
pub fn build_functions_analyser() -> Scene {
    let mut scene = Scene::new();
    let mut list = SceneElement::control(
        "function-list",
        ControlRole::List,
        "Functions",
        None,
        params(24.0, 24.0, 160.0, 140.0, Rgba::GRAY),
        SizeRange::new(80.0, 40.0, 600.0, 800.0),
    );
    if let crate::scene::ElementKind::Control(c) = &mut list.kind {
        c.items = ["sin(x)", "cos(x)", "exp(x)", "x^2 - 1", "1/x"].map(String::from).to_vec();
    }
    scene.add_element(list).expect("fresh scene");
    add_plot(&mut scene, "sin(x)", default_world()).expect("valid default plot");
    scene.snapshot_default();
    scene
}

/// Adds a plot of `expr` on top of everything else, cascaded from the
/// previous plots.
pub fn add_plot(scene: &mut Scene, expr: &str, world: WorldRange) -> Result<ElementId, ExprError> {
    let existing = scene.elements().filter(|e| e.plot().is_some()).count();
    let curve = Curve::new(expr, CURVE_COLORS[existing % CURVE_COLORS.len()])?;
    let mut plot = PlotArea::new(world);
    plot.comment = format!("y = {expr}");
    plot.curves.push(curve);
    let id = scene.fresh_id("plot");
    let offset = PLOT_CASCADE * (existing % 8) as f64;
    let element = SceneElement::graphic(
        id.as_str(),
        GraphicShape::PlotArea(plot),
        params(PLOT_ORIGIN.0 + offset, PLOT_ORIGIN.1 + offset, PLOT_SIZE.0, PLOT_SIZE.1, Rgba::rgb(40, 40, 40)),
        PLOT_RANGE,
    );
    Ok(scene.add_element(element).expect("fresh id"))
}

pub fn remove_plot(scene: &mut Scene, id: &str) -> Result<(), SceneError> {
    match scene.element(id) {
        None => Err(SceneError::UnknownId(id.into())),
        Some(e) if e.plot().is_none() => Err(SceneError::InvalidParams {
            id: id.into(),
            reason: "not a plot".into(),
        }),
        Some(_) => scene.remove_element(id),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DemoKind {
    Calculator,
    PersonalData,
    Functions,
}

impl DemoKind {
    pub const ALL: [DemoKind; 3] = [DemoKind::Calculator, DemoKind::PersonalData, DemoKind::Functions];

    pub fn name(self) -> &'static str {
        match self {
            DemoKind::Calculator => "calculator",
            DemoKind::PersonalData => "personaldata",
            DemoKind::Functions => "functions",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }

    pub fn build_scene(self) -> Scene {
        match self {
            DemoKind::Calculator => build_calculator(),
            DemoKind::PersonalData => build_personaldata(),
            DemoKind::Functions => build_functions_analyser(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DemoData {
    Calculator(CalcState),
    PersonalData(SideData),
    Functions,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DemoError {
    #[error("`{0}` is not available in this demo")]
    NotApplicable(&'static str),
    #[error("unknown field `{0}`")]
    UnknownField(String),
}

/// A demo scene together with its mover and application data.
#[derive(Debug, Clone, PartialEq)]
pub struct DemoApp {
    pub kind: DemoKind,
    pub scene: Scene,
    pub mover: Mover,
    pub data: DemoData,
}

impl DemoApp {
    pub fn new(kind: DemoKind) -> Self {
        let scene = kind.build_scene();
        let mut mover = Mover::new();
        mover.register_all(&scene);
        let data = match kind {
            DemoKind::Calculator => DemoData::Calculator(CalcState::default()),
            DemoKind::PersonalData => DemoData::PersonalData(default_person()),
            DemoKind::Functions => DemoData::Functions,
        };
        Self { kind, scene, mover, data }
    }

    /// Values shown in text fields, keyed by field key.
    pub fn values(&self) -> SideData {
        match &self.data {
            DemoData::Calculator(s) => [("display".to_owned(), s.display.clone())].into(),
            DemoData::PersonalData(record) => record.clone(),
            DemoData::Functions => SideData::new(),
        }
    }

    /// Data persisted with the layout.
    pub fn side_data(&self) -> SideData {
        match &self.data {
            DemoData::PersonalData(record) => record.clone(),
            _ => SideData::new(),
        }
    }

    /// Takes field values from a loaded layout; keys the record does not
    /// know are ignored.
    pub fn apply_side_data(&mut self, data: &SideData) {
        if let DemoData::PersonalData(record) = &mut self.data {
            for (k, v) in data {
                if let Some(slot) = record.get_mut(k) {
                    slot.clone_from(v);
                }
            }
        }
    }

    /// Application state folded into the scene hash.
    pub fn state_json(&self) -> serde_json::Value {
        match &self.data {
            DemoData::Calculator(s) => serde_json::to_value(s).expect("plain data"),
            DemoData::PersonalData(record) => serde_json::to_value(record).expect("plain data"),
            DemoData::Functions => serde_json::Value::Null,
        }
    }

    pub fn calc(&self) -> Option<&CalcState> {
        match &self.data {
            DemoData::Calculator(s) => Some(s),
            _ => None,
        }
    }

    pub fn press_key(&mut self, key: LogicalKey) -> Result<(), DemoError> {
        match &mut self.data {
            DemoData::Calculator(s) => {
                *s = calc_press(s, key);
                Ok(())
            }
            _ => Err(DemoError::NotApplicable("press-key")),
        }
    }

    pub fn set_field(&mut self, key: &str, value: &str) -> Result<(), DemoError> {
        match &mut self.data {
            DemoData::PersonalData(record) => match record.get_mut(key) {
                Some(slot) => {
                    *slot = value.to_owned();
                    Ok(())
                }
                None => Err(DemoError::UnknownField(key.to_owned())),
            },
            _ => Err(DemoError::NotApplicable("set-field")),
        }
    }

    /// Reacts to a click on a control. Calculator buttons press their key;
    /// other controls have no click behavior here.
    pub fn activate(&mut self, id: &str) {
        let key = self
            .scene
            .element(id)
            .and_then(|e| e.control_proxy())
            .filter(|c| c.role == ControlRole::Button)
            .and_then(|c| c.key.as_deref())
            .and_then(|k| k.parse::<LogicalKey>().ok());
        if let Some(key) = key {
            let _ = self.press_key(key);
        }
    }

    pub fn display_list(&self) -> DisplayList {
        self.scene.build_display_list_with_values(&self.values())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn keys(script: &str) -> Vec<LogicalKey> {
        script.split_whitespace().map(|k| k.parse().unwrap()).collect()
    }

    fn display(script: &str) -> String {
        calc_press_all(&keys(script)).display
    }

    #[test]
    fn calculator_examples() {
        assert_eq!(display("2 + 3 ="), "5");
        assert_eq!(display("2 + 3 + 4 ="), "9");
        assert_eq!(display("9 sqrt"), "3");
        assert_eq!(display("2 + 9 sqrt ="), "5");
        assert_eq!(display("1 . 5 * 4 ="), "6");
        assert_eq!(display("1 0 / 4 ="), "2.5");
        assert_eq!(display("4 recip"), "0.25");
        assert_eq!(display("5 negate"), "-5");
        assert_eq!(display("5 + negate"), "-5");
        assert_eq!(display("7 - 9 ="), "-2");
        assert_eq!(display("2 + * 3 ="), "6");
        assert_eq!(display(". 5"), "0.5");
    }

    #[test]
    fn errors_latch_until_clear() {
        assert_eq!(display("1 / 0 ="), ERROR_DISPLAY);
        assert_eq!(display("0 recip"), ERROR_DISPLAY);
        assert_eq!(display("4 negate sqrt"), ERROR_DISPLAY);
        assert_eq!(display("4 negate sqrt 5 + 1 ="), ERROR_DISPLAY);
        assert_eq!(display("1 / 0 = C 2 + 2 ="), "4");
    }

    #[test]
    fn number_formatting() {
        assert_eq!(format_number(5.0), "5");
        assert_eq!(format_number(-0.0), "0");
        assert_eq!(format_number(0.1 + 0.2), "0.30000000000000004");
        assert_eq!(format_number(1e20), "1e20");
        assert_eq!(format_number(1.5e-12), "1.5e-12");
        for v in [5.0, 0.1 + 0.2, 1e20, -1.5e-12, 123456.789] {
            assert_eq!(format_number(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn key_names_round_trip() {
        for k in LogicalKey::all() {
            assert_eq!(k.name().parse::<LogicalKey>().unwrap(), k);
            assert_eq!(k.caption().parse::<LogicalKey>().unwrap(), k);
        }
        assert!("%".parse::<LogicalKey>().is_err());
    }

    fn op_strategy() -> impl Strategy<Value = LogicalKey> {
        prop_oneof![Just(LogicalKey::Add), Just(LogicalKey::Sub), Just(LogicalKey::Mul), Just(LogicalKey::Div)]
    }

    proptest! {
        /// Chains `n0 op1 n1 ... =` agree with a left fold of the same
        /// operations.
        #[test]
        fn immediate_execution_is_a_left_fold(
            first in 0u32..1000,
            rest in prop::collection::vec((op_strategy(), 1u32..1000), 0..8),
        ) {
            let mut script = Vec::new();
            let push_number = |script: &mut Vec<LogicalKey>, n: u32| {
                for c in n.to_string().bytes() {
                    script.push(LogicalKey::Digit(c - b'0'));
                }
            };
            push_number(&mut script, first);
            let mut expected = f64::from(first);
            for &(op, n) in &rest {
                script.push(op);
                push_number(&mut script, n);
                let b = f64::from(n);
                expected = match op {
                    LogicalKey::Add => expected + b,
                    LogicalKey::Sub => expected - b,
                    LogicalKey::Mul => expected * b,
                    _ => expected / b,
                };
            }
            script.push(LogicalKey::Equals);
            let state = calc_press_all(&script);
            let shown: f64 = state.display.parse().unwrap();
            prop_assert_eq!(shown, expected);
        }

        #[test]
        fn display_always_parses(script in prop::collection::vec(prop::sample::select(LogicalKey::all()), 0..40)) {
            let state = calc_press_all(&script);
            prop_assert!(state.is_error() || state.display.parse::<f64>().is_ok(), "{}", state.display);
        }
    }

    #[test]
    fn calculator_layout() {
        let scene = build_calculator();
        scene.check_invariants().unwrap();
        let members = |g: &str| -> Vec<String> {
            let mut m: Vec<String> = scene.group(g).unwrap().members.iter().map(|m| m.to_string()).collect();
            m.sort();
            m
        };
        let mut numbers: Vec<String> = (0..10).map(|d| format!("key-{d}")).collect();
        numbers.push("key-point".into());
        numbers.sort();
        assert_eq!(members("numbers"), numbers);
        let mut ops: Vec<String> = ["plus", "minus", "times", "divide", "equals"].iter().map(|k| format!("key-{k}")).collect();
        ops.sort();
        assert_eq!(members("operations"), ops);
        let mut fns: Vec<String> = ["sqrt", "recip", "negate"].iter().map(|k| format!("key-{k}")).collect();
        fns.sort();
        assert_eq!(members("functions"), fns);
        for k in LogicalKey::all() {
            let e = scene.element(k.element_id().as_str()).unwrap();
            assert!(e.movable);
            assert_eq!(e.control_proxy().unwrap().key.as_deref(), Some(k.name().as_str()));
        }
        assert_eq!(scene.default_snapshot(), Some(scene.state()));
        let frames: Vec<RectBounds> = ["numbers", "operations", "functions"].iter().map(|g| scene.frame(g).unwrap()).collect();
        for (i, a) in frames.iter().enumerate() {
            for b in &frames[i + 1..] {
                assert!(a.right() < b.left || b.right() < a.left || a.bottom() < b.top || b.bottom() < a.top);
            }
        }
    }

    #[test]
    fn personaldata_layout() {
        let scene = build_personaldata();
        scene.check_invariants().unwrap();
        let outer = scene.group("personal").unwrap();
        let inner: Vec<&str> = outer.members.iter().filter(|m| scene.group(m.as_str()).is_some()).map(|m| m.as_str()).collect();
        assert_eq!(inner, ["name", "address", "phones", "employment", "notes"]);
        assert_eq!(scene.group("address").unwrap().members.len(), 4);
        let record = default_person();
        for e in scene.elements() {
            if let Some(key) = e.control_proxy().and_then(|c| c.key.as_ref()) {
                assert!(record.contains_key(key), "{key}");
            }
        }
    }

    #[test]
    fn functions_plots() {
        let mut scene = build_functions_analyser();
        let first = scene.z_order().last().unwrap().clone();
        assert!(scene.element(first.as_str()).unwrap().plot().is_some());
        let second = add_plot(&mut scene, "exp(x)", default_world()).unwrap();
        assert_eq!(scene.z_order().last(), Some(&second));
        assert_ne!(scene.element(first.as_str()).unwrap().bounds(), scene.element(second.as_str()).unwrap().bounds());
        assert!(matches!(
            add_plot(&mut scene, "2x", default_world()),
            Err(ExprError::Parse { position: 1, .. })
        ));
        remove_plot(&mut scene, first.as_str()).unwrap();
        remove_plot(&mut scene, second.as_str()).unwrap();
        assert!(scene.elements().all(|e| e.plot().is_none()));
        assert_eq!(remove_plot(&mut scene, "plot-9"), Err(SceneError::UnknownId("plot-9".into())));
        assert!(remove_plot(&mut scene, "function-list").is_err());
        scene.check_invariants().unwrap();
    }

    #[test]
    fn app_data_channels() {
        let mut app = DemoApp::new(DemoKind::Calculator);
        for k in keys("4 2") {
            app.press_key(k).unwrap();
        }
        app.activate("key-sqrt");
        assert_eq!(app.calc().unwrap().display, format_number(42f64.sqrt()));
        assert_eq!(app.set_field("x", "y"), Err(DemoError::NotApplicable("set-field")));

        let mut app = DemoApp::new(DemoKind::PersonalData);
        app.set_field("address.zip", "10115").unwrap();
        assert_eq!(app.values()["address.zip"], "10115");
        assert_eq!(app.set_field("bogus", "y"), Err(DemoError::UnknownField("bogus".into())));
        assert!(app.press_key(LogicalKey::Clear).is_err());
        for id in DemoKind::ALL {
            let app = DemoApp::new(id);
            assert_eq!(app.mover.registered().count(), app.scene.len());
        }
    }
}
