//! Layout documents: the `udapp-layout/1` JSON format.
//!
//! Output is canonical: object keys sorted, numbers in shortest round-trip
//! form, two-space indentation, one trailing newline. Equal scenes give
//! equal bytes.
//!
//! Loading is all-or-nothing. The document is decoded and checked in full
//! before the scene is touched.

use crate::groups::ElasticGroup;
use crate::scene::{ElementId, Scene, SceneElement, SceneState};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::{self, Write};
use std::path::Path;
use thiserror::Error;

pub const FORMAT: &str = "udapp-layout/1";

/// Application values saved next to the layout (field contents and such).
pub type SideData = BTreeMap<String, String>;

#[derive(Debug, Error)]
pub enum LayoutError {
    #[error("parse error at byte {position}: {reason}")]
    Parse { position: usize, reason: String },
    #[error("unsupported layout format `{found}`")]
    Version { found: String },
    #[error("group `{group}` references missing element `{member}`")]
    Referential { group: ElementId, member: ElementId },
    #[error("inconsistent layout: {0}")]
    Invalid(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct GroupRecord {
    id: ElementId,
    title: String,
    members: Vec<ElementId>,
    margin: f64,
    #[serde(default)]
    temporary: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct StateSection {
    elements: Vec<SceneElement>,
    z_order: Vec<ElementId>,
    groups: Vec<GroupRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct LayoutDocument {
    format: String,
    #[serde(flatten)]
    state: StateSection,
    default_snapshot: Option<StateSection>,
    #[serde(default)]
    data: SideData,
}

#[derive(Deserialize)]
struct Header {
    format: String,
}

fn section(state: &SceneState) -> StateSection {
    StateSection {
        elements: state.elements.values().cloned().collect(),
        z_order: state.z_order.clone(),
        groups: state
            .groups
            .values()
            .map(|g| GroupRecord {
                id: g.id.clone(),
                title: g.title.clone(),
                members: g.members.clone(),
                margin: g.margin,
                temporary: g.temporary,
            })
            .collect(),
    }
}

pub fn save_layout(scene: &Scene) -> Vec<u8> {
    save_layout_with_data(scene, &SideData::new())
}

pub fn save_layout_with_data(scene: &Scene, data: &SideData) -> Vec<u8> {
    let doc = LayoutDocument {
        format: FORMAT.to_owned(),
        state: section(&scene.state),
        default_snapshot: scene.default_snapshot.as_ref().map(section),
        data: data.clone(),
    };
    // Going through `Value` sorts every object's keys.
    let value = serde_json::to_value(&doc).expect("layout documents are plain data");
    let mut out = serde_json::to_vec_pretty(&value).expect("values always serialize");
    out.push(b'\n');
    out
}

/// Replaces the scene's state with the document's and returns its side
/// data. On error the scene is unchanged.
pub fn load_layout(bytes: &[u8], scene: &mut Scene) -> Result<SideData, LayoutError> {
    let header: Header = serde_json::from_slice(bytes).map_err(|e| parse_error(bytes, &e))?;
    if header.format != FORMAT {
        return Err(LayoutError::Version { found: header.format });
    }
    let doc: LayoutDocument = serde_json::from_slice(bytes).map_err(|e| parse_error(bytes, &e))?;
    let state = build_state(doc.state)?;
    let snapshot = doc.default_snapshot.map(build_state).transpose()?;
    scene.state = state;
    scene.default_snapshot = snapshot;
    Ok(doc.data)
}

fn parse_error(bytes: &[u8], e: &serde_json::Error) -> LayoutError {
    LayoutError::Parse {
        position: byte_offset(bytes, e.line(), e.column()),
        reason: e.to_string(),
    }
}

/// Converts serde_json's 1-based line and column into a byte offset.
fn byte_offset(bytes: &[u8], line: usize, column: usize) -> usize {
    let line_start: usize = bytes
        .split(|&b| b == b'\n')
        .take(line.saturating_sub(1))
        .map(|l| l.len() + 1)
        .sum();
    (line_start + column.saturating_sub(1)).min(bytes.len())
}

fn build_state(section: StateSection) -> Result<SceneState, LayoutError> {
    let mut elements = BTreeMap::new();
    for e in section.elements {
        e.params
            .validate()
            .map_err(|r| LayoutError::Invalid(format!("element `{}`: {r}", e.id)))?;
        if !e.size_range.is_valid() {
            return Err(LayoutError::Invalid(format!("element `{}` has an invalid size range", e.id)));
        }
        if e.plot().is_some_and(|p| !p.world.is_valid()) {
            return Err(LayoutError::Invalid(format!("plot `{}` has an invalid world range", e.id)));
        }
        if let Some(previous) = elements.insert(e.id.clone(), e) {
            return Err(LayoutError::Invalid(format!("duplicate element `{}`", previous.id)));
        }
    }

    let mut groups = BTreeMap::new();
    for g in section.groups {
        for m in &g.members {
            if !elements.contains_key(m) {
                return Err(LayoutError::Referential {
                    group: g.id.clone(),
                    member: m.clone(),
                });
            }
        }
        if !(g.margin.is_finite() && g.margin >= 0.0) {
            return Err(LayoutError::Invalid(format!("group `{}` has an invalid margin", g.id)));
        }
        let record = ElasticGroup {
            id: g.id.clone(),
            title: g.title,
            members: g.members,
            margin: g.margin,
            frame: None,
            temporary: g.temporary,
        };
        if groups.insert(g.id.clone(), record).is_some() {
            return Err(LayoutError::Invalid(format!("duplicate group `{}`", g.id)));
        }
    }

    let z: BTreeSet<&ElementId> = section.z_order.iter().collect();
    if z.len() != section.z_order.len() || z.len() != elements.len() || elements.keys().any(|k| !z.contains(k)) {
        return Err(LayoutError::Invalid("z-order is not a permutation of the elements".into()));
    }

    let mut scene = Scene::new();
    scene.state = SceneState {
        elements,
        z_order: section.z_order,
        groups,
    };
    // Frame derivation recurses through memberships, so the group structure
    // has to be sound before it runs.
    for (id, e) in &scene.state.elements {
        if e.is_group() != scene.state.groups.contains_key(id) {
            return Err(LayoutError::Invalid(format!("group element/record mismatch for `{id}`")));
        }
    }
    for g in scene.state.groups.values() {
        if g.members.iter().any(|m| scene.closure(m.as_str()).contains(&g.id)) {
            return Err(LayoutError::Invalid(format!("membership cycle through `{}`", g.id)));
        }
    }
    scene.refresh_frames();
    scene.check_invariants().map_err(LayoutError::Invalid)?;
    Ok(scene.state)
}

/// Writes `bytes` to a sibling temporary file and renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let name = path
        .file_name()
        .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "layout path has no file name"))?;
    let tmp = path.with_file_name(format!(".{}.{}.tmp", name.to_string_lossy(), std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}

pub fn save_layout_file(path: &Path, scene: &Scene, data: &SideData) -> Result<(), LayoutError> {
    write_atomic(path, &save_layout_with_data(scene, data))?;
    Ok(())
}

pub fn load_layout_file(path: &Path, scene: &mut Scene) -> Result<SideData, LayoutError> {
    let bytes = fs::read(path)?;
    load_layout(&bytes, scene)
}
