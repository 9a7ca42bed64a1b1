//! Direct manipulation of scene elements: covers, a mover state machine,
//! elastic groups, layout persistence and three demonstration programs.

pub mod covers;
pub mod demos;
pub mod display;
pub mod geometry;
pub mod groups;
pub mod harness;
pub mod interpreter;
pub mod mover;
pub mod persistence;
pub mod plotting;
pub mod scene;
pub mod svg;
