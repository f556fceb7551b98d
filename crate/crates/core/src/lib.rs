//! Desk-scale framework for operating a smartphone purely by sight and
//! touch: a deterministic device simulator, pixel/workspace calibration and
//! trajectory planning for a single-contact 3-axis arm, visual grounding
//! with set-of-mark prompting, a pluggable-policy agent loop, a benchmark
//! harness with SR/CR/SE metrics, and an annotated episode dataset format.

pub mod action;
pub mod agent;
pub mod arm;
pub mod bench;
pub mod blob;
pub mod cli;
pub mod dataset;
pub mod geom;
pub mod keys;
pub mod perception;
pub mod sim;
pub mod synthetic;
