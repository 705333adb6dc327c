//! Parametric object detection on simulated LiDAR scans.

// `!(x > 0.0)` is deliberate throughout: it rejects NaN too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod eval;
pub mod geometry;
pub mod lidar;
pub mod matching;
pub mod mesh;
pub mod pipeline;
pub mod sampling;
pub mod scene;
pub mod stub;
