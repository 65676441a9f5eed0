//! Single-camera gaze target estimation for videoconference layouts.
//!
//! The pipeline goes from a webcam frame to a named on-screen target:
//! a face detector produces a crop plus bounding-box features, a
//! convolutional regressor maps those to 2D screen-plane coordinates in
//! centimeters (camera at the origin), and a nearest-centroid rule with a
//! targetless threshold assigns the gaze point to a participant video
//! cell parsed from a screenshot of the call layout.
//!
//! Everything is CPU-only and deterministic given seeds. See the crate
//! examples for runnable entry points per capability, or the `gazectl`
//! binary for the same surface as subcommands.

pub mod cli;
pub mod dataset;
pub mod eval;
pub mod facedet;
pub mod geometry;
pub mod imaging;
pub mod layout;
pub mod nn;
pub mod runtime;
