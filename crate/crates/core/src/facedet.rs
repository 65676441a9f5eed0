//! Pluggable face detection front end: face boxes, the synthetic key-color
//! detector, offline sidecar detections, and the 227x227 crop with the
//! 4-value bounding-box feature vector.

use crate::imaging::{Frame, Rgb};
use std::collections::HashMap;
use std::path::Path;
use thiserror::Error;

/// Network input side length for face crops.
pub const FACE_SIZE: u32 = 227;

#[derive(Debug, Error)]
pub enum FacedetError {
    #[error("face box does not intersect the frame")]
    NoIntersection,
    #[error("malformed sidecar row {line}: {reason}")]
    MalformedRow { line: usize, reason: String },
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

/// Detected face bounding box in source-frame pixels. The box may overhang
/// frame edges; it must intersect the frame to be croppable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaceBox {
    pub x_b: f64,
    pub y_b: f64,
    pub w: f64,
    pub h: f64,
    pub confidence: f64,
}

/// How the 4 bounding-box values are fed to the network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BboxFeatureMode {
    /// Divided by frame dimensions, resolution independent.
    #[default]
    Normalized,
    /// Raw source-frame pixels.
    RawPixels,
}

#[derive(Debug, Clone)]
pub struct FaceCrop {
    /// Exactly 227x227 RGB.
    pub image: Frame,
    /// (x_b, y_b, w, h), normalized by frame dimensions unless raw mode.
    pub bbox_features: [f64; 4],
}

/// Face detector contract: zero or more boxes, sorted by confidence
/// descending. `frame_id` identifies the frame for offline detectors.
pub trait FaceDetector {
    fn detect(&self, frame_id: &str, frame: &Frame) -> Vec<FaceBox>;
}

/// Downstream policy: consume the highest-confidence box, first on ties.
pub fn select_primary(boxes: &[FaceBox]) -> Option<FaceBox> {
    boxes
        .iter()
        .copied()
        .reduce(|best, b| if b.confidence > best.confidence { b } else { best })
}

/// Detector for frames from the synthetic renderer: the head is drawn with
/// a reserved key-color ring, the box is the tight bbox of key pixels.
#[derive(Debug, Clone)]
pub struct SyntheticDetector {
    pub key_color: Rgb,
}

impl SyntheticDetector {
    pub fn new(key_color: Rgb) -> Self {
        SyntheticDetector { key_color }
    }
}

impl FaceDetector for SyntheticDetector {
    fn detect(&self, _frame_id: &str, frame: &Frame) -> Vec<FaceBox> {
        let mut min_x = u32::MAX;
        let mut min_y = u32::MAX;
        let mut max_x = 0u32;
        let mut max_y = 0u32;
        let mut found = false;
        for y in 0..frame.height() {
            for x in 0..frame.width() {
                if frame.get(x, y) == self.key_color {
                    found = true;
                    min_x = min_x.min(x);
                    min_y = min_y.min(y);
                    max_x = max_x.max(x);
                    max_y = max_y.max(y);
                }
            }
        }
        if !found {
            return Vec::new();
        }
        vec![FaceBox {
            x_b: min_x as f64,
            y_b: min_y as f64,
            w: (max_x - min_x + 1) as f64,
            h: (max_y - min_y + 1) as f64,
            confidence: 1.0,
        }]
    }
}

/// Offline detections loaded from a sidecar file with rows
/// `frame_id, x_b, y_b, w, h, confidence`. `#` starts a comment.
#[derive(Debug, Clone, Default)]
pub struct SidecarDetections {
    by_frame: HashMap<String, Vec<FaceBox>>,
}

impl SidecarDetections {
    pub fn parse(text: &str) -> Result<Self, FacedetError> {
        let mut by_frame: HashMap<String, Vec<FaceBox>> = HashMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(|f| f.trim()).collect();
            if fields.len() != 6 {
                return Err(FacedetError::MalformedRow {
                    line: i + 1,
                    reason: format!("want 6 fields, got {}", fields.len()),
                });
            }
            let num = |s: &str| {
                s.parse::<f64>().map_err(|_| FacedetError::MalformedRow {
                    line: i + 1,
                    reason: format!("bad number {s}"),
                })
            };
            by_frame.entry(fields[0].to_string()).or_default().push(FaceBox {
                x_b: num(fields[1])?,
                y_b: num(fields[2])?,
                w: num(fields[3])?,
                h: num(fields[4])?,
                confidence: num(fields[5])?,
            });
        }
        for boxes in by_frame.values_mut() {
            boxes.sort_by(|a, b| b.confidence.partial_cmp(&a.confidence).unwrap());
        }
        Ok(SidecarDetections { by_frame })
    }

    pub fn load(path: &Path) -> Result<Self, FacedetError> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn contains(&self, frame_id: &str) -> bool {
        self.by_frame.contains_key(frame_id)
    }
}

impl FaceDetector for SidecarDetections {
    fn detect(&self, frame_id: &str, _frame: &Frame) -> Vec<FaceBox> {
        self.by_frame.get(frame_id).cloned().unwrap_or_default()
    }
}

/// Crop the face region (clamped to the frame), bilinearly resize it to
/// 227x227, and compute bbox features from the unclamped box.
pub fn crop_face(frame: &Frame, bbox: &FaceBox) -> Result<FaceCrop, FacedetError> {
    crop_face_mode(frame, bbox, BboxFeatureMode::Normalized)
}

pub fn crop_face_mode(
    frame: &Frame,
    bbox: &FaceBox,
    mode: BboxFeatureMode,
) -> Result<FaceCrop, FacedetError> {
    let x0 = bbox.x_b.max(0.0).round() as i64;
    let y0 = bbox.y_b.max(0.0).round() as i64;
    let x1 = ((bbox.x_b + bbox.w).round() as i64).min(frame.width() as i64);
    let y1 = ((bbox.y_b + bbox.h).round() as i64).min(frame.height() as i64);
    if x0 >= x1 || y0 >= y1 || x0 >= frame.width() as i64 || y0 >= frame.height() as i64 {
        return Err(FacedetError::NoIntersection);
    }
    let (sx0, sy0) = (x0 as u32, y0 as u32);
    let (sw, sh) = ((x1 - x0) as u32, (y1 - y0) as u32);
    let image = resize_bilinear(frame, sx0, sy0, sw, sh, FACE_SIZE, FACE_SIZE);
    let bbox_features = match mode {
        BboxFeatureMode::Normalized => [
            bbox.x_b / frame.width() as f64,
            bbox.y_b / frame.height() as f64,
            bbox.w / frame.width() as f64,
            bbox.h / frame.height() as f64,
        ],
        BboxFeatureMode::RawPixels => [bbox.x_b, bbox.y_b, bbox.w, bbox.h],
    };
    Ok(FaceCrop { image, bbox_features })
}

fn resize_bilinear(src: &Frame, sx0: u32, sy0: u32, sw: u32, sh: u32, dw: u32, dh: u32) -> Frame {
    let mut out = vec![0u8; dw as usize * dh as usize * 3];
    let scale_x = sw as f64 / dw as f64;
    let scale_y = sh as f64 / dh as f64;
    for dy in 0..dh {
        let fy = ((dy as f64 + 0.5) * scale_y - 0.5).clamp(0.0, sh as f64 - 1.0);
        let y0 = fy.floor() as u32;
        let y1 = (y0 + 1).min(sh - 1);
        let wy = fy - y0 as f64;
        for dx in 0..dw {
            let fx = ((dx as f64 + 0.5) * scale_x - 0.5).clamp(0.0, sw as f64 - 1.0);
            let x0 = fx.floor() as u32;
            let x1 = (x0 + 1).min(sw - 1);
            let wx = fx - x0 as f64;
            let p00 = src.get(sx0 + x0, sy0 + y0);
            let p10 = src.get(sx0 + x1, sy0 + y0);
            let p01 = src.get(sx0 + x0, sy0 + y1);
            let p11 = src.get(sx0 + x1, sy0 + y1);
            let base = (dy as usize * dw as usize + dx as usize) * 3;
            for c in 0..3 {
                let top = p00[c] as f64 * (1.0 - wx) + p10[c] as f64 * wx;
                let bot = p01[c] as f64 * (1.0 - wx) + p11[c] as f64 * wx;
                out[base + c] = (top * (1.0 - wy) + bot * wy).round() as u8;
            }
        }
    }
    Frame::from_pixels(dw, dh, out)
}
