//! Videoconference layout parsing and generation.
//!
//! The parser runs the screenshot pipeline: background mask, connected
//! components, 16:9 aspect filter, centroid per surviving cell, name decode
//! from the cell's name region. The generator produces screenshots with
//! known ground truth for tests and simulations.

use crate::geometry::{auto_tau, px_to_cm, CalibrationProfile, GazePointCm, GeometryError};
use crate::imaging::{
    connected_components, draw_text, font, foreground_mask, read_text, Frame, ImagingError, Rect,
    Rgb,
};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LayoutError {
    #[error("no video cells found in screenshot")]
    NoCellsFound,
    #[error("frame is {frame_w}x{frame_h} but calibration says {cal_w}x{cal_h}")]
    CalibrationMismatch { frame_w: u32, frame_h: u32, cal_w: u32, cal_h: u32 },
    #[error("cells would fall below {min_w} px width")]
    TooManyParticipants { min_w: u32 },
    #[error("expected {expected} labels, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("bad layout spec: {0}")]
    BadSpec(String),
    #[error("bad layout record: {0}")]
    BadRecord(String),
    #[error(transparent)]
    Imaging(#[from] ImagingError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub const DEFAULT_BACKGROUND: Rgb = [13, 13, 13];
pub const CELL_FILL: Rgb = [45, 45, 45];
pub const NAME_COLOR: Rgb = [235, 235, 235];
/// Background gap reserved around cells inside their grid slot, in pixels.
pub const GUTTER: u32 = 4;
const MIN_CELL_W: u32 = 32;
const TARGET_ASPECT: f64 = 16.0 / 9.0;

/// One participant video cell with its screen-plane centroid.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetCell {
    /// 1-based index in row-major centroid order.
    pub index: usize,
    pub centroid_cm: GazePointCm,
    pub bbox_px: Rect,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayoutMap {
    pub cells: Vec<TargetCell>,
    pub tau_cm: f64,
    pub calibration: CalibrationProfile,
}

impl LayoutMap {
    pub fn centroids(&self) -> Vec<GazePointCm> {
        self.cells.iter().map(|c| c.centroid_cm).collect()
    }

    /// Line-based export: `index, cx_cm, cy_cm, left, top, w, h, name`.
    pub fn to_records(&self) -> String {
        let mut out = String::new();
        for c in &self.cells {
            out.push_str(&format!(
                "{}, {}, {}, {}, {}, {}, {}, {}\n",
                c.index,
                c.centroid_cm.x,
                c.centroid_cm.y,
                c.bbox_px.left,
                c.bbox_px.top,
                c.bbox_px.width,
                c.bbox_px.height,
                c.name
            ));
        }
        out
    }

    pub fn from_records(text: &str, cal: CalibrationProfile) -> Result<Self, LayoutError> {
        let mut cells = Vec::new();
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            let fields: Vec<&str> = line.splitn(8, ',').map(|f| f.trim()).collect();
            if fields.len() != 8 {
                return Err(LayoutError::BadRecord(format!("want 8 fields: {line}")));
            }
            let parse = |s: &str| -> Result<f64, LayoutError> {
                s.parse().map_err(|_| LayoutError::BadRecord(format!("bad number {s}")))
            };
            cells.push(TargetCell {
                index: parse(fields[0])? as usize,
                centroid_cm: GazePointCm::new(parse(fields[1])?, parse(fields[2])?),
                bbox_px: Rect::new(
                    parse(fields[3])? as u32,
                    parse(fields[4])? as u32,
                    parse(fields[5])? as u32,
                    parse(fields[6])? as u32,
                ),
                name: fields[7].to_string(),
            });
        }
        if cells.is_empty() {
            return Err(LayoutError::NoCellsFound);
        }
        let boxes: Vec<Rect> = cells.iter().map(|c| c.bbox_px).collect();
        let tau_cm = auto_tau(&boxes, &cal)?;
        Ok(LayoutMap { cells, tau_cm, calibration: cal })
    }

    pub fn load_records(path: &Path, cal: CalibrationProfile) -> Result<Self, LayoutError> {
        Self::from_records(&std::fs::read_to_string(path)?, cal)
    }
}

/// Fractional name-region rectangle relative to a cell bbox.
/// Default: bottom-left strip, 50% of the width, bottom 10% of the height.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NameRegion {
    pub x_frac: f64,
    pub y_frac: f64,
    pub w_frac: f64,
    pub h_frac: f64,
}

impl Default for NameRegion {
    fn default() -> Self {
        NameRegion { x_frac: 0.0, y_frac: 0.9, w_frac: 0.5, h_frac: 0.1 }
    }
}

impl NameRegion {
    pub fn region_for(&self, cell: Rect) -> Rect {
        let left = cell.left + (self.x_frac * cell.width as f64) as u32;
        let top = cell.top + (self.y_frac * cell.height as f64) as u32;
        let width = (self.w_frac * cell.width as f64) as u32;
        let height = (self.h_frac * cell.height as f64) as u32;
        Rect::new(left, top, width, height)
    }

    /// Text scale for a region: the largest integer scale whose glyphs fit
    /// the region height, at least 1.
    pub fn text_scale(&self, cell: Rect) -> u32 {
        (self.region_for(cell).height / font::GLYPH_H).max(1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayoutStyle {
    FullscreenGrid,
    HorizontalStrip,
}

impl LayoutStyle {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "grid" | "fullscreen" => Some(LayoutStyle::FullscreenGrid),
            "strip" | "horizontal" => Some(LayoutStyle::HorizontalStrip),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LayoutSpec {
    pub n_participants: usize,
    pub style: LayoutStyle,
    pub names: Vec<String>,
    pub background_color: Rgb,
    pub calibration: CalibrationProfile,
    pub name_region: NameRegion,
}

impl LayoutSpec {
    pub fn new(n: usize, style: LayoutStyle, names: Vec<String>, cal: CalibrationProfile) -> Self {
        LayoutSpec {
            n_participants: n,
            style,
            names,
            background_color: DEFAULT_BACKGROUND,
            calibration: cal,
            name_region: NameRegion::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ParseOptions {
    pub background_color: Rgb,
    pub tolerance: u8,
    /// Relative tolerance on (w/h)/(16/9) around 1.
    pub ar_tolerance: f64,
    pub name_region: NameRegion,
    pub name_color: Rgb,
    /// Ordered per-cell labels overriding decoded names, e.g. from a
    /// sidecar file or a videoconference API.
    pub labels: Option<Vec<String>>,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions {
            background_color: DEFAULT_BACKGROUND,
            tolerance: 8,
            ar_tolerance: 0.10,
            name_region: NameRegion::default(),
            name_color: NAME_COLOR,
            labels: None,
        }
    }
}

/// Grid geometry shared by the generator: cells per row, top-left slots.
fn grid_shape(n: usize, style: LayoutStyle) -> (usize, usize) {
    match style {
        LayoutStyle::FullscreenGrid => {
            let cols = (n as f64).sqrt().ceil() as usize;
            let rows = n.div_ceil(cols);
            (cols, rows)
        }
        LayoutStyle::HorizontalStrip => (n, 1),
    }
}

/// Render a synthetic videoconference screenshot plus its ground truth.
pub fn generate_screenshot(spec: &LayoutSpec) -> Result<(Frame, LayoutMap), LayoutError> {
    let n = spec.n_participants;
    let min_n = match spec.style {
        LayoutStyle::FullscreenGrid => 2,
        LayoutStyle::HorizontalStrip => 3,
    };
    if n < min_n {
        return Err(LayoutError::BadSpec(format!("need at least {min_n} participants, got {n}")));
    }
    if spec.names.len() != n {
        return Err(LayoutError::LengthMismatch { expected: n, got: spec.names.len() });
    }
    let cal = &spec.calibration;
    let (screen_w, screen_h) = (cal.screen_w_px, cal.screen_h_px);
    let (cols, rows) = grid_shape(n, spec.style);
    let slot_w = screen_w / cols as u32;
    let slot_h = match spec.style {
        LayoutStyle::FullscreenGrid => screen_h / rows as u32,
        LayoutStyle::HorizontalStrip => screen_h, // single row, pinned top
    };
    let mut cell_w = slot_w.saturating_sub(GUTTER);
    let mut cell_h = (cell_w as f64 * 9.0 / 16.0) as u32;
    if spec.style == LayoutStyle::FullscreenGrid && cell_h + GUTTER > slot_h {
        cell_h = slot_h - GUTTER;
        cell_w = (cell_h as f64 * 16.0 / 9.0) as u32;
    }
    if cell_w < MIN_CELL_W {
        return Err(LayoutError::TooManyParticipants { min_w: MIN_CELL_W });
    }

    let mut frame = Frame::new(screen_w, screen_h, spec.background_color);
    let mut cells = Vec::with_capacity(n);
    for (i, name) in spec.names.iter().enumerate() {
        let row = i / cols;
        let col = i % cols;
        let row_cells = (n - row * cols).min(cols);
        // center a partially filled last row
        let row_x0 = (screen_w - row_cells as u32 * slot_w) / 2;
        let left = row_x0 + col as u32 * slot_w + (slot_w - cell_w) / 2;
        let top = match spec.style {
            LayoutStyle::FullscreenGrid => {
                row as u32 * slot_h + (slot_h - cell_h) / 2
            }
            LayoutStyle::HorizontalStrip => GUTTER / 2,
        };
        let bbox = Rect::new(left, top, cell_w, cell_h);
        frame.fill_rect(bbox, CELL_FILL);

        let region = spec.name_region.region_for(bbox);
        let scale = spec.name_region.text_scale(bbox);
        let capacity = (region.width / (font::ADVANCE * scale)) as usize;
        let drawn: String = name.chars().take(capacity).collect();
        frame = draw_text(&frame, &drawn, (region.left as i64, region.top as i64), scale, NAME_COLOR)?;

        let (cx, cy) = bbox.center();
        cells.push(TargetCell {
            index: i + 1,
            centroid_cm: px_to_cm((cx, cy), cal),
            bbox_px: bbox,
            name: drawn,
        });
    }
    let boxes: Vec<Rect> = cells.iter().map(|c| c.bbox_px).collect();
    let tau_cm = auto_tau(&boxes, cal)?;
    Ok((frame, LayoutMap { cells, tau_cm, calibration: *cal }))
}

/// Parse a screenshot into a calibrated layout map.
pub fn parse_screenshot(
    frame: &Frame,
    cal: &CalibrationProfile,
    opts: &ParseOptions,
) -> Result<LayoutMap, LayoutError> {
    if frame.width() != cal.screen_w_px || frame.height() != cal.screen_h_px {
        return Err(LayoutError::CalibrationMismatch {
            frame_w: frame.width(),
            frame_h: frame.height(),
            cal_w: cal.screen_w_px,
            cal_h: cal.screen_h_px,
        });
    }
    let mask = foreground_mask(frame, opts.background_color, opts.tolerance);
    let comps = connected_components(&mask);
    let mut boxes: Vec<Rect> = comps
        .into_iter()
        .filter(|c| {
            let aspect = c.bbox.width as f64 / c.bbox.height.max(1) as f64;
            (aspect / TARGET_ASPECT - 1.0).abs() <= opts.ar_tolerance
        })
        .map(|c| c.bbox)
        .collect();
    if boxes.is_empty() {
        return Err(LayoutError::NoCellsFound);
    }
    // row-major ordering by bbox center, independent of label order
    boxes.sort_by(|a, b| {
        let (ax, ay) = a.center();
        let (bx, by) = b.center();
        ay.partial_cmp(&by).unwrap().then(ax.partial_cmp(&bx).unwrap())
    });

    let mut cells = Vec::with_capacity(boxes.len());
    for (i, bbox) in boxes.iter().enumerate() {
        let region = opts.name_region.region_for(*bbox);
        let scale = opts.name_region.text_scale(*bbox);
        let name = match read_text(frame, region, scale, opts.name_color) {
            Ok(s) if !s.is_empty() => s,
            // undecodable or blank name region: fall back to a stable label
            Ok(_) | Err(ImagingError::UnrecognizedGlyph { .. }) | Err(ImagingError::RegionOutOfBounds(_)) => {
                format!("cell-{}", i + 1)
            }
            Err(e) => return Err(e.into()),
        };
        let (cx, cy) = bbox.center();
        cells.push(TargetCell {
            index: i + 1,
            centroid_cm: px_to_cm((cx, cy), cal),
            bbox_px: *bbox,
            name,
        });
    }
    let mut map = LayoutMap {
        tau_cm: auto_tau(&boxes, cal)?,
        cells,
        calibration: *cal,
    };
    if let Some(labels) = &opts.labels {
        map = attach_labels(map, labels)?;
    }
    Ok(map)
}

/// Replace decoded names with externally provided labels, in index order.
pub fn attach_labels(mut map: LayoutMap, labels: &[String]) -> Result<LayoutMap, LayoutError> {
    if labels.len() != map.cells.len() {
        return Err(LayoutError::LengthMismatch { expected: map.cells.len(), got: labels.len() });
    }
    for (cell, label) in map.cells.iter_mut().zip(labels) {
        cell.name = label.clone();
    }
    Ok(map)
}

/// Label sidecar file: one name per line, order = cell index order.
pub fn load_labels(path: &Path) -> Result<Vec<String>, LayoutError> {
    Ok(std::fs::read_to_string(path)?
        .lines()
        .map(|l| l.trim().to_string())
        .filter(|l| !l.is_empty())
        .collect())
}
