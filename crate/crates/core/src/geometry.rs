//! Camera-centric pixel/centimeter calibration and nearest-centroid gaze
//! target assignment with a targetless threshold.

use crate::imaging::Rect;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("layout has no cells")]
    EmptyLayout,
    #[error("bad calibration file: {0}")]
    BadCalibration(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

/// Pixel/centimeter map of one screen plus the camera's pixel position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationProfile {
    pub screen_w_px: u32,
    pub screen_h_px: u32,
    pub screen_w_cm: f64,
    pub screen_h_cm: f64,
    /// Projection of the camera onto the screen raster, in pixels.
    pub camera_px: (f64, f64),
}

impl CalibrationProfile {
    /// 1920x1080 screen of the reference physical size, camera at top-center.
    pub fn default_desktop() -> Self {
        CalibrationProfile {
            screen_w_px: 1920,
            screen_h_px: 1080,
            screen_w_cm: 69.84,
            screen_h_cm: 39.28,
            camera_px: (960.0, 0.0),
        }
    }

    pub fn cm_per_px_x(&self) -> f64 {
        self.screen_w_cm / self.screen_w_px as f64
    }

    pub fn cm_per_px_y(&self) -> f64 {
        self.screen_h_cm / self.screen_h_px as f64
    }

    /// Serialize as line-based `key = value` text.
    pub fn to_text(&self) -> String {
        format!(
            "screen_w_px = {}\nscreen_h_px = {}\nscreen_w_cm = {}\nscreen_h_cm = {}\ncamera_px_x = {}\ncamera_px_y = {}\n",
            self.screen_w_px,
            self.screen_h_px,
            self.screen_w_cm,
            self.screen_h_cm,
            self.camera_px.0,
            self.camera_px.1
        )
    }

    pub fn from_text(text: &str) -> Result<Self, GeometryError> {
        let mut cal = CalibrationProfile::default_desktop();
        let mut seen = 0;
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| GeometryError::BadCalibration(format!("not key = value: {line}")))?;
            let key = key.trim();
            let value = value.trim();
            let parse_f = || {
                value
                    .parse::<f64>()
                    .map_err(|_| GeometryError::BadCalibration(format!("bad number for {key}: {value}")))
            };
            match key {
                "screen_w_px" => cal.screen_w_px = parse_f()? as u32,
                "screen_h_px" => cal.screen_h_px = parse_f()? as u32,
                "screen_w_cm" => cal.screen_w_cm = parse_f()?,
                "screen_h_cm" => cal.screen_h_cm = parse_f()?,
                "camera_px_x" => cal.camera_px.0 = parse_f()?,
                "camera_px_y" => cal.camera_px.1 = parse_f()?,
                _ => return Err(GeometryError::BadCalibration(format!("unknown key {key}"))),
            }
            seen += 1;
        }
        if seen < 6 {
            return Err(GeometryError::BadCalibration("missing keys".into()));
        }
        if cal.screen_w_px == 0 || cal.screen_h_px == 0 || cal.screen_w_cm <= 0.0 || cal.screen_h_cm <= 0.0 {
            return Err(GeometryError::BadCalibration("non-positive dimension".into()));
        }
        Ok(cal)
    }

    pub fn load(path: &Path) -> Result<Self, GeometryError> {
        Self::from_text(&std::fs::read_to_string(path)?)
    }
}

/// 2D gaze coordinates in centimeters on the screen plane, camera at the
/// origin, x rightward and y downward.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GazePointCm {
    pub x: f64,
    pub y: f64,
}

impl GazePointCm {
    pub fn new(x: f64, y: f64) -> Self {
        GazePointCm { x, y }
    }

    pub fn distance_to(&self, other: GazePointCm) -> f64 {
        ((self.x - other.x).powi(2) + (self.y - other.y).powi(2)).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TargetKind {
    /// Index into the centroid list of the winning cell.
    Target(usize),
    Targetless,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssignmentResult {
    pub kind: TargetKind,
    /// Distance to the nearest centroid, +inf for an empty candidate list.
    pub distance_cm: f64,
}

pub fn px_to_cm(p: (f64, f64), cal: &CalibrationProfile) -> GazePointCm {
    GazePointCm {
        x: (p.0 - cal.camera_px.0) * cal.cm_per_px_x(),
        y: (p.1 - cal.camera_px.1) * cal.cm_per_px_y(),
    }
}

pub fn cm_to_px(g: GazePointCm, cal: &CalibrationProfile) -> (f64, f64) {
    (
        g.x / cal.cm_per_px_x() + cal.camera_px.0,
        g.y / cal.cm_per_px_y() + cal.camera_px.1,
    )
}

/// Nearest-centroid assignment: argmin over squared distances, targetless
/// when the winner lies farther than `tau`. Ties break to the lowest index.
pub fn assign_target(g: GazePointCm, centroids: &[GazePointCm], tau: f64) -> AssignmentResult {
    let mut best: Option<(usize, f64)> = None;
    for (i, c) in centroids.iter().enumerate() {
        let d2 = (g.x - c.x).powi(2) + (g.y - c.y).powi(2);
        if best.map_or(true, |(_, bd2)| d2 < bd2) {
            best = Some((i, d2));
        }
    }
    match best {
        None => AssignmentResult { kind: TargetKind::Targetless, distance_cm: f64::INFINITY },
        Some((i, d2)) => {
            let kind = if d2 <= tau * tau { TargetKind::Target(i) } else { TargetKind::Targetless };
            AssignmentResult { kind, distance_cm: d2.sqrt() }
        }
    }
}

/// Default targetless threshold: 1.25 times the half-diagonal in cm of the
/// largest cell bbox.
pub fn auto_tau(cells: &[Rect], cal: &CalibrationProfile) -> Result<f64, GeometryError> {
    if cells.is_empty() {
        return Err(GeometryError::EmptyLayout);
    }
    let mut tau: f64 = 0.0;
    for r in cells {
        let half_w = r.width as f64 * cal.cm_per_px_x() / 2.0;
        let half_h = r.height as f64 * cal.cm_per_px_y() / 2.0;
        tau = tau.max(1.25 * (half_w * half_w + half_h * half_h).sqrt());
    }
    Ok(tau)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cal() -> CalibrationProfile {
        CalibrationProfile::default_desktop()
    }

    #[test]
    fn camera_pixel_maps_to_origin() {
        let g = px_to_cm((960.0, 0.0), &cal());
        assert_eq!((g.x, g.y), (0.0, 0.0));
    }

    #[test]
    fn left_edge_in_cm() {
        let g = px_to_cm((0.0, 0.0), &cal());
        assert!((g.x - (-34.92)).abs() < 1e-9, "{}", g.x);
    }

    #[test]
    fn px_cm_round_trip() {
        let c = cal();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let p = (rng.gen_range(-100.0..2100.0), rng.gen_range(-100.0..1300.0));
            let q = cm_to_px(px_to_cm(p, &c), &c);
            assert!((p.0 - q.0).abs() < 1e-9 && (p.1 - q.1).abs() < 1e-9);
        }
    }

    #[test]
    fn single_centroid_within_threshold() {
        let r = assign_target(GazePointCm::new(3.0, 4.0), &[GazePointCm::new(0.0, 0.0)], 10.0);
        assert_eq!(r.kind, TargetKind::Target(0));
        assert!((r.distance_cm - 5.0).abs() < 1e-12);
    }

    #[test]
    fn nearest_of_two_wins() {
        let cs = [GazePointCm::new(0.0, 0.0), GazePointCm::new(10.0, 0.0)];
        let r = assign_target(GazePointCm::new(3.0, 4.0), &cs, 10.0);
        assert_eq!(r.kind, TargetKind::Target(0));
    }

    #[test]
    fn beyond_threshold_is_targetless() {
        let cs = [GazePointCm::new(0.0, 0.0), GazePointCm::new(10.0, 0.0)];
        let r = assign_target(GazePointCm::new(30.0, 30.0), &cs, 10.0);
        assert_eq!(r.kind, TargetKind::Targetless);
    }

    #[test]
    fn empty_centroids_targetless_with_inf() {
        let r = assign_target(GazePointCm::new(0.0, 0.0), &[], 10.0);
        assert_eq!(r.kind, TargetKind::Targetless);
        assert!(r.distance_cm.is_infinite());
    }

    #[test]
    fn ties_break_to_lowest_index() {
        let cs = [GazePointCm::new(-1.0, 0.0), GazePointCm::new(1.0, 0.0)];
        let r = assign_target(GazePointCm::new(0.0, 0.0), &cs, 10.0);
        assert_eq!(r.kind, TargetKind::Target(0));
    }

    /// Brute-force reference scan.
    fn assign_oracle(g: GazePointCm, cs: &[GazePointCm], tau: f64) -> AssignmentResult {
        if cs.is_empty() {
            return AssignmentResult { kind: TargetKind::Targetless, distance_cm: f64::INFINITY };
        }
        let d2s: Vec<f64> = cs.iter().map(|c| (g.x - c.x).powi(2) + (g.y - c.y).powi(2)).collect();
        let mut idx = 0;
        for (i, &d) in d2s.iter().enumerate() {
            if d < d2s[idx] {
                idx = i;
            }
        }
        let kind = if d2s[idx] <= tau * tau { TargetKind::Target(idx) } else { TargetKind::Targetless };
        AssignmentResult { kind, distance_cm: d2s[idx].sqrt() }
    }

    #[test]
    fn assignment_matches_brute_force_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..2000 {
            let n = rng.gen_range(0..=50);
            let cs: Vec<GazePointCm> = (0..n)
                .map(|_| GazePointCm::new(rng.gen_range(-35.0..35.0), rng.gen_range(0.0..40.0)))
                .collect();
            let g = GazePointCm::new(rng.gen_range(-40.0..40.0), rng.gen_range(-5.0..45.0));
            let tau = rng.gen_range(0.0..20.0);
            let got = assign_target(g, &cs, tau);
            let want = assign_oracle(g, &cs, tau);
            assert_eq!(got.kind, want.kind);
            assert!((got.distance_cm - want.distance_cm).abs() < 1e-12 || got.distance_cm.is_infinite());
        }
    }

    #[test]
    fn translation_invariance_of_kind() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..500 {
            let n = rng.gen_range(1..=10);
            let cs: Vec<GazePointCm> = (0..n)
                .map(|_| GazePointCm::new(rng.gen_range(-30.0..30.0), rng.gen_range(-30.0..30.0)))
                .collect();
            let g = GazePointCm::new(rng.gen_range(-30.0..30.0), rng.gen_range(-30.0..30.0));
            let tau = rng.gen_range(0.0..15.0);
            let (dx, dy) = (rng.gen_range(-50.0..50.0), rng.gen_range(-50.0..50.0));
            let cs2: Vec<GazePointCm> = cs.iter().map(|c| GazePointCm::new(c.x + dx, c.y + dy)).collect();
            let g2 = GazePointCm::new(g.x + dx, g.y + dy);
            // exact translation can perturb squared distances in the last ulp;
            // compare kinds only when the margin is not razor thin
            let a = assign_target(g, &cs, tau);
            let b = assign_target(g2, &cs2, tau);
            if (a.distance_cm - tau).abs() > 1e-6 {
                assert_eq!(a.kind, b.kind);
            }
        }
    }

    #[test]
    fn auto_tau_closed_form() {
        // one 16cm x 9cm cell on the default screen
        let c = cal();
        let w_px = (16.0 / c.cm_per_px_x()).round() as u32;
        let h_px = (9.0 / c.cm_per_px_y()).round() as u32;
        let tau = auto_tau(&[Rect::new(0, 0, w_px, h_px)], &c).unwrap();
        let expect = 1.25 * (8.0f64.powi(2) + 4.5f64.powi(2)).sqrt();
        assert!((tau - expect).abs() < 0.05, "{tau} vs {expect}");
    }

    #[test]
    fn auto_tau_max_over_equal_cells() {
        let c = cal();
        let r = Rect::new(0, 0, 440, 248);
        let one = auto_tau(&[r], &c).unwrap();
        let two = auto_tau(&[r, r], &c).unwrap();
        assert_eq!(one, two);
    }

    #[test]
    fn auto_tau_degenerate_and_empty() {
        let c = cal();
        assert!(matches!(auto_tau(&[], &c), Err(GeometryError::EmptyLayout)));
        assert_eq!(auto_tau(&[Rect::new(5, 5, 0, 0)], &c).unwrap(), 0.0);
    }

    #[test]
    fn calibration_text_round_trip() {
        let c = cal();
        let d = CalibrationProfile::from_text(&c.to_text()).unwrap();
        assert_eq!(c, d);
        assert!(CalibrationProfile::from_text("screen_w_px = 1920").is_err());
        assert!(CalibrationProfile::from_text("bogus_key = 3").is_err());
    }
}
