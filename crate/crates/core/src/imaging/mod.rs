//! Pixel-level primitives: RGB raster, binary PPM I/O, color masking,
//! connected-component labeling, and bitmap-font text draw/decode.

pub mod font;

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;
use thiserror::Error;

pub type Rgb = [u8; 3];

#[derive(Debug, Error)]
pub enum ImagingError {
    #[error("malformed PPM header: {0}")]
    MalformedHeader(String),
    #[error("truncated pixel data: expected {expected} bytes, got {got}")]
    TruncatedPixelData { expected: usize, got: usize },
    #[error("unsupported maxval {0} (only 255)")]
    UnsupportedMaxval(u32),
    #[error("glyph {0:?} is not in the embedded font")]
    UnsupportedGlyph(char),
    #[error("bitmap at char cell {index} matches no font glyph")]
    UnrecognizedGlyph { index: usize },
    #[error("region {0:?} does not fit the frame")]
    RegionOutOfBounds(Rect),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

/// Axis-aligned pixel rectangle, `left`/`top` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rect {
    pub left: u32,
    pub top: u32,
    pub width: u32,
    pub height: u32,
}

impl Rect {
    pub fn new(left: u32, top: u32, width: u32, height: u32) -> Self {
        Rect { left, top, width, height }
    }

    pub fn center(&self) -> (f64, f64) {
        (
            self.left as f64 + (self.width as f64 - 1.0) / 2.0,
            self.top as f64 + (self.height as f64 - 1.0) / 2.0,
        )
    }
}

/// Owned row-major RGB raster, 8 bits per channel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    width: u32,
    height: u32,
    pixels: Vec<u8>,
}

impl Frame {
    pub fn new(width: u32, height: u32, fill: Rgb) -> Self {
        assert!(width >= 1 && height >= 1);
        let mut pixels = Vec::with_capacity(width as usize * height as usize * 3);
        for _ in 0..width as usize * height as usize {
            pixels.extend_from_slice(&fill);
        }
        Frame { width, height, pixels }
    }

    pub fn from_pixels(width: u32, height: u32, pixels: Vec<u8>) -> Self {
        assert_eq!(pixels.len(), width as usize * height as usize * 3);
        assert!(width >= 1 && height >= 1);
        Frame { width, height, pixels }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> Rgb {
        let i = (y as usize * self.width as usize + x as usize) * 3;
        [self.pixels[i], self.pixels[i + 1], self.pixels[i + 2]]
    }

    #[inline]
    pub fn set(&mut self, x: u32, y: u32, c: Rgb) {
        let i = (y as usize * self.width as usize + x as usize) * 3;
        self.pixels[i..i + 3].copy_from_slice(&c);
    }

    pub fn contains(&self, x: i64, y: i64) -> bool {
        x >= 0 && y >= 0 && (x as u32) < self.width && (y as u32) < self.height
    }

    /// Fill `rect` (clipped to the frame) with a solid color.
    pub fn fill_rect(&mut self, rect: Rect, c: Rgb) {
        let x1 = (rect.left + rect.width).min(self.width);
        let y1 = (rect.top + rect.height).min(self.height);
        for y in rect.top.min(self.height)..y1 {
            for x in rect.left.min(self.width)..x1 {
                self.set(x, y, c);
            }
        }
    }
}

/// Row-major boolean mask, true = foreground.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitMask {
    pub width: u32,
    pub height: u32,
    pub bits: Vec<bool>,
}

impl BitMask {
    pub fn new(width: u32, height: u32) -> Self {
        BitMask { width, height, bits: vec![false; width as usize * height as usize] }
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> bool {
        self.bits[y as usize * self.width as usize + x as usize]
    }

    #[inline]
    pub fn set(&mut self, x: u32, y: u32, v: bool) {
        self.bits[y as usize * self.width as usize + x as usize] = v;
    }

    pub fn popcount(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }
}

/// One 8-connected foreground region.
#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    pub label: u32,
    pub area: usize,
    pub bbox: Rect,
    pub centroid_px: (f64, f64),
}

// ---------------------------------------------------------------------------
// PPM (P6) I/O

pub fn load_ppm(path: &Path) -> Result<Frame, ImagingError> {
    let mut data = Vec::new();
    BufReader::new(File::open(path)?).read_to_end(&mut data)?;
    decode_ppm(&data)
}

pub fn decode_ppm(data: &[u8]) -> Result<Frame, ImagingError> {
    let mut pos = 0usize;
    if data.len() < 2 || &data[0..2] != b"P6" {
        return Err(ImagingError::MalformedHeader("missing P6 magic".into()));
    }
    pos += 2;
    let width = read_header_int(data, &mut pos)?;
    let height = read_header_int(data, &mut pos)?;
    let maxval = read_header_int(data, &mut pos)?;
    if maxval != 255 {
        return Err(ImagingError::UnsupportedMaxval(maxval));
    }
    if width == 0 || height == 0 {
        return Err(ImagingError::MalformedHeader("zero dimension".into()));
    }
    // exactly one whitespace byte separates the header from pixel data
    match data.get(pos) {
        Some(b) if b.is_ascii_whitespace() => pos += 1,
        _ => return Err(ImagingError::MalformedHeader("missing header terminator".into())),
    }
    let expected = width as usize * height as usize * 3;
    let body = &data[pos..];
    if body.len() < expected {
        return Err(ImagingError::TruncatedPixelData { expected, got: body.len() });
    }
    Ok(Frame::from_pixels(width, height, body[..expected].to_vec()))
}

fn read_header_int(data: &[u8], pos: &mut usize) -> Result<u32, ImagingError> {
    // skip whitespace and '#' comments
    loop {
        match data.get(*pos) {
            Some(b) if b.is_ascii_whitespace() => *pos += 1,
            Some(b'#') => {
                while let Some(&b) = data.get(*pos) {
                    *pos += 1;
                    if b == b'\n' {
                        break;
                    }
                }
            }
            _ => break,
        }
    }
    let start = *pos;
    while matches!(data.get(*pos), Some(b) if b.is_ascii_digit()) {
        *pos += 1;
    }
    if *pos == start {
        return Err(ImagingError::MalformedHeader("expected integer".into()));
    }
    std::str::from_utf8(&data[start..*pos])
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| ImagingError::MalformedHeader("bad integer".into()))
}

pub fn save_ppm(frame: &Frame, path: &Path) -> Result<(), ImagingError> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(&encode_ppm(frame))?;
    w.flush()?;
    Ok(())
}

pub fn encode_ppm(frame: &Frame) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", frame.width, frame.height).into_bytes();
    out.extend_from_slice(&frame.pixels);
    out
}

// ---------------------------------------------------------------------------
// Masking and labeling

/// True where any channel differs from `background` by more than `tolerance`.
pub fn foreground_mask(frame: &Frame, background: Rgb, tolerance: u8) -> BitMask {
    let mut mask = BitMask::new(frame.width, frame.height);
    for (i, px) in frame.pixels.chunks_exact(3).enumerate() {
        let fg = (0..3).any(|c| (px[c] as i16 - background[c] as i16).abs() > tolerance as i16);
        mask.bits[i] = fg;
    }
    mask
}

/// 8-connected components of the foreground, labeled 1.. in raster-scan
/// order of each component's first pixel.
pub fn connected_components(mask: &BitMask) -> Vec<Component> {
    let (w, h) = (mask.width as usize, mask.height as usize);
    let mut parent: Vec<u32> = Vec::new(); // union-find over provisional labels
    let mut labels: Vec<u32> = vec![0; w * h]; // 0 = background

    fn find(parent: &mut Vec<u32>, mut x: u32) -> u32 {
        while parent[x as usize] != x {
            parent[x as usize] = parent[parent[x as usize] as usize];
            x = parent[x as usize];
        }
        x
    }

    for y in 0..h {
        for x in 0..w {
            if !mask.bits[y * w + x] {
                continue;
            }
            // neighbors already scanned: W, NW, N, NE
            let mut best: Option<u32> = None;
            let mut neigh = [0u32; 4];
            let mut n_count = 0;
            let candidates: [(i64, i64); 4] =
                [(x as i64 - 1, y as i64), (x as i64 - 1, y as i64 - 1), (x as i64, y as i64 - 1), (x as i64 + 1, y as i64 - 1)];
            for (nx, ny) in candidates {
                if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                    continue;
                }
                let l = labels[ny as usize * w + nx as usize];
                if l != 0 {
                    let root = find(&mut parent, l - 1);
                    neigh[n_count] = root;
                    n_count += 1;
                    best = Some(match best {
                        Some(b) => b.min(root),
                        None => root,
                    });
                }
            }
            match best {
                None => {
                    let id = parent.len() as u32;
                    parent.push(id);
                    labels[y * w + x] = id + 1;
                }
                Some(b) => {
                    labels[y * w + x] = b + 1;
                    for &r in &neigh[..n_count] {
                        parent[r as usize] = b;
                    }
                }
            }
        }
    }

    // final labels in raster order of first occurrence
    let mut final_of_root: Vec<Option<u32>> = vec![None; parent.len()];
    let mut comps: Vec<Component> = Vec::new();
    let mut sums: Vec<(f64, f64)> = Vec::new();
    for y in 0..h {
        for x in 0..w {
            let l = labels[y * w + x];
            if l == 0 {
                continue;
            }
            let root = find(&mut parent, l - 1) as usize;
            let fl = match final_of_root[root] {
                Some(fl) => fl,
                None => {
                    let fl = comps.len() as u32 + 1;
                    final_of_root[root] = Some(fl);
                    comps.push(Component {
                        label: fl,
                        area: 0,
                        bbox: Rect::new(x as u32, y as u32, 0, 0),
                        centroid_px: (0.0, 0.0),
                    });
                    sums.push((0.0, 0.0));
                    fl
                }
            };
            let c = &mut comps[(fl - 1) as usize];
            c.area += 1;
            let (bx0, by0) = (c.bbox.left.min(x as u32), c.bbox.top.min(y as u32));
            let bx1 = (c.bbox.left + c.bbox.width).max(x as u32 + 1);
            let by1 = (c.bbox.top + c.bbox.height).max(y as u32 + 1);
            c.bbox = Rect::new(bx0, by0, bx1 - bx0, by1 - by0);
            sums[(fl - 1) as usize].0 += x as f64;
            sums[(fl - 1) as usize].1 += y as f64;
        }
    }
    for (c, s) in comps.iter_mut().zip(&sums) {
        c.centroid_px = (s.0 / c.area as f64, s.1 / c.area as f64);
    }
    comps
}

// ---------------------------------------------------------------------------
// Bitmap-font text

/// Render `text` at integer `scale` with the embedded 5x7 font. Glyph parts
/// outside the frame are clipped; pixels outside glyph cells are untouched.
pub fn draw_text(
    frame: &Frame,
    text: &str,
    origin: (i64, i64),
    scale: u32,
    color: Rgb,
) -> Result<Frame, ImagingError> {
    assert!(scale >= 1);
    let mut out = frame.clone();
    let mut pen_x = origin.0;
    for ch in text.chars() {
        let g = font::glyph(ch).ok_or(ImagingError::UnsupportedGlyph(ch))?;
        for (gy, row) in g.iter().enumerate() {
            for gx in 0..font::GLYPH_W {
                if row & (1 << (4 - gx)) == 0 {
                    continue;
                }
                for sy in 0..scale {
                    for sx in 0..scale {
                        let px = pen_x + (gx * scale + sx) as i64;
                        let py = origin.1 + (gy as u32 * scale + sy) as i64;
                        if out.contains(px, py) {
                            out.set(px as u32, py as u32, color);
                        }
                    }
                }
            }
        }
        pen_x += (font::ADVANCE * scale) as i64;
    }
    Ok(out)
}

/// Decode text rendered by [`draw_text`] at the same scale and color.
/// Reads `region.width / (6*scale)` character cells starting at the region's
/// top-left corner; trailing spaces are stripped.
pub fn read_text(
    frame: &Frame,
    region: Rect,
    scale: u32,
    text_color: Rgb,
) -> Result<String, ImagingError> {
    assert!(scale >= 1);
    if region.left + region.width > frame.width
        || region.top + region.height > frame.height
        || region.height < font::GLYPH_H * scale
    {
        return Err(ImagingError::RegionOutOfBounds(region));
    }
    let n_chars = (region.width / (font::ADVANCE * scale)) as usize;
    let mut out = String::new();
    for i in 0..n_chars {
        let x0 = region.left + i as u32 * font::ADVANCE * scale;
        let mut g: font::Glyph = [0; 7];
        for gy in 0..font::GLYPH_H {
            for gx in 0..font::GLYPH_W {
                // integer scaling is uniform per block, top-left sample suffices
                let px = x0 + gx * scale;
                let py = region.top + gy * scale;
                if frame.get(px, py) == text_color {
                    g[gy as usize] |= 1 << (4 - gx);
                }
            }
        }
        let ch = font::char_for(&g).ok_or(ImagingError::UnrecognizedGlyph { index: i })?;
        out.push(ch);
    }
    Ok(out.trim_end_matches(' ').to_string())
}

#[cfg(test)]
mod tests;
