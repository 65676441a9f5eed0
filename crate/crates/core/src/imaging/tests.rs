use super::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Flood-fill reference labeling, 8-connectivity, raster-scan seed order.
pub fn flood_fill_components(mask: &BitMask) -> Vec<Component> {
    let (w, h) = (mask.width as usize, mask.height as usize);
    let mut seen = vec![false; w * h];
    let mut comps = Vec::new();
    for sy in 0..h {
        for sx in 0..w {
            if !mask.bits[sy * w + sx] || seen[sy * w + sx] {
                continue;
            }
            let mut stack = vec![(sx, sy)];
            seen[sy * w + sx] = true;
            let mut members = Vec::new();
            while let Some((x, y)) = stack.pop() {
                members.push((x, y));
                for dy in -1i64..=1 {
                    for dx in -1i64..=1 {
                        let (nx, ny) = (x as i64 + dx, y as i64 + dy);
                        if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                            continue;
                        }
                        let (nx, ny) = (nx as usize, ny as usize);
                        if mask.bits[ny * w + nx] && !seen[ny * w + nx] {
                            seen[ny * w + nx] = true;
                            stack.push((nx, ny));
                        }
                    }
                }
            }
            let x0 = members.iter().map(|p| p.0).min().unwrap() as u32;
            let y0 = members.iter().map(|p| p.1).min().unwrap() as u32;
            let x1 = members.iter().map(|p| p.0).max().unwrap() as u32 + 1;
            let y1 = members.iter().map(|p| p.1).max().unwrap() as u32 + 1;
            let sum = members
                .iter()
                .fold((0.0, 0.0), |a, p| (a.0 + p.0 as f64, a.1 + p.1 as f64));
            comps.push(Component {
                label: comps.len() as u32 + 1,
                area: members.len(),
                bbox: Rect::new(x0, y0, x1 - x0, y1 - y0),
                centroid_px: (sum.0 / members.len() as f64, sum.1 / members.len() as f64),
            });
        }
    }
    comps
}

fn random_frame(rng: &mut impl Rng, w: u32, h: u32) -> Frame {
    let pixels = (0..w as usize * h as usize * 3).map(|_| rng.gen()).collect();
    Frame::from_pixels(w, h, pixels)
}

fn components_eq(a: &[Component], b: &[Component]) -> bool {
    a.len() == b.len()
        && a.iter().zip(b).all(|(x, y)| {
            x.label == y.label
                && x.area == y.area
                && x.bbox == y.bbox
                && (x.centroid_px.0 - y.centroid_px.0).abs() < 1e-12
                && (x.centroid_px.1 - y.centroid_px.1).abs() < 1e-12
        })
}

#[test]
fn ppm_minimal_white_frame_bytes() {
    let f = Frame::new(1, 1, [255, 255, 255]);
    assert_eq!(encode_ppm(&f), b"P6\n1 1\n255\n\xff\xff\xff");
}

#[test]
fn ppm_round_trip_random_frames() {
    let dir = tempfile::tempdir().unwrap();
    for seed in 0..100 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_frame(&mut rng, 64, 48);
        let path = dir.path().join("rt.ppm");
        save_ppm(&f, &path).unwrap();
        let g = load_ppm(&path).unwrap();
        assert_eq!(f, g);
    }
}

#[test]
fn ppm_errors() {
    let ok = encode_ppm(&Frame::new(4, 4, [1, 2, 3]));
    assert!(matches!(
        decode_ppm(&ok[..ok.len() - 1]),
        Err(ImagingError::TruncatedPixelData { .. })
    ));
    assert!(matches!(
        decode_ppm(b"P5\n1 1\n255\nx"),
        Err(ImagingError::MalformedHeader(_))
    ));
    assert!(matches!(
        decode_ppm(b"P6\n1 1\n65535\n\0\0\0"),
        Err(ImagingError::UnsupportedMaxval(65535))
    ));
}

#[test]
fn ppm_header_comments_accepted() {
    let f = decode_ppm(b"P6\n# a comment\n2 1\n255\nabcdef").unwrap();
    assert_eq!((f.width(), f.height()), (2, 1));
}

#[test]
fn mask_all_background_is_empty() {
    let f = Frame::new(8, 8, [10, 20, 30]);
    assert_eq!(foreground_mask(&f, [10, 20, 30], 0).popcount(), 0);
}

#[test]
fn mask_single_off_by_one_channel() {
    let mut f = Frame::new(8, 8, [10, 20, 30]);
    f.set(3, 5, [10, 21, 30]);
    let m = foreground_mask(&f, [10, 20, 30], 0);
    assert_eq!(m.popcount(), 1);
    assert!(m.get(3, 5));
    // within tolerance 1 it disappears
    assert_eq!(foreground_mask(&f, [10, 20, 30], 1).popcount(), 0);
}

#[test]
fn mask_matches_per_pixel_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let f = random_frame(&mut rng, 31, 17);
        let bg: Rgb = [rng.gen(), rng.gen(), rng.gen()];
        let tol: u8 = rng.gen_range(0..=128);
        let m = foreground_mask(&f, bg, tol);
        for y in 0..f.height() {
            for x in 0..f.width() {
                let px = f.get(x, y);
                let expect = (0..3).any(|c| (px[c] as i16 - bg[c] as i16).abs() > tol as i16);
                assert_eq!(m.get(x, y), expect, "at ({x},{y})");
            }
        }
    }
}

#[test]
fn components_empty_mask() {
    assert!(connected_components(&BitMask::new(16, 16)).is_empty());
}

#[test]
fn components_singleton() {
    let mut m = BitMask::new(16, 16);
    m.set(5, 7, true);
    let cs = connected_components(&m);
    assert_eq!(cs.len(), 1);
    assert_eq!(cs[0].area, 1);
    assert_eq!(cs[0].bbox, Rect::new(5, 7, 1, 1));
    assert_eq!(cs[0].centroid_px, (5.0, 7.0));
}

#[test]
fn components_two_rectangles() {
    let mut m = BitMask::new(40, 30);
    for y in 2..8 {
        for x in 3..13 {
            m.set(x, y, true);
        }
    }
    for y in 15..25 {
        for x in 20..28 {
            m.set(x, y, true);
        }
    }
    let cs = connected_components(&m);
    assert_eq!(cs.len(), 2);
    assert_eq!(cs[0].bbox, Rect::new(3, 2, 10, 6));
    assert_eq!(cs[0].centroid_px, (7.5, 4.5));
    assert_eq!(cs[1].bbox, Rect::new(20, 15, 8, 10));
    assert_eq!(cs[1].centroid_px, (23.5, 19.5));
}

#[test]
fn components_match_flood_fill_on_random_masks() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..200 {
        let w = rng.gen_range(1..=64);
        let h = rng.gen_range(1..=64);
        let mut m = BitMask::new(w, h);
        let density: f64 = rng.gen_range(0.1..0.9);
        for b in m.bits.iter_mut() {
            *b = rng.gen_bool(density);
        }
        let got = connected_components(&m);
        let want = flood_fill_components(&m);
        assert!(components_eq(&got, &want), "mismatch on {w}x{h} mask");
        // partition: areas sum to popcount
        let total: usize = got.iter().map(|c| c.area).sum();
        assert_eq!(total, m.popcount());
    }
}

#[test]
fn draw_empty_string_is_identity() {
    let f = Frame::new(20, 20, [0, 0, 0]);
    let g = draw_text(&f, "", (3, 3), 2, [255, 255, 255]).unwrap();
    assert_eq!(f, g);
}

#[test]
fn draw_text_width_arithmetic() {
    // "Walter" at scale 2: 6 chars * 6 cols * 2 - trailing gap 2 = 70 px wide
    let f = Frame::new(200, 40, [0, 0, 0]);
    let g = draw_text(&f, "Walter", (10, 5), 2, [255, 255, 255]).unwrap();
    let lit: Vec<u32> = (0..g.width())
        .filter(|&x| (0..g.height()).any(|y| g.get(x, y) != [0, 0, 0]))
        .collect();
    let min = *lit.first().unwrap();
    let max = *lit.last().unwrap();
    // glyphs start at pen x=10; rightmost possible lit column is 10 + 70 - 1
    assert!(min >= 10);
    assert_eq!(max, 10 + 70 - 1);
}

#[test]
fn draw_unsupported_glyph_errors() {
    let f = Frame::new(20, 20, [0, 0, 0]);
    assert!(matches!(
        draw_text(&f, "a_b", (0, 0), 1, [255, 255, 255]),
        Err(ImagingError::UnsupportedGlyph('_'))
    ));
}

#[test]
fn read_text_blank_region_is_empty() {
    let f = Frame::new(100, 30, [0, 0, 0]);
    let s = read_text(&f, Rect::new(5, 5, 60, 14), 2, [255, 255, 255]).unwrap();
    assert_eq!(s, "");
}

#[test]
fn read_text_out_of_bounds() {
    let f = Frame::new(50, 20, [0, 0, 0]);
    assert!(matches!(
        read_text(&f, Rect::new(40, 0, 20, 10), 1, [255, 255, 255]),
        Err(ImagingError::RegionOutOfBounds(_))
    ));
}

#[test]
fn text_round_trip_named() {
    let f = Frame::new(300, 40, [20, 20, 20]);
    let g = draw_text(&f, "Alison", (7, 9), 3, [255, 255, 0]).unwrap();
    let region = Rect::new(7, 9, 6 * 6 * 3, 7 * 3);
    assert_eq!(read_text(&g, region, 3, [255, 255, 0]).unwrap(), "Alison");
}

#[test]
fn text_round_trip_random_strings() {
    let charset: Vec<char> = font::charset().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..200 {
        let len = rng.gen_range(0..=32);
        let s: String = (0..len)
            .map(|_| charset[rng.gen_range(0..charset.len())])
            .collect();
        let scale = rng.gen_range(1..=4u32);
        let w = 32 * 6 * scale + 20;
        let h = 7 * scale + 12;
        let ox = rng.gen_range(0..10) as i64;
        let oy = rng.gen_range(0..5) as i64;
        let f = Frame::new(w, h, [0, 0, 0]);
        let g = draw_text(&f, &s, (ox, oy), scale, [200, 100, 50]).unwrap();
        let region = Rect::new(ox as u32, oy as u32, 32 * 6 * scale, 7 * scale);
        let decoded = read_text(&g, region, scale, [200, 100, 50]).unwrap();
        assert_eq!(decoded, s.trim_end_matches(' '));
    }
}

#[test]
fn draw_clips_outside_frame() {
    let f = Frame::new(10, 10, [0, 0, 0]);
    // mostly off-frame, must not panic and must leave untouched pixels alone
    let g = draw_text(&f, "W", (-3, -3), 2, [255, 255, 255]).unwrap();
    assert_eq!(g.width(), 10);
    let h = draw_text(&f, "W", (100, 100), 2, [255, 255, 255]).unwrap();
    assert_eq!(f, h);
}
