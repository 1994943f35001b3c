//! Two-panel loss plot (training on the left, validation on the right) with
//! one curve per run, drawn directly into an RGB buffer.

use std::path::Path;

use image::{Rgb, RgbImage};

use super::TrainHistory;
use crate::error::{Error, Result};

const PANEL_W: u32 = 420;
const PANEL_H: u32 = 300;
const LEFT: u32 = 64;
const RIGHT: u32 = 12;
const TOP: u32 = 28;
const BOTTOM: u32 = 34;
const TICKS: usize = 5;
const SCALE: u32 = 2;

const WHITE: Rgb<u8> = Rgb([255, 255, 255]);
const BLACK: Rgb<u8> = Rgb([0, 0, 0]);
const GRID: Rgb<u8> = Rgb([225, 225, 225]);
const PALETTE: [Rgb<u8>; 6] = [
    Rgb([31, 119, 180]),
    Rgb([255, 127, 14]),
    Rgb([44, 160, 44]),
    Rgb([214, 39, 40]),
    Rgb([148, 103, 189]),
    Rgb([140, 86, 75]),
];

/// 3×5 glyphs, one 3-bit row each, most significant bit on the left.
fn glyph(c: char) -> [u8; 5] {
    match c.to_ascii_uppercase() {
        '0' => [7, 5, 5, 5, 7],
        '1' => [2, 6, 2, 2, 7],
        '2' => [7, 1, 7, 4, 7],
        '3' => [7, 1, 7, 1, 7],
        '4' => [5, 5, 7, 1, 1],
        '5' => [7, 4, 7, 1, 7],
        '6' => [7, 4, 7, 5, 7],
        '7' => [7, 1, 1, 2, 2],
        '8' => [7, 5, 7, 5, 7],
        '9' => [7, 5, 7, 1, 7],
        'A' => [2, 5, 7, 5, 5],
        'B' => [6, 5, 6, 5, 6],
        'C' => [3, 4, 4, 4, 3],
        'D' => [6, 5, 5, 5, 6],
        'E' => [7, 4, 6, 4, 7],
        'F' => [7, 4, 6, 4, 4],
        'G' => [3, 4, 5, 5, 3],
        'H' => [5, 5, 7, 5, 5],
        'I' => [7, 2, 2, 2, 7],
        'J' => [1, 1, 1, 5, 2],
        'K' => [5, 5, 6, 5, 5],
        'L' => [4, 4, 4, 4, 7],
        'M' => [5, 7, 7, 5, 5],
        'N' => [6, 5, 5, 5, 5],
        'O' => [2, 5, 5, 5, 2],
        'P' => [6, 5, 6, 4, 4],
        'Q' => [2, 5, 5, 6, 3],
        'R' => [6, 5, 6, 5, 5],
        'S' => [3, 4, 2, 1, 6],
        'T' => [7, 2, 2, 2, 2],
        'U' => [5, 5, 5, 5, 7],
        'V' => [5, 5, 5, 5, 2],
        'W' => [5, 5, 7, 7, 5],
        'X' => [5, 5, 2, 5, 5],
        'Y' => [5, 5, 2, 2, 2],
        'Z' => [7, 1, 2, 4, 7],
        '.' => [0, 0, 0, 0, 2],
        '-' => [0, 0, 7, 0, 0],
        '_' => [0, 0, 0, 0, 7],
        '+' => [0, 2, 7, 2, 0],
        _ => [0; 5],
    }
}

fn put(img: &mut RgbImage, x: i64, y: i64, c: Rgb<u8>) {
    if x >= 0 && y >= 0 && (x as u32) < img.width() && (y as u32) < img.height() {
        img.put_pixel(x as u32, y as u32, c);
    }
}

fn text_width(s: &str) -> u32 {
    s.chars().count() as u32 * 4 * SCALE
}

fn draw_text(img: &mut RgbImage, x: i64, y: i64, s: &str, c: Rgb<u8>) {
    for (i, ch) in s.chars().enumerate() {
        let ox = x + (i as i64) * 4 * SCALE as i64;
        for (row, bits) in glyph(ch).iter().enumerate() {
            for col in 0..3 {
                if bits & (4 >> col) != 0 {
                    for dy in 0..SCALE as i64 {
                        for dx in 0..SCALE as i64 {
                            put(img, ox + col * SCALE as i64 + dx, y + row as i64 * SCALE as i64 + dy, c);
                        }
                    }
                }
            }
        }
    }
}

fn draw_line(img: &mut RgbImage, (x0, y0): (i64, i64), (x1, y1): (i64, i64), c: Rgb<u8>) {
    let (dx, dy) = ((x1 - x0).abs(), -(y1 - y0).abs());
    let (sx, sy) = (if x0 < x1 { 1 } else { -1 }, if y0 < y1 { 1 } else { -1 });
    let (mut x, mut y, mut err) = (x0, y0, dx + dy);
    loop {
        put(img, x, y, c);
        put(img, x, y + 1, c);
        if x == x1 && y == y1 {
            break;
        }
        let e2 = 2 * err;
        if e2 >= dy {
            err += dy;
            x += sx;
        }
        if e2 <= dx {
            err += dx;
            y += sy;
        }
    }
}

fn tick_label(v: f64) -> String {
    if v == 0.0 || v.abs() >= 1e-3 {
        format!("{v:.4}")
    } else {
        format!("{v:.1e}")
    }
}

type Curve = Vec<(usize, f64)>;

fn draw_panel(img: &mut RgbImage, ox: u32, title: &str, curves: &[(&str, Curve)], max_epoch: usize, (lo, hi): (f64, f64)) {
    let (x0, y0) = ((ox + LEFT) as i64, TOP as i64);
    let (x1, y1) = ((ox + PANEL_W - RIGHT) as i64, (PANEL_H - BOTTOM) as i64);
    draw_text(img, ox as i64 + (PANEL_W as i64 - text_width(title) as i64) / 2, 8, title, BLACK);
    let to_x = |e: usize| {
        if max_epoch <= 1 {
            (x0 + x1) / 2
        } else {
            x0 + ((e - 1) as f64 / (max_epoch - 1) as f64 * (x1 - x0) as f64).round() as i64
        }
    };
    let to_y = |v: f64| y1 - ((v - lo) / (hi - lo) * (y1 - y0) as f64).round() as i64;
    for t in 0..TICKS {
        let v = lo + (hi - lo) * t as f64 / (TICKS - 1) as f64;
        let y = to_y(v);
        for x in x0..=x1 {
            put(img, x, y, GRID);
        }
        let label = tick_label(v);
        draw_text(img, x0 - 6 - text_width(&label) as i64, y - SCALE as i64 * 2, &label, BLACK);
    }
    draw_line(img, (x0, y0), (x0, y1), BLACK);
    draw_line(img, (x0, y1), (x1, y1), BLACK);
    let first = "1".to_string();
    let last = max_epoch.to_string();
    draw_text(img, x0, y1 + 6, &first, BLACK);
    draw_text(img, x1 - text_width(&last) as i64, y1 + 6, &last, BLACK);
    draw_text(img, (x0 + x1 - text_width("EPOCH") as i64) / 2, y1 + 18, "EPOCH", BLACK);

    for (i, (name, points)) in curves.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pix: Vec<(i64, i64)> = points.iter().map(|&(e, v)| (to_x(e), to_y(v))).collect();
        if pix.len() == 1 {
            for d in -1..=1 {
                draw_line(img, (pix[0].0 - 1, pix[0].1 + d), (pix[0].0 + 1, pix[0].1 + d), color);
            }
        }
        for w in pix.windows(2) {
            draw_line(img, w[0], w[1], color);
        }
        let ly = y0 + 4 + i as i64 * 14;
        let lx = x1 - 8 - text_width(name) as i64 - 14;
        for d in 0..8 {
            draw_line(img, (lx, ly + d), (lx + 8, ly + d), color);
        }
        draw_text(img, lx + 14, ly - 1, name, BLACK);
    }
}

/// Renders the two panels side by side on a shared loss axis.
pub fn render_loss_plot(series: &[(&str, &TrainHistory)]) -> Result<RgbImage> {
    if series.is_empty() || series.iter().any(|(_, h)| h.is_empty()) {
        return Err(Error::InvalidArgument("cannot plot an empty history".into()));
    }
    let train: Vec<(&str, Curve)> = series
        .iter()
        .map(|(n, h)| (*n, h.records.iter().map(|r| (r.epoch, r.train_loss)).collect()))
        .collect();
    let val: Vec<(&str, Curve)> = series
        .iter()
        .map(|(n, h)| (*n, h.records.iter().filter_map(|r| r.val_loss.map(|v| (r.epoch, v))).collect()))
        .collect();
    let values: Vec<f64> = train
        .iter()
        .chain(&val)
        .flat_map(|(_, c)| c.iter().map(|p| p.1))
        .filter(|v| v.is_finite())
        .collect();
    let mut lo = values.iter().copied().fold(f64::INFINITY, f64::min).min(0.0);
    let mut hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(hi > lo) {
        lo -= 0.5;
        hi += 0.5;
    }
    let max_epoch = series.iter().flat_map(|(_, h)| h.records.iter().map(|r| r.epoch)).max().unwrap_or(1);
    let mut img = RgbImage::from_pixel(2 * PANEL_W, PANEL_H, WHITE);
    draw_panel(&mut img, 0, "TRAINING LOSS", &train, max_epoch, (lo, hi));
    draw_panel(&mut img, PANEL_W, "VALIDATION LOSS", &val, max_epoch, (lo, hi));
    Ok(img)
}

pub fn export_loss_plot(series: &[(&str, &TrainHistory)], path: &Path) -> Result<()> {
    render_loss_plot(series)?.save(path).map_err(|e| Error::Image {
        path: path.to_path_buf(),
        source: e,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::training::LossRecord;

    fn history(n: usize) -> TrainHistory {
        TrainHistory {
            records: (1..=n)
                .map(|e| LossRecord {
                    epoch: e,
                    train_loss: 1.0 / e as f64,
                    val_loss: Some(1.2 / e as f64),
                    steps: 1,
                })
                .collect(),
            epoch_seconds: vec![0.0; n],
        }
    }

    #[test]
    fn two_panels_with_curves() {
        let (a, b) = (history(50), history(30));
        let img = render_loss_plot(&[("M1", &a), ("M2", &b)]).unwrap();
        assert_eq!(img.dimensions(), (2 * PANEL_W, PANEL_H));
        for panel in 0..2 {
            let has = |c: Rgb<u8>| {
                (panel * PANEL_W..(panel + 1) * PANEL_W).any(|x| (0..PANEL_H).any(|y| *img.get_pixel(x, y) == c))
            };
            assert!(has(PALETTE[0]) && has(PALETTE[1]));
        }
    }

    #[test]
    fn empty_history_rejected() {
        assert!(render_loss_plot(&[("M1", &TrainHistory::default())]).is_err());
        assert!(render_loss_plot(&[]).is_err());
        assert!(render_loss_plot(&[("M1", &history(1))]).is_ok());
    }
}
