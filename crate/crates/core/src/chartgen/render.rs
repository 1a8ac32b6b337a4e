//! Deterministic bar-chart rasterizer.
//!
//! Everything is drawn with integer pixel geometry and an embedded 8x8
//! bitmap font, so output bytes depend only on the spec and this file. Every
//! text draw is logged so callers can check labels, legends and annotations
//! without OCR.

use std::path::Path;

use font8x8::UnicodeFonts;
use image::{Rgb, RgbImage};
use serde::{Deserialize, Serialize};

use super::{ChartGenError, ChartSpec, ChartType, Orientation};
use crate::table::format_number;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct RenderConfig {
    pub width: u32,
    pub height: u32,
}

impl Default for RenderConfig {
    fn default() -> Self {
        Self {
            width: 960,
            height: 640,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TextRole {
    Title,
    AxisLabel,
    CategoryLabel,
    Tick,
    Annotation,
    Legend,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TextDraw {
    pub text: String,
    pub x: i64,
    pub y: i64,
    pub role: TextRole,
}

/// Pixel rectangle of one bar or stack segment, `x0 <= x1`, `y0 <= y1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BarRect {
    pub category: usize,
    pub series: usize,
    pub value: f64,
    pub x0: i64,
    pub y0: i64,
    pub x1: i64,
    pub y1: i64,
}

#[derive(Debug, Clone)]
pub struct Rendered {
    pub image: RgbImage,
    pub texts: Vec<TextDraw>,
    pub bars: Vec<BarRect>,
}

impl Rendered {
    pub fn texts_with_role(&self, role: TextRole) -> impl Iterator<Item = &str> {
        self.texts.iter().filter(move |t| t.role == role).map(|t| t.text.as_str())
    }

    pub fn legend_entries(&self) -> Vec<&str> {
        self.texts_with_role(TextRole::Legend).collect()
    }
}

const PALETTE: [[u8; 3]; 10] = [
    [31, 119, 180],
    [255, 127, 14],
    [44, 160, 44],
    [214, 39, 40],
    [148, 103, 189],
    [140, 86, 75],
    [227, 119, 194],
    [127, 127, 127],
    [188, 189, 34],
    [23, 190, 207],
];
const WHITE: Rgb<u8> = Rgb([255, 255, 255]);
const BLACK: Rgb<u8> = Rgb([0, 0, 0]);
const GRID: Rgb<u8> = Rgb([225, 225, 225]);
const GLYPH: i64 = 8;

pub fn series_color(series: usize) -> Rgb<u8> {
    Rgb(PALETTE[series % PALETTE.len()])
}

struct Canvas {
    image: RgbImage,
    texts: Vec<TextDraw>,
}

impl Canvas {
    fn new(width: u32, height: u32) -> Self {
        Self {
            image: RgbImage::from_pixel(width, height, WHITE),
            texts: Vec::new(),
        }
    }

    fn put(&mut self, x: i64, y: i64, color: Rgb<u8>) {
        if x >= 0 && y >= 0 && (x as u32) < self.image.width() && (y as u32) < self.image.height() {
            self.image.put_pixel(x as u32, y as u32, color);
        }
    }

    fn fill_rect(&mut self, x0: i64, y0: i64, x1: i64, y1: i64, color: Rgb<u8>) {
        for y in y0..=y1 {
            for x in x0..=x1 {
                self.put(x, y, color);
            }
        }
    }

    fn hline(&mut self, x0: i64, x1: i64, y: i64, color: Rgb<u8>) {
        self.fill_rect(x0.min(x1), y, x0.max(x1), y, color);
    }

    fn vline(&mut self, x: i64, y0: i64, y1: i64, color: Rgb<u8>) {
        self.fill_rect(x, y0.min(y1), x, y0.max(y1), color);
    }

    fn text_width(text: &str, scale: i64) -> i64 {
        text.chars().count() as i64 * GLYPH * scale
    }

    /// Draws `text` with its top-left corner at `(x, y)`.
    fn text(&mut self, text: &str, x: i64, y: i64, scale: i64, role: TextRole) {
        self.texts.push(TextDraw {
            text: text.to_string(),
            x,
            y,
            role,
        });
        for (k, c) in text.chars().enumerate() {
            let glyph = font8x8::BASIC_FONTS
                .get(c)
                .or_else(|| font8x8::LATIN_FONTS.get(c))
                .or_else(|| font8x8::BASIC_FONTS.get('?'))
                .unwrap_or([0; 8]);
            let gx = x + k as i64 * GLYPH * scale;
            for (row, bits) in glyph.iter().enumerate() {
                for col in 0..8 {
                    if bits & (1 << col) != 0 {
                        let px = gx + col * scale;
                        let py = y + row as i64 * scale;
                        self.fill_rect(px, py, px + scale - 1, py + scale - 1, BLACK);
                    }
                }
            }
        }
    }

    fn text_centered(&mut self, text: &str, cx: i64, y: i64, scale: i64, role: TextRole) {
        let w = Self::text_width(text, scale);
        self.text(text, cx - w / 2, y, scale, role);
    }

    fn text_right(&mut self, text: &str, right: i64, y: i64, scale: i64, role: TextRole) {
        let w = Self::text_width(text, scale);
        self.text(text, right - w, y, scale, role);
    }
}

/// Lower and upper end of the value axis plus the tick step.
fn value_axis(spec: &ChartSpec) -> (f64, f64, f64) {
    let (mut lo, mut hi) = (0.0f64, 0.0f64);
    for row in &spec.values {
        match spec.chart_type {
            ChartType::Stacked => {
                let pos: f64 = row.iter().filter(|v| **v > 0.0).sum();
                let neg: f64 = row.iter().filter(|v| **v < 0.0).sum();
                hi = hi.max(pos);
                lo = lo.min(neg);
            }
            _ => {
                for &v in row {
                    hi = hi.max(v);
                    lo = lo.min(v);
                }
            }
        }
    }
    if hi - lo <= 0.0 {
        hi = lo + 1.0;
    }
    let raw = (hi - lo) / 5.0;
    let magnitude = 10f64.powf(raw.log10().floor());
    let step = match raw / magnitude {
        n if n <= 1.0 => 1.0,
        n if n <= 2.0 => 2.0,
        n if n <= 5.0 => 5.0,
        _ => 10.0,
    } * magnitude;
    ((lo / step).floor() * step, (hi / step).ceil() * step, step)
}

/// Renders `spec` in memory.
pub fn render(spec: &ChartSpec, cfg: &RenderConfig) -> Result<Rendered, ChartGenError> {
    spec.validate()?;
    if let Some(bad) = spec.values.iter().flatten().find(|v| !v.is_finite()) {
        return Err(ChartGenError::Render {
            id: spec.id.clone(),
            reason: format!("non-finite value {bad}"),
        });
    }
    let (width, height) = (cfg.width as i64, cfg.height as i64);
    let legend = spec.series_names.len() > 1;
    let mut canvas = Canvas::new(cfg.width, cfg.height);

    let left = 140;
    let right = width - if legend { 230 } else { 40 };
    let top = 60;
    let bottom = height - 70;
    if right - left < 50 || bottom - top < 50 {
        return Err(ChartGenError::Render {
            id: spec.id.clone(),
            reason: format!("canvas {width}x{height} too small"),
        });
    }

    canvas.text_centered(&spec.title, width / 2, 16, 2, TextRole::Title);

    let (alo, ahi, step) = value_axis(spec);
    let vertical = spec.orientation == Orientation::Vertical;
    let value_px = |v: f64| -> i64 {
        let f = (v - alo) / (ahi - alo);
        if vertical {
            (bottom as f64 - f * (bottom - top) as f64).round() as i64
        } else {
            (left as f64 + f * (right - left) as f64).round() as i64
        }
    };

    // Grid and value ticks.
    let ticks = ((ahi - alo) / step).round() as i64;
    for k in 0..=ticks {
        let v = ((alo + k as f64 * step) * 1e6).round() / 1e6;
        let p = value_px(v);
        let label = format_number(v);
        if vertical {
            canvas.hline(left, right, p, GRID);
            canvas.text_right(&label, left - 6, p - GLYPH / 2, 1, TextRole::Tick);
        } else {
            canvas.vline(p, top, bottom, GRID);
            canvas.text_centered(&label, p, bottom + 6, 1, TextRole::Tick);
        }
    }

    // Bars.
    let n_cat = spec.categories.len() as i64;
    let n_series = spec.series_names.len();
    let axis_len = if vertical { right - left } else { bottom - top };
    let band = axis_len as f64 / n_cat as f64;
    let mut bars = Vec::new();
    for (c, row) in spec.values.iter().enumerate() {
        let b0 = c as f64 * band + band * 0.15;
        let b1 = (c + 1) as f64 * band - band * 0.15;
        let (mut pos_acc, mut neg_acc) = (0.0, 0.0);
        for (s, &v) in row.iter().enumerate() {
            let (from, to, slot0, slot1) = match spec.chart_type {
                ChartType::Simple => (0.0, v, b0, b1),
                ChartType::Grouped => {
                    let w = (b1 - b0) / n_series as f64;
                    (0.0, v, b0 + s as f64 * w, b0 + (s + 1) as f64 * w)
                }
                ChartType::Stacked => {
                    let acc = if v >= 0.0 { &mut pos_acc } else { &mut neg_acc };
                    let from = *acc;
                    *acc += v;
                    (from, *acc, b0, b1)
                }
            };
            let (c0, c1) = (slot0.round() as i64, slot1.round() as i64 - 1);
            let (v0, v1) = (value_px(from), value_px(to));
            let rect = if vertical {
                BarRect {
                    category: c,
                    series: s,
                    value: v,
                    x0: left + c0,
                    x1: left + c1.max(c0),
                    y0: v0.min(v1),
                    y1: v0.max(v1),
                }
            } else {
                BarRect {
                    category: c,
                    series: s,
                    value: v,
                    x0: v0.min(v1),
                    x1: v0.max(v1),
                    y0: top + c0,
                    y1: top + c1.max(c0),
                }
            };
            let color = if n_series > 1 { series_color(s) } else { series_color(0) };
            canvas.fill_rect(rect.x0, rect.y0, rect.x1, rect.y1, color);
            bars.push(rect);
        }
        let center = (c as f64 * band + band / 2.0).round() as i64;
        let name = &spec.categories[c];
        if vertical {
            canvas.text_centered(name, left + center, bottom + 22, 1, TextRole::CategoryLabel);
        } else {
            canvas.text_right(name, left - 6, top + center - GLYPH / 2, 1, TextRole::CategoryLabel);
        }
    }

    if spec.annotate {
        for bar in &bars {
            let label = format_number(bar.value);
            let cx = (bar.x0 + bar.x1) / 2;
            let cy = (bar.y0 + bar.y1) / 2 - GLYPH / 2;
            canvas.text_centered(&label, cx, cy, 1, TextRole::Annotation);
        }
    }

    // Axes and zero line.
    canvas.vline(left, top, bottom, BLACK);
    canvas.hline(left, right, bottom, BLACK);
    let zero = value_px(0.0);
    if vertical {
        canvas.hline(left, right, zero, BLACK);
    } else {
        canvas.vline(zero, top, bottom, BLACK);
    }

    canvas.text_centered(spec.horizontal_axis_label(), (left + right) / 2, height - 24, 1, TextRole::AxisLabel);
    canvas.text(spec.vertical_axis_label(), 12, top - 22, 1, TextRole::AxisLabel);

    if legend {
        let lx = right + 20;
        for (s, name) in spec.series_names.iter().enumerate() {
            let ly = top + s as i64 * 20;
            canvas.fill_rect(lx, ly, lx + 11, ly + 11, series_color(s));
            canvas.text(name, lx + 18, ly + 2, 1, TextRole::Legend);
        }
    }

    Ok(Rendered {
        image: canvas.image,
        texts: canvas.texts,
        bars,
    })
}

/// Renders `spec` and writes it as PNG to `out_path`.
pub fn render_chart(spec: &ChartSpec, out_path: &Path, cfg: &RenderConfig) -> Result<Rendered, ChartGenError> {
    let rendered = render(spec, cfg)?;
    rendered
        .image
        .save_with_format(out_path, image::ImageFormat::Png)
        .map_err(|source| match source {
            image::ImageError::IoError(e) => ChartGenError::io(out_path, e),
            other => ChartGenError::Image {
                path: out_path.to_path_buf(),
                source: other,
            },
        })?;
    Ok(rendered)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(chart_type: ChartType, orientation: Orientation, series: usize) -> ChartSpec {
        let categories: Vec<String> = ["Costs", "Invoices", "Capital"].iter().map(|s| s.to_string()).collect();
        let series_names: Vec<String> = ["Aomori Bank", "Bank of Yokohama", "State Street"]
            .iter()
            .take(series)
            .map(|s| s.to_string())
            .collect();
        let values = vec![vec![948.0, 983.0, 837.0], vec![680.0, -547.0, 532.0], vec![709.0, 937.0, 830.0]]
            .into_iter()
            .map(|r| r.into_iter().take(series).collect())
            .collect();
        ChartSpec {
            id: "r".into(),
            chart_type,
            orientation,
            title: "Global Competitive Advantage".into(),
            x_label: "Market Trend Analysis".into(),
            y_label: "Revenue ($)".into(),
            categories,
            series_names,
            values,
            annotate: true,
            seed: 0,
        }
    }

    #[test]
    fn nice_axis_covers_zero_and_data() {
        let s = spec(ChartType::Grouped, Orientation::Vertical, 3);
        let (lo, hi, step) = value_axis(&s);
        assert!(lo <= -547.0 && hi >= 983.0);
        assert_eq!(step, 500.0);
        let s = spec(ChartType::Stacked, Orientation::Vertical, 3);
        let (lo, hi, _) = value_axis(&s);
        assert!(hi >= 948.0 + 983.0 + 837.0);
        assert!(lo <= -547.0);
    }

    #[test]
    fn one_bar_per_value() {
        for t in [ChartType::Simple, ChartType::Stacked, ChartType::Grouped] {
            for o in [Orientation::Vertical, Orientation::Horizontal] {
                let series = if t == ChartType::Simple { 1 } else { 3 };
                let r = render(&spec(t, o, series), &RenderConfig::default()).unwrap();
                assert_eq!(r.bars.len(), 3 * series);
                assert!(r.bars.iter().all(|b| b.x0 <= b.x1 && b.y0 <= b.y1));
            }
        }
    }

    #[test]
    fn stacked_segments_do_not_overlap() {
        let r = render(&spec(ChartType::Stacked, Orientation::Vertical, 3), &RenderConfig::default()).unwrap();
        let cat0: Vec<_> = r.bars.iter().filter(|b| b.category == 0).collect();
        assert!(cat0[0].y0 >= cat0[1].y1 - 1);
        assert!(cat0[1].y0 >= cat0[2].y1 - 1);
    }

    #[test]
    fn grouped_bars_sit_side_by_side() {
        let r = render(&spec(ChartType::Grouped, Orientation::Vertical, 3), &RenderConfig::default()).unwrap();
        let cat0: Vec<_> = r.bars.iter().filter(|b| b.category == 0).collect();
        assert!(cat0[0].x1 < cat0[1].x0 && cat0[1].x1 < cat0[2].x0);
    }

    #[test]
    fn horizontal_swaps_axes() {
        let v = render(&spec(ChartType::Simple, Orientation::Vertical, 1), &RenderConfig::default()).unwrap();
        let h = render(&spec(ChartType::Simple, Orientation::Horizontal, 1), &RenderConfig::default()).unwrap();
        // Vertical bars are taller than wide for these values; horizontal ones the reverse.
        let b = &v.bars[0];
        assert!(b.y1 - b.y0 > b.x1 - b.x0);
        let b = &h.bars[0];
        assert!(b.x1 - b.x0 > b.y1 - b.y0);
    }

    #[test]
    fn legend_only_for_multiple_series() {
        let r = render(&spec(ChartType::Grouped, Orientation::Vertical, 3), &RenderConfig::default()).unwrap();
        assert_eq!(r.legend_entries(), vec!["Aomori Bank", "Bank of Yokohama", "State Street"]);
        let r = render(&spec(ChartType::Simple, Orientation::Vertical, 1), &RenderConfig::default()).unwrap();
        assert!(r.legend_entries().is_empty());
    }

    #[test]
    fn annotations_follow_flag() {
        let mut s = spec(ChartType::Stacked, Orientation::Horizontal, 3);
        let r = render(&s, &RenderConfig::default()).unwrap();
        let notes: Vec<_> = r.texts_with_role(TextRole::Annotation).collect();
        for v in s.values.iter().flatten() {
            assert!(notes.contains(&format_number(*v).as_str()));
        }
        s.annotate = false;
        let r = render(&s, &RenderConfig::default()).unwrap();
        assert_eq!(r.texts_with_role(TextRole::Annotation).count(), 0);
    }

    #[test]
    fn rejects_non_finite_values() {
        let mut s = spec(ChartType::Simple, Orientation::Vertical, 1);
        s.values[1][0] = f64::NAN;
        assert!(matches!(render(&s, &RenderConfig::default()), Err(ChartGenError::Render { .. })));
    }

    #[test]
    fn identical_specs_give_identical_pixels() {
        let s = spec(ChartType::Grouped, Orientation::Horizontal, 2);
        let a = render(&s, &RenderConfig::default()).unwrap();
        let b = render(&s, &RenderConfig::default()).unwrap();
        assert_eq!(a.image.as_raw(), b.image.as_raw());
    }

    #[test]
    fn bars_use_series_colors() {
        let s = spec(ChartType::Grouped, Orientation::Vertical, 3);
        let r = render(&s, &RenderConfig::default()).unwrap();
        for bar in &r.bars {
            let px = r.image.get_pixel(((bar.x0 + bar.x1) / 2) as u32, (bar.y0 + 1) as u32);
            // Annotation glyphs sit at the vertical center, so sample near the edge.
            assert_eq!(*px, series_color(bar.series));
        }
    }
}
