//! Binary masks: thresholding, morphological closing, connected components,
//! pixel areas and pixel-to-millimetre calibration.

use std::collections::VecDeque;
use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MaskError {
    #[error("no cloth detected (empty mask)")]
    NoClothDetected,
    #[error("mask has no mm-per-pixel scale")]
    MissingScale,
    #[error("invalid scale {0} (must be finite and > 0)")]
    InvalidScale(f64),
    #[error("invalid plate diameter {0} mm")]
    InvalidDiameter(f64),
    #[error("pixel buffer of {got} values does not match {width}x{height}")]
    DimensionMismatch { width: u32, height: u32, got: usize },
    #[error("I/O error on {path}: {message}")]
    Io { path: String, message: String },
    #[error("unsupported raster format: {0}")]
    UnsupportedFormat(String),
}

/// 8-bit intensity image, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: u32,
    height: u32,
    pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: u32, height: u32, pixels: Vec<u8>) -> Result<Self, MaskError> {
        if width == 0 || height == 0 || pixels.len() != width as usize * height as usize {
            return Err(MaskError::DimensionMismatch {
                width,
                height,
                got: pixels.len(),
            });
        }
        Ok(GrayImage {
            width,
            height,
            pixels,
        })
    }

    pub fn filled(width: u32, height: u32, value: u8) -> Self {
        GrayImage::new(width, height, vec![value; width as usize * height as usize])
            .expect("non-empty image")
    }

    pub fn from_fn(width: u32, height: u32, f: impl Fn(u32, u32) -> u8) -> Self {
        let pixels = (0..height)
            .flat_map(|y| (0..width).map(move |x| (x, y)))
            .map(|(x, y)| f(x, y))
            .collect();
        GrayImage::new(width, height, pixels).expect("non-empty image")
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

    pub fn get(&self, x: u32, y: u32) -> u8 {
        self.pixels[(y * self.width + x) as usize]
    }
}

/// Boolean pixel grid, optionally calibrated in millimetres per pixel.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryMask {
    width: u32,
    height: u32,
    bits: Vec<bool>,
    scale: Option<f64>,
}

impl BinaryMask {
    pub fn new(width: u32, height: u32, bits: Vec<bool>) -> Result<Self, MaskError> {
        if bits.len() != width as usize * height as usize {
            return Err(MaskError::DimensionMismatch {
                width,
                height,
                got: bits.len(),
            });
        }
        Ok(BinaryMask {
            width,
            height,
            bits,
            scale: None,
        })
    }

    pub fn empty(width: u32, height: u32) -> Self {
        BinaryMask {
            width,
            height,
            bits: vec![false; width as usize * height as usize],
            scale: None,
        }
    }

    pub fn from_fn(width: u32, height: u32, f: impl Fn(u32, u32) -> bool) -> Self {
        let bits = (0..height)
            .flat_map(|y| (0..width).map(move |x| (x, y)))
            .map(|(x, y)| f(x, y))
            .collect();
        BinaryMask {
            width,
            height,
            bits,
            scale: None,
        }
    }

    /// Attach a mm-per-pixel scale.
    pub fn with_scale(mut self, mm_per_px: f64) -> Result<Self, MaskError> {
        if !(mm_per_px.is_finite() && mm_per_px > 0.0) {
            return Err(MaskError::InvalidScale(mm_per_px));
        }
        self.scale = Some(mm_per_px);
        Ok(self)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn scale(&self) -> Option<f64> {
        self.scale
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, x: u32, y: u32) -> bool {
        self.bits[(y * self.width + x) as usize]
    }

    pub fn set(&mut self, x: u32, y: u32, value: bool) {
        self.bits[(y * self.width + x) as usize] = value;
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    /// Pixels set in `self` but not in `other`. Both masks must share a frame.
    pub fn difference(&self, other: &BinaryMask) -> Result<BinaryMask, MaskError> {
        if (self.width, self.height) != (other.width, other.height) {
            return Err(MaskError::DimensionMismatch {
                width: self.width,
                height: self.height,
                got: other.bits.len(),
            });
        }
        Ok(BinaryMask {
            bits: self
                .bits
                .iter()
                .zip(&other.bits)
                .map(|(&a, &b)| a && !b)
                .collect(),
            ..self.clone()
        })
    }
}

/// Which side of the threshold the cloth lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Polarity {
    /// Cloth pixels have intensity `< threshold`.
    ClothDarker,
    /// Cloth pixels have intensity `> threshold`.
    ClothBrighter,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Keep {
    LargestComponent,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmentationConfig {
    pub threshold: u8,
    pub polarity: Polarity,
    pub closing_radius: u32,
    pub keep: Keep,
}

impl Default for SegmentationConfig {
    fn default() -> Self {
        SegmentationConfig {
            threshold: 128,
            polarity: Polarity::ClothDarker,
            closing_radius: 0,
            keep: Keep::LargestComponent,
        }
    }
}

/// Threshold, close and optionally keep the largest 4-connected blob.
pub fn segment(image: &GrayImage, config: &SegmentationConfig) -> Result<BinaryMask, MaskError> {
    let t = config.threshold;
    let bits = image
        .pixels
        .iter()
        .map(|&v| match config.polarity {
            Polarity::ClothDarker => v < t,
            Polarity::ClothBrighter => v > t,
        })
        .collect();
    let mut mask = BinaryMask {
        width: image.width,
        height: image.height,
        bits,
        scale: None,
    };
    if config.closing_radius > 0 {
        mask = close(&mask, config.closing_radius);
    }
    if config.keep == Keep::LargestComponent {
        mask = largest_component(&mask);
    }
    if mask.is_empty() {
        return Err(MaskError::NoClothDetected);
    }
    Ok(mask)
}

fn disk_offsets(radius: u32) -> Vec<(i64, i64)> {
    let r = radius as i64;
    let mut out = Vec::new();
    for dy in -r..=r {
        for dx in -r..=r {
            if dx * dx + dy * dy <= r * r {
                out.push((dx, dy));
            }
        }
    }
    out
}

// Out-of-frame pixels are ignored, so closing never erodes blobs touching the border.
fn morph(mask: &BinaryMask, offsets: &[(i64, i64)], dilate: bool) -> BinaryMask {
    let (w, h) = (mask.width as i64, mask.height as i64);
    let mut out = mask.clone();
    for y in 0..h {
        for x in 0..w {
            let mut hit = !dilate;
            for &(dx, dy) in offsets {
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || ny < 0 || nx >= w || ny >= h {
                    continue;
                }
                let v = mask.bits[(ny * w + nx) as usize];
                if dilate && v {
                    hit = true;
                    break;
                }
                if !dilate && !v {
                    hit = false;
                    break;
                }
            }
            out.bits[(y * w + x) as usize] = hit;
        }
    }
    out
}

/// Morphological closing (dilation then erosion) with a disk of `radius` pixels.
pub fn close(mask: &BinaryMask, radius: u32) -> BinaryMask {
    let offsets = disk_offsets(radius);
    morph(&morph(mask, &offsets, true), &offsets, false)
}

/// Label 4-connected components. Returns one label per pixel (0 = background)
/// and the size of each component, indexed by `label - 1`.
pub fn label_components(mask: &BinaryMask) -> (Vec<u32>, Vec<usize>) {
    let (w, h) = (mask.width as usize, mask.height as usize);
    let mut labels = vec![0u32; w * h];
    let mut sizes = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..w * h {
        if !mask.bits[start] || labels[start] != 0 {
            continue;
        }
        let label = sizes.len() as u32 + 1;
        let mut size = 0;
        labels[start] = label;
        queue.push_back(start);
        while let Some(i) = queue.pop_front() {
            size += 1;
            let (x, y) = (i % w, i / w);
            let mut visit = |j: usize| {
                if mask.bits[j] && labels[j] == 0 {
                    labels[j] = label;
                    queue.push_back(j);
                }
            };
            if x > 0 {
                visit(i - 1);
            }
            if x + 1 < w {
                visit(i + 1);
            }
            if y > 0 {
                visit(i - w);
            }
            if y + 1 < h {
                visit(i + w);
            }
        }
        sizes.push(size);
    }
    (labels, sizes)
}

/// Keep only the largest 4-connected component. Ties go to the component
/// found first in raster order.
pub fn largest_component(mask: &BinaryMask) -> BinaryMask {
    let (labels, sizes) = label_components(mask);
    let mut best = 0u32;
    let mut best_size = 0;
    for (i, &s) in sizes.iter().enumerate() {
        if s > best_size {
            best_size = s;
            best = i as u32 + 1;
        }
    }
    BinaryMask {
        bits: labels.iter().map(|&l| l != 0 && l == best).collect(),
        ..mask.clone()
    }
}

/// Number of set pixels.
pub fn area_px(mask: &BinaryMask) -> u64 {
    mask.bits.iter().filter(|&&b| b).count() as u64
}

/// Area in mm², `area_px * scale²`.
pub fn area_mm2(mask: &BinaryMask) -> Result<f64, MaskError> {
    let scale = mask.scale.ok_or(MaskError::MissingScale)?;
    Ok(area_px(mask) as f64 * scale * scale)
}

/// Millimetres per pixel from a segmented plate of known diameter, using the
/// diameter of the circle with the same pixel area.
pub fn scale_from_plate(plate_mask: &BinaryMask, plate_diameter: f64) -> Result<f64, MaskError> {
    if !(plate_diameter.is_finite() && plate_diameter > 0.0) {
        return Err(MaskError::InvalidDiameter(plate_diameter));
    }
    let px = area_px(plate_mask);
    if px == 0 {
        return Err(MaskError::NoClothDetected);
    }
    let diameter_px = 2.0 * (px as f64 / PI).sqrt();
    Ok(plate_diameter / diameter_px)
}

/// Rec.601 luma with integer weights, rounded to nearest.
pub fn luma601(r: u8, g: u8, b: u8) -> u8 {
    ((299 * r as u32 + 587 * g as u32 + 114 * b as u32 + 500) / 1000) as u8
}

fn map_image_error(path: &Path, err: image::ImageError) -> MaskError {
    match err {
        image::ImageError::Unsupported(e) => MaskError::UnsupportedFormat(e.to_string()),
        other => MaskError::Io {
            path: path.display().to_string(),
            message: other.to_string(),
        },
    }
}

/// Load a raster as grayscale. Colour images are reduced with [`luma601`];
/// alpha is ignored.
pub fn load_image(path: impl AsRef<Path>) -> Result<GrayImage, MaskError> {
    let path = path.as_ref();
    let reader = image::ImageReader::open(path)
        .map_err(|e| MaskError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?
        .with_guessed_format()
        .map_err(|e| MaskError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
    if reader.format().is_none() {
        return Err(MaskError::UnsupportedFormat(path.display().to_string()));
    }
    let img = reader.decode().map_err(|e| map_image_error(path, e))?;
    let (width, height) = (img.width(), img.height());
    let pixels = match img {
        image::DynamicImage::ImageLuma8(buf) => buf.into_raw(),
        other if !other.color().has_color() => other.to_luma8().into_raw(),
        other => other
            .to_rgb8()
            .pixels()
            .map(|p| luma601(p[0], p[1], p[2]))
            .collect(),
    };
    GrayImage::new(width, height, pixels)
}

/// Load a mask raster: any nonzero pixel is cloth.
pub fn load_mask(path: impl AsRef<Path>) -> Result<BinaryMask, MaskError> {
    let img = load_image(path)?;
    Ok(BinaryMask {
        width: img.width,
        height: img.height,
        bits: img.pixels.iter().map(|&v| v != 0).collect(),
        scale: None,
    })
}

fn save_luma(path: &Path, width: u32, height: u32, pixels: Vec<u8>) -> Result<(), MaskError> {
    image::GrayImage::from_raw(width, height, pixels)
        .expect("buffer size checked by constructor")
        .save_with_format(path, image::ImageFormat::Png)
        .map_err(|e| map_image_error(path, e))
}

/// Write an 8-bit grayscale PNG.
pub fn save_image(image: &GrayImage, path: impl AsRef<Path>) -> Result<(), MaskError> {
    save_luma(path.as_ref(), image.width, image.height, image.pixels.clone())
}

/// Write a mask as a PNG with cloth = 255.
pub fn save_mask(mask: &BinaryMask, path: impl AsRef<Path>) -> Result<(), MaskError> {
    let pixels = mask.bits.iter().map(|&b| if b { 255 } else { 0 }).collect();
    save_luma(path.as_ref(), mask.width, mask.height, pixels)
}
