//! Mechanical property protocols: drape stiffness, tensile elasticity and
//! inclined-plane friction, plus the helpers that size plates and fold
//! samples before measuring.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cloth::{ClothError, ClothObject, ReferenceLine};
use crate::mask::{self, BinaryMask, GrayImage, MaskError, SegmentationConfig};
use crate::units;

/// Fraction of the sample that rests on the plate in the drape test.
pub const DEFAULT_COVERAGE_RATIO: f64 = 0.6;
/// Objects with an edge above this are folded before drape and friction tests.
pub const DEFAULT_MAX_EDGE_MM: f64 = 500.0;
/// Tensile load of the elasticity protocol.
pub const STANDARD_LOAD_G: f64 = 500.0;
/// Relative slack on the draped area before it is treated as a bad measurement.
pub const DRAPE_AREA_TOLERANCE: f64 = 0.05;
/// Surface prescribed for the friction protocol.
pub const STANDARD_SURFACE: &str = "standard printing paper";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeasureError {
    #[error("coverage ratio {0} outside (0, 1)")]
    InvalidRatio(f64),
    #[error("invalid length {0} mm")]
    InvalidLength(f64),
    #[error("plate area {plate} mm² is not smaller than cloth area {flat} mm²")]
    DegeneratePlate { flat: f64, plate: f64 },
    #[error("draped area {draped} mm² outside [{low}, {high}]")]
    OutOfRange { draped: f64, low: f64, high: f64 },
    #[error("invalid lengths: rest {rest} mm, loaded {loaded} mm")]
    InvalidLengths { rest: f64, loaded: f64 },
    #[error("line {0} measured more than once")]
    DuplicateLine(ReferenceLine),
    #[error("no elasticity records")]
    NoRecords,
    #[error("slide height {height} mm invalid for surface length {length} mm")]
    SlideAngleInvalid { height: f64, length: f64 },
    #[error(transparent)]
    Cloth(#[from] ClothError),
    #[error(transparent)]
    Mask(#[from] MaskError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlateSpec {
    #[serde(with = "units::mm")]
    pub diameter: f64,
    #[serde(with = "units::ratio")]
    pub coverage_ratio: f64,
}

impl PlateSpec {
    /// Plate sized for a sample whose shortest edge is `shortest_edge` mm.
    pub fn for_edge(shortest_edge: f64, coverage_ratio: f64) -> Result<Self, MeasureError> {
        Ok(PlateSpec {
            diameter: plate_diameter(shortest_edge, coverage_ratio)?,
            coverage_ratio,
        })
    }

    pub fn area(&self) -> f64 {
        PI * (self.diameter / 2.0).powi(2)
    }
}

/// Plate diameter keeping `coverage_ratio` of the shortest edge on the plate.
pub fn plate_diameter(shortest_edge: f64, coverage_ratio: f64) -> Result<f64, MeasureError> {
    if !(coverage_ratio > 0.0 && coverage_ratio < 1.0) {
        return Err(MeasureError::InvalidRatio(coverage_ratio));
    }
    if !(shortest_edge > 0.0 && shortest_edge.is_finite()) {
        return Err(MeasureError::InvalidLength(shortest_edge));
    }
    Ok(coverage_ratio * shortest_edge)
}

/// Rectangle actually placed on the rig after folding.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveRectangle {
    #[serde(with = "units::mm")]
    pub width: f64,
    #[serde(with = "units::mm")]
    pub height: f64,
    pub folds: u32,
}

impl EffectiveRectangle {
    pub fn area(&self) -> f64 {
        self.width * self.height
    }

    pub fn shortest_edge(&self) -> f64 {
        self.width.min(self.height)
    }
}

/// Fold an object into a rectangle with both edges `<= max_edge`.
///
/// Garments use their line 1 x line 2 bounding rectangle. Each fold halves the
/// current longest edge.
pub fn normalize_sample(obj: &ClothObject, max_edge: f64) -> Result<EffectiveRectangle, MeasureError> {
    if !(max_edge > 0.0) {
        return Err(MeasureError::InvalidLength(max_edge));
    }
    let (Some(mut width), Some(mut height)) = (
        obj.dimension(ReferenceLine::Line1),
        obj.dimension(ReferenceLine::Line2),
    ) else {
        return Err(ClothError::NoDimensions.into());
    };
    for edge in [width, height] {
        if !(edge > 0.0 && edge.is_finite()) {
            return Err(MeasureError::InvalidLength(edge));
        }
    }
    let mut folds = 0;
    while width > max_edge || height > max_edge {
        if width >= height {
            width /= 2.0;
        } else {
            height /= 2.0;
        }
        folds += 1;
    }
    Ok(EffectiveRectangle {
        width,
        height,
        folds,
    })
}

/// Areas of the drape test, in mm².
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StiffnessInputs {
    /// Flat cloth area.
    #[serde(with = "units::mm2")]
    pub flat_area: f64,
    #[serde(with = "units::mm2")]
    pub plate_area: f64,
    /// Projected area of the draped cloth seen from above.
    #[serde(with = "units::mm2")]
    pub draped_area: f64,
}

/// Drape stiffness `(draped - plate) / (flat - plate)`: 1 for a cloth that
/// stays flat, 0 for one hanging straight down from the plate edge.
///
/// Draped areas up to 5% outside `[plate, flat]` are clamped; anything further
/// out is rejected as a faulty measurement.
pub fn drape_stiffness(inputs: &StiffnessInputs) -> Result<f64, MeasureError> {
    let StiffnessInputs {
        flat_area,
        plate_area,
        draped_area,
    } = *inputs;
    if !(plate_area > 0.0 && flat_area > plate_area && flat_area.is_finite()) {
        return Err(MeasureError::DegeneratePlate {
            flat: flat_area,
            plate: plate_area,
        });
    }
    let low = plate_area * (1.0 - DRAPE_AREA_TOLERANCE);
    let high = flat_area * (1.0 + DRAPE_AREA_TOLERANCE);
    if !(draped_area >= low && draped_area <= high) {
        return Err(MeasureError::OutOfRange {
            draped: draped_area,
            low,
            high,
        });
    }
    Ok(((draped_area - plate_area) / (flat_area - plate_area)).clamp(0.0, 1.0))
}

/// Source of the flat-cloth area A1.
#[derive(Debug, Clone, Copy)]
pub enum FlatReference<'a> {
    Image(&'a GrayImage),
    /// Known area in mm², e.g. from the effective rectangle.
    Area(f64),
}

/// How image pixels map to millimetres.
#[derive(Debug, Clone)]
pub enum Calibration {
    Scale(f64),
    /// Segmented image of the bare plate; its diameter comes from the plate spec.
    PlateMask(BinaryMask),
}

/// Full image-based drape measurement.
pub fn stiffness_from_images(
    flat: FlatReference<'_>,
    draped: &GrayImage,
    plate: &PlateSpec,
    seg: &SegmentationConfig,
    calibration: Option<&Calibration>,
) -> Result<MeasurementRecord, MeasureError> {
    let scale = match calibration {
        None => return Err(MaskError::MissingScale.into()),
        Some(Calibration::Scale(s)) => *s,
        Some(Calibration::PlateMask(m)) => mask::scale_from_plate(m, plate.diameter)?,
    };
    let area_of = |img: &GrayImage| -> Result<f64, MeasureError> {
        Ok(mask::area_mm2(&mask::segment(img, seg)?.with_scale(scale)?)?)
    };
    let flat_area = match flat {
        FlatReference::Image(img) => area_of(img)?,
        FlatReference::Area(a) => a,
    };
    let inputs = StiffnessInputs {
        flat_area,
        plate_area: plate.area(),
        draped_area: area_of(draped)?,
    };
    let value = drape_stiffness(&inputs)?;
    Ok(MeasurementRecord {
        object_id: None,
        inputs: RawInputs::Stiffness(inputs),
        value,
        timestamp: None,
        notes: ProtocolNotes {
            plate_diameter: Some(plate.diameter),
            mm_per_px: Some(scale),
            ..Default::default()
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ElasticityInputs {
    pub line: ReferenceLine,
    /// Length between the clamps at rest.
    #[serde(with = "units::mm")]
    pub rest_length: f64,
    /// Length between the clamps under load.
    #[serde(with = "units::mm")]
    pub loaded_length: f64,
    #[serde(with = "units::grams")]
    pub load: f64,
}

impl ElasticityInputs {
    /// Inputs under the standard 500 g load.
    pub fn standard(line: ReferenceLine, rest_length: f64, loaded_length: f64) -> Self {
        ElasticityInputs {
            line,
            rest_length,
            loaded_length,
            load: STANDARD_LOAD_G,
        }
    }
}

/// Relative elongation `(loaded - rest) / rest`.
pub fn elasticity(inputs: &ElasticityInputs) -> Result<f64, MeasureError> {
    let (rest, loaded) = (inputs.rest_length, inputs.loaded_length);
    if !(rest > 0.0 && loaded >= rest && loaded.is_finite()) {
        return Err(MeasureError::InvalidLengths { rest, loaded });
    }
    Ok((loaded - rest) / rest)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElasticityProfile {
    pub per_line: Vec<(ReferenceLine, f64)>,
    /// Largest per-line value.
    pub summary: f64,
}

pub fn elasticity_profile(records: &[ElasticityInputs]) -> Result<ElasticityProfile, MeasureError> {
    let mut seen = BTreeSet::new();
    let mut per_line = Vec::with_capacity(records.len());
    for r in records {
        if !seen.insert(r.line) {
            return Err(MeasureError::DuplicateLine(r.line));
        }
        per_line.push((r.line, elasticity(r)?));
    }
    let summary = per_line
        .iter()
        .map(|&(_, v)| v)
        .reduce(f64::max)
        .ok_or(MeasureError::NoRecords)?;
    Ok(ElasticityProfile { per_line, summary })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrictionInputs {
    /// Height of the lifted end when the sample starts to slide.
    #[serde(with = "units::mm")]
    pub height: f64,
    /// Length of the inclined surface.
    #[serde(with = "units::mm")]
    pub length: f64,
}

/// Coefficient of friction `tan(asin(h / l))`, evaluated as `h / sqrt(l² - h²)`.
pub fn friction_coefficient(inputs: &FrictionInputs) -> Result<f64, MeasureError> {
    let FrictionInputs { height, length } = *inputs;
    if !(height >= 0.0 && height < length && length.is_finite()) {
        return Err(MeasureError::SlideAngleInvalid { height, length });
    }
    Ok(height / ((length - height) * (length + height)).sqrt())
}

/// Lift height at which a sample with coefficient `mu` starts sliding on a
/// surface of length `length`.
pub fn critical_height(mu: f64, length: f64) -> f64 {
    length * mu / (1.0 + mu * mu).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PropertyKind {
    Stiffness,
    Elasticity,
    Friction,
}

/// Raw protocol inputs, tagged by property.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "property", rename_all = "snake_case")]
pub enum RawInputs {
    Stiffness(StiffnessInputs),
    Elasticity(ElasticityInputs),
    Friction(FrictionInputs),
}

impl RawInputs {
    pub fn kind(&self) -> PropertyKind {
        match self {
            RawInputs::Stiffness(_) => PropertyKind::Stiffness,
            RawInputs::Elasticity(_) => PropertyKind::Elasticity,
            RawInputs::Friction(_) => PropertyKind::Friction,
        }
    }

    /// Evaluate the property formula on these inputs.
    pub fn derive(&self) -> Result<f64, MeasureError> {
        match self {
            RawInputs::Stiffness(i) => drape_stiffness(i),
            RawInputs::Elasticity(i) => elasticity(i),
            RawInputs::Friction(i) => friction_coefficient(i),
        }
    }
}

/// Protocol metadata stored next to each value.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ProtocolNotes {
    #[serde(with = "units::mm::option", default, skip_serializing_if = "Option::is_none")]
    pub plate_diameter: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mm_per_px: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub folds: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub surface: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
}

/// One measured value together with everything needed to re-derive it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    #[serde(default)]
    pub object_id: Option<String>,
    pub inputs: RawInputs,
    #[serde(with = "units::ratio")]
    pub value: f64,
    #[serde(default)]
    pub timestamp: Option<String>,
    #[serde(default)]
    pub notes: ProtocolNotes,
}

impl MeasurementRecord {
    /// Measure `inputs` and wrap the result in a record.
    pub fn measure(inputs: RawInputs) -> Result<Self, MeasureError> {
        let value = inputs.derive()?;
        let notes = match &inputs {
            RawInputs::Friction(_) => ProtocolNotes {
                surface: Some(STANDARD_SURFACE.to_string()),
                ..Default::default()
            },
            _ => ProtocolNotes::default(),
        };
        Ok(MeasurementRecord {
            object_id: None,
            inputs,
            value,
            timestamp: None,
            notes,
        })
    }

    pub fn kind(&self) -> PropertyKind {
        self.inputs.kind()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cloth::{Dimension, ShapeCategory};
    use crate::mask::{Keep, Polarity};

    fn approx(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn plate_diameter_examples() {
        assert_eq!(plate_diameter(300.0, DEFAULT_COVERAGE_RATIO), Ok(180.0));
        assert_eq!(plate_diameter(300.0, 0.5), Ok(150.0));
        assert_eq!(
            plate_diameter(300.0, 1.2),
            Err(MeasureError::InvalidRatio(1.2))
        );
        assert!(plate_diameter(0.0, 0.6).is_err());
    }

    #[test]
    fn normalize_examples() {
        let napkin = ClothObject::rectangle("n", 300.0, 500.0, 20.0);
        assert_eq!(
            normalize_sample(&napkin, 500.0).unwrap(),
            EffectiveRectangle {
                width: 300.0,
                height: 500.0,
                folds: 0
            }
        );

        // 1400x2000 -> 1400x1000 -> 700x1000 -> 700x500 -> 350x500
        let sheet = ClothObject::rectangle("s", 1400.0, 2000.0, 900.0);
        assert_eq!(
            normalize_sample(&sheet, 500.0).unwrap(),
            EffectiveRectangle {
                width: 350.0,
                height: 500.0,
                folds: 4
            }
        );

        let tee = ClothObject {
            shape: ShapeCategory::TShirt,
            dimensions: vec![
                Dimension {
                    line: ReferenceLine::Line1,
                    length: 450.0,
                },
                Dimension {
                    line: ReferenceLine::Line2,
                    length: 600.0,
                },
            ],
            ..napkin.clone()
        };
        assert_eq!(
            normalize_sample(&tee, 500.0).unwrap(),
            EffectiveRectangle {
                width: 450.0,
                height: 300.0,
                folds: 1
            }
        );

        let bare = ClothObject {
            dimensions: vec![],
            ..napkin
        };
        assert_eq!(
            normalize_sample(&bare, 500.0),
            Err(MeasureError::Cloth(ClothError::NoDimensions))
        );
    }

    #[test]
    fn drape_stiffness_examples() {
        let s = |a1, a2, a3| {
            drape_stiffness(&StiffnessInputs {
                flat_area: a1,
                plate_area: a2,
                draped_area: a3,
            })
        };
        assert_eq!(s(900.0, 324.0, 900.0), Ok(1.0));
        assert_eq!(s(900.0, 324.0, 324.0), Ok(0.0));
        // (612 - 324) / (900 - 324) = 288 / 576
        assert!(approx(s(900.0, 324.0, 612.0).unwrap(), 0.5, 1e-9));
        // Within tolerance: clamped.
        assert_eq!(s(900.0, 324.0, 310.0), Ok(0.0));
        assert_eq!(s(900.0, 324.0, 930.0), Ok(1.0));
        assert!(matches!(
            s(900.0, 324.0, 200.0),
            Err(MeasureError::OutOfRange { .. })
        ));
        assert!(matches!(
            s(900.0, 324.0, 1000.0),
            Err(MeasureError::OutOfRange { .. })
        ));
        assert!(matches!(
            s(300.0, 324.0, 310.0),
            Err(MeasureError::DegeneratePlate { .. })
        ));
    }

    fn disk_image(size: u32, radius: f64) -> GrayImage {
        let c = size as f64 / 2.0;
        GrayImage::from_fn(size, size, |x, y| {
            let d2 = (x as f64 + 0.5 - c).powi(2) + (y as f64 + 0.5 - c).powi(2);
            if d2 <= radius * radius {
                30
            } else {
                220
            }
        })
    }

    #[test]
    fn stiffness_from_synthetic_images() {
        let seg = SegmentationConfig {
            threshold: 128,
            polarity: Polarity::ClothDarker,
            closing_radius: 0,
            keep: Keep::LargestComponent,
        };
        let plate = PlateSpec {
            diameter: 180.0,
            coverage_ratio: 0.6,
        };
        let flat = disk_image(400, 150.0);
        let at_plate = disk_image(400, 90.0);
        let cal = Calibration::Scale(1.0);

        let rec = stiffness_from_images(FlatReference::Image(&flat), &at_plate, &plate, &seg, Some(&cal))
            .unwrap();
        assert!(approx(rec.value, 0.0, 0.02), "{}", rec.value);
        assert_eq!(rec.notes.plate_diameter, Some(180.0));

        let rec = stiffness_from_images(FlatReference::Image(&flat), &flat, &plate, &seg, Some(&cal)).unwrap();
        assert!(approx(rec.value, 1.0, 0.02), "{}", rec.value);

        // Calibrating from an image of the bare plate gives the same answer.
        let plate_mask = mask::segment(&at_plate, &seg).unwrap();
        let rec = stiffness_from_images(
            FlatReference::Image(&flat),
            &flat,
            &plate,
            &seg,
            Some(&Calibration::PlateMask(plate_mask)),
        )
        .unwrap();
        assert!(approx(rec.value, 1.0, 0.02));

        let rec = stiffness_from_images(FlatReference::Area(PI * 150.0 * 150.0), &flat, &plate, &seg, Some(&cal))
            .unwrap();
        assert!(approx(rec.value, 1.0, 0.02));

        assert_eq!(
            stiffness_from_images(FlatReference::Image(&flat), &flat, &plate, &seg, None),
            Err(MeasureError::Mask(MaskError::MissingScale))
        );
    }

    #[test]
    fn elasticity_examples() {
        use ReferenceLine::Line1;
        assert_eq!(elasticity(&ElasticityInputs::standard(Line1, 200.0, 200.0)), Ok(0.0));
        assert!(approx(
            elasticity(&ElasticityInputs::standard(Line1, 100.0, 150.0)).unwrap(),
            0.5,
            1e-9
        ));
        assert!(approx(
            elasticity(&ElasticityInputs::standard(Line1, 100.0, 187.0)).unwrap(),
            0.87,
            1e-9
        ));
        assert!(matches!(
            elasticity(&ElasticityInputs::standard(Line1, 100.0, 90.0)),
            Err(MeasureError::InvalidLengths { .. })
        ));
        assert!(matches!(
            elasticity(&ElasticityInputs::standard(Line1, 0.0, 10.0)),
            Err(MeasureError::InvalidLengths { .. })
        ));
    }

    #[test]
    fn elasticity_profile_examples() {
        use ReferenceLine::*;
        let single = elasticity_profile(&[ElasticityInputs::standard(Line1, 100.0, 130.0)]).unwrap();
        assert!(approx(single.summary, 0.3, 1e-12));

        let two = elasticity_profile(&[
            ElasticityInputs::standard(Line1, 100.0, 110.0),
            ElasticityInputs::standard(Line2, 100.0, 140.0),
        ])
        .unwrap();
        let oracle = two.per_line.iter().map(|p| p.1).fold(f64::MIN, f64::max);
        assert_eq!(two.summary, oracle);
        assert!(approx(two.summary, 0.4, 1e-12));

        assert_eq!(
            elasticity_profile(&[
                ElasticityInputs::standard(Line1, 100.0, 110.0),
                ElasticityInputs::standard(Line1, 100.0, 120.0),
            ]),
            Err(MeasureError::DuplicateLine(Line1))
        );
        assert_eq!(elasticity_profile(&[]), Err(MeasureError::NoRecords));
    }

    #[test]
    fn friction_examples() {
        let mu = |h, l| friction_coefficient(&FrictionInputs { height: h, length: l });
        assert_eq!(mu(0.0, 60.0), Ok(0.0));
        assert!(approx(mu(100.0 / 2f64.sqrt(), 100.0).unwrap(), 1.0, 1e-12));
        // 0.5 / sqrt(0.75)
        assert!(approx(mu(30.0, 60.0).unwrap(), 0.577_350_269_189_625_8, 1e-9));
        assert!(matches!(mu(60.0, 60.0), Err(MeasureError::SlideAngleInvalid { .. })));
        assert!(matches!(mu(-1.0, 60.0), Err(MeasureError::SlideAngleInvalid { .. })));
    }

    #[test]
    fn critical_height_examples() {
        assert_eq!(critical_height(0.0, 100.0), 0.0);
        assert!(approx(critical_height(1.0, 100.0), 100.0 / 2f64.sqrt(), 1e-9));
        assert!(approx(critical_height(1.0 / 3f64.sqrt(), 60.0), 30.0, 1e-9));
    }

    #[test]
    fn record_rederives() {
        let rec = MeasurementRecord::measure(RawInputs::Friction(FrictionInputs {
            height: 30.0,
            length: 60.0,
        }))
        .unwrap();
        assert_eq!(rec.kind(), PropertyKind::Friction);
        assert_eq!(rec.inputs.derive().unwrap(), rec.value);
        assert_eq!(rec.notes.surface.as_deref(), Some(STANDARD_SURFACE));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn stiffness_monotone_in_draped_area(a2 in 1.0f64..1e5, extra in 1.0f64..1e5, t1 in 0.0f64..1.0, t2 in 0.0f64..1.0) {
                let a1 = a2 + extra;
                let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
                let s = |t: f64| drape_stiffness(&StiffnessInputs { flat_area: a1, plate_area: a2, draped_area: a2 + t * extra }).unwrap();
                prop_assert!(s(lo) <= s(hi));
            }

            #[test]
            fn stiffness_scale_invariant(a2 in 1.0f64..1e4, extra in 1.0f64..1e4, t in 0.0f64..1.0, c in 1e-3f64..1e3) {
                let base = StiffnessInputs { flat_area: a2 + extra, plate_area: a2, draped_area: a2 + t * extra };
                let scaled = StiffnessInputs {
                    flat_area: base.flat_area * c,
                    plate_area: base.plate_area * c,
                    draped_area: base.draped_area * c,
                };
                prop_assert!((drape_stiffness(&base).unwrap() - drape_stiffness(&scaled).unwrap()).abs() <= 1e-12);
            }

            #[test]
            fn elasticity_zero_at_rest_and_monotone(li in 0.1f64..1e4, d1 in 0.0f64..1e3, d2 in 0.0f64..1e3) {
                let e = |lf| elasticity(&ElasticityInputs::standard(ReferenceLine::Line1, li, lf)).unwrap();
                prop_assert_eq!(e(li), 0.0);
                let (lo, hi) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
                prop_assert!(e(li + lo) <= e(li + hi));
            }

            #[test]
            fn friction_monotone_in_height(l in 1.0f64..1e4, f1 in 0.0f64..0.999, f2 in 0.0f64..0.999) {
                let mu = |f: f64| friction_coefficient(&FrictionInputs { height: f * l, length: l }).unwrap();
                let (lo, hi) = if f1 <= f2 { (f1, f2) } else { (f2, f1) };
                prop_assert!(mu(lo) <= mu(hi));
            }

            #[test]
            fn friction_round_trip(mu in 0.0f64..10.0, l in 1.0f64..1e4) {
                let h = critical_height(mu, l);
                let back = friction_coefficient(&FrictionInputs { height: h, length: l }).unwrap();
                prop_assert!((back - mu).abs() <= 1e-9);
            }

            #[test]
            fn friction_matches_trigonometric_form(f in 0.0f64..=0.999, l in 1.0f64..1e3) {
                let h = f * l;
                let direct = (h / l).asin().tan();
                let mu = friction_coefficient(&FrictionInputs { height: h, length: l }).unwrap();
                prop_assert!((mu - direct).abs() <= 1e-12 * direct.max(1.0));
            }

            #[test]
            fn normalize_respects_max_edge(w in 1.0f64..5000.0, h in 1.0f64..5000.0, max_edge in 50.0f64..1000.0) {
                let obj = ClothObject::rectangle("x", w, h, 10.0);
                let r = normalize_sample(&obj, max_edge).unwrap();
                prop_assert!(r.width <= max_edge && r.height <= max_edge);
                if w <= max_edge && h <= max_edge {
                    prop_assert_eq!(r.folds, 0);
                    prop_assert_eq!((r.width, r.height), (w, h));
                }
            }
        }
    }
}
