//! Cloth objects, their physical description and measured mechanical properties.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::units;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClothError {
    #[error("object has no recorded dimensions")]
    NoDimensions,
    #[error("unknown {kind} label: {label:?}")]
    UnknownLabel { kind: &'static str, label: String },
}

/// Coarse garment category.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ShapeCategory {
    Rectangular,
    Shirt,
    TShirt,
    Top,
    Pants,
    Skirt,
    Other(String),
}

impl ShapeCategory {
    /// Reference lines that carry meaning for this shape. Rectangles only have
    /// a width (line 1) and a height (line 2).
    pub fn allowed_lines(&self) -> &'static [ReferenceLine] {
        match self {
            ShapeCategory::Rectangular => &[ReferenceLine::Line1, ReferenceLine::Line2],
            _ => &ReferenceLine::ALL,
        }
    }

    pub fn is_rectangular(&self) -> bool {
        matches!(self, ShapeCategory::Rectangular)
    }
}

/// Standardised measuring direction, shared by size and elasticity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ReferenceLine {
    #[serde(rename = "L1")]
    Line1,
    #[serde(rename = "L2")]
    Line2,
    #[serde(rename = "L3")]
    Line3,
    #[serde(rename = "L4")]
    Line4,
}

impl ReferenceLine {
    pub const ALL: [ReferenceLine; 4] = [
        ReferenceLine::Line1,
        ReferenceLine::Line2,
        ReferenceLine::Line3,
        ReferenceLine::Line4,
    ];
}

impl fmt::Display for ReferenceLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = match self {
            ReferenceLine::Line1 => 1,
            ReferenceLine::Line2 => 2,
            ReferenceLine::Line3 => 3,
            ReferenceLine::Line4 => 4,
        };
        write!(f, "L{n}")
    }
}

impl FromStr for ReferenceLine {
    type Err = ClothError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "L1" | "1" | "LINE1" => Ok(ReferenceLine::Line1),
            "L2" | "2" | "LINE2" => Ok(ReferenceLine::Line2),
            "L3" | "3" | "LINE3" => Ok(ReferenceLine::Line3),
            "L4" | "4" | "LINE4" => Ok(ReferenceLine::Line4),
            _ => Err(ClothError::UnknownLabel {
                kind: "reference line",
                label: s.to_string(),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ColorLabel {
    Red,
    Orange,
    Yellow,
    Green,
    Blue,
    Purple,
    White,
    Black,
    Grey,
    Brown,
}

impl ColorLabel {
    pub const ALL: [ColorLabel; 10] = [
        ColorLabel::Red,
        ColorLabel::Orange,
        ColorLabel::Yellow,
        ColorLabel::Green,
        ColorLabel::Blue,
        ColorLabel::Purple,
        ColorLabel::White,
        ColorLabel::Black,
        ColorLabel::Grey,
        ColorLabel::Brown,
    ];
}

impl FromStr for ColorLabel {
    type Err = ClothError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let wanted = s.trim().to_ascii_lowercase();
        let wanted = if wanted == "gray" { "grey".to_string() } else { wanted };
        ColorLabel::ALL
            .into_iter()
            .find(|c| format!("{c:?}").to_ascii_lowercase() == wanted)
            .ok_or_else(|| ClothError::UnknownLabel {
                kind: "color",
                label: s.to_string(),
            })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum MaterialLabel {
    Cotton,
    Linen,
    Silk,
    Wool,
    Polyester,
    Nylon,
    Acrylic,
    Elastane,
    Denim,
    Other(String),
}

impl FromStr for MaterialLabel {
    type Err = ClothError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.trim().to_ascii_lowercase().as_str() {
            "cotton" => MaterialLabel::Cotton,
            "linen" => MaterialLabel::Linen,
            "silk" => MaterialLabel::Silk,
            "wool" => MaterialLabel::Wool,
            "polyester" => MaterialLabel::Polyester,
            "nylon" => MaterialLabel::Nylon,
            "acrylic" => MaterialLabel::Acrylic,
            "elastane" | "spandex" => MaterialLabel::Elastane,
            "denim" => MaterialLabel::Denim,
            _ => MaterialLabel::Other(s.trim().to_string()),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ConstructionTechnique {
    Woven,
    Knitted,
    Other(String),
}

impl FromStr for ConstructionTechnique {
    type Err = ClothError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.trim().to_ascii_lowercase().as_str() {
            "woven" => ConstructionTechnique::Woven,
            "knitted" | "knit" => ConstructionTechnique::Knitted,
            _ => ConstructionTechnique::Other(s.trim().to_string()),
        })
    }
}

impl FromStr for ShapeCategory {
    type Err = ClothError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.trim().to_ascii_lowercase().as_str() {
            "rectangular" | "rectangle" => ShapeCategory::Rectangular,
            "shirt" => ShapeCategory::Shirt,
            "tshirt" | "t-shirt" => ShapeCategory::TShirt,
            "top" => ShapeCategory::Top,
            "pants" => ShapeCategory::Pants,
            "skirt" => ShapeCategory::Skirt,
            _ => ShapeCategory::Other(s.trim().to_string()),
        })
    }
}

/// One recorded size line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Dimension {
    pub line: ReferenceLine,
    #[serde(with = "units::mm")]
    pub length: f64,
}

/// Elasticity measured along one reference line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineElasticity {
    pub line: ReferenceLine,
    #[serde(with = "units::ratio")]
    pub value: f64,
}

/// Measured mechanical properties. Each one is optional because objects are
/// usually measured one protocol at a time.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MechanicalProperties {
    #[serde(with = "units::ratio::option", default)]
    pub stiffness: Option<f64>,
    /// Summary elasticity, the maximum over `elasticity_lines` when present.
    #[serde(with = "units::ratio::option", default)]
    pub elasticity: Option<f64>,
    #[serde(default)]
    pub elasticity_lines: Vec<LineElasticity>,
    #[serde(with = "units::ratio::option", default)]
    pub friction: Option<f64>,
}

impl MechanicalProperties {
    pub fn new(stiffness: f64, elasticity: f64, friction: f64) -> Self {
        MechanicalProperties {
            stiffness: Some(stiffness),
            elasticity: Some(elasticity),
            elasticity_lines: Vec::new(),
            friction: Some(friction),
        }
    }

    /// Replace the per-line elasticity values and recompute the summary.
    pub fn set_elasticity_lines(&mut self, lines: Vec<LineElasticity>) {
        self.elasticity = lines.iter().map(|l| l.value).reduce(f64::max);
        self.elasticity_lines = lines;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClothObject {
    pub id: String,
    pub name: String,
    pub shape: ShapeCategory,
    pub dimensions: Vec<Dimension>,
    /// Weight in grams.
    #[serde(with = "units::grams")]
    pub weight: f64,
    pub colors: BTreeSet<ColorLabel>,
    pub has_print: bool,
    pub materials: BTreeSet<MaterialLabel>,
    pub construction: ConstructionTechnique,
    #[serde(default)]
    pub mechanical: Option<MechanicalProperties>,
}

impl ClothObject {
    /// A rectangular object with width (line 1) and height (line 2) in mm.
    pub fn rectangle(id: &str, width: f64, height: f64, weight: f64) -> Self {
        ClothObject {
            id: id.to_string(),
            name: id.to_string(),
            shape: ShapeCategory::Rectangular,
            dimensions: vec![
                Dimension {
                    line: ReferenceLine::Line1,
                    length: width,
                },
                Dimension {
                    line: ReferenceLine::Line2,
                    length: height,
                },
            ],
            weight,
            colors: BTreeSet::from([ColorLabel::White]),
            has_print: false,
            materials: BTreeSet::from([MaterialLabel::Cotton]),
            construction: ConstructionTechnique::Woven,
            mechanical: None,
        }
    }

    pub fn dimension(&self, line: ReferenceLine) -> Option<f64> {
        self.dimensions.iter().find(|d| d.line == line).map(|d| d.length)
    }

    /// Longest recorded dimension, used as the size of the object.
    pub fn longest_edge(&self) -> Option<f64> {
        self.dimensions.iter().map(|d| d.length).reduce(f64::max)
    }
}

/// Minimum length over the recorded dimension lines, in mm.
pub fn shortest_edge(obj: &ClothObject) -> Result<f64, ClothError> {
    obj.dimensions
        .iter()
        .map(|d| d.length)
        .reduce(f64::min)
        .ok_or(ClothError::NoDimensions)
}

/// Field carrying a free-text `Other` label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LabelField {
    Shape,
    Material,
    Construction,
}

/// A broken invariant of a [`ClothObject`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Violation {
    EmptyId,
    WeightNonPositive,
    DimensionNonPositive(ReferenceLine),
    DuplicateLine(ReferenceLine),
    LineNotAllowedForShape(ReferenceLine),
    NoColors,
    EmptyOtherLabel(LabelField),
    StiffnessOutOfRange,
    ElasticityNegative,
    FrictionNegative,
    SummaryNotMax,
}

/// Collect every invariant violation of `obj`. An empty list means valid.
pub fn validate_object(obj: &ClothObject) -> Vec<Violation> {
    let mut out = Vec::new();
    if obj.id.trim().is_empty() {
        out.push(Violation::EmptyId);
    }
    if !(obj.weight > 0.0) {
        out.push(Violation::WeightNonPositive);
    }

    let allowed = obj.shape.allowed_lines();
    let mut seen = BTreeSet::new();
    for d in &obj.dimensions {
        if !(d.length > 0.0) {
            out.push(Violation::DimensionNonPositive(d.line));
        }
        if !seen.insert(d.line) {
            out.push(Violation::DuplicateLine(d.line));
        }
        if !allowed.contains(&d.line) {
            out.push(Violation::LineNotAllowedForShape(d.line));
        }
    }

    if obj.colors.is_empty() {
        out.push(Violation::NoColors);
    }
    if matches!(&obj.shape, ShapeCategory::Other(s) if s.trim().is_empty()) {
        out.push(Violation::EmptyOtherLabel(LabelField::Shape));
    }
    if obj
        .materials
        .iter()
        .any(|m| matches!(m, MaterialLabel::Other(s) if s.trim().is_empty()))
    {
        out.push(Violation::EmptyOtherLabel(LabelField::Material));
    }
    if matches!(&obj.construction, ConstructionTechnique::Other(s) if s.trim().is_empty()) {
        out.push(Violation::EmptyOtherLabel(LabelField::Construction));
    }

    if let Some(m) = &obj.mechanical {
        if let Some(s) = m.stiffness {
            if !(0.0..=1.0).contains(&s) {
                out.push(Violation::StiffnessOutOfRange);
            }
        }
        let negative_elasticity = m.elasticity.is_some_and(|e| !(e >= 0.0))
            || m.elasticity_lines.iter().any(|l| !(l.value >= 0.0));
        if negative_elasticity {
            out.push(Violation::ElasticityNegative);
        }
        if m.friction.is_some_and(|f| !(f >= 0.0)) {
            out.push(Violation::FrictionNegative);
        }
        let mut lines = BTreeSet::new();
        for l in &m.elasticity_lines {
            if !lines.insert(l.line) {
                out.push(Violation::DuplicateLine(l.line));
            }
        }
        if let Some(max) = m.elasticity_lines.iter().map(|l| l.value).reduce(f64::max) {
            if m.elasticity != Some(max) {
                out.push(Violation::SummaryNotMax);
            }
        }
    }
    out
}

/// A named collection of objects, referenced by id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClothSet {
    pub id: String,
    pub name: String,
    /// Free-text citation of where the set comes from.
    #[serde(default)]
    pub source: String,
    pub members: Vec<String>,
}
