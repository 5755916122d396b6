//! Cloth-set benchmarking: per-property variability of a set, radar charts
//! comparing several sets, and a tabular comparison.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cloth::{ClothObject, ClothSet};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RadarError {
    #[error("set is empty")]
    EmptySet,
    #[error("no member of the set has a value for {0}")]
    AllMembersMissingProperty(PropertyAxis),
    #[error("profiles do not share the same axes")]
    AxisMismatch,
    #[error("need at least {0} profiles")]
    TooFewProfiles(usize),
    #[error("csv: {0}")]
    Csv(String),
}

/// Radar axes, in drawing order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PropertyAxis {
    Size,
    Weight,
    Shapes,
    Colors,
    Materials,
    Stiffness,
    Elasticity,
    Friction,
}

impl PropertyAxis {
    pub const ALL: [PropertyAxis; 8] = [
        PropertyAxis::Size,
        PropertyAxis::Weight,
        PropertyAxis::Shapes,
        PropertyAxis::Colors,
        PropertyAxis::Materials,
        PropertyAxis::Stiffness,
        PropertyAxis::Elasticity,
        PropertyAxis::Friction,
    ];

    pub fn label(self) -> &'static str {
        match self {
            PropertyAxis::Size => "Size",
            PropertyAxis::Weight => "Weight",
            PropertyAxis::Shapes => "Shapes",
            PropertyAxis::Colors => "Colors",
            PropertyAxis::Materials => "Materials",
            PropertyAxis::Stiffness => "Stiffness",
            PropertyAxis::Elasticity => "Elasticity",
            PropertyAxis::Friction => "Friction",
        }
    }

    pub fn unit(self) -> &'static str {
        match self {
            PropertyAxis::Size => "mm",
            PropertyAxis::Weight => "g",
            PropertyAxis::Shapes | PropertyAxis::Colors | PropertyAxis::Materials => "count",
            PropertyAxis::Stiffness | PropertyAxis::Elasticity | PropertyAxis::Friction => "%",
        }
    }

    pub fn is_categorical(self) -> bool {
        matches!(
            self,
            PropertyAxis::Shapes | PropertyAxis::Colors | PropertyAxis::Materials
        )
    }

    /// Numeric value of `obj` on this axis. Ratios are reported in percent.
    fn numeric(self, obj: &ClothObject) -> Option<f64> {
        let mech = obj.mechanical.as_ref();
        match self {
            PropertyAxis::Size => obj.longest_edge(),
            PropertyAxis::Weight => Some(obj.weight),
            PropertyAxis::Stiffness => mech.and_then(|m| m.stiffness).map(|v| v * 100.0),
            PropertyAxis::Elasticity => mech.and_then(|m| m.elasticity).map(|v| v * 100.0),
            PropertyAxis::Friction => mech.and_then(|m| m.friction).map(|v| v * 100.0),
            _ => None,
        }
    }
}

impl fmt::Display for PropertyAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Variability of one property across a set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AxisValue {
    Range { min: f64, max: f64, range: f64 },
    /// Number of distinct categories.
    Count { count: usize },
    /// No member carries this property.
    Missing,
}

impl AxisValue {
    /// Length along the radar axis before normalisation.
    pub fn magnitude(&self) -> f64 {
        match *self {
            AxisValue::Range { range, .. } => range,
            AxisValue::Count { count } => count as f64,
            AxisValue::Missing => 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyRange {
    pub value: AxisValue,
    /// Ids of members skipped for lacking the property.
    pub skipped: Vec<String>,
}

/// Range (numeric axes) or distinct-category count (categorical axes) of a
/// property over `members`.
pub fn property_range(members: &[ClothObject], axis: PropertyAxis) -> Result<PropertyRange, RadarError> {
    if members.is_empty() {
        return Err(RadarError::EmptySet);
    }
    if axis.is_categorical() {
        let count = match axis {
            PropertyAxis::Shapes => members.iter().map(|m| &m.shape).collect::<BTreeSet<_>>().len(),
            PropertyAxis::Colors => members.iter().flat_map(|m| &m.colors).collect::<BTreeSet<_>>().len(),
            _ => members
                .iter()
                .flat_map(|m| &m.materials)
                .collect::<BTreeSet<_>>()
                .len(),
        };
        return Ok(PropertyRange {
            value: AxisValue::Count { count },
            skipped: Vec::new(),
        });
    }

    let mut skipped = Vec::new();
    let mut bounds: Option<(f64, f64)> = None;
    for m in members {
        match axis.numeric(m) {
            Some(v) => {
                bounds = Some(match bounds {
                    None => (v, v),
                    Some((lo, hi)) => (lo.min(v), hi.max(v)),
                })
            }
            None => skipped.push(m.id.clone()),
        }
    }
    let (min, max) = bounds.ok_or(RadarError::AllMembersMissingProperty(axis))?;
    if !skipped.is_empty() {
        log::warn!("{axis}: skipped {} member(s) without a value", skipped.len());
    }
    Ok(PropertyRange {
        value: AxisValue::Range {
            min,
            max,
            range: max - min,
        },
        skipped,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisEntry {
    pub axis: PropertyAxis,
    pub unit: String,
    pub value: AxisValue,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadarProfile {
    pub set_id: String,
    pub set_name: String,
    pub axes: Vec<AxisEntry>,
    #[serde(default)]
    pub warnings: Vec<String>,
}

impl RadarProfile {
    pub fn value(&self, axis: PropertyAxis) -> Option<&AxisValue> {
        self.axes.iter().find(|e| e.axis == axis).map(|e| &e.value)
    }

    fn axis_list(&self) -> Vec<PropertyAxis> {
        self.axes.iter().map(|e| e.axis).collect()
    }
}

/// Evaluate every axis for a set whose members have been resolved to objects.
pub fn radar_profile(set: &ClothSet, members: &[ClothObject]) -> Result<RadarProfile, RadarError> {
    if members.is_empty() {
        return Err(RadarError::EmptySet);
    }
    let mut axes = Vec::with_capacity(PropertyAxis::ALL.len());
    let mut warnings = Vec::new();
    for axis in PropertyAxis::ALL {
        let value = match property_range(members, axis) {
            Ok(r) => {
                if !r.skipped.is_empty() {
                    warnings.push(format!("{axis}: skipped {}", r.skipped.join(", ")));
                }
                r.value
            }
            Err(RadarError::AllMembersMissingProperty(_)) => {
                warnings.push(format!("{axis}: no member measured"));
                AxisValue::Missing
            }
            Err(e) => return Err(e),
        };
        axes.push(AxisEntry {
            axis,
            unit: axis.unit().to_string(),
            value,
        });
    }
    Ok(RadarProfile {
        set_id: set.id.clone(),
        set_name: set.name.clone(),
        axes,
        warnings,
    })
}

fn shared_axes(profiles: &[RadarProfile]) -> Result<Vec<PropertyAxis>, RadarError> {
    let first = profiles.first().ok_or(RadarError::TooFewProfiles(1))?.axis_list();
    if first.is_empty() || profiles.iter().any(|p| p.axis_list() != first) {
        return Err(RadarError::AxisMismatch);
    }
    Ok(first)
}

/// Normalised vertex radii: `radii[p][a]` is profile `p` on axis `a`, divided
/// by the largest value on that axis over all profiles (0 when all are 0).
pub fn radar_radii(profiles: &[RadarProfile]) -> Result<Vec<Vec<f64>>, RadarError> {
    let axes = shared_axes(profiles)?;
    let maxima: Vec<f64> = (0..axes.len())
        .map(|a| {
            profiles
                .iter()
                .map(|p| p.axes[a].value.magnitude())
                .fold(0.0, f64::max)
        })
        .collect();
    Ok(profiles
        .iter()
        .map(|p| {
            p.axes
                .iter()
                .zip(&maxima)
                .map(|(e, &max)| if max > 0.0 { e.value.magnitude() / max } else { 0.0 })
                .collect()
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenderOptions {
    /// Width and height of the square canvas, in px.
    pub size: u32,
    pub title: Option<String>,
    /// Stroke/fill colours cycled over profiles.
    pub palette: Vec<String>,
    /// Number of concentric guide rings.
    pub rings: u32,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions {
            size: 520,
            title: None,
            palette: ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"]
                .map(String::from)
                .to_vec(),
            rings: 4,
        }
    }
}

fn num(v: f64) -> String {
    let s = format!("{v:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

fn axis_max_label(profiles: &[RadarProfile], a: usize) -> String {
    let max = profiles
        .iter()
        .map(|p| p.axes[a].value.magnitude())
        .fold(0.0, f64::max);
    let unit = &profiles[0].axes[a].unit;
    if unit == "count" {
        format!("{max:.0}")
    } else {
        format!("{} {unit}", num(max))
    }
}

/// Render the profiles as an SVG 1.1 radar chart with one closed polygon per
/// profile. Output is byte-for-byte deterministic.
pub fn render_radar(profiles: &[RadarProfile], style: &RenderOptions) -> Result<String, RadarError> {
    let radii = radar_radii(profiles)?;
    let axes = shared_axes(profiles)?;
    let n = axes.len();
    let size = style.size as f64;
    let legend_h = 20.0 * profiles.len() as f64 + 10.0;
    let top = if style.title.is_some() { 40.0 } else { 10.0 };
    let height = size + top + legend_h;
    let (cx, cy) = (size / 2.0, top + size / 2.0);
    let r = size * 0.32;
    let angle = |i: usize| -PI / 2.0 + 2.0 * PI * i as f64 / n as f64;
    let point = |i: usize, rho: f64| (cx + r * rho * angle(i).cos(), cy + r * rho * angle(i).sin());
    let polygon = |rho: &dyn Fn(usize) -> f64| {
        (0..n)
            .map(|i| {
                let (x, y) = point(i, rho(i));
                format!("{},{}", num(x), num(y))
            })
            .collect::<Vec<_>>()
            .join(" ")
    };

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#,
        w = num(size),
        h = num(height)
    );
    let _ = writeln!(
        svg,
        r##"<rect x="0" y="0" width="{}" height="{}" fill="#ffffff"/>"##,
        num(size),
        num(height)
    );
    if let Some(title) = &style.title {
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="24" text-anchor="middle" font-size="16">{}</text>"#,
            num(cx),
            escape(title)
        );
    }

    let _ = writeln!(svg, r##"<g class="grid" fill="none" stroke="#cccccc">"##);
    for k in 1..=style.rings.max(1) {
        let rho = k as f64 / style.rings.max(1) as f64;
        let _ = writeln!(svg, r#"<polygon points="{}"/>"#, polygon(&|_| rho));
    }
    for i in 0..n {
        let (x, y) = point(i, 1.0);
        let _ = writeln!(
            svg,
            r#"<line x1="{}" y1="{}" x2="{}" y2="{}"/>"#,
            num(cx),
            num(cy),
            num(x),
            num(y)
        );
    }
    let _ = writeln!(svg, "</g>");

    let _ = writeln!(svg, r##"<g class="labels" fill="#333333">"##);
    for (i, axis) in axes.iter().enumerate() {
        let (x, y) = point(i, 1.18);
        let c = angle(i).cos();
        let anchor = if c > 0.2 {
            "start"
        } else if c < -0.2 {
            "end"
        } else {
            "middle"
        };
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="{anchor}">{}<tspan x="{}" dy="14" font-size="10">{}</tspan></text>"#,
            num(x),
            num(y),
            escape(axis.label()),
            num(x),
            escape(&axis_max_label(profiles, i))
        );
    }
    let _ = writeln!(svg, "</g>");

    for (p, (profile, rad)) in profiles.iter().zip(&radii).enumerate() {
        let color = style
            .palette
            .get(p % style.palette.len().max(1))
            .cloned()
            .unwrap_or_else(|| "#000000".into());
        let _ = writeln!(
            svg,
            r#"<polygon class="profile" data-set="{}" points="{}" fill="{color}" fill-opacity="0.2" stroke="{color}" stroke-width="2"/>"#,
            escape(&profile.set_id),
            polygon(&|i| rad[i])
        );
    }

    let _ = writeln!(svg, r#"<g class="legend">"#);
    for (p, profile) in profiles.iter().enumerate() {
        let color = style
            .palette
            .get(p % style.palette.len().max(1))
            .cloned()
            .unwrap_or_else(|| "#000000".into());
        let y = top + size + 20.0 * p as f64;
        let _ = writeln!(
            svg,
            r#"<rect x="20" y="{}" width="12" height="12" fill="{color}"/><text x="38" y="{}">{}</text>"#,
            num(y),
            num(y + 11.0),
            escape(&profile.set_name)
        );
    }
    let _ = writeln!(svg, "</g>");
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Best set on an axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Winner {
    Set(String),
    Tie(Vec<String>),
}

impl fmt::Display for Winner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Winner::Set(id) => f.write_str(id),
            Winner::Tie(ids) => write!(f, "tie({})", ids.join("|")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub axis: PropertyAxis,
    pub unit: String,
    /// Range or count per profile; `None` where the axis is missing.
    pub values: Vec<Option<f64>>,
    pub winner: Winner,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub set_ids: Vec<String>,
    pub rows: Vec<ComparisonRow>,
}

impl Comparison {
    pub fn row(&self, axis: PropertyAxis) -> Option<&ComparisonRow> {
        self.rows.iter().find(|r| r.axis == axis)
    }

    /// RFC 4180 CSV with a header row.
    pub fn to_csv(&self) -> Result<String, RadarError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["axis".to_string(), "unit".to_string()];
        header.extend(self.set_ids.iter().cloned());
        header.push("winner".into());
        w.write_record(&header).map_err(|e| RadarError::Csv(e.to_string()))?;
        for row in &self.rows {
            let mut rec = vec![row.axis.label().to_string(), row.unit.clone()];
            rec.extend(row.values.iter().map(|v| v.map(num).unwrap_or_else(|| "NA".into())));
            rec.push(row.winner.to_string());
            w.write_record(&rec).map_err(|e| RadarError::Csv(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| RadarError::Csv(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:<12}{:>7}", "axis", "unit")?;
        for id in &self.set_ids {
            write!(f, "{id:>12}")?;
        }
        writeln!(f, "  winner")?;
        for row in &self.rows {
            write!(f, "{:<12}{:>7}", row.axis.label(), row.unit)?;
            for v in &row.values {
                write!(f, "{:>12}", v.map(num).unwrap_or_else(|| "NA".into()))?;
            }
            writeln!(f, "  {}", row.winner)?;
        }
        Ok(())
    }
}

/// Which set shows the most variability on each axis.
pub fn compare_report(profiles: &[RadarProfile]) -> Result<Comparison, RadarError> {
    if profiles.len() < 2 {
        return Err(RadarError::TooFewProfiles(2));
    }
    let axes = shared_axes(profiles)?;
    let rows = axes
        .iter()
        .enumerate()
        .map(|(a, &axis)| {
            let values: Vec<Option<f64>> = profiles
                .iter()
                .map(|p| match p.axes[a].value {
                    AxisValue::Missing => None,
                    v => Some(v.magnitude()),
                })
                .collect();
            let best = values.iter().flatten().copied().fold(f64::NEG_INFINITY, f64::max);
            let leaders: Vec<String> = profiles
                .iter()
                .zip(&values)
                .filter(|(_, v)| **v == Some(best))
                .map(|(p, _)| p.set_id.clone())
                .collect();
            let winner = match leaders.len() {
                1 => Winner::Set(leaders[0].clone()),
                _ => Winner::Tie(leaders),
            };
            ComparisonRow {
                axis,
                unit: profiles[0].axes[a].unit.clone(),
                values,
                winner,
            }
        })
        .collect();
    Ok(Comparison {
        set_ids: profiles.iter().map(|p| p.set_id.clone()).collect(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cloth::{MaterialLabel, MechanicalProperties};

    fn sample(id: &str, s: f64, e: f64, f: f64) -> ClothObject {
        let mut o = ClothObject::rectangle(id, 300.0, 300.0, 10.0);
        o.mechanical = Some(MechanicalProperties::new(s, e, f));
        o
    }

    fn set(id: &str, members: &[ClothObject]) -> ClothSet {
        ClothSet {
            id: id.into(),
            name: id.into(),
            source: String::new(),
            members: members.iter().map(|m| m.id.clone()).collect(),
        }
    }

    fn range_of(members: &[ClothObject], axis: PropertyAxis) -> f64 {
        property_range(members, axis).unwrap().value.magnitude()
    }

    #[test]
    fn single_member_has_zero_range() {
        assert_eq!(range_of(&[sample("a", 0.5, 0.2, 0.3)], PropertyAxis::Stiffness), 0.0);
    }

    #[test]
    fn stiffness_and_elasticity_ranges() {
        let stiff = [0.85, 0.34, 0.36, 0.39, 0.59, 0.32];
        let elas = [0.43, 0.07, 0.87, 0.35, 1.00, 0.64];
        let members: Vec<_> = stiff
            .iter()
            .zip(&elas)
            .enumerate()
            .map(|(i, (&s, &e))| sample(&i.to_string(), s, e, 0.5))
            .collect();
        assert!((range_of(&members, PropertyAxis::Stiffness) - 53.0).abs() < 1e-9);
        assert!((range_of(&members, PropertyAxis::Elasticity) - 93.0).abs() < 1e-9);
        assert_eq!(range_of(&members, PropertyAxis::Friction), 0.0);
    }

    #[test]
    fn categorical_axes_count_distinct_labels() {
        let mut a = sample("a", 0.5, 0.5, 0.5);
        let mut b = sample("b", 0.5, 0.5, 0.5);
        a.materials.insert(MaterialLabel::Silk);
        b.materials.insert(MaterialLabel::Other("bamboo".into()));
        b.shape = crate::cloth::ShapeCategory::Skirt;
        let members = [a, b];
        assert_eq!(range_of(&members, PropertyAxis::Materials), 3.0);
        assert_eq!(range_of(&members, PropertyAxis::Shapes), 2.0);
        assert_eq!(range_of(&members, PropertyAxis::Colors), 1.0);
    }

    #[test]
    fn missing_mechanical_values_are_skipped() {
        let mut bare = ClothObject::rectangle("bare", 100.0, 900.0, 40.0);
        bare.mechanical = None;
        let members = [sample("a", 0.2, 0.1, 0.1), sample("b", 0.6, 0.1, 0.1), bare.clone()];
        let r = property_range(&members, PropertyAxis::Stiffness).unwrap();
        assert_eq!(r.skipped, vec!["bare".to_string()]);
        assert!((r.value.magnitude() - 40.0).abs() < 1e-9);
        assert_eq!(range_of(&members, PropertyAxis::Size), 600.0);
        assert_eq!(range_of(&members, PropertyAxis::Weight), 30.0);

        assert_eq!(
            property_range(&[bare.clone()], PropertyAxis::Friction),
            Err(RadarError::AllMembersMissingProperty(PropertyAxis::Friction))
        );
        let profile = radar_profile(&set("s", &[bare.clone()]), &[bare]).unwrap();
        assert_eq!(profile.value(PropertyAxis::Friction), Some(&AxisValue::Missing));
        assert!(!profile.warnings.is_empty());
    }

    #[test]
    fn empty_set_errors() {
        assert_eq!(property_range(&[], PropertyAxis::Size), Err(RadarError::EmptySet));
        assert_eq!(radar_profile(&set("e", &[]), &[]), Err(RadarError::EmptySet));
    }

    #[test]
    fn duplicates_give_zero_ranges_and_unit_counts() {
        let m = [sample("a", 0.4, 0.3, 0.2), sample("b", 0.4, 0.3, 0.2)];
        let p = radar_profile(&set("d", &m), &m).unwrap();
        for e in &p.axes {
            match e.value {
                AxisValue::Range { range, .. } => assert_eq!(range, 0.0),
                AxisValue::Count { count } => assert_eq!(count, 1),
                AxisValue::Missing => panic!("nothing is missing"),
            }
        }
    }

    #[test]
    fn equal_ranges_make_a_regular_polygon() {
        let profile = RadarProfile {
            set_id: "r".into(),
            set_name: "r".into(),
            axes: PropertyAxis::ALL
                .iter()
                .map(|&axis| AxisEntry {
                    axis,
                    unit: axis.unit().into(),
                    value: AxisValue::Range {
                        min: 0.0,
                        max: 7.0,
                        range: 7.0,
                    },
                })
                .collect(),
            warnings: vec![],
        };
        assert_eq!(radar_radii(&[profile.clone()]).unwrap(), vec![vec![1.0; 8]]);
        let svg = render_radar(&[profile], &RenderOptions::default()).unwrap();
        assert_eq!(svg.matches(r#"class="profile""#).count(), 1);
    }

    #[test]
    fn mismatched_axes_rejected() {
        let m = [sample("a", 0.4, 0.3, 0.2)];
        let full = radar_profile(&set("a", &m), &m).unwrap();
        let mut partial = full.clone();
        partial.set_id = "b".into();
        partial.axes.truncate(3);
        assert_eq!(
            compare_report(&[full.clone(), partial.clone()]),
            Err(RadarError::AxisMismatch)
        );
        assert_eq!(
            render_radar(&[full.clone(), partial], &RenderOptions::default()),
            Err(RadarError::AxisMismatch)
        );
        assert_eq!(compare_report(&[full]), Err(RadarError::TooFewProfiles(2)));
    }

    #[test]
    fn identical_profiles_tie_everywhere() {
        let m = [sample("a", 0.4, 0.3, 0.2), sample("b", 0.1, 0.3, 0.9)];
        let p = radar_profile(&set("x", &m), &m).unwrap();
        let mut q = p.clone();
        q.set_id = "y".into();
        let report = compare_report(&[p, q]).unwrap();
        assert!(report
            .rows
            .iter()
            .all(|r| r.winner == Winner::Tie(vec!["x".into(), "y".into()])));
        let csv = report.to_csv().unwrap();
        assert!(csv.starts_with("axis,unit,x,y,winner\n"));
        assert_eq!(csv.lines().count(), 9);
    }

    #[test]
    fn svg_text_is_escaped() {
        let m = [sample("a", 0.4, 0.3, 0.2)];
        let mut s = set("a", &m);
        s.name = "Towels & <co>".into();
        let p = radar_profile(&s, &m).unwrap();
        let svg = render_radar(&[p], &RenderOptions::default()).unwrap();
        assert!(svg.contains("Towels &amp; &lt;co&gt;"));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn members_from(values: &[f64]) -> Vec<ClothObject> {
            values
                .iter()
                .enumerate()
                .map(|(i, &v)| sample(&format!("m{i}"), v, v, v))
                .collect()
        }

        proptest! {
            #[test]
            fn range_permutation_invariant(mut values in prop::collection::vec(0.0f64..1.0, 1..12), rot in 0usize..12) {
                let a = range_of(&members_from(&values), PropertyAxis::Stiffness);
                let k = rot % values.len();
                values.rotate_left(k);
                values.reverse();
                prop_assert_eq!(a, range_of(&members_from(&values), PropertyAxis::Stiffness));
            }

            #[test]
            fn range_translation_covariant(values in prop::collection::vec(0.0f64..500.0, 1..12), c in 0.0f64..500.0) {
                let objs = |shift: f64| -> Vec<ClothObject> {
                    values.iter().enumerate().map(|(i, &v)| ClothObject::rectangle(&i.to_string(), 1.0, 1.0, v + shift + 1.0)).collect()
                };
                let a = range_of(&objs(0.0), PropertyAxis::Weight);
                let b = range_of(&objs(c), PropertyAxis::Weight);
                prop_assert!((a - b).abs() <= 1e-9);
            }

            #[test]
            fn one_vertex_at_unit_radius_per_axis(values in prop::collection::vec(prop::collection::vec(0.0f64..1.0, 2..5), 2..5)) {
                let profiles: Vec<RadarProfile> = values
                    .iter()
                    .enumerate()
                    .map(|(i, vs)| {
                        let m = members_from(vs);
                        radar_profile(&set(&format!("s{i}"), &m), &m).unwrap()
                    })
                    .collect();
                let radii = radar_radii(&profiles).unwrap();
                for a in 0..PropertyAxis::ALL.len() {
                    let mags: Vec<f64> = profiles.iter().map(|p| p.axes[a].value.magnitude()).collect();
                    let max = mags.iter().copied().fold(0.0, f64::max);
                    let at_one = radii.iter().filter(|r| r[a] == 1.0).count();
                    let at_max = mags.iter().filter(|&&m| m == max).count();
                    if max == 0.0 {
                        prop_assert_eq!(at_one, 0);
                    } else {
                        prop_assert!(at_one >= 1);
                        prop_assert_eq!(at_one, at_max);
                    }
                    prop_assert!(radii.iter().all(|r| (0.0..=1.0).contains(&r[a])));
                }
            }

            #[test]
            fn rendering_is_deterministic(values in prop::collection::vec(0.0f64..1.0, 1..6)) {
                let m = members_from(&values);
                let p = radar_profile(&set("s", &m), &m).unwrap();
                let a = render_radar(&[p.clone()], &RenderOptions::default()).unwrap();
                let b = render_radar(&[p], &RenderOptions::default()).unwrap();
                prop_assert_eq!(a, b);
            }
        }
    }
}
