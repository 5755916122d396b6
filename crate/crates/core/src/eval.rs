//! Outcome metrics for manipulation primitives, computed from before/after
//! cloth masks, and a per-primitive ranking of samples.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cloth::MechanicalProperties;
use crate::mask::{area_px, BinaryMask};

/// Above this a retention ratio probably hides a segmentation fault.
pub const FR_WARN_ABOVE: f64 = 1.05;

/// Means closer than this are treated as tied.
pub const TIE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("reference mask is empty")]
    EmptyReference,
    #[error("uncovered area {uncovered} exceeds final area {after}")]
    InconsistentAreas { uncovered: f64, after: f64 },
    #[error("no runs to aggregate")]
    EmptyRuns,
    #[error("masks have different calibration or geometry")]
    CalibrationMismatch,
    #[error("need at least {0} samples")]
    TooFewSamples(usize),
    #[error("primitive parameter must be positive: {0}")]
    InvalidParameter(&'static str),
    #[error("csv: {0}")]
    Csv(String),
}

/// Manipulation primitive with its trajectory parameters, lengths in mm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PrimitiveKind {
    /// Corner grasped at `grasp_height`, raised vertically by `rise`.
    Lift { rise: f64, grasp_height: f64 },
    /// Corner grasped at `grasp_height`, moved `travel` parallel to the table.
    Drag { travel: f64, grasp_height: f64 },
    /// Corner carried onto the opposite corner along a triangular path.
    Fold { peak: f64, grasp_height: f64 },
    /// Short-edge midpoint pulled outward, opposite side fixed.
    Pull { travel: f64 },
    /// Short-edge midpoint pushed toward the centre.
    Push { travel: f64 },
}

impl PrimitiveKind {
    pub const LIFT: PrimitiveKind = PrimitiveKind::Lift {
        rise: 350.0,
        grasp_height: 30.0,
    };
    pub const DRAG: PrimitiveKind = PrimitiveKind::Drag {
        travel: 200.0,
        grasp_height: 10.0,
    };
    pub const FOLD: PrimitiveKind = PrimitiveKind::Fold {
        peak: 110.0,
        grasp_height: 30.0,
    };
    pub const PULL: PrimitiveKind = PrimitiveKind::Pull { travel: 50.0 };
    pub const PUSH: PrimitiveKind = PrimitiveKind::Push { travel: 100.0 };

    pub const DEFAULTS: [PrimitiveKind; 5] = [
        PrimitiveKind::LIFT,
        PrimitiveKind::DRAG,
        PrimitiveKind::FOLD,
        PrimitiveKind::PULL,
        PrimitiveKind::PUSH,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            PrimitiveKind::Lift { .. } => "Lift",
            PrimitiveKind::Drag { .. } => "Drag",
            PrimitiveKind::Fold { .. } => "Fold",
            PrimitiveKind::Pull { .. } => "Pull",
            PrimitiveKind::Push { .. } => "Push",
        }
    }

    /// Default-parameter primitive by case-insensitive name.
    pub fn by_name(name: &str) -> Option<PrimitiveKind> {
        PrimitiveKind::DEFAULTS
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(name))
    }

    pub fn same_kind(&self, other: &PrimitiveKind) -> bool {
        std::mem::discriminant(self) == std::mem::discriminant(other)
    }

    pub fn validate(&self) -> Result<(), EvalError> {
        let params: &[(&'static str, f64)] = match *self {
            PrimitiveKind::Lift { rise, grasp_height } => &[("rise", rise), ("grasp_height", grasp_height)],
            PrimitiveKind::Drag { travel, grasp_height } => &[("travel", travel), ("grasp_height", grasp_height)],
            PrimitiveKind::Fold { peak, grasp_height } => &[("peak", peak), ("grasp_height", grasp_height)],
            PrimitiveKind::Pull { travel } | PrimitiveKind::Push { travel } => &[("travel", travel)],
        };
        for &(name, v) in params {
            if !(v > 0.0 && v.is_finite()) {
                return Err(EvalError::InvalidParameter(name));
            }
        }
        Ok(())
    }
}

impl fmt::Display for PrimitiveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Repeated outcomes of one primitive on one sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub primitive: PrimitiveKind,
    pub repetitions: Vec<f64>,
    pub mean: f64,
    /// Population standard deviation.
    pub stddev: f64,
}

impl EvalResult {
    pub fn from_runs(primitive: PrimitiveKind, runs: Vec<f64>) -> Result<Self, EvalError> {
        let (mean, stddev) = aggregate(&runs)?;
        Ok(EvalResult {
            primitive,
            repetitions: runs,
            mean,
            stddev,
        })
    }

    pub fn fr(&self) -> f64 {
        self.mean
    }
}

fn same_geometry(a: &BinaryMask, b: &BinaryMask) -> Result<(), EvalError> {
    let same_scale = match (a.scale(), b.scale()) {
        (None, None) => true,
        (Some(x), Some(y)) => (x - y).abs() <= 1e-12 * x.abs().max(y.abs()),
        _ => false,
    };
    if a.width() != b.width() || a.height() != b.height() || !same_scale {
        return Err(EvalError::CalibrationMismatch);
    }
    Ok(())
}

/// Shape retention `A_f / A_i` from raw areas. Not clamped.
pub fn final_ratio_areas(area_before: f64, area_after: f64) -> Result<f64, EvalError> {
    if area_before <= 0.0 {
        return Err(EvalError::EmptyReference);
    }
    let fr = area_after / area_before;
    if fr > FR_WARN_ABOVE {
        log::warn!("final ratio {fr:.3} exceeds {FR_WARN_ABOVE}; check segmentation");
    }
    Ok(fr)
}

/// Shape retention between two masks taken with the same camera geometry.
pub fn final_ratio(before: &BinaryMask, after: &BinaryMask) -> Result<f64, EvalError> {
    same_geometry(before, after)?;
    final_ratio_areas(area_px(before) as f64, area_px(after) as f64)
}

/// Fold alignment `(A_f - A_b) / A_f` from raw areas.
pub fn fold_ratio_areas(area_after: f64, area_uncovered: f64) -> Result<f64, EvalError> {
    if area_after <= 0.0 {
        return Err(EvalError::EmptyReference);
    }
    if area_uncovered > area_after || area_uncovered < 0.0 {
        return Err(EvalError::InconsistentAreas {
            uncovered: area_uncovered,
            after: area_after,
        });
    }
    Ok((area_after - area_uncovered) / area_after)
}

/// Fold alignment from the final cloth mask and the uncovered bottom-half mask.
pub fn fold_ratio(after: &BinaryMask, uncovered_bottom: &BinaryMask) -> Result<f64, EvalError> {
    same_geometry(after, uncovered_bottom)?;
    fold_ratio_areas(area_px(after) as f64, area_px(uncovered_bottom) as f64)
}

/// Mean and population standard deviation.
pub fn aggregate(runs: &[f64]) -> Result<(f64, f64), EvalError> {
    if runs.is_empty() {
        return Err(EvalError::EmptyRuns);
    }
    let n = runs.len() as f64;
    let mean = runs.iter().sum::<f64>() / n;
    let var = runs.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / n;
    Ok((mean, var.sqrt()))
}

/// One characterised sample and its primitive outcomes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleResults {
    pub id: String,
    pub properties: MechanicalProperties,
    pub results: Vec<EvalResult>,
}

impl SampleResults {
    pub fn result(&self, kind: &PrimitiveKind) -> Option<&EvalResult> {
        self.results.iter().find(|r| r.primitive.same_kind(kind))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedSample {
    pub id: String,
    pub mean: f64,
    pub stddev: f64,
    pub stiffness: Option<f64>,
    pub elasticity: Option<f64>,
    pub friction: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrimitiveRanking {
    pub primitive: PrimitiveKind,
    /// Highest mean FR first; ties keep input order.
    pub ranking: Vec<RankedSample>,
    /// Every sample sharing the highest mean.
    pub best: Vec<String>,
    /// Every sample sharing the lowest mean.
    pub worst: Vec<String>,
}

impl PrimitiveRanking {
    pub fn best_tied(&self) -> bool {
        self.best.len() > 1
    }

    pub fn worst_tied(&self) -> bool {
        self.worst.len() > 1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendReport {
    pub samples: Vec<SampleResults>,
    pub primitives: Vec<PrimitiveRanking>,
}

fn pct(v: Option<f64>) -> String {
    v.map(|v| format!("{:.0}%", v * 100.0)).unwrap_or_else(|| "NA".into())
}

impl TrendReport {
    pub fn ranking(&self, kind: &PrimitiveKind) -> Option<&PrimitiveRanking> {
        self.primitives.iter().find(|p| p.primitive.same_kind(kind))
    }

    fn cell(&self, sample: &SampleResults, ranking: &PrimitiveRanking) -> String {
        match sample.result(&ranking.primitive) {
            None => "NA".into(),
            Some(r) => {
                let mut s = format!("{:.2} ± {:.2}", r.mean, r.stddev);
                if ranking.best.contains(&sample.id) {
                    s.push_str(" (max)");
                } else if ranking.worst.contains(&sample.id) {
                    s.push_str(" (min)");
                }
                s
            }
        }
    }

    /// One row per sample: properties in percent, then `mean ± sd` per
    /// primitive with `(max)`/`(min)` markers. Standard deviations are
    /// population deviations.
    pub fn to_csv(&self) -> Result<String, EvalError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header: Vec<String> = ["sample", "stiffness", "elasticity", "friction"]
            .map(String::from)
            .to_vec();
        header.extend(self.primitives.iter().map(|p| p.primitive.name().to_lowercase()));
        w.write_record(&header).map_err(|e| EvalError::Csv(e.to_string()))?;
        for s in &self.samples {
            let p = &s.properties;
            let mut rec = vec![s.id.clone(), pct(p.stiffness), pct(p.elasticity), pct(p.friction)];
            rec.extend(self.primitives.iter().map(|r| self.cell(s, r)));
            w.write_record(&rec).map_err(|e| EvalError::Csv(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| EvalError::Csv(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

impl fmt::Display for TrendReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:<8}{:>6}{:>6}{:>6}", "sample", "stf", "ela", "fri")?;
        for p in &self.primitives {
            write!(f, "{:>20}", p.primitive.name())?;
        }
        writeln!(f)?;
        for s in &self.samples {
            let p = &s.properties;
            write!(
                f,
                "{:<8}{:>6}{:>6}{:>6}",
                s.id,
                pct(p.stiffness),
                pct(p.elasticity),
                pct(p.friction)
            )?;
            for r in &self.primitives {
                write!(f, "{:>20}", self.cell(s, r))?;
            }
            writeln!(f)?;
        }
        writeln!(f, "(± is the population standard deviation)")
    }
}

/// Read repetition outcomes from CSV with a `sample,primitive,fr` header,
/// one row per repetition. Samples keep their first-appearance order and
/// primitives take their default parameters.
pub fn parse_runs(text: &str) -> Result<Vec<(String, Vec<EvalResult>)>, EvalError> {
    let csv_err = |e: csv::Error| EvalError::Csv(e.to_string());
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = rdr.headers().map_err(csv_err)?.clone();
    if headers.iter().collect::<Vec<_>>() != ["sample", "primitive", "fr"] {
        return Err(EvalError::Csv(format!("expected header sample,primitive,fr, got {:?}", headers)));
    }
    let mut grouped: Vec<(String, Vec<(PrimitiveKind, Vec<f64>)>)> = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(csv_err)?;
        let line = row.position().map_or(0, |p| p.line());
        let kind = PrimitiveKind::by_name(&row[1])
            .ok_or_else(|| EvalError::Csv(format!("line {line}: unknown primitive {:?}", &row[1])))?;
        let fr: f64 = row[2]
            .parse()
            .map_err(|_| EvalError::Csv(format!("line {line}: bad value {:?}", &row[2])))?;
        let idx = match grouped.iter().position(|(id, _)| id == &row[0]) {
            Some(i) => i,
            None => {
                grouped.push((row[0].to_string(), Vec::new()));
                grouped.len() - 1
            }
        };
        let runs = &mut grouped[idx].1;
        match runs.iter_mut().find(|(k, _)| k.same_kind(&kind)) {
            Some((_, v)) => v.push(fr),
            None => runs.push((kind, vec![fr])),
        }
    }
    grouped
        .into_iter()
        .map(|(id, runs)| {
            let results = runs
                .into_iter()
                .map(|(k, v)| EvalResult::from_runs(k, v))
                .collect::<Result<Vec<_>, _>>()?;
            Ok((id, results))
        })
        .collect()
}

/// Rank samples by mean FR for every primitive present in any sample.
pub fn trend_report(samples: &[SampleResults]) -> Result<TrendReport, EvalError> {
    if samples.len() < 2 {
        return Err(EvalError::TooFewSamples(2));
    }
    let mut kinds: Vec<PrimitiveKind> = Vec::new();
    for s in samples {
        for r in &s.results {
            if !kinds.iter().any(|k| k.same_kind(&r.primitive)) {
                kinds.push(r.primitive);
            }
        }
    }
    let primitives = kinds
        .into_iter()
        .map(|kind| {
            let mut ranking: Vec<RankedSample> = samples
                .iter()
                .filter_map(|s| {
                    s.result(&kind).map(|r| RankedSample {
                        id: s.id.clone(),
                        mean: r.mean,
                        stddev: r.stddev,
                        stiffness: s.properties.stiffness,
                        elasticity: s.properties.elasticity,
                        friction: s.properties.friction,
                    })
                })
                .collect();
            ranking.sort_by(|a, b| b.mean.total_cmp(&a.mean));
            let hi = ranking.first().map(|r| r.mean).unwrap_or(0.0);
            let lo = ranking.last().map(|r| r.mean).unwrap_or(0.0);
            let within = |target: f64| {
                ranking
                    .iter()
                    .filter(|r| (r.mean - target).abs() <= TIE_TOLERANCE)
                    .map(|r| r.id.clone())
                    .collect::<Vec<_>>()
            };
            PrimitiveRanking {
                primitive: kind,
                best: within(hi),
                worst: within(lo),
                ranking,
            }
        })
        .collect();
    Ok(TrendReport {
        samples: samples.to_vec(),
        primitives,
    })
}
