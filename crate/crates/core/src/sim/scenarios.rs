//! Simulated counterparts of the measurement rigs and manipulation primitives.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::eval::{final_ratio, fold_ratio, EvalResult, PrimitiveKind};
use crate::mask::area_px;
use crate::measure::{drape_stiffness, elasticity, ElasticityInputs, PlateSpec, StiffnessInputs};
use crate::cloth::ReferenceLine;

use super::raster::{rasterize, triangles, Frame, TriangleSet};
use super::{project_area, Cylinder, Grip, Scene, SettleCriteria, SimError, SimParams, SimState, Simulator, Vec3};

/// Total pull force of a 0.5 kg weight, N.
pub const STANDARD_PULL_FORCE: f64 = 4.905;

/// Grip speed for every primitive, m/s.
/// Height in mm at which the pushing contact meets the cloth edge.
pub const PUSH_CONTACT_HEIGHT: f64 = 20.0;

pub const GRIP_SPEED: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub struct DrapeOutcome {
    pub stiffness: f64,
    /// mm².
    pub flat_area: f64,
    pub plate_area: f64,
    pub draped_area: f64,
    pub steps: u64,
    pub state: SimState,
}

/// Drop the cloth centred on a cylindrical plate, settle, and score the drape
/// from top-view areas.
pub fn run_drape(params: &SimParams, plate: &PlateSpec) -> Result<DrapeOutcome, SimError> {
    run_drape_with(params, plate, &SettleCriteria::default(), &mut |_: &SimState| {})
}

pub fn run_drape_with(
    params: &SimParams,
    plate: &PlateSpec,
    criteria: &SettleCriteria,
    observer: &mut dyn FnMut(&SimState),
) -> Result<DrapeOutcome, SimError> {
    // Tall enough that nothing reaches the floor.
    let top = params.width.hypot(params.height) * 5e-4 + 0.02;
    let scene = Scene {
        plate: Some(Cylinder {
            center_x: 0.0,
            center_y: 0.0,
            radius: plate.diameter * 5e-4,
            top,
        }),
        ..Scene::floor(params)
    };
    let sim = Simulator::new(params.clone(), scene)?;
    let mut state = sim.flat_state(0.0, 0.0, top + 1e-3);
    // Centring pin: without it a stiff cloth tips off the plate.
    for i in [(params.nx - 1) / 2, params.nx / 2] {
        for j in [(params.ny - 1) / 2, params.ny / 2] {
            state.pin(params.index(i, j));
        }
    }
    let flat_area = project_area(&state);
    let steps = sim.settle_observed(&mut state, criteria, observer)?;
    let draped_area = project_area(&state);
    let plate_area = plate.area();
    let stiffness = drape_stiffness(&StiffnessInputs {
        flat_area,
        plate_area,
        draped_area,
    })?;
    Ok(DrapeOutcome {
        stiffness,
        flat_area,
        plate_area,
        draped_area,
        steps,
        state,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct InclineOptions {
    pub step_deg: f64,
    pub max_deg: f64,
    /// Centroid travel within one window that counts as sliding, mm.
    pub slide_mm: f64,
    /// Longest time spent at one angle, s.
    pub window_s: f64,
    /// A window may end on settling only after this long, s.
    pub min_window_s: f64,
}

impl Default for InclineOptions {
    fn default() -> Self {
        InclineOptions {
            step_deg: 0.25,
            max_deg: 85.0,
            slide_mm: 5.0,
            window_s: 1.0,
            min_window_s: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InclineOutcome {
    /// Tangent of the slide angle.
    pub mu: f64,
    pub angle_deg: f64,
    pub windows: u32,
}

/// Tilt the supporting plane step by step until the cloth slides.
pub fn run_incline(params: &SimParams) -> Result<InclineOutcome, SimError> {
    run_incline_with(
        params,
        &InclineOptions::default(),
        &SettleCriteria::default(),
        &mut |_: &SimState| {},
    )
}

/// The plane stays horizontal and gravity is tilted instead, which is the
/// same physics in the plane's frame.
pub fn run_incline_with(
    params: &SimParams,
    options: &InclineOptions,
    criteria: &SettleCriteria,
    observer: &mut dyn FnMut(&SimState),
) -> Result<InclineOutcome, SimError> {
    let mut sim = Simulator::new(params.clone(), Scene::floor(params))?;
    let mut state = sim.flat_state(0.0, 0.0, 0.0);
    let window = (options.window_s / params.dt).ceil() as u64;
    let min_steps = (options.min_window_s / params.dt).ceil() as u64;
    let mut k = 0u32;
    loop {
        k += 1;
        let angle_deg = k as f64 * options.step_deg;
        if angle_deg > options.max_deg + 1e-9 {
            return Err(SimError::NoSlide {
                angle_deg: options.max_deg,
            });
        }
        let t = angle_deg.to_radians();
        sim.scene.gravity = Vec3::new(0.0, -params.gravity * t.sin(), -params.gravity * t.cos());
        let start = state.centroid();
        let mut calm = 0;
        for n in 1..=window {
            sim.step(&mut state)?;
            observer(&state);
            let moved = state.centroid() - start;
            if moved.x.hypot(moved.y) * 1e3 > options.slide_mm {
                return Ok(InclineOutcome {
                    mu: t.tan(),
                    angle_deg,
                    windows: k,
                });
            }
            if state.max_speed() < criteria.v_max {
                calm += 1;
            } else {
                calm = 0;
            }
            if n >= min_steps && calm >= criteria.hold_steps {
                break;
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PullOutcome {
    pub elasticity: f64,
    /// Edge-to-edge lengths, mm.
    pub rest_length: f64,
    pub loaded_length: f64,
    pub force: f64,
    pub steps: u64,
    pub state: SimState,
}

/// Pin the `i = 0` edge, spread `force` N over the opposite edge, settle, and
/// report the relative elongation. No gravity and no floor.
pub fn run_pull(params: &SimParams, force: f64) -> Result<PullOutcome, SimError> {
    run_pull_with(params, force, &SettleCriteria::default(), &mut |_: &SimState| {})
}

pub fn run_pull_with(
    params: &SimParams,
    force: f64,
    criteria: &SettleCriteria,
    observer: &mut dyn FnMut(&SimState),
) -> Result<PullOutcome, SimError> {
    if !(force >= 0.0 && force.is_finite()) {
        return Err(SimError::InvalidParams(format!("pull force {force}")));
    }
    let sim = Simulator::new(params.clone(), Scene::empty())?;
    let mut state = sim.flat_state(0.0, 0.0, 0.0);
    let (nx, ny) = (params.nx, params.ny);
    let per = force / ny as f64;
    for j in 0..ny {
        state.pin(params.index(0, j));
        state.loads.push((params.index(nx - 1, j), Vec3::new(per, 0.0, 0.0)));
    }
    let steps = sim.settle_observed(&mut state, criteria, observer)?;
    let mean_x = |i: usize| (0..ny).map(|j| state.pos[params.index(i, j)].x).sum::<f64>() / ny as f64;
    let loaded_length = (mean_x(nx - 1) - mean_x(0)) * 1e3;
    let rest_length = params.width;
    let value = elasticity(&ElasticityInputs {
        line: ReferenceLine::Line1,
        rest_length,
        loaded_length: loaded_length.max(rest_length),
        load: force / params.gravity * 1e3,
    })?;
    Ok(PullOutcome {
        elasticity: value,
        rest_length,
        loaded_length,
        force,
        steps,
        state,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrimitiveOutcome {
    pub result: EvalResult,
    /// Areas in mm². For folds `area_before` is the pre-fold area.
    pub area_before: f64,
    pub area_after: f64,
    /// Uncovered bottom-half area, folds only.
    pub uncovered: Option<f64>,
    pub steps: u64,
    pub state: SimState,
}

/// Execute a primitive on a flat cloth lying on the floor and score it.
pub fn run_primitive(kind: PrimitiveKind, params: &SimParams) -> Result<PrimitiveOutcome, SimError> {
    run_primitive_with(kind, params, &SettleCriteria::default(), &mut |_: &SimState| {})
}

pub fn run_primitive_with(
    kind: PrimitiveKind,
    params: &SimParams,
    criteria: &SettleCriteria,
    observer: &mut dyn FnMut(&SimState),
) -> Result<PrimitiveOutcome, SimError> {
    kind.validate()?;
    let sim = Simulator::new(params.clone(), Scene::floor(params))?;
    let initial = sim.flat_state(0.0, 0.0, 0.0);
    let mut state = initial.clone();
    let (nx, ny) = (params.nx, params.ny);
    let mm = |v: f64| v * 1e-3;
    let corner = params.index(0, ny - 1);
    let p0 = state.pos[corner];
    let up = |h: f64| Vec3::new(0.0, 0.0, mm(h));

    // Short-edge midpoint and the direction pointing out of the cloth there.
    let (edge_mid, outward, opposite_edge): (usize, Vec3, Vec<usize>) = if params.width >= params.height {
        (
            params.index(nx - 1, ny / 2),
            Vec3::x(),
            (0..ny).map(|j| params.index(0, j)).collect(),
        )
    } else {
        (
            params.index(nx / 2, ny - 1),
            Vec3::y(),
            (0..nx).map(|i| params.index(i, 0)).collect(),
        )
    };

    let (particle, path) = match kind {
        PrimitiveKind::Lift { rise, grasp_height } => {
            (corner, vec![p0, p0 + up(grasp_height), p0 + up(grasp_height + rise)])
        }
        PrimitiveKind::Drag { travel, grasp_height } => {
            // Along the grasped edge, towards the neighbouring corner.
            let along = state.pos[params.index(nx - 1, ny - 1)] - p0;
            let dir = along.normalize();
            let lifted = p0 + up(grasp_height);
            (corner, vec![p0, lifted, lifted + dir * mm(travel)])
        }
        PrimitiveKind::Fold { peak, grasp_height } => {
            let target = state.pos[params.index(nx - 1, 0)];
            let mid = (p0 + target) / 2.0;
            (
                corner,
                vec![p0, p0 + up(grasp_height), mid + up(peak), target + up(grasp_height)],
            )
        }
        PrimitiveKind::Pull { travel } => {
            for &k in &opposite_edge {
                state.pin(k);
            }
            let q = state.pos[edge_mid];
            (edge_mid, vec![q, q + outward * mm(travel)])
        }
        PrimitiveKind::Push { travel } => {
            let q = state.pos[edge_mid];
            let h = up(PUSH_CONTACT_HEIGHT);
            (edge_mid, vec![q, q + h, q + h - outward * mm(travel)])
        }
    };
    state.grips.push(Grip {
        particle,
        path,
        speed: GRIP_SPEED,
        start: 0.0,
    });

    let moved = sim.run_grips(&mut state, observer)?;
    let settled = sim.settle_observed(&mut state, criteria, observer)?;

    let (fr, area_before, area_after, uncovered) = if let PrimitiveKind::Fold { .. } = kind {
        let frame = Frame::around(&[&state]);
        let (top, bottom) = fold_halves(&sim, corner, params.index(nx - 1, 0));
        let after = rasterize(&state, &frame, &TriangleSet::All);
        let top_mask = rasterize(&state, &frame, &top);
        let bottom_mask = rasterize(&state, &frame, &bottom);
        let bare = bottom_mask.difference(&top_mask).expect("masks share a frame");
        let fr = fold_ratio(&after, &bare)?;
        (fr, project_area(&initial), area_px(&after) as f64, Some(area_px(&bare) as f64))
    } else {
        let frame = Frame::around(&[&initial, &state]);
        let before = rasterize(&initial, &frame, &TriangleSet::All);
        let after = rasterize(&state, &frame, &TriangleSet::All);
        let fr = final_ratio(&before, &after)?;
        (fr, area_px(&before) as f64, area_px(&after) as f64, None)
    };
    Ok(PrimitiveOutcome {
        result: EvalResult::from_runs(kind, vec![fr])?,
        area_before,
        area_after,
        uncovered,
        steps: moved + settled,
        state,
    })
}

/// Split the mesh triangles by the perpendicular bisector of the segment
/// joining the grasped corner to its target, in rest coordinates. The half
/// containing the grasped corner ends up on top.
fn fold_halves(sim: &Simulator, grasped: usize, target: usize) -> (TriangleSet, TriangleSet) {
    let p = &sim.params;
    let rest = |k: usize| {
        let (x, y) = sim.rest_position(k % p.nx, k / p.nx);
        Vec3::new(x, y, 0.0)
    };
    let (g, t) = (rest(grasped), rest(target));
    let mid = (g + t) / 2.0;
    let axis = g - t;
    let top: Vec<bool> = triangles(p.nx, p.ny)
        .iter()
        .map(|tri| {
            let c = (rest(tri[0]) + rest(tri[1]) + rest(tri[2])) / 3.0;
            (c - mid).dot(&axis) > 0.0
        })
        .collect();
    let bottom = top.iter().map(|t| !t).collect();
    (TriangleSet::Only(top), TriangleSet::Only(bottom))
}

/// Which experiment a config file runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Scenario {
    Drape {
        #[serde(default = "default_coverage")]
        coverage_ratio: f64,
    },
    Incline {
        #[serde(default)]
        options: InclineOptions,
    },
    Pull {
        /// N.
        #[serde(default = "default_force")]
        force: f64,
    },
    Primitive {
        primitive: PrimitiveKind,
    },
}

fn default_coverage() -> f64 {
    crate::measure::DEFAULT_COVERAGE_RATIO
}

fn default_force() -> f64 {
    STANDARD_PULL_FORCE
}

/// Parameter varied by a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepField {
    KStretch,
    KBend,
    Mu,
    Damping,
}

impl SweepField {
    pub fn name(self) -> &'static str {
        match self {
            SweepField::KStretch => "k_stretch",
            SweepField::KBend => "k_bend",
            SweepField::Mu => "mu",
            SweepField::Damping => "damping",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub field: SweepField,
    pub values: Vec<f64>,
}

/// Scenario file contents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    #[serde(default)]
    pub params: SimParams,
    #[serde(default)]
    pub settle: SettleCriteria,
    pub scenario: Scenario,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Sweep>,
}

/// Headline number of one scenario run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioResult {
    pub scenario: String,
    /// Stiffness, μ, elasticity or FR.
    pub value: f64,
    pub steps: u64,
}

impl SimConfig {
    /// Parameter sets to run: one, or one per sweep value.
    pub fn param_sets(&self) -> Vec<SimParams> {
        match &self.sweep {
            None => vec![self.params.clone()],
            Some(sweep) => sweep
                .values
                .iter()
                .map(|&v| {
                    let mut p = self.params.clone();
                    match sweep.field {
                        SweepField::KStretch => p.k_stretch = v,
                        SweepField::KBend => p.k_bend = v,
                        SweepField::Mu => p.mu = v,
                        SweepField::Damping => p.damping = v,
                    }
                    p
                })
                .collect(),
        }
    }

    pub fn run_one(&self, params: &SimParams, observer: &mut dyn FnMut(&SimState)) -> Result<ScenarioResult, SimError> {
        let crit = &self.settle;
        Ok(match &self.scenario {
            Scenario::Drape { coverage_ratio } => {
                let plate = PlateSpec::for_edge(params.width.min(params.height), *coverage_ratio)?;
                let o = run_drape_with(params, &plate, crit, observer)?;
                ScenarioResult {
                    scenario: "drape".into(),
                    value: o.stiffness,
                    steps: o.steps,
                }
            }
            Scenario::Incline { options } => {
                let o = run_incline_with(params, options, crit, observer)?;
                ScenarioResult {
                    scenario: "incline".into(),
                    value: o.mu,
                    steps: 0,
                }
            }
            Scenario::Pull { force } => {
                let o = run_pull_with(params, *force, crit, observer)?;
                ScenarioResult {
                    scenario: "pull".into(),
                    value: o.elasticity,
                    steps: o.steps,
                }
            }
            Scenario::Primitive { primitive } => {
                let o = run_primitive_with(*primitive, params, crit, observer)?;
                ScenarioResult {
                    scenario: primitive.name().to_lowercase(),
                    value: o.result.mean,
                    steps: o.steps,
                }
            }
        })
    }
}

/// Observer that writes particle positions every `every` steps as CSV.
pub struct TrajectoryCsv<W: Write> {
    writer: csv::Writer<W>,
    every: u64,
    error: Option<String>,
}

impl<W: Write> TrajectoryCsv<W> {
    pub fn new(inner: W, every: u64) -> Self {
        let mut writer = csv::Writer::from_writer(inner);
        let error = writer
            .write_record(["step", "time_s", "particle", "x_mm", "y_mm", "z_mm"])
            .err()
            .map(|e| e.to_string());
        TrajectoryCsv {
            writer,
            every: every.max(1),
            error,
        }
    }

    pub fn record(&mut self, state: &SimState) {
        if self.error.is_some() || state.steps % self.every != 0 {
            return;
        }
        for (k, p) in state.pos.iter().enumerate() {
            let row = [
                state.steps.to_string(),
                format!("{:.6}", state.time),
                k.to_string(),
                format!("{:.4}", p.x * 1e3),
                format!("{:.4}", p.y * 1e3),
                format!("{:.4}", p.z * 1e3),
            ];
            if let Err(e) = self.writer.write_record(&row) {
                self.error = Some(e.to_string());
                return;
            }
        }
    }

    pub fn finish(mut self) -> Result<(), SimError> {
        if let Some(e) = self.error {
            return Err(SimError::Io(e));
        }
        self.writer.flush().map_err(|e| SimError::Io(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_field_names_match_config_spelling() {
        for f in [SweepField::KStretch, SweepField::KBend, SweepField::Mu, SweepField::Damping] {
            assert_eq!(serde_json::to_value(f).unwrap(), f.name());
        }
    }

    #[test]
    fn zero_force_pull_is_zero() {
        let o = run_pull(&SimParams::default(), 0.0).unwrap();
        assert!(o.elasticity.abs() < 1e-6);
    }

    #[test]
    fn frictionless_incline_slides_at_once() {
        let p = SimParams { mu: 0.0, ..Default::default() };
        let o = run_incline(&p).unwrap();
        assert!(o.mu <= 0.02, "{o:?}");
    }

    #[test]
    fn config_round_trips_through_json() {
        let cfg = SimConfig {
            params: SimParams::default(),
            settle: SettleCriteria::default(),
            scenario: Scenario::Primitive {
                primitive: PrimitiveKind::FOLD,
            },
            sweep: Some(Sweep {
                field: SweepField::KBend,
                values: vec![1.0, 2.0],
            }),
        };
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(serde_json::from_str::<SimConfig>(&text).unwrap(), cfg);
        let sets = cfg.param_sets();
        assert_eq!(sets.len(), 2);
        assert_eq!(sets[1].k_bend, 2.0);
    }

    #[test]
    fn trajectory_dump_has_one_row_per_particle() {
        let p = SimParams { nx: 3, ny: 2, ..Default::default() };
        let sim = Simulator::new(p.clone(), Scene::floor(&p)).unwrap();
        let mut s = sim.flat_state(0.0, 0.0, 0.01);
        let mut dump = TrajectoryCsv::new(Vec::new(), 2);
        for _ in 0..4 {
            sim.step(&mut s).unwrap();
            dump.record(&s);
        }
        let TrajectoryCsv { writer, .. } = dump;
        let text = String::from_utf8(writer.into_inner().unwrap()).unwrap();
        assert_eq!(text.lines().count(), 1 + 2 * 6);
    }
}
