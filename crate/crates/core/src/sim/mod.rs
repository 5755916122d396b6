//! Mass-spring cloth simulator.
//!
//! A rectangular grid of particles joined by structural and shear springs,
//! with bending resisted along rows and columns of second neighbours (see
//! [`BendingModel`]), integrated with semi-implicit Euler.
//! Contacts with the floor and an optional cylindrical plate are resolved on
//! velocities with Coulomb friction. Internally everything is SI; parameters
//! and outputs use millimetres and grams where that matches the rest of the
//! crate.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::eval::EvalError;
use crate::measure::MeasureError;

mod raster;
mod scenarios;

pub use raster::{project_area, rasterize, triangles, Frame, TriangleSet};
pub use scenarios::{
    run_drape, run_drape_with, run_incline, run_incline_with, run_primitive, run_primitive_with, run_pull,
    run_pull_with, DrapeOutcome, InclineOptions, InclineOutcome, PrimitiveOutcome, PullOutcome, Scenario,
    ScenarioResult, SimConfig, Sweep, SweepField, TrajectoryCsv, GRIP_SPEED, PUSH_CONTACT_HEIGHT, STANDARD_PULL_FORCE,
};

pub type Vec3 = Vector3<f64>;

/// Coordinates beyond this many metres count as a blow-up.
pub const BLOWUP_LIMIT_M: f64 = 1e6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("numerical blow-up at step {step}")]
    NumericalBlowup { step: u64 },
    #[error("did not settle within {steps} steps")]
    DidNotSettle { steps: u64 },
    #[error("no slide up to {angle_deg}°")]
    NoSlide { angle_deg: f64 },
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("io: {0}")]
    Io(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimParams {
    pub nx: usize,
    pub ny: usize,
    /// Cloth extent along x, mm.
    pub width: f64,
    /// Cloth extent along y, mm.
    pub height: f64,
    /// g/mm².
    pub areal_density: f64,
    /// N/m, structural and shear springs.
    pub k_stretch: f64,
    /// N/m, second-neighbour bending term.
    pub k_bend: f64,
    /// Coulomb coefficient against every surface.
    pub mu: f64,
    /// 1/s.
    pub damping: f64,
    /// s.
    pub dt: f64,
    /// m/s².
    pub gravity: f64,
    pub bending: BendingModel,
}

/// Force law on second-neighbour triples (a, b, c) along grid rows/columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BendingModel {
    /// Spring between a and c.
    Spring,
    /// Penalty on the discrete curvature `a - 2b + c`.
    #[default]
    Curvature,
}

impl Default for SimParams {
    fn default() -> Self {
        SimParams {
            nx: 21,
            ny: 21,
            width: 300.0,
            height: 300.0,
            areal_density: 2e-4,
            k_stretch: 1000.0,
            k_bend: 1.0,
            mu: 0.5,
            damping: 10.0,
            dt: 2.5e-5,
            gravity: 9.81,
            bending: BendingModel::default(),
        }
    }
}

impl SimParams {
    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |m: &str| Err(SimError::InvalidParams(m.into()));
        let finite = [
            self.width,
            self.height,
            self.areal_density,
            self.k_stretch,
            self.k_bend,
            self.mu,
            self.damping,
            self.dt,
            self.gravity,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return bad("non-finite value");
        }
        if self.nx < 2 || self.ny < 2 {
            return bad("grid needs at least 2x2 particles");
        }
        if self.width <= 0.0 || self.height <= 0.0 || self.areal_density <= 0.0 {
            return bad("size and density must be positive");
        }
        if self.k_stretch < 0.0 || self.k_bend < 0.0 {
            return bad("stiffness must be non-negative");
        }
        if self.mu < 0.0 || self.damping < 0.0 {
            return bad("friction and damping must be non-negative");
        }
        if self.dt <= 0.0 {
            return bad("dt must be positive");
        }
        Ok(())
    }

    /// Mass of one particle, kg.
    pub fn particle_mass(&self) -> f64 {
        self.areal_density * self.width * self.height / (self.nx * self.ny) as f64 * 1e-3
    }

    /// Grid spacing (x, y), m.
    pub fn spacing(&self) -> (f64, f64) {
        (
            self.width * 1e-3 / (self.nx - 1) as f64,
            self.height * 1e-3 / (self.ny - 1) as f64,
        )
    }

    /// Largest dt for which the explicit spring update is stable, from a
    /// Gershgorin bound on the stiffest particle.
    pub fn stability_limit(&self) -> f64 {
        let bend = match self.bending {
            BendingModel::Spring => 4.0,
            BendingModel::Curvature => 32.0,
        };
        let load = 8.0 * self.k_stretch + bend * self.k_bend;
        if load == 0.0 {
            f64::INFINITY
        } else {
            2.0 * (self.particle_mass() / (2.0 * load)).sqrt()
        }
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }
}

/// Settle stopping rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SettleCriteria {
    /// m/s.
    pub v_max: f64,
    pub hold_steps: u64,
    pub step_cap: u64,
}

impl Default for SettleCriteria {
    fn default() -> Self {
        SettleCriteria {
            v_max: 1e-3,
            hold_steps: 200,
            step_cap: 200_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cylinder {
    /// Axis position, m.
    pub center_x: f64,
    pub center_y: f64,
    pub radius: f64,
    /// Height of the top face above the floor, m.
    pub top: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub floor: bool,
    pub plate: Option<Cylinder>,
    /// Acceleration due to gravity, m/s².
    pub gravity: Vec3,
}

impl Scene {
    pub fn floor(params: &SimParams) -> Self {
        Scene {
            floor: true,
            plate: None,
            gravity: Vec3::new(0.0, 0.0, -params.gravity),
        }
    }

    pub fn empty() -> Self {
        Scene {
            floor: false,
            plate: None,
            gravity: Vec3::zeros(),
        }
    }
}

/// Piecewise-linear path followed at constant speed, then held.
#[derive(Debug, Clone, PartialEq)]
pub struct Grip {
    pub particle: usize,
    /// Waypoints, m. The first is the start position.
    pub path: Vec<Vec3>,
    /// m/s.
    pub speed: f64,
    /// Simulation time at which motion starts.
    pub start: f64,
}

impl Grip {
    pub fn length(&self) -> f64 {
        self.path.windows(2).map(|w| (w[1] - w[0]).norm()).sum()
    }

    pub fn end_time(&self) -> f64 {
        self.start + self.length() / self.speed
    }

    /// Position and velocity at time `t`.
    pub fn sample(&self, t: f64) -> (Vec3, Vec3) {
        let mut s = ((t - self.start) * self.speed).max(0.0);
        for w in self.path.windows(2) {
            let seg = w[1] - w[0];
            let len = seg.norm();
            if len == 0.0 {
                continue;
            }
            if s < len {
                let dir = seg / len;
                return (w[0] + dir * s, dir * self.speed);
            }
            s -= len;
        }
        (*self.path.last().expect("grip path is non-empty"), Vec3::zeros())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spring {
    pub a: usize,
    pub b: usize,
    pub rest: f64,
    pub k: f64,
}

/// Particle state of one cloth.
#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub nx: usize,
    pub ny: usize,
    pub pos: Vec<Vec3>,
    pub vel: Vec<Vec3>,
    pub pinned: Vec<bool>,
    pub grips: Vec<Grip>,
    /// Constant external forces (particle, N).
    pub loads: Vec<(usize, Vec3)>,
    pub time: f64,
    pub steps: u64,
}

impl SimState {
    fn driven(&self) -> Vec<bool> {
        let mut d = self.pinned.clone();
        for g in &self.grips {
            d[g.particle] = true;
        }
        d
    }

    pub fn centroid(&self) -> Vec3 {
        self.pos.iter().sum::<Vec3>() / self.pos.len() as f64
    }

    pub fn max_speed(&self) -> f64 {
        self.vel
            .iter()
            .zip(&self.pinned)
            .filter(|(_, &p)| !p)
            .map(|(v, _)| v.norm())
            .fold(0.0, f64::max)
    }

    pub fn pin(&mut self, particle: usize) {
        self.pinned[particle] = true;
        self.vel[particle] = Vec3::zeros();
    }
}

/// Cloth model plus scene; stepping is a pure function of these and the state.
#[derive(Debug, Clone)]
pub struct Simulator {
    pub params: SimParams,
    pub scene: Scene,
    springs: Vec<Spring>,
    hinges: Vec<[usize; 3]>,
    mass: f64,
}

impl Simulator {
    pub fn new(params: SimParams, scene: Scene) -> Result<Self, SimError> {
        params.validate()?;
        let (dx, dy) = params.spacing();
        let (nx, ny) = (params.nx, params.ny);
        let idx = |i: usize, j: usize| j * nx + i;
        let mut springs = Vec::new();
        let mut add = |a: usize, b: usize, rest: f64, k: f64| springs.push(Spring { a, b, rest, k });
        let diag = dx.hypot(dy);
        for j in 0..ny {
            for i in 0..nx {
                if i + 1 < nx {
                    add(idx(i, j), idx(i + 1, j), dx, params.k_stretch);
                }
                if j + 1 < ny {
                    add(idx(i, j), idx(i, j + 1), dy, params.k_stretch);
                }
                if i + 1 < nx && j + 1 < ny {
                    add(idx(i, j), idx(i + 1, j + 1), diag, params.k_stretch);
                    add(idx(i + 1, j), idx(i, j + 1), diag, params.k_stretch);
                }
                if params.bending == BendingModel::Spring {
                    if i + 2 < nx {
                        add(idx(i, j), idx(i + 2, j), 2.0 * dx, params.k_bend);
                    }
                    if j + 2 < ny {
                        add(idx(i, j), idx(i, j + 2), 2.0 * dy, params.k_bend);
                    }
                }
            }
        }
        let mut hinges = Vec::new();
        if params.bending == BendingModel::Curvature {
            for j in 0..ny {
                for i in 0..nx {
                    if i + 2 < nx {
                        hinges.push([idx(i, j), idx(i + 1, j), idx(i + 2, j)]);
                    }
                    if j + 2 < ny {
                        hinges.push([idx(i, j), idx(i, j + 1), idx(i, j + 2)]);
                    }
                }
            }
        }
        let mass = params.particle_mass();
        Ok(Simulator {
            params,
            scene,
            springs,
            hinges,
            mass,
        })
    }

    pub fn springs(&self) -> &[Spring] {
        &self.springs
    }

    pub fn particle_mass(&self) -> f64 {
        self.mass
    }

    /// Flat, unstressed cloth centred on (`cx`, `cy`) at height `z`, m.
    pub fn flat_state(&self, cx: f64, cy: f64, z: f64) -> SimState {
        let p = &self.params;
        let (dx, dy) = p.spacing();
        let (w, h) = (p.width * 1e-3, p.height * 1e-3);
        let n = p.nx * p.ny;
        let pos = (0..n)
            .map(|k| {
                let (i, j) = (k % p.nx, k / p.nx);
                Vec3::new(cx - w / 2.0 + i as f64 * dx, cy - h / 2.0 + j as f64 * dy, z)
            })
            .collect();
        SimState {
            nx: p.nx,
            ny: p.ny,
            pos,
            vel: vec![Vec3::zeros(); n],
            pinned: vec![false; n],
            grips: Vec::new(),
            loads: Vec::new(),
            time: 0.0,
            steps: 0,
        }
    }

    /// Position of particle (`i`, `j`) in the flat rest layout centred on the
    /// origin, m.
    pub fn rest_position(&self, i: usize, j: usize) -> (f64, f64) {
        let (dx, dy) = self.params.spacing();
        (
            -self.params.width * 5e-4 + i as f64 * dx,
            -self.params.height * 5e-4 + j as f64 * dy,
        )
    }

    fn forces(&self, state: &SimState, out: &mut [Vec3]) {
        let g = self.scene.gravity * self.mass;
        let c = self.params.damping * self.mass;
        for (f, v) in out.iter_mut().zip(&state.vel) {
            *f = g - v * c;
        }
        for &(k, load) in &state.loads {
            out[k] += load;
        }
        for s in &self.springs {
            let d = state.pos[s.b] - state.pos[s.a];
            let len = d.norm();
            if len > 1e-12 {
                let f = d * (s.k * (len - s.rest) / len);
                out[s.a] += f;
                out[s.b] -= f;
            }
        }
        let kb = self.params.k_bend;
        for &[a, b, c] in &self.hinges {
            let d = (state.pos[a] - state.pos[b] * 2.0 + state.pos[c]) * kb;
            out[a] -= d;
            out[b] += d * 2.0;
            out[c] -= d;
        }
    }

    /// Apply a velocity change `dvn` along unit normal `n` and clamp the
    /// tangential velocity by the Coulomb cone.
    fn contact(&self, v: &mut Vec3, n: Vec3, dvn: f64) {
        let vn = v.dot(&n);
        let vt = *v - n * vn;
        let speed = vt.norm();
        let cut = (self.params.mu * dvn).min(speed);
        let vt = if speed > 0.0 { vt * ((speed - cut) / speed) } else { vt };
        *v = vt + n * (vn + dvn);
    }

    fn resolve_contacts(&self, prev: Vec3, v: &mut Vec3) {
        let dt = self.params.dt;
        if let Some(c) = self.scene.plate {
            let next = prev + *v * dt;
            let radial = Vec3::new(next.x - c.center_x, next.y - c.center_y, 0.0);
            let r = radial.norm();
            if next.z < c.top && next.z > 0.0 && r < c.radius {
                if prev.z >= c.top {
                    self.contact(v, Vec3::z(), (c.top - next.z) / dt);
                } else {
                    let n = if r > 1e-12 {
                        radial / r
                    } else {
                        let back = Vec3::new(prev.x - c.center_x, prev.y - c.center_y, 0.0);
                        back.try_normalize(1e-12).unwrap_or_else(Vec3::x)
                    };
                    self.contact(v, n, (c.radius - r) / dt);
                }
            }
        }
        if self.scene.floor {
            let z = prev.z + v.z * dt;
            if z < 0.0 {
                self.contact(v, Vec3::z(), -z / dt);
            }
        }
    }

    /// Advance one semi-implicit Euler step.
    pub fn step(&self, state: &mut SimState) -> Result<(), SimError> {
        let dt = self.params.dt;
        let mut force = vec![Vec3::zeros(); state.pos.len()];
        self.forces(state, &mut force);
        let driven = state.driven();
        let inv_m = 1.0 / self.mass;
        for k in 0..state.pos.len() {
            if driven[k] {
                continue;
            }
            let mut v = state.vel[k] + force[k] * (dt * inv_m);
            self.resolve_contacts(state.pos[k], &mut v);
            state.vel[k] = v;
            state.pos[k] += v * dt;
        }
        state.time += dt;
        state.steps += 1;
        for g in &state.grips {
            let (p, v) = g.sample(state.time);
            state.pos[g.particle] = p;
            state.vel[g.particle] = v;
        }
        let blown = state
            .pos
            .iter()
            .any(|p| p.iter().any(|c| !c.is_finite() || c.abs() > BLOWUP_LIMIT_M));
        if blown {
            return Err(SimError::NumericalBlowup { step: state.steps });
        }
        Ok(())
    }

    /// Step until the fastest free particle stays below `v_max` for
    /// `hold_steps` consecutive steps. Returns the number of steps taken.
    pub fn settle(&self, state: &mut SimState, criteria: &SettleCriteria) -> Result<u64, SimError> {
        self.settle_observed(state, criteria, &mut |_: &SimState| {})
    }

    pub fn settle_observed(
        &self,
        state: &mut SimState,
        criteria: &SettleCriteria,
        observer: &mut dyn FnMut(&SimState),
    ) -> Result<u64, SimError> {
        let mut calm = 0;
        for n in 1..=criteria.step_cap {
            self.step(state)?;
            observer(state);
            if state.max_speed() < criteria.v_max {
                calm += 1;
                if calm >= criteria.hold_steps {
                    return Ok(n);
                }
            } else {
                calm = 0;
            }
        }
        Err(SimError::DidNotSettle {
            steps: criteria.step_cap,
        })
    }

    /// Step until every grip has reached its final waypoint.
    pub fn run_grips(&self, state: &mut SimState, observer: &mut dyn FnMut(&SimState)) -> Result<u64, SimError> {
        let end = state.grips.iter().map(Grip::end_time).fold(state.time, f64::max);
        let mut n = 0;
        while state.time < end {
            self.step(state)?;
            observer(state);
            n += 1;
        }
        Ok(n)
    }

    pub fn kinetic_energy(&self, state: &SimState) -> f64 {
        0.5 * self.mass * state.vel.iter().map(|v| v.norm_squared()).sum::<f64>()
    }

    pub fn spring_energy(&self, state: &SimState) -> f64 {
        self.springs
            .iter()
            .map(|s| {
                let e = (state.pos[s.b] - state.pos[s.a]).norm() - s.rest;
                0.5 * s.k * e * e
            })
            .sum()
    }

    pub fn bending_energy(&self, state: &SimState) -> f64 {
        let kb = self.params.k_bend;
        self.hinges
            .iter()
            .map(|&[a, b, c]| 0.5 * kb * (state.pos[a] - state.pos[b] * 2.0 + state.pos[c]).norm_squared())
            .sum()
    }

    pub fn gravity_energy(&self, state: &SimState) -> f64 {
        -self.mass * state.pos.iter().map(|p| self.scene.gravity.dot(p)).sum::<f64>()
    }

    pub fn load_energy(&self, state: &SimState) -> f64 {
        -state.loads.iter().map(|(k, f)| f.dot(&state.pos[*k])).sum::<f64>()
    }

    /// Kinetic plus elastic plus gravitational and load potential energy, J.
    pub fn energy(&self, state: &SimState) -> f64 {
        self.kinetic_energy(state)
            + self.spring_energy(state)
            + self.bending_energy(state)
            + self.gravity_energy(state)
            + self.load_energy(state)
    }
}
