//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Every export has a plain Rust counterpart returning `Result<_, String>`
//! so the logic is testable off the browser.

use clothbench_core::cloth::ReferenceLine;
use clothbench_core::measure::{self, ElasticityInputs, FrictionInputs, PlateSpec, StiffnessInputs};
use clothbench_core::radar::{radar_profile, render_radar, RenderOptions};
use clothbench_core::registry::Registry;
use clothbench_core::sim::{run_drape, triangles, SimParams, SimState};
use std::fmt::Write;
use wasm_bindgen::prelude::*;

const FIXTURE: &str = include_str!("../../../fixtures/registry.json");

/// The bundled example registry.
#[wasm_bindgen]
pub fn fixture_registry() -> String {
    FIXTURE.to_string()
}

pub fn radar_chart(registry_json: &str, set_ids: &[String]) -> Result<String, String> {
    let reg = Registry::from_json(registry_json).map_err(|e| e.to_string())?;
    let profiles = set_ids
        .iter()
        .map(|id| {
            let set = reg.set(id).map_err(|e| e.to_string())?;
            radar_profile(set, &reg.members(id).map_err(|e| e.to_string())?).map_err(|e| e.to_string())
        })
        .collect::<Result<Vec<_>, _>>()?;
    render_radar(&profiles, &RenderOptions::default()).map_err(|e| e.to_string())
}

/// Radar chart SVG for the comma-separated set ids.
#[wasm_bindgen(js_name = radarSvg)]
pub fn radar_svg(registry_json: &str, set_ids: &str) -> Result<String, JsError> {
    let ids: Vec<String> = set_ids.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
    radar_chart(registry_json, &ids).map_err(|e| JsError::new(&e))
}

pub fn property(kind: &str, a: f64, b: f64, c: f64) -> Result<f64, String> {
    let r = match kind {
        "stiffness" => measure::drape_stiffness(&StiffnessInputs {
            flat_area: a,
            plate_area: b,
            draped_area: c,
        }),
        "elasticity" => measure::elasticity(&ElasticityInputs::standard(ReferenceLine::Line1, a, b)),
        "friction" => measure::friction_coefficient(&FrictionInputs { height: a, length: b }),
        other => return Err(format!("unknown property {other:?}")),
    };
    r.map_err(|e| e.to_string())
}

/// Stiffness takes flat, plate and draped areas; elasticity takes rest and
/// loaded lengths; friction takes slide height and surface length.
#[wasm_bindgen]
pub fn calculate(kind: &str, a: f64, b: f64, c: f64) -> Result<f64, JsError> {
    property(kind, a, b, c).map_err(|e| JsError::new(&e))
}

fn top_view(state: &SimState, plate_radius_mm: f64) -> String {
    let half = state
        .pos
        .iter()
        .map(|p| p.x.abs().max(p.y.abs()) * 1e3)
        .fold(plate_radius_mm, f64::max)
        + 10.0;
    let mut svg = format!(
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{:.1} {:.1} {:.1} {:.1}" width="360" height="360">"#,
        -half,
        -half,
        2.0 * half,
        2.0 * half
    );
    svg.push_str(r##"<g fill="#4f7cac" fill-opacity="0.35" stroke="#2d4a66" stroke-width="0.5">"##);
    for t in triangles(state.nx, state.ny) {
        let pts: Vec<String> = t
            .iter()
            .map(|&k| format!("{:.1},{:.1}", state.pos[k].x * 1e3, -state.pos[k].y * 1e3))
            .collect();
        let _ = write!(svg, r#"<polygon points="{}"/>"#, pts.join(" "));
    }
    let _ = write!(
        svg,
        r##"</g><circle cx="0" cy="0" r="{plate_radius_mm:.1}" fill="none" stroke="#c0392b" stroke-dasharray="4 3"/></svg>"##
    );
    svg
}

/// Stiffness and a top-view SVG of a simulated drape test.
pub fn drape(k_bend: f64, grid: usize) -> Result<(f64, String), String> {
    let params = SimParams {
        nx: grid,
        ny: grid,
        k_bend,
        ..SimParams::default()
    };
    let plate = PlateSpec::for_edge(params.width.min(params.height), measure::DEFAULT_COVERAGE_RATIO)
        .map_err(|e| e.to_string())?;
    let out = run_drape(&params, &plate).map_err(|e| e.to_string())?;
    Ok((out.stiffness, top_view(&out.state, plate.diameter / 2.0)))
}

/// JSON `{"stiffness": s, "svg": "..."}`.
#[wasm_bindgen(js_name = drapePreview)]
pub fn drape_preview(k_bend: f64, grid: usize) -> Result<String, JsError> {
    let (stiffness, svg) = drape(k_bend, grid).map_err(|e| JsError::new(&e))?;
    Ok(serde_json::json!({ "stiffness": stiffness, "svg": svg }).to_string())
}
