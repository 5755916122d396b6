use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use anyhow::{Context, Result};
use clothbench_core::eval::PrimitiveKind;
use clothbench_core::sim::{ScenarioResult, SimConfig, SimState, TrajectoryCsv};

use crate::Usage;

/// Read a TOML scenario file. `kind` fills in or checks the scenario kind;
/// `primitive` picks a default-parameter primitive.
pub fn load_config(path: &Path, kind: Option<&str>, primitive: Option<&str>) -> Result<SimConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut doc: toml::Table = text.parse().map_err(|e| Usage(format!("{}: {e}", path.display())))?;
    let scenario = doc
        .entry("scenario")
        .or_insert_with(|| toml::Value::Table(toml::Table::new()));
    let table = scenario
        .as_table_mut()
        .ok_or_else(|| Usage("`scenario` must be a table".into()))?;
    if let Some(kind) = kind {
        match table.get("kind").and_then(|k| k.as_str()) {
            None => {
                table.insert("kind".into(), kind.into());
            }
            Some(found) if found != kind => {
                return Err(Usage(format!("config describes a {found} scenario, not {kind}")).into());
            }
            Some(_) => {}
        }
    }
    if let Some(name) = primitive {
        let p = PrimitiveKind::by_name(name).ok_or_else(|| Usage(format!("unknown primitive {name:?}")))?;
        let value = toml::Value::try_from(p)?;
        table.insert("primitive".into(), value);
    }
    toml::Value::Table(doc)
        .try_into::<SimConfig>()
        .map_err(|e| Usage(format!("{}: {e}", path.display())).into())
}

pub fn run(cfg: &SimConfig, trajectory: Option<&Path>, every: u64) -> Result<ScenarioResult> {
    let params = cfg.param_sets().remove(0);
    match trajectory {
        None => Ok(cfg.run_one(&params, &mut |_: &SimState| {})?),
        Some(out) => {
            let file = File::create(out).with_context(|| format!("creating {}", out.display()))?;
            let mut dump = TrajectoryCsv::new(BufWriter::new(file), every);
            let result = cfg.run_one(&params, &mut |s: &SimState| dump.record(s))?;
            dump.finish()?;
            Ok(result)
        }
    }
}

/// Run every sweep point on its own thread and return results in sweep order.
pub fn sweep(cfg: &SimConfig) -> Result<Vec<(f64, ScenarioResult)>> {
    let sweep = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| Usage("config has no [sweep] table".into()))?;
    let sets = cfg.param_sets();
    let results: Vec<_> = std::thread::scope(|s| {
        let handles: Vec<_> = sets
            .iter()
            .zip(&sweep.values)
            .map(|(p, &v)| {
                s.spawn(move || {
                    let r = cfg.run_one(p, &mut |_: &SimState| {});
                    log::info!("{} = {v} done", sweep.field.name());
                    r
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("sweep worker panicked")).collect()
    });
    sweep
        .values
        .iter()
        .zip(results)
        .map(|(&v, r)| Ok((v, r?)))
        .collect()
}
