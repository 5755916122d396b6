//! JSON registry of cloth objects, sets and measurement records.
//!
//! Stored derived values are checked against their raw inputs on load, so a
//! hand-edited or corrupted file is rejected instead of silently trusted.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cloth::{validate_object, ClothObject, ClothSet, LineElasticity, MechanicalProperties};
use crate::measure::{MeasureError, MeasurementRecord, RawInputs};

pub const SCHEMA_VERSION: u32 = 1;
pub const DERIVATION_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum RegistryError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed registry: {0}")]
    Format(String),
    #[error("unsupported schema version {found}, expected {SCHEMA_VERSION}")]
    SchemaVersionMismatch { found: u64 },
    #[error("measurement {index}: stored value {stored} but inputs give {derived}")]
    DerivationMismatch { index: usize, stored: f64, derived: f64 },
    #[error("measurement {index}: {source}")]
    BadMeasurement {
        index: usize,
        #[source]
        source: MeasureError,
    },
    #[error("{owner} references unknown object {missing:?}")]
    ReferentialIntegrity { owner: String, missing: String },
    #[error("key {key:?} does not match id {id:?}")]
    KeyMismatch { key: String, id: String },
    #[error("id {0:?} already exists")]
    DuplicateId(String),
    #[error("no object {0:?}")]
    UnknownObject(String),
    #[error("no set {0:?}")]
    UnknownSet(String),
    #[error("object {id:?} is invalid: {problems}")]
    InvalidObject { id: String, problems: String },
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Registry {
    pub version: u32,
    #[serde(default)]
    pub objects: BTreeMap<String, ClothObject>,
    #[serde(default)]
    pub sets: BTreeMap<String, ClothSet>,
    #[serde(default)]
    pub measurements: Vec<MeasurementRecord>,
}

impl Default for Registry {
    fn default() -> Self {
        Registry {
            version: SCHEMA_VERSION,
            objects: BTreeMap::new(),
            sets: BTreeMap::new(),
            measurements: Vec::new(),
        }
    }
}

impl Registry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_object(&mut self, obj: ClothObject) -> Result<(), RegistryError> {
        if self.objects.contains_key(&obj.id) {
            return Err(RegistryError::DuplicateId(obj.id));
        }
        let problems = validate_object(&obj);
        if !problems.is_empty() {
            let problems = problems.iter().map(|p| format!("{p:?}")).collect::<Vec<_>>().join(", ");
            return Err(RegistryError::InvalidObject { id: obj.id, problems });
        }
        self.objects.insert(obj.id.clone(), obj);
        Ok(())
    }

    pub fn object(&self, id: &str) -> Result<&ClothObject, RegistryError> {
        self.objects.get(id).ok_or_else(|| RegistryError::UnknownObject(id.into()))
    }

    pub fn create_set(&mut self, set: ClothSet) -> Result<(), RegistryError> {
        if self.sets.contains_key(&set.id) {
            return Err(RegistryError::DuplicateId(set.id));
        }
        for m in &set.members {
            self.object(m).map_err(|_| RegistryError::ReferentialIntegrity {
                owner: format!("set {}", set.id),
                missing: m.clone(),
            })?;
        }
        self.sets.insert(set.id.clone(), set);
        Ok(())
    }

    pub fn set(&self, id: &str) -> Result<&ClothSet, RegistryError> {
        self.sets.get(id).ok_or_else(|| RegistryError::UnknownSet(id.into()))
    }

    /// Adding an existing member is a no-op.
    pub fn add_member(&mut self, set_id: &str, object_id: &str) -> Result<(), RegistryError> {
        self.object(object_id)?;
        let set = self
            .sets
            .get_mut(set_id)
            .ok_or_else(|| RegistryError::UnknownSet(set_id.into()))?;
        if !set.members.iter().any(|m| m == object_id) {
            set.members.push(object_id.to_string());
        }
        Ok(())
    }

    /// Member objects of a set, in set order.
    pub fn members(&self, set_id: &str) -> Result<Vec<ClothObject>, RegistryError> {
        self.set(set_id)?.members.iter().map(|m| self.object(m).cloned()).collect()
    }

    /// Append a record. When it names an object, that object's mechanical
    /// properties are updated with the new value.
    pub fn record(&mut self, rec: MeasurementRecord) -> Result<(), RegistryError> {
        let derived = rec.inputs.derive()?;
        if (derived - rec.value).abs() > DERIVATION_TOLERANCE {
            return Err(RegistryError::DerivationMismatch {
                index: self.measurements.len(),
                stored: rec.value,
                derived,
            });
        }
        if let Some(id) = &rec.object_id {
            let obj = self
                .objects
                .get_mut(id)
                .ok_or_else(|| RegistryError::UnknownObject(id.clone()))?;
            let m = obj.mechanical.get_or_insert_with(MechanicalProperties::default);
            match &rec.inputs {
                RawInputs::Stiffness(_) => m.stiffness = Some(rec.value),
                RawInputs::Friction(_) => m.friction = Some(rec.value),
                RawInputs::Elasticity(e) => {
                    let mut lines: Vec<LineElasticity> =
                        m.elasticity_lines.iter().copied().filter(|l| l.line != e.line).collect();
                    lines.push(LineElasticity {
                        line: e.line,
                        value: rec.value,
                    });
                    lines.sort_by_key(|l| l.line);
                    m.set_elasticity_lines(lines);
                }
            }
        }
        self.measurements.push(rec);
        Ok(())
    }

    /// Check every invariant a loaded file must satisfy.
    pub fn verify(&self) -> Result<(), RegistryError> {
        if self.version != SCHEMA_VERSION {
            return Err(RegistryError::SchemaVersionMismatch {
                found: self.version.into(),
            });
        }
        for (key, obj) in &self.objects {
            if key != &obj.id {
                return Err(RegistryError::KeyMismatch {
                    key: key.clone(),
                    id: obj.id.clone(),
                });
            }
        }
        for (key, set) in &self.sets {
            if key != &set.id {
                return Err(RegistryError::KeyMismatch {
                    key: key.clone(),
                    id: set.id.clone(),
                });
            }
            for m in &set.members {
                if !self.objects.contains_key(m) {
                    return Err(RegistryError::ReferentialIntegrity {
                        owner: format!("set {key}"),
                        missing: m.clone(),
                    });
                }
            }
        }
        for (index, rec) in self.measurements.iter().enumerate() {
            if let Some(id) = &rec.object_id {
                if !self.objects.contains_key(id) {
                    return Err(RegistryError::ReferentialIntegrity {
                        owner: format!("measurement {index}"),
                        missing: id.clone(),
                    });
                }
            }
            let derived = rec
                .inputs
                .derive()
                .map_err(|source| RegistryError::BadMeasurement { index, source })?;
            if !((derived - rec.value).abs() <= DERIVATION_TOLERANCE) {
                return Err(RegistryError::DerivationMismatch {
                    index,
                    stored: rec.value,
                    derived,
                });
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("registry is always serializable");
        s.push('\n');
        s
    }

    /// Parse and verify. The version is checked before the rest of the
    /// document so that future schemas fail with a clear error.
    pub fn from_json(text: &str) -> Result<Self, RegistryError> {
        let raw: serde_json::Value = serde_json::from_str(text).map_err(|e| RegistryError::Format(e.to_string()))?;
        match raw.get("version").and_then(|v| v.as_u64()) {
            Some(v) if v == SCHEMA_VERSION as u64 => {}
            Some(v) => return Err(RegistryError::SchemaVersionMismatch { found: v }),
            None => return Err(RegistryError::Format("missing integer \"version\"".into())),
        }
        let reg: Registry = serde_json::from_value(raw).map_err(|e| RegistryError::Format(e.to_string()))?;
        reg.verify()?;
        Ok(reg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, RegistryError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| RegistryError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    /// Write through a temporary sibling file and rename it into place.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), RegistryError> {
        let path = path.as_ref();
        let io = |source| RegistryError::Io {
            path: path.display().to_string(),
            source,
        };
        let mut tmp = path.as_os_str().to_owned();
        tmp.push(".tmp");
        fs::write(&tmp, self.to_json()).map_err(io)?;
        fs::rename(&tmp, path).map_err(io)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cloth::ReferenceLine;
    use crate::measure::{ElasticityInputs, FrictionInputs, StiffnessInputs};

    fn sample() -> Registry {
        let mut r = Registry::new();
        r.add_object(ClothObject::rectangle("a", 300.0, 300.0, 40.0)).unwrap();
        r.add_object(ClothObject::rectangle("b", 400.0, 300.0, 60.0)).unwrap();
        r.create_set(ClothSet {
            id: "s".into(),
            name: "S".into(),
            source: String::new(),
            members: vec!["a".into(), "b".into()],
        })
        .unwrap();
        let mut rec = MeasurementRecord::measure(RawInputs::Friction(FrictionInputs {
            height: 30.0,
            length: 60.0,
        }))
        .unwrap();
        rec.object_id = Some("a".into());
        r.record(rec).unwrap();
        r
    }

    #[test]
    fn empty_round_trip() {
        let r = Registry::new();
        assert_eq!(Registry::from_json(&r.to_json()).unwrap(), r);
    }

    #[test]
    fn populated_round_trip_through_file() {
        let r = sample();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("reg.json");
        r.save(&path).unwrap();
        assert_eq!(Registry::load(&path).unwrap(), r);
    }

    #[test]
    fn record_updates_object() {
        let r = sample();
        let f = r.object("a").unwrap().mechanical.as_ref().unwrap().friction.unwrap();
        assert!((f - 1.0 / 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn elasticity_records_keep_summary_at_max() {
        let mut r = sample();
        for (line, lf) in [(ReferenceLine::Line1, 330.0), (ReferenceLine::Line2, 315.0), (ReferenceLine::Line1, 306.0)] {
            let mut rec =
                MeasurementRecord::measure(RawInputs::Elasticity(ElasticityInputs::standard(line, 300.0, lf))).unwrap();
            rec.object_id = Some("a".into());
            r.record(rec).unwrap();
        }
        let m = r.object("a").unwrap().mechanical.clone().unwrap();
        assert_eq!(m.elasticity_lines.len(), 2);
        assert!((m.elasticity.unwrap() - 0.05).abs() < 1e-12);
    }

    #[test]
    fn dangling_member_rejected() {
        let mut r = sample();
        r.sets.get_mut("s").unwrap().members.push("ghost".into());
        let err = Registry::from_json(&r.to_json()).unwrap_err();
        assert!(matches!(err, RegistryError::ReferentialIntegrity { .. }), "{err}");
    }

    #[test]
    fn tampered_value_rejected() {
        let mut r = sample();
        r.measurements[0].value += 1e-6;
        let err = Registry::from_json(&r.to_json()).unwrap_err();
        assert!(matches!(err, RegistryError::DerivationMismatch { index: 0, .. }), "{err}");
    }

    #[test]
    fn tiny_rounding_is_tolerated() {
        let mut r = sample();
        r.measurements[0].value += 1e-12;
        assert!(Registry::from_json(&r.to_json()).is_ok());
    }

    #[test]
    fn other_versions_rejected() {
        let text = sample().to_json().replacen("\"version\": 1", "\"version\": 2", 1);
        assert!(matches!(
            Registry::from_json(&text),
            Err(RegistryError::SchemaVersionMismatch { found: 2 })
        ));
    }

    #[test]
    fn duplicate_ids_rejected() {
        let mut r = sample();
        let err = r.add_object(ClothObject::rectangle("a", 1.0, 1.0, 1.0)).unwrap_err();
        assert!(matches!(err, RegistryError::DuplicateId(_)));
    }

    #[test]
    fn record_rejects_inconsistent_value() {
        let mut r = sample();
        let mut rec = MeasurementRecord::measure(RawInputs::Stiffness(StiffnessInputs {
            flat_area: 90_000.0,
            plate_area: 25_000.0,
            draped_area: 50_000.0,
        }))
        .unwrap();
        rec.value = 0.9;
        assert!(matches!(r.record(rec), Err(RegistryError::DerivationMismatch { .. })));
    }

    #[test]
    fn missing_file_is_io_error() {
        assert!(matches!(Registry::load("/nonexistent/reg.json"), Err(RegistryError::Io { .. })));
    }
}
