//! Generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use clothbench_core::cloth::{
    ClothObject, ClothSet, ColorLabel, ConstructionTechnique, Dimension, LineElasticity, MaterialLabel,
    MechanicalProperties, ReferenceLine, ShapeCategory,
};
use clothbench_core::measure::{
    ElasticityInputs, FrictionInputs, MeasurementRecord, ProtocolNotes, RawInputs, StiffnessInputs,
};
use clothbench_core::registry::Registry;
use proptest::prelude::*;
use proptest::sample::subsequence;

pub fn shape() -> impl Strategy<Value = ShapeCategory> {
    prop_oneof![
        Just(ShapeCategory::Rectangular),
        Just(ShapeCategory::Shirt),
        Just(ShapeCategory::TShirt),
        Just(ShapeCategory::Top),
        Just(ShapeCategory::Pants),
        Just(ShapeCategory::Skirt),
        "\\PC{1,10}".prop_map(ShapeCategory::Other),
    ]
}

pub fn material() -> impl Strategy<Value = MaterialLabel> {
    prop_oneof![
        Just(MaterialLabel::Cotton),
        Just(MaterialLabel::Linen),
        Just(MaterialLabel::Silk),
        Just(MaterialLabel::Wool),
        Just(MaterialLabel::Polyester),
        Just(MaterialLabel::Denim),
        Just(MaterialLabel::Elastane),
        "[a-z ]{1,8}".prop_map(MaterialLabel::Other),
    ]
}

fn mechanical() -> impl Strategy<Value = Option<MechanicalProperties>> {
    let ratio = || proptest::option::of(0.0..1.5f64);
    proptest::option::of((ratio(), ratio(), subsequence(ReferenceLine::ALL.to_vec(), 0..=4), 0.0..2.0f64).prop_map(
        |(stiffness, friction, lines, e)| {
            let mut m = MechanicalProperties {
                stiffness,
                friction,
                ..Default::default()
            };
            m.set_elasticity_lines(
                lines
                    .into_iter()
                    .enumerate()
                    .map(|(k, line)| LineElasticity {
                        line,
                        value: e / (k + 1) as f64,
                    })
                    .collect(),
            );
            m
        },
    ))
}

pub fn object(id: String) -> impl Strategy<Value = ClothObject> {
    (
        "\\PC{0,16}",
        shape(),
        subsequence(ReferenceLine::ALL.to_vec(), 1..=4),
        1.0..2000.0f64,
        0.1..5000.0f64,
        subsequence(ColorLabel::ALL.to_vec(), 0..=10),
        any::<bool>(),
        proptest::collection::btree_set(material(), 0..4),
        prop_oneof![
            Just(ConstructionTechnique::Woven),
            Just(ConstructionTechnique::Knitted),
            "[a-z]{1,8}".prop_map(ConstructionTechnique::Other),
        ],
        mechanical(),
    )
        .prop_map(
            move |(name, shape, lines, length, weight, colors, has_print, materials, construction, mechanical)| {
                ClothObject {
                    id: id.clone(),
                    name,
                    shape,
                    dimensions: lines
                        .into_iter()
                        .enumerate()
                        .map(|(k, line)| Dimension {
                            line,
                            length: length + k as f64,
                        })
                        .collect(),
                    weight,
                    colors: colors.into_iter().collect::<BTreeSet<_>>(),
                    has_print,
                    materials,
                    construction,
                    mechanical,
                }
            },
        )
}

fn raw_inputs() -> impl Strategy<Value = RawInputs> {
    prop_oneof![
        (1000.0..1e5f64, 0.05..0.6f64, 0.0..1.0f64).prop_map(|(flat, p, s)| {
            let plate = flat * p;
            RawInputs::Stiffness(StiffnessInputs {
                flat_area: flat,
                plate_area: plate,
                draped_area: plate + s * (flat - plate),
            })
        }),
        (1.0..1000.0f64, 0.0..1.0f64, 1.0..1000.0f64).prop_map(|(li, e, load)| {
            RawInputs::Elasticity(ElasticityInputs {
                line: ReferenceLine::Line1,
                rest_length: li,
                loaded_length: li * (1.0 + e),
                load,
            })
        }),
        (1.0..1000.0f64, 0.0..0.99f64).prop_map(|(l, r)| RawInputs::Friction(FrictionInputs {
            height: l * r,
            length: l,
        })),
    ]
}

fn notes() -> impl Strategy<Value = ProtocolNotes> {
    (
        proptest::option::of(10.0..500.0f64),
        proptest::option::of(0.01..5.0f64),
        proptest::option::of(0u32..4),
        proptest::option::of("\\PC{0,12}"),
        proptest::option::of("\\PC{0,24}"),
    )
        .prop_map(|(plate_diameter, mm_per_px, folds, surface, text)| ProtocolNotes {
            plate_diameter,
            mm_per_px,
            folds,
            surface,
            text,
        })
}

/// A registry that satisfies every load-time invariant.
pub fn registry() -> impl Strategy<Value = Registry> {
    proptest::collection::btree_set("[a-z][a-z0-9_-]{0,7}", 0..6)
        .prop_flat_map(|ids| {
            let ids: Vec<String> = ids.into_iter().collect();
            let objects: Vec<_> = ids.iter().cloned().map(object).collect();
            let pick = ids.clone();
            let sets = proptest::collection::btree_map(
                "[A-Z]{1,5}",
                (
                    "\\PC{0,10}",
                    "\\PC{0,10}",
                    subsequence(pick.clone(), 0..=pick.len()),
                ),
                0..4,
            );
            let owner = if ids.is_empty() {
                Just(None).boxed()
            } else {
                proptest::option::of(proptest::sample::select(ids.clone())).boxed()
            };
            let measurements = proptest::collection::vec(
                (raw_inputs(), owner, proptest::option::of("[0-9T:Z-]{10,20}"), notes()),
                0..6,
            );
            (objects, sets, measurements)
        })
        .prop_map(|(objects, sets, measurements)| Registry {
            version: 1,
            objects: objects.into_iter().map(|o| (o.id.clone(), o)).collect::<BTreeMap<_, _>>(),
            sets: sets
                .into_iter()
                .map(|(id, (name, source, members))| {
                    (
                        id.clone(),
                        ClothSet {
                            id,
                            name,
                            source,
                            members,
                        },
                    )
                })
                .collect(),
            measurements: measurements
                .into_iter()
                .map(|(inputs, object_id, timestamp, notes)| MeasurementRecord {
                    value: inputs.derive().unwrap(),
                    object_id,
                    inputs,
                    timestamp,
                    notes,
                })
                .collect(),
        })
}
