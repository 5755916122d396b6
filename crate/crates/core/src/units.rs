//! Unit-tagged serialization helpers.
//!
//! Quantities are persisted as `{"value": 12.5, "unit": "mm"}` so that a file
//! written by one lab cannot be silently read with a different unit by another.
//! Use through `#[serde(with = "units::mm")]` and friends.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Serialize, Deserialize)]
struct Tagged<'a> {
    value: f64,
    #[serde(borrow)]
    unit: std::borrow::Cow<'a, str>,
}

fn write<S: Serializer>(value: f64, unit: &'static str, s: S) -> Result<S::Ok, S::Error> {
    Tagged {
        value,
        unit: unit.into(),
    }
    .serialize(s)
}

fn read<'de, D: Deserializer<'de>>(unit: &'static str, d: D) -> Result<f64, D::Error> {
    let tagged = Tagged::deserialize(d)?;
    if tagged.unit != unit {
        return Err(D::Error::custom(format!(
            "expected unit \"{unit}\", found \"{}\"",
            tagged.unit
        )));
    }
    Ok(tagged.value)
}

macro_rules! unit_module {
    ($name:ident, $unit:literal) => {
        #[doc = concat!("Serialize an `f64` tagged with unit `", $unit, "`.")]
        pub mod $name {
            use serde::{Deserializer, Serializer};

            pub const UNIT: &str = $unit;

            pub fn serialize<S: Serializer>(value: &f64, s: S) -> Result<S::Ok, S::Error> {
                super::write(*value, $unit, s)
            }

            pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
                super::read($unit, d)
            }

            /// Same as the parent module, for `Option<f64>` fields.
            pub mod option {
                use serde::{Deserialize, Deserializer, Serialize, Serializer};

                #[derive(Serialize, Deserialize)]
                #[serde(transparent)]
                struct Wrap(#[serde(with = "super")] f64);

                pub fn serialize<S: Serializer>(value: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
                    value.map(Wrap).serialize(s)
                }

                pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
                    Ok(Option::<Wrap>::deserialize(d)?.map(|w| w.0))
                }
            }
        }
    };
}

unit_module!(mm, "mm");
unit_module!(mm2, "mm2");
unit_module!(grams, "g");
unit_module!(ratio, "ratio");
unit_module!(newtons, "N");
