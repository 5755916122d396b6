//! Cloth characterisation toolkit.
//!
//! * [`cloth`]: object schema and validation.
//! * [`mask`]: segmentation and pixel areas.
//! * [`measure`]: stiffness, elasticity and friction protocols.
//! * [`radar`]: cloth-set ranges and radar charts.
//! * [`eval`]: manipulation primitive metrics.
//! * [`sim`]: mass-spring cloth simulator used to cross-check the above.
//! * [`registry`]: JSON persistence of objects, sets and measurements.

pub mod cloth;
pub mod eval;
pub mod mask;
pub mod measure;
pub mod radar;
pub mod registry;
pub mod sim;
pub mod units;
