//! Exhaustive checks on small instances.

mod enumerate;
mod replay;
mod spans;
mod universal;

pub use enumerate::{
    enumerate_maps, enumerate_maps_where, enumerate_realisation_maps, enumerate_realisations,
    format_map, realisation_levels, CandidateFilter, RealisationLevels,
};
pub use replay::{replay_appendix_b, ReplayLog, ReplayStep};
pub use spans::{check_span_universal, Apex, Cone, Cospan, SpanKind, TestObject};
pub use universal::{
    check_counit_universal, check_unit_universal, CheckFailure, UniversalCheckReport,
};
