//! Recursive towers, their place decomposition and ramification data.

mod analysis;
mod descriptor;
mod funcrep;
mod local;

pub use analysis::{
    LevelDump, PlaceDump, PlaceId, PlaceNode, Source, Tower, TowerDivisor, TowerDump, MAX_ANALYSIS_DEPTH,
};
pub use descriptor::{make_tower, TowerDescriptor, TowerName};
pub use funcrep::FunctionRep;
pub use local::{
    base_frame, classify_step, lift_frame, ramified_uniformizer_relation, with_precision, BaseChart,
    LiftChart, LocalFrame, StepKind, StepLocal,
};
