//! Truncated complete symbols on a circle fibre and their residue traces.

mod symbol;
mod trace;

pub use symbol::{Composition, FormalSymbol, Key, SymbolJson, SymbolTermJson};
pub use trace::{
    check_trace_property, residue_supertrace, residue_trace, trace_space_probe, BaseFunctional, PointDerivative,
    ProbeModel, TraceCheck, TraceProbe, TraceSpaceReport,
};
