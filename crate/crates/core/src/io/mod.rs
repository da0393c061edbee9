//! File formats: JSON instances and CSV move traces.

mod instance;
mod trace;

pub use instance::{
    parse_instance, parse_profile, DelayObj, Instance, InstanceFile, MarketDelayObj, ModelKind, PrioritiesSpec, Q,
    StrategyObj, FORMAT_VERSION,
};
pub use trace::{read_trace, write_trace, TRACE_HEADER};
