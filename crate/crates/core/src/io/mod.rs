//! Scenario documents, green tables and result files.

mod output;
mod scenario;
mod table;

pub use output::{format_number, plot_script_text, write_results, RunOutput, Table};
pub use scenario::{
    apply_overrides, parse_scenario, serialize, InitialState, ProviderKind, ProviderSpec, PumpSpec,
    QubitSpec, RunMode, RunSpec, Scenario, SlotSpec, Spacing, SweepSpec, DEFAULT_SAMPLES,
    DEFAULT_STEADY_HORIZON, DEFAULT_TRANSIENT_HORIZON,
};
pub use table::{load_green_table, write_green_table, GREEN_TABLE_HEADER};
