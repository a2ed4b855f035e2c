//! Configuration, presets, the numerical studies and their output files.

pub mod config;
pub mod fit;
pub mod output;
pub mod presets;
pub mod studies;
pub mod verify;

pub use config::ExperimentConfig;
pub use fit::{loglog_slope, power_law_fit, PowerFit, SlopeFit};
pub use presets::{build_preset, InitialData, PresetParams, PRESET_NAMES};
pub use studies::{
    almost_conservation_study, fixed_time_difference_study, growth_study, initial_state,
    local_time_heuristic, run_almost_conservation_study, run_fixed_time_difference_study,
    run_growth_study, run_local_time_heuristic, run_simulation, theorem_exponent, AlmostConsStudy,
    FixedDiffStudy, GrowthStudy, LocalTimeRow,
};
pub use verify::{verify_suite, CheckOutcome};
