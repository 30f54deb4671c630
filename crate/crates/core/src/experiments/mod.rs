//! Scenario configuration, paired-run orchestration, scaling-parameter
//! sweeps, convergence reports, and all file output.

pub mod config;
pub mod convergence;
pub mod output;
pub mod plot;
pub mod scenario;
pub mod sweep;

pub use config::{ResolvedReference, ResolvedScenario, ScenarioConfig};
pub use convergence::{spatial_report, temporal_report, SpatialReport, TemporalReport};
pub use output::{write_scenario_artifacts, write_sweep_artifacts};
pub use scenario::{run_scenario, ScenarioAnalysis, ScenarioArtifacts};
pub use sweep::{sweep_nu, SweepOutcome, SweepPoint};
