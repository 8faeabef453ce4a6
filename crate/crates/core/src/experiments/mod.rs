//! Scenario presets, experiment files, Monte Carlo trials and CSV export.

pub mod config;
pub mod export;
pub mod goodset;
pub mod presets;
pub mod trials;

pub use config::Experiment;
pub use export::{write_goodset_csv, write_trials_csv};
pub use goodset::{binomial_tail_oracle, estimate_good_set_probability, GoodSetPoint, GoodSetReport};
pub use presets::{scenario_preset, Scenario, ScenarioPreset};
pub use trials::{run_trial, run_trials, trial_seed, MeanEstimate, TrialReport, TrialSummary};
