//! Seeded Monte Carlo experiments: frequency sweep, residual scaling,
//! collective scaling and zero-signal checks.

pub mod fit;
pub mod heisenberg;
pub mod output;
pub mod runner;
pub mod scaling;
pub mod suite;
pub mod sweep;

pub use fit::{fit_cubic_quartic, loglog_slope, CubicQuarticFit};
pub use heisenberg::{heisenberg_study, HeisenbergResult, HeisenbergRow, HeisenbergSpec};
pub use runner::{derive_seed, map_trials, resolve_jobs};
pub use scaling::{error_scaling, fit_mean_residual, log_grid, EpsilonSummary, ScalingSpec, TrialRecord};
pub use suite::{algebra_report, zero_signal_suite, AlgebraReport, ZeroSignalRecord, ZeroSignalSpec};
pub use sweep::{frequency_sweep, summarize_sweep, SweepRecord, SweepSpec, SweepStat};
pub use output::{to_bytes, write_csv, write_rows, Format};
