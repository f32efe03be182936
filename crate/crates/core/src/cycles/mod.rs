//! Time integration, periodic orbits and their one-parameter families.

pub mod band;
pub mod branch;
pub mod flc;
pub mod integrate;
pub mod shooting;

pub use band::{band_of_frequency, classify_band, Band, TIME_SCALE};
pub use integrate::{first_crossing, integrate, integrate_tol, IntegratorOptions, Record, Section, Trajectory};
pub use shooting::{cycle_from_transient, find_cycle, flow_map, limit_cycle_from_shot, shoot, LimitCycle, Phase, ShootOptions};
pub use branch::{
    continue_cycles, continue_from_hopf, detect_fold_of_cycles, detect_snic, mark_snic, seed_from_hopf, ContinuationOptions, CycleBranch,
    CycleEvent, CycleFold, CyclePoint, Termination,
};
pub use flc::{fold_set, trace_flc_curve, FlcCurve, FlcOptions, FlcReport, FlcSlice};
