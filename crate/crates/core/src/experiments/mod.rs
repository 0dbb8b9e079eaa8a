//! Replica harness and the statistical checks built on it.

pub mod boundary;
pub mod degree;
pub mod evolution;
pub mod greedy;
pub mod pagamma;

pub use boundary::{boundary_growth_check, BoundaryReport};
pub use degree::{degree_watch, pure_birth_martingale, DegreeWatchConfig, DegreeWatchReport, MartingaleReport};
pub use evolution::{replay_oracle, run_evolution_experiment, run_replica, EvolutionReport, ReplicaResult, HYDRO_GRID};
pub use greedy::{fit_kappa_slack, greedy_experiment, GreedyConfig, GreedyStart, GreedyRecord};
pub use pagamma::{verify_pagamma, PaGammaReport};
