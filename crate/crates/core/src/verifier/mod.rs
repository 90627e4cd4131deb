//! Model checking: table certificates, exhaustive and sampled sweeps.

mod certify;
mod equivariance;
mod explore;
mod sweep;

pub use certify::{
    certify_table, rules_for, ClauseVerdict, TableCertificateReport, Q3_DEPTH_BOUND,
};
pub use equivariance::{equivariance_check, EquivarianceWitness};
pub use explore::{
    explore, Exploration, ExploreLimits, Failure, ResolverPolicy, TransitionPair, ViolationKind,
    GATHERING,
};
pub use sweep::{
    check_lower_bound, check_transitions, cube_measure, grid_measure, replay_grid,
    replay_hypercube, sweep, sweep_grid, sweep_hypercube, trace_pairs, PlacementPolicy,
    SchedulePolicy, SweepReport, SweepSpec, SweepTopology, TransitionTable, Violation,
    LISTED_CYCLES, MAX_INSTANCES,
};
