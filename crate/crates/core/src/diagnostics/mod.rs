//! Discrete checks of the a-priori structure: invariant region, entropy
//! balance, weak and entropy residuals, total variation, norms and
//! vanishing-viscosity studies.

mod convergence;
mod ledger;
mod norms;
mod region;
mod residual;

pub use convergence::{
    convergence_study, fit_order, ConvergenceRow, ConvergenceTable, Reference, CONVERGENCE_SCHEMA,
};
pub use ledger::{
    dissipation_rate, entropy_balance_residual, total_entropy, EntropyLedger, LedgerRecord,
};
pub use norms::{
    locate_crossing, lp_distance, total_variation, total_variation_periodic, window_l1_distance,
    LpNorm, TvMonitor,
};
pub use region::{invariant_region_check, RegionReport, REGION_SCHEMA};
pub use residual::{
    entropy_inequality_residual, entropy_inequality_residual_viscous, standard_test_bank,
    weak_residual, BumpTest, SpaceTimeWindow, MAX_SNAPSHOT_GAP,
};
