//! Exact combinatorial back-ends over rationals.

mod simplex;
mod transport;

pub use simplex::{lp_feasible, LinearFeasibility, LpOutcome};
pub use transport::{transport_feasible, TransportInstance, TransportOutcome};
