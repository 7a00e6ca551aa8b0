//! Test oracles and corpus generators shared by the integration tests.
//!
//! Every oracle here avoids the code path it checks: Lie derivatives come
//! from numerically integrated flows, polynomial identities from a
//! separate expansion, finite topologies from brute-force enumeration.

pub mod corpus;
pub mod pullback;
pub mod poly;
pub mod topology;

/// Relative difference with an absolute floor.
pub fn rel_err(a: f64, b: f64, floor: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(floor)
}
