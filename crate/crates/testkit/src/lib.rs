//! Test-only support: brute-force reference implementations of matching and
//! every statistic, seeded corpus generators, and the bundled fixture.
//!
//! The reference code loops directly over the definitions and shares nothing
//! with the production path beyond the data types.

pub mod checks;
pub mod fixture;
pub mod gen;
pub mod oracle;
