//! Test-instance generators, the JSON document format and the report
//! functions behind the command-line tool.

mod document;
mod generate;
mod report;
mod selftest;

pub use document::ComplexDocument;
pub use generate::{
    assemble, chirality_family, gen_elementary, gen_random, random_matrix, Block, Instance, Profile, Rng,
};
pub use report::{circle_report, split_report, torsion_report, SPLIT_DEFAULT_TOL};
pub use selftest::{selftest, CheckOutcome};

/// Environment variable overriding the default tolerance (1e-9).
pub const TOL_ENV: &str = "RTORSION_TOL";

/// Default tolerance, or the value of [`TOL_ENV`] when it parses as a
/// positive number.
pub fn default_tolerance() -> f64 {
    std::env::var(TOL_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<f64>().ok())
        .filter(|t| *t > 0.0 && t.is_finite())
        .unwrap_or(1e-9)
}
