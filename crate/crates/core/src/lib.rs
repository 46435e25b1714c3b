//! Quadrance graphs over `Z_m^d` and their existential-closure properties.
//!
//! The vertex set is `Z_m^d`; `X ~ Y` when `X != Y` and the quadrance
//! `Q(X, Y) = sum (x_i - y_i)^2` lies in a fixed set of residues, by default
//! `{0, ..., (m-1)/2}`. The crate provides
//!
//! - [`zmod`]: modular arithmetic, square roots and linear algebra over `Z_p`,
//! - [`graph`]: graph construction, bitset neighbourhoods and sphere counts,
//! - [`ec`]: exhaustive and sampled n-e.c. checking with certificates,
//! - [`witness`]: the constructive 3-e.c. witness solver for `p >= 7`, `d >= 5`,
//! - [`paley`]: the `d = 2` quadratic-residue graph versus the Paley graph,
//! - [`cli`]: the `qec` command-line front end.

pub mod bitset;
pub mod cli;
pub mod ec;
pub mod error;
pub mod graph;
pub mod paley;
pub mod witness;
pub mod zmod;

pub use bitset::Bitset;
pub use ec::{check_ec, naive_check_ec, CheckMode, CheckOptions, EcCertificate, EcReport, Verdict};
pub use error::{QecError, Result};
pub use graph::{
    inner_product, norm, quadrance, sphere_table, GraphParams, Point, QuadranceGraph, SphereTable,
    DEFAULT_MATERIALIZE_LIMIT,
};
pub use witness::{find_witness, Pattern3, WitnessPlan, WitnessResult};
pub use zmod::{Modulus, Residue};
