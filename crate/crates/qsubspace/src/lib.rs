//! Constant dimension subspace codes over small finite fields.
//!
//! A constant dimension code is a set of `k`-dimensional subspaces of
//! `F_q^v` in which every pair of codewords intersects in a subspace of
//! bounded dimension; the codes built here intersect pairwise in at most a
//! point (dimension <= 1), i.e. they have subspace distance >= 2k - 2.
//!
//! The crate provides, bottom up:
//!
//! * [`gf`] — arithmetic in `F_q` for prime powers `q = p^e`, extension
//!   towers `F_{q^m}/F_q`, and linearized polynomials;
//! * [`linalg`] — matrices and canonical-form subspaces over `F_q`,
//!   subspace enumeration, and Gaussian binomials;
//! * [`cdc`] — the code container, exhaustive/sampled pairwise
//!   verification, cliques of pairwise disjoint codewords, and the
//!   line-oriented file format;
//! * [`mrd`] — maximum rank distance (Gabidulin) codes, their lifts to
//!   subspace codes, and two expurgated lifted codes in dimensions 6 and 7;
//! * [`combiner`] — the combination construction gluing two codes along a
//!   distinguished subspace, its size formula, the iterated series it
//!   generates, and the resulting code in `F_q^9`;
//! * [`bounds`] — a catalog of closed-form cardinality bounds;
//! * [`search`] — candidate enumeration and exact/greedy clique search for
//!   augmenting a code by additional compatible subspaces.

pub mod cdc;
pub mod combiner;
pub mod error;
pub mod gf;
pub mod linalg;
pub mod mrd;
pub mod search;

pub use cdc::{CodeStats, ConstantDimensionCode, VerifyMode, VerifyReport};
pub use combiner::{
    auto_s_prime, bound_catalog, bound_value, bounds_for, combine, corollary_943, predicted_size,
    series, series_base_from_code, series_size_formula, standard_base, BoundEntry, CombineReport,
    CombineSpec, Origin, SeriesBase, SeriesResult, Strategy,
};
pub use error::{Error, Result};
pub use gf::{Field, LinearizedPoly, Tower};
pub use linalg::{
    direct_sum_map, enumerate_subspaces, enumerate_subspaces_capped, gaussian_binomial, MatrixFq,
    Subspace, DEFAULT_ENUMERATION_CAP,
};
pub use mrd::{
    expurgate6, expurgate7, gabidulin, lift, lift_transpose, mrd_distance_scan, rank_distance,
    GraphCode, MrdScan, RankMetricCode,
};
pub use search::{
    candidate_planes, exact_augment, exact_max_clique, extend_disjoint_clique, greedy_augment,
    Augmentation, CliqueResult, CompatibilityGraph, DEFAULT_SEARCH_BUDGET,
};
