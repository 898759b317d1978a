//! Construction laboratory for extremal graphs built from finite geometries.
//!
//! The crate builds incidence structures (affine planes, the symplectic
//! quadrangle W(q)), derives randomized sub-hypergraphs from them, colors
//! their lines to obtain dense K_{s+r}-free graphs, and certifies the claimed
//! structural properties either exactly (exhaustive search at desk scale) or
//! statistically (seeded trials with reported frequencies).
//!
//! Everything is deterministic: all randomness flows through the counter-based
//! generator in [`rng`], so identical inputs and seeds reproduce bit-identical
//! artifacts on every platform.

pub mod alpha;
pub mod cliques;
pub mod containment;
pub mod drc;
pub mod erdos_rogers;
mod error;
pub mod field;
pub mod geometry;
pub mod graph;
pub mod hypergraph;
pub mod incidence;
pub mod params;
pub mod report;
pub mod rng;
pub mod util;

pub use alpha::{alpha_s_exact, alpha_s_probe, AlphaCertificate, AlphaGuards};
pub use cliques::{find_clique, max_clique, CliqueAnswer, CliqueGuards, CliqueMode, CliqueQuery};
pub use containment::check_clique_dangerous_containment;
pub use drc::{drc_find, extract_independent_set, DrcOutcome, DrcWitness, ExtractOutcome};
pub use erdos_rogers::erdos_rogers_exact;
pub use error::{Error, Result};
pub use field::{is_prime, next_prime_at_least, PrimeField};
pub use geometry::{
    build_affine_plane, build_w_quadrangle, remove_parallel_class, verify_gq_axioms,
    ParallelClassification,
};
pub use graph::{
    build_gq_graph, build_partite_graph, build_zarankiewicz_bipartite, color_lines,
    join_construction, two_block_construction, BipartiteGraph, BitGraph, PartitionAssignment,
    Provenance, SimpleGraph,
};
pub use hypergraph::{
    count_incidences, enumerate_dangerous_type1, enumerate_dangerous_type2, sample_h1, sample_h2,
    verify_h_properties, DangerousKind, DangerousSet, SamplingMode, SamplingSpec,
};
pub use incidence::{IncidenceStructure, PairCover, StructureKind};
pub use params::{
    derive_params_manual, derive_params_mid_delta, derive_params_small_delta, evaluate_bound,
    fraction_error_bound, BoundReport, ConstructionParams, Regime,
};
pub use report::{CheckStatus, VerificationReport};
