//! Exact characteristic-function machinery for Heyde-type characterization
//! theorems on finite abelian groups of odd order.

pub mod cyclotomic;
pub mod distribution;
pub mod error;
pub mod generators;
pub mod group;
pub mod heyde;
pub mod json;
pub mod lemmas;
pub mod morphisms;
pub mod sweep;

pub use cyclotomic::{cyclo, CycloElement, CycloOp, CyclotomicField};
pub use distribution::{
    cross_check_predicates, equals_one_set, fourier_inversion, has_haar_factor, unit_modulus_set,
    CharacteristicFunction, Distribution, PmfEntry,
};
pub use error::{Error, Result};
pub use generators::{
    admissible_automorphisms, all_automorphisms, construct_instance, count_distributions,
    enumerate_distributions, instance_rng, random_construction_spec, random_distribution,
    random_distribution_in, Construction, ConstructionFile, ConstructionSpec,
};
pub use group::{
    validate_spec, Component, ComponentKind, DualElement, GroupElement, GroupOp, GroupSpec,
    RawComponent, RootOfUnity, Subgroup, SubgroupEmbedding,
};
pub use heyde::{
    check_mixed_product, check_quasicyclic, classify_corollary, decompose, mixed_product_spec,
    reduce_mixed_product, reduce_quasicyclic, reduce_to_subgroup, CorollaryCheck, CorollaryReport,
    DecompositionFlags, GShape, HeydeDecomposition, HeydeInstance, InstanceFile, MixedBranch,
    MixedMass, MixedProductReport, QuasicyclicPoint, QuasicyclicReport, Reduction,
};
pub use json::{JsonInt, JsonRational};
pub use lemmas::{
    difference_lemma_log_check, finite_difference, lemma_fixture, verify_difference_lemma,
    verify_newle1, verify_polynomial_constancy, DifferenceLemmaReport, DualFunction, LawValue,
    Newle1Report, Violation,
};
pub use morphisms::{truncate_unit, unit_to_endo, Endomorphism, PAdicUnit};
pub use sweep::{
    check_instance, run_sweep, AutomorphismFilter, Counterexample, Counts, InstanceOutcome,
    SweepConfig, SweepMode, SweepReport,
};
