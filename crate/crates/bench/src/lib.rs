//! Fixtures shared by the benchmarks.

use heyde_core::{
    admissible_automorphisms, construct_instance, ComponentKind, ConstructionSpec, GroupSpec,
    HeydeInstance,
};

pub fn z9z5() -> GroupSpec {
    GroupSpec::new(&[(3, 2, ComponentKind::Finite), (5, 1, ComponentKind::Finite)]).unwrap()
}

pub fn z27() -> GroupSpec {
    GroupSpec::cyclic(3, 3).unwrap()
}

/// A symmetric instance with a nontrivial `G`.
pub fn symmetric_instance(spec: &GroupSpec, seed: u64) -> HeydeInstance {
    let subgroups = spec.enumerate_subgroups();
    let g = &subgroups[subgroups.len() / 2];
    let alpha = admissible_automorphisms(spec, g)
        .pop()
        .expect("−I is admissible");
    construct_instance(&ConstructionSpec::random(spec, g, &alpha, 12, seed))
        .expect("valid construction")
        .instance
}
