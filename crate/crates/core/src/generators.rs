//! Fixture construction and instance generation.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::distribution::{Distribution, PmfEntry};
use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupSpec, Subgroup};
use crate::heyde::HeydeInstance;
use crate::morphisms::Endomorphism;

/// Generator for instance `index` of a run seeded with `seed`.
pub fn instance_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Every automorphism of `spec`, in lexicographic order of multipliers.
pub fn all_automorphisms(spec: &GroupSpec) -> Vec<Endomorphism> {
    let mut out: Vec<Vec<i64>> = vec![Vec::new()];
    for (c, &order) in spec.components().iter().zip(spec.component_orders()) {
        let units: Vec<i64> = (1..order as i64).filter(|m| m % c.p as i64 != 0).collect();
        out = out
            .into_iter()
            .flat_map(|prefix| {
                units.iter().map(move |&m| {
                    let mut v = prefix.clone();
                    v.push(m);
                    v
                })
            })
            .collect();
    }
    out.into_iter()
        .map(|m| spec.endomorphism(&m).expect("units are valid multipliers"))
        .collect()
}

/// Automorphisms with `I − α` invertible on `G`.
pub fn admissible_automorphisms(spec: &GroupSpec, g: &Subgroup) -> Vec<Endomorphism> {
    all_automorphisms(spec)
        .into_iter()
        .filter(|a| spec.image_of_subgroup(&spec.one_minus(a), g) == *g)
        .collect()
}

/// Masses `c/d` with `d ≤ max_denominator`, placed on uniformly random points
/// of `K`.
pub fn random_distribution_in<R: Rng>(
    spec: &GroupSpec,
    k: &Subgroup,
    max_denominator: u64,
    rng: &mut R,
) -> Distribution {
    let points: Vec<GroupElement> = spec.subgroup_elements(k).collect();
    let d = rng.random_range(1..=max_denominator.max(1));
    let mut counts = vec![0u64; points.len()];
    for _ in 0..d {
        counts[rng.random_range(0..points.len())] += 1;
    }
    let den = BigInt::from(d);
    let pmf = points
        .into_iter()
        .zip(counts)
        .filter(|&(_, c)| c > 0)
        .map(|(x, c)| (x, BigRational::new(BigInt::from(c), den.clone())))
        .collect();
    Distribution::from_map(spec, pmf)
}

pub fn random_distribution(spec: &GroupSpec, max_denominator: u64, seed: u64) -> Distribution {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_distribution_in(spec, &spec.whole(), max_denominator, &mut rng)
}

/// Every pmf on `spec` whose masses are multiples of `1/denominator`,
/// ordered by the mass vector read as a composition, largest first.
pub fn enumerate_distributions(
    spec: &GroupSpec,
    denominator: u64,
) -> impl Iterator<Item = Distribution> + '_ {
    let n = spec.size();
    let den = BigInt::from(denominator.max(1));
    Compositions::new(denominator.max(1), n).map(move |parts| {
        let pmf = parts
            .iter()
            .enumerate()
            .filter(|&(_, &c)| c > 0)
            .map(|(i, &c)| {
                (
                    spec.element_at(i),
                    BigRational::new(BigInt::from(c), den.clone()),
                )
            })
            .collect();
        Distribution::from_map(spec, pmf)
    })
}

/// Number of pmfs [`enumerate_distributions`] yields: `C(d + n − 1, n − 1)`.
pub fn count_distributions(n: u64, denominator: u64) -> u128 {
    let (top, k) = (u128::from(denominator + n - 1), u128::from(n - 1));
    (0..k).fold(1u128, |acc, i| acc * (top - i) / (i + 1))
}

/// Compositions of `total` into `parts` nonnegative parts.
struct Compositions {
    current: Option<Vec<u64>>,
}

impl Compositions {
    fn new(total: u64, parts: usize) -> Self {
        let current = (parts > 0).then(|| {
            let mut v = vec![0; parts];
            v[0] = total;
            v
        });
        Compositions { current }
    }
}

impl Iterator for Compositions {
    type Item = Vec<u64>;

    fn next(&mut self) -> Option<Vec<u64>> {
        let out = self.current.clone()?;
        let v = self.current.as_mut().expect("checked above");
        let n = v.len();
        // Move one unit from the last nonzero part before the tail to its
        // right neighbour and collect the tail there.
        let pos = (0..n.saturating_sub(1)).rev().find(|&i| v[i] > 0);
        match pos {
            None => self.current = None,
            Some(i) => {
                let tail: u64 = v[i + 1..].iter().sum();
                v[i] -= 1;
                for x in &mut v[i + 1..] {
                    *x = 0;
                }
                v[i + 1] = tail + 1;
            }
        }
        Some(out)
    }
}

/// Input of the sufficiency construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstructionSpec {
    pub g: Subgroup,
    pub alpha: Endomorphism,
    pub rho: Distribution,
    pub x2: GroupElement,
}

impl ConstructionSpec {
    /// Seeded `ρ` on `G` and `x₂` anywhere in the group.
    pub fn random(
        spec: &GroupSpec,
        g: &Subgroup,
        alpha: &Endomorphism,
        max_denominator: u64,
        seed: u64,
    ) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random_distribution_in(spec, g, max_denominator, &mut rng);
        let x2 = spec.element_at(rng.random_range(0..spec.size()));
        ConstructionSpec {
            g: g.clone(),
            alpha: alpha.clone(),
            rho,
            x2,
        }
    }
}

/// JSON form of a [`ConstructionSpec`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructionFile {
    pub spec: GroupSpec,
    pub g: Subgroup,
    pub alpha: Endomorphism,
    pub rho: Vec<PmfEntry>,
    pub x2: GroupElement,
}

impl ConstructionFile {
    pub fn to_spec(&self) -> Result<ConstructionSpec> {
        let g = self.spec.subgroup(self.g.exponents().to_vec())?;
        self.spec.check_endomorphism(&self.alpha)?;
        self.spec.check(&self.x2)?;
        Ok(ConstructionSpec {
            g,
            alpha: self.alpha.clone(),
            rho: Distribution::from_entries(&self.spec, &self.rho)?,
            x2: self.x2.clone(),
        })
    }
}

impl From<&ConstructionSpec> for ConstructionFile {
    fn from(cs: &ConstructionSpec) -> Self {
        ConstructionFile {
            spec: cs.rho.spec().clone(),
            g: cs.g.clone(),
            alpha: cs.alpha.clone(),
            rho: cs.rho.to_entries(),
            x2: cs.x2.clone(),
        }
    }
}

/// Seeded choice of `G`, an admissible `α` and then `ρ`, `x₂`.
///
/// `None` when no automorphism in `alphas` is admissible for the drawn `G`.
pub fn random_construction_spec(
    spec: &GroupSpec,
    alphas: &[Endomorphism],
    max_denominator: u64,
    rng: &mut ChaCha8Rng,
) -> Option<ConstructionSpec> {
    let subgroups = spec.enumerate_subgroups();
    let g = subgroups[rng.random_range(0..subgroups.len())].clone();
    let admissible: Vec<_> = admissible_automorphisms(spec, &g)
        .into_iter()
        .filter(|a| alphas.contains(a))
        .collect();
    if admissible.is_empty() {
        return None;
    }
    let alpha = admissible[rng.random_range(0..admissible.len())].clone();
    Some(ConstructionSpec::random(
        spec,
        &g,
        &alpha,
        max_denominator,
        rng.random(),
    ))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Construction {
    #[serde(skip)]
    pub instance: HeydeInstance,
    pub lambda: Distribution,
    pub x1: GroupElement,
    pub x2: GroupElement,
    /// Subgroup generated by `supp λ − supp λ`.
    pub effective_g: Subgroup,
}

/// `λ = ρ * m_((I+α)(G))`, `x₁ = −αx₂`, `μ_j = λ * E_(x_j)`.
pub fn construct_instance(cs: &ConstructionSpec) -> Result<Construction> {
    let spec = cs.rho.spec();
    spec.check_endomorphism(&cs.alpha)?;
    spec.check(&cs.x2)?;
    if !spec.contains_subgroup(&cs.g) {
        return Err(Error::SpecMismatch(format!(
            "{:?} is not a subgroup of {spec}",
            cs.g
        )));
    }
    if !spec.is_automorphism(&cs.alpha) {
        return Err(Error::NotAutomorphism);
    }
    if spec.image_of_subgroup(&spec.one_minus(&cs.alpha), &cs.g) != cs.g {
        return Err(Error::ConstructionHypothesis(
            "I − α is not invertible on G".into(),
        ));
    }
    if !cs.rho.is_supported_in(&cs.g) {
        return Err(Error::ConstructionHypothesis(
            "ρ is not supported in G".into(),
        ));
    }
    let plus = spec.image_of_subgroup(&spec.one_plus(&cs.alpha), &cs.g);
    let lambda = cs.rho.convolve(&Distribution::haar(spec, &plus)?)?;
    let x1 = spec.neg(&spec.apply(&cs.alpha, &cs.x2));
    let instance = HeydeInstance::new(lambda.shift(&x1), lambda.shift(&cs.x2), cs.alpha.clone())?;
    if !instance.is_conditionally_symmetric() {
        return Err(Error::ConstructionNotSymmetric);
    }
    let x0 = lambda.support().next().expect("nonempty support").clone();
    let diffs: Vec<_> = lambda.support().map(|x| spec.sub(x, &x0)).collect();
    let effective_g = spec.subgroup_generated(diffs.iter());
    Ok(Construction {
        instance,
        lambda,
        x1,
        x2: cs.x2.clone(),
        effective_g,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heyde::decompose;

    fn el(spec: &GroupSpec, c: &[i64]) -> GroupElement {
        spec.element(c).unwrap()
    }

    #[test]
    fn enumeration_counts() {
        let z3 = GroupSpec::cyclic(3, 1).unwrap();
        let all: Vec<_> = enumerate_distributions(&z3, 2).collect();
        assert_eq!(all.len(), 6);
        let mut dedup = all.clone();
        dedup.dedup();
        assert_eq!(dedup.len(), 6);
        let ones: Vec<_> = enumerate_distributions(&z3, 1).collect();
        assert_eq!(ones.len(), 3);
        assert!(ones.iter().all(|d| d.is_degenerate()));
        let specs = [
            (GroupSpec::cyclic(3, 1).unwrap(), 4),
            (GroupSpec::cyclic(5, 1).unwrap(), 3),
            (GroupSpec::cyclic(3, 2).unwrap(), 2),
        ];
        for (spec, d) in specs {
            let brute = enumerate_distributions(&spec, d).count() as u128;
            assert_eq!(brute, count_distributions(spec.order(), d));
        }
        assert_eq!(count_distributions(3, 2), 6);
    }

    #[test]
    fn random_is_deterministic() {
        let g = GroupSpec::cyclic(3, 2).unwrap();
        assert_eq!(
            random_distribution(&g, 16, 7),
            random_distribution(&g, 16, 7)
        );
        let a = instance_rng(1, 2).random::<u64>();
        assert_eq!(a, instance_rng(1, 2).random::<u64>());
        assert_ne!(a, instance_rng(1, 3).random::<u64>());
    }

    #[test]
    fn automorphism_counts() {
        let g = GroupSpec::new(&[
            (3, 2, crate::ComponentKind::Finite),
            (5, 1, crate::ComponentKind::Finite),
        ])
        .unwrap();
        assert_eq!(all_automorphisms(&g).len(), 24);
        assert_eq!(admissible_automorphisms(&g, &g.whole()).len(), 9);
        assert_eq!(
            admissible_automorphisms(&g, &g.trivial_subgroup()).len(),
            24
        );
    }

    #[test]
    fn construction_examples() {
        let g = GroupSpec::cyclic(3, 2).unwrap();
        let cs = ConstructionSpec {
            g: g.whole(),
            alpha: g.endomorphism(&[2]).unwrap(),
            rho: Distribution::degenerate(&g, &g.zero()).unwrap(),
            x2: el(&g, &[4]),
        };
        let c = construct_instance(&cs).unwrap();
        let k = g.subgroup(vec![1]).unwrap();
        assert_eq!(c.lambda, Distribution::haar(&g, &k).unwrap());
        assert_eq!(c.x1, el(&g, &[1]));
        assert_eq!(c.effective_g, k);

        let trivial = ConstructionSpec {
            g: g.trivial_subgroup(),
            alpha: g.endomorphism(&[4]).unwrap(),
            rho: Distribution::degenerate(&g, &g.zero()).unwrap(),
            x2: el(&g, &[2]),
        };
        let c = construct_instance(&trivial).unwrap();
        assert!(c.instance.mu1().is_degenerate());
        assert_eq!(g.add(&c.x1, &g.apply(&trivial.alpha, &c.x2)), g.zero());

        let z5 = GroupSpec::cyclic(5, 1).unwrap();
        let rho = Distribution::new(
            &z5,
            [
                (el(&z5, &[0]), BigRational::new(1.into(), 3.into())),
                (el(&z5, &[2]), BigRational::new(2.into(), 3.into())),
            ],
        )
        .unwrap();
        let c = construct_instance(&ConstructionSpec {
            g: z5.whole(),
            alpha: z5.minus_identity(),
            rho: rho.clone(),
            x2: el(&z5, &[3]),
        })
        .unwrap();
        assert_eq!(c.lambda, rho);
        assert_eq!(c.instance.mu1(), c.instance.mu2());
    }

    #[test]
    fn construction_rejects_bad_hypotheses() {
        let g = GroupSpec::cyclic(3, 2).unwrap();
        let cs = ConstructionSpec {
            g: g.whole(),
            alpha: g.identity(),
            rho: Distribution::degenerate(&g, &g.zero()).unwrap(),
            x2: g.zero(),
        };
        assert!(matches!(
            construct_instance(&cs),
            Err(Error::ConstructionHypothesis(_))
        ));
        let k = g.subgroup(vec![1]).unwrap();
        let off = ConstructionSpec {
            g: k,
            alpha: g.endomorphism(&[2]).unwrap(),
            rho: Distribution::degenerate(&g, &el(&g, &[1])).unwrap(),
            x2: g.zero(),
        };
        assert!(matches!(
            construct_instance(&off),
            Err(Error::ConstructionHypothesis(_))
        ));
    }

    #[test]
    fn round_trip_recovers_effective_g() {
        let g = GroupSpec::cyclic(3, 3).unwrap();
        for sub in g.enumerate_subgroups() {
            for (i, alpha) in admissible_automorphisms(&g, &sub).iter().enumerate() {
                let cs = ConstructionSpec::random(&g, &sub, alpha, 8, i as u64);
                let c = construct_instance(&cs).unwrap();
                let d = decompose(&c.instance).unwrap();
                assert!(d.flags.all());
                assert_eq!(d.g, c.effective_g);
                // λ comes back up to a translation inside the construction's G.
                assert!(g
                    .subgroup_elements(&sub)
                    .any(|t| c.lambda.shift(&t) == d.lambda));
            }
        }
    }
}
