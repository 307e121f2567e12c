//! Conditional symmetry, Heyde's functional equation and the structure
//! theorem for symmetric instances.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::distribution::{unit_modulus_set, Distribution, PmfEntry};
use crate::error::{Error, Result};
use crate::group::{ComponentKind, GroupElement, GroupSpec, Subgroup};
use crate::morphisms::{Endomorphism, PAdicUnit};

/// Independent `ξ₁ ~ μ₁`, `ξ₂ ~ μ₂` and an automorphism `α`, all on one group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeydeInstance {
    spec: GroupSpec,
    mu1: Distribution,
    mu2: Distribution,
    alpha: Endomorphism,
}

/// On-disk form of an instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub spec: GroupSpec,
    pub mu1: Vec<PmfEntry>,
    pub mu2: Vec<PmfEntry>,
    pub alpha: Endomorphism,
}

impl HeydeInstance {
    pub fn new(mu1: Distribution, mu2: Distribution, alpha: Endomorphism) -> Result<Self> {
        let spec = mu1.spec().clone();
        if mu2.spec() != &spec {
            return Err(Error::SpecMismatch(format!(
                "μ₁ on {spec}, μ₂ on {}",
                mu2.spec()
            )));
        }
        spec.check_endomorphism(&alpha)?;
        if !spec.is_automorphism(&alpha) {
            return Err(Error::NotAutomorphism);
        }
        Ok(HeydeInstance {
            spec,
            mu1,
            mu2,
            alpha,
        })
    }

    pub fn from_file(file: &InstanceFile) -> Result<Self> {
        let mu1 = Distribution::from_entries(&file.spec, &file.mu1)?;
        let mu2 = Distribution::from_entries(&file.spec, &file.mu2)?;
        HeydeInstance::new(mu1, mu2, file.alpha.clone())
    }

    pub fn to_file(&self) -> InstanceFile {
        InstanceFile {
            spec: self.spec.clone(),
            mu1: self.mu1.to_entries(),
            mu2: self.mu2.to_entries(),
            alpha: self.alpha.clone(),
        }
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn mu1(&self) -> &Distribution {
        &self.mu1
    }

    pub fn mu2(&self) -> &Distribution {
        &self.mu2
    }

    pub fn alpha(&self) -> &Endomorphism {
        &self.alpha
    }

    /// Same `α`, distributions replaced; both must live on this spec.
    fn with_distributions(&self, mu1: Distribution, mu2: Distribution) -> HeydeInstance {
        debug_assert!(mu1.spec() == &self.spec && mu2.spec() == &self.spec);
        HeydeInstance {
            spec: self.spec.clone(),
            mu1,
            mu2,
            alpha: self.alpha.clone(),
        }
    }

    /// `(L₁, L₂)` and `(L₁, −L₂)` have the same joint law, where
    /// `L₁ = ξ₁ + ξ₂` and `L₂ = ξ₁ + αξ₂`.
    pub fn is_conditionally_symmetric(&self) -> bool {
        let spec = &self.spec;
        let (p1, _) = self.mu1.scaled();
        let (p2, _) = self.mu2.scaled();
        let ax2: Vec<GroupElement> = p2.iter().map(|(x, _)| spec.apply(&self.alpha, x)).collect();
        // Common denominators factor out of every entry, so integer weights suffice.
        let mut joint: HashMap<(usize, usize), BigInt> = HashMap::new();
        for (x1, a) in &p1 {
            for ((x2, b), y2) in p2.iter().zip(&ax2) {
                let l1 = spec.index_of(&spec.add(x1, x2));
                let l2 = spec.index_of(&spec.add(x1, y2));
                *joint.entry((l1, l2)).or_insert_with(BigInt::zero) += a * b;
            }
        }
        joint.iter().all(|(&(l1, l2), m)| {
            let neg = spec.index_of(&spec.neg(&spec.element_at(l2)));
            joint.get(&(l1, neg)) == Some(m)
        })
    }

    /// `μ̂₁(u+v) μ̂₂(u+α̃v) = μ̂₁(u−v) μ̂₂(u−α̃v)` for all `u, v` in the dual.
    pub fn satisfies_heyde_equation(&self) -> bool {
        let spec = &self.spec;
        let t1 = self.mu1.char_table();
        let t2 = self.mu2.char_table();
        let adj = spec.adjoint(&self.alpha);
        let ys: Vec<GroupElement> = spec.elements().collect();
        let side = |a: usize, b: usize| {
            if t1[a].is_zero() || t2[b].is_zero() {
                None
            } else {
                Some(&t1[a] * &t2[b])
            }
        };
        for (vi, v) in ys.iter().enumerate() {
            // (u, −v) is the mirror of (u, v); v = 0 is trivially fine.
            let nv = spec.neg(v);
            if spec.index_of(&nv) <= vi {
                continue;
            }
            let av = spec.apply(&adj, v);
            for u in &ys {
                let a = spec.index_of(&spec.add(u, v));
                let b = spec.index_of(&spec.add(u, &av));
                let c = spec.index_of(&spec.sub(u, v));
                let d = spec.index_of(&spec.sub(u, &av));
                if side(a, b) != side(c, d) {
                    return false;
                }
            }
        }
        true
    }
}

/// Output of the shift reduction: `λ_j = μ_j * E_(−x_j)`, supported in `G`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduction {
    pub g: Subgroup,
    pub lambda1: Distribution,
    pub lambda2: Distribution,
    pub x1: GroupElement,
    pub x2: GroupElement,
}

fn require_symmetric(inst: &HeydeInstance) -> Result<()> {
    if inst.is_conditionally_symmetric() {
        Ok(())
    } else {
        Err(Error::Precondition(
            "instance is not conditionally symmetric".into(),
        ))
    }
}

/// Finds `G = A(X, S)` and shifts of `μ_j` supported in `G` that keep the
/// instance symmetric.
///
/// Shifts are tried support points first, so that `0 ∈ supp λ_j` when
/// possible, then the rest of the group, each in lexicographic order. `x₂` is
/// the first admissible shift of `μ₂`; `x₁` is the first admissible shift of
/// `μ₁` for which the shifted pair is still symmetric. Choosing `x₁`
/// independently could leave `λ₁` and `λ₂` differing by a translation inside
/// `G`.
pub fn reduce_to_subgroup(inst: &HeydeInstance) -> Result<Reduction> {
    require_symmetric(inst)?;
    reduce_unchecked(inst)
}

fn reduce_unchecked(inst: &HeydeInstance) -> Result<Reduction> {
    let spec = inst.spec();
    let s = unit_modulus_set(inst.mu1(), inst.mu2())?;
    let g = spec.annihilator(&s);
    let fits = |mu: &Distribution, x: &GroupElement| {
        mu.support().all(|z| spec.in_subgroup(&g, &spec.sub(z, x)))
    };
    let candidates = |mu: &'_ Distribution| {
        let supp: Vec<GroupElement> = mu.support().cloned().collect();
        let rest = spec
            .elements()
            .filter(|x| mu.mass(x).is_zero())
            .collect::<Vec<_>>();
        supp.into_iter().chain(rest)
    };
    let x2 = candidates(inst.mu2())
        .find(|x| fits(inst.mu2(), x))
        .ok_or(Error::NoValidShift)?;
    let lambda2 = inst.mu2().shift(&spec.neg(&x2));
    for x1 in candidates(inst.mu1()).filter(|x| fits(inst.mu1(), x)) {
        let lambda1 = inst.mu1().shift(&spec.neg(&x1));
        if inst
            .with_distributions(lambda1.clone(), lambda2.clone())
            .is_conditionally_symmetric()
        {
            return Ok(Reduction {
                g,
                lambda1,
                lambda2,
                x1,
                x2,
            });
        }
    }
    Err(Error::NoValidShift)
}

/// Which conclusions of the structure theorem were confirmed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionFlags {
    pub i_shifts_of_lambda: bool,
    pub ii_minimal_support: bool,
    pub iii_haar_factor: bool,
    pub iv_symmetry_on_g: bool,
    pub g_stability: bool,
}

impl DecompositionFlags {
    pub fn all(&self) -> bool {
        self.i_shifts_of_lambda
            && self.ii_minimal_support
            && self.iii_haar_factor
            && self.iv_symmetry_on_g
            && self.g_stability
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HeydeDecomposition {
    #[serde(rename = "G")]
    pub g: Subgroup,
    pub lambda: Distribution,
    pub x1: GroupElement,
    pub x2: GroupElement,
    /// `(I+α)(G)`, whose Haar distribution must divide `λ`.
    pub haar_factor_subgroup: Subgroup,
    pub flags: DecompositionFlags,
}

/// Runs the reduction, requires `λ₁ = λ₂`, and checks every conclusion.
pub fn decompose(inst: &HeydeInstance) -> Result<HeydeDecomposition> {
    require_symmetric(inst)?;
    let red = reduce_unchecked(inst)?;
    if red.lambda1 != red.lambda2 {
        return Err(Error::LambdaMismatch);
    }
    let spec = inst.spec();
    let alpha = inst.alpha();
    let g = red.g;
    let lambda = red.lambda1;

    let g_stability = spec.image_of_subgroup(&spec.one_minus(alpha), &g) == g;
    let i_shifts_of_lambda =
        lambda.shift(&red.x1) == *inst.mu1() && lambda.shift(&red.x2) == *inst.mu2();
    let ii_minimal_support = lambda.min_support_subgroup() == g;
    let haar_factor_subgroup = spec.image_of_subgroup(&spec.one_plus(alpha), &g);
    let iii_haar_factor = crate::distribution::has_haar_factor(&lambda, &haar_factor_subgroup)?;

    let emb = spec.restrict_to(&g);
    let iv_symmetry_on_g = match emb.project_distribution(&lambda) {
        Some(on_g) => {
            let alpha_g = emb.restrict_endomorphism(alpha);
            HeydeInstance::new(on_g.clone(), on_g, alpha_g)
                .map(|r| r.is_conditionally_symmetric())
                .unwrap_or(false)
        }
        None => false,
    };

    Ok(HeydeDecomposition {
        g,
        lambda,
        x1: red.x1,
        x2: red.x2,
        haar_factor_subgroup,
        flags: DecompositionFlags {
            i_shifts_of_lambda,
            ii_minimal_support,
            iii_haar_factor,
            iv_symmetry_on_g,
            g_stability,
        },
    })
}

/// One corollary: whether its hypothesis holds and, if so, whether the
/// strengthened conclusion was confirmed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CorollaryCheck {
    pub name: String,
    pub applicable: bool,
    /// `None` when skipped.
    pub holds: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CorollaryReport {
    pub checks: Vec<CorollaryCheck>,
}

impl CorollaryReport {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds != Some(false))
    }

    pub fn get(&self, name: &str) -> Option<&CorollaryCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    fn push(&mut self, name: &str, applicable: bool, conclusion: impl FnOnce() -> bool) {
        let holds = applicable.then(conclusion);
        self.checks.push(CorollaryCheck {
            name: name.into(),
            applicable,
            holds,
        });
    }
}

/// Evaluates the corollary hypotheses against an instance and its
/// decomposition and checks each applicable conclusion.
pub fn classify_corollary(inst: &HeydeInstance, dec: &HeydeDecomposition) -> CorollaryReport {
    let spec = inst.spec();
    let alpha = inst.alpha();
    let mut report = CorollaryReport { checks: Vec::new() };

    report.push("trivial_unit_modulus_set", dec.g == spec.whole(), || {
        let plus = spec.image(&spec.one_plus(alpha));
        spec.image(&spec.one_minus(alpha)) == spec.whole()
            && inst.mu1() == inst.mu2()
            && dec.lambda.min_support_subgroup() == spec.whole()
            && crate::distribution::has_haar_factor(inst.mu1(), &plus).unwrap_or(false)
    });

    let ker_plus = spec.kernel(&spec.one_plus(alpha));
    report.push("haar", ker_plus == spec.trivial_subgroup(), || {
        Distribution::haar(spec, &dec.g).is_ok_and(|m| m == dec.lambda)
    });

    let nonvanishing = || {
        [inst.mu1(), inst.mu2()].iter().all(|mu| {
            let cf = crate::distribution::CharacteristicFunction::new(mu);
            spec.elements().all(|y| !cf.at(&y).is_zero())
        })
    };
    report.push("nonvanishing", nonvanishing(), || {
        dec.lambda.is_supported_in(&ker_plus)
    });

    let padic_c0 = match spec.components() {
        [c] if c.kind != ComponentKind::Finite => Some((c.p, alpha.multipliers()[0] % c.p)),
        _ => None,
    };
    let haar_branch = padic_c0.is_some_and(|(p, c0)| c0 != p - 1);
    report.push("padic_haar", haar_branch, || {
        Distribution::haar(spec, &dec.g).is_ok_and(|m| m == dec.lambda)
    });
    report.push(
        "padic_c0_one",
        padic_c0.is_some_and(|(_, c0)| c0 == 1),
        || {
            dec.g == spec.trivial_subgroup()
                && inst.mu1().is_degenerate()
                && inst.mu2().is_degenerate()
        },
    );
    report
}

/// The point `numerator / p^exponent` of `Z(p^∞)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuasicyclicPoint {
    pub numerator: i64,
    pub exponent: u32,
}

impl QuasicyclicPoint {
    pub fn new(numerator: i64, exponent: u32) -> Self {
        QuasicyclicPoint {
            numerator,
            exponent,
        }
    }

    /// Coordinate in `Z(p^n)` under `k/p^e ↦ k p^(n−e)`.
    pub fn coordinate(&self, p: u64, level: u32) -> Result<u64> {
        let too_big = || Error::GroupTooLarge(format!("{p}^{}", self.exponent.max(level)));
        let q = p.checked_pow(self.exponent).ok_or_else(too_big)?;
        let mut num = i128::from(self.numerator).rem_euclid(i128::from(q)) as u64;
        let mut e = self.exponent;
        while e > 0 && num.is_multiple_of(p) {
            num /= p;
            e -= 1;
        }
        if num == 0 {
            return Ok(0);
        }
        if e > level {
            return Err(Error::SupportExceedsLevel);
        }
        let scale = p.checked_pow(level - e).ok_or_else(too_big)?;
        num.checked_mul(scale).ok_or_else(too_big)
    }
}

fn collect_masses<I>(spec: &GroupSpec, points: I) -> Result<Distribution>
where
    I: IntoIterator<Item = Result<(GroupElement, BigRational)>>,
{
    let mut pmf: BTreeMap<GroupElement, BigRational> = BTreeMap::new();
    for pt in points {
        let (x, m) = pt?;
        *pmf.entry(x).or_insert_with(BigRational::zero) += m;
    }
    Distribution::new(spec, pmf)
}

/// The finite instance on `Z(p^n)` for distributions on `Z(p^∞)` supported
/// in its `n`-th layer, with `α` acting as multiplication by `s_n`.
pub fn reduce_quasicyclic(
    p: u64,
    level: u32,
    mu1: &[(QuasicyclicPoint, BigRational)],
    mu2: &[(QuasicyclicPoint, BigRational)],
    u: &PAdicUnit,
) -> Result<HeydeInstance> {
    if u.p() != p {
        return Err(Error::SpecMismatch(format!(
            "unit for p = {}, group for p = {p}",
            u.p()
        )));
    }
    let spec = GroupSpec::new(&[(p, i64::from(level), ComponentKind::QuasicyclicTruncation)])?;
    let lift = |mu: &[(QuasicyclicPoint, BigRational)]| {
        collect_masses(
            &spec,
            mu.iter().map(|(pt, m)| {
                let c = pt.coordinate(p, level)?;
                Ok((GroupElement::from_coords(vec![c]), m.clone()))
            }),
        )
    };
    let alpha = u.to_endomorphism(&spec)?;
    HeydeInstance::new(lift(mu1)?, lift(mu2)?, alpha)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuasicyclicReport {
    /// `s_n ≡ −1`, so the instance is the `α = −I` case.
    pub minus_identity: bool,
    pub symmetric: bool,
    /// `μ₁ = μ₂`; recorded in the `α = −I` case.
    pub identical: Option<bool>,
    pub decomposition: Option<HeydeDecomposition>,
    pub holds: bool,
}

/// Checks the quasicyclic theorem on a truncated instance: for `α = −I`,
/// symmetry iff `μ₁ = μ₂`; otherwise a decomposition with finite `G`.
pub fn check_quasicyclic(inst: &HeydeInstance) -> Result<QuasicyclicReport> {
    let spec = inst.spec();
    if spec.rank() != 1 {
        return Err(Error::Precondition(
            "expected a single quasicyclic layer".into(),
        ));
    }
    let minus_identity = spec.is_minus_identity(inst.alpha());
    let symmetric = inst.is_conditionally_symmetric();
    let decomposition = if symmetric {
        Some(decompose(inst)?)
    } else {
        None
    };
    let identical = minus_identity.then(|| inst.mu1() == inst.mu2());
    let flags_ok = decomposition.as_ref().is_none_or(|d| d.flags.all());
    let holds = flags_ok && identical.is_none_or(|same| same == symmetric);
    Ok(QuasicyclicReport {
        minus_identity,
        symmetric,
        identical,
        decomposition,
        holds,
    })
}

/// `K × Z(p^n)` with the last component tagged as a quasicyclic layer.
pub fn mixed_product_spec(k: &GroupSpec, p: u64, level: u32) -> Result<GroupSpec> {
    if k.components().iter().any(|c| c.p == p) {
        return Err(Error::PrimeCollision(p));
    }
    let mut comps: Vec<_> = k
        .components()
        .iter()
        .map(|c| (c.p, i64::from(c.k), c.kind))
        .collect();
    comps.push((p, i64::from(level), ComponentKind::QuasicyclicTruncation));
    GroupSpec::new(&comps)
}

/// A point `(k, a)` of `K × Z(p^∞)` with its mass.
pub type MixedMass = (GroupElement, QuasicyclicPoint, BigRational);

/// The finite instance on `K × Z(p^n)` with `α = (α_K, s_n)`.
pub fn reduce_mixed_product(
    k: &GroupSpec,
    alpha_k: &Endomorphism,
    level: u32,
    mu1: &[MixedMass],
    mu2: &[MixedMass],
    u: &PAdicUnit,
) -> Result<HeydeInstance> {
    let p = u.p();
    let spec = mixed_product_spec(k, p, level)?;
    k.check_endomorphism(alpha_k)?;
    let lift = |mu: &[MixedMass]| {
        collect_masses(
            &spec,
            mu.iter().map(|(x, a, m)| {
                k.check(x)?;
                let mut coords = x.coords().to_vec();
                coords.push(a.coordinate(p, level)?);
                Ok((GroupElement::from_coords(coords), m.clone()))
            }),
        )
    };
    let mut multipliers: Vec<i64> = alpha_k.multipliers().iter().map(|&m| m as i64).collect();
    multipliers.push(
        i64::try_from(u.truncate(level)?)
            .map_err(|_| Error::GroupTooLarge(format!("s_{level}")))?,
    );
    let alpha = spec.endomorphism(&multipliers)?;
    HeydeInstance::new(lift(mu1)?, lift(mu2)?, alpha)
}

/// Branch of the mixed-product theorem selected by the quasicyclic
/// multiplier.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MixedBranch {
    /// `α = I` on the layer: the problem lives on `K`.
    ReducesToK,
    /// `α ≠ ±I` on the layer: `G` is compact.
    Compact,
    /// `α = −I` on the layer: `G` compact or `M × Z(p^∞)`.
    MinusIdentity,
}

/// Shape of `G` in the `α = −I` branch as far as a truncation can tell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GShape {
    Compact,
    /// `G` contains the whole layer; cannot be certified from a truncation.
    NonCompactConsistent,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MixedProductReport {
    pub branch: MixedBranch,
    pub symmetric: bool,
    pub g_shape: Option<GShape>,
    pub decomposition: Option<HeydeDecomposition>,
    pub holds: bool,
}

/// Checks the mixed-product theorem on `K × Z(p^n)`. The quasicyclic layer
/// is the unique `QuasicyclicTruncation` component.
pub fn check_mixed_product(inst: &HeydeInstance) -> Result<MixedProductReport> {
    let spec = inst.spec();
    let layers: Vec<usize> = spec
        .components()
        .iter()
        .enumerate()
        .filter(|(_, c)| c.kind == ComponentKind::QuasicyclicTruncation)
        .map(|(j, _)| j)
        .collect();
    let &[j] = layers.as_slice() else {
        return Err(Error::Precondition(
            "expected exactly one quasicyclic component".into(),
        ));
    };
    let n = spec.components()[j].k;
    let q = spec.component_orders()[j];
    let s = inst.alpha().multipliers()[j];
    let branch = if s == 1 {
        MixedBranch::ReducesToK
    } else if s == q - 1 {
        MixedBranch::MinusIdentity
    } else {
        MixedBranch::Compact
    };
    let symmetric = inst.is_conditionally_symmetric();
    if !symmetric {
        return Ok(MixedProductReport {
            branch,
            symmetric,
            g_shape: None,
            decomposition: None,
            holds: true,
        });
    }
    let dec = decompose(inst)?;
    let g_layer = dec.g.exponents()[j];
    let (g_shape, branch_ok) = match branch {
        MixedBranch::ReducesToK => (None, g_layer == n),
        MixedBranch::Compact => (None, true),
        MixedBranch::MinusIdentity => {
            let shape = if g_layer == 0 {
                GShape::NonCompactConsistent
            } else {
                GShape::Compact
            };
            (Some(shape), dec.haar_factor_subgroup.exponents()[j] == n)
        }
    };
    let holds = branch_ok && dec.flags.all();
    Ok(MixedProductReport {
        branch,
        symmetric,
        g_shape,
        decomposition: Some(dec),
        holds,
    })
}
