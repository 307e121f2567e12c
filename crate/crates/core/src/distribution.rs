//! Exact-rational probability distributions on the model groups and their
//! characteristic functions.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::cyclotomic::{CycloElement, CyclotomicField};
use crate::error::{Error, Result};
use crate::group::{DualElement, GroupElement, GroupSpec, Subgroup, SubgroupEmbedding};
use crate::json::JsonInt;

/// A probability mass function with finite support and exact masses.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Distribution {
    spec: GroupSpec,
    pmf: BTreeMap<GroupElement, BigRational>,
}

/// One `{"x": [...], "num": n, "den": d}` record of the JSON encoding.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PmfEntry {
    pub x: GroupElement,
    pub num: JsonInt,
    pub den: JsonInt,
}

impl Serialize for Distribution {
    /// The pmf records only; the spec travels separately.
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_entries().serialize(s)
    }
}

impl Distribution {
    /// Validates support points, positivity and total mass. Repeated points
    /// are rejected.
    pub fn new<I>(spec: &GroupSpec, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (GroupElement, BigRational)>,
    {
        let mut pmf = BTreeMap::new();
        let mut total = BigRational::zero();
        for (x, mass) in entries {
            spec.check(&x)?;
            if !mass.is_positive() {
                return Err(Error::InvalidDistribution(format!(
                    "mass at {x} is not positive: {mass}"
                )));
            }
            total += &mass;
            if pmf.insert(x.clone(), mass).is_some() {
                return Err(Error::InvalidDistribution(format!(
                    "point {x} listed twice"
                )));
            }
        }
        if !total.is_one() {
            return Err(Error::InvalidDistribution(format!(
                "total mass is {total}, not 1"
            )));
        }
        Ok(Distribution {
            spec: spec.clone(),
            pmf,
        })
    }

    /// Drops zero masses; caller guarantees nonnegativity and total mass 1.
    pub(crate) fn from_map(spec: &GroupSpec, mut pmf: BTreeMap<GroupElement, BigRational>) -> Self {
        pmf.retain(|_, m| !m.is_zero());
        debug_assert!(pmf.values().all(|m| m.is_positive()));
        debug_assert!(pmf
            .values()
            .fold(BigRational::zero(), |a, m| a + m)
            .is_one());
        Distribution {
            spec: spec.clone(),
            pmf,
        }
    }

    /// `E_x`.
    pub fn degenerate(spec: &GroupSpec, x: &GroupElement) -> Result<Self> {
        Distribution::new(spec, [(x.clone(), BigRational::one())])
    }

    /// `m_K`, uniform on `K`.
    pub fn haar(spec: &GroupSpec, k: &Subgroup) -> Result<Self> {
        if !spec.contains_subgroup(k) {
            return Err(Error::SpecMismatch(format!(
                "{k:?} is not a subgroup of {spec}"
            )));
        }
        let mass = BigRational::new(BigInt::one(), BigInt::from(spec.subgroup_order(k)));
        Ok(Distribution::from_map(
            spec,
            spec.subgroup_elements(k)
                .map(|x| (x, mass.clone()))
                .collect(),
        ))
    }

    pub fn from_entries(spec: &GroupSpec, entries: &[PmfEntry]) -> Result<Self> {
        let pairs = entries
            .iter()
            .map(|e| {
                if !e.den.0.is_positive() {
                    return Err(Error::InvalidDistribution(format!(
                        "denominator at {} is not positive",
                        e.x
                    )));
                }
                Ok((
                    e.x.clone(),
                    BigRational::new(e.num.0.clone(), e.den.0.clone()),
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        Distribution::new(spec, pairs)
    }

    /// JSON records in lexicographic order of support points, masses in
    /// lowest terms.
    pub fn to_entries(&self) -> Vec<PmfEntry> {
        self.pmf
            .iter()
            .map(|(x, m)| PmfEntry {
                x: x.clone(),
                num: JsonInt(m.numer().clone()),
                den: JsonInt(m.denom().clone()),
            })
            .collect()
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn pmf(&self) -> &BTreeMap<GroupElement, BigRational> {
        &self.pmf
    }

    pub fn support(&self) -> impl Iterator<Item = &GroupElement> + '_ {
        self.pmf.keys()
    }

    pub fn support_size(&self) -> usize {
        self.pmf.len()
    }

    pub fn mass(&self, x: &GroupElement) -> BigRational {
        self.pmf.get(x).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_degenerate(&self) -> bool {
        self.pmf.len() == 1
    }

    pub fn is_supported_in(&self, k: &Subgroup) -> bool {
        self.support().all(|x| self.spec.in_subgroup(k, x))
    }

    fn same_spec(&self, other: &Distribution) -> Result<()> {
        if self.spec == other.spec {
            Ok(())
        } else {
            Err(Error::SpecMismatch(format!(
                "distributions on {} and {}",
                self.spec, other.spec
            )))
        }
    }

    /// `(μ * ν)(z) = Σ_x μ(z − x) ν(x)`.
    pub fn convolve(&self, other: &Distribution) -> Result<Distribution> {
        self.same_spec(other)?;
        let mut out: BTreeMap<GroupElement, BigRational> = BTreeMap::new();
        for (x, a) in &self.pmf {
            for (y, b) in &other.pmf {
                *out.entry(self.spec.add(x, y))
                    .or_insert_with(BigRational::zero) += a * b;
            }
        }
        Ok(Distribution::from_map(&self.spec, out))
    }

    /// `μ̄(B) = μ(−B)`.
    pub fn reflect(&self) -> Distribution {
        Distribution::from_map(
            &self.spec,
            self.pmf
                .iter()
                .map(|(x, m)| (self.spec.neg(x), m.clone()))
                .collect(),
        )
    }

    /// `μ * E_x`.
    pub fn shift(&self, x: &GroupElement) -> Distribution {
        Distribution::from_map(
            &self.spec,
            self.pmf
                .iter()
                .map(|(z, m)| (self.spec.add(z, x), m.clone()))
                .collect(),
        )
    }

    fn field(&self) -> CyclotomicField {
        CyclotomicField::new(self.spec.exponent()).expect("group exponent is odd")
    }

    /// Masses over their common denominator.
    pub(crate) fn scaled(&self) -> (Vec<(&GroupElement, BigInt)>, BigInt) {
        let den = self
            .pmf
            .values()
            .fold(BigInt::one(), |acc, m| acc.lcm(m.denom()));
        let nums = self
            .pmf
            .iter()
            .map(|(x, m)| (x, m.numer() * (&den / m.denom())))
            .collect();
        (nums, den)
    }

    /// `μ̂(y) = Σ_x μ(x) (x, y)`, exactly.
    pub fn char_fn(&self, y: &DualElement) -> CycloElement {
        CharacteristicFunction::new(self).at(y)
    }

    /// `μ̂` at every dual element, in index order.
    pub fn char_table(&self) -> Vec<CycloElement> {
        let cf = CharacteristicFunction::new(self);
        self.spec.elements().map(|y| cf.at(&y)).collect()
    }

    /// `|μ̂(y)| = 1`, decided combinatorially: the character is constant on
    /// the support.
    pub fn has_unit_modulus_at(&self, y: &DualElement) -> bool {
        let mut support = self.support();
        let first = self.spec.pair(support.next().expect("nonempty support"), y);
        support.all(|x| self.spec.pair(x, y) == first)
    }

    /// `μ̂(y) = 1`: the character is trivial on the support.
    pub fn equals_one_at(&self, y: &DualElement) -> bool {
        self.support().all(|x| self.spec.pair(x, y).is_one())
    }

    /// Smallest subgroup containing the support.
    pub fn min_support_subgroup(&self) -> Subgroup {
        self.spec.subgroup_generated(self.support())
    }
}

/// Precomputed data for evaluating `μ̂` repeatedly.
pub struct CharacteristicFunction<'a> {
    spec: &'a GroupSpec,
    field: CyclotomicField,
    points: Vec<(&'a GroupElement, BigInt)>,
    small: Option<Vec<i128>>,
    den: BigInt,
}

impl<'a> CharacteristicFunction<'a> {
    pub fn new(mu: &'a Distribution) -> Self {
        let (points, den) = mu.scaled();
        let small = points
            .iter()
            .map(|(_, n)| n.to_i64().map(i128::from))
            .collect::<Option<Vec<_>>>();
        CharacteristicFunction {
            spec: &mu.spec,
            field: mu.field(),
            points,
            small,
            den,
        }
    }

    pub fn at(&self, y: &DualElement) -> CycloElement {
        let n = self.spec.size();
        if let Some(small) = &self.small {
            // |Σ masses| ≤ den, so the exponent-indexed sums cannot overflow.
            let mut c = vec![0i128; n];
            for ((x, _), &m) in self.points.iter().zip(small) {
                c[self.spec.pair(x, y).exponent as usize] += m;
            }
            let c = c.into_iter().map(BigInt::from).collect();
            return self.field.from_exponent_vector(c, self.den.clone());
        }
        let mut c = vec![BigInt::zero(); n];
        for (x, m) in &self.points {
            c[self.spec.pair(x, y).exponent as usize] += m;
        }
        self.field.from_exponent_vector(c, self.den.clone())
    }
}

fn points_to_subgroup(spec: &GroupSpec, points: &[GroupElement], what: &str) -> Result<Subgroup> {
    let k = spec.subgroup_generated(points.iter());
    if spec.subgroup_order(&k) as usize != points.len() {
        return Err(Error::NotSubgroup(format!(
            "{what}: {} points generate a subgroup of order {}",
            points.len(),
            spec.subgroup_order(&k)
        )));
    }
    Ok(k)
}

/// `S = {y : |μ̂₁(y)| = |μ̂₂(y)| = 1}`.
pub fn unit_modulus_set(mu1: &Distribution, mu2: &Distribution) -> Result<Subgroup> {
    mu1.same_spec(mu2)?;
    let spec = mu1.spec();
    let points: Vec<_> = spec
        .elements()
        .filter(|y| mu1.has_unit_modulus_at(y) && mu2.has_unit_modulus_at(y))
        .collect();
    points_to_subgroup(spec, &points, "unit-modulus set")
}

/// `E = {y : μ̂(y) = 1}`.
pub fn equals_one_set(mu: &Distribution) -> Result<Subgroup> {
    let spec = mu.spec();
    let points: Vec<_> = spec.elements().filter(|y| mu.equals_one_at(y)).collect();
    points_to_subgroup(spec, &points, "equals-one set")
}

/// Checks the combinatorial unit-modulus and equals-one predicates against
/// the cyclotomic ones at every dual element.
pub fn cross_check_predicates(mu: &Distribution) -> Result<()> {
    let cf = CharacteristicFunction::new(mu);
    for y in mu.spec().elements() {
        let v = cf.at(&y);
        if v.is_unit_modulus() != mu.has_unit_modulus_at(&y) {
            return Err(Error::RouteDisagreement(format!("|μ̂({y})| = 1")));
        }
        if v.is_one() != mu.equals_one_at(&y) {
            return Err(Error::RouteDisagreement(format!("μ̂({y}) = 1")));
        }
    }
    Ok(())
}

/// Whether `m_K` is a factor of `λ`, decided both as `λ = λ * m_K` and as
/// `λ̂` vanishing off `A(Y, K)`. A disagreement is an error.
pub fn has_haar_factor(lambda: &Distribution, k: &Subgroup) -> Result<bool> {
    let spec = lambda.spec();
    let haar = Distribution::haar(spec, k)?;
    let direct = lambda.convolve(&haar)? == *lambda;
    let ann = spec.annihilator(k);
    let cf = CharacteristicFunction::new(lambda);
    let spectral = spec
        .elements()
        .filter(|y| !spec.in_subgroup(&ann, y))
        .all(|y| cf.at(&y).is_zero());
    if direct != spectral {
        return Err(Error::RouteDisagreement(format!(
            "Haar factor {k:?}: convolution says {direct}, transform says {spectral}"
        )));
    }
    Ok(direct)
}

/// `μ(x) = |X|⁻¹ Σ_y μ̂(y) conj((x, y))`. Fails unless the table is the
/// transform of a probability distribution.
pub fn fourier_inversion(spec: &GroupSpec, table: &[CycloElement]) -> Result<Distribution> {
    if table.len() != spec.size() {
        return Err(Error::SpecMismatch(format!(
            "table has {} entries, group has {} elements",
            table.len(),
            spec.size()
        )));
    }
    let field = CyclotomicField::new(spec.exponent())?;
    let scale = BigRational::new(BigInt::one(), BigInt::from(spec.order()));
    let mut pmf = BTreeMap::new();
    let mut total = BigRational::zero();
    for x in spec.elements() {
        let mut acc = field.zero();
        for (y, v) in spec.elements().zip(table) {
            let t = spec.pair(&x, &y).exponent as i64;
            acc = &acc + &v.mul_root(-t);
        }
        let value = acc.scale(&scale).as_rational().ok_or_else(|| {
            Error::InvalidDistribution(format!("inverse transform at {x} is not rational"))
        })?;
        if value.is_negative() {
            return Err(Error::InvalidDistribution(format!(
                "inverse transform at {x} is negative"
            )));
        }
        total += &value;
        pmf.insert(x, value);
    }
    if !total.is_one() {
        return Err(Error::InvalidDistribution(format!("total mass {total}")));
    }
    Ok(Distribution::from_map(spec, pmf))
}

impl SubgroupEmbedding {
    /// `μ` as a distribution on `K`; `None` unless supported in `K`.
    pub fn project_distribution(&self, mu: &Distribution) -> Option<Distribution> {
        let pmf = mu
            .pmf()
            .iter()
            .map(|(x, m)| self.project(x).map(|px| (px, m.clone())))
            .collect::<Option<BTreeMap<_, _>>>()?;
        Some(Distribution::from_map(self.sub(), pmf))
    }

    pub fn embed_distribution(&self, lambda: &Distribution) -> Distribution {
        Distribution::from_map(
            self.parent(),
            lambda
                .pmf()
                .iter()
                .map(|(x, m)| (self.embed(x), m.clone()))
                .collect(),
        )
    }
}
