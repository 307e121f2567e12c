//! Finite abelian groups of odd order written as products of cyclic
//! p-components over pairwise distinct odd primes.
//!
//! The character group of such a group is identified with the group itself
//! through the pairing
//!
//! ```text
//! (x, y) = exp(2πi · t / N),   t = Σ_j x_j · y_j · (N / p_j^k_j)  (mod N)
//! ```
//!
//! where `N` is the group exponent. Every subgroup is a product of
//! component subgroups `p_j^a_j · Z(p_j^k_j)` and is stored as its vector of
//! exponents `a_j`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which infinite object a cyclic component truncates.
///
/// Arithmetic is identical for all kinds; the tag only matters when deciding
/// which corollary applies to an instance.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
#[serde(rename_all = "snake_case")]
pub enum ComponentKind {
    #[default]
    Finite,
    PadicTruncation,
    QuasicyclicTruncation,
}

/// One cyclic factor `Z(p^k)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Component {
    pub p: u64,
    pub k: u32,
    pub kind: ComponentKind,
}

impl Component {
    pub fn order(&self) -> u64 {
        self.p.pow(self.k)
    }
}

/// Unvalidated component as it appears in JSON.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawComponent {
    pub p: u64,
    pub k: i64,
    #[serde(default)]
    pub kind: ComponentKind,
}

impl RawComponent {
    pub fn new(p: u64, k: i64, kind: ComponentKind) -> Self {
        RawComponent { p, k, kind }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
struct RawSpec {
    components: Vec<RawComponent>,
}

/// A validated group `Z(p_1^k_1) × … × Z(p_r^k_r)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub struct GroupSpec {
    components: Vec<Component>,
    orders: Vec<u64>,
    cofactors: Vec<u64>,
    exponent: u64,
}

impl TryFrom<RawSpec> for GroupSpec {
    type Error = Error;

    fn try_from(raw: RawSpec) -> Result<Self> {
        validate_spec(&raw.components)
    }
}

impl From<GroupSpec> for RawSpec {
    fn from(spec: GroupSpec) -> Self {
        RawSpec {
            components: spec
                .components
                .iter()
                .map(|c| RawComponent::new(c.p, i64::from(c.k), c.kind))
                .collect(),
        }
    }
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Validates a raw component list and computes the group exponent.
///
/// An empty list is the trivial group.
pub fn validate_spec(raw: &[RawComponent]) -> Result<GroupSpec> {
    let mut components = Vec::with_capacity(raw.len());
    for c in raw {
        if c.p == 2 {
            return Err(Error::TwoTorsion);
        }
        if !is_prime(c.p) {
            return Err(Error::NotPrime(c.p));
        }
        if c.k <= 0 {
            return Err(Error::NonPositiveExponent(c.k));
        }
        if components.iter().any(|o: &Component| o.p == c.p) {
            return Err(Error::RepeatedPrime(c.p));
        }
        let k =
            u32::try_from(c.k).map_err(|_| Error::GroupTooLarge(format!("exponent {}", c.k)))?;
        components.push(Component {
            p: c.p,
            k,
            kind: c.kind,
        });
    }
    GroupSpec::from_components(components)
}

impl GroupSpec {
    fn from_components(components: Vec<Component>) -> Result<Self> {
        let mut orders = Vec::with_capacity(components.len());
        let mut exponent: u64 = 1;
        for c in &components {
            let order =
                c.p.checked_pow(c.k)
                    .ok_or_else(|| Error::GroupTooLarge(format!("{}^{}", c.p, c.k)))?;
            exponent = exponent
                .checked_mul(order)
                .ok_or_else(|| Error::GroupTooLarge("exponent overflows u64".into()))?;
            orders.push(order);
        }
        if usize::try_from(exponent).is_err() {
            return Err(Error::GroupTooLarge("order exceeds usize".into()));
        }
        let cofactors = orders.iter().map(|o| exponent / o).collect();
        Ok(GroupSpec {
            components,
            orders,
            cofactors,
            exponent,
        })
    }

    /// Shorthand for a validated spec from `(p, k, kind)` triples.
    pub fn new(components: &[(u64, i64, ComponentKind)]) -> Result<Self> {
        let raw: Vec<_> = components
            .iter()
            .map(|&(p, k, kind)| RawComponent::new(p, k, kind))
            .collect();
        validate_spec(&raw)
    }

    /// `Z(p^k)` with the `Finite` tag.
    pub fn cyclic(p: u64, k: u32) -> Result<Self> {
        Self::new(&[(p, i64::from(k), ComponentKind::Finite)])
    }

    pub fn trivial() -> Self {
        GroupSpec::from_components(Vec::new()).expect("trivial group is valid")
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn rank(&self) -> usize {
        self.components.len()
    }

    /// Orders `p_j^k_j` of the components.
    pub fn component_orders(&self) -> &[u64] {
        &self.orders
    }

    /// Group exponent `N`. The components have coprime orders, so this is
    /// also the order of the group.
    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    pub fn order(&self) -> u64 {
        self.exponent
    }

    /// Number of elements as a `usize` (validated at construction).
    pub fn size(&self) -> usize {
        self.exponent as usize
    }

    // ---- elements -------------------------------------------------------

    pub fn zero(&self) -> GroupElement {
        GroupElement(vec![0; self.rank()])
    }

    /// Builds an element from arbitrary integers, reducing each coordinate.
    pub fn element(&self, coords: &[i64]) -> Result<GroupElement> {
        if coords.len() != self.rank() {
            return Err(Error::SpecMismatch(format!(
                "element has {} coordinates, group has {} components",
                coords.len(),
                self.rank()
            )));
        }
        Ok(GroupElement(
            coords
                .iter()
                .zip(&self.orders)
                .map(|(&c, &o)| c.rem_euclid(o as i64) as u64)
                .collect(),
        ))
    }

    pub fn contains(&self, x: &GroupElement) -> bool {
        x.0.len() == self.rank() && x.0.iter().zip(&self.orders).all(|(c, o)| c < o)
    }

    pub fn check(&self, x: &GroupElement) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::SpecMismatch(format!(
                "element {x} is not a reduced element of {self}"
            )))
        }
    }

    pub fn add(&self, x: &GroupElement, y: &GroupElement) -> GroupElement {
        GroupElement(
            x.0.iter()
                .zip(&y.0)
                .zip(&self.orders)
                .map(|((&a, &b), &o)| ((a as u128 + b as u128) % o as u128) as u64)
                .collect(),
        )
    }

    pub fn neg(&self, x: &GroupElement) -> GroupElement {
        GroupElement(
            x.0.iter()
                .zip(&self.orders)
                .map(|(&a, &o)| if a == 0 { 0 } else { o - a })
                .collect(),
        )
    }

    pub fn sub(&self, x: &GroupElement, y: &GroupElement) -> GroupElement {
        self.add(x, &self.neg(y))
    }

    /// `f_n x = n x`.
    pub fn scale(&self, x: &GroupElement, n: i64) -> GroupElement {
        GroupElement(
            x.0.iter()
                .zip(&self.orders)
                .map(|(&a, &o)| {
                    let m = n.rem_euclid(o as i64) as u128;
                    ((a as u128 * m) % o as u128) as u64
                })
                .collect(),
        )
    }

    /// Checked group law.
    pub fn group_op(
        &self,
        x: &GroupElement,
        y: &GroupElement,
        op: GroupOp,
    ) -> Result<GroupElement> {
        self.check(x)?;
        match op {
            GroupOp::Add => {
                self.check(y)?;
                Ok(self.add(x, y))
            }
            GroupOp::Neg => Ok(self.neg(x)),
            GroupOp::ScalarMul(n) => Ok(self.scale(x, n)),
        }
    }

    /// Mixed-radix index; the first coordinate is most significant, so
    /// index order is lexicographic order of coordinates.
    pub fn index_of(&self, x: &GroupElement) -> usize {
        x.0.iter()
            .zip(&self.orders)
            .fold(0usize, |acc, (&c, &o)| acc * o as usize + c as usize)
    }

    pub fn element_at(&self, mut index: usize) -> GroupElement {
        let mut coords = vec![0u64; self.rank()];
        for (c, &o) in coords.iter_mut().zip(&self.orders).rev() {
            *c = (index % o as usize) as u64;
            index /= o as usize;
        }
        GroupElement(coords)
    }

    /// All elements in lexicographic order.
    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        (0..self.size()).map(move |i| self.element_at(i))
    }

    /// Order of an element.
    pub fn element_order(&self, x: &GroupElement) -> u64 {
        x.0.iter()
            .zip(&self.components)
            .map(|(&c, comp)| comp.order() / comp.p.pow(valuation(c, comp.p, comp.k)))
            .product()
    }

    // ---- pairing --------------------------------------------------------

    /// Character value `(x, y)` as a root of unity of order dividing `N`.
    pub fn pair(&self, x: &GroupElement, y: &DualElement) -> RootOfUnity {
        let n = self.exponent as u128;
        let t =
            x.0.iter()
                .zip(&y.0)
                .zip(self.orders.iter().zip(&self.cofactors))
                .fold(0u128, |acc, ((&a, &b), (&o, &cof))| {
                    let prod = (a as u128 * b as u128) % o as u128;
                    (acc + prod * cof as u128) % n
                });
        RootOfUnity {
            exponent: t as u64,
            order: self.exponent,
        }
    }

    pub fn checked_pair(&self, x: &GroupElement, y: &DualElement) -> Result<RootOfUnity> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.pair(x, y))
    }

    // ---- subgroups ------------------------------------------------------

    pub fn subgroup(&self, exponents: Vec<u32>) -> Result<Subgroup> {
        if exponents.len() != self.rank() {
            return Err(Error::SpecMismatch(format!(
                "subgroup has {} exponents, group has {} components",
                exponents.len(),
                self.rank()
            )));
        }
        for (a, c) in exponents.iter().zip(&self.components) {
            if *a > c.k {
                return Err(Error::SpecMismatch(format!(
                    "subgroup exponent {a} exceeds component exponent {}",
                    c.k
                )));
            }
        }
        Ok(Subgroup(exponents))
    }

    pub fn contains_subgroup(&self, k: &Subgroup) -> bool {
        k.0.len() == self.rank() && k.0.iter().zip(&self.components).all(|(a, c)| *a <= c.k)
    }

    pub fn whole(&self) -> Subgroup {
        Subgroup(vec![0; self.rank()])
    }

    pub fn trivial_subgroup(&self) -> Subgroup {
        Subgroup(self.components.iter().map(|c| c.k).collect())
    }

    pub fn subgroup_order(&self, k: &Subgroup) -> u64 {
        k.0.iter()
            .zip(&self.components)
            .map(|(&a, c)| c.p.pow(c.k - a))
            .product()
    }

    pub fn in_subgroup(&self, k: &Subgroup, x: &GroupElement) -> bool {
        x.0.iter()
            .zip(&k.0)
            .zip(&self.components)
            .all(|((&c, &a), comp)| c % comp.p.pow(a) == 0)
    }

    /// `A(Y, K)`: component exponent `a_j` becomes `k_j − a_j`.
    pub fn annihilator(&self, k: &Subgroup) -> Subgroup {
        Subgroup(
            k.0.iter()
                .zip(&self.components)
                .map(|(&a, c)| c.k - a)
                .collect(),
        )
    }

    /// Smallest subgroup containing every element of `xs`.
    pub fn subgroup_generated<'a, I>(&self, xs: I) -> Subgroup
    where
        I: IntoIterator<Item = &'a GroupElement>,
    {
        let mut exps: Vec<u32> = self.components.iter().map(|c| c.k).collect();
        for x in xs {
            for ((e, &c), comp) in exps.iter_mut().zip(&x.0).zip(&self.components) {
                *e = (*e).min(valuation(c, comp.p, comp.k));
            }
        }
        Subgroup(exps)
    }

    /// All `Π (k_j + 1)` subgroups, in lexicographic order of exponent vectors.
    pub fn enumerate_subgroups(&self) -> Vec<Subgroup> {
        let mut out = vec![Vec::new()];
        for c in &self.components {
            out = out
                .into_iter()
                .flat_map(|prefix: Vec<u32>| {
                    (0..=c.k).map(move |a| {
                        let mut v = prefix.clone();
                        v.push(a);
                        v
                    })
                })
                .collect();
        }
        out.into_iter().map(Subgroup).collect()
    }

    pub fn subgroup_elements<'a>(
        &'a self,
        k: &'a Subgroup,
    ) -> impl Iterator<Item = GroupElement> + 'a {
        let sub = self.restrict_to(k);
        let n = sub.sub().size();
        (0..n).map(move |i| sub.embed(&sub.sub().element_at(i)))
    }

    /// `K ⊆ L`.
    pub fn is_subgroup_of(&self, k: &Subgroup, l: &Subgroup) -> bool {
        k.0.iter().zip(&l.0).all(|(a, b)| a >= b)
    }

    pub fn subgroup_sum(&self, k: &Subgroup, l: &Subgroup) -> Subgroup {
        Subgroup(k.0.iter().zip(&l.0).map(|(&a, &b)| a.min(b)).collect())
    }

    pub fn subgroup_intersection(&self, k: &Subgroup, l: &Subgroup) -> Subgroup {
        Subgroup(k.0.iter().zip(&l.0).map(|(&a, &b)| a.max(b)).collect())
    }

    /// Views `K` as a group of its own, `Π Z(p_j^(k_j − a_j))`.
    pub fn restrict_to(&self, k: &Subgroup) -> SubgroupEmbedding {
        let mut kept = Vec::new();
        let mut comps = Vec::new();
        for (j, (&a, c)) in k.0.iter().zip(&self.components).enumerate() {
            if a < c.k {
                kept.push(j);
                comps.push(Component {
                    p: c.p,
                    k: c.k - a,
                    kind: c.kind,
                });
            }
        }
        let sub = GroupSpec::from_components(comps).expect("subgroup of a valid spec is valid");
        SubgroupEmbedding {
            parent: self.clone(),
            subgroup: k.clone(),
            sub,
            kept,
        }
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.components.is_empty() {
            return write!(f, "{{0}}");
        }
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                write!(f, "×")?;
            }
            write!(f, "Z({}^{})", c.p, c.k)?;
        }
        Ok(())
    }
}

/// `p`-adic valuation of `c` in `Z(p^k)`, with `v(0) = k`.
pub(crate) fn valuation(mut c: u64, p: u64, k: u32) -> u32 {
    if c == 0 {
        return k;
    }
    let mut v = 0;
    while c.is_multiple_of(p) && v < k {
        c /= p;
        v += 1;
    }
    v
}

/// The abelian group law, for [`GroupSpec::group_op`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GroupOp {
    Add,
    Neg,
    ScalarMul(i64),
}

/// Reduced coordinates, one residue per component.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupElement(Vec<u64>);

impl GroupElement {
    pub fn coords(&self) -> &[u64] {
        &self.0
    }

    /// Wraps raw coordinates without reducing them; pair with
    /// [`GroupSpec::check`].
    pub fn from_coords(coords: Vec<u64>) -> Self {
        GroupElement(coords)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Character index. The dual is identified with the group through
/// [`GroupSpec::pair`], so characters share the element representation.
pub type DualElement = GroupElement;

/// Subgroup `Π p_j^a_j · Z(p_j^k_j)` stored as the exponents `a_j`.
///
/// The same type describes subgroups of the dual.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Subgroup(Vec<u32>);

impl Subgroup {
    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn from_exponents(exponents: Vec<u32>) -> Self {
        Subgroup(exponents)
    }
}

/// `exp(2πi · exponent / order)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RootOfUnity {
    pub exponent: u64,
    pub order: u64,
}

impl RootOfUnity {
    pub fn is_one(&self) -> bool {
        self.exponent == 0
    }

    pub fn mul(&self, other: &RootOfUnity) -> RootOfUnity {
        debug_assert_eq!(self.order, other.order);
        RootOfUnity {
            exponent: ((self.exponent as u128 + other.exponent as u128) % self.order as u128)
                as u64,
            order: self.order,
        }
    }

    pub fn conj(&self) -> RootOfUnity {
        RootOfUnity {
            exponent: (self.order - self.exponent) % self.order,
            order: self.order,
        }
    }

    pub fn to_complex(&self) -> (f64, f64) {
        let theta = 2.0 * std::f64::consts::PI * self.exponent as f64 / self.order as f64;
        (theta.cos(), theta.sin())
    }
}

/// A subgroup `K` of a parent group, seen as a group in its own right.
///
/// Components where `K` is trivial are dropped from the sub-spec; the others
/// are rescaled by `p_j^a_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubgroupEmbedding {
    parent: GroupSpec,
    subgroup: Subgroup,
    sub: GroupSpec,
    kept: Vec<usize>,
}

impl SubgroupEmbedding {
    pub fn parent(&self) -> &GroupSpec {
        &self.parent
    }

    pub fn subgroup(&self) -> &Subgroup {
        &self.subgroup
    }

    pub fn sub(&self) -> &GroupSpec {
        &self.sub
    }

    /// Parent component index of each sub-spec component.
    pub fn kept_components(&self) -> &[usize] {
        &self.kept
    }

    pub fn embed(&self, x: &GroupElement) -> GroupElement {
        let mut coords = vec![0u64; self.parent.rank()];
        for (i, &j) in self.kept.iter().enumerate() {
            let comp = self.parent.components[j];
            coords[j] = x.0[i] * comp.p.pow(self.subgroup.0[j]);
        }
        GroupElement(coords)
    }

    /// Inverse of [`embed`](Self::embed); `None` outside `K`.
    pub fn project(&self, x: &GroupElement) -> Option<GroupElement> {
        if !self.parent.in_subgroup(&self.subgroup, x) {
            return None;
        }
        Some(GroupElement(
            self.kept
                .iter()
                .map(|&j| x.0[j] / self.parent.components[j].p.pow(self.subgroup.0[j]))
                .collect(),
        ))
    }

    /// Maps a subgroup of the sub-spec to the corresponding subgroup of the
    /// parent.
    pub fn embed_subgroup(&self, s: &Subgroup) -> Subgroup {
        let mut exps = self.parent.trivial_subgroup().0;
        for (i, &j) in self.kept.iter().enumerate() {
            exps[j] = s.0[i] + self.subgroup.0[j];
        }
        Subgroup(exps)
    }

    /// Inverse of [`embed_subgroup`](Self::embed_subgroup); `None` unless
    /// `s ⊆ K`.
    pub fn project_subgroup(&self, s: &Subgroup) -> Option<Subgroup> {
        if !self.parent.is_subgroup_of(s, &self.subgroup) {
            return None;
        }
        Some(Subgroup(
            self.kept
                .iter()
                .map(|&j| s.0[j] - self.subgroup.0[j])
                .collect(),
        ))
    }
}
