//! Endomorphisms of the model groups.
//!
//! Distinct primes make every endomorphism diagonal: it multiplies the
//! `Z(p_j^k_j)` component by some `m_j`. Under the self-duality pairing the
//! adjoint has the same multipliers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{is_prime, valuation, GroupElement, GroupSpec, Subgroup, SubgroupEmbedding};

/// Per-component multipliers, reduced mod the component orders.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Endomorphism(Vec<u64>);

impl Endomorphism {
    pub fn multipliers(&self) -> &[u64] {
        &self.0
    }

    /// Unreduced wrapper; validate with [`GroupSpec::check_endomorphism`].
    pub fn from_multipliers(m: Vec<u64>) -> Self {
        Endomorphism(m)
    }
}

fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

impl GroupSpec {
    /// Builds an endomorphism, reducing the multipliers.
    pub fn endomorphism(&self, multipliers: &[i64]) -> Result<Endomorphism> {
        if multipliers.len() != self.rank() {
            return Err(Error::SpecMismatch(format!(
                "endomorphism has {} multipliers, group has {} components",
                multipliers.len(),
                self.rank()
            )));
        }
        Ok(Endomorphism(
            multipliers
                .iter()
                .zip(self.component_orders())
                .map(|(&m, &o)| m.rem_euclid(o as i64) as u64)
                .collect(),
        ))
    }

    pub fn check_endomorphism(&self, phi: &Endomorphism) -> Result<()> {
        if phi.0.len() == self.rank()
            && phi
                .0
                .iter()
                .zip(self.component_orders())
                .all(|(m, o)| m < o)
        {
            Ok(())
        } else {
            Err(Error::SpecMismatch(format!(
                "endomorphism {:?} does not match {self}",
                phi.0
            )))
        }
    }

    pub fn identity(&self) -> Endomorphism {
        self.scalar_endo(1)
    }

    /// `f_n`.
    pub fn scalar_endo(&self, n: i64) -> Endomorphism {
        Endomorphism(
            self.component_orders()
                .iter()
                .map(|&o| n.rem_euclid(o as i64) as u64)
                .collect(),
        )
    }

    pub fn minus_identity(&self) -> Endomorphism {
        self.scalar_endo(-1)
    }

    pub fn is_automorphism(&self, phi: &Endomorphism) -> bool {
        phi.0
            .iter()
            .zip(self.components())
            .all(|(&m, c)| m % c.p != 0)
    }

    pub fn is_identity(&self, phi: &Endomorphism) -> bool {
        *phi == self.identity()
    }

    /// Multiplier `≡ −1` modulo every component order.
    pub fn is_minus_identity(&self, phi: &Endomorphism) -> bool {
        *phi == self.minus_identity()
    }

    pub fn apply(&self, phi: &Endomorphism, x: &GroupElement) -> GroupElement {
        GroupElement::from_coords(
            x.coords()
                .iter()
                .zip(&phi.0)
                .zip(self.component_orders())
                .map(|((&c, &m), &o)| mulmod(c, m, o))
                .collect(),
        )
    }

    /// `φ ∘ ψ`.
    pub fn compose(&self, phi: &Endomorphism, psi: &Endomorphism) -> Endomorphism {
        Endomorphism(
            phi.0
                .iter()
                .zip(&psi.0)
                .zip(self.component_orders())
                .map(|((&a, &b), &o)| mulmod(a, b, o))
                .collect(),
        )
    }

    pub fn invert(&self, phi: &Endomorphism) -> Result<Endomorphism> {
        phi.0
            .iter()
            .zip(self.component_orders())
            .map(|(&m, &o)| mod_inverse(m, o).ok_or(Error::NotInvertible))
            .collect::<Result<Vec<_>>>()
            .map(Endomorphism)
    }

    pub fn add_endos(&self, phi: &Endomorphism, psi: &Endomorphism) -> Endomorphism {
        Endomorphism(
            phi.0
                .iter()
                .zip(&psi.0)
                .zip(self.component_orders())
                .map(|((&a, &b), &o)| ((a as u128 + b as u128) % o as u128) as u64)
                .collect(),
        )
    }

    pub fn neg_endo(&self, phi: &Endomorphism) -> Endomorphism {
        Endomorphism(
            phi.0
                .iter()
                .zip(self.component_orders())
                .map(|(&a, &o)| (o - a) % o)
                .collect(),
        )
    }

    pub fn sub_endos(&self, phi: &Endomorphism, psi: &Endomorphism) -> Endomorphism {
        self.add_endos(phi, &self.neg_endo(psi))
    }

    /// `I + φ`.
    pub fn one_plus(&self, phi: &Endomorphism) -> Endomorphism {
        self.add_endos(&self.identity(), phi)
    }

    /// `I − φ`.
    pub fn one_minus(&self, phi: &Endomorphism) -> Endomorphism {
        self.sub_endos(&self.identity(), phi)
    }

    /// The adjoint `φ̃` with `(φx, y) = (x, φ̃y)`.
    pub fn adjoint(&self, phi: &Endomorphism) -> Endomorphism {
        phi.clone()
    }

    pub fn kernel(&self, phi: &Endomorphism) -> Subgroup {
        Subgroup::from_exponents(
            phi.0
                .iter()
                .zip(self.components())
                .map(|(&m, c)| c.k - valuation(m, c.p, c.k))
                .collect(),
        )
    }

    pub fn image(&self, phi: &Endomorphism) -> Subgroup {
        Subgroup::from_exponents(
            phi.0
                .iter()
                .zip(self.components())
                .map(|(&m, c)| valuation(m, c.p, c.k))
                .collect(),
        )
    }

    /// `φ(K)`.
    pub fn image_of_subgroup(&self, phi: &Endomorphism, k: &Subgroup) -> Subgroup {
        Subgroup::from_exponents(
            phi.0
                .iter()
                .zip(k.exponents())
                .zip(self.components())
                .map(|((&m, &a), c)| (a + valuation(m, c.p, c.k)).min(c.k))
                .collect(),
        )
    }

    /// `κ = −f_4 β (I − β)^(−2)`; requires `I − β` invertible.
    pub fn kappa(&self, beta: &Endomorphism) -> Result<Endomorphism> {
        let inv = self.invert(&self.one_minus(beta))?;
        let inv2 = self.compose(&inv, &inv);
        let f4 = self.scalar_endo(4);
        Ok(self.neg_endo(&self.compose(&self.compose(&f4, beta), &inv2)))
    }
}

impl SubgroupEmbedding {
    /// `φ_K`, the restriction of `φ` to `K` (every subgroup is invariant).
    pub fn restrict_endomorphism(&self, phi: &Endomorphism) -> Endomorphism {
        Endomorphism(
            self.kept_components()
                .iter()
                .zip(self.sub().component_orders())
                .map(|(&j, &o)| phi.0[j] % o)
                .collect(),
        )
    }
}

/// A truncated p-adic unit `c = (c_0, c_1, …, c_(k−1))` with `c_0 ≠ 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawUnit", into = "RawUnit")]
pub struct PAdicUnit {
    p: u64,
    digits: Vec<u64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct RawUnit {
    p: u64,
    digits: Vec<u64>,
}

impl TryFrom<RawUnit> for PAdicUnit {
    type Error = Error;

    fn try_from(raw: RawUnit) -> Result<Self> {
        PAdicUnit::new(raw.p, raw.digits)
    }
}

impl From<PAdicUnit> for RawUnit {
    fn from(u: PAdicUnit) -> Self {
        RawUnit {
            p: u.p,
            digits: u.digits,
        }
    }
}

impl PAdicUnit {
    pub fn new(p: u64, digits: Vec<u64>) -> Result<Self> {
        if p == 2 {
            return Err(Error::TwoTorsion);
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if digits.is_empty() {
            return Err(Error::InvalidUnit("no digits".into()));
        }
        if let Some(d) = digits.iter().find(|&&d| d >= p) {
            return Err(Error::InvalidUnit(format!("digit {d} not in [0, {p})")));
        }
        if digits[0] == 0 {
            return Err(Error::InvalidUnit("c_0 must be nonzero".into()));
        }
        Ok(PAdicUnit { p, digits })
    }

    /// Base-`p` digits of `m mod p^level`.
    pub fn from_integer(p: u64, m: i64, level: u32) -> Result<Self> {
        let modulus = p
            .checked_pow(level)
            .ok_or_else(|| Error::GroupTooLarge(format!("{p}^{level}")))?;
        let mut r = m.rem_euclid(modulus as i64) as u64;
        let digits = (0..level)
            .map(|_| {
                let d = r % p;
                r /= p;
                d
            })
            .collect();
        PAdicUnit::new(p, digits)
    }

    /// `−1 = (p−1, p−1, …)`.
    pub fn minus_one(p: u64, level: u32) -> Result<Self> {
        PAdicUnit::new(p, vec![p.saturating_sub(1); level as usize])
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn digits(&self) -> &[u64] {
        &self.digits
    }

    pub fn level(&self) -> u32 {
        self.digits.len() as u32
    }

    pub fn c0(&self) -> u64 {
        self.digits[0]
    }

    /// `s_n = c_0 + c_1 p + … + c_(n−1) p^(n−1)`.
    pub fn truncate(&self, n: u32) -> Result<u64> {
        if n > self.level() {
            return Err(Error::LevelExceeded {
                requested: n,
                available: self.level(),
            });
        }
        let mut s: u64 = 0;
        let mut pow: u64 = 1;
        for (i, &d) in self.digits[..n as usize].iter().enumerate() {
            s = d
                .checked_mul(pow)
                .and_then(|t| s.checked_add(t))
                .ok_or_else(|| Error::GroupTooLarge(format!("s_{n} overflows")))?;
            if i + 1 < n as usize {
                pow = pow
                    .checked_mul(self.p)
                    .ok_or_else(|| Error::GroupTooLarge(format!("p^{n} overflows")))?;
            }
        }
        Ok(s)
    }

    /// All recorded digits equal `p − 1`.
    pub fn is_minus_one(&self) -> bool {
        self.digits.iter().all(|&d| d == self.p - 1)
    }

    /// Multiplication by `s_k` on the `Z(p^k)` component, identity elsewhere.
    pub fn to_endomorphism(&self, spec: &GroupSpec) -> Result<Endomorphism> {
        let j = spec
            .components()
            .iter()
            .position(|c| c.p == self.p)
            .ok_or_else(|| {
                Error::SpecMismatch(format!("{spec} has no component for p = {}", self.p))
            })?;
        let mut m: Vec<i64> = vec![1; spec.rank()];
        let s = self.truncate(spec.components()[j].k)?;
        m[j] = i64::try_from(s).map_err(|_| Error::GroupTooLarge(format!("s = {s}")))?;
        spec.endomorphism(&m)
    }
}

/// `s_n` of a unit; see [`PAdicUnit::truncate`].
pub fn truncate_unit(u: &PAdicUnit, n: u32) -> Result<u64> {
    u.truncate(n)
}

pub fn unit_to_endo(u: &PAdicUnit, spec: &GroupSpec) -> Result<Endomorphism> {
    u.to_endomorphism(spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::ComponentKind::Finite;

    fn z(p: u64, k: u32) -> GroupSpec {
        GroupSpec::cyclic(p, k).unwrap()
    }

    #[test]
    fn automorphism_examples() {
        let g = z(3, 2);
        assert!(g.is_automorphism(&g.endomorphism(&[2]).unwrap()));
        let three = g.endomorphism(&[3]).unwrap();
        assert!(!g.is_automorphism(&three));
        let h = GroupSpec::new(&[(3, 2, Finite), (5, 1, Finite)]).unwrap();
        assert!(h.is_identity(&h.endomorphism(&[1, 1]).unwrap()));
        assert!(h.endomorphism(&[1]).is_err());
    }

    #[test]
    fn invert_and_kappa_examples() {
        let g5 = z(5, 1);
        assert_eq!(
            g5.invert(&g5.endomorphism(&[2]).unwrap()).unwrap(),
            g5.endomorphism(&[3]).unwrap()
        );
        assert_eq!(
            g5.invert(&g5.endomorphism(&[0]).unwrap()),
            Err(Error::NotInvertible)
        );
        let g9 = z(3, 2);
        let beta = g9.endomorphism(&[2]).unwrap();
        // Brute force: −4 · 2 · (1 − 2)^(−2) mod 9.
        let inv = (0..9u64).find(|v| (8 * v) % 9 == 1).unwrap();
        let brute = (9 * 9 - (4 * 2 * inv * inv) % 9) % 9;
        assert_eq!(brute, 1);
        assert_eq!(
            g9.kappa(&beta).unwrap(),
            g9.endomorphism(&[brute as i64]).unwrap()
        );
        let alpha = g5.endomorphism(&[4]).unwrap();
        assert_eq!(g5.one_plus(&alpha), g5.endomorphism(&[0]).unwrap());
        assert!(g5.is_minus_identity(&alpha));
    }

    #[test]
    fn adjoint_examples() {
        let h = GroupSpec::new(&[(3, 2, Finite), (5, 1, Finite)]).unwrap();
        for m in [[2i64, 3], [1, 1], [3, 0]] {
            let phi = h.endomorphism(&m).unwrap();
            let adj = h.adjoint(&phi);
            assert_eq!(adj, phi);
            for x in h.elements() {
                for y in h.elements() {
                    assert_eq!(
                        h.pair(&h.apply(&phi, &x), &y),
                        h.pair(&x, &h.apply(&adj, &y))
                    );
                }
            }
        }
    }

    #[test]
    fn kernel_image_examples() {
        let g9 = z(3, 2);
        let zero = g9.one_plus(&g9.endomorphism(&[8]).unwrap());
        assert_eq!(g9.kernel(&zero), g9.whole());
        assert_eq!(g9.image(&zero), g9.trivial_subgroup());
        let three = g9.endomorphism(&[3]).unwrap();
        let ker: Vec<_> = g9
            .elements()
            .filter(|x| g9.apply(&three, x).is_zero())
            .collect();
        assert_eq!(
            ker,
            g9.subgroup_elements(&g9.kernel(&three)).collect::<Vec<_>>()
        );
        let mut img: Vec<_> = g9.elements().map(|x| g9.apply(&three, &x)).collect();
        img.sort();
        img.dedup();
        assert_eq!(
            img,
            g9.subgroup_elements(&g9.image(&three)).collect::<Vec<_>>()
        );
        let g5 = z(5, 1);
        let two = g5.endomorphism(&[2]).unwrap();
        assert_eq!(g5.kernel(&two), g5.trivial_subgroup());
        assert_eq!(g5.image(&two), g5.whole());
    }

    #[test]
    fn unit_examples() {
        let u = PAdicUnit::new(3, vec![2, 1]).unwrap();
        assert_eq!(truncate_unit(&u, 1).unwrap(), 2);
        assert_eq!(truncate_unit(&u, 2).unwrap(), 5);
        assert_eq!(
            u.truncate(3),
            Err(Error::LevelExceeded {
                requested: 3,
                available: 2
            })
        );
        let one = PAdicUnit::new(5, vec![1, 0, 0]).unwrap();
        assert_eq!(one.truncate(3).unwrap(), 1);
        let z125 = z(5, 3);
        assert!(z125.is_identity(&unit_to_endo(&one, &z125).unwrap()));
        let m1 = PAdicUnit::new(3, vec![2, 2, 2]).unwrap();
        assert_eq!(m1.truncate(3).unwrap(), 26);
        let z27 = z(3, 3);
        assert!(z27.is_minus_identity(&m1.to_endomorphism(&z27).unwrap()));
        assert!(m1.is_minus_one());
        assert!(PAdicUnit::new(3, vec![0, 1]).is_err());
        assert!(PAdicUnit::new(3, vec![3]).is_err());
        assert_eq!(PAdicUnit::from_integer(3, -1, 3).unwrap(), m1);
        assert!(unit_to_endo(&m1, &z(5, 1)).is_err());
    }

    #[test]
    fn unit_json() {
        let u: PAdicUnit = serde_json::from_str(r#"{"p":3,"digits":[2,1,0]}"#).unwrap();
        assert_eq!(u.truncate(3).unwrap(), 5);
        assert_eq!(
            serde_json::to_string(&u).unwrap(),
            r#"{"p":3,"digits":[2,1,0]}"#
        );
        assert!(serde_json::from_str::<PAdicUnit>(r#"{"p":3,"digits":[0,1]}"#).is_err());
    }

    #[test]
    fn restriction() {
        let g27 = z(3, 3);
        let k = g27.subgroup(vec![1]).unwrap();
        let emb = g27.restrict_to(&k);
        let phi = g27.endomorphism(&[20]).unwrap();
        let r = emb.restrict_endomorphism(&phi);
        assert_eq!(r.multipliers(), &[2]);
        for x in emb.sub().elements() {
            assert_eq!(
                emb.embed(&emb.sub().apply(&r, &x)),
                g27.apply(&phi, &emb.embed(&x))
            );
        }
        assert_eq!(
            g27.image_of_subgroup(&g27.endomorphism(&[3]).unwrap(), &k),
            g27.subgroup(vec![2]).unwrap()
        );
    }
}
