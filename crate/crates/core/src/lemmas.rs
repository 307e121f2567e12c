//! Verifiers for the functional-equation lemmas.
//!
//! Each verifier certifies its hypothesis exactly before evaluating the
//! conclusion, so a reported violation cannot come from a bad fixture.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::Sub;

use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::cyclotomic::CycloElement;
use crate::distribution::CharacteristicFunction;
use crate::error::{Error, Result};
use crate::group::{DualElement, GroupElement, GroupSpec, SubgroupEmbedding};
use crate::heyde::HeydeInstance;
use crate::morphisms::Endomorphism;

/// A total function on the dual group, stored in index order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualFunction<T> {
    spec: GroupSpec,
    table: Vec<T>,
}

impl<T: Clone> DualFunction<T> {
    pub fn new(spec: &GroupSpec, table: Vec<T>) -> Result<Self> {
        if table.len() != spec.size() {
            return Err(Error::SpecMismatch(format!(
                "table has {} entries, dual has {}",
                table.len(),
                spec.size()
            )));
        }
        Ok(DualFunction {
            spec: spec.clone(),
            table,
        })
    }

    pub fn from_fn(spec: &GroupSpec, f: impl FnMut(DualElement) -> T) -> Self {
        DualFunction {
            spec: spec.clone(),
            table: spec.elements().map(f).collect(),
        }
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn table(&self) -> &[T] {
        &self.table
    }

    pub fn at(&self, y: &DualElement) -> &T {
        &self.table[self.spec.index_of(y)]
    }

    /// The restriction to a subgroup `H` of the dual, as a function on `H`.
    pub fn restrict(&self, emb: &SubgroupEmbedding) -> DualFunction<T> {
        DualFunction::from_fn(emb.sub(), |h| self.at(&emb.embed(&h)).clone())
    }
}

impl DualFunction<CycloElement> {
    /// `μ̂` as a table.
    pub fn characteristic(mu: &crate::distribution::Distribution) -> Self {
        let cf = CharacteristicFunction::new(mu);
        DualFunction::from_fn(mu.spec(), |y| cf.at(&y))
    }
}

/// `Δ_h^order F`, where `(Δ_h F)(y) = F(y + h) − F(y)`.
pub fn finite_difference<T>(f: &DualFunction<T>, h: &DualElement, order: u32) -> DualFunction<T>
where
    T: Clone,
    for<'a> &'a T: Sub<&'a T, Output = T>,
{
    let mut cur = f.clone();
    for _ in 0..order {
        let spec = &cur.spec;
        let next = spec
            .elements()
            .map(|y| cur.at(&spec.add(&y, h)) - cur.at(&y))
            .collect();
        cur = DualFunction {
            spec: spec.clone(),
            table: next,
        };
    }
    cur
}

/// The group law the lemma identities are read in: addition for rational
/// tables, multiplication for characteristic-function tables.
pub trait LawValue: Clone + PartialEq + fmt::Debug {
    fn law(&self, other: &Self) -> Self;
    /// Membership in the value group (nonzero for the multiplicative law).
    fn in_group(&self) -> bool;
}

impl LawValue for BigRational {
    fn law(&self, other: &Self) -> Self {
        self + other
    }

    fn in_group(&self) -> bool {
        true
    }
}

impl LawValue for CycloElement {
    fn law(&self, other: &Self) -> Self {
        self * other
    }

    fn in_group(&self) -> bool {
        !self.is_zero()
    }
}

fn fold<T: LawValue>(values: &[&T]) -> T {
    let (first, rest) = values.split_first().expect("at least one term");
    rest.iter().fold((*first).clone(), |acc, v| acc.law(v))
}

/// `Δ_a Δ_b Δ_c F(y)` vanishes, written as a balance of four terms.
fn triple_balanced<T: LawValue>(
    f: &DualFunction<T>,
    y: &GroupElement,
    a: &GroupElement,
    b: &GroupElement,
    c: &GroupElement,
) -> bool {
    let s = &f.spec;
    let ab = s.add(a, b);
    let abc = s.add(&ab, c);
    let ac = s.add(a, c);
    let bc = s.add(b, c);
    let at = |off: &GroupElement| f.at(&s.add(y, off));
    fold(&[at(&abc), at(a), at(b), at(c)]) == fold(&[at(&ab), at(&ac), at(&bc), f.at(y)])
}

/// A point where an identity failed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub identity: String,
    pub at: Vec<GroupElement>,
}

fn first_heyde_violation<T: LawValue>(
    f1: &DualFunction<T>,
    f2: &DualFunction<T>,
    beta: &Endomorphism,
) -> Option<Violation> {
    let s = &f1.spec;
    for u in s.elements() {
        for v in s.elements() {
            let bv = s.apply(beta, &v);
            let lhs = f1.at(&s.add(&u, &v)).law(f2.at(&s.add(&u, &bv)));
            let rhs = f1.at(&s.sub(&u, &v)).law(f2.at(&s.sub(&u, &bv)));
            if lhs != rhs {
                return Some(Violation {
                    identity: "heyde".into(),
                    at: vec![u, v],
                });
            }
        }
    }
    None
}

fn same_domain<T, U>(a: &DualFunction<T>, b: &DualFunction<U>, beta: &Endomorphism) -> Result<()> {
    if a.spec != b.spec {
        return Err(Error::SpecMismatch(format!(
            "functions on {} and {}",
            a.spec, b.spec
        )));
    }
    a.spec.check_endomorphism(beta)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DifferenceLemmaReport {
    pub hypothesis: bool,
    /// Conclusion for `φ₁`; `None` when the hypothesis failed.
    pub phi1: Option<bool>,
    pub phi2: Option<bool>,
    pub first_violation: Option<Violation>,
}

impl DifferenceLemmaReport {
    pub fn holds(&self) -> bool {
        self.hypothesis && self.phi1 == Some(true) && self.phi2 == Some(true)
    }
}

fn distinct_images(spec: &GroupSpec, phi: &Endomorphism) -> Vec<GroupElement> {
    spec.elements()
        .map(|k| spec.apply(phi, &k))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}

/// Checks `φ₁(u+v) φ₂(u+βv) = φ₁(u−v) φ₂(u−βv)` (in the value law), then
/// `Δ_((I−β)k₃) Δ_(2k₂) Δ_((I+β)k₁) φ₁ = 0` and
/// `Δ_(−(I−β)k₃) Δ_((I+β)k₂) Δ_(2βk₁) φ₂ = 0` for all `k_j` and `y`.
pub fn verify_difference_lemma<T: LawValue>(
    phi1: &DualFunction<T>,
    phi2: &DualFunction<T>,
    beta: &Endomorphism,
) -> Result<DifferenceLemmaReport> {
    same_domain(phi1, phi2, beta)?;
    let s = phi1.spec.clone();
    let hypothesis_failed = |v: Option<Violation>| DifferenceLemmaReport {
        hypothesis: false,
        phi1: None,
        phi2: None,
        first_violation: v,
    };
    if !phi1.table.iter().chain(&phi2.table).all(T::in_group) {
        return Ok(hypothesis_failed(None));
    }
    if let Some(v) = first_heyde_violation(phi1, phi2, beta) {
        return Ok(hypothesis_failed(Some(v)));
    }

    let plus = distinct_images(&s, &s.one_plus(beta));
    let minus = distinct_images(&s, &s.one_minus(beta));
    let neg_minus = distinct_images(&s, &s.neg_endo(&s.one_minus(beta)));
    let two = distinct_images(&s, &s.scalar_endo(2));
    let two_beta = distinct_images(&s, &s.compose(&s.scalar_endo(2), beta));

    let check = |f: &DualFunction<T>,
                 a: &[GroupElement],
                 b: &[GroupElement],
                 c: &[GroupElement],
                 name: &str| {
        for x in a {
            for y2 in b {
                for z in c {
                    for y in s.elements() {
                        if !triple_balanced(f, &y, x, y2, z) {
                            return Some(Violation {
                                identity: name.into(),
                                at: vec![x.clone(), y2.clone(), z.clone(), y],
                            });
                        }
                    }
                }
            }
        }
        None
    };
    let v1 = check(phi1, &minus, &two, &plus, "phi1");
    let v2 = check(phi2, &neg_minus, &plus, &two_beta, "phi2");
    Ok(DifferenceLemmaReport {
        hypothesis: true,
        phi1: Some(v1.is_none()),
        phi2: Some(v2.is_none()),
        first_violation: v1.or(v2),
    })
}

/// The difference identities read additively on `ln |F|` in floating point,
/// with relative tolerance `tol`.
pub fn difference_lemma_log_check(
    f1: &DualFunction<CycloElement>,
    f2: &DualFunction<CycloElement>,
    beta: &Endomorphism,
    tol: f64,
) -> Result<bool> {
    same_domain(f1, f2, beta)?;
    let s = &f1.spec;
    let logs = |f: &DualFunction<CycloElement>| -> Vec<f64> {
        f.table.iter().map(|v| v.abs_f64().ln()).collect()
    };
    let (l1, l2) = (logs(f1), logs(f2));
    if l1.iter().chain(&l2).any(|v| !v.is_finite()) {
        return Ok(false);
    }
    let close = |terms: [f64; 8]| {
        let signed =
            terms[0] + terms[1] + terms[2] + terms[3] - terms[4] - terms[5] - terms[6] - terms[7];
        let scale = 1.0 + terms.iter().map(|t| t.abs()).fold(0.0, f64::max);
        signed.abs() <= tol * scale
    };
    let one = |l: &[f64], a: &[GroupElement], b: &[GroupElement], c: &[GroupElement]| {
        a.iter().all(|x| {
            b.iter().all(|y2| {
                c.iter().all(|z| {
                    s.elements().all(|y| {
                        let at = |off: &GroupElement| l[s.index_of(&s.add(&y, off))];
                        let xy = s.add(x, y2);
                        close([
                            at(&s.add(&xy, z)),
                            at(x),
                            at(y2),
                            at(z),
                            at(&xy),
                            at(&s.add(x, z)),
                            at(&s.add(y2, z)),
                            l[s.index_of(&y)],
                        ])
                    })
                })
            })
        })
    };
    let plus = distinct_images(s, &s.one_plus(beta));
    let minus = distinct_images(s, &s.one_minus(beta));
    let neg_minus = distinct_images(s, &s.neg_endo(&s.one_minus(beta)));
    let two = distinct_images(s, &s.scalar_endo(2));
    let two_beta = distinct_images(s, &s.compose(&s.scalar_endo(2), beta));
    Ok(one(&l1, &minus, &two, &plus) && one(&l2, &neg_minus, &plus, &two_beta))
}

fn binomial(n: u32, k: u32) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * u64::from(n - i) / u64::from(i + 1))
}

/// Requires `Δ_h^(n+1) F = 0` for every `h` and reports whether `F` is
/// constant.
pub fn verify_polynomial_constancy<T: LawValue>(f: &DualFunction<T>, degree: u32) -> Result<bool> {
    if !f.table.iter().all(T::in_group) {
        return Err(Error::Precondition("values outside the value group".into()));
    }
    let s = &f.spec;
    let m = degree + 1;
    for h in s.elements() {
        let offsets: Vec<GroupElement> = (0..=m).map(|i| s.scale(&h, i64::from(i))).collect();
        for y in s.elements() {
            let mut pos = Vec::new();
            let mut neg = Vec::new();
            for (i, off) in offsets.iter().enumerate() {
                let v = f.at(&s.add(&y, off));
                let side = if (m - i as u32).is_multiple_of(2) {
                    &mut pos
                } else {
                    &mut neg
                };
                for _ in 0..binomial(m, i as u32) {
                    side.push(v);
                }
            }
            if fold(&pos) != fold(&neg) {
                return Err(Error::Precondition(format!(
                    "not a polynomial of degree ≤ {degree}"
                )));
            }
        }
    }
    let first = &f.table[0];
    Ok(f.table.iter().all(|v| v == first))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Newle1Report {
    pub hypothesis: bool,
    /// Why the hypothesis failed, if it did.
    pub reason: Option<String>,
    pub identity_f: Option<bool>,
    pub identity_g: Option<bool>,
    pub fixed_point_f: Option<bool>,
    pub fixed_point_g: Option<bool>,
    pub kappa: Option<Endomorphism>,
    /// Largest `m` with `κ^m y₀ = y₀` minimal, over all `y₀`.
    pub max_kappa_order: Option<u64>,
    pub first_violation: Option<Violation>,
}

impl Newle1Report {
    pub fn holds(&self) -> bool {
        self.hypothesis
            && [
                self.identity_f,
                self.identity_g,
                self.fixed_point_f,
                self.fixed_point_g,
            ]
            .iter()
            .all(|c| *c == Some(true))
    }

    fn failed(reason: String, violation: Option<Violation>) -> Self {
        Newle1Report {
            hypothesis: false,
            reason: Some(reason),
            identity_f: None,
            identity_g: None,
            fixed_point_f: None,
            fixed_point_g: None,
            kappa: None,
            max_kappa_order: None,
            first_violation: violation,
        }
    }
}

/// Checks the hypotheses (`f, g` real with values in `[0, 1]` up to `tol`,
/// `I − β` invertible, the functional equation exactly), then the two
/// substitution identities and the fixed-point equalities at every `y₀`.
pub fn verify_newle1(
    f: &DualFunction<CycloElement>,
    g: &DualFunction<CycloElement>,
    beta: &Endomorphism,
    tol: f64,
) -> Result<Newle1Report> {
    same_domain(f, g, beta)?;
    let s = f.spec.clone();
    let Ok(inv) = s.invert(&s.one_minus(beta)) else {
        return Ok(Newle1Report::failed("I − β is not invertible".into(), None));
    };
    if !s.is_automorphism(beta) {
        return Ok(Newle1Report::failed(
            "β is not an automorphism".into(),
            None,
        ));
    }
    let in_unit_interval = |v: &CycloElement| {
        let (re, _) = v.to_complex();
        v.is_real() && re >= -tol && re <= 1.0 + tol
    };
    if !f.table.iter().chain(&g.table).all(in_unit_interval) {
        return Ok(Newle1Report::failed("values not in [0, 1]".into(), None));
    }
    if let Some(v) = first_heyde_violation(f, g, beta) {
        return Ok(Newle1Report::failed(
            "functional equation fails".into(),
            Some(v),
        ));
    }

    let a = s.neg_endo(&s.compose(&s.one_plus(beta), &inv));
    let b = s.neg_endo(&s.compose(&s.compose(&s.scalar_endo(2), beta), &inv));
    let c = s.compose(&s.one_plus(beta), &inv);
    let d = s.compose(&s.scalar_endo(2), &inv);
    let kappa = s.kappa(beta)?;

    let mut first_violation = None;
    let mut note = |name: &str, y: &GroupElement| {
        if first_violation.is_none() {
            first_violation = Some(Violation {
                identity: name.into(),
                at: vec![y.clone()],
            });
        }
        false
    };
    let (mut id_f, mut id_g, mut fp_f, mut fp_g) = (true, true, true, true);
    let mut max_order = 0u64;
    for y in s.elements() {
        if *f.at(&y) != f.at(&s.apply(&a, &y)) * g.at(&s.apply(&b, &y)) {
            id_f &= note("identity_f", &y);
        }
        if *g.at(&y) != g.at(&s.apply(&c, &y)) * f.at(&s.apply(&d, &y)) {
            id_g &= note("identity_g", &y);
        }
        let mut order = 1u64;
        let mut z = s.apply(&kappa, &y);
        while z != y {
            z = s.apply(&kappa, &z);
            order += 1;
        }
        max_order = max_order.max(order);
        if f.at(&y) != g.at(&s.apply(&b, &y)) {
            fp_f &= note("fixed_point_f", &y);
        }
        if g.at(&y) != f.at(&s.apply(&d, &y)) {
            fp_g &= note("fixed_point_g", &y);
        }
    }
    Ok(Newle1Report {
        hypothesis: true,
        reason: None,
        identity_f: Some(id_f),
        identity_g: Some(id_g),
        fixed_point_f: Some(fp_f),
        fixed_point_g: Some(fp_g),
        kappa: Some(kappa),
        max_kappa_order: Some(max_order),
        first_violation,
    })
}

/// `(ν̂₁, ν̂₂, α̃)` with `ν_j = μ_j * μ̄_j`, so `ν̂_j = |μ̂_j|²`.
pub fn lemma_fixture(
    inst: &HeydeInstance,
) -> (
    DualFunction<CycloElement>,
    DualFunction<CycloElement>,
    Endomorphism,
) {
    let nu = |mu| {
        let t = DualFunction::characteristic(mu);
        DualFunction {
            spec: t.spec.clone(),
            table: t.table.iter().map(CycloElement::norm_squared).collect(),
        }
    };
    let beta = inst.spec().adjoint(inst.alpha());
    (nu(inst.mu1()), nu(inst.mu2()), beta)
}

/// Rational table perturbed at one point, for negative controls.
pub fn perturb(
    f: &DualFunction<BigRational>,
    y: &DualElement,
    by: &BigRational,
) -> DualFunction<BigRational> {
    let mut out = f.clone();
    let i = f.spec.index_of(y);
    out.table[i] = &out.table[i] + by;
    out
}

/// The zero rational function on `spec`.
pub fn zero_function(spec: &GroupSpec) -> DualFunction<BigRational> {
    DualFunction::from_fn(spec, |_| BigRational::zero())
}
