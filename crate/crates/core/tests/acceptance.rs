//! Acceptance suite: one PASS/FAIL line per criterion, with time bounds.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use heyde_core::*;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;

/// Float tolerance for the sanity-oracle comparisons.
const FLOAT_TOL: f64 = 1e-9;

type Outcome = Result<String, String>;

/// Distributions seen by criteria 1–6, replayed by criterion 11.
#[derive(Default)]
struct Seen {
    items: BTreeSet<(String, Vec<PmfEntryKey>)>,
    list: Vec<Distribution>,
}

type PmfEntryKey = (Vec<u64>, String);

impl Seen {
    fn add(&mut self, mu: &Distribution) {
        let key = (
            mu.spec().to_string(),
            mu.pmf()
                .iter()
                .map(|(x, m)| (x.coords().to_vec(), m.to_string()))
                .collect(),
        );
        if self.items.insert(key) {
            self.list.push(mu.clone());
        }
    }

    fn add_instance(&mut self, inst: &HeydeInstance) {
        self.add(inst.mu1());
        self.add(inst.mu2());
    }
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn spec(components: &[(u64, i64)]) -> GroupSpec {
    let c: Vec<_> = components
        .iter()
        .map(|&(p, k)| (p, k, ComponentKind::Finite))
        .collect();
    GroupSpec::new(&c).expect("valid spec")
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn c1_equivalence_exhaustive(seen: &mut Seen) -> Outcome {
    let z3 = spec(&[(3, 1)]);
    let pmfs: Vec<_> = enumerate_distributions(&z3, 2).collect();
    ensure(pmfs.len() == 6, || {
        format!("{} pmfs, expected 6", pmfs.len())
    })?;
    let mut n = 0;
    let mut symmetric = 0;
    for m in [1, 2] {
        let alpha = z3.endomorphism(&[m]).unwrap();
        for a in &pmfs {
            for b in &pmfs {
                let inst = HeydeInstance::new(a.clone(), b.clone(), alpha.clone()).unwrap();
                let s = inst.is_conditionally_symmetric();
                ensure(s == inst.satisfies_heyde_equation(), || {
                    format!("disagreement on {:?}", inst.to_file())
                })?;
                seen.add_instance(&inst);
                n += 1;
                symmetric += usize::from(s);
            }
        }
    }
    ensure(n == 72, || format!("{n} instances"))?;
    Ok(format!(
        "{n} instances, {symmetric} symmetric, 0 disagreements"
    ))
}

fn c2_equivalence_random(seen: &mut Seen) -> Outcome {
    let g = spec(&[(3, 2), (5, 1)]);
    let cfg = SweepConfig {
        specs: vec![g.clone()],
        mode: SweepMode::Random,
        denominator: 16,
        automorphisms: AutomorphismFilter::All,
        seed: 2024,
        budget: Some(500),
    };
    let r = run_sweep(&cfg).map_err(|e| e.to_string())?;
    ensure(r.instances == 500, || format!("{} instances", r.instances))?;
    ensure(r.equivalence.violated == 0, || {
        format!("{:?}", r.first_counterexample)
    })?;
    // Replay the same stream to record the distributions.
    let autos = all_automorphisms(&g);
    for i in 0..500 {
        let mut rng = instance_rng(cfg.seed, i);
        let _ = rng.random_range(0..1usize);
        let _ = rng.random_range(0..autos.len());
        seen.add(&random_distribution_in(&g, &g.whole(), 16, &mut rng));
        seen.add(&random_distribution_in(&g, &g.whole(), 16, &mut rng));
    }
    // Random pairs are almost never symmetric; add constructed ones and
    // half-mixed perturbations so both outcomes are exercised.
    let subgroups = g.enumerate_subgroups();
    let (mut extra, mut extra_sym) = (0, 0);
    for i in 0..250u64 {
        let mut rng = instance_rng(cfg.seed ^ 0xff, i);
        let sub = &subgroups[rng.random_range(0..subgroups.len())];
        let alphas = admissible_automorphisms(&g, sub);
        let alpha = &alphas[rng.random_range(0..alphas.len())];
        let c = construct_instance(&ConstructionSpec::random(&g, sub, alpha, 16, i))
            .map_err(|e| e.to_string())?;
        let x = g.element_at(rng.random_range(0..g.size()));
        let bent = half_mix(c.instance.mu2(), &x);
        let perturbed = HeydeInstance::new(c.instance.mu1().clone(), bent, alpha.clone()).unwrap();
        for inst in [&c.instance, &perturbed] {
            let s = inst.is_conditionally_symmetric();
            ensure(s == inst.satisfies_heyde_equation(), || {
                format!("disagreement on {:?}", inst.to_file())
            })?;
            extra += 1;
            extra_sym += usize::from(s);
        }
        ensure(c.instance.is_conditionally_symmetric(), || {
            "constructed pair not symmetric".into()
        })?;
    }
    Ok(format!(
        "{} random ({} symmetric) plus {extra} constructed/perturbed ({extra_sym} symmetric), 0 disagreements",
        r.instances, r.symmetric
    ))
}

/// `(μ + E_x) / 2`.
fn half_mix(mu: &Distribution, x: &GroupElement) -> Distribution {
    let mut m: std::collections::BTreeMap<GroupElement, BigRational> = mu
        .pmf()
        .iter()
        .map(|(k, v)| (k.clone(), v / BigInt::from(2)))
        .collect();
    *m.entry(x.clone()).or_insert_with(BigRational::zero) += q(1, 2);
    Distribution::new(mu.spec(), m).unwrap()
}

fn c3_theorem_soundness(seen: &mut Seen) -> Outcome {
    let mut combos = Vec::new();
    for g in [spec(&[(3, 3)]), spec(&[(3, 2), (5, 1)])] {
        for sub in g.enumerate_subgroups() {
            for alpha in admissible_automorphisms(&g, &sub) {
                combos.push((g.clone(), sub.clone(), alpha));
            }
        }
    }
    for i in 0..200u64 {
        let (g, sub, alpha) = &combos[(i as usize) % combos.len()];
        let cs = ConstructionSpec::random(g, sub, alpha, 8, i);
        let c = construct_instance(&cs).map_err(|e| format!("construction {i}: {e}"))?;
        let d = decompose(&c.instance).map_err(|e| format!("instance {i}: {e}"))?;
        ensure(d.flags.all(), || {
            format!("instance {i}: flags {:?}", d.flags)
        })?;
        ensure(d.g == c.effective_g, || {
            format!("instance {i}: G {:?} vs {:?}", d.g, c.effective_g)
        })?;
        seen.add_instance(&c.instance);
    }
    Ok(format!(
        "200 instances over {} (G, α) combinations, all flags true",
        combos.len()
    ))
}

fn c4_minus_identity(seen: &mut Seen) -> Outcome {
    let z3 = spec(&[(3, 1)]);
    let unit = PAdicUnit::new(3, vec![2, 2, 2]).unwrap();
    let pmfs: Vec<_> = enumerate_distributions(&z3, 4).collect();
    ensure(pmfs.len() == 15, || format!("{} pmfs", pmfs.len()))?;
    let as_points = |mu: &Distribution| -> Vec<(QuasicyclicPoint, BigRational)> {
        mu.pmf()
            .iter()
            .map(|(x, m)| (QuasicyclicPoint::new(x.coords()[0] as i64, 1), m.clone()))
            .collect()
    };
    let mut symmetric = 0;
    for a in &pmfs {
        for b in &pmfs {
            let inst = reduce_quasicyclic(3, 1, &as_points(a), &as_points(b), &unit)
                .map_err(|e| e.to_string())?;
            ensure(inst.spec().is_minus_identity(inst.alpha()), || {
                "α is not −I".into()
            })?;
            let s = inst.is_conditionally_symmetric();
            ensure(s == (a == b), || {
                format!("symmetric = {s} for {a:?} / {b:?}")
            })?;
            let r = check_quasicyclic(&inst).map_err(|e| e.to_string())?;
            ensure(r.holds, || format!("{r:?}"))?;
            symmetric += usize::from(s);
            seen.add(a);
        }
    }
    Ok(format!(
        "225 pairs, symmetric exactly on the {symmetric} diagonal pairs"
    ))
}

fn c5_haar_corollary(seen: &mut Seen) -> Outcome {
    let z25 = spec(&[(5, 2)]);
    let alpha = z25.endomorphism(&[2]).unwrap();
    ensure(
        z25.kernel(&z25.one_plus(&alpha)) == z25.trivial_subgroup(),
        || "Ker(I+α) ≠ {0}".into(),
    )?;
    let mut constructed = 0;
    for sub in z25.enumerate_subgroups() {
        for seed in 0..20 {
            let cs = ConstructionSpec::random(&z25, &sub, &alpha, 10, seed);
            let c = construct_instance(&cs).map_err(|e| e.to_string())?;
            let d = decompose(&c.instance).map_err(|e| e.to_string())?;
            let haar = Distribution::haar(&z25, &d.g).unwrap();
            ensure(d.lambda == haar, || {
                format!("λ ≠ m_G for {:?}", c.instance.to_file())
            })?;
            let r = classify_corollary(&c.instance, &d);
            ensure(r.get("haar").and_then(|c| c.holds) == Some(true), || {
                format!("{r:?}")
            })?;
            seen.add_instance(&c.instance);
            constructed += 1;
        }
    }
    // Every symmetric pair among denominator-2 pmfs.
    let pmfs: Vec<_> = enumerate_distributions(&z25, 2).collect();
    let mut symmetric = 0;
    for a in &pmfs {
        for b in &pmfs {
            let inst = HeydeInstance::new(a.clone(), b.clone(), alpha.clone()).unwrap();
            if !inst.is_conditionally_symmetric() {
                continue;
            }
            let d = decompose(&inst).map_err(|e| e.to_string())?;
            ensure(d.lambda == Distribution::haar(&z25, &d.g).unwrap(), || {
                format!("λ ≠ m_G for {:?}", inst.to_file())
            })?;
            seen.add_instance(&inst);
            symmetric += 1;
        }
    }
    Ok(format!(
        "{constructed} constructed and {symmetric} enumerated symmetric instances, λ = m_G in all"
    ))
}

fn c6_padic_c0_one(seen: &mut Seen) -> Outcome {
    let z27 = GroupSpec::new(&[(3, 3, ComponentKind::PadicTruncation)]).unwrap();
    let units: Vec<PAdicUnit> = (0..3)
        .flat_map(|c1| (0..3).map(move |c2| PAdicUnit::new(3, vec![1, c1, c2]).unwrap()))
        .collect();
    let pmfs: Vec<_> = enumerate_distributions(&z27, 2).collect();
    let mut symmetric = 0;
    let mut checked = 0;
    for (ui, u) in units.iter().enumerate() {
        let alpha = u.to_endomorphism(&z27).unwrap();
        // Enumerated pairs for three of the units, constructed fixtures for all.
        let pairs: Box<dyn Iterator<Item = (&Distribution, &Distribution)>> = if ui % 4 == 0 {
            Box::new(pmfs.iter().flat_map(|a| pmfs.iter().map(move |b| (a, b))))
        } else {
            Box::new(std::iter::empty())
        };
        let mut instances = Vec::new();
        for (a, b) in pairs {
            let inst = HeydeInstance::new(a.clone(), b.clone(), alpha.clone()).unwrap();
            checked += 1;
            if inst.is_conditionally_symmetric() {
                instances.push(inst);
            }
        }
        for x in z27.elements() {
            let cs = ConstructionSpec {
                g: z27.trivial_subgroup(),
                alpha: alpha.clone(),
                rho: Distribution::degenerate(&z27, &z27.zero()).unwrap(),
                x2: x,
            };
            instances.push(construct_instance(&cs).map_err(|e| e.to_string())?.instance);
        }
        for inst in instances {
            let d = decompose(&inst).map_err(|e| e.to_string())?;
            ensure(d.g == z27.trivial_subgroup(), || {
                format!("G ≠ {{0}} for {:?}", inst.to_file())
            })?;
            ensure(
                inst.mu1().is_degenerate() && inst.mu2().is_degenerate(),
                || format!("non-degenerate μ for {:?}", inst.to_file()),
            )?;
            let r = classify_corollary(&inst, &d);
            ensure(
                r.get("padic_c0_one").and_then(|c| c.holds) == Some(true),
                || format!("{r:?}"),
            )?;
            seen.add_instance(&inst);
            symmetric += 1;
        }
    }
    Ok(format!(
        "9 units with c₀ = 1, {checked} enumerated pairs, {symmetric} symmetric instances, all G = {{0}}"
    ))
}

fn c7_haar_char_fn() -> Outcome {
    let g = spec(&[(3, 2), (5, 1)]);
    let mut n = 0;
    for k in g.enumerate_subgroups() {
        let m = Distribution::haar(&g, &k).unwrap();
        let ann = g.annihilator(&k);
        for y in g.elements() {
            let v = m.char_fn(&y);
            let expected = if g.in_subgroup(&ann, &y) {
                v.is_one()
            } else {
                v.is_zero()
            };
            ensure(expected, || format!("m_K({k:?}) at {y}: {v}"))?;
            n += 1;
        }
    }
    Ok(format!(
        "6 subgroups × 45 characters = {n} exact evaluations"
    ))
}

fn c8_newle1() -> Outcome {
    let mut n = 0;
    let mut max_order = 0;
    for g in [spec(&[(3, 2)]), spec(&[(3, 3)])] {
        let subgroups = g.enumerate_subgroups();
        // I − β must be invertible on the whole dual.
        let alphas = admissible_automorphisms(&g, &g.whole());
        for i in 0..50u64 {
            let sub = &subgroups[i as usize % subgroups.len()];
            let alpha = &alphas[(i as usize / subgroups.len()) % alphas.len()];
            let cs = ConstructionSpec::random(&g, sub, alpha, 8, 1000 + i);
            let c = construct_instance(&cs).map_err(|e| e.to_string())?;
            let (f, h, beta) = lemma_fixture(&c.instance);
            let r = verify_newle1(&f, &h, &beta, FLOAT_TOL).map_err(|e| e.to_string())?;
            ensure(r.hypothesis, || {
                format!("hypothesis failed: {:?}", r.reason)
            })?;
            ensure(r.holds(), || format!("{r:?}"))?;
            max_order = max_order.max(r.max_kappa_order.unwrap_or(0));
            n += 1;
        }
    }
    Ok(format!(
        "{n} fixtures, hypothesis certified, 4 identities hold; max κ-orbit {max_order}"
    ))
}

/// `μ` with mass above 1/2 at `x₀`, so `μ̂` has no zeros.
fn dominant<R: Rng>(g: &GroupSpec, k: &Subgroup, rng: &mut R) -> Distribution {
    let pts: Vec<_> = g.subgroup_elements(k).collect();
    let d = rng.random_range(1..=6u64);
    let mut counts = vec![0u64; pts.len()];
    counts[0] = d + 1;
    for _ in 0..d {
        counts[rng.random_range(0..pts.len())] += 1;
    }
    let total = 2 * d + 1;
    Distribution::new(
        g,
        pts.into_iter()
            .zip(counts)
            .filter(|&(_, c)| c > 0)
            .map(|(x, c)| (x, q(c as i64, total as i64))),
    )
    .unwrap()
}

fn c9_difference_lemma() -> Outcome {
    let g = spec(&[(3, 2)]);
    let k = g.subgroup(vec![1]).unwrap();
    let mut n = 0;
    for i in 0..50u64 {
        let mut rng = instance_rng(77, i);
        let inst = match i % 3 {
            // α = −I, μ₁ = μ₂.
            0 => {
                let mu = dominant(&g, &g.whole(), &mut rng);
                HeydeInstance::new(mu.clone(), mu, g.minus_identity()).unwrap()
            }
            // G = 3Z(9) with α ≡ −1 mod 3.
            1 => {
                let alpha = g
                    .endomorphism(&[[2, 5, 8][rng.random_range(0..3)]])
                    .unwrap();
                let cs = ConstructionSpec {
                    g: k.clone(),
                    alpha,
                    rho: dominant(&g, &k, &mut rng),
                    x2: g.element_at(rng.random_range(0..9)),
                };
                construct_instance(&cs).map_err(|e| e.to_string())?.instance
            }
            // Degenerate pair, any α.
            _ => {
                let alpha = g
                    .endomorphism(&[[1, 2, 4, 5, 7, 8][rng.random_range(0..6)]])
                    .unwrap();
                let cs = ConstructionSpec {
                    g: g.trivial_subgroup(),
                    alpha,
                    rho: Distribution::degenerate(&g, &g.zero()).unwrap(),
                    x2: g.element_at(rng.random_range(0..9)),
                };
                construct_instance(&cs).map_err(|e| e.to_string())?.instance
            }
        };
        let (f, h, beta) = lemma_fixture(&inst);
        let r = verify_difference_lemma(&f, &h, &beta).map_err(|e| e.to_string())?;
        ensure(r.hypothesis, || format!("fixture {i}: hypothesis failed"))?;
        ensure(r.holds(), || format!("fixture {i}: {r:?}"))?;
        let float_ok =
            difference_lemma_log_check(&f, &h, &beta, FLOAT_TOL).map_err(|e| e.to_string())?;
        ensure(float_ok, || format!("fixture {i}: log cross-check failed"))?;
        n += 1;
    }
    Ok(format!(
        "{n} fixtures, both conclusions hold over all k₁, k₂, k₃, y"
    ))
}

fn c10_predicate_cross_check() -> Outcome {
    let specs = [
        spec(&[(3, 2)]),
        spec(&[(3, 3)]),
        spec(&[(5, 2)]),
        spec(&[(3, 2), (5, 1)]),
        spec(&[(3, 1), (5, 1), (7, 1)]),
    ];
    let (mut zeros, mut units, mut n) = (0, 0, 0);
    for i in 0..10_000u64 {
        let mut rng = instance_rng(10, i);
        let g = &specs[rng.random_range(0..specs.len())];
        let subgroups = g.enumerate_subgroups();
        let k = &subgroups[rng.random_range(0..subgroups.len())];
        let mu = match rng.random_range(0..3) {
            0 => Distribution::haar(g, k)
                .unwrap()
                .shift(&g.element_at(rng.random_range(0..g.size()))),
            1 => Distribution::degenerate(g, &g.element_at(rng.random_range(0..g.size()))).unwrap(),
            _ => random_distribution_in(g, k, 12, &mut rng),
        };
        let y = g.element_at(rng.random_range(0..g.size()));
        let v = mu.char_fn(&y);
        let modulus = v.abs_f64();
        ensure(v.is_zero() == (modulus < FLOAT_TOL), || {
            format!("is_zero {v} vs |v| = {modulus}")
        })?;
        ensure(
            v.is_unit_modulus() == ((modulus - 1.0).abs() < FLOAT_TOL),
            || format!("is_unit_modulus {v} vs |v| = {modulus}"),
        )?;
        ensure(v.is_unit_modulus() == mu.has_unit_modulus_at(&y), || {
            format!("combinatorial route at {y}")
        })?;
        zeros += usize::from(v.is_zero());
        units += usize::from(v.is_unit_modulus());
        n += 1;
    }
    Ok(format!(
        "{n} values ({zeros} zero, {units} unit modulus), exact and float agree"
    ))
}

fn c11_fourier(seen: &Seen) -> Outcome {
    let list = &seen.list;
    for mu in list {
        let table = mu.char_table();
        let back = fourier_inversion(mu.spec(), &table).map_err(|e| e.to_string())?;
        ensure(back == *mu, || {
            format!("inversion failed for {:?}", mu.to_entries())
        })?;
    }
    let mut pairs = 0;
    for w in list.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if a.spec() != b.spec() {
            continue;
        }
        let c = a.convolve(b).map_err(|e| e.to_string())?;
        let total = c.pmf().values().fold(BigRational::zero(), |s, m| s + m);
        ensure(total.is_one(), || "convolution lost mass".into())?;
        for y in a.spec().elements() {
            ensure(c.char_fn(&y) == &a.char_fn(&y) * &b.char_fn(&y), || {
                format!("convolution theorem fails at {y}")
            })?;
        }
        pairs += 1;
    }
    Ok(format!(
        "{} distributions inverted, {pairs} convolution pairs",
        list.len()
    ))
}

fn main() -> ExitCode {
    let mut seen = Seen::default();
    let secs = Duration::from_secs;
    let mut results: Vec<(u32, &str, Outcome, Duration, Option<Duration>)> = Vec::new();
    macro_rules! run {
        ($n:expr, $name:expr, $bound:expr, $body:expr) => {{
            let t = Instant::now();
            let out = $body;
            let took = t.elapsed();
            results.push(($n, $name, out, took, $bound));
            let last = results.last().unwrap();
            report(last);
        }};
    }
    run!(
        1,
        "equivalence, exhaustive Z(3)",
        Some(secs(1)),
        c1_equivalence_exhaustive(&mut seen)
    );
    run!(
        2,
        "equivalence, random Z(9)xZ(5)",
        Some(secs(60)),
        c2_equivalence_random(&mut seen)
    );
    run!(
        3,
        "structure theorem soundness",
        Some(secs(120)),
        c3_theorem_soundness(&mut seen)
    );
    run!(
        4,
        "alpha = -I characterization",
        Some(secs(10)),
        c4_minus_identity(&mut seen)
    );
    run!(
        5,
        "Haar corollary on Z(25)",
        Some(secs(30)),
        c5_haar_corollary(&mut seen)
    );
    run!(
        6,
        "p-adic corollary, c0 = 1",
        Some(secs(30)),
        c6_padic_c0_one(&mut seen)
    );
    run!(
        7,
        "Haar characteristic function",
        Some(secs(1)),
        c7_haar_char_fn()
    );
    run!(8, "newle1 verifier", Some(secs(60)), c8_newle1());
    run!(
        9,
        "finite-difference lemma verifier",
        Some(secs(60)),
        c9_difference_lemma()
    );
    run!(
        10,
        "predicate cross-check",
        Some(secs(30)),
        c10_predicate_cross_check()
    );
    run!(11, "Fourier infrastructure", None, c11_fourier(&seen));

    let failed = results
        .iter()
        .filter(|r| r.2.is_err() || r.4.is_some_and(|b| r.3 > b))
        .count();
    println!(
        "acceptance: {} of {} criteria passed",
        results.len() - failed,
        results.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn report((n, name, out, took, bound): &(u32, &str, Outcome, Duration, Option<Duration>)) {
    let over = bound.is_some_and(|b| *took > b);
    let status = if out.is_ok() && !over { "PASS" } else { "FAIL" };
    let bound = bound.map_or("none".to_string(), |b| format!("{} s", b.as_secs()));
    let detail = match out {
        Ok(d) => d.clone(),
        Err(e) => e.clone(),
    };
    let timing = if over { " (time bound exceeded)" } else { "" };
    println!(
        "criterion {n:>2} {status}: {name} [{:.3} s, bound {bound}]{timing}: {detail}",
        took.as_secs_f64()
    );
}
