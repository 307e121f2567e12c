//! Seeded and exhaustive sweeps over instances.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::{
    all_automorphisms, construct_instance, enumerate_distributions, instance_rng,
    random_construction_spec, random_distribution_in,
};
use crate::group::GroupSpec;
use crate::heyde::{
    classify_corollary, decompose, CorollaryReport, HeydeDecomposition, HeydeInstance, InstanceFile,
};
use crate::morphisms::Endomorphism;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMode {
    /// Every pair of pmfs with masses in `(1/d)ℤ`.
    #[default]
    Exhaustive,
    /// Random pairs with denominators up to `d`.
    Random,
    /// Symmetric instances from the sufficiency construction.
    Constructed,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AutomorphismFilter {
    #[default]
    All,
    MinusIdentity,
    /// Explicit multipliers; entries that are not automorphisms of a spec
    /// are rejected.
    List(Vec<Endomorphism>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub specs: Vec<GroupSpec>,
    #[serde(default)]
    pub mode: SweepMode,
    pub denominator: u64,
    #[serde(default)]
    pub automorphisms: AutomorphismFilter,
    #[serde(default)]
    pub seed: u64,
    /// Maximum number of instances. Random and constructed sweeps need one.
    #[serde(default)]
    pub budget: Option<u64>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub verified: u64,
    pub violated: u64,
    pub skipped: u64,
}

impl Counts {
    fn record(&mut self, outcome: Option<bool>) {
        match outcome {
            Some(true) => self.verified += 1,
            Some(false) => self.violated += 1,
            None => self.skipped += 1,
        }
    }

    fn merge(&mut self, other: &Counts) {
        self.verified += other.verified;
        self.violated += other.violated;
        self.skipped += other.skipped;
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub category: String,
    pub detail: String,
    pub instance: InstanceFile,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SweepReport {
    pub instances: u64,
    pub symmetric: u64,
    pub equivalence: Counts,
    pub decomposition: Counts,
    pub corollaries: Counts,
    pub construction: Counts,
    pub first_counterexample: Option<Counterexample>,
}

impl SweepReport {
    pub fn violations(&self) -> u64 {
        self.equivalence.violated
            + self.decomposition.violated
            + self.corollaries.violated
            + self.construction.violated
    }

    /// Associative; the earlier report's counterexample wins.
    pub fn merge(&mut self, other: &SweepReport) {
        self.instances += other.instances;
        self.symmetric += other.symmetric;
        self.equivalence.merge(&other.equivalence);
        self.decomposition.merge(&other.decomposition);
        self.corollaries.merge(&other.corollaries);
        self.construction.merge(&other.construction);
        if self.first_counterexample.is_none() {
            self.first_counterexample = other.first_counterexample.clone();
        }
    }

    fn flag(&mut self, category: &str, detail: String, inst: &HeydeInstance) {
        if self.first_counterexample.is_none() {
            self.first_counterexample = Some(Counterexample {
                category: category.into(),
                detail,
                instance: inst.to_file(),
            });
        }
    }
}

/// Per-instance result of the full battery.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InstanceOutcome {
    pub symmetric: bool,
    pub heyde_equation: bool,
    pub decomposition: Option<HeydeDecomposition>,
    pub corollaries: Option<CorollaryReport>,
    /// Set when the decomposition raised a finding.
    pub finding: Option<String>,
}

impl InstanceOutcome {
    pub fn agree(&self) -> bool {
        self.symmetric == self.heyde_equation
    }

    pub fn consistent(&self) -> bool {
        self.agree()
            && self.finding.is_none()
            && self.decomposition.as_ref().is_none_or(|d| d.flags.all())
            && self.corollaries.as_ref().is_none_or(|c| c.all_hold())
    }
}

/// Symmetry, functional equation, decomposition and corollaries for one
/// instance.
pub fn check_instance(inst: &HeydeInstance) -> Result<InstanceOutcome> {
    let symmetric = inst.is_conditionally_symmetric();
    let heyde_equation = inst.satisfies_heyde_equation();
    let mut out = InstanceOutcome {
        symmetric,
        heyde_equation,
        decomposition: None,
        corollaries: None,
        finding: None,
    };
    if symmetric {
        match decompose(inst) {
            Ok(d) => {
                out.corollaries = Some(classify_corollary(inst, &d));
                out.decomposition = Some(d);
            }
            Err(e) if e.is_finding() => out.finding = Some(e.to_string()),
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

fn tally(report: &mut SweepReport, inst: &HeydeInstance) -> Result<()> {
    let out = check_instance(inst)?;
    report.instances += 1;
    report.symmetric += u64::from(out.symmetric);
    report.equivalence.record(Some(out.agree()));
    if !out.agree() {
        report.flag(
            "equivalence",
            format!(
                "symmetric = {}, heyde equation = {}",
                out.symmetric, out.heyde_equation
            ),
            inst,
        );
    }
    if !out.symmetric {
        report.decomposition.record(None);
        report.corollaries.record(None);
        return Ok(());
    }
    if let Some(f) = &out.finding {
        report.decomposition.record(Some(false));
        report.corollaries.record(None);
        report.flag("decomposition", f.clone(), inst);
        return Ok(());
    }
    let d = out
        .decomposition
        .as_ref()
        .expect("symmetric instance decomposed");
    report.decomposition.record(Some(d.flags.all()));
    if !d.flags.all() {
        report.flag("decomposition", format!("{:?}", d.flags), inst);
    }
    let c = out
        .corollaries
        .as_ref()
        .expect("decomposed instance classified");
    report.corollaries.record(Some(c.all_hold()));
    if !c.all_hold() {
        report.flag("corollaries", format!("{:?}", c.checks), inst);
    }
    Ok(())
}

fn automorphisms_for(spec: &GroupSpec, filter: &AutomorphismFilter) -> Result<Vec<Endomorphism>> {
    match filter {
        AutomorphismFilter::All => Ok(all_automorphisms(spec)),
        AutomorphismFilter::MinusIdentity => Ok(vec![spec.minus_identity()]),
        AutomorphismFilter::List(list) => list
            .iter()
            .map(|a| {
                spec.check_endomorphism(a)?;
                if spec.is_automorphism(a) {
                    Ok(a.clone())
                } else {
                    Err(Error::NotAutomorphism)
                }
            })
            .collect(),
    }
}

fn pick<'a, T, R: Rng>(rng: &mut R, items: &'a [T]) -> &'a T {
    &items[rng.random_range(0..items.len())]
}

/// Runs the configured sweep. Deterministic for a fixed config.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepReport> {
    let mut report = SweepReport::default();
    let budget = config.budget;
    if budget == Some(0) || config.specs.is_empty() {
        return Ok(report);
    }
    if config.denominator == 0 {
        return Err(Error::Precondition("denominator must be at least 1".into()));
    }
    let autos = config
        .specs
        .iter()
        .map(|s| automorphisms_for(s, &config.automorphisms))
        .collect::<Result<Vec<_>>>()?;
    let at_budget =
        |r: &SweepReport| budget.is_some_and(|b| r.instances + r.construction.skipped >= b);

    match config.mode {
        SweepMode::Exhaustive => {
            'outer: for (spec, alphas) in config.specs.iter().zip(&autos) {
                let pmfs: Vec<_> = enumerate_distributions(spec, config.denominator).collect();
                for alpha in alphas {
                    for mu1 in &pmfs {
                        for mu2 in &pmfs {
                            if at_budget(&report) {
                                break 'outer;
                            }
                            let inst = HeydeInstance::new(mu1.clone(), mu2.clone(), alpha.clone())?;
                            tally(&mut report, &inst)?;
                        }
                    }
                }
            }
        }
        SweepMode::Random | SweepMode::Constructed => {
            let Some(b) = budget else {
                return Err(Error::Precondition("random sweeps need a budget".into()));
            };
            for i in 0..b {
                let mut rng = instance_rng(config.seed, i);
                let j = rng.random_range(0..config.specs.len());
                let spec = &config.specs[j];
                if config.mode == SweepMode::Random {
                    if autos[j].is_empty() {
                        report.construction.record(None);
                        continue;
                    }
                    let alpha = pick(&mut rng, &autos[j]).clone();
                    let whole = spec.whole();
                    let mu1 = random_distribution_in(spec, &whole, config.denominator, &mut rng);
                    let mu2 = random_distribution_in(spec, &whole, config.denominator, &mut rng);
                    tally(&mut report, &HeydeInstance::new(mu1, mu2, alpha)?)?;
                    continue;
                }
                let Some(cs) =
                    random_construction_spec(spec, &autos[j], config.denominator, &mut rng)
                else {
                    report.construction.record(None);
                    continue;
                };
                let alpha = cs.alpha.clone();
                match construct_instance(&cs) {
                    Ok(c) => {
                        report.construction.record(Some(true));
                        tally(&mut report, &c.instance)?;
                    }
                    Err(e) if e.is_finding() => {
                        report.construction.record(Some(false));
                        let inst = HeydeInstance::new(cs.rho.clone(), cs.rho.clone(), alpha)?;
                        report.flag("construction", e.to_string(), &inst);
                    }
                    Err(e) => return Err(e),
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z3() -> GroupSpec {
        GroupSpec::cyclic(3, 1).unwrap()
    }

    #[test]
    fn exhaustive_z3() {
        let cfg = SweepConfig {
            specs: vec![z3()],
            mode: SweepMode::Exhaustive,
            denominator: 2,
            automorphisms: AutomorphismFilter::All,
            seed: 0,
            budget: None,
        };
        let r = run_sweep(&cfg).unwrap();
        assert_eq!(r.instances, 72);
        assert_eq!(r.violations(), 0);
        assert!(r.symmetric > 0);
        assert_eq!(r.decomposition.verified, r.symmetric);
    }

    #[test]
    fn budget_zero_is_empty() {
        let cfg = SweepConfig {
            specs: vec![z3()],
            mode: SweepMode::Random,
            denominator: 4,
            automorphisms: AutomorphismFilter::All,
            seed: 9,
            budget: Some(0),
        };
        assert_eq!(run_sweep(&cfg).unwrap(), SweepReport::default());
    }

    #[test]
    fn deterministic_constructed() {
        let cfg = SweepConfig {
            specs: vec![
                GroupSpec::cyclic(3, 2).unwrap(),
                GroupSpec::cyclic(5, 1).unwrap(),
            ],
            mode: SweepMode::Constructed,
            denominator: 6,
            automorphisms: AutomorphismFilter::All,
            seed: 42,
            budget: Some(20),
        };
        let a = run_sweep(&cfg).unwrap();
        assert_eq!(a, run_sweep(&cfg).unwrap());
        assert_eq!(a.violations(), 0);
        assert_eq!(a.symmetric, a.instances);
        let json = serde_json::to_string(&cfg).unwrap();
        assert_eq!(serde_json::from_str::<SweepConfig>(&json).unwrap(), cfg);
    }

    #[test]
    fn merge_is_additive() {
        let mut a = SweepReport {
            instances: 2,
            ..Default::default()
        };
        a.equivalence.verified = 2;
        let mut b = a.clone();
        b.merge(&a);
        assert_eq!(b.instances, 4);
        assert_eq!(b.equivalence.verified, 4);
    }
}
