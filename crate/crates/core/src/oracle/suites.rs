//! Property suites over generated and enumerated instances.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::rc::Rc;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;

use crate::denote::{
    denote_configuration, denote_value, discard, env_elems, fold_iso, sem_elems, sem_elems_with, unfold_iso, Binding,
    DiscardEntry, DiscardEnv, Discarder, FuelModel, Outcome, TypeEnv,
};
use crate::frontend::{parse_program, print_program, Abbreviation, InputDecl, Printer, SourceProgram};
use crate::interp::{run, trace, Configuration, RunOutcome};
use crate::syntax::{AtomSpec, AtomTable, Pos, TermKind, Type, VarContext};
use crate::typecheck::check_configuration;
use crate::value::{Value, ValueAssignment};

use super::brute::brute_values;
use super::gen::{constructors, GenConfig, Generator};
use super::report::{SuiteReport, VerifyReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Suite {
    Generator,
    SubjectReduction,
    Progress,
    Soundness,
    Adequacy,
    Discardability,
    FoldUnfold,
    DiscardUniqueness,
    Substitution,
    Enumeration,
    Roundtrip,
}

impl Suite {
    pub const ALL: [Suite; 11] = [
        Suite::Generator,
        Suite::SubjectReduction,
        Suite::Progress,
        Suite::Soundness,
        Suite::Adequacy,
        Suite::Discardability,
        Suite::FoldUnfold,
        Suite::DiscardUniqueness,
        Suite::Substitution,
        Suite::Enumeration,
        Suite::Roundtrip,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Generator => "generator",
            Suite::SubjectReduction => "subject-reduction",
            Suite::Progress => "progress",
            Suite::Soundness => "soundness",
            Suite::Adequacy => "adequacy",
            Suite::Discardability => "discardability",
            Suite::FoldUnfold => "fold-unfold",
            Suite::DiscardUniqueness => "discard-uniqueness",
            Suite::Substitution => "substitution",
            Suite::Enumeration => "enumeration",
            Suite::Roundtrip => "roundtrip",
        }
    }

    fn tag(self) -> u64 {
        Suite::ALL.iter().position(|s| *s == self).unwrap() as u64 + 1
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL.iter().copied().find(|x| x.name() == s).ok_or_else(|| {
            let names: Vec<&str> = Suite::ALL.iter().map(|x| x.name()).collect();
            format!("unknown suite `{s}` (expected one of {})", names.join(", "))
        })
    }
}

/// Knobs shared by every suite.
#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Largest value size enumerated.
    pub size_bound: usize,
    /// Step bound for adequacy and for deciding termination.
    pub fuel: u64,
    /// Trace length cap in subject reduction and progress.
    pub trace_limit: u64,
    pub configurations: usize,
    pub programs: usize,
    pub divergent_every: usize,
    pub triples: usize,
    pub roundtrips: usize,
    /// Types for the enumeration-based suites.
    pub types: Vec<Type>,
    pub gen: GenConfig,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            seed: 0,
            size_bound: 12,
            fuel: 10_000,
            trace_limit: 1_000,
            configurations: 1_000,
            programs: 300,
            divergent_every: 10,
            triples: 60,
            roundtrips: 1_000,
            types: super::corpus::corpus_types(),
            gen: GenConfig::default(),
        }
    }
}

impl VerifyOptions {
    fn instance_seed(&self, suite: Suite, index: usize) -> u64 {
        // splitmix64 over (seed, suite, index)
        let mut z = self
            .seed
            .wrapping_add(suite.tag().wrapping_mul(0x9E37_79B9_7F4A_7C15))
            .wrapping_add((index as u64).wrapping_mul(0xD1B5_4A32_D192_ED03));
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    fn generator(&self, suite: Suite, index: usize) -> Generator {
        let cfg = GenConfig { seed: self.instance_seed(suite, index), fuel: self.fuel, ..self.gen.clone() };
        Generator::new(&cfg)
    }

    fn mu_types(&self) -> Vec<Type> {
        let mut out: Vec<Type> = Vec::new();
        for t in &self.types {
            collect_closed_mu(t, &mut out);
        }
        out
    }
}

fn collect_closed_mu(t: &Type, out: &mut Vec<Type>) {
    if t.is_closed() && matches!(t, Type::Mu(..)) && !out.contains(t) {
        out.push(t.clone());
    }
    match t {
        Type::Sum(a, b) | Type::Tensor(a, b) => {
            collect_closed_mu(a, out);
            collect_closed_mu(b, out);
        }
        Type::Mu(_, body) => collect_closed_mu(body, out),
        _ => {}
    }
}

/// Per-instance findings, merged in index order.
#[derive(Default)]
struct Finding {
    failures: Vec<String>,
    counts: Vec<(&'static str, u64)>,
    counted: bool,
}

impl Finding {
    fn fail(&mut self, msg: impl Into<String>) {
        self.failures.push(msg.into());
    }

    fn count(&mut self, key: &'static str, by: u64) {
        self.counts.push((key, by));
    }
}

fn merge(report: &mut SuiteReport, findings: Vec<Finding>) {
    for f in findings {
        if f.counted {
            report.instances += 1;
        }
        for msg in f.failures {
            report.fail(msg);
        }
        for (k, v) in f.counts {
            report.count(k, v);
        }
    }
}

fn show(c: &Configuration) -> String {
    let p = Printer::sugared();
    format!("{} | {}", p.term_inline(&c.term), p.store(&c.store))
}

pub fn run_suite(suite: Suite, opts: &VerifyOptions) -> SuiteReport {
    let mut report = SuiteReport::new(suite.name(), opts.seed);
    match suite {
        Suite::Generator => generator_suite(opts, &mut report),
        Suite::SubjectReduction => subject_reduction(opts, &mut report),
        Suite::Progress => progress(opts, &mut report),
        Suite::Soundness => soundness(opts, &mut report),
        Suite::Adequacy => adequacy(opts, &mut report),
        Suite::Discardability => discardability(opts, &mut report),
        Suite::FoldUnfold => fold_unfold(opts, &mut report),
        Suite::DiscardUniqueness => discard_uniqueness(opts, &mut report),
        Suite::Substitution => substitution(opts, &mut report),
        Suite::Enumeration => enumeration(opts, &mut report),
        Suite::Roundtrip => roundtrip(opts, &mut report),
    }
    report
}

pub fn verify(suites: &[Suite], opts: &VerifyOptions) -> VerifyReport {
    VerifyReport { suites: suites.iter().map(|s| run_suite(*s, opts)).collect() }
}

// ---------------------------------------------------------------------------
// Operational suites
// ---------------------------------------------------------------------------

fn generator_suite(opts: &VerifyOptions, report: &mut SuiteReport) {
    let findings: Vec<(Finding, BTreeSet<TermKind>)> = (0..opts.configurations)
        .into_par_iter()
        .map(|i| {
            let mut f = Finding { counted: true, ..Default::default() };
            let c = opts.generator(Suite::Generator, i).configuration();
            if let Err(e) = check_configuration(&c.term, &c.store) {
                f.fail(format!("ill-formed generated configuration: {e}\n{}", show(&c)));
            }
            (f, constructors(&c.term))
        })
        .collect();
    let mut seen = BTreeSet::new();
    let mut plain = Vec::new();
    for (f, kinds) in findings {
        seen.extend(kinds);
        plain.push(f);
    }
    merge(report, plain);
    for kind in TermKind::ALL {
        if seen.contains(&kind) {
            report.count("constructors-covered", 1);
        } else {
            report.fail(format!("constructor {kind:?} never generated"));
        }
    }
}

fn subject_reduction(opts: &VerifyOptions, report: &mut SuiteReport) {
    let findings: Vec<Finding> = (0..opts.configurations)
        .into_par_iter()
        .map(|i| {
            let mut f = Finding { counted: true, ..Default::default() };
            let c = opts.generator(Suite::SubjectReduction, i).configuration();
            let sigma = match check_configuration(&c.term, &c.store) {
                Ok((_, sigma)) => sigma,
                Err(e) => {
                    f.fail(format!("generated configuration ill-formed: {e}"));
                    return f;
                }
            };
            let t = trace(&c, opts.trace_limit);
            f.count("steps", t.configurations.len() as u64 - 1);
            f.count(if t.terminated() { "terminated" } else { "truncated" }, 1);
            for (k, next) in t.configurations.iter().enumerate().skip(1) {
                match check_configuration(&next.term, &next.store) {
                    Ok((_, s)) if s == sigma => {}
                    Ok((_, s)) => {
                        f.fail(format!(
                            "step {k}: output context changed from {} to {}\n{}",
                            Printer::sugared().context(&sigma),
                            Printer::sugared().context(&s),
                            show(&c)
                        ));
                        break;
                    }
                    Err(e) => {
                        f.fail(format!("step {k}: {e}\n{}", show(&c)));
                        break;
                    }
                }
            }
            f
        })
        .collect();
    merge(report, findings);
}

fn progress(opts: &VerifyOptions, report: &mut SuiteReport) {
    let findings: Vec<Finding> = (0..opts.configurations)
        .into_par_iter()
        .map(|i| {
            let mut f = Finding { counted: true, ..Default::default() };
            let c = opts.generator(Suite::SubjectReduction, i).configuration();
            let t = trace(&c, opts.trace_limit);
            f.count("steps", t.configurations.len() as u64 - 1);
            if let Some(reason) = &t.stuck {
                f.fail(format!("stuck after {} steps: {reason}\n{}", t.configurations.len() - 1, show(&c)));
            }
            f
        })
        .collect();
    merge(report, findings);
}

fn soundness_instance(opts: &VerifyOptions, index: usize) -> Option<Finding> {
    let c = opts.generator(Suite::Soundness, index).terminating_configuration();
    let RunOutcome::Terminated { store, steps } = run(&c, opts.fuel) else { return None };
    let mut f = Finding { counted: true, ..Default::default() };
    f.count("steps", steps);
    let expected = Outcome::Defined(store);
    let t = trace(&c, steps);
    for (i, ci) in t.configurations.iter().enumerate() {
        let remaining = steps - i as u64;
        let at = |fuel, model| denote_configuration(ci, fuel, model);
        match at(remaining, FuelModel::OperationalSteps) {
            Ok(d) if d == expected => {}
            Ok(d) => {
                f.fail(format!("step {i}: denotation {d} differs from final store {expected}\n{}", show(&c)));
                break;
            }
            Err(e) => {
                f.fail(format!("step {i}: {e}\n{}", show(&c)));
                break;
            }
        }
        if remaining > 0 && !at(remaining - 1, FuelModel::OperationalSteps).map(|d| d.is_bottom()).unwrap_or(false) {
            f.fail(format!("step {i}: defined below the remaining step count {remaining}\n{}", show(&c)));
            break;
        }
        if at(opts.fuel, FuelModel::Unfoldings).ok().as_ref() != Some(&expected) {
            f.fail(format!("step {i}: loop-unfolding denotation differs\n{}", show(&c)));
            break;
        }
    }
    f.count("configurations", t.configurations.len() as u64);
    Some(f)
}

fn soundness(opts: &VerifyOptions, report: &mut SuiteReport) {
    let mut findings = Vec::new();
    let mut next = 0;
    let attempts = opts.programs * 4;
    while findings.len() < opts.programs && next < attempts {
        let batch = (opts.programs - findings.len()).max(16);
        let end = (next + batch).min(attempts);
        let got: Vec<Option<Finding>> = (next..end).into_par_iter().map(|i| soundness_instance(opts, i)).collect();
        for g in got.into_iter().flatten() {
            if findings.len() < opts.programs {
                findings.push(g);
            }
        }
        next = end;
    }
    let found = findings.len();
    merge(report, findings);
    if found < opts.programs {
        report.fail(format!("only {found} terminating programs in {attempts} attempts"));
    }
}

fn adequacy(opts: &VerifyOptions, report: &mut SuiteReport) {
    let findings: Vec<Finding> = (0..opts.programs)
        .into_par_iter()
        .map(|i| {
            let mut f = Finding { counted: true, ..Default::default() };
            let divergent = opts.divergent_every > 0 && i % opts.divergent_every == 0;
            let term = opts.generator(Suite::Adequacy, i).closed_program(divergent);
            let c = Configuration::new(term, ValueAssignment::new());
            let ran = run(&c, opts.fuel);
            let den = match denote_configuration(&c, opts.fuel, FuelModel::OperationalSteps) {
                Ok(d) => d,
                Err(e) => {
                    f.fail(format!("ill-typed closed program: {e}"));
                    return f;
                }
            };
            match (&ran, &den) {
                (RunOutcome::Terminated { store, .. }, Outcome::Defined(v)) => {
                    f.count("terminating", 1);
                    if store != v {
                        f.fail(format!(
                            "results differ: run {} vs denotation {}\n{}",
                            Printer::sugared().store(store),
                            den,
                            show(&c)
                        ));
                    }
                }
                (RunOutcome::OutOfFuel(_), Outcome::Bottom) => f.count("bottom", 1),
                (RunOutcome::Stuck { reason, .. }, _) => f.fail(format!("stuck: {reason}\n{}", show(&c))),
                _ => f.fail(format!(
                    "terminates={} but denotation defined={}\n{}",
                    ran.terminated().is_some(),
                    !den.is_bottom(),
                    show(&c)
                )),
            }
            if divergent {
                f.count("known-divergent", 1);
                if ran.terminated().is_some() {
                    f.fail(format!("known-divergent program terminated\n{}", show(&c)));
                }
            }
            f
        })
        .collect();
    merge(report, findings);
}

// ---------------------------------------------------------------------------
// Semantic suites
// ---------------------------------------------------------------------------

fn discardability(opts: &VerifyOptions, report: &mut SuiteReport) {
    let atoms = AtomTable::default();
    let findings: Vec<Finding> = opts
        .types
        .par_iter()
        .map(|ty| {
            let mut f = Finding::default();
            let values = sem_elems(ty, opts.size_bound);
            f.count("types", 1);
            f.count("values", values.len() as u64);
            for v in &values {
                if discard(&atoms, ty, &denote_value(v)) != Some(Value::Star) {
                    f.fail(format!(
                        "{} : {} is not discardable",
                        Printer::sugared().value(v),
                        Printer::sugared().ty(ty)
                    ));
                }
            }
            f
        })
        .collect();
    report.instances = findings.iter().map(|f| f.counts.iter().find(|c| c.0 == "values").unwrap().1).sum();
    merge(report, findings);
}

fn fold_unfold(opts: &VerifyOptions, report: &mut SuiteReport) {
    let atoms = AtomTable::default();
    let mus = opts.mu_types();
    let k = opts.size_bound;
    let findings: Vec<Finding> = mus
        .par_iter()
        .map(|mu| {
            let mut f = Finding::default();
            let p = Printer::sugared();
            let unfolded = mu.unfold_mu().unwrap();
            let inner = sem_elems(&unfolded, k - 1);
            let outer: HashSet<Value> = sem_elems(mu, k).into_iter().collect();
            let mut image = HashSet::new();
            for v in &inner {
                let w = fold_iso(mu, v);
                if unfold_iso(mu, &w) != *v {
                    f.fail(format!("unfold(fold({})) differs", p.value(v)));
                }
                if discard(&atoms, mu, &w) != discard(&atoms, &unfolded, v) {
                    f.fail(format!("discard does not commute with fold at {}", p.value(v)));
                }
                image.insert(w);
            }
            for w in &outer {
                if fold_iso(mu, &unfold_iso(mu, w)) != *w {
                    f.fail(format!("fold(unfold({})) differs", p.value(w)));
                }
            }
            if image != outer {
                f.fail(format!("fold is not a bijection onto {} at size {k}", p.ty(mu)));
            }
            f.count("mu-types", 1);
            f.count("values", inner.len() as u64);
            f
        })
        .collect();
    report.instances = findings.iter().map(|f| f.counts.iter().find(|c| c.0 == "values").unwrap().1).sum();
    merge(report, findings);
}

/// `S ⊆ D` is a discard candidate when membership agrees with the body's
/// discarding map, the bound variable read as membership in `S`.
fn unique_discard(atoms: &AtomTable, mu: &Type, domain: &[Value]) -> Result<(), String> {
    let Type::Mu(x, body) = mu else { unreachable!() };
    let body_discard = Discarder::synthesize(atoms, std::slice::from_ref(x), body).map_err(|e| format!("{e:?}"))?;
    let mut solutions = Vec::new();
    for mask in 0u32..(1 << domain.len()) {
        let members: Rc<HashSet<Value>> =
            Rc::new(domain.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, v)| v.clone()).collect());
        let m = members.clone();
        let env = DiscardEnv::empty().push(DiscardEntry::Given(Rc::new(move |v: &Value| m.contains(v))));
        let closed = domain.iter().all(|v| {
            let Value::Fold { inner, .. } = v else { return false };
            members.contains(v) == body_discard.apply(inner, &env).is_some()
        });
        if closed {
            solutions.push(mask);
        }
    }
    let synthesized: u32 =
        domain.iter().enumerate().filter(|(_, v)| discard(atoms, mu, v).is_some()).map(|(i, _)| 1 << i).sum();
    match solutions.as_slice() {
        [only] if *only == synthesized => Ok(()),
        [only] => Err(format!("unique solution {only:b} differs from synthesized {synthesized:b}")),
        many => Err(format!("{} solutions", many.len())),
    }
}

fn discard_uniqueness(opts: &VerifyOptions, report: &mut SuiteReport) {
    const MAX_DOMAIN: usize = 12;
    let partial = AtomTable::new().with("Q", AtomSpec { carrier: 2, discardable: Some([0].into_iter().collect()) });
    let mut cases: Vec<(AtomTable, Type)> = opts.mu_types().into_iter().map(|t| (AtomTable::default(), t)).collect();
    cases.push((partial.clone(), Type::list(Type::atomic("Q"))));
    cases.push((partial, Type::mu("X", Type::sum(Type::atomic("Q"), Type::tensor(Type::var("X"), Type::var("X"))))));
    let findings: Vec<Finding> = cases
        .par_iter()
        .map(|(atoms, mu)| {
            let mut f = Finding { counted: true, ..Default::default() };
            let mut domain = Vec::new();
            for k in 1..=opts.size_bound {
                let d = sem_elems_with(atoms, mu, k);
                if d.len() > MAX_DOMAIN {
                    break;
                }
                domain = d;
            }
            f.count("domain-values", domain.len() as u64);
            if let Err(e) = unique_discard(atoms, mu, &domain) {
                f.fail(format!("{}: {e}", Printer::sugared().ty(mu)));
            }
            f
        })
        .collect();
    merge(report, findings);
}

fn substitution(opts: &VerifyOptions, report: &mut SuiteReport) {
    let atoms = AtomTable::default();
    let findings: Vec<Finding> = (0..opts.triples)
        .into_par_iter()
        .map(|i| {
            let mut f = Finding { counted: true, ..Default::default() };
            let mut g = opts.generator(Suite::Substitution, i);
            let a = loop {
                let depth = g.rng().gen_range(2..=3);
                let a = g.open_type(depth, &mut vec!["X".to_string()]);
                if a.free_vars().contains("X") {
                    break a;
                }
            };
            let b = g.closed_type(2);
            let p = Printer::sugared();
            let closed = a.substitute("X", &b);
            let direct: HashSet<Value> = sem_elems(&closed, opts.size_bound).into_iter().collect();
            let env = TypeEnv::new().bind("X", Binding::Closed(b.clone()));
            let semantic: Vec<Value> = env_elems(&atoms, &a, &env, opts.size_bound);
            let semantic_set: HashSet<Value> = semantic.iter().cloned().collect();
            f.count("values", direct.len() as u64);
            if semantic.len() != semantic_set.len() {
                f.fail(format!("environment enumeration repeats values for {}", p.ty(&a)));
            }
            if direct != semantic_set {
                f.fail(format!(
                    "A = {}, B = {}: {} vs {} values",
                    p.ty(&a),
                    p.ty(&b),
                    direct.len(),
                    semantic_set.len()
                ));
            }
            let open = Discarder::synthesize(&atoms, &["X".to_string()], &a).expect("X-open type");
            let b_discard = Discarder::for_closed(&atoms, &b);
            let env = DiscardEnv::empty().push(DiscardEntry::Given(Rc::new(move |v: &Value| {
                b_discard.apply(v, &DiscardEnv::empty()).is_some()
            })));
            for v in &direct {
                if open.apply(v, &env) != discard(&atoms, &closed, v) {
                    f.fail(format!("discard maps differ at {}", p.value(v)));
                    break;
                }
            }
            f
        })
        .collect();
    merge(report, findings);
}

fn enumeration(opts: &VerifyOptions, report: &mut SuiteReport) {
    let atoms = AtomTable::default();
    let fixed = [(Type::bit(), 2, 2), (Type::nat(), 7, 3), (Type::list(Type::bit()), 8, 3)];
    for (ty, k, expected) in &fixed {
        report.instances += 1;
        let n = sem_elems(ty, *k).len();
        if n != *expected {
            report.fail(format!("{} at size {k}: {n} values, expected {expected}", Printer::sugared().ty(ty)));
        }
    }
    let findings: Vec<Finding> = opts
        .types
        .par_iter()
        .map(|ty| {
            let mut f = Finding { counted: true, ..Default::default() };
            let fast = sem_elems(ty, opts.size_bound);
            let slow = brute_values(&atoms, ty, opts.size_bound);
            let fast_set: HashSet<Value> = fast.iter().cloned().collect();
            f.count("values", fast.len() as u64);
            if fast.len() != fast_set.len() {
                f.fail(format!("{}: duplicates in enumeration", Printer::sugared().ty(ty)));
            }
            if fast_set != slow {
                f.fail(format!(
                    "{}: enumerated {} values, reference {}",
                    Printer::sugared().ty(ty),
                    fast_set.len(),
                    slow.len()
                ));
            }
            f
        })
        .collect();
    merge(report, findings);
}

fn roundtrip(opts: &VerifyOptions, report: &mut SuiteReport) {
    let abbreviations = vec![
        Abbreviation { name: "Nat".into(), params: vec![], body: Type::nat() },
        Abbreviation { name: "Bits".into(), params: vec![], body: Type::list(Type::bit()) },
        Abbreviation {
            name: "List".into(),
            params: vec!["A".into()],
            body: Type::mu("Y", Type::sum(Type::Unit, Type::tensor(Type::var("A"), Type::var("Y")))),
        },
    ];
    let findings: Vec<Finding> = (0..opts.roundtrips)
        .into_par_iter()
        .map(|i| {
            let mut f = Finding { counted: true, ..Default::default() };
            let c = opts.generator(Suite::Roundtrip, i).configuration();
            let (gamma, _) = check_configuration(&c.term, &c.store).expect("generated configuration");
            let program = SourceProgram {
                abbreviations: abbreviations.clone(),
                inputs: source_inputs(&gamma, &c.store),
                term: c.term.clone(),
            };
            let printed = print_program(&program);
            match parse_program(&printed) {
                Ok(back) if back == program => {}
                Ok(_) => f.fail(format!("reparse differs:\n{printed}")),
                Err(e) => f.fail(format!("{e}\n{printed}")),
            }
            f.count("bytes", printed.len() as u64);
            f
        })
        .collect();
    merge(report, findings);
}

fn source_inputs(gamma: &VarContext, store: &ValueAssignment) -> Vec<InputDecl> {
    gamma
        .iter()
        .map(|(n, t)| InputDecl { name: n.clone(), ty: t.clone(), value: store.get(n).cloned(), pos: Pos::default() })
        .collect()
}
