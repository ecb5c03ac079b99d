//! Acceptance criteria, one line per criterion. Exits non-zero if any fails.

use std::collections::HashSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use afflang_core::denote::sem_elems;
use afflang_core::oracle::{
    brute_values, corpus_types, run_suite, verify, Suite, SuiteReport, VerifyOptions, VerifyReport,
};
use afflang_core::{AtomTable, Type, Value};

const SEED: u64 = 7;

struct Verdict {
    name: &'static str,
    ok: bool,
    detail: String,
}

fn timed(suite: Suite, opts: &VerifyOptions) -> (SuiteReport, Duration) {
    let start = Instant::now();
    let r = run_suite(suite, opts);
    (r, start.elapsed())
}

fn cov(r: &SuiteReport, key: &str) -> u64 {
    r.coverage.get(key).copied().unwrap_or(0)
}

fn summary(r: &SuiteReport, took: Duration) -> String {
    let mut s = format!("instances={} failures={} time={:.1}s", r.instances, r.failures, took.as_secs_f64());
    if let Some(c) = r.counterexamples.first() {
        s.push_str(&format!("\n    first counterexample: {}", c.replace('\n', "\n    ")));
    }
    s
}

fn main() -> ExitCode {
    let opts = VerifyOptions { seed: SEED, ..VerifyOptions::default() };
    let mut reports = Vec::new();
    let mut verdicts = Vec::new();

    let (sr, t) = timed(Suite::SubjectReduction, &opts);
    verdicts.push(Verdict {
        name: "subject reduction",
        ok: sr.passed() && sr.instances >= 1000 && t < Duration::from_secs(60),
        detail: format!("{} steps={}", summary(&sr, t), cov(&sr, "steps")),
    });
    reports.push(sr);

    let (pr, t) = timed(Suite::Progress, &opts);
    verdicts.push(Verdict {
        name: "progress",
        ok: pr.passed() && pr.instances >= 1000,
        detail: format!("{} steps={}", summary(&pr, t), cov(&pr, "steps")),
    });
    reports.push(pr);

    let (so, t) = timed(Suite::Soundness, &opts);
    verdicts.push(Verdict {
        name: "soundness",
        ok: so.passed() && so.instances >= 300 && t < Duration::from_secs(120),
        detail: format!("{} configurations={}", summary(&so, t), cov(&so, "configurations")),
    });
    reports.push(so);

    let (ad, t) = timed(Suite::Adequacy, &opts);
    verdicts.push(Verdict {
        name: "adequacy",
        ok: ad.passed() && ad.instances >= 300 && cov(&ad, "known-divergent") >= 30 && cov(&ad, "bottom") >= 30,
        detail: format!(
            "{} terminating={} bottom={} known-divergent={}",
            summary(&ad, t),
            cov(&ad, "terminating"),
            cov(&ad, "bottom"),
            cov(&ad, "known-divergent")
        ),
    });
    reports.push(ad);

    let (di, t) = timed(Suite::Discardability, &opts);
    let corpus = corpus_types().len() as u64;
    verdicts.push(Verdict {
        name: "discardability",
        ok: di.passed() && opts.size_bound >= 12 && cov(&di, "types") == corpus && cov(&di, "values") > 0,
        detail: format!("{} types={}/{corpus} values={}", summary(&di, t), cov(&di, "types"), cov(&di, "values")),
    });
    reports.push(di);

    let (fu, t) = timed(Suite::FoldUnfold, &opts);
    verdicts.push(Verdict {
        name: "fold/unfold",
        ok: fu.passed() && cov(&fu, "mu-types") > 0,
        detail: format!("{} mu-types={}", summary(&fu, t), cov(&fu, "mu-types")),
    });
    reports.push(fu);

    let (su, t) = timed(Suite::Substitution, &opts);
    verdicts.push(Verdict { name: "substitution", ok: su.passed() && su.instances >= 50, detail: summary(&su, t) });
    reports.push(su);

    let (en, t) = timed(Suite::Enumeration, &opts);
    let atoms = AtomTable::default();
    let check = |ty: &Type, bound: usize, expected: usize| {
        let fast = sem_elems(ty, bound);
        let slow = brute_values(&atoms, ty, bound);
        let fast_set: HashSet<Value> = fast.iter().cloned().collect();
        (fast.len() == expected && slow.len() == expected && fast_set == slow, fast.len(), slow.len())
    };
    let (bit_ok, bit_fast, bit_slow) = check(&Type::bit(), 2, 2);
    let (nat_ok, nat_fast, nat_slow) = check(&Type::nat(), 7, 3);
    verdicts.push(Verdict {
        name: "semElems vs brute force",
        ok: en.passed() && bit_ok && nat_ok,
        detail: format!("{} bit@2={bit_fast}/{bit_slow} Nat@7={nat_fast}/{nat_slow}", summary(&en, t)),
    });
    reports.push(en);

    let (rt, t) = timed(Suite::Roundtrip, &opts);
    verdicts.push(Verdict { name: "roundtrip", ok: rt.passed() && rt.instances >= 1000, detail: summary(&rt, t) });
    reports.push(rt);

    for s in [Suite::Generator, Suite::DiscardUniqueness] {
        reports.push(run_suite(s, &opts));
    }
    let order = |r: &SuiteReport| Suite::ALL.iter().position(|s| s.name() == r.property).unwrap();
    reports.sort_by_key(order);
    let first = VerifyReport { suites: reports };
    let second = verify(&Suite::ALL, &opts);
    let same = first.to_text() == second.to_text() && first.to_records() == second.to_records();
    verdicts.push(Verdict {
        name: "determinism",
        ok: same,
        detail: format!("{} text bytes, {} record bytes", second.to_text().len(), second.to_records().len()),
    });

    let mut failed = 0;
    for (i, v) in verdicts.iter().enumerate() {
        if !v.ok {
            failed += 1;
        }
        println!("{} {:>2} {:<24} {}", if v.ok { "PASS" } else { "FAIL" }, i + 1, v.name, v.detail);
    }
    println!("{}/{} criteria passed", verdicts.len() - failed, verdicts.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
