//! Acceptance harness: one line per criterion, then indented detail.
//! Exits nonzero when a criterion fails for a reason not listed in
//! `DOCUMENTED`.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use common::props;
use common::*;
use pointlike::monoid::Green;
use pointlike::rankers::{ComparisonSet, Flavor, RankerAutomaton, DEFAULT_CLASS_CAP};
use pointlike::solver::*;
use pointlike::varieties::{is_in, Level};

/// Known failures with their reason. A criterion whose only failing
/// checks carry one of these tags is reported as a documented FAIL.
const DOCUMENTED: &[(&str, &str)] = &[
    (
        "rl1",
        "the full-content fiber of M' is idempotent, so it is an RL_1-factor by definition; \
         the four listed factors appear from m = 2 on",
    ),
    (
        "literal-ii",
        "the R/L-marker construction does not give alph(v_i) strictly inside the intersection; \
         the proof's reading (strict in each side) holds",
    ),
];

struct Report {
    /// `(ok, documented tag, line)`; notes carry `ok = true` and no mark.
    checks: Vec<(bool, Option<&'static str>, String)>,
}

impl Report {
    fn new() -> Self {
        Report { checks: Vec::new() }
    }

    fn check(&mut self, ok: bool, line: impl Into<String>) {
        self.checks.push((ok, None, line.into()));
    }

    fn known(&mut self, ok: bool, tag: &'static str, line: impl Into<String>) {
        self.checks.push((ok, Some(tag), line.into()));
    }

    fn note(&mut self, line: impl Into<String>) {
        self.checks.push((true, Some("note"), line.into()));
    }

    fn limit(&mut self, t: Duration, max: Duration) {
        self.check(t < max, format!("runtime {:.2?} (limit {:.0?})", t, max));
    }
}

fn names(m: &pointlike::monoid::FiniteMonoid, s: &pointlike::set::ElemSet) -> BTreeSet<String> {
    s.iter().map(|x| m.name(x).to_string()).collect()
}

fn family(sets: &[&[&str]]) -> BTreeSet<BTreeSet<String>> {
    sets.iter().map(|s| s.iter().map(|x| x.to_string()).collect()).collect()
}

fn show_family(f: &BTreeSet<BTreeSet<String>>) -> String {
    let parts: Vec<String> =
        f.iter().map(|s| format!("{{{}}}", s.iter().cloned().collect::<Vec<_>>().join(","))).collect();
    parts.join(" ")
}

fn criterion1() -> Report {
    let mut r = Report::new();
    let t = Instant::now();
    let mu = joint_morphism(&[&dfa("(ab)+")]).unwrap();
    let mut solver = Solver::new(&mu).unwrap();
    let m = solver.monoid().clone();
    let mp = solver.alphabetized().monoid.clone();
    r.check(m.size() == 6 && mp.size() == 10, format!("|M| = {}, |M'| = {}", m.size(), mp.size()));
    let want = family(&[&["aba", "aab"], &["ab", "aab"], &["ba", "aab"], &["bab", "aab"]]);
    for k in 1..=3 {
        let fs = solver.saturator().rl_factors(k);
        let prods: Vec<_> = fs.iter().map(|f| f.product.clone()).collect();
        let got: BTreeSet<_> = pointlike::saturation::maximal(prods)
            .iter()
            .filter(|s| s.len() > 1)
            .map(|s| names(&mp, s))
            .collect();
        let line = format!("maximal non-singleton RL_{k}-factors: {}", show_family(&got));
        if k == 1 {
            r.known(got == want, "rl1", line);
        } else {
            r.check(got == want, line);
        }
    }
    let p = solver.pointlikes(Level::RvL(2)).unwrap();
    let got: BTreeSet<_> = p.nontrivial().iter().map(|s| names(&m, s)).collect();
    let want = family(&[&["a", "aa"], &["ab", "aa"], &["b", "aa"], &["ba", "aa"]]);
    let singles = (0..m.size()).all(|s| p.denotes(&pointlike::set::ElemSet::singleton(m.size(), s)));
    r.check(got == want && singles, format!("RvL2 pointlikes: singletons and {}", show_family(&got)));
    r.limit(t.elapsed(), Duration::from_secs(5));
    r
}

fn criterion2() -> Report {
    let mut r = Report::new();
    let t = Instant::now();
    let l = dfa("(ab)+");
    let others = [dfa("b(ab)*"), dfa("(ab)*a")];
    let res = decide_cover(Level::Si(1), &l, &others).unwrap();
    r.check(!res.coverable, if res.coverable { "COVERABLE" } else { "NOT-COVERABLE" });
    match &res.certificate {
        Some(c) => {
            let m = res.morphism.target();
            let ok = replay_certificate(c, &res.morphism, &l, &others);
            r.check(ok, format!("certificate cone {} : {} replays: {ok}", m.name(c.s), m.show_set(&c.set)));
        }
        None => r.check(false, "no certificate"),
    }
    r.limit(t.elapsed(), Duration::from_secs(5));
    r
}

fn criterion3() -> Report {
    let mut r = Report::new();
    let t = Instant::now();
    for n in 1..=3 {
        let s = build_separator(SeparatorKind::Flavored(Flavor::XX, 1), n, &ab()).unwrap();
        let (r2, j1) = (is_in(Level::R(2), s.monoid()).unwrap(), is_in(Level::J1, s.monoid()).unwrap());
        r.check(r2 && (n < 2 || !j1), format!("{} ({} elements): R2 {r2}, J1 {j1}", s.label, s.monoid().size()));
    }
    for n in 1..=3 {
        let set = ComparisonSet::flavored(Flavor::XY, 1, n, &ab()).unwrap();
        let a = RankerAutomaton::build(set.into(), DEFAULT_CLASS_CAP).unwrap();
        let (si1, jt) = (a.identity_is_minimum(), a.is_j_trivial());
        let mut line = format!("N^XY_{{1,{n}}} ({} classes): Si1 {si1}, J-trivial {jt}", a.class_count());
        let mut agree = true;
        if let Ok(rm) = a.to_monoid(4096) {
            let tsi = is_in(Level::Si(1), rm.monoid()).unwrap();
            let tj = Green::new(rm.monoid()).is_j_trivial();
            agree = tsi == si1 && tj == jt;
            line.push_str(&format!("; table check agrees: {agree}"));
        } else {
            line.push_str("; table-free check");
        }
        r.check(si1 && jt && agree, line);
    }
    r.limit(t.elapsed(), Duration::from_secs(30));
    r
}

fn criterion4() -> Report {
    let mut r = Report::new();
    let t = Instant::now();
    let sizes: Vec<usize> = CORPUS.iter().map(|x| joint_morphism(&[&dfa(x)]).unwrap().target().size()).collect();
    r.check(
        CORPUS.len() >= 20 && sizes.iter().all(|&s| s <= 12),
        format!("corpus: {} languages, monoid sizes {}..={}", CORPUS.len(), sizes.iter().min().unwrap(), sizes.iter().max().unwrap()),
    );
    let pool = separator_pool();
    r.note(
        format!(
            "separator pool ({} monoids, ≤ {POOL_SIZE_CAP} elements): {}",
            pool.len(),
            pool.iter().map(|s| format!("{}:{}", s.label, s.monoid().size())).collect::<Vec<_>>().join(" ")
        ),
    );
    let lv = levels(2);
    let ver: Vec<_> = lv.iter().map(|l| verified(*l)).collect();
    let (mut checks, mut bad) = (0, Vec::new());
    for x in CORPUS {
        let mu = joint_morphism(&[&dfa(x)]).unwrap();
        let mut solver = Solver::new(&mu).unwrap();
        let mu = solver.morphism().clone();
        for (l, seps) in lv.iter().zip(&ver) {
            for s in seps {
                let g = s.graph(&mu).unwrap();
                let ok = if l.is_positive() {
                    solver.conelikes(*l).unwrap().dominated_by(&brute_conelikes(&g, &s.order()))
                } else {
                    solver.pointlikes(*l).unwrap().dominated_by(&brute_pointlikes(&g))
                };
                checks += 1;
                if !ok {
                    bad.push(format!("{x} {l} {}", s.label));
                }
            }
        }
    }
    r.check(bad.is_empty(), format!("soundness: {checks} (language, level, separator) checks, {} violations {:?}", bad.len(), bad.iter().take(5).collect::<Vec<_>>()));

    // completeness at the theorem's n is out of reach; say how far
    let m6 = 6;
    let mut infeasible = Vec::new();
    for l in &lv {
        match separator(*l, &ab(), m6, None) {
            Ok(s) => infeasible.push(format!("{l}: {} builds", s.label)),
            Err(e) => {
                let n = theorem_n(*l, 2, m6).ok().flatten().map_or("overflow".to_string(), |n| n.to_string());
                infeasible.push(format!("{l}: n = {n}, {e}"));
            }
        }
    }
    r.note("infeasibility report for |M| = 6, |A| = 2 at the theorem's depth:");
    for line in infeasible {
        r.note(format!("  {line}"));
    }

    let mut shrink_checks = 0;
    let mut shrink_bad = Vec::new();
    for f in props::FLAVORS {
        for m in 1..=2 {
            let seps: Vec<_> = (1..=3)
                .map_while(|n| build_separator(SeparatorKind::Flavored(f, m), n, &ab()).ok())
                .filter(|s| s.monoid().size() <= 2000)
                .collect();
            for x in CORPUS {
                let mu = Solver::new(&joint_morphism(&[&dfa(x)]).unwrap()).unwrap().morphism().clone();
                let fams: Vec<_> = seps.iter().map(|s| brute_pointlikes(&s.graph(&mu).unwrap())).collect();
                for w in fams.windows(2) {
                    shrink_checks += 1;
                    if !w[1].dominated_by(&w[0]) {
                        shrink_bad.push(format!("{x} {f}_{m}"));
                    }
                }
            }
        }
    }
    r.check(shrink_bad.is_empty(), format!("brute pointlikes shrink in n: {shrink_checks} steps, {} failures", shrink_bad.len()));

    let mu = Solver::new(&joint_morphism(&[&dfa("(ab)+")]).unwrap()).unwrap().morphism().clone();
    let mut solver = Solver::new(&mu).unwrap();
    let sat = solver.pointlikes(Level::RvL(2)).unwrap();
    let mut agree_at = None;
    for n in 1..=3 {
        let s = build_separator(SeparatorKind::Flavored(Flavor::XXuYY, 1), n, &ab()).unwrap();
        let brute = brute_pointlikes(&s.graph(&mu).unwrap());
        if brute.dominated_by(&sat) && sat.dominated_by(&brute) {
            agree_at = Some((n, s.label.clone()));
            break;
        }
    }
    r.check(
        agree_at.is_some(),
        match &agree_at {
            Some((n, label)) => format!("(ab)+ at RvL2: saturation equals brute pointlikes of {label} (n = {n})"),
            None => "(ab)+ at RvL2: no n ≤ 3 reaches the saturation".to_string(),
        },
    );
    r.limit(t.elapsed(), Duration::from_secs(300));
    r
}

fn criterion5() -> Report {
    let mut r = Report::new();
    let t = Instant::now();
    for f in props::FLAVORS {
        let a = props::stability_automaton(f);
        let res = props::stability(&a, 0xC0 + f as u64, 10_000);
        r.check(res.is_ok(), format!("≤^C stability {}: {:?}", a.set.label, res));
    }
    let res = props::closure_all(3);
    r.check(res.is_ok(), format!("closure of emitted families: {res:?}"));
    let res = props::membership_monotone(3);
    r.check(res.is_ok(), format!("isIn monotone along inclusions: {res:?}"));
    let res = props::saturation_monotone(3);
    r.check(res.is_ok(), format!("saturations antitone along inclusions: {res:?}"));
    let res = props::mu_minors(7, 1000);
    r.check(res.is_ok(), format!("μ-minor subword, image, minimality, |v| ≤ R - 2: {res:?}"));
    let res = props::n_long_all(11);
    r.check(res.is_ok(), format!("n-long vs brute force (|B| ≤ 3, |w| ≤ 10, n ≤ 4): {res:?}"));
    let res = props::factorizations(13, 1000);
    r.check(res.is_ok(), format!("factorization (i), (ii) strict per side, (iii), (iv): {res:?}"));
    let lit = props::literal_ii_count(13, 1000);
    r.known(lit == 0, "literal-ii", format!("factorization (ii) strict in the intersection: {lit}/1000 words fail"));
    let res = props::da_property();
    r.check(res.is_ok(), format!("DA content property on M' and DA decision vs identity: {res:?}"));
    r.limit(t.elapsed(), Duration::from_secs(600));
    r
}

fn criterion6() -> Report {
    let mut r = Report::new();
    let t = Instant::now();
    for positive in [false, true] {
        let (mut n, mut bad) = (0, Vec::new());
        for x in CORPUS {
            let d = dfa(x);
            let c = d.complement();
            for l in levels(4).into_iter().filter(|l| l.is_positive() == positive) {
                let sep = decide_separation(l, &d, &c).unwrap();
                let mem = membership(l, &d).unwrap();
                n += 1;
                if sep != mem {
                    bad.push(format!("{x} {l}"));
                }
            }
        }
        let kind = if positive { "positive levels (extra)" } else { "unordered levels" };
        r.check(bad.is_empty(), format!("{kind}: {n} pairs, {} disagreements {:?}", bad.len(), bad));
    }
    r.limit(t.elapsed(), Duration::from_secs(300));
    r
}

fn main() {
    let criteria: [(&str, fn() -> Report); 6] = [
        ("worked example", criterion1),
        ("covering decision", criterion2),
        ("ranker monoids in their varieties", criterion3),
        ("soundness against separators", criterion4),
        ("property suites", criterion5),
        ("separation vs membership", criterion6),
    ];
    let mut undocumented = 0;
    for (i, (title, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let rep = run();
        let failing: Vec<_> = rep.checks.iter().filter(|c| !c.0).collect();
        let documented = !failing.is_empty() && failing.iter().all(|c| c.1.is_some());
        let status = if failing.is_empty() {
            "PASS"
        } else if documented {
            "FAIL (documented)"
        } else {
            undocumented += 1;
            "FAIL"
        };
        println!("criterion {} {status}: {title} [{:.2?}]", i + 1, t.elapsed());
        for (ok, tag, line) in &rep.checks {
            let mark = match (ok, tag) {
                (true, Some("note")) => "   ",
                (true, _) => "ok ",
                (false, _) => "BAD",
            };
            println!("    {mark} {line}");
            if let (false, Some(tag)) = (ok, tag) {
                let why = DOCUMENTED.iter().find(|d| d.0 == *tag).map_or("", |d| d.1);
                println!("        known: {why}");
            }
        }
    }
    if undocumented > 0 {
        println!("{undocumented} criteria failed without a documented reason");
        std::process::exit(1);
    }
}
