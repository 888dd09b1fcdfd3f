//! Property checkers shared by the proptest suites and the acceptance
//! harness. Each returns `Err` with a readable counterexample.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use pointlike::monoid::{alphabetize, ramsey_bound, FiniteMonoid, MonoidMorphism, RamseySource};
use pointlike::rankers::{ComparisonSet, Flavor, RankerAutomaton};
use pointlike::solver::{joint_morphism, Solver};
use pointlike::varieties::{check_identity, is_in, IdentityRel, Level, OmegaTerm};
use pointlike::words::{alph, is_n_long, is_subword, mu_minor, rl_factorize_word, show, transfer_factorization, Alphabet};

use super::{ab, dfa, levels, CORPUS};

pub const FLAVORS: [Flavor; 7] =
    [Flavor::XX, Flavor::YY, Flavor::XY, Flavor::YX, Flavor::XXuYY, Flavor::XYuYX, Flavor::RR1];

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn random_word(rng: &mut StdRng, letters: &[u8], max_len: usize) -> Vec<u8> {
    let len = rng.gen_range(0..=max_len);
    (0..len).map(|_| letters[rng.gen_range(0..letters.len())]).collect()
}

/// The largest of `(2,2)`, `(1,2)`, `(1,1)` whose class automaton builds
/// within a few thousand classes.
pub fn stability_automaton(f: Flavor) -> RankerAutomaton {
    for (m, n) in [(2, 2), (1, 2), (1, 1)] {
        let set = ComparisonSet::flavored(f, m, n, &ab()).unwrap();
        if let Ok(a) = RankerAutomaton::build(set.into(), 4096) {
            return a;
        }
    }
    unreachable!("{f}_{{1,1}} always builds")
}

/// A word `v` with `u ≤ v`, picked among the class representatives by
/// `pick`, padded with `pad` when that keeps the class.
pub fn premise_partner(a: &RankerAutomaton, u: &[u8], pick: usize, pad: Option<u8>) -> Vec<u8> {
    let cu = a.class_of(u);
    let cands: Vec<usize> =
        (0..a.class_count()).filter(|&c| a.set.leq_signatures(&a.sigs[cu], &a.sigs[c])).collect();
    let mut v = a.reps[cands[pick % cands.len()]].clone();
    if let Some(c) = pad {
        let mut v2 = v.clone();
        v2.push(c);
        if a.class_of(&v2) == a.class_of(&v) {
            v = v2;
        }
    }
    v
}

/// The premise `u ≤ v` is re-checked on the words, then `xuy ≤ xvy`.
pub fn stable_quadruple(set: &ComparisonSet, u: &[u8], v: &[u8], x: &[u8], y: &[u8]) -> Result<(), String> {
    if !set.leq_words(u, v) {
        return Err(format!("automaton claims {} ≤ {} but the words disagree", show(u), show(v)));
    }
    let xuy = [x, u, y].concat();
    let xvy = [x, v, y].concat();
    if !set.leq_words(&xuy, &xvy) {
        return Err(format!("{}: {} ≤ {} but not with context ({}, {})", set.label, show(u), show(v), show(x), show(y)));
    }
    Ok(())
}

/// `count` premise-true quadruples from a seeded generator.
pub fn stability(a: &RankerAutomaton, seed: u64, count: usize) -> Result<usize, String> {
    let mut r = rng(seed);
    for _ in 0..count {
        let u = random_word(&mut r, b"ab", 8);
        let pad = r.gen_bool(0.5).then(|| b"ab"[r.gen_range(0..2)]);
        let v = premise_partner(a, &u, r.gen(), pad);
        let x = random_word(&mut r, b"ab", 5);
        let y = random_word(&mut r, b"ab", 5);
        stable_quadruple(&a.set, &u, &v, &x, &y)?;
    }
    Ok(count)
}

/// Every family emitted for the corpus at levels up to `m`, over `M'` and
/// projected onto `M`, is closed.
pub fn closure_all(m: usize) -> Result<usize, String> {
    let mut checked = 0;
    for r in CORPUS {
        let mu = joint_morphism(&[&dfa(r)]).unwrap();
        let mut s = Solver::new(&mu).unwrap();
        let mp = s.alphabetized().monoid.clone();
        let base = s.monoid().clone();
        for l in levels(m) {
            if l.is_positive() {
                let cones = s.conelikes(l).unwrap();
                if !cones.is_closed(&base) {
                    return Err(format!("conelikes {l} of {r} not closed"));
                }
            } else {
                if !s.saturation(l).unwrap().is_closed(&mp) {
                    return Err(format!("saturation {l} of {r} not closed over M'"));
                }
                if !s.pointlikes(l).unwrap().is_closed(&base) {
                    return Err(format!("pointlikes {l} of {r} not closed"));
                }
            }
            checked += 1;
        }
    }
    Ok(checked)
}

/// Level inclusions `V ⊆ W` that hold for every index.
pub fn inclusions(m: usize) -> Vec<(Level, Level)> {
    let mut out = vec![(Level::J1, Level::J), (Level::J, Level::FO2(1)), (Level::FO2(1), Level::J)];
    for k in 1..=m {
        for f in [Level::R, Level::L, Level::RcapL, Level::RvL, Level::FO2, Level::Si, Level::Pi] {
            if k < m {
                out.push((f(k), f(k + 1)));
            }
        }
        out.push((Level::RcapL(k), Level::R(k)));
        out.push((Level::RcapL(k), Level::L(k)));
        out.push((Level::FO2(k), Level::RcapL(k + 1)));
        out.push((Level::RcapL(k + 1), Level::FO2(k)));
        out.push((Level::RvL(k), Level::Si(k)));
        out.push((Level::RvL(k), Level::Pi(k)));
        out.push((Level::Si(k), Level::FO2(k)));
        out.push((Level::Pi(k), Level::FO2(k)));
        out.push((Level::FO2(k), Level::DA));
        if k < m {
            out.push((Level::Si(k), Level::Pi(k + 1)));
            out.push((Level::Pi(k), Level::Si(k + 1)));
        }
    }
    out
}

/// `isIn` respects the inclusions on every corpus monoid.
pub fn membership_monotone(m: usize) -> Result<usize, String> {
    let mut checked = 0;
    for r in CORPUS {
        let d = dfa(r);
        let sm = pointlike::syntactic::syntactic_ordered_monoid(&d).unwrap();
        for (v, w) in inclusions(m) {
            if is_in(v, sm.monoid()).unwrap() && !is_in(w, sm.monoid()).unwrap() {
                return Err(format!("{r} in {v} but not in {w}"));
            }
            checked += 1;
        }
    }
    Ok(checked)
}

/// For `V ⊆ W`, the `W` family is dominated by the `V` family.
pub fn saturation_monotone(m: usize) -> Result<usize, String> {
    let mut checked = 0;
    for r in CORPUS {
        let mu = joint_morphism(&[&dfa(r)]).unwrap();
        let mut s = Solver::new(&mu).unwrap();
        for (v, w) in inclusions(m) {
            if v == Level::DA || w == Level::DA {
                continue;
            }
            let ok = if !v.is_positive() && !w.is_positive() {
                s.pointlikes(w).unwrap().dominated_by(&s.pointlikes(v).unwrap())
            } else {
                s.conelikes(w).unwrap().dominated_by(&s.conelikes(v).unwrap())
            };
            if !ok {
                return Err(format!("{r}: {w} family not dominated by {v} family"));
            }
            checked += 1;
        }
    }
    Ok(checked)
}

/// Subword, same image, no single letter removable, and the length bound.
pub fn mu_minor_ok(u: &[u8], mu: &MonoidMorphism) -> Result<(), String> {
    let v = mu_minor(u, mu);
    if !is_subword(&v, u) {
        return Err(format!("{} is not a subword of {}", show(&v), show(u)));
    }
    if mu.eval(&v) != mu.eval(u) {
        return Err(format!("minor {} of {} changes the image", show(&v), show(u)));
    }
    for i in 0..v.len() {
        let mut w = v.clone();
        w.remove(i);
        if mu.eval(&w) == mu.eval(u) {
            return Err(format!("minor {} of {} still has a removable letter", show(&v), show(u)));
        }
    }
    let bound = ramsey_bound(mu.target().size() as u64, RamseySource::FactorialBound).unwrap();
    if v.len() as u64 + 2 > bound {
        return Err(format!("minor {} longer than R - 2 = {}", show(&v), bound - 2));
    }
    Ok(())
}

pub fn mu_minors(seed: u64, count: usize) -> Result<usize, String> {
    let mut r = rng(seed);
    let mus: Vec<MonoidMorphism> = CORPUS.iter().map(|x| joint_morphism(&[&dfa(x)]).unwrap()).collect();
    for _ in 0..count {
        let mu = &mus[r.gen_range(0..mus.len())];
        let u = random_word(&mut r, b"ab", 24);
        mu_minor_ok(&u, mu)?;
    }
    Ok(count)
}

/// Every word of length at most `n` over `alph(w)` is a subword of `w`.
pub fn n_long_brute(w: &[u8], n: usize) -> bool {
    let b = Alphabet::from_set(alph(w));
    match b {
        Ok(b) => b.words_up_to(n).iter().all(|x| is_subword(x, w)),
        Err(_) => true,
    }
}

pub fn n_long_ok(w: &[u8], n: usize) -> Result<(), String> {
    let (fast, slow) = (is_n_long(w, n), n_long_brute(w, n));
    if fast != slow {
        return Err(format!("{}-longness of {}: arch count {fast}, brute {slow}", n, show(w)));
    }
    Ok(())
}

/// Exhaustive over `{a,b}^{≤10}` and sampled over `{a,b,c}`.
pub fn n_long_all(seed: u64) -> Result<usize, String> {
    let mut checked = 0;
    for w in ab().words_up_to(10) {
        for n in 0..=4 {
            n_long_ok(&w, n)?;
            checked += 1;
        }
    }
    let mut r = rng(seed);
    for _ in 0..5000 {
        let w = random_word(&mut r, b"abc", 10);
        for n in 0..=4 {
            n_long_ok(&w, n)?;
            checked += 1;
        }
    }
    Ok(checked)
}

/// Properties (i)-(iv) plus transfer onto the word itself.
pub fn factorization_ok(u: &[u8], n: usize) -> Result<(), String> {
    let f = rl_factorize_word(u, n).map_err(|e| format!("{} (n = {n}): {e}", show(u)))?;
    f.check().map_err(|e| format!("{} (n = {n}): {e}", show(u)))?;
    if transfer_factorization(&f, u).as_ref() != Some(&f) {
        return Err(format!("{} (n = {n}): transfer onto itself differs", show(u)));
    }
    Ok(())
}

/// Alternately over `{a,b}` and `{a,b,c}`, up to length 40, `n ≤ 3`.
fn factorization_inputs(seed: u64, count: usize) -> Vec<(Vec<u8>, usize)> {
    let mut r = rng(seed);
    (0..count)
        .map(|i| {
            let letters: &[u8] = if i % 2 == 0 { b"ab" } else { b"abc" };
            let u = random_word(&mut r, letters, 40);
            (u, r.gen_range(1..=3))
        })
        .collect()
}

pub fn factorizations(seed: u64, count: usize) -> Result<usize, String> {
    for (u, n) in factorization_inputs(seed, count) {
        factorization_ok(&u, n)?;
    }
    Ok(count)
}

/// Words whose factorization breaks `alph(v_i) ⊊ alph(u_i b_i) ∩ alph(a_i u_{i+1})`.
pub fn literal_ii_count(seed: u64, count: usize) -> usize {
    factorization_inputs(seed, count)
        .into_iter()
        .filter(|(u, n)| rl_factorize_word(u, *n).is_ok_and(|f| !f.literal_ii_failures().is_empty()))
        .count()
}

/// The content property on `M'` for every corpus language in DA.
pub fn da_property() -> Result<(usize, usize), String> {
    let mut da = 0;
    let mut checked = 0;
    for r in CORPUS {
        let d = dfa(r);
        let sm = pointlike::syntactic::syntactic_ordered_monoid(&d).unwrap();
        let inside = is_in(Level::DA, sm.monoid()).unwrap();
        if inside != da_identity(sm.monoid()) {
            return Err(format!("{r}: DA decision disagrees with the identity"));
        }
        checked += 1;
        if inside {
            da += 1;
            let mu = joint_morphism(&[&d]).unwrap();
            let cs = alphabetize(&mu.onto_image().unwrap()).unwrap();
            if !pointlike::varieties::da_content_property(&cs.monoid, &cs.content) {
                return Err(format!("{r}: DA monoid violates the content property on M'"));
            }
        }
    }
    Ok((da, checked))
}

/// `(xzy)^ω = (xzy)^ω z (xzy)^ω` by exhaustive evaluation.
pub fn da_identity(m: &FiniteMonoid) -> bool {
    let lhs = OmegaTerm::parse("(xzy)^w").unwrap();
    let rhs = OmegaTerm::parse("(xzy)^w z (xzy)^w").unwrap();
    check_identity(&m.clone().without_order(), &lhs, &rhs, IdentityRel::Eq).unwrap()
}
