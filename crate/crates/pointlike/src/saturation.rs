//! Closed families of subsets and cones, and the saturations built from
//! them. Families are kept as antichains of maximal members; subsets of
//! members and all singletons are implied.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use crate::monoid::{ContentStructure, FiniteMonoid};
use crate::par;
use crate::set::{Antichain, ElemSet};
use crate::words::LetterSet;

/// Worklist discipline for fixed points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Schedule {
    /// Rounds of products of new members against all members, evaluated
    /// with the data-parallel map.
    #[default]
    Rounds,
    /// One member at a time, newest first.
    Stack,
}

/// A closed family of subsets given by its maximal members.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsetFamily {
    size: usize,
    members: Vec<ElemSet>,
}

impl SubsetFamily {
    pub fn from_antichain(size: usize, a: Antichain) -> Self {
        SubsetFamily { size, members: a.into_sorted() }
    }

    /// Maximal members, sorted by element lists.
    pub fn members(&self) -> &[ElemSet] {
        &self.members
    }

    pub fn carrier_size(&self) -> usize {
        self.size
    }

    pub fn denotes(&self, s: &ElemSet) -> bool {
        s.len() <= 1 || self.members.iter().any(|m| s.is_subset(m))
    }

    /// Every member of `self` lies in a member of `other`.
    pub fn dominated_by(&self, other: &SubsetFamily) -> bool {
        self.members.iter().all(|s| other.denotes(s))
    }

    /// Products of members are denoted.
    pub fn is_closed(&self, m: &FiniteMonoid) -> bool {
        self.members.iter().all(|a| self.members.iter().all(|b| self.denotes(&m.mul_sets(a, b))))
    }

    /// Non-singleton members.
    pub fn nontrivial(&self) -> Vec<ElemSet> {
        self.members.iter().filter(|s| s.len() > 1).cloned().collect()
    }

    /// Image under the projection of an alphabetized carrier.
    pub fn project(&self, cs: &ContentStructure) -> SubsetFamily {
        let mut a = Antichain::new();
        for x in 0..cs.base.size() {
            a.insert(ElemSet::singleton(cs.base.size(), x));
        }
        for s in &self.members {
            a.insert(cs.project(s));
        }
        SubsetFamily::from_antichain(cs.base.size(), a)
    }

    pub fn show(&self, m: &FiniteMonoid) -> String {
        self.members.iter().map(|s| m.show_set(s) + "\n").collect()
    }
}

/// A closed family of pairs `(s, S)`, by maximal `S` per `s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeFamily {
    size: usize,
    entries: Vec<Vec<ElemSet>>,
}

impl ConeFamily {
    fn from_antichains(size: usize, entries: Vec<Antichain>) -> Self {
        ConeFamily { size, entries: entries.into_iter().map(Antichain::into_sorted).collect() }
    }

    pub fn carrier_size(&self) -> usize {
        self.size
    }

    pub fn entries(&self, s: usize) -> &[ElemSet] {
        &self.entries[s]
    }

    pub fn denotes(&self, s: usize, set: &ElemSet) -> bool {
        set.iter().all(|x| x == s) || self.entries[s].iter().any(|m| set.is_subset(m))
    }

    pub fn dominated_by(&self, other: &ConeFamily) -> bool {
        (0..self.size).all(|s| self.entries[s].iter().all(|t| other.denotes(s, t)))
    }

    pub fn is_closed(&self, m: &FiniteMonoid) -> bool {
        (0..self.size).all(|s| {
            self.entries[s].iter().all(|a| {
                (0..self.size).all(|t| self.entries[t].iter().all(|b| self.denotes(m.mul(s, t), &m.mul_sets(a, b))))
            })
        })
    }

    /// All `(s, S)` with `S` maximal, ordered by `s`.
    pub fn pairs(&self) -> Vec<(usize, ElemSet)> {
        (0..self.size).flat_map(|s| self.entries[s].iter().map(move |t| (s, t.clone()))).collect()
    }

    pub fn project(&self, cs: &ContentStructure) -> ConeFamily {
        let n = cs.base.size();
        let mut entries: Vec<Antichain> = (0..n).map(|x| singleton_antichain(n, x)).collect();
        for (s, set) in self.pairs() {
            entries[cs.projection[s]].insert(cs.project(&set));
        }
        ConeFamily::from_antichains(n, entries)
    }

    /// Reduces arbitrary pairs to a family; `(s, {s})` is always added.
    pub fn from_pairs(size: usize, pairs: Vec<(usize, ElemSet)>) -> ConeFamily {
        let mut entries: Vec<Antichain> = (0..size).map(|x| singleton_antichain(size, x)).collect();
        for (s, set) in pairs {
            if !set.is_empty() {
                entries[s].insert(set);
            }
        }
        ConeFamily::from_antichains(size, entries)
    }

    /// `(s, S)` for every denoted pointlike `S` and `s ∈ S`.
    pub fn from_pointlikes(f: &SubsetFamily) -> ConeFamily {
        let n = f.size;
        let mut entries: Vec<Antichain> = (0..n).map(|x| singleton_antichain(n, x)).collect();
        for set in &f.members {
            for s in set.iter() {
                entries[s].insert(set.clone());
            }
        }
        ConeFamily::from_antichains(n, entries)
    }

    pub fn show(&self, m: &FiniteMonoid) -> String {
        self.pairs().iter().map(|(s, set)| format!("{} : {}\n", m.name(*s), m.show_set(set))).collect()
    }
}

fn singleton_antichain(n: usize, x: usize) -> Antichain {
    let mut a = Antichain::new();
    a.insert(ElemSet::singleton(n, x));
    a
}

/// Least closed family containing `seeds`.
pub fn close_sets(m: &FiniteMonoid, seeds: &[ElemSet], schedule: Schedule) -> Antichain {
    let n = m.size();
    let mut fam = Antichain::new();
    for x in 0..n {
        fam.insert(ElemSet::singleton(n, x));
    }
    for s in seeds {
        if !s.is_empty() {
            fam.insert(s.clone());
        }
    }
    match schedule {
        Schedule::Rounds => {
            let mut fresh = fam.sorted();
            while !fresh.is_empty() {
                let all = fam.sorted();
                let prods: Vec<Vec<ElemSet>> = par::map(&fresh, |x| {
                    all.iter().flat_map(|y| [m.mul_sets(x, y), m.mul_sets(y, x)]).collect()
                });
                let mut next = Vec::new();
                for p in prods.into_iter().flatten() {
                    if fam.insert(p.clone()) {
                        next.push(p);
                    }
                }
                next.retain(|p| fam.contains_exact(p));
                fresh = next;
            }
        }
        Schedule::Stack => {
            let mut stack = fam.sorted();
            while let Some(x) = stack.pop() {
                if !fam.contains_exact(&x) {
                    continue;
                }
                let all = fam.sorted();
                for y in &all {
                    for p in [m.mul_sets(&x, y), m.mul_sets(y, &x)] {
                        if fam.insert(p.clone()) {
                            stack.push(p);
                        }
                    }
                }
            }
        }
    }
    fam
}

/// Least closed cone family containing `seeds`.
pub fn close_cones(m: &FiniteMonoid, seeds: &[(usize, ElemSet)], schedule: Schedule) -> Vec<Antichain> {
    let n = m.size();
    let mut fam: Vec<Antichain> = (0..n).map(|x| singleton_antichain(n, x)).collect();
    for (s, set) in seeds {
        fam[*s].insert(set.clone());
    }
    let snapshot = |fam: &Vec<Antichain>| -> Vec<(usize, ElemSet)> {
        (0..n).flat_map(|s| fam[s].sorted().into_iter().map(move |t| (s, t))).collect()
    };
    match schedule {
        Schedule::Rounds => {
            let mut fresh = snapshot(&fam);
            while !fresh.is_empty() {
                let all = snapshot(&fam);
                let prods: Vec<Vec<(usize, ElemSet)>> = par::map(&fresh, |(s, a)| {
                    all.iter()
                        .flat_map(|(t, b)| [(m.mul(*s, *t), m.mul_sets(a, b)), (m.mul(*t, *s), m.mul_sets(b, a))])
                        .collect()
                });
                let mut next = Vec::new();
                for (s, p) in prods.into_iter().flatten() {
                    if fam[s].insert(p.clone()) {
                        next.push((s, p));
                    }
                }
                next.retain(|(s, p)| fam[*s].contains_exact(p));
                fresh = next;
            }
        }
        Schedule::Stack => {
            let mut stack = snapshot(&fam);
            while let Some((s, a)) = stack.pop() {
                if !fam[s].contains_exact(&a) {
                    continue;
                }
                for (t, b) in snapshot(&fam) {
                    for (x, p) in [(m.mul(s, t), m.mul_sets(&a, &b)), (m.mul(t, s), m.mul_sets(&b, &a))] {
                        if fam[x].insert(p.clone()) {
                            stack.push((x, p));
                        }
                    }
                }
            }
        }
    }
    fam
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    R,
    L,
}

impl Side {
    fn other(self) -> Side {
        match self {
            Side::R => Side::L,
            Side::L => Side::R,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Polarity {
    Si,
    Pi,
}

/// A maximal `RL_m`-factor `SEWFT` with its components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RlFactor {
    pub s: ElemSet,
    pub e: ElemSet,
    pub w: ElemSet,
    pub f: ElemSet,
    pub t: ElemSet,
    pub product: ElemSet,
    pub alphabet: LetterSet,
}

/// Computes and caches the saturations of one alphabetized monoid.
pub struct Saturator {
    cs: Arc<ContentStructure>,
    schedule: Schedule,
    corner: HashMap<(Side, usize), Arc<Vec<ElemSet>>>,
    rl: HashMap<usize, Arc<Vec<RlFactor>>>,
    fo: HashMap<usize, Arc<Vec<ElemSet>>>,
    sp: HashMap<usize, Arc<Vec<ElemSet>>>,
    cones: HashMap<(Polarity, usize), Arc<ConeFamily>>,
    j: Option<Arc<Vec<ElemSet>>>,
}

impl Saturator {
    pub fn new(cs: Arc<ContentStructure>) -> Self {
        Self::with_schedule(cs, Schedule::default())
    }

    pub fn with_schedule(cs: Arc<ContentStructure>, schedule: Schedule) -> Self {
        Saturator {
            cs,
            schedule,
            corner: HashMap::new(),
            rl: HashMap::new(),
            fo: HashMap::new(),
            sp: HashMap::new(),
            cones: HashMap::new(),
            j: None,
        }
    }

    pub fn content_structure(&self) -> &Arc<ContentStructure> {
        &self.cs
    }

    fn m(&self) -> &FiniteMonoid {
        &self.cs.monoid
    }

    fn n(&self) -> usize {
        self.cs.size()
    }

    fn family(&self, members: &[ElemSet]) -> SubsetFamily {
        SubsetFamily { size: self.n(), members: members.to_vec() }
    }

    fn content(&self, s: &ElemSet) -> LetterSet {
        self.cs.set_content(s).expect("members have constant content")
    }

    /// α-fibers, keyed by content.
    fn fibers(&self) -> BTreeMap<LetterSet, ElemSet> {
        let mut out: BTreeMap<LetterSet, ElemSet> = BTreeMap::new();
        for x in 0..self.n() {
            out.entry(self.cs.content[x]).or_insert_with(|| ElemSet::empty(self.n())).insert(x);
        }
        out
    }

    fn close(&self, seeds: &[ElemSet]) -> Vec<ElemSet> {
        close_sets(self.m(), seeds, self.schedule).into_sorted()
    }

    pub fn sat_j1(&self) -> SubsetFamily {
        self.family(&maximal(self.fibers().into_values().collect()))
    }

    fn corner_sets(&mut self, side: Side, m: usize) -> Arc<Vec<ElemSet>> {
        assert!(m >= 1);
        if let Some(v) = self.corner.get(&(side, m)) {
            return v.clone();
        }
        let out = if m == 1 {
            self.sat_j1().members
        } else {
            let other = self.corner_sets(side.other(), m - 1);
            let mut fam = self.close(&[]);
            loop {
                let mut extra = Vec::new();
                for u in &fam {
                    let e = self.m().set_omega(u);
                    let c = self.content(&e);
                    for z in other.iter().filter(|z| self.content(z).is_subset(c)) {
                        let p = match side {
                            Side::R => self.m().mul_sets(&e, z),
                            Side::L => self.m().mul_sets(z, &e),
                        };
                        if !fam.iter().any(|f| p.is_subset(f)) && !extra.contains(&p) {
                            extra.push(p);
                        }
                    }
                }
                if extra.is_empty() {
                    break;
                }
                extra.extend(fam.iter().cloned());
                fam = self.close(&extra);
            }
            fam
        };
        let out = Arc::new(out);
        self.corner.insert((side, m), out.clone());
        out
    }

    /// `Sat_{R_m}` or `Sat_{L_m}`; `m = 1` gives the α-fibers.
    pub fn sat_corner(&mut self, side: Side, m: usize) -> SubsetFamily {
        let v = self.corner_sets(side, m);
        self.family(&v)
    }

    /// Maximal `RL_m`-factors, sorted by product.
    pub fn rl_factors(&mut self, m: usize) -> Arc<Vec<RlFactor>> {
        if let Some(v) = self.rl.get(&m) {
            return v.clone();
        }
        let r = self.corner_sets(Side::R, m);
        let l = self.corner_sets(Side::L, m);
        let mm = self.cs.monoid.clone();
        let mut contents: Vec<LetterSet> = r.iter().map(|u| self.content(u)).collect();
        contents.sort();
        contents.dedup();
        let mut all: Vec<RlFactor> = Vec::new();
        for c in contents {
            let es = maximal(r.iter().filter(|u| self.content(u) == c).map(|u| mm.set_omega(u)).collect());
            let fs = maximal(l.iter().filter(|v| self.content(v) == c).map(|v| mm.set_omega(v)).collect());
            if es.is_empty() || fs.is_empty() {
                continue;
            }
            let ss: Vec<&ElemSet> = r.iter().filter(|s| self.content(s).is_subset(c)).collect();
            let ts: Vec<&ElemSet> = l.iter().filter(|t| self.content(t).is_subset(c)).collect();
            let w = self.cs.below(c);
            // staged products, each stage reduced to its maximal sets
            let mut stage: Vec<(ElemSet, Vec<ElemSet>)> = Vec::new();
            for s in &ss {
                for e in &es {
                    stage.push((mm.mul_sets(s, e), vec![(*s).clone(), e.clone()]));
                }
            }
            stage = maximal_tagged(stage);
            let stage: Vec<(ElemSet, Vec<ElemSet>)> =
                maximal_tagged(stage.into_iter().map(|(p, tag)| (mm.mul_sets(&p, &w), tag)).collect());
            let mut next = Vec::new();
            for (p, tag) in &stage {
                for f in &fs {
                    let mut t2 = tag.clone();
                    t2.push(f.clone());
                    next.push((mm.mul_sets(p, f), t2));
                }
            }
            let stage = maximal_tagged(next);
            let mut next = Vec::new();
            for (p, tag) in &stage {
                for t in &ts {
                    let mut t2 = tag.clone();
                    t2.push((*t).clone());
                    next.push((mm.mul_sets(p, t), t2));
                }
            }
            for (p, tag) in maximal_tagged(next) {
                all.push(RlFactor {
                    s: tag[0].clone(),
                    e: tag[1].clone(),
                    w: w.clone(),
                    f: tag[2].clone(),
                    t: tag[3].clone(),
                    product: p,
                    alphabet: c,
                });
            }
        }
        let products = maximal(all.iter().map(|f| f.product.clone()).collect());
        let mut kept: Vec<RlFactor> = Vec::new();
        for p in products {
            let f = all.iter().find(|f| f.product == p).unwrap().clone();
            kept.push(f);
        }
        let out = Arc::new(kept);
        self.rl.insert(m, out.clone());
        out
    }

    fn j_sets(&mut self) -> Arc<Vec<ElemSet>> {
        if let Some(j) = &self.j {
            return j.clone();
        }
        let mm = self.cs.monoid.clone();
        let seeds: Vec<ElemSet> = self
            .fibers()
            .into_iter()
            .map(|(c, fiber)| {
                let w = self.cs.below(c);
                mm.mul_sets(&mm.mul_sets(&w, &mm.set_omega(&fiber)), &w)
            })
            .collect();
        let out = Arc::new(self.close(&seeds));
        self.j = Some(out.clone());
        out
    }

    /// `Sat_J`: closure of `XEY` over idempotent `E` of constant content.
    pub fn sat_j(&mut self) -> SubsetFamily {
        let v = self.j_sets();
        self.family(&v)
    }

    /// Closure of all chains `U_1 V_1 U_2 … U_k` of maximal `RL_m`-factors
    /// with `V_i` drawn from `vs` and cut down to the shared alphabet.
    fn chains(&mut self, m: usize, vs: &[ElemSet]) -> Vec<ElemSet> {
        let us = self.rl_factors(m);
        let mm = self.cs.monoid.clone();
        let mut seen: BTreeMap<LetterSet, Antichain> = BTreeMap::new();
        let mut emitted = Antichain::new();
        let mut queue: Vec<(ElemSet, LetterSet)> = Vec::new();
        for u in us.iter() {
            if seen.entry(u.alphabet).or_default().insert(u.product.clone()) {
                queue.push((u.product.clone(), u.alphabet));
            }
        }
        let mut i = 0;
        while i < queue.len() {
            let (p, c) = queue[i].clone();
            i += 1;
            if !seen[&c].contains_exact(&p) {
                continue;
            }
            emitted.insert(p.clone());
            for u in us.iter() {
                let b = c.intersect(u.alphabet);
                let wb = self.cs.below(b);
                for v in vs {
                    let v2 = v.intersection(&wb);
                    if v2.is_empty() {
                        continue;
                    }
                    let q = mm.mul_sets(&mm.mul_sets(&p, &v2), &u.product);
                    if seen.entry(u.alphabet).or_default().insert(q.clone()) {
                        queue.push((q, u.alphabet));
                    }
                }
            }
        }
        self.close(&emitted.into_sorted())
    }

    fn fo_sets(&mut self, k: usize) -> Arc<Vec<ElemSet>> {
        assert!(k >= 2);
        if let Some(v) = self.fo.get(&k) {
            return v.clone();
        }
        let out = if k == 2 {
            self.j_sets()
        } else {
            let vs = self.fo_sets(k - 1);
            Arc::new(self.chains(k - 1, &vs))
        };
        self.fo.insert(k, out.clone());
        out
    }

    /// `Sat_{FO_k}` for `k >= 2`; `k = 2` is `Sat_J`.
    pub fn sat_fo(&mut self, k: usize) -> SubsetFamily {
        let v = self.fo_sets(k);
        self.family(&v)
    }

    fn sp_sets(&mut self, m: usize) -> Arc<Vec<ElemSet>> {
        if let Some(v) = self.sp.get(&m) {
            return v.clone();
        }
        let out = if m == 1 {
            Arc::new(vec![ElemSet::full(self.n())])
        } else {
            let vs = self.sp_sets(m - 1);
            Arc::new(self.chains(m, &vs))
        };
        self.sp.insert(m, out.clone());
        out
    }

    /// `Sat_{SP_m}`; level 1 is the whole power set.
    pub fn sat_sp(&mut self, m: usize) -> SubsetFamily {
        let v = self.sp_sets(m);
        self.family(&v)
    }

    /// `pSat_{Si_m}` / `pSat_{Pi_m}`.
    pub fn psat(&mut self, pol: Polarity, m: usize) -> Arc<ConeFamily> {
        assert!(m >= 1);
        if let Some(v) = self.cones.get(&(pol, m)) {
            return v.clone();
        }
        let n = self.n();
        let mm = self.cs.monoid.clone();
        let one = mm.identity();
        let fam = if m == 1 {
            let seeds: Vec<(usize, ElemSet)> = match pol {
                Polarity::Si => vec![(one, ElemSet::full(n))],
                Polarity::Pi => (0..n).map(|s| (s, ElemSet::from_iter(n, [one, s]))).collect(),
            };
            close_cones(&mm, &seeds, self.schedule)
        } else {
            let lower = self.psat(pol, m - 1).pairs();
            let us = self.rl_factors(m);
            // antichain per (element, content of the last factor)
            let mut seen: HashMap<(usize, LetterSet), Antichain> = HashMap::new();
            let mut queue: Vec<(usize, ElemSet, LetterSet)> = Vec::new();
            for u in us.iter() {
                for x in u.product.iter() {
                    if seen.entry((x, u.alphabet)).or_default().insert(u.product.clone()) {
                        queue.push((x, u.product.clone(), u.alphabet));
                    }
                }
            }
            let mut emitted: Vec<(usize, ElemSet)> = Vec::new();
            let mut i = 0;
            while i < queue.len() {
                let (p, set, c) = queue[i].clone();
                i += 1;
                if !seen[&(p, c)].contains_exact(&set) {
                    continue;
                }
                emitted.push((p, set.clone()));
                for u in us.iter() {
                    let wb = self.cs.below(c.intersect(u.alphabet));
                    for (v, vset) in &lower {
                        // the side condition covers the point v as well as V
                        if !wb.contains(*v) {
                            continue;
                        }
                        let v2 = vset.intersection(&wb);
                        if v2.is_empty() {
                            continue;
                        }
                        let q = mm.mul_sets(&mm.mul_sets(&set, &v2), &u.product);
                        let pv = mm.mul(p, *v);
                        for x in u.product.iter() {
                            let y = mm.mul(pv, x);
                            if seen.entry((y, u.alphabet)).or_default().insert(q.clone()) {
                                queue.push((y, q.clone(), u.alphabet));
                            }
                        }
                    }
                }
            }
            close_cones(&mm, &emitted, self.schedule)
        };
        let out = Arc::new(ConeFamily::from_antichains(n, fam));
        self.cones.insert((pol, m), out.clone());
        out
    }
}

/// Maximal sets, sorted by element lists.
pub fn maximal(sets: Vec<ElemSet>) -> Vec<ElemSet> {
    let mut a = Antichain::new();
    let mut sets = sets;
    sets.sort_by_key(|s| s.to_vec());
    for s in sets {
        a.insert(s);
    }
    a.into_sorted()
}

fn maximal_tagged<T: Clone>(items: Vec<(ElemSet, T)>) -> Vec<(ElemSet, T)> {
    let keep = maximal(items.iter().map(|(s, _)| s.clone()).collect());
    keep.into_iter().map(|k| items.iter().find(|(s, _)| *s == k).unwrap().clone()).collect()
}
