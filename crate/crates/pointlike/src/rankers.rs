//! Rankers, comparison sets, signatures and the ranker quotient monoids.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::monoid::{FiniteMonoid, LetterAction, MonoidMorphism, Relation};
use crate::set::ElemSet;
use crate::words::{is_subword, Alphabet};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RankerError {
    #[error("bad ranker syntax at token {0:?}")]
    Syntax(String),
    #[error("empty ranker")]
    Empty,
    #[error("invalid comparison set: {0}")]
    InvalidSet(String),
    #[error("comparison set is not closed under subwords: missing ({0}, {1})")]
    NotClosed(String, String),
    #[error("ranker monoid exceeds {cap} {what} (reached {reached})")]
    TooLarge { what: &'static str, cap: usize, reached: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dir {
    X,
    Y,
}

impl Dir {
    pub fn flip(self) -> Dir {
        match self {
            Dir::X => Dir::Y,
            Dir::Y => Dir::X,
        }
    }
}

/// A non-empty sequence of `X_a` / `Y_a` steps, read left to right.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ranker(pub Vec<(Dir, u8)>);

impl Ranker {
    pub fn parse(text: &str) -> Result<Ranker, RankerError> {
        let mut steps = Vec::new();
        for tok in text.split_whitespace() {
            let b = tok.as_bytes();
            if b.len() != 2 || !b[1].is_ascii_lowercase() {
                return Err(RankerError::Syntax(tok.into()));
            }
            let d = match b[0] {
                b'X' => Dir::X,
                b'Y' => Dir::Y,
                _ => return Err(RankerError::Syntax(tok.into())),
            };
            steps.push((d, b[1]));
        }
        if steps.is_empty() {
            return Err(RankerError::Empty);
        }
        Ok(Ranker(steps))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// 1-based position, or `None` when undefined.
    pub fn eval(&self, w: &[u8]) -> Option<usize> {
        let len = w.len();
        let mut pos: Option<usize> = None;
        for &(d, c) in &self.0 {
            let p = match d {
                Dir::X => {
                    let from = pos.unwrap_or(0);
                    (from + 1..=len).find(|&i| w[i - 1] == c)?
                }
                Dir::Y => {
                    let from = pos.unwrap_or(len + 1);
                    (1..from).rev().find(|&i| w[i - 1] == c)?
                }
            };
            pos = Some(p);
        }
        pos
    }

    /// Number of maximal runs of equal directions.
    pub fn blocks(&self) -> usize {
        if self.0.is_empty() {
            return 0;
        }
        1 + self.0.windows(2).filter(|p| p[0].0 != p[1].0).count()
    }

    /// Whether the ranker lies in `R^d_m`: at most `m` alternating blocks,
    /// the first one in direction `d` (blocks may be empty).
    pub fn in_class(&self, d: Dir, m: usize) -> bool {
        if self.0.is_empty() {
            return false;
        }
        let b = self.blocks();
        if self.0[0].0 == d {
            b <= m
        } else {
            b < m
        }
    }

    /// Smallest `m` with the ranker in `R_m`.
    pub fn alternation_depth(&self) -> usize {
        self.blocks()
    }

    pub fn is_subword_of(&self, other: &Ranker) -> bool {
        let mut it = other.0.iter();
        self.0.iter().all(|s| it.any(|t| t == s))
    }

    /// All non-empty scattered subwords.
    pub fn subwords(&self) -> Vec<Ranker> {
        let n = self.0.len();
        let mut out: Vec<Ranker> = (1u64..(1 << n))
            .map(|mask| Ranker((0..n).filter(|i| mask >> i & 1 == 1).map(|i| self.0[i]).collect()))
            .collect();
        out.sort();
        out.dedup();
        out
    }
}

impl fmt::Display for Ranker {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|&(d, c)| format!("{}{}", if d == Dir::X { 'X' } else { 'Y' }, c as char))
            .collect();
        f.write_str(&parts.join(" "))
    }
}

impl fmt::Debug for Ranker {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ranker({self})")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Flavor {
    XX,
    YY,
    XY,
    YX,
    XXuYY,
    XYuYX,
    RR1,
}

impl Flavor {
    pub fn parse(s: &str) -> Option<Flavor> {
        Some(match s {
            "XX" => Flavor::XX,
            "YY" => Flavor::YY,
            "XY" => Flavor::XY,
            "YX" => Flavor::YX,
            "XXuYY" => Flavor::XXuYY,
            "XYuYX" => Flavor::XYuYX,
            "RR1" => Flavor::RR1,
            _ => return None,
        })
    }
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Flavor::XX => "XX",
            Flavor::YY => "YY",
            Flavor::XY => "XY",
            Flavor::YX => "YX",
            Flavor::XXuYY => "XXuYY",
            Flavor::XYuYX => "XYuYX",
            Flavor::RR1 => "RR1",
        };
        f.write_str(s)
    }
}

/// Subword semantics used at level 1 for the mixed flavors.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Special {
    /// `u ≤ v` iff every subword of `u` of length `<= 2n` is one of `v`.
    Xy,
    /// The reverse inclusion.
    Yx,
    /// Equal subword sets.
    Both,
}

/// A finite set of ranker pairs, or the level-1 subword special case.
#[derive(Clone, Debug)]
pub struct ComparisonSet {
    pub alphabet: Alphabet,
    pub label: String,
    /// `[C]` together with all prefixes; parents precede children.
    nodes: Vec<Node>,
    /// Node indices of `[C]`, sorted.
    members: Vec<usize>,
    pairs: Vec<(usize, usize)>,
    special: Option<(Special, Vec<Vec<u8>>)>,
}

#[derive(Clone, Debug)]
struct Node {
    parent: Option<usize>,
    dir: Dir,
    letter: u8,
    ranker: Ranker,
}

impl ComparisonSet {
    /// The flavored families, with `R^X_m` / `R^Y_m` read cumulatively.
    pub fn flavored(flavor: Flavor, m: usize, n: usize, alphabet: &Alphabet) -> Result<Self, RankerError> {
        if m == 0 || n == 0 {
            return Err(RankerError::InvalidSet("m and n must be at least 1".into()));
        }
        let label = format!("{flavor}_{{{m},{n}}}");
        if m == 1 {
            let special = match flavor {
                Flavor::XY => Some(Special::Xy),
                Flavor::YX => Some(Special::Yx),
                Flavor::XYuYX => Some(Special::Both),
                _ => None,
            };
            if let Some(sp) = special {
                let subs = alphabet.words_up_to(2 * n).into_iter().filter(|w| !w.is_empty()).collect();
                return Ok(ComparisonSet {
                    alphabet: alphabet.clone(),
                    label,
                    nodes: Vec::new(),
                    members: Vec::new(),
                    pairs: Vec::new(),
                    special: Some((sp, subs)),
                });
            }
        }
        let all = all_rankers(alphabet, n);
        let rx: Vec<&Ranker> = all.iter().filter(|r| r.in_class(Dir::X, m)).collect();
        let ry: Vec<&Ranker> = all.iter().filter(|r| r.in_class(Dir::Y, m)).collect();
        let r1: Vec<&Ranker> = all.iter().filter(|r| r.blocks() == 1).collect();
        let cross = |a: &[&Ranker], b: &[&Ranker]| -> Vec<(Ranker, Ranker)> {
            a.iter().flat_map(|r| b.iter().map(move |s| ((*r).clone(), (*s).clone()))).collect()
        };
        let pairs = match flavor {
            Flavor::XX => cross(&rx, &rx),
            Flavor::YY => cross(&ry, &ry),
            Flavor::XY => cross(&rx, &ry),
            Flavor::YX => cross(&ry, &rx),
            Flavor::XXuYY => {
                let mut p = cross(&rx, &rx);
                p.extend(cross(&ry, &ry));
                p
            }
            Flavor::XYuYX => {
                let mut p = cross(&rx, &ry);
                p.extend(cross(&ry, &rx));
                p
            }
            Flavor::RR1 => cross(&r1, &r1),
        };
        Self::build(alphabet, label, pairs)
    }

    /// An explicit pair set; validated for closure under subwords.
    pub fn explicit(alphabet: &Alphabet, pairs: Vec<(Ranker, Ranker)>) -> Result<Self, RankerError> {
        for (r, s) in &pairs {
            for &(_, c) in r.0.iter().chain(&s.0) {
                if alphabet.index_of(c).is_none() {
                    return Err(RankerError::InvalidSet(format!("letter {} outside alphabet", c as char)));
                }
            }
        }
        if let Some((r, s)) = missing_subword_pair(&pairs) {
            return Err(RankerError::NotClosed(r.to_string(), s.to_string()));
        }
        Self::build(alphabet, "explicit".into(), pairs)
    }

    fn build(alphabet: &Alphabet, label: String, pairs: Vec<(Ranker, Ranker)>) -> Result<Self, RankerError> {
        let mut index: HashMap<Ranker, usize> = HashMap::new();
        let mut nodes: Vec<Node> = Vec::new();
        let mut add = |r: &Ranker, nodes: &mut Vec<Node>| -> usize {
            let mut parent = None;
            for k in 1..=r.len() {
                let pre = Ranker(r.0[..k].to_vec());
                let id = match index.get(&pre) {
                    Some(&id) => id,
                    None => {
                        let id = nodes.len();
                        let (dir, letter) = r.0[k - 1];
                        nodes.push(Node { parent, dir, letter, ranker: pre.clone() });
                        index.insert(pre, id);
                        id
                    }
                };
                parent = Some(id);
            }
            parent.unwrap()
        };
        let mut idx_pairs = Vec::with_capacity(pairs.len());
        let mut members = Vec::new();
        for (r, s) in &pairs {
            let (i, j) = (add(r, &mut nodes), add(s, &mut nodes));
            idx_pairs.push((i, j));
            members.push(i);
            members.push(j);
        }
        members.sort_unstable();
        members.dedup();
        idx_pairs.sort_unstable();
        idx_pairs.dedup();
        Ok(ComparisonSet { alphabet: alphabet.clone(), label, nodes, members, pairs: idx_pairs, special: None })
    }

    pub fn is_special(&self) -> bool {
        self.special.is_some()
    }

    pub fn pair_count(&self) -> usize {
        self.pairs.len()
    }

    /// `[C]`, the rankers occurring in some pair.
    pub fn rankers(&self) -> Vec<Ranker> {
        self.members.iter().map(|&i| self.nodes[i].ranker.clone()).collect()
    }

    pub fn pairs(&self) -> Vec<(Ranker, Ranker)> {
        self.pairs.iter().map(|&(i, j)| (self.nodes[i].ranker.clone(), self.nodes[j].ranker.clone())).collect()
    }

    /// Whether every pair of subwords of a pair is again a pair.
    pub fn is_subword_closed(&self) -> bool {
        self.special.is_some() || missing_subword_pair(&self.pairs()).is_none()
    }

    /// Positions of every node on `w`.
    fn positions(&self, w: &[u8]) -> Vec<Option<usize>> {
        let len = w.len();
        let k = self.alphabet.len();
        // next[p][c]: first i > p with w[i] = c; prev[p][c]: last i < p
        let mut next = vec![vec![None; k]; len + 2];
        for p in (0..len).rev() {
            next[p] = next[p + 1].clone();
            next[p][self.alphabet.index_of(w[p]).unwrap()] = Some(p + 1);
        }
        let mut prev = vec![vec![None; k]; len + 2];
        for p in 2..=len + 1 {
            prev[p] = prev[p - 1].clone();
            prev[p][self.alphabet.index_of(w[p - 2]).unwrap()] = Some(p - 1);
        }
        let mut pos: Vec<Option<usize>> = Vec::with_capacity(self.nodes.len());
        for node in &self.nodes {
            let c = self.alphabet.index_of(node.letter).unwrap();
            let from = match node.parent {
                Some(p) => pos[p],
                None => Some(if node.dir == Dir::X { 0 } else { len + 1 }),
            };
            pos.push(from.and_then(|f| if node.dir == Dir::X { next[f][c] } else { prev[f][c] }));
        }
        pos
    }

    pub fn signature(&self, w: &[u8]) -> Signature {
        if let Some((_, subs)) = &self.special {
            let defined = ElemSet::from_iter(subs.len(), (0..subs.len()).filter(|&i| is_subword(&subs[i], w)));
            return Signature { defined, leq: ElemSet::empty(0), lt: ElemSet::empty(0) };
        }
        let pos = self.positions(w);
        let nm = self.members.len();
        let np = self.pairs.len();
        let defined = ElemSet::from_iter(nm, (0..nm).filter(|&i| pos[self.members[i]].is_some()));
        let mut leq = ElemSet::empty(np);
        let mut lt = ElemSet::empty(np);
        for (k, &(i, j)) in self.pairs.iter().enumerate() {
            if let (Some(a), Some(b)) = (pos[i], pos[j]) {
                if a <= b {
                    leq.insert(k);
                }
                if a < b {
                    lt.insert(k);
                }
            }
        }
        Signature { defined, leq, lt }
    }

    /// `u ≤^C v` read off two signatures.
    pub fn leq_signatures(&self, u: &Signature, v: &Signature) -> bool {
        match &self.special {
            Some((Special::Xy, _)) => u.defined.is_subset(&v.defined),
            Some((Special::Yx, _)) => v.defined.is_subset(&u.defined),
            Some((Special::Both, _)) => u.defined == v.defined,
            None => u.defined == v.defined && u.leq.is_subset(&v.leq) && u.lt.is_subset(&v.lt),
        }
    }

    pub fn leq_words(&self, u: &[u8], v: &[u8]) -> bool {
        self.leq_signatures(&self.signature(u), &self.signature(v))
    }
}

fn all_rankers(alphabet: &Alphabet, n: usize) -> Vec<Ranker> {
    let steps: Vec<(Dir, u8)> = [Dir::X, Dir::Y]
        .iter()
        .flat_map(|&d| alphabet.letters().iter().map(move |&c| (d, c)))
        .collect();
    let mut out = Vec::new();
    let mut layer: Vec<Vec<(Dir, u8)>> = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::new();
        for r in &layer {
            for &s in &steps {
                let mut r2 = r.clone();
                r2.push(s);
                next.push(r2);
            }
        }
        out.extend(next.iter().cloned().map(Ranker));
        layer = next;
    }
    out
}

fn missing_subword_pair(pairs: &[(Ranker, Ranker)]) -> Option<(Ranker, Ranker)> {
    let set: std::collections::HashSet<(&Ranker, &Ranker)> = pairs.iter().map(|(r, s)| (r, s)).collect();
    for (r, s) in pairs {
        for r2 in r.subwords() {
            for s2 in s.subwords() {
                if !set.contains(&(&r2, &s2)) {
                    return Some((r2, s2));
                }
            }
        }
    }
    None
}

/// Definedness and comparison outcomes of a word, the data of its class.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Signature {
    pub defined: ElemSet,
    pub leq: ElemSet,
    pub lt: ElemSet,
}

pub const DEFAULT_CLASS_CAP: usize = 200_000;
/// Largest class count for which a full multiplication table is built.
pub const DEFAULT_TABLE_CAP: usize = 4096;

/// Signature classes with the right action of letters.
#[derive(Clone, Debug)]
pub struct RankerAutomaton {
    pub set: Arc<ComparisonSet>,
    pub reps: Vec<Vec<u8>>,
    pub sigs: Vec<Signature>,
    pub delta: Vec<Vec<usize>>,
}

impl RankerAutomaton {
    /// Breadth-first search over classes, starting from `ε`.
    pub fn build(set: Arc<ComparisonSet>, cap: usize) -> Result<Self, RankerError> {
        let letters = set.alphabet.letters().to_vec();
        let mut index: HashMap<Signature, usize> = HashMap::new();
        let s0 = set.signature(&[]);
        index.insert(s0.clone(), 0);
        let mut reps = vec![Vec::new()];
        let mut sigs = vec![s0];
        let mut delta: Vec<Vec<usize>> = Vec::new();
        let mut q = VecDeque::from([0usize]);
        while let Some(i) = q.pop_front() {
            let mut row = Vec::with_capacity(letters.len());
            for &c in &letters {
                let mut w = reps[i].clone();
                w.push(c);
                let sig = set.signature(&w);
                let j = match index.get(&sig) {
                    Some(&j) => j,
                    None => {
                        let j = reps.len();
                        if j >= cap {
                            return Err(RankerError::TooLarge { what: "classes", cap, reached: j });
                        }
                        index.insert(sig.clone(), j);
                        reps.push(w);
                        sigs.push(sig);
                        q.push_back(j);
                        j
                    }
                };
                row.push(j);
            }
            if delta.len() <= i {
                delta.resize(i + 1, Vec::new());
            }
            delta[i] = row;
        }
        Ok(RankerAutomaton { set, reps, sigs, delta })
    }

    pub fn class_count(&self) -> usize {
        self.reps.len()
    }

    pub fn class_of(&self, w: &[u8]) -> usize {
        w.iter().fold(0, |x, &c| self.delta[x][self.set.alphabet.index_of(c).unwrap()])
    }

    /// `x ↦ class(c·rep(x))` for each letter `c`.
    pub fn left_delta(&self) -> Vec<Vec<usize>> {
        let letters = self.set.alphabet.letters();
        crate::par::map_range(self.class_count(), |x| {
            letters
                .iter()
                .map(|&c| {
                    let mut w = vec![c];
                    w.extend_from_slice(&self.reps[x]);
                    self.class_of(&w)
                })
                .collect()
        })
    }

    /// J-triviality without a table: both Cayley graphs are acyclic up
    /// to loops, so every R- and L-class is a singleton.
    pub fn is_j_trivial(&self) -> bool {
        acyclic_but_loops(&self.delta) && acyclic_but_loops(&self.left_delta())
    }

    /// `1 ≤ x` for every class.
    pub fn identity_is_minimum(&self) -> bool {
        self.sigs.iter().all(|s| self.set.leq_signatures(&self.sigs[0], s))
    }

    /// The ordered monoid `A*/≤^C` with its morphism.
    pub fn to_monoid(&self, table_cap: usize) -> Result<RankerMonoid, RankerError> {
        let n = self.class_count();
        if n > table_cap {
            return Err(RankerError::TooLarge { what: "table elements", cap: table_cap, reached: n });
        }
        let rep_idx: Vec<Vec<usize>> = self
            .reps
            .iter()
            .map(|w| w.iter().map(|&c| self.set.alphabet.index_of(c).unwrap()).collect())
            .collect();
        let table: Vec<u32> = crate::par::map_range(n, |a| {
            (0..n).map(|b| rep_idx[b].iter().fold(a, |x, &l| self.delta[x][l]) as u32).collect::<Vec<u32>>()
        })
        .into_iter()
        .flatten()
        .collect();
        let order = Relation::from_fn(n, |a, b| self.set.leq_signatures(&self.sigs[a], &self.sigs[b]));
        let names = self.reps.iter().map(|w| crate::words::show(w)).collect();
        let monoid = FiniteMonoid::from_table_unchecked(n, 0, table).with_names(names).with_order_unchecked(Some(order));
        let images = self.delta[0].clone();
        let morphism = MonoidMorphism::new(self.set.alphabet.clone(), Arc::new(monoid), images);
        Ok(RankerMonoid { morphism })
    }
}

impl LetterAction for RankerAutomaton {
    fn size(&self) -> usize {
        self.class_count()
    }
    fn start(&self) -> usize {
        0
    }
    fn step(&self, x: usize, letter: usize) -> usize {
        self.delta[x][letter]
    }
}

fn acyclic_but_loops(succ: &[Vec<usize>]) -> bool {
    let n = succ.len();
    let mut indeg = vec![0usize; n];
    for (x, row) in succ.iter().enumerate() {
        for &y in row {
            if y != x {
                indeg[y] += 1;
            }
        }
    }
    let mut stack: Vec<usize> = (0..n).filter(|&x| indeg[x] == 0).collect();
    let mut seen = 0;
    while let Some(x) = stack.pop() {
        seen += 1;
        for &y in &succ[x] {
            if y != x {
                indeg[y] -= 1;
                if indeg[y] == 0 {
                    stack.push(y);
                }
            }
        }
    }
    seen == n
}

/// `N^C` with the natural morphism from `A*`.
#[derive(Clone, Debug)]
pub struct RankerMonoid {
    pub morphism: MonoidMorphism,
}

impl RankerMonoid {
    pub fn monoid(&self) -> &Arc<FiniteMonoid> {
        self.morphism.target()
    }
}

pub fn build_ranker_monoid(set: ComparisonSet, class_cap: usize, table_cap: usize) -> Result<RankerMonoid, RankerError> {
    RankerAutomaton::build(Arc::new(set), class_cap)?.to_monoid(table_cap)
}

/// Which depth formula of the main theorem applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DepthKind {
    /// Level-1 cones: `⌈R/2⌉ - 1` with `R` for `M`.
    Level1Cone,
    /// `J`: `|A|R + R - 1`.
    J,
    /// Corners: `(m + |A|)(R - 1)` with `R` for `2^M`.
    Corner,
    /// Joins and higher cones: `(m - 1 + 3|A|)(R - 1) + |A|`.
    Join,
}

pub fn theorem_depth(kind: DepthKind, alphabet_size: u64, m: u64, r: u64) -> Option<u64> {
    let a = alphabet_size;
    match kind {
        DepthKind::Level1Cone => Some(r.div_ceil(2) - 1),
        DepthKind::J => a.checked_mul(r)?.checked_add(r)?.checked_sub(1),
        DepthKind::Corner => (m + a).checked_mul(r.checked_sub(1)?),
        DepthKind::Join => (m - 1 + 3 * a).checked_mul(r.checked_sub(1)?)?.checked_add(a),
    }
}
