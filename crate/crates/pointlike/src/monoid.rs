//! Finite (ordered) monoids given by multiplication tables.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;
use std::hash::Hash;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use thiserror::Error;

use crate::set::ElemSet;
use crate::words::{Alphabet, LetterSet};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MonoidError {
    #[error("table is not associative at ({0}, {1}, {2})")]
    NotAssociative(usize, usize, usize),
    #[error("element {0} is not a two-sided identity")]
    NotIdentity(usize),
    #[error("malformed table: {0}")]
    BadTable(String),
    #[error("relation is not a stable preorder: {0}")]
    NotStable(String),
    #[error("relation is not a partial order: {0}")]
    NotOrder(String),
    #[error("resource limit: {0}")]
    Resource(String),
    #[error("content map is not a morphism at ({0}, {1})")]
    BadContent(usize, usize),
}

/// A binary relation on elements, stored as up-sets: `up[s] = {t | s R t}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Relation {
    up: Vec<ElemSet>,
}

impl Relation {
    pub fn equality(n: usize) -> Self {
        Relation { up: (0..n).map(|s| ElemSet::singleton(n, s)).collect() }
    }

    pub fn full(n: usize) -> Self {
        Relation { up: (0..n).map(|_| ElemSet::full(n)).collect() }
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> bool) -> Self {
        Relation { up: (0..n).map(|s| ElemSet::from_iter(n, (0..n).filter(|&t| f(s, t)))).collect() }
    }

    pub fn size(&self) -> usize {
        self.up.len()
    }

    #[inline]
    pub fn holds(&self, s: usize, t: usize) -> bool {
        self.up[s].contains(t)
    }

    pub fn up(&self, s: usize) -> &ElemSet {
        &self.up[s]
    }

    pub fn reversed(&self) -> Relation {
        let n = self.size();
        Relation::from_fn(n, |s, t| self.holds(t, s))
    }

    pub fn is_reflexive(&self) -> bool {
        (0..self.size()).all(|s| self.holds(s, s))
    }

    pub fn is_transitive(&self) -> bool {
        (0..self.size()).all(|s| self.up[s].iter().all(|t| self.up[t].is_subset(&self.up[s])))
    }

    pub fn is_antisymmetric(&self) -> bool {
        let n = self.size();
        (0..n).all(|s| self.up[s].iter().all(|t| t == s || !self.holds(t, s)))
    }

    /// Classes of `R ∩ R⁻¹`, numbered by least member; returns the class of
    /// each element and the number of classes.
    pub fn classes(&self) -> (Vec<usize>, usize) {
        let n = self.size();
        let mut class = vec![usize::MAX; n];
        let mut count = 0;
        for s in 0..n {
            if class[s] != usize::MAX {
                continue;
            }
            for t in s..n {
                if class[t] == usize::MAX && self.holds(s, t) && self.holds(t, s) {
                    class[t] = count;
                }
            }
            count += 1;
        }
        (class, count)
    }
}

/// A finite monoid with elements `0..size`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiniteMonoid {
    size: usize,
    identity: usize,
    table: Vec<u32>,
    names: Vec<String>,
    order: Option<Relation>,
}

impl FiniteMonoid {
    /// Builds a monoid from rows, checking identity and associativity
    /// (exhaustive up to 200 elements, 10⁶ sampled triples above).
    pub fn new(rows: Vec<Vec<usize>>, identity: usize) -> Result<Self, MonoidError> {
        let n = rows.len();
        if n == 0 {
            return Err(MonoidError::BadTable("empty table".into()));
        }
        if identity >= n {
            return Err(MonoidError::BadTable(format!("identity {identity} out of range")));
        }
        let mut table = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(MonoidError::BadTable(format!("row {i} has {} entries", row.len())));
            }
            for &x in row {
                if x >= n {
                    return Err(MonoidError::BadTable(format!("entry {x} out of range")));
                }
                table.push(x as u32);
            }
        }
        let m = Self::from_table_unchecked(n, identity, table);
        m.check_identity()?;
        m.check_associative()?;
        Ok(m)
    }

    pub(crate) fn from_table_unchecked(size: usize, identity: usize, table: Vec<u32>) -> Self {
        let names = (0..size).map(|i| if i == identity { "1".into() } else { format!("e{i}") }).collect();
        FiniteMonoid { size, identity, table, names, order: None }
    }

    pub fn trivial() -> Self {
        Self::from_table_unchecked(1, 0, vec![0])
    }

    fn check_identity(&self) -> Result<(), MonoidError> {
        let e = self.identity;
        for s in 0..self.size {
            if self.mul(e, s) != s || self.mul(s, e) != s {
                return Err(MonoidError::NotIdentity(e));
            }
        }
        Ok(())
    }

    fn check_associative(&self) -> Result<(), MonoidError> {
        let n = self.size;
        let ok = |a: usize, b: usize, c: usize| self.mul(self.mul(a, b), c) == self.mul(a, self.mul(b, c));
        if n <= 200 {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        if !ok(a, b, c) {
                            return Err(MonoidError::NotAssociative(a, b, c));
                        }
                    }
                }
            }
        } else {
            let mut rng = rand::rngs::StdRng::seed_from_u64(0x5eed);
            for _ in 0..1_000_000 {
                let (a, b, c) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
                if !ok(a, b, c) {
                    return Err(MonoidError::NotAssociative(a, b, c));
                }
            }
        }
        Ok(())
    }

    pub fn with_names(mut self, names: Vec<String>) -> Self {
        assert_eq!(names.len(), self.size);
        self.names = names;
        self
    }

    /// Attaches a stable partial order.
    pub fn with_order(mut self, order: Relation) -> Result<Self, MonoidError> {
        if order.size() != self.size {
            return Err(MonoidError::NotOrder("size mismatch".into()));
        }
        if !order.is_antisymmetric() {
            return Err(MonoidError::NotOrder("not antisymmetric".into()));
        }
        StablePreorder::new(&self, order.clone())?;
        self.order = Some(order);
        Ok(self)
    }

    pub(crate) fn with_order_unchecked(mut self, order: Option<Relation>) -> Self {
        self.order = order;
        self
    }

    pub fn without_order(mut self) -> Self {
        self.order = None;
        self
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.size + b] as usize
    }

    pub fn mul_all(&self, xs: &[usize]) -> usize {
        xs.iter().fold(self.identity, |acc, &x| self.mul(acc, x))
    }

    pub fn table(&self) -> &[u32] {
        &self.table
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, s: usize) -> &str {
        &self.names[s]
    }

    pub fn element_by_name(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn order(&self) -> Option<&Relation> {
        self.order.as_ref()
    }

    pub fn is_ordered(&self) -> bool {
        self.order.is_some()
    }

    /// `s ≤ t` in the attached order, or `s = t` when unordered.
    pub fn leq(&self, s: usize, t: usize) -> bool {
        match &self.order {
            Some(o) => o.holds(s, t),
            None => s == t,
        }
    }

    pub fn up_set(&self, s: usize) -> ElemSet {
        match &self.order {
            Some(o) => o.up(s).clone(),
            None => ElemSet::singleton(self.size, s),
        }
    }

    /// Same monoid with the order reversed.
    pub fn dual_order(&self) -> FiniteMonoid {
        let mut m = self.clone();
        m.order = self.order.as_ref().map(Relation::reversed);
        m
    }

    pub fn is_idempotent(&self, s: usize) -> bool {
        self.mul(s, s) == s
    }

    pub fn idempotents(&self) -> Vec<usize> {
        (0..self.size).filter(|&s| self.is_idempotent(s)).collect()
    }

    pub fn power(&self, s: usize, k: usize) -> usize {
        (0..k).fold(self.identity, |acc, _| self.mul(acc, s))
    }

    /// The unique idempotent among the positive powers of `s`.
    pub fn omega_power(&self, s: usize) -> usize {
        let mut x = s;
        loop {
            if self.is_idempotent(x) {
                return x;
            }
            x = self.mul(x, s);
        }
    }

    /// Smallest `k >= 1` with `s^k` idempotent for every `s`.
    pub fn omega(&self) -> usize {
        let mut k = 1;
        loop {
            if (0..self.size).all(|s| self.is_idempotent(self.power(s, k))) {
                return k;
            }
            k += 1;
        }
    }

    /// Subset product `ST` in the power monoid.
    pub fn mul_sets(&self, s: &ElemSet, t: &ElemSet) -> ElemSet {
        let mut out = ElemSet::empty(self.size);
        let ts: Vec<usize> = t.to_vec();
        for a in s.iter() {
            let row = &self.table[a * self.size..(a + 1) * self.size];
            for &b in &ts {
                out.insert(row[b] as usize);
            }
        }
        out
    }

    /// `U^θ`: the idempotent power of `u` in the power monoid.
    pub fn set_omega(&self, u: &ElemSet) -> ElemSet {
        let mut x = u.clone();
        loop {
            let sq = self.mul_sets(&x, &x);
            if sq == x {
                return x;
            }
            x = self.mul_sets(&x, u);
        }
    }

    pub fn is_subidempotent(&self, u: &ElemSet) -> bool {
        u.is_subset(&self.mul_sets(u, u))
    }

    pub fn all_set(&self) -> ElemSet {
        ElemSet::full(self.size)
    }

    pub fn set_names(&self, s: &ElemSet) -> Vec<&str> {
        s.iter().map(|x| self.name(x)).collect()
    }

    pub fn show_set(&self, s: &ElemSet) -> String {
        format!("{{{}}}", self.set_names(s).join(", "))
    }

    /// Exact key for caches: table, identity and order.
    pub fn cache_key(&self) -> Vec<u32> {
        let mut k = vec![self.size as u32, self.identity as u32];
        k.extend_from_slice(&self.table);
        if let Some(o) = &self.order {
            for s in 0..self.size {
                k.extend(o.up(s).iter().map(|t| t as u32 + 1));
                k.push(0);
            }
        }
        k
    }

    /// Text form: `n identity` followed by the rows.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.size, self.identity);
        for a in 0..self.size {
            let row: Vec<String> = (0..self.size).map(|b| self.mul(a, b).to_string()).collect();
            s.push_str(&row.join(" "));
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self, MonoidError> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let head = lines.next().ok_or_else(|| MonoidError::BadTable("missing header".into()))?;
        let nums = parse_nums(head)?;
        if nums.len() != 2 {
            return Err(MonoidError::BadTable("header must be 'n identity'".into()));
        }
        let (n, id) = (nums[0], nums[1]);
        let mut rows = Vec::with_capacity(n);
        for _ in 0..n {
            let l = lines.next().ok_or_else(|| MonoidError::BadTable("missing row".into()))?;
            rows.push(parse_nums(l)?);
        }
        if lines.next().is_some() {
            return Err(MonoidError::BadTable("trailing rows".into()));
        }
        FiniteMonoid::new(rows, id)
    }
}

fn parse_nums(line: &str) -> Result<Vec<usize>, MonoidError> {
    line.split_whitespace()
        .map(|t| t.parse::<usize>().map_err(|_| MonoidError::BadTable(format!("bad number {t:?}"))))
        .collect()
}

/// A stable preorder on a monoid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StablePreorder {
    rel: Relation,
}

impl StablePreorder {
    /// Validates reflexivity, transitivity and stability.
    pub fn new(m: &FiniteMonoid, rel: Relation) -> Result<Self, MonoidError> {
        let n = m.size();
        if rel.size() != n {
            return Err(MonoidError::NotStable("size mismatch".into()));
        }
        if !rel.is_reflexive() {
            return Err(MonoidError::NotStable("not reflexive".into()));
        }
        if !rel.is_transitive() {
            return Err(MonoidError::NotStable("not transitive".into()));
        }
        // stability under one-sided multiplication suffices
        for s in 0..n {
            for t in rel.up(s).iter() {
                for x in 0..n {
                    if !rel.holds(m.mul(x, s), m.mul(x, t)) || !rel.holds(m.mul(s, x), m.mul(t, x)) {
                        return Err(MonoidError::NotStable(format!(
                            "{} ≤ {} not preserved by {}",
                            m.name(s),
                            m.name(t),
                            m.name(x)
                        )));
                    }
                }
            }
        }
        Ok(StablePreorder { rel })
    }

    /// The congruence with the given class map.
    pub fn from_partition(m: &FiniteMonoid, class: &[usize]) -> Result<Self, MonoidError> {
        Self::new(m, Relation::from_fn(m.size(), |s, t| class[s] == class[t]))
    }

    pub fn relation(&self) -> &Relation {
        &self.rel
    }

    pub fn holds(&self, s: usize, t: usize) -> bool {
        self.rel.holds(s, t)
    }
}

/// `M/⪯`: classes of the induced congruence with the induced order, and the
/// projection. Classes are numbered by least element.
pub fn quotient(m: &FiniteMonoid, p: &StablePreorder) -> (FiniteMonoid, Vec<usize>) {
    let (class, k) = p.relation().classes();
    let mut rep = vec![usize::MAX; k];
    for s in 0..m.size() {
        if rep[class[s]] == usize::MAX {
            rep[class[s]] = s;
        }
    }
    let mut table = Vec::with_capacity(k * k);
    for a in 0..k {
        for b in 0..k {
            table.push(class[m.mul(rep[a], rep[b])] as u32);
        }
    }
    let order = Relation::from_fn(k, |a, b| p.holds(rep[a], rep[b]));
    let names = rep.iter().map(|&r| m.name(r).to_string()).collect();
    let q = FiniteMonoid::from_table_unchecked(k, class[m.identity()], table)
        .with_names(names)
        .with_order_unchecked(Some(order));
    (q, class)
}

/// Componentwise product; element `(i, j)` is `i * |N| + j`. Ordered
/// componentwise when either factor is ordered.
pub fn direct_product(m: &FiniteMonoid, n: &FiniteMonoid) -> FiniteMonoid {
    let (a, b) = (m.size(), n.size());
    let size = a * b;
    let mut table = Vec::with_capacity(size * size);
    for x in 0..size {
        for y in 0..size {
            let (x1, x2, y1, y2) = (x / b, x % b, y / b, y % b);
            table.push((m.mul(x1, y1) * b + n.mul(x2, y2)) as u32);
        }
    }
    let names = (0..size).map(|x| format!("({},{})", m.name(x / b), n.name(x % b))).collect();
    let order = if m.is_ordered() || n.is_ordered() {
        Some(Relation::from_fn(size, |x, y| m.leq(x / b, y / b) && n.leq(x % b, y % b)))
    } else {
        None
    };
    FiniteMonoid::from_table_unchecked(size, m.identity() * b + n.identity(), table)
        .with_names(names)
        .with_order_unchecked(order)
}

/// Result of closing a generating set under a product.
#[derive(Clone, Debug)]
pub struct Generated<T> {
    pub monoid: FiniteMonoid,
    pub elements: Vec<T>,
    /// Element index of each generator.
    pub generators: Vec<usize>,
    /// Shortlex-least generator word reaching each element.
    pub words: Vec<Vec<usize>>,
}

pub const DEFAULT_SIZE_CAP: usize = 100_000;

/// Breadth-first closure of `generators` under `mul`, starting from
/// `identity`. Elements are numbered in discovery order and named by their
/// shortlex-least representative over `gen_names`.
pub fn generate_submonoid<T, F>(
    identity: T,
    generators: &[T],
    gen_names: &[String],
    mul: F,
    cap: usize,
) -> Result<Generated<T>, MonoidError>
where
    T: Clone + Eq + Hash,
    F: Fn(&T, &T) -> T,
{
    let mut index: HashMap<T, usize> = HashMap::new();
    let mut elements = vec![identity.clone()];
    let mut words: Vec<Vec<usize>> = vec![Vec::new()];
    index.insert(identity, 0);
    let mut right: Vec<Vec<usize>> = Vec::new();
    let mut q = VecDeque::from([0usize]);
    while let Some(i) = q.pop_front() {
        let mut row = Vec::with_capacity(generators.len());
        for (g, gen) in generators.iter().enumerate() {
            let x = mul(&elements[i], gen);
            let j = match index.get(&x) {
                Some(&j) => j,
                None => {
                    let j = elements.len();
                    if j >= cap {
                        return Err(MonoidError::Resource(format!(
                            "submonoid exceeds {cap} elements"
                        )));
                    }
                    index.insert(x.clone(), j);
                    elements.push(x);
                    let mut w = words[i].clone();
                    w.push(g);
                    words.push(w);
                    q.push_back(j);
                    j
                }
            };
            row.push(j);
        }
        if right.len() <= i {
            right.resize(i + 1, Vec::new());
        }
        right[i] = row;
    }
    let n = elements.len();
    // a·b by running b's generator word from a through the right Cayley graph
    let mut table = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            let x = words[b].iter().fold(a, |acc, &g| right[acc][g]);
            table.push(x as u32);
        }
    }
    let names = words
        .iter()
        .map(|w| if w.is_empty() { "1".to_string() } else { w.iter().map(|&g| gen_names[g].as_str()).collect() })
        .collect();
    let gens = (0..generators.len()).map(|g| right[0][g]).collect();
    let monoid = FiniteMonoid::from_table_unchecked(n, 0, table).with_names(names);
    Ok(Generated { monoid, elements, generators: gens, words })
}

/// A morphism `A* → M` given by letter images.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonoidMorphism {
    alphabet: Alphabet,
    target: Arc<FiniteMonoid>,
    images: Vec<usize>,
}

impl MonoidMorphism {
    pub fn new(alphabet: Alphabet, target: Arc<FiniteMonoid>, images: Vec<usize>) -> Self {
        assert_eq!(alphabet.len(), images.len());
        MonoidMorphism { alphabet, target, images }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn target(&self) -> &Arc<FiniteMonoid> {
        &self.target
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn letter_image(&self, c: u8) -> usize {
        self.images[self.alphabet.index_of(c).expect("letter outside alphabet")]
    }

    pub fn eval(&self, w: &[u8]) -> usize {
        w.iter().fold(self.target.identity(), |acc, &c| self.target.mul(acc, self.letter_image(c)))
    }

    /// Whether the letter images generate the whole target.
    pub fn is_surjective(&self) -> bool {
        let m = &self.target;
        let mut seen = ElemSet::singleton(m.size(), m.identity());
        let mut q = VecDeque::from([m.identity()]);
        while let Some(x) = q.pop_front() {
            for &g in &self.images {
                let y = m.mul(x, g);
                if seen.insert(y) {
                    q.push_back(y);
                }
            }
        }
        seen.len() == m.size()
    }

    /// Shortlex-least word for every element reached by the images.
    pub fn representatives(&self) -> Vec<Option<Vec<u8>>> {
        let m = &self.target;
        let mut rep: Vec<Option<Vec<u8>>> = vec![None; m.size()];
        rep[m.identity()] = Some(Vec::new());
        let mut q = VecDeque::from([m.identity()]);
        while let Some(x) = q.pop_front() {
            for (i, &g) in self.images.iter().enumerate() {
                let y = m.mul(x, g);
                if rep[y].is_none() {
                    let mut w = rep[x].clone().unwrap();
                    w.push(self.alphabet.letters()[i]);
                    rep[y] = Some(w);
                    q.push_back(y);
                }
            }
        }
        rep
    }

    /// Restricts the target to the image and renames elements by their
    /// shortlex representatives.
    pub fn onto_image(&self) -> Result<MonoidMorphism, MonoidError> {
        let m = self.target.clone();
        let names: Vec<String> = self.alphabet.letters().iter().map(|&c| (c as char).to_string()).collect();
        let g = generate_submonoid(m.identity(), &self.images, &names, |a, b| m.mul(*a, *b), DEFAULT_SIZE_CAP)?;
        let order = m.order().map(|o| {
            Relation::from_fn(g.elements.len(), |a, b| o.holds(g.elements[a], g.elements[b]))
        });
        let monoid = g.monoid.with_order_unchecked(order);
        Ok(MonoidMorphism::new(self.alphabet.clone(), Arc::new(monoid), g.generators))
    }
}

/// A monoid with a content morphism into `J_A` and a projection onto the
/// monoid it was built from.
#[derive(Clone, Debug)]
pub struct ContentStructure {
    pub monoid: Arc<FiniteMonoid>,
    pub alphabet: Alphabet,
    pub content: Vec<LetterSet>,
    pub morphism: MonoidMorphism,
    pub projection: Vec<usize>,
    pub base: Arc<FiniteMonoid>,
}

impl ContentStructure {
    pub fn size(&self) -> usize {
        self.monoid.size()
    }

    /// Content of a set, when constant on it.
    pub fn set_content(&self, s: &ElemSet) -> Option<LetterSet> {
        let mut it = s.iter().map(|x| self.content[x]);
        let first = it.next()?;
        it.all(|c| c == first).then_some(first)
    }

    /// All elements whose content is contained in `b`.
    pub fn below(&self, b: LetterSet) -> ElemSet {
        ElemSet::from_iter(self.size(), (0..self.size()).filter(|&x| self.content[x].is_subset(b)))
    }

    /// Image of a set under the projection.
    pub fn project(&self, s: &ElemSet) -> ElemSet {
        ElemSet::from_iter(self.base.size(), s.iter().map(|x| self.projection[x]))
    }

    /// Checks that the content map is a morphism with `content(μ(a)) = {a}`.
    pub fn validate(&self) -> Result<(), MonoidError> {
        let m = &self.monoid;
        for s in 0..m.size() {
            for t in 0..m.size() {
                if self.content[m.mul(s, t)] != self.content[s].union(self.content[t]) {
                    return Err(MonoidError::BadContent(s, t));
                }
            }
        }
        for (i, &c) in self.alphabet.letters().iter().enumerate() {
            let x = self.morphism.images()[i];
            if self.content[x] != LetterSet::of(c) {
                return Err(MonoidError::BadContent(x, x));
            }
        }
        Ok(())
    }
}

/// The submonoid of `M × J_A` generated by `(μ(a), {a})`.
pub fn alphabetize(mu: &MonoidMorphism) -> Result<ContentStructure, MonoidError> {
    let m = mu.target().clone();
    let alphabet = mu.alphabet().clone();
    let gens: Vec<(usize, LetterSet)> = alphabet
        .letters()
        .iter()
        .zip(mu.images())
        .map(|(&c, &x)| (x, LetterSet::of(c)))
        .collect();
    let names: Vec<String> = alphabet.letters().iter().map(|&c| (c as char).to_string()).collect();
    let g = generate_submonoid(
        (m.identity(), LetterSet::EMPTY),
        &gens,
        &names,
        |a, b| (m.mul(a.0, b.0), a.1.union(b.1)),
        DEFAULT_SIZE_CAP,
    )?;
    let content = g.elements.iter().map(|e| e.1).collect();
    let projection = g.elements.iter().map(|e| e.0).collect();
    let monoid = Arc::new(g.monoid);
    let morphism = MonoidMorphism::new(alphabet.clone(), monoid.clone(), g.generators);
    Ok(ContentStructure { monoid, alphabet, content, morphism, projection, base: m })
}

/// Something a word can drive letter by letter: a monoid acting on itself
/// through letter images, or a ranker-class automaton.
pub trait LetterAction {
    fn size(&self) -> usize;
    fn start(&self) -> usize;
    fn step(&self, x: usize, letter: usize) -> usize;
}

impl LetterAction for MonoidMorphism {
    fn size(&self) -> usize {
        self.target.size()
    }
    fn start(&self) -> usize {
        self.target.identity()
    }
    fn step(&self, x: usize, letter: usize) -> usize {
        self.target.mul(x, self.images[letter])
    }
}

/// Graph of the relational morphism `ν ∘ μ⁻¹`: the pairs `(μ(w), ν(w))`.
#[derive(Clone, Debug)]
pub struct RelationalGraph {
    pub left_size: usize,
    pub right_size: usize,
    pub pairs: Vec<(usize, usize)>,
    /// `τ(s)` for each left element.
    pub tau: Vec<ElemSet>,
    /// `τ⁻¹(x)` for each right element.
    pub tau_inv: Vec<ElemSet>,
}

impl RelationalGraph {
    pub fn tau_image(&self, s: usize) -> &ElemSet {
        &self.tau[s]
    }
}

/// Builds the graph by right-multiplying pairs with letter images.
pub fn relational_graph(
    mu: &MonoidMorphism,
    nu: &dyn LetterAction,
    cap: usize,
) -> Result<RelationalGraph, MonoidError> {
    let k = mu.alphabet().len();
    let (ls, rs) = (mu.size(), nu.size());
    let start = (mu.start(), nu.start());
    let mut seen: HashMap<(usize, usize), ()> = HashMap::from([(start, ())]);
    let mut pairs = vec![start];
    let mut q = VecDeque::from([start]);
    while let Some((a, b)) = q.pop_front() {
        for l in 0..k {
            let p = (mu.step(a, l), nu.step(b, l));
            if seen.insert(p, ()).is_none() {
                if pairs.len() >= cap {
                    return Err(MonoidError::Resource(format!("relational graph exceeds {cap} pairs")));
                }
                pairs.push(p);
                q.push_back(p);
            }
        }
    }
    let mut tau = vec![ElemSet::empty(rs); ls];
    let mut tau_inv = vec![ElemSet::empty(ls); rs];
    for &(a, b) in &pairs {
        tau[a].insert(b);
        tau_inv[b].insert(a);
    }
    Ok(RelationalGraph { left_size: ls, right_size: rs, pairs, tau, tau_inv })
}

/// Green's preorders computed from ideals.
#[derive(Clone, Debug)]
pub struct Green {
    pub right: Vec<ElemSet>,
    pub left: Vec<ElemSet>,
    pub two: Vec<ElemSet>,
}

impl Green {
    pub fn new(m: &FiniteMonoid) -> Self {
        let n = m.size();
        let right: Vec<ElemSet> =
            (0..n).map(|s| ElemSet::from_iter(n, (0..n).map(|x| m.mul(s, x)))).collect();
        let left: Vec<ElemSet> =
            (0..n).map(|s| ElemSet::from_iter(n, (0..n).map(|x| m.mul(x, s)))).collect();
        let two = (0..n)
            .map(|s| {
                let mut acc = ElemSet::empty(n);
                for x in 0..n {
                    for y in right[s].iter() {
                        acc.insert(m.mul(x, y));
                    }
                }
                acc
            })
            .collect();
        Green { right, left, two }
    }

    pub fn r_le(&self, s: usize, t: usize) -> bool {
        self.right[s].is_subset(&self.right[t])
    }
    pub fn l_le(&self, s: usize, t: usize) -> bool {
        self.left[s].is_subset(&self.left[t])
    }
    pub fn j_le(&self, s: usize, t: usize) -> bool {
        self.two[s].is_subset(&self.two[t])
    }
    pub fn r_eq(&self, s: usize, t: usize) -> bool {
        self.right[s] == self.right[t]
    }
    pub fn l_eq(&self, s: usize, t: usize) -> bool {
        self.left[s] == self.left[t]
    }
    pub fn j_eq(&self, s: usize, t: usize) -> bool {
        self.two[s] == self.two[t]
    }
    pub fn r_lt(&self, s: usize, t: usize) -> bool {
        self.r_le(s, t) && !self.r_eq(s, t)
    }
    pub fn l_lt(&self, s: usize, t: usize) -> bool {
        self.l_le(s, t) && !self.l_eq(s, t)
    }
    pub fn j_lt(&self, s: usize, t: usize) -> bool {
        self.j_le(s, t) && !self.j_eq(s, t)
    }

    fn classes_of(sets: &[ElemSet]) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = Vec::new();
        let mut key: HashMap<&ElemSet, usize> = HashMap::new();
        for (s, set) in sets.iter().enumerate() {
            match key.get(set) {
                Some(&k) => out[k].push(s),
                None => {
                    key.insert(set, out.len());
                    out.push(vec![s]);
                }
            }
        }
        out
    }

    pub fn r_classes(&self) -> Vec<Vec<usize>> {
        Self::classes_of(&self.right)
    }
    pub fn l_classes(&self) -> Vec<Vec<usize>> {
        Self::classes_of(&self.left)
    }
    pub fn j_classes(&self) -> Vec<Vec<usize>> {
        Self::classes_of(&self.two)
    }

    pub fn is_j_trivial(&self) -> bool {
        self.j_classes().iter().all(|c| c.len() == 1)
    }
}

/// Green's preorders by reachability in the Cayley graphs over the given
/// generators. Returns `(≤R, ≤L, ≤J)` as relations.
pub fn green_by_reachability(m: &FiniteMonoid, gens: &[usize]) -> (Relation, Relation, Relation) {
    let n = m.size();
    let reach = |start: usize, step: &dyn Fn(usize, usize) -> usize| {
        let mut seen = ElemSet::singleton(n, start);
        let mut q = VecDeque::from([start]);
        while let Some(x) = q.pop_front() {
            for &g in gens {
                let y = step(x, g);
                if seen.insert(y) {
                    q.push_back(y);
                }
            }
        }
        seen
    };
    let down_r: Vec<ElemSet> = (0..n).map(|t| reach(t, &|x, g| m.mul(x, g))).collect();
    let down_l: Vec<ElemSet> = (0..n).map(|t| reach(t, &|x, g| m.mul(g, x))).collect();
    let down_j: Vec<ElemSet> = (0..n)
        .map(|t| {
            let mut acc = ElemSet::empty(n);
            for x in down_r[t].iter() {
                acc.union_with(&down_l[x]);
            }
            acc
        })
        .collect();
    (
        Relation::from_fn(n, |s, t| down_r[t].contains(s)),
        Relation::from_fn(n, |s, t| down_l[t].contains(s)),
        Relation::from_fn(n, |s, t| down_j[t].contains(s)),
    )
}

/// ASCII egg-box: one block per J-class (highest first), rows are
/// R-classes, columns L-classes, cells H-classes.
pub fn egg_box(m: &FiniteMonoid) -> String {
    let g = Green::new(m);
    let mut jcs = g.j_classes();
    // topological order: a class above every class it sits over
    jcs.sort_by(|a, b| {
        let (x, y) = (a[0], b[0]);
        let above = g.j_le(y, x);
        let below = g.j_le(x, y);
        match (above, below) {
            (true, false) => std::cmp::Ordering::Less,
            (false, true) => std::cmp::Ordering::Greater,
            _ => g.two[y].len().cmp(&g.two[x].len()).then(x.cmp(&y)),
        }
    });
    let mut out = String::new();
    for jc in &jcs {
        let mut rows: Vec<Vec<usize>> = Vec::new();
        let mut cols: Vec<Vec<usize>> = Vec::new();
        for &s in jc {
            if !rows.iter().any(|r| g.r_eq(r[0], s)) {
                rows.push(jc.iter().copied().filter(|&t| g.r_eq(s, t)).collect());
            }
            if !cols.iter().any(|c| g.l_eq(c[0], s)) {
                cols.push(jc.iter().copied().filter(|&t| g.l_eq(s, t)).collect());
            }
        }
        let cell = |r: &[usize], c: &[usize]| -> String {
            let h: Vec<&str> = r.iter().filter(|x| c.contains(x)).map(|&x| m.name(x)).collect();
            h.join(",")
        };
        let width = rows
            .iter()
            .flat_map(|r| cols.iter().map(move |c| (r, c)))
            .map(|(r, c)| cell(r, c).chars().count())
            .max()
            .unwrap_or(1)
            .max(1);
        let rule = format!("+{}\n", vec!["-".repeat(width + 2); cols.len()].join("+") + "+");
        out.push_str(&rule);
        for r in &rows {
            out.push('|');
            for c in &cols {
                let text = cell(r, c);
                let pad = width - text.chars().count();
                let _ = write!(out, " {}{} |", text, " ".repeat(pad));
            }
            out.push('\n');
            out.push_str(&rule);
        }
        out.push('\n');
    }
    out
}

/// Where Ramsey numbers come from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum RamseySource {
    /// `⌊k!·e⌋ + 1` for every `k`.
    #[default]
    FactorialBound,
    /// Known exact values 3, 6, 17 for `k <= 3`, the bound above that.
    ExactSmall,
}

/// Upper bound on the triangle Ramsey number for `k` colours.
pub fn ramsey_bound(k: u64, source: RamseySource) -> Result<u64, MonoidError> {
    if k == 0 {
        return Err(MonoidError::BadTable("at least one colour is needed".into()));
    }
    if source == RamseySource::ExactSmall && k <= 3 {
        return Ok([3, 6, 17][k as usize - 1]);
    }
    // ⌊k!·e⌋ = Σ_{i=0}^{k} k!/i!
    let overflow = || MonoidError::Resource(format!("Ramsey bound for {k} colours overflows; cap the instance size"));
    let mut sum: u64 = 1; // i = k
    let mut term: u64 = 1;
    let mut i = k;
    while i > 0 {
        term = term.checked_mul(i).ok_or_else(overflow)?;
        sum = sum.checked_add(term).ok_or_else(overflow)?;
        i -= 1;
    }
    sum.checked_add(1).ok_or_else(overflow)
}

/// Colour count `2^size` for the power monoid, as used by the bound.
pub fn power_colours(size: usize) -> Result<u64, MonoidError> {
    if size >= 64 {
        return Err(MonoidError::Resource(format!("2^{size} colours do not fit")));
    }
    Ok(1u64 << size)
}

/// A factorization `u = u_1 a_1 u_2 … a_{k-1} u_k` at Green descents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GreenFactorization {
    pub blocks: Vec<Vec<u8>>,
    pub cuts: Vec<u8>,
}

impl GreenFactorization {
    pub fn concat(&self) -> Vec<u8> {
        let mut out = Vec::new();
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                out.push(self.cuts[i - 1]);
            }
            out.extend_from_slice(b);
        }
        out
    }
}

/// Cuts `u` at every letter whose addition strictly descends in `≤R`.
pub fn r_factorization(u: &[u8], mu: &MonoidMorphism) -> GreenFactorization {
    let m = mu.target();
    let g = Green::new(m);
    let mut blocks = vec![Vec::new()];
    let mut cuts = Vec::new();
    let mut x = m.identity();
    for &c in u {
        let y = m.mul(x, mu.letter_image(c));
        if g.r_lt(y, x) {
            cuts.push(c);
            blocks.push(Vec::new());
        } else {
            blocks.last_mut().unwrap().push(c);
        }
        x = y;
    }
    GreenFactorization { blocks, cuts }
}

/// Mirror image: cuts at strict `≤L` descents reading from the right.
pub fn l_factorization(u: &[u8], mu: &MonoidMorphism) -> GreenFactorization {
    let m = mu.target();
    let g = Green::new(m);
    let mut blocks = vec![Vec::new()];
    let mut cuts = Vec::new();
    let mut x = m.identity();
    for &c in u.iter().rev() {
        let y = m.mul(mu.letter_image(c), x);
        if g.l_lt(y, x) {
            cuts.push(c);
            blocks.push(Vec::new());
        } else {
            blocks.last_mut().unwrap().insert(0, c);
        }
        x = y;
    }
    blocks.reverse();
    cuts.reverse();
    GreenFactorization { blocks, cuts }
}

/// First `(i, j)` (0-based, inclusive, ordered by `j` then `i`) such that
/// the product of `blocks[i..=j]` is subidempotent.
pub fn find_subidempotent_factor(m: &FiniteMonoid, blocks: &[ElemSet]) -> Option<(usize, usize)> {
    for j in 0..blocks.len() {
        let mut prod = ElemSet::singleton(m.size(), m.identity());
        // products blocks[i..=j] for i from j down to 0
        for i in (0..=j).rev() {
            prod = m.mul_sets(&blocks[i], &prod);
            if m.is_subidempotent(&prod) {
                return Some((i, j));
            }
        }
    }
    None
}
