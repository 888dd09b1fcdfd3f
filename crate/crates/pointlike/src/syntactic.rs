//! Regular expressions, minimal DFAs and syntactic ordered monoids.
//!
//! Grammar, loosest binding first: `|`, `&`, concatenation, prefix `~`,
//! postfix `* + ?`. Atoms are letters `a`-`z`, `ε` (or `1`) for the empty
//! word, `∅` (or `0`) for the empty language, and parenthesized groups.

use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use thiserror::Error;

use crate::monoid::{generate_submonoid, FiniteMonoid, MonoidError, MonoidMorphism, Relation, DEFAULT_SIZE_CAP};
use crate::set::ElemSet;
use crate::words::{Alphabet, LetterSet, WordError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SyntaxError {
    #[error("regex syntax error at offset {offset}: {msg}")]
    Regex { offset: usize, msg: String },
    #[error("DFA format error on line {line}: {msg}")]
    Dfa { line: usize, msg: String },
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Monoid(#[from] MonoidError),
    #[error("alphabets differ: {0} vs {1}")]
    AlphabetMismatch(String, String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Regex {
    Empty,
    Epsilon,
    Letter(u8),
    Concat(Box<Regex>, Box<Regex>),
    Union(Box<Regex>, Box<Regex>),
    Inter(Box<Regex>, Box<Regex>),
    Complement(Box<Regex>),
    Star(Box<Regex>),
    Plus(Box<Regex>),
    Optional(Box<Regex>),
}

impl Regex {
    pub fn letters(&self) -> LetterSet {
        match self {
            Regex::Empty | Regex::Epsilon => LetterSet::EMPTY,
            Regex::Letter(c) => LetterSet::of(*c),
            Regex::Concat(a, b) | Regex::Union(a, b) | Regex::Inter(a, b) => a.letters().union(b.letters()),
            Regex::Complement(a) | Regex::Star(a) | Regex::Plus(a) | Regex::Optional(a) => a.letters(),
        }
    }
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

pub fn parse_regex(text: &str) -> Result<Regex, SyntaxError> {
    let mut p = Parser { chars: text.chars().collect(), pos: 0 };
    p.skip_ws();
    let r = p.union()?;
    p.skip_ws();
    if p.pos < p.chars.len() {
        return Err(p.err(format!("unexpected {:?}", p.chars[p.pos])));
    }
    Ok(r)
}

impl Parser {
    fn err(&self, msg: String) -> SyntaxError {
        SyntaxError::Regex { offset: self.pos, msg }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn union(&mut self) -> Result<Regex, SyntaxError> {
        let mut r = self.inter()?;
        while self.peek() == Some('|') {
            self.pos += 1;
            r = Regex::Union(Box::new(r), Box::new(self.inter()?));
        }
        Ok(r)
    }

    fn inter(&mut self) -> Result<Regex, SyntaxError> {
        let mut r = self.concat()?;
        while self.peek() == Some('&') {
            self.pos += 1;
            r = Regex::Inter(Box::new(r), Box::new(self.concat()?));
        }
        Ok(r)
    }

    fn starts_atom(c: char) -> bool {
        c.is_ascii_lowercase() || matches!(c, '(' | '~' | 'ε' | '∅' | '0' | '1')
    }

    fn concat(&mut self) -> Result<Regex, SyntaxError> {
        let mut r = self.complement()?;
        while self.peek().is_some_and(Self::starts_atom) {
            r = Regex::Concat(Box::new(r), Box::new(self.complement()?));
        }
        Ok(r)
    }

    fn complement(&mut self) -> Result<Regex, SyntaxError> {
        if self.peek() == Some('~') {
            self.pos += 1;
            return Ok(Regex::Complement(Box::new(self.complement()?)));
        }
        self.postfix()
    }

    fn postfix(&mut self) -> Result<Regex, SyntaxError> {
        let mut r = self.atom()?;
        loop {
            match self.peek() {
                Some('*') => r = Regex::Star(Box::new(r)),
                Some('+') => r = Regex::Plus(Box::new(r)),
                Some('?') => r = Regex::Optional(Box::new(r)),
                _ => return Ok(r),
            }
            self.pos += 1;
        }
    }

    fn atom(&mut self) -> Result<Regex, SyntaxError> {
        let Some(c) = self.peek() else {
            return Err(self.err("unexpected end of input".into()));
        };
        let start = self.pos;
        self.pos += 1;
        match c {
            'a'..='z' => Ok(Regex::Letter(c as u8)),
            'ε' | '1' => Ok(Regex::Epsilon),
            '∅' | '0' => Ok(Regex::Empty),
            '(' => {
                if self.peek().is_none() {
                    return Err(SyntaxError::Regex { offset: start, msg: "unclosed parenthesis".into() });
                }
                if self.peek() == Some(')') {
                    self.pos += 1;
                    return Ok(Regex::Epsilon);
                }
                let r = self.union()?;
                if self.peek() != Some(')') {
                    return Err(SyntaxError::Regex { offset: start, msg: "unclosed parenthesis".into() });
                }
                self.pos += 1;
                Ok(r)
            }
            _ => {
                self.pos = start;
                Err(self.err(format!("unexpected {c:?}")))
            }
        }
    }
}

/// A complete DFA over a declared alphabet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dfa {
    pub alphabet: Alphabet,
    pub initial: usize,
    pub accepting: Vec<bool>,
    /// `delta[q][i]` for the `i`-th letter.
    pub delta: Vec<Vec<usize>>,
    pub minimal: bool,
}

impl Dfa {
    pub fn states(&self) -> usize {
        self.delta.len()
    }

    fn constant(alphabet: &Alphabet, accept: bool) -> Dfa {
        Dfa {
            alphabet: alphabet.clone(),
            initial: 0,
            accepting: vec![accept],
            delta: vec![vec![0; alphabet.len()]],
            minimal: true,
        }
    }

    pub fn empty(alphabet: &Alphabet) -> Dfa {
        Self::constant(alphabet, false)
    }

    pub fn universal(alphabet: &Alphabet) -> Dfa {
        Self::constant(alphabet, true)
    }

    fn epsilon(alphabet: &Alphabet) -> Dfa {
        let k = alphabet.len();
        Dfa {
            alphabet: alphabet.clone(),
            initial: 0,
            accepting: vec![true, false],
            delta: vec![vec![1; k], vec![1; k]],
            minimal: true,
        }
    }

    fn letter(alphabet: &Alphabet, c: u8) -> Dfa {
        let k = alphabet.len();
        let i = alphabet.index_of(c).expect("letter checked");
        let mut d0 = vec![2; k];
        d0[i] = 1;
        Dfa {
            alphabet: alphabet.clone(),
            initial: 0,
            accepting: vec![false, true, false],
            delta: vec![d0, vec![2; k], vec![2; k]],
            minimal: true,
        }
    }

    pub fn run(&self, w: &[u8]) -> Option<usize> {
        let mut q = self.initial;
        for &c in w {
            q = self.delta[q][self.alphabet.index_of(c)?];
        }
        Some(q)
    }

    pub fn accepts(&self, w: &[u8]) -> bool {
        self.run(w).is_some_and(|q| self.accepting[q])
    }

    pub fn complement(&self) -> Dfa {
        let mut d = self.clone();
        for a in d.accepting.iter_mut() {
            *a = !*a;
        }
        d
    }

    /// Generic subset-style construction: explores states of type `S` from
    /// `start` and builds a DFA, then minimizes.
    fn explore<S, F, A>(alphabet: &Alphabet, start: S, step: F, accept: A) -> Dfa
    where
        S: Clone + Eq + std::hash::Hash,
        F: Fn(&S, usize) -> S,
        A: Fn(&S) -> bool,
    {
        let k = alphabet.len();
        let mut index: HashMap<S, usize> = HashMap::from([(start.clone(), 0)]);
        let mut states = vec![start];
        let mut delta: Vec<Vec<usize>> = Vec::new();
        let mut i = 0;
        while i < states.len() {
            let mut row = Vec::with_capacity(k);
            for l in 0..k {
                let t = step(&states[i], l);
                let j = *index.entry(t.clone()).or_insert_with(|| {
                    states.push(t);
                    states.len() - 1
                });
                row.push(j);
            }
            delta.push(row);
            i += 1;
        }
        let accepting = states.iter().map(accept).collect();
        Dfa { alphabet: alphabet.clone(), initial: 0, accepting, delta, minimal: false }.minimize()
    }

    fn product(&self, other: &Dfa, f: impl Fn(bool, bool) -> bool) -> Dfa {
        Self::explore(
            &self.alphabet,
            (self.initial, other.initial),
            |&(p, q), l| (self.delta[p][l], other.delta[q][l]),
            |&(p, q)| f(self.accepting[p], other.accepting[q]),
        )
    }

    pub fn union(&self, other: &Dfa) -> Dfa {
        self.product(other, |a, b| a || b)
    }

    pub fn intersection(&self, other: &Dfa) -> Dfa {
        self.product(other, |a, b| a && b)
    }

    pub fn concat(&self, other: &Dfa) -> Dfa {
        let n2 = other.states();
        let seed = |q1: usize, mut s: ElemSet| {
            if self.accepting[q1] {
                s.insert(other.initial);
            }
            s
        };
        Self::explore(
            &self.alphabet,
            (self.initial, seed(self.initial, ElemSet::empty(n2))),
            |(q1, s), l| {
                let q1n = self.delta[*q1][l];
                let sn = ElemSet::from_iter(n2, s.iter().map(|q| other.delta[q][l]));
                (q1n, seed(q1n, sn))
            },
            |(_, s)| s.iter().any(|q| other.accepting[q]),
        )
    }

    pub fn star(&self) -> Dfa {
        let n = self.states();
        // (is_start, current set); entering an accepting state restarts
        Self::explore(
            &self.alphabet,
            (true, ElemSet::singleton(n, self.initial)),
            |(_, s), l| {
                let mut sn = ElemSet::from_iter(n, s.iter().map(|q| self.delta[q][l]));
                if sn.iter().any(|q| self.accepting[q]) {
                    sn.insert(self.initial);
                }
                (false, sn)
            },
            |(start, s)| *start || s.iter().any(|q| self.accepting[q]),
        )
    }

    /// Drops unreachable states, merges equivalent ones (Moore refinement)
    /// and renumbers by BFS from the initial state.
    pub fn minimize(&self) -> Dfa {
        let k = self.alphabet.len();
        let n = self.states();
        let mut reach = vec![false; n];
        reach[self.initial] = true;
        let mut q = VecDeque::from([self.initial]);
        while let Some(p) = q.pop_front() {
            for &t in &self.delta[p] {
                if !reach[t] {
                    reach[t] = true;
                    q.push_back(t);
                }
            }
        }
        let mut class: Vec<usize> = (0..n).map(|p| self.accepting[p] as usize).collect();
        let mut count = 0;
        loop {
            let mut keys: HashMap<Vec<usize>, usize> = HashMap::new();
            let mut next = vec![0; n];
            for p in (0..n).filter(|&p| reach[p]) {
                let mut key = vec![class[p]];
                key.extend(self.delta[p].iter().map(|&t| class[t]));
                let len = keys.len();
                next[p] = *keys.entry(key).or_insert(len);
            }
            let stable = keys.len() == count;
            count = keys.len();
            class = next;
            if stable {
                break;
            }
        }
        // BFS renumbering over classes
        let mut rep = vec![usize::MAX; count];
        for p in (0..n).filter(|&p| reach[p]) {
            if rep[class[p]] == usize::MAX {
                rep[class[p]] = p;
            }
        }
        let mut num = vec![usize::MAX; count];
        let mut order = vec![class[self.initial]];
        num[class[self.initial]] = 0;
        let mut i = 0;
        while i < order.len() {
            let c = order[i];
            for l in 0..k {
                let t = class[self.delta[rep[c]][l]];
                if num[t] == usize::MAX {
                    num[t] = order.len();
                    order.push(t);
                }
            }
            i += 1;
        }
        let delta = order.iter().map(|&c| (0..k).map(|l| num[class[self.delta[rep[c]][l]]]).collect()).collect();
        let accepting = order.iter().map(|&c| self.accepting[rep[c]]).collect();
        Dfa { alphabet: self.alphabet.clone(), initial: 0, accepting, delta, minimal: true }
    }

    /// Text form: `states initial`, accepting indices, then one row per state.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.states(), self.initial);
        let acc: Vec<String> = (0..self.states()).filter(|&q| self.accepting[q]).map(|q| q.to_string()).collect();
        s.push_str(&acc.join(" "));
        s.push('\n');
        for row in &self.delta {
            let r: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            s.push_str(&r.join(" "));
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str, alphabet: &Alphabet) -> Result<Dfa, SyntaxError> {
        let lines: Vec<&str> = text.lines().collect();
        let bad = |line: usize, msg: &str| SyntaxError::Dfa { line, msg: msg.into() };
        let nums = |line: usize| -> Result<Vec<usize>, SyntaxError> {
            lines
                .get(line - 1)
                .ok_or_else(|| bad(line, "missing line"))?
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| bad(line, "not a number")))
                .collect()
        };
        let head = nums(1)?;
        if head.len() != 2 {
            return Err(bad(1, "expected 'states initial'"));
        }
        let (n, init) = (head[0], head[1]);
        if n == 0 || init >= n {
            return Err(bad(1, "initial state out of range"));
        }
        let mut accepting = vec![false; n];
        for q in nums(2)? {
            *accepting.get_mut(q).ok_or_else(|| bad(2, "accepting state out of range"))? = true;
        }
        let mut delta = Vec::with_capacity(n);
        for q in 0..n {
            let row = nums(q + 3)?;
            if row.len() != alphabet.len() || row.iter().any(|&t| t >= n) {
                return Err(bad(q + 3, "row must list one valid successor per letter"));
            }
            delta.push(row);
        }
        if lines[n + 2..].iter().any(|l| !l.trim().is_empty()) {
            return Err(bad(n + 3, "trailing content"));
        }
        Ok(Dfa { alphabet: alphabet.clone(), initial: init, accepting, delta, minimal: false })
    }
}

/// Minimal DFA of `r` over `alphabet`.
pub fn compile_min_dfa(r: &Regex, alphabet: &Alphabet) -> Result<Dfa, SyntaxError> {
    for c in r.letters().letters() {
        if alphabet.index_of(c).is_none() {
            return Err(WordError::LetterOutsideAlphabet(c as char).into());
        }
    }
    Ok(compile(r, alphabet))
}

fn compile(r: &Regex, a: &Alphabet) -> Dfa {
    match r {
        Regex::Empty => Dfa::empty(a),
        Regex::Epsilon => Dfa::epsilon(a),
        Regex::Letter(c) => Dfa::letter(a, *c),
        Regex::Concat(x, y) => compile(x, a).concat(&compile(y, a)),
        Regex::Union(x, y) => compile(x, a).union(&compile(y, a)),
        Regex::Inter(x, y) => compile(x, a).intersection(&compile(y, a)),
        Regex::Complement(x) => compile(x, a).complement(),
        Regex::Star(x) => compile(x, a).star(),
        Regex::Plus(x) => {
            let d = compile(x, a);
            d.concat(&d.star())
        }
        Regex::Optional(x) => compile(x, a).union(&Dfa::epsilon(a)),
    }
}

/// A language with its minimal DFA and syntactic ordered monoid.
#[derive(Clone, Debug)]
pub struct RecognizedLanguage {
    pub dfa: Dfa,
    pub morphism: MonoidMorphism,
    pub accepting: ElemSet,
    /// Transformation of DFA states for each monoid element.
    pub transforms: Vec<Vec<u32>>,
}

impl RecognizedLanguage {
    pub fn from_regex(text: &str, alphabet: &Alphabet) -> Result<Self, SyntaxError> {
        let r = parse_regex(text)?;
        Self::from_dfa(&compile_min_dfa(&r, alphabet)?)
    }

    pub fn from_dfa(d: &Dfa) -> Result<Self, SyntaxError> {
        syntactic_ordered_monoid(d)
    }

    pub fn monoid(&self) -> &Arc<FiniteMonoid> {
        self.morphism.target()
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.dfa.alphabet
    }

    pub fn contains(&self, w: &[u8]) -> bool {
        self.dfa.accepts(w)
    }

    pub fn complement(&self) -> Result<Self, SyntaxError> {
        Self::from_dfa(&self.dfa.complement())
    }
}

/// `incl[p][q]`: the language from state `p` is included in that from `q`.
fn state_inclusion(d: &Dfa) -> Relation {
    let n = d.states();
    let mut incl: Vec<Vec<bool>> =
        (0..n).map(|p| (0..n).map(|q| !d.accepting[p] || d.accepting[q]).collect()).collect();
    loop {
        let mut changed = false;
        for p in 0..n {
            for q in 0..n {
                if incl[p][q] && d.delta[p].iter().zip(&d.delta[q]).any(|(&x, &y)| !incl[x][y]) {
                    incl[p][q] = false;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    Relation::from_fn(n, |p, q| incl[p][q])
}

/// Transition monoid of the minimal DFA, ordered by the syntactic order.
pub fn syntactic_ordered_monoid(d: &Dfa) -> Result<RecognizedLanguage, SyntaxError> {
    let d = if d.minimal { d.clone() } else { d.minimize() };
    let n = d.states();
    let k = d.alphabet.len();
    let gens: Vec<Vec<u32>> = (0..k).map(|l| (0..n).map(|q| d.delta[q][l] as u32).collect()).collect();
    let names: Vec<String> = d.alphabet.letters().iter().map(|&c| (c as char).to_string()).collect();
    let id: Vec<u32> = (0..n as u32).collect();
    let g = generate_submonoid(
        id,
        &gens,
        &names,
        |f, h| f.iter().map(|&q| h[q as usize]).collect(),
        DEFAULT_SIZE_CAP,
    )?;
    let incl = state_inclusion(&d);
    let size = g.elements.len();
    let order = Relation::from_fn(size, |s, t| {
        (0..n).all(|q| incl.holds(g.elements[s][q] as usize, g.elements[t][q] as usize))
    });
    let accepting =
        ElemSet::from_iter(size, (0..size).filter(|&s| d.accepting[g.elements[s][d.initial] as usize]));
    let monoid = g.monoid.with_order(order)?;
    let morphism = MonoidMorphism::new(d.alphabet.clone(), Arc::new(monoid), g.generators);
    Ok(RecognizedLanguage { dfa: d, morphism, accepting, transforms: g.elements })
}

/// For every element `s`, the shortlex-least word accepted by `d` and
/// mapped to `s` by `mu`, if any. Reachability in the product of `d` with
/// the right Cayley automaton of `mu`.
pub fn accepted_witnesses(d: &Dfa, mu: &MonoidMorphism) -> Result<Vec<Option<Vec<u8>>>, SyntaxError> {
    if d.alphabet != *mu.alphabet() {
        return Err(SyntaxError::AlphabetMismatch(d.alphabet.as_string(), mu.alphabet().as_string()));
    }
    let m = mu.target();
    let size = m.size();
    let start = (d.initial, m.identity());
    let mut word: HashMap<(usize, usize), Vec<u8>> = HashMap::from([(start, Vec::new())]);
    let mut q = VecDeque::from([start]);
    let mut out: Vec<Option<Vec<u8>>> = vec![None; size];
    while let Some((p, x)) = q.pop_front() {
        let w = word[&(p, x)].clone();
        if d.accepting[p] && out[x].is_none() {
            out[x] = Some(w.clone());
        }
        for (l, &c) in d.alphabet.letters().iter().enumerate() {
            let nxt = (d.delta[p][l], m.mul(x, mu.images()[l]));
            if let std::collections::hash_map::Entry::Vacant(e) = word.entry(nxt) {
                let mut w2 = w.clone();
                w2.push(c);
                e.insert(w2);
                q.push_back(nxt);
            }
        }
    }
    Ok(out)
}

/// Whether some word accepted by `d` maps to `s`.
pub fn intersect_nonempty(d: &Dfa, mu: &MonoidMorphism, s: usize) -> Result<bool, SyntaxError> {
    Ok(accepted_witnesses(d, mu)?[s].is_some())
}
