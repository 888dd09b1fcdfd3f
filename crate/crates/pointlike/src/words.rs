//! Words, subwords, n-long factors and the marker factorization.
//!
//! Words are byte strings over `a..=z`. Positions are 1-based where the
//! API talks about positions, matching the usual `u[i,j)` notation.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::monoid::MonoidMorphism;
use crate::rankers::{Dir, Ranker};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("letter '{0}' is not in the alphabet")]
    LetterOutsideAlphabet(char),
    #[error("invalid character {0:?} in word")]
    BadChar(char),
    #[error("alphabet must not be empty")]
    EmptyAlphabet,
    #[error("marker positions do not interleave: {0}")]
    Interleave(String),
}

/// A set of letters `a..=z` as a bit mask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct LetterSet(pub u32);

impl LetterSet {
    pub const EMPTY: LetterSet = LetterSet(0);

    pub fn of(c: u8) -> Self {
        LetterSet(1 << (c - b'a'))
    }

    pub fn contains(self, c: u8) -> bool {
        self.0 >> (c - b'a') & 1 == 1
    }

    pub fn union(self, o: LetterSet) -> LetterSet {
        LetterSet(self.0 | o.0)
    }

    pub fn intersect(self, o: LetterSet) -> LetterSet {
        LetterSet(self.0 & o.0)
    }

    pub fn minus(self, o: LetterSet) -> LetterSet {
        LetterSet(self.0 & !o.0)
    }

    pub fn is_subset(self, o: LetterSet) -> bool {
        self.0 & !o.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn letters(self) -> impl Iterator<Item = u8> {
        (0..26u8).filter(move |i| self.0 >> i & 1 == 1).map(|i| b'a' + i)
    }
}

impl fmt::Debug for LetterSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", String::from_utf8(self.letters().collect()).unwrap())
    }
}

/// Ordered set of letters. Order is always lexicographic.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Alphabet {
    letters: Vec<u8>,
}

impl Alphabet {
    pub fn new(text: &str) -> Result<Self, WordError> {
        let mut letters = Vec::new();
        for c in text.chars() {
            if !c.is_ascii_lowercase() {
                return Err(WordError::BadChar(c));
            }
            letters.push(c as u8);
        }
        letters.sort_unstable();
        letters.dedup();
        if letters.is_empty() {
            return Err(WordError::EmptyAlphabet);
        }
        Ok(Alphabet { letters })
    }

    pub fn from_set(s: LetterSet) -> Result<Self, WordError> {
        let letters: Vec<u8> = s.letters().collect();
        if letters.is_empty() {
            return Err(WordError::EmptyAlphabet);
        }
        Ok(Alphabet { letters })
    }

    pub fn letters(&self) -> &[u8] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn index_of(&self, c: u8) -> Option<usize> {
        self.letters.binary_search(&c).ok()
    }

    pub fn set(&self) -> LetterSet {
        self.letters.iter().fold(LetterSet::EMPTY, |s, &c| s.union(LetterSet::of(c)))
    }

    pub fn as_string(&self) -> String {
        String::from_utf8(self.letters.clone()).unwrap()
    }

    /// Checks that `w` is a word over this alphabet.
    pub fn check(&self, w: &[u8]) -> Result<(), WordError> {
        for &c in w {
            if self.index_of(c).is_none() {
                return Err(WordError::LetterOutsideAlphabet(c as char));
            }
        }
        Ok(())
    }

    /// All words of length exactly `len`, in lexicographic order.
    pub fn words_of_len(&self, len: usize) -> Vec<Vec<u8>> {
        let mut out = vec![Vec::new()];
        for _ in 0..len {
            let mut next = Vec::with_capacity(out.len() * self.len());
            for w in &out {
                for &c in &self.letters {
                    let mut v = w.clone();
                    v.push(c);
                    next.push(v);
                }
            }
            out = next;
        }
        out
    }

    /// All words of length at most `len`, in shortlex order.
    pub fn words_up_to(&self, len: usize) -> Vec<Vec<u8>> {
        (0..=len).flat_map(|l| self.words_of_len(l)).collect()
    }
}

pub fn alph(w: &[u8]) -> LetterSet {
    w.iter().fold(LetterSet::EMPTY, |s, &c| s.union(LetterSet::of(c)))
}

/// True iff `v` embeds order-preservingly into `u`.
pub fn is_subword(v: &[u8], u: &[u8]) -> bool {
    let mut it = u.iter();
    v.iter().all(|c| it.any(|d| d == c))
}

/// Number of complete arches of `w` over `b`: the largest `k` such that
/// every word over `b` of length at most `k` is a subword of `w`.
/// Returns `usize::MAX` for `b = ∅`.
pub fn universality_index(w: &[u8], b: LetterSet) -> Result<usize, WordError> {
    if let Some(&c) = w.iter().find(|&&c| !b.contains(c)) {
        return Err(WordError::LetterOutsideAlphabet(c as char));
    }
    if b.is_empty() {
        return Ok(usize::MAX);
    }
    let mut k = 0;
    let mut seen = LetterSet::EMPTY;
    for &c in w {
        seen = seen.union(LetterSet::of(c));
        if seen == b {
            k += 1;
            seen = LetterSet::EMPTY;
        }
    }
    Ok(k)
}

/// `w` is n-long over its own alphabet.
pub fn is_n_long(w: &[u8], n: usize) -> bool {
    universality_index(w, alph(w)).unwrap() >= n
}

/// `long[s][e]` for the half-open slice `w[s..e]`, 0-based.
fn long_table(u: &[u8], n: usize) -> Vec<Vec<bool>> {
    let len = u.len();
    let mut t = vec![vec![false; len + 1]; len + 1];
    for s in 0..=len {
        for e in s..=len {
            t[s][e] = is_n_long(&u[s..e], n);
        }
    }
    t
}

/// Containment-maximal n-long factors as 0-based half-open slices.
pub fn maximal_long_factors(u: &[u8], n: usize) -> Vec<(usize, usize)> {
    let len = u.len();
    let long = long_table(u, n);
    // cover[s][e]: some long factor [s', e') has s' <= s and e' >= e
    let mut cover = vec![vec![false; len + 2]; len + 1];
    for s in 0..=len {
        for e in (s..=len).rev() {
            cover[s][e] = long[s][e] || (s > 0 && cover[s - 1][e]) || cover[s][e + 1];
        }
    }
    let mut out = Vec::new();
    for s in 0..=len {
        for e in s..=len {
            let wider = (s > 0 && cover[s - 1][e]) || cover[s][e + 1];
            if long[s][e] && !wider {
                out.push((s, e));
            }
        }
    }
    out
}

/// The marker sets `(R_n(u), L_n(u))`.
///
/// `R_n` holds 0 and every position directly after a maximal n-long factor,
/// `L_n` holds `|u|+1` and every position directly before one. For `n <= 1`
/// both are `{0, |u|+1}`.
pub fn long_markers(u: &[u8], n: usize) -> (BTreeSet<usize>, BTreeSet<usize>) {
    let end = u.len() + 1;
    if n <= 1 {
        let s: BTreeSet<usize> = [0, end].into_iter().collect();
        return (s.clone(), s);
    }
    let mut r = BTreeSet::from([0]);
    let mut l = BTreeSet::from([end]);
    for (s, e) in maximal_long_factors(u, n) {
        r.insert(e + 1);
        l.insert(s);
    }
    (r, l)
}

/// Shortest ranker `X_p` with `X_p(u) = target`, lexicographically least
/// among the shortest.
pub fn reaching_x_ranker(u: &[u8], target: usize) -> Option<Ranker> {
    reaching(u, target, Dir::X)
}

/// Shortest ranker `Y_q` with `Y_q(u) = target`.
pub fn reaching_y_ranker(u: &[u8], target: usize) -> Option<Ranker> {
    reaching(u, target, Dir::Y)
}

fn reaching(u: &[u8], target: usize, dir: Dir) -> Option<Ranker> {
    let len = u.len();
    if target == 0 || target > len {
        return None;
    }
    let mut letters: Vec<u8> = alph(u).letters().collect();
    letters.sort_unstable();
    let start = match dir {
        Dir::X => 0,
        Dir::Y => len + 1,
    };
    let mut prev: Vec<Option<(usize, u8)>> = vec![None; len + 2];
    let mut seen = vec![false; len + 2];
    seen[start] = true;
    let mut q = VecDeque::from([start]);
    while let Some(p) = q.pop_front() {
        if p == target {
            break;
        }
        for &c in &letters {
            let next = match dir {
                Dir::X => (p + 1..=len).find(|&i| u[i - 1] == c),
                Dir::Y => (1..p).rev().find(|&i| u[i - 1] == c),
            };
            if let Some(nx) = next {
                if !seen[nx] {
                    seen[nx] = true;
                    prev[nx] = Some((p, c));
                    q.push_back(nx);
                }
            }
        }
    }
    if !seen[target] {
        return None;
    }
    let mut steps = Vec::new();
    let mut cur = target;
    while cur != start {
        let (p, c) = prev[cur].unwrap();
        steps.push((dir, c));
        cur = p;
    }
    steps.reverse();
    Some(Ranker(steps))
}

/// Factorization `u = u_1 b_1 v_1 a_1 … u_k` with marker rankers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkedFactorization {
    pub word: Vec<u8>,
    pub n: usize,
    /// `(b_i, a_i)` as 1-based positions with `b_i <= a_i`.
    pub markers: Vec<(usize, usize)>,
    /// `X_{p_i}` reaching `a_i`.
    pub x_rankers: Vec<Ranker>,
    /// `Y_{q_i}` reaching `b_i`.
    pub y_rankers: Vec<Ranker>,
}

impl MarkedFactorization {
    pub fn k(&self) -> usize {
        self.markers.len() + 1
    }

    /// The long segment `u_i`, 1-based `i` in `1..=k`.
    pub fn u_seg(&self, i: usize) -> &[u8] {
        let start = if i == 1 { 0 } else { self.markers[i - 2].1 };
        let end = if i == self.k() { self.word.len() } else { self.markers[i - 1].0 - 1 };
        &self.word[start..end]
    }

    /// The gap `v_i` between `b_i` and `a_i`, empty when they coincide.
    pub fn v_seg(&self, i: usize) -> &[u8] {
        let (b, a) = self.markers[i - 1];
        if a == b {
            &[]
        } else {
            &self.word[b..a - 1]
        }
    }

    pub fn a_letter(&self, i: usize) -> u8 {
        self.word[self.markers[i - 1].1 - 1]
    }

    pub fn b_letter(&self, i: usize) -> u8 {
        self.word[self.markers[i - 1].0 - 1]
    }

    /// Concatenation of the segments, which must equal the word.
    pub fn concat(&self) -> Vec<u8> {
        let mut out = Vec::new();
        for i in 1..=self.k() {
            out.extend_from_slice(self.u_seg(i));
            if i < self.k() {
                let (b, a) = self.markers[i - 1];
                out.push(self.b_letter(i));
                if a != b {
                    out.extend_from_slice(self.v_seg(i));
                    out.push(self.a_letter(i));
                }
            }
        }
        out
    }

    /// Checks properties (i)–(iv) of the factorization.
    pub fn check(&self) -> Result<(), String> {
        if self.concat() != self.word {
            return Err("segments do not concatenate to the word".into());
        }
        let all = alph(&self.word);
        for i in 1..=self.k() {
            if !is_n_long(self.u_seg(i), self.n) {
                return Err(format!("u_{i} is not {}-long", self.n));
            }
        }
        for i in 1..self.k() {
            let v = alph(self.v_seg(i));
            let left = alph(self.u_seg(i)).union(LetterSet::of(self.b_letter(i)));
            let right = alph(self.u_seg(i + 1)).union(LetterSet::of(self.a_letter(i)));
            // proper in each side, witnessed by b_i and a_i; the strict
            // inclusion in the intersection can fail (see literal_ii)
            let (b_in, a_in) = (v.contains(self.b_letter(i)), v.contains(self.a_letter(i)));
            if !(v.is_subset(left.intersect(right)) && !b_in && !a_in) {
                return Err(format!("alph(v_{i}) is not a proper subset of both sides"));
            }
            let bound = (self.n + 1) * all.minus(v).len();
            let (b, a) = self.markers[i - 1];
            let (xr, yr) = (&self.x_rankers[i - 1], &self.y_rankers[i - 1]);
            if xr.len() > bound || yr.len() > bound {
                return Err(format!("marker ranker {i} longer than {bound}"));
            }
            if xr.eval(&self.word) != Some(a) || yr.eval(&self.word) != Some(b) {
                return Err(format!("marker ranker {i} misses its position"));
            }
            let coincide = a == b;
            let side = alph(self.u_seg(i + 1)).contains(self.a_letter(i))
                && alph(self.u_seg(i)).contains(self.b_letter(i));
            if !(coincide || side) {
                return Err(format!("markers {i} neither coincide nor occur in neighbours"));
            }
        }
        Ok(())
    }

    /// Indices `i` where `alph(v_i) ⊊ alph(u_i b_i) ∩ alph(a_i u_{i+1})`
    /// fails. The marker construction does not guarantee it: for
    /// `cbcccccbbbbbcaba` with `n = 2` the gap between `ccccc` and `bbbbb`
    /// has empty intersection.
    pub fn literal_ii_failures(&self) -> Vec<usize> {
        (1..self.k())
            .filter(|&i| {
                let v = alph(self.v_seg(i));
                let left = alph(self.u_seg(i)).union(LetterSet::of(self.b_letter(i)));
                let right = alph(self.u_seg(i + 1)).union(LetterSet::of(self.a_letter(i)));
                let both = left.intersect(right);
                !(v.is_subset(both) && v != both)
            })
            .collect()
    }
}

/// Factorizes `u` at the markers of `R_{n+2}(u)` (the `a_i`) and
/// `L_{n+2}(u)` (the `b_i`), with shortest reaching rankers.
pub fn rl_factorize_word(u: &[u8], n: usize) -> Result<MarkedFactorization, WordError> {
    let len = u.len();
    let (r, l) = long_markers(u, n + 2);
    let a_pos: Vec<usize> = r.into_iter().filter(|&p| p >= 1 && p <= len).collect();
    let b_pos: Vec<usize> = l.into_iter().filter(|&p| p >= 1 && p <= len).collect();
    if a_pos.len() != b_pos.len() {
        return Err(WordError::Interleave(format!("{a_pos:?} vs {b_pos:?}")));
    }
    let mut markers = Vec::with_capacity(a_pos.len());
    for (i, (&b, &a)) in b_pos.iter().zip(&a_pos).enumerate() {
        let after_prev = i == 0 || a_pos[i - 1] < b;
        if b > a || !after_prev {
            return Err(WordError::Interleave(format!("{a_pos:?} vs {b_pos:?}")));
        }
        markers.push((b, a));
    }
    let x_rankers = markers.iter().map(|&(_, a)| reaching_x_ranker(u, a).unwrap()).collect();
    let y_rankers = markers.iter().map(|&(b, _)| reaching_y_ranker(u, b).unwrap()).collect();
    Ok(MarkedFactorization { word: u.to_vec(), n, markers, x_rankers, y_rankers })
}

/// Re-evaluates the marker rankers of `f` on `w`. Fails when one is
/// undefined or the order `Y_{q_i} <= X_{p_i} < Y_{q_{i+1}}` breaks.
pub fn transfer_factorization(f: &MarkedFactorization, w: &[u8]) -> Option<MarkedFactorization> {
    let mut markers = Vec::with_capacity(f.markers.len());
    let mut last = 0;
    for (xr, yr) in f.x_rankers.iter().zip(&f.y_rankers) {
        let a = xr.eval(w)?;
        let b = yr.eval(w)?;
        if b > a || (!markers.is_empty() && b <= last) {
            return None;
        }
        last = a;
        markers.push((b, a));
    }
    Some(MarkedFactorization {
        word: w.to_vec(),
        n: f.n,
        markers,
        x_rankers: f.x_rankers.clone(),
        y_rankers: f.y_rankers.clone(),
    })
}

/// A subword of `u` with the same image under `mu` from which no factor can
/// be deleted without changing the image. Deletes the leftmost shortest
/// removable factor until none is left.
pub fn mu_minor(u: &[u8], mu: &MonoidMorphism) -> Vec<u8> {
    let mut v = u.to_vec();
    let target = mu.eval(&v);
    'outer: loop {
        for width in 1..=v.len() {
            for start in 0..=v.len() - width {
                let mut cand = v[..start].to_vec();
                cand.extend_from_slice(&v[start + width..]);
                if mu.eval(&cand) == target {
                    v = cand;
                    continue 'outer;
                }
            }
        }
        return v;
    }
}

/// Parses the plain word format: one word per line, an empty line is ε.
pub fn parse_word_list(text: &str) -> Result<Vec<Vec<u8>>, WordError> {
    let mut out = Vec::new();
    for line in text.lines() {
        let line = line.trim_end_matches('\r');
        for c in line.chars() {
            if !c.is_ascii_lowercase() {
                return Err(WordError::BadChar(c));
            }
        }
        out.push(line.as_bytes().to_vec());
    }
    Ok(out)
}

pub fn format_word_list(words: &[Vec<u8>]) -> String {
    let mut s = String::new();
    for w in words {
        s.push_str(std::str::from_utf8(w).unwrap());
        s.push('\n');
    }
    s
}

/// Shows a word, with `ε` for the empty one.
pub fn show(w: &[u8]) -> String {
    if w.is_empty() {
        "ε".to_string()
    } else {
        String::from_utf8_lossy(w).into_owned()
    }
}
