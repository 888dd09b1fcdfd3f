//! Membership of (ordered) finite monoids in the hierarchy levels.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Mutex, OnceLock};

use thiserror::Error;

use crate::monoid::{quotient, FiniteMonoid, Green, Relation, StablePreorder};
use crate::set::ElemSet;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VarietyError {
    #[error("level {0} needs an ordered monoid")]
    MissingOrder(Level),
    #[error("unknown level {0:?}")]
    BadLevel(String),
    #[error("level index must be between 1 and {MAX_LEVEL}, got {0}")]
    IndexOutOfRange(usize),
    #[error("bad ω-term at offset {0}: {1}")]
    Term(usize, String),
    #[error("too many interpretations ({0} variables over {1} elements)")]
    TooMany(usize, usize),
}

pub const MAX_LEVEL: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Level {
    J1,
    J,
    DA,
    R(usize),
    L(usize),
    RvL(usize),
    RcapL(usize),
    FO2(usize),
    Si(usize),
    Pi(usize),
}

impl Level {
    pub fn index(self) -> Option<usize> {
        match self {
            Level::J1 | Level::J | Level::DA => None,
            Level::R(m)
            | Level::L(m)
            | Level::RvL(m)
            | Level::RcapL(m)
            | Level::FO2(m)
            | Level::Si(m)
            | Level::Pi(m) => Some(m),
        }
    }

    /// Levels whose membership depends on the order.
    pub fn needs_order(self) -> bool {
        matches!(self, Level::RvL(_) | Level::Si(_) | Level::Pi(_))
    }

    /// Levels answered by cones rather than pointlikes.
    pub fn is_positive(self) -> bool {
        matches!(self, Level::Si(_) | Level::Pi(_))
    }

    /// Every level up to the given index, in a fixed order.
    pub fn all_up_to(m: usize) -> Vec<Level> {
        let mut v = vec![Level::J1, Level::J, Level::DA];
        for i in 1..=m {
            v.extend([
                Level::R(i),
                Level::L(i),
                Level::RcapL(i),
                Level::RvL(i),
                Level::FO2(i),
                Level::Si(i),
                Level::Pi(i),
            ]);
        }
        v
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Level::J1 => write!(f, "J1"),
            Level::J => write!(f, "J"),
            Level::DA => write!(f, "DA"),
            Level::R(m) => write!(f, "R{m}"),
            Level::L(m) => write!(f, "L{m}"),
            Level::RvL(m) => write!(f, "RvL{m}"),
            Level::RcapL(m) => write!(f, "RcapL{m}"),
            Level::FO2(m) => write!(f, "FO2_{m}"),
            Level::Si(m) => write!(f, "Si{m}"),
            Level::Pi(m) => write!(f, "Pi{m}"),
        }
    }
}

impl FromStr for Level {
    type Err = VarietyError;

    fn from_str(s: &str) -> Result<Level, VarietyError> {
        match s {
            "J1" => return Ok(Level::J1),
            "J" => return Ok(Level::J),
            "DA" => return Ok(Level::DA),
            _ => {}
        }
        let bad = || VarietyError::BadLevel(s.to_string());
        let (tag, num) = if let Some(rest) = s.strip_prefix("FO2_") {
            ("FO2", rest)
        } else {
            let split = s.find(|c: char| c.is_ascii_digit()).ok_or_else(bad)?;
            s.split_at(split)
        };
        if num.starts_with('0') {
            return Err(bad());
        }
        let m: usize = num.parse().map_err(|_| bad())?;
        if m == 0 || m > MAX_LEVEL {
            return Err(VarietyError::IndexOutOfRange(m));
        }
        Ok(match tag {
            "R" => Level::R(m),
            "L" => Level::L(m),
            "RvL" => Level::RvL(m),
            "RcapL" => Level::RcapL(m),
            "FO2" => Level::FO2(m),
            "Si" => Level::Si(m),
            "Pi" => Level::Pi(m),
            _ => return Err(bad()),
        })
    }
}

/// An ω-term over variables `a`..`z`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OmegaTerm {
    Var(u8),
    One,
    Mul(Box<OmegaTerm>, Box<OmegaTerm>),
    Omega(Box<OmegaTerm>),
}

impl OmegaTerm {
    /// Syntax: letters are variables, `1` the unit, juxtaposition the
    /// product, postfix `^w` (or `^ω`) the ω-power.
    pub fn parse(text: &str) -> Result<OmegaTerm, VarietyError> {
        let chars: Vec<char> = text.chars().filter(|c| !c.is_whitespace()).collect();
        let mut pos = 0;
        let t = Self::product(&chars, &mut pos)?;
        if pos != chars.len() {
            return Err(VarietyError::Term(pos, format!("unexpected {:?}", chars[pos])));
        }
        Ok(t)
    }

    fn product(c: &[char], pos: &mut usize) -> Result<OmegaTerm, VarietyError> {
        let mut t = Self::factor(c, pos)?;
        while *pos < c.len() && c[*pos] != ')' {
            t = OmegaTerm::Mul(Box::new(t), Box::new(Self::factor(c, pos)?));
        }
        Ok(t)
    }

    fn factor(c: &[char], pos: &mut usize) -> Result<OmegaTerm, VarietyError> {
        let mut t = match c.get(*pos) {
            Some(&ch) if ch.is_ascii_lowercase() => {
                *pos += 1;
                OmegaTerm::Var(ch as u8)
            }
            Some('1') => {
                *pos += 1;
                OmegaTerm::One
            }
            Some('(') => {
                *pos += 1;
                let t = Self::product(c, pos)?;
                if c.get(*pos) != Some(&')') {
                    return Err(VarietyError::Term(*pos, "expected ')'".into()));
                }
                *pos += 1;
                t
            }
            other => return Err(VarietyError::Term(*pos, format!("unexpected {other:?}"))),
        };
        while c.get(*pos) == Some(&'^') {
            match c.get(*pos + 1) {
                Some('w') | Some('ω') => {
                    *pos += 2;
                    t = OmegaTerm::Omega(Box::new(t));
                }
                _ => return Err(VarietyError::Term(*pos + 1, "expected ω after '^'".into())),
            }
        }
        Ok(t)
    }

    pub fn variables(&self) -> Vec<u8> {
        let mut v = Vec::new();
        self.collect(&mut v);
        v.sort_unstable();
        v.dedup();
        v
    }

    fn collect(&self, out: &mut Vec<u8>) {
        match self {
            OmegaTerm::Var(x) => out.push(*x),
            OmegaTerm::One => {}
            OmegaTerm::Mul(a, b) => {
                a.collect(out);
                b.collect(out);
            }
            OmegaTerm::Omega(a) => a.collect(out),
        }
    }

    pub fn eval(&self, m: &FiniteMonoid, chi: &dyn Fn(u8) -> usize) -> usize {
        match self {
            OmegaTerm::Var(x) => chi(*x),
            OmegaTerm::One => m.identity(),
            OmegaTerm::Mul(a, b) => m.mul(a.eval(m, chi), b.eval(m, chi)),
            OmegaTerm::Omega(a) => m.omega_power(a.eval(m, chi)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IdentityRel {
    Eq,
    Leq,
}

/// Whether `lhs rel rhs` under every assignment of the variables.
pub fn check_identity(
    m: &FiniteMonoid,
    lhs: &OmegaTerm,
    rhs: &OmegaTerm,
    rel: IdentityRel,
) -> Result<bool, VarietyError> {
    if rel == IdentityRel::Leq && !m.is_ordered() {
        return Err(VarietyError::BadLevel("'≤' identity on an unordered monoid".into()));
    }
    let mut vars = lhs.variables();
    vars.extend(rhs.variables());
    vars.sort_unstable();
    vars.dedup();
    let k = vars.len();
    let n = m.size();
    let total = (n as u128).checked_pow(k as u32).filter(|&t| t <= 100_000_000);
    if total.is_none() {
        return Err(VarietyError::TooMany(k, n));
    }
    let mut assign = vec![0usize; k];
    loop {
        let chi = |x: u8| assign[vars.binary_search(&x).unwrap()];
        let (a, b) = (lhs.eval(m, &chi), rhs.eval(m, &chi));
        let ok = match rel {
            IdentityRel::Eq => a == b,
            IdentityRel::Leq => m.leq(a, b),
        };
        if !ok {
            return Ok(false);
        }
        // odometer
        let mut i = 0;
        loop {
            if i == k {
                return Ok(true);
            }
            assign[i] += 1;
            if assign[i] < n {
                break;
            }
            assign[i] = 0;
            i += 1;
        }
    }
}

/// `∼K`: class index per element.
pub fn k_congruence(m: &FiniteMonoid) -> Vec<usize> {
    side_congruence(m, true)
}

/// `∼D`: class index per element.
pub fn d_congruence(m: &FiniteMonoid) -> Vec<usize> {
    side_congruence(m, false)
}

fn side_congruence(m: &FiniteMonoid, left: bool) -> Vec<usize> {
    let g = Green::new(m);
    let idems = m.idempotents();
    let sentinel = usize::MAX;
    let keys: Vec<Vec<usize>> = (0..m.size())
        .map(|s| {
            idems
                .iter()
                .map(|&e| {
                    let x = if left { m.mul(e, s) } else { m.mul(s, e) };
                    if g.j_eq(x, e) {
                        x
                    } else {
                        sentinel
                    }
                })
                .collect()
        })
        .collect();
    classes_by_key(&keys)
}

fn classes_by_key<K: std::hash::Hash + Eq>(keys: &[K]) -> Vec<usize> {
    let mut index: HashMap<&K, usize> = HashMap::new();
    keys.iter()
        .map(|k| {
            let len = index.len();
            *index.entry(k).or_insert(len)
        })
        .collect()
}

/// Join of `∼K` and `∼D`, classes numbered by least member.
pub fn kd_congruence(m: &FiniteMonoid) -> Vec<usize> {
    let n = m.size();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let nx = p[y];
            p[y] = r;
            y = nx;
        }
        r
    }
    for cls in [k_congruence(m), d_congruence(m)] {
        let mut first: HashMap<usize, usize> = HashMap::new();
        for (s, &c) in cls.iter().enumerate() {
            let f = *first.entry(c).or_insert(s);
            let (a, b) = (find(&mut parent, f), find(&mut parent, s));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let roots: Vec<usize> = (0..n).map(|s| find(&mut parent, s)).collect();
    classes_by_key(&roots)
}

/// `⪯KD` as a stable preorder.
pub fn kd_preorder(m: &FiniteMonoid) -> StablePreorder {
    let n = m.size();
    let g = Green::new(m);
    // (i): for each x, ys[x][s] = {y : x R xsy}
    let ys: Vec<Vec<ElemSet>> = crate::par::map_range(n, |x| {
        (0..n)
            .map(|s| {
                let xs = m.mul(x, s);
                ElemSet::from_iter(n, (0..n).filter(|&y| g.r_eq(x, m.mul(xs, y))))
            })
            .collect()
    });
    // (ii): for each y, xs[y][s] = {x : xsy L y}
    let xs: Vec<Vec<ElemSet>> = crate::par::map_range(n, |y| {
        (0..n)
            .map(|s| {
                let sy = m.mul(s, y);
                ElemSet::from_iter(n, (0..n).filter(|&x| g.l_eq(m.mul(x, sy), y)))
            })
            .collect()
    });
    let rows: Vec<Vec<bool>> = crate::par::map_range(n, |s| {
        (0..n)
            .map(|t| {
                (0..n).all(|x| ys[x][t].is_subset(&ys[x][s]))
                    && (0..n).all(|y| xs[y][t].is_subset(&xs[y][s]))
                    && (0..n).filter(|&x| g.r_eq(x, m.mul(x, t))).all(|x| {
                        let (xs_, xt) = (m.mul(x, s), m.mul(x, t));
                        (0..n)
                            .filter(|&y| g.l_eq(m.mul(t, y), y))
                            .all(|y| m.leq(m.mul(xs_, y), m.mul(xt, y)))
                    })
            })
            .collect()
    });
    let rel = Relation::from_fn(n, |s, t| rows[s][t]);
    StablePreorder::new(m, rel).expect("⪯KD is a stable preorder")
}

fn memo() -> &'static Mutex<HashMap<(Level, Vec<u32>), bool>> {
    static MEMO: OnceLock<Mutex<HashMap<(Level, Vec<u32>), bool>>> = OnceLock::new();
    MEMO.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Membership by quotient descent, memoized on the exact table.
pub fn is_in(level: Level, m: &FiniteMonoid) -> Result<bool, VarietyError> {
    if let Some(i) = level.index() {
        if i == 0 || i > MAX_LEVEL {
            return Err(VarietyError::IndexOutOfRange(i));
        }
    }
    if level.needs_order() && !m.is_ordered() {
        return Err(VarietyError::MissingOrder(level));
    }
    let key = (level, m.cache_key());
    if let Some(&v) = memo().lock().unwrap().get(&key) {
        return Ok(v);
    }
    let v = decide(level, m)?;
    memo().lock().unwrap().insert(key, v);
    Ok(v)
}

fn unordered(m: &FiniteMonoid) -> FiniteMonoid {
    m.clone().without_order()
}

fn decide(level: Level, m: &FiniteMonoid) -> Result<bool, VarietyError> {
    Ok(match level {
        Level::J1 => (0..m.size()).all(|s| {
            m.is_idempotent(s) && (0..m.size()).all(|t| m.mul(s, t) == m.mul(t, s))
        }),
        Level::J => Green::new(m).is_j_trivial(),
        // e ≤J s ⇒ ese = e for idempotent e; equivalent to the identity
        // (xzy)^ω = (xzy)^ω z (xzy)^ω, which the tests check directly
        Level::DA => {
            let g = Green::new(m);
            m.idempotents()
                .into_iter()
                .all(|e| (0..m.size()).filter(|&s| g.j_le(e, s)).all(|s| m.mul(m.mul(e, s), e) == e))
        }
        Level::R(1) | Level::L(1) => is_in(Level::J1, &unordered(m))?,
        Level::R(k) => {
            let u = unordered(m);
            let p = StablePreorder::from_partition(&u, &k_congruence(&u)).expect("∼K is a congruence");
            is_in(Level::L(k - 1), &quotient(&u, &p).0.without_order())?
        }
        Level::L(k) => {
            let u = unordered(m);
            let p = StablePreorder::from_partition(&u, &d_congruence(&u)).expect("∼D is a congruence");
            is_in(Level::R(k - 1), &quotient(&u, &p).0.without_order())?
        }
        Level::RcapL(k) => is_in(Level::R(k), m)? && is_in(Level::L(k), m)?,
        Level::FO2(k) => is_in(Level::R(k + 1), m)? && is_in(Level::L(k + 1), m)?,
        Level::RvL(k) => is_in(Level::Si(k), m)? && is_in(Level::Pi(k), m)?,
        Level::Si(1) => (0..m.size()).all(|z| m.leq(m.identity(), z)),
        Level::Si(k) => is_in(Level::Si(k - 1), &quotient(m, &kd_preorder(m)).0)?,
        Level::Pi(k) => is_in(Level::Si(k), &m.dual_order())?,
    })
}

/// `α(t) ⊆ α(s) ⇒ s^ω t s^ω = s^ω` for all `s, t`. With the inclusion the
/// other way round the property already fails at `s = 1`.
pub fn da_content_property(m: &FiniteMonoid, content: &[crate::words::LetterSet]) -> bool {
    (0..m.size()).all(|s| {
        let e = m.omega_power(s);
        (0..m.size()).filter(|&t| content[t].is_subset(content[s])).all(|t| m.mul(m.mul(e, t), e) == e)
    })
}
