//! Shared fixtures: a corpus of small languages over `{a, b}` and a pool of
//! separator monoids checked for membership in each level.
#![allow(dead_code)]

pub mod props;

use std::sync::OnceLock;

use pointlike::rankers::Flavor;
use pointlike::solver::{build_separator, joint_morphism, Separator, SeparatorKind};
use pointlike::syntactic::{compile_min_dfa, parse_regex, Dfa};
use pointlike::varieties::{is_in, Level};
use pointlike::words::Alphabet;

/// Regexes whose syntactic monoids have at most 12 elements.
pub const CORPUS: &[&str] = &[
    "(ab)+",
    "a*",
    "a*b*",
    "(a|b)*a(a|b)*",
    "(a|b)*a(a|b)*b(a|b)*",
    "(a|b)*ab(a|b)*",
    "a(a|b)*",
    "(a|b)*b",
    "(ab)*",
    "b(ab)*",
    "(ab)*a",
    "a*ba*",
    "((a|b)(a|b))*",
    "a+b+",
    "(a|b)*aa(a|b)*",
    "~((a|b)*aa(a|b)*)",
    "b*ab*ab*",
    "(a|b)*a(a|b)",
    "a(a|b)*b",
    "(a|b)*b(a|b)*a(a|b)*",
    "(aa)*",
    "a*b*a*",
    "1|a",
    "0",
    "(a|b)*",
    "(a|b)*a(a|b)*b(a|b)*a(a|b)*",
    "(a*b)*",
    "a*(ba*)?",
    "~(a*)&~(b*)",
    "(a|b)*ab",
    "ab(a|b)*",
    "b*(ab*ab*)*",
    "(a|bb)*",
];

pub fn ab() -> Alphabet {
    Alphabet::new("ab").unwrap()
}

pub fn dfa(regex: &str) -> Dfa {
    compile_min_dfa(&parse_regex(regex).unwrap(), &ab()).unwrap()
}

/// Levels with index at most `m`, DA excluded.
pub fn levels(m: usize) -> Vec<Level> {
    Level::all_up_to(m).into_iter().filter(|l| *l != Level::DA).collect()
}

pub fn corpus_size_ok() -> bool {
    CORPUS.iter().all(|r| joint_morphism(&[&dfa(r)]).unwrap().target().size() <= 12)
}

/// Separators larger than this are skipped: the ⪯KD check is quartic.
pub const POOL_SIZE_CAP: usize = 320;

/// Every separator buildable at `m <= 2`, `n <= 3` within the default caps.
pub fn separator_pool() -> &'static Vec<Separator> {
    static POOL: OnceLock<Vec<Separator>> = OnceLock::new();
    POOL.get_or_init(|| {
        let mut kinds = vec![SeparatorKind::Trivial, SeparatorKind::Content];
        for m in 1..=2 {
            for f in [Flavor::XX, Flavor::YY, Flavor::XY, Flavor::YX, Flavor::XXuYY, Flavor::XYuYX, Flavor::RR1] {
                kinds.push(SeparatorKind::Flavored(f, m));
            }
        }
        let mut out: Vec<Separator> = Vec::new();
        for k in kinds {
            let ns: &[usize] = if matches!(k, SeparatorKind::Trivial | SeparatorKind::Content) { &[1] } else { &[1, 2, 3] };
            for &n in ns {
                let Ok(s) = build_separator(k, n, &ab()) else { continue };
                if s.monoid().size() > POOL_SIZE_CAP {
                    continue;
                }
                if out.iter().any(|o| o.monoid().cache_key() == s.monoid().cache_key() && o.morphism.images() == s.morphism.images()) {
                    continue;
                }
                out.push(s);
            }
        }
        out
    })
}

/// Pool members verified in `level`.
pub fn verified(level: Level) -> Vec<&'static Separator> {
    separator_pool().iter().filter(|s| is_in(level, s.monoid()).unwrap_or(false)).collect()
}
