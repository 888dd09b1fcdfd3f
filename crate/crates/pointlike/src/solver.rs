//! Pointlikes and conelikes per level, brute-force oracles over relational
//! graphs, separator construction, and covering/separation decisions.

use std::sync::Arc;

use thiserror::Error;

use crate::monoid::{
    alphabetize, generate_submonoid, power_colours, ramsey_bound, relational_graph, ContentStructure,
    FiniteMonoid, MonoidError, MonoidMorphism, RamseySource, Relation, RelationalGraph, DEFAULT_SIZE_CAP,
};
use crate::rankers::{
    theorem_depth, ComparisonSet, DepthKind, Flavor, RankerAutomaton, RankerError, DEFAULT_CLASS_CAP,
    DEFAULT_TABLE_CAP,
};
use crate::saturation::{ConeFamily, Polarity, Saturator, Side, SubsetFamily};
use crate::set::{Antichain, ElemSet};
use crate::syntactic::{accepted_witnesses, syntactic_ordered_monoid, Dfa, SyntaxError};
use crate::varieties::{is_in, Level, VarietyError};
use crate::words::{Alphabet, LetterSet};

#[derive(Debug, Error)]
pub enum SolverError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Monoid(#[from] MonoidError),
    #[error(transparent)]
    Ranker(#[from] RankerError),
    #[error(transparent)]
    Variety(#[from] VarietyError),
    #[error("{0}")]
    Unsupported(String),
    #[error("{0}")]
    Infeasible(String),
}

impl SolverError {
    /// Whether the failure is a resource cap rather than bad input.
    pub fn is_resource(&self) -> bool {
        matches!(
            self,
            SolverError::Infeasible(_)
                | SolverError::Monoid(MonoidError::Resource(_))
                | SolverError::Ranker(RankerError::TooLarge { .. })
        )
    }
}

pub type Result<T> = std::result::Result<T, SolverError>;

/// Morphism into the transition monoid of the disjoint union of the DFAs,
/// i.e. the submonoid of the product of their syntactic monoids generated
/// by the letters. A single DFA yields its ordered syntactic monoid.
pub fn joint_morphism(dfas: &[&Dfa]) -> Result<MonoidMorphism> {
    let first = dfas.first().ok_or_else(|| SolverError::Unsupported("no languages given".into()))?;
    let alphabet = first.alphabet.clone();
    for d in dfas {
        if d.alphabet != alphabet {
            return Err(SyntaxError::AlphabetMismatch(alphabet.as_string(), d.alphabet.as_string()).into());
        }
    }
    if dfas.len() == 1 {
        return Ok(syntactic_ordered_monoid(first)?.morphism);
    }
    let mins: Vec<Dfa> = dfas.iter().map(|d| if d.minimal { (*d).clone() } else { d.minimize() }).collect();
    let mut offsets = Vec::new();
    let mut total = 0u32;
    for d in &mins {
        offsets.push(total);
        total += d.states() as u32;
    }
    let gens: Vec<Vec<u32>> = (0..alphabet.len())
        .map(|l| {
            mins.iter()
                .zip(&offsets)
                .flat_map(|(d, &o)| (0..d.states()).map(move |q| d.delta[q][l] as u32 + o))
                .collect()
        })
        .collect();
    let names: Vec<String> = alphabet.letters().iter().map(|&c| (c as char).to_string()).collect();
    let id: Vec<u32> = (0..total).collect();
    let g = generate_submonoid(id, &gens, &names, |f, h| f.iter().map(|&q| h[q as usize]).collect(), DEFAULT_SIZE_CAP)?;
    Ok(MonoidMorphism::new(alphabet, Arc::new(g.monoid), g.generators))
}

/// Saturations of one monoid, projected back from its alphabetization.
pub struct Solver {
    mu: MonoidMorphism,
    cs: Arc<ContentStructure>,
    sat: Saturator,
}

impl Solver {
    pub fn new(mu: &MonoidMorphism) -> Result<Self> {
        let mu = mu.onto_image()?;
        let cs = Arc::new(alphabetize(&mu)?);
        Ok(Solver { mu, sat: Saturator::new(cs.clone()), cs })
    }

    /// The morphism onto `M`, renamed by shortlex representatives.
    pub fn morphism(&self) -> &MonoidMorphism {
        &self.mu
    }

    pub fn monoid(&self) -> &Arc<FiniteMonoid> {
        self.mu.target()
    }

    pub fn alphabetized(&self) -> &Arc<ContentStructure> {
        &self.cs
    }

    pub fn saturator(&mut self) -> &mut Saturator {
        &mut self.sat
    }

    /// The saturation over `M'` whose projection gives the pointlikes.
    pub fn saturation(&mut self, level: Level) -> Result<SubsetFamily> {
        Ok(match level {
            Level::J1 | Level::R(1) | Level::L(1) | Level::RcapL(1) => self.sat.sat_j1(),
            Level::J => self.sat.sat_j(),
            Level::R(m) => self.sat.sat_corner(Side::R, m),
            Level::L(m) => self.sat.sat_corner(Side::L, m),
            Level::FO2(m) => self.sat.sat_fo(m + 1),
            Level::RcapL(m) => self.sat.sat_fo(m),
            Level::RvL(m) => self.sat.sat_sp(m),
            Level::DA => return Err(SolverError::Unsupported("pointlikes for DA are not computed".into())),
            Level::Si(_) | Level::Pi(_) => {
                return Err(SolverError::Unsupported(format!("{level} is a positive level; use conelikes")))
            }
        })
    }

    pub fn pointlikes(&mut self, level: Level) -> Result<SubsetFamily> {
        let f = self.saturation(level)?;
        Ok(f.project(&self.cs))
    }

    /// Conelikes over `M`; for unordered levels `(s, S)` with `S` pointlike
    /// and `s ∈ S`.
    pub fn conelikes(&mut self, level: Level) -> Result<ConeFamily> {
        match level {
            Level::Si(m) => Ok(self.sat.psat(Polarity::Si, m).project(&self.cs)),
            Level::Pi(m) => Ok(self.sat.psat(Polarity::Pi, m).project(&self.cs)),
            _ => Ok(ConeFamily::from_pointlikes(&self.pointlikes(level)?)),
        }
    }
}

/// Exact pointlikes with respect to a relational graph: the sets `τ⁻¹(x)`.
pub fn brute_pointlikes(g: &RelationalGraph) -> SubsetFamily {
    let mut a = Antichain::new();
    for s in 0..g.left_size {
        a.insert(ElemSet::singleton(g.left_size, s));
    }
    for x in &g.tau_inv {
        if !x.is_empty() {
            a.insert(x.clone());
        }
    }
    SubsetFamily::from_antichain(g.left_size, a)
}

/// Exact conelikes: `(s, τ⁻¹(↑x))` for `x ∈ τ(s)`, with `↑` taken in
/// `order` on the right-hand side.
pub fn brute_conelikes(g: &RelationalGraph, order: &Relation) -> ConeFamily {
    let n = g.left_size;
    let ups: Vec<ElemSet> = (0..g.right_size)
        .map(|x| {
            let mut s = ElemSet::empty(n);
            for y in order.up(x).iter() {
                s.union_with(&g.tau_inv[y]);
            }
            s
        })
        .collect();
    let mut pairs = Vec::new();
    for s in 0..n {
        for x in g.tau[s].iter() {
            pairs.push((s, ups[x].clone()));
        }
    }
    ConeFamily::from_pairs(n, pairs)
}

/// Which monoid serves as separator for a level. Ranker indices are
/// shifted so that the constructed monoid verifies in the level:
/// `N^{XX}_{m,n}` lies in `R(m+1)`, `N^{XX∪YY}_{m,n}` in `FO2(m+1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeparatorKind {
    Trivial,
    /// `J_A`, the content monoid.
    Content,
    Flavored(Flavor, usize),
}

pub fn separator_kind(level: Level) -> Result<SeparatorKind> {
    use SeparatorKind::*;
    Ok(match level {
        Level::J1 | Level::R(1) | Level::L(1) | Level::RcapL(1) => Content,
        Level::RvL(1) => Trivial,
        Level::R(m) => Flavored(Flavor::XX, m - 1),
        Level::L(m) => Flavored(Flavor::YY, m - 1),
        Level::J | Level::FO2(1) | Level::RcapL(2) => Flavored(Flavor::XYuYX, 1),
        Level::FO2(m) | Level::RvL(m) => Flavored(Flavor::XXuYY, m - 1),
        Level::RcapL(m) => Flavored(Flavor::XXuYY, m - 2),
        Level::Si(m) => Flavored(if m % 2 == 1 { Flavor::XY } else { Flavor::YX }, m),
        Level::Pi(m) => Flavored(if m % 2 == 1 { Flavor::YX } else { Flavor::XY }, m),
        Level::DA => return Err(SolverError::Unsupported("no separator for DA".into())),
    })
}

/// The depth `n` the main theorem prescribes for `M` of the given size.
pub fn theorem_n(level: Level, alphabet_size: usize, monoid_size: usize) -> Result<Option<u64>> {
    let a = alphabet_size as u64;
    let kind = match level {
        Level::Si(1) | Level::Pi(1) => DepthKind::Level1Cone,
        Level::J | Level::FO2(1) | Level::RcapL(2) => DepthKind::J,
        Level::R(m) | Level::L(m) if m >= 2 => DepthKind::Corner,
        Level::FO2(_) | Level::RcapL(_) | Level::RvL(_) | Level::Si(_) | Level::Pi(_) => DepthKind::Join,
        _ => return Ok(None),
    };
    if matches!(level, Level::RcapL(1) | Level::RvL(1)) {
        return Ok(None);
    }
    let overflow = || SolverError::Infeasible(format!("theorem depth for {level} overflows"));
    let r = match kind {
        DepthKind::Level1Cone | DepthKind::J => ramsey_bound(monoid_size as u64, RamseySource::default()),
        _ => power_colours(monoid_size).and_then(|k| ramsey_bound(k, RamseySource::default())),
    }
    .map_err(|_| overflow())?;
    let m = level.index().unwrap_or(1) as u64;
    theorem_depth(kind, a, m, r).map(Some).ok_or_else(overflow)
}

/// Largest number of rankers of length `<= n` a separator may enumerate.
pub const RANKER_BUDGET: u64 = 50_000;

fn check_budget(alphabet_size: usize, n: u64) -> Result<()> {
    let base = 2 * alphabet_size as u64;
    let mut total: u64 = 0;
    let mut p: u64 = 1;
    for _ in 0..n {
        p = p.saturating_mul(base);
        total = total.saturating_add(p);
        if total > RANKER_BUDGET {
            return Err(SolverError::Infeasible(format!(
                "separator depth n = {n} needs more than {RANKER_BUDGET} rankers; pass a smaller depth"
            )));
        }
    }
    Ok(())
}

/// A separator monoid with its morphism from `A*`, ordered when the
/// construction carries an order.
#[derive(Clone, Debug)]
pub struct Separator {
    pub label: String,
    pub morphism: MonoidMorphism,
    /// Built below the depth the main theorem requires.
    pub sub_theorem: bool,
}

impl Separator {
    pub fn monoid(&self) -> &Arc<FiniteMonoid> {
        self.morphism.target()
    }

    pub fn order(&self) -> Relation {
        self.monoid().order().cloned().unwrap_or_else(|| Relation::equality(self.monoid().size()))
    }

    pub fn graph(&self, mu: &MonoidMorphism) -> Result<RelationalGraph> {
        Ok(relational_graph(mu, &self.morphism, DEFAULT_SIZE_CAP)?)
    }
}

pub fn content_monoid(alphabet: &Alphabet) -> Result<MonoidMorphism> {
    let gens: Vec<LetterSet> = alphabet.letters().iter().map(|&c| LetterSet::of(c)).collect();
    let names: Vec<String> = alphabet.letters().iter().map(|&c| (c as char).to_string()).collect();
    let g = generate_submonoid(LetterSet::EMPTY, &gens, &names, |a, b| a.union(*b), DEFAULT_SIZE_CAP)?;
    Ok(MonoidMorphism::new(alphabet.clone(), Arc::new(g.monoid), g.generators))
}

pub fn flavored_morphism(flavor: Flavor, m: usize, n: usize, alphabet: &Alphabet) -> Result<MonoidMorphism> {
    check_budget(alphabet.len(), n as u64)?;
    let set = ComparisonSet::flavored(flavor, m, n, alphabet)?;
    let aut = RankerAutomaton::build(Arc::new(set), DEFAULT_CLASS_CAP)?;
    Ok(aut.to_monoid(DEFAULT_TABLE_CAP)?.morphism)
}

/// Builds the separator of a kind at depth `n`.
pub fn build_separator(kind: SeparatorKind, n: usize, alphabet: &Alphabet) -> Result<Separator> {
    let (label, morphism) = match kind {
        SeparatorKind::Trivial => {
            let t = Arc::new(FiniteMonoid::trivial());
            ("trivial".to_string(), MonoidMorphism::new(alphabet.clone(), t, vec![0; alphabet.len()]))
        }
        SeparatorKind::Content => ("J_A".to_string(), content_monoid(alphabet)?),
        SeparatorKind::Flavored(f, m) => (format!("N^{f}_{{{m},{n}}}"), flavored_morphism(f, m, n, alphabet)?),
    };
    let morphism = if morphism.target().is_ordered() {
        morphism
    } else {
        let t = morphism.target();
        let ordered = (**t).clone().with_order(Relation::equality(t.size()))?;
        MonoidMorphism::new(alphabet.clone(), Arc::new(ordered), morphism.images().to_vec())
    };
    Ok(Separator { label, morphism, sub_theorem: false })
}

/// The separator for `level` and `M`: at the theorem's depth, or at
/// `depth` when given (then marked sub-theorem unless it reaches it).
pub fn separator(level: Level, alphabet: &Alphabet, monoid_size: usize, depth: Option<usize>) -> Result<Separator> {
    let kind = separator_kind(level)?;
    let needed = match kind {
        SeparatorKind::Trivial | SeparatorKind::Content => None,
        _ => theorem_n(level, alphabet.len(), monoid_size).ok().flatten(),
    };
    let n = match (depth, needed, kind) {
        (_, _, SeparatorKind::Trivial | SeparatorKind::Content) => 1,
        (Some(d), _, _) => d,
        (None, Some(t), _) => {
            check_budget(alphabet.len(), t)?;
            t as usize
        }
        (None, None, _) => {
            return Err(SolverError::Infeasible(format!(
                "theorem depth for {level} with |M| = {monoid_size} is too large to represent; pass a smaller depth"
            )))
        }
    };
    let mut sep = build_separator(kind, n, alphabet)?;
    sep.sub_theorem = match kind {
        SeparatorKind::Trivial | SeparatorKind::Content => false,
        _ => needed.is_none_or(|t| (n as u64) < t),
    };
    Ok(sep)
}

/// One language of a cover instance with the words witnessing each element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub language: usize,
    pub element: usize,
    pub word: Vec<u8>,
}

/// Evidence that `(L, 𝐋)` is not coverable: a conelike `(s, S)` with a
/// word of `L` mapping to `s` and, per `L'`, a word mapping into `S`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub s: usize,
    pub set: ElemSet,
    pub target: Witness,
    pub others: Vec<Witness>,
}

#[derive(Clone, Debug)]
pub struct CoverResult {
    pub coverable: bool,
    pub certificate: Option<Certificate>,
    pub morphism: MonoidMorphism,
}

/// Decides whether `target` is coverable by languages of `level` each
/// disjoint from some member of `others`.
pub fn decide_cover(level: Level, target: &Dfa, others: &[Dfa]) -> Result<CoverResult> {
    let mut all: Vec<&Dfa> = vec![target];
    all.extend(others.iter());
    let mu = joint_morphism(&all)?;
    let mut solver = Solver::new(&mu)?;
    let cones = solver.conelikes(level)?;
    let mu = solver.morphism().clone();
    let wit: Vec<Vec<Option<Vec<u8>>>> =
        all.iter().map(|d| accepted_witnesses(d, &mu)).collect::<std::result::Result<_, _>>()?;
    for s in 0..mu.target().size() {
        let Some(w) = &wit[0][s] else { continue };
        let mut candidates = cones.entries(s).to_vec();
        if candidates.is_empty() {
            candidates.push(ElemSet::singleton(mu.target().size(), s));
        }
        for set in candidates {
            let found: Option<Vec<Witness>> = (1..all.len())
                .map(|i| {
                    set.iter()
                        .find_map(|x| wit[i][x].as_ref().map(|v| Witness { language: i, element: x, word: v.clone() }))
                })
                .collect();
            if let Some(others) = found {
                let target = Witness { language: 0, element: s, word: w.clone() };
                let certificate = Certificate { s, set, target, others };
                return Ok(CoverResult { coverable: false, certificate: Some(certificate), morphism: mu });
            }
        }
    }
    Ok(CoverResult { coverable: true, certificate: None, morphism: mu })
}

/// Re-checks a certificate against the languages and the morphism.
pub fn replay_certificate(c: &Certificate, mu: &MonoidMorphism, target: &Dfa, others: &[Dfa]) -> bool {
    let ok = |w: &Witness, d: &Dfa| d.accepts(&w.word) && mu.eval(&w.word) == w.element;
    c.target.element == c.s
        && ok(&c.target, target)
        && c.others.len() == others.len()
        && c.others.iter().zip(others).enumerate().all(|(i, (w, d))| {
            w.language == i + 1 && ok(w, d) && c.set.contains(w.element)
        })
}

/// Whether `l` is separable from `l2` by a language of `level`.
pub fn decide_separation(level: Level, l: &Dfa, l2: &Dfa) -> Result<bool> {
    Ok(decide_cover(level, l, std::slice::from_ref(l2))?.coverable)
}

/// Whether the language of `d` lies in `level`.
pub fn membership(level: Level, d: &Dfa) -> Result<bool> {
    let r = syntactic_ordered_monoid(d)?;
    Ok(is_in(level, r.monoid())?)
}
