//! Command-line front end. Every verb is a thin shim over a library call;
//! `run` returns the exit code and the text so tests can compare both.

use std::fmt::Write as _;

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::monoid::egg_box;
use crate::par;
use crate::rankers::{ComparisonSet, Flavor, Ranker, RankerAutomaton, RankerError, DEFAULT_CLASS_CAP, DEFAULT_TABLE_CAP};
use crate::saturation::{ConeFamily, SubsetFamily};
use crate::solver::{
    brute_conelikes, brute_pointlikes, decide_cover, joint_morphism, membership, separator, Certificate, Solver,
    SolverError,
};
use crate::syntactic::{compile_min_dfa, parse_regex, Dfa, SyntaxError};
use crate::varieties::{is_in, Level, VarietyError};
use crate::words::{alph, rl_factorize_word, show, Alphabet, LetterSet, WordError};
use crate::monoid::FiniteMonoid;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "pointlike",
    version,
    about = "Membership, separation and covering for the Trotter-Weil and FO2 alternation hierarchies",
    after_help = "Levels: J1, J, DA, Rm, Lm, RvLm, RcapLm, FO2_m, Sim, Pim (m = 1..6).\n\
Languages: a regex over lowercase letters with | & ~ * + ? and parentheses,\n\
1 or ε for the empty word, 0 or ∅ for the empty language; or @FILE with a DFA\n\
in the text format printed by `monoid --dfa`."
)]
pub struct Cli {
    /// Ambient alphabet; defaults to the letters of the arguments.
    #[arg(long, global = true)]
    alphabet: Option<String>,
    /// Separator depth below the theorem's; results are labeled sub-theorem.
    #[arg(long, global = true)]
    depth: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Worker threads; 1 runs sequentially.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Tsv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// YES if the language belongs to the level.
    Membership { level: String, language: String },
    /// SEPARABLE if a language of the level contains L and avoids L2.
    Separate { level: String, l: String, l2: String },
    /// COVERABLE if L is covered by languages of the level each avoiding one of the others.
    Cover {
        level: String,
        l: String,
        #[arg(required = true)]
        others: Vec<String>,
    },
    /// Maximal pointlike sets of the joint syntactic monoid.
    Pointlikes {
        level: String,
        #[arg(required = true)]
        languages: Vec<String>,
    },
    /// Maximal conelike pairs of the joint syntactic monoid.
    Conelikes {
        level: String,
        #[arg(required = true)]
        languages: Vec<String>,
    },
    /// Syntactic monoid: elements, table, order and egg-box.
    Monoid {
        #[arg(required = true)]
        languages: Vec<String>,
        /// Print the minimal DFA of the first language instead.
        #[arg(long)]
        dfa: bool,
    },
    /// Position a ranker such as "Xa Yb" selects in a word, or "undefined".
    RankerEval { ranker: String, word: String },
    /// Size of a flavored ranker monoid and its membership in given levels.
    RankerMonoid {
        flavor: String,
        m: usize,
        n: usize,
        /// Levels to test, comma separated.
        #[arg(long, value_delimiter = ',')]
        levels: Vec<String>,
    },
    /// Marker factorization of a word at parameter n.
    Factorize { word: String, n: usize },
}

#[derive(Debug, Error)]
enum CliError {
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("{0}")]
    Input(String),
}

impl From<SyntaxError> for CliError {
    fn from(e: SyntaxError) -> Self {
        CliError::Solver(e.into())
    }
}

impl From<VarietyError> for CliError {
    fn from(e: VarietyError) -> Self {
        CliError::Solver(e.into())
    }
}

impl From<RankerError> for CliError {
    fn from(e: RankerError) -> Self {
        CliError::Solver(e.into())
    }
}

impl From<WordError> for CliError {
    fn from(e: WordError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Solver(e) if e.is_resource() => EXIT_RESOURCE,
            _ => EXIT_INPUT,
        }
    }
}

/// Parses and runs; returns the exit code, stdout text and stderr text.
pub fn run<I, T>(args: I) -> (i32, String, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK { (code, text, String::new()) } else { (code, String::new(), text) };
        }
    };
    par::set_sequential(matches!(cli.jobs, Some(j) if j <= 1));
    if let Some(j) = cli.jobs.filter(|&j| j > 1) {
        par::set_jobs(j);
    }
    match execute(&cli) {
        Ok(out) => (EXIT_OK, out, String::new()),
        Err(e) => (e.code(), String::new(), format!("error: {e}\n")),
    }
}

fn level(s: &str) -> Result<Level, CliError> {
    s.parse::<Level>().map_err(|e| CliError::Input(e.to_string()))
}

/// The declared alphabet, or the letters of the regex arguments.
fn alphabet_for(cli: &Cli, langs: &[&String]) -> Result<Alphabet, CliError> {
    if let Some(a) = &cli.alphabet {
        return Ok(Alphabet::new(a)?);
    }
    let mut set = LetterSet::EMPTY;
    for l in langs {
        if l.starts_with('@') {
            return Err(CliError::Input("--alphabet is required with @file languages".into()));
        }
        set = set.union(parse_regex(l)?.letters());
    }
    if set.is_empty() {
        return Err(CliError::Input("cannot infer an alphabet; pass --alphabet".into()));
    }
    Ok(Alphabet::from_set(set)?)
}

/// A regex or `@file` in the DFA text format.
pub fn load_language(arg: &str, alphabet: &Alphabet) -> Result<Dfa, SolverError> {
    if let Some(path) = arg.strip_prefix('@') {
        let text = std::fs::read_to_string(path)
            .map_err(|e| SolverError::Unsupported(format!("cannot read {path}: {e}")))?;
        Ok(Dfa::from_text(&text, alphabet)?)
    } else {
        Ok(compile_min_dfa(&parse_regex(arg)?, alphabet)?)
    }
}

fn load_all(cli: &Cli, args: &[&String]) -> Result<(Alphabet, Vec<Dfa>), CliError> {
    let a = alphabet_for(cli, args)?;
    let dfas = args.iter().map(|s| load_language(s, &a)).collect::<Result<Vec<_>, _>>()?;
    Ok((a, dfas))
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "YES"
    } else {
        "NO"
    }
}

pub fn format_family(f: &SubsetFamily, m: &FiniteMonoid, format: Format) -> String {
    match format {
        Format::Text => f.show(m),
        Format::Tsv => f.members().iter().map(|s| m.set_names(s).join("\t") + "\n").collect(),
    }
}

pub fn format_cones(f: &ConeFamily, m: &FiniteMonoid, format: Format) -> String {
    match format {
        Format::Text => f.show(m),
        Format::Tsv => f
            .pairs()
            .iter()
            .map(|(s, set)| format!("{}\t{}\n", m.name(*s), m.set_names(set).join("\t")))
            .collect(),
    }
}

pub fn format_certificate(c: &Certificate, m: &FiniteMonoid, names: &[&String]) -> String {
    let mut out = String::from("certificate:\n");
    let _ = writeln!(out, "  cone {} : {}", m.name(c.s), m.show_set(&c.set));
    for w in std::iter::once(&c.target).chain(&c.others) {
        let _ = writeln!(out, "  {} {} -> {}", names[w.language], show(&w.word), m.name(w.element));
    }
    out
}

fn execute(cli: &Cli) -> Result<String, CliError> {
    let mut out = String::new();
    match &cli.command {
        Command::Membership { level: lv, language } => {
            let lv = level(lv)?;
            let (_, d) = load_all(cli, &[language])?;
            out.push_str(yes_no(membership(lv, &d[0])?));
            out.push('\n');
        }
        Command::Separate { level: lv, l, l2 } => {
            let lv = level(lv)?;
            let (_, d) = load_all(cli, &[l, l2])?;
            let r = decide_cover(lv, &d[0], &d[1..])?;
            out.push_str(if r.coverable { "SEPARABLE\n" } else { "NOT-SEPARABLE\n" });
            if !lv.is_positive() {
                let back = decide_cover(lv, &d[1], &d[..1])?;
                let _ = writeln!(out, "symmetric {}", if back.coverable { "SEPARABLE" } else { "NOT-SEPARABLE" });
            }
        }
        Command::Cover { level: lv, l, others } => {
            let lv = level(lv)?;
            let mut names = vec![l];
            names.extend(others.iter());
            let (_, d) = load_all(cli, &names)?;
            let r = decide_cover(lv, &d[0], &d[1..])?;
            if r.coverable {
                out.push_str("COVERABLE\n");
            } else {
                out.push_str("NOT-COVERABLE\n");
                let c = r.certificate.as_ref().expect("certificate for a negative answer");
                out.push_str(&format_certificate(c, r.morphism.target(), &names));
            }
        }
        Command::Pointlikes { level: lv, languages } | Command::Conelikes { level: lv, languages } => {
            let lv = level(lv)?;
            let refs: Vec<&String> = languages.iter().collect();
            let (a, d) = load_all(cli, &refs)?;
            let drefs: Vec<&Dfa> = d.iter().collect();
            let mu = joint_morphism(&drefs)?;
            let mut solver = Solver::new(&mu)?;
            let m = solver.monoid().clone();
            let cones = matches!(cli.command, Command::Conelikes { .. });
            if let Some(depth) = cli.depth {
                let sep = separator(lv, &a, m.size(), Some(depth))?;
                let g = sep.graph(solver.morphism())?;
                let tag = if sep.sub_theorem { " (sub-theorem)" } else { "" };
                let _ = writeln!(out, "# separator {}{tag}", sep.label);
                if cones {
                    out.push_str(&format_cones(&brute_conelikes(&g, &sep.order()), &m, cli.format));
                } else {
                    out.push_str(&format_family(&brute_pointlikes(&g), &m, cli.format));
                }
            } else if cones {
                out.push_str(&format_cones(&solver.conelikes(lv)?, &m, cli.format));
            } else {
                out.push_str(&format_family(&solver.pointlikes(lv)?, &m, cli.format));
            }
        }
        Command::Monoid { languages, dfa } => {
            let refs: Vec<&String> = languages.iter().collect();
            let (_, d) = load_all(cli, &refs)?;
            if *dfa {
                out.push_str(&d[0].to_text());
            } else {
                let drefs: Vec<&Dfa> = d.iter().collect();
                let mu = joint_morphism(&drefs)?;
                let m = mu.target();
                let _ = writeln!(out, "elements {}", m.size());
                let _ = writeln!(out, "names {}", m.names().join(" "));
                out.push_str("table\n");
                out.push_str(&m.to_text());
                if let Some(o) = m.order() {
                    out.push_str("order\n");
                    for s in 0..m.size() {
                        let _ = writeln!(out, "{} <= {}", m.name(s), m.show_set(o.up(s)));
                    }
                }
                out.push_str("egg-box\n");
                out.push_str(&egg_box(m));
            }
        }
        Command::RankerEval { ranker, word } => {
            let r = Ranker::parse(ranker)?;
            if let Some(c) = word.chars().find(|c| !c.is_ascii_lowercase()) {
                return Err(WordError::BadChar(c).into());
            }
            match r.eval(word.as_bytes()) {
                Some(p) => {
                    let _ = writeln!(out, "{p}");
                }
                None => out.push_str("undefined\n"),
            }
        }
        Command::RankerMonoid { flavor, m, n, levels } => {
            let f = Flavor::parse(flavor).ok_or_else(|| CliError::Input(format!("unknown flavor {flavor:?}")))?;
            let a = Alphabet::new(cli.alphabet.as_deref().unwrap_or("ab"))?;
            let set = ComparisonSet::flavored(f, *m, *n, &a)?;
            let label = set.label.clone();
            let aut = RankerAutomaton::build(std::sync::Arc::new(set), DEFAULT_CLASS_CAP)?;
            let _ = writeln!(out, "{label} classes {}", aut.class_count());
            if !levels.is_empty() {
                let mon = aut.to_monoid(DEFAULT_TABLE_CAP)?;
                for l in levels {
                    let lv = level(l)?;
                    let _ = writeln!(out, "{lv} {}", yes_no(is_in(lv, mon.monoid())?));
                }
            }
        }
        Command::Factorize { word, n } => {
            if let Some(c) = word.chars().find(|c| !c.is_ascii_lowercase()) {
                return Err(WordError::BadChar(c).into());
            }
            let u = word.as_bytes();
            let f = rl_factorize_word(u, *n)?;
            let _ = writeln!(out, "alphabet {}", Alphabet::from_set(alph(u)).map(|a| a.as_string()).unwrap_or_default());
            for i in 1..=f.k() {
                let _ = writeln!(out, "u{i} {}", show(f.u_seg(i)));
                if i < f.k() {
                    let (b, a) = f.markers[i - 1];
                    let _ = writeln!(
                        out,
                        "marker{i} b={b} a={a} v={} Y=\"{}\" X=\"{}\"",
                        show(f.v_seg(i)),
                        f.y_rankers[i - 1],
                        f.x_rankers[i - 1]
                    );
                }
            }
        }
    }
    Ok(out)
}
