//! The CLI against the library calls it wraps.

use pointlike::cli::{format_family, run, Format, EXIT_INPUT, EXIT_OK, EXIT_RESOURCE};
use pointlike::rankers::Ranker;
use pointlike::solver::{decide_cover, joint_morphism, membership, Solver};
use pointlike::syntactic::{compile_min_dfa, parse_regex, Dfa};
use pointlike::varieties::Level;
use pointlike::words::Alphabet;

fn pl(args: &[&str]) -> (i32, String, String) {
    run(std::iter::once("pointlike").chain(args.iter().copied()))
}

fn ok(args: &[&str]) -> String {
    let (code, out, err) = pl(args);
    assert_eq!(code, EXIT_OK, "{args:?}: {err}");
    out
}

fn dfa(re: &str) -> Dfa {
    compile_min_dfa(&parse_regex(re).unwrap(), &Alphabet::new("ab").unwrap()).unwrap()
}

#[test]
fn membership_matches_library() {
    for (lv, re) in [("J", "(ab)*"), ("DA", "(ab)+"), ("R2", "a*b"), ("FO2_2", "(ab)*"), ("Si1", "a+"), ("Pi1", "b*")] {
        let want = membership(lv.parse::<Level>().unwrap(), &dfa(re)).unwrap();
        let got = ok(&["--alphabet", "ab", "membership", lv, re]);
        assert_eq!(got, if want { "YES\n" } else { "NO\n" }, "{lv} {re}");
    }
    assert_eq!(ok(&["membership", "DA", "(ab)+"]), "NO\n");
}

#[test]
fn cover_and_separate() {
    let r = decide_cover(Level::J, &dfa("(ab)*"), &[dfa("(ba)*")]).unwrap();
    assert!(!r.coverable);
    let out = ok(&["cover", "J", "(ab)*", "(ba)*"]);
    assert!(out.starts_with("NOT-COVERABLE\ncertificate:\n"), "{out}");
    assert_eq!(ok(&["cover", "J", "a*", "b*", "a"]), "COVERABLE\n");
    assert_eq!(ok(&["separate", "J", "a*b", "a*"]), "SEPARABLE\nsymmetric SEPARABLE\n");
}

#[test]
fn pointlikes_match_library() {
    let mu = joint_morphism(&[&dfa("(ab)+")]).unwrap();
    let mut s = Solver::new(&mu).unwrap();
    let m = s.monoid().clone();
    for (lv, fmt, name) in [(Level::J, Format::Text, "text"), (Level::FO2(2), Format::Tsv, "tsv")] {
        let want = format_family(&s.pointlikes(lv).unwrap(), &m, fmt);
        assert_eq!(ok(&["--format", name, "pointlikes", &lv.to_string(), "(ab)+"]), want);
    }
}

#[test]
fn jobs_do_not_change_output() {
    let cases: &[&[&str]] = &[
        &["pointlikes", "FO2_2", "(ab)+", "a*"],
        &["conelikes", "Si2", "(ab)*b"],
        &["pointlikes", "RvL2", "(ab)*", "b(a|b)*"],
        &["cover", "R3", "(a|b)*aba", "b*", "a*"],
        &["ranker-monoid", "XY", "1", "2", "--levels", "J,Si1"],
    ];
    // separate processes, so the global switch cannot leak between runs
    let bin = |jobs: &str, args: &[&str]| {
        let o = std::process::Command::new(env!("CARGO_BIN_EXE_pointlike")).arg("--jobs").arg(jobs).args(args).output().unwrap();
        assert!(o.status.success(), "{args:?}");
        o.stdout
    };
    for args in cases {
        let seq = bin("1", args);
        assert_eq!(bin("4", args), seq, "{args:?}");
        assert_eq!(String::from_utf8(seq).unwrap(), ok(args), "{args:?}");
    }
}

#[test]
fn ranker_eval_and_factorize() {
    for (r, w) in [("Xa Yb", "abab"), ("Xb", "aab"), ("Ya Xb", "abab"), ("Xc", "ab")] {
        let want = match Ranker::parse(r).unwrap().eval(w.as_bytes()) {
            Some(p) => format!("{p}\n"),
            None => "undefined\n".into(),
        };
        assert_eq!(ok(&["ranker-eval", r, w]), want);
    }
    let out = ok(&["factorize", "abcab", "1"]);
    assert!(out.starts_with("alphabet abc\nu1 "), "{out}");
}

#[test]
fn dfa_file_roundtrip() {
    let text = ok(&["--alphabet", "ab", "monoid", "--dfa", "(ab)*"]);
    let path = std::env::temp_dir().join(format!("pointlike-cli-{}.dfa", std::process::id()));
    std::fs::write(&path, &text).unwrap();
    let arg = format!("@{}", path.display());
    assert_eq!(ok(&["--alphabet", "ab", "membership", "J", &arg]), ok(&["--alphabet", "ab", "membership", "J", "(ab)*"]));
    std::fs::remove_file(&path).unwrap();
}

#[test]
fn exit_codes() {
    assert_eq!(pl(&["membership", "Q", "a"]).0, EXIT_INPUT);
    assert_eq!(pl(&["membership", "J", "a("]).0, EXIT_INPUT);
    assert_eq!(pl(&["ranker-eval", "Xa_Yb", "ab"]).0, EXIT_INPUT);
    assert_eq!(pl(&["factorize", "aB", "1"]).0, EXIT_INPUT);
    assert_eq!(pl(&["frobnicate"]).0, EXIT_INPUT);
    assert_eq!(pl(&["--help"]).0, EXIT_OK);
    let (code, _, err) = pl(&["ranker-monoid", "XY", "1", "3", "--levels", "J"]);
    assert_eq!(code, EXIT_RESOURCE, "{err}");
}
