use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

fn corpus(name: &str) -> String {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/corpus");
    dir.join(name).to_string_lossy().into_owned()
}

fn flp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flp")).args(args).output().unwrap()
}

fn repl(args: &[&str], script: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_flp"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(script.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Answer lines, without the completion line.
fn answers(o: &Output) -> Vec<String> {
    let text = stdout(o);
    let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
    let last = lines.pop().unwrap();
    assert!(last == "no more answers." || last == "search bound reached.", "{text}");
    lines
}

#[test]
fn example_one_on_the_default_engine() {
    let o = flp(&[&corpus("coin.flp"), "rt(f(coin))"]);
    assert_eq!(o.status.code(), Some(0));
    let lines = answers(&o);
    assert_eq!(lines.len(), 8);
    assert!(lines.contains(&"(0, 1, 0, 0)".to_string()));
    assert!(!lines.contains(&"(0, 1, 0, 1)".to_string()));
    assert!(stdout(&o).ends_with("no more answers.\n"));
}

#[test]
fn goal_flag_and_engines_agree() {
    let mut sets = Vec::new();
    for engine in ["pop", "let", "susp"] {
        let o = flp(&[&corpus("coin.flp"), "-e", "rrt(f(coin))", "--engine", engine]);
        assert_eq!(o.status.code(), Some(0), "{engine}");
        let mut lines = answers(&o);
        lines.sort();
        lines.dedup();
        assert_eq!(lines.len(), 16, "{engine}");
        sets.push(lines);
    }
    assert!(sets.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn test2_answers_with_multiplicity() {
    let o = flp(&[&corpus("toy_tests.flp"), "test2"]);
    let mut lines = answers(&o);
    lines.sort();
    assert_eq!(lines, ["0", "1", "1", "2"]);
    let o = flp(&[&corpus("toy_tests.flp"), "test1"]);
    assert_eq!(answers(&o), ["0", "2"]);
}

#[test]
fn palindromes_with_an_answer_limit() {
    let o = flp(&[&corpus("grammar.flp"), "palindrome", "--max-answers", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let lines = answers(&o);
    assert_eq!(lines.len(), 5);
    for line in lines {
        let w = if line == "[]" { String::new() } else { line.trim_matches('"').to_string() };
        assert_eq!(w.chars().rev().collect::<String>(), w);
    }
    assert!(stdout(&o).ends_with("search bound reached.\n"));
}

#[test]
fn exit_codes() {
    let o = flp(&[&corpus("coin.flp"), "take(1, [])"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "no more answers.\n");

    let o = flp(&[&corpus("coin.flp"), "f(X)"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());

    let o = flp(&["/nonexistent/program.flp", "coin"]);
    assert_eq!(o.status.code(), Some(2));

    let dir = std::env::temp_dir().join(format!("flp-bad-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.flp");
    std::fs::write(&bad, "coin -> 0\nf(g(X)) -> X\ng(X) -> X\n").unwrap();
    let o = flp(&[bad.to_str().unwrap(), "coin"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("bad.flp:2"), "{err}");

    let o = flp(&[&corpus("coin.flp"), "coin", "--max-steps", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn step_bound_is_reported() {
    let o = flp(&[&corpus("number.flp"), "repeat(0)", "--max-answers", "3"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "search bound reached.\n");
}

#[test]
fn compare_mode() {
    let o = flp(&[&corpus("coin.flp"), "rt(f(coin))", "--compare"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("pop: 8 values"), "{text}");
    assert!(text.trim_end().ends_with("PASS"), "{text}");

    let o = flp(&[&corpus("coin.flp"), "rrt(f(coin))", "--compare"]);
    let text = stdout(&o);
    assert!(text.contains("rewriting: 16 values"), "{text}");
    assert!(text.trim_end().ends_with("PASS"), "{text}");

    let o = flp(&[&corpus("toy_tests.flp"), "test1", "--compare"]);
    assert!(stdout(&o).contains("susp: 2 values {0, 2}"));
}

#[test]
fn dot_output() {
    let path = std::env::temp_dir().join(format!("flp-graph-{}.dot", std::process::id()));
    let o = flp(&[&corpus("coin.flp"), "rt(f(coin))", "--engine", "let", "--dot", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let dot = std::fs::read_to_string(&path).unwrap();
    assert!(dot.starts_with("digraph"));
    assert!(dot.contains("[label=\"LetIn\"]"));
    std::fs::remove_file(&path).unwrap();

    let o = flp(&[&corpus("coin.flp"), "coin", "--dot", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn let_trace_from_the_command_line() {
    let o = flp(&[&corpus("coin.flp"), "rt(f(coin))", "--engine", "let", "--trace"]);
    let text = stdout(&o);
    assert!(text.starts_with("1. [Fapp@ε] g(coin^rt, coin)\n2. [LetIn@ε] let X = coin in g(coin^rt, X)\n"), "{text}");
}

#[test]
fn repl_session() {
    let script = format!(
        ":engine let\n:trace on\nf^rt(coin^rt)\n:engine susp\n:trace off\n:load {}\nnumber(3)\n:quit\nnumber(1)\n",
        corpus("number.flp")
    );
    let o = repl(&[&corpus("coin.flp")], &script);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    let expected_prefix = [
        "1. [Fapp@ε] g(coin^rt, coin)",
        "2. [LetIn@ε] let X = coin in g(coin^rt, X)",
        "3. [Fapp@1] let X = coin in (coin^rt, coin^rt, X, X)",
        "4. [Fapp@1.0] let X = coin in (0, coin^rt, X, X)",
    ];
    assert_eq!(&lines[..4], &expected_prefix, "{text}");
    let loaded = lines.iter().position(|l| l.starts_with("loaded ")).unwrap();
    let numbers: Vec<&&str> = lines[loaded + 1..].iter().filter(|l| l.starts_with('[')).collect();
    assert_eq!(numbers.len(), 27);
    assert!(numbers.iter().any(|l| **l == "[1, 1, 2]"));
    assert!(text.ends_with("no more answers.\n"), "quit stops before the last goal");
}

#[test]
fn repl_recovers_from_errors() {
    let o = repl(&[], ":load /nonexistent.flp\n:engine turbo\ncoin\n:load coin.flp\ncoin\n");
    assert_eq!(o.status.code(), Some(0));
    let err = String::from_utf8(o.stderr.clone()).unwrap();
    assert_eq!(err.lines().count(), 3, "{err}");
    assert_eq!(stdout(&o), "loaded coin.flp\n0\n1\nno more answers.\n");
}
