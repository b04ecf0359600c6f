use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(format!("{name}.xml"))
}

fn fck(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fck")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn run_smoke(dir: &Path, extra: &[&str]) {
    let s = scenario("smoke");
    let mut args = vec!["run", s.to_str().unwrap(), "-o", dir.to_str().unwrap()];
    args.extend_from_slice(extra);
    let o = fck(&args);
    assert!(o.status.success(), "{}", stderr(&o));
}

#[test]
fn validate_accepts_bundled_scenarios() {
    for name in ["oncethrough", "onepass", "infpass", "oncethrough_10", "onepass_10", "infpass_10", "smoke"] {
        let o = fck(&["validate", scenario(name).to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{name}: {}", stderr(&o));
        assert!(stdout(&o).trim_end().ends_with(": ok"));
    }
}

#[test]
fn validate_lists_errors_and_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.xml");
    let text = std::fs::read_to_string(scenario("onepass"))
        .unwrap()
        .replace("<inrecipe>uox_fresh</inrecipe>", "<inrecipe>missing</inrecipe>")
        .replace("<cycle_time>18</cycle_time>", "<cycle_time>x</cycle_time>");
    std::fs::write(&bad, text).unwrap();
    let o = fck(&["validate", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("simulation/facility[lwr]/config/Reactor/fuel[1]/inrecipe: undefined recipe 'missing'"), "{err}");
    assert!(err.contains("simulation/facility[lwr]/config/Reactor/cycle_time"), "{err}");

    std::fs::write(&bad, "<simulation><control>").unwrap();
    let o = fck(&["validate", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("malformed"), "{}", stderr(&o));

    let o = fck(&["validate", dir.path().join("absent.xml").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn bad_arguments_are_user_errors() {
    assert_eq!(fck(&[]).status.code(), Some(1));
    assert_eq!(fck(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(fck(&["run", "x.xml"]).status.code(), Some(1));
    assert_eq!(fck(&["--help"]).status.code(), Some(0));
    assert_eq!(fck(&["--version"]).status.code(), Some(0));
}

#[test]
fn run_then_inspect_the_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    run_smoke(&out, &[]);
    for table in ["AgentEntry", "AgentExit", "Resources", "Compositions", "Transactions", "TimeSeries"] {
        assert!(out.join(format!("{table}.csv")).is_file(), "{table}");
    }

    let o = fck(&["audit", out.to_str().unwrap()]);
    assert_eq!((o.status.code(), stdout(&o).trim()), (Some(0), "ok"), "{}", stderr(&o));

    let o = fck(&["metrics", out.to_str().unwrap()]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("month,kg"));
    let rows: Vec<(u64, f64)> = lines
        .map(|l| {
            let (t, v) = l.split_once(',').unwrap();
            (t.parse().unwrap(), v.parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 120);
    assert!(rows.windows(2).all(|w| w[1].0 == w[0].0 + 1));
    assert!(rows.last().unwrap().1 > 0.0);

    let o = fck(&["metrics", out.to_str().unwrap(), "--metric", "nonsense"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("pu_inventory"), "lists the available metrics");

    // The smoke scenario records its exchanges.
    let o = fck(&["dump-exchange", out.to_str().unwrap(), "--step", "14"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.lines().count() > 1, "{text}");
    assert!(text.lines().skip(1).all(|l| l.starts_with("14,")));
}

#[test]
fn audit_flags_broken_tables() {
    let dir = tempfile::tempdir().unwrap();
    run_smoke(dir.path(), &["--solver", "greedy"]);
    let entries = dir.path().join("AgentEntry.csv");
    let text = std::fs::read_to_string(&entries).unwrap();
    let kept: Vec<&str> = text.lines().take(3).collect();
    std::fs::write(&entries, kept.join("\n") + "\n").unwrap();
    let o = fck(&["audit", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("unknown agent"), "{}", stdout(&o));
}

#[test]
fn dump_exchange_needs_recorded_arcs() {
    let dir = tempfile::tempdir().unwrap();
    let s = scenario("oncethrough");
    let text = std::fs::read_to_string(&s).unwrap();
    let short = dir.path().join("short.xml");
    let re = |t: &str| {
        let start = t.find("<duration>").unwrap() + "<duration>".len();
        let end = t[start..].find('<').unwrap() + start;
        format!("{}24{}", &t[..start], &t[end..])
    };
    std::fs::write(&short, re(&text)).unwrap();
    let out = dir.path().join("out");
    let o = fck(&["run", short.to_str().unwrap(), "-o", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let o = fck(&["dump-exchange", out.to_str().unwrap(), "--step", "3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("--dump-exchange"));

    let o = fck(&["metrics", dir.path().join("nowhere").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}
