use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .canonicalize()
        .unwrap()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_causal-unfold"))
        .args(args)
        .current_dir(fixtures())
        .env_remove("CAUSAL_UNFOLD_CAPS")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

fn scratch(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("causal-unfold-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn structure_fixtures() -> Vec<String> {
    let mut out: Vec<String> = std::fs::read_dir(fixtures())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.ends_with(".ges.json") || n.ends_with(".ese.json"))
        .collect();
    out.sort();
    out
}

#[test]
fn goldens_match() {
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    let mut compared = 0;
    for file in structure_fixtures() {
        let stem = file.split('.').next().unwrap();
        for cmd in ["unfold", "extremals", "check-axioms"] {
            let o = run(&[cmd, &file]);
            assert!(o.status.success(), "{cmd} {file}: {}", stderr(&o));
            let golden = fixtures().join("golden").join(format!("{stem}.{cmd}.json"));
            if update {
                std::fs::write(&golden, &o.stdout).unwrap();
            }
            let expected = std::fs::read_to_string(&golden).unwrap();
            assert_eq!(stdout(&o), expected, "{cmd} {file}");
            compared += 1;
        }
    }
    assert_eq!(compared, 42);
}

#[test]
fn unfold_docs() {
    let o = run(&["unfold", "docs.ges.json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["events"], serde_json::json!(["a", "b", "d_a", "d_b"]));
    assert_eq!(v["equiv"], serde_json::json!([["d_a", "d_b"]]));
    assert!(v.get("con").is_none());
}

#[test]
fn unfold_is_deterministic() {
    let a = run(&["unfold", "noninj.ges.json"]);
    let b = run(&["unfold", "noninj.ges.json"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn ill_formed_file_exits_1_with_axiom() {
    let path = scratch(
        "bad.json",
        r#"{"kind":"family","events":["a"],"configs":[["a"]]}"#,
    );
    let o = run(&["validate", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("contains-empty"), "{}", stderr(&o));
    assert_eq!(json(&o)["valid"], false);
}

#[test]
fn parse_errors_exit_2() {
    let path = scratch(
        "broken.json",
        r#"{"kind":"ese","events":["a"],"le":[["a","z"]]}"#,
    );
    let o = run(&["unfold", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("unknown event `z`"));
    let o = run(&["configs", "missing.json"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn caps_exit_3() {
    let o = run(&["--cap-configs", "3", "configs", "e0.ges.json"]);
    assert_eq!(o.status.code(), Some(3));
    let o = run(&["--cap-events", "2", "unfold", "docs.ges.json"]);
    assert_eq!(o.status.code(), Some(3));
    let o = Command::new(env!("CARGO_BIN_EXE_causal-unfold"))
        .args(["configs", "e0.ges.json"])
        .current_dir(fixtures())
        .env("CAUSAL_UNFOLD_CAPS", "configs=3")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
    let o = Command::new(env!("CARGO_BIN_EXE_causal-unfold"))
        .args(["configs", "e0.ges.json"])
        .current_dir(fixtures())
        .env("CAUSAL_UNFOLD_CAPS", "configs=lots")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn replay_passes() {
    let o = run(&["replay-appendix-b"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert!(v["steps"]
        .as_array()
        .unwrap()
        .iter()
        .all(|s| s["holds"] == true));
    assert_eq!(
        v["conclusion"],
        "no pullback in E≡ for fixture (f,g) (paper-argument replay)"
    );
}

#[test]
fn dot_output() {
    let o = run(&["--dot", "unfold", "docs.ges.json"]);
    let text = stdout(&o);
    assert!(text.starts_with("digraph \"docs\" {"));
    assert_eq!(text.matches(" -> ").count(), 3);
    assert_eq!(text.matches("dir=none").count(), 1);
    let o = run(&["export-dot", "e1.real.json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert_eq!(text.matches("label=").count(), 4);
    assert_eq!(text.matches(" -> ").count(), 3);
}

#[test]
fn checks_on_realisations_and_maps() {
    for file in ["e1.real.json", "e2.real.json", "f1.real.json"] {
        assert_eq!(run(&["validate", file]).status.code(), Some(0), "{file}");
    }
    for map in ["appb_map_f.map.json", "appb_map_g.map.json"] {
        let o = run(&["check-map", map, "--category", "ese"]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    let fixtures = fixtures();
    let bad = scratch(
        "swap.map.json",
        &format!(
            r#"{{"kind":"map","source":"{}","target":"{}","table":{{"a":"b","b":"a"}}}}"#,
            fixtures.join("appb_b.ese.json").display(),
            fixtures.join("appb_b.ese.json").display()
        ),
    );
    let o = run(&["check-map", bad.to_str().unwrap(), "--category", "ese"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn limits() {
    let o = run(&[
        "pullback",
        "appb_map_f.map.json",
        "appb_map_g.map.json",
        "--category",
        "edc",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let p: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(fixtures().join("appb_p.ese.json")).unwrap())
            .unwrap();
    let apex = &json(&o)["apex"];
    assert_eq!(
        apex["events"].as_array().unwrap().len(),
        p["events"].as_array().unwrap().len()
    );
    let pseudo = run(&[
        "pseudo-pullback",
        "appb_map_f.map.json",
        "appb_map_g.map.json",
        "--category",
        "edc",
    ]);
    assert_eq!(pseudo.stdout, o.stdout);
    for category in ["family", "ese"] {
        let o = run(&[
            "pullback",
            "appb_map_f.map.json",
            "appb_map_g.map.json",
            "--category",
            category,
        ]);
        assert_eq!(o.status.code(), Some(0), "{category}: {}", stderr(&o));
    }
    let o = run(&["product", "appb_b.ese.json", "docs.ges.json"]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&[
        "product",
        "docs.ges.json",
        "appb_b.ese.json",
        "--category",
        "edc",
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn structure_commands() {
    let o = run(&["stable", "docs.ges.json"]);
    let v = json(&o);
    assert_eq!(v["stable"], false);
    assert!(v["witnesses"][0]
        .as_str()
        .unwrap()
        .contains("{a,d} and {b,d}"));
    let o = run(&["stable", "appb_a.ese.json"]);
    assert!(json(&o).get("pr").is_some());
    let o = run(&["unfold", "noninj.ges.json"]);
    let unfolded = scratch("noninj.unfolded.json", &stdout(&o));
    let o = run(&["restrict-ax", unfolded.to_str().unwrap(), "--level", "1"]);
    assert_eq!(json(&o)["events"].as_array().unwrap().len(), 10);
    let o = run(&["hide", "ex53.ese.json", "--visible", "a,b"]);
    assert_eq!(json(&o)["events"], serde_json::json!(["a", "b"]));
    let o = run(&["hide", "ex53.ese.json", "--visible", "c1"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["collapse", "ex53.ese.json"]);
    assert_eq!(json(&o)["kind"], "general");
    let o = run(&["configs", "docs.ges.json"]);
    assert_eq!(json(&o)["configs"].as_array().unwrap().len(), 7);
}

#[test]
fn oracle_checks() {
    let o = run(&[
        "oracle",
        "counit",
        "docs.ges.json",
        "ex53.ese.json",
        "appb_b.ese.json",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(json(&o)["failures"], serde_json::json!([]));
    let o = run(&[
        "oracle",
        "unit",
        "docs.ges.json",
        "docs.ges.json",
        "e0.ges.json",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = run(&[
        "oracle",
        "maps",
        "appb_b.ese.json",
        "appb_c.ese.json",
        "--category",
        "ese",
    ]);
    assert!(json(&o)["count"].as_u64().unwrap() >= 1);
    let o = run(&["oracle", "extremal", "docs.ges.json", "--nodes", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["disagreements"], serde_json::json!([]));
}

#[test]
fn oracle_span_against_d() {
    let fixtures = fixtures();
    let lettering = |target: &str, pairs: &[(&str, &str)]| {
        let table: Vec<String> = pairs
            .iter()
            .map(|(a, b)| format!(r#""{a}":"{b}""#))
            .collect();
        format!(
            r#"{{"kind":"map","source":"{}","target":"{}","table":{{{}}}}}"#,
            fixtures.join("appb_p.ese.json").display(),
            fixtures.join(target).display(),
            table.join(",")
        )
    };
    let p: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(fixtures.join("appb_p.ese.json")).unwrap())
            .unwrap();
    let events: Vec<String> = p["events"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e.as_str().unwrap().to_string())
        .collect();
    let b_events = ["a", "b", "c", "d", "e"];
    let to_a: Vec<(&str, &str)> = events.iter().map(|e| (e.as_str(), e.as_str())).collect();
    let to_b: Vec<(&str, &str)> = events
        .iter()
        .filter_map(|e| {
            b_events
                .iter()
                .find(|b| e.starts_with(*b))
                .map(|b| (e.as_str(), *b))
        })
        .collect();
    let left = scratch("p_a.map.json", &lettering("appb_a.ese.json", &to_a));
    let right = scratch("p_b.map.json", &lettering("appb_b.ese.json", &to_b));
    let args = |kind: &str, test: &str| {
        run(&[
            "oracle",
            "span",
            "--kind",
            kind,
            "--left",
            left.to_str().unwrap(),
            "--right",
            right.to_str().unwrap(),
            "--f",
            "appb_map_f.map.json",
            "--g",
            "appb_map_g.map.json",
            test,
        ])
    };
    let o = args("pullback", "appb_d.ese.json");
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    assert!(stdout(&o).contains("no mediator"));
    let o = args("pullback", "appb_p.ese.json");
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}
