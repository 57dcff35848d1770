//! Exit-code and format contract of the command-line interface.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn resources_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../resources")
}

struct Harness {
    dir: tempfile::TempDir,
}

impl Harness {
    fn new() -> Self {
        Harness { dir: tempfile::tempdir().unwrap() }
    }

    fn kb(&self) -> PathBuf {
        self.dir.path().join("kb.txt")
    }

    fn write(&self, name: &str, content: &str) -> PathBuf {
        let path = self.dir.path().join(name);
        std::fs::write(&path, content).unwrap();
        path
    }

    fn run(&self, args: &[&str]) -> Output {
        let r = resources_dir();
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_logdoc"));
        cmd.env_remove("LOGDOC_CONFIG");
        cmd.args(args);
        // explain takes no resource flags
        if args[0] != "explain" {
            for (flag, file) in [
                ("--grammar", "grammar.txt"),
                ("--lexicon", "lexicon.txt"),
                ("--postulates", "postulates.txt"),
                ("--specs", "specs.txt"),
            ] {
                if !args.contains(&flag) {
                    cmd.arg(flag).arg(r.join(file));
                }
            }
        }
        cmd.output().unwrap()
    }
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn index_reports_fragments_and_exits_zero() {
    let h = Harness::new();
    let doc = h.write(
        "titles.txt",
        "Answering machines\nImplementing languages\nBacktracking problems\n",
    );
    let out = h.run(&["index", "--kb", h.kb().to_str().unwrap(), "--doc-id", "1", doc.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{out:?}");
    assert!(stdout(&out).contains("3 fragments"), "{}", stdout(&out));
    assert!(h.kb().exists());
    assert!(!h.kb().with_extension("tmp").exists());
}

#[test]
fn indexing_the_same_doc_id_twice_exits_three() {
    let h = Harness::new();
    let doc = h.write("d.txt", "a dog\n");
    let kb = h.kb();
    let first = h.run(&["index", "--kb", kb.to_str().unwrap(), "--doc-id", "7", doc.to_str().unwrap()]);
    assert_eq!(code(&first), 0);
    let second = h.run(&["index", "--kb", kb.to_str().unwrap(), "--doc-id", "7", doc.to_str().unwrap()]);
    assert_eq!(code(&second), 3);
}

#[test]
fn missing_grammar_exits_two_with_path() {
    let h = Harness::new();
    let doc = h.write("d.txt", "a dog\n");
    let out = h.run(&[
        "index",
        "--kb",
        h.kb().to_str().unwrap(),
        "--doc-id",
        "1",
        "--grammar",
        "/nonexistent/grammar.txt",
        doc.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent/grammar.txt"));
}

#[test]
fn query_12_retrieves_passage_11_in_the_documented_format() {
    let h = Harness::new();
    let doc = h.write("doc11.txt", "Natural language question answering systems\n");
    let kb = h.kb();
    h.run(&["index", "--kb", kb.to_str().unwrap(), "--doc-id", "11", doc.to_str().unwrap()]);
    let out = h.run(&["query", "--kb", kb.to_str().unwrap(), "Natural language questions"]);
    assert_eq!(code(&out), 0);
    assert_eq!(
        stdout(&out).trim(),
        "11:1 [level3] Natural language question answering systems"
    );
}

#[test]
fn query_with_no_results_exits_one() {
    let h = Harness::new();
    let doc = h.write("d.txt", "a dog\n");
    let kb = h.kb();
    h.run(&["index", "--kb", kb.to_str().unwrap(), "--doc-id", "1", doc.to_str().unwrap()]);
    let out = h.run(&["query", "--kb", kb.to_str().unwrap(), "answering machines"]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).is_empty());
}

#[test]
fn query_of_function_words_exits_two() {
    let h = Harness::new();
    let doc = h.write("d.txt", "a dog\n");
    let kb = h.kb();
    h.run(&["index", "--kb", kb.to_str().unwrap(), "--doc-id", "1", doc.to_str().unwrap()]);
    let out = h.run(&["query", "--kb", kb.to_str().unwrap(), "of the"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("empty query"));
}

#[test]
fn records_round_trip_into_explain() {
    let h = Harness::new();
    let doc = h.write("doc11.txt", "Natural language question answering systems\n");
    let kb = h.kb();
    h.run(&["index", "--kb", kb.to_str().unwrap(), "--doc-id", "11", doc.to_str().unwrap()]);
    let out = h.run(&[
        "query",
        "--kb",
        kb.to_str().unwrap(),
        "--format",
        "records",
        "Natural language questions",
    ]);
    assert_eq!(code(&out), 0);
    let record: serde_json::Value = serde_json::from_str(stdout(&out).lines().next().unwrap()).unwrap();
    assert_eq!(record["doc"], 11);
    assert_eq!(record["frag"], 1);
    assert_eq!(record["stage"], "level3");
    let trace_id = record["trace"].as_str().unwrap();

    // the record carries exactly the fields of the bundled schema
    let schema: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(resources_dir().join("records.schema.json")).unwrap(),
    )
    .unwrap();
    let required: Vec<&str> = schema["required"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    let fields: Vec<&str> = record.as_object().unwrap().keys().map(String::as_str).collect();
    for f in &required {
        assert!(fields.contains(f), "record missing schema field {f}");
    }
    for f in &fields {
        assert!(required.contains(f), "record field {f} not in schema");
    }
    let stages: Vec<&str> = schema["properties"]["stage"]["enum"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    assert!(stages.contains(&record["stage"].as_str().unwrap()));

    let explained = h.run(&["explain", "--kb", kb.to_str().unwrap(), trace_id]);
    assert_eq!(code(&explained), 0);
    let text = stdout(&explained);
    assert!(text.contains("by_with_for"), "{text}");
    assert!(text.contains("/1/11"), "{text}");
    // numbered resolution steps
    assert!(text.contains("1. "), "{text}");
}

#[test]
fn unknown_trace_id_exits_four() {
    let h = Harness::new();
    let doc = h.write("d.txt", "a dog\n");
    let kb = h.kb();
    h.run(&["index", "--kb", kb.to_str().unwrap(), "--doc-id", "1", doc.to_str().unwrap()]);
    let out = h.run(&["explain", "--kb", kb.to_str().unwrap(), "t42"]);
    assert_eq!(code(&out), 4);
}

#[test]
fn parse_prints_ranked_analyses_with_distinct_values() {
    let h = Harness::new();
    let out = h.run(&["parse", "--no-prune", "the operator tested the programs on the system"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().filter(|l| l.contains('#')).collect();
    assert!(lines.len() >= 2, "{text}");
    assert_ne!(lines[0], lines[1]);
    // survivor marker on the top cluster
    assert!(lines[0].starts_with('*'), "{text}");
}

#[test]
fn parse_of_empty_input_exits_zero() {
    let h = Harness::new();
    let out = h.run(&["parse", ""]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("0 full analyses"));
}

#[test]
fn chart_dump_lists_edges() {
    let h = Harness::new();
    let out = h.run(&["parse", "--chart", "a dog"]);
    let text = stdout(&out);
    // one edge per line: id span category value rule children
    assert!(text.lines().any(|l| l.contains("lexical")), "{text}");
    assert!(text.lines().any(|l| l.contains("np_det_cnp")), "{text}");
}

#[test]
fn config_file_supplies_paths_and_thresholds() {
    let h = Harness::new();
    let r = resources_dir();
    let config = h.write(
        "logdoc.toml",
        &format!(
            "[paths]\ngrammar = {:?}\nlexicon = {:?}\npostulates = {:?}\nspecs = {:?}\n[thresholds]\nm = 21\nn = 14\no = 7\n",
            r.join("grammar.txt"),
            r.join("lexicon.txt"),
            r.join("postulates.txt"),
            r.join("specs.txt"),
        ),
    );
    let doc = h.write("doc11.txt", "Natural language question answering systems\n");
    let kb = h.kb();
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_logdoc"));
    cmd.env("LOGDOC_CONFIG", &config);
    cmd.args(["index", "--kb", kb.to_str().unwrap(), "--doc-id", "11", doc.to_str().unwrap()]);
    assert_eq!(cmd.output().unwrap().status.code().unwrap(), 0);

    let mut cmd = Command::new(env!("CARGO_BIN_EXE_logdoc"));
    cmd.env("LOGDOC_CONFIG", &config);
    cmd.args(["query", "--kb", kb.to_str().unwrap(), "Natural language questions"]);
    let out = cmd.output().unwrap();
    assert_eq!(out.status.code().unwrap(), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("11:1 [level3]"));
}

#[test]
fn invalid_thresholds_exit_two() {
    let h = Harness::new();
    let doc = h.write("d.txt", "a dog\n");
    let kb = h.kb();
    h.run(&["index", "--kb", kb.to_str().unwrap(), "--doc-id", "1", doc.to_str().unwrap()]);
    let out = h.run(&["query", "--kb", kb.to_str().unwrap(), "--m", "3", "--n", "10", "a dog"]);
    assert_eq!(code(&out), 2);
}
