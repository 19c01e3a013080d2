mod common;

use contrafact::cli::run_with;

use common::fixture_path;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("contrafact").chain(args.iter().copied());
    let code = run_with(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn corpus() -> String {
    fixture_path().to_string_lossy().into_owned()
}

#[test]
fn stats_prints_histogram() {
    let (code, out, _) = run(&["stats", &corpus()]);
    assert_eq!(code, 0);
    assert!(out.starts_with("type"));
    assert!(out.contains("dominant7"));
    assert!(out.lines().last().unwrap().starts_with("totals"));
    assert_eq!(out.lines().count(), 17);

    let (code, csv, _) = run(&["stats", &corpus(), "--csv"]);
    assert_eq!(code, 0);
    assert_eq!(csv.lines().next(), Some("category,count,percent"));
}

#[test]
fn unknown_song_is_a_data_error() {
    let (code, out, err) = run(&["search", &corpus(), "--song", "missing-id"]);
    assert_eq!(code, 2);
    assert!(out.is_empty());
    assert!(err.contains("unknown song"), "{err}");
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&["frobnicate"]).0, 1);
    assert_eq!(run(&["search", &corpus()]).0, 1);
    assert_eq!(run(&["search", &corpus(), "--song", "s001", "--samples", "1"]).0, 1);
    assert_eq!(run(&["distance", &corpus(), "--song-a", "s001", "--song-b", "s002", "--boundary-beats", "0"]).0, 1);
    assert_eq!(run(&["stats", &corpus(), "--threads", "0"]).0, 1);
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("nearest-class"));
}

#[test]
fn missing_file_is_a_data_error() {
    let (code, _, err) = run(&["stats", "/no/such/corpus.jsonl"]);
    assert_eq!(code, 2);
    assert!(err.starts_with("error:"));
}

#[test]
fn output_is_identical_across_thread_counts() {
    let args = |t: &'static str| vec!["--threads", t, "pairwise", "--csv", "--samples", "64"];
    let c = corpus();
    let mut one = args("1");
    one.push(&c);
    let mut four = args("4");
    four.push(&c);
    let (a, b) = (run(&one), run(&four));
    assert_eq!(a.0, 0);
    assert_eq!(a.1, b.1);
    assert!(a.1.starts_with("id,s001,s002"));
}

#[test]
fn model_workflow() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("m.bin");
    let model = model.to_str().unwrap();
    let (code, out, _) = run(&["build-model", &corpus(), "-o", model]);
    assert_eq!(code, 0, "{out}");

    let (code, out, _) = run(&["nearest-class", model, "--class", "bii7", "-k", "3"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 5);
    assert!(lines[0].starts_with("class"));
    assert!(lines[4].starts_with("♭ii7") && lines[4].ends_with("1.000"));

    let (code, _, err) = run(&["nearest-class", model, "--class", "xyz"]);
    assert_eq!(code, 1, "{err}");

    let (code, out, err) = run(&["search", &corpus(), "--model", model, "--song", "s057", "-k", "2"]);
    assert_eq!(code, 0);
    assert!(err.is_empty());
    let rows: Vec<&str> = out.lines().collect();
    assert!(rows[2].contains("s058") && rows[2].ends_with("0.000000"), "{out}");

    let (code, out, _) = run(&["distance", &corpus(), "--model", model, "--song-a", "s057", "--song-b", "s058"]);
    assert_eq!((code, out.as_str()), (0, "0.000000\n"));
}

#[test]
fn model_from_other_corpus_warns() {
    let dir = tempfile::tempdir().unwrap();
    let small = dir.path().join("small.jsonl");
    std::fs::write(&small, common::record("x", Some(0), &["Dm7", "G7", "CM7"], 4)).unwrap();
    let model = dir.path().join("m.bin");
    assert_eq!(run(&["build-model", small.to_str().unwrap(), "-o", model.to_str().unwrap()]).0, 0);
    let (code, _, err) =
        run(&["distance", &corpus(), "--model", model.to_str().unwrap(), "--song-a", "s001", "--song-b", "s002"]);
    assert_eq!(code, 0);
    assert!(err.starts_with("warning:"), "{err}");
}

#[test]
fn estimate_keys_report() {
    let (code, out, _) = run(&["estimate-keys", &corpus()]);
    assert_eq!(code, 0);
    assert!(out.contains("Ambig."));
    let (code, csv, _) = run(&["estimate-keys", &corpus(), "--report", "csv"]);
    assert_eq!(code, 0);
    assert_eq!(csv.lines().next(), Some("id,title,estimate,resolved,declared,distance,ambiguous"));
    assert_eq!(csv.lines().count(), 60);
}

#[test]
fn roman_and_compare() {
    let (code, out, _) = run(&["roman", &corpus(), "--song", "s057"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("Evening Changes (s057), key C"));
    assert!(out.lines().nth(1).unwrap().starts_with("| iM"));

    let (code, out, _) = run(&["compare", &corpus(), "--song-a", "s057", "--song-b", "s058"]);
    assert_eq!(code, 0);
    assert!(out.ends_with("0 of 18 measures differ\n"), "{out}");
    let (_, out, _) = run(&["compare", &corpus(), "--song-a", "s057", "--song-b", "s001"]);
    assert!(out.lines().any(|l| l.starts_with('*')));
}

#[test]
fn json_output_parses() {
    let c = corpus();
    for args in
        [vec!["--format", "json", "stats", &c], vec!["--format", "json", "search", &c, "--song", "s001", "-k", "3"]]
    {
        let (code, out, _) = run(&args);
        assert_eq!(code, 0);
        serde_json::from_str::<serde_json::Value>(&out).unwrap();
    }
}
