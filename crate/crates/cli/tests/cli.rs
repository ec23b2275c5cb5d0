use std::path::PathBuf;
use std::process::{Command, Output};

fn data(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(rel)
}

fn sword(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sword")).args(args).output().expect("binary runs")
}

fn path(p: &std::path::Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn canonicalize_is_idempotent_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    let once = dir.path().join("once.swml");
    let twice = dir.path().join("twice.swml");
    let input = data("golden/three-signs.input.swml");
    assert!(sword(&["swml", "canonicalize", path(&input), "-o", path(&once)]).status.success());
    assert!(sword(&["swml", "canonicalize", path(&once), "-o", path(&twice)]).status.success());
    let a = std::fs::read(&once).unwrap();
    assert_eq!(a, std::fs::read(&twice).unwrap());
    assert_eq!(a, std::fs::read(data("golden/three-signs.swml")).unwrap());

    let stdout = sword(&["swml", "canonicalize", path(&input)]);
    assert_eq!(stdout.stdout, a);
}

#[test]
fn catalog_validate_reports_count() {
    let out = sword(&["--json", "catalog", "validate", path(&data("sample-catalog/manifest.txt"))]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["ok"], true);
    assert_eq!(v["count"], 387);
    assert_eq!(v["categories"].as_array().unwrap().len(), 7);
}

#[test]
fn exit_codes_separate_usage_from_validation() {
    assert_eq!(sword(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(sword(&["predict"]).status.code(), Some(2));
    assert_eq!(sword(&["--help"]).status.code(), Some(0));
    assert_eq!(sword(&["swml", "validate", "/nonexistent/file.swml"]).status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.swml");
    std::fs::write(&bad, "<swml version=\"1.0\"><doc-meta/><column><sign id=\"a\"><glyph code=\"xx\" x=\"0\" y=\"0\"/></sign></column></swml>").unwrap();
    let out = sword(&["--json", "swml", "validate", path(&bad)]);
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["error"]["kind"], "invalid");
}

#[test]
fn unknown_glyphs_fail_catalog_aware_validation() {
    let dir = tempfile::tempdir().unwrap();
    let doc = dir.path().join("doc.swml");
    std::fs::write(
        &doc,
        "<swml version=\"1.0\"><doc-meta/><column><sign id=\"a\"><glyph code=\"01-01-999-01-01-01\" x=\"0\" y=\"0\"/></sign></column></swml>",
    )
    .unwrap();
    assert_eq!(sword(&["swml", "validate", path(&doc)]).status.code(), Some(0));
    let with_catalog = sword(&["swml", "validate", path(&doc), "--catalog", path(&data("sample-catalog/manifest.txt"))]);
    assert_eq!(with_catalog.status.code(), Some(1));
}

#[test]
fn corpus_to_prediction_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let store = dir.path().join("corpus.jsonl");
    let model = dir.path().join("model.bin");
    let catalog = data("sample-catalog/manifest.txt");
    let ingest = sword(&["corpus", "ingest", "--store", path(&store), "--catalog", path(&catalog), path(&data("toy/toy-signs.swml"))]);
    assert!(ingest.status.success(), "{}", String::from_utf8_lossy(&ingest.stderr));
    assert!(sword(&["corpus", "build-model", "--store", path(&store), "-o", path(&model)]).status.success());

    let out = sword(&["--json", "predict", "--model", path(&model), "--placed", "01-01-001-01-01-01"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let scores: Vec<(&str, &str)> = v["suggestions"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| (s["code"].as_str().unwrap(), s["score"].as_str().unwrap()))
        .collect();
    assert_eq!(scores, [("02-03-001-01-01-01", "2/3"), ("04-01-001-01-01-01", "2/3")]);

    let patterns = sword(&["--json", "corpus", "patterns", "--store", path(&store), "--min-support", "2"]);
    let v: serde_json::Value = serde_json::from_slice(&patterns.stdout).unwrap();
    assert_eq!(v["patterns"].as_array().unwrap().len(), 2);
    assert_eq!(sword(&["corpus", "patterns", "--store", path(&store), "--min-support", "0"]).status.code(), Some(2));
}

#[test]
fn render_recognize_review_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let catalog = data("sample-catalog/manifest.txt");
    let page = dir.path().join("page.png");
    let report = dir.path().join("page.json");
    let out = dir.path().join("out.swml");
    let src = dir.path().join("src.swml");
    std::fs::write(
        &src,
        "<swml version=\"1.0\"><doc-meta/><column>\
         <sign id=\"a\"><glyph code=\"01-04-001-01-01-01\" x=\"0\" y=\"0\"/><glyph code=\"02-03-001-01-01-05\" x=\"60\" y=\"0\"/></sign>\
         <sign id=\"b\"><glyph code=\"04-01-001-01-01-01\" x=\"0\" y=\"0\"/></sign>\
         </column></swml>",
    )
    .unwrap();
    assert!(sword(&["ogr", "render", path(&src), "--catalog", path(&catalog), "-o", path(&page)]).status.success());
    let rec = sword(&["--json", "ogr", "recognize", path(&page), "--catalog", path(&catalog), "-o", path(&report)]);
    assert!(rec.status.success());
    let v: serde_json::Value = serde_json::from_slice(&rec.stdout).unwrap();
    assert_eq!(v["glyphs"], 3);
    assert_eq!(v["signs"], 2);
    assert_eq!(v["conserved"], true);
    assert!(sword(&["ogr", "review", path(&report), "-o", path(&out)]).status.success());
    assert_eq!(sword(&["swml", "validate", path(&out), "--catalog", path(&catalog)]).status.code(), Some(0));
}
