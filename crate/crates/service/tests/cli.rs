//! Runs the `debunk` binary end to end on a small synthetic day.

use std::path::Path;
use std::process::Command;

use debunk_core::ingest::write_records;
use debunk_testkit::gen;

fn debunk(args: &[&str], config: &Path) -> String {
    let out = Command::new(env!("CARGO_BIN_EXE_debunk"))
        .arg("--config")
        .arg(config)
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs");
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn crawl_archive_export_and_kappa() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    let day = gen::synthetic_day(21);

    let mut records = Vec::new();
    write_records(&mut records, &day.tweets).unwrap();
    std::fs::write(root.join("tweets.jsonl"), records).unwrap();
    std::fs::write(root.join("parses.conllu"), &day.sidecar).unwrap();
    std::fs::write(root.join("vectors.txt"), day.embeddings.to_text()).unwrap();
    let config = root.join("debunk.toml");
    std::fs::write(
        &config,
        format!(
            "data_dir = {:?}\nembeddings = {:?}\ntimezone = \"+09:00\"\n",
            root.join("data"),
            root.join("vectors.txt")
        ),
    )
    .unwrap();

    let crawled = debunk(&["crawl", "--source", root.join("tweets.jsonl").to_str().unwrap()], &config);
    assert!(crawled.contains("loaded 500 tweets"), "{crawled}");
    assert!(crawled.contains("2019-12-07 en: 500 tweets stored"), "{crawled}");

    let parses = root.join("parses.conllu");
    let archived = debunk(
        &["archive", "--date", "2019-12-07", "--lang", "en", "--parses", parses.to_str().unwrap()],
        &config,
    );
    assert!(archived.starts_with("2019-12-07 en: 500 tweets"), "{archived}");

    let exported = debunk(&["export", "--from", "2019-12-07", "--to", "2019-12-07", "--lang", "en"], &config);
    let lines: Vec<serde_json::Value> = exported.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert!(lines.len() >= 5);
    assert_eq!(lines[0]["position"], 1);
    assert_eq!(
        exported,
        debunk(&["export", "--from", "2019-12-07", "--to", "2019-12-07", "--lang", "en"], &config)
    );

    std::fs::write(root.join("a.txt"), "fake\nfake\nnot_fake\nnot_fake\n").unwrap();
    std::fs::write(root.join("b.txt"), "fake\nnot_fake\nfake\nnot_fake\n").unwrap();
    let k = debunk(&["eval-kappa", root.join("a.txt").to_str().unwrap(), root.join("b.txt").to_str().unwrap()], &config);
    assert_eq!(k.trim(), "0.000000");
}
