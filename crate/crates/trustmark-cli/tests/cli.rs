//! Drives the binary through a full lifecycle in a temp directory: ceremony,
//! keygen, ring publication, issue, check, embed, extract, open, judge,
//! revoke, and the revocation-link check, asserting outputs and exit codes.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_trustmark")
}

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(bin())
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_ok(dir: &Path, args: &[&str]) -> String {
    let out = run(dir, args);
    assert!(
        out.status.success(),
        "command {:?} failed\nstdout: {}\nstderr: {}",
        args,
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8_lossy(&out.stdout).trim().to_string()
}

fn first_line(s: &str) -> String {
    s.lines().next().unwrap_or_default().to_string()
}

struct Paths {
    dir: PathBuf,
}

impl Paths {
    fn p(&self, name: &str) -> String {
        self.dir.join(name).to_string_lossy().into_owned()
    }
}

#[test]
fn full_lifecycle_through_the_binary() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().to_path_buf();
    let paths = Paths { dir: dir.clone() };

    // Ceremony for one trusted element.
    for contributor in ["alice", "bob", "carol"] {
        run_ok(
            &dir,
            &[
                "ceremony",
                "contribute",
                "--label",
                "crs/ek",
                "--contributor",
                contributor,
                "--transcript",
                &paths.p("ceremony.jsonl"),
            ],
        );
    }
    let verified = run_ok(
        &dir,
        &["ceremony", "verify", "--transcript", &paths.p("ceremony.jsonl")],
    );
    assert_eq!(verified, "verified 3 contributions");
    let aggregated = run_ok(
        &dir,
        &[
            "ceremony",
            "aggregate",
            "--transcript",
            &paths.p("ceremony.jsonl"),
            "--label",
            "crs/ek",
        ],
    );
    assert_eq!(aggregated.len(), 64, "aggregate prints one hex element");

    // Keys: four admitters and one auditor, auto-registered.
    let mut admitter_pks = Vec::new();
    for i in 0..4 {
        let pk = run_ok(
            &dir,
            &["keygen", "admitter", "--out", &paths.p(&format!("admitter{i}.json"))],
        );
        admitter_pks.push(first_line(&pk));
    }
    let auditor_pk = first_line(&run_ok(
        &dir,
        &["keygen", "auditor", "--out", &paths.p("auditor.json")],
    ));

    // Publish the ring.
    let ring_id = first_line(&run_ok(
        &dir,
        &["ring", "publish", "--members", &admitter_pks.join(",")],
    ));
    assert_eq!(ring_id.len(), 64);

    // Issue a token.
    run_ok(
        &dir,
        &[
            "issue",
            "--key",
            &paths.p("admitter2.json"),
            "--ring-id",
            &ring_id,
            "--auditor",
            &auditor_pk,
            "--chain",
            "nem",
            "--address",
            "3c3c3c3c3c3c3c3c3c3c",
            "--flag",
            "untrust",
            "--expiry",
            "1700000000",
            "--now",
            "1600000000",
            "--note",
            "flagged pending review",
            "--out",
            &paths.p("token.bin"),
            "--link-out",
            &paths.p("link.json"),
            "--seed",
            "7",
        ],
    );

    // Submitter check accepts.
    let check = run_ok(
        &dir,
        &["check", "--token", &paths.p("token.bin"), "--now", "1600000000"],
    );
    assert_eq!(first_line(&check), "ACCEPT");

    // Expired token aborts at step 3 with exit code 2.
    let expired = run(
        &dir,
        &["check", "--token", &paths.p("token.bin"), "--now", "1800000000"],
    );
    assert_eq!(expired.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&expired.stdout).contains("ABORT step 3"));

    // Embed on the simulated NEM chain, digest mode.
    let embed_out = run_ok(
        &dir,
        &[
            "embed",
            "--token",
            &paths.p("token.bin"),
            "--chain",
            "nem",
            "--mode",
            "case2",
            "--storage-kind",
            "ipfs",
            "--ledger",
            &paths.p("ledger.json"),
            "--storage",
            &paths.p("storage.json"),
        ],
    );
    let report: serde_json::Value = serde_json::from_str(&embed_out).unwrap();
    assert_eq!(report["chain"], "nem");
    assert_eq!(report["chunks"].as_array().unwrap().len(), 1);
    assert_eq!(report["fee_quote"], "0.2 XEM");
    let head_txid = report["head_txid"].as_str().unwrap().to_string();

    // Extract it back.
    run_ok(
        &dir,
        &[
            "extract",
            "--txid",
            &head_txid,
            "--ledger",
            &paths.p("ledger.json"),
            "--storage",
            &paths.p("storage.json"),
            "--out",
            &paths.p("extracted.bin"),
        ],
    );
    assert_eq!(
        std::fs::read(dir.join("token.bin")).unwrap(),
        std::fs::read(dir.join("extracted.bin")).unwrap()
    );

    // Unknown txid exits with the missing-data code.
    let missing = run(
        &dir,
        &[
            "extract",
            "--txid",
            &"00".repeat(32),
            "--ledger",
            &paths.p("ledger.json"),
            "--out",
            &paths.p("nope.bin"),
        ],
    );
    assert_eq!(missing.status.code(), Some(4));

    // Designated auditor opens; judge accepts.
    let opened_pk = first_line(&run_ok(
        &dir,
        &[
            "open",
            "--token",
            &paths.p("extracted.bin"),
            "--auditor-key",
            &paths.p("auditor.json"),
            "--proof-out",
            &paths.p("proof.hex"),
        ],
    ));
    assert_eq!(opened_pk, admitter_pks[2], "auditor traces the issuer");
    let judged = run_ok(
        &dir,
        &[
            "judge",
            "--token",
            &paths.p("extracted.bin"),
            "--proof",
            &paths.p("proof.hex"),
        ],
    );
    assert_eq!(first_line(&judged), "1");

    // A different auditor cannot open: crypto failure exit code.
    run_ok(&dir, &["keygen", "auditor", "--out", &paths.p("other_auditor.json")]);
    let foreign = run(
        &dir,
        &[
            "open",
            "--token",
            &paths.p("extracted.bin"),
            "--auditor-key",
            &paths.p("other_auditor.json"),
            "--proof-out",
            &paths.p("unused.hex"),
        ],
    );
    assert_eq!(foreign.status.code(), Some(3));

    // Revoke with the saved link secret and verify the link.
    run_ok(
        &dir,
        &[
            "revoke",
            "--key",
            &paths.p("admitter2.json"),
            "--ring-id",
            &ring_id,
            "--auditor",
            &auditor_pk,
            "--chain",
            "nem",
            "--address",
            "3c3c3c3c3c3c3c3c3c3c",
            "--flag",
            "untrust",
            "--link",
            &paths.p("link.json"),
            "--orig-txid",
            &head_txid,
            "--expiry",
            "1700000000",
            "--now",
            "1600000000",
            "--out",
            &paths.p("revocation.bin"),
            "--seed",
            "8",
        ],
    );
    let link_check = run_ok(
        &dir,
        &[
            "check",
            "--token",
            &paths.p("revocation.bin"),
            "--now",
            "1600000000",
            "--original",
            &paths.p("extracted.bin"),
            "--original-txid",
            &head_txid,
        ],
    );
    assert!(link_check.contains("revocation link: 1"));
}

#[test]
fn bench_and_e2e_commands_run() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().to_path_buf();

    let bench = run_ok(&dir, &["bench", "--iterations", "3"]);
    assert!(bench.contains("sign"));
    assert!(bench.contains("verify"));
    assert!(bench.contains("com_open"));

    let transcript_path = dir.join("transcript.json");
    let e2e = run_ok(
        &dir,
        &[
            "e2e",
            "--chain",
            "btc",
            "--mode",
            "case1",
            "--seed",
            "5",
            "--out",
            transcript_path.to_str().unwrap(),
        ],
    );
    assert!(e2e.contains("transactions=21"));
    assert!(e2e.contains("judge=1"));
    let transcript = std::fs::read_to_string(&transcript_path).unwrap();
    assert!(transcript.contains("\"name\": \"revoke\""));
}

#[test]
fn seeded_issuance_is_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().to_path_buf();
    let paths = Paths { dir: dir.clone() };

    let pk = first_line(&run_ok(
        &dir,
        &["keygen", "admitter", "--out", &paths.p("a.json")],
    ));
    let opk = first_line(&run_ok(
        &dir,
        &["keygen", "auditor", "--out", &paths.p("aud.json")],
    ));
    let ring_id = first_line(&run_ok(&dir, &["ring", "publish", "--members", &pk]));

    for out in ["t1.bin", "t2.bin"] {
        run_ok(
            &dir,
            &[
                "issue",
                "--key",
                &paths.p("a.json"),
                "--ring-id",
                &ring_id,
                "--auditor",
                &opk,
                "--chain",
                "btc",
                "--address",
                "aa",
                "--flag",
                "trust",
                "--expiry",
                "2000000000",
                "--now",
                "1000000000",
                "--out",
                &paths.p(out),
                "--link-out",
                &paths.p(&format!("{out}.link")),
                "--seed",
                "99",
            ],
        );
    }
    assert_eq!(
        std::fs::read(dir.join("t1.bin")).unwrap(),
        std::fs::read(dir.join("t2.bin")).unwrap()
    );
}
