use std::path::Path;
use std::process::{Command, Output};

fn crossmerge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_crossmerge"))
        .args(args)
        .output()
        .expect("run crossmerge")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write_lines(path: &Path, keys: &[i64]) {
    let text: String = keys.iter().map(|k| format!("{k}\n")).collect();
    std::fs::write(path, text).unwrap();
}

#[test]
fn demo_figure1_prints_the_ten_subproblems() {
    let out = crossmerge(&["demo-figure1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let plan: Vec<&str> = text.lines().take(10).collect();
    assert_eq!(
        plan,
        [
            "A\ta\t0\t4\t0\t0\t0",
            "A\te\t4\t5\t0\t0\t4",
            "A\te\t8\t9\t6\t6\t14",
            "A\tb\t12\t15\t7\t8\t19",
            "A\tc\t15\t16\t8\t9\t23",
            "B\td\t5\t8\t0\t3\t5",
            "B\te\t8\t8\t3\t6\t11",
            "B\tc\t9\t12\t6\t7\t15",
            "B\td\t16\t18\t9\t12\t25",
            "B\ta\t18\t18\t12\t15\t30",
        ]
    );
    let merged = text.lines().last().unwrap();
    assert!(merged.starts_with("0A0 0A1 1A2 1A3 1A4 1B0 1B1"));
    assert_eq!(merged.split(' ').count(), 33);
}

#[test]
fn verify_empty_and_generated() {
    let out = crossmerge(&["verify", "--n", "0", "--m", "0"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for dist in ["uniform", "few-duplicates", "all-equal", "sorted-runs"] {
        let out = crossmerge(&[
            "verify",
            "--n",
            "3000",
            "--m",
            "1700",
            "--p",
            "7",
            "--workers",
            "3",
            "--dist",
            dist,
        ]);
        assert!(out.status.success(), "{dist}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(stdout(&out).contains("merge ok"));
    }
}

#[test]
fn merge_files_text_and_binary() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.txt");
    let b = dir.path().join("b.txt");
    let c = dir.path().join("c.txt");
    write_lines(&a, &[-3, 1, 1, 9]);
    write_lines(&b, &[0, 1, 10]);
    let out = crossmerge(&[
        "merge",
        "--in-a",
        a.to_str().unwrap(),
        "--in-b",
        b.to_str().unwrap(),
        "--out",
        c.to_str().unwrap(),
        "--p",
        "2",
        "--workers",
        "2",
    ]);
    assert!(out.status.success());
    assert_eq!(std::fs::read_to_string(&c).unwrap(), "-3\n0\n1\n1\n1\n9\n10\n");

    let abin = dir.path().join("a.bin");
    let bbin = dir.path().join("b.bin");
    let cbin = dir.path().join("c.bin");
    let bytes = |keys: &[i64]| keys.iter().flat_map(|k| k.to_le_bytes()).collect::<Vec<u8>>();
    std::fs::write(&abin, bytes(&[2, 4, 6])).unwrap();
    std::fs::write(&bbin, bytes(&[1, 4, i64::MAX])).unwrap();
    let out = crossmerge(&[
        "merge",
        "--binary",
        "--in-a",
        abin.to_str().unwrap(),
        "--in-b",
        bbin.to_str().unwrap(),
        "--out",
        cbin.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert_eq!(std::fs::read(&cbin).unwrap(), bytes(&[1, 2, 4, 4, 6, i64::MAX]));
}

#[test]
fn sort_file() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.txt");
    write_lines(&a, &[5, -1, 3, 3, 0]);
    let out = crossmerge(&["sort", "--in-a", a.to_str().unwrap(), "--p", "3"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "-1\n0\n3\n3\n5\n");
}

#[test]
fn explain_prints_plan_lines() {
    let out = crossmerge(&[
        "merge",
        "--n",
        "20",
        "--m",
        "10",
        "--p",
        "4",
        "--workers",
        "1",
        "--explain",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let plan: Vec<&str> = text.lines().take(8).collect();
    assert!(plan.iter().all(|l| l.split('\t').count() == 7));
    assert_eq!(text.lines().count(), 8 + 30);
}

#[test]
fn exit_codes() {
    assert_eq!(crossmerge(&["merge", "--p", "0"]).status.code(), Some(2));
    assert_eq!(crossmerge(&["merge", "--workers", "0"]).status.code(), Some(2));
    assert_eq!(crossmerge(&["merge", "--workers", "1,2"]).status.code(), Some(2));
    assert_eq!(crossmerge(&["merge", "--no-such-flag"]).status.code(), Some(2));
    assert_eq!(crossmerge(&["merge", "--dist", "gaussian"]).status.code(), Some(2));
    assert_eq!(
        crossmerge(&["merge", "--in-a", "/definitely/not/here"]).status.code(),
        Some(3)
    );

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "1\ntwo\n").unwrap();
    let out = crossmerge(&["merge", "--in-a", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(String::from_utf8_lossy(&out.stderr).lines().count(), 1);

    let unsorted = dir.path().join("unsorted.txt");
    write_lines(&unsorted, &[3, 1]);
    assert_eq!(
        crossmerge(&["merge", "--in-a", unsorted.to_str().unwrap()])
            .status
            .code(),
        Some(4)
    );

    let odd = dir.path().join("odd.bin");
    std::fs::write(&odd, [0u8; 9]).unwrap();
    assert_eq!(
        crossmerge(&["merge", "--binary", "--in-a", odd.to_str().unwrap()])
            .status
            .code(),
        Some(4)
    );
}

#[test]
fn bench_reports_are_consistent() {
    let out = crossmerge(&[
        "bench",
        "merge",
        "--n",
        "100000",
        "--m",
        "100000",
        "--workers",
        "1,4",
        "--repeats",
        "2",
        "--format",
        "json",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 4);
    for row in rows {
        assert_eq!(row["task_size_total"], 200_000);
        assert_eq!(row["verification_status"], "ok");
        assert!(row["rank_phase_comparisons"].as_u64() <= row["rank_phase_comparison_bound"].as_u64());
        if row["workers"] == 4 {
            // p = 4: no task exceeds ceil(n/4) + ceil(m/4).
            assert!(row["max_task_merge_comparisons"].as_u64().unwrap() < 50_000);
        } else {
            assert_eq!(row["speedup_vs_workers_1"], 1.0);
        }
    }

    let out = crossmerge(&["bench", "sort", "--n", "5000", "--workers", "2", "--format", "tsv"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split('\t').collect();
    assert_eq!(header[0], "command");
    assert_eq!(header.len(), 18);
    assert_eq!(lines.count(), 2);
}
