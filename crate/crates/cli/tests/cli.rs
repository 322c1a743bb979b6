use std::fs;
use std::path::PathBuf;
use std::process::Command;

use proptest::prelude::*;
use syncgraph_cli::{run, CommandResult, EXIT_ERROR, EXIT_OK};

fn cli(args: &[&str]) -> CommandResult {
    cli_stdin(args, "")
}

fn cli_stdin(args: &[&str], input: &str) -> CommandResult {
    let mut full = vec!["syncgraph"];
    full.extend_from_slice(args);
    run(full, &mut input.as_bytes())
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("syncgraph-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn construct_edges(n: &str, m: &str) -> String {
    let r = cli(&["construct", "-n", n, "-m", m]);
    assert_eq!(r.exit_code, EXIT_OK, "{}", r.stderr);
    r.stdout
}

#[test]
fn construct_base_case() {
    let r = cli(&[
        "construct",
        "-n",
        "2",
        "-m",
        "1",
        "--tree",
        "star",
        "--format",
        "edges",
    ]);
    assert_eq!(r.exit_code, EXIT_OK);
    assert_eq!(r.stdout, "2 1\n1 2\n");
}

#[test]
fn construct_rejects_out_of_range() {
    for args in [
        &["construct", "-n", "5", "-m", "3"][..],
        &["construct", "-n", "3", "-m", "7"],
        &["construct", "-n", "1", "-m", "0"],
        &[
            "construct",
            "-n",
            "4",
            "-m",
            "5",
            "--tree",
            "arcs:2:1,1:3,1:4",
        ],
        &["construct", "-n", "4", "-m", "5", "--tree", "index:6"],
        &["construct", "-n", "4", "-m", "5", "--tree", "bogus"],
        &["construct", "-n", "x", "-m", "5"],
    ] {
        let r = cli(args);
        assert_eq!(r.exit_code, EXIT_ERROR, "{args:?}");
        assert!(r.stdout.is_empty());
        assert!(!r.stderr.is_empty());
    }
}

#[test]
fn dot_output_draws_bidirectional_pairs_once() {
    let r = cli(&["construct", "-n", "4", "-m", "12", "--format", "dot"]);
    assert_eq!(r.exit_code, EXIT_OK);
    assert!(r.stdout.starts_with("digraph"));
    let edges: Vec<&str> = r.stdout.lines().filter(|l| l.contains("->")).collect();
    // 12 arcs of K4 form 6 bidirectional pairs
    assert_eq!(edges.len(), 6, "{}", r.stdout);
    assert!(edges.iter().all(|l| l.contains("dir=both")));
}

#[test]
fn trace_file_is_written() {
    let path = scratch("trace.txt");
    let r = cli(&[
        "construct",
        "-n",
        "4",
        "-m",
        "7",
        "--tree",
        "path",
        "--trace",
        path.to_str().unwrap(),
    ]);
    assert_eq!(r.exit_code, EXIT_OK);
    let text = fs::read_to_string(&path).unwrap();
    assert!(
        text.starts_with("4 7\n1:2 2:3 3:4\n4 1 2\n5 4 1\n"),
        "{text}"
    );
}

#[test]
fn spectrum_examples() {
    let g58 = construct_edges("5", "8");
    let r = cli_stdin(&["spectrum", "--mode", "exact"], &g58);
    assert_eq!(r.stdout, "0 16 -32 24 -8 1\n");

    let tree = construct_edges("5", "4");
    let r = cli_stdin(&["spectrum", "-", "--mode", "spread"], &tree);
    assert_eq!(r.stdout, "0, 0, 1, true\n");

    let cycle = "3 3\n1 2\n2 3\n3 1\n";
    let r = cli_stdin(&["spectrum", "--mode", "spread"], cycle);
    assert_eq!(r.stdout, "0.75, 0.25, 1, false\n");

    let r = cli_stdin(&["spectrum"], cycle);
    assert_eq!(r.exit_code, EXIT_OK);
    let rows: Vec<(f64, f64)> = r
        .stdout
        .lines()
        .map(|l| {
            let (a, b) = l.split_once(',').unwrap();
            (a.parse().unwrap(), b.parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().any(|&(re, im)| re.abs() < 1e-12 && im == 0.0));
    assert!(rows
        .iter()
        .any(|&(re, im)| (re - 1.5).abs() < 1e-12 && (im - 0.75f64.sqrt()).abs() < 1e-12));
}

#[test]
fn json_round_trip_reports_optimal() {
    for n in 2..=6usize {
        for m in n - 1..=n * (n - 1) {
            for tree in ["star", "path", "random"] {
                let (ns, ms) = (n.to_string(), m.to_string());
                let built = cli(&[
                    "construct",
                    "-n",
                    &ns,
                    "-m",
                    &ms,
                    "--tree",
                    tree,
                    "--rng",
                    "9",
                    "--format",
                    "json",
                ]);
                assert_eq!(built.exit_code, EXIT_OK);
                let r = cli_stdin(&["spectrum", "--mode", "spread"], &built.stdout);
                assert_eq!(r.exit_code, EXIT_OK, "{}", r.stderr);
                assert!(
                    r.stdout.trim_end().ends_with(", true"),
                    "n={n} m={m} {tree}: {}",
                    r.stdout
                );
            }
        }
    }
}

#[test]
fn file_input_matches_stdin() {
    let path = scratch("g.txt");
    let out = scratch("g_out.txt");
    let r = cli(&[
        "construct",
        "-n",
        "5",
        "-m",
        "9",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(r.exit_code, EXIT_OK);
    assert!(r.stdout.is_empty());
    fs::copy(&out, &path).unwrap();
    let from_file = cli(&["spectrum", path.to_str().unwrap(), "--mode", "exact"]);
    let from_stdin = cli_stdin(
        &["spectrum", "--mode", "exact"],
        &fs::read_to_string(&out).unwrap(),
    );
    assert_eq!(from_file.stdout, from_stdin.stdout);
    assert_eq!(from_file.exit_code, EXIT_OK);
}

#[test]
fn verify_examples() {
    let r = cli(&["verify", "conjecture", "-n", "3", "-m", "3"]);
    assert_eq!(r.exit_code, EXIT_OK);
    let row = r.stdout.lines().nth(1).unwrap();
    assert_eq!(row.split(',').nth(3), Some("0.25"));

    let r = cli(&[
        "verify", "theorem3", "--n-max", "6", "--seeds", "3", "--rng", "42",
    ]);
    assert_eq!(r.exit_code, EXIT_OK, "{}", r.stdout);

    let r = cli(&["verify", "conjecture", "-n", "7", "-m", "10"]);
    assert_eq!(r.exit_code, EXIT_ERROR);
    let r = cli(&["verify", "conjecture", "-n", "6", "-m", "15"]);
    assert_eq!(r.exit_code, EXIT_ERROR);
    assert!(r.stderr.contains("long-run"), "{}", r.stderr);

    let r = cli(&[
        "verify",
        "theorem2",
        "--degree-max",
        "5",
        "--coeff-bound",
        "3",
        "--trials",
        "500",
        "--rng",
        "3",
    ]);
    assert_eq!(r.exit_code, EXIT_OK, "{}", r.stdout);
    assert!(r.stdout.starts_with("cases_run,failures\n"));
}

#[test]
fn verify_output_is_independent_of_jobs() {
    let cases: [&[&str]; 3] = [
        &["verify", "conjecture", "-n", "4"],
        &[
            "verify",
            "theorem2",
            "--degree-max",
            "6",
            "--trials",
            "2000",
            "--rng",
            "17",
        ],
        &[
            "verify", "theorem3", "--n-max", "7", "--seeds", "2", "--rng", "5",
        ],
    ];
    for base in cases {
        let outputs: Vec<String> = ["1", "2", "4"]
            .iter()
            .map(|j| {
                let mut args = base.to_vec();
                args.extend(["--jobs", j]);
                let r = cli(&args);
                assert_eq!(r.exit_code, EXIT_OK, "{args:?}");
                r.stdout
            })
            .collect();
        assert!(outputs.windows(2).all(|w| w[0] == w[1]), "{base:?}");
    }
}

#[test]
fn random_trees_follow_the_rng_flag() {
    let a = cli(&[
        "construct",
        "-n",
        "8",
        "-m",
        "20",
        "--tree",
        "random",
        "--rng",
        "4",
    ]);
    let b = cli(&[
        "construct",
        "-n",
        "8",
        "-m",
        "20",
        "--tree",
        "random",
        "--rng",
        "4",
    ]);
    assert_eq!(a.stdout, b.stdout);
    let outs: std::collections::BTreeSet<String> = (0..10)
        .map(|s| {
            cli(&[
                "construct",
                "-n",
                "8",
                "-m",
                "7",
                "--tree",
                "random",
                "--rng",
                &s.to_string(),
            ])
            .stdout
        })
        .collect();
    assert!(outs.len() > 1);
}

#[test]
fn trees_listing_and_count() {
    let r = cli(&["trees", "-n", "4"]);
    assert_eq!(r.exit_code, EXIT_OK);
    assert_eq!(r.stdout.lines().count(), 6);
    assert_eq!(r.stdout.lines().next(), Some("1:2 1:3 1:4"));
    let r = cli(&["trees", "-n", "4", "--format", "parents"]);
    assert_eq!(r.stdout.lines().next(), Some("1 1 1"));
    assert_eq!(r.stdout.lines().last(), Some("1 2 3"));
    assert_eq!(cli(&["trees", "-n", "8", "--count"]).stdout, "5040\n");
    assert_eq!(cli(&["trees", "-n", "1"]).exit_code, EXIT_ERROR);
}

#[test]
fn consensus_examples() {
    let star = construct_edges("3", "2");
    let r = cli_stdin(&["consensus", "--dt", "0.01", "--steps", "2000"], &star);
    assert_eq!(r.exit_code, EXIT_OK, "{}", r.stderr);
    let lines: Vec<&str> = r.stdout.lines().collect();
    assert_eq!(lines[0], "t,x1,x2,x3,disagreement");
    assert_eq!(lines.len(), 1 + 2001 + 1);
    let last_row = lines[lines.len() - 2];
    let d: f64 = last_row.rsplit(',').next().unwrap().parse().unwrap();
    assert!(d < 1e-6, "{last_row}");
    assert!(lines
        .last()
        .unwrap()
        .starts_with("# algebraic_connectivity=1,"));

    let x0 = scratch("x0_pair.txt");
    fs::write(&x0, "0 1\n").unwrap();
    let r = cli_stdin(
        &["consensus", "--x0", x0.to_str().unwrap(), "--stride", "100"],
        "2 0\n",
    );
    assert_eq!(r.exit_code, EXIT_OK, "{}", r.stderr);
    let data: Vec<&str> = r
        .stdout
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .collect();
    assert_eq!(data.len(), 21);
    assert!(data.iter().all(|l| l.ends_with(",1")), "{}", r.stdout);

    let x0 = scratch("x0_const.txt");
    fs::write(&x0, "2.5, 2.5, 2.5").unwrap();
    let out = scratch("traj.csv");
    let r = cli_stdin(
        &[
            "consensus",
            "-",
            "--x0",
            x0.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ],
        &star,
    );
    assert_eq!(r.exit_code, EXIT_OK);
    assert!(r.stdout.starts_with('#'));
    let traj = fs::read_to_string(&out).unwrap();
    assert!(traj.lines().skip(1).all(|l| l.ends_with(",0")), "{traj}");
}

#[test]
fn consensus_rejects_bad_runs() {
    let k4 = construct_edges("4", "12");
    assert_eq!(
        cli_stdin(&["consensus", "--dt", "0.05"], &k4).exit_code,
        EXIT_ERROR
    );
    let x0 = scratch("x0_bad.txt");
    fs::write(&x0, "1 2 nope").unwrap();
    assert_eq!(
        cli_stdin(&["consensus", "--x0", x0.to_str().unwrap()], &k4).exit_code,
        EXIT_ERROR
    );
    fs::write(&x0, "1 2").unwrap();
    assert_eq!(
        cli_stdin(&["consensus", "--x0", x0.to_str().unwrap()], &k4).exit_code,
        EXIT_ERROR
    );
    assert_eq!(
        cli(&["consensus", "/nonexistent/graph.txt"]).exit_code,
        EXIT_ERROR
    );
}

#[test]
fn malformed_graphs_exit_two() {
    let bad = [
        "",
        "3",
        "3 2\n1 2\n",
        "3 1\n1 1\n",
        "3 1\n1 4\n",
        "2 2\n1 2\n1 2\n",
        "x y\n",
        "{\"n\": 3, \"arcs\": [[1, 2, 3]]}",
        "{\"n\": -1}",
        "{",
    ];
    for input in bad {
        for mode in ["numeric", "exact", "spread"] {
            let r = cli_stdin(&["spectrum", "--mode", mode], input);
            assert_eq!(r.exit_code, EXIT_ERROR, "{mode} {input:?}: {}", r.stdout);
        }
        assert_eq!(
            cli_stdin(&["consensus"], input).exit_code,
            EXIT_ERROR,
            "{input:?}"
        );
    }
}

#[test]
fn help_and_unknown_commands() {
    let r = cli(&["--help"]);
    assert_eq!(r.exit_code, EXIT_OK);
    for sub in ["construct", "spectrum", "verify", "trees", "consensus"] {
        assert!(r.stdout.contains(sub), "{sub}");
        assert_eq!(cli(&[sub, "--help"]).exit_code, EXIT_OK);
    }
    assert_eq!(cli(&["frobnicate"]).exit_code, EXIT_ERROR);
    assert_eq!(cli(&[]).exit_code, EXIT_ERROR);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_syncgraph");
    let ok = Command::new(bin)
        .args(["construct", "-n", "2", "-m", "1"])
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(String::from_utf8(ok.stdout).unwrap(), "2 1\n1 2\n");
    let bad = Command::new(bin)
        .args(["construct", "-n", "5", "-m", "3"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn arbitrary_input_never_panics(input in ".{0,80}") {
        let r = cli_stdin(&["spectrum", "--mode", "spread"], &input);
        prop_assert!(r.exit_code == EXIT_OK || r.exit_code == EXIT_ERROR);
        let r = cli_stdin(&["consensus", "--steps", "5"], &input);
        prop_assert!(r.exit_code == EXIT_OK || r.exit_code == EXIT_ERROR);
    }

    #[test]
    fn near_miss_edge_lists_never_panic(n in 0usize..6, arcs in proptest::collection::vec((0usize..7, 0usize..7), 0..8)) {
        let mut text = format!("{n} {}\n", arcs.len());
        for (t, h) in &arcs {
            text.push_str(&format!("{t} {h}\n"));
        }
        let r = cli_stdin(&["spectrum", "--mode", "exact"], &text);
        prop_assert!(r.exit_code == EXIT_OK || r.exit_code == EXIT_ERROR);
    }
}
