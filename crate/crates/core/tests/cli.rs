use std::process::Command;

fn sdnbench(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_sdnbench"))
        .args(args)
        .env_remove("SDNBENCH_SEED")
        .output()
        .unwrap()
}

fn stdout(o: &std::process::Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn topo_dump_and_links() {
    let o = sdnbench(&["topo", "--kind", "fat-tree", "--k", "4", "--dump"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 36);
    let o = sdnbench(&["topo", "--kind", "spine-leaf", "--spine", "2", "--leaf", "3", "--hosts-per-leaf", "2", "--links"]);
    assert_eq!(stdout(&o).lines().count(), 12);
    let o = sdnbench(&["topo", "--kind", "star", "--hosts", "2", "--dump"]);
    assert_eq!(
        stdout(&o),
        "<Host h1: ip=10.0.0.1 mac=00:00:00:00:00:01>\n<Host h2: ip=10.0.0.2 mac=00:00:00:00:00:02>\n<Switch s1: ports=[s1-eth1,s1-eth2]>\n"
    );
}

#[test]
fn topo_dot_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.dot");
    let o = sdnbench(&["topo", "--kind", "binary-tree", "--hosts", "8", "--dot", path.to_str().unwrap()]);
    assert!(o.status.success());
    let dot = std::fs::read_to_string(path).unwrap();
    assert_eq!(dot.matches("--").count(), 14);
}

#[test]
fn invalid_configs_exit_nonzero() {
    let o = sdnbench(&["run", "--kind", "fat-tree", "--k", "4", "--controller", "l2", "--metric", "rtt"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("l2-stp"));
    let o = sdnbench(&["topo", "--kind", "fat-tree", "--k", "3"]);
    assert!(!o.status.success());
    let o = sdnbench(&["run", "--kind", "star", "--hosts", "2", "--bogus"]);
    assert!(!o.status.success());
}

#[test]
fn run_writes_no_route_row() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("b.csv");
    let o = sdnbench(&[
        "run", "--kind", "linear", "--hosts", "128", "--controller", "l2", "--metric", "bandwidth",
        "--duration", "15", "--control-latency-ms", "75", "--trials", "1", "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out).unwrap();
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows[0], "topology,controller_app,hosts,switches,duration_s,trial,transfer_bytes,bandwidth_mbps,throughput_mbps,status,seed");
    assert_eq!(rows.len(), 3);
    assert!(rows[1..].iter().all(|r| r.contains(",0,0,0,no_route,")));
}

#[test]
fn seed_from_environment() {
    let run = |env: Option<&str>, extra: &[&str]| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_sdnbench"));
        c.args(["run", "--kind", "star", "--hosts", "2", "--trials", "1", "--loss", "0.1"]).args(extra);
        match env {
            Some(v) => c.env("SDNBENCH_SEED", v),
            None => c.env_remove("SDNBENCH_SEED"),
        };
        String::from_utf8(c.output().unwrap().stdout).unwrap()
    };
    assert_eq!(run(Some("77"), &[]), run(None, &["--seed", "77"]));
    assert!(run(Some("77"), &[]).lines().last().unwrap().ends_with(",77"));
}

#[test]
fn sweep_writes_each_section() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.ini");
    std::fs::write(
        &cfg,
        format!(
            "out-dir = {}\ntrials = 1\nseed = 3\n\n[star]\nkind = star\nhosts = 2,4\nmetric = rtt\nout = star.csv\n\n[ft]\nkind = fat-tree\nk = 2\ncontroller = l2-stp\nmetric = bandwidth\nduration = 1..3:1\nout = ft.csv\n",
            dir.path().display()
        ),
    )
    .unwrap();
    let o = sdnbench(&["sweep", "--config", cfg.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let star = std::fs::read_to_string(dir.path().join("star.csv")).unwrap();
    assert_eq!(star.lines().count(), 1 + 2 * (11 + 11));
    let ft = std::fs::read_to_string(dir.path().join("ft.csv")).unwrap();
    assert_eq!(ft.lines().count(), 1 + 3 * 2);
}
