use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};
use std::thread;
use std::time::Duration;

fn strom(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_strom"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
        .display()
        .to_string()
}

fn corpus(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/corpus")
        .join(name)
        .display()
        .to_string()
}

fn temp(name: &str, contents: &str) -> String {
    let dir = std::env::temp_dir().join(format!("strom-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path.display().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn analyze_accepts_and_rejects() {
    let ok = strom(&["analyze", &corpus("held_intruder.lola")]);
    assert_eq!(ok.status.code(), Some(0), "{}", stderr(&ok));
    assert!(stdout(&ok).contains("evaluation layers:"));

    let cyc = strom(&["analyze", &corpus("cyclic.lola")]);
    assert_eq!(cyc.status.code(), Some(1));
    assert!(stderr(&cyc).contains("error[W001]"), "{}", stderr(&cyc));

    let pace = strom(&["analyze", &corpus("pacing_mismatch.lola")]);
    assert_eq!(pace.status.code(), Some(1));
    assert!(stderr(&pace).contains("error[C"), "{}", stderr(&pace));
}

#[test]
fn analyze_dot() {
    let o = strom(&["analyze", "--dot", &corpus("static_intruder.lola")]);
    assert_eq!(o.status.code(), Some(0));
    let dot = stdout(&o);
    assert!(dot.starts_with("digraph"), "{dot}");
    assert!(dot.contains("closer") && dot.contains("distance"));
}

#[test]
fn monitor_rejects_before_reading_trace() {
    let o = strom(&[
        "monitor",
        "--offline",
        "relative",
        "--csv-in",
        "/nonexistent.csv",
        &corpus("filter_gap.lola"),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).is_empty());
}

#[test]
fn three_row_trace_all_streams() {
    let spec = temp("pass.lola", "input a: Int\ninput b: Int\noutput s @a || b@ := a.hold(or: 0) + b.hold(or: 0)\n");
    let trace = temp("ab.csv", "a,b,time\n1,2,0\n#,3,1\n3,#,2\n");
    let o = strom(&[
        "monitor", "--offline", "relative", "--csv-in", &trace, "--verbosity", "all-streams", &spec,
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o), "0,s,3\n1,s,4\n2,s,6\n");
}

#[test]
fn header_only_trace() {
    let trace = temp("empty.csv", "lat,lon,intruder_lat,intruder_lon,time\n");
    let o = strom(&["monitor", "--offline", "relative", "--csv-in", &trace, &data("drone.lola")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).is_empty());
}

#[test]
fn trace_errors_name_the_line() {
    let spec = temp("a.lola", "input a: Int\noutput b := a\n");
    for (body, needle) in [
        ("a,time\n1,0\n#,1\n", "line 3"),
        ("a,time\n1,2\n1,1\n", "line 3"),
        ("a,time\nx,0\n", "line 2"),
        ("b,time\n1,0\n", "header"),
    ] {
        let trace = temp("bad.csv", body);
        let o = strom(&["monitor", "--offline", "relative", "--csv-in", &trace, &spec]);
        assert_eq!(o.status.code(), Some(2), "{body}");
        assert!(stderr(&o).contains(needle), "{body}: {}", stderr(&o));
    }
}

/// Direct reading of the tutorial spec against the raw rows: at each full
/// second t >= 5, every distance computed in (t-5, t] is no larger than the
/// one before it, and the latest distance is below 0.1.
fn drone_oracle(csv: &str) -> Vec<u64> {
    let mut held = [None::<f64>; 4];
    let mut points: Vec<(f64, f64, bool)> = Vec::new();
    let mut prev: Option<f64> = None;
    for line in csv.lines().skip(1) {
        let cells: Vec<&str> = line.split(',').collect();
        for i in 0..4 {
            if cells[i] != "#" {
                held[i] = Some(cells[i].parse().unwrap());
            }
        }
        let t: f64 = cells[4].parse().unwrap();
        let g = |i: usize| held[i].unwrap_or(0.0);
        let d = ((g(2) - g(0)).powi(2) + (g(3) - g(1)).powi(2)).sqrt();
        points.push((t, d, prev.is_none_or(|p| p >= d)));
        prev = Some(d);
    }
    let last = points.last().unwrap().0;
    let mut fired = Vec::new();
    let mut t = 1u64;
    while t as f64 <= last {
        let tf = t as f64;
        let all = points
            .iter()
            .filter(|p| p.0 > tf - 5.0 && p.0 <= tf)
            .all(|p| p.2);
        let dist = points.iter().rev().find(|p| p.0 <= tf).map_or(1.0, |p| p.1);
        if t >= 5 && all && dist < 0.1 {
            fired.push(t);
        }
        t += 1;
    }
    fired
}

#[test]
fn drone_trace_matches_oracle() {
    let csv = std::fs::read_to_string(data("drone.csv")).unwrap();
    let expected = drone_oracle(&csv);
    assert!(!expected.is_empty());
    let o = strom(&["monitor", "--offline", "relative", "--csv-in", &data("drone.csv"), &data("drone.lola")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let got: Vec<u64> = stdout(&o)
        .lines()
        .map(|l| {
            let (t, rest) = l.split_once(',').unwrap();
            assert_eq!(rest, "trigger_0,Too close to the intruder");
            t.parse().unwrap()
        })
        .collect();
    assert_eq!(got, expected);
}

#[test]
fn online_with_time_column() {
    let spec = temp("on.lola", "input a: Int\ntrigger a > 2 \"big\"\n");
    let mut child = Command::new(env!("CARGO_BIN_EXE_strom"))
        .args(["monitor", "--online", "--stdin", &spec])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(b"a,time\n1,0\n3,0.5\n5,1\n")
        .unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "0.5,trigger_0,big\n1,trigger_0,big\n");
}

#[test]
fn online_wall_clock_fires_without_events() {
    let spec = temp("idle.lola", "input a: Int\ntrigger @10Hz@ a.hold(or: 0) == 0 \"idle\"\n");
    let mut child = Command::new(env!("CARGO_BIN_EXE_strom"))
        .args(["monitor", "--online", "--stdin", &spec])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    let mut input = child.stdin.take().unwrap();
    input.write_all(b"a\n").unwrap();
    input.flush().unwrap();
    thread::sleep(Duration::from_millis(450));
    input.write_all(b"1\n").unwrap();
    drop(input);
    let o = child.wait_with_output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    let idle = stdout(&o).lines().filter(|l| l.ends_with(",idle")).count();
    assert!(idle >= 2, "{}", stdout(&o));
}
