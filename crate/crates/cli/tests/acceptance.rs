//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::collections::BTreeMap;
use std::panic::{self, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use strom_core::diagnostics::Code;
use strom_core::engine::{Event, Monitor, Value, Verbosity, VerdictKind};
use strom_core::time::Timestamp;
use strom_core::trace::{read_events, write_events, ReadOptions};
use strom_core::{check, CheckedSpec};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn corpus(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/corpus").join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn checked(src: &str) -> Arc<CheckedSpec> {
    Arc::new(check(src).unwrap_or_else(|d| panic!("rejected: {d:#?}")))
}

fn secs(s: u64) -> Timestamp {
    Timestamp::from_secs(s)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("rejection corpus", rejection_corpus),
        ("dependency graph and memory bounds", graph_and_bounds),
        ("sliding window truth sequence", window_sequence),
        ("reference evaluator equivalence", reference_equivalence),
        ("watchdog timing", watchdog),
        ("parameterized lifecycle", lifecycle),
        ("memory ceiling", memory_ceiling),
        ("csv round-trip", csv_round_trip),
        ("end-to-end determinism", determinism),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(run))
            .unwrap_or_else(|p| {
                let msg = p
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                Err(format!("panicked: {msg}"))
            });
        let ms = start.elapsed().as_millis();
        match outcome {
            Ok(detail) => println!("[PASS] {} {name}: {detail} ({ms} ms)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {} {name}: {detail} ({ms} ms)", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}

fn rejection_corpus() -> Outcome {
    let start = Instant::now();
    let rejected = [
        ("cyclic.lola", Code::ZeroWeightCycle),
        ("pacing_mismatch.lola", Code::PacingEntailment),
        ("filter_gap.lola", Code::WhenConditionGap),
        ("shifted_periodic.lola", Code::PeriodicLifecycleMismatch),
    ];
    for (name, code) in rejected {
        match check(&corpus(name)) {
            Ok(_) => return Err(format!("{name} accepted")),
            Err(d) => {
                let codes: Vec<Code> = d.iter().map(|d| d.code).collect();
                ensure(codes == [code], || format!("{name}: got {codes:?}, want [{code:?}]"))?;
            }
        }
    }
    let cyc = check(&corpus("cyclic.lola")).unwrap_err();
    ensure(cyc[0].message.contains("weight 0"), || cyc[0].message.clone())?;
    let accepted = [
        "running_sum.lola",
        "static_intruder.lola",
        "held_intruder.lola",
        "dynamic_intruder.lola",
        "intruders.lola",
    ];
    for name in accepted {
        check(&corpus(name)).map_err(|d| format!("{name} rejected: {d:?}"))?;
    }
    let took = start.elapsed();
    ensure(took < Duration::from_secs(1), || format!("took {took:?}"))?;
    Ok(format!("4 rejected with exact codes, 5 accepted in {took:?}"))
}

fn graph_and_bounds() -> Outcome {
    let c = checked(&corpus("static_intruder.lola"));
    let name = |s| c.spec.name(s).to_string();
    let mut edges: Vec<(String, String, i64)> =
        c.graph.edges.iter().map(|e| (name(e.from), name(e.to), e.weight)).collect();
    edges.sort();
    let mut expected: Vec<(String, String, i64)> = [
        ("closer", "distance", -1),
        ("closer", "distance", 0),
        ("distance", "lat", 0),
        ("distance", "lon", 0),
        ("trigger_0", "closer", 0),
        ("trigger_0", "distance", 0),
    ]
    .iter()
    .map(|(a, b, w)| (a.to_string(), b.to_string(), *w))
    .collect();
    expected.sort();
    ensure(edges == expected, || format!("edges {edges:?}"))?;
    for s in &c.spec.streams {
        let want = u32::from(s.name == "distance");
        ensure(c.bounds.get(s.id) == want, || format!("bound of {} is {}", s.name, c.bounds.get(s.id)))?;
    }
    Ok("6 edges match, distance=1, others=0".into())
}

fn window_sequence() -> Outcome {
    let c = checked(
        "input closer: Bool\n\
         output w @1Hz@ := closer.aggregate(over_exactly: 5s, using: forall).defaults(to: false)\n",
    );
    let id = c.spec.lookup("closer").unwrap();
    let mut m = Monitor::with_verbosity(c.clone(), Timestamp::ZERO, Verbosity::AllStreams);
    let mut out = Vec::new();
    for (ms, v) in [(700, false), (2700, true), (4000, true), (5400, true), (6500, false)] {
        let e = Event::new(Timestamp::from_millis(ms)).with(id, Value::Bool(v));
        out.extend(m.accept_event(&e).map_err(|e| e.to_string())?);
    }
    out.extend(m.advance_time(secs(7)).map_err(|e| e.to_string())?);
    let seq: Vec<String> = out
        .iter()
        .filter(|v| v.kind == VerdictKind::Value)
        .map(|v| format!("{}:{}", v.time.secs_string(), if v.message == "true" { "T" } else { "F" }))
        .collect();
    let want = ["1:F", "2:F", "3:F", "4:F", "5:F", "6:T", "7:F"];
    ensure(seq == want, || format!("got {seq:?}"))?;
    Ok("F,F,F,F,F,T,F at 1..7 s".into())
}

/// A stream reference inside a generated output expression.
struct Term {
    target: usize,
    offset: usize,
    default: f64,
    coef: f64,
    minus: bool,
}

struct Gen {
    outputs: Vec<(f64, Vec<Term>)>,
}

const COEFS: [f64; 4] = [0.25, 0.5, 0.75, 1.0];

impl Gen {
    fn random(rng: &mut StdRng) -> Gen {
        let n = rng.random_range(1..=5);
        let mut outputs = Vec::new();
        for k in 1..=n {
            let mut terms = Vec::new();
            let count = rng.random_range(1..=4);
            for t in 0..count {
                let offset = rng.random_range(0..=3);
                let target = if t == 0 {
                    0
                } else if offset == 0 {
                    rng.random_range(0..k)
                } else {
                    rng.random_range(0..=n)
                };
                terms.push(Term {
                    target,
                    offset,
                    default: COEFS[rng.random_range(0..4)],
                    coef: COEFS[rng.random_range(0..4)],
                    minus: rng.random_bool(0.4),
                });
            }
            outputs.push((COEFS[rng.random_range(0..4)], terms));
        }
        Gen { outputs }
    }

    fn name(i: usize) -> String {
        if i == 0 {
            "x".into()
        } else {
            format!("s{i}")
        }
    }

    fn source(&self) -> String {
        let mut src = String::from("input x: Float\n");
        for (k, (c, terms)) in self.outputs.iter().enumerate() {
            src.push_str(&format!("output {}: Float := {c:?}", Gen::name(k + 1)));
            for t in terms {
                let op = if t.minus { '-' } else { '+' };
                let r = if t.offset == 0 {
                    Gen::name(t.target)
                } else {
                    format!("{}.offset(by: -{}).defaults(to: {:?})", Gen::name(t.target), t.offset, t.default)
                };
                src.push_str(&format!(" {op} {:?} * {r}", t.coef));
            }
            src.push('\n');
        }
        src
    }

    /// Value of stream `k` at position `n`, straight from the equations over
    /// the full input history.
    fn value(&self, k: usize, n: usize, xs: &[f64], memo: &mut BTreeMap<(usize, usize), f64>) -> f64 {
        if k == 0 {
            return xs[n];
        }
        if let Some(v) = memo.get(&(k, n)) {
            return *v;
        }
        let (c, terms) = &self.outputs[k - 1];
        let mut acc = *c;
        for t in terms {
            let v = if t.offset > n {
                t.default
            } else {
                self.value(t.target, n - t.offset, xs, memo)
            };
            if t.minus {
                acc -= t.coef * v;
            } else {
                acc += t.coef * v;
            }
        }
        memo.insert((k, n), acc);
        acc
    }
}

fn reference_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut compared = 0usize;
    for case in 0..1000 {
        let g = Gen::random(&mut rng);
        let src = g.source();
        let c = check(&src).map_err(|d| format!("case {case} rejected: {d:?}\n{src}"))?;
        let c = Arc::new(c);
        let x = c.spec.lookup("x").unwrap();
        let len = rng.random_range(1..=50);
        let xs: Vec<f64> = (0..len).map(|_| rng.random_range(-8..=8) as f64 * 0.5).collect();
        let mut m = Monitor::new(c.clone(), Timestamp::ZERO);
        let mut memo = BTreeMap::new();
        for (n, xv) in xs.iter().enumerate() {
            let e = Event::new(Timestamp::from_millis(n as u64 + 1)).with(x, Value::Float(*xv));
            m.accept_event(&e).map_err(|e| format!("case {case}: {e}"))?;
            for k in 1..=g.outputs.len() {
                let want = Value::Float(g.value(k, n, &xs, &mut memo));
                let got = m.last_value(&Gen::name(k), &[]);
                if got.as_ref() != Some(&want) {
                    return Err(format!(
                        "case {case}, event {n}, {}: engine {got:?}, reference {want:?}\n{src}",
                        Gen::name(k)
                    ));
                }
                compared += 1;
            }
        }
    }
    let took = start.elapsed();
    ensure(took < Duration::from_secs(60), || format!("took {took:?}"))?;
    Ok(format!("1000 specs, {compared} values, 0 mismatches in {took:?}"))
}

fn watchdog() -> Outcome {
    let mut rng = StdRng::seed_from_u64(9);
    let mut runs = 0;
    let mut fired_total = 0;
    for _ in 0..200 {
        let t = rng.random_range(1..=5u64);
        let src = corpus("watchdog.lola").replace("@3s@", &format!("@{t}s@"));
        let c = checked(&src);
        let (e_id, c_id) = (c.spec.lookup("e").unwrap(), c.spec.lookup("c").unwrap());
        let mut m = Monitor::with_verbosity(c.clone(), Timestamp::ZERO, Verbosity::AllStreams);
        let mut now = 0u64;
        let mut alive_until: Option<u64> = None;
        let mut spawns = Vec::new();
        let mut c_log: Vec<(u64, bool)> = Vec::new();
        let mut out = Vec::new();
        for _ in 0..rng.random_range(1..30) {
            now += rng.random_range(1..3000) * 1_000_000;
            let mut e = Event::new(Timestamp(now));
            let spawn = rng.random_bool(0.4);
            if spawn || rng.random_bool(0.5) {
                e = e.with(e_id, Value::Bool(spawn));
            }
            if e.values.is_empty() || rng.random_bool(0.3) {
                let v = rng.random_bool(0.5);
                e = e.with(c_id, Value::Bool(v));
                c_log.push((now, v));
            }
            if alive_until.is_some_and(|end| now > end) {
                alive_until = None;
            }
            if spawn && alive_until.is_none() {
                spawns.push(now);
                alive_until = Some(now + t * 1_000_000_000);
            }
            out.extend(m.accept_event(&e).map_err(|e| e.to_string())?);
        }
        out.extend(m.advance_time(Timestamp(now + 6_000_000_000)).map_err(|e| e.to_string())?);
        ensure(m.instances("timer").is_empty(), || "timer still alive at the end".into())?;
        let timer: Vec<u64> = out
            .iter()
            .filter(|v| v.kind == VerdictKind::Value && v.stream == "timer")
            .map(|v| v.time.0)
            .collect();
        let expected: Vec<u64> = spawns.iter().map(|s| s + t * 1_000_000_000).collect();
        ensure(timer == expected, || format!("t={t}: timer at {timer:?}, spawns {spawns:?}"))?;
        let fired: Vec<u64> = out
            .iter()
            .filter(|v| v.kind == VerdictKind::Trigger)
            .map(|v| v.time.0)
            .collect();
        let want_fired: Vec<u64> = expected
            .iter()
            .copied()
            .filter(|&d| !c_log.iter().rev().find(|(ct, _)| *ct <= d).is_some_and(|(_, v)| *v))
            .collect();
        ensure(fired == want_fired, || format!("t={t}: fired {fired:?}, want {want_fired:?}"))?;
        runs += 1;
        fired_total += fired.len();
    }
    Ok(format!("{runs} random runs, timers exact to the ns, {fired_total} missed-deadline verdicts as predicted"))
}

const TEN_S: u64 = 10_000_000_000;

/// Predicted lifecycle of intruder ids: spawned on the first fix, closed at
/// the first 10 s tick after spawn whose window holds no fix.
#[derive(Default)]
struct Intruders {
    alive: BTreeMap<u64, (u64, Vec<u64>)>,
}

impl Intruders {
    fn ticks(&mut self, upto: u64, inclusive: bool) {
        self.alive.retain(|_, (next, fixes)| loop {
            if *next > upto || (*next == upto && !inclusive) {
                return true;
            }
            let tick = *next;
            if !fixes.iter().any(|&f| f > tick - TEN_S && f <= tick) {
                return false;
            }
            *next += TEN_S;
        });
    }

    /// Returns whether this fix spawned the id.
    fn fix(&mut self, id: u64, t: u64) -> bool {
        let fresh = !self.alive.contains_key(&id);
        let entry = self.alive.entry(id).or_insert((t + TEN_S, Vec::new()));
        entry.1.push(t);
        fresh
    }
}

struct IntruderTrace {
    events: Vec<(u64, Option<u64>)>,
}

fn intruder_trace(rng: &mut StdRng) -> IntruderTrace {
    let ids = rng.random_range(1..=10u64);
    let mut now = 0;
    let mut events = Vec::new();
    for _ in 0..rng.random_range(10..120) {
        now += rng.random_range(1..4000u64) * 1_000_000;
        let fix = rng.random_bool(0.6).then(|| rng.random_range(0..ids));
        events.push((now, fix));
    }
    IntruderTrace { events }
}

fn intruder_event(c: &CheckedSpec, rng: &mut StdRng, t: u64, fix: Option<u64>) -> Event {
    let mut e = Event::new(Timestamp(t));
    let mut put = |name: &str, v: Value| {
        if let Some(id) = c.spec.lookup(name) {
            e.values.insert(id, v);
        }
    };
    let near = |rng: &mut StdRng| rng.random_range(-100..100) as f64 * 0.001;
    match fix {
        Some(i) => {
            put("intruder_id", Value::UInt(i));
            put("intruder_lat", Value::Float(10.0 + near(rng)));
            put("intruder_lon", Value::Float(20.0 + near(rng)));
        }
        None => {
            put("lat", Value::Float(10.0 + near(rng)));
            put("lon", Value::Float(20.0 + near(rng)));
        }
    }
    e
}

fn lifecycle() -> Outcome {
    let c = checked(&corpus("intruders.lola"));
    let mut rng = StdRng::seed_from_u64(12);
    let mut cycles = 0;
    let mut respawns = 0;
    let mut closes = 0;
    for run in 0..100 {
        let trace = intruder_trace(&mut rng);
        let mut m = Monitor::new(c.clone(), Timestamp::ZERO);
        let mut oracle = Intruders::default();
        let mut seen = std::collections::BTreeSet::new();
        let compare = |m: &Monitor, oracle: &Intruders, at: u64| -> Result<(), String> {
            let got: Vec<u64> = m
                .instances("distance")
                .iter()
                .map(|p| match p[0] {
                    Value::UInt(u) => u,
                    _ => unreachable!(),
                })
                .collect();
            let want: Vec<u64> = oracle.alive.keys().copied().collect();
            ensure(got == want, || format!("run {run} at {at} ns: instances {got:?}, predicted {want:?}"))
        };
        for &(t, fix) in &trace.events {
            while let Some(d) = m.next_deadline().filter(|d| d.0 < t) {
                let before = oracle.alive.len();
                m.advance_time(d).map_err(|e| e.to_string())?;
                oracle.ticks(d.0, true);
                closes += before - oracle.alive.len();
                compare(&m, &oracle, d.0)?;
                cycles += 1;
            }
            let e = intruder_event(&c, &mut rng, t, fix);
            m.accept_event(&e).map_err(|e| e.to_string())?;
            oracle.ticks(t, false);
            let spawned = fix.map(|id| (id, oracle.fix(id, t)));
            oracle.ticks(t, true);
            compare(&m, &oracle, t)?;
            cycles += 1;
            if let Some((id, true)) = spawned {
                let len = m.buffer_len("distance", &[Value::UInt(id)]);
                ensure(len == Some(1), || format!("run {run}: id {id} spawned at {t} with history {len:?}"))?;
                if !seen.insert(id) {
                    respawns += 1;
                }
            }
        }
    }

    let ids = |n| c.spec.lookup(n).unwrap();
    let mut m = Monitor::new(c.clone(), Timestamp::ZERO);
    let fix = Event::new(Timestamp::from_millis(500))
        .with(ids("intruder_id"), Value::UInt(7))
        .with(ids("intruder_lat"), Value::Float(1.0))
        .with(ids("intruder_lon"), Value::Float(1.0));
    m.accept_event(&fix).map_err(|e| e.to_string())?;
    m.advance_time(Timestamp(10_500_000_000 - 1)).map_err(|e| e.to_string())?;
    ensure(m.instances("stale").len() == 1, || "closed before 10 s".into())?;
    m.advance_time(Timestamp::from_millis(10_500)).map_err(|e| e.to_string())?;
    ensure(m.instances("stale").is_empty(), || "not closed at exactly 10 s".into())?;
    ensure(m.instance_count() == 0, || format!("{} instances left", m.instance_count()))?;

    ensure(respawns > 0 && closes > 0, || "traces never closed and respawned an id".into())?;
    Ok(format!("100 traces, {cycles} cycles, {closes} closes, {respawns} respawns with empty history, stale at exactly 10 s"))
}

fn drone_events(c: &CheckedSpec) -> Vec<Event> {
    let text = std::fs::read_to_string(data_path("drone.csv")).unwrap();
    read_events(&text, &c.spec, &ReadOptions { lax: true, ..ReadOptions::default() }).unwrap()
}

fn memory_ceiling() -> Outcome {
    let mut runs: Vec<(&str, Arc<CheckedSpec>, Vec<Event>)> = Vec::new();
    for name in ["static_intruder.lola", "held_intruder.lola", "sync_intruder.lola"] {
        let c = checked(&corpus(name));
        let events = drone_events(&c);
        runs.push((name, c, events));
    }
    let mut rng = StdRng::seed_from_u64(7);
    for name in ["intruders.lola", "intruders_any.lola", "dynamic_intruder.lola"] {
        let c = checked(&corpus(name));
        for _ in 0..20 {
            let trace = intruder_trace(&mut rng);
            let events: Vec<Event> = trace
                .events
                .iter()
                .map(|&(t, fix)| intruder_event(&c, &mut rng, t, fix))
                .collect();
            runs.push((name, c.clone(), events));
        }
    }
    let c = checked(&corpus("watchdog.lola"));
    let (e, cc) = (c.spec.lookup("e").unwrap(), c.spec.lookup("c").unwrap());
    let events = (1..200)
        .map(|i| {
            Event::new(Timestamp::from_millis(i * 700))
                .with(e, Value::Bool(i % 3 == 0))
                .with(cc, Value::Bool(i % 5 == 0))
        })
        .collect();
    runs.push(("watchdog.lola", c, events));

    let mut total = 0;
    for (name, c, events) in runs {
        let mut m = Monitor::new(c.clone(), Timestamp::ZERO);
        for e in &events {
            m.accept_event(e).map_err(|err| format!("{name}: {err}"))?;
        }
        m.finish().map_err(|err| format!("{name}: {err}"))?;
        ensure(m.invariant_violations().is_empty(), || format!("{name}: {:?}", m.invariant_violations()))?;
        for s in c.spec.outputs() {
            let peak = m.peak_buffer(&s.name);
            let limit = c.bounds.get(s.id) as usize + 1;
            ensure(peak <= limit, || format!("{name}: {} held {peak}, bound+1 = {limit}", s.name))?;
        }
        total += events.len();
    }
    Ok(format!("{total} events across all corpus traces, 0 violations"))
}

fn csv_round_trip() -> Outcome {
    let c = checked("input a: Int\ninput b: Int\noutput s @a || b@ := a.hold(or: 0) + b.hold(or: 0)\n");
    let (a, b) = (c.spec.lookup("a").unwrap(), c.spec.lookup("b").unwrap());
    let events = read_events("a,b,time\n1,2,0\n#,3,1\n3,#,2\n", &c.spec, &ReadOptions::default())
        .map_err(|e| e.to_string())?;
    let want = vec![
        Event::new(secs(0)).with(a, Value::Int(1)).with(b, Value::Int(2)),
        Event::new(secs(1)).with(b, Value::Int(3)),
        Event::new(secs(2)).with(a, Value::Int(3)),
    ];
    ensure(events == want, || format!("parsed {events:?}"))?;

    let c = checked(
        "input i: Int\ninput u: UInt\ninput f: Float\ninput t: Bool\ninput s: String\n\
         output o @i || u || f || t || s@ := i.hold(or: 0)\n",
    );
    let ids: Vec<_> = ["i", "u", "f", "t", "s"].iter().map(|n| c.spec.lookup(n).unwrap()).collect();
    let mut rng = StdRng::seed_from_u64(8);
    let mut rows = 0;
    for _ in 0..300 {
        let mut now = 0u64;
        let mut log = Vec::new();
        for _ in 0..rng.random_range(0..40) {
            now += rng.random_range(0..3_000_000_000u64);
            let mut e = Event::new(Timestamp(now));
            while e.values.is_empty() {
                for (k, &id) in ids.iter().enumerate() {
                    if !rng.random_bool(0.5) {
                        continue;
                    }
                    let v = match k {
                        0 => Value::Int(rng.random()),
                        1 => Value::UInt(rng.random()),
                        2 => Value::Float(f64::from_bits(rng.random::<u64>() & !(0x7ff << 52)) * 1e300),
                        3 => Value::Bool(rng.random()),
                        _ => Value::str(["plain", "with, comma", "quo\"te", "", "ünï"][rng.random_range(0..5)]),
                    };
                    e = e.with(id, v);
                }
            }
            log.push(e);
        }
        let bytes = write_events(Vec::new(), &c.spec, &log).map_err(|e| e.to_string())?;
        let text = String::from_utf8(bytes).map_err(|e| e.to_string())?;
        let back = read_events(&text, &c.spec, &ReadOptions::default()).map_err(|e| format!("{e}\n{text}"))?;
        ensure(back == log, || format!("round-trip changed the log\n{text}"))?;
        rows += log.len();
    }
    Ok(format!("three-row trace exact, 300 random logs ({rows} rows) round-trip"))
}

fn determinism() -> Outcome {
    let csv = data_path("drone.csv");
    let spec = data_path("drone.lola");
    let mut outputs = Vec::new();
    for _ in 0..5 {
        let o = Command::new(env!("CARGO_BIN_EXE_strom"))
            .args(["monitor", "--offline", "relative", "--csv-in"])
            .arg(&csv)
            .arg(&spec)
            .output()
            .map_err(|e| e.to_string())?;
        outputs.push((o.status.code(), o.stdout));
    }
    ensure(outputs[0].0 == Some(0), || format!("exit {:?}", outputs[0].0))?;
    ensure(!outputs[0].1.is_empty(), || "no verdicts".into())?;
    ensure(outputs.iter().all(|o| *o == outputs[0]), || "runs differ".into())?;
    let lines = outputs[0].1.iter().filter(|&&b| b == b'\n').count();
    Ok(format!("5 runs byte-identical, {lines} verdict lines, exit 0"))
}
