use std::collections::{BTreeMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use crate::frontend::ast::Literal;
use crate::ir::{Clause, ClauseKind, ExprId, ExprKind, StreamId, StreamKind};
use crate::time::{Duration, Timestamp};
use crate::types::{PacingType, ValueType};
use crate::CheckedSpec;

use super::eval::{Ctx, Fault};
use super::value::Value;

/// New input values at one point in time. Inputs without a value in the
/// map receive no new value.
#[derive(Clone, Debug, PartialEq)]
pub struct Event {
    pub time: Timestamp,
    pub values: BTreeMap<StreamId, Value>,
}

impl Event {
    pub fn new(time: Timestamp) -> Event {
        Event {
            time,
            values: BTreeMap::new(),
        }
    }

    pub fn with(mut self, input: StreamId, value: Value) -> Event {
        self.values.insert(input, value);
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerdictKind {
    /// A trigger condition held.
    Trigger,
    /// Evaluating an instance failed at runtime.
    Error,
    /// A stream value, reported in all-streams mode.
    Value,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub time: Timestamp,
    pub stream: String,
    pub params: Vec<Value>,
    pub message: String,
    pub kind: VerdictKind,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Verbosity {
    #[default]
    Triggers,
    AllStreams,
}

#[derive(Clone, Debug, PartialEq)]
pub enum MonitorError {
    TimeRegression { last: Timestamp, got: Timestamp },
    EmptyEvent(Timestamp),
    NotAnInput(StreamId),
    InputType { input: String, expected: ValueType, got: Value },
    /// A synchronous access found no value. The type checker rules this
    /// out, so it indicates a bug.
    Unavailable { time: Timestamp, reader: String, target: String },
}

impl fmt::Display for MonitorError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MonitorError::TimeRegression { last, got } => {
                write!(f, "time went backwards: {got} comes after {last}")
            }
            MonitorError::EmptyEvent(t) => write!(f, "event at {t} carries no input value"),
            MonitorError::NotAnInput(s) => write!(f, "stream #{} is not an input", s.0),
            MonitorError::InputType { input, expected, got } => {
                write!(f, "input `{input}` expects {expected}, got `{got}`")
            }
            MonitorError::Unavailable { time, reader, target } => write!(
                f,
                "internal error at {time}: `{reader}` read `{target}`, which has no current value"
            ),
        }
    }
}

impl std::error::Error for MonitorError {}

pub(crate) struct WindowState {
    pub expr: ExprId,
    pub target_args: Vec<Value>,
    pub entries: VecDeque<(Timestamp, Value)>,
}

pub(crate) struct Instance {
    /// Newest value first.
    pub buffer: VecDeque<Value>,
    /// Cycle in which the instance was last evaluated.
    pub fresh: u64,
    /// Cycle in which its evaluation last failed.
    pub errored: u64,
    pub spawn_time: Timestamp,
    pub next_eval: Option<Timestamp>,
    pub next_close: Option<Timestamp>,
    pub windows: Vec<WindowState>,
}

#[derive(Default)]
pub(crate) struct StreamState {
    pub instances: BTreeMap<Vec<Value>, Instance>,
    pub next_spawn: Option<Timestamp>,
    /// Windows read by the spawn clause, fed from monitor start.
    pub spawn_windows: Vec<WindowState>,
    pub peak_buffer: usize,
}

struct WindowSpec {
    expr: ExprId,
    duration: Duration,
    in_spawn: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Wake {
    Spawn(StreamId),
    Instance(StreamId, Vec<Value>),
}

/// Interpreter state for one run over one trace.
pub struct Monitor {
    pub(crate) checked: Arc<CheckedSpec>,
    pub(crate) streams: Vec<StreamState>,
    pub(crate) constants: Vec<Value>,
    pub(crate) cycle: u64,
    pub(crate) now: Timestamp,
    start: Timestamp,
    last_time: Option<Timestamp>,
    wakeups: BTreeMap<Timestamp, Vec<Wake>>,
    capacity: Vec<usize>,
    windows: Vec<Vec<WindowSpec>>,
    /// Target stream -> (aggregating stream, window index).
    watchers: Vec<Vec<(StreamId, usize)>>,
    verbosity: Verbosity,
    violations: Vec<String>,
}

fn constant_value(lit: &Literal, ty: &ValueType) -> Value {
    match (lit, ty) {
        (Literal::Int(n), ValueType::UInt) => Value::UInt(*n),
        (Literal::Int(n), _) => Value::Int(*n as i64),
        (Literal::Float(x), _) => Value::Float(*x),
        (Literal::Bool(b), _) => Value::Bool(*b),
        (Literal::Str(s), _) => Value::str(s),
    }
}

impl Monitor {
    pub fn new(checked: impl Into<Arc<CheckedSpec>>, start: Timestamp) -> Monitor {
        Monitor::with_verbosity(checked, start, Verbosity::Triggers)
    }

    pub fn with_verbosity(checked: impl Into<Arc<CheckedSpec>>, start: Timestamp, verbosity: Verbosity) -> Monitor {
        let checked = checked.into();
        let spec = &checked.spec;
        let n = spec.streams.len();
        let mut windows: Vec<Vec<WindowSpec>> = (0..n).map(|_| Vec::new()).collect();
        let mut watchers: Vec<Vec<(StreamId, usize)>> = vec![Vec::new(); n];
        for s in &spec.streams {
            for clause in s.clauses() {
                for e in clause.exprs() {
                    e.walk(&mut |x| {
                        if let ExprKind::Window { target, duration, .. } = &x.kind {
                            watchers[target.stream.0].push((s.id, windows[s.id.0].len()));
                            windows[s.id.0].push(WindowSpec {
                                expr: x.id,
                                duration: *duration,
                                in_spawn: clause.kind == ClauseKind::Spawn,
                            });
                        }
                    });
                }
            }
        }
        let capacity = spec.streams.iter().map(|s| checked.bounds.get(s.id) as usize + 1).collect();
        let constants = spec.constants.iter().map(|c| constant_value(&c.value, &c.ty)).collect();
        let mut m = Monitor {
            streams: (0..n).map(|_| StreamState::default()).collect(),
            constants,
            cycle: 0,
            now: start,
            start,
            last_time: None,
            wakeups: BTreeMap::new(),
            capacity,
            windows,
            watchers,
            verbosity,
            violations: Vec::new(),
            checked,
        };
        let checked = m.checked.clone();
        for s in &checked.spec.streams {
            if s.is_input() {
                let inst = m.blank_instance(start);
                m.streams[s.id.0].instances.insert(Vec::new(), inst);
                continue;
            }
            let windows = m.fresh_windows(s.id, true, &[]);
            m.streams[s.id.0].spawn_windows = windows;
            if s.spawn.is_none() {
                m.spawn_instance(s.id, Vec::new(), start);
            } else if let Some(PacingType::Periodic { period, .. }) = &checked.pacing[s.id.0].spawn {
                let t = Timestamp(start.0 + period.0);
                m.streams[s.id.0].next_spawn = Some(t);
                m.wake(t, Wake::Spawn(s.id));
            }
        }
        m
    }

    fn blank_instance(&self, spawn_time: Timestamp) -> Instance {
        Instance {
            buffer: VecDeque::new(),
            fresh: 0,
            errored: 0,
            spawn_time,
            next_eval: None,
            next_close: None,
            windows: Vec::new(),
        }
    }

    fn fresh_windows(&self, s: StreamId, spawn_clause: bool, params: &[Value]) -> Vec<WindowState> {
        let stream = self.checked.spec.stream(s);
        let mut out = Vec::new();
        for clause in stream.clauses() {
            if (clause.kind == ClauseKind::Spawn) != spawn_clause {
                continue;
            }
            for e in clause.exprs() {
                e.walk(&mut |x| {
                    if let ExprKind::Window { target, .. } = &x.kind {
                        let ctx = Ctx {
                            params,
                            windows: &[],
                            spawn_time: self.now,
                        };
                        let args = target
                            .args
                            .iter()
                            .map(|a| self.eval(a, &ctx).ok().flatten().expect("window arguments are static"))
                            .collect();
                        out.push(WindowState {
                            expr: x.id,
                            target_args: args,
                            entries: VecDeque::new(),
                        });
                    }
                });
            }
        }
        out
    }

    fn wake(&mut self, t: Timestamp, w: Wake) {
        self.wakeups.entry(t).or_default().push(w);
    }

    fn spawn_instance(&mut self, s: StreamId, params: Vec<Value>, now: Timestamp) {
        if self.streams[s.0].instances.contains_key(&params) {
            return;
        }
        let mut inst = self.blank_instance(now);
        inst.windows = self.fresh_windows(s, false, &params);
        let pacing = &self.checked.pacing[s.0];
        let next = |p: Option<&PacingType>| match p {
            Some(PacingType::Periodic { period, .. }) => Timestamp(now.0.checked_add(period.0)?).into(),
            _ => None,
        };
        inst.next_eval = next(Some(&pacing.eval));
        inst.next_close = next(pacing.close.as_ref());
        for t in [inst.next_eval, inst.next_close].into_iter().flatten() {
            self.wake(t, Wake::Instance(s, params.clone()));
        }
        self.streams[s.0].instances.insert(params, inst);
    }

    pub(crate) fn instance(&self, s: StreamId, params: &[Value]) -> Option<&Instance> {
        self.streams[s.0].instances.get(params)
    }

    fn wake_valid(&self, w: &Wake, t: Timestamp) -> bool {
        match w {
            Wake::Spawn(s) => self.streams[s.0].next_spawn == Some(t),
            Wake::Instance(s, p) => self
                .instance(*s, p)
                .is_some_and(|i| i.next_eval == Some(t) || i.next_close == Some(t)),
        }
    }

    /// Time of the next periodic cycle, if any.
    pub fn next_deadline(&self) -> Option<Timestamp> {
        self.wakeups
            .iter()
            .find(|(t, ws)| ws.iter().any(|w| self.wake_valid(w, **t)))
            .map(|(t, _)| *t)
    }

    fn check_time(&self, t: Timestamp) -> Result<(), MonitorError> {
        match self.last_time {
            Some(last) if t < last => Err(MonitorError::TimeRegression { last, got: t }),
            _ => Ok(()),
        }
    }

    /// Processes one event: deadlines before it, the event itself, then
    /// deadlines at the same instant.
    pub fn accept_event(&mut self, event: &Event) -> Result<Vec<Verdict>, MonitorError> {
        self.check_time(event.time)?;
        if event.values.is_empty() {
            return Err(MonitorError::EmptyEvent(event.time));
        }
        for (s, v) in &event.values {
            let stream = self.checked.spec.streams.get(s.0).filter(|st| st.is_input());
            let Some(stream) = stream else {
                return Err(MonitorError::NotAnInput(*s));
            };
            let expected = stream.annotation.as_ref().expect("inputs are typed");
            let ok = matches!(
                (expected, v),
                (ValueType::Int, Value::Int(_))
                    | (ValueType::UInt, Value::UInt(_))
                    | (ValueType::Float, Value::Float(_))
                    | (ValueType::Bool, Value::Bool(_))
                    | (ValueType::String, Value::Str(_))
            );
            if !ok {
                return Err(MonitorError::InputType {
                    input: stream.name.clone(),
                    expected: expected.clone(),
                    got: v.clone(),
                });
            }
        }
        let mut out = Vec::new();
        self.run_deadlines(event.time, false, &mut out)?;
        self.run_cycle(event.time, Some(event), &mut out)?;
        self.run_deadlines(event.time, true, &mut out)?;
        self.last_time = Some(event.time);
        Ok(out)
    }

    /// Runs all periodic cycles up to and including `now`.
    pub fn advance_time(&mut self, now: Timestamp) -> Result<Vec<Verdict>, MonitorError> {
        self.check_time(now)?;
        let mut out = Vec::new();
        self.run_deadlines(now, true, &mut out)?;
        self.last_time = Some(now);
        Ok(out)
    }

    /// Flushes deadlines up to the last processed time.
    pub fn finish(&mut self) -> Result<Vec<Verdict>, MonitorError> {
        match self.last_time {
            Some(t) => self.advance_time(t),
            None => Ok(Vec::new()),
        }
    }

    fn run_deadlines(&mut self, limit: Timestamp, inclusive: bool, out: &mut Vec<Verdict>) -> Result<(), MonitorError> {
        while let Some((&t, _)) = self.wakeups.first_key_value() {
            if t > limit || (t == limit && !inclusive) {
                break;
            }
            let wakes = self.wakeups.remove(&t).unwrap_or_default();
            if wakes.iter().any(|w| self.wake_valid(w, t)) {
                self.run_cycle(t, None, out)?;
            }
        }
        Ok(())
    }

    fn due(&self, pacing: &PacingType, scheduled: Option<Timestamp>, event: Option<&Event>) -> bool {
        match pacing {
            PacingType::Event(act) => act.holds(|s| event.is_some_and(|e| e.values.contains_key(&s))),
            PacingType::Periodic { .. } => scheduled == Some(self.now),
        }
    }

    fn period(p: &PacingType) -> Option<Duration> {
        p.period()
    }

    fn run_cycle(&mut self, t: Timestamp, event: Option<&Event>, out: &mut Vec<Verdict>) -> Result<(), MonitorError> {
        self.cycle += 1;
        self.now = t;
        self.prune_windows();
        if let Some(ev) = event {
            for (s, v) in &ev.values {
                self.commit(*s, &[], v.clone());
            }
        }
        let checked = self.checked.clone();
        let spec = &checked.spec;
        for &s in checked.order.layers.iter().flatten().collect::<Vec<_>>() {
            let stream = spec.stream(s);
            if stream.is_input() {
                continue;
            }
            if let Some(clause) = &stream.spawn {
                self.spawn_phase(s, clause, event, out)?;
            }
            self.eval_phase(s, event, out)?;
        }
        let mut closing = Vec::new();
        for &s in checked.order.layers.iter().flatten() {
            let stream = spec.stream(s);
            let (Some(clause), Some(pacing)) = (&stream.close, &checked.pacing[s.0].close) else {
                continue;
            };
            let keys: Vec<Vec<Value>> = self.streams[s.0].instances.keys().cloned().collect();
            for params in keys {
                let scheduled = self.streams[s.0].instances[&params].next_close;
                if !self.due(pacing, scheduled, event) {
                    continue;
                }
                if let Some(p) = Self::period(pacing) {
                    let next = Timestamp(t.0.saturating_add(p.0));
                    self.streams[s.0].instances.get_mut(&params).expect("live").next_close = Some(next);
                    self.wake(next, Wake::Instance(s, params.clone()));
                }
                match self.eval_clause_when(s, clause, &params)? {
                    Ok(true) => closing.push((s, params)),
                    Ok(false) => {}
                    Err(msg) => out.push(self.error_verdict(s, &params, msg)),
                }
            }
        }
        for (s, params) in closing {
            self.streams[s.0].instances.remove(&params);
        }
        self.check_invariants();
        Ok(())
    }

    /// Evaluates the `when` part of a clause for a live instance;
    /// `Ok(Err(msg))` is a runtime error.
    fn eval_clause_when(&self, s: StreamId, clause: &Clause, params: &[Value]) -> Result<Result<bool, String>, MonitorError> {
        let Some(w) = &clause.when else {
            return Ok(Ok(true));
        };
        let inst = self.instance(s, params).expect("live");
        let ctx = Ctx {
            params,
            windows: &inst.windows,
            spawn_time: inst.spawn_time,
        };
        self.lift(s, self.eval(w, &ctx)).map(|r| r.map(|v| v.and_then(|v| v.as_bool()).unwrap_or(false)))
    }

    /// Turns an evaluation fault into the monitor's error channels:
    /// availability misses abort, runtime errors become error verdicts and
    /// skips are silent (`Ok(Ok(None))`).
    fn lift(&self, s: StreamId, r: Result<Option<Value>, Fault>) -> Result<Result<Option<Value>, String>, MonitorError> {
        match r {
            Ok(v) => Ok(Ok(v)),
            Err(Fault::Runtime(msg)) => Ok(Err(msg)),
            Err(Fault::Skip) => Ok(Ok(None)),
            Err(Fault::Unavailable(target)) => Err(MonitorError::Unavailable {
                time: self.now,
                reader: self.checked.spec.name(s).to_string(),
                target: self.checked.spec.name(target).to_string(),
            }),
        }
    }

    fn error_verdict(&self, s: StreamId, params: &[Value], msg: String) -> Verdict {
        Verdict {
            time: self.now,
            stream: self.checked.spec.name(s).to_string(),
            params: params.to_vec(),
            message: format!("runtime error: {msg}"),
            kind: VerdictKind::Error,
        }
    }

    fn spawn_phase(&mut self, s: StreamId, clause: &Clause, event: Option<&Event>, out: &mut Vec<Verdict>) -> Result<(), MonitorError> {
        let checked = self.checked.clone();
        let pacing = checked.pacing[s.0].spawn.as_ref().expect("spawn clauses have a pacing");
        if !self.due(pacing, self.streams[s.0].next_spawn, event) {
            return Ok(());
        }
        if let Some(p) = Self::period(pacing) {
            let next = Timestamp(self.now.0.saturating_add(p.0));
            self.streams[s.0].next_spawn = Some(next);
            self.wake(next, Wake::Spawn(s));
        }
        let ctx = Ctx {
            params: &[],
            windows: &self.streams[s.0].spawn_windows,
            spawn_time: self.start,
        };
        if let Some(w) = &clause.when {
            match self.lift(s, self.eval(w, &ctx))? {
                Ok(Some(Value::Bool(true))) => {}
                Ok(_) => return Ok(()),
                Err(msg) => {
                    out.push(self.error_verdict(s, &[], msg));
                    return Ok(());
                }
            }
        }
        let params = match &clause.with {
            None => Vec::new(),
            Some(w) => match self.lift(s, self.eval(w, &ctx))? {
                Ok(Some(v)) => {
                    if checked.spec.stream(s).params.len() == 1 {
                        vec![v]
                    } else {
                        match v {
                            Value::Tuple(vs) => vs.to_vec(),
                            v => vec![v],
                        }
                    }
                }
                Ok(None) => return Ok(()),
                Err(msg) => {
                    out.push(self.error_verdict(s, &[], msg));
                    return Ok(());
                }
            },
        };
        self.spawn_instance(s, params, self.now);
        Ok(())
    }

    fn eval_phase(&mut self, s: StreamId, event: Option<&Event>, out: &mut Vec<Verdict>) -> Result<(), MonitorError> {
        let checked = self.checked.clone();
        let stream = checked.spec.stream(s);
        let clause = stream.eval.as_ref().expect("non-inputs have an eval clause");
        let pacing = &checked.pacing[s.0].eval;
        let keys: Vec<Vec<Value>> = self.streams[s.0].instances.keys().cloned().collect();
        for params in keys {
            let scheduled = self.streams[s.0].instances[&params].next_eval;
            if !self.due(pacing, scheduled, event) {
                continue;
            }
            if let Some(p) = Self::period(pacing) {
                let next = Timestamp(self.now.0.saturating_add(p.0));
                self.streams[s.0].instances.get_mut(&params).expect("live").next_eval = Some(next);
                self.wake(next, Wake::Instance(s, params.clone()));
            }
            let filter = match self.eval_clause_when(s, clause, &params)? {
                Ok(b) => b,
                Err(msg) => {
                    self.fail(s, &params);
                    out.push(self.error_verdict(s, &params, msg));
                    continue;
                }
            };
            if !filter {
                continue;
            }
            if stream.kind == StreamKind::Trigger {
                let message = match &clause.with {
                    None => Ok(Some(Value::str(&stream.name))),
                    Some(w) => {
                        let inst = self.instance(s, &params).expect("live");
                        let ctx = Ctx {
                            params: &params,
                            windows: &inst.windows,
                            spawn_time: inst.spawn_time,
                        };
                        self.lift(s, self.eval(w, &ctx))?
                    }
                };
                match message {
                    Ok(Some(m)) => {
                        self.commit(s, &params, Value::Bool(true));
                        out.push(Verdict {
                            time: self.now,
                            stream: stream.name.clone(),
                            params: params.clone(),
                            message: m.to_string(),
                            kind: VerdictKind::Trigger,
                        });
                    }
                    Ok(None) => self.fail(s, &params),
                    Err(msg) => {
                        self.fail(s, &params);
                        out.push(self.error_verdict(s, &params, msg));
                    }
                }
                continue;
            }
            let with = clause.with.as_ref().expect("outputs have a value");
            let result = {
                let inst = self.instance(s, &params).expect("live");
                let ctx = Ctx {
                    params: &params,
                    windows: &inst.windows,
                    spawn_time: inst.spawn_time,
                };
                self.lift(s, self.eval(with, &ctx))?
            };
            match result {
                Ok(Some(v)) => {
                    if self.verbosity == Verbosity::AllStreams {
                        out.push(Verdict {
                            time: self.now,
                            stream: stream.name.clone(),
                            params: params.clone(),
                            message: v.to_string(),
                            kind: VerdictKind::Value,
                        });
                    }
                    self.commit(s, &params, v);
                }
                Ok(None) => self.fail(s, &params),
                Err(msg) => {
                    self.fail(s, &params);
                    out.push(self.error_verdict(s, &params, msg));
                }
            }
        }
        Ok(())
    }

    fn fail(&mut self, s: StreamId, params: &[Value]) {
        let cycle = self.cycle;
        if let Some(i) = self.streams[s.0].instances.get_mut(params) {
            i.errored = cycle;
        }
    }

    /// Stores a new value and feeds every window that reads this instance.
    fn commit(&mut self, s: StreamId, params: &[Value], v: Value) {
        let cap = self.capacity[s.0];
        let (cycle, now) = (self.cycle, self.now);
        let st = &mut self.streams[s.0];
        let inst = st.instances.get_mut(params).expect("live");
        inst.buffer.push_front(v.clone());
        inst.buffer.truncate(cap);
        inst.fresh = cycle;
        st.peak_buffer = st.peak_buffer.max(inst.buffer.len());
        for &(agg, k) in &self.watchers[s.0] {
            let in_spawn = self.windows[agg.0][k].in_spawn;
            let expr = self.windows[agg.0][k].expr;
            let st = &mut self.streams[agg.0];
            let feed = |w: &mut WindowState| {
                if w.expr == expr && w.target_args == params {
                    w.entries.push_back((now, v.clone()));
                }
            };
            if in_spawn {
                st.spawn_windows.iter_mut().for_each(feed);
            } else {
                for inst in st.instances.values_mut() {
                    inst.windows.iter_mut().for_each(feed);
                }
            }
        }
    }

    fn prune_windows(&mut self) {
        let now = self.now;
        for (s, st) in self.streams.iter_mut().enumerate() {
            let specs = &self.windows[s];
            let prune = |w: &mut WindowState| {
                let d = specs.iter().find(|x| x.expr == w.expr).expect("window spec").duration;
                if let Some(lo) = now.0.checked_sub(d.0) {
                    while w.entries.front().is_some_and(|(t, _)| t.0 <= lo) {
                        w.entries.pop_front();
                    }
                }
            };
            st.spawn_windows.iter_mut().for_each(prune);
            for inst in st.instances.values_mut() {
                inst.windows.iter_mut().for_each(prune);
            }
        }
    }

    fn check_invariants(&mut self) {
        let now = self.now;
        for (s, st) in self.streams.iter().enumerate() {
            for (params, inst) in &st.instances {
                if inst.buffer.len() > self.capacity[s] {
                    self.violations.push(format!(
                        "{}{params:?} retains {} values, bound allows {}",
                        self.checked.spec.name(StreamId(s)),
                        inst.buffer.len(),
                        self.capacity[s]
                    ));
                }
                for w in inst.windows.iter().chain(&st.spawn_windows) {
                    let d = self.windows[s].iter().find(|x| x.expr == w.expr).expect("window spec").duration;
                    if w.entries.iter().any(|(t, _)| t.0 + d.0 <= now.0 || *t > now) {
                        self.violations.push(format!(
                            "window of {} holds entries outside its horizon at {now}",
                            self.checked.spec.name(StreamId(s))
                        ));
                    }
                }
            }
        }
    }

    /// Breaches of the runtime invariants observed so far (memory bounds,
    /// window horizons). Empty in a correct implementation.
    pub fn invariant_violations(&self) -> &[String] {
        &self.violations
    }

    pub fn spec(&self) -> &CheckedSpec {
        &self.checked
    }

    /// Parameter tuples of the live instances of an output or trigger.
    pub fn instances(&self, stream: &str) -> Vec<Vec<Value>> {
        match self.checked.spec.lookup(stream) {
            Some(s) => self.streams[s.0].instances.keys().cloned().collect(),
            None => Vec::new(),
        }
    }

    /// Number of live output and trigger instances.
    pub fn instance_count(&self) -> usize {
        self.checked
            .spec
            .streams
            .iter()
            .filter(|s| !s.is_input())
            .map(|s| self.streams[s.id.0].instances.len())
            .sum()
    }

    /// Latest value of an instance.
    pub fn last_value(&self, stream: &str, params: &[Value]) -> Option<Value> {
        let s = self.checked.spec.lookup(stream)?;
        self.instance(s, params)?.buffer.front().cloned()
    }

    pub fn buffer_len(&self, stream: &str, params: &[Value]) -> Option<usize> {
        let s = self.checked.spec.lookup(stream)?;
        Some(self.instance(s, params)?.buffer.len())
    }

    /// Largest buffer any instance of the stream has held.
    pub fn peak_buffer(&self, stream: &str) -> usize {
        self.checked.spec.lookup(stream).map_or(0, |s| self.streams[s.0].peak_buffer)
    }

    /// Total number of values held by all window buffers.
    pub fn window_entries(&self) -> usize {
        self.streams
            .iter()
            .map(|st| {
                st.spawn_windows.iter().map(|w| w.entries.len()).sum::<usize>()
                    + st
                        .instances
                        .values()
                        .flat_map(|i| &i.windows)
                        .map(|w| w.entries.len())
                        .sum::<usize>()
            })
            .sum()
    }
}
