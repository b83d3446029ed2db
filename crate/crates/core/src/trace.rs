//! CSV traces in, verdict lines out.
//!
//! A trace has one column per input plus a `time` column. `#` marks an input
//! that carries no value in that row.

use std::collections::BTreeMap;
use std::io;
use std::sync::OnceLock;

use thiserror::Error;

use crate::engine::{Event, Value, Verdict};
use crate::ir::{Spec, StreamId};
use crate::registry::Registry;
use crate::time::Timestamp;
use crate::types::ValueType;

pub const ABSENT: &str = "#";
pub const TIME_COLUMN: &str = "time";

/// How the `time` column is read and written.
pub trait TimeFormat: Send + Sync {
    fn name(&self) -> &'static str;
    fn parse(&self, cell: &str) -> Result<Timestamp, String>;
    fn render(&self, t: Timestamp) -> String;
}

/// Seconds since monitor start, as a decimal.
struct Relative;

impl TimeFormat for Relative {
    fn name(&self) -> &'static str {
        "relative"
    }
    fn parse(&self, cell: &str) -> Result<Timestamp, String> {
        Timestamp::parse_secs(cell)
    }
    fn render(&self, t: Timestamp) -> String {
        t.secs_string()
    }
}

impl Registry<dyn TimeFormat> {
    pub fn register(&mut self, f: Box<dyn TimeFormat>) {
        self.insert(f.name(), f);
    }
}

pub fn time_formats() -> &'static Registry<dyn TimeFormat> {
    static REG: OnceLock<Registry<dyn TimeFormat>> = OnceLock::new();
    REG.get_or_init(|| {
        let mut r: Registry<dyn TimeFormat> = Registry::default();
        r.register(Box::new(Relative));
        r
    })
}

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("unknown time format `{0}`")]
    UnknownFormat(String),
    #[error("header: {0}")]
    Header(String),
    #[error("line {line}: {source}")]
    Csv { line: u64, source: csv::Error },
    #[error("line {line}, column `{column}`: {msg}")]
    Cell { line: u64, column: String, msg: String },
    #[error("line {line}: row has no input values")]
    EmptyRow { line: u64 },
    #[error("line {line}: time {got} is before the previous row's {last}")]
    TimeRegression { line: u64, last: Timestamp, got: Timestamp },
    #[error("line {line}: expected {expected} fields, found {got}")]
    Width { line: u64, expected: usize, got: usize },
}

#[derive(Clone, Debug)]
pub struct ReadOptions {
    /// Allow unknown columns and missing inputs.
    pub lax: bool,
    /// Reject a header without a `time` column.
    pub require_time: bool,
    pub format: String,
}

impl Default for ReadOptions {
    fn default() -> Self {
        ReadOptions {
            lax: false,
            require_time: true,
            format: "relative".into(),
        }
    }
}

enum Column {
    Input(StreamId, String, ValueType),
    Time,
    Ignored,
}

pub struct TraceReader<R: io::Read> {
    csv: csv::Reader<R>,
    columns: Vec<Column>,
    has_time: bool,
    format: &'static dyn TimeFormat,
    last: Option<Timestamp>,
    record: csv::StringRecord,
}

impl<R: io::Read> TraceReader<R> {
    pub fn new(input: R, spec: &Spec, opts: &ReadOptions) -> Result<Self, TraceError> {
        let format = time_formats()
            .get(&opts.format)
            .ok_or_else(|| TraceError::UnknownFormat(opts.format.clone()))?;
        let mut csv = csv::ReaderBuilder::new()
            .has_headers(true)
            .flexible(true)
            .from_reader(input);
        let header = csv
            .headers()
            .map_err(|source| TraceError::Csv { line: 1, source })?
            .clone();
        let mut columns = Vec::new();
        let mut seen = Vec::new();
        let mut has_time = false;
        for name in header.iter() {
            let name = name.trim();
            if seen.iter().any(|s: &String| s == name) {
                return Err(TraceError::Header(format!("duplicate column `{name}`")));
            }
            seen.push(name.to_string());
            if name == TIME_COLUMN {
                has_time = true;
                columns.push(Column::Time);
                continue;
            }
            match spec.lookup(name).map(|id| spec.stream(id)) {
                Some(s) if s.is_input() => {
                    let ty = s.annotation.clone().ok_or_else(|| {
                        TraceError::Header(format!("input `{name}` has no declared type"))
                    })?;
                    columns.push(Column::Input(s.id, name.to_string(), ty));
                }
                _ if opts.lax => columns.push(Column::Ignored),
                _ => {
                    return Err(TraceError::Header(format!(
                        "column `{name}` is not a declared input"
                    )))
                }
            }
        }
        if opts.require_time && !has_time {
            return Err(TraceError::Header("missing `time` column".into()));
        }
        if !opts.lax {
            for input in spec.inputs() {
                if !seen.contains(&input.name) {
                    return Err(TraceError::Header(format!(
                        "input `{}` has no column",
                        input.name
                    )));
                }
            }
        }
        Ok(TraceReader {
            csv,
            columns,
            has_time,
            format,
            last: None,
            record: csv::StringRecord::new(),
        })
    }

    pub fn has_time(&self) -> bool {
        self.has_time
    }

    /// Reads the next row. Without a `time` column the row is stamped with
    /// `now()`.
    pub fn next_event_at(
        &mut self,
        now: impl FnOnce() -> Timestamp,
    ) -> Option<Result<Event, TraceError>> {
        let mut now = Some(now);
        loop {
            match self.csv.read_record(&mut self.record) {
                Ok(false) => return None,
                Ok(true) => match self.decode(&mut now) {
                    Ok(None) => continue,
                    Ok(Some(e)) => return Some(Ok(e)),
                    Err(e) => return Some(Err(e)),
                },
                Err(source) => {
                    let line = source.position().map_or(0, |p| p.line());
                    return Some(Err(TraceError::Csv { line, source }));
                }
            }
        }
    }

    /// `Ok(None)` for a lax-mode row whose values are all in ignored columns.
    fn decode<F: FnOnce() -> Timestamp>(&mut self, now: &mut Option<F>) -> Result<Option<Event>, TraceError> {
        let line = self.record.position().map_or(0, |p| p.line());
        if self.record.len() != self.columns.len() {
            return Err(TraceError::Width {
                line,
                expected: self.columns.len(),
                got: self.record.len(),
            });
        }
        let mut time = None;
        let mut values = BTreeMap::new();
        let mut ignored = false;
        for (col, cell) in self.columns.iter().zip(self.record.iter()) {
            match col {
                Column::Ignored => ignored |= cell.trim() != ABSENT,
                Column::Time => {
                    let t = self.format.parse(cell).map_err(|msg| TraceError::Cell {
                        line,
                        column: TIME_COLUMN.into(),
                        msg,
                    })?;
                    time = Some(t);
                }
                Column::Input(id, name, ty) => {
                    if cell.trim() == ABSENT {
                        continue;
                    }
                    let v = Value::parse(cell, ty).map_err(|msg| TraceError::Cell {
                        line,
                        column: name.clone(),
                        msg,
                    })?;
                    values.insert(*id, v);
                }
            }
        }
        if values.is_empty() {
            if ignored {
                return Ok(None);
            }
            return Err(TraceError::EmptyRow { line });
        }
        let time = match time {
            Some(t) => t,
            None => (now.take().expect("one stamp per row"))(),
        };
        if let Some(last) = self.last {
            if time < last {
                return Err(TraceError::TimeRegression { line, last, got: time });
            }
        }
        self.last = Some(time);
        Ok(Some(Event { time, values }))
    }
}

impl<R: io::Read> Iterator for TraceReader<R> {
    type Item = Result<Event, TraceError>;

    /// Rows without a time column are stamped with the previous row's time.
    fn next(&mut self) -> Option<Self::Item> {
        let fallback = self.last.unwrap_or(Timestamp::ZERO);
        self.next_event_at(|| fallback)
    }
}

/// Parses a whole trace held in memory.
pub fn read_events(text: &str, spec: &Spec, opts: &ReadOptions) -> Result<Vec<Event>, TraceError> {
    TraceReader::new(text.as_bytes(), spec, opts)?.collect()
}

fn cell(v: &Value) -> String {
    v.to_string()
}

/// Name column of a verdict line: the stream, plus its instance parameters.
pub fn verdict_name(v: &Verdict) -> String {
    if v.params.is_empty() {
        return v.stream.clone();
    }
    let args: Vec<String> = v.params.iter().map(cell).collect();
    format!("{}({})", v.stream, args.join(", "))
}

/// Writes `<seconds>,<name>,<message>` lines.
pub struct VerdictWriter<W: io::Write> {
    csv: csv::Writer<W>,
    format: &'static dyn TimeFormat,
}

impl<W: io::Write> VerdictWriter<W> {
    pub fn new(out: W) -> Self {
        VerdictWriter {
            csv: csv::WriterBuilder::new().has_headers(false).from_writer(out),
            format: &Relative,
        }
    }

    pub fn write(&mut self, v: &Verdict) -> io::Result<()> {
        let time = self.format.render(v.time);
        let name = verdict_name(v);
        self.csv
            .write_record([time.as_str(), name.as_str(), v.message.as_str()])
            .map_err(io::Error::other)
    }

    pub fn flush(&mut self) -> io::Result<()> {
        self.csv.flush()
    }

    pub fn into_inner(self) -> io::Result<W> {
        self.csv.into_inner().map_err(|e| e.into_error())
    }
}

/// Renders one verdict as a line without the trailing newline.
pub fn verdict_line(v: &Verdict) -> String {
    let mut w = VerdictWriter::new(Vec::new());
    w.write(v).expect("writing to a Vec");
    let bytes = w.into_inner().expect("writing to a Vec");
    let mut s = String::from_utf8(bytes).expect("verdict lines are UTF-8");
    while s.ends_with('\n') || s.ends_with('\r') {
        s.pop();
    }
    s
}

/// Writes events back out as a trace with every input and a `time` column.
pub fn write_events<W: io::Write>(out: W, spec: &Spec, events: &[Event]) -> io::Result<W> {
    let inputs: Vec<StreamId> = spec.inputs().map(|s| s.id).collect();
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<&str> = inputs.iter().map(|&id| spec.name(id)).collect();
    header.push(TIME_COLUMN);
    w.write_record(&header)?;
    for e in events {
        let mut row: Vec<String> = inputs
            .iter()
            .map(|id| e.values.get(id).map_or_else(|| ABSENT.to_string(), cell))
            .collect();
        row.push(Relative.render(e.time));
        w.write_record(&row)?;
    }
    w.into_inner().map_err(|e| e.into_error())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab() -> Spec {
        crate::check("input a: Int\ninput b: Int\noutput s := a + b").unwrap().spec
    }

    #[test]
    fn three_row_trace() {
        let spec = ab();
        let a = spec.lookup("a").unwrap();
        let b = spec.lookup("b").unwrap();
        let events = read_events("a,b,time\n1,2,0\n#,3,1\n3,#,2\n", &spec, &ReadOptions::default()).unwrap();
        assert_eq!(
            events,
            vec![
                Event::new(Timestamp::ZERO).with(a, Value::Int(1)).with(b, Value::Int(2)),
                Event::new(Timestamp::from_secs(1)).with(b, Value::Int(3)),
                Event::new(Timestamp::from_secs(2)).with(a, Value::Int(3)),
            ]
        );
    }

    #[test]
    fn row_errors() {
        let spec = ab();
        let opts = ReadOptions::default();
        let err = read_events("a,b,time\n#,#,5\n", &spec, &opts).unwrap_err();
        assert!(matches!(err, TraceError::EmptyRow { line: 2 }), "{err}");
        let err = read_events("a,b,time\n1,1,2\n1,1,1\n", &spec, &opts).unwrap_err();
        assert!(matches!(err, TraceError::TimeRegression { line: 3, .. }), "{err}");
        let err = read_events("a,b,time\n1,x,2\n", &spec, &opts).unwrap_err();
        assert!(err.to_string().starts_with("line 2, column `b`"), "{err}");
    }

    #[test]
    fn header_modes() {
        let spec = ab();
        let strict = ReadOptions::default();
        let lax = ReadOptions { lax: true, ..strict.clone() };
        assert!(read_events("a,time\n1,0\n", &spec, &strict).is_err());
        assert!(read_events("a,b,c,time\n1,1,1,0\n", &spec, &strict).is_err());
        assert_eq!(read_events("a,c,time\n1,9,0\n#,9,1\n", &spec, &lax).unwrap().len(), 1);
        assert!(read_events("a,c,time\n#,#,1\n", &spec, &lax).is_err());
        assert!(read_events("a,b\n1,1\n", &spec, &strict).is_err());
    }

    #[test]
    fn verdict_lines() {
        let v = Verdict {
            time: Timestamp::from_secs(6),
            stream: "trigger_0".into(),
            params: vec![],
            message: "Too close to the intruder".into(),
            kind: crate::engine::VerdictKind::Trigger,
        };
        assert_eq!(verdict_line(&v), "6,trigger_0,Too close to the intruder");
        let v = Verdict {
            time: Timestamp::from_millis(2500),
            message: "a, b".into(),
            ..v
        };
        assert_eq!(verdict_line(&v), "2.5,trigger_0,\"a, b\"");
    }
}
