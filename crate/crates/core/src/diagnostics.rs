//! Source spans and diagnostics shared by every checking stage.

use std::fmt;

/// A byte range in the specification source.
///
/// Spans never take part in structural equality: two syntax trees that differ
/// only in where their nodes came from compare equal.
#[derive(Clone, Copy, Debug, Default, Eq)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl PartialEq for Span {
    fn eq(&self, _other: &Self) -> bool {
        true
    }
}

impl std::hash::Hash for Span {
    fn hash<H: std::hash::Hasher>(&self, _state: &mut H) {}
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn to(self, other: Span) -> Span {
        Span::new(self.start.min(other.start), self.end.max(other.end))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

/// Rejection classes. Each class has a stable short code that shows up in
/// rendered diagnostics and that tooling can match on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Code {
    Syntax,
    DuplicateName,
    UnknownImport,
    InvalidLiteral,
    UnknownIdentifier,
    ArityMismatch,
    ParameterScope,
    InvalidAccess,
    UnknownFunction,
    MissingImport,
    ZeroWeightCycle,
    SelfReferenceInDefault,
    TypeMismatch,
    TriggerNotBool,
    DefaultOnNonOptional,
    UndefaultedOptional,
    InvalidParameterType,
    FormatArity,
    PacingUnderdetermined,
    PacingMix,
    PacingEntailment,
    EventPeriodicAccess,
    PeriodMismatch,
    InvalidFrequency,
    AnchorMismatch,
    WhenConditionGap,
    LifecycleGap,
    PeriodicLifecycleMismatch,
}

impl Code {
    pub fn as_str(self) -> &'static str {
        match self {
            Code::Syntax => "P001",
            Code::DuplicateName => "P002",
            Code::UnknownImport => "P003",
            Code::InvalidLiteral => "P004",
            Code::UnknownIdentifier => "R001",
            Code::ArityMismatch => "R002",
            Code::ParameterScope => "R003",
            Code::InvalidAccess => "R004",
            Code::UnknownFunction => "R005",
            Code::MissingImport => "R006",
            Code::ZeroWeightCycle => "W001",
            Code::SelfReferenceInDefault => "W002",
            Code::TypeMismatch => "T001",
            Code::TriggerNotBool => "T002",
            Code::DefaultOnNonOptional => "T003",
            Code::UndefaultedOptional => "T004",
            Code::InvalidParameterType => "T005",
            Code::FormatArity => "T006",
            Code::PacingUnderdetermined => "C001",
            Code::PacingMix => "C002",
            Code::PacingEntailment => "C003",
            Code::EventPeriodicAccess => "C004",
            Code::PeriodMismatch => "C005",
            Code::InvalidFrequency => "C006",
            Code::AnchorMismatch => "C007",
            Code::WhenConditionGap => "S001",
            Code::LifecycleGap => "S002",
            Code::PeriodicLifecycleMismatch => "S003",
        }
    }

    /// The checking stage that emits this code.
    pub fn stage(self) -> Stage {
        match self.as_str().as_bytes()[0] {
            b'P' => Stage::Parse,
            b'R' => Stage::Resolve,
            b'W' => Stage::WellFormedness,
            b'T' => Stage::ValueTypes,
            b'C' => Stage::Pacing,
            _ => Stage::Semantic,
        }
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    Parse,
    Resolve,
    WellFormedness,
    ValueTypes,
    Pacing,
    Semantic,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: Code,
    pub message: String,
    pub span: Span,
}

impl Diagnostic {
    pub fn error(code: Code, span: Span, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Error,
            code,
            message: message.into(),
            span,
        }
    }

    pub fn warning(code: Code, span: Span, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Warning,
            code,
            message: message.into(),
            span,
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }

    /// Renders as `file:line:col: error[CODE]: message`.
    pub fn render(&self, file: &str, source: &str) -> String {
        let (line, col) = line_col(source, self.span.start);
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        format!("{file}:{line}:{col}: {sev}[{}]: {}", self.code, self.message)
    }
}

/// 1-based line and column (in chars) of a byte offset.
pub fn line_col(source: &str, offset: usize) -> (usize, usize) {
    let offset = offset.min(source.len());
    let mut line = 1;
    let mut line_start = 0;
    for (i, b) in source.bytes().enumerate().take(offset) {
        if b == b'\n' {
            line += 1;
            line_start = i + 1;
        }
    }
    let col = source
        .get(line_start..offset)
        .map(|s| s.chars().count())
        .unwrap_or(offset - line_start)
        + 1;
    (line, col)
}

pub type Diagnostics = Vec<Diagnostic>;
