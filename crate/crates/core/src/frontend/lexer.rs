use crate::diagnostics::{Code, Diagnostic, Span};
use crate::time::{period_from_literal, Duration, TimeUnit};

#[derive(Clone, Debug, PartialEq)]
pub enum Tok {
    Ident(String),
    Int(u64),
    Float(f64),
    Str(String),
    Duration(Duration),
    // keywords
    Import,
    Input,
    Output,
    Constant,
    Trigger,
    Spawn,
    Eval,
    Close,
    When,
    With,
    True,
    False,
    // punctuation
    At,
    LParen,
    RParen,
    Comma,
    Colon,
    Assign,
    Dot,
    Plus,
    Minus,
    Star,
    StarStar,
    Slash,
    Percent,
    Bang,
    AndAnd,
    OrOr,
    Eq,
    NotEq,
    Lt,
    Le,
    Gt,
    Ge,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Int(i) => format!("integer `{i}`"),
            Tok::Float(f) => format!("number `{f}`"),
            Tok::Str(_) => "string literal".into(),
            Tok::Duration(d) => format!("duration `{d}`"),
            Tok::Eof => "end of input".into(),
            other => format!("`{}`", other.text()),
        }
    }

    fn text(&self) -> &'static str {
        match self {
            Tok::Import => "import",
            Tok::Input => "input",
            Tok::Output => "output",
            Tok::Constant => "constant",
            Tok::Trigger => "trigger",
            Tok::Spawn => "spawn",
            Tok::Eval => "eval",
            Tok::Close => "close",
            Tok::When => "when",
            Tok::With => "with",
            Tok::True => "true",
            Tok::False => "false",
            Tok::At => "@",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::Comma => ",",
            Tok::Colon => ":",
            Tok::Assign => ":=",
            Tok::Dot => ".",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::StarStar => "**",
            Tok::Slash => "/",
            Tok::Percent => "%",
            Tok::Bang => "!",
            Tok::AndAnd => "&&",
            Tok::OrOr => "||",
            Tok::Eq => "=",
            Tok::NotEq => "!=",
            Tok::Lt => "<",
            Tok::Le => "<=",
            Tok::Gt => ">",
            Tok::Ge => ">=",
            _ => "?",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

fn keyword(s: &str) -> Option<Tok> {
    Some(match s {
        "import" => Tok::Import,
        "input" => Tok::Input,
        "output" => Tok::Output,
        "constant" => Tok::Constant,
        "trigger" => Tok::Trigger,
        "spawn" => Tok::Spawn,
        "eval" => Tok::Eval,
        "close" => Tok::Close,
        "when" => Tok::When,
        "with" => Tok::With,
        "true" => Tok::True,
        "false" => Tok::False,
        _ => return None,
    })
}

/// Splits source text into tokens. Lexical errors are reported and the
/// offending characters skipped, so the token stream always ends in `Eof`.
pub fn tokenize(src: &str) -> (Vec<Token>, Vec<Diagnostic>) {
    let bytes = src.as_bytes();
    let mut toks: Vec<Token> = Vec::new();
    let mut diags = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c == b'/' && bytes.get(i + 1) == Some(&b'/') {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        if c == b'/' && bytes.get(i + 1) == Some(&b'*') {
            i += 2;
            loop {
                if i + 1 >= bytes.len() {
                    diags.push(Diagnostic::error(
                        Code::Syntax,
                        Span::new(start, bytes.len()),
                        "unterminated block comment",
                    ));
                    i = bytes.len();
                    break;
                }
                if bytes[i] == b'*' && bytes[i + 1] == b'/' {
                    i += 2;
                    break;
                }
                i += 1;
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            let word = &src[start..i];
            let tok = keyword(word).unwrap_or_else(|| Tok::Ident(word.to_string()));
            toks.push(Token {
                tok,
                span: Span::new(start, i),
            });
            continue;
        }
        if c.is_ascii_digit() {
            let after_dot = matches!(toks.last(), Some(Token { tok: Tok::Dot, .. }));
            let (tok, end) = lex_number(src, i, after_dot, &mut diags);
            i = end;
            toks.push(Token {
                tok,
                span: Span::new(start, i),
            });
            continue;
        }
        if c == b'"' {
            let (tok, end) = lex_string(src, i, &mut diags);
            i = end;
            toks.push(Token {
                tok,
                span: Span::new(start, i),
            });
            continue;
        }
        let two = bytes.get(i + 1).copied();
        let (tok, len) = match (c, two) {
            (b':', Some(b'=')) => (Tok::Assign, 2),
            (b'*', Some(b'*')) => (Tok::StarStar, 2),
            (b'&', Some(b'&')) => (Tok::AndAnd, 2),
            (b'|', Some(b'|')) => (Tok::OrOr, 2),
            (b'=', Some(b'=')) => (Tok::Eq, 2),
            (b'!', Some(b'=')) => (Tok::NotEq, 2),
            (b'<', Some(b'=')) => (Tok::Le, 2),
            (b'>', Some(b'=')) => (Tok::Ge, 2),
            (b'@', _) => (Tok::At, 1),
            (b'(', _) => (Tok::LParen, 1),
            (b')', _) => (Tok::RParen, 1),
            (b',', _) => (Tok::Comma, 1),
            (b':', _) => (Tok::Colon, 1),
            (b'.', _) => (Tok::Dot, 1),
            (b'+', _) => (Tok::Plus, 1),
            (b'-', _) => (Tok::Minus, 1),
            (b'*', _) => (Tok::Star, 1),
            (b'/', _) => (Tok::Slash, 1),
            (b'%', _) => (Tok::Percent, 1),
            (b'!', _) => (Tok::Bang, 1),
            (b'=', _) => (Tok::Eq, 1),
            (b'<', _) => (Tok::Lt, 1),
            (b'>', _) => (Tok::Gt, 1),
            _ => {
                let ch = src[i..].chars().next().unwrap();
                let len = ch.len_utf8();
                diags.push(Diagnostic::error(
                    Code::Syntax,
                    Span::new(i, i + len),
                    format!("unexpected character `{ch}`"),
                ));
                i += len;
                continue;
            }
        };
        i += len;
        toks.push(Token {
            tok,
            span: Span::new(start, i),
        });
    }
    toks.push(Token {
        tok: Tok::Eof,
        span: Span::new(src.len(), src.len()),
    });
    (toks, diags)
}

fn lex_number(src: &str, start: usize, after_dot: bool, diags: &mut Vec<Diagnostic>) -> (Tok, usize) {
    let bytes = src.as_bytes();
    let mut i = start;
    while i < bytes.len() && bytes[i].is_ascii_digit() {
        i += 1;
    }
    let mut is_float = false;
    // after `.` only an integer is lexed so that `x.0.1` is two projections
    if !after_dot
        && i + 1 < bytes.len()
        && bytes[i] == b'.'
        && bytes[i + 1].is_ascii_digit()
    {
        is_float = true;
        i += 1;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
    }
    let digits_end = i;
    if !after_dot && i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
        let mut j = i + 1;
        if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
            j += 1;
        }
        if j < bytes.len() && bytes[j].is_ascii_digit() {
            while j < bytes.len() && bytes[j].is_ascii_digit() {
                j += 1;
            }
            let text = &src[start..j];
            return match text.parse::<f64>() {
                Ok(f) if f.is_finite() => (Tok::Float(f), j),
                _ => {
                    diags.push(Diagnostic::error(
                        Code::InvalidLiteral,
                        Span::new(start, j),
                        format!("invalid number `{text}`"),
                    ));
                    (Tok::Float(0.0), j)
                }
            };
        }
    }
    // unit suffix
    let mut k = i;
    while k < bytes.len() && bytes[k].is_ascii_alphabetic() {
        k += 1;
    }
    if k > i && !after_dot {
        let suffix = &src[i..k];
        let text = &src[start..digits_end];
        return match TimeUnit::from_suffix(suffix) {
            Some(unit) => match period_from_literal(text, unit) {
                Ok(d) => (Tok::Duration(d), k),
                Err(msg) => {
                    diags.push(Diagnostic::error(Code::InvalidFrequency, Span::new(start, k), msg));
                    (Tok::Duration(Duration(1)), k)
                }
            },
            None => {
                diags.push(Diagnostic::error(
                    Code::InvalidLiteral,
                    Span::new(start, k),
                    format!("unknown unit `{suffix}`"),
                ));
                (Tok::Int(0), k)
            }
        };
    }
    let text = &src[start..digits_end];
    if is_float {
        match text.parse::<f64>() {
            Ok(f) if f.is_finite() => (Tok::Float(f), digits_end),
            _ => {
                diags.push(Diagnostic::error(
                    Code::InvalidLiteral,
                    Span::new(start, digits_end),
                    format!("invalid number `{text}`"),
                ));
                (Tok::Float(0.0), digits_end)
            }
        }
    } else {
        match text.parse::<u64>() {
            Ok(n) => (Tok::Int(n), digits_end),
            Err(_) => {
                diags.push(Diagnostic::error(
                    Code::InvalidLiteral,
                    Span::new(start, digits_end),
                    format!("integer literal `{text}` is too large"),
                ));
                (Tok::Int(0), digits_end)
            }
        }
    }
}

fn lex_string(src: &str, start: usize, diags: &mut Vec<Diagnostic>) -> (Tok, usize) {
    let mut out = String::new();
    let mut chars = src[start + 1..].char_indices();
    while let Some((off, ch)) = chars.next() {
        let pos = start + 1 + off;
        match ch {
            '"' => return (Tok::Str(normalize_placeholders(&out)), pos + 1),
            '\\' => match chars.next() {
                Some((_, 'n')) => out.push('\n'),
                Some((_, 't')) => out.push('\t'),
                Some((_, '"')) => out.push('"'),
                Some((_, '\\')) => out.push('\\'),
                Some((o, other)) => {
                    diags.push(Diagnostic::error(
                        Code::Syntax,
                        Span::new(pos, start + 1 + o + other.len_utf8()),
                        format!("unknown escape `\\{other}`"),
                    ));
                }
                None => break,
            },
            c => out.push(c),
        }
    }
    diags.push(Diagnostic::error(
        Code::Syntax,
        Span::new(start, src.len()),
        "unterminated string literal",
    ));
    (Tok::Str(out), src.len())
}

/// `{{}}` is read as an escaped placeholder and normalized to `{}`.
fn normalize_placeholders(s: &str) -> String {
    s.replace("{{}}", "{}")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(src: &str) -> Vec<Tok> {
        let (t, d) = tokenize(src);
        assert!(d.is_empty(), "{d:?}");
        t.into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn projections_after_dot_are_integers() {
        assert_eq!(
            toks("x.0.1"),
            vec![Tok::Ident("x".into()), Tok::Dot, Tok::Int(0), Tok::Dot, Tok::Int(1), Tok::Eof]
        );
        assert_eq!(toks("2.0"), vec![Tok::Float(2.0), Tok::Eof]);
    }

    #[test]
    fn durations_and_frequencies() {
        assert_eq!(toks("1Hz"), vec![Tok::Duration(Duration::from_secs(1)), Tok::Eof]);
        assert_eq!(toks("10s"), vec![Tok::Duration(Duration::from_secs(10)), Tok::Eof]);
        assert_eq!(toks("0.5Hz"), vec![Tok::Duration(Duration::from_secs(2)), Tok::Eof]);
        let (_, d) = tokenize("3Hz");
        assert_eq!(d[0].code, Code::InvalidFrequency);
    }

    #[test]
    fn operators_and_comments() {
        assert_eq!(
            toks("a ** b // c\n:= /* x */ !=="),
            vec![
                Tok::Ident("a".into()),
                Tok::StarStar,
                Tok::Ident("b".into()),
                Tok::Assign,
                Tok::NotEq,
                Tok::Eq,
                Tok::Eof
            ]
        );
    }

    #[test]
    fn escaped_placeholder_is_normalized() {
        assert_eq!(toks(r#""Intruder {{}} detected""#), vec![Tok::Str("Intruder {} detected".into()), Tok::Eof]);
    }
}
