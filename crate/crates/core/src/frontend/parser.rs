//! Recursive-descent parser.
//!
//! Operator precedence, loosest first: `||`, `&&`, comparisons, `+ -`,
//! `* / %`, `**` (right associative), unary `! -`, then postfix method chains
//! and tuple projections.

use std::collections::HashSet;

use super::ast::*;
use super::lexer::{tokenize, Tok, Token};
use crate::diagnostics::{Code, Diagnostic, Span};

const MAX_DEPTH: usize = 200;
const KNOWN_IMPORTS: &[&str] = &["math"];

/// Parses a specification. Any input yields either a syntax tree or at least
/// one error diagnostic.
pub fn parse(source: &str) -> Result<Ast, Vec<Diagnostic>> {
    let (tokens, mut diags) = tokenize(source);
    let mut parser = Parser {
        tokens,
        pos: 0,
        diags: Vec::new(),
        depth: 0,
        trigger_count: 0,
    };
    let ast = parser.spec();
    diags.append(&mut parser.diags);
    if diags.is_empty() {
        validate(&ast, &mut diags);
    }
    if diags.iter().any(Diagnostic::is_error) {
        diags.sort_by_key(|d| d.span.start);
        Err(diags)
    } else {
        Ok(ast)
    }
}

/// Post-parse checks: unknown imports and duplicate names.
fn validate(ast: &Ast, diags: &mut Vec<Diagnostic>) {
    for import in &ast.imports {
        if !KNOWN_IMPORTS.contains(&import.name.as_str()) {
            diags.push(Diagnostic::error(
                Code::UnknownImport,
                import.span,
                format!("unknown module `{}`; only `math` can be imported", import.name),
            ));
        }
    }
    let mut seen: HashSet<&str> = HashSet::new();
    for decl in &ast.declarations {
        if !seen.insert(decl.name.name.as_str()) {
            diags.push(Diagnostic::error(
                Code::DuplicateName,
                decl.name.span,
                format!("the name `{}` is declared more than once", decl.name.name),
            ));
        }
    }
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    diags: Vec<Diagnostic>,
    depth: usize,
    trigger_count: usize,
}

type PResult<T> = Result<T, Diagnostic>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn peek_at(&self, n: usize) -> &Tok {
        let idx = (self.pos + n).min(self.tokens.len() - 1);
        &self.tokens[idx].tok
    }

    fn span(&self) -> Span {
        self.tokens[self.pos].span
    }

    fn prev_span(&self) -> Span {
        if self.pos == 0 {
            self.span()
        } else {
            self.tokens[self.pos - 1].span
        }
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn at(&self, tok: &Tok) -> bool {
        self.peek() == tok
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.at(tok) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &Tok, what: &str) -> PResult<Span> {
        if self.at(tok) {
            Ok(self.bump().span)
        } else {
            Err(self.unexpected(what))
        }
    }

    fn unexpected(&self, what: &str) -> Diagnostic {
        Diagnostic::error(
            Code::Syntax,
            self.span(),
            format!("expected {what}, found {}", self.peek().describe()),
        )
    }

    fn ident(&mut self, what: &str) -> PResult<Ident> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                let span = self.bump().span;
                Ok(Ident::new(name, span))
            }
            _ => Err(self.unexpected(what)),
        }
    }

    fn at_decl_start(&self) -> bool {
        matches!(
            self.peek(),
            Tok::Import | Tok::Input | Tok::Output | Tok::Constant | Tok::Trigger | Tok::Eof
        )
    }

    fn recover(&mut self) {
        self.bump();
        while !self.at_decl_start() {
            self.bump();
        }
    }

    fn spec(&mut self) -> Ast {
        let mut ast = Ast::default();
        while !self.at(&Tok::Eof) {
            let result = match self.peek() {
                Tok::Import => self.import().map(|i| ast.imports.push(i)),
                Tok::Input => self.input().map(|d| ast.declarations.push(d)),
                Tok::Constant => self.constant().map(|d| ast.declarations.push(d)),
                Tok::Output => self.output().map(|d| ast.declarations.push(d)),
                Tok::Trigger => self.trigger().map(|d| ast.declarations.push(d)),
                _ => Err(self.unexpected("a declaration")),
            };
            if let Err(d) = result {
                self.diags.push(d);
                self.recover();
            }
        }
        ast
    }

    fn import(&mut self) -> PResult<Ident> {
        self.bump();
        self.ident("a module name")
    }

    fn input(&mut self) -> PResult<Declaration> {
        let start = self.bump().span;
        let name = self.ident("an input name")?;
        self.expect(&Tok::Colon, "`:` and a type")?;
        let ty = self.type_expr()?;
        Ok(Declaration {
            kind: DeclKind::Input,
            name,
            parameters: Vec::new(),
            ty: Some(ty),
            spawn: None,
            eval: None,
            close: None,
            constant_value: None,
            span: start.to(self.prev_span()),
        })
    }

    fn constant(&mut self) -> PResult<Declaration> {
        let start = self.bump().span;
        let name = self.ident("a constant name")?;
        self.expect(&Tok::Colon, "`:` and a type")?;
        let ty = self.type_expr()?;
        self.expect(&Tok::Assign, "`:=`")?;
        let value = self.literal_value()?;
        Ok(Declaration {
            kind: DeclKind::Constant,
            name,
            parameters: Vec::new(),
            ty: Some(ty),
            spawn: None,
            eval: None,
            close: None,
            constant_value: Some(value),
            span: start.to(self.prev_span()),
        })
    }

    fn literal_value(&mut self) -> PResult<Literal> {
        let negative = self.eat(&Tok::Minus);
        let tok = self.peek().clone();
        let lit = match tok {
            Tok::Int(n) if negative => {
                if n == 0 {
                    Literal::Int(0)
                } else {
                    return Err(Diagnostic::error(
                        Code::InvalidLiteral,
                        self.span(),
                        "negative integer constants are written as arithmetic on streams; use a float literal or a non-negative integer",
                    ));
                }
            }
            Tok::Int(n) => Literal::Int(n),
            Tok::Float(f) => Literal::Float(if negative { -f } else { f }),
            Tok::True if !negative => Literal::Bool(true),
            Tok::False if !negative => Literal::Bool(false),
            Tok::Str(ref s) if !negative => Literal::Str(s.clone()),
            _ => return Err(self.unexpected("a literal")),
        };
        self.bump();
        Ok(lit)
    }

    fn type_expr(&mut self) -> PResult<TypeExpr> {
        let start = self.span();
        if self.eat(&Tok::LParen) {
            let mut elems = vec![self.type_expr()?];
            while self.eat(&Tok::Comma) {
                elems.push(self.type_expr()?);
            }
            self.expect(&Tok::RParen, "`)`")?;
            return Ok(TypeExpr {
                kind: TypeExprKind::Tuple(elems),
                span: start.to(self.prev_span()),
            });
        }
        let name = self.ident("a type")?;
        Ok(TypeExpr {
            kind: TypeExprKind::Named(name.name),
            span: name.span,
        })
    }

    fn parameters(&mut self) -> PResult<Vec<Ident>> {
        self.expect(&Tok::LParen, "`(`")?;
        let mut params = vec![self.ident("a parameter name")?];
        while self.eat(&Tok::Comma) {
            params.push(self.ident("a parameter name")?);
        }
        self.expect(&Tok::RParen, "`)`")?;
        let mut seen = HashSet::new();
        for p in &params {
            if !seen.insert(p.name.as_str()) {
                return Err(Diagnostic::error(
                    Code::DuplicateName,
                    p.span,
                    format!("parameter `{}` is declared twice", p.name),
                ));
            }
        }
        Ok(params)
    }

    fn output(&mut self) -> PResult<Declaration> {
        let start = self.bump().span;
        let name = self.ident("an output name")?;
        let parameters = if self.at(&Tok::LParen) {
            self.parameters()?
        } else {
            Vec::new()
        };
        let ty = if self.eat(&Tok::Colon) {
            Some(self.type_expr()?)
        } else {
            None
        };
        let pacing = if self.at(&Tok::At) {
            Some(self.pacing()?)
        } else {
            None
        };
        let mut decl = Declaration {
            kind: DeclKind::Output,
            name,
            parameters,
            ty,
            spawn: None,
            eval: None,
            close: None,
            constant_value: None,
            span: start,
        };
        if self.at(&Tok::Assign) {
            let assign = self.bump().span;
            let expr = self.expr()?;
            decl.eval = Some(Clause {
                pacing,
                when: None,
                with: Some(expr),
                span: assign.to(self.prev_span()),
            });
        } else {
            self.clauses(&mut decl)?;
            let eval = decl.eval.as_mut().expect("clauses ensure an eval clause");
            if let Some(p) = pacing {
                if eval.pacing.is_some() {
                    return Err(Diagnostic::error(
                        Code::Syntax,
                        p.span(),
                        "pacing given both on the stream and on its eval clause",
                    ));
                }
                eval.pacing = Some(p);
            }
            if eval.with.is_none() {
                return Err(Diagnostic::error(
                    Code::Syntax,
                    eval.span,
                    "the eval clause of an output needs a `with` expression",
                ));
            }
        }
        self.check_spawn_arity(&decl)?;
        decl.span = start.to(self.prev_span());
        Ok(decl)
    }

    fn trigger(&mut self) -> PResult<Declaration> {
        let start = self.bump().span;
        let name = Ident::new(format!("trigger_{}", self.trigger_count), start);
        self.trigger_count += 1;
        let parameters = if self.at(&Tok::LParen) && self.parameter_list_then_clause() {
            self.parameters()?
        } else {
            Vec::new()
        };
        let mut decl = Declaration {
            kind: DeclKind::Trigger,
            name,
            parameters,
            ty: None,
            spawn: None,
            eval: None,
            close: None,
            constant_value: None,
            span: start,
        };
        if matches!(self.peek(), Tok::Spawn | Tok::Eval | Tok::Close) {
            self.clauses(&mut decl)?;
        } else {
            let pacing = if self.at(&Tok::At) {
                Some(self.pacing()?)
            } else {
                None
            };
            let cond = self.expr()?;
            let message = match self.peek().clone() {
                Tok::Str(s) => {
                    let span = self.bump().span;
                    Some(Expr::new(ExprKind::Lit(Literal::Str(s)), span))
                }
                _ => None,
            };
            decl.eval = Some(Clause {
                pacing,
                span: cond.span.to(self.prev_span()),
                when: Some(cond),
                with: message,
            });
        }
        self.check_spawn_arity(&decl)?;
        decl.span = start.to(self.prev_span());
        Ok(decl)
    }

    /// Lookahead for `trigger(a, b) spawn ...` as opposed to a parenthesized
    /// trigger condition.
    fn parameter_list_then_clause(&self) -> bool {
        let mut n = 1;
        loop {
            if !matches!(self.peek_at(n), Tok::Ident(_)) {
                return false;
            }
            n += 1;
            match self.peek_at(n) {
                Tok::Comma => n += 1,
                Tok::RParen => break,
                _ => return false,
            }
        }
        matches!(self.peek_at(n + 1), Tok::Spawn | Tok::Eval | Tok::Close)
    }

    fn check_spawn_arity(&self, decl: &Declaration) -> PResult<()> {
        let with = decl.spawn.as_ref().and_then(|s| s.with.as_ref());
        match (decl.parameters.is_empty(), with) {
            (true, Some(w)) => Err(Diagnostic::error(
                Code::ArityMismatch,
                w.span,
                format!("`{}` has no parameters but its spawn clause has a `with` expression", decl.name.name),
            )),
            (false, None) => Err(Diagnostic::error(
                Code::ArityMismatch,
                decl.name.span,
                format!("parameterized stream `{}` needs a `spawn ... with` clause", decl.name.name),
            )),
            (false, Some(w)) => match &w.kind {
                ExprKind::Tuple(elems) if elems.len() != decl.parameters.len() => Err(Diagnostic::error(
                    Code::ArityMismatch,
                    w.span,
                    format!(
                        "spawn expression has {} components but `{}` has {} parameters",
                        elems.len(),
                        decl.name.name,
                        decl.parameters.len()
                    ),
                )),
                _ => Ok(()),
            },
            (true, None) => Ok(()),
        }
    }

    fn clauses(&mut self, decl: &mut Declaration) -> PResult<()> {
        loop {
            let kind = self.peek().clone();
            let slot_name = match kind {
                Tok::Spawn => "spawn",
                Tok::Eval => "eval",
                Tok::Close => "close",
                _ => break,
            };
            let kw = self.bump().span;
            let pacing = if self.at(&Tok::At) {
                Some(self.pacing()?)
            } else {
                None
            };
            let when = if self.eat(&Tok::When) {
                Some(self.expr()?)
            } else {
                None
            };
            let with = if kind != Tok::Close && self.eat(&Tok::With) {
                Some(self.expr()?)
            } else {
                None
            };
            let clause = Clause {
                pacing,
                when,
                with,
                span: kw.to(self.prev_span()),
            };
            let slot = match kind {
                Tok::Spawn => &mut decl.spawn,
                Tok::Eval => &mut decl.eval,
                _ => {
                    if clause.when.is_none() {
                        return Err(Diagnostic::error(
                            Code::Syntax,
                            clause.span,
                            "a close clause needs a `when` condition",
                        ));
                    }
                    &mut decl.close
                }
            };
            if slot.is_some() {
                return Err(Diagnostic::error(
                    Code::Syntax,
                    kw,
                    format!("duplicate {slot_name} clause"),
                ));
            }
            *slot = Some(clause);
        }
        if decl.eval.is_none() {
            return Err(Diagnostic::error(
                Code::Syntax,
                self.span(),
                format!("`{}` needs an eval clause", decl.name.name),
            ));
        }
        Ok(())
    }

    fn pacing(&mut self) -> PResult<PacingExpr> {
        self.expect(&Tok::At, "`@`")?;
        let result = if let Tok::Duration(period) = *self.peek() {
            let span = self.bump().span;
            PacingExpr::Periodic { period, span }
        } else {
            PacingExpr::Event(self.activation_or()?)
        };
        self.expect(&Tok::At, "closing `@`")?;
        Ok(result)
    }

    fn activation_or(&mut self) -> PResult<ActivationExpr> {
        let mut lhs = self.activation_and()?;
        while self.eat(&Tok::OrOr) {
            let rhs = self.activation_and()?;
            lhs = ActivationExpr::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn activation_and(&mut self) -> PResult<ActivationExpr> {
        let mut lhs = self.activation_atom()?;
        while self.eat(&Tok::AndAnd) {
            let rhs = self.activation_atom()?;
            lhs = ActivationExpr::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn activation_atom(&mut self) -> PResult<ActivationExpr> {
        self.enter()?;
        let result = match self.peek().clone() {
            Tok::True => Ok(ActivationExpr::True(self.bump().span)),
            Tok::Ident(name) => {
                let span = self.bump().span;
                Ok(ActivationExpr::Stream(Ident::new(name, span)))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.activation_or()?;
                self.expect(&Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::Bang => Err(Diagnostic::error(
                Code::Syntax,
                self.span(),
                "activation conditions cannot contain negation",
            )),
            _ => Err(self.unexpected("an input stream name, `true` or a frequency")),
        };
        self.depth -= 1;
        result
    }

    fn enter(&mut self) -> PResult<()> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            self.depth -= 1;
            return Err(Diagnostic::error(Code::Syntax, self.span(), "expression nesting too deep"));
        }
        Ok(())
    }

    pub(crate) fn expr(&mut self) -> PResult<Expr> {
        self.binary(1)
    }

    fn binop(&self) -> Option<BinOp> {
        Some(match self.peek() {
            Tok::OrOr => BinOp::Or,
            Tok::AndAnd => BinOp::And,
            Tok::Eq => BinOp::Eq,
            Tok::NotEq => BinOp::Ne,
            Tok::Lt => BinOp::Lt,
            Tok::Le => BinOp::Le,
            Tok::Gt => BinOp::Gt,
            Tok::Ge => BinOp::Ge,
            Tok::Plus => BinOp::Add,
            Tok::Minus => BinOp::Sub,
            Tok::Star => BinOp::Mul,
            Tok::Slash => BinOp::Div,
            Tok::Percent => BinOp::Rem,
            Tok::StarStar => BinOp::Pow,
            _ => return None,
        })
    }

    fn binary(&mut self, min_prec: u8) -> PResult<Expr> {
        self.enter()?;
        let result = self.binary_inner(min_prec);
        self.depth -= 1;
        result
    }

    fn binary_inner(&mut self, min_prec: u8) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        while let Some(op) = self.binop() {
            let prec = op.precedence();
            if prec < min_prec {
                break;
            }
            self.bump();
            let next_min = if op.right_assoc() { prec } else { prec + 1 };
            let rhs = self.binary(next_min)?;
            let span = lhs.span.to(rhs.span);
            lhs = Expr::new(ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)), span);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Expr> {
        let op = match self.peek() {
            Tok::Bang => UnOp::Not,
            Tok::Minus => UnOp::Neg,
            _ => return self.postfix(),
        };
        self.enter()?;
        let start = self.bump().span;
        let inner = self.unary();
        self.depth -= 1;
        let inner = inner?;
        let span = start.to(inner.span);
        Ok(Expr::new(ExprKind::Unary(op, Box::new(inner)), span))
    }

    fn postfix(&mut self) -> PResult<Expr> {
        let mut expr = self.primary()?;
        while self.eat(&Tok::Dot) {
            match self.peek().clone() {
                Tok::Int(idx) => {
                    let end = self.bump().span;
                    let span = expr.span.to(end);
                    expr = Expr::new(ExprKind::Project(Box::new(expr), idx as usize), span);
                }
                Tok::Ident(method) => {
                    let mspan = self.bump().span;
                    expr = self.method(expr, &method, mspan)?;
                }
                _ => return Err(self.unexpected("a method name or tuple index")),
            }
        }
        Ok(expr)
    }

    fn label(&mut self, name: &str) -> PResult<()> {
        match self.peek() {
            Tok::Ident(n) if n == name => {
                self.bump();
                self.expect(&Tok::Colon, "`:`")?;
                Ok(())
            }
            _ => Err(self.unexpected(&format!("`{name}:`"))),
        }
    }

    fn method(&mut self, recv: Expr, method: &str, mspan: Span) -> PResult<Expr> {
        self.expect(&Tok::LParen, "`(`")?;
        let kind = match method {
            "offset" => {
                self.label("by")?;
                let neg_span = self.span();
                if !self.eat(&Tok::Minus) {
                    return Err(Diagnostic::error(
                        Code::InvalidLiteral,
                        neg_span,
                        "offsets must be strictly negative integers",
                    ));
                }
                match *self.peek() {
                    Tok::Int(n) if n > 0 && n <= u32::MAX as u64 => {
                        self.bump();
                        ExprKind::Offset(Box::new(recv), n as u32)
                    }
                    _ => {
                        return Err(Diagnostic::error(
                            Code::InvalidLiteral,
                            self.span(),
                            "offsets must be strictly negative integers",
                        ))
                    }
                }
            }
            "defaults" => {
                self.label("to")?;
                let d = self.expr()?;
                ExprKind::Defaults(Box::new(recv), Box::new(d))
            }
            "hold" => {
                if self.at(&Tok::RParen) {
                    ExprKind::Hold(Box::new(recv), None)
                } else {
                    self.label("or")?;
                    let d = self.expr()?;
                    ExprKind::Hold(Box::new(recv), Some(Box::new(d)))
                }
            }
            "aggregate" => self.aggregate(recv)?,
            "format" => {
                let mut args = Vec::new();
                if !self.at(&Tok::RParen) {
                    args.push(self.expr()?);
                    while self.eat(&Tok::Comma) {
                        args.push(self.expr()?);
                    }
                }
                ExprKind::Format(Box::new(recv), args)
            }
            other => {
                return Err(Diagnostic::error(
                    Code::Syntax,
                    mspan,
                    format!("unknown method `{other}`"),
                ))
            }
        };
        let end = self.expect(&Tok::RParen, "`)`")?;
        let start = match &kind {
            ExprKind::Offset(r, _)
            | ExprKind::Defaults(r, _)
            | ExprKind::Hold(r, _)
            | ExprKind::Format(r, _) => r.span,
            ExprKind::Window { target, .. } | ExprKind::InstanceAggregate { target, .. } => target.span,
            _ => mspan,
        };
        Ok(Expr::new(kind, start.to(end)))
    }

    fn aggregate(&mut self, recv: Expr) -> PResult<ExprKind> {
        let label = match self.peek() {
            Tok::Ident(l) => l.clone(),
            _ => return Err(self.unexpected("`over:`, `over_exactly:` or `over_instances:`")),
        };
        let kind = match label.as_str() {
            "over" | "over_exactly" => {
                self.bump();
                self.expect(&Tok::Colon, "`:`")?;
                let duration = match *self.peek() {
                    Tok::Duration(d) => {
                        self.bump();
                        d
                    }
                    _ => return Err(self.unexpected("a window duration such as `5s`")),
                };
                self.expect(&Tok::Comma, "`,`")?;
                self.label("using")?;
                let using = self.ident("an aggregation function")?;
                ExprKind::Window {
                    target: Box::new(recv),
                    duration,
                    exact: label == "over_exactly",
                    using,
                }
            }
            "over_instances" => {
                self.bump();
                self.expect(&Tok::Colon, "`:`")?;
                let sel = self.ident("`all` or `fresh`")?;
                let selection = match sel.name.as_str() {
                    "all" => InstanceSelection::All,
                    "fresh" => InstanceSelection::Fresh,
                    _ => {
                        return Err(Diagnostic::error(
                            Code::Syntax,
                            sel.span,
                            "expected `all` or `fresh`",
                        ))
                    }
                };
                self.expect(&Tok::Comma, "`,`")?;
                self.label("using")?;
                let using = self.ident("an aggregation function")?;
                ExprKind::InstanceAggregate {
                    target: Box::new(recv),
                    selection,
                    using,
                }
            }
            _ => return Err(self.unexpected("`over:`, `over_exactly:` or `over_instances:`")),
        };
        Ok(kind)
    }

    fn primary(&mut self) -> PResult<Expr> {
        let tok = self.peek().clone();
        let span = self.span();
        match tok {
            Tok::Int(n) => {
                self.bump();
                Ok(Expr::new(ExprKind::Lit(Literal::Int(n)), span))
            }
            Tok::Float(f) => {
                self.bump();
                Ok(Expr::new(ExprKind::Lit(Literal::Float(f)), span))
            }
            Tok::True | Tok::False => {
                self.bump();
                Ok(Expr::new(ExprKind::Lit(Literal::Bool(tok == Tok::True)), span))
            }
            Tok::Str(s) => {
                self.bump();
                Ok(Expr::new(ExprKind::Lit(Literal::Str(s)), span))
            }
            Tok::Ident(name) => {
                self.bump();
                let ident = Ident::new(name, span);
                if self.at(&Tok::LParen) {
                    self.bump();
                    let args = self.expr_list(&Tok::RParen)?;
                    let end = self.expect(&Tok::RParen, "`)`")?;
                    Ok(Expr::new(ExprKind::Apply(ident, args), span.to(end)))
                } else {
                    Ok(Expr::new(ExprKind::Ident(ident.name), span))
                }
            }
            Tok::LParen => {
                self.enter()?;
                self.bump();
                let res = self.expr_list(&Tok::RParen);
                self.depth -= 1;
                let mut elems = res?;
                let end = self.expect(&Tok::RParen, "`)`")?;
                match elems.len() {
                    0 => Err(Diagnostic::error(Code::Syntax, span.to(end), "empty parentheses")),
                    1 => {
                        let mut e = elems.pop().unwrap();
                        e.span = span.to(end);
                        Ok(e)
                    }
                    _ => Ok(Expr::new(ExprKind::Tuple(elems), span.to(end))),
                }
            }
            _ => Err(self.unexpected("an expression")),
        }
    }

    fn expr_list(&mut self, close: &Tok) -> PResult<Vec<Expr>> {
        let mut out = Vec::new();
        if self.at(close) {
            return Ok(out);
        }
        out.push(self.expr()?);
        while self.eat(&Tok::Comma) {
            out.push(self.expr()?);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::time::Duration;

    fn parse_ok(src: &str) -> Ast {
        match parse(src) {
            Ok(a) => a,
            Err(d) => panic!("{d:?}"),
        }
    }

    fn expr(src: &str) -> Expr {
        let ast = parse_ok(&format!("output x := {src}"));
        ast.declarations[0].eval.as_ref().unwrap().with.clone().unwrap()
    }

    #[test]
    fn empty_source() {
        assert_eq!(parse_ok(""), Ast::default());
    }

    #[test]
    fn precedence() {
        let e = expr("a + b * c ** d ** e");
        let ExprKind::Binary(BinOp::Add, _, rhs) = e.kind else { panic!() };
        let ExprKind::Binary(BinOp::Mul, _, rhs) = rhs.kind else { panic!() };
        let ExprKind::Binary(BinOp::Pow, _, rhs) = rhs.kind else { panic!() };
        assert!(matches!(rhs.kind, ExprKind::Binary(BinOp::Pow, _, _)));

        let e = expr("!a && b || c < d");
        let ExprKind::Binary(BinOp::Or, lhs, rhs) = e.kind else { panic!() };
        assert!(matches!(lhs.kind, ExprKind::Binary(BinOp::And, _, _)));
        assert!(matches!(rhs.kind, ExprKind::Binary(BinOp::Lt, _, _)));

        // unary binds tighter than **
        let e = expr("-a ** 2.0");
        assert!(matches!(e.kind, ExprKind::Binary(BinOp::Pow, _, _)));
    }

    #[test]
    fn method_chains() {
        let e = expr("s(id).hold().0.defaults(to: 0.0)");
        let ExprKind::Defaults(inner, _) = e.kind else { panic!() };
        let ExprKind::Project(inner, 0) = inner.kind else { panic!() };
        assert!(matches!(inner.kind, ExprKind::Hold(_, None)));

        let e = expr("c.aggregate(over_exactly: 5s, using: forall)");
        let ExprKind::Window { duration, exact, using, .. } = e.kind else { panic!() };
        assert_eq!(duration, Duration::from_secs(5));
        assert!(exact);
        assert_eq!(using.name, "forall");
    }

    #[test]
    fn offset_must_be_negative() {
        assert!(parse("output x := a.offset(by: 1)").is_err());
        assert!(parse("output x := a.offset(by: -0)").is_err());
        assert!(parse("output x := a.offset(by: -2).defaults(to: 0)").is_ok());
    }

    #[test]
    fn shorthand_and_clause_form_are_identical() {
        let a = parse_ok("input a: Int\noutput o := a + 1");
        let b = parse_ok("input a: Int\noutput o eval with a + 1");
        assert_eq!(a, b);
    }

    #[test]
    fn bare_trigger_desugars() {
        let ast = parse_ok("input a: Bool\ntrigger @1Hz@ a.hold(or: false) \"msg\"\ntrigger a");
        let t0 = &ast.declarations[1];
        assert_eq!(t0.kind, DeclKind::Trigger);
        assert_eq!(t0.name.name, "trigger_0");
        let eval = t0.eval.as_ref().unwrap();
        assert!(eval.pacing.is_some());
        assert!(eval.when.is_some());
        assert_eq!(eval.with.as_ref().unwrap().kind, ExprKind::Lit(Literal::Str("msg".into())));
        assert_eq!(ast.declarations[2].name.name, "trigger_1");
        assert!(ast.declarations[2].eval.as_ref().unwrap().with.is_none());
    }

    #[test]
    fn parameterized_trigger_lookahead() {
        let ast = parse_ok(
            "input i: UInt\ntrigger(id) spawn with i eval @1Hz@ when true with \"x {}\".format(id)\ntrigger (i > 3) \"big\"",
        );
        assert_eq!(ast.declarations[1].parameters.len(), 1);
        assert!(ast.declarations[2].parameters.is_empty());
    }

    #[test]
    fn self_reference_parses() {
        // rejecting it is the job of the well-formedness analysis
        assert!(parse("output s := s").is_ok());
    }

    #[test]
    fn syntax_errors_have_spans() {
        let err = parse("input a: Int\noutput x := a +\ninput b: Int\noutput y := )").unwrap_err();
        assert_eq!(err.len(), 2);
        assert!(err.iter().all(|d| d.code == Code::Syntax));
    }

    #[test]
    fn duplicates_and_imports() {
        let err = parse("input a: Int\ninput a: Int").unwrap_err();
        assert_eq!(err[0].code, Code::DuplicateName);
        let err = parse("import geo\ninput a: Int").unwrap_err();
        assert_eq!(err[0].code, Code::UnknownImport);
        let err = parse("input i: Int\noutput x(p, p) spawn with (i, i) eval with 1").unwrap_err();
        assert_eq!(err[0].code, Code::DuplicateName);
    }

    #[test]
    fn spawn_arity() {
        let err = parse("input i: Int\noutput x(p, q) spawn with (i, i, i) eval with 1").unwrap_err();
        assert_eq!(err[0].code, Code::ArityMismatch);
        let err = parse("input i: Int\noutput x(p) eval with 1").unwrap_err();
        assert_eq!(err[0].code, Code::ArityMismatch);
    }

    #[test]
    fn deep_nesting_is_an_error_not_a_crash() {
        let src = format!("output x := {}1{}", "(".repeat(5000), ")".repeat(5000));
        assert!(parse(&src).is_err());
        let src = format!("output x := {}1", "-".repeat(5000));
        assert!(parse(&src).is_err());
    }
}
