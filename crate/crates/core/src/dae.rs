//! A small DAE description language and the signature matrix it induces.
//!
//! ```text
//! // planar pendulum
//! var x, y, lam;
//! param g, L;
//! eq f1: der(x, 2) + x*lam;
//! eq f2: der(der(y)) + y*lam - g;
//! eq f3: x^2 + y^2 = L^2;
//! ```
//!
//! Statements end with `;`. `var` declares unknowns in column order, `input`
//! and `param` declare opaque symbols, and `eq name: lhs [= rhs];` declares an
//! equation in row order. Expressions are scanned, not evaluated: the only
//! thing extracted is which variables occur and under how many derivatives.
//! Identifiers that are not variables (including an undeclared `t`) are
//! treated as opaque constants.

use std::collections::{HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::sigma::{Order, SigmaError, SignatureMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DaeError {
    #[error("{line}:{col}: syntax error: {message}")]
    Syntax { line: usize, col: usize, message: String },
    #[error("{line}:{col}: der applied to `{name}`, which is not a declared variable")]
    DerOfNonVariable { line: usize, col: usize, name: String },
    #[error("{line}:{col}: derivative order must be a positive integer, found {order}")]
    NonPositiveDerOrder { line: usize, col: usize, order: i64 },
    #[error("{line}:{col}: `{name}` is declared twice")]
    DuplicateDeclaration { line: usize, col: usize, name: String },
    #[error("model is not square: {equations} equations, {variables} variables")]
    NonSquareModel { equations: usize, variables: usize },
    #[error(transparent)]
    Sigma(#[from] SigmaError),
}

impl DaeError {
    /// Source position, when the error has one.
    pub fn position(&self) -> Option<(usize, usize)> {
        match *self {
            DaeError::Syntax { line, col, .. }
            | DaeError::DerOfNonVariable { line, col, .. }
            | DaeError::NonPositiveDerOrder { line, col, .. }
            | DaeError::DuplicateDeclaration { line, col, .. } => Some((line, col)),
            _ => None,
        }
    }
}

/// One equation and the variable occurrences found in it, in source order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Equation {
    pub name: String,
    /// `(variable index, derivative order)`, duplicates kept.
    pub occurrences: Vec<(usize, Order)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DaeModel {
    pub variables: Vec<String>,
    pub inputs: Vec<String>,
    pub params: Vec<String>,
    pub equations: Vec<Equation>,
}

impl DaeModel {
    pub fn variable_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v == name)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Number(String),
    Punct(char),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Number(s) => write!(f, "number {s}"),
            Tok::Punct(c) => write!(f, "`{c}`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Token>, DaeError> {
    let mut out = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line_no = ln + 1;
        let chars: Vec<char> = line.chars().collect();
        let mut k = 0;
        while k < chars.len() {
            let ch = chars[k];
            let col = k + 1;
            if ch.is_whitespace() {
                k += 1;
            } else if ch == '/' && chars.get(k + 1) == Some(&'/') {
                break;
            } else if ch.is_ascii_alphabetic() || ch == '_' {
                let start = k;
                while k < chars.len() && (chars[k].is_ascii_alphanumeric() || chars[k] == '_') {
                    k += 1;
                }
                out.push(Token {
                    tok: Tok::Ident(chars[start..k].iter().collect()),
                    line: line_no,
                    col,
                });
            } else if ch.is_ascii_digit() || (ch == '.' && chars.get(k + 1).is_some_and(|c| c.is_ascii_digit())) {
                let start = k;
                while k < chars.len() && (chars[k].is_ascii_digit() || chars[k] == '.') {
                    k += 1;
                }
                if k < chars.len() && (chars[k] == 'e' || chars[k] == 'E') {
                    let mut e = k + 1;
                    if e < chars.len() && (chars[e] == '+' || chars[e] == '-') {
                        e += 1;
                    }
                    if e < chars.len() && chars[e].is_ascii_digit() {
                        k = e;
                        while k < chars.len() && chars[k].is_ascii_digit() {
                            k += 1;
                        }
                    }
                }
                out.push(Token {
                    tok: Tok::Number(chars[start..k].iter().collect()),
                    line: line_no,
                    col,
                });
            } else if ";,:()+-*/^=".contains(ch) {
                out.push(Token {
                    tok: Tok::Punct(ch),
                    line: line_no,
                    col,
                });
                k += 1;
            } else {
                return Err(DaeError::Syntax {
                    line: line_no,
                    col,
                    message: format!("unexpected character `{ch}`"),
                });
            }
        }
    }
    let (line, col) = out.last().map_or((1, 1), |t| (t.line, t.col + 1));
    out.push(Token {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Var,
    Input,
    Param,
    Eq,
}

/// An identifier seen inside an expression, resolved once all declarations
/// are known.
struct Mention {
    name: String,
    order: Order,
    under_der: bool,
    line: usize,
    col: usize,
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn error(&self, t: &Token, message: impl Into<String>) -> DaeError {
        DaeError::Syntax {
            line: t.line,
            col: t.col,
            message: message.into(),
        }
    }

    fn expect(&mut self, c: char) -> Result<Token, DaeError> {
        let t = self.bump();
        if t.tok == Tok::Punct(c) {
            Ok(t)
        } else {
            Err(self.error(&t, format!("expected `{c}`, found {}", t.tok)))
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek().tok == Tok::Punct(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn name(&mut self) -> Result<Token, DaeError> {
        let t = self.bump();
        match &t.tok {
            Tok::Ident(s) if s == "der" => Err(self.error(&t, "`der` is reserved")),
            Tok::Ident(_) => Ok(t),
            other => Err(self.error(&t, format!("expected an identifier, found {other}"))),
        }
    }

    // expr := term (('+' | '-') term)*
    fn expr(&mut self, out: &mut Vec<Mention>) -> Result<(), DaeError> {
        self.term(out)?;
        while self.eat('+') || self.eat('-') {
            self.term(out)?;
        }
        Ok(())
    }

    // term := unary (('*' | '/') unary)*
    fn term(&mut self, out: &mut Vec<Mention>) -> Result<(), DaeError> {
        self.unary(out)?;
        while self.eat('*') || self.eat('/') {
            self.unary(out)?;
        }
        Ok(())
    }

    // unary := ('+' | '-') unary | primary ('^' unary)?
    fn unary(&mut self, out: &mut Vec<Mention>) -> Result<(), DaeError> {
        if self.eat('-') || self.eat('+') {
            return self.unary(out);
        }
        self.primary(out)?;
        if self.eat('^') {
            self.unary(out)?;
        }
        Ok(())
    }

    fn primary(&mut self, out: &mut Vec<Mention>) -> Result<(), DaeError> {
        let t = self.bump();
        match &t.tok {
            Tok::Number(_) => Ok(()),
            Tok::Punct('(') => {
                self.expr(out)?;
                self.expect(')').map(drop)
            }
            Tok::Ident(s) if s == "der" => {
                let m = self.der(&t)?;
                out.push(m);
                Ok(())
            }
            Tok::Ident(s) => {
                out.push(Mention {
                    name: s.clone(),
                    order: 0,
                    under_der: false,
                    line: t.line,
                    col: t.col,
                });
                if self.eat('(') && !self.eat(')') {
                    self.expr(out)?;
                    while self.eat(',') {
                        self.expr(out)?;
                    }
                    self.expect(')')?;
                }
                Ok(())
            }
            other => Err(self.error(&t, format!("expected an expression, found {other}"))),
        }
    }

    /// `der(arg)` or `der(arg, k)` after the `der` keyword. The argument is a
    /// name or another `der`; orders add up.
    fn der(&mut self, kw: &Token) -> Result<Mention, DaeError> {
        self.expect('(')?;
        let arg = self.bump();
        let mut m = match &arg.tok {
            Tok::Ident(s) if s == "der" => self.der(&arg)?,
            Tok::Ident(s) => Mention {
                name: s.clone(),
                order: 0,
                under_der: true,
                line: arg.line,
                col: arg.col,
            },
            _ => {
                return Err(DaeError::DerOfNonVariable {
                    line: arg.line,
                    col: arg.col,
                    name: arg.tok.to_string().trim_matches('`').to_string(),
                })
            }
        };
        let mut k: i64 = 1;
        if self.eat(',') {
            let negative = self.eat('-');
            let lit = self.bump();
            let value = match &lit.tok {
                Tok::Number(s) => s
                    .parse::<i64>()
                    .map_err(|_| self.error(&lit, format!("derivative order must be an integer literal, found {s}")))?,
                other => return Err(self.error(&lit, format!("expected a derivative order, found {other}"))),
            };
            k = if negative { -value } else { value };
            if k < 1 {
                return Err(DaeError::NonPositiveDerOrder {
                    line: lit.line,
                    col: lit.col,
                    order: k,
                });
            }
        }
        let next = self.peek().clone();
        if next.tok != Tok::Punct(')') {
            // Anything else inside der(...) means the argument is not a bare name.
            return Err(DaeError::DerOfNonVariable {
                line: kw.line,
                col: kw.col,
                name: m.name,
            });
        }
        self.bump();
        m.order = Order::try_from(k)
            .ok()
            .and_then(|k| m.order.checked_add(k))
            .ok_or_else(|| self.error(kw, "derivative order too large"))?;
        m.under_der = true;
        Ok(m)
    }
}

/// Parses a model, resolving every `der` to a `(variable, order)` occurrence.
pub fn parse_model(text: &str) -> Result<DaeModel, DaeError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let mut model = DaeModel::default();
    let mut declared: HashMap<String, Kind> = HashMap::new();
    let mut eq_names: HashSet<String> = HashSet::new();
    let mut pending: Vec<Vec<Mention>> = Vec::new();

    loop {
        let t = p.bump();
        let word = match &t.tok {
            Tok::Eof => break,
            Tok::Ident(w) => w.clone(),
            other => return Err(p.error(&t, format!("expected a statement, found {other}"))),
        };
        let kind = match word.as_str() {
            "var" => Kind::Var,
            "input" => Kind::Input,
            "param" => Kind::Param,
            "eq" => Kind::Eq,
            _ => return Err(p.error(&t, format!("unknown statement `{word}`"))),
        };
        if kind == Kind::Eq {
            let name = p.name()?;
            let Tok::Ident(name_str) = name.tok.clone() else {
                unreachable!()
            };
            if !eq_names.insert(name_str.clone()) {
                return Err(DaeError::DuplicateDeclaration {
                    line: name.line,
                    col: name.col,
                    name: name_str,
                });
            }
            p.expect(':')?;
            let mut mentions = Vec::new();
            p.expr(&mut mentions)?;
            if p.eat('=') {
                p.expr(&mut mentions)?;
            }
            p.expect(';')?;
            model.equations.push(Equation {
                name: name_str,
                occurrences: Vec::new(),
            });
            pending.push(mentions);
        } else {
            loop {
                let name = p.name()?;
                let Tok::Ident(s) = name.tok.clone() else {
                    unreachable!()
                };
                if declared.insert(s.clone(), kind).is_some() {
                    return Err(DaeError::DuplicateDeclaration {
                        line: name.line,
                        col: name.col,
                        name: s,
                    });
                }
                match kind {
                    Kind::Var => model.variables.push(s),
                    Kind::Input => model.inputs.push(s),
                    _ => model.params.push(s),
                }
                if !p.eat(',') {
                    break;
                }
            }
            p.expect(';')?;
        }
    }

    let index: HashMap<&str, usize> = model
        .variables
        .iter()
        .enumerate()
        .map(|(j, v)| (v.as_str(), j))
        .collect();
    for (eq, mentions) in model.equations.iter_mut().zip(pending) {
        for m in mentions {
            match index.get(m.name.as_str()) {
                Some(&j) => eq.occurrences.push((j, m.order)),
                None if m.under_der => {
                    return Err(DaeError::DerOfNonVariable {
                        line: m.line,
                        col: m.col,
                        name: m.name,
                    })
                }
                None => {}
            }
        }
    }
    Ok(model)
}

/// `σ_ij` is the highest derivative order of variable `j` in equation `i`;
/// pairs with no occurrence are absent. Labels come from the model.
pub fn build_signature(model: &DaeModel) -> Result<SignatureMatrix, DaeError> {
    let n = model.variables.len();
    if model.equations.len() != n {
        return Err(DaeError::NonSquareModel {
            equations: model.equations.len(),
            variables: n,
        });
    }
    let mut best: HashMap<(usize, usize), Order> = HashMap::new();
    for (i, eq) in model.equations.iter().enumerate() {
        for &(j, k) in &eq.occurrences {
            let e = best.entry((i, j)).or_insert(k);
            *e = (*e).max(k);
        }
    }
    let m = SignatureMatrix::from_triplets(n, best.into_iter().map(|((i, j), k)| (i, j, i64::from(k))))?
        .with_row_labels(model.equations.iter().map(|e| e.name.clone()).collect())?
        .with_col_labels(model.variables.clone())?;
    Ok(m)
}

/// [`parse_model`] followed by [`build_signature`].
pub fn signature_from_source(text: &str) -> Result<SignatureMatrix, DaeError> {
    build_signature(&parse_model(text)?)
}
