//! Concrete and abstract syntax: finite types, combinator terms, formulas,
//! a parser and a round-tripping pretty-printer.
//!
//! The surface grammar (`*` binds tighter than `->`, `->` right-associative,
//! application left-associative, `&` > `|` > `->` in formulas):
//!
//! ```text
//! Type    := "N" | Type "*" Type | Type "->" Type | "(" Type ")"
//! Term    := Ident | Ident ":" Type | Numeral | Comb TypeArgs?
//!          | Term Term | "(" Term ")" | "\" Ident ":" Type "." Term
//! Comb    := "K" | "S" | "PAIR" | "FST" | "SND" | "SUC" | "REC" | "0"
//! TypeArgs:= "[" Type ("," Type)* "]"
//! Formula := Term "==" Term | Term "=" Term | "ext" "(" Term ")" | "false"
//!          | Formula ("&" | "|" | "->") Formula | "(" Formula ")"
//!          | ("forall"|"exists"|"forallE"|"existsE") Ident ":" Type "." Formula
//! ```
//!
//! `x:T` ascriptions introduce free variables on the fly; `--` starts a
//! line comment. Lambdas are sugar: they are compiled away by bracket
//! abstraction at parse time, so parsed terms are pure
//! combinator/variable/application trees.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::typing::{self, Context, TypeError};

/// The type grammar `0 | sigma x tau | sigma -> tau`. The base type is the
/// naturals; the surface token for it is `N`.
// The manual PartialEq below is the derived structural relation plus a
// pointer fast path, so the derived Hash stays consistent with it.
#[allow(clippy::derived_hash_with_manual_eq)]
#[derive(Debug, Clone, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum FiniteType {
    Nat,
    Prod(Arc<FiniteType>, Arc<FiniteType>),
    Arrow(Arc<FiniteType>, Arc<FiniteType>),
}

// Structural equality with a pointer shortcut: types are built with heavy
// sharing, so identical subtrees are usually the same allocation.
impl PartialEq for FiniteType {
    fn eq(&self, other: &Self) -> bool {
        use FiniteType::*;
        match (self, other) {
            (Nat, Nat) => true,
            (Prod(a, b), Prod(c, d)) | (Arrow(a, b), Arrow(c, d)) => {
                (Arc::ptr_eq(a, c) || a == c) && (Arc::ptr_eq(b, d) || b == d)
            }
            _ => false,
        }
    }
}

impl FiniteType {
    pub fn prod(a: FiniteType, b: FiniteType) -> FiniteType {
        FiniteType::Prod(Arc::new(a), Arc::new(b))
    }

    pub fn arrow(a: FiniteType, b: FiniteType) -> FiniteType {
        FiniteType::Arrow(Arc::new(a), Arc::new(b))
    }

    /// Height of the type tree; `N` has depth 1.
    pub fn depth(&self) -> usize {
        match self {
            FiniteType::Nat => 1,
            FiniteType::Prod(a, b) | FiniteType::Arrow(a, b) => 1 + a.depth().max(b.depth()),
        }
    }
}

/// The typed combinator constants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Comb {
    K,
    S,
    Pair,
    Fst,
    Snd,
    Zero,
    Suc,
    Rec,
}

impl Comb {
    pub fn token(self) -> &'static str {
        match self {
            Comb::K => "K",
            Comb::S => "S",
            Comb::Pair => "PAIR",
            Comb::Fst => "FST",
            Comb::Snd => "SND",
            Comb::Zero => "0",
            Comb::Suc => "SUC",
            Comb::Rec => "REC",
        }
    }

    /// Number of type parameters the combinator schema takes.
    pub fn param_arity(self) -> usize {
        match self {
            Comb::K | Comb::Pair | Comb::Fst | Comb::Snd => 2,
            Comb::S => 3,
            Comb::Zero | Comb::Suc => 0,
            Comb::Rec => 1,
        }
    }

    /// How many application arguments are needed before the type
    /// parameters can be read back off the argument types.
    fn args_for_inference(self) -> usize {
        match self {
            Comb::K | Comb::Pair => 2,
            Comb::S | Comb::Fst | Comb::Snd | Comb::Rec => 1,
            Comb::Zero | Comb::Suc => 0,
        }
    }
}

/// Terms: variables carry their type, constants carry the type parameters
/// their schema needs, and application is bare. There are no binders.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub enum Term {
    Var { name: String, ty: FiniteType },
    Const { kind: Comb, params: Vec<FiniteType> },
    App(Arc<Term>, Arc<Term>),
}

impl Term {
    pub fn var(name: impl Into<String>, ty: FiniteType) -> Term {
        Term::Var { name: name.into(), ty }
    }

    pub fn constant(kind: Comb, params: Vec<FiniteType>) -> Term {
        debug_assert_eq!(params.len(), kind.param_arity());
        Term::Const { kind, params }
    }

    pub fn app(f: Term, a: Term) -> Term {
        Term::App(Arc::new(f), Arc::new(a))
    }

    pub fn app2(f: Term, a: Term, b: Term) -> Term {
        Term::app(Term::app(f, a), b)
    }

    pub fn app3(f: Term, a: Term, b: Term, c: Term) -> Term {
        Term::app(Term::app2(f, a, b), c)
    }

    pub fn app4(f: Term, a: Term, b: Term, c: Term, d: Term) -> Term {
        Term::app(Term::app3(f, a, b, c), d)
    }

    /// The canonical numeral `SUC^n 0`.
    pub fn numeral(n: u64) -> Term {
        let mut t = Term::constant(Comb::Zero, vec![]);
        for _ in 0..n {
            t = Term::app(Term::constant(Comb::Suc, vec![]), t);
        }
        t
    }

    /// Reads a numeral back, if the term is literally `SUC^n 0`.
    pub fn as_numeral(&self) -> Option<u64> {
        let mut n = 0u64;
        let mut cur = self;
        loop {
            match cur {
                Term::Const { kind: Comb::Zero, .. } => return Some(n),
                Term::App(f, a) => match f.as_ref() {
                    Term::Const { kind: Comb::Suc, .. } => {
                        n += 1;
                        cur = a;
                    }
                    _ => return None,
                },
                _ => return None,
            }
        }
    }

    /// Head and arguments of the application spine, in application order.
    pub fn spine(&self) -> (&Term, Vec<&Term>) {
        let mut args = Vec::new();
        let mut cur = self;
        while let Term::App(f, a) = cur {
            args.push(a.as_ref());
            cur = f;
        }
        args.reverse();
        (cur, args)
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Var { .. } | Term::Const { .. } => 1,
            Term::App(f, a) => 1 + f.size() + a.size(),
        }
    }
}

/// Formulas over the hybrid language: primitive equality `==`, extensional
/// equality `=`, the extensionality predicate `ext`, and the usual
/// intuitionistic connectives and typed quantifiers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub enum Formula {
    PrimEq(FiniteType, Term, Term),
    ExtEq(FiniteType, Term, Term),
    Ext(FiniteType, Term),
    Falsum,
    And(Arc<Formula>, Arc<Formula>),
    Or(Arc<Formula>, Arc<Formula>),
    Imp(Arc<Formula>, Arc<Formula>),
    Forall(String, FiniteType, Arc<Formula>),
    Exists(String, FiniteType, Arc<Formula>),
}

impl Formula {
    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Arc::new(a), Arc::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Arc::new(a), Arc::new(b))
    }

    pub fn imp(a: Formula, b: Formula) -> Formula {
        Formula::Imp(Arc::new(a), Arc::new(b))
    }

    /// Negation, spelled `phi -> false`.
    #[allow(clippy::should_implement_trait)]
    pub fn neg(a: Formula) -> Formula {
        Formula::imp(a, Formula::Falsum)
    }

    /// The smallest always-true atom, `0 == 0`; the language has no
    /// primitive truth constant.
    pub fn truth() -> Formula {
        Formula::PrimEq(FiniteType::Nat, Term::numeral(0), Term::numeral(0))
    }

    /// `(a -> b) & (b -> a)`.
    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::and(Formula::imp(a.clone(), b.clone()), Formula::imp(b, a))
    }

    pub fn forall(x: impl Into<String>, ty: FiniteType, body: Formula) -> Formula {
        Formula::Forall(x.into(), ty, Arc::new(body))
    }

    pub fn exists(x: impl Into<String>, ty: FiniteType, body: Formula) -> Formula {
        Formula::Exists(x.into(), ty, Arc::new(body))
    }
}

/// Typed first projection `FST[a,b] t`.
pub fn fst_term(a: &FiniteType, b: &FiniteType, t: Term) -> Term {
    Term::app(Term::constant(Comb::Fst, vec![a.clone(), b.clone()]), t)
}

/// Typed second projection `SND[a,b] t`.
pub fn snd_term(a: &FiniteType, b: &FiniteType, t: Term) -> Term {
    Term::app(Term::constant(Comb::Snd, vec![a.clone(), b.clone()]), t)
}

/// Typed pairing `PAIR[a,b] x y`.
pub fn pair_term(a: &FiniteType, b: &FiniteType, x: Term, y: Term) -> Term {
    Term::app2(Term::constant(Comb::Pair, vec![a.clone(), b.clone()]), x, y)
}

pub fn term_free_vars(t: &Term) -> BTreeMap<String, FiniteType> {
    let mut out = BTreeMap::new();
    collect_term_vars(t, &mut out);
    out
}

fn collect_term_vars(t: &Term, out: &mut BTreeMap<String, FiniteType>) {
    match t {
        Term::Var { name, ty } => {
            out.insert(name.clone(), ty.clone());
        }
        Term::Const { .. } => {}
        Term::App(f, a) => {
            collect_term_vars(f, out);
            collect_term_vars(a, out);
        }
    }
}

pub fn formula_free_vars(f: &Formula) -> BTreeMap<String, FiniteType> {
    let mut out = BTreeMap::new();
    collect_formula_vars(f, &mut out);
    out
}

fn collect_formula_vars(f: &Formula, out: &mut BTreeMap<String, FiniteType>) {
    match f {
        Formula::PrimEq(_, s, t) | Formula::ExtEq(_, s, t) => {
            collect_term_vars(s, out);
            collect_term_vars(t, out);
        }
        Formula::Ext(_, t) => collect_term_vars(t, out),
        Formula::Falsum => {}
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
            collect_formula_vars(a, out);
            collect_formula_vars(b, out);
        }
        Formula::Forall(x, _, body) | Formula::Exists(x, _, body) => {
            let mut inner = BTreeMap::new();
            collect_formula_vars(body, &mut inner);
            inner.remove(x);
            out.append(&mut inner);
        }
    }
}

// ---------------------------------------------------------------------------
// Pretty-printing
// ---------------------------------------------------------------------------

impl fmt::Display for FiniteType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_type(self, f, 1)
    }
}

// Precedence: arrow 1, product 2, atom 3. Both binary forms associate to
// the right.
fn fmt_type(t: &FiniteType, f: &mut fmt::Formatter<'_>, prec: u8) -> fmt::Result {
    let my = match t {
        FiniteType::Nat => 3,
        FiniteType::Prod(..) => 2,
        FiniteType::Arrow(..) => 1,
    };
    if my < prec {
        write!(f, "(")?;
    }
    match t {
        FiniteType::Nat => write!(f, "N")?,
        FiniteType::Prod(a, b) => {
            fmt_type(a, f, 3)?;
            write!(f, " * ")?;
            fmt_type(b, f, 2)?;
        }
        FiniteType::Arrow(a, b) => {
            fmt_type(a, f, 2)?;
            write!(f, " -> ")?;
            fmt_type(b, f, 1)?;
        }
    }
    if my < prec {
        write!(f, ")")?;
    }
    Ok(())
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_term(self, f)
    }
}

fn fmt_term(t: &Term, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if let Some(n) = t.as_numeral() {
        return write!(f, "{n}");
    }
    let (head, args) = t.spine();
    fmt_head(head, args.len(), f)?;
    for a in args {
        write!(f, " ")?;
        fmt_term_atom(a, f)?;
    }
    Ok(())
}

fn fmt_term_atom(t: &Term, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if t.as_numeral().is_some() {
        return fmt_term(t, f);
    }
    match t {
        Term::App(..) => {
            write!(f, "(")?;
            fmt_term(t, f)?;
            write!(f, ")")
        }
        _ => fmt_term(t, f),
    }
}

// Type parameters are printed exactly when the parser could not re-infer
// them from the argument types of the spine.
fn fmt_head(head: &Term, nargs: usize, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match head {
        Term::Var { name, .. } => write!(f, "{name}"),
        Term::Const { kind, params } => {
            write!(f, "{}", kind.token())?;
            if nargs < kind.args_for_inference() && !params.is_empty() {
                write!(f, "[")?;
                for (i, p) in params.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{p}")?;
                }
                write!(f, "]")?;
            }
            Ok(())
        }
        Term::App(..) => unreachable!("spine head is never an application"),
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_formula(self, f, 0)
    }
}

// Precedence: quantifiers 0, -> 1, | 2, & 3, atoms 4. The binary
// connectives associate to the right; quantifier bodies extend as far
// right as possible, so quantifiers are parenthesized under connectives.
fn fmt_formula(phi: &Formula, f: &mut fmt::Formatter<'_>, prec: u8) -> fmt::Result {
    let my = match phi {
        Formula::Forall(..) | Formula::Exists(..) => 0,
        Formula::Imp(..) => 1,
        Formula::Or(..) => 2,
        Formula::And(..) => 3,
        _ => 4,
    };
    if my < prec {
        write!(f, "(")?;
    }
    match phi {
        Formula::PrimEq(_, s, t) => write!(f, "{s} == {t}")?,
        Formula::ExtEq(_, s, t) => write!(f, "{s} = {t}")?,
        Formula::Ext(_, t) => write!(f, "ext({t})")?,
        Formula::Falsum => write!(f, "false")?,
        Formula::And(a, b) => {
            fmt_formula(a, f, 4)?;
            write!(f, " & ")?;
            fmt_formula(b, f, 3)?;
        }
        Formula::Or(a, b) => {
            fmt_formula(a, f, 3)?;
            write!(f, " | ")?;
            fmt_formula(b, f, 2)?;
        }
        Formula::Imp(a, b) => {
            fmt_formula(a, f, 2)?;
            write!(f, " -> ")?;
            fmt_formula(b, f, 1)?;
        }
        Formula::Forall(x, ty, body) => {
            write!(f, "forall {x}:{ty}. ")?;
            fmt_formula(body, f, 0)?;
        }
        Formula::Exists(x, ty, body) => {
            write!(f, "exists {x}:{ty}. ")?;
            fmt_formula(body, f, 0)?;
        }
    }
    if my < prec {
        write!(f, ")")?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("syntax error at line {line}, column {col}: {msg}")]
    Syntax { msg: String, line: usize, col: usize },
    #[error(transparent)]
    Type(#[from] TypeError),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Num(u64),
    LParen,
    RParen,
    LBrack,
    RBrack,
    Comma,
    Colon,
    Dot,
    Star,
    Arrow,
    Lambda,
    EqEq,
    Eq,
    Amp,
    Pipe,
}

#[derive(Debug, Clone)]
struct SpannedTok {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(src: &str) -> Result<Vec<SpannedTok>, ParseError> {
    let mut toks = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut chars = src.chars().peekable();
    macro_rules! err {
        ($($arg:tt)*) => {
            return Err(ParseError::Syntax { msg: format!($($arg)*), line, col })
        };
    }
    while let Some(&c) = chars.peek() {
        let (tline, tcol) = (line, col);
        let mut push = |tok: Tok| toks.push(SpannedTok { tok, line: tline, col: tcol });
        match c {
            '\n' => {
                chars.next();
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                chars.next();
                col += 1;
            }
            '-' => {
                chars.next();
                col += 1;
                match chars.peek() {
                    Some('>') => {
                        chars.next();
                        col += 1;
                        push(Tok::Arrow);
                    }
                    Some('-') => {
                        // line comment
                        for c in chars.by_ref() {
                            if c == '\n' {
                                line += 1;
                                col = 1;
                                break;
                            }
                        }
                    }
                    _ => err!("expected '->' or '--' after '-'"),
                }
            }
            '=' => {
                chars.next();
                col += 1;
                if chars.peek() == Some(&'=') {
                    chars.next();
                    col += 1;
                    push(Tok::EqEq);
                } else {
                    push(Tok::Eq);
                }
            }
            '(' => {
                chars.next();
                col += 1;
                push(Tok::LParen);
            }
            ')' => {
                chars.next();
                col += 1;
                push(Tok::RParen);
            }
            '[' => {
                chars.next();
                col += 1;
                push(Tok::LBrack);
            }
            ']' => {
                chars.next();
                col += 1;
                push(Tok::RBrack);
            }
            ',' => {
                chars.next();
                col += 1;
                push(Tok::Comma);
            }
            ':' => {
                chars.next();
                col += 1;
                push(Tok::Colon);
            }
            '.' => {
                chars.next();
                col += 1;
                push(Tok::Dot);
            }
            '*' => {
                chars.next();
                col += 1;
                push(Tok::Star);
            }
            '\\' => {
                chars.next();
                col += 1;
                push(Tok::Lambda);
            }
            '&' => {
                chars.next();
                col += 1;
                push(Tok::Amp);
            }
            '|' => {
                chars.next();
                col += 1;
                push(Tok::Pipe);
            }
            c if c.is_ascii_digit() => {
                let mut n: u64 = 0;
                while let Some(&d) = chars.peek() {
                    if let Some(v) = d.to_digit(10) {
                        n = n
                            .checked_mul(10)
                            .and_then(|n| n.checked_add(v as u64))
                            .ok_or(ParseError::Syntax {
                                msg: "numeral too large".into(),
                                line,
                                col,
                            })?;
                        chars.next();
                        col += 1;
                    } else {
                        break;
                    }
                }
                push(Tok::Num(n));
            }
            c if c.is_ascii_alphabetic() => {
                let mut s = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_alphanumeric() || d == '_' {
                        s.push(d);
                        chars.next();
                        col += 1;
                    } else {
                        break;
                    }
                }
                push(Tok::Ident(s));
            }
            c => err!("unexpected character {c:?}"),
        }
    }
    Ok(toks)
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

const RESERVED: &[&str] = &[
    "N", "K", "S", "PAIR", "FST", "SND", "SUC", "REC", "ext", "false", "forall", "exists",
    "forallE", "existsE",
];

fn comb_of_ident(s: &str) -> Option<Comb> {
    match s {
        "K" => Some(Comb::K),
        "S" => Some(Comb::S),
        "PAIR" => Some(Comb::Pair),
        "FST" => Some(Comb::Fst),
        "SND" => Some(Comb::Snd),
        "SUC" => Some(Comb::Suc),
        "REC" => Some(Comb::Rec),
        _ => None,
    }
}

/// Parse trees before type elaboration.
#[derive(Debug, Clone)]
enum PTerm {
    Var(String, Option<FiniteType>),
    Num(u64),
    Const(Comb, Option<Vec<FiniteType>>),
    App(Box<PTerm>, Box<PTerm>),
    Lam(String, FiniteType, Box<PTerm>),
}

struct Parser {
    toks: Vec<SpannedTok>,
    pos: usize,
}

impl Parser {
    fn new(src: &str) -> Result<Parser, ParseError> {
        Ok(Parser { toks: lex(src)?, pos: 0 })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.tok.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos.min(self.toks.len().saturating_sub(1)))
            .map(|t| (t.line, t.col))
            .unwrap_or((1, 1))
    }

    fn error<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        let (line, col) = self.here();
        Err(ParseError::Syntax { msg: msg.into(), line, col })
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &Tok, what: &str) -> Result<(), ParseError> {
        if self.eat(tok) {
            Ok(())
        } else {
            self.error(format!("expected {what}"))
        }
    }

    fn expect_eof(&self) -> Result<(), ParseError> {
        if self.pos == self.toks.len() {
            Ok(())
        } else {
            self.error("unexpected trailing input")
        }
    }

    // Types. `*` binds tighter than `->`; both right-associative.
    fn parse_type(&mut self) -> Result<FiniteType, ParseError> {
        let lhs = self.parse_type_prod()?;
        if self.eat(&Tok::Arrow) {
            let rhs = self.parse_type()?;
            Ok(FiniteType::arrow(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn parse_type_prod(&mut self) -> Result<FiniteType, ParseError> {
        let lhs = self.parse_type_atom()?;
        if self.eat(&Tok::Star) {
            let rhs = self.parse_type_prod()?;
            Ok(FiniteType::prod(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn parse_type_atom(&mut self) -> Result<FiniteType, ParseError> {
        match self.next() {
            Some(Tok::Ident(s)) if s == "N" => Ok(FiniteType::Nat),
            Some(Tok::LParen) => {
                let t = self.parse_type()?;
                self.expect(&Tok::RParen, "')'")?;
                Ok(t)
            }
            _ => {
                self.pos = self.pos.saturating_sub(1);
                self.error("expected a type")
            }
        }
    }

    // Terms (parse trees; elaboration happens separately).
    fn parse_pterm(&mut self) -> Result<PTerm, ParseError> {
        let mut t = self.parse_pterm_atom()?;
        while self.starts_term_atom() {
            let arg = self.parse_pterm_atom()?;
            t = PTerm::App(Box::new(t), Box::new(arg));
        }
        Ok(t)
    }

    fn starts_term_atom(&self) -> bool {
        matches!(
            self.peek(),
            Some(Tok::Ident(s)) if !matches!(s.as_str(), "N" | "ext" | "false" | "forall" | "exists" | "forallE" | "existsE")
        ) || matches!(self.peek(), Some(Tok::Num(_) | Tok::LParen | Tok::Lambda))
    }

    fn parse_pterm_atom(&mut self) -> Result<PTerm, ParseError> {
        match self.next() {
            Some(Tok::Num(n)) => Ok(PTerm::Num(n)),
            Some(Tok::Ident(s)) => {
                if let Some(kind) = comb_of_ident(&s) {
                    let params = if self.eat(&Tok::LBrack) {
                        let mut ps = vec![self.parse_type()?];
                        while self.eat(&Tok::Comma) {
                            ps.push(self.parse_type()?);
                        }
                        self.expect(&Tok::RBrack, "']'")?;
                        Some(ps)
                    } else {
                        None
                    };
                    Ok(PTerm::Const(kind, params))
                } else if RESERVED.contains(&s.as_str()) {
                    self.pos -= 1;
                    self.error(format!("'{s}' is reserved"))
                } else {
                    Ok(PTerm::Var(s, None))
                }
            }
            Some(Tok::LParen) => {
                let t = self.parse_pterm()?;
                // optional ascription on a parenthesized variable
                let t = if self.eat(&Tok::Colon) {
                    match t {
                        PTerm::Var(name, None) => PTerm::Var(name, Some(self.parse_type()?)),
                        _ => return self.error("only a variable can carry a type ascription"),
                    }
                } else {
                    t
                };
                self.expect(&Tok::RParen, "')'")?;
                Ok(t)
            }
            Some(Tok::Lambda) => {
                let name = match self.next() {
                    Some(Tok::Ident(s)) if !RESERVED.contains(&s.as_str()) => s,
                    _ => return self.error("expected a variable after '\\'"),
                };
                self.expect(&Tok::Colon, "':' after lambda variable")?;
                let ty = self.parse_type()?;
                self.expect(&Tok::Dot, "'.' after lambda type")?;
                let body = self.parse_pterm()?;
                Ok(PTerm::Lam(name, ty, Box::new(body)))
            }
            _ => {
                self.pos = self.pos.saturating_sub(1);
                self.error("expected a term")
            }
        }
    }

    // Formulas. `&` > `|` > `->`, all right-associative.
    fn parse_formula(&mut self, ctx: &Context) -> Result<Formula, ParseError> {
        let lhs = self.parse_formula_or(ctx)?;
        if self.eat(&Tok::Arrow) {
            let rhs = self.parse_formula(ctx)?;
            Ok(Formula::imp(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn parse_formula_or(&mut self, ctx: &Context) -> Result<Formula, ParseError> {
        let lhs = self.parse_formula_and(ctx)?;
        if self.eat(&Tok::Pipe) {
            let rhs = self.parse_formula_or(ctx)?;
            Ok(Formula::or(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn parse_formula_and(&mut self, ctx: &Context) -> Result<Formula, ParseError> {
        let lhs = self.parse_formula_atom(ctx)?;
        if self.eat(&Tok::Amp) {
            let rhs = self.parse_formula_and(ctx)?;
            Ok(Formula::and(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn parse_formula_atom(&mut self, ctx: &Context) -> Result<Formula, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Ident(s)) if s == "false" => {
                self.next();
                Ok(Formula::Falsum)
            }
            Some(Tok::Ident(s)) if s == "ext" => {
                self.next();
                self.expect(&Tok::LParen, "'(' after ext")?;
                let pt = self.parse_pterm()?;
                let pt = if self.eat(&Tok::Colon) {
                    match pt {
                        PTerm::Var(name, None) => PTerm::Var(name, Some(self.parse_type()?)),
                        _ => return self.error("only a variable can carry a type ascription"),
                    }
                } else {
                    pt
                };
                self.expect(&Tok::RParen, "')'")?;
                let (t, ty) = elaborate_with_ascriptions(&pt, ctx)?;
                Ok(Formula::Ext(ty, t))
            }
            Some(Tok::Ident(s))
                if matches!(s.as_str(), "forall" | "exists" | "forallE" | "existsE") =>
            {
                self.next();
                let name = match self.next() {
                    Some(Tok::Ident(v)) if !RESERVED.contains(&v.as_str()) => v,
                    _ => return self.error("expected a variable after quantifier"),
                };
                self.expect(&Tok::Colon, "':' after quantified variable")?;
                let ty = self.parse_type()?;
                self.expect(&Tok::Dot, "'.' after quantifier type")?;
                let body = self.parse_formula(&ctx.with(&name, ty.clone()))?;
                Ok(match s.as_str() {
                    "forall" => Formula::forall(name, ty, body),
                    "exists" => Formula::exists(name, ty, body),
                    // relativized sugar
                    "forallE" => {
                        let guard = Formula::Ext(ty.clone(), Term::var(&name, ty.clone()));
                        Formula::forall(name, ty, Formula::imp(guard, body))
                    }
                    _ => {
                        let guard = Formula::Ext(ty.clone(), Term::var(&name, ty.clone()));
                        Formula::exists(name, ty, Formula::and(guard, body))
                    }
                })
            }
            Some(Tok::LParen) => {
                // Either a parenthesized formula or the left term of a
                // relational atom; try the formula reading first.
                let save = self.pos;
                self.next();
                if let Ok(inner) = self.parse_formula(ctx) {
                    if self.eat(&Tok::RParen) {
                        return Ok(inner);
                    }
                }
                self.pos = save;
                self.parse_relational_atom(ctx)
            }
            _ => self.parse_relational_atom(ctx),
        }
    }

    fn parse_relational_atom(&mut self, ctx: &Context) -> Result<Formula, ParseError> {
        let lhs = self.parse_pterm()?;
        let prim = match self.next() {
            Some(Tok::EqEq) => true,
            Some(Tok::Eq) => false,
            _ => {
                self.pos = self.pos.saturating_sub(1);
                return self.error("expected '==' or '=' in formula atom");
            }
        };
        let rhs = self.parse_pterm()?;
        let combined = PTerm::App(Box::new(lhs.clone()), Box::new(rhs.clone()));
        let ctx = collect_ascriptions(&combined, ctx)?;
        let (lt, lty) = elaborate(&lhs, &ctx)?;
        let (rt, rty) = elaborate(&rhs, &ctx)?;
        if lty != rty {
            return Err(TypeError::Mismatch {
                expected: lty,
                found: rty,
                what: "equality atom".into(),
            }
            .into());
        }
        Ok(if prim {
            Formula::PrimEq(lty, lt, rt)
        } else {
            Formula::ExtEq(lty, lt, rt)
        })
    }
}

// ---------------------------------------------------------------------------
// Elaboration: fill in combinator type parameters, check applications,
// compile lambdas away.
// ---------------------------------------------------------------------------

/// Pre-pass: register `x:T` ascriptions for otherwise-unbound variables.
fn collect_ascriptions(pt: &PTerm, ctx: &Context) -> Result<Context, ParseError> {
    fn walk(pt: &PTerm, ctx: &mut Context) -> Result<(), TypeError> {
        match pt {
            PTerm::Var(name, Some(ty)) => {
                if let Some(prev) = ctx.get(name) {
                    if prev != ty {
                        return Err(TypeError::Mismatch {
                            expected: prev.clone(),
                            found: ty.clone(),
                            what: format!("ascription of variable {name}"),
                        });
                    }
                } else {
                    ctx.bind(name, ty.clone());
                }
                Ok(())
            }
            PTerm::Var(..) | PTerm::Num(_) | PTerm::Const(..) => Ok(()),
            PTerm::App(f, a) => {
                walk(f, ctx)?;
                walk(a, ctx)
            }
            PTerm::Lam(_, _, body) => walk(body, ctx),
        }
    }
    let mut ctx = ctx.clone();
    walk(pt, &mut ctx)?;
    Ok(ctx)
}

fn elaborate_with_ascriptions(pt: &PTerm, ctx: &Context) -> Result<(Term, FiniteType), ParseError> {
    let ctx = collect_ascriptions(pt, ctx)?;
    elaborate(pt, &ctx)
}

fn elaborate(pt: &PTerm, ctx: &Context) -> Result<(Term, FiniteType), ParseError> {
    match pt {
        PTerm::Num(n) => Ok((Term::numeral(*n), FiniteType::Nat)),
        PTerm::Var(name, asc) => {
            let ty = match ctx.get(name) {
                Some(ty) => ty.clone(),
                None => return Err(TypeError::Unbound(name.clone()).into()),
            };
            if let Some(asc) = asc {
                if *asc != ty {
                    return Err(TypeError::Mismatch {
                        expected: ty,
                        found: asc.clone(),
                        what: format!("ascription of variable {name}"),
                    }
                    .into());
                }
            }
            Ok((Term::var(name, ty.clone()), ty))
        }
        PTerm::Const(kind, params) => {
            let params = match params {
                Some(ps) => ps.clone(),
                None => {
                    if kind.param_arity() == 0 {
                        vec![]
                    } else {
                        return Err(TypeError::AmbiguousParams(*kind).into());
                    }
                }
            };
            let ty = typing::combinator_type(*kind, &params)?;
            Ok((Term::constant(*kind, params), ty))
        }
        PTerm::Lam(name, ty, body) => {
            let inner = ctx.with(name, ty.clone());
            let (b, _) = elaborate(body, &inner)?;
            let t = typing::lambda_abstract(name, ty.clone(), &b)?;
            let tty = typing::infer_type(&t)?;
            Ok((t, tty))
        }
        PTerm::App(..) => {
            // Work on the whole spine so an un-annotated combinator head can
            // read its parameters off the argument types.
            let mut spine = Vec::new();
            let mut cur = pt;
            while let PTerm::App(f, a) = cur {
                spine.push(a.as_ref());
                cur = f;
            }
            spine.reverse();
            let args: Vec<(Term, FiniteType)> = spine
                .iter()
                .map(|a| elaborate(a, ctx))
                .collect::<Result<_, _>>()?;
            let (mut head, mut hty) = match cur {
                PTerm::Const(kind, None) if kind.param_arity() > 0 => {
                    let params = infer_const_params(*kind, &args)?;
                    let ty = typing::combinator_type(*kind, &params)?;
                    (Term::constant(*kind, params), ty)
                }
                other => elaborate(other, ctx)?,
            };
            for (a, aty) in args {
                match hty {
                    FiniteType::Arrow(dom, cod) => {
                        if *dom != aty {
                            return Err(TypeError::Mismatch {
                                expected: dom.as_ref().clone(),
                                found: aty,
                                what: format!("argument {a}"),
                            }
                            .into());
                        }
                        head = Term::app(head, a);
                        hty = cod.as_ref().clone();
                    }
                    other => {
                        return Err(TypeError::NotAFunction(other).into());
                    }
                }
            }
            Ok((head, hty))
        }
    }
}

fn infer_const_params(
    kind: Comb,
    args: &[(Term, FiniteType)],
) -> Result<Vec<FiniteType>, ParseError> {
    let need = kind.args_for_inference();
    if args.len() < need {
        return Err(TypeError::AmbiguousParams(kind).into());
    }
    let ty = |i: usize| args[i].1.clone();
    let params = match kind {
        Comb::K | Comb::Pair => vec![ty(0), ty(1)],
        Comb::S => match ty(0) {
            FiniteType::Arrow(r, st) => match st.as_ref() {
                FiniteType::Arrow(s, t) => {
                    vec![r.as_ref().clone(), s.as_ref().clone(), t.as_ref().clone()]
                }
                _ => return Err(TypeError::AmbiguousParams(kind).into()),
            },
            _ => return Err(TypeError::AmbiguousParams(kind).into()),
        },
        Comb::Fst | Comb::Snd => match ty(0) {
            FiniteType::Prod(a, b) => vec![a.as_ref().clone(), b.as_ref().clone()],
            _ => return Err(TypeError::AmbiguousParams(kind).into()),
        },
        Comb::Rec => vec![ty(0)],
        Comb::Zero | Comb::Suc => vec![],
    };
    Ok(params)
}

// ---------------------------------------------------------------------------
// Public entry points
// ---------------------------------------------------------------------------

pub fn parse_type(text: &str) -> Result<FiniteType, ParseError> {
    let mut p = Parser::new(text)?;
    let t = p.parse_type()?;
    p.expect_eof()?;
    Ok(t)
}

pub fn parse_term(text: &str, ctx: &Context) -> Result<Term, ParseError> {
    let mut p = Parser::new(text)?;
    let pt = p.parse_pterm()?;
    p.expect_eof()?;
    let (t, _) = elaborate_with_ascriptions(&pt, ctx)?;
    Ok(t)
}

pub fn parse_formula(text: &str, ctx: &Context) -> Result<Formula, ParseError> {
    let mut p = Parser::new(text)?;
    let f = p.parse_formula(ctx)?;
    p.expect_eof()?;
    Ok(f)
}
