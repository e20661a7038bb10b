//! Recursive-descent parser producing unresolved syntax trees.
//!
//! Literal sugar is expanded here: numerals to `s`/`z`, strings and
//! brackets to `cons`/`nil`, tuples to `(,..)`, `|` to `alt` and `++` to
//! `concat`.

use super::lexer::{Tok, Token};
use super::{Diagnostic, Loc};
use crate::term::tuple_name;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Raw {
    Var(String, Loc),
    App {
        name: String,
        rt_mark: bool,
        args: Vec<Raw>,
        loc: Loc,
    },
    Rt(Box<Raw>, Loc),
    Rrt(Box<Raw>, Loc),
}

impl Raw {
    pub(crate) fn loc(&self) -> Loc {
        match self {
            Raw::Var(_, loc) | Raw::App { loc, .. } | Raw::Rt(_, loc) | Raw::Rrt(_, loc) => *loc,
        }
    }

    fn ctor(name: &str, args: Vec<Raw>, loc: Loc) -> Raw {
        Raw::App {
            name: name.to_string(),
            rt_mark: false,
            args,
            loc,
        }
    }
}

pub(crate) fn char_name(c: char) -> String {
    match c {
        '\'' => "'\\''".to_string(),
        '\\' => "'\\\\'".to_string(),
        '\n' => "'\\n'".to_string(),
        '\t' => "'\\t'".to_string(),
        c => format!("'{c}'"),
    }
}

#[derive(Debug)]
pub(crate) struct RawRule {
    pub lhs: Raw,
    pub rhs: Raw,
    pub loc: Loc,
}

pub(crate) struct Parser<'t> {
    tokens: &'t [Token],
    pos: usize,
    origin: &'t str,
}

type PResult<T> = Result<T, Diagnostic>;

impl<'t> Parser<'t> {
    pub(crate) fn new(tokens: &'t [Token], origin: &'t str) -> Self {
        Parser { tokens, pos: 0, origin }
    }

    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn loc(&self) -> Loc {
        self.tokens[self.pos].loc
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: String) -> Diagnostic {
        let loc = self.loc();
        Diagnostic {
            origin: self.origin.into(),
            line: loc.line,
            col: loc.col,
            message,
        }
    }

    fn expect(&mut self, tok: Tok) -> PResult<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(format!("expected {}, found {}", tok.describe(), self.peek().describe())))
        }
    }

    /// Parses a whole program, collecting one diagnostic per bad line.
    pub(crate) fn program(&mut self) -> (Vec<RawRule>, Vec<Diagnostic>) {
        let mut rules = Vec::new();
        let mut diags = Vec::new();
        loop {
            while *self.peek() == Tok::Newline {
                self.bump();
            }
            if *self.peek() == Tok::Eof {
                break;
            }
            match self.rule() {
                Ok(rule) => rules.push(rule),
                Err(d) => {
                    diags.push(d);
                    while !matches!(self.peek(), Tok::Newline | Tok::Eof) {
                        self.bump();
                    }
                }
            }
        }
        (rules, diags)
    }

    fn rule(&mut self) -> PResult<RawRule> {
        let loc = self.loc();
        let lhs = self.expr()?;
        self.expect(Tok::Arrow)?;
        let rhs = self.expr()?;
        if *self.peek() == Tok::Dot {
            self.bump();
        }
        match self.peek() {
            Tok::Newline | Tok::Eof => Ok(RawRule { lhs, rhs, loc }),
            other => Err(self.error(format!("expected end of rule, found {}", other.describe()))),
        }
    }

    /// A complete goal expression followed by end of input.
    pub(crate) fn goal(&mut self) -> PResult<Raw> {
        while *self.peek() == Tok::Newline {
            self.bump();
        }
        let e = self.expr()?;
        if *self.peek() == Tok::Dot {
            self.bump();
        }
        while *self.peek() == Tok::Newline {
            self.bump();
        }
        match self.peek() {
            Tok::Eof => Ok(e),
            other => Err(self.error(format!("unexpected {} after expression", other.describe()))),
        }
    }

    fn expr(&mut self) -> PResult<Raw> {
        let left = self.concat()?;
        if *self.peek() == Tok::Bar {
            let loc = self.loc();
            self.bump();
            let right = self.expr()?;
            return Ok(Raw::ctor("alt", vec![left, right], loc));
        }
        Ok(left)
    }

    fn concat(&mut self) -> PResult<Raw> {
        let left = self.atom()?;
        if *self.peek() == Tok::Concat {
            let loc = self.loc();
            self.bump();
            let right = self.concat()?;
            return Ok(Raw::ctor("concat", vec![left, right], loc));
        }
        Ok(left)
    }

    fn atom(&mut self) -> PResult<Raw> {
        let Token { tok, loc } = self.bump();
        match tok {
            Tok::Var(name) => Ok(Raw::Var(name, loc)),
            Tok::Num(n) => Ok((0..n).fold(Raw::ctor("z", vec![], loc), |acc, _| {
                Raw::ctor("s", vec![acc], loc)
            })),
            Tok::Str(s) => Ok(s.chars().rev().fold(Raw::ctor("nil", vec![], loc), |tail, c| {
                Raw::ctor("cons", vec![Raw::ctor(&char_name(c), vec![], loc), tail], loc)
            })),
            Tok::Char(c) => Ok(Raw::ctor(&char_name(c), vec![], loc)),
            Tok::Ident(name) => {
                let mut rt_mark = false;
                if *self.peek() == Tok::Caret {
                    self.bump();
                    match self.bump().tok {
                        Tok::Ident(ref s) if s == "rt" => rt_mark = true,
                        other => {
                            return Err(self.error(format!(
                                "expected `rt` after `^`, found {}",
                                other.describe()
                            )))
                        }
                    }
                }
                let args = if *self.peek() == Tok::LParen {
                    self.bump();
                    self.args(Tok::RParen)?
                } else {
                    Vec::new()
                };
                match name.as_str() {
                    "rt" | "rrt" if rt_mark => Err(self.error(format!("`{name}` cannot carry `^rt`"))),
                    "rt" | "rrt" if args.len() != 1 => {
                        Err(self.error(format!("`{name}` takes exactly one argument")))
                    }
                    "rt" => Ok(Raw::Rt(Box::new(args.into_iter().next().unwrap()), loc)),
                    "rrt" => Ok(Raw::Rrt(Box::new(args.into_iter().next().unwrap()), loc)),
                    _ => Ok(Raw::App { name, rt_mark, args, loc }),
                }
            }
            Tok::LParen => {
                let mut items = self.args(Tok::RParen)?;
                match items.len() {
                    1 => Ok(items.pop().unwrap()),
                    0 => Ok(Raw::ctor("()", vec![], loc)),
                    n => Ok(Raw::ctor(&tuple_name(n), items, loc)),
                }
            }
            Tok::LBracket => self.list(loc),
            other => Err(Diagnostic {
                origin: self.origin.into(),
                line: loc.line,
                col: loc.col,
                message: format!("expected an expression, found {}", other.describe()),
            }),
        }
    }

    /// Comma-separated expressions up to `close`; the opening token is consumed.
    fn args(&mut self, close: Tok) -> PResult<Vec<Raw>> {
        let mut items = Vec::new();
        if *self.peek() == close {
            self.bump();
            return Ok(items);
        }
        loop {
            items.push(self.expr()?);
            match self.peek() {
                Tok::Comma => {
                    self.bump();
                }
                t if *t == close => {
                    self.bump();
                    return Ok(items);
                }
                other => {
                    return Err(self.error(format!(
                        "expected `,` or {}, found {}",
                        close.describe(),
                        other.describe()
                    )))
                }
            }
        }
    }

    fn list(&mut self, loc: Loc) -> PResult<Raw> {
        let mut items = Vec::new();
        let mut tail = Raw::ctor("nil", vec![], loc);
        if *self.peek() != Tok::RBracket {
            loop {
                items.push(self.concat()?);
                match self.peek() {
                    Tok::Comma => {
                        self.bump();
                    }
                    Tok::Bar => {
                        self.bump();
                        tail = self.concat()?;
                        break;
                    }
                    _ => break,
                }
            }
        }
        self.expect(Tok::RBracket)?;
        Ok(items
            .into_iter()
            .rev()
            .fold(tail, |tail, head| Raw::ctor("cons", vec![head, tail], loc)))
    }
}
