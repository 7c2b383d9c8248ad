//! Recursive-descent parser producing an unresolved syntax tree.

use crate::model::Pos;

use super::lexer::{Tok, Token};
use super::Diagnostic;

#[derive(Clone, Debug)]
pub(crate) struct Name {
    pub text: String,
    pub pos: Pos,
}

#[derive(Clone, Debug)]
pub(crate) struct RawConst {
    pub name: Name,
    pub loc: Name,
}

#[derive(Clone, Debug)]
pub(crate) enum RawValue {
    Num(f64, Pos),
    Param(Name),
}

#[derive(Clone, Debug)]
pub(crate) enum RawRange {
    All,
    Names(Vec<Name>),
}

#[derive(Clone, Debug)]
pub(crate) enum RawPrefix {
    UnicastOut(Name, RawValue, RawRange),
    UnicastIn(Name, RawValue, RawValue),
    BroadcastOut(Name, RawValue, RawRange),
    BroadcastIn(Name, RawValue, RawValue),
    Spontaneous(Name, RawValue),
}

#[derive(Clone, Debug)]
pub(crate) enum RawTerm {
    Prefix(RawPrefix, RawConst),
    Choice(Box<RawTerm>, Box<RawTerm>),
    Const(RawConst),
}

#[derive(Clone, Debug)]
pub(crate) enum Stmt {
    Param { name: Name, value: f64 },
    Location { name: Name, x: f64, y: f64 },
    System { name: Name, components: Vec<RawTerm> },
    Equation { head: RawConst, body: Box<RawTerm> },
}

struct Parser<'d> {
    toks: Vec<Token>,
    i: usize,
    diags: &'d mut Vec<Diagnostic>,
}

type PResult<T> = Result<T, ()>;

pub(crate) fn parse(toks: Vec<Token>, diags: &mut Vec<Diagnostic>) -> Vec<Stmt> {
    let mut p = Parser { toks, i: 0, diags };
    let mut out = Vec::new();
    while p.peek() != &Tok::Eof {
        match p.statement() {
            Ok(s) => out.push(s),
            Err(()) => p.recover(),
        }
    }
    out
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.i].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let j = (self.i + k).min(self.toks.len() - 1);
        &self.toks[j].tok
    }

    fn pos(&self) -> Pos {
        self.toks[self.i].pos
    }

    fn advance(&mut self) -> Token {
        let t = self.toks[self.i].clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn fail<T>(&mut self, expected: &str) -> PResult<T> {
        let found = self.peek().describe();
        let pos = self.pos();
        self.diags
            .push(Diagnostic::error(format!("expected {expected}, found {found}"), pos));
        Err(())
    }

    fn expect(&mut self, tok: Tok) -> PResult<Pos> {
        if *self.peek() == tok {
            Ok(self.advance().pos)
        } else {
            self.fail(&tok.describe())
        }
    }

    fn ident(&mut self, what: &str) -> PResult<Name> {
        if let Tok::Ident(s) = self.peek() {
            let text = s.clone();
            let pos = self.advance().pos;
            Ok(Name { text, pos })
        } else {
            self.fail(what)
        }
    }

    fn keyword(&mut self, kw: &str) -> PResult<Pos> {
        match self.peek() {
            Tok::Ident(s) if s == kw => Ok(self.advance().pos),
            _ => self.fail(&format!("`{kw}`")),
        }
    }

    fn number(&mut self) -> PResult<f64> {
        if let Tok::Number(v) = self.peek() {
            let v = *v;
            self.advance();
            Ok(v)
        } else {
            self.fail("a number")
        }
    }

    /// Skips to just past the next `;`.
    fn recover(&mut self) {
        loop {
            match self.peek() {
                Tok::Eof => return,
                Tok::Semi => {
                    self.advance();
                    return;
                }
                _ => {
                    self.advance();
                }
            }
        }
    }

    fn statement(&mut self) -> PResult<Stmt> {
        let kw = match (self.peek(), self.peek_at(1)) {
            (Tok::Ident(s), Tok::Ident(_)) => Some(s.clone()),
            _ => None,
        };
        let stmt = match kw.as_deref() {
            Some("param") => {
                self.advance();
                let name = self.ident("a parameter name")?;
                self.expect(Tok::Equals)?;
                let value = self.number()?;
                Stmt::Param { name, value }
            }
            Some("location") => {
                self.advance();
                let name = self.ident("a location name")?;
                self.expect(Tok::Equals)?;
                self.expect(Tok::LParen)?;
                let x = self.number()?;
                self.expect(Tok::Comma)?;
                let y = self.number()?;
                self.expect(Tok::RParen)?;
                Stmt::Location { name, x, y }
            }
            Some("system") => {
                self.advance();
                let name = self.ident("a system name")?;
                self.expect(Tok::Define)?;
                let mut components = vec![self.choice()?];
                while *self.peek() == Tok::Par {
                    self.advance();
                    components.push(self.choice()?);
                }
                Stmt::System { name, components }
            }
            Some(other) => {
                let pos = self.pos();
                self.diags.push(Diagnostic::error(
                    format!("unknown statement keyword `{other}`"),
                    pos,
                ));
                return Err(());
            }
            None => {
                if !matches!(self.peek(), Tok::Ident(_)) {
                    return self.fail("a declaration");
                }
                let head = self.constant()?;
                self.expect(Tok::Define)?;
                let body = self.choice()?;
                Stmt::Equation { head, body: Box::new(body) }
            }
        };
        self.expect(Tok::Semi)?;
        Ok(stmt)
    }

    fn constant(&mut self) -> PResult<RawConst> {
        let name = self.ident("a constant name")?;
        self.expect(Tok::LParen)?;
        let loc = self.ident("a location name")?;
        self.expect(Tok::RParen)?;
        Ok(RawConst { name, loc })
    }

    fn choice(&mut self) -> PResult<RawTerm> {
        let mut left = self.atom()?;
        while *self.peek() == Tok::Plus {
            self.advance();
            let right = self.atom()?;
            left = RawTerm::Choice(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn atom(&mut self) -> PResult<RawTerm> {
        match self.peek() {
            Tok::BangBang | Tok::QuestQuest | Tok::Bang | Tok::Quest => self.prefixed(),
            Tok::LParen => {
                // `(label, rate)` is a spontaneous prefix; anything else is grouping.
                if matches!(self.peek_at(1), Tok::Ident(_)) && *self.peek_at(2) == Tok::Comma {
                    self.prefixed()
                } else {
                    self.advance();
                    let inner = self.choice()?;
                    self.expect(Tok::RParen)?;
                    Ok(inner)
                }
            }
            Tok::Ident(_) => Ok(RawTerm::Const(self.constant()?)),
            _ => self.fail("an action prefix or a constant"),
        }
    }

    fn prefixed(&mut self) -> PResult<RawTerm> {
        let prefix = self.prefix()?;
        self.expect(Tok::Dot)?;
        let next = self.constant()?;
        Ok(RawTerm::Prefix(prefix, next))
    }

    fn label_and_value(&mut self) -> PResult<(Name, RawValue)> {
        self.expect(Tok::LParen)?;
        let label = self.ident("an action label")?;
        self.expect(Tok::Comma)?;
        let v = self.value()?;
        self.expect(Tok::RParen)?;
        Ok((label, v))
    }

    fn value(&mut self) -> PResult<RawValue> {
        match self.peek() {
            Tok::Number(v) => {
                let v = *v;
                let pos = self.advance().pos;
                Ok(RawValue::Num(v, pos))
            }
            Tok::Ident(_) => Ok(RawValue::Param(self.ident("a parameter")?)),
            _ => self.fail("a number or a parameter name"),
        }
    }

    fn braced_value(&mut self, kw: &str) -> PResult<RawValue> {
        self.expect(Tok::At)?;
        self.keyword(kw)?;
        self.expect(Tok::LBrace)?;
        let v = self.value()?;
        self.expect(Tok::RBrace)?;
        Ok(v)
    }

    fn range(&mut self) -> PResult<RawRange> {
        self.expect(Tok::At)?;
        self.keyword("Ir")?;
        self.expect(Tok::LBrace)?;
        let mut names = Vec::new();
        if *self.peek() != Tok::RBrace {
            names.push(self.ident("a location name")?);
            while *self.peek() == Tok::Comma {
                self.advance();
                names.push(self.ident("a location name")?);
            }
        }
        self.expect(Tok::RBrace)?;
        if let Some(all) = names.iter().find(|n| n.text == "all") {
            if names.len() > 1 {
                self.diags.push(Diagnostic::error(
                    "`all` must appear alone in an influence range",
                    all.pos,
                ));
                return Err(());
            }
            return Ok(RawRange::All);
        }
        Ok(RawRange::Names(names))
    }

    fn prefix(&mut self) -> PResult<RawPrefix> {
        let tok = self.peek().clone();
        match tok {
            Tok::BangBang => {
                self.advance();
                let (l, r) = self.label_and_value()?;
                let range = self.range()?;
                Ok(RawPrefix::UnicastOut(l, r, range))
            }
            Tok::QuestQuest => {
                self.advance();
                let (l, p) = self.label_and_value()?;
                let w = self.braced_value("Wt")?;
                Ok(RawPrefix::UnicastIn(l, p, w))
            }
            Tok::Bang => {
                self.advance();
                let (l, r) = self.label_and_value()?;
                let range = self.range()?;
                Ok(RawPrefix::BroadcastOut(l, r, range))
            }
            Tok::Quest => {
                self.advance();
                let (l, p) = self.label_and_value()?;
                let q = self.braced_value("Prob")?;
                Ok(RawPrefix::BroadcastIn(l, p, q))
            }
            _ => {
                let (l, r) = self.label_and_value()?;
                Ok(RawPrefix::Spontaneous(l, r))
            }
        }
    }
}
