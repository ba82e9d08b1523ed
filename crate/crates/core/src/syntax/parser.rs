//! Recursive-descent parser for the concrete formula syntax.
//!
//! ```text
//! formula := imp
//! imp     := disj ( "->" imp | "<->" disj )?
//! disj    := conj ( "|" conj )*
//! conj    := fuse ( "/\" fuse )*
//! fuse    := atom ( "&" atom )*
//! atom    := constant | prop | name ( "[" rational "]" )? "(" formula ( "," formula )* ")"
//!          | "(" formula ")"
//! ```
//!
//! Constants are carrier labels (`0.5`, `1/3`) or `c{index}`.

use super::{Formula, Signature};
use crate::algebra::parse_rational;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Number(String),
    Arrow,
    Iff,
    Or,
    And,
    Fuse,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    End,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokens(src: &'a str) -> Result<Vec<(Tok, usize)>> {
        let mut lx = Lexer { src, pos: 0 };
        let mut out = Vec::new();
        loop {
            let (t, at) = lx.next()?;
            let end = t == Tok::End;
            out.push((t, at));
            if end {
                return Ok(out);
            }
        }
    }

    fn next(&mut self) -> Result<(Tok, usize)> {
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() && bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        let start = self.pos;
        if start >= bytes.len() {
            return Ok((Tok::End, start));
        }
        let rest = &self.src[start..];
        let fixed: [(&str, Tok); 10] = [
            ("<->", Tok::Iff),
            ("->", Tok::Arrow),
            ("/\\", Tok::And),
            ("|", Tok::Or),
            ("&", Tok::Fuse),
            ("(", Tok::LParen),
            (")", Tok::RParen),
            ("[", Tok::LBracket),
            ("]", Tok::RBracket),
            (",", Tok::Comma),
        ];
        for (text, tok) in fixed {
            if rest.starts_with(text) {
                self.pos += text.len();
                return Ok((tok, start));
            }
        }
        let c = bytes[start];
        if c.is_ascii_alphabetic() || c == b'_' {
            let len = rest
                .bytes()
                .take_while(|b| b.is_ascii_alphanumeric() || *b == b'_' || *b == b'\'')
                .count();
            self.pos += len;
            return Ok((Tok::Ident(rest[..len].to_string()), start));
        }
        if c.is_ascii_digit() {
            let mut len = rest.bytes().take_while(u8::is_ascii_digit).count();
            let tail = &rest.as_bytes()[len..];
            if tail.len() >= 2 && (tail[0] == b'.' || tail[0] == b'/') && tail[1].is_ascii_digit() {
                len += 1 + tail[1..].iter().take_while(|b| b.is_ascii_digit()).count();
            }
            self.pos += len;
            return Ok((Tok::Number(rest[..len].to_string()), start));
        }
        Err(Error::Parse {
            offset: start,
            message: format!("unexpected character `{}`", rest.chars().next().unwrap_or('?')),
        })
    }
}

/// Whether `text` lexes as exactly one identifier or number token.
pub(crate) fn is_single_token(text: &str) -> bool {
    match Lexer::tokens(text) {
        Ok(toks) => toks.len() == 2 && matches!(toks[0].0, Tok::Ident(_) | Tok::Number(_)),
        Err(_) => false,
    }
}

struct Parser<'s, 'a> {
    toks: Vec<(Tok, usize)>,
    at: usize,
    sig: &'s Signature<'a>,
}

/// Parses `text` against the session's constants, symbols and modalities.
pub fn parse(text: &str, sig: &Signature<'_>) -> Result<Formula> {
    let toks = Lexer::tokens(text)?;
    let mut p = Parser { toks, at: 0, sig };
    let f = p.imp()?;
    match p.peek() {
        Tok::End => Ok(f),
        t => Err(p.error(format!("unexpected {t:?} after formula"))),
    }
}

impl Parser<'_, '_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn offset(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if t != Tok::End {
            self.at += 1;
        }
        t
    }

    fn error(&self, message: String) -> Error {
        Error::Parse {
            offset: self.offset(),
            message,
        }
    }

    fn expect(&mut self, want: Tok) -> Result<()> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(self.error(format!("expected {want:?}, found {:?}", self.peek())))
        }
    }

    fn imp(&mut self) -> Result<Formula> {
        let left = self.disj()?;
        match self.peek() {
            Tok::Arrow => {
                self.bump();
                let right = self.imp()?;
                Ok(Formula::imp(left, right))
            }
            Tok::Iff => {
                self.bump();
                let right = self.disj()?;
                Ok(Formula::iff(left, right))
            }
            _ => Ok(left),
        }
    }

    fn disj(&mut self) -> Result<Formula> {
        let mut f = self.conj()?;
        while *self.peek() == Tok::Or {
            self.bump();
            f = Formula::or(f, self.conj()?);
        }
        Ok(f)
    }

    fn conj(&mut self) -> Result<Formula> {
        let mut f = self.fuse()?;
        while *self.peek() == Tok::And {
            self.bump();
            f = Formula::and(f, self.fuse()?);
        }
        Ok(f)
    }

    fn fuse(&mut self) -> Result<Formula> {
        let mut f = self.atom()?;
        while *self.peek() == Tok::Fuse {
            self.bump();
            f = Formula::fuse(f, self.atom()?);
        }
        Ok(f)
    }

    fn atom(&mut self) -> Result<Formula> {
        let start = self.offset();
        match self.bump() {
            Tok::LParen => {
                let f = self.imp()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Number(n) => self.constant(&n, start),
            Tok::Ident(name) => {
                if matches!(self.peek(), Tok::LParen | Tok::LBracket) {
                    return self.application(name, start);
                }
                if self.sig.props.iter().any(|p| *p == name) {
                    return Ok(Formula::Prop(name));
                }
                if let Some(c) = self.sig.lattice.resolve(&name) {
                    return Ok(Formula::Const(c));
                }
                Err(Error::Parse {
                    offset: start,
                    message: format!("unknown proposition or constant `{name}`"),
                })
            }
            t => Err(Error::Parse {
                offset: start,
                message: format!("expected a formula, found {t:?}"),
            }),
        }
    }

    fn constant(&self, text: &str, offset: usize) -> Result<Formula> {
        self.sig.lattice.resolve(text).map(Formula::Const).ok_or_else(|| Error::Parse {
            offset,
            message: format!("`{text}` is not an element of {}", self.sig.lattice.name()),
        })
    }

    fn application(&mut self, mut name: String, start: usize) -> Result<Formula> {
        if *self.peek() == Tok::LBracket {
            self.bump();
            let at = self.offset();
            let r = match self.bump() {
                Tok::Number(n) => parse_rational(&n),
                _ => None,
            }
            .ok_or_else(|| Error::Parse {
                offset: at,
                message: "expected a rational parameter".into(),
            })?;
            self.expect(Tok::RBracket)?;
            name = format!("{name}[{}/{}]", r.numer(), r.denom());
        }
        self.expect(Tok::LParen)?;
        let mut args = vec![self.imp()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            args.push(self.imp()?);
        }
        self.expect(Tok::RParen)?;
        match self.sig.modalities.arity(&name) {
            None => Err(Error::Parse {
                offset: start,
                message: format!("unknown modality `{name}`"),
            }),
            Some(k) if k != args.len() => Err(Error::Parse {
                offset: start,
                message: format!("modality `{name}` expects {k} argument(s), got {}", args.len()),
            }),
            Some(_) => Ok(Formula::Modal(name, args)),
        }
    }
}
