//! Concrete syntax.
//!
//! ```text
//! expr    := iff
//! iff     := imp ( "<->" imp )*          left associative
//! imp     := or ( "->" imp )?            right associative
//! or      := and ( "|" and )*            left associative
//! and     := prefix ( "&" prefix )*      left associative
//! prefix  := ( "~" | "<1>" | "<2>" | "[1]" | "[2]" | "@" nominal ) prefix | primary
//! primary := atom | "(" expr ")"
//! atom    := p<digits> | i<digits> | a<digits>
//! ```

use std::fmt;

use thiserror::Error;

use super::formula::{Atom, Dim, Formula, Nominal};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{line}:{column}: expected {}, found {found}", expected.join(" or "))]
    Syntax {
        line: usize,
        column: usize,
        expected: Vec<String>,
        found: String,
    },
    #[error("{line}:{column}: `@` must be followed by a nominal, found proposition `{atom}`")]
    Namespace { line: usize, column: usize, atom: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Token {
    Atom(Atom),
    Not,
    And,
    Or,
    Implies,
    Iff,
    Dia(Dim),
    Box(Dim),
    At,
    LParen,
    RParen,
    Eof,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Atom(a) => write!(f, "`{a}`"),
            Token::Not => f.write_str("`~`"),
            Token::And => f.write_str("`&`"),
            Token::Or => f.write_str("`|`"),
            Token::Implies => f.write_str("`->`"),
            Token::Iff => f.write_str("`<->`"),
            Token::Dia(d) => write!(f, "`<{d}>`"),
            Token::Box(d) => write!(f, "`[{d}]`"),
            Token::At => f.write_str("`@`"),
            Token::LParen => f.write_str("`(`"),
            Token::RParen => f.write_str("`)`"),
            Token::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Pos {
    line: usize,
    column: usize,
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    src: &'a str,
    line: usize,
    column: usize,
}

const FORMULA_START: &[&str] = &["atom", "`~`", "`<1>`", "`<2>`", "`[1]`", "`[2]`", "`@`", "`(`"];

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { chars: src.char_indices().peekable(), src, line: 1, column: 1 }
    }

    fn bump(&mut self) -> Option<char> {
        let (_, c) = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn error(&self, pos: Pos, expected: &[&str], found: String) -> ParseError {
        ParseError::Syntax {
            line: pos.line,
            column: pos.column,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found,
        }
    }

    /// Consumes `rest` exactly, or fails expecting `whole`.
    fn expect_seq(&mut self, pos: Pos, rest: &str, whole: &[&str]) -> Result<(), ParseError> {
        for want in rest.chars() {
            match self.chars.peek() {
                Some(&(_, c)) if c == want => {
                    self.bump();
                }
                Some(&(_, c)) => return Err(self.error(pos, whole, format!("`{c}`"))),
                None => return Err(self.error(pos, whole, "end of input".into())),
            }
        }
        Ok(())
    }

    fn next_token(&mut self) -> Result<(Token, Pos), ParseError> {
        while let Some(&(_, c)) = self.chars.peek() {
            if c.is_whitespace() {
                self.bump();
            } else {
                break;
            }
        }
        let pos = Pos { line: self.line, column: self.column };
        let Some(&(start, c)) = self.chars.peek() else {
            return Ok((Token::Eof, pos));
        };
        self.bump();
        let tok = match c {
            '~' => Token::Not,
            '&' => Token::And,
            '|' => Token::Or,
            '@' => Token::At,
            '(' => Token::LParen,
            ')' => Token::RParen,
            '-' => {
                self.expect_seq(pos, ">", &["`->`"])?;
                Token::Implies
            }
            '<' => match self.chars.peek().map(|&(_, c)| c) {
                Some('-') => {
                    self.expect_seq(pos, "->", &["`<->`"])?;
                    Token::Iff
                }
                Some('1') => {
                    self.expect_seq(pos, "1>", &["`<1>`"])?;
                    Token::Dia(Dim::One)
                }
                Some('2') => {
                    self.expect_seq(pos, "2>", &["`<2>`"])?;
                    Token::Dia(Dim::Two)
                }
                _ => {
                    let found = self.found_here();
                    return Err(self.error(pos, &["`<1>`", "`<2>`", "`<->`"], found));
                }
            },
            '[' => match self.chars.peek().map(|&(_, c)| c) {
                Some('1') => {
                    self.expect_seq(pos, "1]", &["`[1]`"])?;
                    Token::Box(Dim::One)
                }
                Some('2') => {
                    self.expect_seq(pos, "2]", &["`[2]`"])?;
                    Token::Box(Dim::Two)
                }
                _ => {
                    let found = self.found_here();
                    return Err(self.error(pos, &["`[1]`", "`[2]`"], found));
                }
            },
            'p' | 'i' | 'a' => {
                let mut end = start + 1;
                while let Some(&(i, d)) = self.chars.peek() {
                    if d.is_ascii_digit() {
                        end = i + d.len_utf8();
                        self.bump();
                    } else {
                        break;
                    }
                }
                let digits = &self.src[start + 1..end];
                if digits.is_empty() {
                    let found = self.found_here();
                    return Err(self.error(pos, &["digits after atom prefix"], found));
                }
                let index: u32 = digits.parse().map_err(|_| {
                    self.error(pos, &["atom index below 2^32"], format!("`{}`", &self.src[start..end]))
                })?;
                Token::Atom(match c {
                    'p' => Atom::Prop(index),
                    'i' => Atom::Nom(Nominal::first(index)),
                    _ => Atom::Nom(Nominal::second(index)),
                })
            }
            other => return Err(self.error(pos, FORMULA_START, format!("`{other}`"))),
        };
        Ok((tok, pos))
    }

    fn found_here(&mut self) -> String {
        match self.chars.peek() {
            Some(&(_, c)) => format!("`{c}`"),
            None => "end of input".into(),
        }
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    current: Token,
    pos: Pos,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Result<Self, ParseError> {
        let mut lexer = Lexer::new(src);
        let (current, pos) = lexer.next_token()?;
        Ok(Parser { lexer, current, pos })
    }

    fn advance(&mut self) -> Result<(), ParseError> {
        let (tok, pos) = self.lexer.next_token()?;
        self.current = tok;
        self.pos = pos;
        Ok(())
    }

    fn unexpected(&self, expected: &[&str]) -> ParseError {
        self.lexer.error(self.pos, expected, self.current.to_string())
    }

    fn iff(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.implication()?;
        while self.current == Token::Iff {
            self.advance()?;
            let rhs = self.implication()?;
            lhs = Formula::iff(lhs, rhs);
        }
        Ok(lhs)
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if self.current == Token::Implies {
            self.advance()?;
            let rhs = self.implication()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.conjunction()?;
        while self.current == Token::Or {
            self.advance()?;
            let rhs = self.conjunction()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.prefixed()?;
        while self.current == Token::And {
            self.advance()?;
            let rhs = self.prefixed()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn prefixed(&mut self) -> Result<Formula, ParseError> {
        match self.current.clone() {
            Token::Not => {
                self.advance()?;
                Ok(Formula::not(self.prefixed()?))
            }
            Token::Dia(d) => {
                self.advance()?;
                Ok(Formula::dia(d, self.prefixed()?))
            }
            Token::Box(d) => {
                self.advance()?;
                Ok(Formula::boxed(d, self.prefixed()?))
            }
            Token::At => {
                self.advance()?;
                let nominal = match self.current {
                    Token::Atom(Atom::Nom(n)) => n,
                    Token::Atom(Atom::Prop(p)) => {
                        return Err(ParseError::Namespace {
                            line: self.pos.line,
                            column: self.pos.column,
                            atom: format!("p{p}"),
                        })
                    }
                    _ => return Err(self.unexpected(&["nominal"])),
                };
                self.advance()?;
                Ok(Formula::at(nominal, self.prefixed()?))
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        match self.current {
            Token::Atom(a) => {
                self.advance()?;
                Ok(Formula::Atom(a))
            }
            Token::LParen => {
                self.advance()?;
                let inner = self.iff()?;
                if self.current != Token::RParen {
                    return Err(self.unexpected(&["`)`", "`&`", "`|`", "`->`", "`<->`"]));
                }
                self.advance()?;
                Ok(inner)
            }
            _ => Err(self.unexpected(FORMULA_START)),
        }
    }
}

/// Parses a formula from its concrete syntax.
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let mut parser = Parser::new(text)?;
    let f = parser.iff()?;
    if parser.current != Token::Eof {
        return Err(parser.unexpected(&["`&`", "`|`", "`->`", "`<->`", "end of input"]));
    }
    Ok(f)
}

impl std::str::FromStr for Formula {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

// Binding strength, loosest first.
const IFF: u8 = 0;
const IMP: u8 = 1;
const OR: u8 = 2;
const AND: u8 = 3;
const PREFIX: u8 = 4;

fn level(f: &Formula) -> u8 {
    match f {
        Formula::Iff(..) => IFF,
        Formula::Implies(..) => IMP,
        Formula::Or(..) => OR,
        Formula::And(..) => AND,
        _ => PREFIX,
    }
}

fn write_at(out: &mut fmt::Formatter<'_>, f: &Formula, min: u8) -> fmt::Result {
    if level(f) < min {
        out.write_str("(")?;
        write_formula(out, f)?;
        return out.write_str(")");
    }
    write_formula(out, f)
}

fn write_formula(out: &mut fmt::Formatter<'_>, f: &Formula) -> fmt::Result {
    match f {
        Formula::Atom(a) => write!(out, "{a}"),
        Formula::Not(g) => {
            out.write_str("~")?;
            write_at(out, g, PREFIX)
        }
        Formula::Dia(d, g) => {
            write!(out, "<{d}>")?;
            write_at(out, g, PREFIX)
        }
        Formula::Box(d, g) => {
            write!(out, "[{d}]")?;
            write_at(out, g, PREFIX)
        }
        Formula::At(n, g) => {
            write!(out, "@{n} ")?;
            write_at(out, g, PREFIX)
        }
        Formula::And(l, r) => binary(out, l, " & ", r, AND, false),
        Formula::Or(l, r) => binary(out, l, " | ", r, OR, false),
        Formula::Iff(l, r) => binary(out, l, " <-> ", r, IFF, false),
        Formula::Implies(l, r) => binary(out, l, " -> ", r, IMP, true),
    }
}

fn binary(
    out: &mut fmt::Formatter<'_>,
    l: &Formula,
    op: &str,
    r: &Formula,
    lvl: u8,
    right_assoc: bool,
) -> fmt::Result {
    let (lmin, rmin) = if right_assoc { (lvl + 1, lvl) } else { (lvl, lvl + 1) };
    write_at(out, l, lmin)?;
    out.write_str(op)?;
    write_at(out, r, rmin)
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(f, self)
    }
}
