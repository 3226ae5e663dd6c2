//! Parser for the parenthesized applicative term syntax.
//!
//! ```text
//! term   := "lam" ident ":" type "." term | app
//! app    := atom atom*                       (application, left-assoc)
//! atom   := numeral | ident | constant | "(" term ")"
//! type   := tatom ("->" type)?               (right-assoc)
//! tatom  := "0" | "1" | "2" | "(" type ")"
//! ```
//!
//! Constants: `S add sub mul mod eq lt le and or not min max if rec U K mu`.
//! `1` and `2` abbreviate `0 -> 0` and `(0 -> 0) -> 0` in type position.

use crate::error::{Error, Result};

use super::ast::{FinType, Prim, Term};

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Number(u64),
    Ident(String),
    LParen,
    RParen,
    Colon,
    Dot,
    Arrow,
}

#[derive(Debug, Clone)]
struct Spanned {
    token: Token,
    line: usize,
    col: usize,
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer {
            chars: text.chars().peekable(),
            line: 1,
            col: 1,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn error(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line,
            col: self.col,
            message: message.into(),
        }
    }

    fn tokens(mut self) -> Result<Vec<Spanned>> {
        let mut out = Vec::new();
        loop {
            while matches!(self.chars.peek(), Some(c) if c.is_whitespace()) {
                self.bump();
            }
            // line comments with `#`
            if matches!(self.chars.peek(), Some('#')) {
                while !matches!(self.chars.peek(), None | Some('\n')) {
                    self.bump();
                }
                continue;
            }
            let (line, col) = (self.line, self.col);
            let Some(&c) = self.chars.peek() else {
                return Ok(out);
            };
            let token = match c {
                '(' => {
                    self.bump();
                    Token::LParen
                }
                ')' => {
                    self.bump();
                    Token::RParen
                }
                ':' => {
                    self.bump();
                    Token::Colon
                }
                '.' => {
                    self.bump();
                    Token::Dot
                }
                '-' => {
                    self.bump();
                    if self.chars.peek() == Some(&'>') {
                        self.bump();
                        Token::Arrow
                    } else {
                        return Err(self.error("expected `->`"));
                    }
                }
                d if d.is_ascii_digit() => {
                    let mut digits = String::new();
                    while matches!(self.chars.peek(), Some(c) if c.is_ascii_digit()) {
                        digits.push(self.bump().expect("digit"));
                    }
                    let n = digits
                        .parse()
                        .map_err(|_| self.error(format!("numeral {digits} out of range")))?;
                    Token::Number(n)
                }
                a if a.is_alphabetic() || a == '_' => {
                    let mut ident = String::new();
                    while matches!(self.chars.peek(), Some(c) if c.is_alphanumeric() || *c == '_' || *c == '\'')
                    {
                        ident.push(self.bump().expect("ident char"));
                    }
                    Token::Ident(ident)
                }
                other => return Err(self.error(format!("unexpected character {other:?}"))),
            };
            out.push(Spanned { token, line, col });
        }
    }
}

struct Parser {
    tokens: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|s| &s.token)
    }

    fn location(&self) -> (usize, usize) {
        self.tokens
            .get(self.pos.min(self.tokens.len().saturating_sub(1)))
            .map(|s| (s.line, s.col))
            .unwrap_or((1, 1))
    }

    fn error(&self, message: impl Into<String>) -> Error {
        let (line, col) = self.location();
        Error::Parse {
            line,
            col,
            message: message.into(),
        }
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).map(|s| s.token.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, token: Token, what: &str) -> Result<()> {
        if self.peek() == Some(&token) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected {what}")))
        }
    }

    fn parse_type(&mut self) -> Result<FinType> {
        let lhs = match self.peek() {
            Some(Token::Number(0)) => {
                self.pos += 1;
                FinType::Nat
            }
            Some(Token::Number(1)) => {
                self.pos += 1;
                FinType::one()
            }
            Some(Token::Number(2)) => {
                self.pos += 1;
                FinType::two()
            }
            Some(Token::LParen) => {
                self.pos += 1;
                let inner = self.parse_type()?;
                self.expect(Token::RParen, "`)` after type")?;
                inner
            }
            _ => return Err(self.error("expected a type (0, 1, 2, or parenthesized)")),
        };
        if self.peek() == Some(&Token::Arrow) {
            self.pos += 1;
            let rhs = self.parse_type()?;
            Ok(FinType::arrow(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn parse_term(&mut self) -> Result<Term> {
        if let Some(Token::Ident(name)) = self.peek() {
            if name == "lam" {
                self.pos += 1;
                let var = match self.bump() {
                    Some(Token::Ident(v)) => v,
                    _ => return Err(self.error("expected a variable name after `lam`")),
                };
                self.expect(Token::Colon, "`:` after the lambda variable")?;
                let ty = self.parse_type()?;
                self.expect(Token::Dot, "`.` after the lambda type")?;
                let body = self.parse_term()?;
                return Ok(Term::lam(var, ty, body));
            }
        }
        let mut term = self
            .parse_atom()?
            .ok_or_else(|| self.error("expected a term"))?;
        while let Some(arg) = self.parse_atom()? {
            term = Term::app(term, arg);
        }
        Ok(term)
    }

    /// One application atom, or `None` at an application boundary.
    fn parse_atom(&mut self) -> Result<Option<Term>> {
        match self.peek() {
            Some(Token::Number(_)) => {
                let Some(Token::Number(n)) = self.bump() else {
                    unreachable!()
                };
                Ok(Some(Term::Num(n)))
            }
            Some(Token::Ident(name)) if name != "lam" => {
                let name = name.clone();
                self.pos += 1;
                Ok(Some(match name.as_str() {
                    "rec" => Term::Rec,
                    "U" => Term::U,
                    "K" => Term::K,
                    "mu" => Term::Mu,
                    _ => match Prim::from_name(&name) {
                        Some(p) => Term::Prim(p),
                        None => Term::var(name),
                    },
                }))
            }
            Some(Token::LParen) => {
                self.pos += 1;
                let inner = self.parse_term()?;
                self.expect(Token::RParen, "`)`")?;
                Ok(Some(inner))
            }
            _ => Ok(None),
        }
    }
}

/// Parses a term from text.
pub fn parse_term(text: &str) -> Result<Term> {
    let tokens = Lexer::new(text).tokens()?;
    let mut parser = Parser { tokens, pos: 0 };
    let term = parser.parse_term()?;
    if parser.pos != parser.tokens.len() {
        return Err(parser.error("unexpected trailing input"));
    }
    Ok(term)
}

/// Parses a type from text.
pub fn parse_type(text: &str) -> Result<FinType> {
    let tokens = Lexer::new(text).tokens()?;
    let mut parser = Parser { tokens, pos: 0 };
    let ty = parser.parse_type()?;
    if parser.pos != parser.tokens.len() {
        return Err(parser.error("unexpected trailing input"));
    }
    Ok(ty)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_lambda_and_application() {
        let t = parse_term("lam x:0. x").unwrap();
        assert_eq!(t, Term::lam("x", FinType::Nat, Term::var("x")));
        let t = parse_term("add 2 3").unwrap();
        assert_eq!(
            t,
            Term::apps(Term::Prim(Prim::Add), [Term::Num(2), Term::Num(3)])
        );
    }

    #[test]
    fn application_is_left_associative() {
        let t = parse_term("f a b").unwrap();
        assert_eq!(
            t,
            Term::app(Term::app(Term::var("f"), Term::var("a")), Term::var("b"))
        );
    }

    #[test]
    fn lambda_body_extends_right() {
        let t = parse_term("lam x:0. add x 1").unwrap();
        let expected = Term::lam(
            "x",
            FinType::Nat,
            Term::apps(Term::Prim(Prim::Add), [Term::var("x"), Term::Num(1)]),
        );
        assert_eq!(t, expected);
    }

    #[test]
    fn type_abbreviations() {
        assert_eq!(parse_type("0").unwrap(), FinType::Nat);
        assert_eq!(parse_type("1").unwrap(), FinType::one());
        assert_eq!(parse_type("2").unwrap(), FinType::two());
        assert_eq!(parse_type("0 -> 0").unwrap(), FinType::one());
        assert_eq!(parse_type("(0 -> 0) -> 0").unwrap(), FinType::two());
        // right associativity
        assert_eq!(
            parse_type("0 -> 0 -> 0").unwrap(),
            FinType::arrow(FinType::Nat, FinType::one())
        );
    }

    #[test]
    fn reports_location() {
        let err = parse_term("lam x 0. x").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, col: 7, .. }), "{err:?}");
        assert!(parse_term("").is_err());
        assert!(parse_term("(add 1").is_err());
        assert!(parse_term("add 1) x").is_err());
    }

    #[test]
    fn comments_are_skipped() {
        let t = parse_term("# characteristic of the evens\nlam j:0. mod j 2").unwrap();
        assert!(matches!(t, Term::Lam(..)));
    }

    #[test]
    fn print_parse_round_trip_examples() {
        for text in [
            "lam x:0. x",
            "lam f:1. f 0",
            "add 2 (mul 3 4)",
            "lam x:0. lam y:0. if (eq x y) 0 1",
            "rec 3 0 (lam p:0. lam i:0. S p)",
            "U (lam j:0. mod j 2)",
            "K 3 (lam y:0. mod y 2)",
            "(lam x:0. x) 5",
        ] {
            let t = parse_term(text).unwrap();
            let printed = t.to_string();
            let back = parse_term(&printed).unwrap();
            assert_eq!(back, t, "round trip through {printed:?}");
        }
    }
}
