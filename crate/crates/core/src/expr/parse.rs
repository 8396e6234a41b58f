//! Recursive-descent parser for the ASCII expression grammar.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := atom ('^' '-'? INT)?
//! atom    := INT | symbol | 'sqrt' '(' expr ')' | '(' expr ')'
//! symbol  := 'x' | 't' | 'u' ('[' INT ',' INT ']')? | 'a' | 'b' | 'A' | 'B'
//!          | 'c' INT | 'z' | 'w' ('[' INT ']')?
//! ```

use thiserror::Error;

use super::expression::Expr;
use super::symbol::{Param, Symbol};
use super::ExprError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(u64),
    Ident(String),
    Punct(char),
    End,
}

struct Lexer {
    chars: Vec<char>,
    pos: usize,
}

#[derive(Clone, Copy)]
struct Loc {
    line: usize,
    column: usize,
}

struct Parser {
    toks: Vec<(Tok, Loc)>,
    pos: usize,
}

fn err(loc: Loc, message: impl Into<String>) -> ParseError {
    ParseError {
        line: loc.line,
        column: loc.column,
        message: message.into(),
    }
}

impl Lexer {
    fn new(src: &str) -> Self {
        Lexer {
            chars: src.chars().collect(),
            pos: 0,
        }
    }

    fn loc_of(&self, pos: usize) -> Loc {
        let mut line = 1;
        let mut column = 1;
        for &c in &self.chars[..pos] {
            if c == '\n' {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
        }
        Loc { line, column }
    }

    fn tokens(mut self) -> Result<Vec<(Tok, Loc)>, ParseError> {
        let mut out = Vec::new();
        loop {
            while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
                self.pos += 1;
            }
            let loc = self.loc_of(self.pos);
            let Some(&c) = self.chars.get(self.pos) else {
                out.push((Tok::End, loc));
                return Ok(out);
            };
            if c.is_ascii_digit() {
                let start = self.pos;
                while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let text: String = self.chars[start..self.pos].iter().collect();
                let n = text
                    .parse::<u64>()
                    .map_err(|_| err(loc, format!("integer literal {text} is too large")))?;
                out.push((Tok::Int(n), loc));
            } else if c.is_ascii_alphabetic() {
                // Identifiers are a letter run; a trailing digit run belongs to
                // unknown constants c1, c2, ...
                let start = self.pos;
                while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_alphabetic() {
                    self.pos += 1;
                }
                if self.chars[start..self.pos] == ['c'] {
                    while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
                        self.pos += 1;
                    }
                }
                out.push((
                    Tok::Ident(self.chars[start..self.pos].iter().collect()),
                    loc,
                ));
            } else if "+-*/^()[],".contains(c) {
                self.pos += 1;
                out.push((Tok::Punct(c), loc));
            } else {
                return Err(err(loc, format!("unexpected character '{c}'")));
            }
        }
    }
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn loc(&self) -> Loc {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, Loc) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        let (t, loc) = self.bump();
        if t == Tok::Punct(c) {
            Ok(())
        } else {
            Err(err(loc, format!("expected '{c}', found {}", describe(&t))))
        }
    }

    fn int(&mut self) -> Result<u64, ParseError> {
        match self.bump() {
            (Tok::Int(n), _) => Ok(n),
            (t, loc) => Err(err(
                loc,
                format!("expected an integer, found {}", describe(&t)),
            )),
        }
    }

    fn lift(loc: Loc, r: Result<Expr, ExprError>) -> Result<Expr, ParseError> {
        r.map_err(|e| match e {
            ExprError::Parse(p) => p,
            other => err(loc, other.to_string()),
        })
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.term()?;
        loop {
            let loc = self.loc();
            match self.peek() {
                Tok::Punct('+') => {
                    self.bump();
                    let rhs = self.term()?;
                    acc = Self::lift(loc, acc.checked_add(&rhs))?;
                }
                Tok::Punct('-') => {
                    self.bump();
                    let rhs = self.term()?;
                    acc = Self::lift(loc, acc.checked_sub(&rhs))?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.unary()?;
        loop {
            let loc = self.loc();
            match self.peek() {
                Tok::Punct('*') => {
                    self.bump();
                    let rhs = self.unary()?;
                    acc = Self::lift(loc, acc.checked_mul(&rhs))?;
                }
                Tok::Punct('/') => {
                    self.bump();
                    let rhs = self.unary()?;
                    acc = Self::lift(loc, acc.checked_div(&rhs))?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.peek() == &Tok::Punct('-') {
            self.bump();
            return Ok(-self.unary()?);
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.peek() != &Tok::Punct('^') {
            return Ok(base);
        }
        let loc = self.loc();
        self.bump();
        let neg = if self.peek() == &Tok::Punct('-') {
            self.bump();
            true
        } else {
            false
        };
        let n = self.int()?;
        let n = i32::try_from(n).map_err(|_| err(loc, "exponent too large"))?;
        Self::lift(loc, base.pow(if neg { -n } else { n }))
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let (tok, loc) = self.bump();
        match tok {
            Tok::Int(n) => Ok(Expr::int(n as i64)),
            Tok::Punct('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) => self.ident(&name, loc),
            t => Err(err(loc, format!("unexpected {}", describe(&t)))),
        }
    }

    fn ident(&mut self, name: &str, loc: Loc) -> Result<Expr, ParseError> {
        let sym = match name {
            "x" => Symbol::X,
            "t" => Symbol::T,
            "a" => Symbol::Param(Param::Alpha),
            "b" => Symbol::Param(Param::Beta),
            "A" => Symbol::Param(Param::RepA),
            "B" => Symbol::Param(Param::RepB),
            "eps" => Symbol::Param(Param::Eps),
            "z" => Symbol::OdeVar,
            "u" => {
                if self.peek() == &Tok::Punct('[') {
                    self.bump();
                    let i = self.small(loc)?;
                    self.expect(',')?;
                    let j = self.small(loc)?;
                    self.expect(']')?;
                    Symbol::Jet(i, j)
                } else {
                    Symbol::U
                }
            }
            "w" => {
                if self.peek() == &Tok::Punct('[') {
                    self.bump();
                    let k = self.small(loc)?;
                    self.expect(']')?;
                    Symbol::OdeFn(k)
                } else {
                    Symbol::OdeFn(0)
                }
            }
            "sqrt" => {
                self.expect('(')?;
                let inner = self.expr()?;
                self.expect(')')?;
                return Self::lift(loc, Expr::sqrt(&inner));
            }
            _ => match name.strip_prefix('c').and_then(|k| k.parse::<u32>().ok()) {
                Some(k) if name.len() > 1 => Symbol::Unknown(k),
                _ => return Err(err(loc, format!("unknown symbol '{name}'"))),
            },
        };
        Ok(Expr::symbol(sym))
    }

    fn small(&mut self, loc: Loc) -> Result<u16, ParseError> {
        let n = self.int()?;
        u16::try_from(n).map_err(|_| err(loc, "derivative order too large"))
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Int(n) => format!("integer {n}"),
        Tok::Ident(s) => format!("'{s}'"),
        Tok::Punct(c) => format!("'{c}'"),
        Tok::End => "end of input".to_string(),
    }
}

/// Parses an expression and returns it in normal form.
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    let toks = Lexer::new(text).tokens()?;
    let mut p = Parser { toks, pos: 0 };
    let e = p.expr()?;
    match p.peek() {
        Tok::End => Ok(e),
        t => Err(err(
            p.loc(),
            format!("unexpected {} after expression", describe(t)),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::rat;

    #[test]
    fn parses_with_precedence() {
        let e = parse("u[1,0]^2 + a*u").unwrap();
        let expected = &Expr::symbol(Symbol::jet(1, 0)).pow(2).unwrap()
            + &(&Expr::symbol(Symbol::ALPHA) * &Expr::symbol(Symbol::U));
        assert_eq!(e, expected);
        assert_eq!(
            parse("-x^2").unwrap(),
            -Expr::symbol(Symbol::X).pow(2).unwrap()
        );
        assert_eq!(
            parse("2*3/4").unwrap(),
            Expr::rational(crate::expr::frac(3, 2))
        );
    }

    #[test]
    fn scaling_candidate() {
        let e = parse("x*u[1,0] - t*u[0,1] - 3*u").unwrap();
        assert_eq!(e.diff(Symbol::U), Expr::int(-3));
        assert_eq!(e.to_string(), parse(&e.to_string()).unwrap().to_string());
    }

    #[test]
    fn radical_candidate() {
        let e = parse("u[3,0]/sqrt(2*b*u[3,0]^2 + a)").unwrap();
        assert_eq!(e.parts().len(), 1);
        assert_eq!(e.parts()[0].power, -1);
        assert_eq!(parse(&e.to_string()).unwrap(), e);
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse("u[1,0] +\n  q").unwrap_err();
        assert_eq!((e.line, e.column), (2, 3));
        assert!(e.message.contains("unknown symbol"));
        let e = parse("x/(x+1)").unwrap_err();
        assert!(e.message.contains("cannot divide"), "{e}");
        let e = parse("(x").unwrap_err();
        assert!(e.message.contains("expected ')'"));
        assert!(parse("sqrt(x) + sqrt(t)")
            .unwrap_err()
            .message
            .contains("two distinct radical kernels"));
    }

    #[test]
    fn unknowns_and_ode_symbols() {
        let e = parse("c12*w[2] + z*w + A*B").unwrap();
        assert!(e.contains(Symbol::Unknown(12)));
        assert!(e.contains(Symbol::OdeFn(2)));
        assert_eq!(parse("0*c1").unwrap(), Expr::zero());
        assert_eq!(parse("4/2").unwrap(), Expr::rational(rat(2)));
    }
}
