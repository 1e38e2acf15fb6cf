//! Infix parser for [`Expr`].
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' unary)?          exponent must be constant
//! atom  := number | 'z' | 'pi' | 'e' | func '(' args ')' | '(' expr ')'
//! func  := exp | ln | log | sin | cos | sqrt | cbrt | root(expr, odd)
//! ```

use super::expr::Expr;
use crate::error::{Error, Result};

pub fn parse_expr(src: &str) -> Result<Expr> {
    let mut p = Parser { src, pos: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> Error {
        Error::Parse {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("expected '{c}'")))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = lhs + self.term()?;
            } else if self.eat('-') {
                lhs = lhs - self.term()?;
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = lhs * self.unary()?;
            } else if self.eat('/') {
                lhs = lhs / self.unary()?;
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(-self.unary()?);
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat('^') {
            let at = self.pos;
            let exponent = self.unary()?;
            if exponent.depends_on_var() {
                return Err(Error::Parse {
                    offset: at,
                    message: "exponent must be a constant".into(),
                });
            }
            let r = exponent.eval(0.0)?;
            return Ok(base.powf(r));
        }
        Ok(base)
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        let bytes = self.src.as_bytes();
        let mut i = self.pos;
        while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
            i += 1;
        }
        if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
            let mut j = i + 1;
            if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                j += 1;
            }
            if j < bytes.len() && bytes[j].is_ascii_digit() {
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                i = j;
            }
        }
        self.pos = i;
        self.src[start..i]
            .parse::<f64>()
            .map(Expr::Const)
            .map_err(|_| Error::Parse {
                offset: start,
                message: format!("invalid number '{}'", &self.src[start..i]),
            })
    }

    fn ident(&mut self) -> &str {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == '_' {
                self.pos += 1;
            } else {
                break;
            }
        }
        &self.src[start..self.pos]
    }

    fn atom(&mut self) -> Result<Expr> {
        self.skip_ws();
        let Some(c) = self.peek() else {
            return Err(self.error("unexpected end of input"));
        };
        if c.is_ascii_digit() || c == '.' {
            return self.number();
        }
        if c == '(' {
            self.pos += 1;
            let e = self.expr()?;
            self.expect(')')?;
            return Ok(e);
        }
        if !c.is_ascii_alphabetic() {
            return Err(self.error(&format!("unexpected character '{c}'")));
        }
        let start = self.pos;
        let name = self.ident().to_string();
        match name.as_str() {
            "z" => return Ok(Expr::Var),
            "pi" => return Ok(Expr::Const(std::f64::consts::PI)),
            "e" => return Ok(Expr::Const(std::f64::consts::E)),
            _ => {}
        }
        self.expect('(')?;
        let arg = self.expr()?;
        let e = match name.as_str() {
            "exp" => arg.exp(),
            "ln" | "log" => arg.ln(),
            "sin" => arg.sin(),
            "cos" => arg.cos(),
            "sqrt" => arg.sqrt(),
            "cbrt" => arg.root(3),
            "root" => {
                self.expect(',')?;
                self.skip_ws();
                let at = self.pos;
                let n = self.number()?.eval(0.0)?;
                if n < 1.0 || n.fract() != 0.0 || (n as u64).is_multiple_of(2) {
                    return Err(Error::Parse {
                        offset: at,
                        message: "root index must be an odd positive integer".into(),
                    });
                }
                arg.root(n as u32)
            }
            _ => {
                return Err(Error::Parse {
                    offset: start,
                    message: format!("unknown function '{name}'"),
                })
            }
        };
        self.expect(')')?;
        Ok(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval(src: &str, z: f64) -> f64 {
        parse_expr(src).unwrap().eval(z).unwrap()
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(eval("1 + 2 * z", 3.0), 7.0);
        assert_eq!(eval("(1 + 2) * z", 3.0), 9.0);
        assert_eq!(eval("-z^2", 3.0), -9.0);
        assert_eq!(eval("z^-1", 4.0), 0.25);
        assert_eq!(eval("8 / 4 / 2", 0.0), 1.0);
        assert_eq!(eval("10 - 3 - 2", 0.0), 5.0);
        assert_eq!(eval("2^3^2", 0.0), 512.0);
    }

    #[test]
    fn functions_and_constants() {
        assert!((eval("exp(ln(z))", 2.5) - 2.5).abs() < 1e-15);
        assert!((eval("root(z, 5)", -32.0) + 2.0).abs() < 1e-15);
        assert!((eval("cbrt(z)", 27.0) - 3.0).abs() < 1e-15);
        assert!((eval("sin(pi/2) + cos(0) + e", 0.0) - (2.0 + std::f64::consts::E)).abs() < 1e-15);
        assert_eq!(eval("1.5e2 + 2E-1", 0.0), 150.2);
    }

    #[test]
    fn errors_carry_offsets() {
        match parse_expr("z ^ z") {
            Err(Error::Parse { offset, .. }) => assert_eq!(offset, 3),
            other => panic!("{other:?}"),
        }
        assert!(parse_expr("foo(z)").is_err());
        assert!(parse_expr("root(z, 2)").is_err());
        assert!(parse_expr("(z + 1").is_err());
        assert!(parse_expr("z z").is_err());
        assert!(parse_expr("").is_err());
    }

    #[test]
    fn display_round_trips() {
        for src in [
            "exp(2*z^3) / (1 - z)",
            "-(z + 1)^0.5 * ln(z)",
            "root(z - 4, 3) + sin(-2 * z)",
        ] {
            let e = parse_expr(src).unwrap();
            let back = parse_expr(&e.to_string()).unwrap();
            for x in [0.3, 0.7, 1.9] {
                let (a, b) = (e.eval(x), back.eval(x));
                match (a, b) {
                    (Ok(a), Ok(b)) => assert_eq!(a, b, "{src} at {x}"),
                    (Err(_), Err(_)) => {}
                    other => panic!("{src} at {x}: {other:?}"),
                }
            }
        }
    }
}
