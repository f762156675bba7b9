use super::{BinOp, Expr, Func};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at column {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unknown symbol `{name}` at column {position}")]
    UnknownSymbol { name: String, position: usize },
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Sym(char),
    End,
}

struct Lexer {
    toks: Vec<(Tok, usize)>,
}

fn syntax(position: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        position,
        message: message.into(),
    }
}

impl Lexer {
    fn run(src: &str) -> Result<Lexer, ParseError> {
        let chars: Vec<char> = src.chars().collect();
        let mut toks = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            if c.is_whitespace() {
                i += 1;
            } else if c.is_ascii_digit() || c == '.' {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    let mut j = i + 1;
                    if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                        j += 1;
                    }
                    if j < chars.len() && chars[j].is_ascii_digit() {
                        while j < chars.len() && chars[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let text: String = chars[start..i].iter().collect();
                let v: f64 = text
                    .parse()
                    .map_err(|_| syntax(start, format!("malformed number `{text}`")))?;
                toks.push((Tok::Num(v), start));
            } else if c.is_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                toks.push((Tok::Ident(chars[start..i].iter().collect()), start));
            } else if c == '*' && chars.get(i + 1) == Some(&'*') {
                toks.push((Tok::Sym('^'), i));
                i += 2;
            } else if "+-*/^(),".contains(c) {
                toks.push((Tok::Sym(c), i));
                i += 1;
            } else {
                return Err(syntax(i, format!("unexpected character `{c}`")));
            }
        }
        toks.push((Tok::End, chars.len()));
        Ok(Lexer { toks })
    }
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    at: usize,
    coords: &'a [String],
}

/// Parse `src`, resolving identifiers against the chart coordinate names.
pub fn parse_expr(src: &str, coords: &[String]) -> Result<Expr, ParseError> {
    let toks = Lexer::run(src)?.toks;
    let mut p = Parser {
        toks,
        at: 0,
        coords,
    };
    if p.peek() == &Tok::End {
        return Err(syntax(0, "empty expression"));
    }
    let e = p.sum()?;
    match p.peek() {
        Tok::End => Ok(e),
        Tok::Sym(')') => Err(syntax(p.pos(), "unbalanced `)`")),
        t => Err(syntax(p.pos(), format!("unexpected {}", describe(t)))),
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Num(v) => format!("number {v}"),
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Sym(c) => format!("`{c}`"),
        Tok::End => "end of input".into(),
    }
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.at].clone();
        if t.0 != Tok::End {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.peek() == &Tok::Sym(c) {
            self.bump();
            Ok(())
        } else {
            let what = match self.peek() {
                Tok::End if c == ')' => "missing `)`".to_string(),
                t => format!("expected `{c}`, found {}", describe(t)),
            };
            Err(syntax(self.pos(), what))
        }
    }

    fn sum(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.product()?;
        loop {
            let op = match self.peek() {
                Tok::Sym('+') => BinOp::Add,
                Tok::Sym('-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.product()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn product(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Sym('*') => BinOp::Mul,
                Tok::Sym('/') => BinOp::Div,
                Tok::Num(_) | Tok::Ident(_) | Tok::Sym('(') => {
                    return Err(syntax(
                        self.pos(),
                        "implicit multiplication is not supported; use `*`",
                    ))
                }
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Tok::Sym('-') => {
                self.bump();
                Ok(Expr::neg(self.unary()?))
            }
            Tok::Sym('+') => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.peek() != &Tok::Sym('^') {
            return Ok(base);
        }
        self.bump();
        let epos = self.pos();
        let exponent = self.unary()?;
        let Some(e) = exponent.as_const() else {
            return Err(syntax(epos, "exponent must be a constant"));
        };
        Ok(match base {
            Expr::Const(b) => Expr::Const(b.powf(e)),
            b => Expr::Pow(Box::new(b), e),
        })
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let (tok, pos) = self.bump();
        match tok {
            Tok::Num(v) => Ok(Expr::Const(v)),
            Tok::Sym('(') => {
                let e = self.sum()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) => {
                if self.peek() == &Tok::Sym('(') {
                    let Some(f) = Func::from_name(&name) else {
                        return Err(ParseError::UnknownSymbol {
                            name,
                            position: pos,
                        });
                    };
                    self.bump();
                    if self.peek() == &Tok::Sym(')') {
                        return Err(syntax(self.pos(), format!("{} expects one argument", f.name())));
                    }
                    let arg = self.sum()?;
                    if self.peek() == &Tok::Sym(',') {
                        return Err(syntax(self.pos(), format!("{} expects one argument", f.name())));
                    }
                    self.expect(')')?;
                    return Ok(Expr::call(f, arg));
                }
                if let Some(i) = self.coords.iter().position(|c| *c == name) {
                    return Ok(Expr::Coord(i));
                }
                if name == "pi" {
                    return Ok(Expr::Const(std::f64::consts::PI));
                }
                if Func::from_name(&name).is_some() {
                    return Err(syntax(pos, format!("function `{name}` needs an argument list")));
                }
                Err(ParseError::UnknownSymbol {
                    name,
                    position: pos,
                })
            }
            Tok::End => Err(syntax(pos, "unexpected end of input")),
            Tok::Sym(c) => Err(syntax(pos, format!("unexpected `{c}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names() -> Vec<String> {
        vec!["x".into(), "y".into(), "z".into()]
    }

    #[test]
    fn precedence_and_associativity() {
        let c = names();
        let p = [2.0, 3.0, 0.5];
        let v = |s: &str| parse_expr(s, &c).unwrap().eval(&p).unwrap();
        assert_eq!(v("-x^2"), -4.0);
        assert_eq!(v("2^3^2"), 512.0);
        assert_eq!(v("x-y-z"), -1.5);
        assert_eq!(v("x/y*y"), 2.0);
        assert_eq!(v("x**2"), 4.0);
        assert_eq!(v("1 + 2 * x ^ 2"), 9.0);
    }

    #[test]
    fn reports_errors() {
        let c = names();
        assert_eq!(
            parse_expr("x**q", &c),
            Err(ParseError::UnknownSymbol {
                name: "q".into(),
                position: 3
            })
        );
        assert!(matches!(parse_expr("x^y", &c), Err(ParseError::Syntax { position: 2, .. })));
        assert!(matches!(parse_expr("(x+y", &c), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse_expr("x+y)", &c), Err(ParseError::Syntax { position: 3, .. })));
        assert!(matches!(parse_expr("2x", &c), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse_expr("sin(x, y)", &c), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse_expr("", &c), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse_expr("foo(x)", &c), Err(ParseError::UnknownSymbol { .. })));
        assert!(matches!(parse_expr("x $ y", &c), Err(ParseError::Syntax { position: 2, .. })));
    }

    #[test]
    fn pi_is_a_constant_unless_shadowed() {
        let e = parse_expr("pi", &names()).unwrap();
        assert_eq!(e, Expr::Const(std::f64::consts::PI));
        let e = parse_expr("pi", &["pi".to_string()]).unwrap();
        assert_eq!(e, Expr::Coord(0));
    }
}
