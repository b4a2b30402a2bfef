//! Reader for the line-oriented system description format.
//!
//! ```text
//! # comment
//! vars x, y
//! f1 = x^2 + y^2 - 1
//! f2 = x - y
//! roi = [-2,2]x[-2,2]
//! root = 0.7071, 0.7071
//! max_depth = 30
//! ```
//!
//! Statements are separated by newlines or `;`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use crate::dyadic::Dyadic;
use crate::error::ParseError;
use crate::expr::Expr;

/// Everything read from a system file, before any numeric processing of
/// the ROI and root hints.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemSource {
    pub vars: Vec<String>,
    pub components: Vec<Expr>,
    /// Per-axis `(lo, hi)` literals.
    pub roi: Option<Vec<(String, String)>>,
    pub roots: Vec<Vec<String>>,
    pub options: BTreeMap<String, String>,
}

pub fn parse_source(text: &str) -> Result<SystemSource, ParseError> {
    let mut vars: Option<Vec<String>> = None;
    let mut comps: BTreeMap<usize, Expr> = BTreeMap::new();
    let mut roi = None;
    let mut roots: Vec<Vec<String>> = Vec::new();
    let mut options = BTreeMap::new();

    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw_line.split('#').next().unwrap_or("");
        for stmt in line.split(';').map(str::trim).filter(|s| !s.is_empty()) {
            let syntax = |message: String| ParseError::Syntax { line: line_no, message };
            if let Some(rest) = stmt.strip_prefix("vars") {
                if rest.starts_with(|c: char| c.is_whitespace() || c == '=') {
                    let rest = rest.trim_start().trim_start_matches('=');
                    let names = parse_var_list(rest).map_err(syntax)?;
                    if vars.is_some() {
                        return Err(syntax("variables declared twice".into()));
                    }
                    vars = Some(names);
                    continue;
                }
            }
            let (key, value) = stmt
                .split_once('=')
                .ok_or_else(|| syntax(format!("expected `name = value`, found `{stmt}`")))?;
            let key = key.trim();
            let value = value.trim();
            if let Some(index) = component_index(key) {
                let names = vars
                    .as_ref()
                    .ok_or_else(|| syntax("`vars` must precede the components".into()))?;
                let e = parse_expr_at(value, names, line_no)?;
                if comps.insert(index, e).is_some() {
                    return Err(syntax(format!("component `{key}` defined twice")));
                }
            } else if key == "roi" {
                roi = Some(parse_roi(value).map_err(syntax)?);
            } else if key == "root" {
                roots.push(value.split(',').map(|s| s.trim().to_string()).collect());
            } else if is_identifier(key) {
                options.insert(key.to_string(), value.to_string());
            } else {
                return Err(syntax(format!("invalid key `{key}`")));
            }
        }
    }

    let vars = vars.ok_or(ParseError::Syntax {
        line: 0,
        message: "missing `vars` declaration".into(),
    })?;
    let n = vars.len();
    if comps.len() != n {
        return Err(ParseError::DimensionMismatch {
            components: comps.len(),
            variables: n,
        });
    }
    if let Some((&k, _)) = comps.iter().find(|(&k, _)| k == 0 || k > n) {
        return Err(ParseError::Syntax {
            line: 0,
            message: format!("components must be numbered f1..f{n}, found f{k}"),
        });
    }
    if let Some(r) = &roi {
        if r.len() != n {
            return Err(ParseError::InvalidRoi(format!(
                "{} intervals given for {n} variables",
                r.len()
            )));
        }
    }
    if let Some(r) = roots.iter().find(|r| r.len() != n) {
        return Err(ParseError::Syntax {
            line: 0,
            message: format!("root hint `{}` does not have {n} coordinates", r.join(", ")),
        });
    }
    Ok(SystemSource {
        vars,
        components: comps.into_values().collect(),
        roi,
        roots,
        options,
    })
}

fn component_index(key: &str) -> Option<usize> {
    let digits = key.strip_prefix('f')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn parse_var_list(s: &str) -> Result<Vec<String>, String> {
    let names: Vec<String> = s.split(',').map(|v| v.trim().to_string()).collect();
    if names.is_empty() || names.iter().any(|n| n.is_empty()) {
        return Err("empty variable name".into());
    }
    for n in &names {
        if !is_identifier(n) || matches!(n.as_str(), "sin" | "cos" | "exp") {
            return Err(format!("invalid variable name `{n}`"));
        }
    }
    for (i, n) in names.iter().enumerate() {
        if names[..i].contains(n) {
            return Err(format!("variable `{n}` declared twice"));
        }
    }
    Ok(names)
}

/// Parses `[a,b]x[c,d]...` into per-axis literal pairs.
pub fn parse_roi(s: &str) -> Result<Vec<(String, String)>, String> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let mut rest = compact.as_str();
    let mut out = Vec::new();
    while !rest.is_empty() {
        if !out.is_empty() {
            rest = rest
                .strip_prefix('x')
                .or_else(|| rest.strip_prefix('×'))
                .or_else(|| rest.strip_prefix('*'))
                .ok_or_else(|| format!("expected `x` between intervals in `{s}`"))?;
        }
        let body = rest.strip_prefix('[').ok_or_else(|| format!("expected `[` in `{s}`"))?;
        let close = body.find(']').ok_or_else(|| format!("unclosed `[` in `{s}`"))?;
        out.push(parse_bound_pair(&body[..close])?);
        rest = &body[close + 1..];
    }
    if out.is_empty() {
        return Err("empty region of interest".into());
    }
    Ok(out)
}

/// Parses `a,b` into a literal pair.
pub fn parse_bound_pair(s: &str) -> Result<(String, String), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected `lo,hi`, found `{s}`"))?;
    Ok((a.trim().to_string(), b.trim().to_string()))
}

/// Parses a single expression over the given variable names.
pub fn parse_expr(s: &str, vars: &[String]) -> Result<Expr, ParseError> {
    parse_expr_at(s, vars, 1)
}

fn parse_expr_at(s: &str, vars: &[String], line: usize) -> Result<Expr, ParseError> {
    let tokens = tokenize(s).map_err(|message| ParseError::Syntax { line, message })?;
    let mut p = Parser {
        tokens,
        pos: 0,
        vars,
        line,
    };
    let e = p.expr()?;
    if p.pos != p.tokens.len() {
        return Err(p.error(format!("unexpected `{}`", p.tokens[p.pos])));
    }
    Ok(e)
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Num(String),
    Ident(String),
    Op(char),
}

impl std::fmt::Display for Token {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Token::Num(s) | Token::Ident(s) => f.write_str(s),
            Token::Op(c) => write!(f, "{c}"),
        }
    }
}

fn tokenize(s: &str) -> Result<Vec<Token>, String> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c == '0' && chars.get(i + 1) == Some(&'x') {
            let start = i;
            i += 2;
            while i < chars.len() && chars[i].is_ascii_hexdigit() {
                i += 1;
            }
            if chars.get(i) != Some(&'p') {
                return Err("hexadecimal literal needs a `p` exponent".into());
            }
            i += 1;
            if chars.get(i) == Some(&'-') {
                i += 1;
            }
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            out.push(Token::Num(chars[start..i].iter().collect()));
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '-' || chars[j] == '+') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            out.push(Token::Num(chars[start..i].iter().collect()));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Token::Op(c));
            i += 1;
        } else {
            return Err(format!("unexpected character `{c}`"));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    vars: &'a [String],
    line: usize,
}

impl Parser<'_> {
    fn error(&self, message: String) -> ParseError {
        ParseError::Syntax {
            line: self.line,
            message,
        }
    }

    fn peek_op(&self) -> Option<char> {
        match self.tokens.get(self.pos) {
            Some(Token::Op(c)) => Some(*c),
            _ => None,
        }
    }

    fn expect_op(&mut self, c: char) -> Result<(), ParseError> {
        if self.peek_op() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            let found = self
                .tokens
                .get(self.pos)
                .map_or_else(|| "end of input".to_string(), |t| format!("`{t}`"));
            Err(self.error(format!("expected `{c}`, found {found}")))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        while let Some(op @ ('+' | '-')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.term()?;
            lhs = if op == '+' {
                Expr::add(lhs, rhs)
            } else {
                Expr::sub(lhs, rhs)
            };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while let Some(op @ ('*' | '/')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = if op == '*' {
                Expr::mul(lhs, rhs)
            } else {
                Expr::div(lhs, rhs)
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        match self.peek_op() {
            Some('-') => {
                self.pos += 1;
                Ok(Expr::neg(self.unary()?))
            }
            Some('+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.peek_op() != Some('^') {
            return Ok(base);
        }
        self.pos += 1;
        let parens = self.peek_op() == Some('(');
        if parens {
            self.pos += 1;
        }
        let negative = match self.peek_op() {
            Some('-') => {
                self.pos += 1;
                true
            }
            Some('+') => {
                self.pos += 1;
                false
            }
            _ => false,
        };
        let k: i32 = match self.tokens.get(self.pos) {
            Some(Token::Num(s)) => s
                .parse()
                .map_err(|_| self.error(format!("exponent `{s}` is not an integer")))?,
            _ => return Err(self.error("expected an integer exponent after `^`".into())),
        };
        self.pos += 1;
        if parens {
            self.expect_op(')')?;
        }
        Ok(Expr::pow(base, if negative { -k } else { k }))
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let tok = self
            .tokens
            .get(self.pos)
            .cloned()
            .ok_or_else(|| self.error("unexpected end of expression".into()))?;
        self.pos += 1;
        match tok {
            Token::Num(s) => literal(&s).map_err(|m| self.error(m)),
            Token::Op('(') => {
                let e = self.expr()?;
                self.expect_op(')')?;
                Ok(e)
            }
            Token::Op(c) => Err(self.error(format!("unexpected `{c}`"))),
            Token::Ident(name) => {
                if self.peek_op() == Some('(') {
                    let f = match name.as_str() {
                        "sin" => Expr::sin,
                        "cos" => Expr::cos,
                        "exp" => Expr::exp,
                        _ => return Err(ParseError::UnknownFunction(name)),
                    };
                    self.pos += 1;
                    let arg = self.expr()?;
                    self.expect_op(')')?;
                    return Ok(f(arg));
                }
                match self.vars.iter().position(|v| *v == name) {
                    Some(i) => Ok(Expr::var(i)),
                    None if matches!(name.as_str(), "sin" | "cos" | "exp") => {
                        Err(self.error(format!("`{name}` needs a parenthesized argument")))
                    }
                    None => Err(ParseError::UnknownVariable(name)),
                }
            }
        }
    }
}

/// A numeric literal: exact dyadic constant, or an exact quotient of
/// integers when the decimal has no finite binary expansion.
fn literal(s: &str) -> Result<Expr, String> {
    if s.starts_with("0x") {
        return Dyadic::parse_hex(s).map(Expr::Const).map_err(|e| e.to_string());
    }
    let (num, scale) = Dyadic::parse_decimal_rational(s).map_err(|e| e.to_string())?;
    let den = num_traits::pow(BigInt::from(10), scale as usize);
    let g = num.gcd(&den);
    let (num, den) = if g.is_zero() {
        (num, den)
    } else {
        (&num / &g, &den / &g)
    };
    let den_dyadic = Dyadic::from_bigint(den.clone());
    if den_dyadic.mantissa() == &BigInt::from(1) {
        // denominator is a power of two
        return Ok(Expr::Const(Dyadic::new(num, -den_dyadic.exponent())));
    }
    Ok(Expr::Div(
        Box::new(Expr::Const(Dyadic::from_bigint(num))),
        Box::new(Expr::Const(den_dyadic)),
    ))
}
