//! Expression interpreter for functions of `x`.
//!
//! Grammar, lowest precedence first:
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' unary)?
//! atom  := number | 'x' | 'pi' | 'e' | ident '(' expr ')' | '(' expr ')'
//! ```
//!
//! `^` is right-associative and binds tighter than unary minus, so `-2^2`
//! is `-4`. There is no implicit multiplication: `2x` is rejected.
//! Positions in errors and tokens are character offsets into the input.

use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("unexpected character {found:?} at position {position}")]
    Lex { position: usize, found: char },
    #[error("number at position {position} is out of range")]
    NumberRange { position: usize },
    #[error("expected {expected} at position {position}")]
    Parse { position: usize, expected: String },
    #[error("unknown function `{name}` at position {position}")]
    UnknownFunction { name: String, position: usize },
}

impl ExprError {
    pub fn position(&self) -> usize {
        match self {
            ExprError::Lex { position, .. }
            | ExprError::NumberRange { position }
            | ExprError::Parse { position, .. }
            | ExprError::UnknownFunction { position, .. } => *position,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }

    fn apply(self, l: f64, r: f64) -> f64 {
        match self {
            BinOp::Add => l + r,
            BinOp::Sub => l - r,
            BinOp::Mul => l * r,
            BinOp::Div => l / r,
            BinOp::Pow => l.powf(r),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TokenKind {
    Number(f64),
    Ident(String),
    Op(BinOp),
    LParen,
    RParen,
    Comma,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub lexeme: String,
    pub position: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Constant {
    Pi,
    E,
}

impl Constant {
    pub fn value(self) -> f64 {
        match self {
            Constant::Pi => std::f64::consts::PI,
            Constant::E => std::f64::consts::E,
        }
    }
}

/// Built-in functions; every one takes a single argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Function {
    Sin,
    Cos,
    Tan,
    Exp,
    Ln,
    Log10,
    Sqrt,
    Abs,
}

impl Function {
    pub const ALL: [Function; 8] = [
        Function::Sin,
        Function::Cos,
        Function::Tan,
        Function::Exp,
        Function::Ln,
        Function::Log10,
        Function::Sqrt,
        Function::Abs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Function::Sin => "sin",
            Function::Cos => "cos",
            Function::Tan => "tan",
            Function::Exp => "exp",
            Function::Ln => "ln",
            Function::Log10 => "log10",
            Function::Sqrt => "sqrt",
            Function::Abs => "abs",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.name() == name)
    }

    fn apply(self, v: f64) -> f64 {
        match self {
            Function::Sin => v.sin(),
            Function::Cos => v.cos(),
            Function::Tan => v.tan(),
            Function::Exp => v.exp(),
            Function::Ln => v.ln(),
            Function::Log10 => v.log10(),
            Function::Sqrt => v.sqrt(),
            Function::Abs => v.abs(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprAst {
    Number(f64),
    Variable,
    Constant(Constant),
    Neg(Box<ExprAst>),
    Binary(BinOp, Box<ExprAst>, Box<ExprAst>),
    Call(Function, Box<ExprAst>),
}

impl ExprAst {
    pub fn binary(op: BinOp, l: ExprAst, r: ExprAst) -> Self {
        ExprAst::Binary(op, Box::new(l), Box::new(r))
    }
}

/// Fully parenthesized rendering; reparses to the same tree.
impl fmt::Display for ExprAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExprAst::Number(v) => write!(f, "{v:?}"),
            ExprAst::Variable => f.write_str("x"),
            ExprAst::Constant(Constant::Pi) => f.write_str("pi"),
            ExprAst::Constant(Constant::E) => f.write_str("e"),
            ExprAst::Neg(inner) => write!(f, "(-{inner})"),
            ExprAst::Binary(op, l, r) => write!(f, "({l} {} {r})", op.symbol()),
            ExprAst::Call(func, arg) => write!(f, "{}({arg})", func.name()),
        }
    }
}

pub fn tokenize(text: &str) -> Result<Vec<Token>, ExprError> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        let simple = match c {
            '+' => Some(TokenKind::Op(BinOp::Add)),
            '-' | '\u{2212}' => Some(TokenKind::Op(BinOp::Sub)),
            '*' => Some(TokenKind::Op(BinOp::Mul)),
            '/' => Some(TokenKind::Op(BinOp::Div)),
            '^' => Some(TokenKind::Op(BinOp::Pow)),
            '(' => Some(TokenKind::LParen),
            ')' => Some(TokenKind::RParen),
            ',' => Some(TokenKind::Comma),
            _ => None,
        };
        if let Some(kind) = simple {
            tokens.push(Token {
                kind,
                lexeme: c.to_string(),
                position: start,
            });
            i += 1;
        } else if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(char::is_ascii_digit)) {
            i = scan_number(&chars, i);
            let lexeme: String = chars[start..i].iter().collect();
            let value: f64 = lexeme
                .parse()
                .map_err(|_| ExprError::Lex { position: start, found: c })?;
            if !value.is_finite() {
                return Err(ExprError::NumberRange { position: start });
            }
            tokens.push(Token {
                kind: TokenKind::Number(value),
                lexeme,
                position: start,
            });
        } else if c.is_ascii_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let lexeme: String = chars[start..i].iter().collect();
            tokens.push(Token {
                kind: TokenKind::Ident(lexeme.clone()),
                lexeme,
                position: start,
            });
        } else {
            return Err(ExprError::Lex { position: start, found: c });
        }
    }
    Ok(tokens)
}

/// Longest decimal literal starting at `i`: digits, optional fraction,
/// optional exponent (only taken when digits follow it).
fn scan_number(chars: &[char], mut i: usize) -> usize {
    let digits = |mut j: usize| {
        while j < chars.len() && chars[j].is_ascii_digit() {
            j += 1;
        }
        j
    };
    i = digits(i);
    if chars.get(i) == Some(&'.') {
        i = digits(i + 1);
    }
    if matches!(chars.get(i), Some('e' | 'E')) {
        let mut j = i + 1;
        if matches!(chars.get(j), Some('+' | '-')) {
            j += 1;
        }
        if chars.get(j).is_some_and(char::is_ascii_digit) {
            i = digits(j);
        }
    }
    i
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    end: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&'a Token> {
        self.tokens.get(self.pos)
    }

    fn position(&self) -> usize {
        self.peek().map_or(self.end, |t| t.position)
    }

    fn error(&self, expected: &str) -> ExprError {
        ExprError::Parse {
            position: self.position(),
            expected: expected.to_owned(),
        }
    }

    fn eat_op(&mut self, ops: &[BinOp]) -> Option<BinOp> {
        match self.peek().map(|t| &t.kind) {
            Some(TokenKind::Op(op)) if ops.contains(op) => {
                self.pos += 1;
                Some(*op)
            }
            _ => None,
        }
    }

    fn expect(&mut self, kind: &TokenKind, expected: &str) -> Result<(), ExprError> {
        match self.peek() {
            Some(t) if &t.kind == kind => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.error(expected)),
        }
    }

    fn expr(&mut self) -> Result<ExprAst, ExprError> {
        let mut node = self.term()?;
        while let Some(op) = self.eat_op(&[BinOp::Add, BinOp::Sub]) {
            node = ExprAst::binary(op, node, self.term()?);
        }
        Ok(node)
    }

    fn term(&mut self) -> Result<ExprAst, ExprError> {
        let mut node = self.unary()?;
        while let Some(op) = self.eat_op(&[BinOp::Mul, BinOp::Div]) {
            node = ExprAst::binary(op, node, self.unary()?);
        }
        Ok(node)
    }

    fn unary(&mut self) -> Result<ExprAst, ExprError> {
        if self.eat_op(&[BinOp::Sub]).is_some() {
            return Ok(ExprAst::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<ExprAst, ExprError> {
        let base = self.atom()?;
        if self.eat_op(&[BinOp::Pow]).is_some() {
            return Ok(ExprAst::binary(BinOp::Pow, base, self.unary()?));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<ExprAst, ExprError> {
        const EXPECTED: &str = "number, x, pi, e, function call or '('";
        let Some(token) = self.peek() else {
            return Err(self.error(EXPECTED));
        };
        match &token.kind {
            TokenKind::Number(v) => {
                self.pos += 1;
                Ok(ExprAst::Number(*v))
            }
            TokenKind::LParen => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(&TokenKind::RParen, "')'")?;
                Ok(inner)
            }
            TokenKind::Ident(name) => {
                self.pos += 1;
                let is_call = matches!(self.peek().map(|t| &t.kind), Some(TokenKind::LParen));
                match (name.as_str(), is_call) {
                    ("x", false) => Ok(ExprAst::Variable),
                    ("pi", false) => Ok(ExprAst::Constant(Constant::Pi)),
                    ("e", false) => Ok(ExprAst::Constant(Constant::E)),
                    (_, true) => {
                        let func = Function::from_name(name).ok_or_else(|| {
                            ExprError::UnknownFunction {
                                name: name.clone(),
                                position: token.position,
                            }
                        })?;
                        self.pos += 1;
                        let arg = self.expr()?;
                        self.expect(&TokenKind::RParen, "')'")?;
                        Ok(ExprAst::Call(func, Box::new(arg)))
                    }
                    (_, false) => {
                        self.pos -= 1;
                        if Function::from_name(name).is_some() {
                            self.pos += 1;
                            Err(self.error("'('"))
                        } else {
                            Err(self.error(EXPECTED))
                        }
                    }
                }
            }
            _ => Err(self.error(EXPECTED)),
        }
    }
}

/// Parses a token stream. `source_len` is the character length of the
/// original text, reported as the position of an unexpected end of input.
pub fn parse_tokens(tokens: &[Token], source_len: usize) -> Result<ExprAst, ExprError> {
    let mut parser = Parser {
        tokens,
        pos: 0,
        end: source_len,
    };
    let ast = parser.expr()?;
    if parser.peek().is_some() {
        return Err(parser.error("operator or end of input"));
    }
    Ok(ast)
}

pub fn parse(text: &str) -> Result<ExprAst, ExprError> {
    let tokens = tokenize(text)?;
    parse_tokens(&tokens, text.chars().count())
}

/// Evaluates with IEEE semantics; domain errors give NaN or infinities.
pub fn evaluate(ast: &ExprAst, x: f64) -> f64 {
    match ast {
        ExprAst::Number(v) => *v,
        ExprAst::Variable => x,
        ExprAst::Constant(c) => c.value(),
        ExprAst::Neg(inner) => -evaluate(inner, x),
        ExprAst::Binary(op, l, r) => op.apply(evaluate(l, x), evaluate(r, x)),
        ExprAst::Call(func, arg) => func.apply(evaluate(arg, x)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("sample range must satisfy x_min < x_max (both finite) with at least 2 samples")]
pub struct BadRange;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub x: f64,
    pub y: f64,
}

impl Sample {
    pub fn is_finite(&self) -> bool {
        self.y.is_finite()
    }
}

/// `n` evaluations at uniform steps from `x_min` to `x_max` inclusive.
pub fn sample_curve(ast: &ExprAst, x_min: f64, x_max: f64, n: usize) -> Result<Vec<Sample>, BadRange> {
    if !(x_min.is_finite() && x_max.is_finite() && x_min < x_max && n >= 2) {
        return Err(BadRange);
    }
    let step = (x_max - x_min) / (n - 1) as f64;
    Ok((0..n)
        .map(|i| {
            let x = if i == n - 1 { x_max } else { x_min + i as f64 * step };
            Sample {
                x,
                y: evaluate(ast, x),
            }
        })
        .collect())
}
