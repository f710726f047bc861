//! Expression language for the coefficient functions r, q and right-hand
//! sides f.
//!
//! Grammar (EBNF):
//!   expr := sum
//!   sum  := prod (('+'|'-') prod)*
//!   prod := pow (('*'|'/') pow)*
//!   pow  := atom ('^' pow)?
//!   atom := number | 'x' | '-' atom | '(' expr ')' | func '(' args ')'
//!         | 'piecewise' '(' (cmp ':' expr ',')+ 'else' ':' expr ')'
//!   cmp  := expr ('<'|'<='|'>'|'>=') expr
//!
//! Functions: abs, sin, cos, exp, log, sqrt (unary), pow, min, max (binary).
//! Piecewise guards evaluate top-down; the first true guard wins and the
//! trailing `else` branch is mandatory, so evaluation is total on the domain
//! of the sub-expressions.

use std::fmt;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryFn {
    Abs,
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryFn {
    Pow,
    Min,
    Max,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpOp {
    Lt,
    Le,
    Gt,
    Ge,
}

impl fmt::Display for CmpOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Guard {
    pub lhs: Arc<Node>,
    pub op: CmpOp,
    pub rhs: Arc<Node>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Number(f64),
    Var,
    Neg(Arc<Node>),
    Bin(BinOp, Arc<Node>, Arc<Node>),
    Call1(UnaryFn, Arc<Node>),
    Call2(BinaryFn, Arc<Node>, Arc<Node>),
    Piecewise {
        branches: Vec<(Guard, Arc<Node>)>,
        otherwise: Arc<Node>,
    },
}

/// A parsed, immutable expression. Cheap to clone and safe to share across
/// threads; evaluation is pure.
#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    root: Arc<Node>,
    text: String,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExprError {
    #[error("syntax error at column {col}: expected {}; found {found}", expected.join(", "))]
    Syntax {
        col: usize,
        expected: Vec<&'static str>,
        found: String,
    },
    #[error("unknown function '{name}' at column {col}")]
    UnknownFunction { name: String, col: usize },
    #[error("non-exhaustive piecewise at column {col}: a final 'else' branch is required")]
    NonExhaustivePiecewise { col: usize },
    #[error("domain error in '{node}': {reason} (x = {x})")]
    Domain { node: String, reason: String, x: f64 },
}

// ---------------------------------------------------------------------------
// Tokenizer

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    LParen,
    RParen,
    Comma,
    Colon,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Lt,
    Le,
    Gt,
    Ge,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(n) => format!("number {n}"),
            Tok::Ident(s) => format!("'{s}'"),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Comma => "','".into(),
            Tok::Colon => "':'".into(),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Slash => "'/'".into(),
            Tok::Caret => "'^'".into(),
            Tok::Lt => "'<'".into(),
            Tok::Le => "'<='".into(),
            Tok::Gt => "'>'".into(),
            Tok::Ge => "'>='".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

/// (token, 1-based starting column)
fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, ExprError> {
    let chars: Vec<char> = text.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0usize;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        match c {
            ' ' | '\t' | '\n' | '\r' => {
                i += 1;
            }
            '(' => {
                toks.push((Tok::LParen, col));
                i += 1;
            }
            ')' => {
                toks.push((Tok::RParen, col));
                i += 1;
            }
            ',' => {
                toks.push((Tok::Comma, col));
                i += 1;
            }
            ':' => {
                toks.push((Tok::Colon, col));
                i += 1;
            }
            '+' => {
                toks.push((Tok::Plus, col));
                i += 1;
            }
            '-' => {
                toks.push((Tok::Minus, col));
                i += 1;
            }
            '*' => {
                toks.push((Tok::Star, col));
                i += 1;
            }
            '/' => {
                toks.push((Tok::Slash, col));
                i += 1;
            }
            '^' => {
                toks.push((Tok::Caret, col));
                i += 1;
            }
            '<' => {
                if chars.get(i + 1) == Some(&'=') {
                    toks.push((Tok::Le, col));
                    i += 2;
                } else {
                    toks.push((Tok::Lt, col));
                    i += 1;
                }
            }
            '>' => {
                if chars.get(i + 1) == Some(&'=') {
                    toks.push((Tok::Ge, col));
                    i += 2;
                } else {
                    toks.push((Tok::Gt, col));
                    i += 1;
                }
            }
            '0'..='9' | '.' => {
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
                        i = j;
                        while i < chars.len() && chars[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let s: String = chars[start..i].iter().collect();
                let n: f64 = s.parse().map_err(|_| ExprError::Syntax {
                    col,
                    expected: vec!["number"],
                    found: format!("'{s}'"),
                })?;
                toks.push((Tok::Num(n), col));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                toks.push((Tok::Ident(s), col));
            }
            other => {
                return Err(ExprError::Syntax {
                    col,
                    expected: vec!["number", "'x'", "operator", "'('"],
                    found: format!("'{other}'"),
                });
            }
        }
    }
    // EOF carries the column of the end of the text, clamped into the text so
    // diagnostics point at the last meaningful position.
    toks.push((Tok::Eof, chars.len().max(1)));
    Ok(toks)
}

// ---------------------------------------------------------------------------
// Parser

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn col(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, expected: Vec<&'static str>) -> ExprError {
        ExprError::Syntax {
            col: self.col(),
            expected,
            found: self.peek().describe(),
        }
    }

    fn expect(&mut self, tok: Tok, what: &'static str) -> Result<(), ExprError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.err(vec![what]))
        }
    }

    fn sum(&mut self) -> Result<Arc<Node>, ExprError> {
        let mut lhs = self.prod()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => break,
            };
            self.bump();
            let rhs = self.prod()?;
            lhs = Arc::new(Node::Bin(op, lhs, rhs));
        }
        Ok(lhs)
    }

    fn prod(&mut self) -> Result<Arc<Node>, ExprError> {
        let mut lhs = self.pow()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => break,
            };
            self.bump();
            let rhs = self.pow()?;
            lhs = Arc::new(Node::Bin(op, lhs, rhs));
        }
        Ok(lhs)
    }

    fn pow(&mut self) -> Result<Arc<Node>, ExprError> {
        let base = self.atom()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            let exp = self.pow()?; // right-associative
            Ok(Arc::new(Node::Bin(BinOp::Pow, base, exp)))
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Arc<Node>, ExprError> {
        match self.peek().clone() {
            Tok::Num(n) => {
                self.bump();
                Ok(Arc::new(Node::Number(n)))
            }
            Tok::Minus => {
                self.bump();
                let inner = self.atom()?;
                // Fold a negated literal so format/parse round-trips to an
                // identical tree.
                if let Node::Number(n) = *inner {
                    Ok(Arc::new(Node::Number(-n)))
                } else {
                    Ok(Arc::new(Node::Neg(inner)))
                }
            }
            Tok::LParen => {
                self.bump();
                let e = self.sum()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(e)
            }
            Tok::Ident(name) => {
                let col = self.col();
                self.bump();
                match name.as_str() {
                    "x" => Ok(Arc::new(Node::Var)),
                    "piecewise" => self.piecewise(col),
                    "abs" => self.call1(UnaryFn::Abs),
                    "sin" => self.call1(UnaryFn::Sin),
                    "cos" => self.call1(UnaryFn::Cos),
                    "exp" => self.call1(UnaryFn::Exp),
                    "log" => self.call1(UnaryFn::Log),
                    "sqrt" => self.call1(UnaryFn::Sqrt),
                    "pow" => self.call2(BinaryFn::Pow),
                    "min" => self.call2(BinaryFn::Min),
                    "max" => self.call2(BinaryFn::Max),
                    _ => Err(ExprError::UnknownFunction { name, col }),
                }
            }
            _ => Err(self.err(vec!["number", "'x'", "'-'", "'('", "function"])),
        }
    }

    fn call1(&mut self, f: UnaryFn) -> Result<Arc<Node>, ExprError> {
        self.expect(Tok::LParen, "'('")?;
        let a = self.sum()?;
        self.expect(Tok::RParen, "')'")?;
        Ok(Arc::new(Node::Call1(f, a)))
    }

    fn call2(&mut self, f: BinaryFn) -> Result<Arc<Node>, ExprError> {
        self.expect(Tok::LParen, "'('")?;
        let a = self.sum()?;
        self.expect(Tok::Comma, "','")?;
        let b = self.sum()?;
        self.expect(Tok::RParen, "')'")?;
        Ok(Arc::new(Node::Call2(f, a, b)))
    }

    fn piecewise(&mut self, kw_col: usize) -> Result<Arc<Node>, ExprError> {
        self.expect(Tok::LParen, "'('")?;
        let mut branches = Vec::new();
        loop {
            if let Tok::Ident(id) = self.peek() {
                if id == "else" {
                    self.bump();
                    self.expect(Tok::Colon, "':'")?;
                    let otherwise = self.sum()?;
                    self.expect(Tok::RParen, "')'")?;
                    if branches.is_empty() {
                        return Err(self.err(vec!["guard before 'else'"]));
                    }
                    return Ok(Arc::new(Node::Piecewise {
                        branches,
                        otherwise,
                    }));
                }
            }
            if *self.peek() == Tok::RParen {
                // Ran out of branches without an else.
                return Err(ExprError::NonExhaustivePiecewise { col: kw_col });
            }
            let lhs = self.sum()?;
            let op = match self.peek() {
                Tok::Lt => CmpOp::Lt,
                Tok::Le => CmpOp::Le,
                Tok::Gt => CmpOp::Gt,
                Tok::Ge => CmpOp::Ge,
                _ => return Err(self.err(vec!["'<'", "'<='", "'>'", "'>='"])),
            };
            self.bump();
            let rhs = self.sum()?;
            self.expect(Tok::Colon, "':'")?;
            let value = self.sum()?;
            branches.push((Guard { lhs, op, rhs }, value));
            match self.peek() {
                Tok::Comma => {
                    self.bump();
                }
                Tok::RParen => return Err(ExprError::NonExhaustivePiecewise { col: kw_col }),
                _ => return Err(self.err(vec!["','", "'else'"])),
            }
        }
    }
}

/// Parse an expression in the coefficient grammar.
pub fn parse_expr(text: &str) -> Result<Expr, ExprError> {
    let toks = tokenize(text)?;
    let mut p = Parser { toks, pos: 0 };
    let root = p.sum()?;
    if *p.peek() != Tok::Eof {
        return Err(p.err(vec!["operator", "end of input"]));
    }
    Ok(Expr {
        root,
        text: text.to_string(),
    })
}

// ---------------------------------------------------------------------------
// Evaluation

fn eval_node(node: &Node, x: f64) -> Result<f64, ExprError> {
    let v = match node {
        Node::Number(n) => *n,
        Node::Var => x,
        Node::Neg(e) => -eval_node(e, x)?,
        Node::Bin(op, a, b) => {
            let (a, b) = (eval_node(a, x)?, eval_node(b, x)?);
            match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                BinOp::Div => {
                    if b == 0.0 {
                        return Err(domain(node, "division by zero", x));
                    }
                    a / b
                }
                BinOp::Pow => pow_checked(node, a, b, x)?,
            }
        }
        Node::Call1(f, e) => {
            let a = eval_node(e, x)?;
            match f {
                UnaryFn::Abs => a.abs(),
                UnaryFn::Sin => a.sin(),
                UnaryFn::Cos => a.cos(),
                UnaryFn::Exp => a.exp(),
                UnaryFn::Log => {
                    if a <= 0.0 {
                        return Err(domain(node, "log of non-positive value", x));
                    }
                    a.ln()
                }
                UnaryFn::Sqrt => {
                    if a < 0.0 {
                        return Err(domain(node, "sqrt of negative value", x));
                    }
                    a.sqrt()
                }
            }
        }
        Node::Call2(f, a, b) => {
            let (a, b) = (eval_node(a, x)?, eval_node(b, x)?);
            match f {
                BinaryFn::Pow => pow_checked(node, a, b, x)?,
                BinaryFn::Min => a.min(b),
                BinaryFn::Max => a.max(b),
            }
        }
        Node::Piecewise {
            branches,
            otherwise,
        } => {
            let mut chosen = None;
            for (guard, value) in branches {
                let l = eval_node(&guard.lhs, x)?;
                let r = eval_node(&guard.rhs, x)?;
                let hit = match guard.op {
                    CmpOp::Lt => l < r,
                    CmpOp::Le => l <= r,
                    CmpOp::Gt => l > r,
                    CmpOp::Ge => l >= r,
                };
                if hit {
                    chosen = Some(value);
                    break;
                }
            }
            let value = chosen.unwrap_or(otherwise);
            eval_node(value, x)?
        }
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(domain(node, "non-finite value", x))
    }
}

fn pow_checked(node: &Node, a: f64, b: f64, x: f64) -> Result<f64, ExprError> {
    if a < 0.0 && b.fract() != 0.0 {
        return Err(domain(node, "negative base with fractional exponent", x));
    }
    if a == 0.0 && b < 0.0 {
        return Err(domain(node, "zero base with negative exponent", x));
    }
    // Small integer exponents go through repeated multiplication; x^2 then
    // matches a hand-written x*x bit for bit.
    if b.fract() == 0.0 && b.abs() <= 64.0 {
        return Ok(a.powi(b as i32));
    }
    Ok(a.powf(b))
}

fn domain(node: &Node, reason: &str, x: f64) -> ExprError {
    ExprError::Domain {
        node: format_node(node),
        reason: reason.to_string(),
        x,
    }
}

// ---------------------------------------------------------------------------
// Formatting (canonical, fully parenthesized; reparses to an equal tree)

fn format_node(node: &Node) -> String {
    match node {
        Node::Number(n) => {
            if n.is_sign_negative() {
                format!("(-{})", -n)
            } else {
                format!("{n}")
            }
        }
        Node::Var => "x".to_string(),
        Node::Neg(e) => format!("(-{})", format_node(e)),
        Node::Bin(op, a, b) => {
            let sym = match op {
                BinOp::Add => "+",
                BinOp::Sub => "-",
                BinOp::Mul => "*",
                BinOp::Div => "/",
                BinOp::Pow => "^",
            };
            format!("({} {} {})", format_node(a), sym, format_node(b))
        }
        Node::Call1(f, a) => {
            let name = match f {
                UnaryFn::Abs => "abs",
                UnaryFn::Sin => "sin",
                UnaryFn::Cos => "cos",
                UnaryFn::Exp => "exp",
                UnaryFn::Log => "log",
                UnaryFn::Sqrt => "sqrt",
            };
            format!("{name}({})", format_node(a))
        }
        Node::Call2(f, a, b) => {
            let name = match f {
                BinaryFn::Pow => "pow",
                BinaryFn::Min => "min",
                BinaryFn::Max => "max",
            };
            format!("{name}({}, {})", format_node(a), format_node(b))
        }
        Node::Piecewise {
            branches,
            otherwise,
        } => {
            let mut s = String::from("piecewise(");
            for (g, v) in branches {
                s.push_str(&format!(
                    "{} {} {}: {}, ",
                    format_node(&g.lhs),
                    g.op,
                    format_node(&g.rhs),
                    format_node(v)
                ));
            }
            s.push_str(&format!("else: {})", format_node(otherwise)));
            s
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_node(&self.root))
    }
}

impl Expr {
    /// Evaluate at `x`. Pure; same text and x give bit-identical results.
    pub fn eval(&self, x: f64) -> Result<f64, ExprError> {
        eval_node(&self.root, x)
    }

    /// The original source text.
    pub fn source(&self) -> &str {
        &self.text
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    /// True when the expression does not reference the variable.
    pub fn is_constant(&self) -> bool {
        fn walk(n: &Node) -> bool {
            match n {
                Node::Number(_) => true,
                Node::Var => false,
                Node::Neg(e) => walk(e),
                Node::Bin(_, a, b) => walk(a) && walk(b),
                Node::Call1(_, a) => walk(a),
                Node::Call2(_, a, b) => walk(a) && walk(b),
                Node::Piecewise {
                    branches,
                    otherwise,
                } => {
                    branches
                        .iter()
                        .all(|(g, v)| walk(&g.lhs) && walk(&g.rhs) && walk(v))
                        && walk(otherwise)
                }
            }
        }
        walk(&self.root)
    }

    /// Guard crossing points inside `[a, b]`: x-values where some piecewise
    /// guard changes truth value. Found by a sign scan of lhs-rhs plus
    /// bisection, so guards whose features are much finer than (b-a)/256 can
    /// be missed; adaptive quadrature does not rely on completeness here.
    pub fn guard_breakpoints(&self, a: f64, b: f64) -> Vec<f64> {
        let mut guards: Vec<&Guard> = Vec::new();
        fn collect<'a>(n: &'a Node, out: &mut Vec<&'a Guard>) {
            match n {
                Node::Neg(e) | Node::Call1(_, e) => collect(e, out),
                Node::Bin(_, l, r) | Node::Call2(_, l, r) => {
                    collect(l, out);
                    collect(r, out);
                }
                Node::Piecewise {
                    branches,
                    otherwise,
                } => {
                    for (g, v) in branches {
                        out.push(g);
                        collect(&g.lhs, out);
                        collect(&g.rhs, out);
                        collect(v, out);
                    }
                    collect(otherwise, out);
                }
                _ => {}
            }
        }
        collect(&self.root, &mut guards);
        if guards.is_empty() || !(a < b) {
            return Vec::new();
        }
        let mut out = Vec::new();
        const SCAN: usize = 256;
        for g in guards {
            let diff = |x: f64| -> Option<f64> {
                let l = eval_node(&g.lhs, x).ok()?;
                let r = eval_node(&g.rhs, x).ok()?;
                Some(l - r)
            };
            let mut prev: Option<(f64, f64)> = None;
            for k in 0..=SCAN {
                let x = a + (b - a) * k as f64 / SCAN as f64;
                let Some(d) = diff(x) else {
                    prev = None;
                    continue;
                };
                if let Some((px, pd)) = prev {
                    if (pd <= 0.0 && d > 0.0) || (pd >= 0.0 && d < 0.0) || (pd != 0.0 && d == 0.0)
                    {
                        let (mut lo, mut hi) = (px, x);
                        let (mut dlo, _) = (pd, d);
                        for _ in 0..80 {
                            let mid = 0.5 * (lo + hi);
                            match diff(mid) {
                                Some(dm) => {
                                    if (dlo <= 0.0) == (dm <= 0.0) {
                                        lo = mid;
                                        dlo = dm;
                                    } else {
                                        hi = mid;
                                    }
                                }
                                None => break,
                            }
                        }
                        out.push(0.5 * (lo + hi));
                    }
                }
                prev = Some((x, d));
            }
        }
        out.sort_by(|u, v| u.total_cmp(v));
        out.dedup_by(|u, v| (*u - *v).abs() <= 1e-12 * (1.0 + u.abs()));
        out
    }
}

// ---------------------------------------------------------------------------
// Coefficient pair and validation

/// Declared behavior of an improper tail integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DeclaredTail {
    Divergent,
    Convergent,
}

/// Optional per-side user assertions about the tails of 1/r and q.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct TailDeclarations {
    pub inv_r_left: Option<DeclaredTail>,
    pub inv_r_right: Option<DeclaredTail>,
    pub q_left: Option<DeclaredTail>,
    pub q_right: Option<DeclaredTail>,
}

/// The coefficient pair (r, q) with optional tail declarations.
#[derive(Debug, Clone)]
pub struct CoefficientPair {
    pub r: Expr,
    pub q: Expr,
    pub declarations: TailDeclarations,
    unit_r: bool,
}

impl CoefficientPair {
    pub fn new(r: Expr, q: Expr, declarations: TailDeclarations) -> Self {
        let unit_r = r.is_constant() && r.eval(0.0).map(|v| v == 1.0).unwrap_or(false);
        CoefficientPair {
            r,
            q,
            declarations,
            unit_r,
        }
    }

    pub fn from_texts(r: &str, q: &str) -> Result<Self, ExprError> {
        Ok(Self::new(
            parse_expr(r)?,
            parse_expr(q)?,
            TailDeclarations::default(),
        ))
    }

    /// True when r is the constant 1 (required by the m(a) criterion and the
    /// d-tilde scale).
    pub fn unit_r(&self) -> bool {
        self.unit_r
    }

    pub fn r_at(&self, x: f64) -> Result<f64, ExprError> {
        self.r.eval(x)
    }

    pub fn q_at(&self, x: f64) -> Result<f64, ExprError> {
        self.q.eval(x)
    }

    /// Guard breakpoints of both coefficients inside `[a, b]`.
    pub fn breakpoints(&self, a: f64, b: f64) -> Vec<f64> {
        let mut v = self.r.guard_breakpoints(a, b);
        v.extend(self.q.guard_breakpoints(a, b));
        v.sort_by(|u, w| u.total_cmp(w));
        v.dedup_by(|u, w| (*u - *w).abs() <= 1e-12 * (1.0 + u.abs()));
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    RNonPositive,
    QNegative,
    RNonFinite,
    QNonFinite,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct Violation {
    pub x: f64,
    pub kind: ViolationKind,
    /// Offending value, when one was produced.
    pub value: Option<f64>,
    pub detail: Option<String>,
}

/// Result of sampling the standing hypotheses r > 0, q >= 0 on a window.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ValidationReport {
    pub window: (f64, f64),
    pub n_samples: usize,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn hypotheses_hold(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Sample r > 0 and q >= 0 on `n_samples` uniform points of `[a, b]`.
/// Violations are data, not errors.
pub fn validate_coefficients(
    pair: &CoefficientPair,
    window: (f64, f64),
    n_samples: usize,
) -> ValidationReport {
    assert!(window.0 < window.1 && n_samples >= 2);
    let mut violations = Vec::new();
    for &x in &crate::util::linspace(window.0, window.1, n_samples) {
        match pair.r_at(x) {
            Ok(v) if v > 0.0 => {}
            Ok(v) => violations.push(Violation {
                x,
                kind: ViolationKind::RNonPositive,
                value: Some(v),
                detail: None,
            }),
            Err(e) => violations.push(Violation {
                x,
                kind: ViolationKind::RNonFinite,
                value: None,
                detail: Some(e.to_string()),
            }),
        }
        match pair.q_at(x) {
            Ok(v) if v >= 0.0 => {}
            Ok(v) => violations.push(Violation {
                x,
                kind: ViolationKind::QNegative,
                value: Some(v),
                detail: None,
            }),
            Err(e) => violations.push(Violation {
                x,
                kind: ViolationKind::QNonFinite,
                value: None,
                detail: Some(e.to_string()),
            }),
        }
    }
    ValidationReport {
        window,
        n_samples,
        violations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_plus_tree() {
        let e = parse_expr("1 + cos(abs(x)^2)").unwrap();
        match e.root() {
            Node::Bin(BinOp::Add, _, _) => {}
            other => panic!("expected binary plus at root, got {other:?}"),
        }
    }

    #[test]
    fn parses_piecewise_pair() {
        let r = parse_expr("piecewise(abs(x) <= 1: 1, else: x^2)").unwrap();
        assert_eq!(r.eval(0.5).unwrap(), 1.0);
        assert_eq!(r.eval(-3.0).unwrap(), 9.0);
        assert_eq!(r.eval(1.0).unwrap(), 1.0); // first matching guard wins
    }

    #[test]
    fn syntax_error_column() {
        let err = parse_expr("1 + (").unwrap_err();
        match err {
            ExprError::Syntax { col, .. } => assert_eq!(col, 5),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn unknown_function_reported() {
        let err = parse_expr("foo(x)").unwrap_err();
        match err {
            ExprError::UnknownFunction { name, col } => {
                assert_eq!(name, "foo");
                assert_eq!(col, 1);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn piecewise_without_else_is_rejected() {
        let err = parse_expr("piecewise(x < 0: 1)").unwrap_err();
        assert!(matches!(err, ExprError::NonExhaustivePiecewise { .. }));
    }

    #[test]
    fn eval_examples() {
        let e = parse_expr("1+cos(abs(x)^1)").unwrap();
        assert_eq!(e.eval(0.0).unwrap(), 2.0);

        let q = parse_expr("piecewise(abs(x) <= 1: 1, else: 1 / sqrt(abs(x)))").unwrap();
        assert!((q.eval(4.0).unwrap() - 0.5).abs() < 1e-15);

        let r = parse_expr("piecewise(abs(x) <= 1: 1, else: x^2)").unwrap();
        assert_eq!(r.eval(-3.0).unwrap(), 9.0);
    }

    #[test]
    fn domain_errors_name_the_node() {
        let e = parse_expr("sqrt(x)").unwrap();
        let err = e.eval(-1.0).unwrap_err();
        match err {
            ExprError::Domain { node, .. } => assert!(node.contains("sqrt")),
            other => panic!("unexpected {other:?}"),
        }
        let e = parse_expr("log(x)").unwrap();
        assert!(e.eval(0.0).is_err());
        let e = parse_expr("1/x").unwrap();
        assert!(e.eval(0.0).is_err());
    }

    #[test]
    fn pow_binds_tighter_than_product_and_is_right_assoc() {
        let e = parse_expr("2*x^3").unwrap();
        assert_eq!(e.eval(2.0).unwrap(), 16.0);
        let e = parse_expr("2^3^2").unwrap(); // 2^(3^2)
        assert_eq!(e.eval(0.0).unwrap(), 512.0);
    }

    #[test]
    fn unary_minus_is_an_atom() {
        // Per the grammar, -x^2 parses as (-x)^2.
        let e = parse_expr("-x^2").unwrap();
        assert_eq!(e.eval(3.0).unwrap(), 9.0);
        let e = parse_expr("-(x^2)").unwrap();
        assert_eq!(e.eval(3.0).unwrap(), -9.0);
    }

    #[test]
    fn validation_flags_sign_changes() {
        let pair = CoefficientPair::from_texts("x", "1").unwrap();
        let report = validate_coefficients(&pair, (-1.0, 1.0), 9);
        assert!(!report.hypotheses_hold());
        assert!(report
            .violations
            .iter()
            .all(|v| v.kind == ViolationKind::RNonPositive && v.x <= 0.0));

        let ok = CoefficientPair::from_texts("1", "1").unwrap();
        assert!(validate_coefficients(&ok, (-10.0, 10.0), 33).hypotheses_hold());
    }

    #[test]
    fn guard_breakpoints_found() {
        let r = parse_expr("piecewise(abs(x) <= 1: 1, else: x^2)").unwrap();
        let bps = r.guard_breakpoints(-5.0, 5.0);
        assert_eq!(bps.len(), 2);
        assert!((bps[0] + 1.0).abs() < 1e-9 && (bps[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn unit_r_detection() {
        assert!(CoefficientPair::from_texts("1", "x^2").unwrap().unit_r());
        assert!(!CoefficientPair::from_texts("2", "1").unwrap().unit_r());
        assert!(!CoefficientPair::from_texts("x", "1").unwrap().unit_r());
    }

    // -- round-trip property ------------------------------------------------

    fn arb_node(depth: u32) -> BoxedStrategy<Arc<Node>> {
        let leaf = prop_oneof![
            (-1.0e3..1.0e3f64).prop_map(|n| Arc::new(Node::Number(n))),
            Just(Arc::new(Node::Var)),
        ];
        leaf.prop_recursive(depth, 64, 4, |inner| {
            prop_oneof![
                (inner.clone()).prop_map(|e| {
                    if let Node::Number(n) = *e {
                        Arc::new(Node::Number(-n))
                    } else {
                        Arc::new(Node::Neg(e))
                    }
                }),
                (
                    prop_oneof![
                        Just(BinOp::Add),
                        Just(BinOp::Sub),
                        Just(BinOp::Mul),
                        Just(BinOp::Div),
                        Just(BinOp::Pow)
                    ],
                    inner.clone(),
                    inner.clone()
                )
                    .prop_map(|(op, a, b)| Arc::new(Node::Bin(op, a, b))),
                (
                    prop_oneof![
                        Just(UnaryFn::Abs),
                        Just(UnaryFn::Sin),
                        Just(UnaryFn::Cos),
                        Just(UnaryFn::Exp),
                        Just(UnaryFn::Log),
                        Just(UnaryFn::Sqrt)
                    ],
                    inner.clone()
                )
                    .prop_map(|(f, a)| Arc::new(Node::Call1(f, a))),
                (
                    prop_oneof![Just(BinaryFn::Pow), Just(BinaryFn::Min), Just(BinaryFn::Max)],
                    inner.clone(),
                    inner.clone()
                )
                    .prop_map(|(f, a, b)| Arc::new(Node::Call2(f, a, b))),
                (
                    inner.clone(),
                    prop_oneof![
                        Just(CmpOp::Lt),
                        Just(CmpOp::Le),
                        Just(CmpOp::Gt),
                        Just(CmpOp::Ge)
                    ],
                    inner.clone(),
                    inner.clone(),
                    inner
                )
                    .prop_map(|(l, op, r, v, e)| Arc::new(Node::Piecewise {
                        branches: vec![(Guard { lhs: l, op, rhs: r }, v)],
                        otherwise: e,
                    })),
            ]
        })
        .boxed()
    }

    proptest! {
        #[test]
        fn format_then_parse_is_identity(root in arb_node(5)) {
            let text = format_node(&root);
            let reparsed = parse_expr(&text).unwrap();
            prop_assert_eq!(reparsed.root(), &*root, "text: {}", text);
        }

        #[test]
        fn eval_is_deterministic(root in arb_node(4), x in -100.0..100.0f64) {
            let e1 = eval_node(&root, x);
            let e2 = eval_node(&root, x);
            match (e1, e2) {
                (Ok(a), Ok(b)) => prop_assert!(a.to_bits() == b.to_bits()),
                (Err(_), Err(_)) => {}
                other => prop_assert!(false, "nondeterministic: {:?}", other),
            }
        }
    }
}
