//! A small expression language for body coefficient functions: `sin(q1)*q2^2`, `exp(-q^2/2)`.
//!
//! Expressions evaluate at complex points and, through Grassmann continuation of every
//! elementary function, directly at even supernumber points. Differentiation is symbolic.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::grassmann::{Analytic, Supernumber, C64, I, ONE, ZERO};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
    Sinh,
    Cosh,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
        }
    }

    fn from_name(s: &str) -> Option<Func> {
        Some(match s {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "exp" => Func::Exp,
            "log" | "ln" => Func::Log,
            "sqrt" => Func::Sqrt,
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(C64),
    Var(usize),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Func(Func, Box<Expr>),
}

impl Expr {
    pub fn c(v: f64) -> Expr {
        Expr::Const(C64::new(v, 0.0))
    }

    pub fn ci(v: C64) -> Expr {
        Expr::Const(v)
    }

    pub fn var(i: usize) -> Expr {
        Expr::Var(i)
    }

    fn as_const(&self) -> Option<C64> {
        match self {
            Expr::Const(c) => Some(*c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_const() == Some(ZERO)
    }

    pub fn pow(self, e: Expr) -> Expr {
        match (self.as_const(), e.as_const()) {
            (_, Some(z)) if z == ZERO => Expr::c(1.0),
            (_, Some(o)) if o == ONE => self,
            (Some(a), Some(b)) => Expr::Const(a.powc(b)),
            _ => Expr::Pow(Box::new(self), Box::new(e)),
        }
    }

    pub fn powi(self, n: i32) -> Expr {
        self.pow(Expr::c(n as f64))
    }

    pub fn apply(self, f: Func) -> Expr {
        match self.as_const() {
            Some(c) => Expr::Const(eval_func_c(f, c)),
            None => Expr::Func(f, Box::new(self)),
        }
    }

    pub fn sin(self) -> Expr {
        self.apply(Func::Sin)
    }

    pub fn cos(self) -> Expr {
        self.apply(Func::Cos)
    }

    pub fn exp(self) -> Expr {
        self.apply(Func::Exp)
    }

    /// Largest variable index used plus one.
    pub fn arity(&self) -> usize {
        match self {
            Expr::Const(_) => 0,
            Expr::Var(i) => i + 1,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Pow(a, b) => a.arity().max(b.arity()),
            Expr::Neg(a) | Expr::Func(_, a) => a.arity(),
        }
    }

    /// Parse with variables `q1, q2, …` (and `q` for `q1`).
    pub fn parse(text: &str) -> Result<Expr> {
        let names: Vec<String> = (1..=16).map(|i| format!("q{i}")).collect();
        let mut refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        refs.push("q");
        let mut p = Parser { src: text.as_bytes(), pos: 0, vars: &refs };
        let e = p.parse_all()?;
        Ok(e.remap_alias(16, 0))
    }

    /// Parse with an explicit variable list; `vars[i]` becomes `Var(i)`.
    pub fn parse_with(text: &str, vars: &[&str]) -> Result<Expr> {
        let mut p = Parser { src: text.as_bytes(), pos: 0, vars };
        p.parse_all()
    }

    fn remap_alias(self, from: usize, to: usize) -> Expr {
        self.map_vars(&|i| if i == from { to } else { i })
    }

    fn map_vars(self, f: &dyn Fn(usize) -> usize) -> Expr {
        match self {
            Expr::Var(i) => Expr::Var(f(i)),
            Expr::Const(c) => Expr::Const(c),
            Expr::Add(a, b) => Expr::Add(Box::new(a.map_vars(f)), Box::new(b.map_vars(f))),
            Expr::Sub(a, b) => Expr::Sub(Box::new(a.map_vars(f)), Box::new(b.map_vars(f))),
            Expr::Mul(a, b) => Expr::Mul(Box::new(a.map_vars(f)), Box::new(b.map_vars(f))),
            Expr::Div(a, b) => Expr::Div(Box::new(a.map_vars(f)), Box::new(b.map_vars(f))),
            Expr::Pow(a, b) => Expr::Pow(Box::new(a.map_vars(f)), Box::new(b.map_vars(f))),
            Expr::Neg(a) => Expr::Neg(Box::new(a.map_vars(f))),
            Expr::Func(g, a) => Expr::Func(g, Box::new(a.map_vars(f))),
        }
    }

    /// Substitute expressions for variables.
    pub fn substitute(&self, images: &[Expr]) -> Expr {
        match self {
            Expr::Var(i) => images.get(*i).cloned().unwrap_or(Expr::Var(*i)),
            Expr::Const(c) => Expr::Const(*c),
            Expr::Add(a, b) => a.substitute(images) + b.substitute(images),
            Expr::Sub(a, b) => a.substitute(images) - b.substitute(images),
            Expr::Mul(a, b) => a.substitute(images) * b.substitute(images),
            Expr::Div(a, b) => a.substitute(images) / b.substitute(images),
            Expr::Pow(a, b) => a.substitute(images).pow(b.substitute(images)),
            Expr::Neg(a) => -a.substitute(images),
            Expr::Func(g, a) => a.substitute(images).apply(*g),
        }
    }

    /// Symbolic `∂/∂ Var(j)`.
    pub fn diff(&self, j: usize) -> Expr {
        match self {
            Expr::Const(_) => Expr::c(0.0),
            Expr::Var(i) => Expr::c(if *i == j { 1.0 } else { 0.0 }),
            Expr::Add(a, b) => a.diff(j) + b.diff(j),
            Expr::Sub(a, b) => a.diff(j) - b.diff(j),
            Expr::Mul(a, b) => a.diff(j) * (**b).clone() + (**a).clone() * b.diff(j),
            Expr::Div(a, b) => {
                (a.diff(j) * (**b).clone() - (**a).clone() * b.diff(j)) / (**b).clone().powi(2)
            }
            Expr::Neg(a) => -a.diff(j),
            Expr::Pow(a, b) => match b.as_const() {
                Some(c) => Expr::Const(c) * (**a).clone().pow(Expr::Const(c - 1.0)) * a.diff(j),
                None => {
                    let log_a = (**a).clone().apply(Func::Log);
                    self.clone() * (b.diff(j) * log_a + (**b).clone() * a.diff(j) / (**a).clone())
                }
            },
            Expr::Func(f, a) => {
                let u = (**a).clone();
                let outer = match f {
                    Func::Sin => u.cos(),
                    Func::Cos => -u.sin(),
                    Func::Tan => Expr::c(1.0) / u.cos().powi(2),
                    Func::Exp => u.exp(),
                    Func::Log => Expr::c(1.0) / u,
                    Func::Sqrt => Expr::c(0.5) / u.apply(Func::Sqrt),
                    Func::Sinh => u.apply(Func::Cosh),
                    Func::Cosh => u.apply(Func::Sinh),
                };
                outer * a.diff(j)
            }
        }
    }

    pub fn eval_c(&self, x: &[C64]) -> Result<C64> {
        Ok(match self {
            Expr::Const(c) => *c,
            Expr::Var(i) => *x.get(*i).ok_or_else(|| Error::ShapeMismatch(format!("variable {} of {}", i + 1, x.len())))?,
            Expr::Add(a, b) => a.eval_c(x)? + b.eval_c(x)?,
            Expr::Sub(a, b) => a.eval_c(x)? - b.eval_c(x)?,
            Expr::Mul(a, b) => a.eval_c(x)? * b.eval_c(x)?,
            Expr::Div(a, b) => {
                let d = b.eval_c(x)?;
                if d == ZERO {
                    return Err(Error::Domain("division by zero".into()));
                }
                a.eval_c(x)? / d
            }
            Expr::Neg(a) => -a.eval_c(x)?,
            Expr::Pow(a, b) => {
                let base = a.eval_c(x)?;
                let e = b.eval_c(x)?;
                if e.im == 0.0 && e.re.fract() == 0.0 && e.re.abs() < 1e9 {
                    if base == ZERO && e.re < 0.0 {
                        return Err(Error::Domain("zero to a negative power".into()));
                    }
                    base.powi(e.re as i32)
                } else {
                    base.powc(e)
                }
            }
            Expr::Func(f, a) => eval_func_c(*f, a.eval_c(x)?),
        })
    }

    pub fn eval_real(&self, q: &[f64]) -> Result<C64> {
        let x: Vec<C64> = q.iter().map(|&v| C64::new(v, 0.0)).collect();
        self.eval_c(&x)
    }

    /// Grassmann continuation: evaluate every operation inside Λ.
    pub fn eval_super(&self, x: &[Supernumber]) -> Result<Supernumber> {
        let l = x.iter().map(|v| v.num_generators()).max().unwrap_or(0);
        self.eval_super_l(x, l)
    }

    fn eval_super_l(&self, x: &[Supernumber], l: u32) -> Result<Supernumber> {
        Ok(match self {
            Expr::Const(c) => Supernumber::scalar(l, *c),
            Expr::Var(i) => x.get(*i).ok_or_else(|| Error::ShapeMismatch(format!("variable {} of {}", i + 1, x.len())))?.clone(),
            Expr::Add(a, b) => a.eval_super_l(x, l)? + b.eval_super_l(x, l)?,
            Expr::Sub(a, b) => a.eval_super_l(x, l)? - b.eval_super_l(x, l)?,
            Expr::Mul(a, b) => a.eval_super_l(x, l)? * b.eval_super_l(x, l)?,
            Expr::Div(a, b) => {
                let d = b.eval_super_l(x, l)?.inverse().map_err(|_| Error::Domain("division by a body-zero element".into()))?;
                a.eval_super_l(x, l)? * d
            }
            Expr::Neg(a) => -a.eval_super_l(x, l)?,
            Expr::Pow(a, b) => {
                let base = a.eval_super_l(x, l)?;
                match b.as_const() {
                    Some(e) if e.im == 0.0 && e.re.fract() == 0.0 && e.re.abs() < 1e9 => {
                        let n = e.re as i64;
                        if n >= 0 {
                            base.powi(n as u32)
                        } else {
                            base.inverse()?.powi((-n) as u32)
                        }
                    }
                    Some(e) => base.apply(&Analytic::Powc(e))?,
                    None => {
                        let lg = base.apply(&Analytic::LogPrincipal)?;
                        (b.eval_super_l(x, l)? * lg).exp()
                    }
                }
            }
            Expr::Func(f, a) => {
                let v = a.eval_super_l(x, l)?;
                match f {
                    Func::Sin => v.sin(),
                    Func::Cos => v.cos(),
                    Func::Tan => v.sin() * v.cos().inverse()?,
                    Func::Exp => v.exp(),
                    Func::Log => v.apply(&Analytic::LogPrincipal)?,
                    Func::Sqrt => v.apply(&Analytic::SqrtPrincipal)?,
                    Func::Sinh => v.apply(&Analytic::Sinh)?,
                    Func::Cosh => v.apply(&Analytic::Cosh)?,
                }
            }
        })
    }
}

fn eval_func_c(f: Func, z: C64) -> C64 {
    match f {
        Func::Sin => z.sin(),
        Func::Cos => z.cos(),
        Func::Tan => z.tan(),
        Func::Exp => z.exp(),
        Func::Log => z.ln(),
        Func::Sqrt => z.sqrt(),
        Func::Sinh => z.sinh(),
        Func::Cosh => z.cosh(),
    }
}

impl Add for Expr {
    type Output = Expr;
    fn add(self, o: Expr) -> Expr {
        match (self.as_const(), o.as_const()) {
            (Some(a), Some(b)) => Expr::Const(a + b),
            (Some(z), _) if z == ZERO => o,
            (_, Some(z)) if z == ZERO => self,
            _ => Expr::Add(Box::new(self), Box::new(o)),
        }
    }
}

impl Sub for Expr {
    type Output = Expr;
    fn sub(self, o: Expr) -> Expr {
        match (self.as_const(), o.as_const()) {
            (Some(a), Some(b)) => Expr::Const(a - b),
            (Some(z), _) if z == ZERO => -o,
            (_, Some(z)) if z == ZERO => self,
            _ => Expr::Sub(Box::new(self), Box::new(o)),
        }
    }
}

impl Mul for Expr {
    type Output = Expr;
    fn mul(self, o: Expr) -> Expr {
        match (self.as_const(), o.as_const()) {
            (Some(a), Some(b)) => Expr::Const(a * b),
            (Some(z), _) | (_, Some(z)) if z == ZERO => Expr::c(0.0),
            (Some(u), _) if u == ONE => o,
            (_, Some(u)) if u == ONE => self,
            _ => Expr::Mul(Box::new(self), Box::new(o)),
        }
    }
}

impl Div for Expr {
    type Output = Expr;
    fn div(self, o: Expr) -> Expr {
        match (self.as_const(), o.as_const()) {
            (Some(a), Some(b)) if b != ZERO => Expr::Const(a / b),
            (Some(z), _) if z == ZERO => Expr::c(0.0),
            (_, Some(u)) if u == ONE => self,
            _ => Expr::Div(Box::new(self), Box::new(o)),
        }
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        match self {
            Expr::Const(c) => Expr::Const(-c),
            Expr::Neg(a) => *a,
            other => Expr::Neg(Box::new(other)),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) if c.im == 0.0 => write!(f, "{}", c.re),
            Expr::Const(c) if c.re == 0.0 => write!(f, "{}*i", c.im),
            Expr::Const(c) => write!(f, "({}+{}*i)", c.re, c.im),
            Expr::Var(i) => write!(f, "q{}", i + 1),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "{a}*{b}"),
            Expr::Div(a, b) => write!(f, "{a}/({b})"),
            Expr::Neg(a) => write!(f, "-({a})"),
            Expr::Pow(a, b) => write!(f, "({a})^({b})"),
            Expr::Func(g, a) => write!(f, "{}({a})", g.name()),
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    vars: &'a [&'a str],
}

impl Parser<'_> {
    fn err<T>(&self, msg: &str) -> Result<T> {
        Err(Error::Parse(format!("{msg} at offset {}", self.pos)))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn parse_all(&mut self) -> Result<Expr> {
        let e = self.expr()?;
        if self.peek().is_some() {
            return self.err("unexpected trailing input");
        }
        Ok(e)
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat(b'-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat(b'*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat(b'/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat(b'-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat(b'+') {
            return self.unary();
        }
        let base = self.atom()?;
        if self.eat(b'^') {
            let e = self.unary()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(e)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return self.err("expected ')'");
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                if let Some(f) = Func::from_name(name) {
                    if !self.eat(b'(') {
                        return self.err("expected '(' after function name");
                    }
                    let arg = self.expr()?;
                    if !self.eat(b')') {
                        return self.err("expected ')'");
                    }
                    return Ok(Expr::Func(f, Box::new(arg)));
                }
                if let Some(i) = self.vars.iter().position(|v| *v == name) {
                    return Ok(Expr::Var(i));
                }
                match name {
                    "pi" => Ok(Expr::c(std::f64::consts::PI)),
                    "e" => Ok(Expr::c(std::f64::consts::E)),
                    "i" => Ok(Expr::Const(I)),
                    _ => Err(Error::Parse(format!("unknown identifier '{name}'"))),
                }
            }
            _ => self.err("expected a number, variable, function or '('"),
        }
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        let s = self.src;
        while self.pos < s.len() && (s[self.pos].is_ascii_digit() || s[self.pos] == b'.') {
            self.pos += 1;
        }
        if self.pos < s.len() && (s[self.pos] == b'e' || s[self.pos] == b'E') {
            let save = self.pos;
            self.pos += 1;
            if self.pos < s.len() && (s[self.pos] == b'+' || s[self.pos] == b'-') {
                self.pos += 1;
            }
            if self.pos < s.len() && s[self.pos].is_ascii_digit() {
                while self.pos < s.len() && s[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
            } else {
                self.pos = save;
            }
        }
        let text = std::str::from_utf8(&s[start..self.pos]).expect("ascii");
        text.parse::<f64>().map(Expr::c).map_err(|_| Error::Parse(format!("bad number '{text}'")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: C64, b: C64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn parses_and_evaluates() {
        let e = Expr::parse("sin(q1)*q2^2").unwrap();
        let v = e.eval_real(&[0.3, 2.0]).unwrap();
        assert!(close(v, C64::new(0.3f64.sin() * 4.0, 0.0)));
        let g = Expr::parse("exp(-q^2/2)").unwrap();
        assert!(close(g.eval_real(&[1.0]).unwrap(), C64::new((-0.5f64).exp(), 0.0)));
        let h = Expr::parse("2*i*q1 - 3e-1").unwrap();
        assert!(close(h.eval_real(&[1.0]).unwrap(), C64::new(-0.3, 2.0)));
        assert!(Expr::parse("foo(q1)").is_err());
        assert!(Expr::parse("q1 +").is_err());
        assert!(Expr::parse("(q1").is_err());
    }

    #[test]
    fn precedence() {
        let e = Expr::parse("-q1^2 + 2*3^2").unwrap();
        assert!(close(e.eval_real(&[3.0]).unwrap(), C64::new(9.0, 0.0)));
        let r = Expr::parse("2^3^2").unwrap();
        assert!(close(r.eval_real(&[]).unwrap(), C64::new(512.0, 0.0)));
    }

    #[test]
    fn symbolic_derivative_matches_finite_difference() {
        let e = Expr::parse("sin(q1)*q2^2 + exp(q1*q2)/(1+q2^2) + sqrt(q1+2) + log(q2+3)").unwrap();
        let p = [0.4, -0.7];
        for j in 0..2 {
            let d = e.diff(j).eval_real(&p).unwrap();
            let h = 1e-5;
            let mut pp = p;
            let mut pm = p;
            pp[j] += h;
            pm[j] -= h;
            let fd = (e.eval_real(&pp).unwrap() - e.eval_real(&pm).unwrap()) / (2.0 * h);
            assert!((d - fd).norm() < 1e-8, "j={j}: {d} vs {fd}");
        }
    }

    #[test]
    fn super_evaluation_matches_continuation() {
        // x^2 at 1 + σ1σ2 -> 1 + 2σ1σ2
        let x = Supernumber::one(2) + Supernumber::monomial(2, 0b11, ONE).unwrap();
        let sq = Expr::parse("q^2").unwrap().eval_super(&[x]).unwrap();
        let expected = Supernumber::one(2) + Supernumber::monomial(2, 0b11, 2.0).unwrap();
        assert!(sq.max_diff(&expected) < 1e-15);
        // sin at π/2 + σ1σ2 -> 1
        let y = Supernumber::scalar(2, std::f64::consts::FRAC_PI_2) + Supernumber::monomial(2, 0b11, ONE).unwrap();
        let s = Expr::parse("sin(q)").unwrap().eval_super(std::slice::from_ref(&y)).unwrap();
        assert!(s.max_diff(&y.sin()) < 1e-15);
        assert!(s.max_diff(&Supernumber::one(2)) < 1e-15);
    }
}
