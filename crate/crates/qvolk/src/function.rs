//! A closed expression language for uniformly differentiable test functions.
//!
//! Trees evaluate exactly at integer points into any sufficiently large
//! cyclotomic ring, and differentiate symbolically (the derivative of a tree
//! is another tree, so f'(a) is exact ring arithmetic too).

use num_rational::Ratio;
use num_traits::Zero;

use crate::cyclotomic::{Character, CycloElement, CycloRing};
use crate::error::{Error, Result};
use crate::padic::{PadicScalar, PrimeContext, QConfig, ValBound};

#[derive(Clone, Debug)]
pub enum UDFunction {
    /// A fixed ring element (rationals land in the level-0 ring).
    Const(CycloElement),
    /// x
    Identity,
    /// x^k
    Power(u32),
    /// [x; q] = (1 - q^x)/(1 - q)
    QBracket,
    /// e^(t x) with v(t) >= 1, evaluated as (exp t)^x
    ExpT(PadicScalar),
    /// q^(t x) with v(t) >= 0
    QExpT(PadicScalar),
    /// phi_w(x) = w^x
    Char(Character),
    Sum(Box<UDFunction>, Box<UDFunction>),
    Product(Box<UDFunction>, Box<UDFunction>),
    Scale(PadicScalar, Box<UDFunction>),
    /// f(x + a)
    Shift(Box<UDFunction>, i64),
    /// x -> f(z - x)
    Reflect(Box<UDFunction>, i64),
}

impl UDFunction {
    pub fn constant_rational(num: i64, den: i64, ctx: &PrimeContext) -> Result<Self> {
        let ring0 = CycloRing::new(ctx, 0);
        let s = PadicScalar::from_rational(num, den, ctx)?;
        Ok(UDFunction::Const(CycloElement::from_scalar(&ring0, s)))
    }

    pub fn one(ctx: &PrimeContext) -> Self {
        Self::constant_rational(1, 1, ctx).unwrap()
    }

    pub fn zero(ctx: &PrimeContext) -> Self {
        Self::constant_rational(0, 1, ctx).unwrap()
    }

    /// e^(t x); t must lie in the convergence disk of exp.
    pub fn exp_t(t: PadicScalar) -> Result<Self> {
        match t.val_bound() {
            ValBound::Infinite => {}
            ValBound::Finite(v) if v >= Ratio::from_integer(1) => {}
            ValBound::AtLeast(v) if v >= Ratio::from_integer(1) => {}
            b => {
                let v = b.lower().map(|r| *r.numer());
                return Err(Error::OutsideDisk(v, 1));
            }
        }
        Ok(UDFunction::ExpT(t))
    }

    /// q^(t x); needs v(t) >= 0 so that t log q stays in the disk.
    pub fn q_exp_t(t: PadicScalar) -> Result<Self> {
        match t.val_bound() {
            ValBound::Infinite => {}
            ValBound::Finite(v) | ValBound::AtLeast(v) if v >= Ratio::zero() => {}
            b => {
                let v = b.lower().map(|r| *r.numer());
                return Err(Error::OutsideDisk(v, 0));
            }
        }
        Ok(UDFunction::QExpT(t))
    }

    pub fn character(w: Character) -> Self {
        UDFunction::Char(w)
    }

    pub fn sum(a: UDFunction, b: UDFunction) -> Self {
        UDFunction::Sum(Box::new(a), Box::new(b))
    }

    pub fn product(a: UDFunction, b: UDFunction) -> Self {
        UDFunction::Product(Box::new(a), Box::new(b))
    }

    pub fn scale(c: PadicScalar, f: UDFunction) -> Self {
        UDFunction::Scale(c, Box::new(f))
    }

    pub fn shift(f: UDFunction, a: i64) -> Self {
        UDFunction::Shift(Box::new(f), a)
    }

    pub fn reflect(f: UDFunction, z: i64) -> Self {
        UDFunction::Reflect(Box::new(f), z)
    }

    /// Largest character level appearing in the tree.
    pub fn max_char_level(&self) -> u32 {
        match self {
            UDFunction::Char(w) => w.level(),
            UDFunction::Const(c) => c.ring().level(),
            UDFunction::Sum(a, b) | UDFunction::Product(a, b) => {
                a.max_char_level().max(b.max_char_level())
            }
            UDFunction::Scale(_, f)
            | UDFunction::Shift(f, _)
            | UDFunction::Reflect(f, _) => f.max_char_level(),
            _ => 0,
        }
    }

    /// The symbolic derivative as a new tree.
    ///
    /// (x^k)' = k x^(k-1), (e^(tx))' = t e^(tx), (q^(tx))' = t log q q^(tx),
    /// [x]' = (log q / (q-1)) q^x, characters and constants vanish, and the
    /// chain rule flips the sign under reflection.
    pub fn derivative(&self, q: &QConfig) -> Result<UDFunction> {
        let ctx = q.ctx();
        Ok(match self {
            UDFunction::Const(_) | UDFunction::Char(_) => UDFunction::zero(ctx),
            UDFunction::Identity => UDFunction::one(ctx),
            UDFunction::Power(k) => match k {
                0 => UDFunction::zero(ctx),
                1 => UDFunction::one(ctx),
                2 => UDFunction::scale(
                    PadicScalar::from_integer(2, ctx),
                    UDFunction::Identity,
                ),
                k => UDFunction::scale(
                    PadicScalar::from_integer(*k as i64, ctx),
                    UDFunction::Power(k - 1),
                ),
            },
            UDFunction::QBracket => {
                // d/dx (1 - q^x)/(1 - q) = (log q / (q - 1)) q^x
                let c = q.a_scalar().inv()?;
                UDFunction::scale(
                    c,
                    UDFunction::QExpT(PadicScalar::from_integer(1, ctx)),
                )
            }
            UDFunction::ExpT(t) => UDFunction::scale(t.clone(), UDFunction::ExpT(t.clone())),
            UDFunction::QExpT(t) => UDFunction::scale(
                t.mul(q.log_q())?,
                UDFunction::QExpT(t.clone()),
            ),
            UDFunction::Sum(a, b) => UDFunction::sum(a.derivative(q)?, b.derivative(q)?),
            UDFunction::Product(a, b) => UDFunction::sum(
                UDFunction::product(a.derivative(q)?, (**b).clone()),
                UDFunction::product((**a).clone(), b.derivative(q)?),
            ),
            UDFunction::Scale(c, f) => UDFunction::scale(c.clone(), f.derivative(q)?),
            UDFunction::Shift(f, a) => UDFunction::shift(f.derivative(q)?, *a),
            UDFunction::Reflect(f, z) => UDFunction::scale(
                PadicScalar::from_integer(-1, ctx),
                UDFunction::reflect(f.derivative(q)?, *z),
            ),
        })
    }

    /// f'(0) as exact ring arithmetic.
    pub fn derivative_at_zero(&self, q: &QConfig, ring: &CycloRing) -> Result<CycloElement> {
        let d = self.derivative(q)?;
        Evaluator::new(ring, q).eval(&d, 0)
    }
}

/// Evaluation context: target ring, q-configuration, and the optional
/// residue-system modulus that an enclosing Riemann sum imposes on
/// reflected arguments.
pub struct Evaluator<'a> {
    ring: &'a CycloRing,
    q: &'a QConfig,
    modulus: Option<i64>,
}

impl<'a> Evaluator<'a> {
    pub fn new(ring: &'a CycloRing, q: &'a QConfig) -> Self {
        Evaluator {
            ring,
            q,
            modulus: None,
        }
    }

    /// Arguments produced by Reflect are reduced into [0, modulus).
    pub fn with_modulus(ring: &'a CycloRing, q: &'a QConfig, modulus: i64) -> Self {
        Evaluator {
            ring,
            q,
            modulus: Some(modulus),
        }
    }

    pub fn eval(&self, f: &UDFunction, x: i64) -> Result<CycloElement> {
        let ctx = self.ring.ctx();
        match f {
            UDFunction::Const(c) => c.embed_into(self.ring),
            UDFunction::Identity => Ok(CycloElement::from_scalar(
                self.ring,
                PadicScalar::from_integer(x, ctx),
            )),
            UDFunction::Power(k) => {
                let v = num_bigint::BigInt::from(x).pow(*k);
                Ok(CycloElement::from_scalar(
                    self.ring,
                    PadicScalar::from_bigint(&v, ctx),
                ))
            }
            UDFunction::QBracket => Ok(CycloElement::from_scalar(
                self.ring,
                self.q.q_bracket_fast(x)?,
            )),
            UDFunction::ExpT(t) => {
                let base = t.exp()?;
                Ok(CycloElement::from_scalar(self.ring, base.pow_int(x)?))
            }
            UDFunction::QExpT(t) => {
                let base = self.q.pow_scalar(t)?;
                Ok(CycloElement::from_scalar(self.ring, base.pow_int(x)?))
            }
            UDFunction::Char(w) => w.eval_at(self.ring, x),
            UDFunction::Sum(a, b) => self.eval(a, x)?.add(&self.eval(b, x)?),
            UDFunction::Product(a, b) => self.eval(a, x)?.mul(&self.eval(b, x)?),
            UDFunction::Scale(c, g) => self.eval(g, x)?.mul_scalar(c),
            UDFunction::Shift(g, a) => self.eval(g, x + a),
            UDFunction::Reflect(g, z) => {
                let mut arg = z - x;
                if let Some(m) = self.modulus {
                    arg = arg.rem_euclid(m);
                }
                self.eval(g, arg)
            }
        }
    }
}

/// Evaluate f at an integer point in the given ring.
pub fn eval_fn(f: &UDFunction, x: i64, ring: &CycloRing, q: &QConfig) -> Result<CycloElement> {
    if f.max_char_level() > ring.level() {
        return Err(Error::CharLevelExceedsRing(f.max_char_level(), ring.level()));
    }
    Evaluator::new(ring, q).eval(f, x)
}

/// Environment for the DSL parser: which prime, which q, which character level.
#[derive(Clone, Debug)]
pub struct ParseEnv {
    pub ctx: PrimeContext,
    pub q: QConfig,
    pub level: u32,
}

/// Parse DSL source:
///
/// ```text
/// expr   := term (('+'|'-') term)*
/// term   := factor ('*' factor)*
/// factor := atom ('^' nat)?
/// atom   := 'x' | 'qbr' | rational | 'exp(' rational ')' | 'qexp(' rational ')'
///         | 'chi(' nat ')' | 'shift(' expr ',' int ')' | '(' expr ')'
/// ```
pub fn parse_fn(src: &str, env: &ParseEnv) -> Result<UDFunction> {
    let mut p = Parser {
        src: src.as_bytes(),
        pos: 0,
        env,
    };
    p.skip_ws();
    let f = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("trailing input"));
    }
    Ok(f)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    env: &'a ParseEnv,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
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

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(&format!("expected '{}'", c as char)))
        }
    }

    fn expr(&mut self) -> Result<UDFunction> {
        let mut acc = self.term()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    self.skip_ws();
                    let rhs = self.term()?;
                    acc = UDFunction::sum(acc, rhs);
                }
                Some(b'-') => {
                    self.pos += 1;
                    self.skip_ws();
                    let rhs = self.term()?;
                    acc = UDFunction::sum(
                        acc,
                        UDFunction::scale(
                            PadicScalar::from_integer(-1, &self.env.ctx),
                            rhs,
                        ),
                    );
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<UDFunction> {
        let mut acc = self.factor()?;
        loop {
            self.skip_ws();
            if self.eat(b'*') {
                self.skip_ws();
                let rhs = self.factor()?;
                acc = UDFunction::product(acc, rhs);
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<UDFunction> {
        let atom = self.atom()?;
        self.skip_ws();
        if self.eat(b'^') {
            self.skip_ws();
            let k = self.nat()?;
            if k > 64 {
                return Err(self.err("exponent too large (max 64)"));
            }
            // x^k collapses to the dedicated node; other bases expand.
            if matches!(atom, UDFunction::Identity) {
                return Ok(UDFunction::Power(k as u32));
            }
            if k == 0 {
                return Ok(UDFunction::one(&self.env.ctx));
            }
            let mut acc = atom.clone();
            for _ in 1..k {
                acc = UDFunction::product(acc, atom.clone());
            }
            return Ok(acc);
        }
        Ok(atom)
    }

    fn atom(&mut self) -> Result<UDFunction> {
        self.skip_ws();
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.skip_ws();
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self
                    .peek()
                    .map(|c| c.is_ascii_alphabetic())
                    .unwrap_or(false)
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                match name {
                    "x" => Ok(UDFunction::Identity),
                    "qbr" => Ok(UDFunction::QBracket),
                    "exp" => {
                        self.expect(b'(')?;
                        let (num, den) = self.rational_pair()?;
                        self.skip_ws();
                        self.expect(b')')?;
                        let t = PadicScalar::from_rational(num, den, &self.env.ctx)?;
                        UDFunction::exp_t(t).map_err(|_| Error::Parse {
                            pos: start,
                            msg: "exp parameter outside the convergence disk (need v(t) >= 1)"
                                .into(),
                        })
                    }
                    "qexp" => {
                        self.expect(b'(')?;
                        let (num, den) = self.rational_pair()?;
                        self.skip_ws();
                        self.expect(b')')?;
                        let t = PadicScalar::from_rational(num, den, &self.env.ctx)?;
                        UDFunction::q_exp_t(t).map_err(|_| Error::Parse {
                            pos: start,
                            msg: "qexp parameter must have v(t) >= 0".into(),
                        })
                    }
                    "chi" => {
                        self.expect(b'(')?;
                        self.skip_ws();
                        let k = self.nat()?;
                        self.skip_ws();
                        self.expect(b')')?;
                        Ok(UDFunction::Char(Character::new(
                            self.env.level,
                            k,
                            self.env.ctx.prime(),
                        )))
                    }
                    "shift" => {
                        self.expect(b'(')?;
                        let inner = self.expr()?;
                        self.skip_ws();
                        self.expect(b',')?;
                        self.skip_ws();
                        let a = self.int()?;
                        self.skip_ws();
                        self.expect(b')')?;
                        Ok(UDFunction::shift(inner, a))
                    }
                    other => Err(Error::Parse {
                        pos: start,
                        msg: format!("unknown identifier '{other}'"),
                    }),
                }
            }
            Some(c) if c.is_ascii_digit() || c == b'-' => {
                let (num, den) = self.rational_pair()?;
                UDFunction::constant_rational(num, den, &self.env.ctx)
            }
            _ => Err(self.err("expected an atom")),
        }
    }

    fn nat(&mut self) -> Result<u64> {
        let start = self.pos;
        while self.peek().map(|c| c.is_ascii_digit()).unwrap_or(false) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a number"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| self.err("number out of range"))
    }

    fn int(&mut self) -> Result<i64> {
        let neg = self.eat(b'-');
        let n = self.nat()? as i64;
        Ok(if neg { -n } else { n })
    }

    fn rational_pair(&mut self) -> Result<(i64, i64)> {
        self.skip_ws();
        let num = self.int()?;
        if self.eat(b'/') {
            let den = self.int()?;
            if den == 0 {
                return Err(self.err("zero denominator"));
            }
            Ok((num, den))
        } else {
            Ok((num, 1))
        }
    }
}
