//! Finite-precision arithmetic in Q_p.
//!
//! Values are tracked interval-style: a scalar is known modulo p^A for an
//! explicit absolute precision A, stored as a valuation plus a unit residue.
//! Every operation propagates precision; digits beyond A are never reported.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;

use crate::error::{Error, Result};

/// Sentinel precision for the exact zero (the only exactly-known value).
pub const PREC_EXACT: i64 = i64::MAX;

/// Precision carried by values that are exact but not representable as such
/// (e.g. exp of the exact zero). Wide enough never to be the binding
/// constraint, small enough that valuation + precision arithmetic cannot
/// overflow.
pub const PREC_WIDE: i64 = 1 << 40;

/// Prime and working precision shared by a whole computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeContext {
    p: u64,
    precision: u32,
}

fn is_odd_prime(p: u64) -> bool {
    if p < 3 || p % 2 == 0 {
        return false;
    }
    let mut d = 3;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

impl PrimeContext {
    /// p must be an odd prime (p = 2 has a different convergence disk for
    /// exp and is rejected), M at least 4.
    pub fn new(p: u64, precision: u32) -> Result<Self> {
        if !is_odd_prime(p) {
            return Err(Error::InvalidPrime(p));
        }
        if precision < 4 {
            return Err(Error::PrecisionTooSmall(precision, 4));
        }
        Ok(PrimeContext { p, precision })
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// Same prime, precision raised by `delta` digits.
    pub fn with_extra_precision(&self, delta: u32) -> Self {
        PrimeContext {
            p: self.p,
            precision: self.precision + delta,
        }
    }
}

pub(crate) fn p_pow(p: u64, e: i64) -> BigUint {
    debug_assert!(e >= 0);
    BigUint::from(p).pow(e as u32)
}

fn val_and_unit(mut x: BigUint, p: u64) -> (i64, BigUint) {
    debug_assert!(!x.is_zero());
    let pb = BigUint::from(p);
    let mut v = 0i64;
    loop {
        let (q, r) = x.div_rem(&pb);
        if r.is_zero() {
            v += 1;
            x = q;
        } else {
            break;
        }
    }
    (v, x)
}

fn bigint_val(x: &BigInt, p: u64) -> Option<i64> {
    if x.is_zero() {
        return None;
    }
    let (v, _) = val_and_unit(x.magnitude().clone(), p);
    Some(v)
}

fn mod_inverse(u: &BigUint, modulus: &BigUint) -> BigUint {
    let a = BigInt::from(u.clone());
    let m = BigInt::from(modulus.clone());
    let ext = a.extended_gcd(&m);
    debug_assert!(ext.gcd.is_one());
    let mut inv = ext.x % &m;
    if inv.is_negative() {
        inv += &m;
    }
    inv.to_biguint().unwrap()
}

/// Lower-bound information about a p-adic valuation.
///
/// `Finite` is an exactly determined valuation; `AtLeast` records that the
/// value vanished at the carried precision; `Infinite` is the exact zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ValBound {
    Finite(Ratio<i64>),
    AtLeast(Ratio<i64>),
    Infinite,
}

impl ValBound {
    pub fn finite_int(v: i64) -> Self {
        ValBound::Finite(Ratio::from_integer(v))
    }

    pub fn at_least_int(v: i64) -> Self {
        ValBound::AtLeast(Ratio::from_integer(v))
    }

    /// The guaranteed lower bound carried by this value.
    pub fn lower(&self) -> Option<Ratio<i64>> {
        match self {
            ValBound::Finite(v) | ValBound::AtLeast(v) => Some(*v),
            ValBound::Infinite => None,
        }
    }

    /// Does the valuation provably reach `min`?
    pub fn meets(&self, min: Ratio<i64>) -> bool {
        match self {
            ValBound::Finite(v) | ValBound::AtLeast(v) => *v >= min,
            ValBound::Infinite => true,
        }
    }

    pub fn meets_int(&self, min: i64) -> bool {
        self.meets(Ratio::from_integer(min))
    }

    /// Pointwise minimum (ultrametric combination of two bounds).
    pub fn min_with(&self, other: &ValBound) -> ValBound {
        match (self, other) {
            (ValBound::Infinite, x) | (x, ValBound::Infinite) => *x,
            (a, b) => {
                let (va, vb) = (a.lower().unwrap(), b.lower().unwrap());
                let exact = matches!(
                    (a, b),
                    (ValBound::Finite(_), ValBound::Finite(_))
                        | (ValBound::Finite(_), ValBound::AtLeast(_))
                ) && va <= vb
                    || matches!((a, b), (ValBound::AtLeast(_), ValBound::Finite(_))) && vb < va;
                let m = va.min(vb);
                if exact {
                    ValBound::Finite(m)
                } else {
                    ValBound::AtLeast(m)
                }
            }
        }
    }
}

impl fmt::Display for ValBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn ratio(r: &Ratio<i64>) -> String {
            if r.denom() == &1 {
                format!("{}", r.numer())
            } else {
                format!("{}/{}", r.numer(), r.denom())
            }
        }
        match self {
            ValBound::Finite(v) => write!(f, "{}", ratio(v)),
            ValBound::AtLeast(v) => write!(f, ">={}", ratio(v)),
            ValBound::Infinite => write!(f, "inf"),
        }
    }
}

/// An element of Q_p known modulo p^prec.
///
/// Nonzero values store `(v, unit)` with `unit` coprime to p, reduced
/// modulo p^(prec - v); `repr = None` means every known digit is zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PadicScalar {
    p: u64,
    prec: i64,
    repr: Option<(i64, BigUint)>,
}

impl PadicScalar {
    pub fn zero_exact(p: u64) -> Self {
        PadicScalar {
            p,
            prec: PREC_EXACT,
            repr: None,
        }
    }

    pub fn zero_at(p: u64, prec: i64) -> Self {
        PadicScalar {
            p,
            prec,
            repr: None,
        }
    }

    /// The unit 1 carried at absolute precision `prec`.
    pub fn one_at(p: u64, prec: i64) -> Self {
        debug_assert!(prec >= 1);
        PadicScalar {
            p,
            prec,
            repr: Some((0, BigUint::one())),
        }
    }

    /// Normalize `residue * p^v_base + O(p^prec)` into canonical form.
    fn from_parts(p: u64, prec: i64, v_base: i64, residue: BigInt) -> Self {
        let k = prec - v_base;
        if k <= 0 {
            // No digit of the residue survives below the precision cut.
            return PadicScalar::zero_at(p, prec);
        }
        let modulus = p_pow(p, k);
        let mut r = residue % BigInt::from(modulus.clone());
        if r.is_negative() {
            r += BigInt::from(modulus.clone());
        }
        let r = r.to_biguint().unwrap();
        if r.is_zero() {
            return PadicScalar::zero_at(p, prec);
        }
        let (e, unit_full) = val_and_unit(r, p);
        let v = v_base + e;
        let unit = unit_full % p_pow(p, prec - v);
        debug_assert!(!unit.is_zero());
        PadicScalar {
            p,
            prec,
            repr: Some((v, unit)),
        }
    }

    /// Exact rational `num/den`, carried at ctx precision: A = M + v(num/den).
    pub fn from_rational_big(num: &BigInt, den: &BigInt, ctx: &PrimeContext) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(PadicScalar::zero_exact(ctx.p));
        }
        let p = ctx.p;
        let vn = bigint_val(num, p).unwrap();
        let vd = bigint_val(den, p).unwrap();
        let v = vn - vd;
        let rel = ctx.precision as i64;
        let modulus = p_pow(p, rel);
        let nu = {
            let m = BigInt::from(modulus.clone());
            let shifted = num / BigInt::from(p_pow(p, vn));
            let mut r = shifted % &m;
            if r.is_negative() {
                r += &m;
            }
            r.to_biguint().unwrap()
        };
        let du = {
            let m = BigInt::from(modulus.clone());
            let shifted = den / BigInt::from(p_pow(p, vd));
            let mut r = shifted % &m;
            if r.is_negative() {
                r += &m;
            }
            r.to_biguint().unwrap()
        };
        let unit = (nu * mod_inverse(&du, &modulus)) % &modulus;
        Ok(PadicScalar {
            p,
            prec: v + rel,
            repr: Some((v, unit)),
        })
    }

    pub fn from_rational(num: i64, den: i64, ctx: &PrimeContext) -> Result<Self> {
        Self::from_rational_big(&BigInt::from(num), &BigInt::from(den), ctx)
    }

    pub fn from_integer(n: i64, ctx: &PrimeContext) -> Self {
        Self::from_rational(n, 1, ctx).unwrap()
    }

    pub fn from_bigint(n: &BigInt, ctx: &PrimeContext) -> Self {
        Self::from_rational_big(n, &BigInt::one(), ctx).unwrap()
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    /// Absolute precision: the value is known modulo p^A.
    pub fn precision(&self) -> i64 {
        self.prec
    }

    /// Valuation when at least one nonzero digit is known.
    pub fn valuation(&self) -> Option<i64> {
        self.repr.as_ref().map(|(v, _)| *v)
    }

    pub fn val_bound(&self) -> ValBound {
        match &self.repr {
            Some((v, _)) => ValBound::finite_int(*v),
            None if self.prec == PREC_EXACT => ValBound::Infinite,
            None => ValBound::at_least_int(self.prec),
        }
    }

    pub fn is_exact_zero(&self) -> bool {
        self.repr.is_none() && self.prec == PREC_EXACT
    }

    pub fn is_zero_at_precision(&self) -> bool {
        self.repr.is_none()
    }

    pub fn is_provably_nonzero(&self) -> bool {
        self.repr.is_some()
    }

    /// Is this exactly 1 at its carried precision?
    pub fn is_one(&self) -> bool {
        matches!(&self.repr, Some((0, u)) if u.is_one())
    }

    pub fn unit_residue(&self) -> Option<&BigUint> {
        self.repr.as_ref().map(|(_, u)| u)
    }

    /// Relative precision (count of known significant digits).
    pub fn rel_precision(&self) -> i64 {
        match &self.repr {
            Some((v, _)) => self.prec - v,
            None => 0,
        }
    }

    fn check_same_prime(&self, other: &Self) -> Result<()> {
        if self.p != other.p {
            return Err(Error::MixedPrimes(self.p, other.p));
        }
        Ok(())
    }

    fn guard_prec(self) -> Result<Self> {
        if self.prec <= 0 {
            return Err(Error::PrecisionExhausted(self.prec));
        }
        Ok(self)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_prime(other)?;
        if self.is_exact_zero() {
            return Ok(other.clone());
        }
        if other.is_exact_zero() {
            return Ok(self.clone());
        }
        let prec = self.prec.min(other.prec);
        let out = match (&self.repr, &other.repr) {
            (None, None) => PadicScalar::zero_at(self.p, prec),
            (Some((v, u)), None) | (None, Some((v, u))) => {
                PadicScalar::from_parts(self.p, prec, *v, BigInt::from(u.clone()))
            }
            (Some((va, ua)), Some((vb, ub))) => {
                let v0 = (*va).min(*vb);
                let ra = BigInt::from(ua.clone()) * BigInt::from(p_pow(self.p, va - v0));
                let rb = BigInt::from(ub.clone()) * BigInt::from(p_pow(self.p, vb - v0));
                PadicScalar::from_parts(self.p, prec, v0, ra + rb)
            }
        };
        out.guard_prec()
    }

    pub fn neg(&self) -> Self {
        match &self.repr {
            None => self.clone(),
            Some((v, u)) => {
                let m = p_pow(self.p, self.prec - v);
                PadicScalar {
                    p: self.p,
                    prec: self.prec,
                    repr: Some((*v, m - u)),
                }
            }
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same_prime(other)?;
        if self.is_exact_zero() || other.is_exact_zero() {
            return Ok(PadicScalar::zero_exact(self.p));
        }
        let out = match (&self.repr, &other.repr) {
            (None, None) => PadicScalar::zero_at(self.p, self.prec + other.prec),
            (Some((v, _)), None) => PadicScalar::zero_at(self.p, other.prec + v),
            (None, Some((v, _))) => PadicScalar::zero_at(self.p, self.prec + v),
            (Some((va, ua)), Some((vb, ub))) => {
                let rel = (self.prec - va).min(other.prec - vb);
                let v = va + vb;
                let unit = (ua * ub) % p_pow(self.p, rel);
                debug_assert!(!unit.is_zero());
                PadicScalar {
                    p: self.p,
                    prec: v + rel,
                    repr: Some((v, unit)),
                }
            }
        };
        out.guard_prec()
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.check_same_prime(other)?;
        let (vb, ub) = match &other.repr {
            Some(parts) => parts,
            None if other.prec == PREC_EXACT => return Err(Error::DivisionByZero),
            None => return Err(Error::DivisorVanishes(other.prec)),
        };
        if self.is_exact_zero() {
            return Ok(PadicScalar::zero_exact(self.p));
        }
        let out = match &self.repr {
            None => PadicScalar::zero_at(self.p, self.prec - vb),
            Some((va, ua)) => {
                let rel = (self.prec - va).min(other.prec - vb);
                let v = va - vb;
                let m = p_pow(self.p, rel);
                let unit = (ua % &m) * mod_inverse(&(ub % &m), &m) % &m;
                debug_assert!(!unit.is_zero());
                PadicScalar {
                    p: self.p,
                    prec: v + rel,
                    repr: Some((v, unit)),
                }
            }
        };
        out.guard_prec()
    }

    pub fn inv(&self) -> Result<Self> {
        PadicScalar::one_at(self.p, self.rel_precision().max(1)).div(self)
    }

    /// Integer power by binary exponentiation; negative exponents invert first.
    pub fn pow_int(&self, e: i64) -> Result<Self> {
        if e < 0 {
            return self.inv()?.pow_int(-e);
        }
        if e == 0 {
            return Ok(PadicScalar::one_at(self.p, self.rel_precision().max(1)));
        }
        let mut base = self.clone();
        let mut acc: Option<PadicScalar> = None;
        let mut e = e as u64;
        loop {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => a.mul(&base)?,
                });
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            base = base.mul(&base)?;
        }
        Ok(acc.unwrap())
    }

    /// p-adic logarithm of a principal unit: sum of (-1)^(k+1) (a-1)^k / k.
    pub fn log(&self) -> Result<Self> {
        let one = PadicScalar::one_at(self.p, self.prec.max(1));
        let x = self.sub(&one)?;
        match x.valuation() {
            None => return Ok(PadicScalar::zero_at(self.p, x.prec)),
            Some(k) if k < 1 => return Err(Error::NotPrincipalUnit(Some(k))),
            Some(_) => {}
        }
        let k = x.valuation().unwrap();
        let target = x.prec;
        let mut sum = PadicScalar::zero_exact(self.p);
        let mut power = x.clone();
        let mut j: i64 = 1;
        loop {
            // drop terms once j*k - v_p(j) (>= j*k - log_p j) clears the target
            let log_floor = {
                let mut e = 0i64;
                let mut t = self.p as i64;
                while t <= j {
                    e += 1;
                    t *= self.p as i64;
                }
                e
            };
            if j * k - log_floor >= target {
                break;
            }
            let divisor = PadicScalar::from_parts(
                self.p,
                power.prec,
                0,
                BigInt::from(j),
            );
            let term = power.div(&divisor)?;
            sum = if j % 2 == 1 {
                sum.add(&term)?
            } else {
                sum.sub(&term)?
            };
            j += 1;
            power = power.mul(&x)?;
        }
        Ok(sum.truncate(target))
    }

    /// p-adic exponential; requires v(a) >= 1 (sufficient for p >= 3).
    pub fn exp(&self) -> Result<Self> {
        let k = match self.valuation() {
            None => {
                // exp(0 + O(p^A)) = 1 + O(p^A); exp of the exact zero is
                // exactly one, carried wide.
                let prec = if self.prec == PREC_EXACT {
                    PREC_WIDE
                } else {
                    self.prec
                };
                return Ok(PadicScalar::one_at(self.p, prec));
            }
            Some(v) => v,
        };
        if k < 1 {
            return Err(Error::OutsideDisk(Some(k), 1));
        }
        let target = self.prec;
        let p = self.p;
        let mut sum = PadicScalar::one_at(p, target);
        let mut power = self.clone();
        let mut factorial = BigUint::one();
        let mut j: i64 = 1;
        loop {
            factorial *= BigUint::from(j as u64);
            // Legendre gives v_p(j!) = (j - s_p(j))/(p-1) <= (j-1)/(p-1), so
            // j*k - (j-1)/(p-1) bounds every term from j on (it is monotone;
            // the exact term valuation is not).
            if j * k * (p as i64 - 1) - (j - 1) >= target * (p as i64 - 1) {
                break;
            }
            let divisor =
                PadicScalar::from_parts(p, power.prec, 0, BigInt::from(factorial.clone()));
            let term = power.div(&divisor)?;
            sum = sum.add(&term)?;
            j += 1;
            power = power.mul(self)?;
        }
        Ok(sum.truncate(target))
    }

    /// Reduce the carried precision to at most `new_prec`.
    pub fn truncate(&self, new_prec: i64) -> Self {
        if new_prec >= self.prec {
            return self.clone();
        }
        match &self.repr {
            None => PadicScalar::zero_at(self.p, new_prec),
            Some((v, u)) => {
                if *v >= new_prec {
                    PadicScalar::zero_at(self.p, new_prec)
                } else {
                    PadicScalar {
                        p: self.p,
                        prec: new_prec,
                        repr: Some((*v, u % p_pow(self.p, new_prec - v))),
                    }
                }
            }
        }
    }

    /// Congruence at the shared precision: a - b has no known nonzero digit.
    pub fn congruent(&self, other: &Self) -> bool {
        match self.sub(other) {
            Ok(d) => d.is_zero_at_precision(),
            Err(Error::PrecisionExhausted(_)) => true,
            Err(_) => false,
        }
    }

    /// Base-p digits of the unit residue, little-endian, padded to the
    /// relative precision.
    pub fn unit_digits(&self) -> Vec<u64> {
        match &self.repr {
            None => Vec::new(),
            Some((v, u)) => {
                let len = (self.prec - v) as usize;
                let mut digits = Vec::with_capacity(len);
                let mut x = u.clone();
                let pb = BigUint::from(self.p);
                for _ in 0..len {
                    let (q, r) = x.div_rem(&pb);
                    digits.push(r.to_u64().unwrap());
                    x = q;
                }
                digits
            }
        }
    }
}

impl fmt::Display for PadicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            None if self.prec == PREC_EXACT => write!(f, "0"),
            None => write!(f, "0 mod {}^{}", self.p, self.prec),
            Some((v, _)) => {
                let digits = self.unit_digits();
                let body = digits
                    .iter()
                    .enumerate()
                    .filter(|(_, d)| **d != 0)
                    .map(|(i, d)| match i {
                        0 => format!("{d}"),
                        1 => format!("{d}*{}", self.p),
                        _ => format!("{d}*{}^{}", self.p, i),
                    })
                    .collect::<Vec<_>>()
                    .join(" + ");
                if *v == 0 {
                    write!(f, "({body}) mod {}^{}", self.p, self.prec)
                } else {
                    write!(f, "{}^{} * ({body}) mod {}^{}", self.p, v, self.p, self.prec)
                }
            }
        }
    }
}

/// The deformation parameter q with its cached logarithm and the scalar
/// (q - 1) / log q that bridges p^N / [p^N] limits.
#[derive(Clone, Debug)]
pub struct QConfig {
    ctx: PrimeContext,
    q: PadicScalar,
    q_inv: PadicScalar,
    log_q: PadicScalar,
    a_scalar: PadicScalar,
    one: bool,
}

impl QConfig {
    /// The invariant-measure case q = 1.
    pub fn one(ctx: &PrimeContext) -> Self {
        let m = ctx.precision as i64;
        QConfig {
            ctx: *ctx,
            q: PadicScalar::one_at(ctx.p, m),
            q_inv: PadicScalar::one_at(ctx.p, m),
            log_q: PadicScalar::zero_exact(ctx.p),
            a_scalar: PadicScalar::one_at(ctx.p, m),
            one: true,
        }
    }

    /// Build from the rational value of q - 1; requires v(q - 1) >= 1.
    pub fn from_q_minus_one(num: i64, den: i64, ctx: &PrimeContext) -> Result<Self> {
        if den == 0 {
            return Err(Error::DivisionByZero);
        }
        if num == 0 {
            return Ok(QConfig::one(ctx));
        }
        let q_minus_one = PadicScalar::from_rational(num, den, ctx)?;
        match q_minus_one.valuation() {
            Some(v) if v >= 1 => {}
            _ => return Err(Error::BadQ),
        }
        let q = PadicScalar::from_rational(
            num + den,
            den,
            ctx,
        )?;
        let log_q = q.log()?;
        let a_scalar = q_minus_one.div(&log_q)?;
        let q_inv = q.inv()?;
        Ok(QConfig {
            ctx: *ctx,
            q,
            q_inv,
            log_q,
            a_scalar,
            one: false,
        })
    }

    pub fn is_one(&self) -> bool {
        self.one
    }

    pub fn ctx(&self) -> &PrimeContext {
        &self.ctx
    }

    pub fn q(&self) -> &PadicScalar {
        &self.q
    }

    pub fn q_inv(&self) -> &PadicScalar {
        &self.q_inv
    }

    pub fn log_q(&self) -> &PadicScalar {
        &self.log_q
    }

    /// (q - 1) / log q, equal to 1 when q = 1.
    pub fn a_scalar(&self) -> &PadicScalar {
        &self.a_scalar
    }

    /// q-bracket [x] = 1 + q + ... + q^(x-1), computed as the plain sum.
    pub fn q_bracket(&self, x: u64) -> PadicScalar {
        if self.one {
            return PadicScalar::from_integer(x as i64, &self.ctx);
        }
        let mut acc = PadicScalar::zero_exact(self.ctx.p);
        let mut power = PadicScalar::one_at(self.ctx.p, self.ctx.precision as i64);
        for _ in 0..x {
            acc = acc.add(&power).expect("bracket sum");
            power = power.mul(&self.q).expect("bracket power");
        }
        acc
    }

    /// [x] via the closed form (1 - q^x)/(1 - q); exact for q != 1 and any
    /// integer x, used where per-point loop sums would be quadratic.
    pub fn q_bracket_fast(&self, x: i64) -> Result<PadicScalar> {
        if self.one {
            return Ok(PadicScalar::from_integer(x, &self.ctx));
        }
        let one = PadicScalar::one_at(self.ctx.p, self.ctx.precision as i64);
        let num = one.sub(&self.q.pow_int(x)?)?;
        let den = one.sub(&self.q)?;
        num.div(&den)
    }

    /// q^e for integer e by repeated squaring.
    pub fn pow_int(&self, e: i64) -> Result<PadicScalar> {
        if self.one {
            return Ok(PadicScalar::one_at(self.ctx.p, self.ctx.precision as i64));
        }
        self.q.pow_int(e)
    }

    /// q^x = exp(x log q) for x in Z_p.
    pub fn pow_scalar(&self, x: &PadicScalar) -> Result<PadicScalar> {
        match x.val_bound() {
            ValBound::Finite(v) if v < Ratio::zero() => {
                return Err(Error::OutsideDisk(Some(*v.numer()), 0))
            }
            _ => {}
        }
        if self.one {
            return Ok(PadicScalar::one_at(self.ctx.p, self.ctx.precision as i64));
        }
        x.mul(&self.log_q)?.exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn ctx(p: u64, m: u32) -> PrimeContext {
        PrimeContext::new(p, m).unwrap()
    }

    #[test]
    fn context_rejects_bad_parameters() {
        assert_eq!(PrimeContext::new(2, 8), Err(Error::InvalidPrime(2)));
        assert_eq!(PrimeContext::new(9, 8), Err(Error::InvalidPrime(9)));
        assert_eq!(PrimeContext::new(3, 2), Err(Error::PrecisionTooSmall(2, 4)));
        assert!(PrimeContext::new(7, 4).is_ok());
    }

    #[test]
    fn from_rational_one_half_p3() {
        // 2 * 14 = 28 = 1 mod 27; computed above the M >= 4 floor and
        // truncated to the 3-digit window.
        let x = PadicScalar::from_rational(1, 2, &ctx(3, 4))
            .unwrap()
            .truncate(3);
        assert_eq!(x.valuation(), Some(0));
        assert_eq!(x.unit_residue().unwrap(), &BigUint::from(14u32));
        assert_eq!(x.precision(), 3);
    }

    #[test]
    fn from_rational_zero_is_exact() {
        let x = PadicScalar::from_rational(0, 5, &ctx(3, 4)).unwrap();
        assert!(x.is_exact_zero());
        assert_eq!(x.val_bound(), ValBound::Infinite);
    }

    #[test]
    fn from_rational_denominator_valuation() {
        // v_5(2730) = 1, so -691/2730 has v = -1 at p = 5.
        // Oracle: extended Euclid modulo 5^5.
        let c = ctx(5, 4);
        let x = PadicScalar::from_rational(-691, 2730, &c).unwrap();
        assert_eq!(x.valuation(), Some(-1));
        assert_eq!(x.precision(), 3);
        let m = BigUint::from(5u32).pow(4);
        let den_unit = BigUint::from(546u32); // 2730 / 5
        let expect = (BigUint::from((5u64.pow(4) - 691 % 5u64.pow(4)) as u64)
            * mod_inverse(&den_unit, &m))
            % &m;
        assert_eq!(x.unit_residue().unwrap(), &expect);
    }

    #[test]
    fn from_rational_rejects_zero_denominator() {
        assert_eq!(
            PadicScalar::from_rational(1, 0, &ctx(3, 4)),
            Err(Error::DivisionByZero)
        );
    }

    #[test]
    fn add_simple_and_ultrametric() {
        let c = ctx(3, 6);
        let a = PadicScalar::from_integer(1, &c);
        let b = PadicScalar::from_integer(2, &c);
        let s = a.add(&b).unwrap();
        assert!(s.congruent(&PadicScalar::from_integer(3, &c)));
        // |x+y|_p <= max(|x|_p, |y|_p): v(3 + 6) = 2 >= min(1, 1)
        let x = PadicScalar::from_integer(3, &c);
        let y = PadicScalar::from_integer(6, &c);
        assert_eq!(x.add(&y).unwrap().valuation(), Some(2));
        // equality case: differing valuations
        let z = PadicScalar::from_integer(1, &c);
        assert_eq!(x.add(&z).unwrap().valuation(), Some(0));
    }

    #[test]
    fn division_by_p_shifts_valuation() {
        let c = ctx(3, 6);
        let one = PadicScalar::from_integer(1, &c);
        let p = PadicScalar::from_integer(3, &c);
        let q = one.div(&p).unwrap();
        assert_eq!(q.valuation(), Some(-1));
        assert!(q.unit_residue().unwrap().is_one());
    }

    #[test]
    fn division_error_taxonomy() {
        let c = ctx(3, 6);
        let one = PadicScalar::from_integer(1, &c);
        assert_eq!(
            one.div(&PadicScalar::zero_exact(3)),
            Err(Error::DivisionByZero)
        );
        assert_eq!(
            one.div(&PadicScalar::zero_at(3, 5)),
            Err(Error::DivisorVanishes(5))
        );
    }

    #[test]
    fn precision_exhaustion_is_reported() {
        let c = ctx(3, 4);
        let one = PadicScalar::from_integer(1, &c);
        let big = PadicScalar::from_integer(81, &c); // v = 4 = M
        assert!(matches!(
            one.div(&big),
            Err(Error::PrecisionExhausted(_))
        ));
    }

    #[test]
    fn mul_precision_follows_interval_rules() {
        let c = ctx(3, 5);
        let a = PadicScalar::from_integer(3, &c); // v=1, prec 6, rel 5
        let b = PadicScalar::from_integer(6, &c); // v=1, rel 5
        let m = a.mul(&b).unwrap();
        assert_eq!(m.valuation(), Some(2));
        assert_eq!(m.rel_precision(), 5);
        assert_eq!(m.precision(), 7);
    }

    // Series oracle: evaluate sum_{k=1..kmax} (-1)^(k+1) x^k / k exactly in Q,
    // then reduce modulo p^A. Independent of the PadicScalar path.
    fn log_series_oracle(x: i64, kmax: i64, p: u64, a: u32) -> BigUint {
        let mut acc = BigRational::zero();
        for k in 1..=kmax {
            let term = BigRational::new(
                BigInt::from(x).pow(k as u32) * if k % 2 == 1 { 1 } else { -1 },
                BigInt::from(k),
            );
            acc += term;
        }
        rational_mod_p_pow(&acc, p, a)
    }

    fn rational_mod_p_pow(r: &BigRational, p: u64, a: u32) -> BigUint {
        let m = BigInt::from(p_pow(p, a as i64));
        let num = r.numer().mod_floor(&m);
        let den = r.denom().mod_floor(&m);
        let inv = mod_inverse(&den.to_biguint().unwrap(), &m.to_biguint().unwrap());
        ((num.to_biguint().unwrap() * inv) % m.to_biguint().unwrap())
            .to_u64()
            .map(BigUint::from)
            .unwrap()
    }

    #[test]
    fn log_of_four_at_p3() {
        // terms k <= 3 suffice at A = 3; oracle gives 21 mod 27
        assert_eq!(log_series_oracle(3, 3, 3, 3), BigUint::from(21u32));
        let c = ctx(3, 4);
        let x = PadicScalar::from_integer(4, &c).log().unwrap().truncate(3);
        assert_eq!(x.valuation(), Some(1));
        let rep = x.unit_residue().unwrap() * BigUint::from(3u32) % BigUint::from(27u32);
        assert_eq!(rep, BigUint::from(21u32));
    }

    #[test]
    fn log_of_one_is_zero() {
        let c = ctx(3, 5);
        let x = PadicScalar::from_integer(1, &c).log().unwrap();
        assert!(x.is_zero_at_precision());
    }

    #[test]
    fn log_rejects_non_principal_unit() {
        let c = ctx(3, 5);
        assert!(matches!(
            PadicScalar::from_integer(2, &c).log(),
            Err(Error::NotPrincipalUnit(Some(0)))
        ));
    }

    #[test]
    fn log_is_a_homomorphism() {
        let c = ctx(3, 8);
        let a = PadicScalar::from_integer(4, &c);
        let lhs = a.mul(&a).unwrap().log().unwrap();
        let two = PadicScalar::from_integer(2, &c);
        let rhs = two.mul(&a.log().unwrap()).unwrap();
        assert!(lhs.congruent(&rhs));
    }

    // Exp series oracle with exact rational coefficients.
    fn exp_series_oracle(x: i64, kmax: i64, p: u64, a: u32) -> BigUint {
        let mut acc = BigRational::one();
        let mut fact = BigInt::one();
        for k in 1..=kmax {
            fact *= BigInt::from(k);
            acc += BigRational::new(BigInt::from(x).pow(k as u32), fact.clone());
        }
        rational_mod_p_pow(&acc, p, a)
    }

    #[test]
    fn exp_of_three_at_p3() {
        assert_eq!(exp_series_oracle(3, 3, 3, 3), BigUint::from(13u32));
        let c = ctx(3, 4);
        let x = PadicScalar::from_integer(3, &c).exp().unwrap();
        assert_eq!(x.valuation(), Some(0));
        assert_eq!(
            x.unit_residue().unwrap() % BigUint::from(27u32),
            BigUint::from(13u32)
        );
    }

    #[test]
    fn exp_of_zero_is_one() {
        let c = ctx(3, 5);
        let z = PadicScalar::from_rational(0, 1, &c).unwrap();
        assert!(z.exp().unwrap().is_one());
    }

    #[test]
    fn exp_rejects_units() {
        let c = ctx(3, 5);
        assert!(matches!(
            PadicScalar::from_integer(1, &c).exp(),
            Err(Error::OutsideDisk(Some(0), 1))
        ));
    }

    #[test]
    fn exp_log_roundtrip() {
        let c = ctx(3, 8);
        let a = PadicScalar::from_integer(4, &c); // 1 + 3
        let back = a.log().unwrap().exp().unwrap();
        assert!(back.congruent(&a));
        let t = PadicScalar::from_integer(3, &c);
        let fwd = t.exp().unwrap().log().unwrap();
        assert!(fwd.congruent(&t));
    }

    #[test]
    fn q_bracket_basics() {
        let c = ctx(3, 4);
        let q = QConfig::from_q_minus_one(3, 1, &c).unwrap();
        assert!(q.q_bracket(0).is_exact_zero());
        // [2] = 1 + q = 5
        assert!(q
            .q_bracket(2)
            .congruent(&PadicScalar::from_integer(5, &c)));
        // [3] = 1 + 4 + 16 = 21
        let b3 = q.q_bracket(3);
        assert!(b3.congruent(&PadicScalar::from_integer(21, &c)));
        // fast route agrees
        assert!(q.q_bracket_fast(3).unwrap().congruent(&b3));
    }

    #[test]
    fn q_bracket_at_one_is_x() {
        let c = ctx(5, 6);
        let q = QConfig::one(&c);
        assert!(q
            .q_bracket(7)
            .congruent(&PadicScalar::from_integer(7, &c)));
    }

    #[test]
    fn q_bracket_tends_to_x() {
        // q = 1 + p^k u: v([x] - x) >= k
        let c = ctx(3, 10);
        for k in 1..4 {
            let q = QConfig::from_q_minus_one(3i64.pow(k), 1, &c).unwrap();
            let b = q.q_bracket(7);
            let d = b
                .sub(&PadicScalar::from_integer(7, &c))
                .unwrap();
            assert!(d.val_bound().meets_int(k as i64), "k={k}, v={:?}", d.val_bound());
        }
    }

    #[test]
    fn q_power_integer_and_scalar_agree() {
        let c = ctx(3, 6);
        let q = QConfig::from_q_minus_one(3, 1, &c).unwrap();
        assert!(q.pow_int(0).unwrap().is_one());
        let sq = q.pow_int(2).unwrap();
        assert!(sq.congruent(&PadicScalar::from_integer(16, &c)));
        let via_exp = q
            .pow_scalar(&PadicScalar::from_integer(2, &c))
            .unwrap();
        assert!(sq.congruent(&via_exp));
    }

    #[test]
    fn q_power_half_is_square_root() {
        // q = 4, p = 3: q^(1/2) squares to 4 and is = 1 mod 3.
        let c = ctx(3, 4);
        let q = QConfig::from_q_minus_one(3, 1, &c).unwrap();
        let half = PadicScalar::from_rational(1, 2, &c).unwrap();
        let r = q.pow_scalar(&half).unwrap();
        let square = r.mul(&r).unwrap();
        assert!(square.congruent(&PadicScalar::from_integer(4, &c)));
        assert_eq!(
            r.unit_residue().unwrap() % BigUint::from(3u32),
            BigUint::one()
        );
        // and the residue mod 27 is 25
        assert_eq!(
            r.unit_residue().unwrap() % BigUint::from(27u32),
            BigUint::from(25u32)
        );
    }

    #[test]
    fn q_power_rejects_negative_valuation_exponent() {
        let c = ctx(3, 6);
        let q = QConfig::from_q_minus_one(3, 1, &c).unwrap();
        let x = PadicScalar::from_rational(1, 3, &c).unwrap();
        assert!(matches!(q.pow_scalar(&x), Err(Error::OutsideDisk(_, 0))));
    }

    #[test]
    fn q_power_homomorphism() {
        let c = ctx(3, 8);
        let q = QConfig::from_q_minus_one(3, 1, &c).unwrap();
        let x = PadicScalar::from_rational(1, 2, &c).unwrap();
        let y = PadicScalar::from_rational(5, 4, &c).unwrap();
        let lhs = q.pow_scalar(&x.add(&y).unwrap()).unwrap();
        let rhs = q
            .pow_scalar(&x)
            .unwrap()
            .mul(&q.pow_scalar(&y).unwrap())
            .unwrap();
        assert!(lhs.congruent(&rhs));
    }

    #[test]
    fn qconfig_rejects_units() {
        let c = ctx(3, 6);
        assert!(matches!(
            QConfig::from_q_minus_one(1, 1, &c),
            Err(Error::BadQ)
        ));
    }

    #[test]
    fn truncation_reproduces_lower_precision() {
        // recompute at M + 4, truncate to the M result exactly
        let lo = ctx(3, 6);
        let hi = ctx(3, 10);
        let a_lo = PadicScalar::from_rational(7, 5, &lo).unwrap();
        let a_hi = PadicScalar::from_rational(7, 5, &hi).unwrap();
        assert_eq!(a_hi.truncate(a_lo.precision()), a_lo);
        let l_lo = PadicScalar::from_integer(4, &lo).log().unwrap();
        let l_hi = PadicScalar::from_integer(4, &hi).log().unwrap();
        assert_eq!(l_hi.truncate(l_lo.precision()), l_lo);
    }

    #[test]
    fn display_forms() {
        let c = ctx(3, 4);
        let x = PadicScalar::from_rational(1, 2, &c).unwrap().truncate(3);
        assert_eq!(format!("{x}"), "(2 + 1*3 + 1*3^2) mod 3^3");
        assert_eq!(format!("{}", PadicScalar::zero_at(3, 5)), "0 mod 3^5");
        assert_eq!(format!("{}", PadicScalar::zero_exact(3)), "0");
    }
}
