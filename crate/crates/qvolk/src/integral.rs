//! The q-measure, finite Riemann sums, and limit integrals.
//!
//! The measure assigns q^a / [l p^N] to the ball a + l p^N Z_p; integrating
//! a test function truncates the limit at level N and divides by the
//! accumulated weight, which costs exactly N digits of absolute precision.
//! Stabilization between consecutive levels is the convergence certificate;
//! nothing is extrapolated.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::cyclotomic::{Character, CycloElement, CycloRing};
use crate::error::{Error, Result};
use crate::function::{Evaluator, UDFunction};
use crate::padic::{PadicScalar, PrimeContext, QConfig, ValBound};

/// Shared configuration for Riemann sums: prime context, q, the branch
/// index l (coprime to p), truncation level N, and the value ring.
#[derive(Clone, Debug)]
pub struct IntegralConfig {
    ctx: PrimeContext,
    q: QConfig,
    l: u64,
    level: u32,
    ring: CycloRing,
}

impl IntegralConfig {
    pub fn new(ctx: &PrimeContext, q: QConfig, l: u64, level: u32, ring_level: u32) -> Result<Self> {
        if level < 1 {
            return Err(Error::Config("truncation level N must be >= 1".into()));
        }
        if l == 0 {
            return Err(Error::Config("l must be positive".into()));
        }
        if l > 1 && l % ctx.prime() == 0 {
            return Err(Error::Config("l must be coprime to p".into()));
        }
        if (ctx.precision() as i64) <= level as i64 {
            return Err(Error::Config(format!(
                "working precision M = {} must exceed N = {} (the 1/[lp^N] division costs N digits)",
                ctx.precision(),
                level
            )));
        }
        Ok(IntegralConfig {
            ctx: *ctx,
            q,
            l,
            level,
            ring: CycloRing::new(ctx, ring_level),
        })
    }

    pub fn ctx(&self) -> &PrimeContext {
        &self.ctx
    }

    pub fn q(&self) -> &QConfig {
        &self.q
    }

    pub fn l(&self) -> u64 {
        self.l
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn ring(&self) -> &CycloRing {
        &self.ring
    }

    pub fn with_level(&self, level: u32) -> Result<Self> {
        IntegralConfig::new(&self.ctx, self.q.clone(), self.l, level, self.ring.level())
    }

    /// l * p^N, the number of sample points.
    pub fn point_count(&self) -> u64 {
        self.l * self.ctx.prime().pow(self.level)
    }
}

/// One truncation level of a limit computation.
#[derive(Clone, Debug)]
pub struct LevelValue {
    pub level: u32,
    pub value: CycloElement,
    /// Valuation of the difference against the previous level.
    pub stable_from_prev: Option<ValBound>,
}

/// Final value of a limit computation together with its convergence
/// certificate.
#[derive(Clone, Debug)]
pub struct IntegralResult {
    pub value: CycloElement,
    pub stable_digits: ValBound,
    pub level: u32,
    /// False when the agreement valuations decreased somewhere along the way.
    pub stabilizing: bool,
}

/// mu_q(a + l p^N Z_p) = q^a / [l p^N].
pub fn measure_ball(a: u64, cfg: &IntegralConfig) -> Result<PadicScalar> {
    let total = cfg.point_count();
    if a >= total {
        return Err(Error::BallOutOfRange(a, total));
    }
    let num = cfg.q.pow_int(a as i64)?;
    let den = cfg.q.q_bracket(total);
    num.div(&den)
}

/// The level-N Riemann sum (1/[l p^N]) sum_{x < l p^N} f(x) q^x.
pub fn riemann_sum(f: &UDFunction, cfg: &IntegralConfig) -> Result<CycloElement> {
    if f.max_char_level() > cfg.ring.level() {
        return Err(Error::CharLevelExceedsRing(
            f.max_char_level(),
            cfg.ring.level(),
        ));
    }
    let total = cfg.point_count();
    let ev = Evaluator::with_modulus(&cfg.ring, &cfg.q, total as i64);
    let p = cfg.ctx.prime();
    let mut weighted = CycloElement::zero(&cfg.ring);
    let mut mass = PadicScalar::zero_exact(p);
    let mut qpow = PadicScalar::one_at(p, cfg.ctx.precision() as i64);
    for x in 0..total {
        let fx = ev.eval(f, x as i64)?;
        weighted = weighted.add(&fx.mul_scalar(&qpow)?)?;
        mass = mass.add(&qpow)?;
        if !cfg.q.is_one() {
            qpow = qpow.mul(cfg.q.q())?;
        }
    }
    weighted.div_scalar(&mass)
}

/// Riemann sums at levels 1..=n_max in one incremental scan.
pub fn iq_levels(f: &UDFunction, cfg: &IntegralConfig, n_max: u32) -> Result<Vec<LevelValue>> {
    if f.max_char_level() > cfg.ring.level() {
        return Err(Error::CharLevelExceedsRing(
            f.max_char_level(),
            cfg.ring.level(),
        ));
    }
    if (cfg.ctx.precision() as i64) <= n_max as i64 {
        return Err(Error::Config(format!(
            "working precision M = {} must exceed the deepest level {}",
            cfg.ctx.precision(),
            n_max
        )));
    }
    let p = cfg.ctx.prime();
    let total = cfg.l * p.pow(n_max);
    // Reflected arguments are folded per-level, so evaluations cannot be
    // shared across levels when the tree contains Reflect; the plain scan
    // re-reduces nothing otherwise because arguments stay in range.
    let ev = Evaluator::with_modulus(&cfg.ring, &cfg.q, total as i64);
    let mut weighted = CycloElement::zero(&cfg.ring);
    let mut mass = PadicScalar::zero_exact(p);
    let mut qpow = PadicScalar::one_at(p, cfg.ctx.precision() as i64);
    let mut out: Vec<LevelValue> = Vec::new();
    let mut boundary = cfg.l * p; // l p^1
    let mut level = 1u32;
    for x in 0..total {
        let fx = ev.eval(f, x as i64)?;
        weighted = weighted.add(&fx.mul_scalar(&qpow)?)?;
        mass = mass.add(&qpow)?;
        if !cfg.q.is_one() {
            qpow = qpow.mul(cfg.q.q())?;
        }
        if x + 1 == boundary {
            let value = weighted.div_scalar(&mass)?;
            let stable_from_prev = out.last().map(|prev: &LevelValue| {
                stability(&value, &prev.value)
            });
            out.push(LevelValue {
                level,
                value,
                stable_from_prev,
            });
            level += 1;
            boundary *= p;
        }
    }
    Ok(out)
}

fn stability(current: &CycloElement, previous: &CycloElement) -> ValBound {
    match current.sub(previous) {
        Ok(d) => {
            if d.is_zero_at_precision() {
                // agreement through the whole shared precision window
                ValBound::Infinite
            } else {
                d.valuation_bound()
            }
        }
        Err(_) => ValBound::Infinite,
    }
}

/// The limit integral I_q(f): evaluate at increasing levels, report the last
/// value and the inter-level agreement valuation.
pub fn iq_limit(f: &UDFunction, cfg: &IntegralConfig, n_max: u32) -> Result<IntegralResult> {
    if n_max < 2 {
        return Err(Error::Config("n_max must be >= 2".into()));
    }
    let levels = iq_levels(f, cfg, n_max)?;
    let mut stabilizing = true;
    let mut prev: Option<ValBound> = None;
    for lv in &levels {
        if let Some(s) = &lv.stable_from_prev {
            if let (Some(cur), Some(before)) = (s.lower(), prev.as_ref().and_then(|p| p.lower())) {
                if matches!(prev, Some(ValBound::Finite(_))) && cur < before {
                    stabilizing = false;
                }
            }
            prev = Some(*s);
        }
    }
    let last = levels.last().unwrap();
    Ok(IntegralResult {
        value: last.value.clone(),
        stable_digits: last.stable_from_prev.unwrap(),
        level: last.level,
        stabilizing,
    })
}

/// I_0(f_1) - I_0(f) - f'(0) at the configured level; q = 1 only.
pub fn shift_identity_residual(f: &UDFunction, cfg: &IntegralConfig) -> Result<CycloElement> {
    if !cfg.q.is_one() {
        return Err(Error::Config(
            "the shift identity I_0(f_1) = I_0(f) + f'(0) is the q = 1 path".into(),
        ));
    }
    let shifted = UDFunction::shift(f.clone(), 1);
    let lhs = riemann_sum(&shifted, cfg)?;
    let rhs = riemann_sum(f, cfg)?;
    let d0 = f
        .derivative_at_zero(&cfg.q, &cfg.ring)?;
    lhs.sub(&rhs)?.sub(&d0)
}

/// Exact rational Bernoulli numbers, B_1 = -1/2 convention (the moments of
/// the invariant measure): sum_{k <= m} C(m+1, k) B_k = 0, B_0 = 1.
pub fn bernoulli_exact(m: u32) -> Result<BigRational> {
    if m > 30 {
        return Err(Error::BernoulliRange(m));
    }
    let mut bs: Vec<BigRational> = Vec::with_capacity(m as usize + 1);
    for j in 0..=m as usize {
        if j == 0 {
            bs.push(BigRational::one());
            continue;
        }
        // B_j = -1/(j+1) * sum_{k<j} C(j+1, k) B_k
        let mut acc = BigRational::zero();
        let mut binom = BigInt::one(); // C(j+1, 0)
        for (k, b) in bs.iter().enumerate() {
            if k > 0 {
                // C(j+1, k) = C(j+1, k-1) * (j+2-k) / k
                binom = &binom * BigInt::from(j as i64 + 2 - k as i64) / BigInt::from(k as i64);
            }
            acc += BigRational::from_integer(binom.clone()) * b;
        }
        bs.push(-acc / BigRational::from_integer(BigInt::from(j as i64 + 1)));
    }
    Ok(bs.pop().unwrap())
}

/// Closed form of the exponential-character integral, in both printed and
/// measure-consistent normalizations.
#[derive(Clone, Debug)]
pub struct ClosedForm {
    /// (t + log q) / (q xi e^t - 1)
    pub plain: CycloElement,
    /// ((q - 1)/log q) * plain; this is what the Riemann sums converge to.
    pub normalized: CycloElement,
}

/// Closed form for integrating phi_xi(x) e^(tx); requires v(t) >= 1 or t = 0.
pub fn laplace_closed_form(
    t: &PadicScalar,
    xi: &Character,
    cfg: &IntegralConfig,
) -> Result<ClosedForm> {
    if let Some(v) = t.valuation() {
        if v < 1 {
            return Err(Error::OutsideDisk(Some(v), 1));
        }
    }
    let ring = &cfg.ring;
    let e_t = t.exp()?;
    let xi_el = xi.eval(ring)?;
    let q_et = cfg.q.q().mul(&e_t)?;
    let denom = xi_el.mul_scalar(&q_et)?.sub(&CycloElement::one(ring))?;
    if denom.is_zero_at_precision() {
        return Err(Error::SingularDenominator);
    }
    let num = t.add(cfg.q.log_q())?;
    let plain = denom.inv().map_err(|e| match e {
        Error::NonInvertible => Error::SingularDenominator,
        other => other,
    })?
    .mul_scalar(&num)?;
    let normalized = plain.mul_scalar(cfg.q.a_scalar())?;
    Ok(ClosedForm { plain, normalized })
}
