//! Arithmetic in Q_p(zeta_{p^n}) and the character groups C_{p^n}.
//!
//! Elements are coefficient vectors over `PadicScalar` modulo the p^n-th
//! cyclotomic polynomial Phi_{p^n}(x) = sum_{j<p} x^(j p^(n-1)). Valuations
//! on the extension are recovered through norms (products of conjugates),
//! normalized so that v(p) = 1; they are rationals with denominator
//! dividing the degree.

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::padic::{PadicScalar, PrimeContext, ValBound, PREC_EXACT};

/// The ring Z_p[zeta_{p^n}] presented as Q_p[x] / Phi_{p^n}(x).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CycloRing {
    ctx: PrimeContext,
    level: u32,
    degree: usize,
    /// p^n, the order of zeta.
    root_order: u64,
    /// p^(n-1), the exponent step between the sparse terms of the modulus.
    step: u64,
}

impl CycloRing {
    pub fn new(ctx: &PrimeContext, level: u32) -> Self {
        let p = ctx.prime();
        if level == 0 {
            return CycloRing {
                ctx: *ctx,
                level: 0,
                degree: 1,
                root_order: 1,
                step: 1,
            };
        }
        let step = p.pow(level - 1);
        CycloRing {
            ctx: *ctx,
            level,
            degree: ((p - 1) * step) as usize,
            root_order: p.pow(level),
            step,
        }
    }

    pub fn ctx(&self) -> &PrimeContext {
        &self.ctx
    }

    pub fn prime(&self) -> u64 {
        self.ctx.prime()
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// phi(p^n) = p^(n-1) (p - 1); 1 at level 0.
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn root_order(&self) -> u64 {
        self.root_order
    }

    /// Coefficient vector of Phi_{p^n}, constant term first.
    pub fn modulus(&self) -> Vec<u64> {
        let mut m = vec![0u64; self.degree + 1];
        if self.level == 0 {
            // base field: x - 1
            m[0] = self.prime() - 1; // placeholder; level 0 is never reduced
            m[1] = 1;
            return m;
        }
        let mut j = 0u64;
        while (j * self.step) as usize <= self.degree {
            m[(j * self.step) as usize] = 1;
            j += 1;
        }
        m
    }
}

/// An element of Q_p(zeta_{p^n}): `coeffs[i]` multiplies zeta^i, i < degree.
#[derive(Clone, Debug, PartialEq)]
pub struct CycloElement {
    ring: CycloRing,
    coeffs: Vec<PadicScalar>,
}

impl CycloElement {
    pub fn zero(ring: &CycloRing) -> Self {
        CycloElement {
            ring: *ring,
            coeffs: vec![PadicScalar::zero_exact(ring.prime()); ring.degree],
        }
    }

    pub fn from_scalar(ring: &CycloRing, s: PadicScalar) -> Self {
        let mut e = CycloElement::zero(ring);
        e.coeffs[0] = s;
        e
    }

    pub fn one(ring: &CycloRing) -> Self {
        CycloElement::from_scalar(
            ring,
            PadicScalar::one_at(ring.prime(), ring.ctx.precision() as i64),
        )
    }

    /// scalar * zeta^exp with 0 <= exp < p^n (reduced through the modulus
    /// when exp lands on or above the degree).
    pub fn monomial(ring: &CycloRing, exp: u64, scalar: PadicScalar) -> Self {
        let mut e = CycloElement::zero(ring);
        e.add_assign_monomial(exp, &scalar);
        e
    }

    pub fn from_coeffs(ring: &CycloRing, coeffs: Vec<PadicScalar>) -> Result<Self> {
        if coeffs.len() != ring.degree {
            return Err(Error::Config(format!(
                "expected {} coefficients, got {}",
                ring.degree,
                coeffs.len()
            )));
        }
        Ok(CycloElement { ring: *ring, coeffs })
    }

    pub fn ring(&self) -> &CycloRing {
        &self.ring
    }

    pub fn coeffs(&self) -> &[PadicScalar] {
        &self.coeffs
    }

    pub fn is_base_field(&self) -> bool {
        self.coeffs[1..].iter().all(|c| c.is_zero_at_precision())
    }

    /// The zeta^0 coefficient; with `is_base_field` this is the whole value.
    pub fn scalar_part(&self) -> &PadicScalar {
        &self.coeffs[0]
    }

    fn check_same_ring(&self, other: &Self) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::MixedRings(self.ring.level, other.ring.level));
        }
        Ok(())
    }

    /// Add `scalar * zeta^exp` in place; `exp` taken mod p^n, single-step
    /// reduction for degree <= exp < p^n.
    pub fn add_assign_monomial(&mut self, exp: u64, scalar: &PadicScalar) {
        let exp = exp % self.ring.root_order;
        let d = self.ring.degree as u64;
        if exp < d {
            self.coeffs[exp as usize] = self.coeffs[exp as usize]
                .add(scalar)
                .expect("monomial add");
            return;
        }
        // zeta^(d+t) = -(zeta^t + zeta^(t+s) + ... + zeta^(t+(p-2)s)), s = p^(n-1)
        let t = exp - d;
        let neg = scalar.neg();
        let p = self.ring.prime();
        for j in 0..(p - 1) {
            let idx = (t + j * self.ring.step) as usize;
            self.coeffs[idx] = self.coeffs[idx].add(&neg).expect("monomial reduce");
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_ring(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.add(b))
            .collect::<Result<Vec<_>>>()?;
        Ok(CycloElement { ring: self.ring, coeffs })
    }

    pub fn neg(&self) -> Self {
        CycloElement {
            ring: self.ring,
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn mul_scalar(&self, s: &PadicScalar) -> Result<Self> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| c.mul(s))
            .collect::<Result<Vec<_>>>()?;
        Ok(CycloElement { ring: self.ring, coeffs })
    }

    pub fn div_scalar(&self, s: &PadicScalar) -> Result<Self> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| c.div(s))
            .collect::<Result<Vec<_>>>()?;
        Ok(CycloElement { ring: self.ring, coeffs })
    }

    /// Schoolbook product followed by reduction modulo Phi_{p^n}.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same_ring(other)?;
        let d = self.ring.degree;
        let p = self.ring.prime();
        let mut raw = vec![PadicScalar::zero_exact(p); 2 * d - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_exact_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_exact_zero() {
                    continue;
                }
                let t = a.mul(b)?;
                raw[i + j] = raw[i + j].add(&t)?;
            }
        }
        // reduce top-down: x^(d+t) = -sum_{j<p-1} x^(t + j p^(n-1))
        for i in (d..raw.len()).rev() {
            let c = std::mem::replace(&mut raw[i], PadicScalar::zero_exact(p));
            if c.is_exact_zero() {
                continue;
            }
            let t = i - d;
            let neg = c.neg();
            for j in 0..(p - 1) as usize {
                let idx = t + j * self.ring.step as usize;
                raw[idx] = raw[idx].add(&neg)?;
            }
        }
        raw.truncate(d);
        Ok(CycloElement {
            ring: self.ring,
            coeffs: raw,
        })
    }

    /// Multiply by zeta^exp (exponent rotation with reduction).
    pub fn mul_monomial(&self, exp: u64) -> Self {
        let mut out = CycloElement::zero(&self.ring);
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_exact_zero() {
                continue;
            }
            out.add_assign_monomial(exp + i as u64, c);
        }
        out
    }

    /// Accumulate `src * scalar * zeta^exp` into self (transform inner loop).
    pub fn add_assign_mul_monomial(
        &mut self,
        src: &Self,
        exp: u64,
        scalar: &PadicScalar,
    ) -> Result<()> {
        for (i, c) in src.coeffs.iter().enumerate() {
            if c.is_exact_zero() {
                continue;
            }
            let t = c.mul(scalar)?;
            self.add_assign_monomial(exp + i as u64, &t);
        }
        Ok(())
    }

    /// Galois conjugate sigma_t: zeta -> zeta^t, for t coprime to p.
    pub fn conjugate(&self, t: u64) -> Self {
        let mut out = CycloElement::zero(&self.ring);
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_exact_zero() {
                continue;
            }
            out.add_assign_monomial((i as u64 * t) % self.ring.root_order, c);
        }
        out
    }

    /// Field norm down to Q_p: the product over all conjugates.
    pub fn norm(&self) -> Result<PadicScalar> {
        if self.ring.level == 0 {
            return Ok(self.coeffs[0].clone());
        }
        let mut acc = self.clone();
        let order = self.ring.root_order;
        for t in 2..order {
            if t % self.ring.prime() == 0 {
                continue;
            }
            acc = acc.mul(&self.conjugate(t))?;
        }
        // The product is Galois-stable, hence lies in the base field.
        Ok(acc.coeffs[0].clone())
    }

    /// Inverse through the conjugate product: a^(-1) = (prod_{t != 1} sigma_t(a)) / N(a).
    pub fn inv(&self) -> Result<Self> {
        if self.ring.level == 0 {
            let s = self.coeffs[0].inv().map_err(|e| match e {
                Error::DivisionByZero | Error::DivisorVanishes(_) => Error::NonInvertible,
                other => other,
            })?;
            return Ok(CycloElement::from_scalar(&self.ring, s));
        }
        let mut cofactor = CycloElement::one(&self.ring);
        let order = self.ring.root_order;
        for t in 2..order {
            if t % self.ring.prime() == 0 {
                continue;
            }
            cofactor = cofactor.mul(&self.conjugate(t))?;
        }
        let norm = self.mul(&cofactor)?.coeffs[0].clone();
        if !norm.is_provably_nonzero() {
            return Err(Error::NonInvertible);
        }
        cofactor.div_scalar(&norm)
    }

    /// Re-express in a ring of level >= the current one (zeta_{p^m} = zeta_{p^M}^{p^(M-m)}).
    pub fn embed_into(&self, target: &CycloRing) -> Result<Self> {
        if target.level < self.ring.level {
            return Err(Error::CharLevelExceedsRing(self.ring.level, target.level));
        }
        if target.level == self.ring.level {
            return Ok(CycloElement {
                ring: *target,
                coeffs: self.coeffs.clone(),
            });
        }
        let lift = target
            .prime()
            .pow(target.level - self.ring.level);
        let mut out = CycloElement::zero(target);
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_exact_zero() {
                continue;
            }
            out.add_assign_monomial(i as u64 * lift, c);
        }
        Ok(out)
    }

    /// Minimum absolute precision over the coefficients.
    pub fn precision(&self) -> i64 {
        self.coeffs
            .iter()
            .map(|c| c.precision())
            .min()
            .unwrap_or(PREC_EXACT)
    }

    /// Cheap valuation lower bound: min over coefficient bounds. Always a
    /// valid lower bound for the element's valuation (the basis powers of
    /// zeta are units); exact values go through `valuation`.
    pub fn val_lower_bound(&self) -> ValBound {
        self.coeffs
            .iter()
            .map(|c| c.val_bound())
            .fold(ValBound::Infinite, |a, b| a.min_with(&b))
    }

    /// Exact valuation v(a) = v_p(N(a)) / degree; errors when the element is
    /// indistinguishable from zero at the working precision.
    pub fn valuation(&self) -> Result<Ratio<i64>> {
        let n = self.norm()?;
        match n.valuation() {
            Some(v) => Ok(Ratio::new(v, self.ring.degree as i64)),
            None => Err(Error::VanishesAtPrecision),
        }
    }

    /// Valuation with the zero-at-precision case folded into a bound.
    pub fn valuation_bound(&self) -> ValBound {
        match self.norm() {
            Ok(n) => match n.val_bound() {
                ValBound::Finite(v) => ValBound::Finite(v / self.ring.degree as i64),
                ValBound::AtLeast(v) => ValBound::AtLeast(v / self.ring.degree as i64),
                ValBound::Infinite => ValBound::Infinite,
            },
            Err(_) => self.val_lower_bound(),
        }
    }

    pub fn congruent(&self, other: &Self) -> bool {
        self.ring == other.ring
            && self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .all(|(a, b)| a.congruent(b))
    }

    pub fn is_zero_at_precision(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero_at_precision())
    }

    pub fn truncate(&self, new_prec: i64) -> Self {
        CycloElement {
            ring: self.ring,
            coeffs: self.coeffs.iter().map(|c| c.truncate(new_prec)).collect(),
        }
    }
}

impl std::fmt::Display for CycloElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| c.is_provably_nonzero())
            .map(|(i, c)| match i {
                0 => format!("{c}"),
                1 => format!("({c})*z"),
                _ => format!("({c})*z^{i}"),
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0 mod Phi({}^{})", self.ring.prime(), self.ring.level)
        } else {
            write!(
                f,
                "{} mod Phi({}^{})",
                terms.join(" + "),
                self.ring.prime(),
                self.ring.level
            )
        }
    }
}

/// A p-power root of unity w = zeta_{p^n}^k, stored by exponent.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Character {
    level: u32,
    exponent: u64,
}

impl Character {
    pub fn new(level: u32, exponent: u64, p: u64) -> Self {
        let order = p.pow(level);
        Character {
            level,
            exponent: exponent % order,
        }
    }

    pub fn trivial() -> Self {
        Character {
            level: 0,
            exponent: 0,
        }
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    /// Group law: exponent addition at the common level.
    pub fn mul(&self, other: &Character, p: u64) -> Character {
        let level = self.level.max(other.level);
        let order = p.pow(level);
        let a = self.exponent * p.pow(level - self.level);
        let b = other.exponent * p.pow(level - other.level);
        Character {
            level,
            exponent: (a + b) % order,
        }
    }

    pub fn inv(&self, p: u64) -> Character {
        let order = p.pow(self.level);
        Character {
            level: self.level,
            exponent: (order - self.exponent % order) % order,
        }
    }

    /// The exponent of this character viewed inside a ring of level >= level.
    pub fn lifted_exponent(&self, ring: &CycloRing) -> Result<u64> {
        if self.level > ring.level() {
            return Err(Error::CharLevelExceedsRing(self.level, ring.level()));
        }
        Ok(self.exponent * ring.prime().pow(ring.level() - self.level))
    }

    /// w as a ring element.
    pub fn eval(&self, ring: &CycloRing) -> Result<CycloElement> {
        self.eval_at(ring, 1)
    }

    /// phi_w(x) = w^x = zeta^(k x mod p^n); depends only on x mod p^n.
    pub fn eval_at(&self, ring: &CycloRing, x: i64) -> Result<CycloElement> {
        let base = self.lifted_exponent(ring)?;
        let order = ring.root_order() as i64;
        let e = ((base as i64 % order) * (x % order)).rem_euclid(order) as u64;
        Ok(CycloElement::monomial(
            ring,
            e,
            PadicScalar::one_at(ring.prime(), ring.ctx().precision() as i64),
        ))
    }
}

/// All p^n characters of level n, in exponent order.
pub fn enumerate_characters(ring: &CycloRing) -> Vec<Character> {
    (0..ring.root_order())
        .map(|k| Character {
            level: ring.level(),
            exponent: k,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    fn ring(p: u64, m: u32, n: u32) -> CycloRing {
        CycloRing::new(&PrimeContext::new(p, m).unwrap(), n)
    }

    #[test]
    fn modulus_shapes() {
        // Phi_3 = x^2 + x + 1
        let r = ring(3, 6, 1);
        assert_eq!(r.degree(), 2);
        assert_eq!(r.modulus(), vec![1, 1, 1]);
        // Phi_9 = x^6 + x^3 + 1
        let r = ring(3, 6, 2);
        assert_eq!(r.degree(), 6);
        assert_eq!(r.modulus(), vec![1, 0, 0, 1, 0, 0, 1]);
        // phi(5) = 4
        assert_eq!(ring(5, 6, 1).degree(), 4);
        // level 0 is the base field
        assert_eq!(ring(3, 6, 0).degree(), 1);
    }

    #[test]
    fn zeta_has_exact_order() {
        let r = ring(3, 6, 2);
        let ctx = *r.ctx();
        let z = CycloElement::monomial(&r, 1, PadicScalar::one_at(3, ctx.precision() as i64));
        let mut pw = CycloElement::one(&r);
        for k in 1..=9u32 {
            pw = pw.mul(&z).unwrap();
            if k < 9 {
                assert!(!pw.congruent(&CycloElement::one(&r)), "zeta^{k} = 1 too early");
            }
        }
        assert!(pw.congruent(&CycloElement::one(&r)));
    }

    #[test]
    fn zeta_cubed_is_one_at_level_one() {
        let r = ring(3, 6, 1);
        let one = PadicScalar::one_at(3, 6);
        let z = CycloElement::monomial(&r, 1, one.clone());
        let z2 = CycloElement::monomial(&r, 2, one);
        assert!(z.mul(&z2).unwrap().congruent(&CycloElement::one(&r)));
    }

    #[test]
    fn phi_annihilates_zeta() {
        // 1 + zeta + zeta^2 = 0 at p = 3, n = 1
        let r = ring(3, 6, 1);
        let one = PadicScalar::one_at(3, 6);
        let mut s = CycloElement::from_scalar(&r, one.clone());
        s.add_assign_monomial(1, &one);
        s.add_assign_monomial(2, &one);
        assert!(s.is_zero_at_precision() || s.coeffs().iter().all(|c| !c.is_provably_nonzero()));
    }

    #[test]
    fn inverse_of_zeta_is_power() {
        let r = ring(3, 6, 2);
        let one = PadicScalar::one_at(3, 6);
        let z = CycloElement::monomial(&r, 1, one.clone());
        let inv = z.inv().unwrap();
        let expect = CycloElement::monomial(&r, 8, one); // zeta^(p^n - 1)
        assert!(inv.congruent(&expect));
        assert!(z.mul(&inv).unwrap().congruent(&CycloElement::one(&r)));
    }

    #[test]
    fn general_inverse_round_trips() {
        let r = ring(3, 8, 1);
        let c = *r.ctx();
        // a = 2 + zeta
        let mut a = CycloElement::from_scalar(&r, PadicScalar::from_integer(2, &c));
        a.add_assign_monomial(1, &PadicScalar::one_at(3, 8));
        let inv = a.inv().unwrap();
        assert!(a.mul(&inv).unwrap().congruent(&CycloElement::one(&r)));
    }

    #[test]
    fn non_invertible_reported() {
        let r = ring(3, 6, 1);
        let z = CycloElement::zero(&r);
        assert!(matches!(z.inv(), Err(Error::NonInvertible)));
    }

    #[test]
    fn mixed_rings_rejected() {
        let a = CycloElement::one(&ring(3, 6, 1));
        let b = CycloElement::one(&ring(3, 6, 2));
        assert!(matches!(a.add(&b), Err(Error::MixedRings(1, 2))));
    }

    #[test]
    fn character_enumeration() {
        let r1 = ring(3, 6, 1);
        assert_eq!(enumerate_characters(&r1).len(), 3);
        let r0 = ring(3, 6, 0);
        assert_eq!(enumerate_characters(&r0).len(), 1);
        let r2 = ring(3, 6, 2);
        let chars = enumerate_characters(&r2);
        assert_eq!(chars.len(), 9);
        // level-1 roots appear as zeta_9^(3k)
        let sub = Character::new(1, 1, 3);
        assert_eq!(sub.lifted_exponent(&r2).unwrap(), 3);
    }

    #[test]
    fn character_evaluation() {
        let r = ring(3, 6, 1);
        let w = Character::new(1, 1, 3);
        assert!(w.eval_at(&r, 3).unwrap().congruent(&CycloElement::one(&r)));
        let z = CycloElement::monomial(&r, 1, PadicScalar::one_at(3, 6));
        assert!(w.eval_at(&r, 4).unwrap().congruent(&z));
        // local constancy
        assert!(w
            .eval_at(&r, 7)
            .unwrap()
            .congruent(&w.eval_at(&r, 7 + 3).unwrap()));
        // negative arguments via periodicity
        assert!(w
            .eval_at(&r, -1)
            .unwrap()
            .congruent(&w.eval_at(&r, 2).unwrap()));
    }

    #[test]
    fn character_group_law() {
        let r = ring(3, 6, 2);
        let w1 = Character::new(2, 4, 3);
        let w2 = Character::new(2, 7, 3);
        let prod = w1.mul(&w2, 3);
        for x in 0..9 {
            let lhs = w1
                .eval_at(&r, x)
                .unwrap()
                .mul(&w2.eval_at(&r, x).unwrap())
                .unwrap();
            assert!(lhs.congruent(&prod.eval_at(&r, x).unwrap()));
        }
    }

    #[test]
    fn character_orthogonality() {
        // sum over C_{p^n} of w^x = p^n when p^n | x, else 0 (exact).
        for n in 1..=2u32 {
            let r = ring(3, 8, n);
            let order = r.root_order() as i64;
            for x in 0..order {
                let mut acc = CycloElement::zero(&r);
                for w in enumerate_characters(&r) {
                    acc = acc.add(&w.eval_at(&r, x).unwrap()).unwrap();
                }
                if x == 0 {
                    let expect = CycloElement::from_scalar(
                        &r,
                        PadicScalar::from_integer(order, r.ctx()),
                    );
                    assert!(acc.congruent(&expect));
                } else {
                    assert!(acc.is_zero_at_precision(), "n={n} x={x}");
                }
            }
        }
    }

    #[test]
    fn subgroup_coherence() {
        // level-n character with p | k equals the level-(n-1) character
        let r = ring(3, 6, 2);
        let w = Character::new(2, 3, 3);
        let v = Character::new(1, 1, 3);
        for x in 0..9 {
            assert!(w
                .eval_at(&r, x)
                .unwrap()
                .congruent(&v.eval_at(&r, x).unwrap()));
        }
    }

    #[test]
    fn extension_valuations() {
        let r = ring(3, 8, 1);
        let c = *r.ctx();
        // v(p) = 1
        let p_el = CycloElement::from_scalar(&r, PadicScalar::from_integer(3, &c));
        assert_eq!(p_el.valuation().unwrap(), Ratio::from_integer(1));
        // v(zeta - 1) = 1/2 at p = 3 (Norm = Phi_3(1) = 3, degree 2)
        let mut zm1 = CycloElement::monomial(&r, 1, PadicScalar::one_at(3, 8));
        zm1 = zm1
            .sub(&CycloElement::one(&r))
            .unwrap();
        assert_eq!(zm1.valuation().unwrap(), Ratio::new(1, 2));
        // v(zeta) = 0
        let z = CycloElement::monomial(&r, 1, PadicScalar::one_at(3, 8));
        assert_eq!(z.valuation().unwrap(), Ratio::zero());
        // zero at precision reported distinctly
        let zz = CycloElement::from_scalar(&r, PadicScalar::zero_at(3, 8));
        assert!(matches!(zz.valuation(), Err(Error::VanishesAtPrecision)));
    }

    #[test]
    fn valuation_additive_on_products() {
        let r = ring(3, 10, 1);
        let c = *r.ctx();
        let mut a = CycloElement::monomial(&r, 1, PadicScalar::one_at(3, 10));
        a = a.sub(&CycloElement::one(&r)).unwrap(); // v = 1/2
        let b = CycloElement::from_scalar(&r, PadicScalar::from_integer(6, &c)); // v = 1
        let prod = a.mul(&b).unwrap();
        assert_eq!(
            prod.valuation().unwrap(),
            Ratio::new(3, 2),
            "v(ab) = v(a) + v(b)"
        );
        // and >= min on sums
        let s = a.add(&b).unwrap();
        assert!(s.valuation().unwrap() >= Ratio::new(1, 2));
    }

    #[test]
    fn embedding_preserves_arithmetic() {
        let r1 = ring(3, 6, 1);
        let r2 = ring(3, 6, 2);
        let one = PadicScalar::one_at(3, 6);
        let z = CycloElement::monomial(&r1, 1, one);
        let emb = z.embed_into(&r2).unwrap();
        // zeta_3 = zeta_9^3: cube of the image of zeta_9
        let mut pw = CycloElement::one(&r2);
        let z9 = CycloElement::monomial(&r2, 1, PadicScalar::one_at(3, 6));
        for _ in 0..3 {
            pw = pw.mul(&z9).unwrap();
        }
        assert!(emb.congruent(&pw));
    }
}
