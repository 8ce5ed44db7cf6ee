//! Exact arithmetic in the field of rational functions of s = q^(1/2)
//! with rational coefficients.
//!
//! Working in s rather than q keeps every exponent integral: the metric
//! entries q^(-rho_i) have half-integral rho_i when the dimension is odd.
//! A [`Scalar`] is a quotient of two [`LaurentPoly`]s held in a canonical
//! form (coprime parts, denominator an ordinary monic polynomial with
//! nonzero constant term), so equality is plain structural equality.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from(BigInt::from(n))
}

/// Sparse Laurent polynomial in s = q^(1/2) over the rationals.
///
/// Invariant: no stored coefficient is zero; the zero polynomial is the
/// empty map.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct LaurentPoly {
    terms: BTreeMap<i64, Rat>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly::default()
    }

    pub fn one() -> Self {
        LaurentPoly::monomial(0, rat_int(1))
    }

    pub fn monomial(exp: i64, coeff: Rat) -> Self {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(exp, coeff);
        }
        LaurentPoly { terms }
    }

    pub fn from_terms(it: impl IntoIterator<Item = (i64, Rat)>) -> Self {
        let mut p = LaurentPoly::zero();
        for (e, c) in it {
            p.add_term(e, c);
        }
        p
    }

    pub fn add_term(&mut self, exp: i64, coeff: Rat) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(exp).or_insert_with(Rat::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&exp);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&i64, &Rat)> {
        self.terms.iter()
    }

    /// Lowest s-exponent (valuation). None for the zero polynomial.
    pub fn valuation(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn degree(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn leading_coeff(&self) -> Option<&Rat> {
        self.terms.values().next_back()
    }

    pub fn shift(&self, by: i64) -> Self {
        LaurentPoly {
            terms: self.terms.iter().map(|(e, c)| (e + by, c.clone())).collect(),
        }
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return LaurentPoly::zero();
        }
        LaurentPoly {
            terms: self.terms.iter().map(|(e, k)| (*e, k * c)).collect(),
        }
    }

    pub fn eval_at_one(&self) -> Rat {
        let mut acc = Rat::zero();
        for c in self.terms.values() {
            acc += c;
        }
        acc
    }

    /// Evaluates at a nonzero rational point (negative exponents invert).
    pub fn eval(&self, s0: &Rat) -> Rat {
        assert!(!s0.is_zero(), "evaluation point must be nonzero");
        let mut acc = Rat::zero();
        for (e, c) in &self.terms {
            let mut p = Rat::one();
            for _ in 0..e.unsigned_abs() {
                p *= s0;
            }
            if *e < 0 {
                p = p.recip();
            }
            acc += c * p;
        }
        acc
    }

    /// Dense coefficient vector of an ordinary polynomial (valuation >= 0).
    fn to_dense(&self) -> Vec<Rat> {
        let deg = match self.degree() {
            None => return vec![],
            Some(d) => d,
        };
        assert!(self.valuation().unwrap() >= 0, "to_dense needs an ordinary polynomial");
        let mut v = vec![Rat::zero(); deg as usize + 1];
        for (e, c) in &self.terms {
            v[*e as usize] = c.clone();
        }
        v
    }

    fn from_dense(v: &[Rat]) -> Self {
        LaurentPoly::from_terms(v.iter().enumerate().map(|(e, c)| (e as i64, c.clone())))
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, c.clone());
        }
        out
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, -c.clone());
        }
        out
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        out
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly {
            terms: self.terms.iter().map(|(e, c)| (*e, -c.clone())).collect(),
        }
    }
}

/// Euclidean division of ordinary polynomials: returns (quotient, remainder).
fn poly_div_rem(a: &[Rat], b: &[Rat]) -> (Vec<Rat>, Vec<Rat>) {
    let db = b.len() - 1;
    assert!(!b[db].is_zero());
    let mut rem = a.to_vec();
    if rem.len() <= db {
        return (vec![], rem);
    }
    let mut quo = vec![Rat::zero(); rem.len() - db];
    for i in (db..rem.len()).rev() {
        if rem[i].is_zero() {
            continue;
        }
        let f = &rem[i] / &b[db];
        quo[i - db] = f.clone();
        for j in 0..=db {
            let t = &b[j] * &f;
            rem[i - db + j] -= t;
        }
    }
    while rem.last().is_some_and(|c| c.is_zero()) {
        rem.pop();
    }
    (quo, rem)
}

/// Monic gcd of two ordinary polynomials given densely.
fn poly_gcd(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    while a.last().is_some_and(|c| c.is_zero()) {
        a.pop();
    }
    while b.last().is_some_and(|c| c.is_zero()) {
        b.pop();
    }
    while !b.is_empty() {
        let (_, r) = poly_div_rem(&a, &b);
        a = b;
        b = r;
    }
    if let Some(lc) = a.last().cloned() {
        for c in &mut a {
            *c = &*c / &lc;
        }
    }
    a
}

/// Element of the field Q(s), s = q^(1/2), in canonical form.
///
/// Canonical form: numerator and denominator are coprime in Q[s] after a
/// power of s is factored into the numerator; the denominator is monic with
/// nonzero constant term. The zero element is 0/1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Scalar {
    num: LaurentPoly,
    den: LaurentPoly,
}

impl Scalar {
    /// Canonical quotient of two Laurent polynomials.
    pub fn normalize(num: LaurentPoly, den: LaurentPoly) -> Result<Scalar> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(Scalar { num: LaurentPoly::zero(), den: LaurentPoly::one() });
        }
        let vn = num.valuation().unwrap();
        let vd = den.valuation().unwrap();
        let n = num.shift(-vn).to_dense();
        let d = den.shift(-vd).to_dense();
        let g = poly_gcd(&n, &d);
        let (n, nr) = poly_div_rem(&n, &g);
        debug_assert!(nr.is_empty());
        let (d, dr) = poly_div_rem(&d, &g);
        debug_assert!(dr.is_empty());
        let lc = d.last().unwrap().clone();
        let n: Vec<Rat> = n.iter().map(|c| c / &lc).collect();
        let d: Vec<Rat> = d.iter().map(|c| c / &lc).collect();
        Ok(Scalar {
            num: LaurentPoly::from_dense(&n).shift(vn - vd),
            den: LaurentPoly::from_dense(&d),
        })
    }

    pub fn zero() -> Scalar {
        Scalar { num: LaurentPoly::zero(), den: LaurentPoly::one() }
    }

    pub fn one() -> Scalar {
        Scalar { num: LaurentPoly::one(), den: LaurentPoly::one() }
    }

    pub fn from_rat(r: Rat) -> Scalar {
        Scalar { num: LaurentPoly::monomial(0, r), den: LaurentPoly::one() }
    }

    pub fn from_int(n: i64) -> Scalar {
        Scalar::from_rat(rat_int(n))
    }

    /// s^k, i.e. q^(k/2).
    pub fn s_pow(k: i64) -> Scalar {
        Scalar { num: LaurentPoly::monomial(k, rat_int(1)), den: LaurentPoly::one() }
    }

    /// q^k.
    pub fn q_pow(k: i64) -> Scalar {
        Scalar::s_pow(2 * k)
    }

    pub fn q() -> Scalar {
        Scalar::q_pow(1)
    }

    pub fn num(&self) -> &LaurentPoly {
        &self.num
    }

    pub fn den(&self) -> &LaurentPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den == LaurentPoly::one() && self.num == LaurentPoly::one()
    }

    pub fn add(&self, rhs: &Scalar) -> Scalar {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
        let den = &self.den * &rhs.den;
        Scalar::normalize(num, den).expect("nonzero denominators")
    }

    pub fn sub(&self, rhs: &Scalar) -> Scalar {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &Scalar) -> Scalar {
        if self.is_zero() || rhs.is_zero() {
            return Scalar::zero();
        }
        if self.is_one() {
            return rhs.clone();
        }
        if rhs.is_one() {
            return self.clone();
        }
        Scalar::normalize(&self.num * &rhs.num, &self.den * &rhs.den).expect("nonzero denominators")
    }

    pub fn div(&self, rhs: &Scalar) -> Result<Scalar> {
        if rhs.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Scalar::normalize(&self.num * &rhs.den, &self.den * &rhs.num)
    }

    pub fn inv(&self) -> Result<Scalar> {
        Scalar::one().div(self)
    }

    pub fn neg(&self) -> Scalar {
        Scalar { num: -&self.num, den: self.den.clone() }
    }

    pub fn pow(&self, k: i64) -> Result<Scalar> {
        if k < 0 {
            return self.inv()?.pow(-k);
        }
        let mut out = Scalar::one();
        for _ in 0..k {
            out = out.mul(self);
        }
        Ok(out)
    }

    /// Exact equality in the field (structural thanks to canonical form).
    pub fn equals(&self, rhs: &Scalar) -> bool {
        self == rhs
    }

    /// Evaluates at a nonzero rational point s = s0 (used by test oracles).
    pub fn eval(&self, s0: &Rat) -> Result<Rat> {
        let dv = self.den.eval(s0);
        if dv.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.num.eval(s0) / dv)
    }

    /// Substitutes s = 1 (that is, q = 1) after cancellation.
    pub fn limit_q1(&self) -> Result<Rat> {
        let dv = self.den.eval_at_one();
        if dv.is_zero() {
            // Canonical form already cancelled the gcd, so a vanishing
            // denominator at s = 1 is a genuine pole unless the numerator
            // still carries enough (s - 1) factors; it cannot, by coprimality.
            return Err(Error::PoleAtOne);
        }
        let nv = self.num.eval_at_one();
        Ok(nv / dv)
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        Scalar::add(self, rhs)
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        Scalar::sub(self, rhs)
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        Scalar::mul(self, rhs)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::neg(self)
    }
}

fn fmt_rat(c: &Rat) -> String {
    if c.denom().is_one() {
        format!("{}", c.numer())
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

fn fmt_poly(p: &LaurentPoly) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (e, c)) in p.terms.iter().rev().enumerate() {
        let neg = c.is_negative();
        let mag = if neg { -c.clone() } else { c.clone() };
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let coeff_str = fmt_rat(&mag);
        if *e == 0 {
            out.push_str(&coeff_str);
        } else {
            if !mag.is_one() {
                out.push_str(&coeff_str);
                out.push('*');
            }
            if *e == 2 {
                out.push('q');
            } else if e % 2 == 0 {
                out.push_str(&format!("q^{}", e / 2));
            } else {
                out.push_str(&format!("q^({}/2)", e));
            }
        }
    }
    out
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == LaurentPoly::one() {
            if self.num.terms.len() > 1 && f.alternate() {
                write!(f, "({})", fmt_poly(&self.num))
            } else {
                write!(f, "{}", fmt_poly(&self.num))
            }
        } else {
            write!(f, "({})/({})", fmt_poly(&self.num), fmt_poly(&self.den))
        }
    }
}

/// Monomial in the four ansatz unknowns a1..a4 (exponent vector).
pub type AMonomial = [u8; 4];

/// Sparse polynomial in the unknowns a1..a4 with [`Scalar`] coefficients.
///
/// Houses the coefficients of the classification ansatz; every constraint
/// the engine generates has total degree at most 2 in the unknowns.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MultiPoly {
    terms: BTreeMap<AMonomial, Scalar>,
}

impl MultiPoly {
    pub fn zero() -> Self {
        MultiPoly::default()
    }

    pub fn constant(c: Scalar) -> Self {
        let mut p = MultiPoly::zero();
        p.add_term([0; 4], c);
        p
    }

    pub fn one() -> Self {
        MultiPoly::constant(Scalar::one())
    }

    /// The unknown a_{idx+1} for idx in 0..4.
    pub fn var(idx: usize) -> Self {
        assert!(idx < 4);
        let mut mono = [0u8; 4];
        mono[idx] = 1;
        let mut p = MultiPoly::zero();
        p.add_term(mono, Scalar::one());
        p
    }

    pub fn add_term(&mut self, mono: AMonomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(mono) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get().add(&c);
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&AMonomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn add(&self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, c.clone());
        }
        out
    }

    pub fn sub(&self, rhs: &MultiPoly) -> MultiPoly {
        self.add(&rhs.scale(&Scalar::from_int(-1)))
    }

    pub fn scale(&self, c: &Scalar) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero();
        }
        MultiPoly {
            terms: self.terms.iter().map(|(m, k)| (*m, k.mul(c))).collect(),
        }
    }

    pub fn mul(&self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = MultiPoly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                let mut m = *m1;
                for (i, e) in m2.iter().enumerate() {
                    m[i] += e;
                }
                out.add_term(m, c1.mul(c2));
            }
        }
        out
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|m| m.iter().map(|&e| e as u32).sum())
            .max()
            .unwrap_or(0)
    }

    pub fn constant_part(&self) -> Scalar {
        self.terms.get(&[0; 4]).cloned().unwrap_or_else(Scalar::zero)
    }

    /// Coefficient of the plain variable a_{idx+1}.
    pub fn linear_coeff(&self, idx: usize) -> Scalar {
        let mut mono = [0u8; 4];
        mono[idx] = 1;
        self.terms.get(&mono).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn uses_var(&self, idx: usize) -> bool {
        self.terms.keys().any(|m| m[idx] > 0)
    }

    /// Substitutes a polynomial for one unknown.
    pub fn substitute(&self, idx: usize, value: &MultiPoly) -> MultiPoly {
        let mut out = MultiPoly::zero();
        for (m, c) in &self.terms {
            let mut base = *m;
            let e = base[idx];
            base[idx] = 0;
            let mut piece = MultiPoly {
                terms: BTreeMap::from([(base, c.clone())]),
            };
            for _ in 0..e {
                piece = piece.mul(value);
            }
            out = out.add(&piece);
        }
        out
    }

    pub fn substitute_scalar(&self, idx: usize, value: &Scalar) -> MultiPoly {
        self.substitute(idx, &MultiPoly::constant(value.clone()))
    }

    /// Views the polynomial as univariate in a_{idx+1}; fails if another
    /// unknown occurs. Returns coefficients by ascending power.
    pub fn as_univariate(&self, idx: usize) -> Option<Vec<Scalar>> {
        let mut coeffs: Vec<Scalar> = vec![];
        for (m, c) in &self.terms {
            for (j, e) in m.iter().enumerate() {
                if j != idx && *e > 0 {
                    return None;
                }
            }
            let e = m[idx] as usize;
            if coeffs.len() <= e {
                coeffs.resize(e + 1, Scalar::zero());
            }
            coeffs[e] = coeffs[e].add(c);
        }
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Some(coeffs)
    }

    /// Scales so the highest appearing monomial has coefficient one.
    pub fn monic(&self) -> MultiPoly {
        match self.terms.values().next_back() {
            None => MultiPoly::zero(),
            Some(lead) => self.scale(&lead.inv().expect("nonzero leading coefficient")),
        }
    }
}

/// Monic gcd of two univariate polynomials with Scalar coefficients,
/// given by ascending-power coefficient lists.
pub fn univariate_gcd(a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
    fn trim(mut v: Vec<Scalar>) -> Vec<Scalar> {
        while v.last().is_some_and(|c| c.is_zero()) {
            v.pop();
        }
        v
    }
    fn rem(a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
        let mut r = a.to_vec();
        let db = b.len() - 1;
        let lb = &b[db];
        while r.len() > db && !r.is_empty() {
            let dr = r.len() - 1;
            let f = r[dr].div(lb).expect("nonzero leading coefficient");
            for j in 0..=db {
                let t = b[j].mul(&f);
                r[dr - db + j] = r[dr - db + j].sub(&t);
            }
            r = trim(r);
            if r.len() <= db {
                break;
            }
        }
        r
    }
    let mut a = trim(a.to_vec());
    let mut b = trim(b.to_vec());
    while !b.is_empty() {
        let r = rem(&a, &b);
        a = b;
        b = r;
    }
    if let Some(lc) = a.last().cloned() {
        let inv = lc.inv().expect("nonzero leading coefficient");
        for c in &mut a {
            *c = c.mul(&inv);
        }
    }
    a
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let mut vars = String::new();
            for (i, e) in m.iter().enumerate() {
                for _ in 0..*e {
                    if !vars.is_empty() {
                        vars.push('*');
                    }
                    vars.push_str(&format!("a{}", i + 1));
                }
            }
            if vars.is_empty() {
                write!(f, "{}", c)?;
            } else if c.is_one() {
                write!(f, "{}", vars)?;
            } else {
                write!(f, "({})*{}", c, vars)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(k: i64) -> LaurentPoly {
        LaurentPoly::monomial(k, rat_int(1))
    }

    #[test]
    fn normalize_identity_case() {
        // (s^2 - 1) / (s^2 - 1) = 1
        let p = &s(2) - &s(0);
        let x = Scalar::normalize(p.clone(), p).unwrap();
        assert!(x.is_one());
    }

    #[test]
    fn normalize_cancels_common_factor() {
        // (1 - s^4)/(1 - s^6) = (1 + s^2)/(1 + s^2 + s^4), i.e. (1-q)/(1-q^3) reduced
        let num = &s(0) - &s(4);
        let den = &s(0) - &s(6);
        let x = Scalar::normalize(num, den).unwrap();
        let expect_num = &s(0) + &s(2);
        let expect_den = &(&s(0) + &s(2)) + &s(4);
        assert_eq!(x.num(), &expect_num);
        assert_eq!(x.den(), &expect_den);
        // cross-check against (1 - q^2)/(1 - q^3)
        let alt = Scalar::normalize(&s(0) - &s(4), &s(0) - &s(6)).unwrap();
        let direct = Scalar::one()
            .sub(&Scalar::q_pow(2))
            .div(&Scalar::one().sub(&Scalar::q_pow(3)))
            .unwrap();
        assert_eq!(alt, direct);
    }

    #[test]
    fn normalize_monomial_cancellation() {
        // 2s / s^3 = 2 s^-2 = 2 q^-1
        let x = Scalar::normalize(LaurentPoly::monomial(1, rat_int(2)), s(3)).unwrap();
        assert_eq!(x, Scalar::q_pow(-1).mul(&Scalar::from_int(2)));
    }

    #[test]
    fn zero_denominator_rejected() {
        assert_eq!(
            Scalar::normalize(s(0), LaurentPoly::zero()),
            Err(Error::DivisionByZero)
        );
    }

    #[test]
    fn limit_q1_removable_pole() {
        // (1-q)(1+q^{N-2})/(1-q^{N-1}) at N=3 -> (1-q)(1+q)/(1-q^2) -> 1
        let q = Scalar::q();
        let num = Scalar::one().sub(&q).mul(&Scalar::one().add(&q));
        let den = Scalar::one().sub(&Scalar::q_pow(2));
        let x = num.div(&den).unwrap();
        assert_eq!(x.limit_q1().unwrap(), rat_int(1));
    }

    #[test]
    fn limit_q1_constant() {
        assert_eq!(Scalar::one().limit_q1().unwrap(), rat_int(1));
    }

    #[test]
    fn limit_q1_pole() {
        let x = Scalar::one()
            .div(&Scalar::one().sub(&Scalar::q()))
            .unwrap();
        assert_eq!(x.limit_q1(), Err(Error::PoleAtOne));
    }

    #[test]
    fn equals_examples() {
        let q = Scalar::q();
        assert!(q.mul(&Scalar::q_pow(-1)).is_one());
        // (q^2 - 1)/(q - 1) = q + 1
        let lhs = Scalar::q_pow(2)
            .sub(&Scalar::one())
            .div(&q.sub(&Scalar::one()))
            .unwrap();
        let rhs = q.add(&Scalar::one());
        assert!(lhs.equals(&rhs));
        assert!(!q.equals(&Scalar::q_pow(-1)));
    }

    #[test]
    fn normalize_is_idempotent() {
        let num = &(&s(3) - &s(-1)) * &(&s(2) + &s(0));
        let den = &(&s(1) + &s(0)) * &(&s(2) + &s(0));
        let x = Scalar::normalize(num, den).unwrap();
        let y = Scalar::normalize(x.num().clone(), x.den().clone()).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn multipoly_substitute() {
        // a2 -> q a1 - 1 inside a2^2
        let a2sq = MultiPoly::var(1).mul(&MultiPoly::var(1));
        let repl = MultiPoly::var(0)
            .scale(&Scalar::q())
            .sub(&MultiPoly::one());
        let out = a2sq.substitute(1, &repl);
        // (q a1 - 1)^2 = q^2 a1^2 - 2 q a1 + 1
        let mut expect = MultiPoly::zero();
        expect.add_term([2, 0, 0, 0], Scalar::q_pow(2));
        expect.add_term([1, 0, 0, 0], Scalar::q().mul(&Scalar::from_int(-2)));
        expect.add_term([0, 0, 0, 0], Scalar::one());
        assert_eq!(out, expect);
    }

    #[test]
    fn univariate_gcd_of_witness_pair() {
        // gcd(a^2 - 1, a^2 - (q + q^-1) a + 1) = 1 for generic q
        let one = Scalar::one();
        let p1 = vec![one.neg(), Scalar::zero(), one.clone()];
        let qq = Scalar::q().add(&Scalar::q_pow(-1));
        let p2 = vec![one.clone(), qq.neg(), one.clone()];
        let g = univariate_gcd(&p1, &p2);
        assert_eq!(g.len(), 1);
        assert!(g[0].is_one());
    }

    #[test]
    fn display_roundtrip_examples() {
        assert_eq!(Scalar::q().to_string(), "q");
        assert_eq!(Scalar::s_pow(1).to_string(), "q^(1/2)");
        assert_eq!(Scalar::q_pow(-1).to_string(), "q^-1");
        let x = Scalar::one()
            .sub(&Scalar::q())
            .div(&Scalar::one().sub(&Scalar::q_pow(2)))
            .unwrap();
        // normalized: numerator -1, denominator monic 1 + q^(1/2)... in s: (1-s^2)/(1-s^4) = 1/(1+s^2)
        assert_eq!(x.to_string(), "(1)/(q + 1)");
    }
}

#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;

    fn arb_scalar() -> impl Strategy<Value = Scalar> {
        // small Laurent polynomials with nonzero denominator
        let poly = proptest::collection::vec((-4i64..5, -6i64..7), 0..4).prop_map(|terms| {
            LaurentPoly::from_terms(terms.into_iter().map(|(e, c)| (e, rat_int(c))))
        });
        (poly.clone(), poly).prop_filter_map("nonzero denominator", |(n, d)| {
            if d.is_zero() {
                None
            } else {
                Some(Scalar::normalize(n, d).unwrap())
            }
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn field_add_assoc(a in arb_scalar(), b in arb_scalar(), c in arb_scalar()) {
            prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
        }

        #[test]
        fn field_mul_assoc(a in arb_scalar(), b in arb_scalar(), c in arb_scalar()) {
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        }

        #[test]
        fn field_distributive(a in arb_scalar(), b in arb_scalar(), c in arb_scalar()) {
            prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        }

        #[test]
        fn field_inverse(a in arb_scalar()) {
            if !a.is_zero() {
                prop_assert!(a.mul(&a.inv().unwrap()).is_one());
            }
        }

        #[test]
        fn normalize_idempotent(a in arb_scalar()) {
            let again = Scalar::normalize(a.num().clone(), a.den().clone()).unwrap();
            prop_assert_eq!(a, again);
        }

        #[test]
        fn limit_multiplicative(a in arb_scalar(), b in arb_scalar()) {
            if let (Ok(la), Ok(lb)) = (a.limit_q1(), b.limit_q1()) {
                let lab = a.mul(&b).limit_q1().unwrap();
                prop_assert_eq!(lab, la * lb);
            }
        }
    }
}
