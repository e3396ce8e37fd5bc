use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use super::monomial::Monomial;
use super::poly::Poly;
use super::var::VarId;
use super::Rational;
use crate::error::ExprError;

/// Quotient of two polynomials.
///
/// Normal form: the denominator is nonzero; a constant denominator is folded
/// into the numerator (so polynomials always have denominator one); otherwise
/// the common monomial factor is cancelled, the exact quotient is taken when
/// the denominator divides the numerator, integer content is removed jointly
/// and the denominator's leading coefficient is positive. No general gcd is
/// taken, so equality is decided by cross multiplication.
#[derive(Clone, Debug)]
pub struct RatFn {
    num: Poly,
    den: Poly,
}

impl RatFn {
    pub fn zero() -> Self {
        RatFn {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Self {
        Self::from_poly(Poly::one())
    }

    pub fn from_poly(p: Poly) -> Self {
        RatFn { num: p, den: Poly::one() }
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    pub fn from_int(c: i64) -> Self {
        Self::from_poly(Poly::from_int(c))
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        Self::constant(Rational::new(n.into(), d.into()))
    }

    pub fn var(v: VarId) -> Self {
        Self::from_poly(Poly::var(v))
    }

    /// `num / den`, normalized. Fails when `den` is the zero polynomial.
    pub fn new(num: Poly, den: Poly) -> Result<Self, ExprError> {
        if den.is_zero() {
            return Err(ExprError::DivisionByZero);
        }
        Ok(Self::normalize(num, den))
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn as_poly(&self) -> Option<&Poly> {
        self.is_polynomial().then_some(&self.num)
    }

    pub fn as_constant(&self) -> Option<Rational> {
        if self.is_polynomial() {
            self.num.as_constant()
        } else {
            None
        }
    }

    pub fn variables(&self) -> BTreeSet<VarId> {
        let mut vars = self.num.variables();
        vars.extend(self.den.variables());
        vars
    }

    fn normalize(num: Poly, den: Poly) -> RatFn {
        debug_assert!(!den.is_zero());
        if num.is_zero() {
            return RatFn::zero();
        }
        if let Some(c) = den.as_constant() {
            let num = if c.is_one() { num } else { num.scale(&c.recip()) };
            return RatFn::from_poly(num);
        }
        let common = num.monomial_content().gcd(&den.monomial_content());
        let (mut num, mut den) = (num.div_monomial(&common), den.div_monomial(&common));
        if let Some(c) = den.as_constant() {
            return RatFn::from_poly(num.scale(&c.recip()));
        }
        if den.as_monomial().is_none() {
            if let Some(q) = num.div_exact(&den) {
                return RatFn::from_poly(q);
            }
        }
        let (lcm_n, _) = num.integer_content();
        let (lcm_d, _) = den.integer_content();
        let mut k = Rational::from_integer(num_integer::Integer::lcm(&lcm_n, &lcm_d));
        if den.leading_term().is_some_and(|(_, c)| c.is_negative()) {
            k = -k;
        }
        if !k.is_one() {
            num = num.scale(&k);
            den = den.scale(&k);
        }
        let (_, g_num) = num.integer_content();
        let (_, g_den) = den.integer_content();
        let g = num_integer::Integer::gcd(&g_num, &g_den);
        if !g.is_one() {
            let inv = Rational::new(One::one(), g);
            num = num.scale(&inv);
            den = den.scale(&inv);
        }
        RatFn { num, den }
    }

    pub fn add(&self, other: &RatFn) -> RatFn {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.den == other.den {
            if self.den.is_one() {
                return RatFn::from_poly(self.num.add(&other.num));
            }
            return Self::normalize(self.num.add(&other.num), self.den.clone());
        }
        if other.den.is_one() {
            return Self::normalize(self.num.add(&other.num.mul(&self.den)), self.den.clone());
        }
        if self.den.is_one() {
            return Self::normalize(self.num.mul(&other.den).add(&other.num), other.den.clone());
        }
        // Monomial denominators: use their lcm instead of the product.
        if let (Some((ma, ca)), Some((mb, cb))) = (self.den.as_monomial(), other.den.as_monomial()) {
            let g = ma.gcd(mb);
            let fa = mb.div(&g).unwrap();
            let fb = ma.div(&g).unwrap();
            let num = self
                .num
                .mul_term(&fa, &cb.clone())
                .add(&other.num.mul_term(&fb, &ca.clone()));
            let den = Poly::term(ca * cb, ma.mul(&fa));
            return Self::normalize(num, den);
        }
        Self::normalize(
            self.num.mul(&other.den).add(&other.num.mul(&self.den)),
            self.den.mul(&other.den),
        )
    }

    pub fn neg(&self) -> RatFn {
        RatFn {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, other: &RatFn) -> RatFn {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &RatFn) -> RatFn {
        if self.is_zero() || other.is_zero() {
            return RatFn::zero();
        }
        if self.den.is_one() && other.den.is_one() {
            return RatFn::from_poly(self.num.mul(&other.num));
        }
        Self::normalize(self.num.mul(&other.num), self.den.mul(&other.den))
    }

    pub fn scale(&self, k: &Rational) -> RatFn {
        if k.is_zero() {
            return RatFn::zero();
        }
        RatFn {
            num: self.num.scale(k),
            den: self.den.clone(),
        }
    }

    pub fn recip(&self) -> Result<RatFn, ExprError> {
        RatFn::new(self.den.clone(), self.num.clone())
    }

    pub fn checked_div(&self, other: &RatFn) -> Result<RatFn, ExprError> {
        if other.is_zero() {
            return Err(ExprError::DivisionByZero);
        }
        Ok(Self::normalize(self.num.mul(&other.den), self.den.mul(&other.num)))
    }

    pub fn pow(&self, exp: u32) -> RatFn {
        if exp == 0 {
            return RatFn::one();
        }
        Self::normalize(self.num.pow(exp), self.den.pow(exp))
    }

    /// Partial derivative by the quotient rule.
    pub fn differentiate(&self, v: VarId) -> RatFn {
        let dn = self.num.derivative(v);
        if self.den.is_one() {
            return RatFn::from_poly(dn);
        }
        let dd = self.den.derivative(v);
        if dd.is_zero() {
            return Self::normalize(dn, self.den.clone());
        }
        Self::normalize(dn.mul(&self.den).sub(&self.num.mul(&dd)), self.den.pow(2))
    }

    /// Exact value at a point. Every variable must be bound.
    pub fn evaluate(&self, point: &BTreeMap<VarId, Rational>) -> Result<Rational, ExprError> {
        self.evaluate_with(&|v| point.get(&v).cloned())
    }

    pub fn evaluate_with(&self, point: &dyn Fn(VarId) -> Option<Rational>) -> Result<Rational, ExprError> {
        let d = self.den.evaluate(point)?;
        if d.is_zero() {
            return Err(ExprError::DivisionByZero);
        }
        let n = self.num.evaluate(point)?;
        Ok(n / d)
    }

    /// Simultaneous substitution; unbound variables are left in place.
    pub fn substitute(&self, bindings: &BTreeMap<VarId, RatFn>) -> Result<RatFn, ExprError> {
        if bindings.values().all(RatFn::is_polynomial) {
            let sub = |v: VarId| bindings.get(&v).map(|r| r.num.clone());
            let num = self.num.substitute_poly(&sub);
            let den = self.den.substitute_poly(&sub);
            if den.is_zero() {
                return Err(ExprError::DenominatorVanishes);
            }
            return Ok(Self::normalize(num, den));
        }
        let num = substitute_rational(&self.num, bindings);
        let den = substitute_rational(&self.den, bindings);
        if den.is_zero() {
            return Err(ExprError::DenominatorVanishes);
        }
        Ok(num.checked_div(&den).expect("denominator checked nonzero"))
    }

    /// Substitutes rational constants for variables, keeping the rest.
    pub fn specialize(&self, values: &BTreeMap<VarId, Rational>) -> Result<RatFn, ExprError> {
        let bindings = values
            .iter()
            .map(|(v, c)| (*v, RatFn::constant(c.clone())))
            .collect();
        self.substitute(&bindings)
    }

    /// Collects a polynomial by the variables selected by `pred`. Only valid
    /// for polynomial values or when the denominator is free of those
    /// variables; each coefficient keeps the original denominator.
    pub fn coefficients_in(&self, pred: impl Fn(VarId) -> bool) -> BTreeMap<Monomial, RatFn> {
        debug_assert!(self.den.variables().into_iter().all(|v| !pred(v)));
        self.num
            .coefficients_in(pred)
            .into_iter()
            .map(|(m, c)| (m, RatFn::normalize(c, self.den.clone())))
            .collect()
    }
}

fn substitute_rational(p: &Poly, bindings: &BTreeMap<VarId, RatFn>) -> RatFn {
    let mut out = RatFn::zero();
    for (m, c) in p.terms() {
        let mut kept = Monomial::one();
        let mut t = RatFn::constant(c.clone());
        for &(v, e) in m.factors() {
            match bindings.get(&v) {
                Some(r) => t = t.mul(&r.pow(e)),
                None => kept = kept.mul(&Monomial::var_pow(v, e)),
            }
        }
        out = out.add(&t.mul(&RatFn::from_poly(Poly::term(Rational::one(), kept))));
    }
    out
}

impl PartialEq for RatFn {
    fn eq(&self, other: &Self) -> bool {
        if self.den == other.den {
            return self.num == other.num;
        }
        self.num.mul(&other.den) == other.num.mul(&self.den)
    }
}

impl Eq for RatFn {}

impl Default for RatFn {
    fn default() -> Self {
        RatFn::zero()
    }
}

impl From<Poly> for RatFn {
    fn from(p: Poly) -> Self {
        RatFn::from_poly(p)
    }
}

impl From<i64> for RatFn {
    fn from(c: i64) -> Self {
        RatFn::from_int(c)
    }
}

impl From<Rational> for RatFn {
    fn from(c: Rational) -> Self {
        RatFn::constant(c)
    }
}

impl From<VarId> for RatFn {
    fn from(v: VarId) -> Self {
        RatFn::var(v)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl $tr<&RatFn> for &RatFn {
            type Output = RatFn;
            fn $method(self, rhs: &RatFn) -> RatFn {
                RatFn::$method(self, rhs)
            }
        }
        impl $tr<RatFn> for RatFn {
            type Output = RatFn;
            fn $method(self, rhs: RatFn) -> RatFn {
                RatFn::$method(&self, &rhs)
            }
        }
        impl $tr<&RatFn> for RatFn {
            type Output = RatFn;
            fn $method(self, rhs: &RatFn) -> RatFn {
                RatFn::$method(&self, rhs)
            }
        }
        impl $tr<RatFn> for &RatFn {
            type Output = RatFn;
            fn $method(self, rhs: RatFn) -> RatFn {
                RatFn::$method(self, &rhs)
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Neg for RatFn {
    type Output = RatFn;
    fn neg(self) -> RatFn {
        RatFn::neg(&self)
    }
}

impl Neg for &RatFn {
    type Output = RatFn;
    fn neg(self) -> RatFn {
        RatFn::neg(self)
    }
}

impl std::iter::Sum for RatFn {
    fn sum<I: Iterator<Item = RatFn>>(iter: I) -> RatFn {
        iter.fold(RatFn::zero(), |acc, x| acc.add(&x))
    }
}

impl fmt::Display for RatFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::format::format_expr(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u(i: u32) -> RatFn {
        RatFn::var(VarId::base(i))
    }

    #[test]
    fn additive_identity() {
        let p = &u(1) * &u(2) + RatFn::from_int(3);
        assert_eq!(&RatFn::zero() + &p, p);
    }

    #[test]
    fn common_denominator() {
        let x = u(1).checked_div(&u(2)).unwrap();
        let y = RatFn::one().checked_div(&u(2)).unwrap();
        let expected = RatFn::new(Poly::var(VarId::base(1)).add(&Poly::one()), Poly::var(VarId::base(2))).unwrap();
        let sum = &x + &y;
        assert_eq!(sum, expected);
        assert_eq!(sum.denom(), &Poly::var(VarId::base(2)));
    }

    #[test]
    fn same_denominator_cancels_to_one() {
        let s = &u(1) + &u(2);
        let x = u(1).checked_div(&s).unwrap();
        let y = u(2).checked_div(&s).unwrap();
        let sum = &x + &y;
        assert!(sum.is_one());
    }

    #[test]
    fn multiplicative_identity_and_cancellation() {
        let p = (&u(1) + &u(2)).checked_div(&u(1)).unwrap();
        assert_eq!(&RatFn::one() * &p, p);
        let q = u(1).checked_div(&u(2)).unwrap();
        let r = &q * &u(2);
        assert!(r.is_polynomial());
        assert_eq!(r, u(1));
    }

    #[test]
    fn normal_form_has_positive_integer_leading_denominator() {
        let half = RatFn::from_ratio(1, 2);
        let x = half.checked_div(&(RatFn::from_int(-3) * u(1) + u(2))).unwrap();
        let (_, lc) = x.denom().leading_term().unwrap();
        assert!(lc.is_positive());
        assert!(x.denom().terms().all(|(_, c)| c.is_integer()));
        assert!(x.numer().terms().all(|(_, c)| c.is_integer()));
    }

    #[test]
    fn constant_denominators_fold_into_numerator() {
        let x = u(1).checked_div(&RatFn::from_int(2)).unwrap();
        assert!(x.is_polynomial());
        assert_eq!(x.numer().coefficient(&Monomial::var(VarId::base(1))), Rational::new(1.into(), 2.into()));
    }

    #[test]
    fn division_by_zero() {
        assert_eq!(u(1).checked_div(&RatFn::zero()), Err(ExprError::DivisionByZero));
        assert_eq!(RatFn::new(Poly::one(), Poly::zero()), Err(ExprError::DivisionByZero));
    }

    #[test]
    fn derivative_of_reciprocal() {
        let x = RatFn::one().checked_div(&u(1)).unwrap();
        let expected = RatFn::from_int(-1).checked_div(&u(1).pow(2)).unwrap();
        let d = x.differentiate(VarId::base(1));
        assert_eq!(d, expected);
        assert_eq!(d.denom(), &Poly::var(VarId::base(1)).pow(2));
    }

    #[test]
    fn substitution_examples() {
        let a = VarId::param(1);
        let d = VarId::param(4);
        let x = RatFn::var(d) - RatFn::var(a);
        let b: BTreeMap<_, _> = [(a, RatFn::one()), (d, RatFn::one())].into();
        assert!(x.substitute(&b).unwrap().is_zero());

        let y = &u(1) * &u(2);
        let b: BTreeMap<_, _> = [(VarId::base(2), RatFn::one().checked_div(&u(1)).unwrap())].into();
        assert!(y.substitute(&b).unwrap().is_one());

        let z = RatFn::one().checked_div(&(&u(1) - &u(2))).unwrap();
        let b: BTreeMap<_, _> = [(VarId::base(2), u(1))].into();
        assert_eq!(z.substitute(&b), Err(ExprError::DenominatorVanishes));
    }

    #[test]
    fn evaluation_errors() {
        let x = RatFn::one().checked_div(&u(1)).unwrap();
        let p: BTreeMap<_, _> = [(VarId::base(1), Rational::zero())].into();
        assert_eq!(x.evaluate(&p), Err(ExprError::DivisionByZero));
        assert!(matches!(u(2).evaluate(&p), Err(ExprError::UnboundVariable(_))));
    }
}
