use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::monomial::Monomial;
use super::var::VarId;
use super::Rational;
use crate::error::ExprError;

/// Sparse multivariate polynomial with rational coefficients.
///
/// Canonical: no zero coefficients are stored, so equal polynomials have equal
/// term maps and the zero polynomial is the empty map.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::term(c, Monomial::one())
    }

    pub fn from_int(c: i64) -> Self {
        Self::constant(Rational::from_integer(c.into()))
    }

    pub fn var(v: VarId) -> Self {
        Self::term(Rational::one(), Monomial::var(v))
    }

    pub fn term(c: Rational, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Rational)>>(terms: I) -> Self {
        let mut p = Poly::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending monomial order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    /// Single term `c * m`, if the polynomial has exactly one.
    pub fn as_monomial(&self) -> Option<(&Monomial, &Rational)> {
        (self.terms.len() == 1).then(|| self.terms.iter().next().unwrap())
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn variables(&self) -> BTreeSet<VarId> {
        self.terms.keys().flat_map(|m| m.vars()).collect()
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let (mut big, small) = if self.len() >= other.len() {
            (self.clone(), other)
        } else {
            (other.clone(), self)
        };
        for (m, c) in &small.terms {
            big.add_term(m.clone(), c.clone());
        }
        big
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }

    pub fn scale(&self, k: &Rational) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect(),
        }
    }

    pub fn mul_term(&self, m: &Monomial, k: &Rational) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(n, c)| (n.mul(m), c * k)).collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        if let Some((m, c)) = other.as_monomial() {
            return self.mul_term(m, c);
        }
        if let Some((m, c)) = self.as_monomial() {
            return other.mul_term(m, c);
        }
        let mut acc: HashMap<Monomial, Rational> = HashMap::with_capacity(self.len() * other.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m = ma.mul(mb);
                let c = ca * cb;
                match acc.entry(m) {
                    std::collections::hash_map::Entry::Vacant(e) => {
                        e.insert(c);
                    }
                    std::collections::hash_map::Entry::Occupied(mut e) => *e.get_mut() += c,
                }
            }
        }
        Poly {
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    pub fn pow(&self, mut exp: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&base);
            }
            exp >>= 1;
            if exp > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn derivative(&self, v: VarId) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            if let Some((e, dm)) = m.derivative(v) {
                out.add_term(dm, c * Rational::from_integer(e.into()));
            }
        }
        out
    }

    /// Greatest monomial dividing every term (one for the zero polynomial).
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else {
            return Monomial::one();
        };
        let mut g = first.clone();
        for m in it {
            if g.is_one() {
                break;
            }
            g = g.gcd(m);
        }
        g
    }

    /// Divides every term by a monomial that is known to divide it.
    pub fn div_monomial(&self, d: &Monomial) -> Poly {
        if d.is_one() {
            return self.clone();
        }
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.div(d).expect("monomial divides every term"), c.clone()))
                .collect(),
        }
    }

    /// Exact quotient `self / divisor` when the division leaves no remainder.
    pub fn div_exact(&self, divisor: &Poly) -> Option<Poly> {
        let (dm, dc) = divisor.leading_term()?;
        if let Some(c) = divisor.as_constant() {
            return Some(self.scale(&c.recip()));
        }
        let mut rem = self.clone();
        let mut quot = Poly::zero();
        while let Some((rm, rc)) = rem.leading_term() {
            let qm = rm.div(dm)?;
            let qc = rc / dc;
            rem = rem.sub(&divisor.mul_term(&qm, &qc));
            quot.add_term(qm, qc);
        }
        Some(quot)
    }

    /// `(lcm of coefficient denominators, gcd of coefficient numerators)`.
    pub(crate) fn integer_content(&self) -> (BigInt, BigInt) {
        let mut lcm = BigInt::one();
        let mut gcd = BigInt::zero();
        for c in self.terms.values() {
            lcm = lcm.lcm(c.denom());
            gcd = gcd.gcd(c.numer());
        }
        (lcm, gcd)
    }

    pub fn evaluate(&self, point: &dyn Fn(VarId) -> Option<Rational>) -> Result<Rational, ExprError> {
        let mut total = Rational::zero();
        let mut cache: HashMap<VarId, Rational> = HashMap::new();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for &(v, e) in m.factors() {
                let x = match cache.get(&v) {
                    Some(x) => x.clone(),
                    None => {
                        let x = point(v).ok_or_else(|| ExprError::UnboundVariable(v.canonical_name()))?;
                        cache.insert(v, x.clone());
                        x
                    }
                };
                t *= pow_rational(&x, e);
            }
            total += t;
        }
        Ok(total)
    }

    /// Substitutes polynomials for variables; unbound variables are kept.
    pub fn substitute_poly(&self, bindings: &dyn Fn(VarId) -> Option<Poly>) -> Poly {
        let mut powers: HashMap<(VarId, u32), Poly> = HashMap::new();
        let mut images: HashMap<VarId, Option<Poly>> = HashMap::new();
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut kept = Monomial::one();
            let mut t = Poly::constant(c.clone());
            for &(v, e) in m.factors() {
                let image = images.entry(v).or_insert_with(|| bindings(v));
                match image {
                    None => kept = kept.mul(&Monomial::var_pow(v, e)),
                    Some(p) => {
                        let pe = powers.entry((v, e)).or_insert_with(|| p.pow(e));
                        t = t.mul(pe);
                    }
                }
            }
            let t = t.mul_term(&kept, &Rational::one());
            for (tm, tc) in t.terms {
                out.add_term(tm, tc);
            }
        }
        out
    }

    /// Coefficients with respect to the variables selected by `pred`: maps each
    /// monomial in those variables to its cofactor polynomial.
    pub fn coefficients_in(&self, pred: impl Fn(VarId) -> bool) -> BTreeMap<Monomial, Poly> {
        let mut out: BTreeMap<Monomial, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (inside, outside) = m.split(&pred);
            out.entry(inside).or_default().add_term(outside, c.clone());
        }
        out
    }
}

pub(crate) fn pow_rational(x: &Rational, e: u32) -> Rational {
    num_traits::pow(x.clone(), e as usize)
}
