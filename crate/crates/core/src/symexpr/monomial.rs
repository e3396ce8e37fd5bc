use std::cmp::Ordering;

use smallvec::SmallVec;

use super::var::VarId;

/// A power product of variables, stored sparsely and sorted by variable.
///
/// Ordering is graded lexicographic: total degree first, then the exponent of
/// the smallest variable (`u1` before `u2` before any fiber variable, ...).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    degree: u32,
    factors: SmallVec<[(VarId, u32); 4]>,
}

impl Monomial {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn var(v: VarId) -> Self {
        Self::var_pow(v, 1)
    }

    pub fn var_pow(v: VarId, exp: u32) -> Self {
        if exp == 0 {
            return Self::one();
        }
        let mut factors = SmallVec::new();
        factors.push((v, exp));
        Monomial { degree: exp, factors }
    }

    /// Builds a monomial from arbitrary `(var, exp)` pairs; repeated variables
    /// are merged and zero exponents dropped.
    pub fn from_pairs<I: IntoIterator<Item = (VarId, u32)>>(pairs: I) -> Self {
        pairs
            .into_iter()
            .fold(Self::one(), |acc, (v, e)| acc.mul(&Self::var_pow(v, e)))
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn exponent(&self, v: VarId) -> u32 {
        self.factors
            .iter()
            .find(|(w, _)| *w == v)
            .map(|(_, e)| *e)
            .unwrap_or(0)
    }

    /// Degree restricted to variables accepted by `pred`.
    pub fn degree_in(&self, pred: impl Fn(VarId) -> bool) -> u32 {
        self.factors.iter().filter(|(v, _)| pred(*v)).map(|(_, e)| e).sum()
    }

    pub fn factors(&self) -> &[(VarId, u32)] {
        &self.factors
    }

    pub fn vars(&self) -> impl Iterator<Item = VarId> + '_ {
        self.factors.iter().map(|(v, _)| *v)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        if other.is_one() {
            return self.clone();
        }
        if self.is_one() {
            return other.clone();
        }
        let mut factors = SmallVec::with_capacity(self.factors.len() + other.factors.len());
        let (mut i, mut j) = (0, 0);
        while i < self.factors.len() && j < other.factors.len() {
            let (a, ea) = self.factors[i];
            let (b, eb) = other.factors[j];
            match a.cmp(&b) {
                Ordering::Less => {
                    factors.push((a, ea));
                    i += 1;
                }
                Ordering::Greater => {
                    factors.push((b, eb));
                    j += 1;
                }
                Ordering::Equal => {
                    factors.push((a, ea + eb));
                    i += 1;
                    j += 1;
                }
            }
        }
        factors.extend_from_slice(&self.factors[i..]);
        factors.extend_from_slice(&other.factors[j..]);
        Monomial {
            degree: self.degree + other.degree,
            factors,
        }
    }

    /// `self / other` if `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        if other.degree > self.degree {
            return None;
        }
        let mut factors = SmallVec::new();
        let mut j = 0;
        for &(v, e) in &self.factors {
            if j < other.factors.len() && other.factors[j].0 < v {
                return None;
            }
            if j < other.factors.len() && other.factors[j].0 == v {
                let d = other.factors[j].1;
                j += 1;
                match e.cmp(&d) {
                    Ordering::Less => return None,
                    Ordering::Equal => {}
                    Ordering::Greater => factors.push((v, e - d)),
                }
            } else {
                factors.push((v, e));
            }
        }
        if j < other.factors.len() {
            return None;
        }
        Some(Monomial {
            degree: self.degree - other.degree,
            factors,
        })
    }

    /// Componentwise minimum of exponents.
    pub fn gcd(&self, other: &Monomial) -> Monomial {
        let mut factors = SmallVec::new();
        let (mut i, mut j) = (0, 0);
        let mut degree = 0;
        while i < self.factors.len() && j < other.factors.len() {
            let (a, ea) = self.factors[i];
            let (b, eb) = other.factors[j];
            match a.cmp(&b) {
                Ordering::Less => i += 1,
                Ordering::Greater => j += 1,
                Ordering::Equal => {
                    let e = ea.min(eb);
                    factors.push((a, e));
                    degree += e;
                    i += 1;
                    j += 1;
                }
            }
        }
        Monomial { degree, factors }
    }

    /// Partial derivative: `(exponent, monomial / v)`, or `None` when `v` is absent.
    pub fn derivative(&self, v: VarId) -> Option<(u32, Monomial)> {
        let pos = self.factors.iter().position(|(w, _)| *w == v)?;
        let e = self.factors[pos].1;
        let mut factors = self.factors.clone();
        if e == 1 {
            factors.remove(pos);
        } else {
            factors[pos].1 = e - 1;
        }
        Some((
            e,
            Monomial {
                degree: self.degree - 1,
                factors,
            },
        ))
    }

    /// Splits off the factors whose variable satisfies `pred`.
    pub fn split(&self, pred: impl Fn(VarId) -> bool) -> (Monomial, Monomial) {
        let mut inside = Monomial::one();
        let mut outside = Monomial::one();
        for &(v, e) in &self.factors {
            let target = if pred(v) { &mut inside } else { &mut outside };
            target.factors.push((v, e));
            target.degree += e;
        }
        (inside, outside)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree.cmp(&other.degree).then_with(|| {
            for (&(a, ea), &(b, eb)) in self.factors.iter().zip(other.factors.iter()) {
                match a.cmp(&b) {
                    // `self` carries a positive power of a smaller variable.
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Equal => match ea.cmp(&eb) {
                        Ordering::Equal => continue,
                        ord => return ord,
                    },
                }
            }
            // Equal degrees and a common prefix means equal monomials.
            self.factors.len().cmp(&other.factors.len())
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
