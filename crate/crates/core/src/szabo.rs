//! The affine Szabo operator `S(X)Y = (∇_X R)(Y, X)X` in a generic direction
//! `X = Σ α_i ∂_i`, its characteristic polynomial and nilpotency degrees.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::ExprError;
use crate::symexpr::{q, Monomial, Poly, RatFn, Rational, VarId, VarKind};
use crate::tensorcalc::{cov_deriv_curvature, Connection};

/// Matrix of `S(X)` in the coordinate frame; column `m` is `S(X)∂_m`.
/// Entries are cubic forms in the direction variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SzaboMatrix {
    dim: usize,
    directions: Vec<VarId>,
    entries: Vec<RatFn>,
}

impl SzaboMatrix {
    pub fn from_entries(directions: Vec<VarId>, entries: Vec<RatFn>) -> Self {
        let dim = directions.len();
        assert_eq!(entries.len(), dim * dim, "square matrix");
        SzaboMatrix { dim, directions, entries }
    }

    pub fn zero(dim: usize) -> Self {
        let directions = (1..=dim as u32).map(VarId::direction).collect();
        Self::from_entries(directions, vec![RatFn::zero(); dim * dim])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn directions(&self) -> &[VarId] {
        &self.directions
    }

    /// Entry in row `row`, column `col`.
    pub fn entry(&self, row: usize, col: usize) -> &RatFn {
        &self.entries[row * self.dim + col]
    }

    pub fn entries(&self) -> &[RatFn] {
        &self.entries
    }

    pub fn column(&self, col: usize) -> Vec<RatFn> {
        (0..self.dim).map(|r| self.entry(r, col).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(RatFn::is_zero)
    }

    pub fn trace(&self) -> RatFn {
        (0..self.dim).map(|i| self.entry(i, i).clone()).sum()
    }

    /// `(row, col)` positions of entries that are not identically zero.
    pub fn support(&self) -> Vec<(usize, usize)> {
        (0..self.dim)
            .flat_map(|r| (0..self.dim).map(move |c| (r, c)))
            .filter(|&(r, c)| !self.entry(r, c).is_zero())
            .collect()
    }

    /// True when every entry is zero or a homogeneous cubic in the direction
    /// variables (with a direction-free denominator).
    pub fn is_cubic_in_directions(&self) -> bool {
        let is_dir = |v: VarId| v.kind() == VarKind::Direction;
        self.entries.iter().all(|e| {
            e.is_zero()
                || (e.denom().variables().into_iter().all(|v| !is_dir(v))
                    && e.numer().terms().all(|(m, _)| m.degree_in(is_dir) == 3))
        })
    }

    /// Substitutes `α_i -> β α_i` for every direction variable.
    pub fn scale_direction(&self, beta: &RatFn) -> SzaboMatrix {
        let bindings: BTreeMap<VarId, RatFn> = self
            .directions
            .iter()
            .map(|&v| (v, beta * RatFn::var(v)))
            .collect();
        self.map(|e| e.substitute(&bindings).expect("polynomial substitution"))
    }

    /// Applies rational values to variables (directions, coordinates or
    /// parameters); remaining variables stay symbolic.
    pub fn specialize(&self, values: &BTreeMap<VarId, Rational>) -> Result<SzaboMatrix, ExprError> {
        let entries = self
            .entries
            .par_iter()
            .map(|e| e.specialize(values))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(SzaboMatrix { entries, ..self.clone() })
    }

    fn map(&self, f: impl Fn(&RatFn) -> RatFn + Sync + Send) -> SzaboMatrix {
        SzaboMatrix {
            entries: self.entries.par_iter().map(f).collect(),
            ..self.clone()
        }
    }

    pub fn matmul(&self, other: &SzaboMatrix) -> SzaboMatrix {
        let n = self.dim;
        let entries = (0..n * n)
            .into_par_iter()
            .map(|flat| {
                let (r, c) = (flat / n, flat % n);
                (0..n).map(|k| self.entry(r, k) * other.entry(k, c)).sum()
            })
            .collect();
        SzaboMatrix { entries, ..self.clone() }
    }
}

/// Coefficients `σ_1..σ_n` of `P(λ) = λ^n - σ_1 λ^{n-1} + ... + (-1)^n σ_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharPolyCoeffs {
    pub sigma: Vec<RatFn>,
}

impl CharPolyCoeffs {
    pub fn all_zero(&self) -> bool {
        self.sigma.iter().all(RatFn::is_zero)
    }
}

/// Column `m` holds the components of `Σ α_i α_j α_k (∇_i R)(∂_m, ∂_j)∂_k`.
pub fn szabo_matrix(c: &Connection) -> SzaboMatrix {
    let n = c.dim();
    let nabla_r = cov_deriv_curvature(c);
    let directions: Vec<VarId> = (0..n).map(|i| c.direction_var(i)).collect();
    let entries = (0..n * n)
        .into_par_iter()
        .map(|flat| {
            let (l, m) = (flat / n, flat % n);
            // Group by direction monomial before multiplying out.
            let mut by_mono: BTreeMap<Monomial, RatFn> = BTreeMap::new();
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        // (∇_i R)(∂_m, ∂_j)∂_k has components (∇_i R)^l_{kmj}.
                        let comp = nabla_r.get(&[l, i, k, m, j]);
                        if comp.is_zero() {
                            continue;
                        }
                        let mono = Monomial::from_pairs([(directions[i], 1), (directions[j], 1), (directions[k], 1)]);
                        let slot = by_mono.entry(mono).or_default();
                        *slot = &*slot + comp;
                    }
                }
            }
            by_mono
                .into_iter()
                .map(|(mono, coeff)| coeff * RatFn::from_poly(Poly::term(q(1), mono)))
                .sum()
        })
        .collect();
    SzaboMatrix::from_entries(directions, entries)
}

/// Faddeev–LeVerrier over the field of rational functions.
pub fn char_poly(m: &SzaboMatrix) -> CharPolyCoeffs {
    let n = m.dim();
    let identity = |scale: &RatFn| {
        let mut e = vec![RatFn::zero(); n * n];
        for i in 0..n {
            e[i * n + i] = scale.clone();
        }
        SzaboMatrix { entries: e, ..m.clone() }
    };
    // c[k] is the coefficient of λ^k in det(λI - A).
    let mut c = vec![RatFn::zero(); n + 1];
    c[n] = RatFn::one();
    let mut mk = identity(&RatFn::one());
    for k in 1..=n {
        if k > 1 {
            let am = m.matmul(&mk);
            let shift = identity(&c[n - k + 1]);
            mk = SzaboMatrix {
                entries: am.entries.iter().zip(&shift.entries).map(|(a, b)| a + b).collect(),
                ..am
            };
        }
        // tr(A M_k) needs only the diagonal of the product.
        let tr: RatFn = (0..n)
            .into_par_iter()
            .map(|i| (0..n).map(|j| m.entry(i, j) * mk.entry(j, i)).sum::<RatFn>())
            .collect::<Vec<_>>()
            .into_iter()
            .sum();
        c[n - k] = tr.scale(&Rational::new((-1).into(), (k as i64).into()));
    }
    let sigma = (1..=n)
        .map(|k| if k % 2 == 0 { c[n - k].clone() } else { c[n - k].neg() })
        .collect();
    CharPolyCoeffs { sigma }
}

/// Verdict of the affine Szabo test with the `σ` coefficients as witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SzaboVerdict {
    pub is_szabo: bool,
    pub coefficients: CharPolyCoeffs,
}

/// Affine Szabo on the whole chart: every `σ_k` vanishes identically in the
/// direction variables and the coordinates jointly.
pub fn is_affine_szabo(c: &Connection) -> SzaboVerdict {
    verdict(char_poly(&szabo_matrix(c)))
}

/// Affine Szabo at a single point: coordinates are substituted first.
pub fn is_affine_szabo_at(c: &Connection, point: &BTreeMap<VarId, Rational>) -> Result<SzaboVerdict, ExprError> {
    let m = szabo_matrix(c).specialize(point)?;
    Ok(verdict(char_poly(&m)))
}

fn verdict(coefficients: CharPolyCoeffs) -> SzaboVerdict {
    SzaboVerdict {
        is_szabo: coefficients.all_zero(),
        coefficients,
    }
}

/// Matrix–vector product `S(X)y`.
pub fn szabo_apply(m: &SzaboMatrix, y: &[RatFn]) -> Vec<RatFn> {
    assert_eq!(y.len(), m.dim(), "vector length");
    (0..m.dim())
        .map(|r| (0..m.dim()).map(|c| m.entry(r, c) * &y[c]).sum())
        .collect()
}

/// The generic direction `(α_1, ..., α_n)` as a vector.
pub fn direction_vector(m: &SzaboMatrix) -> Vec<RatFn> {
    m.directions().iter().map(|&v| RatFn::var(v)).collect()
}

/// Binds direction variables to the components of a concrete vector.
pub fn direction_bindings(m: &SzaboMatrix, components: &[Rational]) -> BTreeMap<VarId, Rational> {
    assert_eq!(components.len(), m.dim(), "direction length");
    m.directions().iter().copied().zip(components.iter().cloned()).collect()
}

/// Smallest `k` in `1..=dim` with `M^k = 0` after substituting the direction
/// and the point; `None` if `M^dim != 0`. Variables left unbound (for example
/// symbolic parameters) are kept, and vanishing is then decided identically.
pub fn nilpotency_degree(
    m: &SzaboMatrix,
    direction: &BTreeMap<VarId, Rational>,
    point: &BTreeMap<VarId, Rational>,
) -> Result<Option<usize>, ExprError> {
    let mut values = direction.clone();
    values.extend(point.iter().map(|(k, v)| (*k, v.clone())));
    let a = m.specialize(&values)?;
    Ok(nilpotency_of(&a))
}

/// Nilpotency degree of a matrix whose entries are already in final form.
pub fn nilpotency_of(a: &SzaboMatrix) -> Option<usize> {
    if a.is_zero() {
        return Some(1);
    }
    let mut power = a.clone();
    for k in 2..=a.dim() {
        power = power.matmul(a);
        if power.is_zero() {
            return Some(k);
        }
    }
    None
}
