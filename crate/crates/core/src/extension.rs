//! Riemannian and twisted Riemannian extensions of a base connection on
//! `u1..un` to the cotangent bundle with coordinates `u1..un, u1'..un'`.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{ExprError, GeometryError, GeometryResult};
use crate::symexpr::{q, Monomial, Poly, RatFn, Rational, VarId, VarKind};
use crate::szabo::{direction_bindings, nilpotency_degree, szabo_matrix, SzaboMatrix};
use crate::tensorcalc::{Connection, TensorField};

/// A symmetric `(0,2)` tensor on the base.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhiTensor {
    dim: usize,
    comps: Vec<RatFn>,
}

impl PhiTensor {
    pub fn zero(n: usize) -> Self {
        PhiTensor {
            dim: n,
            comps: vec![RatFn::zero(); n * n],
        }
    }

    /// Row-major components; must be symmetric and mention only base
    /// coordinates `u1..un` and parameters.
    pub fn new(n: usize, comps: Vec<RatFn>) -> GeometryResult<Self> {
        if comps.len() != n * n {
            return Err(GeometryError::DimensionMismatch {
                expected: n * n,
                actual: comps.len(),
            });
        }
        for i in 0..n {
            for j in i + 1..n {
                if comps[i * n + j] != comps[j * n + i] {
                    return Err(GeometryError::NotSymmetric(i, j));
                }
            }
        }
        for c in &comps {
            for v in c.variables() {
                let ok = match v.kind() {
                    VarKind::Parameter => true,
                    VarKind::Base => (v.index() as usize) <= n,
                    _ => false,
                };
                if !ok {
                    return Err(GeometryError::ForeignVariable(v.canonical_name()));
                }
            }
        }
        Ok(PhiTensor { dim: n, comps })
    }

    /// Builds from the upper triangle, mirroring it.
    pub fn from_upper(n: usize, f: impl Fn(usize, usize) -> RatFn) -> GeometryResult<Self> {
        let mut comps = vec![RatFn::zero(); n * n];
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                comps[j * n + i] = v.clone();
                comps[i * n + j] = v;
            }
        }
        Self::new(n, comps)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &RatFn {
        &self.comps[i * self.dim + j]
    }
}

/// Generic cubic `Φ`: each `Φ_ij` (`i <= j`) is a cubic polynomial in
/// `u1..un` with its own parameter coefficients, numbered from
/// `first_param`. Returns the tensor and the next free parameter index.
///
/// Every 3-jet at a point is attained by such a `Φ`, which is all the
/// curvature derivative sees.
pub fn generic_cubic_phi(n: usize, first_param: u32) -> (PhiTensor, u32) {
    let monomials: Vec<Monomial> = monomials_up_to(n, 3);
    let mut next = first_param;
    let mut upper = BTreeMap::new();
    for i in 0..n {
        for j in i..n {
            let mut p = Poly::zero();
            for m in &monomials {
                p = p.add(&Poly::var(VarId::param(next)).mul_term(m, &q(1)));
                next += 1;
            }
            upper.insert((i, j), RatFn::from_poly(p));
        }
    }
    let phi = PhiTensor::from_upper(n, |i, j| upper[&(i, j)].clone()).expect("generic phi is valid");
    (phi, next)
}

fn monomials_up_to(n: usize, degree: u32) -> Vec<Monomial> {
    let mut out = vec![Monomial::one()];
    let mut frontier = vec![Monomial::one()];
    for _ in 0..degree {
        let mut grown = Vec::new();
        for m in &frontier {
            for i in 1..=n as u32 {
                let next = m.mul(&Monomial::var(VarId::base(i)));
                if !grown.contains(&next) {
                    grown.push(next);
                }
            }
        }
        out.extend(grown.iter().cloned());
        frontier = grown;
    }
    out
}

/// How a metric was built.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MetricStructure {
    /// `[[B, I], [I, 0]]` with `B` the base block.
    Extension,
    General,
}

/// A symmetric metric on `2n` cotangent coordinates (or any chart for
/// `General`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Metric {
    coords: Vec<VarId>,
    comps: Vec<RatFn>,
    structure: MetricStructure,
    inverse: Option<Vec<RatFn>>,
}

impl Metric {
    /// A metric without a known inverse. Levi-Civita is unavailable for it.
    pub fn general(coords: Vec<VarId>, comps: Vec<RatFn>) -> GeometryResult<Self> {
        let n = coords.len();
        if comps.len() != n * n {
            return Err(GeometryError::DimensionMismatch {
                expected: n * n,
                actual: comps.len(),
            });
        }
        for i in 0..n {
            for j in i + 1..n {
                if comps[i * n + j] != comps[j * n + i] {
                    return Err(GeometryError::NotSymmetric(i, j));
                }
            }
        }
        Ok(Metric {
            coords,
            comps,
            structure: MetricStructure::General,
            inverse: None,
        })
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[VarId] {
        &self.coords
    }

    pub fn structure(&self) -> MetricStructure {
        self.structure
    }

    pub fn get(&self, i: usize, j: usize) -> &RatFn {
        &self.comps[i * self.dim() + j]
    }

    /// `g^{ij}`, when known in closed form.
    pub fn inverse(&self, i: usize, j: usize) -> Option<&RatFn> {
        self.inverse.as_ref().map(|inv| &inv[i * self.dim() + j])
    }
}

/// `g_∇ = 2 du_i∘du_i' - 2 u_k' Γ^k_ij du_i∘du_j`.
pub fn riemannian_extension(c: &Connection) -> Metric {
    twisted_extension(c, &PhiTensor::zero(c.dim())).expect("dimensions agree")
}

/// Base block `Φ_ij - 2 u_k' Γ^k_ij`, identity off-diagonal blocks, zero
/// fiber block.
pub fn twisted_extension(c: &Connection, phi: &PhiTensor) -> GeometryResult<Metric> {
    let n = c.dim();
    if phi.dim() != n {
        return Err(GeometryError::DimensionMismatch {
            expected: n,
            actual: phi.dim(),
        });
    }
    let base: Vec<RatFn> = (0..n * n)
        .map(|flat| {
            let (i, j) = (flat / n, flat % n);
            let contraction: RatFn = (0..n)
                .map(|k| RatFn::var(VarId::fiber(k as u32 + 1)) * c.gamma(k, i, j))
                .sum();
            phi.get(i, j) - contraction.scale(&q(2))
        })
        .collect();
    let big = 2 * n;
    let mut comps = vec![RatFn::zero(); big * big];
    let mut inverse = vec![RatFn::zero(); big * big];
    for i in 0..n {
        for j in 0..n {
            comps[i * big + j] = base[i * n + j].clone();
            inverse[(n + i) * big + n + j] = -&base[i * n + j];
        }
        comps[i * big + n + i] = RatFn::one();
        comps[(n + i) * big + i] = RatFn::one();
        inverse[i * big + n + i] = RatFn::one();
        inverse[(n + i) * big + i] = RatFn::one();
    }
    let coords = Connection::zero_on_cotangent(n).coords().to_vec();
    Ok(Metric {
        coords,
        comps,
        structure: MetricStructure::Extension,
        inverse: Some(inverse),
    })
}

/// `Γ^k_ij = ½ g^{kl}(∂_i g_jl + ∂_j g_il - ∂_l g_ij)`.
pub fn levi_civita(g: &Metric) -> GeometryResult<Connection> {
    if g.inverse.is_none() {
        return Err(GeometryError::NoClosedFormInverse);
    }
    let n = g.dim();
    // dg[m][i][j] = ∂_m g_ij
    let dg: Vec<RatFn> = (0..n * n * n)
        .into_par_iter()
        .map(|flat| g.comps[flat % (n * n)].differentiate(g.coords[flat / (n * n)]))
        .collect();
    let d = |m: usize, i: usize, j: usize| &dg[(m * n + i) * n + j];
    // first kind, [l][i][j]
    let half = Rational::new(1.into(), 2.into());
    let first: Vec<RatFn> = (0..n * n * n)
        .into_par_iter()
        .map(|flat| {
            let (l, i, j) = (flat / (n * n), (flat / n) % n, flat % n);
            (d(i, j, l) + d(j, i, l) - d(l, i, j)).scale(&half)
        })
        .collect();
    let mut c = Connection::zero_on(g.coords.clone());
    let gammas: Vec<((usize, usize, usize), RatFn)> = (0..n * n * n)
        .into_par_iter()
        .map(|flat| {
            let (k, i, j) = (flat / (n * n), (flat / n) % n, flat % n);
            let v = (0..n)
                .filter_map(|l| {
                    let inv = g.inverse(k, l).expect("inverse present");
                    (!inv.is_zero()).then(|| inv * &first[(l * n + i) * n + j])
                })
                .sum();
            ((k, i, j), v)
        })
        .collect();
    for ((k, i, j), v) in gammas {
        c.set(k, i, j, v);
    }
    Ok(c)
}

/// `(∇_i g)_jk = ∂_i g_jk - Γ^l_ij g_lk - Γ^l_ik g_jl`, stored as `[i, j, k]`.
pub fn metric_compatibility_residual(g: &Metric, c: &Connection) -> GeometryResult<TensorField> {
    let n = g.dim();
    if c.dim() != n {
        return Err(GeometryError::DimensionMismatch {
            expected: n,
            actual: c.dim(),
        });
    }
    let mut out = TensorField::zeros(n, 0, 3);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut acc = g.get(j, k).differentiate(g.coords[i]);
                for l in 0..n {
                    acc = acc - c.gamma(l, i, j) * g.get(l, k) - c.gamma(l, i, k) * g.get(j, l);
                }
                out.set(&[i, j, k], acc);
            }
        }
    }
    Ok(out)
}

/// `g(X, X)` at a point.
pub fn pseudo_norm(g: &Metric, x: &[RatFn], point: &BTreeMap<VarId, Rational>) -> GeometryResult<Rational> {
    let n = g.dim();
    if x.len() != n {
        return Err(GeometryError::DimensionMismatch {
            expected: n,
            actual: x.len(),
        });
    }
    let mut total = RatFn::zero();
    for i in 0..n {
        for j in 0..n {
            if !g.get(i, j).is_zero() {
                total = total + g.get(i, j) * &x[i] * &x[j];
            }
        }
    }
    Ok(total.evaluate(point)?)
}

/// Szabo data for a twisted extension along chosen directions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionSzaboReport {
    pub matrix: SzaboMatrix,
    /// Entries of the generic Szabo matrix that are not identically zero.
    pub support: Vec<(usize, usize)>,
    /// Nilpotency degree per direction (`None`: not nilpotent).
    pub nilpotency: Vec<Option<usize>>,
    /// `g(X, X)` per direction, when the point fixes every coordinate.
    pub pseudo_norms: Vec<Option<Rational>>,
}

pub fn extension_szabo_report(
    c: &Connection,
    phi: &PhiTensor,
    directions: &[Vec<Rational>],
    point: &BTreeMap<VarId, Rational>,
) -> GeometryResult<ExtensionSzaboReport> {
    let g = twisted_extension(c, phi)?;
    let lc = levi_civita(&g)?;
    let matrix = szabo_matrix(&lc);
    let support = matrix.support();
    let mut nilpotency = Vec::with_capacity(directions.len());
    let mut pseudo_norms = Vec::with_capacity(directions.len());
    for dir in directions {
        if dir.len() != g.dim() {
            return Err(GeometryError::DimensionMismatch {
                expected: g.dim(),
                actual: dir.len(),
            });
        }
        let bindings = direction_bindings(&matrix, dir);
        nilpotency.push(nilpotency_degree(&matrix, &bindings, point)?);
        let x: Vec<RatFn> = dir.iter().cloned().map(RatFn::constant).collect();
        pseudo_norms.push(match pseudo_norm(&g, &x, point) {
            Ok(v) => Some(v),
            Err(GeometryError::Expr(ExprError::UnboundVariable(_))) => None,
            Err(e) => return Err(e),
        });
    }
    Ok(ExtensionSzaboReport {
        matrix,
        support,
        nilpotency,
        pseudo_norms,
    })
}
