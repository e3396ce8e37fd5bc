//! Coordinate tensor calculus over an affine connection.
//!
//! Index conventions (all indices 0-based):
//! - `Connection::gamma(k, i, j)` is `Γ^k_{ij}`, i.e. `∇_{∂_i} ∂_j = Γ^k_{ij} ∂_k`.
//! - curvature `[i, j, k, l]` is `R^i_{jkl}` with `R(∂_k, ∂_l) ∂_j = R^i_{jkl} ∂_i`.
//! - Ricci `[j, k]` is `Ric(∂_j, ∂_k) = Σ_i R^i_{kij}`.
//! - covariant derivative of Ricci `[i, j, k]` is `(∇_i Ric)_{jk}`.
//! - covariant derivative of curvature `[l, i, m, j, k]` is `(∇_i R)^l_{mjk}`.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{GeometryError, GeometryResult};
use crate::symexpr::{Monomial, RatFn, VarId, VarKind};

/// Which coordinates a connection lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoordinateClass {
    Base,
    BaseFiber,
}

/// An affine connection given by its Christoffel symbols in a chart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Connection {
    coords: Vec<VarId>,
    gamma: Vec<RatFn>,
}

impl Connection {
    /// The zero connection on base coordinates `u1..un`.
    pub fn zero(n: usize) -> Self {
        Self::zero_on((1..=n as u32).map(VarId::base).collect())
    }

    /// The zero connection on an explicit coordinate list.
    pub fn zero_on(coords: Vec<VarId>) -> Self {
        let n = coords.len();
        assert!(n > 0, "connections need at least one coordinate");
        Connection {
            coords,
            gamma: vec![RatFn::zero(); n * n * n],
        }
    }

    /// Coordinates `u1..un, u1'..un'` of a cotangent bundle.
    pub fn zero_on_cotangent(n: usize) -> Self {
        let coords = (1..=n as u32)
            .map(VarId::base)
            .chain((1..=n as u32).map(VarId::fiber))
            .collect();
        Self::zero_on(coords)
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[VarId] {
        &self.coords
    }

    pub fn coord(&self, i: usize) -> VarId {
        self.coords[i]
    }

    /// Direction variable `α` paired with coordinate `i`.
    pub fn direction_var(&self, i: usize) -> VarId {
        VarId::direction(i as u32 + 1)
    }

    pub fn coordinate_class(&self) -> CoordinateClass {
        if self.coords.iter().any(|v| v.kind() == VarKind::Fiber) {
            CoordinateClass::BaseFiber
        } else {
            CoordinateClass::Base
        }
    }

    fn idx(&self, k: usize, i: usize, j: usize) -> usize {
        let n = self.dim();
        (k * n + i) * n + j
    }

    /// `Γ^k_{ij}`.
    pub fn gamma(&self, k: usize, i: usize, j: usize) -> &RatFn {
        &self.gamma[self.idx(k, i, j)]
    }

    pub fn set(&mut self, k: usize, i: usize, j: usize, value: RatFn) {
        let at = self.idx(k, i, j);
        self.gamma[at] = value;
    }

    /// Sets `Γ^k_{ij}` and `Γ^k_{ji}`.
    pub fn set_symmetric(&mut self, k: usize, i: usize, j: usize, value: RatFn) {
        self.set(k, j, i, value.clone());
        self.set(k, i, j, value);
    }

    pub fn with_symmetric(mut self, k: usize, i: usize, j: usize, value: RatFn) -> Self {
        self.set_symmetric(k, i, j, value);
        self
    }

    /// Every Christoffel symbol may only mention this chart's coordinates and
    /// parameters.
    pub fn validate(&self) -> GeometryResult<()> {
        for g in &self.gamma {
            for v in g.variables() {
                if v.kind() != VarKind::Parameter && !self.coords.contains(&v) {
                    return Err(GeometryError::ForeignVariable(v.canonical_name()));
                }
            }
        }
        Ok(())
    }

    pub fn is_torsion_free(&self) -> bool {
        let n = self.dim();
        (0..n).all(|k| (0..n).all(|i| (i + 1..n).all(|j| self.gamma(k, i, j) == self.gamma(k, j, i))))
    }

    /// Substitutes constants for parameters (or coordinates) in every symbol.
    pub fn specialize(&self, values: &BTreeMap<VarId, crate::symexpr::Rational>) -> GeometryResult<Connection> {
        let gamma = self
            .gamma
            .iter()
            .map(|g| g.specialize(values))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Connection {
            coords: self.coords.clone(),
            gamma,
        })
    }

    /// `∂_m Γ^k_{ij}` for all `m, k, i, j`, stored as `[m][k][i][j]`.
    fn gamma_derivatives(&self) -> Vec<RatFn> {
        let n = self.dim();
        (0..n * n * n * n)
            .into_par_iter()
            .map(|flat| {
                let m = flat / (n * n * n);
                self.gamma[flat % (n * n * n)].differentiate(self.coords[m])
            })
            .collect()
    }
}

/// Dense tensor component array. Upper indices come first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TensorField {
    dim: usize,
    upper: usize,
    lower: usize,
    comps: Vec<RatFn>,
}

impl TensorField {
    pub fn zeros(dim: usize, upper: usize, lower: usize) -> Self {
        TensorField {
            dim,
            upper,
            lower,
            comps: vec![RatFn::zero(); dim.pow((upper + lower) as u32)],
        }
    }

    fn from_fn(dim: usize, upper: usize, lower: usize, f: impl Fn(&[usize]) -> RatFn + Sync) -> Self {
        let rank = upper + lower;
        let comps = (0..dim.pow(rank as u32))
            .into_par_iter()
            .map(|flat| f(&unflatten(flat, dim, rank)))
            .collect();
        TensorField { dim, upper, lower, comps }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `(upper, lower)` index counts.
    pub fn shape(&self) -> (usize, usize) {
        (self.upper, self.lower)
    }

    pub fn rank(&self) -> usize {
        self.upper + self.lower
    }

    fn flat(&self, idx: &[usize]) -> usize {
        assert_eq!(idx.len(), self.rank(), "index arity");
        idx.iter().fold(0, |acc, &i| {
            assert!(i < self.dim, "index out of range");
            acc * self.dim + i
        })
    }

    pub fn get(&self, idx: &[usize]) -> &RatFn {
        &self.comps[self.flat(idx)]
    }

    pub fn set(&mut self, idx: &[usize], value: RatFn) {
        let at = self.flat(idx);
        self.comps[at] = value;
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(RatFn::is_zero)
    }

    /// All `(multi-index, component)` pairs in lexicographic index order.
    pub fn iter(&self) -> impl Iterator<Item = (Vec<usize>, &RatFn)> {
        let (dim, rank) = (self.dim, self.rank());
        self.comps
            .iter()
            .enumerate()
            .map(move |(flat, c)| (unflatten(flat, dim, rank), c))
    }

    /// Nonzero components only.
    pub fn nonzero(&self) -> impl Iterator<Item = (Vec<usize>, &RatFn)> {
        self.iter().filter(|(_, c)| !c.is_zero())
    }
}

fn unflatten(mut flat: usize, dim: usize, rank: usize) -> Vec<usize> {
    let mut idx = vec![0; rank];
    for slot in idx.iter_mut().rev() {
        *slot = flat % dim;
        flat /= dim;
    }
    idx
}

/// `T^k_{ij} = Γ^k_{ij} - Γ^k_{ji}`, stored as `[k, i, j]`.
pub fn torsion(c: &Connection) -> TensorField {
    TensorField::from_fn(c.dim(), 1, 2, |ix| c.gamma(ix[0], ix[1], ix[2]) - c.gamma(ix[0], ix[2], ix[1]))
}

/// Curvature `R^i_{jkl}`, stored as `[i, j, k, l]`:
/// `∂_k Γ^i_{lj} - ∂_l Γ^i_{kj} + Γ^i_{kp} Γ^p_{lj} - Γ^i_{lp} Γ^p_{kj}`.
pub fn curvature(c: &Connection) -> TensorField {
    let n = c.dim();
    let dg = c.gamma_derivatives();
    let d = |m: usize, k: usize, i: usize, j: usize| &dg[((m * n + k) * n + i) * n + j];
    let mut r = TensorField::from_fn(n, 1, 3, |ix| {
        let (i, j, k, l) = (ix[0], ix[1], ix[2], ix[3]);
        if k >= l {
            return RatFn::zero();
        }
        let mut acc = d(k, i, l, j) - d(l, i, k, j);
        for p in 0..n {
            acc = acc + c.gamma(i, k, p) * c.gamma(p, l, j) - c.gamma(i, l, p) * c.gamma(p, k, j);
        }
        acc
    });
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..k {
                    let v = -r.get(&[i, j, l, k]);
                    r.set(&[i, j, k, l], v);
                }
            }
        }
    }
    r
}

/// `Ric_{jk} = Σ_i R^i_{kij}`.
pub fn ricci(c: &Connection) -> TensorField {
    ricci_from_curvature(&curvature(c))
}

pub fn ricci_from_curvature(r: &TensorField) -> TensorField {
    let n = r.dim();
    TensorField::from_fn(n, 0, 2, |ix| (0..n).map(|i| r.get(&[i, ix[1], i, ix[0]]).clone()).sum())
}

/// `(∇_i Ric)_{jk} = ∂_i Ric_{jk} - Γ^p_{ij} Ric_{pk} - Γ^p_{ik} Ric_{jp}`,
/// stored as `[i, j, k]`.
pub fn cov_deriv_ricci(c: &Connection) -> TensorField {
    cov_deriv_ricci_from(c, &ricci(c))
}

pub fn cov_deriv_ricci_from(c: &Connection, ric: &TensorField) -> TensorField {
    let n = c.dim();
    TensorField::from_fn(n, 0, 3, |ix| {
        let (i, j, k) = (ix[0], ix[1], ix[2]);
        let mut acc = ric.get(&[j, k]).differentiate(c.coord(i));
        for p in 0..n {
            acc = acc - c.gamma(p, i, j) * ric.get(&[p, k]) - c.gamma(p, i, k) * ric.get(&[j, p]);
        }
        acc
    })
}

/// `(∇_i R)^l_{mjk}`, stored as `[l, i, m, j, k]`.
pub fn cov_deriv_curvature(c: &Connection) -> TensorField {
    cov_deriv_curvature_from(c, &curvature(c))
}

pub fn cov_deriv_curvature_from(c: &Connection, r: &TensorField) -> TensorField {
    let n = c.dim();
    let mut out = TensorField::from_fn(n, 1, 4, |ix| {
        let (l, i, m, j, k) = (ix[0], ix[1], ix[2], ix[3], ix[4]);
        if j >= k {
            return RatFn::zero();
        }
        let mut acc = r.get(&[l, m, j, k]).differentiate(c.coord(i));
        for p in 0..n {
            acc = acc + c.gamma(l, i, p) * r.get(&[p, m, j, k])
                - c.gamma(p, i, m) * r.get(&[l, p, j, k])
                - c.gamma(p, i, j) * r.get(&[l, m, p, k])
                - c.gamma(p, i, k) * r.get(&[l, m, j, p]);
        }
        acc
    });
    for l in 0..n {
        for i in 0..n {
            for m in 0..n {
                for j in 0..n {
                    for k in 0..j {
                        let v = -out.get(&[l, i, m, k, j]);
                        out.set(&[l, i, m, j, k], v);
                    }
                }
            }
        }
    }
    out
}

/// `(∇_X Ric)(X, X) = Σ α_i α_j α_k (∇_i Ric)_{jk}` for `X = Σ α_i ∂_i`.
/// Zero exactly when the Ricci tensor is cyclic parallel.
pub fn cyclic_parallel_residual(c: &Connection) -> RatFn {
    residual_from_cov_ricci(c, &cov_deriv_ricci(c))
}

pub fn residual_from_cov_ricci(c: &Connection, nabla_ric: &TensorField) -> RatFn {
    let n = c.dim();
    let mut acc = RatFn::zero();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let comp = nabla_ric.get(&[i, j, k]);
                if comp.is_zero() {
                    continue;
                }
                let mono = Monomial::from_pairs([
                    (c.direction_var(i), 1),
                    (c.direction_var(j), 1),
                    (c.direction_var(k), 1),
                ]);
                acc = acc + comp * RatFn::from_poly(crate::symexpr::Poly::term(crate::symexpr::q(1), mono));
            }
        }
    }
    acc
}

/// Symmetrized component equations
/// `(∇_i Ric)_{jk} + (∇_j Ric)_{ki} + (∇_k Ric)_{ij}` for `i <= j <= k`.
pub fn cyclic_sums(c: &Connection) -> Vec<((usize, usize, usize), RatFn)> {
    let t = cov_deriv_ricci(c);
    let n = c.dim();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i..n {
            for k in j..n {
                let s = t.get(&[i, j, k]) + t.get(&[j, k, i]) + t.get(&[k, i, j]);
                out.push(((i, j, k), s));
            }
        }
    }
    out
}

pub fn is_flat(c: &Connection) -> bool {
    curvature(c).is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::{parse_expr, VarTable};

    fn e(s: &str) -> RatFn {
        parse_expr(s, &VarTable::standard(3, 6)).unwrap()
    }

    fn example_2d() -> Connection {
        Connection::zero(2)
            .with_symmetric(0, 0, 0, e("u1 + u2"))
            .with_symmetric(1, 1, 1, e("u1 + u2 + 1"))
    }

    #[test]
    fn zero_connection_is_flat_and_torsion_free() {
        let c = Connection::zero(3);
        assert!(torsion(&c).is_zero());
        assert!(curvature(&c).is_zero());
        assert!(ricci(&c).is_zero());
        assert!(cov_deriv_ricci(&c).is_zero());
        assert!(cov_deriv_curvature(&c).is_zero());
        assert!(is_flat(&c));
    }

    #[test]
    fn torsion_of_asymmetric_symbol() {
        let mut c = Connection::zero(2);
        c.set(0, 0, 1, e("u1"));
        let t = torsion(&c);
        assert_eq!(t.get(&[0, 0, 1]), &e("u1"));
        assert_eq!(t.get(&[0, 1, 0]), &e("-u1"));
        assert!(!c.is_torsion_free());
        assert!(torsion(&example_2d()).is_zero());
    }

    #[test]
    fn curvature_of_2d_example() {
        let r = curvature(&example_2d());
        // R(∂1,∂2)∂1 = -∂1, R(∂1,∂2)∂2 = ∂2
        assert_eq!(r.get(&[0, 0, 0, 1]), &e("-1"));
        assert_eq!(r.get(&[1, 0, 0, 1]), &e("0"));
        assert_eq!(r.get(&[0, 1, 0, 1]), &e("0"));
        assert_eq!(r.get(&[1, 1, 0, 1]), &e("1"));
        assert!(!is_flat(&example_2d()));
    }

    #[test]
    fn ricci_of_2d_example() {
        let ric = ricci(&example_2d());
        assert_eq!(ric.get(&[0, 0]), &e("0"));
        assert_eq!(ric.get(&[0, 1]), &e("-1"));
        assert_eq!(ric.get(&[1, 0]), &e("-1"));
        assert_eq!(ric.get(&[1, 1]), &e("0"));
        // Ric is constant, so only the Γ terms survive:
        // (∇_1 Ric)_{12} = (∇_1 Ric)_{21} = u1 + u2, (∇_2 Ric)_{12} = (∇_2 Ric)_{21} = u1 + u2 + 1.
        let nr = cov_deriv_ricci(&example_2d());
        assert_eq!(nr.get(&[0, 0, 1]), &e("u1 + u2"));
        assert_eq!(nr.get(&[1, 0, 1]), &e("u1 + u2 + 1"));
        assert_eq!(nr.get(&[0, 0, 0]), &e("0"));
        assert_eq!(nr.get(&[1, 1, 1]), &e("0"));
        assert_eq!(
            cyclic_parallel_residual(&example_2d()),
            e("2*(u1 + u2)*a1^2*a2 + 2*(u1 + u2 + 1)*a1*a2^2")
        );
    }

    #[test]
    fn unflatten_roundtrip() {
        let t = TensorField::zeros(3, 1, 2);
        for (idx, _) in t.iter() {
            assert_eq!(unflatten(t.flat(&idx), 3, 3), idx);
        }
    }

    #[test]
    fn foreign_variables_rejected() {
        let c = Connection::zero(2).with_symmetric(0, 0, 0, e("u3"));
        assert!(matches!(c.validate(), Err(GeometryError::ForeignVariable(_))));
        let c = Connection::zero(2).with_symmetric(0, 0, 0, e("a*u2"));
        assert!(c.validate().is_ok());
    }
}
