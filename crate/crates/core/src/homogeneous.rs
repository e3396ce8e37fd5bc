//! Locally homogeneous surface connections (Type A: constant symbols,
//! Type B: constants over `u1`), their Szabo criteria, and the affine Killing
//! operator.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{GeometryError, GeometryResult};
use crate::symexpr::{parse_expr, RatFn, Rational, VarId, VarTable};
use crate::szabo::is_affine_szabo;
use crate::tensorcalc::{cov_deriv_ricci, Connection, TensorField};

/// The six constants `a..f` of a homogeneous normal form:
/// `∇_1 ∂_1 = a∂_1 + b∂_2`, `∇_1 ∂_2 = c∂_1 + d∂_2`, `∇_2 ∂_2 = e∂_1 + f∂_2`
/// (each divided by `u1` for Type B). Values may be symbolic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyParams {
    pub a: RatFn,
    pub b: RatFn,
    pub c: RatFn,
    pub d: RatFn,
    pub e: RatFn,
    pub f: RatFn,
}

pub type TypeAParams = FamilyParams;
pub type TypeBParams = FamilyParams;

impl FamilyParams {
    pub fn from_ints(v: [i64; 6]) -> Self {
        Self::from_values(v.map(RatFn::from_int))
    }

    pub fn from_rationals(v: [Rational; 6]) -> Self {
        Self::from_values(v.map(RatFn::constant))
    }

    pub fn from_values([a, b, c, d, e, f]: [RatFn; 6]) -> Self {
        FamilyParams { a, b, c, d, e, f }
    }

    /// The parameters `a..f` themselves, as symbols.
    pub fn symbolic() -> Self {
        Self::from_values(std::array::from_fn(|i| RatFn::var(VarId::param(i as u32 + 1))))
    }

    pub fn values(&self) -> [&RatFn; 6] {
        [&self.a, &self.b, &self.c, &self.d, &self.e, &self.f]
    }

    fn bindings(&self) -> BTreeMap<VarId, RatFn> {
        self.values()
            .into_iter()
            .enumerate()
            .map(|(i, v)| (VarId::param(i as u32 + 1), v.clone()))
            .collect()
    }

    fn place(&self, scale: &RatFn) -> Connection {
        Connection::zero(2)
            .with_symmetric(0, 0, 0, &self.a * scale)
            .with_symmetric(1, 0, 0, &self.b * scale)
            .with_symmetric(0, 0, 1, &self.c * scale)
            .with_symmetric(1, 0, 1, &self.d * scale)
            .with_symmetric(0, 1, 1, &self.e * scale)
            .with_symmetric(1, 1, 1, &self.f * scale)
    }
}

pub fn type_a_connection(p: &TypeAParams) -> Connection {
    p.place(&RatFn::one())
}

pub fn type_b_connection(p: &TypeBParams) -> Connection {
    let inv_u1 = RatFn::var(VarId::base(1)).recip().expect("u1 is nonzero");
    p.place(&inv_u1)
}

/// Closed forms of `(∇_i Ric)_{jk}` for Type A, labelled by `(i, j, k)`
/// (1-based), as polynomials in `a..f`.
pub const TYPE_A_COV_RICCI: [((usize, usize, usize), &str); 6] = [
    ((1, 1, 1), "2*(a*b*c + a*d^2 - a^2*d - a*b*f + b^2*e - b*c*d)"),
    ((1, 1, 2), "2*(b*c^2 + b*d*e - a*c*d - b*c*f)"),
    ((1, 2, 2), "2*(b*c*e - a*d*e - c*d*f + d^2*e)"),
    ((2, 1, 1), "2*(b*c^2 + b*d*e - a*c*d - b*c*f)"),
    ((2, 1, 2), "2*(b*c*e - a*d*e - c*d*f + d^2*e)"),
    ((2, 2, 2), "2*(b*e^2 + c^2*f - c*f^2 - a*e*f - c*d*e + d*e*f)"),
];

/// The four polynomial conditions characterising Type B Szabo surfaces
/// (with `f = -c`).
pub const TYPE_B_CONDITIONS: [&str; 4] = [
    "2*a*b*c + 3*b*c - d - 2*a*d - a^2*d - b*c*d + d^2 + a*d^2 + b^2*e",
    "2*c + a*c + 6*b*c^2 - 2*c*d - 3*a*c*d + 3*b*e + 3*b*d*e",
    "3*c^2 + 3*c^2*d + e - a*e + 3*b*c*e + 2*d*e - 3*a*d*e + 3*d^2*e",
    "-2*c^3 + a*c*e - 2*c*d*e + b*e^2",
];

fn param_table() -> VarTable {
    VarTable::standard(2, 6)
}

fn eval_formula(src: &str, p: &FamilyParams) -> RatFn {
    let poly = parse_expr(src, &param_table()).expect("built-in formula parses");
    poly.substitute(&p.bindings()).expect("polynomial substitution")
}

/// Outcome of the Type A parallel-Ricci test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParallelRicciReport {
    pub parallel: bool,
    /// The six closed-form polynomials, in `TYPE_A_COV_RICCI` order.
    pub residuals: Vec<RatFn>,
    /// `(∇Ric)` computed from the connection.
    pub computed: TensorField,
    /// Whether each closed form equals the corresponding computed component
    /// and the computed tensor vanishes exactly when the closed forms do.
    pub consistent: bool,
}

pub fn type_a_parallel_ricci(p: &TypeAParams) -> ParallelRicciReport {
    let residuals: Vec<RatFn> = TYPE_A_COV_RICCI.iter().map(|(_, src)| eval_formula(src, p)).collect();
    let computed = cov_deriv_ricci(&type_a_connection(p));
    let parallel = residuals.iter().all(RatFn::is_zero);
    let matches = TYPE_A_COV_RICCI
        .iter()
        .zip(&residuals)
        .all(|(((i, j, k), _), r)| computed.get(&[i - 1, j - 1, k - 1]) == r);
    let consistent = matches && parallel == computed.is_zero();
    ParallelRicciReport {
        parallel,
        residuals,
        computed,
        consistent,
    }
}

/// The four Type B conditions evaluated at `p`. Requires `f = -c`, the
/// condition for a symmetric Ricci tensor.
pub fn type_b_szabo_residuals(p: &TypeBParams) -> GeometryResult<[RatFn; 4]> {
    let sym = &p.f + &p.c;
    if !sym.is_zero() {
        return Err(GeometryError::TypeBAsymmetricRicci(sym.to_string()));
    }
    Ok(TYPE_B_CONDITIONS.map(|src| eval_formula(src, p)))
}

/// `[X, ∇_{∂_i} ∂_j] - ∇_{∂_i}[X, ∂_j] - ∇_{[X, ∂_i]} ∂_j`, stored as
/// `[r, i, j]` for the `∂_r` component. `X` is affine Killing iff it vanishes.
pub fn killing_residual(c: &Connection, x: &[RatFn]) -> GeometryResult<TensorField> {
    let n = c.dim();
    if x.len() != n {
        return Err(GeometryError::DimensionMismatch {
            expected: n,
            actual: x.len(),
        });
    }
    // dx[q][r] = ∂_q X^r
    let dx: Vec<Vec<RatFn>> = (0..n)
        .map(|qi| x.iter().map(|xr| xr.differentiate(c.coord(qi))).collect())
        .collect();
    let mut out = TensorField::zeros(n, 1, 2);
    for r in 0..n {
        for i in 0..n {
            for j in 0..n {
                let mut acc = dx[j][r].differentiate(c.coord(i));
                for p in 0..n {
                    acc = acc + &x[p] * c.gamma(r, i, j).differentiate(c.coord(p))
                        - c.gamma(p, i, j) * &dx[p][r]
                        + c.gamma(r, i, p) * &dx[j][p]
                        + &dx[i][p] * c.gamma(r, p, j);
                }
                out.set(&[r, i, j], acc);
            }
        }
    }
    Ok(out)
}

/// Result of sweeping an integer parameter grid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepReport {
    pub total: usize,
    pub szabo_count: usize,
    /// Tuples where the closed-form criterion and the direct Szabo test
    /// disagree.
    pub disagreements: Vec<Vec<i64>>,
}

fn grid(lo: i64, hi: i64, arity: u32) -> Vec<Vec<i64>> {
    let width = (hi - lo + 1).max(0) as usize;
    (0..width.pow(arity))
        .map(|mut flat| {
            let mut t = vec![0; arity as usize];
            for slot in t.iter_mut().rev() {
                *slot = lo + (flat % width) as i64;
                flat /= width;
            }
            t
        })
        .collect()
}

/// Type A: Szabo must coincide with parallel Ricci at every grid point.
pub fn sweep_type_a(lo: i64, hi: i64) -> SweepReport {
    let results: Vec<(Vec<i64>, bool, bool)> = grid(lo, hi, 6)
        .into_par_iter()
        .map(|t| {
            let p = FamilyParams::from_ints([t[0], t[1], t[2], t[3], t[4], t[5]]);
            let szabo = is_affine_szabo(&type_a_connection(&p)).is_szabo;
            let report = type_a_parallel_ricci(&p);
            (t, szabo, report.consistent && report.parallel == szabo)
        })
        .collect();
    summarize(results)
}

/// Type B over `(a, b, c, d, e)` with `f = -c`: Szabo must coincide with the
/// vanishing of the four conditions.
pub fn sweep_type_b(lo: i64, hi: i64) -> SweepReport {
    let results: Vec<(Vec<i64>, bool, bool)> = grid(lo, hi, 5)
        .into_par_iter()
        .map(|t| {
            let p = FamilyParams::from_ints([t[0], t[1], t[2], t[3], t[4], -t[2]]);
            let szabo = is_affine_szabo(&type_b_connection(&p)).is_szabo;
            let conditions = type_b_szabo_residuals(&p).expect("f = -c by construction");
            let criterion = conditions.iter().all(RatFn::is_zero);
            (t, szabo, criterion == szabo)
        })
        .collect();
    summarize(results)
}

fn summarize(results: Vec<(Vec<i64>, bool, bool)>) -> SweepReport {
    let total = results.len();
    let szabo_count = results.iter().filter(|(_, s, _)| *s).count();
    let disagreements = results.into_iter().filter(|(_, _, ok)| !ok).map(|(t, _, _)| t).collect();
    SweepReport {
        total,
        szabo_count,
        disagreements,
    }
}

/// Integer tuples as parameter values, for reporting.
pub fn params_from_slice(v: &[i64]) -> Option<FamilyParams> {
    let arr: [i64; 6] = v.try_into().ok()?;
    Some(FamilyParams::from_ints(arr))
}
