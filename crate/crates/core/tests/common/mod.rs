#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use szabo_core::extension::PhiTensor;
use szabo_core::tensorcalc::curvature;
pub use szabo_core::symexpr::{q, qr};
use szabo_core::*;

pub fn e(s: &str) -> RatFn {
    parse_expr(s, &VarTable::standard(4, 6)).unwrap()
}

pub fn u(i: u32) -> RatFn {
    RatFn::var(VarId::base(i))
}

pub fn alpha(i: u32) -> RatFn {
    RatFn::var(VarId::direction(i))
}

/// `∂f/∂u_i`, 1-based.
pub fn d(f: &RatFn, i: u32) -> RatFn {
    f.differentiate(VarId::base(i))
}

/// Stand-ins for arbitrary smooth functions: polynomials of a given degree
/// in `u1..un` with independent parameter coefficients `p7, p8, ...`.
pub struct Generic {
    next: u32,
}

impl Generic {
    pub fn new() -> Self {
        Generic { next: 7 }
    }

    pub fn function(&mut self, n: u32, degree: u32) -> RatFn {
        let mut out = RatFn::zero();
        let mut exps = vec![0u32; n as usize];
        loop {
            let total: u32 = exps.iter().sum();
            if total <= degree {
                let mut term = RatFn::var(VarId::param(self.next));
                self.next += 1;
                for (i, &k) in exps.iter().enumerate() {
                    term = term * u(i as u32 + 1).pow(k);
                }
                out = out + term;
            }
            // odometer over 0..=degree per variable
            let mut pos = 0;
            loop {
                if pos == exps.len() {
                    return out;
                }
                exps[pos] += 1;
                if exps[pos] <= degree {
                    break;
                }
                exps[pos] = 0;
                pos += 1;
            }
        }
    }
}

/// Torsion-free connection with random polynomial symbols of degree <= 2
/// and small integer coefficients; roughly half the symbols are zero.
pub fn random_connection(rng: &mut ChaCha8Rng, n: usize) -> Connection {
    let mut c = Connection::zero(n);
    for k in 0..n {
        for i in 0..n {
            for j in i..n {
                if rng.gen_bool(0.5) {
                    continue;
                }
                c.set_symmetric(k, i, j, random_poly(rng, n, 2));
            }
        }
    }
    c
}

pub fn random_poly(rng: &mut ChaCha8Rng, n: usize, degree: u32) -> RatFn {
    let terms = rng.gen_range(1..=3);
    let mut p = RatFn::zero();
    for _ in 0..terms {
        let mut t = RatFn::from_int(rng.gen_range(-3..=3));
        let deg = rng.gen_range(0..=degree);
        for _ in 0..deg {
            t = t * u(rng.gen_range(1..=n as u32));
        }
        p = p + t;
    }
    p
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_point(rng: &mut ChaCha8Rng, vars: &[VarId]) -> BTreeMap<VarId, Rational> {
    vars.iter()
        .map(|&v| (v, qr(rng.gen_range(-9..=9), rng.gen_range(1..=5))))
        .collect()
}

/// Column `m` of the Szabo matrix computed without the `∇R` tensor:
/// `∇_X(R(Y,X)X) - R(∇_X Y,X)X - R(Y,∇_X X)X - R(Y,X)∇_X X` with constant
/// coefficient fields `X = Σ α_i ∂_i`, `Y = ∂_m`.
pub fn szabo_column_oracle(c: &Connection, m: usize) -> Vec<RatFn> {
    let n = c.dim();
    let r = curvature(c);
    let x: Vec<RatFn> = (0..n).map(|i| RatFn::var(c.direction_var(i))).collect();
    let mut y = vec![RatFn::zero(); n];
    y[m] = RatFn::one();
    let apply_r = |z1: &[RatFn], z2: &[RatFn], z3: &[RatFn]| -> Vec<RatFn> {
        (0..n)
            .map(|l| {
                let mut acc = RatFn::zero();
                for k in 0..n {
                    for i in 0..n {
                        for j in 0..n {
                            let v = r.get(&[l, k, i, j]);
                            if !v.is_zero() {
                                acc = acc + v * &z3[k] * &z1[i] * &z2[j];
                            }
                        }
                    }
                }
                acc
            })
            .collect()
    };
    let nabla_x = |w: &[RatFn]| -> Vec<RatFn> {
        (0..n)
            .map(|l| {
                let mut acc = RatFn::zero();
                for i in 0..n {
                    acc = acc + &x[i] * w[l].differentiate(c.coord(i));
                    for p in 0..n {
                        acc = acc + &x[i] * c.gamma(l, i, p) * &w[p];
                    }
                }
                acc
            })
            .collect()
    };
    let w = apply_r(&y, &x, &x);
    let t1 = nabla_x(&w);
    let nxy = nabla_x(&y);
    let nxx = nabla_x(&x);
    let t2 = apply_r(&nxy, &x, &x);
    let t3 = apply_r(&y, &nxx, &x);
    let t4 = apply_r(&y, &x, &nxx);
    (0..n).map(|l| &t1[l] - &t2[l] - &t3[l] - &t4[l]).collect()
}

/// Sum of principal `k x k` minors by cofactor expansion.
pub fn principal_minor_sum(entry: &dyn Fn(usize, usize) -> RatFn, n: usize, k: usize) -> RatFn {
    let mut total = RatFn::zero();
    for subset in subsets(n, k) {
        total = total + det(&|i, j| entry(subset[i], subset[j]), k);
    }
    total
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for last in (k - 1)..n {
        for mut s in subsets(last, k - 1) {
            s.push(last);
            out.push(s);
        }
    }
    out
}

pub fn det(entry: &dyn Fn(usize, usize) -> RatFn, n: usize) -> RatFn {
    if n == 0 {
        return RatFn::one();
    }
    let mut total = RatFn::zero();
    for col in 0..n {
        let a = entry(0, col);
        if a.is_zero() {
            continue;
        }
        let minor = det(
            &|i, j| entry(i + 1, if j < col { j } else { j + 1 }),
            n - 1,
        );
        let term = a * minor;
        total = if col % 2 == 0 { total + term } else { total - term };
    }
    total
}

/// `Γ¹₁₁ = u1 + u2`, `Γ²₂₂ = u1 + u2 + 1`.
pub fn diagonal_2d_example() -> Connection {
    Connection::zero(2)
        .with_symmetric(0, 0, 0, e("u1 + u2"))
        .with_symmetric(1, 1, 1, e("u1 + u2 + 1"))
}

/// `∇_{∂1}∂2 = u2 ∂1`, `∇_{∂2}∂2 = u1(1 + u2) ∂1`.
pub fn upper_2d_example() -> Connection {
    Connection::zero(2)
        .with_symmetric(0, 0, 1, e("u2"))
        .with_symmetric(0, 1, 1, e("u1*(1 + u2)"))
}

/// `∇_{∂i}∂i = f_i ∂i`.
pub fn diagonal_3d(f: [RatFn; 3]) -> Connection {
    let [f1, f2, f3] = f;
    Connection::zero(3)
        .with_symmetric(0, 0, 0, f1)
        .with_symmetric(1, 1, 1, f2)
        .with_symmetric(2, 2, 2, f3)
}

pub fn example_3d() -> Connection {
    diagonal_3d([e("1/2*u1*u2^2"), e("-1/2*u1^2*u2"), e("u3")])
}

/// The three flat examples with `1/u`-type symbols.
pub fn flat_examples() -> [Connection; 3] {
    [
        Connection::zero(3)
            .with_symmetric(0, 0, 1, e("1/u2"))
            .with_symmetric(0, 0, 2, e("1/u3"))
            .with_symmetric(0, 1, 2, e("u1/(u2*u3)")),
        Connection::zero(3)
            .with_symmetric(1, 0, 1, e("1/u1"))
            .with_symmetric(1, 0, 2, e("u2/(u1*u3)"))
            .with_symmetric(1, 1, 2, e("1/u3")),
        Connection::zero(3)
            .with_symmetric(2, 0, 1, e("u3/(u1*u2)"))
            .with_symmetric(2, 0, 2, e("1/u1"))
            .with_symmetric(2, 1, 2, e("1/u2")),
    ]
}

/// Variables used by the random expression generators.
pub fn sample_vars() -> [VarId; 4] {
    [VarId::base(1), VarId::base(2), VarId::direction(1), VarId::param(1)]
}

/// Sparse random polynomial over `vars` with small rational coefficients.
pub fn random_sparse(rng: &mut ChaCha8Rng, vars: &[VarId], degree: u32) -> RatFn {
    let mut p = RatFn::zero();
    for _ in 0..rng.gen_range(0..=4) {
        let mut t = RatFn::constant(qr(rng.gen_range(-5..=5), rng.gen_range(1..=4)));
        for _ in 0..degree {
            if rng.gen_bool(0.6) {
                t = t * RatFn::var(vars[rng.gen_range(0..vars.len())]);
            }
        }
        p = p + t;
    }
    p
}

/// Random rational function; about 40% are plain polynomials.
pub fn random_ratfn(rng: &mut ChaCha8Rng) -> RatFn {
    let vars = sample_vars();
    let num = random_sparse(rng, &vars, 3);
    if rng.gen_bool(0.4) {
        return num;
    }
    loop {
        let den = random_sparse(rng, &vars, 2);
        if !den.is_zero() {
            return num.checked_div(&den).unwrap();
        }
    }
}

/// Non-zero Levi-Civita symbols `((k, i, j), Γ^k_ij)`, 1-based with `i <= j`,
/// of the twisted extension of [`diagonal_2d_example`].
pub fn twisted_example_christoffels(phi: &PhiTensor) -> Vec<((usize, usize, usize), RatFn)> {
    let (p11, p12, p22) = (phi.get(0, 0).clone(), phi.get(0, 1).clone(), phi.get(1, 1).clone());
    let (s, t) = (e("u1 + u2"), e("u1 + u2 + 1"));
    let (u3, u4) = (RatFn::var(VarId::fiber(1)), RatFn::var(VarId::fiber(2)));
    let half = qr(1, 2);
    vec![
        ((1, 1, 1), s.clone()),
        ((2, 2, 2), t.clone()),
        ((3, 1, 3), -&s),
        ((4, 2, 4), -&t),
        ((3, 1, 1), d(&p11, 1).scale(&half) - &s * (&p11 - (&s * &u3).scale(&q(2))) - &u3),
        ((4, 1, 1), d(&p12, 1) - d(&p11, 2).scale(&half) - &s * &p12 + &u3),
        ((3, 1, 2), d(&p11, 2).scale(&half) - &u3),
        ((4, 1, 2), d(&p22, 1).scale(&half) - &u4),
        ((3, 2, 2), d(&p12, 2) - d(&p22, 1).scale(&half) - &t * &p12 + &u4),
        ((4, 2, 2), d(&p22, 2).scale(&half) - &t * (&p22 - (&t * &u4).scale(&q(2))) - &u4),
    ]
}
