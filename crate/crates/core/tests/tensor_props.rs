mod common;

use common::*;
use proptest::prelude::*;
use szabo_core::szabo::*;
use szabo_core::tensorcalc::*;
use szabo_core::*;

fn connection(seed: u64, n: usize) -> Connection {
    random_connection(&mut rng(seed), n)
}

fn delta(a: usize, b: usize) -> RatFn {
    RatFn::from_int((a == b) as i64)
}

fn check_curvature_symmetries(c: &Connection) -> Result<(), TestCaseError> {
    let n = c.dim();
    let r = curvature(c);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    prop_assert!((r.get(&[i, j, k, l]) + r.get(&[i, j, l, k])).is_zero());
                    let bianchi = r.get(&[i, j, k, l]) + r.get(&[i, k, l, j]) + r.get(&[i, l, j, k]);
                    prop_assert!(bianchi.is_zero(), "Bianchi {:?}", (i, j, k, l));
                }
            }
        }
    }
    Ok(())
}

/// Contracting `∇R` over the value index and the first 2-form slot gives `∇Ric`.
fn check_trace_compatibility(c: &Connection) -> Result<(), TestCaseError> {
    let n = c.dim();
    let nr = cov_deriv_curvature(c);
    let nric = cov_deriv_ricci(c);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let contracted: RatFn = (0..n).map(|l| nr.get(&[l, i, k, l, j]).clone()).sum();
                prop_assert_eq!(&contracted, nric.get(&[i, j, k]));
            }
        }
    }
    Ok(())
}

fn check_residual(c: &Connection) -> Result<(), TestCaseError> {
    let n = c.dim();
    let nric = cov_deriv_ricci(c);
    let mut expected = RatFn::zero();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                expected = expected + alpha(i as u32 + 1) * alpha(j as u32 + 1) * alpha(k as u32 + 1) * nric.get(&[i, j, k]);
            }
        }
    }
    let residual = cyclic_parallel_residual(c);
    prop_assert_eq!(&residual, &expected);
    let sums_vanish = cyclic_sums(c).iter().all(|(_, s)| s.is_zero());
    prop_assert_eq!(residual.is_zero(), sums_vanish);
    Ok(())
}

fn check_szabo_matrix(c: &Connection) -> Result<(), TestCaseError> {
    let n = c.dim();
    let m = szabo_matrix(c);
    for col in 0..n {
        let oracle = szabo_column_oracle(c, col);
        for row in 0..n {
            prop_assert_eq!(m.entry(row, col), &oracle[row], "entry ({}, {})", row, col);
        }
    }
    prop_assert!(m.is_cubic_in_directions());
    let sx = szabo_apply(&m, &direction_vector(&m));
    prop_assert!(sx.iter().all(RatFn::is_zero));
    prop_assert_eq!(m.trace(), cyclic_parallel_residual(c));
    let sigma = char_poly(&m).sigma;
    for (k, s) in sigma.iter().enumerate() {
        prop_assert_eq!(s, &principal_minor_sum(&|i, j| m.entry(i, j).clone(), n, k + 1), "sigma_{}", k + 1);
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn curvature_symmetries_2d(seed in any::<u64>()) {
        check_curvature_symmetries(&connection(seed, 2))?;
    }

    #[test]
    fn trace_compatibility_2d(seed in any::<u64>()) {
        check_trace_compatibility(&connection(seed, 2))?;
    }

    #[test]
    fn residual_is_symmetrized_cov_ricci_2d(seed in any::<u64>()) {
        check_residual(&connection(seed, 2))?;
    }

    #[test]
    fn szabo_matrix_properties_2d(seed in any::<u64>()) {
        check_szabo_matrix(&connection(seed, 2))?;
    }

    /// In two dimensions `R^i_{jkl} = δ^i_k Ric_{lj} - δ^i_l Ric_{kj}`, and so
    /// `∇R` is determined by `∇Ric`.
    #[test]
    fn two_d_curvature_from_ricci(seed in any::<u64>()) {
        let c = connection(seed, 2);
        let r = curvature(&c);
        let ric = ricci(&c);
        let nr = cov_deriv_curvature(&c);
        let nric = cov_deriv_ricci(&c);
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        let rhs = delta(i, k) * ric.get(&[l, j]) - delta(i, l) * ric.get(&[k, j]);
                        prop_assert_eq!(r.get(&[i, j, k, l]), &rhs);
                        for d in 0..2 {
                            let rhs = delta(i, k) * nric.get(&[d, l, j]) - delta(i, l) * nric.get(&[d, k, j]);
                            prop_assert_eq!(nr.get(&[i, d, j, k, l]), &rhs);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn two_d_equivalence(seed in any::<u64>()) {
        let c = connection(seed, 2);
        prop_assert_eq!(is_affine_szabo(&c).is_szabo, cyclic_parallel_residual(&c).is_zero());
    }

    #[test]
    fn cubic_homogeneity(seed in any::<u64>()) {
        let c = connection(seed, 2);
        let m = szabo_matrix(&c);
        let beta = RatFn::var(VarId::param(1));
        let scaled = char_poly(&m.scale_direction(&beta)).sigma;
        for (k, (s, t)) in char_poly(&m).sigma.iter().zip(&scaled).enumerate() {
            prop_assert_eq!(t, &(s * beta.pow(3 * (k as u32 + 1))));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn curvature_symmetries_3d(seed in any::<u64>()) {
        check_curvature_symmetries(&connection(seed, 3))?;
    }

    #[test]
    fn trace_compatibility_3d(seed in any::<u64>()) {
        check_trace_compatibility(&connection(seed, 3))?;
    }

    #[test]
    fn szabo_matrix_properties_3d(seed in any::<u64>()) {
        let c = connection(seed, 3);
        check_residual(&c)?;
        check_szabo_matrix(&c)?;
    }
}

#[test]
fn torsion_of_asymmetric_connection() {
    let mut c = Connection::zero(2);
    c.set(0, 0, 1, e("u2"));
    assert!(!c.is_torsion_free());
    let t = torsion(&c);
    assert_eq!(t.get(&[0, 0, 1]), &e("u2"));
    assert_eq!(t.get(&[0, 1, 0]), &e("-u2"));
    assert!(torsion(&upper_2d_example()).is_zero());
}

#[test]
fn flat_connections_are_szabo() {
    for c in flat_examples() {
        assert!(is_flat(&c));
        assert!(is_affine_szabo(&c).is_szabo);
    }
    assert!(is_flat(&Connection::zero(3)));
    assert!(!is_flat(&diagonal_2d_example()));
}
