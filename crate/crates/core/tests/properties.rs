use nld_core::combinatorics::{enumerate_partitions, mobius_from_bottom};
use nld_core::density::{one_level_identity, theorem_rhs};
use nld_core::empirical::SmoothCutoff;
use nld_core::numtheory::{gauss_g, gauss_tau_bruteforce, jacobi, tau_epsilon};
use nld_core::rmt::density_w;
use nld_core::TestFunction;
use proptest::prelude::*;

fn family(bump: bool, sigma: f64) -> TestFunction {
    if bump {
        TestFunction::smooth_bump(sigma).unwrap()
    } else {
        TestFunction::triangle(sigma).unwrap()
    }
}

fn odd() -> impl Strategy<Value = i64> {
    (0i64..2000).prop_map(|k| 2 * k + 1)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn w_is_symmetric_even_and_nonnegative(
        xs in prop::collection::vec(-6.0f64..6.0, 1..=4),
        flip in 0usize..4,
        rot in 0usize..4,
    ) {
        let w = density_w(&xs);
        prop_assert!(w >= -1e-12);
        let mut ys = xs.clone();
        let n = ys.len();
        ys.rotate_left(rot % n);
        let f = flip % n;
        ys[f] = -ys[f];
        prop_assert!((density_w(&ys) - w).abs() <= 1e-12 * (1.0 + w.abs()));
    }

    #[test]
    fn one_level_identity_holds(sigma in 0.05f64..2.0, bump in any::<bool>()) {
        let f = family(bump, sigma);
        let t = theorem_rhs(std::slice::from_ref(&f)).unwrap();
        prop_assert!((t.value - one_level_identity(&f)).abs() < 1e-8);
    }

    #[test]
    fn two_level_is_symmetric(a in 0.1f64..1.0, b in 0.1f64..0.95, ba in any::<bool>(), bb in any::<bool>()) {
        let f = family(ba, a);
        let g = family(bb, b);
        let x = theorem_rhs(&[f.clone(), g.clone()]).unwrap();
        let y = theorem_rhs(&[g, f]).unwrap();
        prop_assert!((x.value - y.value).abs() < 1e-9 + x.quadrature_error + y.quadrature_error);
    }

    #[test]
    fn jacobi_is_multiplicative(a in -500i64..500, b in -500i64..500, m in odd(), n in odd()) {
        let ab = jacobi(a * b, n).unwrap();
        prop_assert_eq!(ab, jacobi(a, n).unwrap() * jacobi(b, n).unwrap());
        let mn = jacobi(a, m * n).unwrap();
        prop_assert_eq!(mn, jacobi(a, m).unwrap() * jacobi(a, n).unwrap());
    }

    #[test]
    fn quadratic_reciprocity(m in odd(), n in odd()) {
        prop_assume!(m > 1 && n > 1);
        let (p, q) = (jacobi(m, n).unwrap(), jacobi(n, m).unwrap());
        if p != 0 {
            let sign = if (m % 4 == 3) && (n % 4 == 3) { -1 } else { 1 };
            prop_assert_eq!(p * q, sign);
        } else {
            prop_assert_eq!(q, 0);
        }
    }

    #[test]
    fn gauss_table_matches_brute_force(k in (0i64..250).prop_map(|k| 2 * k + 1), m in -30i64..30) {
        let tau = gauss_tau_bruteforce(m, k).unwrap();
        let want = tau_epsilon(k).unwrap() * gauss_g(m, k).unwrap();
        prop_assert!((tau - want).norm() < 1e-8);
    }

    #[test]
    fn cutoff_and_complement_partition_unity(u in 2.0f64..50.0, t in 1.0f64..2.0, xi in -40.0f64..40.0) {
        let phi = SmoothCutoff::new(u).unwrap();
        prop_assert!((phi.phi(t) + phi.complement().phi(t) - 1.0).abs() < 1e-15);
        prop_assert!(phi.phi_tilde(xi).abs() <= phi.phi_tilde_bound(xi) * (1.0 + 1e-9) + 1e-15);
    }
}

#[test]
fn mobius_sums_vanish_above_one_element() {
    for n in 1..=7 {
        let s: i64 = enumerate_partitions(n).unwrap().iter().map(mobius_from_bottom).sum();
        assert_eq!(s, i64::from(n == 1));
    }
}
