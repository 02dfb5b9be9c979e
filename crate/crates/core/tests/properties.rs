//! Randomized property checks for the special-function layer and the
//! geometric identities the numeric modules lean on.

use proptest::prelude::*;

use extlab::special::{bessel_j, legendre, BesselOrder};
use extlab::spectral::{magic_identity_check, random_constrained_triple};

proptest! {
    /// Three-term recurrence J_{n−1}(x) + J_{n+1}(x) = (2n/x) J_n(x).
    #[test]
    fn bessel_recurrence(n in 1u32..10, x in 0.1f64..60.0) {
        let jm = bessel_j(BesselOrder::integer(n - 1), x).unwrap();
        let j0 = bessel_j(BesselOrder::integer(n), x).unwrap();
        let jp = bessel_j(BesselOrder::integer(n + 1), x).unwrap();
        let lhs = jm + jp;
        let rhs = 2.0 * n as f64 / x * j0;
        prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + lhs.abs().max(rhs.abs())));
    }

    /// Legendre polynomials are bounded by 1 on [−1, 1] and P_k(1) = 1.
    #[test]
    fn legendre_bounded(k in 0u32..16, t in -1.0f64..1.0) {
        prop_assert!(legendre::<f64>(k, t).abs() <= 1.0 + 1e-12);
        prop_assert!((legendre::<f64>(k, 1.0) - 1.0).abs() <= 1e-12);
    }

    /// The constrained-triple identity holds for every random draw, in
    /// every ambient dimension the sampler supports.
    #[test]
    fn magic_identity_holds(seed in any::<u64>(), d in 2usize..6) {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let [w1, w2, w3] = random_constrained_triple(&mut rng, d);
        prop_assert!(magic_identity_check(&w1, &w2, &w3).unwrap() < 1e-10);
    }
}

use rand::SeedableRng;
