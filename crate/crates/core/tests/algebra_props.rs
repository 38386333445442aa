//! Property tests for the exact-arithmetic substrate.

use num_traits::Zero;
use proptest::prelude::*;

use ratnn::algebra::{rat_combine, scalar_frac, scalar_to_f64, MultiPoly, RationalFunc, Scalar};

fn poly_strategy(num_vars: usize) -> impl Strategy<Value = MultiPoly> {
    proptest::collection::vec(
        (
            -9i64..=9,
            1i64..=9,
            proptest::collection::vec(0u32..=3, num_vars),
        ),
        0..=5,
    )
    .prop_map(move |raw| {
        let terms = raw
            .into_iter()
            .map(|(num, den, exps)| (scalar_frac(num, den), exps))
            .collect();
        MultiPoly::from_terms(num_vars, terms).unwrap()
    })
}

fn poly_triple() -> impl Strategy<Value = (MultiPoly, MultiPoly, MultiPoly)> {
    (1usize..=3).prop_flat_map(|nv| {
        (
            poly_strategy(nv),
            poly_strategy(nv),
            poly_strategy(nv),
        )
    })
}

/// Rational point with coordinates k/8 in [-1, 1].
fn point_strategy(num_vars: usize) -> impl Strategy<Value = Vec<Scalar>> {
    proptest::collection::vec((-8i64..=8).prop_map(|k| scalar_frac(k, 8)), num_vars)
}

proptest! {
    #[test]
    fn ring_axioms((a, b, c) in poly_triple()) {
        // Associativity of + and *, commutativity, distributivity; all as
        // exact equality of term maps.
        prop_assert_eq!(
            a.add(&b).unwrap().add(&c).unwrap(),
            a.add(&b.add(&c).unwrap()).unwrap()
        );
        prop_assert_eq!(a.add(&b).unwrap(), b.add(&a).unwrap());
        prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
        prop_assert_eq!(
            a.mul(&b).unwrap().mul(&c).unwrap(),
            a.mul(&b.mul(&c).unwrap()).unwrap()
        );
        prop_assert_eq!(
            a.mul(&b.add(&c).unwrap()).unwrap(),
            a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap()
        );
    }

    #[test]
    fn eval_is_a_ring_homomorphism((a, b) in (1usize..=3).prop_flat_map(|nv| (poly_strategy(nv), poly_strategy(nv))), seed in proptest::num::u64::ANY) {
        let nv = a.num_vars();
        let mut coords = Vec::with_capacity(nv);
        let mut s = seed;
        for _ in 0..nv {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1);
            coords.push(scalar_frac((s >> 33) as i64 % 9 - 4, 4));
        }
        let sum = a.add(&b).unwrap().eval(&coords).unwrap();
        prop_assert_eq!(sum, a.eval(&coords).unwrap() + b.eval(&coords).unwrap());
        let prod = a.mul(&b).unwrap().eval(&coords).unwrap();
        prop_assert_eq!(prod, a.eval(&coords).unwrap() * b.eval(&coords).unwrap());
    }

    #[test]
    fn partial_matches_central_difference(
        (p, point, var) in (1usize..=3).prop_flat_map(|nv| {
            (poly_strategy(nv), point_strategy(nv), 0..nv)
        })
    ) {
        let h = 1e-4;
        let v: Vec<f64> = point.iter().map(scalar_to_f64).collect();
        let mut plus = v.clone();
        plus[var] += h;
        let mut minus = v.clone();
        minus[var] -= h;
        let fd = (p.eval_f64(&plus) - p.eval_f64(&minus)) / (2.0 * h);
        let exact = p.partial(var).unwrap().eval_f64(&v);
        prop_assert!((fd - exact).abs() <= 1e-6, "fd {} vs exact {}", fd, exact);
    }

    #[test]
    fn rat_combine_preserves_evaluation(
        (nums, dens, point) in (1usize..=3, 1usize..=3).prop_flat_map(|(nv, count)| {
            (
                proptest::collection::vec(poly_strategy(nv), count),
                proptest::collection::vec(poly_strategy(nv), count),
                point_strategy(nv),
            )
        })
    ) {
        let nv = nums[0].num_vars();
        let one = MultiPoly::one(nv);
        let fracs: Vec<RationalFunc> = nums
            .iter()
            .zip(&dens)
            .map(|(n, d)| {
                // Shift the denominator away from zero so it is usable.
                let den = if d.is_zero() { one.clone() } else { d.clone() };
                RationalFunc::new(n.clone(), den).unwrap()
            })
            .collect();
        // Only evaluate where every denominator is nonzero.
        for f in &fracs {
            prop_assume!(!f.den().eval(&point).unwrap().is_zero());
        }
        let combined = rat_combine(&fracs).unwrap();
        prop_assume!(!combined.den().eval(&point).unwrap().is_zero());
        let direct: Scalar = fracs
            .iter()
            .map(|f| f.eval(&point).unwrap())
            .fold(Scalar::zero(), |acc, v| acc + v);
        prop_assert_eq!(combined.eval(&point).unwrap(), direct);
    }
}
