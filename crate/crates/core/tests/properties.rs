use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rational_models::burnside::{self, BurnsideElement, Exceptional, Group, RingOp};
use rational_models::dihedral::{self, random::random_dihedral};
use rational_models::exceptional::{self, random::random_group_complex, weyl_group_of};
use rational_models::graded::{GradedModule, Ring, Summand};
use rational_models::linalg::q_frac;
use rational_models::toral::{self, random_object, RandomSpec, Side};
use rational_models::QMatrix;

fn matrix() -> impl Strategy<Value = QMatrix> {
    (1usize..5, 1usize..5).prop_flat_map(|(r, c)| {
        prop::collection::vec(-3i64..=3, r * c).prop_map(move |v| QMatrix::from_i64(r, c, &v))
    })
}

fn rational() -> impl Strategy<Value = rational_models::Rational> {
    (-4i64..=4, 1i64..=3).prop_map(|(n, d)| q_frac(n, d))
}

fn element(group: Group) -> impl Strategy<Value = BurnsideElement> {
    let lo = group.min_dihedral();
    let exc = prop::collection::vec(rational(), 5);
    (exc, rational(), prop::collection::btree_map(lo..lo + 6, rational(), 0..4), rational()).prop_map(
        move |(e, t, d, tail)| {
            let exceptional = match group {
                Group::SO3 => Exceptional::ALL.into_iter().zip(e).collect(),
                Group::O2 => BTreeMap::new(),
            };
            BurnsideElement::new(group, exceptional, t, d, tail).unwrap()
        },
    )
}

fn module(ring: Ring) -> impl Strategy<Value = GradedModule> {
    let summand = (0u32..4, -3i64..=3, prop::bool::ANY).prop_map(|(len, half, plus)| {
        let sign = if plus { 1 } else { -1 };
        if len == 0 {
            Summand::free(2 * half, sign)
        } else {
            Summand::torsion(len, 2 * half, sign)
        }
    });
    prop::collection::vec(summand, 0..4).prop_map(move |s| GradedModule::new(ring, s).unwrap())
}

fn small(side: Side) -> RandomSpec {
    RandomSpec { max_slot: 4, max_explicit: 3, lo: -6, hi: 6, max_v: 2, ..RandomSpec::new(side) }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn rank_nullity(m in matrix()) {
        let k = m.kernel_basis();
        prop_assert_eq!(k.cols() + m.rank(), m.cols());
        prop_assert!(m.mul(&k).is_zero());
        prop_assert_eq!(m.image_basis().cols(), m.rank());
        let (proj, dim) = m.cokernel_data();
        prop_assert_eq!(dim, m.rows() - m.rank());
        prop_assert!(proj.mul(&m).is_zero());
        prop_assert_eq!(m.transpose().rank(), m.rank());
    }

    #[test]
    fn burnside_ring_axioms(a in element(Group::SO3), b in element(Group::SO3), c in element(Group::SO3)) {
        let mul = |x: &BurnsideElement, y: &BurnsideElement| burnside::ring_op(x, y, RingOp::Mul).unwrap();
        let add = |x: &BurnsideElement, y: &BurnsideElement| burnside::ring_op(x, y, RingOp::Add).unwrap();
        prop_assert_eq!(mul(&a, &b), mul(&b, &a));
        prop_assert_eq!(mul(&a, &add(&b, &c)), add(&mul(&a, &b), &mul(&a, &c)));
        prop_assert_eq!(mul(&a, &BurnsideElement::one(Group::SO3)), a.clone());
        // Idempotents cut elements into orthogonal pieces that sum back.
        let pieces = [burnside::e_toral(Group::SO3), burnside::e_dihedral(Group::SO3), burnside::e_exceptional()];
        let mut sum = BurnsideElement::zero(Group::SO3);
        for e in &pieces {
            sum = add(&sum, &mul(&a, e));
        }
        prop_assert_eq!(sum, a);
    }

    #[test]
    fn restriction_is_a_ring_map(a in element(Group::SO3), b in element(Group::SO3)) {
        let r = |x: &BurnsideElement| burnside::restrict_to_o2(x).unwrap();
        prop_assert_eq!(r(&burnside::mul(&a, &b).unwrap()), burnside::mul(&r(&a), &r(&b)).unwrap());
        prop_assert_eq!(r(&burnside::add(&a, &b).unwrap()), burnside::add(&r(&a), &r(&b)).unwrap());
        prop_assert_eq!(r(&BurnsideElement::one(Group::SO3)), BurnsideElement::one(Group::O2));
    }

    #[test]
    fn canonical_form_is_stable(m in module(Ring::PolyC)) {
        let c = m.canonical();
        prop_assert_eq!(c.canonical(), c.clone());
        prop_assert!(m.is_isomorphic(&c));
        for e in -10..=10 {
            prop_assert_eq!(m.dim_at(e), c.dim_at(e));
            prop_assert_eq!(m.suspend(2).dim_at(e + 2), m.dim_at(e));
        }
        prop_assert_eq!(m.twist().twist(), m.clone());
    }

    #[test]
    fn toral_functor_laws(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_object(&mut rng, &small(Side::SO3)).unwrap();
        let fx = toral::functor_f(&x).unwrap();
        prop_assert!(fx.check_star());
        prop_assert_eq!(toral::functor_r(&fx).unwrap().to_json(), x.to_json());
        let y = random_object(&mut rng, &small(Side::O2)).unwrap();
        prop_assert_eq!(y.twist().unwrap().twist().unwrap().to_json(), y.to_json());
        let (even, odd) = y.parity_split().unwrap();
        prop_assert!(toral::is_isomorphic(&even.direct_sum(&odd).unwrap(), &y).unwrap());
        prop_assert!(even.is_parity_pure(0) && odd.is_parity_pure(1));
    }

    #[test]
    fn dihedral_hom_is_additive(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b, c) = (random_dihedral(&mut rng, -1, 1, 2), random_dihedral(&mut rng, -1, 1, 2), random_dihedral(&mut rng, -1, 1, 2));
        let keys: Vec<u32> = a.indices().into_iter().chain(b.indices()).chain(c.indices()).collect();
        let pad = |x: &dihedral::DihedralObject| keys.iter().fold(x.clone(), |acc, &k| acc.with_explicit(k).unwrap());
        let (a, b, c) = (pad(&a), pad(&b), pad(&c));
        let bc = b.direct_sum(&c).unwrap();
        prop_assert_eq!(dihedral::hom_dim(&a, &bc, 0), dihedral::hom_dim(&a, &b, 0) + dihedral::hom_dim(&a, &c, 0));
        let h = dihedral::homology_ch(&a.suspend(1).unwrap()).unwrap();
        prop_assert_eq!(h, dihedral::homology_ch(&a).unwrap().suspend(1).unwrap());
    }

    #[test]
    fn group_homology_keeps_euler_characteristic(seed in any::<u64>(), class in 0usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = weyl_group_of(Exceptional::ALL[class]);
        let x = random_group_complex(&mut rng, &g, -2, 2, 2);
        let h = exceptional::homology_w(&x).unwrap();
        let euler = |c: &exceptional::GroupComplex| c.degrees().iter().map(|&n| if n.rem_euclid(2) == 0 { c.dim_at(n) as i64 } else { -(c.dim_at(n) as i64) }).sum::<i64>();
        prop_assert_eq!(euler(&h), euler(&x));
        let y = random_group_complex(&mut rng, &g, 0, 1, 1);
        prop_assert_eq!(exceptional::tensor_diagonal(&x, &y).unwrap().total_dim(), x.total_dim() * y.total_dim());
    }
}
