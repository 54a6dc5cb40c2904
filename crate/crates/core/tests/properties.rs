use proptest::prelude::*;

use pointdiv::bounds::{kappa, lambda, mu, mu_j, DegreeProfile};
use pointdiv::counting::{affine_points, Budget, Counter};
use pointdiv::field::{make_field, FieldDesc, FieldElement};
use pointdiv::harness::fuzz::instance_rng;
use pointdiv::harness::{generate_system, EquationCount, FuzzGrid};
use pointdiv::poly::{vanishes_on_system, Mode, PolySystem};

fn small_grid() -> FuzzGrid {
    FuzzGrid {
        fields: vec![(2, 1), (3, 1), (2, 2), (5, 1), (7, 1), (2, 3), (3, 2)],
        max_vars: 3,
        ..FuzzGrid::default()
    }
}

fn system(seed: u64, mode: Mode) -> PolySystem {
    generate_system(&mut instance_rng(seed, 0), &small_grid(), mode, EquationCount::Any)
}

fn all_points(f: &FieldDesc, n: usize) -> Vec<Vec<FieldElement>> {
    let elems: Vec<FieldElement> = f.elements().unwrap().collect();
    let mut pts = vec![Vec::new()];
    for _ in 0..n {
        pts = pts
            .into_iter()
            .flat_map(|p| {
                elems.iter().map(move |e| {
                    let mut v = p.clone();
                    v.push(e.clone());
                    v
                })
            })
            .collect();
    }
    pts
}

fn element(f: &FieldDesc, seed: u64) -> FieldElement {
    f.element_at(seed % f.order_u64().unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn factored_vanishing_matches_expansion(seed in any::<u64>()) {
        let sys = system(seed, Mode::Affine);
        let expanded: Vec<_> = (0..sys.num_equations()).map(|j| sys.expand_equation(j).unwrap()).collect();
        for pt in all_points(sys.field(), sys.n_vars()) {
            let naive = expanded.iter().all(|g| g.eval(&pt).unwrap().is_zero());
            prop_assert_eq!(vanishes_on_system(&sys, &pt).unwrap(), naive);
        }
    }

    #[test]
    fn homogenize_and_dehomogenize(seed in any::<u64>()) {
        let sys = system(seed, Mode::Affine);
        for f in sys.polys() {
            let h = f.homogenize().unwrap();
            prop_assert!(h.is_homogeneous());
            prop_assert_eq!(h.degree(), f.degree());
            let back = h.fix_variable(0, &f.field().one()).unwrap();
            prop_assert!(&back == f);
            let lead = f.leading_form().unwrap();
            prop_assert!(lead.is_homogeneous());
            prop_assert_eq!(lead.degree(), f.degree());
        }
    }

    #[test]
    fn complement_and_zeros_partition_space(seed in any::<u64>(), nu in 1u32..=2) {
        let sys = system(seed, Mode::Affine);
        let c = Counter::new(Budget::default(), 1);
        let x = c.count_affine(&sys, nu).unwrap();
        let u = c.count_affine_complement(&sys, nu).unwrap();
        prop_assert_eq!(x + u, affine_points(&sys.field().order().pow(nu), sys.n_vars()));
    }

    #[test]
    fn worker_count_does_not_change_counts(seed in any::<u64>(), workers in 2usize..=9, projective in any::<bool>()) {
        let mode = if projective { Mode::Projective } else { Mode::Affine };
        let sys = system(seed, mode);
        let one = Counter::new(Budget::default(), 1);
        let many = Counter::new(Budget::default(), workers);
        for nu in [1, 2] {
            if projective {
                prop_assert_eq!(one.count_projective(&sys, nu).unwrap(), many.count_projective(&sys, nu).unwrap());
            } else {
                prop_assert_eq!(one.count_affine(&sys, nu).unwrap(), many.count_affine(&sys, nu).unwrap());
            }
        }
    }

    #[test]
    fn larger_fields_obey_frobenius(which in 0usize..4, a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let (p, k) = [(2u64, 8usize), (3, 5), (7, 3), (101, 2)][which];
        let f = make_field(p, k).unwrap();
        let (x, y, z) = (element(&f, a), element(&f, b), element(&f, c));
        prop_assert!(x.satisfies_frobenius());
        let frob = |e: &FieldElement| e.pow_u64(p);
        prop_assert_eq!(frob(&x.add(&y).unwrap()), frob(&x).add(&frob(&y)).unwrap());
        prop_assert_eq!(x.mul(&y).unwrap().mul(&z).unwrap(), x.mul(&y.mul(&z).unwrap()).unwrap());
        prop_assert_eq!(x.mul(&y.add(&z).unwrap()).unwrap(), x.mul(&y).unwrap().add(&x.mul(&z).unwrap()).unwrap());
        if !x.is_zero() {
            prop_assert!(x.mul(&x.inv().unwrap()).unwrap().is_one());
        }
    }

    #[test]
    fn bounds_relations_beyond_the_grid(n in 1u32..=400, degrees in prop::collection::vec(1u32..=40, 1..=6)) {
        let p = DegreeProfile::new(n, degrees.clone()).unwrap();
        let next = DegreeProfile::new(n + 1, degrees.clone()).unwrap();
        prop_assert_eq!(kappa(&p), mu(&next));
        prop_assert!(mu(&next) >= mu(&p));
        prop_assert!(lambda(&p) <= mu(&p));
        prop_assert_eq!(mu_j(&p, 0).unwrap(), mu(&p));
        let mut prev = 0;
        for j in 0..=n {
            let v = mu_j(&p, j).unwrap();
            prop_assert!(v >= prev);
            prev = v;
        }
        prop_assert_eq!(mu_j(&p, n).unwrap(), n);
        let mut sorted = degrees.clone();
        sorted.sort_unstable();
        sorted.reverse();
        let shuffled = DegreeProfile::new(n, sorted).unwrap();
        prop_assert_eq!((mu(&shuffled), kappa(&shuffled)), (mu(&p), kappa(&p)));
    }
}
