use detideal::pfaffian::{generic_skew, pfaffian};
use detideal::poly::det_poly;
use detideal::random::{random_ideal_element, random_poly, random_skew_matrix, rng};
use detideal::straighten::{is_in_det_ideal, straighten, Straightener};
use detideal::Poly;
use num_traits::Zero;
use proptest::prelude::*;

fn constant_matrix(a: &[Vec<detideal::Rat>]) -> Vec<Vec<Poly>> {
    a.iter().map(|r| r.iter().map(|q| Poly::from_rat(q.clone())).collect()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn straighten_round_trips(seed in any::<u64>(), terms in 1usize..5) {
        let f = random_poly(&mut rng(seed), 3, 3, 3, terms);
        let mut st = Straightener::new();
        let e = st.straighten(&f).unwrap();
        prop_assert_eq!(st.expand_expr(&e, 3, 3).unwrap(), f);
    }

    #[test]
    fn ideal_elements_have_width_r(seed in any::<u64>()) {
        let f = random_ideal_element(&mut rng(seed), 3, 3, 2, 4, 2);
        prop_assert!(is_in_det_ideal(&f, 2).unwrap());
        if !f.is_zero() {
            prop_assert!(straighten(&f).unwrap().min_width().unwrap() >= 2);
        }
    }

    #[test]
    fn pfaffian_squares_to_det(seed in any::<u64>()) {
        let a = constant_matrix(&random_skew_matrix(&mut rng(seed), 6, 4));
        let p = pfaffian(&a).unwrap();
        prop_assert_eq!(p.mul_ref(&p), det_poly(&a));
    }
}

#[test]
fn generic_pfaffian_has_fifteen_terms() {
    assert_eq!(pfaffian(&generic_skew(6)).unwrap().len(), 15);
}
