use nashfold_core::exactmath::IntMatrix;
use nashfold_core::graver::graver_basis;
use nashfold_core::nfold::{
    build_c_matrix, build_multitype_matrix, build_nash_matrix, pad_to_c, NfoldSpec, TypeCatalog,
};
use nashfold_core::oracle::is_graver_element;
use nashfold_core::random::{random_matrix, seeded};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn padded_elements_stay_graver(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let a = random_matrix(&mut rng, 1, 2, 0, 1);
        let b = random_matrix(&mut rng, 1, 2, 0, 1);
        let spec = NfoldSpec::new(a, b, 1 + (seed % 2) as usize).unwrap();
        let c = build_c_matrix(&spec);
        for g in graver_basis(&build_nash_matrix(&spec)).unwrap().elements() {
            let padded = pad_to_c(g, &spec).unwrap();
            prop_assert!(c.mul_vec(&padded).unwrap().is_zero());
            prop_assert!(is_graver_element(&c, &padded).unwrap());
        }
    }

    #[test]
    fn single_type_catalog_matches_nash_matrix(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let a = random_matrix(&mut rng, 1, 2, -1, 2);
        let b = random_matrix(&mut rng, 1, 2, 0, 1);
        let players = 1 + (seed % 3) as usize;
        let spec = NfoldSpec::new(a.clone(), b.clone(), players).unwrap();
        let catalog = TypeCatalog::new(vec![(a, b)], vec![0; players]).unwrap();
        prop_assert_eq!(build_multitype_matrix(&catalog), build_nash_matrix(&spec));
    }
}

#[test]
fn lifted_shapes() {
    let spec = NfoldSpec::new(
        IntMatrix::from_i64_rows(&[&[1, 1]]),
        IntMatrix::from_i64_rows(&[&[1, 0]]),
        2,
    )
    .unwrap();
    let c = build_c_matrix(&spec);
    assert_eq!((c.rows(), c.cols()), (5, 10));
}
