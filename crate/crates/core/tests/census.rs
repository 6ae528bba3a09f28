use curvecensus::formulas::{predicted_i, predicted_j};
use curvecensus::gf::prime_powers_up_to;
use curvecensus::{census, Error, Family, GaloisField, Guards};

#[test]
fn small_fields_match_predictions_for_every_family() {
    for q in prime_powers_up_to(64) {
        let f = GaloisField::with_order(q).unwrap();
        for fam in Family::ALL {
            if !fam.supports_characteristic(f.p()) {
                assert!(matches!(
                    census(&f, fam, &Guards::default()),
                    Err(Error::IncompatibleFamily { .. })
                ));
                continue;
            }
            let part = census(&f, fam, &Guards::default()).unwrap();
            assert_eq!(part.j_count(), predicted_j(fam, q).unwrap(), "{fam} q={q}");
            assert_eq!(part.i_count(), Some(predicted_i(fam, q).unwrap()), "{fam} q={q}");
            assert!(part.iso_refines_j());
            assert_eq!(part.n_weighted_total(), num_rational::Ratio::from_integer(part.j_count()));
        }
    }
}

#[test]
fn histograms_account_for_every_parameter() {
    let f = GaloisField::with_order(13).unwrap();
    let part = census(&f, Family::Legendre, &Guards::default()).unwrap();
    let total: u64 = part.n_hist.values().sum();
    assert_eq!(total, part.valid_count());
    assert_eq!(part.valid_count(), 11);
    let m: u64 = part.m_hist.as_ref().unwrap().values().sum();
    assert_eq!(m, 11);
    assert_eq!(part.m_weighted_total(), Some(num_rational::Ratio::from_integer(part.i_count().unwrap())));
}

#[test]
fn guards_reject_large_fields() {
    let f = GaloisField::with_order(1024).unwrap();
    let err = census(&f, Family::Hessian, &Guards::default()).unwrap_err();
    assert!(matches!(err, Error::GuardExceeded { .. }));
    let tight = Guards { hessian: 7, ..Guards::default() };
    assert!(census(&GaloisField::with_order(11).unwrap(), Family::Hessian, &tight).is_err());
    assert!(census(&f, Family::Hessian, &Guards::unlimited()).is_ok());
}
