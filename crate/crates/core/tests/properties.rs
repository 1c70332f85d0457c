use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use veering_core::algebra::{AlgebraicNumber, IntegerMatrix, NumberField};
use veering_core::moves::{canonical_form, fold, run_sequence, split, DEFAULT_MAX_STEPS};
use veering_core::seed::seed_punctured_torus;
use veering_core::track::{parse_track, serialize_track, BranchKind, SurfaceHeader, TrackFile};

fn word() -> impl Strategy<Value = String> {
    proptest::collection::vec(prop_oneof![Just('R'), Just('L')], 2..7)
        .prop_filter("both letters", |w| w.contains(&'R') && w.contains(&'L'))
        .prop_map(|w| w.into_iter().collect())
}

/// `a.0 + a.1·λ` with `λ` the golden square.
fn golden(a: (i64, i64)) -> AlgebraicNumber {
    let (_, mu) = seed_punctured_torus("RL").unwrap();
    let k = mu[0].field().clone();
    let q = |n: i64| k.from_rational(BigRational::from_integer(BigInt::from(n)));
    &q(a.0) + &(&q(a.1) * &k.generator())
}

fn det3(m: &[[i64; 3]; 3]) -> i64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn field_arithmetic_is_a_field(a in (-9i64..9, -9i64..9), b in (-9i64..9, -9i64..9), c in (-9i64..9, -9i64..9)) {
        let (x, y, z) = (golden(a), golden(b), golden(c));
        prop_assert_eq!(&(&x + &y) * &z, &(&x * &z) + &(&y * &z));
        if !x.is_zero() {
            let one = x.field().from_int(1);
            prop_assert_eq!(&x * &x.inverse().unwrap(), one);
        }
    }

    #[test]
    fn char_poly_matches_trace_and_determinant(entries in proptest::collection::vec(0i64..6, 9)) {
        let m = [
            [entries[0], entries[1], entries[2]],
            [entries[3], entries[4], entries[5]],
            [entries[6], entries[7], entries[8]],
        ];
        let im = IntegerMatrix::from_rows(&m.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap();
        let cp = im.char_poly();
        let c = cp.coeffs();
        prop_assert_eq!(c.len(), 4);
        prop_assert_eq!(&c[3], &BigInt::from(1));
        prop_assert_eq!(&c[2], &BigInt::from(-(m[0][0] + m[1][1] + m[2][2])));
        prop_assert_eq!(&c[0], &BigInt::from(-det3(&m)));
    }

    #[test]
    fn track_files_round_trip(w in word()) {
        let (track, measure) = seed_punctured_torus(&w).unwrap();
        let f = TrackFile { surface: SurfaceHeader::Auto, track, measure: Some(measure) };
        let text = serialize_track(&f);
        let back = parse_track(&text).unwrap();
        prop_assert_eq!(serialize_track(&back), text);
        prop_assert_eq!(back, f);
    }

    #[test]
    fn splitting_keeps_measures_valid(w in word()) {
        let (t, mu) = seed_punctured_torus(&w).unwrap();
        let (seq, cert) = run_sequence(&t, &mu, DEFAULT_MAX_STEPS).unwrap();
        prop_assert!(cert.is_some());
        for (t, mu) in &seq.states {
            prop_assert!(t.validate_measure(mu).is_ok());
        }
    }

    #[test]
    fn canonical_form_ignores_labels(w in word(), sw in Just(vec![0usize, 1]).prop_shuffle(), br in Just(vec![0usize, 1, 2]).prop_shuffle()) {
        let (t, mu) = seed_punctured_torus(&w).unwrap();
        let r = t.relabel(&sw, &br);
        let mut rmu = mu.clone();
        for (b, x) in mu.iter().enumerate() {
            rmu[br[b]] = x.clone();
        }
        prop_assert_eq!(canonical_form(&r, Some(&rmu)), canonical_form(&t, Some(&mu)));
    }

    #[test]
    fn fold_undoes_split(w in word(), step in 0usize..6) {
        let (t, mu) = seed_punctured_torus(&w).unwrap();
        let (seq, _) = run_sequence(&t, &mu, DEFAULT_MAX_STEPS).unwrap();
        let (t, mu) = &seq.states[step % seq.states.len()];
        for e in 0..t.num_branches() {
            if t.classify_branch(e) != BranchKind::Large {
                continue;
            }
            if let Ok((t2, w2, _)) = split(t, mu, e) {
                let (t3, w3, _) = fold(&t2, &w2, e).unwrap();
                prop_assert_eq!(canonical_form(&t3, Some(&w3)), canonical_form(t, Some(mu)));
            }
        }
    }
}

#[test]
fn rationals_are_a_field_too() {
    let q = NumberField::rationals();
    let half = q.from_rational(BigRational::new(1.into(), 2.into()));
    assert_eq!(&half * &half.inverse().unwrap(), q.from_int(1));
}
