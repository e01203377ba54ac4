mod common;

use common::*;
use padic_linreg::{membership, EchelonForm, FpVector, InsertOutcome};
use proptest::prelude::*;

fn outcome(o: InsertOutcome) -> OracleOutcome {
    match o {
        InsertOutcome::Inserted => OracleOutcome::Inserted,
        InsertOutcome::Dependent => OracleOutcome::Dependent,
        InsertOutcome::Inconsistent => OracleOutcome::Inconsistent,
    }
}

fn insertion_case() -> impl Strategy<Value = (u64, usize, Vec<(Vec<u64>, u64)>)> {
    (prop::sample::select(vec![2u64, 3, 5, 7]), 0usize..=6).prop_flat_map(|(p, dim)| {
        let sample = (prop::collection::vec(0..p, dim), 0..p);
        (Just(p), Just(dim), prop::collection::vec(sample, 1..12))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn incremental_matches_batch((p, dim, samples) in insertion_case()) {
        let mut form = EchelonForm::new(m(p), dim);
        let mut accepted: Vec<Vec<u64>> = Vec::new();
        for (x, y) in &samples {
            let v = extended(x, *y);
            let expected = classify(p, &accepted, &v);
            let got = form.insert_sample(&FpVector::new(m(p), x.iter().copied()), m(p).scalar(*y)).unwrap();
            prop_assert_eq!(outcome(got), expected);
            if expected == OracleOutcome::Inserted {
                accepted.push(v);
            }
            prop_assert_eq!(sorted_rows(&form), rref(p, &accepted));
            for (row, &col) in form.rows().zip(form.pivot_columns()) {
                prop_assert_eq!(row.as_slice()[col], 1);
                prop_assert!(col <= dim);
            }
        }
    }

    #[test]
    fn every_inserted_sample_satisfies_every_equation((p, dim, samples) in insertion_case()) {
        let mut form = EchelonForm::new(m(p), dim);
        let mut kept = Vec::new();
        for (x, y) in &samples {
            let xv = FpVector::new(m(p), x.iter().copied());
            if form.insert_sample(&xv, m(p).scalar(*y)).unwrap() == InsertOutcome::Inserted {
                kept.push((x.clone(), *y));
            }
        }
        prop_assume!(!form.is_empty());
        let system = form.equation_system().unwrap();
        prop_assert_eq!(system.len(), dim + 2 - form.rank());
        for c in system.vectors() {
            for (x, y) in &kept {
                prop_assert_eq!(affine(p, c.as_slice(), x), *y);
            }
        }
        if form.rank() == dim + 1 {
            prop_assert_eq!(form.coefficient_vector().unwrap(), system.vectors()[0].clone());
        }
    }

    #[test]
    fn copy_on_insert_leaves_the_source_untouched((p, dim, samples) in insertion_case()) {
        let mut form = EchelonForm::new(m(p), dim);
        for (x, y) in &samples {
            let before = form.clone();
            let (o, next) = form.with_sample(&FpVector::new(m(p), x.iter().copied()), m(p).scalar(*y)).unwrap();
            prop_assert_eq!(&form, &before);
            if o == InsertOutcome::Inserted {
                prop_assert_eq!(next.rank(), form.rank() + 1);
                form = next;
            } else {
                prop_assert_eq!(&next, &before);
            }
        }
    }
}

/// All insertion sequences of length up to `D + 1`, for `p = 3` and `D <= 2`:
/// a sample lies on the hull of the inserted ones iff its extended vector
/// reduces to zero against the form.
#[test]
fn membership_duality_is_exhaustive_for_p3() {
    let p = 3;
    for dim in 0..=2usize {
        let samples: Vec<(Vec<u64>, u64)> = all_vectors(p, dim + 1)
            .into_iter()
            .map(|mut v| {
                let y = v.pop().unwrap();
                (v, y)
            })
            .collect();
        let mut sequences: Vec<Vec<usize>> = vec![vec![]];
        let mut checked = 0usize;
        for _ in 0..=dim {
            let mut next = Vec::new();
            for seq in &sequences {
                for k in 0..samples.len() {
                    let mut s = seq.clone();
                    s.push(k);
                    next.push(s);
                }
            }
            for seq in &next {
                let mut form = EchelonForm::new(m(p), dim);
                for &k in seq {
                    let (x, y) = &samples[k];
                    form.insert_sample(&FpVector::new(m(p), x.iter().copied()), m(p).scalar(*y))
                        .unwrap();
                }
                let system = form.equation_system().unwrap();
                for (x, y) in &samples {
                    let xv = FpVector::new(m(p), x.iter().copied());
                    let on_hull = membership(&system, &xv, m(p).scalar(*y)).unwrap();
                    let reduced = form
                        .reduce_vector(&FpVector::new(m(p), extended(x, *y)))
                        .unwrap();
                    assert_eq!(on_hull, reduced.is_zero(), "dim {dim}, sequence {seq:?}, sample {x:?} {y}");
                    checked += 1;
                }
            }
            sequences = next;
        }
        assert!(checked > 0);
    }
}
