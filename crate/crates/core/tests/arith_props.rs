mod common;

use common::*;
use num_bigint::BigUint;
use padic_linreg::fp::is_prime;
use padic_linreg::{fp_affine_eval, fp_inv, zp_affine_eval, Error, FpVector, PrimeModulus, ZpTrunc};
use proptest::prelude::*;

fn prime() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![
        2u64,
        3,
        5,
        7,
        11,
        101,
        65_537,
        2_147_483_647,
        4_294_967_311,
        1_000_000_000_000_000_003,
        18_446_744_073_709_551_557,
    ])
}

fn residue(p: u64, e: u32, digits: &[u64]) -> BigUint {
    digits
        .iter()
        .take(e as usize)
        .fold(BigUint::ZERO, |acc, &d| acc * p + d % p)
}

/// `(p, E, a, b)` with `a, b` drawn digit by digit so that every precision
/// is covered, including ones overflowing `u64`.
fn zp_pair() -> impl Strategy<Value = (u64, u32, BigUint, BigUint)> {
    (prime(), 1u32..=5).prop_flat_map(|(p, e)| {
        let digits = prop::collection::vec(any::<u64>(), e as usize);
        (Just(p), Just(e), digits.clone(), digits)
            .prop_map(|(p, e, a, b)| (p, e, residue(p, e, &a), residue(p, e, &b)))
    })
}

fn big_pow(p: u64, e: u32) -> BigUint {
    BigUint::from(p).pow(e)
}

fn big_to_u64(v: &BigUint) -> u64 {
    u64::try_from(v).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn fp_ops_match_wide_integers(p in prime(), a in any::<u64>(), b in any::<u64>()) {
        let m = m(p);
        let (a, b) = (a % p, b % p);
        let w = |v: u128| (v % p as u128) as u64;
        prop_assert_eq!(m.add(a, b), w(a as u128 + b as u128));
        prop_assert_eq!(m.sub(a, b), w(a as u128 + p as u128 - b as u128));
        prop_assert_eq!(m.mul(a, b), w(a as u128 * b as u128));
        prop_assert_eq!(m.neg(a), w(p as u128 - a as u128));
    }

    #[test]
    fn fp_inverse_is_an_involution(p in prime(), a in any::<u64>()) {
        let a = m(p).scalar(a);
        prop_assume!(!a.is_zero());
        let inv = fp_inv(a).unwrap();
        prop_assert_eq!(inv * a, m(p).one());
        prop_assert_eq!(fp_inv(inv).unwrap(), a);
        prop_assert_eq!(inv.value(), inv_mod(a.value(), p));
    }

    #[test]
    fn fp_affine_eval_matches_naive(p in prime(), c in prop::collection::vec(any::<u64>(), 1..40), x in prop::collection::vec(any::<u64>(), 40)) {
        let dim = c.len() - 1;
        let cv = FpVector::new(m(p), c.iter().copied());
        let xv = FpVector::new(m(p), x[..dim].iter().copied());
        let mut acc = BigUint::from(cv.as_slice()[dim]);
        for (a, b) in cv.as_slice().iter().zip(xv.as_slice()) {
            acc += BigUint::from(*a) * *b;
        }
        prop_assert_eq!(fp_affine_eval(&cv, &xv).unwrap().value(), big_to_u64(&(acc % p)));
    }

    #[test]
    fn zp_ops_match_big_integers((p, e, a, b) in zp_pair()) {
        let modulus = big_pow(p, e);
        let (za, zb) = (ZpTrunc::from_biguint(m(p), e, &a), ZpTrunc::from_biguint(m(p), e, &b));
        prop_assert_eq!(za.add(&zb).unwrap().to_biguint(), (&a + &b) % &modulus);
        prop_assert_eq!(za.sub(&zb).unwrap().to_biguint(), (&a + &modulus - &b) % &modulus);
        prop_assert_eq!(za.mul(&zb).unwrap().to_biguint(), (&a * &b) % &modulus);
        prop_assert_eq!(za.neg().to_biguint(), (&modulus - &a) % &modulus);
    }

    #[test]
    fn reduction_mod_p_is_a_ring_homomorphism((p, e, a, b) in zp_pair()) {
        let fp = m(p);
        let (za, zb) = (ZpTrunc::from_biguint(fp, e, &a), ZpTrunc::from_biguint(fp, e, &b));
        let (ra, rb) = (za.residue_mod_p(), zb.residue_mod_p());
        prop_assert_eq!(ra, big_to_u64(&(&a % p)));
        prop_assert_eq!(za.add(&zb).unwrap().residue_mod_p(), fp.add(ra, rb));
        prop_assert_eq!(za.sub(&zb).unwrap().residue_mod_p(), fp.sub(ra, rb));
        prop_assert_eq!(za.mul(&zb).unwrap().residue_mod_p(), fp.mul(ra, rb));
    }

    #[test]
    fn exact_division_round_trips((p, e, a, _b) in zp_pair()) {
        let z = ZpTrunc::from_biguint(m(p), e, &a);
        let lifted = z.mul_p_lift();
        prop_assert_eq!(lifted.precision(), e + 1);
        prop_assert_eq!(lifted.exact_div_p().unwrap(), z.clone());
        if z.residue_mod_p() == 0 {
            let q = z.exact_div_p().unwrap();
            prop_assert_eq!(q.precision(), e - 1);
            prop_assert_eq!(q.to_biguint() * p, a.clone());
        } else {
            prop_assert_eq!(z.exact_div_p(), Err(Error::NotDivisible));
        }
    }

    #[test]
    fn valuation_counts_trailing_zero_digits((p, e, a, _b) in zp_pair(), shift in 0u32..6) {
        let shifted = (&a * big_pow(p, shift)) % big_pow(p, e);
        let z = ZpTrunc::from_biguint(m(p), e, &shifted);
        let mut expected = 0;
        let mut v = shifted.clone();
        while expected < e && v != BigUint::ZERO && (&v % p) == BigUint::ZERO {
            v /= p;
            expected += 1;
        }
        if shifted == BigUint::ZERO {
            expected = e;
        }
        prop_assert_eq!(z.valuation(), expected);
    }

    #[test]
    fn decimal_text_round_trips((p, e, a, _b) in zp_pair()) {
        let z = ZpTrunc::from_biguint(m(p), e, &a);
        prop_assert_eq!(z.to_string(), a.to_string());
        prop_assert_eq!(ZpTrunc::parse(m(p), e, &z.to_string()).unwrap(), z);
    }

    #[test]
    fn truncation_commutes_with_multiplication((p, e, a, b) in zp_pair(), k in 0u32..5) {
        let k = k.min(e);
        let (za, zb) = (ZpTrunc::from_biguint(m(p), e, &a), ZpTrunc::from_biguint(m(p), e, &b));
        let full = za.mul(&zb).unwrap().truncate(k).unwrap();
        let low = za.truncate(k).unwrap().mul(&zb.truncate(k).unwrap()).unwrap();
        prop_assert_eq!(full, low);
    }
}

#[test]
fn zp_affine_eval_against_big_integers() {
    let p = m(1_000_000_007);
    let e = 3;
    let modulus = big_pow(p.get(), e);
    let c: Vec<BigUint> = (1..=4u64).map(|k| big_pow(p.get(), 2) * k + 12_345 * k).collect();
    let x: Vec<BigUint> = (5..8u64).map(|k| big_pow(p.get(), 2) * (k * 99_991) + k).collect();
    let mut expected = c[3].clone();
    for (a, b) in c.iter().zip(&x) {
        expected += a * b;
    }
    let zc: Vec<_> = c.iter().map(|v| ZpTrunc::from_biguint(p, e, v)).collect();
    let zx: Vec<_> = x.iter().map(|v| ZpTrunc::from_biguint(p, e, v)).collect();
    assert_eq!(zp_affine_eval(&zc, &zx).unwrap().to_biguint(), expected % modulus);
}

#[test]
fn primality_against_trial_division() {
    let trial = |n: u64| n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d));
    for n in 0..20_000u64 {
        assert_eq!(is_prime(n), trial(n), "{n}");
    }
    for n in [4_294_967_291u64, 4_294_967_297, 3_215_031_751, 341_550_071_728_321] {
        assert_eq!(is_prime(n), trial(n), "{n}");
    }
    assert!(PrimeModulus::new(18_446_744_073_709_551_557).is_ok());
    assert_eq!(PrimeModulus::new(18_446_744_073_709_551_615), Err(Error::NotPrime(18_446_744_073_709_551_615)));
}
