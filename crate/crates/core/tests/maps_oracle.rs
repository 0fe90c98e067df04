//! The recursion and reflection maps against an exact rational evaluation of their
//! closed forms.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{ToPrimitive, Zero};
use proptest::prelude::*;
use splinequad::maps::{recursion, reflection};
use splinequad::semiclassical::DiracVector;

type Q = BigRational;

fn q(x: f64) -> Q {
    Q::from_float(x).unwrap()
}

fn qi(x: i64) -> Q {
    Q::from_integer(BigInt::from(x))
}

/// Exact recursion map; `None` at a pole.
fn rec_exact(n: i64, l: &[Q]) -> Option<Vec<Q>> {
    let nn = qi(n);
    let one = qi(1);
    if l.len() == 1 {
        let g = (&nn + &one) * (&nn + &one) * (&one + &nn * (&nn + qi(2)) / qi(2) * &l[0]);
        if g.is_zero() {
            return None;
        }
        return Some(vec![(qi(2) + (&nn + &one) * (&nn + &one) * &l[0]) / g]);
    }
    let (l0, l1) = (&l[0], &l[1]);
    let n = |k: i64| qi(n + k);
    let e = &one
        + n(1) * n(2) * (l0 + qi(3) * n(0) * n(3) * (qi(2) - n(-1) * n(1) * n(2) * n(4) * l1) * l1);
    let n2 = n(0) * n(0);
    let g0 = qi(4) * (qi(2) * &n2 + qi(6) * n(0) + qi(3))
        + n(0)
            * n(3)
            * ((qi(11) * &n2 + qi(33) * n(0) + qi(16)) * l0
                + qi(24)
                    * (qi(2) * &n2 * &n2 + qi(12) * &n2 * n(0) + qi(17) * &n2
                        - qi(3) * n(0)
                        - qi(4))
                    * l1
                - qi(3)
                    * n(0)
                    * n(1)
                    * n(2)
                    * n(3)
                    * (qi(4) * n(1) * n(2) * (qi(2) * &n2 + qi(6) * n(0) - qi(5)) * l1 * l1
                        + qi(3) * (&n2 - qi(1)) * n(0) * n(2) * n(3) * n(4) * l0 * l1 * l1
                        - qi(6) * (&n2 + qi(3) * n(0) - qi(2)) * l0 * l1
                        - l0 * l0));
    let g1 = &one - qi(3) * n(0) * n(1) * n(2) * n(3) * l1;
    let gm = n(1)
        * n(2)
        * (&one + n(0) * n(3) * l0 + qi(6) * n(0) * n(3) * (&n2 + qi(3) * n(0) - qi(1)) * l1
            - qi(3) * (&n2 - qi(1)) * &n2 * n(2) * n(3) * n(3) * n(4) * l1 * l1);
    if gm.is_zero() {
        return None;
    }
    Some(vec![
        -l0 + &e * g0 / (qi(3) * &gm * &gm),
        l1 + e * g1 / (qi(3) * n(1) * n(2) * gm),
    ])
}

/// `R_n = C o Rec_n` with `C: l_i -> (-1)^{i+1} l_i`.
fn refl_exact(n: i64, l: &[Q]) -> Option<Vec<Q>> {
    let r = rec_exact(n, l)?;
    Some(
        r.into_iter()
            .enumerate()
            .map(|(i, v)| if i % 2 == 0 { -v } else { v })
            .collect(),
    )
}

fn to_f64(v: &[Q]) -> Vec<f64> {
    v.iter().map(|x| x.to_f64().unwrap()).collect()
}

fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs() / x.abs().max(y.abs()).max(1e-300))
        .fold(0.0, f64::max)
}

fn dirac(entries: &[f64]) -> DiracVector {
    DiracVector::from_slice(entries).unwrap()
}

#[test]
fn exact_recursion_matches_known_values() {
    let r = rec_exact(2, &[qi(0)]).unwrap();
    assert_eq!(r[0], Q::new(BigInt::from(2), BigInt::from(9)));
    let r = rec_exact(2, &[qi(0), qi(0)]).unwrap();
    assert_eq!(r[0], Q::new(BigInt::from(23), BigInt::from(108)));
    assert_eq!(r[1], Q::new(BigInt::from(1), BigInt::from(432)));
    let r = rec_exact(3, &[qi(0), qi(0)]).unwrap();
    // stretched by 2 this gives (13/200, 1/4800)
    assert_eq!(&r[0] / qi(2), Q::new(BigInt::from(13), BigInt::from(200)));
    assert_eq!(&r[1] / qi(4), Q::new(BigInt::from(1), BigInt::from(4800)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn reflection_matches_exact_c0(n in 2i64..=8, l0 in -0.3f64..0.3) {
        let exact = refl_exact(n, &[q(l0)]);
        let lib = reflection(n as f64, &dirac(&[l0]));
        if let (Some(e), Ok(v)) = (exact, lib) {
            prop_assert!(rel_err(&to_f64(&e), v.entries()) < 1e-12);
        }
    }

    #[test]
    fn reflection_matches_exact_c1(n in 2i64..=8, l0 in -0.3f64..0.3, l1 in -0.3f64..0.3) {
        let exact = refl_exact(n, &[q(l0), q(l1)]);
        let lib = reflection(n as f64, &dirac(&[l0, l1]));
        if let (Some(e), Ok(v)) = (exact, lib) {
            let e = to_f64(&e);
            // absolute scale of each entry in the image
            let err = e.iter().zip(v.entries()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            prop_assert!(err < 1e-12 * (1.0 + e[0].abs()), "{e:?} vs {:?}", v.entries());
        }
    }

    #[test]
    fn recursion_matches_exact(n in 2i64..=8, l0 in -0.3f64..0.3, l1 in -0.01f64..0.01) {
        for l in [vec![l0], vec![l0, l1]] {
            let ql: Vec<Q> = l.iter().map(|x| q(*x)).collect();
            if let (Some(e), Ok(v)) = (rec_exact(n, &ql), recursion(n as f64, &dirac(&l))) {
                let e = to_f64(&e);
                let err = e.iter().zip(v.entries()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                prop_assert!(err < 1e-12 * (1.0 + e[0].abs()));
            }
        }
    }

    #[test]
    fn exact_reflection_is_an_involution(n in 2i64..=8, l0 in -0.3f64..0.3, l1 in -0.3f64..0.3) {
        for l in [vec![q(l0)], vec![q(l0), q(l1)]] {
            if let Some(rr) = refl_exact(n, &l).and_then(|r| refl_exact(n, &r)) {
                prop_assert_eq!(rr, l);
            }
        }
    }
}
