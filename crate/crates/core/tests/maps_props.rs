use proptest::prelude::*;
use splinequad::maps::{
    connection, connection_j, f_map, recursion, recursion_stretch, reflect_j, reflection, stretch,
};
use splinequad::semiclassical::{q_poly, Continuity, DiracVector};

fn continuity() -> impl Strategy<Value = Continuity> {
    prop_oneof![Just(Continuity::C0), Just(Continuity::C1)]
}

fn dirac() -> impl Strategy<Value = DiracVector> {
    continuity().prop_flat_map(|c| {
        prop::collection::vec(-0.3f64..0.3, c.dim())
            .prop_map(move |e| DiracVector::new(c, e).unwrap())
    })
}

/// Scales to unit max norm with a positive leading coefficient.
fn normalized(c: &[f64]) -> Vec<f64> {
    let m = c.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let s = c.last().copied().unwrap_or(1.0).signum() * m;
    c.iter().map(|x| x / s).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn connection_is_involution(l in dirac()) {
        prop_assert_eq!(connection(&connection(&l)), l);
    }

    #[test]
    fn coefficient_maps_are_involutions(l in dirac(), n in 2u32..=8) {
        let n = n as f64;
        let Ok(j) = f_map(n, &l) else { return Ok(()) };
        prop_assert!(reflect_j(&reflect_j(&j)).projective_distance(&j) <= 1e-10);
        if let Ok(cj) = connection_j(n, &j).and_then(|x| connection_j(n, &x)) {
            prop_assert!(cj.projective_distance(&j) <= 1e-10);
        }
    }

    #[test]
    fn reflection_is_involution_c0(l0 in -0.3f64..0.3, n in 2u32..=8) {
        let l = DiracVector::from_slice(&[l0]).unwrap();
        if let Ok(rr) = reflection(n as f64, &l).and_then(|r| reflection(n as f64, &r)) {
            prop_assert!(rr.distance(&l) <= 1e-10);
        }
    }

    #[test]
    fn commuting_diagram(l in dirac(), n in 2u32..=8) {
        let n = n as f64;
        let lhs = recursion(n, &l).and_then(|r| f_map(n, &r));
        let rhs = f_map(n, &l).and_then(|j| connection_j(n, &reflect_j(&j)));
        if let (Ok(a), Ok(b)) = (lhs, rhs) {
            prop_assert!(a.projective_distance(&b) <= 1e-10);
        }
    }

    #[test]
    fn stretch_conjugation(l in dirac(), n in 2u32..=8, lambda in 0.25f64..4.0) {
        let n = n as f64;
        if let Ok(r) = recursion(n, &l) {
            prop_assert_eq!(recursion_stretch(n, &l, lambda).unwrap(), stretch(&r, lambda).unwrap());
        }
    }

    /// The defining property of `R_n`: `Q_n(R_n(l), .)` is a multiple of `Q_n(l, -.)`, so its
    /// roots are the mirrored roots. Root positions of `Q_n(y, .)` are badly conditioned in
    /// `y` near the contracted image of `R_n`, so the polynomials are compared projectively.
    #[test]
    fn reflection_mirrors_polynomial(l in dirac(), n in 2usize..=8) {
        let Ok(rl) = reflection(n as f64, &l) else { return Ok(()) };
        let a = normalized(q_poly(n, &l).reflected().coeffs());
        let b = normalized(q_poly(n, &rl).coeffs());
        let err = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        prop_assert!(err <= 1e-10, "{a:?} vs {b:?}");
    }
}

#[test]
fn stretch_rejects_bad_factor() {
    let l = DiracVector::from_slice(&[0.1]).unwrap();
    assert!(stretch(&l, 0.0).is_err());
    assert!(stretch(&l, f64::NAN).is_err());
}
