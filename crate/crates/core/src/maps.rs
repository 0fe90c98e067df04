//! Maps on Dirac vectors and on the projective coefficient space.
//!
//! `recursion` advances the Dirac vector of one subinterval to the next so that splines
//! supported on both are integrated exactly; `connection` and `stretch` are the monomial
//! maps it is assembled from. In coefficient space a polynomial `Q_n(l, .)` is the
//! projective tuple of its Gegenbauer coefficients (`f_map`); reflecting `x -> -x` there
//! is a sign flip (`reflect_j`) and `connection_j` is the conjugate of `connection`.
//!
//! The degree parameter `n` is a real number: the closed forms are rational in `n`, with
//! poles at `n = -1` (continuity 0) and `n = -1, -2` (continuity 1).

use crate::error::{Error, Result};
use crate::semiclassical::{c1_e, q_coefficients, Continuity, DiracVector};

/// `l_i -> (-1)^{i+1} l_i`.
pub fn connection(l: &DiracVector) -> DiracVector {
    l.map_entries(|i, e| if i % 2 == 0 { -e } else { e })
}

/// `l_i -> l_i / lambda^{i+1}`.
pub fn stretch(l: &DiracVector, lambda: f64) -> Result<DiracVector> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidStretch(lambda));
    }
    Ok(l.map_entries(|i, e| e / lambda.powi(i as i32 + 1)))
}

/// Denominator polynomials of the recursion map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RecursionCoefficients {
    C0 { gamma: f64 },
    C1 { g0: f64, g1: f64, gamma: f64 },
}

impl RecursionCoefficients {
    pub fn evaluate(n: f64, l: &DiracVector) -> Self {
        let e = l.entries();
        match l.continuity() {
            Continuity::C0 => RecursionCoefficients::C0 {
                gamma: (n + 1.0).powi(2) * (1.0 + n * (n + 2.0) / 2.0 * e[0]),
            },
            Continuity::C1 => {
                let (l0, l1) = (e[0], e[1]);
                let p = n * (n + 1.0) * (n + 2.0) * (n + 3.0);
                let g0 = 4.0 * (2.0 * n * n + 6.0 * n + 3.0)
                    + n * (n + 3.0)
                        * ((11.0 * n * n + 33.0 * n + 16.0) * l0
                            + 24.0
                                * (2.0 * n.powi(4) + 12.0 * n.powi(3) + 17.0 * n * n
                                    - 3.0 * n
                                    - 4.0)
                                * l1
                            - 3.0
                                * p
                                * (4.0
                                    * (n + 1.0)
                                    * (n + 2.0)
                                    * (2.0 * n * n + 6.0 * n - 5.0)
                                    * l1
                                    * l1
                                    + 3.0
                                        * (n * n - 1.0)
                                        * n
                                        * (n + 2.0)
                                        * (n + 3.0)
                                        * (n + 4.0)
                                        * l0
                                        * l1
                                        * l1
                                    - 6.0 * (n * n + 3.0 * n - 2.0) * l0 * l1
                                    - l0 * l0));
                let g1 = 1.0 - 3.0 * p * l1;
                let gamma = (n + 1.0)
                    * (n + 2.0)
                    * (1.0
                        + n * (n + 3.0) * l0
                        + 6.0 * n * (n + 3.0) * (n * n + 3.0 * n - 1.0) * l1
                        - 3.0
                            * (n * n - 1.0)
                            * n
                            * n
                            * (n + 2.0)
                            * (n + 3.0).powi(2)
                            * (n + 4.0)
                            * l1
                            * l1);
                RecursionCoefficients::C1 { g0, g1, gamma }
            }
        }
    }

    pub fn gamma(&self) -> f64 {
        match *self {
            RecursionCoefficients::C0 { gamma } | RecursionCoefficients::C1 { gamma, .. } => gamma,
        }
    }
}

const POLE_RELATIVE: f64 = 1e-12;

fn check_degree(c: Continuity, n: f64) -> Result<()> {
    let excluded: &[f64] = match c {
        Continuity::C0 => &[-1.0],
        Continuity::C1 => &[-1.0, -2.0],
    };
    if !n.is_finite() || excluded.contains(&n) {
        return Err(Error::ExcludedDegree(n));
    }
    Ok(())
}

/// The recursion map `Rec_n = C o R_n`.
pub fn recursion(n: f64, l: &DiracVector) -> Result<DiracVector> {
    let c = l.continuity();
    check_degree(c, n)?;
    let coeffs = RecursionCoefficients::evaluate(n, l);
    // value of Gamma at l = 0, used as the pole scale
    let scale = match c {
        Continuity::C0 => (n + 1.0).powi(2),
        Continuity::C1 => ((n + 1.0) * (n + 2.0)).abs(),
    };
    let gamma = coeffs.gamma();
    if gamma.abs() < POLE_RELATIVE * scale || !gamma.is_finite() {
        return Err(Error::RecursionPole { n, gamma });
    }
    let e = l.entries();
    let entries = match coeffs {
        RecursionCoefficients::C0 { gamma } => vec![(2.0 + (n + 1.0).powi(2) * e[0]) / gamma],
        RecursionCoefficients::C1 { g0, gamma, .. } => {
            let big_e = c1_e(n, e);
            // l_1 + E G_1 / (3 (n+1)(n+2) Gamma) over a common denominator; the cubic terms
            // cancel exactly, and evaluating the sum directly loses digits for large |l_1|
            let (p, m) = ((n + 1.0) * (n + 2.0), n * (n + 3.0));
            let num1 =
                1.0 + p * e[0] + 6.0 * p * (m + 1.0) * e[1] - 3.0 * m * p.powi(3) * e[1] * e[1];
            vec![
                -e[0] + big_e * g0 / (3.0 * gamma * gamma),
                num1 / (3.0 * p * gamma),
            ]
        }
    };
    DiracVector::new(c, entries)
}

/// `stretch(recursion(n, l), lambda)`.
pub fn recursion_stretch(n: f64, l: &DiracVector, lambda: f64) -> Result<DiracVector> {
    stretch(&recursion(n, l)?, lambda)
}

/// The reflection map `R_n`: `Q_n(l, -x)` is proportional to `Q_n(R_n(l), x)`.
pub fn reflection(n: f64, l: &DiracVector) -> Result<DiracVector> {
    Ok(connection(&recursion(n, l)?))
}

/// Projective tuple `(j_0 : ... : j_{c+1})`, stored with its largest-magnitude entry
/// equal to `+1` (first such entry on ties).
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiCoefficientVector {
    c: Continuity,
    entries: Vec<f64>,
}

impl JacobiCoefficientVector {
    pub fn new(c: Continuity, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != c.dim() + 1 {
            return Err(Error::DiracLength {
                expected: c.dim() + 1,
                got: entries.len(),
            });
        }
        let (mut pivot, mut max) = (0, 0.0);
        for (i, e) in entries.iter().enumerate() {
            if e.abs() > max {
                max = e.abs();
                pivot = i;
            }
        }
        if max == 0.0 || !max.is_finite() {
            return Err(Error::DegenerateProjective);
        }
        let p = entries[pivot];
        Ok(Self {
            c,
            entries: entries.iter().map(|e| e / p).collect(),
        })
    }

    pub fn continuity(&self) -> Continuity {
        self.c
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// Sine-like distance between the two lines: 0 iff projectively equal.
    pub fn projective_distance(&self, other: &Self) -> f64 {
        let na = self.entries.iter().map(|e| e * e).sum::<f64>().sqrt();
        let nb = other.entries.iter().map(|e| e * e).sum::<f64>().sqrt();
        let diff = |sign: f64| {
            self.entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| (a / na - sign * b / nb).abs())
                .fold(0.0, f64::max)
        };
        diff(1.0).min(diff(-1.0))
    }
}

/// Coefficients of `Q_n(l, .)` on `C_n, ..., C_{n-c-1}` as a projective point.
pub fn f_map(n: f64, l: &DiracVector) -> Result<JacobiCoefficientVector> {
    JacobiCoefficientVector::new(l.continuity(), q_coefficients(n, l))
}

/// `j_i -> (-1)^i j_i`.
pub fn reflect_j(j: &JacobiCoefficientVector) -> JacobiCoefficientVector {
    let entries = j
        .entries
        .iter()
        .enumerate()
        .map(|(i, e)| if i % 2 == 0 { *e } else { -e })
        .collect();
    JacobiCoefficientVector::new(j.c, entries).expect("reflection keeps a nonzero vector")
}

/// Homogeneous coordinates of the connection map in coefficient space, not normalized.
/// Linear for continuity 0, quadratic for continuity 1.
pub fn connection_j_forms(c: Continuity, n: f64, j: &[f64]) -> Vec<f64> {
    match c {
        Continuity::C0 => vec![
            (n + 1.0) * j[0] - n * j[1],
            (n + 2.0) * j[0] - (n + 1.0) * j[1],
        ],
        Continuity::C1 => {
            let (j0, j1, j2) = (j[0], j[1], j[2]);
            let n2 = n * n;
            let b = -(n + 3.0) * j0 + n * j2;
            let delta = (n + 3.0)
                * (2.0 * n2 * n2 + 18.0 * n2 * n + 49.0 * n2 + 48.0 * n + 18.0)
                * j0
                * j0
                + n2 * (n + 3.0) * (2.0 * n2 + 6.0 * n + 1.0) * j1 * j1
                + n2 * (n - 1.0) * (2.0 * n2 + 2.0 * n - 3.0) * j2 * j2
                - 2.0 * n * (n + 2.0) * (n + 3.0) * (2.0 * n2 + 8.0 * n + 3.0) * j0 * j1
                + 2.0 * n * (2.0 * n2 * n2 + 12.0 * n2 * n + 25.0 * n2 + 15.0 * n - 9.0) * j0 * j2
                - 2.0 * n2 * (n + 1.0) * (2.0 * n2 + 4.0 * n - 3.0) * j1 * j2;
            vec![
                n * delta,
                (2.0 * n + 3.0) * (delta + 6.0 * b * ((2.0 * n + 3.0) * j0 - n * j1)),
                (n + 3.0) * delta - 6.0 * (2.0 * n + 3.0) * b * b,
            ]
        }
    }
}

/// The connection map conjugated into coefficient space; an involution.
pub fn connection_j(n: f64, j: &JacobiCoefficientVector) -> Result<JacobiCoefficientVector> {
    let image = connection_j_forms(j.c, n, &j.entries);
    let scale = j.entries.iter().fold(0.0_f64, |m, e| m.max(e.abs()));
    let size = image.iter().fold(0.0_f64, |m, e| m.max(e.abs()));
    // the quadratic map has a base locus where every coordinate vanishes
    if size <= 1e-14 * scale.powi(j.c.index() as i32 + 1) * (1.0 + n.abs()).powi(5) {
        return Err(Error::Indeterminate);
    }
    JacobiCoefficientVector::new(j.c, image).map_err(|_| Error::Indeterminate)
}

const FIXED_POINT_TOL: f64 = 1e-13;
const FIXED_POINT_ACCEPT: f64 = 1e-12;
const FIXED_POINT_MAX_ITER: usize = 100;

/// Fixed point of `recursion(n, .)` by damped Newton from `seed`.
///
/// The Jacobian is formed by central differences.
pub fn fixed_point(n: f64, seed: &DiracVector) -> Result<DiracVector> {
    let c = seed.continuity();
    let dim = c.dim();
    let residual = |l: &DiracVector| -> Result<Vec<f64>> {
        let r = recursion(n, l)?;
        Ok(r.entries()
            .iter()
            .zip(l.entries())
            .map(|(a, b)| a - b)
            .collect())
    };
    let norm = |v: &[f64]| v.iter().fold(0.0_f64, |m, e| m.max(e.abs()));

    let mut l = seed.clone();
    let mut f = residual(&l)?;
    for _ in 0..FIXED_POINT_MAX_ITER {
        if norm(&f) <= FIXED_POINT_TOL {
            return Ok(l);
        }
        let mut jac = vec![vec![0.0; dim]; dim];
        for k in 0..dim {
            let h = 1e-6 * (l.get(k).abs() + 1e-4);
            let plus = l.map_entries(|i, e| if i == k { e + h } else { e });
            let minus = l.map_entries(|i, e| if i == k { e - h } else { e });
            let (fp, fm) = (residual(&plus)?, residual(&minus)?);
            for (row, (a, b)) in jac.iter_mut().zip(fp.iter().zip(&fm)) {
                row[k] = (a - b) / (2.0 * h);
            }
        }
        let step = solve_small(&jac, &f).ok_or(Error::NoConvergence {
            iterations: 0,
            residual: norm(&f),
        })?;
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let trial = l.map_entries(|i, e| e - t * step[i]);
            if let Ok(ft) = residual(&trial) {
                if norm(&ft) < norm(&f) {
                    l = trial;
                    f = ft;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    let res = norm(&f);
    if res <= FIXED_POINT_ACCEPT {
        Ok(l)
    } else {
        Err(Error::NoConvergence {
            iterations: FIXED_POINT_MAX_ITER,
            residual: res,
        })
    }
}

fn solve_small(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    match a.len() {
        1 => (a[0][0] != 0.0).then(|| vec![b[0] / a[0][0]]),
        2 => {
            let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
            if det == 0.0 || !det.is_finite() {
                return None;
            }
            Some(vec![
                (b[0] * a[1][1] - a[0][1] * b[1]) / det,
                (a[0][0] * b[1] - a[1][0] * b[0]) / det,
            ])
        }
        _ => None,
    }
}

/// `l_1` of the rational continuity-1 fixed point with positive `l_1` (where `G_1` vanishes).
pub fn c1_attractor_l1(n: f64) -> f64 {
    1.0 / (3.0 * n * (n + 1.0) * (n + 2.0) * (n + 3.0))
}
