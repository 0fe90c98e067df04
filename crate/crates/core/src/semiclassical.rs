//! Semi-classical Jacobi polynomials for continuity classes 0 and 1.
//!
//! `Q_n(l, x)` is orthogonal for the weight `(1 - x)^{c+1}` augmented by Dirac terms
//! `l_i delta^{(i)}(x + 1)`; `M_n(l, r, x)` for the constant weight augmented at both
//! ends. The closed forms below are expansions in the Gegenbauer basis
//! `C_k^{(c + 3/2)}`; all helper scalars (`E`, `F`, `H`, `J`, the `D` terms and `F13`)
//! are polynomials in the Dirac coefficients and in `n`, so `n` is accepted as a real
//! number where a caller needs that (the recursion maps).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::orthopoly::{gauss_legendre, real_roots, GegenbauerSeries, Poly, RootSet};

/// Continuity class of the target spline space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub enum Continuity {
    C0,
    C1,
}

impl Continuity {
    pub fn index(self) -> u32 {
        match self {
            Continuity::C0 => 0,
            Continuity::C1 => 1,
        }
    }

    /// Length of a Dirac vector, `c + 1`.
    pub fn dim(self) -> usize {
        self.index() as usize + 1
    }

    /// Gegenbauer parameter of the polynomial family, `c + 3/2`.
    pub fn alpha(self) -> f64 {
        self.index() as f64 + 1.5
    }
}

impl TryFrom<u32> for Continuity {
    type Error = Error;

    fn try_from(c: u32) -> Result<Self> {
        match c {
            0 => Ok(Continuity::C0),
            1 => Ok(Continuity::C1),
            other => Err(Error::UnsupportedContinuity(other)),
        }
    }
}

impl From<Continuity> for u32 {
    fn from(c: Continuity) -> u32 {
        c.index()
    }
}

/// Coefficients of `delta, delta', ..., delta^{(c)}` attached to one end of a subinterval.
///
/// Entries are stored in the coordinates of the closed-form polynomials and recursion
/// maps. The Dirac measure they stand for has entry `i` multiplied by
/// [`dirac_normalization`]`(c)[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiracVector {
    c: Continuity,
    entries: Vec<f64>,
}

impl DiracVector {
    pub fn new(c: Continuity, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != c.dim() {
            return Err(Error::DiracLength {
                expected: c.dim(),
                got: entries.len(),
            });
        }
        if entries.iter().any(|e| !e.is_finite()) {
            return Err(Error::NonFiniteDirac);
        }
        Ok(Self { c, entries })
    }

    /// Infers the continuity class from the number of entries.
    pub fn from_slice(entries: &[f64]) -> Result<Self> {
        let c = Continuity::try_from(entries.len().saturating_sub(1) as u32)?;
        Self::new(c, entries.to_vec())
    }

    pub fn zero(c: Continuity) -> Self {
        Self {
            c,
            entries: vec![0.0; c.dim()],
        }
    }

    pub fn continuity(&self) -> Continuity {
        self.c
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn get(&self, i: usize) -> f64 {
        self.entries[i]
    }

    pub(crate) fn map_entries(&self, f: impl Fn(usize, f64) -> f64) -> Self {
        Self {
            c: self.c,
            entries: self
                .entries
                .iter()
                .enumerate()
                .map(|(i, &e)| f(i, e))
                .collect(),
        }
    }

    /// Largest absolute entry difference.
    pub fn distance(&self, other: &Self) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Factor between a stored Dirac entry and the coefficient of `delta^{(i)}` in the weight.
///
/// The closed forms for continuity 1 are normalized so that the defect at `-1` reads
/// `2 l_0 g(-1) - 24 l_1 g'(-1)`.
pub fn dirac_normalization(c: Continuity) -> &'static [f64] {
    match c {
        Continuity::C0 => &[1.0],
        Continuity::C1 => &[2.0, 24.0],
    }
}

fn same_class(a: &DiracVector, b: &DiracVector) -> Result<()> {
    if a.c != b.c {
        return Err(Error::DiracLength {
            expected: a.c.dim(),
            got: b.entries.len(),
        });
    }
    Ok(())
}

// ---- helper scalars, continuity 0 ----

fn c0_f(n: f64, l: &[f64]) -> f64 {
    1.0 + n * (n + 1.0) / 2.0 * l[0]
}

fn c0_h(n: f64, l: &[f64], r: &[f64]) -> f64 {
    1.0 + n * n / 2.0 * (l[0] + r[0] + (n - 1.0) * (n + 1.0) / 2.0 * l[0] * r[0])
}

// ---- helper scalars, continuity 1 ----

pub(crate) fn c1_e(n: f64, l: &[f64]) -> f64 {
    let (l0, l1) = (l[0], l[1]);
    1.0 + (n + 1.0)
        * (n + 2.0)
        * (l0
            + 3.0 * n * (n + 3.0) * (2.0 - (n - 1.0) * (n + 1.0) * (n + 2.0) * (n + 4.0) * l1) * l1)
}

fn c1_f(n: f64, l: &[f64]) -> f64 {
    let (l0, l1) = (l[0], l[1]);
    1.0 + n
        * (n + 2.0)
        * (l0 + 6.0 * (n * n + 2.0 * n - 1.0) * l1
            - 3.0 * (n - 1.0) * n * (n + 1.0).powi(2) * (n + 2.0) * (n + 3.0) * l1 * l1)
}

fn c1_ha(n: f64, d: &[f64]) -> f64 {
    let (d0, d1) = (d[0], d[1]);
    1.0 + (n - 1.0)
        * n
        * (d0
            + (n - 2.0) * (n + 1.0) * (6.0 - 3.0 * (n - 3.0) * (n - 1.0) * n * (n + 2.0) * d1) * d1)
}

fn c1_h(n: f64, l: &[f64], r: &[f64]) -> f64 {
    (c1_ha(n, l) * c1_ha(n + 1.0, r) + c1_ha(n, r) * c1_ha(n + 1.0, l)) / 2.0
        - 36.0 * (n * n - 1.0) * n * n * (l[1] - r[1]).powi(2)
}

fn c1_j0(n: f64, d: &[f64]) -> f64 {
    let (d0, d1) = (d[0], d[1]);
    let n2 = n * n;
    1.0 + (n2 + n + 3.0) * d0 + 6.0 * (n2 * n2 + 2.0 * n2 * n + n2 + 6.0) * d1
        - 3.0 * (n2 - 9.0) * (n2 - 4.0) * (n2 - 1.0) * n * (n + 4.0) * d1 * d1
}

fn c1_j1(n: f64, d: &[f64]) -> f64 {
    let (d0, d1) = (d[0], d[1]);
    1.0 + n
        * (n + 1.0)
        * (d0
            + 3.0 * (n - 1.0) * (n + 2.0) * (2.0 - (n - 2.0) * n * (n + 1.0) * (n + 3.0) * d1) * d1)
}

fn c1_j(n: f64, l: &[f64], r: &[f64]) -> f64 {
    (c1_j0(n, l) * c1_j1(n, r) + c1_j0(n, r) * c1_j1(n, l)) / 2.0
        + 108.0 * (n * n - 1.0) * n * (n + 2.0) * (l[1] - r[1]).powi(2)
}

fn c1_d(n: f64, l: &[f64], r: &[f64]) -> f64 {
    (l[0] - r[0]) * (2.0 - 3.0 * (n * n - 1.0) * n * (n + 2.0) * (l[1] + r[1]))
}

fn c1_d1(n: f64, l: &[f64], r: &[f64]) -> f64 {
    c1_d(n, l, r) * (2.0 - 3.0 * (n - 2.0) * (n * n - 1.0) * n * (l[1] + r[1]))
}

fn c1_d3(n: f64, l: &[f64], r: &[f64]) -> f64 {
    c1_d(n, l, r) * (2.0 - 3.0 * n * (n + 1.0) * (n + 2.0) * (n + 3.0) * (l[1] + r[1]))
}

fn c1_f13(n: f64, l: &[f64], r: &[f64]) -> f64 {
    let (l0, l1, r0, r1) = (l[0], l[1], r[0], r[1]);
    let m1 = n * n - 1.0;
    3.0 * (l1 - r1)
        * n
        * n
        * (16.0 + 4.0 * m1 * (l0 + r0 - 4.0 * m1 * (l1 + r1))
            - 3.0
                * (n * n - 4.0)
                * m1
                * m1
                * (3.0 * l0 * r1
                    + 3.0 * l1 * r0
                    + l0 * l1
                    + r0 * r1
                    + 16.0 * (n * n - 6.0) * l1 * r1))
}

/// The named scalars of the closed forms, evaluated at one `(n, l, r)`.
#[derive(Debug, Clone, PartialEq)]
pub enum SeriesCoefficients {
    C0 {
        f: f64,
        h: f64,
    },
    C1 {
        e: f64,
        f: f64,
        h: f64,
        j: f64,
        d: f64,
        d1: f64,
        d3: f64,
        f13: f64,
    },
}

impl SeriesCoefficients {
    /// `r = None` evaluates the two-sided scalars with `r = 0`.
    pub fn evaluate(n: f64, l: &DiracVector, r: Option<&DiracVector>) -> Result<Self> {
        let zero = DiracVector::zero(l.c);
        let r = r.unwrap_or(&zero);
        same_class(l, r)?;
        let (l, r) = (l.entries(), r.entries());
        Ok(match zero.c {
            Continuity::C0 => SeriesCoefficients::C0 {
                f: c0_f(n, l),
                h: c0_h(n, l, r),
            },
            Continuity::C1 => SeriesCoefficients::C1 {
                e: c1_e(n, l),
                f: c1_f(n, l),
                h: c1_h(n, l, r),
                j: c1_j(n, l, r),
                d: c1_d(n, l, r),
                d1: c1_d1(n, l, r),
                d3: c1_d3(n, l, r),
                f13: c1_f13(n, l, r),
            },
        })
    }
}

/// Coefficients of `Q_n(l, .)` on `C_n, C_{n-1}, ..., C_{n-c-1}` (basis `c + 3/2`).
pub fn q_coefficients(n: f64, l: &DiracVector) -> Vec<f64> {
    let e = l.entries();
    match l.c {
        Continuity::C0 => vec![c0_f(n, e) / (n + 1.0), c0_f(n + 1.0, e) / (n + 1.0)],
        Continuity::C1 => vec![
            6.0 * c1_f(n, e) / ((n + 2.0) * (2.0 * n + 3.0)),
            6.0 * c1_e(n, e) / ((n + 1.0) * (n + 2.0)),
            6.0 * c1_f(n + 1.0, e) / ((n + 1.0) * (2.0 * n + 3.0)),
        ],
    }
}

/// One-sided polynomial `Q_n(l, x)`.
pub fn q_poly(n: usize, l: &DiracVector) -> GegenbauerSeries {
    let coeffs = q_coefficients(n as f64, l);
    let terms: Vec<(i64, f64)> = coeffs
        .iter()
        .enumerate()
        .map(|(i, &a)| (n as i64 - i as i64, a))
        .collect();
    GegenbauerSeries::from_terms(l.c.alpha(), &terms)
}

/// Two-sided polynomial `M_n(l, r, x)`.
pub fn m_poly(n: usize, l: &DiracVector, r: &DiracVector) -> Result<GegenbauerSeries> {
    same_class(l, r)?;
    let c = l.c;
    let (le, re) = (l.entries(), r.entries());
    let nf = n as f64;
    let k = n as i64;
    let terms = match c {
        Continuity::C0 => vec![
            (k, c0_h(nf, le, re) / (2.0 * nf + 1.0)),
            (k - 2, -c0_h(nf + 1.0, le, re) / (2.0 * nf + 1.0)),
            (k - 1, (le[0] - re[0]) / 2.0),
        ],
        Continuity::C1 => {
            let h = |m: f64| c1_h(m, le, re);
            let odd_scale = 0.75 / (2.0 * nf + 1.0);
            vec![
                (k, 3.0 * h(nf) / ((2.0 * nf + 1.0) * (2.0 * nf + 3.0))),
                (
                    k - 2,
                    -6.0 * c1_j(nf, le, re) / ((2.0 * nf - 1.0) * (2.0 * nf + 3.0)),
                ),
                (
                    k - 4,
                    3.0 * h(nf + 1.0) / ((2.0 * nf - 1.0) * (2.0 * nf + 1.0)),
                ),
                (k - 1, odd_scale * (c1_d1(nf, le, re) + c1_f13(nf, le, re))),
                (
                    k - 3,
                    -odd_scale * (c1_d3(nf, le, re) + c1_f13(nf + 1.0, le, re)),
                ),
            ]
        }
    };
    Ok(GegenbauerSeries::from_terms(c.alpha(), &terms))
}

/// `M_n + omega * M_{n-1}`.
pub fn m_poly_omega(
    n: usize,
    l: &DiracVector,
    r: &DiracVector,
    omega: f64,
) -> Result<GegenbauerSeries> {
    let m = m_poly(n, l, r)?;
    if omega == 0.0 || n == 0 {
        return Ok(m);
    }
    Ok(m.add_scaled(&m_poly(n - 1, l, r)?, omega))
}

const ENDPOINT_GUARD: f64 = 1e-10;
const SINGULAR_RELATIVE: f64 = 1e-12;

/// Weights of the one-sided rule at the given roots of `Q_n(l, .)`.
pub fn q_weights(n: usize, l: &DiracVector, roots: &[f64]) -> Result<Vec<f64>> {
    let q = q_poly(n, l);
    let dq = q.derivative(1);
    let q_prev = q_poly(n.saturating_sub(1), l);
    let nf = n as f64;
    let (numerator, power) = match l.c {
        Continuity::C0 => {
            let f = c0_f(nf, l.entries());
            (2.0 * (2.0 * nf + 1.0) * f * f / (nf * (nf + 1.0)), 1)
        }
        Continuity::C1 => {
            let f = c1_f(nf, l.entries());
            (8.0 * (nf + 1.0) * f * f / (nf * (nf + 2.0)), 2)
        }
    };
    let scale = dq.max_coeff() * q_prev.max_coeff();
    roots
        .iter()
        .map(|&x| {
            if (1.0 - x).abs() < ENDPOINT_GUARD {
                return Err(Error::SingularWeight {
                    node: x,
                    detail: "node at +1",
                });
            }
            let core = dq.eval(x) * q_prev.eval(x);
            if core.abs() < SINGULAR_RELATIVE * scale || !core.is_finite() {
                return Err(Error::SingularWeight {
                    node: x,
                    detail: "Q' Q_{n-1} vanishes",
                });
            }
            Ok(numerator / (core * (1.0 - x).powi(power)))
        })
        .collect()
}

/// Weights of the two-sided rule at the given roots of `M_n + omega M_{n-1}`.
pub fn m_weights(
    n: usize,
    l: &DiracVector,
    r: &DiracVector,
    roots: &[f64],
    omega: f64,
) -> Result<Vec<f64>> {
    same_class(l, r)?;
    let nf = n as f64;
    let h = match l.c {
        Continuity::C0 => c0_h(nf, l.entries(), r.entries()),
        Continuity::C1 => c1_h(nf, l.entries(), r.entries()),
    };
    let dm = m_poly_omega(n, l, r, omega)?.derivative(1);
    let m_prev = m_poly(n.saturating_sub(1), l, r)?;
    let scale = dm.max_coeff() * m_prev.max_coeff();
    roots
        .iter()
        .map(|&x| {
            let den = nf * dm.eval(x) * m_prev.eval(x);
            if den.abs() < SINGULAR_RELATIVE * scale || !den.is_finite() {
                return Err(Error::SingularWeight {
                    node: x,
                    detail: "M' M_{n-1} vanishes",
                });
            }
            Ok(2.0 * h * h / den)
        })
        .collect()
}

/// Nodes and weights on `[-1, 1]` together with the root diagnostics.
#[derive(Debug, Clone)]
pub struct LocalRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub roots: RootSet,
}

/// Rule from `Q_n(l, .)`: exact for `g` with `(1-x)^{c+1} | g`, `deg g <= 2n + c`, up to
/// the Dirac defect at `-1`.
pub fn q_rule(n: usize, l: &DiracVector) -> Result<LocalRule> {
    let roots = real_roots(&q_poly(n, l))?;
    let weights = q_weights(n, l, &roots.roots)?;
    Ok(LocalRule {
        nodes: roots.roots.clone(),
        weights,
        roots,
    })
}

/// Rule from `M_n(l, r, .) + omega M_{n-1}(l, r, .)`.
pub fn m_rule(n: usize, l: &DiracVector, r: &DiracVector, omega: f64) -> Result<LocalRule> {
    let roots = real_roots(&m_poly_omega(n, l, r, omega)?)?;
    let weights = m_weights(n, l, r, &roots.roots, omega)?;
    Ok(LocalRule {
        nodes: roots.roots.clone(),
        weights,
        roots,
    })
}

/// Weight of a scalar product: one-sided `(1-x)^{c+1}` with Dirac terms at `-1`, or
/// two-sided `1` with Dirac terms at both ends.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSpec {
    pub left: DiracVector,
    pub right: Option<DiracVector>,
}

impl WeightSpec {
    pub fn one_sided(l: DiracVector) -> Self {
        Self {
            left: l,
            right: None,
        }
    }

    pub fn two_sided(l: DiracVector, r: DiracVector) -> Result<Self> {
        same_class(&l, &r)?;
        Ok(Self {
            left: l,
            right: Some(r),
        })
    }

    pub fn continuity(&self) -> Continuity {
        self.left.c
    }

    pub fn is_one_sided(&self) -> bool {
        self.right.is_none()
    }

    fn base_weight(&self) -> Poly {
        match self.right {
            None => Poly::new(vec![1.0, -1.0]).pow(self.continuity().dim() as u32),
            Some(_) => Poly::constant(1.0),
        }
    }
}

/// `<p, q>` under the distributional weight of `spec`.
pub fn inner_product(spec: &WeightSpec, p: &GegenbauerSeries, q: &GegenbauerSeries) -> f64 {
    let integrand = spec
        .base_weight()
        .mul(&p.to_monomial())
        .mul(&q.to_monomial());
    distributional_integral(spec, &integrand)
}

/// `int_{-1}^{1} f` plus the Dirac actions of `spec` on `f` (which already includes the
/// base weight).
pub fn distributional_integral(spec: &WeightSpec, f: &Poly) -> f64 {
    let degree = f.degree().unwrap_or(0);
    let points = (degree + 4).div_ceil(2);
    let (x, w) = gauss_legendre(points);
    let mut total: f64 = x.iter().zip(&w).map(|(x, w)| w * f.eval(*x)).sum();
    total += dirac_action(&spec.left, f, -1.0);
    if let Some(r) = &spec.right {
        total += dirac_action(r, f, 1.0);
    }
    total
}

/// Action of the Dirac terms of `d` placed at `end` (`-1` or `+1`) on `f`:
/// `sum_i s_i d_i f^{(i)}(end)` with `s_i = (-1)^i` on the left and `1` on the right,
/// including the normalization factors.
pub fn dirac_action(d: &DiracVector, f: &Poly, end: f64) -> f64 {
    let norm = dirac_normalization(d.c);
    d.entries()
        .iter()
        .enumerate()
        .map(|(i, di)| {
            let sign = if end < 0.0 && i % 2 == 1 { -1.0 } else { 1.0 };
            sign * norm[i] * di * f.derivative(i).eval(end)
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn dv(e: &[f64]) -> DiracVector {
        DiracVector::from_slice(e).unwrap()
    }

    fn scale(x: f64, a: f64, b: f64) -> f64 {
        (x * (b - a) + a + b) / 2.0
    }

    #[test]
    fn unsupported_continuity() {
        let err = Continuity::try_from(2).unwrap_err();
        assert!(err.to_string().contains("conjecture-dependent"));
        assert!(DiracVector::from_slice(&[0.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn q1_is_jacobi_1_0() {
        let q = q_poly(1, &dv(&[0.0]));
        for x in [-1.0, -0.3, 0.2, 1.0] {
            assert_relative_eq!(q.eval(x), (3.0 * x + 1.0) / 2.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn q2_table_nodes() {
        let r = real_roots(&q_poly(2, &dv(&[0.0]))).unwrap();
        let s6 = 6f64.sqrt();
        assert_relative_eq!(r.roots[0], (-1.0 - s6) / 5.0, epsilon = 1e-14);
        assert_relative_eq!(r.roots[1], (-1.0 + s6) / 5.0, epsilon = 1e-14);

        let r = real_roots(&q_poly(2, &dv(&[2.0 / 9.0]))).unwrap();
        let s = 174f64.sqrt();
        assert_relative_eq!(
            scale(r.roots[0], 1.0, 2.0),
            34.0 / 25.0 - s / 50.0,
            epsilon = 1e-13
        );
        assert_relative_eq!(
            scale(r.roots[1], 1.0, 2.0),
            34.0 / 25.0 + s / 50.0,
            epsilon = 1e-13
        );
    }

    #[test]
    fn q3_c1_boundary_nodes() {
        let r = real_roots(&q_poly(3, &dv(&[0.0, 0.0]))).unwrap();
        let expected = [0.0729940240, 0.3470037660, 0.7050022098];
        for (x, e) in r.roots.iter().zip(expected) {
            assert!((scale(*x, 0.0, 1.0) - e).abs() < 1e-9);
        }
    }

    #[test]
    fn m_at_zero_is_legendre() {
        let m = m_poly(2, &dv(&[0.0]), &dv(&[0.0])).unwrap();
        // P_2 = (3x^2 - 1)/2, compare up to a constant factor
        let ratio = m.eval(0.3) / ((3.0 * 0.09 - 1.0) / 2.0);
        for x in [-0.8, 0.1, 0.6] {
            assert_relative_eq!(
                m.eval(x),
                ratio * (3.0 * x * x - 1.0) / 2.0,
                epsilon = 1e-13
            );
        }
    }

    #[test]
    fn m3_omega_table_1() {
        let (l, r) = (dv(&[4.0 / 17.0]), dv(&[2.0 / 9.0]));
        let rule = m_rule(3, &l, &r, 7.0 / 5.0).unwrap();
        assert_relative_eq!(rule.nodes[0], -1.0, epsilon = 1e-13);
        assert_relative_eq!(rule.weights[0] / 2.0, 4.0 / 17.0, epsilon = 1e-13);
        let s = 174f64.sqrt();
        assert_relative_eq!(
            scale(rule.nodes[1], 2.0, 3.0),
            66.0 / 25.0 - s / 50.0,
            epsilon = 1e-13
        );
        assert_relative_eq!(
            rule.weights[1] / 2.0,
            76.0 / 153.0 + 7.0 * s / 1972.0,
            epsilon = 1e-13
        );
    }

    #[test]
    fn m4_c1_table_5() {
        let l = dv(&[223758915.0 / 3305007602.0, 147.0 / 650416.0]);
        let r = dv(&[13.0 / 200.0, 1.0 / 4800.0]);
        let rule = m_rule(4, &l, &r, 0.0).unwrap();
        let expected = [3.1038729543, 4.2595711727, 5.7365650016, 6.8904874142];
        for (x, e) in rule.nodes.iter().zip(expected) {
            assert!((scale(*x, 3.0, 7.0) - e).abs() < 1e-9);
        }
    }

    #[test]
    fn omega_examples() {
        let (l, r) = (dv(&[0.0]), dv(&[63.0 / 488.0]));
        assert_eq!(
            m_poly_omega(3, &l, &r, 0.0).unwrap(),
            m_poly(3, &l, &r).unwrap()
        );
        let rule = m_rule(4, &l, &r, 559.0 / 433.0).unwrap();
        assert!((rule.nodes[0] + 1.0).abs() < 1e-12);
        let rule = m_rule(3, &dv(&[79.0 / 684.0]), &dv(&[0.0]), 1.0).unwrap();
        assert!((scale(rule.nodes[0], 7.0, 15.0) - 7.0).abs() < 1e-12);
    }

    #[test]
    fn q_weight_examples() {
        let rule = q_rule(2, &dv(&[0.0])).unwrap();
        let s6 = 6f64.sqrt();
        assert_relative_eq!(
            rule.weights[0] / 2.0,
            4.0 / 9.0 - s6 / 36.0,
            epsilon = 1e-14
        );
        assert_relative_eq!(
            rule.weights[1] / 2.0,
            4.0 / 9.0 + s6 / 36.0,
            epsilon = 1e-14
        );

        let rule = q_rule(2, &dv(&[0.0, 0.0])).unwrap();
        let s10 = 10f64.sqrt();
        assert_relative_eq!(
            rule.weights[0] / 2.0,
            85.0 / 216.0 - 25.0 * s10 / 864.0,
            epsilon = 1e-14
        );
        assert_relative_eq!(
            rule.weights[1] / 2.0,
            85.0 / 216.0 + 25.0 * s10 / 864.0,
            epsilon = 1e-14
        );
    }

    #[test]
    fn m_weight_examples() {
        let l = dv(&[593446.0 / 2544723.0, 23.0 / 8289.0]);
        let rule = m_rule(3, &l, &l, 0.0).unwrap();
        assert_relative_eq!(rule.nodes[1], 0.0, epsilon = 1e-14);
        assert_relative_eq!(
            rule.weights[1] / 2.0,
            18989540.0 / 35605389.0,
            epsilon = 1e-12
        );

        let rule = m_rule(2, &dv(&[0.0]), &dv(&[0.0]), 0.0).unwrap();
        assert_relative_eq!(rule.weights[0], 1.0, epsilon = 1e-14);
        assert_relative_eq!(rule.weights[1], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn singular_weight_at_plus_one() {
        let err = q_weights(2, &dv(&[0.0]), &[1.0]).unwrap_err();
        assert!(matches!(err, Error::SingularWeight { .. }));
    }

    #[test]
    fn helper_scalars_at_zero() {
        let z = DiracVector::zero(Continuity::C1);
        match SeriesCoefficients::evaluate(3.0, &z, None).unwrap() {
            SeriesCoefficients::C1 {
                e,
                f,
                h,
                j,
                d,
                d1,
                d3,
                f13,
            } => {
                assert_eq!((e, f, h, j), (1.0, 1.0, 1.0, 1.0));
                assert_eq!((d, d1, d3, f13), (0.0, 0.0, 0.0, 0.0));
            }
            _ => unreachable!(),
        }
        let z = DiracVector::zero(Continuity::C0);
        assert_eq!(
            SeriesCoefficients::evaluate(4.0, &z, Some(&z)).unwrap(),
            SeriesCoefficients::C0 { f: 1.0, h: 1.0 }
        );
    }

    #[test]
    fn plain_integral_of_one() {
        let z = DiracVector::zero(Continuity::C0);
        let spec = WeightSpec::two_sided(z.clone(), z).unwrap();
        let one = GegenbauerSeries::new(1.5, vec![1.0]);
        assert_relative_eq!(inner_product(&spec, &one, &one), 2.0, epsilon = 1e-15);
    }

    #[test]
    fn orthogonality_small_cases() {
        let l = dv(&[0.17]);
        let spec = WeightSpec::one_sided(l.clone());
        let v = inner_product(&spec, &q_poly(1, &l), &q_poly(2, &l));
        assert!(v.abs() < 1e-12, "{v}");

        let (l, r) = (dv(&[0.11, -0.02]), dv(&[-0.07, 0.013]));
        let spec = WeightSpec::two_sided(l.clone(), r.clone()).unwrap();
        let v = inner_product(
            &spec,
            &m_poly(2, &l, &r).unwrap(),
            &m_poly(3, &l, &r).unwrap(),
        );
        assert!(v.abs() < 1e-12, "{v}");
    }

    #[test]
    fn mixed_continuity_rejected() {
        let a = DiracVector::zero(Continuity::C0);
        let b = DiracVector::zero(Continuity::C1);
        assert!(m_poly(2, &a, &b).is_err());
    }
}
