//! Construction of a global rule on a partition.
//!
//! All subintervals carry `n` nodes except one "middle" subinterval with `n + 1`. Dirac
//! vectors start at zero on both boundary subintervals and are marched inwards with the
//! stretched recursion map; subintervals left of the middle use `Q_n(l, x)`, those right
//! of it use the mirrored `Q_n(r, -x)`, and the middle uses `M_{n+1}(l, r, x)` (plus
//! `omega M_n` for the suboptimal continuity-0 rules).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maps::recursion_stretch;
use crate::semiclassical::{m_poly, m_rule, q_rule, Continuity, DiracVector, LocalRule};

/// Strictly increasing knots `t_0 < ... < t_s`.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    knots: Vec<f64>,
}

impl Partition {
    pub fn new(knots: Vec<f64>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::InvalidPartition("need at least two knots".into()));
        }
        if knots.iter().any(|k| !k.is_finite()) {
            return Err(Error::InvalidPartition("knots must be finite".into()));
        }
        if let Some(w) = knots.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::InvalidPartition(format!(
                "knots must be strictly increasing ({} then {})",
                w[0], w[1]
            )));
        }
        Ok(Self { knots })
    }

    /// `s` equal subintervals of `[a, b]`.
    pub fn uniform(a: f64, b: f64, s: usize) -> Result<Self> {
        let h = (b - a) / s as f64;
        Self::new((0..=s).map(|k| a + h * k as f64).collect())
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn subintervals(&self) -> usize {
        self.knots.len() - 1
    }

    /// Span of subinterval `k` (1-based).
    pub fn span(&self, k: usize) -> (f64, f64) {
        (self.knots[k - 1], self.knots[k])
    }

    /// Length of subinterval `k` (1-based).
    pub fn length(&self, k: usize) -> f64 {
        self.knots[k] - self.knots[k - 1]
    }

    pub fn start(&self) -> f64 {
        self.knots[0]
    }

    pub fn end(&self) -> f64 {
        *self.knots.last().unwrap()
    }

    /// Mirror image under `x -> t_0 + t_s - x`.
    pub fn reflected(&self) -> Self {
        let (a, b) = (self.start(), self.end());
        Self {
            knots: self.knots.iter().rev().map(|t| a + b - t).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SubintervalKind {
    #[serde(rename = "Q")]
    Q,
    #[serde(rename = "Q-reflected")]
    QReflected,
    #[serde(rename = "M")]
    M,
}

impl fmt::Display for SubintervalKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SubintervalKind::Q => "Q",
            SubintervalKind::QReflected => "Q-reflected",
            SubintervalKind::M => "M",
        })
    }
}

/// How the free parameter of the middle polynomial `M_{n+1} + omega M_n` is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OmegaPolicy {
    /// Put a node on the left end of the middle subinterval.
    NodeLeft,
    Zero,
    Value(f64),
}

impl OmegaPolicy {
    pub fn default_for(c: Continuity) -> Self {
        match c {
            Continuity::C0 => OmegaPolicy::NodeLeft,
            Continuity::C1 => OmegaPolicy::Zero,
        }
    }
}

impl fmt::Display for OmegaPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OmegaPolicy::NodeLeft => f.write_str("node-left"),
            OmegaPolicy::Zero => f.write_str("zero"),
            OmegaPolicy::Value(v) => write!(f, "value={v}"),
        }
    }
}

impl FromStr for OmegaPolicy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "node-left" => Ok(OmegaPolicy::NodeLeft),
            "zero" => Ok(OmegaPolicy::Zero),
            _ => match s.strip_prefix("value=") {
                Some(v) => v
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .map(OmegaPolicy::Value)
                    .ok_or_else(|| format!("invalid omega value '{v}'")),
                None => Err(format!(
                    "unknown omega policy '{s}' (expected node-left, zero or value=<x>)"
                )),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubintervalPlan {
    /// 1-based.
    pub index: usize,
    pub span: (f64, f64),
    pub kind: SubintervalKind,
    pub node_count: usize,
    pub dirac_left: Option<DiracVector>,
    pub dirac_right: Option<DiracVector>,
    /// Only set on the middle subinterval.
    pub omega: Option<f64>,
}

/// Nodes per ordinary subinterval for the supported (continuity, degree) pairs.
pub fn base_node_count(c: Continuity, degree: u32) -> Result<usize> {
    let ci = c.index();
    let half_rule = match c {
        Continuity::C0 => degree % 2 == 1,
        Continuity::C1 => degree.is_multiple_of(2),
    };
    if half_rule {
        return Err(Error::HalfRuleUnsupported {
            continuity: ci,
            degree,
        });
    }
    let n = ((degree - ci) / 2) as usize;
    if n < 1 {
        return Err(Error::DegreeTooSmall {
            continuity: ci,
            degree,
        });
    }
    Ok(n)
}

/// `ceil(s / 2)`.
pub fn default_middle(partition: &Partition) -> usize {
    partition.subintervals().div_ceil(2)
}

pub fn plan(
    partition: &Partition,
    c: Continuity,
    degree: u32,
    middle: usize,
    omega_policy: OmegaPolicy,
) -> Result<Vec<SubintervalPlan>> {
    let n = base_node_count(c, degree)?;
    let s = partition.subintervals();
    if middle < 1 || middle > s {
        return Err(Error::MiddleOutOfRange {
            middle,
            subintervals: s,
        });
    }
    let fixed =
        matches!(omega_policy, OmegaPolicy::Zero) || omega_policy == OmegaPolicy::Value(0.0);
    if c == Continuity::C1 && !fixed {
        return Err(Error::OmegaNotFree(omega_policy.to_string()));
    }
    let omega = match omega_policy {
        OmegaPolicy::Zero => Some(0.0),
        OmegaPolicy::Value(v) => Some(v),
        OmegaPolicy::NodeLeft => None,
    };
    Ok((1..=s)
        .map(|k| {
            let kind = match k.cmp(&middle) {
                std::cmp::Ordering::Less => SubintervalKind::Q,
                std::cmp::Ordering::Equal => SubintervalKind::M,
                std::cmp::Ordering::Greater => SubintervalKind::QReflected,
            };
            SubintervalPlan {
                index: k,
                span: partition.span(k),
                kind,
                node_count: if kind == SubintervalKind::M { n + 1 } else { n },
                dirac_left: None,
                dirac_right: None,
                omega: if kind == SubintervalKind::M {
                    omega
                } else {
                    None
                },
            }
        })
        .collect())
}

/// Fills the Dirac vectors: zero at both boundaries, then the stretched recursion map
/// towards the middle.
pub fn march(
    mut plans: Vec<SubintervalPlan>,
    partition: &Partition,
    c: Continuity,
    n: usize,
) -> Result<Vec<SubintervalPlan>> {
    let s = plans.len();
    let middle = plans
        .iter()
        .position(|p| p.kind == SubintervalKind::M)
        .ok_or_else(|| Error::InvalidPartition("plan without a middle subinterval".into()))?
        + 1;
    let nf = n as f64;

    let mut left = DiracVector::zero(c);
    plans[0].dirac_left = Some(left.clone());
    for k in 2..=middle {
        let lambda = partition.length(k) / partition.length(k - 1);
        left = recursion_stretch(nf, &left, lambda).map_err(|e| Error::MarchPole {
            subinterval: k,
            source: Box::new(e),
        })?;
        plans[k - 1].dirac_left = Some(left.clone());
    }

    let mut right = DiracVector::zero(c);
    plans[s - 1].dirac_right = Some(right.clone());
    for k in (middle..s).rev() {
        let lambda = partition.length(k) / partition.length(k + 1);
        right = recursion_stretch(nf, &right, lambda).map_err(|e| Error::MarchPole {
            subinterval: k,
            source: Box::new(e),
        })?;
        plans[k - 1].dirac_right = Some(right.clone());
    }
    Ok(plans)
}

/// `omega` such that `M_{n_mid} + omega M_{n_mid - 1}` vanishes at the local point `x0`.
pub fn omega_for_node_at(n_mid: usize, l: &DiracVector, r: &DiracVector, x0: f64) -> Result<f64> {
    let top = m_poly(n_mid, l, r)?;
    let below = m_poly(n_mid - 1, l, r)?;
    let den = below.eval(x0);
    if den.abs() < 1e-12 * below.max_coeff().max(f64::MIN_POSITIVE) {
        return Err(Error::OmegaSingular { x0, value: den });
    }
    Ok(-top.eval(x0) / den)
}

/// Affine map of a local rule on `[-1, 1]` onto `[a, b]`.
pub fn scale_to_interval(nodes: &[f64], weights: &[f64], a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let half = (b - a) / 2.0;
    (
        nodes
            .iter()
            .map(|x| (x * (b - a) + (a + b)) / 2.0)
            .collect(),
        weights.iter().map(|w| w * half).collect(),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Warning {
    /// The polynomial of a subinterval has fewer real roots than planned nodes.
    ComplexRoots {
        subinterval: usize,
        expected: usize,
        found: usize,
    },
    NodeOutsideSpan {
        subinterval: usize,
        node: f64,
    },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::ComplexRoots {
                subinterval,
                expected,
                found,
            } => write!(
                f,
                "subinterval {subinterval}: {found} real roots, {expected} expected"
            ),
            Warning::NodeOutsideSpan { subinterval, node } => {
                write!(f, "subinterval {subinterval}: node {node} outside its span")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RuleSubinterval {
    pub plan: SubintervalPlan,
    /// Global coordinates, ascending.
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub continuity: Continuity,
    pub degree: u32,
    pub partition: Partition,
    pub middle: usize,
    pub omega_policy: OmegaPolicy,
    pub subintervals: Vec<RuleSubinterval>,
    pub warnings: Vec<Warning>,
}

impl QuadratureRule {
    pub fn nodes(&self) -> impl Iterator<Item = (usize, f64, f64)> + '_ {
        self.subintervals.iter().flat_map(|s| {
            s.nodes
                .iter()
                .zip(&s.weights)
                .map(move |(x, w)| (s.plan.index, *x, *w))
        })
    }

    pub fn node_count(&self) -> usize {
        self.subintervals.iter().map(|s| s.nodes.len()).sum()
    }

    pub fn weight_sum(&self) -> f64 {
        self.subintervals.iter().flat_map(|s| &s.weights).sum()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes().map(|(_, x, w)| w * f(x)).sum()
    }

    /// The `omega` actually used on the middle subinterval.
    pub fn omega(&self) -> f64 {
        self.subintervals[self.middle - 1].plan.omega.unwrap_or(0.0)
    }

    pub fn has_complex_roots(&self) -> bool {
        self.warnings
            .iter()
            .any(|w| matches!(w, Warning::ComplexRoots { .. }))
    }
}

/// Builds the rule for `(partition, c, degree)` with the middle subinterval at `middle`
/// (default `ceil(s/2)`) and the given omega policy (default: node at the left end for
/// continuity 0, zero for continuity 1).
pub fn generate(
    partition: &Partition,
    c: Continuity,
    degree: u32,
    middle: Option<usize>,
    omega_policy: Option<OmegaPolicy>,
) -> Result<QuadratureRule> {
    let middle = middle.unwrap_or_else(|| default_middle(partition));
    let policy = omega_policy.unwrap_or(OmegaPolicy::default_for(c));
    let n = base_node_count(c, degree)?;
    let plans = march(plan(partition, c, degree, middle, policy)?, partition, c, n)?;

    let mut warnings = Vec::new();
    let mut subintervals = Vec::with_capacity(plans.len());
    for mut p in plans {
        let local: LocalRule = match p.kind {
            SubintervalKind::Q => q_rule(n, p.dirac_left.as_ref().expect("marched"))?,
            SubintervalKind::QReflected => {
                let mut rule = q_rule(n, p.dirac_right.as_ref().expect("marched"))?;
                rule.nodes = rule.nodes.iter().rev().map(|x| -x).collect();
                rule.weights.reverse();
                rule
            }
            SubintervalKind::M => {
                let l = p.dirac_left.as_ref().expect("marched");
                let r = p.dirac_right.as_ref().expect("marched");
                let omega = match p.omega {
                    Some(w) => w,
                    None => omega_for_node_at(n + 1, l, r, -1.0)?,
                };
                p.omega = Some(omega);
                m_rule(n + 1, l, r, omega)?
            }
        };
        if local.nodes.len() != p.node_count {
            warnings.push(Warning::ComplexRoots {
                subinterval: p.index,
                expected: p.node_count,
                found: local.nodes.len(),
            });
        }
        let (a, b) = p.span;
        let (nodes, weights) = scale_to_interval(&local.nodes, &local.weights, a, b);
        let slack = 1e-8 * (b - a);
        for &x in &nodes {
            if x < a - slack || x > b + slack {
                warnings.push(Warning::NodeOutsideSpan {
                    subinterval: p.index,
                    node: x,
                });
            }
        }
        subintervals.push(RuleSubinterval {
            plan: p,
            nodes,
            weights,
        });
    }

    Ok(QuadratureRule {
        continuity: c,
        degree,
        partition: partition.clone(),
        middle,
        omega_policy: policy,
        subintervals,
        warnings,
    })
}
