//! Real univariate polynomials in double precision.
//!
//! Root isolation subdivides the line at the critical points (found
//! recursively from the derivative), so every piece is monotone and holds
//! at most one root, which is then bracketed and bisected.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute root tolerance used when callers have no better estimate.
/// Tuned for coefficients of magnitude up to about 1e3.
pub const DEFAULT_ROOT_TOL: f64 = 1e-12;

const MAX_BISECTIONS: usize = 2000;

/// Polynomial with coefficients in ascending degree. Trailing zeros are
/// trimmed, so the leading coefficient is nonzero unless the polynomial is
/// identically zero (empty coefficient list).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealPolynomial {
    coeffs: Vec<f64>,
}

impl RealPolynomial {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        RealPolynomial { coeffs }
    }

    pub fn zero() -> Self {
        RealPolynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    /// Monic polynomial `∏ (x - r)` over the given multiset of roots.
    pub fn from_roots(roots: &[f64]) -> Self {
        let mut coeffs = vec![1.0];
        for &r in roots {
            // multiply by (x - r)
            coeffs.push(0.0);
            for i in (0..coeffs.len()).rev() {
                let lower = if i > 0 { coeffs[i - 1] } else { 0.0 };
                coeffs[i] = lower - r * coeffs[i];
            }
        }
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> f64 {
        self.coeffs.last().copied().unwrap_or(0.0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    /// Sum of `|a_i| |x|^i`, the natural scale of rounding error in `eval`.
    fn eval_magnitude(&self, x: f64) -> f64 {
        let ax = x.abs();
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, &c| acc * ax + c.abs())
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| c * i as f64)
            .collect();
        Self::new(coeffs)
    }

    pub fn add_constant(&self, c: f64) -> Self {
        let mut coeffs = self.coeffs.clone();
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        coeffs[0] += c;
        Self::new(coeffs)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len)
            .map(|i| {
                self.coeffs.get(i).copied().unwrap_or(0.0)
                    - other.coeffs.get(i).copied().unwrap_or(0.0)
            })
            .collect();
        Self::new(coeffs)
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, x) in self.coeffs.iter().enumerate() {
            for (j, y) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += x * y;
            }
        }
        Self::new(coeffs)
    }

    /// Cauchy bound: every root satisfies `|x| <= 1 + max |a_i / a_d|`.
    pub fn root_bound(&self) -> f64 {
        let lead = self.leading().abs();
        let d = self.degree();
        1.0 + self.coeffs[..d]
            .iter()
            .map(|c| c.abs() / lead)
            .fold(0.0, f64::max)
    }

    /// All real roots, ascending, optionally restricted to a closed interval.
    ///
    /// Multiple roots are reported once. A root of even multiplicity is
    /// detected when the polynomial vanishes to rounding level at a critical
    /// point.
    pub fn real_roots(&self, interval: Option<(f64, f64)>, tol: f64) -> Result<Vec<f64>> {
        if self.is_zero() {
            return Err(Error::invalid("real_roots of the zero polynomial"));
        }
        if !(tol > 0.0) {
            return Err(Error::invalid("root tolerance must be positive"));
        }
        if let Some((lo, hi)) = interval {
            if !(lo <= hi) {
                return Err(Error::invalid(format!("empty interval [{lo}, {hi}]")));
            }
        }
        let bound = self.root_bound();
        let mut roots = self.roots_within(bound, tol)?;
        if let Some((lo, hi)) = interval {
            roots.retain(|&r| r >= lo && r <= hi);
        }
        Ok(roots)
    }

    fn roots_within(&self, bound: f64, tol: f64) -> Result<Vec<f64>> {
        if self.degree() == 0 {
            return Ok(Vec::new());
        }
        let critical = self.derivative().roots_within(bound, tol)?;

        let mut knots = Vec::with_capacity(critical.len() + 2);
        knots.push(-bound);
        knots.extend(critical.iter().copied().filter(|c| c.abs() < bound));
        knots.push(bound);

        let values: Vec<f64> = knots
            .iter()
            .map(|&x| {
                let v = self.eval(x);
                if v.abs() <= 64.0 * f64::EPSILON * self.eval_magnitude(x) {
                    0.0
                } else {
                    v
                }
            })
            .collect();

        let mut roots = Vec::new();
        for (i, &v) in values.iter().enumerate() {
            if v == 0.0 {
                roots.push(knots[i]);
            }
        }
        for w in 0..knots.len() - 1 {
            let (fu, fv) = (values[w], values[w + 1]);
            if fu != 0.0 && fv != 0.0 && (fu < 0.0) != (fv < 0.0) {
                roots.push(self.bisect(knots[w], knots[w + 1], fu, tol)?);
            }
        }
        roots.sort_by(|a, b| a.total_cmp(b));
        roots.dedup_by(|a, b| (*a - *b).abs() <= tol);
        Ok(roots)
    }

    fn bisect(&self, mut lo: f64, mut hi: f64, f_lo: f64, tol: f64) -> Result<f64> {
        let lo_negative = f_lo < 0.0;
        for _ in 0..MAX_BISECTIONS {
            let mid = 0.5 * (lo + hi);
            if hi - lo <= tol || mid <= lo || mid >= hi {
                return Ok(mid);
            }
            let fm = self.eval(mid);
            if fm == 0.0 {
                return Ok(mid);
            }
            if (fm < 0.0) == lo_negative {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Err(Error::NoConvergence(format!(
            "bisection on [{lo}, {hi}] did not reach tolerance {tol}"
        )))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CriticalKind {
    Max,
    Min,
}

/// Critical points of a monic polynomial with simple real roots.
///
/// Counting from the top, the largest critical point is a local minimum and
/// the kinds alternate downward.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalProfile {
    pub points: Vec<f64>,
    pub values: Vec<f64>,
    pub kinds: Vec<CriticalKind>,
}

impl CriticalProfile {
    pub fn max_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.iter_kind(CriticalKind::Max)
    }

    pub fn min_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.iter_kind(CriticalKind::Min)
    }

    fn iter_kind(&self, kind: CriticalKind) -> impl Iterator<Item = f64> + '_ {
        self.values
            .iter()
            .zip(&self.kinds)
            .filter(move |(_, &k)| k == kind)
            .map(|(&v, _)| v)
    }
}

/// Critical points, values and extremum kinds of a monic `F` with
/// `deg F` distinct real roots.
pub fn critical_profile(f: &RealPolynomial) -> Result<CriticalProfile> {
    let n = f.degree();
    if n < 2 {
        return Err(Error::invalid("critical profile needs degree at least 2"));
    }
    let points = f.derivative().real_roots(None, DEFAULT_ROOT_TOL)?;
    if points.len() != n - 1 {
        return Err(Error::CriticalPoints {
            expected: n - 1,
            found: points.len(),
        });
    }
    let values: Vec<f64> = points.iter().map(|&x| f.eval(x)).collect();
    let kinds: Vec<CriticalKind> = (0..n - 1)
        .map(|i| {
            if (n - 2 - i) % 2 == 0 {
                CriticalKind::Min
            } else {
                CriticalKind::Max
            }
        })
        .collect();
    for (v, k) in values.iter().zip(&kinds) {
        let ok = match k {
            CriticalKind::Max => *v > 0.0,
            CriticalKind::Min => *v < 0.0,
        };
        if !ok {
            return Err(Error::invalid(
                "polynomial does not have simple real roots only",
            ));
        }
    }
    Ok(CriticalProfile {
        points,
        values,
        kinds,
    })
}
