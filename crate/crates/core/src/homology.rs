//! Exact Hilbert–Poincaré series: the equivariant series of the collar,
//! the Betti numbers of the isospectral space and derived diagnostics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tiling::{binomial, dual_poset_stats, STATS_CAP};

/// Polynomial in `t` with exact integer coefficients, ascending degree,
/// trailing zeros trimmed.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IntPoly {
    coeffs: Vec<i128>,
}

fn overflow() -> Error {
    Error::Overflow("series arithmetic")
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<i128>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn zero() -> Self {
        IntPoly::default()
    }

    pub fn one() -> Self {
        IntPoly::new(vec![1])
    }

    pub fn monomial(c: i128, degree: usize) -> Self {
        let mut coeffs = vec![0; degree + 1];
        coeffs[degree] = c;
        IntPoly::new(coeffs)
    }

    /// `(1 + t)^k`.
    pub fn one_plus_t_pow(k: usize) -> Result<Self> {
        Ok(IntPoly::new(
            (0..=k).map(|i| binomial(k, i)).collect::<Result<_>>()?,
        ))
    }

    pub fn coeffs(&self) -> &[i128] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> i128 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    /// Coefficients padded with zeros to length `len` (never truncated).
    pub fn padded(&self, len: usize) -> Vec<i128> {
        let mut v = self.coeffs.clone();
        if v.len() < len {
            v.resize(len, 0);
        }
        v
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let len = self.coeffs.len().max(other.coeffs.len());
        Ok(IntPoly::new(
            (0..len)
                .map(|i| {
                    self.coeff(i)
                        .checked_add(other.coeff(i))
                        .ok_or_else(overflow)
                })
                .collect::<Result<_>>()?,
        ))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-1)?)
    }

    pub fn scale(&self, c: i128) -> Result<Self> {
        Ok(IntPoly::new(
            self.coeffs
                .iter()
                .map(|x| x.checked_mul(c).ok_or_else(overflow))
                .collect::<Result<_>>()?,
        ))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Ok(IntPoly::zero());
        }
        let mut out = vec![0i128; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, x) in self.coeffs.iter().enumerate() {
            for (j, y) in other.coeffs.iter().enumerate() {
                out[i + j] = x
                    .checked_mul(*y)
                    .and_then(|p| out[i + j].checked_add(p))
                    .ok_or_else(overflow)?;
            }
        }
        Ok(IntPoly::new(out))
    }

    pub fn eval(&self, t: i128) -> Result<i128> {
        self.coeffs
            .iter()
            .rev()
            .try_fold(0i128, |acc, &c| acc.checked_mul(t)?.checked_add(c))
            .ok_or_else(overflow)
    }

    /// Sum of coefficients of odd degree.
    pub fn odd_total(&self) -> i128 {
        self.coeffs.iter().skip(1).step_by(2).sum()
    }

    pub fn is_palindromic(&self, len: usize) -> bool {
        let v = self.padded(len);
        v.len() == len && v.iter().eq(v.iter().rev())
    }
}

/// `numerator / (1 - t²)^denom_exp + polynomial`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalSeries {
    pub numerator: IntPoly,
    pub denom_exp: usize,
    pub polynomial: IntPoly,
}

impl RationalSeries {
    /// Coefficients of `t^0 .. t^{terms-1}`.
    pub fn expand(&self, terms: usize) -> Result<Vec<i128>> {
        let e = self.denom_exp;
        // 1/(1-t²)^e = Σ C(e-1+i, i) t^{2i}
        let inverse: Vec<i128> = (0..terms)
            .map(|d| {
                if d % 2 == 1 {
                    Ok(0)
                } else if e == 0 {
                    Ok(i128::from(d == 0))
                } else {
                    binomial(e - 1 + d / 2, d / 2)
                }
            })
            .collect::<Result<_>>()?;
        let mut out = vec![0i128; terms];
        for (i, &a) in self.numerator.coeffs().iter().enumerate().take(terms) {
            for d in 0..terms - i {
                out[i + d] = a
                    .checked_mul(inverse[d])
                    .and_then(|p| out[i + d].checked_add(p))
                    .ok_or_else(overflow)?;
            }
        }
        for (i, o) in out.iter_mut().enumerate() {
            *o = o
                .checked_add(self.polynomial.coeff(i))
                .ok_or_else(overflow)?;
        }
        Ok(out)
    }

    /// `(1 - t²)^e`.
    pub fn denominator(&self) -> Result<IntPoly> {
        let mut d = IntPoly::one();
        let factor = IntPoly::new(vec![1, 0, -1]);
        for _ in 0..self.denom_exp {
            d = d.mul(&factor)?;
        }
        Ok(d)
    }

    /// Checks that the truncated expansion of the rational part times the
    /// denominator reproduces the numerator up to degree `terms - 1`.
    pub fn multiply_back_matches(&self, terms: usize) -> Result<bool> {
        let rational = RationalSeries {
            polynomial: IntPoly::zero(),
            ..self.clone()
        };
        let series = IntPoly::new(rational.expand(terms)?);
        let product = series.mul(&self.denominator()?)?;
        Ok((0..terms).all(|i| product.coeff(i) == self.numerator.coeff(i)))
    }
}

/// `Σ h_i t^{2i} / (1 - t²)^{n-1} + (1 + t)^n - 1 - t`, the equivariant
/// series of the collar.
pub fn collar_series(n: usize) -> Result<RationalSeries> {
    let h = dual_poset_stats(n)?.h;
    let mut even = vec![0i128; 2 * h.len()];
    for (i, &c) in h.iter().enumerate() {
        even[2 * i] = c;
    }
    let numerator = IntPoly::new(even);
    let polynomial = IntPoly::one_plus_t_pow(n)?.sub(&IntPoly::new(vec![1, 1]))?;
    Ok(RationalSeries {
        numerator,
        denom_exp: n - 1,
        polynomial,
    })
}

pub fn equivariant_series_collar(n: usize, terms: usize) -> Result<Vec<i128>> {
    if terms == 0 {
        return Err(Error::invalid("terms must be at least 1"));
    }
    collar_series(n)?.expand(terms)
}

/// Principal part `Σ h_i t^{2i} / (1 - t²)^{n-1}` of the equivariant series
/// of the whole space, which equals it up to an undetermined polynomial.
pub fn full_space_principal_part(n: usize) -> Result<RationalSeries> {
    Ok(RationalSeries {
        polynomial: IntPoly::zero(),
        ..collar_series(n)?
    })
}

/// Equivariant series of the full flag variety `Fl₃`:
/// `(1 + 2t² + 2t⁴ + t⁶) / (1 - t²)²`.
pub fn fl3_series() -> RationalSeries {
    RationalSeries {
        numerator: IntPoly::new(vec![1, 0, 2, 0, 2, 0, 1]),
        denom_exp: 2,
        polynomial: IntPoly::zero(),
    }
}

fn check_params(n: usize, n_plus: usize, n_minus: usize) -> Result<()> {
    if !(3..=STATS_CAP).contains(&n) {
        return Err(Error::invalid(format!(
            "need 3 <= n <= {STATS_CAP}, got {n}"
        )));
    }
    if n_plus < 1 || n_minus < 1 || n_plus + n_minus > n - 1 {
        return Err(Error::invalid(format!(
            "need n_plus, n_minus >= 1 and n_plus + n_minus <= n - 1, got ({n_plus}, {n_minus}) for n = {n}"
        )));
    }
    Ok(())
}

/// The four summands of the Betti series.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BettiComponents {
    /// `(1 + t)^{2n-1}`.
    pub eq: IntPoly,
    pub ge: IntPoly,
    pub le: IntPoly,
    pub ker: IntPoly,
}

/// `dim H_{p,q}` of the collar for `0 <= p <= n-1`, `0 <= q <= n`.
pub fn collar_bigraded_betti(n: usize) -> Result<Vec<Vec<i128>>> {
    let h = dual_poset_stats(n)?.h;
    let mut table = vec![vec![0i128; n + 1]; n];
    for (p, row) in table.iter_mut().enumerate() {
        for (q, cell) in row.iter_mut().enumerate() {
            *cell = if q < p {
                binomial(n - 1, p)? * binomial(n, q)?
            } else if q == p {
                let mut alt = 0i128;
                for k in 2..=p + 1 {
                    let b = binomial(n - 1, k - 1)?;
                    alt += if (p + k - 1) % 2 == 0 { b } else { -b };
                }
                h[p] + binomial(n, p)? * alt
            } else {
                0
            };
        }
    }
    Ok(table)
}

pub fn betti_components(n: usize, n_plus: usize, n_minus: usize) -> Result<BettiComponents> {
    check_params(n, n_plus, n_minus)?;
    let eq = IntPoly::one_plus_t_pow(2 * n - 1)?;

    let t = IntPoly::monomial(1, 1);
    let bracket = IntPoly::new(vec![1, -1])
        .add(&t.mul(&IntPoly::one_plus_t_pow(n_plus)?)?)?
        .add(&t.mul(&IntPoly::one_plus_t_pow(n_minus)?)?)?;
    let ge = IntPoly::one_plus_t_pow(2 * n - n_plus - n_minus - 2)?.mul(&bracket)?;

    let mut le = IntPoly::zero();
    for (p, row) in collar_bigraded_betti(n)?.iter().enumerate() {
        for (q, &c) in row.iter().enumerate() {
            le = le.add(&IntPoly::monomial(c, p + q))?;
        }
    }

    let free = n - 1 - n_plus - n_minus;
    let mut ker = IntPoly::zero();
    for p in 0..=free {
        for e in 0..=1 {
            for q in 0..=n_plus {
                for s in 0..=n_minus {
                    for r in 0..n {
                        let admissible = r + e > p + q + s
                            && ((e == 0 && q + s > 0) || (e == 1 && q > 0 && s > 0));
                        if !admissible {
                            continue;
                        }
                        let w = binomial(free, p)?
                            * binomial(1, e)?
                            * binomial(n_plus, q)?
                            * binomial(n_minus, s)?
                            * binomial(n - 1, r)?;
                        ker = ker.add(&IntPoly::monomial(w, p + e + q + s + r))?;
                    }
                }
            }
        }
    }
    Ok(BettiComponents { eq, ge, le, ker })
}

/// `(n₊, n₋)` of a Chebyshev spectrum, where every extremum is critical.
pub fn most_degenerate(n: usize) -> (usize, usize) {
    ((n - 1) / 2, n / 2)
}

/// Betti numbers `β_0 .. β_{2n}` of the isospectral space.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BettiTable {
    pub n: usize,
    pub n_plus: usize,
    pub n_minus: usize,
    pub betti: Vec<i128>,
}

impl BettiTable {
    pub fn poly(&self) -> IntPoly {
        IntPoly::new(self.betti.clone())
    }

    /// `Σ (-1)^i β_i`.
    pub fn euler(&self) -> i128 {
        self.betti
            .iter()
            .enumerate()
            .map(|(i, &b)| if i % 2 == 0 { b } else { -b })
            .sum()
    }
}

/// `H^{≥ε} + H^{≤ε} - H^{=ε} + (1 + t) H^{Ker}`.
pub fn betti_table(n: usize, n_plus: usize, n_minus: usize) -> Result<BettiTable> {
    let c = betti_components(n, n_plus, n_minus)?;
    let total =
        c.ge.add(&c.le)?
            .sub(&c.eq)?
            .add(&IntPoly::new(vec![1, 1]).mul(&c.ker)?)?;
    let betti = total.padded(2 * n + 1);
    if betti.len() != 2 * n + 1 || betti.iter().any(|&b| b < 0) {
        return Err(Error::invalid(format!(
            "Betti series out of range for ({n}, {n_plus}, {n_minus}): {betti:?}"
        )));
    }
    Ok(BettiTable {
        n,
        n_plus,
        n_minus,
        betti,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub euler: i128,
    pub pi1_rank: usize,
    pub odd_betti_total: i128,
    pub equivariantly_formal: bool,
    /// Poincaré polynomial of the orbit space `Σ(T^{n₋} * T^{n₊}) × T^k`.
    pub orbit_poincare: Vec<i128>,
}

pub fn diagnostics(n: usize, n_plus: usize, n_minus: usize) -> Result<Diagnostics> {
    let table = betti_table(n, n_plus, n_minus)?;
    let odd_betti_total = table.poly().odd_total();
    let free = n - 1 - n_plus - n_minus;
    let one = IntPoly::one();
    let join = IntPoly::monomial(1, 2)
        .mul(&IntPoly::one_plus_t_pow(n_plus)?.sub(&one)?)?
        .mul(&IntPoly::one_plus_t_pow(n_minus)?.sub(&one)?)?;
    let orbit = one.add(&join)?.mul(&IntPoly::one_plus_t_pow(free)?)?;
    Ok(Diagnostics {
        euler: table.euler(),
        pi1_rank: free,
        odd_betti_total,
        equivariantly_formal: odd_betti_total == 0,
        orbit_poincare: orbit.coeffs().to_vec(),
    })
}
