//! Transfer matrices of the periodic discrete Schrödinger operator, the
//! spectral polynomial `P(x) = B tr M(x)` and the forbidden zones.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{GaugeForm, PeriodicJacobi};
use crate::poly::RealPolynomial;

/// Default relative width below which a forbidden zone counts as collapsed.
pub const DEFAULT_ZONE_TOL: f64 = 1e-7;

const MONIC_TOL: f64 = 1e-8;

/// `b_{k-1} ψ_{k-1} + a_k ψ_k + b_k ψ_{k+1} = x ψ_k` with real `b_k > 0`,
/// indices mod `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchrodingerOperator {
    a: Vec<f64>,
    b: Vec<f64>,
}

/// `M(x)`: the product `M_n ⋯ M_1` of transfer matrices at `x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Monodromy {
    pub x: f64,
    pub entries: [[f64; 2]; 2],
}

impl Monodromy {
    pub fn det(&self) -> f64 {
        let m = self.entries;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn trace(&self) -> f64 {
        self.entries[0][0] + self.entries[1][1]
    }
}

fn mul2(x: [[f64; 2]; 2], y: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
    [
        [
            x[0][0] * y[0][0] + x[0][1] * y[1][0],
            x[0][0] * y[0][1] + x[0][1] * y[1][1],
        ],
        [
            x[1][0] * y[0][0] + x[1][1] * y[1][0],
            x[1][0] * y[0][1] + x[1][1] * y[1][1],
        ],
    ]
}

impl SchrodingerOperator {
    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::SizeMismatch(a.len(), b.len()));
        }
        if a.len() < 3 {
            return Err(Error::invalid("periodic operators need n >= 3"));
        }
        if let Some(index) = b.iter().position(|&x| !(x > 0.0)) {
            return Err(Error::DegenerateLocus {
                index,
                modulus: b[index].abs(),
            });
        }
        if a.iter().chain(&b).any(|x| !x.is_finite()) {
            return Err(Error::invalid("operator coefficients must be finite"));
        }
        Ok(SchrodingerOperator { a, b })
    }

    /// Operator of the positive base of a gauge form.
    pub fn from_gauge(g: &GaugeForm) -> Result<Self> {
        Self::new(g.base.a().to_vec(), g.moduli())
    }

    /// Operator of `|L|`: the matrix after rotating every `b_i` to `|b_i|`.
    pub fn from_matrix(l: &PeriodicJacobi) -> Result<Self> {
        Self::from_gauge(&l.gauge_normalize(0.0)?)
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    /// `B = ∏ b_i > 0`.
    pub fn product_b(&self) -> f64 {
        self.b.iter().product()
    }

    /// `M_i(x)` for `i` in `1..=n`: `(ψ_{i-1}, ψ_i) ↦ (ψ_i, ψ_{i+1})`.
    pub fn transfer_matrix(&self, i: usize, x: f64) -> [[f64; 2]; 2] {
        let n = self.n();
        assert!((1..=n).contains(&i), "transfer index {i} outside 1..={n}");
        let bi = self.b[i - 1];
        let prev = self.b[(i + n - 2) % n];
        [[0.0, 1.0], [-prev / bi, (x - self.a[i - 1]) / bi]]
    }

    pub fn monodromy(&self, x: f64) -> Monodromy {
        let mut m = [[1.0, 0.0], [0.0, 1.0]];
        for i in 1..=self.n() {
            m = mul2(self.transfer_matrix(i, x), m);
        }
        Monodromy { x, entries: m }
    }

    /// Interval containing every spectrum `L(w)`, `|w| = 1`.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.n();
        (0..n)
            .map(|i| {
                let r = self.b[i] + self.b[(i + n - 1) % n];
                (self.a[i] - r, self.a[i] + r)
            })
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (l, h)| {
                (lo.min(l), hi.max(h))
            })
    }

    /// `P(x) = B tr M(x)`, interpolated at `n + 1` Chebyshev nodes.
    pub fn spectral_polynomial(&self) -> Result<RealPolynomial> {
        let n = self.n();
        let (lo, hi) = self.gershgorin();
        let center = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        let big_b = self.product_b();
        let m = n + 1;
        let nodes: Vec<f64> = (0..m)
            .map(|k| ((2 * k + 1) as f64 * std::f64::consts::PI / (2 * m) as f64).cos())
            .collect();
        let values: Vec<f64> = nodes
            .iter()
            .map(|&t| big_b * self.monodromy(center + half * t).trace())
            .collect();

        // discrete Chebyshev transform on [-1, 1]
        let cheb: Vec<f64> = (0..m)
            .map(|j| {
                let s: f64 = nodes
                    .iter()
                    .zip(&values)
                    .map(|(&t, &y)| y * chebyshev_t(j, t))
                    .sum();
                if j == 0 {
                    s / m as f64
                } else {
                    2.0 * s / m as f64
                }
            })
            .collect();
        let in_t = chebyshev_to_monomial(&cheb);
        // substitute t = (x - center) / half
        let mut p = RealPolynomial::zero();
        let step = RealPolynomial::new(vec![-center / half, 1.0 / half]);
        for &c in in_t.iter().rev() {
            p = p.mul(&step).add_constant(c);
        }
        let lead = p.coeffs().get(n).copied().unwrap_or(0.0);
        if (lead - 1.0).abs() > MONIC_TOL || p.degree() != n {
            return Err(Error::Interpolation(lead));
        }
        Ok(p)
    }
}

fn chebyshev_t(j: usize, t: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, t);
    if j == 0 {
        return 1.0;
    }
    for _ in 1..j {
        (prev, cur) = (cur, 2.0 * t * cur - prev);
    }
    cur
}

fn chebyshev_to_monomial(cheb: &[f64]) -> Vec<f64> {
    let m = cheb.len();
    let mut out = vec![0.0; m];
    let mut prev = vec![1.0];
    let mut cur = vec![0.0, 1.0];
    for (j, &c) in cheb.iter().enumerate() {
        let basis = match j {
            0 => prev.clone(),
            1 => cur.clone(),
            _ => {
                let mut next = vec![0.0; j + 1];
                for (i, &v) in cur.iter().enumerate() {
                    next[i + 1] += 2.0 * v;
                }
                for (i, &v) in prev.iter().enumerate() {
                    next[i] -= v;
                }
                prev = std::mem::replace(&mut cur, next);
                cur.clone()
            }
        };
        for (i, &v) in basis.iter().enumerate() {
            out[i] += c * v;
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ZoneParity {
    /// `P` exceeds `2B` inside the zone.
    Upper,
    /// `P` drops below `-2B` inside the zone.
    Lower,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForbiddenZones {
    /// Merged sorted roots of `P - 2B` and `P + 2B`.
    pub roots: Vec<f64>,
    /// `true` where the merged root is a root of `P - 2B`.
    pub from_minus: Vec<bool>,
    /// `I_k = [x_{2k}, x_{2k+1}]`, `k = 1..n-1`.
    pub zones: Vec<(f64, f64)>,
    pub collapsed: Vec<bool>,
    pub parity: Vec<ZoneParity>,
}

impl ForbiddenZones {
    pub fn collapsed_count(&self, parity: ZoneParity) -> usize {
        self.collapsed
            .iter()
            .zip(&self.parity)
            .filter(|(&c, &p)| c && p == parity)
            .count()
    }

    pub fn open_count(&self) -> usize {
        self.collapsed.iter().filter(|c| !**c).count()
    }
}

/// Zones from the spectra of the real twists `L(1)` and `L(-1)`, whose
/// eigenvalues are the roots of `P - 2B` and `P + 2B`.
pub fn forbidden_zones(l: &PeriodicJacobi, tol: f64) -> Result<ForbiddenZones> {
    let g = l.gauge_normalize(0.0)?;
    let minus = g.with_twist(Complex64::new(1.0, 0.0)).eigenvalues()?;
    let plus = g.with_twist(Complex64::new(-1.0, 0.0)).eigenvalues()?;
    let n = l.n();
    let mut tagged: Vec<(f64, bool)> = minus
        .iter()
        .map(|&x| (x, true))
        .chain(plus.iter().map(|&x| (x, false)))
        .collect();
    tagged.sort_by(|x, y| x.0.total_cmp(&y.0));
    let roots: Vec<f64> = tagged.iter().map(|t| t.0).collect();
    let from_minus = tagged.iter().map(|t| t.1).collect();
    let diameter = roots[2 * n - 1] - roots[0];
    let zones: Vec<(f64, f64)> = (1..n).map(|k| (roots[2 * k - 1], roots[2 * k])).collect();
    let collapsed = zones.iter().map(|(x, y)| y - x <= tol * diameter).collect();
    let parity = (1..n)
        .map(|k| {
            if (n - 1 - k) % 2 == 0 {
                ZoneParity::Lower
            } else {
                ZoneParity::Upper
            }
        })
        .collect();
    Ok(ForbiddenZones {
        roots,
        from_minus,
        zones,
        collapsed,
        parity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::{analyze, Spectrum, DEFAULT_GROUPING_TOL};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_operator(rng: &mut ChaCha8Rng, n: usize) -> SchrodingerOperator {
        let a = (0..n).map(|_| rng.gen_range(-1.5..1.5)).collect();
        let b = (0..n).map(|_| rng.gen_range(0.3..1.5)).collect();
        SchrodingerOperator::new(a, b).unwrap()
    }

    #[test]
    fn transfer_matrix_examples() {
        let op = SchrodingerOperator::new(vec![0.0; 3], vec![1.0; 3]).unwrap();
        assert_eq!(op.transfer_matrix(1, 0.0), [[0.0, 1.0], [-1.0, 0.0]]);
        let m = op.monodromy(0.0);
        // J^3 = -J for J = [[0,1],[-1,0]]
        assert_eq!(m.entries, [[0.0, -1.0], [1.0, 0.0]]);
        assert_eq!(m.det(), 1.0);
    }

    #[test]
    fn transfer_matrix_solves_recurrence() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let op = random_operator(&mut rng, 5);
        let x = 0.37;
        let (mut psi_prev, mut psi) = (0.4, -1.1);
        for i in 1..=5 {
            let m = op.transfer_matrix(i, x);
            let next = m[1][0] * psi_prev + m[1][1] * psi;
            let prev_b = op.b[(i + 3) % 5];
            let residual = prev_b * psi_prev + op.a[i - 1] * psi + op.b[i - 1] * next - x * psi;
            assert!(residual.abs() < 1e-12);
            (psi_prev, psi) = (psi, next);
        }
    }

    #[test]
    fn determinants() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 3..10 {
            let op = random_operator(&mut rng, n);
            let (lo, hi) = op.gershgorin();
            for k in 0..100 {
                let x = lo + (hi - lo) * k as f64 / 99.0;
                for i in 1..=n {
                    let m = op.transfer_matrix(i, x);
                    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
                    assert!((det - op.b[(i + n - 2) % n] / op.b[i - 1]).abs() < 1e-14);
                }
                let m = op.monodromy(x);
                // rounding in the product entries bounds the attainable accuracy
                let scale = m.entries.iter().flatten().map(|v| v * v).sum::<f64>();
                assert!(
                    (m.det() - 1.0).abs() < 1e-10_f64.max(1e-14 * scale),
                    "n={n} x={x}"
                );
            }
        }
    }

    #[test]
    fn degenerate_operator_rejected() {
        assert!(matches!(
            SchrodingerOperator::new(vec![0.0; 3], vec![1.0, 0.0, 1.0]),
            Err(Error::DegenerateLocus { index: 1, .. })
        ));
        let l = PeriodicJacobi::new(vec![0.0; 3], vec![Complex64::new(0.0, 0.0); 3]).unwrap();
        assert!(forbidden_zones(&l, DEFAULT_ZONE_TOL).is_err());
    }

    #[test]
    fn spectral_polynomial_of_free_operator_is_scaled_chebyshev() {
        for n in 3..=10 {
            let op = SchrodingerOperator::new(vec![0.0; n], vec![1.0; n]).unwrap();
            let p = op.spectral_polynomial().unwrap();
            // 2 T_n(x/2) by recurrence
            for x in [-1.9, -0.3, 0.0, 0.8, 1.7] {
                let expected = 2.0 * chebyshev_t(n, x / 2.0);
                assert!((p.eval(x) - expected).abs() < 1e-9, "n={n} x={x}");
            }
        }
    }

    #[test]
    fn spectral_polynomial_matches_char_poly_plus_twist() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for n in 3..=9 {
            let op = random_operator(&mut rng, n);
            let theta = rng.gen_range(-PI..PI);
            let w = Complex64::from_polar(1.0, theta);
            let l = PeriodicJacobi::twisted(op.a.clone(), &op.b, w).unwrap();
            let f = RealPolynomial::from_roots(&l.eigenvalues().unwrap());
            let p = op.spectral_polynomial().unwrap();
            assert!((p.leading() - 1.0).abs() < 1e-8);
            let big_b = op.product_b();
            for k in 0..50 {
                let x = -3.0 + 6.0 * (k as f64 + 0.31) / 50.0;
                let lhs = big_b * op.monodromy(x).trace();
                let rhs = f.eval(x) + 2.0 * big_b * theta.cos();
                assert!((lhs - rhs).abs() <= 1e-7 * rhs.abs().max(1.0), "n={n}");
                assert!(
                    (p.eval(x) - lhs).abs() <= 1e-7 * lhs.abs().max(1.0),
                    "n={n}"
                );
            }
        }
    }

    #[test]
    fn scaling_b_keeps_monic() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let op = random_operator(&mut rng, 5);
        let scaled =
            SchrodingerOperator::new(op.a.clone(), op.b.iter().map(|x| 1.7 * x).collect()).unwrap();
        assert!((scaled.product_b() - 1.7f64.powi(5) * op.product_b()).abs() < 1e-12);
        assert!((scaled.spectral_polynomial().unwrap().leading() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn twist_roots_are_real_twist_spectra() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let op = random_operator(&mut rng, 6);
        let p = op.spectral_polynomial().unwrap();
        let big_b = op.product_b();
        for (sign, w) in [(-1.0, 1.0), (1.0, -1.0)] {
            let eig = PeriodicJacobi::twisted(op.a.clone(), &op.b, Complex64::new(w, 0.0))
                .unwrap()
                .eigenvalues()
                .unwrap();
            for x in eig {
                assert!(p.add_constant(sign * 2.0 * big_b).eval(x).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn generic_zones_open_and_interlaced() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        for n in 3..=8 {
            let op = random_operator(&mut rng, n);
            // shrink b so that 2B is far below both critical values
            let small: Vec<f64> = op.b.iter().map(|x| 0.3 * x).collect();
            let l = PeriodicJacobi::twisted(op.a.clone(), &small, Complex64::from_polar(1.0, 0.4))
                .unwrap();
            let z = forbidden_zones(&l, DEFAULT_ZONE_TOL).unwrap();
            assert_eq!(z.zones.len(), n - 1);
            assert_eq!(z.open_count(), n - 1);
            assert!(z.roots.windows(2).all(|w| w[0] <= w[1]));
            // x_{2n}, x_{2n-3}, x_{2n-4}, x_{2n-7}, ... come from P - 2B
            for (j, &m) in z.from_minus.iter().enumerate() {
                let from_top = 2 * n - 1 - j;
                assert_eq!(m, from_top % 4 == 0 || from_top % 4 == 3, "n={n} j={j}");
            }
            for w in z.zones.windows(2) {
                assert!(w[0].1 < w[1].0);
            }
        }
    }

    #[test]
    fn free_operator_with_quarter_twist_collapses_everything() {
        for n in 3..=8 {
            let mut b = vec![Complex64::new(1.0, 0.0); n];
            b[n - 1] = Complex64::new(0.0, 1.0);
            let l = PeriodicJacobi::new(vec![0.0; n], b).unwrap();
            let z = forbidden_zones(&l, DEFAULT_ZONE_TOL).unwrap();
            assert!(z.collapsed.iter().all(|c| *c), "n={n}");
            let inv = analyze(&l.spectrum().unwrap(), DEFAULT_GROUPING_TOL).unwrap();
            assert_eq!(z.collapsed_count(ZoneParity::Upper), inv.n_plus);
            assert_eq!(z.collapsed_count(ZoneParity::Lower), inv.n_minus);
        }
    }

    #[test]
    fn period_two_closes_every_lower_zone() {
        // a = (α, β, α, β), b = 1: P = D² - 2 with D = (x - α)(x - β) - 2, so
        // P + 2B = D² has two double roots and P - 2B stays simple
        let theta: f64 = 0.9;
        let w = Complex64::from_polar(1.0, theta);
        let l = PeriodicJacobi::twisted(vec![0.4, -0.3, 0.4, -0.3], &[1.0; 4], w).unwrap();
        let z = forbidden_zones(&l, DEFAULT_ZONE_TOL).unwrap();
        assert_eq!(z.collapsed_count(ZoneParity::Lower), 2);
        assert_eq!(z.collapsed_count(ZoneParity::Upper), 0);
        let inv = analyze(&Spectrum::new(l.eigenvalues().unwrap()).unwrap(), 1e-8).unwrap();
        assert_eq!(inv.n_minus, 2);
        assert!((2.0 * (1.0 + theta.cos()) - inv.small_m).abs() < 1e-9);
        assert!(2.0 * (1.0 - theta.cos()) < inv.big_m);
    }
}
