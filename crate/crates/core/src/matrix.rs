//! Periodic Jacobi matrices, the torus action on them and their spectra.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectrum::Spectrum;

/// Eigenvalues closer than this fraction of the spectral diameter are
/// treated as coincident.
pub const SIMPLICITY_REL_TOL: f64 = 1e-8;

/// Default cap on `n` for the `n!` enumeration of fixed points.
pub const FIXED_POINT_CAP: usize = 8;

const JACOBI_MAX_SWEEPS: usize = 100;

/// Hermitian periodic tridiagonal matrix `L(a, b)`.
///
/// `b[i]` sits at `(i, i+1)` for `i < n-1` and `b[n-1]` at the corner
/// `(n-1, 0)`; the opposite entries hold the conjugates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixJson", into = "MatrixJson")]
pub struct PeriodicJacobi {
    a: Vec<f64>,
    b: Vec<Complex64>,
}

/// Wire form: `{"a": [..], "b": [[re, im], ..]}`.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixJson {
    a: Vec<f64>,
    b: Vec<[f64; 2]>,
}

impl TryFrom<MatrixJson> for PeriodicJacobi {
    type Error = Error;

    fn try_from(m: MatrixJson) -> Result<Self> {
        let b = m.b.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
        PeriodicJacobi::new(m.a, b)
    }
}

impl From<PeriodicJacobi> for MatrixJson {
    fn from(l: PeriodicJacobi) -> Self {
        MatrixJson {
            b: l.b.iter().map(|z| [z.re, z.im]).collect(),
            a: l.a,
        }
    }
}

impl PeriodicJacobi {
    pub fn new(a: Vec<f64>, b: Vec<Complex64>) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::SizeMismatch(a.len(), b.len()));
        }
        if a.len() < 3 {
            return Err(Error::invalid(format!(
                "periodic matrices need n >= 3, got {}",
                a.len()
            )));
        }
        if a.iter().any(|x| !x.is_finite()) || b.iter().any(|z| !z.is_finite()) {
            return Err(Error::invalid("matrix entries must be finite"));
        }
        Ok(PeriodicJacobi { a, b })
    }

    /// Real matrix with positive off-diagonal entries `b` and corner twist `w`:
    /// entry `(n-1, 0)` is `w b[n-1]`, entry `(0, n-1)` its conjugate.
    pub fn twisted(a: Vec<f64>, b: &[f64], w: Complex64) -> Result<Self> {
        let n = b.len();
        let mut bc: Vec<Complex64> = b.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        if n > 0 {
            bc[n - 1] *= w;
        }
        Self::new(a, bc)
    }

    pub fn diagonal(a: Vec<f64>) -> Result<Self> {
        let n = a.len();
        Self::new(a, vec![Complex64::new(0.0, 0.0); n])
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn b(&self) -> &[Complex64] {
        &self.b
    }

    /// Dense row-major `n x n` Hermitian matrix.
    pub fn assemble(&self) -> Vec<Complex64> {
        let n = self.n();
        let mut m = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            m[i * n + i] = Complex64::new(self.a[i], 0.0);
        }
        for i in 0..n - 1 {
            m[i * n + i + 1] = self.b[i];
            m[(i + 1) * n + i] = self.b[i].conj();
        }
        m[(n - 1) * n] = self.b[n - 1];
        m[n - 1] = self.b[n - 1].conj();
        m
    }

    /// `B = ∏ b_i`.
    pub fn product_b(&self) -> Complex64 {
        self.b.iter().product()
    }

    /// `b_i ↦ t_i t_{i+1}^{-1} b_i`, indices cyclic.
    pub fn act(&self, t: &TorusElement) -> Result<Self> {
        let n = self.n();
        if t.len() != n {
            return Err(Error::SizeMismatch(t.len(), n));
        }
        let b = (0..n)
            .map(|i| t.t[i] * t.t[(i + 1) % n].conj() * self.b[i])
            .collect();
        Ok(PeriodicJacobi {
            a: self.a.clone(),
            b,
        })
    }

    /// Rotates `b_1 .. b_{n-1}` to positive reals; the corner keeps the phase
    /// `w = B / |B|`.
    pub fn gauge_normalize(&self, tol: f64) -> Result<GaugeForm> {
        let n = self.n();
        for (index, z) in self.b.iter().enumerate() {
            if z.norm() <= tol {
                return Err(Error::DegenerateLocus {
                    index,
                    modulus: z.norm(),
                });
            }
        }
        let mut t = Vec::with_capacity(n);
        t.push(Complex64::new(1.0, 0.0));
        for i in 0..n - 1 {
            let phase = self.b[i] / self.b[i].norm();
            t.push(t[i] * phase);
        }
        let gauge = TorusElement { t };
        let w = {
            let big_b = self.product_b();
            big_b / big_b.norm()
        };
        let base = PeriodicJacobi {
            a: self.a.clone(),
            b: self
                .b
                .iter()
                .map(|z| Complex64::new(z.norm(), 0.0))
                .collect(),
        };
        Ok(GaugeForm { base, w, gauge })
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let mut m = self.assemble();
        hermitian_eigenvalues(&mut m, self.n())
    }

    /// The spectrum as a [`Spectrum`]; fails if two eigenvalues coincide
    /// within [`SIMPLICITY_REL_TOL`] of the spectral diameter.
    pub fn spectrum(&self) -> Result<Spectrum> {
        let eig = self.eigenvalues()?;
        if !is_simple(&eig) {
            return Err(Error::invalid(format!("spectrum is not simple: {eig:?}")));
        }
        Spectrum::new(eig)
    }
}

/// `true` iff consecutive sorted eigenvalues are separated by more than
/// [`SIMPLICITY_REL_TOL`] times the spectral diameter.
pub fn is_simple(sorted: &[f64]) -> bool {
    let diameter = sorted.last().unwrap_or(&0.0) - sorted.first().unwrap_or(&0.0);
    diameter > 0.0
        && sorted
            .windows(2)
            .all(|w| w[1] - w[0] > SIMPLICITY_REL_TOL * diameter)
}

/// Element of the compact torus `T^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TorusElement {
    t: Vec<Complex64>,
}

impl TorusElement {
    pub fn new(t: Vec<Complex64>) -> Result<Self> {
        if t.iter().any(|z| (z.norm() - 1.0).abs() > 1e-12) {
            return Err(Error::invalid("torus coordinates must have unit modulus"));
        }
        Ok(TorusElement { t })
    }

    pub fn from_angles(angles: &[f64]) -> Self {
        TorusElement {
            t: angles
                .iter()
                .map(|&th| Complex64::from_polar(1.0, th))
                .collect(),
        }
    }

    pub fn identity(n: usize) -> Self {
        TorusElement {
            t: vec![Complex64::new(1.0, 0.0); n],
        }
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.t
    }

    pub fn mul(&self, other: &Self) -> Self {
        TorusElement {
            t: self.t.iter().zip(&other.t).map(|(x, y)| x * y).collect(),
        }
    }

    pub fn inverse(&self) -> Self {
        TorusElement {
            t: self.t.iter().map(|z| z.conj()).collect(),
        }
    }
}

/// `L` written as a gauge transform of the twisted real matrix `L(w)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaugeForm {
    /// All off-diagonal entries real and positive.
    pub base: PeriodicJacobi,
    /// Unit corner twist, `B / |B|` of the original matrix.
    pub w: Complex64,
    /// `act(gauge, original) == twisted()`.
    pub gauge: TorusElement,
}

impl GaugeForm {
    /// Real moduli `|b_i|`.
    pub fn moduli(&self) -> Vec<f64> {
        self.base.b.iter().map(|z| z.re).collect()
    }

    /// `|B|`, the product of the moduli.
    pub fn abs_b(&self) -> f64 {
        self.base.b.iter().map(|z| z.re).product()
    }

    /// `L(w)`: the base with its corner multiplied by `w`.
    pub fn twisted(&self) -> PeriodicJacobi {
        self.with_twist(self.w)
    }

    /// The base matrix carrying an arbitrary unit twist at the corner.
    pub fn with_twist(&self, w: Complex64) -> PeriodicJacobi {
        let mut l = self.base.clone();
        let n = l.n();
        l.b[n - 1] *= w;
        l
    }

    /// The original matrix.
    pub fn reconstruct(&self) -> PeriodicJacobi {
        self.twisted()
            .act(&self.gauge.inverse())
            .expect("gauge has matching size")
    }
}

/// All `n!` diagonal matrices `diag(λ_σ(1), ..., λ_σ(n))`, permutations in
/// lexicographic order.
pub fn fixed_points(s: &Spectrum, cap: usize) -> Result<Vec<PeriodicJacobi>> {
    let n = s.n();
    if n > cap {
        return Err(Error::CapExceeded { n, cap });
    }
    let lambda = s.values();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut out = Vec::new();
    loop {
        out.push(PeriodicJacobi::diagonal(
            perm.iter().map(|&i| lambda[i]).collect(),
        )?);
        if !next_permutation(&mut perm) {
            break;
        }
    }
    Ok(out)
}

pub(crate) fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len())
        .rev()
        .find(|&j| p[j] > p[i - 1])
        .expect("pivot has a successor");
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Eigenvalues of a dense row-major Hermitian matrix by cyclic Jacobi
/// rotations. The input is overwritten.
pub fn hermitian_eigenvalues(m: &mut [Complex64], n: usize) -> Result<Vec<f64>> {
    assert_eq!(m.len(), n * n);
    let frob: f64 = m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if frob == 0.0 {
        return Ok(vec![0.0; n]);
    }
    let target = (4.0 * f64::EPSILON * frob).powi(2);
    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| m[i * n + j].norm_sqr())
            .sum();
        if off <= target {
            let mut eig: Vec<f64> = (0..n).map(|i| m[i * n + i].re).collect();
            eig.sort_by(|a, b| a.total_cmp(b));
            return Ok(eig);
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(m, n, p, q);
            }
        }
    }
    Err(Error::NoConvergence(format!(
        "Jacobi eigensolver after {JACOBI_MAX_SWEEPS} sweeps"
    )))
}

/// One complex Jacobi rotation annihilating entry `(p, q)`: the phase of
/// `m[p][q]` is moved onto row/column `q`, then a real rotation follows.
fn rotate(m: &mut [Complex64], n: usize, p: usize, q: usize) {
    let apq = m[p * n + q];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let phase = apq / r;
    let unphase = phase.conj();
    let app = m[p * n + p].re;
    let aqq = m[q * n + q].re;
    let theta = (aqq - app) / (2.0 * r);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let x = m[k * n + p];
        let y = m[k * n + q] * unphase;
        let xp = x * c - y * s;
        let yq = x * s + y * c;
        m[k * n + p] = xp;
        m[p * n + k] = xp.conj();
        // restore the phase on column q so the matrix stays similar to the input
        m[k * n + q] = yq * phase;
        m[q * n + k] = (yq * phase).conj();
    }
    m[p * n + p] = Complex64::new(app - t * r, 0.0);
    m[q * n + q] = Complex64::new(aqq + t * r, 0.0);
    m[p * n + q] = Complex64::new(0.0, 0.0);
    m[q * n + p] = Complex64::new(0.0, 0.0);
}
