//! Simple spectra and the invariants `m`, `M`, `n₊`, `n₋` read off the
//! characteristic polynomial, together with the image set of `B`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{critical_profile, RealPolynomial};

/// Default relative tolerance for grouping equal critical values.
pub const DEFAULT_GROUPING_TOL: f64 = 1e-9;

/// Default relative tolerance for boundary membership in the image set.
pub const DEFAULT_BOUNDARY_TOL: f64 = 1e-8;

const CORNER_FLOOR: f64 = 1e-12;

/// Strictly increasing list of `n ≥ 3` eigenvalues.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpectrumJson", into = "SpectrumJson")]
pub struct Spectrum {
    lambda: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpectrumJson {
    lambda: Vec<f64>,
}

impl TryFrom<SpectrumJson> for Spectrum {
    type Error = Error;

    fn try_from(s: SpectrumJson) -> Result<Self> {
        Spectrum::new(s.lambda)
    }
}

impl From<Spectrum> for SpectrumJson {
    fn from(s: Spectrum) -> Self {
        SpectrumJson { lambda: s.lambda }
    }
}

impl Spectrum {
    pub fn new(lambda: Vec<f64>) -> Result<Self> {
        if lambda.len() < 3 {
            return Err(Error::invalid(format!(
                "spectrum needs n >= 3 values, got {}",
                lambda.len()
            )));
        }
        if lambda.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("spectrum values must be finite"));
        }
        if lambda.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("spectrum must be strictly increasing"));
        }
        Ok(Spectrum { lambda })
    }

    /// Roots of the Chebyshev polynomial `T_n`, `cos((2k-1)π/(2n))`, ascending.
    pub fn chebyshev(n: usize) -> Result<Self> {
        let mut lambda: Vec<f64> = (1..=n)
            .map(|k| ((2 * k - 1) as f64 * std::f64::consts::PI / (2 * n) as f64).cos())
            .collect();
        lambda.reverse();
        Self::new(lambda)
    }

    pub fn n(&self) -> usize {
        self.lambda.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.lambda
    }

    /// `F(x) = ∏ (x - λ_i)`.
    pub fn char_poly(&self) -> RealPolynomial {
        RealPolynomial::from_roots(&self.lambda)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumInvariants {
    pub n: usize,
    /// Smallest local-maximum value of `F`.
    #[serde(rename = "M")]
    pub big_m: f64,
    /// Smallest absolute local-minimum value of `F`.
    #[serde(rename = "m")]
    pub small_m: f64,
    /// Local maxima attaining `M` within `grouping_tol`.
    pub n_plus: usize,
    /// Local minima attaining `-m` within `grouping_tol`.
    pub n_minus: usize,
    /// Number of local maxima of `F`.
    pub maxima: usize,
    /// Number of local minima of `F`.
    pub minima: usize,
    pub grouping_tol: f64,
}

/// Computes `M`, `m`, `n₊`, `n₋` from the critical values of `F`.
pub fn analyze(s: &Spectrum, grouping_tol: f64) -> Result<SpectrumInvariants> {
    if !(grouping_tol > 0.0) {
        return Err(Error::invalid("grouping_tol must be positive"));
    }
    let profile = critical_profile(&s.char_poly())?;
    let maxima: Vec<f64> = profile.max_values().collect();
    let minima: Vec<f64> = profile.min_values().map(|v| -v).collect();
    let big_m = maxima.iter().copied().fold(f64::INFINITY, f64::min);
    let small_m = minima.iter().copied().fold(f64::INFINITY, f64::min);
    let n_plus = maxima
        .iter()
        .filter(|&&v| v - big_m <= grouping_tol * big_m)
        .count();
    let n_minus = minima
        .iter()
        .filter(|&&v| v - small_m <= grouping_tol * small_m)
        .count();
    Ok(SpectrumInvariants {
        n: s.n(),
        big_m,
        small_m,
        n_plus,
        n_minus,
        maxima: maxima.len(),
        minima: minima.len(),
        grouping_tol,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BSetLocation {
    Interior,
    /// On the arc where the `M` branch of the bound is active.
    BoundaryPlus,
    /// On the arc where the `m` branch is active.
    BoundaryMinus,
    Corner,
    Outside,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BSetQuery {
    pub z: Complex64,
    pub location: BSetLocation,
    pub fiber_dim: Option<usize>,
}

impl SpectrumInvariants {
    /// `M / (2(1 - cos θ))`, the bound coming from the upper critical values.
    pub fn plus_branch(&self, theta: f64) -> f64 {
        0.5 * self.big_m / (1.0 - theta.cos())
    }

    /// `m / (2(1 + cos θ))`, the bound coming from the lower critical values.
    pub fn minus_branch(&self, theta: f64) -> f64 {
        0.5 * self.small_m / (1.0 + theta.cos())
    }

    /// Boundary radius of the image set in direction `θ`.
    pub fn bset_radius(&self, theta: f64) -> f64 {
        self.plus_branch(theta).min(self.minus_branch(theta))
    }

    /// The two corners `z_top`, `z_bot = conj(z_top)` where the branches meet.
    pub fn corners(&self) -> (Complex64, Complex64) {
        let (m, big_m) = (self.small_m, self.big_m);
        // r e^{iθ} with r = (m + M)/4 and cos θ = (m - M)/(m + M)
        let top = Complex64::new((m - big_m) / 4.0, (m * big_m).sqrt() / 2.0);
        (top, top.conj())
    }

    pub fn fiber_dim(&self, location: BSetLocation) -> Option<usize> {
        let n = self.n - 1;
        match location {
            BSetLocation::Interior => Some(n),
            BSetLocation::BoundaryPlus => Some(n - self.n_plus),
            BSetLocation::BoundaryMinus => Some(n - self.n_minus),
            BSetLocation::Corner => Some(n - self.n_plus - self.n_minus),
            BSetLocation::Outside => None,
        }
    }

    pub fn locate(&self, z: Complex64, boundary_tol: f64) -> BSetLocation {
        if z == Complex64::new(0.0, 0.0) {
            return BSetLocation::Interior;
        }
        let theta = z.arg();
        let r = z.norm();
        let radius = self.bset_radius(theta);
        if r > radius * (1.0 + boundary_tol) {
            return BSetLocation::Outside;
        }
        if r < radius * (1.0 - boundary_tol) {
            return BSetLocation::Interior;
        }
        let plus = self.plus_branch(theta);
        let minus = self.minus_branch(theta);
        if (plus - minus).abs() <= boundary_tol.max(CORNER_FLOOR) * radius {
            BSetLocation::Corner
        } else if plus < minus {
            BSetLocation::BoundaryPlus
        } else {
            BSetLocation::BoundaryMinus
        }
    }
}

/// Classifies `z` against the image set of `B` and reports the torus
/// dimension of the fiber over it.
pub fn bset_contains(inv: &SpectrumInvariants, z: Complex64, boundary_tol: f64) -> BSetQuery {
    let location = inv.locate(z, boundary_tol);
    BSetQuery {
        z,
        location,
        fiber_dim: inv.fiber_dim(location),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ManifoldStatus {
    NotHomologyManifold,
    /// No obstruction found; smoothness is known only for generic spectra.
    NoObstructionGenericSmooth,
}

pub fn manifold_status(inv: &SpectrumInvariants) -> ManifoldStatus {
    if inv.n_plus > 1 || inv.n_minus > 1 {
        ManifoldStatus::NotHomologyManifold
    } else {
        ManifoldStatus::NoObstructionGenericSmooth
    }
}

/// `(n₋, n₊, k)`: the orbit space is `Σ(T^{n₋} * T^{n₊}) × T^k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitDescriptor {
    pub n_minus: usize,
    pub n_plus: usize,
    pub k: usize,
}

pub fn orbit_space_descriptor(n: usize, inv: &SpectrumInvariants) -> Result<OrbitDescriptor> {
    if n < 3 {
        return Err(Error::invalid("orbit descriptor needs n >= 3"));
    }
    let k = (n - 1)
        .checked_sub(inv.n_plus + inv.n_minus)
        .ok_or_else(|| Error::invalid("n_plus + n_minus exceeds n - 1"))?;
    Ok(OrbitDescriptor {
        n_minus: inv.n_minus,
        n_plus: inv.n_plus,
        k,
    })
}

/// All local-max values agree and all local-min values agree, relatively
/// within `tol`.
pub fn is_chebyshev_degenerate(s: &Spectrum, tol: f64) -> Result<bool> {
    let inv = analyze(s, tol)?;
    Ok(inv.n_plus == inv.maxima && inv.n_minus == inv.minima)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    // dense-grid oracle for the critical values of F between consecutive roots
    fn grid_extrema(lambda: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let f = |x: f64| lambda.iter().map(|l| x - l).product::<f64>();
        let mut maxima = Vec::new();
        let mut minima = Vec::new();
        for w in lambda.windows(2) {
            let steps = 20_000;
            let vals = (0..=steps).map(|k| f(w[0] + (w[1] - w[0]) * k as f64 / steps as f64));
            let (lo, hi) = vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                (lo.min(v), hi.max(v))
            });
            if f(0.5 * (w[0] + w[1])) > 0.0 {
                maxima.push(hi);
            } else {
                minima.push(-lo);
            }
        }
        (maxima, minima)
    }

    #[test]
    fn spectrum_validation() {
        assert!(Spectrum::new(vec![0.0, 1.0, 2.0]).is_ok());
        assert!(Spectrum::new(vec![0.0, 1.0]).is_err());
        let err = Spectrum::new(vec![0.0, 2.0, 1.0]).unwrap_err();
        assert!(err
            .to_string()
            .contains("spectrum must be strictly increasing"));
        assert!(Spectrum::new(vec![0.0, 1.0, 1.0]).is_err());
        assert!(serde_json::from_str::<Spectrum>(r#"{"lambda":[0,1,1]}"#).is_err());
        let s: Spectrum = serde_json::from_str(r#"{"lambda":[0,1,2]}"#).unwrap();
        assert_eq!(
            serde_json::to_string(&s).unwrap(),
            r#"{"lambda":[0.0,1.0,2.0]}"#
        );
    }

    #[test]
    fn cubic_invariants() {
        let inv = analyze(
            &Spectrum::new(vec![0.0, 1.0, 2.0]).unwrap(),
            DEFAULT_GROUPING_TOL,
        )
        .unwrap();
        let closed = 2.0 / (3.0 * 3f64.sqrt());
        assert!((inv.big_m - closed).abs() < 1e-12);
        assert!((inv.small_m - closed).abs() < 1e-12);
        assert_eq!((inv.n_plus, inv.n_minus), (1, 1));
        let (maxima, minima) = grid_extrema(&[0.0, 1.0, 2.0]);
        assert!((maxima[0] - inv.big_m).abs() < 1e-8);
        assert!((minima[0] - inv.small_m).abs() < 1e-8);
    }

    #[test]
    fn invariants_match_grid_oracle() {
        let lambda = [-1.3, -0.2, 0.4, 1.9, 2.5, 4.0];
        let inv = analyze(
            &Spectrum::new(lambda.to_vec()).unwrap(),
            DEFAULT_GROUPING_TOL,
        )
        .unwrap();
        let (maxima, minima) = grid_extrema(&lambda);
        let big_m = maxima.iter().copied().fold(f64::INFINITY, f64::min);
        let small_m = minima.iter().copied().fold(f64::INFINITY, f64::min);
        assert!((inv.big_m - big_m).abs() < 1e-6 * big_m);
        assert!((inv.small_m - small_m).abs() < 1e-6 * small_m);
        assert_eq!((inv.maxima, inv.minima), (maxima.len(), minima.len()));
    }

    #[test]
    fn chebyshev_is_most_degenerate() {
        for n in 3..=10 {
            let s = Spectrum::chebyshev(n).unwrap();
            let inv = analyze(&s, DEFAULT_GROUPING_TOL).unwrap();
            assert_eq!(inv.n_plus + inv.n_minus, n - 1, "n={n}");
            assert_eq!(inv.n_plus, (n - 1) / 2);
            assert_eq!(inv.n_minus, n / 2);
            assert!(is_chebyshev_degenerate(&s, DEFAULT_GROUPING_TOL).unwrap());
            // affine image of T_n: critical values ±2^{1-n}
            let expected = 2f64.powi(1 - n as i32);
            assert!((inv.big_m - expected).abs() < 1e-12 && (inv.small_m - expected).abs() < 1e-12);
        }
        let affine: Vec<f64> = Spectrum::chebyshev(5)
            .unwrap()
            .values()
            .iter()
            .map(|x| 3.0 * x - 1.0)
            .collect();
        assert!(
            is_chebyshev_degenerate(&Spectrum::new(affine).unwrap(), DEFAULT_GROUPING_TOL).unwrap()
        );
    }

    #[test]
    fn chebyshev_degenerate_examples() {
        assert!(
            is_chebyshev_degenerate(&Spectrum::new(vec![0.0, 1.0, 2.0]).unwrap(), 1e-9).unwrap()
        );
        assert!(
            !is_chebyshev_degenerate(&Spectrum::new(vec![0.0, 1.0, 2.0, 5.0]).unwrap(), 1e-9)
                .unwrap()
        );
        let (_, minima) = grid_extrema(&[0.0, 1.0, 2.0, 5.0]);
        assert!((minima[0] - minima[1]).abs() > 1e-3);
    }

    #[test]
    fn generic_perturbation_is_nondegenerate() {
        let mut lambda = Spectrum::chebyshev(6).unwrap().values().to_vec();
        for (i, x) in lambda.iter_mut().enumerate() {
            *x += 1e-4 * ((i * i) as f64 * 0.37).sin();
        }
        let inv = analyze(&Spectrum::new(lambda).unwrap(), DEFAULT_GROUPING_TOL).unwrap();
        assert_eq!((inv.n_plus, inv.n_minus), (1, 1));
    }

    #[test]
    fn bset_examples() {
        let inv = analyze(
            &Spectrum::new(vec![0.0, 1.0, 2.0]).unwrap(),
            DEFAULT_GROUPING_TOL,
        )
        .unwrap();
        let q = bset_contains(&inv, Complex64::new(0.0, 0.0), 0.0);
        assert_eq!((q.location, q.fiber_dim), (BSetLocation::Interior, Some(2)));
        let q = bset_contains(&inv, Complex64::new(-inv.big_m / 4.0, 0.0), 1e-8);
        assert_eq!(
            (q.location, q.fiber_dim),
            (BSetLocation::BoundaryPlus, Some(1))
        );
        let q = bset_contains(&inv, Complex64::new(inv.small_m / 4.0, 0.0), 1e-8);
        assert_eq!(
            (q.location, q.fiber_dim),
            (BSetLocation::BoundaryMinus, Some(1))
        );
        let q = bset_contains(&inv, Complex64::new(-inv.big_m, 0.0), 1e-8);
        assert_eq!((q.location, q.fiber_dim), (BSetLocation::Outside, None));
        let (top, bot) = inv.corners();
        for c in [top, bot] {
            let q = bset_contains(&inv, c, 1e-8);
            assert_eq!((q.location, q.fiber_dim), (BSetLocation::Corner, Some(0)));
        }
        // m = M: corners on the imaginary axis at distance M/2
        assert!(top.re.abs() < 1e-15 && (top.im - inv.big_m / 2.0).abs() < 1e-15);
    }

    #[test]
    fn axis_radii() {
        for lambda in [vec![0.0, 1.0, 2.0], vec![-2.0, 0.1, 0.5, 3.0, 3.3]] {
            let inv = analyze(&Spectrum::new(lambda).unwrap(), DEFAULT_GROUPING_TOL).unwrap();
            assert!((2.0 * inv.bset_radius(PI) - inv.big_m / 2.0).abs() < 1e-15);
            assert!((2.0 * inv.bset_radius(0.0) - inv.small_m / 2.0).abs() < 1e-15);
        }
    }

    #[test]
    fn manifold_and_descriptor() {
        let base = analyze(
            &Spectrum::new(vec![0.0, 1.0, 2.0]).unwrap(),
            DEFAULT_GROUPING_TOL,
        )
        .unwrap();
        assert_eq!(
            manifold_status(&base),
            ManifoldStatus::NoObstructionGenericSmooth
        );
        assert_eq!(
            orbit_space_descriptor(3, &base).unwrap(),
            OrbitDescriptor {
                n_minus: 1,
                n_plus: 1,
                k: 0
            }
        );
        let wide = SpectrumInvariants {
            n: 5,
            ..base.clone()
        };
        assert_eq!(
            orbit_space_descriptor(5, &wide).unwrap(),
            OrbitDescriptor {
                n_minus: 1,
                n_plus: 1,
                k: 2
            }
        );
        let obstructed = SpectrumInvariants {
            n: 4,
            n_plus: 2,
            ..base.clone()
        };
        assert_eq!(
            manifold_status(&obstructed),
            ManifoldStatus::NotHomologyManifold
        );
        assert_eq!(
            orbit_space_descriptor(4, &obstructed).unwrap(),
            OrbitDescriptor {
                n_minus: 1,
                n_plus: 2,
                k: 0
            }
        );
        for n in 4..=8 {
            let inv = analyze(&Spectrum::chebyshev(n).unwrap(), DEFAULT_GROUPING_TOL).unwrap();
            assert_eq!(manifold_status(&inv), ManifoldStatus::NotHomologyManifold);
        }
    }

    proptest! {
        #[test]
        fn radial_monotonicity(theta in -PI..PI, frac in 0.0f64..=1.0, c in 0.0f64..=1.0) {
            let inv = analyze(&Spectrum::new(vec![-1.0, 0.3, 2.0, 2.4]).unwrap(), DEFAULT_GROUPING_TOL).unwrap();
            let z = Complex64::from_polar(frac * inv.bset_radius(theta), theta);
            prop_assert_ne!(inv.locate(z, 1e-9), BSetLocation::Outside);
            prop_assert_ne!(inv.locate(z * c, 1e-9), BSetLocation::Outside);
        }

        #[test]
        fn fiber_dim_drop_at_corner(mut gaps in proptest::collection::vec(0.05f64..3.0, 2..9)) {
            gaps.insert(0, -1.0);
            let lambda: Vec<f64> = gaps.iter().scan(0.0, |acc, g| { *acc += g; Some(*acc) }).collect();
            let inv = analyze(&Spectrum::new(lambda).unwrap(), DEFAULT_GROUPING_TOL).unwrap();
            let interior = inv.fiber_dim(BSetLocation::Interior).unwrap();
            let corner = inv.fiber_dim(BSetLocation::Corner).unwrap();
            prop_assert_eq!(interior - corner, inv.n_plus + inv.n_minus);
            prop_assert!(inv.big_m > 0.0 && inv.small_m > 0.0);
        }
    }
}
