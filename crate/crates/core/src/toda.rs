//! The periodic Toda flow `L' = [L, P(L)]` integrated with classical RK4,
//! monitoring the quantities it conserves.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::PeriodicJacobi;
use crate::spectrum::Spectrum;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TodaConfig {
    pub dt: f64,
    pub t_end: f64,
    /// Drift tolerance for spectrum, `|B|` and phases.
    pub tol: f64,
    /// Store (and check) every `record_every`-th step; the last step is
    /// always stored.
    pub record_every: usize,
}

impl Default for TodaConfig {
    fn default() -> Self {
        TodaConfig {
            dt: 1e-3,
            t_end: 1.0,
            tol: 1e-8,
            record_every: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriftRecord {
    /// Max deviation of the sorted eigenvalues from the initial ones.
    pub spectrum: f64,
    /// `||B(t)| - |B(0)||`.
    pub abs_b: f64,
    /// Max phase change of `b_i` over entries that stay above `tol`.
    pub phase: f64,
}

impl DriftRecord {
    fn max(&self) -> f64 {
        self.spectrum.max(self.abs_b).max(self.phase)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TodaTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<PeriodicJacobi>,
    pub drift: Vec<DriftRecord>,
    /// Index into `times` of the first record exceeding the tolerance.
    pub failed_at: Option<usize>,
}

impl TodaTrajectory {
    pub fn is_ok(&self) -> bool {
        self.failed_at.is_none()
    }

    pub fn last(&self) -> &PeriodicJacobi {
        self.states
            .last()
            .expect("trajectory holds the initial state")
    }

    pub fn max_drift(&self) -> DriftRecord {
        self.drift.iter().fold(
            DriftRecord {
                spectrum: 0.0,
                abs_b: 0.0,
                phase: 0.0,
            },
            |acc, d| DriftRecord {
                spectrum: acc.spectrum.max(d.spectrum),
                abs_b: acc.abs_b.max(d.abs_b),
                phase: acc.phase.max(d.phase),
            },
        )
    }
}

/// Skew-Hermitian `P(L)`, dense row-major.
pub fn lax_pair(l: &PeriodicJacobi) -> Vec<Complex64> {
    let n = l.n();
    let b = l.b();
    let mut p = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n - 1 {
        p[i * n + i + 1] = b[i];
        p[(i + 1) * n + i] = -b[i].conj();
    }
    p[(n - 1) * n] = b[n - 1];
    p[n - 1] = -b[n - 1].conj();
    p
}

fn matmul(x: &[Complex64], y: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for k in 0..n {
            let xik = x[i * n + k];
            if xik == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..n {
                out[i * n + j] += xik * y[k * n + j];
            }
        }
    }
    out
}

/// Dense `[L, P(L)]`.
pub fn commutator(l: &PeriodicJacobi) -> Vec<Complex64> {
    let n = l.n();
    let lm = l.assemble();
    let p = lax_pair(l);
    let lp = matmul(&lm, &p, n);
    let pl = matmul(&p, &lm, n);
    lp.iter().zip(&pl).map(|(x, y)| x - y).collect()
}

/// Time derivative `(a', b')` read off the commutator.
pub fn vector_field(l: &PeriodicJacobi) -> (Vec<f64>, Vec<Complex64>) {
    let n = l.n();
    let c = commutator(l);
    let da = (0..n).map(|i| c[i * n + i].re).collect();
    let mut db: Vec<Complex64> = (0..n - 1).map(|i| c[i * n + i + 1]).collect();
    db.push(c[(n - 1) * n]);
    (da, db)
}

fn shifted(l: &PeriodicJacobi, da: &[f64], db: &[Complex64], h: f64) -> PeriodicJacobi {
    let a = l.a().iter().zip(da).map(|(x, d)| x + h * d).collect();
    let b = l.b().iter().zip(db).map(|(x, d)| x + d * h).collect();
    PeriodicJacobi::new(a, b).expect("RK4 stage keeps size")
}

/// One classical RK4 step.
pub fn rk4_step(l: &PeriodicJacobi, dt: f64) -> Result<PeriodicJacobi> {
    let (a1, b1) = vector_field(l);
    let (a2, b2) = vector_field(&shifted(l, &a1, &b1, dt / 2.0));
    let (a3, b3) = vector_field(&shifted(l, &a2, &b2, dt / 2.0));
    let (a4, b4) = vector_field(&shifted(l, &a3, &b3, dt));
    let n = l.n();
    let a = (0..n)
        .map(|i| l.a()[i] + dt / 6.0 * (a1[i] + 2.0 * a2[i] + 2.0 * a3[i] + a4[i]))
        .collect();
    let b = (0..n)
        .map(|i| l.b()[i] + (b1[i] + b2[i] * 2.0 + b3[i] * 2.0 + b4[i]) * (dt / 6.0))
        .collect();
    PeriodicJacobi::new(a, b)
        .map_err(|_| Error::NoConvergence("Toda state left the finite range".into()))
}

/// Integrates from `t = 0` to `t_end`; the last step is shortened to land
/// exactly on `t_end`.
pub fn integrate(l0: &PeriodicJacobi, cfg: &TodaConfig) -> Result<TodaTrajectory> {
    if !(cfg.t_end > 0.0) || !(cfg.dt > 0.0) || !(cfg.tol > 0.0) || cfg.record_every == 0 {
        return Err(Error::invalid(
            "t_end, dt, tol and record_every must be positive",
        ));
    }
    let eig0 = l0.eigenvalues()?;
    let abs_b0 = l0.product_b().norm();
    let phase_ref: Vec<Option<f64>> = l0
        .b()
        .iter()
        .map(|z| (z.norm() > cfg.tol).then(|| z.arg()))
        .collect();

    let drift_of = |l: &PeriodicJacobi| -> Result<DriftRecord> {
        let eig = l.eigenvalues()?;
        let spectrum = eig
            .iter()
            .zip(&eig0)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        let abs_b = (l.product_b().norm() - abs_b0).abs();
        let phase = l
            .b()
            .iter()
            .zip(&phase_ref)
            .filter_map(|(z, r)| {
                r.filter(|_| z.norm() > cfg.tol)
                    .map(|r| wrap_angle(z.arg() - r).abs())
            })
            .fold(0.0, f64::max);
        Ok(DriftRecord {
            spectrum,
            abs_b,
            phase,
        })
    };

    let steps = (cfg.t_end / cfg.dt).ceil() as usize;
    let mut traj = TodaTrajectory {
        times: vec![0.0],
        states: vec![l0.clone()],
        drift: vec![DriftRecord {
            spectrum: 0.0,
            abs_b: 0.0,
            phase: 0.0,
        }],
        failed_at: None,
    };
    let mut l = l0.clone();
    let mut t = 0.0;
    for step in 1..=steps {
        let h = if step == steps { cfg.t_end - t } else { cfg.dt };
        l = rk4_step(&l, h)?;
        t = if step == steps {
            cfg.t_end
        } else {
            step as f64 * cfg.dt
        };
        if step % cfg.record_every == 0 || step == steps {
            let d = drift_of(&l)?;
            traj.times.push(t);
            traj.states.push(l.clone());
            traj.drift.push(d);
            if d.max() > cfg.tol {
                traj.failed_at = Some(traj.times.len() - 1);
                break;
            }
        }
    }
    Ok(traj)
}

fn wrap_angle(x: f64) -> f64 {
    use std::f64::consts::PI;
    (x + PI).rem_euclid(2.0 * PI) - PI
}

/// For an (approximately) diagonal `L`, the permutation `σ` (1-based) with
/// `a_i = λ_σ(i)`. The reference defaults to the sorted diagonal.
pub fn classify_equilibrium(
    l: &PeriodicJacobi,
    tol: f64,
    reference: Option<&Spectrum>,
) -> Option<Vec<usize>> {
    if l.b().iter().any(|z| z.norm() > tol) {
        return None;
    }
    let lambda: Vec<f64> = match reference {
        Some(s) => s.values().to_vec(),
        None => {
            let mut d = l.a().to_vec();
            d.sort_by(|x, y| x.total_cmp(y));
            d
        }
    };
    if lambda.len() != l.n() {
        return None;
    }
    let mut used = vec![false; lambda.len()];
    let mut sigma = Vec::with_capacity(l.n());
    for &a in l.a() {
        let j = (0..lambda.len()).find(|&j| !used[j] && (a - lambda[j]).abs() <= tol)?;
        used[j] = true;
        sigma.push(j + 1);
    }
    Some(sigma)
}
