use std::fmt::Write;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use isotoda::homology::{
    betti_table as betti_row, collar_series, diagnostics, fl3_series, full_space_principal_part,
    most_degenerate,
};
use isotoda::schrodinger::{forbidden_zones, DEFAULT_ZONE_TOL};
use isotoda::spectrum::{
    analyze as analyze_spectrum, bset_contains, manifold_status, DEFAULT_BOUNDARY_TOL,
    DEFAULT_GROUPING_TOL,
};
use isotoda::tiling::{build_complex, dual_poset_stats, verify_crystallization, COMPLEX_CAP};
use isotoda::toda::integrate;
use isotoda::{
    Complex64, IntPoly, PeriodicJacobi, RealPolynomial, SchrodingerOperator, Spectrum, TodaConfig,
    ZoneParity,
};

use crate::config::{Format, RunConfig};
use crate::output::{emit, fmt_f, read_json, to_json, CliError};
use crate::svg;

/// Largest `n` for which `tiling` builds the complex without `--poset`.
const TILING_SUMMARY_MAX: usize = 6;
const MIN_SVG_SAMPLES: usize = 16;
const DET_TOL: f64 = 1e-10;
const TRACE_REL_TOL: f64 = 1e-7;

pub fn seed_from_env() -> Result<u64, CliError> {
    match std::env::var("ISOTODA_SEED") {
        Ok(s) => s.trim().parse().map_err(|_| {
            CliError::validation(format!(
                "ISOTODA_SEED must be an unsigned integer, got {s:?}"
            ))
        }),
        Err(_) => Ok(0),
    }
}

pub fn random_matrix(n: usize, seed: u64) -> Result<PeriodicJacobi, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let b = (0..n)
        .map(|_| {
            Complex64::from_polar(
                rng.gen_range(0.5..1.5),
                rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI),
            )
        })
        .collect();
    Ok(PeriodicJacobi::new(a, b)?)
}

pub fn load_matrix(
    path: Option<PathBuf>,
    random: Option<usize>,
) -> Result<PeriodicJacobi, CliError> {
    match (path, random) {
        (Some(p), _) => read_json(&p),
        (None, Some(n)) => random_matrix(n, seed_from_env()?),
        (None, None) => Err(CliError::validation("need a matrix file or --random N")),
    }
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

pub fn analyze(cfg: &RunConfig, path: &Path) -> Result<(), CliError> {
    cfg.format_among(&[Format::Json])?;
    let s: Spectrum = read_json(path)?;
    let inv = analyze_spectrum(&s, cfg.tol.unwrap_or(DEFAULT_GROUPING_TOL))?;
    let v = json!({
        "m": inv.small_m,
        "M": inv.big_m,
        "n_plus": inv.n_plus,
        "n_minus": inv.n_minus,
        "manifold": manifold_status(&inv),
        "pi1_rank": inv.n - 1 - inv.n_plus - inv.n_minus,
    });
    emit(cfg.out.as_deref(), &to_json(&v)?)
}

fn parse_point(s: &str) -> Result<Complex64, CliError> {
    let bad = || CliError::validation(format!("--z expects re,im, got {s:?}"));
    let (re, im) = s.split_once(',').ok_or_else(bad)?;
    let re: f64 = re.trim().parse().map_err(|_| bad())?;
    let im: f64 = im.trim().parse().map_err(|_| bad())?;
    if !re.is_finite() || !im.is_finite() {
        return Err(bad());
    }
    Ok(Complex64::new(re, im))
}

pub fn bset(cfg: &RunConfig, path: &Path, z: Option<&str>) -> Result<(), CliError> {
    let format = cfg.format_among(&[Format::Json, Format::Svg])?;
    let s: Spectrum = read_json(path)?;
    let inv = analyze_spectrum(&s, DEFAULT_GROUPING_TOL)?;
    let text = match format {
        Format::Svg => {
            let samples = cfg.samples.unwrap_or(256);
            if samples < MIN_SVG_SAMPLES {
                return Err(CliError::validation(format!(
                    "--samples must be at least {MIN_SVG_SAMPLES}"
                )));
            }
            svg::bset(&inv, samples)
        }
        _ => {
            let (c1, c2) = inv.corners();
            let mut v = json!({
                "n": inv.n,
                "m": inv.small_m,
                "M": inv.big_m,
                "n_plus": inv.n_plus,
                "n_minus": inv.n_minus,
                "corners": [pair(c1), pair(c2)],
                "radius_positive_axis": inv.bset_radius(0.0),
                "radius_negative_axis": inv.bset_radius(std::f64::consts::PI),
            });
            if let Some(z) = z {
                let q = bset_contains(
                    &inv,
                    parse_point(z)?,
                    cfg.tol.unwrap_or(DEFAULT_BOUNDARY_TOL),
                );
                v["query"] = json!({
                    "z": pair(q.z),
                    "location": q.location,
                    "fiber_dim": q.fiber_dim,
                });
            }
            to_json(&v)?
        }
    };
    emit(cfg.out.as_deref(), &text)
}

pub fn toda(cfg: &RunConfig, l: &PeriodicJacobi) -> Result<(), CliError> {
    cfg.format_among(&[Format::Csv])?;
    let mut tc = TodaConfig::default();
    tc.dt = cfg.dt.unwrap_or(tc.dt);
    tc.t_end = cfg.t_end.unwrap_or(tc.t_end);
    tc.tol = cfg.tol.unwrap_or(tc.tol);
    let steps = (tc.t_end / tc.dt).ceil().max(1.0) as usize;
    tc.record_every = (steps / cfg.samples.unwrap_or(100)).max(1);
    let traj = integrate(l, &tc)?;

    let n = l.n();
    let mut csv = String::from("t");
    for i in 1..=n {
        let _ = write!(csv, ",a{i}");
    }
    for i in 1..=n {
        let _ = write!(csv, ",re_b{i},im_b{i}");
    }
    csv.push_str(",spectrum_drift,abs_b_drift,phase_drift\n");
    for ((t, s), d) in traj.times.iter().zip(&traj.states).zip(&traj.drift) {
        csv.push_str(&fmt_f(*t));
        for a in s.a() {
            let _ = write!(csv, ",{}", fmt_f(*a));
        }
        for b in s.b() {
            let _ = write!(csv, ",{},{}", fmt_f(b.re), fmt_f(b.im));
        }
        let _ = writeln!(
            csv,
            ",{},{},{}",
            fmt_f(d.spectrum),
            fmt_f(d.abs_b),
            fmt_f(d.phase)
        );
    }
    emit(cfg.out.as_deref(), &csv)?;

    let worst = traj.max_drift();
    eprintln!(
        "drift (tol {}): spectrum {}, |B| {}, phase {}",
        fmt_f(tc.tol),
        fmt_f(worst.spectrum),
        fmt_f(worst.abs_b),
        fmt_f(worst.phase)
    );
    match traj.failed_at {
        None => Ok(()),
        Some(i) => Err(CliError::numeric(format!(
            "drift exceeded tolerance at t = {}",
            fmt_f(traj.times[i])
        ))),
    }
}

pub fn monodromy(cfg: &RunConfig, l: &PeriodicJacobi) -> Result<(), CliError> {
    let format = cfg.format_among(&[Format::Json, Format::Csv])?;
    let samples = cfg.samples.unwrap_or(9).max(2);
    let det_tol = cfg.tol.unwrap_or(DET_TOL);
    let g = l.gauge_normalize(0.0)?;
    let op = SchrodingerOperator::from_gauge(&g)?;
    let p = op.spectral_polynomial()?;
    let f = RealPolynomial::from_roots(&l.eigenvalues()?);
    let big_b = op.product_b();
    let twist = 2.0 * big_b * g.w.re;
    let zones = forbidden_zones(l, DEFAULT_ZONE_TOL)?;
    let (lo, hi) = (zones.roots[0], zones.roots[zones.roots.len() - 1]);

    let mut rows = Vec::with_capacity(samples);
    let (mut det_err, mut trace_err) = (0.0f64, 0.0f64);
    for k in 0..samples {
        let x = lo + (hi - lo) * k as f64 / (samples - 1) as f64;
        let m = op.monodromy(x);
        let bt = big_b * m.trace();
        let expected = f.eval(x) + twist;
        det_err = det_err.max((m.det() - 1.0).abs());
        trace_err = trace_err.max((bt - expected).abs() / expected.abs().max(1.0));
        rows.push((x, m, bt, expected));
    }

    let text = match format {
        Format::Csv => {
            let mut csv = String::from("x,m11,m12,m21,m22,det,trace,b_trace,f_plus_twist\n");
            for (x, m, bt, e) in &rows {
                let [[m11, m12], [m21, m22]] = m.entries;
                let cells = [*x, m11, m12, m21, m22, m.det(), m.trace(), *bt, *e];
                let cells: Vec<String> = cells.iter().map(|v| fmt_f(*v)).collect();
                let _ = writeln!(csv, "{}", cells.join(","));
            }
            csv
        }
        _ => {
            let samples: Vec<Value> = rows
                .iter()
                .map(|(x, m, bt, e)| {
                    json!({"x": x, "entries": m.entries, "det": m.det(), "trace": m.trace(), "b_trace": bt, "f_plus_twist": e})
                })
                .collect();
            to_json(&json!({
                "n": l.n(),
                "B": big_b,
                "w": pair(g.w),
                "spectral_polynomial": p.coeffs(),
                "band": [lo, hi],
                "samples": samples,
                "max_det_error": det_err,
                "max_trace_error": trace_err,
            }))?
        }
    };
    emit(cfg.out.as_deref(), &text)?;
    if det_err > det_tol || trace_err > TRACE_REL_TOL {
        return Err(CliError::numeric(format!(
            "monodromy monitors failed: |det M - 1| = {}, relative trace error = {}",
            fmt_f(det_err),
            fmt_f(trace_err)
        )));
    }
    Ok(())
}

pub fn zones(cfg: &RunConfig, l: &PeriodicJacobi) -> Result<(), CliError> {
    let format = cfg.format_among(&[Format::Json, Format::Svg])?;
    let z = forbidden_zones(l, cfg.tol.unwrap_or(DEFAULT_ZONE_TOL))?;
    let text = match format {
        Format::Svg => svg::zones(&z),
        _ => {
            let list: Vec<Value> = z
                .zones
                .iter()
                .zip(z.collapsed.iter().zip(&z.parity))
                .enumerate()
                .map(|(k, ((a, b), (c, p)))| {
                    json!({"k": k + 1, "lo": a, "hi": b, "width": b - a, "parity": p, "collapsed": c})
                })
                .collect();
            to_json(&json!({
                "n": l.n(),
                "B": l.product_b().norm(),
                "roots": z.roots,
                "zones": list,
                "open": z.open_count(),
                "collapsed_upper": z.collapsed_count(ZoneParity::Upper),
                "collapsed_lower": z.collapsed_count(ZoneParity::Lower),
            }))?
        }
    };
    emit(cfg.out.as_deref(), &text)
}

pub fn tiling(cfg: &RunConfig, n: usize, poset: bool) -> Result<(), CliError> {
    cfg.format_among(&[Format::Json])?;
    let stats = dual_poset_stats(n)?;
    let mut v = json!({
        "n": n,
        "f": stats.f,
        "h": stats.h,
        "h_prime": stats.h_prime,
        "h_pp": stats.h_pp,
        "betti_tilde": stats.betti_tilde,
        "complex": null,
    });
    if poset || n <= TILING_SUMMARY_MAX {
        if n > COMPLEX_CAP {
            return Err(CliError::validation(format!(
                "the face poset is built only for n <= {COMPLEX_CAP}"
            )));
        }
        let c = build_complex(n, COMPLEX_CAP)?;
        let report = verify_crystallization(&c);
        let (vertices, edges) = c.one_skeleton();
        v["complex"] = json!({
            "f_vector": c.f_vector(),
            "euler": c.euler_characteristic(),
            "top_cells": report.dual_vertices,
            "one_skeleton": {"vertices": vertices, "edges": edges.len()},
            "crystallization": report.is_ok(),
            "violations": report.violations,
        });
        if poset {
            v["poset"] =
                serde_json::to_value(c.dump()).map_err(|e| CliError::numeric(e.to_string()))?;
        }
    }
    emit(cfg.out.as_deref(), &to_json(&v)?)
}

/// `(case, n, n₊, n₋)` rows of the two tables up to `n_max`.
pub fn table_params(n_max: usize) -> Vec<(&'static str, usize, usize, usize)> {
    let mut rows: Vec<_> = (3..=n_max).map(|n| ("manifold", n, 1, 1)).collect();
    for n in 3..=n_max {
        let (p, m) = most_degenerate(n);
        // at n = 3 the degenerate case coincides with the manifold one
        if (p, m) != (1, 1) {
            rows.push(("degenerate", n, p, m));
        }
    }
    rows
}

pub fn betti_table(cfg: &RunConfig, n_max: usize) -> Result<(), CliError> {
    let format = cfg.format_among(&[Format::Csv, Format::Json])?;
    if !(3..=10).contains(&n_max) {
        return Err(CliError::validation(format!(
            "--n-max must lie in 3..=10, got {n_max}"
        )));
    }
    let mut tables = Vec::new();
    for (case, n, p, m) in table_params(n_max) {
        tables.push((case, betti_row(n, p, m)?));
    }
    let text = match format {
        Format::Json => {
            let mut out = json!({"manifold": [], "degenerate": []});
            for (case, t) in &tables {
                let d = diagnostics(t.n, t.n_plus, t.n_minus)?;
                let row = json!({
                    "n": t.n,
                    "n_plus": t.n_plus,
                    "n_minus": t.n_minus,
                    "betti": t.betti,
                    "euler": t.euler(),
                    "pi1_rank": d.pi1_rank,
                });
                out[*case].as_array_mut().expect("array").push(row);
            }
            to_json(&out)?
        }
        _ => {
            let width = 2 * n_max + 1;
            let mut csv = String::from("case,n,n_plus,n_minus");
            for i in 0..width {
                let _ = write!(csv, ",b{i}");
            }
            csv.push('\n');
            for (case, t) in &tables {
                let _ = write!(csv, "{case},{},{},{}", t.n, t.n_plus, t.n_minus);
                for i in 0..width {
                    match t.betti.get(i) {
                        Some(b) => {
                            let _ = write!(csv, ",{b}");
                        }
                        None => csv.push(','),
                    }
                }
                csv.push('\n');
            }
            csv
        }
    };
    emit(cfg.out.as_deref(), &text)
}

pub fn hilbert(cfg: &RunConfig, n: usize) -> Result<(), CliError> {
    cfg.format_among(&[Format::Json])?;
    let terms = cfg.terms.unwrap_or(20);
    let series = collar_series(n)?;
    let principal = full_space_principal_part(n)?;
    let mut v = json!({
        "n": n,
        "terms": terms,
        "numerator": series.numerator.coeffs(),
        "denominator_exponent": series.denom_exp,
        "polynomial": series.polynomial.coeffs(),
        "collar": series.expand(terms)?,
        "principal_part": principal.expand(terms)?,
        "tail_check": series.multiply_back_matches(terms)?,
    });
    if n == 3 {
        // full-space series of Fl_3: principal part plus 2t²
        let full = principal.expand(terms)?;
        let mut full = IntPoly::new(full)
            .add(&IntPoly::monomial(2, 2))?
            .padded(terms);
        full.truncate(terms);
        let fl3 = fl3_series().expand(terms)?;
        v["full_space"] = json!(full);
        v["fl3"] = json!(fl3);
        v["fl3_identity"] = json!(full == fl3);
    }
    emit(cfg.out.as_deref(), &to_json(&v)?)
}
