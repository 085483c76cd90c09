//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
//! criterion fails. Random inputs are seeded by ISOTODA_SEED (default 1).

use std::collections::VecDeque;
use std::process::Command;
use std::time::{Duration, Instant};

use isotoda::homology::{
    betti_table, diagnostics, equivariant_series_collar, fl3_series, full_space_principal_part,
};
use isotoda::schrodinger::{forbidden_zones, DEFAULT_ZONE_TOL};
use isotoda::spectrum::{analyze, bset_contains};
use isotoda::tiling::{build_complex, dual_poset_stats, factorial, stirling2, COMPLEX_CAP};
use isotoda::toda::integrate;
use isotoda::{
    BSetLocation, Complex64, IntPoly, PeriodicJacobi, RealPolynomial, SchrodingerOperator,
    Spectrum, TodaConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const MANIFOLD_ROWS: [(usize, &[i128]); 4] = [
    (3, &[1, 0, 2, 0, 2, 0, 1]),
    (4, &[1, 1, 6, 2, 16, 2, 6, 1, 1]),
    (5, &[1, 2, 13, 9, 65, 16, 65, 9, 13, 2, 1]),
    (6, &[1, 3, 23, 25, 203, 67, 456, 67, 203, 25, 23, 3, 1]),
];

const DEGENERATE_ROWS: [(usize, &[i128]); 3] = [
    (4, &[1, 0, 3, 1, 16, 3, 9, 2, 1]),
    (5, &[1, 0, 4, 2, 57, 16, 77, 22, 24, 4, 1]),
    (6, &[1, 0, 5, 4, 167, 55, 471, 115, 276, 61, 39, 5, 1]),
];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn seed() -> u64 {
    std::env::var("ISOTODA_SEED")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(1)
}

fn params(n_max: usize) -> impl Iterator<Item = (usize, usize, usize)> {
    (3..=n_max).flat_map(|n| (1..n).flat_map(move |p| (1..n - p).map(move |m| (n, p, m))))
}

fn golden_tables() -> Outcome {
    let out = Command::new(env!("CARGO_BIN_EXE_isotoda"))
        .args(["betti-table", "--n-max", "6"])
        .output()
        .expect("run isotoda");
    if !out.status.success() {
        return outcome(false, format!("exit {:?}", out.status.code()));
    }
    let text = String::from_utf8_lossy(&out.stdout);
    let mut manifold = Vec::new();
    let mut degenerate = Vec::new();
    for line in text.lines().skip(1) {
        let cells: Vec<&str> = line.split(',').collect();
        let n: usize = cells[1].parse().unwrap();
        let betti: Vec<i128> = cells[4..]
            .iter()
            .filter(|c| !c.is_empty())
            .map(|c| c.parse().unwrap())
            .collect();
        match cells[0] {
            "manifold" => manifold.push((n, betti)),
            _ => degenerate.push((n, betti)),
        }
    }
    let same = |got: &[(usize, Vec<i128>)], want: &[(usize, &[i128])]| {
        got.len() == want.len() && got.iter().zip(want).all(|(g, w)| g.0 == w.0 && g.1 == w.1)
    };
    let ok = same(&manifold, &MANIFOLD_ROWS) && same(&degenerate, &DEGENERATE_ROWS);
    outcome(
        ok,
        format!(
            "{} manifold rows, {} degenerate rows",
            manifold.len(),
            degenerate.len()
        ),
    )
}

fn euler_property() -> Outcome {
    let mut count = 0;
    for (n, p, m) in params(10) {
        let t = betti_table(n, p, m).unwrap();
        if t.euler() != factorial(n).unwrap() {
            return outcome(
                false,
                format!("({n}, {p}, {m}): euler {} != {n}!", t.euler()),
            );
        }
        count += 1;
    }
    outcome(true, format!("{count} parameter triples"))
}

fn fl3_identity() -> (Outcome, Outcome) {
    let collar = equivariant_series_collar(3, 20).unwrap();
    let fl3 = fl3_series().expand(20).unwrap();
    let diff: Vec<i128> = collar.iter().zip(&fl3).map(|(a, b)| a - b).collect();
    let literal = outcome(
        collar == fl3,
        format!(
            "collar {:?} vs Fl3 {:?}; difference {:?}",
            &collar[..8],
            &fl3[..8],
            &diff[..8]
        ),
    );
    // the full-space series: principal part plus the correction 2t²
    let principal = full_space_principal_part(3).unwrap().expand(20).unwrap();
    let mut full = IntPoly::new(principal)
        .add(&IntPoly::monomial(2, 2))
        .unwrap()
        .padded(20);
    full.truncate(20);
    let companion = outcome(full == fl3, "principal part + 2t^2 against Fl3, 20 terms");
    (literal, companion)
}

fn h_vectors() -> Outcome {
    let h3 = dual_poset_stats(3).unwrap().h;
    if h3 != [1, 0, 6, -1] {
        return outcome(false, format!("h(3) = {h3:?}"));
    }
    for n in 3..=12 {
        let h = dual_poset_stats(n).unwrap().h;
        if h[0] != 1 || h.iter().sum::<i128>() != factorial(n).unwrap() {
            return outcome(false, format!("n={n}: h = {h:?}"));
        }
    }
    outcome(true, "h(3) = (1,0,6,-1); sum h = n!, h0 = 1 for n = 3..12")
}

fn bipartite_parts(vertices: usize, edges: &[(usize, usize)]) -> Option<(usize, usize)> {
    let mut adj = vec![Vec::new(); vertices];
    for &(u, v) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut color: Vec<Option<bool>> = vec![None; vertices];
    for s in 0..vertices {
        if color[s].is_some() {
            continue;
        }
        color[s] = Some(false);
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                match color[v] {
                    None => {
                        color[v] = Some(!color[u].unwrap());
                        queue.push_back(v);
                    }
                    Some(c) if c == color[u].unwrap() => return None,
                    _ => {}
                }
            }
        }
    }
    let black = color.iter().filter(|c| **c == Some(true)).count();
    Some((vertices - black, black))
}

fn tiling_cross_validation(n7_time: &mut Duration) -> Outcome {
    for n in 3..=7 {
        let start = Instant::now();
        let c = build_complex(n, COMPLEX_CAP).unwrap();
        let f = c.f_vector();
        for (dim, &count) in f.iter().enumerate() {
            let k = n - dim;
            let expected = n as i128 * factorial(k - 1).unwrap() * stirling2(n, k).unwrap();
            if count as i128 != expected {
                return outcome(
                    false,
                    format!("n={n} dim {dim}: {count} faces, formula {expected}"),
                );
            }
        }
        if c.euler_characteristic() != 0 {
            return outcome(false, format!("n={n}: euler {}", c.euler_characteristic()));
        }
        // top cells above each face by upward closure of the covering relation
        let mut cofaces = vec![Vec::new(); c.faces.len()];
        for &(face, coface) in &c.covers {
            cofaces[face].push(coface);
        }
        let mut mask = vec![0u64; c.faces.len()];
        let mut top = 0;
        for i in 0..c.faces.len() {
            if c.faces[i].dim() == n - 1 {
                mask[i] = 1 << top;
                top += 1;
            } else {
                mask[i] = cofaces[i].iter().fold(0, |acc, &j| acc | mask[j]);
            }
        }
        if top != n {
            return outcome(false, format!("n={n}: {top} top cells"));
        }
        for (i, face) in c.faces.iter().enumerate() {
            let codim = n - 1 - face.dim();
            if mask[i].count_ones() as usize != codim + 1 {
                return outcome(
                    false,
                    format!(
                        "n={n}: codim {codim} face in {} top cells",
                        mask[i].count_ones()
                    ),
                );
            }
        }
        if n == 3 {
            let (v, e) = c.one_skeleton();
            if bipartite_parts(v, &e) != Some((3, 3)) {
                return outcome(
                    false,
                    format!("n=3 1-skeleton not bipartite 3+3: {v} vertices {e:?}"),
                );
            }
        }
        if n == 7 {
            *n7_time = start.elapsed();
        }
    }
    outcome(true, "n = 3..7")
}

fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> PeriodicJacobi {
    let a = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let b = (0..n)
        .map(|_| Complex64::from_polar(rng.gen_range(0.5..1.5), rng.gen_range(-3.14..3.14)))
        .collect();
    PeriodicJacobi::new(a, b).unwrap()
}

fn toda_conservation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed());
    let cfg = TodaConfig {
        dt: 1e-3,
        t_end: 10.0,
        tol: 1.0,
        record_every: 10,
    };
    let (mut eig, mut abs_b, mut phase) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..20 {
        let l = random_matrix(&mut rng, 5);
        let traj = integrate(&l, &cfg).unwrap();
        let d = traj.max_drift();
        eig = eig.max(d.spectrum);
        abs_b = abs_b.max(d.abs_b);
        phase = phase.max(d.phase);
    }
    outcome(
        eig <= 1e-9 && abs_b <= 1e-10 && phase <= 1e-10,
        format!("max drift: spectrum {eig:.2e} (<= 1e-9), |B| {abs_b:.2e} (<= 1e-10), arg b {phase:.2e} (<= 1e-10)"),
    )
}

fn monodromy_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed().wrapping_add(1));
    let (mut det_err, mut trace_err) = (0.0f64, 0.0f64);
    for _ in 0..50 {
        let n = rng.gen_range(3..=8);
        let a = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let moduli: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..1.5)).collect();
        let w = Complex64::from_polar(1.0, rng.gen_range(-3.14..3.14));
        let l = PeriodicJacobi::twisted(a, &moduli, w).unwrap();
        let op = SchrodingerOperator::from_matrix(&l).unwrap();
        let f = RealPolynomial::from_roots(&l.eigenvalues().unwrap());
        let big_b = op.product_b();
        let z = forbidden_zones(&l, DEFAULT_ZONE_TOL).unwrap();
        let (lo, hi) = (z.roots[0], z.roots[2 * n - 1]);
        for k in 0..100 {
            let x = lo + (hi - lo) * k as f64 / 99.0;
            let m = op.monodromy(x);
            let rhs = f.eval(x) + 2.0 * big_b * w.re;
            det_err = det_err.max((m.det() - 1.0).abs());
            trace_err = trace_err.max((big_b * m.trace() - rhs).abs() / rhs.abs().max(1.0));
        }
    }
    outcome(
        det_err <= 1e-10 && trace_err <= 1e-7,
        format!(
            "|det M - 1| {det_err:.2e} (<= 1e-10), relative trace error {trace_err:.2e} (<= 1e-7)"
        ),
    )
}

fn forward_image() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed().wrapping_add(2));
    for i in 0..200 {
        let n = rng.gen_range(3..=8);
        let l = random_matrix(&mut rng, n);
        let inv = analyze(&l.spectrum().unwrap(), 1e-9).unwrap();
        let q = bset_contains(&inv, l.product_b(), 1e-8);
        if q.location == BSetLocation::Outside {
            return outcome(false, format!("matrix {i}: B = {} outside", l.product_b()));
        }
    }
    // F = x(x-1)(x-2) has extreme values ±2/(3√3)
    let inv = analyze(&Spectrum::new(vec![0.0, 1.0, 2.0]).unwrap(), 1e-9).unwrap();
    let crit = 2.0 / (3.0 * 3f64.sqrt());
    let pos = inv.bset_radius(0.0);
    let neg = inv.bset_radius(std::f64::consts::PI);
    outcome(
        (pos - crit / 4.0).abs() <= 1e-10 && (neg - crit / 4.0).abs() <= 1e-10,
        format!(
            "200 matrices inside; axis radii {pos:.12} and {neg:.12} vs {:.12}",
            crit / 4.0
        ),
    )
}

fn diagnostics_check() -> Outcome {
    for (n, p, m) in params(10) {
        let t = betti_table(n, p, m).unwrap();
        let d = diagnostics(n, p, m).unwrap();
        if t.betti[1] != (n - 1 - p - m) as i128 || d.pi1_rank != n - 1 - p - m {
            return outcome(false, format!("({n}, {p}, {m}): b1 = {}", t.betti[1]));
        }
        if p == 1 && m == 1 && !t.poly().is_palindromic(2 * n + 1) {
            return outcome(false, format!("n={n}: {:?} not palindromic", t.betti));
        }
        if d.equivariantly_formal != (n < 4) {
            return outcome(
                false,
                format!("({n}, {p}, {m}): formal = {}", d.equivariantly_formal),
            );
        }
    }
    let orbit = diagnostics(3, 1, 1).unwrap().orbit_poincare;
    outcome(
        orbit == [1, 0, 0, 0, 1],
        format!("orbit_poincare(3,1,1) = {orbit:?}"),
    )
}

fn report(id: usize, title: &str, budget: Option<Duration>, run: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let o = run();
    let elapsed = start.elapsed();
    let in_time = budget.is_none_or(|b| elapsed <= b);
    let pass = o.pass && in_time;
    let timing = match budget {
        Some(b) => format!("{:.3} s, budget {} s", elapsed.as_secs_f64(), b.as_secs()),
        None => format!("{:.3} s", elapsed.as_secs_f64()),
    };
    println!(
        "{} [{id}] {title}: {} ({timing})",
        if pass { "PASS" } else { "FAIL" },
        o.detail
    );
    pass
}

fn main() {
    let secs = Duration::from_secs;
    println!("acceptance suite, ISOTODA_SEED = {}", seed());
    let mut all = true;
    all &= report(1, "golden Betti tables", Some(secs(1)), golden_tables);
    all &= report(2, "Euler characteristic n!", Some(secs(5)), euler_property);
    let (literal, companion) = fl3_identity();
    all &= report(
        3,
        "collar series of n=3 equals the Fl3 series",
        None,
        || literal,
    );
    println!(
        "     note: {} ({})",
        if companion.pass { "holds" } else { "fails" },
        companion.detail
    );
    all &= report(4, "h-vector golden and sums", None, h_vectors);
    let mut n7 = Duration::ZERO;
    let ok = report(5, "tiling cross-validation", None, || {
        tiling_cross_validation(&mut n7)
    });
    let n7_ok = n7 <= secs(30);
    println!(
        "     n=7 build and checks {:.3} s (budget 30 s): {}",
        n7.as_secs_f64(),
        if n7_ok { "ok" } else { "over" }
    );
    all &= ok && n7_ok;
    all &= report(6, "Toda conservation", Some(secs(60)), toda_conservation);
    all &= report(
        7,
        "monodromy identities",
        Some(secs(30)),
        monodromy_identities,
    );
    all &= report(8, "forward image property", None, forward_image);
    all &= report(9, "diagnostics", None, diagnostics_check);
    if !all {
        std::process::exit(1);
    }
}
