//! Acceptance suite: prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use fracroot_core::expr::{parse, Expr, Func, SystemF};
use fracroot_core::fracderiv::{frac_jacobian, FracOperator, DEFAULT_N_TRUNC};
use fracroot_core::linalg::{norm2, sub_vec};
use fracroot_core::solvers::{run, Outcome, SolverConfig, SolverKind};
use fracroot_core::specfun::{gamma, gamma_real, sin_pi};
use fracroot_core::sweep::{make_grid, sweep, AlphaGrid, SweepResult, DEFAULT_ALPHA_EXCL, DEFAULT_ALPHA_STEP, DEFAULT_EPS_DEDUP};
use fracroot_core::{fracderiv, Complex64};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const POLY16: &str = "-57.62*x^16 - 56.69*x^15 - 37.39*x^14 - 19.91*x^13 + 35.83*x^12 \
    - 72.47*x^11 + 44.41*x^10 + 43.53*x^9 + 59.93*x^8 - 42.9*x^7 - 54.24*x^6 \
    + 72.12*x^5 - 22.92*x^4 + 56.39*x^3 + 15.8*x^2 + 60.05*x + 55.31";
const SIN_RECIP: &str = "sin(x) - 3/(2*x)";
const SYS3D: &str = "x1^2 + x2 - 37; x1 - x2^2 - 5; x1 + x2 + x3 - 3";
const TRIG_EXP: &str = "0.5*sin(x1*x2) - x2/(4*pi) - x1/2; \
    (1 - 1/(4*pi))*(exp(2*x1) - e) + e/pi*x2 - 2*e*x1";

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn r(v: f64) -> Complex64 {
    c(v, 0.0)
}

struct Report {
    failed: usize,
}

impl Report {
    fn check(&mut self, id: u32, name: &str, pass: bool, detail: String) {
        if !pass {
            self.failed += 1;
        }
        println!("{} [{id}] {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    }

    fn soft(&self, id: u32, detail: String) {
        println!("INFO [{id}] {detail}");
    }
}

fn default_grid() -> AlphaGrid {
    make_grid(DEFAULT_ALPHA_STEP, DEFAULT_ALPHA_EXCL).unwrap()
}

fn matches_componentwise(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
    a.iter()
        .zip(b)
        .all(|(p, q)| (p.re - q.re).abs() <= tol && (p.im - q.im).abs() <= tol)
}

fn residual(f: &SystemF, x: &[Complex64]) -> f64 {
    f.eval(x).map(|v| norm2(&v)).unwrap_or(f64::INFINITY)
}

/// Targets matched by some registry root within `tol` with residual ≤ `res_tol`.
fn matched(f: &SystemF, res: &SweepResult, targets: &[Vec<Complex64>], tol: f64, res_tol: f64) -> Vec<bool> {
    targets
        .iter()
        .map(|t| {
            res.registry
                .entries()
                .iter()
                .any(|e| matches_componentwise(&e.root, t, tol) && residual(f, &e.root) <= res_tol)
        })
        .collect()
}

/// Soft iteration-count comparison for table rows: run at the printed order.
fn soft_counts(report: &Report, id: u32, f: &SystemF, kind: SolverKind, x0: &[Complex64], cfg: &SolverConfig, rows: &[(f64, usize)]) {
    let mut within = 0;
    for &(alpha, r_m) in rows {
        if let Ok(rec) = run(f, kind, alpha, x0, cfg) {
            let lo = (r_m as f64 * 0.5).floor() as usize;
            let hi = (r_m as f64 * 1.5).ceil() as usize;
            if rec.outcome == Outcome::Converged && (lo..=hi).contains(&rec.iterations) {
                within += 1;
            }
        }
    }
    report.soft(id, format!("iteration counts within ±50% of the table at the printed orders: {within}/{}", rows.len()));
}

fn criterion_1(report: &mut Report) {
    let f = parse(POLY16, 1).unwrap();
    let cfg = SolverConfig {
        div_bound: 1e17,
        ..SolverConfig::default()
    };
    let x0 = [r(0.74)];
    let start = Instant::now();
    let res = sweep(&f, SolverKind::FracNewton, &default_grid(), &x0, &cfg, DEFAULT_EPS_DEDUP, 1).unwrap();
    let elapsed = start.elapsed();
    let targets: Vec<Vec<Complex64>> = [
        c(-1.3699527, 0.0),
        c(-1.00133957, 0.0),
        c(-0.62435277, 0.0),
        c(0.58999224, -0.86699687),
        c(0.36452488, -0.83287821),
        c(-0.28661369, -0.80840642),
        c(0.88121183, 0.4269622),
        c(0.88121183, -0.4269622),
        c(-0.35983764, 1.18135267),
        c(1.03423976, 0.0),
        c(-0.70050491, -0.78577099),
        c(-0.35983764, -1.18135267),
        c(-0.70050491, 0.78577099),
        c(0.58999224, 0.86699687),
        c(0.36452488, 0.83287821),
        c(-0.28661369, 0.80840642),
    ]
    .iter()
    .map(|z| vec![*z])
    .collect();
    let hits = matched(&f, &res, &targets, 1e-3, f64::INFINITY);
    let n_hit = hits.iter().filter(|h| **h).count();
    let worst = res.registry.entries().iter().map(|e| residual(&f, &e.root)).fold(0.0, f64::max);
    report.check(
        1,
        "Table 1 reproduction",
        res.registry.len() >= 16 && n_hit == 16 && worst <= 1e-4,
        format!(
            "{} registry roots, {n_hit}/16 table roots matched within 1e-3, max residual {worst:.3e}, {:.1} s single-threaded",
            res.registry.len(),
            elapsed.as_secs_f64()
        ),
    );
    soft_counts(
        report,
        1,
        &f,
        SolverKind::FracNewton,
        &x0,
        &cfg,
        &[
            (-1.01346, 2), (-0.80436, 2), (-0.50138, 2), (0.87611, 11), (0.87634, 11), (0.87658, 10),
            (0.8943, 14), (0.89561, 11), (0.95944, 24), (1.05937, 4), (1.17776, 15), (1.17796, 17),
            (1.17863, 18), (1.17916, 12), (1.17925, 9), (1.22278, 9),
        ],
    );
}

fn criterion_2(report: &mut Report) {
    let f = parse(SIN_RECIP, 1).unwrap();
    let cfg = SolverConfig {
        div_bound: 1e6,
        n_trunc: 40,
        ..SolverConfig::default()
    };
    let x0 = [r(0.26)];
    let res = sweep(&f, SolverKind::FracNewton, &default_grid(), &x0, &cfg, DEFAULT_EPS_DEDUP, 0).unwrap();
    let values = [1.50341195, 2.49727201, 6.51548968, 9.26211143, 12.6848988];
    let targets: Vec<Vec<Complex64>> = values
        .iter()
        .flat_map(|v| [vec![r(*v)], vec![r(-*v)]])
        .collect();
    let hits = matched(&f, &res, &targets, 1e-3, 1e-4);
    let n_hit = hits.iter().filter(|h| **h).count();
    let missing: Vec<String> = targets
        .iter()
        .zip(&hits)
        .filter(|(_, h)| !**h)
        .map(|(t, _)| format!("{:.8}", t[0].re))
        .collect();
    report.check(
        2,
        "Table 2 reproduction",
        n_hit >= 8,
        format!(
            "{n_hit}/10 roots with |xi| <= 13 matched within 1e-3 (residual <= 1e-4), {} registry roots; missing: [{}]",
            res.registry.len(),
            missing.join(", ")
        ),
    );
    soft_counts(
        report,
        2,
        &f,
        SolverKind::FracNewton,
        &x0,
        &cfg,
        &[
            (-1.92915, 6), (-0.07196, 8), (-0.03907, 7), (0.20932, 12), (0.20986, 15), (0.21105, 10),
            (1.19522, 13), (1.19546, 14), (1.19558, 14), (1.23944, 11),
        ],
    );
}

fn criterion_3(report: &mut Report) {
    let f = parse(SYS3D, 3).unwrap();
    let cfg = SolverConfig {
        div_bound: 1e6,
        ..SolverConfig::default()
    };
    let x0 = [r(4.35), r(4.35), r(4.35)];
    let res = sweep(&f, SolverKind::FracNewton, &default_grid(), &x0, &cfg, DEFAULT_EPS_DEDUP, 0).unwrap();
    let target = [r(6.0), r(1.0), r(-4.0)];
    let best = res
        .registry
        .entries()
        .iter()
        .filter(|e| matches_componentwise(&e.root, &target, 1e-3))
        .map(|e| residual(&f, &e.root))
        .fold(f64::INFINITY, f64::min);
    report.check(
        3,
        "Table 5 exact root",
        best <= 1e-8,
        format!("(6, 1, -4) residual {best:.3e}, {} registry roots", res.registry.len()),
    );
}

fn criterion_4(report: &mut Report) {
    let f = parse(TRIG_EXP, 2).unwrap();
    let cfg = SolverConfig {
        max_iter: 200,
        div_bound: 1e6,
        eps_shift: 1e-3,
        ..SolverConfig::default()
    };
    let target = vec![r(0.2994), r(2.8369)];
    let mut details = Vec::new();
    let mut pass = true;
    for (kind, x0, label) in [
        (SolverKind::FracQuasiNewton, [r(1.52), r(1.52)], "quasi"),
        (SolverKind::FracPseudoNewton, [r(1.03), r(1.03)], "pseudo"),
    ] {
        let res = sweep(&f, kind, &default_grid(), &x0, &cfg, DEFAULT_EPS_DEDUP, 0).unwrap();
        let hit = res
            .registry
            .entries()
            .iter()
            .find(|e| matches_componentwise(&e.root, &target, 1e-3) && residual(&f, &e.root) <= 1e-4);
        pass &= hit.is_some();
        details.push(match hit {
            Some(e) => format!(
                "{label}: ({:.8}, {:.8}) at alpha {:.4}, {} iterations",
                e.root[0].re, e.root[1].re, e.alpha, e.iterations
            ),
            None => format!("{label}: not found ({} registry roots)", res.registry.len()),
        });
    }
    report.check(4, "Cross-method consistency", pass, details.join("; "));
    soft_counts(report, 4, &f, SolverKind::FracPseudoNewton, &[r(1.03), r(1.03)], &cfg, &[(0.78562, 66), (0.78987, 88), (0.82596, 140)]);
}

fn companion_roots(coeffs: &[f64]) -> Vec<Complex64> {
    // coeffs[k] multiplies x^k; monic companion matrix
    let deg = coeffs.len() - 1;
    let lead = coeffs[deg];
    let mut m = DMatrix::<f64>::zeros(deg, deg);
    for i in 1..deg {
        m[(i, i - 1)] = 1.0;
    }
    for i in 0..deg {
        m[(i, deg - 1)] = -coeffs[i] / lead;
    }
    m.complex_eigenvalues().iter().map(|z| c(z.re, z.im)).collect()
}

fn criterion_5(report: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let cfg = SolverConfig {
        div_bound: 1e17,
        ..SolverConfig::default()
    };
    let grid = default_grid();
    let mut total = 0;
    let mut bad = Vec::new();
    let mut worst: f64 = 0.0;
    for p in 0..20 {
        let deg = rng.gen_range(3..=8);
        let coeffs: Vec<f64> = (0..=deg).map(|_| rng.gen_range(-10.0..10.0)).collect();
        let src = coeffs
            .iter()
            .enumerate()
            .map(|(k, a)| format!("({a}) * x^{k}"))
            .collect::<Vec<_>>()
            .join(" + ");
        let f = parse(&src, 1).unwrap();
        let oracle = companion_roots(&coeffs);
        let res = sweep(&f, SolverKind::FracNewton, &grid, &[r(0.74)], &cfg, DEFAULT_EPS_DEDUP, 0).unwrap();
        for e in res.registry.entries() {
            total += 1;
            let x = e.root[0];
            let polished = match (f.eval(&e.root), f.classic_jacobian(&e.root)) {
                (Ok(v), Ok(j)) => x - v[0] / j[(0, 0)],
                _ => x,
            };
            let d = oracle.iter().map(|z| (z - polished).norm()).fold(f64::INFINITY, f64::min);
            worst = worst.max(d);
            if !(d <= 1e-6) {
                bad.push(format!("poly {p} root {polished:.6} off by {d:.2e}"));
            }
        }
    }
    report.check(
        5,
        "Oracle equivalence",
        bad.is_empty() && total > 0,
        format!(
            "{total} registry roots over 20 polynomials, worst distance to companion eigenvalue {worst:.2e}{}",
            if bad.is_empty() { String::new() } else { format!("; mismatches: {}", bad.join("; ")) }
        ),
    );
}

fn random_expr(rng: &mut ChaCha8Rng, n: usize, depth: u32) -> Expr {
    let leaf = depth == 0 || rng.gen_bool(0.25);
    if leaf {
        return if rng.gen_bool(0.6) {
            Expr::Var(rng.gen_range(0..n))
        } else {
            Expr::real(rng.gen_range(-3.0..3.0))
        };
    }
    let sub = |rng: &mut ChaCha8Rng| Box::new(random_expr(rng, n, depth - 1));
    match rng.gen_range(0..9) {
        0 => Expr::Neg(sub(rng)),
        1 => Expr::Add(sub(rng), sub(rng)),
        2 => Expr::Sub(sub(rng), sub(rng)),
        3 => Expr::Mul(sub(rng), sub(rng)),
        4 => {
            // keep real denominators away from zero: a / (b^2 + 1)
            let den = Expr::Add(Box::new(Expr::Pow(sub(rng), 2.0)), Box::new(Expr::real(1.0)));
            Expr::Div(sub(rng), Box::new(den))
        }
        5 => Expr::Pow(sub(rng), [2.0, 3.0][rng.gen_range(0..2)]),
        6 => {
            let base = Expr::Add(Box::new(Expr::Pow(sub(rng), 2.0)), Box::new(Expr::real(1.0)));
            Expr::Pow(Box::new(base), 0.5)
        }
        _ => {
            let func = [Func::Sin, Func::Cos, Func::Exp, Func::Sinh, Func::Cosh][rng.gen_range(0..5)];
            Expr::Call(func, sub(rng))
        }
    }
}

fn kernel_invariants() -> Vec<(String, bool)> {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut out = Vec::new();

    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let z = c(rng.gen_range(0.5..50.0), rng.gen_range(-5.0..5.0));
        let lhs = gamma(z + 1.0).unwrap();
        let rhs = z * gamma(z).unwrap();
        worst = worst.max((lhs - rhs).norm() / rhs.norm());
    }
    out.push((format!("gamma recurrence {worst:.1e}"), worst <= 1e-10));

    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let x: f64 = rng.gen_range(-5.0..5.0);
        if (x - x.round()).abs() < 1e-6 {
            continue;
        }
        let v = gamma_real(x).unwrap() * gamma_real(1.0 - x).unwrap() * sin_pi(x) / std::f64::consts::PI;
        worst = worst.max((v - 1.0).abs());
    }
    out.push((format!("gamma reflection {worst:.1e}"), worst <= 1e-10));

    // closed-form term values from a high-precision gamma oracle
    let one = r(1.0);
    let term_cases = [
        (fracderiv::rl_term(one, 1.0, 0.5, r(1.0)), r(1.128_379_167_095_512_6)),
        (fracderiv::rl_term(one, 0.0, 0.5, r(4.0)), r(0.282_094_791_773_878_1)),
        (fracderiv::rl_term(one, 2.0, 0.5, r(1.0)), r(1.504_505_556_127_35)),
        (fracderiv::rl_term(one, -1.0, 0.5, r(1.0)), c(0.0, 0.886_226_925_452_758)),
        (fracderiv::caputo_term(r(5.0), 0.0, 0.5, r(2.0)), r(0.0)),
    ];
    let ok = term_cases
        .iter()
        .all(|(got, want)| got.as_ref().map(|g| (g - want).norm() <= 1e-12).unwrap_or(false));
    out.push(("term-rule oracle values".to_string(), ok));

    let op = FracOperator::default();
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let n = rng.gen_range(1..=3);
        let eqs: Vec<String> = (0..n)
            .map(|_| {
                (0..rng.gen_range(1..=4))
                    .map(|_| {
                        let factors: Vec<String> = (0..n).map(|j| format!("x{}^{}", j + 1, rng.gen_range(0..=3))).collect();
                        format!("({}) * {}", rng.gen_range(-3.0..3.0), factors.join(" * "))
                    })
                    .collect::<Vec<_>>()
                    .join(" + ")
            })
            .collect();
        let f = fracroot_core::expr::parse_equations(&eqs, n).unwrap();
        let x: Vec<Complex64> = (0..n)
            .map(|_| r(rng.gen_range(0.5..2.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 }))
            .collect();
        let classic = f.classic_jacobian(&x).unwrap();
        for alpha in [1.0 - 1e-6, 1.0 + 1e-6] {
            let m = frac_jacobian(&f, alpha, &x, op, DEFAULT_N_TRUNC).unwrap();
            worst = worst.max(m.sub(&classic).norm_inf());
        }
    }
    out.push((format!("order-1 continuity {worst:.1e}"), worst <= 1e-3));

    let mut worst: f64 = 0.0;
    for a in [-0.3, -0.75, -1.2, -1.9] {
        for b in [-0.4, -0.9, -1.5] {
            for mu in [0.0, 1.0, 2.0, 3.0] {
                for x in [0.5, 1.0, 2.0] {
                    let (c1, m1) = op.transform(one, mu, a).unwrap();
                    let two = op.term(c1, m1, b, r(x)).unwrap();
                    let once = op.term(one, mu, a + b, r(x)).unwrap();
                    worst = worst.max((two - once).norm() / once.norm());
                }
            }
        }
    }
    out.push((format!("semigroup {worst:.1e}"), worst <= 1e-10));

    let mut worst: f64 = 0.0;
    for alpha in [0.3, 0.5, 0.9, 1.4, 1.9] {
        for mu in [-0.5, 0.0, 1.0, 2.0, 3.0] {
            for x in [0.5, 1.0, 2.0] {
                let (c1, m1) = op.transform(one, mu, -alpha).unwrap();
                let back = op.term(c1, m1, alpha, r(x)).unwrap();
                let orig = r(x).powf(mu);
                worst = worst.max((back - orig).norm() / orig.norm());
            }
        }
    }
    out.push((format!("left inverse {worst:.1e}"), worst <= 1e-10));

    let mut worst: f64 = 0.0;
    let mut systems = 0;
    while systems < 100 {
        let n = rng.gen_range(1..=3);
        let comps: Vec<Expr> = (0..n).map(|_| random_expr(&mut rng, n, 4)).collect();
        let f = SystemF::new(comps).unwrap();
        let x: Vec<Complex64> = (0..n)
            .map(|_| r(rng.gen_range(0.5..2.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 }))
            .collect();
        let Ok(jac) = f.classic_jacobian(&x) else { continue };
        // skip draws whose values overflow double precision differencing
        if !jac.is_finite() || f.eval(&x).map(|v| norm2(&v) > 1e8).unwrap_or(true) {
            continue;
        }
        systems += 1;
        for j in 0..n {
            let h = 1e-6 * x[j].norm().max(1.0);
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[j] += h;
            xm[j] -= h;
            let fp = f.eval(&xp).unwrap();
            let fm = f.eval(&xm).unwrap();
            let fd = sub_vec(&fp, &fm);
            for k in 0..n {
                let est = fd[k] / (2.0 * h);
                let rel = (est - jac[(k, j)]).norm() / jac[(k, j)].norm().max(1.0);
                worst = worst.max(rel);
            }
        }
    }
    out.push((format!("classic Jacobian vs central differences {worst:.1e}"), worst <= 1e-5));
    out
}

fn criterion_6(report: &mut Report) {
    let results = kernel_invariants();
    let pass = results.iter().all(|(_, ok)| *ok);
    let detail = results
        .iter()
        .map(|(name, ok)| format!("{name}{}", if *ok { "" } else { " (failed)" }))
        .collect::<Vec<_>>()
        .join("; ");
    report.check(6, "Kernel invariant suites", pass, detail);
}

fn criterion_7(report: &mut Report) {
    let trace_cfg = |tol: f64, max_iter: usize| SolverConfig {
        tol,
        max_iter,
        div_bound: 1e30,
        record_trace: true,
        ..SolverConfig::default()
    };

    let f = parse("x^2 - 2", 1).unwrap();
    let rec = run(&f, SolverKind::ClassicNewton, 1.0, &[r(1.5)], &trace_cfg(1e-15, 10)).unwrap();
    let root = 2f64.sqrt();
    let errs: Vec<f64> = rec.trace.unwrap().iter().map(|t| (t.x[0].re - root).abs()).collect();
    let fitted = (1..4)
        .filter(|&i| errs[i] > 1e-14)
        .map(|i| errs[i + 1] / (errs[i] * errs[i]))
        .fold(0.0, f64::max);
    let doubling = fitted < 1.0;

    let g = parse("(x - 1)^2", 1).unwrap();
    let rec = run(&g, SolverKind::ClassicNewton, 1.0, &[r(2.0)], &trace_cfg(1e-30, 25)).unwrap();
    let errs: Vec<f64> = rec.trace.unwrap().iter().map(|t| (t.x[0].re - 1.0).abs()).collect();
    let ratio = errs[21] / errs[20];
    let linear = (ratio - 0.5).abs() <= 0.05;

    let h = parse("x^2 + 1", 1).unwrap();
    let rec = run(&h, SolverKind::FracNewton, 0.8, &[r(1.0)], &SolverConfig::default()).unwrap();
    let complex = rec.final_x[0].im.abs() > 0.0;

    report.check(
        7,
        "Convergence-shape properties",
        doubling && linear && complex,
        format!(
            "x^2-2 fitted C = {fitted:.3}; (x-1)^2 error ratio at 20 = {ratio:.4}; x^2+1 from 1 ends at {:.6}",
            rec.final_x[0]
        ),
    );
}

fn main() -> ExitCode {
    let mut report = Report { failed: 0 };
    let start = Instant::now();
    criterion_1(&mut report);
    criterion_2(&mut report);
    criterion_3(&mut report);
    criterion_4(&mut report);
    criterion_5(&mut report);
    criterion_6(&mut report);
    criterion_7(&mut report);
    println!(
        "acceptance: {} of 7 criteria passed in {:.1} s",
        7 - report.failed,
        start.elapsed().as_secs_f64()
    );
    if report.failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
