//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zeno_core::euclidean::{dirichlet_heat_series, heat_step_kernel, wiener_product};
use zeno_core::zeno::{least_squares_line, periodic_zeno_check, zeno_evolve, ZenoLimit, ZenoPlan};
use zeno_core::{Complex64, Grid, HamiltonianOperator, HamiltonianSpec, Propagator, Region, StateVector};
use zeno_lab::{parse_config, run_experiment, Report};
use zeno_validation::{diagonal_projector, expm_taylor, frobenius, phi, random_hermitian, Scorecard};

struct Verdict {
    passed: bool,
    detail: String,
}

fn lab(args: &[&str]) -> Report {
    let argv = std::iter::once("zeno-lab").chain(args.iter().copied());
    let cfg = parse_config(argv).unwrap_or_else(|e| panic!("config {args:?}: {e}"));
    run_experiment(&cfg).unwrap_or_else(|e| panic!("run {args:?}: {e}"))
}

fn column(report: &Report, table: &str, col: &str) -> Vec<f64> {
    report.table(table).and_then(|t| t.column(col)).unwrap_or_else(|| panic!("{table}.{col} missing"))
}

fn within_budget(elapsed: Duration, budget_s: f64) -> bool {
    elapsed.as_secs_f64() < budget_s
}

fn two_level() -> Verdict {
    let r = lab(&["twolevel", "--T", "1", "--steps-list", "10,100,1000,10000"]);
    let ns = column(&r, "twolevel", "N");
    let err = column(&r, "twolevel", "abs_error");
    let surv = column(&r, "twolevel", "survival");
    let worst = err[..3].iter().copied().fold(0.0, f64::max);
    debug_assert_eq!(ns[3], 1e4);
    Verdict {
        passed: worst < 1e-10 && surv[3] >= 0.9999 && r.passed(),
        detail: format!(
            "max |P - cos(T/N)^2N| over N in {{10,100,1000}} = {worst:.2e} (< 1e-10); P(N=1e4) = {:.8} (>= 0.9999)",
            surv[3]
        ),
    }
}

fn finite_dimensional_limit() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_2e40);
    let dim = 12;
    let h = random_hermitian(dim, &mut rng);
    let mut mask: Vec<bool> = (0..dim).map(|_| rng.random_bool(0.5)).collect();
    mask[0] = true;
    mask[dim - 1] = false;
    let e = diagonal_projector(&mask);
    let t = 1.0;
    let i = Complex64::new(0.0, 1.0);
    let limit = expm_taylor(&(&e * &h * &e * (-i * t))) * &e;
    let distance = |n: usize| {
        let step = &e * expm_taylor(&(&h * (-i * t / n as f64))) * &e;
        let mut prod: DMatrix<Complex64> = e.clone();
        for _ in 0..n {
            prod = &step * prod;
        }
        frobenius(&(prod - &limit))
    };
    let (d16, d4096) = (distance(16), distance(4096));
    Verdict {
        passed: d4096 < 0.1 * d16,
        detail: format!(
            "dim {dim}, rank E = {}, T = {t}: ||V_4096 - limit|| = {d4096:.3e}, ||V_16 - limit|| = {d16:.3e}, ratio {:.4} (< 0.1)",
            mask.iter().filter(|m| **m).count(),
            d4096 / d16
        ),
    }
}

fn free_convergence() -> Verdict {
    let r = lab(&[
        "zeno-convergence", "--points", "2048", "--x-min", "-2", "--x-max", "2", "--a", "0", "--b", "1", "--x0", "0.5",
        "--sigma", "0.07", "--T", "0.5", "--steps-list", "8,16,32,64,128,256",
    ]);
    let ns = column(&r, "zeno-convergence", "N");
    let dist = column(&r, "zeno-convergence", "distance_to_limit");
    let surv = column(&r, "zeno-convergence", "survival");
    let decreasing = dist.windows(2).all(|w| w[1] < w[0]);
    let pts: Vec<(f64, f64)> = ns.iter().zip(&surv).map(|(n, p)| (n.ln(), (1.0 - p).ln())).collect();
    let slope = least_squares_line(&pts).0;
    let slope_ok = (slope + 1.0).abs() <= 0.2;
    Verdict {
        passed: decreasing && slope_ok,
        detail: format!(
            "distances {} strictly decreasing: {decreasing}; slope of ln(1 - P) vs ln N = {slope:.4} (target -1 +/- 0.2); 1 - P from {:.4} to {:.4}",
            dist.iter().map(|d| format!("{d:.4}")).collect::<Vec<_>>().join(" > "),
            1.0 - surv[0],
            1.0 - surv[surv.len() - 1]
        ),
    }
}

fn momentum_leak() -> Verdict {
    let r = lab(&[
        "fig1", "--points", "4096", "--x-min", "-2", "--x-max", "2", "--a", "0", "--b", "1", "--x0", "0.5", "--sigma",
        "0.05", "--T", "0.6", "--N", "256", "--panels", "2",
    ]);
    let survival = *column(&r, "fig1_summary", "natural_survival").last().unwrap();
    let distance = *column(&r, "fig1_summary", "natural_oracle_distance").last().unwrap();
    let target = phi(-2.0);
    let cells = 0.6 / 256.0 / (4.0 / 4096.0);
    Verdict {
        passed: (survival - target).abs() <= 0.01 && distance < 0.05 && r.passed(),
        detail: format!(
            "N = 256: P = {survival:.5} vs Phi(-2) = {target:.5} (+/- 0.01); ||V_N psi0 - oracle|| = {distance:.4} (< 0.05); dt/h = {cells:.2}"
        ),
    }
}

fn periodic_extension() -> Verdict {
    let circle = Grid::periodic(0.0, 1.0, 1024).unwrap();
    let psi = StateVector::gaussian_packet(circle, 0.5, 0.05, 0.0).unwrap();
    let (mut worst_norm, mut worst_modulus, mut aligned) = (0.0f64, 0.0f64, 0);
    for alpha in [0.0, 1.0] {
        for row in periodic_zeno_check(&psi, alpha, &[0.25, 0.5, 0.75]).unwrap() {
            worst_norm = worst_norm.max((row.norm - 1.0).abs());
            if row.cell_aligned {
                aligned += 1;
                worst_modulus = worst_modulus.max(row.modulus_mismatch);
            }
        }
    }
    Verdict {
        passed: worst_norm < 1e-10 && worst_modulus < 1e-8 && aligned == 6,
        detail: format!(
            "alpha in {{0, 1}}, t in {{0.25, 0.5, 0.75}}: max |norm - 1| = {worst_norm:.2e} (< 1e-10); max modulus mismatch = {worst_modulus:.2e} (< 1e-8) over {aligned} cell-aligned times"
        ),
    }
}

fn spectra() -> Verdict {
    let worst = |r: &Report| column(r, "spectrum", "rel_error").iter().map(|e| e.abs()).fold(0.0, f64::max);
    let free = lab(&["spectrum", "--model", "free-dirichlet", "--points", "255", "--mass", "1", "--count", "5"]);
    let first = column(&free, "spectrum", "analytic")[0];
    let quad = lab(&["spectrum", "--model", "momentum-quadratic", "--points", "255", "--count", "3"]);
    let comp = lab(&[
        "spectrum", "--model", "compressed-free", "--points", "4096", "--x-min", "-2", "--x-max", "2", "--a", "0", "--b",
        "1", "--count", "1",
    ]);
    let (f, q, c) = (worst(&free), worst(&quad), worst(&comp));
    Verdict {
        passed: f < 1e-3 && q < 1e-3 && c < 1e-2 && (first - 4.9348).abs() < 1e-4 && free.passed() && quad.passed() && comp.passed(),
        detail: format!(
            "FreeDirichlet first 5 max rel err {f:.2e} (< 1e-3, E1 analytic {first:.4}); MomentumQuadratic first 3 {q:.2e} (< 1e-3); compressed free lowest {c:.2e} (< 1e-2)"
        ),
    }
}

fn euclidean() -> Verdict {
    let r = lab(&["euclid", "--points", "511", "--a", "0", "--b", "1", "--mass", "1", "--tau", "0.1", "--steps-list", "8,16,32,64", "--terms", "5"]);
    let dist = column(&r, "euclid", "kernel_distance");
    let diag = *column(&r, "euclid", "diag_value").last().unwrap();
    let series = dirichlet_heat_series(0.5, 0.5, 0.1, 1.0, 5);
    let rel = (diag - series).abs() / series;
    let ratios: Vec<f64> = dist.windows(2).map(|w| w[1] / w[0]).collect();
    let halving = ratios.iter().all(|q| (0.25..=0.75).contains(q));
    Verdict {
        passed: rel < 1e-2 && halving && (series - 1.2446).abs() < 1e-4 && r.passed(),
        detail: format!(
            "diag(N=64) = {diag:.5} vs series {series:.5}: rel {rel:.2e} (< 1e-2); distance ratios per doubling {} (in [0.25, 0.75])",
            ratios.iter().map(|q| format!("{q:.3}")).collect::<Vec<_>>().join(", ")
        ),
    }
}

fn short_time_scaling() -> Verdict {
    let exponent = |r: &Report| column(r, "leak-exponent_fit", "exponent")[0];
    let free = exponent(&lab(&["leak-exponent", "--model", "free", "--x0", "0.05", "--sigma", "0.05", "--t-min", "1e-4", "--t-max", "1e-3"]));
    let momentum = exponent(&lab(&["leak-exponent", "--model", "momentum", "--x0", "0.95", "--sigma", "0.05", "--t-min", "1e-3", "--t-max", "1e-2"]));
    Verdict {
        passed: (1.8..=2.5).contains(&free) && (0.8..=1.2).contains(&momentum),
        detail: format!("FreeLine straddling exponent {free:.4} (in [1.8, 2.5]); H = p straddling exponent {momentum:.4} (in [0.8, 1.2])"),
    }
}

/// Seeded property sweeps; returns (cases, failures).
fn property_suites() -> (usize, Vec<String>) {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut failures = Vec::new();
    let mut cases = 0;
    let mut check = |name: &str, ok: bool| {
        cases += 1;
        if !ok {
            failures.push(name.to_string());
        }
    };
    let random_state = |g: Grid, rng: &mut ChaCha8Rng| {
        let amps = (0..g.len()).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        let mut s = StateVector::new(g, amps).unwrap();
        s.normalize().unwrap();
        s
    };
    for _ in 0..16 {
        // unitarity: dense eigenbasis and spectral multipliers
        let dim = rng.random_range(2..12);
        let g = Grid::periodic(0.0, dim as f64, dim).unwrap();
        let op = HamiltonianOperator::from_matrix(g, random_hermitian(dim, &mut rng)).unwrap();
        let psi = random_state(g, &mut rng);
        let t = rng.random_range(-5.0..5.0);
        let p = Propagator::new(op.clone()).unwrap();
        check("unitarity (dense)", (p.evolve(&psi, t).unwrap().norm() - 1.0).abs() < 1e-10 && p.reverse_check(&psi, t).unwrap() < 1e-9);
        let c = Grid::periodic(0.0, 1.0, 128).unwrap();
        let packet = StateVector::gaussian_packet(c, rng.random_range(0.3..0.7), 0.08, rng.random_range(-20.0..20.0)).unwrap();
        let twisted = Propagator::new(
            HamiltonianOperator::build(c, &HamiltonianSpec::momentum_periodic(rng.random_range(0.0..6.28)).unwrap()).unwrap(),
        )
        .unwrap();
        check("unitarity (spectral)", (twisted.evolve(&packet, t).unwrap().norm() - 1.0).abs() < 1e-10);

        // group law of the limit dynamics
        let cut = rng.random_range(1..dim.min(4));
        let region = Region::new(0.0, cut as f64 - 0.4).unwrap();
        let limit = ZenoLimit::new(&op, region).unwrap();
        let (s1, s2) = (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        let composed = limit.evolve(&limit.evolve(&psi, s1).unwrap(), s2).unwrap();
        check("group law", composed.distance(&limit.evolve(&psi, s1 + s2).unwrap()).unwrap() < 1e-9);

        // projection idempotence
        let b = Grid::periodic(-2.0, 2.0, 256).unwrap();
        let a0 = rng.random_range(-1.9..0.0);
        let r = Region::new(a0, (a0 + rng.random_range(0.1..1.8f64)).min(2.0)).unwrap();
        let wide = StateVector::gaussian_packet(b, rng.random_range(-1.5..1.5), 0.2, rng.random_range(-10.0..10.0)).unwrap();
        let once = wide.project(&r).unwrap();
        check("projection idempotence", once.project(&r).unwrap() == once && once.norm() <= wide.norm() + 1e-15);

        // monotone survival traces
        let g512 = Grid::periodic(-2.0, 2.0, 512).unwrap();
        let start = StateVector::gaussian_packet(g512, rng.random_range(0.3..0.7), 0.04, rng.random_range(-30.0..30.0)).unwrap();
        let spec = if rng.random_bool(0.5) { HamiltonianSpec::momentum() } else { HamiltonianSpec::free_line(1.0).unwrap() };
        let plan =
            ZenoPlan::new(&spec, g512, Region::new(0.0, 1.0).unwrap(), start, rng.random_range(0.05..0.5), rng.random_range(1..40))
                .unwrap();
        let trace = zeno_evolve(&plan).unwrap();
        check("trace monotonicity", trace.survival.windows(2).all(|w| w[1] <= w[0] + 1e-12));

        // kernel positivity
        let kg = Grid::periodic(-1.0, 2.0, 150).unwrap();
        let ka = rng.random_range(-0.5..0.3);
        let k = heat_step_kernel(kg, Region::new(ka, ka + 1.0).unwrap(), rng.random_range(0.002..0.05), rng.random_range(0.5..2.0))
            .unwrap();
        let prod = wiener_product(&k, rng.random_range(1..20)).unwrap();
        check("kernel positivity", prod.min_entry() >= 0.0 && (0..kg.len()).all(|i| prod.row_mass(i) <= 1.0 + 1e-9));
    }
    (cases, failures)
}

type Criterion = (u32, &'static str, f64, fn() -> Verdict);

fn main() {
    let started = Instant::now();
    let criteria: [Criterion; 8] = [
        (1, "two-level closed form", 1.0, two_level),
        (2, "finite-dimensional Zeno limit", 10.0, finite_dimensional_limit),
        (3, "free-particle Zeno convergence", 120.0, free_convergence),
        (4, "H = p leak", 60.0, momentum_leak),
        (5, "periodic extension", f64::INFINITY, periodic_extension),
        (6, "spectra", 120.0, spectra),
        (7, "Euclidean convergence", 60.0, euclidean),
        (8, "short-time scaling", f64::INFINITY, short_time_scaling),
    ];
    let mut card = Scorecard::default();
    for (id, title, budget, run) in criteria {
        let t0 = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run));
        let elapsed = t0.elapsed();
        match outcome {
            Ok(v) => {
                let in_time = within_budget(elapsed, budget);
                let detail = if budget.is_finite() { format!("{}; runtime budget {budget} s", v.detail) } else { v.detail };
                card.record(id, title, v.passed && in_time, &detail, elapsed);
            }
            Err(_) => card.record(id, title, false, "panicked", elapsed),
        }
    }
    let t0 = Instant::now();
    let (cases, failures) = property_suites();
    let total = started.elapsed();
    card.record(
        9,
        "property suites",
        failures.is_empty() && within_budget(total, 600.0),
        &format!(
            "{cases} seeded cases over unitarity, group law, projection idempotence, trace monotonicity, kernel positivity: {} failures {:?}; full run {:.1} s (< 600 s)",
            failures.len(),
            failures,
            total.as_secs_f64()
        ),
        t0.elapsed(),
    );
    let failed = card.failures();
    if failed.is_empty() {
        println!("acceptance: all criteria passed");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
