//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Run with `cargo test --test acceptance`.

use std::panic::{catch_unwind, UnwindSafe};
use std::path::Path;
use std::process::Command;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mqshape::espace::{esigma_norm_gaussian, esigma_norm_quadrature, GaussianFunction};
use mqshape::experiment::{run_experiment, ExperimentConfig, ExperimentReport};
use mqshape::interpolant::{max_error_on_lattice, Interpolant};
use mqshape::kernel::KernelParams;
use mqshape::mn::{limit_behavior, minimize_mn, mn_value, LimitAtZero, MnCase, MnStatus};
use mqshape::simplex::regular_simplex;
use mqshape::theory::{
    case3_exponent_identity, degree_range, error_bound_4, error_bound_5, error_bound_6,
    h_norm_bound_case1, h_norm_bound_case2, ln_m_left, ln_m_right, m_breakpoint, rho_delta0,
    scheme_constants, xi_star, SchemeParams, TheoryConstants,
};
use mqshape::Error;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn check(ok: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..hi.ln())).exp()
}

fn constants_table() -> Outcome {
    let table: [(usize, f64, f64, f64); 5] = [
        (2, -1.0, 1.0, 1.0),
        (1, -1.0, 1.0, 1.0),
        (5, -1.0, 5.0 / 3.0, 4.32),
        (10, 1.0, 1.6, 210.0 / 6.5536),
        (1, 5.0, 1.0, 1.0 / 336.0),
    ];
    let mut worst = 0.0f64;
    for (n, beta, rho, d0) in table {
        let r = rho_delta0(n, beta).map_err(|e| e.to_string())?;
        let err = rel(r.rho, rho).max(rel(r.delta0_const, d0));
        check(err <= 1e-12, || {
            format!(
                "(n={n}, beta={beta}): got ({}, {}), want ({rho}, {d0})",
                r.rho, r.delta0_const
            )
        })?;
        worst = worst.max(err);
    }
    let r10 = rho_delta0(10, 1.0).unwrap();
    check((r10.delta0_const - 32.0435).abs() < 1e-4, || {
        format!("Delta0(10, 1) = {}", r10.delta0_const)
    })?;

    let s = scheme_constants(1.0, 1.0).map_err(|e| e.to_string())?;
    let err = rel(s.c_big, 8.0)
        .max(rel(s.delta_max, 1.0 / 24.0))
        .max(rel(s.lambda_prime, (2.0f64 / 3.0).powf(1.0 / 24.0)));
    check(
        err <= 1e-12 && (s.lambda_prime - 0.983247).abs() < 1e-6,
        || format!("scheme constants {s:?}"),
    )?;
    worst = worst.max(err);
    Ok(format!("6 rows, worst relative error {worst:.1e}"))
}

fn xi_and_exponent_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst_root = 0.0f64;
    let mut worst_id = 0.0f64;
    for _ in 0..1000 {
        let n = rng.gen_range(1..=8usize);
        let c = log_uniform(&mut rng, 1e-2, 1e2);
        let sigma = log_uniform(&mut rng, 0.1, 10.0);
        // k = n + beta + 1 >= 0
        let k = rng.gen_range(0.0..(n as f64 + 6.0));
        let xi = xi_star(c, sigma, k);
        let terms = [2.0 * xi * xi / sigma, c * xi, k / 2.0];
        let scale = terms.iter().fold(0.0f64, |m, t| m.max(t.abs()));
        let root = (terms[0] - terms[1] - terms[2]).abs() / scale;
        check(root <= 1e-10, || {
            format!("root residual {root:e} at c={c}, sigma={sigma}, k={k}")
        })?;
        worst_root = worst_root.max(root);

        let beta = loop {
            let b: f64 = rng.gen_range(0.05..9.0);
            if (b / 2.0 - (b / 2.0).round()).abs() > 1e-3 {
                break b;
            }
        };
        let (lhs, rhs) = case3_exponent_identity(c, sigma, n, beta);
        let kk = n as f64 + beta + 1.0;
        let xi = xi_star(c, sigma, kk);
        let scale = (c * xi).max(xi * xi / sigma).max(lhs.abs());
        let id = (lhs - rhs).abs() / scale;
        check(id <= 1e-10, || {
            format!("identity {lhs} vs {rhs} at c={c}, sigma={sigma}, n={n}, beta={beta}")
        })?;
        worst_id = worst_id.max(id);
    }
    let (l1, r1) = case3_exponent_identity(1.0, 1.0, 2, -1.0);
    let (l2, r2) = case3_exponent_identity(2.0, 1.0, 1, 1.0);
    check(
        (l1 - 0.0).abs() <= 1e-12 && (r1 - 0.0).abs() <= 1e-12,
        || format!("hand example 1: ({l1}, {r1}) != 0"),
    )?;
    check(
        (l2 - 0.75).abs() <= 1e-12 && (r2 - 0.75).abs() <= 1e-12,
        || format!("hand example 2: ({l2}, {r2}) != 0.75"),
    )?;
    Ok(format!(
        "1000 tuples: root residual {worst_root:.1e}, identity {worst_id:.1e}; hand examples exact"
    ))
}

fn m_continuity() -> Outcome {
    let mut worst = 0.0f64;
    for sigma in [0.5, 1.0, 2.0, 5.0] {
        let b = m_breakpoint(sigma);
        let (left, right) = (ln_m_left(b, sigma).exp(), ln_m_right(b, sigma).exp());
        let e = 0.25f64.exp();
        let err = rel(left, right).max(rel(left, e)).max(rel(right, e));
        check(err <= 1e-12, || {
            format!("sigma={sigma}: left {left}, right {right}")
        })?;
        worst = worst.max(err);
    }
    Ok(format!("branches meet at e^(1/4), worst {worst:.1e}"))
}

fn random_scheme(rng: &mut ChaCha8Rng, tc: &TheoryConstants) -> SchemeParams {
    let delta = tc.delta_max / rng.gen_range(1.0..10.0);
    let (l, _) = degree_range(tc.c_big, delta).unwrap();
    let (r_lo, r_hi) = tc.diameter_range();
    SchemeParams {
        b0: tc.b0,
        delta,
        l,
        r: rng.gen_range(r_lo..=r_hi),
    }
}

fn composition_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = 0.0f64;
    let mut done = 0;
    while done < 100 {
        let n = rng.gen_range(1..=6usize);
        let beta = -rng.gen_range(0.1..(n as f64 + 1.0));
        if mqshape::theory::check_case1(n, beta).is_err() || mqshape::cpd_order(beta).is_err() {
            continue;
        }
        let b0 = log_uniform(&mut rng, 0.2, 5.0);
        let tc = TheoryConstants::new(n, beta, b0).map_err(|e| e.to_string())?;
        let sp = random_scheme(&mut rng, &tc);
        let c = log_uniform(&mut rng, 0.05, 20.0);
        let sigma = log_uniform(&mut rng, 0.2, 5.0);
        let e_norm = log_uniform(&mut rng, 0.1, 10.0);
        let direct =
            error_bound_5(&tc, &sp, n, beta, c, sigma, e_norm).map_err(|e| e.to_string())?;
        let h = h_norm_bound_case1(n, beta, c, sigma).unwrap() * e_norm;
        let composed = error_bound_4(&tc, &sp, n, beta, c, h).map_err(|e| e.to_string())?;
        let err = rel(direct, composed);
        check(err <= 1e-12, || {
            format!("case 1 at n={n}, beta={beta}, c={c}, sigma={sigma}: {direct} vs {composed}")
        })?;
        worst = worst.max(err);

        let tc1 = TheoryConstants::new(1, -1.0, b0).unwrap();
        let sp1 = random_scheme(&mut rng, &tc1);
        let direct = error_bound_6(&tc1, &sp1, c, sigma, e_norm).map_err(|e| e.to_string())?;
        let h = h_norm_bound_case2(c, sigma).unwrap() * e_norm;
        let composed = error_bound_4(&tc1, &sp1, 1, -1.0, c, h).map_err(|e| e.to_string())?;
        let err = rel(direct, composed);
        check(err <= 1e-12, || {
            format!("case 2 at c={c}, sigma={sigma}: {direct} vs {composed}")
        })?;
        worst = worst.max(err);
        done += 1;
    }
    Ok(format!("100 tuples per identity, worst {worst:.1e}"))
}

fn mn_sanity() -> Outcome {
    for l in 1..=5 {
        let case = MnCase::new(2, -1.0, 1.0, l, 1.0).unwrap();
        let v = mn_value(&case, 1.0).unwrap();
        check((v - 1.0).abs() <= 1e-12, || {
            format!("MN(1) = {v} for l = {l}")
        })?;
    }

    let cases = [
        ("case1", MnCase::new(2, -1.0, 1.0, 2, 1.0).unwrap()),
        ("case2", MnCase::new(1, -1.0, 1.0, 2, 1.0).unwrap()),
        ("case3", MnCase::new(1, 1.0, 1.0, 1, 1.0).unwrap()),
        (
            "case3, 1+beta-n-4l > 0",
            MnCase::new(1, 10.001, 1.0, 1, 1.0).unwrap(),
        ),
    ];
    for (name, case) in &cases {
        let ln = |c: f64| case.ln_mn(c).unwrap();
        let lim = limit_behavior(case);
        let rising_to_zero = ln(1e-6) > ln(1e-3);
        let ok_zero = match lim.at_zero {
            LimitAtZero::PlusInfinity => rising_to_zero && ln(1e-6) > ln(1.0),
            LimitAtZero::Zero => !rising_to_zero && ln(1e-6) < ln(1.0),
            LimitAtZero::FinitePositive => true,
        };
        check(ok_zero, || {
            format!("{name}: direction at 1e-6 disagrees with {:?}", lim.at_zero)
        })?;
        check(
            lim.at_infinity_is_infinite && ln(1e6) > ln(1e3) && ln(1e6) > ln(1.0),
            || format!("{name}: MN does not grow at 1e6"),
        )?;
    }
    check(
        limit_behavior(&cases[3].1).at_zero == LimitAtZero::Zero,
        || "infimum-at-zero case not classified".into(),
    )?;

    let case = MnCase::new(2, -1.0, 1.0, 2, 1.0).unwrap();
    let r = minimize_mn(&case, 1e-3, 1e3).map_err(|e| e.to_string())?;
    check(
        r.status == MnStatus::InteriorMin && r.mn_at_c_star <= 1.0,
        || format!("{r:?}"),
    )?;
    Ok(format!(
        "MN(1)=1 for l=1..5; limits agree for 4 setups; c*={:.6}, MN(c*)={:.6}",
        r.c_star.unwrap(),
        r.mn_at_c_star
    ))
}

fn interpolation_correctness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    // (n, beta, c, l)
    let setups = [
        (1, 1.0, 0.7, 4),
        (1, -3.0, 1.0, 5),
        (2, -1.0, 1.0, 3),
        (2, 1.0, 0.5, 3),
        (2, 3.0, 1.0, 3),
        (3, -1.0, 1.0, 2),
        (3, 1.0, 0.8, 2),
    ];
    let (mut res, mut mom, mut perm_err, mut repro) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for (n, beta, c, l) in setups {
        let centers = regular_simplex(n, 1.0)
            .unwrap()
            .evenly_spaced_points(l)
            .unwrap();
        let kernel = KernelParams::new(n, beta, c).unwrap();
        let values: Vec<f64> = (0..centers.len())
            .map(|_| rng.gen_range(-1.0..1.0))
            .collect();
        let s = Interpolant::fit(&centers, kernel, &values).map_err(|e| e.to_string())?;
        res = res.max(s.interpolation_residual());
        mom = mom.max(s.moment_residual());

        let mut perm: Vec<usize> = (0..centers.len()).collect();
        perm.shuffle(&mut rng);
        let pc = centers.permuted(&perm).unwrap();
        let pv: Vec<f64> = perm.iter().map(|&i| values[i]).collect();
        let ps = Interpolant::fit(&pc, kernel, &pv).map_err(|e| e.to_string())?;
        let probes = centers.simplex.evenly_spaced_points(4 * l).unwrap();
        let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for x in &probes.points {
            perm_err = perm_err.max((s.evaluate(x) - ps.evaluate(x)).abs() / scale);
        }

        if beta == 1.0 {
            let k = 3.7;
            let s = Interpolant::fit(&centers, kernel, &vec![k; centers.len()])
                .map_err(|e| e.to_string())?;
            let e = max_error_on_lattice(&s, |_| k, 4 * l).unwrap() / k;
            repro = repro.max(e);
        }
    }
    check(res <= 1e-8, || format!("interpolation residual {res:e}"))?;
    check(mom <= 1e-8, || format!("moment residual {mom:e}"))?;
    check(repro <= 1e-7, || {
        format!("constant reproduction error {repro:e}")
    })?;
    check(perm_err <= 1e-8, || {
        format!("permutation difference {perm_err:e}")
    })?;
    Ok(format!(
        "7 setups: residual {res:.1e}, moments {mom:.1e}, constants {repro:.1e}, permutation {perm_err:.1e}"
    ))
}

fn bound_holds() -> Outcome {
    let run = |delta: f64, c: f64| -> Result<Option<ExperimentReport>, String> {
        let cfg = ExperimentConfig::gaussian(2, -1.0, 1.0, 1.0, delta, c, 0.25);
        match run_experiment(&cfg) {
            Ok(r) => Ok(Some(r)),
            Err(Error::Conditioning { .. }) => Ok(None),
            Err(e) => Err(e.to_string()),
        }
    };
    let mut lines = Vec::new();
    let mut compared = 0;
    for c in [0.5, 1.0, 2.0] {
        let coarse =
            run(1.0 / 48.0, c)?.ok_or_else(|| format!("c={c}, delta=1/48: solve failed"))?;
        check(coarse.verifiable(), || {
            format!(
                "c={c}, delta=1/48: condition estimate {:e}",
                coarse.cond_estimate
            )
        })?;
        check(coarse.bound_holds(), || {
            format!(
                "c={c}: error {:e} > bound {:e}",
                coarse.max_error, coarse.bound
            )
        })?;
        let fine = run(1.0 / 96.0, c)?;
        match fine.filter(|r| r.verifiable()) {
            Some(f) => {
                check(f.bound_holds(), || {
                    format!(
                        "c={c}, delta=1/96: error {:e} > bound {:e}",
                        f.max_error, f.bound
                    )
                })?;
                check(f.max_error <= coarse.max_error, || {
                    format!(
                        "c={c}: halving delta raised the error {:e} -> {:e}",
                        coarse.max_error, f.max_error
                    )
                })?;
                compared += 1;
                lines.push(format!(
                    "c={c}: ratio {:.1e}, error {:.1e}->{:.1e}",
                    coarse.ratio, coarse.max_error, f.max_error
                ));
            }
            None => lines.push(format!(
                "c={c}: ratio {:.1e}, delta/2 ill-conditioned",
                coarse.ratio
            )),
        }
    }
    check(compared > 0, || "no well-conditioned halving pair".into())?;
    Ok(lines.join("; "))
}

fn esigma_oracle() -> Outcome {
    let mut worst = 0.0f64;
    for a in [0.05, 0.1, 0.2] {
        for sigma in [1.0, 2.0] {
            for n in 1..=3 {
                let g = GaussianFunction::new(a, n).unwrap();
                let closed = esigma_norm_gaussian(&g, sigma).map_err(|e| e.to_string())?;
                let quad = esigma_norm_quadrature(|r| g.fourier_sq(r), sigma, n)
                    .map_err(|e| e.to_string())?;
                let err = rel(quad, closed);
                check(err <= 1e-6, || {
                    format!("a={a}, sigma={sigma}, n={n}: {quad} vs {closed}")
                })?;
                worst = worst.max(err);
            }
        }
    }
    Ok(format!("18 grid points, worst {worst:.1e}"))
}

fn cli_output(args: &[&str], out: &Path) -> Result<Vec<u8>, String> {
    let status = Command::new(env!("CARGO_BIN_EXE_mqshape"))
        .args(args)
        .arg("--out")
        .arg(out)
        .status()
        .map_err(|e| e.to_string())?;
    check(status.success(), || {
        format!("{args:?} exited with {status}")
    })?;
    std::fs::read(out).map_err(|e| e.to_string())
}

fn well_formed_curve(text: &str, points: usize) -> Result<(), String> {
    check(!text.contains('\r'), || "CR line ending".into())?;
    let lines: Vec<&str> = text.lines().collect();
    check(lines.len() == points + 2, || {
        format!("{} lines", lines.len())
    })?;
    check(lines[0].starts_with("# mqshape "), || {
        "missing metadata line".into()
    })?;
    check(lines[1] == "c,mn", || format!("header {:?}", lines[1]))?;
    let mut prev = 0.0;
    for row in &lines[2..] {
        let f: Vec<f64> = row
            .split(',')
            .map(|s| s.parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| format!("row {row:?}: {e}"))?;
        check(f.len() == 2 && f[0] > prev && f[1] >= 0.0, || {
            format!("row {row:?}")
        })?;
        prev = f[0];
    }
    Ok(())
}

fn cli_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let fig = ["--sigma", "1", "--b0", "1", "--delta", "0.02"];
    let runs: Vec<(&str, Vec<&str>)> = vec![
        (
            "constants",
            vec!["constants", "--n", "2", "--beta", "-1", "--b0", "1"],
        ),
        (
            "figure n=2 beta=-1",
            [&["mn-curve", "--n", "2", "--beta", "-1"][..], &fig].concat(),
        ),
        (
            "figure n=1 beta=-1",
            [&["mn-curve", "--n", "1", "--beta", "-1"][..], &fig].concat(),
        ),
        (
            "figure n=1 beta=1",
            [&["mn-curve", "--n", "1", "--beta", "1"][..], &fig].concat(),
        ),
        (
            "optimal-c",
            vec!["optimal-c", "--n", "2", "--beta", "-1", "--l", "2"],
        ),
        (
            "verify single",
            vec![
                "verify", "--n", "2", "--beta", "-1", "--delta", "0.0208", "--c", "1",
            ],
        ),
        (
            "verify grid",
            vec![
                "verify", "--n", "2", "--beta", "-1", "--delta", "0.0208", "--c-min", "0.5",
                "--c-max", "2", "--points", "4",
            ],
        ),
    ];
    for (i, (name, args)) in runs.iter().enumerate() {
        let first = cli_output(args, &dir.path().join(format!("{i}a")))?;
        let second = cli_output(args, &dir.path().join(format!("{i}b")))?;
        check(first == second, || format!("{name}: outputs differ"))?;
        if name.starts_with("figure") {
            let text = String::from_utf8(first).map_err(|e| e.to_string())?;
            well_formed_curve(&text, 201).map_err(|e| format!("{name}: {e}"))?;
        }
    }
    Ok(format!(
        "{} invocations byte-identical; 3 figure curves well-formed",
        runs.len()
    ))
}

fn guarded<F: FnOnce() -> Outcome + UnwindSafe>(f: F) -> Outcome {
    catch_unwind(f).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        Err(format!("panicked: {msg}"))
    })
}

fn main() {
    std::panic::set_hook(Box::new(|_| {}));
    let criteria: [Criterion; 9] = [
        ("constants table", constants_table),
        ("xi* root and exponent identity", xi_and_exponent_identity),
        ("M(c) branch continuity", m_continuity),
        ("bound composition identities", composition_identities),
        ("MN sanity", mn_sanity),
        ("interpolation correctness", interpolation_correctness),
        ("bound holds", bound_holds),
        ("E_sigma norm oracle", esigma_oracle),
        ("CLI determinism", cli_determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match guarded(f) {
            Ok(detail) => println!("PASS {}. {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {}. {name}: {why}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
