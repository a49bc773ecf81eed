//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Registered with `harness = false`.

use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use sobolev_core::expansion::{fourier_coefficients, partial_sum, SobolevSeries};
use sobolev_core::function::TargetFunction;
use sobolev_core::gegenbauer::{make_space, remark_compliance_suite, GegenbauerSobolevParams};
use sobolev_core::measure::{gauss_rule, MeasureSpec};
use sobolev_core::multiplier::{
    builtin_multiplier, check_quasiconvex, BuiltinMultiplier, MultiplierSequence,
};
use sobolev_core::poly::Poly;
use sobolev_core::report::Verdict;
use sobolev_core::sobolev::{
    build_pi_polynomial, compute_orthonormal_basis, reconstruction_residual,
    recurrence_coefficients, Differentiable, MassPoint, SobolevBasis, SobolevSpaceSpec,
};
use sobolev_core::verification::{theorem2_ratio, uniform_convergence_probe, Region, DEFAULT_GRID};

type Outcome = Result<String, String>;
type Criterion = fn() -> Outcome;

fn endpoint_space() -> SobolevSpaceSpec {
    make_space(&GegenbauerSobolevParams::new(1.0, 1.0, 1.0).unwrap()).unwrap()
}

fn sci(v: &[f64]) -> String {
    v.iter()
        .map(|x| format!("{x:.3e}"))
        .collect::<Vec<_>>()
        .join(", ")
}

fn pass_if(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// Gram matrix from a rule with more nodes than the basis uses, plus the
/// discrete terms evaluated pointwise.
fn independent_gram_error(basis: &SobolevBasis, space: &SobolevSpaceSpec) -> f64 {
    let nmax = basis.nmax();
    let rule = gauss_rule(&space.measure, nmax + 20).unwrap();
    let values: Vec<Vec<f64>> = rule.nodes.iter().map(|&x| basis.eval_all(x, 0)).collect();
    let discrete: Vec<(f64, Vec<f64>)> = space
        .masses
        .iter()
        .flat_map(|mp| {
            mp.weights
                .iter()
                .enumerate()
                .map(|(i, &m)| (m, basis.eval_all(mp.location, i)))
        })
        .collect();
    let mut worst: f64 = 0.0;
    for a in 0..=nmax {
        for b in 0..=a {
            let mut g: f64 = rule
                .weights
                .iter()
                .zip(&values)
                .map(|(w, q)| w * q[a] * q[b])
                .sum();
            for (m, d) in &discrete {
                g += m * d[a] * d[b];
            }
            worst = worst.max((g - if a == b { 1.0 } else { 0.0 }).abs());
        }
    }
    worst
}

fn orthonormality() -> Outcome {
    let space = endpoint_space();
    let start = Instant::now();
    let basis = compute_orthonormal_basis(&space, 100).map_err(|e| e.to_string())?;
    let worst = independent_gram_error(&basis, &space);
    let elapsed = start.elapsed();
    pass_if(
        worst <= 1e-8 && elapsed <= Duration::from_secs(30),
        format!(
            "max |G - I| = {worst:.3e} (internal {:.3e}), {elapsed:.2?}",
            basis.orthonormality_residual()
        ),
    )
}

fn recurrence_reconstruction() -> Outcome {
    let space = endpoint_space();
    let basis = compute_orthonormal_basis(&space, 100).map_err(|e| e.to_string())?;
    let pi = build_pi_polynomial(&space).map_err(|e| e.to_string())?;
    let band = recurrence_coefficients(&basis, &pi, &space, 85).map_err(|e| e.to_string())?;
    let grid: Vec<f64> = (0..=200).map(|i| -1.0 + 0.01 * i as f64).collect();
    let mut recon: f64 = 0.0;
    for n in 0..=80 {
        let (res, scale) = reconstruction_residual(&basis, &pi, &band, n, &grid);
        recon = recon.max(res / scale);
    }

    // dense ⟨π q̂_a, q̂_b⟩ by quadrature and the Leibniz rule at the masses
    let size = 80;
    let rule = gauss_rule(&space.measure, 120).unwrap();
    let values: Vec<Vec<f64>> = rule.nodes.iter().map(|&x| basis.eval_all(x, 0)).collect();
    let pis: Vec<f64> = rule.nodes.iter().map(|&x| pi.eval(x)).collect();
    let mut dense = vec![vec![0.0; size + 1]; size + 1];
    for (a, row) in dense.iter_mut().enumerate() {
        for (b, entry) in row.iter_mut().enumerate() {
            let mut s = 0.0;
            for ((w, q), p) in rule.weights.iter().zip(&values).zip(&pis) {
                s += w * p * q[a] * q[b];
            }
            for mp in &space.masses {
                for (i, &m) in mp.weights.iter().enumerate() {
                    let mut d = 0.0;
                    let mut binom = 1.0;
                    for r in 0..=i {
                        d += binom
                            * pi.eval_derivative(mp.location, r)
                            * basis.eval(a, mp.location, i - r).unwrap();
                        binom = binom * (i - r) as f64 / (r + 1) as f64;
                    }
                    s += m * d * basis.eval(b, mp.location, i).unwrap();
                }
            }
            *entry = s;
        }
    }
    let width = band.width();
    let mut asym: f64 = 0.0;
    let mut outside: f64 = 0.0;
    let mut mismatch: f64 = 0.0;
    for a in 0..=size {
        for b in 0..=size {
            asym = asym.max((dense[a][b] - dense[b][a]).abs());
            if a.abs_diff(b) > width {
                outside = outside.max(dense[a][b].abs());
            } else {
                mismatch = mismatch.max((dense[a][b] - band.operator_entry(a, b)).abs());
            }
        }
    }
    pass_if(
        recon <= 1e-8 && asym <= 1e-9 && outside <= 1e-10 && width == 5 && mismatch <= 1e-9,
        format!(
            "width {width}, relative residual {recon:.3e}, asymmetry {asym:.3e}, beyond band {outside:.3e}, band vs dense {mismatch:.3e}"
        ),
    )
}

fn degeneration() -> Outcome {
    let mut worst_connection: f64 = 0.0;
    for alpha in [0.0, 1.0, 2.5] {
        let space = make_space(&GegenbauerSobolevParams::new(alpha, 0.0, 0.0).unwrap()).unwrap();
        let basis = compute_orthonormal_basis(&space, 100).map_err(|e| e.to_string())?;
        for n in 0..=100 {
            for (j, c) in basis.connection_row(n).iter().enumerate() {
                worst_connection = worst_connection.max((c - if n == j { 1.0 } else { 0.0 }).abs());
            }
        }
    }
    let space = SobolevSpaceSpec::plain(MeasureSpec::Legendre);
    let basis = compute_orthonormal_basis(&space, 100).map_err(|e| e.to_string())?;
    let pi = build_pi_polynomial(&space).map_err(|e| e.to_string())?;
    let band = recurrence_coefficients(&basis, &pi, &space, 100).map_err(|e| e.to_string())?;
    let worst_band = (1..=100)
        .map(|n| {
            let n = n as f64;
            (band.get(n as usize, 1) - n / (4.0 * n * n - 1.0).sqrt()).abs()
        })
        .fold(0.0, f64::max);
    pass_if(
        worst_connection <= 1e-10 && worst_band <= 1e-10,
        format!("connection vs identity {worst_connection:.3e}, legendre d_n1 {worst_band:.3e}"),
    )
}

fn anchor() -> Outcome {
    // ⟨1,1⟩ = 1 + 1 + 1 = 3, ⟨1,x⟩ = 0 - 1 + 1 = 0, ⟨x,x⟩ = 1/3 + 1 + 1 = 7/3
    let space = SobolevSpaceSpec::new(
        MeasureSpec::Legendre,
        vec![
            MassPoint::new(-1.0, vec![1.0]),
            MassPoint::new(1.0, vec![1.0]),
        ],
    )
    .unwrap();
    let basis = compute_orthonormal_basis(&space, 4).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for i in 0..=20 {
        let x = -1.0 + 0.1 * i as f64;
        worst = worst.max((basis.eval(0, x, 0).unwrap() - 1.0 / 3f64.sqrt()).abs());
        worst = worst.max((basis.eval(1, x, 0).unwrap() - (3.0f64 / 7.0).sqrt() * x).abs());
    }
    pass_if(worst <= 1e-12, format!("max deviation {worst:.3e}"))
}

fn quasiconvexity() -> Outcome {
    let k = 1_000_000;
    let harmonic =
        MultiplierSequence::from_rule("harmonic", "phi_k = 1/(k+1)", |k| 1.0 / (k + 1) as f64)
            .unwrap();
    let r = check_quasiconvex(&harmonic, k).map_err(|e| e.to_string())?;
    let extrapolated = r.extrapolated_total.unwrap_or(f64::NAN);
    let total_ok = (extrapolated - 1.0).abs() <= 1e-6 && r.verdict == Verdict::Passes;

    let mut worst_identity = r.identity_residual;
    for which in [
        BuiltinMultiplier::Ones,
        BuiltinMultiplier::Fejer { n: 16 },
        BuiltinMultiplier::Log,
        BuiltinMultiplier::Power { beta: 0.5 },
        BuiltinMultiplier::Abel { r: 0.9 },
    ] {
        let phi = builtin_multiplier(which).unwrap();
        let q = check_quasiconvex(&phi, k).map_err(|e| e.to_string())?;
        worst_identity = worst_identity.max(q.identity_residual);
    }
    let alternating = MultiplierSequence::from_rule("alternating", "phi_k = (-1)^k", |k| {
        if k % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    })
    .unwrap();
    let alt = check_quasiconvex(&alternating, k).map_err(|e| e.to_string())?;
    pass_if(
        total_ok && worst_identity <= 1e-12 && alt.verdict == Verdict::Fails,
        format!(
            "harmonic extrapolated {extrapolated:.12} (partial {:.12}, {}), identity {worst_identity:.3e}, alternating {}",
            r.partial_total, r.verdict, alt.verdict
        ),
    )
}

fn projection() -> Outcome {
    let spaces = [
        ("gegenbauer endpoints", endpoint_space()),
        (
            "legendre+unit masses",
            SobolevSpaceSpec::new(
                MeasureSpec::Legendre,
                vec![
                    MassPoint::new(-1.0, vec![1.0]),
                    MassPoint::new(1.0, vec![1.0]),
                ],
            )
            .unwrap(),
        ),
        (
            "gegenbauer 2.5+interior",
            SobolevSpaceSpec::new(
                MeasureSpec::gegenbauer(2.5),
                vec![MassPoint::new(0.3, vec![0.5, 0.0, 2.0])],
            )
            .unwrap(),
        ),
        (
            "plain legendre",
            SobolevSpaceSpec::plain(MeasureSpec::Legendre),
        ),
    ];
    let mut functions = vec![
        TargetFunction::parse("one").unwrap(),
        TargetFunction::parse("x").unwrap(),
    ];
    for degree in [2usize, 5, 9, 14, 20] {
        let coeffs: Vec<String> = (0..=degree)
            .map(|k| format!("{}", if k % 3 == 0 { 1.0 } else { -0.5 } / (k + 1) as f64))
            .collect();
        functions.push(TargetFunction::parse(&format!("poly:[{}]", coeffs.join(","))).unwrap());
    }
    let grid: Vec<f64> = (0..=20).map(|i| -1.0 + 0.1 * i as f64).collect();
    let nmax = 32;
    let mut worst_truncated: f64 = 0.0;
    let mut worst_raw: f64 = 0.0;
    for (_, space) in &spaces {
        let basis = compute_orthonormal_basis(space, nmax).map_err(|e| e.to_string())?;
        for f in &functions {
            let c = fourier_coefficients(f, &basis, nmax).map_err(|e| e.to_string())?;
            let degree = f.polynomial_degree().unwrap();
            for n in degree..=nmax {
                let raw = SobolevSeries::new(&basis, "raw", c.coeffs[..=n].to_vec()).unwrap();
                for &x in &grid {
                    let want = f.value(x);
                    worst_truncated =
                        worst_truncated.max((partial_sum(&c, &basis, n, x).unwrap() - want).abs());
                    worst_raw = worst_raw.max((raw.value(x) - want).abs());
                }
            }
        }
    }
    pass_if(
        worst_truncated <= 1e-9 && worst_raw <= 1e-9,
        format!(
            "{} spaces x {} functions, max |S_n f - f| = {worst_truncated:.3e} (untruncated sums {worst_raw:.3e})",
            spaces.len(),
            functions.len()
        ),
    )
}

fn convergence_criterion() -> Outcome {
    let start = Instant::now();
    let basis = compute_orthonormal_basis(&endpoint_space(), 256).map_err(|e| e.to_string())?;
    let f = TargetFunction::parse("runge").unwrap();
    let phi = builtin_multiplier(BuiltinMultiplier::Log).unwrap();
    let r = uniform_convergence_probe(
        &f,
        &phi,
        &basis,
        &Region::new(0.1).unwrap(),
        DEFAULT_GRID,
        &[16, 32, 64, 128, 256],
        1e-3,
    )
    .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let decreasing = r.increments.windows(2).all(|w| w[1] < w[0]);
    let last = *r.increments.last().unwrap();
    pass_if(
        decreasing && last <= 1e-3 && elapsed <= Duration::from_secs(120),
        format!("increments [{}], {elapsed:.2?}", sci(&r.increments)),
    )
}

fn bound_criterion() -> Outcome {
    let basis = compute_orthonormal_basis(&endpoint_space(), 256).map_err(|e| e.to_string())?;
    let suite: Vec<TargetFunction> = ["runge", "abs3", "exp"]
        .iter()
        .map(|n| TargetFunction::parse(n).unwrap())
        .collect();
    let phi = builtin_multiplier(BuiltinMultiplier::Log).unwrap();
    let schedule: Vec<usize> = (0..=256).collect();
    let r = theorem2_ratio(
        &suite,
        &phi,
        &basis,
        &Region::new(0.1).unwrap(),
        2.0,
        &schedule,
        0.1,
    )
    .map_err(|e| e.to_string())?;
    let (early, late) = (r.max_ratio_up_to(32), r.max_ratio_up_to(256));
    pass_if(
        late <= 1.1 * early,
        format!("max R up to 32 = {early:.6}, up to 256 = {late:.6}"),
    )
}

fn compliance() -> Outcome {
    let bundle =
        remark_compliance_suite(&GegenbauerSobolevParams::new(1.0, 1.0, 1.0).unwrap(), 128)
            .map_err(|e| e.to_string())?;
    let verdicts: Vec<String> = bundle
        .reports
        .iter()
        .map(|r| format!("{} {}", r.condition, r.verdict))
        .collect();
    pass_if(!bundle.any_fails(), verdicts.join(", "))
}

fn parseval() -> Outcome {
    let space = endpoint_space();
    let basis = compute_orthonormal_basis(&space, 64).map_err(|e| e.to_string())?;
    let rule = gauss_rule(&space.measure, 80).unwrap();
    let mut worst: f64 = 0.0;
    for degree in [0usize, 1, 7, 20, 33, 50] {
        let f = Poly::new(
            (0..=degree)
                .map(|k| ((k * 7 + 3) % 11) as f64 / 11.0 - 0.4)
                .collect(),
        );
        // ⟨f, f⟩ from the definition on an independent rule
        let mut norm2 = rule.integrate(|x| f.eval(x).powi(2));
        for mp in &space.masses {
            for (i, m) in mp.weights.iter().enumerate() {
                norm2 += m * f.eval_derivative(mp.location, i).powi(2);
            }
        }
        let c = fourier_coefficients(&f, &basis, 64).map_err(|e| e.to_string())?;
        let energy: f64 = c.coeffs.iter().map(|v| v * v).sum();
        worst = worst.max((energy - norm2).abs() / norm2);
    }
    pass_if(
        worst <= 1e-9,
        format!("max relative |Σc² - ⟨f,f⟩| = {worst:.3e}"),
    )
}

fn read_tree(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                std::fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

fn determinism() -> Outcome {
    let dir = tempfile::TempDir::new().map_err(|e| e.to_string())?;
    let cfg = dir.path().join("experiment.json");
    std::fs::write(
        &cfg,
        r#"{"preset": {"alpha": 1, "M": 1, "N": 1}, "nmax": 128, "function": "runge",
            "multiplier": "log", "points": [-1.0, -0.25, 0.5, 1.0]}"#,
    )
    .unwrap();
    let mut trees = Vec::new();
    for run in ["a", "b"] {
        let out = dir.path().join(run);
        let status = Command::new(env!("CARGO_BIN_EXE_sobolev"))
            .args([
                "verify",
                "--config",
                cfg.to_str().unwrap(),
                "--out",
                out.to_str().unwrap(),
            ])
            .output()
            .map_err(|e| e.to_string())?;
        if status.status.code() != Some(0) {
            return Err(format!("verify exited with {:?}", status.status.code()));
        }
        trees.push(read_tree(&out));
    }
    pass_if(
        !trees[0].is_empty() && trees[0] == trees[1],
        format!("{} files compared", trees[0].len()),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, Criterion); 11] = [
        ("orthonormality", orthonormality),
        ("recurrence reconstruction", recurrence_reconstruction),
        ("degeneration to the base family", degeneration),
        ("hand-computed anchor", anchor),
        ("quasiconvexity calculus", quasiconvexity),
        ("projection identity", projection),
        ("pointwise/uniform convergence probe", convergence_criterion),
        ("uniform bound probe", bound_criterion),
        ("compliance suite", compliance),
        ("parseval", parseval),
        ("cli determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
