use std::path::Path;

use serde::Serialize;
use sobolev_core::expansion::{
    fourier_coefficients, multiplier_transform, partial_sum, ExpansionCoefficients,
};
use sobolev_core::gegenbauer::{make_space, GegenbauerSobolevParams};
use sobolev_core::multiplier::{
    builtin_multiplier, check_log_decay, check_quasiconvex_with, BuiltinMultiplier,
};
use sobolev_core::report::{csv, fmt_f64, HypothesisReport, Verdict};
use sobolev_core::sobolev::{
    build_pi_polynomial, compute_orthonormal_basis_with, reconstruction_residual,
    recurrence_coefficients, BasisOptions, SobolevBasis,
};
use sobolev_core::verification::{
    check_absolute_continuity, check_derivative_sums, check_integrability,
    check_recurrence_summability, convergence_probe, estimate_majorant_on_region,
    estimate_majorant_on_rule, theorem2_ratio, uniform_convergence_probe, wp_norm, Domain,
    DEFAULT_GRID,
};

use crate::config::Experiment;
use crate::error::CliError;

/// Length of the multiplier sequence examined by the quasiconvexity and
/// logarithmic-decay checks.
const MULTIPLIER_HORIZON: usize = 1_000_000;

fn write(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(name), contents)?;
    Ok(())
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn build_basis(e: &Experiment) -> Result<SobolevBasis, CliError> {
    Ok(compute_orthonormal_basis_with(
        &e.space,
        e.nmax,
        BasisOptions::default(),
    )?)
}

#[derive(Serialize)]
struct BasisSummary {
    nmax: usize,
    orthonormality_residual: f64,
    ortho_tol: f64,
    band_width: usize,
    reconstruction_residual: f64,
    recon_tol: f64,
    warnings: Vec<String>,
}

pub fn basis(e: &Experiment) -> Result<Verdict, CliError> {
    let basis = build_basis(e)?;
    let pi = build_pi_polynomial(&e.space)?;
    let band = recurrence_coefficients(&basis, &pi, &e.space, e.nmax)?;

    let mut rows = Vec::new();
    for n in 0..=e.nmax {
        for (j, c) in basis.connection_row(n).iter().enumerate() {
            rows.push(vec![n.to_string(), j.to_string(), fmt_f64(*c)]);
        }
    }
    write(&e.out, "connection.csv", &csv(&["n", "j", "c_nj"], &rows))?;

    let mut rows = Vec::new();
    for n in 0..=e.nmax {
        for j in 0..=band.width().min(n) {
            rows.push(vec![n.to_string(), j.to_string(), fmt_f64(band.get(n, j))]);
        }
    }
    write(&e.out, "band.csv", &csv(&["n", "j", "d_nj"], &rows))?;

    let grid: Vec<f64> = (0..=200).map(|i| -1.0 + 0.01 * i as f64).collect();
    let mut recon: f64 = 0.0;
    for n in 0..=e.nmax.saturating_sub(band.width()) {
        let (res, scale) = reconstruction_residual(&basis, &pi, &band, n, &grid);
        recon = recon.max(res / scale.max(f64::MIN_POSITIVE));
    }
    let options = basis.options();
    let summary = BasisSummary {
        nmax: e.nmax,
        orthonormality_residual: basis.orthonormality_residual(),
        ortho_tol: options.ortho_tol,
        band_width: band.width(),
        reconstruction_residual: recon,
        recon_tol: options.recon_tol,
        warnings: e.warnings.clone(),
    };
    write(&e.out, "residual.json", &to_json(&summary))?;
    println!(
        "basis nmax={} orthonormality_residual={} reconstruction_residual={}",
        e.nmax,
        fmt_f64(summary.orthonormality_residual),
        fmt_f64(recon)
    );
    if !(recon <= options.recon_tol) {
        return Err(CliError::Numerical(format!(
            "reconstruction residual {recon:e} exceeds {:e}",
            options.recon_tol
        )));
    }
    Ok(Verdict::Passes)
}

#[derive(Serialize)]
struct ExpansionSummary<'a> {
    function: &'a str,
    multiplier: &'a str,
    multiplier_rule: &'a str,
    nmax: usize,
    quadrature_points: usize,
    quadrature_exactness: usize,
    error_estimate: f64,
    schedule: &'a [usize],
    warnings: &'a [String],
}

fn sums_table(
    e: &Experiment,
    mut value: impl FnMut(usize, f64) -> Result<f64, CliError>,
) -> Result<String, CliError> {
    for &x in &e.points {
        if !(-1.0..=1.0).contains(&x) {
            return Err(CliError::Config(format!("point {x} outside [-1, 1]")));
        }
    }
    let mut header = vec!["x".to_string()];
    header.extend(e.schedule.iter().map(|n| format!("n={n}")));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows = e
        .points
        .iter()
        .map(|&x| {
            let mut row = vec![fmt_f64(x)];
            for &n in &e.schedule {
                row.push(fmt_f64(value(n, x)?));
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(csv(&header, &rows))
}

fn summary<'a>(
    e: &'a Experiment,
    c: &ExpansionCoefficients,
    phi_name: &'a str,
    rule: &'a str,
) -> ExpansionSummary<'a> {
    ExpansionSummary {
        function: e.function.name(),
        multiplier: phi_name,
        multiplier_rule: rule,
        nmax: e.nmax,
        quadrature_points: c.quadrature_points,
        quadrature_exactness: c.quadrature_exactness,
        error_estimate: c.error_estimate,
        schedule: &e.schedule,
        warnings: &e.warnings,
    }
}

pub fn expand(e: &Experiment) -> Result<Verdict, CliError> {
    let basis = build_basis(e)?;
    let c = fourier_coefficients(&e.function, &basis, e.nmax)?;
    let ones = builtin_multiplier(BuiltinMultiplier::Ones)?;
    write(&e.out, "coefficients.csv", &c.to_csv(&ones)?)?;
    let table = sums_table(e, |n, x| Ok(partial_sum(&c, &basis, n, x)?))?;
    write(&e.out, "partial_sums.csv", &table)?;
    write(
        &e.out,
        "expansion.json",
        &to_json(&summary(e, &c, ones.name(), ones.rule())),
    )?;
    println!(
        "expand function={} nmax={} error_estimate={}",
        e.function.name(),
        e.nmax,
        fmt_f64(c.error_estimate)
    );
    Ok(Verdict::Passes)
}

pub fn transform(e: &Experiment) -> Result<Verdict, CliError> {
    let basis = build_basis(e)?;
    let c = fourier_coefficients(&e.function, &basis, e.nmax)?;
    let phi = &e.multiplier;
    write(&e.out, "coefficients.csv", &c.to_csv(phi)?)?;
    let table = sums_table(e, |n, x| Ok(multiplier_transform(&c, phi, &basis, x, n)?))?;
    write(&e.out, "transform.csv", &table)?;
    write(
        &e.out,
        "transform.json",
        &to_json(&summary(e, &c, phi.name(), phi.rule())),
    )?;
    println!(
        "transform function={} multiplier={} nmax={}",
        e.function.name(),
        phi.name(),
        e.nmax
    );
    Ok(Verdict::Passes)
}

pub fn verify(e: &Experiment) -> Result<Verdict, CliError> {
    let basis = build_basis(e)?;
    let tol = &e.tolerances;
    let stab = tol.stabilization_tol;
    let space = &e.space;
    let mut reports: Vec<HypothesisReport> = Vec::new();

    reports
        .push(estimate_majorant_on_region(&basis, &e.region, DEFAULT_GRID, e.nmax)?.report(stab));

    let pi = build_pi_polynomial(space)?;
    let band = recurrence_coefficients(&basis, &pi, space, e.nmax)?;
    let smax = e.nmax.checked_sub(2 * band.width()).ok_or_else(|| {
        CliError::Config(format!(
            "nmax = {} too small for band width {}",
            e.nmax,
            band.width()
        ))
    })?;
    reports.push(check_recurrence_summability(&band, smax, stab)?);
    reports.push(check_absolute_continuity(space));
    reports.push(check_derivative_sums(&basis, e.nmax, stab)?);

    let on_rule = estimate_majorant_on_rule(&basis, e.nmax)?;
    let q = (e.p > 1.0).then(|| e.p / (e.p - 1.0));
    reports.push(check_integrability(
        &on_rule,
        Some(&e.function),
        e.p,
        None,
        stab,
    )?);
    reports.push(check_integrability(&on_rule, None, e.p, q, stab)?);

    let phi = &e.multiplier;
    reports.push(check_quasiconvex_with(phi, MULTIPLIER_HORIZON, tol.tail_tol)?.to_report());
    reports.push(check_log_decay(phi, MULTIPLIER_HORIZON)?.to_report());

    if e.schedule.len() >= 2 {
        let (admissible, dropped): (Vec<f64>, Vec<f64>) = e
            .points
            .iter()
            .partition(|&&x| space.in_admissible_set(x) && e.function.is_continuous_at(x));
        if !admissible.is_empty() {
            let mut r = convergence_probe(
                &e.function,
                phi,
                &basis,
                &admissible,
                &e.schedule,
                tol.cauchy_tol,
            )?
            .to_report();
            if !dropped.is_empty() {
                r = r.with_note(format!(
                    "points skipped (outside the set or discontinuities): {dropped:?}"
                ));
            }
            reports.push(r);
        }
        match uniform_convergence_probe(
            &e.function,
            phi,
            &basis,
            &e.region,
            DEFAULT_GRID,
            &e.schedule,
            tol.cauchy_tol,
        ) {
            Ok(r) => reports.push(r.to_report()),
            Err(sobolev_core::error::Error::DiscontinuityPoint { point, .. }) => reports.push(
                HypothesisReport::new("thm1ii", Verdict::Inconclusive, "uniform probe skipped")
                    .with_note(format!(
                        "{} is discontinuous at {point} inside the region",
                        e.function.name()
                    )),
            ),
            Err(err) => return Err(err.into()),
        }
        if e.p > 1.0 {
            let b = theorem2_ratio(
                std::slice::from_ref(&e.function),
                phi,
                &basis,
                &e.region,
                e.p,
                &e.schedule,
                tol.bound_growth_tol,
            )?;
            reports.push(b.to_report());
        }
    }

    let mut verdict = Verdict::Passes;
    for (i, r) in reports.iter().enumerate() {
        verdict = verdict.combine(r.verdict);
        let mut rows = Vec::new();
        for (name, trace) in &r.traces {
            for (k, v) in trace.iter().enumerate() {
                rows.push(vec![format!("\"{name}\""), k.to_string(), fmt_f64(*v)]);
            }
        }
        write(
            &e.out,
            &format!("{i:02}_{}.csv", r.condition),
            &csv(&["trace", "index", "value"], &rows),
        )?;
        println!("{:<12} {}", r.condition, r.verdict);
    }
    write(&e.out, "reports.json", &to_json(&reports))?;
    Ok(verdict)
}

pub fn norm(e: &Experiment, on_region: bool) -> Result<Verdict, CliError> {
    let rule = e
        .space
        .measure
        .integration_rule(sobolev_core::sobolev::required_exactness(&e.space, e.nmax))?;
    let domain = if on_region {
        Domain::Compact(e.region)
    } else {
        Domain::Full
    };
    let v = wp_norm(&e.function, &e.space, e.p, domain, &rule)?;
    println!("{}", fmt_f64(v));
    Ok(Verdict::Passes)
}

pub fn preset(params: &GegenbauerSobolevParams, out: &Path) -> Result<Verdict, CliError> {
    let space = make_space(params)?;
    for w in params.warnings() {
        eprintln!("warning: {w}");
    }
    write(out, "space.json", &to_json(&space))?;
    println!("{}", out.join("space.json").display());
    Ok(Verdict::Passes)
}
