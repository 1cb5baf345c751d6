//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use soliton_entropy::ansatz::{quadratic_residual, Constants};
use soliton_entropy::numerics::integrate_simpson38;
use soliton_entropy::report::{run_catalog, write_report, OutputFormat, RunReport, SolvedRow, Tolerances};
use soliton_entropy::{CatalogName, Family, NumericsConfig};

const SIGNIFICAND_RTOL: f64 = 5e-6;
const RUNTIME_LIMIT: Duration = Duration::from_secs(10);
const CLOSED_FORM_TOL: f64 = 1e-10;
const ALPHA_END_TOL: f64 = 1e-8;
const SLOPE_TOL: f64 = 1e-6;
const RESIDUAL_TOL: f64 = 1e-10;
const BETA_POINTS: usize = 1501;
const CUBIC_TOL: f64 = 1e-14;
const CONVERGENCE_RATIO: f64 = 8.0;
const STEP_DOUBLING_TOL: f64 = 1e-8;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self { pass, detail: detail.into() }
    }
}

fn solved(report: &RunReport) -> Vec<(&soliton_entropy::report::RowOutcome, &SolvedRow)> {
    report.rows.iter().filter_map(|r| r.solved.as_ref().ok().map(|s| (r, s))).collect()
}

fn catalog_matches(report: &RunReport) -> Outcome {
    let failures: Vec<String> = report
        .rows
        .iter()
        .filter(|r| r.pass() != Some(true))
        .map(|r| match (&r.solved, &r.comparison) {
            (Err(e), _) => format!("{} {}: {e}", r.bundle, r.spec.family),
            (_, Some(c)) => format!(
                "{} {} {}={}: d_const {:.2e} (atol {:.0e}), d_sig {:.2e}",
                r.bundle,
                r.spec.family,
                c.expected.constant_name,
                c.expected.constant_printed,
                c.constant_deviation,
                c.constant_atol,
                c.significand_deviation
            ),
            _ => format!("{} {}: no comparison", r.bundle, r.spec.family),
        })
        .collect();
    let n = report.rows.len();
    let fast = report.elapsed < RUNTIME_LIMIT;
    let pass = n == 29 && failures.is_empty() && fast;
    let mut detail = format!("{}/{n} rows within tolerance in {:.2?}", n - failures.len(), report.elapsed);
    if !fast {
        detail.push_str(&format!(" (limit {RUNTIME_LIMIT:?})"));
    }
    for f in failures {
        detail.push_str(&format!("\n    {f}"));
    }
    Outcome::new(pass, detail)
}

/// Closed-form volume of the `Z2` Einstein metric on the first catalog
/// bundle: `4π² · 2(A R³/3 - q² R / (4A))`.
fn closed_form_volume(report: &RunReport) -> Outcome {
    let Some((_, row)) =
        solved(report).into_iter().find(|(r, _)| r.bundle == "cp1_over_cp1" && r.spec.family == Family::EinsteinZ2)
    else {
        return Outcome::new(false, "Z2 row on cp1_over_cp1 did not solve");
    };
    let Constants::Z2(c) = row.profile.constants() else {
        return Outcome::new(false, "unexpected constants");
    };
    let (a, r, q) = (c.a[0], c.r, -1.0);
    let closed = 4.0 * PI * PI * 2.0 * (a * r.powi(3) / 3.0 - q * q * r / (4.0 * a));
    let quad = row.entropy.breakdown.volume.unwrap_or(f64::NAN);
    let rel = (closed - quad).abs() / closed;
    let significand = closed / (16.0 * PI * PI);
    let sig_rel = (significand - 3.821379).abs() / 3.821379;
    Outcome::new(
        rel <= CLOSED_FORM_TOL && sig_rel <= SIGNIFICAND_RTOL,
        format!("Vol = {closed:.12}, quadrature rel. diff {rel:.2e}, significand {significand:.7} (rel {sig_rel:.2e})"),
    )
}

fn nu_of(report: &RunReport, bundle: CatalogName, family: Family, m: Option<u32>, eps: Option<&[i8]>) -> Option<f64> {
    solved(report)
        .into_iter()
        .find(|(r, _)| {
            r.bundle == bundle.as_str()
                && r.spec.family == family
                && r.spec.m == m.map(f64::from)
                && eps.is_none_or(|e| r.spec.eps.as_ref().map(|x| x.signs()) == Some(e))
        })
        .map(|(_, s)| s.entropy.nu)
}

fn orderings(report: &RunReport) -> Outcome {
    let mut problems = Vec::new();
    let all_neg: [&[i8]; 4] = [&[-1], &[-1], &[-1], &[-1, -1]];

    for (name, neg) in CatalogName::ALL.into_iter().zip(all_neg) {
        let rows: Vec<f64> =
            solved(report).into_iter().filter(|(r, _)| r.bundle == name.as_str()).map(|(_, s)| s.entropy.nu).collect();
        let z2 = nu_of(report, name, Family::EinsteinZ2, None, None);
        match z2 {
            Some(z) if rows.iter().filter(|&&v| v != z).all(|&v| v > z) => {}
            _ => problems.push(format!("{name}: Z2 Einstein is not the minimum")),
        }

        let qe: Option<Vec<f64>> =
            (2..=5).map(|m| nu_of(report, name, Family::QuasiEinstein, Some(m), Some(neg))).collect();
        let krs = nu_of(report, name, Family::Krs, None, None);
        match (qe, krs) {
            (Some(qe), Some(k)) => {
                if !qe.windows(2).all(|w| w[0] > w[1]) {
                    problems.push(format!("{name}: quasi-Einstein entropy not decreasing in m"));
                }
                if !qe.iter().all(|&v| v > k) {
                    problems.push(format!("{name}: quasi-Einstein entropy not above the soliton"));
                }
            }
            _ => problems.push(format!("{name}: missing quasi-Einstein or soliton rows")),
        }
    }

    let t4 = CatalogName::Cp1OverCp1xcp2;
    let mixed: &[i8] = &[1, -1];
    let qe: Option<Vec<f64>> =
        (2..=5).map(|m| nu_of(report, t4, Family::QuasiEinstein, Some(m), Some(mixed))).collect();
    let ww = nu_of(report, t4, Family::EinsteinWw, None, Some(mixed));
    let krs = nu_of(report, t4, Family::Krs, None, None);
    match (qe, ww, krs) {
        (Some(qe), Some(ww), Some(k)) => {
            if !qe.windows(2).all(|w| w[0] < w[1]) {
                problems.push(format!("{t4}: eps=(1,-1) entropy not increasing in m"));
            }
            if !qe.iter().all(|&v| ww < v && v < k) {
                problems.push(format!("{t4}: eps=(1,-1) entropy not strictly between Einstein and soliton"));
            }
        }
        _ => problems.push(format!("{t4}: missing eps=(1,-1) rows")),
    }

    let q1 = CatalogName::Cp1OverCp2Q1;
    let q2 = CatalogName::Cp1OverCp2Q2;
    let mut pairs: Vec<(Family, Option<u32>)> = (2..=5).map(|m| (Family::QuasiEinstein, Some(m))).collect();
    pairs.push((Family::Krs, None));
    pairs.push((Family::EinsteinZ2, None));
    for (family, m) in pairs {
        match (nu_of(report, q1, family, m, None), nu_of(report, q2, family, m, None)) {
            (Some(a), Some(b)) if a > b => {}
            _ => problems.push(format!("{q1} not above {q2} for {family} m={m:?}")),
        }
    }

    let detail = if problems.is_empty() {
        "Z2 minimal, m-trends, soliton bounds and q=-1 over q=-2 all hold".to_string()
    } else {
        problems.join("; ")
    };
    Outcome::new(problems.is_empty(), detail)
}

fn profiles(report: &RunReport) -> Outcome {
    let mut problems = Vec::new();
    let mut checked = 0;
    for (r, s) in solved(report) {
        let label = format!("{} {} m={:?}", r.bundle, r.spec.family, r.spec.m);
        let d = match s.profile.diagnostics() {
            Ok(d) => d,
            Err(e) => {
                problems.push(format!("{label}: {e}"));
                continue;
            }
        };
        let p = &s.profile;
        let s_star = p.s_star();
        let min_beta = (0..BETA_POINTS)
            .flat_map(|i| p.betas(s_star * i as f64 / (BETA_POINTS - 1) as f64))
            .fold(f64::INFINITY, f64::min);
        let quad = match p.constants() {
            Constants::Z2(c) => Some((c.a.clone(), c.e)),
            Constants::Ww(c) => Some((c.a.clone(), c.e_star)),
            Constants::Qe(c) => Some((c.a.clone(), c.e_star)),
            Constants::Krs(_) => None,
        };
        let quad_res = quad.map_or(d.consistency_residual, |(a, e)| {
            a.iter()
                .zip(p.bundle().factors())
                .map(|(&a, f)| quadratic_residual(a, e, f.p, f.q).abs())
                .fold(0.0, f64::max)
        });
        let checks = [
            (d.alpha_start == 0.0, format!("alpha(0) = {:e}", d.alpha_start)),
            (d.alpha_end.abs() <= ALPHA_END_TOL, format!("alpha(s*) = {:e}", d.alpha_end)),
            ((d.slope_start - 2.0).abs() <= SLOPE_TOL, format!("alpha'(0) = {}", d.slope_start)),
            ((d.slope_end + 2.0).abs() <= SLOPE_TOL, format!("alpha'(s*) = {}", d.slope_end)),
            (min_beta > 0.0, format!("min beta = {min_beta:e}")),
            (quad_res <= RESIDUAL_TOL, format!("consistency residual = {quad_res:e}")),
            (p.closing_residual().abs() <= RESIDUAL_TOL, format!("closing residual = {:e}", p.closing_residual())),
        ];
        for (ok, msg) in checks {
            if !ok {
                problems.push(format!("{label}: {msg}"));
            }
        }
        checked += 1;
    }
    let pass = checked == 29 && problems.is_empty();
    let mut detail = format!("{checked}/29 profiles checked, {} violations", problems.len());
    for p in problems {
        detail.push_str(&format!("\n    {p}"));
    }
    Outcome::new(pass, detail)
}

fn numerics(report: &RunReport) -> Outcome {
    let mut problems = Vec::new();

    let cubic = |x: f64| 2.0 * x.powi(3) - 3.0 * x * x + 0.5 * x - 7.0;
    let exact = |x: f64| 0.5 * x.powi(4) - x.powi(3) + 0.25 * x * x - 7.0 * x;
    let cubic_err = (integrate_simpson38(cubic, -1.0, 2.0, 3).unwrap() - (exact(2.0) - exact(-1.0))).abs();
    if cubic_err > CUBIC_TOL {
        problems.push(format!("cubic error {cubic_err:e}"));
    }

    let e_err = |steps| (integrate_simpson38(f64::exp, 0.0, 1.0, steps).unwrap() - (1f64.exp() - 1.0)).abs();
    let ratio = e_err(6) / e_err(12);
    if ratio.is_nan() || ratio < CONVERGENCE_RATIO {
        problems.push(format!("step-halving error ratio {ratio:.2}"));
    }

    let fine = run_catalog(&CatalogName::ALL, &report.numerics.with_steps(3000), &report.tolerances);
    let mut worst = 0.0f64;
    for (a, b) in report.rows.iter().zip(&fine.rows) {
        match (&a.solved, &b.solved) {
            (Ok(x), Ok(y)) => worst = worst.max((x.entropy.nu - y.entropy.nu).abs()),
            _ => problems.push(format!("{} {} failed at one step count", a.bundle, a.spec.family)),
        }
    }
    if worst > STEP_DOUBLING_TOL {
        problems.push(format!("|nu(1500) - nu(3000)| = {worst:e}"));
    }

    let render = |r: &RunReport| {
        let mut buf = Vec::new();
        write_report(r, OutputFormat::Csv, &mut buf).unwrap();
        buf
    };
    let again = run_catalog(&CatalogName::ALL, &report.numerics, &report.tolerances);
    let identical = render(report) == render(&again);
    if !identical {
        problems.push("repeated reports differ".into());
    }

    let detail = format!(
        "cubic err {cubic_err:.1e}, h-halving ratio {ratio:.1}, max step-doubling change {worst:.1e}, reports identical: {identical}"
    );
    let pass = problems.is_empty();
    Outcome::new(pass, if pass { detail } else { format!("{detail}; {}", problems.join("; ")) })
}

fn main() -> ExitCode {
    let cfg = NumericsConfig::default();
    let tol = Tolerances { rtol_significand: SIGNIFICAND_RTOL, atol_constant: None };
    let start = Instant::now();
    let report = run_catalog(&CatalogName::ALL, &cfg, &tol);

    type Check = fn(&RunReport) -> Outcome;
    let criteria: [(&str, Check); 5] = [
        ("catalog reproduction", catalog_matches),
        ("closed-form Z2 volume", closed_form_volume),
        ("entropy orderings", orderings),
        ("profile smoothness and positivity", profiles),
        ("numerical behaviour", numerics),
    ];

    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let out = check(&report);
        if !out.pass {
            failed += 1;
        }
        println!("criterion {} [{}] {name}: {}", i + 1, if out.pass { "PASS" } else { "FAIL" }, out.detail);
    }
    println!("acceptance: {}/5 passed in {:.2?}", 5 - failed, start.elapsed());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
