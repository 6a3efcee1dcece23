//! One line per acceptance criterion. Set NLD_ACCEPTANCE_FULL=1 to run the
//! X = 10⁶ family sum as well (hours on a single core).

use std::time::Instant;

use nld_cli::commands::{
    check_reduction, check_theta, empirical, verify_corollary, verify_gauss, verify_mobius,
    verify_poisson, EmpiricalParams,
};
use nld_cli::{with_threads, RunReport, Status};
use nld_core::testfun::Family;
use nld_core::FunctionSpec;

const SEED: u64 = 20_240_601;

fn spec(family: Family, sigma: f64) -> FunctionSpec {
    FunctionSpec { family, sigma, power: None }
}

fn reduction_configs() -> Vec<Vec<FunctionSpec>> {
    use Family::{Bump, Triangle};
    vec![
        vec![spec(Triangle, 0.45), spec(Triangle, 0.45)],
        vec![spec(Triangle, 0.3), spec(Bump, 0.6)],
        vec![spec(Triangle, 0.3), spec(Triangle, 0.3), spec(Triangle, 0.3)],
        vec![spec(Bump, 0.2), spec(Bump, 0.3), spec(Bump, 0.4)],
        vec![spec(Triangle, 0.2); 4],
    ]
}

fn c8_params() -> EmpiricalParams {
    EmpiricalParams {
        epsilon: Some(0.4),
        u: Some(10.0),
        z: None,
        max_work: None,
    }
}

struct Criterion {
    id: &'static str,
    name: &'static str,
    run: fn() -> Vec<RunReport>,
    /// Rerun under several thread counts for the determinism check.
    rerun: bool,
}

fn c1() -> Vec<RunReport> {
    vec![verify_corollary(1, 1e-5).unwrap()]
}

fn c2() -> Vec<RunReport> {
    vec![verify_corollary(2, 1e-4).unwrap(), verify_corollary(3, 1e-4).unwrap()]
}

fn c3() -> Vec<RunReport> {
    vec![check_reduction(&reduction_configs(), 1e-12).unwrap()]
}

fn c4() -> Vec<RunReport> {
    vec![verify_gauss(3000, 20, 1e-6).unwrap()]
}

fn c5() -> Vec<RunReport> {
    vec![verify_poisson(10.0, 1e-8).unwrap()]
}

fn c6() -> Vec<RunReport> {
    vec![verify_mobius(6, SEED).unwrap()]
}

fn c7() -> Vec<RunReport> {
    vec![check_theta(10.0, &[1e2, 1e3, 1e4], 1.0).unwrap()]
}

fn c8_trend() -> Vec<RunReport> {
    let g = spec(Family::Triangle, 1.5);
    vec![empirical(1, g, &[10_000, 30_000, 100_000], c8_params()).unwrap()]
}

fn c8_small() -> Vec<RunReport> {
    let g = spec(Family::Triangle, 1.5);
    vec![empirical(1, g, &[10_000], c8_params()).unwrap()]
}

fn status_of(reports: &[RunReport]) -> Status {
    reports.iter().map(|r| r.status).max().unwrap_or(Status::Pass)
}

fn summary(reports: &[RunReport]) -> String {
    let mut parts = Vec::new();
    for r in reports {
        for (k, q) in &r.outputs {
            parts.push(format!("{k}={:.3e}", q.value));
        }
        let failing: Vec<&str> = r
            .checks
            .iter()
            .filter(|c| c.status != Status::Pass)
            .map(|c| c.name.as_str())
            .collect();
        if !failing.is_empty() {
            parts.push(format!("not passing: {}", failing.join("; ")));
        }
    }
    parts.join(", ")
}

fn line(id: &str, status: Status, name: &str, detail: &str, secs: f64) {
    let tag = match status {
        Status::Pass => "PASS",
        Status::Fail => "FAIL",
        Status::Indeterminate => "INDETERMINATE",
    };
    println!("{id} {tag:<13} {name} [{secs:.1}s] {detail}");
}

fn main() {
    let criteria = [
        Criterion { id: "C1", name: "n=1 arithmetic = RMT, 6 functions + anchor, tol 1e-5", run: c1, rerun: true },
        Criterion { id: "C2", name: "n=2,3 arithmetic = RMT, 4 configs each, tol 1e-4", run: c2, rerun: true },
        Criterion { id: "C3", name: "Σσ<1: full = reduced, tol 1e-12", run: c3, rerun: true },
        Criterion { id: "C4", name: "Gauss sums k≤3000 |m|≤20, tol 1e-6", run: c4, rerun: true },
        Criterion { id: "C5", name: "Poisson identity grid, tol 1e-8·X", run: c5, rerun: true },
        Criterion { id: "C6", name: "Bell numbers n≤8, Möbius inversion n≤6", run: c6, rerun: true },
        Criterion { id: "C7", name: "theta residual·y/U bounded, U=10", run: c7, rerun: true },
    ];
    let mut failed = Vec::new();
    let mut baseline = Vec::new();
    for c in &criteria {
        let t = Instant::now();
        let reports = with_threads(None, c.run);
        let status = status_of(&reports);
        line(c.id, status, c.name, &summary(&reports), t.elapsed().as_secs_f64());
        if status != Status::Pass {
            failed.push(c.id);
        }
        if c.rerun {
            baseline.push((c.id, c.run, reports));
        }
    }

    // C8: the literal criterion needs X = 10⁶.
    let g = spec(Family::Triangle, 1.5);
    if std::env::var("NLD_ACCEPTANCE_FULL").is_ok_and(|v| v == "1") {
        let t = Instant::now();
        let params = EmpiricalParams { max_work: Some(1e14), ..c8_params() };
        let r = with_threads(None, || empirical(1, g.clone(), &[10_000, 1_000_000], params).unwrap());
        let reports = vec![r];
        let status = status_of(&reports);
        line("C8", status, "gap(10⁶) < gap(10⁴), both negative", &summary(&reports), t.elapsed().as_secs_f64());
        if status != Status::Pass {
            failed.push("C8");
        }
    } else {
        let guard = empirical(1, g.clone(), &[1_000_000], c8_params()).unwrap_err();
        line(
            "C8",
            Status::Indeterminate,
            "gap(10⁶) < gap(10⁴), both negative",
            &format!("NOT RUN at X=10⁶ ({guard}); set NLD_ACCEPTANCE_FULL=1"),
            0.0,
        );
        let t = Instant::now();
        let reports = with_threads(None, c8_trend);
        let status = status_of(&reports);
        line(
            "C8r",
            status,
            "reduced trend X∈{10⁴,3·10⁴,10⁵}: gap shrinks, sums negative",
            &gap_summary(&reports[0]),
            t.elapsed().as_secs_f64(),
        );
        if status != Status::Pass {
            failed.push("C8r");
        }
    }
    baseline.push(("C8r@10⁴", c8_small, with_threads(None, c8_small)));

    // C9: byte-identical reports (wall time aside) on 1 and 4 workers.
    let t = Instant::now();
    let mut mismatched = Vec::new();
    for threads in [1, 4] {
        for (id, run, reports) in &baseline {
            let again = with_threads(Some(threads), run);
            let same = reports.len() == again.len()
                && reports.iter().zip(&again).all(|(a, b)| a.canonical_json() == b.canonical_json());
            if !same {
                mismatched.push(format!("{id}@{threads}"));
            }
        }
    }
    let status = if mismatched.is_empty() { Status::Pass } else { Status::Fail };
    let detail = if mismatched.is_empty() {
        "C1–C7 and C8r@10⁴ identical on 1 and 4 workers".to_string()
    } else {
        format!("differs: {}", mismatched.join(", "))
    };
    line("C9", status, "determinism across thread counts", &detail, t.elapsed().as_secs_f64());
    if status != Status::Pass {
        failed.push("C9");
    }

    if !failed.is_empty() {
        println!("acceptance: failed {}", failed.join(", "));
        std::process::exit(1);
    }
    println!("acceptance: all asserted criteria passed");
}

fn gap_summary(r: &RunReport) -> String {
    let parts: Vec<String> = r
        .rows
        .iter()
        .map(|row| {
            format!(
                "{}: sum {:.6} gap {:.6}",
                row.label, row.values["normalized_sum"].value, row.values["gap"].value
            )
        })
        .collect();
    format!("limit {:.6}; {}", r.outputs["predicted_limit"].value, parts.join("; "))
}
