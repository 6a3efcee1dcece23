use std::collections::BTreeMap;

use nld_core::combinatorics::{enumerate_partitions, mobius_from_bottom, refines, SetPartition};
use nld_core::density::{asymptotic_limit_estimate, theorem_rhs, theorem_rhs_reduced};
use nld_core::empirical::{
    alternating_theta_sum, auto_epsilon, auto_u, auto_z, family_sum_direct, poisson_identity_check,
    FamilyConfig, FamilyParams, SmoothCutoff,
};
use nld_core::numtheory::{gauss_g, gauss_tau_bruteforce, jacobi};
use nld_core::rmt::rmt_integral;
use nld_core::testfun::check_support;
use nld_core::{Error, FunctionSpec, TestFunction};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::report::{Quantity, Row, RunReport, Status};
use crate::CliError;

pub const BELL: [usize; 8] = [1, 2, 5, 15, 52, 203, 877, 4140];

fn describe(fs: &[FunctionSpec]) -> String {
    let parts: Vec<String> = fs.iter().map(|f| format!("{}({})", f.family, f.sigma)).collect();
    parts.join(" ")
}

pub fn build(specs: &[FunctionSpec]) -> Result<Vec<TestFunction>, CliError> {
    let fs = specs
        .iter()
        .map(FunctionSpec::build)
        .collect::<nld_core::Result<Vec<_>>>()
        .map_err(CliError::usage)?;
    check_support(&fs, 2.0).map_err(CliError::usage)?;
    Ok(fs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Theorem,
    Rmt,
    Both,
}

pub fn density(specs: &[FunctionSpec], side: Side, tol: f64) -> Result<RunReport, CliError> {
    let fs = build(specs)?;
    let mut r = RunReport::new("density");
    r.input("n", fs.len());
    r.input("config", specs);
    r.input("side", format!("{side:?}").to_lowercase());
    r.input("tol", tol);
    r.output("sigma_total", Quantity::exact(fs.iter().map(TestFunction::sigma).sum()));

    let mut theorem = None;
    if side != Side::Rmt {
        let t = theorem_rhs(&fs).map_err(CliError::usage)?;
        r.output("theorem", Quantity::estimate(t.value, t.quadrature_error));
        r.assert(
            "theorem quadrature error",
            t.quadrature_error <= tol,
            format!("{:.3e} ≤ {tol:.1e}", t.quadrature_error),
        );
        for (k, v) in &t.breakdown {
            r.rows.push(Row::new(k.clone()).with("term", Quantity::exact(*v)));
        }
        theorem = Some(Quantity::estimate(t.value, t.quadrature_error));
    }
    if side != Side::Theorem {
        let rmt_tol = if side == Side::Both { 0.1 * tol } else { tol };
        match rmt_integral(&fs, rmt_tol) {
            Ok(v) => {
                r.output("rmt", Quantity::estimate(v.value, v.est_error));
                r.assert(
                    "rmt quadrature error",
                    v.est_error <= rmt_tol,
                    format!("{:.3e} ≤ {rmt_tol:.1e}", v.est_error),
                );
                if let Some(t) = theorem {
                    let diff = t.value - v.value;
                    let err = t.error.unwrap_or(0.0) + v.est_error;
                    r.output("difference", Quantity::estimate(diff, err));
                    r.assert(
                        "|theorem − rmt|",
                        diff.abs() <= tol,
                        format!("{:.3e} ≤ {tol:.1e}", diff.abs()),
                    );
                }
            }
            Err(e @ Error::Tolerance { .. }) => {
                r.check("rmt quadrature error", Status::Indeterminate, e.to_string());
            }
            Err(e) => return Err(CliError::usage(e)),
        }
    }
    r.finish();
    Ok(r)
}

pub fn rmt(specs: &[FunctionSpec], tol: f64) -> Result<RunReport, CliError> {
    let fs = build(specs)?;
    let mut r = RunReport::new("rmt-integral");
    r.input("n", fs.len());
    r.input("config", specs);
    r.input("tol", tol);
    match rmt_integral(&fs, tol) {
        Ok(v) => {
            r.output("value", Quantity::estimate(v.value, v.est_error));
            r.output("est_error", Quantity::exact(v.est_error));
            r.output("n", Quantity::count(v.n));
            r.assert("quadrature error", v.est_error <= tol, format!("{:.3e} ≤ {tol:.1e}", v.est_error));
        }
        Err(e @ Error::Tolerance { .. }) => {
            r.check("quadrature error", Status::Indeterminate, e.to_string());
        }
        Err(e) => return Err(CliError::usage(e)),
    }
    r.finish();
    Ok(r)
}

/// `None` means the automatic choice.
#[derive(Debug, Clone, Copy, Default)]
pub struct EmpiricalParams {
    pub epsilon: Option<f64>,
    pub u: Option<f64>,
    pub z: Option<u64>,
    pub max_work: Option<f64>,
}

/// Resolves "auto" parameters. Where the asymptotic choice is not admissible
/// (ε ∉ (0,1) or U < 2 at desk scale) the nearest admissible value is used:
/// ε = min(2 − Σσ, 0.99), which keeps every contributing prime, and U = 2.
fn resolve(n: usize, x: u64, total: f64, p: EmpiricalParams) -> (FamilyParams, BTreeMap<&'static str, String>) {
    let mut source = BTreeMap::new();
    let epsilon = p.epsilon.unwrap_or_else(|| {
        let a = auto_epsilon(n, x);
        if a > 0.0 && a < 1.0 && total <= 2.0 - a {
            source.insert("epsilon", "auto".to_string());
            a
        } else {
            source.insert("epsilon", format!("auto {a:.4} not admissible, fallback"));
            (2.0 - total).min(0.99)
        }
    });
    let u = p.u.unwrap_or_else(|| {
        let a = auto_u(x);
        if a >= 2.0 {
            source.insert("u", "auto".to_string());
            a
        } else {
            source.insert("u", format!("auto {a:.4} below 2, fallback"));
            2.0
        }
    });
    let z = p.z.unwrap_or_else(|| {
        source.insert("z", "auto".to_string());
        auto_z(n, x).max(1)
    });
    let fp = FamilyParams {
        epsilon: Some(epsilon),
        z: Some(z),
        u: Some(u),
        max_work: p.max_work,
    };
    (fp, source)
}

pub fn empirical(n: usize, spec: FunctionSpec, xs: &[u64], params: EmpiricalParams) -> Result<RunReport, CliError> {
    if xs.is_empty() {
        return Err(CliError::Usage("no X values given".into()));
    }
    let g = spec.build().map_err(CliError::usage)?;
    let ghats = vec![g; n];
    check_support(&ghats, 2.0).map_err(CliError::usage)?;
    let total: f64 = ghats.iter().map(TestFunction::sigma).sum();
    let limit = asymptotic_limit_estimate(&ghats).map_err(CliError::usage)?;

    let mut r = RunReport::new("empirical");
    r.input("n", n);
    r.input("family", spec.family.to_string());
    r.input("sigma", spec.sigma);
    r.input("x", xs);
    r.output("predicted_limit", Quantity::estimate(limit.value, limit.error));

    let mut configs = Vec::new();
    for &x in xs {
        let (fp, source) = resolve(n, x, total, params);
        let cfg = FamilyConfig::new(x, ghats.clone(), fp).map_err(CliError::usage)?;
        configs.push((cfg, source));
    }
    let mut gaps = Vec::new();
    for (cfg, source) in configs {
        let s = family_sum_direct(&cfg).map_err(CliError::usage)?;
        let v = s * cfg.normalisation();
        // rounding only; the sum itself is finite and exact in exact arithmetic
        let err = 1e-12 * v.abs();
        let gap = v - limit.value;
        let x = cfg.x;
        r.input(&format!("X={x}"), resolved_echo(&cfg, &source));
        r.rows.push(
            Row::new(format!("X={x}"))
                .with("X", Quantity::exact(x as f64))
                .with("normalized_sum", Quantity::estimate(v, err))
                .with("predicted_limit", Quantity::estimate(limit.value, limit.error))
                .with("gap", Quantity::estimate(gap, err + limit.error)),
        );
        if limit.value != 0.0 {
            r.assert(
                format!("sign at X={x}"),
                v.signum() == limit.value.signum(),
                format!("normalized sum {v:.6} vs limit {:.6}", limit.value),
            );
        }
        gaps.push((x, gap.abs()));
    }
    if gaps.len() == 1 {
        let row = &r.rows[0].values;
        let (v, gap) = (row["normalized_sum"], row["gap"]);
        r.output("X", Quantity::exact(gaps[0].0 as f64));
        r.output("normalized_sum", v);
        r.output("gap", gap);
    }
    let mut sorted = gaps.clone();
    sorted.sort_by_key(|g| g.0);
    for w in sorted.windows(2) {
        r.assert(
            format!("gap shrinks {} → {}", w[0].0, w[1].0),
            w[1].1 < w[0].1,
            format!("{:.6} → {:.6}", w[0].1, w[1].1),
        );
    }
    r.finish();
    Ok(r)
}

fn resolved_echo(cfg: &FamilyConfig, source: &BTreeMap<&'static str, String>) -> serde_json::Value {
    serde_json::json!({
        "epsilon": cfg.epsilon,
        "u": cfg.u,
        "z": cfg.z,
        "y": cfg.y,
        "max_work": cfg.max_work,
        "source": source,
    })
}

pub fn verify_gauss(kmax: u64, mmax: i64, tol: f64) -> Result<RunReport, CliError> {
    if kmax < 1 || kmax > nld_core::numtheory::MAX_TAU_K {
        return Err(CliError::Usage(format!(
            "--kmax = {kmax} must lie in [1, {}]",
            nld_core::numtheory::MAX_TAU_K
        )));
    }
    let ks: Vec<i64> = (1..=kmax as i64).step_by(2).collect();
    let per_k: Vec<(f64, usize)> = ks
        .par_iter()
        .map(|&k| {
            let eps = Complex64::new(0.5, 0.5)
                + Complex64::new(0.5, -0.5) * jacobi(-1, k).expect("odd modulus") as f64;
            let mut worst = 0.0f64;
            let mut count = 0;
            for m in -mmax..=mmax {
                let tau = gauss_tau_bruteforce(m, k).expect("odd modulus");
                let g = gauss_g(m, k).expect("odd modulus");
                let d = tau - eps * g;
                worst = worst.max(d.re.abs()).max(d.im.abs());
                count += 1;
            }
            (worst, count)
        })
        .collect();
    let max_error = per_k.iter().map(|p| p.0).fold(0.0, f64::max);
    let pairs: usize = per_k.iter().map(|p| p.1).sum();
    let mut r = RunReport::new("verify-gauss");
    r.input("kmax", kmax);
    r.input("mmax", mmax);
    r.input("tol", tol);
    r.output("max_error", Quantity::exact(max_error));
    r.output("pairs", Quantity::count(pairs));
    r.assert("max componentwise error", max_error <= tol, format!("{max_error:.3e} ≤ {tol:.1e}"));
    r.finish();
    Ok(r)
}

/// μ(π, σ) on Π_n from the recursive definition, for every comparable pair.
fn mobius_bruteforce(ps: &[SetPartition]) -> Vec<Vec<i64>> {
    let m = ps.len();
    let leq: Vec<Vec<bool>> = ps
        .iter()
        .map(|a| ps.iter().map(|b| refines(a, b).unwrap_or(false)).collect())
        .collect();
    // order by number of blocks, coarsest last
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(ps[i].num_blocks()));
    let mut mu = vec![vec![0i64; m]; m];
    for x in 0..m {
        for &y in &order {
            if !leq[x][y] {
                continue;
            }
            if x == y {
                mu[x][y] = 1;
                continue;
            }
            let s: i64 = (0..m)
                .filter(|&z| z != y && leq[x][z] && leq[z][y])
                .map(|z| mu[x][z])
                .sum();
            mu[x][y] = -s;
        }
    }
    mu
}

/// μ(π, σ) from the product formula over the blocks of σ.
fn mobius_product(pi: &SetPartition, sigma: &SetPartition) -> i64 {
    let sb = sigma.block_of();
    let mut counts = vec![0usize; sigma.num_blocks()];
    for b in pi.blocks() {
        counts[sb[b[0]]] += 1;
    }
    let blocks: Vec<Vec<usize>> = {
        let mut next = 0;
        counts
            .iter()
            .map(|&c| {
                let b: Vec<usize> = (next..next + c).collect();
                next += c;
                b
            })
            .collect()
    };
    let total: usize = counts.iter().sum();
    let q = SetPartition::new(total, blocks).expect("valid quotient");
    mobius_from_bottom(&q)
}

pub fn verify_mobius(nmax: usize, seed: u64) -> Result<RunReport, CliError> {
    if !(1..=7).contains(&nmax) {
        return Err(CliError::Usage(format!("--nmax = {nmax} must lie in [1, 7]")));
    }
    let mut r = RunReport::new("verify-mobius");
    r.input("nmax", nmax);
    r.input("seed", seed);
    for (i, &want) in BELL.iter().enumerate() {
        let n = i + 1;
        let got = enumerate_partitions(n).map_err(CliError::usage)?.len();
        r.rows.push(
            Row::new(format!("n={n}"))
                .with("bell", Quantity::count(got))
                .with("expected", Quantity::count(want)),
        );
        r.assert(format!("Bell({n})"), got == want, format!("{got} vs {want}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut total = 0;
    for n in 1..=nmax {
        let ps = enumerate_partitions(n).map_err(CliError::usage)?;
        let m = ps.len();
        let mu = mobius_bruteforce(&ps);
        let leq: Vec<Vec<bool>> = ps
            .iter()
            .map(|a| ps.iter().map(|b| refines(a, b).unwrap_or(false)).collect())
            .collect();
        let bottom = ps.iter().position(|p| p.num_blocks() == n).expect("singletons");
        let mut formula_ok = true;
        for a in 0..m {
            for b in 0..m {
                if leq[a][b] && mobius_product(&ps[a], &ps[b]) != mu[a][b] {
                    formula_ok = false;
                }
            }
            if mobius_from_bottom(&ps[a]) != mu[bottom][a] {
                formula_ok = false;
            }
        }
        r.assert(format!("μ formula n={n}"), formula_ok, "product formula vs recursion");
        // g ↦ F(π) = Σ_{σ ⪰ π} g(σ) ↦ Σ_{σ ⪰ π} μ(π,σ) F(σ)
        let g: Vec<i64> = (0..m).map(|_| rng.gen_range(-1000..=1000)).collect();
        let f: Vec<i64> = (0..m)
            .map(|a| (0..m).filter(|&b| leq[a][b]).map(|b| g[b]).sum())
            .collect();
        let back: Vec<i64> = (0..m)
            .map(|a| (0..m).filter(|&b| leq[a][b]).map(|b| mu[a][b] * f[b]).sum())
            .collect();
        let exact = back == g;
        r.assert(format!("inversion n={n}"), exact, format!("{m} partitions"));
        total += m;
    }
    r.output("bell_max_n", Quantity::count(BELL.len()));
    r.output("inversion_partitions", Quantity::count(total));
    r.finish();
    Ok(r)
}

pub const POISSON_K: [u64; 6] = [3, 5, 9, 15, 21, 105];
pub const POISSON_X: [u64; 2] = [1_000, 10_000];
pub const POISSON_Z: [u64; 2] = [1, 10];

pub fn verify_poisson(u: f64, tol: f64) -> Result<RunReport, CliError> {
    let phi = SmoothCutoff::new(u).map_err(CliError::usage)?;
    let mut grid = Vec::new();
    for &k in &POISSON_K {
        for &x in &POISSON_X {
            for &z in &POISSON_Z {
                grid.push((k, x, z));
            }
        }
    }
    let results: Vec<_> = grid
        .par_iter()
        .map(|&(k, x, z)| poisson_identity_check(k, x, z, phi))
        .collect::<nld_core::Result<Vec<_>>>()
        .map_err(CliError::usage)?;
    let mut r = RunReport::new("verify-poisson");
    r.input("u", u);
    r.input("tol", tol);
    r.input("k", POISSON_K);
    r.input("x", POISSON_X);
    r.input("z", POISSON_Z);
    let mut worst = 0.0f64;
    for (&(k, x, z), c) in grid.iter().zip(&results) {
        let rel = (c.lhs - c.rhs).abs() / x as f64;
        worst = worst.max(rel);
        r.rows.push(
            Row::new(format!("k={k} X={x} Z={z}"))
                .with("lhs", Quantity::exact(c.lhs))
                .with("rhs", Quantity::estimate(c.rhs, c.tail_bound))
                .with("m_max", Quantity::exact(c.m_max as f64))
                .with("diff_over_x", Quantity::exact(rel)),
        );
        r.assert(format!("k={k} X={x} Z={z}"), rel <= tol, format!("{rel:.3e} ≤ {tol:.1e}"));
    }
    r.output("max_diff_over_x", Quantity::exact(worst));
    r.finish();
    Ok(r)
}

fn tri(s: f64) -> FunctionSpec {
    FunctionSpec {
        family: nld_core::testfun::Family::Triangle,
        sigma: s,
        power: None,
    }
}

fn bump(s: f64) -> FunctionSpec {
    FunctionSpec {
        family: nld_core::testfun::Family::Bump,
        sigma: s,
        power: None,
    }
}

/// Configurations checked by `verify-corollary --n n`.
pub fn corollary_configs(n: usize) -> Vec<Vec<FunctionSpec>> {
    match n {
        1 => [0.5, 1.0, 1.9]
            .iter()
            .flat_map(|&s| [vec![tri(s)], vec![bump(s)]])
            .collect(),
        2 => vec![
            vec![tri(0.45), tri(0.45)],
            vec![tri(0.5), bump(1.0)],
            vec![bump(0.95), bump(0.95)],
            vec![tri(0.7), tri(1.2)],
        ],
        3 => vec![
            vec![tri(0.3), tri(0.3), tri(0.3)],
            vec![tri(0.5), tri(0.5), tri(0.5)],
            vec![bump(0.4), bump(0.5), bump(0.6)],
            vec![tri(0.5), tri(0.6), tri(0.8)],
        ],
        _ => Vec::new(),
    }
}

pub fn default_corollary_tol(n: usize) -> f64 {
    if n == 1 {
        1e-5
    } else {
        1e-4
    }
}

pub fn verify_corollary(n: usize, tol: f64) -> Result<RunReport, CliError> {
    let configs = corollary_configs(n);
    if configs.is_empty() {
        return Err(CliError::Usage(format!("--n = {n} must be 1, 2 or 3")));
    }
    let mut r = RunReport::new("verify-corollary");
    r.input("n", n);
    r.input("tol", tol);
    let rmt_tol = 0.1 * tol;
    r.input("rmt_tol", rmt_tol);
    let mut worst = 0.0f64;
    for specs in &configs {
        let fs = build(specs)?;
        let label = describe(specs);
        let t = theorem_rhs(&fs).map_err(CliError::usage)?;
        let row = Row::new(label.clone()).with("theorem", Quantity::estimate(t.value, t.quadrature_error));
        match rmt_integral(&fs, rmt_tol) {
            Ok(v) => {
                let diff = (t.value - v.value).abs();
                worst = worst.max(diff);
                r.rows.push(
                    row.with("rmt", Quantity::estimate(v.value, v.est_error))
                        .with("difference", Quantity::estimate(diff, t.quadrature_error + v.est_error)),
                );
                r.assert(label, diff <= tol, format!("{diff:.3e} ≤ {tol:.1e}"));
            }
            Err(e @ Error::Tolerance { .. }) => {
                r.rows.push(row);
                r.check(label, Status::Indeterminate, e.to_string());
            }
            Err(e) => return Err(CliError::usage(e)),
        }
    }
    if n == 1 {
        let anchor = theorem_rhs(&[TestFunction::triangle(2.0).map_err(CliError::usage)?])
            .map_err(CliError::usage)?;
        r.rows.push(
            Row::new("triangle(2) anchor")
                .with("theorem", Quantity::estimate(anchor.value, anchor.quadrature_error))
                .with("expected", Quantity::exact(0.25)),
        );
        let d = (anchor.value - 0.25).abs();
        r.assert("triangle(2) = 1/4", d <= tol, format!("{d:.3e} ≤ {tol:.1e}"));
    }
    r.output("max_difference", Quantity::exact(worst));
    r.finish();
    Ok(r)
}

/// Full and reduced arithmetic sides agree when Σσ < 1.
pub fn check_reduction(configs: &[Vec<FunctionSpec>], tol: f64) -> Result<RunReport, CliError> {
    let mut r = RunReport::new("check-reduction");
    r.input("tol", tol);
    let mut worst = 0.0f64;
    for specs in configs {
        let fs = build(specs)?;
        let full = theorem_rhs(&fs).map_err(CliError::usage)?;
        let reduced = theorem_rhs_reduced(&fs).map_err(CliError::usage)?;
        let d = (full.value - reduced.value).abs();
        worst = worst.max(d);
        let label = describe(specs);
        r.rows.push(
            Row::new(label.clone())
                .with("full", Quantity::estimate(full.value, full.quadrature_error))
                .with("reduced", Quantity::estimate(reduced.value, reduced.quadrature_error))
                .with("difference", Quantity::exact(d)),
        );
        r.assert(label, d <= tol, format!("{d:.3e} ≤ {tol:.1e}"));
    }
    r.output("max_difference", Quantity::exact(worst));
    r.finish();
    Ok(r)
}

/// `|Σ(−1)^m Φ̃(m²/y²) + Φ̂(0)/2|·y/U` over the given `y`.
pub fn check_theta(u: f64, ys: &[f64], bound: f64) -> Result<RunReport, CliError> {
    let phi = SmoothCutoff::new(u).map_err(CliError::usage)?;
    let mut r = RunReport::new("check-theta");
    r.input("u", u);
    r.input("y", ys);
    r.input("bound", bound);
    let mut worst = 0.0f64;
    for &y in ys {
        let s = alternating_theta_sum(phi, y).map_err(CliError::usage)?;
        let scaled = (s + phi.phi_hat0() / 2.0).abs() * y / u;
        worst = worst.max(scaled);
        r.rows.push(
            Row::new(format!("y={y}"))
                .with("theta_sum", Quantity::estimate(s, 1e-12))
                .with("scaled_residual", Quantity::estimate(scaled, 1e-12 * y / u)),
        );
    }
    r.output("max_scaled_residual", Quantity::exact(worst));
    r.assert("bounded", worst <= bound, format!("{worst:.3e} ≤ {bound}"));
    r.finish();
    Ok(r)
}
