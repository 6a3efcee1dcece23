//! The arithmetic side of the n-level density: the combinatorial expression
//! summed over set partitions, its family-average limit, and the constrained
//! Fourier-domain integrals both of them use.
//!
//! Block functions `F_l` are the products `∏_{i∈F_l} f_i`, whose transforms
//! come from [`product_transform`]. Blocks are addressed by bitmasks over the
//! input indices.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::Serialize;

use crate::combinatorics::{
    enumerate_pairings, enumerate_partitions, mask_elements, submasks, SetPartition,
};
use crate::error::{Error, Result};
use crate::quadrature::{adaptive, Estimate, Tolerance};
use crate::testfun::{check_support, product_transform_coarsened, TestFunction};

/// Largest n accepted by [`theorem_rhs`].
pub const MAX_DENSITY_N: usize = 4;
/// Absolute tolerance of each constrained integral.
pub const CONSTRAINED_TOL: f64 = 1e-10;
/// Absolute tolerance of each `∫ u F̂_a F̂_b` pairing integral.
pub const PAIRING_TOL: f64 = 1e-12;

/// Value of the arithmetic side with its per-term decomposition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityResult {
    pub value: f64,
    /// Keyed by `F=<partition>;S=<blocks>;S2=<blocks>` (one-based block labels).
    pub breakdown: BTreeMap<String, f64>,
    pub quadrature_error: f64,
}

/// `∫ ∏_{i∈I∪J} f̂_i(u_i) du` over `u ≥ 0` with `Σ_I u_i ≤ Σ_J u_i − 1`.
///
/// The J variables are integrated outermost (largest support first); the
/// I variables enter through the distribution function of their sum, whose
/// last layer is the closed-form cumulative integral.
pub fn constrained_integral(fs_i: &[TestFunction], fs_j: &[TestFunction]) -> Result<Estimate> {
    if fs_j.is_empty() {
        return Err(Error::InvalidParameter(
            "constrained integral needs at least one variable on the large side".into(),
        ));
    }
    let mut js: Vec<&TestFunction> = fs_j.iter().collect();
    js.sort_by(|a, b| b.sigma().total_cmp(&a.sigma()));
    let is: Vec<&TestFunction> = fs_i.iter().collect();
    let total_j: f64 = js.iter().map(|f| f.sigma()).sum();
    if total_j <= 1.0 {
        return Ok(Estimate::default());
    }
    let c = Constrained {
        js,
        is,
        tol: CONSTRAINED_TOL,
    };
    Ok(c.outer(0, 0.0, CONSTRAINED_TOL))
}

struct Constrained<'a> {
    js: Vec<&'a TestFunction>,
    is: Vec<&'a TestFunction>,
    tol: f64,
}

impl Constrained<'_> {
    /// Integral over the J variables from `level` on, given the partial sum `s`.
    fn outer(&self, level: usize, s: f64, tol: f64) -> Estimate {
        if level == self.js.len() {
            return Estimate::exact(self.distribution(0, s - 1.0, self.tol));
        }
        let f = self.js[level];
        let rest: f64 = self.js[level + 1..].iter().map(|g| g.sigma()).sum();
        // the region needs s + u + rest > 1
        let lo = (1.0 - s - rest).max(0.0);
        let hi = f.sigma();
        if hi <= lo {
            return Estimate::default();
        }
        let mut breaks: Vec<f64> = f.kinks();
        if level + 1 == self.js.len() {
            // the I-side distribution has kinks where s + u − 1 hits its own kinks
            for k in self.distribution_kinks() {
                breaks.push(1.0 + k - s);
            }
        }
        let inner_tol = 0.5 * tol / (hi - lo);
        adaptive(
            |u| {
                let w = f.fhat(u);
                if w == 0.0 {
                    0.0
                } else {
                    w * self.outer(level + 1, s + u, inner_tol).value
                }
            },
            lo,
            hi,
            &breaks,
            Tolerance::abs(tol).with_max_panels(500),
        )
    }

    /// Points where the distribution function of the I-sum is non-smooth.
    fn distribution_kinks(&self) -> Vec<f64> {
        let mut out = vec![0.0];
        let mut partial = 0.0;
        for f in &self.is {
            partial += f.sigma();
            out.push(partial);
            for k in f.kinks() {
                if k > 0.0 {
                    out.push(k);
                }
            }
        }
        out
    }

    /// `∫ ∏_{i ≥ level} f̂_i(v_i) dv` over `v ≥ 0`, `Σ v ≤ t`.
    fn distribution(&self, level: usize, t: f64, tol: f64) -> f64 {
        if t < 0.0 {
            return 0.0;
        }
        let remaining = &self.is[level..];
        match remaining {
            [] => 1.0,
            [f] => f.cumulative(t),
            [f, rest @ ..] => {
                let top = t.min(f.sigma());
                let mut breaks = f.kinks();
                if rest.len() == 1 {
                    breaks.push(t - rest[0].sigma());
                    for k in rest[0].kinks() {
                        breaks.push(t - k);
                    }
                }
                let inner_tol = 0.5 * tol / top.max(1e-3);
                adaptive(
                    |v| {
                        let w = f.fhat(v);
                        if w == 0.0 {
                            0.0
                        } else {
                            w * self.distribution(level + 1, t - v, inner_tol)
                        }
                    },
                    0.0,
                    top,
                    &breaks,
                    Tolerance::abs(tol).with_max_panels(500),
                )
                .value
            }
        }
    }
}

/// `∫_0^∞ u F̂_a(u) F̂_b(u) du`.
pub fn half_moment(a: &TestFunction, b: &TestFunction) -> Estimate {
    let top = a.sigma().min(b.sigma());
    let mut breaks = a.kinks();
    breaks.extend(b.kinks());
    adaptive(
        |u| u * a.fhat(u) * b.fhat(u),
        0.0,
        top,
        &breaks,
        Tolerance::abs(PAIRING_TOL),
    )
}

/// `∫ f − ∫_0^1 f̂`, the one-variable case of the arithmetic side.
pub fn one_level_identity(f: &TestFunction) -> f64 {
    f.integral_f() - f.integral_fhat(0.0, 1.0)
}

fn mask_of(items: &[usize]) -> u32 {
    items.iter().fold(0, |m, &i| m | (1 << i))
}

/// Cached block quantities, indexed by the mask of input indices.
struct Blocks {
    transforms: BTreeMap<u32, TestFunction>,
    moments: BTreeMap<(u32, u32), Estimate>,
    constrained: BTreeMap<(Vec<u32>, Vec<u32>), Estimate>,
}

impl Blocks {
    fn build(
        fs: &[TestFunction],
        coarsen: u32,
        masks: BTreeSet<u32>,
        pairs: BTreeSet<(u32, u32)>,
        constrained: BTreeSet<(Vec<u32>, Vec<u32>)>,
    ) -> Result<Self> {
        let masks: Vec<u32> = masks.into_iter().collect();
        let built: Vec<Result<TestFunction>> = masks
            .par_iter()
            .map(|&m| {
                let members: Vec<TestFunction> =
                    mask_elements(m).into_iter().map(|i| fs[i].clone()).collect();
                product_transform_coarsened(&members, coarsen)
            })
            .collect();
        let mut transforms = BTreeMap::new();
        for (m, t) in masks.into_iter().zip(built) {
            transforms.insert(m, t?);
        }
        let pairs: Vec<(u32, u32)> = pairs.into_iter().collect();
        let values: Vec<Estimate> = pairs
            .par_iter()
            .map(|(a, b)| half_moment(&transforms[a], &transforms[b]))
            .collect();
        let moments = pairs.into_iter().zip(values).collect();
        let keys: Vec<(Vec<u32>, Vec<u32>)> = constrained.into_iter().collect();
        let values: Vec<Result<Estimate>> = keys
            .par_iter()
            .map(|(i, j)| {
                let fi: Vec<TestFunction> = i.iter().map(|m| transforms[m].clone()).collect();
                let fj: Vec<TestFunction> = j.iter().map(|m| transforms[m].clone()).collect();
                constrained_integral(&fi, &fj)
            })
            .collect();
        let mut constrained = BTreeMap::new();
        for (k, v) in keys.into_iter().zip(values) {
            constrained.insert(k, v?);
        }
        Ok(Self {
            transforms,
            moments,
            constrained,
        })
    }
}

/// Sum over pairings of `set` of `∏ ∫_0^∞ u F̂_a F̂_b`, with the error bound.
fn pairing_sum(set: &[u32], moments: &BTreeMap<(u32, u32), Estimate>) -> Estimate {
    let idx: Vec<usize> = (0..set.len()).collect();
    let mut total = Estimate::default();
    for p in enumerate_pairings(&idx) {
        let mut value = 1.0f64;
        let mut error = 0.0f64;
        for &(a, b) in &p.pairs {
            let e = moments[&ordered(set[a], set[b])];
            error = error * e.value.abs() + value.abs() * e.error;
            value *= e.value;
        }
        total = total + Estimate { value, error };
    }
    total
}

fn ordered(a: u32, b: u32) -> (u32, u32) {
    (a.min(b), a.max(b))
}

fn pick(blocks: &[u32], sub: u32) -> Vec<u32> {
    mask_elements(sub).into_iter().map(|l| blocks[l]).collect()
}

/// Visits every constrained term `(I, J)` (as block masks) reached from a
/// group of blocks with its signed weight.
fn for_each_constrained<F: FnMut(Vec<u32>, Vec<u32>, f64)>(group: &[u32], mut visit: F) {
    let full = (1u32 << group.len()) - 1;
    for i_sub in submasks(full) {
        if i_sub == full {
            continue;
        }
        let j_sub = full & !i_sub;
        let sign = if i_sub.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        visit(pick(group, i_sub), pick(group, j_sub), sign);
    }
}

/// Options for the arithmetic side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Shape {
    /// Include the S_3/I terms (constrained integrals).
    constrained_terms: bool,
}

/// The full arithmetic side for `1 ≤ n ≤ 4` test functions with `Σσ < 2`.
pub fn theorem_rhs(fs: &[TestFunction]) -> Result<DensityResult> {
    evaluate(
        fs,
        Shape {
            constrained_terms: true,
        },
    )
}

/// The arithmetic side with the S_3/I terms removed. It agrees with
/// [`theorem_rhs`] whenever `Σσ < 1`, where every constrained region is empty.
pub fn theorem_rhs_reduced(fs: &[TestFunction]) -> Result<DensityResult> {
    evaluate(
        fs,
        Shape {
            constrained_terms: false,
        },
    )
}

fn check_inputs(fs: &[TestFunction], max_n: usize) -> Result<()> {
    if fs.is_empty() || fs.len() > max_n {
        return Err(Error::SizeGuard {
            what: "n",
            value: fs.len() as u64,
            min: 1,
            max: max_n as u64,
        });
    }
    check_support(fs, 2.0)?;
    Ok(())
}

/// One (F, S, S_2) term before evaluation.
struct Term {
    key: String,
    coef: f64,
    /// blocks of S^c, S \ S_2, S_2
    outside: Vec<u32>,
    halved: Vec<u32>,
    core: Vec<u32>,
}

fn set_label(blocks: u32) -> String {
    let items: Vec<String> = mask_elements(blocks).iter().map(|l| (l + 1).to_string()).collect();
    format!("{{{}}}", items.join(","))
}

fn collect_terms(n: usize) -> Result<Vec<Term>> {
    let mut terms = Vec::new();
    for part in enumerate_partitions(n)? {
        let nu = part.num_blocks();
        let masks: Vec<u32> = part.blocks().iter().map(|b| mask_of(b)).collect();
        let coef = partition_weight(&part);
        let all = (1u32 << nu) - 1;
        for s in submasks(all) {
            for s2 in submasks(s) {
                terms.push(Term {
                    key: format!("F={part};S={};S2={}", set_label(s), set_label(s2)),
                    coef,
                    outside: pick(&masks, all & !s),
                    halved: pick(&masks, s & !s2),
                    core: pick(&masks, s2),
                });
            }
        }
    }
    Ok(terms)
}

/// (−2)^{n−ν} ∏ (|F_l| − 1)!.
fn partition_weight(part: &SetPartition) -> f64 {
    let n = part.n() as i32;
    let nu = part.num_blocks() as i32;
    let fact: f64 = part
        .blocks()
        .iter()
        .map(|b| (1..b.len()).product::<usize>() as f64)
        .product();
    (-2.0f64).powi(n - nu) * fact
}

/// Product transforms are tabulated with an O(h²) convolution error, so the
/// result is Richardson-extrapolated against a twice coarser grid and the
/// size of the correction is added to the error.
fn evaluate(fs: &[TestFunction], shape: Shape) -> Result<DensityResult> {
    let fine = evaluate_at(fs, shape, 1)?;
    if fs.len() == 1 {
        return Ok(fine);
    }
    let coarse = evaluate_at(fs, shape, 2)?;
    let breakdown: BTreeMap<String, f64> = fine
        .breakdown
        .iter()
        .map(|(k, v)| (k.clone(), richardson(*v, coarse.breakdown[k])))
        .collect();
    let value = breakdown.values().sum();
    Ok(DensityResult {
        value,
        breakdown,
        quadrature_error: fine.quadrature_error + (fine.value - coarse.value).abs() / 3.0,
    })
}

fn richardson(fine: f64, coarse: f64) -> f64 {
    fine + (fine - coarse) / 3.0
}

fn evaluate_at(fs: &[TestFunction], shape: Shape, coarsen: u32) -> Result<DensityResult> {
    check_inputs(fs, MAX_DENSITY_N)?;
    let terms = collect_terms(fs.len())?;

    // Everything the terms need, computed once.
    let mut masks = BTreeSet::new();
    let mut pairs = BTreeSet::new();
    let mut constrained = BTreeSet::new();
    for t in &terms {
        masks.extend(t.outside.iter().chain(&t.halved).chain(&t.core).copied());
        for (x, a) in t.core.iter().enumerate() {
            for b in &t.core[x + 1..] {
                pairs.insert(ordered(*a, *b));
            }
        }
        if shape.constrained_terms {
            for_each_core_split(&t.core, |_, rest| {
                for_each_constrained(&rest, |i, j, _| {
                    constrained.insert((i, j));
                });
            });
        }
    }
    let blocks = Blocks::build(fs, coarsen, masks, pairs, constrained)?;

    let evaluated: Vec<(String, Estimate)> = terms
        .par_iter()
        .map(|t| (t.key.clone(), term_value(t, &blocks, shape)))
        .collect();
    let mut breakdown = BTreeMap::new();
    let mut quadrature_error = 0.0;
    for (k, e) in evaluated {
        quadrature_error += e.error;
        breakdown.insert(k, e.value);
    }
    let value = breakdown.values().sum();
    Ok(DensityResult {
        value,
        breakdown,
        quadrature_error,
    })
}

/// Visits the splits `S_2 = S_3 ⊔ rest` with `S_3 ≠ S_2` of even size.
fn for_each_core_split<F: FnMut(Vec<u32>, Vec<u32>)>(core: &[u32], mut visit: F) {
    let full = (1u32 << core.len()) - 1;
    for s3 in submasks(full) {
        if s3 == full || s3.count_ones() % 2 == 1 {
            continue;
        }
        visit(pick(core, s3), pick(core, full & !s3));
    }
}

fn term_value(t: &Term, blocks: &Blocks, shape: Shape) -> Estimate {
    let mut prefactor = t.coef;
    for m in &t.outside {
        prefactor *= blocks.transforms[m].integral_f();
    }
    for m in &t.halved {
        prefactor *= -0.5 * blocks.transforms[m].integral_fhat(f64::NEG_INFINITY, f64::INFINITY);
    }
    if prefactor == 0.0 {
        return Estimate::default();
    }

    // ∫_ℝ |u| F̂_a F̂_b = 2 ∫_0^∞ u F̂_a F̂_b, so each pairing product over a set
    // of size 2k carries 2^k; the explicit 2^{k} factor doubles it again.
    let full_pairing = |set: &[u32]| -> Estimate {
        let e = pairing_sum(set, &blocks.moments);
        let scale = 4.0f64.powi(set.len() as i32 / 2);
        Estimate {
            value: scale * e.value,
            error: scale * e.error,
        }
    };

    let mut bracket = Estimate::default();
    if t.core.len() % 2 == 0 {
        bracket = bracket + full_pairing(&t.core);
    }
    if shape.constrained_terms {
        let mut sub = Estimate::default();
        for_each_core_split(&t.core, |s3, rest| {
            let pc = full_pairing(&s3);
            if pc.value == 0.0 && pc.error == 0.0 {
                return;
            }
            let scale = (-2.0f64).powi(rest.len() as i32);
            let mut inner = Estimate::default();
            for_each_constrained(&rest, |i, j, sign| {
                let c = blocks.constrained[&(i, j)];
                inner.value += sign * scale * c.value;
                inner.error += scale.abs() * c.error;
            });
            sub.value += pc.value * inner.value;
            sub.error += pc.value.abs() * inner.error + pc.error * inner.value.abs();
        });
        bracket.value -= 0.5 * sub.value;
        bracket.error += 0.5 * sub.error;
    }
    Estimate {
        value: prefactor * bracket.value,
        error: prefactor.abs() * bracket.error,
    }
}

/// The limit of the normalised family sum,
/// `lim π²/(4X logⁿX) S(X, Y; ∏ ĝ_i)`, for `Σσ < 2`.
pub fn asymptotic_limit(gs: &[TestFunction]) -> Result<f64> {
    asymptotic_limit_estimate(gs).map(|e| e.value)
}

/// [`asymptotic_limit`] with a propagated quadrature error bound.
pub fn asymptotic_limit_estimate(gs: &[TestFunction]) -> Result<Estimate> {
    let fine = asymptotic_at(gs, 1)?;
    if gs.len() == 1 {
        return Ok(fine);
    }
    let coarse = asymptotic_at(gs, 2)?;
    Ok(Estimate {
        value: richardson(fine.value, coarse.value),
        error: fine.error + (fine.value - coarse.value).abs() / 3.0,
    })
}

fn asymptotic_at(gs: &[TestFunction], coarsen: u32) -> Result<Estimate> {
    check_inputs(gs, MAX_DENSITY_N)?;
    let n = gs.len();
    let all: Vec<u32> = (0..n).map(|i| 1u32 << i).collect();
    let mut pairs = BTreeSet::new();
    for a in 0..n {
        for b in a + 1..n {
            pairs.insert(ordered(all[a], all[b]));
        }
    }
    let mut constrained = BTreeSet::new();
    let full = (1u32 << n) - 1;
    for s in submasks(full) {
        if s == full || s.count_ones() % 2 == 1 {
            continue;
        }
        for_each_constrained(&pick(&all, full & !s), |i, j, _| {
            constrained.insert((i, j));
        });
    }
    let blocks = Blocks::build(gs, coarsen, all.iter().copied().collect(), pairs, constrained)?;

    let mut total = Estimate::default();
    if n % 2 == 0 {
        total = pairing_sum(&all, &blocks.moments);
    }
    for s in submasks(full) {
        if s == full || s.count_ones() % 2 == 1 {
            continue;
        }
        let pc = pairing_sum(&pick(&all, s), &blocks.moments);
        if pc.value == 0.0 {
            continue;
        }
        let mut inner = Estimate::default();
        for_each_constrained(&pick(&all, full & !s), |i, j, sign| {
            let c = blocks.constrained[&(i, j)];
            inner = inner + Estimate { value: sign * c.value, error: c.error };
        });
        total = total
            + Estimate {
                value: -0.5 * pc.value * inner.value,
                error: 0.5 * (pc.error * inner.value.abs() + pc.value.abs() * inner.error),
            };
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tri(s: f64) -> TestFunction {
        TestFunction::triangle(s).unwrap()
    }

    #[test]
    fn constrained_examples() {
        let e = constrained_integral(&[], &[tri(2.0)]).unwrap();
        assert!((e.value - 0.25).abs() < 1e-12);
        assert_eq!(constrained_integral(&[tri(0.7)], &[tri(0.4), tri(0.6)]).unwrap().value, 0.0);
        assert!(constrained_integral(&[tri(0.7)], &[]).is_err());
        // ∫_0^{1/2} (1 − 2v)(1 − v)²/4 dv
        let e = constrained_integral(&[tri(0.5)], &[tri(2.0)]).unwrap();
        // (1 − 2v)(1 − v)²/4 = (1 − 4v + 5v² − 2v³)/4
        let prim = |v: f64| (v - 2.0 * v * v + 5.0 * v.powi(3) / 3.0 - 0.5 * v.powi(4)) / 4.0;
        let exact = prim(0.5);
        assert!((e.value - exact).abs() < 1e-12, "{} vs {exact}", e.value);
    }

    #[test]
    fn one_level_examples() {
        assert!((one_level_identity(&tri(2.0)) - 0.25).abs() < 1e-15);
        assert!((one_level_identity(&tri(1.0)) - 0.5).abs() < 1e-15);
        assert_eq!(one_level_identity(&TestFunction::zero(1.0).unwrap()), 0.0);
    }

    #[test]
    fn theorem_one_level() {
        for s in [0.3, 1.0, 1.5, 1.99] {
            let f = tri(s);
            let r = theorem_rhs(&[f.clone()]).unwrap();
            assert!((r.value - one_level_identity(&f)).abs() < 1e-10, "σ={s}");
        }
        let b = TestFunction::smooth_bump(1.7).unwrap();
        assert!((theorem_rhs(&[b.clone()]).unwrap().value - one_level_identity(&b)).abs() < 1e-9);
    }

    #[test]
    fn asymptotic_examples() {
        assert!((asymptotic_limit(&[tri(2.0 - 1e-12)]).unwrap() + 0.125).abs() < 1e-9);
        assert_eq!(asymptotic_limit(&[tri(0.9)]).unwrap(), 0.0);
        let v = asymptotic_limit(&[tri(0.5), tri(0.5)]).unwrap();
        assert!((v - 1.0 / 48.0).abs() < 1e-12);
        assert!(matches!(
            asymptotic_limit(&[tri(1.0), tri(1.1)]),
            Err(Error::SupportViolation { .. })
        ));
    }

    #[test]
    fn breakdown_sums_to_value() {
        let r = theorem_rhs(&[tri(0.6), tri(0.9)]).unwrap();
        let s: f64 = r.breakdown.values().sum();
        assert!((s - r.value).abs() < 1e-12);
        assert!(r.breakdown.keys().any(|k| k.starts_with("F={{1,2}}")));
    }

    #[test]
    fn permutation_symmetry() {
        let fs = [tri(0.3), TestFunction::smooth_bump(0.8).unwrap(), tri(0.6)];
        let base = theorem_rhs(&fs).unwrap().value;
        for order in [[1, 0, 2], [2, 1, 0], [0, 2, 1]] {
            let p: Vec<TestFunction> = order.iter().map(|&i| fs[i].clone()).collect();
            assert!((theorem_rhs(&p).unwrap().value - base).abs() < 1e-9);
        }
    }

    #[test]
    fn reduced_form_below_unit_support() {
        let fs = [tri(0.2), tri(0.3), TestFunction::smooth_bump(0.4).unwrap()];
        let full = theorem_rhs(&fs).unwrap();
        let reduced = theorem_rhs_reduced(&fs).unwrap();
        assert_eq!(full.value, reduced.value);
        // above unit support the constrained terms matter
        let fs = [tri(0.4), tri(1.5)];
        assert!((theorem_rhs(&fs).unwrap().value - theorem_rhs_reduced(&fs).unwrap().value).abs() > 1e-4);
    }

    #[test]
    fn constrained_matches_grid_oracle() {
        // midpoint grid at step 1e-4 over (v, u) ∈ [0, 1/2] × [1, 2]
        let h = 1e-4;
        let mut grid = 0.0;
        for a in 0..5000 {
            let v = (a as f64 + 0.5) * h;
            let fv = 1.0 - 2.0 * v;
            let mut row = 0.0;
            for b in 0..10000 {
                let u = 1.0 + (b as f64 + 0.5) * h;
                if v <= u - 1.0 {
                    row += 1.0 - u / 2.0;
                }
            }
            grid += fv * row * h * h;
        }
        let e = constrained_integral(&[tri(0.5)], &[tri(2.0)]).unwrap();
        assert!((e.value - grid).abs() < 1e-4);
    }

    #[test]
    fn asymptotic_one_level_closed_form() {
        for f in [tri(1.3), tri(1.9), TestFunction::smooth_bump(1.6).unwrap(), tri(0.7)] {
            let want = -0.5 * f.integral_fhat(1.0, f64::INFINITY);
            assert!((asymptotic_limit(&[f]).unwrap() - want).abs() < 1e-10);
        }
    }
}
