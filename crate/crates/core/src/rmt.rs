//! The symplectic side: the kernel `K_{-1}`, the n-point density
//! `W(x) = det K(x_j, x_k)`, and `∫ ∏ f_i(x_i) W(x) dx`.
//!
//! The kernel uses the normalised sine kernel,
//! `K(x, y) = sinc(x − y) − sinc(x + y)` with `sinc(t) = sin(πt)/(πt)`.
//!
//! Two independent evaluators of the integral are provided:
//!
//! * [`rmt_integral`] expands the determinant into products of sinc factors
//!   and moves each product to Fourier space, where every factor
//!   `sinc(ℓ·x)` becomes an integral of `t` over `[-1/2, 1/2]` and the test
//!   functions enter only through their compactly supported transforms. The
//!   result is a finite sum of integrals over bounded boxes.
//! * [`rmt_integral_xspace`] integrates `∏ f_i(x_i) W(x)` directly on a
//!   truncated cube `[-B, B]^n` with tensor Gauss–Legendre panels. Its
//!   truncation error is governed by the decay of the `f_i`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::{adaptive, composite_rule, Estimate, Tolerance};
use crate::testfun::{sinc, Family, TestFunction};

/// Largest dimension accepted by the integral evaluators.
pub const MAX_RMT_N: usize = 4;

/// K_{-1}(x, y) = sinc(x − y) − sinc(x + y).
#[inline]
pub fn kernel(x: f64, y: f64) -> f64 {
    sinc(x - y) - sinc(x + y)
}

/// The n×n matrix `K(x_j, x_k)`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl KernelMatrix {
    pub fn new(x: &[f64]) -> Self {
        let n = x.len();
        let mut entries = vec![0.0; n * n];
        for j in 0..n {
            for k in j..n {
                let v = kernel(x[j], x[k]);
                entries[j * n + k] = v;
                entries[k * n + j] = v;
            }
        }
        Self { n, entries }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, j: usize, k: usize) -> f64 {
        self.entries[j * self.n + k]
    }

    pub fn determinant(&self) -> f64 {
        determinant(self.n, self.entries.clone())
    }
}

/// Determinant of a row-major square matrix: closed forms up to 2×2, LU with
/// partial pivoting beyond.
fn determinant(n: usize, mut a: Vec<f64>) -> f64 {
    match n {
        0 => 1.0,
        1 => a[0],
        2 => a[0] * a[3] - a[1] * a[2],
        _ => {
            let mut det = 1.0;
            for col in 0..n {
                let pivot = (col..n)
                    .max_by(|&r, &s| a[r * n + col].abs().total_cmp(&a[s * n + col].abs()))
                    .unwrap_or(col);
                let p = a[pivot * n + col];
                if p == 0.0 {
                    return 0.0;
                }
                if pivot != col {
                    for c in 0..n {
                        a.swap(pivot * n + c, col * n + c);
                    }
                    det = -det;
                }
                det *= p;
                for r in col + 1..n {
                    let factor = a[r * n + col] / p;
                    if factor != 0.0 {
                        for c in col + 1..n {
                            a[r * n + c] -= factor * a[col * n + c];
                        }
                    }
                }
            }
            det
        }
    }
}

/// W(x) = det K(x_j, x_k).
pub fn density_w(x: &[f64]) -> f64 {
    KernelMatrix::new(x).determinant()
}

/// Result of an RMT-side integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RmtIntegral {
    pub value: f64,
    pub est_error: f64,
    pub n: usize,
}

fn check_n(n: usize) -> Result<()> {
    if (1..=MAX_RMT_N).contains(&n) {
        Ok(())
    } else {
        Err(Error::SizeGuard {
            what: "n",
            value: n as u64,
            min: 1,
            max: MAX_RMT_N as u64,
        })
    }
}

/// One product of sinc factors from the determinant expansion:
/// `sign · ∫ ∏ f_i(x_i) ∏_j sinc(ℓ_j · x) dx`.
#[derive(Debug, Clone)]
struct SincProduct {
    sign: f64,
    /// Row j holds the integer coefficients of ℓ_j.
    rows: Vec<Vec<i32>>,
}

impl SincProduct {
    /// Canonical key: each row up to overall sign, rows sorted. The integral
    /// only depends on this because `f̂_i` is even and the `t`-box symmetric.
    fn key(&self) -> Vec<Vec<i32>> {
        let mut rows: Vec<Vec<i32>> = self
            .rows
            .iter()
            .map(|r| {
                let first = r.iter().copied().find(|&c| c != 0).unwrap_or(0);
                if first < 0 {
                    r.iter().map(|c| -c).collect()
                } else {
                    r.clone()
                }
            })
            .collect();
        rows.sort();
        rows
    }
}

/// Splits rows into groups that share coordinates; each group is returned in
/// canonical order.
fn components(n: usize, rows: &[Vec<i32>]) -> Vec<Vec<Vec<i32>>> {
    let mut label: Vec<usize> = (0..n).collect();
    fn find(label: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while label[r] != r {
            r = label[r];
        }
        label[i] = r;
        r
    }
    for row in rows {
        let idx: Vec<usize> = (0..n).filter(|&i| row[i] != 0).collect();
        for w in idx.windows(2) {
            let (a, b) = (find(&mut label, w[0]), find(&mut label, w[1]));
            label[a.max(b)] = a.min(b);
        }
    }
    let mut groups: BTreeMap<usize, Vec<Vec<i32>>> = BTreeMap::new();
    for row in rows {
        let first = (0..n).find(|&i| row[i] != 0).unwrap_or(0);
        let root = find(&mut label, first);
        groups.entry(root).or_default().push(row.clone());
    }
    groups.into_values().collect()
}

fn permutations(n: usize) -> Vec<(Vec<usize>, f64)> {
    fn go(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                go(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut perms = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut perms);
    perms
        .into_iter()
        .map(|p| {
            let mut inversions = 0;
            for i in 0..n {
                for j in i + 1..n {
                    if p[i] > p[j] {
                        inversions += 1;
                    }
                }
            }
            let sign = if inversions % 2 == 0 { 1.0 } else { -1.0 };
            (p, sign)
        })
        .collect()
}

/// Expands `det K(x_j, x_k)` into `n!·2^n` signed sinc products.
fn expand_determinant(n: usize) -> Vec<SincProduct> {
    let mut out = Vec::new();
    for (perm, psign) in permutations(n) {
        for choice in 0..(1u32 << n) {
            let mut sign = psign;
            let mut rows = Vec::new();
            for j in 0..n {
                let k = perm[j];
                let plus = choice & (1 << j) != 0;
                let mut row = vec![0i32; n];
                if k == j {
                    // K(x, x) = 1 − sinc(2x)
                    if !plus {
                        continue;
                    }
                    row[j] = 2;
                    sign = -sign;
                } else {
                    row[j] = 1;
                    if plus {
                        row[k] = 1;
                        sign = -sign;
                    } else {
                        row[k] = -1;
                    }
                }
                rows.push(row);
            }
            out.push(SincProduct { sign, rows });
        }
    }
    out
}

/// Nested integration of `∏_i f̂_i((Σ_j t_j ℓ_j)_i)` over `t ∈ [-1/2, 1/2]^m`.
struct BoxIntegrand<'a> {
    fs: &'a [TestFunction],
    rows: Vec<Vec<f64>>,
    /// `last_level[i]`: last level whose row touches coordinate i (None if never).
    last_level: Vec<Option<usize>>,
    tol: f64,
}

impl<'a> BoxIntegrand<'a> {
    fn new(fs: &'a [TestFunction], rows: &[Vec<i32>], tol: f64) -> Self {
        let n = fs.len();
        let rows: Vec<Vec<f64>> = rows
            .iter()
            .map(|r| r.iter().map(|&c| c as f64).collect())
            .collect();
        let mut last_level = vec![None; n];
        for (level, r) in rows.iter().enumerate() {
            for i in 0..n {
                if r[i] != 0.0 {
                    last_level[i] = Some(level);
                }
            }
        }
        Self {
            fs,
            rows,
            last_level,
            tol,
        }
    }

    fn integrate(&self) -> Estimate {
        if let [row] = self.rows.as_slice() {
            // single factor f̂_i(c t): closed form through the cumulative integral
            let touched: Vec<usize> = (0..row.len()).filter(|&i| row[i] != 0.0).collect();
            if let [i] = touched.as_slice() {
                let c = row[*i].abs();
                return Estimate::exact(self.fs[*i].integral_fhat(-0.5 * c, 0.5 * c) / c);
            }
        }
        self.level(0, &vec![0.0; self.fs.len()], self.tol)
    }

    /// Integrates over t_level..t_{m-1} with the partial argument vector `w`.
    fn level(&self, level: usize, w: &[f64], tol: f64) -> Estimate {
        let row = &self.rows[level];
        let n = self.fs.len();
        // Coordinates that are final at this level: their factor is an explicit
        // function of t_level. Use them to clip the range and find breakpoints.
        let mut lo: f64 = -0.5;
        let mut hi: f64 = 0.5;
        let mut breaks = Vec::new();
        let mut final_here = Vec::new();
        for i in 0..n {
            let c = row[i];
            if c == 0.0 || self.last_level[i] != Some(level) {
                continue;
            }
            final_here.push(i);
            let s = self.fs[i].sigma();
            let (a, b) = ((-s - w[i]) / c, (s - w[i]) / c);
            lo = lo.max(a.min(b));
            hi = hi.min(a.max(b));
            for k in self.fs[i].kinks() {
                breaks.push((k - w[i]) / c);
            }
        }
        if hi <= lo {
            return Estimate::default();
        }
        let innermost = level + 1 == self.rows.len();
        let mut scratch = w.to_vec();
        let eval = |t: f64| -> f64 {
            let mut v = 1.0;
            for &i in &final_here {
                v *= self.fs[i].fhat(w[i] + row[i] * t);
                if v == 0.0 {
                    return 0.0;
                }
            }
            v
        };
        if innermost {
            return adaptive(eval, lo, hi, &breaks, Tolerance::abs(tol).with_max_panels(400));
        }
        let inner_tol = 0.5 * tol / (hi - lo).max(1e-3);
        adaptive(
            |t| {
                let outer = eval(t);
                if outer == 0.0 {
                    return 0.0;
                }
                for i in 0..n {
                    scratch[i] = w[i] + row[i] * t;
                }
                outer * self.level(level + 1, &scratch, inner_tol).value
            },
            lo,
            hi,
            &breaks,
            Tolerance::abs(tol).with_max_panels(400),
        )
    }
}

/// `∫_{ℝ^n} ∏ f_i(x_i) det K(x_j, x_k) dx` via the Fourier-space expansion of
/// the determinant. `tol` is the absolute tolerance on the total.
pub fn rmt_integral(fs: &[TestFunction], tol: f64) -> Result<RmtIntegral> {
    let n = fs.len();
    check_n(n)?;
    let terms = expand_determinant(n);
    // Group identical integrals; the signs of their occurrences add up.
    let mut groups: BTreeMap<Vec<Vec<i32>>, f64> = BTreeMap::new();
    for t in &terms {
        *groups.entry(t.key()).or_insert(0.0) += t.sign;
    }
    let active: Vec<(f64, Vec<Vec<Vec<i32>>>)> = groups
        .into_iter()
        .filter(|(_, w)| *w != 0.0)
        .map(|(rows, w)| (w, components(n, &rows)))
        .collect();

    // Each product integral factorises over connected groups of coordinates;
    // distinct factors are computed once.
    let mut unique: BTreeMap<Vec<Vec<i32>>, Estimate> = BTreeMap::new();
    for (_, comps) in &active {
        for c in comps {
            unique.entry(c.clone()).or_default();
        }
    }
    let weight_sum: f64 = active.iter().map(|(w, _)| w.abs()).sum::<f64>().max(1.0);
    let per_factor = 0.5 * tol / (weight_sum * n as f64);
    let keys: Vec<Vec<Vec<i32>>> = unique.keys().cloned().collect();
    let values: Vec<Estimate> = keys
        .par_iter()
        .map(|rows| BoxIntegrand::new(fs, rows, per_factor).integrate())
        .collect();
    for (k, v) in keys.into_iter().zip(values) {
        unique.insert(k, v);
    }

    let parts: Vec<Estimate> = active
        .iter()
        .map(|(w, comps)| {
            let mut touched = vec![false; n];
            let mut value = 1.0;
            let mut rel_err = 0.0;
            for c in comps {
                for row in c {
                    for i in 0..n {
                        touched[i] |= row[i] != 0;
                    }
                }
                let e = unique[c];
                value *= e.value;
                rel_err += e.error / e.value.abs().max(1e-300);
            }
            for i in 0..n {
                if !touched[i] {
                    value *= fs[i].fhat(0.0);
                }
            }
            Estimate {
                value: w * value,
                error: (w * value).abs() * rel_err,
            }
        })
        .collect();
    let mut total = Estimate::default();
    for p in parts {
        total = total + p;
    }
    if total.error > tol {
        return Err(Error::Tolerance {
            value: total.value,
            error: total.error,
            tol,
        });
    }
    Ok(RmtIntegral {
        value: total.value,
        est_error: total.error,
        n,
    })
}

/// Options for [`rmt_integral_xspace`].
#[derive(Debug, Clone, Copy)]
pub struct XSpaceOptions {
    /// Half-width B of the truncation cube; `None` picks 20 for families with
    /// algebraic decay and 8 for the smooth bump.
    pub half_width: Option<f64>,
    pub panels_per_unit: usize,
    pub order: usize,
}

impl Default for XSpaceOptions {
    fn default() -> Self {
        Self {
            half_width: None,
            panels_per_unit: 2,
            order: 10,
        }
    }
}

/// `∫ ∏ f_i(x_i) W(x) dx` over `[-B, B]^n` by tensor Gauss–Legendre panels.
///
/// `est_error` combines the difference against a lower-order rule on the same
/// panels with an estimate of the mass of the `f_i` outside `[-B, B]`.
pub fn rmt_integral_xspace(fs: &[TestFunction], opts: XSpaceOptions) -> Result<RmtIntegral> {
    let n = fs.len();
    check_n(n)?;
    let b = opts.half_width.unwrap_or_else(|| {
        if fs.iter().all(|f| f.family() == Family::Bump) {
            8.0
        } else {
            20.0
        }
    });
    if !(b > 0.0) || opts.order < 3 || opts.panels_per_unit == 0 {
        return Err(Error::InvalidParameter("x-space rule needs B > 0, order ≥ 3".into()));
    }
    let panels = (2.0 * b * opts.panels_per_unit as f64).ceil() as usize;
    let high = tensor_sum(fs, b, panels, opts.order);
    let low = tensor_sum(fs, b, panels, opts.order - 2);

    let l1: Vec<f64> = fs.iter().map(|f| l1_norm(f, b)).collect();
    let tails: Vec<f64> = fs.iter().map(|f| tail_mass(f, b)).collect();
    // |W| ≤ 2^n is a safe envelope: rows of K have entries bounded by 2.
    let wmax = (2.0f64).powi(n as i32);
    let mut tail = 0.0;
    for i in 0..n {
        let others: f64 = (0..n).filter(|&k| k != i).map(|k| l1[k] + tails[k]).product();
        tail += tails[i] * others * wmax;
    }
    Ok(RmtIntegral {
        value: high,
        est_error: (high - low).abs() + tail,
        n,
    })
}

fn tensor_sum(fs: &[TestFunction], b: f64, panels: usize, order: usize) -> f64 {
    let n = fs.len();
    let (nodes, weights) = composite_rule(-b, b, panels, order);
    let m = nodes.len();
    let fw: Vec<Vec<f64>> = fs
        .iter()
        .map(|f| nodes.iter().zip(&weights).map(|(x, w)| w * f.f(*x)).collect())
        .collect();
    // kernel values between node pairs
    let mut kmat = vec![0.0; m * m];
    for a in 0..m {
        for c in a..m {
            let v = kernel(nodes[a], nodes[c]);
            kmat[a * m + c] = v;
            kmat[c * m + a] = v;
        }
    }
    let k = |a: usize, c: usize| kmat[a * m + c];
    match n {
        1 => (0..m).map(|a| fw[0][a] * k(a, a)).sum(),
        2 => (0..m)
            .into_par_iter()
            .map(|a| {
                let mut s = 0.0;
                for c in 0..m {
                    let kac = k(a, c);
                    s += fw[1][c] * (k(a, a) * k(c, c) - kac * kac);
                }
                fw[0][a] * s
            })
            .collect::<Vec<f64>>()
            .iter()
            .sum(),
        _ => (0..m)
            .into_par_iter()
            .map(|a| {
                let mut idx = vec![a; n];
                let mut s = 0.0;
                let mut mat = vec![0.0; n * n];
                // iterate the remaining n-1 indices as an odometer
                let mut counter = vec![0usize; n - 1];
                loop {
                    for (slot, &c) in counter.iter().enumerate() {
                        idx[slot + 1] = c;
                    }
                    let mut weight = fw[0][a];
                    for j in 1..n {
                        weight *= fw[j][idx[j]];
                    }
                    if weight != 0.0 {
                        for r in 0..n {
                            for c in 0..n {
                                mat[r * n + c] = k(idx[r], idx[c]);
                            }
                        }
                        s += weight * determinant(n, mat.clone());
                    }
                    let mut pos = 0;
                    loop {
                        if pos == n - 1 {
                            return s;
                        }
                        counter[pos] += 1;
                        if counter[pos] < m {
                            break;
                        }
                        counter[pos] = 0;
                        pos += 1;
                    }
                }
            })
            .collect::<Vec<f64>>()
            .iter()
            .sum(),
    }
}

fn l1_norm(f: &TestFunction, b: f64) -> f64 {
    let (nodes, weights) = composite_rule(-b, b, (4.0 * b).ceil() as usize, 8);
    nodes.iter().zip(&weights).map(|(x, w)| w * f.f(*x).abs()).sum()
}

/// Estimate of `∫_{|x|>B} |f|`: quadrature on `[B, 8B]` plus an `x^{-2}`
/// envelope fitted on `[4B, 8B]` for the remainder.
fn tail_mass(f: &TestFunction, b: f64) -> f64 {
    let far = 8.0 * b;
    let (nodes, weights) = composite_rule(b, far, (8.0 * b).ceil() as usize, 8);
    let mut mass = 0.0;
    let mut envelope: f64 = 0.0;
    for (x, w) in nodes.iter().zip(&weights) {
        let v = f.f(*x).abs();
        mass += w * v;
        if *x >= 4.0 * b {
            envelope = envelope.max(v * (x / far).powi(2));
        }
    }
    2.0 * (mass + envelope * far)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_examples() {
        assert_eq!(kernel(0.0, 0.0), 0.0);
        assert!((kernel(0.5, 0.5) - 1.0).abs() < 1e-15);
        assert!((kernel(0.25, 0.25) - (1.0 - 2.0 / std::f64::consts::PI)).abs() < 1e-15);
        assert!((kernel(0.3, 1.7) - kernel(1.7, 0.3)).abs() < 1e-16);
    }

    #[test]
    fn density_examples() {
        assert_eq!(density_w(&[0.0]), 0.0);
        assert!((density_w(&[0.5]) - 1.0).abs() < 1e-15);
        for a in [0.1, 0.7, 2.3] {
            assert!(density_w(&[a, a]).abs() < 1e-15);
        }
    }

    #[test]
    fn lu_matches_cofactor_expansion() {
        let x = [0.13, 0.71, 1.9];
        let k = KernelMatrix::new(&x);
        let g = |j, c| k.get(j, c);
        let cof = g(0, 0) * (g(1, 1) * g(2, 2) - g(1, 2) * g(2, 1))
            - g(0, 1) * (g(1, 0) * g(2, 2) - g(1, 2) * g(2, 0))
            + g(0, 2) * (g(1, 0) * g(2, 1) - g(1, 1) * g(2, 0));
        assert!((k.determinant() - cof).abs() < 1e-14);
    }

    #[test]
    fn expansion_has_expected_size() {
        assert_eq!(expand_determinant(1).len(), 2);
        assert_eq!(expand_determinant(2).len(), 8);
        assert_eq!(expand_determinant(3).len(), 48);
    }

    #[test]
    fn one_level_examples() {
        let t2 = TestFunction::triangle(2.0).unwrap();
        let r = rmt_integral(&[t2], 1e-10).unwrap();
        assert!((r.value - 0.25).abs() < 1e-9);
        let t1 = TestFunction::triangle(1.0).unwrap();
        assert!((rmt_integral(&[t1], 1e-10).unwrap().value - 0.5).abs() < 1e-9);
        let z = TestFunction::zero(1.0).unwrap();
        assert_eq!(rmt_integral(&[z], 1e-10).unwrap().value, 0.0);
    }

    #[test]
    fn guard_on_dimension() {
        assert!(rmt_integral(&[], 1e-6).is_err());
        let t = TestFunction::triangle(0.1).unwrap();
        assert!(rmt_integral(&vec![t; 5], 1e-6).is_err());
    }
}
