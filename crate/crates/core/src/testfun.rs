//! Even test functions whose Fourier transforms have compact support.
//!
//! Fourier convention: `f̂(u) = ∫ f(x) e^{-2πiux} dx`, so `∫ f = f̂(0)` and
//! `f(0) = ∫ f̂`. Every function here is even, so `f̂` is real and even; only
//! the half line `u ≥ 0` is ever stored.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre;

/// Default number of grid cells per unit of support radius for tabulated
/// transforms (h_u = σ / 2048).
pub const DEFAULT_CELLS: usize = 2048;

const PREFIX_GL_ORDER: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Triangle,
    TrianglePower,
    #[serde(alias = "smooth-bump")]
    Bump,
    Tabulated,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::Triangle => "triangle",
            Family::TrianglePower => "triangle-power",
            Family::Bump => "bump",
            Family::Tabulated => "tabulated",
        };
        f.write_str(s)
    }
}

/// JSON description of one factor: `{"family": "triangle", "sigma": 1.0}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionSpec {
    pub family: Family,
    pub sigma: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub power: Option<u32>,
}

impl FunctionSpec {
    pub fn build(&self) -> Result<TestFunction> {
        match self.family {
            Family::Triangle => TestFunction::triangle(self.sigma),
            Family::TrianglePower => {
                TestFunction::triangle_power(self.sigma, self.power.unwrap_or(2))
            }
            Family::Bump => TestFunction::smooth_bump(self.sigma),
            Family::Tabulated => Err(Error::InvalidParameter(
                "tabulated functions cannot be built from a config entry".into(),
            )),
        }
    }
}

/// Samples of an even transform at `u = k·step`, `k = 0..values.len()`,
/// evaluated between nodes by Catmull–Rom interpolation.
#[derive(Debug)]
struct HalfGrid {
    step: f64,
    values: Vec<f64>,
    /// Integral of the interpolant over `[0, k·step]`.
    prefix: Vec<f64>,
    /// Known points of reduced smoothness in `[-σ, σ]`.
    kinks: Vec<f64>,
}

impl HalfGrid {
    fn new(step: f64, values: Vec<f64>, kinks: Vec<f64>) -> Self {
        let mut grid = HalfGrid {
            step,
            values,
            prefix: Vec::new(),
            kinks,
        };
        let cells = grid.values.len().saturating_sub(1);
        let mut prefix = Vec::with_capacity(cells + 1);
        prefix.push(0.0);
        let mut acc = 0.0;
        for k in 0..cells {
            acc += grid.cell_integral(k, 1.0);
            prefix.push(acc);
        }
        grid.prefix = prefix;
        grid
    }

    #[inline]
    fn node(&self, k: isize) -> f64 {
        let k = k.unsigned_abs();
        self.values.get(k).copied().unwrap_or(0.0)
    }

    #[inline]
    fn cell_coeffs(&self, k: usize) -> [f64; 4] {
        let k = k as isize;
        let p0 = self.node(k - 1);
        let p1 = self.node(k);
        let p2 = self.node(k + 1);
        let p3 = self.node(k + 2);
        [
            p1,
            0.5 * (p2 - p0),
            0.5 * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3),
            0.5 * (-p0 + 3.0 * p1 - 3.0 * p2 + p3),
        ]
    }

    /// ∫_0^τ of the interpolant on cell k, τ in [0, 1], in units of u.
    fn cell_integral(&self, k: usize, tau: f64) -> f64 {
        let c = self.cell_coeffs(k);
        self.step * tau * (c[0] + tau * (c[1] / 2.0 + tau * (c[2] / 3.0 + tau * c[3] / 4.0)))
    }

    fn eval(&self, u: f64) -> f64 {
        let x = u.abs() / self.step;
        let k = x.floor() as usize;
        if k + 1 >= self.values.len() {
            return if k + 1 == self.values.len() && x == k as f64 {
                self.values[k]
            } else {
                0.0
            };
        }
        let t = x - k as f64;
        let c = self.cell_coeffs(k);
        c[0] + t * (c[1] + t * (c[2] + t * c[3]))
    }

    fn cumulative(&self, u: f64) -> f64 {
        let x = u / self.step;
        let k = x.floor() as usize;
        if k + 1 >= self.values.len() {
            return *self.prefix.last().unwrap_or(&0.0);
        }
        self.prefix[k] + self.cell_integral(k, x - k as f64)
    }
}

/// Prefix integrals of a smooth closed-form transform on a uniform half grid.
#[derive(Debug)]
struct PrefixTable {
    step: f64,
    prefix: Vec<f64>,
}

#[derive(Debug, Clone)]
enum Shape {
    /// f̂(u) = (1 − |u|/σ)^p on |u| < σ.
    Power(u32),
    /// f̂(u) = exp(−1/(1 − (u/σ)²)) on |u| < σ.
    Bump(Arc<PrefixTable>),
    Tabulated(Arc<HalfGrid>),
}

/// An even function `f` with `f̂` supported in `[-σ, σ]`.
#[derive(Debug, Clone)]
pub struct TestFunction {
    sigma: f64,
    shape: Shape,
}

fn check_sigma(sigma: f64) -> Result<()> {
    if sigma > 0.0 && sigma.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "support radius must be positive and finite, got {sigma}"
        )))
    }
}

#[inline]
fn bump_profile(u: f64, sigma: f64) -> f64 {
    let r = u / sigma;
    let q = 1.0 - r * r;
    if q <= 0.0 {
        0.0
    } else {
        (-1.0 / q).exp()
    }
}

/// Normalised sinc, sin(πt)/(πt), with a Taylor branch near 0.
#[inline]
pub fn sinc(t: f64) -> f64 {
    let x = PI * t;
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0))
    } else {
        x.sin() / x
    }
}

impl TestFunction {
    /// f̂(u) = max(0, 1 − |u|/σ), f(x) = σ·sinc²(σx).
    pub fn triangle(sigma: f64) -> Result<Self> {
        check_sigma(sigma)?;
        Ok(Self {
            sigma,
            shape: Shape::Power(1),
        })
    }

    /// f̂(u) = max(0, 1 − |u|/σ)^p, p ≥ 1.
    pub fn triangle_power(sigma: f64, power: u32) -> Result<Self> {
        check_sigma(sigma)?;
        if power == 0 {
            return Err(Error::InvalidParameter("triangle power must be ≥ 1".into()));
        }
        Ok(Self {
            sigma,
            shape: Shape::Power(power),
        })
    }

    /// f̂(u) = exp(−1/(1 − (u/σ)²)) on |u| < σ; f is Schwartz.
    pub fn smooth_bump(sigma: f64) -> Result<Self> {
        check_sigma(sigma)?;
        let cells = DEFAULT_CELLS;
        let step = sigma / cells as f64;
        let (x, w) = gauss_legendre(PREFIX_GL_ORDER);
        let mut prefix = Vec::with_capacity(cells + 1);
        prefix.push(0.0);
        let mut acc = 0.0;
        for k in 0..cells {
            let c = (k as f64 + 0.5) * step;
            let cell: f64 = x
                .iter()
                .zip(&w)
                .map(|(xi, wi)| wi * bump_profile(c + 0.5 * step * xi, sigma))
                .sum();
            acc += 0.5 * step * cell;
            prefix.push(acc);
        }
        Ok(Self {
            sigma,
            shape: Shape::Bump(Arc::new(PrefixTable { step, prefix })),
        })
    }

    /// Tabulated transform from samples `values[k] = f̂(k·step)`, `k ≥ 0`.
    /// Samples at or beyond `sigma` are forced to zero.
    pub fn tabulated(sigma: f64, step: f64, mut values: Vec<f64>, kinks: Vec<f64>) -> Result<Self> {
        check_sigma(sigma)?;
        if !(step > 0.0) || values.is_empty() {
            return Err(Error::InvalidParameter("tabulated grid needs a positive step and samples".into()));
        }
        for (k, v) in values.iter_mut().enumerate() {
            if k as f64 * step >= sigma {
                *v = 0.0;
            }
        }
        Ok(Self {
            sigma,
            shape: Shape::Tabulated(Arc::new(HalfGrid::new(step, values, kinks))),
        })
    }

    /// The zero function, with a nominal support radius.
    pub fn zero(sigma: f64) -> Result<Self> {
        let step = sigma / DEFAULT_CELLS as f64;
        Self::tabulated(sigma, step, vec![0.0; DEFAULT_CELLS + 1], Vec::new())
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn family(&self) -> Family {
        match self.shape {
            Shape::Power(1) => Family::Triangle,
            Shape::Power(_) => Family::TrianglePower,
            Shape::Bump(_) => Family::Bump,
            Shape::Tabulated(_) => Family::Tabulated,
        }
    }

    /// Natural grid step for this function when it is sampled.
    pub fn grid_step(&self) -> f64 {
        match &self.shape {
            Shape::Tabulated(g) => g.step,
            _ => self.sigma / DEFAULT_CELLS as f64,
        }
    }

    /// f̂(u).
    #[inline]
    pub fn fhat(&self, u: f64) -> f64 {
        let a = u.abs();
        if a >= self.sigma {
            return 0.0;
        }
        match &self.shape {
            Shape::Power(p) => (1.0 - a / self.sigma).powi(*p as i32),
            Shape::Bump(_) => bump_profile(a, self.sigma),
            Shape::Tabulated(g) => g.eval(a),
        }
    }

    /// ∫_0^x f̂(u) du for `x ≥ 0` (clipped at σ).
    pub fn cumulative(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let x = x.min(self.sigma);
        match &self.shape {
            Shape::Power(p) => {
                let q = *p as f64 + 1.0;
                self.sigma / q * (1.0 - (1.0 - x / self.sigma).powf(q))
            }
            Shape::Bump(t) => {
                let pos = x / t.step;
                let k = (pos.floor() as usize).min(t.prefix.len() - 1);
                let lo = k as f64 * t.step;
                if x <= lo {
                    return t.prefix[k];
                }
                let (gx, gw) = gauss_legendre(PREFIX_GL_ORDER);
                let half = 0.5 * (x - lo);
                let mid = lo + half;
                let part: f64 = gx
                    .iter()
                    .zip(&gw)
                    .map(|(xi, wi)| wi * bump_profile(mid + half * xi, self.sigma))
                    .sum();
                t.prefix[k] + half * part
            }
            Shape::Tabulated(g) => g.cumulative(x),
        }
    }

    /// Odd antiderivative of f̂ through the origin.
    fn antiderivative(&self, u: f64) -> f64 {
        if u >= 0.0 {
            self.cumulative(u)
        } else {
            -self.cumulative(-u)
        }
    }

    /// ∫_a^b f̂(u) du; infinite limits are allowed.
    pub fn integral_fhat(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return if a == b { 0.0 } else { -self.integral_fhat(b, a) };
        }
        let a = a.clamp(-self.sigma, self.sigma);
        let b = b.clamp(-self.sigma, self.sigma);
        self.antiderivative(b) - self.antiderivative(a)
    }

    /// ∫_ℝ f(x) dx = f̂(0).
    pub fn integral_f(&self) -> f64 {
        self.fhat(0.0)
    }

    /// Points of reduced smoothness of f̂ in `[-σ, σ]`, ascending.
    pub fn kinks(&self) -> Vec<f64> {
        let mut k = match &self.shape {
            Shape::Power(_) => vec![-self.sigma, 0.0, self.sigma],
            Shape::Bump(_) => vec![-self.sigma, self.sigma],
            Shape::Tabulated(g) => {
                let mut v = g.kinks.clone();
                v.extend([-self.sigma, 0.0, self.sigma]);
                v
            }
        };
        k.sort_by(f64::total_cmp);
        k.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
        k
    }

    /// f(x) = ∫ f̂(u) e^{2πiux} du = 2 ∫_0^σ f̂(u) cos(2πux) du.
    pub fn f(&self, x: f64) -> f64 {
        if let Shape::Power(1) = self.shape {
            let s = sinc(self.sigma * x);
            return self.sigma * s * s;
        }
        let base = match &self.shape {
            Shape::Tabulated(g) => (g.values.len() / 8).max(16),
            _ => 32,
        };
        let panels = base.max((8.0 * self.sigma * x.abs()).ceil() as usize);
        let (gx, gw) = gauss_legendre(16);
        let width = self.sigma / panels as f64;
        let omega = 2.0 * PI * x;
        let mut acc = 0.0;
        for k in 0..panels {
            let c = (k as f64 + 0.5) * width;
            let mut panel = 0.0;
            for (xi, wi) in gx.iter().zip(&gw) {
                let u = c + 0.5 * width * xi;
                panel += wi * self.fhat(u) * (omega * u).cos();
            }
            acc += panel;
        }
        acc * width
    }

    /// Samples f̂ on the symmetric grid `k·step`, `k = -K..=K`, `K = ⌈σ/step⌉`.
    fn symmetric_samples(&self, step: f64) -> Vec<f64> {
        let kmax = (self.sigma / step).ceil() as isize;
        (-kmax..=kmax).map(|k| self.fhat(k as f64 * step)).collect()
    }
}

/// Transform of the product `F(x) = ∏ f_i(x)`: the iterated convolution of
/// the `f̂_i`, tabulated on the finest of the factors' grid steps. The support
/// radius of the result is `Σ σ_i`.
pub fn product_transform(fs: &[TestFunction]) -> Result<TestFunction> {
    product_transform_coarsened(fs, 1)
}

/// [`product_transform`] on a grid `factor` times coarser than the default.
pub fn product_transform_coarsened(fs: &[TestFunction], factor: u32) -> Result<TestFunction> {
    match fs {
        [] => Err(Error::InvalidParameter("product of zero test functions".into())),
        [single] => Ok(single.clone()),
        _ => {
            let step = fs
                .iter()
                .map(TestFunction::grid_step)
                .fold(f64::INFINITY, f64::min)
                * factor.max(1) as f64;
            let mut acc = fs[0].symmetric_samples(step);
            let mut kinks = fs[0].kinks();
            for g in &fs[1..] {
                let next = g.symmetric_samples(step);
                acc = convolve(&acc, &next, step);
                let gk = g.kinks();
                let mut sums = Vec::with_capacity(kinks.len() * gk.len());
                for a in &kinks {
                    for b in &gk {
                        sums.push(a + b);
                    }
                }
                kinks = sums;
            }
            let sigma: f64 = fs.iter().map(TestFunction::sigma).sum();
            kinks.retain(|k| k.abs() < sigma);
            kinks.sort_by(f64::total_cmp);
            kinks.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
            let center = acc.len() / 2;
            let half = acc[center..].to_vec();
            TestFunction::tabulated(sigma, step, half, kinks)
        }
    }
}

/// Trapezoid-rule convolution of two symmetric, zero-padded sample vectors.
fn convolve(a: &[f64], b: &[f64], step: f64) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0.0 {
            continue;
        }
        let row = &mut out[i..i + b.len()];
        for (o, &y) in row.iter_mut().zip(b) {
            *o += x * y;
        }
    }
    for v in &mut out {
        *v *= step;
    }
    out
}

/// Validates `Σ σ_i ≤ bound`. Every family vanishes at `|u| = σ`, so the
/// transform of the product is nonzero only on `Σ|u_i| < bound`.
pub fn check_support(fs: &[TestFunction], bound: f64) -> Result<f64> {
    let total: f64 = fs.iter().map(TestFunction::sigma).sum();
    if total <= bound {
        Ok(total)
    } else {
        Err(Error::SupportViolation { total, bound })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
        let n = n + n % 2;
        let h = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for k in 1..n {
            let w = if k % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(a + k as f64 * h);
        }
        s * h / 3.0
    }

    #[test]
    fn triangle_examples() {
        let t = TestFunction::triangle(2.0).unwrap();
        assert_eq!(t.fhat(1.0), 0.5);
        assert!((t.f(0.0) - 2.0).abs() < 1e-15);
        assert_eq!(t.integral_f(), 1.0);
        assert!((t.integral_fhat(0.0, 1.0) - 0.75).abs() < 1e-15);
        assert_eq!(t.integral_fhat(2.0, f64::INFINITY), 0.0);
        let t1 = TestFunction::triangle(1.0).unwrap();
        assert!((t1.integral_fhat(f64::NEG_INFINITY, f64::INFINITY) - 1.0).abs() < 1e-15);
        assert!(TestFunction::triangle(0.0).is_err());
        assert!(TestFunction::triangle(-1.0).is_err());
    }

    #[test]
    fn bump_examples() {
        let b = TestFunction::smooth_bump(1.0).unwrap();
        assert!((b.fhat(0.0) - (-1.0f64).exp()).abs() < 1e-15);
        assert_eq!(b.fhat(1.0), 0.0);
        assert_eq!(b.fhat(-1.0), 0.0);
        assert!((b.integral_f() - (-1.0f64).exp()).abs() < 1e-15);
        // Independent oracle: composite Simpson with a million panels.
        let oracle = 2.0 * simpson(|u| bump_profile(u, 1.0), 0.0, 1.0, 1_000_000);
        assert!((oracle - 0.443_994).abs() < 5e-7, "{oracle}");
        assert!((b.f(0.0) - oracle).abs() < 1e-12);
        assert!((b.integral_fhat(-1.0, 1.0) - oracle).abs() < 1e-12);
        assert!(TestFunction::smooth_bump(0.0).is_err());
    }

    #[test]
    fn product_of_two_triangles() {
        let t = TestFunction::triangle(1.0).unwrap();
        let p = product_transform(&[t.clone(), t.clone()]).unwrap();
        assert_eq!(p.sigma(), 2.0);
        assert!((p.fhat(0.0) - 2.0 / 3.0).abs() < 1e-7);
        assert!((p.integral_f() - 2.0 / 3.0).abs() < 1e-7);
        // f(0)² = 1 = ∫ F̂.
        assert!((p.integral_fhat(f64::NEG_INFINITY, f64::INFINITY) - 1.0).abs() < 1e-7);
        assert_eq!(p.fhat(2.0), 0.0);
        let single = product_transform(&[t.clone()]).unwrap();
        assert_eq!(single.sigma(), 1.0);
        assert_eq!(single.family(), Family::Triangle);
        assert!(product_transform(&[]).is_err());
    }

    #[test]
    fn product_transform_matches_pointwise_product() {
        // F(x) = f1(x) f2(x) recovered through the inverse transform of F̂.
        let f1 = TestFunction::triangle(0.7).unwrap();
        let f2 = TestFunction::smooth_bump(0.9).unwrap();
        let p = product_transform(&[f1.clone(), f2.clone()]).unwrap();
        for &x in &[0.0, 0.3, 1.1, 2.5] {
            let want = f1.f(x) * f2.f(x);
            assert!((p.f(x) - want).abs() < 1e-7, "x={x}: {} vs {want}", p.f(x));
        }
    }

    #[test]
    fn parseval_for_triangles() {
        // ∫ f² dx = ∫ f̂² du = 2σ/3 for the triangle.
        for &sigma in &[0.5, 1.0, 1.7] {
            let t = TestFunction::triangle(sigma).unwrap();
            let rhs = 2.0 * sigma / 3.0;
            // ∫ σ² sinc⁴(σx) dx = (2/3)σ analytically.
            let lhs_analytic = sigma * 2.0 / 3.0;
            assert!(((lhs_analytic - rhs) / rhs).abs() <= 1e-8);
            let sq = product_transform(&[t.clone(), t.clone()]).unwrap();
            // F̂(0) = ∫ f̂(u) f̂(-u) du = ∫ f̂².
            assert!(((sq.fhat(0.0) - rhs) / rhs).abs() <= 1e-6);
        }
    }

    #[test]
    fn evenness() {
        let fs = [
            TestFunction::triangle(1.3).unwrap(),
            TestFunction::smooth_bump(0.8).unwrap(),
            TestFunction::triangle_power(1.1, 3).unwrap(),
            product_transform(&[
                TestFunction::triangle(0.4).unwrap(),
                TestFunction::smooth_bump(0.6).unwrap(),
            ])
            .unwrap(),
        ];
        for f in &fs {
            for k in 0..100 {
                let x = 0.137 * k as f64;
                assert_eq!(f.fhat(x), f.fhat(-x));
                assert!((f.f(x) - f.f(-x)).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn product_support_is_exact() {
        let a = TestFunction::triangle(0.5).unwrap();
        let b = TestFunction::triangle(0.8).unwrap();
        let p = product_transform(&[a, b]).unwrap();
        let h = p.grid_step();
        // Within one cell of the edge only the cubic tail c·(Σσ − u)³ remains.
        let mut u = 1.3 - h;
        while u < 1.6 {
            let bound = if u >= 1.3 { 0.0 } else { 1e-10 };
            assert!(p.fhat(u).abs() <= bound, "u={u}: {}", p.fhat(u));
            u += h / 3.0;
        }
    }

    #[test]
    fn triangle_power_cumulative_closed_form() {
        let t = TestFunction::triangle_power(1.5, 2).unwrap();
        let num = simpson(|u| t.fhat(u), 0.0, 0.9, 10_000);
        assert!((t.integral_fhat(0.0, 0.9) - num).abs() < 1e-12);
        assert_eq!(t.family(), Family::TrianglePower);
    }

    #[test]
    fn zero_function() {
        let z = TestFunction::zero(1.0).unwrap();
        assert_eq!(z.integral_f(), 0.0);
        assert_eq!(z.f(0.3), 0.0);
        assert_eq!(z.integral_fhat(f64::NEG_INFINITY, f64::INFINITY), 0.0);
    }
}
