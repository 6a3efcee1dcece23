//! Brute-force family sums over the quadratic characters `χ_8d`, the smooth
//! cutoff Φ and its transform Φ̃, and numeric forms of the Poisson identity
//! for `Σ M_Z(d)(d/k)Φ(d/X)` and of the alternating theta sum.
//!
//! All sums over d are split into fixed chunks that are evaluated in
//! parallel and merged in chunk order with compensated summation, so the
//! result does not depend on the number of threads.

use std::f64::consts::PI;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numtheory::{gauss_g, jacobi_u, mobius, odd_squarefree_in, PrimeTable};
use crate::quadrature::{gauss_legendre, KahanSum};
use crate::testfun::TestFunction;

/// Numbers per parallel chunk of the d-range.
const CHUNK: u64 = 2048;
/// Largest X for the direct sums.
pub const MAX_EMPIRICAL_X: u64 = 1_000_000;
/// Default ceiling on (number of d) × (number of primes) for family sums.
pub const DEFAULT_MAX_WORK: f64 = 2e11;
/// Highest derivative order used in the Φ̃ tail bounds.
const MAX_JET: usize = 12;

// ---------------------------------------------------------------------------
// Smooth cutoff

/// Taylor coefficients `f^{(k)}(t)/k!`, k < MAX_JET.
#[derive(Debug, Clone, Copy)]
struct Jet([f64; MAX_JET]);

impl Jet {
    fn variable(t: f64, slope: f64) -> Self {
        let mut c = [0.0; MAX_JET];
        c[0] = t;
        c[1] = slope;
        Jet(c)
    }

    fn mul(&self, o: &Jet) -> Jet {
        let mut c = [0.0; MAX_JET];
        for i in 0..MAX_JET {
            for j in 0..MAX_JET - i {
                c[i + j] += self.0[i] * o.0[j];
            }
        }
        Jet(c)
    }

    fn add(&self, o: &Jet) -> Jet {
        let mut c = self.0;
        for (x, y) in c.iter_mut().zip(o.0) {
            *x += y;
        }
        Jet(c)
    }

    fn recip(&self) -> Jet {
        let mut r = [0.0; MAX_JET];
        r[0] = 1.0 / self.0[0];
        for k in 1..MAX_JET {
            let s: f64 = (1..=k).map(|i| self.0[i] * r[k - i]).sum();
            r[k] = -s * r[0];
        }
        Jet(r)
    }

    fn exp(&self) -> Jet {
        let mut h = [0.0; MAX_JET];
        h[0] = self.0[0].exp();
        for k in 1..MAX_JET {
            let s: f64 = (1..=k).map(|i| i as f64 * self.0[i] * h[k - i]).sum();
            h[k] = s / k as f64;
        }
        Jet(h)
    }
}

/// exp(−1/t) for t > 0, else 0, as a jet in t.
fn g_jet(t: f64, slope: f64) -> Jet {
    if t <= 0.0 {
        return Jet([0.0; MAX_JET]);
    }
    let mut inv = Jet::variable(t, slope).recip();
    for c in inv.0.iter_mut() {
        *c = -*c;
    }
    inv.exp()
}

/// Jet of the smoothstep s(t) = g(t)/(g(t) + g(1−t)) on [0, 1].
fn step_jet(t: f64) -> Jet {
    let a = g_jet(t, 1.0);
    let b = g_jet(1.0 - t, -1.0);
    a.mul(&a.add(&b).recip())
}

fn step(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let a = (-1.0 / t).exp();
        let b = (-1.0 / (1.0 - t)).exp();
        a / (a + b)
    }
}

/// `c_j = ∫_0^1 |s^{(j)}(t)| dt`, measured once.
fn step_derivative_norms() -> &'static [f64; MAX_JET] {
    static NORMS: OnceLock<[f64; MAX_JET]> = OnceLock::new();
    NORMS.get_or_init(|| {
        let (x, w) = gauss_legendre(16);
        let panels = 400;
        let mut out = [0.0; MAX_JET];
        let mut fact = 1.0;
        let mut facts = [1.0; MAX_JET];
        for (j, f) in facts.iter_mut().enumerate().skip(1) {
            fact *= j as f64;
            *f = fact;
        }
        for p in 0..panels {
            let lo = p as f64 / panels as f64;
            let half = 0.5 / panels as f64;
            for (xi, wi) in x.iter().zip(&w) {
                let jet = step_jet(lo + half * (1.0 + xi));
                for j in 0..MAX_JET {
                    out[j] += wi * half * (jet.0[j] * facts[j]).abs();
                }
            }
        }
        out
    })
}

/// Φ supported on [1, 2], equal to 1 on [1 + 1/U, 2 − 1/U], with smoothstep
/// transitions. `complement` selects Φ_1 = 1 − Φ on [1, 2].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SmoothCutoff {
    u: f64,
    complement: bool,
}

impl SmoothCutoff {
    pub fn new(u: f64) -> Result<Self> {
        if !(u >= 2.0 && u.is_finite()) {
            return Err(Error::InvalidParameter(format!("cutoff needs U ≥ 2, got {u}")));
        }
        Ok(Self {
            u,
            complement: false,
        })
    }

    /// Φ_1(t) = 1 − Φ(t) on [1, 2], zero elsewhere.
    pub fn complement(self) -> Self {
        Self {
            complement: !self.complement,
            ..self
        }
    }

    pub fn u(&self) -> f64 {
        self.u
    }

    pub fn is_complement(&self) -> bool {
        self.complement
    }

    fn smooth(&self, t: f64) -> f64 {
        if t <= 1.0 || t >= 2.0 {
            0.0
        } else {
            step((t - 1.0) * self.u).min(step((2.0 - t) * self.u))
        }
    }

    pub fn phi(&self, t: f64) -> f64 {
        if self.complement {
            if (1.0..=2.0).contains(&t) {
                1.0 - self.smooth(t)
            } else {
                0.0
            }
        } else {
            self.smooth(t)
        }
    }

    /// Φ^{(j)}(t) for j < 12 (of the smooth cutoff; the complement negates).
    pub fn derivative(&self, t: f64, j: usize) -> f64 {
        assert!(j < MAX_JET);
        if t <= 1.0 || t >= 2.0 {
            return 0.0;
        }
        let fact: f64 = (1..=j).map(|i| i as f64).product();
        let (x, sign) = if t < 1.5 {
            ((t - 1.0) * self.u, 1.0)
        } else {
            ((2.0 - t) * self.u, if j % 2 == 0 { 1.0 } else { -1.0 })
        };
        let v = if x >= 1.0 {
            if j == 0 {
                1.0
            } else {
                0.0
            }
        } else {
            step_jet(x).0[j] * fact * self.u.powi(j as i32) * sign
        };
        if self.complement {
            if j == 0 {
                1.0 - v
            } else {
                -v
            }
        } else {
            v
        }
    }

    /// Φ̂(0) = ∫Φ.
    pub fn phi_hat0(&self) -> f64 {
        let smooth = 1.0 - 1.0 / self.u;
        if self.complement {
            1.0 - smooth
        } else {
            smooth
        }
    }

    /// `A(ξ) = ∫_{-1/2}^{1/2} cos(2πξy) Φ(3/2 + y) dy`; Φ is symmetric about 3/2.
    fn even_part(&self, xi: f64) -> f64 {
        let xi = xi.abs();
        let plateau_edge = 0.5 - 1.0 / self.u;
        let plateau = if xi == 0.0 {
            2.0 * plateau_edge
        } else {
            (2.0 * PI * xi * plateau_edge).sin() / (PI * xi)
        };
        // transition: (2/U) ∫_0^1 cos(2πξ(1/2 − t/U)) s(t) dt
        let panels = (8.0f64).max((4.0 * xi / self.u).ceil()) as usize;
        let (x, w) = gauss_legendre(16);
        let mut acc = KahanSum::default();
        let width = 1.0 / panels as f64;
        for p in 0..panels {
            let lo = p as f64 * width;
            for (xi_n, wi) in x.iter().zip(&w) {
                let t = lo + 0.5 * width * (1.0 + xi_n);
                acc.add(wi * 0.5 * width * (2.0 * PI * xi * (0.5 - t / self.u)).cos() * step(t));
            }
        }
        let smooth = plateau + 2.0 / self.u * acc.value();
        if self.complement {
            let full = if xi == 0.0 { 1.0 } else { (PI * xi).sin() / (PI * xi) };
            full - smooth
        } else {
            smooth
        }
    }

    /// Φ̃(ξ) = ∫ (cos 2πξx + sin 2πξx) Φ(x) dx.
    pub fn phi_tilde(&self, xi: f64) -> f64 {
        let a = self.even_part(xi);
        let th = 3.0 * PI * xi;
        (th.cos() + th.sin()) * a
    }

    /// Rigorous bound on |Φ̃(ξ)| from j-fold integration by parts,
    /// `√2 · 2U^{j−1} c_j / (2π|ξ|)^j`, minimised over j. Smooth cutoff only.
    pub fn phi_tilde_bound(&self, xi: f64) -> f64 {
        let norms = step_derivative_norms();
        let xi = xi.abs();
        let mut best = std::f64::consts::SQRT_2 * self.phi_hat0().max(1.0);
        if xi == 0.0 {
            return best;
        }
        for (j, c) in norms.iter().enumerate().skip(1) {
            let b = std::f64::consts::SQRT_2 * 2.0 * self.u.powi(j as i32 - 1) * c
                / (2.0 * PI * xi).powi(j as i32);
            best = best.min(b);
        }
        best
    }

    /// Bound on `Σ_{m > M} |Φ̃(m·scale)|`, using the j-th bound summed as
    /// `Σ_{m>M} m^{−j} ≤ M^{1−j}/(j−1)`.
    fn tail_bound(&self, m: u64, scale: f64) -> f64 {
        let norms = step_derivative_norms();
        let mut best = f64::INFINITY;
        for (j, c) in norms.iter().enumerate().skip(2) {
            let coeff = std::f64::consts::SQRT_2 * 2.0 * self.u.powi(j as i32 - 1) * c
                / (2.0 * PI * scale).powi(j as i32);
            best = best.min(coeff * (m as f64).powi(1 - j as i32) / (j as f64 - 1.0));
        }
        best
    }
}

// ---------------------------------------------------------------------------
// Poisson identity and theta sum

/// Both sides of the Poisson identity for `Σ_{(d,2)=1} M_Z(d)(d/k)Φ(d/X)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PoissonCheck {
    pub lhs: f64,
    pub rhs: f64,
    /// Largest |m| kept in the dual sum over all α.
    pub m_max: u64,
    /// Bound on the mass of the discarded m-terms.
    pub tail_bound: f64,
}

/// Target for the discarded part of the dual m-sum.
pub const POISSON_TAIL: f64 = 1e-10;
const MAX_POISSON_M: u64 = 50_000_000;

pub fn poisson_identity_check(k: u64, x: u64, z: u64, phi: SmoothCutoff) -> Result<PoissonCheck> {
    if k % 2 == 0 {
        return Err(Error::EvenModulus(k as i64));
    }
    if x == 0 || x > MAX_EMPIRICAL_X {
        return Err(Error::SizeGuard {
            what: "X",
            value: x,
            min: 1,
            max: MAX_EMPIRICAL_X,
        });
    }
    if z == 0 {
        return Err(Error::InvalidParameter("Z must be ≥ 1".into()));
    }
    if phi.is_complement() {
        return Err(Error::InvalidParameter("the dual side needs the smooth cutoff".into()));
    }
    let xf = x as f64;

    // lhs: direct sum over odd d in (X, 2X)
    let m_values = m_z_range(x, 2 * x, z);
    let mut lhs = KahanSum::default();
    for d in (x + 1..2 * x).filter(|d| d % 2 == 1) {
        let m = m_values[(d - x) as usize];
        if m != 0 {
            lhs.add(m as f64 * jacobi_u(d, k) as f64 * phi.phi(d as f64 / xf));
        }
    }

    // rhs: X/(2k)(2/k) Σ_α μ(α)/α² Σ_m (−1)^m G_m(k) Φ̃(mX/(2α²k))
    let alphas: Vec<u64> = (1..=z)
        .filter(|a| a % 2 == 1 && gcd(*a, k) == 1 && mobius(*a) != 0)
        .collect();
    let per_alpha = POISSON_TAIL / alphas.len().max(1) as f64;
    let mut rhs = KahanSum::default();
    let mut m_max = 0;
    let mut tail_total = 0.0;
    for &alpha in &alphas {
        let scale = xf / (2.0 * (alpha * alpha) as f64 * k as f64);
        let outer = xf / (2.0 * k as f64) / (alpha * alpha) as f64;
        // |G_m(k)| ≤ k; both signs of m
        let weight = outer * k as f64 * 2.0;
        let mut m_cut = 1u64;
        while weight * phi.tail_bound(m_cut, scale) > per_alpha {
            m_cut *= 2;
            if m_cut > MAX_POISSON_M {
                return Err(Error::Truncation {
                    achieved: weight * phi.tail_bound(m_cut, scale),
                    target: per_alpha,
                });
            }
        }
        // tighten by bisection
        let (mut lo, mut hi) = (m_cut / 2, m_cut);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if weight * phi.tail_bound(mid, scale) > per_alpha {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        m_cut = hi;
        m_max = m_max.max(m_cut);
        tail_total += weight * phi.tail_bound(m_cut, scale);

        let terms: Vec<f64> = (0..=m_cut)
            .into_par_iter()
            .map(|m| {
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                let xi = m as f64 * scale;
                let a = phi.even_part(xi);
                let th = 3.0 * PI * xi;
                let (c, s) = (th.cos() * a, th.sin() * a);
                let gp = gauss_g(m as i64, k as i64).unwrap_or(0.0);
                if m == 0 {
                    gp * (c + s)
                } else {
                    let gm = gauss_g(-(m as i64), k as i64).unwrap_or(0.0);
                    sign * (gp * (c + s) + gm * (c - s))
                }
            })
            .collect();
        let inner: KahanSum = terms.into_iter().collect();
        rhs.add(mobius(alpha) as f64 / (alpha * alpha) as f64 * inner.value());
    }
    let chi2 = jacobi_u(2, k) as f64;
    Ok(PoissonCheck {
        lhs: lhs.value(),
        rhs: xf / (2.0 * k as f64) * chi2 * rhs.value(),
        m_max,
        tail_bound: tail_total,
    })
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// M_Z(d) for d in [lo, hi] by sieving over odd squarefree l ≤ Z.
fn m_z_range(lo: u64, hi: u64, z: u64) -> Vec<i64> {
    let mut out = vec![0i64; (hi - lo + 1) as usize];
    let mut l = 1u64;
    while l <= z && l * l <= hi {
        let mu = mobius(l) as i64;
        if mu != 0 {
            let q = l * l;
            let mut m = lo.div_ceil(q) * q;
            while m <= hi {
                out[(m - lo) as usize] += mu;
                m += q;
            }
        }
        l += 1;
    }
    out
}

/// Σ_{m≥1} (−1)^m Φ̃(m²/y²), truncated where the tail bound drops below 1e−12.
pub fn alternating_theta_sum(phi: SmoothCutoff, y: f64) -> Result<f64> {
    if !(y > 0.0 && y.is_finite()) {
        return Err(Error::InvalidParameter(format!("y must be positive, got {y}")));
    }
    // terms are bounded by phi_tilde_bound(m²/y²); find where it is < 1e−12
    let mut m_cut = 1u64;
    while phi.phi_tilde_bound((m_cut * m_cut) as f64 / (y * y)) > 1e-12 {
        m_cut *= 2;
        if m_cut > MAX_POISSON_M {
            return Err(Error::Truncation {
                achieved: phi.phi_tilde_bound((m_cut * m_cut) as f64 / (y * y)),
                target: 1e-12,
            });
        }
    }
    let chunks: Vec<(u64, u64)> = (0..m_cut.div_ceil(CHUNK))
        .map(|c| (c * CHUNK + 1, ((c + 1) * CHUNK).min(m_cut)))
        .collect();
    let parts: Vec<f64> = chunks
        .par_iter()
        .map(|&(a, b)| {
            let mut s = KahanSum::default();
            for m in a..=b {
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                s.add(sign * phi.phi_tilde((m * m) as f64 / (y * y)));
            }
            s.value()
        })
        .collect();
    Ok(parts.into_iter().collect::<KahanSum>().value())
}

// ---------------------------------------------------------------------------
// Family sums

/// Parameters of a family sum; `None` fields take the asymptotic defaults
/// ε = 10(n+1) log log X / log X, U = log log X, Z = logⁿ⁺² X.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FamilyParams {
    pub epsilon: Option<f64>,
    pub z: Option<u64>,
    pub u: Option<f64>,
    pub max_work: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct FamilyConfig {
    pub x: u64,
    pub epsilon: f64,
    pub y: u64,
    pub z: u64,
    pub u: f64,
    pub ghats: Vec<TestFunction>,
    pub max_work: f64,
}

pub fn auto_epsilon(n: usize, x: u64) -> f64 {
    let l = (x as f64).ln();
    10.0 * (n as f64 + 1.0) * l.ln() / l
}

pub fn auto_u(x: u64) -> f64 {
    (x as f64).ln().ln()
}

pub fn auto_z(n: usize, x: u64) -> u64 {
    (x as f64).ln().powi(n as i32 + 2).floor() as u64
}

impl FamilyConfig {
    pub fn new(x: u64, ghats: Vec<TestFunction>, params: FamilyParams) -> Result<Self> {
        let n = ghats.len();
        if !(1..=2).contains(&n) {
            return Err(Error::SizeGuard {
                what: "n",
                value: n as u64,
                min: 1,
                max: 2,
            });
        }
        if !(3..=MAX_EMPIRICAL_X).contains(&x) {
            return Err(Error::SizeGuard {
                what: "X",
                value: x,
                min: 3,
                max: MAX_EMPIRICAL_X,
            });
        }
        let epsilon = params.epsilon.unwrap_or_else(|| auto_epsilon(n, x));
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "ε = {epsilon:.4} must lie in (0, 1); the automatic choice only becomes valid \
                 for very large X, so pass ε explicitly"
            )));
        }
        let u = params.u.unwrap_or_else(|| auto_u(x));
        if !(u >= 2.0) {
            return Err(Error::InvalidParameter(format!(
                "U = {u:.4} must be ≥ 2; pass U explicitly at this X"
            )));
        }
        let z = params.z.unwrap_or_else(|| auto_z(n, x));
        if z < 1 {
            return Err(Error::InvalidParameter("Z must be ≥ 1".into()));
        }
        let total: f64 = ghats.iter().map(TestFunction::sigma).sum();
        if total > 2.0 - epsilon {
            return Err(Error::SupportViolation {
                total,
                bound: 2.0 - epsilon,
            });
        }
        let y = (x as f64).powf(2.0 - epsilon).floor() as u64;
        if y < 2 {
            return Err(Error::InvalidParameter(format!("Y = {y} must be ≥ 2")));
        }
        Ok(Self {
            x,
            epsilon,
            y,
            z,
            u,
            ghats,
            max_work: params.max_work.unwrap_or(DEFAULT_MAX_WORK),
        })
    }

    pub fn n(&self) -> usize {
        self.ghats.len()
    }

    /// π² / (4X logⁿX).
    pub fn normalisation(&self) -> f64 {
        PI * PI / (4.0 * self.x as f64 * (self.x as f64).ln().powi(self.n() as i32))
    }

    /// Largest prime that can contribute: p < X^σ_max and p ≤ Y.
    fn prime_limit(&self) -> u64 {
        let smax = self.ghats.iter().map(TestFunction::sigma).fold(0.0, f64::max);
        let cap = (self.x as f64).powf(smax).ceil() as u64;
        cap.min(self.y)
    }
}

/// Odd primes with their weights for each ĝ_i, pre-multiplied by the parts
/// of χ_8d(p) that do not depend on the residue of p mod d.
struct PrimeKernel {
    primes: Vec<u32>,
    /// weights[i][j] = log p_j/√p_j · ĝ_i(log p_j/log X)
    weights: Vec<Vec<f64>>,
    /// signed[i][f][j] = weights[i][j] · (2/p_j) · (−1)^{f·[p_j ≡ 3 mod 4]}
    signed: Vec<[Vec<f64>; 2]>,
    y: u64,
    /// smallest prime factor up to the largest d, for the residue tables
    spf: Vec<u32>,
}

/// Per-worker buffers.
#[derive(Default)]
struct Scratch {
    table: Vec<i8>,
    values: [Vec<f64>; 2],
    prefix: Vec<f64>,
}

impl PrimeKernel {
    fn new(cfg: &FamilyConfig, d_max: u64) -> Result<Self> {
        let limit = cfg.prime_limit();
        let count_estimate = if limit < 3 {
            0.0
        } else {
            limit as f64 / (limit as f64).ln()
        };
        let d_count = cfg.x as f64 / 2.0;
        let work = d_count * count_estimate;
        if work > cfg.max_work {
            return Err(Error::CostGuard(format!(
                "about {work:.2e} character evaluations (X = {}, primes up to {limit}) exceed the \
                 limit {:.2e}",
                cfg.x, cfg.max_work
            )));
        }
        if limit > u32::MAX as u64 {
            return Err(Error::CostGuard(format!("prime range {limit} too large")));
        }
        let table = PrimeTable::new(limit);
        let lx = (cfg.x as f64).ln();
        let n = cfg.n();
        let mut primes = Vec::new();
        let mut weights = vec![Vec::new(); n];
        let mut signed: Vec<[Vec<f64>; 2]> = vec![[Vec::new(), Vec::new()]; n];
        for &p in table.primes() {
            if p == 2 {
                continue;
            }
            let lp = (p as f64).ln();
            let ws: Vec<f64> = cfg
                .ghats
                .iter()
                .map(|g| lp / (p as f64).sqrt() * g.fhat(lp / lx))
                .collect();
            if ws.iter().all(|w| *w == 0.0) {
                continue;
            }
            let two = if p % 8 == 1 || p % 8 == 7 { 1.0 } else { -1.0 };
            let flip = if p % 4 == 3 { -1.0 } else { 1.0 };
            primes.push(p as u32);
            for (i, w) in ws.into_iter().enumerate() {
                weights[i].push(w);
                signed[i][0].push(two * w);
                signed[i][1].push(two * flip * w);
            }
        }
        let use_table = primes.len() * 16 > d_max as usize;
        Ok(Self {
            spf: smallest_prime_factors(if use_table { d_max } else { 0 }),
            primes,
            weights,
            signed,
            y: cfg.y,
        })
    }

    /// Fills `scratch.values[i][j] = w_i(p_j) χ_8d(p_j)`; for n = 1 with
    /// `sum_only` it returns the sum directly and leaves the buffers alone.
    fn fill(&self, d: u64, scratch: &mut Scratch, sum_only: bool) -> f64 {
        let n = self.weights.len();
        if d < self.spf.len() as u64 {
            // reciprocity: (8d/p) = (2/p)(p/d)(−1)^{(d−1)(p−1)/4}
            residue_table(d, &self.spf, &mut scratch.table);
            let f = usize::from(d % 4 == 3);
            // Lemire's remainder by multiplication
            let magic = u64::MAX / d + 1;
            let residue = |p: u32| -> usize {
                let low = magic.wrapping_mul(p as u64);
                ((low as u128 * d as u128) >> 64) as usize
            };
            if sum_only {
                let w = &self.signed[0][f];
                let mut acc = [0.0f64; 4];
                let mut chunks = self.primes.chunks_exact(4).zip(w.chunks_exact(4));
                for (ps, ws) in &mut chunks {
                    for k in 0..4 {
                        acc[k] += ws[k] * scratch.table[residue(ps[k])] as f64;
                    }
                }
                let tail = self.primes.len() - self.primes.len() % 4;
                let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
                for j in tail..self.primes.len() {
                    s += w[j] * scratch.table[residue(self.primes[j])] as f64;
                }
                return s;
            }
            for i in 0..n {
                let w = &self.signed[i][f];
                let out = &mut scratch.values[i];
                out.clear();
                out.extend(
                    self.primes
                        .iter()
                        .zip(w)
                        .map(|(&p, &wj)| wj * scratch.table[residue(p)] as f64),
                );
            }
        } else {
            let chi: Vec<f64> = self
                .primes
                .iter()
                .map(|&p| {
                    let p = p as u64;
                    jacobi_u((8 * (d % p)) % p, p) as f64
                })
                .collect();
            if sum_only {
                return chi.iter().zip(&self.weights[0]).map(|(c, w)| c * w).sum();
            }
            for i in 0..n {
                let out = &mut scratch.values[i];
                out.clear();
                out.extend(chi.iter().zip(&self.weights[i]).map(|(c, w)| c * w));
            }
        }
        0.0
    }

    /// `Σ_{∏p_i ≤ Y} ∏ w_i(p_i) χ_8d(p_i)`.
    fn prime_sum(&self, d: u64, scratch: &mut Scratch) -> f64 {
        if self.weights.len() == 1 {
            // primes beyond Y were never admitted for n = 1
            return self.fill(d, scratch, true);
        }
        self.fill(d, scratch, false);
        // Σ_{p1} a1(p1) · Σ_{p2 ≤ Y/p1} a2(p2), with a prefix sum of a2
        let [a1, a2] = &scratch.values;
        let prefix = &mut scratch.prefix;
        prefix.clear();
        prefix.push(0.0);
        let mut run = 0.0;
        for v in a2 {
            run += v;
            prefix.push(run);
        }
        let mut s = 0.0;
        let mut end = a2.len();
        for (j, &v) in a1.iter().enumerate() {
            if v == 0.0 {
                continue;
            }
            let bound = self.y / self.primes[j] as u64;
            while end > 0 && self.primes[end - 1] as u64 > bound {
                end -= 1;
            }
            s += v * prefix[end];
        }
        s
    }
}

fn smallest_prime_factors(limit: u64) -> Vec<u32> {
    let n = limit as usize + 1;
    let mut spf = vec![0u32; n];
    for i in 2..n {
        if spf[i] == 0 {
            let mut j = i;
            while j < n {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    spf
}

/// `table[r] = (r/d)` for `0 ≤ r < d`, built multiplicatively in r.
fn residue_table(d: u64, spf: &[u32], table: &mut Vec<i8>) {
    let n = d as usize;
    table.clear();
    table.resize(n, 0);
    if n == 1 {
        table[0] = 1;
        return;
    }
    table[1] = 1;
    for r in 2..n {
        let p = spf[r] as usize;
        table[r] = if p == r {
            jacobi_u(r as u64, d) as i8
        } else {
            table[p] * table[r / p]
        };
    }
}

/// Chunks of the d-range `[lo, hi]`.
fn chunks(lo: u64, hi: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    let mut a = lo;
    while a <= hi {
        let b = (a + CHUNK - 1).min(hi);
        out.push((a, b));
        a = b + 1;
    }
    out
}

/// S(X, Y; ∏ĝ_i): the sum over odd squarefree X ≤ d ≤ 2X (both endpoints
/// included) of the prime sum over `∏ p_i ≤ Y`.
pub fn family_sum_direct(cfg: &FamilyConfig) -> Result<f64> {
    let hi = 2 * cfg.x;
    let kernel = PrimeKernel::new(cfg, hi)?;
    let small = PrimeTable::new(hi.isqrt() + 1);
    let parts: Vec<f64> = chunks(cfg.x, hi)
        .par_iter()
        .map(|&(a, b)| {
            let mut scratch = Scratch::default();
            let mut s = KahanSum::default();
            for d in odd_squarefree_in(a, b, small.primes()) {
                s.add(kernel.prime_sum(d, &mut scratch));
            }
            s.value()
        })
        .collect();
    Ok(parts.into_iter().collect::<KahanSum>().value())
}

/// The smoothed sum and its split by μ² = M_Z + R_Z, from one traversal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SmoothedSums {
    pub total: f64,
    pub m_part: f64,
    pub r_part: f64,
}

/// Smoothed sums over odd d with weight Φ(d/X).
pub fn smoothed_sums(cfg: &FamilyConfig, phi: SmoothCutoff) -> Result<SmoothedSums> {
    let (lo, hi) = (cfg.x, 2 * cfg.x);
    let kernel = PrimeKernel::new(cfg, hi)?;
    let small = PrimeTable::new(hi.isqrt() + 1);
    let xf = cfg.x as f64;
    let parts: Vec<[f64; 3]> = chunks(lo, hi)
        .par_iter()
        .map(|&(a, b)| {
            let squarefree = odd_squarefree_in(a, b, small.primes());
            let mz = m_z_range(a, b, cfg.z);
            let mut scratch = Scratch::default();
            let mut sums = [KahanSum::default(); 3];
            let mut sf = squarefree.iter().peekable();
            for d in (a..=b).filter(|d| d % 2 == 1) {
                let mu2 = if sf.peek() == Some(&&d) {
                    sf.next();
                    1
                } else {
                    0
                };
                let m = mz[(d - a) as usize];
                let r = mu2 - m;
                let w = phi.phi(d as f64 / xf);
                if w == 0.0 || (mu2 == 0 && m == 0 && r == 0) {
                    continue;
                }
                let p = w * kernel.prime_sum(d, &mut scratch);
                sums[0].add(mu2 as f64 * p);
                sums[1].add(m as f64 * p);
                sums[2].add(r as f64 * p);
            }
            [sums[0].value(), sums[1].value(), sums[2].value()]
        })
        .collect();
    let mut out = [KahanSum::default(); 3];
    for p in parts {
        for i in 0..3 {
            out[i].add(p[i]);
        }
    }
    Ok(SmoothedSums {
        total: out[0].value(),
        m_part: out[1].value(),
        r_part: out[2].value(),
    })
}

/// S(X, Y; ∏ĝ_i, Φ).
pub fn family_sum_smoothed(cfg: &FamilyConfig, phi: SmoothCutoff) -> Result<f64> {
    Ok(smoothed_sums(cfg, phi)?.total)
}

/// S_M: the smoothed sum with μ² replaced by M_Z.
pub fn family_sum_m(cfg: &FamilyConfig, phi: SmoothCutoff) -> Result<f64> {
    Ok(smoothed_sums(cfg, phi)?.m_part)
}

/// S_R: the smoothed sum with μ² replaced by R_Z.
pub fn family_sum_r(cfg: &FamilyConfig, phi: SmoothCutoff) -> Result<f64> {
    Ok(smoothed_sums(cfg, phi)?.r_part)
}

/// S(d, X; ĥ) = (1/log X) Σ_p (log p/√p)(8d/p)(ĥ(log p/log X) + ĥ(−log p/log X)).
pub fn prime_side_sum(d: u64, x: u64, h: &TestFunction) -> Result<f64> {
    if d % 2 == 0 || mobius(d) == 0 {
        return Err(Error::InvalidParameter(format!("d = {d} must be odd and squarefree")));
    }
    if x < 2 {
        return Err(Error::InvalidParameter(format!("X = {x} must be ≥ 2")));
    }
    if h.sigma() > 2.0 {
        return Err(Error::SupportViolation {
            total: h.sigma(),
            bound: 2.0,
        });
    }
    let lx = (x as f64).ln();
    let limit = (x as f64).powf(h.sigma()).ceil() as u64;
    let mut s = KahanSum::default();
    for &p in PrimeTable::new(limit).primes() {
        let chi = jacobi_u((8 * (d % p)) % p, p);
        if p == 2 || chi == 0 {
            continue;
        }
        let lp = (p as f64).ln();
        let u = lp / lx;
        s.add(lp / (p as f64).sqrt() * chi as f64 * (h.fhat(u) + h.fhat(-u)));
    }
    Ok(s.value() / lx)
}
