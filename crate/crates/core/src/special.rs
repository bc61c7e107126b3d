//! Modified Bessel functions of real positive argument.
//!
//! Every routine returns exponentially scaled values so that products of
//! regular and irregular solutions stay finite for large arguments:
//! `Î(x) = e^{-x} I(x)` and `K̂(x) = e^{x} K(x)`.
//!
//! Spherical functions use `i_l(x) = √(π/2x) I_{l+1/2}(x)` and
//! `k_l(x) = √(2/πx) K_{l+1/2}(x)`, so that `k_0(x) = e^{-x}/x`.

use std::f64::consts::PI;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const EPS: f64 = 1e-16;
const TINY: f64 = 1e-300;

/// Scaled cylindrical functions and their derivatives at one order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CylBessel {
    pub i: f64,
    pub k: f64,
    pub di: f64,
    pub dk: f64,
}

/// `(e^x K_0(x), e^x K_1(x))`.
pub fn bessel_k01_scaled(x: f64) -> (f64, f64) {
    assert!(x > 0.0, "bessel_k01_scaled requires x > 0, got {x}");
    if x <= 2.0 {
        let (k0, k1) = k01_series(x);
        let e = x.exp();
        (k0 * e, k1 * e)
    } else {
        k01_steed(x)
    }
}

fn i01_series(x: f64) -> (f64, f64) {
    let y = 0.25 * x * x;
    let (mut t0, mut t1) = (1.0, 1.0);
    let (mut i0, mut i1) = (1.0, 1.0);
    for k in 1..60 {
        let kf = k as f64;
        t0 *= y / (kf * kf);
        t1 *= y / (kf * (kf + 1.0));
        i0 += t0;
        i1 += t1;
        if t0 < EPS * i0 && t1 < EPS * i1 {
            break;
        }
    }
    (i0, 0.5 * x * i1)
}

fn k01_series(x: f64) -> (f64, f64) {
    let (i0, i1) = i01_series(x);
    let y = 0.25 * x * x;
    let mut term = 1.0;
    let mut harmonic = 0.0;
    let mut sum = 0.0;
    for k in 1..60 {
        let kf = k as f64;
        term *= y / (kf * kf);
        harmonic += 1.0 / kf;
        sum += term * harmonic;
        if term * harmonic < EPS * sum.abs() {
            break;
        }
    }
    let k0 = -((0.5 * x).ln() + EULER_GAMMA) * i0 + sum;
    // Wronskian I0 K1 + I1 K0 = 1/x
    let k1 = (1.0 / x - i1 * k0) / i0;
    (k0, k1)
}

/// Steed's continued fraction for `K_0`, `K_1` (Temme's normalization), scaled.
fn k01_steed(x: f64) -> (f64, f64) {
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut delh = d;
    let mut h = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 2..10_000 {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < EPS {
            break;
        }
    }
    h *= a1;
    let k0 = (PI / (2.0 * x)).sqrt() / s;
    let k1 = k0 * (x + 0.5 - h) / x;
    (k0, k1)
}

/// `x K_1(x) - 1`, accurate as `x → 0`.
pub fn k1_pole_remainder(x: f64) -> f64 {
    if x > 1.0 {
        return x * bessel_k01_scaled(x).1 * (-x).exp() - 1.0;
    }
    // K1(x) = 1/x + ln(x/2) I1(x) - (x/4) Σ (ψ(k+1) + ψ(k+2)) (x²/4)^k / (k!(k+1)!)
    let (_, i1) = i01_series(x);
    let y = 0.25 * x * x;
    let mut psi1 = -EULER_GAMMA;
    let mut psi2 = 1.0 - EULER_GAMMA;
    let mut term = 1.0;
    let mut sum = psi1 + psi2;
    for k in 1..60 {
        let kf = k as f64;
        term *= y / (kf * (kf + 1.0));
        psi1 += 1.0 / kf;
        psi2 += 1.0 / (kf + 1.0);
        let t = term * (psi1 + psi2);
        sum += t;
        if t.abs() < EPS * sum.abs() {
            break;
        }
    }
    x * (0.5 * x).ln() * i1 - 0.25 * x * x * sum
}

/// `e^x K_m(x)` for `m = 0..=m_max` by upward recurrence.
pub fn bessel_k_scaled_seq(m_max: usize, x: f64) -> Vec<f64> {
    let (k0, k1) = bessel_k01_scaled(x);
    let mut out = Vec::with_capacity(m_max + 2);
    out.push(k0);
    if m_max >= 1 {
        out.push(k1);
    }
    for m in 1..m_max {
        let next = out[m - 1] + 2.0 * m as f64 / x * out[m];
        out.push(next);
    }
    out
}

pub fn bessel_k_scaled(m: usize, x: f64) -> f64 {
    bessel_k_scaled_seq(m, x)[m]
}

/// `I_{ν+1}(x)/I_ν(x)` by modified Lentz evaluation of the continued fraction.
fn i_ratio(nu: f64, x: f64) -> f64 {
    let mut f = TINY;
    let mut c = f;
    let mut d = 0.0;
    for k in 1..1_000_000 {
        let b = 2.0 * (nu + k as f64) / x;
        d += b;
        if d == 0.0 {
            d = TINY;
        }
        c = b + 1.0 / c;
        if c == 0.0 {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < EPS {
            return f;
        }
    }
    f
}

/// Large-argument expansion of `e^{-x} I_ν(x)`, or `None` where it is not accurate.
fn i_scaled_asymptotic(nu: f64, x: f64) -> Option<f64> {
    if x < 40.0 + nu * nu {
        return None;
    }
    let mu = 4.0 * nu * nu;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        term *= -(mu - odd * odd) / (8.0 * kf * x);
        sum += term;
        if term.abs() < EPS * sum.abs() {
            return Some(sum / (2.0 * PI * x).sqrt());
        }
    }
    None
}

/// `e^{-x} I_m(x)`.
pub fn bessel_i_scaled(m: usize, x: f64) -> f64 {
    assert!(x > 0.0, "bessel_i_scaled requires x > 0, got {x}");
    if let Some(v) = i_scaled_asymptotic(m as f64, x) {
        return v;
    }
    let ks = bessel_k_scaled_seq(m + 1, x);
    let r = i_ratio(m as f64, x);
    // Wronskian I_m K_{m+1} + I_{m+1} K_m = 1/x
    1.0 / (x * (ks[m + 1] + r * ks[m]))
}

/// Scaled `I_m`, `K_m` and derivatives at order `m`.
pub fn cyl_bessel_scaled(m: usize, x: f64) -> CylBessel {
    let ks = bessel_k_scaled_seq(m + 1, x);
    let (i, i_next) = match i_scaled_asymptotic(m as f64, x) {
        Some(i) => (i, i_scaled_asymptotic(m as f64 + 1.0, x).unwrap_or_else(|| i * i_ratio(m as f64, x))),
        None => {
            let r = i_ratio(m as f64, x);
            let i = 1.0 / (x * (ks[m + 1] + r * ks[m]));
            (i, r * i)
        }
    };
    let mx = m as f64 / x;
    CylBessel { i, k: ks[m], di: i_next + mx * i, dk: -ks[m + 1] + mx * ks[m] }
}

/// `e^x k_l(x)` for `l = 0..=l_max` from the terminating series.
pub fn sph_bessel_k_scaled_seq(l_max: usize, x: f64) -> Vec<f64> {
    (0..=l_max).map(|l| sph_k_scaled(l, x)).collect()
}

fn sph_k_scaled(l: usize, x: f64) -> f64 {
    let inv2x = 0.5 / x;
    let mut c = 1.0;
    let mut pow = 1.0;
    let mut sum = 1.0;
    for j in 0..l {
        let jf = j as f64;
        c *= (l as f64 + jf + 1.0) * (l as f64 - jf) / (jf + 1.0);
        pow *= inv2x;
        sum += c * pow;
    }
    sum / x
}

/// `e^{-x} i_l(x)`.
pub fn sph_bessel_i_scaled(l: usize, x: f64) -> f64 {
    assert!(x > 0.0, "sph_bessel_i_scaled requires x > 0, got {x}");
    let lf = l as f64;
    if x >= (2.0 * lf * (lf + 1.0)).max(20.0) {
        // closed form, well conditioned once x exceeds l(l+1)
        let inv2x = 0.5 / x;
        let mut c = 1.0;
        let mut pow = 1.0;
        let mut alt = 1.0;
        let mut plain = 1.0;
        for j in 0..l {
            let jf = j as f64;
            c *= (lf + jf + 1.0) * (lf - jf) / (jf + 1.0);
            pow *= inv2x;
            let t = c * pow;
            plain += t;
            alt += if j % 2 == 0 { -t } else { t };
        }
        let sign = if l.is_multiple_of(2) { -1.0 } else { 1.0 };
        return (alt + sign * (-2.0 * x).exp() * plain) / (2.0 * x);
    }
    let r = i_ratio(lf + 0.5, x);
    1.0 / (x * x * (sph_k_scaled(l + 1, x) + r * sph_k_scaled(l, x)))
}

/// Scale-free products of spherical functions at one order.
///
/// With `ĩ = i + x i'` and `k̃ = k + x k'`:
/// `p = x i k`, `q = x ĩ k̃`, `s = x (i k̃ + ĩ k)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalProducts {
    pub p: f64,
    pub q: f64,
    pub s: f64,
}

pub fn spherical_products(l: usize, x: f64) -> SphericalProducts {
    let lf = l as f64;
    let i = sph_bessel_i_scaled(l, x);
    let i1 = sph_bessel_i_scaled(l + 1, x);
    let k = sph_k_scaled(l, x);
    let k1 = sph_k_scaled(l + 1, x);
    let it = x * i1 + (lf + 1.0) * i;
    let kt = -x * k1 + (lf + 1.0) * k;
    SphericalProducts { p: x * i * k, q: x * it * kt, s: 0.5 * x * (i * kt + it * k) }
}

/// Polylogarithm `Li_3(z)` for `|z| ≤ 1`.
pub fn polylog3(z: f64) -> f64 {
    assert!(z.abs() <= 1.0, "polylog3 needs |z| <= 1");
    if z == 1.0 {
        return ZETA3;
    }
    if z > 0.5 {
        return polylog3_near_one(z);
    }
    if z < -0.5 {
        // Li₃(z) + Li₃(-z) = Li₃(z²)/4
        return 0.25 * polylog3(z * z) - polylog3_near_one(-z);
    }
    let mut pow = z;
    let mut sum = 0.0;
    for n in 1..10_000 {
        let t = pow / (n as f64).powi(3);
        sum += t;
        if t.abs() < EPS * sum.abs() {
            break;
        }
        pow *= z;
    }
    sum
}

/// Expansion in `u = ln z` for `z` close to 1.
fn polylog3_near_one(z: f64) -> f64 {
    let u = z.ln();
    if u == 0.0 {
        return ZETA3;
    }
    // Li_3(e^u) = ζ(3) + ζ(2) u + (3/2 - ln(-u)) u²/2 + Σ_{k≥3, k≠2} ζ(3-k) u^k/k!
    let zeta2 = PI * PI / 6.0;
    let mut sum = ZETA3 + zeta2 * u + (1.5 - (-u).ln()) * u * u / 2.0;
    // ζ(3-k) for k = 3, 4, ... : ζ(0) = -1/2, ζ(-1) = -1/12, ζ(-2) = 0, ζ(-3) = 1/120, ...
    let zeta_neg = [-0.5, -1.0 / 12.0, 0.0, 1.0 / 120.0, 0.0, -1.0 / 252.0, 0.0, 1.0 / 240.0, 0.0, -1.0 / 132.0];
    let mut fact = 2.0;
    let mut pow = u * u;
    for (j, z) in zeta_neg.iter().enumerate() {
        let k = j as f64 + 3.0;
        fact *= k;
        pow *= u;
        sum += z * pow / fact;
    }
    sum
}

/// Apéry's constant ζ(3).
pub const ZETA3: f64 = 1.202_056_903_159_594_3;

/// Gauss-Legendre nodes and weights on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, z);
                dp = d;
                let dz = p / d;
                z -= dz;
                if dz.abs() < 1e-15 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, z);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - z * z) * dp * dp);
            nodes[i] = -z;
            nodes[n - 1 - i] = z;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn on(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let h = 0.5 * (b - a);
        let c = 0.5 * (a + b);
        self.nodes.iter().zip(&self.weights).map(move |(&x, &w)| (c + h * x, h * w))
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}
