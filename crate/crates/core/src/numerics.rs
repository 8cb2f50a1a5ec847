//! Scalar special functions and quadrature rules shared by the SER engine and
//! the fading module.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::{DMatrix, SymmetricEigen};

/// Gaussian tail probability `Q(x) = P[N(0,1) > x]`.
pub fn q_function(x: f64) -> f64 {
    if x == f64::INFINITY {
        return 0.0;
    }
    if x == f64::NEG_INFINITY {
        return 1.0;
    }
    0.5 * libm::erfc(x * FRAC_1_SQRT_2)
}

pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

/// Surface area of the unit sphere `S^{n-1}` in `R^n`.
pub fn sphere_area(n: usize) -> f64 {
    let half = n as f64 / 2.0;
    2.0 * PI.powf(half) / gamma(half)
}

/// Regularized upper incomplete gamma `Γ(s, x)/Γ(s)` for half-integer
/// `s = twice_s / 2`, built from the `s = 1/2` or `s = 1` base case with the
/// recurrence `Γ̄(s+1, x) = Γ̄(s, x) + x^s e^{-x} / Γ(s+1)`.
///
/// This is the tail `P[χ²_{2s} > 2x]`, i.e. the radial part of a Gaussian
/// integral outside a ball.
pub fn upper_gamma_half(twice_s: usize, x: f64) -> f64 {
    assert!(twice_s >= 1, "shape must be positive");
    if x <= 0.0 {
        return 1.0;
    }
    if x == f64::INFINITY {
        return 0.0;
    }
    let (mut s, mut acc) = if twice_s % 2 == 1 {
        (0.5, libm::erfc(x.sqrt()))
    } else {
        (1.0, (-x).exp())
    };
    // term = x^s e^{-x} / Γ(s+1)
    let mut term = (s * x.ln() - x - ln_gamma(s + 1.0)).exp();
    while 2.0 * s < twice_s as f64 - 0.5 {
        acc += term;
        s += 1.0;
        term *= x / s;
    }
    acc
}

/// `d^n/dρ^n Γ̄(s, ρ c)` with `s = twice_s / 2`, `c ≥ 0`, `n ≥ 0`.
///
/// For `n ≥ 1` this is `-(c^s/Γ(s)) D^{n-1}[ρ^{s-1} e^{-ρ c}]`, expanded with
/// Leibniz' rule.
pub fn upper_gamma_half_rho_derivative(twice_s: usize, order: usize, rho: f64, c: f64) -> f64 {
    if order == 0 {
        return upper_gamma_half(twice_s, rho * c);
    }
    if c == f64::INFINITY {
        return 0.0;
    }
    let s = twice_s as f64 / 2.0;
    let k = order - 1;
    let mut sum = 0.0;
    let mut falling = 1.0; // (s-1)(s-2)...(s-j)
    let mut binom = 1.0;
    for j in 0..=k {
        if j > 0 {
            falling *= s - j as f64;
            binom *= (k - j + 1) as f64 / j as f64;
        }
        if falling == 0.0 {
            break;
        }
        sum += binom * falling * rho.powf(s - 1.0 - j as f64) * (-c).powi((k - j) as i32);
    }
    let prefactor = (s * c.ln() - rho * c - ln_gamma(s)).exp();
    -prefactor * sum
}

// 21-point Gauss–Kronrod rule (QUADPACK qk21), nodes on [0, 1] half-interval.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689,
    0.973_906_528_517_171_720_077_964_012_084,
    0.930_157_491_355_708_226_001_207_180_059,
    0.865_063_366_688_984_510_732_096_688_423,
    0.780_817_726_586_416_897_063_717_578_345,
    0.679_409_568_299_024_406_234_327_365_114,
    0.562_757_134_668_604_683_339_000_099_272,
    0.433_395_394_129_247_190_799_265_943_165,
    0.294_392_862_701_460_198_131_126_603_103,
    0.148_874_338_981_631_210_884_826_001_129,
    0.0,
];
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062,
    0.032_558_162_307_964_727_478_818_972_459,
    0.054_755_896_574_351_996_031_381_300_244,
    0.075_039_674_810_919_952_767_043_140_916,
    0.093_125_454_583_697_605_535_065_465_083,
    0.109_387_158_802_297_641_899_210_590_325,
    0.123_491_976_262_065_851_077_208_745_644,
    0.134_709_217_311_473_325_928_054_001_771,
    0.142_775_938_577_060_080_797_094_273_138,
    0.147_739_104_901_338_491_374_841_515_972,
    0.149_445_554_002_916_905_664_936_468_389,
];
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893,
    0.149_451_349_150_580_593_145_776_339_657,
    0.219_086_362_515_982_043_995_534_934_228,
    0.269_266_719_309_996_355_091_226_921_569,
    0.295_524_224_714_752_870_173_892_994_651,
];

fn gk21<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[10] * fc;
    let mut gauss = 0.0;
    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(10).enumerate() {
        let dx = half * x;
        let pair = f(center - dx) + f(center + dx);
        kronrod += w * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    let kronrod = kronrod * half;
    let gauss = gauss * half;
    (kronrod, (kronrod - gauss).abs())
}

#[derive(Debug, Clone, Copy)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub converged: bool,
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Globally adaptive Gauss–Kronrod (G10/K21) integration of `f` over `[a, b]`.
///
/// Stops when the summed error estimate is below `max(abs_tol, rel_tol·|I|)`
/// or after `max_segments` bisections.
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_segments: usize,
) -> Integral {
    if a == b {
        return Integral { value: 0.0, error: 0.0, converged: true };
    }
    let (value, error) = gk21(&mut f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value, error });
    let mut total = value;
    let mut total_err = error;
    let mut segments = 1;
    loop {
        let target = abs_tol.max(rel_tol * total.abs());
        if total_err <= target {
            return Integral { value: total, error: total_err, converged: true };
        }
        if segments >= max_segments {
            return Integral { value: total, error: total_err, converged: false };
        }
        let worst = heap.pop().expect("heap holds at least one segment");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval exhausted at machine resolution
            heap.push(worst);
            return Integral { value: total, error: total_err, converged: false };
        }
        let (v1, e1) = gk21(&mut f, worst.a, mid);
        let (v2, e2) = gk21(&mut f, mid, worst.b);
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        heap.push(Segment { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Segment { a: mid, b: worst.b, value: v2, error: e2 });
        segments += 1;
        if segments % 64 == 0 {
            // resum to shed accumulated cancellation error
            total = heap.iter().map(|s| s.value).sum();
            total_err = heap.iter().map(|s| s.error).sum();
        }
    }
}

/// `∫_a^∞ f(x) dx` through the map `x = a + t/(1-t)`.
pub fn integrate_to_infinity<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_segments: usize,
) -> Integral {
    integrate(
        |t| {
            if t >= 1.0 {
                return 0.0;
            }
            let one_minus = 1.0 - t;
            let x = a + t / one_minus;
            let v = f(x) / (one_minus * one_minus);
            if v.is_finite() {
                v
            } else {
                0.0
            }
        },
        0.0,
        1.0,
        abs_tol,
        rel_tol,
        max_segments,
    )
}

/// Nodes and weights of the generalized Gauss–Laguerre rule for the weight
/// `x^alpha e^{-x}` on `[0, ∞)`, via Golub–Welsch. Weights are normalized to
/// sum to one, so `Σ w_k f(x_k) ≈ E[f(Y)]` for `Y ~ Gamma(alpha + 1, 1)`.
pub fn gauss_laguerre(n: usize, alpha: f64) -> Vec<(f64, f64)> {
    assert!(n >= 1 && alpha > -1.0);
    let mut jacobi = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        jacobi[(i, i)] = 2.0 * i as f64 + alpha + 1.0;
        if i + 1 < n {
            let k = (i + 1) as f64;
            let off = (k * (k + alpha)).sqrt();
            jacobi[(i, i + 1)] = off;
            jacobi[(i + 1, i)] = off;
        }
    }
    let eig = SymmetricEigen::new(jacobi);
    let mut rule: Vec<(f64, f64)> = (0..n)
        .map(|k| {
            let v0 = eig.eigenvectors[(0, k)];
            (eig.eigenvalues[k], v0 * v0)
        })
        .collect();
    rule.sort_by(|a, b| a.0.total_cmp(&b.0));
    rule
}

pub fn logspace(min: f64, max: f64, count: usize) -> Vec<f64> {
    assert!(min > 0.0 && max >= min && count >= 1);
    if count == 1 {
        return vec![min];
    }
    let (lo, hi) = (min.ln(), max.ln());
    (0..count)
        .map(|k| {
            if k + 1 == count {
                max
            } else {
                (lo + (hi - lo) * k as f64 / (count - 1) as f64).exp()
            }
        })
        .collect()
}

pub fn linspace(min: f64, max: f64, count: usize) -> Vec<f64> {
    assert!(count >= 1);
    if count == 1 {
        return vec![min];
    }
    (0..count)
        .map(|k| min + (max - min) * k as f64 / (count - 1) as f64)
        .collect()
}
