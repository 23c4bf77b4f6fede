//! Special functions: log-gamma, erfc, the standard normal tail, and the
//! saddle-point pieces (`stirlerr`, `bd0`) used for accurate binomial and
//! hypergeometric log-probabilities at very large populations.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive};

/// Scalar bound for the numeric kernel.
pub trait Real:
    Float + FloatConst + FromPrimitive + Debug + Display + Sum + Send + Sync + 'static
{
}

impl<T> Real for T where
    T: Float + FloatConst + FromPrimitive + Debug + Display + Sum + Send + Sync + 'static
{
}

#[inline]
pub(crate) fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("literal representable in scalar type")
}

#[inline]
pub(crate) fn from_u64<T: Real>(x: u64) -> T {
    T::from_u64(x).expect("integer representable in scalar type")
}

// Lanczos approximation, g = 607/128, 15 terms (Godfrey).
const LANCZOS_G: f64 = 607.0 / 128.0;
const LANCZOS: [f64; 15] = [
    0.999_999_999_999_997_1,
    57.156_235_665_862_92,
    -59.597_960_355_475_49,
    14.136_097_974_741_747,
    -0.491_913_816_097_620_2,
    0.339_946_499_848_118_9e-4,
    0.465_236_289_270_485_8e-4,
    -0.983_744_753_048_795_6e-4,
    0.158_088_703_224_912_5e-3,
    -0.210_264_441_724_104_9e-3,
    0.217_439_618_115_212_6e-3,
    -0.164_318_106_536_763_9e-3,
    0.844_182_239_838_527_4e-4,
    -0.261_908_384_015_814_1e-4,
    0.368_991_826_595_316_2e-5,
];

/// Natural log of |Γ(x)|.
pub fn ln_gamma<T: Real>(x: T) -> T {
    let half = lit::<T>(0.5);
    if x < half {
        // Reflection: Γ(x)Γ(1-x) = π / sin(πx)
        let s = (T::PI() * x).sin().abs();
        return T::PI().ln() - s.ln() - ln_gamma(T::one() - x);
    }
    let z = x - T::one();
    let mut series = lit::<T>(LANCZOS[0]);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        series = series + lit::<T>(c) / (z + from_u64(i as u64));
    }
    let t = z + lit::<T>(LANCZOS_G) + half;
    half * (T::TAU()).ln() + (z + half) * t.ln() - t + series.ln()
}

/// `ln C(n, k)` for real arguments via log-gamma. Fine for moderate sizes;
/// use the saddle-point routines when `n` is in the billions.
pub fn ln_binomial<T: Real>(n: T, k: T) -> T {
    if k < T::zero() || k > n {
        return T::neg_infinity();
    }
    ln_gamma(n + T::one()) - ln_gamma(k + T::one()) - ln_gamma(n - k + T::one())
}

/// Complementary error function.
pub fn erfc<T: Real>(x: T) -> T {
    if x.is_nan() {
        return x;
    }
    if x < T::zero() {
        return lit::<T>(2.0) - erfc(-x);
    }
    if x < lit(2.0) {
        T::one() - erf_series(x)
    } else {
        erfc_continued_fraction(x)
    }
}

/// Error function.
pub fn erf<T: Real>(x: T) -> T {
    if x.abs() < lit(2.0) {
        let v = erf_series(x.abs());
        if x < T::zero() {
            -v
        } else {
            v
        }
    } else {
        T::one() - erfc(x)
    }
}

// erf(x) = 2/√π e^{-x²} Σ_n 2^n x^{2n+1} / (2n+1)!!, all terms positive.
fn erf_series<T: Real>(x: T) -> T {
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    let mut n = 0u64;
    loop {
        n += 1;
        term = term * lit::<T>(2.0) * x2 / from_u64::<T>(2 * n + 1);
        let next = sum + term;
        if next == sum || n > 500 {
            break;
        }
        sum = next;
    }
    T::FRAC_2_SQRT_PI() * (-x2).exp() * sum
}

// erfc(x) = e^{-x²}/√π · 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...)))), modified Lentz.
fn erfc_continued_fraction<T: Real>(x: T) -> T {
    let tiny = T::min_positive_value() / T::epsilon();
    let mut f = x;
    let mut c = f;
    let mut d = T::zero();
    for j in 1..2000u64 {
        let a = from_u64::<T>(j) * lit::<T>(0.5);
        d = x + a * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = x + a / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = d.recip();
        let delta = c * d;
        f = f * delta;
        if (delta - T::one()).abs() <= T::epsilon() {
            break;
        }
    }
    (-x * x).exp() * (T::FRAC_2_SQRT_PI() / lit::<T>(2.0)) / f
}

/// Φ^c(x) = P(Z ≥ x) for a standard normal Z.
pub fn normal_sf<T: Real>(x: T) -> T {
    lit::<T>(0.5) * erfc(x * T::FRAC_1_SQRT_2())
}

/// Φ(x).
pub fn normal_cdf<T: Real>(x: T) -> T {
    normal_sf(-x)
}

/// log Σ exp(v) over an iterator; `-inf` for an empty or all-`-inf` input.
pub fn log_sum_exp<T: Real, I: IntoIterator<Item = T>>(values: I) -> T {
    let mut acc = StreamingLse::new();
    for v in values {
        acc.push(v);
    }
    acc.value()
}

/// One-pass log-sum-exp accumulator with a running maximum.
#[derive(Clone, Copy, Debug)]
pub struct StreamingLse<T> {
    max: T,
    scaled: T,
}

impl<T: Real> Default for StreamingLse<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Real> StreamingLse<T> {
    pub fn new() -> Self {
        Self {
            max: T::neg_infinity(),
            scaled: T::zero(),
        }
    }

    #[inline]
    pub fn push(&mut self, v: T) {
        if v == T::neg_infinity() {
            return;
        }
        if v <= self.max {
            self.scaled = self.scaled + (v - self.max).exp();
        } else {
            self.scaled = self.scaled * (self.max - v).exp() + T::one();
            self.max = v;
        }
    }

    pub fn value(&self) -> T {
        if self.max == T::neg_infinity() {
            T::neg_infinity()
        } else {
            self.max + self.scaled.ln()
        }
    }
}

/// Stirling-series error term δ(x) = ln Γ(x+1) − (x+½)ln x + x − ½ln(2π).
pub fn stirlerr<T: Real>(x: T) -> T {
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;
    if x <= lit(15.0) {
        return ln_gamma(x + T::one()) - (x + lit(0.5)) * x.ln() + x
            - lit::<T>(0.5) * T::TAU().ln();
    }
    let xx = x * x;
    let (s0, s1, s2, s3, s4) = (lit::<T>(S0), lit::<T>(S1), lit::<T>(S2), lit::<T>(S3), lit::<T>(S4));
    if x > lit(500.0) {
        (s0 - s1 / xx) / x
    } else if x > lit(80.0) {
        (s0 - (s1 - s2 / xx) / xx) / x
    } else if x > lit(35.0) {
        (s0 - (s1 - (s2 - s3 / xx) / xx) / xx) / x
    } else {
        (s0 - (s1 - (s2 - (s3 - s4 / xx) / xx) / xx) / xx) / x
    }
}

/// Deviance term bd0(x, np) = x ln(x/np) + np − x, evaluated without cancellation.
pub fn bd0<T: Real>(x: T, np: T) -> T {
    if (x - np).abs() < lit::<T>(0.1) * (x + np) {
        let mut v = (x - np) / (x + np);
        let mut s = (x - np) * v;
        let mut ej = lit::<T>(2.0) * x * v;
        v = v * v;
        for j in 1..1000u64 {
            ej = ej * v;
            let s1 = s + ej / from_u64::<T>(2 * j + 1);
            if s1 == s {
                return s1;
            }
            s = s1;
        }
        s
    } else {
        x * (x / np).ln() + np - x
    }
}

/// log of the binomial pmf, log P(Bin(n, p) = x), with q = 1 − p passed
/// separately to avoid cancellation.
pub fn ln_binomial_pmf<T: Real>(x: T, n: T, p: T, q: T) -> T {
    if p == T::zero() {
        return if x == T::zero() { T::zero() } else { T::neg_infinity() };
    }
    if q == T::zero() {
        return if x == n { T::zero() } else { T::neg_infinity() };
    }
    if x < T::zero() || x > n {
        return T::neg_infinity();
    }
    if x == T::zero() {
        if n == T::zero() {
            return T::zero();
        }
        return if p < lit(0.1) {
            -bd0(n, n * q) - n * p
        } else {
            n * q.ln()
        };
    }
    if x == n {
        return if q < lit(0.1) {
            -bd0(n, n * p) - n * q
        } else {
            n * p.ln()
        };
    }
    let lc = stirlerr(n) - stirlerr(x) - stirlerr(n - x) - bd0(x, n * p) - bd0(n - x, n * q);
    let lf = T::TAU().ln() + x.ln() + (n - x).ln() - n.ln();
    lc - lit::<T>(0.5) * lf
}
