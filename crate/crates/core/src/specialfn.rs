//! Bessel and Hankel functions of integer order for real, non-negative
//! arguments.
//!
//! Evaluation regimes:
//!
//! * `x <= 2`: ascending power series (the logarithmic series for `Y0`, `Y1`).
//! * `2 < x < 25`: Miller backward recurrence for `J`, normalized with
//!   `J0 + 2 (J2 + J4 + ...) = 1`; `Y0` and `Y1` from their Neumann series in
//!   the even/odd `J` values.
//! * `x >= 25`: Hankel asymptotic expansions for orders 0 and 1; higher `J`
//!   orders again by Miller recurrence, normalized against the asymptotic `J0`.
//!
//! `Y` of order `n >= 2` always comes from forward recurrence, which is stable
//! for the second kind.

use std::fmt::Debug;

use num_complex::Complex;
use num_traits::{Float, FloatConst};

use crate::error::{Error, Result};

/// Scalar type accepted by the special functions.
pub trait Real: Float + FloatConst + Debug + Send + Sync + 'static {}

impl<T: Float + FloatConst + Debug + Send + Sync + 'static> Real for T {}

const SERIES_LIMIT: f64 = 2.0;
const ASYMPTOTIC_LIMIT: f64 = 25.0;
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

#[inline]
fn c<T: Real>(v: f64) -> T {
    T::from(v).unwrap()
}

/// Bessel function of the first kind `J_order(x)` for `x >= 0`.
///
/// Negative arguments are mapped through `J_n(-x) = (-1)^n J_n(x)`.
pub fn bessel_j<T: Real>(order: u32, x: T) -> T {
    if x < T::zero() {
        let v = bessel_j(order, -x);
        return if order.is_multiple_of(2) { v } else { -v };
    }
    if x == T::zero() {
        return if order == 0 { T::one() } else { T::zero() };
    }
    if x <= c(SERIES_LIMIT) {
        return j_series(order, x);
    }
    miller_sequence(order as usize, x)[order as usize]
}

/// Bessel function of the second kind `Y_order(x)`, defined for `x > 0`.
pub fn bessel_y<T: Real>(order: u32, x: T) -> Result<T> {
    if !(x > T::zero()) {
        return Err(Error::Domain {
            function: "bessel_y",
            argument: x.to_f64().unwrap_or(f64::NAN),
        });
    }
    let (y0, y1) = y01(x);
    Ok(y_forward(order, x, y0, y1))
}

/// Hankel function of the first kind `H_order(x) = J_order(x) + i Y_order(x)`.
pub fn hankel1<T: Real>(order: u32, x: T) -> Result<Complex<T>> {
    let y = bessel_y(order, x)?;
    Ok(Complex::new(bessel_j(order, x), y))
}

/// `J_0, J_1, Y_0, Y_1` at one argument, sharing the work between them.
///
/// This is the hot path of every kernel evaluation.
pub fn bessel_jy01<T: Real>(x: T) -> Result<[T; 4]> {
    if !(x > T::zero()) {
        return Err(Error::Domain {
            function: "bessel_jy01",
            argument: x.to_f64().unwrap_or(f64::NAN),
        });
    }
    if x <= c(SERIES_LIMIT) {
        let (y0, y1) = y01_series(x);
        return Ok([j_series(0, x), j_series(1, x), y0, y1]);
    }
    if x >= c(ASYMPTOTIC_LIMIT) {
        let (j0, y0) = hankel_asymptotic(0, x);
        let (j1, y1) = hankel_asymptotic(1, x);
        return Ok([j0, j1, y0, y1]);
    }
    let seq = miller_sequence(1, x);
    let (y0, y1) = neumann_y01(x, &seq);
    Ok([seq[0], seq[1], y0, y1])
}

/// `H_0^(1)(x)` and `H_1^(1)(x)` together.
pub fn hankel01<T: Real>(x: T) -> Result<(Complex<T>, Complex<T>)> {
    let [j0, j1, y0, y1] = bessel_jy01(x)?;
    Ok((Complex::new(j0, y0), Complex::new(j1, y1)))
}

/// Values `J_0(x), ..., J_max_order(x)`.
pub fn bessel_j_upto<T: Real>(max_order: u32, x: T) -> Vec<T> {
    let n = max_order as usize;
    if x == T::zero() {
        let mut v = vec![T::zero(); n + 1];
        v[0] = T::one();
        return v;
    }
    if x.abs() <= c(SERIES_LIMIT) {
        return (0..=max_order).map(|m| bessel_j(m, x)).collect();
    }
    let mut seq = miller_sequence(n, x.abs());
    seq.truncate(n + 1);
    if x < T::zero() {
        for (m, v) in seq.iter_mut().enumerate() {
            if m % 2 == 1 {
                *v = -*v;
            }
        }
    }
    seq
}

/// Values `Y_0(x), ..., Y_max_order(x)` for `x > 0`.
pub fn bessel_y_upto<T: Real>(max_order: u32, x: T) -> Result<Vec<T>> {
    if !(x > T::zero()) {
        return Err(Error::Domain {
            function: "bessel_y_upto",
            argument: x.to_f64().unwrap_or(f64::NAN),
        });
    }
    let (y0, y1) = y01(x);
    let mut out = Vec::with_capacity(max_order as usize + 1);
    out.push(y0);
    if max_order >= 1 {
        out.push(y1);
    }
    let two = c::<T>(2.0);
    for m in 1..max_order as usize {
        let next = two * c::<T>(m as f64) / x * out[m] - out[m - 1];
        out.push(next);
    }
    Ok(out)
}

fn y01<T: Real>(x: T) -> (T, T) {
    if x <= c(SERIES_LIMIT) {
        y01_series(x)
    } else if x >= c(ASYMPTOTIC_LIMIT) {
        (hankel_asymptotic(0, x).1, hankel_asymptotic(1, x).1)
    } else {
        let seq = miller_sequence(1, x);
        neumann_y01(x, &seq)
    }
}

fn y_forward<T: Real>(order: u32, x: T, y0: T, y1: T) -> T {
    match order {
        0 => y0,
        1 => y1,
        _ => {
            let two = c::<T>(2.0);
            let (mut prev, mut cur) = (y0, y1);
            for m in 1..order {
                let next = two * c::<T>(m as f64) / x * cur - prev;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// Power series `J_n(x) = (x/2)^n sum_k (-x^2/4)^k / (k! (n+k)!)`.
fn j_series<T: Real>(order: u32, x: T) -> T {
    let half = x * c(0.5);
    let mut lead = T::one();
    for m in 1..=order {
        lead = lead * half / c(m as f64);
    }
    if lead == T::zero() {
        return T::zero();
    }
    let q = -half * half;
    let mut term = T::one();
    let mut sum = T::one();
    let n = order as f64;
    for k in 1..200 {
        let kf = k as f64;
        term = term * q / c(kf * (n + kf));
        sum = sum + term;
        if term.abs() <= T::epsilon() * sum.abs() * c(0.1) {
            break;
        }
    }
    lead * sum
}

/// Logarithmic ascending series for `Y0` and `Y1`.
fn y01_series<T: Real>(x: T) -> (T, T) {
    let pi = T::PI();
    let two = c::<T>(2.0);
    let half = x * c(0.5);
    let log_term = half.ln();
    let gamma = c::<T>(EULER_GAMMA);
    let q = half * half;

    // Y0 = (2/pi)(ln(x/2)+gamma) J0 + (2/pi) sum_{k>=1} (-1)^{k+1} H_k q^k / (k!)^2
    let j0 = j_series(0, x);
    let mut term = T::one();
    let mut harmonic = T::zero();
    let mut acc = T::zero();
    for k in 1..200 {
        let kf = c::<T>(k as f64);
        term = term * q / (kf * kf);
        harmonic = harmonic + T::one() / kf;
        let contribution = if k % 2 == 1 {
            term * harmonic
        } else {
            -term * harmonic
        };
        acc = acc + contribution;
        if contribution.abs() <= T::epsilon() * acc.abs() * c(0.1) {
            break;
        }
    }
    let y0 = two / pi * ((log_term + gamma) * j0 + acc);

    // Y1 = -2/(pi x) + (2/pi) ln(x/2) J1
    //      - (1/pi) sum_{k>=0} (-1)^k (psi(k+1) + psi(k+2)) (x/2)^{2k+1} / (k! (k+1)!)
    let j1 = j_series(1, x);
    let mut term = half;
    let mut psi_k1 = -gamma;
    let mut psi_k2 = T::one() - gamma;
    let mut acc = term * (psi_k1 + psi_k2);
    for k in 1..200 {
        let kf = c::<T>(k as f64);
        term = -term * q / (kf * (kf + T::one()));
        psi_k1 = psi_k1 + T::one() / kf;
        psi_k2 = psi_k2 + T::one() / (kf + T::one());
        let contribution = term * (psi_k1 + psi_k2);
        acc = acc + contribution;
        if contribution.abs() <= T::epsilon() * acc.abs() * c(0.1) {
            break;
        }
    }
    let y1 = -two / (pi * x) + two / pi * log_term * j1 - acc / pi;
    (y0, y1)
}

/// Hankel large-argument expansion, returning `(J_order, Y_order)`.
fn hankel_asymptotic<T: Real>(order: u32, x: T) -> (T, T) {
    let mu = c::<T>(4.0 * (order as f64) * (order as f64));
    let eight_x = c::<T>(8.0) * x;
    let mut p = T::one();
    let mut q = T::zero();
    let mut term = T::one();
    for k in 1..80 {
        let odd = c::<T>((2 * k - 1) as f64);
        term = term * (mu - odd * odd) / (c::<T>(k as f64) * eight_x);
        // terms alternate between Q (odd k) and P (even k) with sign (-1)^{floor(k/2)}
        let signed = if (k / 2) % 2 == 0 { term } else { -term };
        if k % 2 == 1 {
            q = q + signed;
        } else {
            p = p + signed;
        }
        if term.abs() < T::epsilon() * c(1e-2) {
            break;
        }
    }
    let chi = x - (c::<T>(order as f64) * c(0.5) + c(0.25)) * T::PI();
    let amp = (c::<T>(2.0) / (T::PI() * x)).sqrt();
    let (s, co) = chi.sin_cos();
    (amp * (p * co - q * s), amp * (p * s + q * co))
}

/// `J_0 .. J_start` by Miller's backward recurrence, correctly normalized for
/// every index up to at least `min_order`.
fn miller_sequence<T: Real>(min_order: usize, x: T) -> Vec<T> {
    let xf = x.to_f64().unwrap();
    let top = (min_order as f64).max(xf);
    let mut start = (top + 30.0 + 10.0 * top.cbrt()).ceil() as usize;
    if start % 2 == 1 {
        start += 1;
    }
    let two_over_x = c::<T>(2.0) / x;
    let big = T::max_value().sqrt();
    let mut seq = vec![T::zero(); start + 2];
    seq[start] = T::one();
    for m in (1..=start).rev() {
        let v = c::<T>(m as f64) * two_over_x * seq[m] - seq[m + 1];
        seq[m - 1] = v;
        if v.abs() > big {
            let scale = T::one() / big;
            for s in seq.iter_mut().skip(m - 1) {
                *s = *s * scale;
            }
        }
    }
    let norm = if xf >= ASYMPTOTIC_LIMIT {
        let (j0, _) = hankel_asymptotic(0, x);
        let (j1, _) = hankel_asymptotic(1, x);
        if j0.abs() >= j1.abs() {
            j0 / seq[0]
        } else {
            j1 / seq[1]
        }
    } else {
        let mut sum = seq[0];
        let mut m = 2;
        while m <= start {
            sum = sum + c::<T>(2.0) * seq[m];
            m += 2;
        }
        T::one() / sum
    };
    seq.truncate(start + 1);
    for s in seq.iter_mut() {
        *s = *s * norm;
    }
    seq
}

/// Neumann series for `Y0` and `Y1` in terms of a normalized `J` sequence.
fn neumann_y01<T: Real>(x: T, seq: &[T]) -> (T, T) {
    let two = c::<T>(2.0);
    let log_term = (x * c(0.5)).ln() + c(EULER_GAMMA);
    let mut s0 = T::zero();
    let mut s1 = T::zero();
    let mut k = 1;
    while 2 * k + 1 < seq.len() {
        let kf = c::<T>(k as f64);
        let sign = if k % 2 == 0 { T::one() } else { -T::one() };
        s0 = s0 + sign * seq[2 * k] / kf;
        s1 = s1 + sign * (seq[2 * k - 1] - seq[2 * k + 1]) / kf;
        k += 1;
    }
    let y0 = two / T::PI() * (log_term * seq[0] - two * s0);
    let y1 = two / T::PI() * (log_term * seq[1] - seq[0] / x + s1);
    (y0, y1)
}
