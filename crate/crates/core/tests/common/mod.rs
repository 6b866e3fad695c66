//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

pub mod attraction;

use std::f64::consts::PI;

use casimir_core::edges::bateman_k;
use casimir_core::numerics::wigner::three_j_m_minus_m;
use casimir_core::numerics::{
    log_det_one_minus, log_det_one_minus_minors, modified_spherical_bessel_i, modified_spherical_bessel_k,
};
use casimir_core::scattering::translation_block;
use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rel_err(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        a.abs()
    } else {
        ((a - b) / b).abs()
    }
}

/// Gauss–Legendre nodes and weights on `[−1, 1]` by Newton iteration.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}

fn panel(f: &impl Fn(f64) -> f64, a: f64, b: f64, gl: &(Vec<f64>, Vec<f64>)) -> f64 {
    let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
    gl.0.iter().zip(&gl.1).map(|(x, w)| w * f(c + h * x)).sum::<f64>() * h
}

/// Wynn's epsilon algorithm applied to a sequence of partial sums. Stops
/// before differences reach rounding level and keeps the even-column
/// estimate that moved least.
pub fn wynn_epsilon(s: &[f64]) -> f64 {
    let mut prev = vec![0.0; s.len() + 1];
    let mut cur: Vec<f64> = s.to_vec();
    let mut best = *s.last().unwrap();
    let mut last_even = best;
    let mut best_move = f64::INFINITY;
    let mut k = 0;
    while cur.len() >= 2 {
        k += 1;
        let mut next = Vec::with_capacity(cur.len() - 1);
        for j in 0..cur.len() - 1 {
            let d = cur[j + 1] - cur[j];
            if d == 0.0 || d.abs() <= 1e-15 * cur[j].abs().max(1e-300) {
                return best;
            }
            next.push(prev[j + 1] + 1.0 / d);
        }
        if k % 2 == 0 {
            let est = *next.last().unwrap();
            let moved = (est - last_even).abs();
            if moved < best_move {
                best_move = moved;
                best = est;
            }
            last_even = est;
        }
        prev = cur;
        cur = next;
    }
    best
}

/// `(2/π) ∫₀^∞ cos(x t − ν atan t)/(1 + t²) dt` by panels between the
/// asymptotic zeros and epsilon acceleration of the alternating tail.
pub fn bateman_oracle(nu: f64, x: f64) -> f64 {
    let gl = gauss_legendre(40);
    let f = |t: f64| (x * t - nu * t.atan()).cos() / (1.0 + t * t);
    let head_end = 40.0f64.max(4.0 * PI / x);
    let width = 0.25f64.min(PI / (4.0 * x));
    let pieces = (head_end / width).ceil() as usize;
    let mut head = 0.0;
    for i in 0..pieces {
        let a = head_end * i as f64 / pieces as f64;
        let b = head_end * (i + 1) as f64 / pieces as f64;
        head += panel(&f, a, b, &gl);
    }
    let zero = |j: f64| ((j + 0.5) * PI + 0.5 * nu * PI) / x;
    let mut j = ((x * head_end - 0.5 * nu * PI) / PI - 0.5).ceil();
    while zero(j) <= head_end {
        j += 1.0;
    }
    let mut sums = Vec::new();
    let mut acc = head + {
        let b = zero(j);
        (0..8).map(|k| panel(&f, head_end + (b - head_end) * k as f64 / 8.0, head_end + (b - head_end) * (k + 1) as f64 / 8.0, &gl)).sum::<f64>()
    };
    sums.push(acc);
    for _ in 0..40 {
        let (a, b) = (zero(j), zero(j + 1.0));
        acc += (0..8)
            .map(|k| panel(&f, a + (b - a) * k as f64 / 8.0, a + (b - a) * (k + 1) as f64 / 8.0, &gl))
            .sum::<f64>();
        sums.push(acc);
        j += 1.0;
    }
    2.0 / PI * wynn_epsilon(&sums)
}

/// `k_ν(x) = e^{−x} U(−ν/2, 0, 2x)/Γ(1 + ν/2)` for negative odd `ν`, with
/// Tricomi's `U(a, 0, z) = Γ(a)⁻¹ ∫₀^∞ e^{−zt} t^{a−1}(1+t)^{−a−1} dt`
/// mapped by `t = tan²φ` onto a bounded smooth integrand.
pub fn bateman_laplace_oracle(nu: f64, x: f64) -> f64 {
    let a = -0.5 * nu;
    assert!(a > 0.0 && (2.0 * a).fract() == 0.0 && (2.0 * a) as i64 % 2 == 1);
    let gl = gauss_legendre(30);
    let f = |phi: f64| {
        let (sn, cs) = phi.sin_cos();
        let t = (sn / cs).powi(2);
        if 2.0 * x * t > 745.0 {
            return 0.0;
        }
        2.0 * (-2.0 * x * t).exp() * sn.powf(2.0 * a - 1.0) * cs
    };
    let pieces = 200;
    let integral: f64 = (0..pieces)
        .map(|i| panel(&f, 0.5 * PI * i as f64 / pieces as f64, 0.5 * PI * (i + 1) as f64 / pieces as f64, &gl))
        .sum();
    // Γ(a) for half-integer a and Γ(1 − a) by the reflection formula.
    let gamma_a = {
        let mut g = PI.sqrt();
        let mut v = 0.5;
        while v < a {
            g *= v;
            v += 1.0;
        }
        g
    };
    let gamma_one_minus_a = PI / ((PI * a).sin() * gamma_a);
    (-x).exp() * integral / (gamma_a * gamma_one_minus_a)
}

/// Worst relative error of `bateman_k` against both oracles. The oscillatory
/// form is only used where the result is not swamped by cancellation.
pub fn bateman_oracle_max_error() -> f64 {
    let mut worst: f64 = 0.0;
    for &nu in &[-1.0, -3.0, -7.0, -13.0, -25.0] {
        for &x in &[0.01, 0.3, 2.0, 10.0, 50.0] {
            worst = worst.max(rel_err(bateman_k(nu, x).unwrap(), bateman_laplace_oracle(nu, x)));
        }
    }
    for &nu in &[-1.0, -3.0, -7.0, 0.0, 0.5, 1.5, 3.0, 5.0] {
        for &x in &[0.01, 0.3, 2.0, 10.0] {
            let v = bateman_k(nu, x).unwrap();
            if v.abs() > 1e-6 {
                worst = worst.max(rel_err(v, bateman_oracle(nu, x)));
            }
        }
    }
    worst
}

fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// `i_l(p/q)` from its power series in exact arithmetic.
pub fn bessel_i_series(l: usize, p: i64, q: i64) -> f64 {
    let x = ratio(p, q);
    let x2_half = &x * &x / ratio(2, 1);
    let mut dfact = BigInt::one();
    for k in (1..=2 * l + 1).step_by(2) {
        dfact *= BigInt::from(k);
    }
    let mut term = (0..l).fold(BigRational::one(), |acc, _| acc * &x) / BigRational::from_integer(dfact);
    let mut sum = BigRational::zero();
    let mut k = 0usize;
    loop {
        sum += &term;
        k += 1;
        term = term * &x2_half / BigRational::from_integer(BigInt::from(k * (2 * l + 2 * k + 1)));
        if k > 5 && (&term / &sum).to_f64().unwrap() < 1e-30 {
            break;
        }
    }
    sum.to_f64().unwrap()
}

/// `k_l(x) = (π/2)(e^{−x}/x) Σ_j (l+j)!/(j!(l−j)!) (2x)^{−j}` with the sum exact.
pub fn bessel_k_series(l: usize, p: i64, q: i64) -> f64 {
    let x = ratio(p, q);
    let mut sum = BigRational::zero();
    for j in 0..=l {
        let c = BigRational::from_integer(factorial(l + j) / (factorial(j) * factorial(l - j)));
        let pow = (0..j).fold(BigRational::one(), |acc, _| acc * ratio(2, 1) * &x);
        sum += c / pow;
    }
    let xf = p as f64 / q as f64;
    0.5 * PI * (-xf).exp() / xf * sum.to_f64().unwrap()
}

pub fn bessel_oracle_max_error() -> f64 {
    let mut worst: f64 = 0.0;
    for &(p, q) in &[(1, 100), (1, 2), (1, 1), (15, 2), (30, 1), (75, 1)] {
        for l in [0usize, 1, 2, 5, 10, 20, 40] {
            let x = p as f64 / q as f64;
            worst = worst.max(rel_err(modified_spherical_bessel_i(l, x).unwrap(), bessel_i_series(l, p, q)));
            worst = worst.max(rel_err(modified_spherical_bessel_k(l, x).unwrap(), bessel_k_series(l, p, q)));
        }
    }
    worst
}

/// Racah's closed form for `(j1 j2 j3; m1 m2 m3)` with integer arguments.
pub fn racah_three_j(j1: i64, j2: i64, j3: i64, m1: i64, m2: i64, m3: i64) -> f64 {
    if m1 + m2 + m3 != 0 || j3 < (j1 - j2).abs() || j3 > j1 + j2 || m1.abs() > j1 || m2.abs() > j2 || m3.abs() > j3 {
        return 0.0;
    }
    let f = |n: i64| factorial(n as usize);
    let delta = BigRational::new(f(j1 + j2 - j3) * f(j1 - j2 + j3) * f(-j1 + j2 + j3), f(j1 + j2 + j3 + 1));
    let prod = BigRational::from_integer(f(j1 + m1) * f(j1 - m1) * f(j2 + m2) * f(j2 - m2) * f(j3 + m3) * f(j3 - m3));
    let kmin = 0.max(j2 - j3 - m1).max(j1 - j3 + m2);
    let kmax = (j1 + j2 - j3).min(j1 - m1).min(j2 + m2);
    let mut s = BigRational::zero();
    for k in kmin..=kmax {
        let den = f(k) * f(j3 - j2 + k + m1) * f(j3 - j1 + k - m2) * f(j1 + j2 - j3 - k) * f(j1 - k - m1) * f(j2 - k + m2);
        let t = BigRational::new(BigInt::one(), den);
        if k % 2 == 0 {
            s += t;
        } else {
            s -= t;
        }
    }
    let phase = if (j1 - j2 - m3).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let sign = if s.is_negative() { -1.0 } else { 1.0 };
    let sq = &s * &s * delta * prod;
    phase * sign * sq.to_f64().unwrap().sqrt()
}

pub fn three_j_oracle_max_error() -> f64 {
    let mut worst: f64 = 0.0;
    for l1 in 0..=12usize {
        for l2 in 0..=12usize {
            for m in 0..=l1.min(l2) {
                let w = three_j_m_minus_m(l1, l2, m);
                let lmin = l1.abs_diff(l2);
                for (i, v) in w.iter().enumerate() {
                    let big = lmin + i;
                    let r = racah_three_j(l1 as i64, l2 as i64, big as i64, m as i64, -(m as i64), 0);
                    worst = worst.max((v - r).abs());
                }
            }
        }
    }
    worst
}

/// Normalised `Y_lm(θ, 0)` with the Condon–Shortley phase.
pub fn spherical_harmonic(l: usize, m: usize, cos_theta: f64) -> f64 {
    let x = cos_theta;
    let s = (1.0 - x * x).max(0.0).sqrt();
    let mut pmm = 1.0;
    for i in 0..m {
        pmm *= -((2 * i + 1) as f64) * s;
    }
    let p = if l == m {
        pmm
    } else {
        let mut p0 = pmm;
        let mut p1 = x * (2 * m + 1) as f64 * pmm;
        for k in m + 2..=l {
            let p2 = ((2 * k - 1) as f64 * x * p1 - (k + m - 1) as f64 * p0) / (k - m) as f64;
            p0 = p1;
            p1 = p2;
        }
        p1
    };
    let ratio: f64 = ((l - m + 1)..=(l + m)).map(|k| 1.0 / k as f64).product();
    ((2 * l + 1) as f64 / (4.0 * PI) * ratio).sqrt() * p
}

/// Regular-wave coefficient of `k_l(κ|r + tẑ|) Y_lm` about the origin,
/// obtained by projecting onto `Y_{l'm}` on a sphere of radius `ρ < t`.
pub fn projected_translation(l: usize, lp: usize, m: usize, kappa: f64, t: f64) -> f64 {
    let rho = 0.6 * t;
    let (xs, ws) = gauss_legendre(120);
    let mut acc = 0.0;
    for (x, w) in xs.iter().zip(&ws) {
        let (sin, cos) = ((1.0 - x * x).sqrt(), *x);
        let (rx, rz) = (rho * sin, rho * cos + t);
        let r = rx.hypot(rz);
        let val = modified_spherical_bessel_k(l, kappa * r).unwrap() * spherical_harmonic(l, m, rz / r) * spherical_harmonic(lp, m, cos);
        acc += w * val;
    }
    2.0 * PI * acc / modified_spherical_bessel_i(lp, kappa * rho).unwrap()
}

pub fn translation_oracle_max_error() -> f64 {
    let mut worst: f64 = 0.0;
    for &kd in &[0.5, 2.0, 10.0] {
        for m in 0..=4usize {
            let block = translation_block(4, m, 1.0, kd).unwrap();
            for l in m..=4 {
                for lp in m..=4 {
                    let o = projected_translation(l, lp, m, 1.0, kd);
                    worst = worst.max(rel_err(block.matrix[(lp - m, l - m)], o));
                }
            }
        }
    }
    worst
}

/// `−Σ_k tr(A^k)/k`.
pub fn log_det_series(a: &DMatrix<f64>) -> f64 {
    let mut p = a.clone();
    let mut s = 0.0;
    for k in 1..400 {
        let t = p.trace() / k as f64;
        s -= t;
        if t.abs() < 1e-20 * s.abs() {
            break;
        }
        p = &p * a;
    }
    s
}

/// Random matrices with spectral norm at most `0.6`.
pub fn random_contraction(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let m = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    let norm = m.norm();
    m * (rng.gen_range(0.05..0.6) / norm)
}

pub fn log_det_oracle_max_error() -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for n in [1usize, 2, 3, 5, 8, 13, 21] {
        for _ in 0..10 {
            let a = random_contraction(&mut rng, n);
            let o = log_det_series(&a);
            worst = worst.max(rel_err(log_det_one_minus(&a).unwrap(), o));
            let minors = log_det_one_minus_minors(&a).unwrap();
            worst = worst.max(rel_err(minors[n - 1], o));
            if n > 1 {
                let sub = a.view((0, 0), (n - 1, n - 1)).into_owned();
                worst = worst.max(rel_err(minors[n - 2], log_det_series(&sub)));
            }
        }
    }
    worst
}
