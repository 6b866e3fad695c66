//! Wigner 3j symbols of the forms `(l l' L; 0 0 0)` and `(l l' L; m −m 0)`,
//! which is all the scalar addition theorem along the z axis needs.
//!
//! The `m ≠ 0` family is generated for all `L` at once by the three-term
//! recurrence in `L` (Schulten & Gordon), run inward from both ends and
//! matched at the lower turning point so that neither sweep enters a
//! classically forbidden region in its unstable direction.

/// `ln n!` for `n = 0..len`.
#[derive(Debug, Clone)]
pub struct LogFactorials(Vec<f64>);

impl LogFactorials {
    pub fn new(len: usize) -> Self {
        let mut v = Vec::with_capacity(len.max(1));
        v.push(0.0);
        for n in 1..len {
            let prev = v[n - 1];
            v.push(prev + (n as f64).ln());
        }
        Self(v)
    }

    #[inline]
    pub fn get(&self, n: usize) -> f64 {
        self.0[n]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// `(l1 l2 l3; 0 0 0)` in closed form. `lf` must cover `l1 + l2 + l3 + 1`.
pub fn three_j_zero(l1: usize, l2: usize, l3: usize, lf: &LogFactorials) -> f64 {
    let j = l1 + l2 + l3;
    if j % 2 == 1 || l3 > l1 + l2 || l1 > l2 + l3 || l2 > l1 + l3 {
        return 0.0;
    }
    let g = j / 2;
    let ln = 0.5 * (lf.get(j - 2 * l1) + lf.get(j - 2 * l2) + lf.get(j - 2 * l3) - lf.get(j + 1)) + lf.get(g)
        - lf.get(g - l1)
        - lf.get(g - l2)
        - lf.get(g - l3);
    let sign = if g % 2 == 0 { 1.0 } else { -1.0 };
    sign * ln.exp()
}

/// `(l1 l2 L; m −m 0)` for `L = |l1 − l2| ..= l1 + l2`.
///
/// Returns an empty vector when `m > min(l1, l2)`.
pub fn three_j_m_minus_m(l1: usize, l2: usize, m: usize) -> Vec<f64> {
    if m > l1.min(l2) {
        return Vec::new();
    }
    let lmin = l1.abs_diff(l2);
    let lmax = l1 + l2;
    let n = lmax - lmin + 1;
    if m == 0 {
        let lf = LogFactorials::new(2 * lmax + 2);
        return (lmin..=lmax).map(|big| three_j_zero(l1, l2, big, &lf)).collect();
    }
    let d = (l1 as f64 - l2 as f64).powi(2);
    let s = ((l1 + l2 + 1) as f64).powi(2);
    let a = |j: usize| -> f64 {
        let jf = j as f64;
        jf * ((jf * jf - d) * (s - jf * jf)).max(0.0).sqrt()
    };
    let mf = m as f64;
    let b = |j: usize| -> f64 {
        let jf = j as f64;
        -2.0 * mf * (2.0 * jf + 1.0) * jf * (jf + 1.0)
    };

    let turning = {
        let p = ((l1 * (l1 + 1)) as f64 - mf * mf).max(0.0).sqrt();
        let q = ((l2 * (l2 + 1)) as f64 - mf * mf).max(0.0).sqrt();
        (p - q).abs()
    };
    let lmatch = (turning.ceil() as usize + 2).clamp(lmin + 1, lmax - 1);
    let use_forward = lmin > 0 && lmatch > lmin + 1 && lmatch + 1 < lmax;
    let stop = if use_forward { lmatch - 1 } else { lmin };

    // backward sweep over [stop, lmax]
    let mut w = vec![0.0; n];
    w[n - 1] = 1.0;
    let mut j = lmax;
    while j > stop {
        let next = if j < lmax { w[j + 1 - lmin] } else { 0.0 };
        let upper = if j < lmax { j as f64 * a(j + 1) * next } else { 0.0 };
        w[j - 1 - lmin] = -(upper + b(j) * w[j - lmin]) / ((j + 1) as f64 * a(j));
        if w[j - 1 - lmin].abs() > 1e100 {
            for v in w[j - 1 - lmin..].iter_mut() {
                *v *= 1e-100;
            }
        }
        j -= 1;
    }

    if use_forward {
        let top = lmatch + 1;
        let mut f = vec![0.0; top - lmin + 1];
        f[0] = 1.0;
        for j in lmin..top {
            let lower = if j > lmin { (j + 1) as f64 * a(j) * f[j - 1 - lmin] } else { 0.0 };
            f[j + 1 - lmin] = -(b(j) * f[j - lmin] + lower) / (j as f64 * a(j + 1));
            if f[j + 1 - lmin].abs() > 1e100 {
                for v in f[..=j + 1 - lmin].iter_mut() {
                    *v *= 1e-100;
                }
            }
        }
        let (mut num, mut den) = (0.0, 0.0);
        for big in (lmatch - 1)..=(lmatch + 1) {
            num += f[big - lmin] * w[big - lmin];
            den += f[big - lmin] * f[big - lmin];
        }
        let lambda = num / den;
        for big in lmin..lmatch {
            w[big - lmin] = lambda * f[big - lmin];
        }
    }

    let norm: f64 = w
        .iter()
        .enumerate()
        .map(|(i, v)| (2 * (lmin + i) + 1) as f64 * v * v)
        .sum::<f64>()
        .sqrt();
    let want_positive = (l1 + l2) % 2 == 0;
    let sign = if (w[n - 1] > 0.0) == want_positive { 1.0 } else { -1.0 };
    w.iter().map(|v| sign * v / norm).collect()
}
