//! Reference implementations used only by tests. Nothing here calls into
//! the code it checks.
#![allow(dead_code)]

/// Double-double number `hi + lo`.
#[derive(Clone, Copy, Debug)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    Dd {
        hi: s,
        lo: b - (s - a),
    }
}

impl Dd {
    pub fn from(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        quick_two_sum(s, e + self.lo + o.lo)
    }

    pub fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    pub fn mul(self, o: Dd) -> Dd {
        let p = self.hi * o.hi;
        let e = self.hi.mul_add(o.hi, -p);
        quick_two_sum(p, e + self.hi * o.lo + self.lo * o.hi)
    }

    pub fn div_f64(self, d: f64) -> Dd {
        let q1 = self.hi / d;
        let p = q1 * d;
        let e = q1.mul_add(d, -p);
        let r = (self.hi - p - e) + self.lo;
        quick_two_sum(q1, r / d)
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

/// 2/sqrt(pi) to double-double precision.
const TWO_OVER_SQRT_PI: Dd = Dd {
    hi: core::f64::consts::FRAC_2_SQRT_PI,
    lo: 1.533_545_961_316_588e-17,
};

/// erf by its Maclaurin series in double-double arithmetic.
///
/// Cancellation costs about `x^2 / ln 10` of the ~32 available digits, so
/// the result is good to far below 1e-14 for `|x| <= 6`. Beyond that
/// `erf` equals ±1 to within 3e-17.
pub fn erf_series(x: f64) -> f64 {
    if x.abs() > 6.0 {
        return x.signum();
    }
    let xx = Dd::from(x).mul(Dd::from(x));
    // term = x^(2n+1) / n!
    let mut term = Dd::from(x);
    let mut sum = Dd::from(x);
    let mut n = 0u32;
    loop {
        n += 1;
        term = term.mul(xx).div_f64(n as f64);
        let t = term.div_f64((2 * n + 1) as f64);
        sum = if n % 2 == 1 { sum.add(t.neg()) } else { sum.add(t) };
        if n as f64 > xx.hi && t.hi.abs() < 1e-34 * sum.hi.abs().max(1e-300) {
            break;
        }
    }
    TWO_OVER_SQRT_PI.mul(sum).to_f64()
}

/// Standard normal cdf through the series erf.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 + 0.5 * erf_series(z / std::f64::consts::SQRT_2)
}

/// Anderson-Darling statistic summed directly from per-duration counts.
///
/// `starts` are the lower bounds of the cells; the last cell is open.
/// Cell probabilities are summed term by term from `(1-theta) theta^k`,
/// the open cell until the terms underflow, and both `H_j` and `1 - H_j`
/// are recomputed from scratch as sums of cell probabilities.
pub fn ad_direct(counts: &[u64], theta: f64, starts: &[u64]) -> f64 {
    let pmf = |k: u64| (1.0 - theta) * theta.powf(k as f64);
    let m = starts.len();
    let cell_prob = |j: usize| -> f64 {
        if j + 1 < m {
            (starts[j]..starts[j + 1]).map(pmf).sum()
        } else {
            (starts[j]..)
                .map(pmf)
                .take_while(|&p| p > 1e-320)
                .collect::<Vec<_>>()
                .iter()
                .rev()
                .sum()
        }
    };
    let cell_count = |j: usize| -> u64 {
        counts
            .iter()
            .enumerate()
            .filter(|(k, _)| {
                let k = *k as u64;
                k >= starts[j] && (j + 1 == m || k < starts[j + 1])
            })
            .map(|(_, &c)| c)
            .sum()
    };
    let n: u64 = counts.iter().sum();
    let nf = n as f64;
    let mut total = 0.0;
    for j in 0..m - 1 {
        let s: u64 = (0..=j).map(cell_count).sum();
        let h: f64 = (0..=j).map(cell_prob).sum();
        let upper: f64 = (j + 1..m).map(cell_prob).sum();
        let z = s as f64 - nf * h;
        total += z * z * cell_prob(j) / (h * upper);
    }
    total / nf
}

/// Kolmogorov-Smirnov distance between a sample and Uniform(0, 1).
pub fn ks_uniform(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len() as f64;
    v.iter()
        .enumerate()
        .map(|(i, &x)| ((i + 1) as f64 / n - x).max(x - i as f64 / n))
        .fold(0.0, f64::max)
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Standard error of the mean.
pub fn std_error(xs: &[f64]) -> f64 {
    let m = mean(xs);
    let var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64;
    (var / xs.len() as f64).sqrt()
}

pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
