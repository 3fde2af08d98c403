//! Exact rational arithmetic for the road-runner witnesses
//! `f_n = r_n / (z - a_n)`, `a_n = 1/(2^n n)`, `r_n = a_n^m / 2^n`.

use rug::ops::Pow;
use rug::{Integer, Rational};

use crate::error::{Error, Result};

/// Rational function with rational coefficients, ascending powers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactRational {
    pub num: Vec<Rational>,
    pub den: Vec<Rational>,
}

impl ExactRational {
    /// `residue / (z - pole)`.
    pub fn simple_pole(residue: Rational, pole: Rational) -> Self {
        ExactRational {
            num: vec![residue],
            den: vec![-pole, Rational::from(1)],
        }
    }

    /// Taylor coefficient of `z^m` at the origin by exact series division.
    pub fn taylor_at_zero(&self, m: usize) -> Result<Rational> {
        let d0 = self.den.first().cloned().unwrap_or_default();
        if d0 == 0 {
            return Err(Error::PoleEvaluation { pole: "0".into() });
        }
        let mut c: Vec<Rational> = Vec::with_capacity(m + 1);
        for k in 0..=m {
            let mut acc = self.num.get(k).cloned().unwrap_or_default();
            for j in 1..=k.min(self.den.len() - 1) {
                acc -= Rational::from(&self.den[j] * &c[k - j]);
            }
            c.push(acc / &d0);
        }
        Ok(c.pop().expect("m + 1 coefficients"))
    }
}

pub fn road_runner_center(n: u32) -> Rational {
    Rational::from((Integer::from(1), Integer::from(n) << n))
}

pub fn road_runner_radius(m: u32, n: u32) -> Rational {
    let a = road_runner_center(n);
    a.pow(m) / Rational::from(Integer::from(1) << n)
}

pub fn road_runner_witness(m: u32, n: u32) -> ExactRational {
    ExactRational::simple_pole(road_runner_radius(m, n), road_runner_center(n))
}

/// The closed road-runner discs `1..=big_n` lie in the open unit disc,
/// avoid the origin and are pairwise disjoint. The discs are centered on
/// the positive axis with decreasing centers, so neighbour gaps suffice.
pub fn road_runner_closures_disjoint(m: u32, big_n: u32) -> bool {
    let iv = |n: u32| {
        let a = road_runner_center(n);
        let r = road_runner_radius(m, n);
        (Rational::from(&a - &r), Rational::from(&a + &r))
    };
    let (lo1, hi1) = iv(1);
    if hi1 >= 1 || lo1 <= 0 {
        return false;
    }
    let mut prev_lo = lo1;
    for n in 2..=big_n {
        let (lo, hi) = iv(n);
        if lo <= 0 || hi >= prev_lo {
            return false;
        }
        prev_lo = lo;
    }
    true
}

/// `||f_n||_K = r_n / dist(a_n, K)`. When the closed disc `n` lies in the
/// open unit disc and is disjoint from the other closed discs, its boundary
/// circle is in `K`, so the distance is `r_n` and the norm is exactly 1.
/// Checked against the neighbours `n - 1` and `n + 1`.
pub fn road_runner_witness_norm(m: u32, n: u32) -> Option<Rational> {
    road_runner_closures_disjoint(m, n + 1).then(|| Rational::from(1))
}

/// `1 + sum_{n=1}^{big_n} r_n / (a_n - r_n)^(order+1)` exactly.
pub fn road_runner_browder_partial(m: u32, order: u32, big_n: u32) -> Rational {
    let mut sum = Rational::from(1);
    for n in 1..=big_n {
        let a = road_runner_center(n);
        let r = road_runner_radius(m, n);
        let s = Rational::from(&a - &r);
        sum += r / s.pow(order + 1);
    }
    sum
}
