//! Polynomial roots by simultaneous (Aberth) iteration, plus clustering of
//! nearby roots into multiplicities.

use rug::{Complex, Float};

use super::poly::{abs, eval};
use crate::error::{Error, Result};

const GUARD_BITS: u32 = 32;

/// All roots of `coeffs` (ascending powers), repeated by multiplicity.
pub fn polynomial_roots(coeffs: &[Complex], prec: u32) -> Result<Vec<Complex>> {
    let work = prec + GUARD_BITS;
    let mut c: Vec<Complex> = coeffs.iter().map(|x| Complex::with_val(work, x)).collect();
    while c.last().is_some_and(|x| x.is_zero()) {
        c.pop();
    }
    if c.is_empty() {
        return Err(Error::invalid("the zero polynomial has no isolated roots"));
    }
    let mut roots = Vec::new();
    let zeros = c.iter().take_while(|x| x.is_zero()).count();
    roots.extend((0..zeros).map(|_| Complex::new(prec)));
    let c: Vec<Complex> = c[zeros..].to_vec();
    let d = c.len() - 1;
    if d == 0 {
        return Ok(roots);
    }
    let lead = c[d].clone();
    let monic: Vec<Complex> = c.iter().map(|x| Complex::with_val(work, x / &lead)).collect();
    let deriv: Vec<Complex> = (1..=d).map(|i| Complex::with_val(work, &monic[i] * i as u32)).collect();

    let radius = abs(&monic[0]).to_f64().powf(1.0 / d as f64).max(1e-300);
    let mut z: Vec<Complex> = (0..d)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / d as f64 + 0.4;
            Complex::with_val(work, (radius * theta.cos(), radius * theta.sin()))
        })
        .collect();

    let tol = Float::with_val(work, Float::u_exp(1, 8 - prec as i32));
    let max_iter = 200 + 50 * d;
    for _ in 0..max_iter {
        let mut converged = true;
        for k in 0..d {
            let pv = eval(&monic, &z[k], work);
            if pv.is_zero() {
                continue;
            }
            let dv = eval(&deriv, &z[k], work);
            let ratio = Complex::with_val(work, &pv / &dv);
            let mut sum = Complex::new(work);
            for j in 0..d {
                if j != k {
                    let diff = Complex::with_val(work, &z[k] - &z[j]);
                    if !diff.is_zero() {
                        sum += Complex::with_val(work, diff.recip_ref());
                    }
                }
            }
            let denom = Complex::with_val(work, 1 - Complex::with_val(work, &ratio * &sum));
            let step = if denom.is_zero() { ratio } else { Complex::with_val(work, &ratio / &denom) };
            let scale = abs(&z[k]).max(&Float::with_val(work, 1));
            if abs(&step) > Float::with_val(work, &tol * &scale) {
                converged = false;
            }
            z[k] -= step;
        }
        if converged {
            break;
        }
    }
    roots.extend(z.into_iter().map(|x| Complex::with_val(prec, x)));
    Ok(roots)
}

/// Groups roots closer than `2^(-prec/4) max(1, |z|)` and averages each group.
pub fn cluster_roots(roots: &[Complex], prec: u32) -> Vec<(Complex, u32)> {
    let tol = Float::with_val(prec, Float::u_exp(1, -(prec as i32) / 4));
    let mut groups: Vec<(Complex, Vec<Complex>)> = Vec::new();
    for r in roots {
        let scale = abs(r).max(&Float::with_val(prec, 1));
        let limit = Float::with_val(prec, &tol * &scale);
        match groups
            .iter_mut()
            .find(|(rep, _)| abs(&Complex::with_val(prec, rep - r)) <= limit)
        {
            Some((_, members)) => members.push(r.clone()),
            None => groups.push((r.clone(), vec![r.clone()])),
        }
    }
    groups
        .into_iter()
        .map(|(_, members)| {
            let n = members.len() as u32;
            let sum = members.iter().fold(Complex::new(prec), |acc, x| acc + x);
            (Complex::with_val(prec, sum / n), n)
        })
        .collect()
}
