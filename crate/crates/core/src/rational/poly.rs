//! Dense complex polynomials in ascending-power order.

use rug::{Complex, Float};

pub(crate) fn abs(z: &Complex) -> Float {
    Float::with_val(z.prec().0, z.abs_ref())
}

pub(crate) fn is_zero_poly(c: &[Complex]) -> bool {
    c.iter().all(|x| x.is_zero())
}

/// Drops exactly-zero leading coefficients; keeps at least one entry.
pub(crate) fn trim(mut c: Vec<Complex>, prec: u32) -> Vec<Complex> {
    while c.len() > 1 && c.last().is_some_and(|x| x.is_zero()) {
        c.pop();
    }
    if c.is_empty() {
        c.push(Complex::new(prec));
    }
    c
}

pub(crate) fn eval(c: &[Complex], z: &Complex, prec: u32) -> Complex {
    let mut acc = Complex::new(prec);
    for coef in c.iter().rev() {
        acc *= z;
        acc += coef;
    }
    acc
}

/// `sum |c_i| |z|^i`, the scale for relative vanishing tests.
pub(crate) fn abs_eval(c: &[Complex], z: &Complex, prec: u32) -> Float {
    let r = abs(z);
    let mut acc = Float::new(prec);
    for coef in c.iter().rev() {
        acc *= &r;
        acc += abs(coef);
    }
    acc
}

pub(crate) fn mul(a: &[Complex], b: &[Complex], prec: u32) -> Vec<Complex> {
    let mut out = vec![Complex::new(prec); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += Complex::with_val(prec, x * y);
        }
    }
    out
}

/// `c(-z)`.
pub(crate) fn reflect(c: &[Complex]) -> Vec<Complex> {
    c.iter()
        .enumerate()
        .map(|(i, x)| if i % 2 == 1 { Complex::with_val(x.prec(), -x) } else { x.clone() })
        .collect()
}

/// Monic polynomial with the given roots.
pub(crate) fn from_roots(roots: &[(Complex, u32)], prec: u32) -> Vec<Complex> {
    let mut out = vec![Complex::with_val(prec, (1, 0))];
    for (root, mult) in roots {
        let factor = [Complex::with_val(prec, -root), Complex::with_val(prec, (1, 0))];
        for _ in 0..*mult {
            out = mul(&out, &factor, prec);
        }
    }
    out
}

/// Quotient of `c` by `z - root`, discarding the remainder.
pub(crate) fn deflate(c: &[Complex], root: &Complex, prec: u32) -> Vec<Complex> {
    if c.len() <= 1 {
        return vec![Complex::new(prec)];
    }
    let n = c.len() - 1;
    let mut q = vec![Complex::new(prec); n];
    let mut carry = Complex::new(prec);
    for i in (0..n).rev() {
        carry *= root;
        carry += &c[i + 1];
        q[i] = carry.clone();
    }
    q
}

/// Coefficients of `c(a + t)` in powers of `t`.
pub(crate) fn taylor_shift(c: &[Complex], a: &Complex, prec: u32) -> Vec<Complex> {
    let mut out: Vec<Complex> = c.iter().map(|x| Complex::with_val(prec, x)).collect();
    if a.is_zero() {
        return out;
    }
    let n = out.len();
    for i in 0..n {
        for j in (i..n - 1).rev() {
            let t = Complex::with_val(prec, &out[j + 1] * a);
            out[j] += t;
        }
    }
    out
}

/// Coefficients `0..=m` of the power series `num / den` (with `den[0] != 0`).
pub(crate) fn series_div(num: &[Complex], den: &[Complex], m: usize, prec: u32) -> Vec<Complex> {
    let mut out: Vec<Complex> = Vec::with_capacity(m + 1);
    for k in 0..=m {
        let mut acc = num.get(k).map_or_else(|| Complex::new(prec), |x| Complex::with_val(prec, x));
        for j in 1..=k.min(den.len() - 1) {
            acc -= Complex::with_val(prec, &den[j] * &out[k - j]);
        }
        out.push(Complex::with_val(prec, &acc / &den[0]));
    }
    out
}

/// `c(z^2)`.
pub(crate) fn spread_square(c: &[Complex], prec: u32) -> Vec<Complex> {
    let mut out = vec![Complex::new(prec); 2 * c.len() - 1];
    for (i, x) in c.iter().enumerate() {
        out[2 * i] = x.clone();
    }
    out
}

/// Even-index coefficients, as a polynomial in `w = z^2`.
pub(crate) fn even_coefficients(c: &[Complex]) -> Vec<Complex> {
    c.iter().step_by(2).cloned().collect()
}

pub(crate) fn max_abs(c: &[Complex], prec: u32) -> Float {
    c.iter().fold(Float::new(prec), |acc, x| acc.max(&abs(x)))
}
