//! Rational functions with cached poles: evaluation, Taylor functionals
//! `f^(m)(a)/m!`, even parts, descent to `w = z^2` and back, and the
//! sup-norm and point-derivation experiments built on them.

pub mod exact;
mod norm;
mod poly;
mod roots;

use rug::{Complex, Float};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::precision::{format_exact, format_short, rel_err_complex, Precision};

pub use norm::{
    browder_norm_experiment, road_runner_witnesses, sup_norm_estimate, FunctionalSample, NormEstimate,
    NormExperimentReport,
};
pub use roots::{cluster_roots, polynomial_roots};

/// `num / den` in ascending powers with the poles of `den` cached.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalFunction {
    prec: Precision,
    num: Vec<Complex>,
    den: Vec<Complex>,
    poles: Vec<(Complex, u32)>,
}

impl RationalFunction {
    pub fn constant(c: Complex, prec: Precision) -> Self {
        let b = prec.bits();
        let num = vec![Complex::with_val(b, c)];
        let mut f = RationalFunction {
            prec,
            num,
            den: vec![Complex::with_val(b, (1, 0))],
            poles: Vec::new(),
        };
        f.canonical_zero();
        f
    }

    /// `z^k`.
    pub fn monomial(k: usize, prec: Precision) -> Self {
        let b = prec.bits();
        let mut num = vec![Complex::new(b); k + 1];
        num[k] = Complex::with_val(b, (1, 0));
        RationalFunction::polynomial(num, prec)
    }

    pub fn polynomial(num: Vec<Complex>, prec: Precision) -> Self {
        RationalFunction::from_poles(num, Vec::new(), prec)
    }

    /// `residue / (z - pole)`.
    pub fn simple_pole(residue: Complex, pole: Complex, prec: Precision) -> Self {
        RationalFunction::from_poles(vec![residue], vec![(pole, 1)], prec)
    }

    /// Numerator over the monic polynomial with the given poles, reduced.
    pub fn from_poles(num: Vec<Complex>, poles: Vec<(Complex, u32)>, prec: Precision) -> Self {
        let b = prec.bits();
        let poles: Vec<(Complex, u32)> = poles
            .into_iter()
            .filter(|(_, m)| *m > 0)
            .map(|(p, m)| (Complex::with_val(b, p), m))
            .collect();
        let num = poly::trim(num.into_iter().map(|x| Complex::with_val(b, x)).collect(), b);
        let mut f = RationalFunction {
            prec,
            den: poly::from_roots(&poles, b),
            num,
            poles,
        };
        f.reduce();
        f
    }

    /// From raw coefficient lists; poles are located numerically.
    pub fn from_coefficients(num: Vec<Complex>, den: Vec<Complex>, prec: Precision) -> Result<Self> {
        let b = prec.bits();
        let den = poly::trim(den.into_iter().map(|x| Complex::with_val(b, x)).collect(), b);
        if poly::is_zero_poly(&den) {
            return Err(Error::invalid("denominator is identically zero"));
        }
        let lead = den.last().expect("trimmed").clone();
        let den: Vec<Complex> = den.iter().map(|x| Complex::with_val(b, x / &lead)).collect();
        let num: Vec<Complex> = num.into_iter().map(|x| Complex::with_val(b, x / &lead)).collect();
        let poles = cluster_roots(&polynomial_roots(&den, b)?, b);
        let mut f = RationalFunction {
            prec,
            num: poly::trim(num, b),
            den,
            poles,
        };
        f.reduce();
        Ok(f)
    }

    pub fn prec(&self) -> Precision {
        self.prec
    }

    pub fn numerator(&self) -> &[Complex] {
        &self.num
    }

    pub fn denominator(&self) -> &[Complex] {
        &self.den
    }

    pub fn poles(&self) -> &[(Complex, u32)] {
        &self.poles
    }

    pub fn is_zero(&self) -> bool {
        poly::is_zero_poly(&self.num)
    }

    fn bits(&self) -> u32 {
        self.prec.bits()
    }

    fn canonical_zero(&mut self) {
        if poly::is_zero_poly(&self.num) {
            let b = self.bits();
            self.num = vec![Complex::new(b)];
            self.den = vec![Complex::with_val(b, (1, 0))];
            self.poles.clear();
        }
    }

    /// Relative threshold for "numerator vanishes at a pole".
    fn vanish_tol(&self) -> Float {
        let b = self.bits();
        Float::with_val(b, Float::u_exp(1, -(b as i32) * 3 / 4))
    }

    /// Cancels common roots of numerator and denominator at the cached poles.
    fn reduce(&mut self) {
        let b = self.bits();
        self.canonical_zero();
        if self.is_zero() {
            return;
        }
        let tol = self.vanish_tol();
        let mut poles = std::mem::take(&mut self.poles);
        for (p, mult) in poles.iter_mut() {
            while *mult > 0 && self.num.len() > 1 {
                let value = poly::abs(&poly::eval(&self.num, p, b));
                let scale = poly::abs_eval(&self.num, p, b);
                if value > Float::with_val(b, &scale * &tol) {
                    break;
                }
                self.num = poly::deflate(&self.num, p, b);
                self.den = poly::deflate(&self.den, p, b);
                *mult -= 1;
            }
        }
        poles.retain(|(_, m)| *m > 0);
        self.poles = poles;
    }

    /// Degree of the denominator.
    pub fn pole_count(&self) -> u32 {
        self.poles.iter().map(|(_, m)| m).sum()
    }

    fn check_not_pole(&self, z: &Complex) -> Result<()> {
        let b = self.bits();
        let tol = Float::with_val(b, Float::u_exp(1, 8 - b as i32));
        for (p, _) in &self.poles {
            let scale = poly::abs(p).max(&poly::abs(z));
            if poly::abs(&Complex::with_val(b, z - p)) <= Float::with_val(b, &tol * &scale) {
                return Err(Error::PoleEvaluation {
                    pole: format!("{} {}", format_short(p.real()), format_short(p.imag())),
                });
            }
        }
        Ok(())
    }

    pub fn eval(&self, z: &Complex) -> Result<Complex> {
        let b = self.bits();
        self.check_not_pole(z)?;
        let d = poly::eval(&self.den, z, b);
        if d.is_zero() {
            return Err(Error::PoleEvaluation {
                pole: format!("{} {}", format_short(z.real()), format_short(z.imag())),
            });
        }
        Ok(Complex::with_val(b, poly::eval(&self.num, z, b) / d))
    }

    /// Taylor coefficients `0..=m` at `a`, by shifting to `a` and dividing
    /// power series.
    pub fn taylor_coefficients(&self, a: &Complex, m: u32) -> Result<Vec<Complex>> {
        let b = self.bits();
        self.check_not_pole(a)?;
        let num = poly::taylor_shift(&self.num, a, b);
        let den = poly::taylor_shift(&self.den, a, b);
        if den[0].is_zero() {
            return Err(Error::PoleEvaluation {
                pole: format!("{} {}", format_short(a.real()), format_short(a.imag())),
            });
        }
        Ok(poly::series_div(&num, &den, m as usize, b))
    }

    /// `delta_{a,m}(f) = f^(m)(a) / m!`.
    pub fn taylor_functional(&self, a: &Complex, m: u32) -> Result<Complex> {
        Ok(self.taylor_coefficients(a, m)?.pop().expect("m + 1 coefficients"))
    }

    /// `(z - a)^k f`.
    pub fn times_shifted_power(&self, a: &Complex, k: u32) -> RationalFunction {
        let b = self.bits();
        let factor = [Complex::with_val(b, -a), Complex::with_val(b, (1, 0))];
        let mut num = self.num.clone();
        for _ in 0..k {
            num = poly::mul(&num, &factor, b);
        }
        let mut f = RationalFunction {
            prec: self.prec,
            num,
            den: self.den.clone(),
            poles: self.poles.clone(),
        };
        f.reduce();
        f
    }

    /// `f` with exactly-zero odd coefficients in numerator and denominator.
    fn is_structurally_even(&self) -> bool {
        let odd_zero = |c: &[Complex]| c.iter().skip(1).step_by(2).all(|x| x.is_zero());
        odd_zero(&self.num) && odd_zero(&self.den)
    }

    /// Numerator and denominator of `(f(z) + f(-z))/2` as polynomials in
    /// `w = z^2`, with the denominator roots in `w`.
    fn even_form(&self) -> (Vec<Complex>, Vec<Complex>, Vec<(Complex, u32)>) {
        let b = self.bits();
        if self.is_structurally_even() {
            // an even denominator has roots in pairs ±p, one root p^2 in w per pair
            let poles = w_poles(self.poles.iter(), b)
                .into_iter()
                .map(|(w, m)| (w, m.div_ceil(2)))
                .collect();
            return (poly::even_coefficients(&self.num), poly::even_coefficients(&self.den), poles);
        }
        // p(z) q(-z) + p(-z) q(z) over 2 q(z) q(-z)
        let den_neg = poly::reflect(&self.den);
        let a = poly::mul(&self.num, &den_neg, b);
        let mut bb = poly::mul(&self.den, &den_neg, b);
        for (i, x) in bb.iter_mut().enumerate() {
            if i % 2 == 1 {
                *x = Complex::new(b);
            }
        }
        let poles = w_poles(self.poles.iter(), b);
        (poly::even_coefficients(&a), poly::even_coefficients(&bb), poles)
    }

    fn from_parts(num: Vec<Complex>, den: Vec<Complex>, poles: Vec<(Complex, u32)>, prec: Precision) -> Self {
        let b = prec.bits();
        let den = poly::trim(den, b);
        let lead = den.last().expect("nonempty").clone();
        let mut f = RationalFunction {
            prec,
            num: poly::trim(num.iter().map(|x| Complex::with_val(b, x / &lead)).collect(), b),
            den: den.iter().map(|x| Complex::with_val(b, x / &lead)).collect(),
            poles,
        };
        f.reduce();
        f
    }

    /// `g(z) = (f(z) + f(-z)) / 2`, reduced.
    pub fn even_part(&self) -> RationalFunction {
        if self.is_structurally_even() {
            return self.clone();
        }
        let (num, den, poles) = self.even_form();
        RationalFunction::from_parts(num, den, poles, self.prec).compose_square()
    }

    /// Largest odd-coefficient magnitude of `p(z) q(-z)` relative to its
    /// largest coefficient; zero for even functions.
    pub fn odd_residual(&self) -> Float {
        let b = self.bits();
        if self.is_structurally_even() {
            return Float::new(b);
        }
        let a = poly::mul(&self.num, &poly::reflect(&self.den), b);
        let scale = poly::max_abs(&a, b);
        if scale.is_zero() {
            return Float::new(b);
        }
        let odd: Vec<Complex> = a.iter().skip(1).step_by(2).cloned().collect();
        poly::max_abs(&odd, b) / scale
    }

    /// `h` with `g(z) = h(z^2)` for an even `g`.
    pub fn descend_even(&self) -> Result<RationalFunction> {
        let b = self.bits();
        let residual = self.odd_residual();
        if residual > Float::with_val(b, Float::u_exp(1, -(b as i32) / 2)) {
            return Err(Error::NotEven {
                residual: format_short(&residual),
            });
        }
        let (num, den, poles) = self.even_form();
        Ok(RationalFunction::from_parts(num, den, poles, self.prec))
    }

    /// `h(z^2)`; poles are the square roots of the poles of `h`.
    pub fn compose_square(&self) -> RationalFunction {
        let b = self.bits();
        let mut poles = Vec::new();
        for (p, m) in &self.poles {
            if p.is_zero() {
                poles.push((p.clone(), 2 * m));
            } else {
                let r = Complex::with_val(b, p.sqrt_ref());
                poles.push((Complex::with_val(b, -&r), *m));
                poles.push((r, *m));
            }
        }
        RationalFunction {
            prec: self.prec,
            num: poly::spread_square(&self.num, b),
            den: poly::spread_square(&self.den, b),
            poles,
        }
    }

    pub fn to_json(&self) -> Value {
        let coefs = |c: &[Complex]| -> Value {
            Value::Array(
                c.iter()
                    .map(|x| json!([format_exact(x.real()), format_exact(x.imag())]))
                    .collect(),
            )
        };
        json!({ "num": coefs(&self.num), "den": coefs(&self.den) })
    }

    /// Parses `{"num": [[re, im], ...], "den": [[re, im], ...]}`; entries may
    /// be numbers or decimal strings.
    pub fn from_json(text: &str, prec: Precision) -> Result<RationalFunction> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Num {
            Text(String),
            Number(serde_json::Number),
        }
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            num: Vec<[Num; 2]>,
            den: Vec<[Num; 2]>,
        }
        let mut de = serde_json::Deserializer::from_str(text);
        let raw: Raw = serde_path_to_error::deserialize(&mut de)
            .map_err(|e| Error::schema(e.path().to_string(), e.into_inner().to_string()))?;
        de.end().map_err(|e| Error::schema(".", e.to_string()))?;
        let parse = |list: &[[Num; 2]], field: &str| -> Result<Vec<Complex>> {
            list.iter()
                .enumerate()
                .map(|(i, [re, im])| {
                    let get = |n: &Num, j: usize| {
                        let text = match n {
                            Num::Text(s) => s.clone(),
                            Num::Number(x) => x.to_string(),
                        };
                        prec.parse(&text)
                            .map_err(|e| Error::schema(format!("{field}[{i}][{j}]"), e.to_string()))
                    };
                    Ok(Complex::with_val(prec.bits(), (get(re, 0)?, get(im, 1)?)))
                })
                .collect()
        };
        let num = parse(&raw.num, "num")?;
        let den = parse(&raw.den, "den")?;
        if num.is_empty() {
            return Err(Error::schema("num", "at least one coefficient is required"));
        }
        if den.is_empty() || den.iter().all(|x| x.is_zero()) {
            return Err(Error::schema("den", "denominator is identically zero"));
        }
        RationalFunction::from_coefficients(num, den, prec)
    }
}

/// Squares of the given poles, merged when equal up to clustering tolerance.
fn w_poles<'a>(poles: impl Iterator<Item = &'a (Complex, u32)>, bits: u32) -> Vec<(Complex, u32)> {
    let mut out: Vec<(Complex, u32)> = Vec::new();
    let tol = Float::with_val(bits, Float::u_exp(1, -(bits as i32) / 2));
    for (p, m) in poles {
        let w = Complex::with_val(bits, p.square_ref());
        let scale = poly::abs(&w).max(&Float::with_val(bits, 1));
        let limit = Float::with_val(bits, &tol * &scale);
        match out
            .iter_mut()
            .find(|(q, _)| poly::abs(&Complex::with_val(bits, &w - q)) <= limit)
        {
            Some((_, k)) => *k += m,
            None => out.push((w, *m)),
        }
    }
    out
}

/// Both sides of `delta_{a,k}(f) = delta_{a,m}((z-a)^(m-k) f)`.
#[derive(Clone, Debug)]
pub struct DeltaShiftReport {
    pub lhs: Complex,
    pub rhs: Complex,
    pub rel_err: Float,
}

pub fn relation_delta_shift(f: &RationalFunction, a: &Complex, k: u32, m: u32) -> Result<DeltaShiftReport> {
    if k > m {
        return Err(Error::invalid("relation_delta_shift: need k <= m"));
    }
    let lhs = f.taylor_functional(a, k)?;
    let rhs = f.times_shifted_power(a, m - k).taylor_functional(a, m)?;
    let rel_err = rel_err_complex(&lhs, &rhs);
    Ok(DeltaShiftReport { lhs, rhs, rel_err })
}

/// `delta_{0,2m}(f)`, `delta_{0,2m}(g)` and `delta_{0,m}(h)` for the even
/// part `g` of `f` and its descent `h`.
#[derive(Clone, Debug)]
pub struct DescentReport {
    pub m: u32,
    pub delta_f: Complex,
    pub delta_g: Complex,
    pub delta_h: Complex,
    /// Worst relative discrepancy among the three.
    pub rel_err: Float,
    /// All three vanish exactly.
    pub exact_zero: bool,
}

pub fn delta_descent_check(f: &RationalFunction, m: u32) -> Result<DescentReport> {
    let origin = f.prec().complex_zero();
    let g = f.even_part();
    let h = g.descend_even()?;
    let delta_f = f.taylor_functional(&origin, 2 * m)?;
    let delta_g = g.taylor_functional(&origin, 2 * m)?;
    let delta_h = h.taylor_functional(&origin, m)?;
    let rel_err = rel_err_complex(&delta_f, &delta_g).max(&rel_err_complex(&delta_f, &delta_h));
    let exact_zero = delta_f.is_zero() && delta_g.is_zero() && delta_h.is_zero();
    Ok(DescentReport {
        m,
        delta_f,
        delta_g,
        delta_h,
        rel_err,
        exact_zero,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precision::rel_err_complex;
    use rug::ops::Pow;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn p() -> Precision {
        Precision::default()
    }

    fn c(re: f64, im: f64) -> Complex {
        p().complex(re, im)
    }

    fn close(a: &Complex, b: &Complex, log2: i32) -> bool {
        rel_err_complex(a, b) < p().pow2(log2)
    }

    #[test]
    fn eval_examples() {
        let one = RationalFunction::constant(c(1.0, 0.0), p());
        assert_eq!(one.eval(&c(0.3, 0.7)).unwrap(), c(1.0, 0.0));
        let sq = RationalFunction::monomial(2, p());
        assert_eq!(sq.eval(&c(1.0, 1.0)).unwrap(), c(0.0, 2.0));
        let f = RationalFunction::simple_pole(c(0.125, 0.0), c(0.5, 0.0), p());
        assert_eq!(f.eval(&c(0.0, 0.0)).unwrap(), c(-0.25, 0.0));
        assert!(matches!(f.eval(&c(0.5, 0.0)), Err(Error::PoleEvaluation { .. })));
    }

    #[test]
    fn taylor_examples() {
        let z = c(0.0, 0.0);
        for k in 0..5 {
            for m in 0..5 {
                let v = RationalFunction::monomial(k, p()).taylor_functional(&z, m as u32).unwrap();
                assert_eq!(v, c(if k == m { 1.0 } else { 0.0 }, 0.0));
            }
        }
        let geo = RationalFunction::from_coefficients(vec![c(1.0, 0.0)], vec![c(1.0, 0.0), c(-1.0, 0.0)], p()).unwrap();
        for m in 0..10 {
            assert!(close(&geo.taylor_functional(&z, m).unwrap(), &c(1.0, 0.0), -120));
        }
        let f = RationalFunction::simple_pole(c(1.0, 0.0), c(0.5, 0.0), p());
        assert!(f.taylor_functional(&c(0.5, 0.0), 1).is_err());
    }

    #[test]
    fn taylor_matches_contour_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let f = random_function(&mut rng, 6);
        let a = c(0.05, -0.02);
        // trapezoid rule on a circle of radius rho around a
        let rho = 0.1;
        let samples = 256;
        for m in 0..6u32 {
            let mut acc = Complex::new(128);
            for j in 0..samples {
                let t = 2.0 * std::f64::consts::PI * j as f64 / samples as f64;
                let u = c(rho * t.cos(), rho * t.sin());
                let z = Complex::with_val(128, &a + &u);
                let v = f.eval(&z).unwrap();
                let upow = Complex::with_val(128, u.clone().pow(m));
                acc += v / upow;
            }
            let oracle = acc / samples as u32;
            let direct = f.taylor_functional(&a, m).unwrap();
            assert!(close(&direct, &oracle, -40), "m={m}: {direct} vs {oracle}");
        }
    }

    #[test]
    fn delta_shift_relation() {
        let a_n = Float::with_val(128, 1) / 24u32;
        let r_n = Float::with_val(128, &a_n * &a_n) / 8u32;
        let f = RationalFunction::simple_pole(
            Complex::with_val(128, (&r_n, 0)),
            Complex::with_val(128, (&a_n, 0)),
            p(),
        );
        let z = c(0.0, 0.0);
        let rep = relation_delta_shift(&f, &z, 1, 3).unwrap();
        let expect = Float::with_val(128, -(&r_n / Float::with_val(128, a_n.square_ref())));
        assert!(close(&rep.lhs, &Complex::with_val(128, (&expect, 0)), -120));
        assert!(rep.rel_err < p().pow2(-100));
        let same = relation_delta_shift(&f, &z, 2, 2).unwrap();
        assert_eq!(same.lhs, same.rhs);

        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let g = random_function(&mut rng, 5);
            let a = c(rng.random_range(-0.1..0.1), rng.random_range(-0.1..0.1));
            let rep = relation_delta_shift(&g, &a, 1, 4).unwrap();
            assert!(rep.rel_err < p().pow2(-64));
        }
    }

    pub(crate) fn random_function(rng: &mut ChaCha8Rng, poles: usize) -> RationalFunction {
        let poles: Vec<(Complex, u32)> = (0..poles)
            .map(|_| {
                let r: f64 = rng.random_range(0.3..2.0);
                let t: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                (c(r * t.cos(), r * t.sin()), 1)
            })
            .collect();
        let num: Vec<Complex> = (0..poles.len())
            .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        RationalFunction::from_poles(num, poles, p())
    }

    #[test]
    fn even_part_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        // even input comes back unchanged
        let g = RationalFunction::from_poles(vec![c(1.0, 0.0)], vec![(c(0.5, 0.0), 1), (c(-0.5, 0.0), 1)], p());
        assert_eq!(g.even_part(), g);
        // odd input gives zero
        let odd = RationalFunction::from_coefficients(
            vec![c(0.0, 0.0), c(2.0, 0.0)],
            vec![c(-0.25, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
            p(),
        )
        .unwrap();
        assert!(odd.even_part().is_zero());
        // simple pole: g = p / (z^2 - p^2)
        let pole = c(0.6, 0.3);
        let f = RationalFunction::simple_pole(c(1.0, 0.0), pole.clone(), p());
        let g = f.even_part();
        for _ in 0..1000 {
            let z = c(rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5));
            let zn = Complex::with_val(128, -&z);
            let pointwise = Complex::with_val(128, f.eval(&z).unwrap() + f.eval(&zn).unwrap()) / 2u32;
            let closed = Complex::with_val(
                128,
                &pole / Complex::with_val(128, Complex::with_val(128, z.square_ref()) - Complex::with_val(128, pole.square_ref())),
            );
            assert!(close(&g.eval(&z).unwrap(), &pointwise, -100));
            assert!(close(&closed, &pointwise, -100));
        }
        // idempotent
        let h = random_function(&mut rng, 4).even_part();
        assert_eq!(h.even_part(), h);
    }

    #[test]
    fn descent_examples() {
        let z2 = RationalFunction::monomial(2, p());
        assert_eq!(z2.descend_even().unwrap(), RationalFunction::monomial(1, p()));

        let g = RationalFunction::from_coefficients(vec![c(1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)], p())
            .unwrap();
        let h = g.descend_even().unwrap();
        let expect =
            RationalFunction::from_coefficients(vec![c(1.0, 0.0)], vec![c(1.0, 0.0), c(-1.0, 0.0)], p()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..100 {
            let w = c(rng.random_range(-0.9..0.9), rng.random_range(-0.9..0.9));
            assert!(close(&h.eval(&w).unwrap(), &expect.eval(&w).unwrap(), -100));
        }
        let not_even = RationalFunction::simple_pole(c(1.0, 0.0), c(0.5, 0.0), p());
        assert!(matches!(not_even.descend_even(), Err(Error::NotEven { .. })));
    }

    #[test]
    fn compose_square_round_trip() {
        assert_eq!(RationalFunction::monomial(1, p()).compose_square(), RationalFunction::monomial(2, p()));
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..10 {
            let h = random_function(&mut rng, 4);
            let g = h.compose_square();
            let back = g.descend_even().unwrap();
            for _ in 0..20 {
                let w = c(rng.random_range(-0.2..0.2), rng.random_range(-0.2..0.2));
                assert!(close(&back.eval(&w).unwrap(), &h.eval(&w).unwrap(), -90));
            }
            // poles of h(z^2) square to poles of h
            for (q, _) in g.poles() {
                let sq = Complex::with_val(128, q.square_ref());
                assert!(h.poles().iter().any(|(p0, _)| close(&sq, p0, -100)));
            }
            // root-finding oracle on the composed denominator
            let found = polynomial_roots(g.denominator(), 128).unwrap();
            assert_eq!(found.len() as u32, g.pole_count());
        }
    }

    #[test]
    fn descent_identity_simple_pole() {
        let pole = c(0.7, -0.4);
        let f = RationalFunction::simple_pole(c(1.0, 0.0), pole.clone(), p());
        for m in 1..5u32 {
            let rep = delta_descent_check(&f, m).unwrap();
            let expect = Complex::with_val(128, -Complex::with_val(128, pole.clone().pow(2 * m + 1)).recip());
            assert!(close(&rep.delta_f, &expect, -110));
            assert!(rep.rel_err < p().pow2(-64));
        }
    }

    #[test]
    fn reduction_cancels_common_roots() {
        // (z - 1/2)/(z - 1/2)(z - 2) = 1/(z - 2)
        let f = RationalFunction::from_poles(
            vec![c(-0.5, 0.0), c(1.0, 0.0)],
            vec![(c(0.5, 0.0), 1), (c(2.0, 0.0), 1)],
            p(),
        );
        assert_eq!(f.pole_count(), 1);
        assert_eq!(f, RationalFunction::simple_pole(c(1.0, 0.0), c(2.0, 0.0), p()));
    }

    #[test]
    fn json_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = random_function(&mut rng, 3);
        let g = RationalFunction::from_json(&f.to_json().to_string(), p()).unwrap();
        for _ in 0..10 {
            let z = c(rng.random_range(-0.2..0.2), rng.random_range(-0.2..0.2));
            assert!(close(&f.eval(&z).unwrap(), &g.eval(&z).unwrap(), -90));
        }
        match RationalFunction::from_json(r#"{"num": [[1, 0]], "den": [[0, "x"]]}"#, p()) {
            Err(Error::Schema { path, .. }) => assert_eq!(path, "den[0][1]"),
            other => panic!("{other:?}"),
        }
        assert!(RationalFunction::from_json(r#"{"num": [[1, 0]], "den": [[0, 0]]}"#, p()).is_err());
    }
}
