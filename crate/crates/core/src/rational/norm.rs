//! Sampled sup norms over a cheese and the operator-norm experiment
//! `|delta_{a,m}(f)| <= B ||f||_K`.

use rug::ops::Pow;
use rug::{Complex, Float};
use serde_json::{json, Value};

use super::RationalFunction;
use crate::browder::browder_sum;
use crate::error::{Error, Result};
use crate::families::CheeseSpec;
use crate::geometry::Disc;
use crate::par::{self, Execution};
use crate::precision::{format_short, le_rounded, Precision, Verdict};

/// Relative pole-membership slack `2^-32 r`.
pub const POLE_EPS_LOG2: i32 = -32;

/// Lower bound on `sup_K |f|` from a finite sample.
#[derive(Clone, Debug)]
pub struct NormEstimate {
    pub value: Float,
    /// Candidates that fell in `K` and were evaluated.
    pub evaluated: usize,
    pub rejected: usize,
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let mut inv = 1.0 / base as f64;
    let mut out = 0.0;
    while i > 0 {
        out += (i % base) as f64 * inv;
        i /= base;
        inv /= base as f64;
    }
    out
}

fn on_circle(center: &Complex, radius: &Float, theta: f64, bits: u32) -> Complex {
    let unit = Complex::with_val(bits, (0, theta)).exp();
    Complex::with_val(bits, center + unit * radius)
}

/// Rejects `f` when one of its poles lies in `K`: not strictly inside a
/// realized disc (by `2^-32 r`) and not outside the closed outer disc.
fn check_poles(f: &RationalFunction, cheese: &CheeseSpec, discs: &[Disc]) -> Result<()> {
    let bits = f.prec().bits();
    let outer = cheese.family.outer();
    for (p, _) in f.poles() {
        let p = Complex::with_val(bits, p);
        if !outer.closure_contains(&p) {
            continue;
        }
        let covered = discs.iter().any(|d| {
            let slack = Float::with_val(bits, d.radius() * Float::with_val(bits, Float::u_exp(1, POLE_EPS_LOG2)));
            d.dist_to_center(&p) < Float::with_val(bits, d.radius() - slack)
        });
        if !covered {
            return Err(Error::PoleInCheese {
                pole: format!("{} {}", format_short(p.real()), format_short(p.imag())),
            });
        }
    }
    Ok(())
}

/// The `i`-th candidate point: round-robin over the outer circle, a
/// Halton sequence in the bounding square, and each realized boundary
/// circle (pushed outward by a relative `2^(-prec/2)`).
fn candidate(i: u64, outer: &Disc, discs: &[Disc], bits: u32) -> Complex {
    let sources = 2 + discs.len() as u64;
    let (source, j) = (i % sources, i / sources);
    let theta = 2.0 * std::f64::consts::PI * radical_inverse(j + 1, 2);
    let push = Float::with_val(bits, Float::u_exp(1, -(bits as i32) / 2));
    match source {
        0 => {
            let r = Float::with_val(bits, outer.radius() * Float::with_val(bits, 1 - &push));
            on_circle(outer.center(), &r, theta, bits)
        }
        1 => {
            let x = 2.0 * radical_inverse(j + 1, 2) - 1.0;
            let y = 2.0 * radical_inverse(j + 1, 3) - 1.0;
            let offset = Complex::with_val(bits, (x, y)) * outer.radius();
            Complex::with_val(bits, outer.center() + offset)
        }
        k => {
            let d = &discs[(k - 2) as usize];
            let r = Float::with_val(bits, d.radius() * Float::with_val(bits, 1 + &push));
            on_circle(d.center(), &r, theta, bits)
        }
    }
}

/// Lower bound on `||f||_K` from the first `samples` candidate points;
/// nondecreasing in `samples`.
pub fn sup_norm_estimate(f: &RationalFunction, cheese: &CheeseSpec, samples: usize, depth: u64) -> Result<NormEstimate> {
    let bits = f.prec().bits();
    let discs = cheese.family.realize(depth)?;
    check_poles(f, cheese, &discs)?;
    let outer = cheese.family.outer().clone();
    let values = par::try_map_range(Execution::default(), samples, |i| {
        let z = candidate(i as u64, &outer, &discs, bits);
        if !cheese.contains_realized(&z, &discs) {
            return Ok(None);
        }
        let v = f.eval(&z)?;
        Ok::<_, Error>(Some(Float::with_val(bits, v.abs_ref())))
    })?;
    let mut best = Float::new(bits);
    let mut evaluated = 0;
    for v in values.into_iter().flatten() {
        evaluated += 1;
        if v > best {
            best = v;
        }
    }
    Ok(NormEstimate {
        value: best,
        evaluated,
        rejected: samples - evaluated,
    })
}

/// A function with its Taylor functional at (`point`, `order`) and a norm.
#[derive(Clone, Debug)]
pub struct FunctionalSample {
    pub function: RationalFunction,
    pub point: Complex,
    pub order: u32,
    pub delta_value: Complex,
    pub norm_estimate: Float,
    /// The norm is an analytically derived sup norm, not a sampled one.
    pub norm_is_exact: bool,
    pub label: String,
}

impl FunctionalSample {
    pub fn exact(function: RationalFunction, point: Complex, order: u32, norm: Float, label: impl Into<String>) -> Result<Self> {
        let delta_value = function.taylor_functional(&point, order)?;
        Ok(FunctionalSample {
            function,
            point,
            order,
            delta_value,
            norm_estimate: norm,
            norm_is_exact: true,
            label: label.into(),
        })
    }

    pub fn sampled(
        function: RationalFunction,
        point: Complex,
        order: u32,
        cheese: &CheeseSpec,
        samples: usize,
        depth: u64,
    ) -> Result<Self> {
        let delta_value = function.taylor_functional(&point, order)?;
        let norm = sup_norm_estimate(&function, cheese, samples, depth)?.value;
        Ok(FunctionalSample {
            function,
            point,
            order,
            delta_value,
            norm_estimate: norm,
            norm_is_exact: false,
            label: "sampled".into(),
        })
    }

    /// `|delta| / ||f||`.
    pub fn ratio(&self) -> Float {
        let bits = self.norm_estimate.prec();
        let d = Float::with_val(bits, self.delta_value.abs_ref());
        if self.norm_estimate.is_zero() {
            return Float::new(bits);
        }
        d / &self.norm_estimate
    }
}

/// Witnesses `(r_n / (z - a_n))^j` on the road runner with parameter `m`,
/// for `n` in `ns` and `j` in `1..=max_power`. Each has sup norm exactly 1
/// on the cheese, attained on the boundary circle of disc `n`. Closure
/// disjointness is checked first.
pub fn road_runner_witnesses(
    m: u32,
    order: u32,
    ns: impl IntoIterator<Item = u32>,
    max_power: u32,
    prec: Precision,
) -> Result<Vec<FunctionalSample>> {
    let ns: Vec<u32> = ns.into_iter().collect();
    let last = ns.iter().copied().max().unwrap_or(1);
    if !super::exact::road_runner_closures_disjoint(m, last + 1) {
        return Err(Error::invalid("road-runner closures are not disjoint"));
    }
    let jobs: Vec<(u32, u32)> = ns
        .iter()
        .flat_map(|&n| (1..=max_power).map(move |j| (n, j)))
        .collect();
    par::try_map(Execution::default(), &jobs, |&(n, j)| {
        let d = crate::families::road_runner_disc(m, u64::from(n), prec)?;
        let rj = Float::with_val(prec.bits(), d.radius().clone().pow(j));
        let f = RationalFunction::from_poles(
            vec![Complex::with_val(prec.bits(), (rj, 0))],
            vec![(d.center().clone(), j)],
            prec,
        );
        FunctionalSample::exact(f, prec.complex_zero(), order, prec.one(), format!("n={n} j={j}"))
    })
}

#[derive(Clone, Debug)]
pub struct NormExperimentReport {
    pub order: u32,
    /// Certified upper bound on the Browder sum.
    pub bound: Float,
    pub witnesses: usize,
    pub violations: Vec<String>,
    /// Largest `|delta| / ||f||`: an empirical lower bound on the operator norm.
    pub max_ratio: Float,
    pub verdict: Verdict,
}

impl NormExperimentReport {
    pub fn to_json(&self) -> Value {
        json!({
            "order": self.order,
            "browder_bound": format_short(&self.bound),
            "witnesses": self.witnesses,
            "violations": self.violations,
            "max_ratio": format_short(&self.max_ratio),
            "verdict": self.verdict,
        })
    }
}

/// Checks `|delta_{a,m}(f)| <= B ||f||_K` for exact-norm witnesses, where
/// `B` is a certified upper bound on the Browder sum of order `m` at `a`.
pub fn browder_norm_experiment(
    cheese: &CheeseSpec,
    a: &Complex,
    m: u32,
    witnesses: &[FunctionalSample],
    depth: u64,
) -> Result<NormExperimentReport> {
    if let Some(w) = witnesses.iter().find(|w| !w.norm_is_exact) {
        return Err(Error::invalid(format!("witness `{}` has a sampled norm", w.label)));
    }
    if let Some(w) = witnesses.iter().find(|w| w.order != m || &w.point != a) {
        return Err(Error::invalid(format!("witness `{}` is for a different functional", w.label)));
    }
    let report = browder_sum(&cheese.family, m, a, depth)?;
    let bound = match report.upper_bound() {
        Some(b) if report.is_certified_finite() => b,
        _ => return Err(Error::NotCertified(format!("order {m}: {:?}", report.tail))),
    };
    let mut violations = Vec::new();
    let mut max_ratio = Float::new(bound.prec());
    for w in witnesses {
        let bits = bound.prec();
        let delta = Float::with_val(bits, w.delta_value.abs_ref());
        let rhs = Float::with_val(bits, &bound * &w.norm_estimate);
        if !le_rounded(&delta, &rhs) {
            log::error!("witness {} violates |delta| <= B ||f||: {} > {}", w.label, delta, rhs);
            violations.push(w.label.clone());
        }
        let ratio = w.ratio();
        if ratio > max_ratio {
            max_ratio = ratio;
        }
    }
    let verdict = if violations.is_empty() { Verdict::Pass } else { Verdict::Fail };
    Ok(NormExperimentReport {
        order: m,
        bound,
        witnesses: witnesses.len(),
        violations,
        max_ratio,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{road_runner, DiscFamily};

    fn p() -> Precision {
        Precision::default()
    }

    #[test]
    fn constant_and_identity_norms() {
        let cheese = CheeseSpec::new(road_runner(2, p()).unwrap(), "rr");
        let c = RationalFunction::constant(p().complex(0.0, -1.0), p());
        let est = sup_norm_estimate(&c, &cheese, 200, 10).unwrap();
        assert!(crate::precision::rel_err(&est.value, &p().one()) < p().pow2(-100));

        let z = RationalFunction::monomial(1, p());
        let est = sup_norm_estimate(&z, &cheese, 2000, 10).unwrap();
        assert!(est.value <= 1);
        assert!(est.value > Float::with_val(128, 1) - p().pow2(-40));
    }

    #[test]
    fn road_runner_witness_norm_approaches_one() {
        let fam = road_runner(2, p()).unwrap();
        let cheese = CheeseSpec::new(fam, "rr");
        for n in [1u32, 3, 6] {
            let d = crate::families::road_runner_disc(2, u64::from(n), p()).unwrap();
            let f = RationalFunction::simple_pole(Complex::with_val(128, (d.radius(), 0)), d.center().clone(), p());
            let small = sup_norm_estimate(&f, &cheese, 100, 10).unwrap().value;
            let large = sup_norm_estimate(&f, &cheese, 4000, 10).unwrap().value;
            assert!(small <= large);
            assert!(large <= 1);
            assert!(large > Float::with_val(128, 1) - p().pow2(-40));
        }
    }

    #[test]
    fn pole_in_cheese_rejected() {
        let cheese = CheeseSpec::new(DiscFamily::empty(p()), "disc");
        let f = RationalFunction::simple_pole(p().complex(1.0, 0.0), p().complex(0.2, 0.0), p());
        assert!(matches!(sup_norm_estimate(&f, &cheese, 10, 1), Err(Error::PoleInCheese { .. })));
        let outside = RationalFunction::simple_pole(p().complex(1.0, 0.0), p().complex(2.0, 0.0), p());
        assert!(sup_norm_estimate(&outside, &cheese, 10, 1).is_ok());
    }

    #[test]
    fn norm_experiment_on_road_runner() {
        let m = 3;
        let cheese = CheeseSpec::new(road_runner(m, p()).unwrap(), "rr");
        for k in 0..m {
            let ws = road_runner_witnesses(m, k, 1..=30, 3, p()).unwrap();
            let rep = browder_norm_experiment(&cheese, &p().complex_zero(), k, &ws, 30).unwrap();
            assert_eq!(rep.verdict, Verdict::Pass);
            assert!(rep.violations.is_empty());
        }
        // order m: the functional is unbounded, witness ratios grow like n
        let ws = road_runner_witnesses(m, m, 1..=20, 1, p()).unwrap();
        for (n, w) in (1..=20u32).zip(&ws) {
            assert!(crate::precision::rel_err(&w.ratio(), &Float::with_val(128, n)) < p().pow2(-100));
        }
        assert!(matches!(
            browder_norm_experiment(&cheese, &p().complex_zero(), m, &ws, 30),
            Err(Error::NotCertified(_))
        ));
        let constant = FunctionalSample::exact(
            RationalFunction::constant(p().complex(1.0, 0.0), p()),
            p().complex_zero(),
            1,
            p().one(),
            "one",
        )
        .unwrap();
        assert!(constant.delta_value.is_zero());
    }
}
