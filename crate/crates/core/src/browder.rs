//! Browder sums `sum r(D) / s_a(D)^(m+1)` over a family plus its outer disc,
//! with certified tails, the square-root decrease comparison, the order
//! monotonicity check and the grouped majorant for the infinite-order family.

use log::warn;
use rug::ops::Pow;
use rug::{Complex, Float};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::families::{
    infinite_order_group_bound, infinite_order_majorant_tail, budget, sqrt_family, DiscFamily, Generator,
    TailBound, TailMode,
};
use crate::geometry::{s_dist, sqrt_disc, Disc};
use crate::par::{self, Execution};
use crate::precision::{format_short, le_rounded, Precision, StrictCheck, Tolerance, Verdict};

/// Boundary distances below `2^CONDITIONING_LOG2` trigger a warning.
pub const CONDITIONING_LOG2: i32 = -40;

/// `r(D) / s_a(D)^(order+1)`.
pub fn browder_term(d: &Disc, a: &Complex, order: u32) -> Result<Float> {
    let s = s_dist(d, a);
    if s.is_zero() {
        return Err(Error::DegeneratePoint {
            what: format!("a disc of radius {}", format_short(d.radius())),
        });
    }
    let p = d.prec();
    let pow = Float::with_val(p, s.clone().pow(order + 1));
    Ok(Float::with_val(p, d.radius() / &pow))
}

#[derive(Clone, Debug)]
pub struct BrowderReport {
    pub order: u32,
    pub point: Complex,
    /// Outer-disc term plus the realized terms.
    pub realized_sum: Float,
    /// Realized terms without the outer-disc term.
    pub non_unit_sum: Float,
    pub tail: TailBound,
    pub tail_mode: TailMode,
    pub includes_unit_disc_term: bool,
    pub depth: u64,
    pub terms: usize,
    /// Smallest boundary distance fell below `2^-40`.
    pub conditioning_warning: bool,
}

impl BrowderReport {
    /// `realized_sum + tail` when the tail is certified.
    pub fn upper_bound(&self) -> Option<Float> {
        self.tail
            .value()
            .map(|t| Float::with_val(self.realized_sum.prec(), &self.realized_sum + t))
    }

    /// `non_unit_sum + tail` when the tail is certified.
    pub fn non_unit_upper_bound(&self) -> Option<Float> {
        self.tail
            .value()
            .map(|t| Float::with_val(self.non_unit_sum.prec(), &self.non_unit_sum + t))
    }

    pub fn is_certified_finite(&self) -> bool {
        self.tail.is_certified() && self.tail_mode != TailMode::TruncatedOnly
    }

    pub fn to_json(&self) -> Value {
        let tail = match &self.tail {
            TailBound::Certified(v) => Value::String(format_short(v)),
            TailBound::Divergent => Value::String("divergent".into()),
            TailBound::Unknown(_) => Value::String("unknown".into()),
        };
        json!({
            "order": self.order,
            "point": [format_short(self.point.real()), format_short(self.point.imag())],
            "realized_sum": format_short(&self.realized_sum),
            "non_unit_sum": format_short(&self.non_unit_sum),
            "tail_bound": tail,
            "tail_mode": self.tail_mode,
            "certified_finite": self.is_certified_finite(),
            "includes_unit_disc_term": self.includes_unit_disc_term,
            "depth": self.depth,
            "terms": self.terms,
            "conditioning_warning": self.conditioning_warning,
        })
    }
}

/// Browder sum of `order` at `a` over the outer disc and the family realized
/// to `depth`.
pub fn browder_sum(fam: &DiscFamily, order: u32, a: &Complex, depth: u64) -> Result<BrowderReport> {
    browder_sum_with(fam, order, a, depth, Execution::default())
}

pub fn browder_sum_with(
    fam: &DiscFamily,
    order: u32,
    a: &Complex,
    depth: u64,
    exec: Execution,
) -> Result<BrowderReport> {
    let prec = fam.prec();
    let a = Complex::with_val(prec.bits(), a);
    if !fam.outer().closure_contains(&a) {
        return Err(Error::PointOutsideCheese);
    }
    let discs = fam.realize(depth)?;
    let (non_unit_sum, min_s) = realized_terms(&discs, &a, order, exec)?;

    let outer_s = s_dist(fam.outer(), &a);
    if outer_s.is_zero() {
        return Err(Error::DegeneratePoint {
            what: "the outer disc".into(),
        });
    }
    let unit_term = browder_term(fam.outer(), &a, order)?;
    let min_s = match min_s {
        Some(s) => s.min(&outer_s),
        None => outer_s,
    };
    let conditioning_warning = min_s < prec.pow2(CONDITIONING_LOG2);
    if conditioning_warning {
        warn!("boundary distance {} at the evaluation point is below 2^{CONDITIONING_LOG2}", format_short(&min_s));
    }

    let (tail, tail_mode) = fam.browder_tail(order, depth, &a)?;
    Ok(BrowderReport {
        order,
        point: a,
        realized_sum: Float::with_val(prec.bits(), &unit_term + &non_unit_sum),
        non_unit_sum,
        tail,
        tail_mode,
        includes_unit_disc_term: true,
        depth,
        terms: discs.len(),
        conditioning_warning,
    })
}

/// Fixed-order sum of the terms of `discs` and the smallest boundary distance.
fn realized_terms(discs: &[Disc], a: &Complex, order: u32, exec: Execution) -> Result<(Float, Option<Float>)> {
    let prec = a.prec().0;
    let indexed: Vec<(usize, &Disc)> = discs.iter().enumerate().collect();
    let terms = par::try_map(exec, &indexed, |&(index, d)| {
        if d.contains(a) {
            return Err(Error::PointInDisc { index });
        }
        let s = s_dist(d, a);
        if s.is_zero() {
            return Err(Error::DegeneratePoint {
                what: format!("realized disc {index}"),
            });
        }
        let pow = Float::with_val(prec, s.clone().pow(order + 1));
        Ok((Float::with_val(prec, d.radius() / &pow), s))
    })?;
    let mut sum = Float::with_val(prec, 0);
    let mut min_s: Option<Float> = None;
    for (t, s) in terms {
        sum += &t;
        min_s = Some(match min_s {
            Some(m) => m.min(&s),
            None => s,
        });
    }
    Ok((sum, min_s))
}

/// Result of comparing the order-`2m` sum of the square-root family with
/// the order-`m` sum of the source, both at the origin.
#[derive(Clone, Debug)]
pub struct SqrtDecreaseReport {
    pub m: u32,
    pub source: BrowderReport,
    pub transformed: BrowderReport,
    /// Transformed non-unit part (plus its tail when certified) against the
    /// realized non-unit part of the source.
    pub comparison: StrictCheck,
    /// Per realized source disc: both new terms below half the source term.
    pub per_disc_checked: usize,
    pub per_disc_failures: usize,
    pub min_per_disc_margin: Option<Float>,
    pub verdict: Verdict,
}

impl SqrtDecreaseReport {
    pub fn to_json(&self) -> Value {
        json!({
            "m": self.m,
            "source": self.source.to_json(),
            "transformed": self.transformed.to_json(),
            "upper_transformed": format_short(&self.comparison.lhs),
            "lower_source": format_short(&self.comparison.rhs),
            "margin": format_short(&self.comparison.margin),
            "relative_margin": format_short(&self.comparison.relative_margin),
            "per_disc_checked": self.per_disc_checked,
            "per_disc_failures": self.per_disc_failures,
            "verdict": self.verdict,
        })
    }
}

/// Strict decrease of the Browder sum under the square-root transform.
///
/// Certified (`pass`) when the transformed family has a certified tail; when
/// it does not, only realized sums are compared and the verdict is
/// `truncated-only`.
pub fn sqrt_decrease_check(fam: &DiscFamily, m: u32, depth: u64, tol: Tolerance) -> Result<SqrtDecreaseReport> {
    if m < 1 {
        return Err(Error::invalid("sqrt_decrease_check: m must be >= 1"));
    }
    if fam.is_trivially_empty() {
        return Err(Error::EmptyFamily);
    }
    let prec = fam.prec();
    let origin = prec.complex_zero();
    let root = sqrt_family(fam)?;
    let source = browder_sum(fam, m, &origin, depth)?;
    if source.terms == 0 {
        return Err(Error::EmptyFamily);
    }
    let transformed = browder_sum(&root, 2 * m, &origin, depth)?;

    let (upper, tail_ok) = match transformed.non_unit_upper_bound() {
        Some(u) if transformed.tail_mode != TailMode::TruncatedOnly => (u, true),
        _ => (transformed.non_unit_sum.clone(), false),
    };
    let comparison = StrictCheck::less(&upper, &source.non_unit_sum, tol);

    let discs = fam.realize(depth)?;
    let checks = par::try_map(Execution::default(), &discs, |d| {
        let report = sqrt_disc(d)?.certify([m], tol);
        Ok::<_, Error>(report.order_bounds[0].1.clone())
    })?;
    let per_disc_failures = checks.iter().filter(|c| !c.holds).count();
    let min_per_disc_margin = checks
        .iter()
        .map(|c| c.relative_margin.clone())
        .reduce(|a, b| a.min(&b));

    let verdict = if !comparison.holds || per_disc_failures > 0 {
        Verdict::Fail
    } else if tail_ok {
        Verdict::Pass
    } else {
        Verdict::TruncatedOnly
    };
    Ok(SqrtDecreaseReport {
        m,
        source,
        transformed,
        comparison,
        per_disc_checked: checks.len(),
        per_disc_failures,
        min_per_disc_margin,
        verdict,
    })
}

/// One row of [`monotone_order_check`]: `B_k <= 2^(m-k) B_m` on realized terms.
#[derive(Clone, Debug)]
pub struct MonotoneRow {
    pub k: u32,
    pub sum_k: Float,
    pub bound: Float,
    /// Every term satisfies `r/s^(k+1) <= 2^(m-k) r/s^(m+1)`.
    pub termwise: bool,
    pub holds: bool,
}

#[derive(Clone, Debug)]
pub struct MonotoneReport {
    pub m: u32,
    pub rows: Vec<MonotoneRow>,
    pub verdict: Verdict,
}

/// Checks that order `m` dominates every order `k <= m` at `a`, term by term
/// (each boundary distance is at most 2) and on the realized sums.
pub fn monotone_order_check(fam: &DiscFamily, m: u32, a: &Complex, depth: u64) -> Result<MonotoneReport> {
    let prec = fam.prec();
    let a = Complex::with_val(prec.bits(), a);
    let mut discs = vec![fam.outer().clone()];
    discs.extend(fam.realize(depth)?);
    if let Some(index) = discs.iter().skip(1).position(|d| !fam.outer().intersects(d)) {
        return Err(Error::invalid(format!("realized disc {index} does not meet the outer disc")));
    }
    let per_order = |order: u32| -> Result<Vec<Float>> {
        discs.iter().map(|d| browder_term(d, &a, order)).collect()
    };
    let top = per_order(m)?;
    let sum_m = top.iter().fold(prec.zero(), |acc, t| acc + t);
    let mut rows = Vec::new();
    for k in 0..=m {
        let factor = prec.pow2((m - k) as i32);
        let terms = per_order(k)?;
        let termwise = terms
            .iter()
            .zip(&top)
            .all(|(tk, tm)| le_rounded(tk, &Float::with_val(prec.bits(), tm * &factor)));
        let sum_k = terms.iter().fold(prec.zero(), |acc, t| acc + t);
        let bound = Float::with_val(prec.bits(), &sum_m * &factor);
        let holds = termwise && le_rounded(&sum_k, &bound);
        rows.push(MonotoneRow {
            k,
            sum_k,
            bound,
            termwise,
            holds,
        });
    }
    let verdict = if rows.iter().all(|r| r.holds) {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(MonotoneReport { m, rows, verdict })
}

/// One annulus-filtered synthetic group of the infinite-order family.
#[derive(Clone, Debug)]
pub struct GroupReport {
    pub n: u32,
    pub discs: usize,
    pub radius_sum: Float,
    /// `radius_sum < 1/(4 n^n)`.
    pub within_budget: bool,
    /// Discs with `s_0 < 1/(2n)`; nonzero means the construction is broken.
    pub s0_violations: usize,
    /// Group sum of order `m` against `2^(m-1) n^(m+1-n)`.
    pub bound: StrictCheck,
}

#[derive(Clone, Debug)]
pub struct InfiniteOrderReport {
    pub m: u32,
    pub n_max: u32,
    pub groups: Vec<GroupReport>,
    /// Realized total over all groups.
    pub total: Float,
    /// `sum_{n <= n_max} 2^(m-1) n^(m+1-n)`.
    pub majorant_partial: Float,
    /// Certified bound on the majorant beyond `n_max`.
    pub majorant_remainder: Float,
    pub verdict: Verdict,
}

/// Grouped Browder sums of order `m` at the origin for groups `1..=n_max`
/// of the infinite-order family, each against its majorant term.
pub fn infinite_order_estimate(
    n_max: u32,
    m: u32,
    count: u32,
    seed: u64,
    prec: Precision,
    tol: Tolerance,
) -> Result<InfiniteOrderReport> {
    if n_max < 1 {
        return Err(Error::invalid("infinite_order_estimate: n_max must be >= 1"));
    }
    let generator = Generator::InfiniteOrder { count, seed };
    let groups_discs = generator.realize_range(prec, 1, u64::from(n_max))?;
    let origin = prec.complex_zero();
    let indexed: Vec<(u32, Vec<Disc>)> = (1..=n_max).zip(groups_discs).collect();
    let groups = par::try_map(Execution::default(), &indexed, |(n, discs)| {
        let n = *n;
        let floor = Float::with_val(prec.bits(), prec.one() / (2 * n));
        let mut radius_sum = prec.zero();
        let mut sum = prec.zero();
        let mut s0_violations = 0;
        for d in discs {
            radius_sum += d.radius();
            if s_dist(d, &origin) < floor || d.contains(&origin) {
                s0_violations += 1;
            }
            sum += browder_term(d, &origin, m)?;
        }
        let within_budget = radius_sum < budget(n, prec);
        let bound = StrictCheck::less(&sum, &infinite_order_group_bound(n, m, prec), tol);
        Ok::<_, Error>(GroupReport {
            n,
            discs: discs.len(),
            radius_sum,
            within_budget,
            s0_violations,
            bound,
        })
    })?;
    let total = groups.iter().fold(prec.zero(), |acc, g| acc + &g.bound.lhs);
    let majorant_partial = groups.iter().fold(prec.zero(), |acc, g| acc + &g.bound.rhs);
    let majorant_remainder = infinite_order_majorant_tail(m, u64::from(n_max), prec);
    let all_ok = groups
        .iter()
        .all(|g| g.within_budget && g.s0_violations == 0 && g.bound.holds);
    Ok(InfiniteOrderReport {
        m,
        n_max,
        groups,
        total,
        majorant_partial,
        majorant_remainder,
        verdict: if all_ok { Verdict::Pass } else { Verdict::Fail },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{road_runner, road_runner_tail};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rug::Rational;

    fn p() -> Precision {
        Precision::default()
    }

    fn origin() -> Complex {
        p().complex_zero()
    }

    #[test]
    fn empty_family_sum_is_one() {
        for m in 0..5 {
            let r = browder_sum(&DiscFamily::empty(p()), m, &origin(), 10).unwrap();
            assert_eq!(r.realized_sum, 1);
            assert_eq!(r.tail, TailBound::zero(p()));
            assert_eq!(r.tail_mode, TailMode::Exact);
            assert!(r.includes_unit_disc_term);
        }
    }

    #[test]
    fn single_disc_example() {
        let fam = DiscFamily::from_discs(p(), [Disc::from_f64(p(), 0.5, 0.0, 0.25).unwrap()]);
        let r = browder_sum(&fam, 0, &origin(), 1).unwrap();
        assert_eq!(r.realized_sum, 2);
        assert_eq!(r.non_unit_sum, 1);
    }

    #[test]
    fn road_runner_order_one_bounded_by_three() {
        let fam = road_runner(2, p()).unwrap();
        let r = browder_sum(&fam, 1, &origin(), 30).unwrap();
        let upper = r.upper_bound().unwrap();
        assert!(upper <= 3);
        assert!(r.realized_sum >= 1);
        // oracle: direct rational summation of the first 30 terms
        let mut exact = Rational::from(1);
        for n in 1..=30u32 {
            let a = Rational::from((1, 1u64 << n)) / n;
            let rr = a.clone().pow(2u32) / Rational::from(1u64 << n);
            let s = Rational::from(&a - &rr);
            exact += rr / s.pow(2u32);
        }
        let exact = Float::with_val(256, &exact);
        assert!(crate::precision::rel_err(&Float::with_val(256, &r.realized_sum), &exact) < p().pow2(-100));
    }

    #[test]
    fn road_runner_divergent_at_order_m() {
        let fam = road_runner(2, p()).unwrap();
        let r = browder_sum(&fam, 2, &origin(), 10).unwrap();
        assert_eq!(r.tail, TailBound::Divergent);
        assert!(!r.is_certified_finite());
        assert_eq!(
            road_runner_tail(2, 2, 10, p()).unwrap(),
            TailBound::Divergent
        );
    }

    #[test]
    fn point_inside_disc_is_rejected() {
        let fam = DiscFamily::from_discs(p(), [Disc::from_f64(p(), 0.5, 0.0, 0.25).unwrap()]);
        assert!(matches!(
            browder_sum(&fam, 1, &p().complex(0.5, 0.0), 1),
            Err(Error::PointInDisc { index: 0 })
        ));
        assert!(matches!(
            browder_sum(&fam, 1, &p().complex(0.25, 0.0), 1),
            Err(Error::DegeneratePoint { .. })
        ));
        assert!(matches!(
            browder_sum(&fam, 1, &p().complex(1.0, 0.0), 1),
            Err(Error::DegeneratePoint { .. })
        ));
        assert!(matches!(
            browder_sum(&fam, 1, &p().complex(2.0, 0.0), 1),
            Err(Error::PointOutsideCheese)
        ));
    }

    #[test]
    fn terms_match_double_precision_recomputation() {
        let fam = road_runner(3, p()).unwrap();
        let discs = fam.realize(25).unwrap();
        let hi = p().doubled();
        for d in &discs {
            let lo = browder_term(d, &origin(), 2).unwrap();
            let dh = d.with_prec(hi);
            let s = Float::with_val(hi.bits(), dh.center().real() - dh.radius());
            let oracle = Float::with_val(hi.bits(), dh.radius() / Float::with_val(hi.bits(), s.clone().pow(3u32)));
            let err = crate::precision::rel_err(&Float::with_val(hi.bits(), &lo), &oracle);
            assert!(err < p().pow2(-64), "err {err}");
        }
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let fam = road_runner(2, p()).unwrap();
        let a = browder_sum_with(&fam, 1, &origin(), 200, Execution::Sequential).unwrap();
        let b = browder_sum_with(&fam, 1, &origin(), 200, Execution::Parallel).unwrap();
        assert_eq!(a.realized_sum, b.realized_sum);
    }

    #[test]
    fn sqrt_decrease_examples() {
        let fam = DiscFamily::from_discs(p(), [Disc::from_f64(p(), 1.0, 0.0, 0.75).unwrap()]);
        let r = sqrt_decrease_check(&fam, 1, 1, Tolerance::default()).unwrap();
        assert_eq!(r.source.non_unit_sum, 12);
        assert_eq!(r.transformed.non_unit_sum, 8);
        assert_eq!(r.verdict, Verdict::Pass);

        let rr = road_runner(2, p()).unwrap();
        let r = sqrt_decrease_check(&rr, 1, 20, Tolerance::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        assert!(r.comparison.margin > 0);
        // order 2 diverges on the full road runner, so only the truncation compares
        let r = sqrt_decrease_check(&rr, 2, 20, Tolerance::default()).unwrap();
        assert_eq!(r.verdict, Verdict::TruncatedOnly);
        let truncated = DiscFamily::from_discs(p(), rr.realize(20).unwrap());
        let r = sqrt_decrease_check(&truncated, 2, 0, Tolerance::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);

        assert!(matches!(
            sqrt_decrease_check(&DiscFamily::empty(p()), 1, 5, Tolerance::default()),
            Err(Error::EmptyFamily)
        ));
    }

    #[test]
    fn monotone_order_examples() {
        let fam = road_runner(3, p()).unwrap();
        let r = monotone_order_check(&fam, 2, &origin(), 30).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        let row_m = r.rows.last().unwrap();
        assert_eq!(row_m.sum_k, row_m.bound);

        // s_0 = 2 exactly: the term ratio is exactly 2^(m-k)
        let far = DiscFamily::empty(p()).with_outer(Disc::from_f64(p(), 3.0, 0.0, 1.0).unwrap());
        let d = far.outer();
        let t1 = browder_term(d, &origin(), 1).unwrap();
        let t3 = browder_term(d, &origin(), 3).unwrap();
        assert_eq!(t1, t3 * 4u32);
    }

    #[test]
    fn infinite_order_groups_within_majorant() {
        for m in 1..=3 {
            let r = infinite_order_estimate(10, m, 8, 1, p(), Tolerance::default()).unwrap();
            assert_eq!(r.verdict, Verdict::Pass);
            assert!(r.total <= Float::with_val(128, &r.majorant_partial + &r.majorant_remainder));
        }
        let one = infinite_order_estimate(1, 1, 8, 1, p(), Tolerance::default()).unwrap();
        assert_eq!(one.groups.len(), 1);
        assert_eq!(one.majorant_partial, 1);
    }

    #[test]
    fn permutation_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut discs: Vec<Disc> = (0..20)
            .map(|_| {
                let x: f64 = rng.random_range(0.3..0.9);
                let y: f64 = rng.random_range(-0.2..0.2);
                Disc::from_f64(p(), x, y, 0.01).unwrap()
            })
            .collect();
        let a = browder_sum(&DiscFamily::from_discs(p(), discs.clone()), 2, &origin(), 0).unwrap();
        discs.reverse();
        let b = browder_sum(&DiscFamily::from_discs(p(), discs), 2, &origin(), 0).unwrap();
        assert!(crate::precision::rel_err(&a.realized_sum, &b.realized_sum) < p().pow2(-120));
    }
}
