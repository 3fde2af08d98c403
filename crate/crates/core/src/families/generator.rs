//! Closed-form index -> disc-group rules and their analytic tail bounds.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::ops::Pow;
use rug::{Complex, Float};

use crate::browder::browder_term;
use crate::error::{Error, Result};
use crate::geometry::{affine_disc, sqrt_disc, Disc};
use crate::precision::Precision;

/// Upper bound on the unrealized part of a positive series.
#[derive(Clone, Debug, PartialEq)]
pub enum TailBound {
    /// Certified finite upper bound.
    Certified(Float),
    /// The remaining series is known to diverge.
    Divergent,
    /// No bound is available; results are truncated-only.
    Unknown(String),
}

impl TailBound {
    pub fn zero(prec: Precision) -> Self {
        TailBound::Certified(prec.zero())
    }

    pub fn value(&self) -> Option<&Float> {
        match self {
            TailBound::Certified(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_certified(&self) -> bool {
        matches!(self, TailBound::Certified(_))
    }

    /// Sum of two bounds on disjoint parts of one series.
    pub fn plus(self, other: TailBound) -> TailBound {
        match (self, other) {
            (TailBound::Divergent, _) | (_, TailBound::Divergent) => TailBound::Divergent,
            (TailBound::Unknown(a), _) => TailBound::Unknown(a),
            (_, TailBound::Unknown(b)) => TailBound::Unknown(b),
            (TailBound::Certified(a), TailBound::Certified(b)) => {
                let p = a.prec().max(b.prec());
                TailBound::Certified(Float::with_val(p, &a + &b))
            }
        }
    }

    pub fn scaled(self, factor: &Float) -> TailBound {
        match self {
            TailBound::Certified(v) => TailBound::Certified(Float::with_val(v.prec(), &v * factor)),
            other => other,
        }
    }
}

/// Index -> group-of-discs rule. Indices start at 1.
#[derive(Clone, Debug, PartialEq)]
pub enum Generator {
    /// `D(a_n, r_n)` with `a_n = 1/(2^n n)`, `r_n = a_n^m / 2^n`.
    RoadRunner { m: u32 },
    /// `count` pseudo-random discs (one per index) with total radius below `1/(4 n^n)`.
    SyntheticBudget { n: u32, count: u32, seed: u64 },
    /// Group `n` is the synthetic budget family for `n`, filtered to the
    /// annulus `1/n <= |z| <= 1`.
    InfiniteOrder { count: u32, seed: u64 },
    /// Both square-root discs of every disc of the inner group.
    Sqrt(Box<Generator>),
    /// Discs of the inner group meeting the annulus `1/n <= |z| <= 1`.
    Annulus { inner: Box<Generator>, n: u32 },
    /// `shift + scale * D` for every disc of the inner group.
    Affine {
        inner: Box<Generator>,
        shift: Complex,
        scale: Float,
    },
}

impl Generator {
    pub fn id(&self) -> &'static str {
        match self {
            Generator::RoadRunner { .. } => "road_runner",
            Generator::SyntheticBudget { .. } => "synthetic_budget",
            Generator::InfiniteOrder { .. } => "infinite_order",
            Generator::Sqrt(_) => "sqrt",
            Generator::Annulus { .. } => "annulus",
            Generator::Affine { .. } => "affine",
        }
    }

    /// Largest valid index for finite generators.
    pub fn last_index(&self) -> Option<u64> {
        match self {
            Generator::SyntheticBudget { count, .. } => Some(u64::from(*count)),
            Generator::RoadRunner { .. } | Generator::InfiniteOrder { .. } => None,
            Generator::Sqrt(inner) | Generator::Annulus { inner, .. } | Generator::Affine { inner, .. } => {
                inner.last_index()
            }
        }
    }

    pub fn is_road_runner(&self) -> bool {
        matches!(self, Generator::RoadRunner { .. })
    }

    /// Realizes the groups for indices `start .. start + count`, clipped to
    /// [`Generator::last_index`].
    pub fn realize_range(&self, prec: Precision, start: u64, count: u64) -> Result<Vec<Vec<Disc>>> {
        let start = start.max(1);
        let end = match self.last_index() {
            Some(last) => (start + count).min(last + 1),
            None => start + count,
        };
        if end <= start {
            return Ok(Vec::new());
        }
        match self {
            Generator::RoadRunner { m } => (start..end)
                .map(|n| road_runner_disc(*m, n, prec).map(|d| vec![d]))
                .collect(),
            Generator::SyntheticBudget { n, count, seed } => {
                let all = synthetic_discs(*n, *count, *seed, prec)?;
                Ok(all[(start - 1) as usize..(end - 1) as usize]
                    .iter()
                    .map(|d| vec![d.clone()])
                    .collect())
            }
            Generator::InfiniteOrder { count, seed } => (start..end)
                .map(|n| {
                    let n = u32::try_from(n).map_err(|_| Error::invalid("infinite_order group index too large"))?;
                    let discs = synthetic_discs(n, *count, *seed, prec)?;
                    Ok(discs.into_iter().filter(|d| meets_annulus(d, n)).collect())
                })
                .collect(),
            Generator::Sqrt(inner) => inner
                .realize_range(prec, start, end - start)?
                .into_iter()
                .zip(start..)
                .map(|(group, index)| {
                    let mut out = Vec::with_capacity(group.len() * 2);
                    for d in &group {
                        let pair = sqrt_disc(d).map_err(|e| match e {
                            Error::OriginNotExcluded { center_abs, radius, .. } => Error::OriginNotExcluded {
                                index: index as usize,
                                center_abs,
                                radius,
                            },
                            other => other,
                        })?;
                        out.push(pair.delta1);
                        out.push(pair.delta2);
                    }
                    Ok(out)
                })
                .collect(),
            Generator::Annulus { inner, n } => Ok(inner
                .realize_range(prec, start, end - start)?
                .into_iter()
                .map(|g| g.into_iter().filter(|d| meets_annulus(d, *n)).collect())
                .collect()),
            Generator::Affine { inner, shift, scale } => inner
                .realize_range(prec, start, end - start)?
                .into_iter()
                .map(|g| g.iter().map(|d| affine_disc(d, shift, scale)).collect())
                .collect(),
        }
    }

    /// Bound on the Browder terms at the origin of order `order` over all
    /// indices `>= next`.
    pub fn browder_tail_at_origin(&self, order: u32, next: u64, prec: Precision) -> Result<TailBound> {
        if let Some(last) = self.last_index() {
            return self.exact_remainder(next, last, prec, |d| {
                browder_term(d, &prec.complex_zero(), order)
            });
        }
        match self {
            Generator::RoadRunner { m } => road_runner_tail(*m, order, next.saturating_sub(1), prec),
            Generator::InfiniteOrder { .. } => Ok(TailBound::Certified(infinite_order_majorant_tail(
                order,
                next.saturating_sub(1),
                prec,
            ))),
            Generator::Sqrt(inner) => inner.browder_tail_at_origin(order.div_ceil(2), next, prec),
            Generator::Annulus { inner, .. } => inner.browder_tail_at_origin(order, next, prec),
            Generator::Affine { .. } => Ok(TailBound::Unknown(
                "affine generator has no tail bound at the origin".into(),
            )),
            Generator::SyntheticBudget { .. } => unreachable!("finite generator handled above"),
        }
    }

    /// Exact sum of the Browder terms at `point` over the indices `>= next`
    /// of a finite generator; `None` for infinite generators.
    pub fn finite_remainder_at(&self, order: u32, next: u64, point: &Complex, prec: Precision) -> Option<Result<TailBound>> {
        let last = self.last_index()?;
        Some(self.exact_remainder(next, last, prec, |d| browder_term(d, point, order)))
    }

    /// Bound on the sum of radii over the indices `>= next`.
    pub fn radius_tail(&self, next: u64, prec: Precision) -> Result<TailBound> {
        if let Some(last) = self.last_index() {
            return self.exact_remainder(next, last, prec, |d| Ok(d.radius().clone()));
        }
        let n0 = next.max(1);
        match self {
            Generator::RoadRunner { m } => {
                // r_n = a_n^m / 2^n <= 2^{-n(m+1)}
                let e = (m + 1) as i64;
                let first = prec.pow2(-clamp_exp(n0 as i64 * e));
                let ratio = prec.pow2(-clamp_exp(e));
                let denom = Float::with_val(prec.bits(), 1 - &ratio);
                Ok(TailBound::Certified(first / denom))
            }
            Generator::InfiniteOrder { .. } => {
                // budgets 1/(4 n^n), ratio of consecutive budgets <= 1/(n+1)
                let l = n0;
                let t = budget(l as u32, prec);
                let factor = Float::with_val(prec.bits(), (l + 1) as f64) / l as f64;
                Ok(TailBound::Certified(t * factor))
            }
            Generator::Sqrt(inner) => match inner.as_ref() {
                Generator::RoadRunner { m } => {
                    // pair radius 2(sqrt|a| - sqrt s) <= 2 sqrt(r) <= 2 * 2^{-n(m+1)/2}
                    let q = Float::with_val(prec.bits(), prec.pow2(-((m + 1) as i32)).sqrt_ref());
                    let first = Float::with_val(prec.bits(), q.clone().pow(n0.min(u32::MAX as u64) as u32));
                    let denom = Float::with_val(prec.bits(), 1 - &q);
                    Ok(TailBound::Certified(first / denom * 2u32))
                }
                _ => Ok(TailBound::Unknown("no radius tail for this square-root family".into())),
            },
            Generator::Annulus { inner, .. } => inner.radius_tail(next, prec),
            Generator::Affine { inner, scale, .. } => Ok(inner.radius_tail(next, prec)?.scaled(scale)),
            Generator::SyntheticBudget { .. } => unreachable!("finite generator handled above"),
        }
    }

    /// Whether every unrealized disc (indices `>= next`) excludes the origin
    /// from its closure; `None` when unknown.
    pub fn excludes_origin_from(&self, next: u64, prec: Precision) -> Result<Option<bool>> {
        if let Some(last) = self.last_index() {
            if next > last {
                return Ok(Some(true));
            }
            let groups = self.realize_range(prec, next, last + 1 - next)?;
            return Ok(Some(groups.iter().flatten().all(Disc::excludes_origin_closure)));
        }
        Ok(match self {
            // a_n - r_n >= a_n / 2 > 0
            Generator::RoadRunner { .. } => Some(true),
            // s_0 >= 1/(2n) for every kept disc
            Generator::InfiniteOrder { .. } => Some(true),
            // s_0(delta_i) = sqrt(s) > 0 whenever the inner disc is admissible
            Generator::Sqrt(_) => Some(true),
            Generator::Annulus { inner, .. } => inner.excludes_origin_from(next, prec)?,
            Generator::Affine { .. } => None,
            Generator::SyntheticBudget { .. } => unreachable!(),
        })
    }

    fn exact_remainder(
        &self,
        next: u64,
        last: u64,
        prec: Precision,
        term: impl Fn(&Disc) -> Result<Float>,
    ) -> Result<TailBound> {
        if next > last {
            return Ok(TailBound::zero(prec));
        }
        let groups = self.realize_range(prec, next, last + 1 - next)?;
        let mut sum = prec.zero();
        for d in groups.iter().flatten() {
            sum += term(d)?;
        }
        Ok(TailBound::Certified(sum))
    }
}

fn clamp_exp(e: i64) -> i32 {
    e.clamp(i32::MIN as i64 / 2, i32::MAX as i64 / 2) as i32
}

/// The `n`-th road-runner disc for parameter `m`.
pub fn road_runner_disc(m: u32, n: u64, prec: Precision) -> Result<Disc> {
    if m < 1 {
        return Err(Error::invalid("road_runner: m must be >= 1"));
    }
    if n < 1 {
        return Err(Error::invalid("road_runner: index must be >= 1"));
    }
    let shift = u32::try_from(n).map_err(|_| Error::invalid("road_runner: index too large"))?;
    let a = (prec.one() / n as f64) >> shift;
    let r = Float::with_val(prec.bits(), a.clone().pow(m)) >> shift;
    Disc::new(Complex::with_val(prec.bits(), (&a, 0)), r)
}

/// Certified bound on `sum_{n > big_n} r_n / (a_n - r_n)^(order+1)` for the
/// road runner with parameter `m_family`.
///
/// Uses `a_n - r_n >= a_n / 2` and `a_n <= 2^{-n}`, then sums the resulting
/// geometric series. Diverges when `order >= m_family`.
pub fn road_runner_tail(m_family: u32, order: u32, big_n: u64, prec: Precision) -> Result<TailBound> {
    if m_family < 1 {
        return Err(Error::invalid("road_runner_tail: m_family must be >= 1"));
    }
    let first = big_n + 1;
    // r_n / a_n is decreasing in n, so the first index is the worst case
    let d = road_runner_disc(m_family, first, prec)?;
    let ratio = Float::with_val(prec.bits(), d.radius() / d.center().real());
    if ratio > 0.5 {
        return Err(Error::TailPrecondition { index: first });
    }
    if order >= m_family {
        return Ok(TailBound::Divergent);
    }
    let j = (m_family - order - 1) as i64;
    // term_n <= 2^{k+1} 2^{-n(j+1)} n^{-j} <= 2^{k+1} (N+1)^{-j} 2^{-n(j+1)}
    let lead = prec.pow2(clamp_exp(order as i64 + 1 - first as i64 * (j + 1)));
    let poly = Float::with_val(prec.bits(), Float::with_val(prec.bits(), first as f64).clone().pow(j as i32));
    let denom = Float::with_val(prec.bits(), 1 - prec.pow2(-clamp_exp(j + 1)));
    Ok(TailBound::Certified(lead / poly / denom))
}

/// `1 / (4 n^n)`.
pub fn budget(n: u32, prec: Precision) -> Float {
    let nf = Float::with_val(prec.bits(), n);
    let nn = Float::with_val(prec.bits(), nf.clone().pow(n));
    (prec.one() / nn) >> 2u32
}

/// Per-group majorant `budget(n) (2n)^(order+1) = 2^(order-1) n^(order+1-n)`.
pub fn infinite_order_group_bound(n: u32, order: u32, prec: Precision) -> Float {
    let two_n = Float::with_val(prec.bits(), 2 * n as u64);
    budget(n, prec) * Float::with_val(prec.bits(), two_n.clone().pow(order + 1))
}

/// Certified bound on `sum_{n > big_n} 2^(order-1) n^(order+1-n)`.
///
/// Consecutive terms satisfy `t_{n+1} <= t_n / n` once `n >= order`, so the
/// remainder from `L = max(N+1, order, 2)` is at most `t_L L / (L - 1)`.
pub fn infinite_order_majorant_tail(order: u32, big_n: u64, prec: Precision) -> Float {
    let first = big_n + 1;
    let l = first.max(order as u64).max(2);
    let mut sum = prec.zero();
    for n in first..l {
        sum += infinite_order_group_bound(n as u32, order, prec);
    }
    let t_l = infinite_order_group_bound(l as u32, order, prec);
    let factor = Float::with_val(prec.bits(), l as f64) / (l - 1) as f64;
    sum + t_l * factor
}

/// Open disc meets `{1/n <= |z| <= 1}`: `|c| + r >= 1/n` and `|c| - r <= 1`.
pub fn meets_annulus(d: &Disc, n: u32) -> bool {
    let p = d.prec();
    let abs_c = d.center_abs();
    let inner = Float::with_val(p, 1) / n;
    Float::with_val(p, &abs_c + d.radius()) >= inner && Float::with_val(p, &abs_c - d.radius()) <= 1
}

/// Deterministic synthetic family: ChaCha8 keyed by `seed`, stream `n`.
///
/// Radii are `(3/4) budget(n) w_i / sum(w)` with weights in `[1/2, 1)`, so the
/// total radius is `3/4` of the budget. Centers have modulus uniform in
/// `[0, 1)` and uniform argument, so every disc meets the open unit disc.
pub fn synthetic_discs(n: u32, count: u32, seed: u64, prec: Precision) -> Result<Vec<Disc>> {
    if n < 1 {
        return Err(Error::invalid("synthetic_budget: n must be >= 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(u64::from(n));
    let draws: Vec<(f64, f64, f64)> = (0..count)
        .map(|_| (rng.random_range(0.5..1.0), rng.random::<f64>(), rng.random::<f64>()))
        .collect();
    let total_weight: f64 = draws.iter().map(|d| d.0).sum();
    let scale = budget(n, prec) * 3u32 / 4u32 / total_weight;
    draws
        .iter()
        .map(|&(w, modulus, angle)| {
            let theta = 2.0 * PI * angle;
            let center = prec.complex(modulus * theta.cos(), modulus * theta.sin());
            Disc::new(center, Float::with_val(prec.bits(), &scale * w))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::Rational;

    fn p() -> Precision {
        Precision::default()
    }

    #[test]
    fn road_runner_disc_examples() {
        let d = road_runner_disc(2, 1, p()).unwrap();
        assert_eq!(*d.center(), p().complex(0.5, 0.0));
        assert_eq!(*d.radius(), 0.125);

        let d = road_runner_disc(2, 2, p()).unwrap();
        assert_eq!(*d.center(), p().complex(0.125, 0.0));
        assert_eq!(*d.radius(), 1.0 / 256.0);

        let d = road_runner_disc(1, 3, p()).unwrap();
        let expect_a = Float::with_val(128, Rational::from((1, 24)));
        let expect_r = Float::with_val(128, Rational::from((1, 192)));
        assert_eq!(*d.center().real(), expect_a);
        assert_eq!(*d.radius(), expect_r);

        assert!(road_runner_disc(0, 1, p()).is_err());
    }

    #[test]
    fn road_runner_tail_matches_geometric_bound() {
        // order = m - 1: bound is 2^{m - N}
        for m in 1..5 {
            for big_n in [0u64, 1, 5, 20] {
                let t = road_runner_tail(m, m - 1, big_n, p()).unwrap();
                let expect = p().pow2(m as i32 - big_n as i32);
                assert_eq!(t, TailBound::Certified(expect), "m={m} N={big_n}");
            }
        }
        assert_eq!(road_runner_tail(2, 2, 10, p()).unwrap(), TailBound::Divergent);
        assert!(road_runner_tail(0, 0, 10, p()).is_err());
    }

    #[test]
    fn road_runner_tail_dominates_brute_force() {
        let prec = p();
        for (m, k) in [(2u32, 1u32), (3, 1), (3, 2), (4, 0)] {
            for big_n in [1u64, 4, 10] {
                let bound = road_runner_tail(m, k, big_n, prec).unwrap();
                let bound = bound.value().unwrap().clone();
                let mut brute = prec.zero();
                for n in big_n + 1..=big_n + 10_000 {
                    let d = road_runner_disc(m, n, prec).unwrap();
                    let s = Float::with_val(128, d.center().real() - d.radius());
                    brute += Float::with_val(128, d.radius() / Float::with_val(128, s.clone().pow(k + 1)));
                }
                assert!(brute <= bound, "m={m} k={k} N={big_n}: {brute} > {bound}");
            }
        }
    }

    #[test]
    fn tail_shrinks_with_depth() {
        let mut prev = None;
        for big_n in 0..30u64 {
            let t = road_runner_tail(3, 1, big_n, p()).unwrap().value().unwrap().clone();
            if let Some(q) = prev {
                assert!(t < q);
            }
            prev = Some(t);
        }
    }

    #[test]
    fn synthetic_budget_is_respected_and_deterministic() {
        for n in 1..8 {
            let a = synthetic_discs(n, 40, 9, p()).unwrap();
            let b = synthetic_discs(n, 40, 9, p()).unwrap();
            assert_eq!(a, b);
            let total = a.iter().fold(p().zero(), |acc, d| acc + d.radius());
            assert!(total < budget(n, p()));
            assert!(a.iter().all(|d| d.center_abs() < 1));
        }
        let one = synthetic_discs(1, 1, 0, p()).unwrap();
        assert_eq!(one.len(), 1);
        assert!(*one[0].radius() < 0.25);
        assert_ne!(synthetic_discs(3, 10, 1, p()).unwrap(), synthetic_discs(3, 10, 2, p()).unwrap());
    }

    #[test]
    fn majorant_tail_dominates_partial_sums() {
        for order in 0..5u32 {
            for big_n in [0u64, 1, 3, 10] {
                let tail = infinite_order_majorant_tail(order, big_n, p());
                let mut partial = p().zero();
                for n in big_n + 1..big_n + 60 {
                    partial += infinite_order_group_bound(n as u32, order, p());
                }
                assert!(partial <= tail, "order {order} N {big_n}");
            }
        }
    }

    #[test]
    fn group_bound_closed_form() {
        // (1/(4 n^n)) (2n)^{m+1} = 2^{m-1} / n^{n-(m+1)}
        for n in 1..10u32 {
            for m in 1..4u32 {
                let lhs = infinite_order_group_bound(n, m, p());
                let rhs = p().pow2(m as i32 - 1)
                    * Float::with_val(128, Float::with_val(128, n).clone().pow(m as i32 + 1 - n as i32));
                assert!(crate::precision::rel_err(&lhs, &rhs) < p().pow2(-120));
            }
        }
        // m = 1: 1 / n^{n-2}
        let b = infinite_order_group_bound(3, 1, p());
        let third = Float::with_val(128, Rational::from((1, 3)));
        assert!(crate::precision::rel_err(&b, &third) < p().pow2(-120));
    }

    #[test]
    fn sqrt_generator_doubles_groups() {
        let g = Generator::Sqrt(Box::new(Generator::RoadRunner { m: 2 }));
        let groups = g.realize_range(p(), 1, 3).unwrap();
        assert_eq!(groups.len(), 3);
        for grp in &groups {
            assert_eq!(grp.len(), 2);
            assert_eq!(grp[1], grp[0].negated());
        }
    }
}
