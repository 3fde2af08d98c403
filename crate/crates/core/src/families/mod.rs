//! Disc families (finite lists plus parametric tails), Swiss cheeses and the
//! family-level constructions: road runner, square root, annulus filtering,
//! merging, synthetic radius budgets and affine copies.

mod generator;
pub mod json;
mod validate;

use std::collections::BTreeMap;

use log::warn;
use rug::{Complex, Float};

use crate::error::{Error, Result};
use crate::geometry::{affine_disc, sqrt_disc, Disc};
use crate::precision::Precision;

pub use generator::{
    budget, infinite_order_group_bound, infinite_order_majorant_tail, meets_annulus, road_runner_disc,
    road_runner_tail, synthetic_discs, Generator, TailBound,
};
pub use validate::{pairwise_disjoint_closures, validate_cheese, ValidationReport};

/// A generator together with the first index it contributes.
#[derive(Clone, Debug, PartialEq)]
pub struct ParametricTail {
    pub generator: Generator,
    pub start: u64,
}

impl ParametricTail {
    pub fn new(generator: Generator) -> Self {
        ParametricTail { generator, start: 1 }
    }
}

/// How the unrealized part of a family is bounded.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TailMode {
    /// Closed-form provider (or nothing left to bound).
    Exact,
    /// A bound supplied with the family input.
    Supplied,
    /// No bound: results cover the realized discs only.
    TruncatedOnly,
}

/// Finite disc list plus any number of parametric tails, deleted from the
/// closed outer disc (the unit disc unless the family is an affine copy).
#[derive(Clone, Debug, PartialEq)]
pub struct DiscFamily {
    prec: Precision,
    outer: Disc,
    finite: Vec<Disc>,
    tails: Vec<ParametricTail>,
    /// User-supplied bounds on the Browder tail at the origin, by order.
    supplied_tails: BTreeMap<u32, Float>,
    /// The finite list is a prefix of an unspecified larger family.
    open_ended: bool,
}

impl DiscFamily {
    pub fn empty(prec: Precision) -> Self {
        DiscFamily {
            prec,
            outer: Disc::unit(prec),
            finite: Vec::new(),
            tails: Vec::new(),
            supplied_tails: BTreeMap::new(),
            open_ended: false,
        }
    }

    /// Finite family inside the unit disc. Discs that miss the open unit
    /// disc do not change the cheese and are dropped with a warning.
    pub fn from_discs(prec: Precision, discs: impl IntoIterator<Item = Disc>) -> Self {
        let mut fam = DiscFamily::empty(prec);
        for d in discs {
            fam.push(d);
        }
        fam
    }

    pub fn from_generator(prec: Precision, generator: Generator) -> Self {
        let mut fam = DiscFamily::empty(prec);
        fam.tails.push(ParametricTail::new(generator));
        fam
    }

    /// Appends a disc, dropping it when it misses the open outer disc.
    pub fn push(&mut self, d: Disc) {
        let d = d.with_prec(self.prec);
        if !self.outer.intersects(&d) {
            warn!("dropping disc {:?} (radius {}): it does not meet the outer disc", d.center(), d.radius());
            return;
        }
        self.finite.push(d);
    }

    pub fn push_tail(&mut self, tail: ParametricTail) {
        self.tails.push(tail);
    }

    pub fn with_outer(mut self, outer: Disc) -> Self {
        self.outer = outer.with_prec(self.prec);
        self
    }

    pub fn with_supplied_tail(mut self, order: u32, bound: Float) -> Self {
        self.supplied_tails.insert(order, Float::with_val(self.prec.bits(), bound));
        self
    }

    pub fn open_ended(mut self, yes: bool) -> Self {
        self.open_ended = yes;
        self
    }

    pub fn prec(&self) -> Precision {
        self.prec
    }

    pub fn outer(&self) -> &Disc {
        &self.outer
    }

    pub fn outer_is_unit(&self) -> bool {
        self.outer.center().is_zero() && *self.outer.radius() == 1
    }

    pub fn finite(&self) -> &[Disc] {
        &self.finite
    }

    pub fn tails(&self) -> &[ParametricTail] {
        &self.tails
    }

    pub fn supplied_tails(&self) -> &BTreeMap<u32, Float> {
        &self.supplied_tails
    }

    pub fn is_open_ended(&self) -> bool {
        self.open_ended
    }

    /// No discs at all (finite or parametric).
    pub fn is_trivially_empty(&self) -> bool {
        self.finite.is_empty() && self.tails.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.tails.iter().all(|t| t.generator.last_index().is_some())
    }

    /// Every finite disc plus `depth` indices of each parametric tail, in
    /// that order.
    pub fn realize(&self, depth: u64) -> Result<Vec<Disc>> {
        let mut out = self.finite.clone();
        for t in &self.tails {
            for group in t.generator.realize_range(self.prec, t.start, depth)? {
                out.extend(group);
            }
        }
        Ok(out)
    }

    /// First unrealized index of each tail at the given depth.
    pub fn next_indices(&self, depth: u64) -> Vec<u64> {
        self.tails.iter().map(|t| t.start.max(1) + depth).collect()
    }

    /// Bound on the Browder terms of `order` at `point` beyond realization
    /// depth `depth`, and the mode the bound came from.
    pub fn browder_tail(&self, order: u32, depth: u64, point: &Complex) -> Result<(TailBound, TailMode)> {
        let at_origin = point.is_zero() && self.outer_is_unit();
        let mut bound = TailBound::zero(self.prec);
        for (t, next) in self.tails.iter().zip(self.next_indices(depth)) {
            let part = match t.generator.finite_remainder_at(order, next, point, self.prec) {
                Some(r) => r?,
                None if at_origin => t.generator.browder_tail_at_origin(order, next, self.prec)?,
                None => TailBound::Unknown(format!(
                    "{} tail bounds are only available at the origin of the unit disc",
                    t.generator.id()
                )),
            };
            bound = bound.plus(part);
        }
        if self.open_ended {
            return Ok(match (self.supplied_tails.get(&order), at_origin) {
                (Some(v), true) => (bound.plus(TailBound::Certified(v.clone())), TailMode::Supplied),
                _ => (
                    TailBound::Unknown("open-ended family without a supplied tail bound".into()),
                    TailMode::TruncatedOnly,
                ),
            });
        }
        let mode = if bound.is_certified() {
            TailMode::Exact
        } else {
            TailMode::TruncatedOnly
        };
        Ok((bound, mode))
    }

    /// Bound on the radii beyond realization depth `depth`.
    pub fn radius_tail(&self, depth: u64) -> Result<TailBound> {
        if self.open_ended {
            return Ok(TailBound::Unknown("open-ended family".into()));
        }
        let mut bound = TailBound::zero(self.prec);
        for (t, next) in self.tails.iter().zip(self.next_indices(depth)) {
            bound = bound.plus(t.generator.radius_tail(next, self.prec)?);
        }
        Ok(bound)
    }

    /// Whether the unrealized discs all exclude the origin from their closures.
    pub fn tail_excludes_origin(&self, depth: u64) -> Result<Option<bool>> {
        if self.open_ended {
            return Ok(None);
        }
        let mut all = Some(true);
        for (t, next) in self.tails.iter().zip(self.next_indices(depth)) {
            match t.generator.excludes_origin_from(next, self.prec)? {
                Some(true) => {}
                Some(false) => return Ok(Some(false)),
                None => all = None,
            }
        }
        Ok(all)
    }
}

/// A Swiss cheese: the closed outer disc minus the discs of a family.
#[derive(Clone, Debug, PartialEq)]
pub struct CheeseSpec {
    pub family: DiscFamily,
    pub label: String,
}

impl CheeseSpec {
    pub fn new(family: DiscFamily, label: impl Into<String>) -> Self {
        CheeseSpec {
            family,
            label: label.into(),
        }
    }

    /// `z` in the closed outer disc and in none of the discs realized to `depth`.
    ///
    /// Exact for finite families; for parametric tails only the realized
    /// discs are consulted.
    pub fn contains(&self, z: &Complex, depth: u64) -> Result<bool> {
        if !self.family.outer.closure_contains(z) {
            return Ok(false);
        }
        Ok(!self.family.realize(depth)?.iter().any(|d| d.contains(z)))
    }

    /// Like [`CheeseSpec::contains`] with discs realized once by the caller.
    pub fn contains_realized(&self, z: &Complex, realized: &[Disc]) -> bool {
        self.family.outer.closure_contains(z) && !realized.iter().any(|d| d.contains(z))
    }
}

/// Road runner with parameter `m`: centers `1/(2^n n)`, radii `a_n^m / 2^n`.
pub fn road_runner(m: u32, prec: Precision) -> Result<DiscFamily> {
    if m < 1 {
        return Err(Error::invalid("road_runner: m must be >= 1"));
    }
    Ok(DiscFamily::from_generator(prec, Generator::RoadRunner { m }))
}

/// Replaces every disc by the two discs covering its square root.
///
/// Finite discs are transformed now; parametric tails are wrapped so their
/// realizations are transformed index by index. Supplied tail bounds carry
/// over: order `k` of the result is bounded by order `ceil(k/2)` of the source.
pub fn sqrt_family(fam: &DiscFamily) -> Result<DiscFamily> {
    if !fam.outer_is_unit() {
        return Err(Error::invalid("sqrt_family: the family must live in the unit disc"));
    }
    let mut out = DiscFamily::empty(fam.prec).open_ended(fam.open_ended);
    for (index, d) in fam.finite.iter().enumerate() {
        let pair = sqrt_disc(d).map_err(|e| match e {
            Error::OriginNotExcluded { center_abs, radius, .. } => Error::OriginNotExcluded {
                index,
                center_abs,
                radius,
            },
            other => other,
        })?;
        out.finite.push(pair.delta1);
        out.finite.push(pair.delta2);
    }
    for t in &fam.tails {
        out.tails.push(ParametricTail {
            generator: Generator::Sqrt(Box::new(t.generator.clone())),
            start: t.start,
        });
    }
    for (&order, bound) in &fam.supplied_tails {
        for k in [2 * order, (2 * order).saturating_sub(1)] {
            out.supplied_tails.entry(k).or_insert_with(|| bound.clone());
        }
    }
    Ok(out)
}

/// Keeps the discs meeting the annulus `{1/n <= |z| <= 1}`.
pub fn annulus_filter(fam: &DiscFamily, n: u32) -> Result<DiscFamily> {
    if n < 1 {
        return Err(Error::invalid("annulus_filter: n must be >= 1"));
    }
    let mut out = fam.clone();
    out.finite.retain(|d| meets_annulus(d, n));
    out.tails = fam
        .tails
        .iter()
        .map(|t| ParametricTail {
            generator: Generator::Annulus {
                inner: Box::new(t.generator.clone()),
                n,
            },
            start: t.start,
        })
        .collect();
    Ok(out)
}

/// Concatenation; the cheese of the result is the intersection of the
/// input cheeses. Overlapping discs are kept (sums are over the multiset).
pub fn merge_families(fams: &[DiscFamily]) -> Result<DiscFamily> {
    let Some(first) = fams.first() else {
        return Err(Error::invalid("merge_families: nothing to merge"));
    };
    let prec = fams.iter().map(|f| f.prec).max_by_key(|p| p.bits()).unwrap_or(first.prec);
    let mut out = DiscFamily::empty(prec).with_outer(first.outer.clone());
    for f in fams {
        if f.outer.with_prec(prec) != out.outer {
            return Err(Error::invalid("merge_families: families have different outer discs"));
        }
        out.finite.extend(f.finite.iter().map(|d| d.with_prec(prec)));
        out.tails.extend(f.tails.iter().cloned());
        out.open_ended |= f.open_ended;
    }
    // a supplied bound survives only if every open-ended input supplies one
    let open: Vec<&DiscFamily> = fams.iter().filter(|f| f.open_ended).collect();
    if !open.is_empty() {
        let orders: Vec<u32> = open[0].supplied_tails.keys().copied().collect();
        for k in orders {
            if open.iter().all(|f| f.supplied_tails.contains_key(&k)) {
                let sum = open
                    .iter()
                    .fold(prec.zero(), |acc, f| acc + &f.supplied_tails[&k]);
                out.supplied_tails.insert(k, sum);
            }
        }
    }
    Ok(out)
}

/// Deterministic finite family of `count` discs meeting the unit disc with
/// total radius strictly below `1/(4 n^n)`.
pub fn synthetic_budget_family(n: u32, count: u32, seed: u64, prec: Precision) -> Result<DiscFamily> {
    Ok(DiscFamily::from_discs(prec, synthetic_discs(n, count, seed, prec)?))
}

/// The union over `n >= 1` of the annulus-filtered synthetic budget
/// families, as a single parametric family (group `n` at index `n`).
pub fn infinite_order_family(count: u32, seed: u64, prec: Precision) -> DiscFamily {
    DiscFamily::from_generator(prec, Generator::InfiniteOrder { count, seed })
}

/// `a + rho * K`: every disc and the outer disc mapped by `z -> a + rho z`.
pub fn affine_family(fam: &DiscFamily, a: &Complex, rho: &Float) -> Result<DiscFamily> {
    let mut out = DiscFamily::empty(fam.prec)
        .with_outer(affine_disc(&fam.outer, a, rho)?)
        .open_ended(fam.open_ended);
    out.finite = fam.finite.iter().map(|d| affine_disc(d, a, rho)).collect::<Result<_>>()?;
    out.tails = fam
        .tails
        .iter()
        .map(|t| ParametricTail {
            generator: Generator::Affine {
                inner: Box::new(t.generator.clone()),
                shift: a.clone(),
                scale: rho.clone(),
            },
            start: t.start,
        })
        .collect();
    Ok(out)
}

/// First pair `(i, j)` of closed discs `a_i + rho_i D̄` that meet, if any.
pub fn check_disjoint_copies(copies: &[(Complex, Float)]) -> Option<(usize, usize)> {
    for i in 0..copies.len() {
        for j in i + 1..copies.len() {
            let (ai, ri) = &copies[i];
            let (aj, rj) = &copies[j];
            let p = ri.prec().max(rj.prec());
            let dist = Float::with_val(p, Complex::with_val(p, ai - aj).abs_ref());
            if dist <= Float::with_val(p, ri + rj) {
                return Some((i, j));
            }
        }
    }
    None
}
