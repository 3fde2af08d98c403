use rug::Float;
use serde_json::{json, Value};

use crate::error::Result;
use crate::families::{CheeseSpec, TailBound};
use crate::geometry::Disc;
use crate::precision::format_short;

/// Closure-disjointness is only checked on at most this many discs.
pub const DISJOINTNESS_CAP: usize = 5000;

#[derive(Clone, Debug)]
pub struct ValidationReport {
    pub depth: u64,
    pub realized: usize,
    pub realized_radius: Float,
    pub radius_tail: TailBound,
    /// Realized radii plus tail stay below 1 (only meaningful for the unit disc).
    pub radius_sum_below_one: Option<bool>,
    /// `None` when the unrealized discs could still cover the origin.
    pub origin_in_cheese: Option<bool>,
    pub all_meet_outer: bool,
    /// First pair of realized discs whose closures meet; `None` if disjoint
    /// or unchecked.
    pub overlapping_pair: Option<(usize, usize)>,
    pub disjointness_checked: bool,
}

impl ValidationReport {
    pub fn to_json(&self) -> Value {
        json!({
            "depth": self.depth,
            "realized": self.realized,
            "realized_radius": format_short(&self.realized_radius),
            "radius_tail": match &self.radius_tail {
                TailBound::Certified(v) => Value::String(format_short(v)),
                _ => Value::Null,
            },
            "radius_sum_below_one": self.radius_sum_below_one,
            "origin_in_cheese": self.origin_in_cheese,
            "all_meet_outer": self.all_meet_outer,
            "overlapping_pair": self.overlapping_pair,
            "disjointness_checked": self.disjointness_checked,
        })
    }
}

/// Structural checks of a cheese realized to `depth`.
pub fn validate_cheese(cheese: &CheeseSpec, depth: u64) -> Result<ValidationReport> {
    let fam = &cheese.family;
    let prec = fam.prec();
    let discs = fam.realize(depth)?;
    let realized_radius = discs.iter().fold(prec.zero(), |acc, d| acc + d.radius());
    let radius_tail = fam.radius_tail(depth)?;
    let radius_sum_below_one = radius_tail
        .value()
        .map(|t| Float::with_val(prec.bits(), &realized_radius + t) < 1);

    let origin = prec.complex_zero();
    let origin_in_cheese = if !cheese.contains_realized(&origin, &discs) {
        Some(false)
    } else {
        fam.tail_excludes_origin(depth)?
    };
    let all_meet_outer = discs.iter().all(|d| fam.outer().intersects(d));
    let disjointness_checked = discs.len() <= DISJOINTNESS_CAP;
    let overlapping_pair = if disjointness_checked {
        pairwise_disjoint_closures(&discs)
    } else {
        None
    };
    Ok(ValidationReport {
        depth,
        realized: discs.len(),
        realized_radius,
        radius_tail,
        radius_sum_below_one,
        origin_in_cheese,
        all_meet_outer,
        overlapping_pair,
        disjointness_checked,
    })
}

/// First pair of discs whose closures meet, scanning in order.
pub fn pairwise_disjoint_closures(discs: &[Disc]) -> Option<(usize, usize)> {
    for i in 0..discs.len() {
        for j in i + 1..discs.len() {
            if !discs[i].closures_disjoint(&discs[j]) {
                return Some((i, j));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{road_runner, sqrt_family, DiscFamily};
    use crate::precision::Precision;

    #[test]
    fn road_runner_validates() {
        let p = Precision::default();
        let cheese = CheeseSpec::new(road_runner(2, p).unwrap(), "rr");
        let v = validate_cheese(&cheese, 50).unwrap();
        assert_eq!(v.realized, 50);
        assert_eq!(v.origin_in_cheese, Some(true));
        assert_eq!(v.radius_sum_below_one, Some(true));
        assert!(v.all_meet_outer);
        assert_eq!(v.overlapping_pair, None);

        let root = CheeseSpec::new(sqrt_family(&cheese.family).unwrap(), "root");
        let v = validate_cheese(&root, 20).unwrap();
        assert_eq!(v.origin_in_cheese, Some(true));
        assert_eq!(v.radius_sum_below_one, Some(true));
    }

    #[test]
    fn overlap_and_origin_detected() {
        let p = Precision::default();
        let fam = DiscFamily::from_discs(
            p,
            [
                Disc::from_f64(p, 0.0, 0.0, 0.1).unwrap(),
                Disc::from_f64(p, 0.15, 0.0, 0.1).unwrap(),
            ],
        );
        let v = validate_cheese(&CheeseSpec::new(fam, "bad"), 0).unwrap();
        assert_eq!(v.origin_in_cheese, Some(false));
        assert_eq!(v.overlapping_pair, Some((0, 1)));
    }
}
