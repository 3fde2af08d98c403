//! Disc primitives, boundary distances and the square root of a disc.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::ops::Pow;
use rug::{Assign, Complex, Float};

use crate::error::{Error, Result};
use crate::par::{self, Execution};
use crate::precision::{is_finite_complex, rel_err, Precision, StrictCheck, Tolerance};

/// An open disc `D(center, radius)` with `radius > 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct Disc {
    center: Complex,
    radius: Float,
}

impl Disc {
    pub fn new(center: Complex, radius: Float) -> Result<Self> {
        if !is_finite_complex(&center) {
            return Err(Error::invalid("disc center must be finite"));
        }
        if !radius.is_finite() || radius <= 0 {
            return Err(Error::invalid(format!("disc radius must be positive, got {radius}")));
        }
        Ok(Disc { center, radius })
    }

    /// Convenience constructor from doubles at the given precision.
    pub fn from_f64(prec: Precision, cx: f64, cy: f64, r: f64) -> Result<Self> {
        Disc::new(prec.complex(cx, cy), prec.float(r))
    }

    pub fn unit(prec: Precision) -> Self {
        Disc {
            center: prec.complex_zero(),
            radius: prec.one(),
        }
    }

    pub fn center(&self) -> &Complex {
        &self.center
    }

    pub fn radius(&self) -> &Float {
        &self.radius
    }

    pub fn prec(&self) -> u32 {
        self.radius.prec()
    }

    /// `|center|`.
    pub fn center_abs(&self) -> Float {
        Float::with_val(self.prec(), self.center.abs_ref())
    }

    /// Distance from `z` to the center.
    pub fn dist_to_center(&self, z: &Complex) -> Float {
        let p = self.prec();
        let d = Complex::with_val(p, z - &self.center);
        Float::with_val(p, d.abs_ref())
    }

    /// `z` in the open disc.
    pub fn contains(&self, z: &Complex) -> bool {
        let p = self.prec();
        let d = Complex::with_val(p, z - &self.center);
        let n = Float::with_val(p, d.norm_ref());
        n < Float::with_val(p, self.radius.square_ref())
    }

    /// `z` in the closed disc.
    pub fn closure_contains(&self, z: &Complex) -> bool {
        let p = self.prec();
        let d = Complex::with_val(p, z - &self.center);
        let n = Float::with_val(p, d.norm_ref());
        n <= Float::with_val(p, self.radius.square_ref())
    }

    /// The open disc meets the open disc `other`: `|c - c'| < r + r'`.
    pub fn intersects(&self, other: &Disc) -> bool {
        let sum = Float::with_val(self.prec(), &self.radius + &other.radius);
        self.dist_to_center(&other.center) < sum
    }

    /// The closures are disjoint: `|c - c'| > r + r'`.
    pub fn closures_disjoint(&self, other: &Disc) -> bool {
        let sum = Float::with_val(self.prec(), &self.radius + &other.radius);
        self.dist_to_center(&other.center) > sum
    }

    /// Origin strictly outside the closed disc (`|c| > r`).
    pub fn excludes_origin_closure(&self) -> bool {
        self.center_abs() > self.radius
    }

    pub fn negated(&self) -> Disc {
        Disc {
            center: Complex::with_val(self.prec(), -&self.center),
            radius: self.radius.clone(),
        }
    }

    pub fn with_prec(&self, prec: Precision) -> Disc {
        Disc {
            center: Complex::with_val(prec.bits(), &self.center),
            radius: Float::with_val(prec.bits(), &self.radius),
        }
    }
}

/// Distance from `a` to the boundary circle of `d`: `| |c - a| - r |`.
pub fn s_dist(d: &Disc, a: &Complex) -> Float {
    let dist = d.dist_to_center(a);
    Float::with_val(d.prec(), &dist - d.radius()).abs()
}

/// The two discs covering the square root of a disc that excludes the origin.
#[derive(Clone, Debug, PartialEq)]
pub struct SqrtDiscPair {
    pub delta1: Disc,
    pub delta2: Disc,
    /// `s = |a| - r`, the distance from the origin to the source disc.
    pub s: Float,
    pub source: Disc,
}

/// Square root of `D(a, r)` with `0 < r < |a|`.
///
/// The centers are the principal square root of `a` and its negation; both
/// radii equal `sqrt|a| - sqrt(s) = r / (sqrt|a| + sqrt s)`.
pub fn sqrt_disc(d: &Disc) -> Result<SqrtDiscPair> {
    let p = d.prec();
    if d.center().is_zero() {
        return Err(Error::invalid("sqrt_disc: center must be nonzero"));
    }
    let abs_a = d.center_abs();
    if d.radius() >= &abs_a {
        return Err(Error::OriginNotExcluded {
            index: 0,
            center_abs: abs_a.to_string(),
            radius: d.radius().to_string(),
        });
    }
    let s = Float::with_val(p, &abs_a - d.radius());
    let sqrt_abs = Float::with_val(p, abs_a.sqrt_ref());
    let sqrt_s = Float::with_val(p, s.sqrt_ref());
    let denom = Float::with_val(p, &sqrt_abs + &sqrt_s);
    let r1 = Float::with_val(p, d.radius() / &denom);
    let root = Complex::with_val(p, d.center().sqrt_ref());
    let delta1 = Disc::new(root, r1)?;
    let delta2 = delta1.negated();
    Ok(SqrtDiscPair {
        delta1,
        delta2,
        s,
        source: d.clone(),
    })
}

/// Per-disc checks for a square-root disc pair.
#[derive(Clone, Debug)]
pub struct SqrtDiscReport {
    /// Relative error of `s_0(delta_i)` against `sqrt(s)`, worst of both discs.
    pub s0_rel_err: Float,
    /// Relative error between the two closed forms of the radius.
    pub radius_rel_err: Float,
    /// `r(delta_i) < r / (2 sqrt s)`.
    pub radius_bound: StrictCheck,
    /// `r(delta_i)/s_0(delta_i)^(2m+1) < r/(2 s^(m+1))` for each requested m.
    pub order_bounds: Vec<(u32, StrictCheck)>,
    /// Centers are negatives with equal radii and `|a_1| = sqrt(s + r)`.
    pub symmetric: bool,
}

impl SqrtDiscReport {
    pub fn strict_checks(&self) -> impl Iterator<Item = &StrictCheck> {
        std::iter::once(&self.radius_bound).chain(self.order_bounds.iter().map(|(_, c)| c))
    }

    pub fn min_relative_margin(&self) -> Float {
        self.strict_checks()
            .map(|c| c.relative_margin.clone())
            .reduce(|a, b| a.min(&b))
            .expect("at least one strict check")
    }

    pub fn passes(&self, tol: Tolerance) -> bool {
        let eps = Float::with_val(self.s0_rel_err.prec(), Float::u_exp(1, tol.eps_log2));
        self.s0_rel_err < eps
            && self.radius_rel_err < eps
            && self.symmetric
            && self.strict_checks().all(|c| c.holds)
    }
}

impl SqrtDiscPair {
    /// Checks the center distance, the radius bound and the order bounds for `m` in `orders`.
    pub fn certify(&self, orders: impl IntoIterator<Item = u32>, tol: Tolerance) -> SqrtDiscReport {
        let p = self.s.prec();
        let r = self.source.radius();
        let abs_a = self.source.center_abs();
        let sqrt_s = Float::with_val(p, self.s.sqrt_ref());
        let origin = Complex::with_val(p, (0, 0));

        let s0_1 = s_dist(&self.delta1, &origin);
        let s0_2 = s_dist(&self.delta2, &origin);
        let s0_rel_err = rel_err(&s0_1, &sqrt_s).max(&rel_err(&s0_2, &sqrt_s));

        let sqrt_abs = Float::with_val(p, abs_a.sqrt_ref());
        let difference_form = Float::with_val(p, &sqrt_abs - &sqrt_s);
        let radius_rel_err = rel_err(self.delta1.radius(), &difference_form);

        let two_sqrt_s = Float::with_val(p, &sqrt_s * 2u32);
        let radius_bound = StrictCheck::less(self.delta1.radius(), &Float::with_val(p, r / &two_sqrt_s), tol);

        let s0 = s0_1.clone().max(&s0_2);
        let order_bounds = orders
            .into_iter()
            .map(|m| {
                let lhs = Float::with_val(p, self.delta1.radius() / Float::with_val(p, s0.clone().pow(2 * m + 1)));
                let rhs = Float::with_val(p, r / Float::with_val(p, self.s.clone().pow(m + 1)) / 2u32);
                (m, StrictCheck::less(&lhs, &rhs, tol))
            })
            .collect();

        let neg = Complex::with_val(p, -self.delta1.center());
        let center_abs = self.delta1.center_abs();
        let expected_abs = Float::with_val(p, Float::with_val(p, &self.s + r).sqrt_ref());
        let symmetric = &neg == self.delta2.center()
            && self.delta1.radius() == self.delta2.radius()
            && rel_err(&center_abs, &expected_abs) < Float::with_val(p, Float::u_exp(1, tol.eps_log2));

        SqrtDiscReport {
            s0_rel_err,
            radius_rel_err,
            radius_bound,
            order_bounds,
            symmetric,
        }
    }
}

/// Counts from the rejection-sampling inclusion oracle.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct InclusionStats {
    pub trials: u64,
    /// Samples `w` with `w^2` in the source disc.
    pub accepted: u64,
    /// Accepted samples outside `delta1 ∪ delta2`.
    pub violations: u64,
}

impl std::ops::AddAssign for InclusionStats {
    fn add_assign(&mut self, o: Self) {
        self.trials += o.trials;
        self.accepted += o.accepted;
        self.violations += o.violations;
    }
}

const SAMPLE_CHUNK: u64 = 4096;

/// Samples points `w` with `w^2` in the source disc and counts those that
/// escape `delta1 ∪ delta2`.
///
/// Candidates are drawn uniformly from the two annular sectors
/// `sqrt(s) < |w| < sqrt(|a| + r)`, `|arg(w^2) - arg(a)| <= asin(r/|a|)`,
/// which contain the square root of the disc. Sampling stops at the first
/// chunk boundary where at least `target_accepted` samples were accepted; the
/// chunking is fixed so the counts do not depend on `exec`.
pub fn sample_sqrt_inclusion(pair: &SqrtDiscPair, target_accepted: u64, seed: u64, exec: Execution) -> InclusionStats {
    let p = pair.s.prec();
    let a = pair.source.center();
    let abs_a = pair.source.center_abs().to_f64();
    let r = pair.source.radius().to_f64();
    let arg_a = Float::with_val(p, a.arg_ref()).to_f64();
    let half_width = ((r / abs_a).min(1.0).asin() * (1.0 + 1e-9) + 1e-12).min(PI / 2.0);
    let rho_in2 = pair.s.to_f64().max(0.0) * (1.0 - 1e-12);
    let rho_out2 = (abs_a + r) * (1.0 + 1e-12);

    let r2 = Float::with_val(p, pair.source.radius().square_ref());
    let r1sq = Float::with_val(p, pair.delta1.radius().square_ref());

    // f64 screening with an absolute margin well above its rounding error;
    // borderline samples are decided at full precision
    const MARGIN: f64 = 1e-12;
    let (ax, ay) = (a.real().to_f64(), a.imag().to_f64());
    let r2_f = r2.to_f64();
    let r1sq_f = r1sq.to_f64();
    let centers_f = [pair.delta1.center(), pair.delta2.center()].map(|c| (c.real().to_f64(), c.imag().to_f64()));

    let chunk = |index: u64| -> InclusionStats {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        let mut stats = InclusionStats::default();
        let mut w = Complex::new(p);
        let mut w2 = Complex::new(p);
        let mut n = Float::new(p);
        for _ in 0..SAMPLE_CHUNK {
            let u: f64 = rng.random();
            let v: f64 = rng.random();
            let branch: bool = rng.random();
            let modulus = (rho_in2 + u * (rho_out2 - rho_in2)).sqrt();
            let theta = 0.5 * (arg_a + (2.0 * v - 1.0) * half_width) + if branch { PI } else { 0.0 };
            let (x, y) = (modulus * theta.cos(), modulus * theta.sin());
            stats.trials += 1;
            let (dx, dy) = (x * x - y * y - ax, 2.0 * x * y - ay);
            let nf = dx * dx + dy * dy;
            let accepted = if nf < r2_f - MARGIN {
                true
            } else if nf > r2_f + MARGIN {
                false
            } else {
                w.assign((x, y));
                w2.assign(w.square_ref());
                w2 -= a;
                n.assign(w2.norm_ref());
                n < r2
            };
            if !accepted {
                continue;
            }
            stats.accepted += 1;
            let inside = centers_f.iter().zip([pair.delta1.center(), pair.delta2.center()]).any(|(&(cx, cy), c)| {
                let d = (x - cx) * (x - cx) + (y - cy) * (y - cy);
                if d < r1sq_f - MARGIN {
                    return true;
                }
                if d > r1sq_f + MARGIN {
                    return false;
                }
                w.assign((x, y));
                w2.assign(&w - c);
                n.assign(w2.norm_ref());
                n < r1sq
            });
            if !inside {
                stats.violations += 1;
            }
        }
        stats
    };

    let batch = if exec.is_parallel() { 8 } else { 1 };
    let mut total = InclusionStats::default();
    let mut next = 0u64;
    while total.accepted < target_accepted {
        let indices: Vec<u64> = (next..next + batch).collect();
        next += batch;
        for stats in par::map(exec, &indices, |&i| chunk(i)) {
            if total.accepted >= target_accepted {
                break;
            }
            total += stats;
        }
        if total.trials > target_accepted.saturating_mul(1000).max(1 << 24) {
            break;
        }
    }
    total
}

/// `z` lies in the square root of the cheese: `z^2` is in the cheese.
pub fn sqrt_membership(z: &Complex, cheese: &crate::families::CheeseSpec, depth: u64) -> Result<bool> {
    let p = z.prec().0;
    let z2 = Complex::with_val(p, z.square_ref());
    cheese.contains(&z2, depth)
}

/// `a + rho * D`.
pub fn affine_disc(d: &Disc, a: &Complex, rho: &Float) -> Result<Disc> {
    if !rho.is_finite() || *rho <= 0 {
        return Err(Error::invalid(format!("affine scale must be positive, got {rho}")));
    }
    let p = d.prec();
    let center = Complex::with_val(p, a + Complex::with_val(p, d.center() * rho));
    let radius = Float::with_val(p, d.radius() * rho);
    Disc::new(center, radius)
}
