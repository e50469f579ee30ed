//! Geometry of the (C, Q, E) capacity region.
//!
//! Rates are in bits per channel use, positive when a resource is generated
//! and negative when it is consumed. The closed-form regions of the
//! dephasing and erasure channels are one-parameter families of three
//! half-space constraints; membership and supporting hyperplanes reduce to
//! scans over that parameter.

use alloc::vec::Vec;
use core::ops::{Add, Mul};

use crate::channel::{dephasing, erasure, KrausChannel};
use crate::cqstate::{bit_flip_pair, CqEnsemble, EntropicTriple};
use crate::entropy::h2;
use crate::error::{check_probability, check_range, Error, Result};
use crate::Bits;

/// Default number of parameter grid points for membership and hyperplanes.
pub const DEFAULT_GRID: usize = 2049;

/// Slack below which a point still counts as inside.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

const CONE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateTriple {
    pub c: Bits,
    pub q: Bits,
    pub e: Bits,
}

impl RateTriple {
    pub const fn new(c: Bits, q: Bits, e: Bits) -> Self {
        RateTriple { c, q, e }
    }

    pub fn dot(&self, w: &WeightVector) -> f64 {
        self.c * w.c + self.q * w.q + self.e * w.e
    }

    pub fn max_abs_diff(&self, other: &RateTriple) -> f64 {
        libm::fabs(self.c - other.c)
            .max(libm::fabs(self.q - other.q))
            .max(libm::fabs(self.e - other.e))
    }

    pub fn is_finite(&self) -> bool {
        self.c.is_finite() && self.q.is_finite() && self.e.is_finite()
    }

    /// Left-hand sides `(C + 2Q, Q + E, C + Q + E)` of the region inequalities.
    pub fn constraint_sums(&self) -> [f64; 3] {
        [self.c + 2.0 * self.q, self.q + self.e, self.c + self.q + self.e]
    }
}

impl Add for RateTriple {
    type Output = RateTriple;

    fn add(self, rhs: RateTriple) -> RateTriple {
        RateTriple::new(self.c + rhs.c, self.q + rhs.q, self.e + rhs.e)
    }
}

impl Mul<RateTriple> for f64 {
    type Output = RateTriple;

    fn mul(self, rhs: RateTriple) -> RateTriple {
        RateTriple::new(self * rhs.c, self * rhs.q, self * rhs.e)
    }
}

/// Weights `(w_C, w_Q, w_E)` of a linear functional on rate triples.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeightVector {
    pub c: f64,
    pub q: f64,
    pub e: f64,
}

impl WeightVector {
    pub const fn new(c: f64, q: f64, e: f64) -> Self {
        WeightVector { c, q, e }
    }
}

/// Cone spanned by entanglement distribution, super-dense coding and
/// teleportation.
#[derive(Clone, Copy, Debug, Default)]
pub struct UnitResourceCone;

impl UnitResourceCone {
    /// One qubit channel use creates one ebit.
    pub const ENTANGLEMENT_DISTRIBUTION: RateTriple = RateTriple::new(0.0, -1.0, 1.0);
    /// A qubit and an ebit carry two classical bits.
    pub const SUPER_DENSE_CODING: RateTriple = RateTriple::new(2.0, -1.0, -1.0);
    /// Two classical bits and an ebit carry one qubit.
    pub const TELEPORTATION: RateTriple = RateTriple::new(-2.0, 1.0, -1.0);

    pub fn generators() -> [RateTriple; 3] {
        [
            Self::ENTANGLEMENT_DISTRIBUTION,
            Self::SUPER_DENSE_CODING,
            Self::TELEPORTATION,
        ]
    }

    /// Columns are the generators, so `(C, Q, E) = G (alpha, beta, gamma)`.
    pub fn generator_matrix() -> [[f64; 3]; 3] {
        [[0.0, 2.0, -2.0], [-1.0, -1.0, 1.0], [1.0, -1.0, -1.0]]
    }

    pub fn inverse_matrix() -> [[f64; 3]; 3] {
        [[-0.5, -1.0, 0.0], [0.0, -0.5, -0.5], [-0.5, -0.5, -0.5]]
    }

    /// `C + 2Q <= 0`, `Q + E <= 0`, `C + Q + E <= 0`.
    pub fn contains(r: &RateTriple) -> bool {
        r.constraint_sums().iter().all(|&s| s <= CONE_TOL)
    }

    /// Generator coefficients `(alpha, beta, gamma)` with `G x = r`.
    pub fn decompose(r: &RateTriple) -> [f64; 3] {
        let inv = Self::inverse_matrix();
        let v = [r.c, r.q, r.e];
        let mut out = [0.0; 3];
        for (i, row) in inv.iter().enumerate() {
            out[i] = row.iter().zip(&v).map(|(a, b)| a * b).sum();
        }
        out
    }

    pub fn combine(coefficients: [f64; 3]) -> RateTriple {
        Self::generators()
            .iter()
            .zip(coefficients)
            .fold(RateTriple::new(0.0, 0.0, 0.0), |acc, (g, a)| acc + a * *g)
    }

    /// A linear functional is bounded above on a translated cone iff it is
    /// non-positive on every generator.
    pub fn bounds_functional(w: &WeightVector) -> bool {
        Self::generators().iter().all(|g| g.dot(w) <= CONE_TOL)
    }
}

/// `1/2 + 1/2 sqrt(1 - 16 (p/2)(1 - p/2) nu (1 - nu))`.
pub fn gamma(nu: f64, p: f64) -> Result<f64> {
    check_probability("nu", nu)?;
    check_probability("p", p)?;
    Ok(gamma_unchecked(nu, p))
}

fn gamma_unchecked(nu: f64, p: f64) -> f64 {
    let half = p / 2.0;
    let radicand = 1.0 - 16.0 * half * (1.0 - half) * nu * (1.0 - nu);
    0.5 + 0.5 * libm::sqrt(radicand.max(0.0))
}

/// Dephasing region bounds `(1 + H2(nu) - H2(g), H2(nu) - H2(g), 1 - H2(g))`
/// with `g = gamma(nu, p)`.
pub fn dephasing_bounds(nu: f64, p: f64) -> Result<EntropicTriple> {
    check_range("nu", nu, 0.0, 0.5)?;
    check_probability("p", p)?;
    let hg = h2(gamma_unchecked(nu, p));
    let hn = h2(nu);
    Ok(EntropicTriple {
        cq_bound: 1.0 + hn - hg,
        qe_bound: hn - hg,
        cqe_bound: 1.0 - hg,
    })
}

/// Erasure region bounds
/// `((1 - eps)(1 + H2(p)), (1 - 2 eps) H2(p), 1 - eps - eps H2(p))`.
pub fn erasure_bounds(p: f64, eps: f64) -> Result<EntropicTriple> {
    check_range("p", p, 0.0, 0.5)?;
    check_probability("eps", eps)?;
    let h = h2(p);
    Ok(EntropicTriple {
        cq_bound: (1.0 - eps) * (1.0 + h),
        qe_bound: (1.0 - 2.0 * eps) * h,
        cqe_bound: 1.0 - eps - eps * h,
    })
}

/// A closed-form boundary: one channel family at a fixed noise level,
/// parameterized by a scalar in `[0, 1/2]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Surface {
    Dephasing { p: f64 },
    Erasure { eps: f64 },
}

impl Surface {
    pub fn dephasing(p: f64) -> Result<Self> {
        check_probability("p", p)?;
        Ok(Surface::Dephasing { p })
    }

    pub fn erasure(eps: f64) -> Result<Self> {
        check_probability("eps", eps)?;
        Ok(Surface::Erasure { eps })
    }

    pub const PARAM_MAX: f64 = 0.5;

    pub fn bounds(&self, param: f64) -> Result<EntropicTriple> {
        match *self {
            Surface::Dephasing { p } => dephasing_bounds(param, p),
            Surface::Erasure { eps } => erasure_bounds(param, eps),
        }
    }

    /// Name of the boundary parameter (`nu` or `p`).
    pub fn param_name(&self) -> &'static str {
        match self {
            Surface::Dephasing { .. } => "nu",
            Surface::Erasure { .. } => "p",
        }
    }

    pub fn channel(&self) -> Result<KrausChannel> {
        match *self {
            Surface::Dephasing { p } => dephasing(p),
            Surface::Erasure { eps } => erasure(eps),
        }
    }

    /// The ensemble whose entropic triple is `bounds(param)`.
    pub fn canonical_ensemble(&self, param: f64) -> Result<CqEnsemble> {
        check_range("param", param, 0.0, 0.5)?;
        bit_flip_pair(param)
    }

    fn grid(&self, n: usize) -> Result<Vec<f64>> {
        if n < 2 {
            return Err(Error::invalid("parameter grid needs at least 2 points"));
        }
        Ok((0..n).map(|i| Self::PARAM_MAX * i as f64 / (n - 1) as f64).collect())
    }
}

/// Golden-section maximization of `f` on `[lo, hi]`.
fn golden_max(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..80 {
        if hi - lo < 1e-13 {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Scans the grid for the maximizer of `f`, then refines once by golden
/// section within one grid step on either side.
fn grid_max(grid: &[f64], f: impl Fn(f64) -> f64) -> (f64, f64) {
    let mut best = (0usize, f64::NEG_INFINITY);
    for (i, &x) in grid.iter().enumerate() {
        let v = f(x);
        if v > best.1 {
            best = (i, v);
        }
    }
    let i = best.0;
    let lo = grid[i.saturating_sub(1)];
    let hi = grid[(i + 1).min(grid.len() - 1)];
    let refined = golden_max(lo, hi, &f);
    if refined.1 > best.1 {
        refined
    } else {
        (grid[i], best.1)
    }
}

/// Membership verdict for a rate triple.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Membership {
    pub inside: bool,
    /// Parameter value attaining `slack`.
    pub witness: f64,
    /// Smallest of the three constraint slacks at the witness.
    pub slack: f64,
}

fn min_slack(surface: &Surface, r: &RateTriple, param: f64) -> f64 {
    match surface.bounds(param) {
        Ok(b) => {
            let [s1, s2, s3] = r.constraint_sums();
            (b.cq_bound - s1).min(b.qe_bound - s2).min(b.cqe_bound - s3)
        }
        Err(_) => f64::NEG_INFINITY,
    }
}

/// Whether `r` lies in the region: the first grid parameter (ascending)
/// satisfying all three inequalities is the witness; failing that, the best
/// grid point is refined once before deciding.
pub fn in_region(r: &RateTriple, surface: &Surface, grid: usize) -> Result<Membership> {
    if !r.is_finite() {
        return Err(Error::invalid("rate triple must be finite"));
    }
    let params = surface.grid(grid)?;
    for &x in &params {
        let slack = min_slack(surface, r, x);
        if slack >= -MEMBERSHIP_TOL {
            return Ok(Membership {
                inside: true,
                witness: x,
                slack,
            });
        }
    }
    let (witness, slack) = grid_max(&params, |x| min_slack(surface, r, x));
    Ok(Membership {
        inside: slack >= -MEMBERSHIP_TOL,
        witness,
        slack,
    })
}

/// Result of maximizing a linear functional over the region.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Hyperplane {
    Bounded { value: f64, argmax: f64 },
    Unbounded,
}

/// `max w·r` over the region. The region is a union of translated unit
/// resource cones, so the maximum is finite exactly when `w` is
/// non-positive on every generator, and then it is attained at a CEF corner.
pub fn supporting_hyperplane(w: &WeightVector, surface: &Surface, grid: usize) -> Result<Hyperplane> {
    if !UnitResourceCone::bounds_functional(w) {
        return Ok(Hyperplane::Unbounded);
    }
    let params = surface.grid(grid)?;
    let f = |x: f64| match surface.bounds(x) {
        Ok(b) => b.cef_corner().dot(w),
        Err(_) => f64::NEG_INFINITY,
    };
    let (argmax, value) = grid_max(&params, f);
    Ok(Hyperplane::Bounded { value, argmax })
}

/// `max over the parameter of cq + lambda qe + mu cqe`, the closed-form value
/// of the weighted objective for the surface's channel. Returns
/// `(value, argmax)`.
pub fn weighted_bound_max(surface: &Surface, lambda: f64, mu: f64, grid: usize) -> Result<(f64, f64)> {
    for (name, v) in [("lambda", lambda), ("mu", mu)] {
        if !v.is_finite() || v < 0.0 {
            return Err(Error::OutOfRange {
                name,
                value: v,
                lo: 0.0,
                hi: f64::INFINITY,
            });
        }
    }
    let params = surface.grid(grid)?;
    let f = |x: f64| match surface.bounds(x) {
        Ok(b) => b.cq_bound + lambda * b.qe_bound + mu * b.cqe_bound,
        Err(_) => f64::NEG_INFINITY,
    };
    let (argmax, value) = grid_max(&params, f);
    Ok((value, argmax))
}

/// One boundary point for plotting.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundarySample {
    pub param: f64,
    pub bounds: EntropicTriple,
    pub cef: RateTriple,
}

/// `n` evenly spaced samples of the boundary over the parameter range.
pub fn sample_boundary(surface: &Surface, n: usize) -> Result<Vec<BoundarySample>> {
    if n < 2 {
        return Err(Error::invalid("boundary sampling needs n >= 2"));
    }
    surface
        .grid(n)?
        .into_iter()
        .map(|param| {
            let bounds = surface.bounds(param)?;
            Ok(BoundarySample {
                param,
                bounds,
                cef: bounds.cef_corner(),
            })
        })
        .collect()
}
