//! Ensemble parameterizations, deterministic seeding and compass search.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};
use crate::qmat::{bloch_matrix, Matrix, C64};

/// How one ensemble member is encoded as real parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) enum StateFamily {
    /// Qubit Bloch vector `(x, y, z)`, projected onto the unit ball.
    Bloch,
    /// Eigenvalue weights (clamped, normalized) followed by `(theta, phi)`
    /// pairs of the plane rotations building the eigenframe.
    Spectral(usize),
    /// Pure qubit state on the Bloch sphere, `(theta, phi)`.
    PureBloch,
    /// Pure state from an unnormalized complex amplitude vector.
    PureVector(usize),
}

impl StateFamily {
    pub(crate) fn mixed(dim: usize) -> Self {
        if dim == 2 {
            StateFamily::Bloch
        } else {
            StateFamily::Spectral(dim)
        }
    }

    pub(crate) fn pure(dim: usize) -> Self {
        if dim == 2 {
            StateFamily::PureBloch
        } else {
            StateFamily::PureVector(dim)
        }
    }

    pub(crate) fn len(&self) -> usize {
        match *self {
            StateFamily::Bloch => 3,
            StateFamily::Spectral(d) => d + d * (d - 1),
            StateFamily::PureBloch => 2,
            StateFamily::PureVector(d) => 2 * d,
        }
    }

    pub(crate) fn decode(&self, x: &[f64]) -> Matrix {
        match *self {
            StateFamily::Bloch => {
                let (mut bx, mut by, mut bz) = (x[0], x[1], x[2]);
                let r = libm::sqrt(bx * bx + by * by + bz * bz);
                if r > 1.0 {
                    bx /= r;
                    by /= r;
                    bz /= r;
                }
                bloch_matrix(bx, by, bz)
            }
            StateFamily::PureBloch => {
                let (t, p) = (x[0], x[1]);
                bloch_matrix(libm::sin(t) * libm::cos(p), libm::sin(t) * libm::sin(p), libm::cos(t))
            }
            StateFamily::Spectral(d) => {
                let weights = normalized_weights(&x[..d]);
                let frame = givens_frame(d, &x[d..]);
                let mut rho = Matrix::zeros(d, d);
                for (k, &w) in weights.iter().enumerate() {
                    if w == 0.0 {
                        continue;
                    }
                    for i in 0..d {
                        let a = frame[(i, k)] * w;
                        for j in 0..d {
                            rho[(i, j)] += a * frame[(j, k)].conj();
                        }
                    }
                }
                rho
            }
            StateFamily::PureVector(d) => {
                let mut v: Vec<C64> = (0..d).map(|i| C64::new(x[2 * i], x[2 * i + 1])).collect();
                let norm = libm::sqrt(v.iter().map(|z| z.norm_sqr()).sum());
                if norm < 1e-300 {
                    v = vec![C64::new(0.0, 0.0); d];
                    v[0] = C64::new(1.0, 0.0);
                } else {
                    v.iter_mut().for_each(|z| *z /= norm);
                }
                Matrix::outer(&v)
            }
        }
    }

    /// Parameters of a uniformly random member.
    fn random(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        match *self {
            StateFamily::Bloch => loop {
                let v: Vec<f64> = (0..3).map(|_| 2.0 * uniform(rng) - 1.0).collect();
                if v.iter().map(|a| a * a).sum::<f64>() <= 1.0 {
                    break v;
                }
            },
            StateFamily::PureBloch => {
                vec![libm::acos(2.0 * uniform(rng) - 1.0), 2.0 * PI * uniform(rng)]
            }
            StateFamily::Spectral(d) => {
                let mut v: Vec<f64> = (0..d).map(|_| uniform(rng)).collect();
                for _ in 0..d * (d - 1) / 2 {
                    v.push(0.5 * PI * uniform(rng));
                    v.push(2.0 * PI * uniform(rng));
                }
                v
            }
            StateFamily::PureVector(d) => (0..2 * d).map(|_| 2.0 * uniform(rng) - 1.0).collect(),
        }
    }

    /// Parameters of the maximally mixed state (or, for pure families, the
    /// first basis state).
    fn centre(&self) -> Vec<f64> {
        match *self {
            StateFamily::Bloch => vec![0.0; 3],
            StateFamily::PureBloch => vec![0.0; 2],
            StateFamily::Spectral(d) => {
                let mut v = vec![1.0; d];
                v.extend(core::iter::repeat_n(0.0, d * (d - 1)));
                v
            }
            StateFamily::PureVector(d) => basis_vector_params(d, 0),
        }
    }
}

fn basis_vector_params(d: usize, k: usize) -> Vec<f64> {
    let mut v = vec![0.0; 2 * d];
    v[2 * k] = 1.0;
    v
}

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Clamps to non-negative and normalizes; all-zero input becomes uniform.
pub(crate) fn normalized_weights(raw: &[f64]) -> Vec<f64> {
    let clamped: Vec<f64> = raw.iter().map(|w| w.max(0.0)).collect();
    let total: f64 = clamped.iter().sum();
    if total <= 0.0 {
        vec![1.0 / raw.len() as f64; raw.len()]
    } else {
        clamped.iter().map(|w| w / total).collect()
    }
}

/// Unitary `prod_{j<k} G_jk(theta, phi)` applied to the identity.
fn givens_frame(d: usize, angles: &[f64]) -> Matrix {
    let mut u = Matrix::identity(d);
    let mut idx = 0;
    for j in 0..d {
        for k in (j + 1)..d {
            let (t, p) = (angles[idx], angles[idx + 1]);
            idx += 2;
            let (c, s) = (libm::cos(t), libm::sin(t));
            let phase = C64::new(libm::cos(p), libm::sin(p));
            for r in 0..d {
                let uj = u[(r, j)];
                let uk = u[(r, k)];
                u[(r, j)] = uj * c + uk * (phase.conj() * s);
                u[(r, k)] = uk * c - uj * (phase * s);
            }
        }
    }
    u
}

/// Parameter layout of an ensemble: `k` raw weights, then `k` members.
#[derive(Clone, Copy, Debug)]
pub(crate) struct EnsembleLayout {
    pub family: StateFamily,
    pub members: usize,
}

impl EnsembleLayout {
    pub(crate) fn len(&self) -> usize {
        self.members * (1 + self.family.len())
    }

    pub(crate) fn decode(&self, x: &[f64]) -> Vec<(f64, Matrix)> {
        let k = self.members;
        let weights = normalized_weights(&x[..k]);
        let step = self.family.len();
        weights
            .into_iter()
            .enumerate()
            .map(|(i, w)| {
                let start = k + i * step;
                (w, self.family.decode(&x[start..start + step]))
            })
            .collect()
    }

    /// Packs `(weight, member params)` pairs, padding with zero-weight
    /// copies of the centre state.
    fn encode(&self, parts: &[(f64, Vec<f64>)]) -> Vec<f64> {
        let k = self.members;
        let mut x = vec![0.0; self.len()];
        let centre = self.family.centre();
        for i in 0..k {
            let (w, params) = match parts.get(i) {
                Some((w, p)) => (*w, p.as_slice()),
                None => (0.0, centre.as_slice()),
            };
            x[i] = w;
            let start = k + i * self.family.len();
            x[start..start + params.len()].copy_from_slice(params);
        }
        x
    }
}

/// Unit directions on a coarse sphere grid (polar step pi/4, azimuth pi/4).
fn coarse_directions() -> Vec<[f64; 3]> {
    let mut dirs = vec![[0.0, 0.0, 1.0]];
    for i in 1..4 {
        let t = PI * i as f64 / 4.0;
        for j in 0..8 {
            let p = PI * j as f64 / 4.0;
            dirs.push([libm::sin(t) * libm::cos(p), libm::sin(t) * libm::sin(p), libm::cos(t)]);
        }
    }
    dirs.push([0.0, 0.0, -1.0]);
    dirs
}

fn to_polar(d: [f64; 3]) -> Vec<f64> {
    vec![libm::acos(d[2].clamp(-1.0, 1.0)), libm::atan2(d[1], d[0])]
}

/// Deterministic seed ensembles for a layout, followed by random starts.
pub(crate) fn seeds(layout: &EnsembleLayout, random_starts: usize, seed: u64) -> Vec<Vec<f64>> {
    let k = layout.members;
    let mut out = Vec::new();
    let dirs = coarse_directions();
    let half: Vec<[f64; 3]> = dirs
        .iter()
        .copied()
        .filter(|d| d[2] > 1e-12 || (d[2].abs() <= 1e-12 && (d[1] > 1e-12 || (d[1].abs() <= 1e-12 && d[0] > 0.0))))
        .collect();
    let neg = |d: [f64; 3]| [-d[0], -d[1], -d[2]];
    match layout.family {
        StateFamily::Bloch => {
            out.push(layout.encode(&[(1.0, vec![0.0; 3])]));
            for r in [0.5, 1.0] {
                for d in &dirs {
                    out.push(layout.encode(&[(1.0, d.iter().map(|a| a * r).collect())]));
                }
            }
            if k >= 2 {
                for r in [0.25, 0.5, 0.75, 1.0] {
                    for d in &half {
                        let a: Vec<f64> = d.iter().map(|v| v * r).collect();
                        let b: Vec<f64> = neg(*d).iter().map(|v| v * r).collect();
                        out.push(layout.encode(&[(0.5, a), (0.5, b)]));
                    }
                }
            }
            if k >= 4 {
                let axes = [[0.0, 0.0, 1.0], [0.0, 0.0, -1.0], [1.0, 0.0, 0.0], [-1.0, 0.0, 0.0]];
                out.push(layout.encode(&axes.map(|a| (0.25, a.to_vec()))));
                let s = 1.0 / libm::sqrt(3.0);
                let tetra = [[s, s, s], [s, -s, -s], [-s, s, -s], [-s, -s, s]];
                out.push(layout.encode(&tetra.map(|a| (0.25, a.to_vec()))));
            }
        }
        StateFamily::PureBloch => {
            for d in &dirs {
                out.push(layout.encode(&[(1.0, to_polar(*d))]));
            }
            if k >= 2 {
                for d in &half {
                    out.push(layout.encode(&[(0.5, to_polar(*d)), (0.5, to_polar(neg(*d)))]));
                }
            }
            if k >= 4 {
                let s = 1.0 / libm::sqrt(3.0);
                let tetra = [[s, s, s], [s, -s, -s], [-s, s, -s], [-s, -s, s]];
                out.push(layout.encode(&tetra.map(|a| (0.25, to_polar(a)))));
            }
        }
        StateFamily::Spectral(d) => {
            out.push(layout.encode(&[(1.0, layout.family.centre())]));
            // Computational basis states, individually and as a uniform mixture.
            let basis = |i: usize| {
                let mut v = vec![0.0; d];
                v[i] = 1.0;
                v.extend(core::iter::repeat_n(0.0, d * (d - 1)));
                v
            };
            for i in 0..d {
                out.push(layout.encode(&[(1.0, basis(i))]));
            }
            if k >= d {
                let parts: Vec<_> = (0..d).map(|i| (1.0, basis(i))).collect();
                out.push(layout.encode(&parts));
            }
        }
        StateFamily::PureVector(d) => {
            for i in 0..d {
                out.push(layout.encode(&[(1.0, basis_vector_params(d, i))]));
            }
            if k >= d {
                let parts: Vec<_> = (0..d).map(|i| (1.0, basis_vector_params(d, i))).collect();
                out.push(layout.encode(&parts));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..random_starts {
        let parts: Vec<_> = (0..k)
            .map(|_| (uniform(&mut rng), layout.family.random(&mut rng)))
            .collect();
        out.push(layout.encode(&parts));
    }
    out
}

/// Outcome of one compass-search run.
pub(crate) struct LocalResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub converged: bool,
}

/// Coordinate compass search: try `±step` along each axis, accept strict
/// improvements, halve the step after a sweep without progress. Stops when
/// the step falls below `tol` or `budget` evaluations are used.
pub(crate) fn compass_search(
    f: &mut dyn FnMut(&[f64]) -> f64,
    mut x: Vec<f64>,
    mut value: f64,
    step0: f64,
    tol: f64,
    budget: &mut usize,
) -> LocalResult {
    let mut step = step0;
    while step >= tol {
        let mut improved = false;
        for i in 0..x.len() {
            for dir in [1.0, -1.0] {
                if *budget == 0 {
                    return LocalResult {
                        x,
                        value,
                        converged: false,
                    };
                }
                *budget -= 1;
                let old = x[i];
                x[i] = old + dir * step;
                let v = f(&x);
                if v > value {
                    value = v;
                    improved = true;
                    break;
                }
                x[i] = old;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    LocalResult {
        x,
        value,
        converged: true,
    }
}

/// Seeds, ranks and refines; returns the best parameter vector.
pub(crate) struct SearchOutcome {
    pub x: Vec<f64>,
    pub evaluations: usize,
    pub converged: bool,
}

pub(crate) struct SearchSettings {
    pub max_evaluations: usize,
    pub refine_seeds: usize,
    pub random_starts: usize,
    pub seed: u64,
    pub initial_step: f64,
    pub step_tolerance: f64,
}

/// Objective over decoded ensemble members `(p_x, rho_x)`.
pub(crate) type Objective<'a> = dyn Fn(&[(f64, Matrix)]) -> Result<f64> + 'a;

pub(crate) fn maximize(
    layout: &EnsembleLayout,
    settings: &SearchSettings,
    objective: &Objective<'_>,
) -> Result<SearchOutcome> {
    if settings.max_evaluations == 0 {
        return Err(Error::invalid("optimizer budget must be positive"));
    }
    let mut first_error: Option<Error> = None;
    let mut eval = |x: &[f64]| -> f64 {
        match objective(&layout.decode(x)) {
            Ok(v) if v.is_finite() => v,
            Ok(_) => f64::NEG_INFINITY,
            Err(e) => {
                first_error.get_or_insert(e);
                f64::NEG_INFINITY
            }
        }
    };

    let mut budget = settings.max_evaluations;
    let mut scored: Vec<(usize, Vec<f64>, f64)> = Vec::new();
    for (i, x) in seeds(layout, settings.random_starts, settings.seed)
        .into_iter()
        .enumerate()
    {
        if budget == 0 {
            break;
        }
        budget -= 1;
        let v = eval(&x);
        scored.push((i, x, v));
    }
    // Highest value first; equal values keep seed order.
    scored.sort_by(|a, b| b.2.total_cmp(&a.2).then(a.0.cmp(&b.0)));
    if scored.is_empty() || scored[0].2 == f64::NEG_INFINITY {
        return Err(first_error.unwrap_or_else(|| Error::invalid("no finite objective value at any seed")));
    }

    let mut best: Option<LocalResult> = None;
    let mut converged = true;
    for (_, x, v) in scored.into_iter().take(settings.refine_seeds.max(1)) {
        let local = compass_search(
            &mut eval,
            x,
            v,
            settings.initial_step,
            settings.step_tolerance,
            &mut budget,
        );
        converged &= local.converged;
        if best.as_ref().is_none_or(|b| local.value > b.value) {
            best = Some(local);
        }
    }
    let best = best.expect("at least one seed refined");
    Ok(SearchOutcome {
        x: best.x,
        evaluations: settings.max_evaluations - budget,
        converged,
    })
}
