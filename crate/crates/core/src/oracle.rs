//! Brute-force grid searches that cross-check the closed forms and the
//! optimizer.
//!
//! Every search here is a plain scan: a finite list of candidate states,
//! every subset of up to `|X|` of them, and every probability vector on a
//! simplex grid. There is no refinement and nothing is shared with the
//! optimizer in [`crate::dcap`] beyond the entropy and channel primitives.
//!
//! The weighted objective splits as
//! `(1 + mu) H(N(rho_bar)) + sum_x p_x [H(rho_x) + lambda H(N(rho_x)) - (1 + lambda + mu) H(N^c(rho_x))]`,
//! so each candidate is summarized by its channel output and one scalar.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::channel::{tensor_channel, KrausChannel};
use crate::cqstate::{entropic_triple, CqEnsemble};
use crate::dcap::TradeoffWeights;
use crate::entropy::matrix_entropy;
use crate::error::{check_probability, Error, Result};
use crate::qmat::{bloch_matrix, diagonal_state, DensityOperator, Matrix, C64};
use crate::Bits;

/// Agreement tolerance between oracle values and their targets.
pub const ORACLE_TOL: f64 = 5e-3;

/// Largest number of ensemble evaluations a single scan may perform.
pub const MAX_GRID_EVALUATIONS: u128 = 10_000_000;

/// Points of the Bloch ball: polar angles `0..=pi` in `polar_divisions`
/// steps, azimuths `0..2pi` in `azimuth_divisions` steps, at each radius.
#[derive(Clone, Debug, PartialEq)]
pub struct BlochGrid {
    pub polar_divisions: usize,
    pub azimuth_divisions: usize,
    pub radii: Vec<f64>,
}

impl BlochGrid {
    /// Angular steps of pi/12 at radii {0, 1/2, 1}.
    pub fn standard() -> Self {
        BlochGrid {
            polar_divisions: 12,
            azimuth_divisions: 24,
            radii: vec![0.0, 0.5, 1.0],
        }
    }

    /// Pure states only, angular steps of pi/12.
    pub fn pure() -> Self {
        BlochGrid {
            radii: vec![1.0],
            ..BlochGrid::standard()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.polar_divisions < 1 || self.azimuth_divisions < 2 {
            return Err(Error::invalid(format!(
                "Bloch grid too coarse: polar divisions {} (need >= 1), azimuth divisions {} (need >= 2)",
                self.polar_divisions, self.azimuth_divisions
            )));
        }
        if self.radii.is_empty() || self.radii.iter().any(|r| !(0.0..=1.0).contains(r)) {
            return Err(Error::invalid("Bloch grid radii must be non-empty and within [0, 1]"));
        }
        Ok(())
    }

    /// Distinct Bloch vectors, in a fixed order (radius, polar, azimuth).
    pub fn points(&self) -> Result<Vec<[f64; 3]>> {
        self.validate()?;
        let mut out = Vec::new();
        for &r in &self.radii {
            if r == 0.0 {
                out.push([0.0, 0.0, 0.0]);
                continue;
            }
            for i in 0..=self.polar_divisions {
                let t = PI * i as f64 / self.polar_divisions as f64;
                let at_pole = i == 0 || i == self.polar_divisions;
                let n_az = if at_pole { 1 } else { self.azimuth_divisions };
                for j in 0..n_az {
                    let p = 2.0 * PI * j as f64 / self.azimuth_divisions as f64;
                    out.push([
                        r * libm::sin(t) * libm::cos(p),
                        r * libm::sin(t) * libm::sin(p),
                        r * libm::cos(t),
                    ]);
                }
            }
        }
        out.dedup();
        Ok(out)
    }

    fn describe(&self) -> String {
        format!(
            "bloch(polar=pi/{}, azimuth=2pi/{}, radii={:?})",
            self.polar_divisions, self.azimuth_divisions, self.radii
        )
    }
}

/// Single-copy ensemble grid.
#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleGrid {
    pub states: BlochGrid,
    /// Probabilities are multiples of `1 / simplex_denominator`.
    pub simplex_denominator: usize,
    /// Largest `|X|` scanned (at most 4).
    pub max_states: usize,
}

impl Default for EnsembleGrid {
    fn default() -> Self {
        EnsembleGrid {
            states: BlochGrid::standard(),
            simplex_denominator: 8,
            max_states: 2,
        }
    }
}

impl EnsembleGrid {
    fn validate(&self, max_allowed: usize) -> Result<()> {
        if self.simplex_denominator < 2 {
            return Err(Error::invalid(format!(
                "probability grid too coarse: 1/{} (need denominator >= 2)",
                self.simplex_denominator
            )));
        }
        if self.max_states == 0 || self.max_states > max_allowed {
            return Err(Error::invalid(format!(
                "ensemble size cap must be in 1..={max_allowed}, got {}",
                self.max_states
            )));
        }
        Ok(())
    }

    fn describe(&self) -> String {
        format!(
            "{}; simplex=1/{}; |X|<={}",
            self.states.describe(),
            self.simplex_denominator,
            self.max_states
        )
    }
}

/// Two-copy probe family: products of single-qubit grid states plus
/// `cos t |00> + sin t |11>` rotated by `U ⊗ U` for grid rotations `U`.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoCopyGrid {
    pub product_states: BlochGrid,
    /// Angles `t = (pi/4) i / entangled_angles` for `i = 1..=entangled_angles`.
    pub entangled_angles: usize,
    /// Directions whose rotations `|0> -> |n>` are applied to both qubits.
    pub rotations: BlochGrid,
    pub simplex_denominator: usize,
    /// Largest `|X|` scanned (at most 3).
    pub max_states: usize,
}

impl Default for TwoCopyGrid {
    fn default() -> Self {
        TwoCopyGrid {
            product_states: BlochGrid {
                polar_divisions: 2,
                azimuth_divisions: 4,
                radii: vec![0.0, 0.5, 1.0],
            },
            entangled_angles: 4,
            rotations: BlochGrid {
                polar_divisions: 2,
                azimuth_divisions: 4,
                radii: vec![1.0],
            },
            simplex_denominator: 4,
            max_states: 3,
        }
    }
}

impl TwoCopyGrid {
    fn describe(&self) -> String {
        format!(
            "products of {}; entangled angles={} under rotations {}; simplex=1/{}; |X|<={}",
            self.product_states.describe(),
            self.entangled_angles,
            self.rotations.describe(),
            self.simplex_denominator,
            self.max_states
        )
    }
}

/// Outcome of an oracle scan.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleReport {
    pub best_value: Bits,
    pub best_ensemble: CqEnsemble,
    pub grid_spec: String,
    pub comparison_target: Option<Bits>,
    /// `comparison_target - best_value` when a target is set.
    pub gap: Option<Bits>,
    pub evaluations: u64,
}

impl OracleReport {
    pub fn with_target(mut self, target: Bits) -> Self {
        self.comparison_target = Some(target);
        self.gap = Some(target - self.best_value);
        self
    }
}

// ---------------------------------------------------------------------------
// Scan machinery
// ---------------------------------------------------------------------------

struct Candidate {
    rho: Matrix,
    output: Matrix,
    local: f64,
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Number of ensembles a scan visits.
pub fn scan_size(candidates: usize, max_states: usize, denominator: usize) -> u128 {
    (1..=max_states)
        .map(|k| binomial(candidates, k) * binomial(denominator.saturating_sub(1), k - 1))
        .sum()
}

/// Positive integer compositions of `n` into `k` parts, lexicographic.
fn compositions(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, k: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k == 1 {
            prefix.push(n);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for first in 1..=n.saturating_sub(k - 1) {
            prefix.push(first);
            rec(n - first, k - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if k >= 1 && n >= k {
        rec(n, k, &mut Vec::new(), &mut out);
    }
    out
}

/// Best value, its `(weight, candidate index)` picks, and the evaluation count.
type ScanBest = (f64, Vec<(f64, usize)>, u64);

/// Best ensemble over all subsets and simplex weights. Ties keep the first
/// ensemble in (size, subset, composition) order.
fn scan(candidates: &[Candidate], output_coefficient: f64, max_states: usize, denominator: usize) -> Result<ScanBest> {
    let size = scan_size(candidates.len(), max_states, denominator);
    if size > MAX_GRID_EVALUATIONS {
        return Err(Error::GridTooLarge {
            evaluations: size,
            limit: MAX_GRID_EVALUATIONS,
        });
    }
    if candidates.is_empty() {
        return Err(Error::invalid("oracle grid has no candidate states"));
    }
    let out_dim = candidates[0].output.rows();
    let mut best_value = f64::NEG_INFINITY;
    let mut best: Vec<(f64, usize)> = Vec::new();
    let mut evaluations = 0u64;
    let mut mixed = Matrix::zeros(out_dim, out_dim);

    for k in 1..=max_states.min(candidates.len()) {
        let weights: Vec<Vec<f64>> = compositions(denominator, k)
            .into_iter()
            .map(|c| c.into_iter().map(|v| v as f64 / denominator as f64).collect())
            .collect();
        let mut subset: Vec<usize> = (0..k).collect();
        loop {
            for w in &weights {
                mixed = Matrix::zeros(out_dim, out_dim);
                let mut local = 0.0;
                for (&p, &i) in w.iter().zip(&subset) {
                    mixed.add_scaled(p, &candidates[i].output);
                    local += p * candidates[i].local;
                }
                let value = output_coefficient * matrix_entropy(&mixed)? + local;
                evaluations += 1;
                if value > best_value {
                    best_value = value;
                    best = w.iter().copied().zip(subset.iter().copied()).collect();
                }
            }
            // Next k-subset in lexicographic order.
            let n = candidates.len();
            let mut i = k;
            while i > 0 && subset[i - 1] == n - k + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            subset[i - 1] += 1;
            for j in i..k {
                subset[j] = subset[j - 1] + 1;
            }
        }
    }
    drop(mixed);
    Ok((best_value, best, evaluations))
}

fn ensemble_from(candidates: &[Candidate], picks: &[(f64, usize)]) -> CqEnsemble {
    let entries = picks
        .iter()
        .map(|&(p, i)| {
            let d = candidates[i].rho.rows();
            (p, DensityOperator::new_unchecked(candidates[i].rho.clone(), vec![d]))
        })
        .collect();
    CqEnsemble::new_unchecked(entries)
}

fn weighted_candidate(rho: Matrix, ch: &KrausChannel, w: &TradeoffWeights) -> Result<Candidate> {
    let output = ch.apply_matrix(&rho);
    let local = matrix_entropy(&rho)? + w.lambda * matrix_entropy(&output)?
        - (1.0 + w.lambda + w.mu) * matrix_entropy(&ch.complementary_matrix(&rho))?;
    Ok(Candidate { rho, output, local })
}

fn holevo_candidate(rho: Matrix, ch: &KrausChannel) -> Result<Candidate> {
    let output = ch.apply_matrix(&rho);
    let local = -matrix_entropy(&output)?;
    Ok(Candidate { rho, output, local })
}

fn require_qubit_input(ch: &KrausChannel) -> Result<()> {
    if ch.in_dim() != 2 {
        return Err(Error::DimensionMismatch {
            context: "oracle expects a qubit-input channel",
            expected: 2,
            found: ch.in_dim(),
        });
    }
    Ok(())
}

/// The weighted objective re-evaluated through the entropic triple.
pub fn reevaluate(ens: &CqEnsemble, ch: &KrausChannel, w: &TradeoffWeights) -> Result<Bits> {
    let t = entropic_triple(ens, ch)?;
    Ok(t.cq_bound + w.lambda * t.qe_bound + w.mu * t.cqe_bound)
}

// ---------------------------------------------------------------------------
// Oracles
// ---------------------------------------------------------------------------

/// Grid maximum of the weighted objective over single-copy ensembles.
pub fn oracle_dcap(ch: &KrausChannel, w: &TradeoffWeights, grid: &EnsembleGrid) -> Result<OracleReport> {
    require_qubit_input(ch)?;
    grid.validate(4)?;
    let candidates = grid
        .states
        .points()?
        .into_iter()
        .map(|[x, y, z]| weighted_candidate(bloch_matrix(x, y, z), ch, w))
        .collect::<Result<Vec<_>>>()?;
    let (best_value, picks, evaluations) = scan(&candidates, 1.0 + w.mu, grid.max_states, grid.simplex_denominator)?;
    Ok(OracleReport {
        best_value,
        best_ensemble: ensemble_from(&candidates, &picks),
        grid_spec: grid.describe(),
        comparison_target: None,
        gap: None,
        evaluations,
    })
}

/// Number of `nu` values scanned over `[0, 1/2]` for the restricted family.
pub const RESTRICTED_NU_POINTS: usize = 1025;

/// Full-grid oracle against the bit-flip pair family for a dephasing channel.
#[derive(Clone, Debug, PartialEq)]
pub struct SufficiencyReport {
    /// Full grid best, with the restricted best as target.
    pub report: OracleReport,
    pub restricted_nu: f64,
}

impl SufficiencyReport {
    /// `full - restricted`; the restricted family suffices when this is at most [`ORACLE_TOL`].
    pub fn excess(&self) -> Bits {
        -self.report.gap.unwrap_or(0.0)
    }
}

pub fn oracle_dephasing_diagonal_sufficiency(
    p: f64,
    w: &TradeoffWeights,
    grid: &EnsembleGrid,
) -> Result<SufficiencyReport> {
    check_probability("p", p)?;
    let ch = crate::channel::dephasing(p)?;
    let full = oracle_dcap(&ch, w, grid)?;

    let mut restricted = (f64::NEG_INFINITY, 0.0);
    for i in 0..RESTRICTED_NU_POINTS {
        let nu = 0.5 * i as f64 / (RESTRICTED_NU_POINTS - 1) as f64;
        let ens = CqEnsemble::new_unchecked(vec![
            (0.5, diagonal_state(&[nu, 1.0 - nu])?),
            (0.5, diagonal_state(&[1.0 - nu, nu])?),
        ]);
        let v = reevaluate(&ens, &ch, w)?;
        if v > restricted.0 {
            restricted = (v, nu);
        }
    }
    let mut report = full.with_target(restricted.0);
    report.grid_spec = format!(
        "{}; restricted nu grid {} points on [0, 1/2]",
        report.grid_spec, RESTRICTED_NU_POINTS
    );
    Ok(SufficiencyReport {
        report,
        restricted_nu: restricted.1,
    })
}

/// Unitary taking `|0>` to the pure state with Bloch direction `n`.
fn rotation_to(n: [f64; 3]) -> Matrix {
    let t = libm::acos(n[2].clamp(-1.0, 1.0));
    let p = libm::atan2(n[1], n[0]);
    let (c, s) = (libm::cos(t / 2.0), libm::sin(t / 2.0));
    let e = C64::new(libm::cos(p), libm::sin(p));
    Matrix::from_vec(2, 2, vec![C64::new(c, 0.0), -e.conj() * s, e * s, C64::new(c, 0.0)]).expect("2x2")
}

/// Candidate two-qubit input states of the two-copy probe family.
pub fn two_copy_states(grid: &TwoCopyGrid) -> Result<Vec<Matrix>> {
    if grid.entangled_angles == 0 {
        return Err(Error::invalid("two-copy grid needs at least one entangled angle"));
    }
    let singles: Vec<Matrix> = grid
        .product_states
        .points()?
        .into_iter()
        .map(|[x, y, z]| bloch_matrix(x, y, z))
        .collect();
    let mut states = Vec::new();
    for a in &singles {
        for b in &singles {
            states.push(a.kron(b));
        }
    }
    let rotations: Vec<Matrix> = grid.rotations.points()?.into_iter().map(rotation_to).collect();
    for i in 1..=grid.entangled_angles {
        let t = 0.25 * PI * i as f64 / grid.entangled_angles as f64;
        let mut v = vec![C64::new(0.0, 0.0); 4];
        v[0] = C64::new(libm::cos(t), 0.0);
        v[3] = C64::new(libm::sin(t), 0.0);
        let psi = Matrix::outer(&v);
        for u in &rotations {
            states.push(u.kron(u).conjugate(&psi));
        }
    }
    Ok(states)
}

/// Two-copy probe result.
#[derive(Clone, Debug, PartialEq)]
pub struct AdditivityReport {
    /// Best two-copy value, with twice the single-copy oracle value as target.
    pub two_copy: OracleReport,
    pub single: OracleReport,
    /// Two-copy objective of the single-copy best ensemble tensored with itself.
    pub product_value: Bits,
}

impl AdditivityReport {
    /// `two_copy - 2 single`; additivity predicts at most zero.
    pub fn excess(&self) -> Bits {
        -self.two_copy.gap.unwrap_or(0.0)
    }
}

/// One-sided additivity probe: no ensemble in the two-copy family should
/// beat twice the single-copy value. A pass means no counterexample was
/// found in this family, not that additivity is proven.
pub fn oracle_additivity(
    ch: &KrausChannel,
    w: &TradeoffWeights,
    single_grid: &EnsembleGrid,
    two_copy_grid: &TwoCopyGrid,
) -> Result<AdditivityReport> {
    require_qubit_input(ch)?;
    if two_copy_grid.simplex_denominator < 2 || two_copy_grid.max_states == 0 || two_copy_grid.max_states > 3 {
        return Err(Error::invalid(
            "two-copy grid needs simplex denominator >= 2 and 1 <= |X| <= 3",
        ));
    }
    let single = oracle_dcap(ch, w, single_grid)?;
    let two = tensor_channel(ch, ch)?;

    let states = two_copy_states(two_copy_grid)?;
    let size = scan_size(
        states.len(),
        two_copy_grid.max_states,
        two_copy_grid.simplex_denominator,
    );
    if size > MAX_GRID_EVALUATIONS {
        return Err(Error::GridTooLarge {
            evaluations: size,
            limit: MAX_GRID_EVALUATIONS,
        });
    }
    let candidates = states
        .into_iter()
        .map(|rho| weighted_candidate(rho, &two, w))
        .collect::<Result<Vec<_>>>()?;
    let (best_value, picks, evaluations) = scan(
        &candidates,
        1.0 + w.mu,
        two_copy_grid.max_states,
        two_copy_grid.simplex_denominator,
    )?;
    let product = single.best_ensemble.tensor(&single.best_ensemble)?;
    let product_value = reevaluate(&product, &two, w)?;
    let two_copy = OracleReport {
        best_value,
        best_ensemble: ensemble_from(&candidates, &picks),
        grid_spec: two_copy_grid.describe(),
        comparison_target: None,
        gap: None,
        evaluations,
    }
    .with_target(2.0 * single.best_value);
    Ok(AdditivityReport {
        two_copy,
        single,
        product_value,
    })
}

/// Pure-state grids for the Holevo information of the erasure channel.
#[derive(Clone, Debug, PartialEq)]
pub struct HolevoGrid {
    pub single: EnsembleGrid,
    /// Pure single-qubit states whose pairwise products form the two-copy family.
    pub two_copy_states: BlochGrid,
    pub two_copy_denominator: usize,
    pub two_copy_max_states: usize,
}

impl Default for HolevoGrid {
    fn default() -> Self {
        HolevoGrid {
            single: EnsembleGrid {
                states: BlochGrid::pure(),
                simplex_denominator: 8,
                max_states: 2,
            },
            two_copy_states: BlochGrid {
                polar_divisions: 2,
                azimuth_divisions: 4,
                radii: vec![1.0],
            },
            two_copy_denominator: 4,
            two_copy_max_states: 4,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HolevoReport {
    /// Target `1 - eps`.
    pub single: OracleReport,
    /// Target `2 (1 - eps)`.
    pub two_copy: OracleReport,
}

pub fn oracle_holevo_erasure(eps: f64, grid: &HolevoGrid) -> Result<HolevoReport> {
    check_probability("eps", eps)?;
    grid.single.validate(4)?;
    let ch = crate::channel::erasure(eps)?;
    let candidates = grid
        .single
        .states
        .points()?
        .into_iter()
        .map(|[x, y, z]| holevo_candidate(bloch_matrix(x, y, z), &ch))
        .collect::<Result<Vec<_>>>()?;
    let (best_value, picks, evaluations) = scan(
        &candidates,
        1.0,
        grid.single.max_states,
        grid.single.simplex_denominator,
    )?;
    let single = OracleReport {
        best_value,
        best_ensemble: ensemble_from(&candidates, &picks),
        grid_spec: format!("pure {}", grid.single.describe()),
        comparison_target: None,
        gap: None,
        evaluations,
    }
    .with_target(1.0 - eps);

    if grid.two_copy_denominator < 2 || grid.two_copy_max_states == 0 {
        return Err(Error::invalid("two-copy Holevo grid is too coarse"));
    }
    let two = tensor_channel(&ch, &ch)?;
    let singles: Vec<Matrix> = grid
        .two_copy_states
        .points()?
        .into_iter()
        .map(|[x, y, z]| bloch_matrix(x, y, z))
        .collect();
    let mut candidates = Vec::new();
    for a in &singles {
        for b in &singles {
            candidates.push(holevo_candidate(a.kron(b), &two)?);
        }
    }
    let (best_value, picks, evaluations) = scan(&candidates, 1.0, grid.two_copy_max_states, grid.two_copy_denominator)?;
    let two_copy = OracleReport {
        best_value,
        best_ensemble: ensemble_from(&candidates, &picks),
        grid_spec: format!(
            "pure products of {}; simplex=1/{}; |X|<={}",
            grid.two_copy_states.describe(),
            grid.two_copy_denominator,
            grid.two_copy_max_states
        ),
        comparison_target: None,
        gap: None,
        evaluations,
    }
    .with_target(2.0 * (1.0 - eps));
    Ok(HolevoReport { single, two_copy })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{dephasing, erasure};

    fn small_grid() -> EnsembleGrid {
        EnsembleGrid {
            states: BlochGrid {
                polar_divisions: 4,
                azimuth_divisions: 4,
                radii: vec![0.0, 0.5, 1.0],
            },
            simplex_denominator: 4,
            max_states: 2,
        }
    }

    #[test]
    fn compositions_and_sizes() {
        assert_eq!(compositions(4, 2), vec![vec![1, 3], vec![2, 2], vec![3, 1]]);
        assert_eq!(compositions(3, 3), vec![vec![1, 1, 1]]);
        assert!(compositions(2, 3).is_empty());
        assert_eq!(scan_size(10, 2, 8), 10 + 45 * 7);
        assert_eq!(binomial(533, 2), 141_778);
    }

    #[test]
    fn bloch_grid_counts() {
        assert_eq!(BlochGrid::standard().points().unwrap().len(), 1 + 2 * (11 * 24 + 2));
        assert_eq!(BlochGrid::pure().points().unwrap().len(), 11 * 24 + 2);
    }

    #[test]
    fn coarse_grids_rejected() {
        let mut g = small_grid();
        g.simplex_denominator = 1;
        assert!(oracle_dcap(&dephasing(0.2).unwrap(), &TradeoffWeights::ZERO, &g).is_err());
        let mut g = small_grid();
        g.states.azimuth_divisions = 1;
        assert!(oracle_dcap(&dephasing(0.2).unwrap(), &TradeoffWeights::ZERO, &g).is_err());
    }

    #[test]
    fn oversized_scan_reports_estimate() {
        let g = EnsembleGrid {
            max_states: 4,
            ..EnsembleGrid::default()
        };
        match oracle_dcap(&dephasing(0.2).unwrap(), &TradeoffWeights::ZERO, &g) {
            Err(Error::GridTooLarge { evaluations, .. }) => assert!(evaluations > MAX_GRID_EVALUATIONS),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn identity_channel_attains_two_at_centre() {
        let r = oracle_dcap(
            &KrausChannel::identity(2).unwrap(),
            &TradeoffWeights::ZERO,
            &small_grid(),
        )
        .unwrap();
        assert!((r.best_value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn best_ensemble_reevaluates() {
        let w = TradeoffWeights::new(1.0, 0.5).unwrap();
        let ch = erasure(0.3).unwrap();
        let r = oracle_dcap(&ch, &w, &small_grid()).unwrap();
        assert!((reevaluate(&r.best_ensemble, &ch, &w).unwrap() - r.best_value).abs() < 1e-9);
    }

    #[test]
    fn product_family_doubles_single_copy() {
        let ch = dephasing(0.2).unwrap();
        let two = tensor_channel(&ch, &ch).unwrap();
        let w = TradeoffWeights::new(1.0, 1.0).unwrap();
        let a = CqEnsemble::new(vec![
            (0.5, crate::qmat::bloch_state(0.0, 0.0, 0.5).unwrap()),
            (0.5, crate::qmat::bloch_state(0.0, 0.0, -0.5).unwrap()),
        ])
        .unwrap();
        let single = reevaluate(&a, &ch, &w).unwrap();
        let double = reevaluate(&a.tensor(&a).unwrap(), &two, &w).unwrap();
        assert!((double - 2.0 * single).abs() < 1e-9);
    }

    #[test]
    fn two_copy_family_members_are_states() {
        for rho in two_copy_states(&TwoCopyGrid::default()).unwrap() {
            DensityOperator::new(rho, vec![2, 2]).unwrap();
        }
    }
}
