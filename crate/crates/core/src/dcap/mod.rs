//! The weighted dynamic capacity objective
//! `I(AX;B) + lambda I(A>BX) + mu (I(X;B) + I(A>BX))` and its maximization
//! over input ensembles.
//!
//! Maximized values are lower bounds certified by the returned ensemble.
//! The search seeds a deterministic grid of ensembles, then refines the best
//! few with a compass (pattern) search until the step drops below the
//! tolerance or the evaluation budget runs out.

mod search;

use alloc::vec::Vec;

use crate::channel::{tensor_channel, KrausChannel};
use crate::cqstate::{entropic_triple, CqEnsemble, EnsembleEntropies};
use crate::entropy::matrix_entropy;
use crate::error::{check_probability, Error, Result};
use crate::qmat::{DensityOperator, Matrix};
use crate::Bits;

use search::{maximize, EnsembleLayout, Objective, SearchSettings, StateFamily};

/// Largest channel input dimension the optimizer accepts.
pub const MAX_INPUT_DIM: usize = 4;

/// Default `|X|` cap for single-copy qubit searches.
pub const SINGLE_COPY_STATE_CAP: usize = 4;

/// Default `|X|` cap for two-copy searches.
pub const TWO_COPY_STATE_CAP: usize = 6;

/// Absolute tolerance (bits) for optimizer vs closed-form comparisons.
pub const SEARCH_TOL: f64 = 1e-3;

/// Non-negative weights `(lambda, mu)` of the objective.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TradeoffWeights {
    pub lambda: f64,
    pub mu: f64,
}

impl TradeoffWeights {
    pub fn new(lambda: f64, mu: f64) -> Result<Self> {
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
        Ok(TradeoffWeights { lambda, mu })
    }

    pub const ZERO: TradeoffWeights = TradeoffWeights { lambda: 0.0, mu: 0.0 };

    fn combine(&self, h: &EnsembleEntropies) -> Bits {
        let t = h.triple();
        t.cq_bound + self.lambda * t.qe_bound + self.mu * t.cqe_bound
    }
}

/// Optimizer settings. All searches are deterministic for fixed settings.
#[derive(Clone, Debug, PartialEq)]
pub struct OptimizerBudget {
    /// Objective evaluations per search (seeding plus refinement).
    pub max_evaluations: usize,
    /// Evaluations for the two-copy search in [`additivity_gap`].
    pub two_copy_evaluations: usize,
    /// `|X|` cap; `None` picks the family default.
    pub max_states: Option<usize>,
    /// How many of the best seeds are refined.
    pub refine_seeds: usize,
    /// Extra random starting ensembles drawn from `seed`.
    pub random_starts: usize,
    pub seed: u64,
    pub initial_step: f64,
    pub step_tolerance: f64,
}

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 0x5EED_CAFE;

impl Default for OptimizerBudget {
    fn default() -> Self {
        OptimizerBudget {
            max_evaluations: 200_000,
            two_copy_evaluations: 20_000,
            max_states: None,
            refine_seeds: 3,
            random_starts: 4,
            seed: DEFAULT_SEED,
            initial_step: 0.25,
            step_tolerance: 1e-6,
        }
    }
}

impl OptimizerBudget {
    fn settings(&self, evaluations: usize) -> SearchSettings {
        SearchSettings {
            max_evaluations: evaluations,
            refine_seeds: self.refine_seeds,
            random_starts: self.random_starts,
            seed: self.seed,
            initial_step: self.initial_step,
            step_tolerance: self.step_tolerance,
        }
    }
}

/// A certified lower bound and the ensemble attaining it.
#[derive(Clone, Debug, PartialEq)]
pub struct OptimizationResult {
    pub value: Bits,
    pub argmax_ensemble: CqEnsemble,
    pub evaluations: usize,
    /// Whether every refinement ended on the step tolerance rather than the budget.
    pub converged: bool,
    /// The `|X|` cap the search ran under.
    pub state_cap: usize,
}

/// `I(AX;B) + lambda I(A>BX) + mu (I(X;B) + I(A>BX))`.
pub fn objective(ens: &CqEnsemble, ch: &KrausChannel, w: &TradeoffWeights) -> Result<Bits> {
    let t = entropic_triple(ens, ch)?;
    Ok(t.cq_bound + w.lambda * t.qe_bound + w.mu * t.cqe_bound)
}

fn check_channel(ch: &KrausChannel) -> Result<()> {
    if ch.in_dim() > MAX_INPUT_DIM {
        return Err(Error::DimensionCap {
            dim: ch.in_dim(),
            cap: MAX_INPUT_DIM,
        });
    }
    Ok(())
}

fn members_to_ensemble(members: Vec<(f64, Matrix)>) -> CqEnsemble {
    let entries = members
        .into_iter()
        .filter(|(p, _)| *p > 0.0)
        .map(|(p, m)| {
            let d = m.rows();
            (p, DensityOperator::new_unchecked(m, alloc::vec![d]))
        })
        .collect();
    CqEnsemble::new_unchecked(entries)
}

/// Runs the search for one layout and packages the certified result.
/// `value` re-evaluates `finalize` on the pruned ensemble.
fn run(
    layout: EnsembleLayout,
    budget: &OptimizerBudget,
    evaluations: usize,
    objective: &Objective<'_>,
    candidates: &[CqEnsemble],
    finalize: &dyn Fn(&CqEnsemble) -> Result<Bits>,
) -> Result<OptimizationResult> {
    let outcome = maximize(&layout, &budget.settings(evaluations), objective)?;
    let mut ensemble = members_to_ensemble(layout.decode(&outcome.x));
    let mut value = finalize(&ensemble)?;
    for cand in candidates {
        let v = finalize(cand)?;
        if v > value {
            value = v;
            ensemble = cand.clone();
        }
    }
    Ok(OptimizationResult {
        value,
        argmax_ensemble: ensemble,
        evaluations: outcome.evaluations + candidates.len(),
        converged: outcome.converged,
        state_cap: layout.members,
    })
}

fn default_cap(ch: &KrausChannel) -> usize {
    if ch.in_dim() <= 2 {
        SINGLE_COPY_STATE_CAP
    } else {
        TWO_COPY_STATE_CAP
    }
}

/// Maximizes the objective over ensembles of at most `|X|` members, with
/// optional fixed candidate ensembles that are evaluated but not refined.
pub fn dcap_optimize_with_candidates(
    ch: &KrausChannel,
    w: &TradeoffWeights,
    budget: &OptimizerBudget,
    evaluations: usize,
    candidates: &[CqEnsemble],
) -> Result<OptimizationResult> {
    check_channel(ch)?;
    let members = budget.max_states.unwrap_or_else(|| default_cap(ch));
    if members == 0 {
        return Err(Error::invalid("ensemble size cap must be positive"));
    }
    for c in candidates {
        if c.input_dim() != ch.in_dim() {
            return Err(Error::DimensionMismatch {
                context: "candidate ensemble vs channel input",
                expected: ch.in_dim(),
                found: c.input_dim(),
            });
        }
    }
    let layout = EnsembleLayout {
        family: StateFamily::mixed(ch.in_dim()),
        members,
    };
    let obj = |m: &[(f64, Matrix)]| -> Result<f64> {
        let h = EnsembleEntropies::from_members(m.iter().map(|(p, r)| (*p, r)), ch)?;
        Ok(w.combine(&h))
    };
    run(layout, budget, evaluations, &obj, candidates, &|e| objective(e, ch, w))
}

/// `D_{lambda,mu}(N)`, maximized over the search family.
pub fn dcap_optimize(ch: &KrausChannel, w: &TradeoffWeights, budget: &OptimizerBudget) -> Result<OptimizationResult> {
    dcap_optimize_with_candidates(ch, w, budget, budget.max_evaluations, &[])
}

/// The erasure objective as a function of the input parameter `p`.
fn erasure_objective(eps: f64, w: &TradeoffWeights, h: f64) -> Bits {
    (1.0 - eps) * (1.0 + h) + w.lambda * (1.0 - 2.0 * eps) * h + w.mu * ((1.0 - eps) - eps * h)
}

/// Maximizing `p` for the erasure channel: `1/2` when the coefficient of
/// `H2(p)` is non-negative, otherwise `0`.
pub fn erasure_optimal_p(eps: f64, w: &TradeoffWeights) -> Result<f64> {
    check_probability("eps", eps)?;
    Ok(if (1.0 - eps) + w.lambda * (1.0 - 2.0 * eps) >= w.mu * eps {
        0.5
    } else {
        0.0
    })
}

/// Exact `D_{lambda,mu}` of the erasure channel.
pub fn dcap_closed_form_erasure(eps: f64, w: &TradeoffWeights) -> Result<Bits> {
    let p = erasure_optimal_p(eps, w)?;
    Ok(erasure_objective(eps, w, if p > 0.0 { 1.0 } else { 0.0 }))
}

fn single_state(
    ch: &KrausChannel,
    budget: &OptimizerBudget,
    f: &dyn Fn(&Matrix) -> Result<Bits>,
) -> Result<OptimizationResult> {
    check_channel(ch)?;
    let layout = EnsembleLayout {
        family: StateFamily::mixed(ch.in_dim()),
        members: 1,
    };
    let obj = |m: &[(f64, Matrix)]| f(&m[0].1);
    run(layout, budget, budget.max_evaluations, &obj, &[], &|e| {
        f(e.entries()[0].1.matrix())
    })
}

/// Entanglement-assisted capacity `max_rho I(A;B)` with
/// `I(A;B) = H(rho) + H(N(rho)) - H(N^c(rho))`.
pub fn ea_capacity_with_budget(ch: &KrausChannel, budget: &OptimizerBudget) -> Result<OptimizationResult> {
    single_state(ch, budget, &|rho| {
        Ok(matrix_entropy(rho)? + matrix_entropy(&ch.apply_matrix(rho))?
            - matrix_entropy(&ch.complementary_matrix(rho))?)
    })
}

pub fn ea_capacity(ch: &KrausChannel) -> Result<Bits> {
    Ok(ea_capacity_with_budget(ch, &OptimizerBudget::default())?.value)
}

/// `max_rho H(N(rho)) - H(N^c(rho))`.
pub fn coherent_information_capacity_with_budget(
    ch: &KrausChannel,
    budget: &OptimizerBudget,
) -> Result<OptimizationResult> {
    single_state(ch, budget, &|rho| {
        Ok(matrix_entropy(&ch.apply_matrix(rho))? - matrix_entropy(&ch.complementary_matrix(rho))?)
    })
}

pub fn coherent_information_capacity(ch: &KrausChannel) -> Result<Bits> {
    Ok(coherent_information_capacity_with_budget(ch, &OptimizerBudget::default())?.value)
}

/// One-shot Holevo information, maximized over pure-state ensembles.
pub fn holevo_one_shot_with_result(ch: &KrausChannel, budget: &OptimizerBudget) -> Result<OptimizationResult> {
    check_channel(ch)?;
    let layout = EnsembleLayout {
        family: StateFamily::pure(ch.in_dim()),
        members: budget.max_states.unwrap_or_else(|| default_cap(ch)),
    };
    let obj = |m: &[(f64, Matrix)]| -> Result<f64> {
        let h = EnsembleEntropies::from_members(m.iter().map(|(p, r)| (*p, r)), ch)?;
        Ok(h.holevo())
    };
    run(layout, budget, budget.max_evaluations, &obj, &[], &|e| {
        Ok(entropic_triple(e, ch)?.holevo())
    })
}

pub fn holevo_one_shot(ch: &KrausChannel, budget: &OptimizerBudget) -> Result<Bits> {
    Ok(holevo_one_shot_with_result(ch, budget)?.value)
}

/// Two-copy value against twice the single-copy value.
#[derive(Clone, Debug, PartialEq)]
pub struct AdditivityGap {
    pub two_copy_value: Bits,
    pub single_doubled: Bits,
    pub single: OptimizationResult,
    pub two_copy: OptimizationResult,
}

impl AdditivityGap {
    /// `two_copy_value - single_doubled`; positive would indicate superadditivity.
    pub fn gap(&self) -> Bits {
        self.two_copy_value - self.single_doubled
    }
}

/// Optimizes `D_{lambda,mu}` for one and two channel uses. The product of the
/// single-copy argmax with itself is always a two-copy candidate, so
/// `two_copy_value >= single_doubled` up to rounding.
pub fn additivity_gap(ch: &KrausChannel, w: &TradeoffWeights, budget: &OptimizerBudget) -> Result<AdditivityGap> {
    if ch.in_dim() != 2 {
        return Err(Error::DimensionMismatch {
            context: "additivity probe expects a qubit-input channel",
            expected: 2,
            found: ch.in_dim(),
        });
    }
    let two = tensor_channel(ch, ch)?;
    let single = dcap_optimize(ch, w, budget)?;
    let product = single.argmax_ensemble.tensor(&single.argmax_ensemble)?;
    let two_budget = OptimizerBudget {
        max_states: Some(TWO_COPY_STATE_CAP),
        ..budget.clone()
    };
    let two_copy = dcap_optimize_with_candidates(&two, w, &two_budget, budget.two_copy_evaluations, &[product])?;
    Ok(AdditivityGap {
        two_copy_value: two_copy.value,
        single_doubled: 2.0 * single.value,
        single,
        two_copy,
    })
}
