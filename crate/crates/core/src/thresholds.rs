//! Maximum likelihood thresholds: bounds from generic ranks and exact values
//! from a randomised rank search.

use serde::Serialize;

use crate::augmented::{generic_rank, generic_rank_pair};
use crate::error::{Error, Result};
use crate::graph::ColouredDag;
use crate::structure::has_monochrome_edge;

pub const DEFAULT_TRIALS: usize = 3;

/// Closed interval [lo, hi].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Bounds {
    pub lo: usize,
    pub hi: usize,
}

impl Bounds {
    pub fn contains(&self, x: usize) -> bool {
        self.lo <= x && x <= self.hi
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ColourThresholds {
    pub colour: String,
    pub alpha: usize,
    pub beta: usize,
    /// Generic rank of the parent rows at one sample.
    pub parent_rank: usize,
    pub mlt_e: Option<usize>,
    pub mlt_u: Option<usize>,
    pub existence_bounds: Option<Bounds>,
    pub uniqueness_bounds: Option<Bounds>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ThresholdReport {
    pub colours: Vec<ColourThresholds>,
    pub mlt_e: Option<usize>,
    pub mlt_u: Option<usize>,
    pub existence_bounds: Option<Bounds>,
    pub uniqueness_bounds: Option<Bounds>,
    /// False when some edge joins two vertices of the same colour.
    pub bounds_applicable: bool,
    pub seed: u64,
    pub trials: usize,
}

/// Existence and uniqueness bounds for one colour, given α, β and the
/// generic rank r of the parent rows at one sample.
pub fn colour_bounds(alpha: usize, beta: usize, r: usize) -> (Bounds, Bounds) {
    let split = beta / alpha + 1;
    let existence = if alpha == 1 {
        Bounds {
            lo: beta + 1,
            hi: beta + 1,
        }
    } else {
        Bounds {
            lo: r.saturating_sub(1) / (alpha - 1) + 1,
            hi: split,
        }
    };
    // Tightened unless r = β + 1 − β/α exactly.
    let exact_middle = r * alpha + beta == (beta + 1) * alpha;
    let hi = if exact_middle {
        beta + 2 - r
    } else {
        beta + 1 - r
    };
    let uniqueness = Bounds { lo: split, hi };
    (existence, uniqueness)
}

fn validate(trials: usize) -> Result<()> {
    if trials == 0 {
        return Err(Error::InvalidConfig("trials must be at least 1".into()));
    }
    Ok(())
}

fn colour_rows(
    g: &ColouredDag,
    seed: u64,
    trials: usize,
    applicable: bool,
) -> Result<Vec<ColourThresholds>> {
    g.vertex_colours()
        .map(|s| {
            let alpha = g.alpha(s);
            let beta = g.beta(s);
            let parent_rank = generic_rank(g, s, 1, false, seed, trials)?;
            let (e, u) = colour_bounds(alpha, beta, parent_rank);
            Ok(ColourThresholds {
                colour: s.to_string(),
                alpha,
                beta,
                parent_rank,
                mlt_e: None,
                mlt_u: None,
                existence_bounds: applicable.then_some(e),
                uniqueness_bounds: applicable.then_some(u),
            })
        })
        .collect()
}

fn overall(
    rows: &[ColourThresholds],
    pick: impl Fn(&ColourThresholds) -> Option<Bounds>,
) -> Option<Bounds> {
    rows.iter()
        .map(&pick)
        .try_fold(Bounds { lo: 1, hi: 1 }, |acc, b| {
            b.map(|b| Bounds {
                lo: acc.lo.max(b.lo),
                hi: acc.hi.max(b.hi),
            })
        })
}

fn assemble(
    rows: Vec<ColourThresholds>,
    applicable: bool,
    seed: u64,
    trials: usize,
) -> ThresholdReport {
    let max_of = |f: fn(&ColourThresholds) -> Option<usize>| {
        rows.iter()
            .map(f)
            .try_fold(1usize, |acc, x| x.map(|x| acc.max(x)))
    };
    ThresholdReport {
        mlt_e: max_of(|r| r.mlt_e),
        mlt_u: max_of(|r| r.mlt_u),
        existence_bounds: overall(&rows, |r| r.existence_bounds),
        uniqueness_bounds: overall(&rows, |r| r.uniqueness_bounds),
        bounds_applicable: applicable,
        colours: rows,
        seed,
        trials,
    }
}

/// Bounds only. They are reported when the colouring has no monochrome edge.
pub fn threshold_bounds(g: &ColouredDag, seed: u64, trials: usize) -> Result<ThresholdReport> {
    g.require_compatible()?;
    validate(trials)?;
    let applicable = has_monochrome_edge(g).is_none();
    let rows = colour_rows(g, seed, trials, applicable)?;
    Ok(assemble(rows, applicable, seed, trials))
}

/// Exact thresholds from the generic ranks of M and M' at n = 1, 2, ...,
/// together with the bounds.
pub fn compute_thresholds(g: &ColouredDag, seed: u64, trials: usize) -> Result<ThresholdReport> {
    g.require_compatible()?;
    validate(trials)?;
    let applicable = has_monochrome_edge(g).is_none();
    let mut rows = colour_rows(g, seed, trials, applicable)?;
    for row in &mut rows {
        let limit = row.beta + 1;
        for n in 1..=limit {
            let (full, parents) = generic_rank_pair(g, &row.colour, n, seed, trials)?;
            if row.mlt_e.is_none() && full > parents {
                row.mlt_e = Some(n);
            }
            if full == row.beta + 1 {
                row.mlt_u = Some(n);
                break;
            }
        }
        if row.mlt_u.is_none() {
            return Err(Error::RankSearchExhausted {
                colour: row.colour.clone(),
                limit,
            });
        }
    }
    Ok(assemble(rows, applicable, seed, trials))
}
