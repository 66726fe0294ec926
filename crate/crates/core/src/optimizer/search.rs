use std::cmp::Ordering;
use std::fmt;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{Evaluator, Objective, ObjectiveKind, SearchConfig};
use crate::designs::{concatenate, ComarsDesign, LowerState, ScreeningDesign};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Move {
    /// Random starting state.
    Start,
    Flip(usize),
    Swap(usize, usize),
    /// Accepted VNS shake of the given neighborhood.
    Shake(u8),
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Move::Start => f.write_str("start"),
            Move::Flip(j) => write!(f, "flip({})", j + 1),
            Move::Swap(j, k) => write!(f, "swap({},{})", j + 1, k + 1),
            Move::Shake(k) => write!(f, "shake(k={k})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CcOutcome {
    pub state: LowerState,
    pub objective: Objective,
    /// Accepted moves.
    pub passes: usize,
    pub bound_hit: bool,
    /// Objective after each accepted move.
    pub trace: Vec<(Move, Objective)>,
}

fn apply(s: &LowerState, mv: Move) -> LowerState {
    let mut next = s.clone();
    match mv {
        Move::Flip(j) => next.flip(j),
        Move::Swap(j, k) => next.swap(j, k),
        Move::Start | Move::Shake(_) => {}
    }
    next
}

/// Best-improvement local search over all single sign flips and all position
/// swaps. Each pass applies the best strictly improving move (first in scan
/// order on ties) and the search stops after a pass without one, or after
/// `max_passes` accepted moves.
pub fn cc_search(evaluator: &Evaluator, s0: &LowerState, kind: ObjectiveKind, max_passes: usize) -> Result<CcOutcome> {
    let m = evaluator.factors();
    let moves: Vec<Move> =
        (0..m).map(Move::Flip).chain((0..m).flat_map(|j| (j + 1..m).map(move |k| Move::Swap(j, k)))).collect();
    let mut state = s0.clone();
    let mut objective = evaluator.objective(&state, kind)?;
    let mut trace = Vec::new();
    loop {
        if trace.len() >= max_passes {
            return Ok(CcOutcome { state, objective, passes: trace.len(), bound_hit: true, trace });
        }
        let mut best: Option<(Move, LowerState, Objective)> = None;
        for &mv in &moves {
            let candidate = apply(&state, mv);
            let value = evaluator.objective(&candidate, kind)?;
            let incumbent = best.as_ref().map_or(&objective, |b| &b.2);
            if value.is_better_than(incumbent) {
                best = Some((mv, candidate, value));
            }
        }
        let Some((mv, next, value)) = best else {
            return Ok(CcOutcome { state, objective, passes: trace.len(), bound_hit: false, trace });
        };
        state = next;
        objective = value.clone();
        trace.push((mv, value));
    }
}

/// Random perturbation of neighborhood `k`: one fold, two folds, one
/// transposition, or one three-cycle.
pub fn vns_shake<R: Rng + ?Sized>(s: &LowerState, k: u8, rng: &mut R) -> LowerState {
    assert!((1..=4).contains(&k), "shake neighborhood must be 1..=4, got {k}");
    let m = s.factors();
    let mut next = s.clone();
    match k {
        1 => next.flip(rng.gen_range(0..m)),
        2 => sample(rng, m, 2).iter().for_each(|j| next.flip(j)),
        3 => {
            let p = sample(rng, m, 2);
            next.swap(p.index(0), p.index(1));
        }
        _ => {
            let p = sample(rng, m, 3);
            next.rotate3(p.index(0), p.index(1), p.index(2));
        }
    }
    next
}

/// One accepted move of a restart.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LogEntry {
    pub restart: usize,
    pub step: Move,
    pub objective: Objective,
}

impl fmt::Display for LogEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "restart={} move={} {}", self.restart, self.step, self.objective)
    }
}

#[derive(Debug, Clone)]
struct RestartOutcome {
    restart: usize,
    state: LowerState,
    objective: Objective,
    bound_hit: bool,
    log: Vec<LogEntry>,
}

fn run_restart(evaluator: &Evaluator, config: &SearchConfig, restart: usize) -> Result<RestartOutcome> {
    let kind = config.objective;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ restart as u64);
    let start = LowerState::random(evaluator.factors(), &mut rng);
    let mut log = vec![LogEntry { restart, step: Move::Start, objective: evaluator.objective(&start, kind)? }];
    let record = |log: &mut Vec<LogEntry>, trace: &[(Move, Objective)]| {
        log.extend(trace.iter().map(|(step, objective)| LogEntry {
            restart,
            step: *step,
            objective: objective.clone(),
        }));
    };

    let mut best = cc_search(evaluator, &start, kind, config.max_cc_passes)?;
    let mut bound_hit = best.bound_hit;
    record(&mut log, &best.trace);
    let mut k = 1u8;
    while k <= 4 {
        let shaken = vns_shake(&best.state, k, &mut rng);
        let local = cc_search(evaluator, &shaken, kind, config.max_cc_passes)?;
        bound_hit |= local.bound_hit;
        if local.objective.is_better_than(&best.objective) {
            log.push(LogEntry { restart, step: Move::Shake(k), objective: evaluator.objective(&shaken, kind)? });
            record(&mut log, &local.trace);
            best = local;
            k = 1;
        } else {
            k += 1;
        }
    }
    Ok(RestartOutcome { restart, state: best.state, objective: best.objective, bound_hit, log })
}

#[derive(Debug, Clone)]
pub struct OptimizeResult {
    pub design: ComarsDesign,
    pub objective: Objective,
    pub state: LowerState,
    /// Restart that produced the best design.
    pub restart: usize,
    /// Whether any CC run stopped at the pass bound.
    pub bound_hit: bool,
    /// Accepted moves of all restarts, in restart order.
    pub log: Vec<LogEntry>,
}

/// Runs `config.restarts` independent CC/VNS restarts; restart `r` is seeded
/// with `seed ^ r`. The best objective wins, ties going to the lowest restart,
/// so the result does not depend on scheduling.
pub fn optimize(
    d1: &ScreeningDesign,
    d2: &ScreeningDesign,
    n0: usize,
    config: &SearchConfig,
) -> Result<OptimizeResult> {
    if config.restarts == 0 {
        return Err(Error::InvalidState("at least one restart is required".into()));
    }
    let evaluator = Evaluator::new(d1, d2)?;
    let run = || -> Result<Vec<RestartOutcome>> {
        (0..config.restarts).into_par_iter().map(|r| run_restart(&evaluator, config, r)).collect()
    };
    let outcomes = match config.threads {
        Some(threads) => rayon::ThreadPoolBuilder::new()
            .num_threads(threads.max(1))
            .build()
            .map_err(|e| Error::InvalidState(format!("thread pool: {e}")))?
            .install(run)?,
        None => run()?,
    };
    let bound_hit = outcomes.iter().any(|o| o.bound_hit);
    let best = outcomes
        .iter()
        .min_by(|a, b| a.objective.compare(&b.objective).then(a.restart.cmp(&b.restart)))
        .expect("at least one restart");
    let design = concatenate(d1, d2, &best.state, n0)?;
    Ok(OptimizeResult {
        design,
        objective: best.objective.clone(),
        state: best.state.clone(),
        restart: best.restart,
        bound_hit,
        log: outcomes.iter().flat_map(|o| o.log.iter().cloned()).collect(),
    })
}

#[derive(Debug, Clone)]
pub struct PairingResult {
    pub best: OptimizeResult,
    /// Indices of the upper and lower parents of the best design.
    pub pairing: (usize, usize),
    /// Best objective of every pairing tried.
    pub candidates: Vec<((usize, usize), Objective)>,
}

/// With one parent optimizes `(D, D)`; with two, `(D1, D1)`, `(D2, D2)` and
/// `(D1, D2)`, keeping the best (earliest pairing on ties).
pub fn optimize_pairings(parents: &[ScreeningDesign], n0: usize, config: &SearchConfig) -> Result<PairingResult> {
    let pairings: &[(usize, usize)] = match parents {
        [_] => &[(0, 0)],
        [a, b] => {
            if a.entries().dim() != b.entries().dim() {
                return Err(Error::DimensionMismatch {
                    expected: format!("{:?}", a.entries().dim()),
                    found: format!("{:?}", b.entries().dim()),
                });
            }
            &[(0, 0), (1, 1), (0, 1)]
        }
        _ => return Err(Error::InvalidState(format!("expected one or two parents, got {}", parents.len()))),
    };
    let mut best: Option<(OptimizeResult, (usize, usize))> = None;
    let mut candidates = Vec::new();
    for &(i, j) in pairings {
        let result = optimize(&parents[i], &parents[j], n0, config)?;
        candidates.push(((i, j), result.objective.clone()));
        let improves = best.as_ref().is_none_or(|(b, _)| result.objective.compare(&b.objective) == Ordering::Less);
        if improves {
            best = Some((result, (i, j)));
        }
    }
    let (best, pairing) = best.expect("at least one pairing");
    Ok(PairingResult { best, pairing, candidates })
}
