//! Region bookkeeping for the two refinement strategies.
//!
//! Both strategies share one region store: leaves live in `slots` in
//! creation order and a split parent's slot is emptied. Final sums always
//! run over `slots` in index order, which keeps results bit-reproducible.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use super::rule::RuleEstimate;
use super::{QuadConfig, QuadError, QuadResult, Strategy};

/// A domain piece that can be measured and bisected.
pub trait Cell: Copy {
    fn measure(&self) -> f64;
    /// Splits in two. `axis_err` carries the per-axis error split of the
    /// region's estimate for cells that can choose a direction.
    fn bisect(&self, axis_err: [f64; 2]) -> (Self, Self);
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegionEstimate {
    pub value: Complex64,
    pub err_re: f64,
    pub err_im: f64,
    pub axis_err: [f64; 2],
}

impl RegionEstimate {
    pub fn from_rule(rule: &RuleEstimate) -> Self {
        let (err_re, err_im) = rule.component_errors();
        RegionEstimate { value: rule.kronrod, err_re, err_im, axis_err: rule.axis_err }
    }

    /// Scalar error used for ranking and acceptance.
    pub fn err(&self) -> f64 {
        self.err_re.max(self.err_im)
    }
}

#[derive(Clone, Copy, Debug)]
struct Leaf<C> {
    cell: C,
    est: RegionEstimate,
}

/// Heap entry: largest error first, lowest slot index on ties.
#[derive(Clone, Copy, Debug)]
struct Ranked {
    err: f64,
    slot: usize,
}

impl PartialEq for Ranked {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Ranked {}
impl PartialOrd for Ranked {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Ranked {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err
            .total_cmp(&other.err)
            .then_with(|| other.slot.cmp(&self.slot))
    }
}

enum Queue {
    Global(BinaryHeap<Ranked>),
    /// LIFO stack of slots awaiting a local accept/split decision.
    Local(Vec<usize>),
}

/// What one call to [`RegionSet::refine_step`] did.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Step<C> {
    /// The cell was bisected into two new leaves.
    Split(C),
    /// The cell met its local tolerance share (or the budget ran out) and
    /// was kept as a final leaf.
    Accepted(C),
    /// A local pass ended above tolerance; the budget was re-derived from
    /// the current total and over-budget leaves were requeued.
    Rebudgeted,
    /// Nothing left to do.
    Finished,
}

/// Adaptive subdivision state for one integral.
pub struct RegionSet<C> {
    strategy: Strategy,
    cfg: QuadConfig,
    slots: Vec<Option<Leaf<C>>>,
    live: usize,
    queue: Queue,
    total_measure: f64,
    /// Absolute error budget shared among regions by measure (local only).
    budget: f64,
    exhausted: bool,
    finished: bool,
    n_evals: usize,
    /// Incremental totals for the per-step stopping test; final results are
    /// re-summed in slot order.
    running: (Complex64, f64, f64),
}

impl<C: Cell> RegionSet<C> {
    /// Seeds the set with the root region and its estimate.
    pub fn new(cfg: &QuadConfig, root: C, est: RegionEstimate, evals: usize) -> Self {
        let mut set = RegionSet {
            strategy: cfg.strategy,
            cfg: *cfg,
            slots: Vec::new(),
            live: 0,
            queue: match cfg.strategy {
                Strategy::GlobalAdaptive => Queue::Global(BinaryHeap::new()),
                Strategy::LocalAdaptive => Queue::Local(Vec::new()),
            },
            total_measure: root.measure(),
            budget: cfg.tolerance(est.value.norm()),
            exhausted: false,
            finished: false,
            n_evals: evals,
            running: (Complex64::default(), 0.0, 0.0),
        };
        set.insert(root, est);
        set
    }

    fn insert(&mut self, cell: C, est: RegionEstimate) -> usize {
        let slot = self.slots.len();
        self.slots.push(Some(Leaf { cell, est }));
        self.live += 1;
        self.running.0 += est.value;
        self.running.1 += est.err_re;
        self.running.2 += est.err_im;
        match &mut self.queue {
            Queue::Global(heap) => heap.push(Ranked { err: est.err(), slot }),
            Queue::Local(stack) => stack.push(slot),
        }
        slot
    }

    fn share(&self, cell: &C) -> f64 {
        self.budget * cell.measure() / self.total_measure
    }

    /// Value and per-component error sums, in slot order.
    fn totals(&self) -> (Complex64, f64, f64) {
        let mut value = Complex64::default();
        let (mut err_re, mut err_im) = (0.0, 0.0);
        for leaf in self.slots.iter().flatten() {
            value += leaf.est.value;
            err_re += leaf.est.err_re;
            err_im += leaf.est.err_im;
        }
        (value, err_re, err_im)
    }

    fn within_tolerance(&self) -> bool {
        let (value, err_re, err_im) = self.totals();
        err_re.max(err_im) <= self.cfg.tolerance(value.norm())
    }

    /// Performs one refinement decision.
    ///
    /// Global: pops the leaf with the largest error and bisects it, unless
    /// the whole integral already meets tolerance or the region budget is
    /// spent. Local: pops the next pending leaf and splits it only if its
    /// error exceeds its measure-proportional share of the budget.
    pub fn refine_step<E>(&mut self, estimate: &mut E) -> Result<Step<C>, QuadError>
    where
        E: FnMut(&C) -> Result<(RegionEstimate, usize), QuadError>,
    {
        if self.finished {
            return Ok(Step::Finished);
        }
        match self.strategy {
            Strategy::GlobalAdaptive => self.global_step(estimate),
            Strategy::LocalAdaptive => self.local_step(estimate),
        }
    }

    fn split<E>(&mut self, slot: usize, estimate: &mut E) -> Result<C, QuadError>
    where
        E: FnMut(&C) -> Result<(RegionEstimate, usize), QuadError>,
    {
        let leaf = self.slots[slot].expect("split of a dead slot");
        let (left, right) = leaf.cell.bisect(leaf.est.axis_err);
        let (est_l, n_l) = estimate(&left)?;
        let (est_r, n_r) = estimate(&right)?;
        self.n_evals += n_l + n_r;
        self.slots[slot] = None;
        self.live -= 1;
        self.running.0 -= leaf.est.value;
        self.running.1 -= leaf.est.err_re;
        self.running.2 -= leaf.est.err_im;
        // Local processes the stack LIFO; push right first so left runs first.
        if matches!(self.queue, Queue::Local(_)) {
            self.insert(right, est_r);
            self.insert(left, est_l);
        } else {
            self.insert(left, est_l);
            self.insert(right, est_r);
        }
        Ok(leaf.cell)
    }

    fn global_step<E>(&mut self, estimate: &mut E) -> Result<Step<C>, QuadError>
    where
        E: FnMut(&C) -> Result<(RegionEstimate, usize), QuadError>,
    {
        let (value, err_re, err_im) = self.running;
        if err_re.max(err_im) <= self.cfg.tolerance(value.norm()) && self.within_tolerance() {
            self.finished = true;
            return Ok(Step::Finished);
        }
        if self.live >= self.cfg.max_regions {
            self.exhausted = true;
            self.finished = true;
            return Ok(Step::Finished);
        }
        let top = match &mut self.queue {
            Queue::Global(heap) => heap.pop(),
            Queue::Local(_) => unreachable!(),
        };
        let Some(Ranked { slot, .. }) = top else {
            self.finished = true;
            return Ok(Step::Finished);
        };
        let cell = self.split(slot, estimate)?;
        Ok(Step::Split(cell))
    }

    fn local_step<E>(&mut self, estimate: &mut E) -> Result<Step<C>, QuadError>
    where
        E: FnMut(&C) -> Result<(RegionEstimate, usize), QuadError>,
    {
        let next = match &mut self.queue {
            Queue::Local(stack) => stack.pop(),
            Queue::Global(_) => unreachable!(),
        };
        let Some(slot) = next else {
            return Ok(self.rebudget());
        };
        let leaf = self.slots[slot].expect("pending slot must be live");
        if leaf.est.err() <= self.share(&leaf.cell) {
            return Ok(Step::Accepted(leaf.cell));
        }
        if self.live >= self.cfg.max_regions {
            self.exhausted = true;
            return Ok(Step::Accepted(leaf.cell));
        }
        let cell = self.split(slot, estimate)?;
        Ok(Step::Split(cell))
    }

    /// End of a local pass: stop if the result meets tolerance against its
    /// own value, otherwise re-derive the budget from the current total and
    /// requeue every leaf that now exceeds its share.
    fn rebudget(&mut self) -> Step<C> {
        if self.exhausted || self.within_tolerance() {
            self.finished = true;
            return Step::Finished;
        }
        let (value, _, _) = self.totals();
        self.budget = self.cfg.tolerance(value.norm());
        let pending: Vec<usize> = self
            .slots
            .iter()
            .enumerate()
            .rev()
            .filter_map(|(i, s)| s.as_ref().map(|leaf| (i, leaf)))
            .filter(|(_, leaf)| leaf.est.err() > self.share(&leaf.cell))
            .map(|(i, _)| i)
            .collect();
        if pending.is_empty() {
            self.finished = true;
            return Step::Finished;
        }
        if let Queue::Local(stack) = &mut self.queue {
            stack.extend(pending);
        }
        Step::Rebudgeted
    }

    /// Runs refinement to completion.
    pub fn run<E>(mut self, estimate: &mut E) -> Result<QuadResult, QuadError>
    where
        E: FnMut(&C) -> Result<(RegionEstimate, usize), QuadError>,
    {
        while !matches!(self.refine_step(estimate)?, Step::Finished) {}
        Ok(self.result())
    }

    pub fn result(&self) -> QuadResult {
        let (value, err_re, err_im) = self.totals();
        let err_est = err_re.max(err_im);
        QuadResult {
            value,
            err_est,
            n_evals: self.n_evals,
            n_regions: self.live,
            converged: err_est <= self.cfg.tolerance(value.norm()),
        }
    }

    pub fn live_regions(&self) -> usize {
        self.live
    }
}
