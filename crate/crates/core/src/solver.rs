//! The subdivision solver: a width-ordered breadth-first queue of aligned
//! boxes, an exclusion test, a Jacobian gate, and an inner refinement loop
//! that confirms a root with the Miranda test and outputs the doubled box.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::dyadic::{Dyadic, RoundingContext};
use crate::error::SolveError;
use crate::geometry::{dilate_box, AlignedBox, Dilation, Roi, DEPTH_LIMIT};
use crate::linalg::IntervalVector;
use crate::predicates::{test_c0, test_jc, test_jc_strict, test_mk, FaceMargin, PredicateOutcome};
use crate::system::{eval_point_certified, FunctionSystem};

/// Which Jacobian test gates the inner loop.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JacobianMode {
    /// Interval determinant of the Jacobian on `3B`.
    #[default]
    Jc,
    /// Strict determinant test on `3B` together with the Miranda test on
    /// `(3/2)B`; both together certify exactly one root in `3B`.
    Jcs,
}

impl fmt::Display for JacobianMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            JacobianMode::Jc => "jc",
            JacobianMode::Jcs => "jcs",
        })
    }
}

impl FromStr for JacobianMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "jc" => Ok(JacobianMode::Jc),
            "jcs" => Ok(JacobianMode::Jcs),
            _ => Err(format!("unknown Jacobian test `{s}` (expected jc or jcs)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub max_depth: u32,
    pub ctx: RoundingContext,
    pub jacobian_mode: JacobianMode,
    pub stats_enabled: bool,
}

impl SolverConfig {
    pub const DEFAULT_MAX_DEPTH: u32 = 40;

    pub fn validate(&self) -> Result<(), SolveError> {
        if self.max_depth == 0 || self.max_depth > DEPTH_LIMIT {
            return Err(SolveError::Config(format!(
                "max depth must be between 1 and {DEPTH_LIMIT}, got {}",
                self.max_depth
            )));
        }
        if self.ctx.precision_bits < 2 || self.ctx.precision_bits > self.ctx.max_precision_bits {
            return Err(SolveError::Config(format!(
                "precision {} outside [2, {}]",
                self.ctx.precision_bits, self.ctx.max_precision_bits
            )));
        }
        Ok(())
    }
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            max_depth: Self::DEFAULT_MAX_DEPTH,
            ctx: RoundingContext::default(),
            jacobian_mode: JacobianMode::Jc,
            stats_enabled: false,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredicateStats {
    pub calls: u64,
    pub successes: u64,
}

impl PredicateStats {
    fn record(&mut self, outcome: &PredicateOutcome) -> bool {
        self.calls += 1;
        self.successes += outcome.success as u64;
        outcome.success
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolverStats {
    pub c0: PredicateStats,
    pub jacobian: PredicateStats,
    pub mk: PredicateStats,
    /// Boxes popped from the outer queue.
    pub boxes_processed: u64,
    /// Boxes examined by inner loops, excluding the ancestor itself.
    pub inner_boxes_processed: u64,
    pub discarded: u64,
    pub max_depth_reached: u32,
    /// Interval form evaluations across all predicates.
    pub evaluations: u64,
    /// Not serialized, so reports of identical runs compare equal.
    #[serde(skip)]
    pub wall_time: Duration,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Complete,
    DepthExceeded,
}

/// An isolating box `2B'` with its provenance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputBox {
    pub region: IntervalVector,
    /// The aligned box `B'` whose doubling is output.
    pub generator: AlignedBox,
    /// The outer box `B` that passed the Jacobian gate.
    pub ancestor: AlignedBox,
    pub jacobian_test: JacobianMode,
    pub margins: Vec<FaceMargin>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fate {
    Excluded,
    Subdivided,
    JacobianPassed,
    InnerExcluded,
    InnerSubdivided,
    Output,
    Discarded,
    Undecided,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub cell: AlignedBox,
    pub fate: Fate,
    /// For `Output` and `Discarded`: index of the output box involved.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<usize>,
}

/// A box on which the strict Jacobian test and the Miranda test on its
/// `3/2`-dilation both succeeded.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairingEvent {
    pub cell: AlignedBox,
    /// `3B`, which holds exactly one root.
    pub region: IntervalVector,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsolationOutput {
    pub roi: Roi,
    pub config: SolverConfig,
    pub status: Status,
    pub boxes: Vec<OutputBox>,
    pub undecided: Vec<AlignedBox>,
    pub stats: SolverStats,
    pub trace: Vec<TraceEntry>,
    pub pairings: Vec<PairingEvent>,
}

struct Run<'a> {
    sys: &'a FunctionSystem,
    roi: &'a Roi,
    cfg: SolverConfig,
    queue: BTreeMap<(u32, u64), AlignedBox>,
    seq: u64,
    out: IsolationOutput,
}

impl Run<'_> {
    fn push(&mut self, b: AlignedBox) {
        self.queue.insert((b.depth, self.seq), b);
        self.seq += 1;
    }

    fn trace(&mut self, cell: &AlignedBox, fate: Fate, output: Option<usize>) {
        if self.cfg.stats_enabled {
            self.out.trace.push(TraceEntry {
                cell: cell.clone(),
                fate,
                output,
            });
        }
    }

    fn seen(&mut self, b: &AlignedBox) {
        let s = &mut self.out.stats;
        s.max_depth_reached = s.max_depth_reached.max(b.depth);
    }

    fn c0(&mut self, real: &IntervalVector) -> bool {
        let o = test_c0(self.sys, real, &self.cfg.ctx);
        self.out.stats.evaluations += o.evaluations;
        self.out.stats.c0.record(&o)
    }

    fn mk(&mut self, real: &IntervalVector) -> PredicateOutcome {
        let o = test_mk(self.sys, real, &self.cfg.ctx);
        self.out.stats.evaluations += o.evaluations;
        self.out.stats.mk.record(&o);
        o
    }

    fn gate(&mut self, b: &AlignedBox, real: &IntervalVector) -> bool {
        let ctx = self.cfg.ctx;
        match self.cfg.jacobian_mode {
            JacobianMode::Jc => {
                let o = test_jc(self.sys, real, &ctx);
                self.out.stats.evaluations += o.evaluations;
                self.out.stats.jacobian.record(&o)
            }
            JacobianMode::Jcs => {
                let o = test_jc_strict(self.sys, real, &ctx);
                self.out.stats.evaluations += o.evaluations;
                if !self.out.stats.jacobian.record(&o) {
                    return false;
                }
                let mk = self.mk(&dilate_box(real, Dilation::ThreeHalves));
                if mk.success {
                    self.out.pairings.push(PairingEvent {
                        cell: b.clone(),
                        region: dilate_box(real, Dilation::Three),
                    });
                }
                mk.success
            }
        }
    }

    fn run(mut self) -> IsolationOutput {
        self.push(self.roi.root_box());
        while let Some((_, b)) = self.queue.pop_first() {
            self.out.stats.boxes_processed += 1;
            self.seen(&b);
            let real = b.realize(self.roi);
            if self.c0(&real) {
                self.trace(&b, Fate::Excluded, None);
                continue;
            }
            if !self.gate(&b, &real) {
                match b.subdivide(self.cfg.max_depth) {
                    Ok(kids) => {
                        self.trace(&b, Fate::Subdivided, None);
                        kids.into_iter().for_each(|k| self.push(k));
                    }
                    Err(_) => {
                        self.trace(&b, Fate::Undecided, None);
                        self.out.undecided.push(b);
                    }
                }
                continue;
            }
            self.trace(&b, Fate::JacobianPassed, None);
            self.refine(&b, &real);
        }
        if !self.out.undecided.is_empty() {
            self.out.status = Status::DepthExceeded;
        }
        self.out
    }

    /// Inner loop under an ancestor that passed the Jacobian gate: at most
    /// one root lies in `3B`, so the first Miranda success settles it.
    fn refine(&mut self, ancestor: &AlignedBox, ancestor_real: &IntervalVector) {
        let undecided_before = self.out.undecided.len();
        let mut inner = VecDeque::from([ancestor.clone()]);
        let mut first = true;
        while let Some(bp) = inner.pop_front() {
            let real = if first {
                ancestor_real.clone()
            } else {
                bp.realize(self.roi)
            };
            if !first {
                self.out.stats.inner_boxes_processed += 1;
                self.seen(&bp);
                // the ancestor has already failed C0
                if self.c0(&real) {
                    self.trace(&bp, Fate::InnerExcluded, None);
                    continue;
                }
            }
            first = false;
            let mk = self.mk(&real);
            if mk.success {
                self.emit(ancestor, bp, &real, mk.margins);
                // the unique root in 3B is isolated; nothing else in B can hold one
                self.out.undecided.truncate(undecided_before);
                return;
            }
            match bp.subdivide(self.cfg.max_depth) {
                Ok(kids) => {
                    self.trace(&bp, Fate::InnerSubdivided, None);
                    inner.extend(kids);
                }
                Err(_) => {
                    self.trace(&bp, Fate::Undecided, None);
                    self.out.undecided.push(bp);
                }
            }
        }
    }

    fn emit(&mut self, ancestor: &AlignedBox, generator: AlignedBox, real: &IntervalVector, margins: Vec<FaceMargin>) {
        let index = self.out.boxes.len();
        self.trace(&generator, Fate::Output, Some(index));
        self.out.boxes.push(OutputBox {
            region: dilate_box(real, Dilation::Two),
            generator,
            ancestor: ancestor.clone(),
            jacobian_test: self.cfg.jacobian_mode,
            margins,
        });
        let mut dropped = Vec::new();
        self.queue.retain(|_, q| {
            let inside = q.contained_in_dilated(ancestor, Dilation::Three);
            if inside {
                dropped.push(q.clone());
            }
            !inside
        });
        self.out.stats.discarded += dropped.len() as u64;
        for q in &dropped {
            self.trace(q, Fate::Discarded, Some(index));
        }
    }
}

/// Isolates the simple roots of `sys` in `roi`. Every root in the ROI ends
/// up in exactly one output box when the status is `Complete`; output boxes
/// may reach into `2 * roi`.
pub fn isolate(sys: &FunctionSystem, roi: &Roi, cfg: &SolverConfig) -> Result<IsolationOutput, SolveError> {
    cfg.validate()?;
    if sys.dim() != roi.dim() {
        return Err(SolveError::DimensionMismatch {
            system: sys.dim(),
            roi: roi.dim(),
        });
    }
    let center = roi.to_box().mid();
    let tol = roi.width().clone();
    for f in sys.components() {
        eval_point_certified(f, &center, &tol, &cfg.ctx).map_err(SolveError::Domain)?;
    }
    let start = Instant::now();
    let run = Run {
        sys,
        roi,
        cfg: *cfg,
        queue: BTreeMap::new(),
        seq: 0,
        out: IsolationOutput {
            roi: roi.clone(),
            config: *cfg,
            status: Status::Complete,
            boxes: Vec::new(),
            undecided: Vec::new(),
            stats: SolverStats::default(),
            trace: Vec::new(),
            pairings: Vec::new(),
        },
    };
    let mut out = run.run();
    out.stats.wall_time = start.elapsed();
    Ok(out)
}

/// Realized width of an output box's generator.
pub fn generator_width(out: &IsolationOutput, b: &OutputBox) -> Dyadic {
    b.generator.width(&out.roi)
}

/// Default working context, with the precision taken from `bits`.
pub fn context_with_precision(bits: u32) -> RoundingContext {
    RoundingContext::default().with_precision(bits)
}
