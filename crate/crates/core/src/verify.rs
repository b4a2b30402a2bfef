//! Post-hoc checks of an isolation result: disjointness, containment in
//! `2 * roi`, and agreement with independently known roots.

use serde::{Deserialize, Serialize};

use crate::geometry::{dilate_box, Dilation};
use crate::linalg::IntervalVector;
use crate::predicates::test_c0;
use crate::solver::{Fate, IsolationOutput};
use crate::system::FunctionSystem;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// Generators nest or overlap as aligned boxes.
    GeneratorOverlap {
        first: usize,
        second: usize,
    },
    /// Realized output boxes share interior points.
    RegionOverlap {
        first: usize,
        second: usize,
    },
    OutsideDoubledRoi {
        index: usize,
    },
    /// A known root in the ROI lies in no output box.
    MissedRoot {
        root: usize,
    },
    /// A known root lies in more than one output box.
    RootInSeveralBoxes {
        root: usize,
        boxes: Vec<usize>,
    },
    /// An output box holds a number of known roots other than one.
    WrongRootCount {
        index: usize,
        count: usize,
    },
    /// A root enclosure straddles an output box boundary, so membership
    /// cannot be decided.
    AmbiguousRoot {
        root: usize,
        index: usize,
    },
    /// A traced discard that neither passes the exclusion test nor lies in
    /// `3B` of the output it is attributed to.
    UnjustifiedDiscard {
        trace_index: usize,
    },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub boxes: usize,
    pub roots_checked: usize,
    pub violations: Vec<Violation>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

enum Membership {
    Inside,
    Outside,
    Straddles,
}

fn membership(root: &IntervalVector, region: &IntervalVector) -> Membership {
    if root.is_subset_of(region) {
        Membership::Inside
    } else if root
        .iter()
        .zip(region.iter())
        .any(|(r, b)| r.hi() < b.lo() || b.hi() < r.lo())
    {
        Membership::Outside
    } else {
        Membership::Straddles
    }
}

/// Checks the guarantees of a complete isolation run. `known_roots` are
/// small enclosures, each holding one root; they may lie anywhere, only
/// those meeting the ROI are required to be found.
pub fn verify_isolation(
    out: &IsolationOutput,
    sys: &FunctionSystem,
    known_roots: Option<&[IntervalVector]>,
) -> VerificationReport {
    let mut violations = Vec::new();
    let boxes = &out.boxes;
    for (i, a) in boxes.iter().enumerate() {
        for (j, b) in boxes.iter().enumerate().skip(i + 1) {
            if a.generator.interiors_overlap(&b.generator) {
                violations.push(Violation::GeneratorOverlap { first: i, second: j });
            }
            if a.region.interiors_overlap(&b.region) {
                violations.push(Violation::RegionOverlap { first: i, second: j });
            }
        }
    }
    let doubled = dilate_box(&out.roi.to_box(), Dilation::Two);
    for (i, b) in boxes.iter().enumerate() {
        if !b.region.is_subset_of(&doubled) {
            violations.push(Violation::OutsideDoubledRoi { index: i });
        }
    }

    let roi_box = out.roi.to_box();
    let mut roots_checked = 0;
    if let Some(roots) = known_roots {
        roots_checked = roots.len();
        let mut per_box = vec![0usize; boxes.len()];
        for (r, root) in roots.iter().enumerate() {
            let mut hits = Vec::new();
            for (i, b) in boxes.iter().enumerate() {
                match membership(root, &b.region) {
                    Membership::Inside => hits.push(i),
                    Membership::Outside => {}
                    Membership::Straddles => violations.push(Violation::AmbiguousRoot { root: r, index: i }),
                }
            }
            for &i in &hits {
                per_box[i] += 1;
            }
            let in_roi = !matches!(membership(root, &roi_box), Membership::Outside);
            if hits.is_empty() && in_roi && out.status == crate::solver::Status::Complete {
                violations.push(Violation::MissedRoot { root: r });
            }
            if hits.len() > 1 {
                violations.push(Violation::RootInSeveralBoxes { root: r, boxes: hits });
            }
        }
        for (i, &count) in per_box.iter().enumerate() {
            if count != 1 {
                violations.push(Violation::WrongRootCount { index: i, count });
            }
        }
    }

    for (t, entry) in out.trace.iter().enumerate() {
        if entry.fate != Fate::Discarded {
            continue;
        }
        let justified = entry
            .output
            .and_then(|o| boxes.get(o))
            .is_some_and(|b| entry.cell.contained_in_dilated(&b.ancestor, Dilation::Three))
            || test_c0(sys, &entry.cell.realize(&out.roi), &out.config.ctx).success;
        if !justified {
            violations.push(Violation::UnjustifiedDiscard { trace_index: t });
        }
    }

    VerificationReport {
        boxes: boxes.len(),
        roots_checked,
        violations,
    }
}
