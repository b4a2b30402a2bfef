//! Serializable summary of an isolation run. Hex dyadic strings are the
//! normative endpoints; decimal strings are exact expansions for reading.

use serde::{Deserialize, Serialize};

use crate::dyadic::Dyadic;
use crate::geometry::AlignedBox;
use crate::interval::Interval;
use crate::linalg::IntervalVector;
use crate::predicates::FaceMargin;
use crate::solver::{IsolationOutput, JacobianMode, SolverStats, Status, TraceEntry};
use crate::system::FunctionSystem;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Endpoint {
    pub lo: Dyadic,
    pub hi: Dyadic,
    pub lo_decimal: String,
    pub hi_decimal: String,
}

impl Endpoint {
    pub fn from_interval(i: &Interval) -> Self {
        Endpoint {
            lo: i.lo().clone(),
            hi: i.hi().clone(),
            lo_decimal: i.lo().to_decimal_exact(),
            hi_decimal: i.hi().to_decimal_exact(),
        }
    }

    pub fn to_interval(&self) -> Interval {
        Interval::new(self.lo.clone(), self.hi.clone())
    }
}

fn endpoints(b: &IntervalVector) -> Vec<Endpoint> {
    b.iter().map(Endpoint::from_interval).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificates {
    pub jacobian_test: JacobianMode,
    pub miranda_margins: Vec<FaceMargin>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxRecord {
    pub index: usize,
    /// The isolating box `2B'`.
    pub region: Vec<Endpoint>,
    pub generator: AlignedBox,
    pub ancestor: AlignedBox,
    pub certificates: Certificates,
}

impl BoxRecord {
    pub fn region(&self) -> IntervalVector {
        IntervalVector::new(self.region.iter().map(Endpoint::to_interval).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub max_depth: u32,
    pub precision_bits: u32,
    pub max_precision_bits: u32,
    pub jacobian_test: JacobianMode,
    pub stats: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub status: Status,
    pub boxes: usize,
    pub undecided: usize,
    pub boxes_processed: u64,
    pub max_depth_reached: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsolationReport {
    pub variables: Vec<String>,
    pub system: Vec<String>,
    pub roi: Vec<Endpoint>,
    pub config: ConfigEcho,
    pub boxes: Vec<BoxRecord>,
    pub undecided: Vec<AlignedBox>,
    pub summary: Summary,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stats: Option<SolverStats>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub trace: Vec<TraceEntry>,
}

impl IsolationReport {
    pub fn new(sys: &FunctionSystem, out: &IsolationOutput) -> Self {
        let cfg = &out.config;
        IsolationReport {
            variables: sys.names().to_vec(),
            system: sys.components().iter().map(|e| e.render(sys.names())).collect(),
            roi: endpoints(&out.roi.to_box()),
            config: ConfigEcho {
                max_depth: cfg.max_depth,
                precision_bits: cfg.ctx.precision_bits,
                max_precision_bits: cfg.ctx.max_precision_bits,
                jacobian_test: cfg.jacobian_mode,
                stats: cfg.stats_enabled,
            },
            boxes: out
                .boxes
                .iter()
                .enumerate()
                .map(|(index, b)| BoxRecord {
                    index,
                    region: endpoints(&b.region),
                    generator: b.generator.clone(),
                    ancestor: b.ancestor.clone(),
                    certificates: Certificates {
                        jacobian_test: b.jacobian_test,
                        miranda_margins: b.margins.clone(),
                    },
                })
                .collect(),
            undecided: out.undecided.clone(),
            summary: Summary {
                status: out.status,
                boxes: out.boxes.len(),
                undecided: out.undecided.len(),
                boxes_processed: out.stats.boxes_processed,
                max_depth_reached: out.stats.max_depth_reached,
            },
            stats: cfg.stats_enabled.then(|| out.stats.clone()),
            trace: out.trace.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }

    /// Human-readable rendering, one line per box and a summary line.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for b in &self.boxes {
            let sides: Vec<String> = b
                .region
                .iter()
                .map(|e| format!("[{}, {}]", e.lo.to_f64(), e.hi.to_f64()))
                .collect();
            s.push_str(&format!(
                "box {}: {}  depth {} via {}\n",
                b.index,
                sides.join(" x "),
                b.generator.depth,
                b.certificates.jacobian_test
            ));
        }
        for u in &self.undecided {
            s.push_str(&format!("undecided: depth {} at {:?}\n", u.depth, u.coords));
        }
        let status = match self.summary.status {
            Status::Complete => "complete",
            Status::DepthExceeded => "depth_exceeded",
        };
        s.push_str(&format!(
            "status {status}: {} boxes, {} undecided, {} processed, max depth {}\n",
            self.summary.boxes, self.summary.undecided, self.summary.boxes_processed, self.summary.max_depth_reached
        ));
        s
    }
}
