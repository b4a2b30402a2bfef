//! Hypercube region of interest and the aligned boxes obtained from it by
//! repeated `2^n`-ary subdivision, encoded by depth and integer coordinates.

use serde::{Deserialize, Serialize};

use crate::dyadic::{Dyadic, Round};
use crate::error::{GeometryError, ParseError};
use crate::interval::Interval;
use crate::linalg::IntervalVector;

/// Coordinates are stored in `u64`, which bounds the usable depth.
pub const DEPTH_LIMIT: u32 = 62;

/// Bits used when a decimal ROI bound has to be rounded to a dyadic.
const ROI_ROUNDING_BITS: u32 = 128;

/// The region of interest `B_0`: a hypercube with dyadic corner and width.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Roi {
    lo: Vec<Dyadic>,
    width: Dyadic,
}

impl Roi {
    pub fn new(lo: Vec<Dyadic>, width: Dyadic) -> Result<Self, GeometryError> {
        if !width.is_positive() || lo.is_empty() {
            return Err(GeometryError::EmptyRoi);
        }
        Ok(Roi { lo, width })
    }

    /// Hypercube from per-axis intervals, which must share one width.
    pub fn from_intervals(sides: &[Interval]) -> Result<Self, GeometryError> {
        let first = sides.first().ok_or(GeometryError::EmptyRoi)?;
        let width = first.width();
        if sides.iter().any(|s| s.width() != width) {
            return Err(GeometryError::NonCubicRoi);
        }
        Roi::new(sides.iter().map(|s| s.lo().clone()).collect(), width)
    }

    /// Hypercube from decimal or hexadecimal literals. Bounds without a
    /// finite binary expansion are rounded outward; the returned note says
    /// so. Cubicity is checked on the exact values.
    pub fn from_literals(bounds: &[(String, String)]) -> Result<(Self, Option<String>), ParseError> {
        let invalid = |m: String| ParseError::InvalidRoi(m);
        let mut exact_widths = Vec::new();
        let mut sides = Vec::new();
        let mut rounded = false;
        for (a, b) in bounds {
            let (lo, lo_exact) = parse_bound(a, Round::Down).map_err(invalid)?;
            let (hi, hi_exact) = parse_bound(b, Round::Up).map_err(invalid)?;
            if lo >= hi {
                return Err(invalid(format!("empty interval [{a}, {b}]")));
            }
            rounded |= !(lo_exact && hi_exact);
            exact_widths.push(literal_difference(a, b).map_err(invalid)?);
            sides.push((lo, hi));
        }
        let (num0, scale0) = &exact_widths[0];
        for (num, scale) in &exact_widths[1..] {
            // num0 / 10^scale0 == num / 10^scale
            let lhs = num0 * num_traits::pow(num_bigint::BigInt::from(10), *scale as usize);
            let rhs = num * num_traits::pow(num_bigint::BigInt::from(10), *scale0 as usize);
            if lhs != rhs {
                return Err(invalid(GeometryError::NonCubicRoi.to_string()));
            }
        }
        let width = sides.iter().map(|(lo, hi)| hi - lo).max().expect("at least one side");
        let lo = sides.into_iter().map(|(lo, _)| lo).collect();
        let roi = Roi::new(lo, width).map_err(|e| invalid(e.to_string()))?;
        let note = rounded.then(|| {
            format!(
                "region of interest rounded outward to the dyadic hypercube {}",
                roi.render()
            )
        });
        Ok((roi, note))
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[Dyadic] {
        &self.lo
    }

    pub fn width(&self) -> &Dyadic {
        &self.width
    }

    pub fn root_box(&self) -> AlignedBox {
        AlignedBox::root(self.dim())
    }

    pub fn to_box(&self) -> IntervalVector {
        self.root_box().realize(self)
    }

    /// Side length of an aligned box at `depth`.
    pub fn side(&self, depth: u32) -> Dyadic {
        self.width.shl(-(depth as i64))
    }

    pub fn render(&self) -> String {
        self.to_box()
            .iter()
            .map(|s| format!("[{},{}]", s.lo().to_decimal_exact(), s.hi().to_decimal_exact()))
            .collect::<Vec<_>>()
            .join("x")
    }
}

fn parse_bound(s: &str, dir: Round) -> Result<(Dyadic, bool), String> {
    if s.starts_with("0x") || s.starts_with("-0x") {
        return Dyadic::parse_hex(s).map(|d| (d, true)).map_err(|e| e.to_string());
    }
    Dyadic::from_decimal(s, ROI_ROUNDING_BITS, dir).map_err(|e| e.to_string())
}

/// Exact `b - a` as `num / 10^scale`.
fn literal_difference(a: &str, b: &str) -> Result<(num_bigint::BigInt, u32), String> {
    let rational = |s: &str| -> Result<(num_bigint::BigInt, u32), String> {
        if s.starts_with("0x") || s.starts_with("-0x") {
            let d = Dyadic::parse_hex(s).map_err(|e| e.to_string())?;
            Dyadic::parse_decimal_rational(&d.to_decimal_exact()).map_err(|e| e.to_string())
        } else {
            Dyadic::parse_decimal_rational(s).map_err(|e| e.to_string())
        }
    };
    let (na, sa) = rational(a)?;
    let (nb, sb) = rational(b)?;
    let scale = sa.max(sb);
    let ten = num_bigint::BigInt::from(10);
    let na = na * num_traits::pow(ten.clone(), (scale - sa) as usize);
    let nb = nb * num_traits::pow(ten, (scale - sb) as usize);
    Ok((nb - na, scale))
}

/// Dilation factors used by the algorithm; all are exact on dyadics.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Dilation {
    One,
    ThreeHalves,
    Two,
    Three,
}

impl Dilation {
    /// The factor as `num / 2`.
    fn halves(self) -> i128 {
        match self {
            Dilation::One => 2,
            Dilation::ThreeHalves => 3,
            Dilation::Two => 4,
            Dilation::Three => 6,
        }
    }

    pub fn factor(self) -> Dyadic {
        Dyadic::ratio_pow2(self.halves() as i64, 1)
    }
}

/// Dilation of a box about its center.
pub fn dilate_box(b: &IntervalVector, k: Dilation) -> IntervalVector {
    let f = k.factor();
    IntervalVector(
        b.iter()
            .map(|s| {
                let c = s.mid();
                let r = &s.radius() * &f;
                Interval::new(&c - &r, &c + &r)
            })
            .collect(),
    )
}

/// One of the `2n` faces of a box.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Face {
    pub axis: usize,
    pub upper: bool,
    pub region: IntervalVector,
}

/// Faces of `b`, ordered axis by axis with the upper face first.
pub fn box_faces(b: &IntervalVector) -> Vec<Face> {
    let mut out = Vec::with_capacity(2 * b.dim());
    for axis in 0..b.dim() {
        for upper in [true, false] {
            let mut region = b.clone();
            let at = if upper { b[axis].hi() } else { b[axis].lo() };
            region[axis] = Interval::point(at.clone());
            out.push(Face { axis, upper, region });
        }
    }
    out
}

/// A box from the subdivision tree of the ROI: side `w(B_0)/2^depth`, lower
/// corner `B_0.lo + coords * side`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AlignedBox {
    pub depth: u32,
    pub coords: Vec<u64>,
}

impl AlignedBox {
    pub fn root(n: usize) -> Self {
        AlignedBox {
            depth: 0,
            coords: vec![0; n],
        }
    }

    pub fn new(depth: u32, coords: Vec<u64>) -> Self {
        assert!(depth <= DEPTH_LIMIT, "depth {depth} exceeds {DEPTH_LIMIT}");
        assert!(
            coords.iter().all(|&k| k < (1u64 << depth)),
            "coordinates out of range for depth {depth}"
        );
        AlignedBox { depth, coords }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// The `2^n` children; child `c` takes the upper half along axis `i`
    /// when bit `i` of `c` is set.
    pub fn subdivide(&self, max_depth: u32) -> Result<Vec<AlignedBox>, GeometryError> {
        let limit = max_depth.min(DEPTH_LIMIT);
        if self.depth >= limit {
            return Err(GeometryError::MaxDepthExceeded(limit));
        }
        let n = self.dim();
        Ok((0..1usize << n)
            .map(|c| AlignedBox {
                depth: self.depth + 1,
                coords: self
                    .coords
                    .iter()
                    .enumerate()
                    .map(|(i, &k)| 2 * k + ((c >> i) & 1) as u64)
                    .collect(),
            })
            .collect())
    }

    pub fn width(&self, roi: &Roi) -> Dyadic {
        roi.side(self.depth)
    }

    pub fn realize(&self, roi: &Roi) -> IntervalVector {
        let side = roi.side(self.depth);
        IntervalVector(
            self.coords
                .iter()
                .zip(roi.lo())
                .map(|(&k, lo)| {
                    let a = lo + &(&side * &Dyadic::from_bigint(k.into()));
                    let b = &a + &side;
                    Interval::new(a, b)
                })
                .collect(),
        )
    }

    pub fn center(&self, roi: &Roi) -> Vec<Dyadic> {
        self.realize(roi).mid()
    }

    pub fn dilate(&self, roi: &Roi, k: Dilation) -> IntervalVector {
        dilate_box(&self.realize(roi), k)
    }

    pub fn faces_of_dilated(&self, roi: &Roi, k: Dilation) -> Vec<Face> {
        box_faces(&self.dilate(roi, k))
    }

    /// Lower corners and side length in units of the finer of the two depths.
    fn common_units(&self, other: &AlignedBox) -> (u32, Vec<i128>, i128, Vec<i128>, i128) {
        let d = self.depth.max(other.depth);
        let scale = |b: &AlignedBox| -> (Vec<i128>, i128) {
            let s = 1i128 << (d - b.depth);
            (b.coords.iter().map(|&k| k as i128 * s).collect(), s)
        };
        let (a, wa) = scale(self);
        let (b, wb) = scale(other);
        (d, a, wa, b, wb)
    }

    /// Exact test of `self ⊆ k·outer`.
    pub fn contained_in_dilated(&self, outer: &AlignedBox, k: Dilation) -> bool {
        let (_, q, wq, b, wb) = self.common_units(outer);
        // in quarter units: center 4b + 2wb, half-width 2k*wb = halves*wb
        let half = k.halves() * wb;
        q.iter().zip(&b).all(|(&q, &b)| {
            let c = 4 * b + 2 * wb;
            c - half <= 4 * q && 4 * (q + wq) <= c + half
        })
    }

    pub fn contains(&self, other: &AlignedBox) -> bool {
        other.contained_in_dilated(self, Dilation::One)
    }

    pub fn interiors_overlap(&self, other: &AlignedBox) -> bool {
        let (_, a, wa, b, wb) = self.common_units(other);
        a.iter().zip(&b).all(|(&a, &b)| a < b + wb && b < a + wa)
    }
}
