//! Embedded train tracks on punctured orientable surfaces.
//!
//! A track is stored as a fat graph: every switch has three slots, `L`
//! (the large side of the tangent line) and the two small slots `SR`, `SL`.
//! The surface orientation is encoded by the counterclockwise order
//! `L, SR, SL` of the slots around each switch; looking from the switch
//! along the small side, `SL` is on the left. Complementary regions, genus
//! and puncture count are derived from this data and never stored.

mod dual;
mod format;

pub use dual::{
    dual_triangulation, track_from_triangulation, IdealTriangulation2, TriangleSide,
    TriangulationIso,
};
pub use format::{parse_track, serialize_track, ParseError, SurfaceHeader, TrackFile};

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::AlgebraicNumber;

pub type SwitchId = usize;
pub type BranchId = usize;

/// Half-branch slot at a switch, in counterclockwise order.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Slot {
    L = 0,
    SR = 1,
    SL = 2,
}

impl Slot {
    pub const ALL: [Slot; 3] = [Slot::L, Slot::SR, Slot::SL];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Slot {
        Slot::ALL[i % 3]
    }

    /// Next slot counterclockwise.
    pub fn next(self) -> Slot {
        Slot::from_index(self.index() + 1)
    }

    pub fn is_small(self) -> bool {
        self != Slot::L
    }

    pub fn name(self) -> &'static str {
        match self {
            Slot::L => "L",
            Slot::SR => "SR",
            Slot::SL => "SL",
        }
    }

    pub fn parse(s: &str) -> Option<Slot> {
        match s {
            "L" => Some(Slot::L),
            "SR" => Some(Slot::SR),
            "SL" => Some(Slot::SL),
            _ => None,
        }
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One end of a branch: the branch and which of its two ends (0 or 1).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord, Serialize, Deserialize)]
pub struct End {
    pub branch: BranchId,
    pub end: u8,
}

/// Where a branch end sits.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Port {
    pub switch: SwitchId,
    pub slot: Slot,
}

impl Port {
    pub fn new(switch: SwitchId, slot: Slot) -> Self {
        Port { switch, slot }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum BranchKind {
    Large,
    Mixed,
    Small,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TrackError {
    #[error("incomplete track: {0}")]
    IncompleteTrack(String),
    #[error("illegal complementary region {region}: {reason}")]
    IllegalRegion { region: usize, reason: String },
    #[error("switch condition fails at switch {0}")]
    SwitchViolation(SwitchId),
    #[error("branch {0} has nonpositive weight")]
    NonpositiveWeight(BranchId),
    #[error("measure has {got} weights for {expected} branches")]
    MeasureLength { expected: usize, got: usize },
    #[error("regions not fully punctured: {0:?}")]
    NotFullyPunctured(Vec<usize>),
    #[error("surface with genus {g} and {n} punctures is not hyperbolic")]
    NotHyperbolic { g: i64, n: i64 },
    #[error("no such region {0}")]
    NoSuchRegion(usize),
    #[error("edge {0} bounds a single triangle twice")]
    SelfAdjacentEdge(usize),
    #[error("weights live in different number fields")]
    FieldMismatch,
}

/// A corner of a switch, between slot `from` and the next slot counterclockwise.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Corner {
    pub switch: SwitchId,
    pub from: Slot,
}

impl Corner {
    /// The corner between the two small slots is the only cusp.
    pub fn is_cusp(self) -> bool {
        self.from == Slot::SR
    }

    /// The slot not adjacent to this corner.
    pub fn opposite(self) -> Slot {
        self.from.next().next()
    }
}

/// A complementary region, traced along its boundary.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Region {
    /// Boundary steps: branch traversed, starting from the given end.
    pub boundary: Vec<End>,
    /// Corner passed after each step.
    pub corners: Vec<Corner>,
    pub cusps: usize,
    pub punctured: bool,
}

impl Region {
    /// Euler characteristic of the region (disk 1, punctured disk 0).
    pub fn euler(&self) -> i64 {
        if self.punctured {
            0
        } else {
            1
        }
    }

    /// `2χ(R) - cusps`, which must be negative.
    pub fn doubled_euler(&self) -> i64 {
        2 * self.euler() - self.cusps as i64
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct SurfaceSummary {
    pub genus: i64,
    pub punctures: i64,
    pub switches: usize,
    pub branches: usize,
    pub regions: Vec<Region>,
}

impl SurfaceSummary {
    pub fn euler_characteristic(&self) -> i64 {
        2 - 2 * self.genus - self.punctures
    }
}

/// Trivalent train track with slot structure.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct TrainTrack {
    slots: Vec<[End; 3]>,
    ports: Vec<[Port; 2]>,
    // one boundary dart per punctured region; regions are recomputed on demand
    puncture_marks: Vec<End>,
}

impl TrainTrack {
    /// Builds a track from branch endpoint lists. Every slot must be used once.
    pub fn from_branches(switches: usize, branches: &[[Port; 2]]) -> Result<Self, TrackError> {
        let mut slots: Vec<[Option<End>; 3]> = vec![[None; 3]; switches];
        for (b, ends) in branches.iter().enumerate() {
            for (j, p) in ends.iter().enumerate() {
                if p.switch >= switches {
                    return Err(TrackError::IncompleteTrack(format!(
                        "branch {} references missing switch {}",
                        b, p.switch
                    )));
                }
                let cell = &mut slots[p.switch][p.slot.index()];
                if cell.is_some() {
                    return Err(TrackError::IncompleteTrack(format!(
                        "slot {} of switch {} used twice",
                        p.slot, p.switch
                    )));
                }
                *cell = Some(End {
                    branch: b,
                    end: j as u8,
                });
            }
        }
        let mut full = Vec::with_capacity(switches);
        for (s, sl) in slots.iter().enumerate() {
            let mut row = [End { branch: 0, end: 0 }; 3];
            for k in 0..3 {
                row[k] = sl[k].ok_or_else(|| {
                    TrackError::IncompleteTrack(format!(
                        "slot {} of switch {} is empty",
                        Slot::from_index(k),
                        s
                    ))
                })?;
            }
            full.push(row);
        }
        Ok(TrainTrack {
            slots: full,
            ports: branches.to_vec(),
            puncture_marks: Vec::new(),
        })
    }

    pub fn num_switches(&self) -> usize {
        self.slots.len()
    }

    pub fn num_branches(&self) -> usize {
        self.ports.len()
    }

    pub fn ports(&self, b: BranchId) -> [Port; 2] {
        self.ports[b]
    }

    pub fn port(&self, e: End) -> Port {
        self.ports[e.branch][e.end as usize]
    }

    pub fn at(&self, p: Port) -> End {
        self.slots[p.switch][p.slot.index()]
    }

    pub fn branch_at(&self, p: Port) -> BranchId {
        self.at(p).branch
    }

    pub fn other_end(e: End) -> End {
        End {
            branch: e.branch,
            end: 1 - e.end,
        }
    }

    pub(crate) fn place(&mut self, p: Port, e: End) {
        self.slots[p.switch][p.slot.index()] = e;
        self.ports[e.branch][e.end as usize] = p;
    }

    pub fn classify_branch(&self, b: BranchId) -> BranchKind {
        let [p, q] = self.ports[b];
        match (p.slot == Slot::L, q.slot == Slot::L) {
            (true, true) => BranchKind::Large,
            (false, false) => BranchKind::Small,
            _ => BranchKind::Mixed,
        }
    }

    pub fn large_branches(&self) -> Vec<BranchId> {
        (0..self.num_branches())
            .filter(|&b| self.classify_branch(b) == BranchKind::Large)
            .collect()
    }

    /// Complementary regions in a deterministic order (by smallest corner).
    pub fn regions(&self) -> Vec<Region> {
        let n = self.num_switches();
        let mut seen = vec![[false; 3]; n];
        let marked: Vec<(usize, usize)> = self
            .puncture_marks
            .iter()
            .map(|&e| {
                let p = self.port(e);
                (p.switch, p.slot.index())
            })
            .collect();
        let mut out = Vec::new();
        for s in 0..n {
            for k in 0..3 {
                if seen[s][k] {
                    continue;
                }
                // dart (s, k): leave s along the half-branch in slot k
                let mut boundary = Vec::new();
                let mut corners = Vec::new();
                let mut punctured = false;
                let (mut cs, mut ck) = (s, k);
                loop {
                    seen[cs][ck] = true;
                    if marked.contains(&(cs, ck)) {
                        punctured = true;
                    }
                    let e = self.slots[cs][ck];
                    boundary.push(e);
                    let far = self.port(Self::other_end(e));
                    corners.push(Corner {
                        switch: far.switch,
                        from: far.slot,
                    });
                    cs = far.switch;
                    ck = far.slot.next().index();
                    if (cs, ck) == (s, k) {
                        break;
                    }
                }
                let cusps = corners.iter().filter(|c| c.is_cusp()).count();
                out.push(Region {
                    boundary,
                    corners,
                    cusps,
                    punctured,
                });
            }
        }
        out
    }

    pub fn is_punctured(&self, region: usize) -> bool {
        self.regions().get(region).is_some_and(|r| r.punctured)
    }

    /// Marks a region as punctured (passing from Σ to Σ°).
    pub fn puncture(&mut self, region: usize) -> Result<(), TrackError> {
        let regions = self.regions();
        let r = regions
            .get(region)
            .ok_or(TrackError::NoSuchRegion(region))?;
        if !r.punctured {
            self.puncture_marks.push(r.boundary[0]);
            self.normalize_marks();
        }
        Ok(())
    }

    /// Punctures every unpunctured region.
    pub fn puncture_all(&mut self) {
        let regions = self.regions();
        for (i, r) in regions.iter().enumerate() {
            if !r.punctured {
                self.puncture(i).expect("region index in range");
            }
        }
    }

    pub fn punctured_regions(&self) -> Vec<usize> {
        self.regions()
            .iter()
            .enumerate()
            .filter(|(_, r)| r.punctured)
            .map(|(i, _)| i)
            .collect()
    }

    // Marks are kept as the first boundary dart of each punctured region, so
    // equal tracks compare equal regardless of the order of puncturing.
    fn normalize_marks(&mut self) {
        let saved = std::mem::take(&mut self.puncture_marks);
        let probe = TrainTrack {
            puncture_marks: saved.clone(),
            ..self.clone()
        };
        let regions = probe.regions();
        self.puncture_marks = regions
            .iter()
            .filter(|r| r.punctured)
            .map(|r| r.boundary[0])
            .collect();
    }

    /// Moves puncture marks off `avoid` before a local move rewires it.
    pub(crate) fn reanchor_marks(&mut self, avoid: &[BranchId]) {
        let regions = self.regions();
        let mut marks = Vec::new();
        for r in regions.iter().filter(|r| r.punctured) {
            let e = r
                .boundary
                .iter()
                .find(|e| !avoid.contains(&e.branch))
                .copied()
                .unwrap_or(r.boundary[0]);
            marks.push(e);
        }
        self.puncture_marks = marks;
    }

    pub(crate) fn finish_move(&mut self) {
        self.normalize_marks();
    }

    pub fn validate(&self) -> Result<SurfaceSummary, TrackError> {
        let regions = self.regions();
        for (i, r) in regions.iter().enumerate() {
            if r.doubled_euler() >= 0 {
                let kind = if r.punctured {
                    "punctured disk"
                } else {
                    "disk"
                };
                return Err(TrackError::IllegalRegion {
                    region: i,
                    reason: format!(
                        "{} with {} cusps has doubled Euler characteristic {} >= 0",
                        kind,
                        r.cusps,
                        r.doubled_euler()
                    ),
                });
            }
        }
        if !self.is_connected() {
            return Err(TrackError::IncompleteTrack("track is not connected".into()));
        }
        let v = self.num_switches() as i64;
        let e = self.num_branches() as i64;
        let f = regions.len() as i64;
        let closed = v - e + f;
        if closed > 2 || (2 - closed) % 2 != 0 {
            return Err(TrackError::IncompleteTrack(format!(
                "inconsistent Euler count {}",
                closed
            )));
        }
        let punctures = regions.iter().filter(|r| r.punctured).count() as i64;
        Ok(SurfaceSummary {
            genus: (2 - closed) / 2,
            punctures,
            switches: self.num_switches(),
            branches: self.num_branches(),
            regions,
        })
    }

    pub fn is_connected(&self) -> bool {
        let n = self.num_switches();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(s) = stack.pop() {
            for e in self.slots[s] {
                let t = self.port(Self::other_end(e)).switch;
                if !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
        seen.into_iter().all(|x| x)
    }

    /// Small branches joining an `SL` slot to an `SR` slot.
    pub fn check_excluded(&self) -> Vec<ExcludedConfiguration> {
        let mut out = Vec::new();
        for b in 0..self.num_branches() {
            let [p, q] = self.ports[b];
            if p.slot.is_small() && q.slot.is_small() && p.slot != q.slot {
                if p.switch == q.switch {
                    out.push(ExcludedConfiguration::IsolatedMonogon {
                        branch: b,
                        switch: p.switch,
                    });
                } else {
                    out.push(ExcludedConfiguration::OneSidedSmallBranch { branch: b });
                }
            }
        }
        out
    }

    pub fn validate_measure(&self, weights: &[AlgebraicNumber]) -> Result<(), TrackError> {
        if weights.len() != self.num_branches() {
            return Err(TrackError::MeasureLength {
                expected: self.num_branches(),
                got: weights.len(),
            });
        }
        for (b, w) in weights.iter().enumerate() {
            if !w.is_positive() {
                return Err(TrackError::NonpositiveWeight(b));
            }
        }
        for s in 0..self.num_switches() {
            let w = |k: Slot| &weights[self.slots[s][k.index()].branch];
            let sum = w(Slot::SR)
                .checked_add(w(Slot::SL))
                .map_err(|_| TrackError::FieldMismatch)?;
            if &sum != w(Slot::L) {
                return Err(TrackError::SwitchViolation(s));
            }
        }
        Ok(())
    }

    /// Relabels switches and branches; `switch_map[old] = new`, `branch_map[old] = new`.
    pub fn relabel(&self, switch_map: &[SwitchId], branch_map: &[BranchId]) -> TrainTrack {
        let mut ports = vec![[Port::new(0, Slot::L); 2]; self.num_branches()];
        for (b, ps) in self.ports.iter().enumerate() {
            ports[branch_map[b]] = [
                Port::new(switch_map[ps[0].switch], ps[0].slot),
                Port::new(switch_map[ps[1].switch], ps[1].slot),
            ];
        }
        let mut t = TrainTrack::from_branches(self.num_switches(), &ports)
            .expect("relabeling preserves completeness");
        t.puncture_marks = self
            .puncture_marks
            .iter()
            .map(|e| End {
                branch: branch_map[e.branch],
                end: e.end,
            })
            .collect();
        t.normalize_marks();
        t
    }

    pub fn branch_ports(&self) -> &[[Port; 2]] {
        &self.ports
    }

    pub(crate) fn switch_slots(&self, s: SwitchId) -> [End; 3] {
        self.slots[s]
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum ExcludedConfiguration {
    OneSidedSmallBranch { branch: BranchId },
    IsolatedMonogon { branch: BranchId, switch: SwitchId },
}

/// Branch count of a maximal track, with the counting identities behind it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchBound {
    pub branches: i64,
    /// Switches `v = n + 3t` when every region is a trigon or punctured monogon.
    pub switches: i64,
    pub trigons: i64,
    pub warning: Option<String>,
}

/// `18g - 18 + 6n` for a hyperbolic surface.
pub fn branch_bound(g: i64, n: i64) -> Result<BranchBound, TrackError> {
    if g < 0 || n < 0 || 2 - 2 * g - n >= 0 {
        return Err(TrackError::NotHyperbolic { g, n });
    }
    let e = 18 * g - 18 + 6 * n;
    let v = 2 * e / 3;
    let t = (v - n) / 3;
    let warning = if e == 0 {
        Some(format!("Σ_{{{},{}}} carries no filling train track", g, n))
    } else {
        None
    };
    Ok(BranchBound {
        branches: e,
        switches: v,
        trigons: t,
        warning,
    })
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    /// Once-punctured torus: large branch 0, branch 1 SR-SR, branch 2 SL-SL.
    pub fn torus() -> TrainTrack {
        let mut t = TrainTrack::from_branches(
            2,
            &[
                [Port::new(0, Slot::L), Port::new(1, Slot::L)],
                [Port::new(0, Slot::SR), Port::new(1, Slot::SR)],
                [Port::new(0, Slot::SL), Port::new(1, Slot::SL)],
            ],
        )
        .unwrap();
        t.puncture_all();
        t
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::torus;
    use super::*;
    use crate::algebra::{IntPolynomial, NumberField};
    use num_bigint::BigInt;
    use num_rational::BigRational;

    #[test]
    fn torus_summary() {
        let s = torus().validate().unwrap();
        assert_eq!((s.genus, s.punctures), (1, 1));
        assert_eq!(s.regions.len(), 1);
        assert_eq!(s.regions[0].cusps, 2);
    }

    #[test]
    fn unpunctured_torus_region_is_illegal() {
        let t = TrainTrack::from_branches(
            2,
            &[
                [Port::new(0, Slot::L), Port::new(1, Slot::L)],
                [Port::new(0, Slot::SR), Port::new(1, Slot::SR)],
                [Port::new(0, Slot::SL), Port::new(1, Slot::SL)],
            ],
        )
        .unwrap();
        assert!(matches!(
            t.validate(),
            Err(TrackError::IllegalRegion { .. })
        ));
    }

    #[test]
    fn bigon_region_is_illegal() {
        // the twisted gluing yields a smooth bigon with no cusps and a four-cusp region
        let t = TrainTrack::from_branches(
            2,
            &[
                [Port::new(0, Slot::L), Port::new(1, Slot::L)],
                [Port::new(0, Slot::SR), Port::new(1, Slot::SL)],
                [Port::new(0, Slot::SL), Port::new(1, Slot::SR)],
            ],
        )
        .unwrap();
        assert!(matches!(
            t.validate(),
            Err(TrackError::IllegalRegion { .. })
        ));
    }

    #[test]
    fn classify() {
        let t = torus();
        assert_eq!(t.classify_branch(0), BranchKind::Large);
        assert_eq!(t.classify_branch(1), BranchKind::Small);
        let m = TrainTrack::from_branches(
            2,
            &[
                [Port::new(0, Slot::L), Port::new(1, Slot::SL)],
                [Port::new(0, Slot::SR), Port::new(1, Slot::L)],
                [Port::new(0, Slot::SL), Port::new(1, Slot::SR)],
            ],
        )
        .unwrap();
        assert_eq!(m.classify_branch(0), BranchKind::Mixed);
        assert_eq!(m.classify_branch(2), BranchKind::Small);
        assert_eq!(
            m.check_excluded(),
            vec![ExcludedConfiguration::OneSidedSmallBranch { branch: 2 }]
        );
    }

    #[test]
    fn cusps_equal_switches_and_darts_partition() {
        let t = torus();
        let regions = t.regions();
        assert_eq!(
            regions.iter().map(|r| r.cusps).sum::<usize>(),
            t.num_switches()
        );
        let darts: usize = regions.iter().map(|r| r.boundary.len()).sum();
        assert_eq!(darts, 2 * t.num_branches());
    }

    #[test]
    fn measure_checks() {
        let k = NumberField::new(
            IntPolynomial::from_i64s(&[1, -3, 1]),
            BigRational::from_integer(BigInt::from(2)),
            BigRational::from_integer(BigInt::from(3)),
        )
        .unwrap();
        let l = k.generator();
        let t = torus();
        // large = SR + SL
        let ok = vec![l.clone(), &l - &k.from_int(1), k.from_int(1)];
        assert!(t.validate_measure(&ok).is_ok());
        let bad = vec![k.from_int(3), k.from_int(1), k.from_int(1)];
        assert_eq!(
            t.validate_measure(&bad),
            Err(TrackError::SwitchViolation(0))
        );
        let zero = vec![k.from_int(1), k.from_int(0), k.from_int(1)];
        assert_eq!(
            t.validate_measure(&zero),
            Err(TrackError::NonpositiveWeight(1))
        );
    }

    #[test]
    fn branch_bounds() {
        assert_eq!(branch_bound(2, 0).unwrap().branches, 18);
        let b = branch_bound(0, 5).unwrap();
        assert_eq!((b.branches, b.switches, b.trigons), (12, 8, 1));
        let d = branch_bound(0, 3).unwrap();
        assert_eq!(d.branches, 0);
        assert!(d.warning.is_some());
        assert!(branch_bound(1, 0).is_err());
        assert!(branch_bound(0, 2).is_err());
    }
}
