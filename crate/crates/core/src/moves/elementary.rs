use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::MoveError;
use crate::algebra::{AlgebraicNumber, IntegerMatrix};
use crate::track::{BranchId, BranchKind, End, Port, Slot, SwitchId, TrainTrack};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum MoveKind {
    SplitLeft,
    SplitRight,
    Fold,
    Shift,
}

impl MoveKind {
    pub fn tag(self) -> &'static str {
        match self {
            MoveKind::SplitLeft => "L",
            MoveKind::SplitRight => "R",
            MoveKind::Fold => "F",
            MoveKind::Shift => "S",
        }
    }
}

/// One elementary move. Branch and switch ids persist through every move:
/// the branch created by a split or fold reuses the id of the one it
/// replaces, so `relabel` is always the identity and is not stored.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct MoveRecord {
    pub kind: MoveKind,
    pub branch: BranchId,
    /// Switches at the ends of `branch` before the move.
    pub switches: [SwitchId; 2],
    /// For splits: the branches `a, b, c, d` at `SR(s1), SL(s1), SL(s2), SR(s2)`.
    pub neighbors: [BranchId; 4],
    pub created: Vec<BranchId>,
    pub destroyed: Vec<BranchId>,
}

impl MoveRecord {
    /// Branches whose weight feeds `branch` when the split is undone.
    pub fn fold_sources(&self) -> [BranchId; 2] {
        let [a, b, c, d] = self.neighbors;
        match self.kind {
            MoveKind::SplitLeft => [a, d],
            _ => [c, b],
        }
    }

    /// Matrix `M` with `μ_before = M μ_after` for a split.
    pub fn fold_matrix(&self, branches: usize) -> IntegerMatrix {
        let mut m = IntegerMatrix::identity(branches);
        for s in self.fold_sources() {
            m.add_to(self.branch, s, 1);
        }
        m
    }
}

fn require(t: &TrainTrack, e: BranchId) -> Result<(), MoveError> {
    if e >= t.num_branches() {
        Err(MoveError::NoSuchBranch(e))
    } else {
        Ok(())
    }
}

/// Split the large branch `e` topologically. `left` selects the parity where
/// the weight of `a = SR(s1)` is below that of `c = SL(s2)`.
pub fn split_unmeasured(
    t: &TrainTrack,
    e: BranchId,
    left: bool,
) -> Result<(TrainTrack, MoveRecord), MoveError> {
    require(t, e)?;
    if t.classify_branch(e) != BranchKind::Large {
        return Err(MoveError::NotLarge(e));
    }
    let [p1, p2] = t.ports(e);
    let (s1, s2) = (p1.switch, p2.switch);
    let a = t.at(Port::new(s1, Slot::SR));
    let b = t.at(Port::new(s1, Slot::SL));
    let c = t.at(Port::new(s2, Slot::SL));
    let d = t.at(Port::new(s2, Slot::SR));
    let e0 = End { branch: e, end: 0 };
    let e1 = End { branch: e, end: 1 };
    let mut out = t.clone();
    out.reanchor_marks(&[e]);
    if left {
        out.place(Port::new(s1, Slot::L), c);
        out.place(Port::new(s1, Slot::SL), e0);
        out.place(Port::new(s1, Slot::SR), a);
        out.place(Port::new(s2, Slot::L), b);
        out.place(Port::new(s2, Slot::SL), e1);
        out.place(Port::new(s2, Slot::SR), d);
    } else {
        out.place(Port::new(s2, Slot::L), a);
        out.place(Port::new(s2, Slot::SL), c);
        out.place(Port::new(s2, Slot::SR), e1);
        out.place(Port::new(s1, Slot::L), d);
        out.place(Port::new(s1, Slot::SL), b);
        out.place(Port::new(s1, Slot::SR), e0);
    }
    out.finish_move();
    let rec = MoveRecord {
        kind: if left {
            MoveKind::SplitLeft
        } else {
            MoveKind::SplitRight
        },
        branch: e,
        switches: [s1, s2],
        neighbors: [a.branch, b.branch, c.branch, d.branch],
        created: vec![e],
        destroyed: vec![e],
    };
    Ok((out, rec))
}

/// Measured split; the parity is forced by the weights.
pub fn split(
    t: &TrainTrack,
    mu: &[AlgebraicNumber],
    e: BranchId,
) -> Result<(TrainTrack, Vec<AlgebraicNumber>, MoveRecord), MoveError> {
    require(t, e)?;
    if t.classify_branch(e) != BranchKind::Large {
        return Err(MoveError::NotLarge(e));
    }
    let [p1, p2] = t.ports(e);
    let wa = &mu[t.branch_at(Port::new(p1.switch, Slot::SR))];
    let wc = &mu[t.branch_at(Port::new(p2.switch, Slot::SL))];
    let left = match wa.compare(wc)? {
        Ordering::Less => true,
        Ordering::Greater => false,
        Ordering::Equal => return Err(MoveError::CentralSplit(e)),
    };
    let (out, rec) = split_unmeasured(t, e, left)?;
    let mut w = mu.to_vec();
    w[e] = if left {
        wc.checked_sub(wa)?
    } else {
        wa.checked_sub(wc)?
    };
    Ok((out, w, rec))
}

/// Fold a small branch joining two `SL` slots or two `SR` slots; the
/// inverse of a split.
pub fn fold_unmeasured(t: &TrainTrack, e: BranchId) -> Result<(TrainTrack, MoveRecord), MoveError> {
    require(t, e)?;
    if t.classify_branch(e) != BranchKind::Small {
        return Err(MoveError::NotSmall(e));
    }
    let [p, q] = t.ports(e);
    if p.slot != q.slot {
        return Err(MoveError::NotFoldable(e));
    }
    let (s1, s2) = (p.switch, q.switch);
    let e0 = End { branch: e, end: 0 };
    let e1 = End { branch: e, end: 1 };
    let (a, b, c, d);
    let left = p.slot == Slot::SL;
    if left {
        a = t.at(Port::new(s1, Slot::SR));
        c = t.at(Port::new(s1, Slot::L));
        b = t.at(Port::new(s2, Slot::L));
        d = t.at(Port::new(s2, Slot::SR));
    } else {
        d = t.at(Port::new(s1, Slot::L));
        b = t.at(Port::new(s1, Slot::SL));
        a = t.at(Port::new(s2, Slot::L));
        c = t.at(Port::new(s2, Slot::SL));
    }
    let mut out = t.clone();
    out.reanchor_marks(&[e]);
    out.place(Port::new(s1, Slot::L), e0);
    out.place(Port::new(s1, Slot::SR), a);
    out.place(Port::new(s1, Slot::SL), b);
    out.place(Port::new(s2, Slot::L), e1);
    out.place(Port::new(s2, Slot::SL), c);
    out.place(Port::new(s2, Slot::SR), d);
    out.finish_move();
    let rec = MoveRecord {
        kind: MoveKind::Fold,
        branch: e,
        switches: [s1, s2],
        neighbors: [a.branch, b.branch, c.branch, d.branch],
        created: vec![e],
        destroyed: vec![e],
    };
    Ok((out, rec))
}

/// Measured fold: the new large branch carries `a + e + d` (or `c + e + b`).
pub fn fold(
    t: &TrainTrack,
    mu: &[AlgebraicNumber],
    e: BranchId,
) -> Result<(TrainTrack, Vec<AlgebraicNumber>, MoveRecord), MoveError> {
    let (out, rec) = fold_unmeasured(t, e)?;
    let left = t.ports(e)[0].slot == Slot::SL;
    let [a, b, c, d] = rec.neighbors;
    let (x, y) = if left { (a, d) } else { (c, b) };
    let mut w = mu.to_vec();
    w[e] = mu[x].checked_add(&mu[e])?.checked_add(&mu[y])?;
    Ok((out, w, rec))
}

/// Shift a mixed branch past the switch at its large end.
pub fn shift_unmeasured(
    t: &TrainTrack,
    e: BranchId,
) -> Result<(TrainTrack, MoveRecord), MoveError> {
    require(t, e)?;
    if t.classify_branch(e) != BranchKind::Mixed {
        return Err(MoveError::NotMixed(e));
    }
    let [p, q] = t.ports(e);
    let (small, large) = if p.slot == Slot::L { (q, p) } else { (p, q) };
    let (tt, s) = (small.switch, large.switch);
    if tt == s {
        return Err(MoveError::MixedLoop(e));
    }
    let e_small = t.at(small);
    let e_large = t.at(large);
    let a = t.at(Port::new(tt, Slot::L));
    let mut out = t.clone();
    out.reanchor_marks(&[e]);
    let (x, y, z);
    if small.slot == Slot::SL {
        let b = t.at(Port::new(tt, Slot::SR));
        let c = t.at(Port::new(s, Slot::SL));
        let d = t.at(Port::new(s, Slot::SR));
        out.place(Port::new(tt, Slot::L), a);
        out.place(Port::new(tt, Slot::SL), c);
        out.place(Port::new(tt, Slot::SR), e_small);
        out.place(Port::new(s, Slot::L), e_large);
        out.place(Port::new(s, Slot::SL), d);
        out.place(Port::new(s, Slot::SR), b);
        (x, y, z) = (b, c, d);
    } else {
        let b = t.at(Port::new(tt, Slot::SL));
        let c = t.at(Port::new(s, Slot::SL));
        let d = t.at(Port::new(s, Slot::SR));
        out.place(Port::new(tt, Slot::L), a);
        out.place(Port::new(tt, Slot::SL), e_small);
        out.place(Port::new(tt, Slot::SR), d);
        out.place(Port::new(s, Slot::L), e_large);
        out.place(Port::new(s, Slot::SL), b);
        out.place(Port::new(s, Slot::SR), c);
        (x, y, z) = (b, c, d);
    }
    out.finish_move();
    let rec = MoveRecord {
        kind: MoveKind::Shift,
        branch: e,
        switches: [tt, s],
        neighbors: [a.branch, x.branch, y.branch, z.branch],
        created: vec![],
        destroyed: vec![],
    };
    Ok((out, rec))
}

/// Measured shift; only the shifted branch changes weight.
pub fn shift(
    t: &TrainTrack,
    mu: &[AlgebraicNumber],
    e: BranchId,
) -> Result<(TrainTrack, Vec<AlgebraicNumber>, MoveRecord), MoveError> {
    let (out, rec) = shift_unmeasured(t, e)?;
    let [_, b, c, d] = rec.neighbors;
    let small_left = {
        let [p, q] = t.ports(e);
        p.slot == Slot::SL || q.slot == Slot::SL
    };
    let mut w = mu.to_vec();
    w[e] = if small_left {
        mu[d].checked_add(&mu[b])?
    } else {
        mu[b].checked_add(&mu[c])?
    };
    Ok((out, w, rec))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::NumberField;
    use crate::moves::canonical_form;

    fn q(n: i64) -> AlgebraicNumber {
        NumberField::rationals().from_int(n)
    }

    /// Genus-2-free toy: a large branch 0 between switches 0 and 1, whose
    /// four neighbors run to two further switches.
    fn h_track() -> TrainTrack {
        // s0: L=0, SR=1(a), SL=2(b); s1: L=0, SL=3(c), SR=4(d)
        // s2: L=5, SR=1, SL=3 ; s3: L=5, SR=4, SL=2
        let p = |s, k| Port::new(s, k);
        TrainTrack::from_branches(
            4,
            &[
                [p(0, Slot::L), p(1, Slot::L)],
                [p(0, Slot::SR), p(2, Slot::SR)],
                [p(0, Slot::SL), p(3, Slot::SL)],
                [p(1, Slot::SL), p(2, Slot::SL)],
                [p(1, Slot::SR), p(3, Slot::SR)],
                [p(2, Slot::L), p(3, Slot::L)],
            ],
        )
        .unwrap()
    }

    fn h_measure() -> Vec<AlgebraicNumber> {
        // a=1, b=2, c=2, d=1, e=3, and branch 5 = a + c = b + d = 3
        vec![q(3), q(1), q(2), q(2), q(1), q(3)]
    }

    #[test]
    fn split_weights_follow_parity() {
        let t = h_track();
        let mu = h_measure();
        assert!(t.validate_measure(&mu).is_ok());
        let (t2, w2, rec) = split(&t, &mu, 0).unwrap();
        assert_eq!(rec.kind, MoveKind::SplitLeft);
        assert_eq!(w2[0], q(1));
        assert!(t2.validate_measure(&w2).is_ok());
        assert_eq!(t2.classify_branch(0), BranchKind::Small);
    }

    #[test]
    fn central_split_is_refused() {
        let t = h_track();
        let mu = vec![q(2), q(1), q(1), q(1), q(1), q(2)];
        assert_eq!(split(&t, &mu, 0).unwrap_err(), MoveError::CentralSplit(0));
        assert_eq!(split(&t, &mu, 1).unwrap_err(), MoveError::NotLarge(1));
    }

    #[test]
    fn fold_inverts_split() {
        let t = h_track();
        let mu = h_measure();
        let (t2, w2, _) = split(&t, &mu, 0).unwrap();
        let (t3, w3, _) = fold(&t2, &w2, 0).unwrap();
        assert_eq!(
            canonical_form(&t3, Some(&w3)),
            canonical_form(&t, Some(&mu))
        );
        let mu_r = vec![q(3), q(2), q(1), q(1), q(2), q(3)];
        let (t4, w4, rec) = split(&t, &mu_r, 0).unwrap();
        assert_eq!(rec.kind, MoveKind::SplitRight);
        let (t5, w5, _) = fold(&t4, &w4, 0).unwrap();
        assert_eq!(
            canonical_form(&t5, Some(&w5)),
            canonical_form(&t, Some(&mu_r))
        );
    }

    #[test]
    fn fold_weight_formula() {
        // after a left split: e' = 1, and a = d = 1, so the fold restores 3
        let (t2, w2, _) = split(&h_track(), &h_measure(), 0).unwrap();
        let (_, w3, _) = fold(&t2, &w2, 0).unwrap();
        assert_eq!(w3[0], q(3));
    }

    #[test]
    fn fold_rejects_one_sided_branch() {
        let p = |s, k| Port::new(s, k);
        let t = TrainTrack::from_branches(
            2,
            &[
                [p(0, Slot::L), p(1, Slot::SL)],
                [p(0, Slot::SR), p(1, Slot::L)],
                [p(0, Slot::SL), p(1, Slot::SR)],
            ],
        )
        .unwrap();
        assert_eq!(
            fold_unmeasured(&t, 2).unwrap_err(),
            MoveError::NotFoldable(2)
        );
        assert_eq!(fold_unmeasured(&t, 0).unwrap_err(), MoveError::NotSmall(0));
    }

    #[test]
    fn shift_is_an_involution() {
        let (t2, w2, _) = split(&h_track(), &h_measure(), 0).unwrap();
        let mixed: Vec<_> = (0..6)
            .filter(|&b| t2.classify_branch(b) == BranchKind::Mixed)
            .collect();
        assert!(!mixed.is_empty());
        for b in mixed {
            let (t3, w3, _) = shift(&t2, &w2, b).unwrap();
            assert!(t3.validate_measure(&w3).is_ok());
            assert_eq!(t3.num_branches(), t2.num_branches());
            let (t4, w4, _) = shift(&t3, &w3, b).unwrap();
            assert_eq!(t4, t2);
            assert_eq!(w4, w2);
        }
    }

    #[test]
    fn fold_matrix_entry_sum() {
        let (_, _, rec) = split(&h_track(), &h_measure(), 0).unwrap();
        let m = rec.fold_matrix(12);
        assert_eq!(m.entry_sum(), num_bigint::BigInt::from(14));
    }
}
