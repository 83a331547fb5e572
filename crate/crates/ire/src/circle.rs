//! Exact circle-rotation dynamics: first return maps onto finite arc unions,
//! dual schemes read off return times, realization of canonical forms (and of
//! arbitrary irreducible rotational exchanges) as first-return systems, and
//! exact perturbation replay.
//!
//! All positions are rationals. Return-map computations run on an integer
//! grid (positions scaled by a common denominator), with an `i128` fast path
//! and a big-integer fallback.

use crate::canonical::{canonicalize, CanonicalError, CanonicalForm};
use crate::exact::Rational;
use crate::induction::{
    apply_step_scheme, split_intervals, InductionStep, MergeOp, Transcript, TranscriptOp,
};
use crate::induction::{replay, ReplayDirection, StepKind};
use crate::lengths::{EndpointVector, FixedIRE, FloatingIRE, LengthVector};
use crate::scheme::{DoubledSymbol, Label, Scheme};
use num::bigint::BigInt;
use num::integer::Integer;
use num::traits::ToPrimitive;
use num::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CircleError {
    #[error("circle length must be positive")]
    NonPositiveLength,
    #[error("point {0} lies outside the projection domain")]
    OutOfDomain(String),
    #[error("invalid arc union: {0}")]
    InvalidArcs(String),
    #[error("degenerate return computation: {0}")]
    Degenerate(String),
    #[error("not a first-return system: {0}")]
    TypeMismatch(String),
    #[error("realization search exhausted its retries")]
    RealizationRetryExhausted,
    #[error("perturbation too large: {0}")]
    PerturbationTooLarge(String),
    #[error(transparent)]
    Canonical(#[from] CanonicalError),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

fn rat_u64(n: u64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// A rotation of a circle of length `L` by `M`, projected onto the half-open
/// segment `[x0, x0 + L)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CircleRotation {
    length: Rational,
    shift: Rational,
    base: Rational,
}

impl CircleRotation {
    pub fn new(length: Rational, shift: Rational, base: Rational) -> Result<Self, CircleError> {
        if !length.is_positive() {
            return Err(CircleError::NonPositiveLength);
        }
        Ok(CircleRotation {
            length,
            shift,
            base,
        })
    }

    pub fn length(&self) -> &Rational {
        &self.length
    }

    pub fn shift(&self) -> &Rational {
        &self.shift
    }

    pub fn base(&self) -> &Rational {
        &self.base
    }

    /// Rotation number: the fractional part of `M / L`, in `[0, 1)`.
    pub fn rho(&self) -> Rational {
        let q = &self.shift / &self.length;
        &q - q.floor()
    }

    /// The shift reduced into `[0, L)`.
    pub fn reduced_shift(&self) -> Rational {
        self.rho() * &self.length
    }

    pub fn contains(&self, x: &Rational) -> bool {
        *x >= self.base && *x < &self.base + &self.length
    }

    /// Brings an arbitrary coordinate into `[x0, x0 + L)`.
    pub fn normalize_point(&self, x: &Rational) -> Rational {
        let turns = ((x - &self.base) / &self.length).floor();
        x - turns * &self.length
    }

    /// Exact image of `x` after `steps` rotations (negative steps rotate
    /// backwards). The input must lie in the projection domain.
    pub fn rotate(&self, x: &Rational, steps: i64) -> Result<Rational, CircleError> {
        if !self.contains(x) {
            return Err(CircleError::OutOfDomain(x.to_string()));
        }
        let total = x + Rational::from_integer(BigInt::from(steps)) * &self.shift;
        Ok(self.normalize_point(&total))
    }
}

impl fmt::Display for CircleRotation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ROT L={} M={} X0={}", self.length, self.shift, self.base)
    }
}

/// A finite union of half-open arcs, normalized into the projection domain:
/// sorted, pairwise disjoint, non-touching, maximal. The whole circle is the
/// single arc `[x0, x0 + L)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArcUnion {
    arcs: Vec<(Rational, Rational)>,
}

impl ArcUnion {
    pub fn new(
        rot: &CircleRotation,
        raw: &[(Rational, Rational)],
    ) -> Result<ArcUnion, CircleError> {
        if raw.is_empty() {
            return Err(CircleError::InvalidArcs("no arcs given".to_string()));
        }
        let hi_end = rot.base() + rot.length();
        let mut segments: Vec<(Rational, Rational)> = Vec::new();
        for (lo, hi) in raw {
            if hi <= lo {
                return Err(CircleError::InvalidArcs(format!(
                    "arc [{lo},{hi}) is empty or inverted"
                )));
            }
            let len = hi - lo;
            if len >= *rot.length() {
                return Ok(ArcUnion::whole(rot));
            }
            let lo_n = rot.normalize_point(lo);
            let hi_n = &lo_n + &len;
            if hi_n > hi_end {
                segments.push((lo_n, hi_end.clone()));
                segments.push((rot.base().clone(), hi_n - rot.length()));
            } else {
                segments.push((lo_n, hi_n));
            }
        }
        segments.sort();
        // Overlapping or touching arcs are united into maximal segments.
        let mut merged: Vec<(Rational, Rational)> = Vec::new();
        for (lo, hi) in segments {
            match merged.last_mut() {
                Some((_, last_hi)) if lo <= *last_hi => {
                    if hi > *last_hi {
                        *last_hi = hi;
                    }
                }
                _ => merged.push((lo, hi)),
            }
        }
        if merged.len() == 1 && merged[0].0 == *rot.base() && merged[0].1 == hi_end {
            return Ok(ArcUnion::whole(rot));
        }
        if merged.len() > 1 && merged[0].0 == *rot.base() && merged.last().unwrap().1 == hi_end {
            return Err(CircleError::InvalidArcs(
                "union wraps the base point; choose a base point outside the union".to_string(),
            ));
        }
        Ok(ArcUnion { arcs: merged })
    }

    /// The whole circle as a single arc.
    pub fn whole(rot: &CircleRotation) -> ArcUnion {
        ArcUnion {
            arcs: vec![(rot.base().clone(), rot.base() + rot.length())],
        }
    }

    pub fn arcs(&self) -> &[(Rational, Rational)] {
        &self.arcs
    }

    pub fn total_length(&self) -> Rational {
        self.arcs.iter().map(|(lo, hi)| hi - lo).sum()
    }

    pub fn min_arc_length(&self) -> Rational {
        self.arcs
            .iter()
            .map(|(lo, hi)| hi - lo)
            .min()
            .expect("non-empty union")
    }

    pub fn is_whole(&self, rot: &CircleRotation) -> bool {
        self.total_length() == *rot.length()
    }
}

impl fmt::Display for ArcUnion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ARCS")?;
        for (lo, hi) in &self.arcs {
            write!(f, " [{lo},{hi})")?;
        }
        Ok(())
    }
}

/// A first-return computation: the induced exchange with its exact circle
/// coordinates, and the constant return time of each beginning interval.
#[derive(Clone, Debug)]
pub struct ReturnMapResult {
    pub ire: FixedIRE,
    pub return_times: BTreeMap<Label, u64>,
}

/// Default horizon: four times the circle length over the shortest arc.
pub fn default_max_time(rot: &CircleRotation, g: &ArcUnion) -> u64 {
    let ratio = rot.length() / g.min_arc_length();
    let bound = ratio.ceil().to_integer();
    4u64.saturating_mul(bound.to_u64().unwrap_or(u64::MAX / 4))
}

// ---------------------------------------------------------------------------
// Integer-grid propagation
// ---------------------------------------------------------------------------

trait GridNum: Clone + Ord {
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
}

impl GridNum for i128 {
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
}

impl GridNum for BigInt {
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
}

struct Piece<G> {
    pos: G,
    len: G,
    origin: G,
}

struct Landed<G> {
    origin: G,
    len: G,
    image: G,
    time: u64,
}

enum PropagationFailure {
    MaxTime(u64),
    Collision(u64),
}

/// Pushes every arc forward one rotation at a time, cutting pieces at arc
/// boundaries; a piece that lands inside the union has returned. `strict`
/// additionally rejects any exact coincidence of a flying piece boundary with
/// an arc endpoint, which certifies that no endpoint orbits collide within
/// the computed horizon.
fn propagate<G: GridNum>(
    circ: &G,
    shift: &G,
    arcs: &[(G, G)],
    max_time: u64,
    strict: bool,
) -> Result<Vec<Landed<G>>, PropagationFailure> {
    let zero = circ.sub(circ);
    let endpoint_points: Vec<G> = arcs
        .iter()
        .flat_map(|(lo, len)| {
            let end = lo.add(len);
            let end_pt = if end == *circ { zero.clone() } else { end };
            [lo.clone(), end_pt]
        })
        .collect();
    let mut active: Vec<Piece<G>> = arcs
        .iter()
        .map(|(lo, len)| Piece {
            pos: lo.clone(),
            len: len.clone(),
            origin: lo.clone(),
        })
        .collect();
    let mut landed = Vec::new();
    let wrap = |v: G| if v >= *circ { v.sub(circ) } else { v };
    for t in 1..=max_time {
        if active.is_empty() {
            break;
        }
        let mut next = Vec::new();
        for piece in std::mem::take(&mut active) {
            let pos = wrap(piece.pos.add(shift));
            if strict {
                let end_pos = wrap(pos.add(&piece.len));
                if endpoint_points.iter().any(|p| *p == pos || *p == end_pos) {
                    return Err(PropagationFailure::Collision(t));
                }
            }
            let mut cuts: Vec<G> = Vec::new();
            for p in &endpoint_points {
                let off = if *p >= pos {
                    p.sub(&pos)
                } else {
                    p.add(circ).sub(&pos)
                };
                if off > zero && off < piece.len {
                    cuts.push(off);
                }
            }
            cuts.sort();
            cuts.dedup();
            cuts.push(piece.len.clone());
            let mut start = zero.clone();
            for cut in cuts {
                let sub_len = cut.sub(&start);
                let sub_pos = wrap(pos.add(&start));
                let sub_origin = piece.origin.add(&start);
                let inside = arcs.iter().any(|(alo, alen)| {
                    let rel = if sub_pos >= *alo {
                        sub_pos.sub(alo)
                    } else {
                        sub_pos.add(circ).sub(alo)
                    };
                    rel < *alen
                });
                if inside {
                    landed.push(Landed {
                        origin: sub_origin,
                        len: sub_len,
                        image: sub_pos,
                        time: t,
                    });
                } else {
                    next.push(Piece {
                        pos: sub_pos,
                        len: sub_len,
                        origin: sub_origin,
                    });
                }
                start = cut;
            }
        }
        active = next;
    }
    if active.is_empty() {
        Ok(landed)
    } else {
        Err(PropagationFailure::MaxTime(max_time))
    }
}

/// Scaling between rational circle coordinates and integer grid units.
struct Grid {
    base: Rational,
    denom: BigInt,
    circ: BigInt,
}

impl Grid {
    fn build(rot: &CircleRotation, g: &ArcUnion) -> Grid {
        let mut denom = rot.length().denom().clone();
        denom = denom.lcm(rot.shift().denom());
        denom = denom.lcm(rot.base().denom());
        for (lo, hi) in g.arcs() {
            denom = denom.lcm(lo.denom());
            denom = denom.lcm(hi.denom());
        }
        let circ = (rot.length() * Rational::from_integer(denom.clone())).to_integer();
        Grid {
            base: rot.base().clone(),
            denom,
            circ,
        }
    }

    fn to_units(&self, p: &Rational) -> BigInt {
        let scaled = (p - &self.base) * Rational::from_integer(self.denom.clone());
        debug_assert!(scaled.is_integer());
        scaled.to_integer()
    }

    fn point_of(&self, z: &BigInt) -> Rational {
        &self.base + Rational::new(z.clone(), self.denom.clone())
    }
}

fn propagation_units(
    rot: &CircleRotation,
    g: &ArcUnion,
    grid: &Grid,
) -> (BigInt, Vec<(BigInt, BigInt)>) {
    let shift = (rot.reduced_shift() * Rational::from_integer(grid.denom.clone())).to_integer();
    let arcs: Vec<(BigInt, BigInt)> = g
        .arcs()
        .iter()
        .map(|(lo, hi)| {
            let lo_u = grid.to_units(lo);
            let len_u = grid.to_units(hi) - &lo_u;
            (lo_u, len_u)
        })
        .collect();
    (shift, arcs)
}

fn run_propagation(
    grid: &Grid,
    shift: &BigInt,
    arcs: &[(BigInt, BigInt)],
    max_time: u64,
    strict: bool,
) -> Result<Vec<Landed<BigInt>>, PropagationFailure> {
    // i128 fast path whenever the grid fits comfortably.
    let bound = BigInt::one() << 120u32;
    if grid.circ < bound {
        let small: Option<(i128, Vec<(i128, i128)>, i128)> = (|| {
            let c = grid.circ.to_i128()?;
            let s = shift.to_i128()?;
            let mut a = Vec::with_capacity(arcs.len());
            for (lo, len) in arcs {
                a.push((lo.to_i128()?, len.to_i128()?));
            }
            Some((c, a, s))
        })();
        if let Some((c, a, s)) = small {
            return propagate::<i128>(&c, &s, &a, max_time, strict).map(|landed| {
                landed
                    .into_iter()
                    .map(|l| Landed {
                        origin: BigInt::from(l.origin),
                        len: BigInt::from(l.len),
                        image: BigInt::from(l.image),
                        time: l.time,
                    })
                    .collect()
            });
        }
    }
    propagate::<BigInt>(&grid.circ, shift, arcs, max_time, strict)
}

// ---------------------------------------------------------------------------
// First return maps
// ---------------------------------------------------------------------------

/// First return map of the rotation to the arc union: the union is cut into
/// maximal pieces of constant return time; the pieces are the beginning
/// intervals of the induced exchange and their return images the ending
/// intervals, labelled `i1, i2, ...` left to right.
pub fn first_return_map(
    rot: &CircleRotation,
    g: &ArcUnion,
    max_time: u64,
) -> Result<ReturnMapResult, CircleError> {
    return_map_impl(rot, g, max_time, false)
}

/// Like [`first_return_map`], but additionally raises `Degenerate` whenever
/// an iterated arc endpoint coincides exactly with another subdivision point
/// within the horizon, certifying generic (effectively irrational) dynamics.
pub fn first_return_map_strict(
    rot: &CircleRotation,
    g: &ArcUnion,
    max_time: u64,
) -> Result<ReturnMapResult, CircleError> {
    return_map_impl(rot, g, max_time, true)
}

fn return_map_impl(
    rot: &CircleRotation,
    g: &ArcUnion,
    max_time: u64,
    strict: bool,
) -> Result<ReturnMapResult, CircleError> {
    if g.is_whole(rot) {
        return whole_circle_exchange(rot);
    }
    let grid = Grid::build(rot, g);
    let (shift, arcs) = propagation_units(rot, g, &grid);
    let landed = run_propagation(&grid, &shift, &arcs, max_time, strict).map_err(|e| match e {
        PropagationFailure::MaxTime(t) => CircleError::Degenerate(format!(
            "a return time exceeds the horizon {t}; dynamics is effectively rational at this scale"
        )),
        PropagationFailure::Collision(t) => {
            CircleError::Degenerate(format!("iterated arc endpoints coincide at time {t}"))
        }
    })?;
    assemble_exchange(&grid, &arcs, landed)
}

fn whole_circle_exchange(rot: &CircleRotation) -> Result<ReturnMapResult, CircleError> {
    let shift = rot.reduced_shift();
    let x0 = rot.base().clone();
    let top = &x0 + rot.length();
    let l1 = Label::new("i1").expect("static label");
    let mut endpoints = BTreeMap::new();
    let mut times = BTreeMap::new();
    let scheme;
    if shift.is_zero() {
        scheme = Scheme::from_cycles(&[vec![DoubledSymbol::begin(&l1), DoubledSymbol::end(&l1)]])
            .expect("static scheme");
        endpoints.insert(DoubledSymbol::begin(&l1), x0);
        endpoints.insert(DoubledSymbol::end(&l1), top);
        times.insert(l1, 1);
    } else {
        let l2 = Label::new("i2").expect("static label");
        scheme = Scheme::from_cycles(&[vec![
            DoubledSymbol::begin(&l1),
            DoubledSymbol::begin(&l2),
            DoubledSymbol::end(&l1),
            DoubledSymbol::end(&l2),
        ]])
        .expect("static scheme");
        endpoints.insert(DoubledSymbol::begin(&l1), x0.clone());
        endpoints.insert(DoubledSymbol::begin(&l2), &top - &shift);
        endpoints.insert(DoubledSymbol::end(&l1), top);
        endpoints.insert(DoubledSymbol::end(&l2), &x0 + &shift);
        times.insert(l1, 1);
        times.insert(l2, 1);
    }
    let ire = FixedIRE::new(scheme, EndpointVector::new(endpoints))
        .map_err(|e| CircleError::Internal(e.to_string()))?;
    Ok(ReturnMapResult {
        ire,
        return_times: times,
    })
}

fn assemble_exchange(
    grid: &Grid,
    arcs: &[(BigInt, BigInt)],
    mut landed: Vec<Landed<BigInt>>,
) -> Result<ReturnMapResult, CircleError> {
    landed.sort_by(|a, b| a.origin.cmp(&b.origin));
    let labels: Vec<Label> = (1..=landed.len())
        .map(|i| Label::new(&format!("i{i}")).expect("generated label"))
        .collect();
    let internal = |msg: &str| CircleError::Internal(msg.to_string());

    let mut cycles: Vec<Vec<DoubledSymbol>> = Vec::new();
    for (alo, alen) in arcs {
        let aend = alo + alen;
        // Beginnings tiling this arc, in order.
        let begins: Vec<usize> = landed
            .iter()
            .enumerate()
            .filter(|(_, p)| p.origin >= *alo && p.origin < aend)
            .map(|(i, _)| i)
            .collect();
        let mut cursor = alo.clone();
        for &i in &begins {
            if landed[i].origin != cursor {
                return Err(internal("beginning intervals do not tile an arc"));
            }
            cursor += &landed[i].len;
        }
        if cursor != aend {
            return Err(internal("beginning intervals do not cover an arc"));
        }
        // Endings tiling this arc, in order of their left end.
        let mut ends: Vec<usize> = landed
            .iter()
            .enumerate()
            .filter(|(_, p)| p.image >= *alo && p.image < aend)
            .map(|(i, _)| i)
            .collect();
        ends.sort_by(|&a, &b| landed[a].image.cmp(&landed[b].image));
        let mut cursor = alo.clone();
        for &i in &ends {
            if landed[i].image != cursor {
                return Err(internal("ending intervals do not tile an arc"));
            }
            cursor += &landed[i].len;
        }
        if cursor != aend {
            return Err(internal("ending intervals do not cover an arc"));
        }
        let mut cycle: Vec<DoubledSymbol> = begins
            .iter()
            .map(|&i| DoubledSymbol::begin(&labels[i]))
            .collect();
        cycle.extend(ends.iter().rev().map(|&i| DoubledSymbol::end(&labels[i])));
        cycles.push(cycle);
    }
    let scheme = Scheme::from_cycles(&cycles).map_err(|e| CircleError::Internal(e.to_string()))?;
    let mut endpoints = BTreeMap::new();
    let mut times = BTreeMap::new();
    for (i, piece) in landed.iter().enumerate() {
        endpoints.insert(
            DoubledSymbol::begin(&labels[i]),
            grid.point_of(&piece.origin),
        );
        endpoints.insert(
            DoubledSymbol::end(&labels[i]),
            grid.point_of(&(&piece.image + &piece.len)),
        );
        times.insert(labels[i].clone(), piece.time);
    }
    let ire = FixedIRE::new(scheme, EndpointVector::new(endpoints))
        .map_err(|e| CircleError::Internal(e.to_string()))?;
    Ok(ReturnMapResult {
        ire,
        return_times: times,
    })
}

// ---------------------------------------------------------------------------
// Dual extraction from return times
// ---------------------------------------------------------------------------

/// Reads the dual scheme off a first-return system by following the two
/// one-sided neighborhood trajectories of every junction between consecutive
/// beginning intervals, and returns it with the return times as its length
/// vector. Checks the per-cycle return-time balance and that the assembled
/// scheme is exactly the dual of the exchange's scheme.
pub fn dual_from_return_map(res: &ReturnMapResult) -> Result<(Scheme, LengthVector), CircleError> {
    let s = res.ire.scheme();
    let bound = 2 * s.alphabet().len() + 2;
    let mut cycles: Vec<Vec<DoubledSymbol>> = Vec::new();
    for l in s.alphabet() {
        let junction = DoubledSymbol::begin(l);
        if !s.apply_inv(&junction).is_begin() {
            continue; // only junctions between two beginning intervals
        }
        // Right-side trajectory: hop along beginnings until an ending-side
        // junction is reached.
        let mut forward = vec![l.clone()];
        loop {
            if forward.len() > bound {
                return Err(CircleError::TypeMismatch(
                    "right trajectory does not terminate".to_string(),
                ));
            }
            let next = s.apply(&DoubledSymbol::end(forward.last().unwrap()));
            if next.is_end() {
                break;
            }
            forward.push(next.label.clone());
        }
        // Left-side trajectory: hop along endings.
        let mut backward = vec![s.apply_inv(&junction).label.clone()];
        loop {
            if backward.len() > bound {
                return Err(CircleError::TypeMismatch(
                    "left trajectory does not terminate".to_string(),
                ));
            }
            let prev = s.apply_inv(&DoubledSymbol::end(backward.last().unwrap()));
            if prev.is_end() {
                break;
            }
            backward.push(prev.label.clone());
        }
        let time_sum = |ls: &[Label]| -> Option<u64> {
            ls.iter()
                .map(|x| res.return_times.get(x).copied())
                .try_fold(0u64, |acc, t| Some(acc + t?))
        };
        let fwd_total = time_sum(&forward)
            .ok_or_else(|| CircleError::TypeMismatch("missing return time".to_string()))?;
        let bwd_total = time_sum(&backward)
            .ok_or_else(|| CircleError::TypeMismatch("missing return time".to_string()))?;
        if fwd_total != bwd_total {
            return Err(CircleError::TypeMismatch(format!(
                "return-time sums disagree at junction {junction}: {fwd_total} vs {bwd_total}"
            )));
        }
        let mut cycle: Vec<DoubledSymbol> = forward.iter().map(DoubledSymbol::begin).collect();
        cycle.extend(backward.iter().rev().map(DoubledSymbol::end));
        cycles.push(cycle);
    }
    let assembled =
        Scheme::from_cycles(&cycles).map_err(|e| CircleError::TypeMismatch(e.to_string()))?;
    if assembled.alphabet() != s.alphabet() {
        return Err(CircleError::TypeMismatch(
            "trajectories do not cover the doubled alphabet".to_string(),
        ));
    }
    if assembled != s.dual() {
        return Err(CircleError::TypeMismatch(
            "assembled cycles do not form the dual scheme".to_string(),
        ));
    }
    let k: LengthVector = res
        .return_times
        .iter()
        .map(|(l, t)| (l.clone(), rat_u64(*t)))
        .collect();
    Ok((assembled, k))
}

// ---------------------------------------------------------------------------
// Realization of canonical forms
// ---------------------------------------------------------------------------

/// A verified realization of a canonical form: the first return map of
/// `rotation` to `arcs` is the canonical exchange, with `correspondence`
/// mapping each canonical label to the induced exchange's label.
#[derive(Clone, Debug)]
pub struct Realization {
    pub rotation: CircleRotation,
    pub arcs: ArcUnion,
    pub correspondence: BTreeMap<Label, Label>,
}

/// Realizes a canonical form as a first-return system, searching over the
/// two construction parameters until internal verification passes.
pub fn realize_canonical(c: &CanonicalForm) -> Result<Realization, CircleError> {
    realize_canonical_full(c).map(|(r, _)| r)
}

pub(crate) fn realize_canonical_full(
    c: &CanonicalForm,
) -> Result<(Realization, FixedIRE), CircleError> {
    let m = c.m() as u64;
    let n = c.n() as u64;
    for attempt in 0..8u64 {
        let k1 = 2 * n + 1 + attempt * (m + 2);
        let k2 = 2 * m + 1 + attempt;
        if k1 + 1 < m + n {
            continue; // chain index windows would collide
        }
        match realize_canonical_with(c, k1, k2) {
            Ok(out) => return Ok(out),
            Err(e) => {
                log::warn!("realization attempt {attempt} (k1={k1}, k2={k2}) failed: {e}");
            }
        }
    }
    Err(CircleError::RealizationRetryExhausted)
}

/// Realization with explicit construction parameters: shift `v_beta + k2 *
/// v_alpha`, circle length `v_alpha + k1 * shift`, base `-v_alpha`, the
/// distinguished arc `[-v_alpha, v_beta)` plus `m - 1` forward images of its
/// left part and `n - 1` forward images of its right part, chosen at
/// non-touching trajectory indices. The construction is verified by running
/// the first return map and matching every interval exactly.
pub fn realize_canonical_with(
    c: &CanonicalForm,
    k1: u64,
    k2: u64,
) -> Result<(Realization, FixedIRE), CircleError> {
    let m = c.m();
    let n = c.n();
    let va = c.v_alpha().clone();
    let vb = c.v_beta().clone();
    let shift = &vb + rat_u64(k2) * &va;
    let length = &va + rat_u64(k1) * &shift;
    let x0 = -&va;
    let rot = CircleRotation::new(length, shift, x0.clone())?;
    let zero = Rational::zero();

    let mut expected: Vec<(Label, Rational, Rational)> = vec![
        (c.alphas()[0].clone(), x0.clone(), va.clone()),
        (c.betas()[0].clone(), zero.clone(), vb.clone()),
    ];
    let mut raw: Vec<(Rational, Rational)> = vec![(x0.clone(), vb.clone())];
    for t in 1..m {
        let lo = rot.rotate(&x0, t as i64)?;
        expected.push((c.alphas()[t].clone(), lo.clone(), va.clone()));
        raw.push((lo.clone(), lo + &va));
    }
    for t in 1..n {
        let lo = rot.rotate(&zero, (m - 1 + t) as i64)?;
        expected.push((c.betas()[t].clone(), lo.clone(), vb.clone()));
        raw.push((lo.clone(), lo + &vb));
    }
    let arcs = ArcUnion::new(&rot, &raw)?;
    if arcs.arcs().len() != raw.len() {
        return Err(CircleError::InvalidArcs(
            "chosen arcs touch and were merged".to_string(),
        ));
    }
    let horizon = 2 + k1 + k1 * k2;
    let fr = first_return_map(&rot, &arcs, horizon)?;

    let mut corr: BTreeMap<Label, Label> = BTreeMap::new();
    for (canon_label, lo, len) in &expected {
        let found = fr
            .ire
            .scheme()
            .alphabet()
            .iter()
            .find(|il| {
                let begin = DoubledSymbol::begin(il);
                fr.ire.endpoints().get(&begin) == lo
                    && fr.ire.endpoints().get(fr.ire.scheme().apply(&begin)) == &(lo + len)
            })
            .cloned()
            .ok_or_else(|| {
                CircleError::Internal(format!(
                    "no induced interval matches {canon_label} at [{lo}, {lo}+{len})"
                ))
            })?;
        corr.insert(canon_label.clone(), found);
    }
    if corr.len() != fr.ire.scheme().alphabet().len() {
        return Err(CircleError::Internal(
            "induced exchange has extra intervals".to_string(),
        ));
    }
    // The correspondence must carry the canonical permutation onto the
    // induced one.
    let canon = c.expand();
    let map_sym = |s: &DoubledSymbol| DoubledSymbol {
        label: corr[&s.label].clone(),
        marker: s.marker,
    };
    for (from, to) in canon.scheme().mapping() {
        if fr.ire.scheme().apply(&map_sym(from)) != &map_sym(to) {
            return Err(CircleError::Internal(
                "induced permutation differs from the canonical one".to_string(),
            ));
        }
    }
    let endpoints: EndpointVector = canon
        .scheme()
        .mapping()
        .keys()
        .map(|s| (s.clone(), fr.ire.endpoints().get(&map_sym(s)).clone()))
        .collect();
    let positioned = FixedIRE::new(canon.scheme().clone(), endpoints)
        .map_err(|e| CircleError::Internal(e.to_string()))?;
    Ok((
        Realization {
            rotation: rot,
            arcs,
            correspondence: corr,
        },
        positioned,
    ))
}

// ---------------------------------------------------------------------------
// Realization of arbitrary rotational exchanges
// ---------------------------------------------------------------------------

/// One forward crop applied to a positioned exchange: the scheme surgery plus
/// the two endpoint updates that mirror cropping the segment on the circle.
fn forward_step_fixed(cur: &FixedIRE, step: &InductionStep) -> Result<FixedIRE, CircleError> {
    let s = cur.scheme();
    let x = cur.endpoints();
    let v = cur.lengths();
    let va = v.get(&step.a).clone();
    let vb = v.get(&step.b).clone();
    let ab = DoubledSymbol::begin(&step.a);
    let ae = DoubledSymbol::end(&step.a);
    let bb = DoubledSymbol::begin(&step.b);
    let be = DoubledSymbol::end(&step.b);
    let mut out = x.clone();
    match step.kind {
        StepKind::Rb => {
            out.set(ae.clone(), x.get(&ae) - &vb);
            out.set(be.clone(), x.get(&ae).clone());
        }
        StepKind::Re => {
            out.set(be.clone(), x.get(&be) - &va);
            out.set(ab.clone(), x.get(s.apply(&bb)) - &va);
        }
        StepKind::Lb => {
            out.set(ab.clone(), x.get(&ab) + &vb);
            out.set(be.clone(), x.get(s.apply(&ae)) + &vb);
        }
        StepKind::Le => {
            out.set(ab.clone(), x.get(&bb).clone());
            out.set(bb.clone(), x.get(&bb) + &va);
        }
    }
    let scheme = apply_step_scheme(s, step).map_err(|e| CircleError::Internal(e.to_string()))?;
    FixedIRE::new(scheme, out).map_err(|e| CircleError::Internal(e.to_string()))
}

/// Splitting applied to a positioned exchange; the reborn pair occupies the
/// two halves of the merged intervals, so the arc union is unchanged.
fn split_fixed(cur: &FixedIRE, op: &MergeOp) -> Result<FixedIRE, CircleError> {
    let floating = cur.floating();
    let split = split_intervals(&floating, op).map_err(|e| CircleError::Internal(e.to_string()))?;
    let x = cur.endpoints();
    let ab = DoubledSymbol::begin(&op.a);
    let ae = DoubledSymbol::end(&op.a);
    let va = floating.lengths().get(&op.a).clone();
    let vb = op.recorded_length_b.clone();
    let mut out = x.clone();
    out.set(DoubledSymbol::begin(&op.b), x.get(&ab) + (&va - &vb));
    out.set(DoubledSymbol::end(&op.b), x.get(&ae).clone());
    out.set(ae.clone(), x.get(&ae) - &vb);
    FixedIRE::new(split.scheme().clone(), out).map_err(|e| CircleError::Internal(e.to_string()))
}

/// Realizes an irreducible rotational interval exchange as the first return
/// map of a circle rotation: canonicalize, realize the canonical form, then
/// replay the transcript backwards on the circle, cropping and splitting arcs.
/// The result is verified exactly before being returned.
pub fn realize(ire: &FloatingIRE) -> Result<(CircleRotation, ArcUnion), CircleError> {
    let (canon, transcript) = canonicalize(ire)?;
    let (real, positioned) = realize_canonical_full(&canon)?;
    let mut cur = positioned;
    for op in transcript.ops().iter().rev() {
        cur = match op {
            TranscriptOp::Step(s) => forward_step_fixed(&cur, &s.flipped())?,
            TranscriptOp::Merge(m) => split_fixed(&cur, m)?,
        };
    }
    if cur.scheme() != ire.scheme() || &cur.lengths() != ire.lengths() {
        return Err(CircleError::Internal(
            "backward replay did not reproduce the input exchange".to_string(),
        ));
    }
    let arcs = ArcUnion::new(&real.rotation, &cur.segment_bounds())?;
    verify_realization(&real.rotation, &arcs, &cur)?;
    Ok((real.rotation, arcs))
}

/// Checks that the first return map to `arcs` is exactly the positioned
/// exchange `cur`, interval by interval.
fn verify_realization(
    rot: &CircleRotation,
    arcs: &ArcUnion,
    cur: &FixedIRE,
) -> Result<(), CircleError> {
    let min_len = cur
        .lengths()
        .iter()
        .map(|(_, v)| v.clone())
        .min()
        .ok_or_else(|| CircleError::Internal("empty exchange".to_string()))?;
    if !min_len.is_positive() {
        return Err(CircleError::Internal("non-positive interval".to_string()));
    }
    let horizon = (rot.length() / min_len)
        .ceil()
        .to_integer()
        .to_u64()
        .unwrap_or(u64::MAX / 2)
        + 2;
    let fr = first_return_map(rot, arcs, horizon)?;
    let mismatch = || CircleError::Internal("realization verification failed".to_string());
    let mut corr: BTreeMap<Label, Label> = BTreeMap::new();
    for l in cur.scheme().alphabet() {
        let begin = DoubledSymbol::begin(l);
        let lo = cur.endpoints().get(&begin);
        let hi = cur.endpoints().get(cur.scheme().apply(&begin));
        let found = fr
            .ire
            .scheme()
            .alphabet()
            .iter()
            .find(|il| {
                let ib = DoubledSymbol::begin(il);
                fr.ire.endpoints().get(&ib) == lo
                    && fr.ire.endpoints().get(fr.ire.scheme().apply(&ib)) == hi
            })
            .cloned()
            .ok_or_else(mismatch)?;
        corr.insert(l.clone(), found);
    }
    if corr.len() != fr.ire.scheme().alphabet().len() {
        return Err(mismatch());
    }
    for (from, to) in cur.scheme().mapping() {
        let map = |s: &DoubledSymbol| DoubledSymbol {
            label: corr[&s.label].clone(),
            marker: s.marker,
        };
        if fr.ire.scheme().apply(&map(from)) != &map(to) {
            return Err(mismatch());
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Perturbation replay
// ---------------------------------------------------------------------------

/// Re-runs a canonicalization transcript backwards from the canonical form
/// with its second length perturbed by `eps >= 0`, producing an exchange with
/// the same scheme as the transcript's source and perturbed lengths. Fails
/// when the perturbation exceeds the robustness radius of some replayed step.
pub fn perturb_to_irrational(
    c: &CanonicalForm,
    transcript: &Transcript,
    eps: &Rational,
) -> Result<FloatingIRE, CircleError> {
    if eps.is_negative() {
        return Err(CircleError::PerturbationTooLarge(
            "perturbation must be non-negative".to_string(),
        ));
    }
    let perturbed = c
        .with_v_beta(c.v_beta() + eps)
        .map_err(|e| CircleError::Internal(e.to_string()))?;
    replay(&perturbed.expand(), transcript, ReplayDirection::Backward)
        .map_err(|e| CircleError::PerturbationTooLarge(e.to_string()))
}
