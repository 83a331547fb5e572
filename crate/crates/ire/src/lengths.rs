//! The real component of an IRE: allowed length and endpoint vectors,
//! positivity, the rotationality predicate, and the two structural tests
//! (splittability, forced length equality) behind canonicalization.

use crate::exact::{LinearSystem, Rational};
use crate::scheme::{Cycle, DoubledSymbol, Label, Marker, Scheme};
use num::{Signed, Zero};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LengthsError {
    #[error("length vector keys do not match the scheme alphabet (near `{0}`)")]
    KeyMismatch(String),
    #[error("length vector is not allowed by the scheme")]
    NotAllowed,
    #[error("endpoint vector violates the per-label balance relation at `{0}`")]
    Inconsistent(String),
    #[error("scheme allows no positive length vector")]
    NotPositive,
    #[error("lengths of `{0}` and `{1}` are equal for every allowed vector")]
    Necessity(String, String),
}

/// A length per label, exact rationals.
#[derive(Clone, PartialEq, Eq)]
pub struct LengthVector(BTreeMap<Label, Rational>);

impl LengthVector {
    pub fn new(entries: BTreeMap<Label, Rational>) -> LengthVector {
        LengthVector(entries)
    }

    pub fn get(&self, l: &Label) -> &Rational {
        &self.0[l]
    }

    pub fn try_get(&self, l: &Label) -> Option<&Rational> {
        self.0.get(l)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Label, &Rational)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_positive(&self) -> bool {
        self.0.values().all(Signed::is_positive)
    }

    pub fn total(&self) -> Rational {
        self.0.values().cloned().sum()
    }

    pub(crate) fn set(&mut self, l: &Label, v: Rational) {
        self.0.insert(l.clone(), v);
    }

    pub(crate) fn remove(&mut self, l: &Label) -> Option<Rational> {
        self.0.remove(l)
    }
}

impl fmt::Debug for LengthVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.0.iter()).finish()
    }
}

impl FromIterator<(Label, Rational)> for LengthVector {
    fn from_iter<T: IntoIterator<Item = (Label, Rational)>>(iter: T) -> Self {
        LengthVector(iter.into_iter().collect())
    }
}

/// A coordinate per doubled symbol, exact rationals.
#[derive(Clone, PartialEq, Eq)]
pub struct EndpointVector(BTreeMap<DoubledSymbol, Rational>);

impl EndpointVector {
    pub fn new(entries: BTreeMap<DoubledSymbol, Rational>) -> EndpointVector {
        EndpointVector(entries)
    }

    pub fn get(&self, s: &DoubledSymbol) -> &Rational {
        &self.0[s]
    }

    pub fn try_get(&self, s: &DoubledSymbol) -> Option<&Rational> {
        self.0.get(s)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&DoubledSymbol, &Rational)> {
        self.0.iter()
    }

    pub(crate) fn set(&mut self, s: DoubledSymbol, v: Rational) {
        self.0.insert(s, v);
    }
}

impl fmt::Debug for EndpointVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.0.iter()).finish()
    }
}

impl FromIterator<(DoubledSymbol, Rational)> for EndpointVector {
    fn from_iter<T: IntoIterator<Item = (DoubledSymbol, Rational)>>(iter: T) -> Self {
        EndpointVector(iter.into_iter().collect())
    }
}

/// A scheme together with an allowed length vector.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FloatingIRE {
    scheme: Scheme,
    lengths: LengthVector,
}

impl FloatingIRE {
    pub fn new(scheme: Scheme, lengths: LengthVector) -> Result<FloatingIRE, LengthsError> {
        if !is_allowed(&scheme, &lengths)? {
            return Err(LengthsError::NotAllowed);
        }
        Ok(FloatingIRE { scheme, lengths })
    }

    pub fn scheme(&self) -> &Scheme {
        &self.scheme
    }

    pub fn lengths(&self) -> &LengthVector {
        &self.lengths
    }

    pub fn into_parts(self) -> (Scheme, LengthVector) {
        (self.scheme, self.lengths)
    }

    /// Whether this is an interval exchange: zero-twist scheme and strictly
    /// positive lengths.
    pub fn is_interval_exchange(&self) -> bool {
        self.lengths.is_positive() && self.scheme.is_zero_twist()
    }
}

/// A scheme together with an endpoint vector satisfying the balance relation
/// `x(begin) + x(end) = x(image of begin) + x(image of end)` for every label.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FixedIRE {
    scheme: Scheme,
    endpoints: EndpointVector,
}

impl FixedIRE {
    pub fn new(scheme: Scheme, endpoints: EndpointVector) -> Result<FixedIRE, LengthsError> {
        lengths_from_endpoints(&scheme, &endpoints)?;
        Ok(FixedIRE { scheme, endpoints })
    }

    pub fn scheme(&self) -> &Scheme {
        &self.scheme
    }

    pub fn endpoints(&self) -> &EndpointVector {
        &self.endpoints
    }

    pub fn lengths(&self) -> LengthVector {
        lengths_from_endpoints(&self.scheme, &self.endpoints).expect("validated at construction")
    }

    pub fn floating(&self) -> FloatingIRE {
        FloatingIRE {
            scheme: self.scheme.clone(),
            lengths: self.lengths(),
        }
    }

    pub fn into_parts(self) -> (Scheme, EndpointVector) {
        (self.scheme, self.endpoints)
    }

    /// For each cycle, the half-open span `[lo, hi)` obtained from the leftmost
    /// beginning coordinate and the total beginning length of the cycle.
    pub fn segment_bounds(&self) -> Vec<(Rational, Rational)> {
        self.scheme
            .cycles()
            .iter()
            .map(|c| {
                let lo = c
                    .elements()
                    .iter()
                    .filter(|s| s.is_begin())
                    .map(|s| self.endpoints.get(s).clone())
                    .min()
                    .expect("cycle without beginning elements has no span");
                let total: Rational = c
                    .elements()
                    .iter()
                    .filter(|s| s.is_begin())
                    .map(|s| {
                        let img = self.scheme.apply(s);
                        self.endpoints.get(img) - self.endpoints.get(s)
                    })
                    .sum();
                let hi = &lo + total;
                (lo, hi)
            })
            .collect()
    }
}

/// One homogeneous balance row per cycle: beginning labels count positively,
/// ending labels negatively.
pub fn cycle_system(s: &Scheme) -> LinearSystem {
    let mut sys = LinearSystem::new(s.alphabet().iter().map(|l| l.as_str().to_string()))
        .expect("alphabet labels are unique");
    for cycle in s.cycles() {
        let mut row: BTreeMap<String, Rational> = BTreeMap::new();
        for e in cycle.elements() {
            let entry = row
                .entry(e.label.as_str().to_string())
                .or_insert_with(Rational::zero);
            match e.marker {
                Marker::Begin => *entry += Rational::from_integer(1.into()),
                Marker::End => *entry -= Rational::from_integer(1.into()),
            }
        }
        sys.add_row(&row).expect("row keys come from the alphabet");
    }
    sys
}

/// Whether every cycle balance row vanishes on `v`.
pub fn is_allowed(s: &Scheme, v: &LengthVector) -> Result<bool, LengthsError> {
    if v.len() != s.alphabet().len() {
        return Err(LengthsError::KeyMismatch(format!(
            "expected {} labels, got {}",
            s.alphabet().len(),
            v.len()
        )));
    }
    for l in s.alphabet() {
        if v.try_get(l).is_none() {
            return Err(LengthsError::KeyMismatch(l.to_string()));
        }
    }
    for cycle in s.cycles() {
        let mut sum = Rational::zero();
        for e in cycle.elements() {
            match e.marker {
                Marker::Begin => sum += v.get(&e.label),
                Marker::End => sum -= v.get(&e.label),
            }
        }
        if !sum.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Builds an endpoint vector realizing `v`: each cycle is walked from its
/// least element, whose coordinate is the anchor for that cycle (0 when
/// absent), adding the label length at beginnings and subtracting it at
/// endings. The walk closes exactly because `v` is allowed.
pub fn endpoints_from_lengths(
    s: &Scheme,
    v: &LengthVector,
    anchors: &BTreeMap<DoubledSymbol, Rational>,
) -> Result<EndpointVector, LengthsError> {
    if !is_allowed(s, v)? {
        return Err(LengthsError::NotAllowed);
    }
    let mut x = BTreeMap::new();
    for cycle in s.cycles() {
        let start = cycle.least();
        let mut coord = anchors.get(start).cloned().unwrap_or_else(Rational::zero);
        let mut cur = start.clone();
        loop {
            x.insert(cur.clone(), coord.clone());
            let step = v.get(&cur.label);
            coord = match cur.marker {
                Marker::Begin => coord + step,
                Marker::End => coord - step,
            };
            cur = s.apply(&cur).clone();
            if cur == *start {
                break;
            }
        }
    }
    Ok(EndpointVector(x))
}

/// Recovers the length vector of an endpoint vector, checking that the two
/// expressions of each length agree exactly.
pub fn lengths_from_endpoints(
    s: &Scheme,
    x: &EndpointVector,
) -> Result<LengthVector, LengthsError> {
    let mut v = BTreeMap::new();
    for l in s.alphabet() {
        let bsym = DoubledSymbol::begin(l);
        let esym = DoubledSymbol::end(l);
        let xb = x
            .try_get(&bsym)
            .ok_or_else(|| LengthsError::KeyMismatch(bsym.to_string()))?;
        let xe = x
            .try_get(&esym)
            .ok_or_else(|| LengthsError::KeyMismatch(esym.to_string()))?;
        let from_begin = x
            .try_get(s.apply(&bsym))
            .ok_or_else(|| LengthsError::KeyMismatch(s.apply(&bsym).to_string()))?
            - xb;
        let from_end = xe
            - x.try_get(s.apply(&esym))
                .ok_or_else(|| LengthsError::KeyMismatch(s.apply(&esym).to_string()))?;
        if from_begin != from_end {
            return Err(LengthsError::Inconsistent(l.to_string()));
        }
        v.insert(l.clone(), from_begin);
    }
    Ok(LengthVector(v))
}

/// Whether the scheme allows a strictly positive length vector.
pub fn is_positive_scheme(s: &Scheme) -> bool {
    cycle_system(s).positive_solution().is_some()
}

/// Positive and zero-twist.
pub fn is_interval_exchange_scheme(s: &Scheme) -> bool {
    s.is_zero_twist() && is_positive_scheme(s)
}

/// An interval exchange scheme whose dual is an interval exchange scheme too.
pub fn is_rotational(s: &Scheme) -> bool {
    is_interval_exchange_scheme(s) && is_interval_exchange_scheme(&s.dual())
}

/// Whether every allowed length vector assigns `a` and `b` the same length.
pub fn equal_with_necessity(s: &Scheme, a: &Label, b: &Label) -> bool {
    if a == b {
        return true;
    }
    let sys = cycle_system(s);
    let mut target: BTreeMap<String, Rational> = BTreeMap::new();
    target.insert(a.as_str().to_string(), Rational::from_integer(1.into()));
    target.insert(b.as_str().to_string(), Rational::from_integer((-1).into()));
    sys.in_row_space(&target)
        .expect("labels come from the alphabet")
}

/// A strictly positive allowed length vector.
pub fn sample_positive_allowed(s: &Scheme) -> Result<LengthVector, LengthsError> {
    let witness = cycle_system(s)
        .positive_solution()
        .ok_or(LengthsError::NotPositive)?;
    Ok(s.alphabet()
        .iter()
        .map(|l| (l.clone(), witness[l.as_str()].clone()))
        .collect())
}

/// A strictly positive allowed vector with different lengths at `a` and `b`.
/// Starts from a positive witness and moves along a solution-space direction
/// separating the two labels, with a step small enough to stay positive.
pub fn allowed_with_unequal(
    s: &Scheme,
    a: &Label,
    b: &Label,
) -> Result<LengthVector, LengthsError> {
    if equal_with_necessity(s, a, b) {
        return Err(LengthsError::Necessity(a.to_string(), b.to_string()));
    }
    let base = sample_positive_allowed(s)?;
    let sys = cycle_system(s);
    let zero = Rational::zero;
    let direction = sys
        .nullspace_basis()
        .into_iter()
        .find(|z| {
            z.get(a.as_str()).cloned().unwrap_or_else(zero)
                != z.get(b.as_str()).cloned().unwrap_or_else(zero)
        })
        .expect("lengths not forced equal, so a separating direction exists");
    let component = |l: &Label| direction.get(l.as_str()).cloned().unwrap_or_else(zero);

    // Largest safe step: keep every entry strictly positive.
    let mut step: Option<Rational> = None;
    for (l, v0) in base.iter() {
        let z = component(l);
        if z.is_negative() {
            let bound = v0 / (Rational::from_integer(2.into()) * -z);
            if step.as_ref().map_or(true, |t| bound < *t) {
                step = Some(bound);
            }
        }
    }
    let mut t = step.unwrap_or_else(|| Rational::from_integer(1.into()));
    let build = |t: &Rational| -> LengthVector {
        base.iter()
            .map(|(l, v0)| (l.clone(), v0 + t * component(l)))
            .collect()
    };
    let mut candidate = build(&t);
    if candidate.get(a) == candidate.get(b) {
        // The step landed exactly on the equalizing value; halving leaves it.
        t /= Rational::from_integer(2.into());
        candidate = build(&t);
    }
    debug_assert!(candidate.is_positive());
    debug_assert!(is_allowed(s, &candidate).unwrap());
    debug_assert_ne!(candidate.get(a), candidate.get(b));
    Ok(candidate)
}

/// Witness that a scheme is splittable: one cycle cut into two arcs and the
/// remaining cycles assigned to two sides respecting a label bipartition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitCertificate {
    pub cycle: Cycle,
    pub arc_first: Vec<DoubledSymbol>,
    pub arc_second: Vec<DoubledSymbol>,
    pub side_first: BTreeSet<Label>,
    pub side_second: BTreeSet<Label>,
}

impl SplitCertificate {
    /// Re-checks the certificate against the definition.
    pub fn verify(&self, s: &Scheme) -> bool {
        if self.arc_first.is_empty() || self.arc_second.is_empty() {
            return false;
        }
        if self.side_first.is_empty() || self.side_second.is_empty() {
            return false;
        }
        if !self.side_first.is_disjoint(&self.side_second) {
            return false;
        }
        let all: BTreeSet<Label> = s.alphabet().iter().cloned().collect();
        let union: BTreeSet<Label> = self.side_first.union(&self.side_second).cloned().collect();
        if union != all {
            return false;
        }
        // Concatenated arcs must be a rotation of the split cycle.
        let mut joined = self.arc_first.clone();
        joined.extend(self.arc_second.iter().cloned());
        let elems = self.cycle.elements();
        if joined.len() != elems.len() {
            return false;
        }
        let rotation_ok = (0..elems.len())
            .any(|off| (0..elems.len()).all(|i| joined[i] == elems[(i + off) % elems.len()]));
        if !rotation_ok {
            return false;
        }
        // Each consecutive pair inside an arc must follow the permutation.
        for arc in [&self.arc_first, &self.arc_second] {
            for pair in arc.windows(2) {
                if s.apply(&pair[0]) != &pair[1] {
                    return false;
                }
            }
        }
        if !self
            .arc_first
            .iter()
            .all(|e| self.side_first.contains(&e.label))
        {
            return false;
        }
        if !self
            .arc_second
            .iter()
            .all(|e| self.side_second.contains(&e.label))
        {
            return false;
        }
        for c in s.cycles() {
            if c == self.cycle {
                continue;
            }
            let labels = c.labels();
            let in_first = labels.is_subset(&self.side_first);
            let in_second = labels.is_subset(&self.side_second);
            if !in_first && !in_second {
                return false;
            }
        }
        true
    }
}

/// Searches for a split certificate by enumerating a cycle and a cut pair,
/// then propagating whole-cycle label closure. Cycles touching neither side
/// go to the first side; the definition allows any assignment for them.
/// Intended for zero-twist schemes.
pub fn is_splittable(s: &Scheme) -> Option<SplitCertificate> {
    if s.alphabet().len() < 2 {
        return None;
    }
    let cycles = s.cycles();
    for (ci, c0) in cycles.iter().enumerate() {
        let k = c0.len();
        if k < 2 {
            continue;
        }
        let elems = c0.elements();
        for i in 0..k {
            for j in 0..k {
                if i == j {
                    continue;
                }
                // Arc 1 runs (i..j], arc 2 runs (j..i], cyclically.
                let take = |from: usize, to: usize| -> Vec<DoubledSymbol> {
                    let mut out = Vec::new();
                    let mut p = (from + 1) % k;
                    loop {
                        out.push(elems[p].clone());
                        if p == to {
                            break;
                        }
                        p = (p + 1) % k;
                    }
                    out
                };
                let arc1 = take(i, j);
                let arc2 = take(j, i);
                let side1: BTreeSet<Label> = arc1.iter().map(|e| e.label.clone()).collect();
                let side2: BTreeSet<Label> = arc2.iter().map(|e| e.label.clone()).collect();
                if !side1.is_disjoint(&side2) {
                    continue;
                }
                if let Some(cert) = close_sides(s, &cycles, ci, c0, arc1, arc2, side1, side2) {
                    return Some(cert);
                }
            }
        }
    }
    None
}

fn close_sides(
    s: &Scheme,
    cycles: &[Cycle],
    split_idx: usize,
    c0: &Cycle,
    arc1: Vec<DoubledSymbol>,
    arc2: Vec<DoubledSymbol>,
    mut side1: BTreeSet<Label>,
    mut side2: BTreeSet<Label>,
) -> Option<SplitCertificate> {
    let mut assignment: Vec<Option<bool>> = vec![None; cycles.len()];
    loop {
        let mut changed = false;
        for (i, c) in cycles.iter().enumerate() {
            if i == split_idx || assignment[i].is_some() {
                continue;
            }
            let labels = c.labels();
            let touches1 = labels.iter().any(|l| side1.contains(l));
            let touches2 = labels.iter().any(|l| side2.contains(l));
            match (touches1, touches2) {
                (true, true) => return None,
                (true, false) => {
                    side1.extend(labels);
                    assignment[i] = Some(true);
                    changed = true;
                }
                (false, true) => {
                    side2.extend(labels);
                    assignment[i] = Some(false);
                    changed = true;
                }
                (false, false) => {}
            }
        }
        if !changed {
            break;
        }
    }
    if !side1.is_disjoint(&side2) {
        return None;
    }
    // Unconstrained cycles join the first side.
    for (i, c) in cycles.iter().enumerate() {
        if i != split_idx && assignment[i].is_none() {
            side1.extend(c.labels());
        }
    }
    let cert = SplitCertificate {
        cycle: c0.clone(),
        arc_first: arc1,
        arc_second: arc2,
        side_first: side1,
        side_second: side2,
    };
    cert.verify(s).then_some(cert)
}

/// A label bijection under which the two floating IREs have the same scheme
/// and identical lengths, or `None`.
pub fn shift_equivalence(
    first: &FloatingIRE,
    second: &FloatingIRE,
) -> Option<BTreeMap<Label, Label>> {
    first.scheme().relabeling_with(second.scheme(), |a, b| {
        first.lengths().get(a) == second.lengths().get(b)
    })
}
