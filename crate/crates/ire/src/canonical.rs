//! Reduction of an irreducible rotational interval exchange to its canonical
//! form: one four-element main cycle feeding two chains of two-element cycles,
//! with all chain lengths forced equal. The reduction works on the dual
//! scheme, shrinking one dual cycle at a time and merging it away once it has
//! two elements; every operation applied to the primal exchange is an inverse
//! induction step or a merge, recorded in a replayable transcript.

use crate::exact::Rational;
use crate::induction::{
    apply_step, merge_intervals, Direction, InductionError, InductionStep, StepKind, Transcript,
    TranscriptOp,
};
use crate::lengths::{
    allowed_with_unequal, is_allowed, is_rotational, sample_positive_allowed, FloatingIRE,
    LengthVector, LengthsError,
};
use crate::scheme::{Cycle, DoubledSymbol, Label, Scheme};
use num::Signed;
use std::collections::BTreeSet;
use std::fmt;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CanonicalError {
    #[error("scheme is not rotational")]
    NotRotational,
    #[error("scheme is not irreducible")]
    NotIrreducible,
    #[error("length vector is not strictly positive")]
    NonPositiveLengths,
    #[error("step budget of {0} exceeded; this indicates a bug, not an input property")]
    BudgetExceeded(usize),
    #[error("cancelled")]
    Cancelled,
    #[error("selected cycle already has two or fewer elements")]
    CycleTooSmall,
    #[error("the dual scheme has a single cycle; per-cycle reduction needs several cycles")]
    SingleCycle,
    #[error("invalid canonical form data: {0}")]
    BadForm(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl From<InductionError> for CanonicalError {
    fn from(e: InductionError) -> Self {
        CanonicalError::Internal(e.to_string())
    }
}

impl From<LengthsError> for CanonicalError {
    fn from(e: LengthsError) -> Self {
        CanonicalError::Internal(e.to_string())
    }
}

/// The canonical shape: main cycle `[a1 b1 | bn am]`, chains `[a(i+1) | a(i)]`
/// and `[b(j+1) | b(j)]`, equal lengths along each chain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalForm {
    alphas: Vec<Label>,
    betas: Vec<Label>,
    v_alpha: Rational,
    v_beta: Rational,
}

impl CanonicalForm {
    pub fn new(
        alphas: Vec<Label>,
        betas: Vec<Label>,
        v_alpha: Rational,
        v_beta: Rational,
    ) -> Result<CanonicalForm, CanonicalError> {
        if alphas.is_empty() || betas.is_empty() {
            return Err(CanonicalError::BadForm("empty chain".to_string()));
        }
        let mut seen = BTreeSet::new();
        for l in alphas.iter().chain(betas.iter()) {
            if !seen.insert(l.clone()) {
                return Err(CanonicalError::BadForm(format!("repeated label `{l}`")));
            }
        }
        if !v_alpha.is_positive() || !v_beta.is_positive() {
            return Err(CanonicalError::BadForm("non-positive length".to_string()));
        }
        Ok(CanonicalForm {
            alphas,
            betas,
            v_alpha,
            v_beta,
        })
    }

    pub fn m(&self) -> usize {
        self.alphas.len()
    }

    pub fn n(&self) -> usize {
        self.betas.len()
    }

    pub fn alphas(&self) -> &[Label] {
        &self.alphas
    }

    pub fn betas(&self) -> &[Label] {
        &self.betas
    }

    pub fn v_alpha(&self) -> &Rational {
        &self.v_alpha
    }

    pub fn v_beta(&self) -> &Rational {
        &self.v_beta
    }

    pub fn with_v_beta(&self, v_beta: Rational) -> Result<CanonicalForm, CanonicalError> {
        CanonicalForm::new(
            self.alphas.clone(),
            self.betas.clone(),
            self.v_alpha.clone(),
            v_beta,
        )
    }

    /// The floating IRE this form denotes.
    pub fn expand(&self) -> FloatingIRE {
        let mut cycles: Vec<Vec<DoubledSymbol>> = Vec::new();
        let a1 = &self.alphas[0];
        let am = self.alphas.last().unwrap();
        let b1 = &self.betas[0];
        let bn = self.betas.last().unwrap();
        cycles.push(vec![
            DoubledSymbol::begin(a1),
            DoubledSymbol::begin(b1),
            DoubledSymbol::end(am),
            DoubledSymbol::end(bn),
        ]);
        for pair in self.alphas.windows(2) {
            cycles.push(vec![
                DoubledSymbol::begin(&pair[1]),
                DoubledSymbol::end(&pair[0]),
            ]);
        }
        for pair in self.betas.windows(2) {
            cycles.push(vec![
                DoubledSymbol::begin(&pair[1]),
                DoubledSymbol::end(&pair[0]),
            ]);
        }
        let scheme = Scheme::from_cycles(&cycles).expect("canonical cycles are disjoint");
        let lengths: LengthVector = self
            .alphas
            .iter()
            .map(|l| (l.clone(), self.v_alpha.clone()))
            .chain(self.betas.iter().map(|l| (l.clone(), self.v_beta.clone())))
            .collect();
        FloatingIRE::new(scheme, lengths).expect("canonical lengths are allowed")
    }

    /// The single cycle of the dual of the expanded scheme:
    /// `[b1..bn a1..am | a1..am b1..bn]`.
    pub fn dual_single_cycle(&self) -> Cycle {
        let top: Vec<Label> = self
            .betas
            .iter()
            .chain(self.alphas.iter())
            .cloned()
            .collect();
        let bottom: Vec<Label> = self
            .alphas
            .iter()
            .chain(self.betas.iter())
            .cloned()
            .collect();
        Cycle::from_two_row(&top, &bottom).expect("distinct labels")
    }
}

impl fmt::Display for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |ls: &[Label]| {
            ls.iter()
                .map(Label::to_string)
                .collect::<Vec<_>>()
                .join(",")
        };
        write!(
            f,
            "CANON m={} n={} alpha={} beta={} v_alpha={} v_beta={}",
            self.m(),
            self.n(),
            join(&self.alphas),
            join(&self.betas),
            self.v_alpha,
            self.v_beta
        )
    }
}

/// Parses a floating IRE against the canonical shape: exactly one
/// begin-to-begin and one end-to-end place, a four-element main cycle, chain
/// cycles linking the two distinguished pairs, full label coverage, and equal
/// lengths along each chain.
pub fn is_canonical(ire: &FloatingIRE) -> Option<CanonicalForm> {
    let s = ire.scheme();
    let d = s.alphabet().len();
    if d < 2 {
        return None;
    }
    let mut bb_place = None;
    let mut ee_place = None;
    for l in s.alphabet() {
        let ib = s.apply(&DoubledSymbol::begin(l));
        if ib.is_begin() && bb_place.replace((l.clone(), ib.label.clone())).is_some() {
            return None;
        }
        let ie = s.apply(&DoubledSymbol::end(l));
        if ie.is_end() && ee_place.replace((l.clone(), ie.label.clone())).is_some() {
            return None;
        }
    }
    let (a1, b1) = bb_place?;
    let (am, bn) = ee_place?;
    // Main cycle: a1.b -> b1.b -> am.e -> bn.e -> a1.b.
    let after_b1 = s.apply(&DoubledSymbol::begin(&b1));
    if !after_b1.is_end() || after_b1.label != am {
        return None;
    }
    if s.apply(&DoubledSymbol::end(&bn)) != &DoubledSymbol::begin(&a1) {
        return None;
    }
    let walk_chain = |first: &Label, last: &Label| -> Option<Vec<Label>> {
        let mut chain = vec![first.clone()];
        let mut cur = first.clone();
        while cur != *last {
            if chain.len() > d {
                return None;
            }
            let pre = s.apply_inv(&DoubledSymbol::end(&cur));
            if !pre.is_begin() {
                return None;
            }
            let next = pre.label.clone();
            // The link must be a two-element cycle [next | cur].
            if s.apply(&DoubledSymbol::end(&cur)) != &DoubledSymbol::begin(&next) {
                return None;
            }
            chain.push(next.clone());
            cur = next;
        }
        Some(chain)
    };
    let alphas = walk_chain(&a1, &am)?;
    let betas = walk_chain(&b1, &bn)?;
    if alphas.len() + betas.len() != d {
        return None;
    }
    let set: BTreeSet<&Label> = alphas.iter().chain(betas.iter()).collect();
    if set.len() != d {
        return None;
    }
    let v_alpha = ire.lengths().get(&alphas[0]).clone();
    let v_beta = ire.lengths().get(&betas[0]).clone();
    if !alphas.iter().all(|l| ire.lengths().get(l) == &v_alpha) {
        return None;
    }
    if !betas.iter().all(|l| ire.lengths().get(l) == &v_beta) {
        return None;
    }
    let form = CanonicalForm::new(alphas, betas, v_alpha, v_beta).ok()?;
    (form.expand() == *ire).then_some(form)
}

/// Position of the leftmost label pair of a dual cycle relative to that cycle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReductionCase {
    /// The cycle is already two-element and ready to merge away.
    TwoElement,
    /// Neither the top-left ending nor the bottom-left beginning lies in the
    /// cycle; a separating length vector decides which crop applies.
    BothOutside,
    /// Only the bottom-left label's beginning lies in the cycle; its length is
    /// unconstrained, so the beginning-side crop applies.
    BeginningInside,
    /// Only the top-left label's ending lies in the cycle; symmetric to
    /// [`ReductionCase::BeginningInside`], the ending-side crop applies.
    EndingInside,
    /// Both lie in the cycle; crops rearrange it cyclically until one of the
    /// other cases is reached.
    BothInside,
}

/// Classifies a zero-twist cycle of the dual scheme by membership of the
/// leftmost pair's opposite elements.
pub fn classify_situation(dual: &Scheme, c0: &Cycle) -> ReductionCase {
    if c0.len() == 2 {
        return ReductionCase::TwoElement;
    }
    debug_assert!(dual.contains_label(&c0.least().label));
    let (top, bottom) = c0.two_row().expect("cycle must be two-row");
    let alpha = &top[0];
    let beta = &bottom[0];
    let ae_in = c0.contains(&DoubledSymbol::end(alpha));
    let bb_in = c0.contains(&DoubledSymbol::begin(beta));
    match (ae_in, bb_in) {
        (false, false) => ReductionCase::BothOutside,
        (false, true) => ReductionCase::BeginningInside,
        (true, false) => ReductionCase::EndingInside,
        (true, true) => ReductionCase::BothInside,
    }
}

/// Options for [`canonicalize_with`].
#[derive(Clone, Default)]
pub struct CanonicalizeOptions {
    /// Maximum number of primal operations; `None` uses `10 * d * 2^d`.
    pub step_budget: Option<usize>,
    /// Cooperative cancellation flag checked before every operation.
    pub cancel: Option<Arc<AtomicBool>>,
}

fn default_budget(d: usize) -> usize {
    10usize
        .saturating_mul(d)
        .saturating_mul(1usize.checked_shl(d.min(40) as u32).unwrap_or(usize::MAX))
        .max(1024)
}

struct Reducer {
    budget: usize,
    used: usize,
    cancel: Option<Arc<AtomicBool>>,
    transcript: Transcript,
    /// A strictly positive length vector allowed by the current dual scheme.
    /// Maintained through every operation, it certifies that each
    /// intermediate state stays rotational without re-solving for a witness.
    witness: LengthVector,
}

impl Reducer {
    fn charge(&mut self) -> Result<(), CanonicalError> {
        if let Some(flag) = &self.cancel {
            if flag.load(Ordering::Relaxed) {
                return Err(CanonicalError::Cancelled);
            }
        }
        if self.used >= self.budget {
            return Err(CanonicalError::BudgetExceeded(self.budget));
        }
        self.used += 1;
        Ok(())
    }

    fn check_state(&self, ire: &FloatingIRE) -> Result<(), CanonicalError> {
        let fail = |msg: &str| CanonicalError::Internal(msg.to_string());
        if !ire.lengths().is_positive() {
            return Err(fail("intermediate lengths lost positivity"));
        }
        if !ire.scheme().is_zero_twist() {
            return Err(fail("intermediate scheme became twisted"));
        }
        let dual = ire.scheme().dual();
        if !dual.is_zero_twist() {
            return Err(fail("intermediate dual became twisted"));
        }
        if !self.witness.is_positive() || !is_allowed(&dual, &self.witness).unwrap_or(false) {
            return Err(fail("dual witness lost validity"));
        }
        if !ire.scheme().is_irreducible() {
            return Err(fail("intermediate scheme became reducible"));
        }
        Ok(())
    }

    /// Overwrites the witness entry of a label both of whose elements lie in
    /// one cycle; such a length enters that cycle's balance row with net
    /// coefficient zero and no other row, so any positive value stays allowed.
    fn set_free_entry(&mut self, label: &Label, value: Rational) {
        self.witness.set(label, value);
    }

    /// Lowers the witness entry of a free label strictly below its partner's
    /// so the upcoming crop keeps the witness positive.
    fn lower_free_below(&mut self, free: &Label, partner: &Label) {
        let v = self.witness.get(partner) / Rational::from_integer(2.into());
        self.set_free_entry(free, v);
    }

    /// One dual-side crop at the pair `(alpha, beta)`: records the matching
    /// primal inverse step and shortens the cropped witness entry by the
    /// other, mirroring the dual-side length transformation. The crop on the
    /// beginning side at `(alpha, beta)` corresponds to the inverse
    /// ending-right crop at `(alpha, beta)`; the ending-side crop to the
    /// inverse ending-left crop at `(beta, alpha)`.
    fn apply_crop(
        &mut self,
        cur: &mut FloatingIRE,
        kind: StepKind,
        alpha: &Label,
        beta: &Label,
    ) -> Result<(), CanonicalError> {
        self.charge()?;
        let primal = match kind {
            StepKind::Lb => InductionStep::new(
                StepKind::Re,
                Direction::Inverse,
                alpha.clone(),
                beta.clone(),
            ),
            StepKind::Le => InductionStep::new(
                StepKind::Le,
                Direction::Inverse,
                beta.clone(),
                alpha.clone(),
            ),
            _ => unreachable!("only left-side crops occur"),
        };
        *cur = apply_step(cur, &primal)?;
        self.transcript.push(TranscriptOp::Step(primal));
        match kind {
            StepKind::Lb => {
                let v = self.witness.get(alpha) - self.witness.get(beta);
                self.witness.set(alpha, v);
            }
            StepKind::Le => {
                let v = self.witness.get(beta) - self.witness.get(alpha);
                self.witness.set(beta, v);
            }
            _ => unreachable!(),
        }
        self.check_state(cur)
    }

    /// Applies one progress unit at the leftmost pair of the tracked cycle:
    /// a single crop when the case moves an element out of the cycle, or one
    /// whole cyclic rearrangement chain when both opposite elements lie
    /// inside. Returns the element that identifies the tracked cycle
    /// afterwards.
    fn crop_once(
        &mut self,
        cur: &mut FloatingIRE,
        tracked: &DoubledSymbol,
    ) -> Result<DoubledSymbol, CanonicalError> {
        let dual = cur.scheme().dual();
        let c0 = dual.cycle_of(tracked);
        let (top, bottom) = c0
            .two_row()
            .map_err(|e| CanonicalError::Internal(e.to_string()))?;
        let alpha = top[0].clone();
        let beta = bottom[0].clone();
        if alpha == beta {
            return Err(CanonicalError::Internal(
                "leftmost pair collapsed to a single label".to_string(),
            ));
        }
        match classify_situation(&dual, &c0) {
            ReductionCase::TwoElement => Err(CanonicalError::CycleTooSmall),
            ReductionCase::BothOutside => {
                // Neither length is free: pick the crop direction from a
                // witness separating the two, which exists because the scheme
                // is rotational.
                if self.witness.get(&alpha) == self.witness.get(&beta) {
                    self.witness = allowed_with_unequal(&dual, &alpha, &beta)
                        .map_err(|e| CanonicalError::Internal(e.to_string()))?;
                }
                if self.witness.get(&alpha) > self.witness.get(&beta) {
                    self.apply_crop(cur, StepKind::Lb, &alpha, &beta)?;
                    Ok(DoubledSymbol::begin(&alpha))
                } else {
                    self.apply_crop(cur, StepKind::Le, &alpha, &beta)?;
                    Ok(DoubledSymbol::end(&beta))
                }
            }
            ReductionCase::BeginningInside => {
                let v = self.witness.get(&alpha) / Rational::from_integer(2.into());
                self.set_free_entry(&beta, v);
                self.apply_crop(cur, StepKind::Lb, &alpha, &beta)?;
                Ok(DoubledSymbol::begin(&alpha))
            }
            ReductionCase::EndingInside => {
                let v = self.witness.get(&beta) / Rational::from_integer(2.into());
                self.set_free_entry(&alpha, v);
                self.apply_crop(cur, StepKind::Le, &alpha, &beta)?;
                Ok(DoubledSymbol::end(&beta))
            }
            ReductionCase::BothInside => self.rearrangement_chain(cur, &c0, &top, &bottom),
        }
    }

    /// Both opposite elements of the leftmost pair lie in the cycle, so a
    /// crop only rearranges one row cyclically. Plan one whole chain — up to
    /// the first label whose opposite element leaves the cycle, or failing
    /// that the first label missing from the other left run — and apply it
    /// atomically. The next call then finds a shrinking case or a strictly
    /// longer left run, which bounds the number of chains.
    fn rearrangement_chain(
        &mut self,
        cur: &mut FloatingIRE,
        c0: &Cycle,
        top: &[Label],
        bottom: &[Label],
    ) -> Result<DoubledSymbol, CanonicalError> {
        let alpha = top[0].clone();
        let beta = bottom[0].clone();
        let m = bottom
            .iter()
            .position(|l| l == &alpha)
            .ok_or_else(|| CanonicalError::Internal("missing ending".to_string()))?;
        let n = top
            .iter()
            .position(|l| l == &beta)
            .ok_or_else(|| CanonicalError::Internal("missing beginning".to_string()))?;
        let outside_bottom = (1..m).find(|&i| !c0.contains(&DoubledSymbol::begin(&bottom[i])));
        let outside_top = (1..n).find(|&j| !c0.contains(&DoubledSymbol::end(&top[j])));
        let (kind, count) = if let Some(i) = outside_bottom {
            (StepKind::Lb, i)
        } else if let Some(j) = outside_top {
            (StepKind::Le, j)
        } else {
            let alpha_set: BTreeSet<&Label> = top[1..n].iter().collect();
            let beta_set: BTreeSet<&Label> = bottom[1..m].iter().collect();
            if let Some(i) = (1..m).find(|&i| !alpha_set.contains(&bottom[i])) {
                (StepKind::Lb, i)
            } else if let Some(j) = (1..n).find(|&j| !beta_set.contains(&top[j])) {
                (StepKind::Le, j)
            } else {
                return Err(CanonicalError::Internal(
                    "left runs coincide; scheme would be splittable or reducible".to_string(),
                ));
            }
        };
        // Along the chain one end of the pair is pinned; the other rotates
        // through labels whose elements all lie in the cycle, so each is free.
        let anchor = match kind {
            StepKind::Lb => DoubledSymbol::begin(&alpha),
            StepKind::Le => DoubledSymbol::end(&beta),
            _ => unreachable!(),
        };
        for _ in 0..count {
            let c = cur.scheme().dual().cycle_of(&anchor);
            let (t, b) = c
                .two_row()
                .map_err(|e| CanonicalError::Internal(e.to_string()))?;
            let (a_now, b_now) = (t[0].clone(), b[0].clone());
            match kind {
                StepKind::Lb => {
                    debug_assert_eq!(a_now, alpha);
                    self.lower_free_below(&b_now, &a_now);
                    self.apply_crop(cur, StepKind::Lb, &a_now, &b_now)?;
                }
                StepKind::Le => {
                    debug_assert_eq!(b_now, beta);
                    self.lower_free_below(&a_now, &b_now);
                    self.apply_crop(cur, StepKind::Le, &a_now, &b_now)?;
                }
                _ => unreachable!(),
            }
        }
        Ok(anchor)
    }

    /// Endgame crop once the dual is a single cycle: the ending-left crop at
    /// the leftmost pair, which cyclically rearranges the top row until the
    /// canonical parse succeeds. The general case split does not apply here
    /// because every element lies in the one cycle.
    fn endgame_crop(&mut self, cur: &mut FloatingIRE, c0: &Cycle) -> Result<(), CanonicalError> {
        self.charge()?;
        let (top, bottom) = c0
            .two_row()
            .map_err(|e| CanonicalError::Internal(e.to_string()))?;
        let t = top[0].clone();
        let b = bottom[0].clone();
        // Every length is free in the single remaining cycle.
        let half = self.witness.get(&b) / Rational::from_integer(2.into());
        self.set_free_entry(&t, half);
        let primal = InductionStep::new(StepKind::Le, Direction::Inverse, b.clone(), t.clone());
        *cur = apply_step(cur, &primal)?;
        self.transcript.push(TranscriptOp::Step(primal));
        let v = self.witness.get(&b) - self.witness.get(&t);
        self.witness.set(&b, v);
        self.check_state(cur)
    }

    /// Merges away a two-element dual cycle `[removed | survivor]`.
    fn merge_two_element(
        &mut self,
        cur: &mut FloatingIRE,
        two: &Cycle,
    ) -> Result<(), CanonicalError> {
        self.charge()?;
        let (top, bottom) = two
            .two_row()
            .map_err(|e| CanonicalError::Internal(e.to_string()))?;
        let survivor = bottom[0].clone();
        let removed = top[0].clone();
        let (next, op) = merge_intervals(cur, &survivor, &removed)?;
        *cur = next;
        self.transcript.push(TranscriptOp::Merge(op));
        // The two-element cycle forced the two witness entries equal; the
        // merged dual simply drops the removed one.
        debug_assert_eq!(self.witness.get(&survivor), self.witness.get(&removed));
        self.witness.remove(&removed);
        self.check_state(cur)
    }
}

/// Shrinks the tracked dual cycle by one element, applying as many crops as
/// the cyclic rearrangement case requires. Returns the transformed exchange
/// and the primal operations applied.
pub fn reduce_cycle_once(
    ire: &FloatingIRE,
    tracked: &DoubledSymbol,
) -> Result<(FloatingIRE, Vec<TranscriptOp>), CanonicalError> {
    validate_input(ire)?;
    if ire.scheme().dual().cycles().len() == 1 {
        return Err(CanonicalError::SingleCycle);
    }
    let d = ire.scheme().alphabet().len();
    let mut reducer = Reducer {
        budget: default_budget(d),
        used: 0,
        cancel: None,
        transcript: Transcript::new(),
        witness: sample_positive_allowed(&ire.scheme().dual())
            .map_err(|_| CanonicalError::NotRotational)?,
    };
    let mut cur = ire.clone();
    let initial = cur.scheme().dual().cycle_of(tracked).len();
    if initial <= 2 {
        return Err(CanonicalError::CycleTooSmall);
    }
    let mut tracked = tracked.clone();
    loop {
        tracked = reducer.crop_once(&mut cur, &tracked)?;
        if cur.scheme().dual().cycle_of(&tracked).len() < initial {
            break;
        }
    }
    Ok((cur, reducer.transcript.ops().to_vec()))
}

fn validate_input(ire: &FloatingIRE) -> Result<(), CanonicalError> {
    if !ire.lengths().is_positive() {
        return Err(CanonicalError::NonPositiveLengths);
    }
    if !is_rotational(ire.scheme()) {
        return Err(CanonicalError::NotRotational);
    }
    if !ire.scheme().is_irreducible() {
        return Err(CanonicalError::NotIrreducible);
    }
    Ok(())
}

/// Transforms an irreducible rotational interval exchange into canonical form,
/// returning the form and the exact transcript of inverse steps and merges
/// applied to the input. Replaying the transcript forward from the input
/// reproduces the canonical expansion; backward replay recovers the input.
pub fn canonicalize(ire: &FloatingIRE) -> Result<(CanonicalForm, Transcript), CanonicalError> {
    canonicalize_with(ire, &CanonicalizeOptions::default())
}

pub fn canonicalize_with(
    ire: &FloatingIRE,
    options: &CanonicalizeOptions,
) -> Result<(CanonicalForm, Transcript), CanonicalError> {
    validate_input(ire)?;
    let d = ire.scheme().alphabet().len();
    let mut reducer = Reducer {
        budget: options.step_budget.unwrap_or_else(|| default_budget(d)),
        used: 0,
        cancel: options.cancel.clone(),
        transcript: Transcript::new(),
        witness: sample_positive_allowed(&ire.scheme().dual())
            .map_err(|_| CanonicalError::NotRotational)?,
    };
    let mut cur = ire.clone();
    loop {
        let dual = cur.scheme().dual();
        let cycles = dual.cycles();
        if cycles.len() == 1 {
            if let Some(form) = is_canonical(&cur) {
                return Ok((form, reducer.transcript));
            }
            reducer.endgame_crop(&mut cur, &cycles[0])?;
            continue;
        }
        if let Some(two) = cycles.iter().find(|c| c.len() == 2) {
            reducer.merge_two_element(&mut cur, two)?;
            continue;
        }
        // All dual cycles have more than two elements; shrink the one with
        // the least element until it can be merged away.
        let mut tracked = cycles[0].least().clone();
        loop {
            let c0 = cur.scheme().dual().cycle_of(&tracked);
            if c0.len() <= 2 {
                break;
            }
            tracked = reducer.crop_once(&mut cur, &tracked)?;
        }
    }
}
