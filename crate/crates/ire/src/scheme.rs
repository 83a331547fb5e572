//! The discrete component of an interval rearrangement ensemble: doubled
//! alphabets, scheme permutations, cycle decomposition, twist numbers, the
//! duality involution, and irreducibility.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SchemeError {
    #[error("invalid label `{0}`: labels are non-empty tokens over [A-Za-z0-9_]")]
    InvalidLabel(String),
    #[error("duplicate element `{0}` in cycle description")]
    DuplicateElement(String),
    #[error("mapping is not a bijection of the doubled alphabet: problem near `{0}`")]
    NotBijective(String),
    #[error("element `{0}` is missing from the mapping")]
    IncompleteDomain(String),
    #[error("cycle is not two-row (twist number is not zero)")]
    NotTwoRow,
    #[error("empty cycle")]
    EmptyCycle,
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
}

/// Interval label: a non-empty token over `[A-Za-z0-9_]`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label(String);

impl Label {
    pub fn new(name: &str) -> Result<Label, SchemeError> {
        if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(SchemeError::InvalidLabel(name.to_string()));
        }
        Ok(Label(name.to_string()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Marker distinguishing the beginning and ending interval of a label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Marker {
    Begin,
    End,
}

impl Marker {
    pub fn letter(self) -> char {
        match self {
            Marker::Begin => 'b',
            Marker::End => 'e',
        }
    }
}

/// An element of the doubled alphabet `A x {b, e}`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DoubledSymbol {
    pub label: Label,
    pub marker: Marker,
}

impl DoubledSymbol {
    pub fn begin(label: &Label) -> DoubledSymbol {
        DoubledSymbol {
            label: label.clone(),
            marker: Marker::Begin,
        }
    }

    pub fn end(label: &Label) -> DoubledSymbol {
        DoubledSymbol {
            label: label.clone(),
            marker: Marker::End,
        }
    }

    pub fn is_begin(&self) -> bool {
        self.marker == Marker::Begin
    }

    pub fn is_end(&self) -> bool {
        self.marker == Marker::End
    }
}

impl fmt::Display for DoubledSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.label, self.marker.letter())
    }
}

impl fmt::Debug for DoubledSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// One cycle of a scheme permutation. Stored rotated so the lexicographically
/// least element comes first; consecutive elements satisfy
/// `perm(elements[i]) = elements[i + 1]` cyclically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cycle {
    elements: Vec<DoubledSymbol>,
}

impl Cycle {
    fn from_rotation(mut elements: Vec<DoubledSymbol>) -> Cycle {
        let least = elements
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.cmp(b.1))
            .map(|(i, _)| i)
            .expect("cycle must be non-empty");
        elements.rotate_left(least);
        Cycle { elements }
    }

    pub fn elements(&self) -> &[DoubledSymbol] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn least(&self) -> &DoubledSymbol {
        &self.elements[0]
    }

    pub fn contains(&self, s: &DoubledSymbol) -> bool {
        self.elements.contains(s)
    }

    pub fn labels(&self) -> BTreeSet<Label> {
        self.elements.iter().map(|s| s.label.clone()).collect()
    }

    /// Count of positions where a beginning element is followed by an ending
    /// element, minus one. A cycle of beginnings only (or endings only) has
    /// twist number -1.
    pub fn twist_number(&self) -> i64 {
        let k = self.elements.len();
        let mut count = 0i64;
        for i in 0..k {
            if self.elements[i].is_begin() && self.elements[(i + 1) % k].is_end() {
                count += 1;
            }
        }
        count - 1
    }

    /// Renders a zero-twist cycle in two-row notation: the top row lists the
    /// beginning labels left to right, the bottom row the ending labels left
    /// to right. The bottom row reverses cycle order.
    pub fn two_row(&self) -> Result<(Vec<Label>, Vec<Label>), SchemeError> {
        if self.twist_number() != 0 {
            return Err(SchemeError::NotTwoRow);
        }
        let k = self.elements.len();
        // Exactly one ending-to-beginning transition exists; start there.
        let start = (0..k)
            .find(|&i| self.elements[i].is_end() && self.elements[(i + 1) % k].is_begin())
            .ok_or(SchemeError::NotTwoRow)?;
        let mut top = Vec::new();
        let mut bottom_rev = Vec::new();
        for off in 1..=k {
            let s = &self.elements[(start + off) % k];
            if s.is_begin() {
                if !bottom_rev.is_empty() {
                    return Err(SchemeError::NotTwoRow);
                }
                top.push(s.label.clone());
            } else {
                bottom_rev.push(s.label.clone());
            }
        }
        bottom_rev.reverse();
        Ok((top, bottom_rev))
    }

    /// Rebuilds the cycle underlying a two-row description.
    pub fn from_two_row(top: &[Label], bottom: &[Label]) -> Result<Cycle, SchemeError> {
        if top.is_empty() && bottom.is_empty() {
            return Err(SchemeError::EmptyCycle);
        }
        let mut elements: Vec<DoubledSymbol> = top.iter().map(DoubledSymbol::begin).collect();
        elements.extend(bottom.iter().rev().map(DoubledSymbol::end));
        let mut seen = BTreeSet::new();
        for e in &elements {
            if !seen.insert(e.clone()) {
                return Err(SchemeError::DuplicateElement(e.to_string()));
            }
        }
        Ok(Cycle::from_rotation(elements))
    }
}

impl fmt::Display for Cycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.elements.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// An IRE scheme: a bijection of the doubled alphabet onto itself.
#[derive(Clone, PartialEq, Eq)]
pub struct Scheme {
    alphabet: Vec<Label>,
    perm: BTreeMap<DoubledSymbol, DoubledSymbol>,
}

impl Scheme {
    /// Builds a scheme from a full mapping. The alphabet is inferred from the
    /// keys and kept in sorted order; the mapping must be a bijection of
    /// exactly `alphabet x {b, e}`.
    pub fn new(perm: BTreeMap<DoubledSymbol, DoubledSymbol>) -> Result<Scheme, SchemeError> {
        let labels: BTreeSet<Label> = perm.keys().map(|s| s.label.clone()).collect();
        for l in &labels {
            for m in [Marker::Begin, Marker::End] {
                let s = DoubledSymbol {
                    label: l.clone(),
                    marker: m,
                };
                if !perm.contains_key(&s) {
                    return Err(SchemeError::IncompleteDomain(s.to_string()));
                }
            }
        }
        let domain: BTreeSet<&DoubledSymbol> = perm.keys().collect();
        let image: BTreeSet<&DoubledSymbol> = perm.values().collect();
        if domain != image {
            let witness = perm
                .values()
                .find(|v| !perm.contains_key(v))
                .map(|v| v.to_string())
                .unwrap_or_else(|| "duplicate image".to_string());
            return Err(SchemeError::NotBijective(witness));
        }
        Ok(Scheme {
            alphabet: labels.into_iter().collect(),
            perm,
        })
    }

    /// Builds a scheme from disjoint cycles covering the doubled alphabet.
    pub fn from_cycles(cycles: &[Vec<DoubledSymbol>]) -> Result<Scheme, SchemeError> {
        let mut perm = BTreeMap::new();
        for cycle in cycles {
            if cycle.is_empty() {
                return Err(SchemeError::EmptyCycle);
            }
            for (i, e) in cycle.iter().enumerate() {
                let next = cycle[(i + 1) % cycle.len()].clone();
                if perm.insert(e.clone(), next).is_some() {
                    return Err(SchemeError::DuplicateElement(e.to_string()));
                }
            }
        }
        Scheme::new(perm)
    }

    /// Convenience constructor from two-row cycles given as label strings.
    pub fn from_two_rows(cycles: &[(&[&str], &[&str])]) -> Result<Scheme, SchemeError> {
        let mut parsed = Vec::new();
        for (top, bottom) in cycles {
            let top: Vec<Label> = top
                .iter()
                .map(|s| Label::new(s))
                .collect::<Result<_, _>>()?;
            let bottom: Vec<Label> = bottom
                .iter()
                .map(|s| Label::new(s))
                .collect::<Result<_, _>>()?;
            parsed.push(Cycle::from_two_row(&top, &bottom)?.elements().to_vec());
        }
        Scheme::from_cycles(&parsed)
    }

    pub fn alphabet(&self) -> &[Label] {
        &self.alphabet
    }

    pub fn label(&self, name: &str) -> Result<Label, SchemeError> {
        self.alphabet
            .iter()
            .find(|l| l.as_str() == name)
            .cloned()
            .ok_or_else(|| SchemeError::UnknownLabel(name.to_string()))
    }

    pub fn contains_label(&self, l: &Label) -> bool {
        self.alphabet.binary_search(l).is_ok()
    }

    pub fn apply(&self, s: &DoubledSymbol) -> &DoubledSymbol {
        &self.perm[s]
    }

    pub fn apply_inv(&self, s: &DoubledSymbol) -> &DoubledSymbol {
        self.perm
            .iter()
            .find(|(_, v)| *v == s)
            .map(|(k, _)| k)
            .expect("symbol not in scheme image")
    }

    pub fn mapping(&self) -> &BTreeMap<DoubledSymbol, DoubledSymbol> {
        &self.perm
    }

    pub(crate) fn into_mapping(self) -> BTreeMap<DoubledSymbol, DoubledSymbol> {
        self.perm
    }

    /// The disjoint cycles of the permutation, each rotated to its least
    /// element, listed in order of their least elements.
    pub fn cycles(&self) -> Vec<Cycle> {
        let mut seen: BTreeSet<DoubledSymbol> = BTreeSet::new();
        let mut cycles = Vec::new();
        for start in self.perm.keys() {
            if seen.contains(start) {
                continue;
            }
            let mut elements = vec![start.clone()];
            seen.insert(start.clone());
            let mut cur = self.apply(start);
            while cur != start {
                elements.push(cur.clone());
                seen.insert(cur.clone());
                cur = self.apply(cur);
            }
            cycles.push(Cycle::from_rotation(elements));
        }
        cycles.sort_by(|a, b| a.least().cmp(b.least()));
        cycles
    }

    /// The cycle containing `s`.
    pub fn cycle_of(&self, s: &DoubledSymbol) -> Cycle {
        let mut elements = vec![s.clone()];
        let mut cur = self.apply(s);
        while cur != s {
            elements.push(cur.clone());
            cur = self.apply(cur);
        }
        Cycle::from_rotation(elements)
    }

    /// The dual scheme: begins map as the primal ends and vice versa. Applying
    /// `dual` twice returns the original scheme.
    pub fn dual(&self) -> Scheme {
        let mut perm = BTreeMap::new();
        for l in &self.alphabet {
            let b = DoubledSymbol::begin(l);
            let e = DoubledSymbol::end(l);
            perm.insert(b.clone(), self.apply(&e).clone());
            perm.insert(e, self.apply(&b).clone());
        }
        Scheme {
            alphabet: self.alphabet.clone(),
            perm,
        }
    }

    /// Sum of the twist numbers of all cycles.
    pub fn twist_total(&self) -> i64 {
        self.cycles().iter().map(Cycle::twist_number).sum()
    }

    /// Twist total of the scheme plus that of its dual.
    pub fn twist_total_pair(&self) -> i64 {
        self.twist_total() + self.dual().twist_total()
    }

    /// Whether every cycle splits into one arc of beginnings and one arc of
    /// endings (twist number zero).
    pub fn is_zero_twist(&self) -> bool {
        self.cycles().iter().all(|c| c.two_row().is_ok())
    }

    /// Whether no proper non-empty sub-alphabet is invariant. Checked as
    /// connectivity of the label graph in which two labels are joined whenever
    /// the permutation maps an element of one into an element of the other.
    pub fn is_irreducible(&self) -> bool {
        if self.alphabet.len() <= 1 {
            return true;
        }
        let index: BTreeMap<&Label, usize> = self
            .alphabet
            .iter()
            .enumerate()
            .map(|(i, l)| (l, i))
            .collect();
        let mut uf = UnionFind::new(self.alphabet.len());
        for (k, v) in &self.perm {
            uf.union(index[&k.label], index[&v.label]);
        }
        (1..self.alphabet.len()).all(|i| uf.find(i) == uf.find(0))
    }

    /// A label bijection carrying this scheme's permutation onto `other`'s,
    /// or `None` when the schemes are not isomorphic. Backtracks over cycle
    /// assignments seeded by cycle lengths.
    pub fn equal_up_to_relabeling(&self, other: &Scheme) -> Option<BTreeMap<Label, Label>> {
        self.relabeling_with(other, |_, _| true)
    }

    /// Like [`Scheme::equal_up_to_relabeling`], restricted to bijections where
    /// every matched label pair satisfies `compatible`.
    pub fn relabeling_with(
        &self,
        other: &Scheme,
        compatible: impl Fn(&Label, &Label) -> bool,
    ) -> Option<BTreeMap<Label, Label>> {
        if self.alphabet.len() != other.alphabet.len() {
            return None;
        }
        let ours = self.cycles();
        let theirs = other.cycles();
        if ours.len() != theirs.len() {
            return None;
        }
        let mut lens: Vec<usize> = ours.iter().map(Cycle::len).collect();
        let mut other_lens: Vec<usize> = theirs.iter().map(Cycle::len).collect();
        lens.sort_unstable();
        other_lens.sort_unstable();
        if lens != other_lens {
            return None;
        }
        let mut fwd: BTreeMap<Label, Label> = BTreeMap::new();
        let mut used: BTreeSet<Label> = BTreeSet::new();
        let mut taken = vec![false; theirs.len()];
        if assign_cycles(
            &ours,
            &theirs,
            0,
            &mut taken,
            &mut fwd,
            &mut used,
            &compatible,
        ) {
            Some(fwd)
        } else {
            None
        }
    }
}

fn assign_cycles(
    ours: &[Cycle],
    theirs: &[Cycle],
    idx: usize,
    taken: &mut Vec<bool>,
    fwd: &mut BTreeMap<Label, Label>,
    used: &mut BTreeSet<Label>,
    compatible: &impl Fn(&Label, &Label) -> bool,
) -> bool {
    if idx == ours.len() {
        return true;
    }
    let cycle = &ours[idx];
    for (j, cand) in theirs.iter().enumerate() {
        if taken[j] || cand.len() != cycle.len() {
            continue;
        }
        for offset in 0..cand.len() {
            let mut added: Vec<Label> = Vec::new();
            let mut ok = true;
            for (i, e) in cycle.elements().iter().enumerate() {
                let target = &cand.elements()[(i + offset) % cand.len()];
                if e.marker != target.marker {
                    ok = false;
                    break;
                }
                match fwd.get(&e.label) {
                    Some(mapped) if mapped != &target.label => {
                        ok = false;
                        break;
                    }
                    Some(_) => {}
                    None => {
                        if used.contains(&target.label) || !compatible(&e.label, &target.label) {
                            ok = false;
                            break;
                        }
                        fwd.insert(e.label.clone(), target.label.clone());
                        used.insert(target.label.clone());
                        added.push(e.label.clone());
                    }
                }
            }
            if ok {
                taken[j] = true;
                if assign_cycles(ours, theirs, idx + 1, taken, fwd, used, compatible) {
                    return true;
                }
                taken[j] = false;
            }
            for l in added {
                let t = fwd.remove(&l).unwrap();
                used.remove(&t);
            }
        }
    }
    false
}

impl fmt::Debug for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        write!(f, "Scheme{{")?;
        for (i, c) in cycles.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "}}")
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> UnionFind {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
}


#[cfg(test)]
mod tests {
    use super::testutil::*;
    use super::*;

    #[test]
    fn identity_on_one_label_has_two_singleton_cycles() {
        let s = Scheme::from_cycles(&[vec![b("a")], vec![e("a")]]).unwrap();
        let cycles = s.cycles();
        assert_eq!(cycles.len(), 2);
        assert_eq!(cycles[0].elements(), &[b("a")]);
        assert_eq!(cycles[1].elements(), &[e("a")]);
    }

    #[test]
    fn swap_on_one_label_is_a_single_cycle() {
        let s = Scheme::from_cycles(&[vec![b("a"), e("a")]]).unwrap();
        assert_eq!(s.cycles().len(), 1);
        assert_eq!(s.cycles()[0].elements(), &[b("a"), e("a")]);
    }

    #[test]
    fn four_letter_scheme_has_expected_cycles() {
        let s = four_letter_rotational();
        let cycles = s.cycles();
        assert_eq!(cycles.len(), 2);
        // (g.b a.b d.b b.e d.e) rotated to least element a.b
        assert!(cycles
            .iter()
            .any(|c| c.elements() == [b("a"), b("d"), e("b"), e("d"), b("g")]));
        assert!(cycles
            .iter()
            .any(|c| c.elements() == [e("a"), b("b"), e("g")]));
    }

    #[test]
    fn dual_of_self_inverse_single_cycle_is_identity() {
        // [a | a] maps a.b -> a.e -> a.b; its dual fixes both elements.
        let s = Scheme::from_two_rows(&[(&["a"], &["a"])]).unwrap();
        let d = s.dual();
        assert_eq!(d.apply(&b("a")), &b("a"));
        assert_eq!(d.apply(&e("a")), &e("a"));
    }

    #[test]
    fn dual_of_four_letter_scheme_matches_two_row_form() {
        let s = four_letter_rotational();
        let expected =
            Scheme::from_two_rows(&[(&["a", "b"], &["g", "b", "d"]), (&["d", "g"], &["a"])])
                .unwrap();
        assert_eq!(s.dual(), expected);
    }

    #[test]
    fn dual_is_an_involution() {
        for s in [
            four_letter_rotational(),
            Scheme::from_two_rows(&[(&["a", "b"], &["b", "a"])]).unwrap(),
            Scheme::from_cycles(&[vec![b("a")], vec![e("a")]]).unwrap(),
        ] {
            assert_eq!(s.dual().dual(), s);
        }
    }

    #[test]
    fn twist_numbers_of_small_cycles() {
        let two =
            Cycle::from_two_row(&[Label::new("a").unwrap()], &[Label::new("a").unwrap()]).unwrap();
        assert_eq!(two.twist_number(), 0);
        let single = Scheme::from_cycles(&[vec![b("a")], vec![e("a")]]).unwrap();
        assert_eq!(single.cycles()[0].twist_number(), -1);
        // Dual of [a b | b a] is the four-cycle (a.b b.e a.e b.b), still twist 0.
        let s = Scheme::from_two_rows(&[(&["a", "b"], &["b", "a"])]).unwrap();
        let dual_cycles = s.dual().cycles();
        assert_eq!(dual_cycles.len(), 1);
        assert_eq!(dual_cycles[0].twist_number(), 0);
    }

    #[test]
    fn twist_total_pair_values() {
        let swap = Scheme::from_two_rows(&[(&["a", "b"], &["b", "a"])]).unwrap();
        assert_eq!(swap.twist_total_pair(), 0);
        let loopy = Scheme::from_two_rows(&[(&["a"], &["a"])]).unwrap();
        // The dual consists of two singleton cycles, each of twist -1.
        assert_eq!(loopy.twist_total_pair(), -2);
        assert_eq!(four_letter_rotational().twist_total_pair(), 0);
    }

    #[test]
    fn zero_twist_checks() {
        assert!(Scheme::from_two_rows(&[(&["a", "b"], &["b", "a"])])
            .unwrap()
            .is_zero_twist());
        let identity = Scheme::from_cycles(&[vec![b("a")], vec![e("a")]]).unwrap();
        assert!(!identity.is_zero_twist());
        // {[b | g b d] relabeled, [d a g | a]} stays two-row.
        let s = Scheme::from_two_rows(&[(&["b"], &["g", "b", "d"]), (&["d", "a", "g"], &["a"])])
            .unwrap();
        assert!(s.is_zero_twist());
    }

    #[test]
    fn irreducibility_checks() {
        assert!(Scheme::from_two_rows(&[(&["a"], &["a"])])
            .unwrap()
            .is_irreducible());
        let disjoint = Scheme::from_two_rows(&[(&["a"], &["a"]), (&["b"], &["b"])]).unwrap();
        assert!(!disjoint.is_irreducible());
        assert!(four_letter_rotational().is_irreducible());
    }

    #[test]
    fn irreducibility_is_duality_invariant_on_samples() {
        for s in [
            four_letter_rotational(),
            Scheme::from_two_rows(&[(&["a"], &["a"]), (&["b"], &["b"])]).unwrap(),
            Scheme::from_two_rows(&[(&["a", "b"], &["a", "b"])]).unwrap(),
        ] {
            assert_eq!(s.is_irreducible(), s.dual().is_irreducible());
        }
    }

    #[test]
    fn two_row_rendering() {
        let s = Scheme::from_cycles(&[vec![b("a"), b("b"), e("a"), e("b")]]).unwrap();
        let (top, bottom) = s.cycles()[0].two_row().unwrap();
        let names = |v: &[Label]| v.iter().map(Label::to_string).collect::<Vec<_>>();
        assert_eq!(names(&top), ["a", "b"]);
        assert_eq!(names(&bottom), ["b", "a"]);

        let loop_cycle =
            Cycle::from_two_row(&[Label::new("a").unwrap()], &[Label::new("a").unwrap()]).unwrap();
        let (top, bottom) = loop_cycle.two_row().unwrap();
        assert_eq!(names(&top), ["a"]);
        assert_eq!(names(&bottom), ["a"]);

        let s = four_letter_rotational();
        let big = s.cycles().into_iter().find(|c| c.len() == 5).unwrap();
        let (top, bottom) = big.two_row().unwrap();
        assert_eq!(names(&top), ["g", "a", "d"]);
        assert_eq!(names(&bottom), ["d", "b"]);
    }

    #[test]
    fn two_row_round_trip() {
        let s = four_letter_rotational();
        for c in s.cycles() {
            let (top, bottom) = c.two_row().unwrap();
            assert_eq!(Cycle::from_two_row(&top, &bottom).unwrap(), c);
        }
    }

    #[test]
    fn relabeling_finds_identity_and_renamings() {
        let s = four_letter_rotational();
        let id = s.equal_up_to_relabeling(&s).unwrap();
        for (k, v) in &id {
            assert_eq!(k, v);
        }
        let swap_ab = Scheme::from_two_rows(&[(&["a", "b"], &["b", "a"])]).unwrap();
        let swap_xy = Scheme::from_two_rows(&[(&["x", "y"], &["y", "x"])]).unwrap();
        let m = swap_ab.equal_up_to_relabeling(&swap_xy).unwrap();
        assert_eq!(m[&Label::new("a").unwrap()], Label::new("x").unwrap());
        assert_eq!(m[&Label::new("b").unwrap()], Label::new("y").unwrap());
        let small = Scheme::from_two_rows(&[(&["a"], &["a"])]).unwrap();
        assert!(small.equal_up_to_relabeling(&swap_ab).is_none());
    }

    #[test]
    fn invariant_image_of_doubled_subsets_matches_dual() {
        // For any sub-alphabet, the permutation and its dual send the doubled
        // subset to the same image set.
        let s = four_letter_rotational();
        let d = s.dual();
        let labels = s.alphabet().to_vec();
        for mask in 0u32..(1 << labels.len()) {
            let subset: Vec<&Label> = labels
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, l)| l)
                .collect();
            let doubled: Vec<DoubledSymbol> = subset
                .iter()
                .flat_map(|l| [DoubledSymbol::begin(l), DoubledSymbol::end(l)])
                .collect();
            let im_s: BTreeSet<_> = doubled.iter().map(|x| s.apply(x).clone()).collect();
            let im_d: BTreeSet<_> = doubled.iter().map(|x| d.apply(x).clone()).collect();
            assert_eq!(im_s, im_d);
        }
    }

    #[test]
    fn cycle_partition_covers_doubled_alphabet() {
        let s = four_letter_rotational();
        let total: usize = s.cycles().iter().map(Cycle::len).sum();
        assert_eq!(total, 2 * s.alphabet().len());
    }

    #[test]
    fn rejects_non_bijective_input() {
        let mut perm = BTreeMap::new();
        perm.insert(b("a"), b("a"));
        perm.insert(e("a"), b("a"));
        assert!(matches!(
            Scheme::new(perm),
            Err(SchemeError::NotBijective(_))
        ));
    }

    #[test]
    fn rejects_incomplete_domain() {
        let mut perm = BTreeMap::new();
        perm.insert(b("a"), b("a"));
        assert!(matches!(
            Scheme::new(perm),
            Err(SchemeError::IncompleteDomain(_))
        ));
    }
}
