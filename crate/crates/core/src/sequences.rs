//! Stellar sequences, their orbits, and confluence of support chains.
//!
//! A sequence is an initial weighted complex plus a step provider: a finite
//! list of steps followed by identities, a built-in family, or (in-library
//! only) a custom callback. Its orbit under a realization is the chain of
//! regular complexes obtained by the induced transformations.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::complex::{face, ComplexError, Face, Label, StellarStep, WeightedComplex};
use crate::exactgeom::RationalPoint;
use crate::regular::{
    canonical_realization, complex_contained, delta_transform, Containment, Realization,
    RegularComplex, RegularError, TailKind, VertexOrder,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SequenceError {
    #[error("step {index}: {source}")]
    InvalidStep { index: usize, source: RegularError },
    #[error("step {index}: malformed state: {message}")]
    MalformedState { index: usize, message: String },
    #[error("malformed family: {0}")]
    MalformedFamily(String),
    #[error(transparent)]
    Regular(#[from] RegularError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error("ambient dimensions differ: {0} vs {1}")]
    AmbientMismatch(usize, usize),
}

/// Built-in infinite or constant sequences.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Family {
    /// Identity forever on the given initial complex.
    Constant,
    /// Two vertices of weight `n`; each round subdivides the edge, deletes
    /// the half away from vertex `0`, then the leftover singleton.
    LexZ2 { n: u64 },
    /// Farey descent towards the quadratic irrational whose continued
    /// fraction `[0; a1, a2, ...]` repeats the given digits.
    EffrosShen { cf: Vec<u64> },
    /// Isolated vertices with the given weights, constant.
    SimplicialWeights(Vec<u64>),
    /// The skeleton of a regular complex, constant.
    SkeletonConstant(RegularComplex),
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Constant => "constant",
            Family::LexZ2 { .. } => "lex-z2",
            Family::EffrosShen { .. } => "effros-shen",
            Family::SimplicialWeights(_) => "simplicial",
            Family::SkeletonConstant(_) => "skeleton-constant",
        }
    }

    /// Continued-fraction period of a named quadratic irrational in `(0,1)`.
    pub fn named_cf(name: &str) -> Option<Vec<u64>> {
        match name {
            "golden" => Some(vec![1]),
            "silver" => Some(vec![2]),
            "sqrt3" => Some(vec![1, 2]),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<(), SequenceError> {
        let bad = |m: &str| Err(SequenceError::MalformedFamily(m.to_string()));
        match self {
            Family::LexZ2 { n } if *n == 0 => bad("lex-z2 weight must be positive"),
            Family::EffrosShen { cf } if cf.is_empty() => {
                bad("effros-shen needs a nonempty digit list")
            }
            Family::EffrosShen { cf } if cf.contains(&0) => {
                bad("continued fraction digits must be positive")
            }
            Family::SimplicialWeights(w) if w.is_empty() => {
                bad("simplicial family needs at least one weight")
            }
            Family::SimplicialWeights(w) if w.contains(&0) => bad("weights must be positive"),
            Family::SkeletonConstant(d) if d.is_empty() => bad("skeleton of an empty complex"),
            _ => Ok(()),
        }
    }

    /// The initial complex, when the family determines it.
    pub fn initial(&self) -> Option<WeightedComplex> {
        match self {
            Family::Constant => None,
            Family::LexZ2 { n } => Some(WeightedComplex::simplex(&["0", "1"], *n)),
            Family::EffrosShen { .. } => Some(WeightedComplex::simplex(&["0", "1"], 1)),
            Family::SimplicialWeights(w) => {
                let labels: Vec<String> = (1..=w.len()).map(|i| format!("w{i}")).collect();
                let weights: Vec<(&str, u64)> = labels
                    .iter()
                    .map(String::as_str)
                    .zip(w.iter().copied())
                    .collect();
                let faces: Vec<Vec<&str>> = labels.iter().map(|l| vec![l.as_str()]).collect();
                let face_refs: Vec<&[&str]> = faces.iter().map(Vec::as_slice).collect();
                Some(WeightedComplex::build(&weights, &face_refs))
            }
            Family::SkeletonConstant(d) => Some(d.skeleton()),
        }
    }

    pub fn tail(&self) -> TailKind {
        match self {
            Family::LexZ2 { .. } | Family::EffrosShen { .. } => TailKind::Open,
            _ => TailKind::EventuallyConstant(0),
        }
    }

    /// Step `i >= 1` from `W_{i-1}`. The three-step rounds follow
    /// `i mod 3`: 1 subdivides the only edge, 2 deletes one half, 0 deletes
    /// the only maximal singleton.
    pub fn step(&self, i: usize, state: &WeightedComplex) -> Result<StellarStep, SequenceError> {
        match self {
            Family::LexZ2 { .. } => match i % 3 {
                1 => subdivide_only_edge(i, state),
                2 => {
                    let zero = Label::from("0");
                    let halves = two_sets(state);
                    let keep: Vec<&Face> = halves
                        .iter()
                        .filter(|f| !f.contains(&zero))
                        .copied()
                        .collect();
                    match keep.as_slice() {
                        [x] => Ok(StellarStep::DeleteMaximal((*x).clone())),
                        _ => malformed(i, "expected exactly one 2-element face avoiding vertex 0"),
                    }
                }
                _ => delete_only_singleton(i, state),
            },
            Family::EffrosShen { cf } => match i % 3 {
                1 => subdivide_only_edge(i, state),
                2 => {
                    let round = (i - 1) / 3;
                    let (left, right) = interval_labels(cf, round);
                    let new = generated_label(round * 3 + 1);
                    let doomed = if descent_move(cf, round) == Move::Left {
                        face([new, right])
                    } else {
                        face([left, new])
                    };
                    if state.is_maximal(&doomed) {
                        Ok(StellarStep::DeleteMaximal(doomed))
                    } else {
                        malformed(i, "state does not follow the Farey descent")
                    }
                }
                _ => delete_only_singleton(i, state),
            },
            _ => Ok(StellarStep::Identity),
        }
    }
}

fn malformed<T>(index: usize, message: &str) -> Result<T, SequenceError> {
    Err(SequenceError::MalformedState {
        index,
        message: message.to_string(),
    })
}

/// Label given to the vertex created by step `i`.
pub fn generated_label(i: usize) -> Label {
    Label::new(format!("_s{i}"))
}

fn two_sets(state: &WeightedComplex) -> Vec<&Face> {
    state
        .maximal_faces()
        .iter()
        .filter(|f| f.len() == 2)
        .collect()
}

fn subdivide_only_edge(i: usize, state: &WeightedComplex) -> Result<StellarStep, SequenceError> {
    match two_sets(state).as_slice() {
        [e] => {
            let mut it = e.iter();
            let (v, w) = (it.next().unwrap().clone(), it.next().unwrap().clone());
            let new = generated_label(i);
            if state.contains_vertex(&new) {
                return malformed(i, "generated label already in use");
            }
            Ok(StellarStep::Subdivide {
                edge: (v, w),
                new_label: new,
            })
        }
        _ => malformed(i, "expected exactly one 2-element face"),
    }
}

fn delete_only_singleton(i: usize, state: &WeightedComplex) -> Result<StellarStep, SequenceError> {
    let singles: Vec<&Face> = state
        .maximal_faces()
        .iter()
        .filter(|f| f.len() == 1)
        .collect();
    match singles.as_slice() {
        [s] => Ok(StellarStep::DeleteMaximal((*s).clone())),
        _ => malformed(i, "expected exactly one maximal singleton"),
    }
}

/// Direction of one Farey descent step towards the irrational.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Move {
    /// The irrational lies below the mediant.
    Left,
    Right,
}

/// Move taken in round `k` (0-based). With digits `a1, a2, ...` the
/// descent is `L^(a1-1) R^a2 L^a3 R^a4 ...`.
pub fn descent_move(cf: &[u64], k: usize) -> Move {
    let mut remaining = k as u64;
    let mut j = 0usize;
    loop {
        let a = cf[j % cf.len()];
        let count = if j == 0 { a - 1 } else { a };
        if remaining < count {
            return if j % 2 == 0 { Move::Left } else { Move::Right };
        }
        remaining -= count;
        j += 1;
    }
}

/// Labels of the left and right endpoints before round `k`.
fn interval_labels(cf: &[u64], k: usize) -> (Label, Label) {
    let mut left = Label::from("0");
    let mut right = Label::from("1");
    for r in 0..k {
        let new = generated_label(r * 3 + 1);
        match descent_move(cf, r) {
            Move::Left => right = new,
            Move::Right => left = new,
        }
    }
    (left, right)
}

/// In-library step source for sequences that are neither finite nor a
/// built-in family.
pub trait StepProvider: Send + Sync + fmt::Debug {
    fn step(&self, index: usize, state: &WeightedComplex) -> Result<StellarStep, SequenceError>;
    fn tail(&self) -> TailKind;
}

#[derive(Clone, Debug)]
pub enum Provider {
    /// The listed steps, then identities.
    Finite(Vec<StellarStep>),
    Family(Family),
    Custom(Arc<dyn StepProvider>),
}

impl PartialEq for Provider {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Provider::Finite(a), Provider::Finite(b)) => a == b,
            (Provider::Family(a), Provider::Family(b)) => a == b,
            (Provider::Custom(a), Provider::Custom(b)) => Arc::ptr_eq(a, b),
            _ => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StellarSequence {
    pub initial: WeightedComplex,
    pub provider: Provider,
    /// Realization of the initial complex; see [`Self::default_realization`].
    pub realization: Option<Realization>,
}

impl StellarSequence {
    /// A finite sequence; every step is checked against its predecessor.
    pub fn finite(
        initial: WeightedComplex,
        steps: Vec<StellarStep>,
    ) -> Result<Self, SequenceError> {
        let violations = initial.validate();
        if !violations.is_empty() {
            return Err(ComplexError::Invalid(violations).into());
        }
        let mut w = initial.clone();
        for (k, s) in steps.iter().enumerate() {
            w = w.apply_step(s).map_err(|e| SequenceError::InvalidStep {
                index: k + 1,
                source: e.into(),
            })?;
        }
        Ok(Self {
            initial,
            provider: Provider::Finite(steps),
            realization: None,
        })
    }

    /// A built-in family with its own initial complex.
    pub fn family(f: Family) -> Result<Self, SequenceError> {
        f.validate()?;
        let initial = f.initial().ok_or_else(|| {
            SequenceError::MalformedFamily("constant family needs an initial complex".into())
        })?;
        Ok(Self {
            initial,
            provider: Provider::Family(f),
            realization: None,
        })
    }

    /// The constant sequence on `w`.
    pub fn constant(w: WeightedComplex) -> Result<Self, SequenceError> {
        Self::finite(w, Vec::new()).map(|mut s| {
            s.provider = Provider::Family(Family::Constant);
            s
        })
    }

    pub fn custom(initial: WeightedComplex, provider: Arc<dyn StepProvider>) -> Self {
        Self {
            initial,
            provider: Provider::Custom(provider),
            realization: None,
        }
    }

    pub fn with_realization(mut self, r: Realization) -> Result<Self, SequenceError> {
        r.check()?;
        if r.weighted != self.initial {
            return Err(RegularError::NotRealization(
                "realization is of a different complex".into(),
            )
            .into());
        }
        self.realization = Some(r);
        Ok(self)
    }

    pub fn tail(&self) -> TailKind {
        match &self.provider {
            Provider::Finite(steps) => TailKind::EventuallyConstant(steps.len()),
            Provider::Family(f) => f.tail(),
            Provider::Custom(p) => p.tail(),
        }
    }

    /// Step `i >= 1`, applied to `W_{i-1}`.
    pub fn step(&self, i: usize, state: &WeightedComplex) -> Result<StellarStep, SequenceError> {
        match &self.provider {
            Provider::Finite(steps) => {
                Ok(steps.get(i - 1).cloned().unwrap_or(StellarStep::Identity))
            }
            Provider::Family(f) => f.step(i, state),
            Provider::Custom(p) => p.step(i, state),
        }
    }

    /// The first `n` steps.
    pub fn prefix(&self, n: usize) -> Result<Vec<StellarStep>, SequenceError> {
        let mut w = self.initial.clone();
        let mut out = Vec::with_capacity(n);
        for i in 1..=n {
            let s = self.step(i, &w)?;
            w = w.apply_step(&s).map_err(|e| SequenceError::InvalidStep {
                index: i,
                source: e.into(),
            })?;
            out.push(s);
        }
        Ok(out)
    }

    /// The stored realization, else the unit interval for the Farey descent
    /// family, the tautological one for skeleton families, and the canonical
    /// realization in lexicographic label order otherwise.
    pub fn default_realization(&self) -> Result<Realization, SequenceError> {
        if let Some(r) = &self.realization {
            return Ok(r.clone());
        }
        match &self.provider {
            Provider::Family(Family::EffrosShen { .. }) => {
                let unit = RegularComplex::unit_interval();
                let map = [(Label::from("0"), 0usize), (Label::from("1"), 1usize)]
                    .into_iter()
                    .collect();
                Ok(Realization::new(self.initial.clone(), unit, map)?)
            }
            Provider::Family(Family::SkeletonConstant(d)) => Ok(d.skeleton_realization()),
            _ => Ok(canonical_realization(&self.initial, &VertexOrder::Lex)?),
        }
    }
}

/// The realized chain `Delta_0, Delta_1, ...` of a sequence, extended on
/// demand.
#[derive(Clone, Debug)]
pub struct Orbit {
    sequence: StellarSequence,
    states: Vec<Realization>,
    steps: Vec<StellarStep>,
}

impl Orbit {
    /// Starts at `r0` (the sequence's default realization when `None`) and
    /// applies `depth` steps.
    pub fn new(
        seq: &StellarSequence,
        r0: Option<Realization>,
        depth: usize,
    ) -> Result<Self, SequenceError> {
        let r0 = match r0 {
            Some(r) => {
                r.check()?;
                if r.weighted != seq.initial {
                    return Err(RegularError::NotRealization(
                        "realization is of a different complex".into(),
                    )
                    .into());
                }
                r
            }
            None => seq.default_realization()?,
        };
        let mut orbit = Self {
            sequence: seq.clone(),
            states: vec![r0],
            steps: Vec::new(),
        };
        orbit.extend_to(depth)?;
        Ok(orbit)
    }

    /// Ensures states `0..=depth` exist.
    pub fn extend_to(&mut self, depth: usize) -> Result<(), SequenceError> {
        while self.states.len() <= depth {
            let i = self.states.len();
            let current = self.states.last().unwrap();
            let step = self.sequence.step(i, &current.weighted)?;
            let next = delta_transform(current, &step)
                .map_err(|source| SequenceError::InvalidStep { index: i, source })?;
            self.steps.push(step);
            self.states.push(next);
        }
        Ok(())
    }

    pub fn depth(&self) -> usize {
        self.states.len() - 1
    }

    pub fn states(&self) -> &[Realization] {
        &self.states
    }

    pub fn steps(&self) -> &[StellarStep] {
        &self.steps
    }

    pub fn sequence(&self) -> &StellarSequence {
        &self.sequence
    }

    pub fn tail(&self) -> TailKind {
        self.sequence.tail()
    }

    pub fn supports(&self) -> Vec<RegularComplex> {
        self.states.iter().map(|r| r.geometric.clone()).collect()
    }

    /// The last state, which is final when the tail is eventually constant
    /// and the orbit reaches the tail index.
    pub fn final_state(&self) -> Option<&Realization> {
        match self.tail() {
            TailKind::EventuallyConstant(k) if self.depth() >= k => self.states.last(),
            _ => None,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.states[0].ambient_dim()
    }
}

/// Why two chains cannot be confluent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfluenceWitness {
    /// `true` when the final support of the first chain escapes an element
    /// of the second.
    pub first_escapes: bool,
    /// Index of the element of the other chain.
    pub index: usize,
    /// A point of the final support outside that element.
    pub point: RationalPoint,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Confluence {
    Certified,
    Consistent(usize),
    Refuted(ConfluenceWitness),
}

/// Mutual minorization of two descending chains. Certified when both are
/// eventually constant with equal final supports. Refuted when one chain is
/// eventually constant and its final support (contained in all its
/// elements) is not inside some listed element of the other chain: no
/// element of the first can then lie inside that element.
pub fn confluent(
    a: &[RegularComplex],
    tail_a: TailKind,
    b: &[RegularComplex],
    tail_b: TailKind,
    depth: usize,
    max_blowups: usize,
) -> Result<Confluence, SequenceError> {
    if let (Some(x), Some(y)) = (a.first(), b.first()) {
        if x.ambient_dim() != y.ambient_dim() {
            return Err(SequenceError::AmbientMismatch(
                x.ambient_dim(),
                y.ambient_dim(),
            ));
        }
    }
    let final_of = |chain: &[RegularComplex], tail: TailKind| match tail {
        TailKind::EventuallyConstant(k) if chain.len() > k => chain.last().cloned(),
        _ => None,
    };
    let fa = final_of(a, tail_a);
    let fb = final_of(b, tail_b);
    if let (Some(x), Some(y)) = (&fa, &fb) {
        if complex_contained(x, y, max_blowups).is_yes()
            && complex_contained(y, x, max_blowups).is_yes()
        {
            return Ok(Confluence::Certified);
        }
    }
    for (fin, other, first_escapes) in [(&fa, b, true), (&fb, a, false)] {
        let Some(fin) = fin else { continue };
        for (index, el) in other.iter().take(depth + 1).enumerate() {
            if let Containment::No(point) = complex_contained(el, fin, max_blowups) {
                return Ok(Confluence::Refuted(ConfluenceWitness {
                    first_escapes,
                    index,
                    point,
                }));
            }
        }
    }
    Ok(Confluence::Consistent(depth))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactgeom::rational as q;
    use crate::exactgeom::Rational;

    fn endpoints(c: &RegularComplex) -> Vec<Rational> {
        let mut v: Vec<Rational> = c.vertices().iter().map(|p| p.coords()[0].clone()).collect();
        v.sort();
        v
    }

    /// Convergents of `[0; a1, a2, ...]` by the standard recurrence.
    fn convergents(digits: &[u64]) -> Vec<(u64, u64)> {
        let (mut p0, mut q0, mut p1, mut q1) = (1u64, 0u64, 0u64, 1u64);
        let mut out = vec![(0, 1)];
        for &a in digits {
            let (p2, q2) = (a * p1 + p0, a * q1 + q0);
            out.push((p2, q2));
            (p0, q0, p1, q1) = (p1, q1, p2, q2);
        }
        out
    }

    #[test]
    fn constant_segment() {
        let seg = StellarSequence::constant(WeightedComplex::simplex(&["0", "1"], 1)).unwrap();
        let o = Orbit::new(&seg, None, 5).unwrap();
        assert_eq!(o.depth(), 5);
        assert!(o.supports().windows(2).all(|w| w[0] == w[1]));
        assert_eq!(o.tail(), TailKind::EventuallyConstant(0));
    }

    #[test]
    fn golden_descent() {
        let es = StellarSequence::family(Family::EffrosShen { cf: vec![1] }).unwrap();
        let o = Orbit::new(&es, None, 9).unwrap();
        assert_eq!(endpoints(&o.supports()[3]), vec![q(1, 2), q(1, 1)]);
        let conv = convergents(&[1; 8]);
        for k in 1..=3 {
            let ends = endpoints(&o.supports()[3 * k]);
            let mut expect = vec![
                q(conv[k].0 as i64, conv[k].1 as i64),
                q(conv[k + 1].0 as i64, conv[k + 1].1 as i64),
            ];
            expect.sort();
            assert_eq!(ends, expect);
        }
    }

    #[test]
    fn descent_moves() {
        let m = |cf: &[u64], n: usize| (0..n).map(|k| descent_move(cf, k)).collect::<Vec<_>>();
        use Move::*;
        assert_eq!(m(&[1], 4), vec![Right, Left, Right, Left]);
        assert_eq!(m(&[2], 5), vec![Left, Right, Right, Left, Left]);
        assert_eq!(m(&[1, 2], 5), vec![Right, Right, Left, Right, Right]);
    }

    #[test]
    fn lex_family_steps() {
        let lex = StellarSequence::family(Family::LexZ2 { n: 2 }).unwrap();
        let steps = lex.prefix(6).unwrap();
        assert!(matches!(steps[0], StellarStep::Subdivide { .. }));
        assert_eq!(steps[1], StellarStep::delete(["1", "_s1"]));
        assert_eq!(steps[2], StellarStep::delete(["1"]));
        assert_eq!(steps[4], StellarStep::delete(["_s1", "_s4"]));
        let o = Orbit::new(&lex, None, 6).unwrap();
        assert_eq!(o.supports()[3].maximal_simplexes().len(), 1);
        let zero = o.states()[0].point(&"0".into()).unwrap().clone();
        for s in &o.states()[1..] {
            assert_eq!(s.point(&"0".into()), Some(&zero));
        }
    }

    #[test]
    fn finite_two_steps() {
        let seg = WeightedComplex::simplex(&["v", "w"], 1);
        let seq = StellarSequence::finite(
            seg,
            vec![
                StellarStep::subdivide("v", "w", "a"),
                StellarStep::delete(["a", "w"]),
            ],
        )
        .unwrap();
        let o = Orbit::new(&seq, None, 4).unwrap();
        let last = o.supports().last().unwrap().clone();
        assert_eq!(last.maximal_simplexes().len(), 2);
        assert_eq!(o.tail(), TailKind::EventuallyConstant(2));
        assert!(o.final_state().is_some());
        assert!(StellarSequence::finite(
            WeightedComplex::simplex(&["v"], 1),
            vec![StellarStep::delete(["x"])]
        )
        .is_err());
    }

    #[test]
    fn confluence_examples() {
        let unit = RegularComplex::unit_interval();
        let half = RegularComplex::new(
            1,
            vec![RationalPoint::from_ratios(&[(1, 2)]).unwrap()],
            [vec![0]],
        )
        .unwrap();
        let ec = TailKind::EventuallyConstant(0);
        let a = vec![unit.clone(); 3];
        assert_eq!(
            confluent(&a, ec, &a, ec, 2, 64).unwrap(),
            Confluence::Certified
        );
        assert_eq!(
            confluent(&a, TailKind::Open, &a, TailKind::Open, 2, 64).unwrap(),
            Confluence::Consistent(2)
        );
        let b = vec![half.clone(); 3];
        match confluent(&a, ec, &b, ec, 2, 64).unwrap() {
            Confluence::Refuted(w) => {
                assert!(w.first_escapes);
                assert!(!half.contains_point(&w.point));
            }
            other => panic!("{other:?}"),
        }

        let es = StellarSequence::family(Family::EffrosShen { cf: vec![1] }).unwrap();
        let o = Orbit::new(&es, None, 15).unwrap();
        let full = o.supports();
        let shifted: Vec<RegularComplex> = full[3..].to_vec();
        for d in [3, 6, 9] {
            assert_eq!(
                confluent(&full, TailKind::Open, &shifted, TailKind::Open, d, 64).unwrap(),
                Confluence::Consistent(d)
            );
        }
        assert!(matches!(
            confluent(&a, ec, &[RegularComplex::unit_cube(2)], ec, 2, 64),
            Err(SequenceError::AmbientMismatch(1, 2))
        ));
    }
}
