//! Weighted abstract simplicial complexes and stellar transformations.
//!
//! A complex is stored by its maximal faces; the downward closure is implicit.
//! The three stellar transformations are the identity, deletion of a maximal
//! face, and binary subdivision of an edge `{v, w}` by a fresh vertex `a` of
//! weight `w(v) + w(w)`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use indexmap::IndexMap;
use num_bigint::BigUint;
use num_traits::{One, Zero};
use thiserror::Error;

/// Opaque vertex label.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label(String);

/// Prefix reserved for labels generated by this crate.
pub const GENERATED_PREFIX: char = '_';

impl Label {
    pub fn new(s: impl Into<String>) -> Self {
        Self(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn is_generated(&self) -> bool {
        self.0.starts_with(GENERATED_PREFIX)
    }
}

impl fmt::Debug for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Label {
    fn from(s: &str) -> Self {
        Self(s.to_string())
    }
}

impl From<String> for Label {
    fn from(s: String) -> Self {
        Self(s)
    }
}

pub type Face = BTreeSet<Label>;

/// Builds a face from anything label-like.
pub fn face<I, L>(labels: I) -> Face
where
    I: IntoIterator<Item = L>,
    L: Into<Label>,
{
    labels.into_iter().map(Into::into).collect()
}

/// A bijection between vertex sets.
pub type VertexMap = BTreeMap<Label, Label>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComplexError {
    #[error("invalid step: {0}")]
    InvalidStep(String),
    #[error("invalid complex: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
}

/// A failed invariant of [`WeightedComplex`], with its witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    EmptyVertexSet,
    UncoveredVertex(Label),
    UnknownVertex { face: Face, vertex: Label },
    EmptyFace,
    NestedFaces { inner: Face, outer: Face },
    WeightBelowOne(Label),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyVertexSet => write!(f, "vertex set is empty"),
            Violation::UncoveredVertex(v) => write!(f, "vertex {v} is in no maximal face"),
            Violation::UnknownVertex { face, vertex } => {
                write!(
                    f,
                    "face {} uses undeclared vertex {vertex}",
                    show_face(face)
                )
            }
            Violation::EmptyFace => write!(f, "empty maximal face"),
            Violation::NestedFaces { inner, outer } => write!(
                f,
                "maximal face {} is contained in {}",
                show_face(inner),
                show_face(outer)
            ),
            Violation::WeightBelowOne(v) => write!(f, "weight of {v} is below 1"),
        }
    }
}

pub fn show_face(face: &Face) -> String {
    let parts: Vec<&str> = face.iter().map(Label::as_str).collect();
    format!("{{{}}}", parts.join(","))
}

/// `(V, Sigma, w)`: vertices in declaration order with weights, and the
/// maximal faces of `Sigma`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedComplex {
    weights: IndexMap<Label, BigUint>,
    maximal: BTreeSet<Face>,
}

/// One stellar transformation.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum StellarStep {
    Identity,
    DeleteMaximal(Face),
    Subdivide {
        edge: (Label, Label),
        new_label: Label,
    },
}

impl StellarStep {
    pub fn delete<I, L>(labels: I) -> Self
    where
        I: IntoIterator<Item = L>,
        L: Into<Label>,
    {
        StellarStep::DeleteMaximal(face(labels))
    }

    pub fn subdivide(
        v: impl Into<Label>,
        w: impl Into<Label>,
        new_label: impl Into<Label>,
    ) -> Self {
        StellarStep::Subdivide {
            edge: (v.into(), w.into()),
            new_label: new_label.into(),
        }
    }

    pub fn is_deletion(&self) -> bool {
        matches!(self, StellarStep::DeleteMaximal(_))
    }
}

impl fmt::Display for StellarStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StellarStep::Identity => write!(f, "id"),
            StellarStep::DeleteMaximal(m) => write!(f, "delete {}", show_face(m)),
            StellarStep::Subdivide { edge, new_label } => {
                write!(f, "subdivide {{{},{}}} by {new_label}", edge.0, edge.1)
            }
        }
    }
}

impl WeightedComplex {
    /// Assembles a complex without checking invariants; see [`Self::validate`].
    pub fn from_parts<I>(weights: I, maximal_faces: impl IntoIterator<Item = Face>) -> Self
    where
        I: IntoIterator<Item = (Label, BigUint)>,
    {
        Self {
            weights: weights.into_iter().collect(),
            maximal: maximal_faces.into_iter().collect(),
        }
    }

    /// Assembles and validates.
    pub fn try_new<I>(
        weights: I,
        maximal_faces: impl IntoIterator<Item = Face>,
    ) -> Result<Self, ComplexError>
    where
        I: IntoIterator<Item = (Label, BigUint)>,
    {
        let w = Self::from_parts(weights, maximal_faces);
        let violations = w.validate();
        if violations.is_empty() {
            Ok(w)
        } else {
            Err(ComplexError::Invalid(violations))
        }
    }

    /// Small-integer convenience constructor, panics on invalid input.
    pub fn build(weights: &[(&str, u64)], faces: &[&[&str]]) -> Self {
        Self::try_new(
            weights
                .iter()
                .map(|&(l, w)| (Label::from(l), BigUint::from(w))),
            faces.iter().map(|f| face(f.iter().copied())),
        )
        .expect("valid weighted complex")
    }

    /// Full powerset on the given labels with the given weight.
    pub fn simplex(labels: &[&str], weight: u64) -> Self {
        let all: Vec<&str> = labels.to_vec();
        Self::build(
            &labels.iter().map(|&l| (l, weight)).collect::<Vec<_>>(),
            &[all.as_slice()],
        )
    }

    /// Lists every violated invariant; empty means valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.weights.is_empty() {
            out.push(Violation::EmptyVertexSet);
        }
        for (label, w) in &self.weights {
            if w.is_zero() {
                out.push(Violation::WeightBelowOne(label.clone()));
            }
        }
        for f in &self.maximal {
            if f.is_empty() {
                out.push(Violation::EmptyFace);
            }
            for v in f {
                if !self.weights.contains_key(v) {
                    out.push(Violation::UnknownVertex {
                        face: f.clone(),
                        vertex: v.clone(),
                    });
                }
            }
        }
        let covered: BTreeSet<&Label> = self.maximal.iter().flatten().collect();
        for label in self.weights.keys() {
            if !covered.contains(label) {
                out.push(Violation::UncoveredVertex(label.clone()));
            }
        }
        for a in &self.maximal {
            for b in &self.maximal {
                if a != b && a.is_subset(b) {
                    out.push(Violation::NestedFaces {
                        inner: a.clone(),
                        outer: b.clone(),
                    });
                }
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// Vertices in declaration order.
    pub fn vertices(&self) -> impl Iterator<Item = &Label> {
        self.weights.keys()
    }

    pub fn weighted_vertices(&self) -> impl Iterator<Item = (&Label, &BigUint)> {
        self.weights.iter()
    }

    pub fn vertex_count(&self) -> usize {
        self.weights.len()
    }

    pub fn contains_vertex(&self, v: &Label) -> bool {
        self.weights.contains_key(v)
    }

    pub fn weight(&self, v: &Label) -> Option<&BigUint> {
        self.weights.get(v)
    }

    pub fn maximal_faces(&self) -> &BTreeSet<Face> {
        &self.maximal
    }

    /// `true` iff `f` belongs to the downward closure of the maximal faces.
    pub fn has_face(&self, f: &Face) -> bool {
        f.iter().all(|v| self.weights.contains_key(v))
            && self.maximal.iter().any(|m| f.is_subset(m))
    }

    pub fn is_maximal(&self, f: &Face) -> bool {
        self.maximal.contains(f)
    }

    /// Size of the largest face.
    pub fn max_face_size(&self) -> usize {
        self.maximal.iter().map(BTreeSet::len).max().unwrap_or(0)
    }

    /// A label with the reserved prefix that is not yet a vertex.
    pub fn fresh_label(&self, stem: &str) -> Label {
        let mut n = self.weights.len();
        loop {
            let l = Label(format!("{GENERATED_PREFIX}{stem}{n}"));
            if !self.weights.contains_key(&l) {
                return l;
            }
            n += 1;
        }
    }

    /// Checks the preconditions of `step` against `self`.
    pub fn check_step(&self, step: &StellarStep) -> Result<(), ComplexError> {
        match step {
            StellarStep::Identity => Ok(()),
            StellarStep::DeleteMaximal(m) => {
                if !self.maximal.contains(m) {
                    return Err(ComplexError::InvalidStep(format!(
                        "{} is not a maximal face",
                        show_face(m)
                    )));
                }
                if self.maximal.len() == 1 && m.len() == 1 {
                    return Err(ComplexError::InvalidStep(format!(
                        "deleting {} would leave the complex empty",
                        show_face(m)
                    )));
                }
                Ok(())
            }
            StellarStep::Subdivide {
                edge: (v, w),
                new_label,
            } => {
                if v == w {
                    return Err(ComplexError::InvalidStep(format!(
                        "{{{v},{w}}} is not a 2-element set"
                    )));
                }
                let e = face([v.clone(), w.clone()]);
                if !self.has_face(&e) {
                    return Err(ComplexError::InvalidStep(format!(
                        "{} is not a face",
                        show_face(&e)
                    )));
                }
                if self.weights.contains_key(new_label) {
                    return Err(ComplexError::InvalidStep(format!(
                        "label {new_label} is already a vertex"
                    )));
                }
                Ok(())
            }
        }
    }

    /// Applies a stellar transformation.
    pub fn apply_step(&self, step: &StellarStep) -> Result<WeightedComplex, ComplexError> {
        self.apply_step_traced(step).map(|(w, _)| w)
    }

    /// Like [`Self::apply_step`], also returning vertices dropped from `V`
    /// because a deleted maximal singleton was their only face.
    pub fn apply_step_traced(
        &self,
        step: &StellarStep,
    ) -> Result<(WeightedComplex, Vec<Label>), ComplexError> {
        self.check_step(step)?;
        match step {
            StellarStep::Identity => Ok((self.clone(), Vec::new())),
            StellarStep::DeleteMaximal(m) => {
                let mut maximal = self.maximal.clone();
                maximal.remove(m);
                // proper faces of m that no other face covers become maximal
                if m.len() > 1 {
                    for v in m {
                        let mut facet = m.clone();
                        facet.remove(v);
                        if !maximal.iter().any(|g| facet.is_subset(g)) {
                            maximal.insert(facet);
                        }
                    }
                }
                let covered: BTreeSet<&Label> = maximal.iter().flatten().collect();
                let orphans: Vec<Label> = self
                    .weights
                    .keys()
                    .filter(|l| !covered.contains(l))
                    .cloned()
                    .collect();
                let mut weights = self.weights.clone();
                for o in &orphans {
                    weights.shift_remove(o);
                }
                Ok((WeightedComplex { weights, maximal }, orphans))
            }
            StellarStep::Subdivide {
                edge: (v, w),
                new_label,
            } => {
                let mut maximal = BTreeSet::new();
                for f in &self.maximal {
                    if f.contains(v) && f.contains(w) {
                        let mut left = f.clone();
                        left.remove(w);
                        left.insert(new_label.clone());
                        let mut right = f.clone();
                        right.remove(v);
                        right.insert(new_label.clone());
                        maximal.insert(left);
                        maximal.insert(right);
                    } else {
                        maximal.insert(f.clone());
                    }
                }
                let mut weights = self.weights.clone();
                let new_weight = &self.weights[v] + &self.weights[w];
                weights.insert(new_label.clone(), new_weight);
                Ok((WeightedComplex { weights, maximal }, Vec::new()))
            }
        }
    }

    /// Relabels every vertex through `map` (which must cover all vertices).
    pub fn relabel(&self, map: &VertexMap) -> WeightedComplex {
        WeightedComplex {
            weights: self
                .weights
                .iter()
                .map(|(l, w)| (map[l].clone(), w.clone()))
                .collect(),
            maximal: self
                .maximal
                .iter()
                .map(|f| f.iter().map(|l| map[l].clone()).collect())
                .collect(),
        }
    }

    /// Does `gamma` map `self` onto `other` as a combinatorial isomorphism?
    pub fn is_isomorphism(&self, other: &WeightedComplex, gamma: &VertexMap) -> bool {
        if gamma.len() != self.weights.len() || self.weights.len() != other.weights.len() {
            return false;
        }
        let image: BTreeSet<&Label> = gamma.values().collect();
        if image.len() != gamma.len() {
            return false;
        }
        for (v, w) in &self.weights {
            match gamma.get(v).and_then(|g| other.weights.get(g)) {
                Some(w2) if w2 == w => {}
                _ => return false,
            }
        }
        if self.maximal.len() != other.maximal.len() {
            return false;
        }
        self.maximal.iter().all(|f| {
            other
                .maximal
                .contains(&f.iter().map(|l| gamma[l].clone()).collect::<Face>())
        })
    }

    /// Lexicographically least weight- and face-preserving bijection onto
    /// `other`, if any.
    pub fn is_isomorphic(&self, other: &WeightedComplex) -> Option<VertexMap> {
        self.isomorphisms(other, 1).into_iter().next()
    }

    /// Up to `limit` isomorphisms onto `other`, in lexicographic order.
    pub fn isomorphisms(&self, other: &WeightedComplex, limit: usize) -> Vec<VertexMap> {
        if self.weights.len() != other.weights.len() || self.maximal.len() != other.maximal.len() {
            return Vec::new();
        }
        let mut ws: Vec<&BigUint> = self.weights.values().collect();
        let mut ws2: Vec<&BigUint> = other.weights.values().collect();
        ws.sort();
        ws2.sort();
        if ws != ws2 {
            return Vec::new();
        }
        let sig_a = Signatures::new(self);
        let sig_b = Signatures::new(other);
        let mut src: Vec<&Label> = self.weights.keys().collect();
        src.sort();
        let mut dst: Vec<&Label> = other.weights.keys().collect();
        dst.sort();

        let mut search = IsoSearch {
            a: self,
            b: other,
            sig_a,
            sig_b,
            src,
            dst,
            assigned: Vec::new(),
            used: BTreeSet::new(),
            found: Vec::new(),
            limit,
        };
        search.run();
        search.found
    }
}

/// Per-vertex invariants used to prune the isomorphism search.
struct Signatures<'a> {
    /// weight and sorted sizes of maximal faces through the vertex
    sig: BTreeMap<&'a Label, (&'a BigUint, Vec<usize>)>,
    /// vertices sharing some face
    adjacent: BTreeSet<(&'a Label, &'a Label)>,
}

impl<'a> Signatures<'a> {
    fn new(w: &'a WeightedComplex) -> Self {
        let mut sig: BTreeMap<&Label, (&BigUint, Vec<usize>)> = w
            .weights
            .iter()
            .map(|(l, wt)| (l, (wt, Vec::new())))
            .collect();
        let mut adjacent = BTreeSet::new();
        for f in &w.maximal {
            for v in f {
                if let Some(s) = sig.get_mut(v) {
                    s.1.push(f.len());
                }
                for u in f {
                    adjacent.insert((v, u));
                }
            }
        }
        for s in sig.values_mut() {
            s.1.sort_unstable();
        }
        Self { sig, adjacent }
    }
}

struct IsoSearch<'a> {
    a: &'a WeightedComplex,
    b: &'a WeightedComplex,
    sig_a: Signatures<'a>,
    sig_b: Signatures<'a>,
    src: Vec<&'a Label>,
    dst: Vec<&'a Label>,
    assigned: Vec<&'a Label>,
    used: BTreeSet<&'a Label>,
    found: Vec<VertexMap>,
    limit: usize,
}

impl<'a> IsoSearch<'a> {
    fn run(&mut self) {
        if self.found.len() >= self.limit {
            return;
        }
        let k = self.assigned.len();
        if k == self.src.len() {
            let gamma: VertexMap = self
                .src
                .iter()
                .zip(&self.assigned)
                .map(|(s, t)| ((*s).clone(), (*t).clone()))
                .collect();
            if self.a.is_isomorphism(self.b, &gamma) {
                self.found.push(gamma);
            }
            return;
        }
        let v = self.src[k];
        for i in 0..self.dst.len() {
            let t = self.dst[i];
            if self.used.contains(t) || self.sig_a.sig[v] != self.sig_b.sig[t] {
                continue;
            }
            let consistent = self.src[..k].iter().zip(&self.assigned).all(|(u, tu)| {
                self.sig_a.adjacent.contains(&(*u, v)) == self.sig_b.adjacent.contains(&(*tu, t))
            });
            if !consistent {
                continue;
            }
            self.assigned.push(t);
            self.used.insert(t);
            self.run();
            self.used.remove(t);
            self.assigned.pop();
            if self.found.len() >= self.limit {
                return;
            }
        }
    }
}

/// The weight of a new subdivision vertex: `w(v) + w(w)`.
pub fn subdivision_weight(w: &WeightedComplex, v: &Label, u: &Label) -> Option<BigUint> {
    Some(w.weight(v)? + w.weight(u)?)
}

/// Convenience: `BigUint` from a small integer.
pub fn weight(n: u64) -> BigUint {
    BigUint::from(n)
}

/// `true` when every weight is one.
pub fn unit_weights(w: &WeightedComplex) -> bool {
    w.weights.values().all(One::is_one)
}
