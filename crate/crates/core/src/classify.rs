//! Property checkers for the unital groups presented by stellar sequences,
//! and isomorphism verification between two sequences.
//!
//! Limit properties are only ever answered Yes or No under a certificate: a
//! declared eventually constant tail, a built-in family argument, or an
//! explicit witness that is re-checked here. Everything else is Unknown.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::complex::{Face, VertexMap};
use crate::exactgeom::Rational;
use crate::exactgeom::RationalPoint;
use crate::mcnfun::Bounded;
use crate::regular::{
    complex_contained, den_u, Containment, Realization, RegularComplex, RegularError, TailKind,
};
use crate::sequences::{
    confluent, Confluence, Family, Orbit, Provider, SequenceError, StellarSequence,
};
use crate::zhomeo::{linearize_values, transport, MapError, PLMap, Refinement, VertexValued};
use num_bigint::BigUint;
use num_traits::{One, Zero};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error(transparent)]
    Sequence(#[from] SequenceError),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Regular(#[from] RegularError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Yes,
    No,
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CertificateKind {
    TailDeclared,
    FamilyCertificate,
    Witness,
    BoundExhausted,
}

impl CertificateKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            CertificateKind::TailDeclared => "tail-declared",
            CertificateKind::FamilyCertificate => "family-certificate",
            CertificateKind::Witness => "witness",
            CertificateKind::BoundExhausted => "bound-exhausted",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    None,
    /// Tail index of an eventually constant sequence.
    Index(usize),
    /// A maximal face of the final complex.
    Face(Face),
    Points(Vec<RationalPoint>),
    /// A rational polyhedron containing the intersection of the orbit but no
    /// orbit element.
    Polyhedron(RegularComplex),
    /// Polyhedra covering the final support, neither containing it.
    CoveringPair(RegularComplex, RegularComplex),
    /// Text of the family argument.
    Family(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropertyResult {
    pub status: Status,
    pub certificate: CertificateKind,
    pub witness: Witness,
}

impl PropertyResult {
    fn tail(status: bool, k: usize) -> Self {
        Self {
            status: if status { Status::Yes } else { Status::No },
            certificate: CertificateKind::TailDeclared,
            witness: Witness::Index(k),
        }
    }

    fn family(status: Status, reason: &str) -> Self {
        Self {
            status,
            certificate: CertificateKind::FamilyCertificate,
            witness: Witness::Family(reason.to_string()),
        }
    }

    fn witnessed(status: Status, witness: Witness) -> Self {
        Self {
            status,
            certificate: CertificateKind::Witness,
            witness,
        }
    }

    fn unknown() -> Self {
        Self {
            status: Status::Unknown,
            certificate: CertificateKind::BoundExhausted,
            witness: Witness::None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropertyReport {
    pub tail: TailKind,
    pub depth: usize,
    pub finitely_presented: PropertyResult,
    pub spectrum_dim_le_1: PropertyResult,
    pub simplicial: PropertyResult,
    pub archimedean: PropertyResult,
    pub local: PropertyResult,
    pub embeds_in_r: PropertyResult,
    pub totally_ordered: PropertyResult,
}

impl PropertyReport {
    /// Properties by their report names, in a fixed order.
    pub fn entries(&self) -> [(&'static str, &PropertyResult); 7] {
        [
            ("finitely_presented", &self.finitely_presented),
            ("spectrum_dim_le_1", &self.spectrum_dim_le_1),
            ("simplicial", &self.simplicial),
            ("archimedean", &self.archimedean),
            ("local", &self.local),
            ("embeds_in_R", &self.embeds_in_r),
            ("totally_ordered", &self.totally_ordered),
        ]
    }
}

/// Embedding into the reals needs both archimedean and local.
fn conjunction(a: &PropertyResult, b: &PropertyResult) -> PropertyResult {
    match (a.status, b.status) {
        (Status::Yes, Status::Yes) => {
            let certificate = if a.certificate == b.certificate {
                a.certificate
            } else {
                CertificateKind::Witness
            };
            PropertyResult {
                status: Status::Yes,
                certificate,
                witness: a.witness.clone(),
            }
        }
        (Status::No, _) => a.clone(),
        (_, Status::No) => b.clone(),
        _ => PropertyResult::unknown(),
    }
}

pub fn classify(
    seq: &StellarSequence,
    depth: usize,
    max_blowups: usize,
) -> Result<PropertyReport, ClassifyError> {
    let tail = seq.tail();
    let report = match (tail, &seq.provider) {
        (TailKind::EventuallyConstant(k), _) => {
            let orbit = Orbit::new(seq, None, depth.max(k))?;
            classify_constant_tail(&orbit, k, max_blowups)?
        }
        (TailKind::Open, Provider::Family(Family::LexZ2 { .. })) => {
            let orbit = Orbit::new(seq, None, depth)?;
            classify_lex(&orbit, max_blowups)?
        }
        (TailKind::Open, Provider::Family(Family::EffrosShen { .. })) => classify_descent(),
        (TailKind::Open, _) => {
            let u = PropertyResult::unknown();
            PropertyReport {
                tail,
                depth,
                finitely_presented: u.clone(),
                spectrum_dim_le_1: u.clone(),
                simplicial: u.clone(),
                archimedean: u.clone(),
                local: u.clone(),
                embeds_in_r: u.clone(),
                totally_ordered: u,
            }
        }
    };
    Ok(PropertyReport {
        tail,
        depth,
        ..report
    })
}

fn classify_constant_tail(
    orbit: &Orbit,
    k: usize,
    max_blowups: usize,
) -> Result<PropertyReport, ClassifyError> {
    let last = &orbit.states()[k];
    let w = &last.weighted;
    let fin = &last.geometric;
    let big = |n: usize| w.maximal_faces().iter().find(|f| f.len() > n).cloned();

    let spectrum = match big(2) {
        None => PropertyResult::tail(true, k),
        Some(f) => PropertyResult::witnessed(Status::No, Witness::Face(f)),
    };
    let simplicial = match big(1) {
        None => PropertyResult::tail(true, k),
        Some(f) => PropertyResult::witnessed(Status::No, Witness::Face(f)),
    };
    let single_point = fin.vertices().len() == 1;
    let local = if single_point {
        PropertyResult::tail(true, k)
    } else {
        PropertyResult::witnessed(Status::No, Witness::Points(fin.vertices()[..2].to_vec()))
    };
    let archimedean = PropertyResult::tail(true, k);
    let totally_ordered = if single_point {
        PropertyResult::tail(true, k)
    } else {
        let (p, q) = covering_pair(fin)?;
        if verify_covering_pair(fin, &p, &q, max_blowups) {
            PropertyResult::witnessed(Status::No, Witness::CoveringPair(p, q))
        } else {
            PropertyResult::unknown()
        }
    };
    Ok(PropertyReport {
        tail: TailKind::EventuallyConstant(k),
        depth: orbit.depth(),
        finitely_presented: PropertyResult::tail(true, k),
        spectrum_dim_le_1: spectrum,
        simplicial,
        embeds_in_r: conjunction(&archimedean, &local),
        archimedean,
        local,
        totally_ordered,
    })
}

/// Two rational polyhedra whose union is `|fin|` and neither of which
/// contains it. With an edge `ab`, blow it up and split the simplexes into
/// those avoiding `b` and those avoiding `a`; no simplex keeps both. Without
/// edges, split off one isolated vertex.
pub fn covering_pair(
    fin: &RegularComplex,
) -> Result<(RegularComplex, RegularComplex), RegularError> {
    if let Some(&(a, b)) = fin.edges().first() {
        let (blown, _) = fin.blow_up_edge(a, b)?;
        let avoiding = |x: usize| -> Vec<Vec<usize>> {
            blown
                .maximal_simplexes()
                .iter()
                .filter(|s| !s.contains(&x))
                .cloned()
                .collect()
        };
        return Ok((blown.subcomplex(avoiding(b)), blown.subcomplex(avoiding(a))));
    }
    let simplexes: Vec<Vec<usize>> = fin.maximal_simplexes().iter().cloned().collect();
    let (first, rest) = simplexes.split_first().ok_or(RegularError::EmptySimplex)?;
    Ok((
        fin.subcomplex([first.clone()]),
        fin.subcomplex(rest.to_vec()),
    ))
}

/// `P ∪ Q ⊇ |fin|`, checked simplex by simplex on a common refinement, and
/// `|fin|` inside neither.
pub fn verify_covering_pair(
    fin: &RegularComplex,
    p: &RegularComplex,
    q: &RegularComplex,
    max_blowups: usize,
) -> bool {
    let Ok(union) = union_complex(p, q) else {
        return false;
    };
    complex_contained(&union, fin, max_blowups).is_yes()
        && complex_contained(p, fin, max_blowups).is_no()
        && complex_contained(q, fin, max_blowups).is_no()
}

/// Union of two complexes whose simplexes intersect in common faces.
fn union_complex(p: &RegularComplex, q: &RegularComplex) -> Result<RegularComplex, RegularError> {
    let mut pts: Vec<RationalPoint> = p.vertices().to_vec();
    for v in q.vertices() {
        if !pts.contains(v) {
            pts.push(v.clone());
        }
    }
    let idx = |v: &RationalPoint| pts.iter().position(|w| w == v).unwrap();
    let mut simplexes: Vec<Vec<usize>> = Vec::new();
    for c in [p, q] {
        for s in c.maximal_simplexes() {
            simplexes.push(s.iter().map(|&i| idx(c.vertex(i))).collect());
        }
    }
    let mut keep: BTreeSet<Vec<usize>> = BTreeSet::new();
    for s in &simplexes {
        let mut s = s.clone();
        s.sort_unstable();
        if !simplexes
            .iter()
            .any(|t| t.len() > s.len() && s.iter().all(|x| t.contains(x)))
        {
            keep.insert(s);
        }
    }
    let used: BTreeSet<usize> = keep.iter().flatten().copied().collect();
    let remap: Vec<Option<usize>> = {
        let mut r = vec![None; pts.len()];
        for (n, &i) in used.iter().enumerate() {
            r[i] = Some(n);
        }
        r
    };
    let vertices: Vec<RationalPoint> = used.iter().map(|&i| pts[i].clone()).collect();
    let keep: Vec<Vec<usize>> = keep
        .into_iter()
        .map(|s| s.into_iter().map(|i| remap[i].unwrap()).collect())
        .collect();
    RegularComplex::new(p.ambient_dim(), vertices, keep)
}

fn classify_lex(orbit: &Orbit, max_blowups: usize) -> Result<PropertyReport, ClassifyError> {
    let first = &orbit.states()[0];
    let zero = first
        .point(&"0".into())
        .ok_or_else(|| RegularError::NotRealization("vertex 0 is not realized".into()))?
        .clone();
    let point = RegularComplex::new(zero.ambient_dim(), vec![zero.clone()], [vec![0]])?;
    // the point lies in every element but contains none of them
    let verified = orbit.supports().iter().all(|d| {
        d.contains_point(&zero)
            && matches!(
                complex_contained(&point, d, max_blowups),
                Containment::No(_)
            )
    });
    let archimedean = if verified {
        PropertyResult::witnessed(Status::No, Witness::Polyhedron(point))
    } else {
        PropertyResult::unknown()
    };
    let rounds = "each round deletes two maximal sets and halves towards vertex 0";
    let local = PropertyResult::family(Status::Yes, "supports shrink to the realized vertex 0");
    Ok(PropertyReport {
        tail: TailKind::Open,
        depth: orbit.depth(),
        finitely_presented: PropertyResult::family(Status::No, rounds),
        spectrum_dim_le_1: PropertyResult::family(
            Status::Yes,
            "every complex has faces of at most two vertices",
        ),
        simplicial: PropertyResult::family(Status::No, "every third complex is an edge"),
        embeds_in_r: conjunction(&archimedean, &local),
        archimedean,
        local,
        totally_ordered: PropertyResult::family(
            Status::Yes,
            "lexicographic order on the limit point",
        ),
    })
}

fn classify_descent() -> PropertyReport {
    let irrational = "nested Farey intervals shrink to an irrational point; every rational polyhedron containing it contains a neighbourhood, hence an orbit interval";
    PropertyReport {
        tail: TailKind::Open,
        depth: 0,
        finitely_presented: PropertyResult::family(
            Status::No,
            "each round deletes two maximal sets",
        ),
        spectrum_dim_le_1: PropertyResult::family(
            Status::Yes,
            "every complex has faces of at most two vertices",
        ),
        simplicial: PropertyResult::family(Status::No, "every third complex is an edge"),
        archimedean: PropertyResult::family(Status::Yes, irrational),
        local: PropertyResult::family(Status::Yes, "interval lengths tend to zero"),
        embeds_in_r: PropertyResult::family(Status::Yes, "archimedean and local"),
        totally_ordered: PropertyResult::family(Status::Yes, "the limit is a single point"),
    }
}

/// Why two eventually constant sequences present non-isomorphic groups: a
/// quantity preserved by integral PL homeomorphisms differs on their final
/// supports.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Invariant {
    Dimension(usize, usize),
    Components(usize, usize),
    EulerCharacteristic(i64, i64),
    /// Sorted denominators of isolated points.
    IsolatedDenominators(Vec<BigUint>, Vec<BigUint>),
}

fn polyhedron_dim(c: &RegularComplex) -> usize {
    c.maximal_simplexes()
        .iter()
        .map(|s| s.len() - 1)
        .max()
        .unwrap_or(0)
}

fn components(c: &RegularComplex) -> usize {
    let n = c.vertices().len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for s in c.maximal_simplexes() {
        for w in s.windows(2) {
            let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
            parent[a] = b;
        }
    }
    (0..n).filter(|&i| find(&mut parent, i) == i).count()
}

fn euler_characteristic(c: &RegularComplex) -> i64 {
    let mut faces: BTreeSet<Vec<usize>> = BTreeSet::new();
    for s in c.maximal_simplexes() {
        for mask in 1u32..(1 << s.len()) {
            faces.insert(
                s.iter()
                    .enumerate()
                    .filter(|(k, _)| mask >> k & 1 == 1)
                    .map(|(_, &i)| i)
                    .collect(),
            );
        }
    }
    faces
        .iter()
        .map(|f| if f.len() % 2 == 1 { 1 } else { -1 })
        .sum()
}

fn isolated_dens(c: &RegularComplex) -> Vec<BigUint> {
    let mut d: Vec<BigUint> = c
        .maximal_simplexes()
        .iter()
        .filter(|s| s.len() == 1)
        .map(|s| den_u(c.vertex(s[0])))
        .collect();
    d.sort();
    d
}

/// First invariant that differs between the supports, if any.
pub fn invariant_mismatch(a: &RegularComplex, b: &RegularComplex) -> Option<Invariant> {
    let (da, db) = (polyhedron_dim(a), polyhedron_dim(b));
    if da != db {
        return Some(Invariant::Dimension(da, db));
    }
    let (ca, cb) = (components(a), components(b));
    if ca != cb {
        return Some(Invariant::Components(ca, cb));
    }
    let (ea, eb) = (euler_characteristic(a), euler_characteristic(b));
    if ea != eb {
        return Some(Invariant::EulerCharacteristic(ea, eb));
    }
    let (ia, ib) = (isolated_dens(a), isolated_dens(b));
    if ia != ib {
        return Some(Invariant::IsolatedDenominators(ia, ib));
    }
    None
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EquivalenceStatus {
    Certified,
    ConsistentToDepth(usize),
    Refuted(Invariant),
}

/// Where to compare the two sequences: `W_a_index` of the first against
/// `W_b_index` of the second, optionally through a fixed isomorphism.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pivot {
    pub a_index: usize,
    pub b_index: usize,
    pub gamma: Option<VertexMap>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivalenceVerdict {
    pub status: EquivalenceStatus,
    /// `(a_index, b_index)` of the pivot used.
    pub pivot: Option<(usize, usize)>,
    pub gamma: Option<VertexMap>,
    pub transport: Option<PLMap>,
    /// Images of the first orbit from the pivot on.
    pub image_supports: Vec<RegularComplex>,
}

/// Image of `delta` (which refines part of the domain of `eta`) under `eta`.
pub fn push_forward(eta: &PLMap, delta: &RegularComplex) -> Result<RegularComplex, MapError> {
    let images: Vec<RationalPoint> = delta
        .vertices()
        .iter()
        .map(|v| eta.apply_point(v))
        .collect::<Result<_, _>>()?;
    PLMap::interpolate(delta, &images)?.image_complex()
}

fn shifted(tail: TailKind, by: usize) -> TailKind {
    match tail {
        TailKind::EventuallyConstant(k) => TailKind::EventuallyConstant(k.saturating_sub(by)),
        TailKind::Open => TailKind::Open,
    }
}

/// Orbit depth needed: at least `depth`, and the whole finite part.
fn orbit_depth(seq: &StellarSequence, depth: usize) -> usize {
    match seq.tail() {
        TailKind::EventuallyConstant(k) => depth.max(k),
        TailKind::Open => depth,
    }
}

/// Last index worth pivoting at: beyond the tail all states coincide.
fn last_pivot(seq: &StellarSequence, depth: usize) -> usize {
    match seq.tail() {
        TailKind::EventuallyConstant(k) => depth.min(k),
        TailKind::Open => depth,
    }
}

/// Searches pivots `(i, j)` in lexicographic order, transports the skeleton
/// isomorphism to a PL map, pushes the first orbit forward from `i` and
/// compares it with the second orbit from `j`. Certified needs confluence
/// certified and an integral inverse. Refuted needs both tails eventually
/// constant, no working pivot, and a differing invariant of the final
/// supports.
pub fn check_equivalence(
    a: &StellarSequence,
    b: &StellarSequence,
    pivot: Option<Pivot>,
    depth: usize,
    max_blowups: usize,
) -> Result<EquivalenceVerdict, ClassifyError> {
    let oa = Orbit::new(a, None, orbit_depth(a, depth))?;
    let ob = Orbit::new(b, None, orbit_depth(b, depth))?;
    let both_constant = a.tail().is_eventually_constant() && b.tail().is_eventually_constant();

    let candidates: Vec<(usize, usize, Option<VertexMap>)> = match pivot {
        Some(p) => {
            if p.a_index > oa.depth() || p.b_index > ob.depth() {
                return Err(
                    SequenceError::MalformedFamily("pivot index beyond the orbit".into()).into(),
                );
            }
            vec![(p.a_index, p.b_index, p.gamma)]
        }
        None => (0..=last_pivot(a, depth))
            .flat_map(|i| (0..=last_pivot(b, depth)).map(move |j| (i, j, None)))
            .collect(),
    };

    let mut consistent: Option<EquivalenceVerdict> = None;
    for (i, j, gamma) in candidates {
        let (ra, rb) = (&oa.states()[i], &ob.states()[j]);
        let Some(gamma) = gamma.or_else(|| ra.weighted.is_isomorphic(&rb.weighted)) else {
            continue;
        };
        let Ok(eta) = transport(ra, rb, &gamma) else {
            continue;
        };
        let Ok(images) = oa.supports()[i..]
            .iter()
            .map(|d| push_forward(&eta, d))
            .collect::<Result<Vec<_>, _>>()
        else {
            continue;
        };
        let verdict = |status| EquivalenceVerdict {
            status,
            pivot: Some((i, j)),
            gamma: Some(gamma.clone()),
            transport: Some(eta.clone()),
            image_supports: images.clone(),
        };
        let conf = confluent(
            &images,
            shifted(a.tail(), i),
            &ob.supports()[j..],
            shifted(b.tail(), j),
            depth,
            max_blowups,
        )?;
        match conf {
            Confluence::Certified => {
                if eta.invert().is_ok() {
                    return Ok(verdict(EquivalenceStatus::Certified));
                }
            }
            Confluence::Consistent(_) => {
                if consistent.is_none() {
                    consistent = Some(verdict(EquivalenceStatus::ConsistentToDepth(depth)));
                }
                if !both_constant {
                    break;
                }
            }
            Confluence::Refuted(_) => {}
        }
    }
    if both_constant {
        let (fa, fb) = (oa.supports().pop().unwrap(), ob.supports().pop().unwrap());
        if let Some(inv) = invariant_mismatch(&fa, &fb) {
            return Ok(EquivalenceVerdict {
                status: EquivalenceStatus::Refuted(inv),
                pivot: None,
                gamma: None,
                transport: None,
                image_supports: Vec::new(),
            });
        }
    }
    Ok(consistent.unwrap_or(EquivalenceVerdict {
        status: EquivalenceStatus::ConsistentToDepth(depth),
        pivot: None,
        gamma: None,
        transport: None,
        image_supports: Vec::new(),
    }))
}

/// A constant sequence whose orbit is confluent with both inputs.
#[derive(Clone, Debug, PartialEq)]
pub struct StrongEquivalence {
    pub sequence: StellarSequence,
    /// The common refinement inside the first sequence's cube.
    pub in_a: Realization,
    /// Its image inside the second sequence's cube.
    pub in_b: RegularComplex,
    pub verdict: EquivalenceVerdict,
}

/// Barycentric coordinate map of a complex: affine exactly on its simplexes.
struct Hat<'a>(&'a RegularComplex);

impl VertexValued for Hat<'_> {
    fn carrier(&self) -> &RegularComplex {
        self.0
    }

    fn value_dim(&self) -> usize {
        self.0.vertices().len()
    }

    fn vertex_value(&self, i: usize) -> Vec<Rational> {
        (0..self.value_dim())
            .map(|k| {
                if k == i {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            })
            .collect()
    }
}

/// For eventually constant sequences with a certified equivalence: refines
/// the first final complex by Farey blow-ups until it also refines the pull
/// back of the second, and returns the constant sequence on its skeleton.
pub fn strong_equivalence(
    a: &StellarSequence,
    b: &StellarSequence,
    depth: usize,
    max_blowups: usize,
) -> Result<Bounded<StrongEquivalence>, ClassifyError> {
    if !(a.tail().is_eventually_constant() && b.tail().is_eventually_constant()) {
        return Ok(Bounded::Unknown);
    }
    let verdict = check_equivalence(a, b, None, depth, max_blowups)?;
    let (EquivalenceStatus::Certified, Some(eta)) = (&verdict.status, &verdict.transport) else {
        return Ok(Bounded::Unknown);
    };
    let fa = Orbit::new(a, None, orbit_depth(a, depth))?
        .supports()
        .pop()
        .unwrap();
    let fb = Orbit::new(b, None, orbit_depth(b, depth))?
        .supports()
        .pop()
        .unwrap();
    let back = eta.invert()?;
    let pulled = push_forward(&back, &fb)?;
    let common = match linearize_values(&fa, &Hat(&pulled), max_blowups) {
        Refinement::Done { complex, .. } => complex,
        Refinement::Unknown { .. } => return Ok(Bounded::Unknown),
    };
    let in_b = push_forward(eta, &common)?;
    let in_a = common.skeleton_realization();
    let sequence = StellarSequence::family(Family::SkeletonConstant(common))?;
    Ok(Bounded::Done(StrongEquivalence {
        sequence,
        in_a,
        in_b,
        verdict,
    }))
}
