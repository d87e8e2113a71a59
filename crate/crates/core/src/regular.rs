//! Regular rational complexes in the unit cube, their skeletons and
//! realizations, Farey blow-ups, and support containment.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::complex::{ComplexError, Face, Label, StellarStep, WeightedComplex};
use crate::exactgeom::{
    den, homogeneous, locate_in_simplex, points_regular, simplest_between, GeomError, Rational,
    RationalPoint, RationalSimplex,
};
use crate::lp::{self, LpOutcome};

/// Default cap on blow-ups in bounded refinement searches.
pub const DEFAULT_MAX_BLOWUPS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegularError {
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error("ambient dimension must be positive")]
    ZeroDimension,
    #[error("vertex {0} has the wrong ambient dimension")]
    DimensionMismatch(usize),
    #[error("vertex index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("vertices {0} and {1} coincide")]
    DuplicateVertex(usize, usize),
    #[error("vertex {0} belongs to no simplex")]
    UnusedVertex(usize),
    #[error("empty simplex")]
    EmptySimplex,
    #[error("simplex {0:?} is contained in {1:?}")]
    NestedSimplexes(Vec<usize>, Vec<usize>),
    #[error("simplex {0:?} is not regular")]
    NotRegular(Vec<usize>),
    #[error("edge is not regular")]
    EdgeNotRegular,
    #[error("{0:?} is not an edge of the complex")]
    NotAnEdge((usize, usize)),
    #[error("point {0} lies outside the support")]
    PointOutsideSupport(RationalPoint),
    #[error("point {0} is not the Farey mediant of an edge")]
    NotFareyMediant(RationalPoint),
    #[error("simplexes {0:?} and {1:?} meet outside a common face, e.g. at {2}")]
    BadIntersection(Vec<usize>, Vec<usize>, RationalPoint),
    #[error("not a realization: {0}")]
    NotRealization(String),
    #[error("mesh export supports ambient dimension at most 3")]
    MeshDimension,
}

/// A finite set of regular simplexes of `[0,1]^n`, closed under faces,
/// stored by its maximal simplexes.
///
/// Equality compares vertex tables and simplexes, ignoring whether the
/// geometric check has run; [`RegularComplex::same_simplexes`] ignores vertex
/// numbering too.
#[derive(Clone, Debug)]
pub struct RegularComplex {
    ambient_dim: usize,
    vertices: Vec<RationalPoint>,
    maximal: BTreeSet<Vec<usize>>,
    validated_geometric: bool,
}

impl PartialEq for RegularComplex {
    fn eq(&self, other: &Self) -> bool {
        self.ambient_dim == other.ambient_dim
            && self.vertices == other.vertices
            && self.maximal == other.maximal
    }
}

impl Eq for RegularComplex {}

/// Outcome of a bounded containment test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Containment {
    Yes,
    /// A rational point of the tested set outside the support.
    No(RationalPoint),
    Unknown,
}

impl Containment {
    pub fn is_yes(&self) -> bool {
        matches!(self, Containment::Yes)
    }

    pub fn is_no(&self) -> bool {
        matches!(self, Containment::No(_))
    }
}

/// Tail behaviour of a stellar sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TailKind {
    /// Every step from this index on is the identity.
    EventuallyConstant(usize),
    Open,
}

impl TailKind {
    pub fn is_eventually_constant(&self) -> bool {
        matches!(self, TailKind::EventuallyConstant(_))
    }
}

fn normalize(mut s: Vec<usize>) -> Vec<usize> {
    s.sort_unstable();
    s.dedup();
    s
}

/// Keeps the inclusion-maximal sets of `sets`.
fn keep_maximal(sets: BTreeSet<Vec<usize>>) -> BTreeSet<Vec<usize>> {
    let as_sets: Vec<BTreeSet<usize>> = sets.iter().map(|s| s.iter().copied().collect()).collect();
    sets.iter()
        .enumerate()
        .filter(|(i, _)| {
            !as_sets
                .iter()
                .enumerate()
                .any(|(j, t)| j != *i && as_sets[*i].is_subset(t) && as_sets[*i] != *t)
        })
        .map(|(_, s)| s.clone())
        .collect()
}

impl RegularComplex {
    /// Validates and builds a complex. Every maximal simplex must be regular;
    /// regularity of faces follows. Geometric intersection is not checked here,
    /// see [`Self::validate_geometric`].
    pub fn new(
        ambient_dim: usize,
        vertices: Vec<RationalPoint>,
        simplexes: impl IntoIterator<Item = Vec<usize>>,
    ) -> Result<Self, RegularError> {
        if ambient_dim == 0 {
            return Err(RegularError::ZeroDimension);
        }
        for (i, v) in vertices.iter().enumerate() {
            if v.ambient_dim() != ambient_dim {
                return Err(RegularError::DimensionMismatch(i));
            }
        }
        let mut sorted: Vec<(&RationalPoint, usize)> = vertices.iter().zip(0..).collect();
        sorted.sort();
        for w in sorted.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(RegularError::DuplicateVertex(
                    w[0].1.min(w[1].1),
                    w[0].1.max(w[1].1),
                ));
            }
        }
        let mut maximal = BTreeSet::new();
        for s in simplexes {
            if s.is_empty() {
                return Err(RegularError::EmptySimplex);
            }
            if let Some(&bad) = s.iter().find(|&&i| i >= vertices.len()) {
                return Err(RegularError::IndexOutOfRange(bad));
            }
            let s = normalize(s);
            let pts: Vec<&RationalPoint> = s.iter().map(|&i| &vertices[i]).collect();
            if !points_regular(&pts) {
                return Err(RegularError::NotRegular(s));
            }
            maximal.insert(s);
        }
        for a in &maximal {
            for b in &maximal {
                if a != b && a.iter().all(|x| b.contains(x)) {
                    return Err(RegularError::NestedSimplexes(a.clone(), b.clone()));
                }
            }
        }
        let used: BTreeSet<usize> = maximal.iter().flatten().copied().collect();
        if let Some(i) = (0..vertices.len()).find(|i| !used.contains(i)) {
            return Err(RegularError::UnusedVertex(i));
        }
        Ok(Self {
            ambient_dim,
            vertices,
            maximal,
            validated_geometric: false,
        })
    }

    /// Builds a complex from simplexes given by their points, merging equal
    /// vertices and dropping non-maximal simplexes.
    pub fn from_point_simplexes(
        ambient_dim: usize,
        simplexes: impl IntoIterator<Item = Vec<RationalPoint>>,
    ) -> Result<Self, RegularError> {
        let mut index: BTreeMap<RationalPoint, usize> = BTreeMap::new();
        let mut vertices = Vec::new();
        let mut sets = BTreeSet::new();
        for s in simplexes {
            let mut ids = Vec::new();
            for p in s {
                let next = vertices.len();
                let id = *index.entry(p.clone()).or_insert(next);
                if id == next {
                    vertices.push(p);
                }
                ids.push(id);
            }
            sets.insert(normalize(ids));
        }
        Self::new(ambient_dim, vertices, keep_maximal(sets))
    }

    /// The empty complex of the given ambient dimension.
    pub fn empty(ambient_dim: usize) -> Self {
        Self {
            ambient_dim,
            vertices: Vec::new(),
            maximal: BTreeSet::new(),
            validated_geometric: true,
        }
    }

    /// `[0,1]` and its faces.
    pub fn unit_interval() -> Self {
        Self::new(
            1,
            vec![
                RationalPoint::origin(1),
                RationalPoint::from_ratios(&[(1, 1)]).unwrap(),
            ],
            [vec![0, 1]],
        )
        .unwrap()
    }

    /// The standard triangulation of `[0,1]^n` into `n!` regular simplexes
    /// `0 <= x_{s(1)} <= ... <= x_{s(n)} <= 1` style chains of corners.
    pub fn unit_cube(n: usize) -> Self {
        assert!((1..=8).contains(&n), "cube dimension out of range");
        let corner = |mask: usize| {
            RationalPoint::new(
                (0..n)
                    .map(|k| {
                        if mask & (1 << k) != 0 {
                            Rational::one()
                        } else {
                            Rational::zero()
                        }
                    })
                    .collect(),
            )
            .unwrap()
        };
        let vertices: Vec<RationalPoint> = (0..1usize << n).map(corner).collect();
        let mut simplexes = Vec::new();
        let mut perm: Vec<usize> = (0..n).collect();
        loop {
            let mut mask = 0usize;
            let mut s = vec![0];
            for &k in &perm {
                mask |= 1 << k;
                s.push(mask);
            }
            simplexes.push(s);
            if !next_permutation(&mut perm) {
                break;
            }
        }
        let mut c = Self::new(n, vertices, simplexes).unwrap();
        c.validated_geometric = true;
        c
    }

    /// One simplex with all its faces.
    pub fn from_simplex(s: &RationalSimplex) -> Result<Self, RegularError> {
        let n = s.vertices().len();
        Self::new(s.ambient_dim(), s.vertices().to_vec(), [(0..n).collect()])
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn vertices(&self) -> &[RationalPoint] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> &RationalPoint {
        &self.vertices[i]
    }

    pub fn vertex_index(&self, p: &RationalPoint) -> Option<usize> {
        self.vertices.iter().position(|v| v == p)
    }

    pub fn maximal_simplexes(&self) -> &BTreeSet<Vec<usize>> {
        &self.maximal
    }

    pub fn is_empty(&self) -> bool {
        self.maximal.is_empty()
    }

    /// Maximal simplexes as point sets.
    pub fn point_simplexes(&self) -> BTreeSet<BTreeSet<RationalPoint>> {
        self.maximal
            .iter()
            .map(|s| s.iter().map(|&i| self.vertices[i].clone()).collect())
            .collect()
    }

    /// Same simplexes regardless of vertex numbering.
    pub fn same_simplexes(&self, other: &RegularComplex) -> bool {
        self.ambient_dim == other.ambient_dim && self.point_simplexes() == other.point_simplexes()
    }

    pub fn is_validated_geometric(&self) -> bool {
        self.validated_geometric
    }

    pub fn points(&self, simplex: &[usize]) -> Vec<&RationalPoint> {
        simplex.iter().map(|&i| &self.vertices[i]).collect()
    }

    pub fn simplex(&self, simplex: &[usize]) -> RationalSimplex {
        RationalSimplex::new(simplex.iter().map(|&i| self.vertices[i].clone()).collect())
            .expect("simplexes of a regular complex are affinely independent")
    }

    /// Largest simplex dimension, `None` for the empty complex.
    pub fn dim(&self) -> Option<usize> {
        self.maximal.iter().map(|s| s.len() - 1).max()
    }

    pub fn has_face(&self, f: &[usize]) -> bool {
        self.maximal.iter().any(|s| f.iter().all(|i| s.contains(i)))
    }

    /// All edges as sorted index pairs.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = BTreeSet::new();
        for s in &self.maximal {
            for (k, &a) in s.iter().enumerate() {
                for &b in &s[k + 1..] {
                    out.insert((a, b));
                }
            }
        }
        out.into_iter().collect()
    }

    /// Marks the complex as geometrically checked after running the check.
    pub fn validate_geometric(&mut self) -> Result<(), RegularError> {
        check_intersections(
            &self.vertices,
            &self.maximal.iter().cloned().collect::<Vec<_>>(),
        )?;
        self.validated_geometric = true;
        Ok(())
    }

    /// A maximal simplex containing `x` and its barycentric coordinates.
    pub fn locate(&self, x: &RationalPoint) -> Option<(&Vec<usize>, Vec<Rational>)> {
        if x.ambient_dim() != self.ambient_dim {
            return None;
        }
        self.maximal
            .iter()
            .find_map(|s| locate_in_simplex(&self.points(s), x).map(|mu| (s, mu)))
    }

    pub fn contains_point(&self, x: &RationalPoint) -> bool {
        self.locate(x).is_some()
    }

    /// The weighted complex with one vertex per point, weighted by `den`,
    /// labelled `_v0, _v1, ...` by vertex index.
    pub fn skeleton(&self) -> WeightedComplex {
        self.skeleton_realization().weighted
    }

    /// The skeleton together with its tautological realization.
    pub fn skeleton_realization(&self) -> Realization {
        let label = |i: usize| Label::new(format!("_v{i}"));
        let weights = self
            .vertices
            .iter()
            .enumerate()
            .map(|(i, p)| (label(i), den_u(p)));
        let faces = self
            .maximal
            .iter()
            .map(|s| s.iter().map(|&i| label(i)).collect::<Face>());
        let weighted = WeightedComplex::from_parts(weights, faces);
        let map = (0..self.vertices.len()).map(|i| (label(i), i)).collect();
        Realization {
            weighted,
            geometric: self.clone(),
            map,
        }
    }

    /// Subdivides the edge `{i, j}` at its Farey mediant. Returns the new
    /// complex and the index of the new vertex (always the last one).
    pub fn blow_up_edge(
        &self,
        i: usize,
        j: usize,
    ) -> Result<(RegularComplex, usize), RegularError> {
        let (i, j) = (i.min(j), i.max(j));
        if i == j || !self.has_face(&[i, j]) {
            return Err(RegularError::NotAnEdge((i, j)));
        }
        let p = mediant(&self.vertices[i], &self.vertices[j]);
        let new = self.vertices.len();
        let mut maximal = BTreeSet::new();
        for s in &self.maximal {
            if s.contains(&i) && s.contains(&j) {
                for drop in [j, i] {
                    let mut t: Vec<usize> = s.iter().copied().filter(|&x| x != drop).collect();
                    t.push(new);
                    maximal.insert(normalize(t));
                }
            } else {
                maximal.insert(s.clone());
            }
        }
        let mut vertices = self.vertices.clone();
        vertices.push(p);
        Ok((
            RegularComplex {
                ambient_dim: self.ambient_dim,
                vertices,
                maximal,
                validated_geometric: self.validated_geometric,
            },
            new,
        ))
    }

    /// Binary Farey blow-up at `p`, which must be the mediant of an edge.
    pub fn blow_up(&self, p: &RationalPoint) -> Result<RegularComplex, RegularError> {
        if !self.contains_point(p) {
            return Err(RegularError::PointOutsideSupport(p.clone()));
        }
        for (i, j) in self.edges() {
            if &mediant(&self.vertices[i], &self.vertices[j]) == p {
                return self.blow_up_edge(i, j).map(|(c, _)| c);
            }
        }
        Err(RegularError::NotFareyMediant(p.clone()))
    }

    /// Removes a maximal simplex, keeping its facets not covered elsewhere and
    /// dropping vertices left without a simplex. Also returns the old-to-new
    /// vertex index map.
    pub fn delete_maximal(
        &self,
        simplex: &[usize],
    ) -> Result<(RegularComplex, Vec<Option<usize>>), RegularError> {
        let s = normalize(simplex.to_vec());
        if !self.maximal.contains(&s) {
            return Err(RegularError::Complex(ComplexError::InvalidStep(format!(
                "{s:?} is not a maximal simplex"
            ))));
        }
        let mut maximal = self.maximal.clone();
        maximal.remove(&s);
        if s.len() > 1 {
            for k in 0..s.len() {
                let mut facet = s.clone();
                facet.remove(k);
                if !maximal.iter().any(|g| facet.iter().all(|x| g.contains(x))) {
                    maximal.insert(facet);
                }
            }
        }
        Ok(self.compact(maximal))
    }

    /// Keeps only the given maximal simplexes (which must be among or faces of
    /// ours), reindexing vertices.
    fn compact(&self, maximal: BTreeSet<Vec<usize>>) -> (RegularComplex, Vec<Option<usize>>) {
        let used: BTreeSet<usize> = maximal.iter().flatten().copied().collect();
        let mut remap = vec![None; self.vertices.len()];
        let mut vertices = Vec::new();
        for &i in &used {
            remap[i] = Some(vertices.len());
            vertices.push(self.vertices[i].clone());
        }
        let maximal = maximal
            .into_iter()
            .map(|s| s.into_iter().map(|i| remap[i].unwrap()).collect())
            .collect();
        (
            RegularComplex {
                ambient_dim: self.ambient_dim,
                vertices,
                maximal,
                validated_geometric: self.validated_geometric,
            },
            remap,
        )
    }

    /// Subcomplex spanned by the given simplexes (faces of this complex).
    pub fn subcomplex(&self, simplexes: impl IntoIterator<Item = Vec<usize>>) -> RegularComplex {
        let sets: BTreeSet<Vec<usize>> = simplexes.into_iter().map(normalize).collect();
        self.compact(keep_maximal(sets)).0
    }

    /// Text mesh: `v x y z` lines with decimal coordinates, then `p`, `l` and
    /// `f` elements for points, edges and triangles (tetrahedra emit their
    /// four triangles). Lossy; for viewing only.
    pub fn to_mesh(&self) -> Result<String, RegularError> {
        if self.ambient_dim > 3 {
            return Err(RegularError::MeshDimension);
        }
        let mut out = String::new();
        for v in &self.vertices {
            let mut parts: Vec<String> = v.coords().iter().map(|c| decimal(c, 6)).collect();
            while parts.len() < 3 {
                parts.push("0".to_string());
            }
            writeln!(out, "v {}", parts.join(" ")).unwrap();
        }
        let mut tris = BTreeSet::new();
        for s in &self.maximal {
            let one = |i: usize| i + 1;
            match s.len() {
                1 => writeln!(out, "p {}", one(s[0])).unwrap(),
                2 => writeln!(out, "l {} {}", one(s[0]), one(s[1])).unwrap(),
                3 => {
                    tris.insert((s[0], s[1], s[2]));
                }
                _ => {
                    for skip in 0..4 {
                        let t: Vec<usize> = (0..4).filter(|&k| k != skip).map(|k| s[k]).collect();
                        tris.insert((t[0], t[1], t[2]));
                    }
                }
            }
        }
        for (a, b, c) in tris {
            writeln!(out, "f {} {} {}", a + 1, b + 1, c + 1).unwrap();
        }
        Ok(out)
    }
}

fn next_permutation(v: &mut [usize]) -> bool {
    let n = v.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// `den` as an unsigned weight.
pub fn den_u(p: &RationalPoint) -> BigUint {
    den(p).to_biguint().expect("denominators are positive")
}

/// Decimal rendering with `digits` fractional digits, truncated toward zero.
pub fn decimal(q: &Rational, digits: u32) -> String {
    let scale = BigInt::from(10u32).pow(digits);
    let scaled = (q.numer() * &scale).div_floor(q.denom());
    let neg = scaled.sign() == Sign::Minus;
    let (int, frac) = scaled.abs().div_mod_floor(&scale);
    let mut s = format!("{}{}", if neg { "-" } else { "" }, int);
    if digits > 0 && !frac.is_zero() {
        let f = format!("{:0>width$}", frac.to_string(), width = digits as usize);
        s.push('.');
        s.push_str(f.trim_end_matches('0'));
    }
    s
}

/// Point whose homogeneous correspondent is the sum of those of `a` and `b`.
/// For a regular edge this is its Farey mediant.
pub fn mediant(a: &RationalPoint, b: &RationalPoint) -> RationalPoint {
    (&homogeneous(a) + &homogeneous(b))
        .to_point()
        .expect("sum of homogeneous vectors of cube points lies in the cube")
}

/// Farey mediant of a regular 1-simplex.
pub fn farey_mediant(e: &RationalSimplex) -> Result<RationalPoint, RegularError> {
    if e.dim() != 1 || !crate::exactgeom::is_regular(e) {
        return Err(RegularError::EdgeNotRegular);
    }
    Ok(mediant(&e.vertices()[0], &e.vertices()[1]))
}

/// Checks that every two simplexes meet in a common face, via exact linear
/// programming. Works on unvalidated data.
pub fn check_intersections(
    vertices: &[RationalPoint],
    simplexes: &[Vec<usize>],
) -> Result<(), RegularError> {
    for (k, s) in simplexes.iter().enumerate() {
        for t in &simplexes[k + 1..] {
            if let Some(x) = bad_intersection(vertices, s, t) {
                return Err(RegularError::BadIntersection(s.clone(), t.clone(), x));
            }
        }
    }
    Ok(())
}

/// A point of `conv(s) ∩ conv(t)` outside `conv(s ∩ t)`, if any. The
/// barycentric weight of `s`-vertices not in `t` is maximized; any positive
/// value exhibits a point off the shared face.
fn bad_intersection(vertices: &[RationalPoint], s: &[usize], t: &[usize]) -> Option<RationalPoint> {
    let n = vertices.first()?.ambient_dim();
    let (ls, lt) = (s.len(), t.len());
    let mut a = vec![vec![Rational::zero(); ls + lt]; n + 2];
    for (j, &v) in s.iter().enumerate() {
        for i in 0..n {
            a[i][j] = vertices[v].coords()[i].clone();
        }
        a[n][j] = Rational::one();
    }
    for (j, &v) in t.iter().enumerate() {
        for i in 0..n {
            a[i][ls + j] = -vertices[v].coords()[i].clone();
        }
        a[n + 1][ls + j] = Rational::one();
    }
    let mut b = vec![Rational::zero(); n + 2];
    b[n] = Rational::one();
    b[n + 1] = Rational::one();
    let c: Vec<Rational> = s
        .iter()
        .map(|v| {
            if t.contains(v) {
                Rational::zero()
            } else {
                Rational::one()
            }
        })
        .chain((0..lt).map(|_| Rational::zero()))
        .collect();
    match lp::maximize(&a, &b, &c) {
        LpOutcome::Optimal { value, solution } if value.is_positive() => {
            let pts: Vec<&RationalPoint> = s.iter().map(|&i| &vertices[i]).collect();
            RationalPoint::combination(&pts, &solution[..ls]).ok()
        }
        _ => None,
    }
}

/// Is `conv(s)` contained in `|delta|`? Splits `s` at homogeneous-sum
/// mediants of its edges, up to `max_blowups` splits. Exact and complete in
/// ambient dimension 1.
pub fn support_contains(
    delta: &RegularComplex,
    s: &RationalSimplex,
    max_blowups: usize,
) -> Containment {
    let pts: Vec<RationalPoint> = s.vertices().to_vec();
    points_contained(delta, pts, max_blowups)
}

/// [`support_contains`] for every maximal simplex of `gamma`.
pub fn complex_contained(
    delta: &RegularComplex,
    gamma: &RegularComplex,
    max_blowups: usize,
) -> Containment {
    let mut unknown = false;
    for s in gamma.maximal_simplexes() {
        match points_contained(
            delta,
            gamma.points(s).into_iter().cloned().collect(),
            max_blowups,
        ) {
            Containment::Yes => {}
            Containment::No(x) => return Containment::No(x),
            Containment::Unknown => unknown = true,
        }
    }
    if unknown {
        Containment::Unknown
    } else {
        Containment::Yes
    }
}

/// Mutual containment of supports.
pub fn supports_equal(a: &RegularComplex, b: &RegularComplex, max_blowups: usize) -> Containment {
    match complex_contained(b, a, max_blowups) {
        Containment::Yes => complex_contained(a, b, max_blowups),
        other => other,
    }
}

fn points_contained(
    delta: &RegularComplex,
    pts: Vec<RationalPoint>,
    max_blowups: usize,
) -> Containment {
    if pts.iter().any(|p| p.ambient_dim() != delta.ambient_dim()) {
        return Containment::Unknown;
    }
    if let Some(p) = pts.iter().find(|p| !delta.contains_point(p)) {
        return Containment::No(p.clone());
    }
    if pts.len() == 1 {
        return Containment::Yes;
    }
    if delta.ambient_dim() == 1 {
        return interval_contained(delta, &pts);
    }

    let mut queue = vec![pts];
    let mut splits = 0usize;
    while let Some(piece) = queue.pop() {
        let refs: Vec<&RationalPoint> = piece.iter().collect();
        if delta.maximal_simplexes().iter().any(|t| {
            refs.iter()
                .all(|p| locate_in_simplex(&delta.points(t), p).is_some())
        }) {
            continue;
        }
        if let Ok(b) = RationalPoint::barycenter(&refs) {
            if !delta.contains_point(&b) {
                return Containment::No(b);
            }
        }
        if splits >= max_blowups {
            return Containment::Unknown;
        }
        splits += 1;
        let (i, j) = split_edge(delta, &piece);
        let m = mediant(&piece[i], &piece[j]);
        if !delta.contains_point(&m) {
            return Containment::No(m);
        }
        let mut left = piece.clone();
        left[j] = m.clone();
        let mut right = piece;
        right[i] = m;
        queue.push(right);
        queue.push(left);
    }
    Containment::Yes
}

/// Chooses the edge of a piece to split: one whose relative interior holds a
/// vertex of `delta`, else the longest.
fn split_edge(delta: &RegularComplex, piece: &[RationalPoint]) -> (usize, usize) {
    let mut best: Option<((usize, usize), Rational)> = None;
    for i in 0..piece.len() {
        for j in i + 1..piece.len() {
            let e = [&piece[i], &piece[j]];
            let hit = delta
                .vertices()
                .iter()
                .any(|v| v != &piece[i] && v != &piece[j] && locate_in_simplex(&e, v).is_some());
            if hit {
                return (i, j);
            }
            let d = piece[i].dist2(&piece[j]);
            if best.as_ref().map_or(true, |(_, bd)| d > *bd) {
                best = Some(((i, j), d));
            }
        }
    }
    best.expect("piece has an edge").0
}

/// Exact interval test in dimension 1.
fn interval_contained(delta: &RegularComplex, pts: &[RationalPoint]) -> Containment {
    let x = |p: &RationalPoint| p.coords()[0].clone();
    let lo = pts.iter().map(x).min().unwrap();
    let hi = pts.iter().map(x).max().unwrap();
    let mut intervals: Vec<(Rational, Rational)> = delta
        .maximal_simplexes()
        .iter()
        .map(|s| {
            let a = x(delta.vertex(s[0]));
            let b = s.get(1).map_or_else(|| a.clone(), |&k| x(delta.vertex(k)));
            (a.clone().min(b.clone()), a.max(b))
        })
        .collect();
    intervals.sort();
    let mut reach = lo.clone();
    for (a, b) in intervals {
        if b < reach {
            continue;
        }
        if a > reach {
            break;
        }
        reach = b;
        if reach >= hi {
            return Containment::Yes;
        }
    }
    // first gap after `reach` inside [lo, hi]: the endpoints are covered,
    // so some open gap (reach, next) lies within (lo, hi)
    let next = delta
        .maximal_simplexes()
        .iter()
        .flat_map(|s| s.iter().map(|&k| x(delta.vertex(k))))
        .filter(|v| *v > reach)
        .min()
        .unwrap_or_else(|| hi.clone());
    let w = simplest_between(&reach, &next.min(hi));
    Containment::No(RationalPoint::new(vec![w]).expect("inside [0,1]"))
}

/// How to order vertices when building a canonical realization.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub enum VertexOrder {
    /// Lexicographic label order.
    #[default]
    Lex,
    /// Declaration order of the weighted complex.
    Given,
    Explicit(Vec<Label>),
}

/// `iota: W -> skeleton(geometric)`, an injective map of labels to vertex
/// indices that preserves weights (as denominators) and faces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Realization {
    pub weighted: WeightedComplex,
    pub geometric: RegularComplex,
    pub map: BTreeMap<Label, usize>,
}

impl Realization {
    /// Validates all realization invariants.
    pub fn new(
        weighted: WeightedComplex,
        geometric: RegularComplex,
        map: BTreeMap<Label, usize>,
    ) -> Result<Self, RegularError> {
        let r = Self {
            weighted,
            geometric,
            map,
        };
        r.check()?;
        Ok(r)
    }

    /// Re-checks the realization invariants.
    pub fn check(&self) -> Result<(), RegularError> {
        let bad = |m: String| Err(RegularError::NotRealization(m));
        let violations = self.weighted.validate();
        if !violations.is_empty() {
            return Err(ComplexError::Invalid(violations).into());
        }
        if self.map.len() != self.weighted.vertex_count()
            || self.map.len() != self.geometric.vertices().len()
        {
            return bad("vertex counts differ".into());
        }
        let image: BTreeSet<usize> = self.map.values().copied().collect();
        if image.len() != self.map.len()
            || image.iter().any(|&i| i >= self.geometric.vertices().len())
        {
            return bad("vertex map is not a bijection".into());
        }
        for (label, w) in self.weighted.weighted_vertices() {
            let Some(&i) = self.map.get(label) else {
                return bad(format!("vertex {label} is not mapped"));
            };
            if &den_u(self.geometric.vertex(i)) != w {
                return bad(format!(
                    "den of the image of {label} differs from its weight {w}"
                ));
            }
        }
        let mapped: BTreeSet<Vec<usize>> = self
            .weighted
            .maximal_faces()
            .iter()
            .map(|f| normalize(f.iter().map(|l| self.map[l]).collect()))
            .collect();
        if &mapped != self.geometric.maximal_simplexes() {
            return bad("faces do not match simplexes".into());
        }
        Ok(())
    }

    pub fn point(&self, v: &Label) -> Option<&RationalPoint> {
        self.map.get(v).map(|&i| self.geometric.vertex(i))
    }

    /// Label of vertex index `i`.
    pub fn label_of(&self, i: usize) -> Option<&Label> {
        self.map.iter().find(|(_, &j)| j == i).map(|(l, _)| l)
    }

    pub fn ambient_dim(&self) -> usize {
        self.geometric.ambient_dim()
    }
}

/// Places vertex `v_i` (in the chosen order) at `e_i / w(v_i)` in
/// `[0,1]^{|V|}`.
pub fn canonical_realization(
    w: &WeightedComplex,
    order: &VertexOrder,
) -> Result<Realization, RegularError> {
    let violations = w.validate();
    if !violations.is_empty() {
        return Err(ComplexError::Invalid(violations).into());
    }
    let labels: Vec<Label> = match order {
        VertexOrder::Lex => {
            let mut v: Vec<Label> = w.vertices().cloned().collect();
            v.sort();
            v
        }
        VertexOrder::Given => w.vertices().cloned().collect(),
        VertexOrder::Explicit(v) => {
            let given: BTreeSet<&Label> = v.iter().collect();
            let have: BTreeSet<&Label> = w.vertices().collect();
            if given != have || v.len() != have.len() {
                return Err(RegularError::NotRealization(
                    "vertex order is not a permutation of the vertices".into(),
                ));
            }
            v.clone()
        }
    };
    let n = labels.len();
    let vertices: Vec<RationalPoint> = labels
        .iter()
        .enumerate()
        .map(|(i, l)| {
            RationalPoint::scaled_basis(n, i, &BigInt::from(w.weight(l).unwrap().clone()))
        })
        .collect();
    let map: BTreeMap<Label, usize> = labels.iter().cloned().zip(0..).collect();
    let simplexes: Vec<Vec<usize>> = w
        .maximal_faces()
        .iter()
        .map(|f| f.iter().map(|l| map[l]).collect())
        .collect();
    let mut geometric = RegularComplex::new(n, vertices, simplexes)?;
    // simplexes spanned by distinct scaled basis vectors always meet in faces
    geometric.validated_geometric = true;
    Realization::new(w.clone(), geometric, map)
}

/// The transformation of a realization induced by a stellar step:
/// deletion removes `conv(iota(M))`, subdivision blows up `conv(iota(E))` at
/// its Farey mediant and sends the new label there.
pub fn delta_transform(r: &Realization, step: &StellarStep) -> Result<Realization, RegularError> {
    r.weighted.check_step(step)?;
    match step {
        StellarStep::Identity => Ok(r.clone()),
        StellarStep::DeleteMaximal(m) => {
            let simplex: Vec<usize> = m.iter().map(|l| r.map[l]).collect();
            let (geometric, remap) = r.geometric.delete_maximal(&simplex)?;
            let weighted = r.weighted.apply_step(step)?;
            let map = r
                .map
                .iter()
                .filter_map(|(l, &i)| remap[i].map(|j| (l.clone(), j)))
                .collect();
            Ok(Realization {
                weighted,
                geometric,
                map,
            })
        }
        StellarStep::Subdivide {
            edge: (v, w),
            new_label,
        } => {
            let (geometric, new) = r.geometric.blow_up_edge(r.map[v], r.map[w])?;
            let weighted = r.weighted.apply_step(step)?;
            debug_assert_eq!(
                Some(&den_u(geometric.vertex(new))),
                weighted.weight(new_label),
                "mediant denominator equals the subdivision weight"
            );
            let mut map = r.map.clone();
            map.insert(new_label.clone(), new);
            Ok(Realization {
                weighted,
                geometric,
                map,
            })
        }
    }
}
