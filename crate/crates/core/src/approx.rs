//! Finite approximations of a source group and the diagrams they form.
//!
//! An approximation is a finite group `F` with a homomorphism `φ` from the
//! source. Every target is held as a table group. Structure maps from a
//! finite table group are full element maps; from a presented abelian
//! source they are the images of the standard generators.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::sync::Arc;

use serde::ser::{SerializeMap, SerializeSeq};
use serde::{Serialize, Serializer};

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::fingroup::intmat::{superlattice_candidates, superlattices};
use crate::fingroup::{
    abelian_generator_images, encode, is_homomorphism, table_hom_maps, FinAbGroup, FinGroup,
    Homomorphism, Lattice,
};
use crate::fplin::{all_subspaces, quotient_space, PrimeField, Subspace};
use crate::par;

/// The group being completed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SourceGroup {
    Finite(Arc<FinGroup>),
    /// `Z^rank x Z/t1 x ... x Z/tk`, torsion in invariant-factor form.
    FgAbelian {
        rank: usize,
        torsion: Vec<u64>,
    },
    /// `F_p^dim`.
    FpSpace {
        p: u64,
        dim: usize,
    },
    /// Finitely supported `F_p`-sequences seen through the coordinate
    /// forms `p_0, ..., p_level`.
    RestrictedSeq {
        p: u64,
        level: usize,
    },
}

/// A source element: an index for table groups, integer coordinates on the
/// standard generators otherwise.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(untagged)]
pub enum SourceElement {
    Index(usize),
    Coords(Vec<i64>),
}

impl SourceGroup {
    pub fn finite(g: FinGroup) -> Self {
        SourceGroup::Finite(Arc::new(g))
    }

    /// Finite abelian groups are presented sources of rank 0.
    pub fn finite_abelian(a: &FinAbGroup) -> Self {
        SourceGroup::FgAbelian {
            rank: 0,
            torsion: a.factors().to_vec(),
        }
    }

    pub fn integers() -> Self {
        SourceGroup::FgAbelian {
            rank: 1,
            torsion: Vec::new(),
        }
    }

    pub fn cyclic(n: u64) -> Self {
        Self::finite_abelian(&FinAbGroup::cyclic(n))
    }

    pub fn trivial() -> Self {
        Self::finite_abelian(&FinAbGroup::trivial())
    }

    /// `Z^rank` times the given cyclic factors, normalized to invariant
    /// factors.
    pub fn fg_abelian(rank: usize, torsion: &[i64]) -> Result<Self> {
        let t = FinAbGroup::cyclic_product(torsion)?;
        Ok(SourceGroup::FgAbelian {
            rank,
            torsion: t.factors().to_vec(),
        })
    }

    pub fn fp_space(p: u64, dim: usize) -> Result<Self> {
        PrimeField::new(p)?;
        Ok(SourceGroup::FpSpace { p, dim })
    }

    pub fn restricted_seq(p: u64, level: usize) -> Result<Self> {
        PrimeField::new(p)?;
        Ok(SourceGroup::RestrictedSeq { p, level })
    }

    pub fn name(&self) -> String {
        match self {
            SourceGroup::Finite(g) => g.name().to_string(),
            SourceGroup::FgAbelian { rank, torsion } => {
                let mut parts = Vec::new();
                match rank {
                    0 => {}
                    1 => parts.push("Z".to_string()),
                    r => parts.push(format!("Z^{r}")),
                }
                parts.extend(torsion.iter().map(|t| format!("Z/{t}")));
                if parts.is_empty() {
                    "1".into()
                } else {
                    parts.join(" x ")
                }
            }
            SourceGroup::FpSpace { p, dim } => format!("F{p}^{dim}"),
            SourceGroup::RestrictedSeq { p, level } => format!("seq({p}, {level})"),
        }
    }

    /// Orders of the standard abelian generators (`0` for a free one), or
    /// `None` for a table group.
    pub fn presentation(&self) -> Option<Vec<u64>> {
        match self {
            SourceGroup::Finite(_) => None,
            SourceGroup::FgAbelian { rank, torsion } => {
                let mut t = vec![0; *rank];
                t.extend(torsion);
                Some(t)
            }
            SourceGroup::FpSpace { p, dim } => Some(vec![*p; *dim]),
            SourceGroup::RestrictedSeq { p, level } => Some(vec![*p; level + 1]),
        }
    }

    /// Generators used for structure maps: the greedy generators of a table
    /// group, or the standard basis.
    pub fn generators(&self) -> Vec<SourceElement> {
        match self {
            SourceGroup::Finite(g) => g
                .generators()
                .into_iter()
                .map(SourceElement::Index)
                .collect(),
            _ => {
                let n = self.presentation().expect("presented").len();
                (0..n)
                    .map(|i| {
                        let mut c = vec![0; n];
                        c[i] = 1;
                        SourceElement::Coords(c)
                    })
                    .collect()
            }
        }
    }

    /// Order of the group, `None` when infinite.
    pub fn order(&self) -> Option<u128> {
        match self {
            SourceGroup::Finite(g) => Some(g.order() as u128),
            _ => {
                let t = self.presentation().expect("presented");
                if t.contains(&0) {
                    None
                } else {
                    Some(t.iter().map(|&x| x as u128).product())
                }
            }
        }
    }

    pub fn identity(&self) -> SourceElement {
        match self {
            SourceGroup::Finite(_) => SourceElement::Index(0),
            _ => SourceElement::Coords(vec![0; self.presentation().expect("presented").len()]),
        }
    }

    /// Every element of a finite source. Presented elements use reduced
    /// coordinates in mixed-radix order (first coordinate most significant).
    pub fn elements(&self, budget: &Budget) -> Result<Vec<SourceElement>> {
        let n = self
            .order()
            .ok_or_else(|| Error::Invalid(format!("{} is infinite", self.name())))?;
        Budget::check("source elements", n, budget.limit_elements as u128)?;
        Ok(match self {
            SourceGroup::Finite(g) => (0..g.order()).map(SourceElement::Index).collect(),
            _ => {
                let t = self.presentation().expect("presented");
                (0..n as usize)
                    .map(|i| {
                        SourceElement::Coords(
                            crate::fingroup::decode(&t, i)
                                .into_iter()
                                .map(|x| x as i64)
                                .collect(),
                        )
                    })
                    .collect()
            }
        })
    }

    pub fn check_element(&self, g: &SourceElement) -> Result<()> {
        match (self, g) {
            (SourceGroup::Finite(grp), SourceElement::Index(i)) if *i < grp.order() => Ok(()),
            (SourceGroup::Finite(grp), _) => Err(Error::Invalid(format!(
                "expected an element index below {}",
                grp.order()
            ))),
            (_, SourceElement::Coords(c)) => {
                let n = self.presentation().expect("presented").len();
                if c.len() == n {
                    Ok(())
                } else {
                    Err(Error::Dimension {
                        expected: n,
                        found: c.len(),
                    })
                }
            }
            (_, SourceElement::Index(_)) => Err(Error::Invalid(
                "expected integer coordinates for a presented source".into(),
            )),
        }
    }
}

impl Serialize for SourceGroup {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(None)?;
        m.serialize_entry("name", &self.name())?;
        match self {
            SourceGroup::Finite(g) => {
                m.serialize_entry("kind", "finite")?;
                m.serialize_entry("group", &**g)?;
            }
            SourceGroup::FgAbelian { rank, torsion } => {
                m.serialize_entry("kind", "fg_abelian")?;
                m.serialize_entry("rank", rank)?;
                m.serialize_entry("torsion", torsion)?;
            }
            SourceGroup::FpSpace { p, dim } => {
                m.serialize_entry("kind", "fp_space")?;
                m.serialize_entry("p", p)?;
                m.serialize_entry("dim", dim)?;
            }
            SourceGroup::RestrictedSeq { p, level } => {
                m.serialize_entry("kind", "restricted_seq")?;
                m.serialize_entry("p", p)?;
                m.serialize_entry("level", level)?;
            }
        }
        m.end()
    }
}

/// How `φ` is stored.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StructureMap {
    /// Image of every element of a table source.
    Elements(Vec<usize>),
    /// Images of the standard generators of a presented source.
    Generators(Vec<usize>),
}

/// A couple `(F, φ)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Approximation {
    source: Arc<SourceGroup>,
    target: Arc<FinGroup>,
    phi: StructureMap,
    gen_images: Vec<usize>,
    surjective: bool,
    key: String,
}

impl Approximation {
    /// Validates `φ`: exhaustively for table sources, on the relations
    /// (orders and commutation of generator images) for presented ones.
    pub fn new(
        source: Arc<SourceGroup>,
        target: Arc<FinGroup>,
        phi: StructureMap,
        key: impl Into<String>,
    ) -> Result<Self> {
        let gen_images = match (&*source, &phi) {
            (SourceGroup::Finite(g), StructureMap::Elements(map)) => {
                if !is_homomorphism(g, &target, map) {
                    return Err(Error::Invalid("structure map is not a homomorphism".into()));
                }
                g.generators().into_iter().map(|x| map[x]).collect()
            }
            (SourceGroup::Finite(_), _) => {
                return Err(Error::Invalid("table sources need an element map".into()))
            }
            (src, StructureMap::Generators(images)) => {
                let t = src.presentation().expect("presented");
                if images.len() != t.len() {
                    return Err(Error::Dimension {
                        expected: t.len(),
                        found: images.len(),
                    });
                }
                for (i, (&y, &o)) in images.iter().zip(&t).enumerate() {
                    if y >= target.order() || (o != 0 && o % target.element_order(y) != 0) {
                        return Err(Error::Invalid(format!("generator {i} breaks its relation")));
                    }
                    if images[..i].iter().any(|&x| !target.commute(x, y)) {
                        return Err(Error::Invalid("generator images do not commute".into()));
                    }
                }
                images.clone()
            }
            (_, StructureMap::Elements(_)) => {
                return Err(Error::Invalid(
                    "presented sources need generator images".into(),
                ))
            }
        };
        Ok(Self::trusted(source, target, phi, gen_images, key.into()))
    }

    fn trusted(
        source: Arc<SourceGroup>,
        target: Arc<FinGroup>,
        phi: StructureMap,
        gen_images: Vec<usize>,
        key: String,
    ) -> Self {
        let surjective = target.closure(&gen_images).len() == target.order();
        Approximation {
            source,
            target,
            phi,
            gen_images,
            surjective,
            key,
        }
    }

    pub fn source(&self) -> &Arc<SourceGroup> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FinGroup> {
        &self.target
    }

    pub fn phi(&self) -> &StructureMap {
        &self.phi
    }

    /// Images of [`SourceGroup::generators`].
    pub fn generator_images(&self) -> &[usize] {
        &self.gen_images
    }

    pub fn is_surjective(&self) -> bool {
        self.surjective
    }

    pub fn key(&self) -> &str {
        &self.key
    }

    /// `φ(g)`.
    pub fn apply(&self, g: &SourceElement) -> Result<usize> {
        self.source.check_element(g)?;
        Ok(match (&self.phi, g) {
            (StructureMap::Elements(map), SourceElement::Index(i)) => map[*i],
            (StructureMap::Generators(images), SourceElement::Coords(c)) => {
                images.iter().zip(c).fold(0, |acc, (&y, &k)| {
                    self.target.op(acc, self.target.pow(y, k))
                })
            }
            _ => unreachable!("element kind checked against the source"),
        })
    }

    /// Whether `f ∘ φ_self = φ_other` on the source generators.
    pub fn commutes(&self, f: &[usize], other: &Approximation) -> bool {
        self.gen_images
            .iter()
            .zip(&other.gen_images)
            .all(|(&a, &b)| f[a] == b)
    }
}

impl Serialize for Approximation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(4))?;
        m.serialize_entry("key", &self.key)?;
        m.serialize_entry("target", &*self.target)?;
        m.serialize_entry("phi", &self.phi)?;
        m.serialize_entry("surjective", &self.surjective)?;
        m.end()
    }
}

/// An arrow `f : v -> w` between two nodes of a diagram, stored as the
/// element map of `f`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApproxMorphism {
    pub from: usize,
    pub to: usize,
    pub map: Arc<[usize]>,
}

impl Serialize for ApproxMorphism {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(3))?;
        m.serialize_entry("from", &self.from)?;
        m.serialize_entry("to", &self.to)?;
        m.serialize_entry("map", &*self.map)?;
        m.end()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagramKind {
    /// Surjective approximations, one per finite-index kernel.
    Surjective,
    /// Every approximation into a catalog of targets.
    Full,
}

/// A finite diagram of approximations of one source.
#[derive(Debug, Clone)]
pub struct ApproxDiagram {
    source: Arc<SourceGroup>,
    bound: usize,
    kind: DiagramKind,
    nodes: Vec<Approximation>,
    edges: Vec<ApproxMorphism>,
}

impl ApproxDiagram {
    /// Assembles a diagram, checking that keys are unique and every edge
    /// commutes with the structure maps.
    pub fn new(
        source: Arc<SourceGroup>,
        bound: usize,
        kind: DiagramKind,
        nodes: Vec<Approximation>,
        edges: Vec<ApproxMorphism>,
    ) -> Result<Self> {
        let mut keys = HashSet::new();
        for v in &nodes {
            if !keys.insert(v.key.as_str()) {
                return Err(Error::Invalid(format!("duplicate node key {}", v.key)));
            }
        }
        for e in &edges {
            let (Some(v), Some(w)) = (nodes.get(e.from), nodes.get(e.to)) else {
                return Err(Error::Invalid("edge endpoint out of range".into()));
            };
            if !is_homomorphism(&v.target, &w.target, &e.map) || !v.commutes(&e.map, w) {
                return Err(Error::Mismatch(format!(
                    "edge {} -> {} does not commute",
                    v.key, w.key
                )));
            }
        }
        Ok(ApproxDiagram {
            source,
            bound,
            kind,
            nodes,
            edges,
        })
    }

    pub fn source(&self) -> &Arc<SourceGroup> {
        &self.source
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn kind(&self) -> DiagramKind {
        self.kind
    }

    pub fn nodes(&self) -> &[Approximation] {
        &self.nodes
    }

    pub fn edges(&self) -> &[ApproxMorphism] {
        &self.edges
    }

    pub fn node_by_key(&self, key: &str) -> Option<usize> {
        self.nodes.iter().position(|v| v.key == key)
    }

    /// Edges `from -> to`.
    pub fn edges_between(&self, from: usize, to: usize) -> impl Iterator<Item = &ApproxMorphism> {
        self.edges
            .iter()
            .filter(move |e| e.from == from && e.to == to)
    }

    /// Whether composites of listed edges are listed.
    pub fn is_closed_under_composition(&self) -> bool {
        let present: HashSet<(usize, usize, &[usize])> =
            self.edges.iter().map(|e| (e.from, e.to, &*e.map)).collect();
        let mut out: Vec<Vec<&ApproxMorphism>> = vec![Vec::new(); self.nodes.len()];
        for e in &self.edges {
            out[e.from].push(e);
        }
        self.edges.iter().all(|e1| {
            out[e1.to].iter().all(|e2| {
                let comp: Vec<usize> = e1.map.iter().map(|&x| e2.map[x]).collect();
                present.contains(&(e1.from, e2.to, comp.as_slice()))
            })
        })
    }

    /// The full subdiagram on the given nodes (kept in the given order).
    pub fn restrict_to(&self, keep: &[usize]) -> Result<ApproxDiagram> {
        let mut pos = vec![usize::MAX; self.nodes.len()];
        for (i, &v) in keep.iter().enumerate() {
            pos[v] = i;
        }
        let nodes = keep.iter().map(|&v| self.nodes[v].clone()).collect();
        let edges = self
            .edges
            .iter()
            .filter(|e| pos[e.from] != usize::MAX && pos[e.to] != usize::MAX)
            .map(|e| ApproxMorphism {
                from: pos[e.from],
                to: pos[e.to],
                map: e.map.clone(),
            })
            .collect();
        Ok(ApproxDiagram {
            source: self.source.clone(),
            bound: self.bound,
            kind: self.kind,
            nodes,
            edges,
        })
    }

    /// Graphviz text; nodes are labeled by their target group.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph {\n");
        for (i, v) in self.nodes.iter().enumerate() {
            let _ = writeln!(
                s,
                "  n{i} [label=\"{}\"];",
                v.target.name().replace('"', "\\\"")
            );
        }
        for e in &self.edges {
            let _ = writeln!(s, "  n{} -> n{};", e.from, e.to);
        }
        s.push_str("}\n");
        s
    }
}

impl Serialize for ApproxDiagram {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        struct Seq<'a, T>(&'a [T]);
        impl<T: Serialize> Serialize for Seq<'_, T> {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                let mut q = s.serialize_seq(Some(self.0.len()))?;
                for x in self.0 {
                    q.serialize_element(x)?;
                }
                q.end()
            }
        }
        let mut m = s.serialize_map(Some(5))?;
        m.serialize_entry("source", &*self.source)?;
        m.serialize_entry("bound", &self.bound)?;
        m.serialize_entry("mode", &self.kind)?;
        m.serialize_entry("nodes", &Seq(&self.nodes))?;
        m.serialize_entry("edges", &Seq(&self.edges))?;
        m.end()
    }
}

/// The map `F_v -> F_w` through which `φ_w` factors, when `φ_v` is
/// surjective and the factorization exists.
pub fn factor_through(v: &Approximation, w: &Approximation) -> Option<Vec<usize>> {
    if !v.surjective {
        return None;
    }
    let (fv, fw) = (&v.target, &w.target);
    let mut map = vec![usize::MAX; fv.order()];
    map[0] = 0;
    let mut stack = vec![0];
    while let Some(a) = stack.pop() {
        for (&gv, &gw) in v.gen_images.iter().zip(&w.gen_images) {
            let b = fv.op(a, gv);
            let img = fw.op(map[a], gw);
            if map[b] == usize::MAX {
                map[b] = img;
                stack.push(b);
            } else if map[b] != img {
                return None;
            }
        }
    }
    is_homomorphism(fv, fw, &map).then_some(map)
}

/// Every homomorphism `f : F_v -> F_w` with `f ∘ φ_v = φ_w`, found by
/// exhaustive search over `Hom(F_v, F_w)`.
pub fn hom_between(
    v: &Approximation,
    w: &Approximation,
    budget: &Budget,
) -> Result<Vec<Homomorphism>> {
    if v.source != w.source {
        return Err(Error::Mismatch(
            "approximations of different sources".into(),
        ));
    }
    table_hom_maps(&v.target, &w.target, budget)?
        .into_iter()
        .filter(|f| v.commutes(f, w))
        .map(|f| Homomorphism::new(v.target.clone(), w.target.clone(), f))
        .collect()
}

enum Kernel {
    Normal(Vec<usize>),
    Lattice(Lattice),
    Subspace(Subspace),
}

impl Kernel {
    fn is_contained_in(&self, other: &Kernel) -> bool {
        match (self, other) {
            (Kernel::Normal(a), Kernel::Normal(b)) => a.iter().all(|x| b.binary_search(x).is_ok()),
            (Kernel::Lattice(a), Kernel::Lattice(b)) => b.contains_lattice(a),
            (Kernel::Subspace(a), Kernel::Subspace(b)) => a.is_subspace_of(b),
            _ => false,
        }
    }
}

/// One node per finite-index kernel of index at most `bound`, with every
/// induced map `G/N -> G/M` for `N ⊆ M`, identities included.
pub fn surjective_approximations(
    source: &SourceGroup,
    bound: usize,
    budget: &Budget,
) -> Result<ApproxDiagram> {
    surjective_approximations_with(source, bound, true, budget)
}

/// [`surjective_approximations`] with control over identity edges.
pub fn surjective_approximations_with(
    source: &SourceGroup,
    bound: usize,
    identities: bool,
    budget: &Budget,
) -> Result<ApproxDiagram> {
    if bound == 0 {
        return Err(Error::Invalid("bound must be at least 1".into()));
    }
    Budget::check(
        "approximation bound",
        bound as u128,
        budget.table_order as u128,
    )?;
    let src = Arc::new(source.clone());
    let nodes: Vec<(Approximation, Kernel)> = match source {
        SourceGroup::Finite(g) => {
            let mut subs: Vec<Vec<usize>> = g
                .normal_subgroups()
                .into_iter()
                .filter(|n| g.order() / n.len() <= bound)
                .collect();
            subs.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
            subs.into_iter()
                .map(|n| {
                    let (q, coset) = g.quotient(&n)?;
                    let key = format!("ker{n:?}");
                    let gens = g.generators().into_iter().map(|x| coset[x]).collect();
                    let v = Approximation::trusted(
                        src.clone(),
                        Arc::new(q),
                        StructureMap::Elements(coset),
                        gens,
                        key,
                    );
                    Ok((v, Kernel::Normal(n)))
                })
                .collect::<Result<_>>()?
        }
        SourceGroup::FgAbelian { .. } => {
            let t = source.presentation().expect("presented");
            let m = t.len();
            Budget::check(
                "finite-index subgroup candidates",
                superlattice_candidates(m, bound as u64),
                budget.hom_candidates,
            )?;
            let relations: Vec<Vec<i64>> = t
                .iter()
                .enumerate()
                .filter(|(_, &o)| o != 0)
                .map(|(i, &o)| {
                    let mut r = vec![0; m];
                    r[i] = o as i64;
                    r
                })
                .collect();
            superlattices(m, &relations, bound as u64)
                .into_iter()
                .map(|lat| {
                    let (factors, images) = lat.quotient();
                    let q = FinAbGroup::from_invariant_unchecked(factors.clone()).to_fin_group()?;
                    let gens = images
                        .iter()
                        .map(|c| encode(&factors, c))
                        .collect::<Vec<_>>();
                    let key = format!("ker{:?}", lat.basis_i64());
                    let v = Approximation::trusted(
                        src.clone(),
                        Arc::new(q),
                        StructureMap::Generators(gens.clone()),
                        gens,
                        key,
                    );
                    Ok((v, Kernel::Lattice(lat)))
                })
                .collect::<Result<_>>()?
        }
        SourceGroup::FpSpace { p, dim } => {
            let mut subs: Vec<Subspace> = all_subspaces(*p, *dim, budget)?
                .into_iter()
                .filter(|z| (*p as u128).pow((dim - z.dim()) as u32) <= bound as u128)
                .collect();
            subs.sort_by(|a, b| {
                b.dim()
                    .cmp(&a.dim())
                    .then_with(|| a.basis_rows().cmp(&b.basis_rows()))
            });
            subs.into_iter()
                .map(|z| {
                    let q = quotient_space(*dim, &z)?;
                    let factors = vec![*p; q.dim()];
                    let target =
                        FinAbGroup::from_invariant_unchecked(factors.clone()).to_fin_group()?;
                    let gens: Vec<usize> = (0..*dim)
                        .map(|j| {
                            let mut e = vec![0; *dim];
                            e[j] = 1;
                            encode(&factors, &q.project(&e))
                        })
                        .collect();
                    let key = format!("ker{:?}", z.basis_rows());
                    let v = Approximation::trusted(
                        src.clone(),
                        Arc::new(target),
                        StructureMap::Generators(gens.clone()),
                        gens,
                        key,
                    );
                    Ok((v, Kernel::Subspace(z)))
                })
                .collect::<Result<_>>()?
        }
        SourceGroup::RestrictedSeq { .. } => {
            return Err(Error::Invalid(
                "the restricted sequence model has no kernel diagram; use the witness".into(),
            ))
        }
    };
    let pairs: Vec<(usize, usize)> = (0..nodes.len())
        .flat_map(|i| (0..nodes.len()).map(move |j| (i, j)))
        .filter(|&(i, j)| (identities || i != j) && nodes[i].1.is_contained_in(&nodes[j].1))
        .collect();
    let edges = par::map(&pairs, |&(i, j)| {
        let map = factor_through(&nodes[i].0, &nodes[j].0).expect("kernel inclusion factors");
        ApproxMorphism {
            from: i,
            to: j,
            map: map.into(),
        }
    });
    let nodes = nodes.into_iter().map(|(v, _)| v).collect();
    ApproxDiagram::new(src, bound, DiagramKind::Surjective, nodes, edges)
}

/// Every approximation into the catalog groups of order at most `bound`,
/// with every morphism between them.
pub fn all_approximations(
    source: &SourceGroup,
    bound: usize,
    catalog: &[Arc<FinGroup>],
    budget: &Budget,
) -> Result<ApproxDiagram> {
    if matches!(source, SourceGroup::RestrictedSeq { .. }) {
        return Err(Error::Invalid(
            "the restricted sequence model has no approximation diagram".into(),
        ));
    }
    let catalog: Vec<&Arc<FinGroup>> = catalog.iter().filter(|c| c.order() <= bound).collect();
    for c in &catalog {
        Budget::check(
            "target order",
            c.order() as u128,
            budget.table_order as u128,
        )?;
    }
    let src = Arc::new(source.clone());
    let mut nodes = Vec::new();
    let mut node_cat = Vec::new();
    for (ci, c) in catalog.iter().enumerate() {
        let phis: Vec<(StructureMap, Vec<usize>)> = match source {
            SourceGroup::Finite(g) => {
                let gens = g.generators();
                table_hom_maps(g, c, budget)?
                    .into_iter()
                    .map(|map| {
                        let images = gens.iter().map(|&x| map[x]).collect();
                        (StructureMap::Elements(map), images)
                    })
                    .collect()
            }
            _ => {
                let t = source.presentation().expect("presented");
                abelian_generator_images(&t, c, budget)?
                    .into_iter()
                    .map(|images| (StructureMap::Generators(images.clone()), images))
                    .collect()
            }
        };
        for (phi, images) in phis {
            let key = format!("{ci}:{}:{images:?}", c.name());
            nodes.push(Approximation::trusted(
                src.clone(),
                (*c).clone(),
                phi,
                images,
                key,
            ));
            node_cat.push(ci);
        }
    }
    let homs: Vec<Vec<Vec<Arc<[usize]>>>> = catalog
        .iter()
        .map(|a| {
            catalog
                .iter()
                .map(|b| {
                    Ok(table_hom_maps(a, b, budget)?
                        .into_iter()
                        .map(Arc::from)
                        .collect())
                })
                .collect::<Result<_>>()
        })
        .collect::<Result<_>>()?;
    let idx: Vec<usize> = (0..nodes.len()).collect();
    let edges = par::flat_map(&idx, |&i| {
        let v = &nodes[i];
        let mut out = Vec::new();
        for (j, w) in nodes.iter().enumerate() {
            for f in &homs[node_cat[i]][node_cat[j]] {
                if v.commutes(f, w) {
                    out.push(ApproxMorphism {
                        from: i,
                        to: j,
                        map: f.clone(),
                    });
                }
            }
        }
        out
    });
    Ok(ApproxDiagram {
        source: src,
        bound,
        kind: DiagramKind::Full,
        nodes,
        edges,
    })
}
