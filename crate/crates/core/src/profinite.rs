//! Truncated profinite completions and the comparison `Ψ : V̂ -> V**` for
//! `F_p`-vector spaces.
//!
//! For `V = F_p^dim` and a bound of at least `p^dim` the identity
//! approximation is a node of the diagram, so the truncated completion is
//! exact and the checks below are statements about `V̂` itself.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::Arc;

use serde::Serialize;
use serde_json::{json, Value};

use crate::approx::{
    all_approximations, surjective_approximations, ApproxDiagram, SourceElement, SourceGroup,
};
use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::fingroup::catalog::{default_catalog, elementary_catalog};
use crate::fingroup::{
    abelian_generator_images, decode, encode, enumerate_abelian_homs, find_isomorphism, FinAbGroup,
    FinGroup,
};
use crate::fplin::{
    all_forms, all_subspaces, all_vectors, annihilator, check_naturality, double_dual_injection,
    dual_quotient_iso, gaussian_binomial, quotient_space, vector_index, DoubleDualElement,
    DualVector, FpMatrix, PrimeField,
};
use crate::limit::{
    compare_full_vs_surjective, inverse_limit, profinite_projection, projection_kernel_image,
    Diagram, Edge, LimitGroup, ProjectionReport,
};
use crate::report::Report;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Surjective,
    Full,
}

/// A truncated completion with its diagram, limit and `π̂` data.
#[derive(Debug, Clone)]
pub struct CompletionResult {
    pub source: SourceGroup,
    pub bound: usize,
    pub mode: Mode,
    pub diagram: ApproxDiagram,
    pub limit: LimitGroup,
    pub projection: ProjectionReport,
}

impl CompletionResult {
    pub fn to_json(&self, with_elements: bool) -> Value {
        json!({
            "source": self.source,
            "bound": self.bound,
            "truncation": "target order <= bound",
            "mode": self.mode,
            "diagram": {
                "nodes": self.diagram.nodes().len(),
                "edges": self.diagram.edges().len(),
            },
            "limit": self.limit.to_json(with_elements),
            "projection": self.projection.to_json(),
        })
    }
}

/// The limit over the surjective approximations, or over every
/// approximation into `catalog`, with target order at most `bound`.
pub fn complete(
    source: &SourceGroup,
    bound: usize,
    mode: Mode,
    catalog: &[Arc<FinGroup>],
    budget: &Budget,
) -> Result<CompletionResult> {
    let diagram = match mode {
        Mode::Surjective => surjective_approximations(source, bound, budget)?,
        Mode::Full => all_approximations(source, bound, catalog, budget)?,
    };
    let limit = inverse_limit(&Diagram::from_approx(&diagram), budget)?;
    let projection = projection_kernel_image(&diagram, &limit, budget)?;
    Ok(CompletionResult {
        source: source.clone(),
        bound,
        mode,
        diagram,
        limit,
        projection,
    })
}

/// Targets used for `F_p`-space completions: `(F_p)^k` for
/// `k <= max(dim, 2)` and the default catalog, without repeated names.
pub fn fp_catalog(p: u64, dim: usize, bound: usize) -> Vec<Arc<FinGroup>> {
    let mut out = elementary_catalog(p, dim.max(2), bound);
    let mut names: HashSet<String> = out.iter().map(|g| g.name().to_string()).collect();
    for g in default_catalog(bound) {
        if names.insert(g.name().to_string()) {
            out.push(g);
        }
    }
    out
}

/// The truncated completion of `F_p^dim` over [`fp_catalog`], with the
/// node `v_f` of every linear form located.
#[derive(Debug, Clone)]
pub struct FpCompletion {
    field: PrimeField,
    dim: usize,
    diagram: ApproxDiagram,
    graph: Diagram,
    limit: LimitGroup,
    form_nodes: Vec<usize>,
    edge_index: HashMap<(usize, usize), Vec<usize>>,
}

impl FpCompletion {
    /// Needs `bound >= p^dim` (exact truncation) and `bound >= p` (a node
    /// for every form).
    pub fn new(p: u64, dim: usize, bound: usize, budget: &Budget) -> Result<Self> {
        let field = PrimeField::new(p)?;
        let size = (p as u128).checked_pow(dim as u32).unwrap_or(u128::MAX);
        if (bound as u128) < size.max(p as u128) {
            return Err(Error::Invalid(format!(
                "bound {bound} must be at least max(p^dim, p) = {}",
                size.max(p as u128)
            )));
        }
        let source = SourceGroup::fp_space(p, dim)?;
        let diagram = all_approximations(&source, bound, &fp_catalog(p, dim, bound), budget)?;
        let graph = Diagram::from_approx(&diagram);
        let limit = inverse_limit(&graph, budget)?;
        let mut by_form = HashMap::new();
        for (i, v) in diagram.nodes().iter().enumerate() {
            if v.target().abelian_coords() == Some(&[p][..]) {
                by_form.insert(v.generator_images().to_vec(), i);
            }
        }
        let form_nodes = all_forms(field, dim, budget)?
            .iter()
            .map(|f| {
                let key: Vec<usize> = f.coords().iter().map(|&x| x as usize).collect();
                by_form
                    .get(&key)
                    .copied()
                    .ok_or_else(|| Error::MissingNode(format!("form {:?}", f.coords())))
            })
            .collect::<Result<_>>()?;
        let mut edge_index: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for (i, e) in diagram.edges().iter().enumerate() {
            edge_index.entry((e.from, e.to)).or_default().push(i);
        }
        Ok(FpCompletion {
            field,
            dim,
            diagram,
            graph,
            limit,
            form_nodes,
            edge_index,
        })
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn diagram(&self) -> &ApproxDiagram {
        &self.diagram
    }

    pub fn limit(&self) -> &LimitGroup {
        &self.limit
    }

    pub fn is_compatible(&self, x: &[usize]) -> bool {
        self.graph.is_compatible(x)
    }

    /// The node `v_f = (F_p, f)`.
    pub fn form_node(&self, f: &DualVector) -> usize {
        self.form_nodes[vector_index(self.field.p(), f.coords())]
    }

    /// The node `w = (F_p^2, (f, g))`.
    pub fn pair_node(&self, f: &DualVector, g: &DualVector) -> Result<usize> {
        let p = self.field.p();
        let images: Vec<usize> = f
            .coords()
            .iter()
            .zip(g.coords())
            .map(|(&a, &b)| (a * p + b) as usize)
            .collect();
        self.diagram
            .nodes()
            .iter()
            .position(|v| {
                v.target().abelian_coords() == Some(&[p, p][..]) && v.generator_images() == images
            })
            .ok_or_else(|| Error::MissingNode(format!("pair ({:?}, {:?})", f.coords(), g.coords())))
    }

    fn has_edge(&self, from: usize, to: usize, map: &[usize]) -> bool {
        self.edge_index
            .get(&(from, to))
            .is_some_and(|es| es.iter().any(|&i| &*self.diagram.edges()[i].map == map))
    }

    /// `Ψ(x)(f) = x_{v_f}`, re-checked to be linear in `f`.
    pub fn psi(&self, x: &[usize]) -> Result<DoubleDualElement> {
        if x.len() != self.diagram.nodes().len() {
            return Err(Error::Dimension {
                expected: self.diagram.nodes().len(),
                found: x.len(),
            });
        }
        let theta: Vec<u64> = (0..self.dim)
            .map(|i| x[self.form_node(&DualVector::coordinate(self.field, self.dim, i))] as u64)
            .collect();
        let theta = DoubleDualElement::new(self.field, theta);
        for (idx, &v) in self.form_nodes.iter().enumerate() {
            let f = DualVector::new(
                self.field,
                crate::fplin::vector_at(self.field.p(), self.dim, idx),
            );
            if x[v] as u64 != theta.eval(&f) {
                return Err(Error::Mismatch(format!(
                    "family is not linear on the form {:?}",
                    f.coords()
                )));
            }
        }
        Ok(theta)
    }

    /// `x_v = (Θ(p_1 ∘ φ), ..., Θ(p_n ∘ φ))` on nodes with target
    /// `(F_p)^n`; other nodes are pushed forward from a surjective
    /// elementary node through the unique edge out of it.
    pub fn build_from_theta(&self, theta: &DoubleDualElement) -> Result<Vec<usize>> {
        if theta.dim() != self.dim || theta.field() != self.field {
            return Err(Error::Dimension {
                expected: self.dim,
                found: theta.dim(),
            });
        }
        let p = self.field.p();
        let nodes = self.diagram.nodes();
        let mut x = vec![usize::MAX; nodes.len()];
        for (i, v) in nodes.iter().enumerate() {
            let Some(coords) = v.target().abelian_coords() else {
                continue;
            };
            if coords.iter().any(|&c| c != p) {
                continue;
            }
            let columns: Vec<Vec<u64>> = v
                .generator_images()
                .iter()
                .map(|&y| decode(coords, y))
                .collect();
            let values: Vec<u64> = (0..coords.len())
                .map(|k| {
                    let form: Vec<u64> = columns.iter().map(|c| c[k]).collect();
                    theta.eval(&DualVector::new(self.field, form))
                })
                .collect();
            x[i] = encode(coords, &values);
        }
        for (j, w) in nodes.iter().enumerate() {
            if x[j] != usize::MAX {
                continue;
            }
            let from = self
                .diagram
                .edges()
                .iter()
                .find(|e| e.to == j && nodes[e.from].is_surjective() && x[e.from] != usize::MAX)
                .ok_or_else(|| Error::MissingNode(format!("image node for {}", w.key())))?;
            x[j] = from.map[x[from.from]];
        }
        if !self.graph.is_compatible(&x) {
            return Err(Error::Mismatch(
                "constructed family is not compatible".into(),
            ));
        }
        Ok(x)
    }

    /// `x_{v_{f+λg}} = x_{v_f} + λ x_{v_g}`, read through the pair node
    /// `w = (f, g)` and its three projection edges.
    pub fn check_fact(
        &self,
        x: &[usize],
        f: &DualVector,
        g: &DualVector,
        lambda: u64,
    ) -> Result<bool> {
        let p = self.field.p();
        let lambda = lambda % p;
        let h = f.plus_scaled(lambda, g);
        let (vf, vg, vh) = (self.form_node(f), self.form_node(g), self.form_node(&h));
        let w = self.pair_node(f, g)?;
        let q = p as usize;
        let l = lambda as usize;
        let first: Vec<usize> = (0..q * q).map(|y| y / q).collect();
        let second: Vec<usize> = (0..q * q).map(|y| y % q).collect();
        let combo: Vec<usize> = (0..q * q).map(|y| (y / q + l * (y % q)) % q).collect();
        for (to, map) in [(vf, &first), (vg, &second), (vh, &combo)] {
            if !self.has_edge(w, to, map) {
                return Err(Error::MissingNode(format!(
                    "projection edge {} -> {}",
                    self.diagram.nodes()[w].key(),
                    self.diagram.nodes()[to].key()
                )));
            }
        }
        Ok(x[vh] as u64
            == self
                .field
                .add(x[vf] as u64, self.field.mul(lambda, x[vg] as u64)))
    }
}

pub fn psi(c: &FpCompletion, x: &[usize]) -> Result<DoubleDualElement> {
    c.psi(x)
}

pub fn build_profinite_from_theta(
    c: &FpCompletion,
    theta: &DoubleDualElement,
) -> Result<Vec<usize>> {
    c.build_from_theta(theta)
}

pub fn check_fact_linearity(
    c: &FpCompletion,
    x: &[usize],
    f: &DualVector,
    g: &DualVector,
    lambda: u64,
) -> Result<bool> {
    c.check_fact(x, f, g, lambda)
}

fn instance(p: u64, dim: usize, bound: usize) -> String {
    format!("p={p}, dim={dim}, bound={bound}")
}

/// `Ψ` is a bijective homomorphism onto `V**` and `|V̂| = p^dim`. Also
/// checks that every group homomorphism `V -> F_p` is a linear form and
/// that `Ψ` and the construction from `Θ` are mutually inverse.
pub fn check_theorem_iso(p: u64, dim: usize, bound: usize, budget: &Budget) -> Result<Report> {
    let claim = "psi is an isomorphism from the completion onto the double dual";
    let c = FpCompletion::new(p, dim, bound, budget)?;
    let field = c.field;
    let expected = (p as usize).pow(dim as u32);
    let lim = c.limit();
    let psis: Vec<DoubleDualElement> = lim
        .elements()
        .iter()
        .map(|x| c.psi(x))
        .collect::<Result<_>>()?;
    let distinct: HashSet<&DoubleDualElement> = psis.iter().collect();
    let bijective = lim.order() == expected && distinct.len() == expected;
    let mut homomorphism = true;
    for (a, xa) in lim.elements().iter().enumerate() {
        for (b, xb) in lim.elements().iter().enumerate() {
            homomorphism &= c.psi(&lim.op(xa, xb))? == psis[a].add(&psis[b]);
        }
    }
    let v = FinAbGroup::from_invariant(vec![p; dim])?;
    let fp = Arc::new(FinAbGroup::cyclic(p).to_fin_group()?);
    let homs = enumerate_abelian_homs(&v, &fp, budget)?;
    let elems: Vec<Vec<u64>> = v.elements().collect();
    let linear = homs.iter().all(|h| {
        let images: Vec<u64> = (0..dim)
            .map(|i| {
                h.apply(v.index_of(DualVector::coordinate(field, dim, i).coords())) as u64
            })
            .collect();
        elems
            .iter()
            .enumerate()
            .all(|(k, x)| h.apply(k) as u64 == field.dot(x, &images))
    });
    let hom_count_ok = homs.len() == expected;
    let mut round_trip = true;
    for theta in DoubleDualElement::all(field, dim, budget)? {
        round_trip &= c.psi(&c.build_from_theta(&theta)?)? == theta;
    }
    for (x, t) in lim.elements().iter().zip(&psis) {
        round_trip &= &c.build_from_theta(t)? == x;
    }
    let ok = bijective && homomorphism && linear && hom_count_ok && round_trip;
    let data = json!({
        "completion_order": lim.order(),
        "double_dual_order": expected,
        "group_homs_to_fp": homs.len(),
        "dual_dimension_count": expected,
        "nodes": c.diagram.nodes().len(),
        "edges": c.diagram.edges().len(),
        "bijective": bijective,
        "homomorphism": homomorphism,
        "homs_are_linear": linear,
        "round_trip": round_trip,
    });
    Ok(Report::check(
        ok,
        claim,
        instance(p, dim, bound),
        data.clone(),
        data,
    ))
}

/// `Ψ(π̂(v)) = i(v)` for every vector `v`.
pub fn check_triangle(p: u64, dim: usize, bound: usize, budget: &Budget) -> Result<Report> {
    let claim = "psi composed with the profinite projection is the canonical injection";
    let c = FpCompletion::new(p, dim, bound, budget)?;
    let mut failures = Vec::new();
    let vectors = all_vectors(p, dim, budget)?;
    for v in &vectors {
        let g = SourceElement::Coords(v.iter().map(|&x| x as i64).collect());
        let x = profinite_projection(&c.diagram, &g)?;
        if c.psi(&x)? != double_dual_injection(c.field, v) {
            failures.push(v.clone());
        }
    }
    Ok(Report::check(
        failures.is_empty(),
        claim,
        instance(p, dim, bound),
        json!({"vectors": vectors.len(), "failures": 0}),
        json!({"vectors": vectors.len(), "failures": failures}),
    ))
}

/// Fact check over every family and every `(f, g, λ)`, plus a negative
/// control: a family with one form component changed must fail somewhere.
pub fn check_fact_suite(p: u64, dim: usize, bound: usize, budget: &Budget) -> Result<Report> {
    let claim = "x at f + lambda g equals x at f plus lambda times x at g";
    let c = FpCompletion::new(p, dim, bound, budget)?;
    let forms = all_forms(c.field, dim, budget)?;
    let (mut total, mut passed, mut trivial_total, mut trivial_passed) = (0, 0, 0, 0);
    for x in c.limit().elements() {
        for f in &forms {
            for g in &forms {
                for lambda in 0..p {
                    let ok = c.check_fact(x, f, g, lambda)?;
                    if lambda == 0 {
                        trivial_total += 1;
                        trivial_passed += ok as usize;
                    } else {
                        total += 1;
                        passed += ok as usize;
                    }
                }
            }
        }
    }
    let control = corrupted_family(&c);
    let mut control_failures = 0;
    if let Some(bad) = &control {
        for f in &forms {
            for g in &forms {
                for lambda in 1..p {
                    control_failures += !c.check_fact(bad, f, g, lambda)? as usize;
                }
            }
        }
    }
    let control_ok = control.is_none() || control_failures > 0;
    let data = json!({
        "families": c.limit().order(),
        "triples_per_family": forms.len() * forms.len() * (p as usize - 1),
        "checks": total,
        "passed": passed,
        "lambda_zero_checks": trivial_total,
        "lambda_zero_passed": trivial_passed,
        "negative_control_failures": control_failures,
        "negative_control_compatible": control.as_ref().map(|b| c.is_compatible(b)),
    });
    Ok(Report::check(
        passed == total && trivial_passed == trivial_total && control_ok,
        claim,
        instance(p, dim, bound),
        data.clone(),
        data,
    ))
}

/// The identity family with the component at `v_{e_0*}` set to 1. `None`
/// when `dim = 0`, where there is nothing to corrupt.
pub fn corrupted_family(c: &FpCompletion) -> Option<Vec<usize>> {
    if c.dim == 0 {
        return None;
    }
    let mut x = c.limit().identity();
    x[c.form_node(&DualVector::coordinate(c.field, c.dim, 0))] = 1;
    Some(x)
}

/// Surjections from `F_p^dim` onto one catalog group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ImageClass {
    pub target: String,
    pub homs: usize,
    pub surjections: usize,
    /// Isomorphism type of each image with its multiplicity.
    pub images: BTreeMap<String, usize>,
    pub all_elementary: bool,
}

/// Every homomorphism from `F_p^dim` into each catalog group, with the
/// check that every image is elementary abelian of exponent `p`.
pub fn classify_surjective_images(
    p: u64,
    dim: usize,
    catalog: &[Arc<FinGroup>],
    budget: &Budget,
) -> Result<(Vec<ImageClass>, Report)> {
    PrimeField::new(p)?;
    let mut out = Vec::new();
    for c in catalog {
        let tuples = abelian_generator_images(&vec![p; dim], c, budget)?;
        let mut images = BTreeMap::new();
        let mut surjections = 0;
        let mut all_elementary = true;
        for t in &tuples {
            let img = c.closure(t);
            let elementary = img.iter().all(|&a| p.is_multiple_of(c.element_order(a)))
                && img.iter().all(|&a| img.iter().all(|&b| c.commute(a, b)));
            all_elementary &= elementary;
            let name = if elementary {
                let mut k = 0;
                let mut n = img.len();
                while n > 1 {
                    n /= p as usize;
                    k += 1;
                }
                FinAbGroup::from_invariant_unchecked(vec![p; k]).name()
            } else {
                format!("non-elementary of order {}", img.len())
            };
            *images.entry(name).or_insert(0) += 1;
            if img.len() == c.order() {
                surjections += 1;
            }
        }
        out.push(ImageClass {
            target: c.name().to_string(),
            homs: tuples.len(),
            surjections,
            images,
            all_elementary,
        });
    }
    let ok = out.iter().all(|c| c.all_elementary)
        && out
            .iter()
            .zip(catalog)
            .all(|(c, g)| c.surjections == 0 || is_elementary(g, p));
    let report = Report::check(
        ok,
        "every image of an F_p-space in a finite group is elementary abelian",
        format!("p={p}, dim={dim}"),
        json!(out),
        json!(out),
    );
    Ok((out, report))
}

fn is_elementary(g: &FinGroup, p: u64) -> bool {
    g.is_abelian() && g.element_orders().iter().all(|&o| p.is_multiple_of(o))
}

/// Outcome of the subspace-diagram presentation of `V**`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Remark47 {
    pub subspaces: usize,
    pub counts_by_dim: Vec<usize>,
    pub perp_involution: bool,
    pub limit_order: usize,
    pub bijective: bool,
}

/// Builds the diagram of all quotients `V/Z` with their projections, takes
/// the limit, and maps `V**` into it through `Y* ≅ V/Y⊥` with `Y = Z⊥`.
pub fn remark47_limit(p: u64, dim: usize, budget: &Budget) -> Result<(Remark47, Report)> {
    let field = PrimeField::new(p)?;
    let subs = all_subspaces(p, dim, budget)?;
    let mut counts_by_dim = vec![0; dim + 1];
    for z in &subs {
        counts_by_dim[z.dim()] += 1;
    }
    let perp_involution = subs.iter().all(|z| annihilator(&annihilator(z)) == *z);
    let quotients = subs
        .iter()
        .map(|z| quotient_space(dim, z))
        .collect::<Result<Vec<_>>>()?;
    let tables = quotients
        .iter()
        .map(|q| {
            Ok(Arc::new(
                FinAbGroup::from_invariant_unchecked(vec![p; q.dim()]).to_fin_group()?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let labels = subs
        .iter()
        .map(|z| format!("V/{:?}", z.basis_rows()))
        .collect();
    let mut edges = Vec::new();
    for (i, zi) in subs.iter().enumerate() {
        for (j, zj) in subs.iter().enumerate() {
            if zi.is_subspace_of(zj) {
                let (qi, qj) = (&quotients[i], &quotients[j]);
                let factors = vec![p; qi.dim()];
                let target = vec![p; qj.dim()];
                let map: Vec<usize> = (0..tables[i].order())
                    .map(|y| encode(&target, &qj.project(&qi.lift(&decode(&factors, y)))))
                    .collect();
                edges.push(Edge {
                    from: i,
                    to: j,
                    map: map.into(),
                });
            }
        }
    }
    let graph = Diagram::new(tables, labels, edges)?;
    let limit = inverse_limit(&graph, budget)?;
    let isos = subs
        .iter()
        .map(|z| dual_quotient_iso(&annihilator(z)))
        .collect::<Result<Vec<_>>>()?;
    let mut images = HashSet::new();
    let mut all_in_limit = true;
    for theta in DoubleDualElement::all(field, dim, budget)? {
        let family: Vec<usize> = isos
            .iter()
            .map(|iso| {
                let y: &FpMatrix = iso.subspace().basis();
                let restricted: Vec<u64> = (0..y.rows())
                    .map(|i| field.dot(y.row(i), theta.coords()))
                    .collect();
                let q = iso.apply(&restricted);
                encode(&vec![p; q.len()], &q)
            })
            .collect();
        all_in_limit &= limit.contains(&family);
        images.insert(family);
    }
    let expected = (p as usize).pow(dim as u32);
    let bijective = all_in_limit && images.len() == expected && limit.order() == expected;
    let out = Remark47 {
        subspaces: subs.len(),
        counts_by_dim,
        perp_involution,
        limit_order: limit.order(),
        bijective,
    };
    let report = Report::check(
        perp_involution && bijective,
        "the double dual is the limit of the finite quotients V/Z",
        format!("p={p}, dim={dim}"),
        json!(out),
        json!(out),
    );
    Ok((out, report))
}

/// A finite source as a table group.
pub fn finite_table(source: &SourceGroup) -> Result<FinGroup> {
    match source {
        SourceGroup::Finite(g) => Ok((**g).clone()),
        SourceGroup::FgAbelian { rank: 0, torsion } => {
            FinAbGroup::from_invariant(torsion.clone())?.to_fin_group()
        }
        SourceGroup::FpSpace { p, dim } => {
            FinAbGroup::from_invariant_unchecked(vec![*p; *dim]).to_fin_group()
        }
        _ => Err(Error::Invalid(format!("{} is not finite", source.name()))),
    }
}

/// `G, Ĝ, Ĝ^[2], ...`: each stage completes the previous limit, with the
/// bound equal to the group order so the truncation is exact.
pub fn iterate_completion(
    source: &SourceGroup,
    depth: usize,
    budget: &Budget,
) -> Result<Vec<CompletionResult>> {
    if depth > 3 {
        return Err(Error::Budget {
            what: "completion depth",
            needed: depth as u128,
            limit: 3,
        });
    }
    let mut current = source.clone();
    let mut out = Vec::new();
    for k in 1..=depth {
        let n = current
            .order()
            .ok_or_else(|| Error::Invalid(format!("{} is not finite", current.name())))?
            as usize;
        let stage = complete(&current, n, Mode::Surjective, &[], budget)?;
        let name = format!("{}^[{k}]", source.name());
        current = SourceGroup::finite(stage.limit.to_fin_group(name, budget)?);
        out.push(stage);
    }
    Ok(out)
}

/// Every stage's `π̂` is bijective and every stage is isomorphic to the
/// source.
pub fn check_iterate(source: &SourceGroup, depth: usize, budget: &Budget) -> Result<Report> {
    let original = finite_table(source)?;
    let stages = iterate_completion(source, depth, budget)?;
    let mut rows = Vec::new();
    let mut ok = true;
    for (k, s) in stages.iter().enumerate() {
        let table = s.limit.to_fin_group("stage", budget)?;
        let iso = find_isomorphism(&original, &table, budget)?.is_some();
        let bij = s.projection.injective && s.projection.surjective;
        ok &= iso && bij;
        rows.push(json!({
            "stage": k + 1,
            "order": s.limit.order(),
            "projection_bijective": bij,
            "isomorphic_to_source": iso,
        }));
    }
    Ok(Report::check(
        ok,
        "every iterated profinite projection of a finite group is bijective",
        format!("source={}, depth={depth}", source.name()),
        json!(rows),
        json!(rows),
    ))
}

/// The restriction from the full catalog limit to the surjective nodes is
/// a bijection, and the kernel-indexed limit is isomorphic to it.
pub fn check_prop34(
    source: &SourceGroup,
    bound: usize,
    catalog: &[Arc<FinGroup>],
    budget: &Budget,
) -> Result<Report> {
    let r = compare_full_vs_surjective(source, bound, catalog, budget)?;
    let data = json!({
        "full_nodes": r.full_nodes,
        "surjective_nodes": r.surjective_nodes,
        "full_order": r.full.order(),
        "surjective_order": r.surjective.order(),
        "restriction_bijective": r.bijective,
        "skeleton_order": r.skeleton_order,
        "skeleton_isomorphic": r.skeleton_isomorphic,
    });
    Ok(Report::check(
        r.bijective && r.skeleton_isomorphic,
        "the limit over all approximations equals the limit over surjective ones",
        format!(
            "source={}, bound={bound}, catalog={}",
            source.name(),
            catalog.len()
        ),
        data.clone(),
        data,
    ))
}

/// `Y ↦ Y⊥` between subspaces of `V*` and of `V`: dimensions add up to
/// `dim`, it is an inclusion-reversing involution, every `V/Y⊥ -> Y*` is
/// invertible and the restrictions are natural.
pub fn check_perp(p: u64, dim: usize, budget: &Budget) -> Result<Report> {
    let subs = all_subspaces(p, dim, budget)?;
    let mut counts_by_dim = vec![0; dim + 1];
    let mut ok = true;
    let mut images = HashSet::new();
    for y in &subs {
        counts_by_dim[y.dim()] += 1;
        let perp = annihilator(y);
        ok &= perp.dim() + y.dim() == dim && annihilator(&perp) == *y;
        ok &= dual_quotient_iso(y)?.matrix().is_invertible();
        images.insert(perp.basis_rows());
    }
    let bijection = images.len() == subs.len();
    let mut pairs = 0;
    for a in &subs {
        for b2 in &subs {
            if a.is_subspace_of(b2) {
                pairs += 1;
                ok &= annihilator(b2).is_subspace_of(&annihilator(a));
                ok &= check_naturality(a, b2, budget)?;
            }
        }
    }
    let expected: Vec<u128> = (0..=dim).map(|k| gaussian_binomial(p, dim, k)).collect();
    let counts_ok = counts_by_dim
        .iter()
        .zip(&expected)
        .all(|(&c, &e)| c as u128 == e);
    let data = json!({
        "subspaces": subs.len(),
        "counts_by_dim": counts_by_dim,
        "gaussian_binomials": expected,
        "inclusion_pairs": pairs,
        "bijection": bijection,
    });
    Ok(Report::check(
        ok && bijection && counts_ok,
        "the annihilator is an inclusion-reversing bijection with dual quotients",
        format!("p={p}, dim={dim}"),
        data.clone(),
        data,
    ))
}

/// One level of the non-surjectivity witness.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessLevel {
    pub level: usize,
    pub ambient: usize,
    /// Coordinates nonzero in every preimage.
    pub forced: Vec<usize>,
    pub min_support: usize,
    /// A preimage of least support.
    pub preimage: Vec<u64>,
}

/// Values of the family on the coordinate forms `p_0, ..., p_level`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessFamily {
    pub p: u64,
    pub level: usize,
    pub values: Vec<u64>,
}

impl WitnessFamily {
    pub fn all_ones(p: u64, level: usize) -> Self {
        WitnessFamily {
            p,
            level,
            values: vec![1; level + 1],
        }
    }
}

fn consistent(field: PrimeField, rows: &[Vec<u64>], rhs: &[u64], cols: usize) -> bool {
    let a = FpMatrix::from_residue_rows(field, rows, cols);
    let aug: Vec<Vec<u64>> = rows
        .iter()
        .zip(rhs)
        .map(|(r, &b)| {
            let mut r = r.clone();
            r.push(b);
            r
        })
        .collect();
    a.rank() == FpMatrix::from_residue_rows(field, &aug, cols + 1).rank()
}

/// Preimages of the family among vectors supported on the first
/// `2(level + 1)` coordinates: the forced coordinates, and a particular
/// solution whose support is exactly the forced set, which pins the least
/// support.
pub fn witness_level(p: u64, level: usize) -> Result<WitnessLevel> {
    let field = PrimeField::new(p)?;
    let fam = WitnessFamily::all_ones(p, level);
    let n = 2 * (level + 1);
    let rows: Vec<Vec<u64>> = (0..=level)
        .map(|i| {
            let mut r = vec![0; n];
            r[i] = 1;
            r
        })
        .collect();
    if !consistent(field, &rows, &fam.values, n) {
        return Err(Error::Mismatch(
            "the family does not extend linearly".into(),
        ));
    }
    let forced: Vec<usize> = (0..n)
        .filter(|&j| {
            let mut r = rows.clone();
            let mut e = vec![0; n];
            e[j] = 1;
            r.push(e);
            let mut b = fam.values.clone();
            b.push(0);
            !consistent(field, &r, &b, n)
        })
        .collect();
    let aug: Vec<Vec<u64>> = rows
        .iter()
        .zip(&fam.values)
        .map(|(r, &b)| {
            let mut r = r.clone();
            r.push(b);
            r
        })
        .collect();
    let rr = FpMatrix::from_residue_rows(field, &aug, n + 1).rref();
    let mut preimage = vec![0; n];
    for (i, &pc) in rr.pivots.iter().enumerate() {
        preimage[pc] = rr.r.get(i, n);
    }
    let realizes = rows
        .iter()
        .zip(&fam.values)
        .all(|(r, &b)| field.dot(r, &preimage) == b);
    let support = preimage.iter().filter(|&&x| x != 0).count();
    if !realizes || support != forced.len() {
        return Err(Error::Mismatch("least-support certificate failed".into()));
    }
    Ok(WitnessLevel {
        level,
        ambient: n,
        forced,
        min_support: support,
        preimage,
    })
}

/// Levels `0..=level`: the least support of a preimage of the all-ones
/// family is `n + 1` at level `n`, so it grows without bound and no single
/// finitely supported vector realizes the family at every level.
pub fn nonsurjectivity_witness(p: u64, level: usize) -> Result<(Vec<WitnessLevel>, Report)> {
    let levels = (0..=level)
        .map(|n| witness_level(p, n))
        .collect::<Result<Vec<_>>>()?;
    let supports: Vec<usize> = levels.iter().map(|l| l.min_support).collect();
    let ok = levels.iter().all(|l| l.min_support == l.level + 1)
        && supports.windows(2).all(|w| w[0] < w[1]);
    let data = json!({
        "supports": supports,
        "scope": format!("verified at every level <= {level}; the infinite-dimensional statement is not computed"),
    });
    let report = Report::check(
        ok,
        "the least support of a preimage of the all-ones family grows with the level",
        format!("p={p}, levels 0..={level}"),
        data.clone(),
        data,
    );
    Ok((levels, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fingroup::catalog;

    fn b() -> Budget {
        Budget::default()
    }

    #[test]
    fn theorem_instances() {
        for (p, dim) in [(2, 0), (2, 1), (2, 2), (3, 1), (3, 2)] {
            let bound = (p as usize).pow(dim.max(2) as u32);
            let r = check_theorem_iso(p, dim, bound, &b()).unwrap();
            assert!(r.passed(), "{r:?}");
            assert_eq!(
                r.witness.as_ref().unwrap()["completion_order"],
                (p as usize).pow(dim as u32)
            );
        }
    }

    #[test]
    fn triangle_instances() {
        for (p, dim) in [(2, 0), (2, 2), (3, 1)] {
            let bound = (p as usize).pow(dim.max(2) as u32);
            assert!(check_triangle(p, dim, bound, &b()).unwrap().passed());
        }
    }

    #[test]
    fn psi_examples() {
        let c = FpCompletion::new(2, 2, 4, &b()).unwrap();
        let f = PrimeField::new(2).unwrap();
        let zero = profinite_projection(c.diagram(), &SourceElement::Coords(vec![0, 0])).unwrap();
        assert_eq!(psi(&c, &zero).unwrap(), DoubleDualElement::zero(f, 2));
        let x = profinite_projection(c.diagram(), &SourceElement::Coords(vec![1, 0])).unwrap();
        assert_eq!(psi(&c, &x).unwrap(), double_dual_injection(f, &[1, 0]));
        let c3 = FpCompletion::new(3, 1, 9, &b()).unwrap();
        let images: HashSet<_> = c3
            .limit()
            .elements()
            .iter()
            .map(|x| psi(&c3, x).unwrap())
            .collect();
        assert_eq!(images.len(), 3);
    }

    #[test]
    fn build_examples() {
        let c = FpCompletion::new(2, 2, 8, &b()).unwrap();
        let f = PrimeField::new(2).unwrap();
        let zero = build_profinite_from_theta(&c, &DoubleDualElement::zero(f, 2)).unwrap();
        assert_eq!(zero, c.limit().identity());
        for v in all_vectors(2, 2, &b()).unwrap() {
            let x = build_profinite_from_theta(&c, &double_dual_injection(f, &v)).unwrap();
            let g = SourceElement::Coords(v.iter().map(|&a| a as i64).collect());
            assert_eq!(x, profinite_projection(c.diagram(), &g).unwrap());
        }
        let built: HashSet<_> = DoubleDualElement::all(f, 2, &b())
            .unwrap()
            .iter()
            .map(|t| build_profinite_from_theta(&c, t).unwrap())
            .collect();
        assert_eq!(built.len(), 4);
        assert!(built.iter().all(|x| c.limit().contains(x)));
    }

    #[test]
    fn psi_rejects_non_linear_families() {
        let c = FpCompletion::new(2, 2, 4, &b()).unwrap();
        let bad = corrupted_family(&c).unwrap();
        assert!(!c.is_compatible(&bad));
        assert!(matches!(psi(&c, &bad), Err(Error::Mismatch(_))));
    }

    #[test]
    fn fact_suite() {
        let r = check_fact_suite(2, 2, 4, &b()).unwrap();
        assert!(r.passed(), "{r:?}");
        let w = r.witness.unwrap();
        assert_eq!(w["families"], 4);
        assert_eq!(w["triples_per_family"], 16);
        assert_eq!(w["checks"], 64);
        assert_eq!(w["passed"], 64);
        assert!(w["negative_control_failures"].as_u64().unwrap() > 0);
        assert!(check_fact_suite(3, 1, 9, &b()).unwrap().passed());
    }

    #[test]
    fn fact_examples() {
        let c = FpCompletion::new(2, 2, 4, &b()).unwrap();
        let f = PrimeField::new(2).unwrap();
        let zero = DualVector::new(f, vec![0, 0]);
        for x in c.limit().elements() {
            assert!(check_fact_linearity(&c, x, &zero, &zero, 1).unwrap());
        }
        let small = FpCompletion::new(2, 2, 2, &b());
        assert!(small.is_err());
        let no_pairs = FpCompletion::new(2, 1, 2, &b()).unwrap();
        let e = DualVector::new(f, vec![1]);
        let x = no_pairs.limit().identity();
        assert!(matches!(
            check_fact_linearity(&no_pairs, &x, &e, &e, 1),
            Err(Error::MissingNode(_))
        ));
    }

    #[test]
    fn classification() {
        let cat: Vec<Arc<FinGroup>> = vec![
            Arc::new(FinAbGroup::cyclic(4).to_fin_group().unwrap()),
            Arc::new(catalog::s3()),
            Arc::new(catalog::d4()),
            Arc::new(catalog::q8()),
            Arc::new(
                FinAbGroup::cyclic_product(&[2, 2])
                    .unwrap()
                    .to_fin_group()
                    .unwrap(),
            ),
        ];
        let (classes, report) = classify_surjective_images(2, 2, &cat, &b()).unwrap();
        assert!(report.passed());
        let surj: Vec<usize> = classes.iter().map(|c| c.surjections).collect();
        assert_eq!(surj, vec![0, 0, 0, 0, 6]);
        let (classes, report) =
            classify_surjective_images(3, 2, &default_catalog(8), &b()).unwrap();
        assert!(report.passed());
        assert!(classes.iter().all(|c| c.all_elementary));
    }

    #[test]
    fn remark47() {
        let (r, rep) = remark47_limit(2, 3, &b()).unwrap();
        assert!(rep.passed());
        assert_eq!(r.subspaces, 16);
        assert_eq!(r.counts_by_dim, vec![1, 7, 7, 1]);
        assert_eq!(r.limit_order, 8);
        let (r, _) = remark47_limit(2, 2, &b()).unwrap();
        assert_eq!((r.limit_order, r.bijective), (4, true));
        let (r, _) = remark47_limit(3, 0, &b()).unwrap();
        assert_eq!((r.limit_order, r.bijective), (1, true));
    }

    #[test]
    fn iterated_completions() {
        let r = check_iterate(&SourceGroup::cyclic(2), 3, &b()).unwrap();
        assert!(r.passed(), "{r:?}");
        let r = check_iterate(&SourceGroup::finite(catalog::s3()), 2, &b()).unwrap();
        assert!(r.passed(), "{r:?}");
        let stages = iterate_completion(&SourceGroup::trivial(), 3, &b()).unwrap();
        assert!(stages.iter().all(|s| s.limit.order() == 1));
        assert!(iterate_completion(&SourceGroup::cyclic(2), 4, &b()).is_err());
        assert!(iterate_completion(&SourceGroup::integers(), 1, &b()).is_err());
    }

    #[test]
    fn perp_and_prop34() {
        let r = check_perp(2, 3, &b()).unwrap();
        assert!(r.passed());
        assert_eq!(r.witness.unwrap()["counts_by_dim"], json!([1, 7, 7, 1]));
        assert!(check_perp(3, 2, &b()).unwrap().passed());
        let cat = default_catalog(8);
        assert!(check_prop34(&SourceGroup::cyclic(4), 8, &cat, &b())
            .unwrap()
            .passed());
    }

    #[test]
    fn witness_examples() {
        assert_eq!(witness_level(2, 0).unwrap().min_support, 1);
        let w = witness_level(2, 4).unwrap();
        assert_eq!(w.min_support, 5);
        assert_eq!(w.forced, vec![0, 1, 2, 3, 4]);
        assert_eq!(witness_level(3, 4).unwrap().preimage[..5], [1, 1, 1, 1, 1]);
        let (levels, r) = nonsurjectivity_witness(3, 2).unwrap();
        assert!(r.passed());
        let s: Vec<usize> = levels.iter().map(|l| l.min_support).collect();
        assert_eq!(s, vec![1, 2, 3]);
    }

    #[test]
    fn completion_json() {
        let r = complete(&SourceGroup::integers(), 10, Mode::Surjective, &[], &b()).unwrap();
        let v = r.to_json(false);
        assert_eq!(v["limit"]["invariant_factors"], json!([2520]));
        assert_eq!(v["projection"]["kernel"]["lattice"], json!([[2520]]));
        assert_eq!(v["truncation"], "target order <= bound");
    }
}
