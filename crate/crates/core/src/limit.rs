//! Inverse limits of finite diagrams of finite groups.
//!
//! A limit is materialized as its compatible families: one element per
//! node such that every edge carries the component at its tail to the
//! component at its head. Families are sorted lexicographically in node
//! order.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use serde_json::{json, Value};

use crate::approx::{
    all_approximations, surjective_approximations, ApproxDiagram, SourceElement, SourceGroup,
};
use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::fingroup::{
    find_isomorphism, invariant_factors_from_orders, is_homomorphism, FinGroup, Lattice,
};
use crate::par;

/// `map : nodes[from] -> nodes[to]` as an element map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub map: Arc<[usize]>,
}

/// A bare diagram of table groups.
#[derive(Debug, Clone)]
pub struct Diagram {
    nodes: Vec<Arc<FinGroup>>,
    labels: Vec<String>,
    edges: Vec<Edge>,
}

impl Diagram {
    /// Checks that every edge is a homomorphism between its endpoints.
    pub fn new(nodes: Vec<Arc<FinGroup>>, labels: Vec<String>, edges: Vec<Edge>) -> Result<Self> {
        if labels.len() != nodes.len() {
            return Err(Error::Dimension {
                expected: nodes.len(),
                found: labels.len(),
            });
        }
        for e in &edges {
            let (Some(a), Some(b)) = (nodes.get(e.from), nodes.get(e.to)) else {
                return Err(Error::Invalid("edge endpoint out of range".into()));
            };
            if !is_homomorphism(a, b, &e.map) {
                return Err(Error::Invalid(format!(
                    "edge {} -> {} is not a homomorphism",
                    e.from, e.to
                )));
            }
        }
        Ok(Diagram {
            nodes,
            labels,
            edges,
        })
    }

    /// The underlying diagram of groups; edges were checked when the
    /// approximation diagram was built.
    pub fn from_approx(d: &ApproxDiagram) -> Self {
        Diagram {
            nodes: d.nodes().iter().map(|v| v.target().clone()).collect(),
            labels: d.nodes().iter().map(|v| v.key().to_string()).collect(),
            edges: d
                .edges()
                .iter()
                .map(|e| Edge {
                    from: e.from,
                    to: e.to,
                    map: e.map.clone(),
                })
                .collect(),
        }
    }

    pub fn nodes(&self) -> &[Arc<FinGroup>] {
        &self.nodes
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Product of the node orders.
    pub fn product_order(&self) -> u128 {
        self.nodes
            .iter()
            .fold(1u128, |acc, g| acc.saturating_mul(g.order() as u128))
    }

    pub fn is_compatible(&self, family: &[usize]) -> bool {
        family.len() == self.nodes.len()
            && family.iter().zip(&self.nodes).all(|(&x, g)| x < g.order())
            && self
                .edges
                .iter()
                .all(|e| e.map[family[e.from]] == family[e.to])
    }
}

/// The materialized limit with componentwise operations.
#[derive(Debug, Clone)]
pub struct LimitGroup {
    nodes: Vec<Arc<FinGroup>>,
    labels: Vec<String>,
    elements: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, usize>,
    invariant_factors: Option<Vec<u64>>,
}

impl LimitGroup {
    fn from_families(d: &Diagram, mut elements: Vec<Vec<usize>>) -> Self {
        elements.sort_unstable();
        let index = elements
            .iter()
            .enumerate()
            .map(|(i, x)| (x.clone(), i))
            .collect();
        let mut lim = LimitGroup {
            nodes: d.nodes.clone(),
            labels: d.labels.clone(),
            elements,
            index,
            invariant_factors: None,
        };
        if lim.nodes.iter().all(|g| g.is_abelian()) {
            let orders: Vec<u64> = lim.elements.iter().map(|x| lim.element_order(x)).collect();
            lim.invariant_factors = Some(invariant_factors_from_orders(orders));
        }
        lim
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Vec<usize>] {
        &self.elements
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn nodes(&self) -> &[Arc<FinGroup>] {
        &self.nodes
    }

    /// Invariant factors, present when every node group is abelian.
    pub fn invariant_factors(&self) -> Option<&[u64]> {
        self.invariant_factors.as_deref()
    }

    pub fn index_of(&self, family: &[usize]) -> Option<usize> {
        self.index.get(family).copied()
    }

    pub fn contains(&self, family: &[usize]) -> bool {
        self.index.contains_key(family)
    }

    pub fn identity(&self) -> Vec<usize> {
        vec![0; self.nodes.len()]
    }

    pub fn op(&self, a: &[usize], b: &[usize]) -> Vec<usize> {
        self.nodes
            .iter()
            .enumerate()
            .map(|(i, g)| g.op(a[i], b[i]))
            .collect()
    }

    pub fn inv(&self, a: &[usize]) -> Vec<usize> {
        self.nodes
            .iter()
            .enumerate()
            .map(|(i, g)| g.inv(a[i]))
            .collect()
    }

    pub fn element_order(&self, a: &[usize]) -> u64 {
        self.nodes.iter().enumerate().fold(1, |acc, (i, g)| {
            num_integer::lcm(acc, g.element_order(a[i]))
        })
    }

    /// Components at the given nodes, in that order.
    pub fn restrict(&self, keep: &[usize]) -> Vec<Vec<usize>> {
        self.elements
            .iter()
            .map(|x| keep.iter().map(|&v| x[v]).collect())
            .collect()
    }

    /// Multiplication table on element indices.
    pub fn to_fin_group(&self, name: impl Into<String>, budget: &Budget) -> Result<FinGroup> {
        let n = self.order();
        Budget::check(
            "limit as a table group",
            n as u128,
            budget.table_order as u128,
        )?;
        let rows = self
            .elements
            .iter()
            .map(|a| {
                self.elements
                    .iter()
                    .map(|b| self.index[&self.op(a, b)])
                    .collect()
            })
            .collect();
        FinGroup::from_table_with_bound(name, rows, budget.table_order)
    }

    /// `{"nodes", "order", "invariant_factors"?, "elements"?}`.
    pub fn to_json(&self, with_elements: bool) -> Value {
        let mut v = json!({
            "nodes": self.labels,
            "order": self.order(),
        });
        if let Some(f) = &self.invariant_factors {
            v["invariant_factors"] = json!(f);
        }
        if with_elements {
            v["elements"] = json!(self.elements);
        }
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Solver {
    /// Scan the whole product of the node groups.
    BruteForce,
    /// Backtracking over a few free nodes, propagating along edges.
    FiberProduct,
}

pub fn inverse_limit(d: &Diagram, budget: &Budget) -> Result<LimitGroup> {
    inverse_limit_with(d, Solver::FiberProduct, budget)
}

pub fn inverse_limit_with(d: &Diagram, solver: Solver, budget: &Budget) -> Result<LimitGroup> {
    let families = match solver {
        Solver::BruteForce => brute_force(d, budget)?,
        Solver::FiberProduct => fiber_product(d, budget)?,
    };
    Budget::check(
        "limit elements",
        families.len() as u128,
        budget.limit_elements as u128,
    )?;
    Ok(LimitGroup::from_families(d, families))
}

fn brute_force(d: &Diagram, budget: &Budget) -> Result<Vec<Vec<usize>>> {
    let total = d.product_order();
    Budget::check("brute-force product", total, budget.brute_force_product)?;
    let radix: Vec<usize> = d.nodes.iter().map(|g| g.order()).collect();
    Ok(par::filter_map_range(total as usize, |mut i| {
        let mut x = vec![0; radix.len()];
        for k in (0..radix.len()).rev() {
            x[k] = i % radix[k];
            i /= radix[k];
        }
        d.edges
            .iter()
            .all(|e| e.map[x[e.from]] == x[e.to])
            .then_some(x)
    }))
}

/// Nodes chosen freely by the fiber-product search: greedily the node
/// whose forward closure covers the most uncovered nodes, ties going to
/// the larger group and then the lower index. On a kernel poset with a
/// top node this is that single node.
pub fn free_nodes(d: &Diagram) -> Vec<usize> {
    let n = d.nodes.len();
    let mut out_adj = vec![Vec::new(); n];
    for e in &d.edges {
        out_adj[e.from].push(e.to);
    }
    let reach: Vec<Vec<bool>> = (0..n)
        .map(|v| {
            let mut seen = vec![false; n];
            seen[v] = true;
            let mut stack = vec![v];
            while let Some(u) = stack.pop() {
                for &w in &out_adj[u] {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
            seen
        })
        .collect();
    let mut covered = vec![false; n];
    let mut free = Vec::new();
    loop {
        let best = (0..n)
            .filter(|&v| !covered[v])
            .map(|v| {
                let gain = (0..n).filter(|&w| reach[v][w] && !covered[w]).count();
                (gain, d.nodes[v].order(), std::cmp::Reverse(v))
            })
            .max();
        let Some((_, _, std::cmp::Reverse(v))) = best else {
            break;
        };
        free.push(v);
        for w in 0..n {
            covered[w] |= reach[v][w];
        }
    }
    free
}

struct Search<'a> {
    d: &'a Diagram,
    out_edges: Vec<Vec<usize>>,
    in_edges: Vec<Vec<usize>>,
    free: Vec<usize>,
    cap: usize,
}

const UNSET: usize = usize::MAX;

impl Search<'_> {
    fn set(&self, w: usize, y: usize, assign: &mut [usize], trail: &mut Vec<usize>) -> bool {
        if assign[w] == UNSET {
            assign[w] = y;
            trail.push(w);
            true
        } else {
            assign[w] == y
        }
    }

    fn propagate(&self, v: usize, x: usize, assign: &mut [usize], trail: &mut Vec<usize>) -> bool {
        let start = trail.len();
        if !self.set(v, x, assign, trail) {
            return false;
        }
        let mut next = start;
        while next < trail.len() {
            let u = trail[next];
            next += 1;
            for &ei in &self.out_edges[u] {
                let e = &self.d.edges[ei];
                if !self.set(e.to, e.map[assign[u]], assign, trail) {
                    return false;
                }
            }
            for &ei in &self.in_edges[u] {
                let e = &self.d.edges[ei];
                if assign[e.from] != UNSET && e.map[assign[e.from]] != assign[u] {
                    return false;
                }
            }
        }
        true
    }

    fn run(
        &self,
        k: usize,
        assign: &mut [usize],
        trail: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if out.len() > self.cap {
            return;
        }
        if k == self.free.len() {
            out.push(assign.to_vec());
            return;
        }
        let v = self.free[k];
        for x in 0..self.d.nodes[v].order() {
            let mark = trail.len();
            if self.propagate(v, x, assign, trail) {
                self.run(k + 1, assign, trail, out);
            }
            for &w in &trail[mark..] {
                assign[w] = UNSET;
            }
            trail.truncate(mark);
        }
    }
}

fn fiber_product(d: &Diagram, budget: &Budget) -> Result<Vec<Vec<usize>>> {
    let n = d.nodes.len();
    let mut out_edges = vec![Vec::new(); n];
    let mut in_edges = vec![Vec::new(); n];
    for (i, e) in d.edges.iter().enumerate() {
        out_edges[e.from].push(i);
        in_edges[e.to].push(i);
    }
    let search = Search {
        d,
        out_edges,
        in_edges,
        free: free_nodes(d),
        cap: budget.limit_elements,
    };
    if search.free.is_empty() {
        return Ok(vec![Vec::new()]);
    }
    let first = search.free[0];
    let values: Vec<usize> = (0..d.nodes[first].order()).collect();
    let families = par::flat_map(&values, |&x| {
        let mut assign = vec![UNSET; n];
        let mut trail = Vec::new();
        let mut out = Vec::new();
        if search.propagate(first, x, &mut assign, &mut trail) {
            search.run(1, &mut assign, &mut trail, &mut out);
        }
        out
    });
    Budget::check(
        "limit elements",
        families.len() as u128,
        budget.limit_elements as u128,
    )?;
    Ok(families)
}

/// `π̂(g) = (φ_v(g))_v`, checked to be compatible.
pub fn profinite_projection(d: &ApproxDiagram, g: &SourceElement) -> Result<Vec<usize>> {
    let family = d
        .nodes()
        .iter()
        .map(|v| v.apply(g))
        .collect::<Result<Vec<_>>>()?;
    if !Diagram::from_approx(d).is_compatible(&family) {
        return Err(Error::Mismatch(
            "projection is not a compatible family".into(),
        ));
    }
    Ok(family)
}

/// Kernel of `π̂` as a subgroup of the source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProjectionKernel {
    /// Element indices of a table source.
    Elements(Vec<usize>),
    /// HNF basis of the kernel lattice in the standard coordinates of a
    /// presented source.
    Lattice(Vec<Vec<i64>>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectionReport {
    pub kernel: ProjectionKernel,
    pub image_order: usize,
    pub limit_order: usize,
    pub injective: bool,
    pub surjective: bool,
}

impl ProjectionReport {
    pub fn to_json(&self) -> Value {
        let kernel = match &self.kernel {
            ProjectionKernel::Elements(e) => json!({"elements": e}),
            ProjectionKernel::Lattice(b) => json!({"lattice": b}),
        };
        json!({
            "kernel": kernel,
            "image_order": self.image_order,
            "limit_order": self.limit_order,
            "injective": self.injective,
            "surjective": self.surjective,
        })
    }
}

/// Kernel and image of `π̂` against a computed limit.
///
/// For a presented source the image is explored from the generator
/// families and the kernel lattice is generated by the relations found
/// on the way (Schreier generators), so infinite sources are handled
/// exactly.
pub fn projection_kernel_image(
    d: &ApproxDiagram,
    limit: &LimitGroup,
    budget: &Budget,
) -> Result<ProjectionReport> {
    let source = d.source();
    match &**source {
        SourceGroup::Finite(g) => {
            let mut kernel = Vec::new();
            let mut image = HashSet::new();
            for x in 0..g.order() {
                let fam = profinite_projection(d, &SourceElement::Index(x))?;
                if fam.iter().all(|&c| c == 0) {
                    kernel.push(x);
                }
                image.insert(fam);
            }
            Ok(ProjectionReport {
                injective: kernel.len() == 1,
                surjective: image.len() == limit.order(),
                kernel: ProjectionKernel::Elements(kernel),
                image_order: image.len(),
                limit_order: limit.order(),
            })
        }
        _ => {
            let t = source.presentation().expect("presented");
            let m = t.len();
            let gens: Vec<Vec<usize>> = source
                .generators()
                .iter()
                .map(|g| profinite_projection(d, g))
                .collect::<Result<_>>()?;
            let mut reps: HashMap<Vec<usize>, Vec<i64>> = HashMap::new();
            let mut order = vec![limit.identity()];
            reps.insert(limit.identity(), vec![0; m]);
            let mut relations = Vec::new();
            let mut next = 0;
            while next < order.len() {
                let a = order[next].clone();
                next += 1;
                for (j, gj) in gens.iter().enumerate() {
                    let b = limit.op(&a, gj);
                    let mut word = reps[&a].clone();
                    word[j] += 1;
                    match reps.get(&b) {
                        Some(rb) => relations.push(
                            word.iter()
                                .zip(rb)
                                .map(|(x, y)| x - y)
                                .collect::<Vec<i64>>(),
                        ),
                        None => {
                            Budget::check(
                                "projection image",
                                order.len() as u128 + 1,
                                budget.limit_elements as u128,
                            )?;
                            reps.insert(b.clone(), word);
                            order.push(b);
                        }
                    }
                }
            }
            let n = order.len();
            let mut lat = Lattice::scaled_identity(m, n as u64);
            for r in &relations {
                lat.insert(r);
            }
            let source_order = source.order();
            Ok(ProjectionReport {
                injective: source_order == Some(n as u128),
                surjective: n == limit.order(),
                kernel: ProjectionKernel::Lattice(lat.basis_i64()),
                image_order: n,
                limit_order: limit.order(),
            })
        }
    }
}

/// Outcome of comparing the limit over all approximations with the limit
/// over the surjective ones.
#[derive(Debug, Clone)]
pub struct FullVsSurjective {
    pub full: LimitGroup,
    pub surjective: LimitGroup,
    pub full_nodes: usize,
    pub surjective_nodes: usize,
    /// `map[i]` is the index in `surjective` of the restriction of the
    /// `i`-th full family.
    pub map: Vec<usize>,
    pub bijective: bool,
    /// Order of the limit over the kernel-indexed diagram and whether it is
    /// isomorphic to the surjective limit.
    pub skeleton_order: usize,
    pub skeleton_isomorphic: bool,
}

/// Restricts families of the full diagram to its surjective nodes and
/// checks that this natural map is a bijection onto the limit of the full
/// subdiagram of surjective nodes.
pub fn compare_full_vs_surjective(
    source: &SourceGroup,
    bound: usize,
    catalog: &[Arc<FinGroup>],
    budget: &Budget,
) -> Result<FullVsSurjective> {
    let full_d = all_approximations(source, bound, catalog, budget)?;
    let keep: Vec<usize> = (0..full_d.nodes().len())
        .filter(|&v| full_d.nodes()[v].is_surjective())
        .collect();
    let surj_d = full_d.restrict_to(&keep)?;
    let full = inverse_limit(&Diagram::from_approx(&full_d), budget)?;
    let surjective = inverse_limit(&Diagram::from_approx(&surj_d), budget)?;
    let mut map = Vec::with_capacity(full.order());
    let mut hit = vec![false; surjective.order()];
    let mut bijective = true;
    for r in full.restrict(&keep) {
        match surjective.index_of(&r) {
            Some(j) => {
                bijective &= !std::mem::replace(&mut hit[j], true);
                map.push(j);
            }
            None => {
                bijective = false;
                map.push(usize::MAX);
            }
        }
    }
    bijective &= hit.iter().all(|&h| h);
    let skeleton = inverse_limit(
        &Diagram::from_approx(&surjective_approximations(source, bound, budget)?),
        budget,
    )?;
    let skeleton_isomorphic = skeleton.order() == surjective.order()
        && match (skeleton.invariant_factors(), surjective.invariant_factors()) {
            (Some(a), Some(b)) => a == b,
            _ => find_isomorphism(
                &skeleton.to_fin_group("skeleton", budget)?,
                &surjective.to_fin_group("surjective", budget)?,
                budget,
            )?
            .is_some(),
        };
    Ok(FullVsSurjective {
        full_nodes: full_d.nodes().len(),
        surjective_nodes: keep.len(),
        full,
        surjective,
        map,
        bijective,
        skeleton_order: skeleton.order(),
        skeleton_isomorphic,
    })
}
