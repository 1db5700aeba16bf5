use std::sync::Arc;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::fingroup::abelian::FinAbGroup;
use crate::fingroup::table::{generators_of, FinGroup};
use crate::par;

/// A subgroup as its sorted element list plus a greedy generating set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subgroup {
    pub elements: Vec<usize>,
    pub generators: Vec<usize>,
}

impl Subgroup {
    fn of(group: &FinGroup, elements: Vec<usize>) -> Self {
        let generators = generators_of(group, &elements);
        Subgroup {
            elements,
            generators,
        }
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }
}

/// Homomorphism between table groups stored as a full element map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Homomorphism {
    source: Arc<FinGroup>,
    target: Arc<FinGroup>,
    map: Vec<usize>,
}

/// Exhaustive check of `f(xy) = f(x) f(y)`.
pub fn is_homomorphism(source: &FinGroup, target: &FinGroup, map: &[usize]) -> bool {
    map.len() == source.order()
        && map.iter().all(|&y| y < target.order())
        && map[0] == 0
        && (0..source.order())
            .all(|a| (0..source.order()).all(|b| map[source.op(a, b)] == target.op(map[a], map[b])))
}

impl Homomorphism {
    pub fn new(source: Arc<FinGroup>, target: Arc<FinGroup>, map: Vec<usize>) -> Result<Self> {
        if !is_homomorphism(&source, &target, &map) {
            return Err(Error::Invalid(format!(
                "element map {} -> {} is not a homomorphism",
                source.name(),
                target.name()
            )));
        }
        Ok(Homomorphism {
            source,
            target,
            map,
        })
    }

    pub fn identity(group: Arc<FinGroup>) -> Self {
        let map = (0..group.order()).collect();
        Homomorphism {
            source: group.clone(),
            target: group,
            map,
        }
    }

    pub fn source(&self) -> &Arc<FinGroup> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FinGroup> {
        &self.target
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn apply(&self, a: usize) -> usize {
        self.map[a]
    }

    pub fn kernel(&self) -> Subgroup {
        let elements = (0..self.source.order())
            .filter(|&a| self.map[a] == 0)
            .collect();
        Subgroup::of(&self.source, elements)
    }

    pub fn image(&self) -> Subgroup {
        let mut seen = vec![false; self.target.order()];
        for &y in &self.map {
            seen[y] = true;
        }
        let elements = (0..seen.len()).filter(|&y| seen[y]).collect();
        Subgroup::of(&self.target, elements)
    }

    pub fn is_surjective(&self) -> bool {
        self.image().order() == self.target.order()
    }

    pub fn is_injective(&self) -> bool {
        self.kernel().order() == 1
    }

    /// `g ∘ self`.
    pub fn then(&self, g: &Homomorphism) -> Result<Homomorphism> {
        if *self.target != *g.source {
            return Err(Error::Mismatch(format!(
                "target {} is not source {}",
                self.target.name(),
                g.source.name()
            )));
        }
        Ok(Homomorphism {
            source: self.source.clone(),
            target: g.target.clone(),
            map: self.map.iter().map(|&x| g.map[x]).collect(),
        })
    }
}

/// `g ∘ f`.
pub fn compose(f: &Homomorphism, g: &Homomorphism) -> Result<Homomorphism> {
    f.then(g)
}

/// Extends generator images to an element map by walking the Cayley graph;
/// `None` when two paths disagree.
pub fn extend_from_generators(
    source: &FinGroup,
    gens: &[usize],
    images: &[usize],
    target: &FinGroup,
) -> Option<Vec<usize>> {
    let mut map = vec![usize::MAX; source.order()];
    map[0] = 0;
    let mut stack = vec![0];
    while let Some(a) = stack.pop() {
        for (&g, &y) in gens.iter().zip(images) {
            let b = source.op(a, g);
            let img = target.op(map[a], y);
            if map[b] == usize::MAX {
                map[b] = img;
                stack.push(b);
            } else if map[b] != img {
                return None;
            }
        }
    }
    if map.contains(&usize::MAX) {
        return None;
    }
    Some(map)
}

/// Generator-image tuples for the abelian presentation with the given
/// generator orders (`0` for a free generator): pairwise commuting images
/// whose orders divide the relation. Lexicographic in the images.
pub(crate) fn abelian_generator_images(
    torsion: &[u64],
    target: &FinGroup,
    budget: &Budget,
) -> Result<Vec<Vec<usize>>> {
    let candidates: Vec<Vec<usize>> = torsion
        .iter()
        .map(|&t| {
            (0..target.order())
                .filter(|&y| t == 0 || t % target.element_order(y) == 0)
                .collect()
        })
        .collect();
    let total = candidates
        .iter()
        .map(|c| c.len() as u128)
        .fold(1u128, |a, b| a.saturating_mul(b));
    Budget::check("homomorphism candidates", total, budget.hom_candidates)?;
    if torsion.is_empty() {
        return Ok(vec![Vec::new()]);
    }
    Ok(par::flat_map(&candidates[0], |&y0| {
        let mut out = Vec::new();
        let mut current = vec![y0];
        commuting_tuples(target, &candidates, &mut current, &mut out);
        out
    }))
}

fn commuting_tuples(
    target: &FinGroup,
    candidates: &[Vec<usize>],
    current: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    let j = current.len();
    if j == candidates.len() {
        out.push(current.clone());
        return;
    }
    for &y in &candidates[j] {
        if current.iter().all(|&x| target.commute(x, y)) {
            current.push(y);
            commuting_tuples(target, candidates, current, out);
            current.pop();
        }
    }
}

/// Element maps of all homomorphisms from a table group, lexicographic in
/// the images of `source.generators()`.
pub(crate) fn table_hom_maps(
    source: &FinGroup,
    target: &FinGroup,
    budget: &Budget,
) -> Result<Vec<Vec<usize>>> {
    let gens = source.generators();
    let candidates: Vec<Vec<usize>> = gens
        .iter()
        .map(|&g| {
            let o = source.element_order(g);
            (0..target.order())
                .filter(|&y| o.is_multiple_of(target.element_order(y)))
                .collect()
        })
        .collect();
    let total = candidates
        .iter()
        .map(|c| c.len() as u128)
        .fold(1u128, |a, b| a.saturating_mul(b));
    Budget::check("homomorphism candidates", total, budget.hom_candidates)?;
    if gens.is_empty() {
        return Ok(vec![vec![0]]);
    }
    Ok(par::flat_map(&candidates[0], |&y0| {
        let mut out = Vec::new();
        let mut images = vec![y0];
        table_tuples(source, &gens, target, &candidates, &mut images, &mut out);
        out
    }))
}

fn table_tuples(
    source: &FinGroup,
    gens: &[usize],
    target: &FinGroup,
    candidates: &[Vec<usize>],
    images: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if images.len() == gens.len() {
        if let Some(map) = extend_from_generators(source, gens, images, target) {
            if is_homomorphism(source, target, &map) {
                out.push(map);
            }
        }
        return;
    }
    for &y in &candidates[images.len()] {
        images.push(y);
        table_tuples(source, gens, target, candidates, images, out);
        images.pop();
    }
}

/// All homomorphisms between two table groups.
pub fn enumerate_homs(
    source: &Arc<FinGroup>,
    target: &Arc<FinGroup>,
    budget: &Budget,
) -> Result<Vec<Homomorphism>> {
    Budget::check(
        "target order",
        target.order() as u128,
        budget.table_order as u128,
    )?;
    Ok(table_hom_maps(source, target, budget)?
        .into_iter()
        .map(|map| Homomorphism {
            source: source.clone(),
            target: target.clone(),
            map,
        })
        .collect())
}

/// All homomorphisms from a finite abelian group into a table group,
/// lexicographic in the images of the invariant-factor generators.
pub fn enumerate_abelian_homs(
    source: &FinAbGroup,
    target: &Arc<FinGroup>,
    budget: &Budget,
) -> Result<Vec<Homomorphism>> {
    Budget::check(
        "target order",
        target.order() as u128,
        budget.table_order as u128,
    )?;
    let table = Arc::new(source.to_fin_group()?);
    let tuples = abelian_generator_images(source.factors(), target, budget)?;
    let elements: Vec<Vec<u64>> = source.elements().collect();
    Ok(tuples
        .into_iter()
        .map(|images| {
            let map = elements
                .iter()
                .map(|x| {
                    x.iter()
                        .zip(&images)
                        .fold(0, |acc, (&c, &y)| target.op(acc, target.pow(y, c as i64)))
                })
                .collect();
            Homomorphism {
                source: table.clone(),
                target: target.clone(),
                map,
            }
        })
        .collect())
}

/// A bijective homomorphism `a -> b`, if one exists.
///
/// Abelian pairs are decided by invariant factors; otherwise this is an
/// exhaustive search, so it is meant for small orders.
pub fn find_isomorphism(a: &FinGroup, b: &FinGroup, budget: &Budget) -> Result<Option<Vec<usize>>> {
    if a.order() != b.order() {
        return Ok(None);
    }
    let mut oa = a.element_orders().to_vec();
    let mut ob = b.element_orders().to_vec();
    oa.sort_unstable();
    ob.sort_unstable();
    if oa != ob || a.is_abelian() != b.is_abelian() {
        return Ok(None);
    }
    for map in table_hom_maps(a, b, budget)? {
        let mut seen = vec![false; b.order()];
        if map.iter().all(|&y| !std::mem::replace(&mut seen[y], true)) {
            return Ok(Some(map));
        }
    }
    Ok(None)
}
