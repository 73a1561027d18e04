//! Groupoid homology of a shift of finite type through the closed form
//! `H₀ = Coker(I − Mᵗ)`, `H₁ = Ker(I − Mᵗ)`, `Hₙ = 0` for `n ≥ 2`.
//!
//! Vertex `v` is the standard generator `e_v` of the ambient module. A
//! cylinder `Z(γ)` has class `e_{t(γ)}`; this relies on the relation
//! `e_v = Σ_w M(v,w) e_w`, which [`Homology::new`] checks against the
//! coordinate map before anything else is computed.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::abelian::{marked_iso_exists, AbElement, FinAbGroup, MarkedGroup};
use crate::error::{Error, Result};
use crate::linalg::{cokernel, kernel_basis, CoordinateMap, IntMatrix};
use crate::multigraph::{MultiGraph, VertexIdx};
use crate::shift::{ClopenSet, Path};

pub const REALIZE_BOUND_CAP: usize = 1 << 10;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HomologyClass {
    element: AbElement,
}

impl HomologyClass {
    pub fn element(&self) -> &AbElement {
        &self.element
    }
}

impl From<AbElement> for HomologyClass {
    fn from(element: AbElement) -> Self {
        HomologyClass { element }
    }
}

impl fmt::Display for HomologyClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.element.fmt(f)
    }
}

/// Homology data of one admissible graph.
#[derive(Debug, Clone)]
pub struct Homology {
    graph: Arc<MultiGraph>,
    id_minus_mt: IntMatrix,
    determinant: BigInt,
    h0: FinAbGroup,
    coords: CoordinateMap,
    h1_rank: usize,
}

impl Homology {
    pub fn new(g: &Arc<MultiGraph>) -> Result<Self> {
        g.check_admissible()?;
        let m = g.adjacency_matrix();
        let a = m.id_minus_transpose()?;
        let determinant = a.determinant()?;
        let (h0, coords) = cokernel(&a);
        let h1_rank = kernel_basis(&a).len();
        let hom = Homology {
            graph: Arc::clone(g),
            id_minus_mt: a,
            determinant,
            h0,
            coords,
            h1_rank,
        };
        hom.check_vertex_relation(&m)?;
        Ok(hom)
    }

    fn check_vertex_relation(&self, m: &IntMatrix) -> Result<()> {
        let n = m.rows();
        for v in 0..n {
            let mut x = vec![BigInt::zero(); n];
            x[v] += 1;
            for w in 0..n {
                x[w] -= m.get(v, w);
            }
            if !self.coords.apply(&x).is_zero() {
                return Err(Error::VerificationFailed(format!(
                    "vertex relation fails at {}",
                    self.graph.vertex(v)
                )));
            }
        }
        Ok(())
    }

    pub fn graph(&self) -> &Arc<MultiGraph> {
        &self.graph
    }

    /// `I − Mᵗ`.
    pub fn matrix(&self) -> &IntMatrix {
        &self.id_minus_mt
    }

    pub fn determinant(&self) -> &BigInt {
        &self.determinant
    }

    pub fn h0(&self) -> &FinAbGroup {
        &self.h0
    }

    pub fn h1(&self) -> FinAbGroup {
        FinAbGroup::free(self.h1_rank)
    }

    pub fn group(&self, degree: usize) -> FinAbGroup {
        match degree {
            0 => self.h0.clone(),
            1 => self.h1(),
            _ => FinAbGroup::trivial(),
        }
    }

    pub fn coordinates(&self) -> &CoordinateMap {
        &self.coords
    }

    pub fn vertex_class(&self, v: VertexIdx) -> HomologyClass {
        self.coords.basis_image(v).into()
    }

    /// Vertex multiplicities `c` to class `Σ c_w e_w`.
    pub fn class_of_multiplicities(&self, c: &[BigInt]) -> HomologyClass {
        self.coords.apply(c).into()
    }

    pub fn class_of(&self, y: &ClopenSet) -> Result<HomologyClass> {
        if **y.graph() != *self.graph {
            return Err(Error::RestrictionMismatch);
        }
        let mut c = vec![BigInt::zero(); self.graph.vertex_count()];
        for p in y.paths() {
            c[p.terminus(&self.graph)] += 1;
        }
        Ok(self.class_of_multiplicities(&c))
    }

    /// `(H₀ ⊗ ℤ/2) ⊕ H₁`.
    pub fn abelianization(&self) -> FinAbGroup {
        let two = BigInt::from(2);
        let mut factors: Vec<BigInt> = self
            .h0
            .torsion()
            .iter()
            .map(|d| d.gcd(&two))
            .filter(|d| !d.is_one())
            .collect();
        factors.extend(std::iter::repeat_n(two, self.h0.free_rank()));
        factors.extend(std::iter::repeat_n(BigInt::zero(), self.h1_rank));
        FinAbGroup::from_cyclic_factors(&factors)
    }

    /// A nonempty clopen set with class `h`.
    pub fn realize(&self, h: &HomologyClass) -> Result<ClopenSet> {
        if !self.h0.contains(&h.element) {
            return Err(Error::GroupMismatch(format!("{h} is not in H0 = {}", self.h0)));
        }
        let c = self.multiplicities_for(&h.element)?;
        self.allocate(&c)
    }

    /// Breadth-first search by total multiplicity for `c ≥ 0`, `c ≠ 0`, `Σ c_w e_w = h`.
    fn multiplicities_for(&self, h: &AbElement) -> Result<Vec<usize>> {
        let n = self.graph.vertex_count();
        let gens: Vec<AbElement> = (0..n).map(|v| self.coords.basis_image(v)).collect();
        let torsion_sum: BigInt = self.h0.torsion().iter().sum();
        let mut bound = usize::try_from(torsion_sum)
            .unwrap_or(REALIZE_BOUND_CAP)
            .saturating_add(4)
            .min(REALIZE_BOUND_CAP);
        // element -> (parent, vertex added)
        let mut parent: HashMap<AbElement, (Option<AbElement>, VertexIdx)> = HashMap::new();
        let mut frontier: Vec<AbElement> = Vec::new();
        for (v, g) in gens.iter().enumerate() {
            if !parent.contains_key(g) {
                parent.insert(g.clone(), (None, v));
                frontier.push(g.clone());
            }
        }
        let mut level = 1;
        loop {
            if parent.contains_key(h) {
                break;
            }
            if level >= bound {
                if bound >= REALIZE_BOUND_CAP {
                    return Err(Error::SearchExhausted { bound });
                }
                bound = (bound * 2).min(REALIZE_BOUND_CAP);
            }
            let mut next = Vec::new();
            for x in &frontier {
                for (v, g) in gens.iter().enumerate() {
                    let y = self.h0.add(x, g)?;
                    if !parent.contains_key(&y) {
                        parent.insert(y.clone(), (Some(x.clone()), v));
                        next.push(y);
                    }
                }
            }
            if next.is_empty() {
                return Err(Error::SearchExhausted { bound: level });
            }
            frontier = next;
            level += 1;
        }
        let mut c = vec![0usize; n];
        let mut cur = h.clone();
        loop {
            let (prev, v) = parent[&cur].clone();
            c[v] += 1;
            match prev {
                Some(p) => cur = p,
                None => break,
            }
        }
        Ok(c)
    }

    /// Pairwise incomparable cylinders with prescribed termini multiplicities.
    fn allocate(&self, c: &[usize]) -> Result<ClopenSet> {
        let g = &*self.graph;
        let total: usize = c.iter().sum();
        let mut pool: Vec<Path> = (0..g.vertex_count()).map(Path::vertex).collect();
        while pool.len() < total {
            pool.sort();
            let shallow = pool.remove(0);
            pool.extend(shallow.children(g));
        }
        pool.sort();
        let mut chosen = Vec::with_capacity(total);
        for (w, &count) in c.iter().enumerate() {
            for _ in 0..count {
                if let Some(pos) = pool.iter().position(|p| p.terminus(g) == w) {
                    chosen.push(pool.remove(pos));
                    continue;
                }
                let start = pool.remove(0);
                let route = shortest_route(g, start.terminus(g), w).ok_or_else(|| {
                    Error::Inadmissible(format!("{} is unreachable", g.vertex(w)))
                })?;
                let mut cur = start;
                for e in route {
                    for &d in g.out_edges(cur.terminus(g)) {
                        if d != e {
                            pool.push(cur.child(g, d));
                        }
                    }
                    cur = cur.child(g, e);
                }
                pool.sort();
                chosen.push(cur);
            }
        }
        ClopenSet::new(&self.graph, chosen)
    }
}

/// Shortest positive-length edge route from `from` to `to`.
fn shortest_route(g: &MultiGraph, from: VertexIdx, to: VertexIdx) -> Option<Vec<usize>> {
    let mut prev: Vec<Option<usize>> = vec![None; g.vertex_count()];
    let mut seen = vec![false; g.vertex_count()];
    let mut queue = VecDeque::new();
    for &e in g.out_edges(from) {
        let t = g.terminus(e);
        if !seen[t] {
            seen[t] = true;
            prev[t] = Some(e);
            queue.push_back(t);
        }
    }
    while let Some(v) = queue.pop_front() {
        if v == to {
            let mut route = Vec::new();
            let mut cur = to;
            loop {
                let e = prev[cur].expect("reached vertex has a predecessor edge");
                route.push(e);
                cur = g.origin(e);
                if cur == from {
                    break;
                }
            }
            route.reverse();
            return Some(route);
        }
        for &e in g.out_edges(v) {
            let t = g.terminus(e);
            if !seen[t] {
                seen[t] = true;
                prev[t] = Some(e);
                queue.push_back(t);
            }
        }
    }
    None
}

pub fn homology_group(g: &Arc<MultiGraph>, degree: usize) -> Result<FinAbGroup> {
    Ok(Homology::new(g)?.group(degree))
}

pub fn class_of_clopen(y: &ClopenSet) -> Result<HomologyClass> {
    Homology::new(y.graph())?.class_of(y)
}

pub fn realize_class(g: &Arc<MultiGraph>, h: &HomologyClass) -> Result<ClopenSet> {
    Homology::new(g)?.realize(h)
}

pub fn abelianization(g: &Arc<MultiGraph>) -> Result<FinAbGroup> {
    Ok(Homology::new(g)?.abelianization())
}

#[derive(Debug, Clone)]
pub struct MatsumotoReport {
    pub det1: BigInt,
    pub det2: BigInt,
    pub h0_1: FinAbGroup,
    pub h0_2: FinAbGroup,
    pub class1: HomologyClass,
    pub class2: HomologyClass,
    pub dets_equal: bool,
    pub marked_iso: bool,
}

impl MatsumotoReport {
    pub fn met(&self) -> bool {
        self.dets_equal && self.marked_iso
    }
}

/// Equal signed determinants and a marked isomorphism `[1_{Y1}] ↦ [1_{Y2}]`.
pub fn matsumoto_report(y1: &ClopenSet, y2: &ClopenSet, cap: u64) -> Result<MatsumotoReport> {
    let hom1 = Homology::new(y1.graph())?;
    let hom2 = Homology::new(y2.graph())?;
    for h in [&hom1, &hom2] {
        if !h.h0().is_finite() {
            return Err(Error::UnsupportedInfinite {
                free_rank: h.h0().free_rank(),
            });
        }
    }
    let class1 = hom1.class_of(y1)?;
    let class2 = hom2.class_of(y2)?;
    let dets_equal = hom1.determinant() == hom2.determinant();
    let marked_iso = dets_equal
        && marked_iso_exists(
            &MarkedGroup {
                group: hom1.h0().clone(),
                marked: class1.element().clone(),
            },
            &MarkedGroup {
                group: hom2.h0().clone(),
                marked: class2.element().clone(),
            },
            cap,
        )?;
    Ok(MatsumotoReport {
        det1: hom1.determinant().clone(),
        det2: hom2.determinant().clone(),
        h0_1: hom1.h0().clone(),
        h0_2: hom2.h0().clone(),
        class1,
        class2,
        dets_equal,
        marked_iso,
    })
}

pub fn matsumoto_equivalent(y1: &ClopenSet, y2: &ClopenSet, cap: u64) -> Result<bool> {
    Ok(matsumoto_report(y1, y2, cap)?.met())
}
