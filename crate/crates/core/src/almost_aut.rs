//! Colour-preserving almost automorphisms of the unfolding tree.
//!
//! An element is a finite set of pairs `δ ↦ ρ` of finite paths with equal
//! termini: it maps the cylinder `Z(δ)` onto `Z(ρ)` by replacing the prefix
//! and carrying the suffix verbatim. Domain and range paths are complete
//! antichains below the restriction `Y`.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::multigraph::{strip_comment, MultiGraph, VertexIdx};
use crate::perm::Perm;
use crate::shift::{is_complete_antichain, member, BoundaryPoint, ClopenSet, Path, PathIndex};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrefixExchange {
    restriction: ClopenSet,
    pairs: Vec<(Path, Path)>,
}

/// Triples `(range, |domain| − |range|, domain)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BisectionTable {
    pub triples: Vec<(Path, i64, Path)>,
}

/// Local permutations of out-edges, indexed by position in `out_edges(t(u))`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LocalPermMap {
    perms: BTreeMap<Path, Perm>,
}

impl LocalPermMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Identity permutations are dropped.
    pub fn insert(&mut self, node: Path, perm: Perm) {
        if perm.is_identity() {
            self.perms.remove(&node);
        } else {
            self.perms.insert(node, perm);
        }
    }

    pub fn get(&self, node: &Path) -> Option<&Perm> {
        self.perms.get(node)
    }

    pub fn support(&self) -> impl Iterator<Item = &Path> {
        self.perms.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Path, &Perm)> {
        self.perms.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.perms.is_empty()
    }

    pub fn display<'a>(&'a self, g: &'a MultiGraph) -> impl fmt::Display + 'a {
        LocalPermDisplay { map: self, graph: g }
    }
}

struct LocalPermDisplay<'a> {
    map: &'a LocalPermMap,
    graph: &'a MultiGraph,
}

impl fmt::Display for LocalPermDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (u, p) in &self.map.perms {
            let v = u.terminus(self.graph);
            writeln!(f, "{}: {}", u.display(self.graph), edge_cycles(self.graph, v, p))?;
        }
        Ok(())
    }
}

/// Cycle notation over edge ids for a permutation of the out-edges of `v`.
pub fn edge_cycles(g: &MultiGraph, v: VertexIdx, p: &Perm) -> String {
    let outs = g.out_edges(v);
    let cycles = p.cycles();
    if cycles.is_empty() {
        return "()".into();
    }
    cycles
        .iter()
        .map(|c| {
            let names: Vec<&str> = c.iter().map(|&i| g.edge(outs[i]).id.as_str()).collect();
            format!("({})", names.join(" "))
        })
        .collect()
}

impl PrefixExchange {
    /// Validates and sorts by domain; the representation is kept as given.
    pub fn new(restriction: &ClopenSet, pairs: Vec<(Path, Path)>) -> Result<Self> {
        let problems = violations(restriction, &pairs);
        if !problems.is_empty() {
            return Err(Error::InvalidElement(problems));
        }
        let mut pairs = pairs;
        pairs.sort();
        Ok(PrefixExchange {
            restriction: restriction.clone(),
            pairs,
        })
    }

    pub fn identity(restriction: &ClopenSet) -> Self {
        PrefixExchange {
            restriction: restriction.clone(),
            pairs: restriction.paths().iter().map(|p| (p.clone(), p.clone())).collect(),
        }
    }

    /// Parses pairs given as `(domain, range)` path literals.
    pub fn from_literals(restriction: &ClopenSet, pairs: &[(&str, &str)]) -> Result<Self> {
        let g = restriction.graph();
        let pairs = pairs
            .iter()
            .map(|(d, r)| Ok((Path::parse(g, d)?, Path::parse(g, r)?)))
            .collect::<Result<Vec<_>>>()?;
        PrefixExchange::new(restriction, pairs)
    }

    pub fn graph(&self) -> &Arc<MultiGraph> {
        self.restriction.graph()
    }

    pub fn restriction(&self) -> &ClopenSet {
        &self.restriction
    }

    pub fn pairs(&self) -> &[(Path, Path)] {
        &self.pairs
    }

    pub fn max_depth(&self) -> usize {
        self.pairs
            .iter()
            .map(|(d, r)| d.len().max(r.len()))
            .max()
            .unwrap_or(0)
    }

    pub fn validate(&self) -> Result<()> {
        let problems = violations(&self.restriction, &self.pairs);
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidElement(problems))
        }
    }

    /// Simple expansion at a domain path.
    pub fn expand_at(&self, domain_leaf: &Path) -> Result<Self> {
        let g = self.graph();
        let pos = self
            .pairs
            .iter()
            .position(|(d, _)| d == domain_leaf)
            .ok_or_else(|| {
                Error::InvalidElement(vec![format!(
                    "{} is not a domain path",
                    domain_leaf.display(g)
                )])
            })?;
        let (d, r) = self.pairs[pos].clone();
        let mut pairs = self.pairs.clone();
        pairs.remove(pos);
        for &e in g.out_edges(d.terminus(g)) {
            pairs.push((d.child(g, e), r.child(g, e)));
        }
        pairs.sort();
        Ok(PrefixExchange {
            restriction: self.restriction.clone(),
            pairs,
        })
    }

    /// The minimal representative.
    pub fn canonicalize(&self) -> Self {
        let g = self.graph();
        let y = &self.restriction;
        let mut map: BTreeMap<Path, Path> = self.pairs.iter().cloned().collect();
        loop {
            let mut doms: Vec<&Path> = map.keys().filter(|d| !d.is_empty()).collect();
            doms.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.edges().cmp(b.edges())));
            let mut found = None;
            let mut tried: HashSet<Path> = HashSet::new();
            for d in doms {
                let delta = d.parent().expect("nonempty path has a parent");
                if !tried.insert(delta.clone()) || !y.is_below(&delta) {
                    continue;
                }
                if let Some(rho) = contractible(g, &map, &delta) {
                    if y.is_below(&rho) {
                        found = Some((delta, rho));
                        break;
                    }
                }
            }
            let Some((delta, rho)) = found else { break };
            for c in delta.children(g) {
                map.remove(&c);
            }
            map.insert(delta, rho);
        }
        PrefixExchange {
            restriction: self.restriction.clone(),
            pairs: map.into_iter().collect(),
        }
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.restriction == other.restriction {
            Ok(())
        } else {
            Err(Error::RestrictionMismatch)
        }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let g = self.graph();
        let idx = PathIndex::new(self.pairs.iter().map(|(d, _)| d));
        let ranges: HashMap<&Path, &Path> = self.pairs.iter().map(|(d, r)| (d, r)).collect();
        let mut out = Vec::new();
        fn chase(
            g: &MultiGraph,
            idx: &PathIndex,
            ranges: &HashMap<&Path, &Path>,
            dom: Path,
            mid: Path,
            out: &mut Vec<(Path, Path)>,
        ) {
            if let Some(df) = idx.prefix_of(&mid) {
                let rf = ranges[&df];
                out.push((dom, rf.extend(&mid.edges()[df.len()..])));
                return;
            }
            for &e in g.out_edges(mid.terminus(g)) {
                chase(g, idx, ranges, dom.child(g, e), mid.child(g, e), out);
            }
        }
        for (dg, rg) in &other.pairs {
            chase(g, &idx, &ranges, dg.clone(), rg.clone(), &mut out);
        }
        out.sort();
        Ok(PrefixExchange {
            restriction: self.restriction.clone(),
            pairs: out,
        }
        .canonicalize())
    }

    pub fn invert(&self) -> Self {
        let mut pairs: Vec<(Path, Path)> =
            self.pairs.iter().map(|(d, r)| (r.clone(), d.clone())).collect();
        pairs.sort();
        PrefixExchange {
            restriction: self.restriction.clone(),
            pairs,
        }
        .canonicalize()
    }

    pub fn equals(&self, other: &Self) -> Result<bool> {
        self.check_compatible(other)?;
        Ok(self.canonicalize().pairs == other.canonicalize().pairs)
    }

    pub fn is_identity(&self) -> bool {
        self.canonicalize().pairs == PrefixExchange::identity(&self.restriction).pairs
    }

    fn pair_for(&self, p: &BoundaryPoint) -> Result<&(Path, Path)> {
        if !member(p, &self.restriction) {
            return Err(Error::PointOutside);
        }
        let unrolled = p.prefix(self.max_depth());
        self.pairs
            .iter()
            .find(|(d, _)| d.is_prefix_of(&unrolled))
            .ok_or(Error::PointOutside)
    }

    pub fn apply(&self, p: &BoundaryPoint) -> Result<BoundaryPoint> {
        let g = self.graph();
        let (d, r) = self.pair_for(p)?;
        Ok(p.drop_prefix(g, d.len()).prepend(g, r))
    }

    /// `|δ| − |ρ|` for the pair acting at `p`.
    pub fn cocycle_at(&self, p: &BoundaryPoint) -> Result<i64> {
        let (d, r) = self.pair_for(p)?;
        Ok(d.len() as i64 - r.len() as i64)
    }

    pub fn to_bisection(&self) -> BisectionTable {
        BisectionTable {
            triples: self
                .pairs
                .iter()
                .map(|(d, r)| (r.clone(), d.len() as i64 - r.len() as i64, d.clone()))
                .collect(),
        }
    }

    pub fn from_bisection(restriction: &ClopenSet, table: &BisectionTable) -> Result<Self> {
        let mut problems = Vec::new();
        for (r, c, d) in &table.triples {
            if *c != d.len() as i64 - r.len() as i64 {
                problems.push(format!(
                    "cocycle {c} differs from |domain| - |range| for {} -> {}",
                    d.display(restriction.graph()),
                    r.display(restriction.graph())
                ));
            }
        }
        if !problems.is_empty() {
            return Err(Error::InvalidElement(problems));
        }
        let pairs = table
            .triples
            .iter()
            .map(|(r, _, d)| (d.clone(), r.clone()))
            .collect();
        PrefixExchange::new(restriction, pairs)
    }

    /// The image of the cylinder `Z(u)` as an antichain; `u` must lie below `Y`.
    pub fn image_of_cylinder(&self, u: &Path) -> Result<Vec<Path>> {
        let g = self.graph();
        if !self.restriction.is_below(u) {
            return Err(Error::Undefined(format!(
                "{} is not below the restriction",
                u.display(g)
            )));
        }
        if let Some((d, r)) = self.pairs.iter().find(|(d, _)| d.is_prefix_of(u)) {
            return Ok(vec![r.extend(&u.edges()[d.len()..])]);
        }
        let mut out: Vec<Path> = self
            .pairs
            .iter()
            .filter(|(d, _)| u.is_prefix_of(d))
            .map(|(_, r)| r.clone())
            .collect();
        out.sort();
        Ok(out)
    }

    /// The node whose cylinder is exactly the image of `Z(u)`, if there is one.
    pub fn image_node(&self, u: &Path) -> Result<Option<Path>> {
        let g = self.graph();
        let images = self.image_of_cylinder(u)?;
        let Some(first) = images.first() else {
            return Ok(None);
        };
        if images.len() == 1 {
            return Ok(Some(first.clone()));
        }
        if images.iter().any(|p| p.origin() != first.origin()) {
            return Ok(None);
        }
        let mut k = 0;
        while images.iter().all(|p| p.len() > k && p.edges()[k] == first.edges()[k]) {
            k += 1;
        }
        let w = first.prefix(k);
        let within = ClopenSet::new(g, vec![w.clone()])?;
        Ok(is_complete_antichain(g, &images, &within)?.then_some(w))
    }

    /// The permutation `d ↦ d′` of out-edges of `t(v)` where `v·d` is carried onto `v′·d′`.
    pub fn child_action(&self, v: &Path) -> Result<Perm> {
        let g = self.graph();
        let undefined = || Error::Undefined(format!("no child action at {}", v.display(g)));
        let image = self.image_node(v)?.ok_or_else(undefined)?;
        let t = v.terminus(g);
        if image.terminus(g) != t {
            return Err(undefined());
        }
        let outs = g.out_edges(t);
        let mut images = Vec::with_capacity(outs.len());
        for &e in outs {
            let c = self.image_node(&v.child(g, e))?.ok_or_else(undefined)?;
            if c.parent().as_ref() != Some(&image) || !image.is_prefix_of(&c) {
                return Err(undefined());
            }
            let last = *c.edges().last().expect("child image is nonempty");
            images.push(outs.iter().position(|&d| d == last).ok_or_else(undefined)?);
        }
        Perm::from_images(images).map_err(|_| undefined())
    }

    /// The local-permutation description when the element preserves levels.
    pub fn is_automorphism(&self) -> Option<LocalPermMap> {
        let c = self.canonicalize();
        let g = c.graph();
        let y = &c.restriction;
        let mut forward: HashMap<Path, Path> = HashMap::new();
        let mut backward: HashMap<Path, Path> = HashMap::new();
        let mut interior: Vec<Path> = Vec::new();
        for (d, r) in &c.pairs {
            if d.len() != r.len() {
                return None;
            }
            let (yd, yr) = (y.leaf_above(d)?, y.leaf_above(r)?);
            if yd.len() != yr.len() {
                return None;
            }
            for k in yd.len()..=d.len() {
                let (u, w) = (d.prefix(k), r.prefix(k));
                if u.terminus(g) != w.terminus(g) {
                    return None;
                }
                if forward.get(&u).is_some_and(|x| *x != w) || backward.get(&w).is_some_and(|x| *x != u) {
                    return None;
                }
                if k < d.len() && !forward.contains_key(&u) {
                    interior.push(u.clone());
                }
                forward.insert(u.clone(), w.clone());
                backward.insert(w, u);
            }
        }
        let mut map = LocalPermMap::new();
        for u in interior {
            let image = &forward[&u];
            let outs = g.out_edges(u.terminus(g));
            let mut images = Vec::with_capacity(outs.len());
            for &e in outs {
                let ci = forward.get(&u.child(g, e))?;
                let last = *ci.edges().last()?;
                if ci.parent().as_ref() != Some(image) {
                    return None;
                }
                images.push(outs.iter().position(|&d| d == last)?);
            }
            map.insert(u, Perm::from_images(images).ok()?);
        }
        Some(map)
    }

    /// The automorphism with the given local permutations (identity elsewhere).
    pub fn from_local_perms(restriction: &ClopenSet, perms: &LocalPermMap) -> Result<Self> {
        let g = restriction.graph();
        for (u, p) in perms.iter() {
            if !restriction.is_below(u) {
                return Err(Error::InvalidElement(vec![format!(
                    "{} is not below the restriction",
                    u.display(g)
                )]));
            }
            let outs = g.out_edges(u.terminus(g));
            if p.degree() != outs.len() {
                return Err(Error::InvalidElement(vec![format!(
                    "permutation at {} has degree {}, expected {}",
                    u.display(g),
                    p.degree(),
                    outs.len()
                )]));
            }
            if (0..outs.len()).any(|i| g.terminus(outs[i]) != g.terminus(outs[p.image(i)])) {
                return Err(Error::InvalidElement(vec![format!(
                    "permutation at {} does not preserve termini",
                    u.display(g)
                )]));
            }
        }
        let depth = perms.support().map(|u| u.len() + 1).max().unwrap_or(0);
        let mut domain = Vec::new();
        for y in restriction.paths() {
            let mut layer = vec![y.clone()];
            while layer.first().is_some_and(|p| p.len() < depth) {
                layer = layer.iter().flat_map(|p| p.children(g)).collect();
            }
            domain.extend(layer);
        }
        let pairs = domain
            .into_iter()
            .map(|d| {
                let y = restriction.leaf_above(&d).expect("domain extends the restriction");
                let mut u = y.clone();
                let mut w = y.clone();
                for &e in &d.edges()[y.len()..] {
                    let outs = g.out_edges(u.terminus(g));
                    let i = outs.iter().position(|&x| x == e).expect("edge leaves u");
                    let j = perms.get(&u).map_or(i, |p| p.image(i));
                    w = w.child(g, outs[j]);
                    u = u.child(g, e);
                }
                (d, w)
            })
            .collect();
        Ok(PrefixExchange::new(restriction, pairs)?.canonicalize())
    }

    /// Whether every cylinder of `t` is mapped onto itself.
    pub fn fixes_pointwise(&self, t: &ClopenSet) -> Result<bool> {
        let g = self.graph();
        if !is_complete_antichain(g, t.paths(), &self.restriction)? {
            return Err(Error::InvalidClopen(
                "not a complete antichain within the restriction".into(),
            ));
        }
        for leaf in t.paths() {
            let image = ClopenSet::new(g, self.image_of_cylinder(leaf)?)?;
            let target = ClopenSet::new(g, vec![leaf.clone()])?;
            if !image.same_set(&target)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Seeded sample: random complete antichains of relative depth at most
    /// `depth`, matched by a random label-preserving bijection.
    pub fn random(restriction: &ClopenSet, depth: usize, seed: u64) -> Self {
        let g = restriction.graph();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut dom = random_antichain(g, restriction, depth, &mut rng);
        let mut ran = random_antichain(g, restriction, depth, &mut rng);
        if !equalize_labels(g, restriction, &mut dom, &mut ran, depth + 2, &mut rng) {
            ran = dom.clone();
        }
        let mut by_label: Vec<Vec<Path>> = vec![Vec::new(); g.vertex_count()];
        for r in ran {
            by_label[r.terminus(g)].push(r);
        }
        for bucket in &mut by_label {
            bucket.sort();
            bucket.shuffle(&mut rng);
        }
        dom.sort();
        let pairs = dom
            .into_iter()
            .map(|d| {
                let r = by_label[d.terminus(g)].pop().expect("label counts agree");
                (d, r)
            })
            .collect();
        PrefixExchange::new(restriction, pairs)
            .expect("sampled element is valid")
            .canonicalize()
    }

    /// Canonical form in the element text format.
    pub fn to_text(&self, restrict_name: Option<&str>) -> String {
        let c = self.canonicalize();
        let g = c.graph();
        let mut s = format!("element over {}", g.name());
        if let Some(name) = restrict_name {
            s.push_str(&format!(" restrict {name}"));
        }
        s.push('\n');
        for (d, r) in &c.pairs {
            s.push_str(&format!("pair {} -> {}\n", d.display(g), r.display(g)));
        }
        s
    }

    /// Parses the element text format. Without a `restrict` clause the restriction is the full space.
    pub fn parse(text: &str, g: &Arc<MultiGraph>, clopens: &HashMap<String, ClopenSet>) -> Result<Self> {
        let mut header: Option<ClopenSet> = None;
        let mut pairs = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = strip_comment(raw).trim();
            if line.is_empty() {
                continue;
            }
            let words: Vec<&str> = line.split_whitespace().collect();
            match words.first().copied() {
                Some("element") if header.is_none() => {
                    let restriction = match words.as_slice() {
                        ["element", "over", name] => {
                            check_graph_name(g, name, line_no)?;
                            ClopenSet::full(g)
                        }
                        ["element", "over", name, "restrict", y] => {
                            check_graph_name(g, name, line_no)?;
                            clopens
                                .get(*y)
                                .cloned()
                                .ok_or_else(|| Error::parse(line_no, format!("unknown clopen {y:?}")))?
                        }
                        _ => return Err(Error::parse(line_no, "expected `element over <graph> [restrict <clopen>]`")),
                    };
                    header = Some(restriction);
                }
                Some("pair") if header.is_some() => {
                    let body = line["pair".len()..].trim();
                    let (d, r) = body
                        .split_once("->")
                        .ok_or_else(|| Error::parse(line_no, "expected `pair <path> -> <path>`"))?;
                    let d = Path::parse(g, d).map_err(|e| Error::parse(line_no, e.to_string()))?;
                    let r = Path::parse(g, r).map_err(|e| Error::parse(line_no, e.to_string()))?;
                    pairs.push((d, r));
                }
                _ => return Err(Error::parse(line_no, format!("unexpected line {line:?}"))),
            }
        }
        let restriction = header.ok_or_else(|| Error::parse(1, "missing `element` header"))?;
        PrefixExchange::new(&restriction, pairs)
    }
}

fn check_graph_name(g: &MultiGraph, name: &str, line: usize) -> Result<()> {
    if g.name() == name {
        Ok(())
    } else {
        Err(Error::parse(
            line,
            format!("element is over {name:?} but the loaded graph is {:?}", g.name()),
        ))
    }
}

fn violations(restriction: &ClopenSet, pairs: &[(Path, Path)]) -> Vec<String> {
    let g = restriction.graph();
    let mut problems = Vec::new();
    for (d, r) in pairs {
        for p in [d, r] {
            if let Err(e) = p.validate(g) {
                problems.push(e.to_string());
            }
        }
    }
    if !problems.is_empty() {
        return problems;
    }
    let doms: Vec<Path> = pairs.iter().map(|(d, _)| d.clone()).collect();
    let rans: Vec<Path> = pairs.iter().map(|(_, r)| r.clone()).collect();
    for (what, paths) in [("domain", &doms), ("range", &rans)] {
        match is_complete_antichain(g, paths, restriction) {
            Ok(true) => {}
            Ok(false) => problems.push(format!("incomplete {what} antichain")),
            Err(e) => problems.push(e.to_string()),
        }
    }
    for (d, r) in pairs {
        if d.terminus(g) != r.terminus(g) {
            problems.push(format!(
                "label mismatch: {} ends at {}, {} ends at {}",
                d.display(g),
                g.vertex(d.terminus(g)),
                r.display(g),
                g.vertex(r.terminus(g))
            ));
        }
    }
    problems
}

/// The range parent `δ′` if every child pair of `δ` has the form `(δ·d, δ′·d)`.
fn contractible(g: &MultiGraph, map: &BTreeMap<Path, Path>, delta: &Path) -> Option<Path> {
    let mut rho: Option<Path> = None;
    for &e in g.out_edges(delta.terminus(g)) {
        let r = map.get(&delta.child(g, e))?;
        if r.edges().last() != Some(&e) {
            return None;
        }
        let parent = r.parent()?;
        match &rho {
            None => rho = Some(parent),
            Some(p) if *p == parent => {}
            Some(_) => return None,
        }
    }
    rho
}

fn random_antichain(g: &MultiGraph, y: &ClopenSet, depth: usize, rng: &mut ChaCha8Rng) -> Vec<Path> {
    let mut out = Vec::new();
    for root in y.paths() {
        let mut stack = vec![root.clone()];
        while let Some(p) = stack.pop() {
            if p.len() - root.len() < depth && rng.gen_bool(0.5) {
                stack.extend(p.children(g));
            } else {
                out.push(p);
            }
        }
    }
    out
}

fn label_counts(g: &MultiGraph, paths: &[Path]) -> Vec<i64> {
    let mut c = vec![0i64; g.vertex_count()];
    for p in paths {
        c[p.terminus(g)] += 1;
    }
    c
}

/// Expands leaves of either antichain until both have the same terminus counts.
fn equalize_labels(
    g: &MultiGraph,
    y: &ClopenSet,
    dom: &mut Vec<Path>,
    ran: &mut Vec<Path>,
    max_depth: usize,
    rng: &mut ChaCha8Rng,
) -> bool {
    let rel = |p: &Path| p.len() - y.leaf_above(p).map_or(0, Path::len);
    let distance = |a: &[i64], b: &[i64]| a.iter().zip(b).map(|(x, z)| (x - z).abs()).sum::<i64>();
    for _ in 0..64 {
        let (cd, cr) = (label_counts(g, dom), label_counts(g, ran));
        let current = distance(&cd, &cr);
        if current == 0 {
            return true;
        }
        // candidate moves: (side, index, new distance)
        let mut best: Option<(bool, usize, i64)> = None;
        for (side, paths) in [(false, &*dom), (true, &*ran)] {
            for (i, p) in paths.iter().enumerate() {
                if rel(p) >= max_depth {
                    continue;
                }
                let (mut a, mut b) = (cd.clone(), cr.clone());
                let target = if side { &mut b } else { &mut a };
                target[p.terminus(g)] -= 1;
                for &e in g.out_edges(p.terminus(g)) {
                    target[g.terminus(e)] += 1;
                }
                let dist = distance(&a, &b);
                if best.is_none_or(|(_, _, d)| dist < d) {
                    best = Some((side, i, dist));
                }
            }
        }
        let Some((mut side, mut i, dist)) = best else {
            return false;
        };
        if dist >= current {
            side = rng.gen_bool(0.5);
            let paths = if side { &*ran } else { &*dom };
            let open: Vec<usize> = (0..paths.len()).filter(|&k| rel(&paths[k]) < max_depth).collect();
            if open.is_empty() {
                return false;
            }
            i = open[rng.gen_range(0..open.len())];
        }
        let paths = if side { &mut *ran } else { &mut *dom };
        let leaf = paths.remove(i);
        paths.extend(leaf.children(g));
    }
    label_counts(g, dom) == label_counts(g, ran)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_loops() -> Arc<MultiGraph> {
        Arc::new(MultiGraph::bouquet(2).unwrap())
    }

    fn m2() -> Arc<MultiGraph> {
        Arc::new(MultiGraph::loop_pair(2).unwrap())
    }

    fn elem(g: &Arc<MultiGraph>, pairs: &[(&str, &str)]) -> PrefixExchange {
        PrefixExchange::from_literals(&ClopenSet::full(g), pairs).unwrap()
    }

    fn pt(g: &MultiGraph, s: &str) -> BoundaryPoint {
        BoundaryPoint::parse(g, s).unwrap()
    }

    fn path(g: &MultiGraph, s: &str) -> Path {
        Path::parse(g, s).unwrap()
    }

    /// Image of every depth-`depth` node below `Y`, read off the raw pairs.
    fn prefix_action(e: &PrefixExchange, depth: usize) -> Vec<Path> {
        let g = e.graph();
        let mut layer: Vec<Path> = e.restriction().paths().to_vec();
        while layer.iter().any(|p| p.len() < depth) {
            layer = layer
                .into_iter()
                .flat_map(|p| if p.len() < depth { p.children(g) } else { vec![p] })
                .collect();
        }
        layer.sort();
        layer
            .iter()
            .map(|p| {
                let (d, r) = e.pairs().iter().find(|(d, _)| d.is_prefix_of(p)).unwrap();
                r.extend(&p.edges()[d.len()..])
            })
            .collect()
    }

    #[test]
    fn validate_examples() {
        let g = two_loops();
        let x = ClopenSet::full(&g);
        assert!(PrefixExchange::from_literals(&x, &[("@a", "@a")]).is_ok());
        let err = PrefixExchange::from_literals(&x, &[("x", "y")]).unwrap_err();
        assert!(err.to_string().contains("incomplete domain antichain"));
        let m = m2();
        let err = PrefixExchange::from_literals(&ClopenSet::full(&m), &[("a", "@2"), ("b", "@1"), ("@2", "b")])
            .unwrap_err();
        assert!(err.to_string().contains("label mismatch"));
    }

    #[test]
    fn expand_examples() {
        let g = two_loops();
        let id = PrefixExchange::identity(&ClopenSet::full(&g));
        assert_eq!(id.expand_at(&Path::vertex(0)).unwrap(), elem(&g, &[("x", "x"), ("y", "y")]));
        let swap = elem(&g, &[("x", "y"), ("y", "x")]);
        assert_eq!(
            swap.expand_at(&path(&g, "x")).unwrap(),
            elem(&g, &[("x.x", "y.x"), ("x.y", "y.y"), ("y", "x")])
        );
        assert!(swap.expand_at(&path(&g, "x.x")).is_err());
    }

    #[test]
    fn canonical_examples() {
        let g = two_loops();
        let e = elem(&g, &[("x", "x"), ("y", "y")]);
        assert_eq!(e.canonicalize(), PrefixExchange::identity(&ClopenSet::full(&g)));
        let swap = elem(&g, &[("x", "y"), ("y", "x")]);
        assert_eq!(swap.canonicalize(), swap);
        let deep = elem(&g, &[("x.x", "x.x"), ("x.y", "x.y"), ("y.x", "y.x"), ("y.y", "y.y")]);
        assert!(deep.equals(&PrefixExchange::identity(&ClopenSet::full(&g))).unwrap());
        assert!(!swap.equals(&e).unwrap());
    }

    #[test]
    fn compose_invert_examples() {
        let g = two_loops();
        let id = PrefixExchange::identity(&ClopenSet::full(&g));
        let swap = elem(&g, &[("x", "y"), ("y", "x")]);
        assert!(swap.compose(&swap).unwrap().equals(&id).unwrap());
        assert_eq!(swap.invert(), swap);
        assert_eq!(id.invert(), id);
        let f = elem(&g, &[("x.x", "y"), ("x.y", "x.y"), ("y", "x.x")]);
        assert!(f.compose(&f.invert()).unwrap().is_identity());
        let other = Arc::new(MultiGraph::bouquet(3).unwrap());
        assert!(matches!(
            f.compose(&PrefixExchange::identity(&ClopenSet::full(&other))),
            Err(Error::RestrictionMismatch)
        ));
    }

    #[test]
    fn apply_examples() {
        let g = two_loops();
        let id = PrefixExchange::identity(&ClopenSet::full(&g));
        let xs = pt(&g, "- (x)");
        assert_eq!(id.apply(&xs).unwrap(), xs);
        let swap = elem(&g, &[("x", "y"), ("y", "x")]);
        assert_eq!(swap.apply(&xs).unwrap(), pt(&g, "y (x)"));
        let f = elem(&g, &[("x.x", "y"), ("x.y", "x.y"), ("y", "x.x")]);
        let p = pt(&g, "x.x.y (x)");
        let q = f.apply(&p).unwrap();
        assert_eq!(q, pt(&g, "y.y (x)"));
        let c = f.cocycle_at(&p).unwrap();
        assert_eq!(c, 1);
        // σ^{|d|}(p) = σ^{|r|}(f(p))
        assert_eq!(p.drop_prefix(&g, 2), q.drop_prefix(&g, 1));
    }

    #[test]
    fn bisection_examples() {
        let g = two_loops();
        let x = ClopenSet::full(&g);
        let id = PrefixExchange::identity(&x);
        assert!(id.to_bisection().triples.iter().all(|t| t.1 == 0));
        let f = elem(&g, &[("x.x", "y"), ("x.y", "x.y"), ("y", "x.x")]);
        let table = f.to_bisection();
        assert!(table.triples.contains(&(path(&g, "y"), 1, path(&g, "x.x"))));
        assert_eq!(PrefixExchange::from_bisection(&x, &table).unwrap(), f);
        let mut bad = table.clone();
        bad.triples[0].1 += 1;
        assert!(PrefixExchange::from_bisection(&x, &bad).is_err());
    }

    #[test]
    fn automorphism_examples() {
        let g = two_loops();
        let x = ClopenSet::full(&g);
        let id = PrefixExchange::identity(&x);
        assert!(id.is_automorphism().unwrap().is_empty());
        let swap = elem(&g, &[("x", "y"), ("y", "x")]);
        let lp = swap.is_automorphism().unwrap();
        let support: Vec<&Path> = lp.support().collect();
        assert_eq!(support, vec![&Path::vertex(0)]);
        assert_eq!(lp.display(&g).to_string(), "@a: (x y)\n");
        let f = elem(&g, &[("x.x", "y"), ("x.y", "x.y"), ("y", "x.x")]);
        assert!(f.is_automorphism().is_none());
        assert_eq!(swap.child_action(&Path::vertex(0)).unwrap(), Perm::from_cycles(2, &[vec![0, 1]]).unwrap());
        assert!(id.child_action(&path(&g, "x.y")).unwrap().is_identity());
        assert!(f.child_action(&Path::vertex(0)).is_err());
    }

    #[test]
    fn local_perm_round_trip() {
        let g = two_loops();
        let x = ClopenSet::full(&g);
        let tau = Perm::from_cycles(2, &[vec![0, 1]]).unwrap();
        let mut m = LocalPermMap::new();
        m.insert(path(&g, "x.y"), tau.clone());
        m.insert(path(&g, "y"), tau.clone());
        let e = PrefixExchange::from_local_perms(&x, &m).unwrap();
        assert_eq!(e.child_action(&path(&g, "x.y")).unwrap(), tau);
        assert_eq!(e.child_action(&path(&g, "y")).unwrap(), tau);
        assert!(e.child_action(&path(&g, "x")).unwrap().is_identity());
        assert_eq!(e.is_automorphism().unwrap(), m);

        let m2 = m2();
        let mut bad = LocalPermMap::new();
        // a and b leave vertex 1 towards different termini
        bad.insert(Path::vertex(0), Perm::from_cycles(2, &[vec![0, 1]]).unwrap());
        assert!(PrefixExchange::from_local_perms(&ClopenSet::full(&m2), &bad).is_err());
    }

    #[test]
    fn fixes_pointwise_examples() {
        let g = two_loops();
        let x = ClopenSet::full(&g);
        let t = ClopenSet::parse_paths(&g, "x, y").unwrap();
        assert!(PrefixExchange::identity(&x).fixes_pointwise(&t).unwrap());
        let swap = elem(&g, &[("x", "y"), ("y", "x")]);
        assert!(!swap.fixes_pointwise(&t).unwrap());
        let inside = elem(&g, &[("x.x", "x.y"), ("x.y", "x.x"), ("y", "y")]);
        assert!(inside.fixes_pointwise(&t).unwrap());
        let thompson = elem(&g, &[("x.x", "x"), ("x.y", "y.x"), ("y", "y.y")]);
        assert!(!thompson.fixes_pointwise(&t).unwrap());
        assert!(inside.fixes_pointwise(&ClopenSet::parse_paths(&g, "x").unwrap()).is_err());
    }

    #[test]
    fn random_elements_are_valid_and_deterministic() {
        for g in [two_loops(), m2()] {
            let x = ClopenSet::full(&g);
            for seed in 0..100 {
                let e = PrefixExchange::random(&x, 3, seed);
                e.validate().unwrap();
                assert_eq!(e, PrefixExchange::random(&x, 3, seed));
            }
        }
        let g = two_loops();
        let x = ClopenSet::full(&g);
        for seed in 0..20 {
            let e = PrefixExchange::random(&x, 1, seed);
            let doms: Vec<String> = e.pairs().iter().map(|(d, _)| d.display(&g).to_string()).collect();
            assert!(doms == ["@a"] || doms == ["x", "y"]);
        }
    }

    #[test]
    fn restricted_elements() {
        let g = m2();
        let y = ClopenSet::parse_paths(&g, "a, b").unwrap();
        for seed in 0..50 {
            let e = PrefixExchange::random(&y, 3, seed);
            e.validate().unwrap();
            assert!(e.pairs().iter().all(|(d, r)| y.is_below(d) && y.is_below(r)));
            assert!(e.compose(&e.invert()).unwrap().is_identity());
        }
        let id = PrefixExchange::identity(&y);
        let full = PrefixExchange::identity(&ClopenSet::full(&g));
        assert!(matches!(id.compose(&full), Err(Error::RestrictionMismatch)));
        // the identity on Y never contracts above Y
        assert_eq!(id.canonicalize().pairs().len(), 2);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = BoundaryPoint::random_in(&y, &mut rng);
        assert_eq!(id.apply(&p).unwrap(), p);
        assert!(matches!(id.apply(&pt(&g, "- (c.a.b)")), Err(Error::PointOutside)));
    }

    #[test]
    fn text_round_trip() {
        let g = m2();
        let x = ClopenSet::full(&g);
        let e = PrefixExchange::random(&x, 3, 9);
        let text = e.to_text(None);
        let back = PrefixExchange::parse(&text, &g, &HashMap::new()).unwrap();
        assert_eq!(back, e);
        let y = ClopenSet::parse_paths(&g, "a, b").unwrap();
        let ey = PrefixExchange::random(&y, 2, 4);
        let clopens = HashMap::from([("Y".to_string(), y.clone())]);
        let back = PrefixExchange::parse(&ey.to_text(Some("Y")), &g, &clopens).unwrap();
        assert_eq!(back, ey);
        let err = PrefixExchange::parse("element over m2\npair a -> \n", &g, &clopens).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn equals_agrees_with_prefix_action() {
        for g in [two_loops(), m2()] {
            let x = ClopenSet::full(&g);
            let elems: Vec<PrefixExchange> = (0..40).map(|s| PrefixExchange::random(&x, 2, s)).collect();
            for a in &elems {
                for b in &elems {
                    let depth = a.max_depth().max(b.max_depth()) + 4;
                    let same = prefix_action(a, depth) == prefix_action(b, depth);
                    assert_eq!(a.equals(b).unwrap(), same);
                }
            }
        }
    }

    #[test]
    fn automorphisms_preserve_lengths() {
        let g = two_loops();
        let x = ClopenSet::full(&g);
        let mut found = 0;
        for seed in 0..300 {
            let e = PrefixExchange::random(&x, 3, seed);
            if e.is_automorphism().is_some() {
                found += 1;
                let depth = 6;
                let mut layer = vec![Path::vertex(0)];
                for _ in 0..depth {
                    layer = layer.iter().flat_map(|p| p.children(&g)).collect();
                }
                let images = prefix_action(&e, depth);
                assert!(images.iter().all(|p| p.len() == depth));
                let back = PrefixExchange::from_local_perms(&x, &e.is_automorphism().unwrap()).unwrap();
                assert!(back.equals(&e).unwrap());
            }
        }
        assert!(found > 0);
    }
}
