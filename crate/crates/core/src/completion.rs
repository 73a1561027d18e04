//! Patterns, local prime content and completions with prescribed prime content.
//!
//! [`build_completion`] takes a graph `g`, a clopen `Y` and a finite set of
//! primes `P`. It produces a second graph `g̃` whose restricted groupoid has
//! the same topological full group (by Matsumoto's criterion), together with
//! a pattern on `g̃` whose local prime content is exactly `P`. Every claim is
//! recorded as a named check in a [`CompletionCertificate`].

use std::collections::{BTreeSet, HashSet};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed};

use crate::abelian::{FinAbGroup, DEFAULT_GROUP_ORDER_CAP};
use crate::almost_aut::edge_cycles;
use crate::error::{Error, Result};
use crate::homology::{matsumoto_report, Homology};
use crate::linalg::{cokernel, IntMatrix};
use crate::multigraph::{strip_comment, EdgeIdx, MultiGraph, VertexIdx};
use crate::par::{self, Exec};
use crate::perm::{closure, is_prime, prime_factors, Perm, DEFAULT_CLOSURE_CAP};
use crate::shift::{ClopenSet, Path};

pub const DEFAULT_ENUMERATION_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub group_order: u64,
    pub closure: usize,
    pub enumeration: u64,
    pub exec: Exec,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            group_order: DEFAULT_GROUP_ORDER_CAP,
            closure: DEFAULT_CLOSURE_CAP,
            enumeration: DEFAULT_ENUMERATION_CAP,
            exec: Exec::default(),
        }
    }
}

/// Per-vertex generators of permutation groups on out-edges. Permutations act
/// on positions in `out_edges(v)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern {
    graph: Arc<MultiGraph>,
    generators: Vec<Vec<Perm>>,
}

impl Pattern {
    pub fn trivial(g: &Arc<MultiGraph>) -> Self {
        Pattern {
            graph: Arc::clone(g),
            generators: vec![Vec::new(); g.vertex_count()],
        }
    }

    pub fn graph(&self) -> &Arc<MultiGraph> {
        &self.graph
    }

    /// Rejects permutations that move an edge to one with a different terminus.
    pub fn add_generator(&mut self, v: VertexIdx, p: Perm) -> Result<()> {
        let g = &self.graph;
        let outs = g.out_edges(v);
        if p.degree() != outs.len() {
            return Err(Error::InvalidPattern(format!(
                "generator at {} has degree {}, vertex has {} out-edges",
                g.vertex(v),
                p.degree(),
                outs.len()
            )));
        }
        if (0..outs.len()).any(|i| g.terminus(outs[i]) != g.terminus(outs[p.image(i)])) {
            return Err(Error::InvalidPattern(format!(
                "generator {} at {} does not preserve termini",
                edge_cycles(g, v, &p),
                g.vertex(v)
            )));
        }
        self.generators[v].push(p);
        Ok(())
    }

    pub fn generators(&self, v: VertexIdx) -> &[Perm] {
        &self.generators[v]
    }

    /// The group `F_v`, breadth-first from the identity.
    pub fn group(&self, v: VertexIdx, cap: usize) -> Result<Vec<Perm>> {
        closure(self.graph.out_edges(v).len(), &self.generators[v], cap)
    }

    pub fn group_order(&self, v: VertexIdx, cap: usize) -> Result<u64> {
        Ok(self.group(v, cap)?.len() as u64)
    }

    /// Prime factors of `∏_v |F_v|`.
    pub fn local_prime_content(&self, cap: usize, exec: Exec) -> Result<Vec<u64>> {
        let labels: Vec<VertexIdx> = (0..self.graph.vertex_count()).collect();
        let orders = par::try_map(exec, &labels, |&v| self.group_order(v, cap))?;
        let primes: BTreeSet<u64> = orders.into_iter().flat_map(prime_factors).collect();
        Ok(primes.into_iter().collect())
    }

    /// Lines `pattern <vertex>: <cycles>`, one per generator.
    pub fn to_text(&self) -> String {
        let g = &self.graph;
        let mut s = String::new();
        for (v, gens) in self.generators.iter().enumerate() {
            for p in gens {
                s.push_str(&format!("pattern {}: {}\n", g.vertex(v), edge_cycles(g, v, p)));
            }
        }
        s
    }

    pub fn parse(text: &str, g: &Arc<MultiGraph>) -> Result<Self> {
        let mut pat = Pattern::trivial(g);
        for (i, raw) in text.lines().enumerate() {
            let line = strip_comment(raw);
            if line.is_empty() {
                continue;
            }
            pat.parse_line(line).map_err(|e| Error::parse(i + 1, e.to_string()))?;
        }
        Ok(pat)
    }

    pub(crate) fn parse_line(&mut self, line: &str) -> Result<()> {
        let g = Arc::clone(&self.graph);
        let rest = line
            .strip_prefix("pattern")
            .ok_or_else(|| Error::InvalidPattern("expected `pattern <vertex>: <cycles>`".into()))?;
        let (v, cycles) = rest
            .split_once(':')
            .ok_or_else(|| Error::InvalidPattern("missing ':'".into()))?;
        let v = g
            .vertex_index(v.trim())
            .ok_or_else(|| Error::InvalidPattern(format!("unknown vertex {:?}", v.trim())))?;
        let outs = g.out_edges(v);
        let mut parsed = Vec::new();
        let mut rest = cycles.trim();
        while !rest.is_empty() {
            let body = rest
                .strip_prefix('(')
                .ok_or_else(|| Error::InvalidPattern(format!("expected '(' in {rest:?}")))?;
            let close = body
                .find(')')
                .ok_or_else(|| Error::InvalidPattern("unbalanced parenthesis".into()))?;
            let cycle = body[..close]
                .split_whitespace()
                .map(|name| {
                    let e = g
                        .edge_index(name)
                        .ok_or_else(|| Error::InvalidPattern(format!("unknown edge {name:?}")))?;
                    outs.iter().position(|&d| d == e).ok_or_else(|| {
                        Error::InvalidPattern(format!("{name} does not leave {}", g.vertex(v)))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            if !cycle.is_empty() {
                parsed.push(cycle);
            }
            rest = body[close + 1..].trim_start();
        }
        let p = Perm::from_cycles(outs.len(), &parsed)?;
        self.add_generator(v, p)
    }
}

/// The pattern induced by graph automorphisms fixing every vertex. Each
/// generator is a permutation of all edges (indexed canonically).
pub fn pattern_from_edge_automorphisms(g: &Arc<MultiGraph>, gens: &[Perm], cap: usize) -> Result<Pattern> {
    for p in gens {
        if p.degree() != g.edge_count() {
            return Err(Error::InvalidPattern(format!(
                "edge permutation of degree {} on {} edges",
                p.degree(),
                g.edge_count()
            )));
        }
        for e in 0..g.edge_count() {
            let f = p.image(e);
            if g.origin(f) != g.origin(e) || g.terminus(f) != g.terminus(e) {
                return Err(Error::InvalidPattern(format!(
                    "{} -> {} does not preserve endpoints",
                    g.edge(e).id,
                    g.edge(f).id
                )));
            }
        }
    }
    let mut pat = Pattern::trivial(g);
    for v in 0..g.vertex_count() {
        let outs = g.out_edges(v);
        for p in gens {
            let images = outs
                .iter()
                .map(|&e| outs.iter().position(|&d| d == p.image(e)).expect("origin preserved"))
                .collect();
            let local = Perm::from_images(images)?;
            if !local.is_identity() {
                pat.add_generator(v, local)?;
            }
        }
    }
    let whole = closure(g.edge_count(), gens, cap)?.len() as u64;
    let lpc = pat.local_prime_content(cap, Exec::Sequential)?;
    if lpc != prime_factors(whole) {
        return Err(Error::VerificationFailed(format!(
            "local prime content {lpc:?} differs from the primes of |G| = {whole}"
        )));
    }
    Ok(pat)
}

fn product(primes: &[u64]) -> BigInt {
    primes.iter().map(|&p| BigInt::from(p)).product()
}

fn check_primes(primes: &[u64]) -> Result<()> {
    if let Some(p) = primes.iter().find(|&&p| !is_prime(p)) {
        return Err(Error::Construction(format!("{p} is not prime")));
    }
    if primes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Construction("primes must be distinct and ascending".into()));
    }
    Ok(())
}

/// The factor list with `1` appended when empty.
pub fn pad_factors(torsion: &[BigInt]) -> Vec<BigInt> {
    if torsion.is_empty() {
        vec![BigInt::one()]
    } else {
        torsion.to_vec()
    }
}

/// A matrix `A` with `det A = det_target`, `Coker A ≅ ⊕ ℤ/dᵢ`, `I − Aᵗ ≥ 1`
/// entrywise and an entry of `I − Aᵗ` equal to `N = ∏P`.
pub fn construct_prime_matrix(torsion: &[BigInt], det_target: &BigInt, primes: &[u64]) -> Result<IntMatrix> {
    check_primes(primes)?;
    if torsion.iter().any(|d| d.is_negative()) {
        return Err(Error::Construction("factors must be nonnegative".into()));
    }
    let n_big = product(primes);
    let factors = pad_factors(torsion);
    let prod: BigInt = factors.iter().product();
    if det_target.abs() != prod {
        return Err(Error::Construction(format!(
            "|det| = {} but the factors multiply to {prod}",
            det_target.abs()
        )));
    }
    let mut diag: Vec<BigInt> = vec![-BigInt::one()];
    diag.extend(factors.iter().map(|d| -d));
    let short = IntMatrix::diagonal(&diag).determinant()?;
    if short != *det_target {
        diag.insert(1, -BigInt::one());
        if IntMatrix::diagonal(&diag).determinant()? != *det_target {
            return Err(Error::Construction(format!(
                "determinant {det_target} is not reachable by either diagonal form"
            )));
        }
    }
    let size = diag.len();
    let mut a = IntMatrix::diagonal(&diag);
    for i in 1..size {
        for j in 0..size {
            let v = a.get(i, j) + a.get(0, j);
            a.set(i, j, v);
        }
    }
    for j in 1..size {
        for i in 0..size {
            let v = a.get(i, j) + &n_big * a.get(i, 0);
            a.set(i, j, v);
        }
    }
    let problems = prime_matrix_problems(&a, torsion, det_target, &n_big)?;
    if !problems.is_empty() {
        return Err(Error::VerificationFailed(problems.join("; ")));
    }
    Ok(a)
}

fn prime_matrix_problems(a: &IntMatrix, torsion: &[BigInt], det_target: &BigInt, n: &BigInt) -> Result<Vec<String>> {
    let mut problems = Vec::new();
    let det = a.determinant()?;
    if det != *det_target {
        problems.push(format!("det A = {det}, expected {det_target}"));
    }
    let expected = FinAbGroup::from_cyclic_factors(torsion);
    let got = cokernel(a).0;
    if got != expected {
        problems.push(format!("Coker A = {got}, expected {expected}"));
    }
    let m = a.id_minus_transpose()?;
    if m.entries().iter().any(|x| *x < BigInt::one()) {
        problems.push("I - A^t has an entry below 1".into());
    }
    if m.is_permutation_matrix() || !m.entries().iter().any(|x| *x >= BigInt::from(2)) {
        problems.push("I - A^t is circular".into());
    }
    if !m.entries().contains(n) {
        problems.push(format!("no entry of I - A^t equals {n}"));
    }
    Ok(problems)
}

pub fn graph_from_matrix(m: &IntMatrix, prefix: &str) -> Result<MultiGraph> {
    MultiGraph::from_matrix(m, prefix)
}

/// Disjoint `p`-cycles, one per prime, on consecutive edges of the
/// lexicographically first vertex pair with at least `N` parallel edges.
pub fn prime_cycle_pattern(g: &Arc<MultiGraph>, primes: &[u64]) -> Result<Pattern> {
    let mut pat = Pattern::trivial(g);
    if primes.is_empty() {
        return Ok(pat);
    }
    let n = product(primes);
    let m = g.adjacency_matrix();
    let size = g.vertex_count();
    let (v, w) = (0..size)
        .flat_map(|v| (0..size).map(move |w| (v, w)))
        .find(|&(v, w)| *m.get(v, w) >= n)
        .ok_or_else(|| Error::Construction(format!("no vertex pair carries {n} parallel edges")))?;
    let outs = g.out_edges(v);
    let parallel: Vec<usize> = (0..outs.len()).filter(|&i| g.terminus(outs[i]) == w).collect();
    let mut cycles = Vec::new();
    let mut next = 0;
    for &p in primes {
        let p = usize::try_from(p).map_err(|_| Error::Construction("prime too large".into()))?;
        if next + p > parallel.len() {
            return Err(Error::Construction("not enough parallel edges for the cycles".into()));
        }
        cycles.push(parallel[next..next + p].to_vec());
        next += p;
    }
    pat.add_generator(v, Perm::from_cycles(outs.len(), &cycles)?)?;
    Ok(pat)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub details: String,
}

impl Check {
    fn new(name: &str, pass: bool, details: impl Into<String>) -> Self {
        Check {
            name: name.to_string(),
            pass,
            details: details.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompletionCertificate {
    pub graph: Arc<MultiGraph>,
    pub y: ClopenSet,
    pub primes: Vec<u64>,
    pub n: BigInt,
    pub padded_factors: Vec<BigInt>,
    pub det: BigInt,
    pub a: IntMatrix,
    pub tilde_graph: Arc<MultiGraph>,
    pub tilde_y: ClopenSet,
    pub pattern: Pattern,
    pub checks: Vec<Check>,
}

impl CompletionCertificate {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// Recomputes every check from the stored fields.
    pub fn run_checks(&self, limits: &Limits) -> Result<Vec<Check>> {
        let mut out = Vec::new();
        let hom = Homology::new(&self.graph)?;
        let det_a = self.a.determinant()?;
        let tilde_m = self.tilde_graph.adjacency_matrix();
        let tilde_det = tilde_m.id_minus_transpose()?.determinant()?;
        out.push(Check::new(
            "det-equality",
            det_a == *hom.determinant() && tilde_det == det_a && self.det == det_a,
            format!("det = {det_a}"),
        ));

        let coker_a = cokernel(&self.a).0;
        let tilde_h0 = cokernel(&tilde_m.id_minus_transpose()?).0;
        let padded_ok = self.padded_factors == pad_factors(hom.h0().torsion());
        out.push(Check::new(
            "cokernel-match",
            padded_ok && coker_a == *hom.h0() && tilde_h0 == *hom.h0(),
            format!("H0 = {}", hom.h0()),
        ));

        let expected_n = product(&self.primes);
        let m = self.a.id_minus_transpose()?;
        let witness = (0..m.rows())
            .flat_map(|i| (0..m.cols()).map(move |j| (i, j)))
            .find(|&(i, j)| *m.get(i, j) == self.n);
        out.push(Check::new(
            "entry-n",
            self.n == expected_n && witness.is_some(),
            match witness {
                Some((i, j)) => format!("N = {} at ({}, {})", self.n, i + 1, j + 1),
                None => format!("N = {} absent", self.n),
            },
        ));
        out.push(Check::new(
            "entrywise-positive",
            m.entries().iter().all(|x| *x >= BigInt::one()),
            format!("min entry {}", m.entries().iter().min().cloned().unwrap_or_default()),
        ));
        out.push(Check::new(
            "adjacency",
            tilde_m == m,
            format!("{} vertices, {} edges", self.tilde_graph.vertex_count(), self.tilde_graph.edge_count()),
        ));
        out.push(Check::new(
            "diconnected",
            self.tilde_graph.is_diconnected(),
            String::new(),
        ));
        out.push(Check::new(
            "non-circular",
            self.tilde_graph.is_non_circular(),
            String::new(),
        ));

        let tilde_hom = Homology::new(&self.tilde_graph)?;
        let class = hom.class_of(&self.y)?;
        let tilde_class = tilde_hom.class_of(&self.tilde_y)?;
        out.push(Check::new(
            "class-transport",
            !self.tilde_y.is_empty() && class.element() == tilde_class.element(),
            format!("{class} -> {tilde_class}"),
        ));

        let lpc = self.pattern.local_prime_content(limits.closure, limits.exec)?;
        out.push(Check::new(
            "lpc-equality",
            self.pattern.graph() == &self.tilde_graph && lpc == self.primes,
            format!("lpc = {}", format_primes(&lpc)),
        ));

        let report = matsumoto_report(&self.y, &self.tilde_y, limits.group_order)?;
        out.push(Check::new(
            "matsumoto",
            report.met(),
            if report.met() { "MET" } else { "NOT-MET" },
        ));
        Ok(out)
    }
}

pub fn format_primes(primes: &[u64]) -> String {
    if primes.is_empty() {
        return "none".into();
    }
    primes.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
}

/// The full pipeline; returns a certificate only when every check passes.
pub fn build_completion(y: &ClopenSet, primes: &[u64], limits: &Limits) -> Result<CompletionCertificate> {
    check_primes(primes)?;
    let g = Arc::clone(y.graph());
    let hom = Homology::new(&g)?;
    if !hom.h0().is_finite() {
        return Err(Error::UnsupportedInfinite {
            free_rank: hom.h0().free_rank(),
        });
    }
    let det = hom.determinant().clone();
    let a = construct_prime_matrix(hom.h0().torsion(), &det, primes)?;
    let tilde_m = a.id_minus_transpose()?;
    let tilde_graph = Arc::new(graph_from_matrix(&tilde_m, "e")?.with_name(&format!("{}_tilde", g.name()))?);
    let tilde_hom = Homology::new(&tilde_graph)?;
    if tilde_hom.h0() != hom.h0() {
        return Err(Error::VerificationFailed(format!(
            "H0 changed from {} to {}",
            hom.h0(),
            tilde_hom.h0()
        )));
    }
    let class = hom.class_of(y)?;
    let tilde_y = tilde_hom.realize(&class.element().clone().into())?;
    let pattern = prime_cycle_pattern(&tilde_graph, primes)?;
    let mut cert = CompletionCertificate {
        graph: g,
        y: y.clone(),
        primes: primes.to_vec(),
        n: product(primes),
        padded_factors: pad_factors(hom.h0().torsion()),
        det,
        a,
        tilde_graph,
        tilde_y,
        pattern,
        checks: Vec::new(),
    };
    cert.checks = cert.run_checks(limits)?;
    let failed: Vec<&str> = cert.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
    if !failed.is_empty() {
        return Err(Error::VerificationFailed(format!("failed checks: {}", failed.join(", "))));
    }
    Ok(cert)
}

/// Batch form of [`build_completion`].
pub fn build_completions(jobs: &[(ClopenSet, Vec<u64>)], limits: &Limits) -> Vec<Result<CompletionCertificate>> {
    par::map(limits.exec, jobs, |(y, p)| build_completion(y, p, limits))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FixIndex {
    /// `|F_{t(leaf)}|`.
    pub formula: u64,
    /// The ratio of truncated counts, when the enumeration fit under the cap.
    pub enumerated: Option<u64>,
}

impl FixIndex {
    pub fn verified(&self) -> bool {
        self.enumerated == Some(self.formula)
    }
}

/// `[Fix(T) : Fix(T′)]` in the patterned group, where `T′` is `T` expanded at `leaf`.
pub fn fix_quotient_index(pat: &Pattern, t: &ClopenSet, leaf: &Path, limits: &Limits) -> Result<FixIndex> {
    let g = pat.graph();
    if t.graph() != g && **t.graph() != **g {
        return Err(Error::RestrictionMismatch);
    }
    if !crate::shift::is_complete_antichain(g, t.paths(), &ClopenSet::full(g))? {
        return Err(Error::InvalidClopen("T is not a complete antichain".into()));
    }
    if !t.paths().contains(leaf) {
        return Err(Error::InvalidClopen(format!("{} is not a leaf of T", leaf.display(g))));
    }
    let formula = pat.group_order(leaf.terminus(g), limits.closure)?;
    let t2 = t.refine_at(leaf)?;
    let depth = leaf.len() + 2;
    let before = count_fixing(pat, t, depth, limits)?;
    let after = count_fixing(pat, &t2, depth, limits)?;
    let enumerated = match (before, after) {
        (Some(b), Some(a)) if a > 0 && b % a == 0 => Some(b / a),
        (Some(b), Some(a)) => {
            return Err(Error::VerificationFailed(format!(
                "counts {b} and {a} do not divide"
            )))
        }
        _ => None,
    };
    Ok(FixIndex { formula, enumerated })
}

/// Number of distinct actions on depth-`depth` nodes of patterned
/// automorphisms supported above that depth and fixing `t` pointwise.
fn count_fixing(pat: &Pattern, t: &ClopenSet, depth: usize, limits: &Limits) -> Result<Option<u64>> {
    let g = pat.graph();
    let mut nodes: Vec<Path> = Vec::new();
    let mut targets: Vec<(usize, Path)> = Vec::new();
    for (k, leaf) in t.paths().iter().enumerate() {
        if leaf.len() > depth {
            continue;
        }
        let mut layer = vec![leaf.clone()];
        while layer[0].len() < depth {
            nodes.extend(layer.iter().cloned());
            layer = layer.iter().flat_map(|p| p.children(g)).collect();
        }
        targets.extend(layer.into_iter().map(|p| (k, p)));
    }
    let groups: Vec<Vec<Perm>> = nodes
        .iter()
        .map(|u| pat.group(u.terminus(g), limits.closure))
        .collect::<Result<_>>()?;
    let mut total: u64 = 1;
    for grp in &groups {
        total = match total.checked_mul(grp.len() as u64) {
            Some(x) if x <= limits.enumeration => x,
            _ => return Ok(None),
        };
    }
    let index: std::collections::HashMap<&Path, usize> = nodes.iter().enumerate().map(|(i, u)| (u, i)).collect();
    let leaves = t.paths();
    let act = |choice: &[usize]| -> Vec<Vec<EdgeIdx>> {
        targets
            .iter()
            .map(|(k, p)| {
                let root = &leaves[*k];
                let mut u = root.clone();
                let mut image: Vec<EdgeIdx> = root.edges().to_vec();
                for &e in &p.edges()[root.len()..] {
                    let outs = g.out_edges(u.terminus(g));
                    let i = outs.iter().position(|&d| d == e).expect("edge leaves u");
                    let n = index[&u];
                    image.push(outs[groups[n][choice[n]].image(i)]);
                    u = u.child(g, e);
                }
                image
            })
            .collect()
    };
    if nodes.is_empty() {
        return Ok(Some(1));
    }
    let first: Vec<usize> = (0..groups[0].len()).collect();
    let partial: Vec<HashSet<Vec<Vec<EdgeIdx>>>> = par::map(limits.exec, &first, |&c0| {
        let mut seen = HashSet::new();
        let mut choice = vec![0usize; nodes.len()];
        choice[0] = c0;
        loop {
            seen.insert(act(&choice));
            // odometer over positions 1..
            let mut pos = 1;
            while pos < choice.len() {
                choice[pos] += 1;
                if choice[pos] < groups[pos].len() {
                    break;
                }
                choice[pos] = 0;
                pos += 1;
            }
            if pos == choice.len() {
                break;
            }
        }
        seen
    });
    let mut all: HashSet<Vec<Vec<EdgeIdx>>> = HashSet::new();
    for s in partial {
        all.extend(s);
    }
    Ok(Some(all.len() as u64))
}

/// Adjacency `M(i, i+1 mod n) = pᵢ`, `M(1,1) = ∏p − 2`, zero elsewhere (`n ≥ 2`).
pub fn multi_prime_family(primes: &[u64]) -> Result<IntMatrix> {
    let n = primes.len();
    if n < 2 {
        return Err(Error::Construction("the family needs at least two primes".into()));
    }
    if let Some(p) = primes.iter().find(|&&p| !is_prime(p)) {
        return Err(Error::Construction(format!("{p} is not prime")));
    }
    let mut m = IntMatrix::zeros(n, n);
    for (i, &p) in primes.iter().enumerate() {
        let j = (i + 1) % n;
        let v = m.get(i, j) + BigInt::from(p);
        m.set(i, j, v);
    }
    let v = m.get(0, 0) + product(primes) - 2;
    m.set(0, 0, v);
    Ok(m)
}

/// Order of the pattern group at each vertex, as a product.
pub fn pattern_order_product(pat: &Pattern, cap: usize) -> Result<BigInt> {
    let mut acc = BigInt::one();
    for v in 0..pat.graph().vertex_count() {
        acc *= BigInt::from(pat.group_order(v, cap)?);
    }
    Ok(acc)
}
