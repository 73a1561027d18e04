//! Finitely generated abelian groups in invariant-factor coordinates.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::linalg::{smith_normal_form, IntMatrix};
use crate::par::{self, Exec};

pub const DEFAULT_GROUP_ORDER_CAP: u64 = 10_000;

/// `ℤ/d₁ ⊕ … ⊕ ℤ/d_r ⊕ ℤ^f` with `2 ≤ d₁ | d₂ | …`. Equal fields iff isomorphic.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FinAbGroup {
    torsion: Vec<BigInt>,
    free_rank: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AbElement {
    torsion: Vec<BigInt>,
    free: Vec<BigInt>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ElementOrder {
    Finite(BigInt),
    Infinite,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkedGroup {
    pub group: FinAbGroup,
    pub marked: AbElement,
}

impl FinAbGroup {
    pub fn new(torsion: Vec<BigInt>, free_rank: usize) -> Result<Self> {
        let two = BigInt::from(2);
        if torsion.iter().any(|d| *d < two) {
            return Err(Error::GroupMismatch("torsion factors must be >= 2".into()));
        }
        if torsion.windows(2).any(|w| !w[1].is_multiple_of(&w[0])) {
            return Err(Error::GroupMismatch(
                "torsion factors must form a divisibility chain".into(),
            ));
        }
        Ok(FinAbGroup { torsion, free_rank })
    }

    pub fn trivial() -> Self {
        FinAbGroup {
            torsion: Vec::new(),
            free_rank: 0,
        }
    }

    pub fn free(rank: usize) -> Self {
        FinAbGroup {
            torsion: Vec::new(),
            free_rank: rank,
        }
    }

    /// Canonical form of `⊕ ℤ/dᵢ` for arbitrary nonnegative `dᵢ` (0 means ℤ).
    pub fn from_cyclic_factors(factors: &[BigInt]) -> Self {
        let diag = IntMatrix::diagonal(factors);
        crate::linalg::cokernel(&diag).0
    }

    pub fn torsion(&self) -> &[BigInt] {
        &self.torsion
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn is_trivial(&self) -> bool {
        self.torsion.is_empty() && self.free_rank == 0
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    /// `None` for infinite groups.
    pub fn order(&self) -> Option<BigInt> {
        self.is_finite().then(|| self.torsion.iter().product())
    }

    pub fn zero(&self) -> AbElement {
        AbElement {
            torsion: vec![BigInt::zero(); self.torsion.len()],
            free: vec![BigInt::zero(); self.free_rank],
        }
    }

    /// Builds an element, reducing torsion coordinates into `[0, dᵢ)`.
    pub fn element(&self, torsion: Vec<BigInt>, free: Vec<BigInt>) -> Result<AbElement> {
        if torsion.len() != self.torsion.len() || free.len() != self.free_rank {
            return Err(Error::GroupMismatch(format!(
                "element has {}+{} coordinates, group {} needs {}+{}",
                torsion.len(),
                free.len(),
                self,
                self.torsion.len(),
                self.free_rank
            )));
        }
        let torsion = torsion
            .into_iter()
            .zip(&self.torsion)
            .map(|(x, d)| x.mod_floor(d))
            .collect();
        Ok(AbElement { torsion, free })
    }

    pub fn contains(&self, a: &AbElement) -> bool {
        a.torsion.len() == self.torsion.len()
            && a.free.len() == self.free_rank
            && a
                .torsion
                .iter()
                .zip(&self.torsion)
                .all(|(x, d)| !x.is_negative() && x < d)
    }

    fn check(&self, a: &AbElement) -> Result<()> {
        if self.contains(a) {
            Ok(())
        } else {
            Err(Error::GroupMismatch(format!("{a} is not an element of {self}")))
        }
    }

    pub fn add(&self, a: &AbElement, b: &AbElement) -> Result<AbElement> {
        self.check(a)?;
        self.check(b)?;
        let torsion = a.torsion.iter().zip(&b.torsion).map(|(x, y)| x + y).collect();
        let free = a.free.iter().zip(&b.free).map(|(x, y)| x + y).collect();
        self.element(torsion, free)
    }

    pub fn negate(&self, a: &AbElement) -> Result<AbElement> {
        self.check(a)?;
        let torsion = a.torsion.iter().map(|x| -x).collect();
        let free = a.free.iter().map(|x| -x).collect();
        self.element(torsion, free)
    }

    pub fn scale(&self, k: &BigInt, a: &AbElement) -> Result<AbElement> {
        self.check(a)?;
        let torsion = a.torsion.iter().map(|x| x * k).collect();
        let free = a.free.iter().map(|x| x * k).collect();
        self.element(torsion, free)
    }

    pub fn equals(&self, a: &AbElement, b: &AbElement) -> Result<bool> {
        self.check(a)?;
        self.check(b)?;
        Ok(a == b)
    }

    /// Order of an element: lcm over torsion components, infinite if any free coordinate is nonzero.
    pub fn element_order(&self, a: &AbElement) -> Result<ElementOrder> {
        self.check(a)?;
        if a.free.iter().any(|x| !x.is_zero()) {
            return Ok(ElementOrder::Infinite);
        }
        let order = a
            .torsion
            .iter()
            .zip(&self.torsion)
            .fold(BigInt::one(), |acc, (x, d)| acc.lcm(&(d / x.gcd(d))));
        Ok(ElementOrder::Finite(order))
    }

    /// Parses `trivial` or `Z/2 + Z/4 + Z^1`.
    pub fn parse_literal(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "trivial" {
            return Ok(Self::trivial());
        }
        let mut torsion = Vec::new();
        let mut free = 0usize;
        for term in s.split('+').map(str::trim) {
            if let Some(d) = term.strip_prefix("Z/") {
                torsion.push(
                    d.parse::<BigInt>()
                        .map_err(|_| Error::parse(1, format!("bad factor {term:?}")))?,
                );
            } else if let Some(r) = term.strip_prefix("Z^") {
                free += r
                    .parse::<usize>()
                    .map_err(|_| Error::parse(1, format!("bad rank {term:?}")))?;
            } else if term == "Z" {
                free += 1;
            } else {
                return Err(Error::parse(1, format!("bad group term {term:?}")));
            }
        }
        Self::new(torsion, free).map_err(|e| Error::parse(1, e.to_string()))
    }
}

impl fmt::Display for FinAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return f.write_str("trivial");
        }
        let mut terms: Vec<String> = self.torsion.iter().map(|d| format!("Z/{d}")).collect();
        if self.free_rank > 0 {
            terms.push(format!("Z^{}", self.free_rank));
        }
        f.write_str(&terms.join(" + "))
    }
}

impl FromStr for FinAbGroup {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse_literal(s)
    }
}

impl AbElement {
    /// Raw coordinates; use [`FinAbGroup::element`] to obtain a reduced member of a group.
    pub fn new(torsion: Vec<BigInt>, free: Vec<BigInt>) -> Self {
        AbElement { torsion, free }
    }

    pub fn torsion(&self) -> &[BigInt] {
        &self.torsion
    }

    pub fn free(&self) -> &[BigInt] {
        &self.free
    }

    pub fn is_zero(&self) -> bool {
        self.torsion.iter().chain(&self.free).all(Zero::is_zero)
    }
}

impl fmt::Display for AbElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[BigInt]| v.iter().map(ToString::to_string).collect::<Vec<_>>().join(",");
        write!(f, "({};{})", join(&self.torsion), join(&self.free))
    }
}

impl FromStr for AbElement {
    type Err = Error;

    /// `(1,3;0)`; the `;free` part may be omitted.
    fn from_str(s: &str) -> Result<Self> {
        let inner = s
            .trim()
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| Error::parse(1, format!("bad element literal {s:?}")))?;
        let (t, fr) = inner.split_once(';').unwrap_or((inner, ""));
        let nums = |part: &str| -> Result<Vec<BigInt>> {
            part.split(',')
                .map(str::trim)
                .filter(|w| !w.is_empty())
                .map(|w| {
                    w.parse::<BigInt>()
                        .map_err(|_| Error::parse(1, format!("bad coordinate {w:?}")))
                })
                .collect()
        };
        Ok(AbElement::new(nums(t)?, nums(fr)?))
    }
}

fn small(x: &BigInt) -> u64 {
    x.to_u64().expect("bounded by the group order cap")
}

/// Decides whether some automorphism of the (common) group carries
/// `m1.marked` to `m2.marked`, by enumerating `Hom(G, G)`.
///
/// Column `i` of an endomorphism ranges over elements whose order divides
/// `dᵢ`; candidates satisfying `φ(m1) = m2` are then tested for bijectivity.
pub fn marked_iso_exists(m1: &MarkedGroup, m2: &MarkedGroup, cap: u64) -> Result<bool> {
    marked_iso_exists_with(m1, m2, cap, Exec::default())
}

pub fn marked_iso_exists_with(
    m1: &MarkedGroup,
    m2: &MarkedGroup,
    cap: u64,
    exec: Exec,
) -> Result<bool> {
    for m in [m1, m2] {
        if !m.group.is_finite() {
            return Err(Error::UnsupportedInfinite {
                free_rank: m.group.free_rank,
            });
        }
        let order = m.group.order().expect("finite");
        if order > BigInt::from(cap) {
            return Err(Error::GroupTooLarge {
                order: order.to_string(),
                cap,
            });
        }
        m.group.check(&m.marked)?;
    }
    if m1.group != m2.group {
        return Ok(false);
    }
    let g = &m1.group;
    if g.element_order(&m1.marked)? != g.element_order(&m2.marked)? {
        return Ok(false);
    }
    let d: Vec<u64> = g.torsion.iter().map(small).collect();
    let r = d.len();
    if r == 0 {
        return Ok(true);
    }
    let src: Vec<u64> = m1.marked.torsion.iter().map(small).collect();
    let dst: Vec<u64> = m2.marked.torsion.iter().map(small).collect();

    // Candidate images of generator i: x with dᵢ·x = 0, i.e. x_j ∈ (d_j / gcd(dᵢ, d_j))·ℤ.
    // Enumerated starting from the identity column so that the identity is tried first.
    let columns: Vec<Vec<Vec<u64>>> = (0..r)
        .map(|i| {
            let steps: Vec<(u64, u64)> = (0..r)
                .map(|j| {
                    let step = d[j] / d[i].gcd(&d[j]);
                    (step, d[i].gcd(&d[j]))
                })
                .collect();
            let mut cands = Vec::new();
            let total: u64 = steps.iter().map(|&(_, count)| count).product();
            for mut idx in 0..total {
                let mut x = vec![0u64; r];
                for (j, &(step, count)) in steps.iter().enumerate() {
                    let k = idx % count;
                    idx /= count;
                    x[j] = (k * step) % d[j];
                }
                cands.push(x);
            }
            let id_pos = cands
                .iter()
                .position(|x| (0..r).all(|j| x[j] == u64::from(i == j)))
                .expect("identity column is a valid image");
            cands.rotate_left(id_pos);
            cands
        })
        .collect();

    let search = Search {
        d: &d,
        src: &src,
        dst: &dst,
        columns: &columns,
    };
    let first = &columns[0];
    Ok(par::any(exec, first, |c0| {
        let mut acc: Vec<u64> = (0..r).map(|j| (c0[j] * (src[0] % d[j])) % d[j]).collect();
        let mut chosen = vec![c0.clone()];
        search.extend(1, &mut acc, &mut chosen)
    }))
}

struct Search<'a> {
    d: &'a [u64],
    src: &'a [u64],
    dst: &'a [u64],
    columns: &'a [Vec<Vec<u64>>],
}

impl Search<'_> {
    fn extend(&self, i: usize, acc: &mut Vec<u64>, chosen: &mut Vec<Vec<u64>>) -> bool {
        let r = self.d.len();
        if i == r {
            return acc.as_slice() == self.dst && is_bijective(self.d, chosen);
        }
        for c in &self.columns[i] {
            let saved = acc.clone();
            for j in 0..r {
                acc[j] = (acc[j] + c[j] * (self.src[i] % self.d[j])) % self.d[j];
            }
            chosen.push(c.clone());
            if self.extend(i + 1, acc, chosen) {
                return true;
            }
            chosen.pop();
            *acc = saved;
        }
        false
    }
}

/// An endomorphism of a finite group is bijective iff it is surjective, iff
/// the columns together with the relations `dᵢ·eᵢ` span `ℤ^r`.
fn is_bijective(d: &[u64], columns: &[Vec<u64>]) -> bool {
    let r = d.len();
    let mut entries = Vec::with_capacity(r * 2 * r);
    for j in 0..r {
        for col in columns {
            entries.push(BigInt::from(col[j]));
        }
        for (i, &di) in d.iter().enumerate() {
            entries.push(if i == j { BigInt::from(di) } else { BigInt::zero() });
        }
    }
    let m = IntMatrix::from_entries(r, 2 * r, entries).expect("shape");
    smith_normal_form(&m)
        .invariant_factors
        .iter()
        .all(One::is_one)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn group(t: &[i64], f: usize) -> FinAbGroup {
        FinAbGroup::new(t.iter().map(|&x| BigInt::from(x)).collect(), f).unwrap()
    }

    fn el(g: &FinAbGroup, t: &[i64], f: &[i64]) -> AbElement {
        g.element(
            t.iter().map(|&x| BigInt::from(x)).collect(),
            f.iter().map(|&x| BigInt::from(x)).collect(),
        )
        .unwrap()
    }

    fn marked(g: &FinAbGroup, t: &[i64]) -> MarkedGroup {
        MarkedGroup {
            group: g.clone(),
            marked: el(g, t, &[]),
        }
    }

    #[test]
    fn arithmetic_examples() {
        let z4 = group(&[4], 0);
        assert_eq!(
            z4.element_order(&el(&z4, &[2], &[])).unwrap(),
            ElementOrder::Finite(BigInt::from(2))
        );
        let g = group(&[2], 1);
        assert_eq!(
            g.element_order(&el(&g, &[1], &[0])).unwrap(),
            ElementOrder::Finite(BigInt::from(2))
        );
        assert_eq!(g.element_order(&el(&g, &[0], &[1])).unwrap(), ElementOrder::Infinite);
        let z6 = group(&[6], 0);
        let s = z6.add(&el(&z6, &[4], &[]), &el(&z6, &[5], &[])).unwrap();
        assert_eq!(s, el(&z6, &[3], &[]));
        assert_eq!(z6.negate(&el(&z6, &[1], &[])).unwrap(), el(&z6, &[5], &[]));
        assert!(z6
            .add(&el(&z6, &[1], &[]), &AbElement::new(vec![BigInt::one(); 2], vec![]))
            .is_err());
    }

    #[test]
    fn literals() {
        let g = group(&[2, 4], 1);
        assert_eq!(g.to_string(), "Z/2 + Z/4 + Z^1");
        assert_eq!("Z/2 + Z/4 + Z^1".parse::<FinAbGroup>().unwrap(), g);
        assert_eq!(FinAbGroup::trivial().to_string(), "trivial");
        let e = el(&g, &[1, 3], &[0]);
        assert_eq!(e.to_string(), "(1,3;0)");
        assert_eq!("(1,3;0)".parse::<AbElement>().unwrap(), e);
        assert_eq!("(1)".parse::<AbElement>().unwrap(), AbElement::new(vec![BigInt::one()], vec![]));
        assert!(FinAbGroup::new(vec![BigInt::from(4), BigInt::from(2)], 0).is_err());
    }

    #[test]
    fn canonical_from_factors() {
        let g = FinAbGroup::from_cyclic_factors(&[BigInt::from(2), BigInt::from(3), BigInt::zero()]);
        assert_eq!(g, group(&[6], 1));
    }

    #[test]
    fn marked_examples() {
        let t = FinAbGroup::trivial();
        assert!(marked_iso_exists(&marked(&t, &[]), &marked(&t, &[]), 100).unwrap());
        let z2 = group(&[2], 0);
        assert!(!marked_iso_exists(&marked(&z2, &[1]), &marked(&z2, &[0]), 100).unwrap());
        let z4 = group(&[4], 0);
        assert!(marked_iso_exists(&marked(&z4, &[1]), &marked(&z4, &[3]), 100).unwrap());
        assert!(!marked_iso_exists(&marked(&z4, &[1]), &marked(&z4, &[2]), 100).unwrap());
        // different groups
        assert!(!marked_iso_exists(&marked(&z2, &[0]), &marked(&z4, &[0]), 100).unwrap());
    }

    #[test]
    fn marked_refusals() {
        let inf = group(&[], 1);
        let m = MarkedGroup {
            group: inf.clone(),
            marked: inf.zero(),
        };
        assert!(matches!(
            marked_iso_exists(&m, &m, 100),
            Err(Error::UnsupportedInfinite { free_rank: 1 })
        ));
        let big = group(&[101], 0);
        assert!(matches!(
            marked_iso_exists(&marked(&big, &[1]), &marked(&big, &[1]), 100),
            Err(Error::GroupTooLarge { .. })
        ));
    }

    #[test]
    fn non_cyclic_orbits() {
        // In Z/2 + Z/4, (1,0) and (0,2) both have order 2 but (0,2) is divisible by 2 while (1,0) is not.
        let g = group(&[2, 4], 0);
        assert!(!marked_iso_exists(&marked(&g, &[1, 0]), &marked(&g, &[0, 2]), 100).unwrap());
        assert!(!marked_iso_exists(&marked(&g, &[1, 2]), &marked(&g, &[0, 2]), 100).unwrap());
        assert!(marked_iso_exists(&marked(&g, &[1, 2]), &marked(&g, &[1, 0]), 100).unwrap());
        assert!(marked_iso_exists(&marked(&g, &[1, 1]), &marked(&g, &[0, 1]), 100).unwrap());
        let g = group(&[3, 3], 0);
        assert!(marked_iso_exists(&marked(&g, &[1, 2]), &marked(&g, &[0, 1]), 100).unwrap());
    }

    #[test]
    fn cyclic_orbits_are_order_classes() {
        for n in 1..=24i64 {
            let g = if n == 1 { FinAbGroup::trivial() } else { group(&[n], 0) };
            let elems: Vec<AbElement> = if n == 1 {
                vec![g.zero()]
            } else {
                (0..n).map(|k| el(&g, &[k], &[])).collect()
            };
            for a in &elems {
                for b in &elems {
                    let ma = MarkedGroup { group: g.clone(), marked: a.clone() };
                    let mb = MarkedGroup { group: g.clone(), marked: b.clone() };
                    let expected = g.element_order(a).unwrap() == g.element_order(b).unwrap();
                    for exec in [Exec::Sequential, Exec::Parallel] {
                        assert_eq!(marked_iso_exists_with(&ma, &mb, 1000, exec).unwrap(), expected);
                    }
                }
            }
        }
    }

    fn small_group() -> impl Strategy<Value = FinAbGroup> {
        prop_oneof![
            (2i64..=36).prop_map(|n| group(&[n], 0)),
            (2i64..=6, 1i64..=3).prop_map(|(a, k)| group(&[a, a * k], 0)).prop_filter("order <= 36", |g| g.order().unwrap() <= BigInt::from(36)),
            Just(group(&[2, 2, 2], 0)),
            Just(group(&[2, 2, 4], 0)),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(60))]

        #[test]
        fn invariant_under_automorphic_images(g in small_group(), seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let random_el = |rng: &mut rand_chacha::ChaCha8Rng| {
                let t: Vec<BigInt> = g.torsion().iter().map(|d| BigInt::from(rng.gen_range(0..small(d)))).collect();
                g.element(t, vec![]).unwrap()
            };
            let a = random_el(&mut rng);
            let b = random_el(&mut rng);
            // An automorphism: multiplication by a unit of ℤ/d_max permutes each coordinate's orbit.
            let dmax = small(g.torsion().last().unwrap());
            let units: Vec<u64> = (1..dmax).filter(|u| u.gcd(&dmax) == 1).collect();
            let unit = units[rng.gen_range(0..units.len())];
            let a_img = g.scale(&BigInt::from(unit), &a).unwrap();
            let ma = MarkedGroup { group: g.clone(), marked: a.clone() };
            let mai = MarkedGroup { group: g.clone(), marked: a_img };
            let mb = MarkedGroup { group: g.clone(), marked: b };
            prop_assert!(marked_iso_exists(&ma, &ma, 100).unwrap());
            prop_assert!(marked_iso_exists(&ma, &mai, 100).unwrap());
            let ab = marked_iso_exists(&ma, &mb, 100).unwrap();
            prop_assert_eq!(ab, marked_iso_exists(&mb, &ma, 100).unwrap());
            prop_assert_eq!(ab, marked_iso_exists(&mai, &mb, 100).unwrap());
        }
    }
}
