//! Exact integer matrices over arbitrary-precision integers.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::abelian::{AbElement, FinAbGroup};
use crate::error::{Error, Result};
use crate::multigraph::strip_comment;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            entries: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_entries(rows: usize, cols: usize, entries: Vec<BigInt>) -> Result<Self> {
        if rows * cols != entries.len() {
            return Err(Error::Shape(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        Ok(IntMatrix {
            rows,
            cols,
            entries,
        })
    }

    /// Convenience constructor from machine integers. Panics on ragged rows.
    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        IntMatrix {
            rows: r,
            cols: c,
            entries: rows.iter().flatten().map(|&x| BigInt::from(x)).collect(),
        }
    }

    pub fn diagonal(diag: &[BigInt]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, d) in diag.iter().enumerate() {
            m.set(i, i, d.clone());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: BigInt) {
        self.entries[i * self.cols + j] = value;
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * other.cols + j;
                    out.entries[idx] += a * other.get(k, j);
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Result<Vec<BigInt>> {
        if v.len() != self.cols {
            return Err(Error::Shape("vector length does not match columns".into()));
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    /// `I - Mᵗ`.
    pub fn id_minus_transpose(&self) -> Result<IntMatrix> {
        if !self.is_square() {
            return Err(Error::Shape("id - M^t needs a square matrix".into()));
        }
        let n = self.rows;
        let mut out = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let delta = if i == j { BigInt::one() } else { BigInt::zero() };
                out.set(i, j, delta - self.get(j, i));
            }
        }
        Ok(out)
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> Result<BigInt> {
        if !self.is_square() {
            return Err(Error::Shape("determinant of a non-square matrix".into()));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let mut a: Vec<Vec<BigInt>> = (0..n).map(|i| self.row(i).to_vec()).collect();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return Ok(BigInt::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = v / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        Ok(sign * &a[n - 1][n - 1])
    }

    /// Matrix text format: `matrix <rows> <cols>` then one row per line.
    pub fn parse_lines<'a, I>(lines: I, first_line: usize) -> Result<(Self, usize)>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut it = lines
            .into_iter()
            .enumerate()
            .map(|(k, l)| (first_line + k, strip_comment(l)))
            .filter(|(_, l)| !l.is_empty());
        let (hline, header) = it
            .next()
            .ok_or_else(|| Error::parse(first_line, "missing matrix header"))?;
        let words: Vec<&str> = header.split_whitespace().collect();
        if words.len() != 3 || words[0] != "matrix" {
            return Err(Error::parse(hline, "expected `matrix <rows> <cols>`"));
        }
        let rows: usize = words[1]
            .parse()
            .map_err(|_| Error::parse(hline, "bad row count"))?;
        let cols: usize = words[2]
            .parse()
            .map_err(|_| Error::parse(hline, "bad column count"))?;
        let mut entries = Vec::with_capacity(rows * cols);
        let mut last = hline;
        for _ in 0..rows {
            let (lineno, line) = it
                .next()
                .ok_or_else(|| Error::parse(last + 1, "missing matrix row"))?;
            last = lineno;
            let row: Vec<BigInt> = line
                .split_whitespace()
                .map(|w| w.parse::<BigInt>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::parse(lineno, "bad integer"))?;
            if row.len() != cols {
                return Err(Error::parse(lineno, format!("expected {cols} entries")));
            }
            entries.extend(row);
        }
        Ok((IntMatrix::from_entries(rows, cols, entries)?, last))
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "matrix {} {}", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

impl FromStr for IntMatrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (m, last) = IntMatrix::parse_lines(s.lines(), 1)?;
        if let Some((k, _)) = s
            .lines()
            .enumerate()
            .skip(last)
            .find(|(_, l)| !strip_comment(l).is_empty())
        {
            return Err(Error::parse(k + 1, "trailing content after matrix"));
        }
        Ok(m)
    }
}

/// `U·A·V = S` with `U`, `V` unimodular and `S` diagonal with a divisibility chain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithDecomposition {
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
    pub invariant_factors: Vec<BigInt>,
}

impl SmithDecomposition {
    /// Number of nonzero invariant factors.
    pub fn rank(&self) -> usize {
        self.invariant_factors.iter().filter(|d| !d.is_zero()).count()
    }
}

struct SnfState {
    s: IntMatrix,
    u: IntMatrix,
    v: IntMatrix,
}

impl SnfState {
    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for m in [&mut self.s, &mut self.u] {
            for j in 0..m.cols {
                m.entries.swap(a * m.cols + j, b * m.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for m in [&mut self.s, &mut self.v] {
            for i in 0..m.rows {
                m.entries.swap(i * m.cols + a, i * m.cols + b);
            }
        }
    }

    /// row[target] += factor * row[src]
    fn add_row(&mut self, target: usize, src: usize, factor: &BigInt) {
        for m in [&mut self.s, &mut self.u] {
            for j in 0..m.cols {
                let x = &m.entries[src * m.cols + j] * factor;
                m.entries[target * m.cols + j] += x;
            }
        }
    }

    /// col[target] += factor * col[src]
    fn add_col(&mut self, target: usize, src: usize, factor: &BigInt) {
        for m in [&mut self.s, &mut self.v] {
            for i in 0..m.rows {
                let x = &m.entries[i * m.cols + src] * factor;
                m.entries[i * m.cols + target] += x;
            }
        }
    }

    fn negate_row(&mut self, r: usize) {
        for m in [&mut self.s, &mut self.u] {
            for j in 0..m.cols {
                let idx = r * m.cols + j;
                m.entries[idx] = -std::mem::take(&mut m.entries[idx]);
            }
        }
    }

    /// Smallest nonzero |entry| in the trailing block, ties by row-major position.
    fn pivot(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in t..self.s.rows {
            for j in t..self.s.cols {
                let x = self.s.get(i, j);
                if x.is_zero() {
                    continue;
                }
                match best {
                    Some((bi, bj)) if self.s.get(bi, bj).abs() <= x.abs() => {}
                    _ => best = Some((i, j)),
                }
            }
        }
        best
    }
}

/// Smith normal form with unimodular transforms.
pub fn smith_normal_form(a: &IntMatrix) -> SmithDecomposition {
    let (m, n) = (a.rows, a.cols);
    let mut st = SnfState {
        s: a.clone(),
        u: IntMatrix::identity(m),
        v: IntMatrix::identity(n),
    };
    let r = m.min(n);
    for t in 0..r {
        loop {
            let Some((pi, pj)) = st.pivot(t) else { break };
            st.swap_rows(t, pi);
            st.swap_cols(t, pj);
            let p = st.s.get(t, t).clone();
            for i in t + 1..m {
                let q = st.s.get(i, t).div_floor(&p);
                if !q.is_zero() {
                    st.add_row(i, t, &-q);
                }
            }
            for j in t + 1..n {
                let q = st.s.get(t, j).div_floor(&p);
                if !q.is_zero() {
                    st.add_col(j, t, &-q);
                }
            }
            let clean = (t + 1..m).all(|i| st.s.get(i, t).is_zero())
                && (t + 1..n).all(|j| st.s.get(t, j).is_zero());
            if !clean {
                continue;
            }
            let offending = (t + 1..m)
                .flat_map(|i| (t + 1..n).map(move |j| (i, j)))
                .find(|&(i, j)| !st.s.get(i, j).is_multiple_of(&p));
            match offending {
                Some((i, _)) => st.add_row(t, i, &BigInt::one()),
                None => break,
            }
        }
        if st.s.get(t, t).is_negative() {
            st.negate_row(t);
        }
    }
    let invariant_factors = (0..r).map(|i| st.s.get(i, i).clone()).collect();
    SmithDecomposition {
        u: st.u,
        s: st.s,
        v: st.v,
        invariant_factors,
    }
}

/// Basis of the integer null space `{x : A·x = 0}`.
pub fn kernel_basis(a: &IntMatrix) -> Vec<Vec<BigInt>> {
    let snf = smith_normal_form(a);
    let rank = snf.rank();
    (rank..a.cols).map(|j| snf.v.column(j)).collect()
}

/// Sends ambient vectors to canonical cokernel coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoordinateMap {
    group: FinAbGroup,
    ambient_dim: usize,
    torsion_rows: Vec<Vec<BigInt>>,
    free_rows: Vec<Vec<BigInt>>,
}

impl CoordinateMap {
    pub fn group(&self) -> &FinAbGroup {
        &self.group
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn apply(&self, x: &[BigInt]) -> AbElement {
        let dot = |row: &Vec<BigInt>| -> BigInt { row.iter().zip(x).map(|(a, b)| a * b).sum() };
        let torsion = self.torsion_rows.iter().map(dot).collect();
        let free = self.free_rows.iter().map(dot).collect();
        self.group
            .element(torsion, free)
            .expect("coordinate lengths match the group")
    }

    /// Image of the `j`-th standard basis vector.
    pub fn basis_image(&self, j: usize) -> AbElement {
        let mut x = vec![BigInt::zero(); self.ambient_dim()];
        x[j] = BigInt::one();
        self.apply(&x)
    }
}

/// `Coker(A) = ℤ^rows / A·ℤ^cols` in invariant-factor coordinates.
pub fn cokernel(a: &IntMatrix) -> (FinAbGroup, CoordinateMap) {
    let snf = smith_normal_form(a);
    let m = a.rows;
    let mut torsion = Vec::new();
    let mut torsion_rows = Vec::new();
    let mut free_rows = Vec::new();
    for i in 0..m {
        let d = snf.invariant_factors.get(i).cloned().unwrap_or_else(BigInt::zero);
        let row = snf.u.row(i).to_vec();
        if d.is_zero() {
            free_rows.push(row);
        } else if !d.is_one() {
            torsion.push(d);
            torsion_rows.push(row);
        }
    }
    let group = FinAbGroup::new(torsion, free_rows.len()).expect("SNF yields a divisibility chain");
    let map = CoordinateMap {
        group: group.clone(),
        ambient_dim: m,
        torsion_rows,
        free_rows,
    };
    (group, map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    // Cofactor expansion along the first row; independent of Bareiss.
    fn det_oracle(a: &[Vec<i64>]) -> BigInt {
        let n = a.len();
        if n == 0 {
            return BigInt::one();
        }
        if n == 1 {
            return BigInt::from(a[0][0]);
        }
        let mut total = BigInt::zero();
        for c in 0..n {
            let minor: Vec<Vec<i64>> = a[1..]
                .iter()
                .map(|row| row.iter().enumerate().filter(|&(j, _)| j != c).map(|(_, &x)| x).collect())
                .collect();
            let term = BigInt::from(a[0][c]) * det_oracle(&minor);
            if c % 2 == 0 {
                total += term;
            } else {
                total -= term;
            }
        }
        total
    }

    fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
        if k == 0 {
            return vec![vec![]];
        }
        if n < k {
            return vec![];
        }
        let mut out = combinations(n - 1, k);
        for mut c in combinations(n - 1, k - 1) {
            c.push(n - 1);
            out.push(c);
        }
        out
    }

    // d_1 ⋯ d_k = gcd of all k×k minors.
    fn factors_by_minors(a: &[Vec<i64>], rows: usize, cols: usize) -> Vec<BigInt> {
        let mut prev = BigInt::one();
        let mut out = Vec::new();
        for k in 1..=rows.min(cols) {
            let mut g = BigInt::zero();
            for rs in combinations(rows, k) {
                for cs in combinations(cols, k) {
                    let minor: Vec<Vec<i64>> =
                        rs.iter().map(|&i| cs.iter().map(|&j| a[i][j]).collect()).collect();
                    g = g.gcd(&det_oracle(&minor));
                }
            }
            if g.is_zero() {
                out.push(BigInt::zero());
                prev = BigInt::zero();
            } else {
                out.push(&g / &prev);
                prev = g;
            }
        }
        out
    }

    #[test]
    fn id_minus_transpose_examples() {
        let m = IntMatrix::from_rows(&[vec![2]]);
        assert_eq!(m.id_minus_transpose().unwrap(), IntMatrix::from_rows(&[vec![-1]]));
        let m = IntMatrix::from_rows(&[vec![1, 1], vec![1, 2]]);
        assert_eq!(
            m.id_minus_transpose().unwrap(),
            IntMatrix::from_rows(&[vec![0, -1], vec![-1, -1]])
        );
        let m = IntMatrix::from_rows(&[vec![2, 1], vec![1, 2]]);
        assert_eq!(
            m.id_minus_transpose().unwrap(),
            IntMatrix::from_rows(&[vec![-1, -1], vec![-1, -1]])
        );
        assert!(IntMatrix::zeros(2, 3).id_minus_transpose().is_err());
    }

    #[test]
    fn determinant_examples() {
        assert_eq!(IntMatrix::identity(3).determinant().unwrap(), BigInt::one());
        let a = IntMatrix::from_rows(&[vec![0, -1], vec![-1, -1]]);
        assert_eq!(a.determinant().unwrap(), BigInt::from(-1));
        let rows = vec![vec![-1, -2, -2], vec![-1, -3, -2], vec![-1, -2, -3]];
        assert_eq!(det_oracle(&rows), BigInt::from(-1));
        assert_eq!(IntMatrix::from_rows(&rows).determinant().unwrap(), BigInt::from(-1));
        assert!(IntMatrix::zeros(1, 2).determinant().is_err());
        // zero leading pivot forces a swap
        let a = IntMatrix::from_rows(&[vec![0, 1], vec![1, 0]]);
        assert_eq!(a.determinant().unwrap(), BigInt::from(-1));
    }

    #[test]
    fn snf_examples() {
        let snf = smith_normal_form(&IntMatrix::identity(4));
        assert!(snf.invariant_factors.iter().all(One::is_one));
        let snf = smith_normal_form(&IntMatrix::from_rows(&[vec![-2]]));
        assert_eq!(snf.invariant_factors, big(&[2]));
        let a = vec![vec![0, -1], vec![-1, -1]];
        assert_eq!(factors_by_minors(&a, 2, 2), big(&[1, 1]));
        let snf = smith_normal_form(&IntMatrix::from_rows(&a));
        assert_eq!(snf.invariant_factors, big(&[1, 1]));
    }

    #[test]
    fn kernel_examples() {
        assert!(kernel_basis(&IntMatrix::from_rows(&[vec![-1]])).is_empty());
        let a = IntMatrix::from_rows(&[vec![-1, -1], vec![-1, -1]]);
        let k = kernel_basis(&a);
        assert_eq!(k.len(), 1);
        // rational row reduction: x + y = 0, so the primitive kernel vector is ±(1,-1)
        assert!(k[0] == big(&[1, -1]) || k[0] == big(&[-1, 1]));
        assert_eq!(kernel_basis(&IntMatrix::zeros(2, 2)).len(), 2);
    }

    #[test]
    fn cokernel_examples() {
        let (g, _) = cokernel(&IntMatrix::from_rows(&[vec![-1]]));
        assert!(g.is_trivial());
        let (g, map) = cokernel(&IntMatrix::from_rows(&[vec![-2]]));
        assert_eq!(g.torsion(), &big(&[2])[..]);
        assert_eq!(map.basis_image(0).torsion(), &big(&[1])[..]);
        let (g, _) = cokernel(&IntMatrix::from_rows(&[vec![-1, -1], vec![-1, -1]]));
        assert_eq!(g.free_rank(), 1);
        assert!(g.torsion().is_empty());
    }

    #[test]
    fn matrix_text_round_trip() {
        let a = IntMatrix::from_rows(&[vec![1, -2], vec![30000000000000, 0]]);
        let parsed: IntMatrix = a.to_string().parse().unwrap();
        assert_eq!(parsed, a);
        assert!("matrix 2 2\n1 2\n3\n".parse::<IntMatrix>().is_err());
        assert!("matrix 1 1\n1\n2\n".parse::<IntMatrix>().is_err());
    }

    fn check_snf(rows: &[Vec<i64>]) {
        let a = IntMatrix::from_rows(rows);
        let snf = smith_normal_form(&a);
        let uav = snf.u.mul(&a).unwrap().mul(&snf.v).unwrap();
        assert_eq!(uav, snf.s);
        assert!(snf.u.determinant().unwrap().abs().is_one());
        assert!(snf.v.determinant().unwrap().abs().is_one());
        for i in 0..a.rows() {
            for j in 0..a.cols() {
                if i != j {
                    assert!(snf.s.get(i, j).is_zero());
                }
            }
        }
        let f = &snf.invariant_factors;
        assert!(f.iter().all(|d| !d.is_negative()));
        for w in f.windows(2) {
            if w[0].is_zero() {
                assert!(w[1].is_zero());
            } else {
                assert!(w[1].is_multiple_of(&w[0]));
            }
        }
        if a.is_square() {
            let det = a.determinant().unwrap();
            if !det.is_zero() {
                assert_eq!(f.iter().product::<BigInt>(), det.abs());
            }
        }
        let kernel = kernel_basis(&a);
        assert_eq!(kernel.len(), a.cols() - snf.rank());
        for v in &kernel {
            assert!(a.mul_vec(v).unwrap().iter().all(Zero::is_zero));
        }
    }

    fn matrix_strategy(max_dim: usize, bound: i64) -> impl Strategy<Value = Vec<Vec<i64>>> {
        (1..=max_dim, 1..=max_dim).prop_flat_map(move |(r, c)| {
            proptest::collection::vec(proptest::collection::vec(-bound..=bound, c), r)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn snf_properties(rows in matrix_strategy(5, 9)) {
            check_snf(&rows);
        }

        #[test]
        fn snf_matches_minors(rows in matrix_strategy(3, 3)) {
            let r = rows.len();
            let c = rows[0].len();
            let snf = smith_normal_form(&IntMatrix::from_rows(&rows));
            prop_assert_eq!(snf.invariant_factors, factors_by_minors(&rows, r, c));
        }

        #[test]
        fn determinant_matches_cofactors(n in 1usize..=5, seed in proptest::collection::vec(-9i64..=9, 25)) {
            let rows: Vec<Vec<i64>> = (0..n).map(|i| seed[i * n..(i + 1) * n].to_vec()).collect();
            prop_assert_eq!(IntMatrix::from_rows(&rows).determinant().unwrap(), det_oracle(&rows));
        }

        #[test]
        fn determinant_is_multiplicative(n in 1usize..=4,
            a in proptest::collection::vec(-9i64..=9, 16),
            b in proptest::collection::vec(-9i64..=9, 16)) {
            let ma = IntMatrix::from_rows(&(0..n).map(|i| a[i * n..(i + 1) * n].to_vec()).collect::<Vec<_>>());
            let mb = IntMatrix::from_rows(&(0..n).map(|i| b[i * n..(i + 1) * n].to_vec()).collect::<Vec<_>>());
            let prod = ma.mul(&mb).unwrap();
            prop_assert_eq!(prod.determinant().unwrap(),
                ma.determinant().unwrap() * mb.determinant().unwrap());
        }
    }
}
