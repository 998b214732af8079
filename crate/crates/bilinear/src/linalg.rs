//! Exact vectors, matrices, row reduction, linear-system solving and
//! subspace algebra over any supported field.

use crate::error::{Error, Result};
use crate::field::{FieldSpec, Scalar};

/// A coordinate vector over some space's distinguished basis.
pub type Vector = Vec<Scalar>;

pub fn vec_add(a: &[Scalar], b: &[Scalar]) -> Vector {
    assert_eq!(a.len(), b.len(), "vector lengths must agree");
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn vec_sub(a: &[Scalar], b: &[Scalar]) -> Vector {
    assert_eq!(a.len(), b.len(), "vector lengths must agree");
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn vec_scale(c: &Scalar, a: &[Scalar]) -> Vector {
    a.iter().map(|x| c * x).collect()
}

pub fn vec_is_zero(a: &[Scalar]) -> bool {
    a.iter().all(Scalar::is_zero)
}

pub fn zero_vector(spec: FieldSpec, len: usize) -> Vector {
    vec![spec.zero(); len]
}

pub fn unit_vector(spec: FieldSpec, len: usize, i: usize) -> Vector {
    let mut v = zero_vector(spec, len);
    v[i] = spec.one();
    v
}

/// Indices of the greedy-leftmost maximal independent subfamily: vector `i`
/// is picked iff it is not in the span of vectors `0..i`.
pub fn greedy_independent_positions(
    spec: FieldSpec,
    ambient: usize,
    vectors: &[Vector],
) -> Vec<usize> {
    let mut picked = Vec::new();
    let mut rows: Vec<Vector> = Vec::new();
    let mut rank = 0;
    for (i, v) in vectors.iter().enumerate() {
        rows.push(v.clone());
        let new_rank = Matrix::from_rows(spec, ambient, &rows)
            .expect("vectors share the ambient length")
            .rank();
        if new_rank > rank {
            rank = new_rank;
            picked.push(i);
        } else {
            rows.pop();
        }
    }
    picked
}

/// Iterator over all vectors of a given length over a finite field, in
/// little-endian counting order (first coordinate varies fastest).
pub fn enumerate_vectors(spec: FieldSpec, len: usize) -> Result<VectorEnumerator> {
    let p = spec.characteristic().ok_or(Error::InfiniteField)?;
    Ok(VectorEnumerator {
        spec,
        p,
        counter: vec![0; len],
        done: false,
    })
}

pub struct VectorEnumerator {
    spec: FieldSpec,
    p: u64,
    counter: Vec<u64>,
    done: bool,
}

impl Iterator for VectorEnumerator {
    type Item = Vector;

    fn next(&mut self) -> Option<Vector> {
        if self.done {
            return None;
        }
        let v: Vector = self
            .counter
            .iter()
            .map(|&c| self.spec.from_i64(c as i64))
            .collect();
        let mut i = 0;
        loop {
            if i == self.counter.len() {
                self.done = true;
                break;
            }
            self.counter[i] += 1;
            if self.counter[i] < self.p {
                break;
            }
            self.counter[i] = 0;
            i += 1;
        }
        Some(v)
    }
}

/// Dense row-major matrix with all entries in one field.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matrix {
    spec: FieldSpec,
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(spec: FieldSpec, rows: usize, cols: usize) -> Matrix {
        Matrix {
            spec,
            rows,
            cols,
            data: vec![spec.zero(); rows * cols],
        }
    }

    pub fn identity(spec: FieldSpec, n: usize) -> Matrix {
        let mut m = Matrix::zeros(spec, n, n);
        for i in 0..n {
            m.set(i, i, spec.one());
        }
        m
    }

    pub fn from_rows(spec: FieldSpec, cols: usize, rows: &[Vector]) -> Result<Matrix> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch);
            }
            for s in r {
                if s.spec() != spec {
                    return Err(Error::FieldMismatch);
                }
                data.push(s.clone());
            }
        }
        Ok(Matrix {
            spec,
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn from_cols(spec: FieldSpec, rows: usize, cols: &[Vector]) -> Result<Matrix> {
        Matrix::from_rows(spec, rows, cols).map(|m| m.transpose())
    }

    pub fn from_fn(
        spec: FieldSpec,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> Scalar,
    ) -> Matrix {
        let mut m = Matrix::zeros(spec, rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &Scalar {
        assert!(i < self.rows && j < self.cols, "matrix index out of range");
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, s: Scalar) {
        assert!(i < self.rows && j < self.cols, "matrix index out of range");
        assert!(s.spec() == self.spec, "entry from the matrix field");
        self.data[i * self.cols + j] = s;
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vectors(&self) -> Vec<Vector> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn col(&self, j: usize) -> Vector {
        (0..self.rows).map(|i| self.at(i, j).clone()).collect()
    }

    pub fn col_vectors(&self) -> Vec<Vector> {
        (0..self.cols).map(|j| self.col(j)).collect()
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.spec, self.cols, self.rows, |i, j| self.at(j, i).clone())
    }

    pub fn mul(&self, rhs: &Matrix) -> Result<Matrix> {
        if self.spec != rhs.spec {
            return Err(Error::FieldMismatch);
        }
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch);
        }
        let mut out = Matrix::zeros(self.spec, self.rows, rhs.cols);
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                let mut acc = self.spec.zero();
                for k in 0..self.cols {
                    let s = self.at(i, k).checked_mul(rhs.at(k, j))?;
                    acc = acc.checked_add(&s)?;
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    /// Matrix-vector product (vector as a column).
    pub fn apply(&self, v: &[Scalar]) -> Result<Vector> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch);
        }
        let mut out = zero_vector(self.spec, self.rows);
        for i in 0..self.rows {
            let mut acc = self.spec.zero();
            for (k, x) in v.iter().enumerate() {
                acc = acc.checked_add(&self.at(i, k).checked_mul(x)?)?;
            }
            out[i] = acc;
        }
        Ok(out)
    }

    pub fn vcat(&self, below: &Matrix) -> Result<Matrix> {
        if self.spec != below.spec || self.cols != below.cols {
            return Err(Error::DimensionMismatch);
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&below.data);
        Ok(Matrix {
            spec: self.spec,
            rows: self.rows + below.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn hcat(&self, right: &Matrix) -> Result<Matrix> {
        if self.spec != right.spec || self.rows != right.rows {
            return Err(Error::DimensionMismatch);
        }
        let mut out = Matrix::zeros(self.spec, self.rows, self.cols + right.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.at(i, j).clone());
            }
            for j in 0..right.cols {
                out.set(i, self.cols + j, right.at(i, j).clone());
            }
        }
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    /// Reduced row echelon form together with the pivot column indices.
    /// The RREF is canonical: two matrices have equal row space iff their
    /// RREFs (with zero rows dropped) coincide.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0usize;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(pr) = (r..m.rows).find(|&i| !m.at(i, c).is_zero()) else {
                continue;
            };
            if pr != r {
                for j in 0..m.cols {
                    let a = m.at(r, j).clone();
                    let b = m.at(pr, j).clone();
                    m.set(r, j, b);
                    m.set(pr, j, a);
                }
            }
            let inv = m.at(r, c).inv().expect("pivot is nonzero");
            for j in 0..m.cols {
                let s = m.at(r, j) * &inv;
                m.set(r, j, s);
            }
            for i in 0..m.rows {
                if i != r && !m.at(i, c).is_zero() {
                    let factor = m.at(i, c).clone();
                    for j in 0..m.cols {
                        let s = m.at(i, j) - &(&factor * m.at(r, j));
                        m.set(i, j, s);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Canonical basis of the right kernel, one vector per free column.
    pub fn kernel_basis(&self) -> Vec<Vector> {
        let (r, pivots) = self.rref();
        let mut basis = Vec::new();
        let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
        for free in 0..self.cols {
            if pivot_set.contains(&free) {
                continue;
            }
            let mut v = zero_vector(self.spec, self.cols);
            v[free] = self.spec.one();
            for (row, &p) in pivots.iter().enumerate() {
                v[p] = -r.at(row, free);
            }
            basis.push(v);
        }
        basis
    }

    pub fn inverse(&self) -> Option<Matrix> {
        if self.rows != self.cols {
            return None;
        }
        let aug = self
            .hcat(&Matrix::identity(self.spec, self.rows))
            .expect("same row count");
        let (r, pivots) = aug.rref();
        if pivots.len() != self.rows || pivots.iter().any(|&p| p >= self.cols) {
            return None;
        }
        let mut inv = Matrix::zeros(self.spec, self.rows, self.rows);
        for i in 0..self.rows {
            for j in 0..self.rows {
                inv.set(i, j, r.at(i, self.cols + j).clone());
            }
        }
        Some(inv)
    }
}

impl std::fmt::Display for Matrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for i in 0..self.rows {
            let line: Vec<String> = self.row(i).iter().map(|s| s.to_string()).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

/// The full solution set of a linear system `A x = b`: one particular
/// solution (when consistent) plus a basis of the homogeneous solutions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineSolutionSet {
    pub consistent: bool,
    pub particular: Option<Vector>,
    pub basis: Vec<Vector>,
}

impl AffineSolutionSet {
    /// The value of coordinate `i` if it is the same on every solution,
    /// i.e. if coordinate `i` of every homogeneous basis vector vanishes.
    pub fn determined_coordinate(&self, i: usize) -> Result<Option<Scalar>> {
        if !self.consistent {
            return Err(Error::Inconsistent);
        }
        let particular = self.particular.as_ref().expect("consistent systems carry one");
        if self.basis.iter().all(|v| v[i].is_zero()) {
            Ok(Some(particular[i].clone()))
        } else {
            Ok(None)
        }
    }
}

/// Solve `A x = b` exactly.
pub fn solve(a: &Matrix, b: &[Scalar]) -> Result<AffineSolutionSet> {
    if b.len() != a.rows() {
        return Err(Error::DimensionMismatch);
    }
    let rhs = Matrix::from_cols(a.spec(), b.len(), &[b.to_vec()])?;
    let aug = a.hcat(&rhs)?;
    let (r, pivots) = aug.rref();
    if pivots.iter().any(|&p| p == a.cols()) {
        return Ok(AffineSolutionSet {
            consistent: false,
            particular: None,
            basis: a.kernel_basis(),
        });
    }
    let mut particular = zero_vector(a.spec(), a.cols());
    for (row, &p) in pivots.iter().enumerate() {
        particular[p] = r.at(row, a.cols()).clone();
    }
    Ok(AffineSolutionSet {
        consistent: true,
        particular: Some(particular),
        basis: a.kernel_basis(),
    })
}

/// A subspace of K^n stored as its canonical RREF basis, so structural
/// equality is equality of subspaces.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace {
    spec: FieldSpec,
    ambient: usize,
    basis: Matrix,
}

impl Subspace {
    pub fn zero(spec: FieldSpec, ambient: usize) -> Subspace {
        Subspace {
            spec,
            ambient,
            basis: Matrix::zeros(spec, 0, ambient),
        }
    }

    pub fn full(spec: FieldSpec, ambient: usize) -> Subspace {
        Subspace::span(spec, ambient, &Matrix::identity(spec, ambient).row_vectors())
            .expect("identity rows fit")
    }

    /// The row space of the given vectors.
    pub fn span(spec: FieldSpec, ambient: usize, vectors: &[Vector]) -> Result<Subspace> {
        let m = Matrix::from_rows(spec, ambient, vectors)?;
        let (r, pivots) = m.rref();
        let basis = Matrix::from_rows(
            spec,
            ambient,
            &(0..pivots.len()).map(|i| r.row(i).to_vec()).collect::<Vec<_>>(),
        )?;
        Ok(Subspace {
            spec,
            ambient,
            basis,
        })
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn basis_vectors(&self) -> Vec<Vector> {
        self.basis.row_vectors()
    }

    pub fn basis_matrix(&self) -> &Matrix {
        &self.basis
    }

    /// Pivot columns of the canonical basis.
    pub fn pivots(&self) -> Vec<usize> {
        self.basis.rref().1
    }

    pub fn contains_vector(&self, v: &[Scalar]) -> Result<bool> {
        if v.len() != self.ambient {
            return Err(Error::AmbientMismatch);
        }
        let mut rows = self.basis.row_vectors();
        rows.push(v.to_vec());
        let m = Matrix::from_rows(self.spec, self.ambient, &rows)?;
        Ok(m.rank() == self.dim())
    }

    pub fn contains(&self, other: &Subspace) -> Result<bool> {
        for v in other.basis_vectors() {
            if !self.contains_vector(&v)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        if self.ambient != other.ambient || self.spec != other.spec {
            return Err(Error::AmbientMismatch);
        }
        let mut rows = self.basis.row_vectors();
        rows.extend(other.basis_vectors());
        Subspace::span(self.spec, self.ambient, &rows)
    }

    /// Intersection via the kernel method: solutions of
    /// `U^T u = V^T v` give the common vectors.
    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        if self.ambient != other.ambient || self.spec != other.spec {
            return Err(Error::AmbientMismatch);
        }
        let ut = self.basis.transpose();
        let vt_neg = Matrix::from_fn(self.spec, self.ambient, other.dim(), |i, j| {
            -other.basis.at(j, i)
        });
        let m = ut.hcat(&vt_neg)?;
        let mut vectors = Vec::new();
        for k in m.kernel_basis() {
            let u_part = &k[..self.dim()];
            let x = self.basis.transpose().apply(u_part)?;
            vectors.push(x);
        }
        Subspace::span(self.spec, self.ambient, &vectors)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;

    fn q() -> FieldSpec {
        FieldSpec::rationals()
    }

    fn gf(p: u64) -> FieldSpec {
        FieldSpec::prime_field(p).unwrap()
    }

    fn qmat(rows: &[&[i64]]) -> Matrix {
        let cols = rows.first().map_or(0, |r| r.len());
        let vs: Vec<Vector> = rows
            .iter()
            .map(|r| r.iter().map(|&x| q().from_i64(x)).collect())
            .collect();
        Matrix::from_rows(q(), cols, &vs).unwrap()
    }

    fn fmat(p: u64, rows: &[&[i64]]) -> Matrix {
        let cols = rows.first().map_or(0, |r| r.len());
        let vs: Vec<Vector> = rows
            .iter()
            .map(|r| r.iter().map(|&x| gf(p).from_i64(x)).collect())
            .collect();
        Matrix::from_rows(gf(p), cols, &vs).unwrap()
    }

    #[test]
    fn rref_examples() {
        let (r, pivots) = qmat(&[&[2, 4], &[1, 2]]).rref();
        assert_eq!(r, qmat(&[&[1, 2], &[0, 0]]));
        assert_eq!(pivots, vec![0]);

        let id = Matrix::identity(q(), 3);
        let (r, pivots) = id.rref();
        assert_eq!(r, Matrix::identity(q(), 3));
        assert_eq!(pivots, vec![0, 1, 2]);

        let (r, pivots) = fmat(2, &[&[1, 1], &[1, 0]]).rref();
        assert_eq!(r, Matrix::identity(gf(2), 2));
        assert_eq!(pivots, vec![0, 1]);
    }

    #[test]
    fn solve_over_gf2_matches_enumeration() {
        // x + y = 1 over GF(2)
        let a = fmat(2, &[&[1, 1]]);
        let b = vec![gf(2).one()];
        let sol = solve(&a, &b).unwrap();
        assert!(sol.consistent);
        assert_eq!(sol.particular, Some(vec![gf(2).one(), gf(2).zero()]));
        assert_eq!(sol.basis, vec![vec![gf(2).one(), gf(2).one()]]);

        // oracle: enumerate all 4 vectors
        let mut brute = Vec::new();
        for v in enumerate_vectors(gf(2), 2).unwrap() {
            if a.apply(&v).unwrap() == b {
                brute.push(v);
            }
        }
        let mut from_set = Vec::new();
        let p = sol.particular.clone().unwrap();
        for coeffs in enumerate_vectors(gf(2), sol.basis.len()).unwrap() {
            let mut v = p.clone();
            for (c, bv) in coeffs.iter().zip(&sol.basis) {
                v = vec_add(&v, &vec_scale(c, bv));
            }
            from_set.push(v);
        }
        brute.sort();
        from_set.sort();
        from_set.dedup();
        assert_eq!(brute, from_set);
    }

    #[test]
    fn solve_inconsistent_and_empty() {
        // 0 x = 1 is inconsistent
        let a = qmat(&[&[0]]);
        let sol = solve(&a, &[q().one()]).unwrap();
        assert!(!sol.consistent);
        assert!(sol.particular.is_none());

        // empty system with 2 unknowns
        let a = Matrix::zeros(q(), 0, 2);
        let sol = solve(&a, &[]).unwrap();
        assert!(sol.consistent);
        assert_eq!(sol.particular, Some(zero_vector(q(), 2)));
        assert_eq!(
            sol.basis,
            vec![unit_vector(q(), 2, 0), unit_vector(q(), 2, 1)]
        );
    }

    #[test]
    fn determined_coordinate_examples() {
        // { u12 - u13 = 0, u13 = 5 } over Q, unknowns (u12, u13)
        let a = qmat(&[&[1, -1], &[0, 1]]);
        let b = vec![q().zero(), q().from_i64(5)];
        let sol = solve(&a, &b).unwrap();
        assert_eq!(sol.determined_coordinate(0).unwrap(), Some(q().from_i64(5)));

        // empty system: nothing is forced
        let a = Matrix::zeros(q(), 0, 2);
        let sol = solve(&a, &[]).unwrap();
        assert_eq!(sol.determined_coordinate(0).unwrap(), None);

        // { u12 = 1 }
        let a = qmat(&[&[1]]);
        let sol = solve(&a, &[q().one()]).unwrap();
        assert_eq!(sol.determined_coordinate(0).unwrap(), Some(q().one()));

        // inconsistent input is rejected
        let a = qmat(&[&[0]]);
        let sol = solve(&a, &[q().one()]).unwrap();
        assert_eq!(sol.determined_coordinate(0).unwrap_err(), Error::Inconsistent);
    }

    fn e(spec: FieldSpec, n: usize, i: usize) -> Vector {
        unit_vector(spec, n, i)
    }

    #[test]
    fn subspace_examples() {
        // span{e1} ∩ span{e2} = 0 in Q^3
        let u = Subspace::span(q(), 3, &[e(q(), 3, 0)]).unwrap();
        let v = Subspace::span(q(), 3, &[e(q(), 3, 1)]).unwrap();
        assert_eq!(u.intersect(&v).unwrap(), Subspace::zero(q(), 3));

        // span{e1+e2, e2} + span{e3} = Q^3
        let w = Subspace::span(
            q(),
            3,
            &[vec_add(&e(q(), 3, 0), &e(q(), 3, 1)), e(q(), 3, 1)],
        )
        .unwrap();
        let z = Subspace::span(q(), 3, &[e(q(), 3, 2)]).unwrap();
        assert_eq!(w.sum(&z).unwrap(), Subspace::full(q(), 3));

        // span{e1+e3} ∩ span{e2+e3, e3} = 0 in GF(2)^3; oracle enumerates all 8
        let spec = gf(2);
        let u = Subspace::span(spec, 3, &[vec_add(&e(spec, 3, 0), &e(spec, 3, 2))]).unwrap();
        let v = Subspace::span(
            spec,
            3,
            &[vec_add(&e(spec, 3, 1), &e(spec, 3, 2)), e(spec, 3, 2)],
        )
        .unwrap();
        let inter = u.intersect(&v).unwrap();
        assert_eq!(inter, Subspace::zero(spec, 3));
        for w in enumerate_vectors(spec, 3).unwrap() {
            let in_both = u.contains_vector(&w).unwrap() && v.contains_vector(&w).unwrap();
            assert_eq!(in_both, vec_is_zero(&w));
        }
    }

    #[test]
    fn solution_sets_match_brute_force_on_small_systems() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        for spec in [gf(2), gf(3)] {
            for _ in 0..200 {
                let unknowns = rng.gen_range(1..=4);
                let eqs = rng.gen_range(0..=4);
                let rows: Vec<Vector> = (0..eqs)
                    .map(|_| crate::sample::vector(&mut rng, spec, unknowns))
                    .collect();
                let a = Matrix::from_rows(spec, unknowns, &rows).unwrap();
                let b = crate::sample::vector(&mut rng, spec, eqs);
                let sol = solve(&a, &b).unwrap();

                let mut brute: Vec<Vector> = Vec::new();
                for v in enumerate_vectors(spec, unknowns).unwrap() {
                    if a.apply(&v).unwrap() == b {
                        brute.push(v);
                    }
                }
                if !sol.consistent {
                    assert!(brute.is_empty());
                    continue;
                }
                let mut derived: Vec<Vector> = Vec::new();
                let p = sol.particular.clone().unwrap();
                for coeffs in enumerate_vectors(spec, sol.basis.len()).unwrap() {
                    let mut v = p.clone();
                    for (c, bv) in coeffs.iter().zip(&sol.basis) {
                        v = vec_add(&v, &vec_scale(c, bv));
                    }
                    derived.push(v);
                }
                brute.sort();
                derived.sort();
                derived.dedup();
                assert_eq!(brute, derived);
            }
        }
    }

    #[test]
    fn rank_nullity_on_random_matrices() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(22);
        for i in 0..1000 {
            let spec = match i % 3 {
                0 => q(),
                1 => gf(2),
                _ => gf(5),
            };
            let rows = rng.gen_range(0..=5);
            let cols = rng.gen_range(1..=5);
            let data: Vec<Vector> = (0..rows)
                .map(|_| crate::sample::vector(&mut rng, spec, cols))
                .collect();
            let m = Matrix::from_rows(spec, cols, &data).unwrap();
            assert_eq!(m.cols(), m.rank() + m.kernel_basis().len());
        }
    }

    #[test]
    fn subspace_algebra_laws_on_random_triples() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        for _ in 0..300 {
            let spec = if rng.gen_bool(0.5) { gf(2) } else { gf(3) };
            let n = rng.gen_range(1..=4);
            let mk = |rng: &mut rand_chacha::ChaCha8Rng| {
                let k = rng.gen_range(0..=n);
                let vs = crate::sample::tuple(rng, spec, n, k);
                Subspace::span(spec, n, &vs).unwrap()
            };
            let u = mk(&mut rng);
            let v = mk(&mut rng);
            let w = mk(&mut rng);

            // commutativity
            assert_eq!(u.sum(&v).unwrap(), v.sum(&u).unwrap());
            assert_eq!(u.intersect(&v).unwrap(), v.intersect(&u).unwrap());
            // dimension formula
            let dim_sum = u.sum(&v).unwrap().dim() + u.intersect(&v).unwrap().dim();
            assert_eq!(dim_sum, u.dim() + v.dim());
            // monotonicity
            assert!(u.sum(&w).unwrap().contains(&u).unwrap());
            assert!(u.contains(&u.intersect(&w).unwrap()).unwrap());
            // equality is an equivalence: reflexive + symmetric via structural eq
            assert_eq!(u, u);
            if u == v && v == w {
                assert_eq!(u, w);
            }
        }
    }
}
