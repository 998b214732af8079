//! Bilinear spaces as Gram matrices with a flavor, bilinear maps between
//! them, radicals and non-degenerate completion.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{FieldSpec, Scalar};
use crate::linalg::{Matrix, Subspace, Vector};

/// Which theory of bilinear forms a space belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Flavor {
    Plain,
    Symmetric,
    Alternating,
}

impl Flavor {
    pub fn name(&self) -> &'static str {
        match self {
            Flavor::Plain => "plain",
            Flavor::Symmetric => "symmetric",
            Flavor::Alternating => "alternating",
        }
    }

    pub fn parse(text: &str) -> Result<Flavor> {
        match text {
            "plain" => Ok(Flavor::Plain),
            "symmetric" => Ok(Flavor::Symmetric),
            "alternating" => Ok(Flavor::Alternating),
            _ => Err(Error::Parse {
                pos: 0,
                expected: "plain|symmetric|alternating".into(),
            }),
        }
    }
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// A finite-dimensional bilinear space: a field, a flavor and the Gram
/// matrix of the form on the distinguished basis. Entry (i, j) is the
/// product of basis vectors i and j; the form on arbitrary vectors is the
/// bilinear extension.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BilinearSpace {
    flavor: Flavor,
    gram: Matrix,
}

impl BilinearSpace {
    /// Validate flavor constraints and wrap the Gram matrix.
    pub fn from_gram(flavor: Flavor, gram: Matrix) -> Result<BilinearSpace> {
        if gram.rows() != gram.cols() {
            return Err(Error::DimensionMismatch);
        }
        let n = gram.rows();
        match flavor {
            Flavor::Plain => {}
            Flavor::Symmetric => {
                for i in 0..n {
                    for j in i + 1..n {
                        if gram.at(i, j) != gram.at(j, i) {
                            return Err(Error::FlavorViolation { row: i, col: j });
                        }
                    }
                }
            }
            Flavor::Alternating => {
                // In characteristic 2 the zero diagonal is the stronger
                // condition; both checks always run.
                for i in 0..n {
                    if !gram.at(i, i).is_zero() {
                        return Err(Error::FlavorViolation { row: i, col: i });
                    }
                    for j in i + 1..n {
                        if *gram.at(i, j) != -gram.at(j, i) {
                            return Err(Error::FlavorViolation { row: i, col: j });
                        }
                    }
                }
            }
        }
        Ok(BilinearSpace { flavor, gram })
    }

    /// The zero form of the given dimension.
    pub fn zero_form(spec: FieldSpec, flavor: Flavor, dim: usize) -> BilinearSpace {
        BilinearSpace {
            flavor,
            gram: Matrix::zeros(spec, dim, dim),
        }
    }

    pub fn spec(&self) -> FieldSpec {
        self.gram.spec()
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn dim(&self) -> usize {
        self.gram.rows()
    }

    pub fn gram(&self) -> &Matrix {
        &self.gram
    }

    /// The form on two coordinate vectors: `u^T G v`.
    pub fn form(&self, u: &[Scalar], v: &[Scalar]) -> Result<Scalar> {
        if u.len() != self.dim() || v.len() != self.dim() {
            return Err(Error::DimensionMismatch);
        }
        let gv = self.gram.apply(v)?;
        let mut acc = self.spec().zero();
        for (x, y) in u.iter().zip(&gv) {
            acc = acc.checked_add(&x.checked_mul(y)?)?;
        }
        Ok(acc)
    }

    /// Left radical: vectors pairing to zero against everything on the
    /// right, i.e. the kernel of `v -> v^T G`. Right radical: kernel of G.
    pub fn radical(&self, side: Side) -> Subspace {
        let m = match side {
            Side::Left => self.gram.transpose(),
            Side::Right => self.gram.clone(),
        };
        Subspace::span(self.spec(), self.dim(), &m.kernel_basis())
            .expect("kernel vectors have ambient length")
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.radical(Side::Left).dim() == 0 && self.radical(Side::Right).dim() == 0
    }

    /// Block-diagonal sum; all cross products are zero.
    pub fn direct_sum(&self, other: &BilinearSpace) -> Result<BilinearSpace> {
        if self.spec() != other.spec() {
            return Err(Error::FieldMismatch);
        }
        if self.flavor != other.flavor {
            return Err(Error::FlavorMismatch);
        }
        let n = self.dim();
        let m = other.dim();
        let gram = Matrix::from_fn(self.spec(), n + m, n + m, |i, j| {
            if i < n && j < n {
                self.gram.at(i, j).clone()
            } else if i >= n && j >= n {
                other.gram.at(i - n, j - n).clone()
            } else {
                self.spec().zero()
            }
        });
        BilinearSpace::from_gram(self.flavor, gram)
    }

    /// Embed into a non-degenerate space by adjoining, per round, one dual
    /// vector for each basis vector of the sum of the two radicals, paired
    /// on both sides and orthogonal to everything else. Repeats until both
    /// radicals vanish, within a dimension budget of four times the input.
    pub fn nondegenerate_closure(&self) -> Result<(BilinearSpace, BilMap)> {
        let budget = 4 * self.dim();
        let mut w = self.clone();
        loop {
            let rad = w.radical(Side::Left).sum(&w.radical(Side::Right))?;
            if rad.dim() == 0 {
                break;
            }
            w = w.extend_with_duals(&rad)?;
            if w.dim() > budget.max(self.dim()) {
                return Err(Error::ClosureBudgetExceeded);
            }
        }
        let inclusion = BilMap::new(
            self.clone(),
            w.clone(),
            Matrix::from_fn(self.spec(), w.dim(), self.dim(), |i, j| {
                if i == j {
                    self.spec().one()
                } else {
                    self.spec().zero()
                }
            }),
        )?;
        Ok((w, inclusion))
    }

    fn extend_with_duals(&self, rad: &Subspace) -> Result<BilinearSpace> {
        let n = self.dim();
        let k = rad.dim();
        let pivots = rad.pivots();
        let spec = self.spec();
        let one = spec.one();
        let pair_back = match self.flavor {
            Flavor::Alternating => spec.from_i64(-1),
            _ => spec.one(),
        };
        let gram = Matrix::from_fn(spec, n + k, n + k, |i, j| {
            if i < n && j < n {
                self.gram.at(i, j).clone()
            } else if i < n && j >= n {
                // column of the dual for radical basis vector j - n
                if i == pivots[j - n] {
                    one.clone()
                } else {
                    spec.zero()
                }
            } else if i >= n && j < n {
                if j == pivots[i - n] {
                    pair_back.clone()
                } else {
                    spec.zero()
                }
            } else {
                spec.zero()
            }
        });
        BilinearSpace::from_gram(self.flavor, gram)
    }
}

impl fmt::Display for BilinearSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_space(self))
    }
}

/// A linear map between bilinear spaces; columns of `matrix` are the images
/// of the source basis in target coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BilMap {
    source: BilinearSpace,
    target: BilinearSpace,
    matrix: Matrix,
}

impl BilMap {
    pub fn new(source: BilinearSpace, target: BilinearSpace, matrix: Matrix) -> Result<BilMap> {
        if matrix.rows() != target.dim() || matrix.cols() != source.dim() {
            return Err(Error::DimensionMismatch);
        }
        if source.spec() != target.spec() || matrix.spec() != source.spec() {
            return Err(Error::FieldMismatch);
        }
        if source.flavor() != target.flavor() {
            return Err(Error::FlavorMismatch);
        }
        Ok(BilMap {
            source,
            target,
            matrix,
        })
    }

    pub fn identity(space: &BilinearSpace) -> BilMap {
        BilMap {
            source: space.clone(),
            target: space.clone(),
            matrix: Matrix::identity(space.spec(), space.dim()),
        }
    }

    pub fn source(&self) -> &BilinearSpace {
        &self.source
    }

    pub fn target(&self) -> &BilinearSpace {
        &self.target
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn apply(&self, v: &[Scalar]) -> Result<Vector> {
        self.matrix.apply(v)
    }

    /// `self` after `earlier`.
    pub fn compose(&self, earlier: &BilMap) -> Result<BilMap> {
        if earlier.target != self.source {
            return Err(Error::PreconditionFailed(
                "composition requires matching middle space".into(),
            ));
        }
        BilMap::new(
            earlier.source.clone(),
            self.target.clone(),
            self.matrix.mul(&earlier.matrix)?,
        )
    }

    /// `None` when the map is a bilinear monomorphism; otherwise a report of
    /// the first violation found.
    pub fn monomorphism_violation(&self) -> Option<String> {
        if self.matrix.rank() != self.source.dim() {
            return Some("matrix does not have full column rank".into());
        }
        let pulled = self
            .matrix
            .transpose()
            .mul(self.target.gram())
            .and_then(|m| m.mul(&self.matrix))
            .expect("dimensions agree by construction");
        for i in 0..self.source.dim() {
            for j in 0..self.source.dim() {
                if pulled.at(i, j) != self.source.gram().at(i, j) {
                    return Some(format!(
                        "form not preserved on basis pair ({i}, {j}): {} vs {}",
                        pulled.at(i, j),
                        self.source.gram().at(i, j)
                    ));
                }
            }
        }
        None
    }

    pub fn is_monomorphism(&self) -> bool {
        self.monomorphism_violation().is_none()
    }
}

/// Iterator over all flavor-consistent Gram matrices of a given dimension
/// over a finite field.
pub fn enumerate_grams(
    spec: FieldSpec,
    flavor: Flavor,
    dim: usize,
) -> Result<impl Iterator<Item = Matrix>> {
    spec.characteristic().ok_or(Error::InfiniteField)?;
    // Free entry positions; remaining entries follow from the flavor.
    let free: Vec<(usize, usize)> = match flavor {
        Flavor::Plain => (0..dim)
            .flat_map(|i| (0..dim).map(move |j| (i, j)))
            .collect(),
        Flavor::Symmetric => (0..dim)
            .flat_map(|i| (i..dim).map(move |j| (i, j)))
            .collect(),
        Flavor::Alternating => (0..dim)
            .flat_map(|i| (i + 1..dim).map(move |j| (i, j)))
            .collect(),
    };
    let values = crate::linalg::enumerate_vectors(spec, free.len())?;
    Ok(values.map(move |entries| {
        let mut g = Matrix::zeros(spec, dim, dim);
        for ((i, j), v) in free.iter().zip(entries) {
            match flavor {
                Flavor::Plain => g.set(*i, *j, v),
                Flavor::Symmetric => {
                    g.set(*j, *i, v.clone());
                    g.set(*i, *j, v);
                }
                Flavor::Alternating => {
                    g.set(*j, *i, v.checked_neg().unwrap());
                    g.set(*i, *j, v);
                }
            }
        }
        g
    }))
}

/// Iterator over all flavor-consistent spaces of a given dimension over a
/// finite field.
pub fn enumerate_spaces(
    spec: FieldSpec,
    flavor: Flavor,
    dim: usize,
) -> Result<impl Iterator<Item = BilinearSpace>> {
    Ok(enumerate_grams(spec, flavor, dim)?
        .map(move |g| BilinearSpace::from_gram(flavor, g).expect("enumerated gram is consistent")))
}

// ---------------------------------------------------------------------------
// space file format
//
//   field Q | field GF <p> | field QSQRT <d>
//   flavor plain|symmetric|alternating
//   dim <n>
//   gram
//   <n lines, each n scalars separated by single spaces>
// ---------------------------------------------------------------------------

pub fn format_space(space: &BilinearSpace) -> String {
    let field_line = if let Some(p) = space.spec().characteristic() {
        format!("field GF {p}")
    } else if let Some(d) = space.spec().radicand() {
        format!("field QSQRT {d}")
    } else {
        "field Q".to_string()
    };
    let mut out = String::new();
    out.push_str(&field_line);
    out.push('\n');
    out.push_str(&format!("flavor {}\n", space.flavor()));
    out.push_str(&format!("dim {}\n", space.dim()));
    out.push_str("gram\n");
    for i in 0..space.dim() {
        let line: Vec<String> = space.gram().row(i).iter().map(|s| s.to_string()).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

/// Parse a space file. Also usable on a line iterator so composite files can
/// embed space blocks.
pub fn parse_space(text: &str) -> Result<BilinearSpace> {
    let mut lines = text.lines();
    let space = parse_space_block(&mut lines)?;
    for rest in lines {
        if !rest.trim().is_empty() {
            return Err(Error::Parse {
                pos: 0,
                expected: "end of space file".into(),
            });
        }
    }
    Ok(space)
}

pub fn parse_space_block<'a>(lines: &mut impl Iterator<Item = &'a str>) -> Result<BilinearSpace> {
    let field_line = next_nonempty(lines)?;
    let spec = parse_field_line(field_line)?;
    let flavor_line = next_nonempty(lines)?;
    let flavor = match flavor_line.strip_prefix("flavor ") {
        Some(rest) => Flavor::parse(rest.trim())?,
        None => {
            return Err(Error::Parse {
                pos: 0,
                expected: "`flavor <name>`".into(),
            })
        }
    };
    let dim_line = next_nonempty(lines)?;
    let dim: usize = match dim_line.strip_prefix("dim ") {
        Some(rest) => rest.trim().parse().map_err(|_| Error::Parse {
            pos: 0,
            expected: "`dim <n>`".into(),
        })?,
        None => {
            return Err(Error::Parse {
                pos: 0,
                expected: "`dim <n>`".into(),
            })
        }
    };
    let gram_line = next_nonempty(lines)?;
    if gram_line.trim() != "gram" {
        return Err(Error::Parse {
            pos: 0,
            expected: "`gram`".into(),
        });
    }
    let mut rows = Vec::with_capacity(dim);
    for _ in 0..dim {
        let line = next_nonempty(lines)?;
        let mut row = Vec::with_capacity(dim);
        for tok in line.split_whitespace() {
            row.push(spec.parse_scalar(tok)?);
        }
        if row.len() != dim {
            return Err(Error::Parse {
                pos: 0,
                expected: format!("{dim} scalars on each gram row"),
            });
        }
        rows.push(row);
    }
    let gram = Matrix::from_rows(spec, dim, &rows)?;
    BilinearSpace::from_gram(flavor, gram)
}

pub fn parse_field_line(line: &str) -> Result<FieldSpec> {
    let rest = line.strip_prefix("field ").ok_or(Error::Parse {
        pos: 0,
        expected: "`field Q|GF <p>|QSQRT <d>`".into(),
    })?;
    let toks: Vec<&str> = rest.split_whitespace().collect();
    match toks.as_slice() {
        ["Q"] => Ok(FieldSpec::rationals()),
        ["GF", p] => {
            let p: u64 = p.parse().map_err(|_| Error::Parse {
                pos: 0,
                expected: "prime modulus".into(),
            })?;
            FieldSpec::prime_field(p)
        }
        ["QSQRT", d] => {
            let d: u64 = d.parse().map_err(|_| Error::Parse {
                pos: 0,
                expected: "square-free radicand".into(),
            })?;
            FieldSpec::quadratic_ext(d)
        }
        _ => Err(Error::Parse {
            pos: 0,
            expected: "`field Q|GF <p>|QSQRT <d>`".into(),
        }),
    }
}

fn next_nonempty<'a>(lines: &mut impl Iterator<Item = &'a str>) -> Result<&'a str> {
    for line in lines {
        if !line.trim().is_empty() {
            return Ok(line.trim_end());
        }
    }
    Err(Error::Parse {
        pos: 0,
        expected: "another line".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;
    use crate::linalg::{unit_vector as e, vec_add};

    fn q() -> FieldSpec {
        FieldSpec::rationals()
    }

    fn gf(p: u64) -> FieldSpec {
        FieldSpec::prime_field(p).unwrap()
    }

    fn mat(spec: FieldSpec, rows: &[&[i64]]) -> Matrix {
        let cols = rows.first().map_or(0, |r| r.len());
        let vs: Vec<Vector> = rows
            .iter()
            .map(|r| r.iter().map(|&x| spec.from_i64(x)).collect())
            .collect();
        Matrix::from_rows(spec, cols, &vs).unwrap()
    }

    fn hyperbolic_gf2() -> BilinearSpace {
        BilinearSpace::from_gram(Flavor::Symmetric, mat(gf(2), &[&[0, 1], &[1, 0]])).unwrap()
    }

    #[test]
    fn from_gram_examples() {
        assert!(hyperbolic_gf2().is_nondegenerate());

        let symplectic =
            BilinearSpace::from_gram(Flavor::Alternating, mat(q(), &[&[0, 1], &[-1, 0]])).unwrap();
        assert_eq!(symplectic.dim(), 2);

        let err = BilinearSpace::from_gram(Flavor::Symmetric, mat(q(), &[&[0, 1], &[0, 0]]));
        assert_eq!(err.unwrap_err(), Error::FlavorViolation { row: 0, col: 1 });
    }

    #[test]
    fn form_eval_examples() {
        let h = hyperbolic_gf2();
        let spec = gf(2);
        assert_eq!(
            h.form(&e(spec, 2, 0), &e(spec, 2, 1)).unwrap(),
            spec.one()
        );

        let symplectic =
            BilinearSpace::from_gram(Flavor::Alternating, mat(q(), &[&[0, 1], &[-1, 0]])).unwrap();
        let u = vec_add(&e(q(), 2, 0), &e(q(), 2, 1));
        assert_eq!(
            symplectic.form(&u, &e(q(), 2, 0)).unwrap(),
            q().from_i64(-1)
        );

        let zero = crate::linalg::zero_vector(spec, 2);
        assert!(h.form(&zero, &e(spec, 2, 1)).unwrap().is_zero());
    }

    #[test]
    fn monomorphism_examples() {
        let h = hyperbolic_gf2();
        assert!(BilMap::identity(&h).is_monomorphism());

        // swapping the basis of H preserves the form
        let swap = BilMap::new(h.clone(), h.clone(), mat(gf(2), &[&[0, 1], &[1, 0]])).unwrap();
        assert!(swap.is_monomorphism());

        // rank deficiency is reported
        let collapse = BilMap::new(h.clone(), h.clone(), mat(gf(2), &[&[0, 0], &[0, 1]])).unwrap();
        assert!(!collapse.is_monomorphism());
        assert!(collapse
            .monomorphism_violation()
            .unwrap()
            .contains("column rank"));
    }

    #[test]
    fn radical_examples() {
        let h = hyperbolic_gf2();
        assert_eq!(h.radical(Side::Left).dim(), 0);
        assert_eq!(h.radical(Side::Right).dim(), 0);

        let degenerate = BilinearSpace::from_gram(Flavor::Symmetric, mat(q(), &[&[0]])).unwrap();
        assert_eq!(degenerate.radical(Side::Left), Subspace::full(q(), 1));
        assert_eq!(degenerate.radical(Side::Right), Subspace::full(q(), 1));

        let plain = BilinearSpace::from_gram(Flavor::Plain, mat(q(), &[&[0, 1], &[0, 0]])).unwrap();
        assert_eq!(
            plain.radical(Side::Left),
            Subspace::span(q(), 2, &[e(q(), 2, 1)]).unwrap()
        );
        assert_eq!(
            plain.radical(Side::Right),
            Subspace::span(q(), 2, &[e(q(), 2, 0)]).unwrap()
        );
    }

    #[test]
    fn closure_examples() {
        let h = hyperbolic_gf2();
        let (w, inc) = h.nondegenerate_closure().unwrap();
        assert_eq!(w, h);
        assert_eq!(inc.matrix(), &Matrix::identity(gf(2), 2));

        let line = BilinearSpace::from_gram(Flavor::Symmetric, mat(q(), &[&[0]])).unwrap();
        let (w, inc) = line.nondegenerate_closure().unwrap();
        assert_eq!(w.dim(), 2);
        assert_eq!(w.gram(), &mat(q(), &[&[0, 1], &[1, 0]]));
        assert!(w.is_nondegenerate());
        assert!(inc.is_monomorphism());

        let alt_zero = BilinearSpace::zero_form(gf(2), Flavor::Alternating, 2);
        let (w, _) = alt_zero.nondegenerate_closure().unwrap();
        assert_eq!(w.dim(), 4);
        assert!(w.is_nondegenerate());
        // two hyperbolic pairs, verified by enumeration of the radical
        for v in crate::linalg::enumerate_vectors(gf(2), 4).unwrap() {
            if crate::linalg::vec_is_zero(&v) {
                continue;
            }
            let pairs_left = crate::linalg::enumerate_vectors(gf(2), 4)
                .unwrap()
                .any(|u| !w.form(&v, &u).unwrap().is_zero());
            assert!(pairs_left);
        }
    }

    #[test]
    fn closure_randomized_postconditions() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        for _ in 0..200 {
            let spec = match rng.gen_range(0..3) {
                0 => q(),
                1 => gf(2),
                _ => gf(5),
            };
            let flavor = match rng.gen_range(0..3) {
                0 => Flavor::Plain,
                1 => Flavor::Symmetric,
                _ => Flavor::Alternating,
            };
            let dim = rng.gen_range(1..=4);
            let v = crate::sample::space(&mut rng, spec, flavor, dim);
            let (w, inc) = v.nondegenerate_closure().unwrap();
            assert!(w.is_nondegenerate());
            assert!(w.dim() <= 4 * dim);
            assert!(inc.is_monomorphism());
            assert_eq!(w.flavor(), flavor);
        }
    }

    #[test]
    fn monomorphisms_compose_and_survive_permutation() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(32);
        for _ in 0..100 {
            let spec = if rng.gen_bool(0.5) { gf(3) } else { q() };
            let flavor = match rng.gen_range(0..3) {
                0 => Flavor::Plain,
                1 => Flavor::Symmetric,
                _ => Flavor::Alternating,
            };
            let n = rng.gen_range(1..=3);
            let v = crate::sample::space(&mut rng, spec, flavor, n);
            // conjugate by a random invertible matrix to get a monomorphism
            let t = crate::sample::invertible(&mut rng, spec, n);
            let t_inv = t.inverse().unwrap();
            let new_gram = t_inv
                .transpose()
                .mul(v.gram())
                .unwrap()
                .mul(&t_inv)
                .unwrap();
            let w = BilinearSpace::from_gram(flavor, new_gram).unwrap();
            let f = BilMap::new(v.clone(), w.clone(), t).unwrap();
            assert!(f.is_monomorphism());
            let g = BilMap::identity(&w);
            let gf_map = g.compose(&f).unwrap();
            assert!(gf_map.is_monomorphism());
        }
    }

    #[test]
    fn form_eval_is_bilinear() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(33);
        for _ in 0..200 {
            let spec = if rng.gen_bool(0.5) { gf(5) } else { q() };
            let n = rng.gen_range(1..=4);
            let v = crate::sample::space(&mut rng, spec, Flavor::Plain, n);
            let x = crate::sample::vector(&mut rng, spec, n);
            let y = crate::sample::vector(&mut rng, spec, n);
            let z = crate::sample::vector(&mut rng, spec, n);
            let c = crate::sample::scalar(&mut rng, spec);
            let lhs = v.form(&x, &vec_add(&y, &z)).unwrap();
            let rhs = v
                .form(&x, &y)
                .unwrap()
                .checked_add(&v.form(&x, &z).unwrap())
                .unwrap();
            assert_eq!(lhs, rhs);
            let lhs = v.form(&crate::linalg::vec_scale(&c, &x), &y).unwrap();
            let rhs = c.checked_mul(&v.form(&x, &y).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn space_file_roundtrip() {
        let h = hyperbolic_gf2();
        let text = format_space(&h);
        assert_eq!(text, "field GF 2\nflavor symmetric\ndim 2\ngram\n0 1\n1 0\n");
        assert_eq!(parse_space(&text).unwrap(), h);

        let quad = FieldSpec::quadratic_ext(15).unwrap();
        let g = Matrix::from_fn(quad, 1, 1, |_, _| quad.parse_scalar("0+1/2r").unwrap());
        let s = BilinearSpace::from_gram(Flavor::Plain, g).unwrap();
        assert_eq!(parse_space(&format_space(&s)).unwrap(), s);
    }
}
