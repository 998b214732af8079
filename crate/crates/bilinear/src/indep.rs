//! The ternary linear-independence relation and the amalgamation
//! constructions built on it: independent amalgamation of a span of
//! monomorphisms, independent extension of a tuple, amalgamation of a
//! compatible cube of three pairwise-independent extensions, and the
//! counterexample showing that independent extensions are not unique.

use crate::error::{Error, Result};
use crate::field::Scalar;
use crate::linalg::{unit_vector, Matrix, Subspace, Vector};
use crate::space::{BilMap, BilinearSpace, Flavor};

/// How to decide `A` independent from `B` over `C`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndepMethod {
    /// span(A ∪ C) ∩ span(B ∪ C) = span(C)
    SpanIntersection,
    /// greedily extend a basis of span(C) by A and by B, then check the
    /// union is linearly independent
    BasisExtension,
}

fn check_lengths(ambient: &BilinearSpace, tuples: &[&[Vector]]) -> Result<()> {
    for t in tuples {
        for v in *t {
            if v.len() != ambient.dim() {
                return Err(Error::AmbientMismatch);
            }
        }
    }
    Ok(())
}

/// Is `a` linearly independent from `b` over `c` inside `ambient`?
pub fn is_independent(
    ambient: &BilinearSpace,
    a: &[Vector],
    b: &[Vector],
    c: &[Vector],
    method: IndepMethod,
) -> Result<bool> {
    check_lengths(ambient, &[a, b, c])?;
    let spec = ambient.spec();
    let n = ambient.dim();
    match method {
        IndepMethod::SpanIntersection => {
            let ac: Vec<Vector> = a.iter().chain(c).cloned().collect();
            let bc: Vec<Vector> = b.iter().chain(c).cloned().collect();
            let span_ac = Subspace::span(spec, n, &ac)?;
            let span_bc = Subspace::span(spec, n, &bc)?;
            let span_c = Subspace::span(spec, n, c)?;
            Ok(span_ac.intersect(&span_bc)? == span_c)
        }
        IndepMethod::BasisExtension => {
            let c0 = greedy_basis(spec, n, &[], c)?;
            let a0 = greedy_basis(spec, n, &c0, a)?;
            let b0 = greedy_basis(spec, n, &c0, b)?;
            let mut all = c0.clone();
            all.extend(a0.iter().cloned());
            all.extend(b0.iter().cloned());
            let m = Matrix::from_rows(spec, n, &all)?;
            Ok(m.rank() == all.len())
        }
    }
}

/// Greedily pick, in index order, those vectors of `candidates` that enlarge
/// the span of `base`; returns `base`'s extension vectors only.
fn greedy_basis(
    spec: crate::field::FieldSpec,
    ambient: usize,
    base: &[Vector],
    candidates: &[Vector],
) -> Result<Vec<Vector>> {
    let mut picked: Vec<Vector> = Vec::new();
    let mut rows: Vec<Vector> = base.to_vec();
    let mut rank = Matrix::from_rows(spec, ambient, &rows)?.rank();
    for v in candidates {
        rows.push(v.clone());
        let new_rank = Matrix::from_rows(spec, ambient, &rows)?.rank();
        if new_rank > rank {
            rank = new_rank;
            picked.push(v.clone());
        } else {
            rows.pop();
        }
    }
    Ok(picked)
}

/// A base, contained in span(B), of dimension at most dim span(A), over
/// which A is independent from B: the canonical basis of span(A) ∩ span(B).
pub fn local_base(ambient: &BilinearSpace, a: &[Vector], b: &[Vector]) -> Result<Vec<Vector>> {
    check_lengths(ambient, &[a, b])?;
    let spec = ambient.spec();
    let n = ambient.dim();
    let span_a = Subspace::span(spec, n, a)?;
    let span_b = Subspace::span(spec, n, b)?;
    let inter = span_a.intersect(&span_b)?;
    let base = inter.basis_vectors();
    debug_assert!(is_independent(ambient, a, b, &base, IndepMethod::SpanIntersection)?);
    Ok(base)
}

/// Result of amalgamating `W1 <- V -> W2`.
#[derive(Debug, Clone)]
pub struct AmalgamResult {
    pub space: BilinearSpace,
    /// W1 -> U; always the identity onto the first dim(W1) coordinates.
    pub map1: BilMap,
    /// W2 -> U.
    pub map2: BilMap,
}

fn require_monomorphism(f: &BilMap, name: &str) -> Result<()> {
    if let Some(v) = f.monomorphism_violation() {
        return Err(Error::NotMonomorphism(format!("{name}: {v}")));
    }
    Ok(())
}

/// Greedy standard-basis complement of the column space of `cols` inside
/// dimension `dim`: indices whose unit vectors extend it to a basis.
fn standard_complement(cols: &Matrix, dim: usize) -> Vec<usize> {
    let spec = cols.spec();
    let mut rows: Vec<Vector> = cols.col_vectors();
    let mut rank = Matrix::from_rows(spec, dim, &rows)
        .expect("columns have ambient length")
        .rank();
    let mut picked = Vec::new();
    for i in 0..dim {
        rows.push(unit_vector(spec, dim, i));
        let new_rank = Matrix::from_rows(spec, dim, &rows).expect("unit fits").rank();
        if new_rank > rank {
            rank = new_rank;
            picked.push(i);
        } else {
            rows.pop();
        }
    }
    picked
}

/// Amalgamate a span of monomorphisms `W1 <-f1- V -f2-> W2` into a space `U`
/// in which the images of W1 and W2 are independent over the image of V and
/// all products between the chosen complements vanish. The result has
/// dimension dim W1 + dim W2 - dim V, and `map1` realises W1 as the leading
/// block of U.
pub fn amalgamate_independent(f1: &BilMap, f2: &BilMap) -> Result<AmalgamResult> {
    if f1.source().spec() != f2.source().spec() {
        return Err(Error::FieldMismatch);
    }
    if f1.source().flavor() != f2.source().flavor()
        || f1.target().flavor() != f2.target().flavor()
    {
        return Err(Error::FlavorMismatch);
    }
    if f1.source() != f2.source() {
        return Err(Error::PreconditionFailed(
            "amalgamation requires a common source space".into(),
        ));
    }
    require_monomorphism(f1, "first leg")?;
    require_monomorphism(f2, "second leg")?;

    let spec = f1.source().spec();
    let flavor = f1.source().flavor();
    let v_dim = f1.source().dim();
    let w1 = f1.target();
    let w2 = f2.target();
    let n1 = w1.dim();
    let n2 = w2.dim();

    // Decompose each target over the image of V plus a greedy standard
    // complement.
    let c1 = standard_complement(f1.matrix(), n1);
    let c2 = standard_complement(f2.matrix(), n2);
    let u_dim = n1 + c2.len();

    let basis_of = |img: &Matrix, comp: &[usize], dim: usize| -> Matrix {
        let mut cols: Vec<Vector> = img.col_vectors();
        for &i in comp {
            cols.push(unit_vector(spec, dim, i));
        }
        Matrix::from_cols(spec, dim, &cols).expect("full basis")
    };
    let p1 = basis_of(f1.matrix(), &c1, n1);
    let p2 = basis_of(f2.matrix(), &c2, n2);
    let p1_inv = p1.inverse().expect("decomposition basis is invertible");
    let p2_inv = p2.inverse().expect("decomposition basis is invertible");

    // V-components of the W1 and W2 standard bases.
    let v_part = |p_inv: &Matrix, j: usize, dim: usize| -> Vector {
        let coords = p_inv.apply(&unit_vector(spec, dim, j)).expect("dims agree");
        coords[..v_dim].to_vec()
    };

    // Gram of U over the basis [W1 standard basis | complement of V in W2].
    let mut gram = Matrix::zeros(spec, u_dim, u_dim);
    for i in 0..n1 {
        for j in 0..n1 {
            gram.set(i, j, w1.gram().at(i, j).clone());
        }
    }
    for (k, &ck) in c2.iter().enumerate() {
        for (l, &cl) in c2.iter().enumerate() {
            let val = w2.form(&unit_vector(spec, n2, ck), &unit_vector(spec, n2, cl))?;
            gram.set(n1 + k, n1 + l, val);
        }
        for i in 0..n1 {
            // cross products go through the V-component of the W1 vector
            let vi = v_part(&p1_inv, i, n1);
            let in_w2 = f2.apply(&vi)?;
            let ek = unit_vector(spec, n2, ck);
            gram.set(i, n1 + k, w2.form(&in_w2, &ek)?);
            gram.set(n1 + k, i, w2.form(&ek, &in_w2)?);
        }
    }
    let space = BilinearSpace::from_gram(flavor, gram)?;

    let map1 = BilMap::new(
        w1.clone(),
        space.clone(),
        Matrix::from_fn(spec, u_dim, n1, |i, j| {
            if i == j {
                spec.one()
            } else {
                spec.zero()
            }
        }),
    )?;

    // W2 vectors map through their V-part into the W1 block and through
    // their complement part onto the fresh coordinates.
    let mut g2 = Matrix::zeros(spec, u_dim, n2);
    for j in 0..n2 {
        let coords = p2_inv.apply(&unit_vector(spec, n2, j))?;
        let in_w1 = f1.apply(&coords[..v_dim].to_vec())?;
        for (i, s) in in_w1.iter().enumerate() {
            g2.set(i, j, s.clone());
        }
        for (k, s) in coords[v_dim..].iter().enumerate() {
            g2.set(n1 + k, j, s.clone());
        }
    }
    let map2 = BilMap::new(w2.clone(), space.clone(), g2)?;

    Ok(AmalgamResult { space, map1, map2 })
}

/// Restriction of the ambient form to the span of the given vectors: the
/// sub-space spanned by a greedy basis of `vectors`, its Gram matrix, and
/// the inclusion into the ambient space.
pub fn span_space(ambient: &BilinearSpace, vectors: &[Vector]) -> Result<(BilinearSpace, BilMap)> {
    check_lengths(ambient, &[vectors])?;
    let spec = ambient.spec();
    let basis = greedy_basis(spec, ambient.dim(), &[], vectors)?;
    let k = basis.len();
    let mut gram = Matrix::zeros(spec, k, k);
    for i in 0..k {
        for j in 0..k {
            gram.set(i, j, ambient.form(&basis[i], &basis[j])?);
        }
    }
    let sub = BilinearSpace::from_gram(ambient.flavor(), gram)?;
    let inclusion = BilMap::new(
        sub.clone(),
        ambient.clone(),
        Matrix::from_cols(spec, ambient.dim(), &basis)?,
    )?;
    Ok((sub, inclusion))
}

/// Coordinates of `v` in the column space of `cols` (must lie inside).
fn coords_in(cols: &Matrix, v: &[Scalar]) -> Result<Vector> {
    let sol = crate::linalg::solve(cols, v)?;
    sol.particular.ok_or(Error::PreconditionFailed(
        "vector lies outside the span".into(),
    ))
}

/// Given `a` independent from `b` over `c` in `ambient`, produce an
/// extension `W` of the ambient space together with a tuple `a'` that has
/// the same quantifier-free type over `b ∪ c` as `a` but is independent
/// from the whole ambient space over `c`.
pub fn extend_independently(
    ambient: &BilinearSpace,
    a: &[Vector],
    b: &[Vector],
    c: &[Vector],
) -> Result<(BilinearSpace, Vec<Vector>)> {
    check_lengths(ambient, &[a, b, c])?;
    if !is_independent(ambient, a, b, c, IndepMethod::SpanIntersection)? {
        return Err(Error::PreconditionFailed(
            "tuple is not independent from b over c".into(),
        ));
    }
    let spec = ambient.spec();
    // base span(BC) and its extension span(BC a)
    let bc: Vec<Vector> = b.iter().chain(c).cloned().collect();
    let (base_space, base_in_ambient) = span_space(ambient, &bc)?;
    let mut bca = bc.clone();
    bca.extend(a.iter().cloned());
    let (ext_space, ext_in_ambient) = span_space(ambient, &bca)?;
    // the base sits as the leading block of the extension's basis
    let k = base_space.dim();
    let f2 = BilMap::new(
        base_space.clone(),
        ext_space.clone(),
        Matrix::from_fn(spec, ext_space.dim(), k, |i, j| {
            if i == j {
                spec.one()
            } else {
                spec.zero()
            }
        }),
    )?;
    let result = amalgamate_independent(&base_in_ambient, &f2)?;
    // transport each a_i through the amalgam
    let ext_cols = ext_in_ambient.matrix();
    let mut a_prime = Vec::with_capacity(a.len());
    for v in a {
        let coords = coords_in(ext_cols, v)?;
        a_prime.push(result.map2.apply(&coords)?);
    }
    Ok((result.space, a_prime))
}

/// A commuting diagram of seven spaces: a base `d`, three extensions
/// `a`, `b`, `c` of it, and three pairwise amalgams `v1` (over a, b),
/// `v2` (over c, a) and `v3` (over b, c).
#[derive(Debug, Clone)]
pub struct Cube {
    pub d: BilinearSpace,
    pub a: BilinearSpace,
    pub b: BilinearSpace,
    pub c: BilinearSpace,
    pub v1: BilinearSpace,
    pub v2: BilinearSpace,
    pub v3: BilinearSpace,
    pub da: BilMap,
    pub db: BilMap,
    pub dc: BilMap,
    pub av1: BilMap,
    pub bv1: BilMap,
    pub av2: BilMap,
    pub cv2: BilMap,
    pub bv3: BilMap,
    pub cv3: BilMap,
}

#[derive(Debug, Clone)]
pub struct Amalgam3Result {
    pub space: BilinearSpace,
    pub g1: BilMap,
    pub g2: BilMap,
    pub g3: BilMap,
}

struct EdgeCheck<'a> {
    map: &'a BilMap,
    source: &'a BilinearSpace,
    target: &'a BilinearSpace,
    name: &'a str,
}

impl Cube {
    fn edges(&self) -> Vec<EdgeCheck<'_>> {
        vec![
            EdgeCheck { map: &self.da, source: &self.d, target: &self.a, name: "d->a" },
            EdgeCheck { map: &self.db, source: &self.d, target: &self.b, name: "d->b" },
            EdgeCheck { map: &self.dc, source: &self.d, target: &self.c, name: "d->c" },
            EdgeCheck { map: &self.av1, source: &self.a, target: &self.v1, name: "a->v1" },
            EdgeCheck { map: &self.bv1, source: &self.b, target: &self.v1, name: "b->v1" },
            EdgeCheck { map: &self.av2, source: &self.a, target: &self.v2, name: "a->v2" },
            EdgeCheck { map: &self.cv2, source: &self.c, target: &self.v2, name: "c->v2" },
            EdgeCheck { map: &self.bv3, source: &self.b, target: &self.v3, name: "b->v3" },
            EdgeCheck { map: &self.cv3, source: &self.c, target: &self.v3, name: "c->v3" },
        ]
    }

    fn validate(&self) -> Result<()> {
        for e in self.edges() {
            if e.map.source() != e.source || e.map.target() != e.target {
                return Err(Error::PreconditionFailed(format!(
                    "edge {} does not connect its declared spaces",
                    e.name
                )));
            }
            require_monomorphism(e.map, e.name)?;
        }
        let faces = [
            (self.av1.compose(&self.da)?, self.bv1.compose(&self.db)?, "v1"),
            (self.av2.compose(&self.da)?, self.cv2.compose(&self.dc)?, "v2"),
            (self.bv3.compose(&self.db)?, self.cv3.compose(&self.dc)?, "v3"),
        ];
        for (p, q, name) in faces {
            if p.matrix() != q.matrix() {
                return Err(Error::DiagramNotCommuting(format!(
                    "the two paths from the base into {name} differ"
                )));
            }
        }
        Ok(())
    }
}

/// Complete a compatible cube of three pairwise-independent extensions to a
/// space `W` with maps from `v1`, `v2`, `v3`, such that the cube commutes,
/// the flavor is preserved, and each corner is independent from the
/// opposite face over the base.
pub fn amalgamate3(cube: &Cube) -> Result<Amalgam3Result> {
    cube.validate()?;
    let spec = cube.d.spec();
    let flavor = cube.d.flavor();

    // the three required independences, named for error reporting
    let indep_inputs = [
        (&cube.av1, &cube.bv1, &cube.da, &cube.db, &cube.v1, "a from b over the base in v1"),
        (&cube.bv3, &cube.cv3, &cube.db, &cube.dc, &cube.v3, "b from c over the base in v3"),
        (&cube.cv2, &cube.av2, &cube.dc, &cube.da, &cube.v2, "c from a over the base in v2"),
    ];
    for (x_in, y_in, dx, dy, amb, label) in indep_inputs {
        let x_img = x_in.matrix().col_vectors();
        let y_img = y_in.matrix().col_vectors();
        let d_img = x_in.compose(dx)?.matrix().col_vectors();
        debug_assert_eq!(d_img, y_in.compose(dy)?.matrix().col_vectors());
        if !is_independent(amb, &x_img, &y_img, &d_img, IndepMethod::SpanIntersection)? {
            return Err(Error::IndependenceViolated(label.into()));
        }
    }

    let d_dim = cube.d.dim();
    // greedy complements of the base image inside a, b, c
    let ca = standard_complement(cube.da.matrix(), cube.a.dim());
    let cb = standard_complement(cube.db.matrix(), cube.b.dim());
    let cc = standard_complement(cube.dc.matrix(), cube.c.dim());

    // decomposition basis of each pairwise amalgam:
    // [base image | first complement image | second complement image | greedy rest]
    let decompose = |first: &BilMap,
                     second: &BilMap,
                     d_in: &BilMap,
                     comp_first: &[usize],
                     comp_second: &[usize],
                     amb: &BilinearSpace|
     -> Result<(Matrix, Vec<usize>)> {
        let spec = amb.spec();
        let mut cols: Vec<Vector> = first.compose(d_in)?.matrix().col_vectors();
        for &i in comp_first {
            cols.push(first.apply(&unit_vector(spec, first.source().dim(), i))?);
        }
        for &i in comp_second {
            cols.push(second.apply(&unit_vector(spec, second.source().dim(), i))?);
        }
        let partial = Matrix::from_cols(spec, amb.dim(), &cols)?;
        let rest = standard_complement(&partial, amb.dim());
        for &i in &rest {
            cols.push(unit_vector(spec, amb.dim(), i));
        }
        Ok((Matrix::from_cols(spec, amb.dim(), &cols)?, rest))
    };

    let (p1, rest1) = decompose(&cube.av1, &cube.bv1, &cube.da, &ca, &cb, &cube.v1)?;
    let (p2, rest2) = decompose(&cube.av2, &cube.cv2, &cube.da, &ca, &cc, &cube.v2)?;
    let (p3, rest3) = decompose(&cube.bv3, &cube.cv3, &cube.db, &cb, &cc, &cube.v3)?;

    let (alpha, beta, gamma) = (ca.len(), cb.len(), cc.len());
    let (nu1, nu2, nu3) = (rest1.len(), rest2.len(), rest3.len());
    let total = d_dim + alpha + beta + gamma + nu1 + nu2 + nu3;

    // slot ranges in W
    let slot_d = 0..d_dim;
    let slot_a = d_dim..d_dim + alpha;
    let slot_b = slot_a.end..slot_a.end + beta;
    let slot_c = slot_b.end..slot_b.end + gamma;
    let slot_v1 = slot_c.end..slot_c.end + nu1;
    let slot_v2 = slot_v1.end..slot_v1.end + nu2;
    let slot_v3 = slot_v2.end..slot_v2.end + nu3;

    // every pairwise amalgam transports its decomposition coordinates onto
    // its slots in W
    let slots1: Vec<usize> = slot_d.clone().chain(slot_a.clone()).chain(slot_b.clone()).chain(slot_v1.clone()).collect();
    let slots2: Vec<usize> = slot_d.clone().chain(slot_a.clone()).chain(slot_c.clone()).chain(slot_v2.clone()).collect();
    let slots3: Vec<usize> = slot_d.clone().chain(slot_b.clone()).chain(slot_c.clone()).chain(slot_v3.clone()).collect();

    let transport = |p: &Matrix, slots: &[usize], amb_dim: usize| -> Result<Matrix> {
        let p_inv = p.inverse().expect("decomposition basis is invertible");
        let mut g = Matrix::zeros(spec, total, amb_dim);
        for j in 0..amb_dim {
            let coords = p_inv.apply(&unit_vector(spec, amb_dim, j))?;
            for (k, s) in coords.iter().enumerate() {
                g.set(slots[k], j, s.clone());
            }
        }
        Ok(g)
    };

    let g1_mat = transport(&p1, &slots1, cube.v1.dim())?;
    let g2_mat = transport(&p2, &slots2, cube.v2.dim())?;
    let g3_mat = transport(&p3, &slots3, cube.v3.dim())?;

    // Gram of W: products between slots covered by a common pairwise
    // amalgam are forced by it (the choices agree on overlaps because all
    // maps preserve the form); everything else is zero.
    let mut gram = Matrix::zeros(spec, total, total);
    let mut known = vec![false; total * total];
    for (p, slots, amb) in [
        (&p1, &slots1, &cube.v1),
        (&p2, &slots2, &cube.v2),
        (&p3, &slots3, &cube.v3),
    ] {
        let cols = p.col_vectors();
        for (k, sk) in slots.iter().enumerate() {
            for (l, sl) in slots.iter().enumerate() {
                let val = amb.form(&cols[k], &cols[l])?;
                if known[sk * total + sl] {
                    assert_eq!(
                        gram.at(*sk, *sl),
                        &val,
                        "overlapping forced products agree for commuting monomorphisms"
                    );
                } else {
                    gram.set(*sk, *sl, val);
                    known[sk * total + sl] = true;
                }
            }
        }
    }
    let space = BilinearSpace::from_gram(flavor, gram)?;

    Ok(Amalgam3Result {
        g1: BilMap::new(cube.v1.clone(), space.clone(), g1_mat)?,
        g2: BilMap::new(cube.v2.clone(), space.clone(), g2_mat)?,
        g3: BilMap::new(cube.v3.clone(), space.clone(), g3_mat)?,
        space,
    })
}

/// The three-vector configuration witnessing that independent extensions of
/// a type over `base` are not unique: `a` and `a'` have the same type over
/// the base and are both independent from `b` over it, yet their products
/// with `b` differ (0 against 1).
#[derive(Debug, Clone)]
pub struct StationarityWitness {
    pub space: BilinearSpace,
    pub a: Vector,
    pub a_prime: Vector,
    pub b: Vector,
}

pub fn stationarity_counterexample(base: &BilinearSpace) -> Result<StationarityWitness> {
    let spec = base.spec();
    let one = spec.one();
    let back = match base.flavor() {
        Flavor::Alternating => spec.from_i64(-1),
        _ => spec.one(),
    };
    // products on (a, a', b): only [a', b] and [b, a'] are nonzero
    let mut block = Matrix::zeros(spec, 3, 3);
    block.set(1, 2, one);
    block.set(2, 1, back);
    let extension = BilinearSpace::from_gram(base.flavor(), block)?;
    let space = base.direct_sum(&extension)?;
    let n = base.dim();
    Ok(StationarityWitness {
        a: unit_vector(spec, n + 3, n),
        a_prime: unit_vector(spec, n + 3, n + 1),
        b: unit_vector(spec, n + 3, n + 2),
        space,
    })
}

/// Tuple of the standard basis vectors of the leading block of a space.
pub fn leading_basis_tuple(space: &BilinearSpace, k: usize) -> Vec<Vector> {
    (0..k)
        .map(|i| unit_vector(space.spec(), space.dim(), i))
        .collect()
}
