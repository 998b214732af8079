//! Existentially-closed-model semantics at finite scale.
//!
//! A bilinear space never is existentially closed itself, but truth of a
//! positive formula at a tuple "in the existentially closed closure" is
//! well defined and computable over a finite field: it depends only on the
//! quantifier-free type of the tuple, and existential witnesses can always
//! be found inside an extension by at most one fresh dimension per bound
//! variable, with the products of the fresh vectors solved for rather than
//! enumerated.
//!
//! This module provides that evaluation, the quantifier-free type
//! invariant, extension solving against finitely injective targets, type
//! enumeration and quantifier elimination over finite fields, isolating
//! (support) formulas, and the exponential family of types witnessing
//! instability.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::field::{FieldSpec, Scalar};
use crate::formula::{
    compile_regular, eval, qf_linear_independence, theta, to_regular_disjunction, Atom, EvalMode,
    Formula, RegularFormula, Term,
};
use crate::indep::span_space;
use crate::linalg::{
    enumerate_vectors, greedy_independent_positions, solve, unit_vector, zero_vector, Matrix,
    Subspace, Vector,
};
use crate::space::{enumerate_spaces, BilMap, BilinearSpace, Flavor};

/// The canonical quantifier-free invariant of a tuple: every linear
/// dependency of its entries (as a canonical subspace of coefficient
/// space) together with all pairwise products.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QfType {
    len: usize,
    kernel: Subspace,
    gram: Matrix,
}

impl QfType {
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn kernel(&self) -> &Subspace {
        &self.kernel
    }

    pub fn gram(&self) -> &Matrix {
        &self.gram
    }

    pub fn spec(&self) -> FieldSpec {
        self.gram.spec()
    }

    pub fn rank(&self) -> usize {
        self.len - self.kernel.dim()
    }

    /// The canonical matrix whose columns express each tuple entry over the
    /// greedy-leftmost independent subtuple; its row space is the orthogonal
    /// complement of the dependency kernel, in RREF.
    pub fn relation_matrix(&self) -> Matrix {
        let complement = self.kernel.basis_matrix().kernel_basis();
        let m = Matrix::from_rows(self.spec(), self.len, &complement)
            .expect("kernel vectors have the tuple length");
        let (rref, pivots) = m.rref();
        Matrix::from_rows(
            self.spec(),
            self.len,
            &(0..pivots.len())
                .map(|i| rref.row(i).to_vec())
                .collect::<Vec<_>>(),
        )
        .expect("rref rows have the tuple length")
    }

    /// Positions of the greedy-leftmost independent subtuple.
    pub fn basis_positions(&self) -> Vec<usize> {
        self.relation_matrix().rref().1
    }

    /// A smallest space realizing this type, together with the realizing
    /// tuple: the space is spanned by the independent subtuple, dependents
    /// are reproduced by their dependency coefficients.
    pub fn canonical_realization(&self, flavor: Flavor) -> Result<(BilinearSpace, Vec<Vector>)> {
        let relation = self.relation_matrix();
        let pivots = relation.rref().1;
        let k = pivots.len();
        let mut base_gram = Matrix::zeros(self.spec(), k, k);
        for a in 0..k {
            for b in 0..k {
                base_gram.set(a, b, self.gram.at(pivots[a], pivots[b]).clone());
            }
        }
        let space = BilinearSpace::from_gram(flavor, base_gram)?;
        let tuple = relation.col_vectors();
        debug_assert_eq!(&qf_type_of(&space, &tuple)?, self);
        Ok((space, tuple))
    }
}

/// The quantifier-free type of a tuple in a space.
pub fn qf_type_of(space: &BilinearSpace, tuple: &[Vector]) -> Result<QfType> {
    let spec = space.spec();
    let n = tuple.len();
    let m = Matrix::from_cols(spec, space.dim(), tuple)?;
    let kernel = Subspace::span(spec, n, &m.kernel_basis())?;
    let mut gram = Matrix::zeros(spec, n, n);
    for i in 0..n {
        for j in 0..n {
            gram.set(i, j, space.form(&tuple[i], &tuple[j])?);
        }
    }
    Ok(QfType {
        len: n,
        kernel,
        gram,
    })
}

/// Do two tuples satisfy the same quantifier-free formulas?
pub fn same_type(
    v: &BilinearSpace,
    a: &[Vector],
    w: &BilinearSpace,
    b: &[Vector],
) -> Result<bool> {
    if v.spec() != w.spec() {
        return Err(Error::FieldMismatch);
    }
    if v.flavor() != w.flavor() {
        return Err(Error::FlavorMismatch);
    }
    Ok(qf_type_of(v, a)? == qf_type_of(w, b)?)
}

/// For equal types, exhibit a common extension identifying the tuples:
/// maps g: v -> u and h: w -> u with g(a) = h(b).
pub fn witness_amalgam(
    v: &BilinearSpace,
    a: &[Vector],
    w: &BilinearSpace,
    b: &[Vector],
) -> Result<(BilinearSpace, BilMap, BilMap)> {
    if !same_type(v, a, w, b)? {
        return Err(Error::TypeMismatch);
    }
    if v == w && a == b {
        let id = BilMap::identity(v);
        return Ok((v.clone(), id.clone(), id));
    }
    let spec = v.spec();
    let positions = greedy_independent_positions(spec, v.dim(), a);
    let basis_a: Vec<Vector> = positions.iter().map(|&i| a[i].clone()).collect();
    let basis_b: Vec<Vector> = positions.iter().map(|&i| b[i].clone()).collect();
    // equal kernels make the same positions a basis on both sides, and
    // equal grams make the correspondence form-preserving
    let (sub, f1) = span_space(v, &basis_a)?;
    let f2 = BilMap::new(
        sub.clone(),
        w.clone(),
        Matrix::from_cols(spec, w.dim(), &basis_b)?,
    )?;
    let am = crate::indep::amalgamate_independent(&f1, &f2)?;
    for (x, y) in a.iter().zip(b) {
        debug_assert_eq!(am.map1.apply(x)?, am.map2.apply(y)?);
    }
    Ok((am.space, am.map1, am.map2))
}

/// Extend a map from the leading block of `big` into `target` to a map of
/// all of `big` into an extension of `target`. Returns the enlarged target
/// (which contains the old one as its leading block) and the extended map.
pub fn solve_extension(
    big: &BilinearSpace,
    f: &BilMap,
) -> Result<(BilinearSpace, BilMap)> {
    let sub_dim = f.source().dim();
    if sub_dim > big.dim() {
        return Err(Error::DimensionMismatch);
    }
    for i in 0..sub_dim {
        for j in 0..sub_dim {
            if big.gram().at(i, j) != f.source().gram().at(i, j) {
                return Err(Error::PreconditionFailed(
                    "map source must be the leading block of the extension".into(),
                ));
            }
        }
    }
    let spec = big.spec();
    let inclusion = BilMap::new(
        f.source().clone(),
        big.clone(),
        Matrix::from_fn(spec, big.dim(), sub_dim, |i, j| {
            if i == j {
                spec.one()
            } else {
                spec.zero()
            }
        }),
    )?;
    let am = crate::indep::amalgamate_independent(f, &inclusion)?;
    Ok((am.space, am.map2))
}

// ---------------------------------------------------------------------------
// evaluation against the existentially closed closure
// ---------------------------------------------------------------------------

/// Truth of `f` at the assigned tuple, interpreted in the existentially
/// closed closure of `space`. Finite fields only. The verdict depends only
/// on the quantifier-free type of the assigned tuple, which this entry
/// point exploits by evaluating on the canonical realization of that type.
pub fn ec_eval_finite(
    space: &BilinearSpace,
    f: &Formula,
    assignment: &BTreeMap<String, Vector>,
) -> Result<bool> {
    if !space.spec().is_finite() {
        return Err(Error::InfiniteField);
    }
    let vars: Vec<String> = f.free_vars().into_iter().collect();
    let mut tuple = Vec::with_capacity(vars.len());
    for v in &vars {
        tuple.push(
            assignment
                .get(v)
                .ok_or_else(|| Error::UnboundVariable(v.clone()))?
                .clone(),
        );
    }
    let ty = qf_type_of(space, &tuple)?;
    let (small, small_tuple) = ty.canonical_realization(space.flavor())?;
    let small_assignment: BTreeMap<String, Vector> =
        vars.into_iter().zip(small_tuple).collect();
    ec_eval_finite_direct(&small, f, &small_assignment)
}

/// As [`ec_eval_finite`] but evaluated in the given ambient space without
/// canonicalizing first; used to cross-check that the verdict really is a
/// type invariant.
pub fn ec_eval_finite_direct(
    space: &BilinearSpace,
    f: &Formula,
    assignment: &BTreeMap<String, Vector>,
) -> Result<bool> {
    if !space.spec().is_finite() {
        return Err(Error::InfiniteField);
    }
    match f {
        Formula::Top => Ok(true),
        Formula::Bottom => Ok(false),
        Formula::LinEq(..) | Formula::LinNeq(..) | Formula::BilEq(..) => {
            // monomorphisms preserve and reflect atoms, so truth in the
            // closure is truth here
            eval(f, space, assignment, EvalMode::Qf)
        }
        Formula::And(cs) => {
            for c in cs {
                if !ec_eval_finite_direct(space, c, assignment)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Formula::Or(cs) => {
            for c in cs {
                if ec_eval_finite_direct(space, c, assignment)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        Formula::Exists(..) => {
            for r in to_regular_disjunction(f, space.spec()) {
                if regular_truth(space, assignment, &r)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
    }
}

/// Witness search for an existentially quantified conjunction of atoms:
/// each bound variable is either a vector of the space spanned so far or a
/// fresh basis vector. Products involving fresh vectors are unknowns of a
/// linear system (with flavor constraints folded in); a consistent system
/// means the witnessing extension exists, and finite injectivity of the
/// closure turns that into truth.
fn regular_truth(
    space: &BilinearSpace,
    assignment: &BTreeMap<String, Vector>,
    r: &RegularFormula,
) -> Result<bool> {
    let spec = space.spec();
    let base = space.dim();
    let m = r.bound_vars.len();
    let total = base + m;
    let mut values: BTreeMap<String, Vector> = BTreeMap::new();
    for v in &r.free_vars {
        let vec = assignment
            .get(v)
            .ok_or_else(|| Error::UnboundVariable(v.clone()))?;
        let mut padded = vec.clone();
        padded.resize(total, spec.zero());
        values.insert(v.clone(), padded);
    }
    search(space, r, &mut values, 0, 0)
}

fn search(
    space: &BilinearSpace,
    r: &RegularFormula,
    values: &mut BTreeMap<String, Vector>,
    idx: usize,
    fresh: usize,
) -> Result<bool> {
    let spec = space.spec();
    let base = space.dim();
    let m = r.bound_vars.len();
    let total = base + m;
    if idx == m {
        return shape_consistent(space, r, values, fresh);
    }
    let var = &r.bound_vars[idx];
    // fresh branch first: for satisfiable formulas it usually succeeds
    // immediately, and the search stops at the first consistent shape
    values.insert(var.clone(), unit_vector(spec, total, base + fresh));
    if search(space, r, values, idx + 1, fresh + 1)? {
        return Ok(true);
    }
    for w in enumerate_vectors(spec, base + fresh)? {
        let mut padded = w;
        padded.resize(total, spec.zero());
        values.insert(var.clone(), padded);
        if search(space, r, values, idx + 1, fresh)? {
            return Ok(true);
        }
    }
    values.remove(var);
    Ok(false)
}

/// Decide whether some bilinear extension of `space` by `fresh` new basis
/// vectors makes every atom true under the fixed witness shape.
fn shape_consistent(
    space: &BilinearSpace,
    r: &RegularFormula,
    values: &BTreeMap<String, Vector>,
    fresh: usize,
) -> Result<bool> {
    let spec = space.spec();
    let base = space.dim();
    let total = base + fresh;
    let flavor = space.flavor();

    // affine rows over the unknown products; keys are canonical entry pairs
    let mut rows: Vec<(BTreeMap<(usize, usize), Scalar>, Scalar)> = Vec::new();

    let eval_term = |t: &Term| -> Result<Vector> {
        let mut acc = zero_vector(spec, total);
        for (v, c) in t.coeffs() {
            let vec = values
                .get(v)
                .ok_or_else(|| Error::UnboundVariable(v.clone()))?;
            for (slot, x) in acc.iter_mut().zip(vec.iter()) {
                *slot = slot.checked_add(&c.checked_mul(x)?)?;
            }
        }
        Ok(acc)
    };

    for atom in &r.atoms {
        match atom {
            Atom::LinEq(t, s) => {
                if eval_term(t)? != eval_term(s)? {
                    return Ok(false);
                }
            }
            Atom::LinNeq(t, s) => {
                if eval_term(t)? == eval_term(s)? {
                    return Ok(false);
                }
            }
            Atom::BilEq(t, s, mu) => {
                let tv = eval_term(t)?;
                let sv = eval_term(s)?;
                let mut constant = spec.zero();
                let mut coeffs: BTreeMap<(usize, usize), Scalar> = BTreeMap::new();
                for i in 0..total {
                    if tv[i].is_zero() {
                        continue;
                    }
                    for j in 0..total {
                        if sv[j].is_zero() {
                            continue;
                        }
                        let c = tv[i].checked_mul(&sv[j])?;
                        if i < base && j < base {
                            constant =
                                constant.checked_add(&c.checked_mul(space.gram().at(i, j))?)?;
                        } else {
                            // unknown product, canonicalized by flavor
                            let (key, signed) = match flavor {
                                Flavor::Plain => ((i, j), c),
                                Flavor::Symmetric => ((i.min(j), i.max(j)), c),
                                Flavor::Alternating => {
                                    if i == j {
                                        continue; // forced zero
                                    } else if i < j {
                                        ((i, j), c)
                                    } else {
                                        ((j, i), c.checked_neg()?)
                                    }
                                }
                            };
                            let entry = match coeffs.remove(&key) {
                                Some(prev) => prev.checked_add(&signed)?,
                                None => signed,
                            };
                            if !entry.is_zero() {
                                coeffs.insert(key, entry);
                            }
                        }
                    }
                }
                rows.push((coeffs, mu.checked_sub(&constant)?));
            }
        }
    }

    // assemble and solve the system over the touched unknowns
    let mut keys: Vec<(usize, usize)> = rows
        .iter()
        .flat_map(|(c, _)| c.keys().copied())
        .collect();
    keys.sort();
    keys.dedup();
    let index: BTreeMap<(usize, usize), usize> =
        keys.iter().enumerate().map(|(i, k)| (*k, i)).collect();
    let mut mat_rows: Vec<Vector> = Vec::with_capacity(rows.len());
    let mut rhs: Vector = Vec::with_capacity(rows.len());
    for (coeffs, target) in rows {
        let mut row = zero_vector(spec, keys.len());
        for (k, c) in coeffs {
            row[index[&k]] = c;
        }
        mat_rows.push(row);
        rhs.push(target);
    }
    let mat = Matrix::from_rows(spec, keys.len(), &mat_rows)?;
    Ok(solve(&mat, &rhs)?.consistent)
}

// ---------------------------------------------------------------------------
// satisfiability of regular formulas over infinite fields
// ---------------------------------------------------------------------------

/// Outcome of deciding an equation-free regular formula over an infinite
/// field under the reading in which all variables denote jointly generic
/// (linearly independent) vectors.
#[derive(Debug, Clone)]
pub enum GenericSat {
    Satisfiable {
        model: BilinearSpace,
        witness: Vec<Vector>,
    },
    Unsatisfiable,
}

pub fn ec_sat_regular_generic(r: &RegularFormula, flavor: Flavor) -> Result<GenericSat> {
    if r.spec.is_finite() {
        return Err(Error::FiniteField);
    }
    if r.atoms.iter().any(|a| matches!(a, Atom::LinEq(..))) {
        return Err(Error::ContainsLinearEquation);
    }
    for atom in &r.atoms {
        if let Atom::LinNeq(t, s) = atom {
            if t.sub(s).is_zero() {
                return Ok(GenericSat::Unsatisfiable);
            }
        }
    }
    let system = compile_regular(r, flavor)?;
    let sol = system.solve()?;
    let Some(particular) = sol.particular else {
        return Ok(GenericSat::Unsatisfiable);
    };
    let n = system.var_count;
    let mut gram = Matrix::zeros(r.spec, n, n);
    for i in 0..n {
        for j in 0..n {
            gram.set(i, j, particular[i * n + j].clone());
        }
    }
    let model = BilinearSpace::from_gram(flavor, gram)?;
    let witness = (0..n).map(|i| unit_vector(r.spec, n, i)).collect();
    Ok(GenericSat::Satisfiable { model, witness })
}

// ---------------------------------------------------------------------------
// isolating formulas, type enumeration, quantifier elimination
// ---------------------------------------------------------------------------

/// A single formula equivalent to the whole type: linear independence of
/// the greedy basis subtuple, the dependency equations of the remaining
/// entries, and all products on the subtuple. Quantifier-free over finite
/// fields. This formula is also the support of the type.
pub fn isolating_formula(t: &QfType, spec: FieldSpec) -> Result<Formula> {
    let relation = t.relation_matrix();
    let pivots = relation.rref().1;
    let k = pivots.len();
    let var = |pos: usize| format!("x{}", pos + 1);
    let mut conjuncts = Vec::new();
    if k > 0 {
        let indep = if spec.is_finite() {
            qf_linear_independence(k, spec)?
        } else {
            theta(k, spec)
        };
        let map: BTreeMap<String, String> = (0..k)
            .map(|i| (format!("x{}", i + 1), var(pivots[i])))
            .collect();
        conjuncts.push(indep.rename_free(&map));
    }
    for j in 0..t.len() {
        if pivots.contains(&j) {
            continue;
        }
        let mut rhs = Term::zero();
        for (row, &p) in pivots.iter().enumerate() {
            rhs = rhs.add(&Term::scaled_var(var(p), relation.at(row, j).clone()));
        }
        conjuncts.push(Formula::LinEq(Term::var(var(j), spec), rhs));
    }
    for &a in &pivots {
        for &b in &pivots {
            conjuncts.push(Formula::BilEq(
                Term::var(var(a), spec),
                Term::var(var(b), spec),
                t.gram().at(a, b).clone(),
            ));
        }
    }
    Ok(Formula::and(conjuncts))
}

/// All quantifier-free types of `n`-tuples over a finite field: every
/// dependency pattern (choice of greedy basis positions plus coefficients
/// expressing the dependent positions over the earlier basis positions)
/// crossed with every flavor-consistent Gram matrix on the basis subtuple.
/// Sorted canonically.
pub fn enumerate_qf_types(n: usize, spec: FieldSpec, flavor: Flavor) -> Result<Vec<QfType>> {
    if !spec.is_finite() {
        return Err(Error::InfiniteField);
    }
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << n) {
        let pivots: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let k = pivots.len();
        let dep_cols: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 0).collect();
        let slots: Vec<usize> = dep_cols
            .iter()
            .map(|&j| pivots.iter().filter(|&&p| p < j).count())
            .collect();
        let coeff_count: usize = slots.iter().sum();
        for coeffs in enumerate_vectors(spec, coeff_count)? {
            let mut relation = Matrix::zeros(spec, k, n);
            for (row, &p) in pivots.iter().enumerate() {
                relation.set(row, p, spec.one());
            }
            let mut offset = 0;
            for (&j, &avail) in dep_cols.iter().zip(&slots) {
                for row in 0..avail {
                    relation.set(row, j, coeffs[offset + row].clone());
                }
                offset += avail;
            }
            let kernel = Subspace::span(spec, n, &relation.kernel_basis())?;
            for base_gram in crate::space::enumerate_grams(spec, flavor, k)? {
                let full = relation
                    .transpose()
                    .mul(&base_gram)
                    .and_then(|m| m.mul(&relation))?;
                out.push(QfType {
                    len: n,
                    kernel: kernel.clone(),
                    gram: full,
                });
            }
        }
    }
    out.sort();
    debug_assert!(out.windows(2).all(|w| w[0] != w[1]));
    Ok(out)
}

/// Replace `f` by a quantifier-free formula with the same truth value at
/// every tuple under existentially-closed semantics: the disjunction of
/// the isolating formulas of the types satisfying `f`. The free variables
/// of `f` must be among `x1..xn`.
pub fn qe_finite(f: &Formula, n: usize, spec: FieldSpec, flavor: Flavor) -> Result<Formula> {
    if !spec.is_finite() {
        return Err(Error::InfiniteField);
    }
    for v in f.free_vars() {
        let ok = v.strip_prefix('x')
            .and_then(|rest| rest.parse::<usize>().ok())
            .map_or(false, |i| i >= 1 && i <= n);
        if !ok {
            return Err(Error::PreconditionFailed(format!(
                "free variable {v} is not among x1..x{n}"
            )));
        }
    }
    let types = enumerate_qf_types(n, spec, flavor)?;
    let mut members = Vec::new();
    let mut realizations = Vec::new();
    for t in &types {
        let (space, tuple) = t.canonical_realization(flavor)?;
        let assignment: BTreeMap<String, Vector> = tuple
            .iter()
            .enumerate()
            .map(|(i, v)| (format!("x{}", i + 1), v.clone()))
            .collect();
        let member = ec_eval_finite_direct(&space, f, &assignment)?;
        if member {
            members.push(t.clone());
        }
        realizations.push((space, assignment, member));
    }
    let result = Formula::or(
        members
            .iter()
            .map(|t| isolating_formula(t, spec))
            .collect::<Result<Vec<_>>>()?,
    );
    // re-verify: the output is quantifier-free and matches membership on
    // every enumerated type
    assert!(result.is_quantifier_free());
    for (space, assignment, member) in &realizations {
        let direct = eval(&result, space, assignment, EvalMode::Qf)?;
        assert_eq!(direct, *member, "eliminated formula agrees on every type");
    }
    Ok(result)
}

// ---------------------------------------------------------------------------
// instability witness and bounded support checking
// ---------------------------------------------------------------------------

/// Independent pairwise-orthogonal parameters `a_1..a_m` together with one
/// vector per 0/1 pattern realizing that pattern of products against the
/// parameters; all `2^m` patterns give pairwise distinct types.
#[derive(Debug, Clone)]
pub struct InstabilityWitness {
    pub space: BilinearSpace,
    pub parameters: Vec<Vector>,
    /// Index `chi` realizes pattern bit `i` = `(chi >> i) & 1`.
    pub vectors: Vec<Vector>,
}

pub fn instability_witness(
    m: usize,
    spec: FieldSpec,
    flavor: Flavor,
) -> Result<InstabilityWitness> {
    if !(2..=4).contains(&m) {
        return Err(Error::PreconditionFailed(
            "pattern length must be between 2 and 4".into(),
        ));
    }
    let patterns = 1usize << m;
    let dim = m + patterns;
    let mut gram = Matrix::zeros(spec, dim, dim);
    for chi in 0..patterns {
        for i in 0..m {
            if chi >> i & 1 == 1 {
                gram.set(m + chi, i, spec.one());
                let back = match flavor {
                    Flavor::Alternating => spec.from_i64(-1),
                    _ => spec.one(),
                };
                gram.set(i, m + chi, back);
            }
        }
    }
    let space = BilinearSpace::from_gram(flavor, gram)?;
    Ok(InstabilityWitness {
        parameters: (0..m).map(|i| unit_vector(spec, dim, i)).collect(),
        vectors: (0..patterns).map(|c| unit_vector(spec, dim, m + c)).collect(),
        space,
    })
}

/// Result of a bounded search for a tuple separating a formula from a type.
#[derive(Debug, Clone)]
pub enum SupportCheck {
    NoCounterexampleUpTo(usize),
    Counterexample {
        space: BilinearSpace,
        tuple: Vec<Vector>,
    },
}

/// Search all spaces up to the dimension budget for a tuple satisfying
/// `phi` (under existentially-closed semantics) whose type differs from
/// `t`. A sound refuter and a bounded verifier of the support property.
/// `phi` must have free variables among `x1..xn` for `n = t.len()`.
pub fn check_support(
    phi: &Formula,
    t: &QfType,
    spec: FieldSpec,
    flavor: Flavor,
    budget: usize,
) -> Result<SupportCheck> {
    if !spec.is_finite() {
        return Err(Error::InfiniteField);
    }
    let n = t.len();
    let mut cache: HashMap<QfType, bool> = HashMap::new();
    for dim in 1..=budget {
        for space in enumerate_spaces(spec, flavor, dim)? {
            for flat in enumerate_vectors(spec, dim * n)? {
                let tuple: Vec<Vector> = flat.chunks(dim).map(|c| c.to_vec()).collect();
                let ty = qf_type_of(&space, &tuple)?;
                if ty == *t {
                    continue;
                }
                let sat = match cache.get(&ty) {
                    Some(&s) => s,
                    None => {
                        let (small, small_tuple) = ty.canonical_realization(flavor)?;
                        let assignment: BTreeMap<String, Vector> = small_tuple
                            .iter()
                            .enumerate()
                            .map(|(i, v)| (format!("x{}", i + 1), v.clone()))
                            .collect();
                        let s = ec_eval_finite_direct(&small, phi, &assignment)?;
                        cache.insert(ty.clone(), s);
                        s
                    }
                };
                if sat {
                    return Ok(SupportCheck::Counterexample { space, tuple });
                }
            }
        }
    }
    Ok(SupportCheck::NoCounterexampleUpTo(budget))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;
    use crate::formula::parse_formula;
    use crate::linalg::unit_vector as e;

    fn q() -> FieldSpec {
        FieldSpec::rationals()
    }

    fn gf(p: u64) -> FieldSpec {
        FieldSpec::prime_field(p).unwrap()
    }

    fn hyperbolic(spec: FieldSpec) -> BilinearSpace {
        BilinearSpace::from_gram(
            Flavor::Symmetric,
            Matrix::from_fn(spec, 2, 2, |i, j| {
                if i != j {
                    spec.one()
                } else {
                    spec.zero()
                }
            }),
        )
        .unwrap()
    }

    #[test]
    fn qf_type_examples() {
        let spec = gf(2);
        let h = hyperbolic(spec);
        // repeated entries show up in the kernel, products in the gram
        let t = qf_type_of(&h, &[e(spec, 2, 0), e(spec, 2, 0)]).unwrap();
        assert_eq!(t.kernel().dim(), 1);
        assert!(t
            .kernel()
            .contains_vector(&[spec.one(), spec.from_i64(-1)])
            .unwrap());
        assert!(t.gram().is_zero());

        let t1 = qf_type_of(&h, &[e(spec, 2, 0)]).unwrap();
        let t2 = qf_type_of(&h, &[e(spec, 2, 1)]).unwrap();
        assert_eq!(t1, t2);

        let zero = qf_type_of(&h, &[crate::linalg::zero_vector(spec, 2)]).unwrap();
        assert_ne!(zero, t1);
    }

    #[test]
    fn same_type_and_witness_amalgam() {
        let base = BilinearSpace::zero_form(q(), Flavor::Symmetric, 0);
        let w = crate::indep::stationarity_counterexample(&base).unwrap();
        let a_tuple = vec![w.a.clone()];
        let ap_tuple = vec![w.a_prime.clone()];
        assert!(same_type(&w.space, &a_tuple, &w.space, &ap_tuple).unwrap());
        let (u, g, h) = witness_amalgam(&w.space, &a_tuple, &w.space, &ap_tuple).unwrap();
        assert!(g.is_monomorphism());
        assert!(h.is_monomorphism());
        assert_eq!(g.apply(&w.a).unwrap(), h.apply(&w.a_prime).unwrap());
        assert!(u.dim() >= w.space.dim());

        // over the extended base including b the types differ: 0 vs 1
        let ab = vec![w.b.clone(), w.a.clone()];
        let apb = vec![w.b.clone(), w.a_prime.clone()];
        assert!(!same_type(&w.space, &ab, &w.space, &apb).unwrap());
        assert!(matches!(
            witness_amalgam(&w.space, &ab, &w.space, &apb).unwrap_err(),
            Error::TypeMismatch
        ));

        // identical tuples trivially share a type
        let (u, g, h) = witness_amalgam(&w.space, &ab, &w.space, &ab).unwrap();
        assert_eq!(u.dim(), w.space.dim());
        assert_eq!(g.matrix(), h.matrix());
    }

    #[test]
    fn solve_extension_examples() {
        // extending by an orthogonal line
        let spec = q();
        let v = hyperbolic(spec);
        let trivial = BilinearSpace::zero_form(spec, Flavor::Symmetric, 0);
        let line = BilinearSpace::from_gram(
            Flavor::Symmetric,
            Matrix::from_fn(spec, 1, 1, |_, _| spec.one()),
        )
        .unwrap();
        let f = BilMap::new(trivial, v.clone(), Matrix::zeros(spec, 2, 0)).unwrap();
        let (big, g) = solve_extension(&line, &f).unwrap();
        assert_eq!(big.dim(), 3);
        assert!(g.is_monomorphism());
        assert!(big.form(&g.apply(&[spec.one()]).unwrap(), &g.apply(&[spec.one()]).unwrap())
            .unwrap()
            .is_one());

        // the non-degeneracy argument: pair a degenerate vector nontrivially
        let degenerate = BilinearSpace::zero_form(spec, Flavor::Symmetric, 1);
        let mut pair_gram = Matrix::zeros(spec, 2, 2);
        pair_gram.set(0, 1, spec.one());
        pair_gram.set(1, 0, spec.one());
        let pair = BilinearSpace::from_gram(Flavor::Symmetric, pair_gram).unwrap();
        let f = BilMap::new(
            degenerate.clone(),
            degenerate.clone(),
            Matrix::identity(spec, 1),
        )
        .unwrap();
        let (big, g) = solve_extension(&pair, &f).unwrap();
        let a = g.apply(&e(spec, 2, 0)).unwrap();
        let b = g.apply(&e(spec, 2, 1)).unwrap();
        assert!(big.form(&a, &b).unwrap().is_one());

        // a non-monomorphism is refused
        let squash = BilMap::new(
            BilinearSpace::zero_form(spec, Flavor::Symmetric, 1),
            BilinearSpace::zero_form(spec, Flavor::Symmetric, 1),
            Matrix::zeros(spec, 1, 1),
        )
        .unwrap();
        assert!(matches!(
            solve_extension(&pair, &squash).unwrap_err(),
            Error::NotMonomorphism(_)
        ));
    }

    fn asg(pairs: &[(&str, Vector)]) -> BTreeMap<String, Vector> {
        pairs
            .iter()
            .map(|(k, v)| (k.to_string(), v.clone()))
            .collect()
    }

    #[test]
    fn ec_eval_examples() {
        let spec = gf(2);
        // one degenerate line: a nonzero vector can always be paired
        let line = BilinearSpace::zero_form(spec, Flavor::Plain, 1);
        let f = parse_formula("E y. [a,y]=1", spec).unwrap();
        assert!(ec_eval_finite(&line, &f, &asg(&[("a", vec![spec.one()])])).unwrap());
        assert!(!ec_eval_finite(&line, &f, &asg(&[("a", vec![spec.zero()])])).unwrap());

        // rank formula on the zero-form plane
        let plane = BilinearSpace::zero_form(spec, Flavor::Symmetric, 2);
        let t2 = theta(2, spec);
        let independent = asg(&[("x1", e(spec, 2, 0)), ("x2", e(spec, 2, 1))]);
        let repeated = asg(&[("x1", e(spec, 2, 0)), ("x2", e(spec, 2, 0))]);
        assert!(ec_eval_finite(&plane, &t2, &independent).unwrap());
        assert!(!ec_eval_finite(&plane, &t2, &repeated).unwrap());
    }

    #[test]
    fn ec_eval_is_a_type_invariant() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(51);
        let spec = gf(2);
        let corpus: Vec<Formula> = vec![
            parse_formula("E y. [x1,y]=1", spec).unwrap(),
            parse_formula("E y z. [y,x1]=1 & [z,x1]=1 & [y,x2]=1 & [z,x2]=0", spec).unwrap(),
            parse_formula("[x1,x2]=1 | x1 = x2", spec).unwrap(),
            theta(2, spec),
        ];
        for _ in 0..40 {
            let flavor = match rng.gen_range(0..3) {
                0 => Flavor::Plain,
                1 => Flavor::Symmetric,
                _ => Flavor::Alternating,
            };
            let dim = rng.gen_range(1..=3);
            let space = crate::sample::space(&mut rng, spec, flavor, dim);
            let tuple = crate::sample::tuple(&mut rng, spec, dim, 2);
            let assignment = asg(&[("x1", tuple[0].clone()), ("x2", tuple[1].clone())]);
            for f in &corpus {
                let canonical = ec_eval_finite(&space, f, &assignment).unwrap();
                let direct = ec_eval_finite_direct(&space, f, &assignment).unwrap();
                assert_eq!(canonical, direct);
                // monotone under inclusion into a larger space
                let bigger = space
                    .direct_sum(&crate::sample::space(&mut rng, spec, flavor, 1))
                    .unwrap();
                let padded: Vec<Vector> = tuple
                    .iter()
                    .map(|v| {
                        let mut w = v.clone();
                        w.resize(bigger.dim(), spec.zero());
                        w
                    })
                    .collect();
                let up = ec_eval_finite_direct(
                    &bigger,
                    f,
                    &asg(&[("x1", padded[0].clone()), ("x2", padded[1].clone())]),
                )
                .unwrap();
                assert_eq!(canonical, up);
            }
        }
    }

    #[test]
    fn generic_satisfiability_examples() {
        let spec = q();
        let f = parse_formula("E z. [x,z]=1 & [y,z]=0 & x != y", spec).unwrap();
        let mut d = to_regular_disjunction(&f, spec);
        let r = d.remove(0);
        match ec_sat_regular_generic(&r, Flavor::Plain).unwrap() {
            GenericSat::Satisfiable { model, witness } => {
                assert_eq!(model.dim(), 3);
                assert_eq!(witness.len(), 3);
                // the witness satisfies the conjunction of atoms literally
                let mut full = BTreeMap::new();
                full.insert("x".to_string(), witness[0].clone());
                full.insert("y".to_string(), witness[1].clone());
                full.insert(r.bound_vars[0].clone(), witness[2].clone());
                let body = Formula::and(r.atoms.iter().map(Atom::to_formula).collect());
                assert!(eval(&body, &model, &full, EvalMode::Qf).unwrap());
            }
            GenericSat::Unsatisfiable => panic!("expected satisfiable"),
        }

        let f = parse_formula("[x,x]=1", spec).unwrap();
        let r = to_regular_disjunction(&f, spec).remove(0);
        assert!(matches!(
            ec_sat_regular_generic(&r, Flavor::Alternating).unwrap(),
            GenericSat::Unsatisfiable
        ));

        let f = parse_formula("x != x", spec).unwrap();
        let r = to_regular_disjunction(&f, spec).remove(0);
        assert!(matches!(
            ec_sat_regular_generic(&r, Flavor::Plain).unwrap(),
            GenericSat::Unsatisfiable
        ));
    }

    #[test]
    fn isolating_formula_examples() {
        let spec = gf(2);
        // type of a nonzero vector with self-product 1
        let line = BilinearSpace::from_gram(
            Flavor::Symmetric,
            Matrix::from_fn(spec, 1, 1, |_, _| spec.one()),
        )
        .unwrap();
        let t = qf_type_of(&line, &[vec![spec.one()]]).unwrap();
        let f = isolating_formula(&t, spec).unwrap();
        assert_eq!(
            crate::formula::print_formula(&f),
            "x1 != 0 & [x1, x1] = 1"
        );

        // the zero tuple: just the dependency equation
        let t = qf_type_of(&line, &[vec![spec.zero()]]).unwrap();
        let f = isolating_formula(&t, spec).unwrap();
        assert_eq!(crate::formula::print_formula(&f), "x1 = 0");

        // a dependent pair over the rationals keeps its equation and uses
        // the quantified independence formula
        let spec = q();
        let zline = BilinearSpace::zero_form(spec, Flavor::Symmetric, 1);
        let a = vec![spec.one()];
        let two_a = vec![spec.from_i64(2)];
        let t = qf_type_of(&zline, &[a, two_a]).unwrap();
        let f = isolating_formula(&t, spec).unwrap();
        assert_eq!(
            crate::formula::print_formula(&f),
            "x1 != 0 & x2 = 2*x1 & [x1, x1] = 0"
        );
    }

    #[test]
    fn isolating_formula_matches_exactly_its_type() {
        // exhaustive over GF(2), dimensions <= 3, tuples of length 2
        let spec = gf(2);
        let flavor = Flavor::Symmetric;
        for t in enumerate_qf_types(2, spec, flavor).unwrap() {
            let f = isolating_formula(&t, spec).unwrap();
            for dim in 1..=3 {
                for space in enumerate_spaces(spec, flavor, dim).unwrap() {
                    for flat in enumerate_vectors(spec, dim * 2).unwrap() {
                        let tuple: Vec<Vector> = flat.chunks(dim).map(|c| c.to_vec()).collect();
                        let assignment = asg(&[
                            ("x1", tuple[0].clone()),
                            ("x2", tuple[1].clone()),
                        ]);
                        let sat = eval(&f, &space, &assignment, EvalMode::Qf).unwrap();
                        let matches = qf_type_of(&space, &tuple).unwrap() == t;
                        assert_eq!(sat, matches);
                    }
                }
            }
        }
    }

    #[test]
    fn enumerate_type_counts() {
        assert_eq!(
            enumerate_qf_types(1, gf(2), Flavor::Symmetric).unwrap().len(),
            3
        );
        assert_eq!(
            enumerate_qf_types(1, gf(2), Flavor::Alternating).unwrap().len(),
            2
        );
        assert_eq!(
            enumerate_qf_types(1, gf(3), Flavor::Symmetric).unwrap().len(),
            4
        );
    }

    #[test]
    fn census_oracle_matches_enumeration() {
        // brute-force census across all spaces of dimension <= n + 2
        use std::collections::BTreeSet;
        for (n, spec, flavor) in [
            (1usize, gf(2), Flavor::Symmetric),
            (1, gf(2), Flavor::Alternating),
            (1, gf(3), Flavor::Symmetric),
            (2, gf(2), Flavor::Symmetric),
            (2, gf(2), Flavor::Alternating),
        ] {
            let mut seen: BTreeSet<QfType> = BTreeSet::new();
            for dim in 1..=n + 2 {
                for space in enumerate_spaces(spec, flavor, dim).unwrap() {
                    for flat in enumerate_vectors(spec, dim * n).unwrap() {
                        let tuple: Vec<Vector> = flat.chunks(dim).map(|c| c.to_vec()).collect();
                        seen.insert(qf_type_of(&space, &tuple).unwrap());
                    }
                }
            }
            let enumerated = enumerate_qf_types(n, spec, flavor).unwrap();
            assert_eq!(seen.len(), enumerated.len(), "n={n} {flavor}");
            let listed: BTreeSet<QfType> = enumerated.into_iter().collect();
            assert_eq!(seen, listed);
        }
    }

    #[test]
    fn qe_examples() {
        let spec = gf(2);
        let f = parse_formula("E y. [x1,y]=1", spec).unwrap();
        let out = qe_finite(&f, 1, spec, Flavor::Symmetric).unwrap();
        assert!(out.is_quantifier_free());
        // semantically equivalent to x1 != 0: check on realizations
        for t in enumerate_qf_types(1, spec, Flavor::Symmetric).unwrap() {
            let (space, tuple) = t.canonical_realization(Flavor::Symmetric).unwrap();
            let assignment = asg(&[("x1", tuple[0].clone())]);
            let lhs = eval(&out, &space, &assignment, EvalMode::Qf).unwrap();
            let nonzero = !tuple[0].iter().all(Scalar::is_zero);
            assert_eq!(lhs, nonzero);
        }

        // the rank-2 formula eliminates to the quantifier-free one
        let t2 = theta(2, spec);
        let out = qe_finite(&t2, 2, spec, Flavor::Symmetric).unwrap();
        let reference = qf_linear_independence(2, spec).unwrap();
        for t in enumerate_qf_types(2, spec, Flavor::Symmetric).unwrap() {
            let (space, tuple) = t.canonical_realization(Flavor::Symmetric).unwrap();
            let assignment = asg(&[("x1", tuple[0].clone()), ("x2", tuple[1].clone())]);
            assert_eq!(
                eval(&out, &space, &assignment, EvalMode::Qf).unwrap(),
                eval(&reference, &space, &assignment, EvalMode::Qf).unwrap()
            );
        }

        // truth eliminates to the disjunction over all types
        let out = qe_finite(&Formula::Top, 1, spec, Flavor::Symmetric).unwrap();
        for t in enumerate_qf_types(1, spec, Flavor::Symmetric).unwrap() {
            let (space, tuple) = t.canonical_realization(Flavor::Symmetric).unwrap();
            let assignment = asg(&[("x1", tuple[0].clone())]);
            assert!(eval(&out, &space, &assignment, EvalMode::Qf).unwrap());
        }
    }

    #[test]
    fn instability_witness_examples() {
        for (m, expect) in [(2usize, 4usize), (3, 8)] {
            let w = instability_witness(m, gf(2), Flavor::Symmetric).unwrap();
            let mut types = Vec::new();
            for v in &w.vectors {
                let mut tuple = vec![v.clone()];
                tuple.extend(w.parameters.iter().cloned());
                types.push(qf_type_of(&w.space, &tuple).unwrap());
            }
            types.sort();
            types.dedup();
            assert_eq!(types.len(), expect);
            // parameters independent and pairwise orthogonal
            let m_mat = Matrix::from_rows(gf(2), w.space.dim(), &w.parameters).unwrap();
            assert_eq!(m_mat.rank(), m);
            for x in &w.parameters {
                for y in &w.parameters {
                    assert!(w.space.form(x, y).unwrap().is_zero());
                }
            }
            // the all-zero pattern is orthogonal to every parameter
            for p in &w.parameters {
                assert!(w.space.form(&w.vectors[0], p).unwrap().is_zero());
            }
        }
        assert!(instability_witness(1, gf(2), Flavor::Plain).is_err());
    }

    #[test]
    fn check_support_examples() {
        let spec = gf(2);
        let flavor = Flavor::Symmetric;
        let line = BilinearSpace::from_gram(
            Flavor::Symmetric,
            Matrix::from_fn(spec, 1, 1, |_, _| spec.one()),
        )
        .unwrap();
        let t = qf_type_of(&line, &[vec![spec.one()]]).unwrap();
        let f = isolating_formula(&t, spec).unwrap();
        assert!(matches!(
            check_support(&f, &t, spec, flavor, 3).unwrap(),
            SupportCheck::NoCounterexampleUpTo(3)
        ));

        let zero_t = qf_type_of(&line, &[vec![spec.zero()]]).unwrap();
        assert!(matches!(
            check_support(&Formula::Top, &zero_t, spec, flavor, 2).unwrap(),
            SupportCheck::Counterexample { .. }
        ));

        let f = parse_formula("x1 = 0", spec).unwrap();
        assert!(matches!(
            check_support(&f, &zero_t, spec, flavor, 2).unwrap(),
            SupportCheck::NoCounterexampleUpTo(2)
        ));
    }
}
