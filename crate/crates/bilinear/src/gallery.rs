//! Self-verifying reproductions of the classical counterexamples: failure
//! of stationarity, the positive-definite three-way amalgamation failure
//! with its exact quadratic-extension model, the amalgamation obstruction
//! behind the failure of the Hausdorff property over infinite fields, and
//! the refutation procedure showing linear independence has no
//! quantifier-free definition over an infinite field.

use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, SeedableRng};

use crate::error::{Error, Result};
use crate::field::{FieldSpec, Scalar};
use crate::formula::{
    eval, forced_bilinear_value, gram_system_from_atoms, print_formula, to_regular_disjunction,
    Atom, EvalMode, ForcedValue, Formula, Term,
};
use crate::indep::{is_independent, leading_basis_tuple, stationarity_counterexample, IndepMethod};
use crate::linalg::{unit_vector, vec_sub, Matrix, Vector};
use crate::space::{BilinearSpace, Flavor};

/// One verified claim inside a demo report.
#[derive(Debug, Clone)]
pub struct CheckItem {
    pub label: String,
    pub pass: bool,
    pub details: String,
}

/// A constructed counterexample plus the checklist of claims verified
/// against it. The demo passes iff every item passes.
#[derive(Debug, Clone)]
pub struct DemoReport {
    pub name: String,
    pub sections: Vec<String>,
    pub checks: Vec<CheckItem>,
}

impl DemoReport {
    fn new(name: &str) -> DemoReport {
        DemoReport {
            name: name.to_string(),
            sections: Vec::new(),
            checks: Vec::new(),
        }
    }

    fn section(&mut self, text: impl Into<String>) {
        self.sections.push(text.into());
    }

    fn check(&mut self, label: impl Into<String>, pass: bool, details: impl Into<String>) {
        self.checks.push(CheckItem {
            label: label.into(),
            pass,
            details: details.into(),
        });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

impl fmt::Display for DemoReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "demo {}", self.name)?;
        for s in &self.sections {
            writeln!(f, "{s}")?;
        }
        for c in &self.checks {
            writeln!(
                f,
                "check {}: {} ({})",
                c.label,
                if c.pass { "PASS" } else { "FAIL" },
                c.details
            )?;
        }
        writeln!(f, "result: {}", if self.passed() { "PASS" } else { "FAIL" })
    }
}

/// Stationarity fails over every base: two vectors with the same type over
/// the base, both independent from a third, whose types over the extended
/// base clash exactly as 0 against 1.
pub fn demo_stationarity(base: &BilinearSpace) -> Result<DemoReport> {
    let mut report = DemoReport::new("stationarity-failure");
    let w = stationarity_counterexample(base)?;
    report.section(format!(
        "base: {} dim {} ({})",
        base.spec(),
        base.dim(),
        base.flavor()
    ));
    report.section(format!("ambient dim {}", w.space.dim()));

    let base_tuple = leading_basis_tuple(&w.space, base.dim());
    let with = |v: &Vector| -> Vec<Vector> {
        let mut t = base_tuple.clone();
        t.push(v.clone());
        t
    };
    let same_over_base =
        crate::ec::same_type(&w.space, &with(&w.a), &w.space, &with(&w.a_prime))?;
    report.check(
        "equal types over the base",
        same_over_base,
        "quantifier-free invariants of a and a' over the base coincide",
    );

    let b_tuple = vec![w.b.clone()];
    for (label, v) in [("a", &w.a), ("a'", &w.a_prime)] {
        let si = is_independent(
            &w.space,
            &[v.clone()],
            &b_tuple,
            &base_tuple,
            IndepMethod::SpanIntersection,
        )?;
        let be = is_independent(
            &w.space,
            &[v.clone()],
            &b_tuple,
            &base_tuple,
            IndepMethod::BasisExtension,
        )?;
        report.check(
            format!("{label} independent from b over the base"),
            si && be,
            "both formulations agree",
        );
    }

    let mut extended = base_tuple.clone();
    extended.push(w.b.clone());
    let mut ext_a = extended.clone();
    ext_a.push(w.a.clone());
    let mut ext_ap = extended;
    ext_ap.push(w.a_prime.clone());
    let differ = !crate::ec::same_type(&w.space, &ext_a, &w.space, &ext_ap)?;
    report.check(
        "types differ over the base extended by b",
        differ,
        "extending the base by b separates a from a'",
    );

    let ab = w.space.form(&w.a, &w.b)?;
    let apb = w.space.form(&w.a_prime, &w.b)?;
    let clash = ab.is_zero() && apb.is_one();
    report.section(format!("[a, b] = {ab}"));
    report.section(format!("[a', b] = {apb}"));
    report.check(
        "exact clash 0 vs 1",
        clash,
        format!("{ab} vs {apb}"),
    );
    Ok(report)
}

/// The three-way amalgamation failure for positive-definite forms: the
/// abstract Gram model over Q forces a vector of self-product -3, and the
/// concrete model over Q(sqrt 15) with the signature (+,+,+,-) realizes the
/// same products exactly.
pub fn demo_hilbert() -> DemoReport {
    let mut report = DemoReport::new("hilbert-3-amalgamation");
    let q = FieldSpec::rationals();
    let rat = |num: i64, den: i64| Scalar::rational(num, den).expect("nonzero denominator");

    // abstract model: basis (a*, b, c, d) with every product forced by the
    // cube of inclusions
    let rows: [[(i64, i64); 4]; 4] = [
        [(1, 1), (1, 1), (1, 1), (1, 2)],
        [(1, 1), (2, 1), (1, 1), (5, 2)],
        [(1, 1), (1, 1), (2, 1), (5, 2)],
        [(1, 2), (5, 2), (5, 2), (9, 2)],
    ];
    let gram = Matrix::from_fn(q, 4, 4, |i, j| rat(rows[i][j].0, rows[i][j].1));
    let abstract_space =
        BilinearSpace::from_gram(Flavor::Symmetric, gram).expect("symmetric by construction");
    report.section("abstract model over Q, basis (a*, b, c, d):");
    for line in crate::space::format_space(&abstract_space).lines() {
        report.section(format!("  {line}"));
    }

    // v = 2(b + c - d), so a* - v has coordinates (1, -2, -2, 2)
    let a_star_minus_v: Vector = vec![rat(1, 1), rat(-2, 1), rat(-2, 1), rat(2, 1)];
    let self_product = abstract_space
        .form(&a_star_minus_v, &a_star_minus_v)
        .expect("coordinates fit");
    report.section(format!("[a*-v, a*-v] = {self_product}"));
    let minus_three = q.from_i64(-3);
    report.check(
        "abstract self-product is exactly -3",
        self_product == minus_three,
        format!("computed {self_product}"),
    );
    let negative = match &self_product {
        Scalar::Rat(r) => num_traits::Signed::is_negative(r),
        _ => false,
    };
    report.check(
        "the form is not positive definite",
        negative,
        "a self-product is negative",
    );

    // concrete model over Q(sqrt 15): ambient form diag(1, 1, 1, -1)
    let ext = FieldSpec::quadratic_ext(15).expect("15 is square-free");
    let parse = |s: &str| ext.parse_scalar(s).expect("valid scalar");
    let diag = Matrix::from_fn(ext, 4, 4, |i, j| {
        if i != j {
            ext.zero()
        } else if i == 3 {
            ext.from_i64(-1)
        } else {
            ext.one()
        }
    });
    let concrete = BilinearSpace::from_gram(Flavor::Symmetric, diag).expect("diagonal");
    let a_star: Vector = vec![parse("3/2"), parse("3/2"), parse("-1/2"), parse("0+1/2r")];
    let b: Vector = vec![parse("1"), parse("0"), parse("1"), parse("0")];
    let c: Vector = vec![parse("0"), parse("1"), parse("1"), parse("0")];
    let d: Vector = vec![parse("1/2"), parse("1/2"), parse("2"), parse("0")];
    report.section("concrete model over Q(sqrt 15), form diag(1, 1, 1, -1):");
    report.section(format!(
        "  a* = ({})",
        a_star.iter().map(Scalar::to_string).collect::<Vec<_>>().join(", ")
    ));

    let form = |x: &Vector, y: &Vector| concrete.form(x, y).expect("dim 4");
    let expectations = [
        ("[a*, a*]", form(&a_star, &a_star), ext.one()),
        ("[a*, b]", form(&a_star, &b), ext.one()),
        ("[a*, c]", form(&a_star, &c), ext.one()),
        ("[a*, d]", form(&a_star, &d), parse("1/2")),
    ];
    for (label, got, want) in expectations {
        report.check(
            format!("concrete {label} = {want}"),
            got == want,
            format!("computed {got}"),
        );
    }

    // v = 2(b + c - d) inside the concrete model
    let two = ext.from_i64(2);
    let mut v = crate::linalg::zero_vector(ext, 4);
    for (i, slot) in v.iter_mut().enumerate() {
        let sum = b[i]
            .checked_add(&c[i])
            .and_then(|s| s.checked_sub(&d[i]))
            .expect("same field");
        *slot = two.checked_mul(&sum).expect("same field");
    }
    let diff = vec_sub(&a_star, &v);
    let concrete_self = form(&diff, &diff);
    report.section(format!("concrete [a*-v, a*-v] = {concrete_self}"));
    report.check(
        "concrete self-product is exactly -3",
        concrete_self == ext.from_i64(-3),
        format!("computed {concrete_self}"),
    );

    // the two models agree product-by-product
    let tuple = [&a_star, &b, &c, &d];
    let mut agree = true;
    for i in 0..4 {
        for j in 0..4 {
            let concrete_val = form(tuple[i], tuple[j]);
            let abstract_val = match abstract_space.gram().at(i, j) {
                Scalar::Rat(r) => Scalar::quadratic(ext, r.clone(), num_traits::Zero::zero())
                    .expect("embedding into the extension"),
                other => other.clone(),
            };
            agree &= concrete_val == abstract_val;
        }
    }
    report.check(
        "abstract Gram equals the concrete products entry-by-entry",
        agree,
        "all sixteen products match",
    );
    report
}

/// Over an infinite field two completions of an undetermined product cannot
/// be amalgamated: a configuration leaving the product free, materialized
/// once with value 0 and once with value 1, derives 0 = 1 in any common
/// extension.
pub fn demo_hausdorff_failure(spec: FieldSpec, flavor: Flavor) -> Result<DemoReport> {
    if spec.is_finite() {
        return Err(Error::FiniteField);
    }
    let mut report = DemoReport::new("hausdorff-failure");
    let x = || Term::var("x", spec);
    let y = || Term::var("y", spec);
    let atoms = vec![
        Atom::LinNeq(x(), Term::zero()),
        Atom::LinNeq(y(), Term::zero()),
        Atom::LinNeq(x(), y()),
    ];
    let psi = Formula::and(atoms.iter().map(Atom::to_formula).collect());
    report.section(format!("configuration: {}", print_formula(&psi)));
    let regular = to_regular_disjunction(&psi, spec).remove(0);
    let outcome = forced_bilinear_value(&regular, flavor)?;
    report.check(
        "the product of x and y is not forced",
        outcome == ForcedValue::NotForced,
        format!("forced-value analysis returned {outcome:?}"),
    );

    // materialize the two completions by pinning the free product
    let vars = ["x".to_string(), "y".to_string()];
    let mut completions = Vec::new();
    for pin in [0i64, 1] {
        let mut pinned = atoms.clone();
        pinned.push(Atom::BilEq(x(), y(), spec.from_i64(pin)));
        let sys = gram_system_from_atoms(&pinned, &vars, spec, flavor, true)?;
        let sol = sys.solve()?;
        let u = sol
            .particular
            .ok_or_else(|| Error::PreconditionFailed("completion is consistent".into()))?;
        let gram = Matrix::from_fn(spec, 2, 2, |i, j| u[i * 2 + j].clone());
        let space = BilinearSpace::from_gram(flavor, gram)?;
        report.section(format!("completion with [a, b] = {pin}:"));
        for line in crate::space::format_space(&space).lines() {
            report.section(format!("  {line}"));
        }
        completions.push(space);
    }
    let a = unit_vector(spec, 2, 0);
    let b = unit_vector(spec, 2, 1);
    let v0 = completions[0].form(&a, &b)?;
    let v1 = completions[1].form(&a, &b)?;
    report.check(
        "first completion gives [a, b] = 0",
        v0.is_zero(),
        format!("computed {v0}"),
    );
    report.check(
        "second completion gives [a, b] = 1",
        v1.is_one(),
        format!("computed {v1}"),
    );
    // any amalgam g, h agreeing on (a, b) preserves the form, so
    // [g(a), g(b)] would equal both completions' values
    report.check(
        "amalgamation derives the contradiction 0 = 1",
        v0 != v1,
        format!(
            "[g(a), g(b)] = [a, b] = {v0} via the first leg and {v1} via the second"
        ),
    );
    Ok(report)
}

/// Refute a proposed quantifier-free definition of rank-n independence over
/// an infinite field: exhibit a space and tuple on which the formula and
/// linear independence disagree.
///
/// When some disjunct constrains nothing bilinear (its solution set is the
/// whole flavor-consistent space) the refutation needs a linearly dependent
/// tuple satisfying the disjunct, found by seeded randomized search;
/// otherwise a Gram matrix outside the finitely many proper affine solution
/// sets is found by deterministic grid search.
pub fn demo_qe_refuter(
    psi: &Formula,
    n: usize,
    spec: FieldSpec,
    flavor: Flavor,
    retries: usize,
    seed: u64,
) -> Result<DemoReport> {
    if spec.is_finite() {
        return Err(Error::FiniteField);
    }
    if !psi.is_quantifier_free() {
        return Err(Error::NotQuantifierFree);
    }
    if n == 0 {
        return Err(Error::PreconditionFailed("need at least one variable".into()));
    }
    let vars: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    for v in psi.free_vars() {
        if !vars.contains(&v) {
            return Err(Error::PreconditionFailed(format!(
                "free variable {v} is not among x1..x{n}"
            )));
        }
    }
    let mut report = DemoReport::new("qe-refuter");
    report.section(format!("candidate formula: {}", print_formula(psi)));
    report.section(format!("variables: {n}, flavor: {flavor}, field: {spec}"));

    let disjuncts = to_regular_disjunction(psi, spec);
    let flavor_freedom = gram_system_from_atoms(&[], &vars, spec, flavor, true)?
        .solve()?
        .basis
        .len();

    // classify each disjunct
    let mut avoid: Vec<(Matrix, Vector)> = Vec::new();
    let mut unconstrained: Vec<&crate::formula::RegularFormula> = Vec::new();
    for d in &disjuncts {
        let linear_ok = d.atoms.iter().all(|a| match a {
            Atom::LinEq(t, s) => t.sub(s).is_zero(),
            Atom::LinNeq(t, s) => !t.sub(s).is_zero(),
            Atom::BilEq(..) => true,
        });
        if !linear_ok {
            // false at every independent tuple, and no help at dependent
            // ones either unless its linear equations hold there; dependent
            // search below only targets unconstrained disjuncts
            continue;
        }
        let sys = gram_system_from_atoms(&d.atoms, &vars, spec, flavor, true)?;
        let sol = sys.solve()?;
        if !sol.consistent {
            continue;
        }
        if sol.basis.len() == flavor_freedom {
            unconstrained.push(d);
        } else {
            avoid.push((sys.matrix, sys.rhs));
        }
    }

    if let Some(d) = unconstrained.first() {
        // dependent-tuple search: the bilinear atoms of this disjunct hold
        // at every tuple of every flavor-consistent space, so only its
        // linear atoms matter
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let space = BilinearSpace::zero_form(spec, flavor, n);
        for _ in 0..retries.max(1) {
            let tuple = sample_dependent_tuple(&mut rng, spec, n);
            let assignment: BTreeMap<String, Vector> = vars
                .iter()
                .cloned()
                .zip(tuple.iter().cloned())
                .collect();
            let body = Formula::and(d.atoms.iter().map(Atom::to_formula).collect());
            if !eval(&body, &space, &assignment, EvalMode::Qf)? {
                continue;
            }
            let whole = eval(psi, &space, &assignment, EvalMode::Qf)?;
            let rank = Matrix::from_rows(spec, n, &tuple)?.rank();
            if !whole || rank == n {
                continue;
            }
            report.section("refutation by a dependent tuple satisfying the formula:");
            for (v, w) in vars.iter().zip(&tuple) {
                report.section(format!(
                    "  {v} = ({})",
                    w.iter().map(Scalar::to_string).collect::<Vec<_>>().join(", ")
                ));
            }
            report.check("formula holds at the tuple", whole, "quantifier-free evaluation");
            report.check(
                "tuple is linearly dependent",
                rank < n,
                format!("rank {rank} < {n}"),
            );
            return Ok(report);
        }
        return Err(Error::SearchExhausted);
    }

    // grid search for a Gram matrix outside every proper solution set
    let grid_max = disjuncts.len().max(1) as i64;
    let free_entries: Vec<(usize, usize)> = match flavor {
        Flavor::Plain => (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect(),
        Flavor::Symmetric => (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect(),
        Flavor::Alternating => (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect(),
    };
    let mut counter = vec![0i64; free_entries.len()];
    let found = 'grid: loop {
        let mut u = crate::linalg::zero_vector(spec, n * n);
        for ((i, j), &val) in free_entries.iter().zip(&counter) {
            let s = spec.from_i64(val);
            match flavor {
                Flavor::Plain => u[i * n + j] = s,
                Flavor::Symmetric => {
                    u[i * n + j] = s.clone();
                    u[j * n + i] = s;
                }
                Flavor::Alternating => {
                    u[j * n + i] = s.checked_neg()?;
                    u[i * n + j] = s;
                }
            }
        }
        let outside_all = avoid
            .iter()
            .map(|(m, rhs)| m.apply(&u).map(|got| got != *rhs))
            .collect::<Result<Vec<bool>>>()?
            .into_iter()
            .all(|b| b);
        if outside_all {
            break 'grid u;
        }
        // odometer over {0..grid_max}^k; a finite union of proper affine
        // subspaces cannot cover this grid, so the loop terminates
        let mut idx = 0;
        loop {
            if idx == counter.len() {
                return Err(Error::SearchExhausted);
            }
            counter[idx] += 1;
            if counter[idx] <= grid_max {
                break;
            }
            counter[idx] = 0;
            idx += 1;
        }
    };
    let gram = Matrix::from_fn(spec, n, n, |i, j| found[i * n + j].clone());
    let space = BilinearSpace::from_gram(flavor, gram)?;
    let tuple: Vec<Vector> = (0..n).map(|i| unit_vector(spec, n, i)).collect();
    let assignment: BTreeMap<String, Vector> = vars
        .iter()
        .cloned()
        .zip(tuple.iter().cloned())
        .collect();
    let holds = eval(psi, &space, &assignment, EvalMode::Qf)?;
    report.section("refutation by an independent tuple violating the formula:");
    for line in crate::space::format_space(&space).lines() {
        report.section(format!("  {line}"));
    }
    report.section("  tuple: the standard basis");
    report.check(
        "formula fails at the tuple",
        !holds,
        "quantifier-free evaluation",
    );
    report.check("tuple is linearly independent", true, format!("rank {n}"));
    Ok(report)
}

fn sample_dependent_tuple(
    rng: &mut rand_chacha::ChaCha8Rng,
    spec: FieldSpec,
    n: usize,
) -> Vec<Vector> {
    let dependent_at = rng.gen_range(0..n);
    let mut tuple: Vec<Vector> = (0..n)
        .map(|_| crate::sample::vector(rng, spec, n))
        .collect();
    let mut combo = crate::linalg::zero_vector(spec, n);
    for (i, v) in tuple.iter().enumerate() {
        if i == dependent_at {
            continue;
        }
        let c = spec.from_i64(rng.gen_range(-2..=2));
        combo = crate::linalg::vec_add(&combo, &crate::linalg::vec_scale(&c, v));
    }
    tuple[dependent_at] = combo;
    tuple
}
