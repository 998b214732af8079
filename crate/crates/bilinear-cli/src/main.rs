//! Command-line front end: every library operation on files and inline
//! arguments.
//!
//! Exit status: 0 = success or true verdict, 1 = false verdict, 2 = usage
//! error, 3 = domain error.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use bilinear::ec::{self, GenericSat, SupportCheck};
use bilinear::formula::{
    parse_formula, print_formula, theta, to_regular_disjunction, EvalMode, ForcedValue,
};
use bilinear::gallery;
use bilinear::indep::{self, Cube, IndepMethod};
use bilinear::space::{format_space, parse_space_block, BilMap, BilinearSpace, Flavor};
use bilinear::{Error, FieldSpec, Matrix, Vector};

#[derive(Parser)]
#[command(
    name = "bilinear",
    about = "Exact algebra of bilinear spaces over a fixed field",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide whether tuple A is linearly independent from B over C, by
    /// both formulations
    CheckIndep {
        /// Space file
        space: PathBuf,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long, default_value = "")]
        c: String,
    },
    /// A small base inside span(B) over which A becomes independent from B
    LocalBase {
        space: PathBuf,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
    /// Amalgamate two maps with a common source into one space
    Amalgamate {
        map1: PathBuf,
        map2: PathBuf,
    },
    /// Amalgamate a compatible cube of three pairwise-independent
    /// extensions (cube file)
    Amalgamate3 {
        cube: PathBuf,
    },
    /// Evaluate a formula
    Eval {
        /// qf | brute | ec | generic
        #[arg(long)]
        mode: String,
        /// Space file (qf, brute, ec modes)
        #[arg(long)]
        space: Option<PathBuf>,
        /// Field for generic mode: q, gf<p>, qsqrt<d>
        #[arg(long)]
        field: Option<String>,
        /// Flavor for generic mode: plain, symmetric, alternating
        #[arg(long)]
        flavor: Option<String>,
        /// Assignment of free variables, e.g. "x=1,0;y=0,1"
        #[arg(long, default_value = "")]
        assign: String,
        formula: String,
    },
    /// Print the rank-n linear-independence formula
    Theta {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "q")]
        field: String,
    },
    /// Forced-value analysis of an equation-free regular formula over one
    /// or two free variables
    ForcedValue {
        formula: String,
        #[arg(long)]
        field: String,
        #[arg(long)]
        flavor: String,
    },
    /// Quantifier elimination over a finite field
    Qe {
        formula: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        field: String,
        #[arg(long)]
        flavor: String,
    },
    /// Quantifier-free type operations
    Types {
        #[command(subcommand)]
        cmd: TypesCmd,
    },
    /// The isolating (support) formula of the type of a tuple
    Isolate {
        space: PathBuf,
        #[arg(long)]
        tuple: String,
    },
    /// Exponential family of pairwise distinct types over m orthogonal
    /// parameters
    Instability {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        field: String,
        #[arg(long)]
        flavor: String,
    },
    /// Embed a space into a non-degenerate one
    Closure {
        space: PathBuf,
    },
    /// Self-verifying counterexample reproductions
    Gallery {
        #[command(subcommand)]
        cmd: GalleryCmd,
    },
}

#[derive(Subcommand)]
enum TypesCmd {
    /// List all quantifier-free types of n-tuples over a finite field
    Enumerate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        field: String,
        #[arg(long)]
        flavor: String,
    },
}

#[derive(Subcommand)]
enum GalleryCmd {
    /// Failure of stationarity over a base space
    Stationarity {
        /// Base space file; omitted means the trivial base
        #[arg(long)]
        space: Option<PathBuf>,
        #[arg(long, default_value = "q")]
        field: String,
        #[arg(long, default_value = "symmetric")]
        flavor: String,
    },
    /// The positive-definite three-way amalgamation failure with its exact
    /// quadratic-extension model
    Hilbert,
    /// Two completions of an undetermined product that cannot be
    /// amalgamated (infinite fields)
    Hausdorff {
        #[arg(long, default_value = "q")]
        field: String,
        #[arg(long, default_value = "plain")]
        flavor: String,
    },
    /// Refute a quantifier-free candidate definition of linear independence
    QeRefuter {
        formula: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "q")]
        field: String,
        #[arg(long, default_value = "symmetric")]
        flavor: String,
        #[arg(long, default_value_t = 1000)]
        retries: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Bounded check that a formula supports a type
    Support {
        formula: String,
        space: PathBuf,
        #[arg(long)]
        tuple: String,
        #[arg(long, default_value_t = 2)]
        budget: usize,
    },
}

/// true verdict / false verdict as exit status
enum Outcome {
    Verdict(bool),
    Done,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(Outcome::Verdict(true)) | Ok(Outcome::Done) => ExitCode::from(0),
        Ok(Outcome::Verdict(false)) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}

fn parse_field_flag(text: &str) -> Result<FieldSpec, Error> {
    let lower = text.to_ascii_lowercase();
    if lower == "q" {
        return Ok(FieldSpec::rationals());
    }
    if let Some(rest) = lower.strip_prefix("qsqrt") {
        let d: u64 = rest.parse().map_err(|_| Error::Parse {
            pos: 0,
            expected: "qsqrt<d> with integer d".into(),
        })?;
        return FieldSpec::quadratic_ext(d);
    }
    if let Some(rest) = lower.strip_prefix("gf") {
        let p: u64 = rest.parse().map_err(|_| Error::Parse {
            pos: 0,
            expected: "gf<p> with integer p".into(),
        })?;
        return FieldSpec::prime_field(p);
    }
    Err(Error::Parse {
        pos: 0,
        expected: "field: q, gf<p>, or qsqrt<d>".into(),
    })
}

fn read_space(path: &PathBuf) -> Result<BilinearSpace, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        Error::PreconditionFailed(format!("cannot read {}: {e}", path.display()))
    })?;
    bilinear::space::parse_space(&text)
}

fn parse_vector(text: &str, spec: FieldSpec, dim: usize) -> Result<Vector, Error> {
    let coords: Vec<&str> = if text.is_empty() {
        Vec::new()
    } else {
        text.split(',').collect()
    };
    if coords.len() != dim {
        return Err(Error::DimensionMismatch);
    }
    coords.iter().map(|c| spec.parse_scalar(c.trim())).collect()
}

fn parse_tuple(text: &str, spec: FieldSpec, dim: usize) -> Result<Vec<Vector>, Error> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(';')
        .map(|v| parse_vector(v.trim(), spec, dim))
        .collect()
}

fn parse_assignment(
    text: &str,
    spec: FieldSpec,
    dim: usize,
) -> Result<BTreeMap<String, Vector>, Error> {
    let mut out = BTreeMap::new();
    if text.trim().is_empty() {
        return Ok(out);
    }
    for part in text.split(';') {
        let Some((var, coords)) = part.split_once('=') else {
            return Err(Error::Parse {
                pos: 0,
                expected: "assignment entries of the form var=c1,c2,...".into(),
            });
        };
        out.insert(var.trim().to_string(), parse_vector(coords.trim(), spec, dim)?);
    }
    Ok(out)
}

fn show_vector(v: &[bilinear::Scalar]) -> String {
    v.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(",")
}

fn show_matrix(m: &Matrix) -> String {
    (0..m.rows())
        .map(|i| {
            m.row(i)
                .iter()
                .map(|s| s.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect::<Vec<_>>()
        .join("\n")
}

/// map file: literal `map`, `source`, a space block, `target`, a space
/// block, `matrix`, then target-dim rows of source-dim scalars.
fn read_map(path: &PathBuf) -> Result<BilMap, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        Error::PreconditionFailed(format!("cannot read {}: {e}", path.display()))
    })?;
    let mut lines = text.lines();
    expect_line(&mut lines, "map")?;
    expect_line(&mut lines, "source")?;
    let source = parse_space_block(&mut lines)?;
    expect_line(&mut lines, "target")?;
    let target = parse_space_block(&mut lines)?;
    expect_line(&mut lines, "matrix")?;
    let matrix = parse_matrix_block(&mut lines, target.spec(), target.dim(), source.dim())?;
    BilMap::new(source, target, matrix)
}

fn expect_line<'a>(lines: &mut impl Iterator<Item = &'a str>, expect: &str) -> Result<(), Error> {
    for line in lines {
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        if t == expect {
            return Ok(());
        }
        return Err(Error::Parse {
            pos: 0,
            expected: format!("`{expect}`"),
        });
    }
    Err(Error::Parse {
        pos: 0,
        expected: format!("`{expect}`"),
    })
}

fn parse_matrix_block<'a>(
    lines: &mut impl Iterator<Item = &'a str>,
    spec: FieldSpec,
    rows: usize,
    cols: usize,
) -> Result<Matrix, Error> {
    let mut data = Vec::with_capacity(rows);
    while data.len() < rows {
        let Some(line) = lines.next() else {
            return Err(Error::Parse {
                pos: 0,
                expected: format!("{rows} matrix rows"),
            });
        };
        if line.trim().is_empty() {
            continue;
        }
        let row: Result<Vector, Error> = line
            .split_whitespace()
            .map(|t| spec.parse_scalar(t))
            .collect();
        let row = row?;
        if row.len() != cols {
            return Err(Error::Parse {
                pos: 0,
                expected: format!("{cols} scalars per matrix row"),
            });
        }
        data.push(row);
    }
    Matrix::from_rows(spec, cols, &data)
}

/// cube file: literal `cube`, seven labelled space blocks (D A B C V1 V2
/// V3), then nine labelled matrix blocks in the fixed order
/// D->A D->B D->C A->V1 B->V1 A->V2 C->V2 B->V3 C->V3.
fn read_cube(path: &PathBuf) -> Result<Cube, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        Error::PreconditionFailed(format!("cannot read {}: {e}", path.display()))
    })?;
    let mut lines = text.lines();
    expect_line(&mut lines, "cube")?;
    let mut spaces = Vec::new();
    for label in ["D", "A", "B", "C", "V1", "V2", "V3"] {
        expect_line(&mut lines, &format!("space {label}"))?;
        spaces.push(parse_space_block(&mut lines)?);
    }
    let [d, a, b, c, v1, v2, v3]: [BilinearSpace; 7] =
        spaces.try_into().expect("seven blocks read");
    let mut maps = Vec::new();
    for (label, src, tgt) in [
        ("D->A", &d, &a),
        ("D->B", &d, &b),
        ("D->C", &d, &c),
        ("A->V1", &a, &v1),
        ("B->V1", &b, &v1),
        ("A->V2", &a, &v2),
        ("C->V2", &c, &v2),
        ("B->V3", &b, &v3),
        ("C->V3", &c, &v3),
    ] {
        expect_line(&mut lines, &format!("map {label}"))?;
        let m = parse_matrix_block(&mut lines, d.spec(), tgt.dim(), src.dim())?;
        maps.push(BilMap::new(src.clone(), tgt.clone(), m)?);
    }
    let [da, db, dc, av1, bv1, av2, cv2, bv3, cv3]: [BilMap; 9] =
        maps.try_into().expect("nine blocks read");
    Ok(Cube {
        d,
        a,
        b,
        c,
        v1,
        v2,
        v3,
        da,
        db,
        dc,
        av1,
        bv1,
        av2,
        cv2,
        bv3,
        cv3,
    })
}

fn run(cmd: Cmd) -> Result<Outcome, Error> {
    match cmd {
        Cmd::CheckIndep { space, a, b, c } => {
            let ambient = read_space(&space)?;
            let spec = ambient.spec();
            let a = parse_tuple(&a, spec, ambient.dim())?;
            let b = parse_tuple(&b, spec, ambient.dim())?;
            let c = parse_tuple(&c, spec, ambient.dim())?;
            let by_spans =
                indep::is_independent(&ambient, &a, &b, &c, IndepMethod::SpanIntersection)?;
            let by_bases =
                indep::is_independent(&ambient, &a, &b, &c, IndepMethod::BasisExtension)?;
            println!("span_intersection: {by_spans}");
            println!("basis_extension: {by_bases}");
            println!("independent: {}", by_spans && by_bases);
            Ok(Outcome::Verdict(by_spans && by_bases))
        }
        Cmd::LocalBase { space, a, b } => {
            let ambient = read_space(&space)?;
            let spec = ambient.spec();
            let a = parse_tuple(&a, spec, ambient.dim())?;
            let b = parse_tuple(&b, spec, ambient.dim())?;
            let base = indep::local_base(&ambient, &a, &b)?;
            println!("dim {}", base.len());
            for v in &base {
                println!("{}", show_vector(v));
            }
            Ok(Outcome::Done)
        }
        Cmd::Amalgamate { map1, map2 } => {
            let f1 = read_map(&map1)?;
            let f2 = read_map(&map2)?;
            let am = indep::amalgamate_independent(&f1, &f2)?;
            print!("{}", format_space(&am.space));
            println!("map1");
            println!("{}", show_matrix(am.map1.matrix()));
            println!("map2");
            println!("{}", show_matrix(am.map2.matrix()));
            Ok(Outcome::Done)
        }
        Cmd::Amalgamate3 { cube } => {
            let cube = read_cube(&cube)?;
            let res = indep::amalgamate3(&cube)?;
            print!("{}", format_space(&res.space));
            println!("map1");
            println!("{}", show_matrix(res.g1.matrix()));
            println!("map2");
            println!("{}", show_matrix(res.g2.matrix()));
            println!("map3");
            println!("{}", show_matrix(res.g3.matrix()));
            Ok(Outcome::Done)
        }
        Cmd::Eval {
            mode,
            space,
            field,
            flavor,
            assign,
            formula,
        } => match mode.as_str() {
            "qf" | "brute" | "ec" => {
                let space = space.ok_or_else(|| {
                    Error::PreconditionFailed(format!("mode {mode} needs --space"))
                })?;
                let ambient = read_space(&space)?;
                let spec = ambient.spec();
                let f = parse_formula(&formula, spec)?;
                let assignment = parse_assignment(&assign, spec, ambient.dim())?;
                let verdict = match mode.as_str() {
                    "qf" => bilinear::formula::eval(&f, &ambient, &assignment, EvalMode::Qf)?,
                    "brute" => {
                        bilinear::formula::eval(&f, &ambient, &assignment, EvalMode::Brute)?
                    }
                    _ => ec::ec_eval_finite(&ambient, &f, &assignment)?,
                };
                println!("{verdict}");
                Ok(Outcome::Verdict(verdict))
            }
            "generic" => {
                let spec = parse_field_flag(&field.ok_or_else(|| {
                    Error::PreconditionFailed("generic mode needs --field".into())
                })?)?;
                let flavor = Flavor::parse(&flavor.ok_or_else(|| {
                    Error::PreconditionFailed("generic mode needs --flavor".into())
                })?)?;
                let f = parse_formula(&formula, spec)?;
                for r in to_regular_disjunction(&f, spec) {
                    if let GenericSat::Satisfiable { model, witness } =
                        ec::ec_sat_regular_generic(&r, flavor)?
                    {
                        println!("satisfiable");
                        print!("{}", format_space(&model));
                        println!("witness");
                        for (v, w) in r.all_vars().iter().zip(&witness) {
                            println!("{v} = {}", show_vector(w));
                        }
                        return Ok(Outcome::Verdict(true));
                    }
                }
                println!("unsatisfiable");
                Ok(Outcome::Verdict(false))
            }
            other => Err(Error::PreconditionFailed(format!(
                "unknown mode {other}: expected qf, brute, ec, or generic"
            ))),
        },
        Cmd::Theta { n, field } => {
            if n == 0 {
                return Err(Error::PreconditionFailed("theta needs n >= 1".into()));
            }
            let spec = parse_field_flag(&field)?;
            println!("{}", print_formula(&theta(n, spec)));
            Ok(Outcome::Done)
        }
        Cmd::ForcedValue {
            formula,
            field,
            flavor,
        } => {
            let spec = parse_field_flag(&field)?;
            let flavor = Flavor::parse(&flavor)?;
            let f = parse_formula(&formula, spec)?;
            let mut disjuncts = to_regular_disjunction(&f, spec);
            if disjuncts.len() != 1 {
                return Err(Error::PreconditionFailed(
                    "forced-value analysis needs a single regular formula".into(),
                ));
            }
            match bilinear::formula::forced_bilinear_value(&disjuncts.remove(0), flavor)? {
                ForcedValue::Forced(v) => println!("forced {v}"),
                ForcedValue::NotForced => println!("not-forced"),
                ForcedValue::Unsatisfiable => println!("unsatisfiable"),
            }
            Ok(Outcome::Done)
        }
        Cmd::Qe {
            formula,
            n,
            field,
            flavor,
        } => {
            let spec = parse_field_flag(&field)?;
            let flavor = Flavor::parse(&flavor)?;
            let f = parse_formula(&formula, spec)?;
            let out = ec::qe_finite(&f, n, spec, flavor)?;
            println!("{}", print_formula(&out));
            Ok(Outcome::Done)
        }
        Cmd::Types {
            cmd: TypesCmd::Enumerate { n, field, flavor },
        } => {
            let spec = parse_field_flag(&field)?;
            let flavor = Flavor::parse(&flavor)?;
            let types = ec::enumerate_qf_types(n, spec, flavor)?;
            println!("count {}", types.len());
            for (i, t) in types.iter().enumerate() {
                println!("type {i}");
                println!("rank {}", t.rank());
                println!("kernel");
                let kernel = t.kernel().basis_matrix();
                if kernel.rows() == 0 {
                    println!("(none)");
                } else {
                    println!("{}", show_matrix(kernel));
                }
                println!("gram");
                println!("{}", show_matrix(t.gram()));
            }
            Ok(Outcome::Done)
        }
        Cmd::Isolate { space, tuple } => {
            let ambient = read_space(&space)?;
            let tuple = parse_tuple(&tuple, ambient.spec(), ambient.dim())?;
            let t = ec::qf_type_of(&ambient, &tuple)?;
            let f = ec::isolating_formula(&t, ambient.spec())?;
            println!("{}", print_formula(&f));
            Ok(Outcome::Done)
        }
        Cmd::Instability { m, field, flavor } => {
            let spec = parse_field_flag(&field)?;
            let flavor = Flavor::parse(&flavor)?;
            let w = ec::instability_witness(m, spec, flavor)?;
            print!("{}", format_space(&w.space));
            for (i, p) in w.parameters.iter().enumerate() {
                println!("a{} = {}", i + 1, show_vector(p));
            }
            for (chi, v) in w.vectors.iter().enumerate() {
                println!("v{chi:0width$b} = {}", show_vector(v), width = m);
            }
            let mut types = Vec::new();
            for v in &w.vectors {
                let mut t = vec![v.clone()];
                t.extend(w.parameters.iter().cloned());
                types.push(ec::qf_type_of(&w.space, &t)?);
            }
            types.sort();
            types.dedup();
            println!("distinct-types {}", types.len());
            Ok(Outcome::Verdict(types.len() == 1 << m))
        }
        Cmd::Closure { space } => {
            let v = read_space(&space)?;
            let (w, inclusion) = v.nondegenerate_closure()?;
            print!("{}", format_space(&w));
            println!("inclusion");
            println!("{}", show_matrix(inclusion.matrix()));
            Ok(Outcome::Done)
        }
        Cmd::Gallery { cmd } => {
            let report = match cmd {
                GalleryCmd::Stationarity {
                    space,
                    field,
                    flavor,
                } => {
                    let base = match space {
                        Some(path) => read_space(&path)?,
                        None => BilinearSpace::zero_form(
                            parse_field_flag(&field)?,
                            Flavor::parse(&flavor)?,
                            0,
                        ),
                    };
                    gallery::demo_stationarity(&base)?
                }
                GalleryCmd::Hilbert => gallery::demo_hilbert(),
                GalleryCmd::Hausdorff { field, flavor } => {
                    gallery::demo_hausdorff_failure(parse_field_flag(&field)?, Flavor::parse(&flavor)?)?
                }
                GalleryCmd::QeRefuter {
                    formula,
                    n,
                    field,
                    flavor,
                    retries,
                    seed,
                } => {
                    let spec = parse_field_flag(&field)?;
                    let f = parse_formula(&formula, spec)?;
                    gallery::demo_qe_refuter(&f, n, spec, Flavor::parse(&flavor)?, retries, seed)?
                }
                GalleryCmd::Support {
                    formula,
                    space,
                    tuple,
                    budget,
                } => {
                    let ambient = read_space(&space)?;
                    let spec = ambient.spec();
                    let f = parse_formula(&formula, spec)?;
                    let tuple = parse_tuple(&tuple, spec, ambient.dim())?;
                    let t = ec::qf_type_of(&ambient, &tuple)?;
                    match ec::check_support(&f, &t, spec, ambient.flavor(), budget)? {
                        SupportCheck::NoCounterexampleUpTo(b) => {
                            println!("no-counterexample-up-to {b}");
                            return Ok(Outcome::Verdict(true));
                        }
                        SupportCheck::Counterexample { space, tuple } => {
                            println!("counterexample");
                            print!("{}", format_space(&space));
                            for v in &tuple {
                                println!("{}", show_vector(v));
                            }
                            return Ok(Outcome::Verdict(false));
                        }
                    }
                }
            };
            print!("{report}");
            Ok(Outcome::Verdict(report.passed()))
        }
    }
}
