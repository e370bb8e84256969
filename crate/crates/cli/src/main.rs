//! `frobdet`: command-line access to every operation of the `frobdet` crate.
//! Output is a single JSON object `{"config": .., "result": ..}`.
//! Exit codes: 0 success, 1 usage or I/O error, 2 domain error.

use std::fs;
use std::path::Path;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use frobdet::afrob;
use frobdet::chartable::{self, character_matrix_det, character_table, ingest_character_table, ComplexJson};
use frobdet::detfact;
use frobdet::efun::{self, BoundaryData, RationalSeries, SeriesKind};
use frobdet::frobgroup;
use frobdet::group::{conjugacy_classes, named, parse_group, FiniteGroup};
use frobdet::linalg::det_c;
use frobdet::pde::{self, Alpha, GaussPoly, JohnParams, MatrixVariablePoly};
use frobdet::quad::QuadConfig;
use frobdet::testfn::{MultiFn, UniFn};
use frobdet::Error as DomainError;

#[derive(Parser, Serialize)]
#[command(name = "frobdet", version, about = "Group determinants and their satellites")]
struct Cli {
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Worker thread cap.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write the JSON here instead of stdout.
    #[arg(long, global = true)]
    out: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Group validation, classes, characters.
    #[command(subcommand)]
    Group(GroupCmd),
    /// Group determinant expansion.
    #[command(subcommand)]
    Det(DetCmd),
    /// Factorizations.
    #[command(subcommand)]
    Factor(FactorCmd),
    /// Isotypic block determinants at a point.
    Blocks(BlocksArgs),
    /// Differential operators and kernels.
    #[command(subcommand)]
    Pde(PdeCmd),
    /// John transform.
    #[command(subcommand)]
    John(JohnCmd),
    /// Generalized Bessel functions and the eigenvalue problem.
    #[command(subcommand)]
    Efun(EfunCmd),
    /// The Frobenius matrix group and its Lie algebra.
    #[command(subcommand)]
    Liealg(LieCmd),
    /// Almost-Frobenius structure on the coordinate-hyperplane complement.
    #[command(subcommand)]
    Afrob(AfrobCmd),
}

#[derive(Args, Serialize, Clone)]
struct GroupArg {
    /// Group file (JSON) or bundled name: z2 z3 z4 z6 klein s3 d4 q8.
    #[arg(long)]
    group: String,
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
enum GroupCmd {
    /// Validate and summarize.
    Info(GroupArg),
    /// Conjugacy classes.
    Classes(GroupArg),
    /// Character table (exact for abelian groups).
    Chars {
        #[command(flatten)]
        g: GroupArg,
        /// Character table file to ingest instead of computing one.
        #[arg(long)]
        table: Option<String>,
    },
    /// Print the group file.
    Export(GroupArg),
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
enum DetCmd {
    /// Leibniz expansion of Θ(G).
    Expand(GroupArg),
    /// Σ X_g ∂Θ/∂X_g − nΘ (zero for a homogeneous Θ).
    Euler(GroupArg),
    /// Determinant of the character matrix (χ(g)).
    CharMatrix(GroupArg),
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
enum FactorCmd {
    /// Linear factors Σ χ(g) X_g for abelian G, checked against the expansion.
    Dedekind(GroupArg),
    /// ∏_ω Σ ω^k c_k against det of the circulant.
    Circulant {
        #[arg(long, allow_hyphen_values = true)]
        coeffs: String,
    },
    /// Φ₁Φ₂Φ₃² against det M for S₃ at seeded rational points.
    S3 {
        #[arg(long, default_value_t = 100)]
        points: usize,
    },
}

#[derive(Args, Serialize)]
struct BlocksArgs {
    #[command(flatten)]
    g: GroupArg,
    /// Real coefficients; seeded complex values when omitted.
    #[arg(long, allow_hyphen_values = true)]
    coeffs: Option<String>,
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
enum PdeCmd {
    /// Θ(∂) F(α·x) with Θ(α) = 0.
    PlaneWave {
        #[command(flatten)]
        g: GroupArg,
        /// Complex entries "a", "a+bi", "bi", comma separated.
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        /// pow<k>, exp, sin, cos
        #[arg(long, default_value = "exp")]
        f: String,
    },
    /// Θ(∂) applied to Σ_χ g_χ in separated coordinates (abelian G).
    Separated {
        #[command(flatten)]
        g: GroupArg,
        /// One function per character (const:c, affine:.., prod, exp:.., sin:.., pow<k>:..), separated by ';'.
        #[arg(long)]
        funcs: String,
    },
    /// Consistency of the operator symbol with the linear factors.
    Operator(GroupArg),
    /// Ω applied to det(Z)^power or an entry z_jl.
    Cayley {
        #[arg(long, default_value_t = 2)]
        size: usize,
        /// det, det^k, or z<j><l>
        #[arg(long, default_value = "det")]
        poly: String,
    },
    /// [Ω, Δ_jl^r] on det(Z) and the row-l family.
    Polarization {
        #[arg(long, default_value_t = 2)]
        size: usize,
        #[arg(long, default_value_t = 1)]
        j: usize,
        #[arg(long, default_value_t = 2)]
        l: usize,
        #[arg(long, default_value_t = 1)]
        r: u32,
    },
    /// Ω₉ applied to the plane-section integral of a Gaussian.
    Omega9 {
        #[arg(long, default_value = "gauss")]
        f: String,
        #[arg(long, allow_hyphen_values = true, default_value = "0.3,-0.2,0.1,0.4,0.2,-0.3,0.1,0.2,0.3")]
        point: String,
    },
}

#[derive(Args, Serialize)]
struct JohnArgs {
    #[arg(long, allow_hyphen_values = true, default_value = "0.5,0.5,0.5")]
    lambda: String,
    #[arg(long, allow_hyphen_values = true, default_value = "-1,-2")]
    alpha: String,
    #[arg(long, allow_hyphen_values = true, default_value = "3,4")]
    beta: String,
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
enum JohnCmd {
    /// Adaptive quadrature.
    Numeric(JohnArgs),
    /// Gamma/₂F₁ closed form.
    Closed(JohnArgs),
    /// Both, with their difference.
    Compare(JohnArgs),
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
enum EfunCmd {
    /// s_{k,n}, 𝒜_{n,j}, C_{n,j}, σ_{h,n} and the convolution identity.
    Tables {
        #[arg(long)]
        n: usize,
    },
    /// A_{r,n} as polynomials in ν.
    OdeCoeffs {
        #[arg(long)]
        n: usize,
    },
    /// Evaluate E, F, L, Y<p> or 0F.
    Eval {
        #[arg(long)]
        kind: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        nu: String,
        /// Point; F takes n comma-separated coordinates.
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, default_value_t = 50)]
        terms: usize,
    },
    /// ODE residual of Y_p on a grid in (0, 3].
    Residual {
        #[arg(long)]
        n: usize,
        #[arg(long, allow_hyphen_values = true)]
        nu: String,
        #[arg(long, default_value_t = 0)]
        p: usize,
        #[arg(long, default_value_t = 30)]
        terms: usize,
        #[arg(long, default_value = "0.1,0.5,1,1.5,2")]
        xs: String,
    },
    /// Denominator growth of the ₀F_{n−1} coefficients.
    Denominators {
        #[arg(long)]
        n: usize,
        #[arg(long, allow_hyphen_values = true)]
        nu: String,
        #[arg(long, default_value_t = 60)]
        terms: usize,
    },
    /// [f]_r at x.
    Bracket {
        #[arg(long)]
        f: String,
        #[arg(long, allow_hyphen_values = true)]
        x0: String,
        #[arg(long)]
        r: usize,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
    },
    /// Solve ∂ⁿu/∂x₁⋯∂x_n + u = λ with boundary data on a tensor grid.
    Solve {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "const:0")]
        lambda: String,
        /// φ_(1);…;φ_(n)
        #[arg(long)]
        phi: String,
        #[arg(long, allow_hyphen_values = true)]
        x0: String,
        #[arg(long, default_value_t = 3)]
        points: usize,
        #[arg(long, default_value_t = 0.2, allow_hyphen_values = true)]
        lo: f64,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        hi: f64,
    },
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
enum LieCmd {
    /// {r, derived_dim, bracket_ok, degrees}
    Summary(GroupArg),
    /// The generators A_k.
    Generators(GroupArg),
    /// c = a * b.
    Convolve {
        #[command(flatten)]
        g: GroupArg,
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
    },
    /// U with M(a) M(U) = I.
    Inverse {
        #[command(flatten)]
        g: GroupArg,
        #[arg(long, allow_hyphen_values = true)]
        a: String,
    },
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
enum AfrobCmd {
    /// All certificates at seeded points.
    Check {
        #[arg(long, default_value_t = 4)]
        n: usize,
    },
    /// X·Y at z (rational entries).
    Product {
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        y: String,
    },
    /// Third derivatives of the potential against T.
    Potential {
        #[arg(long)]
        z: String,
    },
}

enum Failure {
    Usage(String),
    Domain(DomainError),
}

impl<E: Into<DomainError>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Domain(e.into())
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn load_group(arg: &GroupArg) -> Result<FiniteGroup, Failure> {
    let path = Path::new(&arg.group);
    if path.exists() {
        let text = fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", arg.group)))?;
        return Ok(parse_group(&text)?);
    }
    named::by_name(&arg.group).ok_or_else(|| usage(format!("no group file or bundled group named '{}'", arg.group)))
}

fn floats(s: &str) -> Result<Vec<f64>, Failure> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| usage(format!("bad number '{t}': {e}"))))
        .collect()
}

fn rationals(s: &str) -> Result<Vec<BigRational>, Failure> {
    s.split(',').map(|t| efun::parse_rational(t).map_err(usage)).collect()
}

fn complex(t: &str) -> Result<Complex64, Failure> {
    let t = t.trim().replace(' ', "");
    let bad = || usage(format!("bad complex number '{t}'"));
    let Some(body) = t.strip_suffix('i') else {
        return t.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| bad());
    };
    let split = body[1..].rfind(['+', '-']).map(|k| k + 1);
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        v => v.parse::<f64>().map_err(|_| bad())?,
    };
    Ok(Complex64::new(re.parse::<f64>().map_err(|_| bad())?, im))
}

fn qjson(q: &BigRational) -> Value {
    json!({"num": q.numer().to_string(), "den": q.denom().to_string()})
}

fn cjson(z: Complex64) -> Value {
    serde_json::to_value(ComplexJson::from(z)).expect("serializable")
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn group_summary(g: &FiniteGroup) -> Value {
    let cc = conjugacy_classes(g);
    json!({
        "order": g.order(),
        "names": g.names(),
        "exponent": g.exponent(),
        "abelian": g.is_abelian(),
        "r": cc.r(),
    })
}

fn run(cli: &Cli) -> Result<Value, Failure> {
    match &cli.command {
        Command::Group(cmd) => run_group(cmd),
        Command::Det(cmd) => run_det(cmd),
        Command::Factor(cmd) => run_factor(cmd, cli.seed),
        Command::Blocks(args) => run_blocks(args, cli.seed),
        Command::Pde(cmd) => run_pde(cmd),
        Command::John(cmd) => run_john(cmd),
        Command::Efun(cmd) => run_efun(cmd),
        Command::Liealg(cmd) => run_lie(cmd),
        Command::Afrob(cmd) => run_afrob(cmd, cli.seed),
    }
}

fn run_group(cmd: &GroupCmd) -> Result<Value, Failure> {
    match cmd {
        GroupCmd::Info(a) => {
            let g = load_group(a)?;
            let table = character_table(&g)?;
            let mut v = group_summary(&g);
            v["degrees"] = json!(table.degrees);
            v["classes"] = to_value(&conjugacy_classes(&g).classes);
            Ok(v)
        }
        GroupCmd::Classes(a) => {
            let g = load_group(a)?;
            let cc = conjugacy_classes(&g);
            Ok(json!({"r": cc.r(), "sizes": cc.sizes(), "classes": cc.classes, "class_of": cc.class_of}))
        }
        GroupCmd::Chars { g, table } => {
            let grp = load_group(g)?;
            let t = match table {
                Some(path) => {
                    let text = fs::read_to_string(path).map_err(|e| usage(format!("cannot read {path}: {e}")))?;
                    let file: chartable::CharacterTableFile =
                        serde_json::from_str(&text).map_err(|e| usage(format!("bad character table file: {e}")))?;
                    ingest_character_table(&grp, &file)?
                }
                None => character_table(&grp)?,
            };
            let exact = t.is_exact().then(|| {
                (0..t.count())
                    .map(|i| (0..grp.order()).map(|x| t.exact_value(i, x).map(|c| c.to_string())).collect::<Vec<_>>())
                    .collect::<Vec<_>>()
            });
            Ok(json!({
                "exact": t.is_exact(),
                "tolerance": t.tolerance(),
                "orthogonality_defect": t.orthogonality_defect(),
                "table": to_value(&t.to_file()),
                "exact_values": exact,
            }))
        }
        GroupCmd::Export(a) => Ok(to_value(&load_group(a)?.to_file())),
    }
}

fn run_det(cmd: &DetCmd) -> Result<Value, Failure> {
    match cmd {
        DetCmd::Expand(a) => {
            let g = load_group(a)?;
            let p = detfact::expand_group_det(&g)?;
            let names = detfact::variable_names(g.order());
            Ok(json!({"terms": p.len(), "polynomial": to_value(&p.to_json(&names)), "pretty": p.pretty(&names)}))
        }
        DetCmd::Euler(a) => {
            let g = load_group(a)?;
            let p = detfact::expand_group_det(&g)?;
            let d = detfact::euler_defect(&p, g.order());
            Ok(json!({"homogeneous": d.is_zero(), "defect_terms": d.len()}))
        }
        DetCmd::CharMatrix(a) => {
            let g = load_group(a)?;
            let t = chartable::abelian_characters(&g)?;
            let d = character_matrix_det(&t);
            Ok(json!({
                "det": d.as_ref().map(|c| c.to_string()),
                "det_numeric": d.as_ref().map(|c| cjson(c.to_complex())),
                "nonzero": d.map(|c| c != frobdet::cyclotomic::Cyclotomic::from_int(0)),
            }))
        }
    }
}

fn run_factor(cmd: &FactorCmd, seed: u64) -> Result<Value, Failure> {
    match cmd {
        FactorCmd::Dedekind(a) => {
            let g = load_group(a)?;
            let f = detfact::dedekind_factorization(&g)?;
            let forms: Vec<Value> = f
                .forms
                .iter()
                .map(|form| {
                    json!({
                        "coeffs": form.coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                        "numeric": form.coeffs.iter().map(|c| cjson(c.to_complex())).collect::<Vec<_>>(),
                    })
                })
                .collect();
            Ok(json!({"verified": f.verified, "forms": forms, "expansion_terms": f.expansion.len()}))
        }
        FactorCmd::Circulant { coeffs } => {
            let c: Vec<Complex64> = coeffs.split(',').map(complex).collect::<Result<_, _>>()?;
            let value = detfact::circulant_eval(&c);
            let g = named::cyclic(c.len());
            let det = det_c(&detfact::frobenius_matrix(&g, &c));
            Ok(json!({"value": cjson(value), "det": cjson(det), "abs_diff": (value - det).norm()}))
        }
        FactorCmd::S3 { points } => {
            let g = named::s3();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut agree = 0;
            for _ in 0..*points {
                let x: [BigRational; 6] = std::array::from_fn(|_| {
                    BigRational::new(BigInt::from(rng.gen_range(-20..=20)), BigInt::from(rng.gen_range(1..=7)))
                });
                let (p1, p2, p3) = detfact::s3_phi_eval(&x);
                let m: Vec<Vec<BigRational>> = detfact::frobenius_matrix(&g, &x);
                if p1 * p2 * p3.clone() * p3 == frobdet::linalg::det_q(&m) {
                    agree += 1;
                }
            }
            Ok(json!({"points": points, "agree": agree, "ok": agree == *points}))
        }
    }
}

fn run_blocks(args: &BlocksArgs, seed: u64) -> Result<Value, Failure> {
    let g = load_group(&args.g)?;
    let n = g.order();
    let coeffs: Vec<Complex64> = match &args.coeffs {
        Some(s) => s.split(',').map(complex).collect::<Result<_, _>>()?,
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
        }
    };
    let table = character_table(&g)?;
    let blocks = detfact::isotypic_block_dets(&g, &table, &coeffs)?;
    let product: Complex64 = blocks.iter().map(|b| b.det).product();
    let det = det_c(&detfact::frobenius_matrix(&g, &coeffs));
    Ok(json!({
        "coeffs": coeffs.iter().map(|&z| cjson(z)).collect::<Vec<_>>(),
        "blocks": to_value(&blocks),
        "product": cjson(product),
        "det": cjson(det),
        "relative_diff": (product - det).norm() / det.norm().max(f64::MIN_POSITIVE),
    }))
}

fn parse_matrix_poly(size: usize, s: &str) -> Result<MatrixVariablePoly, Failure> {
    if s == "det" {
        return Ok(MatrixVariablePoly::det(size));
    }
    if let Some(k) = s.strip_prefix("det^") {
        let k: u32 = k.parse().map_err(|_| usage(format!("bad power in '{s}'")))?;
        let d = MatrixVariablePoly::det(size);
        return Ok(MatrixVariablePoly::new(size, d.poly.pow(k)));
    }
    if let Some(jl) = s.strip_prefix('z') {
        let d: Vec<usize> = jl.chars().map(|c| c.to_digit(10).map(|v| v as usize)).collect::<Option<_>>().unwrap_or_default();
        if let [j, l] = d[..] {
            if (1..=size).contains(&j) && (1..=size).contains(&l) {
                return Ok(MatrixVariablePoly::entry(size, j - 1, l - 1));
            }
        }
    }
    Err(usage(format!("unknown matrix polynomial '{s}' (det, det^k, z<j><l>)")))
}

fn run_pde(cmd: &PdeCmd) -> Result<Value, Failure> {
    match cmd {
        PdeCmd::PlaneWave { g, alpha, f } => {
            let grp = load_group(g)?;
            let a: Vec<Complex64> = alpha.split(',').map(complex).collect::<Result<_, _>>()?;
            let f: UniFn = f.parse().map_err(usage)?;
            Ok(to_value(&pde::plane_wave_check(&grp, &Alpha::Float(a), f)?))
        }
        PdeCmd::Separated { g, funcs } => {
            let grp = load_group(g)?;
            let fs: Vec<MultiFn> = funcs.split(';').map(|t| t.trim().parse().map_err(usage)).collect::<Result<_, _>>()?;
            Ok(to_value(&pde::separated_solution_residual(&grp, &fs)?))
        }
        PdeCmd::Operator(a) => {
            let grp = load_group(a)?;
            let spec = pde::OperatorSpec::from_group(&grp)?;
            let chart = pde::SeparationChart::new(&grp)?;
            Ok(json!({
                "order": spec.order,
                "factors_consistent": spec.factors_consistent(),
                "chart_inverse_pair": chart.is_inverse_pair(),
                "terms": spec.terms().len(),
            }))
        }
        PdeCmd::Cayley { size, poly } => {
            let q = parse_matrix_poly(*size, poly)?;
            let out = pde::cayley_omega_apply(&q)?;
            let names = MatrixVariablePoly::names(*size);
            Ok(json!({"input": q.poly.pretty(&names), "output": out.poly.pretty(&names), "polynomial": to_value(&out.poly.to_json(&names))}))
        }
        PdeCmd::Polarization { size, j, l, r } => {
            let q = MatrixVariablePoly::det(*size);
            Ok(to_value(&pde::polarization_commutator_check(*size, *j, *l, *r, &q)?))
        }
        PdeCmd::Omega9 { f, point } => {
            let f: GaussPoly = f.parse().map_err(usage)?;
            let p = floats(point)?;
            let p: [f64; 9] = p.try_into().map_err(|_| usage("point needs 9 coordinates"))?;
            Ok(to_value(&pde::omega9_kernel_residual(&f, &p)?))
        }
    }
}

fn john_params(a: &JohnArgs) -> Result<JohnParams, Failure> {
    let l = floats(&a.lambda)?;
    let al = floats(&a.alpha)?;
    let be = floats(&a.beta)?;
    Ok(JohnParams {
        lambda: l.try_into().map_err(|_| usage("lambda needs 3 values"))?,
        alpha: al.try_into().map_err(|_| usage("alpha needs 2 values"))?,
        beta: be.try_into().map_err(|_| usage("beta needs 2 values"))?,
    })
}

fn run_john(cmd: &JohnCmd) -> Result<Value, Failure> {
    let cfg = QuadConfig::default();
    match cmd {
        JohnCmd::Numeric(a) => Ok(to_value(&pde::john_transform_numeric(&john_params(a)?, &cfg)?)),
        JohnCmd::Closed(a) => {
            let v = pde::john_hypergeometric_closed(&john_params(a)?)?;
            Ok(json!({"value": v, "error_estimate": 0.0}))
        }
        JohnCmd::Compare(a) => {
            let p = john_params(a)?;
            let num = pde::john_transform_numeric(&p, &cfg)?;
            let closed = pde::john_hypergeometric_closed(&p)?;
            Ok(json!({"numeric": to_value(&num), "closed": closed, "abs_diff": (num.value - closed).abs()}))
        }
    }
}

fn run_efun(cmd: &EfunCmd) -> Result<Value, Failure> {
    match cmd {
        EfunCmd::Tables { n } => {
            let s = efun::falling_factorial_coeffs(*n)?;
            let (a, c) = efun::hilbert_c_coeffs(*n)?;
            let sigma = efun::sigma_coeffs(*n)?;
            Ok(json!({
                "stirling_s": to_value(&s),
                "hilbert_a": to_value(&a),
                "c_coeff": to_value(&c),
                "sigma": to_value(&sigma),
                "convolution_identity_holds": efun::convolution_identity_check(*n).is_none(),
            }))
        }
        EfunCmd::OdeCoeffs { n } => {
            let spec = efun::ode_coeffs(*n)?;
            let pretty: Vec<String> = spec.a.iter().map(|p| p.pretty()).collect();
            Ok(json!({"n": n, "coefficients": to_value(&spec.a), "pretty": pretty}))
        }
        EfunCmd::Eval { kind, n, nu, x, terms } => {
            let kind: SeriesKind = kind.parse().map_err(usage)?;
            let nu = efun::parse_rational(nu).map_err(usage)?;
            let s = RationalSeries::build(kind, *n, &nu, *terms)?;
            let x = floats(x)?;
            let v = if kind == SeriesKind::F { s.eval_multi(&x)? } else { s.eval(x[0])? };
            Ok(to_value(&v))
        }
        EfunCmd::Residual { n, nu, p, terms, xs } => {
            let nu = efun::parse_rational(nu).map_err(usage)?;
            Ok(to_value(&efun::ode_residual(*n, &nu, *p, &floats(xs)?, *terms)?))
        }
        EfunCmd::Denominators { n, nu, terms } => {
            let nu = efun::parse_rational(nu).map_err(usage)?;
            Ok(to_value(&efun::efun_denominator_bound(*n, &nu, *terms)?))
        }
        EfunCmd::Bracket { f, x0, r, x } => {
            let f: MultiFn = f.parse().map_err(usage)?;
            let v = efun::bracket_apply(&f, &floats(x0)?, *r, &floats(x)?)?;
            Ok(json!({"value": v}))
        }
        EfunCmd::Solve { n, lambda, phi, x0, points, lo, hi } => {
            let lambda: MultiFn = lambda.parse().map_err(usage)?;
            let phis: Vec<MultiFn> = phi.split(';').map(|t| t.trim().parse().map_err(usage)).collect::<Result<_, _>>()?;
            let data = BoundaryData::new(floats(x0)?, phis)?;
            let grid = efun::tensor_grid(*n, *lo, *hi, *points);
            Ok(to_value(&efun::eigen_solve(*n, &lambda, &data, &grid)?))
        }
    }
}

fn run_lie(cmd: &LieCmd) -> Result<Value, Failure> {
    match cmd {
        LieCmd::Summary(a) => {
            let g = load_group(a)?;
            let s = frobgroup::center_derived_dims(&g);
            let b = frobgroup::bracket_identity_check(&g);
            let u = frobgroup::unit_dims_check(&g)?;
            Ok(json!({
                "r": s.r,
                "derived_dim": s.derived_dim,
                "bracket_ok": b.holds,
                "degrees": u.degrees,
                "direct_sum": s.direct_sum,
                "brackets": to_value(&b),
                "structure": to_value(&s),
            }))
        }
        LieCmd::Generators(a) => Ok(to_value(&frobgroup::lie_generators(&load_group(a)?))),
        LieCmd::Convolve { g, a, b } => {
            let grp = load_group(g)?;
            let (a, b) = (rationals(a)?, rationals(b)?);
            if a.len() != grp.order() || b.len() != grp.order() {
                return Err(usage(format!("need {} coefficients per vector", grp.order())));
            }
            let c = frobgroup::convolve(&grp, &a, &b);
            Ok(json!({"c": c.iter().map(qjson).collect::<Vec<_>>()}))
        }
        LieCmd::Inverse { g, a } => {
            let grp = load_group(g)?;
            let a = rationals(a)?;
            let u = frobgroup::frobenius_inverse(&grp, &a)?;
            let check = frobgroup::convolve(&grp, &a, &u) == frobgroup::delta_e::<BigRational>(grp.order());
            Ok(json!({"u": u.iter().map(qjson).collect::<Vec<_>>(), "round_trip": check}))
        }
    }
}

fn run_afrob(cmd: &AfrobCmd, seed: u64) -> Result<Value, Failure> {
    match cmd {
        AfrobCmd::Check { n } => {
            if *n == 0 {
                return Err(usage("n must be positive"));
            }
            let z = afrob::random_point(*n, seed);
            let s = afrob::structure_checks(&z, seed, 20)?;
            let zp = afrob::random_positive_point(*n, seed);
            let p = afrob::potential_check(&zp)?;
            let c = afrob::scaling_checks(&z, &BigRational::new(3.into(), 2.into()), 0.5, seed)?;
            Ok(json!({
                "z": z.iter().map(qjson).collect::<Vec<_>>(),
                "structure": to_value(&s),
                "potential_point": zp,
                "potential": to_value(&p),
                "scaling": to_value(&c),
                "all_ok": s.all_ok && p.ok && c.product_exact,
            }))
        }
        AfrobCmd::Product { z, x, y } => {
            let v = afrob::frob_product(&rationals(z)?, &rationals(x)?, &rationals(y)?)?;
            Ok(json!({"product": v.iter().map(qjson).collect::<Vec<_>>()}))
        }
        AfrobCmd::Potential { z } => Ok(to_value(&afrob::potential_check(&floats(z)?)?)),
    }
}

fn emit(cli: Option<&Cli>, body: &Value) -> Result<(), String> {
    let text = serde_json::to_string_pretty(body).expect("serializable") + "\n";
    match cli.and_then(|c| c.out.as_deref()) {
        Some(path) => fs::write(path, text).map_err(|e| format!("cannot write {path}: {e}")),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let config = to_value(&cli);
    let (body, code) = match run(&cli) {
        Ok(result) => (json!({"config": config, "result": result}), 0),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(1);
        }
        Err(Failure::Domain(e)) => {
            eprintln!("error: {e}");
            (
                json!({"config": config, "error": {"module": e.module(), "code": e.code(), "message": e.to_string()}}),
                2,
            )
        }
    };
    if let Err(msg) = emit(Some(&cli), &body) {
        eprintln!("error: {msg}");
        return ExitCode::from(1);
    }
    ExitCode::from(code)
}
