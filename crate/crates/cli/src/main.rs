use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use mubforge::analysis::{
    check_mu_set, class_structure, commuting_classes, complementarity_check, entanglement_content,
    fourier_linear_constraints, maximally_entangled, qrac_probability, welch_and_design_check,
    witness_value,
};
use mubforge::catalogue::{defect, haagerup_set, structure_flags, CatalogueEntry, Family};
use mubforge::constructions::{
    approx_mub, construct_complete, latin_square_mubs_default, product_family_d6, tensor_mubs,
    weighted_design, ProductFamily, ProductParams,
};
use mubforge::finite_algebra::factorize;
use mubforge::io::{DocumentKind, MatrixDocument};
use mubforge::numeric::{is_hadamard, Method};
use mubforge::search::{
    constellation_search, extension_probe, group_into_bases, mu_vectors_to_all,
    mu_vectors_to_pair, ConstellationSpec, Optimizer, SearchConfig,
};
use mubforge::{Error, HadamardMatrix, MubSet, OrthonormalBasis, ToleranceProfile};

#[derive(Parser)]
#[command(name = "mubforge", version, about = "Mutually unbiased bases and complex Hadamard matrices")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build a collection of MU bases.
    Construct(ConstructArgs),
    /// Generate a Hadamard matrix from the catalogue and print its invariants.
    Catalogue(CatalogueArgs),
    /// Run checks on a stored document.
    Verify(VerifyArgs),
    /// Search for MU vectors or constellations.
    Search(SearchArgs),
    /// Compare equivalence invariants of two Hadamard matrices.
    Equiv(EquivArgs),
    /// Re-export a document or a catalogue matrix.
    Export(ExportArgs),
}

#[derive(Args)]
struct ConstructArgs {
    #[arg(long)]
    method: String,
    #[arg(long)]
    d: usize,
    /// Product family for product_family_d6 (P0..P3, T0, T1).
    #[arg(long)]
    family: Option<String>,
    /// Comma-separated key=value pairs.
    #[arg(long, default_value = "")]
    params: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CatalogueArgs {
    #[arg(long)]
    family: Option<String>,
    #[arg(long, default_value_t = 6)]
    d: usize,
    #[arg(long, default_value = "")]
    params: String,
    /// List families and their parameters.
    #[arg(long)]
    list: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Comma-separated: mu, welch, design, entanglement, witness, fourier, qrac,
    /// classes, complementarity, hadamard, defect.
    #[arg(long, default_value = "mu")]
    checks: String,
    /// Factorization `d1xd2` for the entanglement check.
    #[arg(long)]
    split: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SearchArgs {
    /// Hadamard matrix H for the pair {I, H}: a catalogue family name or fourier<d>.
    #[arg(long)]
    pair: Option<String>,
    #[arg(long, default_value = "")]
    params: String,
    /// Matrix document to pair with the identity.
    #[arg(long = "in")]
    input: Option<PathBuf>,
    /// Basis-collection document; searches vectors MU to all of its bases.
    #[arg(long)]
    mubset: Option<PathBuf>,
    /// Constellation parts, e.g. 5,3,3,1 (with --d).
    #[arg(long)]
    constellation: Option<String>,
    #[arg(long, default_value_t = 6)]
    d: usize,
    #[arg(long, default_value_t = 10000)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    optimizer: Option<String>,
    /// Probe every basis found for further extension.
    #[arg(long)]
    extend: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EquivArgs {
    #[arg(long)]
    a: PathBuf,
    #[arg(long)]
    b: PathBuf,
}

#[derive(Args)]
struct ExportArgs {
    #[arg(long = "in")]
    input: Option<PathBuf>,
    #[arg(long)]
    family: Option<String>,
    #[arg(long, default_value_t = 6)]
    d: usize,
    #[arg(long, default_value = "")]
    params: String,
    /// json or table.
    #[arg(long, default_value = "json")]
    format: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Outcome of a command that ran to completion.
enum Outcome {
    Ok,
    Failed,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.cmd {
        Cmd::Construct(a) => construct(a),
        Cmd::Catalogue(a) => catalogue(a),
        Cmd::Verify(a) => verify(a),
        Cmd::Search(a) => search(a),
        Cmd::Equiv(a) => equiv(a),
        Cmd::Export(a) => export(a),
    };
    match res {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Failed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn parse_params(s: &str) -> Result<Vec<(String, f64)>, Error> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| {
            let (k, v) = p
                .split_once('=')
                .ok_or_else(|| Error::domain(format!("parameter `{p}` is not key=value")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::domain(format!("parameter `{p}` has a non-numeric value")))?;
            Ok((k.trim().to_string(), v))
        })
        .collect()
}

fn take(params: &[(String, f64)], allowed: &[&str]) -> Result<(), Error> {
    for (k, _) in params {
        if !allowed.contains(&k.as_str()) {
            return Err(Error::domain(format!(
                "unknown parameter `{k}` (expected one of: {})",
                allowed.join(", ")
            )));
        }
    }
    Ok(())
}

fn get(params: &[(String, f64)], key: &str) -> Option<f64> {
    params.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
}

fn write_out(path: &Option<PathBuf>, doc: &MatrixDocument) -> Result<(), Error> {
    if let Some(p) = path {
        fs::write(p, doc.to_json() + "\n")
            .map_err(|e| Error::Format(format!("cannot write {}: {e}", p.display())))?;
        println!("wrote {}", p.display());
    }
    Ok(())
}

fn read_doc(path: &Path) -> Result<MatrixDocument, Error> {
    let s = fs::read_to_string(path)
        .map_err(|e| Error::Format(format!("cannot read {}: {e}", path.display())))?;
    MatrixDocument::from_json(&s)
}

fn build_set(a: &ConstructArgs) -> Result<MubSet, Error> {
    let params = parse_params(&a.params)?;
    let method = Method::parse(&a.method)
        .ok_or_else(|| Error::domain(format!("unknown method `{}`", a.method)))?;
    match method {
        Method::TensorProduct => tensor_mubs(a.d),
        Method::LatinSquare => {
            let s = (a.d as f64).sqrt().round() as usize;
            if s * s != a.d {
                return Err(Error::domain("latin_square needs d = s^2"));
            }
            latin_square_mubs_default(s)
        }
        Method::WeightedDesign => weighted_design(a.d),
        Method::Approx => {
            take(&params, &["p"])?;
            Ok(approx_mub(a.d, get(&params, "p").map(|p| p as u64))?.set)
        }
        Method::ProductFamilyD6 => {
            if a.d != 6 {
                return Err(Error::domain("product families live in d = 6"));
            }
            let fam = a.family.as_deref().unwrap_or("P0");
            let which = ProductFamily::parse(fam)
                .ok_or_else(|| Error::domain(format!("unknown product family `{fam}`")))?;
            let names = ["xi", "eta", "zeta", "chi", "sigma", "tau"];
            take(&params, &names)?;
            let mut pp = ProductParams::default();
            for (k, v) in &params {
                match k.as_str() {
                    "xi" => pp.xi = *v,
                    "eta" => pp.eta = *v,
                    "zeta" => pp.zeta = *v,
                    "chi" => pp.chi = *v,
                    "sigma" => pp.sigma = *v,
                    _ => pp.tau = *v,
                }
            }
            product_family_d6(which, &pp)
        }
        Method::Imported => Err(Error::domain("`imported` is not a construction")),
        m => construct_complete(m, a.d),
    }
}

fn construct(a: ConstructArgs) -> Result<Outcome, Error> {
    let set = build_set(&a)?;
    let tol = ToleranceProfile::default();
    println!("{:<22} {:>4} {:>6} {:>14} {:>14}", "method", "d", "bases", "max_mu_dev", "f_value");
    let (dev, f) = if set.len() >= 2 {
        let r = check_mu_set(&set)?;
        (r.max_mu_deviation, r.f_value)
    } else {
        (0.0, 0.0)
    };
    println!(
        "{:<22} {:>4} {:>6} {:>14.3e} {:>14.3e}",
        set.method().name(),
        set.dim(),
        set.len(),
        dev,
        f
    );
    if set.method() == Method::Approx {
        let p = set.params().iter().find(|(k, _)| k == "p").map_or(0, |(_, v)| *v as u64);
        let r = approx_mub(set.dim(), Some(p))?;
        println!("max |<u|v>|^2: {:.12} (p = {p}, sqrt(p)/d = {:.6})", r.max_overlap, r.bound);
    }
    if let Some(w) = set.weights() {
        let ws: Vec<String> = w.iter().map(|x| format!("{x:.6}")).collect();
        println!("weights: {}", ws.join(" "));
    }
    write_out(&a.out, &MatrixDocument::from_mubset(&set))?;
    let exact = !matches!(set.method(), Method::Approx | Method::WeightedDesign);
    Ok(if !exact || set.is_mutually_unbiased(&tol) {
        Outcome::Ok
    } else {
        Outcome::Failed
    })
}

fn family_matrix(name: &str, d: usize, params: &str) -> Result<HadamardMatrix, Error> {
    let params = parse_params(params)?;
    let (family, order) = match name.strip_prefix("fourier").and_then(|s| s.parse::<usize>().ok()) {
        Some(n) => (Family::Fourier, n),
        None => {
            let alias = match name {
                "s6" => "tao_s6",
                "c6" => "bjorck_c6",
                "f6" => "fourier6_family",
                other => other,
            };
            if alias == "dita_d6" || alias == "d6" {
                take(&params, &[])?;
                return mubforge::catalogue::dita_d6();
            }
            let f = Family::parse(alias)
                .ok_or_else(|| Error::domain(format!("unknown family `{name}`")))?;
            (f, if f == Family::Fourier { d } else { 6 })
        }
    };
    let entry = CatalogueEntry::new(family, order)?;
    let names = family.param_names();
    take(&params, names)?;
    let values = names
        .iter()
        .map(|n| get(&params, n).ok_or_else(|| Error::domain(format!("missing parameter `{n}`"))))
        .collect::<Result<Vec<f64>, Error>>()?;
    entry.generate(&values)
}

fn print_invariants(h: &HadamardMatrix) -> Value {
    let tol = ToleranceProfile::default();
    let flags = structure_flags(h, &tol);
    let def = defect(h);
    let hs = haagerup_set(h, 1e-6);
    let opt = |o: Option<usize>| o.map_or("-".to_string(), |v| v.to_string());
    println!("order                {}", h.dim());
    println!("butson order         {}", opt(flags.butson_order));
    println!("real                 {}", flags.is_real);
    println!("circulant            {}", flags.is_circulant);
    println!("H2-reducible         {}", flags.h2_reducible);
    if let Some(s) = flags.has_subunitary_3x3 {
        println!("3x3 subunitary       {s}");
    }
    println!("defect               {}", def.defect);
    println!("haagerup set size    {}", hs.values.len());
    json!({ "flags": flags, "defect": def, "haagerup_set_size": hs.values.len() })
}

fn catalogue(a: CatalogueArgs) -> Result<Outcome, Error> {
    if a.list {
        println!("{:<18} params", "family");
        for f in Family::ALL {
            println!("{:<18} {}", f.name(), f.param_names().join(","));
        }
        println!("{:<18} (explicit order-6 matrix)", "dita_d6");
        return Ok(Outcome::Ok);
    }
    let name = a
        .family
        .as_deref()
        .ok_or_else(|| Error::domain("--family or --list is required"))?;
    let h = family_matrix(name, a.d, &a.params)?;
    println!("family               {name}");
    let report = print_invariants(&h);
    let mut doc = MatrixDocument::from_hadamard(&h);
    doc.metadata.method = Some(name.to_string());
    doc.metadata.params = parse_params(&a.params)?;
    doc.report = Some(report);
    write_out(&a.out, &doc)?;
    Ok(Outcome::Ok)
}

fn parse_split(s: &str) -> Result<(usize, usize), Error> {
    let (x, y) = s
        .split_once('x')
        .ok_or_else(|| Error::domain("--split expects d1xd2"))?;
    let p = |t: &str| t.parse::<usize>().map_err(|_| Error::domain("--split expects d1xd2"));
    Ok((p(x)?, p(y)?))
}

fn default_split(d: usize) -> Option<(usize, usize)> {
    let f = factorize(d as u64);
    let p = f.first()?.0 as usize;
    (p < d).then_some((p, d / p))
}

fn line(name: &str, ok: bool, detail: String) -> bool {
    println!("{:<16} {:<5} {}", name, if ok { "pass" } else { "FAIL" }, detail);
    ok
}

fn verify(a: VerifyArgs) -> Result<Outcome, Error> {
    let doc = read_doc(&a.input)?;
    let checks: Vec<&str> = a.checks.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    let tol = ToleranceProfile::default();
    let mut all_ok = true;
    let mut report = serde_json::Map::new();
    match doc.kind {
        DocumentKind::Matrix => {
            let m = doc.to_matrix()?;
            for c in checks {
                match c {
                    "hadamard" => {
                        let r = is_hadamard(&m, &tol)?;
                        all_ok &= line(
                            "hadamard",
                            r.is_hadamard,
                            format!(
                                "unitarity {:.1e}, modulus {:.1e}",
                                r.unitarity_deviation, r.modulus_deviation
                            ),
                        );
                        report.insert("hadamard".into(), json!(r));
                    }
                    "defect" => {
                        let h = HadamardMatrix::new(m.clone(), &tol)?;
                        let r = defect(&h);
                        line("defect", true, format!("{}", r.defect));
                        report.insert("defect".into(), json!(r));
                    }
                    other => return Err(Error::domain(format!("check `{other}` does not apply to a matrix"))),
                }
            }
        }
        DocumentKind::Mubset => {
            let set = doc.to_mubset(&tol)?;
            let d = set.dim();
            let df = d as f64;
            let complete = set.len() == d + 1;
            for c in checks {
                match c {
                    "mu" => {
                        let r = check_mu_set(&set)?;
                        all_ok &= line(
                            "mu",
                            r.passes(&tol),
                            format!(
                                "bases {} max_mu_dev {:.3e} f_value {:.3e} avg_distance {:.6}",
                                r.num_bases, r.max_mu_deviation, r.f_value, r.avg_distance
                            ),
                        );
                        report.insert("mu".into(), json!(r));
                    }
                    "welch" => {
                        let r = welch_and_design_check(&set);
                        let n = (set.len() * d) as f64;
                        let (b1, b2) = (n * n / df, n * n / (df * (df + 1.0) / 2.0));
                        let ok = if complete {
                            (r.welch_k1 - df * (df + 1.0).powi(2)).abs() < 1e-9
                                && (r.welch_k2 - 2.0 * df * (df + 1.0)).abs() < 1e-9
                        } else {
                            r.welch_k1 >= b1 - 1e-9 && r.welch_k2 >= b2 - 1e-9
                        };
                        all_ok &= line(
                            "welch",
                            ok,
                            format!("welch_k1 = {:.6} welch_k2 = {:.6}", r.welch_k1, r.welch_k2),
                        );
                        report.insert("welch_k1".into(), json!(r.welch_k1));
                        report.insert("welch_k2".into(), json!(r.welch_k2));
                    }
                    "design" => {
                        let r = welch_and_design_check(&set);
                        all_ok &= line(
                            "design",
                            r.two_design_deviation < 1e-9,
                            format!(
                                "two_design_deviation {:.3e}{}",
                                r.two_design_deviation,
                                if r.weighted { " (weighted)" } else { "" }
                            ),
                        );
                        report.insert("two_design_deviation".into(), json!(r.two_design_deviation));
                    }
                    "entanglement" => {
                        let (d1, d2) = match &a.split {
                            Some(s) => parse_split(s)?,
                            None => default_split(d)
                                .ok_or_else(|| Error::domain("prime dimension; pass --split"))?,
                        };
                        let r = entanglement_content(&set, d1, d2)?;
                        all_ok &= line(
                            "entanglement",
                            r.holds,
                            format!("content {:.9} reference {}", r.content, r.reference),
                        );
                        report.insert("entanglement".into(), json!(r));
                    }
                    "witness" => {
                        let mu = set.len();
                        let r = witness_value(&set, mu, &maximally_entangled(d))?;
                        let ok = (r.value - mu as f64).abs() < 1e-9;
                        all_ok &= line(
                            "witness",
                            ok,
                            format!("value {:.9} bound {:.6} violated {}", r.value, r.bound, r.violated),
                        );
                        report.insert("witness".into(), json!(r));
                    }
                    "fourier" => {
                        let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
                        let gammas: Vec<Vec<i64>> = (0..20)
                            .map(|_| (0..d).map(|_| rng.random_range(-3..=3)).collect())
                            .collect();
                        let r = fourier_linear_constraints(&set, &gammas)?;
                        let d4 = df.powi(4);
                        let ok = r.max_residual < 1e-8 * d4
                            && (r.e0 - df.powi(3)).abs() < 1e-10 * d4
                            && (r.f0 - d4).abs() < 1e-10 * d4
                            && r.f_le_de;
                        all_ok &= line(
                            "fourier",
                            ok,
                            format!("E(0) {:.6} F(0) {:.6} max_residual {:.3e}", r.e0, r.f0, r.max_residual),
                        );
                        report.insert("fourier".into(), json!(r));
                    }
                    "qrac" => {
                        let p = qrac_probability(&set)?;
                        line("qrac", true, format!("{p:.9}"));
                        report.insert("qrac".into(), json!(p));
                    }
                    "classes" => {
                        let (comm, cross) = class_structure(&commuting_classes(&set));
                        all_ok &= line(
                            "classes",
                            comm < 1e-9 && cross < 1e-9,
                            format!("commutator {comm:.3e} cross-trace {cross:.3e}"),
                        );
                        report.insert("classes".into(), json!({"commutator": comm, "cross": cross}));
                    }
                    "complementarity" => {
                        let w = complementarity_check(&set);
                        all_ok &= line("complementarity", w < 1e-10, format!("{w:.3e}"));
                        report.insert("complementarity".into(), json!(w));
                    }
                    other => return Err(Error::domain(format!("unknown check `{other}`"))),
                }
            }
        }
        k => return Err(Error::domain(format!("cannot verify a {k:?} document"))),
    }
    if let Some(out) = &a.out {
        write_out(&Some(out.clone()), &MatrixDocument::from_report(doc.dim, &Value::Object(report))?)?;
    }
    Ok(if all_ok { Outcome::Ok } else { Outcome::Failed })
}

fn search(a: SearchArgs) -> Result<Outcome, Error> {
    let mut cfg = SearchConfig::new(a.seed, a.restarts)?;
    if let Some(o) = &a.optimizer {
        cfg.optimizer =
            Optimizer::parse(o).ok_or_else(|| Error::domain(format!("unknown optimizer `{o}`")))?;
    }
    if let Some(parts) = &a.constellation {
        if a.optimizer.is_none() {
            cfg.optimizer = Optimizer::QuasiNewtonF;
        }
        let parts = parts
            .split(',')
            .map(|t| t.trim().parse::<usize>().map_err(|_| Error::domain("bad constellation")))
            .collect::<Result<Vec<_>, _>>()?;
        let spec = ConstellationSpec::new(a.d, parts)?;
        let r = constellation_search(&spec, &cfg)?;
        println!(
            "{} params {} found {} successes {}/{} best {:.3e}",
            spec.label(),
            spec.param_count(),
            r.found,
            r.successes,
            r.attempts,
            r.best_residual
        );
        write_out(&a.out, &MatrixDocument::from_report(a.d, &r)?)?;
        return Ok(if r.found { Outcome::Ok } else { Outcome::Failed });
    }
    let (bases, label) = if let Some(p) = &a.mubset {
        let set = read_doc(p)?.to_mubset(&ToleranceProfile::default())?;
        (set.bases().to_vec(), format!("mubset {}", p.display()))
    } else {
        let (h, label) = match (&a.pair, &a.input) {
            (Some(name), None) => (family_matrix(name, a.d, &a.params)?, name.clone()),
            (None, Some(p)) => (
                read_doc(p)?.to_hadamard(&ToleranceProfile::default())?,
                p.display().to_string(),
            ),
            _ => return Err(Error::domain("give exactly one of --pair, --in, --mubset, --constellation")),
        };
        (vec![OrthonormalBasis::standard(h.dim()), h.as_basis()], label)
    };
    let sol = if bases.len() == 2 && bases[0] == OrthonormalBasis::standard(bases[0].dim()) {
        let h = HadamardMatrix::new(bases[1].matrix().clone(), &ToleranceProfile::default())?;
        let mut s = mu_vectors_to_pair(&h, &cfg)?;
        s.label = label.clone();
        s
    } else {
        mu_vectors_to_all(&bases, &cfg, &label)?
    };
    println!("target               {label}");
    println!("count                {}", sol.len());
    println!("restarts             {} (converged {})", sol.restarts, sol.converged);
    println!(
        "max residual         {:.3e}",
        sol.residuals.iter().copied().fold(0.0, f64::max)
    );
    if sol.coverage_warning {
        println!("warning              new solutions still appeared in the last 20% of restarts");
    }
    if sol.continuum_suspected {
        println!("warning              solutions accumulate; a continuum is likely");
    }
    let mut doc = MatrixDocument::from_solutions(&sol);
    if sol.len() <= mubforge::search::MAX_CLIQUE_VERTICES {
        let found = group_into_bases(&sol, ToleranceProfile::default().eps_orth)?;
        println!("bases                {}", found.len());
        if a.extend {
            for (i, b) in found.iter().enumerate() {
                let mut ext = bases.clone();
                ext.push(b.clone());
                let r = extension_probe(&ext, &cfg)?;
                println!(
                    "  basis {:>2}: {} further vectors, extends: {}",
                    i, r.extra_vectors, r.extends_to_basis
                );
            }
        }
        if let Some(Value::Object(m)) = doc.report.as_mut() {
            m.insert("bases".into(), json!(found.len()));
        }
    }
    write_out(&a.out, &doc)?;
    Ok(if sol.is_empty() { Outcome::Failed } else { Outcome::Ok })
}

fn equiv(a: EquivArgs) -> Result<Outcome, Error> {
    let tol = ToleranceProfile::default();
    let ha = read_doc(&a.a)?.to_hadamard(&tol)?;
    let hb = read_doc(&a.b)?.to_hadamard(&tol)?;
    if ha.dim() != hb.dim() {
        println!("inequivalent: orders {} and {}", ha.dim(), hb.dim());
        return Ok(Outcome::Failed);
    }
    let (sa, sb) = (haagerup_set(&ha, 1e-6), haagerup_set(&hb, 1e-6));
    let (da, db) = (defect(&ha).defect, defect(&hb).defect);
    println!("{:<16} {:>10} {:>10}", "", "a", "b");
    println!("{:<16} {:>10} {:>10}", "haagerup size", sa.values.len(), sb.values.len());
    println!("{:<16} {:>10} {:>10}", "defect", da, db);
    if sa.matches(&sb, 1e-6) && da == db {
        println!("invariants agree");
        Ok(Outcome::Ok)
    } else {
        println!("inequivalent");
        Ok(Outcome::Failed)
    }
}

fn export(a: ExportArgs) -> Result<Outcome, Error> {
    let doc = match (&a.input, &a.family) {
        (Some(p), None) => read_doc(p)?,
        (None, Some(f)) => {
            let mut doc = MatrixDocument::from_hadamard(&family_matrix(f, a.d, &a.params)?);
            doc.metadata.method = Some(f.clone());
            doc.metadata.params = parse_params(&a.params)?;
            doc
        }
        _ => return Err(Error::domain("give exactly one of --in, --family")),
    };
    match a.format.as_str() {
        "json" => match &a.out {
            Some(_) => write_out(&a.out, &doc)?,
            None => println!("{}", doc.to_json()),
        },
        "table" => {
            let d = doc.dim;
            for (b, block) in doc.payload.iter().enumerate() {
                if doc.payload.len() > 1 {
                    println!("block {b}");
                }
                for row in block.chunks(d) {
                    let cells: Vec<String> = row
                        .iter()
                        .map(|[re, im]| format!("{re:>9.5}{im:+.5}i"))
                        .collect();
                    println!("{}", cells.join("  "));
                }
            }
        }
        f => return Err(Error::domain(format!("unknown format `{f}`"))),
    }
    Ok(Outcome::Ok)
}
