//! Numerical searches: vectors MU to a given set of bases, grouping them into
//! bases, constellation optimization and extension probes.
//!
//! Restarts are split into fixed-size chunks. Each restart draws from its own
//! ChaCha stream keyed by `(seed, restart index)` and chunks are merged in
//! index order, so the output does not depend on the number of workers.

use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{
    c, canonicalize, cis, inner, projective_distance, CMatrix, HadamardMatrix, OrthonormalBasis,
    ToleranceProfile, C64,
};

const CHUNK: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Optimizer {
    /// Damped Gauss-Newton on the residual vector.
    NewtonResidual,
    /// BFGS on the sum of squared residuals.
    QuasiNewtonF,
}

impl Optimizer {
    pub fn parse(s: &str) -> Option<Optimizer> {
        match s {
            "newton_residual" => Some(Optimizer::NewtonResidual),
            "quasi_newton_f" => Some(Optimizer::QuasiNewtonF),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub seed: u64,
    pub restarts: usize,
    pub newton_max_iter: usize,
    pub newton_tol: f64,
    pub dedup_tol: f64,
    pub optimizer: Optimizer,
    /// Iteration cap for the quasi-Newton optimizer.
    pub qn_max_iter: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            seed: 0,
            restarts: 1000,
            newton_max_iter: 200,
            newton_tol: 1e-12,
            dedup_tol: 1e-6,
            optimizer: Optimizer::NewtonResidual,
            qn_max_iter: 3000,
        }
    }
}

impl SearchConfig {
    pub fn new(seed: u64, restarts: usize) -> Result<Self> {
        let cfg = SearchConfig {
            seed,
            restarts,
            ..Default::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_optimizer(mut self, optimizer: Optimizer) -> Self {
        self.optimizer = optimizer;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::domain("restarts must be at least 1"));
        }
        if self.newton_max_iter == 0 || self.qn_max_iter == 0 {
            return Err(Error::domain("iteration caps must be positive"));
        }
        if !(self.newton_tol > 0.0 && self.dedup_tol > 0.0) {
            return Err(Error::domain("tolerances must be positive"));
        }
        Ok(())
    }
}

/// Worker count: available parallelism, capped by `MUBFORGE_THREADS` when set.
pub fn worker_count() -> usize {
    let avail = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1);
    match std::env::var("MUBFORGE_THREADS")
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
    {
        Some(n) if n >= 1 => n,
        _ => avail,
    }
}

fn run_chunks<T, F>(restarts: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(std::ops::Range<usize>) -> T + Sync + Send,
{
    let chunks: Vec<std::ops::Range<usize>> = (0..restarts)
        .step_by(CHUNK)
        .map(|s| s..(s + CHUNK).min(restarts))
        .collect();
    let work = || chunks.par_iter().cloned().map(&f).collect::<Vec<T>>();
    match rayon::ThreadPoolBuilder::new()
        .num_threads(worker_count())
        .build()
    {
        Ok(pool) => pool.install(work),
        Err(_) => chunks.into_iter().map(f).collect(),
    }
}

fn restart_rng(seed: u64, index: usize) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// A least-squares problem in real parameters.
trait Residuals: Sync {
    fn n_params(&self) -> usize;
    fn n_res(&self) -> usize;
    fn eval(&self, x: &[f64], r: &mut [f64], jac: Option<&mut DMatrix<f64>>);
}

fn half_sq(r: &[f64]) -> f64 {
    0.5 * r.iter().map(|v| v * v).sum::<f64>()
}

fn max_abs(r: &[f64]) -> f64 {
    r.iter().fold(0.0f64, |a, &b| a.max(b.abs()))
}

/// Damped Gauss-Newton with Armijo backtracking. Returns the final point and
/// the largest absolute residual.
fn gauss_newton<P: Residuals>(
    p: &P,
    mut x: Vec<f64>,
    max_iter: usize,
    tol: f64,
) -> (Vec<f64>, f64) {
    let (n, m) = (p.n_params(), p.n_res());
    let mut r = vec![0.0; m];
    let mut rt = vec![0.0; m];
    let mut jac = DMatrix::zeros(m, n);
    let mut xt = vec![0.0; n];
    let mut slow = 0;
    for _ in 0..max_iter {
        p.eval(&x, &mut r, Some(&mut jac));
        if max_abs(&r) < tol {
            break;
        }
        let rv = DVector::from_column_slice(&r);
        let g = jac.transpose() * &rv;
        let a = jac.transpose() * &jac;
        let scale = a.diagonal().max().max(1.0);
        let mut lambda = 1e-12 * scale;
        let step = loop {
            let mut al = a.clone();
            for i in 0..n {
                al[(i, i)] += lambda;
            }
            if let Some(ch) = al.cholesky() {
                break Some(ch.solve(&(-&g)));
            }
            lambda *= 100.0;
            if lambda > 1e6 * scale {
                break None;
            }
        };
        let Some(step) = step else { break };
        let phi0 = half_sq(&r);
        let slope = g.dot(&step);
        let mut t = 1.0;
        let mut accepted = false;
        while t > 1e-10 {
            for i in 0..n {
                xt[i] = x[i] + t * step[i];
            }
            p.eval(&xt, &mut rt, None);
            if half_sq(&rt) <= phi0 + 1e-4 * t * slope {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
        // A local minimum with nonzero residual: stop once progress stalls.
        if half_sq(&rt) > 0.99 * phi0 {
            slow += 1;
            if slow >= 5 {
                std::mem::swap(&mut x, &mut xt);
                break;
            }
        } else {
            slow = 0;
        }
        std::mem::swap(&mut x, &mut xt);
    }
    p.eval(&x, &mut r, None);
    (x, max_abs(&r))
}

/// BFGS on `F = sum r^2`. Returns the final point and `F`.
fn bfgs<P: Residuals>(p: &P, mut x: Vec<f64>, max_iter: usize, f_stop: f64) -> (Vec<f64>, f64) {
    let (n, m) = (p.n_params(), p.n_res());
    let mut r = vec![0.0; m];
    let mut jac = DMatrix::zeros(m, n);
    let eval = |x: &[f64], r: &mut Vec<f64>, jac: &mut DMatrix<f64>| -> (f64, DVector<f64>) {
        p.eval(x, r, Some(jac));
        let rv = DVector::from_column_slice(r);
        let f = rv.norm_squared();
        (f, jac.transpose() * rv * 2.0)
    };
    let (mut f, mut g) = eval(&x, &mut r, &mut jac);
    let mut h = DMatrix::<f64>::identity(n, n);
    let mut first = true;
    let mut stall = 0;
    for _ in 0..max_iter {
        if f < f_stop || g.amax() < 1e-18 {
            break;
        }
        let mut d = -(&h * &g);
        let mut slope = g.dot(&d);
        if slope >= 0.0 {
            h.fill_with_identity();
            d = -g.clone();
            slope = -g.norm_squared();
        }
        let mut t = 1.0;
        let mut next = None;
        while t > 1e-12 {
            let xt: Vec<f64> = x.iter().zip(d.iter()).map(|(a, b)| a + t * b).collect();
            let (ft, gt) = eval(&xt, &mut r, &mut jac);
            if ft <= f + 1e-4 * t * slope {
                next = Some((xt, ft, gt));
                break;
            }
            t *= 0.5;
        }
        let Some((xn, fnew, gn)) = next else { break };
        let s = DVector::from_iterator(n, xn.iter().zip(x.iter()).map(|(a, b)| a - b));
        let y = &gn - &g;
        let sy = s.dot(&y);
        if sy > 1e-300 {
            if first {
                h *= sy / y.norm_squared();
                first = false;
            }
            let rho = 1.0 / sy;
            let hy = &h * &y;
            let yhy = y.dot(&hy);
            // H + (1 + rho yHy) rho s s^T - rho (Hy s^T + s (Hy)^T)
            h += (&s * s.transpose()) * (rho * (1.0 + rho * yhy))
                - (&hy * s.transpose() + &s * hy.transpose()) * rho;
        }
        if fnew > f * (1.0 - 1e-10) {
            stall += 1;
            if stall > 50 {
                x = xn;
                f = fnew;
                break;
            }
        } else {
            stall = 0;
        }
        x = xn;
        f = fnew;
        g = gn;
    }
    (x, f)
}

/// Vectors with `|<h|psi>|^2 = 1/d` for every column `h` of the stored
/// matrices, parameterized by the phases of components `1..d`.
struct UnbiasedProblem {
    d: usize,
    /// Conjugated columns, one per constraint.
    cols: Vec<Vec<C64>>,
}

impl UnbiasedProblem {
    fn psi(&self, x: &[f64]) -> Vec<C64> {
        let s = 1.0 / (self.d as f64).sqrt();
        std::iter::once(c(s, 0.0))
            .chain(x.iter().map(|&t| cis(t) * s))
            .collect()
    }
}

impl Residuals for UnbiasedProblem {
    fn n_params(&self) -> usize {
        self.d - 1
    }

    fn n_res(&self) -> usize {
        self.cols.len()
    }

    fn eval(&self, x: &[f64], r: &mut [f64], mut jac: Option<&mut DMatrix<f64>>) {
        let psi = self.psi(x);
        let inv_d = 1.0 / self.d as f64;
        for (j, h) in self.cols.iter().enumerate() {
            let a: C64 = h.iter().zip(&psi).map(|(u, v)| u * v).sum();
            r[j] = a.norm_sqr() - inv_d;
            if let Some(jm) = jac.as_deref_mut() {
                let ac = a.conj();
                for k in 1..self.d {
                    let da = h[k] * psi[k] * C64::i();
                    jm[(j, k - 1)] = 2.0 * (ac * da).re;
                }
            }
        }
    }
}

/// Deduplicated vectors MU to a collection of bases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorSolutionSet {
    pub label: String,
    pub dim: usize,
    pub vectors: Vec<Vec<C64>>,
    /// Largest `| |<h|v>|^2 - 1/d |` over the input bases, per vector.
    pub residuals: Vec<f64>,
    pub seed: u64,
    pub restarts: usize,
    pub converged: usize,
    /// Distinct solutions were still appearing in the last fifth of restarts.
    pub coverage_warning: bool,
    /// Two distinct converged solutions lie closer than `1e-3`.
    pub continuum_suspected: bool,
}

impl VectorSolutionSet {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

struct Found {
    vector: Vec<C64>,
    residual: f64,
    first_seen: usize,
}

fn insert_unique(list: &mut Vec<Found>, cand: Found, tol: f64) {
    for f in list.iter_mut() {
        if projective_distance(&f.vector, &cand.vector) < tol {
            if cand.first_seen < f.first_seen {
                *f = cand;
            }
            return;
        }
    }
    list.push(cand);
}

fn key(z: f64) -> i64 {
    (z * 1e8).round() as i64
}

fn lex_cmp(a: &[C64], b: &[C64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        let o = key(x.re).cmp(&key(y.re)).then(key(x.im).cmp(&key(y.im)));
        if o != Ordering::Equal {
            return o;
        }
    }
    Ordering::Equal
}

fn check_pairwise_mu(bases: &[OrthonormalBasis]) -> Result<usize> {
    let d = bases
        .first()
        .map(|b| b.dim())
        .ok_or_else(|| Error::domain("no bases given"))?;
    let tol = ToleranceProfile::default();
    for (i, a) in bases.iter().enumerate() {
        if a.dim() != d {
            return Err(Error::shape("bases differ in dimension"));
        }
        for b in &bases[i + 1..] {
            let g = a.matrix().adjoint() * b.matrix();
            let dev = g
                .iter()
                .fold(0.0f64, |m, z| m.max((z.norm_sqr() - 1.0 / d as f64).abs()));
            if dev >= tol.eps_mu {
                return Err(Error::domain(format!(
                    "input bases are not mutually unbiased (deviation {dev:.3e})"
                )));
            }
        }
    }
    Ok(d)
}

/// Largest `| |<h|v>|^2 - 1/d |` over every column of every basis.
pub fn mu_residual(v: &[C64], bases: &[OrthonormalBasis]) -> f64 {
    let d = v.len() as f64;
    bases
        .iter()
        .flat_map(|b| b.vectors())
        .map(|h| (inner(&h, v).norm_sqr() - 1.0 / d).abs())
        .fold(0.0, f64::max)
}

/// All vectors (up to phase) found MU to every basis in `bases`.
pub fn mu_vectors_to_all(
    bases: &[OrthonormalBasis],
    cfg: &SearchConfig,
    label: &str,
) -> Result<VectorSolutionSet> {
    cfg.validate()?;
    let d = check_pairwise_mu(bases)?;
    if d < 2 {
        return Err(Error::domain("dimension must be at least 2"));
    }
    let b0 = bases[0].matrix().clone();
    let rot = b0.adjoint();
    let cols: Vec<Vec<C64>> = bases[1..]
        .iter()
        .flat_map(|b| {
            let m: CMatrix = &rot * b.matrix();
            (0..d)
                .map(|k| (0..d).map(|i| m[(i, k)].conj()).collect::<Vec<_>>())
                .collect::<Vec<_>>()
        })
        .collect();
    let problem = UnbiasedProblem { d, cols };
    let accept = cfg.newton_tol * 10.0;
    let chunks = run_chunks(cfg.restarts, |range| {
        let mut local: Vec<Found> = Vec::new();
        let mut converged = 0usize;
        for idx in range {
            let mut rng = restart_rng(cfg.seed, idx);
            let x0: Vec<f64> = (1..d)
                .map(|_| rng.random_range(0.0..std::f64::consts::TAU))
                .collect();
            let (x, res) = if problem.cols.is_empty() {
                (x0, 0.0)
            } else {
                gauss_newton(&problem, x0, cfg.newton_max_iter, cfg.newton_tol)
            };
            if res >= accept {
                continue;
            }
            converged += 1;
            let local_psi = problem.psi(&x);
            let psi: Vec<C64> = (0..d)
                .map(|i| (0..d).map(|k| b0[(i, k)] * local_psi[k]).sum())
                .collect();
            let vector = canonicalize(&psi);
            insert_unique(
                &mut local,
                Found {
                    vector,
                    residual: res,
                    first_seen: idx,
                },
                cfg.dedup_tol,
            );
        }
        (local, converged)
    });
    let mut all: Vec<Found> = Vec::new();
    let mut converged = 0;
    for (local, n) in chunks {
        converged += n;
        for f in local {
            insert_unique(&mut all, f, cfg.dedup_tol);
        }
    }
    all.sort_by(|a, b| lex_cmp(&a.vector, &b.vector));
    let late = cfg.restarts - cfg.restarts / 5;
    let coverage_warning = all.iter().any(|f| f.first_seen >= late) && cfg.restarts >= 5;
    let mut continuum = false;
    for (i, a) in all.iter().enumerate() {
        for b in &all[i + 1..] {
            if a.residual < 1e-12
                && b.residual < 1e-12
                && projective_distance(&a.vector, &b.vector) < 1e-3
            {
                continuum = true;
            }
        }
    }
    let residuals = all.iter().map(|f| mu_residual(&f.vector, bases)).collect();
    Ok(VectorSolutionSet {
        label: label.to_string(),
        dim: d,
        vectors: all.into_iter().map(|f| f.vector).collect(),
        residuals,
        seed: cfg.seed,
        restarts: cfg.restarts,
        converged,
        coverage_warning,
        continuum_suspected: continuum,
    })
}

/// Vectors MU to the pair `{I, H}`.
pub fn mu_vectors_to_pair(h: &HadamardMatrix, cfg: &SearchConfig) -> Result<VectorSolutionSet> {
    let bases = [OrthonormalBasis::standard(h.dim()), h.as_basis()];
    mu_vectors_to_all(&bases, cfg, "pair")
}

/// Largest graph `group_into_bases` accepts.
pub const MAX_CLIQUE_VERTICES: usize = 200;

/// Every set of `d` pairwise orthogonal solution vectors, as a basis.
pub fn group_into_bases(sol: &VectorSolutionSet, tol: f64) -> Result<Vec<OrthonormalBasis>> {
    let n = sol.vectors.len();
    let d = sol.dim;
    if n > MAX_CLIQUE_VERTICES {
        return Err(Error::Unsupported(format!(
            "{n} vectors exceed the clique search limit of {MAX_CLIQUE_VERTICES}"
        )));
    }
    let adj: Vec<Vec<bool>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| i != j && inner(&sol.vectors[i], &sol.vectors[j]).norm() < tol)
                .collect()
        })
        .collect();
    let mut cliques = Vec::new();
    let mut stack = Vec::with_capacity(d);
    let cand: Vec<usize> = (0..n).collect();
    extend_clique(&adj, d, &mut stack, &cand, &mut cliques);
    cliques
        .into_iter()
        .map(|cl: Vec<usize>| {
            let cols: Vec<Vec<C64>> = cl.iter().map(|&i| sol.vectors[i].clone()).collect();
            OrthonormalBasis::from_columns(&cols, ToleranceProfile::default().eps_orth)
        })
        .collect()
}

fn extend_clique(
    adj: &[Vec<bool>],
    d: usize,
    stack: &mut Vec<usize>,
    cand: &[usize],
    out: &mut Vec<Vec<usize>>,
) {
    if stack.len() == d {
        out.push(stack.clone());
        return;
    }
    if stack.len() + cand.len() < d {
        return;
    }
    for (pos, &v) in cand.iter().enumerate() {
        if stack.len() + cand.len() - pos < d {
            break;
        }
        let next: Vec<usize> = cand[pos + 1..]
            .iter()
            .copied()
            .filter(|&u| adj[v][u])
            .collect();
        stack.push(v);
        extend_clique(adj, d, stack, &next, out);
        stack.pop();
    }
}

/// Whether the columns of `m` are, up to order and phases, the cyclic shifts
/// of a single vector.
pub fn is_circulant_up_to_columns(m: &CMatrix, tol: f64) -> bool {
    let d = m.nrows();
    let cols: Vec<Vec<C64>> = (0..d)
        .map(|k| m.column(k).iter().copied().collect())
        .collect();
    let first = &cols[0];
    let mut used = vec![false; d];
    for s in 0..d {
        let shifted: Vec<C64> = (0..d).map(|i| first[(i + d - s) % d]).collect();
        let hit = (0..d).find(|&k| !used[k] && projective_distance(&cols[k], &shifted) < tol);
        match hit {
            Some(k) => used[k] = true,
            None => return false,
        }
    }
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtensionReport {
    pub extra_vectors: usize,
    pub extends_to_basis: bool,
    pub solutions: VectorSolutionSet,
    #[serde(skip)]
    pub bases: Vec<OrthonormalBasis>,
}

/// Searches for vectors MU to all of `bases` and groups them into bases.
pub fn extension_probe(bases: &[OrthonormalBasis], cfg: &SearchConfig) -> Result<ExtensionReport> {
    let solutions = mu_vectors_to_all(bases, cfg, "extension")?;
    let found = if solutions.len() <= MAX_CLIQUE_VERTICES {
        group_into_bases(&solutions, ToleranceProfile::default().eps_orth)?
    } else {
        return Err(Error::Unsupported(format!(
            "{} solutions; too many to group (continuum suspected: {})",
            solutions.len(),
            solutions.continuum_suspected
        )));
    };
    Ok(ExtensionReport {
        extra_vectors: solutions.len(),
        extends_to_basis: !found.is_empty(),
        solutions,
        bases: found,
    })
}

/// `{x_1, ..., x_n}_d`: sets of `x_i` orthonormal vectors, MU across sets.
/// The first set is taken from the standard basis and must have at least
/// `d - 1` members.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstellationSpec {
    pub dim: usize,
    pub parts: Vec<usize>,
}

impl ConstellationSpec {
    pub fn new(dim: usize, parts: Vec<usize>) -> Result<Self> {
        if dim < 2 {
            return Err(Error::domain("dimension must be at least 2"));
        }
        if parts.len() < 2 {
            return Err(Error::domain("a constellation needs at least two parts"));
        }
        if parts.iter().any(|&x| x == 0 || x > dim) {
            return Err(Error::domain(format!("parts must lie in 1..={dim}")));
        }
        if parts[0] + 1 < dim {
            return Err(Error::Unsupported(format!(
                "first part must have at least {} vectors",
                dim - 1
            )));
        }
        Ok(ConstellationSpec { dim, parts })
    }

    /// `"{5,3,3,1}_6"`-style label.
    pub fn label(&self) -> String {
        let p: Vec<String> = self.parts.iter().map(|x| x.to_string()).collect();
        format!("{{{}}}_{}", p.join(","), self.dim)
    }

    fn free_vectors(&self) -> usize {
        self.parts[1..].iter().sum()
    }

    /// Real parameters after fixing the first free vector to the uniform one.
    pub fn param_count(&self) -> usize {
        (self.dim - 1) * (self.free_vectors() - 1)
    }

    /// Constraint count: one per pair of free vectors.
    pub fn constraint_count(&self) -> usize {
        let n = self.free_vectors();
        n * (n - 1) / 2
    }
}

/// Parameters of `mu` full bases in dimension `d`: `(d-1)((mu-1)(d-1)-1)`.
pub fn full_basis_param_count(d: usize, mu: usize) -> usize {
    if mu < 2 {
        return 0;
    }
    (d - 1) * ((mu - 1) * (d - 1) - 1)
}

struct ConstellationProblem {
    d: usize,
    /// Set label of each free vector; vector 0 is fixed.
    set_of: Vec<usize>,
    pairs: Vec<(usize, usize)>,
}

impl ConstellationProblem {
    fn new(spec: &ConstellationSpec) -> Self {
        let set_of: Vec<usize> = spec.parts[1..]
            .iter()
            .enumerate()
            .flat_map(|(s, &x)| std::iter::repeat_n(s, x))
            .collect();
        let n = set_of.len();
        let pairs = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect();
        ConstellationProblem {
            d: spec.dim,
            set_of,
            pairs,
        }
    }

    fn vectors(&self, x: &[f64]) -> Vec<Vec<C64>> {
        let d = self.d;
        let s = 1.0 / (d as f64).sqrt();
        (0..self.set_of.len())
            .map(|v| {
                (0..d)
                    .map(|k| {
                        if v == 0 || k == 0 {
                            c(s, 0.0)
                        } else {
                            cis(x[(v - 1) * (d - 1) + k - 1]) * s
                        }
                    })
                    .collect()
            })
            .collect()
    }
}

impl Residuals for ConstellationProblem {
    fn n_params(&self) -> usize {
        (self.d - 1) * (self.set_of.len() - 1)
    }

    fn n_res(&self) -> usize {
        self.pairs.len()
    }

    fn eval(&self, x: &[f64], r: &mut [f64], mut jac: Option<&mut DMatrix<f64>>) {
        let d = self.d;
        let vs = self.vectors(x);
        let inv_d = 1.0 / d as f64;
        if let Some(j) = jac.as_deref_mut() {
            j.fill(0.0);
        }
        for (row, &(a, b)) in self.pairs.iter().enumerate() {
            let s = inner(&vs[a], &vs[b]);
            let target = if self.set_of[a] == self.set_of[b] {
                0.0
            } else {
                inv_d
            };
            r[row] = s.norm_sqr() - target;
            if let Some(jm) = jac.as_deref_mut() {
                let sc = s.conj();
                for k in 1..d {
                    // d s / d theta_{b,k} = i conj(a_k) b_k, and the conjugate for a.
                    let t = vs[a][k].conj() * vs[b][k] * C64::i();
                    let g = 2.0 * (sc * t).re;
                    if b > 0 {
                        jm[(row, (b - 1) * (d - 1) + k - 1)] += g;
                    }
                    if a > 0 {
                        jm[(row, (a - 1) * (d - 1) + k - 1)] -= g;
                    }
                }
            }
        }
    }
}

/// Success threshold on `F` for constellation searches.
pub const CONSTELLATION_SUCCESS: f64 = 1e-16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstellationResult {
    pub spec: ConstellationSpec,
    pub found: bool,
    pub best_residual: f64,
    pub successes: usize,
    pub attempts: usize,
    pub seed: u64,
    /// Free vectors of the best run, in part order.
    pub best_vectors: Vec<Vec<C64>>,
}

impl ConstellationResult {
    pub fn success_rate(&self) -> f64 {
        self.successes as f64 / self.attempts as f64
    }
}

/// Random restarts on the phase torus, each minimizing the sum of squared
/// overlap residuals of the constellation.
pub fn constellation_search(
    spec: &ConstellationSpec,
    cfg: &SearchConfig,
) -> Result<ConstellationResult> {
    cfg.validate()?;
    let problem = ConstellationProblem::new(spec);
    let n = problem.n_params();
    let tol2 = cfg.newton_tol * cfg.newton_tol;
    let run = |idx: usize| -> (Vec<f64>, f64) {
        let mut rng = restart_rng(cfg.seed, idx);
        let x0: Vec<f64> = (0..n)
            .map(|_| rng.random_range(0.0..std::f64::consts::TAU))
            .collect();
        if problem.pairs.is_empty() {
            return (x0, 0.0);
        }
        match cfg.optimizer {
            Optimizer::QuasiNewtonF => bfgs(&problem, x0, cfg.qn_max_iter, tol2),
            Optimizer::NewtonResidual => {
                let (x, _) = gauss_newton(&problem, x0, cfg.newton_max_iter, cfg.newton_tol);
                let mut r = vec![0.0; problem.n_res()];
                problem.eval(&x, &mut r, None);
                let f = r.iter().map(|v| v * v).sum();
                (x, f)
            }
        }
    };
    let chunks = run_chunks(cfg.restarts, |range| {
        let mut best: Option<(Vec<f64>, f64)> = None;
        let mut successes = 0;
        for idx in range {
            let (x, f) = run(idx);
            if f < CONSTELLATION_SUCCESS {
                successes += 1;
            }
            if best.as_ref().is_none_or(|b| f < b.1) {
                best = Some((x, f));
            }
        }
        (best, successes)
    });
    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut successes = 0;
    for (b, s) in chunks {
        successes += s;
        if let Some(b) = b {
            if best.as_ref().is_none_or(|cur| b.1 < cur.1) {
                best = Some(b);
            }
        }
    }
    let (bx, bf) = best.unwrap_or((vec![0.0; n], f64::INFINITY));
    Ok(ConstellationResult {
        spec: spec.clone(),
        found: successes > 0,
        best_residual: bf,
        successes,
        attempts: cfg.restarts,
        seed: cfg.seed,
        best_vectors: problem.vectors(&bx),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalogue::fourier_matrix;

    #[test]
    fn f2_pair() {
        let cfg = SearchConfig::new(1, 50).unwrap();
        let sol = mu_vectors_to_pair(&fourier_matrix(2).unwrap(), &cfg).unwrap();
        assert_eq!(sol.len(), 2);
        let s = 1.0 / 2f64.sqrt();
        for v in &sol.vectors {
            assert!((v[0].re - s).abs() < 1e-12);
            assert!((v[1].im.abs() - s).abs() < 1e-12);
        }
        let bases = group_into_bases(&sol, 1e-8).unwrap();
        assert_eq!(bases.len(), 1);
        assert!(is_circulant_up_to_columns(bases[0].matrix(), 1e-9));
    }

    #[test]
    fn f3_pair_gives_two_bases() {
        let cfg = SearchConfig::new(3, 300).unwrap();
        let sol = mu_vectors_to_pair(&fourier_matrix(3).unwrap(), &cfg).unwrap();
        assert_eq!(sol.len(), 6);
        assert_eq!(group_into_bases(&sol, 1e-8).unwrap().len(), 2);
    }

    #[test]
    fn param_counts() {
        assert_eq!(
            ConstellationSpec::new(6, vec![5, 1, 1, 1])
                .unwrap()
                .param_count(),
            10
        );
        assert_eq!(
            ConstellationSpec::new(6, vec![5, 5, 5, 5])
                .unwrap()
                .param_count(),
            70
        );
        assert_eq!(full_basis_param_count(6, 2), 20);
        assert_eq!(
            ConstellationSpec::new(6, vec![5, 5, 5])
                .unwrap()
                .param_count(),
            full_basis_param_count(6, 3)
        );
    }

    #[test]
    fn constellation_jacobian_matches_finite_differences() {
        let spec = ConstellationSpec::new(4, vec![3, 2, 2]).unwrap();
        let p = ConstellationProblem::new(&spec);
        let mut rng = restart_rng(9, 0);
        let x: Vec<f64> = (0..p.n_params())
            .map(|_| rng.random_range(0.0..6.0))
            .collect();
        let mut r = vec![0.0; p.n_res()];
        let mut j = DMatrix::zeros(p.n_res(), p.n_params());
        p.eval(&x, &mut r, Some(&mut j));
        let h = 1e-6;
        for k in 0..p.n_params() {
            let mut xp = x.clone();
            xp[k] += h;
            let mut rp = vec![0.0; p.n_res()];
            p.eval(&xp, &mut rp, None);
            for i in 0..p.n_res() {
                assert!(((rp[i] - r[i]) / h - j[(i, k)]).abs() < 1e-5);
            }
        }
    }

    #[test]
    fn rejects_zero_restarts() {
        assert!(SearchConfig::new(0, 0).is_err());
    }
}
