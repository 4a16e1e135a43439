//! Complex linear algebra, validated containers and tolerance handling.

use std::f64::consts::PI;
use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Shorthand for a complex number.
#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// `e^{i theta}`.
#[inline]
pub fn cis(theta: f64) -> C64 {
    C64::new(theta.cos(), theta.sin())
}

/// `e^{2 pi i k / n}` computed from the reduced residue for accuracy.
pub fn root_of_unity(k: i64, n: u64) -> C64 {
    let n_i = n as i64;
    let r = k.rem_euclid(n_i);
    cis(2.0 * PI * r as f64 / n as f64)
}

/// Numerical thresholds used by verification and search routines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceProfile {
    pub eps_unitary: f64,
    pub eps_mod: f64,
    pub eps_mu: f64,
    pub eps_orth: f64,
    pub eps_dedup: f64,
    pub eps_rank: f64,
    pub newton_tol: f64,
}

impl Default for ToleranceProfile {
    fn default() -> Self {
        ToleranceProfile {
            eps_unitary: 1e-10,
            eps_mod: 1e-10,
            eps_mu: 1e-10,
            eps_orth: 1e-8,
            eps_dedup: 1e-6,
            eps_rank: 1e-8,
            newton_tol: 1e-12,
        }
    }
}

/// Phase of a Butson entry as a fraction `num/den` of a full turn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PhaseTag {
    pub num: u64,
    pub den: u64,
}

impl PhaseTag {
    pub fn new(num: u64, den: u64) -> Self {
        let g = gcd(num % den, den);
        PhaseTag {
            num: (num % den) / g,
            den: den / g,
        }
    }

    pub fn value(&self) -> C64 {
        root_of_unity(self.num as i64, self.den)
    }
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a.max(1)
    } else {
        gcd(b, a % b)
    }
}

/// `<u|v>` with the first argument conjugated.
#[inline]
pub fn inner(u: &[C64], v: &[C64]) -> C64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

/// Column `k` of `m` as an owned vector.
pub fn column(m: &CMatrix, k: usize) -> Vec<C64> {
    m.column(k).iter().copied().collect()
}

pub fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest absolute entry of `M^dagger M - I`.
pub fn unitarity_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let g = m.adjoint() * m;
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g[(i, j)] - c(target, 0.0)).norm());
        }
    }
    worst
}

pub fn is_unitary(m: &CMatrix, eps: f64) -> bool {
    m.is_square() && unitarity_defect(m) < eps
}

/// Kronecker product `a (x) b`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(x * y);
        }
    }
    out
}

/// Normalized discrete Fourier matrix `F_d`.
pub fn fourier(d: usize) -> CMatrix {
    let s = 1.0 / (d as f64).sqrt();
    CMatrix::from_fn(d, d, |j, k| root_of_unity((j * k) as i64, d as u64) * s)
}

/// Largest singular value.
pub fn operator_norm(m: &CMatrix) -> f64 {
    m.clone()
        .singular_values()
        .iter()
        .fold(0.0f64, |a, &b| a.max(b))
}

/// Multiply by a phase so the first component above `eps` in modulus is real positive.
pub fn canonicalize(v: &[C64]) -> Vec<C64> {
    let lead = v.iter().find(|z| z.norm() > 1e-12);
    match lead {
        Some(z) => {
            let ph = z.conj() / z.norm();
            v.iter().map(|x| x * ph).collect()
        }
        None => v.to_vec(),
    }
}

/// `1 - |<u|v>|` for unit vectors.
pub fn projective_distance(u: &[C64], v: &[C64]) -> f64 {
    1.0 - inner(u, v).norm()
}

/// Realign an operator on `C^{d1} (x) C^{d2}` and count singular values above
/// `eps * ||M||_F`. Index convention is `d2 * i1 + i2`.
pub fn schmidt_rank(m: &CMatrix, d1: usize, d2: usize, eps: f64) -> Result<usize> {
    let d = d1 * d2;
    if m.nrows() != d || m.ncols() != d {
        return Err(Error::shape(format!(
            "operator is {}x{}, expected {d}x{d}",
            m.nrows(),
            m.ncols()
        )));
    }
    let mut r = CMatrix::zeros(d1 * d1, d2 * d2);
    for i1 in 0..d1 {
        for i2 in 0..d2 {
            for j1 in 0..d1 {
                for j2 in 0..d2 {
                    r[(i1 * d1 + j1, i2 * d2 + j2)] = m[(d2 * i1 + i2, d2 * j1 + j2)];
                }
            }
        }
    }
    let scale = m.norm();
    if scale == 0.0 {
        return Ok(0);
    }
    Ok(r.singular_values()
        .iter()
        .filter(|&&s| s > eps * scale)
        .count())
}

/// `Tr rho_1^2` where `rho_1` is the reduction of `|v><v|` to the first factor.
pub fn purity(v: &[C64], d1: usize, d2: usize) -> Result<f64> {
    if v.len() != d1 * d2 {
        return Err(Error::shape(format!(
            "vector has length {}, expected {}",
            v.len(),
            d1 * d2
        )));
    }
    let mut rho = vec![C64::new(0.0, 0.0); d1 * d1];
    for a in 0..d1 {
        for b in 0..d1 {
            let mut s = C64::new(0.0, 0.0);
            for k in 0..d2 {
                s += v[d2 * a + k] * v[d2 * b + k].conj();
            }
            rho[a * d1 + b] = s;
        }
    }
    let mut t = 0.0;
    for a in 0..d1 {
        for b in 0..d1 {
            t += (rho[a * d1 + b] * rho[b * d1 + a]).re;
        }
    }
    Ok(t)
}

/// Index permutation for coprime `d1, d2`: entry `d2*i1 + i2` holds the
/// unique `k < d1*d2` with `k = i1 mod d1` and `k = i2 mod d2`.
pub fn crt_permutation(d1: usize, d2: usize) -> Result<Vec<usize>> {
    if gcd(d1 as u64, d2 as u64) != 1 {
        return Err(Error::domain(format!("{d1} and {d2} are not coprime")));
    }
    let d = d1 * d2;
    let mut perm = vec![0; d];
    for k in 0..d {
        perm[d2 * (k % d1) + (k % d2)] = k;
    }
    Ok(perm)
}

/// Reorder components: `out[i] = v[perm[i]]`.
pub fn permute_components(v: &[C64], perm: &[usize]) -> Vec<C64> {
    perm.iter().map(|&p| v[p]).collect()
}

/// Haar-random unitary from the QR decomposition of a Ginibre matrix.
pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(d, d, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c(re, im) / 2f64.sqrt()
    });
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for k in 0..d {
        let z = r[(k, k)];
        let ph = if z.norm() > 0.0 {
            z / z.norm()
        } else {
            c(1.0, 0.0)
        };
        for i in 0..d {
            q[(i, k)] *= ph;
        }
    }
    q
}

/// Unit vector with entries `e^{i theta_k}/sqrt(d)` and `theta_0 = 0`.
pub fn phase_vector(thetas: &[f64]) -> Vec<C64> {
    let d = thetas.len() + 1;
    let s = 1.0 / (d as f64).sqrt();
    std::iter::once(c(s, 0.0))
        .chain(thetas.iter().map(|&t| cis(t) * s))
        .collect()
}

/// Unit-norm vector.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitVector(Vec<C64>);

impl UnitVector {
    pub fn new(v: Vec<C64>, eps: f64) -> Result<Self> {
        let n = norm(&v);
        if (n - 1.0).abs() > eps {
            return Err(Error::domain(format!("vector norm {n} is not 1")));
        }
        Ok(UnitVector(v))
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<C64> {
        self.0
    }
}

/// Orthonormal basis stored as the columns of a unitary matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthonormalBasis {
    matrix: CMatrix,
}

impl OrthonormalBasis {
    pub fn new(matrix: CMatrix, eps: f64) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::shape("basis matrix must be square"));
        }
        let def = unitarity_defect(&matrix);
        if def >= eps {
            return Err(Error::domain(format!(
                "basis is not orthonormal (defect {def:.3e})"
            )));
        }
        Ok(OrthonormalBasis { matrix })
    }

    /// Wrap without checking. Intended for matrices unitary by construction.
    pub fn new_unchecked(matrix: CMatrix) -> Self {
        OrthonormalBasis { matrix }
    }

    pub fn from_columns(cols: &[Vec<C64>], eps: f64) -> Result<Self> {
        let d = cols.len();
        if cols.iter().any(|v| v.len() != d) {
            return Err(Error::shape("basis needs d vectors of length d"));
        }
        let m = CMatrix::from_fn(d, d, |i, k| cols[k][i]);
        Self::new(m, eps)
    }

    pub fn standard(d: usize) -> Self {
        OrthonormalBasis {
            matrix: CMatrix::identity(d, d),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn vector(&self, k: usize) -> Vec<C64> {
        column(&self.matrix, k)
    }

    pub fn vectors(&self) -> Vec<Vec<C64>> {
        (0..self.dim()).map(|k| self.vector(k)).collect()
    }
}

/// Complex Hadamard matrix, normalized so it is unitary with entries of
/// modulus `1/sqrt(d)`.
#[derive(Debug, Clone)]
pub struct HadamardMatrix {
    entries: CMatrix,
    phases: Option<Vec<PhaseTag>>,
    dephased: OnceLock<CMatrix>,
}

impl PartialEq for HadamardMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.entries == other.entries
    }
}

impl HadamardMatrix {
    pub fn new(entries: CMatrix, tol: &ToleranceProfile) -> Result<Self> {
        check_hadamard(&entries, tol)?;
        Ok(HadamardMatrix {
            entries,
            phases: None,
            dephased: OnceLock::new(),
        })
    }

    /// Accepts a matrix with unimodular entries and scales by `1/sqrt(d)`.
    pub fn from_unimodular(m: CMatrix, tol: &ToleranceProfile) -> Result<Self> {
        let d = m.nrows() as f64;
        Self::new(m / c(d.sqrt(), 0.0), tol)
    }

    /// Butson matrix from phase fractions (row-major).
    pub fn from_phases(d: usize, phases: Vec<PhaseTag>, tol: &ToleranceProfile) -> Result<Self> {
        if phases.len() != d * d {
            return Err(Error::shape("need d*d phase tags"));
        }
        let s = 1.0 / (d as f64).sqrt();
        let m = CMatrix::from_fn(d, d, |i, j| phases[i * d + j].value() * s);
        let mut h = Self::new(m, tol)?;
        h.phases = Some(phases);
        Ok(h)
    }

    pub fn with_phases(mut self, phases: Vec<PhaseTag>) -> Self {
        self.phases = Some(phases);
        self
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn phases(&self) -> Option<&[PhaseTag]> {
        self.phases.as_deref()
    }

    /// Unimodular entries, i.e. `sqrt(d) H`.
    pub fn unimodular(&self) -> CMatrix {
        &self.entries * c((self.dim() as f64).sqrt(), 0.0)
    }

    /// Form with first row and column equal to `1/sqrt(d)`.
    pub fn dephased(&self) -> &CMatrix {
        self.dephased.get_or_init(|| dephase(&self.entries))
    }

    pub fn as_basis(&self) -> OrthonormalBasis {
        OrthonormalBasis::new_unchecked(self.entries.clone())
    }
}

/// Worst deviations found by [`is_hadamard`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HadamardCheck {
    pub is_hadamard: bool,
    pub unitarity_deviation: f64,
    pub modulus_deviation: f64,
}

pub fn is_hadamard(m: &CMatrix, tol: &ToleranceProfile) -> Result<HadamardCheck> {
    if !m.is_square() {
        return Err(Error::shape("Hadamard test needs a square matrix"));
    }
    let target = 1.0 / (m.nrows() as f64).sqrt();
    let modulus_deviation = m
        .iter()
        .map(|z| (z.norm() - target).abs())
        .fold(0.0, f64::max);
    let unitarity_deviation = unitarity_defect(m);
    Ok(HadamardCheck {
        is_hadamard: unitarity_deviation < tol.eps_unitary && modulus_deviation <= tol.eps_mod,
        unitarity_deviation,
        modulus_deviation,
    })
}

/// Whether `v` factorizes as a product in `C^d1 (x) C^d2`.
pub fn is_product_vector(v: &[C64], d1: usize, d2: usize, tol: &ToleranceProfile) -> Result<bool> {
    Ok(purity(v, d1, d2)? >= 1.0 - tol.eps_mu)
}

/// Check unitarity and flat moduli.
pub fn check_hadamard(m: &CMatrix, tol: &ToleranceProfile) -> Result<()> {
    if !m.is_square() {
        return Err(Error::shape("Hadamard matrix must be square"));
    }
    let d = m.nrows();
    let target = 1.0 / (d as f64).sqrt();
    for z in m.iter() {
        if (z.norm() - target).abs() > tol.eps_mod {
            return Err(Error::domain(format!(
                "entry modulus {} differs from 1/sqrt({d})",
                z.norm()
            )));
        }
    }
    let def = unitarity_defect(m);
    if def >= tol.eps_unitary {
        return Err(Error::domain(format!(
            "matrix is not unitary (defect {def:.3e})"
        )));
    }
    Ok(())
}

/// Multiply rows and columns by phases so the first row and column are real positive.
pub fn dephase(m: &CMatrix) -> CMatrix {
    let d = m.nrows();
    let mut out = m.clone();
    for i in 0..d {
        let z = out[(i, 0)];
        if z.norm() > 0.0 {
            let ph = z.conj() / z.norm();
            for j in 0..d {
                out[(i, j)] *= ph;
            }
        }
    }
    for j in 1..d {
        let z = out[(0, j)];
        if z.norm() > 0.0 {
            let ph = z.conj() / z.norm();
            for i in 0..d {
                out[(i, j)] *= ph;
            }
        }
    }
    out
}

/// How a basis collection was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Ivanovic,
    WoottersFields,
    KlappeneckerRotteler,
    Alltop,
    HeisenbergWeyl,
    TensorProduct,
    LatinSquare,
    WeightedDesign,
    Approx,
    ProductFamilyD6,
    Imported,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Ivanovic => "ivanovic",
            Method::WoottersFields => "wootters_fields",
            Method::KlappeneckerRotteler => "klappenecker_rotteler",
            Method::Alltop => "alltop",
            Method::HeisenbergWeyl => "heisenberg_weyl",
            Method::TensorProduct => "tensor_product",
            Method::LatinSquare => "latin_square",
            Method::WeightedDesign => "weighted_design",
            Method::Approx => "approx",
            Method::ProductFamilyD6 => "product_family_d6",
            Method::Imported => "imported",
        }
    }

    pub fn parse(s: &str) -> Option<Method> {
        ALL_METHODS.iter().copied().find(|m| m.name() == s)
    }
}

pub const ALL_METHODS: [Method; 11] = [
    Method::Ivanovic,
    Method::WoottersFields,
    Method::KlappeneckerRotteler,
    Method::Alltop,
    Method::HeisenbergWeyl,
    Method::TensorProduct,
    Method::LatinSquare,
    Method::WeightedDesign,
    Method::Approx,
    Method::ProductFamilyD6,
    Method::Imported,
];

/// Ordered collection of orthonormal bases of a common dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct MubSet {
    dim: usize,
    bases: Vec<OrthonormalBasis>,
    method: Method,
    params: Vec<(String, f64)>,
    weights: Option<Vec<f64>>,
}

impl MubSet {
    pub fn new(bases: Vec<OrthonormalBasis>) -> Result<Self> {
        let dim = bases
            .first()
            .map(|b| b.dim())
            .ok_or_else(|| Error::shape("empty basis list"))?;
        if bases.iter().any(|b| b.dim() != dim) {
            return Err(Error::shape("bases have different dimensions"));
        }
        Ok(MubSet {
            dim,
            bases,
            method: Method::Imported,
            params: Vec::new(),
            weights: None,
        })
    }

    pub fn with_method(mut self, method: Method, params: Vec<(String, f64)>) -> Self {
        self.method = method;
        self.params = params;
        self
    }

    /// Attach per-basis weights; they must be positive and sum to `1/d`.
    pub fn with_weights(mut self, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != self.bases.len() || weights.iter().any(|&w| w <= 0.0) {
            return Err(Error::domain("need one positive weight per basis"));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0 / self.dim as f64).abs() > 1e-12 {
            return Err(Error::domain(format!("weights sum to {total}, not 1/d")));
        }
        self.weights = Some(weights);
        Ok(self)
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn params(&self) -> &[(String, f64)] {
        &self.params
    }

    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.bases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bases.is_empty()
    }

    pub fn bases(&self) -> &[OrthonormalBasis] {
        &self.bases
    }

    pub fn basis(&self, b: usize) -> &OrthonormalBasis {
        &self.bases[b]
    }

    pub fn push(&mut self, basis: OrthonormalBasis) -> Result<()> {
        if basis.dim() != self.dim {
            return Err(Error::shape("basis dimension mismatch"));
        }
        self.bases.push(basis);
        Ok(())
    }

    /// Largest `| |<u|v>|^2 - 1/d |` over vectors from distinct bases.
    pub fn max_mu_deviation(&self) -> f64 {
        let d = self.dim as f64;
        let mut worst = 0.0f64;
        for (i, a) in self.bases.iter().enumerate() {
            for b in &self.bases[i + 1..] {
                let g = a.matrix().adjoint() * b.matrix();
                for z in g.iter() {
                    worst = worst.max((z.norm_sqr() - 1.0 / d).abs());
                }
            }
        }
        worst
    }

    pub fn max_unitarity_defect(&self) -> f64 {
        self.bases
            .iter()
            .map(|b| unitarity_defect(b.matrix()))
            .fold(0.0, f64::max)
    }

    /// True when every basis is orthonormal and every pair is unbiased.
    pub fn is_mutually_unbiased(&self, tol: &ToleranceProfile) -> bool {
        self.max_unitarity_defect() < tol.eps_unitary && self.max_mu_deviation() < tol.eps_mu
    }

    /// Matrix of `|<v_bk|v_b'k'>|^2` over all `mu*d` vectors.
    pub fn overlap_table(&self) -> DMatrix<f64> {
        let vs: Vec<Vec<C64>> = self.bases.iter().flat_map(|b| b.vectors()).collect();
        let n = vs.len();
        DMatrix::from_fn(n, n, |i, j| inner(&vs[i], &vs[j]).norm_sqr())
    }

    pub fn all_vectors(&self) -> Vec<Vec<C64>> {
        self.bases.iter().flat_map(|b| b.vectors()).collect()
    }
}
