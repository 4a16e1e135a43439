//! Complex Hadamard matrices: the order-6 catalogue, Fourier matrices, and
//! equivalence invariants (Haagerup set, defect, structure flags).

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::numeric::{
    c, cis, dephase, fourier, gcd, root_of_unity, CMatrix, HadamardMatrix, PhaseTag,
    ToleranceProfile, C64,
};

/// Parameterized Hadamard families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Fourier,
    Fourier6Family,
    TaoS6,
    KarlssonK6,
    SzollosiX6,
    BjorckC6,
    DitaSlice,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::Fourier,
        Family::Fourier6Family,
        Family::TaoS6,
        Family::KarlssonK6,
        Family::SzollosiX6,
        Family::BjorckC6,
        Family::DitaSlice,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Family::Fourier => "fourier",
            Family::Fourier6Family => "fourier6_family",
            Family::TaoS6 => "tao_s6",
            Family::KarlssonK6 => "karlsson_k6_3",
            Family::SzollosiX6 => "szollosi_x6_2",
            Family::BjorckC6 => "bjorck_c6",
            Family::DitaSlice => "dita_slice",
        }
    }

    pub fn parse(s: &str) -> Option<Family> {
        Family::ALL.iter().copied().find(|f| f.name() == s)
    }

    /// Parameter names in the order `generate` expects them.
    pub fn param_names(&self) -> &'static [&'static str] {
        match self {
            Family::Fourier | Family::TaoS6 | Family::BjorckC6 => &[],
            Family::Fourier6Family => &["a", "b"],
            Family::KarlssonK6 => &["theta", "phi", "lambda"],
            Family::SzollosiX6 => &["re", "im"],
            Family::DitaSlice => &["lambda"],
        }
    }
}

/// A family together with its order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CatalogueEntry {
    pub family: Family,
    pub order: usize,
}

impl CatalogueEntry {
    pub fn new(family: Family, order: usize) -> Result<Self> {
        if family != Family::Fourier && order != 6 {
            return Err(Error::domain(format!("{} has order 6", family.name())));
        }
        if order < 1 {
            return Err(Error::domain("order must be positive"));
        }
        Ok(CatalogueEntry { family, order })
    }

    pub fn param_arity(&self) -> usize {
        self.family.param_names().len()
    }

    pub fn generate(&self, params: &[f64]) -> Result<HadamardMatrix> {
        if params.len() != self.param_arity() {
            return Err(Error::domain(format!(
                "{} takes {} parameters, got {}",
                self.family.name(),
                self.param_arity(),
                params.len()
            )));
        }
        match self.family {
            Family::Fourier => fourier_matrix(self.order),
            Family::Fourier6Family => fourier6_family(params[0], params[1]),
            Family::TaoS6 => tao_s6(),
            Family::KarlssonK6 => karlsson_k6(params[0], params[1], params[2]).map(|k| k.matrix),
            Family::SzollosiX6 => szollosi_x6(c(params[0], params[1])),
            Family::BjorckC6 => bjorck_c6(),
            Family::DitaSlice => dita_slice(params[0]),
        }
    }
}

fn finish(m: CMatrix) -> Result<HadamardMatrix> {
    let h = HadamardMatrix::from_unimodular(m, &ToleranceProfile::default())?;
    let _ = h.dephased();
    Ok(h)
}

fn from_rows(rows: [[C64; 6]; 6]) -> CMatrix {
    CMatrix::from_fn(6, 6, |i, j| rows[i][j])
}

/// `F_d` with exact phase tags `jk/d`.
pub fn fourier_matrix(d: usize) -> Result<HadamardMatrix> {
    let tags = (0..d * d)
        .map(|t| PhaseTag::new(((t / d) * (t % d)) as u64, d as u64))
        .collect();
    HadamardMatrix::from_phases(d, tags, &ToleranceProfile::default())
}

/// Two-parameter affine family through `F_6`, dephased.
pub fn fourier6_family(a: f64, b: f64) -> Result<HadamardMatrix> {
    let x = cis(2.0 * PI * a);
    let y = cis(2.0 * PI * b);
    let w = root_of_unity(1, 3);
    let w2 = w * w;
    let one = c(1.0, 0.0);
    let m = from_rows([
        [one; 6],
        [one, -w2 * x, w, -x, w2, -w * x],
        [one, w * y, w2, y, w, w2 * y],
        [one, -one, one, -one, one, -one],
        [one, w2 * x, w, x, w2, w * x],
        [one, -w * y, w2, -y, w, -w2 * y],
    ]);
    finish(m)
}

/// The isolated Butson matrix built from cube roots of unity.
pub fn tao_s6() -> Result<HadamardMatrix> {
    let e: [[u64; 6]; 6] = [
        [0, 0, 0, 0, 0, 0],
        [0, 0, 1, 1, 2, 2],
        [0, 1, 0, 2, 2, 1],
        [0, 1, 2, 0, 1, 2],
        [0, 2, 2, 1, 0, 1],
        [0, 2, 1, 2, 1, 0],
    ];
    let tags = (0..36).map(|t| PhaseTag::new(e[t / 6][t % 6], 3)).collect();
    HadamardMatrix::from_phases(6, tags, &ToleranceProfile::default())
}

/// Karlsson matrix with the auxiliary parameters used to build it.
#[derive(Debug, Clone)]
pub struct KarlssonMatrix {
    pub matrix: HadamardMatrix,
    pub z: [C64; 4],
    pub a: [[C64; 2]; 2],
    pub b: [[C64; 2]; 2],
}

impl KarlssonMatrix {
    /// Residuals of the four Mobius relations
    /// `z3^2 = M_A(z1^2)`, `z3^2 = M_B(z2^2)`, `z4^2 = M_A(z2^2)`, `z4^2 = M_B(z1^2)`.
    pub fn mobius_residuals(&self) -> [f64; 4] {
        let [z1, z2, z3, z4] = self.z;
        let (aa, ba) = (self.a[0][1] * self.a[0][1], self.a[0][0] * self.a[0][0]);
        let (ab, bb) = (self.b[0][1] * self.b[0][1], self.b[0][0] * self.b[0][0]);
        [
            (z3 * z3 - mobius(aa, ba, z1 * z1)).norm(),
            (z3 * z3 - mobius(ab, bb, z2 * z2)).norm(),
            (z4 * z4 - mobius(aa, ba, z2 * z2)).norm(),
            (z4 * z4 - mobius(ab, bb, z1 * z1)).norm(),
        ]
    }
}

/// `M(z) = (alpha z - beta)/(conj(beta) z - conj(alpha))`.
pub fn mobius(alpha: C64, beta: C64, z: C64) -> C64 {
    (alpha * z - beta) / (beta.conj() * z - alpha.conj())
}

fn mobius_inverse(alpha: C64, beta: C64, w: C64) -> C64 {
    (alpha.conj() * w - beta) / (beta.conj() * w - alpha)
}

fn mat2_mul(a: [[C64; 2]; 2], b: [[C64; 2]; 2]) -> [[C64; 2]; 2] {
    let mut out = [[c(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// Three-parameter family of `H_2`-reducible matrices, `theta, phi in [0, pi)`.
pub fn karlsson_k6(theta: f64, phi: f64, lambda: f64) -> Result<KarlssonMatrix> {
    for (name, v) in [("theta", theta), ("phi", phi)] {
        if !(0.0..PI).contains(&v) {
            return Err(Error::domain(format!("{name} = {v} outside [0, pi)")));
        }
    }
    let h = 3f64.sqrt() / 2.0;
    let a11 = c(-0.5, 0.0) + c(0.0, h) * (c(theta.cos(), 0.0) + cis(-phi) * theta.sin());
    let a12 = c(-0.5, 0.0) + c(0.0, h) * (c(-theta.cos(), 0.0) + cis(phi) * theta.sin());
    let a = [[a11, a12], [a12.conj(), -a11.conj()]];
    let one = c(1.0, 0.0);
    let b = [
        [-one - a[0][0], -one - a[0][1]],
        [-one - a[1][0], one - a[1][1]],
    ];
    let (aa, ba) = (a12 * a12, a11 * a11);
    let (ab, bb) = (b[0][1] * b[0][1], b[0][0] * b[0][0]);
    let z1 = cis(lambda);
    let z3 = mobius(aa, ba, z1 * z1).sqrt();
    let z2 = mobius_inverse(ab, bb, z3 * z3).sqrt();
    let z4 = mobius(ab, bb, z1 * z1).sqrt();
    let left = |z: C64| [[one, one], [z, -z]];
    let right = |z: C64| [[one, z], [one, -z]];
    let (zz1, zz2, zz3, zz4) = (left(z1), left(z2), right(z3), right(z4));
    let f2 = [[one, one], [one, -one]];
    let half = |m: [[C64; 2]; 2]| m.map(|r| r.map(|x| x * 0.5));
    let blocks = [
        [f2, zz1, zz2],
        [
            zz3,
            half(mat2_mul(mat2_mul(zz3, a), zz1)),
            half(mat2_mul(mat2_mul(zz3, b), zz2)),
        ],
        [
            zz4,
            half(mat2_mul(mat2_mul(zz4, b), zz1)),
            half(mat2_mul(mat2_mul(zz4, a), zz2)),
        ],
    ];
    let m = CMatrix::from_fn(6, 6, |i, j| blocks[i / 2][j / 2][i % 2][j % 2]);
    let matrix = finish(m).map_err(|e| {
        Error::Numerical(format!(
            "Karlsson matrix at ({theta}, {phi}, {lambda}) is not Hadamard: {e}"
        ))
    })?;
    Ok(KarlssonMatrix {
        matrix,
        z: [z1, z2, z3, z4],
        a,
        b,
    })
}

/// One-parameter slice `theta = arccos(1/sqrt 3)`, `phi = pi/4` of the Karlsson family.
pub fn dita_slice(lambda: f64) -> Result<HadamardMatrix> {
    karlsson_k6((1.0 / 3f64.sqrt()).acos(), PI / 4.0, lambda).map(|k| k.matrix)
}

/// Explicit matrix `1 (+) (-I + iC)` bordered by ones, with `C` the
/// symmetric conference core of order 5. Entries are `+-1, +-i`.
pub fn dita_d6() -> Result<HadamardMatrix> {
    // Quadratic residues mod 5 are {1, 4}.
    let chi = |k: usize| -> i64 {
        match k % 5 {
            0 => 0,
            1 | 4 => 1,
            _ => -1,
        }
    };
    let mut tags = vec![PhaseTag::new(0, 4); 36];
    for i in 1..6 {
        for j in 1..6 {
            tags[i * 6 + j] = if i == j {
                PhaseTag::new(2, 4)
            } else if chi(j + 5 - i) == 1 {
                PhaseTag::new(1, 4)
            } else {
                PhaseTag::new(3, 4)
            };
        }
    }
    HadamardMatrix::from_phases(6, tags, &ToleranceProfile::default())
}

/// Roots of `z^3 - alpha z^2 + conj(alpha) z - 1` sorted by ascending argument.
pub fn szollosi_roots(alpha: C64) -> Result<[C64; 3]> {
    let comp = CMatrix::from_row_slice(
        3,
        3,
        &[
            alpha,
            -alpha.conj(),
            c(1.0, 0.0),
            c(1.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(1.0, 0.0),
            c(0.0, 0.0),
        ],
    );
    let ev = comp
        .eigenvalues()
        .ok_or_else(|| Error::Numerical("companion eigenvalues failed".into()))?;
    let mut r: Vec<C64> = ev.iter().copied().collect();
    // One Newton polish step per root.
    for z in r.iter_mut() {
        for _ in 0..3 {
            let f = *z * *z * *z - alpha * *z * *z + alpha.conj() * *z - 1.0;
            let df = 3.0 * *z * *z - 2.0 * alpha * *z + alpha.conj();
            if df.norm() > 1e-12 {
                *z -= f / df;
            }
        }
    }
    r.sort_by(|a, b| a.arg().total_cmp(&b.arg()));
    Ok([r[0], r[1], r[2]])
}

/// Szollosi two-parameter family at complex `alpha`; rejected when a root
/// of `f_alpha` or `f_{-alpha}` leaves the unit circle.
pub fn szollosi_x6(alpha: C64) -> Result<HadamardMatrix> {
    let tol = ToleranceProfile::default();
    let r1 = szollosi_roots(alpha)?;
    let r2 = szollosi_roots(-alpha)?;
    for z in r1.iter().chain(&r2) {
        if (z.norm() - 1.0).abs() > tol.eps_mod {
            return Err(Error::domain(format!(
                "alpha = {alpha} outside the admissible region (root modulus {})",
                z.norm()
            )));
        }
    }
    let (x, y, u, v) = (r1[0], r1[1], r2[0], r2[1]);
    let one = c(1.0, 0.0);
    let m = from_rows([
        [one; 6],
        [
            one,
            x * x * y,
            x * y * y,
            x * y / (u * v),
            u * x * y,
            v * x * y,
        ],
        [one, x / y, x * x * y, x / u, x / v, u * v * x],
        [one, u * v * x, u * x * y, -one, -u * x * y, -u * v * x],
        [one, x / u, v * x * y, -x / u, -one, -v * x * y],
        [one, x / v, x * y / (u * v), -x * y / (u * v), -x / v, -one],
    ]);
    finish(m)
}

/// `true` when `f_alpha` and `f_{-alpha}` have all roots on the unit circle.
pub fn szollosi_in_domain(alpha: C64) -> bool {
    szollosi_x6(alpha).is_ok()
}

/// Circulant matrix from the cyclic 6-root `(1, i/a, -1/a, -i, -a, ia)`.
pub fn bjorck_c6() -> Result<HadamardMatrix> {
    let a = c((1.0 - 3f64.sqrt()) / 2.0, (3f64.sqrt() / 2.0).sqrt());
    let i = c(0.0, 1.0);
    let x = [c(1.0, 0.0), i / a, -1.0 / a, -i, -a, i * a];
    finish(CMatrix::from_fn(6, 6, |j, k| x[(j + 6 - k) % 6]))
}

/// One-parameter matrix with circulant 3x3 blocks (unimodular entries).
/// The top-left block is `circ(1, -e^{-ix}, e^{ix})`.
pub fn zauner_t(x: f64) -> CMatrix {
    let e = cis(x);
    let em = cis(-x);
    let i = c(0.0, 1.0);
    let one = c(1.0, 0.0);
    from_rows([
        [one, -em, e, -one, i * em, i * e],
        [e, one, -em, i * e, -one, i * em],
        [-em, e, one, i * em, i * e, -one],
        [one, i * em, i * e, one, em, -e],
        [i * e, one, i * em, -e, one, em],
        [i * em, i * e, one, em, -e, one],
    ])
}

/// Pair `(E1, E2)` of Hadamard matrices with `E1^dagger E2 = T(x)/sqrt 6`.
pub fn zauner_triple(x: f64) -> Result<(HadamardMatrix, HadamardMatrix)> {
    let tol = ToleranceProfile::default();
    let t = zauner_t(x) / c(6f64.sqrt(), 0.0);
    let def = crate::numeric::unitarity_defect(&t);
    if def > tol.eps_unitary {
        return Err(Error::Numerical(format!(
            "T({x}) is not unitary (defect {def:.3e})"
        )));
    }
    zauner_decompose(&t)
}

/// Split a unitary `2n x 2n` matrix with circulant `n x n` blocks into
/// `E1^dagger E2` with `E1, E2` Hadamard.
pub fn zauner_decompose(t: &CMatrix) -> Result<(HadamardMatrix, HadamardMatrix)> {
    let n2 = t.nrows();
    if n2 % 2 != 0 || !t.is_square() {
        return Err(Error::shape("need an even square matrix"));
    }
    let n = n2 / 2;
    let f = fourier(n);
    let fd = f.adjoint();
    let mut abar = [
        [vec![c(0.0, 0.0); n], vec![c(0.0, 0.0); n]],
        [vec![c(0.0, 0.0); n], vec![c(0.0, 0.0); n]],
    ];
    for bi in 0..2 {
        for bj in 0..2 {
            let blk = t.view((bi * n, bj * n), (n, n)).into_owned();
            let d = &f * blk * &fd;
            let off = (0..n)
                .flat_map(|i| (0..n).map(move |j| (i, j)))
                .filter(|(i, j)| i != j)
                .map(|(i, j)| d[(i, j)].norm())
                .fold(0.0, f64::max);
            if off > 1e-9 {
                return Err(Error::Numerical(format!(
                    "block ({bi},{bj}) is not circulant (off-diagonal {off:.3e})"
                )));
            }
            for k in 0..n {
                abar[bi][bj][k] = d[(k, k)];
            }
        }
    }
    let mut u = [
        vec![c(0.0, 0.0); n],
        vec![c(0.0, 0.0); n],
        vec![c(0.0, 0.0); n],
        vec![c(0.0, 0.0); n],
    ];
    for k in 0..n {
        let s = [
            [abar[0][0][k], abar[0][1][k]],
            [abar[1][0][k], abar[1][1][k]],
        ];
        let sdef = {
            let g00 = s[0][0].norm_sqr() + s[1][0].norm_sqr();
            let g11 = s[0][1].norm_sqr() + s[1][1].norm_sqr();
            let g01 = s[0][0].conj() * s[0][1] + s[1][0].conj() * s[1][1];
            (g00 - 1.0).abs().max((g11 - 1.0).abs()).max(g01.norm())
        };
        if sdef > 1e-9 {
            return Err(Error::Numerical(format!(
                "S_{} is not unitary (defect {sdef:.3e})",
                k + 1
            )));
        }
        let (a, bp, cc, e) = split_unitary_2x2(s)?;
        u[0][k] = a;
        u[1][k] = bp;
        u[2][k] = e.conj();
        u[3][k] = cc;
    }
    let diag = |v: &Vec<C64>| CMatrix::from_diagonal(&nalgebra::DVector::from_vec(v.clone()));
    let (u1, u2, u3, u4) = (diag(&u[0]), diag(&u[1]), diag(&u[2]), diag(&u[3]));
    let s = c(1.0 / 2f64.sqrt(), 0.0);
    let mut e1 = CMatrix::zeros(n2, n2);
    let mut e2 = CMatrix::zeros(n2, n2);
    let u3f = &u3 * &f;
    let top_left = f.clone();
    e1.view_mut((0, 0), (n, n)).copy_from(&(&top_left * s));
    e1.view_mut((0, n), (n, n)).copy_from(&(&u3f * s));
    e1.view_mut((n, 0), (n, n)).copy_from(&(&top_left * s));
    e1.view_mut((n, n), (n, n)).copy_from(&(&u3f * (-s)));
    let u1f = &u1 * &f;
    let u14f = &u1 * &u4 * &f;
    let u2f = &u2 * &f;
    let u24f = &u2 * &u4 * &f;
    e2.view_mut((0, 0), (n, n)).copy_from(&(&u1f * s));
    e2.view_mut((0, n), (n, n)).copy_from(&(&u14f * s));
    e2.view_mut((n, 0), (n, n)).copy_from(&(&u2f * s));
    e2.view_mut((n, n), (n, n)).copy_from(&(&u24f * (-s)));
    let tol = ToleranceProfile::default();
    let back = e1.adjoint() * &e2;
    let err = (&back - t).camax();
    if err > 1e-9 {
        return Err(Error::Numerical(format!(
            "decomposition does not reproduce T (error {err:.3e})"
        )));
    }
    Ok((
        HadamardMatrix::new(e1, &tol)?,
        HadamardMatrix::new(e2, &tol)?,
    ))
}

/// Write a unitary `S = 1/2 [[a+b, c(a-b)], [e(a-b), e c (a+b)]]` and return
/// the unimodular `(a, b, c, e)`.
fn split_unitary_2x2(s: [[C64; 2]; 2]) -> Result<(C64, C64, C64, C64)> {
    let tiny = 1e-12;
    let (a, b, cc, e) = if s[0][0].norm() < tiny {
        // a = -b
        let a = c(1.0, 0.0);
        (a, -a, s[0][1], s[1][0])
    } else if s[0][1].norm() < tiny {
        let a = s[0][0];
        (a, a, c(1.0, 0.0), s[1][1] / s[0][0])
    } else {
        let e2 = (s[1][1] / s[0][0]) * (s[1][0] / s[0][1]);
        let e = e2.sqrt();
        let cc = s[1][1] / (s[0][0] * e);
        let m12 = s[0][1] / cc;
        (s[0][0] + m12, s[0][0] - m12, cc, e)
    };
    for z in [a, b, cc, e] {
        if (z.norm() - 1.0).abs() > 1e-8 {
            return Err(Error::Numerical(format!(
                "non-unimodular phase {z} in 2x2 split"
            )));
        }
    }
    Ok((a, b, cc, e))
}

/// Deduplicated values `d^2 H_ij conj(H_kj) H_kl conj(H_il)`, sorted by argument.
#[derive(Debug, Clone, PartialEq)]
pub struct HaagerupSet {
    pub values: Vec<C64>,
}

impl HaagerupSet {
    /// Same size and values pairwise within `eps`.
    pub fn matches(&self, other: &HaagerupSet, eps: f64) -> bool {
        self.values.len() == other.values.len()
            && self
                .values
                .iter()
                .all(|a| other.values.iter().any(|b| (a - b).norm() < eps))
    }
}

pub fn haagerup_set(h: &HadamardMatrix, eps: f64) -> HaagerupSet {
    let m = h.entries();
    let d = m.nrows();
    let scale = (d * d) as f64;
    let mut vals: Vec<C64> = Vec::with_capacity(d * d * d * d);
    for i in 0..d {
        for k in 0..d {
            for j in 0..d {
                let p = m[(i, j)] * m[(k, j)].conj();
                for l in 0..d {
                    vals.push(p * m[(k, l)] * m[(i, l)].conj() * scale);
                }
            }
        }
    }
    let key = |z: &C64| z.arg().rem_euclid(2.0 * PI);
    vals.sort_by(|a, b| key(a).total_cmp(&key(b)));
    let mut out: Vec<C64> = Vec::new();
    for v in vals {
        if !out.iter().any(|u| (u - v).norm() < eps) {
            out.push(v);
        }
    }
    HaagerupSet { values: out }
}

/// Dimension of the first-order phase-perturbation space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct DefectReport {
    pub defect: usize,
    pub system_rank: usize,
    pub matrix_order: usize,
}

/// Real linear system `sum_l H_jl conj(H_kl) (R_jl - R_kl) = 0` for `j < k`
/// in the core variables of the dephased matrix.
pub fn defect(h: &HadamardMatrix) -> DefectReport {
    let m = h.dephased();
    let d = m.nrows();
    let n = (d - 1) * (d - 1);
    let var = |j: usize, l: usize| -> Option<usize> {
        if j == 0 || l == 0 {
            None
        } else {
            Some((j - 1) * (d - 1) + (l - 1))
        }
    };
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for j in 0..d {
        for k in j + 1..d {
            let mut re = vec![0.0; n];
            let mut im = vec![0.0; n];
            for l in 0..d {
                let coef = m[(j, l)] * m[(k, l)].conj();
                if let Some(v) = var(j, l) {
                    re[v] += coef.re;
                    im[v] += coef.im;
                }
                if let Some(v) = var(k, l) {
                    re[v] -= coef.re;
                    im[v] -= coef.im;
                }
            }
            rows.push(re);
            rows.push(im);
        }
    }
    let a = DMatrix::from_fn(
        rows.len(),
        n.max(1),
        |i, j| if n == 0 { 0.0 } else { rows[i][j] },
    );
    let sv = a.singular_values();
    let smax = sv.iter().fold(0.0f64, |x, &y| x.max(y));
    let rank = if n == 0 {
        0
    } else {
        sv.iter().filter(|&&s| s > 1e-8 * smax).count()
    };
    DefectReport {
        defect: n - rank,
        system_rank: rank,
        matrix_order: d,
    }
}

/// `sum_{n=1}^{d-1} (gcd(n, d) - 1)`.
pub fn fourier_defect(d: usize) -> usize {
    (1..d).map(|n| gcd(n as u64, d as u64) as usize - 1).sum()
}

/// Cheap structural properties.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct StructureFlags {
    pub butson_order: Option<usize>,
    pub is_real: bool,
    pub is_circulant: bool,
    pub h2_reducible: bool,
    pub has_subunitary_3x3: Option<bool>,
}

pub fn butson_order(h: &HadamardMatrix, eps: f64) -> Option<usize> {
    let d = h.dim();
    let u = h.unimodular();
    (1..=2 * d).find(|&r| {
        u.iter().all(|z| {
            let t = z.arg() / (2.0 * PI) * r as f64;
            (t - t.round()).abs() * 2.0 * PI / (r as f64) < eps
        })
    })
}

/// Any 3x3 submatrix proportional to a unitary (order 6 only).
pub fn has_subunitary_3x3(h: &HadamardMatrix, eps: f64) -> Result<bool> {
    if h.dim() != 6 {
        return Err(Error::Unsupported(
            "the 3x3 submatrix scan is defined for order 6".into(),
        ));
    }
    let m = h.unimodular();
    let triples: Vec<[usize; 3]> = (0..6)
        .flat_map(|a| (a + 1..6).flat_map(move |b| (b + 1..6).map(move |c| [a, b, c])))
        .collect();
    for r in &triples {
        for cset in &triples {
            let mut ok = true;
            'outer: for i in 0..3 {
                for j in 0..3 {
                    let g: C64 = (0..3)
                        .map(|t| m[(r[i], cset[t])] * m[(r[j], cset[t])].conj())
                        .sum();
                    let target = if i == j { 3.0 } else { 0.0 };
                    if (g - c(target, 0.0)).norm() > eps {
                        ok = false;
                        break 'outer;
                    }
                }
            }
            if ok {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

pub fn structure_flags(h: &HadamardMatrix, tol: &ToleranceProfile) -> StructureFlags {
    let d = h.dim();
    let m = h.entries();
    let is_real = m.iter().all(|z| z.im.abs() < tol.eps_mod);
    let is_circulant = (0..d)
        .all(|j| (0..d).all(|k| (m[(j, k)] - m[((j + 1) % d, (k + 1) % d)]).norm() < tol.eps_mod));
    let dp = h.dephased() * c((d as f64).sqrt(), 0.0);
    let h2_reducible = dp.iter().any(|z| (z + 1.0).norm() < 1e-8);
    StructureFlags {
        butson_order: butson_order(h, tol.eps_mod),
        is_real,
        is_circulant,
        h2_reducible,
        has_subunitary_3x3: if d == 6 {
            Some(has_subunitary_3x3(h, tol.eps_orth).unwrap_or(false))
        } else {
            None
        },
    }
}

/// Random equivalent matrix `P1 D1 H D2 P2`.
pub fn random_equivalent<R: rand::Rng + ?Sized>(h: &HadamardMatrix, rng: &mut R) -> HadamardMatrix {
    use rand::seq::SliceRandom;
    let d = h.dim();
    let mut p1: Vec<usize> = (0..d).collect();
    let mut p2: Vec<usize> = (0..d).collect();
    p1.shuffle(rng);
    p2.shuffle(rng);
    let d1: Vec<C64> = (0..d)
        .map(|_| cis(rng.random::<f64>() * 2.0 * PI))
        .collect();
    let d2: Vec<C64> = (0..d)
        .map(|_| cis(rng.random::<f64>() * 2.0 * PI))
        .collect();
    let m = h.entries();
    let out = CMatrix::from_fn(d, d, |i, j| d1[p1[i]] * m[(p1[i], p2[j])] * d2[p2[j]]);
    HadamardMatrix::new(out, &ToleranceProfile::default()).expect("equivalence preserves Hadamard")
}

/// Redephase an already-Hadamard matrix (idempotent).
pub fn dephase_hadamard(h: &HadamardMatrix) -> HadamardMatrix {
    HadamardMatrix::new(dephase(h.entries()), &ToleranceProfile::default())
        .expect("dephasing preserves Hadamard")
}
