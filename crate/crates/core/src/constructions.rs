//! Complete sets of MU bases and related structured families.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::finite_algebra::{
    is_prime, prime_power, smallest_prime_one_mod, GaloisField, GaloisRing, LatinSquare, MolsFamily,
};
use crate::numeric::{
    c, cis, inner, kron_vec, root_of_unity, CMatrix, HadamardMatrix, Method, MubSet,
    OrthonormalBasis, C64,
};

fn basis_from_fn(d: usize, f: impl Fn(usize, usize) -> C64) -> OrthonormalBasis {
    OrthonormalBasis::new_unchecked(CMatrix::from_fn(d, d, f))
}

fn basis_from_columns(cols: &[Vec<C64>]) -> OrthonormalBasis {
    let d = cols.len();
    basis_from_fn(d, |i, k| cols[k][i])
}

/// Complete set of `d + 1` MU bases by the named method.
pub fn construct_complete(method: Method, d: usize) -> Result<MubSet> {
    match method {
        Method::Ivanovic => ivanovic(d),
        Method::WoottersFields => wootters_fields(d),
        Method::KlappeneckerRotteler => klappenecker_rotteler(d),
        Method::Alltop => alltop(d),
        Method::HeisenbergWeyl => heisenberg_weyl(d),
        other => Err(Error::Unsupported(format!(
            "{} does not produce complete sets",
            other.name()
        ))),
    }
}

/// Methods whose preconditions accept `d`.
pub fn applicable_methods(d: usize) -> Vec<Method> {
    let mut out = Vec::new();
    let pp = prime_power(d as u64);
    if is_prime(d as u64) && d > 2 {
        out.push(Method::Ivanovic);
    }
    if let Some((p, _)) = pp {
        if p > 2 {
            out.push(Method::WoottersFields);
        } else {
            out.push(Method::KlappeneckerRotteler);
        }
        if p >= 5 {
            out.push(Method::Alltop);
        }
    }
    if is_prime(d as u64) {
        out.push(Method::HeisenbergWeyl);
    }
    out
}

/// `e^{2 pi i (b k^2 + v k)/p} / sqrt(p)` for an odd prime `p`.
pub fn ivanovic(p: usize) -> Result<MubSet> {
    if !is_prime(p as u64) || p == 2 {
        return Err(Error::Unsupported(format!(
            "ivanovic requires an odd prime dimension, got {p}"
        )));
    }
    let s = 1.0 / (p as f64).sqrt();
    let mut bases = vec![OrthonormalBasis::standard(p)];
    for b in 0..p {
        bases.push(basis_from_fn(p, |k, v| {
            root_of_unity((b * k * k + v * k) as i64, p as u64) * s
        }));
    }
    Ok(MubSet::new(bases)?.with_method(Method::Ivanovic, vec![]))
}

/// `e^{(2 pi i/p) Tr[b k^2 + v k]} / sqrt(q)` over `GF(q)` with `q` odd.
pub fn wootters_fields(q: usize) -> Result<MubSet> {
    match prime_power(q as u64) {
        Some((p, _)) if p > 2 => {}
        _ => {
            return Err(Error::Unsupported(format!(
                "wootters_fields requires an odd prime power dimension, got {q}"
            )))
        }
    }
    let gf = GaloisField::new(q as u64)?;
    let p = gf.characteristic();
    let s = 1.0 / (q as f64).sqrt();
    let mut bases = vec![OrthonormalBasis::standard(q)];
    for b in gf.elements() {
        bases.push(basis_from_fn(q, |k, v| {
            let (k, v) = (k as u32, v as u32);
            let arg = gf.add(gf.mul(b, gf.mul(k, k)), gf.mul(v, k));
            root_of_unity(gf.trace(arg) as i64, p) * s
        }));
    }
    Ok(MubSet::new(bases)?.with_method(Method::WoottersFields, vec![]))
}

/// `i^{Tr[(b + 2v) k]} / sqrt(q)` over the Teichmuller set of `GR(4, n)`.
pub fn klappenecker_rotteler(q: usize) -> Result<MubSet> {
    let n = match prime_power(q as u64) {
        Some((2, n)) => n,
        _ => {
            return Err(Error::Unsupported(format!(
                "klappenecker_rotteler requires d = 2^n, got {q}"
            )))
        }
    };
    let gr = GaloisRing::new(n)?;
    let t = gr.teichmuller();
    let s = 1.0 / (q as f64).sqrt();
    let mut bases = vec![OrthonormalBasis::standard(q)];
    for &b in t {
        bases.push(basis_from_fn(q, |k, v| {
            let r = gr.add(b, gr.scale(2, t[v]));
            root_of_unity(gr.trace(gr.mul(r, t[k])) as i64, 4) * s
        }));
    }
    Ok(MubSet::new(bases)?.with_method(Method::KlappeneckerRotteler, vec![]))
}

/// Cubic phases `e^{(2 pi i/p) Tr[(k+b)^3 + v (k+b)]} / sqrt(q)`, `p >= 5`.
pub fn alltop(q: usize) -> Result<MubSet> {
    match prime_power(q as u64) {
        Some((p, _)) if p >= 5 => {}
        _ => {
            return Err(Error::Unsupported(format!(
                "alltop requires d = p^n with p >= 5, got {q}"
            )))
        }
    }
    let gf = GaloisField::new(q as u64)?;
    let p = gf.characteristic();
    let s = 1.0 / (q as f64).sqrt();
    let mut bases = vec![OrthonormalBasis::standard(q)];
    for b in gf.elements() {
        bases.push(basis_from_fn(q, |k, v| {
            let x = gf.add(k as u32, b);
            let arg = gf.add(gf.mul(x, gf.mul(x, x)), gf.mul(v as u32, x));
            root_of_unity(gf.trace(arg) as i64, p) * s
        }));
    }
    Ok(MubSet::new(bases)?.with_method(Method::Alltop, vec![]))
}

/// Eigenbasis of `X Z^b` for prime `p`; column `v` has phases
/// `(b k(k-1) - k b (p-1) + 2 k v) / (2p)` turns.
pub fn hw_eigenbasis(p: usize, b: usize) -> OrthonormalBasis {
    let s = 1.0 / (p as f64).sqrt();
    basis_from_fn(p, |k, v| {
        let (k, v, b) = (k as i64, v as i64, b as i64);
        let num = b * k * (k - 1) - k * b * (p as i64 - 1) + 2 * k * v;
        root_of_unity(num, 2 * p as u64) * s
    })
}

/// Standard basis followed by the eigenbases of `X Z^b`, `b = 0..p-1`.
pub fn heisenberg_weyl(p: usize) -> Result<MubSet> {
    if !is_prime(p as u64) {
        return Err(Error::Unsupported(format!(
            "heisenberg_weyl requires a prime dimension, got {p}"
        )));
    }
    let mut bases = vec![OrthonormalBasis::standard(p)];
    bases.extend((0..p).map(|b| hw_eigenbasis(p, b)));
    Ok(MubSet::new(bases)?.with_method(Method::HeisenbergWeyl, vec![]))
}

/// Shift `X|k> = |k+1>`.
pub fn shift(d: usize) -> CMatrix {
    CMatrix::from_fn(d, d, |i, j| {
        if i == (j + 1) % d {
            c(1.0, 0.0)
        } else {
            c(0.0, 0.0)
        }
    })
}

/// Clock `Z|k> = w^k |k>`.
pub fn clock(d: usize) -> CMatrix {
    CMatrix::from_fn(d, d, |i, j| {
        if i == j {
            root_of_unity(i as i64, d as u64)
        } else {
            c(0.0, 0.0)
        }
    })
}

/// Commuting class `{U^j : j = 0..d-1}` generated by one displacement operator.
#[derive(Debug, Clone)]
pub struct HwOperatorClass {
    pub dim: usize,
    pub generator_label: String,
    pub members: Vec<CMatrix>,
}

/// The `p + 1` classes generated by `Z, X, XZ, ..., XZ^{p-1}` and their
/// joint eigenbases.
pub fn heisenberg_weyl_classes(p: usize) -> Result<(Vec<HwOperatorClass>, MubSet)> {
    let set = heisenberg_weyl(p)?;
    let x = shift(p);
    let z = clock(p);
    let mut gens = vec![("Z".to_string(), z.clone())];
    let mut zb = CMatrix::identity(p, p);
    for b in 0..p {
        let label = match b {
            0 => "X".to_string(),
            1 => "XZ".to_string(),
            _ => format!("XZ^{b}"),
        };
        gens.push((label, &x * &zb));
        zb = &zb * &z;
    }
    let classes = gens
        .into_iter()
        .map(|(label, g)| {
            let mut members = vec![CMatrix::identity(p, p)];
            for _ in 1..p {
                let next = members.last().unwrap() * &g;
                members.push(next);
            }
            HwOperatorClass {
                dim: p,
                generator_label: label,
                members,
            }
        })
        .collect();
    Ok((classes, set))
}

/// Tensor product of MU sets: basis `k` of the result is the product of the
/// `k`-th bases of every factor, for `k < min` count.
pub fn tensor_product_mubs(factors: &[MubSet]) -> Result<MubSet> {
    let first = factors
        .first()
        .ok_or_else(|| Error::domain("empty factor list"))?;
    let mu = factors.iter().map(|f| f.len()).min().unwrap_or(0);
    let mut mats: Vec<CMatrix> = first.bases()[..mu]
        .iter()
        .map(|b| b.matrix().clone())
        .collect();
    for f in &factors[1..] {
        for (k, m) in mats.iter_mut().enumerate() {
            *m = m.kronecker(f.basis(k).matrix());
        }
    }
    let dims: Vec<f64> = factors.iter().map(|f| f.dim() as f64).collect();
    let bases = mats
        .into_iter()
        .map(OrthonormalBasis::new_unchecked)
        .collect();
    Ok(MubSet::new(bases)?.with_method(
        Method::TensorProduct,
        dims.into_iter()
            .enumerate()
            .map(|(i, d)| (format!("d{i}"), d))
            .collect(),
    ))
}

/// Preferred complete-set method for a prime power.
pub fn default_method(q: usize) -> Result<Method> {
    match prime_power(q as u64) {
        Some((2, _)) => Ok(Method::KlappeneckerRotteler),
        Some((p, 1)) if p > 2 => Ok(Method::Ivanovic),
        Some(_) => Ok(Method::WoottersFields),
        None => Err(Error::Unsupported(format!("{q} is not a prime power"))),
    }
}

/// Largest set available by tensoring complete sets of the prime-power factors.
pub fn tensor_mubs(d: usize) -> Result<MubSet> {
    let parts: Vec<usize> = crate::finite_algebra::factorize(d as u64)
        .iter()
        .map(|(p, e)| p.pow(*e) as usize)
        .collect();
    if parts.is_empty() {
        return Err(Error::domain("dimension must be at least 2"));
    }
    let sets = parts
        .iter()
        .map(|&q| construct_complete(default_method(q)?, q))
        .collect::<Result<Vec<_>>>()?;
    tensor_product_mubs(&sets)
}

/// Bases in `d = s^2` built from a net of Latin squares and a Hadamard
/// matrix of order `s`: `psi_{j,m} = sum_t H_{m,t} |cell_t(j)>` where the
/// cells of symbol `j` are listed in row-major order. The row and column
/// label squares come first, then the Latin squares.
pub fn latin_square_mubs(s: usize, squares: &[LatinSquare], h: &HadamardMatrix) -> Result<MubSet> {
    if h.dim() != s {
        return Err(Error::shape("Hadamard order must match the square order"));
    }
    for (i, a) in squares.iter().enumerate() {
        if a.order() != s {
            return Err(Error::shape("square order mismatch"));
        }
        for b in &squares[i + 1..] {
            if !a.is_orthogonal_to(b) {
                return Err(Error::domain("input squares are not mutually orthogonal"));
            }
        }
    }
    let (rows, cols) = crate::finite_algebra::row_column_labels(s);
    let mut labelings: Vec<Vec<usize>> = vec![rows, cols];
    labelings.extend(
        squares
            .iter()
            .map(|sq| (0..s * s).map(|k| sq.get(k / s, k % s)).collect()),
    );
    let hm = h.entries();
    let d = s * s;
    let bases = labelings
        .iter()
        .map(|lab| {
            let mut cols = Vec::with_capacity(d);
            for j in 0..s {
                let cells: Vec<usize> = (0..d).filter(|&k| lab[k] == j).collect();
                for m in 0..s {
                    let mut v = vec![c(0.0, 0.0); d];
                    for (t, &cell) in cells.iter().enumerate() {
                        v[cell] = hm[(m, t)];
                    }
                    cols.push(v);
                }
            }
            basis_from_columns(&cols)
        })
        .collect();
    Ok(MubSet::new(bases)?.with_method(
        Method::LatinSquare,
        vec![
            ("s".into(), s as f64),
            ("mols".into(), squares.len() as f64),
        ],
    ))
}

/// Latin-square bases from the field MOLS of order `s` and `F_s`.
pub fn latin_square_mubs_default(s: usize) -> Result<MubSet> {
    let fam: MolsFamily = crate::finite_algebra::mols_generate(s as u64)?;
    let h = HadamardMatrix::new(crate::numeric::fourier(s), &Default::default())?;
    latin_square_mubs(s, &fam.squares, &h)
}

/// Weighted 2-design of `d + 2` bases for `d = p^n - 1`: the standard basis
/// with weight `1/(d(d+1))` and, for every `b` in `GF(d+1)`, the basis
/// `(1/sqrt d) sum_k e^{2 pi i v k/d} e^{2 pi i Tr[b y^k]/p} |k>` with weight
/// `1/(d+1)^2`.
pub fn weighted_design(d: usize) -> Result<MubSet> {
    let q = d + 1;
    if d < 2 || prime_power(q as u64).is_none() {
        return Err(Error::Unsupported(format!(
            "weighted design needs d + 1 to be a prime power, got d = {d}"
        )));
    }
    let gf = GaloisField::new(q as u64)?;
    let p = gf.characteristic();
    let labels: Vec<u32> = if d == 6 {
        // b = 1..7 with 7 = 0 in GF(7)
        (1..=7).map(|b| b % 7).collect()
    } else {
        gf.elements().collect()
    };
    let s = 1.0 / (d as f64).sqrt();
    let mut bases = vec![OrthonormalBasis::standard(d)];
    for &b in &labels {
        bases.push(basis_from_fn(d, |k, v| {
            let tr = gf.trace(gf.mul(b, gf.primitive_power(k as u64)));
            root_of_unity((v * k) as i64, d as u64) * root_of_unity(tr as i64, p) * s
        }));
    }
    let mut weights = vec![1.0 / (d * (d + 1)) as f64];
    weights.extend(std::iter::repeat_n(1.0 / (q * q) as f64, q));
    MubSet::new(bases)?
        .with_method(Method::WeightedDesign, vec![("d".into(), d as f64)])
        .with_weights(weights)
}

/// Approximately MU bases `v_b(k) = e^{2 pi i b k^2/p} e^{2 pi i v k/d}/sqrt d`,
/// `b = 1..d`, after the standard basis.
#[derive(Debug, Clone)]
pub struct ApproxMubs {
    pub set: MubSet,
    pub p: u64,
    pub max_overlap: f64,
    pub bound: f64,
}

pub fn approx_mub(d: usize, p: Option<u64>) -> Result<ApproxMubs> {
    if d < 2 {
        return Err(Error::domain("dimension must be at least 2"));
    }
    let p = p.unwrap_or_else(|| smallest_prime_one_mod(d as u64));
    if !is_prime(p) {
        return Err(Error::domain(format!("{p} is not prime")));
    }
    let s = 1.0 / (d as f64).sqrt();
    let mut bases = vec![OrthonormalBasis::standard(d)];
    for b in 1..=d {
        bases.push(basis_from_fn(d, |k, v| {
            let quad = (b as u64 * (k * k) as u64) % p;
            root_of_unity(quad as i64, p) * root_of_unity((v * k) as i64, d as u64) * s
        }));
    }
    let set = MubSet::new(bases)?.with_method(Method::Approx, vec![("p".into(), p as f64)]);
    let mut max_overlap = 0.0f64;
    for (i, a) in set.bases().iter().enumerate() {
        for b in &set.bases()[i + 1..] {
            let g = a.matrix().adjoint() * b.matrix();
            for z in g.iter() {
                max_overlap = max_overlap.max(z.norm_sqr());
            }
        }
    }
    Ok(ApproxMubs {
        set,
        p,
        max_overlap,
        bound: (p as f64).sqrt() / d as f64,
    })
}

/// Pairs and triples of product bases in `C^2 (x) C^3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProductFamily {
    P0,
    P1,
    P2,
    P3,
    T0,
    T1,
}

impl ProductFamily {
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s.to_ascii_uppercase().as_str() {
            "P0" => ProductFamily::P0,
            "P1" => ProductFamily::P1,
            "P2" => ProductFamily::P2,
            "P3" => ProductFamily::P3,
            "T0" => ProductFamily::T0,
            "T1" => ProductFamily::T1,
            _ => return None,
        })
    }
}

/// Free parameters of the product families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductParams {
    pub xi: f64,
    pub eta: f64,
    pub zeta: f64,
    pub chi: f64,
    pub sigma: f64,
    pub tau: f64,
}

impl Default for ProductParams {
    fn default() -> Self {
        let v = PI / 5.0;
        ProductParams {
            xi: v,
            eta: v,
            zeta: v,
            chi: v,
            sigma: v,
            tau: v,
        }
    }
}

impl ProductParams {
    fn check(&self) -> Result<()> {
        for (name, v) in [
            ("xi", self.xi),
            ("eta", self.eta),
            ("zeta", self.zeta),
            ("chi", self.chi),
        ] {
            if !(0.0..2.0 * PI).contains(&v) {
                return Err(Error::domain(format!("{name} = {v} outside [0, 2pi)")));
            }
        }
        for (name, v) in [("sigma", self.sigma), ("tau", self.tau)] {
            if !(v > 0.0 && v < PI) {
                return Err(Error::domain(format!("{name} = {v} outside (0, pi)")));
            }
        }
        Ok(())
    }
}

/// Product bases in `d = 6` with qubit factor first (index `3 i1 + i2`).
pub fn product_family_d6(which: ProductFamily, params: &ProductParams) -> Result<MubSet> {
    params.check()?;
    let qz = OrthonormalBasis::standard(2).vectors();
    let qx = hw_eigenbasis(2, 0).vectors();
    let qy = hw_eigenbasis(2, 1).vectors();
    let vz = OrthonormalBasis::standard(3).vectors();
    let vx = hw_eigenbasis(3, 0).vectors();
    let vy = hw_eigenbasis(3, 1).vectors();
    let vw = hw_eigenbasis(3, 2).vectors();

    let prod = |a: &[Vec<C64>], b: &[Vec<C64>]| -> OrthonormalBasis {
        let cols: Vec<Vec<C64>> = a
            .iter()
            .flat_map(|x| b.iter().map(move |y| kron_vec(x, y)))
            .collect();
        basis_from_columns(&cols)
    };
    // Qubit vector `q` paired with each vector of a qutrit basis, for both
    // qubit vectors with possibly different qutrit bases.
    let split = |q: &[Vec<C64>], t0: &[Vec<C64>], t1: &[Vec<C64>]| -> OrthonormalBasis {
        let mut cols: Vec<Vec<C64>> = t0.iter().map(|y| kron_vec(&q[0], y)).collect();
        cols.extend(t1.iter().map(|y| kron_vec(&q[1], y)));
        basis_from_columns(&cols)
    };
    let apply = |m: &CMatrix, vs: &[Vec<C64>]| -> Vec<Vec<C64>> {
        vs.iter()
            .map(|v| {
                (m * nalgebra::DVector::from_column_slice(v))
                    .iter()
                    .copied()
                    .collect()
            })
            .collect()
    };

    let bases = match which {
        ProductFamily::P0 => vec![prod(&qz, &vz), prod(&qx, &vx)],
        ProductFamily::P1 => {
            let r = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
                c(1.0, 0.0),
                cis(params.xi),
                cis(params.eta),
            ]));
            vec![prod(&qz, &vz), split(&qx, &vx, &apply(&r, &vx))]
        }
        ProductFamily::P2 => vec![split(&qz, &vz, &vy), split(&qx, &vx, &vw)],
        ProductFamily::P3 => {
            let f = hw_eigenbasis(3, 0).matrix().clone();
            let diag = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
                c(1.0, 0.0),
                cis(params.zeta),
                cis(params.chi),
            ]));
            let s = &f * diag * f.adjoint();
            let rot = |phi: f64| -> Vec<Vec<C64>> {
                let h = 1.0 / 2f64.sqrt();
                vec![
                    vec![c(h, 0.0), cis(phi) * h],
                    vec![c(h, 0.0), -cis(phi) * h],
                ]
            };
            let mut cols = Vec::new();
            for (phi, t) in [(0.0, &vx[0]), (params.sigma, &vx[1]), (params.tau, &vx[2])] {
                for q in rot(phi) {
                    cols.push(kron_vec(&q, t));
                }
            }
            vec![split(&qz, &vz, &apply(&s, &vz)), basis_from_columns(&cols)]
        }
        ProductFamily::T0 => vec![prod(&qz, &vz), prod(&qx, &vx), prod(&qy, &vy)],
        ProductFamily::T1 => vec![prod(&qz, &vz), prod(&qx, &vx), split(&qy, &vy, &vw)],
    };
    let p = params;
    Ok(MubSet::new(bases)?.with_method(
        Method::ProductFamilyD6,
        vec![
            ("xi".into(), p.xi),
            ("eta".into(), p.eta),
            ("zeta".into(), p.zeta),
            ("chi".into(), p.chi),
            ("sigma".into(), p.sigma),
            ("tau".into(), p.tau),
        ],
    ))
}

/// Hermitian matrix in orthonormal real coordinates for the trace inner product.
fn herm_to_real(m: &CMatrix) -> Vec<f64> {
    let d = m.nrows();
    let r2 = 2f64.sqrt();
    let mut out = Vec::with_capacity(d * d);
    for i in 0..d {
        out.push(m[(i, i)].re);
    }
    for i in 0..d {
        for j in i + 1..d {
            out.push(r2 * m[(i, j)].re);
            out.push(r2 * m[(i, j)].im);
        }
    }
    out
}

fn real_to_herm(x: &[f64], d: usize) -> CMatrix {
    let r2 = 2f64.sqrt();
    let mut m = CMatrix::zeros(d, d);
    for i in 0..d {
        m[(i, i)] = c(x[i], 0.0);
    }
    let mut t = d;
    for i in 0..d {
        for j in i + 1..d {
            let z = c(x[t], x[t + 1]) / r2;
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
            t += 2;
        }
    }
    m
}

/// Rebuild the last basis of a complete set from the first `d` bases: the
/// orthogonal complement of their traceless projector planes is spanned by
/// the missing basis, and a generic element of it has that basis as eigenbasis.
pub fn complete_missing_basis(partial: &MubSet) -> Result<OrthonormalBasis> {
    let d = partial.dim();
    if partial.len() != d {
        return Err(Error::domain(format!(
            "need exactly d = {d} bases, got {}",
            partial.len()
        )));
    }
    let id = CMatrix::identity(d, d);
    let mut rows: Vec<Vec<f64>> = vec![herm_to_real(&id)];
    for b in partial.bases() {
        for v in b.vectors() {
            let col = nalgebra::DVector::from_column_slice(&v);
            let proj = &col * col.adjoint() - &id / c(d as f64, 0.0);
            rows.push(herm_to_real(&proj));
        }
    }
    let n = d * d;
    let a = DMatrix::from_fn(rows.len(), n, |i, j| rows[i][j]);
    let ata = a.transpose() * &a;
    let eig = SymmetricEigen::new(ata);
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let scale = eig.eigenvalues.amax().max(1.0);
    let null: Vec<usize> = idx
        .into_iter()
        .take_while(|&i| eig.eigenvalues[i] < 1e-9 * scale)
        .collect();
    if null.len() != d - 1 {
        return Err(Error::Numerical(format!(
            "complement has dimension {}, expected {}",
            null.len(),
            d - 1
        )));
    }
    let mut x = vec![0.0; n];
    for (t, &i) in null.iter().enumerate() {
        // Incommensurate weights keep the combination's spectrum simple.
        let w = 1.0 + (t as f64 + 1.0) * 0.618_033_988_749_895;
        for j in 0..n {
            x[j] += w * eig.eigenvectors[(j, i)];
        }
    }
    let g = real_to_herm(&x, d);
    let se = SymmetricEigen::new(g);
    let mut ev: Vec<f64> = se.eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    if ev.windows(2).any(|w| (w[1] - w[0]).abs() < 1e-8) {
        return Err(Error::Numerical("degenerate spectrum in completion".into()));
    }
    let cols: Vec<Vec<C64>> = (0..d)
        .map(|k| crate::numeric::canonicalize(&crate::numeric::column(&se.eigenvectors, k)))
        .collect();
    OrthonormalBasis::from_columns(&cols, 1e-9)
}

/// Squared overlap of a vector with every column of a basis.
pub fn overlaps_with(v: &[C64], basis: &OrthonormalBasis) -> Vec<f64> {
    basis
        .vectors()
        .iter()
        .map(|u| inner(u, v).norm_sqr())
        .collect()
}
