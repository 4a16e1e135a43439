//! Verification of MU sets: overlap tests, scalar functionals, Welch sums,
//! design identities, entanglement content, witnesses and Fourier constraints.

use nalgebra::{DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{
    c, inner, kron_vec, operator_norm, purity, root_of_unity, CMatrix, MubSet, ToleranceProfile,
    C64,
};

/// Summary of the MU conditions for a collection of bases.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MuReport {
    pub dim: usize,
    pub num_bases: usize,
    pub max_mu_deviation: f64,
    pub max_orth_deviation: f64,
    pub f_value: f64,
    pub avg_distance: f64,
}

impl MuReport {
    pub fn passes(&self, tol: &ToleranceProfile) -> bool {
        self.max_mu_deviation < tol.eps_mu && self.max_orth_deviation < tol.eps_unitary
    }
}

fn gram_blocks(set: &MubSet) -> Vec<Vec<CMatrix>> {
    let bases = set.bases();
    bases
        .iter()
        .map(|a| {
            bases
                .iter()
                .map(|b| a.matrix().adjoint() * b.matrix())
                .collect()
        })
        .collect()
}

/// Deviations, the sum `F = sum (|<v_b|v'_b'>| - chi)^2` over all ordered
/// vector pairs, and the average squared distance between bases.
pub fn check_mu_set(set: &MubSet) -> Result<MuReport> {
    let d = set.dim();
    let mu = set.len();
    if mu < 2 {
        return Err(Error::domain("need at least two bases"));
    }
    let df = d as f64;
    let g = gram_blocks(set);
    let mut max_mu = 0.0f64;
    let mut max_orth = 0.0f64;
    let mut f = 0.0;
    let mut dist_sum = 0.0;
    for b in 0..mu {
        for b2 in 0..mu {
            let m = &g[b][b2];
            let mut sq_dev = 0.0;
            for v in 0..d {
                for v2 in 0..d {
                    let z = m[(v, v2)].norm();
                    let chi = if b == b2 {
                        if v == v2 {
                            1.0
                        } else {
                            0.0
                        }
                    } else {
                        1.0 / df.sqrt()
                    };
                    f += (z - chi) * (z - chi);
                    if b == b2 {
                        let target = if v == v2 { c(1.0, 0.0) } else { c(0.0, 0.0) };
                        max_orth = max_orth.max((m[(v, v2)] - target).norm());
                    } else {
                        max_mu = max_mu.max((z * z - 1.0 / df).abs());
                    }
                    sq_dev += (z * z - 1.0 / df).powi(2);
                }
            }
            if b < b2 {
                dist_sum += 1.0 - sq_dev / (df - 1.0);
            }
        }
    }
    let pairs = (mu * (mu - 1) / 2) as f64;
    Ok(MuReport {
        dim: d,
        num_bases: mu,
        max_mu_deviation: max_mu,
        max_orth_deviation: max_orth,
        f_value: f,
        avg_distance: dist_sum / pairs,
    })
}

/// Welch sums over ordered pairs (self-pairs included) and 2-design deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignCheckReport {
    pub welch_k1: f64,
    pub welch_k2: f64,
    pub two_design_deviation: f64,
    pub weighted: bool,
}

/// `sum |<x|y>|^2`, `sum |<x|y>|^4` over all ordered pairs.
pub fn welch_sums(vectors: &[Vec<C64>]) -> (f64, f64) {
    let mut k1 = 0.0;
    let mut k2 = 0.0;
    for x in vectors {
        for y in vectors {
            let s = inner(x, y).norm_sqr();
            k1 += s;
            k2 += s * s;
        }
    }
    (k1, k2)
}

/// Projector onto the symmetric subspace of `C^d (x) C^d`.
pub fn symmetric_projector(d: usize) -> CMatrix {
    CMatrix::from_fn(d * d, d * d, |r, s| {
        let (i, j) = (r / d, r % d);
        let (k, l) = (s / d, s % d);
        let mut v = 0.0;
        if i == k && j == l {
            v += 0.5;
        }
        if i == l && j == k {
            v += 0.5;
        }
        c(v, 0.0)
    })
}

/// `sum_v w_v |v (x) v><v (x) v|`.
pub fn second_moment(vectors: &[Vec<C64>], weights: Option<&[f64]>) -> CMatrix {
    let d = vectors.first().map(|v| v.len()).unwrap_or(0);
    let mut m = CMatrix::zeros(d * d, d * d);
    for (t, v) in vectors.iter().enumerate() {
        let w = weights.map(|w| w[t]).unwrap_or(1.0);
        let vv = DVector::from_vec(kron_vec(v, v));
        m += (&vv * vv.adjoint()) * c(w, 0.0);
    }
    m
}

/// Welch sums and the operator-norm distance of the second moment from the
/// symmetric projector. With per-basis weights, compares against
/// `Pi_sym / binom(d+1, 2)`; otherwise against `2 Pi_sym`.
pub fn welch_and_design_check(set: &MubSet) -> DesignCheckReport {
    let d = set.dim();
    let vectors = set.all_vectors();
    let (k1, k2) = welch_sums(&vectors);
    let sym = symmetric_projector(d);
    let (moment, target, weighted) = match set.weights() {
        Some(w) => {
            let per_vec: Vec<f64> = w.iter().flat_map(|&x| std::iter::repeat_n(x, d)).collect();
            let binom = (d * (d + 1) / 2) as f64;
            (
                second_moment(&vectors, Some(&per_vec)),
                sym / c(binom, 0.0),
                true,
            )
        }
        None => (second_moment(&vectors, None), sym * c(2.0, 0.0), false),
    };
    DesignCheckReport {
        welch_k1: k1,
        welch_k2: k2,
        two_design_deviation: operator_norm(&(moment - target)),
        weighted,
    }
}

/// Sum of purities over all vectors and the value it is compared against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntanglementReport {
    pub content: f64,
    /// `d1 d2 (d1 + d2)` for complete sets, `(d1^2 + mu - 1) d2` otherwise.
    pub reference: f64,
    pub complete: bool,
    pub holds: bool,
}

pub fn entanglement_content(set: &MubSet, d1: usize, d2: usize) -> Result<EntanglementReport> {
    if set.dim() != d1 * d2 {
        return Err(Error::shape(format!(
            "dimension {} is not {d1} x {d2}",
            set.dim()
        )));
    }
    let mut content = 0.0;
    for v in set.all_vectors() {
        content += purity(&v, d1, d2)?;
    }
    let mu = set.len();
    let d = set.dim();
    let complete = mu == d + 1 && check_mu_set(set)?.passes(&ToleranceProfile::default());
    let (reference, holds) = if complete {
        let r = (d1 * d2 * (d1 + d2)) as f64;
        (r, (content - r).abs() < 1e-9)
    } else {
        let r = ((d1 * d1 + mu - 1) * d2) as f64;
        (r, content <= r + 1e-9)
    };
    Ok(EntanglementReport {
        content,
        reference,
        complete,
        holds,
    })
}

/// Value of the witness built from the first `mu` bases.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub value: f64,
    pub bound: f64,
    pub violated: bool,
}

/// `Tr[B rho]` with `B = sum_{b<mu} sum_v |v_b><v_b| (x) |v_b*><v_b*|`,
/// against the separable bound `(d + mu - 1)/d`.
pub fn witness_value(set: &MubSet, mu: usize, rho: &CMatrix) -> Result<WitnessReport> {
    let d = set.dim();
    if mu > set.len() || mu == 0 {
        return Err(Error::domain(format!("mu = {mu} out of range")));
    }
    if rho.nrows() != d * d || rho.ncols() != d * d {
        return Err(Error::shape("rho must act on C^d (x) C^d"));
    }
    let herm = (rho - rho.adjoint()).camax();
    if herm > 1e-10 {
        return Err(Error::domain("rho is not Hermitian"));
    }
    let tr = rho.trace();
    if (tr - c(1.0, 0.0)).norm() > 1e-10 {
        return Err(Error::domain(format!("rho has trace {tr}")));
    }
    let eig = SymmetricEigen::new(rho.clone());
    let lmin = eig.eigenvalues.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    if lmin < -1e-10 {
        return Err(Error::domain(format!(
            "rho is not positive semidefinite (eigenvalue {lmin:.3e})"
        )));
    }
    let mut value = 0.0;
    for b in &set.bases()[..mu] {
        for v in b.vectors() {
            let vc: Vec<C64> = v.iter().map(|z| z.conj()).collect();
            let w = DVector::from_vec(kron_vec(&v, &vc));
            value += (w.adjoint() * rho * &w)[(0, 0)].re;
        }
    }
    let bound = (d + mu - 1) as f64 / d as f64;
    Ok(WitnessReport {
        value,
        bound,
        violated: value > bound + 1e-10,
    })
}

/// `|Phi><Phi|` with `Phi = sum_k |kk>/sqrt d`.
pub fn maximally_entangled(d: usize) -> CMatrix {
    let mut v = DVector::zeros(d * d);
    for k in 0..d {
        v[k * d + k] = c(1.0 / (d as f64).sqrt(), 0.0);
    }
    &v * v.adjoint()
}

/// Average success probability `mean_{b<b'} [1/2 + sum |<v_b|v'_b'>| / (2 d^2)]`.
pub fn qrac_probability(set: &MubSet) -> Result<f64> {
    let mu = set.len();
    if mu < 2 {
        return Err(Error::domain("need at least two bases"));
    }
    let d = set.dim() as f64;
    let g = gram_blocks(set);
    let mut total = 0.0;
    let mut pairs = 0.0;
    for b in 0..mu {
        for b2 in b + 1..mu {
            let s: f64 = g[b][b2].iter().map(|z| z.norm()).sum();
            total += 0.5 + s / (2.0 * d * d);
            pairs += 1.0;
        }
    }
    Ok(total / pairs)
}

/// `-1 + sum |U_ij|^4`.
pub fn delsarte_h0(u: &CMatrix) -> f64 {
    -1.0 + u.iter().map(|z| z.norm_sqr().powi(2)).sum::<f64>()
}

/// Fourier-side quantities for one character `gamma`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierPoint {
    pub gamma: Vec<i64>,
    pub e: f64,
    pub f: f64,
    pub orth_residual: f64,
    pub sum_residual: f64,
    pub overlap_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierConstraintReport {
    pub dim: usize,
    pub e0: f64,
    pub f0: f64,
    pub points: Vec<FourierPoint>,
    pub max_residual: f64,
    /// `F(gamma) <= d E(gamma)` at every evaluated point.
    pub f_le_de: bool,
}

/// Evaluates `g_j`, `E` and `F` for a complete set and checks the linear
/// constraints at each `gamma`. The set is first rotated so its first basis is
/// the standard basis; the remaining `d` bases are scaled to unimodular columns.
pub fn fourier_linear_constraints(
    set: &MubSet,
    gammas: &[Vec<i64>],
) -> Result<FourierConstraintReport> {
    let d = set.dim();
    if set.len() != d + 1 || !check_mu_set(set)?.passes(&ToleranceProfile::default()) {
        return Err(Error::domain("input must be a complete MU set"));
    }
    let b0 = set.basis(0).matrix().adjoint();
    let scale = c((d as f64).sqrt(), 0.0);
    let hs: Vec<CMatrix> = set.bases()[1..]
        .iter()
        .map(|b| &b0 * b.matrix() * scale)
        .collect();
    let g = |j: usize, gamma: &[i64]| -> C64 {
        let h = &hs[j];
        (0..d)
            .map(|k| {
                let mut p = c(1.0, 0.0);
                for (i, &n) in gamma.iter().enumerate() {
                    let u = h[(i, k)];
                    let base = if n < 0 { u.conj() } else { u };
                    p *= base.powu(n.unsigned_abs() as u32);
                }
                p
            })
            .sum()
    };
    let ej = |j: usize, gamma: &[i64]| g(j, gamma).norm_sqr();
    let e = |gamma: &[i64]| (0..d).map(|j| ej(j, gamma)).sum::<f64>();
    let f = |gamma: &[i64]| (0..d).map(|j| g(j, gamma)).sum::<C64>().norm_sqr();
    let shift = |gamma: &[i64], r: usize, t: Option<usize>| -> Vec<i64> {
        let mut out = gamma.to_vec();
        out[r] += 1;
        if let Some(t) = t {
            out[t] -= 1;
        }
        out
    };
    let df = d as f64;
    let zero = vec![0i64; d];
    let mut points = Vec::with_capacity(gammas.len());
    let mut max_residual = 0.0f64;
    let mut f_le_de = true;
    for gamma in gammas {
        if gamma.len() != d {
            return Err(Error::shape("gamma must have d entries"));
        }
        let mut orth = 0.0f64;
        for j in 0..d {
            let s: f64 = (0..d).map(|r| ej(j, &shift(gamma, r, None))).sum();
            orth = orth.max((s - df * df).abs());
        }
        let s1: f64 = (0..d).map(|r| e(&shift(gamma, r, None))).sum();
        let sum_res = (s1 - df.powi(3)).abs();
        let mut s2 = df * e(gamma);
        for r in 0..d {
            for t in 0..d {
                if r != t {
                    s2 += f(&shift(gamma, r, Some(t)));
                }
            }
        }
        let over = (s2 - df.powi(4)).abs();
        let (ev, fv) = (e(gamma), f(gamma));
        if fv > df * ev + 1e-8 * df.powi(4) {
            f_le_de = false;
        }
        max_residual = max_residual.max(orth).max(sum_res).max(over);
        points.push(FourierPoint {
            gamma: gamma.clone(),
            e: ev,
            f: fv,
            orth_residual: orth,
            sum_residual: sum_res,
            overlap_residual: over,
        });
    }
    Ok(FourierConstraintReport {
        dim: d,
        e0: e(&zero),
        f0: f(&zero),
        points,
        max_residual,
        f_le_de,
    })
}

/// Unitaries `U_{b,k} = sum_v e^{2 pi i k v/d} P_{b,v}`, one class per basis.
pub fn commuting_classes(set: &MubSet) -> Vec<Vec<CMatrix>> {
    let d = set.dim();
    set.bases()
        .iter()
        .map(|b| {
            let m = b.matrix();
            (0..d)
                .map(|k| {
                    let diag = DVector::from_fn(d, |v, _| root_of_unity((k * v) as i64, d as u64));
                    m * CMatrix::from_diagonal(&diag) * m.adjoint()
                })
                .collect()
        })
        .collect()
}

/// Largest commutator norm inside a class and largest `|Tr U^dagger V|`
/// between non-identity members of different classes.
pub fn class_structure(classes: &[Vec<CMatrix>]) -> (f64, f64) {
    let mut comm = 0.0f64;
    let mut cross = 0.0f64;
    for (i, a) in classes.iter().enumerate() {
        for u in a {
            for v in a {
                comm = comm.max((u * v - v * u).camax());
            }
        }
        for b in &classes[i + 1..] {
            for u in &a[1..] {
                for v in &b[1..] {
                    cross = cross.max((u.adjoint() * v).trace().norm());
                }
            }
        }
    }
    (comm, cross)
}

/// Largest deviation of `(P, P') = (Tr P P' - 1/d)/2` from the value fixed
/// by the MU conditions: `(delta_vv' - 1/d)/2` within a basis, zero across.
pub fn complementarity_check(set: &MubSet) -> f64 {
    let d = set.dim() as f64;
    let g = gram_blocks(set);
    let mut worst = 0.0f64;
    for (b, row) in g.iter().enumerate() {
        for (b2, m) in row.iter().enumerate() {
            for v in 0..set.dim() {
                for v2 in 0..set.dim() {
                    let val = 0.5 * (m[(v, v2)].norm_sqr() - 1.0 / d);
                    let target = if b == b2 {
                        0.5 * (if v == v2 { 1.0 } else { 0.0 } - 1.0 / d)
                    } else {
                        0.0
                    };
                    worst = worst.max((val - target).abs());
                }
            }
        }
    }
    worst
}
