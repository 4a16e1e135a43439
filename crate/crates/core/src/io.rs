//! JSON documents for matrices, basis collections, solution sets and reports.
//!
//! Complex entries are stored as `[re, im]` pairs, row-major for matrices and
//! one block per basis or vector. Doubles round-trip exactly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{
    c, CMatrix, HadamardMatrix, Method, MubSet, OrthonormalBasis, PhaseTag, ToleranceProfile, C64,
};
use crate::search::VectorSolutionSet;

pub const FORMAT_VERSION: &str = "1.0";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DocumentKind {
    Matrix,
    Mubset,
    Solutionset,
    Report,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    #[serde(default)]
    pub params: Vec<(String, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixDocument {
    pub format_version: String,
    pub dim: usize,
    pub kind: DocumentKind,
    pub payload: Vec<Vec<[f64; 2]>>,
    #[serde(default)]
    pub metadata: Metadata,
    /// Phases in turns, `[num, den]`, row-major; present for Butson-tagged matrices.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phases: Option<Vec<[u64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<serde_json::Value>,
}

fn pack_matrix(m: &CMatrix) -> Vec<[f64; 2]> {
    let (r, k) = m.shape();
    (0..r)
        .flat_map(|i| (0..k).map(move |j| (i, j)))
        .map(|(i, j)| [m[(i, j)].re, m[(i, j)].im])
        .collect()
}

fn unpack_matrix(block: &[[f64; 2]], d: usize) -> CMatrix {
    CMatrix::from_fn(d, d, |i, j| {
        let [re, im] = block[i * d + j];
        c(re, im)
    })
}

impl MatrixDocument {
    fn base(dim: usize, kind: DocumentKind) -> Self {
        MatrixDocument {
            format_version: FORMAT_VERSION.to_string(),
            dim,
            kind,
            payload: Vec::new(),
            metadata: Metadata::default(),
            phases: None,
            report: None,
        }
    }

    pub fn from_matrix(m: &CMatrix) -> Self {
        let mut doc = Self::base(m.nrows(), DocumentKind::Matrix);
        doc.payload.push(pack_matrix(m));
        doc
    }

    pub fn from_hadamard(h: &HadamardMatrix) -> Self {
        let mut doc = Self::from_matrix(h.entries());
        doc.phases = h
            .phases()
            .map(|p| p.iter().map(|t| [t.num, t.den]).collect());
        doc
    }

    pub fn from_mubset(set: &MubSet) -> Self {
        let mut doc = Self::base(set.dim(), DocumentKind::Mubset);
        doc.payload = set
            .bases()
            .iter()
            .map(|b| pack_matrix(b.matrix()))
            .collect();
        doc.metadata.method = Some(set.method().name().to_string());
        doc.metadata.params = set.params().to_vec();
        doc.metadata.weights = set.weights().map(|w| w.to_vec());
        doc
    }

    pub fn from_solutions(sol: &VectorSolutionSet) -> Self {
        let mut doc = Self::base(sol.dim, DocumentKind::Solutionset);
        doc.payload = sol
            .vectors
            .iter()
            .map(|v| v.iter().map(|z| [z.re, z.im]).collect())
            .collect();
        doc.metadata.seed = Some(sol.seed);
        doc.metadata.label = Some(sol.label.clone());
        doc.report = serde_json::to_value(SolutionSummary::from(sol)).ok();
        doc
    }

    pub fn from_report<T: Serialize>(dim: usize, report: &T) -> Result<Self> {
        let mut doc = Self::base(dim, DocumentKind::Report);
        doc.report = Some(serde_json::to_value(report).map_err(|e| Error::Format(e.to_string()))?);
        Ok(doc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serializes")
    }

    /// Parses and validates version and payload shape.
    pub fn from_json(s: &str) -> Result<Self> {
        let doc: MatrixDocument =
            serde_json::from_str(s).map_err(|e| Error::Format(e.to_string()))?;
        doc.validate()?;
        Ok(doc)
    }

    pub fn validate(&self) -> Result<()> {
        if self.format_version != FORMAT_VERSION {
            return Err(Error::Version {
                found: self.format_version.clone(),
                expected: FORMAT_VERSION.to_string(),
            });
        }
        let d = self.dim;
        if d == 0 {
            return Err(Error::Format("dim must be positive".into()));
        }
        let block = match self.kind {
            DocumentKind::Matrix | DocumentKind::Mubset => d * d,
            DocumentKind::Solutionset => d,
            DocumentKind::Report => {
                return Ok(());
            }
        };
        if self.kind == DocumentKind::Matrix && self.payload.len() != 1 {
            return Err(Error::Format(
                "matrix documents carry exactly one block".into(),
            ));
        }
        for (i, b) in self.payload.iter().enumerate() {
            if b.len() != block {
                return Err(Error::Format(format!(
                    "payload block {i} has {} entries, expected {block}",
                    b.len()
                )));
            }
        }
        if let Some(p) = &self.phases {
            if p.len() != d * d || p.iter().any(|t| t[1] == 0) {
                return Err(Error::Format("phase table malformed".into()));
            }
        }
        Ok(())
    }

    fn expect(&self, kind: DocumentKind) -> Result<()> {
        if self.kind != kind {
            return Err(Error::Format(format!(
                "expected a {kind:?} document, found {:?}",
                self.kind
            )));
        }
        Ok(())
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        self.expect(DocumentKind::Matrix)?;
        Ok(unpack_matrix(&self.payload[0], self.dim))
    }

    pub fn to_hadamard(&self, tol: &ToleranceProfile) -> Result<HadamardMatrix> {
        let h = HadamardMatrix::new(self.to_matrix()?, tol)?;
        Ok(match &self.phases {
            Some(p) => h.with_phases(
                p.iter()
                    .map(|t| PhaseTag {
                        num: t[0],
                        den: t[1],
                    })
                    .collect(),
            ),
            None => h,
        })
    }

    pub fn to_mubset(&self, tol: &ToleranceProfile) -> Result<MubSet> {
        self.expect(DocumentKind::Mubset)?;
        let bases = self
            .payload
            .iter()
            .map(|b| OrthonormalBasis::new(unpack_matrix(b, self.dim), tol.eps_orth))
            .collect::<Result<Vec<_>>>()?;
        let method = self
            .metadata
            .method
            .as_deref()
            .and_then(Method::parse)
            .unwrap_or(Method::Imported);
        let set = MubSet::new(bases)?.with_method(method, self.metadata.params.clone());
        match &self.metadata.weights {
            Some(w) => set.with_weights(w.clone()),
            None => Ok(set),
        }
    }

    pub fn to_vectors(&self) -> Result<Vec<Vec<C64>>> {
        self.expect(DocumentKind::Solutionset)?;
        Ok(self
            .payload
            .iter()
            .map(|v| v.iter().map(|&[re, im]| c(re, im)).collect())
            .collect())
    }
}

/// Counters stored alongside a solution set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionSummary {
    pub count: usize,
    pub restarts: usize,
    pub converged: usize,
    pub max_residual: f64,
    pub coverage_warning: bool,
    pub continuum_suspected: bool,
}

impl From<&VectorSolutionSet> for SolutionSummary {
    fn from(s: &VectorSolutionSet) -> Self {
        SolutionSummary {
            count: s.len(),
            restarts: s.restarts,
            converged: s.converged,
            max_residual: s.residuals.iter().copied().fold(0.0, f64::max),
            coverage_warning: s.coverage_warning,
            continuum_suspected: s.continuum_suspected,
        }
    }
}
