//! QUBO encodings of MaxCut, maximum independent set and minimum vertex cover.
//!
//! Every encoding is a minimization: `H(x) = xᵀ Q x + offset` with `Q`
//! symmetric. Linear terms sit on the diagonal (`x_i² = x_i` on binaries) and
//! constant terms in `offset`, so `H` is exact on `{0,1}ⁿ`.
//!
//! On relaxed inputs the diagonal is read as linear coefficients,
//! `H(p) = Σ_i Q_ii p_i + 2 Σ_{i<j} Q_ij p_i p_j + offset`, which is the
//! multilinear extension of `H`: the expected Hamiltonian when each `x_i` is
//! an independent Bernoulli(`p_i`) draw.
//!
//! | problem | `H(x)`                                              |
//! |---------|-----------------------------------------------------|
//! | MaxCut  | `Σ_(ij) w_ij (2 x_i x_j − x_i − x_j)`               |
//! | MIS     | `−Σ_i x_i + P Σ_(ij) w_ij x_i x_j`                  |
//! | MVC     | `Σ_i x_i + P Σ_(ij) w_ij (1 − x_i)(1 − x_j)`        |

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::{self, Write as _};

use crate::graph::Graph;
use crate::{Error, Result};

/// Default constraint penalty for MIS and MVC.
pub const DEFAULT_PENALTY: f64 = 2.0;

/// Largest instance [`brute_force_optimum`] will enumerate.
pub const MAX_BRUTE_FORCE_NODES: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum ProblemKind {
    MaxCut,
    Mis,
    Mvc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

impl ProblemKind {
    pub const ALL: [ProblemKind; 3] = [ProblemKind::MaxCut, ProblemKind::Mis, ProblemKind::Mvc];

    pub fn sense(self) -> Sense {
        match self {
            ProblemKind::MaxCut | ProblemKind::Mis => Sense::Maximize,
            ProblemKind::Mvc => Sense::Minimize,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ProblemKind::MaxCut => "maxcut",
            ProblemKind::Mis => "mis",
            ProblemKind::Mvc => "mvc",
        }
    }

    /// Converts a minimized Hamiltonian value back into the problem's own sense.
    pub fn from_hamiltonian(self, h: f64) -> f64 {
        match self.sense() {
            Sense::Maximize => -h,
            Sense::Minimize => h,
        }
    }

    /// True when objective `a` is strictly better than `b`.
    pub fn improves(self, a: f64, b: f64) -> bool {
        match self.sense() {
            Sense::Maximize => a > b,
            Sense::Minimize => a < b,
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl core::str::FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "maxcut" => Ok(ProblemKind::MaxCut),
            "mis" => Ok(ProblemKind::Mis),
            "mvc" => Ok(ProblemKind::Mvc),
            other => Err(Error::InvalidParameters(alloc::format!("unknown problem `{other}`"))),
        }
    }
}

/// A 0/1 decision per node.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinaryAssignment(Vec<bool>);

impl BinaryAssignment {
    pub fn new(bits: Vec<bool>) -> Self {
        Self(bits)
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![false; n])
    }

    pub fn from_bits(bits: &[u8]) -> Self {
        Self(bits.iter().map(|&b| b != 0).collect())
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        self.0[i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, v: bool) {
        self.0[i] = v;
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        self.0[i] = !self.0[i];
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    pub fn to_reals(&self) -> Vec<f64> {
        self.0.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect()
    }

    /// Renders as a `0`/`1` string, node 0 first.
    pub fn to_bit_string(&self) -> String {
        self.0.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }
}

/// Symmetric QUBO matrix plus a constant offset.
#[derive(Debug, Clone, PartialEq)]
pub struct QuboMatrix {
    n: usize,
    diag: Vec<f64>,
    /// Off-diagonal entries `(i, j, Q_ij)` with `i < j`, sorted.
    upper: Vec<(usize, usize, f64)>,
    /// Both orientations of `upper`, row-indexed, for `Q x` products.
    row_ptr: Vec<usize>,
    row_entries: Vec<(usize, f64)>,
    offset: f64,
    penalty: f64,
}

impl QuboMatrix {
    /// Builds from canonical entries. Entries with `i > j` are mirrored into
    /// the upper triangle; repeated coordinates are summed.
    pub fn from_entries(
        n: usize,
        entries: impl IntoIterator<Item = (usize, usize, f64)>,
        offset: f64,
        penalty: f64,
    ) -> Result<Self> {
        let mut diag = vec![0.0; n];
        let mut upper: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (i, j, q) in entries {
            if i >= n || j >= n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: i.max(j) + 1,
                });
            }
            if i == j {
                diag[i] += q;
            } else {
                *upper.entry((i.min(j), i.max(j))).or_insert(0.0) += q;
            }
        }
        let upper: Vec<(usize, usize, f64)> = upper
            .into_iter()
            .filter(|&(_, q)| q != 0.0)
            .map(|((i, j), q)| (i, j, q))
            .collect();

        let mut counts = vec![0usize; n + 1];
        for &(i, j, _) in &upper {
            counts[i + 1] += 1;
            counts[j + 1] += 1;
        }
        for i in 0..n {
            counts[i + 1] += counts[i];
        }
        let mut fill = counts.clone();
        let mut row_entries = vec![(0usize, 0.0); 2 * upper.len()];
        for &(i, j, q) in &upper {
            row_entries[fill[i]] = (j, q);
            fill[i] += 1;
            row_entries[fill[j]] = (i, q);
            fill[j] += 1;
        }
        Ok(Self {
            n,
            diag,
            upper,
            row_ptr: counts,
            row_entries,
            offset,
            penalty,
        })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn penalty(&self) -> f64 {
        self.penalty
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    /// Off-diagonal upper-triangle entries `(i, j, Q_ij)`, `i < j`.
    pub fn upper(&self) -> &[(usize, usize, f64)] {
        &self.upper
    }

    /// `Q_ij` for any orientation.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return self.diag[i];
        }
        let (a, b) = (i.min(j), i.max(j));
        self.upper
            .binary_search_by(|&(u, v, _)| (u, v).cmp(&(a, b)))
            .map_or(0.0, |k| self.upper[k].2)
    }

    fn check_dim(&self, len: usize) -> Result<()> {
        if len != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: len,
            });
        }
        Ok(())
    }

    /// `Σ_i Q_ii x_i + 2 Σ_{i<j} Q_ij x_i x_j + offset`; equals `xᵀ Q x + offset`
    /// on binary vectors.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x.len())?;
        let mut h = 0.0;
        for (q, &xi) in self.diag.iter().zip(x) {
            h += q * xi;
        }
        for &(i, j, q) in &self.upper {
            h += 2.0 * q * x[i] * x[j];
        }
        Ok(h + self.offset)
    }

    /// Same as [`eval`](Self::eval) after casting the bits to reals.
    pub fn eval_binary(&self, x: &BinaryAssignment) -> Result<f64> {
        self.eval(&x.to_reals())
    }

    /// `∂H/∂x_i = Q_ii + 2 Σ_{j≠i} Q_ij x_j`.
    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x.len())?;
        Ok((0..self.n)
            .map(|i| {
                let off: f64 = self.row_entries[self.row_ptr[i]..self.row_ptr[i + 1]]
                    .iter()
                    .map(|&(j, q)| q * x[j])
                    .sum();
                self.diag[i] + 2.0 * off
            })
            .collect())
    }

    /// Coordinate-list text: a header `n offset`, then `i j coeff` lines for
    /// every nonzero `Q_ij` with `i ≤ j` (0-based). The Hamiltonian reads
    /// `Σ_i Q_ii x_i² + 2 Σ_{i<j} Q_ij x_i x_j + offset`.
    pub fn to_coo_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.n, self.offset);
        let mut k = 0;
        for i in 0..self.n {
            if self.diag[i] != 0.0 {
                let _ = writeln!(out, "{i} {i} {}", self.diag[i]);
            }
            while k < self.upper.len() && self.upper[k].0 == i {
                let (a, b, q) = self.upper[k];
                let _ = writeln!(out, "{a} {b} {q}");
                k += 1;
            }
        }
        out
    }

    /// Reads the format written by [`to_coo_text`](Self::to_coo_text).
    pub fn from_coo_text(text: &str) -> Result<Self> {
        let bad = |line: usize, message: &str| Error::Parse {
            line,
            message: message.into(),
        };
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or_else(|| bad(1, "missing header"))?;
        let mut h = header.split_whitespace();
        let n: usize = h
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| bad(1, "invalid dimension"))?;
        let offset: f64 = h
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| bad(1, "invalid offset"))?;
        let mut entries = Vec::new();
        for (idx, line) in lines {
            let t: Vec<&str> = line.split_whitespace().collect();
            let parsed = (t.len() == 3)
                .then(|| Some((t[0].parse().ok()?, t[1].parse().ok()?, t[2].parse().ok()?)))
                .flatten();
            entries.push(parsed.ok_or_else(|| bad(idx + 1, "expected `i j coeff`"))?);
        }
        Self::from_entries(n, entries, offset, 0.0)
    }
}

/// Encodes `kind` on `g`. Edge weights scale the edge terms, including the
/// MIS/MVC penalty terms; `penalty` is ignored for MaxCut.
pub fn build_qubo(kind: ProblemKind, g: &Graph, penalty: f64) -> Result<QuboMatrix> {
    let n = g.n();
    let mut entries: Vec<(usize, usize, f64)> = Vec::with_capacity(n + g.m());
    match kind {
        ProblemKind::MaxCut => {
            for e in g.edges() {
                entries.push((e.u, e.v, e.w));
                entries.push((e.u, e.u, -e.w));
                entries.push((e.v, e.v, -e.w));
            }
            QuboMatrix::from_entries(n, entries, 0.0, 0.0)
        }
        ProblemKind::Mis | ProblemKind::Mvc => {
            if !(penalty > 1.0 && penalty.is_finite()) {
                return Err(Error::InvalidPenalty(penalty));
            }
            let linear = if kind == ProblemKind::Mis { -1.0 } else { 1.0 };
            entries.extend((0..n).map(|i| (i, i, linear)));
            let mut offset = 0.0;
            for e in g.edges() {
                let pw = penalty * e.w;
                entries.push((e.u, e.v, pw / 2.0));
                if kind == ProblemKind::Mvc {
                    // P w (1 − x_u)(1 − x_v) = P w (1 − x_u − x_v + x_u x_v)
                    entries.push((e.u, e.u, -pw));
                    entries.push((e.v, e.v, -pw));
                    offset += pw;
                }
            }
            QuboMatrix::from_entries(n, entries, offset, penalty)
        }
    }
}

/// Convenience wrapper matching the free-function style of the other modules.
pub fn eval_hamiltonian(q: &QuboMatrix, x: &[f64]) -> Result<f64> {
    q.eval(x)
}

fn check_len(g: &Graph, x: &BinaryAssignment) -> Result<()> {
    if x.len() != g.n() {
        return Err(Error::DimensionMismatch {
            expected: g.n(),
            found: x.len(),
        });
    }
    Ok(())
}

/// Table objective, regardless of feasibility: cut weight for MaxCut, set
/// size for MIS and MVC.
pub fn objective(kind: ProblemKind, g: &Graph, x: &BinaryAssignment) -> Result<f64> {
    check_len(g, x)?;
    Ok(match kind {
        ProblemKind::MaxCut => g
            .edges()
            .iter()
            .filter(|e| x.get(e.u) != x.get(e.v))
            .map(|e| e.w)
            .sum(),
        ProblemKind::Mis | ProblemKind::Mvc => x.count_ones() as f64,
    })
}

pub fn is_feasible(kind: ProblemKind, g: &Graph, x: &BinaryAssignment) -> Result<bool> {
    check_len(g, x)?;
    Ok(match kind {
        ProblemKind::MaxCut => true,
        ProblemKind::Mis => g.edges().iter().all(|e| !(x.get(e.u) && x.get(e.v))),
        ProblemKind::Mvc => g.edges().iter().all(|e| x.get(e.u) || x.get(e.v)),
    })
}

/// Exhaustive optimum over all `2ⁿ` assignments. Ties go to the
/// lexicographically smallest bit string (node 0 most significant).
pub fn brute_force_optimum(kind: ProblemKind, g: &Graph) -> Result<(BinaryAssignment, f64)> {
    let n = g.n();
    if n > MAX_BRUTE_FORCE_NODES {
        return Err(Error::TooLarge {
            n,
            max: MAX_BRUTE_FORCE_NODES,
        });
    }
    // Node i lives at bit (n − 1 − i), so ascending masks are ascending
    // bit strings.
    let bit = |i: usize| 1u32 << (n - 1 - i);
    let nbr_mask: Vec<u32> = (0..n)
        .map(|v| g.neighbors(v).iter().fold(0, |m, &(u, _)| m | bit(u)))
        .collect();
    let independent = |mask: u32| (0..n).all(|v| mask & bit(v) == 0 || mask & nbr_mask[v] == 0);
    let full = if n == 0 { 0 } else { u32::MAX >> (32 - n) };

    let mut best: Option<(u32, f64)> = None;
    for mask in 0..=full {
        let value = match kind {
            ProblemKind::MaxCut => g
                .edges()
                .iter()
                .filter(|e| (mask & bit(e.u) == 0) != (mask & bit(e.v) == 0))
                .map(|e| e.w)
                .sum(),
            ProblemKind::Mis if independent(mask) => mask.count_ones() as f64,
            ProblemKind::Mvc if independent(!mask & full) => mask.count_ones() as f64,
            _ => continue,
        };
        if best.is_none_or(|(_, b)| kind.improves(value, b)) {
            best = Some((mask, value));
        }
    }
    // The empty set is feasible for MIS and everything is feasible for MVC
    // and MaxCut, so some assignment always qualifies.
    let (mask, value) = best.expect("at least one feasible assignment");
    let x = BinaryAssignment::new((0..n).map(|i| mask & bit(i) != 0).collect());
    Ok((x, value))
}
