//! Closed-form Hausdorff dimensions of the range and graph over `[0,1]^d`.
//!
//! Everything here is written over an ordered field so the same code runs in
//! floating point and in exact rational arithmetic.

use serde::Serialize;

use crate::scalar::OrderedField;

/// Spectral data entering the dimension formulas: groups `(a_k, dim W_k)`
/// with `a_1 < … < a_p`, and `λ_1 ≤ … ≤ λ_m` with multiplicity.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralProfile<F> {
    pub a: Vec<(F, usize)>,
    pub lambda: Vec<F>,
}

/// The `a`-groups in reverse order: `ã_j = a_{p+1−j}`, so `ã_1 > … > ã_p`.
#[derive(Debug, Clone, PartialEq)]
pub struct TildeView<F> {
    pub a_tilde: Vec<F>,
    pub dims_tilde: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CandidateKind {
    /// `(q + Σ_{i≤j}(λ_j − λ_i)) / λ_j`.
    Range,
    /// `Σ_{j≤l} (ã_j/ã_l) dim W̃_j + Σ_{j>l} dim W̃_j + Σ_i (1 − λ_i/ã_l)`.
    Graph,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Candidate<F> {
    pub kind: CandidateKind,
    /// 1-based `j` or `l`.
    pub index: usize,
    pub value: F,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RangeCase {
    /// `Σλ < q`: the range has full dimension `m`.
    Full,
    /// `Σ_{i<l} λ_i < q ≤ Σ_{i≤l} λ_i`.
    Index(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphCase {
    /// `q ≤ Σλ`: graph and range dimensions coincide.
    RangeDominated,
    /// `Σ_{j<k} ã_j dim W̃_j ≤ Σλ < Σ_{j≤k} ã_j dim W̃_j`.
    Index(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimensionReport<F> {
    pub range_dim: F,
    pub graph_dim: F,
    pub range_case: RangeCase,
    pub graph_case: GraphCase,
    pub formula_trace: Vec<Candidate<F>>,
}

fn count<F: OrderedField>(n: usize) -> F {
    F::from_count(n)
}

fn min_of<F: OrderedField>(values: impl IntoIterator<Item = F>) -> F {
    let mut it = values.into_iter();
    let first = it.next().expect("non-empty candidate list");
    it.fold(first, |m, v| if v < m { v } else { m })
}

impl<F: OrderedField> SpectralProfile<F> {
    pub fn new(a: Vec<(F, usize)>, lambda: Vec<F>) -> Self {
        SpectralProfile { a, lambda }
    }

    pub fn m(&self) -> usize {
        self.lambda.len()
    }

    pub fn d(&self) -> usize {
        self.a.iter().map(|g| g.1).sum()
    }

    /// `q = Σ_k a_k dim W_k`.
    pub fn q(&self) -> F {
        self.a
            .iter()
            .fold(F::zero(), |s, (a, k)| s + a.clone() * count::<F>(*k))
    }

    pub fn lambda_sum(&self) -> F {
        self.lambda.iter().fold(F::zero(), |s, l| s + l.clone())
    }

    pub fn tilde(&self) -> TildeView<F> {
        TildeView {
            a_tilde: self.a.iter().rev().map(|g| g.0.clone()).collect(),
            dims_tilde: self.a.iter().rev().map(|g| g.1).collect(),
        }
    }

    /// The same profile with every exponent divided by `h`.
    pub fn rescaled(&self, h: F) -> Self {
        SpectralProfile {
            a: self
                .a
                .iter()
                .map(|(a, k)| (a.clone() / h.clone(), *k))
                .collect(),
            lambda: self.lambda.iter().map(|l| l.clone() / h.clone()).collect(),
        }
    }

    fn range_candidate(&self, j: usize) -> F {
        let lj = self.lambda[j - 1].clone();
        let spread = self.lambda[..j]
            .iter()
            .fold(F::zero(), |s, li| s + (lj.clone() - li.clone()));
        (self.q() + spread) / lj
    }

    fn graph_candidate(&self, tilde: &TildeView<F>, l: usize) -> F {
        let al = tilde.a_tilde[l - 1].clone();
        let mut v = F::zero();
        for j in 0..l {
            v = v + tilde.a_tilde[j].clone() / al.clone() * count::<F>(tilde.dims_tilde[j]);
        }
        for j in l..tilde.a_tilde.len() {
            v = v + count::<F>(tilde.dims_tilde[j]);
        }
        for li in &self.lambda {
            v = v + (F::one() - li.clone() / al.clone());
        }
        v
    }

    /// All `m` range candidates followed by all `p` graph candidates.
    pub fn candidates(&self) -> Vec<Candidate<F>> {
        let tilde = self.tilde();
        let mut out: Vec<Candidate<F>> = (1..=self.m())
            .map(|j| Candidate {
                kind: CandidateKind::Range,
                index: j,
                value: self.range_candidate(j),
            })
            .collect();
        out.extend((1..=tilde.a_tilde.len()).map(|l| Candidate {
            kind: CandidateKind::Graph,
            index: l,
            value: self.graph_candidate(&tilde, l),
        }));
        out
    }

    /// `min{m, range candidates}`.
    pub fn dim_range(&self) -> F {
        let m = count::<F>(self.m());
        let c = min_of((1..=self.m()).map(|j| self.range_candidate(j)));
        if c < m {
            c
        } else {
            m
        }
    }

    /// Dimensions by direct minimization over every candidate.
    pub fn min_form(&self) -> DimensionReport<F> {
        let trace = self.candidates();
        let graph_dim = min_of(trace.iter().map(|c| c.value.clone()));
        let case = self.case_form();
        DimensionReport {
            range_dim: self.dim_range(),
            graph_dim,
            range_case: case.range_case,
            graph_case: case.graph_case,
            formula_trace: trace,
        }
    }

    /// Dimensions by selecting the active case, without any minimization.
    pub fn case_form(&self) -> DimensionReport<F> {
        let q = self.q();
        let m = self.m();
        let total = self.lambda_sum();

        let (range_dim, range_case) = if total < q {
            (count::<F>(m), RangeCase::Full)
        } else {
            let mut partial = F::zero();
            let mut found = None;
            for l in 1..=m {
                let next = partial.clone() + self.lambda[l - 1].clone();
                if partial < q && q <= next {
                    found = Some(l);
                    break;
                }
                partial = next;
            }
            let l = found.expect("cases are exhaustive when q ≤ Σλ");
            (self.range_candidate(l), RangeCase::Index(l))
        };

        let tilde = self.tilde();
        let (graph_dim, graph_case) = if q <= total {
            (range_dim.clone(), GraphCase::RangeDominated)
        } else {
            let mut partial = F::zero();
            let mut found = None;
            for k in 1..=tilde.a_tilde.len() {
                let next =
                    partial.clone() + tilde.a_tilde[k - 1].clone() * count::<F>(tilde.dims_tilde[k - 1]);
                if partial <= total && total < next {
                    found = Some(k);
                    break;
                }
                partial = next;
            }
            let k = found.expect("cases are exhaustive when Σλ < q");
            (self.graph_candidate(&tilde, k), GraphCase::Index(k))
        };

        DimensionReport {
            range_dim,
            graph_dim,
            range_case,
            graph_case,
            formula_trace: self.candidates(),
        }
    }

    /// The half-open interval the active case places the dimension in:
    /// `(l−1, l]` for the range, `(m + Σ_{j>k} dim W̃_j, m + Σ_{j≥k} dim W̃_j]`
    /// for the graph. `None` when the case carries no interval.
    pub fn case_intervals(&self, report: &DimensionReport<F>) -> (Option<(F, F)>, Option<(F, F)>) {
        let range = match report.range_case {
            RangeCase::Index(l) => Some((count::<F>(l - 1), count::<F>(l))),
            RangeCase::Full => None,
        };
        let graph = match report.graph_case {
            GraphCase::Index(k) => {
                let dims = self.tilde().dims_tilde;
                let after: usize = dims[k..].iter().sum();
                let m = self.m();
                Some((count::<F>(m + after), count::<F>(m + after + dims[k - 1])))
            }
            GraphCase::RangeDominated => None,
        };
        (range, graph)
    }
}

/// Whether `v` lies in `(lo, hi]` up to `tol`.
pub fn in_half_open<F: OrderedField>(v: &F, lo: &F, hi: &F, tol: &F) -> bool {
    v.clone() > lo.clone() - tol.clone() && v.clone() <= hi.clone() + tol.clone()
}
