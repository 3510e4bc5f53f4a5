//! Koszul modules `W(V, K)` and their Hilbert functions.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactalg::{rank, SubspaceBasis};
use crate::field::{Field, FieldTag};
use crate::multilinear::{binomial, d3_dual_matrix, delta1_matrix, delta2_on_k, delta3_tilde_matrix, Delta2Rows};
use crate::resonance::{is_strongly_isotropic, ResonanceComponent};

/// A subspace `K ⊆ ∧^2 V` with `dim V = n`.
#[derive(Clone, Debug, PartialEq)]
pub struct KoszulProblem<F: Field> {
    n: usize,
    k: SubspaceBasis<F>,
    kperp: SubspaceBasis<F>,
}

impl<F: Field> KoszulProblem<F> {
    pub fn new(n: usize, k: SubspaceBasis<F>) -> Result<Self> {
        if k.ambient_dim() != binomial(n, 2) {
            return Err(Error::AmbientMismatch(format!(
                "K lives in dimension {}, expected C({n}, 2) = {}",
                k.ambient_dim(),
                binomial(n, 2)
            )));
        }
        let kperp = k.annihilator();
        Ok(KoszulProblem { n, k, kperp })
    }

    /// The problem whose `K` is the annihilator of `kperp ⊆ ∧^2 V^∨`.
    pub fn from_kperp(n: usize, kperp: SubspaceBasis<F>) -> Result<Self> {
        let k = kperp.annihilator();
        let mut p = Self::new(n, k)?;
        p.kperp = kperp;
        Ok(p)
    }

    /// `K = 0`.
    pub fn free(field: F, n: usize) -> Self {
        Self::new(n, SubspaceBasis::zero(field, binomial(n, 2))).expect("ambient matches")
    }

    /// `K = ∧^2 V`.
    pub fn full(field: F, n: usize) -> Self {
        Self::new(n, SubspaceBasis::full(field, binomial(n, 2))).expect("ambient matches")
    }

    pub fn n(&self) -> usize {
        self.n
    }
    /// `dim K`.
    pub fn m(&self) -> usize {
        self.k.dim()
    }
    pub fn k(&self) -> &SubspaceBasis<F> {
        &self.k
    }
    pub fn kperp(&self) -> &SubspaceBasis<F> {
        &self.kperp
    }
    pub fn field(&self) -> &F {
        self.k.field()
    }
}

/// Coefficient in a problem file: a string such as `"-3/2"` or a bare integer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coefficient {
    Text(String),
    Integer(i64),
}

impl Coefficient {
    pub fn parse<F: Field>(&self, f: &F) -> Result<F::Elem> {
        match self {
            Coefficient::Text(s) => f.parse_elem(s),
            Coefficient::Integer(v) => Ok(f.from_i64(*v)),
        }
    }
}

/// On-disk form of a [`KoszulProblem`]: exactly one of `K_basis` and
/// `K_perp_basis`, with vectors in the lexicographic `∧^2` coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldTag>,
    #[serde(rename = "K_basis", default, skip_serializing_if = "Option::is_none")]
    pub k_basis: Option<Vec<Vec<Coefficient>>>,
    #[serde(rename = "K_perp_basis", default, skip_serializing_if = "Option::is_none")]
    pub k_perp_basis: Option<Vec<Vec<Coefficient>>>,
}

impl ProblemFile {
    pub fn from_json(text: &str) -> Result<Self> {
        let file: ProblemFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        match (&file.k_basis, &file.k_perp_basis) {
            (Some(_), None) | (None, Some(_)) => Ok(file),
            _ => Err(Error::Parse(
                "exactly one of `K_basis` and `K_perp_basis` must be present".into(),
            )),
        }
    }

    /// The field named in the file, or `fallback` when the file names none.
    pub fn field_or(&self, fallback: FieldTag) -> FieldTag {
        self.field.unwrap_or(fallback)
    }

    pub fn build<F: Field>(&self, field: F) -> Result<KoszulProblem<F>> {
        if self.n < 2 {
            return Err(Error::Invalid(format!("n = {} is too small", self.n)));
        }
        if let Some(tag) = self.field {
            if tag != field.tag() {
                return Err(Error::AmbientMismatch(format!(
                    "problem is over {tag}, requested {}",
                    field.tag()
                )));
            }
        }
        let ambient = binomial(self.n, 2);
        let parse = |rows: &Vec<Vec<Coefficient>>| -> Result<Vec<Vec<F::Elem>>> {
            rows.iter()
                .map(|row| row.iter().map(|c| c.parse(&field)).collect())
                .collect()
        };
        match (&self.k_basis, &self.k_perp_basis) {
            (Some(rows), None) => {
                let k = SubspaceBasis::span(field.clone(), ambient, parse(rows)?)?;
                KoszulProblem::new(self.n, k)
            }
            (None, Some(rows)) => {
                let kperp = SubspaceBasis::span(field.clone(), ambient, parse(rows)?)?;
                KoszulProblem::from_kperp(self.n, kperp)
            }
            _ => Err(Error::Parse(
                "exactly one of `K_basis` and `K_perp_basis` must be present".into(),
            )),
        }
    }

    pub fn from_problem<F: Field>(p: &KoszulProblem<F>) -> Self {
        let f = p.field();
        let rows = p
            .k()
            .basis()
            .iter()
            .map(|v| v.iter().map(|x| Coefficient::Text(f.to_scalar(x).to_string())).collect())
            .collect();
        ProblemFile {
            n: p.n(),
            field: Some(f.tag()),
            k_basis: Some(rows),
            k_perp_basis: None,
        }
    }
}

/// `dim W_q(V, 0) = (q+1) C(n+q, q+2)`.
pub fn dim_wq_free(n: usize, q: usize) -> usize {
    (q + 1) * binomial(n + q, q + 2)
}

/// `dim W_q(V, 0)` computed as `dim ker δ1` on `V ⊗ Sym^{q+1}`.
pub fn dim_wq_free_by_rank<F: Field>(field: F, n: usize, q: usize) -> usize {
    let d1 = delta1_matrix(field, n, q);
    d1.cols() - rank(&d1)
}

/// How `dim W_q` is computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    /// `dim W_q(V,0) − rank(δ2 on K ⊗ Sym^q)`.
    Cokernel,
    /// `dim ker D3` on `K^⊥ ⊗ Sym^q(V)^∨`.
    Dual,
    /// `dim coker δ̃3` on `(∧^2 V / K) ⊗ Sym^q`.
    Quotient,
}

impl Route {
    /// Smaller side of the matrix each route eliminates.
    pub fn size<F: Field>(self, p: &KoszulProblem<F>, q: usize) -> usize {
        let n = p.n();
        let s = |d: usize| binomial(n + d - 1, d);
        let m = p.m();
        match self {
            Route::Cokernel => (m * s(q)).min(n * s(q + 1) - s(q + 2)),
            Route::Dual | Route::Quotient => {
                let sources = (binomial(n, 2) - m) * s(q);
                if q == 0 {
                    0
                } else {
                    sources.min(binomial(n, 3) * s(q - 1))
                }
            }
        }
    }

    /// The cheaper of the cokernel and dual routes.
    pub fn cheapest<F: Field>(p: &KoszulProblem<F>, q: usize) -> Route {
        if Route::Dual.size(p, q) < Route::Cokernel.size(p, q) {
            Route::Dual
        } else {
            Route::Cokernel
        }
    }
}

/// `dim W_q(V, K)` by a chosen route.
pub fn dim_wq_by<F: Field>(p: &KoszulProblem<F>, q: usize, route: Route) -> Result<usize> {
    let n = p.n();
    match route {
        Route::Cokernel => {
            if p.m() == 0 {
                return Ok(dim_wq_free(n, q));
            }
            let d = delta2_on_k(n, q, p.k(), Delta2Rows::Reduced)?;
            Ok(dim_wq_free(n, q) - rank(&d))
        }
        Route::Dual => {
            let d = d3_dual_matrix(n, q, p.kperp())?;
            Ok(d.cols() - rank(&d))
        }
        Route::Quotient => {
            let d = delta3_tilde_matrix(n, q, p.k())?;
            Ok(d.rows() - rank(&d))
        }
    }
}

/// `dim W_q(V, K)` by the cheaper route; with `verify`, also by the other
/// route, failing with [`Error::RouteDisagreement`] if they differ.
pub fn dim_wq<F: Field>(p: &KoszulProblem<F>, q: usize, verify: bool) -> Result<usize> {
    let route = Route::cheapest(p, q);
    let value = dim_wq_by(p, q, route)?;
    if verify {
        let other = match route {
            Route::Cokernel => Route::Dual,
            _ => Route::Cokernel,
        };
        let check = dim_wq_by(p, q, other)?;
        if check != value {
            return Err(Error::RouteDisagreement(format!(
                "dim W_{q}: {value} by {route:?}, {check} by {other:?}"
            )));
        }
    }
    Ok(value)
}

/// Values of `dim W_q` over a contiguous range of degrees.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HilbertTable {
    pub n: usize,
    pub m: usize,
    pub field: FieldTag,
    pub values: BTreeMap<usize, usize>,
}

impl HilbertTable {
    pub fn get(&self, q: usize) -> Option<usize> {
        self.values.get(&q).copied()
    }
}

pub fn hilbert_range<F: Field>(
    p: &KoszulProblem<F>,
    qs: std::ops::RangeInclusive<usize>,
    verify: bool,
) -> Result<HilbertTable> {
    let values = qs
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|q| dim_wq(p, q, verify).map(|d| (q, d)))
        .collect::<Result<BTreeMap<_, _>>>()?;
    Ok(HilbertTable {
        n: p.n(),
        m: p.m(),
        field: p.field().tag(),
        values,
    })
}

/// `dim W_q` for `q = 0..=q_max`.
pub fn hilbert_function<F: Field>(p: &KoszulProblem<F>, q_max: usize, verify: bool) -> Result<HilbertTable> {
    hilbert_range(p, 0..=q_max, verify)
}

fn require_n3<F: Field>(p: &KoszulProblem<F>) -> Result<()> {
    if p.n() < 3 {
        return Err(Error::PreconditionViolated(format!("n = {} but n >= 3 is required", p.n())));
    }
    Ok(())
}

/// Whether the resonance is trivial, tested as `W_{n−3} = 0`.
pub fn resonance_trivial<F: Field>(p: &KoszulProblem<F>) -> Result<bool> {
    require_n3(p)?;
    Ok(dim_wq(p, p.n() - 3, false)? == 0)
}

/// Outcome of [`base_locus_length`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseLocus {
    /// `dim W_q = ℓ (q+1)` at `q = n−3` and `q = n−2`.
    Length(usize),
    /// The two samples are not of the form `ℓ (q+1)`.
    NotStabilized { d1: usize, d2: usize },
}

pub fn base_locus_length<F: Field>(p: &KoszulProblem<F>) -> Result<BaseLocus> {
    require_n3(p)?;
    let n = p.n();
    let d1 = dim_wq(p, n - 3, false)?;
    let d2 = dim_wq(p, n - 2, false)?;
    if d1 * (n - 1) == d2 * (n - 2) && d1 % (n - 2) == 0 {
        Ok(BaseLocus::Length(d1 / (n - 2)))
    } else {
        Ok(BaseLocus::NotStabilized { d1, d2 })
    }
}

pub fn catalan(k: usize) -> usize {
    binomial(2 * k, k) / (k + 1)
}

/// `Σ_t dim W_q(V̄_t, 0)` over components of the given dimensions.
pub fn component_sum(dims: impl IntoIterator<Item = usize>, q: usize) -> usize {
    dims.into_iter().map(|m| dim_wq_free(m, q)).sum()
}

/// Checks `dim W_q = Σ_t dim W_q(V̄_t, 0)` at `q = n−3, n−2, n−1`. Every
/// component must be strongly isotropic.
pub fn regularity_upper_check<F: Field>(p: &KoszulProblem<F>, components: &[ResonanceComponent<F>]) -> Result<bool> {
    require_n3(p)?;
    for c in components {
        if !is_strongly_isotropic(c, p.kperp())? {
            return Err(Error::PreconditionViolated(format!(
                "component `{}` is not strongly isotropic",
                c.label()
            )));
        }
    }
    let n = p.n();
    for q in n - 3..=n - 1 {
        let expected = component_sum(components.iter().map(|c| c.dim()), q);
        if dim_wq(p, q, false)? != expected {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};

    fn example_problem() -> KoszulProblem<Rationals> {
        let text = r#"{"n": 4, "field": "QQ", "K_perp_basis": [["1","0","0","0","0","0"], ["0","1","0","0","1","0"]]}"#;
        ProblemFile::from_json(text).unwrap().build(Rationals).unwrap()
    }

    #[test]
    fn closed_form_matches_rank() {
        let f = PrimeField::new(32003).unwrap();
        for n in 1..=5 {
            for q in 0..=3 {
                assert_eq!(dim_wq_free_by_rank(f, n, q), dim_wq_free(n, q), "n={n} q={q}");
            }
        }
        assert_eq!(dim_wq_free(2, 7), 8);
        assert_eq!(dim_wq_free(3, 0), 3);
    }

    #[test]
    fn double_point_hilbert_function() {
        let p = example_problem();
        assert_eq!(p.m(), 4);
        for q in 1..=3 {
            assert_eq!(dim_wq(&p, q, true).unwrap(), 2 * (q + 1));
        }
        assert_eq!(base_locus_length(&p).unwrap(), BaseLocus::Length(2));
        assert!(!resonance_trivial(&p).unwrap());
    }

    #[test]
    fn extreme_subspaces() {
        let f = PrimeField::new(32003).unwrap();
        let full = KoszulProblem::full(f, 5);
        for q in 0..=3 {
            assert_eq!(dim_wq(&full, q, true).unwrap(), 0);
        }
        assert!(resonance_trivial(&full).unwrap());
        assert_eq!(base_locus_length(&full).unwrap(), BaseLocus::Length(0));
        let free = KoszulProblem::free(f, 4);
        let table = hilbert_function(&free, 3, true).unwrap();
        assert!(table.values.iter().all(|(&q, &d)| d == dim_wq_free(4, q)));
    }

    #[test]
    fn all_routes_agree_on_small_problems() {
        let f = PrimeField::new(32003).unwrap();
        for (n, m, seed) in [(4, 2, 1), (5, 4, 2), (5, 7, 3), (6, 5, 4)] {
            let k = crate::exactalg::random_subspace(f, binomial(n, 2), m, seed).unwrap();
            let p = KoszulProblem::new(n, k).unwrap();
            for q in 0..=3 {
                let a = dim_wq_by(&p, q, Route::Cokernel).unwrap();
                assert_eq!(a, dim_wq_by(&p, q, Route::Dual).unwrap(), "n={n} m={m} q={q}");
                assert_eq!(a, dim_wq_by(&p, q, Route::Quotient).unwrap(), "n={n} m={m} q={q}");
            }
        }
    }

    #[test]
    fn problem_files() {
        assert!(ProblemFile::from_json(r#"{"n": 3}"#).is_err());
        assert!(ProblemFile::from_json(r#"{"n": 3, "K_basis": [], "K_perp_basis": []}"#).is_err());
        let file = ProblemFile::from_json(r#"{"n": 3, "K_basis": [[1, "1/2", 0]]}"#).unwrap();
        assert_eq!(file.build(Rationals).unwrap().m(), 1);
        let bad = ProblemFile::from_json(r#"{"n": 3, "K_basis": [[1, 0]]}"#).unwrap();
        assert!(matches!(bad.build(Rationals), Err(Error::AmbientMismatch(_))));
        let over_qq = ProblemFile::from_json(r#"{"n": 3, "field": "QQ", "K_basis": [[1, 0, 0]]}"#).unwrap();
        assert!(over_qq.build(PrimeField::new(7).unwrap()).is_err());
        let p = example_problem();
        let round = ProblemFile::from_problem(&p).build(Rationals).unwrap();
        assert_eq!(round.k(), p.k());
    }

    #[test]
    fn catalan_numbers() {
        assert_eq!(catalan(0), 1);
        assert_eq!(catalan(2), 2);
        assert_eq!(catalan(7), 429);
    }
}
