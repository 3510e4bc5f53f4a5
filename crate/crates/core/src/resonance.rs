//! Resonance diagnostics: membership, isotropy and separability of linear
//! subspaces of `V^∨` relative to `K^⊥ ⊆ ∧^2 V^∨`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactalg::{rank, Matrix, SubspaceBasis};
use crate::field::Field;
use crate::koszul::{component_sum, dim_wq, Coefficient, KoszulProblem};
use crate::multilinear::{binomial, wedge2};

/// A candidate linear component `V̄^∨ ⊆ V^∨` of the resonance, with cached flags.
#[derive(Clone, Debug, PartialEq)]
pub struct ResonanceComponent<F: Field> {
    label: String,
    subspace: SubspaceBasis<F>,
    pub isotropic: Option<bool>,
    pub separable: Option<bool>,
}

impl<F: Field> ResonanceComponent<F> {
    /// Fails unless `subspace` has dimension at least 2.
    pub fn new(label: impl Into<String>, subspace: SubspaceBasis<F>) -> Result<Self> {
        let label = label.into();
        if subspace.dim() < 2 {
            return Err(Error::Invalid(format!(
                "component `{label}` has dimension {}; components have dimension at least 2",
                subspace.dim()
            )));
        }
        Ok(ResonanceComponent {
            label,
            subspace,
            isotropic: None,
            separable: None,
        })
    }

    pub fn from_vectors(label: impl Into<String>, field: F, n: usize, vectors: Vec<Vec<F::Elem>>) -> Result<Self> {
        Self::new(label, SubspaceBasis::span(field, n, vectors)?)
    }

    pub fn label(&self) -> &str {
        &self.label
    }
    pub fn subspace(&self) -> &SubspaceBasis<F> {
        &self.subspace
    }
    pub fn dim(&self) -> usize {
        self.subspace.dim()
    }
    /// Dimension of the ambient `V^∨`.
    pub fn n(&self) -> usize {
        self.subspace.ambient_dim()
    }

    /// Evaluates and stores both flags.
    pub fn diagnose(&mut self, kperp: &SubspaceBasis<F>) -> Result<()> {
        self.isotropic = Some(is_isotropic(self, kperp)?);
        self.separable = Some(is_separable(self, kperp)?);
        Ok(())
    }

    pub fn to_file(&self) -> ComponentFile {
        let f = self.subspace.field();
        ComponentFile {
            label: self.label.clone(),
            basis: self
                .subspace
                .basis()
                .iter()
                .map(|v| v.iter().map(|x| Coefficient::Text(f.to_scalar(x).to_string())).collect())
                .collect(),
        }
    }
}

/// On-disk form of a component: `{"label": ..., "basis": [[...], ...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentFile {
    pub label: String,
    pub basis: Vec<Vec<Coefficient>>,
}

impl ComponentFile {
    pub fn build<F: Field>(&self, field: F, n: usize) -> Result<ResonanceComponent<F>> {
        let vectors = self
            .basis
            .iter()
            .map(|row| row.iter().map(|c| c.parse(&field)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        ResonanceComponent::from_vectors(self.label.clone(), field, n, vectors)
    }
}

fn check_kperp<F: Field>(n: usize, kperp: &SubspaceBasis<F>) -> Result<()> {
    if kperp.ambient_dim() != binomial(n, 2) {
        return Err(Error::AmbientMismatch(format!(
            "K^⊥ lives in dimension {}, but ∧^2 of a {n}-space has dimension {}",
            kperp.ambient_dim(),
            binomial(n, 2)
        )));
    }
    Ok(())
}

fn unit<F: Field>(f: &F, n: usize, i: usize) -> Vec<F::Elem> {
    let mut v = vec![f.zero(); n];
    v[i] = f.one();
    v
}

/// Whether `a` lies in the resonance: `a = 0`, or `a ∧ b ∈ K^⊥ ∖ {0}` for some `b`.
pub fn in_resonance<F: Field>(a: &[F::Elem], kperp: &SubspaceBasis<F>) -> Result<bool> {
    let n = a.len();
    check_kperp(n, kperp)?;
    let f = kperp.field();
    if a.iter().all(|x| f.is_zero(x)) {
        return Ok(true);
    }
    // b ↦ a ∧ b mod K^⊥; its kernel always contains a.
    let columns = (0..n)
        .map(|i| {
            kperp
                .quotient_coordinates(&wedge2(f, a, &unit(f, n, i)))
                .map(|v| v.into_iter().enumerate().filter(|(_, x)| !f.is_zero(x)).collect())
        })
        .collect::<Result<Vec<Vec<(usize, F::Elem)>>>>()?;
    let la = Matrix::from_columns(f.clone(), binomial(n, 2) - kperp.dim(), columns);
    Ok(n - rank(&la) >= 2)
}

/// `∧^2 V̄^∨`.
pub fn wedge_square<F: Field>(c: &ResonanceComponent<F>) -> SubspaceBasis<F> {
    let f = c.subspace.field();
    let basis = c.subspace.basis();
    let mut vectors = Vec::new();
    for i in 0..basis.len() {
        for j in i + 1..basis.len() {
            vectors.push(wedge2(f, &basis[i], &basis[j]));
        }
    }
    SubspaceBasis::span(f.clone(), binomial(c.n(), 2), vectors).expect("lengths match")
}

/// `V̄^∨ ∧ V^∨`.
pub fn wedge_with_ambient<F: Field>(c: &ResonanceComponent<F>) -> SubspaceBasis<F> {
    let f = c.subspace.field();
    let n = c.n();
    let vectors = c
        .subspace
        .basis()
        .iter()
        .flat_map(|u| (0..n).map(move |i| wedge2(f, u, &unit(f, n, i))))
        .collect();
    SubspaceBasis::span(f.clone(), binomial(n, 2), vectors).expect("lengths match")
}

/// `∧^2 V̄^∨ ⊆ K^⊥`.
pub fn is_isotropic<F: Field>(c: &ResonanceComponent<F>, kperp: &SubspaceBasis<F>) -> Result<bool> {
    check_kperp(c.n(), kperp)?;
    kperp.contains(&wedge_square(c))
}

/// `(V̄^∨ ∧ V^∨) ∩ K^⊥ ⊆ ∧^2 V̄^∨`.
pub fn is_separable<F: Field>(c: &ResonanceComponent<F>, kperp: &SubspaceBasis<F>) -> Result<bool> {
    check_kperp(c.n(), kperp)?;
    let meet = wedge_with_ambient(c).intersect(kperp)?;
    wedge_square(c).contains(&meet)
}

/// Isotropic and separable, cross-checked against `(V̄^∨ ∧ V^∨) ∩ K^⊥ = ∧^2 V̄^∨`.
pub fn is_strongly_isotropic<F: Field>(c: &ResonanceComponent<F>, kperp: &SubspaceBasis<F>) -> Result<bool> {
    let both = is_isotropic(c, kperp)? && is_separable(c, kperp)?;
    let equal = wedge_with_ambient(c).intersect(kperp)? == wedge_square(c);
    if both != equal {
        return Err(Error::RouteDisagreement(format!(
            "component `{}`: flags give {both}, intersection equality gives {equal}",
            c.label
        )));
    }
    Ok(both)
}

/// Separability through the projection `p_M: K → M`, where
/// `∧^2 V = L ⊕ M ⊕ H` is the splitting adapted to `V̄^∨`: in a basis
/// `f_1..f_n` of `V^∨` extending a basis of `V̄^∨`, `M` carries the
/// coordinates `⟨f_s ∧ f_t, ·⟩` with `f_s ∈ V̄^∨` and `f_t` outside it.
/// The component is separable iff `p_M` has rank `dim V̄ · (n − dim V̄)`.
pub fn separability_via_pm<F: Field>(c: &ResonanceComponent<F>, k: &SubspaceBasis<F>) -> Result<bool> {
    let n = c.n();
    check_kperp(n, k)?;
    let kperp = k.annihilator();
    if !is_isotropic(c, &kperp)? {
        return Err(Error::PreconditionViolated(format!(
            "component `{}` is not isotropic",
            c.label
        )));
    }
    let f = k.field();
    let inner = c.subspace.basis().to_vec();
    let outer: Vec<Vec<F::Elem>> = c.subspace.free_coordinates().into_iter().map(|i| unit(f, n, i)).collect();
    let target = inner.len() * outer.len();
    if target == 0 {
        return Ok(true);
    }
    let functionals: Vec<Vec<F::Elem>> = inner
        .iter()
        .flat_map(|s| outer.iter().map(move |t| wedge2(f, s, t)))
        .collect();
    let columns = k
        .basis()
        .iter()
        .map(|kv| {
            functionals
                .iter()
                .enumerate()
                .filter_map(|(r, phi)| {
                    let c = phi
                        .iter()
                        .zip(kv)
                        .fold(f.zero(), |acc, (x, y)| f.add(&acc, &f.mul(x, y)));
                    (!f.is_zero(&c)).then_some((r, c))
                })
                .collect()
        })
        .collect();
    let projection = Matrix::from_columns(f.clone(), target, columns);
    Ok(rank(&projection) == target)
}

/// Checks `dim W_q(V, K) = Σ_t dim W_q(V̄_t, 0)` for strongly isotropic components.
pub fn decomposition_check<F: Field>(
    p: &KoszulProblem<F>,
    components: &[ResonanceComponent<F>],
    q: usize,
) -> Result<bool> {
    let n = p.n();
    if n < 3 || q < n - 3 {
        return Err(Error::PreconditionViolated(format!("q = {q} is below n − 3 for n = {n}")));
    }
    for c in components {
        if !is_strongly_isotropic(c, p.kperp())? {
            return Err(Error::PreconditionViolated(format!(
                "component `{}` is not strongly isotropic",
                c.label
            )));
        }
    }
    Ok(dim_wq(p, q, false)? == component_sum(components.iter().map(|c| c.dim()), q))
}
