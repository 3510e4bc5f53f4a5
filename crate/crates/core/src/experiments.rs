//! Seeded generic-vanishing trials and the Kronecker pencil witness.

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactalg::{random_subspace, rank, SubspaceBasis, PRNG_NAME};
use crate::field::{Field, PrimeField, DEFAULT_PRIME};
use crate::koszul::{dim_wq, KoszulProblem};
use crate::multilinear::{binomial, d3_dual_matrix, pair_index, MonomialBasis};

/// The two `(m, q)` with `dim K ⊗ Sym^q = dim W_q(V, 0)`:
/// `(2n−3, n−3)` and `(2n−2, n−4)`.
pub fn balanced_cases(n: usize) -> Result<Vec<(usize, usize)>> {
    if n < 4 {
        return Err(Error::PreconditionViolated(format!("n = {n} but n >= 4 is required")));
    }
    let cases = vec![(2 * n - 3, n - 3), (2 * n - 2, n - 4)];
    for &(m, q) in &cases {
        let source = m * binomial(n + q - 1, q);
        let target = n * binomial(n + q, q + 1) - binomial(n + q + 1, q + 2);
        if source != target {
            return Err(Error::RouteDisagreement(format!(
                "(m, q) = ({m}, {q}) at n = {n}: {source} != {target}"
            )));
        }
    }
    Ok(cases)
}

/// Parameters of one trial.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TrialSpec {
    pub n: usize,
    pub m: usize,
    pub q: usize,
    pub prime: u32,
    pub seed: u64,
}

impl TrialSpec {
    /// `m = 2n−2`, `q = n−4` over `GF(32003)`.
    pub fn generic(n: usize, seed: u64) -> Self {
        TrialSpec {
            n,
            m: 2 * n - 2,
            q: n.saturating_sub(4),
            prime: DEFAULT_PRIME,
            seed,
        }
    }
}

/// One line of a sweep's JSON-lines output.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialReport {
    pub n: usize,
    pub m: usize,
    pub q: usize,
    pub prime: u32,
    pub seed: u64,
    pub dim: usize,
    pub ms: u64,
    pub prng: String,
}

impl TrialReport {
    pub fn spec(&self) -> TrialSpec {
        TrialSpec {
            n: self.n,
            m: self.m,
            q: self.q,
            prime: self.prime,
            seed: self.seed,
        }
    }

    /// The report with its wall time cleared, for reproducibility comparisons.
    pub fn without_timing(&self) -> Self {
        TrialReport { ms: 0, ..self.clone() }
    }
}

/// Samples `K` of dimension `m` in `∧^2 V` over `GF(prime)` and computes `dim W_q`.
pub fn run_trial(spec: TrialSpec) -> Result<TrialReport> {
    let f = PrimeField::new(spec.prime)?;
    if spec.m > binomial(spec.n, 2) {
        return Err(Error::Invalid(format!(
            "m = {} exceeds dim ∧^2 V = {}",
            spec.m,
            binomial(spec.n, 2)
        )));
    }
    let start = Instant::now();
    let k = random_subspace(f, binomial(spec.n, 2), spec.m, spec.seed)?;
    let p = KoszulProblem::new(spec.n, k)?;
    let dim = dim_wq(&p, spec.q, false)?;
    Ok(TrialReport {
        n: spec.n,
        m: spec.m,
        q: spec.q,
        prime: spec.prime,
        seed: spec.seed,
        dim,
        ms: start.elapsed().as_millis() as u64,
        prng: PRNG_NAME.to_string(),
    })
}

/// `dim W_{n−4}` for a random `(2n−2)`-dimensional `K` over `GF(32003)`.
pub fn generic_vanishing_trial(n: usize, seed: u64) -> Result<TrialReport> {
    if n < 5 {
        return Err(Error::PreconditionViolated(format!("n = {n} but n >= 5 is required")));
    }
    run_trial(TrialSpec::generic(n, seed))
}

/// Runs trials on up to `jobs` threads. `sink` sees each report as it
/// finishes; the returned list is sorted by `(n, seed)` and then the remaining fields.
pub fn run_trials<S>(specs: &[TrialSpec], jobs: usize, sink: S) -> Result<Vec<TrialReport>>
where
    S: Fn(&TrialReport) + Sync,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Invalid(e.to_string()))?;
    let mut reports = pool.install(|| {
        specs
            .par_iter()
            .map(|&s| {
                let r = run_trial(s)?;
                sink(&r);
                Ok(r)
            })
            .collect::<Result<Vec<_>>>()
    })?;
    reports.sort_by_key(|r| (r.n, r.seed, r.m, r.q, r.prime));
    Ok(reports)
}

/// Per-`n` aggregate of a sweep.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub n: usize,
    pub trials: usize,
    pub min: usize,
    pub max: usize,
    /// Most frequent dimension; ties go to the smaller value.
    pub mode: usize,
}

pub fn summarize(reports: &[TrialReport]) -> Vec<SweepSummary> {
    let mut by_n: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for r in reports {
        by_n.entry(r.n).or_default().push(r.dim);
    }
    by_n.into_iter()
        .map(|(n, dims)| {
            let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
            for &d in &dims {
                *counts.entry(d).or_default() += 1;
            }
            let best = counts.values().copied().max().unwrap_or(0);
            SweepSummary {
                n,
                trials: dims.len(),
                min: dims.iter().copied().min().unwrap_or(0),
                max: dims.iter().copied().max().unwrap_or(0),
                mode: counts.iter().find(|(_, &c)| c == best).map_or(0, |(&d, _)| d),
            }
        })
        .collect()
}

/// Sweep parameters; `None` overrides mean `m = 2n−2`, `q = n−4`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sweep {
    pub ns: Vec<usize>,
    pub seeds: Vec<u64>,
    pub q: Option<usize>,
    pub m: Option<usize>,
    pub prime: u32,
}

impl Sweep {
    /// Seeds `1..=seeds_per_n` for every `n`.
    pub fn new(ns: Vec<usize>, seeds_per_n: u64) -> Self {
        Sweep {
            ns,
            seeds: (1..=seeds_per_n).collect(),
            q: None,
            m: None,
            prime: DEFAULT_PRIME,
        }
    }

    pub fn specs(&self) -> Result<Vec<TrialSpec>> {
        let mut out = Vec::new();
        for &n in &self.ns {
            if n < 5 {
                return Err(Error::PreconditionViolated(format!("n = {n} but n >= 5 is required")));
            }
            for &seed in &self.seeds {
                let base = TrialSpec::generic(n, seed);
                out.push(TrialSpec {
                    m: self.m.unwrap_or(base.m),
                    q: self.q.unwrap_or(base.q),
                    prime: self.prime,
                    ..base
                });
            }
        }
        Ok(out)
    }
}

pub fn sweep(s: &Sweep, jobs: usize) -> Result<Vec<TrialReport>> {
    run_trials(&s.specs()?, jobs, |_| {})
}

/// Outcome of [`kronecker_witness_check`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessReport {
    /// `D3(P ⊗ x_1 + Q ⊗ x_2) = 0`.
    pub witness_in_kernel: bool,
    pub kernel_dim: usize,
    /// `dim W_1` of the 8-dimensional `K = {P, Q}^⊥`, by the cokernel route.
    pub dim_w1: usize,
}

impl WitnessReport {
    pub fn passed(&self) -> bool {
        self.witness_in_kernel && self.kernel_dim >= 1 && self.dim_w1 >= 1
    }
}

/// For `n = 5`, `P = e_1∧e_3 + e_2∧e_4` and `Q = e_1∧e_4 + e_2∧e_5`, checks
/// that `P ⊗ e_1 + Q ⊗ e_2` is a syzygy of `D3` at `q = 1`.
pub fn kronecker_witness_check() -> Result<WitnessReport> {
    let f = PrimeField::new(DEFAULT_PRIME)?;
    let n = 5;
    let pair = |terms: &[(usize, usize)]| {
        let mut v = vec![f.zero(); binomial(n, 2)];
        for &(i, j) in terms {
            v[pair_index(n, i - 1, j - 1)] = f.one();
        }
        v
    };
    let p = pair(&[(1, 3), (2, 4)]);
    let q = pair(&[(1, 4), (2, 5)]);
    let kperp = SubspaceBasis::span(f, binomial(n, 2), vec![p.clone(), q.clone()])?;
    let d3 = d3_dual_matrix(n, 1, &kperp)?;

    let linear = MonomialBasis::new(n, 1);
    let mut witness = vec![f.zero(); d3.cols()];
    for (form, var) in [(&p, 0), (&q, 1)] {
        let coords = kperp.coordinates(form)?.expect("P and Q span K^⊥");
        let mut exps = vec![0u8; n];
        exps[var] = 1;
        let g = linear.index_of(&exps).expect("linear monomial");
        for (t, c) in coords.iter().enumerate() {
            witness[t * linear.len() + g] = f.add(&witness[t * linear.len() + g], c);
        }
    }
    let image = d3.apply(&witness)?;
    let problem = KoszulProblem::from_kperp(n, kperp)?;
    Ok(WitnessReport {
        witness_in_kernel: image.iter().all(|x| f.is_zero(x)),
        kernel_dim: d3.cols() - rank(&d3),
        dim_w1: crate::koszul::dim_wq_by(&problem, 1, crate::koszul::Route::Cokernel)?,
    })
}
