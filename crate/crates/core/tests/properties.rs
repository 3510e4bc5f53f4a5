use koszul::arrangements::*;
use koszul::exactalg::{kernel_basis, rank, random_subspace, Matrix, SubspaceBasis};
use koszul::experiments::{run_trial, summarize, TrialSpec};
use koszul::field::{Field, PrimeField, Rationals};
use koszul::koszul::*;
use koszul::multilinear::*;
use koszul::resonance::*;
use num_rational::BigRational;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn gf() -> PrimeField {
    PrimeField::new(32003).unwrap()
}

fn int_matrix<F: Field>(f: F, rows: usize, cols: usize, data: &[i64]) -> Matrix<F> {
    let dense: Vec<Vec<F::Elem>> = data.chunks(cols).map(|r| r.iter().map(|&x| f.from_i64(x)).collect()).collect();
    let m = Matrix::from_dense(f.clone(), &dense).unwrap();
    if rows == 0 {
        Matrix::zero(f, 0, cols)
    } else {
        m
    }
}

fn small_matrix() -> impl Strategy<Value = (usize, usize, Vec<i64>)> {
    (1usize..8, 1usize..8).prop_flat_map(|(r, c)| {
        (Just(r), Just(c), prop::collection::vec(prop_oneof![3 => Just(0i64), 2 => -3i64..=3], r * c))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rank_plus_nullity((r, c, data) in small_matrix()) {
        for_both_fields(r, c, &data);
    }

    #[test]
    fn prime_rank_never_exceeds_rational_rank((r, c, data) in small_matrix()) {
        let over_q = rank(&int_matrix(Rationals, r, c, &data));
        for p in [3, 5, 32003] {
            prop_assert!(rank(&int_matrix(PrimeField::new(p).unwrap(), r, c, &data)) <= over_q);
        }
    }

    #[test]
    fn modular_law(ambient in prop::sample::select(vec![6usize, 10, 15]), a in 0usize..16, b in 0usize..16, seed in any::<u64>(), p in prop::sample::select(vec![3u32, 32003])) {
        let f = PrimeField::new(p).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut sample = |d: usize| {
            let vs = (0..d.min(ambient)).map(|_| (0..ambient).map(|_| f.random(&mut rng)).collect()).collect();
            SubspaceBasis::span(f, ambient, vs).unwrap()
        };
        let (x, y) = (sample(a), sample(b));
        let meet = x.intersect(&y).unwrap();
        let join = x.sum(&y).unwrap();
        prop_assert_eq!(x.dim() + y.dim(), meet.dim() + join.dim());
        prop_assert!(x.contains(&meet).unwrap() && y.contains(&meet).unwrap());
        prop_assert!(join.contains(&x).unwrap() && join.contains(&y).unwrap());
    }

    #[test]
    fn echelon_form_is_canonical(seed in any::<u64>(), d in 0usize..6) {
        let f = gf();
        let s = random_subspace(f, 8, d, seed).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        // Random invertible recombination: unitriangular times a diagonal.
        let rows = s.basis();
        let mixed: Vec<Vec<u32>> = (0..rows.len()).map(|i| {
            let scale = f.random(&mut rng).max(1);
            let mut v: Vec<u32> = rows[i].iter().map(|x| f.mul(x, &scale)).collect();
            for row in &rows[i + 1..] {
                let c = f.random(&mut rng);
                for (x, y) in v.iter_mut().zip(row) {
                    *x = f.add(x, &f.mul(&c, y));
                }
            }
            v
        }).collect();
        prop_assert_eq!(SubspaceBasis::span(f, 8, mixed).unwrap(), s);
    }

    #[test]
    fn two_routes_agree(n in 3usize..=6, frac in 0.0f64..=1.0, q in 0usize..=3, seed in any::<u64>()) {
        let m = ((binomial(n, 2) as f64) * frac).round() as usize;
        let k = random_subspace(gf(), binomial(n, 2), m, seed).unwrap();
        let p = KoszulProblem::new(n, k).unwrap();
        let a = dim_wq_by(&p, q, Route::Cokernel).unwrap();
        prop_assert_eq!(a, dim_wq_by(&p, q, Route::Dual).unwrap());
        prop_assert_eq!(a, dim_wq_by(&p, q, Route::Quotient).unwrap());
    }

    #[test]
    fn resonance_membership_is_scale_invariant(seed in any::<u64>(), scale in 1i64..1000) {
        let f = gf();
        let k4 = graphic_arrangement(&Graph::complete(4)).unwrap();
        let p = os_problem(f, &k4);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let comps = graphic_components(f, &Graph::complete(4));
        let c = &comps[rng.random_range(0..comps.len())];
        let inside = random_combination(f, c.subspace(), &mut rng);
        let outside: Vec<u32> = (0..6).map(|_| f.random(&mut rng)).collect();
        let s = f.from_i64(scale);
        for a in [inside, outside] {
            let scaled: Vec<u32> = a.iter().map(|x| f.mul(x, &s)).collect();
            prop_assert_eq!(in_resonance(&a, p.kperp()).unwrap(), in_resonance(&scaled, p.kperp()).unwrap());
        }
    }

    #[test]
    fn lattice_and_orlik_solomon_identities(normals in prop::collection::vec(prop::collection::vec(-2i64..=2, 3), 1..8)) {
        let q = Rationals;
        let mut kept: Vec<Vec<BigRational>> = Vec::new();
        for v in normals {
            let v: Vec<BigRational> = v.iter().map(|&x| q.from_i64(x)).collect();
            if v.iter().all(|x| q.is_zero(x)) {
                continue;
            }
            let proportional = kept.iter().any(|w| {
                SubspaceBasis::span(q, 3, vec![w.clone(), v.clone()]).unwrap().dim() < 2
            });
            if !proportional {
                kept.push(v);
            }
        }
        prop_assume!(!kept.is_empty());
        let a = Arrangement::new(3, kept, None).unwrap();
        let n = a.len();
        let flats = l2_flats(&a);
        prop_assert_eq!(flats.iter().map(|x| binomial(x.size(), 2)).sum::<usize>(), binomial(n, 2));
        let kperp = os_kperp(gf(), &a, &flats);
        let k = os_k(gf(), &a, &flats);
        prop_assert_eq!(kperp.dim(), flats.iter().map(|x| binomial(x.size() - 1, 2)).sum::<usize>());
        prop_assert_eq!(k.dim(), flats.iter().map(|x| x.size() - 1).sum::<usize>());
        prop_assert_eq!(kperp.annihilator(), k.clone());
        prop_assert_eq!(k.annihilator(), kperp);
    }
}

fn for_both_fields(r: usize, c: usize, data: &[i64]) {
    let mq = int_matrix(Rationals, r, c, data);
    assert_eq!(rank(&mq) + kernel_basis(&mq).dim(), c);
    let mp = int_matrix(gf(), r, c, data);
    assert_eq!(rank(&mp) + kernel_basis(&mp).dim(), c);
    assert!(rank(&mp) <= r.min(c));
}

fn random_combination<R: Rng>(f: PrimeField, s: &SubspaceBasis<PrimeField>, rng: &mut R) -> Vec<u32> {
    let mut v = vec![0u32; s.ambient_dim()];
    for row in s.basis() {
        let c = f.random(rng);
        for (x, y) in v.iter_mut().zip(row) {
            *x = f.add(x, &f.mul(&c, y));
        }
    }
    v
}

#[test]
fn koszul_composites_vanish_on_the_grid() {
    let f = gf();
    for n in 1..=6 {
        for q in 0..=5 {
            assert!(delta1_matrix(f, n, q).mul(&delta2_matrix(f, n, q)).unwrap().is_zero(), "n={n} q={q}");
        }
    }
}

#[test]
fn bases_index_bijectively() {
    for n in 1..=6 {
        for q in 0..=5 {
            let b = sym_basis(n, q);
            assert_eq!(b.len(), binomial(n + q - 1, q));
            for (i, e) in b.iter().enumerate() {
                assert_eq!(b.index_of(e), Some(i));
            }
        }
        for d in 2..=3 {
            let e = ExteriorBasis::new(n, d);
            assert_eq!(e.len(), binomial(n, d));
            for (i, t) in e.entries().iter().enumerate() {
                assert_eq!(e.index_of(t), Some(i));
            }
        }
    }
}

#[test]
fn full_k_kills_every_degree() {
    for n in 2..=6 {
        let p = KoszulProblem::full(gf(), n);
        for q in 0..=4 {
            assert_eq!(dim_wq(&p, q, true).unwrap(), 0, "n={n} q={q}");
        }
    }
}

#[test]
fn free_module_consistency() {
    for n in 2..=8 {
        let p = KoszulProblem::free(gf(), n);
        for q in 0..=4 {
            assert_eq!(dim_wq_by(&p, q, Route::Dual).unwrap(), dim_wq_free(n, q), "n={n} q={q}");
        }
    }
}

#[test]
fn shifted_free_chen_ranks() {
    for m in 2..=6 {
        for q in 0..=6 {
            assert_eq!(chen_free(m, q + 2).unwrap(), dim_wq_free(m, q));
        }
    }
}

#[test]
fn dimensions_decrease_along_nested_chains() {
    let f = gf();
    for (n, seed) in [(4, 21), (5, 22), (6, 23)] {
        let basis = random_subspace(f, binomial(n, 2), binomial(n, 2), seed).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let vectors: Vec<Vec<u32>> = (0..binomial(n, 2))
            .map(|_| random_combination(f, &basis, &mut rng))
            .collect();
        let mut previous: Option<Vec<usize>> = None;
        for m in 0..=vectors.len() {
            let k = SubspaceBasis::span(f, binomial(n, 2), vectors[..m].to_vec()).unwrap();
            let p = KoszulProblem::new(n, k).unwrap();
            let dims: Vec<usize> = (0..=3).map(|q| dim_wq(&p, q, false).unwrap()).collect();
            if let Some(prev) = &previous {
                assert!(dims.iter().zip(prev).all(|(d, e)| d <= e), "n={n} m={m}: {dims:?} > {prev:?}");
            }
            previous = Some(dims);
        }
    }
}

#[test]
fn stabilized_base_locus_predicts_the_next_degree() {
    let f = gf();
    let mut problems = vec![KoszulProblem::full(f, 5)];
    for (n, seed) in [(4, 1), (5, 2), (5, 3), (6, 4)] {
        let k = random_subspace(f, binomial(n, 2), 2 * n - 4, seed).unwrap();
        problems.push(KoszulProblem::new(n, k).unwrap());
    }
    let text = r#"{"n": 4, "K_perp_basis": [[1,0,0,0,0,0], [0,1,0,0,1,0]]}"#;
    problems.push(ProblemFile::from_json(text).unwrap().build(f).unwrap());
    let mut lengths = Vec::new();
    for p in &problems {
        if let BaseLocus::Length(l) = base_locus_length(p).unwrap() {
            assert_eq!(dim_wq(p, p.n() - 1, false).unwrap(), l * p.n());
            lengths.push((p.n(), p.m(), l));
        }
    }
    // Transverse (2n−4)-dimensional K: the length is a Catalan number.
    assert!(lengths.contains(&(4, 4, catalan(2))));
    assert!(lengths.contains(&(5, 6, catalan(3))));
}

#[test]
fn prime_and_rational_ranks_agree_on_koszul_matrices() {
    let (q, p) = (Rationals, gf());
    for n in 2..=5 {
        for d in 0..=3 {
            for (a, b) in [
                (rank(&delta1_matrix(q, n, d)), rank(&delta1_matrix(p, n, d))),
                (rank(&delta2_matrix(q, n, d)), rank(&delta2_matrix(p, n, d))),
            ] {
                assert_eq!(a, b, "n={n} q={d}");
            }
        }
    }
}

fn corpus_arrangements() -> Vec<Arrangement> {
    let q = Rationals;
    let pencil = |m: usize| {
        let normals = (0..m).map(|i| vec![q.one(), q.from_i64(i as i64), q.zero()]).collect();
        Arrangement::new(3, normals, None).unwrap()
    };
    vec![
        graphic_arrangement(&Graph::complete(3)).unwrap(),
        graphic_arrangement(&Graph::complete(4)).unwrap(),
        graphic_arrangement(&Graph::wheel(4)).unwrap(),
        pencil(4),
        pencil(5),
    ]
}

fn corpus_components(a: &Arrangement) -> Vec<ResonanceComponent<PrimeField>> {
    let mut comps = local_components(gf(), a);
    if a.len() == 6 && l2_flats(a).iter().filter(|x| x.size() == 3).count() == 4 {
        let net = Multinet::reduced(vec![vec![0, 5], vec![1, 4], vec![2, 3]]).unwrap();
        comps.push(multinet_component(gf(), a, &net).unwrap());
    }
    comps
}

#[test]
fn corpus_resonance_membership() {
    let f = gf();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for a in corpus_arrangements() {
        let p = os_problem(f, &a);
        let comps = corpus_components(&a);
        for c in &comps {
            for _ in 0..10 {
                assert!(in_resonance(&random_combination(f, c.subspace(), &mut rng), p.kperp()).unwrap());
            }
        }
        let mut rejected = 0;
        while rejected < 100 {
            let v: Vec<u32> = (0..a.len()).map(|_| f.random(&mut rng)).collect();
            if comps.iter().any(|c| c.subspace().contains_vector(&v).unwrap()) {
                continue;
            }
            assert!(!in_resonance(&v, p.kperp()).unwrap(), "{v:?}");
            rejected += 1;
        }
    }
}

#[test]
fn strong_isotropy_matches_the_projection_criterion() {
    let f = gf();
    for a in corpus_arrangements() {
        let p = os_problem(f, &a);
        for c in corpus_components(&a) {
            let strong = is_strongly_isotropic(&c, p.kperp()).unwrap();
            assert!(strong, "{}", c.label());
            assert_eq!(strong, is_isotropic(&c, p.kperp()).unwrap() && separability_via_pm(&c, p.k()).unwrap());
        }
    }
    // Isotropic but not separable.
    let n = 6;
    let mut vectors = Vec::new();
    for terms in [&[(0, 1)][..], &[(0, 2)], &[(1, 2)], &[(0, 3), (1, 4), (2, 5)]] {
        let mut v = vec![0u32; 15];
        for &(i, j) in terms {
            v[pair_index(n, i, j)] = 1;
        }
        vectors.push(v);
    }
    let kperp = SubspaceBasis::span(f, 15, vectors).unwrap();
    let e = |i: usize| (0..6).map(|j| (i == j) as u32).collect::<Vec<_>>();
    let c = ResonanceComponent::from_vectors("P", f, 6, vec![e(0), e(1), e(2)]).unwrap();
    assert_eq!(
        is_strongly_isotropic(&c, &kperp).unwrap(),
        is_isotropic(&c, &kperp).unwrap() && separability_via_pm(&c, &kperp.annihilator()).unwrap()
    );
}

#[test]
fn multinet_components_are_proportional_and_separable() {
    let f = gf();
    let k5 = graphic_arrangement(&Graph::complete(5)).unwrap();
    let p = os_problem(f, &k5);
    let g = Graph::complete(5);
    let essential: Vec<_> = graphic_components(f, &g).into_iter().filter(|c| c.label().len() == 5).collect();
    assert_eq!(essential.len(), 5);
    let edge = |i: usize, j: usize| g.edges().iter().position(|&e| e == (i, j)).unwrap();
    for quad in g.cliques(4) {
        let (i, j, k, l) = (quad[0], quad[1], quad[2], quad[3]);
        let blocks = vec![vec![edge(i, j), edge(k, l)], vec![edge(i, k), edge(j, l)], vec![edge(i, l), edge(j, k)]];
        let net = Multinet::reduced(blocks.clone()).unwrap();
        assert!(multinet_validate(&k5, &net).is_valid());
        let c = multinet_component(f, &k5, &net).unwrap();
        assert_eq!(c.subspace(), &multinet_equation_space(f, &k5, &net));
        assert!(essential.iter().any(|e| e.subspace() == c.subspace()));
        assert!(is_separable(&c, p.kperp()).unwrap());
        for v in c.subspace().basis() {
            let support = net.support();
            assert!((0..v.len()).all(|h| support.contains(&h) || v[h] == 0));
            for b in &blocks {
                assert!(b.iter().all(|&h| v[h] == v[b[0]]));
            }
        }
    }
}

#[test]
fn semicontinuity_of_generic_dimensions() {
    for n in [6, 7] {
        let reports: Vec<_> = (1..=20).map(|s| run_trial(TrialSpec::generic(n, s)).unwrap()).collect();
        let summary = summarize(&reports);
        assert_eq!(summary.len(), 1);
        if summary[0].min == 0 {
            assert_eq!(summary[0].mode, 0);
        }
    }
}
