//! Hyperplane arrangements: rank-2 flats, Orlik–Solomon data in degree 2,
//! multinets, local and graphic resonance components, and Chen ranks.
//!
//! Hyperplanes are indexed by their position in the input (0-based). The
//! basis vector `e_H` of `V^∨` and `v_H` of `V` share that index.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactalg::{kernel_basis, Matrix, SubspaceBasis};
use crate::field::{Field, Rationals};
use crate::koszul::{dim_wq, Coefficient, KoszulProblem};
use crate::multilinear::{binomial, pair_index};
use crate::resonance::ResonanceComponent;

/// Central arrangement of hyperplanes in `Q^ambient_dim`, given by normals.
#[derive(Clone, Debug, PartialEq)]
pub struct Arrangement {
    ambient_dim: usize,
    normals: Vec<Vec<BigRational>>,
    labels: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArrangementFile {
    pub ambient_dim: usize,
    pub hyperplanes: Vec<Vec<Coefficient>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

impl Arrangement {
    pub fn new(ambient_dim: usize, normals: Vec<Vec<BigRational>>, labels: Option<Vec<String>>) -> Result<Self> {
        if normals.is_empty() {
            return Err(Error::Invalid("an arrangement needs at least one hyperplane".into()));
        }
        let q = Rationals;
        for (i, v) in normals.iter().enumerate() {
            if v.len() != ambient_dim {
                return Err(Error::AmbientMismatch(format!(
                    "hyperplane {i} has {} coordinates, expected {ambient_dim}",
                    v.len()
                )));
            }
            if v.iter().all(|x| q.is_zero(x)) {
                return Err(Error::Invalid(format!("hyperplane {i} has a zero normal")));
            }
        }
        if let Some(l) = &labels {
            if l.len() != normals.len() {
                return Err(Error::Invalid(format!(
                    "{} labels for {} hyperplanes",
                    l.len(),
                    normals.len()
                )));
            }
        }
        let a = Arrangement {
            ambient_dim,
            normals,
            labels,
        };
        for i in 0..a.len() {
            for j in i + 1..a.len() {
                if a.pair_span(i, j).dim() < 2 {
                    return Err(Error::Invalid(format!("hyperplanes {i} and {j} are proportional")));
                }
            }
        }
        Ok(a)
    }

    pub fn from_file(file: &ArrangementFile) -> Result<Self> {
        let q = Rationals;
        let normals = file
            .hyperplanes
            .iter()
            .map(|row| row.iter().map(|c| c.parse(&q)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::new(file.ambient_dim, normals, file.labels.clone())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ArrangementFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_file(&file)
    }

    /// Number of hyperplanes.
    pub fn len(&self) -> usize {
        self.normals.len()
    }
    pub fn is_empty(&self) -> bool {
        self.normals.is_empty()
    }
    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }
    pub fn normals(&self) -> &[Vec<BigRational>] {
        &self.normals
    }

    pub fn label(&self, i: usize) -> String {
        match &self.labels {
            Some(l) => l[i].clone(),
            None => format!("H{i}"),
        }
    }

    fn pair_span(&self, i: usize, j: usize) -> SubspaceBasis<Rationals> {
        SubspaceBasis::span(
            Rationals,
            self.ambient_dim,
            vec![self.normals[i].clone(), self.normals[j].clone()],
        )
        .expect("normals have the ambient length")
    }
}

/// A rank-2 flat, recorded by the (sorted) hyperplanes containing it.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Flat2 {
    pub hyperplanes: Vec<usize>,
}

impl Flat2 {
    pub fn size(&self) -> usize {
        self.hyperplanes.len()
    }
    pub fn contains(&self, h: usize) -> bool {
        self.hyperplanes.binary_search(&h).is_ok()
    }
}

/// All rank-2 flats, ordered by their smallest pair of hyperplanes.
pub fn l2_flats(a: &Arrangement) -> Vec<Flat2> {
    let n = a.len();
    let mut seen = vec![false; binomial(n, 2)];
    let mut flats = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if seen[pair_index(n, i, j)] {
                continue;
            }
            let span = a.pair_span(i, j);
            let members: Vec<usize> = (0..n)
                .filter(|&h| h == i || h == j || span.contains_vector(&a.normals[h]).unwrap_or(false))
                .collect();
            for (s, &x) in members.iter().enumerate() {
                for &y in &members[s + 1..] {
                    seen[pair_index(n, x, y)] = true;
                }
            }
            flats.push(Flat2 { hyperplanes: members });
        }
    }
    flats
}

fn flat_of_pair(flats: &[Flat2], h: usize, g: usize) -> usize {
    flats
        .iter()
        .position(|x| x.contains(h) && x.contains(g))
        .expect("every pair lies on a flat")
}

/// `K^⊥ ⊆ ∧^2 V^∨`: for each flat `i_1 < ... < i_r` with `r >= 3`, the
/// elements `∂(e_{i_a i_b i_r}) = e_{i_a i_b} − e_{i_a i_r} + e_{i_b i_r}`, `a < b < r`.
pub fn os_kperp<F: Field>(field: F, a: &Arrangement, flats: &[Flat2]) -> SubspaceBasis<F> {
    let n = a.len();
    let mut vectors = Vec::new();
    for x in flats.iter().filter(|x| x.size() >= 3) {
        let h = &x.hyperplanes;
        let last = *h.last().expect("flat is nonempty");
        for s in 0..h.len() - 1 {
            for t in s + 1..h.len() - 1 {
                let mut v = vec![field.zero(); binomial(n, 2)];
                v[pair_index(n, h[s], h[t])] = field.one();
                v[pair_index(n, h[s], last)] = field.neg(&field.one());
                v[pair_index(n, h[t], last)] = field.one();
                vectors.push(v);
            }
        }
    }
    SubspaceBasis::span(field, binomial(n, 2), vectors).expect("lengths match")
}

/// `K ⊆ ∧^2 V`: for each flat `j_1 < ... < j_r` and `q < r`, the element `v_{j_q} ∧ Σ_s v_{j_s}`.
pub fn os_k<F: Field>(field: F, a: &Arrangement, flats: &[Flat2]) -> SubspaceBasis<F> {
    let n = a.len();
    let mut vectors = Vec::new();
    for x in flats {
        let h = &x.hyperplanes;
        for s in 0..h.len() - 1 {
            let mut v = vec![field.zero(); binomial(n, 2)];
            for (t, &other) in h.iter().enumerate() {
                if t < s {
                    v[pair_index(n, other, h[s])] = field.neg(&field.one());
                } else if t > s {
                    v[pair_index(n, h[s], other)] = field.one();
                }
            }
            vectors.push(v);
        }
    }
    SubspaceBasis::span(field, binomial(n, 2), vectors).expect("lengths match")
}

/// The Koszul problem `(V, K)` of an arrangement.
pub fn os_problem<F: Field>(field: F, a: &Arrangement) -> KoszulProblem<F> {
    let flats = l2_flats(a);
    let k = os_k(field.clone(), a, &flats);
    let kperp = os_kperp(field, a, &flats);
    let p = KoszulProblem::from_kperp(a.len(), kperp).expect("ambient matches");
    debug_assert_eq!(p.k(), &k);
    p
}

/// A partition of a sub-arrangement into blocks, with multiplicities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Multinet {
    blocks: Vec<Vec<usize>>,
    multiplicities: BTreeMap<usize, u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultinetFile {
    pub blocks: Vec<Vec<usize>>,
    #[serde(default)]
    pub multiplicities: BTreeMap<String, u64>,
}

impl Multinet {
    pub fn new(blocks: Vec<Vec<usize>>, multiplicities: BTreeMap<usize, u64>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for &h in blocks.iter().flatten() {
            if !seen.insert(h) {
                return Err(Error::InvalidMultinet(format!("hyperplane {h} appears in two blocks")));
            }
        }
        if blocks.iter().any(Vec::is_empty) {
            return Err(Error::InvalidMultinet("empty block".into()));
        }
        for (&h, &m) in &multiplicities {
            if !seen.contains(&h) {
                return Err(Error::InvalidMultinet(format!("multiplicity for hyperplane {h} outside every block")));
            }
            if m == 0 {
                return Err(Error::InvalidMultinet(format!("hyperplane {h} has multiplicity 0")));
            }
        }
        let blocks = blocks
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b
            })
            .collect();
        Ok(Multinet { blocks, multiplicities })
    }

    /// All multiplicities equal to one.
    pub fn reduced(blocks: Vec<Vec<usize>>) -> Result<Self> {
        Self::new(blocks, BTreeMap::new())
    }

    pub fn from_file(file: &MultinetFile) -> Result<Self> {
        let mut mult = BTreeMap::new();
        for (k, &v) in &file.multiplicities {
            let h: usize = k
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad hyperplane index `{k}`")))?;
            mult.insert(h, v);
        }
        Self::new(file.blocks.clone(), mult)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: MultinetFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_file(&file)
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }
    pub fn k(&self) -> usize {
        self.blocks.len()
    }
    pub fn multiplicity(&self, h: usize) -> u64 {
        self.multiplicities.get(&h).copied().unwrap_or(1)
    }
    /// Hyperplanes of the supporting sub-arrangement.
    pub fn support(&self) -> BTreeSet<usize> {
        self.blocks.iter().flatten().copied().collect()
    }
}

/// Outcome of [`multinet_validate`]; one entry per condition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub k: usize,
    pub at_least_three_blocks: bool,
    /// Common weighted block size `d`, when condition 1 holds.
    pub d: Option<u64>,
    pub equal_block_sums: bool,
    pub cross_intersections_in_base_locus: bool,
    pub balanced_at_base_locus: bool,
    pub blocks_connected: bool,
    pub base_locus: Vec<Flat2>,
    pub failures: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.at_least_three_blocks
            && self.equal_block_sums
            && self.cross_intersections_in_base_locus
            && self.balanced_at_base_locus
            && self.blocks_connected
    }
}

/// Checks the multinet conditions. The base locus is the set of flats
/// `H ∩ H'` for `H`, `H'` in different blocks. Connectivity of a block is
/// checked on the graph whose vertices are its hyperplanes, joined when they
/// meet in a flat outside the base locus.
pub fn multinet_validate(a: &Arrangement, nn: &Multinet) -> ValidationReport {
    let flats = l2_flats(a);
    let mut failures = Vec::new();
    let k = nn.k();
    let at_least_three_blocks = k >= 3;
    if !at_least_three_blocks {
        failures.push(format!("{k} blocks; a multinet has at least 3"));
    }
    if let Some(&h) = nn.support().iter().find(|&&h| h >= a.len()) {
        failures.push(format!("hyperplane {h} is not in the arrangement"));
        return ValidationReport {
            k,
            at_least_three_blocks,
            d: None,
            equal_block_sums: false,
            cross_intersections_in_base_locus: false,
            balanced_at_base_locus: false,
            blocks_connected: false,
            base_locus: Vec::new(),
            failures,
        };
    }

    let sums: Vec<u64> = nn
        .blocks
        .iter()
        .map(|b| b.iter().map(|&h| nn.multiplicity(h)).sum())
        .collect();
    let equal_block_sums = sums.windows(2).all(|w| w[0] == w[1]);
    if !equal_block_sums {
        failures.push(format!("weighted block sizes differ: {sums:?}"));
    }

    let mut locus = BTreeSet::new();
    for (i, bi) in nn.blocks.iter().enumerate() {
        for bj in &nn.blocks[i + 1..] {
            for &h in bi {
                for &g in bj {
                    locus.insert(flat_of_pair(&flats, h, g));
                }
            }
        }
    }
    // With the base locus defined as the set of cross-block intersections,
    // condition 2 can only fail if some such flat is contained in one block.
    let mut cross_ok = true;
    for &x in &locus {
        let meets: Vec<bool> = nn
            .blocks
            .iter()
            .map(|b| b.iter().any(|&h| flats[x].contains(h)))
            .collect();
        if !meets.iter().all(|&m| m) {
            cross_ok = false;
            failures.push(format!(
                "flat {:?} is a cross-block intersection but misses a block",
                flats[x].hyperplanes
            ));
        }
    }

    let mut balanced = true;
    for &x in &locus {
        let counts: Vec<u64> = nn
            .blocks
            .iter()
            .map(|b| b.iter().filter(|&&h| flats[x].contains(h)).map(|&h| nn.multiplicity(h)).sum())
            .collect();
        if counts.windows(2).any(|w| w[0] != w[1]) {
            balanced = false;
            failures.push(format!(
                "flat {:?} meets the blocks with weights {counts:?}",
                flats[x].hyperplanes
            ));
        }
    }

    let mut connected = true;
    for (i, b) in nn.blocks.iter().enumerate() {
        let mut reached = vec![false; b.len()];
        let mut stack = vec![0];
        reached[0] = true;
        while let Some(s) = stack.pop() {
            for t in 0..b.len() {
                if !reached[t] && !locus.contains(&flat_of_pair(&flats, b[s], b[t])) {
                    reached[t] = true;
                    stack.push(t);
                }
            }
        }
        if reached.iter().any(|r| !r) {
            connected = false;
            failures.push(format!("block {i} is disconnected once the base locus is removed"));
        }
    }

    ValidationReport {
        k,
        at_least_three_blocks,
        d: equal_block_sums.then(|| sums[0]),
        equal_block_sums,
        cross_intersections_in_base_locus: cross_ok,
        balanced_at_base_locus: balanced,
        blocks_connected: connected,
        base_locus: locus.into_iter().map(|x| flats[x].clone()).collect(),
        failures,
    }
}

fn unit_row<F: Field>(f: &F, n: usize, h: usize) -> Vec<F::Elem> {
    let mut v = vec![f.zero(); n];
    v[h] = f.one();
    v
}

fn indicator<F: Field>(f: &F, n: usize, hs: impl IntoIterator<Item = usize>) -> Vec<F::Elem> {
    let mut v = vec![f.zero(); n];
    for h in hs {
        v[h] = f.one();
    }
    v
}

fn solution_space<F: Field>(f: &F, n: usize, equations: Vec<Vec<F::Elem>>) -> SubspaceBasis<F> {
    if equations.is_empty() {
        return SubspaceBasis::full(f.clone(), n);
    }
    kernel_basis(&Matrix::from_dense(f.clone(), &equations).expect("rows have equal length"))
}

/// `span{u_i − u_1}` with `u_i = Σ_{H ∈ block i} m_H e_H`.
pub fn multinet_component<F: Field>(field: F, a: &Arrangement, nn: &Multinet) -> Result<ResonanceComponent<F>> {
    let report = multinet_validate(a, nn);
    if !report.is_valid() {
        return Err(Error::InvalidMultinet(report.failures.join("; ")));
    }
    let n = a.len();
    let u: Vec<Vec<F::Elem>> = nn
        .blocks
        .iter()
        .map(|b| {
            let mut v = vec![field.zero(); n];
            for &h in b {
                v[h] = field.from_i64(nn.multiplicity(h) as i64);
            }
            v
        })
        .collect();
    let vectors = u[1..]
        .iter()
        .map(|ui| ui.iter().zip(&u[0]).map(|(x, y)| field.sub(x, y)).collect())
        .collect();
    let label = format!(
        "N[{}]",
        nn.blocks
            .iter()
            .map(|b| b.iter().map(|h| h.to_string()).collect::<Vec<_>>().join(","))
            .collect::<Vec<_>>()
            .join("|")
    );
    ResonanceComponent::from_vectors(label, field, n, vectors)
}

/// The solutions of `∂(a) = 0`, `∂_X(a) = 0` for `X` in the base locus and
/// `a_H = 0` for `H` outside the support.
pub fn multinet_equation_space<F: Field>(field: F, a: &Arrangement, nn: &Multinet) -> SubspaceBasis<F> {
    let n = a.len();
    let flats = l2_flats(a);
    let report = multinet_validate(a, nn);
    let support = nn.support();
    let mut equations = vec![indicator(&field, n, 0..n)];
    for x in &report.base_locus {
        let full = flats.iter().find(|f| f.hyperplanes == x.hyperplanes).expect("base locus flat");
        equations.push(indicator(&field, n, full.hyperplanes.iter().copied()));
    }
    for h in (0..n).filter(|h| !support.contains(h)) {
        equations.push(unit_row(&field, n, h));
    }
    solution_space(&field, n, equations)
}

/// `P_X = {a : Σ_{H ⊇ X} a_H = 0, a_H = 0 for H ⊉ X}`.
pub fn local_component<F: Field>(field: F, a: &Arrangement, x: &Flat2) -> Result<ResonanceComponent<F>> {
    if x.size() < 3 {
        return Err(Error::FlatTooSmall(x.size()));
    }
    let n = a.len();
    let mut equations = vec![indicator(&field, n, x.hyperplanes.iter().copied())];
    for h in (0..n).filter(|&h| !x.contains(h)) {
        equations.push(unit_row(&field, n, h));
    }
    let label = format!(
        "P[{}]",
        x.hyperplanes.iter().map(|&h| a.label(h)).collect::<Vec<_>>().join(",")
    );
    ResonanceComponent::new(label, solution_space(&field, n, equations))
}

/// Local components of all flats of size at least 3.
pub fn local_components<F: Field>(field: F, a: &Arrangement) -> Vec<ResonanceComponent<F>> {
    l2_flats(a)
        .iter()
        .filter(|x| x.size() >= 3)
        .map(|x| local_component(field.clone(), a, x).expect("flat has size >= 3"))
        .collect()
}

/// A simple graph on vertices `0..vertices`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    vertices: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    /// Edges are stored as given, each with its smaller endpoint first.
    pub fn new(vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::with_capacity(edges.len());
        for (u, v) in edges {
            if u == v {
                return Err(Error::Invalid(format!("loop at vertex {u}")));
            }
            if u >= vertices || v >= vertices {
                return Err(Error::Invalid(format!("edge ({u}, {v}) outside {vertices} vertices")));
            }
            let e = (u.min(v), u.max(v));
            if !seen.insert(e) {
                return Err(Error::Invalid(format!("repeated edge ({u}, {v})")));
            }
            out.push(e);
        }
        Ok(Graph { vertices, edges: out })
    }

    pub fn complete(m: usize) -> Self {
        let edges = (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))).collect();
        Graph::new(m, edges).expect("complete graphs are simple")
    }

    pub fn cycle(m: usize) -> Self {
        Graph::new(m, (0..m).map(|i| (i, (i + 1) % m)).collect()).expect("cycles of length >= 3 are simple")
    }

    /// A hub joined to every vertex of an `rim`-cycle.
    pub fn wheel(rim: usize) -> Self {
        let mut edges: Vec<(usize, usize)> = (0..rim).map(|i| (0, i + 1)).collect();
        edges.extend((0..rim).map(|i| (i + 1, (i + 1) % rim + 1)));
        Graph::new(rim + 1, edges).expect("wheels are simple")
    }

    /// Parses a whitespace-separated edge list with 1-indexed vertices.
    /// Blank lines and lines starting with `#` are skipped.
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut edges = Vec::new();
        let mut vertices = 0;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = || Error::Parse(format!("line {}: expected `u v` with 1-indexed vertices", lineno + 1));
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 2 {
                return Err(bad());
            }
            let u: usize = parts[0].parse().map_err(|_| bad())?;
            let v: usize = parts[1].parse().map_err(|_| bad())?;
            if u == 0 || v == 0 {
                return Err(bad());
            }
            vertices = vertices.max(u).max(v);
            edges.push((u - 1, v - 1));
        }
        Graph::new(vertices, edges)
    }

    pub fn vertices(&self) -> usize {
        self.vertices
    }
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    fn adjacency(&self) -> Vec<Vec<bool>> {
        let mut adj = vec![vec![false; self.vertices]; self.vertices];
        for &(u, v) in &self.edges {
            adj[u][v] = true;
            adj[v][u] = true;
        }
        adj
    }

    /// All `r`-cliques as increasing vertex lists.
    pub fn cliques(&self, r: usize) -> Vec<Vec<usize>> {
        fn extend(adj: &[Vec<bool>], r: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if current.len() == r {
                out.push(current.clone());
                return;
            }
            let start = current.last().map_or(0, |&v| v + 1);
            for v in start..adj.len() {
                if current.iter().all(|&u| adj[u][v]) {
                    current.push(v);
                    extend(adj, r, current, out);
                    current.pop();
                }
            }
        }
        let mut out = Vec::new();
        if r > 0 {
            extend(&self.adjacency(), r, &mut Vec::new(), &mut out);
        }
        out
    }

    /// `κ_r`, the number of `r`-cliques.
    pub fn kappa(&self, r: usize) -> usize {
        self.cliques(r).len()
    }

    fn edge_index(&self, u: usize, v: usize) -> usize {
        let e = (u.min(v), u.max(v));
        self.edges.iter().position(|&x| x == e).expect("edge of the graph")
    }
}

/// Hyperplanes `z_i − z_j = 0`, one per edge, in edge order.
pub fn graphic_arrangement(g: &Graph) -> Result<Arrangement> {
    let q = Rationals;
    let normals = g
        .edges
        .iter()
        .map(|&(i, j)| {
            let mut v = vec![q.zero(); g.vertices];
            v[i] = q.one();
            v[j] = q.neg(&q.one());
            v
        })
        .collect();
    let labels = g.edges.iter().map(|&(i, j)| format!("{}{}", i + 1, j + 1)).collect();
    Arrangement::new(g.vertices, normals, Some(labels))
}

/// One local component per triangle and one essential component per 4-clique.
pub fn graphic_components<F: Field>(field: F, g: &Graph) -> Vec<ResonanceComponent<F>> {
    let n = g.edges.len();
    let name = |vs: &[usize]| vs.iter().map(|v| (v + 1).to_string()).collect::<String>();
    let combo = |terms: &[(usize, usize, i64)]| {
        let mut v = vec![field.zero(); n];
        for &(a, b, s) in terms {
            v[g.edge_index(a, b)] = field.from_i64(s);
        }
        v
    };
    let mut out = Vec::new();
    for t in g.cliques(3) {
        let (i, j, k) = (t[0], t[1], t[2]);
        let vectors = vec![combo(&[(i, j, 1), (j, k, -1)]), combo(&[(i, k, 1), (j, k, -1)])];
        out.push(
            ResonanceComponent::from_vectors(format!("P{}", name(&t)), field.clone(), n, vectors)
                .expect("triangle components have dimension 2"),
        );
    }
    for c in g.cliques(4) {
        let (i, j, k, l) = (c[0], c[1], c[2], c[3]);
        let vectors = vec![
            combo(&[(i, j, 1), (i, k, -1), (k, l, 1), (j, l, -1)]),
            combo(&[(i, j, 1), (j, k, -1), (k, l, 1), (i, l, -1)]),
        ];
        out.push(
            ResonanceComponent::from_vectors(format!("P{}", name(&c)), field.clone(), n, vectors)
                .expect("4-clique components have dimension 2"),
        );
    }
    out
}

fn require_q2(q: usize) -> Result<()> {
    if q < 2 {
        return Err(Error::QTooSmall { q, min: 2 });
    }
    Ok(())
}

/// `θ_q(F_m) = (q−1) C(m+q−2, q)`.
pub fn chen_free(m: usize, q: usize) -> Result<usize> {
    require_q2(q)?;
    Ok((q - 1) * binomial(m + q - 2, q))
}

/// `θ_q = (q−1) Σ_m h_m C(m+q−2, q)`, where `h_m` counts components of dimension `m`.
pub fn chen_ranks_formula(component_dims: &[usize], q: usize) -> Result<usize> {
    require_q2(q)?;
    component_dims.iter().map(|&m| chen_free(m, q)).sum()
}

/// `θ_q = dim W_{q−2}(V, K)` for the arrangement's Koszul problem.
pub fn chen_ranks_koszul<F: Field>(field: F, a: &Arrangement, q: usize, verify: bool) -> Result<usize> {
    require_q2(q)?;
    dim_wq(&os_problem(field, a), q - 2, verify)
}

/// `θ_q = (q−1)(κ_3 + κ_4)`, valid for `q >= κ_2 − 1`.
pub fn graphic_chen(g: &Graph, q: usize) -> Result<usize> {
    let min = g.kappa(2).saturating_sub(1).max(2);
    if q < min {
        return Err(Error::QTooSmall { q, min });
    }
    Ok((q - 1) * (g.kappa(3) + g.kappa(4)))
}
