use std::collections::BTreeSet;
use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::Path;
use std::sync::Mutex;

use koszul::arrangements::{
    chen_ranks_formula, chen_ranks_koszul, graphic_arrangement, graphic_chen, graphic_components, l2_flats,
    local_components, multinet_component, multinet_equation_space, multinet_validate, os_problem,
};
use koszul::exactalg::{parse_tsv_header, random_subspace};
use koszul::experiments::{kronecker_witness_check, run_trials, summarize, Sweep, TrialReport};
use koszul::field::DEFAULT_PRIME;
use koszul::koszul::{base_locus_length, component_sum, dim_wq, hilbert_range, resonance_trivial, ProblemFile};
use koszul::multilinear::binomial;
use koszul::resonance::{in_resonance, is_isotropic, is_separable, is_strongly_isotropic, separability_via_pm, ComponentFile};
use koszul::{
    Arrangement, BaseLocus, Error, Field, FieldTag, Graph, KoszulProblem, Matrix, Multinet, PrimeField, Rationals,
    ResonanceComponent, Result,
};
use serde_json::{json, Value};

use crate::{ArrangementArgs, Format, GenericArgs, Global, GraphicArgs, HilbertArgs, RankArgs, ResonanceArgs, WqArgs};

/// What a command prints: TSV lines or one JSON document, plus its exit code.
pub struct Output {
    lines: Vec<String>,
    json: Value,
    pub code: u8,
}

impl Output {
    fn new(lines: Vec<String>, json: Value) -> Self {
        Output { lines, json, code: 0 }
    }

    pub fn print(&self, format: Format) {
        let stdout = io::stdout();
        let mut out = stdout.lock();
        let _ = match format {
            Format::Tsv => self.lines.iter().try_for_each(|l| writeln!(out, "{l}")),
            Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&self.json).expect("serializable")),
        };
    }
}

macro_rules! dispatch {
    ($tag:expr, $func:ident($($arg:expr),* $(,)?)) => {
        match $tag {
            FieldTag::Rational => $func(Rationals, $($arg),*),
            FieldTag::Prime(p) => $func(PrimeField::new(p)?, $($arg),*),
        }
    };
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn resolve(cli: Option<FieldTag>, file: Option<FieldTag>) -> FieldTag {
    cli.or(file).unwrap_or_else(FieldTag::default_prime)
}

fn load_problem(g: &Global, path: &Path) -> Result<(ProblemFile, FieldTag)> {
    let file = ProblemFile::from_json(&read(path)?)?;
    let tag = resolve(g.field, file.field);
    Ok((file, tag))
}

fn flag(b: bool) -> &'static str {
    if b {
        "true"
    } else {
        "false"
    }
}

pub fn wq(g: &Global, a: &WqArgs) -> Result<Output> {
    match (&a.problem, a.random) {
        (Some(path), _) => {
            let (file, tag) = load_problem(g, path)?;
            dispatch!(tag, wq_file(g, a, &file))
        }
        (None, Some((n, m))) => {
            let seed = g
                .seed
                .ok_or_else(|| Error::Invalid("--random needs --seed".into()))?;
            dispatch!(resolve(g.field, None), wq_random(g, a, n, m, seed))
        }
        (None, None) => Err(Error::Invalid("give a problem file or --random".into())),
    }
}

fn wq_file<F: Field>(f: F, g: &Global, a: &WqArgs, file: &ProblemFile) -> Result<Output> {
    wq_table(&file.build(f)?, g, a)
}

fn wq_random<F: Field>(f: F, g: &Global, a: &WqArgs, n: usize, m: usize, seed: u64) -> Result<Output> {
    if n < 2 {
        return Err(Error::Invalid(format!("n = {n} is too small")));
    }
    let k = random_subspace(f, binomial(n, 2), m, seed)?;
    wq_table(&KoszulProblem::new(n, k)?, g, a)
}

fn wq_table<F: Field>(p: &KoszulProblem<F>, g: &Global, a: &WqArgs) -> Result<Output> {
    let qs = a.q.map_or(0..=p.n(), |r| r.iter());
    let table = hilbert_range(p, qs, g.verify)?;
    let lines = table.values.iter().map(|(q, d)| format!("{q}\t{d}")).collect();
    let json = json!({
        "n": table.n,
        "m": table.m,
        "field": table.field,
        "verified": g.verify,
        "seed": g.seed,
        "values": table.values.iter().map(|(q, d)| json!({"q": q, "dim": d})).collect::<Vec<_>>(),
    });
    Ok(Output::new(lines, json))
}

pub fn hilbert(g: &Global, a: &HilbertArgs) -> Result<Output> {
    let (file, tag) = load_problem(g, &a.problem)?;
    dispatch!(tag, hilbert_in(g, a, &file))
}

fn hilbert_in<F: Field>(f: F, g: &Global, a: &HilbertArgs, file: &ProblemFile) -> Result<Output> {
    let p = file.build(f)?;
    let table = hilbert_range(&p, 0..=a.q_max.unwrap_or(p.n()), g.verify)?;
    let mut lines: Vec<String> = table.values.iter().map(|(q, d)| format!("{q}\t{d}")).collect();
    let mut json = json!({
        "n": table.n,
        "m": table.m,
        "field": table.field,
        "verified": g.verify,
        "values": table.values.iter().map(|(q, d)| json!({"q": q, "dim": d})).collect::<Vec<_>>(),
    });
    if p.n() >= 3 {
        let trivial = resonance_trivial(&p)?;
        let locus = base_locus_length(&p)?;
        lines.push(format!("# resonance_trivial\t{}", flag(trivial)));
        lines.push(match locus {
            BaseLocus::Length(l) => format!("# base_locus_length\t{l}"),
            BaseLocus::NotStabilized { d1, d2 } => format!("# base_locus_length\tnot stabilized ({d1}, {d2})"),
        });
        json["resonance_trivial"] = json!(trivial);
        json["base_locus"] = json!(locus);
    }
    Ok(Output::new(lines, json))
}

struct Flags {
    isotropic: bool,
    separable: bool,
    strongly_isotropic: bool,
    projection: Option<bool>,
}

/// Both flags, cross-checked against the intersection equality and, for
/// isotropic components, against the projection criterion.
fn component_flags<F: Field>(c: &ResonanceComponent<F>, p: &KoszulProblem<F>) -> Result<Flags> {
    let isotropic = is_isotropic(c, p.kperp())?;
    let separable = is_separable(c, p.kperp())?;
    let strongly_isotropic = is_strongly_isotropic(c, p.kperp())?;
    let projection = if isotropic {
        let pm = separability_via_pm(c, p.k())?;
        if pm != separable {
            return Err(Error::RouteDisagreement(format!(
                "component `{}`: separable {separable} directly, {pm} by projection",
                c.label()
            )));
        }
        Some(pm)
    } else {
        None
    };
    Ok(Flags {
        isotropic,
        separable,
        strongly_isotropic,
        projection,
    })
}

fn component_rows<F: Field>(
    comps: &[ResonanceComponent<F>],
    p: &KoszulProblem<F>,
    lines: &mut Vec<String>,
) -> Result<Vec<Value>> {
    let mut out = Vec::new();
    for c in comps {
        let fl = component_flags(c, p)?;
        lines.push(format!(
            "component\t{}\t{}\t{}\t{}\t{}",
            c.label(),
            c.dim(),
            flag(fl.isotropic),
            flag(fl.separable),
            flag(fl.strongly_isotropic)
        ));
        out.push(json!({
            "label": c.label(),
            "dim": c.dim(),
            "isotropic": fl.isotropic,
            "separable": fl.separable,
            "strongly_isotropic": fl.strongly_isotropic,
            "separable_by_projection": fl.projection,
        }));
    }
    Ok(out)
}

fn load_arrangement(path: &Path) -> Result<(Arrangement, Option<Graph>)> {
    let text = read(path)?;
    if text.trim_start().starts_with('{') {
        Ok((Arrangement::from_json(&text)?, None))
    } else {
        let g = Graph::parse_edge_list(&text)?;
        Ok((graphic_arrangement(&g)?, Some(g)))
    }
}

pub fn arrangement(g: &Global, a: &ArrangementArgs) -> Result<Output> {
    let (arr, graph) = load_arrangement(&a.input)?;
    let nets = a
        .multinet
        .iter()
        .map(|p| Multinet::from_json(&read(p)?))
        .collect::<Result<Vec<_>>>()?;
    dispatch!(resolve(g.field, None), report(g, &arr, graph.as_ref(), &nets, a.q))
}

pub fn graphic(g: &Global, a: &GraphicArgs) -> Result<Output> {
    let graph = Graph::parse_edge_list(&read(&a.edges)?)?;
    let arr = graphic_arrangement(&graph)?;
    dispatch!(resolve(g.field, None), report(g, &arr, Some(&graph), &[], a.q))
}

fn report<F: Field>(
    f: F,
    g: &Global,
    a: &Arrangement,
    graph: Option<&Graph>,
    nets: &[Multinet],
    q: Option<crate::QRange>,
) -> Result<Output> {
    let mut lines = vec![format!("hyperplanes\t{}", a.len())];
    let mut json = json!({ "hyperplanes": (0..a.len()).map(|i| a.label(i)).collect::<Vec<_>>() });

    let flats = l2_flats(a);
    let names = |hs: &[usize]| hs.iter().map(|&h| a.label(h)).collect::<Vec<_>>();
    for x in &flats {
        lines.push(format!("flat\t{}\t{}", x.size(), names(&x.hyperplanes).join(",")));
    }
    json["flats"] = json!(flats.iter().map(|x| names(&x.hyperplanes)).collect::<Vec<_>>());

    let p = os_problem(f.clone(), a);
    lines.push(format!("dim_K\t{}", p.m()));
    lines.push(format!("dim_K_perp\t{}", p.kperp().dim()));
    json["dim_K"] = json!(p.m());
    json["dim_K_perp"] = json!(p.kperp().dim());

    if let Some(gr) = graph {
        let kappa: Vec<usize> = (2..=4).map(|r| gr.kappa(r)).collect();
        lines.push(format!("kappa\t{}\t{}\t{}", kappa[0], kappa[1], kappa[2]));
        json["kappa"] = json!({"2": kappa[0], "3": kappa[1], "4": kappa[2]});
    }

    let mut comps = match graph {
        Some(gr) => graphic_components(f.clone(), gr),
        None => local_components(f.clone(), a),
    };
    let mut net_reports = Vec::new();
    for (i, net) in nets.iter().enumerate() {
        let v = multinet_validate(a, net);
        // Block differences against the equation description; a mismatch is reported for review.
        let spans = if v.is_valid() {
            let c = multinet_component(f.clone(), a, net)?;
            let equal = c.subspace() == &multinet_equation_space(f.clone(), a, net);
            if !comps.iter().any(|d| d.subspace() == c.subspace()) {
                comps.push(c);
            }
            Some(equal)
        } else {
            None
        };
        lines.push(format!(
            "multinet\t{i}\t{}\t{}\t{}",
            if v.is_valid() { "valid" } else { "invalid" },
            match spans {
                Some(true) => "spans_equal",
                Some(false) => "spans_differ",
                None => "-",
            },
            v.failures.join("; ")
        ));
        let mut entry = json!(v);
        entry["spans_equal"] = json!(spans);
        net_reports.push(entry);
    }
    json["multinets"] = json!(net_reports);
    json["components"] = json!(component_rows(&comps, &p, &mut lines)?);

    let range = match (q, graph) {
        (Some(r), _) => r.iter(),
        (None, Some(gr)) => gr.kappa(2).saturating_sub(1).max(2)..=gr.kappa(2) + 1,
        (None, None) => a.len().saturating_sub(1).max(2)..=a.len() + 1,
    };
    let dims: Vec<usize> = comps.iter().map(|c| c.dim()).collect();
    let mut agree = true;
    let mut chen = Vec::new();
    for q in range {
        let formula = match graph {
            Some(gr) => graphic_chen(gr, q)?,
            None => chen_ranks_formula(&dims, q)?,
        };
        let koszul = chen_ranks_koszul(f.clone(), a, q, g.verify)?;
        let ok = formula == koszul;
        agree &= ok;
        let verdict = if ok { "AGREE" } else { "DISAGREE" };
        lines.push(format!("chen\t{q}\t{formula}\t{koszul}\t{verdict}"));
        chen.push(json!({"q": q, "formula": formula, "koszul": koszul, "verdict": verdict}));
    }
    let verdict = if agree { "AGREE" } else { "DISAGREE" };
    lines.push(format!("verdict\t{verdict}"));
    json["chen_ranks"] = json!(chen);
    json["verdict"] = json!(verdict);
    json["field"] = json!(f.tag());

    let mut out = Output::new(lines, json);
    if !agree {
        out.code = 4;
    }
    Ok(out)
}

pub fn resonance(g: &Global, a: &ResonanceArgs) -> Result<Output> {
    let (file, tag) = load_problem(g, &a.problem)?;
    let mut comp_files = Vec::new();
    for path in &a.component {
        let text = read(path)?;
        let parsed: Value = serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
        let files: Vec<ComponentFile> = if parsed.is_array() {
            serde_json::from_value(parsed)
        } else {
            serde_json::from_value(parsed).map(|c| vec![c])
        }
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        comp_files.extend(files);
    }
    dispatch!(tag, resonance_in(g, a, &file, &comp_files))
}

fn resonance_in<F: Field>(
    f: F,
    g: &Global,
    a: &ResonanceArgs,
    file: &ProblemFile,
    comp_files: &[ComponentFile],
) -> Result<Output> {
    let p = file.build(f.clone())?;
    let comps = comp_files
        .iter()
        .map(|c| c.build(f.clone(), p.n()))
        .collect::<Result<Vec<_>>>()?;
    let mut lines = Vec::new();
    let mut json = json!({"n": p.n(), "m": p.m(), "field": f.tag()});
    json["components"] = json!(component_rows(&comps, &p, &mut lines)?);

    let mut vectors = Vec::new();
    for text in &a.vector {
        let v = text
            .split(',')
            .map(|s| f.parse_elem(s.trim()))
            .collect::<Result<Vec<_>>>()?;
        if v.len() != p.n() {
            return Err(Error::AmbientMismatch(format!(
                "vector `{text}` has {} coordinates, expected {}",
                v.len(),
                p.n()
            )));
        }
        let inside = in_resonance(&v, p.kperp())?;
        lines.push(format!("vector\t{text}\t{}", flag(inside)));
        vectors.push(json!({"vector": text, "in_resonance": inside}));
    }
    json["vectors"] = json!(vectors);

    if let Some(r) = a.q {
        let mut rows = Vec::new();
        for q in r.iter() {
            let d = dim_wq(&p, q, g.verify)?;
            let sum = component_sum(comps.iter().map(|c| c.dim()), q);
            let same = if d == sum { "EQUAL" } else { "DIFFERENT" };
            lines.push(format!("decomposition\t{q}\t{d}\t{sum}\t{same}"));
            rows.push(json!({"q": q, "dim": d, "component_sum": sum, "equal": d == sum}));
        }
        json["decomposition"] = json!(rows);
    }
    Ok(Output::new(lines, json))
}

pub fn generic_vanishing(g: &Global, a: &GenericArgs) -> Result<Output> {
    if a.witness {
        if a.n.iter().any(|&n| n != 5) {
            return Err(Error::Invalid("the witness check is for n = 5".into()));
        }
        let w = kronecker_witness_check()?;
        let status = if w.passed() { "PASS" } else { "FAIL" };
        let line = format!(
            "{status}\tkronecker witness\tin_kernel={}\tkernel_dim={}\tdim_W1={}",
            w.witness_in_kernel, w.kernel_dim, w.dim_w1
        );
        let mut out = Output::new(vec![line], json!({"status": status, "report": w}));
        if !w.passed() {
            out.code = 4;
        }
        return Ok(out);
    }
    if a.n.is_empty() {
        return Err(Error::Invalid("--n is required".into()));
    }
    let prime = match (a.prime, g.field) {
        (Some(p), _) => p,
        (None, Some(FieldTag::Prime(p))) => p,
        (None, Some(FieldTag::Rational)) => {
            return Err(Error::Invalid("trials run over a prime field".into()));
        }
        (None, None) => DEFAULT_PRIME,
    };
    PrimeField::new(prime)?;
    let seeds = if !a.seeds.is_empty() {
        a.seeds.clone()
    } else if let Some(s) = g.seed {
        vec![s]
    } else {
        return Err(Error::Invalid("give --seeds or --seed".into()));
    };
    let specs = Sweep {
        ns: a.n.clone(),
        seeds,
        q: a.q,
        m: a.m,
        prime,
    }
    .specs()?;

    let mut done: Vec<TrialReport> = match &a.out {
        Some(path) if path.exists() => read_reports(path)?,
        _ => Vec::new(),
    };
    let finished: BTreeSet<_> = done.iter().map(|r| r.spec()).collect();
    let todo: Vec<_> = specs.iter().copied().filter(|s| !finished.contains(s)).collect();

    let sink = match &a.out {
        Some(path) => Some(Mutex::new(BufWriter::new(
            fs::OpenOptions::new().create(true).append(true).open(path)?,
        ))),
        None => None,
    };
    let jobs = g
        .jobs
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let fresh = run_trials(&todo, jobs, |r| {
        eprintln!("n={} seed={} dim={} ({} ms)", r.n, r.seed, r.dim, r.ms);
        if let Some(w) = &sink {
            let mut w = w.lock().expect("sink lock");
            let _ = writeln!(w, "{}", serde_json::to_string(r).expect("serializable"));
            let _ = w.flush();
        }
    })?;
    drop(sink);

    let wanted: BTreeSet<_> = specs.iter().copied().collect();
    done.extend(fresh);
    done.sort_by_key(|r| (r.n, r.seed, r.m, r.q, r.prime));
    done.dedup_by_key(|r| r.spec());
    let lines: Vec<String> = done
        .iter()
        .map(|r| serde_json::to_string(r).expect("serializable"))
        .collect();
    if let Some(path) = &a.out {
        let tmp = path.with_extension("tmp");
        fs::write(&tmp, lines.iter().map(|l| format!("{l}\n")).collect::<String>())?;
        fs::rename(&tmp, path)?;
    }
    let requested: Vec<TrialReport> = done.into_iter().filter(|r| wanted.contains(&r.spec())).collect();
    let json = json!({"reports": requested, "summary": summarize(&requested)});
    let lines = requested
        .iter()
        .map(|r| serde_json::to_string(r).expect("serializable"))
        .collect();
    Ok(Output::new(lines, json))
}

fn read_reports(path: &Path) -> Result<Vec<TrialReport>> {
    read(path)?
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(|e| Error::Parse(format!("{}: {e}", path.display()))))
        .collect()
}

pub fn rank(g: &Global, a: &RankArgs) -> Result<Output> {
    let text = read(&a.matrix)?;
    let header = text.lines().next().ok_or_else(|| Error::Parse("empty matrix file".into()))?;
    let (_, _, tag) = parse_tsv_header(header)?;
    dispatch!(resolve(g.field, Some(tag)), rank_in(&a.matrix))
}

fn rank_in<F: Field>(f: F, path: &Path) -> Result<Output> {
    let m = Matrix::from_tsv(f, BufReader::new(File::open(path)?))?;
    let r = koszul::exactalg::rank(&m);
    Ok(Output::new(
        vec![format!("rank\t{r}"), format!("rows\t{}", m.rows()), format!("cols\t{}", m.cols())],
        json!({"rank": r, "rows": m.rows(), "cols": m.cols(), "field": m.field().tag()}),
    ))
}
