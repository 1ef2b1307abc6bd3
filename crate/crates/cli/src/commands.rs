use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde_json::{json, Value};
use stratops::cobar::{cobar_complex_with, cobar_operad, cooperad_by_name, liec, SignConvention};
use stratops::filtration::{
    dk_on_moduli, er_term, induce_cinf, suboperad_dk, toy_moduli, toy_moduli_algebra, FilteredOperad,
};
use stratops::hoalg::{check_ainf, check_cinf, MapFamily};
use stratops::operads::{
    assoc_operad, check_axioms, comm_operad, endomorphism_operad_dg, free_algebra_dims, lie_operad, Operad,
    OperadTable, DEFAULT_END_CAP,
};
use stratops::qlinalg::{format_rational, q, SparseMatrix, SparseVec};
use stratops::strata::{
    dual_e1_table, e1_table, middle_row, predict_compactified_betti, vanishing_report, AutMode, BettiTable,
    CompactBettiTable,
};
use stratops::treegraph::{enumerate_all_trees, enumerate_stable_graphs, enumerate_trees};

use crate::ingest::{ingest_betti_into, ingest_compact_betti};
use crate::{AutPolicy, Command, Convention, OperadName, Output};

fn out(json: Value, csv: String, text: String, ok: bool) -> Output {
    Output { json, csv, text, ok }
}

fn aut_mode(a: AutPolicy) -> AutMode {
    match a {
        AutPolicy::DegreeZero => AutMode::DegreeZeroOnly,
        AutPolicy::Reject => AutMode::RejectNontrivial,
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn joined<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

/// `(p, q) → dim` as a text grid, `q` descending down the rows.
fn grid(entries: &BTreeMap<(i64, i64), u64>) -> String {
    if entries.is_empty() {
        return "(empty)\n".into();
    }
    let ps: Vec<i64> = entries.keys().map(|k| k.0).collect();
    let qs: Vec<i64> = entries.keys().map(|k| k.1).collect();
    let (p0, p1) = (*ps.iter().min().unwrap(), *ps.iter().max().unwrap());
    let (q0, q1) = (*qs.iter().min().unwrap(), *qs.iter().max().unwrap());
    let mut s = String::from("q\\p");
    for p in p0..=p1 {
        write!(s, "\t{p}").unwrap();
    }
    s.push('\n');
    for q in (q0..=q1).rev() {
        write!(s, "{q}").unwrap();
        for p in p0..=p1 {
            match entries.get(&(p, q)) {
                Some(d) => write!(s, "\t{d}").unwrap(),
                None => s.push_str("\t."),
            }
        }
        s.push('\n');
    }
    s
}

fn pq_csv(entries: &BTreeMap<(i64, i64), u64>) -> String {
    let mut s = String::from("p,q,dim\n");
    for (&(p, q), d) in entries {
        writeln!(s, "{p},{q},{d}").unwrap();
    }
    s
}

pub fn execute(cmd: &Command) -> Result<Output> {
    match cmd {
        Command::Trees { n, edges, count } => trees(*n, *edges, *count),
        Command::Graphs { g, n, max_edges, count } => graphs(*g, *n, *max_edges, *count),
        Command::Axioms { operad, file, max_arity } => axioms(*operad, file.as_deref(), *max_arity),
        Command::FreeDims { operad, d, max_arity } => free_dims(*operad, *d, *max_arity),
        Command::Cobar { cooperad, arity, convention } => cobar(cooperad, *arity, *convention),
        Command::CobarHomology { cooperad, arity } => cobar_homology(cooperad, *arity),
        Command::E1 { g, n, betti, aut } => e1(*g, *n, betti.as_deref(), *aut),
        Command::BettiPredict { n } => betti_predict(*n),
        Command::MiddleRow { n } => middle(*n),
        Command::DualE1 { g, n, compact_betti, aut } => dual(*g, *n, compact_betti.as_deref(), *aut),
        Command::CheckAinf { file, max_n } => ainf(file, *max_n),
        Command::CheckCinf { file, max_n } => cinf(file, *max_n),
        Command::Er { file, r } => match file {
            Some(f) => er(&filtered_from_file(f)?, *r),
            None => er(&toy_moduli(), *r),
        },
        Command::Dk { file, r, k, moduli } => match (moduli, file) {
            (Some(max), _) => dk_moduli(*r, *k, *max),
            (None, Some(f)) => dk(&filtered_from_file(f)?, *r, *k),
            (None, None) => dk(&toy_moduli(), *r, *k),
        },
        Command::PipelineCinf { file, max_n } => pipeline(file.as_deref(), *max_n),
    }
}

fn trees(n: usize, edges: Option<usize>, count: bool) -> Result<Output> {
    if n == 0 {
        bail!("n must be positive");
    }
    let by_edges: Vec<(usize, Vec<String>)> = match edges {
        Some(e) => vec![(e, enumerate_trees(n, e).iter().map(ToString::to_string).collect())],
        None => enumerate_all_trees(n)
            .into_iter()
            .enumerate()
            .map(|(e, ts)| (e, ts.iter().map(ToString::to_string).collect()))
            .collect(),
    };
    let total: usize = by_edges.iter().map(|(_, t)| t.len()).sum();
    let json = json!({
        "n": n,
        "counts": by_edges.iter().map(|(e, t)| json!({"edges": e, "count": t.len()})).collect::<Vec<_>>(),
        "trees": if count { Value::Null } else { json!(by_edges.iter().map(|(e, t)| json!({"edges": e, "trees": t})).collect::<Vec<_>>()) },
    });
    let (csv, text) = if count {
        let mut csv = String::from("edges,count\n");
        for (e, t) in &by_edges {
            writeln!(csv, "{e},{}", t.len()).unwrap();
        }
        let text = if edges.is_some() { total.to_string() } else { joined(&by_edges.iter().map(|(_, t)| t.len()).collect::<Vec<_>>()) };
        (csv, text)
    } else {
        let mut csv = String::from("edges,tree\n");
        let mut text = String::new();
        for (e, ts) in &by_edges {
            for t in ts {
                writeln!(csv, "{e},\"{t}\"").unwrap();
                writeln!(text, "{t}").unwrap();
            }
        }
        (csv, text)
    };
    Ok(out(json, csv, text, true))
}

fn graphs(g: u32, n: usize, max_edges: Option<usize>, count: bool) -> Result<Output> {
    let max = max_edges.unwrap_or((3 * g as usize + n).saturating_sub(3));
    let gs = enumerate_stable_graphs(g, n, max)?;
    let rows: Vec<(String, usize, usize, usize)> = gs
        .iter()
        .map(|x| (x.to_string(), x.vertex_count(), x.edge_count(), x.automorphisms().len()))
        .collect();
    let json = json!({
        "g": g, "n": n, "max_edges": max, "count": rows.len(),
        "graphs": rows.iter().map(|(s, v, e, a)| json!({"graph": s, "vertices": v, "edges": e, "automorphisms": a})).collect::<Vec<_>>(),
    });
    let mut csv = String::from("graph,vertices,edges,automorphisms\n");
    let mut text = String::new();
    for (s, v, e, a) in &rows {
        writeln!(csv, "\"{s}\",{v},{e},{a}").unwrap();
        writeln!(text, "{s}\tv={v} e={e} |Aut|={a}").unwrap();
    }
    if count {
        text = rows.len().to_string();
    }
    Ok(out(json, csv, text, true))
}

fn axiom_output<O: Operad + ?Sized>(op: &O, max_arity: usize) -> Result<Output> {
    let r = check_axioms(op, max_arity);
    let mut text = format!(
        "{} up to arity {}: {} checks, {} violations\n",
        r.operad,
        r.max_arity,
        r.checks,
        r.violations.len()
    );
    let mut csv = String::from("axiom,arities,elements,detail,defect\n");
    for v in &r.violations {
        writeln!(csv, "{:?},\"{}\",\"{}\",\"{}\",\"{}\"", v.axiom, joined(&v.arities), joined(&v.elements), v.detail, v.defect).unwrap();
    }
    for v in r.violations.iter().take(20) {
        writeln!(text, "  {:?} {:?} {:?} {}: {}", v.axiom, v.arities, v.elements, v.detail, v.defect).unwrap();
    }
    Ok(out(serde_json::to_value(&r)?, csv, text, r.passed()))
}

fn axioms(operad: Option<OperadName>, file: Option<&Path>, max: usize) -> Result<Output> {
    if let Some(f) = file {
        let t = OperadTable::from_json(&read(f)?)?;
        return axiom_output(&t, max);
    }
    match operad.context("give --operad or --file")? {
        OperadName::Comm => axiom_output(&comm_operad(max), max),
        OperadName::Assoc => axiom_output(&assoc_operad(max), max),
        OperadName::Lie => axiom_output(&lie_operad(max), max),
        OperadName::CobarLiec => {
            let k = liec(max);
            axiom_output(&cobar_operad(&k, max)?, max)
        }
        OperadName::Toy => axiom_output(toy_moduli().base(), max),
    }
}

fn free_dims(operad: OperadName, d: usize, max: usize) -> Result<Output> {
    let dims = match operad {
        OperadName::Comm => free_algebra_dims(&comm_operad(max), d, max),
        OperadName::Assoc => free_algebra_dims(&assoc_operad(max), d, max),
        OperadName::Lie => free_algebra_dims(&lie_operad(max), d, max),
        _ => bail!("free-dims supports comm, assoc and lie"),
    };
    let mut csv = String::from("n,dim\n");
    for (i, x) in dims.iter().enumerate() {
        writeln!(csv, "{},{x}", i + 1).unwrap();
    }
    let json = json!({"operad": format!("{operad:?}").to_lowercase(), "d": d, "dims": dims});
    Ok(out(json, csv, joined(&dims), true))
}

fn cobar(name: &str, arity: usize, convention: Convention) -> Result<Output> {
    let k = cooperad_by_name(name, arity)?;
    let conv = match convention {
        Convention::Edge => SignConvention::EdgeOrdering,
        Convention::Unsigned => SignConvention::Unsigned,
    };
    let c = cobar_complex_with(&*k, arity, conv)?;
    let file = c.to_file();
    let mut csv = String::from("edges,dim,homology\n");
    for (e, (d, h)) in file.dims.iter().zip(&file.homology).enumerate() {
        writeln!(csv, "{e},{d},{h}").unwrap();
    }
    let text = format!("dims by edges: {}\nhomology: {}\n", joined(&file.dims), joined(&file.homology));
    Ok(out(serde_json::to_value(&file)?, csv, text, true))
}

fn cobar_homology(name: &str, arity: usize) -> Result<Output> {
    let k = cooperad_by_name(name, arity)?;
    let c = cobar_complex_with(&*k, arity, SignConvention::EdgeOrdering)?;
    let h = c.homology();
    let total: usize = h.iter().sum();
    let mut csv = String::from("edges,dim,homology\n");
    for (e, (d, x)) in c.dims().iter().zip(&h).enumerate() {
        writeln!(csv, "{e},{d},{x}").unwrap();
    }
    let json = json!({"cooperad": name, "arity": arity, "dims": c.dims(), "homology": h, "total": total});
    let text = format!("homology by edges: {}\ntotal: {total}\n", joined(&h));
    Ok(out(json, csv, text, true))
}

fn e1(g: u32, n: usize, betti: Option<&Path>, aut: AutPolicy) -> Result<Output> {
    let mut table = BettiTable::shipped();
    if let Some(p) = betti {
        table = ingest_betti_into(table, p)?;
    }
    let t = e1_table(g, n, &table, aut_mode(aut))?;
    let v = vanishing_report(&t);
    let mut json = serde_json::to_value(&t)?;
    json["vanishing"] = serde_json::to_value(&v)?;
    let text = format!(
        "E1 for M_{{{g},{n}}} ({} strata)\n{}vanishing bounds: {}\n",
        t.strata.len(),
        grid(&t.entries),
        if v.holds() { "hold" } else { "FAIL" }
    );
    Ok(out(json, pq_csv(&t.entries), text, v.holds()))
}

fn betti_predict(n: usize) -> Result<Output> {
    let h = predict_compactified_betti(n)?;
    let palindromic = h.iter().eq(h.iter().rev());
    let mut csv = String::from("degree,dim\n");
    for (i, x) in h.iter().enumerate() {
        writeln!(csv, "{},{x}", 2 * i).unwrap();
    }
    let json = json!({"n": n, "betti": h, "palindromic": palindromic});
    Ok(out(json, csv, joined(&h), palindromic))
}

fn middle(n: usize) -> Result<Output> {
    let lie = liec(n);
    let row = middle_row(n, &lie)?;
    let mut csv = String::from("p,e1,cobar\n");
    for (p, (a, b)) in row.e1.iter().zip(&row.cobar).enumerate() {
        writeln!(csv, "{p},{a},{b}").unwrap();
    }
    let text = format!(
        "E1_(p,0), p = 0..{}: {}\ncobar Lie^c({n}):     {}\n{}\n",
        n.saturating_sub(2),
        joined(&row.e1),
        joined(&row.cobar),
        if row.equal { "equal" } else { "DIFFER" }
    );
    Ok(out(serde_json::to_value(&row)?, csv, text, row.equal))
}

fn dual(g: u32, n: usize, compact: Option<&Path>, aut: AutPolicy) -> Result<Output> {
    let c = match compact {
        Some(p) => ingest_compact_betti(p)?,
        None => CompactBettiTable::new(),
    };
    let t = dual_e1_table(g, n, &c, aut_mode(aut))?;
    let ok = t.consistent() && t.within_bounds();
    let mut json = serde_json::to_value(&t)?;
    json["consistent"] = json!(t.consistent());
    let mut text = format!("dual E1 for M_{{{g},{n}}}\n{}", grid(&t.entries));
    for (q, a, b) in &t.chi_checks {
        writeln!(text, "q={q}: Σ(-1)^p E1 = {a}, from E2 {b}{}", if a == b { "" } else { "  MISMATCH" }).unwrap();
    }
    Ok(out(json, pq_csv(&t.entries), text, ok))
}

fn family(path: &Path) -> Result<MapFamily> {
    Ok(MapFamily::from_json(&read(path)?)?)
}

fn ainf(path: &Path, max_n: usize) -> Result<Output> {
    let f = family(path)?;
    let res = check_ainf(&f, max_n);
    let mut csv = String::from("arity,inputs,defect\n");
    for r in &res {
        writeln!(csv, "{},\"{}\",\"{}\"", r.arity, joined(&r.inputs), r.defect).unwrap();
    }
    let text = if res.is_empty() {
        format!("A∞ relations hold up to n = {max_n}\n")
    } else {
        let first = &res[0];
        format!("{} failures; first at n = {} on {:?}: {}\n", res.len(), first.arity, first.inputs, first.defect)
    };
    Ok(out(json!({"max_n": max_n, "residuals": res}), csv, text, res.is_empty()))
}

fn cinf(path: &Path, max_n: usize) -> Result<Output> {
    let f = family(path)?;
    let r = check_cinf(&f, max_n);
    let mut csv = String::from("kind,arity,detail\n");
    for a in &r.ainf {
        writeln!(csv, "ainf,{},\"{:?}: {}\"", a.arity, a.inputs, a.defect).unwrap();
    }
    for s in &r.shuffles {
        writeln!(csv, "shuffle,,\"{}\"", serde_json::to_string(s)?.replace('"', "'")).unwrap();
    }
    let text = format!(
        "{} checks; {} A∞ failures; {} shuffle failures\n",
        r.checks,
        r.ainf.len(),
        r.shuffles.len()
    );
    Ok(out(serde_json::to_value(&r)?, csv, text, r.passed()))
}

fn filtered_from_file(path: &Path) -> Result<FilteredOperad<OperadTable>> {
    let t = OperadTable::from_json(&read(path)?)?;
    Ok(FilteredOperad::<OperadTable>::from_table(t)?)
}

fn er<O: Operad>(f: &FilteredOperad<O>, r: usize) -> Result<Output> {
    let e = er_term(f, r)?;
    let squares = e.differential_squares_to_zero();
    let mut arities = Vec::new();
    let mut csv = String::from("arity,p,q,dim\n");
    let mut text = format!("E^{r} of {}\n", f.base().name());
    for n in 1..=f.base().max_arity() {
        let dims: BTreeMap<(i64, i64), u64> = e.dims(n).into_iter().map(|(k, v)| (k, v as u64)).collect();
        for (&(p, q), d) in &dims {
            writeln!(csv, "{n},{p},{q},{d}").unwrap();
        }
        writeln!(text, "arity {n}:\n{}", grid(&dims)).unwrap();
        arities.push(json!({
            "arity": n,
            "pieces": dims.iter().map(|(&(p, q), d)| json!({"p": p, "q": q, "dim": d})).collect::<Vec<_>>(),
        }));
    }
    writeln!(text, "∂^r ∘ ∂^r = 0: {squares}").unwrap();
    Ok(out(json!({"r": r, "arities": arities, "differential_squares_to_zero": squares}), csv, text, squares))
}

fn dk<O: Operad>(f: &FilteredOperad<O>, r: usize, k: i64) -> Result<Output> {
    let e = er_term(f, r)?;
    let d = suboperad_dk(&e, k);
    slices_output(serde_json::to_value(&d)?, &d.slices, d.certificate.holds(), d.certificate.pairs_checked)
}

fn dk_moduli(r: usize, k: i64, max: usize) -> Result<Output> {
    if r != 1 {
        bail!("the moduli tables are first pages: use --r 1");
    }
    let s = dk_on_moduli(k, max);
    slices_output(json!({"r": 1, "k": k, "slices": s}), &s, true, 0)
}

fn slices_output(json: Value, slices: &[stratops::filtration::DkSlice], ok: bool, pairs: usize) -> Result<Output> {
    let mut csv = String::from("arity,p,q,dim\n");
    let mut text = String::new();
    for s in slices {
        writeln!(csv, "{},{},{},{}", s.arity, s.p, s.q, s.dim).unwrap();
        writeln!(text, "arity {}: E_({},{}) dim {}", s.arity, s.p, s.q, s.dim).unwrap();
    }
    if slices.is_empty() {
        text.push_str("(empty)\n");
    }
    if pairs > 0 {
        writeln!(text, "closure certificate: {} ({pairs} composites)", if ok { "holds" } else { "FAILS" }).unwrap();
    }
    Ok(out(json, csv, text, ok))
}

/// `⟨1, x, y⟩`, `|x| = 1`, `Q x = y`, unit 1, other products zero.
fn toy_cdga() -> Result<MapFamily> {
    let mut f = MapFamily::new(
        stratops::operads::GradedSpace::new(vec![("1".into(), 0), ("x".into(), 1), ("y".into(), 0)]),
        SparseMatrix::from_triples(3, 3, vec![(2, 1, q(1))])?,
    )?;
    let mut m2 = stratops::hoalg::Multilinear::new(2);
    for (i, j, o) in [(0, 0, 0), (0, 1, 1), (1, 0, 1), (0, 2, 2), (2, 0, 2)] {
        m2.set(vec![i, j], SparseVec::unit(o));
    }
    f.set_map(m2)?;
    Ok(f)
}

fn pipeline(file: Option<&Path>, max_n: usize) -> Result<Output> {
    let input = match file {
        Some(p) => family(p)?,
        None => toy_cdga()?,
    };
    let end = endomorphism_operad_dg(input.space().clone(), input.q().clone(), 3, DEFAULT_END_CAP)?;
    let mut m2 = SparseVec::new();
    if let Some(m) = input.map(2) {
        for (ins, v) in &m.entries {
            for (o, c) in v.iter() {
                m2.add_at(end.encode(o, ins), c);
            }
        }
    }
    let a = toy_moduli_algebra(end, m2)?;
    let lie = liec(max_n.max(2));
    let r = induce_cinf(&toy_moduli(), &a, max_n, &lie)?;
    let family_json: Value = serde_json::from_str(&r.family.to_json())?;
    let json = json!({
        "family": family_json,
        "identification": r.identification,
        "extraction_consistent": r.extraction_consistent,
        "ainf": r.ainf,
        "cinf": r.cinf,
        "passed": r.passed(),
    });
    let mut text = String::new();
    for (n, ours, row) in &r.identification {
        writeln!(text, "arity {n}: E1_(p,0) {} = middle row {}", joined(ours), joined(row)).unwrap();
    }
    writeln!(text, "operations: m_{}", joined(&r.family.arities())).unwrap();
    writeln!(text, "A∞: {} failures, C∞ shuffles: {} failures", r.ainf.len(), r.cinf.shuffles.len()).unwrap();
    writeln!(text, "{}", if r.passed() { "verified C∞ family" } else { "FAILED" }).unwrap();
    let mut csv = String::from("arity,inputs,output,coeff\n");
    for n in r.family.arities() {
        for (ins, v) in &r.family.map(n).expect("listed arity").entries {
            for (o, c) in v.iter() {
                writeln!(csv, "{n},\"{}\",{o},{}", joined(ins), format_rational(c)).unwrap();
            }
        }
    }
    Ok(out(json, csv, text, r.passed()))
}
