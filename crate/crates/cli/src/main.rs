//! `wlsa`: command-line access to the relaxations, refinement and
//! counting routines. Every run prints one JSON document on stdout.

use std::collections::BTreeMap;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use wlsa_core::equitable::{
    common_equitable_partition, fractional_iso_witness, verify_equitable, CommonEquitableWitness, Partition,
};
use wlsa_core::format::{parse_document, serialize_document, serialize_structure};
use wlsa_core::ftrees::{enumerate_ftrees, ftree_canonical_form};
use wlsa_core::homcount::{count_hom_bruteforce, count_hom_ftree, exists_hom, find_isomorphism, is_ftree};
use wlsa_core::lp::{lp_feasibility, Feasibility, LinearSystem};
use wlsa_core::matrix::RatMatrix;
use wlsa_core::polymorph::symmetric_polymorphism;
use wlsa_core::refine::joint_refine;
use wlsa_core::relax::{
    build_base_polytope, build_blp_system, build_frac_hom_system, build_frac_iso_system, sa_rank, solve_sa,
    FracHomVariant,
};
use wlsa_core::stark::{star_structure, StarSignature};
use wlsa_core::treedec::{exact_tree_decomposition, ftree_from_tw_structure};
use wlsa_core::witness::{decompose_sa1, verify_chain, ChainStep, Evidence};
use wlsa_core::{Error, Limits, Signature, Structure};

#[derive(Parser)]
#[command(name = "wlsa", version, about = "Sherali-Adams levels, colour refinement and fractional isomorphism")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Largest LP accepted, in variables.
    #[arg(long, global = true, env = "WLSA_MAX_VARS", default_value_t = 200_000)]
    max_vars: usize,
    /// Largest common denominator accepted by `decompose`.
    #[arg(long, global = true, env = "WLSA_MAX_M", default_value_t = 4)]
    max_m: usize,
    /// Largest derived universe (stars, powers).
    #[arg(long, global = true, env = "WLSA_MAX_UNIVERSE", default_value_t = 20_000)]
    max_universe: usize,
    /// Worker threads; 1 disables parallelism. Defaults to the number of CPUs.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Add wall-clock timing to the report (makes output run-dependent).
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Colour refinement of one structure, or joint refinement of two.
    Refine {
        a: PathBuf,
        #[arg(long)]
        pair: Option<PathBuf>,
    },
    /// Common equitable partition and the matching doubly stochastic matrices.
    Equitable { a: PathBuf, b: PathBuf },
    /// Feasibility of the level-k Sherali-Adams system.
    Sa {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        k: u32,
        a: PathBuf,
        b: PathBuf,
    },
    /// Least infeasible level up to `--max-k`.
    Rank {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        max_k: u32,
        a: PathBuf,
        b: PathBuf,
    },
    /// Fractional isomorphism LP.
    Fraciso { a: PathBuf, b: PathBuf },
    /// Fractional homomorphism LP.
    Frachom {
        a: PathBuf,
        b: PathBuf,
        /// Equality variant, for structures without repeated arguments.
        #[arg(long)]
        equality: bool,
    },
    /// Basic LP relaxation, or the base polytope.
    Blp {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        base_polytope: bool,
    },
    /// Builds the k-star of a structure.
    Stark {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        k: u32,
        a: PathBuf,
        /// Write the star in the structure format to this file.
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
    /// Exact treewidth with a normalized decomposition.
    Treewidth {
        q: PathBuf,
        /// Also translate into an ftree over the k-star signature (needs width < k).
        #[arg(long)]
        star_k: Option<usize>,
    },
    /// Number of homomorphisms (tree DP for ftrees, enumeration otherwise).
    Homcount { t: PathBuf, a: PathBuf },
    /// Finds a homomorphism, or an isomorphism with `--iso`.
    Homsearch {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        iso: bool,
    },
    /// Solves SA^1 and turns the point into a verified chain A -> X1 =WL1 X2 -> B.
    Decompose { a: PathBuf, b: PathBuf },
    /// Re-verifies a chain produced by `decompose`.
    VerifyChain { chain: PathBuf },
    /// Symmetric polymorphism of the given arity.
    Poly {
        b: PathBuf,
        #[arg(long)]
        arity: usize,
    },
    /// Enumerates ftrees up to isomorphism.
    Ftrees {
        /// Symbols as `NAME/ARITY`, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "E/2")]
        symbols: Vec<String>,
        #[arg(long, default_value_t = 3)]
        max_constraints: usize,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Refine { .. } => "refine",
            Command::Equitable { .. } => "equitable",
            Command::Sa { .. } => "sa",
            Command::Rank { .. } => "rank",
            Command::Fraciso { .. } => "fraciso",
            Command::Frachom { .. } => "frachom",
            Command::Blp { .. } => "blp",
            Command::Stark { .. } => "stark",
            Command::Treewidth { .. } => "treewidth",
            Command::Homcount { .. } => "homcount",
            Command::Homsearch { .. } => "homsearch",
            Command::Decompose { .. } => "decompose",
            Command::VerifyChain { .. } => "verify-chain",
            Command::Poly { .. } => "poly",
            Command::Ftrees { .. } => "ftrees",
        }
    }
}

/// Files read during a run, with their digests, plus size counters.
#[derive(Default)]
struct Run {
    inputs: Vec<Value>,
    counters: Map<String, Value>,
}

impl Run {
    fn read(&mut self, path: &Path) -> anyhow::Result<String> {
        let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        let digest = Sha256::digest(&bytes);
        let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
        self.inputs.push(json!({ "path": path.display().to_string(), "sha256": hex }));
        String::from_utf8(bytes).with_context(|| format!("{} is not UTF-8", path.display()))
    }

    fn structure(&mut self, path: &Path) -> anyhow::Result<Structure> {
        let text = self.read(path)?;
        let mut all = parse_document(&text).with_context(|| format!("parsing {}", path.display()))?;
        match all.len() {
            1 => Ok(all.pop().expect("one structure")),
            n => bail!("{}: expected one structure, found {n}", path.display()),
        }
    }

    /// Two structures re-expressed over one merged signature.
    fn pair(&mut self, a: &Path, b: &Path) -> anyhow::Result<(Structure, Structure)> {
        let (a, b) = (self.structure(a)?, self.structure(b)?);
        merged(a, b)
    }

    fn count(&mut self, key: &str, v: impl Into<Value>) {
        self.counters.insert(key.into(), v.into());
    }

    fn lp(&mut self, sys: &LinearSystem) {
        self.count("lp_variables", sys.num_vars());
        self.count("lp_rows", sys.num_rows());
    }
}

fn limits(g: &Global) -> Limits {
    Limits { max_vars: g.max_vars, max_m: g.max_m, max_universe: g.max_universe }
}

fn element_map(a: &Structure, b: &Structure, h: &[usize]) -> Value {
    let mut m = Map::new();
    for (x, &y) in h.iter().enumerate() {
        m.insert(a.element_name(x).into(), b.element_name(y).into());
    }
    Value::Object(m)
}

fn solution_json(sys: &LinearSystem, point: &[wlsa_core::Rat]) -> Value {
    let mut m = Map::new();
    for (v, x) in sys.vars().iter().zip(point) {
        if !x.is_zero() {
            m.insert(v.name.clone(), x.to_string().into());
        }
    }
    Value::Object(m)
}

fn feasibility_json(sys: &LinearSystem, f: &Feasibility) -> Value {
    match f {
        Feasibility::Feasible(x) => json!({ "feasible": true, "solution": solution_json(sys, x) }),
        Feasibility::Infeasible(c) => {
            let terms = |list: &[(usize, wlsa_core::Rat)], by_var: bool| -> Value {
                list.iter()
                    .map(|(i, v)| {
                        let key = if by_var { json!(sys.vars()[*i].name) } else { json!(i) };
                        json!({ "index": key, "multiplier": v.to_string() })
                    })
                    .collect()
            };
            json!({
                "feasible": false,
                "certificate": {
                    "rows": terms(&c.rows, false),
                    "lower_bounds": terms(&c.lower, true),
                    "upper_bounds": terms(&c.upper, true),
                    "verified": c.verify(sys),
                }
            })
        }
    }
}

fn solve(run: &mut Run, sys: &LinearSystem) -> anyhow::Result<Value> {
    run.lp(sys);
    Ok(feasibility_json(sys, &lp_feasibility(sys)?))
}

fn matrix_json(m: &RatMatrix, rows: &[String], cols: &[String]) -> Value {
    m.entries()
        .filter(|(_, _, v)| !v.is_zero())
        .map(|(r, c, v)| json!([rows[r], cols[c], v.to_string()]))
        .collect()
}

fn constraint_labels(s: &Structure) -> Vec<String> {
    (0..s.num_constraints()).map(|c| s.constraint_label(c)).collect()
}

fn partition_json(p: &Partition) -> Value {
    json!({ "elements": p.element_class, "constraints": p.constraint_class })
}

fn partition_from_json(v: &Value) -> anyhow::Result<Partition> {
    let list = |key: &str| -> anyhow::Result<Vec<usize>> {
        v.get(key)
            .and_then(Value::as_array)
            .ok_or_else(|| anyhow!("partition without `{key}`"))?
            .iter()
            .map(|x| x.as_u64().map(|x| x as usize).ok_or_else(|| anyhow!("bad class id in `{key}`")))
            .collect()
    };
    Ok(Partition::new(list("elements")?, list("constraints")?))
}

fn witness_json(a: &Structure, b: &Structure, w: &CommonEquitableWitness) -> Value {
    let (x, y) = fractional_iso_witness(w);
    json!({
        "partition_a": partition_json(&w.partition_a),
        "partition_b": partition_json(&w.partition_b),
        "element_class_sizes": w.element_sizes,
        "constraint_class_sizes": w.constraint_sizes,
        "x": matrix_json(&x, b.elements(), a.elements()),
        "y": matrix_json(&y, &constraint_labels(b), &constraint_labels(a)),
    })
}

fn chain_json(chain: &[ChainStep]) -> anyhow::Result<Value> {
    let steps: Vec<Value> = chain
        .iter()
        .map(|s| {
            let evidence = match &s.evidence {
                Evidence::Hom(h) => json!({ "hom": element_map(&s.from, &s.to, h) }),
                Evidence::Wl1(w) => json!({ "wl1": {
                    "partition_a": partition_json(&w.partition_a),
                    "partition_b": partition_json(&w.partition_b),
                }}),
            };
            Ok(json!({
                "from": serialize_structure(&s.from),
                "to": serialize_structure(&s.to),
                "evidence": evidence,
            }))
        })
        .collect::<anyhow::Result<_>>()?;
    Ok(Value::Array(steps))
}

fn parse_one(text: &str) -> anyhow::Result<Structure> {
    let mut all = parse_document(text)?;
    if all.len() != 1 {
        bail!("each chain endpoint must hold one structure");
    }
    Ok(all.pop().expect("one structure"))
}

/// Rebuilds a chain from JSON. Equitable evidence only carries partitions;
/// parameters and sizes are recomputed here, so nothing is taken on trust.
fn chain_from_json(v: &Value) -> anyhow::Result<Option<Vec<ChainStep>>> {
    let steps = v
        .pointer("/result/chain")
        .or_else(|| v.get("chain"))
        .unwrap_or(v)
        .as_array()
        .ok_or_else(|| anyhow!("expected an array of chain steps"))?;
    let mut out = Vec::with_capacity(steps.len());
    for (i, s) in steps.iter().enumerate() {
        let text = |key: &str| {
            s.get(key).and_then(Value::as_str).ok_or_else(|| anyhow!("step {i}: missing `{key}`"))
        };
        let from = parse_one(text("from")?)?;
        let to = parse_one(text("to")?)?;
        let ev = s.get("evidence").ok_or_else(|| anyhow!("step {i}: missing evidence"))?;
        let evidence = if let Some(h) = ev.get("hom").and_then(Value::as_object) {
            let mut map = Vec::with_capacity(from.len());
            for e in from.elements() {
                let img = h.get(e).and_then(Value::as_str).ok_or_else(|| anyhow!("step {i}: `{e}` unmapped"))?;
                map.push(to.element_index(img).ok_or_else(|| anyhow!("step {i}: unknown element `{img}`"))?);
            }
            Evidence::Hom(map)
        } else if let Some(w) = ev.get("wl1") {
            let pa = partition_from_json(w.get("partition_a").ok_or_else(|| anyhow!("step {i}: missing partition_a"))?)?;
            let pb = partition_from_json(w.get("partition_b").ok_or_else(|| anyhow!("step {i}: missing partition_b"))?)?;
            if pa.element_class.len() != from.len()
                || pa.constraint_class.len() != from.num_constraints()
                || pb.element_class.len() != to.len()
                || pb.constraint_class.len() != to.num_constraints()
            {
                return Ok(None);
            }
            let (Ok(ta), Ok(_)) = (verify_equitable(&from, &pa)?, verify_equitable(&to, &pb)?) else {
                return Ok(None);
            };
            Evidence::Wl1(CommonEquitableWitness {
                element_sizes: pa.element_class_sizes(),
                constraint_sizes: pa.constraint_class_sizes(),
                partition_a: pa,
                partition_b: pb,
                parameters: ta,
            })
        } else {
            bail!("step {i}: unknown evidence");
        };
        out.push(ChainStep { from, to, evidence });
    }
    Ok(Some(out))
}

fn parse_symbols(list: &[String]) -> anyhow::Result<Signature> {
    let mut pairs = Vec::new();
    for s in list {
        let (name, arity) = s.split_once('/').ok_or_else(|| anyhow!("symbol `{s}` is not NAME/ARITY"))?;
        let arity: usize = arity.parse().with_context(|| format!("arity of `{name}`"))?;
        pairs.push((name.to_string(), arity));
    }
    Ok(Signature::new(pairs)?)
}

fn execute(cmd: &Command, g: &Global, run: &mut Run) -> anyhow::Result<Value> {
    let lim = limits(g);
    Ok(match cmd {
        Command::Refine { a, pair } => {
            let a = run.structure(a)?;
            match pair {
                None => {
                    let col = joint_refine(std::slice::from_ref(&a))?.remove(0);
                    let classes: std::collections::BTreeSet<_> = col.element_colour.iter().collect();
                    json!({
                        "rounds": col.rounds,
                        "element_classes": classes.len(),
                        "elements": element_colours(&a, &col.element_colour),
                        "constraints": constraint_colours(&a, &col.constraint_colour),
                    })
                }
                Some(b) => {
                    let b = run.structure(b)?;
                    let (a, b) = merged(a, b)?;
                    let cols = joint_refine(&[a.clone(), b.clone()])?;
                    let sorted = |v: &[u32]| {
                        let mut v = v.to_vec();
                        v.sort_unstable();
                        v
                    };
                    let equivalent = sorted(&cols[0].element_colour) == sorted(&cols[1].element_colour)
                        && sorted(&cols[0].constraint_colour) == sorted(&cols[1].constraint_colour);
                    json!({
                        "equivalent": equivalent,
                        "rounds": cols[0].rounds,
                        "a": { "elements": element_colours(&a, &cols[0].element_colour) },
                        "b": { "elements": element_colours(&b, &cols[1].element_colour) },
                    })
                }
            }
        }
        Command::Equitable { a, b } => {
            let (a, b) = run.pair(a, b)?;
            match common_equitable_partition(&a, &b)? {
                Some(w) => json!({ "common": true, "witness": witness_json(&a, &b, &w) }),
                None => json!({ "common": false }),
            }
        }
        Command::Sa { k, a, b } => {
            let (a, b) = run.pair(a, b)?;
            let (sa, f) = solve_sa(&a, &b, *k as usize, &lim)?;
            run.lp(&sa.system);
            let mut v = feasibility_json(&sa.system, &f);
            v["k"] = json!(k);
            v
        }
        Command::Rank { max_k, a, b } => {
            let (a, b) = run.pair(a, b)?;
            json!({ "max_k": max_k, "rank": sa_rank(&a, &b, *max_k as usize, &lim)? })
        }
        Command::Fraciso { a, b } => {
            let (a, b) = run.pair(a, b)?;
            match build_frac_iso_system(&a, &b, &lim) {
                Err(Error::InfeasibleBySize(why)) => json!({ "feasible": false, "reason": why }),
                Err(e) => return Err(e.into()),
                Ok(ms) => {
                    run.lp(&ms.system);
                    let f = lp_feasibility(&ms.system)?;
                    let mut v = feasibility_json(&ms.system, &f);
                    if let Some(p) = f.point() {
                        let (x, y) = ms.matrices(p);
                        v["x"] = matrix_json(&x, b.elements(), a.elements());
                        v["y"] = matrix_json(&y, &constraint_labels(&b), &constraint_labels(&a));
                        v.as_object_mut().expect("object").remove("solution");
                    }
                    v
                }
            }
        }
        Command::Frachom { a, b, equality } => {
            let (a, b) = run.pair(a, b)?;
            let variant = if *equality { FracHomVariant::LoopFreeEquality } else { FracHomVariant::Inequality };
            let ms = build_frac_hom_system(&a, &b, variant, &lim)?;
            run.lp(&ms.system);
            let f = lp_feasibility(&ms.system)?;
            let mut v = feasibility_json(&ms.system, &f);
            if let Some(p) = f.point() {
                let (x, y) = ms.matrices(p);
                v["x"] = matrix_json(&x, b.elements(), a.elements());
                v["y"] = matrix_json(&y, &constraint_labels(&b), &constraint_labels(&a));
                v.as_object_mut().expect("object").remove("solution");
            }
            v
        }
        Command::Blp { a, b, base_polytope } => {
            let (a, b) = run.pair(a, b)?;
            let sys = if *base_polytope { build_base_polytope(&a, &b, &lim)? } else { build_blp_system(&a, &b, &lim)? };
            let mut v = solve(run, &sys.system)?;
            v["system"] = json!(if *base_polytope { "base-polytope" } else { "blp" });
            v
        }
        Command::Stark { k, a, output } => {
            let a = run.structure(a)?;
            let s = star_structure(&a, *k as usize, &lim)?;
            let text = serialize_structure(&s);
            let mut v = json!({
                "k": k,
                "elements": s.len(),
                "constraints": s.num_constraints(),
                "symbols": s.signature().len(),
            });
            match output {
                Some(p) => {
                    std::fs::write(p, &text).with_context(|| format!("writing {}", p.display()))?;
                    v["output"] = json!(p.display().to_string());
                }
                None => v["structure"] = json!(text),
            }
            v
        }
        Command::Treewidth { q, star_k } => {
            let q = run.structure(q)?;
            let td = exact_tree_decomposition(&q, q.len())?.ok_or_else(|| anyhow!("no decomposition found"))?;
            let bags: Vec<Vec<&str>> =
                td.bags.iter().map(|b| b.iter().map(|&e| q.element_name(e)).collect()).collect();
            let mut v = json!({ "width": td.width(), "bags": bags, "edges": td.edges });
            if let Some(k) = star_k {
                let td = exact_tree_decomposition(&q, k.saturating_sub(1))?
                    .ok_or_else(|| anyhow!("treewidth {} is not below {k}", td.width()))?;
                let star = StarSignature::new(q.signature_arc().clone(), *k)?;
                let t = ftree_from_tw_structure(&q, &td, &star)?;
                v["ftree"] = json!(serialize_structure(&t));
            }
            v
        }
        Command::Homcount { t, a } => {
            let (t, a) = run.pair(t, a)?;
            if is_ftree(&t) {
                json!({ "method": "tree-dp", "count": count_hom_ftree(&t, &a)?.to_string() })
            } else {
                json!({ "method": "enumeration", "count": count_hom_bruteforce(&t, &a)?.to_string() })
            }
        }
        Command::Homsearch { a, b, iso } => {
            let (a, b) = run.pair(a, b)?;
            let found = if *iso { find_isomorphism(&a, &b)? } else { exists_hom(&a, &b)? };
            let key = if *iso { "isomorphism" } else { "homomorphism" };
            json!({ key: found.map(|h| element_map(&a, &b, &h)) })
        }
        Command::Decompose { a, b } => {
            let (a, b) = run.pair(a, b)?;
            let (sa, f) = solve_sa(&a, &b, 1, &lim)?;
            run.lp(&sa.system);
            match f.point() {
                None => json!({ "feasible": false }),
                Some(p) => {
                    let d = decompose_sa1(&a, &b, p, &lim)?;
                    run.count("x_elements", d.x1.len());
                    run.count("x_constraints", d.x1.num_constraints());
                    let chain = d.chain(&a, &b);
                    json!({
                        "feasible": true,
                        "m": d.m,
                        "verified": verify_chain(&chain)?,
                        "chain": chain_json(&chain)?,
                    })
                }
            }
        }
        Command::VerifyChain { chain } => {
            let text = run.read(chain)?;
            let v: Value = serde_json::from_str(&text).context("chain file is not JSON")?;
            match chain_from_json(&v)? {
                None => json!({ "valid": false, "steps": Value::Null }),
                Some(steps) => {
                    let ok = match verify_chain(&steps) {
                        Ok(ok) => ok,
                        Err(Error::Invalid(_)) => false,
                        Err(e) => return Err(e.into()),
                    };
                    json!({ "valid": ok, "steps": steps.len() })
                }
            }
        }
        Command::Poly { b, arity } => {
            let b = run.structure(b)?;
            match symmetric_polymorphism(&b, *arity, &lim)? {
                None => json!({ "exists": false }),
                Some(op) => {
                    let table: Vec<Value> = op
                        .table
                        .iter()
                        .map(|(args, &v)| {
                            let args: Vec<&str> = args.iter().map(|&x| b.element_name(x)).collect();
                            json!({ "args": args, "value": b.element_name(v) })
                        })
                        .collect();
                    json!({ "exists": true, "arity": arity, "table": table })
                }
            }
        }
        Command::Ftrees { symbols, max_constraints } => {
            let sig = Arc::new(parse_symbols(symbols)?);
            let trees = enumerate_ftrees(&sig, *max_constraints)?;
            let list: Vec<Value> = trees
                .iter()
                .map(|t| {
                    Ok(json!({
                        "name": t.name(),
                        "constraints": t.num_constraints(),
                        "canonical": ftree_canonical_form(t)?,
                    }))
                })
                .collect::<anyhow::Result<_>>()?;
            json!({ "count": trees.len(), "ftrees": list, "document": serialize_document(&trees)? })
        }
    })
}

fn merged(a: Structure, b: Structure) -> anyhow::Result<(Structure, Structure)> {
    if a.same_signature(&b) {
        return Ok((a, b));
    }
    let sig = Arc::new(a.signature().merge(b.signature())?);
    Ok((a.with_signature(sig.clone())?, b.with_signature(sig)?))
}

fn element_colours(s: &Structure, col: &[u32]) -> Value {
    let mut m = Map::new();
    for (e, c) in col.iter().enumerate() {
        m.insert(s.element_name(e).into(), json!(c));
    }
    Value::Object(m)
}

fn constraint_colours(s: &Structure, col: &[u32]) -> Value {
    let m: BTreeMap<String, u32> = (0..s.num_constraints()).map(|c| (s.constraint_label(c), col[c])).collect();
    json!(m)
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::ResourceLimit(_)) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    if let Some(n) = cli.global.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(1);
        }
        wlsa_core::par::set_parallel(n > 1);
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            log::warn!("could not size the thread pool: {e}");
        }
    }
    let start = Instant::now();
    let mut run = Run::default();
    match execute(&cli.command, &cli.global, &mut run) {
        Ok(result) => {
            let mut report = json!({
                "subcommand": cli.command.name(),
                "inputs": run.inputs,
                "result": result,
                "counters": run.counters,
            });
            if cli.global.timing {
                report["timing_ms"] = json!(start.elapsed().as_secs_f64() * 1000.0);
            }
            let text = serde_json::to_string_pretty(&report).expect("serializable");
            // A closed pipe downstream is not an error of ours.
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
