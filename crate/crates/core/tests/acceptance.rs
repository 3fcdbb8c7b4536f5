//! Acceptance checks. Run with `cargo test --test acceptance`; prints one
//! PASS/FAIL line per criterion and exits non-zero if any fails.

mod common;

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fs;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;
use orgprofile::address::{normalize_address, parse_address};
use orgprofile::normalize::{canonicalize, dedupe_units, share_percent, AliasTable, CanonicalUnit, TypeRuleSet, UnitType};
use orgprofile::orgnet::{apply_threshold, betweenness, OrgNetwork, Threshold};
use orgprofile::pipeline::{RecordCounts, RunReport};
use orgprofile::profiles::{gini_of_counts, indicator_table, TableOptions};

const GINI_TOL: f64 = 1e-10;
const GINI_EXACT_TOL: f64 = 1e-12;
const BETWEENNESS_TOL: f64 = 1e-9;
const GINI_TIME_LIMIT: Duration = Duration::from_secs(5);
const BETWEENNESS_TIME_LIMIT: Duration = Duration::from_secs(60);
const RUN_TIME_LIMIT: Duration = Duration::from_secs(2);

type Outcome = Result<String, String>;
type Check = (&'static str, fn() -> Outcome);

fn main() {
    let checks: [Check; 7] = [
        ("gini oracle equivalence", gini_oracle),
        ("gini boundaries", gini_boundaries),
        ("betweenness brute force", betweenness_brute_force),
        ("parser golden suite", parser_golden),
        ("share computation", shares),
        ("end-to-end fixture", end_to_end),
        ("threshold semantics", thresholds),
    ];
    let mut failed = 0;
    for (name, check) in checks {
        match check() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name}: {detail}");
            }
        }
    }
    println!("{} passed, {failed} failed", checks.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

// Mean absolute difference over ordered pairs, scaled so one nonzero
// entry gives 1.
fn pairwise_gini(x: &[u64]) -> f64 {
    let n = x.len() as f64;
    let total: f64 = x.iter().map(|&v| v as f64).sum();
    let mut diff = 0.0;
    for &a in x {
        for &b in x {
            diff += (a as f64 - b as f64).abs();
        }
    }
    diff / (2.0 * (n - 1.0) * total)
}

fn gini_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6a1e);
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut tested = 0;
    while tested < 2000 {
        let n = rng.gen_range(2..=60);
        let x: Vec<u64> = (0..n).map(|_| rng.gen_range(0..=50)).collect();
        if x.iter().all(|&v| v == 0) {
            continue;
        }
        let g = gini_of_counts(&x).map_err(|e| format!("{x:?}: {e}"))?;
        let diff = (g - pairwise_gini(&x)).abs();
        ensure(diff <= GINI_TOL, || format!("{x:?}: {g} vs oracle {}", pairwise_gini(&x)))?;
        worst = worst.max(diff);
        tested += 1;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < GINI_TIME_LIMIT, || format!("took {elapsed:?}"))?;
    Ok(format!(
        "{tested} vectors, max |diff| {worst:.1e} (tol {GINI_TOL:.0e}), {} ms (limit 5 s)",
        elapsed.as_millis()
    ))
}

fn gini_boundaries() -> Outcome {
    for n in [2usize, 5, 37, 250] {
        for pos in [0, n / 2, n - 1] {
            let mut x = vec![0u64; n];
            x[pos] = 7;
            let g = gini_of_counts(&x).map_err(|e| e.to_string())?;
            ensure((g - 1.0).abs() <= GINI_EXACT_TOL, || format!("single nonzero, N={n}: {g}"))?;
        }
        for v in [1u64, 13] {
            let g = gini_of_counts(&vec![v; n]).map_err(|e| e.to_string())?;
            ensure(g.abs() <= GINI_EXACT_TOL, || format!("uniform, N={n}: {g}"))?;
        }
    }
    Ok(format!("N in {{2, 5, 37, 250}}: single nonzero 1.0, uniform 0.0 (tol {GINI_EXACT_TOL:.0e})"))
}

fn node_name(i: usize) -> String {
    format!("N{i}")
}

fn network(n: usize, edges: &[(usize, usize, u64)]) -> OrgNetwork {
    let nodes = (0..n).map(|i| {
        (
            CanonicalUnit {
                name: node_name(i),
                unit_type: UnitType::Department,
            },
            100,
        )
    });
    let edges = edges.iter().map(|&(a, b, w)| (node_name(a), node_name(b), w));
    OrgNetwork::from_parts(nodes, edges).expect("valid test network")
}

fn adjacency(n: usize, edges: &[(usize, usize, u64)]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b, _) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    adj
}

fn is_connected(adj: &[Vec<usize>]) -> bool {
    let mut seen = vec![false; adj.len()];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(u) = stack.pop() {
        for &w in &adj[u] {
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen.iter().all(|&s| s)
}

fn hop_distances(adj: &[Vec<usize>], s: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; adj.len()];
    dist[s] = 0;
    let mut queue = VecDeque::from([s]);
    while let Some(u) = queue.pop_front() {
        for &w in &adj[u] {
            if dist[w] == usize::MAX {
                dist[w] = dist[u] + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

fn collect_paths(adj: &[Vec<usize>], dist: &[usize], t: usize, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    let u = *path.last().unwrap();
    if u == t {
        out.push(path.clone());
        return;
    }
    for &w in &adj[u] {
        if dist[w] == dist[u] + 1 && dist[w] <= dist[t] {
            path.push(w);
            collect_paths(adj, dist, t, path, out);
            path.pop();
        }
    }
}

// Enumerate every shortest path of every unordered pair and credit each
// interior node with its share of the pair's paths.
fn brute_force_betweenness(n: usize, edges: &[(usize, usize, u64)]) -> Vec<f64> {
    let adj = adjacency(n, edges);
    let mut score = vec![0.0; n];
    for s in 0..n {
        let dist = hop_distances(&adj, s);
        for t in s + 1..n {
            if dist[t] == usize::MAX {
                continue;
            }
            let mut paths = Vec::new();
            collect_paths(&adj, &dist, t, &mut vec![s], &mut paths);
            let total = paths.len() as f64;
            for path in &paths {
                for &v in &path[1..path.len() - 1] {
                    score[v] += 1.0 / total;
                }
            }
        }
    }
    score
}

fn compare_betweenness(n: usize, edges: &[(usize, usize, u64)]) -> Result<f64, String> {
    let got = betweenness(&network(n, edges));
    let want = brute_force_betweenness(n, edges);
    let mut worst = 0.0f64;
    for (i, w) in want.iter().enumerate() {
        let g = got[&node_name(i)];
        let diff = (g - w).abs();
        ensure(diff <= BETWEENNESS_TOL, || format!("n={n} edges={edges:?} node {i}: {g} vs {w}"))?;
        worst = worst.max(diff);
    }
    Ok(worst)
}

fn betweenness_brute_force() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut exhaustive = 0;
    for n in 1..=6usize {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        for mask in 0u32..1 << pairs.len() {
            let edges: Vec<(usize, usize, u64)> = pairs
                .iter()
                .enumerate()
                .filter(|(k, _)| mask >> k & 1 == 1)
                .map(|(_, &(a, b))| (a, b, 1))
                .collect();
            if !is_connected(&adjacency(n, &edges)) {
                continue;
            }
            worst = worst.max(compare_betweenness(n, &edges)?);
            exhaustive += 1;
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0xb7a0);
    let mut random = 0;
    while random < 100 {
        let p = rng.gen_range(0.2..0.7);
        let mut edges = Vec::new();
        for a in 0..8 {
            for b in a + 1..8 {
                if rng.gen_bool(p) {
                    edges.push((a, b, rng.gen_range(1..=20)));
                }
            }
        }
        if !is_connected(&adjacency(8, &edges)) {
            continue;
        }
        worst = worst.max(compare_betweenness(8, &edges)?);
        random += 1;
    }

    let path = betweenness(&network(3, &[(0, 1, 1), (1, 2, 1)]));
    let star = betweenness(&network(4, &[(0, 1, 1), (0, 2, 1), (0, 3, 1)]));
    let cycle = betweenness(&network(4, &[(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 0, 1)]));
    ensure(path["N1"] == 1.0 && path["N0"] == 0.0, || format!("path: {path:?}"))?;
    ensure(star["N0"] == 3.0 && star["N1"] == 0.0, || format!("star: {star:?}"))?;
    ensure(cycle.values().all(|&b| b == 0.5), || format!("cycle: {cycle:?}"))?;

    let elapsed = start.elapsed();
    ensure(elapsed < BETWEENNESS_TIME_LIMIT, || format!("took {elapsed:?}"))?;
    Ok(format!(
        "{exhaustive} connected graphs on <=6 nodes + {random} random 8-node graphs, max |diff| {worst:.1e} \
         (tol {BETWEENNESS_TOL:.0e}); path/star/cycle exact; {} ms (limit 60 s)",
        elapsed.as_millis()
    ))
}

const BILINGUAL: &str = "Univ Granada, Res Grp Soft Comp, Grp Invest Soft Comp, E-18071 Granada, Spain";

const GOLDEN: &[(&str, &str, &[&str], &[&str])] = &[
    (
        "Univ Granada, Escuela Tecn Super Ingn Informat & Telecomunicac, Fac Ciencias, \
         Dept Ciencias Computac & Inteligencia Artificial, Res Grp Soft Comp & Intelligent Informat Syst, \
         Grp Invest Soft Comp & Sistemas Informac Inteligentes, E-18071 Granada, Spain",
        "UNIV GRANADA",
        &[
            "ESCUELA TECN SUPER INGN INFORMAT & TELECOMUNICAC",
            "FAC CIENCIAS",
            "DEPT CIENCIAS COMPUTAC & INTELIGENCIA ARTIFICIAL",
            "RES GRP SOFT COMP & INTELLIGENT INFORMAT SYST",
            "GRP INVEST SOFT COMP & SISTEMAS INFORMAC INTELIGENTES",
        ],
        &["E-18071 GRANADA", "SPAIN"],
    ),
    (
        "Univ Granada, Fac Sci, Dept Math Anal, E-18071 Granada, Spain",
        "UNIV GRANADA",
        &["FAC SCI", "DEPT MATH ANAL"],
        &["E-18071 GRANADA", "SPAIN"],
    ),
    ("Univ Granada, Dept Opt, E-18071 Granada, Spain", "UNIV GRANADA", &["DEPT OPT"], &["E-18071 GRANADA", "SPAIN"]),
    ("Univ Granada, E-18071 Granada, Spain", "UNIV GRANADA", &[], &["E-18071 GRANADA", "SPAIN"]),
    ("Univ Granada, 18071 Granada, Spain", "UNIV GRANADA", &[], &["18071 GRANADA", "SPAIN"]),
    ("Univ Granada, Dept Stat, Spain", "UNIV GRANADA", &["DEPT STAT"], &["SPAIN"]),
    ("Univ Granada, Hosp Univ San Cecilio, Spain", "UNIV GRANADA", &["HOSP UNIV SAN CECILIO"], &["SPAIN"]),
    ("Univ Granada, England, UK", "UNIV GRANADA", &[], &["ENGLAND", "UK"]),
    ("Univ Granada, Spain", "UNIV GRANADA", &[], &["SPAIN"]),
    ("Univ Granada, E-18071 Granada", "UNIV GRANADA", &[], &["E-18071 GRANADA"]),
    ("Univ Granada", "UNIV GRANADA", &[], &[]),
    ("UNIV GRANADA.", "UNIV GRANADA", &[], &[]),
    ("Univ Granada, Dept Phys, E-18071 Granada, Spain.", "UNIV GRANADA", &["DEPT PHYS"], &["E-18071 GRANADA", "SPAIN"]),
    ("Univ Granada, Dept Phys, E-18071 Granada, Spain . ", "UNIV GRANADA", &["DEPT PHYS"], &["E-18071 GRANADA", "SPAIN"]),
    (
        "univ  granada ,  dept   phys , e-18071   granada , spain",
        "UNIV GRANADA",
        &["DEPT PHYS"],
        &["E-18071 GRANADA", "SPAIN"],
    ),
    ("Univ Granada,\tDept Phys,\tE-18071 Granada,\tSpain", "UNIV GRANADA", &["DEPT PHYS"], &["E-18071 GRANADA", "SPAIN"]),
    ("Univ Granada; Dept Phys; E-18071 Granada; Spain", "UNIV GRANADA", &["DEPT PHYS"], &["E-18071 GRANADA", "SPAIN"]),
    ("Univ Granada,, Dept Phys, , E-18071 Granada, Spain", "UNIV GRANADA", &["DEPT PHYS"], &["E-18071 GRANADA", "SPAIN"]),
    (
        BILINGUAL,
        "UNIV GRANADA",
        &["RES GRP SOFT COMP", "GRP INVEST SOFT COMP"],
        &["E-18071 GRANADA", "SPAIN"],
    ),
    (
        "Univ Granada, Dept Math Analysis, Dpto Analisis Matematico, E-18071 Granada, Spain",
        "UNIV GRANADA",
        &["DEPT MATH ANALYSIS", "DPTO ANALISIS MATEMATICO"],
        &["E-18071 GRANADA", "SPAIN"],
    ),
    (
        "Univ Granada, Dept Comp Sci & Artificial Intelligence, E-18071 Granada, Spain",
        "UNIV GRANADA",
        &["DEPT COMP SCI & ARTIFICIAL INTELLIGENCE"],
        &["E-18071 GRANADA", "SPAIN"],
    ),
    (
        "Univ Granada, Inst Carlos I Theoret & Computat Phys, E-18071 Granada, Spain",
        "UNIV GRANADA",
        &["INST CARLOS I THEORET & COMPUTAT PHYS"],
        &["E-18071 GRANADA", "SPAIN"],
    ),
    (
        "Univ Granada, Escuela Tecn Super Ingn Informat, Fac Ciencias, Dept Lenguajes & Sistemas Informat, E-18071 Granada, Spain",
        "UNIV GRANADA",
        &["ESCUELA TECN SUPER INGN INFORMAT", "FAC CIENCIAS", "DEPT LENGUAJES & SISTEMAS INFORMAT"],
        &["E-18071 GRANADA", "SPAIN"],
    ),
    (
        "Univ Granada, Fac Med, Dept Biochem & Mol Biol 3, E-18071 Granada, Spain",
        "UNIV GRANADA",
        &["FAC MED", "DEPT BIOCHEM & MOL BIOL 3"],
        &["E-18071 GRANADA", "SPAIN"],
    ),
    (
        "Univ Granada, Fac Farm, Dept Quim Analit, Granada 18071, Spain",
        "UNIV GRANADA",
        &["FAC FARM", "DEPT QUIM ANALIT"],
        &["GRANADA 18071", "SPAIN"],
    ),
    ("UGR, Dpto Fis Aplicada, 18071 Granada, Spain", "UGR", &["DPTO FIS APLICADA"], &["18071 GRANADA", "SPAIN"]),
    (
        "Consejo Super Invest Cient, Inst Astrofis Andalucia, E-18008 Granada, Spain",
        "CONSEJO SUPER INVEST CIENT",
        &["INST ASTROFIS ANDALUCIA"],
        &["E-18008 GRANADA", "SPAIN"],
    ),
    (
        "Harvard Univ, Sch Med, Dept Genet, Boston, MA 02115 USA",
        "HARVARD UNIV",
        &["SCH MED", "DEPT GENET"],
        &["BOSTON", "MA 02115 USA"],
    ),
    (
        "London Sch Econ, Dept Stat, London WC2A 2AE, England",
        "LONDON SCH ECON",
        &["DEPT STAT"],
        &["LONDON WC2A 2AE", "ENGLAND"],
    ),
];

fn fuzz_segment(rng: &mut ChaCha8Rng) -> String {
    const WORDS: &[&str] = &["Univ", "Dept", "Fac", "Inst", "Ctr", "Granada", "Sci", "&", "Res", "Grp", "Lab", "x"];
    const COUNTRIES: &[&str] = &["Spain", "USA", "England", "Peoples R China", "France"];
    const PADS: &[&str] = &["", "", " ", "  ", "\t"];
    let pad = |rng: &mut ChaCha8Rng| PADS[rng.gen_range(0..PADS.len())];
    let body = match rng.gen_range(0..10) {
        0 => COUNTRIES[rng.gen_range(0..COUNTRIES.len())].to_string(),
        1 => format!("E-{} Granada", rng.gen_range(10000..99999)),
        2 => String::new(),
        _ => (0..rng.gen_range(1..4))
            .map(|_| {
                let w = WORDS[rng.gen_range(0..WORDS.len())];
                if rng.gen_bool(0.3) {
                    w.to_lowercase()
                } else {
                    w.to_string()
                }
            })
            .collect::<Vec<_>>()
            .join(&" ".repeat(rng.gen_range(1..3))),
    };
    format!("{}{body}{}", pad(rng), pad(rng))
}

fn parser_golden() -> Outcome {
    for (input, head, units, tail) in GOLDEN {
        let parse = parse_address(input).map_err(|e| format!("{input:?}: {e}"))?;
        ensure(parse.head == *head && parse.unit_tokens == *units && parse.tail == *tail, || {
            format!("{input:?} parsed as {parse:?}")
        })?;
        ensure(parse.reconstruct() == normalize_address(input), || format!("{input:?} does not reconstruct"))?;
    }
    ensure(parse_address(" , ; ").is_err(), || "blank address parsed".to_string())?;

    // Bilingual variants collapse once aliased.
    let aliases = AliasTable::from_pairs([("GRP INVEST SOFT COMP", "RES GRP SOFT COMP")]).map_err(|e| format!("{e:?}"))?;
    let parse = parse_address(BILINGUAL).unwrap();
    let names: Vec<String> = parse.unit_tokens.iter().map(|t| canonicalize(t, &aliases)).collect();
    let units = dedupe_units(&names, &TypeRuleSet::default());
    ensure(units.len() == 1, || format!("bilingual pair gave {units:?}"))?;

    let mut rng = ChaCha8Rng::seed_from_u64(0xadd7);
    let fuzzed = 10_000;
    for _ in 0..fuzzed {
        let mut segments = vec![format!("Univ {}", rng.gen_range(0..100))];
        segments.extend((0..rng.gen_range(0..8)).map(|_| fuzz_segment(&mut rng)));
        let sep = if rng.gen_bool(0.8) { ", " } else { "," };
        let input = segments.join(sep);
        let normalized = normalize_address(&input);
        let parse = parse_address(&input).map_err(|e| format!("{input:?}: {e}"))?;
        let expected_segments = normalized.split(", ").count();
        ensure(parse.reconstruct() == normalized, || format!("{input:?}: {parse:?}"))?;
        ensure(parse.segment_count() == expected_segments, || format!("{input:?}: segment count"))?;
        ensure(parse.tail.len() <= 2 && (expected_segments < 4 || parse.tail.len() == 2), || {
            format!("{input:?}: tail {:?}", parse.tail)
        })?;
    }
    Ok(format!("{} golden addresses exact; reconstruction holds on {fuzzed} fuzzed strings", GOLDEN.len()))
}

fn shares() -> Outcome {
    let cases = [((5514, 6337), 87.0), ((1117, 1760), 63.5)];
    for ((count, total), want) in cases {
        let got = share_percent(count, total);
        ensure(got == want, || format!("{count}/{total} -> {got}, want {want}"))?;
    }
    Ok("5514/6337 -> 87.0%, 1117/1760 -> 63.5% (one decimal, exact)".to_string())
}

fn run_cli(out: &std::path::Path) -> Result<Duration, String> {
    let start = Instant::now();
    let status = Command::new(env!("CARGO_BIN_EXE_orgprofile"))
        .arg("--config")
        .arg(fixture_dir().join("pipeline.toml"))
        .arg("--out")
        .arg(out)
        .arg("run")
        .stdout(std::process::Stdio::null())
        .status()
        .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure(status.success(), || format!("run exited with {status}"))?;
    Ok(elapsed)
}

fn end_to_end() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let out = tmp.path().join("out");

    let first = run_cli(&out)?;
    let snapshot = read_dir_sorted(&out);
    fs::remove_dir_all(&out).map_err(|e| e.to_string())?;
    let second = run_cli(&out)?;
    ensure(snapshot == read_dir_sorted(&out), || "two runs differ".to_string())?;
    let slowest = first.max(second);
    ensure(slowest < RUN_TIME_LIMIT, || format!("run took {slowest:?}"))?;

    let report: RunReport = serde_json::from_str(&fs::read_to_string(out.join("run_report.json")).unwrap())
        .map_err(|e| format!("run_report.json: {e}"))?;
    let want_counts = RecordCounts {
        total: 12,
        doc_type_filtered: 1,
        out_of_period: 0,
        no_target_address: 1,
        university_only: 2,
        analyzed: 8,
    };
    ensure(report.counts == want_counts, || format!("counts {:?}", report.counts))?;
    ensure(
        (report.units, report.edges, report.total_edge_weight, report.components.as_slice()) == (6, 7, 9, &[6][..]),
        || format!("network {} units, {} edges, weight {}", report.units, report.edges, report.total_edge_weight),
    )?;

    let edges = fs::read_to_string(out.join("edges.csv")).unwrap();
    let mut got_edges: Vec<String> = edges.lines().skip(1).map(str::to_string).collect();
    got_edges.sort();
    let mut want_edges: Vec<String> = [(C, M, 1), (C, O, 1), (C, E, 1), (C, F, 1), (M, F, 3), (O, F, 1), (O, I, 1)]
        .iter()
        .map(|(a, b, w)| format!("{a},{b},{w}"))
        .collect();
    want_edges.sort();
    ensure(got_edges == want_edges, || format!("edges {got_edges:?}"))?;

    let table = fs::read_to_string(out.join("indicators.csv")).unwrap();
    let rows: Vec<&str> = table.lines().skip(1).collect();
    let want_rows = [
        format!("{M},department,4,0.00,0.73,2,1.00,1,,asterisk"),
        format!("{F},faculty,4,1.00,0.50,3,0.50,2,,"),
        format!("{C},department,3,5.00,0.20,4,0.20,2,bold,bold"),
        format!("{O},department,3,4.00,0.60,3,0.50,2,,"),
    ];
    ensure(rows == want_rows, || format!("indicator rows {rows:?}"))?;

    Ok(format!(
        "12 records -> 8 analyzed (4 discarded), 7 edges / weight 9, 4 indicator rows incl. G_disc = 1.00; \
         byte-identical twice; slowest run {} ms (limit 2 s)",
        slowest.as_millis()
    ))
}

fn thresholds() -> Outcome {
    let net = network(4, &[(0, 1, 4), (1, 2, 5), (2, 3, 6)]);
    let kept = apply_threshold(&net, &Threshold::strict(5));
    let edges: Vec<(&str, &str, u64)> = kept.edges().collect();
    ensure(edges == [("N2", "N3", 6)], || format!("kept {edges:?}"))?;
    ensure(kept.node_count() == 2, || format!("{} nodes kept", kept.node_count()))?;

    let unit = |name: &str| CanonicalUnit {
        name: name.to_string(),
        unit_type: UnitType::Department,
    };
    let net = OrgNetwork::from_parts([(unit("DEPT A"), 50), (unit("DEPT B"), 51)], []).map_err(|e| e.to_string())?;
    let options = TableOptions {
        min_publications: 50,
        unit_type: None,
    };
    let rows = indicator_table(&net, &BTreeMap::new(), &BTreeMap::new(), &options);
    let names: BTreeSet<&str> = rows.iter().map(|r| r.name.as_str()).collect();
    ensure(names == BTreeSet::from(["DEPT B"]), || format!("rows {names:?}"))?;
    Ok("weights {4,5,6} with > 5 keep only the 6 edge; P = 50 excluded and P = 51 kept at > 50".to_string())
}
