use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use mepcut::baselines::{
    brute_force_exact_with_budget, gen_pendant_cycle, isolating_cut_heuristic, random_graph, RandomGraphConfig,
    WeightDist,
};
use mepcut::bench::{scaling_rows, write_scaling_csv};
use mepcut::dynamic::{frame_by_frame, simulate, write_sim_csv, DynamicSystem, SimStatus, SimTrace};
use mepcut::io::{graph_to_json, graph_to_text, partition_to_json, read_graph, write_trace_csv};
use mepcut::mep::{anneal, TieReport};
use mepcut::segmentation::{
    build_pixel_graph, disk_scene, segment as run_segment, write_mask_pgm, BBox, DiskSceneConfig, Image,
    SegmentSolver,
};
use mepcut::{Error, Graph};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::{BenchArgs, CompareArgs, DynamicArgs, DynamicMode, GenKind, SegmentArgs, SegmentSolverArg, SolveArgs};

/// A diagnostic and the process exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Budget { .. } => 3,
            Error::Numeric { .. } => 4,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Error::from(e).into()
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Error::from(e).into()
    }
}

type Outcome = Result<(), Failure>;

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    Ok(BufWriter::new(File::create(path)?))
}

/// File when a path is given, stdout otherwise.
fn sink(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(create(p)?),
        None => Box::new(io::stdout().lock()),
    })
}

pub fn solve(a: &SolveArgs) -> Outcome {
    let g = read_graph(&a.graph)?;
    let cfg = a.solver.config()?;
    let (partition, ties, trace) = if a.exact {
        let p = brute_force_exact_with_budget(&g, a.budget)?;
        (p, TieReport::new(), None)
    } else {
        let t = anneal(&g, &cfg)?;
        for w in &t.warnings {
            eprintln!("warning: {w}");
        }
        (t.partition.clone(), t.ties.clone(), Some(t))
    };
    let json = partition_to_json(&partition, &ties)?;
    println!("{json}");
    if let Some(dir) = &a.out {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("partition.json"), format!("{json}\n"))?;
        if let Some(t) = &trace {
            write_trace_csv(&t.entries, g.k(), create(&dir.join("trace.csv"))?)?;
        }
    }
    Ok(())
}

struct Instance {
    id: String,
    graph: Graph,
}

fn compare_instances(a: &CompareArgs) -> Result<Vec<Instance>, Failure> {
    let mut out = Vec::new();
    for path in &a.graphs {
        out.push(Instance {
            id: path.file_name().map_or_else(|| path.display().to_string(), |f| f.to_string_lossy().into_owned()),
            graph: read_graph(path)?,
        });
    }
    for &k in &a.pendants {
        out.push(Instance {
            id: format!("pendant-k{k}"),
            graph: gen_pendant_cycle(k, a.pendant_weight)?,
        });
    }
    let cfg = RandomGraphConfig {
        n_min: a.n_min,
        n_max: a.n_max,
        k_min: a.k_min,
        k_max: a.k_max,
        edge_prob: a.edge_prob,
        weights: WeightDist::Unit,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(a.solver.seed);
    for i in 0..a.random {
        out.push(Instance {
            id: format!("random-{i}"),
            graph: random_graph(&cfg, &mut rng)?,
        });
    }
    if out.is_empty() {
        return Err(Error::Parameter("no instances: pass --graph, --pendant or --random".into()).into());
    }
    Ok(out)
}

pub fn compare(a: &CompareArgs) -> Outcome {
    let cfg = a.solver.config()?;
    let instances = compare_instances(a)?;
    let mut csv = csv::Writer::from_writer(sink(a.out.as_deref())?);
    csv.write_record([
        "instance",
        "N",
        "edges",
        "k",
        "mep",
        "isolating",
        "exact",
        "mep_over_exact",
        "isolating_over_exact",
        "mep_s",
        "isolating_s",
        "exact_s",
    ])?;
    let (mut solved, mut matched) = (0, 0);
    for inst in &instances {
        let g = &inst.graph;
        let start = Instant::now();
        let mep = anneal(g, &cfg)?.partition.cut_value;
        let mep_s = start.elapsed().as_secs_f64();
        let start = Instant::now();
        let iso = isolating_cut_heuristic(g)?.cut_value;
        let iso_s = start.elapsed().as_secs_f64();
        let start = Instant::now();
        let exact = match brute_force_exact_with_budget(g, a.budget) {
            Ok(p) => Some(p.cut_value),
            Err(Error::Budget { .. }) => None,
            Err(e) => return Err(e.into()),
        };
        let exact_s = start.elapsed().as_secs_f64();
        let ratio = |v: f64| match exact {
            Some(x) if x > 0.0 => (v / x).to_string(),
            Some(_) if v == 0.0 => "1".to_string(),
            _ => String::new(),
        };
        if let Some(x) = exact {
            solved += 1;
            if (mep - x).abs() <= 1e-9 * (1.0 + x.abs()) {
                matched += 1;
            }
        }
        csv.write_record([
            inst.id.clone(),
            g.n_vertices().to_string(),
            g.edges().len().to_string(),
            g.k().to_string(),
            mep.to_string(),
            iso.to_string(),
            exact.map(|x| x.to_string()).unwrap_or_default(),
            ratio(mep),
            ratio(iso),
            mep_s.to_string(),
            iso_s.to_string(),
            if exact.is_some() { exact_s.to_string() } else { String::new() },
        ])?;
    }
    csv.flush()?;
    eprintln!("annealer matched the exact optimum on {matched}/{solved} instances");
    Ok(())
}

fn summarize(name: &str, trace: &SimTrace) {
    let energies = trace.records.iter().map(|r| r.energy);
    let min_f = energies.clone().fold(f64::INFINITY, f64::min);
    let max_f = energies.fold(f64::NEG_INFINITY, f64::max);
    let violations = trace.records.iter().filter(|r| r.fdot > 1e-9).count();
    let clamped = trace.records.iter().filter(|r| r.clamped).count();
    println!("[{name}]");
    println!("steps: {}", trace.records.len().saturating_sub(1));
    if !trace.records.is_empty() {
        println!("F min: {min_f}");
        println!("F max: {max_f}");
    }
    println!("Fdot > 0 at: {violations} steps");
    println!("control floor hit: {clamped} steps");
    println!("full solves: {}", trace.full_solves);
    println!("refresh sweeps: {}", trace.refresh_sweeps);
    println!("solver time: {} s", trace.solver_time.as_secs_f64());
    if let Some(last) = trace.records.last() {
        let labels: Vec<String> = last.assignment.iter().map(|a| (a + 1).to_string()).collect();
        println!("final assignment: {}", labels.join(" "));
    }
    if let SimStatus::Aborted { t, reason } = &trace.status {
        println!("aborted at t = {t}: {reason}");
    }
}

pub fn dynamic(a: &DynamicArgs) -> Outcome {
    let mut sys = match &a.system {
        Some(path) => DynamicSystem::from_json(&fs::read_to_string(path)?)?,
        None => DynamicSystem::four_node_example(),
    };
    sys.solver = a.solver.config()?;
    if let Some(h) = a.step {
        sys.h = h;
    }
    if let Some(t) = a.horizon {
        sys.horizon = t;
    }
    sys.validate()?;
    if let Some(dir) = &a.out {
        fs::create_dir_all(dir)?;
    }
    let mut runs = Vec::new();
    if a.mode != DynamicMode::FrameByFrame {
        runs.push(("controlled", simulate(&sys)?));
    }
    if a.mode != DynamicMode::Controlled {
        runs.push(("frames", frame_by_frame(&sys, a.dt)?));
    }
    let mut aborted = None;
    for (name, trace) in &runs {
        summarize(name, trace);
        for w in &trace.warnings {
            eprintln!("warning: {name}: {w}");
        }
        if let Some(dir) = &a.out {
            write_sim_csv(trace, sys.n_edges(), create(&dir.join(format!("{name}.csv")))?)?;
        }
        if let SimStatus::Aborted { t, reason } = &trace.status {
            aborted = Some(format!("{name} run aborted at t = {t}: {reason}"));
        }
    }
    if let [(_, ctrl), (_, frames)] = &runs[..] {
        let c = ctrl.solver_time.as_secs_f64();
        if c > 0.0 {
            println!("speedup: {}", frames.solver_time.as_secs_f64() / c);
        }
    }
    match aborted {
        Some(message) => Err(Failure { code: 4, message }),
        None => Ok(()),
    }
}

pub fn segment(a: &SegmentArgs) -> Outcome {
    let img = Image::read_pnm(&a.image)?;
    let bbox: BBox = a.bbox.parse()?;
    let pg = build_pixel_graph(&img, bbox, a.sigma)?;
    let solver = match a.solver {
        SegmentSolverArg::Mep => SegmentSolver::Mep(a.solver_args.config()?),
        SegmentSolverArg::Maxflow => SegmentSolver::MaxFlow,
    };
    let seg = run_segment(&pg, a.rounds, &solver)?;
    for (i, r) in seg.rounds.iter().enumerate() {
        println!(
            "round {}: boundary cut {}, foreground {} px, {} s",
            i + 1,
            r.boundary_cut,
            r.foreground_pixels,
            r.elapsed.as_secs_f64()
        );
    }
    for w in &seg.warnings {
        eprintln!("warning: {w}");
    }
    write_mask_pgm(&seg.mask, bbox.width, bbox.height, &a.out)?;
    Ok(())
}

pub fn bench(a: &BenchArgs) -> Outcome {
    let cfg = a.solver.config()?;
    let mut rng = ChaCha8Rng::seed_from_u64(a.solver.seed);
    let rows = scaling_rows(&a.sizes, a.k, a.density, &cfg, &mut rng)?;
    write_scaling_csv(&rows, sink(a.out.as_deref())?)?;
    Ok(())
}

fn emit_graph(g: &Graph, json: bool, out: Option<&Path>) -> Outcome {
    let text = if json { graph_to_json(g)? + "\n" } else { graph_to_text(g) };
    let mut w = sink(out)?;
    w.write_all(text.as_bytes())?;
    w.flush()?;
    Ok(())
}

pub fn gen(kind: &GenKind) -> Outcome {
    match kind {
        GenKind::Pendant { k, weight, json, out } => emit_graph(&gen_pendant_cycle(*k, *weight)?, *json, out.as_deref()),
        GenKind::Random {
            n,
            k,
            edge_prob,
            max_weight,
            seed,
            json,
            out,
        } => {
            let cfg = RandomGraphConfig {
                n_min: *n,
                n_max: *n,
                k_min: *k,
                k_max: *k,
                edge_prob: *edge_prob,
                weights: max_weight.map_or(WeightDist::Unit, |m| WeightDist::Integer(1, m)),
            };
            let g = random_graph(&cfg, &mut ChaCha8Rng::seed_from_u64(*seed))?;
            emit_graph(&g, *json, out.as_deref())
        }
        GenKind::Disk { seed, truth, out } => {
            let scene = disk_scene(&DiskSceneConfig {
                seed: *seed,
                ..DiskSceneConfig::default()
            })?;
            scene.image.write_ppm(out)?;
            if let Some(path) = truth {
                write_mask_pgm(&scene.truth, scene.bbox.width, scene.bbox.height, path)?;
            }
            let b = scene.bbox;
            println!("{},{},{},{}", b.x, b.y, b.width, b.height);
            Ok(())
        }
        GenKind::System { out } => {
            let json = DynamicSystem::four_node_example().to_json()? + "\n";
            let mut w = sink(out.as_deref())?;
            w.write_all(json.as_bytes())?;
            w.flush()?;
            Ok(())
        }
    }
}
