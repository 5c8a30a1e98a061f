//! Timing harness for the tree recognizer over the generated graph classes.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use serde::Serialize;

use crate::generators::{gen_grid, gen_linked_list, gen_perfect_binary_tree, gen_star};
use crate::grammar::{plant_root, recognize_tree_in_place};
use crate::graph::Graph;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphClass {
    List,
    Tree,
    Grid,
    Star,
}

impl GraphClass {
    pub const ALL: [GraphClass; 4] = [GraphClass::List, GraphClass::Tree, GraphClass::Grid, GraphClass::Star];

    /// An instance with roughly `n` nodes: the largest perfect binary tree
    /// and the most nearly square grid not exceeding `n`.
    pub fn generate(self, n: usize) -> Graph {
        let n = n.max(1) as u32;
        match self {
            GraphClass::List => gen_linked_list(n),
            GraphClass::Star => gen_star(n.saturating_sub(1).max(1)),
            GraphClass::Tree => {
                let depth = (u32::BITS - (n + 1).leading_zeros()).saturating_sub(2);
                gen_perfect_binary_tree(depth)
            }
            GraphClass::Grid => {
                let side = (n as f64).sqrt().floor().max(1.0) as u32;
                gen_grid(side, (n / side).max(1))
            }
        }
    }
}

impl fmt::Display for GraphClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GraphClass::List => "list",
            GraphClass::Tree => "tree",
            GraphClass::Grid => "grid",
            GraphClass::Star => "star",
        })
    }
}

impl FromStr for GraphClass {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "list" => Ok(GraphClass::List),
            "tree" => Ok(GraphClass::Tree),
            "grid" => Ok(GraphClass::Grid),
            "star" => Ok(GraphClass::Star),
            other => Err(format!("unknown graph class `{other}`")),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BenchRecord {
    pub class: GraphClass,
    pub nodes: usize,
    pub trial: usize,
    pub seconds: f64,
    pub steps: usize,
    pub is_tree: bool,
}

/// Least-squares fit of `log t = slope · log n + c`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassSummary {
    pub class: GraphClass,
    /// `(nodes, median seconds, steps)` per size.
    pub points: Vec<(usize, f64, usize)>,
    pub fit: Option<SlopeFit>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BenchReport {
    pub records: Vec<BenchRecord>,
    pub summaries: Vec<ClassSummary>,
}

pub fn log_log_fit(points: &[(f64, f64)]) -> Option<SlopeFit> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Some(SlopeFit {
        slope,
        intercept: my - slope * mx,
        r_squared,
    })
}

fn median(xs: &mut [f64]) -> f64 {
    xs.sort_by(|a, b| a.total_cmp(b));
    let k = xs.len();
    if k % 2 == 1 {
        xs[k / 2]
    } else {
        (xs[k / 2 - 1] + xs[k / 2]) / 2.0
    }
}

/// Times one recognition: planting the root and reducing, not generation.
pub fn time_once(g: &Graph) -> (f64, usize, bool) {
    let g = g.clone();
    let start = Instant::now();
    let mut planted = plant_root(&g).expect("generated graphs are non-empty");
    drop(g);
    let rec = recognize_tree_in_place(&mut planted).expect("planted graph is an input graph");
    (start.elapsed().as_secs_f64(), rec.steps, rec.is_tree)
}

struct Point {
    records: Vec<BenchRecord>,
    median: f64,
    steps: usize,
    nodes: usize,
}

fn run_point(class: GraphClass, n: usize, trials: usize) -> Point {
    let g = class.generate(n);
    let nodes = g.node_count();
    let mut times = Vec::with_capacity(trials);
    let mut records = Vec::with_capacity(trials);
    let mut steps = 0;
    for trial in 0..trials {
        let (seconds, s, is_tree) = time_once(&g);
        steps = s;
        times.push(seconds);
        records.push(BenchRecord {
            class,
            nodes,
            trial,
            seconds,
            steps: s,
            is_tree,
        });
    }
    Point {
        records,
        median: median(&mut times),
        steps,
        nodes,
    }
}

fn assemble(classes: &[GraphClass], sizes: &[usize], points: Vec<Point>) -> BenchReport {
    let mut records = Vec::new();
    let mut summaries = Vec::new();
    let mut it = points.into_iter();
    for &class in classes {
        let mut pts = Vec::new();
        for _ in sizes {
            let p = it.next().expect("one point per class and size");
            pts.push((p.nodes, p.median, p.steps));
            records.extend(p.records);
        }
        let xy: Vec<(f64, f64)> = pts.iter().map(|(n, t, _)| (*n as f64, *t)).collect();
        summaries.push(ClassSummary {
            class,
            fit: log_log_fit(&xy),
            points: pts,
        });
    }
    BenchReport { records, summaries }
}

/// Runs every class at every size `trials` times, sequentially.
pub fn run_benchmark(classes: &[GraphClass], sizes: &[usize], trials: usize) -> BenchReport {
    let trials = trials.max(1);
    let points = classes
        .iter()
        .flat_map(|&c| sizes.iter().map(move |&n| (c, n)))
        .map(|(c, n)| run_point(c, n, trials))
        .collect();
    assemble(classes, sizes, points)
}

/// As [`run_benchmark`] but with points spread over `jobs` threads. Times
/// interfere with each other, so this is for checking verdicts and step
/// counts rather than for measuring.
pub fn run_benchmark_parallel(classes: &[GraphClass], sizes: &[usize], trials: usize, jobs: usize) -> BenchReport {
    let trials = trials.max(1);
    let work: Vec<(GraphClass, usize)> = classes
        .iter()
        .flat_map(|&c| sizes.iter().map(move |&n| (c, n)))
        .collect();
    let next = AtomicUsize::new(0);
    let done = Mutex::new(Vec::with_capacity(work.len()));
    std::thread::scope(|s| {
        for _ in 0..jobs.clamp(1, work.len().max(1)) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(c, n)) = work.get(i) else { break };
                let p = run_point(c, n, trials);
                done.lock().unwrap().push((i, p));
            });
        }
    });
    let mut done = done.into_inner().unwrap();
    done.sort_by_key(|(i, _)| *i);
    assemble(classes, sizes, done.into_iter().map(|(_, p)| p).collect())
}

pub fn write_csv<W: Write>(out: &mut W, records: &[BenchRecord]) -> io::Result<()> {
    writeln!(out, "class,nodes,trial,seconds,steps")?;
    for r in records {
        writeln!(out, "{},{},{},{:.9},{}", r.class, r.nodes, r.trial, r.seconds, r.steps)?;
    }
    Ok(())
}

/// Parses `1000..100000` (ten evenly spaced sizes), `a..b:k` (`k` sizes) or
/// a comma list.
pub fn parse_sizes(s: &str) -> Result<Vec<usize>, String> {
    let bad = || format!("bad size list `{s}`");
    if let Some((a, rest)) = s.split_once("..") {
        let (b, k) = match rest.split_once(':') {
            Some((b, k)) => (b, k.parse::<usize>().map_err(|_| bad())?),
            None => (rest, 10),
        };
        let a: usize = a.trim().parse().map_err(|_| bad())?;
        let b: usize = b.trim().parse().map_err(|_| bad())?;
        if a == 0 || b < a || k == 0 {
            return Err(bad());
        }
        if k == 1 || a == b {
            return Ok(vec![a]);
        }
        let step = (b - a) as f64 / (k - 1) as f64;
        let mut v: Vec<usize> = (0..k).map(|i| a + (step * i as f64).round() as usize).collect();
        v.dedup();
        return Ok(v);
    }
    let v: Vec<usize> = s
        .split(',')
        .map(|x| x.trim().parse::<usize>().map_err(|_| bad()))
        .collect::<Result<_, _>>()?;
    if v.is_empty() || v.contains(&0) || v.windows(2).any(|w| w[0] > w[1]) {
        return Err(bad());
    }
    Ok(v)
}
