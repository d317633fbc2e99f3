//! Synchrony patterns: partitions of the node set, balanced (equitable)
//! partitions, orbit partitions of permutation groups, and numerical checks
//! that a polydiagonal is invariant under the coupled flow.

use std::fmt;

use crate::dynamics::{sample_flow, CouplingGraph, GlobalState, LatticeSystem, Permutation};
use crate::error::{Error, Result};
use crate::metric::node_mean;

/// Tolerance when comparing summed edge weights.
pub const WEIGHT_TOL: f64 = 1e-12;
/// Largest membership defect accepted for an initial state of an invariance run.
pub const START_DEFECT_TOL: f64 = 1e-9;

/// A partition of `0..n` in canonical form: blocks sorted internally and
/// ordered by smallest element, block ids dense from 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    block_of: Vec<usize>,
    blocks: Vec<Vec<usize>>,
}

impl Partition {
    /// Canonical partition from arbitrary per-node labels.
    pub fn from_labels(labels: &[usize]) -> Self {
        let mut remap: Vec<Option<usize>> = Vec::new();
        let mut block_of = Vec::with_capacity(labels.len());
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for (i, &l) in labels.iter().enumerate() {
            if l >= remap.len() {
                remap.resize(l + 1, None);
            }
            let id = *remap[l].get_or_insert_with(|| {
                blocks.push(Vec::new());
                blocks.len() - 1
            });
            blocks[id].push(i);
            block_of.push(id);
        }
        Partition { block_of, blocks }
    }

    pub fn from_blocks(n: usize, blocks: &[Vec<usize>]) -> Result<Self> {
        let mut labels = vec![usize::MAX; n];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::invalid(format!("block {b} is empty")));
            }
            for &i in block {
                if i >= n {
                    return Err(Error::invalid(format!(
                        "node {i} in block {b} is outside [0, {n})"
                    )));
                }
                if labels[i] != usize::MAX {
                    return Err(Error::invalid(format!("node {i} appears in two blocks")));
                }
                labels[i] = b;
            }
        }
        if let Some(i) = labels.iter().position(|&l| l == usize::MAX) {
            return Err(Error::invalid(format!("node {i} is not covered by any block")));
        }
        Ok(Self::from_labels(&labels))
    }

    /// The finest partition: every node alone.
    pub fn singletons(n: usize) -> Self {
        Self::from_labels(&(0..n).collect::<Vec<_>>())
    }

    /// The coarsest partition: one block.
    pub fn one_block(n: usize) -> Self {
        Self::from_labels(&vec![0; n])
    }

    pub fn n_nodes(&self) -> usize {
        self.block_of.len()
    }

    pub fn n_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block_of(&self, node: usize) -> usize {
        self.block_of[node]
    }

    pub fn labels(&self) -> &[usize] {
        &self.block_of
    }
}

impl fmt::Display for Partition {
    /// `{0,3},{1,4},{2,5}`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (b, block) in self.blocks.iter().enumerate() {
            if b > 0 {
                f.write_str(",")?;
            }
            f.write_str("{")?;
            for (k, i) in block.iter().enumerate() {
                if k > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{i}")?;
            }
            f.write_str("}")?;
        }
        Ok(())
    }
}

fn same_size(a: &Partition, b: &Partition) -> Result<()> {
    if a.n_nodes() != b.n_nodes() {
        return Err(Error::shape(
            format!("partition of {} nodes", a.n_nodes()),
            format!("{} nodes", b.n_nodes()),
        ));
    }
    Ok(())
}

/// True iff every block of `fine` lies inside a block of `coarse`.
pub fn is_refinement(fine: &Partition, coarse: &Partition) -> Result<bool> {
    same_size(fine, coarse)?;
    Ok(fine.blocks().iter().all(|block| {
        let target = coarse.block_of(block[0]);
        block.iter().all(|&i| coarse.block_of(i) == target)
    }))
}

fn check_partition(sys: &LatticeSystem, x: &GlobalState, p: &Partition) -> Result<()> {
    sys.check_state(x)?;
    if p.n_nodes() != sys.n_nodes() {
        return Err(Error::shape(
            format!("partition of {} nodes", sys.n_nodes()),
            format!("{} nodes", p.n_nodes()),
        ));
    }
    Ok(())
}

/// Largest pairwise distance between nodes sharing a block; zero iff `x ∈ X_P`.
pub fn membership_defect(sys: &LatticeSystem, x: &GlobalState, p: &Partition) -> Result<f64> {
    check_partition(sys, x, p)?;
    let mut worst: f64 = 0.0;
    for block in p.blocks() {
        for (a, &i) in block.iter().enumerate() {
            for &j in &block[a + 1..] {
                worst = worst.max(sys.model(i).distance(x.node(i), x.node(j)));
            }
        }
    }
    Ok(worst)
}

/// Replaces each block by its mean state. When the circular mean of a block
/// is undefined the block takes the state of its lowest-index node.
pub fn project_to_partition(
    sys: &LatticeSystem,
    x: &GlobalState,
    p: &Partition,
) -> Result<GlobalState> {
    check_partition(sys, x, p)?;
    let mut out = x.clone();
    for block in p.blocks() {
        let nodes: Vec<&[f64]> = block.iter().map(|&i| x.node(i)).collect();
        let rep = node_mean(x.kind(), &nodes).unwrap_or_else(|| nodes[0].to_vec());
        for &i in block {
            out.set_node(i, &rep)?;
        }
    }
    Ok(out)
}

/// Per node, the summed incoming weight from each block of `p`.
fn block_inputs(g: &CouplingGraph, p: &Partition) -> Vec<Vec<f64>> {
    (0..g.n_nodes())
        .map(|v| {
            let mut sig = vec![0.0; p.n_blocks()];
            for &(src, w) in g.incoming(v) {
                sig[p.block_of(src)] += w;
            }
            sig
        })
        .collect()
}

fn close(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= WEIGHT_TOL)
}

fn check_graph_partition(g: &CouplingGraph, p: &Partition) -> Result<()> {
    if p.n_nodes() != g.n_nodes() {
        return Err(Error::shape(
            format!("partition of {} nodes", g.n_nodes()),
            format!("{} nodes", p.n_nodes()),
        ));
    }
    Ok(())
}

/// True iff nodes sharing a block receive equal total weight from every block.
pub fn is_balanced(g: &CouplingGraph, p: &Partition) -> Result<bool> {
    check_graph_partition(g, p)?;
    let inputs = block_inputs(g, p);
    Ok(p.blocks().iter().all(|block| {
        let first = &inputs[block[0]];
        block.iter().all(|&i| close(first, &inputs[i]))
    }))
}

/// One round of colour refinement: split every block by input signature.
fn refine_once(g: &CouplingGraph, p: &Partition) -> Partition {
    let inputs = block_inputs(g, p);
    let mut labels = vec![0usize; g.n_nodes()];
    let mut next = 0;
    for block in p.blocks() {
        let mut members = block.clone();
        members.sort_by(|&a, &b| {
            inputs[a]
                .iter()
                .zip(&inputs[b])
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        });
        let mut leader = members[0];
        labels[leader] = next;
        for &v in &members[1..] {
            if !close(&inputs[leader], &inputs[v]) {
                next += 1;
                leader = v;
            }
            labels[v] = next;
        }
        next += 1;
    }
    Partition::from_labels(&labels)
}

/// Coarsest balanced partition refining `init` (one block by default),
/// computed by iterated colour refinement.
pub fn coarsest_equitable_partition(
    g: &CouplingGraph,
    init: Option<&Partition>,
) -> Result<Partition> {
    let mut p = match init {
        Some(p) => {
            check_graph_partition(g, p)?;
            p.clone()
        }
        None => Partition::one_block(g.n_nodes()),
    };
    loop {
        let next = refine_once(g, &p);
        if next.n_blocks() == p.n_blocks() {
            return Ok(next);
        }
        p = next;
    }
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Orbits of the group generated by `generators` acting on `0..n`.
pub fn partition_from_group_orbits(n: usize, generators: &[Permutation]) -> Result<Partition> {
    let mut parent: Vec<usize> = (0..n).collect();
    for (k, g) in generators.iter().enumerate() {
        if g.len() != n {
            return Err(Error::invalid(format!(
                "generator {k} permutes {} points, expected {n}",
                g.len()
            )));
        }
        for i in 0..n {
            let (a, b) = (find(&mut parent, i), find(&mut parent, g.apply(i)));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let labels: Vec<usize> = (0..n).map(|i| find(&mut parent, i)).collect();
    Ok(Partition::from_labels(&labels))
}

/// Numerical witness of polydiagonal invariance along one trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct InvarianceReport {
    pub partition: Partition,
    pub horizon: f64,
    pub max_defect: f64,
    /// `(time, membership defect)` at equispaced times in `[0, horizon]`.
    pub defect_series: Vec<(f64, f64)>,
}

/// Integrates from `x0 ∈ X_P` and samples the membership defect at
/// `n_samples` equispaced times (both ends included).
pub fn invariance_report(
    sys: &LatticeSystem,
    p: &Partition,
    x0: &GlobalState,
    horizon: f64,
    dt: f64,
    n_samples: usize,
) -> Result<InvarianceReport> {
    let start = membership_defect(sys, x0, p)?;
    if !(start < START_DEFECT_TOL) {
        return Err(Error::OffPolydiagonal { defect: start });
    }
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(Error::invalid(format!("horizon must be > 0, got {horizon}")));
    }
    if n_samples < 2 {
        return Err(Error::invalid("need at least 2 samples"));
    }
    let times: Vec<f64> = (0..n_samples)
        .map(|k| horizon * k as f64 / (n_samples - 1) as f64)
        .collect();
    let states = sample_flow(sys, x0, &times, dt)?;
    let defect_series = times
        .iter()
        .zip(&states)
        .map(|(&t, x)| Ok((t, membership_defect(sys, x, p)?)))
        .collect::<Result<Vec<_>>>()?;
    let max_defect = defect_series.iter().map(|&(_, d)| d).fold(0.0, f64::max);
    Ok(InvarianceReport {
        partition: p.clone(),
        horizon,
        max_defect,
        defect_series,
    })
}
