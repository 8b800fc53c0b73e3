use super::{CnfFormula, Lit, Model, SatResult};
use crate::error::{Error, Result};

/// Implication graph in compressed adjacency form, one node per literal.
struct Graph {
    offsets: Vec<usize>,
    targets: Vec<u32>,
}

impl Graph {
    fn build(f: &CnfFormula) -> Result<Graph> {
        let nodes = 2 * f.num_vars() as usize;
        let mut edges: Vec<(u32, u32)> = Vec::with_capacity(2 * f.clauses().len());
        for (i, clause) in f.clauses().iter().enumerate() {
            let (a, b) = match clause.as_slice() {
                [a] => (*a, *a),
                [a, b] => (*a, *b),
                _ => {
                    return Err(Error::ClauseTooWide {
                        clause: i,
                        width: clause.len(),
                    })
                }
            };
            // (a ∨ b) ≡ (¬a ⇒ b) ∧ (¬b ⇒ a)
            edges.push(((!a).code() as u32, b.code() as u32));
            edges.push(((!b).code() as u32, a.code() as u32));
        }
        let mut offsets = vec![0usize; nodes + 1];
        for &(u, _) in &edges {
            offsets[u as usize + 1] += 1;
        }
        for k in 0..nodes {
            offsets[k + 1] += offsets[k];
        }
        let mut fill = offsets.clone();
        let mut targets = vec![0u32; edges.len()];
        for &(u, v) in &edges {
            targets[fill[u as usize]] = v;
            fill[u as usize] += 1;
        }
        Ok(Graph { offsets, targets })
    }

    fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Iterative Tarjan. Components are numbered in reverse topological
    /// order: every edge goes from a component to one with a smaller or
    /// equal number.
    fn scc(&self) -> Vec<u32> {
        const UNSET: u32 = u32::MAX;
        let n = self.len();
        let mut comp = vec![UNSET; n];
        let mut index = vec![UNSET; n];
        let mut low = vec![0u32; n];
        let mut next_edge = vec![0usize; n];
        let mut on_path: Vec<u32> = Vec::new();
        let mut call: Vec<u32> = Vec::new();
        let mut counter = 0u32;
        let mut n_comp = 0u32;

        for root in 0..n as u32 {
            if index[root as usize] != UNSET {
                continue;
            }
            call.push(root);
            while let Some(&u) = call.last() {
                let ui = u as usize;
                if index[ui] == UNSET {
                    index[ui] = counter;
                    low[ui] = counter;
                    counter += 1;
                    next_edge[ui] = self.offsets[ui];
                    on_path.push(u);
                }
                if next_edge[ui] < self.offsets[ui + 1] {
                    let v = self.targets[next_edge[ui]] as usize;
                    next_edge[ui] += 1;
                    if index[v] == UNSET {
                        call.push(v as u32);
                    } else if comp[v] == UNSET {
                        low[ui] = low[ui].min(index[v]);
                    }
                    continue;
                }
                call.pop();
                if low[ui] == index[ui] {
                    loop {
                        let w = on_path.pop().unwrap();
                        comp[w as usize] = n_comp;
                        if w == u {
                            break;
                        }
                    }
                    n_comp += 1;
                }
                if let Some(&p) = call.last() {
                    low[p as usize] = low[p as usize].min(low[ui]);
                }
            }
        }
        comp
    }
}

/// Decides a formula whose clauses have at most two literals (unit clauses
/// are read as `l ∨ l`) in time linear in its size.
pub fn solve_2sat(f: &CnfFormula) -> Result<SatResult> {
    let graph = Graph::build(f)?;
    let comp = graph.scc();
    let mut values = Vec::with_capacity(f.num_vars() as usize);
    for v in 1..=f.num_vars() {
        let t = comp[Lit::pos(v).code()];
        let n = comp[Lit::neg(v).code()];
        if t == n {
            return Ok(SatResult::unsat());
        }
        // the literal whose component comes later in topological order wins
        values.push(t < n);
    }
    Ok(SatResult::sat(Model::new(values)))
}
