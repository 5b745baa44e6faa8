//! Brute-force reference implementations. Each one is written from the
//! problem definition, never from the production algorithm it checks.

use std::collections::BTreeSet;

use num_rational::Ratio;
use petgraph::graph::UnGraph;

/// Minimum cost of a 2×2 balanced transportation problem by scanning its
/// single free parameter `t = x[0][0]` over the feasible interval.
///
/// The cost is linear in `t`, so the optimum sits on an endpoint; the scan
/// still walks `steps` interior points and keeps the best value.
pub fn transport_2x2(supply: [f64; 2], demand: [f64; 2], cost: [[f64; 2]; 2], steps: usize) -> f64 {
    let lo = (supply[0] - demand[1]).max(0.0);
    let hi = supply[0].min(demand[0]);
    let eval = |t: f64| {
        let x = [[t, supply[0] - t], [demand[0] - t, supply[1] - demand[0] + t]];
        (0..2)
            .flat_map(|i| (0..2).map(move |j| (i, j)))
            .map(|(i, j)| x[i][j].max(0.0) * cost[i][j])
            .sum::<f64>()
    };
    let mut best = eval(lo).min(eval(hi));
    for k in 1..steps {
        best = best.min(eval(lo + (hi - lo) * k as f64 / steps as f64));
    }
    best
}

/// Minimum cost over every basic feasible solution of a small balanced
/// transportation problem.
///
/// A basis is a set of m+n-1 cells forming a spanning tree of the bipartite
/// row/column graph; its flows follow by peeling leaves. Bases with a
/// negative flow are infeasible and skipped. Exponential: keep m·n ≤ 16.
pub fn transport_bfs(supply: &[f64], demand: &[f64], cost: &[f64]) -> f64 {
    let (m, n) = (supply.len(), demand.len());
    assert!(m * n <= 16, "enumeration is exponential in m·n");
    let k = m + n - 1;
    let cells: Vec<(usize, usize)> = (0..m).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    let mut best = f64::INFINITY;
    for combo in combinations(cells.len(), k) {
        let basis: Vec<(usize, usize)> = combo.iter().map(|&c| cells[c]).collect();
        if let Some(flows) = tree_flows(&basis, supply, demand) {
            if flows.iter().all(|&f| f >= -1e-12) {
                let c: f64 = basis.iter().zip(&flows).map(|(&(i, j), f)| f.max(0.0) * cost[i * n + j]).sum();
                best = best.min(c);
            }
        }
    }
    best
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for x in start..n {
            if n - x < k - cur.len() {
                break;
            }
            cur.push(x);
            rec(x + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Flows on a basis by leaf elimination; `None` when the cells do not form a
/// spanning tree.
fn tree_flows(basis: &[(usize, usize)], supply: &[f64], demand: &[f64]) -> Option<Vec<f64>> {
    let m = supply.len();
    let mut rest: Vec<f64> = supply.iter().chain(demand).copied().collect();
    let mut open: Vec<bool> = vec![true; basis.len()];
    let mut flows = vec![0.0; basis.len()];
    for _ in 0..basis.len() {
        let mut degree = vec![0usize; rest.len()];
        for (c, &(i, j)) in basis.iter().enumerate() {
            if open[c] {
                degree[i] += 1;
                degree[m + j] += 1;
            }
        }
        let (c, leaf) = basis.iter().enumerate().find_map(|(c, &(i, j))| {
            if !open[c] {
                None
            } else if degree[i] == 1 {
                Some((c, i))
            } else if degree[m + j] == 1 {
                Some((c, m + j))
            } else {
                None
            }
        })?;
        let (i, j) = basis[c];
        let f = rest[leaf];
        flows[c] = f;
        rest[i] -= f;
        rest[m + j] -= f;
        open[c] = false;
    }
    let scale = rest.iter().fold(1.0f64, |a, b| a.max(b.abs()));
    rest.iter().all(|r| r.abs() <= 1e-9 * scale).then_some(flows)
}

/// Earth mover's distance between two weighted point sets on a line:
/// the integral of the absolute difference of their cumulative weights.
pub fn emd_1d(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    let mut events: Vec<(f64, f64)> = a.iter().map(|&(x, w)| (x, w)).collect();
    events.extend(b.iter().map(|&(x, w)| (x, -w)));
    events.sort_by(|p, q| p.0.total_cmp(&q.0));
    let mut total = 0.0;
    let mut diff = 0.0;
    for pair in events.windows(2) {
        diff += pair[0].1;
        total += diff.abs() * (pair[1].0 - pair[0].0);
    }
    total
}

/// Connected components of an undirected graph on `0..n`, each sorted, the
/// list sorted by smallest member.
pub fn components(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut g = UnGraph::<(), ()>::with_capacity(n, edges.len());
    let nodes: Vec<_> = (0..n).map(|_| g.add_node(())).collect();
    for &(a, b) in edges {
        g.add_edge(nodes[a], nodes[b], ());
    }
    let mut comps: Vec<Vec<usize>> = petgraph::algo::kosaraju_scc(&g)
        .into_iter()
        .map(|c| {
            let mut v: Vec<usize> = c.into_iter().map(|x| x.index()).collect();
            v.sort_unstable();
            v
        })
        .collect();
    comps.sort();
    comps
}

/// Cohen's kappa in exact rational arithmetic. `None` for empty or unequal
/// inputs.
pub fn kappa_exact<T: Ord>(a: &[T], b: &[T]) -> Option<Ratio<i64>> {
    if a.is_empty() || a.len() != b.len() {
        return None;
    }
    let n = a.len() as i64;
    let agree = a.iter().zip(b).filter(|(x, y)| x == y).count() as i64;
    let cats: BTreeSet<&T> = a.iter().chain(b).collect();
    let chance_num: i64 = cats
        .iter()
        .map(|c| {
            let ca = a.iter().filter(|x| x == c).count() as i64;
            let cb = b.iter().filter(|x| x == c).count() as i64;
            ca * cb
        })
        .sum();
    let p_o = Ratio::new(agree, n);
    let p_e = Ratio::new(chance_num, n * n);
    let one = Ratio::from_integer(1);
    if p_e == one {
        return Some(if p_o == one { one } else { Ratio::from_integer(0) });
    }
    Some((p_o - p_e) / (one - p_e))
}

/// Dense rank by counting strictly better distinct values.
pub fn dense_rank_by<T: PartialOrd>(values: &[T], better: impl Fn(&T, &T) -> bool) -> Vec<usize> {
    values
        .iter()
        .map(|v| {
            let mut distinct: Vec<&T> = Vec::new();
            for w in values.iter().filter(|w| better(w, v)) {
                if !distinct.iter().any(|d| !better(d, w) && !better(w, d)) {
                    distinct.push(w);
                }
            }
            distinct.len() + 1
        })
        .collect()
}
