//! Exact solver for the balanced transportation problem
//!
//! ```text
//! min Σ c[i][j]·x[i][j]  s.t.  Σ_j x[i][j] = supply[i],  Σ_i x[i][j] = demand[j],  x ≥ 0
//! ```
//!
//! using the transportation simplex (MODI / u-v method). The basis is always
//! a spanning tree of m+n-1 cells over the bipartite row/column graph; zero
//! flows stay in the basis when the marginals are degenerate, so the plan is
//! never perturbed. Dantzig's rule picks the entering cell until a run of
//! degenerate pivots, after which Bland's smallest-index rule takes over to
//! rule out cycling.

use std::collections::VecDeque;

#[derive(Clone, Debug, PartialEq)]
pub struct TransportPlan {
    pub cost: f64,
    /// Non-zero flows as (row, column, amount).
    pub flows: Vec<(usize, usize, f64)>,
    pub pivots: usize,
}

struct Tableau<'a> {
    m: usize,
    n: usize,
    cost: &'a [f64],
    flow: Vec<f64>,
    basic: Vec<bool>,
}

const DEGENERATE_STREAK: usize = 32;

impl Tableau<'_> {
    fn c(&self, i: usize, j: usize) -> f64 {
        self.cost[i * self.n + j]
    }

    fn northwest_corner(&mut self, supply: &[f64], demand: &[f64]) {
        let mut s = supply.to_vec();
        let mut d = demand.to_vec();
        let (mut i, mut j) = (0, 0);
        while i < self.m && j < self.n {
            let amount = s[i].min(d[j]).max(0.0);
            self.flow[i * self.n + j] = amount;
            self.basic[i * self.n + j] = true;
            s[i] -= amount;
            d[j] -= amount;
            if i + 1 == self.m {
                j += 1;
            } else if j + 1 == self.n || s[i] <= d[j] {
                i += 1;
            } else {
                j += 1;
            }
        }
    }

    /// Node ids: rows are 0..m, columns m..m+n.
    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.m + self.n];
        for i in 0..self.m {
            for j in 0..self.n {
                if self.basic[i * self.n + j] {
                    adj[i].push(self.m + j);
                    adj[self.m + j].push(i);
                }
            }
        }
        adj
    }

    fn potentials(&self, adj: &[Vec<usize>]) -> (Vec<f64>, Vec<f64>) {
        let mut pot = vec![f64::NAN; self.m + self.n];
        pot[0] = 0.0;
        let mut queue = VecDeque::from([0]);
        while let Some(a) = queue.pop_front() {
            for &b in &adj[a] {
                if !pot[b].is_nan() {
                    continue;
                }
                let (i, j) = if a < self.m { (a, b - self.m) } else { (b, a - self.m) };
                pot[b] = self.c(i, j) - pot[a];
                queue.push_back(b);
            }
        }
        let v = pot.split_off(self.m);
        (pot, v)
    }

    /// Tree path from column node `j` to row node `i`, as cells.
    fn path(&self, adj: &[Vec<usize>], i: usize, j: usize) -> Vec<(usize, usize)> {
        let start = self.m + j;
        let mut parent = vec![usize::MAX; self.m + self.n];
        parent[start] = start;
        let mut queue = VecDeque::from([start]);
        while let Some(a) = queue.pop_front() {
            if a == i {
                break;
            }
            for &b in &adj[a] {
                if parent[b] == usize::MAX {
                    parent[b] = a;
                    queue.push_back(b);
                }
            }
        }
        let mut cells = Vec::new();
        let mut node = i;
        while node != start {
            let p = parent[node];
            assert!(p != usize::MAX, "basis is not a spanning tree");
            cells.push(if node < self.m { (node, p - self.m) } else { (p, node - self.m) });
            node = p;
        }
        cells.reverse();
        cells
    }
}

/// Solves a balanced problem. `cost` is row-major `supply.len() × demand.len()`.
///
/// Panics if the dimensions disagree, a marginal is negative, or the totals
/// differ by more than 1e-9 relative.
pub fn solve(supply: &[f64], demand: &[f64], cost: &[f64]) -> TransportPlan {
    let (m, n) = (supply.len(), demand.len());
    assert_eq!(cost.len(), m * n, "cost matrix shape");
    assert!(
        supply.iter().chain(demand).all(|&w| w >= 0.0 && w.is_finite()),
        "marginals must be finite and non-negative"
    );
    if m == 0 || n == 0 {
        return TransportPlan {
            cost: 0.0,
            flows: Vec::new(),
            pivots: 0,
        };
    }
    let total_s: f64 = supply.iter().sum();
    let total_d: f64 = demand.iter().sum();
    assert!(
        (total_s - total_d).abs() <= 1e-9 * total_s.max(total_d).max(1.0),
        "unbalanced problem: {total_s} vs {total_d}"
    );

    let mut t = Tableau {
        m,
        n,
        cost,
        flow: vec![0.0; m * n],
        basic: vec![false; m * n],
    };
    t.northwest_corner(supply, demand);

    let scale = cost.iter().fold(0.0f64, |a, &c| a.max(c.abs())).max(1.0);
    let eps = 1e-12 * scale;
    let max_pivots = 100 * (m * n + m + n) + 1000;
    let mut pivots = 0;
    let mut degenerate_run = 0;

    loop {
        let adj = t.adjacency();
        let (u, v) = t.potentials(&adj);
        let bland = degenerate_run >= DEGENERATE_STREAK;
        let mut entering = None;
        let mut best = -eps;
        'scan: for i in 0..m {
            for j in 0..n {
                if t.basic[i * n + j] {
                    continue;
                }
                let reduced = t.c(i, j) - u[i] - v[j];
                if reduced < best {
                    entering = Some((i, j));
                    if bland {
                        break 'scan;
                    }
                    best = reduced;
                }
            }
        }
        let Some((ei, ej)) = entering else {
            break;
        };
        pivots += 1;
        if pivots > max_pivots {
            log::error!("transportation simplex stopped after {max_pivots} pivots");
            break;
        }

        let path = t.path(&adj, ei, ej);
        // path[0] shares the entering column, so minus cells are the even positions
        let mut leaving = path[0];
        let mut theta = f64::INFINITY;
        for &(i, j) in path.iter().step_by(2) {
            let f = t.flow[i * n + j];
            if f < theta || (bland && f == theta && (i, j) < leaving) {
                theta = f;
                leaving = (i, j);
            }
        }
        degenerate_run = if theta <= 0.0 { degenerate_run + 1 } else { 0 };
        for (k, &(i, j)) in path.iter().enumerate() {
            let cell = &mut t.flow[i * n + j];
            if k % 2 == 0 {
                *cell -= theta;
            } else {
                *cell += theta;
            }
        }
        t.flow[ei * n + ej] = theta;
        t.basic[ei * n + ej] = true;
        t.basic[leaving.0 * n + leaving.1] = false;
        t.flow[leaving.0 * n + leaving.1] = 0.0;
    }

    let mut flows = Vec::new();
    let mut total = 0.0;
    for i in 0..m {
        for j in 0..n {
            let f = t.flow[i * n + j];
            if t.basic[i * n + j] && f > 0.0 {
                flows.push((i, j, f));
                total += f * t.c(i, j);
            }
        }
    }
    TransportPlan {
        cost: total,
        flows,
        pivots,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn marginals_hold(plan: &TransportPlan, supply: &[f64], demand: &[f64]) {
        let mut rows = vec![0.0; supply.len()];
        let mut cols = vec![0.0; demand.len()];
        for &(i, j, f) in &plan.flows {
            assert!(f >= 0.0);
            rows[i] += f;
            cols[j] += f;
        }
        for (a, b) in rows.iter().zip(supply).chain(cols.iter().zip(demand)) {
            assert!((a - b).abs() < 1e-12, "{rows:?} {cols:?}");
        }
    }

    #[test]
    fn single_source_has_one_plan() {
        // points 0 and 1 ship to 3
        let plan = solve(&[0.5, 0.5], &[1.0], &[3.0, 2.0]);
        assert!((plan.cost - 2.5).abs() < 1e-15);
        marginals_hold(&plan, &[0.5, 0.5], &[1.0]);
    }

    #[test]
    fn crossing_plan_is_improved() {
        // sources at 0 and 3, sinks at 1 and 4; north-west corner starts at cost 3.0
        let cost = [1.0, 4.0, 2.0, 1.0];
        let plan = solve(&[0.5, 0.5], &[0.5, 0.5], &cost);
        assert!((plan.cost - 1.0).abs() < 1e-15);
        assert!(plan.pivots <= 1);
    }

    #[test]
    fn degenerate_marginals_keep_a_tree() {
        let supply = [0.25, 0.25, 0.5];
        let demand = [0.25, 0.25, 0.5];
        let cost = [5.0, 1.0, 2.0, 1.0, 5.0, 2.0, 2.0, 2.0, 0.0];
        let plan = solve(&supply, &demand, &cost);
        marginals_hold(&plan, &supply, &demand);
        assert!((plan.cost - 0.5).abs() < 1e-15, "{plan:?}");
    }

    #[test]
    fn zero_rows_are_allowed() {
        let plan = solve(&[0.0, 1.0], &[1.0, 0.0], &[9.0, 9.0, 2.0, 7.0]);
        assert!((plan.cost - 2.0).abs() < 1e-15);
    }

    #[test]
    #[should_panic(expected = "unbalanced")]
    fn unbalanced_problem_panics() {
        solve(&[1.0], &[0.5], &[1.0]);
    }
}
