//! Exact optimal transport between two weighted node sets.
//!
//! Costs live in a premise-rows by hypothesis-columns matrix. Two problems
//! are solved over it:
//!
//! * **Symmetric**: every row ships exactly `1/rows` mass and every column
//!   receives exactly `1/cols`. Marginals are scaled by `lcm(rows, cols)` to
//!   integers and the resulting minimum-cost-flow instance is solved with
//!   successive shortest paths over integer fixed-point costs, so the
//!   objective is the linear program optimum up to the 2^-60 cost
//!   quantization — negligible against every tolerance used downstream.
//! * **Asymmetric**: columns still receive `1/cols` each, but rows may ship
//!   anywhere from nothing up to their full unit of mass. The optimum lets
//!   each column buy from its cheapest row; the same flow machinery is used
//!   so the returned plan is a genuine feasible flow.
//!
//! Objectives of the two modes obey `asymmetric <= symmetric` for any cost
//! matrix, since dropping the row constraint only enlarges the feasible set.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TransportError {
    #[error("cost matrix must be non-empty")]
    Empty,
    #[error("cost at ({row}, {col}) is {value}, expected a finite non-negative number")]
    BadCost { row: usize, col: usize, value: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransportMode {
    Symmetric,
    Asymmetric,
}

/// A dense rows-by-cols cost matrix with entries in `[0, ∞)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl CostMatrix {
    /// Builds a matrix from row-major data. Errors on empty shapes or
    /// non-finite / negative entries.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, TransportError> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(TransportError::Empty);
        }
        for (i, &value) in data.iter().enumerate() {
            if !value.is_finite() || value < 0.0 {
                return Err(TransportError::BadCost {
                    row: i / cols,
                    col: i % cols,
                    value,
                });
            }
        }
        Ok(CostMatrix { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }

    /// The closed-form optimal objective of the asymmetric problem: each
    /// column takes its full `1/cols` mass from a cheapest row.
    pub fn column_min_mean(&self) -> f64 {
        let mut sum = 0.0;
        for col in 0..self.cols {
            let mut min = f64::INFINITY;
            for row in 0..self.rows {
                min = min.min(self.at(row, col));
            }
            sum += min;
        }
        sum / self.cols as f64
    }
}

/// An optimal transport plan plus its objective value.
#[derive(Debug, Clone, PartialEq)]
pub struct Flow {
    rows: usize,
    cols: usize,
    mass: Vec<f64>,
    objective: f64,
}

impl Flow {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, row: usize, col: usize) -> f64 {
        self.mass[row * self.cols + col]
    }

    pub fn row_sum(&self, row: usize) -> f64 {
        (0..self.cols).map(|c| self.at(row, c)).sum()
    }

    pub fn col_sum(&self, col: usize) -> f64 {
        (0..self.rows).map(|r| self.at(r, col)).sum()
    }

    pub fn total(&self) -> f64 {
        self.mass.iter().sum()
    }

    /// `sum_ij F_ij * C_ij`, recomputed at full precision from the plan.
    pub fn objective(&self) -> f64 {
        self.objective
    }
}

/// Solves the transport problem over `c` exactly.
pub fn solve_transport(c: &CostMatrix, mode: TransportMode) -> Result<Flow, TransportError> {
    let m = c.rows;
    let n = c.cols;
    // Node layout: source, m rows, n cols, sink.
    let source = 0;
    let sink = m + n + 1;
    let mut net = FlowNetwork::new(m + n + 2);
    let mut row_arcs = Vec::with_capacity(m * n);
    let (scale, target) = match mode {
        TransportMode::Symmetric => {
            let scale = lcm(m as i64, n as i64);
            let supply = scale / m as i64;
            let demand = scale / n as i64;
            for row in 0..m {
                net.add_arc(source, 1 + row, supply, 0);
            }
            for col in 0..n {
                net.add_arc(1 + m + col, sink, demand, 0);
            }
            for row in 0..m {
                for col in 0..n {
                    row_arcs.push(net.add_arc(
                        1 + row,
                        1 + m + col,
                        supply.min(demand),
                        quantize(c.at(row, col)),
                    ));
                }
            }
            (scale, scale)
        }
        TransportMode::Asymmetric => {
            // Scale by the column count: each column needs one unit, each
            // row may ship up to its full mass of n units.
            let scale = n as i64;
            for row in 0..m {
                net.add_arc(source, 1 + row, scale, 0);
            }
            for col in 0..n {
                net.add_arc(1 + m + col, sink, 1, 0);
            }
            for row in 0..m {
                for col in 0..n {
                    row_arcs.push(net.add_arc(1 + row, 1 + m + col, 1, quantize(c.at(row, col))));
                }
            }
            (scale, scale)
        }
    };
    let shipped = net.send(source, sink, target);
    debug_assert_eq!(shipped, target, "transport instance is always feasible");
    let mut mass = vec![0.0; m * n];
    let mut objective = 0.0;
    for (k, &arc) in row_arcs.iter().enumerate() {
        let units = net.flow_on(arc);
        if units > 0 {
            let f = units as f64 / scale as f64;
            mass[k] = f;
            objective += f * c.data[k];
        }
    }
    Ok(Flow {
        rows: m,
        cols: n,
        mass,
        objective,
    })
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: i64, b: i64) -> i64 {
    a / gcd(a, b) * b
}

// ---------------------------------------------------------------------------
// Minimum-cost flow via successive shortest paths.
//
// Capacities are small integers. Costs are quantized to multiples of 2^-60
// and handled as exact i128 fixed-point numbers: float arithmetic inside
// Bellman-Ford could round a zero-cost residual cycle to a slightly negative
// sum, corrupting the predecessor chain, while integer arithmetic keeps the
// classical guarantee that the residual graph of an optimal flow has no
// negative cycle. Each augmentation finds a cheapest residual path (residual
// arcs may have negative cost) and saturates it, so with integral capacities
// the search terminates with an optimal integral flow for the quantized
// costs — within `total mass * 2^-60` of the true optimum, far below any
// tolerance used elsewhere.

/// Fixed-point scale for arc costs inside the flow search.
const COST_SCALE: f64 = (1u64 << 60) as f64;

fn quantize(cost: f64) -> i128 {
    (cost * COST_SCALE).round() as i128
}

struct Arc {
    to: usize,
    cap: i64,
    cost: i128,
}

struct FlowNetwork {
    adj: Vec<Vec<usize>>,
    arcs: Vec<Arc>,
}

impl FlowNetwork {
    fn new(nodes: usize) -> Self {
        FlowNetwork {
            adj: vec![Vec::new(); nodes],
            arcs: Vec::new(),
        }
    }

    /// Adds a forward arc and its residual twin; returns the forward index.
    fn add_arc(&mut self, from: usize, to: usize, cap: i64, cost: i128) -> usize {
        let id = self.arcs.len();
        self.adj[from].push(id);
        self.arcs.push(Arc { to, cap, cost });
        self.adj[to].push(id + 1);
        self.arcs.push(Arc {
            to: from,
            cap: 0,
            cost: -cost,
        });
        id
    }

    /// Flow currently on a forward arc (its residual twin's capacity).
    fn flow_on(&self, arc: usize) -> i64 {
        self.arcs[arc ^ 1].cap
    }

    /// Pushes up to `target` units from `s` to `t`, returning the amount
    /// actually shipped.
    fn send(&mut self, s: usize, t: usize, target: i64) -> i64 {
        let n = self.adj.len();
        let mut shipped = 0;
        while shipped < target {
            // Bellman-Ford over the residual network, in exact integers.
            const UNREACHED: i128 = i128::MAX;
            let mut dist = vec![UNREACHED; n];
            let mut pred: Vec<Option<usize>> = vec![None; n];
            dist[s] = 0;
            for _ in 0..n {
                let mut changed = false;
                for from in 0..n {
                    if dist[from] == UNREACHED {
                        continue;
                    }
                    for &aid in &self.adj[from] {
                        let arc = &self.arcs[aid];
                        let candidate = dist[from] + arc.cost;
                        if arc.cap > 0 && candidate < dist[arc.to] {
                            dist[arc.to] = candidate;
                            pred[arc.to] = Some(aid);
                            changed = true;
                        }
                    }
                }
                if !changed {
                    break;
                }
            }
            if pred[t].is_none() {
                break;
            }
            // Bottleneck along the path.
            let mut bottleneck = target - shipped;
            let mut node = t;
            while node != s {
                let aid = pred[node].expect("path reaches source");
                bottleneck = bottleneck.min(self.arcs[aid].cap);
                node = self.arcs[aid ^ 1].to;
            }
            let mut node = t;
            while node != s {
                let aid = pred[node].expect("path reaches source");
                self.arcs[aid].cap -= bottleneck;
                self.arcs[aid ^ 1].cap += bottleneck;
                node = self.arcs[aid ^ 1].to;
            }
            shipped += bottleneck;
        }
        shipped
    }
}
