//! Plain adjacency-list graph utilities shared by the automaton and chain
//! algorithms: reachability, shortest paths and strongly connected components.

use std::collections::VecDeque;

pub type Adjacency = Vec<Vec<usize>>;

pub fn reverse(adj: &Adjacency) -> Adjacency {
    let mut rev = vec![Vec::new(); adj.len()];
    for (u, succ) in adj.iter().enumerate() {
        for &v in succ {
            rev[v].push(u);
        }
    }
    rev
}

/// Vertices reachable from `sources` (sources included).
pub fn reachable(adj: &Adjacency, sources: impl IntoIterator<Item = usize>) -> Vec<bool> {
    let mut seen = vec![false; adj.len()];
    let mut stack: Vec<usize> = Vec::new();
    for s in sources {
        if !seen[s] {
            seen[s] = true;
            stack.push(s);
        }
    }
    while let Some(u) = stack.pop() {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    seen
}

/// Vertices that can reach some vertex in `targets` (targets included).
pub fn can_reach(adj: &Adjacency, targets: impl IntoIterator<Item = usize>) -> Vec<bool> {
    reachable(&reverse(adj), targets)
}

/// Breadth-first shortest path from any source to any vertex satisfying
/// `goal`, returned as the vertex sequence. `None` if no goal is reachable.
pub fn shortest_path(
    adj: &Adjacency,
    sources: impl IntoIterator<Item = usize>,
    goal: impl Fn(usize) -> bool,
) -> Option<Vec<usize>> {
    let n = adj.len();
    let mut parent = vec![usize::MAX; n];
    let mut seen = vec![false; n];
    let mut queue = VecDeque::new();
    for s in sources {
        if !seen[s] {
            seen[s] = true;
            queue.push_back(s);
        }
    }
    while let Some(u) = queue.pop_front() {
        if goal(u) {
            let mut path = vec![u];
            let mut cur = u;
            while parent[cur] != usize::MAX {
                cur = parent[cur];
                path.push(cur);
            }
            path.reverse();
            return Some(path);
        }
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                parent[v] = u;
                queue.push_back(v);
            }
        }
    }
    None
}

/// Strongly connected components.
#[derive(Clone, Debug)]
pub struct Sccs {
    /// Component id of each vertex. Ids are in reverse topological order:
    /// every edge goes from a component to one with an equal or smaller id.
    pub component: Vec<usize>,
    pub members: Vec<Vec<usize>>,
}

impl Sccs {
    /// Iterative Tarjan.
    pub fn new(adj: &Adjacency) -> Self {
        let n = adj.len();
        const UNVISITED: usize = usize::MAX;
        let mut index = vec![UNVISITED; n];
        let mut low = vec![0; n];
        let mut on_stack = vec![false; n];
        let mut stack = Vec::new();
        let mut component = vec![UNVISITED; n];
        let mut members: Vec<Vec<usize>> = Vec::new();
        let mut counter = 0;
        let mut call: Vec<(usize, usize)> = Vec::new();

        for root in 0..n {
            if index[root] != UNVISITED {
                continue;
            }
            call.push((root, 0));
            index[root] = counter;
            low[root] = counter;
            counter += 1;
            stack.push(root);
            on_stack[root] = true;

            while let Some(&mut (u, ref mut next)) = call.last_mut() {
                if *next < adj[u].len() {
                    let v = adj[u][*next];
                    *next += 1;
                    if index[v] == UNVISITED {
                        index[v] = counter;
                        low[v] = counter;
                        counter += 1;
                        stack.push(v);
                        on_stack[v] = true;
                        call.push((v, 0));
                    } else if on_stack[v] {
                        low[u] = low[u].min(index[v]);
                    }
                } else {
                    call.pop();
                    if let Some(&(parent, _)) = call.last() {
                        low[parent] = low[parent].min(low[u]);
                    }
                    if low[u] == index[u] {
                        let id = members.len();
                        let mut scc = Vec::new();
                        loop {
                            let w = stack.pop().expect("tarjan stack underflow");
                            on_stack[w] = false;
                            component[w] = id;
                            scc.push(w);
                            if w == u {
                                break;
                            }
                        }
                        scc.sort_unstable();
                        members.push(scc);
                    }
                }
            }
        }
        Sccs { component, members }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// A component is nontrivial when it contains a cycle: more than one
    /// vertex, or a single vertex with a self-loop.
    pub fn is_nontrivial(&self, adj: &Adjacency, id: usize) -> bool {
        let m = &self.members[id];
        m.len() > 1 || adj[m[0]].contains(&m[0])
    }

    /// Components with no edge leaving them.
    pub fn is_bottom(&self, adj: &Adjacency, id: usize) -> bool {
        self.members[id].iter().all(|&u| adj[u].iter().all(|&v| self.component[v] == id))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn components_and_order() {
        // 0 -> 1 -> 2 -> 1, 2 -> 3, 3 -> 3
        let adj = vec![vec![1], vec![2], vec![1, 3], vec![3]];
        let sccs = Sccs::new(&adj);
        assert_eq!(sccs.len(), 3);
        assert_eq!(sccs.component[1], sccs.component[2]);
        for (u, succ) in adj.iter().enumerate() {
            for &v in succ {
                assert!(sccs.component[v] <= sccs.component[u]);
            }
        }
        let c0 = sccs.component[0];
        let c3 = sccs.component[3];
        assert!(!sccs.is_nontrivial(&adj, c0));
        assert!(sccs.is_nontrivial(&adj, c3));
        assert!(sccs.is_bottom(&adj, c3));
        assert!(!sccs.is_bottom(&adj, sccs.component[1]));
    }

    #[test]
    fn paths_and_reachability() {
        let adj = vec![vec![1, 2], vec![3], vec![3], vec![]];
        assert_eq!(shortest_path(&adj, [0], |v| v == 3).unwrap().len(), 3);
        assert!(shortest_path(&adj, [3], |v| v == 0).is_none());
        assert_eq!(can_reach(&adj, [3]), vec![true; 4]);
        assert_eq!(reachable(&adj, [1]), vec![false, true, false, true]);
    }

    #[test]
    fn deep_chain_does_not_overflow() {
        let n = 200_000;
        let adj: Adjacency = (0..n).map(|i| if i + 1 < n { vec![i + 1] } else { vec![0] }).collect();
        let sccs = Sccs::new(&adj);
        assert_eq!(sccs.len(), 1);
    }
}
