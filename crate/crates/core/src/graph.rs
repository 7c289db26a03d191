//! Digraph helpers over adjacency lists: strongly connected components,
//! reachability, and the period / cyclic layering of a strongly connected
//! component.

use std::collections::VecDeque;

pub fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn lcm(a: usize, b: usize) -> usize {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd(a, b) * b
    }
}

pub fn reverse(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut rev = vec![Vec::new(); adj.len()];
    for (u, succ) in adj.iter().enumerate() {
        for &v in succ {
            rev[v].push(u);
        }
    }
    rev
}

/// States reachable from `sources` in zero or more steps.
pub fn reachable(adj: &[Vec<usize>], sources: impl IntoIterator<Item = usize>) -> Vec<bool> {
    let mut seen = vec![false; adj.len()];
    let mut queue = VecDeque::new();
    for s in sources {
        if !seen[s] {
            seen[s] = true;
            queue.push_back(s);
        }
    }
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    seen
}

/// States reachable from `x` in one or more steps.
pub fn reachable_strict(adj: &[Vec<usize>], x: usize) -> Vec<bool> {
    reachable(adj, adj[x].iter().copied())
}

/// Strongly connected components (iterative Tarjan). Each component is
/// sorted; components are returned sorted by their smallest member.
pub fn strongly_connected_components(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = adj.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comps = Vec::new();
    let mut next = 0usize;

    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        // (vertex, next edge position)
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (u, ref mut pos)) = call.last_mut() {
            if *pos < adj[u].len() {
                let v = adj[u][*pos];
                *pos += 1;
                if index[v] == usize::MAX {
                    index[v] = next;
                    low[v] = next;
                    next += 1;
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
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack underflow");
                        on_stack[w] = false;
                        comp.push(w);
                        if w == u {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    comps.push(comp);
                }
            }
        }
    }
    comps.sort_by_key(|c| c[0]);
    comps
}

/// Period of a strongly connected component and the BFS level of each member
/// modulo the period. Returns `None` for a single vertex without a self-loop
/// (no cycle through the component).
pub fn period_and_phases(adj: &[Vec<usize>], members: &[usize]) -> Option<(usize, Vec<usize>)> {
    let n = adj.len();
    let mut in_comp = vec![false; n];
    for &m in members {
        in_comp[m] = true;
    }
    let root = members[0];
    let mut level = vec![usize::MAX; n];
    level[root] = 0;
    let mut queue = VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if in_comp[v] && level[v] == usize::MAX {
                level[v] = level[u] + 1;
                queue.push_back(v);
            }
        }
    }
    let mut g = 0usize;
    for &u in members {
        for &v in &adj[u] {
            if in_comp[v] {
                let diff = (level[u] + 1).abs_diff(level[v]);
                g = gcd(g, diff);
            }
        }
    }
    if g == 0 {
        return None;
    }
    Some((g, members.iter().map(|&m| level[m] % g).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scc_of_two_cycles_and_tail() {
        // 0 <-> 1, 2 -> 0, 3 -> 3
        let adj = vec![vec![1], vec![0], vec![0], vec![3]];
        let comps = strongly_connected_components(&adj);
        assert_eq!(comps, vec![vec![0, 1], vec![2], vec![3]]);
    }

    #[test]
    fn period_of_three_cycle_with_chord() {
        // 0 -> 1 -> 2 -> 0 plus 0 -> 2 (cycle lengths 3 and 2)
        let adj = vec![vec![1, 2], vec![2], vec![0]];
        let (p, _) = period_and_phases(&adj, &[0, 1, 2]).unwrap();
        assert_eq!(p, 1);
        let adj = vec![vec![1], vec![2], vec![0]];
        let (p, phases) = period_and_phases(&adj, &[0, 1, 2]).unwrap();
        assert_eq!(p, 3);
        assert_eq!(phases, vec![0, 1, 2]);
    }

    #[test]
    fn lone_vertex_has_no_period() {
        let adj = vec![vec![1], vec![1]];
        assert!(period_and_phases(&adj, &[0]).is_none());
        assert_eq!(period_and_phases(&adj, &[1]).unwrap().0, 1);
    }

    #[test]
    fn gcd_lcm() {
        assert_eq!(gcd(12, 18), 6);
        assert_eq!(lcm(4, 6), 12);
        assert_eq!(gcd(0, 5), 5);
    }

    #[test]
    fn deep_path_does_not_overflow() {
        let n = 200_000;
        let adj: Vec<Vec<usize>> = (0..n).map(|i| vec![(i + 1) % n]).collect();
        let comps = strongly_connected_components(&adj);
        assert_eq!(comps.len(), 1);
    }
}
