//! Exact isomorphism search by backtracking over colour-refined partitions.

use std::collections::{BTreeMap, VecDeque};
use std::ops::ControlFlow;

use super::{FiniteGraph, GraphError};

/// Colour refinement run jointly on `a` and `b`, so equal colours are
/// comparable across the two graphs. Pinned pairs start in private classes.
fn refine(a: &FiniteGraph, b: &FiniteGraph, pins: &[(usize, usize)]) -> (Vec<usize>, Vec<usize>) {
    let na = a.order();
    let graphs = [a, b];
    let mut colour = vec![0usize; na + b.order()];
    let mut initial: Vec<(usize, usize)> = Vec::with_capacity(colour.len());
    for (side, g) in graphs.iter().enumerate() {
        for x in 0..g.order() {
            let pin = pins
                .iter()
                .position(|p| if side == 0 { p.0 == x } else { p.1 == x })
                .map_or(0, |i| i + 1);
            initial.push((pin, g.nbrs(x).len()));
        }
    }
    let mut ids: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for key in &initial {
        let next = ids.len();
        ids.entry(*key).or_insert(next);
    }
    // Renumber in key order so colour ids do not depend on vertex order.
    let rank: BTreeMap<_, _> = ids.keys().enumerate().map(|(i, k)| (*k, i)).collect();
    for (i, key) in initial.iter().enumerate() {
        colour[i] = rank[key];
    }
    let mut classes = rank.len();
    loop {
        let mut keys: Vec<(usize, Vec<usize>)> = Vec::with_capacity(colour.len());
        for (side, g) in graphs.iter().enumerate() {
            let offset = if side == 0 { 0 } else { na };
            for x in 0..g.order() {
                let mut around: Vec<usize> =
                    g.nbrs(x).iter().map(|&y| colour[offset + y]).collect();
                around.sort_unstable();
                keys.push((colour[offset + x], around));
            }
        }
        let mut sorted: Vec<&(usize, Vec<usize>)> = keys.iter().collect();
        sorted.sort();
        sorted.dedup();
        if sorted.len() == classes {
            break;
        }
        classes = sorted.len();
        let rank: BTreeMap<&(usize, Vec<usize>), usize> = sorted
            .into_iter()
            .enumerate()
            .map(|(i, k)| (k, i))
            .collect();
        colour = keys.iter().map(|k| rank[k]).collect();
    }
    let cb = colour.split_off(na);
    (colour, cb)
}

/// Calls `visit` for every isomorphism `a → b` extending `pins`, in a
/// deterministic order, until it returns `ControlFlow::Break`.
pub fn for_each_isomorphism<F>(
    a: &FiniteGraph,
    b: &FiniteGraph,
    pins: &[(usize, usize)],
    mut visit: F,
) -> Result<(), GraphError>
where
    F: FnMut(&[usize]) -> ControlFlow<()>,
{
    for &(x, y) in pins {
        a.check(x)?;
        b.check(y)?;
    }
    let n = a.order();
    if n != b.order() || a.edge_count() != b.edge_count() {
        return Ok(());
    }
    if n == 0 {
        let _ = visit(&[]);
        return Ok(());
    }
    let (ca, cb) = refine(a, b, pins);
    let mut hist_a = ca.clone();
    let mut hist_b = cb.clone();
    hist_a.sort_unstable();
    hist_b.sort_unstable();
    if hist_a != hist_b {
        return Ok(());
    }

    // Search order: BFS from the pins, then from the least unvisited vertex.
    let mut order = Vec::with_capacity(n);
    let mut parent: Vec<Option<usize>> = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    let starts = pins.iter().map(|p| p.0).chain(0..n).collect::<Vec<_>>();
    for s in starts {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut queue = VecDeque::from([(s, None)]);
        while let Some((x, p)) = queue.pop_front() {
            order.push(x);
            parent.push(p);
            for &y in a.nbrs(x) {
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back((y, Some(x)));
                }
            }
        }
    }
    let pinned: BTreeMap<usize, usize> = pins.iter().copied().collect();

    let mut map = vec![usize::MAX; n];
    let mut inv = vec![usize::MAX; n];
    let candidates = |k: usize, map: &[usize], inv: &[usize]| -> Vec<usize> {
        let x = order[k];
        let pool: Vec<usize> = if let Some(&y) = pinned.get(&x) {
            vec![y]
        } else if let Some(p) = parent[k] {
            b.nbrs(map[p]).to_vec()
        } else {
            (0..n).collect()
        };
        pool.into_iter()
            .filter(|&y| inv[y] == usize::MAX && cb[y] == ca[x])
            .filter(|&y| {
                let mut mapped = 0;
                for &w in a.nbrs(x) {
                    if map[w] != usize::MAX {
                        if !b.has_edge(map[w], y) {
                            return false;
                        }
                        mapped += 1;
                    }
                }
                let mapped_b = b.nbrs(y).iter().filter(|&&z| inv[z] != usize::MAX).count();
                mapped == mapped_b
            })
            .collect()
    };

    let mut stack: Vec<(Vec<usize>, usize)> = vec![(candidates(0, &map, &inv), 0)];
    while !stack.is_empty() {
        let k = stack.len() - 1;
        let x = order[k];
        let (cands, next) = stack.last_mut().expect("stack is non-empty");
        if map[x] != usize::MAX {
            inv[map[x]] = usize::MAX;
            map[x] = usize::MAX;
        }
        if *next == cands.len() {
            stack.pop();
            continue;
        }
        let y = cands[*next];
        *next += 1;
        map[x] = y;
        inv[y] = x;
        if k + 1 == n {
            if visit(&map).is_break() {
                return Ok(());
            }
            continue;
        }
        let c = candidates(k + 1, &map, &inv);
        stack.push((c, 0));
    }
    Ok(())
}

/// Some isomorphism `a → b` respecting `pins`, as `map[x]` = image of `x`.
pub fn find_isomorphism(
    a: &FiniteGraph,
    b: &FiniteGraph,
    pins: &[(usize, usize)],
) -> Result<Option<Vec<usize>>, GraphError> {
    let mut found = None;
    for_each_isomorphism(a, b, pins, |m| {
        found = Some(m.to_vec());
        ControlFlow::Break(())
    })?;
    Ok(found)
}

/// All automorphisms of `g`, in the search order (identity first).
pub fn automorphisms(g: &FiniteGraph) -> Vec<Vec<usize>> {
    let mut all = Vec::new();
    for_each_isomorphism(g, g, &[], |m| {
        all.push(m.to_vec());
        ControlFlow::Continue(())
    })
    .expect("no pins to validate");
    all.sort();
    all
}

pub fn automorphism_group_order(g: &FiniteGraph) -> Result<usize, GraphError> {
    if !g.is_connected() {
        return Err(GraphError::Disconnected);
    }
    let mut count = 0;
    for_each_isomorphism(g, g, &[], |_| {
        count += 1;
        ControlFlow::Continue(())
    })?;
    Ok(count)
}

/// True iff every vertex lies in the orbit of vertex 0.
pub fn is_vertex_transitive(g: &FiniteGraph) -> Result<bool, GraphError> {
    if !g.is_connected() {
        return Err(GraphError::Disconnected);
    }
    for t in 1..g.order() {
        if find_isomorphism(g, g, &[(0, t)])?.is_none() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn preserves_adjacency(a: &FiniteGraph, b: &FiniteGraph, m: &[usize]) -> bool {
        (0..a.order()).all(|x| (0..a.order()).all(|y| a.has_edge(x, y) == b.has_edge(m[x], m[y])))
    }

    #[test]
    fn isomorphism_examples() {
        let c4 = FiniteGraph::cycle(4);
        let m = find_isomorphism(&c4, &c4, &[]).unwrap().unwrap();
        assert!(preserves_adjacency(&c4, &c4, &m));
        assert!(find_isomorphism(&c4, &FiniteGraph::path(4), &[])
            .unwrap()
            .is_none());

        // Labelled path b1-b2-b0 against 0-1-2 with b2 pinned to the middle.
        let g2 = FiniteGraph::new(3, &[(1, 2), (2, 0)]).unwrap();
        let m = find_isomorphism(&g2, &FiniteGraph::path(3), &[(2, 1)])
            .unwrap()
            .unwrap();
        assert_eq!(m[2], 1);
        assert_eq!(
            {
                let mut e = vec![m[0], m[1]];
                e.sort();
                e
            },
            vec![0, 2]
        );

        assert!(find_isomorphism(&c4, &c4, &[(9, 0)]).is_err());
    }

    #[test]
    fn pins_that_cannot_extend_give_none() {
        let p3 = FiniteGraph::path(3);
        assert!(find_isomorphism(&p3, &p3, &[(0, 1)]).unwrap().is_none());
    }

    #[test]
    fn automorphism_counts() {
        assert_eq!(automorphism_group_order(&FiniteGraph::cycle(3)).unwrap(), 6);
        assert!(is_vertex_transitive(&FiniteGraph::cycle(3)).unwrap());
        assert_eq!(automorphism_group_order(&FiniteGraph::path(3)).unwrap(), 2);
        assert!(!is_vertex_transitive(&FiniteGraph::path(3)).unwrap());
        assert_eq!(automorphism_group_order(&FiniteGraph::path(2)).unwrap(), 2);
        assert!(is_vertex_transitive(&FiniteGraph::path(2)).unwrap());
        assert_eq!(
            automorphism_group_order(&FiniteGraph::complete(4)).unwrap(),
            24
        );
        assert_eq!(
            automorphism_group_order(&FiniteGraph::cycle(5)).unwrap(),
            10
        );
        assert_eq!(automorphism_group_order(&FiniteGraph::star(3)).unwrap(), 6);
        // Petersen graph: 120 automorphisms, vertex-transitive.
        let mut edges = Vec::new();
        for i in 0..5 {
            edges.push((i, (i + 1) % 5));
            edges.push((i, i + 5));
            edges.push((5 + i, 5 + (i + 2) % 5));
        }
        let petersen = FiniteGraph::new(10, &edges).unwrap();
        assert_eq!(automorphism_group_order(&petersen).unwrap(), 120);
        assert!(is_vertex_transitive(&petersen).unwrap());
    }

    #[test]
    fn every_enumerated_automorphism_preserves_edges() {
        let g =
            FiniteGraph::new(6, &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5), (5, 3)]).unwrap();
        let auts = automorphisms(&g);
        assert_eq!(auts.len(), 8);
        for m in &auts {
            assert!(preserves_adjacency(&g, &g, m));
        }
        assert_eq!(auts[0], (0..6).collect::<Vec<_>>());
    }
}
