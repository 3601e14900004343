//! Exact influence by enumerating every retained-edge pattern.

use crate::error::{Error, Result};
use crate::graph::{InfluencerSet, ProbGraph};

/// Most Bernoulli variables the enumeration accepts.
pub const ORACLE_EDGE_LIMIT: usize = 24;

struct Variables {
    // (variable index, neighbour) per node; a symmetric pair shares one variable
    adj: Vec<Vec<(usize, usize)>>,
    probs: Vec<f64>,
}

fn variables(g: &ProbGraph) -> Result<Variables> {
    let mut var_of_key = vec![usize::MAX; g.edge_count()];
    let mut probs = Vec::new();
    let mut adj = vec![Vec::new(); g.node_count()];
    for id in 0..g.edge_count() {
        let key = g.draw_key(id);
        if var_of_key[key] == usize::MAX {
            var_of_key[key] = probs.len();
            probs.push(g.edge(key).p);
        }
        let e = g.edge(id);
        adj[e.src].push((var_of_key[key], e.dst));
    }
    if probs.len() > ORACLE_EDGE_LIMIT {
        return Err(Error::OracleLimit { edges: probs.len(), limit: ORACLE_EDGE_LIMIT });
    }
    Ok(Variables { adj, probs })
}

fn reach_count(vars: &Variables, mask: u32, seeds: &[usize], seen: &mut [bool], stack: &mut Vec<usize>) -> usize {
    seen.iter_mut().for_each(|s| *s = false);
    stack.clear();
    let mut count = 0;
    for &s in seeds {
        if !seen[s] {
            seen[s] = true;
            stack.push(s);
            count += 1;
        }
    }
    while let Some(i) = stack.pop() {
        for &(var, j) in &vars.adj[i] {
            if mask & (1 << var) != 0 && !seen[j] {
                seen[j] = true;
                stack.push(j);
                count += 1;
            }
        }
    }
    count
}

/// Σ over all 2^m retained-edge patterns of P(pattern)·|reachable(seeds)|.
fn enumerate(g: &ProbGraph, seed_sets: &[Vec<usize>]) -> Result<Vec<f64>> {
    let vars = variables(g)?;
    let m = vars.probs.len();
    let mut seen = vec![false; g.node_count()];
    let mut stack = Vec::new();
    let mut totals = vec![0.0; seed_sets.len()];
    for mask in 0u32..(1u32 << m) {
        let weight: f64 = vars
            .probs
            .iter()
            .enumerate()
            .map(|(k, &p)| if mask & (1 << k) != 0 { p } else { 1.0 - p })
            .product();
        if weight == 0.0 {
            continue;
        }
        for (total, seeds) in totals.iter_mut().zip(seed_sets) {
            *total += weight * reach_count(&vars, mask, seeds, &mut seen, &mut stack) as f64;
        }
    }
    Ok(totals)
}

/// Exact σ(A). Symmetric graphs enumerate one variable per undirected edge.
pub fn exact_influence_bruteforce(g: &ProbGraph, a: &InfluencerSet) -> Result<f64> {
    a.check_dimension(g.node_count())?;
    Ok(enumerate(g, &[a.members().to_vec()])?[0])
}

/// Exact influence averaged over all `C(n, n0)` influencer sets.
pub fn exact_uniform_influence_bruteforce(g: &ProbGraph, n0: usize) -> Result<f64> {
    let n = g.node_count();
    if n0 == 0 || n0 > n {
        return Err(Error::InvalidArgument(format!("need 1 <= n0 <= n, got n0 = {n0}")));
    }
    if n > 20 {
        return Err(Error::InvalidArgument(format!("uniform oracle supports n <= 20, got {n}")));
    }
    let sets: Vec<Vec<usize>> = (0u32..(1 << n))
        .filter(|m| m.count_ones() as usize == n0)
        .map(|m| (0..n).filter(|&v| m & (1 << v) != 0).collect())
        .collect();
    let totals = enumerate(g, &sets)?;
    Ok(totals.iter().sum::<f64>() / sets.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Edge;

    #[test]
    fn two_node() {
        let g = ProbGraph::new(2, [Edge::new(0, 1, 0.5)]).unwrap();
        let v = exact_influence_bruteforce(&g, &InfluencerSet::single(0, 2).unwrap()).unwrap();
        assert!((v - 1.5).abs() < 1e-15);
    }

    #[test]
    fn triangle_matches_closed_form() {
        let p = 0.5;
        let g = ProbGraph::undirected(3, [(0, 1, p), (1, 2, p), (0, 2, p)]).unwrap();
        let v = exact_influence_bruteforce(&g, &InfluencerSet::single(0, 3).unwrap()).unwrap();
        assert!((v - 2.25).abs() < 1e-14);
        assert!((v - (1.0 + 2.0 * (p + (1.0 - p) * p * p))).abs() < 1e-14);
    }

    #[test]
    fn directed_triangle_enumerates_directed_edges() {
        // both directions present but with different probabilities: 6 variables
        let edges = [(0, 1, 0.3), (1, 0, 0.6), (1, 2, 0.2), (2, 1, 0.9), (0, 2, 0.5), (2, 0, 0.1)]
            .map(|(s, d, p)| Edge::new(s, d, p));
        let g = ProbGraph::new(3, edges).unwrap();
        let v = exact_influence_bruteforce(&g, &InfluencerSet::single(0, 3).unwrap()).unwrap();
        // P(1 reached) = 1 - (1 - 0.3)(1 - 0.5·0.9); P(2 reached) = 1 - (1 - 0.5)(1 - 0.3·0.2)
        let expected = 1.0 + (1.0 - 0.7 * 0.55) + (1.0 - 0.5 * 0.94);
        assert!((v - expected).abs() < 1e-14, "{v} vs {expected}");
    }

    #[test]
    fn star() {
        let g = ProbGraph::undirected(5, (1..5).map(|j| (0, j, 0.3))).unwrap();
        let v = exact_influence_bruteforce(&g, &InfluencerSet::single(0, 5).unwrap()).unwrap();
        assert!((v - 2.2).abs() < 1e-14);
    }

    #[test]
    fn oracle_limit() {
        let g = ProbGraph::new(30, (0..29).map(|i| Edge::new(i, i + 1, 0.5))).unwrap();
        assert!(matches!(
            exact_influence_bruteforce(&g, &InfluencerSet::single(0, 30).unwrap()),
            Err(Error::OracleLimit { edges: 29, limit: 24 })
        ));
        // undirected: 29 pairs still exceed the limit
        let g = ProbGraph::undirected(30, (0..29).map(|i| (i, i + 1, 0.5))).unwrap();
        assert!(exact_influence_bruteforce(&g, &InfluencerSet::single(0, 30).unwrap()).is_err());
    }

    #[test]
    fn uniform_average() {
        let g = ProbGraph::new(2, [Edge::new(0, 1, 0.5)]).unwrap();
        // A = {0}: 1.5, A = {1}: 1
        assert!((exact_uniform_influence_bruteforce(&g, 1).unwrap() - 1.25).abs() < 1e-15);
        assert_eq!(exact_uniform_influence_bruteforce(&g, 2).unwrap(), 2.0);
    }
}
