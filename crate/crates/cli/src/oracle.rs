//! Exhaustive enumeration of structures by index, independent of the
//! solvers' own search.

use noncross_core::geometry::Structure;

fn permutations(n: usize, out: &mut Vec<Vec<usize>>) {
    fn rec(cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    rec(&mut Vec::with_capacity(n), &mut vec![false; n], out);
}

/// One representative per undirected path: first endpoint smaller.
pub fn all_paths(n: usize) -> Vec<Structure> {
    let mut perms = Vec::new();
    permutations(n, &mut perms);
    perms.into_iter().filter(|p| n < 2 || p[0] < p[n - 1]).map(Structure::Path).collect()
}

/// One representative per undirected cycle: starts at 0, second vertex
/// smaller than the last.
pub fn all_cycles(n: usize) -> Vec<Structure> {
    let mut perms = Vec::new();
    permutations(n, &mut perms);
    perms.into_iter().filter(|p| p[0] == 0 && p[1] < p[n - 1]).map(Structure::Cycle).collect()
}

/// Every perfect matching, pairs sorted.
pub fn all_matchings(n: usize) -> Vec<Structure> {
    fn rec(free: &mut Vec<usize>, cur: &mut Vec<(usize, usize)>, out: &mut Vec<Structure>) {
        if free.is_empty() {
            let mut m = cur.clone();
            m.sort();
            out.push(Structure::Matching(m));
            return;
        }
        let a = free.remove(0);
        for j in 0..free.len() {
            let b = free.remove(j);
            cur.push((a, b));
            rec(free, cur, out);
            cur.pop();
            free.insert(j, b);
        }
        free.insert(0, a);
    }
    let mut out = Vec::new();
    if n.is_multiple_of(2) {
        rec(&mut (0..n).collect(), &mut Vec::new(), &mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        assert_eq!(all_paths(6).len(), 360);
        assert_eq!(all_cycles(6).len(), 60);
        assert_eq!(all_matchings(6).len(), 15);
        assert_eq!(all_matchings(12).len(), 10395);
        assert!(all_matchings(5).is_empty());
    }

    #[test]
    fn representatives_are_canonical() {
        for s in all_paths(5).into_iter().chain(all_cycles(5)).chain(all_matchings(6)) {
            assert_eq!(s.canonical(), s);
        }
    }
}
