use crate::coupling::Coupling;
use crate::error::{PgwError, Result};
use crate::generators::Graph;
use crate::network::Matrix;

fn check_type(ty: &[usize]) -> Result<()> {
    let Some((&m, cycles)) = ty.split_last() else {
        return Err(PgwError::InvalidInput("empty type vector".into()));
    };
    if cycles.is_empty() || cycles.iter().any(|&c| c < 3) || m < 2 {
        return Err(PgwError::InvalidInput(format!(
            "type {ty:?}: need at least one cycle length >= 3 and clique size >= 2"
        )));
    }
    Ok(())
}

/// Nested cycle of cliques of type `(n_1, ..., n_l, m)`: an `n_1`-cycle of
/// copies of type `(n_2, ..., n_l, m)` glued at their basepoints. Copies
/// occupy contiguous index blocks and each basepoint is the first vertex of
/// its block.
pub fn nested_cycle_of_cliques(ty: &[usize]) -> Result<Graph> {
    check_type(ty)?;
    let n: usize = ty.iter().product();
    let mut g = Graph::empty(n);
    build(&mut g, ty, 0)?;
    Ok(g)
}

fn build(g: &mut Graph, ty: &[usize], offset: usize) -> Result<()> {
    if ty.len() == 1 {
        let m = ty[0];
        for i in 0..m {
            for j in i + 1..m {
                g.add_edge(offset + i, offset + j)?;
            }
        }
        return Ok(());
    }
    let copies = ty[0];
    let size: usize = ty[1..].iter().product();
    for c in 0..copies {
        build(g, &ty[1..], offset + c * size)?;
    }
    for c in 0..copies {
        g.add_edge(offset + c * size, offset + ((c + 1) % copies) * size)?;
    }
    Ok(())
}

/// Whether a 0/1 pattern is the graph of a symmetry `a -> k +/- a (mod n)`
/// of the `n`-cycle.
fn is_cycle_symmetry(pattern: &[Vec<bool>]) -> bool {
    let n = pattern.len();
    let mut image = Vec::with_capacity(n);
    for row in pattern {
        let hits: Vec<usize> = (0..n).filter(|&b| row[b]).collect();
        if hits.len() != 1 {
            return false;
        }
        image.push(hits[0]);
    }
    let shift = image[0];
    let rotation = (0..n).all(|a| image[a] == (shift + a) % n);
    let reflection = (0..n).all(|a| image[a] == (shift + n - a) % n);
    rotation || reflection
}

/// For each scale `i`, whether the block sums of `pi` inside every heavy
/// scale-`(i-1)` block form a symmetry of the `n_i`-cycle once thresholded at
/// `threshold` times their maximum. Heavy parent blocks are those carrying at
/// least `threshold` times the heaviest parent's mass.
pub fn cyclic_block_analysis_with(pi: &Coupling, type_x: &[usize], type_y: &[usize], threshold: f64) -> Result<Vec<bool>> {
    check_type(type_x)?;
    check_type(type_y)?;
    let levels = type_x.len() - 1;
    if type_y.len() != type_x.len() || type_x[..levels] != type_y[..levels] {
        return Err(PgwError::InvalidInput(format!("types {type_x:?} and {type_y:?} do not share a cycle prefix")));
    }
    let (nx, ny): (usize, usize) = (type_x.iter().product(), type_y.iter().product());
    let p = pi.matrix();
    if p.shape() != (nx, ny) {
        return Err(PgwError::DimensionMismatch(format!("coupling is {:?}, types give {nx}x{ny}", p.shape())));
    }
    let block_sum = |r0: usize, rs: usize, c0: usize, cs: usize| p.view((r0, c0), (rs, cs)).sum();
    let mut out = Vec::with_capacity(levels);
    for scale in 0..levels {
        let parents: usize = type_x[..scale].iter().product();
        let px: usize = type_x[scale..].iter().product();
        let py: usize = type_y[scale..].iter().product();
        let k = type_x[scale];
        let (cx, cy) = (px / k, py / k);
        let masses = Matrix::from_fn(parents, parents, |a, b| block_sum(a * px, px, b * py, py));
        let heaviest = masses.max();
        let mut ok = heaviest > 0.0;
        'parents: for a in 0..parents {
            for b in 0..parents {
                if masses[(a, b)] < threshold * heaviest {
                    continue;
                }
                let agg = Matrix::from_fn(k, k, |i, j| block_sum(a * px + i * cx, cx, b * py + j * cy, cy));
                let cut = threshold * agg.max();
                let pattern: Vec<Vec<bool>> = (0..k).map(|i| (0..k).map(|j| agg[(i, j)] > cut).collect()).collect();
                if !is_cycle_symmetry(&pattern) {
                    ok = false;
                    break 'parents;
                }
            }
        }
        out.push(ok);
    }
    Ok(out)
}

/// [`cyclic_block_analysis_with`] at the default 10% threshold.
pub fn cyclic_block_analysis(pi: &Coupling, type_x: &[usize], type_y: &[usize]) -> Result<Vec<bool>> {
    cyclic_block_analysis_with(pi, type_x, type_y, 0.1)
}
