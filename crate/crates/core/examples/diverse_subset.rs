//! Pick a diverse subset of 2-D points under a partition constraint.
//!
//! Run: `cargo run --example diverse_subset`

use maxdiv::dispersion::dispersion;
use maxdiv::distance::{DistanceMatrix, Kernel, PointSet};
use maxdiv::local_search::{default_iterations, greedy_baseline, local_search};
use maxdiv::matroid::Matroid;
use maxdiv::oracle::brute_force_msd;

fn main() {
    // Two clusters plus an outlier; ids carry the cluster.
    let points = PointSet::new(
        vec![
            "a0".into(),
            "a1".into(),
            "a2".into(),
            "b0".into(),
            "b1".into(),
            "b2".into(),
            "solo".into(),
        ],
        vec![
            vec![0.0, 0.0],
            vec![0.2, 0.1],
            vec![0.1, 0.3],
            vec![4.0, 4.0],
            vec![4.2, 3.9],
            vec![3.9, 4.1],
            vec![0.0, 8.0],
        ],
    )
    .unwrap();
    let d = DistanceMatrix::from_points(&points, Kernel::Euclidean).unwrap();

    // At most two picks per cluster, the outlier always allowed.
    let m = Matroid::partition_from_blocks(
        7,
        &[vec![0, 1, 2], vec![3, 4, 5], vec![6]],
        &[2, 2, 1],
    )
    .unwrap();
    let k = m.rank();

    let greedy = greedy_baseline(&d, &m);
    let (found, trace) = local_search(&d, &m, default_iterations(k));
    let (opt, opt_value) = brute_force_msd(&d, &m).unwrap();

    let names = |set: &[usize]| -> Vec<&str> {
        set.iter().map(|&i| points.ids()[i].as_str()).collect()
    };
    println!("greedy       {:?}  d = {:.3}", names(&greedy), dispersion(&d, &greedy));
    println!(
        "local search {:?}  d = {:.3}  ({} swaps, {} distance evals)",
        names(&found),
        dispersion(&d, &found),
        trace.iterations.len(),
        trace.distance_evals
    );
    println!("optimum      {:?}  d = {:.3}", names(&opt), opt_value);
}
