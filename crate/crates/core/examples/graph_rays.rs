//! Ray decomposition of a small weighted graph: a path with a branch
//! hanging off an interior vertex. Transport from the spur and from the
//! path meets at vertex 2, so every vertex from 2 on is branching and only
//! the two tails become rays.
//!
//! cargo run --example graph_rays

use needlecomp::discrete::*;
use needlecomp::mms::DiscreteMMS;

fn main() -> needlecomp::Result<()> {
    // 0 - 1 - 2 - 3 - 4 - 5 - 6 with a spur 2 - 7 - 8.
    let mut edges: Vec<_> = (0..6).map(|i| (i, i + 1, 1.0)).collect();
    edges.extend([(2, 7, 1.0), (7, 8, 1.0)]);
    let space = DiscreteMMS::from_graph(9, &edges, vec![1.0; 9])?;
    let omega = SubsetSpec::new((0..9).map(|i| i <= 3 || i >= 7).collect())?;

    let field = signed_distance(&space, &omega)?;
    println!("u = {:?}", field.u);
    println!("inradius {}", inradius_from_field(&space, &omega, &field));

    let relation = transport_ordering(&space, &field.u, RELATION_TOL);
    let branching = branching_points(&relation);
    let branch: Vec<_> = (0..space.n()).filter(|&i| branching.is_branching(i)).collect();
    println!("{} related pairs, branching points {branch:?}", relation.len());

    let a = decompose(&space, &omega, &DecompositionConfig::default(), &BinConfig::default())?;
    for (i, ray) in a.decomposition.rays.iter().enumerate() {
        println!(
            "ray {i}: points {:?} params {:?} {:?} surface mass {:.3}",
            ray.points,
            ray.params,
            ray.flag,
            ray.surface_mass()
        );
    }
    println!("unassigned fraction {:.3}", a.decomposition.unassigned_fraction());
    Ok(())
}
