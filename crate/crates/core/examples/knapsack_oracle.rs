//! Exact knapsack oracle on the three-arm example and on instance 2.

use onum::oracle::{min_optimal_cardinality, solve_knapsack, suboptimality_gap};
use onum::Allocation;

fn main() -> onum::Result<()> {
    let mu = [0.9, 0.6, 0.4];
    let theta = [0.6, 0.55, 0.45];
    let sol = solve_knapsack(&mu, &theta, 1.0)?;
    println!(
        "arms {:?} value {} leftover {}",
        sol.selected, sol.total_value, sol.leftover
    );
    println!("x* = {:?}", sol.allocation(&theta).amounts());

    let greedy = Allocation::new(vec![0.6, 0.0, 0.0]);
    println!(
        "gap of serving only arm 0: {}",
        suboptimality_gap(&mu, &theta, 1.0, &greedy)?
    );

    let mu2 = [0.9, 0.89, 0.87, 0.6, 0.3];
    let theta2 = [0.7, 0.7, 0.7, 0.6, 0.35];
    let sol2 = solve_knapsack(&mu2, &theta2, 2.0)?;
    println!(
        "instance 2: arms {:?} value {} k* = {}",
        sol2.selected,
        sol2.total_value,
        min_optimal_cardinality(&mu2, &theta2, 2.0)?
    );
    Ok(())
}
