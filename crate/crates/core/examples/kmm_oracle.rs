//! Solve kernel mean matching under a tree kernel and compare with the
//! per-leaf closed form.

use transboost::kmm::{
    build_tree_kernel, closed_form_weights, random_instance, run_oracle_trials, solve_kmm_qp, QpOptions,
};

fn main() {
    let inst = random_instance(3, 60, 30, 2);
    let sys = build_tree_kernel(&inst.tree, &inst.source, &inst.target, false);
    let qp = solve_kmm_qp(&sys, &QpOptions::default());
    let cf = closed_form_weights(&inst.tree, &inst.source, &inst.target, None);
    println!(
        "leaves={} iterations={} converged={}",
        inst.tree.n_leaves(),
        qp.iterations,
        qp.converged
    );
    for (i, (a, b)) in qp.beta.iter().zip(&cf.beta).enumerate().take(8) {
        println!("source row {i:>2}: qp={a:.9} closed={b:.9}");
    }

    let trials = run_oracle_trials(20, 1);
    let worst = trials
        .iter()
        .map(|t| t.marginal_deviation.max(t.joint_deviation))
        .fold(0.0, f64::max);
    println!("20 random trials, max deviation {worst:.2e}");
}
