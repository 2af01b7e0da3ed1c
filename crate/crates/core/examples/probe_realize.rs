use lsds::matrix::CMatrix;
use lsds::realize::search_realization;
use lsds::tuple::OperatorTuple;
use std::time::Instant;

fn main() {
    let g = OperatorTuple::new(vec![CMatrix::from_real(&[&[0.5]])]).unwrap();
    for (restarts, iters) in [(4usize, 1000usize), (8, 2000), (8, 6000)] {
        let t0 = Instant::now();
        let r = search_realization(&g, 4, 4, 7, restarts, iters);
        println!(
            "restarts {restarts} iters {iters}: unitarity {:.5} vanish {:?} total {:.5} J {:.6} time {:?}",
            r.unitarity_residual,
            r.vanish_residuals.iter().map(|v| format!("{v:.4}")).collect::<Vec<_>>(),
            r.total_residual(),
            r.objective_trace.last().unwrap(),
            t0.elapsed()
        );
    }
}
