fn main() {
    for p in segmin::row_solvers::base4_patterns() {
        println!(
            "{:?} rho={} copies={} batch={:?} single={:?}",
            p.pattern, p.markers, p.copies, p.batch_counts, p.single_counts
        );
    }
    println!("C = {}", segmin::row_solvers::base4_constant());
}
