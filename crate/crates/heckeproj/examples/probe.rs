use heckeproj::matkit::{self, CMatrix};
use heckeproj::projection;

fn main() {
    // probe random isometry + projection
    for r in 1..4 {
        let u = projection::random_isometry(4, r, 42).unwrap();
        let gram = u.adjoint().matmul(&u);
        println!("r={} gram defect {:.3e}", r, gram.max_diff(&CMatrix::identity(r)));
        let p = u.matmul(&u.adjoint());
        let idem = (&p.matmul(&p) - &p).frobenius_norm();
        println!("  idem defect {:.3e} tr {:.6}", idem, p.trace().re);
        let sv = matkit::singular_values(&p).unwrap();
        println!("  sv {:?}", sv);
        println!("  rank_eps {}", matkit::rank_eps(&p, 1e-8));
    }
}
