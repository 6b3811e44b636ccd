//! Closed-form spectra against a numeric eigensolver.
//!
//! `cargo run --example closed_form_spectra`

use consensus_obs::graph::{laplacian, submatrix_m, submatrix_n};
use consensus_obs::oracle::symmetric_eigen;
use consensus_obs::spectral::{eigen_cycle_laplacian, eigen_m, eigen_n, eigen_path_laplacian};
use consensus_obs::GraphTopology;

fn deviation(closed: Vec<f64>, m: &nalgebra::DMatrix<f64>) -> consensus_obs::Result<f64> {
    let numeric = symmetric_eigen(m)?;
    let mut closed = closed;
    closed.sort_by(f64::total_cmp);
    Ok(closed
        .iter()
        .zip(&numeric)
        .map(|(a, b)| (a - b.value).abs())
        .fold(0.0, f64::max))
}

fn main() -> consensus_obs::Result<()> {
    let n4: Vec<String> = eigen_n(4)?
        .iter()
        .map(|p| format!("{} = {:.4}", p.eigenvalue.angle(), p.eigenvalue.value()))
        .collect();
    println!("N4: {}", n4.join(", "));
    for k in [5, 20, 100] {
        let dn = deviation(
            eigen_n(k)?.iter().map(|p| p.eigenvalue.value()).collect(),
            &submatrix_n(k)?,
        )?;
        let dm = deviation(
            eigen_m(k).iter().map(|p| p.eigenvalue.value()).collect(),
            &submatrix_m(k),
        )?;
        let dp = deviation(
            eigen_path_laplacian(k)?
                .iter()
                .map(|p| p.eigenvalue.value())
                .collect(),
            &laplacian(&GraphTopology::path(k)?),
        )?;
        let dc = deviation(
            eigen_cycle_laplacian(k)?
                .iter()
                .map(|p| p.eigenvalue.value())
                .collect(),
            &laplacian(&GraphTopology::cycle(k)?),
        )?;
        println!("size {k:>3}: N {dn:.1e}  M {dm:.1e}  path {dp:.1e}  cycle {dc:.1e}");
    }
    Ok(())
}
