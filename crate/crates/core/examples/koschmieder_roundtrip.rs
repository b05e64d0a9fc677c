//! Renders haze onto an image with the Koschmieder model and inverts it
//! again, for a few scattering coefficients and distances.
//!
//! ```text
//! cargo run --example koschmieder_roundtrip
//! ```

use hazebench::koschmieder::{apply_haze, depth_from_transmission, invert_haze, transmission_from_depth};
use hazebench::synth::procedural_texture;
use hazebench::{Airlight, Beta};

fn main() -> hazebench::Result<()> {
    println!("{:>8} {:>6} {:>7}", "β·1e3", "d [m]", "t");
    for beta_e3 in [103.69, 83.57, 17.84] {
        let beta = Beta::from_e3(beta_e3)?;
        for d in [7.0, 4.35] {
            let t = transmission_from_depth(d, beta)?;
            println!("{beta_e3:>8} {d:>6} {t:>7.3}   (depth back from t: {:.4} m)", depth_from_transmission(t, beta)?);
        }
    }

    let clear = procedural_texture(64, 48, 1);
    let a = Airlight::new([0.93, 0.94, 0.96])?;
    let hazy = apply_haze(&clear, 0.4, a)?;
    let back = invert_haze(&hazy, 0.4, a, 0.1)?;
    println!(
        "\nt = 0.4: hazy MAE {:.4}, restored MAE {:.2e}",
        hazy.mean_abs_diff(&clear)?,
        back.mean_abs_diff(&clear)?
    );
    Ok(())
}
