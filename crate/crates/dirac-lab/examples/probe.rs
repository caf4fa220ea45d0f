use dirac_lab::mesh::Mesh;
use dirac_lab::phs::*;

fn main() {
    // default sine init now uses pi-compatible half modes? No: 2*pi*m. Measure drift for all presets.
    for (preset, cells, lens) in [
        (Preset::Telegraph1d, vec![64usize], vec![1.0]),
        (Preset::Wave2d, vec![32, 32], vec![1.0, 1.0]),
        (Preset::Maxwell3dPq22, vec![8, 8, 8], vec![1.0, 1.0, 1.0]),
        (Preset::Em3dP1q3, vec![8, 8, 8], vec![1.0, 1.0, 1.0]),
    ] {
        let mesh = Mesh::new(lens.len(), &cells, &lens).unwrap();
        let (mut s, spec) = make_preset(preset, &mesh, &InitialCondition::default()).unwrap();
        let h = mesh.spacings().iter().cloned().fold(f64::INFINITY, f64::min);
        let dt = 0.25 * h;
        let e0 = energy(&s, &spec).unwrap();
        for _ in 0..1000 {
            s = step(&s, &spec, BoundaryMode::Reflecting, dt, Scheme::Rk4).unwrap();
        }
        let e1 = energy(&s, &spec).unwrap();
        println!("{:16} E0={:.6e} rel drift={:.3e}", preset.name(), e0, ((e1 - e0) / e0).abs());
    }
}
