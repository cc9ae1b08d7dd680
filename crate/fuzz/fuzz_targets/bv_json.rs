#![no_main]

use libfuzzer_sys::fuzz_target;
use torus_cpi::BvFunction;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(g) = BvFunction::from_json(text) else { return };
    let back = BvFunction::from_json(&g.to_json()).expect("serialized form reloads");
    assert_eq!(back, g);
    let r = g.variation();
    assert!(r.variation >= 0.0 && r.sup_norm >= 0.0);
    for t in [-4.0, -3.0, 0.0, 1.5, 3.1] {
        let _ = g.eval(t);
    }
    let _ = g.fourier_coeff(3);
});
