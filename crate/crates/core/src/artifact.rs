//! Deterministic artifact encodings: plain portable graymaps and content
//! hashes for the run manifests.

/// FNV-1a 64-bit content hash.
pub fn fnv64(bytes: &[u8]) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Render a row-major table as an ASCII P2 graymap with linear min-max
/// scaling. A constant table renders mid-gray; the flag reports that case
/// so manifests can note it.
pub fn pgm_string(values: &[f64], width: usize, height: usize) -> (String, bool) {
    assert_eq!(values.len(), width * height, "table shape mismatch");
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    let degenerate = !(hi > lo);
    let mut out = format!("P2\n{width} {height}\n255\n");
    for row in 0..height {
        let mut line = String::new();
        for col in 0..width {
            let v = values[row * width + col];
            let pixel = if degenerate {
                128
            } else {
                (((v - lo) / (hi - lo) * 255.0).round() as i64).clamp(0, 255)
            };
            if col > 0 {
                line.push(' ');
            }
            line.push_str(&pixel.to_string());
        }
        out.push_str(&line);
        out.push('\n');
    }
    (out, degenerate)
}
