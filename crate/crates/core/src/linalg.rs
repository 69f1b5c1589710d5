//! Tiny fixed-size helpers for the three-node thermal network.

pub type Mat3 = [[f64; 3]; 3];
pub type Vec3 = [f64; 3];

pub const IDENTITY: Mat3 = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
pub const ZERO: Mat3 = [[0.0; 3]; 3];

pub fn mul_vec(m: &Mat3, v: &Vec3) -> Vec3 {
    let mut out = [0.0; 3];
    for (row, slot) in m.iter().zip(out.iter_mut()) {
        *slot = row[0] * v[0] + row[1] * v[1] + row[2] * v[2];
    }
    out
}

pub fn mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = ZERO;
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

pub fn is_finite(m: &Mat3) -> bool {
    m.iter().flatten().all(|x| x.is_finite())
}

/// Largest eigenvalue modulus. Triangular matrices read it off the diagonal;
/// otherwise it comes from the characteristic cubic, which loses accuracy
/// near repeated roots.
pub fn spectral_radius(m: &Mat3) -> f64 {
    let lower_zero = m[1][0] == 0.0 && m[2][0] == 0.0 && m[2][1] == 0.0;
    let upper_zero = m[0][1] == 0.0 && m[0][2] == 0.0 && m[1][2] == 0.0;
    if lower_zero || upper_zero {
        return m[0][0].abs().max(m[1][1].abs()).max(m[2][2].abs());
    }
    let trace = m[0][0] + m[1][1] + m[2][2];
    let minors = m[0][0] * m[1][1] - m[0][1] * m[1][0] + m[0][0] * m[2][2] - m[0][2] * m[2][0]
        + m[1][1] * m[2][2]
        - m[1][2] * m[2][1];
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    // p(x) = x^3 - trace x^2 + minors x - det
    let p = |x: f64| ((x - trace) * x + minors) * x - det;
    let dp = |x: f64| (3.0 * x - 2.0 * trace) * x + minors;

    // Every root lies within the Cauchy bound.
    let bound = 1.0 + trace.abs().max(minors.abs()).max(det.abs());
    let (mut lo, mut hi) = (-bound, bound);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if p(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut root = 0.5 * (lo + hi);
    for _ in 0..3 {
        let slope = dp(root);
        if slope.abs() > 1e-300 {
            let next = root - p(root) / slope;
            if p(next).abs() < p(root).abs() {
                root = next;
            }
        }
    }

    // Deflate: p(x) = (x - root)(x^2 + b x + c)
    let b = root - trace;
    let c = minors + root * b;
    let disc = b * b - 4.0 * c;
    let other = if disc >= 0.0 {
        let s = disc.sqrt();
        ((-b + s) / 2.0).abs().max(((-b - s) / 2.0).abs())
    } else {
        // complex pair, modulus sqrt(c)
        c.max(0.0).sqrt()
    };
    root.abs().max(other)
}
