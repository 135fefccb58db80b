//! Closed forms of the transformation for the two confluent cases
//! (`g = k^2` and `g = k^2 / x`), used to certify the numerical engine.

/// `u = 2 sqrt(x) / k`.
pub fn ho_coordinate(x: f64, k: f64) -> f64 {
    2.0 * x.sqrt() / k
}

/// `F(u) = u^2 k^2 / 4`.
pub fn ho_inverse(u: f64, k: f64) -> f64 {
    u * u * k * k / 4.0
}

pub fn ho_weight(u: f64, c: f64, k: f64) -> f64 {
    (2.0 * c - 1.0) / (2.0 * u) - u * k * k / 4.0
}

pub fn ho_potential(u: f64, c: f64, k: f64) -> f64 {
    (4.0 * c * c + 3.0 - 8.0 * c) / (4.0 * u * u) + u * u * k.powi(4) / 16.0 - c * k * k / 2.0
}

/// `E = hbar^2 k^2 (c - 2a) / 4m`.
pub fn ho_energy(hbar: f64, mass: f64, k: f64, c: f64, a: f64) -> f64 {
    hbar * hbar * k * k * (c - 2.0 * a) / (4.0 * mass)
}

/// `u = x / k`.
pub fn hydrogen_coordinate(x: f64, k: f64) -> f64 {
    x / k
}

/// `F(u) = u k`.
pub fn hydrogen_inverse(u: f64, k: f64) -> f64 {
    u * k
}

pub fn hydrogen_weight(u: f64, c: f64, k: f64) -> f64 {
    c / (2.0 * u) - k / 2.0
}

pub fn hydrogen_potential(u: f64, c: f64, k: f64) -> f64 {
    c * c / (4.0 * u * u) + k * k / 4.0 - c * k / (2.0 * u) - c / (2.0 * u * u)
}

/// `E = -hbar^2 k^2 / 8m`.
pub fn hydrogen_energy(hbar: f64, mass: f64, k: f64) -> f64 {
    -hbar * hbar * k * k / (8.0 * mass)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn printed_values() {
        assert_eq!(ho_coordinate(1.0, 2.0), 1.0);
        assert_eq!(ho_inverse(1.0, 2.0), 1.0);
        assert_eq!(hydrogen_coordinate(6.0, 3.0), 2.0);
        assert_eq!(hydrogen_inverse(2.0, 3.0), 6.0);
        assert_eq!(ho_weight(1.0, 1.5, 2.0), 0.0);
        assert_eq!(hydrogen_weight(1.0, 2.0, 2.0), 0.0);
        assert_eq!(hydrogen_energy(1.0, 1.0, 2.0), -0.5);
    }

    #[test]
    fn potentials_are_riccati_of_weights() {
        // v = W^2 + W' with W' taken analytically
        for u in [0.3, 1.1, 2.9] {
            let (c, k) = (1.7, 1.3);
            let dw = -(2.0 * c - 1.0) / (2.0 * u * u) - k * k / 4.0;
            let w = ho_weight(u, c, k);
            assert!((ho_potential(u, c, k) - (w * w + dw)).abs() < 1e-12);
            let dw = -c / (2.0 * u * u);
            let w = hydrogen_weight(u, c, k);
            assert!((hydrogen_potential(u, c, k) - (w * w + dw)).abs() < 1e-12);
        }
    }
}
