//! Physical constants (SI, CODATA 2018 exact or recommended values).

/// Reduced Planck constant, J s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Speed of light in vacuum, m/s.
pub const C: f64 = 299_792_458.0;
/// Boltzmann constant, J/K.
pub const K_B: f64 = 1.380_649e-23;
/// Elementary charge, C.
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
/// Angular frequency corresponding to a photon energy of 1 eV, rad/s.
pub const EV_TO_RAD_PER_S: f64 = ELEMENTARY_CHARGE / HBAR;
/// Apery's constant.
pub const ZETA3: f64 = 1.202_056_903_159_594_3;

/// Name/value pairs written into every result header.
pub fn table() -> [(&'static str, f64); 5] {
    [
        ("hbar_J_s", HBAR),
        ("c_m_per_s", C),
        ("k_B_J_per_K", K_B),
        ("eV_to_rad_per_s", EV_TO_RAD_PER_S),
        ("zeta3", ZETA3),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ev_conversion_matches_documented_factor() {
        assert!((EV_TO_RAD_PER_S / 1.519_267e15 - 1.0).abs() < 1e-6);
    }
}
