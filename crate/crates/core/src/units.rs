//! Decibel conversions. Every dB quantity in the crate is `10·log10(linear)`.

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

pub fn kmh_to_mps(kmh: f64) -> f64 {
    kmh / 3.6
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_db() {
        assert!((db_to_linear(1.0) - 1.258_925_411_794_167_2).abs() < 1e-15);
        assert_eq!(db_to_linear(0.0), 1.0);
        assert!((linear_to_db(db_to_linear(-85.0)) + 85.0).abs() < 1e-12);
    }

    #[test]
    fn twenty_kmh() {
        assert!((kmh_to_mps(20.0) - 5.555_555_555_555_555).abs() < 1e-12);
    }
}
