use crate::error::{Error, Result};

/// BMI that defines the ideal weight.
pub const IDEAL_BMI: f64 = 25.0;

/// Success label from the one-year weight outcome: 1 when the patient lost at
/// least half of the excess weight over the ideal (BMI 25) weight.
pub fn label_success(height_m: f64, initial_weight_kg: f64, followup_weight_kg: f64) -> Result<u8> {
    if !(height_m > 0.0 && height_m.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "height must be positive, got {height_m}"
        )));
    }
    if !(initial_weight_kg > 0.0 && followup_weight_kg > 0.0) {
        return Err(Error::InvalidArgument("weights must be positive".into()));
    }
    let ideal = IDEAL_BMI * height_m * height_m;
    let excess = initial_weight_kg - ideal;
    if excess <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "initial weight {initial_weight_kg} kg is not above the ideal weight {ideal:.2} kg"
        )));
    }
    let loss = initial_weight_kg - followup_weight_kg;
    Ok(u8::from(loss >= 0.5 * excess))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_example() {
        // ideal 72.25, excess 47.75, loss 25 >= 23.875
        assert_eq!(label_success(1.70, 120.0, 95.0).unwrap(), 1);
        assert_eq!(label_success(1.70, 120.0, 97.0).unwrap(), 0);
    }

    #[test]
    fn no_loss_and_full_loss() {
        assert_eq!(label_success(1.70, 120.0, 120.0).unwrap(), 0);
        let ideal = IDEAL_BMI * 1.70 * 1.70;
        assert_eq!(label_success(1.70, 120.0, ideal).unwrap(), 1);
    }

    #[test]
    fn no_excess_weight_is_an_error() {
        assert!(label_success(1.70, 70.0, 65.0).is_err());
        assert!(label_success(0.0, 100.0, 90.0).is_err());
        assert!(label_success(1.7, 100.0, -1.0).is_err());
    }
}
