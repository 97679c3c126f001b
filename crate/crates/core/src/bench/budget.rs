use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How a total budget `C` is split between `m` labels at cost `c` each and `n` unit-cost
/// comparisons.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BudgetPlan {
    pub c: f64,
    pub total: f64,
    pub m: usize,
    pub n: usize,
}

impl BudgetPlan {
    /// Labels a label-only method can buy with the whole budget.
    pub fn label_only_m(&self) -> usize {
        (self.total / self.c + 1e-9).floor() as usize
    }
}

/// Every unit not spent on labels goes to comparisons: `n = ⌊C − c·m⌋`.
pub fn allocate_budget(c: f64, total: f64, m: usize) -> Result<BudgetPlan> {
    if !(c >= 1.0 && c.is_finite()) {
        return Err(Error::Budget(format!("cost ratio must be >= 1, got {c}")));
    }
    if !(total >= 0.0 && total.is_finite()) {
        return Err(Error::Budget(format!("total budget must be >= 0, got {total}")));
    }
    let spent = c * m as f64;
    // Tolerate rounding in configs such as c = 0.1·10.
    if spent > total + 1e-9 * total.max(1.0) {
        return Err(Error::Budget(format!("{m} labels at cost {c} exceed the total budget {total}")));
    }
    let n = ((total - spent).max(0.0) + 1e-9).floor() as usize;
    Ok(BudgetPlan { c, total, m, n })
}

/// Post-trial audit: oracle calls never exceed what the plan granted.
pub fn audit_usage(method: &str, labels_used: usize, label_cap: usize, comparisons_used: usize, comparison_cap: usize) -> Result<()> {
    if labels_used > label_cap || comparisons_used > comparison_cap {
        return Err(Error::Budget(format!(
            "{method} used {labels_used}/{label_cap} labels and {comparisons_used}/{comparison_cap} comparisons"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn allocation_examples() {
        assert_eq!(allocate_budget(5.0, 2500.0, 100).unwrap().n, 2000);
        assert_eq!(allocate_budget(1.0, 500.0, 500).unwrap().n, 0);
        assert!(matches!(allocate_budget(10.0, 500.0, 100), Err(Error::Budget(_))));
        assert!(allocate_budget(0.5, 500.0, 1).is_err());
        assert_eq!(allocate_budget(3.0, 150.0, 10).unwrap().label_only_m(), 50);
    }

    #[test]
    fn audit() {
        assert!(audit_usage("x", 3, 3, 10, 10).is_ok());
        assert!(audit_usage("x", 4, 3, 0, 10).is_err());
        assert!(audit_usage("x", 0, 3, 11, 10).is_err());
    }
}
