//! Named desk-scale instances.

use crate::error::{Error, Result};
use crate::spaces::LambdaSpace;

/// Every preset name, in a fixed order.
pub const PRESETS: [&str; 6] = ["w3", "q5plus3", "sp63", "h34", "h54", "grid"];

/// The JSON descriptor of a preset (`None` for `grid`, which has no descriptor).
pub fn descriptor_json(name: &str) -> Option<&'static str> {
    Some(match name {
        // symplectic quadrangle W(3): K₀ = K = GF(3), L = 0
        "w3" => r#"{"case":"II","p":3,"d":1,"K0":"all","L":{"dim":0}}"#,
        // hyperbolic quadric of PG(5, 3)
        "q5plus3" => r#"{"case":"I","p":3,"d":1,"L":{"dim":2,"blocks":["hyperbolic"]}}"#,
        // symplectic polar space of PG(5, 3)
        "sp63" => r#"{"case":"II","p":3,"d":1,"K0":"all","L":{"dim":2,"gram_f":[[0,1],[2,0]]}}"#,
        // hermitian quadrangle H(3, 4)
        "h34" => r#"{"case":"II","p":2,"d":2,"K0":"fixed","L":{"dim":0}}"#,
        // hermitian polar space H(5, 4)
        "h54" => r#"{"case":"II","p":2,"d":2,"K0":"fixed","L":{"dim":2,"blocks":["hyperbolic"]}}"#,
        _ => return None,
    })
}

/// The input space of a preset. `grid` is the split form `t₁t₁′ + t₂t₂′` over GF(3).
pub fn lambda(name: &str) -> Result<LambdaSpace> {
    if name == "grid" {
        return LambdaSpace::split_ambient(3);
    }
    let json = descriptor_json(name)
        .ok_or_else(|| Error::invalid(format!("unknown preset {name:?}; known: {PRESETS:?}")))?;
    LambdaSpace::from_json(json)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_presets_build() {
        for name in PRESETS {
            let l = lambda(name).unwrap();
            assert!(l.check_nondegenerate(), "{name}");
        }
        assert!(lambda("nope").is_err());
    }
}
