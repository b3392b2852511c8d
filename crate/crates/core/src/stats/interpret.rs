use serde::Serialize;

/// Correlation strength bands for medical research, weakest first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Strength {
    Weak,
    Fair,
    ModeratelyStrong,
    VeryStrong,
}

impl Strength {
    pub fn label(self) -> &'static str {
        match self {
            Strength::Weak => "Weak",
            Strength::Fair => "Fair",
            Strength::ModeratelyStrong => "Moderately Strong",
            Strength::VeryStrong => "Very Strong",
        }
    }
}

impl std::fmt::Display for Strength {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Bands on |ρ|: [0.8, 1] very strong, [0.6, 0.8) moderately strong,
/// [0.3, 0.6) fair, below 0.3 weak.
pub fn interpret(rho: f64) -> Strength {
    let r = rho.abs();
    if r >= 0.8 {
        Strength::VeryStrong
    } else if r >= 0.6 {
        Strength::ModeratelyStrong
    } else if r >= 0.3 {
        Strength::Fair
    } else {
        Strength::Weak
    }
}
