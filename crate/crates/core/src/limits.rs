/// Default bound on the number of candidates a single enumeration may visit.
pub const DEFAULT_MAX_ENUM: u64 = 10_000_000;

/// Environment variable overriding [`DEFAULT_MAX_ENUM`].
pub const MAX_ENUM_ENV: &str = "CENSUS_MAX_ENUM";

/// The enumeration cap from `CENSUS_MAX_ENUM`, falling back to the default
/// when unset or unparsable.
pub fn max_enum_from_env() -> u64 {
    std::env::var(MAX_ENUM_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_ENUM)
}

/// `base^exp` if it does not exceed `cap`.
pub fn bounded_pow(base: u64, exp: u32, cap: u64) -> Option<u64> {
    base.checked_pow(exp).filter(|&v| v <= cap)
}
