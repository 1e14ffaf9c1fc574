pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] fedmife_core::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("scenario file: {0}")]
    Scenario(#[from] toml::de::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(
        "one round needs about {needed_gib:.2} GiB of ciphertexts, over the {budget_gib:.2} GiB budget \
         (adaptive LWE at n=13, l=4641 needs about 16.5 GiB); raise --ram-budget to run it anyway"
    )]
    RamBudget { needed_gib: f64, budget_gib: f64 },
    #[error("{0}")]
    Usage(String),
}
