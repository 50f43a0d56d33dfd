//! Built-in campaigns.

use super::spec::{CampaignSpec, ConfigSpec, MessagePolicy, NoiseSpec, OracleChoice};
use super::CampaignError;
use crate::css::qudits_per_helper;

pub const PRESETS: &[(&str, &str)] = &[
    ("paper-example", "(3,2) systematic code over F_5, all 625 updated messages"),
    ("paper-quantum", "(3,2) over F_5 through both oracles for two Bell-pair codes: 1,250 cases"),
    ("paper-grid", "(n,k) in {(3,2),(4,2),(5,3),(6,4)}, q in {5,7,11,13}, every helper/stale choice"),
    ("paper-general-alpha", "alpha 2..6, k 2..4, q in {5,7,11} with q > ceil(alpha/2) k, 1e5 random messages per choice"),
    ("paper-converse", "converse injectivity on MDS fixtures plus one non-MDS negative fixture"),
    ("paper-noise", "depolarized shared state, alpha = 2, q = 5, p in {0, 0.5, 0.9, 0.99}"),
];

pub fn preset(name: &str) -> Result<CampaignSpec, CampaignError> {
    let spec = match name {
        "paper-example" => paper_example(),
        "paper-quantum" => paper_quantum(),
        "paper-grid" => paper_grid(),
        "paper-general-alpha" => paper_general_alpha(),
        "paper-converse" => paper_converse(),
        "paper-noise" => paper_noise(),
        _ => {
            return Err(CampaignError::Config(format!(
                "unknown preset `{name}` (known: {})",
                PRESETS.iter().map(|p| p.0).collect::<Vec<_>>().join(", ")
            )))
        }
    };
    Ok(CampaignSpec { name: name.into(), ..spec })
}

fn paper_example() -> CampaignSpec {
    CampaignSpec {
        messages: MessagePolicy::Exhaustive,
        configurations: vec![ConfigSpec::new(3, 2, 2, 5).with_mds("systematic").with_helpers(vec![0, 1], 2)],
        ..CampaignSpec::default()
    }
}

fn paper_quantum() -> CampaignSpec {
    CampaignSpec {
        oracle: OracleChoice::Both,
        messages: MessagePolicy::Exhaustive,
        configurations: [1, 2]
            .into_iter()
            .map(|a| {
                ConfigSpec::new(3, 2, 2, 5)
                    .with_mds("systematic")
                    .with_css("bell", Some(a))
                    .with_helpers(vec![0, 1], 2)
            })
            .collect(),
        ..CampaignSpec::default()
    }
}

fn paper_grid() -> CampaignSpec {
    let mut configurations = Vec::new();
    for (n, k) in [(3, 2), (4, 2), (5, 3), (6, 4)] {
        for q in [5, 7, 11, 13] {
            // Reed-Solomon needs n distinct evaluation points.
            if (q as usize) >= n {
                configurations.push(ConfigSpec::new(n, k, 2, q));
            }
        }
    }
    for q in [5, 7, 11, 13] {
        configurations.push(ConfigSpec::new(3, 2, 2, q).with_mds("systematic"));
    }
    for q in [7, 11, 13] {
        configurations.push(ConfigSpec::new(3, 2, 2, q).with_mds("vandermonde"));
    }
    CampaignSpec { messages: MessagePolicy::Auto { count: 100_000 }, configurations, ..CampaignSpec::default() }
}

fn paper_general_alpha() -> CampaignSpec {
    let mut configurations = Vec::new();
    for alpha in 2..=6 {
        for k in 2..=4 {
            for q in [5u32, 7, 11] {
                if q as usize > qudits_per_helper(alpha) * k {
                    configurations.push(ConfigSpec::new(k + 1, k, alpha, q).with_css("grs-dual", None));
                }
            }
        }
    }
    CampaignSpec { messages: MessagePolicy::Random { count: 100_000 }, configurations, ..CampaignSpec::default() }
}

fn paper_converse() -> CampaignSpec {
    let mut configurations = vec![
        ConfigSpec::new(3, 2, 2, 5).with_mds("systematic"),
        ConfigSpec::new(3, 2, 2, 7).with_mds("vandermonde"),
    ];
    for (n, k) in [(3, 2), (4, 2), (5, 3), (6, 4)] {
        configurations.push(ConfigSpec::new(n, k, 2, 7));
    }
    for (n, k, alpha, q) in [(4, 3, 3, 7), (4, 2, 4, 7), (3, 2, 5, 7), (4, 3, 5, 11), (3, 2, 6, 7)] {
        configurations.push(ConfigSpec::new(n, k, alpha, q).with_css("grs-dual", None));
    }
    configurations.push(ConfigSpec::new(3, 2, 2, 5).with_mds("non-mds").with_helpers(vec![0, 1], 2).negative());
    CampaignSpec { cases: false, converse: true, configurations, ..CampaignSpec::default() }
}

fn paper_noise() -> CampaignSpec {
    CampaignSpec {
        cases: false,
        noise: Some(NoiseSpec { p: vec![0.0, 0.5, 0.9, 0.99], trials: 100_000 }),
        configurations: vec![ConfigSpec::new(3, 2, 2, 5).with_mds("systematic").with_helpers(vec![0, 1], 2)],
        ..CampaignSpec::default()
    }
}
