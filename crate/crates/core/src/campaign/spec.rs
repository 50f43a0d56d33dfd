use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::CampaignError;

pub const DEFAULT_BUDGET: u64 = 10_000_000;
pub const DEFAULT_RANDOM_COUNT: u64 = 100_000;
pub const DEFAULT_FAILURE_CAP: usize = 100;

/// How updated messages `m'` are chosen for each helper/stale choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MessagePolicy {
    /// Every `m' ∈ F_q^B`; rejected when `q^B` exceeds the budget.
    Exhaustive,
    /// `count` seeded draws.
    Random { count: u64 },
    /// Exhaustive when `q^B` fits the budget, otherwise `count` draws.
    Auto { count: u64 },
}

impl Default for MessagePolicy {
    fn default() -> Self {
        MessagePolicy::Auto { count: DEFAULT_RANDOM_COUNT }
    }
}

impl FromStr for MessagePolicy {
    type Err = String;

    /// `exhaustive`, `random:<count>` or `auto:<count>`.
    fn from_str(s: &str) -> Result<Self, String> {
        let count = |v: &str| v.replace('_', "").parse::<u64>().map_err(|_| format!("bad message count `{v}`"));
        match s.split_once(':') {
            None if s == "exhaustive" => Ok(MessagePolicy::Exhaustive),
            None if s == "auto" => Ok(MessagePolicy::default()),
            Some(("random", v)) => Ok(MessagePolicy::Random { count: count(v)? }),
            Some(("auto", v)) => Ok(MessagePolicy::Auto { count: count(v)? }),
            _ => Err(format!("expected `exhaustive`, `random:<count>` or `auto:<count>`, got `{s}`")),
        }
    }
}

impl fmt::Display for MessagePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MessagePolicy::Exhaustive => write!(f, "exhaustive"),
            MessagePolicy::Random { count } => write!(f, "random:{count}"),
            MessagePolicy::Auto { count } => write!(f, "auto:{count}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleChoice {
    #[default]
    Algebraic,
    Quantum,
    Both,
}

impl OracleChoice {
    /// Registry names of the oracles to run.
    pub fn names(self) -> &'static [&'static str] {
        match self {
            OracleChoice::Algebraic => &["algebraic"],
            OracleChoice::Quantum => &["quantum"],
            OracleChoice::Both => &["algebraic", "quantum"],
        }
    }
}

impl FromStr for OracleChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "algebraic" => Ok(OracleChoice::Algebraic),
            "quantum" => Ok(OracleChoice::Quantum),
            "both" => Ok(OracleChoice::Both),
            _ => Err(format!("expected `algebraic`, `quantum` or `both`, got `{s}`")),
        }
    }
}

impl fmt::Display for OracleChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OracleChoice::Algebraic => "algebraic",
            OracleChoice::Quantum => "quantum",
            OracleChoice::Both => "both",
        })
    }
}

/// Which helper sets and stale nodes a configuration covers.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum HelperPolicy {
    /// Every k-subset of nodes as helpers, with each remaining node as stale.
    #[default]
    All,
    Fixed { helpers: Vec<usize>, stale: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigSpec {
    pub n: usize,
    pub k: usize,
    pub alpha: usize,
    pub q: u32,
    /// MDS construction name.
    #[serde(default = "default_mds")]
    pub mds: String,
    /// CSS construction name.
    #[serde(default = "default_css")]
    pub css: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub css_param: Option<u32>,
    #[serde(default)]
    pub helpers: HelperPolicy,
    /// Overrides the campaign-wide message policy.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub messages: Option<MessagePolicy>,
    /// Deliberately broken fixture: skipped by case runs, expected to fail
    /// the converse check.
    #[serde(default)]
    pub negative: bool,
}

fn default_mds() -> String {
    "interleaved-rs".into()
}

fn default_css() -> String {
    "auto".into()
}

impl ConfigSpec {
    pub fn new(n: usize, k: usize, alpha: usize, q: u32) -> Self {
        ConfigSpec {
            n,
            k,
            alpha,
            q,
            mds: default_mds(),
            css: default_css(),
            css_param: None,
            helpers: HelperPolicy::All,
            messages: None,
            negative: false,
        }
    }

    pub fn with_mds(mut self, name: &str) -> Self {
        self.mds = name.into();
        self
    }

    pub fn with_css(mut self, name: &str, param: Option<u32>) -> Self {
        self.css = name.into();
        self.css_param = param;
        self
    }

    pub fn with_helpers(mut self, helpers: Vec<usize>, stale: usize) -> Self {
        self.helpers = HelperPolicy::Fixed { helpers, stale };
        self
    }

    pub fn with_messages(mut self, policy: MessagePolicy) -> Self {
        self.messages = Some(policy);
        self
    }

    pub fn negative(mut self) -> Self {
        self.negative = true;
        self
    }

    pub fn label(&self) -> String {
        let mut s = format!("{}({},{}) alpha={} q={} css={}", self.mds, self.n, self.k, self.alpha, self.q, self.css);
        if let Some(p) = self.css_param {
            s.push_str(&format!(":{p}"));
        }
        if let HelperPolicy::Fixed { helpers, stale } = &self.helpers {
            s.push_str(&format!(" helpers={helpers:?} stale={stale}"));
        }
        s
    }

    /// Message length `B = alpha k`.
    pub fn message_len(&self) -> usize {
        self.alpha * self.k
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSpec {
    pub p: Vec<f64>,
    pub trials: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignSpec {
    #[serde(default = "default_name")]
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub oracle: OracleChoice,
    #[serde(default)]
    pub messages: MessagePolicy,
    /// Largest exhaustive enumeration allowed, in messages per choice.
    #[serde(default = "default_budget")]
    pub budget: u64,
    /// Itemized failures kept per configuration; counts stay exact.
    #[serde(default = "default_failure_cap")]
    pub failure_cap: usize,
    /// Run the per-case protocol suite.
    #[serde(default = "yes")]
    pub cases: bool,
    /// Run the converse injectivity suite.
    #[serde(default)]
    pub converse: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseSpec>,
    #[serde(default)]
    pub configurations: Vec<ConfigSpec>,
}

fn default_name() -> String {
    "custom".into()
}

fn default_budget() -> u64 {
    DEFAULT_BUDGET
}

fn default_failure_cap() -> usize {
    DEFAULT_FAILURE_CAP
}

fn yes() -> bool {
    true
}

impl Default for CampaignSpec {
    fn default() -> Self {
        CampaignSpec {
            name: default_name(),
            seed: 0,
            oracle: OracleChoice::default(),
            messages: MessagePolicy::default(),
            budget: DEFAULT_BUDGET,
            failure_cap: DEFAULT_FAILURE_CAP,
            cases: true,
            converse: false,
            noise: None,
            configurations: Vec::new(),
        }
    }
}

impl CampaignSpec {
    pub fn from_toml(text: &str) -> Result<Self, CampaignError> {
        toml::from_str(text).map_err(|e| CampaignError::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("spec serializes")
    }

    pub fn policy_for(&self, cfg: &ConfigSpec) -> MessagePolicy {
        cfg.messages.unwrap_or(self.messages)
    }
}
