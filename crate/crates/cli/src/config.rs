//! Scenario configuration: a small TOML dialect in which domains, materials,
//! and polynomial fields are all spelled as plain text, so a scenario file
//! can be committed as a regression fixture and diffed like code.

use anyhow::{anyhow, bail, Context, Result};
use serde::Deserialize;

use couplestress::poly::parse_vector;
use couplestress::{make_ball, make_box, DomainGeometry, MaterialParams, PolyVector, Vec3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    VerifyIdentities,
    CompareBc,
    MissingTermMap,
    Solve,
    PatchTest,
}

impl std::fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ScenarioKind::VerifyIdentities => "verify-identities",
            ScenarioKind::CompareBc => "compare-bc",
            ScenarioKind::MissingTermMap => "missing-term-map",
            ScenarioKind::Solve => "solve",
            ScenarioKind::PatchTest => "patch-test",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainBlock {
    pub kind: String,
    pub lo: Option<[f64; 3]>,
    pub hi: Option<[f64; 3]>,
    pub radius: Option<f64>,
    pub order: u32,
    #[serde(default)]
    pub dirichlet: Vec<String>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialBlock {
    pub mu: f64,
    pub lambda: f64,
    pub alpha1: f64,
    pub alpha2: f64,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldsBlock {
    pub u: Option<String>,
    pub du: Option<String>,
    /// Body force; absent means the manufactured choice `f = -Div tau(u)`.
    pub f: Option<String>,
    /// Reference solution for the solve scenario.
    pub exact: Option<String>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveBlock {
    pub degree: usize,
    pub flavor: String,
    /// "recover" asserts convergence to the exact field; "deviate" asserts
    /// the solution stays away from it (the falsification direction).
    #[serde(default = "default_expect")]
    pub expect: String,
}

fn default_expect() -> String {
    "recover".to_string()
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatchTestBlock {
    /// Row-major symmetric matrix; validated on load.
    pub a: Option<[[f64; 3]; 3]>,
    #[serde(default = "default_patch_degree")]
    pub degree: usize,
}

fn default_patch_degree() -> usize {
    2
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    /// Write the per-node boundary sample dump next to the other reports.
    #[serde(default)]
    pub tractions: bool,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceBlock {
    pub closure: Option<f64>,
    pub solve: Option<f64>,
    pub patch: Option<f64>,
    pub identity: Option<f64>,
    pub invariance: Option<f64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: ScenarioKind,
    pub seed: Option<u64>,
    pub domain: DomainBlock,
    pub material: MaterialBlock,
    #[serde(default)]
    pub fields: FieldsBlock,
    pub solve: Option<SolveBlock>,
    #[serde(rename = "patch-test")]
    pub patch_test: Option<PatchTestBlock>,
    #[serde(default)]
    pub output: OutputBlock,
    #[serde(default)]
    pub tolerances: ToleranceBlock,
}

impl ScenarioConfig {
    pub fn from_str(src: &str) -> Result<Self> {
        let cfg: ScenarioConfig = toml::from_str(src).context("config parse failed")?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let src = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        Self::from_str(&src).with_context(|| format!("in config {}", path.display()))
    }

    fn validate(&self) -> Result<()> {
        match self.domain.kind.as_str() {
            "box" => {
                if self.domain.lo.is_none() || self.domain.hi.is_none() {
                    bail!("box domain needs lo and hi");
                }
            }
            "ball" => {
                if self.domain.radius.is_none() {
                    bail!("ball domain needs radius");
                }
            }
            other => bail!("unknown domain kind {:?} (expected box or ball)", other),
        }
        self.material()?;
        match self.scenario {
            ScenarioKind::CompareBc => {
                if self.fields.u.is_none() || self.fields.du.is_none() {
                    bail!("compare-bc needs fields.u and fields.du");
                }
            }
            ScenarioKind::MissingTermMap => {
                if self.fields.u.is_none() {
                    bail!("missing-term-map needs fields.u");
                }
            }
            ScenarioKind::Solve => {
                let s = self
                    .solve
                    .as_ref()
                    .ok_or_else(|| anyhow!("solve scenario needs a [solve] block"))?;
                if self.fields.exact.is_none() {
                    bail!("solve needs fields.exact");
                }
                if !matches!(s.flavor.as_str(), "corrected" | "mt") {
                    bail!("solve.flavor must be corrected or mt, got {:?}", s.flavor);
                }
                if !matches!(s.expect.as_str(), "recover" | "deviate") {
                    bail!("solve.expect must be recover or deviate, got {:?}", s.expect);
                }
            }
            ScenarioKind::PatchTest | ScenarioKind::VerifyIdentities => {}
        }
        if let Some(pt) = &self.patch_test {
            if let Some(a) = pt.a {
                for i in 0..3 {
                    for j in 0..3 {
                        if (a[i][j] - a[j][i]).abs() > 1e-14 {
                            bail!("patch-test.a must be symmetric");
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn material(&self) -> Result<MaterialParams> {
        MaterialParams::new(
            self.material.mu,
            self.material.lambda,
            self.material.alpha1,
            self.material.alpha2,
        )
        .map_err(|e| anyhow!("invalid material: {}", e))
    }

    /// Builds the quadrature-backed domain. Box faces may be listed as
    /// Dirichlet by name; for a ball the single entry `"cap:<theta>"` carves
    /// a Dirichlet cap at the given polar angle.
    pub fn domain(&self) -> Result<DomainGeometry> {
        match self.domain.kind.as_str() {
            "box" => {
                let lo = self.domain.lo.unwrap();
                let hi = self.domain.hi.unwrap();
                let names: Vec<&str> = self.domain.dirichlet.iter().map(|s| s.as_str()).collect();
                make_box(Vec3(lo), Vec3(hi), self.domain.order, &names)
                    .map_err(|e| anyhow!("domain build failed: {}", e))
            }
            "ball" => {
                let radius = self.domain.radius.unwrap();
                let mut cap = None;
                for entry in &self.domain.dirichlet {
                    let theta = entry
                        .strip_prefix("cap:")
                        .ok_or_else(|| {
                            anyhow!("ball dirichlet entries must look like \"cap:<theta>\"")
                        })?
                        .parse::<f64>()
                        .map_err(|e| anyhow!("bad cap angle in {:?}: {}", entry, e))?;
                    if cap.replace(theta).is_some() {
                        bail!("at most one cap entry");
                    }
                }
                make_ball(radius, self.domain.order, cap)
                    .map_err(|e| anyhow!("domain build failed: {}", e))
            }
            _ => unreachable!("validated"),
        }
    }

    /// Resolves a field literal: `"zero"`, `"random:<degree>"` (drawn from
    /// the scenario's seeded generator), or a semicolon-separated polynomial
    /// triple.
    pub fn field(&self, literal: &str, rng: &mut ChaCha8Rng) -> Result<PolyVector> {
        if literal == "zero" {
            return Ok(PolyVector::zero());
        }
        if let Some(deg) = literal.strip_prefix("random:") {
            let degree: usize = deg
                .parse()
                .map_err(|e| anyhow!("bad random degree {:?}: {}", deg, e))?;
            return PolyVector::random(degree, rng)
                .map_err(|e| anyhow!("random field failed: {}", e));
        }
        parse_vector(literal).map_err(|e| anyhow!("field {:?} does not parse: {}", literal, e))
    }

    pub fn rng(&self, seed_override: Option<u64>) -> (u64, ChaCha8Rng) {
        let seed = seed_override.or(self.seed).unwrap_or(0);
        (seed, ChaCha8Rng::seed_from_u64(seed))
    }
}
