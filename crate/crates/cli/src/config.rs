//! Run configuration: a single TOML file with documented defaults plus a
//! small set of command-line overrides. Unknown keys are rejected.

use serde::{Deserialize, Serialize};

use mvpde::pde::{DerivativeBox, Interval, PdeProblem, Scheme};
use mvpde::poly::{Polynomial, Var};
use mvpde::Real;

fn default_horizon() -> Real {
    0.25
}
fn default_y0() -> Vec<Real> {
    vec![0.0, 1.0, -1.0] // x(1 − x)
}
fn default_ybox() -> [Real; 2] {
    [-0.1, 0.35]
}
fn default_z0box() -> [Real; 2] {
    [-8.0, 8.0]
}
fn default_z1box() -> [Real; 2] {
    [-1.6, 1.6]
}
fn default_r_exponent() -> f64 {
    2.0
}
fn default_nt() -> usize {
    64
}
fn default_nx() -> usize {
    64
}
fn default_scheme() -> String {
    "crank-nicolson".into()
}
fn default_field() -> String {
    "dirac".into()
}
fn default_family_time() -> String {
    "poly-bump".into()
}
fn default_family_space() -> String {
    "sine".into()
}
fn default_time_basis() -> usize {
    mvpde::config::TIME_BASIS
}
fn default_space_basis() -> usize {
    mvpde::config::SPACE_BASIS
}
fn default_state_degree() -> usize {
    mvpde::config::STATE_BASIS_MAX_DEGREE
}
fn default_occupation_degree() -> usize {
    4
}
fn default_bump_peak() -> Real {
    0.5
}
fn default_degrees() -> Vec<usize> {
    vec![2, 3]
}
fn default_objective() -> Vec<[Real; 6]> {
    vec![[0.0, 0.0, 1.0, 0.0, 0.0, 1.0]] // ∫ y dμ̂
}
fn default_true() -> bool {
    true
}
fn default_solver_tol() -> Real {
    mvpde::config::SOLVER_TOL
}
fn default_max_iters() -> usize {
    mvpde::config::SOLVER_MAX_ITERS
}
fn default_newton_tol() -> Real {
    mvpde::config::NEWTON_TOL
}
fn default_residual_coeff() -> Real {
    mvpde::config::RESIDUAL_TOL_COEFF
}
fn default_order_window() -> [Real; 2] {
    [1.7, 2.3]
}
fn default_out_dir() -> String {
    "out".into()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSection {
    /// Time horizon T > 0.
    #[serde(default = "default_horizon")]
    pub horizon: Real,
    /// Reaction term as monomial rows `[t_exp, x_exp, y_exp, coeff]`.
    #[serde(default)]
    pub f: Vec<[Real; 4]>,
    /// Initial datum coefficients in the power basis: `y0 = Σ c_k x^k`.
    #[serde(default = "default_y0")]
    pub y0: Vec<Real>,
    /// State box `[Ymin, Ymax]` containing the solution range.
    #[serde(default = "default_ybox")]
    pub ybox: [Real; 2],
    /// Box for the time derivative.
    #[serde(default = "default_z0box")]
    pub z0box: [Real; 2],
    /// Box for the space derivative.
    #[serde(default = "default_z1box")]
    pub z1box: [Real; 2],
    /// One-sided Lipschitz constant; sampled from `∂f/∂y` when absent.
    #[serde(default)]
    pub l_y: Option<Real>,
    /// Recorded integrability exponent (documentation only).
    #[serde(default = "default_r_exponent")]
    pub r_exponent: f64,
}

impl Default for ProblemSection {
    fn default() -> Self {
        toml::from_str("").expect("empty problem section has defaults")
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    #[serde(default = "default_nt")]
    pub nt: usize,
    #[serde(default = "default_nx")]
    pub nx: usize,
    /// `crank-nicolson` or `implicit-euler`.
    #[serde(default = "default_scheme")]
    pub scheme: String,
}

impl Default for GridSection {
    fn default() -> Self {
        toml::from_str("").expect("empty grid section has defaults")
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteSection {
    /// Field under verification: `dirac` (lift of the solve) or
    /// `counterexample` (the symmetric two-atom bump field).
    #[serde(default = "default_field")]
    pub field: String,
    /// `poly-bump` or `sine`.
    #[serde(default = "default_family_time")]
    pub time_family: String,
    #[serde(default = "default_family_space")]
    pub space_family: String,
    #[serde(default = "default_time_basis")]
    pub time_basis: usize,
    #[serde(default = "default_space_basis")]
    pub space_basis: usize,
    #[serde(default = "default_state_degree")]
    pub state_max_degree: usize,
    /// Total degree of the polynomial test functions in the occupation
    /// identity suite.
    #[serde(default = "default_occupation_degree")]
    pub occupation_degree: usize,
    /// Peak value of the counterexample bump.
    #[serde(default = "default_bump_peak")]
    pub bump_peak: Real,
}

impl Default for SuiteSection {
    fn default() -> Self {
        toml::from_str("").expect("empty suite section has defaults")
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelaxSection {
    #[serde(default = "default_degrees")]
    pub degrees: Vec<usize>,
    /// Objective rows `[t_exp, x_exp, y_exp, z0_exp, z1_exp, coeff]`,
    /// integrated against the interior occupation measure.
    #[serde(default = "default_objective")]
    pub objective: Vec<[Real; 6]>,
    /// Affine rescaling of all variables onto `[−1,1]`.
    #[serde(default = "default_true")]
    pub rescale: bool,
    /// Drop the second-moment content (gap demonstration).
    #[serde(default)]
    pub first_order_only: bool,
    #[serde(default = "default_solver_tol")]
    pub solver_tol: Real,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
    /// Also write each assembled relaxation in sparse SDPA text form.
    #[serde(default)]
    pub export_sdpa: bool,
    /// Grid refinement factor for the reference solve.
    #[serde(default = "default_reference_refine")]
    pub reference_refine: usize,
}

fn default_reference_refine() -> usize {
    4
}

impl Default for RelaxSection {
    fn default() -> Self {
        toml::from_str("").expect("empty relax section has defaults")
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceSection {
    #[serde(default = "default_newton_tol")]
    pub newton_tol: Real,
    /// Coefficient of `tol_residual = c·(dx²+dt²)`.
    #[serde(default = "default_residual_coeff")]
    pub residual_coeff: Real,
    /// Accepted observed-order window for the convergence study.
    #[serde(default = "default_order_window")]
    pub order_window: [Real; 2],
}

impl Default for ToleranceSection {
    fn default() -> Self {
        toml::from_str("").expect("empty tolerance section has defaults")
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_out_dir")]
    pub dir: String,
}

impl Default for OutputSection {
    fn default() -> Self {
        toml::from_str("").expect("empty output section has defaults")
    }
}

/// Full run configuration.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub problem: ProblemSection,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub suite: SuiteSection,
    #[serde(default)]
    pub relax: RelaxSection,
    #[serde(default)]
    pub tolerances: ToleranceSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug)]
pub struct ConfigError {
    pub tag: String,
    pub detail: String,
}

impl ConfigError {
    pub fn new(tag: &str, detail: impl ToString) -> Self {
        ConfigError { tag: tag.into(), detail: detail.to_string() }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::new("config-parse-error", e))
    }

    /// Canonical serialized form of everything that influences the numbers
    /// (the output location is excluded); its hash fingerprints every
    /// artifact of a run.
    pub fn canonical(&self) -> String {
        let mut fingerprinted = self.clone();
        fingerprinted.output = OutputSection::default();
        toml::to_string(&fingerprinted).expect("config serializes")
    }

    pub fn hash(&self) -> String {
        mvpde::io::fnv1a_hex(self.canonical().as_bytes())
    }

    pub fn scheme(&self) -> Result<Scheme, ConfigError> {
        Scheme::parse(&self.grid.scheme)
            .ok_or_else(|| ConfigError::new("unknown-scheme", &self.grid.scheme))
    }

    pub fn reaction_term(&self) -> Result<Polynomial<Real>, ConfigError> {
        let mut f = Polynomial::zero();
        for row in &self.problem.f {
            let [te, xe, ye, coeff] = *row;
            let to_exp = |v: Real, name: &str| -> Result<u8, ConfigError> {
                if v < 0.0 || v.fract() != 0.0 || v > 255.0 {
                    Err(ConfigError::new(
                        "invalid-exponent",
                        format!("{name} exponent {v} must be a small nonnegative integer"),
                    ))
                } else {
                    Ok(v as u8)
                }
            };
            f.add_term(
                mvpde::poly::Monomial([
                    to_exp(te, "t")?,
                    to_exp(xe, "x")?,
                    to_exp(ye, "y")?,
                    0,
                    0,
                ]),
                coeff,
            );
        }
        Ok(f)
    }

    pub fn initial_datum(&self) -> Polynomial<Real> {
        Polynomial::univariate(Var::X, &self.problem.y0)
    }

    pub fn objective_poly(&self) -> Result<Polynomial<Real>, ConfigError> {
        let mut p = Polynomial::zero();
        for row in &self.relax.objective {
            let [te, xe, ye, z0e, z1e, coeff] = *row;
            let exps = [te, xe, ye, z0e, z1e];
            let mut mono = [0u8; 5];
            for (k, v) in exps.iter().enumerate() {
                if *v < 0.0 || v.fract() != 0.0 || *v > 255.0 {
                    return Err(ConfigError::new(
                        "invalid-exponent",
                        format!("objective exponent {v} must be a small nonnegative integer"),
                    ));
                }
                mono[k] = *v as u8;
            }
            p.add_term(mvpde::poly::Monomial(mono), coeff);
        }
        Ok(p)
    }

    /// Build the validated problem.
    pub fn problem(&self) -> Result<PdeProblem<Real>, ConfigError> {
        let f = self.reaction_term()?;
        let y0 = self.initial_datum();
        let ybox = Interval::new(self.problem.ybox[0], self.problem.ybox[1]);
        let zbox = DerivativeBox {
            z0: Interval::new(self.problem.z0box[0], self.problem.z0box[1]),
            z1: Interval::new(self.problem.z1box[0], self.problem.z1box[1]),
        };
        let result = match self.problem.l_y {
            Some(l_y) => PdeProblem::new(
                self.problem.horizon,
                f,
                y0,
                ybox,
                zbox,
                l_y,
                self.problem.r_exponent,
            ),
            None => PdeProblem::with_estimated_lipschitz(self.problem.horizon, f, y0, ybox, zbox),
        };
        result.map_err(|e| {
            let msg = e.to_string();
            let tag = msg.split(':').next().unwrap_or("invalid-problem").to_string();
            ConfigError { tag, detail: msg }
        })
    }
}
