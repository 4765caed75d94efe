"""
Global configurations for the Vaccine Uptake Analyzer.
"""

# App metadata
APP_INFO = {
    'title': 'Vaccine Uptake Analyzer',
    'version': '1.0.0',
    'description': (
        'Bayesian multilevel logistic regression and hierarchical '
        'clustering of vaccine uptake'
    ),
}

# Ordered levels per categorical group; the first level is the base category
CATEGORY_LEVELS = {
    'education': ('HighSchoolOrLess', 'Associate', 'Bachelor', 'Graduate'),
    'race': ('White', 'Black', 'Asian', 'Other'),
    'income': ('Under35k', 'From35kTo75k', 'From75kTo150k', 'Over150k'),
    'gender': ('Male', 'Female'),
}

# Order in which the groups fill the fixed-effect columns X1..X10
DESIGN_GROUP_ORDER = ('education', 'race', 'income', 'gender')

# Accepted raw spellings per field (case-insensitive, surrounding blanks ignored).
# Canonical level names are always accepted as well.
LEVEL_SPELLINGS = {
    'education': {
        'high school graduate or less': 'HighSchoolOrLess',
        'high school or less': 'HighSchoolOrLess',
        "associate's degree": 'Associate',
        'associate degree': 'Associate',
        "bachelor's degree": 'Bachelor',
        'bachelor degree': 'Bachelor',
        'graduate degree': 'Graduate',
    },
    'race': {
        'white': 'White',
        'black': 'Black',
        'african american': 'Black',
        'asian': 'Asian',
        'other': 'Other',
        'others': 'Other',
    },
    'income': {
        'less than $35,000': 'Under35k',
        '$35,000 to $74,999': 'From35kTo75k',
        '$75,000 to $149,999': 'From75kTo150k',
        '$150,000 or above': 'Over150k',
    },
    'gender': {
        'male': 'Male',
        'female': 'Female',
    },
    'vaccinated': {
        '1': 1,
        'yes': 1,
        'received': 1,
        '0': 0,
        'no': 0,
        'not received': 0,
    },
}

# Logical field -> column name in the survey file
DEFAULT_SURVEY_COLUMNS = {
    'gender': 'gender',
    'race': 'race',
    'education': 'education',
    'income': 'income',
    'state': 'state',
    'vaccinated': 'vaccinated',
}

# Column names of the county vaccination-rate file
COUNTY_COLUMNS = ('state', 'county', 'rate_percent')

# 48 contiguous states plus the District of Columbia (Alaska and Hawaii absent)
STATE_ROSTER = (
    'AL', 'AR', 'AZ', 'CA', 'CO', 'CT', 'DC', 'DE', 'FL', 'GA',
    'IA', 'ID', 'IL', 'IN', 'KS', 'KY', 'LA', 'MA', 'MD', 'ME',
    'MI', 'MN', 'MO', 'MS', 'MT', 'NC', 'ND', 'NE', 'NH', 'NJ',
    'NM', 'NV', 'NY', 'OH', 'OK', 'OR', 'PA', 'RI', 'SC', 'SD',
    'TN', 'TX', 'UT', 'VA', 'VT', 'WA', 'WI', 'WV', 'WY',
)

# Contrast labels of the fixed effects, beta_0..beta_10
FIXED_EFFECT_LABELS = (
    'Intercept',
    "Associate's Degree vs. High school graduate or less",
    "Bachelor's degree vs. High school graduate or less",
    'Graduate degree vs. High school graduate or less',
    'Black vs. White',
    'Asian vs. White',
    'Others vs. White',
    '$35,000 to $74,999 vs. Less than $35,000',
    '$75,000 to $149,999 vs. Less than $35,000',
    '$150,000 or above vs. Less than $35,000',
    'Female vs. Male',
)

# Reference fixed-effect estimates, used as the default simulation truth
REFERENCE_FIXED_EFFECTS = (
    -0.74, 0.45, 1.24, 1.79, 0.39, 0.91, -0.3, 0.25, 0.43, 0.77, 0.04,
)

DEFAULT_PRIOR = {
    'beta_scale': 5.0,
    'sigma_alpha_hyper_scale': 2.5,
}

DEFAULT_HMC = {
    'chains': 2,
    'iterations': 10000,
    'warmup_fraction': 0.5,
    'target_accept': 0.8,
    'leapfrog_steps': 32,
    'leapfrog_jitter': 0.2,
    'max_energy_error': 1000.0,
}

DEFAULT_CLUSTERING = {
    'linkage': 'ward',
    'k_max': 10,
    'reference_draws': 100,
}

DEFAULT_SIMULATION = {
    'n_records': 5000,
    'sigma_alpha': 0.3,
}

# Covariate level probabilities used by the simulator (order of CATEGORY_LEVELS)
DEFAULT_COVARIATE_PROBS = {
    'education': (0.35, 0.15, 0.28, 0.22),
    'race': (0.70, 0.12, 0.06, 0.12),
    'income': (0.25, 0.30, 0.30, 0.15),
    'gender': (0.48, 0.52),
}

DIAGNOSTIC_CONFIG = {
    'max_trace_points': 1000,
    'density_grid_points': 256,
    'grid_padding_bandwidths': 3.0,
    'rhat_warning': 1.05,
}

# Validation ranges
VALIDATION_RANGES = {
    'chains': (1, 64),
    'iterations': (200, 10_000_000),
    'warmup_fraction': (0.0, 1.0),
    'target_accept': (0.0, 1.0),
    'leapfrog_steps': (1, 1024),
    'k_max': (1, 1000),
    'reference_draws': (10, 100_000),
    'beta_scale': (1e-6, 1e6),
    'sigma_alpha_hyper_scale': (1e-6, 1e6),
    'workers': (1, 1024),
    'n_records': (1, 10_000_000),
    'leapfrog_jitter': (0.0, 1.0),
}

# Models configuration
MODELS = {
    'multilevel_logistic': {
        'name': 'Multilevel Logistic Regression',
        'type': 'Bayesian hierarchical',
        'description': 'Bernoulli response with fixed effects and state random intercepts',
    },
    'hmc': {
        'name': 'Hamiltonian Monte Carlo',
        'type': 'Sampler',
        'description': 'Fixed-length leapfrog trajectories with dual-averaging warmup',
    },
}

EXIT_CODES = {
    'success': 0,
    'model_failure': 1,
    'input_failure': 2,
}
