import math

# Configuration générale
APP_NAME = "hmergm"
APP_TITLE = "ERGM multicouches hiérarchiques"
APP_SUBTITLE = "Modèles bayésiens pour réseaux pondérés ordinaux"
VERSION = "0.3.0"

# Thème des graphiques
THEME_CONFIG = {
    'primary': '#FF4B4B',    # Rouge pour les observations
    'secondary': '#1F77B4',  # Bleu pour les tirages a posteriori
    'replicate': '#B0B0B0',  # Gris pour les réseaux simulés
    'background': '#F0F2F6',
    'text': '#262730'
}

CHART_HEIGHT = 400
CHART_WIDTH = 600

# Journalisation
LOG_FORMAT = "%(asctime)s %(levelname)-7s %(name)s: %(message)s"
LOG_DATE_FORMAT = "%H:%M:%S"

# Réseaux
MAX_WEIGHT = 64
EDGELIST_COLUMNS = ['i', 'j', 'weight']
LAYER_COLUMNS = ['i', 'j']
ATTRIBUTE_NODE_COLUMN = 'node'

# Jeux de données intégrés et seuils d'ordinalisation de référence
DATASETS = ('karate',)
KARATE_THRESHOLDS = (1, 3, 4)

# Sorties de la CLI
DEFAULT_OUT_DIR = "out"
RESOLVED_CONFIG_NAME = "config.json"

# Statistiques ERGM
STATISTIC_KINDS = ('edges', 'gwdegree', 'gwesp', 'gwnsp', 'nodematch')
GW_KINDS = ('gwdegree', 'gwesp', 'gwnsp')
DEFAULT_DECAY = math.log(2)

# Simulation des couches
STEPS_PER_EDGE = 50
SIM_BURN_IN = 0.0

# Loi a priori Normale-Inverse-Wishart (mu0 = 0, Lambda0 = I_r, nu0 = r + 2)
PRIOR_KAPPA0 = 1.0
PRIOR_NU0_OFFSET = 2.0

# Échantillonneur
N_CHAINS = 4
N_ITERATIONS = 10_000
BURN_IN = 0.5
THINNING = 100
ADS_ENABLED = True
ADS_GAMMA = 0.5
ADS_SIGMA = 0.025
PROPOSAL_SIGMA = 0.1
INIT_JITTER = 0.1
DEFAULT_SEED = 0
ACCEPTANCE_BAND = (0.10, 0.40)

# Fichiers a posteriori
POSTERIOR_COLUMNS = ['chain', 'iteration', 'layer', 'param_index', 'value']
HYPER_COLUMNS = ['chain', 'iteration', 'quantity', 'row', 'col', 'value']
ACCEPTANCE_COLUMNS = ['chain', 'layer', 'proposed', 'accepted', 'rate']

# Adéquation (GOF)
GOF_QUANTILES = (0.025, 0.5, 0.975)
GOF_REPLICATES = 100
SUMMARY_QUANTILES = (0.025, 0.5, 0.975)

# Codes de sortie
EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_DATA = 2
EXIT_NUMERICAL = 3

# Format des nombres
NUMBER_FORMAT = {
    'mean': '{:.2f}',
    'sd': '{:.2f}',
    'ess': '{:.0f}',
    'rhat': '{:.3f}'
}
