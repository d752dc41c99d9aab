"""
Constants for the fdpower CLI
Centralized location for version numbers, known keys, defaults and help text
"""

from config.settings import settings

# Version Information
CLI_VERSION = settings.version
CLI_APP_NAME = "fdpower"

WELCOME_MESSAGE = "Coverage, rate, ASE and EE of full-duplex cellular networks under downlink power control"

# Significant digits of every float written to CSV
CSV_SIGNIFICANT_DIGITS = 9

# Physical dimension of each config key; decides which unit suffixes it accepts
NETWORK_KEYS = {
    "lambda_bs": "density",
    "lambda_ue": "density",
    "alpha": "plain",
    "beta": "ratio",
    "p_ue": "power",
    "p_static": "power",
    "p_max": "power",
    "p_min": "power",
    "bandwidth_w": "bandwidth",
    "rate_bs": "rate",
    "rate_ue": "rate",
    "apc_ue_always_on": "flag",
    "apc_rate_includes_xi": "flag",
}

SCHEME_KEYS = {
    "scheme": "text",
    "p_bar": "power",
    "epsilon": "plain",
    "xi": "plain",
}

SIMULATION_KEYS = {
    "n_trials": "integer",
    "target_ci_halfwidth": "plain",
    "seed": "integer",
    "window_radius": "distance",
    "edge_handling": "text",
    "guard_fraction": "plain",
    "chunk_size": "integer",
    "workers": "integer",
}

KNOWN_KEYS = {**NETWORK_KEYS, **SCHEME_KEYS, **SIMULATION_KEYS}

# Keys a sweep may vary, plus the serving link distance
SWEEP_AXES = tuple(key for key, dim in {**NETWORK_KEYS, **SCHEME_KEYS}.items() if dim not in ("flag", "text")) + (
    "link_distance",
)

METRICS = ("p_ul", "p_dl", "rate_ul", "rate_dl", "ase", "ee", "fd_rate", "hd_rate", "crossover")

ENGINE_ALIASES = {
    "lower": "bound_lower",
    "upper": "bound_upper",
    "exact": "exact",
    "mc": "monte_carlo",
    "bound_lower": "bound_lower",
    "bound_upper": "bound_upper",
    "monte_carlo": "monte_carlo",
}

# Template written by `fdpower config init`
CONFIG_TEMPLATE = """\
# fdpower run configuration: key = value, '#' starts a comment.
# Units are optional; values without a unit are SI (W, Hz, bps, m, per m^2).

# network
lambda_bs = 1 per-km2
lambda_ue = 10 per-km2
alpha = 4
beta = -100 dB
p_ue = 0.2 W
p_static = 0.15 W
p_max = 2 W
p_min = 0.2 W
bandwidth_w = 10 MHz
rate_bs = 10 Mbps
rate_ue = 10 Mbps
apc_ue_always_on = true
apc_rate_includes_xi = true

# scheme: cpc | upc | fpc | apc
scheme = cpc
# p_bar = 0.2 W
# epsilon = 0.1
# xi = 0.5

# monte carlo
# n_trials = 36879
target_ci_halfwidth = 0.005
seed = 20240601
edge_handling = guard_zone
"""

# Command Descriptions
COMMAND_DESCRIPTIONS = {
    "fdpower analyze": "Coverage, rates, ASE and EE of one scheme per engine",
    "fdpower sweep": "CSV of metrics over one swept parameter",
    "fdpower optimize": "Max-min (or ASE/EE) parameter search for one scheme",
    "fdpower validate": "Run the self-consistency suites",
    "fdpower experiment": "Bound tightness, peak-power, tradeoff and SI-requirement studies",
    "fdpower config show": "Print the resolved run configuration",
    "fdpower config init": "Write a configuration template with default values",
}
