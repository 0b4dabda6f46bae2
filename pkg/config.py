# Standard library imports
import os
import yaml
import copy
import logging
from logging.handlers import RotatingFileHandler
from typing import Dict, Any
from lib.utils import (
    coerce_bool,
    coerce_float,
    coerce_int,
    toolkit_logger
)

# -----------------------------------------------------------
# Default Constants
# -----------------------------------------------------------
CONFIG_PATH = os.environ.get('CARLESON_CONFIG', 'config.yaml')

DEFAULT_LOGGING = {
    'dir': 'logs',
    'file': 'carleson.log',
    'level': 'INFO',
}

DEFAULT_NUMERICS = {
    'boundary_guard': 1e-12,
    'distinct_tol': 1e-10,
    'log_form_degree': 64,
    'cluster_tol': 1e-8,
    'series_margin': 1e-3,
    'series_max_terms': 1_000_000,
    'gram_rel_tol': 1e-13,
    'near_boundary': 1e-4,
    'node_min_gap': 1e-6,
    'self_test': False,
    'self_test_step': 1e-5,
}

DEFAULT_SCAN = {
    'radial': 64,
    'angular': 128,
    'refine_cells': 16,
    'refine_depth': 12,
    'budget': 10_000_000,
    'tol': 1e-3,
    'geodesic_cells': 4096,
    'collinear_tol': 1e-12,
}

DEFAULT_SOLVER = {
    'boundary_grid': 512,
    'gap_tol': 1e-9,
    'jitter': 1e-9,
    'flatness_tol': 1e-6,
    'jet_tol': 1e-8,
    'refine_steps': 2,
}

DEFAULT_CONSTRUCTION = {
    'first_point': 0.5,
    'bisection_tol': 1e-13,
    'max_bisection': 400,
    'max_depth': 200.0,
    'threshold_margin': 1e-9,
}

DEFAULT_RUN = {
    'tol': 1e-3,
    'seed': 0,
    'grid_depth': 12,
    'trials': 32,
    'slack': 0.1,
}

_INT_KEYS = {
    'log_form_degree', 'series_max_terms', 'radial', 'angular', 'refine_cells',
    'refine_depth', 'budget', 'geodesic_cells', 'boundary_grid', 'max_bisection',
    'seed', 'grid_depth', 'trials', 'refine_steps',
}
_BOOL_KEYS = {'self_test'}

# -----------------------------------------------------------
# Config Loading Logic
# -----------------------------------------------------------
def _load_raw_config() -> Dict[str, Any]:
    try:
        with open(CONFIG_PATH, 'r', encoding='utf-8') as config_file:
            return yaml.safe_load(config_file) or {}
    except FileNotFoundError:
        return {}
    except Exception as exc:
        toolkit_logger.warning("Failed to load %s: %s", CONFIG_PATH, exc)
        return {}

def _merge_section(defaults: Dict[str, Any], user_values: Any) -> Dict[str, Any]:
    settings: Dict[str, Any] = copy.deepcopy(defaults)
    if not isinstance(user_values, dict):
        return settings
    for key, value in user_values.items():
        if key not in defaults:
            toolkit_logger.warning("Ignoring unknown config key '%s'", key)
            continue
        if key in _BOOL_KEYS:
            settings[key] = coerce_bool(value, defaults[key])
        elif key in _INT_KEYS:
            settings[key] = coerce_int(value, defaults[key])
        elif isinstance(defaults[key], float):
            settings[key] = coerce_float(value, defaults[key])
        else:
            settings[key] = value
    return settings

def _build_app_config() -> Dict[str, Any]:
    raw_config = _load_raw_config()
    if not isinstance(raw_config, dict):
        toolkit_logger.warning("%s does not hold a mapping, using defaults", CONFIG_PATH)
        raw_config = {}
    return {
        'logging': _merge_section(DEFAULT_LOGGING, raw_config.get('logging')),
        'numerics': _merge_section(DEFAULT_NUMERICS, raw_config.get('numerics')),
        'scan': _merge_section(DEFAULT_SCAN, raw_config.get('scan')),
        'solver': _merge_section(DEFAULT_SOLVER, raw_config.get('solver')),
        'construction': _merge_section(DEFAULT_CONSTRUCTION, raw_config.get('construction')),
        'run': _merge_section(DEFAULT_RUN, raw_config.get('run')),
    }

# -----------------------------------------------------------
# Global Configuration Objects
# -----------------------------------------------------------
APP_CONFIG = _build_app_config()
LOGGING_SETTINGS = APP_CONFIG['logging']
NUMERIC_SETTINGS = APP_CONFIG['numerics']
SCAN_SETTINGS = APP_CONFIG['scan']
SOLVER_SETTINGS = APP_CONFIG['solver']
CONSTRUCTION_SETTINGS = APP_CONFIG['construction']
RUN_DEFAULTS = APP_CONFIG['run']

BOUNDARY_GUARD = NUMERIC_SETTINGS['boundary_guard']

# -----------------------------------------------------------
# Logging Configuration
# -----------------------------------------------------------
os.makedirs(LOGGING_SETTINGS['dir'], exist_ok=True)
toolkit_logger.setLevel(getattr(logging, str(LOGGING_SETTINGS['level']).upper(), logging.INFO))

# Avoid adding multiple handlers if reloaded
if not toolkit_logger.handlers:
    handler = RotatingFileHandler(
        os.path.join(LOGGING_SETTINGS['dir'], LOGGING_SETTINGS['file']),
        maxBytes=10_000_000,
        backupCount=3,
    )
    handler.setFormatter(logging.Formatter('%(asctime)s [%(levelname)s] %(message)s'))
    toolkit_logger.addHandler(handler)
