"""
Configuration for the EV routing engine
"""

import os
from pathlib import Path
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()


def _optional_float(name: str):
    value = os.getenv(name, '').strip()
    return float(value) if value else None


class RoutingConfig:
    """Configuration class for the routing engine, CLI and API"""

    BASE_DIR = Path(__file__).parent.parent

    # Input files
    GRAPH_FILE = os.getenv('EVROUTE_GRAPH_FILE', '')
    PARAMS_FILE = os.getenv('EVROUTE_PARAMS_FILE', '')
    CHARGERS_FILE = os.getenv('EVROUTE_CHARGERS_FILE', '')

    # Vehicle
    DEFAULT_CAPACITY_WH = int(os.getenv('EVROUTE_DEFAULT_CAPACITY_WH', '60000'))
    CHARGE_RATE_WH_PER_S = _optional_float('EVROUTE_CHARGE_RATE_WH_PER_S')  # no physical default

    # Guards for the exact oracle
    PARETO_GUARD = int(os.getenv('EVROUTE_PARETO_GUARD', '50000000'))  # max n * C
    ENUMERATION_BUDGET = int(os.getenv('EVROUTE_ENUMERATION_BUDGET', '2000000'))

    # Logging
    LOG_LEVEL = os.getenv('EVROUTE_LOG_LEVEL', 'WARNING').upper()

    # Server
    BIND = os.getenv('EVROUTE_BIND', '0.0.0.0:8080')
    WORKERS = int(os.getenv('EVROUTE_WORKERS', '0'))  # 0 = cpu based
    LOG_DIR = os.getenv('EVROUTE_LOG_DIR', str(BASE_DIR / 'logs'))

    @classmethod
    def validate(cls) -> bool:
        """Validate that a graph file is configured and present"""
        if not cls.GRAPH_FILE:
            return False
        return Path(cls.GRAPH_FILE).exists()

    @classmethod
    def get_status(cls) -> dict:
        """Get configuration status"""
        return {
            'graph_configured': cls.validate(),
            'graph_file': cls.GRAPH_FILE,
            'params_file': cls.PARAMS_FILE or None,
            'chargers_file': cls.CHARGERS_FILE or None,
            'default_capacity_wh': cls.DEFAULT_CAPACITY_WH,
            'charge_rate_wh_per_s': cls.CHARGE_RATE_WH_PER_S,
            'pareto_guard': cls.PARETO_GUARD
        }
