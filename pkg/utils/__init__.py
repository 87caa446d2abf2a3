# Utils package
from .logging_config import configure_cli_logging, setup_logging, get_logger, level_from_verbosity, reset_logging

__all__ = ['configure_cli_logging', 'setup_logging', 'get_logger', 'level_from_verbosity', 'reset_logging']
