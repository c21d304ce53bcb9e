from .cli_args import CLIArgs
from .config import Config
