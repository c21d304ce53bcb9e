import functools
import logging
import importlib
import re
from typing import Optional, List, Type
from types import ModuleType

from pydantic import BaseModel

from src.experiments import BaseExperiment
from src.core.config import AppConfig, ExperimentSettings, ExperimentConfigT
from src.core.logs import get_logger
from src.core.exceptions import ExperimentBootstrapError

log = logging.getLogger(__name__)

EXPERIMENTS_PARENT_LOGGER_NAME = "experiments"

EXPERIMENT_MODULE_NAME = "experiment"
EXPERIMENT_CLASS_NAME = "Experiment"

EXPERIMENT_CONFIG_MODULE_NAME = "config"
EXPERIMENT_CONFIG_CLASS_NAME = "Config"


def _convert_path_to_module_path(path: str) -> str:
    """
    Converts a filesystem path to a Python module path.

    Args:
        path (str): The filesystem path to convert.

    Returns:
        str: The corresponding Python module path.
    """
    module_path = re.sub(r"[\\/]+", ".", path).lstrip(".").rstrip(".")
    while ".." in module_path:
        module_path = module_path.replace("..", ".")
    return module_path


def get_experiment_logger(experiment_type: str, experiment_name: Optional[str]) -> logging.Logger:
    """
    Retrieves the logger for the specified experiment.

    Args:
        experiment_type (str): The type of the experiment.
        experiment_name (Optional[str]): The name of the experiment.

    Returns:
        logging.Logger: The logger for the experiment.
    """
    return get_logger(EXPERIMENTS_PARENT_LOGGER_NAME, experiment_type, experiment_name)


class ExperimentBootstrapper:
    """
    A class responsible for bootstrapping experiments by loading their configurations and classes.

    Every experiment type is a subpackage of the experiments directory holding an `experiment` module with an
    `Experiment` class and a `config` module with a `Config` model.
    """

    def __init__(self, experiments_dir_path: str, app_config: AppConfig):
        """
        Initializes the ExperimentBootstrapper with the path to the experiments' directory.

        Args:
            experiments_dir_path (str): The path to the directory containing experiment subpackages.
            app_config (AppConfig): The application configuration handed to every experiment.
        """
        self._experiments_dir_path = experiments_dir_path
        self._experiments_dir_module_path = _convert_path_to_module_path(experiments_dir_path)
        self._app_config = app_config

    def bootstrap_experiments(self, experiments_settings: List[ExperimentSettings]) -> List[BaseExperiment]:
        """
        Bootstraps a list of experiments based on their settings, skipping disabled ones.

        Args:
            experiments_settings (List[ExperimentSettings]): A list of settings for each experiment.

        Returns:
            List[BaseExperiment]: A list of successfully bootstrapped experiment instances.
        """
        experiments = []

        log.info(f"Processing {len(experiments_settings)} experiments settings...")
        for experiment_settings in experiments_settings:
            if experiment_settings.enabled:
                log.debug(f"Experiment '{experiment_settings.qualified_name}' is enabled. Bootstrapping...")
                experiment = self.bootstrap_experiment(experiment_settings)
                experiments.append(experiment)
            else:
                log.debug(f"Experiment '{experiment_settings.qualified_name}' is disabled. Skipping bootstrap...")

        if not experiments:
            log.warning("No experiments were bootstrapped (no experiments configured or all are disabled)")
        else:
            log.info(f"Successfully bootstrapped {len(experiments)} enabled experiments")

        return experiments

    def bootstrap_experiment(self, experiment_settings: ExperimentSettings) -> BaseExperiment:
        """
        Bootstraps a single experiment based on the provided settings.

        The experiment config is always validated against the type's `Config` model, so experiments without a
        config section run with the model defaults.

        Args:
            experiment_settings (ExperimentSettings): The configuration settings for the experiment.

        Returns:
            BaseExperiment: The initialized experiment instance.
        """
        log.debug(f"Retrieving logger for experiment: '{experiment_settings.qualified_name}'")
        logger = get_experiment_logger(experiment_settings.type, experiment_settings.name)

        if not isinstance(experiment_settings.config, BaseModel):
            log.debug(f"Loading config class for experiment type: '{experiment_settings.type}'")
            experiment_config_class = self.load_experiment_config_class(experiment_settings.type)

            log.debug(f"Initializing config model for experiment: '{experiment_settings.qualified_name}'")
            experiment_config = experiment_config_class(**(experiment_settings.config or {}))
            experiment_settings = experiment_settings.model_copy(update={"config": experiment_config}, deep=False)

        log.debug(f"Loading class for experiment type: '{experiment_settings.type}'")
        experiment_class = self.load_experiment_class(experiment_settings.type)

        log.debug(f"Initializing experiment instance: '{experiment_settings.qualified_name}'")
        experiment = experiment_class(experiment_settings, logger, self._app_config)
        log.debug(f"Successfully bootstrapped experiment: '{experiment}'")

        return experiment

    def load_experiment_class(self, experiment_type: str) -> Type[BaseExperiment]:
        """
        Loads the class of an experiment based on the experiment type.

        Raises:
            ExperimentBootstrapError: If the experiment module does not contain the expected experiment class.
        """
        experiment_module = self.load_experiment_module(experiment_type)
        try:
            return getattr(experiment_module, EXPERIMENT_CLASS_NAME)
        except AttributeError as error:
            raise ExperimentBootstrapError(
                f"Experiment module does not have attribute of experiment class: '{EXPERIMENT_CLASS_NAME}'"
            ) from error

    def load_experiment_config_class(self, experiment_type: str) -> Type[ExperimentConfigT]:
        """
        Loads the configuration class of an experiment based on the experiment type.

        Raises:
            ExperimentBootstrapError: If the experiment config module does not contain the expected config class.
        """
        experiment_config_module = self.load_experiment_config_module(experiment_type)
        try:
            return getattr(experiment_config_module, EXPERIMENT_CONFIG_CLASS_NAME)
        except AttributeError as error:
            raise ExperimentBootstrapError(
                f"Experiment config module does not have attribute of config class: '{EXPERIMENT_CONFIG_CLASS_NAME}'"
            ) from error

    @functools.lru_cache
    def load_experiment_module(self, experiment_type: str) -> ModuleType:
        """
        Loads the experiment module using caching.

        Raises:
            ExperimentBootstrapError: If the experiment module cannot be loaded.
        """
        experiment_module_path = self.get_experiment_module_path(experiment_type)
        try:
            return importlib.import_module(experiment_module_path)
        except ImportError as error:
            raise ExperimentBootstrapError(
                f"Failed to load experiment module: '{experiment_module_path}'"
            ) from error

    @functools.lru_cache
    def load_experiment_config_module(self, experiment_type: str) -> ModuleType:
        """
        Loads the experiment configuration module using caching.

        Raises:
            ExperimentBootstrapError: If the experiment config module cannot be loaded.
        """
        experiment_config_module_path = self.get_experiment_config_module_path(experiment_type)
        try:
            return importlib.import_module(experiment_config_module_path)
        except ImportError as error:
            raise ExperimentBootstrapError(
                f"Failed to load experiment config module: '{experiment_config_module_path}'"
            ) from error

    def get_experiment_module_path(self, experiment_type: str) -> str:
        return f"{self._experiments_dir_module_path}.{experiment_type}.{EXPERIMENT_MODULE_NAME}"

    def get_experiment_config_module_path(self, experiment_type: str) -> str:
        return f"{self._experiments_dir_module_path}.{experiment_type}.{EXPERIMENT_CONFIG_MODULE_NAME}"
