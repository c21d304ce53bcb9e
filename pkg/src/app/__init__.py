from .experiment_bootstrapper import ExperimentBootstrapper
from .experiment_runner import ExperimentRunner
from .reports import emit_plotdata, write_report
