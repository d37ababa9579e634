"""Figure rendering for dceslab CSV outputs."""

from .csvio import InputError, read_curve, read_matrix, read_spectrum
from .render import Curve, Panel, PlotJob, load_job, render

__version__ = "0.1.0"
