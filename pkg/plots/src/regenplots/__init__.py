from .render import DPI, PlotJob, plot_envelope, plot_qq, read_csv_columns, render

__version__ = "0.1.0"
